//! Inputs shared by the benchmarks.

use num_complex::Complex64;
use shearmap::functions::{self, kernel_phi};
use shearmap::{GridSpec, Series};

/// Deterministic dense series with `c_0 = 1` and slowly decaying terms.
pub fn dense_series(order: usize) -> Series {
    Series::from_fn(order, |k| {
        let k = k as f64;
        Complex64::new((0.7 * k).cos(), (1.3 * k).sin()) / (1.0 + k)
    })
}

pub fn koebe(order: usize) -> Series {
    functions::koebe()
        .to_series(order)
        .expect("koebe has no pole in the disk")
}

pub fn kernel(order: usize) -> Series {
    kernel_phi(std::f64::consts::FRAC_PI_6, -std::f64::consts::FRAC_PI_6, order)
}

/// Coarse grid for timing searches without long runs.
pub fn small_grid() -> GridSpec {
    GridSpec::new(16, 0.99, 128, 72, 36).expect("valid grid")
}
