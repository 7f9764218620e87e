//! Sampled certificates for convexity in a direction.
//!
//! Each criterion is a real functional that must be nonnegative (or
//! positive) on the whole disk. Here it is sampled on a polar [`GridSpec`]
//! and the minimum is reported. A minimum at or above `-POSITIVITY_MARGIN`
//! counts as a pass.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::functions::kernel_quadratic;
use crate::harmonic::eval_points;
use crate::series::{Series, DEFAULT_ORDER, DEFAULT_R_MAX};

/// Sampled minima at or above `-POSITIVITY_MARGIN` count as nonnegative.
pub const POSITIVITY_MARGIN: f64 = 1e-9;

/// Refinement subdivides one coarse cell on each side into this many steps.
const REFINE_FACTOR: usize = 10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Sample layout for disk-wide minima and for the `(mu, nu)` certificate
/// search.
///
/// Radii are `1 - (1 - r_max)^(k / radii)` for `k = 1..=radii`, so gaps
/// shrink geometrically toward the boundary. Angles are `2 pi j / angles`.
/// `mu` runs over `2 pi i / mu_steps` for `i < mu_steps`; `nu` over
/// `pi j / nu_steps` for `j = 0..=nu_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub radii: usize,
    pub r_max: f64,
    pub angles: usize,
    pub mu_steps: usize,
    pub nu_steps: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            radii: 48,
            r_max: 0.99,
            angles: 256,
            mu_steps: 180,
            nu_steps: 90,
        }
    }
}

impl GridSpec {
    pub fn new(radii: usize, r_max: f64, angles: usize, mu_steps: usize, nu_steps: usize) -> Result<Self> {
        check_range("radii", radii as f64, radii >= 8, ">= 8")?;
        check_range("angles", angles as f64, angles >= 64, ">= 64")?;
        check_range("r_max", r_max, r_max > 0.0 && r_max <= DEFAULT_R_MAX, "(0, 0.995]")?;
        check_range("mu_steps", mu_steps as f64, mu_steps >= 4, ">= 4")?;
        check_range("nu_steps", nu_steps as f64, nu_steps >= 2, ">= 2")?;
        Ok(Self {
            radii,
            r_max,
            angles,
            mu_steps,
            nu_steps,
        })
    }

    /// Same certificate grid, different disk sampling.
    pub fn with_disk(self, radii: usize, angles: usize) -> Result<Self> {
        Self::new(radii, self.r_max, angles, self.mu_steps, self.nu_steps)
    }

    pub fn radius(&self, k: usize) -> f64 {
        1.0 - (1.0 - self.r_max).powf(k as f64 / self.radii as f64)
    }

    pub fn disk_points(&self) -> Vec<Complex64> {
        let mut pts = Vec::with_capacity(self.radii * self.angles);
        for k in 1..=self.radii {
            let r = self.radius(k);
            for j in 0..self.angles {
                pts.push(Complex64::from_polar(r, TAU * j as f64 / self.angles as f64));
            }
        }
        pts
    }

    pub fn mu_step(&self) -> f64 {
        TAU / self.mu_steps as f64
    }

    pub fn nu_step(&self) -> f64 {
        PI / self.nu_steps as f64
    }

    pub fn mu_values(&self) -> Vec<f64> {
        (0..self.mu_steps).map(|i| i as f64 * self.mu_step()).collect()
    }

    pub fn nu_values(&self) -> Vec<f64> {
        (0..=self.nu_steps).map(|j| j as f64 * self.nu_step()).collect()
    }

    /// Series order at which truncation is negligible on this grid: the
    /// smallest `N >= DEFAULT_ORDER` with `r_max^N <= e^-40`.
    pub fn working_order(&self) -> usize {
        let n = (40.0 / -self.r_max.ln()).ceil() as usize;
        n.max(DEFAULT_ORDER)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    RoysterZiegler,
    Kernel,
}

/// A sampled witness for convexity in a direction. `mu, nu` are meaningful
/// for [`CertificateKind::RoysterZiegler`], `theta1, theta2` for
/// [`CertificateKind::Kernel`]; the other pair is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub mu: f64,
    pub nu: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub min_value: f64,
    pub grid: GridSpec,
    /// The parameters came from the refinement pass, not the coarse grid.
    pub refined: bool,
}

impl Certificate {
    pub fn passes(&self) -> bool {
        self.min_value >= -POSITIVITY_MARGIN
    }
}

/// `Re(-i e^{i mu} (1 - 2 z e^{-i mu} cos nu + z^2 e^{-2 i mu}) phi'(z))`.
pub fn rz_functional(phi: &Series, mu: f64, nu: f64, z: Complex64) -> Result<f64> {
    let dphi = phi.derive().eval(z)?;
    let e = Complex64::from_polar(1.0, -mu);
    let q = 1.0 - 2.0 * z * e * nu.cos() + z * z * e * e;
    Ok((-I * Complex64::from_polar(1.0, mu) * q * dphi).re)
}

/// `phi'` sampled on the disk grid, split so the functional at any
/// `(mu, nu)` is a cheap linear combination:
/// `F = Re(-i e^{i mu} A - i e^{-i mu} C) + cos nu * Re(2 i B)` with
/// `A = phi'`, `B = z phi'`, `C = z^2 phi'`.
struct RzSampler {
    a: Vec<Complex64>,
    c: Vec<Complex64>,
    /// `Re(2 i B) = -2 Im(z phi')`
    w: Vec<f64>,
}

impl RzSampler {
    fn new(phi: &Series, grid: &GridSpec) -> Self {
        let pts = grid.disk_points();
        let dphi = eval_points(&phi.derive(), &pts);
        let mut a = Vec::with_capacity(pts.len());
        let mut c = Vec::with_capacity(pts.len());
        let mut w = Vec::with_capacity(pts.len());
        for (z, d) in pts.iter().zip(dphi) {
            a.push(d);
            c.push(z * z * d);
            w.push(-2.0 * (z * d).im);
        }
        Self { a, c, w }
    }

    fn base(&self, mu: f64) -> Vec<f64> {
        let (ep, em) = (
            -I * Complex64::from_polar(1.0, mu),
            -I * Complex64::from_polar(1.0, -mu),
        );
        self.a
            .iter()
            .zip(&self.c)
            .map(|(a, c)| (ep * a).re + (em * c).re)
            .collect()
    }

    fn min_with(&self, base: &[f64], nu: f64) -> f64 {
        let cn = nu.cos();
        base.iter()
            .zip(&self.w)
            .map(|(u, w)| u + cn * w)
            .fold(f64::INFINITY, f64::min)
    }

    fn min_at(&self, mu: f64, nu: f64) -> f64 {
        self.min_with(&self.base(mu), nu)
    }
}

/// Disk-wide minima of the Royster-Ziegler functional at every coarse
/// `(mu, nu)` candidate, stored `mu`-major.
#[derive(Debug, Clone)]
pub struct RzScan {
    pub grid: GridSpec,
    pub mins: Vec<f64>,
}

impl RzScan {
    pub fn get(&self, mu_index: usize, nu_index: usize) -> f64 {
        self.mins[mu_index * (self.grid.nu_steps + 1) + nu_index]
    }

    /// Index of the largest minimum; ties go to the first in scan order.
    pub fn best(&self) -> (usize, usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (k, &m) in self.mins.iter().enumerate() {
            if m > best.1 {
                best = (k, m);
            }
        }
        let cols = self.grid.nu_steps + 1;
        (best.0 / cols, best.0 % cols, best.1)
    }
}

fn scan_with(sampler: &RzSampler, grid: &GridSpec) -> RzScan {
    let nus = grid.nu_values();
    let mins = grid
        .mu_values()
        .into_par_iter()
        .flat_map_iter(|mu| {
            let base = sampler.base(mu);
            nus.iter().map(|&nu| sampler.min_with(&base, nu)).collect::<Vec<_>>()
        })
        .collect();
    RzScan { grid: *grid, mins }
}

/// Evaluates the functional's disk minimum at every coarse candidate.
pub fn rz_scan(phi: &Series, grid: &GridSpec) -> RzScan {
    scan_with(&RzSampler::new(phi, grid), grid)
}

/// Searches `(mu, nu)` for a nonnegative Royster-Ziegler functional.
///
/// Takes the coarse candidate with the largest disk minimum, then searches
/// a `REFINE_FACTOR`-times finer lattice over the neighbouring cells. Returns
/// the best parameters if their minimum is at least `-POSITIVITY_MARGIN`.
/// `None` means nothing was found at this resolution, not that `phi` fails
/// to be convex in the direction of the imaginary axis.
pub fn find_rz_certificate(phi: &Series, grid: &GridSpec) -> Option<Certificate> {
    let sampler = RzSampler::new(phi, grid);
    let scan = scan_with(&sampler, grid);
    let (i, j, coarse_min) = scan.best();
    let (mu0, nu0) = (i as f64 * grid.mu_step(), j as f64 * grid.nu_step());

    let r = REFINE_FACTOR as i64;
    let (dmu, dnu) = (
        grid.mu_step() / REFINE_FACTOR as f64,
        grid.nu_step() / REFINE_FACTOR as f64,
    );
    let candidates: Vec<(f64, f64)> = (-r..=r)
        .flat_map(|k| (-r..=r).map(move |l| (k, l)))
        .filter(|&(k, l)| k != 0 || l != 0)
        .map(|(k, l)| (mu0 + k as f64 * dmu, nu0 + l as f64 * dnu))
        .filter(|&(_, nu)| (0.0..=PI).contains(&nu))
        .collect();
    let refined: Vec<f64> = candidates.par_iter().map(|&(mu, nu)| sampler.min_at(mu, nu)).collect();

    let mut best = (mu0, nu0, coarse_min, false);
    for (&(mu, nu), &m) in candidates.iter().zip(&refined) {
        if m > best.2 {
            best = (mu.rem_euclid(TAU), nu, m, true);
        }
    }
    let cert = Certificate {
        kind: CertificateKind::RoysterZiegler,
        mu: best.0,
        nu: best.1,
        theta1: 0.0,
        theta2: 0.0,
        min_value: best.2,
        grid: *grid,
        refined: best.3,
    };
    cert.passes().then_some(cert)
}

/// Disk minimum of the functional at one fixed `(mu, nu)`.
pub fn rz_min_at(phi: &Series, mu: f64, nu: f64, grid: &GridSpec) -> f64 {
    RzSampler::new(phi, grid).min_at(mu, nu)
}

/// Searches for a certificate that `phi` maps onto a domain convex in the
/// direction `gamma`. Rotating the image by `e^{i(pi/2 - gamma)}` turns
/// direction-`gamma` lines into vertical lines, so `gamma = 0` tests the
/// real direction and `gamma = pi/2` the imaginary one.
pub fn convex_in_direction(phi: &Series, gamma: f64, grid: &GridSpec) -> Option<Certificate> {
    let rotated = phi.scale(Complex64::from_polar(1.0, FRAC_PI_2 - gamma));
    find_rz_certificate(&rotated, grid)
}

/// `min Re(z F'(z) / kappa(z))` with
/// `kappa(z) = z / ((1 + z e^{i theta1})(1 + z e^{i theta2}))`.
///
/// Computed as `Re(F'(z) (1 + z e^{i theta1})(1 + z e^{i theta2}))`, which
/// has no removable singularity at the origin.
pub fn kernel_criterion(f: &Series, theta1: f64, theta2: f64, grid: &GridSpec) -> f64 {
    let q = kernel_quadratic(theta1, theta2, 2);
    let df = f.derive();
    grid.disk_points()
        .par_iter()
        .map(|&z| (df.horner(z) * q.horner(z)).re)
        .reduce(|| f64::INFINITY, f64::min)
}

/// Wraps a [`kernel_criterion`] result as a certificate.
pub fn kernel_certificate(f: &Series, theta1: f64, theta2: f64, grid: &GridSpec) -> Certificate {
    Certificate {
        kind: CertificateKind::Kernel,
        mu: 0.0,
        nu: 0.0,
        theta1,
        theta2,
        min_value: kernel_criterion(f, theta1, theta2, grid),
        grid: *grid,
        refined: false,
    }
}

/// `min Re p` over the disk grid, for `p(0) = 1`.
pub fn herglotz_min(p: &Series, grid: &GridSpec) -> Result<f64> {
    let p0 = p.coeffs()[0];
    if (p0 - 1.0).norm() > 1e-12 {
        return Err(Error::NotNormalizedP(p0));
    }
    Ok(eval_points(p, &grid.disk_points())
        .into_iter()
        .map(|v| v.re)
        .fold(f64::INFINITY, f64::min))
}

/// `min Re((psi F) * xi / (psi * xi))` over the disk grid, `*` being the
/// Hadamard product. Numerator and denominator both vanish at 0 and are
/// divided by `z` before evaluation.
pub fn convolution_positivity_min(psi: &Series, xi: &Series, f: &Series, grid: &GridSpec) -> Result<f64> {
    for (name, s) in [("psi", psi), ("xi", xi)] {
        if s.coeffs()[0].norm() > 1e-12 {
            return Err(Error::HypothesisViolated(format!("{name}(0) != 0")));
        }
    }
    let num = psi.cauchy_product(f).hadamard(xi).div_z();
    let den = psi.hadamard(xi).div_z();
    let pts = grid.disk_points();
    let nv = eval_points(&num, &pts);
    let dv = eval_points(&den, &pts);
    let mut min = f64::INFINITY;
    for ((z, n), d) in pts.iter().zip(nv).zip(dv) {
        if d.norm() < 1e-12 {
            return Err(Error::DegenerateDenominator(*z));
        }
        min = min.min((n / d).re);
    }
    Ok(min)
}
