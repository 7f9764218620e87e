//! Checks of the hypotheses and conclusions for linear combinations and
//! convolutions of shears, and builders for the three worked examples.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::convexity::{
    convex_in_direction, find_rz_certificate, kernel_certificate, rz_min_at, Certificate, CertificateKind, GridSpec,
    POSITIVITY_MARGIN,
};
use crate::error::{check_range, Error, Result};
use crate::functions::{self, c1_closed_form, c2_closed_form, halfplane, kernel_phi, poly, ClosedForm};
use crate::harmonic::{
    combine, convolve, sense_preserving_margin, shear, HarmonicMap, ShearSpec, SHARED_PHI_TOLERANCE,
};
use crate::series::Series;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    /// Sampled minimum of the quantity that must be non-negative.
    pub margin: f64,
    pub holds: bool,
}

impl Hypothesis {
    fn sampled(name: impl Into<String>, margin: f64) -> Self {
        Self {
            name: name.into(),
            margin,
            holds: margin >= -POSITIVITY_MARGIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessReport {
    pub theorem_id: String,
    pub hypotheses: Vec<Hypothesis>,
    pub conclusion_certificate: Option<Certificate>,
    pub maps: Vec<String>,
    pub passed: bool,
}

impl HarnessReport {
    fn finish(theorem_id: &str, hypotheses: Vec<Hypothesis>, cert: Option<Certificate>, maps: Vec<String>) -> Self {
        let passed = hypotheses.iter().all(|h| h.holds) && cert.as_ref().is_some_and(Certificate::passes);
        Self {
            theorem_id: theorem_id.to_string(),
            hypotheses,
            conclusion_certificate: cert,
            maps,
            passed,
        }
    }
}

/// Two shears `h_j + lambda_j g_j = phi_j` with dilatations `omega_j`,
/// combined as `t f1 + (1 - t) f2`.
#[derive(Debug, Clone)]
pub struct CombinationSpec {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub phi: Series,
    pub psi: Series,
    pub omega1: Series,
    pub omega2: Series,
    pub t: f64,
    /// Overrides the direction in which the combination is tested.
    pub direction: Option<f64>,
    /// Kernel angles for the mixed-sign case.
    pub kernel: Option<(f64, f64)>,
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= UNIT_TOLERANCE
}

/// Direction of convexity inherited by `h + lambda g` when every map in the
/// class `h + lambda g = phi` with `phi` convex in the imaginary direction
/// is rotated back: `arg(-lambda) / 2`, reduced to `[0, pi)`.
pub fn inherited_direction(lambda: Complex64) -> f64 {
    (0.5 * (-lambda).arg()).rem_euclid(PI)
}

fn disk_min(grid: &GridSpec, f: impl Fn(Complex64) -> f64 + Sync) -> f64 {
    grid.disk_points()
        .par_iter()
        .map(|&z| f(z))
        .reduce(|| f64::INFINITY, f64::min)
}

/// `min Re(h1' conj(h2') - g1' conj(g2'))`, i.e.
/// `Re((1 - omega1 conj(omega2)) h1' conj(h2'))` without dividing.
fn cross_term_margin(f1: &HarmonicMap, f2: &HarmonicMap, grid: &GridSpec) -> f64 {
    let (dh1, dg1, dh2, dg2) = (f1.h().derive(), f1.g().derive(), f2.h().derive(), f2.g().derive());
    disk_min(grid, |z| {
        (dh1.horner(z) * dh2.horner(z).conj() - dg1.horner(z) * dg2.horner(z).conj()).re
    })
}

/// `min Re(1 + (omega1 - conj(omega2)) / (1 - omega1 conj(omega2)))` with
/// pointwise dilatations.
fn mixed_sign_margin(f1: &HarmonicMap, f2: &HarmonicMap, grid: &GridSpec) -> f64 {
    let (dh1, dg1, dh2, dg2) = (f1.h().derive(), f1.g().derive(), f2.h().derive(), f2.g().derive());
    disk_min(grid, |z| {
        let w1 = dg1.horner(z) / dh1.horner(z);
        let w2 = dg2.horner(z) / dh2.horner(z);
        (ONE + (w1 - w2.conj()) / (ONE - w1 * w2.conj())).re
    })
}

fn order_for(grid: &GridSpec, series: &[&Series]) -> usize {
    series
        .iter()
        .map(|s| s.order())
        .min()
        .unwrap_or(0)
        .min(grid.working_order())
}

/// Builds both shears and their combination, checks the sampled hypotheses
/// and searches for a convexity certificate of the combination.
///
/// Equal `lambda` with a shared `phi` tests `h + lambda g` in the inherited
/// direction; equal `lambda = +-1` with different `phi, psi` additionally
/// requires `Re((1 - omega1 conj(omega2)) h1' conj(h2')) >= 0`; `lambda`
/// values `1` and `-1` with a shared `phi` test `h - g` in the real
/// direction, through the kernel criterion when angles are given.
pub fn harness_combination(spec: &CombinationSpec, grid: &GridSpec) -> Result<HarnessReport> {
    check_range("t", spec.t, (0.0..=1.0).contains(&spec.t), "[0, 1]")?;
    let same_phi = spec.phi.max_coeff_distance(&spec.psi) <= SHARED_PHI_TOLERANCE;
    let (l1, l2) = (spec.lambda1, spec.lambda2);
    enum Path {
        Shared,
        Distinct,
        Mixed,
    }
    let (id, path) = if close(l1, l2) && same_phi {
        let id = if close(l1, ONE) {
            "t1"
        } else if close(l1, -ONE) {
            "t2"
        } else {
            "t03"
        };
        (id, Path::Shared)
    } else if close(l1, l2) && (close(l1, ONE) || close(l1, -ONE)) {
        (if close(l1, ONE) { "t3" } else { "t4" }, Path::Distinct)
    } else if same_phi && close(l1, -l2) && (close(l1, ONE) || close(l1, -ONE)) {
        ("t5", Path::Mixed)
    } else {
        return Err(Error::SpecAmbiguous(format!(
            "no harness for lambda1 = {l1}, lambda2 = {l2} (shared phi: {same_phi})"
        )));
    };
    // the mixed case is stated for lambda1 = 1, lambda2 = -1
    let (lam1, lam2, omega1, omega2) = if matches!(path, Path::Mixed) && close(l1, -ONE) {
        (l2, l1, &spec.omega2, &spec.omega1)
    } else {
        (l1, l2, &spec.omega1, &spec.omega2)
    };
    let n = order_for(grid, &[&spec.phi, &spec.psi]);
    let f1 = shear(&ShearSpec::new(spec.phi.clone(), omega1.clone(), lam1)?, n)?.with_label("f1");
    let f2 = shear(&ShearSpec::new(spec.psi.clone(), omega2.clone(), lam2)?, n)?.with_label("f2");
    let f3 = combine(&f1, &f2, spec.t)?.with_label("f3");

    let mut hyps = vec![
        Hypothesis::sampled("f1 sense-preserving", sense_preserving_margin(&f1, grid)),
        Hypothesis::sampled("f2 sense-preserving", sense_preserving_margin(&f2, grid)),
    ];
    match path {
        Path::Distinct => hyps.push(Hypothesis::sampled(
            "Re((1 - w1 conj(w2)) h1' conj(h2')) >= 0",
            cross_term_margin(&f1, &f2, grid),
        )),
        Path::Mixed => hyps.push(Hypothesis::sampled(
            "Re(1 + (w1 - conj(w2)) / (1 - w1 conj(w2))) >= 0",
            mixed_sign_margin(&f1, &f2, grid),
        )),
        Path::Shared => {}
    }
    hyps.push(Hypothesis::sampled(
        "f3 sense-preserving",
        sense_preserving_margin(&f3, grid),
    ));

    let cert = match path {
        Path::Mixed => {
            let target = f3.h().linear_combine(f3.g(), ONE, -ONE);
            let gamma = spec.direction.unwrap_or(0.0);
            match spec.kernel {
                Some((t1, t2)) => {
                    let k = kernel_certificate(&target, t1, t2, grid);
                    if k.passes() {
                        Some(k)
                    } else {
                        convex_in_direction(&target, gamma, grid).or(Some(k))
                    }
                }
                None => convex_in_direction(&target, gamma, grid),
            }
        }
        _ => {
            let target = f3.h().linear_combine(f3.g(), ONE, l1);
            let gamma = spec.direction.unwrap_or_else(|| inherited_direction(l1));
            convex_in_direction(&target, gamma, grid)
        }
    };
    let maps = [&f1, &f2, &f3].iter().map(|f| f.label().to_string()).collect();
    Ok(HarnessReport::finish(id, hyps, cert, maps))
}

/// Second factor of a convolution harness; the first is always the
/// half-plane shear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ConvolutionBase {
    /// `int_0^z dzeta / ((1 + zeta e^{i theta1})(1 + zeta e^{i theta2}))`.
    Kernel { theta1: f64, theta2: f64 },
    /// `(1/2) log((1 + z) / (1 - z))`.
    HalfLog,
}

/// Convolves the shear of `z/(1 - z)` (`lambda1`, `omega1`) with the shear
/// of `base` (`lambda2`, `omega2`) and certifies convexity of the result.
/// The working order is the smaller of the grid's working order and
/// `omega.order() + 1`.
pub fn harness_convolution(
    base: ConvolutionBase,
    lambda1: f64,
    lambda2: f64,
    omega1: &Series,
    omega2: &Series,
    grid: &GridSpec,
) -> Result<HarnessReport> {
    for (name, l) in [("lambda1", lambda1), ("lambda2", lambda2)] {
        check_range(name, l, l == 1.0 || l == -1.0, "{-1, 1}")?;
    }
    let id = match (base, lambda1, lambda2) {
        (ConvolutionBase::Kernel { .. }, a, b) if a == 1.0 && b == 1.0 => "t6",
        (ConvolutionBase::Kernel { .. }, a, b) if a == -1.0 && b == -1.0 => "t7",
        (ConvolutionBase::HalfLog, a, b) if a == -1.0 && b == 1.0 => "t8",
        _ => {
            return Err(Error::SpecAmbiguous(format!(
                "no convolution harness for {base:?} with lambda1 = {lambda1}, lambda2 = {lambda2}"
            )))
        }
    };
    let n = grid.working_order().min(omega1.order() + 1).min(omega2.order() + 1);
    let phi2 = match base {
        ConvolutionBase::Kernel { theta1, theta2 } => kernel_phi(theta1, theta2, n),
        ConvolutionBase::HalfLog => functions::half_log().to_series(n)?,
    };
    let phi1 = halfplane().to_series(n)?;
    let re = |x: f64| Complex64::new(x, 0.0);
    let f1 = shear(&ShearSpec::new(phi1, omega1.clone(), re(lambda1))?, n)?.with_label("f1");
    let f2 = shear(&ShearSpec::new(phi2, omega2.clone(), re(lambda2))?, n)?.with_label("f2");
    let f = convolve(&f1, &f2).with_label("f1 * f2");

    let hyps = vec![
        Hypothesis::sampled("f1 sense-preserving", sense_preserving_margin(&f1, grid)),
        Hypothesis::sampled("f2 sense-preserving", sense_preserving_margin(&f2, grid)),
        Hypothesis::sampled("f1 * f2 sense-preserving", sense_preserving_margin(&f, grid)),
    ];
    let cert = match base {
        ConvolutionBase::Kernel { theta1, theta2 } => {
            let target = f.h().linear_combine(f.g(), ONE, -ONE);
            let k = kernel_certificate(&target, theta1, theta2, grid);
            if k.passes() {
                Some(k)
            } else {
                convex_in_direction(&target, 0.0, grid).or(Some(k))
            }
        }
        ConvolutionBase::HalfLog => {
            let target = f.h().linear_combine(f.g(), ONE, ONE);
            let at = Certificate {
                kind: CertificateKind::RoysterZiegler,
                mu: FRAC_PI_2,
                nu: FRAC_PI_2,
                theta1: 0.0,
                theta2: 0.0,
                min_value: rz_min_at(&target, FRAC_PI_2, FRAC_PI_2, grid),
                grid: *grid,
                refined: false,
            };
            if at.passes() {
                Some(at)
            } else {
                find_rz_certificate(&target, grid).or(Some(at))
            }
        }
    };
    let maps = [&f1, &f2, &f].iter().map(|m| m.label().to_string()).collect();
    Ok(HarnessReport::finish(id, hyps, cert, maps))
}

fn log1p(c: Complex64) -> ClosedForm {
    ClosedForm::log1p(c).expect("unit-modulus coefficient")
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn with_cf(f: HarmonicMap, label: &str, h: ClosedForm, g: ClosedForm) -> HarmonicMap {
    f.with_label(label).with_closed_forms(h, g)
}

/// Shared function of the first example: `z/(2(1 - z)) + (1/(4i)) log((1 + iz)/(1 - iz))`.
pub fn example1_phi(order: usize) -> Result<Series> {
    c1_closed_form(0.5, -1.0, FRAC_PI_2)?.to_series(order)
}

/// First example: shears of a common `phi` convex in the imaginary
/// direction with `lambda = 1` and dilatations `z`, `-z^2`, and their
/// average.
pub fn example1(order: usize) -> Result<[HarmonicMap; 3]> {
    let phi = example1_phi(order)?;
    let i = Complex64::new(0.0, 1.0);
    let l_i = || log1p(i) - log1p(-i);
    let l_sq = || log1p(i) + log1p(-i);
    let l_1 = || log1p(ONE);
    let l_m1 = || log1p(-ONE);
    let hp = halfplane;
    let sq = || poly(&[0.0, 2.0, -1.0]) / poly(&[1.0, -1.0]).powi(2);
    let c8i = re(1.0) / (8.0 * i);

    let f1 = shear(&ShearSpec::new(phi.clone(), Series::variable(order), ONE)?, order)?;
    let h1 = c8i * l_i() + 0.375 * l_1() - 0.125 * l_m1() - 0.125 * l_sq() + 0.25 * hp();
    let g1 = c8i * l_i() - 0.375 * l_1() + 0.125 * l_m1() + 0.125 * l_sq() + 0.25 * hp();
    let f1 = with_cf(f1, "f1", h1, g1);

    let f2 = shear(&ShearSpec::new(phi, Series::monomial(2, -ONE, order), ONE)?, order)?;
    let h2 = c8i * l_i() + 0.1875 * (l_1() - l_m1()) + 0.125 * hp() + 0.125 * sq();
    let g2 = c8i * l_i() - 0.1875 * (l_1() - l_m1()) + 0.375 * hp() - 0.125 * sq();
    let f2 = with_cf(f2, "f2", h2, g2);

    let f3 = combine(&f1, &f2, 0.5)?.with_label("f3");
    Ok([f1, f2, f3])
}

/// Shared function of the second example: `(1/4) log((1 + z)/(1 - z)) + z / (2(1 - z)^2)`.
pub fn example2_phi(order: usize) -> Result<Series> {
    c2_closed_form(0.5, -2.0)?.to_series(order)
}

/// Second example: shears with `h - g = phi` (convex in the real direction)
/// and dilatations `1/2`, `-z`, combined with weight `1/3`.
pub fn example2(order: usize) -> Result<[HarmonicMap; 3]> {
    let phi = example2_phi(order)?;
    let l = || log1p(ONE) - log1p(-ONE);
    let inv = || ClosedForm::real(1.0) / poly(&[1.0, -1.0]);
    let inv_sq = || ClosedForm::real(1.0) / poly(&[1.0, -1.0]).powi(2);

    let f4 = shear(
        &ShearSpec::new(phi.clone(), Series::constant(re(0.5), order), -ONE)?,
        order,
    )?;
    let h4 = 0.5 * l() - inv() + inv_sq();
    let g4 = 0.25 * l() - inv() + 0.5 * (poly(&[2.0, -1.0]) * inv_sq());
    let f4 = with_cf(f4, "f4", h4, g4);

    let f5 = shear(&ShearSpec::new(phi, Series::monomial(1, -ONE, order), -ONE)?, order)?;
    let zp = || ClosedForm::z() / poly(&[1.0, 1.0]);
    let h5 = 0.125 * l() + 0.25 * zp() + 0.25 * inv_sq() - ClosedForm::real(0.25);
    let g5 = -0.125 * l() + 0.25 * zp() + 0.25 * (poly(&[1.0, -2.0]) * inv_sq()) - ClosedForm::real(0.25);
    let f5 = with_cf(f5, "f5", h5, g5);

    let f6 = combine(&f4, &f5, 1.0 / 3.0)?.with_label("f6");
    Ok([f4, f5, f6])
}

/// `(sqrt3/6) (log(1 + sqrt3 z + z^2) - log(1 + z^2))`.
fn example3_log_part() -> ClosedForm {
    let i = Complex64::new(0.0, 1.0);
    let e = Complex64::from_polar(1.0, FRAC_PI_6);
    (3f64.sqrt() / 6.0) * (log1p(e) + log1p(e.conj()) - log1p(i) - log1p(-i))
}

/// `arctan(2z + sqrt3) - pi/3`.
fn example3_atan_part() -> ClosedForm {
    ClosedForm::atan_shift(2.0, 3f64.sqrt()).expect("4 <= 1 + 3") - ClosedForm::real(FRAC_PI_3)
}

/// Third example: the half-plane shear with `omega = -z`, the shear of the
/// kernel map with angles `pi/6, -pi/6` and `omega = z^2`, and their
/// convolution.
pub fn example3(order: usize) -> Result<[HarmonicMap; 3]> {
    let hp = halfplane().to_series(order)?;
    let f7 = shear(&ShearSpec::new(hp, Series::monomial(1, -ONE, order), ONE)?, order)?;
    let one_minus_sq = || poly(&[1.0, -1.0]).powi(2);
    let h7 = poly(&[0.0, 1.0, -0.5]) / one_minus_sq();
    let g7 = poly(&[0.0, 0.0, -0.5]) / one_minus_sq();
    let f7 = with_cf(f7, "f7", h7, g7);

    let phi8 = kernel_phi(FRAC_PI_6, -FRAC_PI_6, order);
    let f8 = shear(&ShearSpec::new(phi8, Series::monomial(2, ONE, order), ONE)?, order)?;
    let h8 = example3_log_part() + example3_atan_part();
    let g8 = -1.0 * example3_log_part() + example3_atan_part();
    let f8 = with_cf(f8, "f8", h8, g8);

    let quartic = || poly(&[1.0, 0.0, 1.0]) * poly(&[1.0, 3f64.sqrt(), 1.0]);
    let big_h = 0.5 * (ClosedForm::z() / quartic() + example3_log_part() + example3_atan_part());
    let big_g = 0.5 * (poly(&[0.0, 0.0, 0.0, -1.0]) / quartic() - example3_log_part() + example3_atan_part());
    let f9 = with_cf(convolve(&f7, &f8), "f9", big_h, big_g);
    Ok([f7, f8, f9])
}

/// Builds the maps of example `number` (1, 2 or 3).
pub fn example(number: u8, order: usize) -> Result<[HarmonicMap; 3]> {
    match number {
        1 => example1(order),
        2 => example2(order),
        3 => example3(order),
        n => Err(Error::ParamOutOfRange {
            name: "example",
            value: n as f64,
            range: "{1, 2, 3}",
        }),
    }
}

/// Runs the theorem harness matching example `number`.
pub fn example_harness(number: u8, grid: &GridSpec) -> Result<HarnessReport> {
    let n = grid.working_order();
    match number {
        1 => {
            let phi = example1_phi(n)?;
            harness_combination(
                &CombinationSpec {
                    lambda1: ONE,
                    lambda2: ONE,
                    psi: phi.clone(),
                    phi,
                    omega1: Series::variable(n),
                    omega2: Series::monomial(2, -ONE, n),
                    t: 0.5,
                    direction: None,
                    kernel: None,
                },
                grid,
            )
        }
        2 => {
            let phi = example2_phi(n)?;
            harness_combination(
                &CombinationSpec {
                    lambda1: -ONE,
                    lambda2: -ONE,
                    psi: phi.clone(),
                    phi,
                    omega1: Series::constant(re(0.5), n),
                    omega2: Series::monomial(1, -ONE, n),
                    t: 1.0 / 3.0,
                    direction: None,
                    kernel: None,
                },
                grid,
            )
        }
        3 => harness_convolution(
            ConvolutionBase::Kernel {
                theta1: FRAC_PI_6,
                theta2: -FRAC_PI_6,
            },
            1.0,
            1.0,
            &Series::monomial(1, -ONE, n),
            &Series::monomial(2, ONE, n),
            grid,
        ),
        n => Err(Error::ParamOutOfRange {
            name: "example",
            value: n as f64,
            range: "{1, 2, 3}",
        }),
    }
}

/// `count` deterministic points spread over `|z| <= radius` (sunflower
/// pattern).
pub fn sample_points(count: usize, radius: f64) -> Vec<Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| Complex64::from_polar(radius * ((k as f64 + 0.5) / count as f64).sqrt(), golden * k as f64))
        .collect()
}

/// Largest `|series(z) - closed(z)|` over the given points.
pub fn closed_form_error(series: &Series, closed: &ClosedForm, points: &[Complex64]) -> Result<f64> {
    points
        .iter()
        .map(|&z| Ok((series.eval(z)? - closed.eval(z)?).norm()))
        .try_fold(0.0f64, |m, e: Result<f64>| Ok(m.max(e?)))
}
