//! Closed-form analytic functions and the parametric families of
//! normalized analytic functions used as shear bases.
//!
//! [`ClosedForm`] trees evaluate exactly (to machine precision) and expand
//! into [`Series`]; the two routes are kept independent so each can check
//! the other.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{check_range, Error, Result};
use crate::series::Series;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Slack on parameter range checks.
const RANGE_SLACK: f64 = 1e-12;

/// Expression tree for an analytic function on the unit disk.
///
/// `Log1p(c)` is `log(1 + c z)` on the principal branch, and requires
/// `|c| <= 1` so `Re(1 + c z) > 0` on the disk. `AtanShift { a, b }` is
/// `arctan(a z + b)` continued from `arctan(b)` along rays from the origin;
/// it requires `a^2 <= 1 + b^2`, which keeps both of its logarithmic
/// branch points off the open disk.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    Constant(Complex64),
    Variable,
    Add(Box<ClosedForm>, Box<ClosedForm>),
    Mul(Box<ClosedForm>, Box<ClosedForm>),
    Div(Box<ClosedForm>, Box<ClosedForm>),
    IntPow(Box<ClosedForm>, i32),
    Log1p(Complex64),
    AtanShift { a: f64, b: f64 },
}

impl ClosedForm {
    pub fn constant(c: Complex64) -> Self {
        Self::Constant(c)
    }

    pub fn real(x: f64) -> Self {
        Self::Constant(Complex64::new(x, 0.0))
    }

    pub fn z() -> Self {
        Self::Variable
    }

    pub fn log1p(c: Complex64) -> Result<Self> {
        check_range(
            "log1p coefficient |c|",
            c.norm(),
            c.norm() <= 1.0 + RANGE_SLACK,
            "[0, 1]",
        )?;
        Ok(Self::Log1p(c))
    }

    pub fn atan_shift(a: f64, b: f64) -> Result<Self> {
        check_range(
            "arctan slope a",
            a,
            a * a <= 1.0 + b * b + RANGE_SLACK,
            "a^2 <= 1 + b^2",
        )?;
        Ok(Self::AtanShift { a, b })
    }

    pub fn powi(self, k: i32) -> Self {
        Self::IntPow(Box::new(self), k)
    }

    /// Evaluates at `z` inside the open unit disk.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDisk(z.norm()));
        }
        let v = self.eval_inner(z)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::PoleHit(z))
        }
    }

    fn eval_inner(&self, z: Complex64) -> Result<Complex64> {
        Ok(match self {
            Self::Constant(c) => *c,
            Self::Variable => z,
            Self::Add(a, b) => a.eval_inner(z)? + b.eval_inner(z)?,
            Self::Mul(a, b) => a.eval_inner(z)? * b.eval_inner(z)?,
            Self::Div(a, b) => {
                let den = b.eval_inner(z)?;
                if den.norm() == 0.0 {
                    return Err(Error::PoleHit(z));
                }
                a.eval_inner(z)? / den
            }
            Self::IntPow(a, k) => {
                let base = a.eval_inner(z)?;
                if *k < 0 && base.norm() == 0.0 {
                    return Err(Error::PoleHit(z));
                }
                base.powi(*k)
            }
            Self::Log1p(c) => (ONE + c * z).ln(),
            Self::AtanShift { a, b } => {
                let (lo, hi) = atan_log_coefficients(*a, *b);
                let base = Complex64::new(b.atan(), 0.0);
                base + ((ONE + lo * z).ln() - (ONE + hi * z).ln()) / (2.0 * I)
            }
        })
    }

    /// Taylor expansion at the origin through `order`.
    pub fn to_series(&self, order: usize) -> Result<Series> {
        Ok(match self {
            Self::Constant(c) => Series::constant(*c, order),
            Self::Variable => Series::variable(order),
            Self::Add(a, b) => &a.to_series(order)? + &b.to_series(order)?,
            Self::Mul(a, b) => &a.to_series(order)? * &b.to_series(order)?,
            Self::Div(a, b) => a
                .to_series(order)?
                .divide(&b.to_series(order)?)
                .map_err(|_| Error::PoleHit(Complex64::new(0.0, 0.0)))?,
            Self::IntPow(a, k) => {
                let base = a.to_series(order)?;
                let base = if *k < 0 {
                    base.reciprocal()
                        .map_err(|_| Error::PoleHit(Complex64::new(0.0, 0.0)))?
                } else {
                    base
                };
                series_pow(&base, k.unsigned_abs())
            }
            Self::Log1p(c) => log1p_series(*c, order),
            Self::AtanShift { a, b } => {
                let (lo, hi) = atan_log_coefficients(*a, *b);
                let logs = &log1p_series(lo, order) - &log1p_series(hi, order);
                let mut coeffs = logs.scale(1.0 / (2.0 * I)).into_coeffs();
                coeffs[0] += b.atan();
                Series::new(coeffs)?
            }
        })
    }
}

/// `arctan(w) = (1/2i) [log(1 + c_lo z) - log(1 + c_hi z)] + arctan(b)` for
/// `w = a z + b`, with `c_lo = a/(b - i)` and `c_hi = a/(b + i)`.
fn atan_log_coefficients(a: f64, b: f64) -> (Complex64, Complex64) {
    let a = Complex64::new(a, 0.0);
    (a / Complex64::new(b, -1.0), a / Complex64::new(b, 1.0))
}

fn log1p_series(c: Complex64, order: usize) -> Series {
    let mut p = ONE;
    Series::from_fn(order, |n| {
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        p *= c;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        p * (sign / n as f64)
    })
}

fn series_pow(base: &Series, mut k: u32) -> Series {
    let mut acc = Series::one(base.order());
    let mut sq = base.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = &acc * &sq;
        }
        k >>= 1;
        if k > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

impl Add for ClosedForm {
    type Output = ClosedForm;
    fn add(self, rhs: Self) -> Self {
        Self::Add(Box::new(self), Box::new(rhs))
    }
}

impl Sub for ClosedForm {
    type Output = ClosedForm;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ClosedForm {
    type Output = ClosedForm;
    fn neg(self) -> Self {
        Self::real(-1.0) * self
    }
}

impl Mul for ClosedForm {
    type Output = ClosedForm;
    fn mul(self, rhs: Self) -> Self {
        Self::Mul(Box::new(self), Box::new(rhs))
    }
}

impl Div for ClosedForm {
    type Output = ClosedForm;
    fn div(self, rhs: Self) -> Self {
        Self::Div(Box::new(self), Box::new(rhs))
    }
}

impl Mul<ClosedForm> for f64 {
    type Output = ClosedForm;
    fn mul(self, rhs: ClosedForm) -> ClosedForm {
        ClosedForm::real(self) * rhs
    }
}

impl Mul<ClosedForm> for Complex64 {
    type Output = ClosedForm;
    fn mul(self, rhs: ClosedForm) -> ClosedForm {
        ClosedForm::constant(self) * rhs
    }
}

/// Polynomial with real coefficients `c_0 + c_1 z + ...`.
pub fn poly(coeffs: &[f64]) -> ClosedForm {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| match k {
            0 => ClosedForm::real(c),
            1 => c * ClosedForm::z(),
            _ => c * ClosedForm::z().powi(k as i32),
        })
        .reduce(|a, b| a + b)
        .unwrap_or(ClosedForm::real(0.0))
}

/// `log((1 + c1 z) / (1 + c2 z))` as a difference of principal logs.
pub fn log_ratio(c1: Complex64, c2: Complex64) -> Result<ClosedForm> {
    Ok(ClosedForm::log1p(c1)? - ClosedForm::log1p(c2)?)
}

/// `z / (1 - z)`, the half-plane map.
pub fn halfplane() -> ClosedForm {
    ClosedForm::z() / poly(&[1.0, -1.0])
}

/// `z / (1 - z)^2`, the Koebe function.
pub fn koebe() -> ClosedForm {
    ClosedForm::z() / poly(&[1.0, -1.0]).powi(2)
}

/// `(1/2) log((1 + z) / (1 - z))`.
pub fn half_log() -> ClosedForm {
    0.5 * log_ratio(ONE, -ONE).expect("unit coefficients")
}

/// `(1 + c z) / (1 - c z)`: a Herglotz function for `|c| <= 1`.
pub fn mobius_herglotz(c: Complex64) -> ClosedForm {
    (ClosedForm::real(1.0) + c * ClosedForm::z()) / (ClosedForm::real(1.0) - c * ClosedForm::z())
}

/// Mixture of `z(1 - alpha z)/(1 - z^2)` and the logarithmic strip map,
/// both convex in the direction of the imaginary axis.
pub fn c1_closed_form(gamma: f64, alpha: f64, theta: f64) -> Result<ClosedForm> {
    check_range(
        "gamma",
        gamma,
        (-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&gamma),
        "[0, 1]",
    )?;
    check_range(
        "alpha",
        alpha,
        (-1.0 - RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&alpha),
        "[-1, 1]",
    )?;
    check_range(
        "theta",
        theta,
        theta > 0.0 && theta < PI && theta.sin() > 1e-12,
        "(0, pi)",
    )?;
    let rational = ClosedForm::z() * poly(&[1.0, -alpha]) / poly(&[1.0, 0.0, -1.0]);
    let e = Complex64::from_polar(1.0, theta);
    let strip = (1.0 / (2.0 * I * theta.sin())) * log_ratio(e, e.conj())?;
    Ok(gamma * rational + (1.0 - gamma) * strip)
}

/// Mixture of the half-log strip map and `z / (1 + beta z + z^2)`, both
/// convex in the direction of the real axis.
pub fn c2_closed_form(gamma: f64, beta: f64) -> Result<ClosedForm> {
    check_range(
        "gamma",
        gamma,
        (-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&gamma),
        "[0, 1]",
    )?;
    check_range(
        "beta",
        beta,
        (-2.0 - RANGE_SLACK..=2.0 + RANGE_SLACK).contains(&beta),
        "[-2, 2]",
    )?;
    let rational = ClosedForm::z() / poly(&[1.0, beta, 1.0]);
    Ok(gamma * half_log() + (1.0 - gamma) * rational)
}

/// Herglotz function whose generator (with `mu = nu = pi/2`) is the c1 mixture.
pub fn c1_herglotz(gamma: f64, alpha: f64, theta: f64) -> ClosedForm {
    let e = Complex64::from_polar(1.0, theta);
    let first = poly(&[1.0, -2.0 * alpha, 1.0]) / poly(&[1.0, 0.0, -1.0]);
    let second = poly(&[1.0, 0.0, -1.0])
        / ((ClosedForm::real(1.0) + e * ClosedForm::z()) * (ClosedForm::real(1.0) + e.conj() * ClosedForm::z()));
    gamma * first + (1.0 - gamma) * second
}

/// Herglotz function whose generator (with `mu = 0`, `cos nu = -beta/2`)
/// is the c2 mixture.
pub fn c2_herglotz(gamma: f64, beta: f64) -> ClosedForm {
    let q = poly(&[1.0, beta, 1.0]) / poly(&[1.0, 0.0, -1.0]);
    let q_inv = poly(&[1.0, 0.0, -1.0]) / poly(&[1.0, beta, 1.0]);
    gamma * q + (1.0 - gamma) * q_inv
}

/// `(1 + z e^{i theta1})(1 + z e^{i theta2})` through `order`.
pub fn kernel_quadratic(theta1: f64, theta2: f64, order: usize) -> Series {
    let (e1, e2) = (Complex64::from_polar(1.0, theta1), Complex64::from_polar(1.0, theta2));
    let q = [ONE, e1 + e2, e1 * e2];
    Series::from_fn(order, |k| q.get(k).copied().unwrap_or_default())
}

/// `phi(z) = int_0^z d zeta / ((1 + zeta e^{i theta1})(1 + zeta e^{i theta2}))`.
pub fn kernel_phi(theta1: f64, theta2: f64, order: usize) -> Series {
    let n = order.max(1) - 1;
    kernel_quadratic(theta1, theta2, n)
        .reciprocal()
        .expect("kernel quadratic is 1 at the origin")
        .integrate()
}

/// `1 - 2 z e^{-i mu} cos nu + z^2 e^{-2 i mu}`.
pub fn rz_quadratic(mu: f64, nu: f64, order: usize) -> Series {
    let e = Complex64::from_polar(1.0, -mu);
    let q = [ONE, -2.0 * e * nu.cos(), e * e];
    Series::from_fn(order, |k| q.get(k).copied().unwrap_or_default())
}

fn check_herglotz_normalized(p: &Series) -> Result<()> {
    let p0 = p.coeffs()[0];
    if (p0 - ONE).norm() > 1e-12 {
        return Err(Error::NotNormalizedP(p0));
    }
    Ok(())
}

fn generator(mu: f64, nu: f64, numerator: Series) -> Series {
    let n = numerator.order();
    let denominator = rz_quadratic(mu, nu, n).scale(Complex64::from_polar(1.0, mu));
    numerator
        .divide(&denominator)
        .expect("generator denominator is e^{i mu} at the origin")
        .integrate()
}

/// Generator of functions convex in the direction of the imaginary axis:
/// `int_0^z (cos mu + i sin mu p) / (e^{i mu} Q(zeta)) d zeta`, with `Q` from
/// [`rz_quadratic`]. Requires `mu, nu` in `[0, pi]` and `p(0) = 1`.
pub fn lemma3_phi(mu: f64, nu: f64, p: &Series, order: usize) -> Result<Series> {
    check_herglotz_normalized(p)?;
    check_range("mu", mu, (-RANGE_SLACK..=PI + RANGE_SLACK).contains(&mu), "[0, pi]")?;
    check_range("nu", nu, (-RANGE_SLACK..=PI + RANGE_SLACK).contains(&nu), "[0, pi]")?;
    let n = order.max(1) - 1;
    let p = p.truncate(n);
    let numerator =
        p.scale(I * mu.sin())
            .linear_combine(&Series::constant(Complex64::new(mu.cos(), 0.0), p.order()), ONE, ONE);
    Ok(generator(mu, nu, numerator))
}

/// Generator of functions convex in the direction of the real axis:
/// `int_0^z (cos mu p + i sin mu) / (e^{i mu} Q(zeta)) d zeta`. Accepts any
/// `mu` with `cos mu >= 0`, `nu` in `[0, pi]`.
pub fn lemma4_phi(mu: f64, nu: f64, p: &Series, order: usize) -> Result<Series> {
    check_herglotz_normalized(p)?;
    check_range("mu", mu, mu.cos() >= -RANGE_SLACK, "{mu : cos mu >= 0}")?;
    check_range("nu", nu, (-RANGE_SLACK..=PI + RANGE_SLACK).contains(&nu), "[0, pi]")?;
    let n = order.max(1) - 1;
    let p = p.truncate(n);
    let numerator =
        p.scale(Complex64::new(mu.cos(), 0.0))
            .linear_combine(&Series::constant(I * mu.sin(), p.order()), ONE, ONE);
    Ok(generator(mu, nu, numerator))
}

pub fn corollary_c1_phi(gamma: f64, alpha: f64, theta: f64, order: usize) -> Result<Series> {
    c1_closed_form(gamma, alpha, theta)?.to_series(order)
}

pub fn corollary_c2_phi(gamma: f64, beta: f64, order: usize) -> Result<Series> {
    c2_closed_form(gamma, beta)?.to_series(order)
}

/// `nu` with `cos nu = -beta / 2`, the companion angle for the c2 family.
pub fn c2_nu(beta: f64) -> f64 {
    (-beta / 2.0).clamp(-1.0, 1.0).acos()
}

/// The `(mu, nu)` pair under which the c1 family arises from a Herglotz function.
pub const C1_ANGLES: (f64, f64) = (FRAC_PI_2, FRAC_PI_2);
