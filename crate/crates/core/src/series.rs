//! Truncated complex power series.
//!
//! A [`Series`] stores the coefficients `c_0..=c_N` of an analytic function
//! around the origin. Binary operations truncate to the shorter operand: a
//! coefficient past the order of either input is unknown, not zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 128;

/// Smallest admissible `|b_0|` for [`Series::divide`].
pub const DIVISION_TOLERANCE: f64 = 1e-12;

/// Default cap on `|z|` for [`Series::eval`].
pub const DEFAULT_R_MAX: f64 = 0.995;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Running sum of products with error-free transformations (the Dot2
/// scheme of Ogita, Rump and Oishi).
struct CompensatedSum {
    sum: f64,
    err: f64,
}

impl CompensatedSum {
    fn new(start: f64) -> Self {
        Self { sum: start, err: 0.0 }
    }

    fn add_product(&mut self, x: f64, y: f64) {
        let p = x * y;
        let p_err = x.mul_add(y, -p);
        let s = self.sum + p;
        let z = s - self.sum;
        let s_err = (self.sum - (s - z)) + (p - z);
        self.sum = s;
        self.err += p_err + s_err;
    }

    fn value(&self) -> f64 {
        self.sum + self.err
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    coeffs: Vec<Complex64>,
}

impl Series {
    /// Builds a series from `c_0..=c_N`. Rejects empty or non-finite input.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficients);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub(crate) fn from_vec(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self::from_vec((0..=order).map(f).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self::from_vec(vec![ZERO; order + 1])
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(ONE, order)
    }

    /// The identity function `z`.
    pub fn variable(order: usize) -> Self {
        Self::monomial(1, ONE, order)
    }

    /// `c z^k`, zero when `k > order`.
    pub fn monomial(k: usize, c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Expansion of `1 / (1 - c z)`.
    pub fn geometric(c: Complex64, order: usize) -> Self {
        let mut p = ONE;
        Self::from_fn(order, |_| {
            let out = p;
            p *= c;
            out
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<Complex64> {
        self.coeffs.get(n).copied()
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Drops coefficients past `order`; never extends.
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self::from_vec(self.coeffs[..=n].to_vec())
    }

    fn common_order(&self, other: &Self) -> usize {
        self.order().min(other.order())
    }

    /// `s a + t b`, coefficient-wise.
    pub fn linear_combine(&self, other: &Self, s: Complex64, t: Complex64) -> Self {
        let n = self.common_order(other);
        Self::from_fn(n, |k| s * self.coeffs[k] + t * other.coeffs[k])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_vec(self.coeffs.iter().map(|&c| s * c).collect())
    }

    /// Truncated product, with compensated coefficient sums.
    pub fn cauchy_product(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let (a, b) = (&self.coeffs, &other.coeffs);
        Self::from_fn(n, |k| {
            let (mut re, mut im) = (CompensatedSum::new(0.0), CompensatedSum::new(0.0));
            for j in 0..=k {
                let (x, y) = (a[j], b[k - j]);
                re.add_product(x.re, y.re);
                re.add_product(-x.im, y.im);
                im.add_product(x.re, y.im);
                im.add_product(x.im, y.re);
            }
            Complex64::new(re.value(), im.value())
        })
    }

    /// Quotient `q` with `q * divisor = self` to truncation, by the usual
    /// triangular recurrence. The inner sums are compensated, so each step
    /// is accurate to a few ulps even when its terms cancel heavily.
    pub fn divide(&self, divisor: &Self) -> Result<Self> {
        let b0 = divisor.coeffs[0];
        if b0.norm() <= DIVISION_TOLERANCE {
            return Err(Error::DivisorVanishesAtOrigin(b0));
        }
        let n = self.common_order(divisor);
        let b = &divisor.coeffs;
        let mut q: Vec<Complex64> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let a = self.coeffs[k];
            let mut re = CompensatedSum::new(a.re);
            let mut im = CompensatedSum::new(a.im);
            for j in 0..k {
                let (x, y) = (q[j], b[k - j]);
                re.add_product(-x.re, y.re);
                re.add_product(x.im, y.im);
                im.add_product(-x.re, y.im);
                im.add_product(-x.im, y.re);
            }
            q.push(Complex64::new(re.value(), im.value()) / b0);
        }
        Ok(Self::from_vec(q))
    }

    pub fn reciprocal(&self) -> Result<Self> {
        Self::one(self.order()).divide(self)
    }

    /// Term-wise derivative; order drops by one (a constant stays order 0).
    pub fn derive(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order() - 1, |k| self.coeffs[k + 1] * (k + 1) as f64)
    }

    /// Antiderivative vanishing at 0; order grows by one.
    pub fn integrate(&self) -> Self {
        Self::from_fn(self.order() + 1, |k| {
            if k == 0 {
                ZERO
            } else {
                self.coeffs[k - 1] / k as f64
            }
        })
    }

    /// `z * a`; order grows by one.
    pub fn mul_z(&self) -> Self {
        Self::from_fn(self.order() + 1, |k| if k == 0 { ZERO } else { self.coeffs[k - 1] })
    }

    /// `(a(z) - a(0)) / z`; order drops by one.
    pub fn div_z(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_vec(self.coeffs[1..].to_vec())
    }

    /// Horner evaluation, restricted to `|z| <= DEFAULT_R_MAX`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.eval_within(z, DEFAULT_R_MAX)
    }

    pub fn eval_within(&self, z: Complex64, r_max: f64) -> Result<Complex64> {
        let modulus = z.norm();
        if modulus > r_max {
            return Err(Error::OutsideEvaluationDisk { modulus, r_max });
        }
        Ok(self.horner(z))
    }

    /// Unchecked Horner evaluation for callers that validated `z`.
    pub(crate) fn horner(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Substitution `z -> c z`.
    pub fn compose_scale(&self, c: Complex64) -> Result<Self> {
        if c.norm() > 1.0 + 1e-15 {
            return Err(Error::ScaleExceedsUnit(c.norm()));
        }
        let mut p = ONE;
        Ok(Self::from_vec(
            self.coeffs
                .iter()
                .map(|&a| {
                    let out = a * p;
                    p *= c;
                    out
                })
                .collect(),
        ))
    }

    /// Coefficient-wise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        Self::from_fn(n, |k| self.coeffs[k] * other.coeffs[k])
    }

    /// Largest coefficient modulus.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient-wise distance over the common order.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<_> = self.coeffs.iter().take(6).collect();
        write!(f, "Series(order={}, head={:?}", self.order(), head)?;
        if self.coeffs.len() > 6 {
            write!(f, ", ...")?;
        }
        write!(f, ")")
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.linear_combine(rhs, ONE, ONE)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self.linear_combine(rhs, ONE, -ONE)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-ONE)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        self.cauchy_product(rhs)
    }
}

impl Mul<Complex64> for &Series {
    type Output = Series;
    fn mul(self, rhs: Complex64) -> Series {
        self.scale(rhs)
    }
}
