//! Harmonic maps `f = h + conj(g)` and the three ways of producing new ones:
//! shearing an analytic function, convex combination, and convolution.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::convexity::GridSpec;
use crate::error::{check_range, Error, Result};
use crate::functions::ClosedForm;
use crate::series::Series;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance for `h(0) = g(0) = 0` and the normalization checks.
const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Coefficient tolerance for the shared-`phi` hypothesis of [`lemma7_residual`].
pub const SHARED_PHI_TOLERANCE: f64 = 1e-10;

/// Largest `|z|` accepted by [`lemma7_residual`].
pub const LEMMA7_RADIUS: f64 = 0.95;

/// A harmonic map on the unit disk given by its analytic and co-analytic
/// parts.
///
/// Construction enforces `h(0) = g(0) = 0` and `h'(0) != 0`. The stronger
/// `S_H^0` normalization `h'(0) = 1, g'(0) = 0` is reported by
/// [`HarmonicMap::is_sh0_normalized`] but not required: shears with
/// `omega(0) != 0` legitimately break it.
#[derive(Debug, Clone)]
pub struct HarmonicMap {
    h: Series,
    g: Series,
    h_cf: Option<ClosedForm>,
    g_cf: Option<ClosedForm>,
    label: String,
}

impl HarmonicMap {
    pub fn new(label: impl Into<String>, h: Series, g: Series) -> Result<Self> {
        let (h0, h1) = (h.coeffs()[0], h.coeff(1).unwrap_or_default());
        let g0 = g.coeffs()[0];
        if h0.norm() > NORMALIZATION_TOLERANCE
            || g0.norm() > NORMALIZATION_TOLERANCE
            || h1.norm() <= NORMALIZATION_TOLERANCE
        {
            return Err(Error::MapNotNormalized);
        }
        Ok(Self {
            h,
            g,
            h_cf: None,
            g_cf: None,
            label: label.into(),
        })
    }

    /// Attaches exact closed forms for `h` and `g`.
    pub fn with_closed_forms(mut self, h: ClosedForm, g: ClosedForm) -> Self {
        self.h_cf = Some(h);
        self.g_cf = Some(g);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn h(&self) -> &Series {
        &self.h
    }

    pub fn g(&self) -> &Series {
        &self.g
    }

    pub fn h_closed_form(&self) -> Option<&ClosedForm> {
        self.h_cf.as_ref()
    }

    pub fn g_closed_form(&self) -> Option<&ClosedForm> {
        self.g_cf.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.h.order().min(self.g.order())
    }

    /// `h'(0) = 1` and `g'(0) = 0`.
    pub fn is_sh0_normalized(&self) -> bool {
        let h1 = self.h.coeff(1).unwrap_or_default();
        let g1 = self.g.coeff(1).unwrap_or_default();
        (h1 - ONE).norm() <= NORMALIZATION_TOLERANCE && g1.norm() <= NORMALIZATION_TOLERANCE
    }

    /// The dilatation `omega = g' / h'` as a series.
    pub fn dilatation(&self) -> Series {
        self.g
            .derive()
            .divide(&self.h.derive())
            .expect("h'(0) != 0 is a construction invariant")
    }

    /// `h(z) + conj(g(z))` from the series.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.h.eval(z)? + self.g.eval(z)?.conj())
    }

    /// `h(z) + conj(g(z))` from the attached closed forms, if any.
    pub fn eval_closed_form(&self, z: Complex64) -> Option<Result<Complex64>> {
        let (h, g) = (self.h_cf.as_ref()?, self.g_cf.as_ref()?);
        Some((|| Ok(h.eval(z)? + g.eval(z)?.conj()))())
    }
}

/// Inputs of the shear construction: `h + lambda g = phi` with dilatation
/// `omega`.
#[derive(Debug, Clone)]
pub struct ShearSpec {
    pub phi: Series,
    pub omega: Series,
    pub lambda: Complex64,
}

impl ShearSpec {
    pub fn new(phi: Series, omega: Series, lambda: Complex64) -> Result<Self> {
        check_range(
            "|lambda|",
            lambda.norm(),
            (lambda.norm() - 1.0).abs() <= NORMALIZATION_TOLERANCE,
            "{1}",
        )?;
        let w0 = omega.coeffs()[0].norm();
        if w0 >= 1.0 {
            return Err(Error::DilatationNotSubunit(w0));
        }
        let (c0, c1) = (phi.coeffs()[0], phi.coeff(1).unwrap_or_default());
        if c0.norm() > NORMALIZATION_TOLERANCE || (c1 - ONE).norm() > NORMALIZATION_TOLERANCE {
            return Err(Error::PhiNotNormalized { c0, c1 });
        }
        Ok(Self { phi, omega, lambda })
    }
}

/// Shear construction: `h' = phi' / (1 + lambda omega)`, `g' = omega h'`, both
/// integrated from 0. The result has order `min(order, phi.order(),
/// omega.order() + 1)`.
pub fn shear(spec: &ShearSpec, order: usize) -> Result<HarmonicMap> {
    let n = order.min(spec.phi.order()).min(spec.omega.order() + 1);
    let dphi = spec.phi.truncate(n).derive();
    let omega = spec.omega.truncate(n.saturating_sub(1));
    let denom = Series::one(omega.order()).linear_combine(&omega, ONE, spec.lambda);
    let dh = dphi.divide(&denom)?;
    let dg = omega.cauchy_product(&dh);
    HarmonicMap::new("shear", dh.integrate(), dg.integrate())
}

/// `t f1 + (1 - t) f2`, part by part. Closed forms carry over when both
/// operands have them.
pub fn combine(f1: &HarmonicMap, f2: &HarmonicMap, t: f64) -> Result<HarmonicMap> {
    check_range("t", t, (0.0..=1.0).contains(&t), "[0, 1]")?;
    let (s, u) = (Complex64::new(t, 0.0), Complex64::new(1.0 - t, 0.0));
    let h = f1.h.linear_combine(&f2.h, s, u);
    let g = f1.g.linear_combine(&f2.g, s, u);
    let label = format!("{t}*{} + {}*{}", f1.label, 1.0 - t, f2.label);
    let mut out = HarmonicMap::new(label, h, g)?;
    if let (Some(h1), Some(g1), Some(h2), Some(g2)) = (&f1.h_cf, &f1.g_cf, &f2.h_cf, &f2.g_cf) {
        out = out.with_closed_forms(
            t * h1.clone() + (1.0 - t) * h2.clone(),
            t * g1.clone() + (1.0 - t) * g2.clone(),
        );
    }
    Ok(out)
}

/// Convolution `f1 * f2 = h1 * h2 + conj(g1 * g2)` with `*` the Hadamard
/// product.
pub fn convolve(f1: &HarmonicMap, f2: &HarmonicMap) -> HarmonicMap {
    let h = f1.h.hadamard(&f2.h);
    let g = f1.g.hadamard(&f2.g);
    HarmonicMap::new(format!("{} * {}", f1.label, f2.label), h, g).expect("product of normalized maps is normalized")
}

pub fn eval_map(f: &HarmonicMap, z: Complex64) -> Result<Complex64> {
    f.eval(z)
}

/// Evaluates `s` at every point, in parallel. Points must already be inside
/// the evaluation disk.
pub(crate) fn eval_points(s: &Series, points: &[Complex64]) -> Vec<Complex64> {
    points.par_iter().map(|&z| s.horner(z)).collect()
}

/// `min (|h'| - |g'|)` over the disk grid. A positive value is sampled
/// evidence that `f` is locally univalent and sense-preserving.
pub fn sense_preserving_margin(f: &HarmonicMap, grid: &GridSpec) -> f64 {
    let (dh, dg) = (f.h.derive(), f.g.derive());
    grid.disk_points()
        .par_iter()
        .map(|&z| dh.horner(z).norm() - dg.horner(z).norm())
        .reduce(|| f64::INFINITY, f64::min)
}

/// Pointwise dilatation `g'(z) / h'(z)`.
fn dilatation_at(dh: &Series, dg: &Series, z: Complex64) -> Complex64 {
    dg.horner(z) / dh.horner(z)
}

/// Residual of the identity
/// `Re K(omega_3) = t Re K(omega_1) + (1 - t) Re K(omega_2)`, with
/// `K(w) = (1 + lambda w) / (1 - lambda w)` and `omega_3` the dilatation of
/// `t f1 + (1 - t) f2`. The identity holds whenever `h_j - lambda g_j` is the
/// same function for both maps.
///
/// Dilatations are evaluated pointwise as `g'(z)/h'(z)` rather than from the
/// quotient series, so truncation cancels exactly.
pub fn lemma7_residual(f1: &HarmonicMap, f2: &HarmonicMap, lambda: Complex64, t: f64, z: Complex64) -> Result<f64> {
    check_range("t", t, (0.0..=1.0).contains(&t), "[0, 1]")?;
    if z.norm() > LEMMA7_RADIUS {
        return Err(Error::OutsideEvaluationDisk {
            modulus: z.norm(),
            r_max: LEMMA7_RADIUS,
        });
    }
    let phi1 = f1.h.linear_combine(&f1.g, ONE, -lambda);
    let phi2 = f2.h.linear_combine(&f2.g, ONE, -lambda);
    let gap = phi1.max_coeff_distance(&phi2);
    if gap > SHARED_PHI_TOLERANCE {
        return Err(Error::HypothesisViolated(format!(
            "h1 - lambda g1 and h2 - lambda g2 differ by {gap:e}"
        )));
    }
    let f3 = combine(f1, f2, t)?;
    let k = |f: &HarmonicMap| {
        let w = dilatation_at(&f.h.derive(), &f.g.derive(), z);
        ((ONE + lambda * w) / (ONE - lambda * w)).re
    };
    Ok((k(&f3) - t * k(f1) - (1.0 - t) * k(f2)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{self, halfplane};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z_series(n: usize) -> Series {
        Series::variable(n)
    }

    #[test]
    fn zero_dilatation_gives_analytic_map() {
        let phi = functions::half_log().to_series(64).unwrap();
        let f = shear(&ShearSpec::new(phi.clone(), Series::zero(63), ONE).unwrap(), 64).unwrap();
        assert!(f.h().max_coeff_distance(&phi) < 1e-15);
        assert_eq!(f.g().sup_norm(), 0.0);
        assert!(f.is_sh0_normalized());
    }

    #[test]
    fn shear_of_halfplane_with_minus_z() {
        let n = 64;
        let phi = halfplane().to_series(n).unwrap();
        let f = shear(&ShearSpec::new(phi, -&z_series(n), ONE).unwrap(), n).unwrap();
        // h' = 1/(1-z)^3 has coefficients (k+1)(k+2)/2
        for (k, ck) in f.h().derive().coeffs().iter().enumerate() {
            let expected = ((k + 1) * (k + 2)) as f64 / 2.0;
            assert!((ck - c(expected, 0.0)).norm() <= 1e-9 * expected);
        }
        let h7 = (ClosedForm::z() - 0.5 * ClosedForm::z().powi(2)) / functions::poly(&[1.0, -1.0]).powi(2);
        let g7 = (-0.5 * ClosedForm::z().powi(2)) / functions::poly(&[1.0, -1.0]).powi(2);
        for z in [c(0.3, 0.1), c(-0.4, 0.2), c(0.0, -0.5)] {
            assert!((f.h().eval(z).unwrap() - h7.eval(z).unwrap()).norm() < 1e-12);
            assert!((f.g().eval(z).unwrap() - g7.eval(z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn shear_spec_validation() {
        let n = 8;
        let phi = Series::variable(n);
        assert!(matches!(
            ShearSpec::new(phi.clone(), Series::constant(c(1.0, 0.0), n), ONE),
            Err(Error::DilatationNotSubunit(_))
        ));
        assert!(matches!(
            ShearSpec::new(phi.scale(c(2.0, 0.0)), Series::zero(n), ONE),
            Err(Error::PhiNotNormalized { .. })
        ));
        assert!(ShearSpec::new(phi, Series::zero(n), c(0.5, 0.0)).is_err());
    }

    #[test]
    fn dilatation_examples() {
        let n = 32;
        let f = HarmonicMap::new("id", Series::variable(n), Series::zero(n)).unwrap();
        assert_eq!(f.dilatation().sup_norm(), 0.0);
        assert!(HarmonicMap::new("bad", Series::zero(n), Series::zero(n)).is_err());
    }

    #[test]
    fn combine_examples() {
        let n = 32;
        let phi = functions::half_log().to_series(n).unwrap();
        let f1 = shear(&ShearSpec::new(phi.clone(), z_series(n), ONE).unwrap(), n).unwrap();
        let f2 = shear(&ShearSpec::new(phi, -&z_series(n), ONE).unwrap(), n).unwrap();
        let one = combine(&f1, &f2, 1.0).unwrap();
        assert_eq!(one.h(), f1.h());
        assert_eq!(one.g(), f1.g());
        let same = combine(&f1, &f1, 0.37).unwrap();
        assert!(same.h().max_coeff_distance(f1.h()) < 1e-16);
        assert!(matches!(combine(&f1, &f2, 1.2), Err(Error::ParamOutOfRange { .. })));
        assert!(combine(&f1, &f2, -0.1).is_err());
    }

    #[test]
    fn convolve_examples() {
        let n = 32;
        let phi = functions::half_log().to_series(n).unwrap();
        let f = shear(&ShearSpec::new(phi, z_series(n), ONE).unwrap(), n).unwrap();
        let hp = HarmonicMap::new("hp", halfplane().to_series(n).unwrap(), Series::zero(n)).unwrap();
        let r = convolve(&f, &hp);
        assert!(r.h().max_coeff_distance(f.h()) < 1e-15);
        assert_eq!(r.g().sup_norm(), 0.0);

        let a = HarmonicMap::new("a", functions::koebe().to_series(n).unwrap(), Series::zero(n)).unwrap();
        let b = convolve(&a, &hp);
        assert_eq!(b.g().sup_norm(), 0.0);

        // commutativity
        let f2 = shear(
            &ShearSpec::new(
                functions::koebe().to_series(n).unwrap(),
                Series::monomial(2, c(0.0, 0.5), n),
                ONE,
            )
            .unwrap(),
            n,
        )
        .unwrap();
        let (ab, ba) = (convolve(&f, &f2), convolve(&f2, &f));
        assert_eq!(ab.h(), ba.h());
        assert_eq!(ab.g(), ba.g());
    }

    #[test]
    fn eval_map_examples() {
        let n = 32;
        let phi = functions::half_log().to_series(n).unwrap();
        let f = shear(&ShearSpec::new(phi.clone(), z_series(n), ONE).unwrap(), n).unwrap();
        assert_eq!(eval_map(&f, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let a = HarmonicMap::new("a", phi.clone(), Series::zero(n)).unwrap();
        let z = c(0.2, -0.3);
        assert_eq!(eval_map(&a, z).unwrap(), phi.eval(z).unwrap());
        assert!(eval_map(&a, c(0.999, 0.0)).is_err());
    }

    #[test]
    fn sense_preserving_margin_positive_for_subunit_dilatation() {
        let grid = GridSpec::default();
        let n = grid.working_order();
        let phi = functions::half_log().to_series(n).unwrap();
        let f = shear(&ShearSpec::new(phi.clone(), z_series(n), ONE).unwrap(), n).unwrap();
        assert!(sense_preserving_margin(&f, &grid) > 0.0);

        let analytic = HarmonicMap::new("a", phi.clone(), Series::zero(n)).unwrap();
        let m = sense_preserving_margin(&analytic, &grid);
        let min_dphi = grid
            .disk_points()
            .iter()
            .map(|&z| phi.derive().horner(z).norm())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(m, min_dphi);
    }

    #[test]
    fn combination_dilatation_identity_examples() {
        let n = 64;
        let phi = functions::half_log().to_series(n).unwrap();
        let f1 = shear(&ShearSpec::new(phi.clone(), z_series(n), ONE).unwrap(), n).unwrap();
        let f2 = shear(
            &ShearSpec::new(phi, Series::monomial(2, c(-1.0, 0.0), n), ONE).unwrap(),
            n,
        )
        .unwrap();
        let lambda = c(-1.0, 0.0);
        let z = c(0.3, 0.2);
        assert!(lemma7_residual(&f1, &f1, lambda, 0.4, z).unwrap() <= 1e-12);
        assert!(lemma7_residual(&f1, &f2, lambda, 1.0, z).unwrap() <= 1e-12);
        assert!(lemma7_residual(&f1, &f2, lambda, 0.5, z).unwrap() <= 1e-10);
        assert!(matches!(
            lemma7_residual(&f1, &f2, ONE, 0.5, z),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(lemma7_residual(&f1, &f2, lambda, 0.5, c(0.96, 0.0)).is_err());
    }

    fn blaschke(rng: &mut ChaCha8Rng, n: usize) -> Series {
        let factors = rng.gen_range(1..=3);
        let mut w = Series::constant(Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)), n);
        for _ in 0..factors {
            let a = Complex64::from_polar(rng.gen_range(0.0..0.5), rng.gen_range(0.0..std::f64::consts::TAU));
            let num = Series::from_fn(n, |k| match k {
                0 => -a,
                1 => ONE,
                _ => c(0.0, 0.0),
            });
            let den = Series::from_fn(n, |k| match k {
                0 => ONE,
                1 => -a.conj(),
                _ => c(0.0, 0.0),
            });
            w = &w * &num.divide(&den).unwrap();
        }
        w
    }

    #[test]
    fn shear_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 128;
        for i in 0..30 {
            let (mu, nu) = (
                rng.gen_range(0.0..std::f64::consts::PI),
                rng.gen_range(0.0..std::f64::consts::PI),
            );
            let cp = Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..std::f64::consts::TAU));
            let p = functions::mobius_herglotz(cp).to_series(n).unwrap();
            let phi = if i % 2 == 0 {
                functions::lemma3_phi(mu, nu, &p, n).unwrap()
            } else {
                functions::lemma4_phi(mu - std::f64::consts::FRAC_PI_2, nu, &p, n).unwrap()
            };
            let omega = blaschke(&mut rng, n);
            let lambda = if rng.gen() { ONE } else { -ONE };
            let f = shear(&ShearSpec::new(phi.clone(), omega.clone(), lambda).unwrap(), n).unwrap();
            let resid = f.h().linear_combine(f.g(), ONE, lambda).max_coeff_distance(&phi);
            assert!(resid <= 1e-13 * (1.0 + phi.sup_norm()), "residual {resid}");
            let back = f.dilatation().truncate(n - 2);
            assert!(back.max_coeff_distance(&omega) <= 1e-11);
        }
    }
}
