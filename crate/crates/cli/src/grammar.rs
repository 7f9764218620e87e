//! Textual specs for analytic functions, dilatations, angles and `lambda`.
//!
//! Functions: `halfplane` (z/(1-z)), `koebe` (z/(1-z)^2), `halflog`
//! ((1/2) log((1+z)/(1-z))), `z`, `kernel:T1,T2`, `c1:GAMMA,ALPHA,THETA`,
//! `c2:GAMMA,BETA`.
//!
//! Dilatations: `z`, `-z`, `z^K`, `-z^K`, a real constant with modulus below
//! one, or `blaschke:A` / `blaschke:RE,IM` for `(z - a)/(1 - conj(a) z)`.
//!
//! Angles: decimals or multiples of `pi` such as `pi/6`, `-pi/6`, `2pi/3`,
//! `3*pi/2`.
//!
//! Lambda: `1`, `-1`, `i`, `-i` or `cis:ANGLE`.

use std::fmt;

use shearmap::functions::{self, c1_closed_form, c2_closed_form, kernel_phi};
use shearmap::{Complex64, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct SpecError(pub String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SpecError {}

fn err<T>(msg: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError(msg.into()))
}

fn number(s: &str) -> Result<f64, SpecError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| SpecError(format!("not a number: {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        err(format!("not a finite number: {s:?}"))
    }
}

/// Parses `1.2`, `pi`, `-pi/6`, `2pi/3`, `3*pi/2`.
pub fn angle(s: &str) -> Result<f64, SpecError> {
    let t = s.trim();
    let Some(pos) = t.find("pi") else {
        return number(t);
    };
    let (head, tail) = (&t[..pos], &t[pos + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => number(h)?,
    };
    let denom = match tail {
        "" => 1.0,
        d => match d.strip_prefix('/') {
            Some(d) => number(d)?,
            None => return err(format!("bad angle: {s:?}")),
        },
    };
    if denom == 0.0 {
        return err(format!("zero denominator in angle {s:?}"));
    }
    Ok(coeff * std::f64::consts::PI / denom)
}

fn args<const K: usize>(name: &str, s: &str) -> Result<[f64; K], SpecError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != K {
        return err(format!("{name} expects {K} comma-separated values, got {s:?}"));
    }
    let mut out = [0.0; K];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = angle(p)?;
    }
    Ok(out)
}

/// A normalized analytic function `phi(0) = 0, phi'(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Identity,
    Halfplane,
    Koebe,
    HalfLog,
    Kernel(f64, f64),
    C1(f64, f64, f64),
    C2(f64, f64),
}

impl FunctionSpec {
    pub fn parse(s: &str) -> Result<Self, SpecError> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let spec = match (name, rest) {
            ("z", "") => Self::Identity,
            ("halfplane", "") => Self::Halfplane,
            ("koebe", "") => Self::Koebe,
            ("halflog", "") => Self::HalfLog,
            ("kernel", r) => {
                let [a, b] = args("kernel", r)?;
                Self::Kernel(a, b)
            }
            ("c1", r) => {
                let [g, a, t] = args("c1", r)?;
                Self::C1(g, a, t)
            }
            ("c2", r) => {
                let [g, b] = args("c2", r)?;
                Self::C2(g, b)
            }
            _ => return err(format!("unknown function spec {s:?}")),
        };
        Ok(spec)
    }

    pub fn series(&self, order: usize) -> shearmap::Result<Series> {
        match *self {
            Self::Identity => Ok(Series::variable(order)),
            Self::Halfplane => functions::halfplane().to_series(order),
            Self::Koebe => functions::koebe().to_series(order),
            Self::HalfLog => functions::half_log().to_series(order),
            Self::Kernel(a, b) => Ok(kernel_phi(a, b, order)),
            Self::C1(g, a, t) => c1_closed_form(g, a, t)?.to_series(order),
            Self::C2(g, b) => c2_closed_form(g, b)?.to_series(order),
        }
    }
}

/// An analytic dilatation with `|omega| < 1` on the disk.
#[derive(Debug, Clone, PartialEq)]
pub enum DilatationSpec {
    Monomial { sign: f64, power: usize },
    Constant(f64),
    Blaschke(Complex64),
}

impl DilatationSpec {
    pub fn parse(s: &str) -> Result<Self, SpecError> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("blaschke:") {
            let parts: Vec<&str> = rest.split(',').collect();
            let a = match parts.as_slice() {
                [re] => Complex64::new(number(re)?, 0.0),
                [re, im] => Complex64::new(number(re)?, number(im)?),
                _ => return err(format!("blaschke expects 1 or 2 values, got {rest:?}")),
            };
            if a.norm() >= 1.0 {
                return err(format!("blaschke parameter must lie in the unit disk, got {a}"));
            }
            return Ok(Self::Blaschke(a));
        }
        let (sign, body) = match s.strip_prefix('-') {
            Some(b) => (-1.0, b),
            None => (1.0, s.strip_prefix('+').unwrap_or(s)),
        };
        if let Some(power) = body.strip_prefix('z') {
            let power = match power.strip_prefix('^') {
                Some(p) => p
                    .parse::<usize>()
                    .map_err(|_| SpecError(format!("bad power in {s:?}")))?,
                None if power.is_empty() => 1,
                None => return err(format!("unknown dilatation spec {s:?}")),
            };
            if power == 0 {
                return err("use a constant instead of z^0");
            }
            return Ok(Self::Monomial { sign, power });
        }
        let c = number(s)?;
        if c.abs() >= 1.0 {
            return err(format!("constant dilatation must have modulus below one, got {c}"));
        }
        Ok(Self::Constant(c))
    }

    pub fn series(&self, order: usize) -> Series {
        match *self {
            Self::Monomial { sign, power } => Series::monomial(power, Complex64::new(sign, 0.0), order),
            Self::Constant(c) => Series::constant(Complex64::new(c, 0.0), order),
            Self::Blaschke(a) => {
                // (z - a) / (1 - conj(a) z)
                let num = Series::from_fn(order, |k| match k {
                    0 => -a,
                    1 => Complex64::new(1.0, 0.0),
                    _ => Complex64::default(),
                });
                num.cauchy_product(&Series::geometric(a.conj(), order))
            }
        }
    }
}

/// Parses `1`, `-1`, `i`, `-i`, `cis:ANGLE`.
pub fn lambda(s: &str) -> Result<Complex64, SpecError> {
    let s = s.trim();
    match s {
        "1" | "+1" => Ok(Complex64::new(1.0, 0.0)),
        "-1" => Ok(Complex64::new(-1.0, 0.0)),
        "i" | "+i" => Ok(Complex64::new(0.0, 1.0)),
        "-i" => Ok(Complex64::new(0.0, -1.0)),
        _ => match s.strip_prefix("cis:") {
            Some(a) => Ok(Complex64::from_polar(1.0, angle(a)?)),
            None => err(format!("lambda must be 1, -1, i, -i or cis:ANGLE, got {s:?}")),
        },
    }
}

/// `real` (0), `imag` (pi/2) or an angle.
pub fn direction(s: &str) -> Result<f64, SpecError> {
    match s.trim() {
        "real" => Ok(0.0),
        "imag" => Ok(std::f64::consts::FRAC_PI_2),
        a => angle(a),
    }
}

/// `K,M` grid override: radii and angles.
pub fn grid_size(s: &str) -> Result<(usize, usize), SpecError> {
    let (k, m) = s
        .split_once(',')
        .ok_or_else(|| SpecError(format!("grid expects K,M, got {s:?}")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| SpecError(format!("bad grid size {v:?}")))
    };
    Ok((parse(k)?, parse(m)?))
}

/// `T1,T2` kernel angles.
pub fn angle_pair(s: &str) -> Result<(f64, f64), SpecError> {
    let [a, b] = args("angle pair", s)?;
    Ok((a, b))
}
