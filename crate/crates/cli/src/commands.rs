use std::path::Path;

use num_complex::Complex64;
use serde_json::json;
use shearmap::convexity::{convex_in_direction, rz_scan};
use shearmap::gallery::{self, closed_form_error, sample_points, CombinationSpec, ConvolutionBase};
use shearmap::harmonic::{lemma7_residual, sense_preserving_margin, shear, ShearSpec};
use shearmap::render::{self, circle_image, simple_curve_check, DiskImageSpec};
use shearmap::{GridSpec, HarmonicMap, Series};

use crate::grammar::{DilatationSpec, FunctionSpec, SpecError};
use crate::report::{CheckResult, Report};

pub type AppResult<T> = Result<T, Box<dyn std::error::Error>>;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const CLOSED_FORM_TOLERANCE: f64 = 1e-9;
const SAMPLE_RADIUS: f64 = 0.9;
const SAMPLE_COUNT: usize = 200;
const BOUNDARY_RADIUS: f64 = 0.99;
const BOUNDARY_SAMPLES: usize = 1024;
const LEADING_COEFFICIENTS: usize = 8;

/// Orders used by a command: `nominal` for printed coefficients and
/// coefficient identities, `working` for anything evaluated on the grid.
#[derive(Debug, Clone, Copy)]
pub struct Orders {
    pub nominal: usize,
    pub working: usize,
}

impl Orders {
    pub fn new(nominal: usize, grid: &GridSpec) -> Self {
        Self {
            nominal,
            working: nominal.max(grid.working_order()),
        }
    }
}

fn grid_json(grid: &GridSpec, orders: Orders) -> serde_json::Value {
    json!({
        "order": orders.nominal,
        "working_order": orders.working,
        "grid": grid,
    })
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn closed_form_checks(f: &HarmonicMap, points: &[Complex64]) -> AppResult<Vec<CheckResult>> {
    let mut out = Vec::new();
    for (part, s, cf) in [("h", f.h(), f.h_closed_form()), ("g", f.g(), f.g_closed_form())] {
        if let Some(cf) = cf {
            let e = closed_form_error(s, cf, points)?;
            out.push(CheckResult::error_bound(
                format!("{}: {part} matches closed form", f.label()),
                e,
                CLOSED_FORM_TOLERANCE,
            ));
        }
    }
    Ok(out)
}

fn pointwise_dilatation_check(f: &HarmonicMap, omega: &Series, points: &[Complex64]) -> AppResult<CheckResult> {
    let (dh, dg) = (f.h().derive(), f.g().derive());
    let mut worst = 0.0f64;
    for &z in points {
        let w = dg.eval(z)? / dh.eval(z)?;
        worst = worst.max((w - omega.eval(z)?).norm());
    }
    Ok(CheckResult::error_bound(
        format!("{}: dilatation", f.label()),
        worst,
        1e-10,
    ))
}

fn combination_identity_check(f1: &HarmonicMap, f2: &HarmonicMap, lambda: Complex64, points: &[Complex64]) -> AppResult<CheckResult> {
    let mut worst = 0.0f64;
    for (k, &z) in points.iter().enumerate() {
        let t = (k as f64 + 0.5) / points.len() as f64;
        worst = worst.max(lemma7_residual(f1, f2, lambda, t, z)?);
    }
    Ok(CheckResult::error_bound(
        format!("dilatation identity for t {} + (1 - t) {}", f1.label(), f2.label()),
        worst,
        1e-10,
    ))
}

/// `|a - b|` per coefficient through `order`.
fn coefficient_gap(a: &Series, b: &Series, order: usize) -> f64 {
    a.truncate(order).max_coeff_distance(&b.truncate(order))
}

fn example3_identities(maps: &[HarmonicMap; 3], order: usize) -> Vec<CheckResult> {
    let [_, f8, f9] = maps;
    let through = order.saturating_sub(4);
    let omega = f9.dilatation();
    let gap = coefficient_gap(&omega, &Series::monomial(2, -ONE, through), through);
    let half = Complex64::new(0.5, 0.0);
    let zh = f8.h().derive().mul_z();
    let zg = f8.g().derive().mul_z();
    let h_expected = f8.h().linear_combine(&zh, half, half);
    let g_expected = f8.g().linear_combine(&zg, half, -half);
    vec![
        CheckResult::error_bound("f9: dilatation is -z^2 (coefficients)", gap, 1e-10),
        CheckResult::error_bound(
            "f9: H = (h8 + z h8') / 2",
            coefficient_gap(f9.h(), &h_expected, order),
            1e-11,
        ),
        CheckResult::error_bound(
            "f9: G = (g8 - z g8') / 2",
            coefficient_gap(f9.g(), &g_expected, order),
            1e-11,
        ),
    ]
}

pub fn example(number: u8, nominal: usize, grid: &GridSpec, render_dir: Option<&Path>) -> AppResult<Report> {
    let orders = Orders::new(nominal, grid);
    let maps = gallery::example(number, orders.working)?;
    let points = sample_points(SAMPLE_COUNT, SAMPLE_RADIUS);
    let mut results = Vec::new();
    for f in &maps {
        results.extend(closed_form_checks(f, &points)?);
    }
    match number {
        1 => {
            results.push(pointwise_dilatation_check(&maps[0], &Series::variable(2), &points)?);
            results.push(pointwise_dilatation_check(
                &maps[1],
                &Series::monomial(2, -ONE, 2),
                &points,
            )?);
            results.push(combination_identity_check(&maps[0], &maps[1], -ONE, &points)?);
        }
        2 => {
            results.push(pointwise_dilatation_check(
                &maps[0],
                &Series::constant(Complex64::new(0.5, 0.0), 0),
                &points,
            )?);
            results.push(pointwise_dilatation_check(
                &maps[1],
                &Series::monomial(1, -ONE, 1),
                &points,
            )?);
            results.push(combination_identity_check(&maps[0], &maps[1], ONE, &points)?);
        }
        _ => {
            let coeff_maps = gallery::example(number, orders.nominal)?;
            results.extend(example3_identities(&coeff_maps, orders.nominal));
        }
    }
    let harness = gallery::example_harness(number, grid)?;
    results.extend(CheckResult::from_harness(&harness));

    let mut artifacts = Vec::new();
    if let Some(dir) = render_dir {
        std::fs::create_dir_all(dir)?;
        for (i, f) in maps.iter().enumerate() {
            let fig = 3 * (number as usize - 1) + i + 1;
            let image = render::disk_image(f, &DiskImageSpec::default())?;
            let svg = dir.join(format!("figure{fig}.svg"));
            render::emit_svg(&image, &svg)?;
            let csv = dir.join(format!("figure{fig}.csv"));
            render::emit_csv(&image, &csv)?;
            artifacts.extend([svg.display().to_string(), csv.display().to_string()]);
            let boundary = circle_image(f, BOUNDARY_RADIUS, BOUNDARY_SAMPLES)?;
            let simple = simple_curve_check(&boundary)?;
            results.push(CheckResult {
                name: format!("figure {fig}: image of |z| = {BOUNDARY_RADIUS} is a simple curve"),
                margin: if simple { 0.0 } else { -1.0 },
                certificate: None,
                passed: simple,
                note: None,
            });
        }
    }
    let inputs = json!({
        "example": number,
        "render": render_dir.map(|d| d.display().to_string()),
        "orders": grid_json(grid, orders),
    });
    let mut report = Report::new("example", inputs, results);
    if let Some(dir) = render_dir {
        let path = dir.join(format!("example{number}_report.json"));
        artifacts.push(path.display().to_string());
        report.artifacts = artifacts;
        write_atomically(&path, report.to_json().as_bytes())?;
    }
    Ok(report)
}

fn write_atomically(path: &Path, bytes: &[u8]) -> AppResult<()> {
    use std::io::Write;
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path)?;
    Ok(())
}

pub struct ShearArgs<'a> {
    pub phi: &'a str,
    pub omega: &'a str,
    pub lambda: Complex64,
}

pub fn shear_command(args: &ShearArgs, nominal: usize, grid: &GridSpec) -> AppResult<Report> {
    let orders = Orders::new(nominal, grid);
    let phi_spec = FunctionSpec::parse(args.phi)?;
    let omega_spec = DilatationSpec::parse(args.omega)?;
    let build = |n: usize| -> AppResult<(Series, Series, HarmonicMap)> {
        let phi = phi_spec.series(n)?;
        let omega = omega_spec.series(n);
        let f = shear(&ShearSpec::new(phi.clone(), omega.clone(), args.lambda)?, n)?;
        Ok((phi, omega, f))
    };
    let (phi, omega, f) = build(orders.nominal)?;
    let recombined = f.h().linear_combine(f.g(), ONE, args.lambda);
    let residual = recombined.max_coeff_distance(&phi);
    let dilatation = f.dilatation();
    let dil_order = dilatation.order();
    let dil_gap = dilatation.max_coeff_distance(&omega.truncate(dil_order));
    let dh_scale = 1.0 + f.h().derive().sup_norm();
    let (_, _, wide) = build(orders.working)?;
    let results = vec![
        CheckResult::error_bound("h + lambda g = phi", residual, 1e-13 * (1.0 + phi.sup_norm())),
        CheckResult::error_bound("dilatation recovers omega", dil_gap, 1e-11 * dh_scale),
        CheckResult::positive(
            "sense-preserving (min |h'| - |g'|)",
            sense_preserving_margin(&wide, grid),
            0.0,
        ),
    ];
    let k = LEADING_COEFFICIENTS.min(f.order() + 1);
    let inputs = json!({
        "phi": args.phi,
        "omega": args.omega,
        "lambda": pair(args.lambda),
        "orders": grid_json(grid, orders),
    });
    let mut report = Report::new("shear", inputs, results);
    report.data = Some(json!({
        "h": f.h().coeffs()[..k].iter().map(|&c| pair(c)).collect::<Vec<_>>(),
        "g": f.g().coeffs()[..k].iter().map(|&c| pair(c)).collect::<Vec<_>>(),
    }));
    Ok(report)
}

pub struct CombineArgs<'a> {
    pub phi1: &'a str,
    pub omega1: &'a str,
    pub lambda1: Complex64,
    pub phi2: &'a str,
    pub omega2: &'a str,
    pub lambda2: Complex64,
    pub t: f64,
    pub direction: Option<f64>,
    pub kernel: Option<(f64, f64)>,
}

pub fn combine_command(args: &CombineArgs, nominal: usize, grid: &GridSpec) -> AppResult<Report> {
    let orders = Orders::new(nominal, grid);
    let n = orders.working;
    let spec = CombinationSpec {
        lambda1: args.lambda1,
        lambda2: args.lambda2,
        phi: FunctionSpec::parse(args.phi1)?.series(n)?,
        psi: FunctionSpec::parse(args.phi2)?.series(n)?,
        omega1: DilatationSpec::parse(args.omega1)?.series(n),
        omega2: DilatationSpec::parse(args.omega2)?.series(n),
        t: args.t,
        direction: args.direction,
        kernel: args.kernel,
    };
    let harness = gallery::harness_combination(&spec, grid)?;
    let inputs = json!({
        "phi1": args.phi1,
        "omega1": args.omega1,
        "lambda1": pair(args.lambda1),
        "phi2": args.phi2,
        "omega2": args.omega2,
        "lambda2": pair(args.lambda2),
        "t": args.t,
        "direction": args.direction,
        "kernel": args.kernel,
        "theorem": harness.theorem_id,
        "orders": grid_json(grid, orders),
    });
    Ok(Report::new("combine", inputs, CheckResult::from_harness(&harness)))
}

pub struct ConvolveArgs<'a> {
    pub base: &'a str,
    pub omega1: &'a str,
    pub lambda1: f64,
    pub omega2: &'a str,
    pub lambda2: f64,
}

pub fn convolve_command(args: &ConvolveArgs, nominal: usize, grid: &GridSpec) -> AppResult<Report> {
    let orders = Orders::new(nominal, grid);
    let n = orders.working;
    let base = match FunctionSpec::parse(args.base)? {
        FunctionSpec::HalfLog => ConvolutionBase::HalfLog,
        FunctionSpec::Kernel(theta1, theta2) => ConvolutionBase::Kernel { theta1, theta2 },
        _ => return Err(SpecError("convolution base must be halflog or kernel:T1,T2".into()).into()),
    };
    let omega1 = DilatationSpec::parse(args.omega1)?.series(n);
    let omega2 = DilatationSpec::parse(args.omega2)?.series(n);
    let harness = gallery::harness_convolution(base, args.lambda1, args.lambda2, &omega1, &omega2, grid)?;
    let inputs = json!({
        "first": "halfplane",
        "base": args.base,
        "omega1": args.omega1,
        "lambda1": args.lambda1,
        "omega2": args.omega2,
        "lambda2": args.lambda2,
        "theorem": harness.theorem_id,
        "orders": grid_json(grid, orders),
    });
    Ok(Report::new("convolve", inputs, CheckResult::from_harness(&harness)))
}

pub fn check_command(phi: &str, direction: f64, nominal: usize, grid: &GridSpec) -> AppResult<Report> {
    let orders = Orders::new(nominal, grid);
    let series = FunctionSpec::parse(phi)?.series(orders.working)?;
    let cert = convex_in_direction(&series, direction, grid);
    let fallback = if cert.is_none() {
        let rotated = series.scale(Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2 - direction));
        rz_scan(&rotated, grid).best().2
    } else {
        0.0
    };
    let inputs = json!({
        "phi": phi,
        "direction": direction,
        "orders": grid_json(grid, orders),
    });
    let result = CheckResult::certificate("convexity certificate", cert, fallback);
    Ok(Report::new("check", inputs, vec![result]))
}
