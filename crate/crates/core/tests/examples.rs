use std::time::Instant;

use shearmap::convexity::{convex_in_direction, find_rz_certificate};
use shearmap::functions::{corollary_c1_phi, corollary_c2_phi, C1_ANGLES};
use shearmap::gallery::{closed_form_error, example, example_harness, sample_points};
use shearmap::harmonic::sense_preserving_margin;
use shearmap::{Complex64, GridSpec, Series};

#[test]
fn examples_pass_their_harness_on_default_grid() {
    let grid = GridSpec::default();
    for n in 1..=3 {
        let start = Instant::now();
        let report = example_harness(n, &grid).unwrap();
        println!("example {n}: {} in {:?}", report.passed, start.elapsed());
        assert!(report.passed, "{report:#?}");
        assert!(report.conclusion_certificate.unwrap().min_value >= -1e-9);
    }
}

#[test]
fn example_maps_are_sense_preserving() {
    let grid = GridSpec::default();
    for n in 1..=3 {
        for f in example(n, grid.working_order()).unwrap() {
            assert!(sense_preserving_margin(&f, &grid) > 0.0, "{}", f.label());
        }
    }
}

#[test]
fn closed_forms_match_near_the_boundary() {
    let pts = sample_points(200, 0.98);
    for n in 1..=3 {
        for f in example(n, 4096).unwrap() {
            let (h, g) = (f.h_closed_form().unwrap(), f.g_closed_form().unwrap());
            assert!(closed_form_error(f.h(), h, &pts).unwrap() < 1e-9, "{}", f.label());
            assert!(closed_form_error(f.g(), g, &pts).unwrap() < 1e-9, "{}", f.label());
        }
    }
}

#[test]
fn c1_c2_families_are_certified() {
    let grid = GridSpec::default();
    let n = grid.working_order();
    for &(gamma, alpha, theta) in &[
        (0.0, 0.0, 1.0),
        (0.5, -1.0, C1_ANGLES.0),
        (1.0, 1.0, 2.5),
        (0.3, 0.4, 0.2),
    ] {
        let phi = corollary_c1_phi(gamma, alpha, theta, n).unwrap();
        assert!(convex_in_direction(&phi, std::f64::consts::FRAC_PI_2, &grid).is_some());
    }
    for &(gamma, beta) in &[(0.0, 0.0), (0.5, -2.0), (1.0, 2.0), (0.7, 1.3)] {
        let phi = corollary_c2_phi(gamma, beta, n).unwrap();
        assert!(convex_in_direction(&phi, 0.0, &grid).is_some());
    }
}

#[test]
fn koebe_has_no_certificate() {
    let grid = GridSpec::default();
    let koebe = Series::from_fn(grid.working_order(), |k| Complex64::new(k as f64, 0.0));
    assert!(find_rz_certificate(&koebe, &grid).is_none());
}
