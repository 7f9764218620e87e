//! Images of concentric circles and radial spokes under a harmonic map,
//! written as SVG paths or CSV point lists.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_range, Error, Result};
use crate::harmonic::HarmonicMap;
use crate::series::DEFAULT_R_MAX;

/// Collinearity tolerance of the segment predicates, relative to the
/// product of the two edge lengths involved.
const COLLINEAR_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<[f64; 2]>,
    /// The last point connects back to the first.
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolylineSet {
    pub curves: Vec<Curve>,
}

impl PolylineSet {
    pub fn new(curves: Vec<Curve>) -> Result<Self> {
        for c in &curves {
            check_range("curve length", c.points.len() as f64, c.points.len() >= 2, ">= 2")?;
            if c.points.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteCoefficients);
            }
        }
        Ok(Self { curves })
    }

    pub fn point_count(&self) -> usize {
        self.curves.iter().map(|c| c.points.len()).sum()
    }

    /// `[min_x, min_y, max_x, max_y]`, or `None` when empty.
    pub fn bounding_box(&self) -> Option<[f64; 4]> {
        let mut it = self.curves.iter().flat_map(|c| c.points.iter());
        let first = it.next()?;
        Some(it.fold([first[0], first[1], first[0], first[1]], |b, p| {
            [b[0].min(p[0]), b[1].min(p[1]), b[2].max(p[0]), b[3].max(p[1])]
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskImageSpec {
    pub circles: usize,
    pub spokes: usize,
    pub samples_per_curve: usize,
    pub r_max: f64,
}

impl Default for DiskImageSpec {
    fn default() -> Self {
        Self {
            circles: 12,
            spokes: 24,
            samples_per_curve: 512,
            r_max: 0.99,
        }
    }
}

fn sample(f: &HarmonicMap, zs: &[Complex64]) -> Result<Vec<[f64; 2]>> {
    zs.iter().map(|&z| f.eval(z).map(|w| [w.re, w.im])).collect()
}

/// Image of the circle `|z| = r` sampled at `samples` equally spaced angles.
pub fn circle_image(f: &HarmonicMap, r: f64, samples: usize) -> Result<Vec<[f64; 2]>> {
    let zs: Vec<_> = (0..samples)
        .map(|j| Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / samples as f64))
        .collect();
    sample(f, &zs)
}

/// Images of `circles` circles (radii `1 - (1 - r_max)^(k / circles)`) and
/// `spokes` radial segments from 0 to `r_max`, each with
/// `samples_per_curve` points.
pub fn disk_image(f: &HarmonicMap, spec: &DiskImageSpec) -> Result<PolylineSet> {
    check_range(
        "r_max",
        spec.r_max,
        spec.r_max > 0.0 && spec.r_max <= DEFAULT_R_MAX,
        "(0, 0.995]",
    )?;
    check_range(
        "samples_per_curve",
        spec.samples_per_curve as f64,
        spec.samples_per_curve >= 2,
        ">= 2",
    )?;
    let s = spec.samples_per_curve;
    let mut jobs: Vec<(String, Vec<Complex64>, bool)> = Vec::new();
    for k in 1..=spec.circles {
        let r = 1.0 - (1.0 - spec.r_max).powf(k as f64 / spec.circles as f64);
        let zs = (0..s)
            .map(|j| Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / s as f64))
            .collect();
        jobs.push((format!("circle-{k:02}"), zs, true));
    }
    for j in 0..spec.spokes {
        let dir = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / spec.spokes as f64);
        let zs = (0..s).map(|i| dir * (spec.r_max * i as f64 / (s - 1) as f64)).collect();
        jobs.push((format!("spoke-{j:02}"), zs, false));
    }
    let curves = jobs
        .into_par_iter()
        .map(|(label, zs, closed)| {
            Ok(Curve {
                label,
                points: sample(f, &zs)?,
                closed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PolylineSet::new(curves)
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn sign(o: f64, scale: f64) -> i8 {
    if o.abs() <= COLLINEAR_TOLERANCE * scale {
        0
    } else if o > 0.0 {
        1
    } else {
        -1
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (lab, lcd) = (dist(a, b), dist(c, d));
    let o1 = sign(orient(a, b, c), lab * dist(a, c));
    let o2 = sign(orient(a, b, d), lab * dist(a, d));
    let o3 = sign(orient(c, d, a), lcd * dist(c, a));
    let o4 = sign(orient(c, d, b), lcd * dist(c, b));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(a, b, c))
        || (o2 == 0 && on_segment(a, b, d))
        || (o3 == 0 && on_segment(c, d, a))
        || (o4 == 0 && on_segment(c, d, b))
}

/// True iff no two non-adjacent edges of the closed polyline intersect.
/// Quadratic in the number of points.
pub fn simple_curve_check(curve: &[[f64; 2]]) -> Result<bool> {
    let n = curve.len();
    if n < 16 {
        return Err(Error::TooFewPoints(n));
    }
    let edge = |i: usize| (curve[i], curve[(i + 1) % n]);
    let boxes: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let (a, b) = edge(i);
            [a[0].min(b[0]), a[1].min(b[1]), a[0].max(b[0]), a[1].max(b[1])]
        })
        .collect();
    let crossed = (0..n).into_par_iter().any(|i| {
        let (a, b) = edge(i);
        ((i + 2)..n).filter(|&j| !(i == 0 && j == n - 1)).any(|j| {
            let (bi, bj) = (boxes[i], boxes[j]);
            if bi[2] < bj[0] || bj[2] < bi[0] || bi[3] < bj[1] || bj[3] < bi[1] {
                return false;
            }
            let (c, d) = edge(j);
            segments_intersect(a, b, c, d)
        })
    });
    Ok(!crossed)
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let fail = |source| Error::WriteFailed {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// SVG 1.1 document with one path per curve. The y axis is flipped so the
/// picture has the usual mathematical orientation.
pub fn svg_string(p: &PolylineSet) -> String {
    let [x0, y0, w, h] = match p.bounding_box() {
        Some([ax, ay, bx, by]) => {
            let (w, h) = ((bx - ax).max(1e-12), (by - ay).max(1e-12));
            let (mx, my) = (0.05 * w, 0.05 * h);
            [ax - mx, -by - my, w + 2.0 * mx, h + 2.0 * my]
        }
        None => [-1.0, -1.0, 2.0, 2.0],
    };
    let stroke = 0.002 * w.max(h);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{x0:.6} {y0:.6} {w:.6} {h:.6}\">"
    );
    let _ = writeln!(out, "<g fill=\"none\" stroke=\"black\" stroke-width=\"{stroke:.6}\">");
    for c in &p.curves {
        let _ = write!(out, "<path id=\"{}\" d=\"", c.label);
        for (k, pt) in c.points.iter().enumerate() {
            let cmd = if k == 0 { 'M' } else { 'L' };
            let _ = write!(out, "{cmd}{:.6} {:.6} ", pt[0], -pt[1]);
        }
        if c.closed {
            out.push('Z');
        }
        out.push_str("\"/>\n");
    }
    out.push_str("</g>\n</svg>\n");
    out
}

pub fn emit_svg(p: &PolylineSet, path: &Path) -> Result<()> {
    write_atomically(path, svg_string(p).as_bytes())
}

/// One row per point, `label,k,x,y`, with 17 significant digits.
pub fn csv_bytes(p: &PolylineSet) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "k", "x", "y"]).expect("in-memory write");
    for c in &p.curves {
        for (k, pt) in c.points.iter().enumerate() {
            w.write_record([
                c.label.clone(),
                k.to_string(),
                format!("{:.16e}", pt[0]),
                format!("{:.16e}", pt[1]),
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

pub fn emit_csv(p: &PolylineSet, path: &Path) -> Result<()> {
    write_atomically(path, &csv_bytes(p))
}

#[derive(Debug, Clone, PartialEq, serde::Deserialize)]
pub struct CsvRow {
    pub label: String,
    pub k: usize,
    pub x: f64,
    pub y: f64,
}

/// Parses a file written by [`emit_csv`].
pub fn read_csv(path: &Path) -> std::result::Result<Vec<CsvRow>, csv::Error> {
    csv::Reader::from_path(path)?.deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Series;

    fn circle(n: usize) -> Vec<[f64; 2]> {
        (0..n)
            .map(|j| {
                let t = std::f64::consts::TAU * j as f64 / n as f64;
                [t.cos(), t.sin()]
            })
            .collect()
    }

    fn identity_map() -> HarmonicMap {
        HarmonicMap::new("id", Series::variable(4), Series::zero(4)).unwrap()
    }

    #[test]
    fn identity_gives_circles_and_straight_spokes() {
        let spec = DiskImageSpec {
            circles: 3,
            spokes: 4,
            samples_per_curve: 64,
            r_max: 0.9,
        };
        let p = disk_image(&identity_map(), &spec).unwrap();
        assert_eq!(p.point_count(), (3 + 4) * 64);
        for c in &p.curves {
            if c.closed {
                let r0 = c.points[0][0].hypot(c.points[0][1]);
                assert!(c.points.iter().all(|q| (q[0].hypot(q[1]) - r0).abs() < 1e-14));
            } else {
                let d = c.points[c.points.len() - 1];
                assert!(c.points.iter().all(|q| orient([0.0, 0.0], d, *q).abs() < 1e-14));
            }
        }
        let outer = p.curves.iter().rfind(|c| c.closed).unwrap();
        assert!((outer.points[0][0] - 0.9).abs() < 1e-14);
    }

    #[test]
    fn single_circle_is_the_near_boundary_curve() {
        let spec = DiskImageSpec {
            circles: 1,
            spokes: 0,
            samples_per_curve: 32,
            r_max: 0.99,
        };
        let p = disk_image(&identity_map(), &spec).unwrap();
        assert_eq!(p.curves.len(), 1);
        assert!((p.curves[0].points[0][0] - 0.99).abs() < 1e-14);
        assert!(disk_image(&identity_map(), &DiskImageSpec { r_max: 0.999, ..spec }).is_err());
    }

    #[test]
    fn simple_curve_examples() {
        assert!(simple_curve_check(&circle(64)).unwrap());

        let eight: Vec<[f64; 2]> = (0..128)
            .map(|j| {
                let t = std::f64::consts::TAU * (j as f64 + 0.5) / 128.0;
                [t.sin(), t.sin() * t.cos()]
            })
            .collect();
        assert!(!simple_curve_check(&eight).unwrap());

        assert!(matches!(simple_curve_check(&circle(8)), Err(Error::TooFewPoints(8))));
    }

    #[test]
    fn touching_vertex_counts_as_intersection() {
        // a curve that revisits a vertex
        let mut pts = circle(32);
        pts[20] = pts[4];
        assert!(!simple_curve_check(&pts).unwrap());
    }

    #[test]
    fn svg_is_deterministic_and_handles_empty() {
        let empty = svg_string(&PolylineSet::default());
        assert!(empty.contains("<svg") && !empty.contains("<path"));

        let p = disk_image(
            &identity_map(),
            &DiskImageSpec {
                samples_per_curve: 16,
                ..Default::default()
            },
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        emit_svg(&p, &a).unwrap();
        emit_svg(&p, &b).unwrap();
        let (sa, sb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(sa, sb);
        let text = String::from_utf8(sa).unwrap();
        assert_eq!(text.matches("<path").count(), p.curves.len());
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let p = PolylineSet::new(vec![Curve {
            label: "seg".into(),
            points: vec![[0.1, -0.2], [1.0 / 3.0, std::f64::consts::PI]],
            closed: false,
        }])
        .unwrap();
        let bytes = csv_bytes(&p);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next().unwrap(), "label,k,x,y");
        assert_eq!(bytes, csv_bytes(&p));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        emit_csv(&p, &path).unwrap();
        let rows = read_csv(&path).unwrap();
        for (row, pt) in rows.iter().zip(&p.curves[0].points) {
            assert!((row.x - pt[0]).abs() <= 1e-12 && (row.y - pt[1]).abs() <= 1e-12);
        }
    }

    #[test]
    fn write_failure_is_reported() {
        let p = PolylineSet::default();
        let err = emit_svg(&p, Path::new("/nonexistent-dir/x.svg")).unwrap_err();
        assert!(matches!(err, Error::WriteFailed { .. }));
    }

    #[test]
    fn polyline_set_rejects_bad_curves() {
        let short = Curve {
            label: "x".into(),
            points: vec![[0.0, 0.0]],
            closed: false,
        };
        assert!(PolylineSet::new(vec![short]).is_err());
        let nan = Curve {
            label: "x".into(),
            points: vec![[0.0, f64::NAN], [1.0, 1.0]],
            closed: false,
        };
        assert!(PolylineSet::new(vec![nan]).is_err());
    }
}
