//! Region geometry for the large-z bounds: vertices, boundary polylines and
//! point classifications, in the z-plane and its image w = √(2z).

use std::f64::consts::PI;

use pcf_core::poincare::{classify_region, region_membership};
use rug::{Complex, Float};
use serde_json::Value;

use crate::output::{num, text, Table};

const SEGMENT_SAMPLES: usize = 64;

pub const COLUMNS: &[&str] =
    &["kind", "name", "z_re", "z_im", "w_re", "w_im", "region", "region_strict", "in_r1", "in_r2", "in_r4"];

/// Principal √(2z), so Re w ≥ 0.
pub fn w_image(x: f64, y: f64) -> (f64, f64) {
    let (x2, y2) = (2.0 * x, 2.0 * y);
    let r = x2.hypot(y2);
    let re = ((r + x2) / 2.0).max(0.0).sqrt();
    let im = ((r - x2) / 2.0).max(0.0).sqrt();
    (re, if y2 < 0.0 { -im } else { im })
}

/// Named vertices for κ = |a|; V is where the line Im z = κ leaves the window.
pub fn vertices(kappa: f64, extent: f64) -> Vec<(&'static str, f64, f64)> {
    vec![
        ("P", -2.0 * kappa, 0.0),
        ("Q", -(3f64.sqrt()) * kappa, kappa),
        ("S", 0.0, kappa),
        ("T", kappa, 0.0),
        ("V", -extent, kappa),
    ]
}

fn line(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<(f64, f64)> {
    (0..=SEGMENT_SAMPLES)
        .map(|k| {
            let s = k as f64 / SEGMENT_SAMPLES as f64;
            (x0 + s * (x1 - x0), y0 + s * (y1 - y0))
        })
        .collect()
}

fn arc(radius: f64, from: f64, to: f64) -> Vec<(f64, f64)> {
    (0..=SEGMENT_SAMPLES)
        .map(|k| {
            let th = from + (to - from) * k as f64 / SEGMENT_SAMPLES as f64;
            (radius * th.cos(), radius * th.sin())
        })
        .collect()
}

/// Upper-half-plane boundaries; the lower half is the mirror image.
pub fn boundaries(kappa: f64, extent: f64) -> Vec<(&'static str, Vec<(f64, f64)>)> {
    let k = kappa;
    let r3 = 3f64.sqrt();
    vec![
        ("R1_line", line(k, 0.0, k, extent)),
        ("VQ", line(-extent, k, -r3 * k, k)),
        ("QS", line(-r3 * k, k, 0.0, k)),
        ("ST", arc(k, PI / 2.0, 0.0)),
        ("PQ", arc(2.0 * k, PI, 5.0 * PI / 6.0)),
        ("R4_arc_right", arc(2.0 * k, 0.0, PI / 6.0)),
        ("R4_strip_right", line(r3 * k, k, extent.max(r3 * k), k)),
    ]
}

fn row(kind: &str, name: &str, a: &Float, x: f64, y: f64) -> Vec<Value> {
    let z = Complex::with_val(64, (x, y));
    let (wr, wi) = w_image(x, y);
    let [r1, r2, r4] = region_membership(a, &z);
    let (label, strict) = if x == 0.0 && y == 0.0 {
        ("origin".to_string(), "origin".to_string())
    } else {
        (classify_region(a, &z, false).to_string(), classify_region(a, &z, true).to_string())
    };
    vec![
        text(kind),
        text(name),
        num(x),
        num(y),
        num(wr),
        num(wi),
        text(label),
        text(strict),
        Value::Bool(r1),
        Value::Bool(r2),
        Value::Bool(r4),
    ]
}

pub struct RegionSpec {
    pub a: f64,
    pub extent: f64,
    pub step: Option<f64>,
    pub points: Vec<(f64, f64)>,
}

pub fn regions_table(spec: &RegionSpec) -> Table {
    let a = Float::with_val(64, spec.a);
    let kappa = spec.a.abs();
    let mut t = Table::new(COLUMNS);
    for (name, x, y) in vertices(kappa, spec.extent) {
        t.push(row("vertex", name, &a, x, y));
    }
    for (name, pts) in boundaries(kappa, spec.extent) {
        for (x, y) in pts {
            t.push(row("boundary", name, &a, x, y));
        }
    }
    if let Some(h) = spec.step {
        let m = (spec.extent / h).round() as i64;
        for j in 0..=m {
            for i in -m..=m {
                t.push(row("grid", "", &a, i as f64 * h, j as f64 * h));
            }
        }
    }
    for (k, &(x, y)) in spec.points.iter().enumerate() {
        t.push(row("point", &format!("p{k}"), &a, x, y));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_image_squares_back() {
        for &(x, y) in &[(3.0, 0.0), (-1.0, 0.5), (-2.0, 0.0), (0.3, -4.0)] {
            let (u, v) = w_image(x, y);
            assert!((u * u - v * v - 2.0 * x).abs() < 1e-12);
            assert!((2.0 * u * v - 2.0 * y).abs() < 1e-12);
            assert!(u >= 0.0);
        }
    }

    #[test]
    fn arcs_meet_at_vertices() {
        let b = boundaries(1.0, 5.0);
        let pq = &b.iter().find(|(n, _)| *n == "PQ").unwrap().1;
        let (qx, qy) = *pq.last().unwrap();
        assert!((qx + 3f64.sqrt()).abs() < 1e-12 && (qy - 1.0).abs() < 1e-12);
        let st = &b.iter().find(|(n, _)| *n == "ST").unwrap().1;
        assert!(st[0].0.abs() < 1e-12 && (st[0].1 - 1.0).abs() < 1e-12);
    }
}
