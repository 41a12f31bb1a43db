//! Text and binary writers for curves, height fields and box counts.

use std::fmt::Write as _;

use fractalis::dimension::BoxCountSeries;
use fractalis::surface::HeightField;

/// `x,y` per line, no header.
pub fn curve_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::with_capacity(points.len() * 24);
    for (x, y) in points {
        writeln!(out, "{x},{y}").unwrap();
    }
    out
}

/// `delta,count` per line, no header.
pub fn box_count_csv(series: &BoxCountSeries) -> String {
    let mut out = String::new();
    for e in &series.entries {
        writeln!(out, "{},{}", e.delta, e.count).unwrap();
    }
    out
}

/// Maps a height affinely from `[min, max]` onto `0..=65535`. A flat field
/// maps to mid gray.
pub fn gray_level(h: f64, min: f64, max: f64) -> u16 {
    if max > min {
        ((h - min) / (max - min) * 65535.0)
            .round()
            .clamp(0.0, 65535.0) as u16
    } else {
        32768
    }
}

/// Binary 16-bit PGM, one row per grid line `y = j / m` from `j = 0`.
pub fn pgm(field: &HeightField) -> Vec<u8> {
    let side = field.resolution() + 1;
    let (min, max) = field.min_max();
    let header = format!("P5\n{side} {side}\n65535\n");
    let mut out = Vec::with_capacity(header.len() + 2 * side * side);
    out.extend_from_slice(header.as_bytes());
    for &h in field.heights() {
        out.extend_from_slice(&gray_level(h, min, max).to_be_bytes());
    }
    out
}

/// One vertex `v x F y` per grid node and two counter-clockwise triangles
/// per cell, seen from above the `x`-`y` plane.
pub fn obj(field: &HeightField) -> String {
    let m = field.resolution();
    let side = m + 1;
    let mut out = String::with_capacity(side * side * 40);
    for j in 0..side {
        for i in 0..side {
            let (x, y) = (i as f64 / m as f64, j as f64 / m as f64);
            writeln!(out, "v {x} {} {y}", field.get(i, j)).unwrap();
        }
    }
    let vertex = |i: usize, j: usize| j * side + i + 1;
    for j in 0..m {
        for i in 0..m {
            let (a, b, c, d) = (
                vertex(i, j),
                vertex(i + 1, j),
                vertex(i, j + 1),
                vertex(i + 1, j + 1),
            );
            // the height axis is the second coordinate, so x-y winding flips
            writeln!(out, "f {a} {c} {b}").unwrap();
            writeln!(out, "f {b} {c} {d}").unwrap();
        }
    }
    out
}
