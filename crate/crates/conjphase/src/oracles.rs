//! Slow, independent reference implementations for cross-validation.
//!
//! Everything here recomputes a production quantity by a different route —
//! exhaustive search, combinatorial definition, or numerical quadrature — so
//! test suites can confront the fast algorithms with an answer that shares
//! none of their code paths. Compiled only with the `test-oracles` feature.

use num_complex::Complex64;

use crate::graph::SimpleGraph;
use crate::measure::{is_noncollinear, MeasurementSet};
use crate::spaces::PwSignal;
use crate::stft::Window;
use crate::vector::ComplexVector;

/// `‖a − e^{iα}·b̃‖` where `b̃` is `b` or its conjugate.
fn rotation_gap(a: &ComplexVector, b: &ComplexVector, alpha: f64, conjugate: bool) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let ar = a.logical_range();
    let br = b.logical_range();
    let lo = ar.start.min(br.start);
    let hi = ar.end.max(br.end);
    let rot = Complex64::from_polar(1.0, alpha);
    let mut sum = 0.0;
    for n in lo..hi {
        let bn = if conjugate { b.get(n).conj() } else { b.get(n) };
        sum += (a.get(n) - rot * bn).norm_sqr();
    }
    sum.sqrt()
}

/// Class distance by exhaustive search: a coarse phase grid on both
/// pairings, refined by golden-section. Never consults inner products, so
/// it is independent of the closed-form distance.
pub fn brute_force_dist_conj(a: &ComplexVector, b: &ComplexVector) -> f64 {
    const GRID: usize = 256;
    const TAU: f64 = std::f64::consts::TAU;
    let golden: f64 = (5.0_f64.sqrt() - 1.0) / 2.0;

    let mut best = f64::INFINITY;
    for conjugate in [false, true] {
        let mut grid_best = (0.0, f64::INFINITY);
        for i in 0..GRID {
            let alpha = TAU * i as f64 / GRID as f64;
            let gap = rotation_gap(a, b, alpha, conjugate);
            if gap < grid_best.1 {
                grid_best = (alpha, gap);
            }
        }
        // The squared gap is a plain cosine in the phase, so it is unimodal
        // on the bracket around the grid minimum.
        let mut lo = grid_best.0 - TAU / GRID as f64;
        let mut hi = grid_best.0 + TAU / GRID as f64;
        let mut x1 = hi - golden * (hi - lo);
        let mut x2 = lo + golden * (hi - lo);
        let mut f1 = rotation_gap(a, b, x1, conjugate);
        let mut f2 = rotation_gap(a, b, x2, conjugate);
        for _ in 0..80 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - golden * (hi - lo);
                f1 = rotation_gap(a, b, x1, conjugate);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + golden * (hi - lo);
                f2 = rotation_gap(a, b, x2, conjugate);
            }
        }
        best = best.min(f1.min(f2)).min(grid_best.1);
    }
    best
}

/// All 3-cliques by testing every vertex triple.
pub fn brute_force_triangles(g: &SimpleGraph) -> Vec<[i64; 3]> {
    let vs: Vec<i64> = g.vertices().collect();
    let mut out = Vec::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            if !g.has_edge(vs[i], vs[j]) {
                continue;
            }
            for k in j + 1..vs.len() {
                if g.has_edge(vs[i], vs[k]) && g.has_edge(vs[j], vs[k]) {
                    out.push([vs[i], vs[j], vs[k]]);
                }
            }
        }
    }
    out
}

/// Number of triangle-graph links by testing every clique pair: two cliques
/// are linked when they share exactly two vertices and the shared edge is
/// certified non-collinear by the measurements.
pub fn brute_force_link_count(g: &SimpleGraph, m: &MeasurementSet, tol: f64) -> usize {
    let tris = brute_force_triangles(g);
    let mut links = 0;
    for i in 0..tris.len() {
        for j in i + 1..tris.len() {
            let shared: Vec<i64> =
                tris[i].iter().copied().filter(|v| tris[j].contains(v)).collect();
            if shared.len() != 2 {
                continue;
            }
            let (a, b) = (shared[0].min(shared[1]), shared[0].max(shared[1]));
            let (Some(ma), Some(mb), Some(mab)) = (m.vertex(a), m.vertex(b), m.edge(a, b)) else {
                continue;
            };
            if is_noncollinear(ma, mb, mab, tol) {
                links += 1;
            }
        }
    }
    links
}

/// Correlation of a band-limited signal against a shifted window by direct
/// numerical integration: the trapezoid rule at half the grid spacing is
/// alias-free for the band-limited product, and Richardson extrapolation
/// over half-widths `(T, 2T, 4T)` cancels the slowly decaying truncation
/// tail. Shares no code with the tap-convolution formula.
pub fn quadrature_correlation(f: &PwSignal, w: &Window, j: i64, half_width: f64) -> Complex64 {
    let spacing = f.grid_spacing();
    let h = spacing / 2.0;
    let x = j as f64 * spacing;
    let wpw = w.to_pw_signal(f.x0());

    let level = |half: f64| -> Complex64 {
        let n = (half / h).round() as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -n..=n {
            let t = f.x0() + k as f64 * h;
            acc += f.eval(t) * wpw.eval(t - x);
        }
        acc * h
    };

    let i1 = level(half_width);
    let i2 = level(2.0 * half_width);
    let i3 = level(4.0 * half_width);
    let r1 = 2.0 * i2 - i1;
    let r2 = 2.0 * i3 - i2;
    (4.0 * r2 - r1) / 3.0
}
