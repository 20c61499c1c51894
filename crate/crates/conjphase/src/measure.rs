//! Forward measurement map and the polarization identity.
//!
//! A measurement graph designates which magnitudes are observed: one
//! absolute magnitude `|f_n|` per vertex and one relative magnitude
//! `|f_n − f_m|` per edge. The polarization identity
//!
//! ```text
//! Re(f_n · conj(f_m)) = (|f_n|² + |f_m|² − |f_n − f_m|²) / 2
//! ```
//!
//! turns each edge into a *real* inner product between the two unknown
//! values — the linear handle every recovery routine in this crate pulls on.
//! What the real part cannot reveal is the sign of `Im(f_n · conj(f_m))`;
//! recovery therefore hinges on knowing when that imaginary part is nonzero
//! at all, which is decidable from the phaseless data alone: the pair is
//! non-collinear exactly when `|Re(f_n · conj(f_m))| < |f_n|·|f_m|` with a
//! strict gap.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::vector::ComplexVector;

/// Phaseless data on a measurement graph: absolute magnitudes per vertex,
/// relative magnitudes per edge. Edge keys are stored sorted, so the set is
/// insensitive to endpoint order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasurementSet {
    vertex_mags: BTreeMap<i64, f64>,
    edge_mags: BTreeMap<(i64, i64), f64>,
}

impl MeasurementSet {
    /// An empty measurement set.
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `|f_n|` for vertex `n`. Magnitudes must be finite and ≥ 0.
    pub fn insert_vertex(&mut self, n: i64, mag: f64) {
        assert!(mag.is_finite() && mag >= 0.0, "vertex magnitude must be finite and nonnegative");
        self.vertex_mags.insert(n, mag);
    }

    /// Records `|f_a − f_b|` for the edge `{a, b}` (order irrelevant).
    pub fn insert_edge(&mut self, a: i64, b: i64, mag: f64) {
        assert!(a != b, "self-loops carry no relative magnitude");
        assert!(mag.is_finite() && mag >= 0.0, "edge magnitude must be finite and nonnegative");
        self.edge_mags.insert(edge_key(a, b), mag);
    }

    /// Absolute magnitude at vertex `n`, if measured.
    pub fn vertex(&self, n: i64) -> Option<f64> {
        self.vertex_mags.get(&n).copied()
    }

    /// Relative magnitude on edge `{a, b}`, if measured.
    pub fn edge(&self, a: i64, b: i64) -> Option<f64> {
        self.edge_mags.get(&edge_key(a, b)).copied()
    }

    /// Number of measured vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertex_mags.len()
    }

    /// Number of measured edges.
    pub fn edge_count(&self) -> usize {
        self.edge_mags.len()
    }

    /// Iterates `(vertex, |f_vertex|)` in ascending vertex order.
    pub fn vertices(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.vertex_mags.iter().map(|(&n, &m)| (n, m))
    }

    /// Iterates `((a, b), |f_a − f_b|)` with `a < b`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = ((i64, i64), f64)> + '_ {
        self.edge_mags.iter().map(|(&e, &m)| (e, m))
    }

    /// The measurement graph this data lives on: its vertices are the
    /// measured vertices, its edges the measured pairs. Measuring a signal
    /// on a graph and asking for the induced graph gives the original back,
    /// so recovery needs only the measurement set.
    pub fn induced_graph(&self) -> SimpleGraph {
        let mut g = SimpleGraph::new();
        for (v, _) in self.vertices() {
            g.add_vertex(v);
        }
        for ((a, b), _) in self.edges() {
            g.add_edge(a, b);
        }
        g
    }
}

fn edge_key(a: i64, b: i64) -> (i64, i64) {
    if a <= b { (a, b) } else { (b, a) }
}

/// Applies the forward measurement map: `|f_n|` on every vertex of `g` and
/// `|f_n − f_m|` on every edge. Vertices outside the stored window of `f`
/// read as zero, matching the vector's indexing semantics.
pub fn measure(f: &ComplexVector, g: &SimpleGraph) -> MeasurementSet {
    let mut m = MeasurementSet::new();
    for v in g.vertices() {
        m.insert_vertex(v, f.get(v).norm());
    }
    for (a, b) in g.edges() {
        m.insert_edge(a, b, (f.get(a) - f.get(b)).norm());
    }
    m
}

/// Raw polarization identity `(mag_n² + mag_m² − mag_diff²) / 2`, with no
/// feasibility screening. Equals `Re(f_n · conj(f_m))` for genuine data.
pub fn polarization(mag_n: f64, mag_m: f64, mag_diff: f64) -> f64 {
    (mag_n * mag_n + mag_m * mag_m - mag_diff * mag_diff) / 2.0
}

/// How far the triple `(|f_n|, |f_m|, |f_n − f_m|)` strays from the triangle
/// inequality that any genuine pair satisfies. Zero for feasible data.
pub fn feasibility_violation(mag_n: f64, mag_m: f64, mag_diff: f64) -> f64 {
    let over = mag_diff - (mag_n + mag_m);
    let under = (mag_n - mag_m).abs() - mag_diff;
    over.max(under).max(0.0)
}

/// Recovers `Re(f_n · conj(f_m))` from a magnitude triple, rejecting triples
/// that no complex pair can produce (triangle inequality violated beyond
/// `tol` relative to the magnitude scale, with an absolute floor of `tol`).
pub fn rel_real_inner(mag_n: f64, mag_m: f64, mag_diff: f64, tol: f64) -> Result<f64> {
    for (name, v) in [("|f_n|", mag_n), ("|f_m|", mag_m), ("|f_n - f_m|", mag_diff)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::infeasible(format!("{name} = {v} is not a magnitude")));
        }
    }
    let violation = feasibility_violation(mag_n, mag_m, mag_diff);
    let scale = mag_n.max(mag_m).max(mag_diff).max(1.0);
    if violation > tol * scale {
        return Err(Error::infeasible(format!(
            "triple (|f_n|, |f_m|, |f_n - f_m|) = ({mag_n}, {mag_m}, {mag_diff}) \
             violates the triangle inequality by {violation:.3e}"
        )));
    }
    Ok(polarization(mag_n, mag_m, mag_diff))
}

/// Certified non-collinearity gap `|f_n|·|f_m| − |Re(f_n · conj(f_m))|`.
/// Strictly positive exactly when `Im(f_n · conj(f_m)) ≠ 0`; zero whenever
/// either value vanishes or the pair lies on one line through the origin.
pub fn noncollinearity_margin(mag_n: f64, mag_m: f64, mag_diff: f64) -> f64 {
    mag_n * mag_m - polarization(mag_n, mag_m, mag_diff).abs()
}

/// Decides non-collinearity from phaseless data alone, demanding a margin
/// above `tol` *relative to* `|f_n|·|f_m|`. Pairs touching zero are always
/// collinear.
pub fn is_noncollinear(mag_n: f64, mag_m: f64, mag_diff: f64, tol: f64) -> bool {
    noncollinearity_margin(mag_n, mag_m, mag_diff) > tol * mag_n * mag_m
}

/// `sqrt(mag² − re²)` for reconstructing an imaginary part from a modulus
/// and an already determined real part. Rounding may push the radicand
/// slightly negative; that is clamped to zero, while a violation beyond
/// `tol` relative to `mag²` means the inputs were inconsistent.
pub(crate) fn clamped_imag_sqrt(mag: f64, re: f64, tol: f64) -> Result<f64> {
    let radicand = mag * mag - re * re;
    if radicand >= 0.0 {
        return Ok(radicand.sqrt());
    }
    if radicand.abs() <= tol * (mag * mag).max(1.0) {
        return Ok(0.0);
    }
    Err(Error::infeasible(format!(
        "derived real part {re} exceeds the modulus {mag}"
    )))
}

// ── JSON wire format ────────────────────────────────────────────────────────
//
// {"vertices": {"0": 1.0, "1": 1.0}, "edges": [["0", "1", 1.414…]]}
//
// Vertex ids are decimal integer strings (JSON object keys must be strings);
// maps keep the output deterministically sorted.

#[derive(Serialize, Deserialize)]
struct MeasurementSetWire {
    vertices: BTreeMap<String, f64>,
    edges: Vec<(String, String, f64)>,
}

impl Serialize for MeasurementSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = MeasurementSetWire {
            vertices: self
                .vertex_mags
                .iter()
                .map(|(n, &m)| (n.to_string(), m))
                .collect(),
            edges: self
                .edge_mags
                .iter()
                .map(|(&(a, b), &m)| (a.to_string(), b.to_string(), m))
                .collect(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MeasurementSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = MeasurementSetWire::deserialize(deserializer)?;
        let parse_id = |s: &str| -> std::result::Result<i64, D::Error> {
            s.parse::<i64>()
                .map_err(|_| D::Error::custom(format!("vertex id {s:?} is not a decimal integer")))
        };
        let check_mag = |m: f64| -> std::result::Result<f64, D::Error> {
            if m.is_finite() && m >= 0.0 {
                Ok(m)
            } else {
                Err(D::Error::custom(format!("magnitude {m} is not finite and nonnegative")))
            }
        };
        let mut set = MeasurementSet::new();
        for (id, mag) in &wire.vertices {
            set.vertex_mags.insert(parse_id(id)?, check_mag(*mag)?);
        }
        for (a, b, mag) in &wire.edges {
            let (a, b) = (parse_id(a)?, parse_id(b)?);
            if a == b {
                return Err(D::Error::custom(format!("edge ({a}, {b}) is a self-loop")));
            }
            set.edge_mags.insert(edge_key(a, b), check_mag(*mag)?);
        }
        Ok(set)
    }
}
