//! Measurement graphs, their 3-cliques, and phase propagation.
//!
//! A graph signal is recoverable from vertex and edge magnitudes when two
//! structural conditions hold: every vertex lies in at least one triangle,
//! and the derived *triangle graph* is connected. The triangle graph has one
//! node per 3-clique of the measurement graph and links two cliques whenever
//! they share an edge whose endpoint values are non-collinear — the only
//! situation in which phase information crosses from one clique to the next.
//!
//! Recovery then walks the triangle graph breadth-first: a seed edge fixes
//! the global phase and conjugation freedom, and each newly reached clique
//! assigns its third vertex a phase increment from the polarization
//! identity, with the clique's second edge deciding the sign. A final
//! Gauss–Newton pass over all vertex and edge magnitudes at once ties the
//! accuracy to the conditioning of the whole system rather than to the
//! weakest link of the walk.
//!
//! Two standard families are built in: circulant graphs (vertices `0..n`,
//! edges to `±q mod n` for each offset `q`) and two-reference graphs
//! (vertices `1..=n`, every vertex tied to two fixed references).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measure::{
    clamped_imag_sqrt, is_noncollinear, noncollinearity_margin, rel_real_inner, MeasurementSet,
};
use crate::recover::{polish, MagnitudeSystem, RecoveryReport};
use crate::vector::{ComplexVector, EquivalenceBranch};

/// Undirected simple graph on integer vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimpleGraph {
    adjacency: BTreeMap<i64, BTreeSet<i64>>,
}

impl SimpleGraph {
    /// An empty graph.
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a vertex (no-op if present).
    pub fn add_vertex(&mut self, v: i64) {
        self.adjacency.entry(v).or_default();
    }

    /// Adds the undirected edge `{a, b}`, inserting endpoints as needed.
    /// Returns false if the edge was already present. Self-loops are not
    /// representable and panic.
    pub fn add_edge(&mut self, a: i64, b: i64) -> bool {
        assert!(a != b, "simple graphs have no self-loops");
        let fresh = self.adjacency.entry(a).or_default().insert(b);
        self.adjacency.entry(b).or_default().insert(a);
        fresh
    }

    /// True if `v` is a vertex.
    pub fn has_vertex(&self, v: i64) -> bool {
        self.adjacency.contains_key(&v)
    }

    /// True if `{a, b}` is an edge.
    pub fn has_edge(&self, a: i64, b: i64) -> bool {
        self.adjacency.get(&a).is_some_and(|ns| ns.contains(&b))
    }

    /// Vertices in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = i64> + '_ {
        self.adjacency.keys().copied()
    }

    /// Neighbors of `v` in ascending order (empty if `v` is absent).
    pub fn neighbors(&self, v: i64) -> impl Iterator<Item = i64> + '_ {
        self.adjacency.get(&v).into_iter().flatten().copied()
    }

    /// Edges as sorted pairs `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&a, ns)| ns.iter().copied().filter(move |&b| a < b).map(move |b| (a, b)))
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(|ns| ns.len()).sum::<usize>() / 2
    }
}

/// Circulant graph: vertices `0..n`, an edge from each `v` to `v ± q mod n`
/// for every offset `q`. Offsets collapsing to self-loops are skipped and
/// wraparound duplicates are deduplicated, so small `n` stays well formed.
pub fn circulant_graph(n: u32, offsets: &[u32]) -> SimpleGraph {
    let mut g = SimpleGraph::new();
    for v in 0..n as i64 {
        g.add_vertex(v);
    }
    if n == 0 {
        return g;
    }
    for v in 0..n as i64 {
        for &q in offsets {
            let q = (q % n) as i64;
            if q == 0 {
                continue;
            }
            g.add_edge(v, (v + q).rem_euclid(n as i64));
            g.add_edge(v, (v - q).rem_euclid(n as i64));
        }
    }
    g
}

/// Two-reference graph: vertices `1..=n`, every vertex joined to both
/// reference vertices `k` and `l` (so the references are joined to each
/// other as well). The references must be distinct and in range.
pub fn two_reference_graph(n: u32, k: i64, l: i64) -> Result<SimpleGraph> {
    if k == l {
        return Err(Error::invalid(format!("reference vertices must differ (both are {k})")));
    }
    for r in [k, l] {
        if r < 1 || r > n as i64 {
            return Err(Error::invalid(format!(
                "reference vertex {r} outside the vertex range 1..={n}"
            )));
        }
    }
    let mut g = SimpleGraph::new();
    for v in 1..=n as i64 {
        g.add_vertex(v);
        if v != k {
            g.add_edge(v, k);
        }
        if v != l {
            g.add_edge(v, l);
        }
    }
    Ok(g)
}

/// A 3-clique of the measurement graph, vertices sorted ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TriangleNode {
    /// The clique's vertices, strictly increasing.
    pub vertices: [i64; 3],
}

impl TriangleNode {
    /// True if `v` is one of the clique's vertices.
    pub fn contains(&self, v: i64) -> bool {
        self.vertices.contains(&v)
    }

    /// The clique's three edges as sorted pairs.
    pub fn edges(&self) -> [(i64, i64); 3] {
        let [a, b, c] = self.vertices;
        [(a, b), (a, c), (b, c)]
    }
}

/// Enumerates all 3-cliques, each exactly once, in lexicographic order.
pub fn enumerate_triangles(g: &SimpleGraph) -> Vec<TriangleNode> {
    let mut out = Vec::new();
    for (a, b) in g.edges() {
        // Common neighbors above b close each triangle exactly once.
        for c in g.neighbors(a).filter(|&c| c > b) {
            if g.has_edge(b, c) {
                out.push(TriangleNode { vertices: [a, b, c] });
            }
        }
    }
    out.sort();
    out
}

/// A link of the triangle graph: two cliques (by node index, `a < b`)
/// sharing exactly the annotated non-collinear edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TriangleLink {
    /// Lower node index.
    pub a: usize,
    /// Higher node index.
    pub b: usize,
    /// The shared measurement-graph edge, endpoints sorted.
    pub shared_edge: (i64, i64),
}

/// The derived triangle graph: one node per 3-clique, links between cliques
/// sharing a non-collinear edge. Connectivity of this graph (plus triangle
/// coverage of every vertex) certifies recoverability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleGraph {
    /// Clique nodes in lexicographic order.
    pub nodes: Vec<TriangleNode>,
    /// Links sorted by `(a, b)`.
    pub links: Vec<TriangleLink>,
}

impl TriangleGraph {
    /// Neighbor lists by node index; each entry carries the shared edge.
    pub fn adjacency(&self) -> Vec<Vec<(usize, (i64, i64))>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for link in &self.links {
            adj[link.a].push((link.b, link.shared_edge));
            adj[link.b].push((link.a, link.shared_edge));
        }
        adj
    }
}

fn measured_vertex(m: &MeasurementSet, v: i64) -> Result<f64> {
    m.vertex(v)
        .ok_or_else(|| Error::invalid(format!("measurement set misses vertex {v}")))
}

fn measured_edge(m: &MeasurementSet, a: i64, b: i64) -> Result<f64> {
    m.edge(a, b)
        .ok_or_else(|| Error::invalid(format!("measurement set misses edge ({a}, {b})")))
}

/// Builds the triangle graph of `g` under the measurements `m`: nodes are
/// the 3-cliques, links join cliques sharing an edge certified non-collinear
/// by the phaseless data. `m` must cover every vertex and edge of `g`.
pub fn build_triangle_graph(
    g: &SimpleGraph,
    m: &MeasurementSet,
    tol: f64,
) -> Result<TriangleGraph> {
    for v in g.vertices() {
        measured_vertex(m, v)?;
    }
    // Coverage and feasibility in one pass: every edge must be measured,
    // and by magnitudes some complex pair actually realizes — an
    // unrealizable triple is infeasible data, not a missing link.
    for (a, b) in g.edges() {
        rel_real_inner(measured_vertex(m, a)?, measured_vertex(m, b)?, measured_edge(m, a, b)?, tol)?;
    }

    let nodes = enumerate_triangles(g);
    // Which cliques contain each edge. Two distinct triangles can share at
    // most one edge (two shared edges would force all three vertices equal),
    // so linking all pairs per shared edge never double-links a pair.
    let mut by_edge: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (idx, node) in nodes.iter().enumerate() {
        for e in node.edges() {
            by_edge.entry(e).or_default().push(idx);
        }
    }

    let mut links = Vec::new();
    for (&(a, b), members) in &by_edge {
        if members.len() < 2 {
            continue;
        }
        let noncollinear = is_noncollinear(
            measured_vertex(m, a)?,
            measured_vertex(m, b)?,
            measured_edge(m, a, b)?,
            tol,
        );
        if !noncollinear {
            continue;
        }
        for (i, &na) in members.iter().enumerate() {
            for &nb in &members[i + 1..] {
                links.push(TriangleLink { a: na.min(nb), b: na.max(nb), shared_edge: (a, b) });
            }
        }
    }
    links.sort_by_key(|l| (l.a, l.b));
    Ok(TriangleGraph { nodes, links })
}

/// Outcome of the recoverability hypothesis check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnosis {
    /// Every vertex lies in a triangle and the triangle graph is connected.
    Ok,
    /// These vertices lie in no 3-clique; their phases are unreachable.
    UncoveredVertices(Vec<i64>),
    /// The triangle graph splits into these connected components (node
    /// index lists), so phase cannot cross between them.
    Disconnected { components: Vec<Vec<usize>> },
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnosis::Ok => write!(f, "ok"),
            Diagnosis::UncoveredVertices(vs) => {
                write!(f, "vertices in no triangle: {vs:?}")
            }
            Diagnosis::Disconnected { components } => {
                write!(f, "triangle graph has {} components: {components:?}", components.len())
            }
        }
    }
}

/// Checks the recovery hypothesis for `g` with triangle graph `gf`:
/// triangle coverage of every vertex first, then connectivity.
pub fn check_hypothesis(g: &SimpleGraph, gf: &TriangleGraph) -> Diagnosis {
    let mut covered: BTreeSet<i64> = BTreeSet::new();
    for node in &gf.nodes {
            covered.extend(node.vertices);
    }
    let uncovered: Vec<i64> = g.vertices().filter(|v| !covered.contains(v)).collect();
    if !uncovered.is_empty() {
        return Diagnosis::UncoveredVertices(uncovered);
    }
    if gf.nodes.len() <= 1 {
        return Diagnosis::Ok;
    }

    let adj = gf.adjacency();
    let mut component = vec![usize::MAX; gf.nodes.len()];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..gf.nodes.len() {
        if component[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut queue = VecDeque::from([start]);
        component[start] = id;
        let mut members = vec![start];
        while let Some(t) = queue.pop_front() {
            for &(u, _) in &adj[t] {
                if component[u] == usize::MAX {
                    component[u] = id;
                    members.push(u);
                    queue.push_back(u);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    if components.len() == 1 {
        Diagnosis::Ok
    } else {
        Diagnosis::Disconnected { components }
    }
}

/// Recovers a graph signal from its measurement set by breadth-first phase
/// propagation over the triangle graph.
///
/// The seed edge — the non-collinear edge of maximal certified margin among
/// the links (first in link order on ties) — is given the canonical phase:
/// its lower vertex becomes real positive and its upper vertex gets a
/// nonnegative imaginary part. Every further vertex takes its phase from an
/// already recovered non-collinear edge, so the output is determined and
/// equals the true signal up to a unimodular factor and conjugation.
///
/// The returned vector spans `[min vertex, max vertex]`; ids absent from the
/// graph (if any) stay zero and are flagged in the report notes.
pub fn propagate_recover(
    g: &SimpleGraph,
    m: &MeasurementSet,
    tol: f64,
) -> Result<(ComplexVector, RecoveryReport)> {
    let gf = build_triangle_graph(g, m, tol)?;
    let diagnosis = check_hypothesis(g, &gf);
    if diagnosis != Diagnosis::Ok {
        return Err(Error::HypothesisFailed(diagnosis));
    }

    let mut report = RecoveryReport::new();
    if g.vertex_count() == 0 {
        report.notes.push("empty graph: nothing to recover".into());
        report.seed = None;
        return Ok((ComplexVector::empty(), report));
    }

    // Seed: maximal-margin non-collinear edge among the links; with a single
    // clique and no links, fall back to the clique's own edges.
    let margin_of = |(a, b): (i64, i64)| -> Result<f64> {
        Ok(noncollinearity_margin(
            measured_vertex(m, a)?,
            measured_vertex(m, b)?,
            measured_edge(m, a, b)?,
        ))
    };
    let mut seed_edge: Option<(i64, i64)> = None;
    let mut seed_nodes: Vec<usize> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    if gf.links.is_empty() {
        debug_assert_eq!(gf.nodes.len(), 1, "connected with ≥2 nodes implies links");
        let node = gf.nodes[0];
        for (a, b) in node.edges() {
            let va = measured_vertex(m, a)?;
            let vb = measured_vertex(m, b)?;
            let e = measured_edge(m, a, b)?;
            if is_noncollinear(va, vb, e, tol) {
                let margin = noncollinearity_margin(va, vb, e);
                if margin > best {
                    best = margin;
                    seed_edge = Some((a, b));
                    seed_nodes = vec![0];
                }
            }
        }
    } else {
        for link in &gf.links {
            let margin = margin_of(link.shared_edge)?;
            if margin > best {
                best = margin;
                seed_edge = Some(link.shared_edge);
                seed_nodes = vec![link.a, link.b];
            }
        }
    }
    let Some((sa, sb)) = seed_edge else {
        return Err(Error::NoNoncollinearEdge);
    };

    // Canonical seed values from the polarization identity.
    let mag_a = measured_vertex(m, sa)?;
    let mag_b = measured_vertex(m, sb)?;
    let rho = rel_real_inner(mag_a, mag_b, measured_edge(m, sa, sb)?, tol)?;
    let re_b = rho / mag_a;
    let im_b = clamped_imag_sqrt(mag_b, re_b, tol)?;
    let mut recovered: BTreeMap<i64, Complex64> = BTreeMap::new();
    recovered.insert(sa, Complex64::new(mag_a, 0.0));
    recovered.insert(sb, Complex64::new(re_b, im_b));

    // BFS over the triangle graph. Each node is visited holding a recovered
    // non-collinear "discovery edge" (the seed edge, or the link edge it was
    // reached through), which anchors the phase of its third vertex.
    let adj = gf.adjacency();
    let mut visited = vec![false; gf.nodes.len()];
    let mut queue: VecDeque<(usize, (i64, i64))> = VecDeque::new();
    for &s in &seed_nodes {
        visited[s] = true;
        queue.push_back((s, (sa, sb)));
    }
    let mut bfs_order = Vec::new();
    let mut min_det = f64::INFINITY;
    let mut max_revisit = 0.0_f64;

    while let Some((t, (ea, eb))) = queue.pop_front() {
        bfs_order.push(t);
        let node = gf.nodes[t];
        let ga = recovered[&ea];
        let gb = recovered[&eb];
        let mag_a = measured_vertex(m, ea)?;
        let mag_b = measured_vertex(m, eb)?;
        let det = ga.re * gb.im - ga.im * gb.re;
        let scale = ga.norm() * gb.norm();
        for w in node.vertices {
            if w == ea || w == eb {
                continue;
            }
            let mag_w = measured_vertex(m, w)?;
            let rho_aw = rel_real_inner(mag_a, mag_w, measured_edge(m, ea, w)?, tol)?;
            let rho_bw = rel_real_inner(mag_b, mag_w, measured_edge(m, eb, w)?, tol)?;
            if det.abs() <= tol * scale {
                return Err(Error::NumericallySingular { index: w, determinant: det.abs() });
            }
            min_det = min_det.min(det.abs());
            // The edge to `a` fixes the angle of `w` up to sign, and the
            // edge to `b` decides the sign: the candidate cosines differ by
            // 2·sin∠(a,w)·sin∠(a,b), which the discovery edge's
            // non-collinearity keeps above the data accuracy. Assigning the
            // phase by increment keeps rounding additive over the walk; a
            // value solve would multiply it through each weak link.
            let value = if mag_w == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                let angle = (rho_aw / (mag_a * mag_w)).clamp(-1.0, 1.0).acos();
                let c_bw = (rho_bw / (mag_b * mag_w)).clamp(-1.0, 1.0);
                let (plus, minus) = (ga.arg() + angle, ga.arg() - angle);
                let pick = |phi: f64| ((phi - gb.arg()).cos() - c_bw).abs();
                Complex64::from_polar(mag_w, if pick(plus) <= pick(minus) { plus } else { minus })
            };
            match recovered.get(&w) {
                Some(&existing) => {
                    max_revisit = max_revisit.max((existing - value).norm());
                }
                None => {
                    recovered.insert(w, value);
                }
            }
        }
        for &(u, edge) in &adj[t] {
            if !visited[u] {
                visited[u] = true;
                queue.push_back((u, edge));
            }
        }
    }

    // Connectivity plus coverage guarantee every vertex was reached.
    debug_assert!(g.vertices().all(|v| recovered.contains_key(&v)));

    let lo = *recovered.keys().next().expect("nonempty");
    let hi = *recovered.keys().next_back().expect("nonempty");
    let mut values = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for (&v, &z) in &recovered {
        values[(v - lo) as usize] = z;
    }
    let ghat = ComplexVector::new(lo, values);
    // One Gauss–Newton pass over every vertex and edge target at once: the
    // propagation solves each triangle exactly, but a barely non-collinear
    // link mid-traversal would otherwise amplify rounding error through the
    // rest of the walk.
    let sys = MagnitudeSystem::new(
        m.vertices().collect(),
        m.edges().map(|((a, b), t)| (a, b, t)).collect(),
        sa,
    );
    let ghat = polish(&ghat, &sys, 6);

    if (recovered.len() as i64) < hi - lo + 1 {
        report
            .notes
            .push("vertex ids are not contiguous; missing ids read as zero".into());
    }
    report.branch = EquivalenceBranch::identity();
    report.residual = remeasure_residual(&ghat, g, m);
    report.min_determinant = if min_det.is_finite() { min_det } else { 0.0 };
    report.seed = Some((sa, sb));
    report.bfs_order = Some(bfs_order);
    report.max_revisit_discrepancy = Some(max_revisit);
    report
        .notes
        .push("canonical phase: seed edge is real-positive / nonnegative-imaginary".into());
    Ok((ghat, report))
}

/// Largest absolute deviation between `m` and the re-measured candidate.
fn remeasure_residual(ghat: &ComplexVector, g: &SimpleGraph, m: &MeasurementSet) -> f64 {
    let mut worst = 0.0_f64;
    for v in g.vertices() {
        if let Some(mag) = m.vertex(v) {
            worst = worst.max((ghat.get(v).norm() - mag).abs());
        }
    }
    for (a, b) in g.edges() {
        if let Some(mag) = m.edge(a, b) {
            worst = worst.max(((ghat.get(a) - ghat.get(b)).norm() - mag).abs());
        }
    }
    worst
}

// ── JSON wire format ────────────────────────────────────────────────────────
//
// {"vertices": [0, 1, 2], "edges": [[0, 1], [1, 2]]}

#[derive(Serialize, Deserialize)]
struct SimpleGraphWire {
    vertices: Vec<i64>,
    edges: Vec<(i64, i64)>,
}

impl Serialize for SimpleGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SimpleGraphWire {
            vertices: self.vertices().collect(),
            edges: self.edges().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SimpleGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = SimpleGraphWire::deserialize(deserializer)?;
        let mut g = SimpleGraph::new();
        for v in wire.vertices {
            g.add_vertex(v);
        }
        for (a, b) in wire.edges {
            if a == b {
                return Err(D::Error::custom(format!("edge ({a}, {b}) is a self-loop")));
            }
            if !g.has_vertex(a) || !g.has_vertex(b) {
                return Err(D::Error::custom(format!(
                    "edge ({a}, {b}) references a vertex outside the vertex list"
                )));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::measure;
    use crate::vector::dist_conj;
    use crate::DEFAULT_TOL;

    fn signal(values: Vec<Complex64>, offset: i64) -> ComplexVector {
        ComplexVector::new(offset, values)
    }

    /// Independent triangle count: test every 3-subset of the vertex list.
    fn brute_force_triangles(g: &SimpleGraph) -> usize {
        let vs: Vec<i64> = g.vertices().collect();
        let mut count = 0;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                for k in j + 1..vs.len() {
                    if g.has_edge(vs[i], vs[j])
                        && g.has_edge(vs[i], vs[k])
                        && g.has_edge(vs[j], vs[k])
                    {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn circulant_family_shapes() {
        let g = circulant_graph(8, &[1, 2]);
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 16);
        // Wraparound collapses for tiny n; duplicates and loops are dropped.
        let tiny = circulant_graph(2, &[1, 2]);
        assert_eq!(tiny.vertex_count(), 2);
        assert_eq!(tiny.edge_count(), 1);
        // n = 4 with offsets {1, 2} is the complete graph K4.
        let k4 = circulant_graph(4, &[1, 2]);
        assert_eq!(k4.edge_count(), 6);
    }

    #[test]
    fn two_reference_family_shapes() {
        let g = two_reference_graph(8, 4, 5).unwrap();
        assert_eq!(g.vertex_count(), 8);
        // 7 edges to each reference, minus the doubly counted (4,5).
        assert_eq!(g.edge_count(), 13);
        assert!(g.has_edge(4, 5));
        assert!(two_reference_graph(8, 4, 4).is_err());
        assert!(two_reference_graph(8, 0, 5).is_err());
        assert!(two_reference_graph(8, 4, 9).is_err());
    }

    #[test]
    fn triangle_enumeration_matches_brute_force() {
        for g in [
            circulant_graph(8, &[1, 2]),
            circulant_graph(9, &[1, 3]),
            two_reference_graph(8, 4, 5).unwrap(),
            circulant_graph(4, &[1, 2]),
            circulant_graph(6, &[1]),
        ] {
            let tris = enumerate_triangles(&g);
            assert_eq!(tris.len(), brute_force_triangles(&g));
            // Each triple sorted, list sorted, no duplicates.
            let mut seen = BTreeSet::new();
            for t in &tris {
                assert!(t.vertices[0] < t.vertices[1] && t.vertices[1] < t.vertices[2]);
                assert!(seen.insert(t.vertices));
            }
        }
    }

    #[test]
    fn circulant_8_has_the_expected_cliques() {
        let tris = enumerate_triangles(&circulant_graph(8, &[1, 2]));
        assert_eq!(tris.len(), 8);
        // {n, n+1, n+2 mod 8}, sorted per triple.
        assert!(tris.contains(&TriangleNode { vertices: [0, 1, 2] }));
        assert!(tris.contains(&TriangleNode { vertices: [0, 6, 7] }));
        assert!(tris.contains(&TriangleNode { vertices: [0, 1, 7] }));
    }

    fn generic_signal_on(range: std::ops::Range<i64>) -> ComplexVector {
        // e^{i n π / 5}: consecutive phases differ by 36°, so every edge of
        // both Fig-style families is non-collinear.
        let values = range
            .clone()
            .map(|n| Complex64::from_polar(1.0, n as f64 * std::f64::consts::PI / 5.0))
            .collect();
        signal(values, range.start)
    }

    #[test]
    fn triangle_graph_of_circulant_8_is_an_8_cycle() {
        let g = circulant_graph(8, &[1, 2]);
        let f = generic_signal_on(0..8);
        let m = measure(&f, &g);
        let gf = build_triangle_graph(&g, &m, DEFAULT_TOL).unwrap();
        assert_eq!(gf.nodes.len(), 8);
        assert_eq!(gf.links.len(), 8);
        // Every node has degree 2 and the link graph is one cycle.
        let adj = gf.adjacency();
        assert!(adj.iter().all(|ns| ns.len() == 2));
        assert_eq!(check_hypothesis(&g, &gf), Diagnosis::Ok);
    }

    #[test]
    fn triangle_graph_of_two_reference_8_is_complete() {
        let g = two_reference_graph(8, 4, 5).unwrap();
        let f = signal(
            (1..=8).map(|n| Complex64::new(n as f64, (n * n) as f64)).collect(),
            1,
        );
        let m = measure(&f, &g);
        let gf = build_triangle_graph(&g, &m, DEFAULT_TOL).unwrap();
        // Triangles {n, 4, 5} for n ∉ {4, 5}: six nodes, all pairwise linked
        // through the shared reference edge (4, 5).
        assert_eq!(gf.nodes.len(), 6);
        assert_eq!(gf.links.len(), 15);
        assert!(gf.links.iter().all(|l| l.shared_edge == (4, 5)));
        assert_eq!(check_hypothesis(&g, &gf), Diagnosis::Ok);
    }

    #[test]
    fn hypothesis_reports_uncovered_vertices() {
        // A path has no triangles at all.
        let mut g = SimpleGraph::new();
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        let m = measure(&generic_signal_on(0..3), &g);
        let gf = build_triangle_graph(&g, &m, DEFAULT_TOL).unwrap();
        assert_eq!(check_hypothesis(&g, &gf), Diagnosis::UncoveredVertices(vec![0, 1, 2]));
    }

    #[test]
    fn hypothesis_reports_disconnected_triangle_graph() {
        // Two vertex-disjoint triangles: both cliques exist but no edge is
        // shared, so phase cannot travel between them.
        let mut g = SimpleGraph::new();
        for (a, b) in [(0, 1), (0, 2), (1, 2), (10, 11), (10, 12), (11, 12)] {
            g.add_edge(a, b);
        }
        let f = generic_signal_on(0..13);
        let m = measure(&f, &g);
        let gf = build_triangle_graph(&g, &m, DEFAULT_TOL).unwrap();
        assert_eq!(
            check_hypothesis(&g, &gf),
            Diagnosis::Disconnected { components: vec![vec![0], vec![1]] }
        );
    }

    #[test]
    fn real_signals_disconnect_every_link() {
        // All pairs of real values are collinear: nodes survive, links die.
        let g = circulant_graph(8, &[1, 2]);
        let f = ComplexVector::from_reals(0, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let m = measure(&f, &g);
        let gf = build_triangle_graph(&g, &m, DEFAULT_TOL).unwrap();
        assert_eq!(gf.nodes.len(), 8);
        assert!(gf.links.is_empty());
        let err = propagate_recover(&g, &m, DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::HypothesisFailed(Diagnosis::Disconnected { .. })));
    }

    #[test]
    fn propagation_recovers_the_k4_example() {
        let g = circulant_graph(4, &[1, 2]);
        let f = signal(
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, -1.0),
            ],
            0,
        );
        let m = measure(&f, &g);
        let (ghat, report) = propagate_recover(&g, &m, DEFAULT_TOL).unwrap();
        let (d, _) = dist_conj(&ghat, &f);
        assert!(d <= 1e-9 * f.norm(), "dist {d}");
        assert!(report.residual <= 1e-9);
        assert!(report.min_determinant > 0.0);
        assert_eq!(report.max_revisit_discrepancy.map(|x| x <= 1e-9), Some(true));
        // Canonical seed phases: real-positive then nonnegative-imaginary.
        let (sa, sb) = report.seed.unwrap();
        assert!(ghat.get(sa).im.abs() < 1e-12 && ghat.get(sa).re > 0.0);
        assert!(ghat.get(sb).im >= 0.0);
    }

    #[test]
    fn propagation_recovers_both_figure_families() {
        let g = circulant_graph(8, &[1, 2]);
        let f = generic_signal_on(0..8);
        let m = measure(&f, &g);
        let (ghat, _) = propagate_recover(&g, &m, DEFAULT_TOL).unwrap();
        let (d, _) = dist_conj(&ghat, &f);
        assert!(d <= 1e-9 * f.norm(), "circulant dist {d}");

        let g = two_reference_graph(8, 4, 5).unwrap();
        let f = signal(
            (1..=8).map(|n| Complex64::new(n as f64, (n * n) as f64)).collect(),
            1,
        );
        let m = measure(&f, &g);
        let (ghat, report) = propagate_recover(&g, &m, DEFAULT_TOL).unwrap();
        let (d, _) = dist_conj(&ghat, &f);
        assert!(d <= 1e-9 * f.norm(), "two-reference dist {d}");
        assert_eq!(report.seed, Some((4, 5)));
    }

    #[test]
    fn single_triangle_recovers_without_links() {
        let mut g = SimpleGraph::new();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            g.add_edge(a, b);
        }
        let f = signal(
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0)],
            0,
        );
        let m = measure(&f, &g);
        let (ghat, _) = propagate_recover(&g, &m, DEFAULT_TOL).unwrap();
        let (d, _) = dist_conj(&ghat, &f);
        assert!(d <= 1e-9 * f.norm());

        // All-real values on the same triangle leave nothing to seed from.
        let m = measure(&ComplexVector::from_reals(0, &[1.0, 2.0, 3.0]), &g);
        assert!(matches!(
            propagate_recover(&g, &m, DEFAULT_TOL).unwrap_err(),
            Error::NoNoncollinearEdge
        ));
    }

    #[test]
    fn relabeling_preserves_triangle_structure() {
        // An order-preserving relabeling must not change any count.
        let g = circulant_graph(8, &[1, 2]);
        let f = generic_signal_on(0..8);
        let m = measure(&f, &g);
        let gf = build_triangle_graph(&g, &m, DEFAULT_TOL).unwrap();

        let relabel = |v: i64| 10 * v + 3;
        let mut g2 = SimpleGraph::new();
        for v in g.vertices() {
            g2.add_vertex(relabel(v));
        }
        for (a, b) in g.edges() {
            g2.add_edge(relabel(a), relabel(b));
        }
        let mut m2 = MeasurementSet::new();
        for (v, mag) in m.vertices() {
            m2.insert_vertex(relabel(v), mag);
        }
        for ((a, b), mag) in m.edges() {
            m2.insert_edge(relabel(a), relabel(b), mag);
        }
        let gf2 = build_triangle_graph(&g2, &m2, DEFAULT_TOL).unwrap();
        assert_eq!(gf2.nodes.len(), gf.nodes.len());
        assert_eq!(gf2.links.len(), gf.links.len());
        assert_eq!(check_hypothesis(&g2, &gf2), Diagnosis::Ok);
    }

    #[test]
    fn graph_json_round_trip() {
        let g = circulant_graph(4, &[1]);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"vertices":[0,1,2,3],"edges":[[0,1],[0,3],[1,2],[2,3]]}"#);
        let back: SimpleGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<SimpleGraph>(r#"{"vertices":[0],"edges":[[0,1]]}"#).is_err());
        assert!(serde_json::from_str::<SimpleGraph>(r#"{"vertices":[0,1],"edges":[[0,0]]}"#).is_err());
    }
}
