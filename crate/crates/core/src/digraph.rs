//! Finite directed and undirected graphs with the range/source path
//! convention, multitree verification, the vertex order, minimal common
//! upper bounds, vertex-level cylinder sets, and the dual graph.
//!
//! Paths compose right to left: `e1 e2 .. en` requires `s(e_i) = r(e_{i+1})`,
//! and a path "from w to v" has source `w` and range `v`. Vertex and edge
//! ids are opaque strings, stored sorted so every operation iterates in a
//! reproducible order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::zmatrix::IntMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("edge {edge:?} references unknown vertex {vertex:?}")]
    UnknownVertex { edge: String, vertex: String },
    #[error("unknown vertex id {0:?}")]
    NoSuchVertex(String),
    #[error("unknown edge id {0:?}")]
    NoSuchEdge(String),
    #[error("bar map must be a total involution: problem at edge {0:?}")]
    BadInvolution(String),
    #[error("bar({0:?}) = {0:?} but edge reversal may not fix an edge")]
    FixedEdge(String),
    #[error("bar must swap range and source: violated at edge {0:?}")]
    BarEndpoints(String),
    #[error("path is not composable at position {0}")]
    NotComposable(usize),
    #[error("graph is not a multitree")]
    NotAMultitree,
    #[error("cylinder decomposition certificate failed for ({v:?}, {w:?}): {reason}")]
    CertificationFailed { v: String, w: String, reason: String },
}

/// Edge description used to build graphs: id plus range and source vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub range: String,
    pub source: String,
}

impl EdgeSpec {
    pub fn new(id: &str, range: &str, source: &str) -> Self {
        EdgeSpec {
            id: id.to_string(),
            range: range.to_string(),
            source: source.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct EdgeData {
    id: String,
    range: usize,
    source: usize,
}

/// Finite directed graph with named vertices and edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    vertices: Vec<String>,
    edges: Vec<EdgeData>,
    vertex_index: BTreeMap<String, usize>,
    edge_index: BTreeMap<String, usize>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
}

impl DiGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = String>,
        edges: impl IntoIterator<Item = EdgeSpec>,
    ) -> Result<Self, GraphError> {
        let mut vs: Vec<String> = vertices.into_iter().collect();
        vs.sort();
        for w in vs.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateVertex(w[0].clone()));
            }
        }
        let vertex_index: BTreeMap<String, usize> =
            vs.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();

        let mut es: Vec<EdgeSpec> = edges.into_iter().collect();
        es.sort_by(|a, b| a.id.cmp(&b.id));
        for w in es.windows(2) {
            if w[0].id == w[1].id {
                return Err(GraphError::DuplicateEdge(w[0].id.clone()));
            }
        }
        let mut edge_index = BTreeMap::new();
        let mut edge_data = Vec::with_capacity(es.len());
        let mut in_edges = vec![Vec::new(); vs.len()];
        let mut out_edges = vec![Vec::new(); vs.len()];
        for (i, spec) in es.into_iter().enumerate() {
            let range = *vertex_index
                .get(&spec.range)
                .ok_or_else(|| GraphError::UnknownVertex {
                    edge: spec.id.clone(),
                    vertex: spec.range.clone(),
                })?;
            let source = *vertex_index
                .get(&spec.source)
                .ok_or_else(|| GraphError::UnknownVertex {
                    edge: spec.id.clone(),
                    vertex: spec.source.clone(),
                })?;
            in_edges[range].push(i);
            out_edges[source].push(i);
            edge_index.insert(spec.id.clone(), i);
            edge_data.push(EdgeData {
                id: spec.id,
                range,
                source,
            });
        }
        Ok(DiGraph {
            vertices: vs,
            edges: edge_data,
            vertex_index,
            edge_index,
            in_edges,
            out_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, idx: usize) -> &str {
        &self.vertices[idx]
    }

    pub fn vertex_idx(&self, id: &str) -> Result<usize, GraphError> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::NoSuchVertex(id.to_string()))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &str> {
        self.edges.iter().map(|e| e.id.as_str())
    }

    pub fn edge_name(&self, idx: usize) -> &str {
        &self.edges[idx].id
    }

    pub fn edge_idx(&self, id: &str) -> Result<usize, GraphError> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::NoSuchEdge(id.to_string()))
    }

    /// (range, source) vertex indices of an edge.
    pub fn edge_endpoints(&self, idx: usize) -> (usize, usize) {
        (self.edges[idx].range, self.edges[idx].source)
    }

    pub fn range_idx(&self, edge: usize) -> usize {
        self.edges[edge].range
    }

    pub fn source_idx(&self, edge: usize) -> usize {
        self.edges[edge].source
    }

    /// Edges with range `v`; `|in_edges(v)|` is the in-degree `|r^{-1}(v)|`.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Edges with source `v`.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn edge_specs(&self) -> Vec<EdgeSpec> {
        self.edges
            .iter()
            .map(|e| EdgeSpec {
                id: e.id.clone(),
                range: self.vertices[e.range].clone(),
                source: self.vertices[e.source].clone(),
            })
            .collect()
    }

    /// Vertices reachable from `start` along source-to-range steps, i.e.
    /// the set `{x : a path with source `start` and range x exists}`.
    pub fn forward_reach(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            for &e in &self.out_edges[x] {
                let y = self.edges[e].range;
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Vertices that reach `target`: `{w : a path with range `target` and
    /// source w exists}`. This is the vertex part of the cylinder Z(target).
    pub fn backward_reach(&self, target: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([target]);
        seen[target] = true;
        while let Some(x) = queue.pop_front() {
            for &e in &self.in_edges[x] {
                let y = self.edges[e].source;
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm on the source-to-range orientation.
        let n = self.vertex_count();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.in_edges[v].len()).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop_front() {
            seen += 1;
            for &e in &self.out_edges[v] {
                let r = self.edges[e].range;
                indeg[r] -= 1;
                if indeg[r] == 0 {
                    queue.push_back(r);
                }
            }
        }
        seen == n
    }

    pub fn has_sources(&self) -> bool {
        (0..self.vertex_count()).any(|v| self.in_edges[v].is_empty())
    }

    /// Weakly connected components as sorted lists of vertex indices,
    /// ordered by their smallest member.
    pub fn weakly_connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut components = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                let neighbours = self.in_edges[x]
                    .iter()
                    .map(|&e| self.edges[e].source)
                    .chain(self.out_edges[x].iter().map(|&e| self.edges[e].range));
                for y in neighbours {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    /// Strongly connected components (Tarjan), each sorted, in reverse
    /// topological order of the condensation.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut next = 0usize;
        let mut comps: Vec<Vec<usize>> = Vec::new();

        // Iterative Tarjan to stay safe on deeper graphs.
        enum Frame {
            Enter(usize),
            Resume(usize, usize),
        }
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut work = vec![Frame::Enter(root)];
            while let Some(frame) = work.pop() {
                match frame {
                    Frame::Enter(v) => {
                        index[v] = next;
                        low[v] = next;
                        next += 1;
                        stack.push(v);
                        on_stack[v] = true;
                        work.push(Frame::Resume(v, 0));
                    }
                    Frame::Resume(v, mut ei) => {
                        let mut descended = false;
                        while ei < self.out_edges[v].len() {
                            let w = self.edges[self.out_edges[v][ei]].range;
                            ei += 1;
                            if index[w] == usize::MAX {
                                work.push(Frame::Resume(v, ei));
                                work.push(Frame::Enter(w));
                                descended = true;
                                break;
                            } else if on_stack[w] {
                                low[v] = low[v].min(index[w]);
                            }
                        }
                        if descended {
                            continue;
                        }
                        if low[v] == index[v] {
                            let mut comp = Vec::new();
                            loop {
                                let w = stack.pop().unwrap();
                                on_stack[w] = false;
                                low[w] = usize::MAX; // mark component root resolved
                                comp.push(w);
                                if w == v {
                                    break;
                                }
                            }
                            comp.sort_unstable();
                            comps.push(comp);
                        } else if let Some(Frame::Resume(p, _)) = work.last() {
                            low[*p] = low[*p].min(low[v]);
                        }
                    }
                }
            }
        }
        comps
    }
}

/// A path in a graph, stored as resolved edge indices with an explicit
/// range vertex so length-0 paths are representable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    range: usize,
    edges: Vec<usize>,
}

impl Path {
    /// Builds and validates a path from the range vertex and the edge ids
    /// in range-to-source order.
    pub fn new(g: &DiGraph, range: &str, edge_ids: &[&str]) -> Result<Self, GraphError> {
        let range_idx = g.vertex_idx(range)?;
        let mut edges = Vec::with_capacity(edge_ids.len());
        for id in edge_ids {
            edges.push(g.edge_idx(id)?);
        }
        Path::from_indices(g, range_idx, edges)
    }

    pub fn from_indices(
        g: &DiGraph,
        range: usize,
        edges: Vec<usize>,
    ) -> Result<Self, GraphError> {
        let mut at = range;
        for (pos, &e) in edges.iter().enumerate() {
            if g.range_idx(e) != at {
                return Err(GraphError::NotComposable(pos));
            }
            at = g.source_idx(e);
        }
        Ok(Path { range, edges })
    }

    pub fn empty_at(g: &DiGraph, vertex: &str) -> Result<Self, GraphError> {
        Ok(Path {
            range: g.vertex_idx(vertex)?,
            edges: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn source(&self, g: &DiGraph) -> usize {
        self.edges
            .last()
            .map_or(self.range, |&e| g.source_idx(e))
    }

    pub fn edge_indices(&self) -> &[usize] {
        &self.edges
    }

    pub fn edge_names<'g>(&self, g: &'g DiGraph) -> Vec<&'g str> {
        self.edges.iter().map(|&e| g.edge_name(e)).collect()
    }

    /// No backtracking: `e_{i+1} != bar(e_i)` throughout.
    pub fn is_reduced(&self, g: &UndirectedGraph) -> bool {
        self.edges
            .windows(2)
            .all(|w| w[1] != g.bar_idx(w[0]))
    }
}

/// Undirected graph: a digraph of oriented edges together with the
/// edge-reversal involution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    graph: DiGraph,
    bar: Vec<usize>,
}

impl UndirectedGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = String>,
        edges: impl IntoIterator<Item = EdgeSpec>,
        bar: &BTreeMap<String, String>,
    ) -> Result<Self, GraphError> {
        let graph = DiGraph::new(vertices, edges)?;
        let mut bar_idx = vec![usize::MAX; graph.edge_count()];
        for (a, b) in bar {
            let ai = graph.edge_idx(a)?;
            let bi = graph.edge_idx(b)?;
            bar_idx[ai] = bi;
        }
        for e in 0..graph.edge_count() {
            let eb = bar_idx[e];
            if eb == usize::MAX {
                return Err(GraphError::BadInvolution(graph.edge_name(e).to_string()));
            }
            if eb == e {
                return Err(GraphError::FixedEdge(graph.edge_name(e).to_string()));
            }
            if bar_idx[eb] != e {
                return Err(GraphError::BadInvolution(graph.edge_name(e).to_string()));
            }
            let (r, s) = graph.edge_endpoints(e);
            let (rb, sb) = graph.edge_endpoints(eb);
            if r != sb || s != rb {
                return Err(GraphError::BarEndpoints(graph.edge_name(e).to_string()));
            }
        }
        Ok(UndirectedGraph { graph, bar: bar_idx })
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn bar_idx(&self, edge: usize) -> usize {
        self.bar[edge]
    }

    pub fn bar(&self, edge_id: &str) -> Result<&str, GraphError> {
        let e = self.graph.edge_idx(edge_id)?;
        Ok(self.graph.edge_name(self.bar[e]))
    }

    pub fn bar_map(&self) -> BTreeMap<String, String> {
        (0..self.graph.edge_count())
            .map(|e| {
                (
                    self.graph.edge_name(e).to_string(),
                    self.graph.edge_name(self.bar[e]).to_string(),
                )
            })
            .collect()
    }

    /// `|r^{-1}(v)| < infinity` for every vertex; trivially true here, kept
    /// as an explicit flag because the involution interface promises it.
    pub fn is_locally_finite(&self) -> bool {
        true
    }

    /// `|r^{-1}(v)| > 1` for every vertex.
    pub fn is_nonsingular(&self) -> bool {
        (0..self.graph.vertex_count()).all(|v| self.graph.in_edges(v).len() > 1)
    }
}

/// Counts directed paths of length `0..=max_len` per ordered vertex pair.
/// Entry (v, w) holds the number of paths with range v and source w; with
/// `max_len = |vertices|` the count is exact for acyclic graphs.
pub fn path_count_matrix(g: &DiGraph, max_len: usize) -> IntMatrix {
    let n = g.vertex_count();
    let mut adjacency = IntMatrix::zeros(n, n);
    for e in 0..g.edge_count() {
        let (r, s) = g.edge_endpoints(e);
        adjacency.add_assign_at(r, s, &num_bigint::BigInt::one());
    }
    let mut total = IntMatrix::identity(n);
    let mut power = IntMatrix::identity(n);
    for _ in 0..max_len {
        power = adjacency.mul(&power).expect("square");
        for r in 0..n {
            for c in 0..n {
                total.add_assign_at(r, c, power.get(r, c));
            }
        }
    }
    total
}

/// True iff `g` is acyclic and no ordered vertex pair has two distinct
/// directed paths; length-0 paths count, so any cycle disqualifies.
pub fn is_multitree(g: &DiGraph) -> bool {
    if !g.is_acyclic() {
        return false;
    }
    let counts = path_count_matrix(g, g.vertex_count());
    let one = num_bigint::BigInt::one();
    (0..g.vertex_count())
        .all(|r| (0..g.vertex_count()).all(|c| counts.get(r, c) <= &one))
}

/// Vertex part of the cylinder Z(v): all vertices w admitting a path with
/// range v and source w, i.e. the up-set of v in the multitree order.
pub fn vertex_cylinder(g: &DiGraph, v: &str) -> Result<BTreeSet<String>, GraphError> {
    let vi = g.vertex_idx(v)?;
    Ok(cylinder_indices(g, vi)
        .into_iter()
        .map(|i| g.vertex_name(i).to_string())
        .collect())
}

fn cylinder_indices(g: &DiGraph, v: usize) -> Vec<usize> {
    g.backward_reach(v)
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

/// Minimal common upper bounds `v ∨ w` in the multitree order, where
/// `v <= u` iff a path from u to v exists.
pub fn min_upper_bounds(g: &DiGraph, v: &str, w: &str) -> Result<Vec<String>, GraphError> {
    if !is_multitree(g) {
        return Err(GraphError::NotAMultitree);
    }
    let vi = g.vertex_idx(v)?;
    let wi = g.vertex_idx(w)?;
    Ok(min_upper_bound_indices(g, vi, wi)
        .into_iter()
        .map(|i| g.vertex_name(i).to_string())
        .collect())
}

fn min_upper_bound_indices(g: &DiGraph, v: usize, w: usize) -> Vec<usize> {
    let up_v = g.backward_reach(v);
    let up_w = g.backward_reach(w);
    let common: Vec<usize> = (0..g.vertex_count())
        .filter(|&u| up_v[u] && up_w[u])
        .collect();
    common
        .iter()
        .copied()
        .filter(|&u| {
            // u is minimal iff no other common upper bound lies below it.
            let below = g.forward_reach(u);
            common.iter().all(|&x| x == u || !below[x])
        })
        .collect()
}

/// Result of a certified cylinder-intersection decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderDecomposition {
    /// The minimal common upper bounds, whose cylinders partition the
    /// intersection.
    pub parts: Vec<String>,
    /// The vertex set `Z(v) ∩ Z(w)` being partitioned.
    pub intersection: BTreeSet<String>,
}

/// Computes `v ∨ w` and checks the partition identity
/// `Z(v) ∩ Z(w) = ⨆_u Z(u)` at the vertex level before returning it.
pub fn decompose_cylinder_intersection(
    g: &DiGraph,
    v: &str,
    w: &str,
) -> Result<CylinderDecomposition, GraphError> {
    if !is_multitree(g) {
        return Err(GraphError::NotAMultitree);
    }
    let vi = g.vertex_idx(v)?;
    let wi = g.vertex_idx(w)?;
    let up_v = g.backward_reach(vi);
    let up_w = g.backward_reach(wi);
    let intersection: BTreeSet<usize> = (0..g.vertex_count())
        .filter(|&u| up_v[u] && up_w[u])
        .collect();
    let parts = min_upper_bound_indices(g, vi, wi);

    let fail = |reason: String| GraphError::CertificationFailed {
        v: v.to_string(),
        w: w.to_string(),
        reason,
    };

    let mut covered: BTreeSet<usize> = BTreeSet::new();
    for &u in &parts {
        for x in cylinder_indices(g, u) {
            if !covered.insert(x) {
                return Err(fail(format!(
                    "vertex {:?} covered twice",
                    g.vertex_name(x)
                )));
            }
        }
    }
    if covered != intersection {
        return Err(fail("union of part cylinders is not the intersection".into()));
    }

    Ok(CylinderDecomposition {
        parts: parts.iter().map(|&u| g.vertex_name(u).to_string()).collect(),
        intersection: intersection
            .iter()
            .map(|&u| g.vertex_name(u).to_string())
            .collect(),
    })
}

/// Dual graph: vertices are the edges of `g`, edges are the reduced
/// 2-paths `ef` (with `s(e) = r(f)` and `f != bar(e)`), `r(ef) = e` and
/// `s(ef) = f`.
pub fn dual_graph(g: &UndirectedGraph) -> DiGraph {
    let base = g.graph();
    let vertices: Vec<String> = base.edge_ids().map(str::to_string).collect();
    let mut edges = Vec::new();
    for e in 0..base.edge_count() {
        let shared = base.source_idx(e);
        for &f in base.in_edges(shared) {
            if f == g.bar_idx(e) {
                continue;
            }
            edges.push(EdgeSpec {
                id: dual_edge_id(base.edge_name(e), base.edge_name(f), 0, 1),
                range: base.edge_name(e).to_string(),
                source: base.edge_name(f).to_string(),
            });
        }
    }
    DiGraph::new(vertices, edges).expect("dual construction preserves well-formedness")
}

/// Id scheme shared by `dual_graph` and the presentation-level dual so the
/// all-trivial cross-check can compare outputs edge for edge. The separator
/// characters are escaped inside the components, so distinct pairs (and
/// parallel copies) never collide however the input ids are spelled.
pub fn dual_edge_id(e: &str, f: &str, index: usize, count: usize) -> String {
    let escape = |id: &str| {
        id.replace('\\', "\\\\")
            .replace('.', "\\.")
            .replace('#', "\\#")
    };
    if count == 1 {
        format!("{}.{}", escape(e), escape(f))
    } else {
        format!("{}.{}#{index}", escape(e), escape(f))
    }
}

// ---------------------------------------------------------------------------
// JSON schemas
//
// Directed: {"vertices": [id, ..], "edges": [{"id", "range", "source"}, ..]}
// Undirected adds "bar": {id: id}.
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bar: Option<BTreeMap<String, String>>,
}

impl GraphJson {
    pub fn to_digraph(&self) -> Result<DiGraph, GraphError> {
        DiGraph::new(self.vertices.iter().cloned(), self.edges.iter().cloned())
    }

    pub fn to_undirected(&self) -> Result<UndirectedGraph, GraphError> {
        let bar = self
            .bar
            .clone()
            .ok_or_else(|| GraphError::BadInvolution("<missing bar map>".to_string()))?;
        UndirectedGraph::new(self.vertices.iter().cloned(), self.edges.iter().cloned(), &bar)
    }

    pub fn from_digraph(g: &DiGraph) -> Self {
        GraphJson {
            vertices: g.vertex_ids().to_vec(),
            edges: g.edge_specs(),
            bar: None,
        }
    }

    pub fn from_undirected(g: &UndirectedGraph) -> Self {
        GraphJson {
            vertices: g.graph().vertex_ids().to_vec(),
            edges: g.graph().edge_specs(),
            bar: Some(g.bar_map()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn graph(vertices: &[&str], edges: &[(&str, &str, &str)]) -> DiGraph {
        DiGraph::new(
            vertices.iter().map(|s| s.to_string()),
            edges.iter().map(|(id, r, s)| EdgeSpec::new(id, r, s)),
        )
        .unwrap()
    }

    /// Three-layer example multitree: bottom row a0..a3, mid rows b, c,
    /// top row d0..d5, every arrow x -> y an edge with source x, range y.
    pub(crate) fn example_multitree() -> DiGraph {
        let vertices = [
            "a0", "a1", "a2", "a3", "b0", "b1", "b2", "c0", "c1", "c2", "d0", "d1", "d2", "d3",
            "d4", "d5",
        ];
        let arrows = [
            ("b0", "a0"),
            ("b0", "a1"),
            ("b1", "a1"),
            ("b1", "a2"),
            ("b2", "a2"),
            ("b2", "a3"),
            ("c0", "b0"),
            ("c0", "b2"),
            ("c1", "b1"),
            ("c2", "b0"),
            ("c2", "b2"),
            ("d0", "c0"),
            ("d1", "c0"),
            ("d2", "c1"),
            ("d3", "c1"),
            ("d4", "c2"),
            ("d5", "c2"),
        ];
        DiGraph::new(
            vertices.iter().map(|s| s.to_string()),
            arrows
                .iter()
                .map(|(from, to)| EdgeSpec::new(&format!("{from}-{to}"), to, from)),
        )
        .unwrap()
    }

    #[test]
    fn path_counts_trivial_cases() {
        let g = graph(&["a"], &[]);
        let m = path_count_matrix(&g, 1);
        assert_eq!(m, IntMatrix::from_i64_rows(&[&[1]]));

        let g = graph(&["a", "b"], &[("e", "a", "b")]);
        let m = path_count_matrix(&g, 2);
        // rows/cols in sorted vertex order a, b
        assert_eq!(m.get(0, 1), &BigInt::from(1)); // count(a, b)
        assert_eq!(m.get(1, 0), &BigInt::from(0)); // count(b, a)
    }

    #[test]
    fn path_counts_diamond() {
        let g = graph(
            &["a", "b", "c", "d"],
            &[
                ("e1", "a", "b"),
                ("e2", "a", "c"),
                ("e3", "b", "d"),
                ("e4", "c", "d"),
            ],
        );
        let m = path_count_matrix(&g, 4);
        assert_eq!(m.get(0, 3), &BigInt::from(2)); // two paths d -> a
        assert!(!is_multitree(&g));
    }

    #[test]
    fn example_graph_is_multitree() {
        assert!(is_multitree(&example_multitree()));
    }

    #[test]
    fn cycles_are_not_multitrees() {
        let g = graph(&["a", "b"], &[("e", "a", "b"), ("f", "b", "a")]);
        assert!(!is_multitree(&g));
        let g = graph(&["a"], &[("loop", "a", "a")]);
        assert!(!is_multitree(&g));
    }

    fn double_bound_graph() -> DiGraph {
        // u1 -> v, u1 -> w, u2 -> v, u2 -> w with u1, u2 incomparable
        graph(
            &["u1", "u2", "v", "w"],
            &[
                ("e1", "v", "u1"),
                ("e2", "w", "u1"),
                ("e3", "v", "u2"),
                ("e4", "w", "u2"),
            ],
        )
    }

    #[test]
    fn min_upper_bounds_cases() {
        let g = double_bound_graph();
        assert_eq!(min_upper_bounds(&g, "v", "v").unwrap(), vec!["v"]);
        assert_eq!(min_upper_bounds(&g, "v", "w").unwrap(), vec!["u1", "u2"]);

        let disjoint = graph(&["a", "b"], &[]);
        assert!(min_upper_bounds(&disjoint, "a", "b").unwrap().is_empty());
    }

    #[test]
    fn cylinders() {
        let isolated = graph(&["a"], &[]);
        assert_eq!(
            vertex_cylinder(&isolated, "a").unwrap(),
            BTreeSet::from(["a".to_string()])
        );

        // chain a <- b <- c
        let chain = graph(&["a", "b", "c"], &[("e", "a", "b"), ("f", "b", "c")]);
        assert_eq!(
            vertex_cylinder(&chain, "a").unwrap(),
            ["a", "b", "c"].map(str::to_string).into()
        );

        let g = double_bound_graph();
        assert_eq!(
            vertex_cylinder(&g, "v").unwrap(),
            ["u1", "u2", "v"].map(str::to_string).into()
        );
    }

    #[test]
    fn decompose_cases() {
        let g = double_bound_graph();
        let d = decompose_cylinder_intersection(&g, "v", "v").unwrap();
        assert_eq!(d.parts, vec!["v"]);

        let d = decompose_cylinder_intersection(&g, "v", "w").unwrap();
        assert_eq!(d.parts, vec!["u1", "u2"]);
        assert_eq!(d.intersection, ["u1", "u2"].map(str::to_string).into());

        let disjoint = graph(&["a", "b"], &[]);
        let d = decompose_cylinder_intersection(&disjoint, "a", "b").unwrap();
        assert!(d.parts.is_empty());
        assert!(d.intersection.is_empty());
    }

    fn undirected_path_xyz() -> UndirectedGraph {
        // x -- y -- z, e: r=x s=y, f: r=y s=z
        let bar: BTreeMap<String, String> = [
            ("e", "ebar"),
            ("ebar", "e"),
            ("f", "fbar"),
            ("fbar", "f"),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        UndirectedGraph::new(
            ["x", "y", "z"].map(str::to_string),
            [
                EdgeSpec::new("e", "x", "y"),
                EdgeSpec::new("ebar", "y", "x"),
                EdgeSpec::new("f", "y", "z"),
                EdgeSpec::new("fbar", "z", "y"),
            ],
            &bar,
        )
        .unwrap()
    }

    #[test]
    fn dual_of_path_graph() {
        let g = undirected_path_xyz();
        let dual = dual_graph(&g);
        assert_eq!(dual.vertex_count(), 4);
        assert_eq!(dual.edge_count(), 2);
        let ids: Vec<&str> = dual.edge_ids().collect();
        assert_eq!(ids, vec!["e.f", "fbar.ebar"]);
    }

    #[test]
    fn dual_of_single_edge() {
        let bar: BTreeMap<String, String> = [("e", "ebar"), ("ebar", "e")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let g = UndirectedGraph::new(
            ["x", "y"].map(str::to_string),
            [EdgeSpec::new("e", "x", "y"), EdgeSpec::new("ebar", "y", "x")],
            &bar,
        )
        .unwrap();
        let dual = dual_graph(&g);
        assert_eq!(dual.vertex_count(), 2);
        assert_eq!(dual.edge_count(), 0);
    }

    pub(crate) fn undirected_rose(n: usize) -> UndirectedGraph {
        let mut edges = Vec::new();
        let mut bar = BTreeMap::new();
        for i in 0..n {
            let a = format!("l{i}");
            let b = format!("l{i}bar");
            edges.push(EdgeSpec::new(&a, "v", "v"));
            edges.push(EdgeSpec::new(&b, "v", "v"));
            bar.insert(a.clone(), b.clone());
            bar.insert(b, a);
        }
        UndirectedGraph::new(["v".to_string()], edges, &bar).unwrap()
    }

    #[test]
    fn dual_of_rose() {
        for n in 1..=3 {
            let g = undirected_rose(n);
            let dual = dual_graph(&g);
            assert_eq!(dual.vertex_count(), 2 * n);
            for v in 0..dual.vertex_count() {
                assert_eq!(dual.in_edges(v).len(), 2 * n - 1);
            }
        }
    }

    #[test]
    fn dual_of_finite_tree_is_multitree() {
        // Duality itself only needs local finiteness; the unique-path check
        // applies to the finite truncation.
        assert!(is_multitree(&dual_graph(&undirected_path_xyz())));
    }

    #[test]
    fn sccs_match_mutual_reachability() {
        // deterministic pseudo-random multigraphs, components re-derived
        // from pairwise reachability
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for round in 0..50 {
            let n = 1 + (next() % 7) as usize;
            let edges: Vec<EdgeSpec> = (0..(next() % 12))
                .map(|i| {
                    EdgeSpec::new(
                        &format!("e{round}-{i}"),
                        &format!("v{}", next() % n as u64),
                        &format!("v{}", next() % n as u64),
                    )
                })
                .collect();
            let g = DiGraph::new((0..n).map(|i| format!("v{i}")), edges).unwrap();
            let reach: Vec<Vec<bool>> = (0..n).map(|v| g.forward_reach(v)).collect();
            let mut expected: Vec<Vec<usize>> = Vec::new();
            let mut assigned = vec![false; n];
            for v in 0..n {
                if assigned[v] {
                    continue;
                }
                let comp: Vec<usize> =
                    (0..n).filter(|&w| reach[v][w] && reach[w][v]).collect();
                for &w in &comp {
                    assigned[w] = true;
                }
                expected.push(comp);
            }
            let mut got = g.strongly_connected_components();
            got.sort();
            expected.sort();
            assert_eq!(got, expected, "round {round}");
        }
    }

    #[test]
    fn order_equivalence_on_example() {
        let g = example_multitree();
        for v in 0..g.vertex_count() {
            let cyl_v = g.backward_reach(v);
            for w in 0..g.vertex_count() {
                let in_cyl = cyl_v[w];
                let cyl_w = g.backward_reach(w);
                let contained = (0..g.vertex_count()).all(|x| !cyl_w[x] || cyl_v[x]);
                // w in Z(v) iff Z(w) subset Z(v) iff v <= w
                assert_eq!(in_cyl, contained);
            }
        }
    }

    #[test]
    fn dual_edge_ids_never_collide() {
        // edges "a.b" + "c" vs "a" + "b.c" must not alias
        assert_ne!(dual_edge_id("a.b", "c", 0, 1), dual_edge_id("a", "b.c", 0, 1));
        // a literal "f#0" id must not alias the first parallel copy of (e, f)
        assert_ne!(dual_edge_id("e", "f#0", 0, 1), dual_edge_id("e", "f", 0, 2));
        assert_eq!(dual_edge_id("e", "f", 0, 1), "e.f");
        assert_eq!(dual_edge_id("e", "f", 1, 3), "e.f#1");
    }

    #[test]
    fn reduced_paths() {
        let g = undirected_path_xyz();
        let reduced = Path::new(g.graph(), "x", &["e", "f"]).unwrap();
        assert!(reduced.is_reduced(&g));
        let backtrack = Path::new(g.graph(), "x", &["e", "ebar"]).unwrap();
        assert!(!backtrack.is_reduced(&g));
    }

    #[test]
    fn json_round_trip() {
        let g = example_multitree();
        let json = GraphJson::from_digraph(&g);
        let text = serde_json::to_string(&json).unwrap();
        let back: GraphJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_digraph().unwrap(), g);
    }

    #[test]
    fn bad_graphs_rejected() {
        let err = DiGraph::new(
            ["a".to_string(), "a".to_string()],
            Vec::<EdgeSpec>::new(),
        )
        .unwrap_err();
        assert_eq!(err, GraphError::DuplicateVertex("a".to_string()));

        let err = DiGraph::new(["a".to_string()], [EdgeSpec::new("e", "a", "zz")]).unwrap_err();
        assert!(matches!(err, GraphError::UnknownVertex { .. }));
    }
}
