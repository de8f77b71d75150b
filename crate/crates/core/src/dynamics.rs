//! Decision procedures for the boundary action: minimality (cofinality of
//! the quotient graph), aperiodicity, the local-contractivity sufficient
//! condition, finite-path isotropy, and topological freeness for free and
//! infinite-cyclic stabilisers.
//!
//! Quantification over infinite paths collapses to finite searches: an
//! infinite path's visited set always contains a full cycle, cycles live
//! inside strongly connected components, and unbounded denominators along
//! a path force (for some prime p) a negative-weight cycle in the graph
//! weighted by p-adic valuations of the index pairs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::digraph::{DiGraph, Path};
use crate::presentation::{
    edge_ratio, rational_denominator, validate, QuotientPresentation, StabiliserClass,
    ValidationReport,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("graph has a source at vertex {0:?}")]
    HasSources(String),
    #[error("presentation failed validation: {0}")]
    InvalidPresentation(ValidationReport),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("path does not lie in the presentation graph")]
    ForeignPath,
}

/// Verdict of a decider whose criterion is only one-directional.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum TriState {
    Yes,
    No,
    Unknown(String),
}

impl TriState {
    pub fn is_yes(&self) -> bool {
        matches!(self, TriState::Yes)
    }
}

fn ensure_valid(p: &QuotientPresentation) -> Result<(), DynamicsError> {
    let report = validate(p);
    if report.ok() {
        Ok(())
    } else {
        Err(DynamicsError::InvalidPresentation(report))
    }
}

fn check_path(p: &QuotientPresentation, path: &Path) -> Result<(), DynamicsError> {
    let g = p.graph();
    if path.range() >= g.vertex_count() {
        return Err(DynamicsError::ForeignPath);
    }
    let mut at = path.range();
    for &e in path.edge_indices() {
        if e >= g.edge_count() || g.range_idx(e) != at {
            return Err(DynamicsError::ForeignPath);
        }
        at = g.source_idx(e);
    }
    Ok(())
}

/// A strongly connected component is cyclic iff it owns an edge; every
/// cycle lives inside one such component and every such component
/// contains cycles.
fn cyclic_sccs(g: &DiGraph) -> Vec<Vec<usize>> {
    g.strongly_connected_components()
        .into_iter()
        .filter(|scc| {
            let members: BTreeSet<usize> = scc.iter().copied().collect();
            (0..g.edge_count()).any(|e| {
                members.contains(&g.range_idx(e)) && members.contains(&g.source_idx(e))
            })
        })
        .collect()
}

/// Closed quotient path through `at`, staying inside `scc`. The edges
/// compose right to left with range(first) = source(last) = at.
fn cycle_through_vertex(g: &DiGraph, scc: &BTreeSet<usize>, at: usize) -> Option<Vec<usize>> {
    // BFS along range -> source arcs internal to the component; pred maps
    // each discovered vertex to the edge it was entered through.
    let mut pred: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([at]);
    while let Some(x) = queue.pop_front() {
        for &e in g.in_edges(x) {
            let y = g.source_idx(e);
            if !scc.contains(&y) {
                continue;
            }
            if y == at {
                let mut edges = vec![e];
                let mut cur = x;
                while cur != at {
                    let back = pred[&cur];
                    edges.push(back);
                    cur = g.range_idx(back);
                }
                edges.reverse();
                return Some(edges);
            }
            if let std::collections::btree_map::Entry::Vacant(slot) = pred.entry(y) {
                slot.insert(e);
                queue.push_back(y);
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CofinalityFailure {
    /// A cycle none of whose vertices has a path to `unreachable_vertex`.
    pub cycle: Vec<String>,
    pub unreachable_vertex: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CofinalityResult {
    pub cofinal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<CofinalityFailure>,
}

/// Cofinality of a finite no-source graph: for every vertex v and every
/// cycle, some cycle vertex has a path (source cycle vertex, range v).
/// Reduced to: every cyclic strongly connected component reaches every
/// vertex along source-to-range traversal.
pub fn cofinality(g: &DiGraph) -> Result<CofinalityResult, DynamicsError> {
    for v in 0..g.vertex_count() {
        if g.in_edges(v).is_empty() {
            return Err(DynamicsError::HasSources(g.vertex_name(v).to_string()));
        }
    }
    for scc in cyclic_sccs(g) {
        let reach = g.forward_reach(scc[0]);
        if let Some(missing) = (0..g.vertex_count()).find(|&v| !reach[v]) {
            let members: BTreeSet<usize> = scc.iter().copied().collect();
            let cycle = cycle_through_vertex(g, &members, scc[0])
                .expect("cyclic component contains a cycle");
            return Ok(CofinalityResult {
                cofinal: false,
                failure: Some(CofinalityFailure {
                    cycle: cycle.iter().map(|&e| g.edge_name(e).to_string()).collect(),
                    unreachable_vertex: g.vertex_name(missing).to_string(),
                }),
            });
        }
    }
    Ok(CofinalityResult {
        cofinal: true,
        failure: None,
    })
}

pub fn is_cofinal(g: &DiGraph) -> Result<bool, DynamicsError> {
    cofinality(g).map(|r| r.cofinal)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AperiodicityResult {
    pub aperiodic: bool,
    /// A cycle all of whose vertices have in-degree 1, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entranceless_cycle: Option<Vec<String>>,
}

/// Every cycle has an entrance iff no cycle survives in the subgraph
/// induced on in-degree-1 vertices.
pub fn aperiodicity(g: &DiGraph) -> AperiodicityResult {
    let inside: BTreeSet<usize> = (0..g.vertex_count())
        .filter(|&v| g.in_edges(v).len() == 1)
        .collect();
    // DFS colouring along range -> source arcs restricted to `inside`,
    // with the vertex path kept explicit so a back edge yields the cycle.
    const GRAY: u8 = 1;
    const DONE: u8 = 2;
    let mut colour: BTreeMap<usize, u8> = BTreeMap::new();
    for &start in &inside {
        if colour.contains_key(&start) {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        let mut vertex_path = vec![start];
        let mut edge_path: Vec<usize> = Vec::new();
        colour.insert(start, GRAY);
        while let Some(&(v, ei)) = stack.last() {
            let internal: Vec<usize> = g
                .in_edges(v)
                .iter()
                .copied()
                .filter(|&e| inside.contains(&g.source_idx(e)))
                .collect();
            if ei >= internal.len() {
                colour.insert(v, DONE);
                stack.pop();
                vertex_path.pop();
                edge_path.pop();
                continue;
            }
            stack.last_mut().unwrap().1 += 1;
            let e = internal[ei];
            let w = g.source_idx(e);
            match colour.get(&w) {
                Some(&GRAY) => {
                    let j = vertex_path.iter().position(|&x| x == w).unwrap();
                    let mut cycle: Vec<usize> = edge_path[j..].to_vec();
                    cycle.push(e);
                    return AperiodicityResult {
                        aperiodic: false,
                        entranceless_cycle: Some(
                            cycle.iter().map(|&t| g.edge_name(t).to_string()).collect(),
                        ),
                    };
                }
                Some(_) => {}
                None => {
                    colour.insert(w, GRAY);
                    stack.push((w, 0));
                    vertex_path.push(w);
                    edge_path.push(e);
                }
            }
        }
    }
    AperiodicityResult {
        aperiodic: true,
        entranceless_cycle: None,
    }
}

pub fn is_aperiodic(g: &DiGraph) -> bool {
    aperiodicity(g).aperiodic
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContractionReason {
    /// A cycle vertex of in-degree at least 2.
    Entrance { vertex: String },
    /// A cycle edge whose stabiliser index at the range is at least 2.
    HeavyEdge { edge: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractionWitness {
    pub cycle: Vec<String>,
    pub reason: ContractionReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalContractivityResult {
    pub verdict: TriState,
    /// Per-vertex witness cycle when the verdict is Yes.
    pub witnesses: BTreeMap<String, ContractionWitness>,
}

/// Sufficient condition for local contractivity: every vertex v admits a
/// cycle that has an entrance or carries an edge of index at least 2,
/// together with a path from the cycle's range to v. One-directional, so
/// a miss is Unknown, never No.
pub fn local_contractivity(
    p: &QuotientPresentation,
) -> Result<LocalContractivityResult, DynamicsError> {
    ensure_valid(p)?;
    let g = p.graph();

    // A witness cycle through vertex u exists iff u's component is cyclic
    // and owns an entrance vertex or a heavy internal edge; closed walks
    // inside the component can always be routed through the feature.
    struct GoodScc {
        members: BTreeSet<usize>,
        reach: Vec<bool>,
        feature: Feature,
    }
    enum Feature {
        Entrance(usize),
        HeavyEdge(usize),
    }
    let mut good = Vec::new();
    for scc in cyclic_sccs(g) {
        let members: BTreeSet<usize> = scc.iter().copied().collect();
        let feature = members
            .iter()
            .find(|&&x| g.in_edges(x).len() >= 2)
            .map(|&x| Feature::Entrance(x))
            .or_else(|| {
                (0..g.edge_count())
                    .find(|&e| {
                        members.contains(&g.range_idx(e))
                            && members.contains(&g.source_idx(e))
                            && p.index_at_range(e) >= 2
                    })
                    .map(Feature::HeavyEdge)
            });
        if let Some(feature) = feature {
            good.push(GoodScc {
                reach: g.forward_reach(scc[0]),
                members,
                feature,
            });
        }
    }

    let mut witnesses = BTreeMap::new();
    for v in 0..g.vertex_count() {
        let Some(scc) = good.iter().find(|scc| scc.reach[v]) else {
            return Ok(LocalContractivityResult {
                verdict: TriState::Unknown(format!(
                    "sufficient condition fails at vertex {:?}",
                    g.vertex_name(v)
                )),
                witnesses: BTreeMap::new(),
            });
        };
        let (cycle, reason) = match scc.feature {
            Feature::Entrance(x) => (
                cycle_through_vertex(g, &scc.members, x).expect("cyclic component"),
                ContractionReason::Entrance {
                    vertex: g.vertex_name(x).to_string(),
                },
            ),
            Feature::HeavyEdge(e) => {
                let mut cycle = vec![e];
                if g.source_idx(e) != g.range_idx(e) {
                    let tail = path_between(g, &scc.members, g.source_idx(e), g.range_idx(e))
                        .expect("strongly connected");
                    cycle.extend(tail);
                }
                (
                    cycle,
                    ContractionReason::HeavyEdge {
                        edge: g.edge_name(e).to_string(),
                    },
                )
            }
        };
        witnesses.insert(
            g.vertex_name(v).to_string(),
            ContractionWitness {
                cycle: cycle.iter().map(|&e| g.edge_name(e).to_string()).collect(),
                reason,
            },
        );
    }
    Ok(LocalContractivityResult {
        verdict: TriState::Yes,
        witnesses,
    })
}

pub fn local_contractivity_sufficient(
    p: &QuotientPresentation,
) -> Result<TriState, DynamicsError> {
    local_contractivity(p).map(|r| r.verdict)
}

/// Quotient path from `to`-side: edges e1..ek with r(e1) = from and
/// s(ek) = to, all endpoints inside `within`.
fn path_between(
    g: &DiGraph,
    within: &BTreeSet<usize>,
    from: usize,
    to: usize,
) -> Option<Vec<usize>> {
    let mut pred: BTreeMap<usize, (usize, usize)> = BTreeMap::new(); // vertex -> (edge, prev)
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut edges = Vec::new();
            let mut at = to;
            while at != from {
                let (e, prev) = pred[&at];
                edges.push(e);
                at = prev;
            }
            edges.reverse();
            return Some(edges);
        }
        for &e in g.in_edges(x) {
            let next = g.source_idx(e);
            if !within.contains(&next) || pred.contains_key(&next) || next == from {
                continue;
            }
            pred.insert(next, (e, x));
            queue.push_back(next);
        }
    }
    None
}

/// Minimal positive generator of the stabiliser of any lift of `path`:
/// the lcm over k of the reduced denominators of q(prefix)/omega_{e_k}.
pub fn lift_stabiliser_generator(
    p: &QuotientPresentation,
    path: &Path,
) -> Result<BigUint, DynamicsError> {
    ensure_valid(p)?;
    check_path(p, path)?;
    let mut m = BigUint::one();
    let mut prefix = BigRational::one();
    for &e in path.edge_indices() {
        let ratio = edge_ratio(p, e);
        let step = &prefix / BigRational::from(num_bigint::BigInt::from(omega_range(p, e)));
        m = m.lcm(&rational_denominator(&step));
        prefix *= ratio;
    }
    Ok(m)
}

fn omega_range(p: &QuotientPresentation, e: usize) -> i64 {
    p.omega_of_idx(e).map_or(1, |om| om.range)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnboundedWitness {
    pub prime: u64,
    /// Path from the witness cycle's range back up to the start vertex:
    /// edges of an access path with range = the queried vertex.
    pub access: Vec<String>,
    /// Cycle whose signed index ratio has negative p-adic valuation.
    pub cycle: Vec<String>,
}

/// Decides whether some infinite path with range `v` has unbounded
/// denominators, by searching, for each prime dividing an index, for a
/// negative-weight cycle reachable from `v` by range-to-source traversal
/// under the weight v_p(omega_source) - v_p(omega_range).
pub fn unbounded_denominator_witness(
    p: &QuotientPresentation,
    v: &str,
) -> Result<Option<UnboundedWitness>, DynamicsError> {
    ensure_valid(p)?;
    let g = p.graph();
    let start = g
        .vertex_idx(v)
        .map_err(|_| DynamicsError::UnknownVertex(v.to_string()))?;

    // reachable along range -> source arcs
    let mut reachable = vec![false; g.vertex_count()];
    reachable[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &e in g.in_edges(x) {
            let y = g.source_idx(e);
            if !reachable[y] {
                reachable[y] = true;
                queue.push_back(y);
            }
        }
    }
    let arcs: Vec<usize> = (0..g.edge_count())
        .filter(|&e| reachable[g.range_idx(e)])
        .collect();

    let mut primes = BTreeSet::new();
    for &e in &arcs {
        if let Some(om) = p.omega_of_idx(e) {
            primes.extend(prime_factors(om.range.unsigned_abs()));
            primes.extend(prime_factors(om.source.unsigned_abs()));
        }
    }

    for prime in primes {
        if let Some(cycle) = negative_cycle(g, &arcs, &reachable, prime, p) {
            let entry = g.range_idx(cycle[0]);
            let access = access_path(g, start, entry);
            return Ok(Some(UnboundedWitness {
                prime,
                access: access.iter().map(|&e| g.edge_name(e).to_string()).collect(),
                cycle: cycle.iter().map(|&e| g.edge_name(e).to_string()).collect(),
            }));
        }
    }
    Ok(None)
}

pub fn has_unbounded_denominator_path(
    p: &QuotientPresentation,
    v: &str,
) -> Result<bool, DynamicsError> {
    unbounded_denominator_witness(p, v).map(|w| w.is_some())
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn valuation(mut n: u64, p: u64) -> i64 {
    let mut v = 0;
    while n > 0 && n.is_multiple_of(p) {
        v += 1;
        n /= p;
    }
    v
}

fn arc_weight(p: &QuotientPresentation, e: usize, prime: u64) -> i64 {
    match p.omega_of_idx(e) {
        Some(om) => {
            valuation(om.source.unsigned_abs(), prime) - valuation(om.range.unsigned_abs(), prime)
        }
        None => 0,
    }
}

/// Bellman-Ford over the arcs r(e) -> s(e) restricted to `reachable`,
/// started from every reachable vertex at once. Returns the edges of a
/// negative cycle as a composable quotient path.
fn negative_cycle(
    g: &DiGraph,
    arcs: &[usize],
    reachable: &[bool],
    prime: u64,
    p: &QuotientPresentation,
) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let rounds = reachable.iter().filter(|&&b| b).count();
    let mut dist = vec![0i64; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut touched = None;
    for round in 0..=rounds {
        let mut changed = false;
        for &e in arcs {
            let u = g.range_idx(e);
            let w = g.source_idx(e);
            let cand = dist[u] + arc_weight(p, e, prime);
            if cand < dist[w] {
                dist[w] = cand;
                pred[w] = Some(e);
                changed = true;
                if round == rounds {
                    touched = Some(w);
                }
            }
        }
        if !changed {
            return None;
        }
    }
    let mut at = touched?;
    // step far enough back to be inside the cycle
    for _ in 0..rounds {
        at = g.range_idx(pred[at].expect("relaxed vertex has a predecessor"));
    }
    let mut cycle = Vec::new();
    let mut cur = at;
    loop {
        let e = pred[cur].expect("cycle vertex has a predecessor");
        cycle.push(e);
        cur = g.range_idx(e);
        if cur == at {
            break;
        }
    }
    cycle.reverse();
    debug_assert!(cycle.iter().map(|&e| arc_weight(p, e, prime)).sum::<i64>() < 0);
    Some(cycle)
}

/// Path with range `from` and source `to` (possibly empty), following
/// range -> source arcs.
fn access_path(g: &DiGraph, from: usize, to: usize) -> Vec<usize> {
    if from == to {
        return Vec::new();
    }
    let mut pred: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for &e in g.in_edges(x) {
            let y = g.source_idx(e);
            if y != from && !pred.contains_key(&y) {
                pred.insert(y, e);
                if y == to {
                    let mut edges = Vec::new();
                    let mut at = to;
                    while at != from {
                        let e = pred[&at];
                        edges.push(e);
                        at = g.range_idx(e);
                    }
                    edges.reverse();
                    return edges;
                }
                queue.push_back(y);
            }
        }
    }
    unreachable!("access path requested for unreachable vertex");
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentFreeness {
    pub vertices: Vec<String>,
    pub class: StabiliserClass,
    pub free: bool,
    /// Free components: the entranceless cycle when not aperiodic.
    /// Infinite-cyclic components: a vertex with no unbounded path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<String>,
    /// Infinite-cyclic components: one witness per vertex.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub witnesses: BTreeMap<String, UnboundedWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologicalFreenessResult {
    pub verdict: TriState,
    pub components: Vec<ComponentFreeness>,
}

/// Topological freeness of the boundary action. Free components reduce to
/// aperiodicity; infinite-cyclic components require every vertex to admit
/// an infinite path with unbounded denominators. The boundary is the
/// disjoint union of the component boundaries, so the global verdict is
/// the conjunction.
pub fn topological_freeness(
    p: &QuotientPresentation,
) -> Result<TopologicalFreenessResult, DynamicsError> {
    ensure_valid(p)?;
    let mut components = Vec::new();
    let mut all_free = true;
    for members in p.graph().weakly_connected_components() {
        let sub = p.restrict_to(&members);
        let g = sub.graph();
        let class = sub.class_of_idx(0).expect("validated");
        let component = match class {
            StabiliserClass::Trivial => {
                let ap = aperiodicity(g);
                ComponentFreeness {
                    vertices: g.vertex_ids().to_vec(),
                    class,
                    free: ap.aperiodic,
                    obstruction: ap.entranceless_cycle.map(|c| c.join(" ")),
                    witnesses: BTreeMap::new(),
                }
            }
            StabiliserClass::InfiniteCyclic => {
                let mut witnesses = BTreeMap::new();
                let mut obstruction = None;
                for v in g.vertex_ids() {
                    match unbounded_denominator_witness(&sub, v)? {
                        Some(w) => {
                            witnesses.insert(v.clone(), w);
                        }
                        None => {
                            obstruction = Some(v.clone());
                            break;
                        }
                    }
                }
                ComponentFreeness {
                    vertices: g.vertex_ids().to_vec(),
                    class,
                    free: obstruction.is_none(),
                    obstruction,
                    witnesses,
                }
            }
        };
        all_free &= component.free;
        components.push(component);
    }
    Ok(TopologicalFreenessResult {
        verdict: if all_free { TriState::Yes } else { TriState::No },
        components,
    })
}

pub fn is_topologically_free(p: &QuotientPresentation) -> Result<TriState, DynamicsError> {
    topological_freeness(p).map(|r| r.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::EdgeSpec;
    use crate::presentation::{bs_presentation, rose_presentation};

    fn digraph(vertices: &[&str], edges: &[(&str, &str, &str)]) -> DiGraph {
        DiGraph::new(
            vertices.iter().map(|s| s.to_string()),
            edges.iter().map(|(id, r, s)| EdgeSpec::new(id, r, s)),
        )
        .unwrap()
    }

    #[test]
    fn cofinal_rose() {
        for n in 1..=3 {
            assert!(is_cofinal(rose_presentation(n).graph()).unwrap());
        }
    }

    #[test]
    fn cofinal_rejects_sources() {
        let g = digraph(&["a", "b"], &[("e", "a", "b")]);
        assert_eq!(
            is_cofinal(&g).unwrap_err(),
            DynamicsError::HasSources("b".to_string())
        );
    }

    #[test]
    fn cofinal_two_loops_failure() {
        // loops at u and v, one edge with range v and source u:
        // the cycle at v cannot reach u
        let g = digraph(
            &["u", "v"],
            &[("lu", "u", "u"), ("lv", "v", "v"), ("e", "v", "u")],
        );
        let result = cofinality(&g).unwrap();
        assert!(!result.cofinal);
        let failure = result.failure.unwrap();
        assert_eq!(failure.unreachable_vertex, "u");
        assert_eq!(failure.cycle, vec!["lv"]);
    }

    #[test]
    fn cofinal_two_cycle_with_loop() {
        let g = digraph(
            &["a", "b"],
            &[("e", "a", "b"), ("f", "b", "a"), ("l", "a", "a")],
        );
        assert!(is_cofinal(&g).unwrap());
    }

    #[test]
    fn aperiodic_examples() {
        let single_loop = digraph(&["v"], &[("l", "v", "v")]);
        let r = aperiodicity(&single_loop);
        assert!(!r.aperiodic);
        assert_eq!(r.entranceless_cycle.unwrap(), vec!["l"]);

        assert!(is_aperiodic(rose_presentation(2).graph()));

        let g = digraph(
            &["a", "b"],
            &[("e", "a", "b"), ("f", "b", "a"), ("l", "a", "a")],
        );
        assert!(is_aperiodic(&g));
    }

    #[test]
    fn local_contractivity_examples() {
        assert!(local_contractivity_sufficient(&bs_presentation(2, 3))
            .unwrap()
            .is_yes());
        assert!(local_contractivity_sufficient(&rose_presentation(2))
            .unwrap()
            .is_yes());
        let verdict = local_contractivity_sufficient(&rose_presentation(1)).unwrap();
        assert!(matches!(verdict, TriState::Unknown(_)));
    }

    #[test]
    fn contractivity_witness_shape() {
        let r = local_contractivity(&bs_presentation(2, 3)).unwrap();
        let w = &r.witnesses["v"];
        assert_eq!(w.cycle, vec!["e"]);
        assert_eq!(
            w.reason,
            ContractionReason::HeavyEdge {
                edge: "e".to_string()
            }
        );
    }

    #[test]
    fn stabiliser_generator_examples() {
        let p = bs_presentation(2, 3);
        let g = p.graph();

        let single = Path::new(g, "v", &["e"]).unwrap();
        assert_eq!(
            lift_stabiliser_generator(&p, &single).unwrap(),
            BigUint::from(2u32)
        );

        let twice = Path::new(g, "v", &["e", "e"]).unwrap();
        assert_eq!(
            lift_stabiliser_generator(&p, &twice).unwrap(),
            BigUint::from(4u32)
        );

        let empty = Path::empty_at(g, "v").unwrap();
        assert_eq!(
            lift_stabiliser_generator(&p, &empty).unwrap(),
            BigUint::one()
        );
    }

    #[test]
    fn unbounded_denominators() {
        assert!(has_unbounded_denominator_path(&bs_presentation(2, 3), "v").unwrap());
        assert!(!has_unbounded_denominator_path(&bs_presentation(1, 4), "v").unwrap());
        assert!(!has_unbounded_denominator_path(&rose_presentation(2), "v").unwrap());
    }

    #[test]
    fn unbounded_witness_shape() {
        let w = unbounded_denominator_witness(&bs_presentation(2, 3), "v")
            .unwrap()
            .unwrap();
        assert_eq!(w.prime, 2);
        assert!(w.access.is_empty());
        assert_eq!(w.cycle, vec!["e"]);
    }

    #[test]
    fn topological_freeness_examples() {
        assert!(is_topologically_free(&rose_presentation(2))
            .unwrap()
            .is_yes());
        assert!(is_topologically_free(&bs_presentation(2, 3))
            .unwrap()
            .is_yes());
        assert_eq!(
            is_topologically_free(&bs_presentation(1, 2)).unwrap(),
            TriState::No
        );
        // a single free loop is an entranceless cycle
        assert_eq!(
            is_topologically_free(&rose_presentation(1)).unwrap(),
            TriState::No
        );
    }
}
