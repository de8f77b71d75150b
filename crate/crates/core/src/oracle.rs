//! Seeded random generators, independent brute-force oracles, and the
//! cross-check suites behind the `oracle` command and the acceptance
//! tests.
//!
//! Every suite is deterministic: case `i` of a run with seed `s` draws
//! from a splitmix64 stream seeded with `s + i`, so a failure reproduces
//! with `--seed s+i --cases 1`. Oracles here deliberately avoid the code
//! paths they check: cylinder partitions are re-derived by exact-cover
//! enumeration, cokernels by counting images modulo prime powers, the
//! dynamics deciders by exhaustive bounded path searches.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::digraph::{
    dual_graph, is_multitree, path_count_matrix, DiGraph, EdgeSpec, Path, UndirectedGraph,
};
use crate::dynamics::{
    has_unbounded_denominator_path, is_aperiodic, is_cofinal, lift_stabiliser_generator,
};
use crate::ktheory::{adjacency_matrix, k_theory, stabiliser_matrices, theta_induced};
use crate::lifttree::{build_lift_tree, verify_lift_invariants};
use crate::presentation::{
    dual_quotient, edge_ratio, rational_denominator, signed_index_ratio, validate,
    GraphOfGroupsZ, OmegaPair, QuotientPresentation, StabiliserClass,
};
use crate::setfamily::{
    decompose_intersection, is_finitely_aligned, saturate, transition_matrix,
    verify_prop_equivalence, PermAction, SetFamily,
};
use crate::zmatrix::{
    cokernel, kernel, rank_fraction_free, smith_normal_form, AbelianGroup, IntMatrix,
};

// ---------------------------------------------------------------------------
// deterministic rng
// ---------------------------------------------------------------------------

/// splitmix64; hand-rolled so seeded streams never change underneath us.
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn range_usize(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below((hi - lo + 1) as u64) as usize
    }

    /// Uniform nonzero integer with |value| <= bound.
    pub fn nonzero(&mut self, bound: u64) -> i64 {
        let magnitude = 1 + self.below(bound) as i64;
        if self.below(2) == 0 {
            magnitude
        } else {
            -magnitude
        }
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

// ---------------------------------------------------------------------------
// suite plumbing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub cases: usize,
    pub checks: u64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SuiteFailure {
    pub suite: &'static str,
    pub case_seed: u64,
    pub detail: String,
}

impl SuiteFailure {
    pub fn repro(&self) -> String {
        format!(
            "mtk oracle --suite {} --seed {} --cases 1",
            self.suite, self.case_seed
        )
    }
}

impl std::fmt::Display for SuiteFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "suite {} failed (case seed {}): {}\nreproduce with: {}",
            self.suite,
            self.case_seed,
            self.detail,
            self.repro()
        )
    }
}

macro_rules! ensure {
    ($ctx:expr, $cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(SuiteFailure {
                suite: $ctx.0,
                case_seed: $ctx.1,
                detail: format!($($msg)*),
            });
        }
    };
}

type Ctx = (&'static str, u64);

// ---------------------------------------------------------------------------
// random structures
// ---------------------------------------------------------------------------

fn vertex_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i:02}")).collect()
}

/// Random multitree grown edge by edge; a candidate edge is kept exactly
/// when it creates neither a cycle nor a second path between any ordered
/// pair, tracked incrementally on the exact path-count matrix.
pub fn random_multitree(rng: &mut Rng, max_vertices: usize) -> DiGraph {
    let n = rng.range_usize(1, max_vertices);
    let mut counts = vec![vec![0u64; n]; n];
    for (v, row) in counts.iter_mut().enumerate() {
        row[v] = 1;
    }
    let mut edges = Vec::new();
    let attempts = 3 * n;
    for _ in 0..attempts {
        let range = rng.below(n as u64) as usize;
        let source = rng.below(n as u64) as usize;
        // a new edge with this range and source adds, for each ordered
        // pair (a, b), counts[a][range] * counts[source][b] paths
        if counts[source][range] != 0 {
            continue; // would close a cycle
        }
        let ok = (0..n)
            .all(|a| (0..n).all(|b| counts[a][b] + counts[a][range] * counts[source][b] <= 1));
        if !ok {
            continue;
        }
        for a in 0..n {
            for b in 0..n {
                counts[a][b] += counts[a][range] * counts[source][b];
            }
        }
        edges.push(EdgeSpec::new(
            &format!("e{:02}", edges.len()),
            &format!("v{range:02}"),
            &format!("v{source:02}"),
        ));
    }
    DiGraph::new(vertex_names(n), edges).expect("generated multitree is well-formed")
}

/// Random digraph with every in-degree in `1..=max_indegree`.
pub fn random_no_source_digraph(
    rng: &mut Rng,
    max_vertices: usize,
    max_indegree: usize,
) -> DiGraph {
    let n = rng.range_usize(1, max_vertices);
    let mut edges = Vec::new();
    for v in 0..n {
        let indeg = rng.range_usize(1, max_indegree);
        for _ in 0..indeg {
            let source = rng.below(n as u64) as usize;
            edges.push(EdgeSpec::new(
                &format!("e{:02}", edges.len()),
                &format!("v{v:02}"),
                &format!("v{source:02}"),
            ));
        }
    }
    DiGraph::new(vertex_names(n), edges).expect("generated digraph is well-formed")
}

/// Random presentation over a no-source digraph; each weakly connected
/// component draws one stabiliser class, and infinite-cyclic edges get
/// nonzero omega pairs bounded by `max_omega`.
pub fn random_presentation(
    rng: &mut Rng,
    max_vertices: usize,
    max_indegree: usize,
    max_omega: u64,
    force_infinite_cyclic: bool,
) -> QuotientPresentation {
    let graph = random_no_source_digraph(rng, max_vertices, max_indegree);
    let mut classes = BTreeMap::new();
    for component in graph.weakly_connected_components() {
        let class = if force_infinite_cyclic || rng.chance(4, 5) {
            StabiliserClass::InfiniteCyclic
        } else {
            StabiliserClass::Trivial
        };
        for &v in &component {
            classes.insert(graph.vertex_name(v).to_string(), class);
        }
    }
    let mut omega = BTreeMap::new();
    for e in 0..graph.edge_count() {
        let class = classes[graph.vertex_name(graph.range_idx(e))];
        if class == StabiliserClass::InfiniteCyclic {
            omega.insert(
                graph.edge_name(e).to_string(),
                OmegaPair::new(rng.nonzero(max_omega), rng.nonzero(max_omega)),
            );
        }
    }
    QuotientPresentation::new(graph, classes, omega)
}

/// Random nonsingular graph-of-groups data: undirected multigraph with
/// every vertex of degree at least 2, one class per component, signed
/// indices on infinite-cyclic components.
#[allow(clippy::needless_range_loop)]
pub fn random_gog(rng: &mut Rng, max_vertices: usize, max_alpha: u64) -> GraphOfGroupsZ {
    let n = rng.range_usize(1, max_vertices);
    let mut plain = Vec::new(); // (range, source) of the positive orientation
    for v in 1..n {
        plain.push((rng.below(v as u64) as usize, v));
    }
    let extra = rng.range_usize(1, 3);
    for _ in 0..extra {
        let a = rng.below(n as u64) as usize;
        let b = rng.below(n as u64) as usize;
        plain.push((a, b));
    }
    // patch low-degree vertices with loops
    let mut degree = vec![0usize; n];
    for &(a, b) in &plain {
        degree[a] += 1;
        degree[b] += 1;
    }
    for v in 0..n {
        while degree[v] < 2 {
            plain.push((v, v));
            degree[v] += 2;
        }
    }

    let mut edges = Vec::new();
    let mut bar = BTreeMap::new();
    for (i, &(a, b)) in plain.iter().enumerate() {
        let fwd = format!("u{i:02}");
        let rev = format!("u{i:02}bar");
        edges.push(EdgeSpec::new(&fwd, &format!("v{a:02}"), &format!("v{b:02}")));
        edges.push(EdgeSpec::new(&rev, &format!("v{b:02}"), &format!("v{a:02}")));
        bar.insert(fwd.clone(), rev.clone());
        bar.insert(rev, fwd);
    }
    let graph =
        UndirectedGraph::new(vertex_names(n), edges, &bar).expect("generated graph well-formed");

    let mut classes = BTreeMap::new();
    let mut per_vertex_class = vec![StabiliserClass::Trivial; n];
    for component in graph.graph().weakly_connected_components() {
        let class = if rng.chance(1, 2) {
            StabiliserClass::InfiniteCyclic
        } else {
            StabiliserClass::Trivial
        };
        for &v in &component {
            classes.insert(graph.graph().vertex_name(v).to_string(), class);
            per_vertex_class[v] = class;
        }
    }
    let mut alpha = BTreeMap::new();
    for e in 0..graph.graph().edge_count() {
        let value = match per_vertex_class[graph.graph().range_idx(e)] {
            StabiliserClass::InfiniteCyclic => rng.nonzero(max_alpha),
            StabiliserClass::Trivial => 1,
        };
        alpha.insert(graph.graph().edge_name(e).to_string(), value);
    }
    GraphOfGroupsZ::new(graph, classes, alpha)
}

/// Random finite unrooted tree as an undirected graph (leaves make it
/// singular; duality itself only needs local finiteness).
pub fn random_undirected_tree(rng: &mut Rng, max_vertices: usize) -> UndirectedGraph {
    let n = rng.range_usize(2, max_vertices.max(2));
    let mut edges = Vec::new();
    let mut bar = BTreeMap::new();
    for v in 1..n {
        let parent = rng.below(v as u64) as usize;
        let fwd = format!("t{v:02}");
        let rev = format!("t{v:02}bar");
        edges.push(EdgeSpec::new(
            &fwd,
            &format!("v{parent:02}"),
            &format!("v{v:02}"),
        ));
        edges.push(EdgeSpec::new(
            &rev,
            &format!("v{v:02}"),
            &format!("v{parent:02}"),
        ));
        bar.insert(fwd.clone(), rev.clone());
        bar.insert(rev, fwd);
    }
    UndirectedGraph::new(vertex_names(n), edges, &bar).expect("tree is well-formed")
}

pub fn random_int_matrix(rng: &mut Rng, max_dim: usize, max_abs: u64) -> IntMatrix {
    let rows = rng.range_usize(1, max_dim);
    let cols = rng.range_usize(1, max_dim);
    let mut m = IntMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let value = rng.below(2 * max_abs + 1) as i64 - max_abs as i64;
            m.set(r, c, BigInt::from(value));
        }
    }
    m
}

/// Random family satisfying the spanning conditions by construction: one
/// private atom block per element of a random finite poset, members the
/// unions of blocks over down-sets. Down-sets intersect to down-sets, so
/// intersections are unions of members; private blocks keep the family
/// independent. Some cases double the poset and return the copy-swapping
/// atom permutation as the action.
#[allow(clippy::needless_range_loop)]
pub fn random_spanning_family(rng: &mut Rng) -> (SetFamily, PermAction) {
    let doubled = rng.chance(1, 3);
    let n = if doubled {
        rng.range_usize(1, 4)
    } else {
        rng.range_usize(1, 8)
    };
    // random strict order on 0..n via transitively closed upper-triangular bits
    let mut below = vec![vec![false; n]; n];
    for j in 0..n {
        for i in 0..j {
            if rng.chance(2, 5) {
                below[j][i] = true;
            }
        }
    }
    for j in 0..n {
        for i in (0..j).rev() {
            if below[j][i] {
                for k in 0..i {
                    if below[i][k] {
                        below[j][k] = true;
                    }
                }
            }
        }
    }
    let down_mask = |j: usize| -> u64 {
        let mut mask = 1u64 << j;
        for i in 0..j {
            if below[j][i] {
                mask |= 1 << i;
            }
        }
        mask
    };
    let copies = if doubled { 2 } else { 1 };
    let atoms = n * copies;
    let masks: Vec<u64> = (0..n * copies)
        .map(|idx| {
            let (copy, j) = (idx / n, idx % n);
            down_mask(j) << (copy * n)
        })
        .collect();
    let family = SetFamily::from_masks(atoms, &masks).expect("poset family is well-formed");
    let action = if doubled {
        let perm: Vec<usize> = (0..atoms).map(|a| (a + n) % atoms).collect();
        PermAction::new(&family, &[perm]).expect("copy swap preserves the family")
    } else {
        PermAction::identity()
    };
    (family, action)
}

// ---------------------------------------------------------------------------
// independent oracles
// ---------------------------------------------------------------------------

/// All partitions of `target` into the candidate masks, up to `limit`.
fn cover_partitions(target: u64, candidates: &[u64], limit: usize) -> Vec<Vec<usize>> {
    fn go(
        remaining: u64,
        candidates: &[u64],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if remaining == 0 {
            out.push(chosen.clone());
            return;
        }
        let lowest = remaining & remaining.wrapping_neg();
        for (i, &m) in candidates.iter().enumerate() {
            if m & lowest == 0 || m & !remaining != 0 {
                continue;
            }
            chosen.push(i);
            go(remaining & !m, candidates, chosen, out, limit);
            chosen.pop();
            if out.len() >= limit {
                return;
            }
        }
    }
    let mut out = Vec::new();
    go(target, candidates, &mut Vec::new(), &mut out, limit);
    out
}

/// Cokernel invariants by counting: free rank from fraction-free
/// elimination, torsion primes from the gcd of maximal minors (computed
/// by cofactor expansion), and per-prime exponent multisets from the
/// sizes of the column-span images modulo prime powers.
pub fn cokernel_enumeration_oracle(m: &IntMatrix) -> AbelianGroup {
    assert!(
        m.rows() <= 3 && m.cols() <= 3,
        "enumeration oracle is for tiny matrices"
    );
    let rank = rank_fraction_free(m);
    let free_rank = m.rows() - rank;
    if rank == 0 {
        return AbelianGroup::free(free_rank);
    }
    let divisor = maximal_minor_gcd(m, rank);
    if divisor <= 1 {
        return AbelianGroup::free(free_rank);
    }
    let mut torsion: Vec<BigUint> = Vec::new();
    for prime in prime_factors_u64(divisor) {
        let kmax = valuation_u64(divisor, prime);
        let mut counts = vec![0i64];
        for k in 1..=kmax {
            let modulus = prime.pow(k as u32);
            let image = image_size_mod(m, modulus);
            let quotient_log = (k as i64) * (m.rows() as i64) - valuation_u64(image, prime) as i64;
            counts.push(quotient_log);
        }
        let at_least: Vec<i64> = (1..=kmax as usize)
            .map(|k| counts[k] - counts[k - 1] - free_rank as i64)
            .collect();
        // conjugate partition: the j-th factor's exponent is the number
        // of levels still counting it
        let factors_here = *at_least.first().unwrap_or(&0);
        for j in 1..=factors_here {
            let exponent = at_least.iter().filter(|&&t| t >= j).count() as u32;
            torsion.push(BigUint::from(prime).pow(exponent));
        }
    }
    AbelianGroup::new(free_rank, torsion)
}

fn maximal_minor_gcd(m: &IntMatrix, rank: usize) -> u64 {
    let mut gcd = 0i64;
    for rows in subsets_of_size(m.rows(), rank) {
        for cols in subsets_of_size(m.cols(), rank) {
            let det = cofactor_det(m, &rows, &cols);
            gcd = gcd.gcd(&det);
        }
    }
    gcd.unsigned_abs()
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            go(i + 1, n, k, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn cofactor_det(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> i64 {
    let entry = |r: usize, c: usize| -> i64 {
        i64::try_from(m.get(rows[r], cols[c]).clone()).expect("tiny entries")
    };
    match rows.len() {
        0 => 1,
        1 => entry(0, 0),
        2 => entry(0, 0) * entry(1, 1) - entry(0, 1) * entry(1, 0),
        3 => {
            entry(0, 0) * (entry(1, 1) * entry(2, 2) - entry(1, 2) * entry(2, 1))
                - entry(0, 1) * (entry(1, 0) * entry(2, 2) - entry(1, 2) * entry(2, 0))
                + entry(0, 2) * (entry(1, 0) * entry(2, 1) - entry(1, 1) * entry(2, 0))
        }
        _ => unreachable!("oracle matrices are at most 3x3"),
    }
}

fn prime_factors_u64(mut n: u64) -> Vec<u64> {
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

fn valuation_u64(mut n: u64, p: u64) -> u64 {
    let mut v = 0;
    while n > 0 && n.is_multiple_of(p) {
        v += 1;
        n /= p;
    }
    v
}

/// Size of the subgroup of `(Z/modulus)^rows` spanned by the columns,
/// grown one generator at a time over a bitset of packed coordinates.
fn image_size_mod(m: &IntMatrix, modulus: u64) -> u64 {
    let rows = m.rows();
    let total: u64 = modulus.pow(rows as u32);
    assert!(total <= 1 << 24, "oracle modulus out of range");
    let encode =
        |v: &[u64]| -> u64 { v.iter().rev().fold(0u64, |acc, &x| acc * modulus + x) };
    let mut members = vec![0u64; (total as usize).div_ceil(64)];
    let contains =
        |bits: &[u64], idx: u64| bits[(idx / 64) as usize] >> (idx % 64) & 1 == 1;
    let set = |bits: &mut [u64], idx: u64| bits[(idx / 64) as usize] |= 1 << (idx % 64);

    set(&mut members, 0);
    let mut elements: Vec<Vec<u64>> = vec![vec![0; rows]];
    for c in 0..m.cols() {
        let generator: Vec<u64> = (0..rows)
            .map(|r| {
                let e = m.get(r, c).mod_floor(&BigInt::from(modulus));
                u64::try_from(e).expect("reduced entry fits")
            })
            .collect();
        // order of the generator over the current subgroup
        let mut step = generator.clone();
        let mut order = 1u64;
        while !contains(&members, encode(&step)) {
            for (s, g) in step.iter_mut().zip(&generator) {
                *s = (*s + *g) % modulus;
            }
            order += 1;
        }
        if order == 1 {
            continue;
        }
        let mut grown = Vec::with_capacity(elements.len() * order as usize);
        for base in &elements {
            grown.push(base.clone());
            let mut shifted = base.clone();
            for _ in 1..order {
                for (s, g) in shifted.iter_mut().zip(&generator) {
                    *s = (*s + *g) % modulus;
                }
                set(&mut members, encode(&shifted));
                grown.push(shifted.clone());
            }
        }
        elements = grown;
    }
    elements.len() as u64
}

/// All simple directed cycles as composable edge lists, each rooted at
/// its smallest vertex.
fn simple_cycles(g: &DiGraph) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for start in 0..g.vertex_count() {
        let mut path: Vec<usize> = Vec::new();
        let mut visited: BTreeSet<usize> = BTreeSet::new();
        dfs_cycles(g, start, start, &mut visited, &mut path, &mut out);
    }
    out
}

fn dfs_cycles(
    g: &DiGraph,
    start: usize,
    at: usize,
    visited: &mut BTreeSet<usize>,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    for &e in g.in_edges(at) {
        let next = g.source_idx(e);
        if next == start {
            let mut cycle = path.clone();
            cycle.push(e);
            out.push(cycle);
        } else if next > start && !visited.contains(&next) {
            visited.insert(next);
            path.push(e);
            dfs_cycles(g, start, next, visited, path, out);
            path.pop();
            visited.remove(&next);
        }
    }
}

/// Exhaustive cofinality: for every vertex and every simple cycle, some
/// cycle vertex must reach the vertex within the stated depth bound.
#[allow(clippy::needless_range_loop)]
pub fn cofinal_oracle(g: &DiGraph) -> bool {
    let cycles = simple_cycles(g);
    let depth_cap = 2 * g.vertex_count();
    let reach: Vec<Vec<bool>> = (0..g.vertex_count())
        .map(|w| bounded_forward_reach(g, w, depth_cap))
        .collect();
    for v in 0..g.vertex_count() {
        for cycle in &cycles {
            let hit = cycle
                .iter()
                .any(|&e| reach[g.range_idx(e)][v] || reach[g.source_idx(e)][v]);
            if !hit {
                return false;
            }
        }
    }
    true
}

fn bounded_forward_reach(g: &DiGraph, start: usize, depth_cap: usize) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    seen[start] = true;
    let mut frontier = vec![start];
    for _ in 0..depth_cap {
        let mut next = Vec::new();
        for &x in &frontier {
            for &e in g.out_edges(x) {
                let y = g.range_idx(e);
                if !seen[y] {
                    seen[y] = true;
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen
}

/// Exhaustive aperiodicity: every simple cycle passes a vertex of
/// in-degree at least 2.
pub fn aperiodic_oracle(g: &DiGraph) -> bool {
    simple_cycles(g)
        .iter()
        .all(|cycle| cycle.iter().any(|&e| g.in_edges(g.range_idx(e)).len() >= 2))
}

/// Exhaustive unboundedness over eventually periodic paths: for every
/// access path beta from `v` and closed walk eta at its end with
/// |beta| + |eta| <= budget, evaluate the reduced denominators of
/// q(prefix)/omega along beta eta^inf for `horizon` steps and report a
/// same-phase strict increase.
pub fn unbounded_denominator_oracle(
    p: &QuotientPresentation,
    v: &str,
    budget: usize,
    horizon: usize,
) -> bool {
    let g = p.graph();
    let start = g.vertex_idx(v).expect("oracle vertex exists");
    let mut beta: Vec<usize> = Vec::new();
    enumerate_beta(p, g, start, budget, horizon, &mut beta)
}

fn enumerate_beta(
    p: &QuotientPresentation,
    g: &DiGraph,
    at: usize,
    budget: usize,
    horizon: usize,
    beta: &mut Vec<usize>,
) -> bool {
    if beta.len() < budget {
        let mut eta: Vec<usize> = Vec::new();
        if enumerate_eta(p, g, at, at, budget - beta.len(), horizon, beta, &mut eta) {
            return true;
        }
    }
    if beta.len() + 1 < budget {
        for &e in g.in_edges(at) {
            beta.push(e);
            if enumerate_beta(p, g, g.source_idx(e), budget, horizon, beta) {
                return true;
            }
            beta.pop();
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn enumerate_eta(
    p: &QuotientPresentation,
    g: &DiGraph,
    start: usize,
    at: usize,
    budget: usize,
    horizon: usize,
    beta: &[usize],
    eta: &mut Vec<usize>,
) -> bool {
    if eta.len() >= budget {
        return false;
    }
    for &e in g.in_edges(at) {
        let next = g.source_idx(e);
        eta.push(e);
        if next == start && eventually_periodic_witness(p, beta, eta, horizon) {
            return true;
        }
        if enumerate_eta(p, g, start, next, budget, horizon, beta, eta) {
            return true;
        }
        eta.pop();
    }
    false
}

/// True iff the denominator sequence along beta eta^inf strictly exceeds
/// an earlier same-phase value within the horizon.
fn eventually_periodic_witness(
    p: &QuotientPresentation,
    beta: &[usize],
    eta: &[usize],
    horizon: usize,
) -> bool {
    let b = beta.len();
    let c = eta.len();
    let mut q = BigRational::one();
    let mut phase_min: Vec<Option<BigUint>> = vec![None; c];
    for k in 1..=horizon {
        let e = if k <= b {
            beta[k - 1]
        } else {
            eta[(k - b - 1) % c]
        };
        let omega_range = p.omega_of_idx(e).map_or(1, |om| om.range);
        let term = &q / BigRational::from(BigInt::from(omega_range));
        let denom = rational_denominator(&term);
        if k > b {
            let phase = (k - b - 1) % c;
            match &mut phase_min[phase] {
                Some(minimum) if denom > *minimum => return true,
                Some(minimum) => {
                    if denom < *minimum {
                        *minimum = denom;
                    }
                }
                slot @ None => *slot = Some(denom),
            }
        }
        q *= edge_ratio(p, e);
    }
    false
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

/// Cylinder decompositions on random multitrees: every decomposition is
/// re-certified by exhaustive exact cover (existence and uniqueness), and
/// the order-equivalence lemma plus 0/1 path counts are checked.
pub fn cylinder_suite(seed: u64, cases: usize) -> Result<SuiteReport, SuiteFailure> {
    let mut checks = 0u64;
    for case in 0..cases {
        let case_seed = seed.wrapping_add(case as u64);
        let ctx: Ctx = ("cylinders", case_seed);
        let mut rng = Rng::new(case_seed);
        let g = random_multitree(&mut rng, 12);
        ensure!(ctx, is_multitree(&g), "generator produced a non-multitree");

        let n = g.vertex_count();
        let counts = path_count_matrix(&g, n);
        for a in 0..n {
            for b in 0..n {
                ensure!(
                    ctx,
                    counts.get(a, b) <= &BigInt::one(),
                    "path count above 1 at ({a}, {b})"
                );
            }
        }

        let cylinders: Vec<u64> = (0..n)
            .map(|v| {
                g.backward_reach(v)
                    .iter()
                    .enumerate()
                    .filter(|&(_, &inside)| inside)
                    .fold(0u64, |acc, (i, _)| acc | 1 << i)
            })
            .collect();

        for v in 0..n {
            for w in 0..n {
                checks += 1;
                // order equivalence: w in Z(v) iff Z(w) subset of Z(v)
                let w_in = cylinders[v] & (1 << w) != 0;
                let contained = cylinders[w] & !cylinders[v] == 0;
                ensure!(ctx, w_in == contained, "order equivalence fails at ({v}, {w})");

                let decomposition = crate::digraph::decompose_cylinder_intersection(
                    &g,
                    g.vertex_name(v),
                    g.vertex_name(w),
                )
                .map_err(|e| SuiteFailure {
                    suite: ctx.0,
                    case_seed: ctx.1,
                    detail: format!("decomposition certificate failed: {e}"),
                })?;

                let target = cylinders[v] & cylinders[w];
                if target == 0 {
                    ensure!(
                        ctx,
                        decomposition.parts.is_empty(),
                        "nonempty parts for empty intersection"
                    );
                    continue;
                }
                let candidates: Vec<u64> = cylinders
                    .iter()
                    .copied()
                    .filter(|&c| c & !target == 0)
                    .collect();
                let covers = cover_partitions(target, &candidates, 3);
                ensure!(
                    ctx,
                    covers.len() == 1,
                    "expected exactly one partition of Z({}) ∩ Z({}), found {}",
                    g.vertex_name(v),
                    g.vertex_name(w),
                    covers.len()
                );
                let oracle_parts: BTreeSet<u64> =
                    covers[0].iter().map(|&i| candidates[i]).collect();
                let reported: BTreeSet<u64> = decomposition
                    .parts
                    .iter()
                    .map(|id| cylinders[g.vertex_idx(id).unwrap()])
                    .collect();
                ensure!(
                    ctx,
                    oracle_parts == reported,
                    "partition differs from the unique cover"
                );
            }
        }
    }
    Ok(SuiteReport {
        suite: "cylinders",
        cases,
        checks,
        notes: Vec::new(),
    })
}

/// Lift-tree isotropy against the index-ratio formula, plus the action
/// invariants of the tree itself.
pub fn isotropy_suite(seed: u64, cases: usize) -> Result<SuiteReport, SuiteFailure> {
    let mut checks = 0u64;
    for case in 0..cases {
        let case_seed = seed.wrapping_add(case as u64);
        let ctx: Ctx = ("isotropy", case_seed);
        let mut rng = Rng::new(case_seed);
        let p = sized_ic_presentation(&mut rng, 5, 20_000);

        for base in p.graph().vertex_ids() {
            let tree = build_lift_tree(&p, base, 5, 200_000).map_err(|e| SuiteFailure {
                suite: ctx.0,
                case_seed: ctx.1,
                detail: format!("tree build failed: {e}"),
            })?;
            let verify = verify_lift_invariants(&tree);
            ensure!(
                ctx,
                verify.ok(),
                "tree invariants violated: {:?}",
                verify.violations.first()
            );
            let mut formula_cache: BTreeMap<Vec<usize>, BigUint> = BTreeMap::new();
            for node in tree.nodes() {
                checks += 1;
                let path = tree.quotient_path(node).unwrap();
                let key = path.edge_indices().to_vec();
                let formula = formula_cache
                    .entry(key)
                    .or_insert_with(|| lift_stabiliser_generator(&p, &path).unwrap())
                    .clone();
                let brute = tree.brute_stabiliser(node).unwrap();
                ensure!(
                    ctx,
                    formula == brute,
                    "stabiliser mismatch at depth {} (formula {formula}, brute {brute})",
                    tree.node_depth(node).unwrap()
                );
                let q = signed_index_ratio(&p, &path).unwrap();
                let scaled = BigRational::from(BigInt::from(formula)) * q.as_rational();
                ensure!(ctx, scaled.is_integer(), "M * q is not an integer");
            }
        }
    }
    Ok(SuiteReport {
        suite: "isotropy",
        cases,
        checks,
        notes: Vec::new(),
    })
}

/// Infinite-cyclic presentation whose depth-`depth` lift trees stay under
/// the node budget, found by rejection on an exact weighted path count.
fn sized_ic_presentation(rng: &mut Rng, depth: usize, node_budget: u64) -> QuotientPresentation {
    loop {
        let p = random_presentation(rng, 4, 2, 4, true);
        let g = p.graph();
        let n = g.vertex_count();
        // weighted adjacency: total index into each vertex
        let mut weight = vec![vec![0u64; n]; n];
        for e in 0..g.edge_count() {
            weight[g.range_idx(e)][g.source_idx(e)] += p.index_at_range(e);
        }
        let mut worst = 0u64;
        for v in 0..n {
            let mut level = vec![0u64; n];
            level[v] = 1;
            let mut total = 1u64;
            for _ in 0..depth {
                let mut next = vec![0u64; n];
                for a in 0..n {
                    if level[a] == 0 {
                        continue;
                    }
                    for b in 0..n {
                        next[b] = next[b].saturating_add(level[a].saturating_mul(weight[a][b]));
                    }
                }
                total = total.saturating_add(next.iter().sum());
                level = next;
            }
            worst = worst.max(total);
        }
        if worst <= node_budget {
            return p;
        }
    }
}

/// Negative-cycle decider against the eventually-periodic brute force.
pub fn topfree_suite(seed: u64, cases: usize) -> Result<SuiteReport, SuiteFailure> {
    let mut checks = 0u64;
    for case in 0..cases {
        let case_seed = seed.wrapping_add(case as u64);
        let ctx: Ctx = ("topfree", case_seed);
        let mut rng = Rng::new(case_seed);
        let force_ic = !rng.chance(1, 5);
        let p = random_presentation(&mut rng, 4, 2, 4, force_ic);
        for v in p.graph().vertex_ids() {
            checks += 1;
            let decided = has_unbounded_denominator_path(&p, v).map_err(|e| SuiteFailure {
                suite: ctx.0,
                case_seed: ctx.1,
                detail: format!("decider failed: {e}"),
            })?;
            let brute = unbounded_denominator_oracle(&p, v, 8, 64);
            ensure!(
                ctx,
                decided == brute,
                "unbounded-denominator disagreement at {v:?}: decider {decided}, brute {brute}"
            );
        }
    }
    Ok(SuiteReport {
        suite: "topfree",
        cases,
        checks,
        notes: Vec::new(),
    })
}

/// Transition matrices, saturation, and the spanning-condition
/// equivalence on families satisfying them by construction.
pub fn setfamily_suite(seed: u64, cases: usize) -> Result<SuiteReport, SuiteFailure> {
    let mut checks = 0u64;
    let mut non_minimal = 0usize;
    for case in 0..cases {
        let case_seed = seed.wrapping_add(case as u64);
        let ctx: Ctx = ("setfamily", case_seed);
        let mut rng = Rng::new(case_seed);
        let (family, action) = loop {
            let (f, a) = random_spanning_family(&mut rng);
            if is_finitely_aligned(&f) {
                break (f, a);
            }
        };

        let (a, b) = verify_prop_equivalence(&family).map_err(|e| SuiteFailure {
            suite: ctx.0,
            case_seed: ctx.1,
            detail: format!("prop equivalence errored: {e}"),
        })?;
        ensure!(ctx, a && b, "constructed family fails the spanning conditions");

        let transition = transition_matrix(&family).map_err(|e| SuiteFailure {
            suite: ctx.0,
            case_seed: ctx.1,
            detail: format!("transition matrix rejected: {e}"),
        })?;
        checks += 1;
        let n = family.len();
        for i in 0..n {
            for j in 0..n {
                let entry = transition.matrix.get(i, j);
                ensure!(
                    ctx,
                    entry.is_zero() || entry.is_one(),
                    "transition entry not 0/1"
                );
            }
        }
        let order: Vec<usize> = transition
            .containment_order
            .iter()
            .map(|id| family.index_of(id).unwrap())
            .collect();
        for (pos_i, &i) in order.iter().enumerate() {
            ensure!(ctx, transition.matrix.get(i, i).is_one(), "diagonal not 1");
            for &j in order.iter().take(pos_i) {
                ensure!(
                    ctx,
                    transition.matrix.get(i, j).is_zero(),
                    "matrix not unipotent under containment order"
                );
            }
        }
        ensure!(ctx, transition.determinant.is_one(), "determinant not 1");

        // uniqueness of pairwise decompositions
        for i in family.index_ids() {
            for j in family.index_ids() {
                checks += 1;
                decompose_intersection(&family, i, j).map_err(|e| SuiteFailure {
                    suite: ctx.0,
                    case_seed: ctx.1,
                    detail: format!("decomposition uniqueness violated: {e}"),
                })?;
            }
        }

        // saturation of a random invariant base
        let mut base: BTreeSet<String> = family
            .index_ids()
            .iter()
            .filter(|_| rng.chance(1, 2))
            .cloned()
            .collect();
        loop {
            let mut grown = base.clone();
            for perm in action.index_generators() {
                for id in &base {
                    let i = family.index_of(id).unwrap();
                    grown.insert(family.index_ids()[perm[i]].clone());
                }
            }
            if grown == base {
                break;
            }
            base = grown;
        }
        let saturated = saturate(&family, &base, &action).map_err(|e| SuiteFailure {
            suite: ctx.0,
            case_seed: ctx.1,
            detail: format!("saturation failed: {e}"),
        })?;
        checks += 1;
        ensure!(
            ctx,
            saturated.is_superset(&base),
            "saturation lost base indices"
        );
        for perm in action.index_generators() {
            for id in &saturated {
                let i = family.index_of(id).unwrap();
                ensure!(
                    ctx,
                    saturated.contains(&family.index_ids()[perm[i]]),
                    "saturation not invariant"
                );
            }
        }
        ensure!(
            ctx,
            subfamily_aligned(&family, &saturated),
            "saturated subfamily not finitely aligned"
        );

        // minimality is only reported, never asserted
        if saturated.iter().any(|id| {
            if base.contains(id) {
                return false;
            }
            let mut smaller = saturated.clone();
            smaller.remove(id);
            let invariant = action.index_generators().iter().all(|perm| {
                smaller.iter().all(|x| {
                    let i = family.index_of(x).unwrap();
                    smaller.contains(&family.index_ids()[perm[i]])
                })
            });
            invariant && subfamily_aligned(&family, &smaller)
        }) {
            non_minimal += 1;
        }
    }
    let mut notes = Vec::new();
    if non_minimal > 0 {
        notes.push(format!(
            "saturation output was non-minimal in {non_minimal} of {cases} cases (reported, not asserted)"
        ));
    }
    Ok(SuiteReport {
        suite: "setfamily",
        cases,
        checks,
        notes,
    })
}

fn subfamily_aligned(family: &SetFamily, keep: &BTreeSet<String>) -> bool {
    if keep.is_empty() {
        return true;
    }
    let masks: Vec<u64> = keep
        .iter()
        .map(|id| family.mask(family.index_of(id).unwrap()))
        .collect();
    let sub = SetFamily::from_masks(family.universe().len(), &masks)
        .expect("subfamily of a valid family");
    is_finitely_aligned(&sub)
}

/// Smith normal form self-checks plus the counting oracle for cokernels.
pub fn linalg_suite(seed: u64, cases: usize) -> Result<SuiteReport, SuiteFailure> {
    let mut checks = 0u64;
    for case in 0..cases {
        let case_seed = seed.wrapping_add(case as u64);
        let ctx: Ctx = ("linalg", case_seed);
        let mut rng = Rng::new(case_seed);

        let m = random_int_matrix(&mut rng, 8, 10);
        let snf = smith_normal_form(&m);
        checks += 1;
        let product = snf.u.mul(&m).unwrap().mul(&snf.v).unwrap();
        ensure!(ctx, product == snf.s, "U*M*V != S");
        ensure!(ctx, snf.s.is_diagonal(), "S not diagonal");
        ensure!(
            ctx,
            snf.u.det().unwrap().abs() == BigInt::one(),
            "U not unimodular"
        );
        ensure!(
            ctx,
            snf.v.det().unwrap().abs() == BigInt::one(),
            "V not unimodular"
        );
        let diagonal = snf.s.diagonal();
        for pair in diagonal.windows(2) {
            ensure!(ctx, !pair[0].is_negative(), "negative diagonal entry");
            if pair[0].is_zero() {
                ensure!(ctx, pair[1].is_zero(), "zero before nonzero on the diagonal");
            } else {
                ensure!(
                    ctx,
                    (&pair[1] % &pair[0]).is_zero(),
                    "divisibility chain broken"
                );
            }
        }
        ensure!(
            ctx,
            snf.rank() == rank_fraction_free(&m),
            "rank via SNF disagrees with fraction-free elimination"
        );

        // a fresh tiny matrix for the counting oracle
        let tiny = random_int_matrix(&mut rng, 3, 3);
        checks += 1;
        let fast = cokernel(&tiny);
        let slow = cokernel_enumeration_oracle(&tiny);
        ensure!(
            ctx,
            fast == slow,
            "cokernel mismatch on {tiny}: snf route {fast}, counting oracle {slow}"
        );
    }
    Ok(SuiteReport {
        suite: "linalg",
        cases,
        checks,
        notes: Vec::new(),
    })
}

/// Graph deciders against exhaustive bounded-depth path oracles.
pub fn graph_decider_suite(seed: u64, cases: usize) -> Result<SuiteReport, SuiteFailure> {
    let mut checks = 0u64;
    for case in 0..cases {
        let case_seed = seed.wrapping_add(case as u64);
        let ctx: Ctx = ("graphs", case_seed);
        let mut rng = Rng::new(case_seed);
        let g = random_no_source_digraph(&mut rng, 7, 2);

        checks += 2;
        let cof = is_cofinal(&g).map_err(|e| SuiteFailure {
            suite: ctx.0,
            case_seed: ctx.1,
            detail: format!("cofinality decider errored: {e}"),
        })?;
        ensure!(
            ctx,
            cof == cofinal_oracle(&g),
            "cofinality disagreement (decider {cof})"
        );
        let ap = is_aperiodic(&g);
        ensure!(
            ctx,
            ap == aperiodic_oracle(&g),
            "aperiodicity disagreement (decider {ap})"
        );

        // monotonicity: a new edge into a cycle vertex never destroys
        // aperiodicity
        if ap {
            if let Some(cycle) = simple_cycles(&g).first() {
                let target = g.range_idx(cycle[0]);
                let source = rng.below(g.vertex_count() as u64) as usize;
                let mut edges = g.edge_specs();
                edges.push(EdgeSpec::new(
                    "extra",
                    g.vertex_name(target),
                    g.vertex_name(source),
                ));
                let bigger = DiGraph::new(g.vertex_ids().to_vec(), edges).unwrap();
                checks += 1;
                ensure!(
                    ctx,
                    is_aperiodic(&bigger),
                    "adding an entrance edge destroyed aperiodicity"
                );
            }
        }
    }
    Ok(SuiteReport {
        suite: "graphs",
        cases,
        checks,
        notes: Vec::new(),
    })
}

/// Cross-module identities: ratio multiplicativity, dual-quotient
/// certificates, theta/matrix consistency, K-theory invariances, and the
/// free-case formula against a directly assembled matrix.
pub fn crosscheck_suite(seed: u64, cases: usize) -> Result<SuiteReport, SuiteFailure> {
    let mut checks = 0u64;
    for case in 0..cases {
        let case_seed = seed.wrapping_add(case as u64);
        let ctx: Ctx = ("crosscheck", case_seed);
        let mut rng = Rng::new(case_seed);

        // ratio multiplicativity over random composable path pairs
        let p = random_presentation(&mut rng, 4, 3, 4, false);
        let g = p.graph();
        for _ in 0..4 {
            let start = rng.below(g.vertex_count() as u64) as usize;
            let first = random_path_from(&mut rng, g, start, 3);
            let middle = path_source(g, start, &first);
            let second = random_path_from(&mut rng, g, middle, 3);
            let mut joined = first.clone();
            joined.extend(&second);
            let q_first = ratio_of(&p, start, &first);
            let q_second = ratio_of(&p, middle, &second);
            let q_joined = ratio_of(&p, start, &joined);
            checks += 1;
            ensure!(
                ctx,
                q_joined == q_first.mul(&q_second),
                "signed index ratio not multiplicative"
            );
        }

        // theta assembly: stabiliser matrices equal the edge-by-edge sums
        let ic = random_presentation(&mut rng, 4, 3, 4, true);
        let (a0, a1) = stabiliser_matrices(&ic).unwrap();
        let gic = ic.graph();
        let n = gic.vertex_count();
        let mut b0 = IntMatrix::zeros(n, n);
        let mut b1 = IntMatrix::zeros(n, n);
        for e in 0..gic.edge_count() {
            let (m0, m1) = theta_induced(&ic, gic.edge_name(e)).unwrap();
            b0.add_assign_at(gic.source_idx(e), gic.range_idx(e), &BigInt::from(m0));
            b1.add_assign_at(gic.source_idx(e), gic.range_idx(e), &BigInt::from(m1));
        }
        checks += 1;
        ensure!(
            ctx,
            a0 == b0 && a1 == b1,
            "stabiliser matrices disagree with theta sums"
        );

        // unit indices: |A0| equals the transposed adjacency matrix
        let unit = unit_omega(&ic);
        let (u0, _) = stabiliser_matrices(&unit).unwrap();
        checks += 1;
        ensure!(
            ctx,
            u0 == adjacency_matrix(&unit).unwrap().transpose(),
            "unit-index A0 is not the transposed adjacency matrix"
        );

        // K-theory invariance under relabelling and generator changes
        let report = k_theory(&ic).unwrap();
        let relabelled = k_theory(&relabel(&ic, case_seed)).unwrap();
        checks += 1;
        ensure!(
            ctx,
            report.k0 == relabelled.k0 && report.k1 == relabelled.k1,
            "K-theory changed under relabelling"
        );
        let flipped = k_theory(&flip_edge_generators(&ic, &mut rng)).unwrap();
        checks += 1;
        ensure!(
            ctx,
            report.k0 == flipped.k0 && report.k1 == flipped.k1,
            "K-theory changed under edge generator flips"
        );
        let vertex_flipped = k_theory(&flip_vertex_generators(&ic, &mut rng)).unwrap();
        checks += 1;
        ensure!(
            ctx,
            report.k0 == vertex_flipped.k0 && report.k1 == vertex_flipped.k1,
            "K-theory changed under vertex generator flips"
        );

        // free case against a directly assembled matrix
        let free = QuotientPresentation::free(
            random_presentation(&mut rng, 4, 3, 1, false).graph().clone(),
        );
        let free_report = k_theory(&free).unwrap();
        let fg = free.graph();
        let mut direct = IntMatrix::identity(fg.vertex_count());
        let minus_one = BigInt::from(-1);
        for e in 0..fg.edge_count() {
            direct.add_assign_at(fg.source_idx(e), fg.range_idx(e), &minus_one);
        }
        checks += 1;
        ensure!(
            ctx,
            free_report.k0 == cokernel(&direct) && free_report.k1 == kernel(&direct),
            "free-case K-theory disagrees with the direct matrix route"
        );

        // dual quotient certificates
        let gog = random_gog(&mut rng, 3, 4);
        let dual = dual_quotient(&gog).unwrap();
        checks += 1;
        ensure!(ctx, validate(&dual).ok(), "dual quotient fails validation");
        let base = gog.graph().graph();
        let dg = dual.graph();
        for dv in 0..dg.vertex_count() {
            let e = base.edge_idx(dg.vertex_name(dv)).unwrap();
            let shared = base.source_idx(e);
            let expected: i64 = base
                .in_edges(shared)
                .iter()
                .map(|&f| gog.alpha_of_idx(f).abs())
                .sum::<i64>()
                - 1;
            let got: i64 = dg
                .in_edges(dv)
                .iter()
                .map(|&d| dual.omega_of_idx(d).map_or(1, |om| om.range.abs()))
                .sum();
            checks += 1;
            ensure!(
                ctx,
                got == expected,
                "dual in-degree identity fails at {} ({} vs {})",
                dg.vertex_name(dv),
                got,
                expected
            );
        }
        if dual.omega().is_empty() {
            checks += 1;
            ensure!(
                ctx,
                dg == &dual_graph(gog.graph()),
                "all-trivial dual quotient differs from the raw dual graph"
            );
        }

        // dual of a finite tree is a multitree
        let tree = random_undirected_tree(&mut rng, 6);
        checks += 1;
        ensure!(
            ctx,
            is_multitree(&dual_graph(&tree)),
            "dual of a tree is not a multitree"
        );
    }
    Ok(SuiteReport {
        suite: "crosscheck",
        cases,
        checks,
        notes: Vec::new(),
    })
}

fn random_path_from(rng: &mut Rng, g: &DiGraph, start: usize, max_len: usize) -> Vec<usize> {
    let mut edges = Vec::new();
    let mut at = start;
    let len = rng.range_usize(0, max_len);
    for _ in 0..len {
        let choices = g.in_edges(at);
        if choices.is_empty() {
            break;
        }
        let e = choices[rng.below(choices.len() as u64) as usize];
        edges.push(e);
        at = g.source_idx(e);
    }
    edges
}

fn path_source(g: &DiGraph, start: usize, edges: &[usize]) -> usize {
    edges.last().map_or(start, |&e| g.source_idx(e))
}

fn ratio_of(
    p: &QuotientPresentation,
    start: usize,
    edges: &[usize],
) -> crate::presentation::SignedRatio {
    let path = Path::from_indices(p.graph(), start, edges.to_vec()).unwrap();
    signed_index_ratio(p, &path).unwrap()
}

/// Same graph and signs, all index magnitudes forced to 1.
fn unit_omega(p: &QuotientPresentation) -> QuotientPresentation {
    let omega = p
        .omega()
        .iter()
        .map(|(e, om)| {
            (
                e.clone(),
                OmegaPair::new(om.range.signum(), om.source.signum()),
            )
        })
        .collect();
    QuotientPresentation::new(p.graph().clone(), p.classes().clone(), omega)
}

fn relabel(p: &QuotientPresentation, salt: u64) -> QuotientPresentation {
    let g = p.graph();
    let vname = |v: &str| format!("x{salt:x}-{v}");
    let ename = |e: &str| format!("y{salt:x}-{e}");
    let vertices: Vec<String> = g.vertex_ids().iter().map(|v| vname(v)).collect();
    let edges: Vec<EdgeSpec> = g
        .edge_specs()
        .into_iter()
        .map(|spec| EdgeSpec {
            id: ename(&spec.id),
            range: vname(&spec.range),
            source: vname(&spec.source),
        })
        .collect();
    let classes = p.classes().iter().map(|(v, c)| (vname(v), *c)).collect();
    let omega = p.omega().iter().map(|(e, om)| (ename(e), *om)).collect();
    QuotientPresentation::new(
        DiGraph::new(vertices, edges).expect("relabelled graph well-formed"),
        classes,
        omega,
    )
}

/// Simultaneously negating both entries of random omega pairs leaves the
/// stabiliser matrices unchanged.
fn flip_edge_generators(p: &QuotientPresentation, rng: &mut Rng) -> QuotientPresentation {
    let omega = p
        .omega()
        .iter()
        .map(|(e, om)| {
            if rng.chance(1, 2) {
                (e.clone(), OmegaPair::new(-om.range, -om.source))
            } else {
                (e.clone(), *om)
            }
        })
        .collect();
    QuotientPresentation::new(p.graph().clone(), p.classes().clone(), omega)
}

/// Replacing a vertex generator by its inverse flips the sign of every
/// omega entry referencing that vertex.
fn flip_vertex_generators(p: &QuotientPresentation, rng: &mut Rng) -> QuotientPresentation {
    let g = p.graph();
    let flips: Vec<bool> = (0..g.vertex_count()).map(|_| rng.chance(1, 2)).collect();
    let omega = p
        .omega()
        .iter()
        .map(|(e, om)| {
            let idx = g.edge_idx(e).unwrap();
            let mut om = *om;
            if flips[g.range_idx(idx)] {
                om.range = -om.range;
            }
            if flips[g.source_idx(idx)] {
                om.source = -om.source;
            }
            (e.clone(), om)
        })
        .collect();
    QuotientPresentation::new(g.clone(), p.classes().clone(), omega)
}

// ---------------------------------------------------------------------------
// the full run
// ---------------------------------------------------------------------------

pub const SUITES: &[&str] = &[
    "cylinders",
    "isotropy",
    "topfree",
    "setfamily",
    "linalg",
    "graphs",
    "crosscheck",
];

pub fn default_cases(suite: &str) -> usize {
    match suite {
        "cylinders" => 200,
        "isotropy" => 50,
        "topfree" => 100,
        "setfamily" => 100,
        "linalg" => 500,
        "graphs" => 200,
        "crosscheck" => 100,
        _ => 0,
    }
}

pub fn run_suite(suite: &str, seed: u64, cases: usize) -> Result<SuiteReport, SuiteFailure> {
    match suite {
        "cylinders" => cylinder_suite(seed, cases),
        "isotropy" => isotropy_suite(seed, cases),
        "topfree" => topfree_suite(seed, cases),
        "setfamily" => setfamily_suite(seed, cases),
        "linalg" => linalg_suite(seed, cases),
        "graphs" => graph_decider_suite(seed, cases),
        "crosscheck" => crosscheck_suite(seed, cases),
        other => Err(SuiteFailure {
            suite: "unknown",
            case_seed: seed,
            detail: format!("no suite named {other:?}; known: {SUITES:?}"),
        }),
    }
}

pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>, SuiteFailure> {
    SUITES
        .iter()
        .map(|suite| run_suite(suite, seed, default_cases(suite)))
        .collect()
}
