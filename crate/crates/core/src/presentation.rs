//! Quotient data of a group action: a finite quotient graph with a
//! stabiliser class per vertex and signed embedding indices per edge,
//! plus validation, signed index ratios, and the translation from
//! graph-of-groups data over trivial/infinite-cyclic groups to the
//! quotient presentation of the dual multitree action.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::{dual_edge_id, DiGraph, EdgeSpec, GraphError, GraphJson, Path, UndirectedGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PresentationError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid presentation: {0}")]
    Invalid(ValidationReport),
    #[error("invalid graph of groups: {0}")]
    InvalidGog(ValidationReport),
    #[error("path leaves through edge {0:?} which carries no index data")]
    MissingOmega(String),
}

/// Isomorphism class of a vertex (or edge) stabiliser. Only the two
/// classes with computable K-theory are representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabiliserClass {
    #[serde(rename = "trivial")]
    Trivial,
    #[serde(rename = "z")]
    InfiniteCyclic,
}

/// Signed indices of an edge stabiliser inside its endpoint stabilisers:
/// the generator of the edge group maps to `range * 1_{r(e)}` upstairs and
/// to `source * 1_{s(e)}` downstairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaPair {
    pub range: i64,
    pub source: i64,
}

impl OmegaPair {
    pub fn new(range: i64, source: i64) -> Self {
        OmegaPair { range, source }
    }
}

/// Finite quotient graph with per-vertex stabiliser classes and, on
/// infinite-cyclic components, per-edge signed indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientPresentation {
    graph: DiGraph,
    classes: BTreeMap<String, StabiliserClass>,
    omega: BTreeMap<String, OmegaPair>,
}

impl QuotientPresentation {
    pub fn new(
        graph: DiGraph,
        classes: BTreeMap<String, StabiliserClass>,
        omega: BTreeMap<String, OmegaPair>,
    ) -> Self {
        QuotientPresentation {
            graph,
            classes,
            omega,
        }
    }

    /// All-trivial presentation over a graph (a free action's quotient).
    pub fn free(graph: DiGraph) -> Self {
        let classes = graph
            .vertex_ids()
            .iter()
            .map(|v| (v.clone(), StabiliserClass::Trivial))
            .collect();
        QuotientPresentation {
            graph,
            classes,
            omega: BTreeMap::new(),
        }
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn class_of(&self, vertex: &str) -> Option<StabiliserClass> {
        self.classes.get(vertex).copied()
    }

    pub fn class_of_idx(&self, vertex: usize) -> Option<StabiliserClass> {
        self.classes.get(self.graph.vertex_name(vertex)).copied()
    }

    pub fn omega_of(&self, edge: &str) -> Option<OmegaPair> {
        self.omega.get(edge).copied()
    }

    pub fn omega_of_idx(&self, edge: usize) -> Option<OmegaPair> {
        self.omega.get(self.graph.edge_name(edge)).copied()
    }

    pub fn classes(&self) -> &BTreeMap<String, StabiliserClass> {
        &self.classes
    }

    pub fn omega(&self) -> &BTreeMap<String, OmegaPair> {
        &self.omega
    }

    /// Index `[G_{r(e)} : G_e]`, reading trivial stabilisers as index 1.
    pub fn index_at_range(&self, edge: usize) -> u64 {
        self.omega_of_idx(edge)
            .map_or(1, |om| om.range.unsigned_abs())
    }

    /// Restricts the presentation to one weakly connected component.
    pub fn restrict_to(&self, vertices: &[usize]) -> QuotientPresentation {
        let keep: Vec<bool> = {
            let mut keep = vec![false; self.graph.vertex_count()];
            for &v in vertices {
                keep[v] = true;
            }
            keep
        };
        let vertex_ids: Vec<String> = vertices
            .iter()
            .map(|&v| self.graph.vertex_name(v).to_string())
            .collect();
        let edges: Vec<EdgeSpec> = (0..self.graph.edge_count())
            .filter(|&e| keep[self.graph.range_idx(e)])
            .map(|e| EdgeSpec {
                id: self.graph.edge_name(e).to_string(),
                range: self.graph.vertex_name(self.graph.range_idx(e)).to_string(),
                source: self
                    .graph
                    .vertex_name(self.graph.source_idx(e))
                    .to_string(),
            })
            .collect();
        let graph = DiGraph::new(vertex_ids.iter().cloned(), edges.iter().cloned())
            .expect("restriction of a well-formed graph");
        let classes = self
            .classes
            .iter()
            .filter(|(v, _)| vertex_ids.contains(v))
            .map(|(v, c)| (v.clone(), *c))
            .collect();
        let omega = self
            .omega
            .iter()
            .filter(|(e, _)| edges.iter().any(|spec| &spec.id == *e))
            .map(|(e, om)| (e.clone(), *om))
            .collect();
        QuotientPresentation {
            graph,
            classes,
            omega,
        }
    }
}

/// One violated validation rule, naming the offending vertex or edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub subject: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, rule: &str, subject: &str, message: String) {
        self.violations.push(Violation {
            rule: rule.to_string(),
            subject: subject.to_string(),
            message,
        });
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{}] {}: {}", v.rule, v.subject, v.message)?;
        }
        Ok(())
    }
}

/// Checks every invariant of the quotient data. Violations are data, not
/// errors; downstream computations reject presentations whose report is
/// not ok.
pub fn validate(p: &QuotientPresentation) -> ValidationReport {
    let mut report = ValidationReport::default();
    let g = p.graph();

    for v in 0..g.vertex_count() {
        let name = g.vertex_name(v);
        if g.in_edges(v).is_empty() {
            report.push(
                "no-sources",
                name,
                "vertex has in-degree 0, but quotients of no-source graphs have no sources".into(),
            );
        }
        if p.class_of_idx(v).is_none() {
            report.push("class-total", name, "vertex has no stabiliser class".into());
        }
    }
    for v in p.classes.keys() {
        if g.vertex_idx(v).is_err() {
            report.push("class-total", v, "class assigned to unknown vertex".into());
        }
    }

    // An edge group has finite index in both endpoint groups, and finite
    // index in Z is infinite while in the trivial group it is trivial, so
    // classes are constant on weakly connected components.
    for component in g.weakly_connected_components() {
        let mut seen: Option<(StabiliserClass, usize)> = None;
        for &v in &component {
            let Some(class) = p.class_of_idx(v) else {
                continue;
            };
            match seen {
                None => seen = Some((class, v)),
                Some((first, fv)) => {
                    if first != class {
                        report.push(
                            "class-constant",
                            g.vertex_name(v),
                            format!(
                                "mixed stabiliser classes in component: {} is {:?}, {} is {:?}",
                                g.vertex_name(fv),
                                first,
                                g.vertex_name(v),
                                class
                            ),
                        );
                        break;
                    }
                }
            }
        }
    }

    for e in 0..g.edge_count() {
        let name = g.edge_name(e);
        let class = p.class_of_idx(g.range_idx(e));
        match (class, p.omega_of_idx(e)) {
            (Some(StabiliserClass::InfiniteCyclic), None) => {
                report.push(
                    "omega-total",
                    name,
                    "edge in an infinite-cyclic component has no omega pair".into(),
                );
            }
            (Some(StabiliserClass::InfiniteCyclic), Some(om)) => {
                if om.range == 0 || om.source == 0 {
                    report.push(
                        "omega-nonzero",
                        name,
                        format!("omega pair ({}, {}) has a zero entry", om.range, om.source),
                    );
                }
            }
            (Some(StabiliserClass::Trivial), Some(_)) => {
                report.push(
                    "omega-trivial",
                    name,
                    "edge in a trivial component carries omega data".into(),
                );
            }
            _ => {}
        }
    }
    for e in p.omega.keys() {
        if g.edge_idx(e).is_err() {
            report.push("omega-total", e, "omega assigned to unknown edge".into());
        }
    }

    report
}

pub fn validated(p: QuotientPresentation) -> Result<QuotientPresentation, PresentationError> {
    let report = validate(&p);
    if report.ok() {
        Ok(p)
    } else {
        Err(PresentationError::Invalid(report))
    }
}

/// Signed index ratio, stored reduced with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedRatio(BigRational);

impl SignedRatio {
    pub fn one() -> Self {
        SignedRatio(BigRational::one())
    }

    pub fn new(numerator: BigInt, denominator: BigInt) -> Self {
        assert!(!denominator.is_zero(), "denominator must be nonzero");
        assert!(
            !numerator.is_zero(),
            "signed index ratios are products of nonzero indices"
        );
        SignedRatio(BigRational::new(numerator, denominator))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator_signed(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn mul(&self, other: &SignedRatio) -> SignedRatio {
        SignedRatio(&self.0 * &other.0)
    }
}

impl std::fmt::Display for SignedRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Smallest positive integer denominator of a reduced rational.
pub fn denominator(r: &SignedRatio) -> BigUint {
    r.0.denom().magnitude().clone()
}

pub fn rational_denominator(q: &BigRational) -> BigUint {
    q.denom().magnitude().clone()
}

/// `q(path) = prod omega_{source side} / omega_{range side}` over the
/// path's edges; the empty product is 1. Trivial components read all
/// omegas as 1.
pub fn signed_index_ratio(
    p: &QuotientPresentation,
    path: &Path,
) -> Result<SignedRatio, PresentationError> {
    let mut q = BigRational::one();
    for &e in path.edge_indices() {
        q *= edge_ratio(p, e);
    }
    Ok(SignedRatio(q))
}

pub(crate) fn edge_ratio(p: &QuotientPresentation, edge: usize) -> BigRational {
    match p.omega_of_idx(edge) {
        Some(om) => BigRational::new(BigInt::from(om.source), BigInt::from(om.range)),
        None => BigRational::one(),
    }
}

/// Graph-of-groups data over trivial and infinite-cyclic groups: an
/// undirected graph with a class per vertex and, per oriented edge, the
/// signed index of the edge group in the group at that edge's range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphOfGroupsZ {
    graph: UndirectedGraph,
    classes: BTreeMap<String, StabiliserClass>,
    alpha: BTreeMap<String, i64>,
}

impl GraphOfGroupsZ {
    pub fn new(
        graph: UndirectedGraph,
        classes: BTreeMap<String, StabiliserClass>,
        alpha: BTreeMap<String, i64>,
    ) -> Self {
        GraphOfGroupsZ {
            graph,
            classes,
            alpha,
        }
    }

    pub fn graph(&self) -> &UndirectedGraph {
        &self.graph
    }

    pub fn class_of_idx(&self, vertex: usize) -> Option<StabiliserClass> {
        self.classes
            .get(self.graph.graph().vertex_name(vertex))
            .copied()
    }

    /// Signed index at an oriented edge; trivial components default to 1.
    pub fn alpha_of_idx(&self, edge: usize) -> i64 {
        self.alpha
            .get(self.graph.graph().edge_name(edge))
            .copied()
            .unwrap_or(1)
    }
}

pub fn validate_gog(gog: &GraphOfGroupsZ) -> ValidationReport {
    let mut report = ValidationReport::default();
    let g = gog.graph.graph();

    if !gog.graph.is_nonsingular() {
        for v in 0..g.vertex_count() {
            if g.in_edges(v).len() <= 1 {
                report.push(
                    "nonsingular",
                    g.vertex_name(v),
                    format!("vertex degree {} < 2", g.in_edges(v).len()),
                );
            }
        }
    }

    for v in 0..g.vertex_count() {
        if gog.class_of_idx(v).is_none() {
            report.push(
                "class-total",
                g.vertex_name(v),
                "vertex has no stabiliser class".into(),
            );
        }
    }

    for component in g.weakly_connected_components() {
        let classes: Vec<StabiliserClass> = component
            .iter()
            .filter_map(|&v| gog.class_of_idx(v))
            .collect();
        if classes.windows(2).any(|w| w[0] != w[1]) {
            report.push(
                "class-constant",
                g.vertex_name(component[0]),
                "mixed stabiliser classes in component".into(),
            );
        }
    }

    for e in 0..g.edge_count() {
        let name = g.edge_name(e);
        let class = gog.class_of_idx(g.range_idx(e));
        let alpha = gog.alpha.get(name).copied();
        match class {
            Some(StabiliserClass::Trivial) => {
                if let Some(a) = alpha {
                    if a.abs() != 1 {
                        report.push(
                            "alpha-trivial",
                            name,
                            format!("alpha = {a} on a trivial component must be +-1"),
                        );
                    }
                }
            }
            Some(StabiliserClass::InfiniteCyclic) => match alpha {
                None => report.push(
                    "alpha-total",
                    name,
                    "oriented edge in an infinite-cyclic component has no alpha".into(),
                ),
                Some(0) => report.push("alpha-nonzero", name, "alpha must be nonzero".into()),
                Some(_) => {}
            },
            None => {}
        }
    }

    report
}

/// Quotient presentation of the dual multitree's action, computed from
/// graph-of-groups data.
///
/// Dual vertices are the oriented edges with the edge groups as
/// stabilisers. For an ordered pair `(e, f)` with `s(e) = r(f)`, orbits
/// of 2-paths over a lift of the shared vertex `w` are the double cosets
/// `G_e \ G_w / G_f`; with `G_e = a Z` and `G_f = b Z` inside `G_w = Z`
/// (where `a = alpha(bar e)` and `b = alpha(f)`) that quotient is
/// `Z/(aZ + bZ)`, giving `gcd(|a|, |b|)` classes, each stabilised by
/// `lcm(|a|, |b|) Z`. Bookkeeping the dual generator as `L * 1_w` yields
/// the index pair `(L/a, L/b)`. The non-reduced pair `(e, bar e)` is a
/// single orbit, which removes one of the `|b|` classes in that case.
pub fn dual_quotient(gog: &GraphOfGroupsZ) -> Result<QuotientPresentation, PresentationError> {
    let report = validate_gog(gog);
    if !report.ok() {
        return Err(PresentationError::InvalidGog(report));
    }
    let g = gog.graph.graph();

    let dual_vertices: Vec<String> = g.edge_ids().map(str::to_string).collect();
    let mut classes = BTreeMap::new();
    for e in 0..g.edge_count() {
        let class = gog
            .class_of_idx(g.range_idx(e))
            .expect("validated: classes total");
        classes.insert(g.edge_name(e).to_string(), class);
    }

    let mut edges = Vec::new();
    let mut omega = BTreeMap::new();
    for e in 0..g.edge_count() {
        let shared = g.source_idx(e);
        let class = gog
            .class_of_idx(shared)
            .expect("validated: classes total");
        for &f in g.in_edges(shared) {
            let reduced = f != gog.graph.bar_idx(e);
            match class {
                StabiliserClass::Trivial => {
                    if reduced {
                        edges.push(EdgeSpec {
                            id: dual_edge_id(g.edge_name(e), g.edge_name(f), 0, 1),
                            range: g.edge_name(e).to_string(),
                            source: g.edge_name(f).to_string(),
                        });
                    }
                }
                StabiliserClass::InfiniteCyclic => {
                    let a = gog.alpha_of_idx(gog.graph.bar_idx(e));
                    let b = gog.alpha_of_idx(f);
                    let count = if reduced {
                        a.unsigned_abs().gcd(&b.unsigned_abs()) as usize
                    } else {
                        (b.unsigned_abs() - 1) as usize
                    };
                    let l = (a.unsigned_abs()).lcm(&b.unsigned_abs()) as i64;
                    let pair = OmegaPair::new(l / a, l / b);
                    for i in 0..count {
                        let id = dual_edge_id(g.edge_name(e), g.edge_name(f), i, count);
                        omega.insert(id.clone(), pair);
                        edges.push(EdgeSpec {
                            id,
                            range: g.edge_name(e).to_string(),
                            source: g.edge_name(f).to_string(),
                        });
                    }
                }
            }
        }
    }

    let graph = DiGraph::new(dual_vertices, edges)?;
    Ok(QuotientPresentation::new(graph, classes, omega))
}

// ---------------------------------------------------------------------------
// JSON schemas
//
// Presentation: graph schema plus
//   {"classes": {v: "trivial"|"z"}, "omega": {edgeId: [w_e, w_ebar]}}
// GraphOfGroupsZ: undirected graph schema plus classes and
//   {"alpha": {orientedEdgeId: int}}
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct PresentationJson {
    #[serde(flatten)]
    pub graph: GraphJson,
    pub classes: BTreeMap<String, StabiliserClass>,
    #[serde(default)]
    pub omega: BTreeMap<String, (i64, i64)>,
}

impl PresentationJson {
    pub fn to_presentation(&self) -> Result<QuotientPresentation, PresentationError> {
        let graph = self.graph.to_digraph()?;
        let omega = self
            .omega
            .iter()
            .map(|(e, &(r, s))| (e.clone(), OmegaPair::new(r, s)))
            .collect();
        Ok(QuotientPresentation::new(
            graph,
            self.classes.clone(),
            omega,
        ))
    }

    pub fn from_presentation(p: &QuotientPresentation) -> Self {
        PresentationJson {
            graph: GraphJson::from_digraph(p.graph()),
            classes: p.classes().clone(),
            omega: p
                .omega()
                .iter()
                .map(|(e, om)| (e.clone(), (om.range, om.source)))
                .collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphOfGroupsJson {
    #[serde(flatten)]
    pub graph: GraphJson,
    pub classes: BTreeMap<String, StabiliserClass>,
    #[serde(default)]
    pub alpha: BTreeMap<String, i64>,
}

impl GraphOfGroupsJson {
    pub fn to_gog(&self) -> Result<GraphOfGroupsZ, PresentationError> {
        let graph = self.graph.to_undirected()?;
        Ok(GraphOfGroupsZ::new(
            graph,
            self.classes.clone(),
            self.alpha.clone(),
        ))
    }
}

// Handy builders used across tests, the oracle suites, and shipped inputs.

/// Directed rose: one vertex, `loops` loop edges, free (trivial) action.
pub fn rose_presentation(loops: usize) -> QuotientPresentation {
    let edges = (0..loops).map(|i| EdgeSpec::new(&format!("l{i}"), "v", "v"));
    let graph = DiGraph::new(["v".to_string()], edges).expect("rose is well-formed");
    QuotientPresentation::free(graph)
}

/// One infinite-cyclic vertex with a single loop carrying `(m, n)`; the
/// quotient data of a Baumslag-Solitar action on a directed tree.
pub fn bs_presentation(m: i64, n: i64) -> QuotientPresentation {
    let graph = DiGraph::new(["v".to_string()], [EdgeSpec::new("e", "v", "v")])
        .expect("loop is well-formed");
    QuotientPresentation::new(
        graph,
        BTreeMap::from([("v".to_string(), StabiliserClass::InfiniteCyclic)]),
        BTreeMap::from([("e".to_string(), OmegaPair::new(m, n))]),
    )
}

/// Undirected rose with `loops` loops and trivial groups: free-group data.
pub fn free_group_gog(loops: usize) -> GraphOfGroupsZ {
    let mut edges = Vec::new();
    let mut bar = BTreeMap::new();
    for i in 0..loops {
        let a = format!("l{i}");
        let b = format!("l{i}bar");
        edges.push(EdgeSpec::new(&a, "v", "v"));
        edges.push(EdgeSpec::new(&b, "v", "v"));
        bar.insert(a.clone(), b.clone());
        bar.insert(b, a);
    }
    let graph =
        UndirectedGraph::new(["v".to_string()], edges, &bar).expect("rose is well-formed");
    let classes = BTreeMap::from([("v".to_string(), StabiliserClass::Trivial)]);
    GraphOfGroupsZ::new(graph, classes, BTreeMap::new())
}

/// One Z vertex with a single undirected loop of signed indices `(m, n)`:
/// Baumslag-Solitar graph-of-groups data.
pub fn bs_gog(m: i64, n: i64) -> GraphOfGroupsZ {
    let bar = BTreeMap::from([
        ("e".to_string(), "ebar".to_string()),
        ("ebar".to_string(), "e".to_string()),
    ]);
    let graph = UndirectedGraph::new(
        ["v".to_string()],
        [EdgeSpec::new("e", "v", "v"), EdgeSpec::new("ebar", "v", "v")],
        &bar,
    )
    .expect("loop is well-formed");
    let classes = BTreeMap::from([("v".to_string(), StabiliserClass::InfiniteCyclic)]);
    let alpha = BTreeMap::from([("e".to_string(), m), ("ebar".to_string(), n)]);
    GraphOfGroupsZ::new(graph, classes, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_rose_ok() {
        assert!(validate(&rose_presentation(2)).ok());
    }

    #[test]
    fn validate_flags_sources() {
        let graph = DiGraph::new(["v".to_string()], []).unwrap();
        let report = validate(&QuotientPresentation::free(graph));
        assert!(!report.ok());
        assert_eq!(report.violations[0].rule, "no-sources");
    }

    #[test]
    fn validate_flags_mixed_classes() {
        let graph = DiGraph::new(
            ["a".to_string(), "b".to_string()],
            [EdgeSpec::new("e", "a", "b"), EdgeSpec::new("f", "b", "a")],
        )
        .unwrap();
        let classes = BTreeMap::from([
            ("a".to_string(), StabiliserClass::Trivial),
            ("b".to_string(), StabiliserClass::InfiniteCyclic),
        ]);
        let report = validate(&QuotientPresentation::new(graph, classes, BTreeMap::new()));
        assert!(report
            .violations
            .iter()
            .any(|v| v.rule == "class-constant"));
    }

    #[test]
    fn ratio_examples() {
        let p = bs_presentation(2, 3);
        let g = p.graph();

        let empty = Path::empty_at(g, "v").unwrap();
        assert_eq!(signed_index_ratio(&p, &empty).unwrap(), SignedRatio::one());

        let single = Path::new(g, "v", &["e"]).unwrap();
        let q = signed_index_ratio(&p, &single).unwrap();
        assert_eq!(q, SignedRatio::new(BigInt::from(3), BigInt::from(2)));
        assert_eq!(denominator(&q), BigUint::from(2u32));
    }

    #[test]
    fn ratio_two_edges() {
        // loop edges at one vertex: (2,3) then (-1,5) gives 3/2 * 5/(-1) = -15/2
        let graph = DiGraph::new(
            ["v".to_string()],
            [EdgeSpec::new("e", "v", "v"), EdgeSpec::new("f", "v", "v")],
        )
        .unwrap();
        let p = QuotientPresentation::new(
            graph,
            BTreeMap::from([("v".to_string(), StabiliserClass::InfiniteCyclic)]),
            BTreeMap::from([
                ("e".to_string(), OmegaPair::new(2, 3)),
                ("f".to_string(), OmegaPair::new(-1, 5)),
            ]),
        );
        let path = Path::new(p.graph(), "v", &["e", "f"]).unwrap();
        let q = signed_index_ratio(&p, &path).unwrap();
        assert_eq!(q, SignedRatio::new(BigInt::from(-15), BigInt::from(2)));
        assert_eq!(denominator(&q), BigUint::from(2u32));
    }

    #[test]
    fn denominator_examples() {
        assert_eq!(
            denominator(&SignedRatio::new(BigInt::from(3), BigInt::from(1))),
            BigUint::from(1u32)
        );
        assert_eq!(
            denominator(&SignedRatio::new(BigInt::from(3), BigInt::from(4))),
            BigUint::from(4u32)
        );
    }

    #[test]
    fn q_multiplicative() {
        let p = bs_presentation(2, 3);
        let g = p.graph();
        let one = Path::new(g, "v", &["e"]).unwrap();
        let two = Path::new(g, "v", &["e", "e"]).unwrap();
        let q1 = signed_index_ratio(&p, &one).unwrap();
        let q2 = signed_index_ratio(&p, &two).unwrap();
        assert_eq!(q2, q1.mul(&q1));
    }

    #[test]
    fn dual_of_free_rose() {
        let dual = dual_quotient(&free_group_gog(2)).unwrap();
        assert!(validate(&dual).ok());
        let g = dual.graph();
        assert_eq!(g.vertex_count(), 4);
        for v in 0..4 {
            assert_eq!(g.in_edges(v).len(), 3);
        }
        // matches the raw dual graph edge for edge
        let raw = crate::digraph::dual_graph(free_group_gog(2).graph());
        assert_eq!(g, &raw);
    }

    #[test]
    fn dual_of_bs23() {
        let dual = dual_quotient(&bs_gog(2, 3)).unwrap();
        assert!(validate(&dual).ok());
        let g = dual.graph();
        assert_eq!(g.vertex_ids(), ["e".to_string(), "ebar".to_string()]);

        let describe: Vec<(String, String, String, OmegaPair)> = (0..g.edge_count())
            .map(|e| {
                (
                    g.edge_name(e).to_string(),
                    g.vertex_name(g.range_idx(e)).to_string(),
                    g.vertex_name(g.source_idx(e)).to_string(),
                    dual.omega_of_idx(e).unwrap(),
                )
            })
            .collect();
        let expect = vec![
            ("e.e", "e", "e", OmegaPair::new(2, 3)),
            ("e.ebar#0", "e", "ebar", OmegaPair::new(1, 1)),
            ("e.ebar#1", "e", "ebar", OmegaPair::new(1, 1)),
            ("ebar.e", "ebar", "e", OmegaPair::new(1, 1)),
            ("ebar.ebar", "ebar", "ebar", OmegaPair::new(3, 2)),
        ];
        let expect: Vec<(String, String, String, OmegaPair)> = expect
            .into_iter()
            .map(|(a, b, c, d)| (a.to_string(), b.to_string(), c.to_string(), d))
            .collect();
        assert_eq!(describe, expect);
    }

    /// Incoming index weights sum to (degree of the shared vertex in the
    /// covering tree) - 1 at every dual vertex.
    pub(crate) fn check_indegree_identity(gog: &GraphOfGroupsZ, dual: &QuotientPresentation) {
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
            assert_eq!(got, expected, "in-degree identity at {}", dg.vertex_name(dv));
        }
    }

    #[test]
    fn dual_of_two_vertex_gbs() {
        // two Z vertices joined by a (2,3)-indexed edge and a (1,1)-indexed
        // edge; expected multiplicities and index pairs computed by hand
        // from the double-coset arithmetic
        let bar = BTreeMap::from([
            ("p".to_string(), "pbar".to_string()),
            ("pbar".to_string(), "p".to_string()),
            ("q".to_string(), "qbar".to_string()),
            ("qbar".to_string(), "q".to_string()),
        ]);
        let graph = UndirectedGraph::new(
            ["u".to_string(), "w".to_string()],
            [
                EdgeSpec::new("p", "u", "w"),
                EdgeSpec::new("pbar", "w", "u"),
                EdgeSpec::new("q", "u", "w"),
                EdgeSpec::new("qbar", "w", "u"),
            ],
            &bar,
        )
        .unwrap();
        let classes = BTreeMap::from([
            ("u".to_string(), StabiliserClass::InfiniteCyclic),
            ("w".to_string(), StabiliserClass::InfiniteCyclic),
        ]);
        let alpha = BTreeMap::from([
            ("p".to_string(), 2i64),
            ("pbar".to_string(), 3),
            ("q".to_string(), 1),
            ("qbar".to_string(), 1),
        ]);
        let gog = GraphOfGroupsZ::new(graph, classes, alpha);
        let dual = dual_quotient(&gog).unwrap();
        assert!(validate(&dual).ok());

        let describe: Vec<(String, String, String, OmegaPair)> = (0..dual.graph().edge_count())
            .map(|e| {
                let g = dual.graph();
                (
                    g.edge_name(e).to_string(),
                    g.vertex_name(g.range_idx(e)).to_string(),
                    g.vertex_name(g.source_idx(e)).to_string(),
                    dual.omega_of_idx(e).unwrap(),
                )
            })
            .collect();
        let expect = [
            ("p.pbar#0", "p", "pbar", OmegaPair::new(1, 1)),
            ("p.pbar#1", "p", "pbar", OmegaPair::new(1, 1)),
            ("p.qbar", "p", "qbar", OmegaPair::new(1, 3)),
            ("pbar.p", "pbar", "p", OmegaPair::new(1, 1)),
            ("pbar.q", "pbar", "q", OmegaPair::new(1, 2)),
            ("q.pbar", "q", "pbar", OmegaPair::new(3, 1)),
            ("qbar.p", "qbar", "p", OmegaPair::new(2, 1)),
        ];
        let expect: Vec<(String, String, String, OmegaPair)> = expect
            .into_iter()
            .map(|(a, b, c, d)| (a.to_string(), b.to_string(), c.to_string(), d))
            .collect();
        assert_eq!(describe, expect);
        check_indegree_identity(&gog, &dual);
    }

    #[test]
    fn indegree_identity_fixed_cases() {
        for gog in [bs_gog(2, 3), bs_gog(1, 2), bs_gog(-2, 3), free_group_gog(3)] {
            let dual = dual_quotient(&gog).unwrap();
            check_indegree_identity(&gog, &dual);
        }
    }

    #[test]
    fn presentation_json_round_trip() {
        let p = bs_presentation(2, 3);
        let json = PresentationJson::from_presentation(&p);
        let text = serde_json::to_string(&json).unwrap();
        let back: PresentationJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_presentation().unwrap(), p);
    }
}
