//! Brute-force oracle: finite truncations of the covering multitree over
//! a base vertex, with the explicit digit/carry realization of the
//! integer action on lifts.
//!
//! Nodes are pairs (quotient path into the base, digit vector), one digit
//! per path edge drawn from `{0, .., |omega_e| - 1}`. The action of m on
//! a node rewrites digits level by level: at level i the incoming carry
//! is added to the digit, reduced mod |omega_{e_i}|, and the quotient is
//! pushed through the edge as `t * omega_{ebar_i}`. Its sole correctness
//! warrant is agreement with the isotropy formula and the corner
//! identity, both enforced as tests.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::digraph::Path;
use crate::presentation::{
    validate, QuotientPresentation, StabiliserClass, ValidationReport,
};

pub const DEFAULT_MAX_NODES: usize = 1_000_000;

static NEXT_TREE_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LiftTreeError {
    #[error("presentation failed validation: {0}")]
    InvalidPresentation(ValidationReport),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("size guard exceeded: more than {limit} nodes at depth {depth}")]
    SizeGuard { limit: usize, depth: usize },
    #[error("node does not belong to this tree")]
    ForeignNode,
    #[error("generator certification failed: {0}")]
    Uncertified(&'static str),
    #[error("the action on a trivial-stabiliser tree is defined only for m = 0")]
    TrivialAction,
}

/// Handle to a node of a specific tree; handles from other trees are
/// rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NodeId {
    tree: u64,
    index: usize,
}

#[derive(Debug, Clone)]
struct LiftNode {
    parent: Option<usize>,
    /// Quotient edge and digit labelling the step from the parent.
    edge: Option<usize>,
    digit: u64,
    depth: usize,
    /// Projected quotient vertex (the source of the node's path).
    vertex: usize,
    children: BTreeMap<(usize, u64), usize>,
}

/// Depth-d truncation of the covering multitree over a base vertex.
#[derive(Debug, Clone)]
pub struct LiftTree {
    tree_id: u64,
    presentation: QuotientPresentation,
    base: usize,
    depth: usize,
    nodes: Vec<LiftNode>,
}

pub fn build_lift_tree(
    p: &QuotientPresentation,
    base: &str,
    depth: usize,
    max_nodes: usize,
) -> Result<LiftTree, LiftTreeError> {
    let report = validate(p);
    if !report.ok() {
        return Err(LiftTreeError::InvalidPresentation(report));
    }
    let g = p.graph();
    let base_idx = g
        .vertex_idx(base)
        .map_err(|_| LiftTreeError::UnknownVertex(base.to_string()))?;

    let mut nodes = vec![LiftNode {
        parent: None,
        edge: None,
        digit: 0,
        depth: 0,
        vertex: base_idx,
        children: BTreeMap::new(),
    }];
    let mut frontier = vec![0usize];
    for level in 1..=depth {
        let mut next = Vec::new();
        for &node in &frontier {
            let u = nodes[node].vertex;
            for &e in g.in_edges(u) {
                let width = p.index_at_range(e);
                for digit in 0..width {
                    if nodes.len() >= max_nodes {
                        return Err(LiftTreeError::SizeGuard {
                            limit: max_nodes,
                            depth: level,
                        });
                    }
                    let idx = nodes.len();
                    nodes.push(LiftNode {
                        parent: Some(node),
                        edge: Some(e),
                        digit,
                        depth: level,
                        vertex: g.source_idx(e),
                        children: BTreeMap::new(),
                    });
                    nodes[node].children.insert((e, digit), idx);
                    next.push(idx);
                }
            }
        }
        frontier = next;
    }

    Ok(LiftTree {
        tree_id: NEXT_TREE_ID.fetch_add(1, Ordering::Relaxed),
        presentation: p.clone(),
        base: base_idx,
        depth,
        nodes,
    })
}

impl LiftTree {
    pub fn base(&self) -> &str {
        self.presentation.graph().vertex_name(self.base)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> NodeId {
        NodeId {
            tree: self.tree_id,
            index: 0,
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(|index| NodeId {
            tree: self.tree_id,
            index,
        })
    }

    fn check(&self, node: NodeId) -> Result<usize, LiftTreeError> {
        if node.tree != self.tree_id || node.index >= self.nodes.len() {
            return Err(LiftTreeError::ForeignNode);
        }
        Ok(node.index)
    }

    pub fn node_depth(&self, node: NodeId) -> Result<usize, LiftTreeError> {
        Ok(self.nodes[self.check(node)?].depth)
    }

    pub fn parent(&self, node: NodeId) -> Result<Option<NodeId>, LiftTreeError> {
        Ok(self.nodes[self.check(node)?].parent.map(|index| NodeId {
            tree: self.tree_id,
            index,
        }))
    }

    pub fn vertex_name(&self, node: NodeId) -> Result<&str, LiftTreeError> {
        let idx = self.check(node)?;
        Ok(self
            .presentation
            .graph()
            .vertex_name(self.nodes[idx].vertex))
    }

    /// (quotient edge, digit) labels from the root down to the node.
    pub fn address(&self, node: NodeId) -> Result<Vec<(usize, u64)>, LiftTreeError> {
        let mut idx = self.check(node)?;
        let mut out = Vec::new();
        while let (Some(parent), Some(edge)) = (self.nodes[idx].parent, self.nodes[idx].edge) {
            out.push((edge, self.nodes[idx].digit));
            idx = parent;
        }
        out.reverse();
        Ok(out)
    }

    pub fn quotient_path(&self, node: NodeId) -> Result<Path, LiftTreeError> {
        let address = self.address(node)?;
        let edges = address.iter().map(|&(e, _)| e).collect();
        Path::from_indices(self.presentation.graph(), self.base, edges)
            .map_err(|_| LiftTreeError::Uncertified("node address is not a composable path"))
    }

    fn node_at(&self, address: &[(usize, u64)]) -> Option<usize> {
        let mut at = 0usize;
        for key in address {
            at = *self.nodes[at].children.get(key)?;
        }
        Some(at)
    }

    /// Acts by `m` in the base vertex's stabiliser. Depth-preserving tree
    /// automorphism over the identity on quotient paths: digits update by
    /// the carry recursion.
    pub fn act(&self, m: &BigInt, node: NodeId) -> Result<NodeId, LiftTreeError> {
        let idx = self.check(node)?;
        if self.presentation.class_of_idx(self.base) == Some(StabiliserClass::Trivial) {
            if m.is_zero() {
                return Ok(node);
            }
            return Err(LiftTreeError::TrivialAction);
        }
        let mut address = self.address(NodeId {
            tree: self.tree_id,
            index: idx,
        })?;
        let mut carry = m.clone();
        for (e, digit) in address.iter_mut() {
            let om = self
                .presentation
                .omega_of_idx(*e)
                .expect("infinite-cyclic component edges carry omega");
            let width = BigInt::from(om.range.unsigned_abs());
            let shifted = &carry + BigInt::from(*digit);
            let new_digit = shifted.mod_floor(&width);
            let quotient = (&shifted - &new_digit) / BigInt::from(om.range);
            carry = quotient * BigInt::from(om.source);
            *digit = u64::try_from(new_digit).expect("digit fits its width");
        }
        let index = self
            .node_at(&address)
            .expect("digit rewrite stays inside the tree");
        Ok(NodeId {
            tree: self.tree_id,
            index,
        })
    }

    /// Minimal positive `M` whose action fixes the node, computed by the
    /// level-by-level congruence recursion on integers and then certified
    /// through the action itself: `M` fixes the node and no `M / prime`
    /// does.
    pub fn brute_stabiliser(&self, node: NodeId) -> Result<BigUint, LiftTreeError> {
        let idx = self.check(node)?;
        if self.presentation.class_of_idx(self.base) == Some(StabiliserClass::Trivial) {
            return Err(LiftTreeError::TrivialAction);
        }
        let address = self.address(NodeId {
            tree: self.tree_id,
            index: idx,
        })?;

        // scale the candidate until every level's congruence holds; carry
        // tracks the level value of the current candidate
        let mut m = BigInt::one();
        let mut carry = BigInt::one();
        for &(e, _) in &address {
            let om = self
                .presentation
                .omega_of_idx(e)
                .expect("infinite-cyclic component edges carry omega");
            let width = BigInt::from(om.range.unsigned_abs());
            let scale = &width / carry.gcd(&width);
            m *= &scale;
            carry *= &scale;
            carry = carry / BigInt::from(om.range) * BigInt::from(om.source);
        }

        // certify before reporting: the candidate must fix the node and
        // no proper divisor may
        if self.act(&m, node)? != node {
            return Err(LiftTreeError::Uncertified("candidate does not fix the node"));
        }
        let magnitude = m.magnitude().clone();
        for prime in distinct_prime_factors(&magnitude) {
            let smaller = BigInt::from(&magnitude / &prime);
            if self.act(&smaller, node)? == node {
                return Err(LiftTreeError::Uncertified("candidate is not minimal"));
            }
        }
        Ok(magnitude)
    }

    /// DOT rendering of small trees, nodes labelled by path and digits.
    pub fn to_dot(&self) -> String {
        let g = self.presentation.graph();
        let mut out = String::from("digraph lifttree {\n  rankdir = BT;\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let label = match node.edge {
                None => format!("{} (root)", g.vertex_name(node.vertex)),
                Some(e) => format!(
                    "{} via {}:{}",
                    g.vertex_name(node.vertex),
                    g.edge_name(e),
                    node.digit
                ),
            };
            out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some(parent) = node.parent {
                out.push_str(&format!("  n{i} -> n{parent};\n"));
            }
        }
        out.push_str("}\n");
        out
    }

    #[cfg(test)]
    pub(crate) fn corrupt_digit_for_test(&mut self, index: usize, digit: u64) {
        self.nodes[index].digit = digit;
    }
}

fn distinct_prime_factors(n: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut n = n.clone();
    let mut p = BigUint::from(2u32);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            out.push(p.clone());
            while (&n % &p).is_zero() {
                n /= &p;
            }
        }
        p += 1u32;
    }
    if n > BigUint::one() {
        out.push(n);
    }
    out
}

/// One violated structural check, with the witness node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftViolation {
    pub check: String,
    pub node: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LiftVerifyReport {
    pub violations: Vec<LiftViolation>,
    pub checks_run: usize,
}

impl LiftVerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Structural verification: digit bounds, lift counts against the index
/// product, interior in-degrees against the row sums, and (on
/// infinite-cyclic trees) compatibility of the action with projection,
/// parent links, and inversion.
pub fn verify_lift_invariants(t: &LiftTree) -> LiftVerifyReport {
    let mut report = LiftVerifyReport::default();
    let p = &t.presentation;
    let g = p.graph();

    let push = |check: &str, node: usize, message: String, report: &mut LiftVerifyReport| {
        report.violations.push(LiftViolation {
            check: check.to_string(),
            node,
            message,
        });
    };

    // digit bounds
    for (i, node) in t.nodes.iter().enumerate() {
        report.checks_run += 1;
        if let Some(e) = node.edge {
            let width = p.index_at_range(e);
            if node.digit >= width {
                push(
                    "digit-bound",
                    i,
                    format!("digit {} out of range for width {}", node.digit, width),
                    &mut report,
                );
            }
        }
    }

    // lift counts per quotient path
    let mut by_path: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for id in t.nodes() {
        let edges: Vec<usize> = t.address(id).unwrap().iter().map(|&(e, _)| e).collect();
        *by_path.entry(edges).or_insert(0) += 1;
    }
    for (path, count) in &by_path {
        report.checks_run += 1;
        let expected: u64 = path.iter().map(|&e| p.index_at_range(e)).product();
        if *count as u64 != expected {
            push(
                "lift-count",
                0,
                format!(
                    "path [{}] has {} lifts, expected {}",
                    path.iter()
                        .map(|&e| g.edge_name(e))
                        .collect::<Vec<_>>()
                        .join(" "),
                    count,
                    expected
                ),
                &mut report,
            );
        }
    }

    // interior in-degrees
    for (i, node) in t.nodes.iter().enumerate() {
        if node.depth >= t.depth {
            continue;
        }
        report.checks_run += 1;
        let expected: u64 = g
            .in_edges(node.vertex)
            .iter()
            .map(|&e| p.index_at_range(e))
            .sum();
        if node.children.len() as u64 != expected {
            push(
                "in-degree",
                i,
                format!(
                    "interior node has {} children, expected {}",
                    node.children.len(),
                    expected
                ),
                &mut report,
            );
        }
    }

    // action checks on infinite-cyclic trees
    if p.class_of_idx(t.base) == Some(StabiliserClass::InfiniteCyclic) {
        for id in t.nodes() {
            for m in 1i64..=3 {
                report.checks_run += 1;
                let m = BigInt::from(m);
                let image = match t.act(&m, id) {
                    Ok(image) => image,
                    Err(err) => {
                        push("action", id.index, format!("action failed: {err}"), &mut report);
                        continue;
                    }
                };
                if t.node_depth(image).unwrap() != t.node_depth(id).unwrap()
                    || t.vertex_name(image).unwrap() != t.vertex_name(id).unwrap()
                {
                    push(
                        "action-projection",
                        id.index,
                        "action moved the node off its quotient fibre".into(),
                        &mut report,
                    );
                }
                let parent_then_act = t
                    .parent(id)
                    .unwrap()
                    .map(|parent| t.act(&m, parent).unwrap());
                let act_then_parent = t.parent(image).unwrap();
                if parent_then_act != act_then_parent {
                    push(
                        "action-parent",
                        id.index,
                        "action does not commute with parent links".into(),
                        &mut report,
                    );
                }
                let back = t.act(&(-&m), image).unwrap();
                if back != id {
                    push(
                        "action-inverse",
                        id.index,
                        "acting by m then -m is not the identity".into(),
                        &mut report,
                    );
                }
            }
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::lift_stabiliser_generator;
    use crate::presentation::{bs_presentation, rose_presentation};

    #[test]
    fn trivial_rose_tree_counts() {
        let p = rose_presentation(2);
        let t = build_lift_tree(&p, "v", 3, DEFAULT_MAX_NODES).unwrap();
        // 2^k paths of length k, one lift each
        assert_eq!(t.node_count(), 1 + 2 + 4 + 8);
        assert!(verify_lift_invariants(&t).ok());
    }

    #[test]
    fn bs23_tree_counts() {
        let p = bs_presentation(2, 3);
        let t = build_lift_tree(&p, "v", 2, DEFAULT_MAX_NODES).unwrap();
        // one quotient path per length; 2 lifts at depth 1, 4 at depth 2
        assert_eq!(t.node_count(), 1 + 2 + 4);
        assert!(verify_lift_invariants(&t).ok());
    }

    #[test]
    fn depth_zero_tree() {
        let p = bs_presentation(2, 3);
        let t = build_lift_tree(&p, "v", 0, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.brute_stabiliser(t.root()).unwrap(), BigUint::one());
    }

    #[test]
    fn size_guard_trips() {
        let p = rose_presentation(2);
        let err = build_lift_tree(&p, "v", 10, 50).unwrap_err();
        assert!(matches!(err, LiftTreeError::SizeGuard { limit: 50, .. }));
    }

    fn node_with_digits(t: &LiftTree, digits: &[u64]) -> NodeId {
        t.nodes()
            .find(|&id| {
                let address = t.address(id).unwrap();
                address.len() == digits.len()
                    && address.iter().map(|&(_, d)| d).collect::<Vec<_>>() == digits
            })
            .unwrap()
    }

    #[test]
    fn action_carry_example() {
        let p = bs_presentation(2, 3);
        let t = build_lift_tree(&p, "v", 1, DEFAULT_MAX_NODES).unwrap();
        // node (e, c = 1), m = 1: digit wraps to 0 and the carry is 3
        let start = node_with_digits(&t, &[1]);
        let image = t.act(&BigInt::from(1), start).unwrap();
        assert_eq!(image, node_with_digits(&t, &[0]));

        // m = |omega_e| = 2 on (e, c = 0) stays put: the carry 3 dies at depth 1
        let zero = node_with_digits(&t, &[0]);
        assert_eq!(t.act(&BigInt::from(2), zero).unwrap(), zero);

        // the carry matters at depth 2: acting by 2 on (e e, (0, 0))
        // shifts the second digit by 3 mod 2
        let t2 = build_lift_tree(&p, "v", 2, DEFAULT_MAX_NODES).unwrap();
        let deep = node_with_digits(&t2, &[0, 0]);
        let moved = t2.act(&BigInt::from(2), deep).unwrap();
        assert_eq!(
            t2.address(moved)
                .unwrap()
                .iter()
                .map(|&(_, d)| d)
                .collect::<Vec<_>>(),
            vec![0, 1]
        );
    }

    #[test]
    fn action_identity_at_zero() {
        let p = bs_presentation(2, 3);
        let t = build_lift_tree(&p, "v", 2, DEFAULT_MAX_NODES).unwrap();
        for id in t.nodes() {
            assert_eq!(t.act(&BigInt::zero(), id).unwrap(), id);
        }
    }

    #[test]
    fn brute_stabiliser_examples() {
        let p = bs_presentation(2, 3);
        let t = build_lift_tree(&p, "v", 2, DEFAULT_MAX_NODES).unwrap();
        for id in t.nodes() {
            let expected = match t.node_depth(id).unwrap() {
                0 => 1u32,
                1 => 2,
                2 => 4,
                _ => unreachable!(),
            };
            assert_eq!(t.brute_stabiliser(id).unwrap(), BigUint::from(expected));
        }
    }

    #[test]
    fn brute_stabiliser_matches_formula() {
        let p = bs_presentation(2, 3);
        let t = build_lift_tree(&p, "v", 3, DEFAULT_MAX_NODES).unwrap();
        for id in t.nodes() {
            let path = t.quotient_path(id).unwrap();
            assert_eq!(
                t.brute_stabiliser(id).unwrap(),
                lift_stabiliser_generator(&p, &path).unwrap()
            );
        }
    }

    #[test]
    fn action_additivity() {
        let p = bs_presentation(-2, 3);
        let t = build_lift_tree(&p, "v", 3, DEFAULT_MAX_NODES).unwrap();
        for id in t.nodes() {
            for a in -3i64..=3 {
                for b in -3i64..=3 {
                    let ab = t.act(&BigInt::from(a + b), id).unwrap();
                    let step = t
                        .act(&BigInt::from(a), t.act(&BigInt::from(b), id).unwrap())
                        .unwrap();
                    assert_eq!(ab, step);
                }
            }
        }
    }

    #[test]
    fn stabilisers_divide_down_the_tree() {
        let p = bs_presentation(2, 3);
        let t = build_lift_tree(&p, "v", 3, DEFAULT_MAX_NODES).unwrap();
        for id in t.nodes() {
            if let Some(parent) = t.parent(id).unwrap() {
                let child_gen = t.brute_stabiliser(id).unwrap();
                let parent_gen = t.brute_stabiliser(parent).unwrap();
                assert!((&child_gen % &parent_gen).is_zero());
            }
        }
    }

    #[test]
    fn foreign_nodes_rejected() {
        let p = bs_presentation(2, 3);
        let t1 = build_lift_tree(&p, "v", 1, DEFAULT_MAX_NODES).unwrap();
        let t2 = build_lift_tree(&p, "v", 1, DEFAULT_MAX_NODES).unwrap();
        let foreign = t2.root();
        assert_eq!(
            t1.act(&BigInt::one(), foreign).unwrap_err(),
            LiftTreeError::ForeignNode
        );
    }

    #[test]
    fn trivial_action_only_zero() {
        let p = rose_presentation(2);
        let t = build_lift_tree(&p, "v", 1, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(t.act(&BigInt::zero(), t.root()).unwrap(), t.root());
        assert_eq!(
            t.act(&BigInt::one(), t.root()).unwrap_err(),
            LiftTreeError::TrivialAction
        );
    }

    #[test]
    fn corrupted_tree_is_reported() {
        let p = bs_presentation(2, 3);
        let mut t = build_lift_tree(&p, "v", 2, DEFAULT_MAX_NODES).unwrap();
        assert!(verify_lift_invariants(&t).ok());
        t.corrupt_digit_for_test(1, 17);
        let report = verify_lift_invariants(&t);
        assert!(!report.ok());
        assert!(report.violations.iter().any(|v| v.check == "digit-bound"));
    }

    #[test]
    fn dot_export_mentions_every_node() {
        let p = bs_presentation(2, 3);
        let t = build_lift_tree(&p, "v", 1, DEFAULT_MAX_NODES).unwrap();
        let dot = t.to_dot();
        assert_eq!(dot.matches("label=").count(), t.node_count());
    }
}
