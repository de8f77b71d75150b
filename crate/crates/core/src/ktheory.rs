//! K-theory of the boundary crossed product from quotient data: the
//! adjacency and stabiliser-index matrices, the per-edge induced maps,
//! the per-component K-group formulas, and the assembled six-term report.
//!
//! Per weakly connected component the computation is one of two cases.
//! Free (trivial stabilisers): K0 = coker(1 - A^T), K1 = ker(1 - A^T)
//! for the adjacency matrix A of the component. Infinite cyclic:
//! K0 = coker(1 - A0) (+) ker(1 - A1) and K1 = coker(1 - A1) (+)
//! ker(1 - A0), where column v of A0 holds |omega_e| over edges with
//! range v (into row s(e)) and A1 holds sgn(omega_e) * omega_{ebar}.

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::presentation::{validate, QuotientPresentation, StabiliserClass, ValidationReport};
use crate::zmatrix::{cokernel, direct_sum, kernel, AbelianGroup, IntMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KTheoryError {
    #[error("presentation failed validation: {0}")]
    InvalidPresentation(ValidationReport),
    #[error("stabiliser matrices are defined only on infinite-cyclic components; vertex {0:?} is trivial")]
    TrivialVertex(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
}

fn ensure_valid(p: &QuotientPresentation) -> Result<(), KTheoryError> {
    let report = validate(p);
    if report.ok() {
        Ok(())
    } else {
        Err(KTheoryError::InvalidPresentation(report))
    }
}

/// Adjacency matrix over the sorted vertex set: entry (v, w) counts the
/// edges with range v and source w.
pub fn adjacency_matrix(p: &QuotientPresentation) -> Result<IntMatrix, KTheoryError> {
    ensure_valid(p)?;
    Ok(adjacency_unchecked(p))
}

fn adjacency_unchecked(p: &QuotientPresentation) -> IntMatrix {
    let g = p.graph();
    let n = g.vertex_count();
    let mut a = IntMatrix::zeros(n, n);
    let one = BigInt::from(1);
    for e in 0..g.edge_count() {
        let (r, s) = g.edge_endpoints(e);
        a.add_assign_at(r, s, &one);
    }
    a
}

/// Maps induced on K0 and K1 by one edge's corner endomorphism: for an
/// infinite-cyclic edge, multiplication by `|omega_e|` on K0 and by
/// `sgn(omega_e) * omega_ebar` on K1; for a trivial edge, the unit class
/// maps to the unit class and K1 is zero.
pub fn theta_induced(p: &QuotientPresentation, edge: &str) -> Result<(i64, i64), KTheoryError> {
    ensure_valid(p)?;
    let e = p
        .graph()
        .edge_idx(edge)
        .map_err(|_| KTheoryError::UnknownEdge(edge.to_string()))?;
    Ok(theta_induced_idx(p, e))
}

pub(crate) fn theta_induced_idx(p: &QuotientPresentation, e: usize) -> (i64, i64) {
    match p.omega_of_idx(e) {
        Some(om) => (om.range.abs(), om.range.signum() * om.source),
        None => (1, 0),
    }
}

/// The matrices of the maps A0 and A1 on the vertex module, columns
/// indexed by vertices. Defined only when every vertex is infinite cyclic.
pub fn stabiliser_matrices(
    p: &QuotientPresentation,
) -> Result<(IntMatrix, IntMatrix), KTheoryError> {
    ensure_valid(p)?;
    let g = p.graph();
    for v in 0..g.vertex_count() {
        if p.class_of_idx(v) != Some(StabiliserClass::InfiniteCyclic) {
            return Err(KTheoryError::TrivialVertex(g.vertex_name(v).to_string()));
        }
    }
    Ok(stabiliser_matrices_unchecked(p))
}

fn stabiliser_matrices_unchecked(p: &QuotientPresentation) -> (IntMatrix, IntMatrix) {
    let g = p.graph();
    let n = g.vertex_count();
    let mut a0 = IntMatrix::zeros(n, n);
    let mut a1 = IntMatrix::zeros(n, n);
    for e in 0..g.edge_count() {
        let (r, s) = g.edge_endpoints(e);
        let (m0, m1) = theta_induced_idx(p, e);
        a0.add_assign_at(s, r, &BigInt::from(m0));
        a1.add_assign_at(s, r, &BigInt::from(m1));
    }
    (a0, a1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentCase {
    Free,
    InfiniteCyclic,
}

/// Matrices feeding one component's K-groups, kept so reports can show
/// their work.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentMatrices {
    Free {
        id_minus_at: IntMatrix,
    },
    InfiniteCyclic {
        id_minus_a0: IntMatrix,
        id_minus_a1: IntMatrix,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentKTheory {
    pub case: ComponentCase,
    pub vertices: Vec<String>,
    pub matrices: ComponentMatrices,
    pub k0: AbelianGroup,
    pub k1: AbelianGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KTheoryReport {
    pub components: Vec<ComponentKTheory>,
    pub k0: AbelianGroup,
    pub k1: AbelianGroup,
}

impl std::fmt::Display for KTheoryReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            writeln!(
                f,
                "component {} ({:?} on {{{}}}): K0 = {}, K1 = {}",
                i,
                c.case,
                c.vertices.join(", "),
                c.k0,
                c.k1
            )?;
        }
        write!(f, "K0 = {}\nK1 = {}", self.k0, self.k1)
    }
}

/// K-groups of the boundary crossed product, per weakly connected
/// component and globally. The boundary splits into invariant clopen
/// pieces indexed by quotient components, so the global answer is the
/// direct sum of the per-component answers.
pub fn k_theory(p: &QuotientPresentation) -> Result<KTheoryReport, KTheoryError> {
    ensure_valid(p)?;
    let mut components = Vec::new();
    let mut k0 = AbelianGroup::trivial();
    let mut k1 = AbelianGroup::trivial();
    for members in p.graph().weakly_connected_components() {
        let sub = p.restrict_to(&members);
        let case = match sub.class_of_idx(0).expect("validated: classes total") {
            StabiliserClass::Trivial => ComponentCase::Free,
            StabiliserClass::InfiniteCyclic => ComponentCase::InfiniteCyclic,
        };
        let component = match case {
            ComponentCase::Free => {
                let id_minus_at = adjacency_unchecked(&sub).transpose().one_minus().unwrap();
                ComponentKTheory {
                    case,
                    vertices: sub.graph().vertex_ids().to_vec(),
                    k0: cokernel(&id_minus_at),
                    k1: kernel(&id_minus_at),
                    matrices: ComponentMatrices::Free { id_minus_at },
                }
            }
            ComponentCase::InfiniteCyclic => {
                let (a0, a1) = stabiliser_matrices_unchecked(&sub);
                let id_minus_a0 = a0.one_minus().unwrap();
                let id_minus_a1 = a1.one_minus().unwrap();
                ComponentKTheory {
                    case,
                    vertices: sub.graph().vertex_ids().to_vec(),
                    k0: direct_sum(&cokernel(&id_minus_a0), &kernel(&id_minus_a1)),
                    k1: direct_sum(&cokernel(&id_minus_a1), &kernel(&id_minus_a0)),
                    matrices: ComponentMatrices::InfiniteCyclic {
                        id_minus_a0,
                        id_minus_a1,
                    },
                }
            }
        };
        k0 = direct_sum(&k0, &component.k0);
        k1 = direct_sum(&k1, &component.k1);
        components.push(component);
    }
    Ok(KTheoryReport { components, k0, k1 })
}

/// The assembled six-term data: `id - alpha_0` on the full vertex module
/// and `id - alpha_1` on the infinite-cyclic vertices (trivial vertices
/// have vanishing K1), plus the resulting corner groups of the sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SixTermReport {
    /// Basis of the K0 side: all vertices, sorted.
    pub k0_vertices: Vec<String>,
    /// Basis of the K1 side: the infinite-cyclic vertices, sorted.
    pub k1_vertices: Vec<String>,
    pub id_minus_alpha0: IntMatrix,
    pub id_minus_alpha1: IntMatrix,
    pub boundary_k0: AbelianGroup,
    pub boundary_k1: AbelianGroup,
}

impl std::fmt::Display for SixTermReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "id - alpha_0 on Z[{{{}}}]:", self.k0_vertices.join(", "))?;
        write!(f, "{}", self.id_minus_alpha0)?;
        writeln!(f, "id - alpha_1 on Z[{{{}}}]:", self.k1_vertices.join(", "))?;
        write!(f, "{}", self.id_minus_alpha1)?;
        write!(
            f,
            "boundary K0 = {}\nboundary K1 = {}",
            self.boundary_k0, self.boundary_k1
        )
    }
}

pub fn six_term_report(p: &QuotientPresentation) -> Result<SixTermReport, KTheoryError> {
    ensure_valid(p)?;
    let g = p.graph();
    let n = g.vertex_count();

    let k1_positions: Vec<usize> = (0..n)
        .filter(|&v| p.class_of_idx(v) == Some(StabiliserClass::InfiniteCyclic))
        .collect();
    let k1_slot: Vec<Option<usize>> = {
        let mut slots = vec![None; n];
        for (i, &v) in k1_positions.iter().enumerate() {
            slots[v] = Some(i);
        }
        slots
    };

    let mut alpha0 = IntMatrix::zeros(n, n);
    let mut alpha1 = IntMatrix::zeros(k1_positions.len(), k1_positions.len());
    for e in 0..g.edge_count() {
        let (r, s) = g.edge_endpoints(e);
        let (m0, m1) = theta_induced_idx(p, e);
        alpha0.add_assign_at(s, r, &BigInt::from(m0));
        if let (Some(sr), Some(sc)) = (k1_slot[s], k1_slot[r]) {
            alpha1.add_assign_at(sr, sc, &BigInt::from(m1));
        }
    }
    let id_minus_alpha0 = alpha0.one_minus().unwrap();
    let id_minus_alpha1 = alpha1.one_minus().unwrap();

    Ok(SixTermReport {
        k0_vertices: g.vertex_ids().to_vec(),
        k1_vertices: k1_positions
            .iter()
            .map(|&v| g.vertex_name(v).to_string())
            .collect(),
        boundary_k0: direct_sum(&cokernel(&id_minus_alpha0), &kernel(&id_minus_alpha1)),
        boundary_k1: direct_sum(&cokernel(&id_minus_alpha1), &kernel(&id_minus_alpha0)),
        id_minus_alpha0,
        id_minus_alpha1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{DiGraph, EdgeSpec};
    use crate::presentation::{
        bs_presentation, dual_quotient, free_group_gog, rose_presentation, OmegaPair,
    };
    use std::collections::BTreeMap;

    #[test]
    fn adjacency_examples() {
        let rose = rose_presentation(3);
        assert_eq!(
            adjacency_matrix(&rose).unwrap(),
            IntMatrix::from_i64_rows(&[&[3]])
        );

        // 2-cycle a <-> b plus a loop at a
        let graph = DiGraph::new(
            ["a".to_string(), "b".to_string()],
            [
                EdgeSpec::new("e", "a", "b"),
                EdgeSpec::new("f", "b", "a"),
                EdgeSpec::new("l", "a", "a"),
            ],
        )
        .unwrap();
        let p = QuotientPresentation::free(graph);
        assert_eq!(
            adjacency_matrix(&p).unwrap(),
            IntMatrix::from_i64_rows(&[&[1, 1], &[1, 0]])
        );
    }

    #[test]
    fn adjacency_of_free_dual() {
        let dual = dual_quotient(&free_group_gog(2)).unwrap();
        let a = adjacency_matrix(&dual).unwrap();
        let g = dual.graph();
        for r in 0..4 {
            for c in 0..4 {
                let paired = g.vertex_name(r).trim_end_matches("bar")
                    == g.vertex_name(c).trim_end_matches("bar")
                    && r != c;
                let expected = if paired { 0 } else { 1 };
                assert_eq!(a.get(r, c), &BigInt::from(expected), "at ({r},{c})");
            }
        }
    }

    #[test]
    fn stabiliser_matrix_examples() {
        let (a0, a1) = stabiliser_matrices(&bs_presentation(2, 3)).unwrap();
        assert_eq!(a0, IntMatrix::from_i64_rows(&[&[2]]));
        assert_eq!(a1, IntMatrix::from_i64_rows(&[&[3]]));

        let (a0, a1) = stabiliser_matrices(&bs_presentation(-2, 3)).unwrap();
        assert_eq!(a0, IntMatrix::from_i64_rows(&[&[2]]));
        assert_eq!(a1, IntMatrix::from_i64_rows(&[&[-3]]));

        // two parallel loops (2,3) and (1,1)
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
                ("f".to_string(), OmegaPair::new(1, 1)),
            ]),
        );
        let (a0, a1) = stabiliser_matrices(&p).unwrap();
        assert_eq!(a0, IntMatrix::from_i64_rows(&[&[3]]));
        assert_eq!(a1, IntMatrix::from_i64_rows(&[&[4]]));
    }

    #[test]
    fn stabiliser_matrices_reject_trivial() {
        let err = stabiliser_matrices(&rose_presentation(2)).unwrap_err();
        assert!(matches!(err, KTheoryError::TrivialVertex(_)));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_induced(&bs_presentation(2, 3), "e").unwrap(), (2, 3));
        assert_eq!(
            theta_induced(&bs_presentation(-2, 3), "e").unwrap(),
            (2, -3)
        );
        assert_eq!(theta_induced(&rose_presentation(2), "l0").unwrap(), (1, 0));
    }

    #[test]
    fn cuntz_roses() {
        let r2 = k_theory(&rose_presentation(2)).unwrap();
        assert!(r2.k0.is_trivial());
        assert!(r2.k1.is_trivial());

        let r3 = k_theory(&rose_presentation(3)).unwrap();
        assert_eq!(r3.k0, AbelianGroup::cyclic(2));
        assert!(r3.k1.is_trivial());
    }

    #[test]
    fn bs23_k_theory() {
        let report = k_theory(&bs_presentation(2, 3)).unwrap();
        assert!(report.k0.is_trivial());
        assert_eq!(report.k1, AbelianGroup::cyclic(2));
    }

    #[test]
    fn six_term_free_rose() {
        let report = six_term_report(&rose_presentation(4)).unwrap();
        assert_eq!(report.id_minus_alpha0, IntMatrix::from_i64_rows(&[&[-3]]));
        assert_eq!(report.id_minus_alpha1, IntMatrix::zeros(0, 0));
        assert_eq!(report.boundary_k0, AbelianGroup::cyclic(3));
        assert!(report.boundary_k1.is_trivial());
    }

    #[test]
    fn six_term_bs23() {
        let report = six_term_report(&bs_presentation(2, 3)).unwrap();
        assert_eq!(report.id_minus_alpha0, IntMatrix::from_i64_rows(&[&[-1]]));
        assert_eq!(report.id_minus_alpha1, IntMatrix::from_i64_rows(&[&[-2]]));
        assert!(report.boundary_k0.is_trivial());
        assert_eq!(report.boundary_k1, AbelianGroup::cyclic(2));
    }

    #[test]
    fn six_term_two_components() {
        // disjoint union of a free rose (vertex a) and a BS loop (vertex b)
        let graph = DiGraph::new(
            ["a".to_string(), "b".to_string()],
            [
                EdgeSpec::new("x0", "a", "a"),
                EdgeSpec::new("x1", "a", "a"),
                EdgeSpec::new("y", "b", "b"),
            ],
        )
        .unwrap();
        let p = QuotientPresentation::new(
            graph,
            BTreeMap::from([
                ("a".to_string(), StabiliserClass::Trivial),
                ("b".to_string(), StabiliserClass::InfiniteCyclic),
            ]),
            BTreeMap::from([("y".to_string(), OmegaPair::new(2, 3))]),
        );
        let report = six_term_report(&p).unwrap();
        assert_eq!(
            report.id_minus_alpha0,
            IntMatrix::from_i64_rows(&[&[-1, 0], &[0, -1]])
        );
        assert_eq!(report.id_minus_alpha1, IntMatrix::from_i64_rows(&[&[-2]]));

        let full = k_theory(&p).unwrap();
        assert_eq!(full.components.len(), 2);
        assert_eq!(full.k0, report.boundary_k0);
        assert_eq!(full.k1, report.boundary_k1);
    }

    #[test]
    fn mixed_global_direct_sum() {
        // rose(3) gives K0 = Z/2; BS(2,3) gives K1 = Z/2
        let graph = DiGraph::new(
            ["a".to_string(), "b".to_string()],
            [
                EdgeSpec::new("x0", "a", "a"),
                EdgeSpec::new("x1", "a", "a"),
                EdgeSpec::new("x2", "a", "a"),
                EdgeSpec::new("y", "b", "b"),
            ],
        )
        .unwrap();
        let p = QuotientPresentation::new(
            graph,
            BTreeMap::from([
                ("a".to_string(), StabiliserClass::Trivial),
                ("b".to_string(), StabiliserClass::InfiniteCyclic),
            ]),
            BTreeMap::from([("y".to_string(), OmegaPair::new(2, 3))]),
        );
        let report = k_theory(&p).unwrap();
        assert_eq!(report.k0, AbelianGroup::cyclic(2));
        assert_eq!(report.k1, AbelianGroup::cyclic(2));
    }
}
