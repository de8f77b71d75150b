//! Finite set families modelling independent, finitely aligned families
//! of compact open sets: unique decompositions by exact-cover search,
//! invariant saturation, primitive parts, and the unipotent transition
//! matrix of the primitive-projection change of basis.
//!
//! Members are bitmasks over a small universe of named atoms; the search
//! layer is exhaustive, so universes are capped to keep it total.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::zmatrix::IntMatrix;

pub const MAX_UNIVERSE: usize = 64;
pub const DEFAULT_UNIVERSE_GUARD: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SetFamilyError {
    #[error("universe has {0} atoms; the exhaustive search layer is capped at {1}")]
    UniverseTooLarge(usize, usize),
    #[error("duplicate atom {0:?}")]
    DuplicateAtom(String),
    #[error("member {0:?} references unknown atom {1:?}")]
    UnknownAtom(String, String),
    #[error("member {0:?} is empty")]
    EmptyMember(String),
    #[error("members {0:?} and {1:?} are equal as sets")]
    DuplicateMemberSet(String, String),
    #[error("unknown member index {0:?}")]
    UnknownMember(String),
    #[error("two distinct partitions of member({i:?}) ∩ member({j:?}) exist, so the family is not independent")]
    UniquenessViolation { i: String, j: String },
    #[error("family is not independent")]
    NotIndependent,
    #[error("family is not finitely aligned: member({i:?}) ∩ member({j:?}) admits no partition")]
    NotFinitelyAligned { i: String, j: String },
    #[error("index set is not invariant under the action: index {index:?} maps outside the set")]
    NotInvariant { index: String },
    #[error("spanning conditions fail at pair ({i:?}, {j:?}): {reason}")]
    PreconditionViolation { i: String, j: String, reason: String },
    #[error("the two equivalent spanning conditions disagree (A = {a}, B = {b}); this indicates an implementation bug")]
    EquivalenceViolation { a: bool, b: bool },
    #[error("permutation {0} is not a bijection on the universe")]
    BadPermutation(usize),
    #[error("permutation {perm} does not preserve the family: image of member {member:?} is not a member")]
    NotSetCompatible { perm: usize, member: String },
}

/// Indexed family of nonempty, pairwise distinct subsets of a finite
/// universe of named atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    atoms: Vec<String>,
    index_ids: Vec<String>,
    masks: Vec<u64>,
}

impl SetFamily {
    /// Builds a family under the default universe guard, which keeps the
    /// exhaustive partition searches total.
    pub fn new(
        universe: impl IntoIterator<Item = String>,
        members: &BTreeMap<String, Vec<String>>,
    ) -> Result<Self, SetFamilyError> {
        SetFamily::with_universe_limit(universe, members, DEFAULT_UNIVERSE_GUARD)
    }

    pub fn with_universe_limit(
        universe: impl IntoIterator<Item = String>,
        members: &BTreeMap<String, Vec<String>>,
        limit: usize,
    ) -> Result<Self, SetFamilyError> {
        let mut atoms: Vec<String> = universe.into_iter().collect();
        atoms.sort();
        for w in atoms.windows(2) {
            if w[0] == w[1] {
                return Err(SetFamilyError::DuplicateAtom(w[0].clone()));
            }
        }
        let limit = limit.min(MAX_UNIVERSE);
        if atoms.len() > limit {
            return Err(SetFamilyError::UniverseTooLarge(atoms.len(), limit));
        }
        let atom_pos: BTreeMap<&str, usize> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.as_str(), i))
            .collect();

        let mut index_ids: Vec<String> = Vec::with_capacity(members.len());
        let mut masks = Vec::with_capacity(members.len());
        for (id, atoms_of) in members {
            let mut mask = 0u64;
            for a in atoms_of {
                let &pos = atom_pos
                    .get(a.as_str())
                    .ok_or_else(|| SetFamilyError::UnknownAtom(id.clone(), a.clone()))?;
                mask |= 1 << pos;
            }
            if mask == 0 {
                return Err(SetFamilyError::EmptyMember(id.clone()));
            }
            if let Some(dup) = masks.iter().position(|&m| m == mask) {
                return Err(SetFamilyError::DuplicateMemberSet(
                    index_ids[dup].clone(),
                    id.clone(),
                ));
            }
            index_ids.push(id.clone());
            masks.push(mask);
        }
        Ok(SetFamily {
            atoms,
            index_ids,
            masks,
        })
    }

    pub fn from_masks(atom_count: usize, masks: &[u64]) -> Result<Self, SetFamilyError> {
        let atoms: Vec<String> = (0..atom_count).map(|i| format!("a{i:02}")).collect();
        let members: BTreeMap<String, Vec<String>> = masks
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                let named = (0..atom_count)
                    .filter(|&b| m & (1 << b) != 0)
                    .map(|b| atoms[b].clone())
                    .collect();
                (format!("m{i:02}"), named)
            })
            .collect();
        SetFamily::new(atoms, &members)
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn universe(&self) -> &[String] {
        &self.atoms
    }

    pub fn index_ids(&self) -> &[String] {
        &self.index_ids
    }

    pub fn mask(&self, idx: usize) -> u64 {
        self.masks[idx]
    }

    pub fn index_of(&self, id: &str) -> Result<usize, SetFamilyError> {
        self.index_ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| SetFamilyError::UnknownMember(id.to_string()))
    }

    pub fn atoms_of_mask(&self, mask: u64) -> Vec<String> {
        (0..self.atoms.len())
            .filter(|&b| mask & (1 << b) != 0)
            .map(|b| self.atoms[b].clone())
            .collect()
    }
}

/// `true` iff no member equals the union of the members strictly below it.
pub fn is_independent(f: &SetFamily) -> bool {
    (0..f.len()).all(|i| !covered_by_smaller(f, i))
}

fn covered_by_smaller(f: &SetFamily, i: usize) -> bool {
    let mi = f.mask(i);
    let union = (0..f.len())
        .filter(|&j| j != i && f.mask(j) & !mi == 0)
        .fold(0u64, |acc, j| acc | f.mask(j));
    union == mi
}

/// Enumerates partitions of `target` into members, stopping after `limit`
/// solutions. Exhaustive exact-cover search on bitmasks, branching on the
/// lowest uncovered atom.
fn partitions_of(f: &SetFamily, target: u64, limit: usize) -> Vec<Vec<usize>> {
    let candidates: Vec<usize> = (0..f.len()).filter(|&i| f.mask(i) & !target == 0).collect();
    let mut solutions = Vec::new();
    let mut chosen = Vec::new();
    let mut dead: BTreeSet<u64> = BTreeSet::new();
    search(f, target, &candidates, &mut chosen, &mut solutions, limit, &mut dead);
    solutions
}

fn search(
    f: &SetFamily,
    remaining: u64,
    candidates: &[usize],
    chosen: &mut Vec<usize>,
    solutions: &mut Vec<Vec<usize>>,
    limit: usize,
    dead: &mut BTreeSet<u64>,
) -> bool {
    if solutions.len() >= limit {
        return true;
    }
    if remaining == 0 {
        let mut sol = chosen.clone();
        sol.sort_unstable();
        solutions.push(sol);
        return solutions.len() >= limit;
    }
    if dead.contains(&remaining) {
        return false;
    }
    let lowest = remaining & remaining.wrapping_neg();
    let before = solutions.len();
    for &i in candidates {
        let m = f.mask(i);
        if m & lowest == 0 || m & !remaining != 0 {
            continue;
        }
        chosen.push(i);
        let stop = search(f, remaining & !m, candidates, chosen, solutions, limit, dead);
        chosen.pop();
        if stop {
            return true;
        }
    }
    if solutions.len() == before {
        // no solution extends this remainder; safe to memoize only failures
        dead.insert(remaining);
    }
    false
}

/// `true` iff every pairwise intersection of members is empty or admits a
/// partition into members.
pub fn is_finitely_aligned(f: &SetFamily) -> bool {
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let inter = f.mask(i) & f.mask(j);
            if inter != 0 && partitions_of(f, inter, 1).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The unique partition of `member(i) ∩ member(j)` into members, when one
/// exists. Finding two certifies an independence failure.
pub fn decompose_intersection(
    f: &SetFamily,
    i: &str,
    j: &str,
) -> Result<Option<Vec<String>>, SetFamilyError> {
    let ii = f.index_of(i)?;
    let jj = f.index_of(j)?;
    let inter = f.mask(ii) & f.mask(jj);
    if inter == 0 {
        return Ok(Some(Vec::new()));
    }
    let mut found = partitions_of(f, inter, 2);
    match found.len() {
        0 => Ok(None),
        1 => Ok(Some(
            found
                .remove(0)
                .into_iter()
                .map(|k| f.index_ids()[k].clone())
                .collect(),
        )),
        // two partitions certify an independence failure; for independent
        // families the uniqueness lemma rules this out
        _ => Err(SetFamilyError::UniquenessViolation {
            i: i.to_string(),
            j: j.to_string(),
        }),
    }
}

/// Atom-level permutation action. Each generator permutes the universe;
/// the induced index permutation exists exactly when every member's image
/// is again a member, which is the set-compatibility the construction
/// needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermAction {
    /// Generators as maps position -> position over the sorted universe.
    atom_perms: Vec<Vec<usize>>,
    /// Induced index permutations, same order as the generators.
    index_perms: Vec<Vec<usize>>,
}

impl PermAction {
    pub fn identity() -> Self {
        PermAction {
            atom_perms: Vec::new(),
            index_perms: Vec::new(),
        }
    }

    pub fn new(f: &SetFamily, generators: &[Vec<usize>]) -> Result<Self, SetFamilyError> {
        let n = f.universe().len();
        let mut index_perms = Vec::with_capacity(generators.len());
        for (gi, perm) in generators.iter().enumerate() {
            if perm.len() != n {
                return Err(SetFamilyError::BadPermutation(gi));
            }
            let mut seen = vec![false; n];
            for &img in perm {
                if img >= n || seen[img] {
                    return Err(SetFamilyError::BadPermutation(gi));
                }
                seen[img] = true;
            }
            let mut index_perm = Vec::with_capacity(f.len());
            for i in 0..f.len() {
                let image = apply_atom_perm(perm, f.mask(i));
                let j = (0..f.len()).find(|&j| f.mask(j) == image).ok_or_else(|| {
                    SetFamilyError::NotSetCompatible {
                        perm: gi,
                        member: f.index_ids()[i].clone(),
                    }
                })?;
                index_perm.push(j);
            }
            index_perms.push(index_perm);
        }
        Ok(PermAction {
            atom_perms: generators.to_vec(),
            index_perms,
        })
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.atom_perms
    }

    pub fn index_generators(&self) -> &[Vec<usize>] {
        &self.index_perms
    }

    fn non_invariant_index(&self, indices: &BTreeSet<usize>) -> Option<usize> {
        for perm in &self.index_perms {
            for &i in indices {
                if !indices.contains(&perm[i]) {
                    return Some(i);
                }
            }
        }
        None
    }
}

fn apply_atom_perm(perm: &[usize], mask: u64) -> u64 {
    let mut out = 0u64;
    for (from, &to) in perm.iter().enumerate() {
        if mask & (1 << from) != 0 {
            out |= 1 << to;
        }
    }
    out
}

/// Saturation: the union over nonempty subsets Y of F of the index sets
/// of the unique decompositions of the Y-fold intersections. The output
/// contains F, is invariant, and spans a finitely aligned subfamily.
pub fn saturate(
    f: &SetFamily,
    base: &BTreeSet<String>,
    action: &PermAction,
) -> Result<BTreeSet<String>, SetFamilyError> {
    if !is_independent(f) {
        return Err(SetFamilyError::NotIndependent);
    }
    if let Some((i, j)) = alignment_failure(f) {
        return Err(SetFamilyError::NotFinitelyAligned {
            i: f.index_ids()[i].clone(),
            j: f.index_ids()[j].clone(),
        });
    }

    let base_idx: BTreeSet<usize> = base
        .iter()
        .map(|id| f.index_of(id))
        .collect::<Result<_, _>>()?;
    if let Some(bad) = action.non_invariant_index(&base_idx) {
        return Err(SetFamilyError::NotInvariant {
            index: f.index_ids()[bad].clone(),
        });
    }

    let base_vec: Vec<usize> = base_idx.iter().copied().collect();
    let mut out: BTreeSet<usize> = BTreeSet::new();
    for selector in 1u64..(1 << base_vec.len()) {
        let mut inter = u64::MAX;
        for (pos, &i) in base_vec.iter().enumerate() {
            if selector & (1 << pos) != 0 {
                inter &= f.mask(i);
            }
        }
        if inter == 0 {
            continue;
        }
        let mut parts = partitions_of(f, inter, 2);
        match parts.len() {
            1 => out.extend(parts.remove(0)),
            0 => {
                // cannot happen for independent finitely aligned families;
                // the standard induction extends pairwise alignment to
                // arbitrary finite intersections
                let first = base_vec[selector.trailing_zeros() as usize];
                return Err(SetFamilyError::NotFinitelyAligned {
                    i: f.index_ids()[first].clone(),
                    j: f.index_ids()[first].clone(),
                });
            }
            _ => {
                return Err(SetFamilyError::UniquenessViolation {
                    i: f.index_ids()[base_vec[0]].clone(),
                    j: f.index_ids()[base_vec[0]].clone(),
                })
            }
        }
    }

    Ok(out
        .into_iter()
        .map(|i| f.index_ids()[i].clone())
        .collect())
}

fn alignment_failure(f: &SetFamily) -> Option<(usize, usize)> {
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let inter = f.mask(i) & f.mask(j);
            if inter != 0 && partitions_of(f, inter, 1).is_empty() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Primitive part of each member: the member minus the union of all
/// members strictly below it. May be empty when independence fails.
pub fn primitive_parts(f: &SetFamily) -> BTreeMap<String, Vec<String>> {
    (0..f.len())
        .map(|i| {
            (
                f.index_ids()[i].clone(),
                f.atoms_of_mask(primitive_mask(f, i)),
            )
        })
        .collect()
}

fn primitive_mask(f: &SetFamily, i: usize) -> u64 {
    let mi = f.mask(i);
    let below = (0..f.len())
        .filter(|&j| j != i && f.mask(j) & !mi == 0)
        .fold(0u64, |acc, j| acc | f.mask(j));
    mi & !below
}

/// Transition matrix between the member projections and their primitive
/// parts, with its certificate checked: entries are 0/1 by containment,
/// each member is the disjoint union of the primitives it dominates, and
/// the matrix is unipotent under a linear extension of containment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionMatrix {
    /// Index ids in family order; entry (i, j) = 1 iff member(i) ⊆ member(j).
    pub index_ids: Vec<String>,
    pub matrix: IntMatrix,
    /// A linear extension of containment witnessing unipotence.
    pub containment_order: Vec<String>,
    #[serde(with = "crate::zmatrix::bigint_string")]
    pub determinant: BigInt,
}

pub fn transition_matrix(f: &SetFamily) -> Result<TransitionMatrix, SetFamilyError> {
    let (a, b) = spanning_conditions(f);
    if a != b {
        return Err(SetFamilyError::EquivalenceViolation { a, b });
    }
    if !a {
        let (i, j, reason) = first_spanning_failure(f);
        return Err(SetFamilyError::PreconditionViolation { i, j, reason });
    }

    let n = f.len();
    let mut matrix = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if f.mask(i) & !f.mask(j) == 0 {
                matrix.set(i, j, BigInt::one());
            }
        }
    }

    // certificate: member(j) is the disjoint union of the primitives of
    // the members it contains
    for j in 0..n {
        let mut seen = 0u64;
        for i in 0..n {
            if f.mask(i) & !f.mask(j) == 0 {
                let prim = primitive_mask(f, i);
                if prim & seen != 0 {
                    return Err(SetFamilyError::PreconditionViolation {
                        i: f.index_ids()[i].clone(),
                        j: f.index_ids()[j].clone(),
                        reason: "primitive parts overlap".into(),
                    });
                }
                seen |= prim;
            }
        }
        if seen != f.mask(j) {
            return Err(SetFamilyError::PreconditionViolation {
                i: f.index_ids()[j].clone(),
                j: f.index_ids()[j].clone(),
                reason: "primitives do not exhaust the member".into(),
            });
        }
    }

    // strict containment implies strictly smaller cardinality, so sorting
    // by popcount linearly extends the containment order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (f.mask(i).count_ones(), f.index_ids()[i].clone()));
    for (a_pos, &i) in order.iter().enumerate() {
        for &j in order.iter().take(a_pos) {
            // i comes after j; i ⊆ j would break upper-triangularity
            if i != j && f.mask(i) & !f.mask(j) == 0 {
                return Err(SetFamilyError::PreconditionViolation {
                    i: f.index_ids()[i].clone(),
                    j: f.index_ids()[j].clone(),
                    reason: "containment order is not linearizable".into(),
                });
            }
        }
    }

    let determinant = matrix.det().expect("square");
    if !determinant.is_one() {
        return Err(SetFamilyError::PreconditionViolation {
            i: f.index_ids()[0].clone(),
            j: f.index_ids()[0].clone(),
            reason: format!("determinant {determinant} != 1"),
        });
    }

    Ok(TransitionMatrix {
        index_ids: f.index_ids().to_vec(),
        matrix,
        containment_order: order
            .into_iter()
            .map(|i| f.index_ids()[i].clone())
            .collect(),
        determinant,
    })
}

/// The two equivalent spanning conditions, evaluated separately:
/// (A) primitives are nonempty, pairwise disjoint, and every member is a
/// union of primitives; (B) the family is independent and every pairwise
/// intersection equals the union of the members contained in it.
pub fn spanning_conditions(f: &SetFamily) -> (bool, bool) {
    let n = f.len();
    let prims: Vec<u64> = (0..n).map(|i| primitive_mask(f, i)).collect();

    let mut a = prims.iter().all(|&p| p != 0);
    'outer: for i in 0..n {
        for j in i + 1..n {
            if prims[i] & prims[j] != 0 {
                a = false;
                break 'outer;
            }
        }
    }
    if a {
        for j in 0..n {
            let union = (0..n)
                .filter(|&i| prims[i] & !f.mask(j) == 0)
                .fold(0u64, |acc, i| acc | prims[i]);
            if union != f.mask(j) {
                a = false;
                break;
            }
        }
    }

    let mut b = is_independent(f);
    if b {
        'pairs: for i in 0..n {
            for j in 0..n {
                let inter = f.mask(i) & f.mask(j);
                let union = (0..n)
                    .filter(|&k| f.mask(k) & !inter == 0)
                    .fold(0u64, |acc, k| acc | f.mask(k));
                if union != inter {
                    b = false;
                    break 'pairs;
                }
            }
        }
    }

    (a, b)
}

fn first_spanning_failure(f: &SetFamily) -> (String, String, String) {
    for i in 0..f.len() {
        if primitive_mask(f, i) == 0 {
            return (
                f.index_ids()[i].clone(),
                f.index_ids()[i].clone(),
                "primitive part is empty".into(),
            );
        }
    }
    for i in 0..f.len() {
        for j in 0..f.len() {
            let inter = f.mask(i) & f.mask(j);
            let union = (0..f.len())
                .filter(|&k| f.mask(k) & !inter == 0)
                .fold(0u64, |acc, k| acc | f.mask(k));
            if union != inter {
                return (
                    f.index_ids()[i].clone(),
                    f.index_ids()[j].clone(),
                    "intersection is not the union of the members inside it".into(),
                );
            }
        }
    }
    (
        String::new(),
        String::new(),
        "unlocalized spanning failure".into(),
    )
}

/// Evaluates both spanning conditions and errors if they disagree, which
/// would falsify their equivalence and hence indicates a bug.
pub fn verify_prop_equivalence(f: &SetFamily) -> Result<(bool, bool), SetFamilyError> {
    let (a, b) = spanning_conditions(f);
    if a != b {
        return Err(SetFamilyError::EquivalenceViolation { a, b });
    }
    Ok((a, b))
}

// JSON: {"universe": [atoms], "members": {id: [atoms]},
//        "action": [[...], ..]} with permutations as position arrays over
// the sorted universe.
#[derive(Debug, Serialize, Deserialize)]
pub struct SetFamilyJson {
    pub universe: Vec<String>,
    pub members: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub action: Vec<Vec<usize>>,
}

impl SetFamilyJson {
    pub fn to_family(&self) -> Result<(SetFamily, PermAction), SetFamilyError> {
        let family = SetFamily::new(self.universe.iter().cloned(), &self.members)?;
        let action = PermAction::new(&family, &self.action)?;
        Ok((family, action))
    }

    pub fn from_family(f: &SetFamily, action: &PermAction) -> Self {
        SetFamilyJson {
            universe: f.universe().to_vec(),
            members: (0..f.len())
                .map(|i| (f.index_ids()[i].clone(), f.atoms_of_mask(f.mask(i))))
                .collect(),
            action: action.generators().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(masks: &[u64]) -> SetFamily {
        SetFamily::from_masks(8, masks).unwrap()
    }

    // {1,2}, {2,3}, {2} as bitmasks 0b011, 0b110, 0b010
    fn crossing() -> SetFamily {
        family(&[0b011, 0b110, 0b010])
    }

    #[test]
    fn independence_examples() {
        assert!(is_independent(&crossing()));
        assert!(!is_independent(&family(&[0b01, 0b10, 0b11])));
        assert!(is_independent(&family(&[0b1])));
    }

    #[test]
    fn alignment_examples() {
        assert!(is_finitely_aligned(&crossing()));
        assert!(!is_finitely_aligned(&family(&[0b011, 0b110])));
        assert!(is_finitely_aligned(&family(&[0b001, 0b010, 0b100])));
    }

    #[test]
    fn decompose_examples() {
        let f = crossing();
        assert_eq!(
            decompose_intersection(&f, "m00", "m01").unwrap(),
            Some(vec!["m02".to_string()])
        );
        let disjoint = family(&[0b01, 0b10]);
        assert_eq!(
            decompose_intersection(&disjoint, "m00", "m01").unwrap(),
            Some(vec![])
        );
        assert_eq!(
            decompose_intersection(&f, "m00", "m00").unwrap(),
            Some(vec!["m00".to_string()])
        );
        let misaligned = family(&[0b011, 0b110]);
        assert_eq!(decompose_intersection(&misaligned, "m00", "m01").unwrap(), None);
    }

    #[test]
    fn saturate_examples() {
        let f = crossing();
        let base: BTreeSet<String> = ["m00", "m01"].map(str::to_string).into();
        let j = saturate(&f, &base, &PermAction::identity()).unwrap();
        assert_eq!(j, ["m00", "m01", "m02"].map(str::to_string).into());

        // intersection-closed base stays put
        let all: BTreeSet<String> = ["m00", "m01", "m02"].map(str::to_string).into();
        assert_eq!(saturate(&f, &all, &PermAction::identity()).unwrap(), all);

        let empty = BTreeSet::new();
        assert!(saturate(&f, &empty, &PermAction::identity())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn saturate_rejects_noninvariant_base() {
        // two disjoint singletons swapped by the action
        let f = family(&[0b01, 0b10]);
        let action = PermAction::new(&f, &[vec![1, 0, 2, 3, 4, 5, 6, 7]]).unwrap();
        let base: BTreeSet<String> = ["m00"].map(str::to_string).into();
        assert!(matches!(
            saturate(&f, &base, &action),
            Err(SetFamilyError::NotInvariant { .. })
        ));
        let both: BTreeSet<String> = ["m00", "m01"].map(str::to_string).into();
        assert!(saturate(&f, &both, &action).is_ok());
    }

    #[test]
    fn primitives_examples() {
        // {1,2} ⊃ {2}: primitive of the big one is {1}
        let f = family(&[0b011, 0b010]);
        let prims = primitive_parts(&f);
        assert_eq!(prims["m00"], vec!["a00".to_string()]);
        assert_eq!(prims["m01"], vec!["a01".to_string()]);

        // antichain: primitives are the members
        let anti = family(&[0b0011, 0b1100]);
        let prims = primitive_parts(&anti);
        assert_eq!(prims["m00"].len(), 2);

        // nested chain {1} ⊂ {1,2} ⊂ {1,2,3}
        let chain = family(&[0b001, 0b011, 0b111]);
        let prims = primitive_parts(&chain);
        assert_eq!(prims["m00"], vec!["a00".to_string()]);
        assert_eq!(prims["m01"], vec!["a01".to_string()]);
        assert_eq!(prims["m02"], vec!["a02".to_string()]);
    }

    #[test]
    fn transition_matrix_examples() {
        // antichain -> identity
        let anti = family(&[0b0011, 0b1100]);
        let t = transition_matrix(&anti).unwrap();
        assert_eq!(t.matrix, IntMatrix::identity(2));

        // {2} ⊂ {1,2}, family order m00 = {1,2}, m01 = {2}
        let pair = family(&[0b011, 0b010]);
        let t = transition_matrix(&pair).unwrap();
        assert_eq!(t.matrix, IntMatrix::from_i64_rows(&[&[1, 0], &[1, 1]]));
        assert_eq!(t.determinant, BigInt::one());
        assert_eq!(t.containment_order, vec!["m01", "m00"]);

        // chain of three: all-ones upper triangle in containment order
        let chain = family(&[0b001, 0b011, 0b111]);
        let t = transition_matrix(&chain).unwrap();
        assert_eq!(
            t.matrix,
            IntMatrix::from_i64_rows(&[&[1, 1, 1], &[0, 1, 1], &[0, 0, 1]])
        );
    }

    #[test]
    fn transition_matrix_rejects_bad_family() {
        let bad = family(&[0b01, 0b10, 0b11]);
        assert!(matches!(
            transition_matrix(&bad),
            Err(SetFamilyError::PreconditionViolation { .. })
        ));
    }

    #[test]
    fn prop_equivalence_examples() {
        assert_eq!(verify_prop_equivalence(&crossing()).unwrap(), (true, true));
        assert_eq!(
            verify_prop_equivalence(&family(&[0b01, 0b10, 0b11])).unwrap(),
            (false, false)
        );
        assert_eq!(
            verify_prop_equivalence(&family(&[0b1])).unwrap(),
            (true, true)
        );
    }

    #[test]
    fn universe_guard() {
        let big: BTreeMap<String, Vec<String>> =
            [("m".to_string(), vec!["a00".to_string()])].into();
        let atoms = (0..20).map(|i| format!("a{i:02}"));
        assert!(matches!(
            SetFamily::new(atoms.clone(), &big),
            Err(SetFamilyError::UniverseTooLarge(20, 16))
        ));
        assert!(SetFamily::with_universe_limit(atoms, &big, 32).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let f = crossing();
        let json = SetFamilyJson::from_family(&f, &PermAction::identity());
        let text = serde_json::to_string(&json).unwrap();
        let back: SetFamilyJson = serde_json::from_str(&text).unwrap();
        let (f2, _) = back.to_family().unwrap();
        assert_eq!(f2, f);
    }
}
