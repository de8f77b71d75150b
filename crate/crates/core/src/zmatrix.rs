//! Exact integer linear algebra: Smith normal form over the integers,
//! kernels and cokernels as finitely generated abelian group invariants.
//!
//! All arithmetic is arbitrary precision; there are no modular shortcuts
//! and no floating point anywhere.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};

use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZMatrixError {
    #[error("ragged row data: row {row} has {got} entries, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("shape mismatch: {left} vs {right} for {op}")]
    ShapeMismatch {
        op: &'static str,
        left: String,
        right: String,
    },
}

/// Dense integer matrix, row-major, arbitrary-precision entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<BigInt>]) -> Result<Self, ZMatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(ZMatrixError::Ragged {
                    row: i,
                    got: row.len(),
                    expected: c,
                });
            }
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().cloned().collect(),
        })
    }

    /// Convenience constructor for literal test matrices.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let converted: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        IntMatrix::from_rows(&converted).expect("literal rows must be rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigInt) {
        self.data[r * self.cols + c] = value;
    }

    pub fn add_assign_at(&mut self, r: usize, c: usize, value: &BigInt) {
        self.data[r * self.cols + c] += value;
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, ZMatrixError> {
        if self.cols != other.rows {
            return Err(ZMatrixError::ShapeMismatch {
                op: "mul",
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let prod = a * other.get(k, c);
                    out.add_assign_at(r, c, &prod);
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix, ZMatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(ZMatrixError::ShapeMismatch {
                op: "sub",
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        Ok(out)
    }

    /// `identity - self`, defined for square matrices.
    pub fn one_minus(&self) -> Result<IntMatrix, ZMatrixError> {
        IntMatrix::identity(self.rows).sub(self)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row_a -= q * row_b
    fn row_sub_mul(&mut self, a: usize, b: usize, q: &BigInt) {
        for c in 0..self.cols {
            let delta = q * self.get(b, c);
            self.data[a * self.cols + c] -= delta;
        }
    }

    /// col_a -= q * col_b
    fn col_sub_mul(&mut self, a: usize, b: usize, q: &BigInt) {
        for r in 0..self.rows {
            let delta = q * self.get(r, b);
            self.data[r * self.cols + a] -= delta;
        }
    }

    /// row_a += row_b
    fn row_add(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            let v = self.get(b, c).clone();
            self.data[a * self.cols + c] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c).clone();
            self.set(r, c, v);
        }
    }

    /// Determinant by the Bareiss fraction-free elimination. Exact.
    pub fn det(&self) -> Result<BigInt, ZMatrixError> {
        if self.rows != self.cols {
            return Err(ZMatrixError::ShapeMismatch {
                op: "det",
                left: format!("{}x{}", self.rows, self.cols),
                right: "square".to_string(),
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j);
                    a.set(i, j, num / &prev);
                }
                a.set(i, k, BigInt::zero());
            }
            prev = a.get(k, k).clone();
        }
        Ok(sign * a.get(n - 1, n - 1))
    }

    /// Matrix entries as decimal strings, row-major rows.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).to_string()).collect())
            .collect()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

// Matrices serialize as arrays of decimal strings so arbitrary-precision
// entries survive JSON round trips.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_string_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(deserializer)?;
        let parsed: Result<Vec<Vec<BigInt>>, D::Error> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        s.parse::<BigInt>()
                            .map_err(|_| D::Error::custom(format!("bad integer entry {s:?}")))
                    })
                    .collect()
            })
            .collect();
        IntMatrix::from_rows(&parsed?).map_err(D::Error::custom)
    }
}

/// Smith normal form `U * M * V = S` with unimodular `U`, `V` and `S`
/// diagonal with a nonnegative divisibility chain.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.s
            .diagonal()
            .iter()
            .take_while(|d| !d.is_zero())
            .count()
    }

    pub fn invariant_factors(&self) -> Vec<BigUint> {
        self.s
            .diagonal()
            .iter()
            .take_while(|d| !d.is_zero())
            .map(|d| d.magnitude().clone())
            .collect()
    }
}

fn find_min_nonzero(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let v = s.get(i, j);
            if v.is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if v.abs() < s.get(bi, bj).abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

/// Smith normal form by repeated reduction with the smallest-absolute-value
/// pivot, accumulating the row and column transforms.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let dim = rows.min(cols);

    for t in 0..dim {
        'pivot: loop {
            let Some((pi, pj)) = find_min_nonzero(&s, t) else {
                break 'pivot;
            };
            if pi != t {
                s.swap_rows(t, pi);
                u.swap_rows(t, pi);
            }
            if pj != t {
                s.swap_cols(t, pj);
                v.swap_cols(t, pj);
            }

            let mut dirty = false;
            for i in t + 1..rows {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = s.get(i, t) / s.get(t, t);
                if !q.is_zero() {
                    s.row_sub_mul(i, t, &q);
                    u.row_sub_mul(i, t, &q);
                }
                if !s.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = s.get(t, j) / s.get(t, t);
                if !q.is_zero() {
                    s.col_sub_mul(j, t, &q);
                    v.col_sub_mul(j, t, &q);
                }
                if !s.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivot;
            }

            // Pivot cleared its row and column; force the divisibility chain
            // by folding in any entry the pivot does not divide.
            let pivot = s.get(t, t).clone();
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(s.get(i, j) % &pivot).is_zero() {
                        s.row_add(t, i);
                        u.row_add(t, i);
                        continue 'pivot;
                    }
                }
            }
            break 'pivot;
        }
    }

    for t in 0..dim {
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }

    SmithDecomposition { u, s, v }
}

/// Rank by fraction-free (Bareiss) Gaussian elimination with full pivoting.
/// Deliberately a separate code path from `smith_normal_form`.
pub fn rank_fraction_free(m: &IntMatrix) -> usize {
    let mut a = m.clone();
    let rows = a.rows();
    let cols = a.cols();
    let mut prev = BigInt::one();
    let mut k = 0usize;
    while k < rows.min(cols) {
        let pivot = (k..rows)
            .flat_map(|i| (k..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !a.get(i, j).is_zero());
        let Some((pi, pj)) = pivot else {
            return k;
        };
        a.swap_rows(k, pi);
        a.swap_cols(k, pj);
        for i in k + 1..rows {
            for j in k + 1..cols {
                let num = a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j);
                a.set(i, j, num / &prev);
            }
            a.set(i, k, BigInt::zero());
        }
        prev = a.get(k, k).clone();
        k += 1;
    }
    k
}

/// Finitely generated abelian group in invariant-factor form: free rank
/// plus a divisibility chain of torsion factors, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    rank: usize,
    torsion: Vec<BigUint>,
}

impl AbelianGroup {
    /// Canonicalizes via prime-power regrouping, so equal groups compare
    /// equal structurally regardless of how the factors arrived.
    pub fn new(rank: usize, torsion: impl IntoIterator<Item = BigUint>) -> Self {
        let factors: Vec<BigUint> = torsion
            .into_iter()
            .filter(|d| *d > BigUint::one())
            .collect();
        AbelianGroup {
            rank,
            torsion: regroup_invariant_factors(&factors),
        }
    }

    pub fn trivial() -> Self {
        AbelianGroup {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(order: u64) -> Self {
        AbelianGroup::new(0, [BigUint::from(order)])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigUint] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for AbelianGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            rank: usize,
            torsion: Vec<String>,
            pretty: &'a str,
        }
        Raw {
            rank: self.rank,
            torsion: self.torsion.iter().map(|d| d.to_string()).collect(),
            pretty: &self.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AbelianGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rank: usize,
            torsion: Vec<String>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let torsion: Result<Vec<BigUint>, D::Error> = raw
            .torsion
            .iter()
            .map(|s| {
                s.parse::<BigUint>()
                    .map_err(|_| D::Error::custom(format!("bad torsion factor {s:?}")))
            })
            .collect();
        Ok(AbelianGroup::new(raw.rank, torsion?))
    }
}

fn factorize(n: &BigUint) -> BTreeMap<BigUint, u32> {
    let mut out = BTreeMap::new();
    let mut n = n.clone();
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let mut p = two.clone();
    while &p * &p <= n {
        while (&n % &p).is_zero() {
            *out.entry(p.clone()).or_insert(0) += 1;
            n /= &p;
        }
        p += if p == two { &one } else { &two };
    }
    if n > one {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

/// Regroups a multiset of cyclic orders into the canonical invariant-factor
/// chain: per prime, exponents sorted ascending and right-aligned, then the
/// aligned slots multiplied back together.
fn regroup_invariant_factors(factors: &[BigUint]) -> Vec<BigUint> {
    let mut per_prime: BTreeMap<BigUint, Vec<u32>> = BTreeMap::new();
    for d in factors {
        for (p, e) in factorize(d) {
            per_prime.entry(p).or_default().push(e);
        }
    }
    let len = per_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut chain = vec![BigUint::one(); len];
    for (p, mut exps) in per_prime {
        exps.sort_unstable();
        let pad = len - exps.len();
        for (slot, e) in exps.into_iter().enumerate() {
            chain[pad + slot] *= p.pow(e);
        }
    }
    chain
}

/// Cokernel of `M : Z^cols -> Z^rows` as an abelian group invariant.
pub fn cokernel(m: &IntMatrix) -> AbelianGroup {
    let snf = smith_normal_form(m);
    AbelianGroup::new(m.rows() - snf.rank(), snf.invariant_factors())
}

/// Kernel of `M : Z^cols -> Z^rows`; subgroups of `Z^n` are free.
pub fn kernel(m: &IntMatrix) -> AbelianGroup {
    let snf = smith_normal_form(m);
    AbelianGroup::free(m.cols() - snf.rank())
}

pub fn direct_sum(a: &AbelianGroup, b: &AbelianGroup) -> AbelianGroup {
    AbelianGroup::new(
        a.rank() + b.rank(),
        a.torsion().iter().chain(b.torsion()).cloned(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &IntMatrix) -> SmithDecomposition {
        let snf = smith_normal_form(m);
        let left = snf.u.mul(m).unwrap().mul(&snf.v).unwrap();
        assert_eq!(left, snf.s, "U*M*V != S for\n{m}");
        assert!(snf.s.is_diagonal());
        assert_eq!(snf.u.det().unwrap().abs(), BigInt::one());
        assert_eq!(snf.v.det().unwrap().abs(), BigInt::one());
        let diag = snf.s.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if !w[0].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "chain broken in {diag:?}");
            } else {
                assert!(w[1].is_zero());
            }
        }
        snf
    }

    #[test]
    fn snf_zero_matrix() {
        let snf = check_snf(&IntMatrix::zeros(2, 2));
        assert_eq!(snf.s, IntMatrix::zeros(2, 2));
    }

    #[test]
    fn snf_small_example() {
        let m = IntMatrix::from_i64_rows(&[&[2, 4], &[6, 8]]);
        let snf = check_snf(&m);
        assert_eq!(snf.s, IntMatrix::from_i64_rows(&[&[2, 0], &[0, 4]]));
    }

    #[test]
    fn snf_identity() {
        let snf = check_snf(&IntMatrix::identity(4));
        assert_eq!(snf.s, IntMatrix::identity(4));
    }

    #[test]
    fn cokernel_unit_entry() {
        let m = IntMatrix::from_i64_rows(&[&[-1]]);
        assert!(cokernel(&m).is_trivial());
    }

    #[test]
    fn cokernel_free_rank_two() {
        let m = IntMatrix::from_i64_rows(&[
            &[0, 0, -1, -1],
            &[0, 0, -1, -1],
            &[-1, -1, 0, 0],
            &[-1, -1, 0, 0],
        ]);
        assert_eq!(cokernel(&m), AbelianGroup::free(2));
        assert_eq!(kernel(&m), AbelianGroup::free(2));
    }

    #[test]
    fn cokernel_torsion() {
        let m = IntMatrix::from_i64_rows(&[&[-2]]);
        assert_eq!(cokernel(&m), AbelianGroup::cyclic(2));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&IntMatrix::identity(3)), AbelianGroup::trivial());
        assert_eq!(kernel(&IntMatrix::zeros(3, 3)), AbelianGroup::free(3));
        let m = IntMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]);
        assert_eq!(kernel(&m), AbelianGroup::free(1));
    }

    #[test]
    fn direct_sum_examples() {
        let z2 = AbelianGroup::cyclic(2);
        let z3 = AbelianGroup::cyclic(3);
        assert_eq!(direct_sum(&z2, &z3), AbelianGroup::cyclic(6));

        let sum = direct_sum(&z2, &z2);
        assert_eq!(sum.torsion(), &[BigUint::from(2u32), BigUint::from(2u32)]);

        let a = AbelianGroup::free(1);
        let b = AbelianGroup::new(2, [BigUint::from(4u32)]);
        let s = direct_sum(&a, &b);
        assert_eq!(s.rank(), 3);
        assert_eq!(s.torsion(), &[BigUint::from(4u32)]);
    }

    #[test]
    fn regrouping_mixed_orders() {
        // Z/4 + Z/6 = Z/2 + Z/12
        let g = AbelianGroup::new(0, [BigUint::from(4u32), BigUint::from(6u32)]);
        assert_eq!(g.torsion(), &[BigUint::from(2u32), BigUint::from(12u32)]);
    }

    #[test]
    fn rank_routes_agree_on_fixed_cases() {
        for m in [
            IntMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]),
            IntMatrix::from_i64_rows(&[&[0, 0], &[0, 0]]),
            IntMatrix::from_i64_rows(&[&[2, 0, 1], &[0, 3, 1], &[2, 3, 2]]),
        ] {
            assert_eq!(rank_fraction_free(&m), smith_normal_form(&m).rank());
        }
    }

    #[test]
    fn display_groups() {
        assert_eq!(AbelianGroup::trivial().to_string(), "0");
        assert_eq!(AbelianGroup::free(1).to_string(), "Z");
        assert_eq!(
            AbelianGroup::new(2, [BigUint::from(2u32)]).to_string(),
            "Z^2 + Z/2"
        );
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = IntMatrix::from_i64_rows(&[&[1, -2], &[0, 300]]);
        let j = serde_json::to_string(&m).unwrap();
        assert_eq!(j, r#"[["1","-2"],["0","300"]]"#);
        let back: IntMatrix = serde_json::from_str(&j).unwrap();
        assert_eq!(back, m);
    }
}

/// Serde adapter rendering big integers as decimal strings.
pub mod bigint_string {
    use num_bigint::BigInt;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let text = String::deserialize(d)?;
        text.parse()
            .map_err(|_| D::Error::custom(format!("bad integer {text:?}")))
    }
}
