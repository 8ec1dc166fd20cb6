//! Exact linear algebra over ℤ and ℚ.
//!
//! [`IntMatrix`] carries arbitrary-precision entries; [`smith_normal_form`]
//! returns unimodular transforms with `U·A·V = D`. [`QMatrix`] is a dense
//! rational matrix used for ranks and kernels over ℚ.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::presentations::{GroupHom, Presentation};

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
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Build from rows of machine integers; `cols` is needed for 0-row input.
    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged integer matrix");
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut prev = BigInt::one();
        let mut sign = 1;
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                    m[i][j] = v;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        if n == 0 {
            return BigInt::one();
        }
        prev * sign
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c · row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * c;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += c · col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * c;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of `d`, length `min(rows, cols)`; zeros trail.
    pub invariant_factors: Vec<BigInt>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smallest nonzero |entry| in the trailing submatrix, ties to the lowest
/// row and then the lowest column.
fn snf_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            let x = d.get(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if d.get(bi, bj).abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form with transforms: `u · a · v = d`.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (r, c) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let n = r.min(c);
    for t in 0..n {
        loop {
            let Some((pi, pj)) = snf_pivot(&d, t) else {
                break;
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = d.get(t, t).clone();

            let mut dirty = false;
            for i in t + 1..r {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -d.get(i, t).div_floor(&p);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                dirty |= !d.get(i, t).is_zero();
            }
            for j in t + 1..c {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -d.get(t, j).div_floor(&p);
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                dirty |= !d.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            let offender = (t + 1..r)
                .flat_map(|i| (t + 1..c).map(move |j| (i, j)))
                .find(|&(i, j)| !d.get(i, j).is_multiple_of(&p));
            match offender {
                Some((i, _)) => {
                    d.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    let invariant_factors = (0..n).map(|i| d.get(i, i).clone()).collect();
    SnfResult {
        u,
        d,
        v,
        invariant_factors,
    }
}

/// Rank over ℚ by fraction-free elimination (independent of the SNF route).
pub fn rational_rank(a: &IntMatrix) -> usize {
    let mut m: Vec<Vec<BigInt>> = (0..a.rows).map(|i| a.row(i).to_vec()).collect();
    let cols = a.cols;
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            for j in col + 1..cols {
                let v = (&m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j]) / &prev;
                m[i][j] = v;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Dense rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<BigRational>>) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rational matrix");
            data.extend(r);
        }
        QMatrix {
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn from_i64_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        QMatrix::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> QMatrix {
        let mut out = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn vstack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        QMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(r * m.cols + j, p * m.cols + j);
            }
            let inv = m.get(r, col).recip();
            for j in col..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col).clone();
                for j in col..m.cols {
                    if m.get(r, j).is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        // Row-reduce whichever orientation is smaller.
        if self.rows > self.cols {
            self.transpose().rref().1.len()
        } else {
            self.rref().1.len()
        }
    }

    /// Basis of the left kernel `{x : x·A = 0}` as rows.
    pub fn left_kernel(&self) -> QMatrix {
        // x·A = 0  ⇔  Aᵀ·xᵀ = 0
        let (r, pivots) = self.transpose().rref();
        let n = self.rows;
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut out = QMatrix::zeros(free.len(), n);
        for (k, &f) in free.iter().enumerate() {
            out.set(k, f, BigRational::one());
            for (pi, &pc) in pivots.iter().enumerate() {
                out.set(k, pc, -r.get(pi, f).clone());
            }
        }
        out
    }

    /// Coordinates of the rows of `v` in the row basis `self` (rows assumed
    /// independent): `C` with `C·self = v`, or `None` if some row of `v` is
    /// outside the row space.
    pub fn express_rows(&self, v: &QMatrix) -> Option<QMatrix> {
        assert_eq!(self.cols, v.cols);
        let r = self.rows;
        // Solve selfᵀ·c = vᵀ column by column via one rref of [selfᵀ | vᵀ].
        let aug = self.vstack(v).transpose();
        let (red, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= r) || pivots.len() < r {
            return None;
        }
        let mut out = QMatrix::zeros(v.rows, r);
        for s in 0..v.rows {
            for i in 0..r {
                out.set(s, i, red.get(i, r + s).clone());
            }
        }
        Some(out)
    }

    pub fn hstack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        self.transpose().vstack(&other.transpose()).transpose()
    }

    /// Submatrix of the given rows.
    pub fn select_rows(&self, rows: &[usize]) -> QMatrix {
        QMatrix::from_rows(self.cols, rows.iter().map(|&i| self.row(i).to_vec()).collect())
    }
}

/// Incrementally built row echelon basis over ℚ. Rows are kept with a
/// unit pivot; inserted rows are reduced against all earlier pivots.
#[derive(Debug, Clone, Default)]
pub struct RowEchelon {
    cols: usize,
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl RowEchelon {
    pub fn new(cols: usize) -> Self {
        RowEchelon {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` after elimination against the current pivots.
    pub fn reduce(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols);
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row.iter()) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    /// Insert `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &[BigRational]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        self.rows.push((p, r));
        true
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }
}

/// Exponent-sum matrix of the relators (relators × generators).
pub fn relation_matrix(p: &Presentation) -> IntMatrix {
    let m = p.num_generators();
    let rows: Vec<Vec<i64>> = p.relators().iter().map(|r| r.exponent_vector(m)).collect();
    IntMatrix::from_rows(m, &rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianizationData {
    /// Invariant factors greater than one.
    pub torsion_coefficients: Vec<BigInt>,
    pub free_rank: usize,
    /// Generators × free_rank: image of each generator in a chosen basis of
    /// H₁/torsion ≅ ℤ^b.
    pub basis_map: IntMatrix,
}

impl AbelianizationData {
    /// Human-readable group, e.g. `Z^2 + Z/2`.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            b => parts.push(format!("Z^{b}")),
        }
        for t in &self.torsion_coefficients {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Image of each generator in ℤ^b as machine integers.
    pub fn generator_images(&self) -> Vec<Vec<i64>> {
        (0..self.basis_map.rows())
            .map(|i| {
                self.basis_map
                    .row(i)
                    .iter()
                    .map(|x| x.to_i64().expect("abelianization coordinates fit in i64"))
                    .collect()
            })
            .collect()
    }
}

/// H₁ of a presentation from the SNF of its relation matrix.
///
/// With `U·R·V = D`, the map `x ↦ x·V` carries the relation lattice onto
/// `⊕ dᵢℤ`, so the columns of `V` beyond the rank give coordinates on
/// H₁/torsion.
pub fn abelianization(p: &Presentation) -> AbelianizationData {
    let rel = relation_matrix(p);
    let m = p.num_generators();
    let snf = smith_normal_form(&rel);
    let rank = snf.rank();
    let torsion_coefficients = snf
        .invariant_factors
        .iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .cloned()
        .collect();
    let b = m - rank;
    let mut basis_map = IntMatrix::zeros(m, b);
    for i in 0..m {
        for k in 0..b {
            basis_map.set(i, k, snf.v.get(i, rank + k).clone());
        }
    }
    AbelianizationData {
        torsion_coefficients,
        free_rank: b,
        basis_map,
    }
}

/// The map induced on H₁(−;ℚ) by a homomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct H1RationalMap {
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub injective: bool,
    pub surjective: bool,
}

impl H1RationalMap {
    pub fn is_iso(&self) -> bool {
        self.injective && self.surjective
    }
}

/// H₁(A;ℚ) = ℚ^{m_A}/row(R_A) → ℚ^{m_B}/row(R_B), v ↦ v·E with E the
/// exponent-sum matrix of the generator images.
pub fn h1_rational_map(h: &GroupHom) -> H1RationalMap {
    let ra = relation_matrix(h.source());
    let rb = relation_matrix(h.target());
    let mb = h.target().num_generators();
    let e = IntMatrix::from_rows(mb, &h.exponent_matrix());
    let rank_ra = rational_rank(&ra);
    let rank_rb = rational_rank(&rb);
    let stacked = rational_rank(&e.vstack(&rb));
    let source_dim = h.source().num_generators() - rank_ra;
    let target_dim = mb - rank_rb;
    let rank = stacked - rank_rb;
    H1RationalMap {
        source_dim,
        target_dim,
        rank,
        injective: rank == source_dim,
        surjective: rank == target_dim,
    }
}

/// Whether `h` induces an isomorphism on H₁(−;ℤ): it must be onto and the
/// two abelianizations must be isomorphic (f.g. abelian groups are Hopfian).
pub fn h1_integral_iso(h: &GroupHom) -> bool {
    let rb = relation_matrix(h.target());
    let mb = h.target().num_generators();
    let e = IntMatrix::from_rows(mb, &h.exponent_matrix());
    let snf = smith_normal_form(&e.vstack(&rb));
    let onto = snf.rank() == mb && snf.invariant_factors.iter().take(mb).all(|d| d.is_one());
    if !onto {
        return false;
    }
    let a = abelianization(h.source());
    let b = abelianization(h.target());
    a.free_rank == b.free_rank && a.torsion_coefficients == b.torsion_coefficients
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{parse_presentation, Word};
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_snf(a: &IntMatrix) -> SnfResult {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d, "U·A·V ≠ D for\n{a}");
        assert!(s.u.determinant().abs().is_one());
        assert!(s.v.determinant().abs().is_one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let f = &s.invariant_factors;
        for w in f.windows(2) {
            if w[1].is_zero() {
                continue;
            }
            assert!(!w[0].is_zero(), "zero factor before a nonzero one");
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(f.iter().all(|d| !d.is_negative()));
        s
    }

    #[test]
    fn snf_examples() {
        let s = check_snf(&IntMatrix::from_rows(2, &[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.invariant_factors, ints(&[1, 6]));
        let s = check_snf(&IntMatrix::zeros(2, 2));
        assert_eq!(s.invariant_factors, ints(&[0, 0]));
        let s = check_snf(&IntMatrix::identity(3));
        assert_eq!(s.invariant_factors, ints(&[1, 1, 1]));
    }

    /// d_k = gcd of k×k minors / gcd of (k−1)×(k−1) minors, for 2×2 input.
    #[test]
    fn snf_matches_minor_gcd_oracle() {
        let cases = [[2, 0, 0, 3], [4, 6, 8, 10], [0, 5, 0, 0], [6, 4, 9, 6]];
        for c in cases {
            let a = IntMatrix::from_rows(2, &[vec![c[0], c[1]], vec![c[2], c[3]]]);
            let g1 = c.iter().fold(0i64, |g, &x| g.gcd(&x));
            let det = (c[0] * c[3] - c[1] * c[2]).abs();
            let s = check_snf(&a);
            let d1 = s.invariant_factors[0].to_i64().unwrap();
            let d2 = s.invariant_factors[1].to_i64().unwrap();
            assert_eq!(d1, g1);
            assert_eq!(d2, if g1 == 0 { 0 } else { det / g1 });
        }
    }

    #[test]
    fn rational_rank_examples() {
        assert_eq!(rational_rank(&IntMatrix::from_rows(2, &[vec![1, -1]])), 1);
        let m = IntMatrix::from_rows(2, &[vec![2, 4], vec![1, 2]]);
        assert!(m.determinant().is_zero());
        assert_eq!(rational_rank(&m), 1);
        assert_eq!(rational_rank(&IntMatrix::zeros(0, 4)), 0);
    }

    #[test]
    fn abelianization_examples() {
        let tref = parse_presentation("gens a b\nrel a b a b^-1 a^-1 b^-1").unwrap();
        let ab = abelianization(&tref);
        assert_eq!(ab.free_rank, 1);
        assert!(ab.torsion_coefficients.is_empty());
        let imgs = ab.generator_images();
        assert_eq!(imgs[0][0].abs(), 1);
        assert_eq!(imgs[0], imgs[1]);
        assert_eq!(ab.describe(), "Z");

        let f2 = Presentation::free(&["x", "y"]);
        assert_eq!(abelianization(&f2).free_rank, 2);

        let z2 = parse_presentation("gens x\nrel x^2").unwrap();
        let ab = abelianization(&z2);
        assert_eq!(ab.free_rank, 0);
        assert_eq!(ab.torsion_coefficients, ints(&[2]));
        assert_eq!(ab.describe(), "Z/2");
    }

    #[test]
    fn basis_map_kills_relators() {
        let p = parse_presentation("gens a b c\nrel a^2 b^4 c^-2\nrel a b^2 c").unwrap();
        let ab = abelianization(&p);
        let rel = relation_matrix(&p);
        // Relation rows map to torsion: their image in ℤ^b is zero.
        assert!(rel.mul(&ab.basis_map).is_zero());
        assert_eq!(ab.free_rank + ab.torsion_coefficients.len() + 1, 3);
    }

    #[test]
    fn qmatrix_kernel() {
        let m = QMatrix::from_i64_rows(2, &[vec![1, 2], vec![2, 4], vec![0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.left_kernel();
        assert_eq!(k.rows(), 1);
        assert!(k.mul(&m).is_zero());
    }

    #[test]
    fn h1_maps() {
        let f2 = Presentation::free(&["x", "y"]);
        let z2 = parse_presentation("gens x y\nrel x^-1 y^-1 x y").unwrap();
        let h = GroupHom::new(f2.clone(), z2, vec![Word::generator(0), Word::generator(1)])
            .unwrap();
        let m = h1_rational_map(&h);
        assert!(m.is_iso());
        assert!(h1_integral_iso(&h));
        let sq = GroupHom::new(
            f2.clone(),
            f2.clone(),
            vec![Word::power(0, 2), Word::generator(1)],
        )
        .unwrap();
        assert!(h1_rational_map(&sq).is_iso());
        assert!(!h1_integral_iso(&sq));
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (0usize..5, 0usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-6i64..7, r * c).prop_map(move |v| {
                let rows: Vec<Vec<i64>> = v.chunks(c.max(1)).map(|ch| ch.to_vec()).collect();
                if c == 0 {
                    IntMatrix::zeros(r, 0)
                } else {
                    IntMatrix::from_rows(c, &rows)
                }
            })
        })
    }

    proptest! {
        #[test]
        fn snf_invariants(a in small_matrix()) {
            let s = check_snf(&a);
            prop_assert_eq!(rational_rank(&a), s.rank());
            prop_assert_eq!(a.to_qmatrix().rank(), s.rank());
        }

        #[test]
        fn free_rank_lower_bound(rels in proptest::collection::vec(proptest::collection::vec((0usize..3, -3i64..4), 0..5), 0..4)) {
            let words: Vec<Word> = rels.into_iter().map(Word::from_runs).collect();
            let s = words.len();
            let p = Presentation::new("r", vec!["a".into(), "b".into(), "c".into()], words, false).unwrap();
            let ab = abelianization(&p);
            prop_assert!(ab.free_rank + s >= 3);
        }
    }
}
