//! Laurent polynomials Λ_b = ℚ[t₁^±,…,t_b^±] and matrices over them.
//!
//! Ranks are ranks over the fraction field, computed by fraction-free
//! (Bareiss) elimination. Every division performed is exact in Λ_b.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::QMatrix;

pub const MAX_VARS: usize = 8;

/// Exponent vector; only the first `b` slots are meaningful, the rest are 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub [i32; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn from_exponents(exps: &[i32]) -> Self {
        assert!(exps.len() <= MAX_VARS);
        let mut m = [0; MAX_VARS];
        m[..exps.len()].copy_from_slice(exps);
        Monomial(m)
    }

    pub fn var(i: usize) -> Self {
        let mut m = [0; MAX_VARS];
        m[i] = 1;
        Monomial(m)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
        Monomial(m)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            *a -= b;
        }
        Monomial(m)
    }

    pub fn pow(&self, e: i32) -> Monomial {
        Monomial(self.0.map(|x| x * e))
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

/// An element of Λ_b. Terms with zero coefficient are never stored; the
/// `BTreeMap` order (lex on exponents) makes equality and printing canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} Laurent variables");
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        LaurentPoly::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        LaurentPoly::monomial(nvars, Monomial::one(), c)
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        LaurentPoly::constant(nvars, BigRational::from_integer(c.into()))
    }

    pub fn monomial(nvars: usize, m: Monomial, c: BigRational) -> Self {
        let mut p = LaurentPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// The variable `t_{i+1}`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        LaurentPoly::monomial(nvars, Monomial::var(i), BigRational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigRational)>>(nvars: usize, it: I) -> Self {
        let mut p = LaurentPoly::zero(nvars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    /// A unit of Λ_b is a single term.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &LaurentPoly) -> Result<()> {
        if self.nvars != other.nvars {
            Err(Error::VariableMismatch(self.nvars, other.nvars))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_vars(other)?;
        let mut out = LaurentPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn shift(&self, by: &Monomial) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.mul(by), c.clone())).collect(),
        }
    }

    /// Leading term in lex order on exponents.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Per-variable exponent range (min, max); None for zero.
    pub fn exponent_box(&self) -> Option<Vec<(i32, i32)>> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut bx: Vec<(i32, i32)> = (0..self.nvars).map(|i| (first.0[i], first.0[i])).collect();
        for m in it {
            for (i, b) in bx.iter_mut().enumerate() {
                b.0 = b.0.min(m.0[i]);
                b.1 = b.1.max(m.0[i]);
            }
        }
        Some(bx)
    }

    /// Σ over variables of (max exponent − min exponent): the size of the
    /// Newton box, 0 for units.
    pub fn total_degree(&self) -> i64 {
        self.exponent_box()
            .map(|bx| bx.iter().map(|(lo, hi)| (*hi - *lo) as i64).sum())
            .unwrap_or(0)
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        assert_eq!(self.nvars, d.nvars);
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentPoly::zero(self.nvars));
        }
        let (dm, dc) = d.leading().map(|(m, c)| (*m, c.clone()))?;
        if d.is_unit() {
            let inv = dc.recip();
            let inv_m = Monomial::one().div(&dm);
            return Some(self.shift(&inv_m).scale(&inv));
        }
        // Quotient exponents must lie in box(self) − box(d).
        let sb = self.exponent_box()?;
        let db = d.exponent_box()?;
        let bound: Vec<(i32, i32)> = sb
            .iter()
            .zip(db.iter())
            .map(|(s, t)| (s.0 - t.0, s.1 - t.1))
            .collect();
        let in_bound = |m: &Monomial| (0..self.nvars).all(|i| m.0[i] >= bound[i].0 && m.0[i] <= bound[i].1);
        let mut rem = self.clone();
        let mut q = LaurentPoly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (*m, c.clone())) {
            let qm = rm.div(&dm);
            if !in_bound(&qm) {
                return None;
            }
            let qc = rc / &dc;
            for (m, c) in &d.terms {
                rem.add_term(m.mul(&qm), -(c * &qc));
            }
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Evaluate at a point with nonzero rational coordinates.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert!(point.len() >= self.nvars);
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, x) in point.iter().enumerate().take(self.nvars) {
                let e = m.0[i];
                if e != 0 {
                    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
                    v *= if e > 0 { p } else { p.recip() };
                }
            }
            total += v;
        }
        total
    }

    /// Evaluation at tᵢ = 1: the sum of the coefficients.
    pub fn augmentation(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |acc, c| acc + c)
    }

    /// Multiply by the least common denominator of the coefficients.
    pub fn clear_denominators(&self) -> LaurentPoly {
        let mut l = BigInt::one();
        for c in self.terms.values() {
            l = num_integer::lcm(l, c.denom().clone());
        }
        self.scale(&BigRational::from_integer(l))
    }

    /// Substitute tᵢ ↦ images[i] (monomials of another ring).
    pub fn substitute_monomials(&self, nvars: usize, images: &[Monomial]) -> LaurentPoly {
        let mut out = LaurentPoly::zero(nvars);
        for (m, c) in &self.terms {
            let mut img = Monomial::one();
            for (i, im) in images.iter().enumerate().take(self.nvars) {
                img = img.mul(&im.pow(m.0[i]));
            }
            out.add_term(img, c.clone());
        }
        out
    }

    /// Parse the `.ccx` polynomial grammar: `3*t1^2*t2^-1 - 1/2*t1 + 5`.
    /// In one variable `t` is accepted for `t1`.
    pub fn parse(nvars: usize, text: &str) -> Result<LaurentPoly> {
        if nvars > MAX_VARS {
            return Err(Error::TooManyVariables(nvars));
        }
        let bad = |msg: &str| Error::InvalidArgument(format!("polynomial `{text}`: {msg}"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad("empty"));
        }
        let mut out = LaurentPoly::zero(nvars);
        // Split into signed terms; a sign directly after `^` belongs to an exponent.
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let mut prev: Option<char> = None;
        for c in s.chars() {
            if (c == '+' || c == '-') && prev != Some('^') {
                if !cur.is_empty() {
                    terms.push((neg, std::mem::take(&mut cur)));
                } else if prev.is_some() && prev != Some('+') && prev != Some('-') {
                    return Err(bad("dangling operator"));
                }
                neg = if cur.is_empty() && matches!(prev, Some('+') | Some('-')) {
                    neg ^ (c == '-')
                } else {
                    c == '-'
                };
            } else {
                cur.push(c);
            }
            prev = Some(c);
        }
        if cur.is_empty() {
            return Err(bad("trailing operator"));
        }
        terms.push((neg, cur));
        for (neg, term) in terms {
            let mut coeff = BigRational::one();
            let mut mono = Monomial::one();
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(bad("empty factor"));
                }
                if factor.starts_with('t') {
                    let (var, exp) = match factor.split_once('^') {
                        Some((v, e)) => (v, e.parse::<i32>().map_err(|_| bad("bad exponent"))?),
                        None => (factor, 1),
                    };
                    let idx = if var == "t" {
                        if nvars != 1 {
                            return Err(bad("`t` is only allowed with one variable"));
                        }
                        0
                    } else {
                        let i: usize = var[1..].parse().map_err(|_| bad("bad variable"))?;
                        if i == 0 || i > nvars {
                            return Err(bad("variable index out of range"));
                        }
                        i - 1
                    };
                    mono = mono.mul(&Monomial::var(idx).pow(exp));
                } else {
                    let c = match factor.split_once('/') {
                        Some((n, d)) => {
                            let n: BigInt = n.parse().map_err(|_| bad("bad numerator"))?;
                            let d: BigInt = d.parse().map_err(|_| bad("bad denominator"))?;
                            if d.is_zero() {
                                return Err(bad("zero denominator"));
                            }
                            BigRational::new(n, d)
                        }
                        None => BigRational::from_integer(
                            factor.parse::<BigInt>().map_err(|_| bad("bad coefficient"))?,
                        ),
                    };
                    coeff *= c;
                }
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                factors.push(a.to_string());
            }
            for i in 0..self.nvars {
                let e = m.0[i];
                if e == 0 {
                    continue;
                }
                let name = if self.nvars == 1 {
                    "t".to_string()
                } else {
                    format!("t{}", i + 1)
                };
                if e == 1 {
                    factors.push(name);
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("Laurent variable mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(&-rhs).expect("Laurent variable mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("Laurent variable mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

/// `lp_add`: sum with a variable-count check.
pub fn lp_add(p: &LaurentPoly, q: &LaurentPoly) -> Result<LaurentPoly> {
    p.checked_add(q)
}

/// `lp_mul`: product with a variable-count check.
pub fn lp_mul(p: &LaurentPoly, q: &LaurentPoly) -> Result<LaurentPoly> {
    p.checked_mul(q)
}

/// Dense matrix over Λ_b.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(nvars: usize, rows: usize, cols: usize) -> Self {
        LaurentMatrix {
            rows,
            cols,
            nvars,
            entries: vec![LaurentPoly::zero(nvars); rows * cols],
        }
    }

    pub fn identity(nvars: usize, n: usize) -> Self {
        let mut m = LaurentMatrix::zeros(nvars, n, n);
        for i in 0..n {
            m.set(i, i, LaurentPoly::one(nvars));
        }
        m
    }

    pub fn from_rows(nvars: usize, cols: usize, rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::InvalidArgument(format!(
                    "ragged Laurent matrix: row of length {} in a {}-column matrix",
                    r.len(),
                    cols
                )));
            }
            for p in &r {
                if p.nvars() != nvars {
                    return Err(Error::VariableMismatch(nvars, p.nvars()));
                }
            }
            entries.extend(r);
        }
        Ok(LaurentMatrix {
            rows: nrows,
            cols,
            nvars,
            entries,
        })
    }

    /// Parse rows of polynomial strings.
    pub fn parse(nvars: usize, cols: usize, rows: &[Vec<&str>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| LaurentPoly::parse(nvars, s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        LaurentMatrix::from_rows(nvars, cols, rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentPoly) {
        debug_assert_eq!(v.nvars(), self.nvars);
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[LaurentPoly] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<LaurentPoly>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    pub fn mul(&self, other: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        assert_eq!(self.nvars, other.nvars, "Laurent variable mismatch");
        let mut out = LaurentMatrix::zeros(self.nvars, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> LaurentMatrix {
        let mut out = LaurentMatrix::zeros(self.nvars, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &LaurentPoly) -> LaurentMatrix {
        LaurentMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn vstack(&self, other: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.nvars, other.nvars);
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        LaurentMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries,
        }
    }

    pub fn hstack(&self, other: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.rows, other.rows);
        self.transpose().vstack(&other.transpose()).transpose()
    }

    /// Submatrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> LaurentMatrix {
        let mut out = LaurentMatrix::zeros(self.nvars, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn map_entries<F: Fn(&LaurentPoly) -> LaurentPoly>(&self, nvars: usize, f: F) -> LaurentMatrix {
        LaurentMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Evaluate every entry at a point.
    pub fn eval(&self, point: &[BigRational]) -> QMatrix {
        let rows = (0..self.rows)
            .map(|i| self.row(i).iter().map(|p| p.eval(point)).collect())
            .collect();
        QMatrix::from_rows(self.cols, rows)
    }
}

/// `augment`: evaluate every variable at 1.
pub fn augment(m: &LaurentMatrix) -> QMatrix {
    let rows = (0..m.rows)
        .map(|i| m.row(i).iter().map(LaurentPoly::augmentation).collect())
        .collect();
    QMatrix::from_rows(m.cols, rows)
}

/// Outcome of fraction-free elimination.
#[derive(Debug, Clone)]
pub struct Bareiss {
    pub rank: usize,
    /// Original (row, column) positions of the pivots, in elimination order.
    pub pivots: Vec<(usize, usize)>,
    /// Final pivot: up to sign, the determinant of the pivot minor. One for
    /// rank zero.
    pub last_pivot: LaurentPoly,
    /// Parity of the row and column permutations applied.
    pub sign: i32,
}

impl Bareiss {
    pub fn pivot_rows(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.pivots.iter().map(|p| p.0).collect();
        r.sort_unstable();
        r
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.pivots.iter().map(|p| p.1).collect();
        c.sort_unstable();
        c
    }
}

/// Fraction-free elimination with full pivoting. The pivot is the nonzero
/// entry of least total degree, then fewest terms, then lowest row, then
/// lowest column.
pub fn bareiss(m: &LaurentMatrix) -> Bareiss {
    let nvars = m.nvars;
    let mut a: Vec<Vec<LaurentPoly>> = m.row_vecs();
    let mut row_idx: Vec<usize> = (0..m.rows).collect();
    let mut col_idx: Vec<usize> = (0..m.cols).collect();
    let mut prev = LaurentPoly::one(nvars);
    let mut pivots = Vec::new();
    let mut sign = 1;
    let n = m.rows.min(m.cols);
    for k in 0..n {
        let mut best: Option<(i64, usize, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, e) in row.iter().enumerate().skip(k) {
                if e.is_zero() {
                    continue;
                }
                let key = (e.total_degree(), e.num_terms(), row_idx[i], col_idx[j]);
                if best.is_none_or(|b| (key.0, key.1, key.2, key.3) < (b.0, b.1, row_idx[b.2], col_idx[b.3])) {
                    best = Some((key.0, key.1, i, j));
                }
            }
        }
        let Some((_, _, pi, pj)) = best else {
            break;
        };
        if pi != k {
            a.swap(pi, k);
            row_idx.swap(pi, k);
            sign = -sign;
        }
        if pj != k {
            for row in a.iter_mut() {
                row.swap(pj, k);
            }
            col_idx.swap(pj, k);
            sign = -sign;
        }
        pivots.push((row_idx[k], col_idx[k]));
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..m.cols {
                let num = &(&pivot_row[k] * &row[j]) - &(&lead * &pivot_row[j]);
                row[j] = num
                    .div_exact(&prev)
                    .expect("Bareiss division is exact over an integral domain");
            }
            row[k] = LaurentPoly::zero(nvars);
        }
        prev = a[k][k].clone();
    }
    Bareiss {
        rank: pivots.len(),
        pivots,
        last_pivot: prev,
        sign,
    }
}

/// Rank over Frac(Λ_b).
pub fn bareiss_rank(m: &LaurentMatrix) -> usize {
    bareiss(m).rank
}

/// `cols − rank`: dimension over Frac(Λ_b) of the kernel of `x ↦ M·x`.
pub fn kernel_rank(m: &LaurentMatrix) -> usize {
    m.cols() - bareiss_rank(m)
}

/// Determinant of a square matrix.
pub fn determinant(m: &LaurentMatrix) -> LaurentPoly {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    if m.rows == 0 {
        return LaurentPoly::one(m.nvars);
    }
    let b = bareiss(m);
    if b.rank < m.rows {
        return LaurentPoly::zero(m.nvars);
    }
    if b.sign < 0 {
        -&b.last_pivot
    } else {
        b.last_pivot
    }
}

/// Solution of `w·M = v` over Frac(Λ_b) as polynomial numerators over one
/// common denominator.
#[derive(Debug, Clone)]
pub struct LeftSolution {
    pub numerators: Vec<LaurentPoly>,
    pub denominator: LaurentPoly,
}

/// Cramer data for a fixed matrix: a nonsingular pivot minor.
struct PivotMinor {
    rows: Vec<usize>,
    cols: Vec<usize>,
    minor: LaurentMatrix,
    det: LaurentPoly,
}

fn pivot_minor(m: &LaurentMatrix) -> PivotMinor {
    let b = bareiss(m);
    let rows = b.pivot_rows();
    let cols = b.pivot_cols();
    let minor = m.select(&rows, &cols);
    let det = determinant(&minor);
    PivotMinor {
        rows,
        cols,
        minor,
        det,
    }
}

impl PivotMinor {
    /// Numerators of `w·minor = rhs` by Cramer's rule (replace row j).
    fn cramer(&self, rhs: &[LaurentPoly]) -> Vec<LaurentPoly> {
        (0..self.rows.len())
            .map(|j| {
                let mut a = self.minor.clone();
                for (c, v) in rhs.iter().enumerate() {
                    a.set(j, c, v.clone());
                }
                determinant(&a)
            })
            .collect()
    }
}

/// Solve `w·M = v`; `None` if `v` is not in the row space over the fraction
/// field.
pub fn solve_left(m: &LaurentMatrix, v: &[LaurentPoly]) -> Option<LeftSolution> {
    assert_eq!(v.len(), m.cols);
    let nvars = m.nvars;
    let pm = pivot_minor(m);
    let rhs: Vec<LaurentPoly> = pm.cols.iter().map(|&c| v[c].clone()).collect();
    let nums = pm.cramer(&rhs);
    let mut numerators = vec![LaurentPoly::zero(nvars); m.rows];
    for (k, &r) in pm.rows.iter().enumerate() {
        numerators[r] = nums[k].clone();
    }
    // Verify on every column: Σ numᵣ·M[r][c] = det·v[c].
    for c in 0..m.cols {
        let mut lhs = LaurentPoly::zero(nvars);
        for (r, n) in numerators.iter().enumerate() {
            if !n.is_zero() {
                lhs = &lhs + &(n * m.get(r, c));
            }
        }
        if lhs != &pm.det * &v[c] {
            return None;
        }
    }
    Some(LeftSolution {
        numerators,
        denominator: pm.det,
    })
}

/// Polynomial basis of the left kernel `{x : x·M = 0}` over Frac(Λ_b), one
/// row per non-pivot row of `M`.
pub fn left_kernel_basis(m: &LaurentMatrix) -> LaurentMatrix {
    let nvars = m.nvars;
    let pm = pivot_minor(m);
    let others: Vec<usize> = (0..m.rows).filter(|r| !pm.rows.contains(r)).collect();
    let mut out = LaurentMatrix::zeros(nvars, others.len(), m.rows);
    for (k, &i) in others.iter().enumerate() {
        let rhs: Vec<LaurentPoly> = pm.cols.iter().map(|&c| -m.get(i, c)).collect();
        let nums = pm.cramer(&rhs);
        out.set(k, i, pm.det.clone());
        for (j, &r) in pm.rows.iter().enumerate() {
            out.set(k, r, nums[j].clone());
        }
    }
    out
}

/// Rank of `M` evaluated at `point`.
pub fn rank_at_point(m: &LaurentMatrix, point: &[BigRational]) -> usize {
    m.eval(point).rank()
}

/// Probabilistic cross-check of [`bareiss_rank`]: evaluate at random
/// points off the zero locus of the final pivot (where the pivot minor
/// stays nonsingular, so the evaluated rank is exact).
pub fn evaluation_rank<R: rand::Rng>(m: &LaurentMatrix, rng: &mut R, retries: usize) -> Option<usize> {
    let b = bareiss(m);
    for _ in 0..retries.max(1) {
        let point: Vec<BigRational> = (0..m.nvars)
            .map(|_| {
                let mut x = 0i64;
                while x == 0 {
                    x = rng.gen_range(-7i64..=7);
                }
                BigRational::new(x.into(), BigInt::from(rng.gen_range(1i64..=5)))
            })
            .collect();
        if b.rank > 0 && b.last_pivot.eval(&point).is_zero() {
            continue;
        }
        return Some(rank_at_point(m, &point));
    }
    None
}
