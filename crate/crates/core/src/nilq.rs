//! Truncated group algebras ℚG/I^(q+1) and rational lower-central data.
//!
//! ℚG/I^(q+1) is modeled as T_q/J, where T_q is the free associative algebra
//! on X₁..X_m truncated above degree q and J is the two-sided ideal generated
//! by the Magnus images `μ(r) − 1` of the relators. Words of T_q are indexed
//! degree by degree (shortlex), so an echelon basis of J whose pivot is the
//! lowest index of each vector is automatically compatible with the degree
//! filtration: the pivots lying in degree k count the initial forms of J in
//! degree k.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{h1_integral_iso, h1_rational_map, rational_rank, relation_matrix, QMatrix};
use crate::liehom;
use crate::par::{self, Exec};
use crate::presentations::{hom_welldefined_upto, GroupHom, Presentation, WellDefinedness, Word};
use crate::report::{MapVerdict, Status};

pub const DEFAULT_MAX_BASIS: usize = 5000;

/// Resource limits for truncated computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// Upper bound on m^q, the number of top-degree words.
    pub max_basis: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_basis: DEFAULT_MAX_BASIS,
        }
    }
}

impl Bounds {
    /// Defaults, overridden by `GSL_MAX_BASIS` when set to a positive integer.
    pub fn from_env() -> Self {
        let max_basis = std::env::var("GSL_MAX_BASIS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_BASIS);
        Bounds { max_basis }
    }

    pub fn check(&self, m: usize, q: usize) -> Result<()> {
        let top = (m as u128).checked_pow(q as u32);
        match top {
            Some(t) if t <= self.max_basis as u128 => Ok(()),
            _ => Err(Error::DegreeOverflow {
                generators: m,
                degree: q,
                bound: self.max_basis,
            }),
        }
    }
}

/// Indexing of the words of length ≤ q over m letters. The word
/// `X_{i1}…X_{ik}` has global index `offset(k) + Σ i_j·m^(k−j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSpace {
    m: usize,
    q: usize,
    offsets: Vec<usize>,
    powers: Vec<usize>,
}

impl WordSpace {
    pub fn new(m: usize, q: usize) -> Self {
        let mut powers = vec![1usize];
        for _ in 0..q {
            let p = powers.last().unwrap().checked_mul(m).expect("word space too large");
            powers.push(p);
        }
        let mut offsets = vec![0usize];
        for p in &powers {
            offsets.push(offsets.last().unwrap() + p);
        }
        WordSpace {
            m,
            q,
            offsets,
            powers,
        }
    }

    pub fn generators(&self) -> usize {
        self.m
    }

    pub fn max_degree(&self) -> usize {
        self.q
    }

    /// Total number of words, Σ_{k≤q} m^k.
    pub fn dim(&self) -> usize {
        self.offsets[self.q + 1]
    }

    pub fn degree_dim(&self, k: usize) -> usize {
        self.powers[k]
    }

    pub fn offset(&self, k: usize) -> usize {
        self.offsets[k]
    }

    pub fn degree_of(&self, idx: usize) -> usize {
        self.offsets.partition_point(|&o| o <= idx) - 1
    }

    pub fn local(&self, idx: usize) -> (usize, usize) {
        let d = self.degree_of(idx);
        (d, idx - self.offsets[d])
    }

    pub fn index_of(&self, letters: &[usize]) -> usize {
        assert!(letters.len() <= self.q);
        let local = letters.iter().fold(0, |acc, &i| acc * self.m + i);
        self.offsets[letters.len()] + local
    }

    pub fn letters(&self, idx: usize) -> Vec<usize> {
        let (d, l) = self.local(idx);
        self.local_letters(d, l)
    }

    pub fn local_letters(&self, d: usize, mut l: usize) -> Vec<usize> {
        let mut out = vec![0; d];
        for slot in out.iter_mut().rev() {
            *slot = l % self.m;
            l /= self.m;
        }
        out
    }

    /// Index of the concatenation, or `None` past degree q.
    pub fn concat(&self, a: usize, b: usize) -> Option<usize> {
        let (da, la) = self.local(a);
        let (db, lb) = self.local(b);
        (da + db <= self.q).then(|| self.offsets[da + db] + la * self.powers[db] + lb)
    }

    /// Index of X_i^j.
    pub fn letter_power(&self, i: usize, j: usize) -> usize {
        let local = (0..j).fold(0, |acc, _| acc * self.m + i);
        self.offsets[j] + local
    }

    pub fn format_word(&self, idx: usize) -> String {
        let letters = self.letters(idx);
        if letters.is_empty() {
            return "1".into();
        }
        letters
            .iter()
            .map(|i| format!("X{}", i + 1))
            .collect::<Vec<_>>()
            .join("")
    }
}

type SparseVec = Vec<(usize, BigRational)>;

/// `a + c·b` on index-sorted sparse vectors.
fn axpy(a: &[(usize, BigRational)], c: &BigRational, b: &[(usize, BigRational)]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + c * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Element of T_q: rational coefficients on words of length ≤ q.
#[derive(Debug, Clone)]
pub struct TruncatedElement {
    space: Arc<WordSpace>,
    terms: BTreeMap<usize, BigRational>,
}

impl PartialEq for TruncatedElement {
    fn eq(&self, other: &Self) -> bool {
        self.space.m == other.space.m && self.space.q == other.space.q && self.terms == other.terms
    }
}

impl Eq for TruncatedElement {}

impl TruncatedElement {
    pub fn zero(space: Arc<WordSpace>) -> Self {
        TruncatedElement {
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(space: Arc<WordSpace>) -> Self {
        let mut e = TruncatedElement::zero(space);
        e.terms.insert(0, BigRational::one());
        e
    }

    /// The degree-one symbol X_{i+1}.
    pub fn symbol(space: Arc<WordSpace>, i: usize) -> Self {
        let mut e = TruncatedElement::zero(space.clone());
        if space.q >= 1 {
            e.terms.insert(space.letter_power(i, 1), BigRational::one());
        }
        e
    }

    pub fn space(&self) -> &Arc<WordSpace> {
        &self.space
    }

    pub fn q(&self) -> usize {
        self.space.q
    }

    pub fn m(&self) -> usize {
        self.space.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, letters: &[usize]) -> BigRational {
        self.terms
            .get(&self.space.index_of(letters))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&0).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Dense coefficient vector of length Σ_{k≤q} m^k.
    pub fn coeff_vector(&self) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.space.dim()];
        for (k, c) in &self.terms {
            v[*k] = c.clone();
        }
        v
    }

    fn add_term(&mut self, idx: usize, c: BigRational) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
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

    pub fn add(&self, other: &TruncatedElement) -> TruncatedElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TruncatedElement) -> TruncatedElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &TruncatedElement) -> TruncatedElement {
        assert_eq!(self.space.m, other.space.m);
        assert_eq!(self.space.q, other.space.q);
        let mut out = TruncatedElement::zero(self.space.clone());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(ab) = self.space.concat(*a, *b) {
                    out.add_term(ab, ca * cb);
                }
            }
        }
        out
    }

    /// Right multiplication by Σ_j coeffs[j]·X_i^j.
    fn mul_letter_series(&self, i: usize, coeffs: &[BigRational]) -> TruncatedElement {
        let sp = &self.space;
        let mut out = TruncatedElement::zero(sp.clone());
        for (idx, c) in &self.terms {
            let d = sp.degree_of(*idx);
            for (j, cj) in coeffs.iter().enumerate().take(sp.q - d + 1) {
                if cj.is_zero() {
                    continue;
                }
                let k = sp.concat(*idx, sp.letter_power(i, j)).unwrap();
                out.add_term(k, c * cj);
            }
        }
        out
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.terms.keys().next().map(|&k| self.space.degree_of(k))
    }

    fn sparse(&self) -> SparseVec {
        self.terms.iter().map(|(k, c)| (*k, c.clone())).collect()
    }
}

/// Coefficients of (1+X)^e truncated at degree q.
fn binomial_series(e: i64, q: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(q + 1);
    let mut c = BigInt::one();
    out.push(BigRational::one());
    for j in 1..=q {
        // C(e, j) = C(e, j−1)·(e − j + 1)/j, valid for negative e as well.
        c = c * BigInt::from(e - j as i64 + 1) / BigInt::from(j as i64);
        out.push(BigRational::from_integer(c.clone()));
    }
    out
}

/// Magnus image in a given word space.
pub fn magnus_in(space: &Arc<WordSpace>, w: &Word) -> TruncatedElement {
    let mut e = TruncatedElement::one(space.clone());
    for &(g, k) in w.runs() {
        assert!(g < space.m, "letter outside the Magnus alphabet");
        e = e.mul_letter_series(g, &binomial_series(k, space.q));
    }
    e
}

/// Magnus image of `w` over `m` symbols truncated at degree `q`.
pub fn magnus_image(w: &Word, m: usize, q: usize) -> TruncatedElement {
    let m = m.max(w.max_generator().map_or(0, |g| g + 1));
    magnus_in(&Arc::new(WordSpace::new(m, q)), w)
}

/// Dimension of the degree-k part of the free Lie algebra on m generators.
pub fn witt(m: u64, k: u64) -> u64 {
    assert!(k >= 1);
    let mut total: i128 = 0;
    for d in 1..=k {
        if !k.is_multiple_of(d) {
            continue;
        }
        let mu = mobius(d);
        if mu != 0 {
            total += mu as i128 * (m as i128).pow((k / d) as u32);
        }
    }
    (total / k as i128) as u64
}

fn mobius(mut n: u64) -> i32 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Initial forms of J in one degree, in local word coordinates.
#[derive(Debug, Clone, Default)]
struct GradedEchelon {
    rows: Vec<SparseVec>,
    pivot_of: HashMap<usize, usize>,
    normal: Vec<usize>,
    normal_pos: HashMap<usize, usize>,
}

impl GradedEchelon {
    fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut pos = 0;
        while pos < v.len() {
            match self.pivot_of.get(&v[pos].0) {
                Some(&r) => {
                    let c = -v[pos].1.clone();
                    v = axpy(&v, &c, &self.rows[r]);
                }
                None => pos += 1,
            }
        }
        v
    }
}

/// The truncated quotient ℚG/I^(q+1) ≅ T_q/J with its graded dimensions.
#[derive(Debug, Clone)]
pub struct NilpotentQuotientData {
    presentation: Presentation,
    q: usize,
    space: Arc<WordSpace>,
    basis: Vec<SparseVec>,
    pivot_of: HashMap<usize, usize>,
    a: Vec<usize>,
    l: Vec<usize>,
    graded: Vec<GradedEchelon>,
}

/// Model ℚG/I^(q+1) for the group presented by `p`.
pub fn truncated_quotient(p: &Presentation, q: usize, bounds: &Bounds) -> Result<NilpotentQuotientData> {
    if q == 0 {
        return Err(Error::InvalidArgument("truncation degree must be ≥ 1".into()));
    }
    let m = p.num_generators();
    bounds.check(m, q)?;
    let space = Arc::new(WordSpace::new(m, q));
    let mut basis: Vec<SparseVec> = Vec::new();
    let mut pivot_of: HashMap<usize, usize> = HashMap::new();
    let mut queue: VecDeque<SparseVec> = p
        .relators()
        .iter()
        .map(|r| {
            let mut v = magnus_in(&space, r);
            v.add_term(0, -BigRational::one());
            v.sparse()
        })
        .collect();
    while let Some(v) = queue.pop_front() {
        let v = reduce_with(&basis, &pivot_of, v);
        let Some((p0, c0)) = v.first().cloned() else {
            continue;
        };
        let inv = c0.recip();
        let v: SparseVec = v.into_iter().map(|(k, c)| (k, c * &inv)).collect();
        for i in 0..m {
            let x = space.letter_power(i, 1);
            let left: SparseVec = v
                .iter()
                .filter_map(|(k, c)| space.concat(x, *k).map(|j| (j, c.clone())))
                .collect();
            let right: SparseVec = v
                .iter()
                .filter_map(|(k, c)| space.concat(*k, x).map(|j| (j, c.clone())))
                .collect();
            if !left.is_empty() {
                queue.push_back(left);
            }
            if !right.is_empty() {
                queue.push_back(right);
            }
        }
        pivot_of.insert(p0, basis.len());
        basis.push(v);
    }

    // Initial forms per degree.
    let mut graded: Vec<GradedEchelon> = vec![GradedEchelon::default(); q + 1];
    for v in &basis {
        let d = space.degree_of(v[0].0);
        let lo = space.offset(d);
        let hi = space.offset(d + 1);
        let part: SparseVec = v
            .iter()
            .filter(|(k, _)| *k < hi)
            .map(|(k, c)| (k - lo, c.clone()))
            .collect();
        let g = &mut graded[d];
        g.pivot_of.insert(part[0].0, g.rows.len());
        g.rows.push(part);
    }
    let mut a = Vec::with_capacity(q);
    for (k, g) in graded.iter_mut().enumerate() {
        g.normal = (0..space.degree_dim(k)).filter(|l| !g.pivot_of.contains_key(l)).collect();
        g.normal_pos = g.normal.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        if k >= 1 {
            a.push(g.normal.len());
        }
    }
    let l = pbw_invert(&a)?;
    Ok(NilpotentQuotientData {
        presentation: p.clone(),
        q,
        space,
        basis,
        pivot_of,
        a,
        l,
        graded,
    })
}

fn reduce_with(basis: &[SparseVec], pivot_of: &HashMap<usize, usize>, mut v: SparseVec) -> SparseVec {
    let mut pos = 0;
    while pos < v.len() {
        match pivot_of.get(&v[pos].0) {
            Some(&r) => {
                let c = -v[pos].1.clone();
                v = axpy(&v, &c, &basis[r]);
            }
            None => pos += 1,
        }
    }
    v
}

/// Recover l₁..l_q from a₁..a_q using
/// ∏_k (1 − t^k)^(−l_k) = 1 + Σ a_k t^k  (mod t^(q+1)).
pub fn pbw_invert(a: &[usize]) -> Result<Vec<usize>> {
    let q = a.len();
    let mut series = vec![0i128; q + 1];
    series[0] = 1;
    let mut l = Vec::with_capacity(q);
    for k in 1..=q {
        let lk = a[k - 1] as i128 - series[k];
        if lk < 0 {
            return Err(Error::InconsistentPbw { degree: k, value: lk });
        }
        for _ in 0..lk {
            for n in k..=q {
                series[n] += series[n - k];
            }
        }
        l.push(lk as usize);
    }
    Ok(l)
}

/// Coefficients of ∏_k (1 − t^k)^(−l_k) up to t^q.
pub fn pbw_series(l: &[usize]) -> Vec<i128> {
    let q = l.len();
    let mut series = vec![0i128; q + 1];
    series[0] = 1;
    for (k, &lk) in l.iter().enumerate().map(|(i, x)| (i + 1, x)) {
        for _ in 0..lk {
            for n in k..=q {
                series[n] += series[n - k];
            }
        }
    }
    series
}

impl NilpotentQuotientData {
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn generators(&self) -> usize {
        self.space.m
    }

    pub fn space(&self) -> &Arc<WordSpace> {
        &self.space
    }

    /// a₁..a_q.
    pub fn a(&self) -> &[usize] {
        &self.a
    }

    /// l₁..l_q.
    pub fn l(&self) -> &[usize] {
        &self.l
    }

    /// Dimension of J inside T_q.
    pub fn ideal_dimension(&self) -> usize {
        self.basis.len()
    }

    /// Echelon basis of J as dense vectors over the word basis.
    pub fn ideal_basis(&self) -> QMatrix {
        let n = self.space.dim();
        let rows = self
            .basis
            .iter()
            .map(|v| {
                let mut r = vec![BigRational::zero(); n];
                for (k, c) in v {
                    r[*k] = c.clone();
                }
                r
            })
            .collect();
        QMatrix::from_rows(n, rows)
    }

    /// ∏(1−t^k)^(−l_k) ≡ 1 + Σ a_k t^k (mod t^(q+1)).
    pub fn hilbert_identity_holds(&self) -> bool {
        let s = pbw_series(&self.l);
        s[0] == 1 && (1..=self.q).all(|k| s[k] == self.a[k - 1] as i128)
    }

    pub fn magnus(&self, w: &Word) -> TruncatedElement {
        magnus_in(&self.space, w)
    }

    /// Canonical representative of `e` modulo J.
    pub fn normal_form(&self, e: &TruncatedElement) -> TruncatedElement {
        let v = reduce_with(&self.basis, &self.pivot_of, e.sparse());
        TruncatedElement {
            space: self.space.clone(),
            terms: v.into_iter().collect(),
        }
    }

    /// Whether `w` maps to 1 in ℚG/I^(q+1).
    pub fn is_trivial(&self, w: &Word) -> bool {
        let mut v = self.magnus(w);
        v.add_term(0, -BigRational::one());
        reduce_with(&self.basis, &self.pivot_of, v.sparse()).is_empty()
    }

    /// a_k, the dimension of the degree-k graded piece.
    pub fn gr_dim(&self, k: usize) -> usize {
        self.graded[k].normal.len()
    }

    /// Local indices of the degree-k words that span gr_k.
    pub fn gr_normal_words(&self, k: usize) -> &[usize] {
        &self.graded[k].normal
    }

    /// Coordinates in gr_k of a degree-k combination of words.
    pub fn gr_reduce(&self, k: usize, v: SparseVec) -> Vec<BigRational> {
        let mut v = v;
        v.sort_by_key(|x| x.0);
        let g = &self.graded[k];
        let r = g.reduce(v);
        let mut out = vec![BigRational::zero(); g.normal.len()];
        for (l, c) in r {
            out[g.normal_pos[&l]] = c;
        }
        out
    }

    /// Expand gr_k coordinates to local word coordinates.
    pub fn gr_expand(&self, k: usize, x: &[BigRational]) -> SparseVec {
        self.graded[k]
            .normal
            .iter()
            .zip(x.iter())
            .filter(|(_, c)| !c.is_zero())
            .map(|(&l, c)| (l, c.clone()))
            .collect()
    }

    /// Class of X_{i+1} in gr₁.
    pub fn gr_generator(&self, i: usize) -> Vec<BigRational> {
        self.gr_reduce(1, vec![(i, BigRational::one())])
    }

    /// Product gr_j × gr_k → gr_{j+k}.
    pub fn gr_product(&self, j: usize, x: &[BigRational], k: usize, y: &[BigRational]) -> Vec<BigRational> {
        assert!(j + k <= self.q, "product beyond the truncation degree");
        let xs = self.gr_expand(j, x);
        let ys = self.gr_expand(k, y);
        let pk = self.space.degree_dim(k);
        let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (a, ca) in &xs {
            for (b, cb) in &ys {
                let e = acc.entry(a * pk + b).or_insert_with(BigRational::zero);
                *e += ca * cb;
            }
        }
        let v = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.gr_reduce(j + k, v)
    }

    /// Commutator xy − yx in gr_{j+k}.
    pub fn gr_bracket(&self, j: usize, x: &[BigRational], k: usize, y: &[BigRational]) -> Vec<BigRational> {
        let xy = self.gr_product(j, x, k, y);
        let yx = self.gr_product(k, y, j, x);
        xy.into_iter().zip(yx).map(|(a, b)| a - b).collect()
    }
}

/// Which graded objects an induced-map report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrLevel {
    /// gr of the lower central series: the Lie algebra, dimensions l_k.
    Lie,
    /// gr of the group algebra, dimensions a_k.
    Algebra,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrDegree {
    pub k: usize,
    pub a_src: usize,
    pub a_tgt: usize,
    pub l_src: usize,
    pub l_tgt: usize,
    pub rank: usize,
    pub verdict: MapVerdict,
}

/// Induced maps on graded pieces, one matrix per degree (rows index the
/// source basis, columns the target basis).
#[derive(Debug, Clone, Serialize)]
pub struct GrMapReport {
    pub level: GrLevel,
    pub degrees: Vec<GrDegree>,
    #[serde(skip)]
    pub matrices: Vec<QMatrix>,
}

impl GrMapReport {
    pub fn verdict(&self, k: usize) -> MapVerdict {
        self.degrees[k - 1].verdict
    }

    pub fn iso_through(&self) -> usize {
        self.degrees.iter().take_while(|d| d.verdict.is_iso()).count()
    }

    pub fn all_iso(&self) -> bool {
        self.degrees.iter().all(|d| d.verdict.is_iso())
    }
}

/// Algebra-level matrices of the map gr(ℚA) → gr(ℚB) in degrees 1..=q. The
/// class of X_{i1}…X_{ik} maps to the product of the degree-one parts of
/// the images, which are the rows of the exponent-sum matrix.
pub fn algebra_gr_matrices(
    h: &GroupHom,
    src: &NilpotentQuotientData,
    tgt: &NilpotentQuotientData,
    exec: Exec,
) -> Vec<QMatrix> {
    let e = h.exponent_matrix();
    let mb = tgt.generators();
    let q = src.q().min(tgt.q());
    (1..=q)
        .map(|k| {
            let words = src.gr_normal_words(k);
            let rows = par::map(exec, words, |&w| {
                let letters = src.space().local_letters(k, w);
                let mut v: BTreeMap<usize, BigRational> = BTreeMap::new();
                v.insert(0, BigRational::one());
                for &i in &letters {
                    let mut next: BTreeMap<usize, BigRational> = BTreeMap::new();
                    for (l, c) in &v {
                        for (j, &x) in e[i].iter().enumerate() {
                            if x != 0 {
                                let t = next.entry(l * mb + j).or_insert_with(BigRational::zero);
                                *t += c * BigRational::from_integer(x.into());
                            }
                        }
                    }
                    v = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                }
                tgt.gr_reduce(k, v.into_iter().collect())
            });
            QMatrix::from_rows(tgt.gr_dim(k), rows)
        })
        .collect()
}

fn require_well_defined(h: &GroupHom, q: usize, bounds: &Bounds) -> Result<()> {
    match hom_welldefined_upto(h, q, bounds)? {
        WellDefinedness::CertifiedUpto { .. } => Ok(()),
        WellDefinedness::Refuted { relator, .. } => Err(Error::NotWellDefined { relator, degree: q }),
    }
}

/// Matrices and verdicts of the maps induced by `h` on graded pieces in
/// degrees 1..=q.
pub fn induced_gr_maps(h: &GroupHom, q: usize, level: GrLevel, bounds: &Bounds) -> Result<GrMapReport> {
    require_well_defined(h, q, bounds)?;
    let src = truncated_quotient(h.source(), q, bounds)?;
    let tgt = truncated_quotient(h.target(), q, bounds)?;
    induced_gr_maps_with(h, &src, &tgt, level, Exec::default())
}

/// As [`induced_gr_maps`] with precomputed quotients (well-definedness is
/// the caller's responsibility).
pub fn induced_gr_maps_with(
    h: &GroupHom,
    src: &NilpotentQuotientData,
    tgt: &NilpotentQuotientData,
    level: GrLevel,
    exec: Exec,
) -> Result<GrMapReport> {
    let q = src.q().min(tgt.q());
    let alg = algebra_gr_matrices(h, src, tgt, exec);
    let matrices = match level {
        GrLevel::Algebra => alg,
        GrLevel::Lie => {
            let ls = liehom::extract_graded_lie(src)?;
            let lt = liehom::extract_graded_lie(tgt)?;
            liehom::lie_maps_from_algebra(&ls, &lt, &alg)?
        }
    };
    let degrees = matrices
        .iter()
        .enumerate()
        .map(|(i, mat)| {
            let k = i + 1;
            let rank = mat.rank();
            let (sd, td) = match level {
                GrLevel::Lie => (src.l()[i], tgt.l()[i]),
                GrLevel::Algebra => (src.a()[i], tgt.a()[i]),
            };
            GrDegree {
                k,
                a_src: src.a()[i],
                a_tgt: tgt.a()[i],
                l_src: src.l()[i],
                l_tgt: tgt.l()[i],
                rank,
                verdict: MapVerdict::from_ranks(sd, td, rank),
            }
        })
        .take(q)
        .collect();
    Ok(GrMapReport {
        level,
        degrees,
        matrices,
    })
}

/// Upper bound for dim H₂(G;ℚ) from a presentation: the rank of the second
/// homology of the presentation complex, which surjects onto H₂(G;ℚ) and
/// equals it when the presentation is aspherical.
pub fn h2_upper_bound(p: &Presentation) -> usize {
    p.num_relators() - rational_rank(&relation_matrix(p))
}

fn is_identity_map(h: &GroupHom) -> bool {
    h.source() == h.target() && h.images().iter().enumerate().all(|(i, w)| *w == Word::generator(i))
}

/// Status of "H₂(A;ℚ) → H₂(B;ℚ) is onto".
pub fn h2_epi_status(h: &GroupHom, assume: bool) -> Status {
    if is_identity_map(h) || h2_upper_bound(h.target()) == 0 {
        Status::Certified
    } else if assume {
        Status::Assumed
    } else {
        Status::NotCertifiable
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StallingsHypotheses {
    pub h1_rational_iso: Status,
    /// Informational: onto with isomorphic integral abelianizations.
    pub h1_integral_iso: bool,
    pub h2_epi: Status,
    pub h2_target_upper_bound: usize,
}

/// Rational Stallings audit up to degree q.
#[derive(Debug, Clone, Serialize)]
pub struct StallingsReport {
    pub q: usize,
    pub degrees: Vec<GrDegree>,
    pub hypotheses: StallingsHypotheses,
    /// gr-iso (hence gr-mono) in every degree ≤ q.
    pub conclusion_holds: bool,
    pub first_failure: Option<usize>,
    /// Conclusion fails although every hypothesis was certified.
    pub falsification: bool,
    /// Conclusion fails under a user-assumed hypothesis.
    pub assumption_refuted: bool,
}

impl StallingsReport {
    pub fn hypotheses_usable(&self) -> bool {
        self.hypotheses.h1_rational_iso.usable() && self.hypotheses.h2_epi.usable()
    }
}

/// Check the rational Stallings theorem on `h` through degree q: if H₁(;ℚ)
/// is an isomorphism and H₂(;ℚ) is onto, the induced maps on rational
/// lower-central quotients are isomorphisms in every degree.
pub fn stallings_rational_verdict(h: &GroupHom, q: usize, assume_h2: bool, bounds: &Bounds) -> Result<StallingsReport> {
    let gr = induced_gr_maps(h, q, GrLevel::Lie, bounds)?;
    let h1 = h1_rational_map(h);
    let hypotheses = StallingsHypotheses {
        h1_rational_iso: Status::from_bool(h1.is_iso()),
        h1_integral_iso: h1_integral_iso(h),
        h2_epi: h2_epi_status(h, assume_h2),
        h2_target_upper_bound: h2_upper_bound(h.target()),
    };
    let first_failure = gr.degrees.iter().find(|d| !d.verdict.is_iso()).map(|d| d.k);
    let conclusion_holds = first_failure.is_none();
    let certified = hypotheses.h1_rational_iso == Status::Certified && hypotheses.h2_epi == Status::Certified;
    let usable = hypotheses.h1_rational_iso.usable() && hypotheses.h2_epi.usable();
    Ok(StallingsReport {
        q,
        degrees: gr.degrees,
        falsification: certified && !conclusion_holds,
        assumption_refuted: usable && !certified && !conclusion_holds,
        hypotheses,
        conclusion_holds,
        first_failure,
    })
}

/// One side of the rational Dwyer equivalence.
#[derive(Debug, Clone, Serialize)]
pub struct DwyerSide {
    pub holds: bool,
    /// "computed" (graded model) or "assumed".
    pub basis: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct DwyerHypotheses {
    pub h1_rational_iso: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct H2Dims {
    pub source: usize,
    pub target: usize,
}

/// Rational Dwyer audit at level n (graded model).
#[derive(Debug, Clone, Serialize)]
pub struct DwyerReport {
    pub n: usize,
    pub model: &'static str,
    pub degrees: Vec<GrDegree>,
    pub hypotheses: DwyerHypotheses,
    /// gr-iso in degrees 1..=n.
    pub condition1: DwyerSide,
    /// H₂(A;ℚ)/⟨Φ_n⟩ → H₂(B;ℚ)/⟨Φ_n⟩ onto.
    pub condition2: DwyerSide,
    pub dwyer_dim_src: usize,
    pub dwyer_dim_tgt: usize,
    pub dwyer_image_rank: usize,
    /// dim H₂(;ℚ) of the aspherical presentations, when requested.
    pub h2: Option<H2Dims>,
    /// The two conditions disagree although H₁(;ℚ) is an isomorphism.
    pub falsification: bool,
}

/// Evaluate both sides of the rational Dwyer equivalence for `h` at level n.
/// Group H₂ dimensions are reported only when `want_h2` is set, which
/// requires both presentations to be flagged aspherical.
pub fn dwyer_rational_verdict(h: &GroupHom, n: usize, want_h2: bool, bounds: &Bounds) -> Result<DwyerReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be ≥ 1".into()));
    }
    let h2 = if want_h2 {
        for p in [h.source(), h.target()] {
            if !p.aspherical {
                return Err(Error::RequiresAsphericalFlag(p.name.clone()));
            }
        }
        Some(H2Dims {
            source: h2_upper_bound(h.source()),
            target: h2_upper_bound(h.target()),
        })
    } else {
        None
    };
    let q = n.max(1);
    require_well_defined(h, q, bounds)?;
    let src = truncated_quotient(h.source(), q, bounds)?;
    let tgt = truncated_quotient(h.target(), q, bounds)?;
    let gr = induced_gr_maps_with(h, &src, &tgt, GrLevel::Lie, Exec::default())?;
    let cond1 = gr.all_iso();
    let cond2 = if n == 1 {
        liehom::DwyerMapData::trivial()
    } else {
        liehom::dwyer_map_with(h, &src, &tgt, n, Exec::default())?
    };
    let h1 = Status::from_bool(h1_rational_map(h).is_iso());
    let holds2 = cond2.is_epi();
    Ok(DwyerReport {
        n,
        model: "graded",
        degrees: gr.degrees,
        hypotheses: DwyerHypotheses { h1_rational_iso: h1 },
        condition1: DwyerSide {
            holds: cond1,
            basis: "computed",
        },
        condition2: DwyerSide {
            holds: holds2,
            basis: "computed",
        },
        dwyer_dim_src: cond2.dim_src,
        dwyer_dim_tgt: cond2.dim_tgt,
        dwyer_image_rank: cond2.image_rank,
        h2,
        falsification: h1 == Status::Certified && cond1 != holds2,
    })
}

/// `{degrees, hypotheses, falsification}` JSON for an lcs computation.
#[derive(Debug, Clone, Serialize)]
pub struct LcsReport {
    pub presentation: String,
    pub q: usize,
    pub a: Vec<usize>,
    pub l: Vec<usize>,
}

impl From<&NilpotentQuotientData> for LcsReport {
    fn from(d: &NilpotentQuotientData) -> Self {
        LcsReport {
            presentation: d.presentation.name.clone(),
            q: d.q,
            a: d.a.clone(),
            l: d.l.clone(),
        }
    }
}
