//! Finite free chain complexes over Λ_b and rank audits.
//!
//! Row convention, as in [`crate::fox`]: `boundaries[p−1]` is ∂_p with one
//! row per basis element of C_p and one column per basis element of C_{p−1};
//! a chain is a row vector `x` and its boundary is `x·∂_p`. The complex
//! condition reads `∂_{p+1}·∂_p = 0`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{h1_rational_map, relation_matrix, IntMatrix};
use crate::fox::{alexander_complex, alexander_complex_with, fox_jacobian, CoefficientSystem};
use crate::laurent::{
    augment, bareiss_rank, left_kernel_basis, solve_left, LaurentMatrix, LaurentPoly, Monomial, MAX_VARS,
};
use crate::nilq::{h2_upper_bound, Bounds};
use crate::par::{self, Exec};
use crate::presentations::{hom_welldefined_upto, GroupHom, Presentation, WellDefinedness, Word};
use crate::report::Status;

/// `0 → C_n → … → C_0 → 0` with free modules C_p = Λ_b^{ranks[p]}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeComplex {
    b: usize,
    ranks: Vec<usize>,
    boundaries: Vec<LaurentMatrix>,
}

#[derive(Debug, Deserialize, Serialize)]
struct CcxFile {
    vars: usize,
    ranks: Vec<usize>,
    boundaries: Vec<Vec<Vec<String>>>,
}

impl FreeComplex {
    /// Shapes are checked; ∂∂ = 0 is not (see [`complex_validate`]).
    pub fn new(b: usize, ranks: Vec<usize>, boundaries: Vec<LaurentMatrix>) -> Result<Self> {
        if b > MAX_VARS {
            return Err(Error::TooManyVariables(b));
        }
        if boundaries.len() + 1 != ranks.len().max(1) {
            return Err(Error::InvalidComplex(format!(
                "{} boundary matrices for {} chain modules",
                boundaries.len(),
                ranks.len()
            )));
        }
        for (i, d) in boundaries.iter().enumerate() {
            if d.nvars() != b {
                return Err(Error::VariableMismatch(b, d.nvars()));
            }
            if (d.rows(), d.cols()) != (ranks[i + 1], ranks[i]) {
                return Err(Error::InvalidComplex(format!(
                    "boundary {}: expected {}×{}, found {}×{}",
                    i + 1,
                    ranks[i + 1],
                    ranks[i],
                    d.rows(),
                    d.cols()
                )));
            }
        }
        Ok(FreeComplex { b, ranks, boundaries })
    }

    pub fn zero(b: usize, ranks: Vec<usize>) -> Self {
        let boundaries = (1..ranks.len())
            .map(|p| LaurentMatrix::zeros(b, ranks[p], ranks[p - 1]))
            .collect();
        FreeComplex { b, ranks, boundaries }
    }

    /// Chain complex `0 → C₂ → C₁ → C₀ → 0` of a presentation complex.
    pub fn from_alexander(c: &crate::fox::AlexanderComplex) -> Self {
        FreeComplex {
            b: c.b,
            ranks: vec![1, c.d1.rows(), c.d2.rows()],
            boundaries: vec![c.d1.clone(), c.d2.clone()],
        }
    }

    pub fn nvars(&self) -> usize {
        self.b
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn top(&self) -> usize {
        self.ranks.len().saturating_sub(1)
    }

    pub fn rank(&self, p: usize) -> usize {
        self.ranks.get(p).copied().unwrap_or(0)
    }

    pub fn boundaries(&self) -> &[LaurentMatrix] {
        &self.boundaries
    }

    /// ∂_p : C_p → C_{p−1}, or a zero matrix outside 1..=top.
    pub fn boundary(&self, p: usize) -> LaurentMatrix {
        if p >= 1 && p <= self.boundaries.len() {
            self.boundaries[p - 1].clone()
        } else {
            LaurentMatrix::zeros(self.b, self.rank(p), if p == 0 { 0 } else { self.rank(p - 1) })
        }
    }

    fn boundary_rank(&self, p: usize) -> usize {
        if p >= 1 && p <= self.boundaries.len() {
            bareiss_rank(&self.boundaries[p - 1])
        } else {
            0
        }
    }

    fn augmented_boundary_rank(&self, p: usize) -> usize {
        if p >= 1 && p <= self.boundaries.len() {
            augment(&self.boundaries[p - 1]).rank()
        } else {
            0
        }
    }

    pub fn from_ccx_str(text: &str) -> Result<Self> {
        let f: CcxFile = serde_json::from_str(text)?;
        if f.vars > MAX_VARS {
            return Err(Error::TooManyVariables(f.vars));
        }
        if f.boundaries.len() + 1 != f.ranks.len().max(1) {
            return Err(Error::InvalidComplex(format!(
                "{} boundary matrices for {} chain modules",
                f.boundaries.len(),
                f.ranks.len()
            )));
        }
        let mut boundaries = Vec::with_capacity(f.boundaries.len());
        for (i, rows) in f.boundaries.iter().enumerate() {
            let (nr, nc) = (f.ranks[i + 1], f.ranks[i]);
            if rows.len() != nr {
                return Err(Error::InvalidComplex(format!(
                    "boundaries[{i}]: expected {nr} rows, found {}",
                    rows.len()
                )));
            }
            let mut m = LaurentMatrix::zeros(f.vars, nr, nc);
            for (r, row) in rows.iter().enumerate() {
                if row.len() != nc {
                    return Err(Error::InvalidComplex(format!(
                        "boundaries[{i}][{r}]: expected {nc} entries, found {}",
                        row.len()
                    )));
                }
                for (c, s) in row.iter().enumerate() {
                    let p = LaurentPoly::parse(f.vars, s)
                        .map_err(|e| Error::InvalidComplex(format!("boundaries[{i}][{r}][{c}]: {e}")))?;
                    m.set(r, c, p);
                }
            }
            boundaries.push(m);
        }
        FreeComplex::new(f.vars, f.ranks, boundaries)
    }

    pub fn to_ccx_string(&self) -> String {
        let f = CcxFile {
            vars: self.b,
            ranks: self.ranks.clone(),
            boundaries: self
                .boundaries
                .iter()
                .map(|d| {
                    (0..d.rows())
                        .map(|r| d.row(r).iter().map(|p| p.to_string()).collect())
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&f).expect("ccx serialization")
    }
}

/// First place where a complex fails its invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ComplexFailure {
    /// Entry (row, col) of ∂_{p+1}·∂_p is nonzero.
    NotAComplex { p: usize, row: usize, col: usize, value: String },
}

impl std::fmt::Display for ComplexFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComplexFailure::NotAComplex { p, row, col, value } => write!(
                f,
                "∂{}·∂{} ≠ 0: entry ({row}, {col}) is {value} (boundaries[{}]·boundaries[{}])",
                p + 1,
                p,
                p,
                p - 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexVerdict {
    pub valid: bool,
    pub failure: Option<ComplexFailure>,
}

pub fn complex_validate(c: &FreeComplex) -> ComplexVerdict {
    for p in 1..c.boundaries.len() {
        let prod = c.boundaries[p].mul(&c.boundaries[p - 1]);
        for row in 0..prod.rows() {
            for col in 0..prod.cols() {
                let v = prod.get(row, col);
                if !v.is_zero() {
                    return ComplexVerdict {
                        valid: false,
                        failure: Some(ComplexFailure::NotAComplex {
                            p,
                            row,
                            col,
                            value: v.to_string(),
                        }),
                    };
                }
            }
        }
    }
    ComplexVerdict {
        valid: true,
        failure: None,
    }
}

/// rank over Frac(Λ_b) of H_p.
pub fn homology_rank(c: &FreeComplex, p: usize) -> usize {
    c.rank(p) - c.boundary_rank(p) - c.boundary_rank(p + 1)
}

/// dim_ℚ H_p of the complex with every tᵢ set to 1.
pub fn augmented_homology_dim(c: &FreeComplex, p: usize) -> usize {
    c.rank(p) - c.augmented_boundary_rank(p) - c.augmented_boundary_rank(p + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrebelRow {
    pub p: usize,
    pub rank_lambda: usize,
    pub dim_q: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrebelReport {
    pub rows: Vec<StrebelRow>,
    pub falsification: bool,
}

/// rank_Λ H_p ≤ dim_ℚ H_p(C ⊗ ℚ) in every dimension.
pub fn strebel_audit(c: &FreeComplex) -> StrebelReport {
    let rows: Vec<StrebelRow> = (0..=c.top())
        .map(|p| {
            let rank_lambda = homology_rank(c, p);
            let dim_q = augmented_homology_dim(c, p);
            StrebelRow {
                p,
                rank_lambda,
                dim_q,
                holds: rank_lambda <= dim_q,
            }
        })
        .collect();
    let falsification = rows.iter().any(|r| !r.holds);
    StrebelReport { rows, falsification }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerReport {
    pub from_ranks: i64,
    pub from_homology: i64,
    pub from_augmented: i64,
    pub falsification: bool,
}

pub fn euler_characteristic_report(c: &FreeComplex) -> EulerReport {
    let alt = |f: &dyn Fn(usize) -> usize| -> i64 {
        (0..=c.top())
            .map(|p| if p % 2 == 0 { f(p) as i64 } else { -(f(p) as i64) })
            .sum()
    };
    let from_ranks = alt(&|p| c.rank(p));
    let from_homology = alt(&|p| homology_rank(c, p));
    let from_augmented = alt(&|p| augmented_homology_dim(c, p));
    EulerReport {
        from_ranks,
        from_homology,
        from_augmented,
        falsification: from_ranks != from_homology || from_ranks != from_augmented,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientBound {
    pub p: usize,
    pub cycles: usize,
    /// rank of H_p(𝒟) = H_p(𝒞)/⟨cycles⟩ over Frac(Λ_b).
    pub k_lambda: usize,
    /// dim_ℚ H_p(𝒟 ⊗ ℚ).
    pub k_q: usize,
    pub rank_before: usize,
    pub boundary_rank_before: usize,
    pub boundary_rank_after: usize,
    pub falsification: bool,
}

/// The complex 𝒟 obtained by adding one free generator in dimension p+1
/// for each given p-cycle, with boundary that cycle.
pub fn quotient_complex(c: &FreeComplex, cycles: &[Vec<LaurentPoly>], p: usize) -> Result<FreeComplex> {
    let b = c.b;
    let np = c.rank(p);
    let dp = c.boundary(p);
    for (i, z) in cycles.iter().enumerate() {
        if z.len() != np || z.iter().any(|e| e.nvars() != b) {
            return Err(Error::InvalidArgument(format!("cycle {i} has the wrong shape")));
        }
        if p >= 1 {
            let row = LaurentMatrix::from_rows(b, np, vec![z.clone()])?;
            if !row.mul(&dp).is_zero() {
                return Err(Error::NotACycle { index: i });
            }
        }
    }
    let s = cycles.len();
    let mut ranks = c.ranks.clone();
    while ranks.len() < p + 2 {
        ranks.push(0);
    }
    ranks[p + 1] += s;
    let mut boundaries: Vec<LaurentMatrix> = (1..ranks.len())
        .map(|i| if i <= c.boundaries.len() { c.boundaries[i - 1].clone() } else { LaurentMatrix::zeros(b, ranks[i], ranks[i - 1]) })
        .collect();
    let added = LaurentMatrix::from_rows(b, np, cycles.to_vec())?;
    boundaries[p] = added.vstack(&c.boundary(p + 1));
    if p + 2 < ranks.len() {
        let old = c.boundary(p + 2);
        boundaries[p + 1] = LaurentMatrix::zeros(b, old.rows(), s).hstack(&old);
    }
    FreeComplex::new(b, ranks, boundaries)
}

/// Rank bound for H_p(𝒞)/⟨cycles⟩: k_Λ ≤ k_ℚ.
pub fn quotient_rank_bound(c: &FreeComplex, cycles: &[Vec<LaurentPoly>], p: usize) -> Result<QuotientBound> {
    let d = quotient_complex(c, cycles, p)?;
    let k_lambda = homology_rank(&d, p);
    let k_q = augmented_homology_dim(&d, p);
    Ok(QuotientBound {
        p,
        cycles: cycles.len(),
        k_lambda,
        k_q,
        rank_before: homology_rank(c, p),
        boundary_rank_before: c.boundary_rank(p + 1),
        boundary_rank_after: d.boundary_rank(p + 1),
        falsification: k_lambda > k_q,
    })
}

/// Chain map f_p : X_p → Y_p (rows index X_p), commuting as
/// `∂^X_p · f_{p−1} = f_p · ∂^Y_p`.
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub source: FreeComplex,
    pub target: FreeComplex,
    pub maps: Vec<LaurentMatrix>,
}

impl ChainMap {
    pub fn new(source: FreeComplex, target: FreeComplex, maps: Vec<LaurentMatrix>) -> Result<Self> {
        if source.b != target.b {
            return Err(Error::VariableMismatch(source.b, target.b));
        }
        for (p, f) in maps.iter().enumerate() {
            if (f.rows(), f.cols()) != (source.rank(p), target.rank(p)) {
                return Err(Error::InvalidComplex(format!("chain map in dimension {p} has the wrong shape")));
            }
        }
        Ok(ChainMap { source, target, maps })
    }

    pub fn identity(c: &FreeComplex) -> Self {
        let maps = c.ranks.iter().map(|&r| LaurentMatrix::identity(c.b, r)).collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            maps,
        }
    }

    pub fn map(&self, p: usize) -> LaurentMatrix {
        self.maps
            .get(p)
            .cloned()
            .unwrap_or_else(|| LaurentMatrix::zeros(self.source.b, self.source.rank(p), self.target.rank(p)))
    }

    /// First dimension where the square fails to commute.
    pub fn commutes(&self) -> Option<usize> {
        let top = self.source.top().max(self.target.top());
        (1..=top).find(|&p| {
            self.source.boundary(p).mul(&self.map(p - 1)) != self.map(p).mul(&self.target.boundary(p))
        })
    }
}

fn place(dst: &mut LaurentMatrix, r0: usize, c0: usize, m: &LaurentMatrix, negate: bool) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m.get(i, j);
            dst.set(r0 + i, c0 + j, if negate { -v } else { v.clone() });
        }
    }
}

/// Z_i = X_{i−1} ⊕ Y_i with ∂(x, y) = (−x·∂^X, x·f + y·∂^Y).
pub fn mapping_cone(f: &ChainMap) -> Result<FreeComplex> {
    if let Some(p) = f.commutes() {
        return Err(Error::InvalidComplex(format!("not a chain map in dimension {p}")));
    }
    let (x, y) = (&f.source, &f.target);
    let b = x.b;
    let top = (x.top() + 1).max(y.top());
    let xr = |i: isize| if i < 0 { 0 } else { x.rank(i as usize) };
    let ranks: Vec<usize> = (0..=top).map(|i| xr(i as isize - 1) + y.rank(i)).collect();
    let mut boundaries = Vec::with_capacity(top);
    for i in 1..=top {
        let mut d = LaurentMatrix::zeros(b, ranks[i], ranks[i - 1]);
        let x_prev = xr(i as isize - 1);
        let x_prev2 = xr(i as isize - 2);
        if i >= 2 {
            place(&mut d, 0, 0, &x.boundary(i - 1), true);
        }
        place(&mut d, 0, x_prev2, &f.map(i - 1), false);
        place(&mut d, x_prev, x_prev2, &y.boundary(i), false);
        boundaries.push(d);
    }
    FreeComplex::new(b, ranks, boundaries)
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoConnectedHypotheses {
    pub h1_rational_mono: Status,
    pub h1_rational_epi: Status,
    /// H₂(B;ℚ) spanned by φ_*H₂(A;ℚ) and B₀-surfaces.
    pub h2_spanned: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoConnectedReport {
    pub b: usize,
    pub hypotheses: TwoConnectedHypotheses,
    pub source_rank: usize,
    pub target_rank: usize,
    pub image_rank: usize,
    pub kernel_rank: usize,
    pub cokernel_rank: usize,
    pub cone_h1_rank: usize,
    pub cone_h2_rank: usize,
    pub kernel_torsion: bool,
    pub cokernel_torsion: bool,
    pub falsification: bool,
}

/// The coefficient system given by `gamma` (target generators × b),
/// checked to kill every target relator.
pub fn coefficient_system_from_gamma(p: &Presentation, gamma: &[Vec<i64>]) -> Result<CoefficientSystem> {
    if gamma.len() != p.num_generators() {
        return Err(Error::InvalidArgument(format!(
            "Γ has {} rows for {} generators",
            gamma.len(),
            p.num_generators()
        )));
    }
    let b = gamma.first().map_or(0, Vec::len);
    if gamma.iter().any(|r| r.len() != b) {
        return Err(Error::InvalidArgument("ragged Γ matrix".into()));
    }
    let g = IntMatrix::from_rows(b, gamma);
    let images = relation_matrix(p).mul(&g);
    if let Some(r) = (0..images.rows()).find(|&r| images.row(r).iter().any(|x| !x.is_zero())) {
        return Err(Error::InvalidCoefficientSystem { relator: r });
    }
    CoefficientSystem::new(b, gamma.to_vec())
}

/// Level-one form of the two-connected proposition: with coefficients in
/// ℚΓ (Γ = ℤ^b through `gamma`), the kernel and cokernel of
/// H₁(A;ℚΓ) → H₁(B;ℚΓ) should be torsion, i.e. of rank 0.
pub fn two_connected_torsion_check(
    h: &GroupHom,
    gamma: &[Vec<i64>],
    assume_h2: bool,
    bounds: &Bounds,
) -> Result<TwoConnectedReport> {
    if let WellDefinedness::Refuted { relator, .. } = hom_welldefined_upto(h, 2, bounds)? {
        return Err(Error::NotWellDefined { relator, degree: 2 });
    }
    let tsys = coefficient_system_from_gamma(h.target(), gamma)?;
    let ssys = tsys.pull_back(h);
    let xa = alexander_complex_with(h.source(), &ssys);
    let yb = alexander_complex_with(h.target(), &tsys);
    let b = tsys.nvars();
    let f1 = fox_jacobian(h.images(), h.target().num_generators(), &tsys);
    // Lift to dimension 2 over Frac(Λ_b): f2·d2^B = d2^A·f1.
    let rhs = xa.d2.mul(&f1);
    let mut numerators = Vec::with_capacity(rhs.rows());
    let mut denom = LaurentPoly::one(b);
    for r in 0..rhs.rows() {
        let sol = solve_left(&yb.d2, rhs.row(r)).ok_or(Error::NotWellDefined { relator: r, degree: 2 })?;
        denom = sol.denominator.clone();
        numerators.push(sol.numerators);
    }
    let f2 = LaurentMatrix::from_rows(b, h.target().num_relators(), numerators)?;
    let x = FreeComplex::from_alexander(&xa);
    let y = FreeComplex::from_alexander(&yb);
    let unit = LaurentMatrix::identity(b, 1).scale(&denom);
    let chain = ChainMap::new(x.clone(), y.clone(), vec![unit, f1.scale(&denom), f2])?;
    let cone = mapping_cone(&chain)?;

    let source_rank = homology_rank(&x, 1);
    let target_rank = homology_rank(&y, 1);
    let cycles = left_kernel_basis(&xa.d1);
    let rank_tb = bareiss_rank(&yb.d2);
    let image_rank = bareiss_rank(&cycles.mul(&f1).vstack(&yb.d2)) - rank_tb;
    let kernel_rank = source_rank - image_rank;
    let cokernel_rank = target_rank - image_rank;

    let h1 = h1_rational_map(h);
    let identity = h.source() == h.target() && h.images().iter().enumerate().all(|(i, w)| *w == Word::generator(i));
    let h2_spanned = if identity || h2_upper_bound(h.target()) == 0 {
        Status::Certified
    } else if assume_h2 {
        Status::Assumed
    } else {
        Status::NotCertifiable
    };
    let mono = Status::from_bool(h1.injective);
    let epi = Status::from_bool(h1.surjective);
    let falsification = mono == Status::Certified
        && h2_spanned.usable()
        && (kernel_rank > 0 || (epi == Status::Certified && cokernel_rank > 0));
    Ok(TwoConnectedReport {
        b,
        hypotheses: TwoConnectedHypotheses {
            h1_rational_mono: mono,
            h1_rational_epi: epi,
            h2_spanned,
        },
        source_rank,
        target_rank,
        image_rank,
        kernel_rank,
        cokernel_rank,
        cone_h1_rank: homology_rank(&cone, 1),
        cone_h2_rank: homology_rank(&cone, 2),
        kernel_torsion: kernel_rank == 0,
        cokernel_torsion: cokernel_rank == 0,
        falsification,
    })
}

/// Parameters of the random complex generator.
#[derive(Debug, Clone, Copy)]
pub struct FuzzParams {
    pub max_vars: usize,
    pub max_top: usize,
    /// Exponents are drawn from −1..=2, so each entry has Newton-box
    /// width at most 3 per variable.
    pub max_terms: usize,
}

impl Default for FuzzParams {
    fn default() -> Self {
        FuzzParams {
            max_vars: 3,
            max_top: 3,
            max_terms: 3,
        }
    }
}

fn random_monomial<R: Rng>(rng: &mut R, b: usize) -> Monomial {
    let e: Vec<i32> = (0..b).map(|_| rng.gen_range(-1..=2)).collect();
    Monomial::from_exponents(&e)
}

fn random_coeff<R: Rng>(rng: &mut R) -> BigRational {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-3i64..=3);
    }
    BigRational::from_integer(c.into())
}

fn random_poly<R: Rng>(rng: &mut R, b: usize, max_terms: usize) -> LaurentPoly {
    let n = rng.gen_range(1..=max_terms);
    LaurentPoly::from_terms(b, (0..n).map(|_| (random_monomial(rng, b), random_coeff(rng))))
}

/// A random element vanishing at t = 1: (t_i − 1)·g.
fn random_augmentation_zero<R: Rng>(rng: &mut R, b: usize, max_terms: usize) -> LaurentPoly {
    if b == 0 {
        return LaurentPoly::zero(0);
    }
    let i = rng.gen_range(0..b);
    let g = random_poly(rng, b, max_terms.saturating_sub(1).max(1));
    &(&LaurentPoly::var(b, i) - &LaurentPoly::one(b)) * &g
}

/// Random invertible matrix over Λ_b together with its inverse.
fn random_invertible<R: Rng>(rng: &mut R, b: usize, n: usize) -> (LaurentMatrix, LaurentMatrix) {
    let mut p = LaurentMatrix::identity(b, n);
    let mut pinv = LaurentMatrix::identity(b, n);
    if n == 0 {
        return (p, pinv);
    }
    for _ in 0..rng.gen_range(1..=3) {
        let mut e = LaurentMatrix::identity(b, n);
        let mut einv = LaurentMatrix::identity(b, n);
        if n >= 2 && rng.gen_bool(0.7) {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let c = LaurentPoly::monomial(b, random_monomial(rng, b), random_coeff(rng));
            einv.set(i, j, -&c);
            e.set(i, j, c);
        } else {
            let i = rng.gen_range(0..n);
            let m = random_monomial(rng, b);
            let s = if rng.gen_bool(0.5) { BigRational::one() } else { -BigRational::one() };
            e.set(i, i, LaurentPoly::monomial(b, m, s.clone()));
            einv.set(i, i, LaurentPoly::monomial(b, Monomial::one().div(&m), s));
        }
        p = e.mul(&p);
        pinv = pinv.mul(&einv);
    }
    (p, pinv)
}

/// Direct sum of elementary pieces `Λ --f--> Λ` and free summands, in
/// randomly changed bases.
fn random_split_complex<R: Rng>(rng: &mut R, params: &FuzzParams) -> FreeComplex {
    let b = rng.gen_range(1..=params.max_vars.clamp(1, MAX_VARS));
    let top = rng.gen_range(1..=params.max_top.max(1));
    // blocks[p] for p in 1..=top: entries of the elementary maps C_p → C_{p−1}.
    let mut blocks: Vec<Vec<LaurentPoly>> = vec![Vec::new(); top + 1];
    for blk in blocks.iter_mut().skip(1) {
        for _ in 0..rng.gen_range(0..=2) {
            let f = match rng.gen_range(0..4) {
                0 => random_poly(rng, b, params.max_terms),
                1 => random_augmentation_zero(rng, b, params.max_terms),
                2 => LaurentPoly::monomial(b, random_monomial(rng, b), random_coeff(rng)),
                _ => LaurentPoly::zero(b),
            };
            blk.push(f);
        }
    }
    let free: Vec<usize> = (0..=top).map(|_| rng.gen_range(0..=2)).collect();
    // Basis of C_p: [targets of blocks from p+1][sources of blocks to p−1][free].
    let n_in = |p: usize| if p < top { blocks[p + 1].len() } else { 0 };
    let n_out = |p: usize| if p >= 1 { blocks[p].len() } else { 0 };
    let ranks: Vec<usize> = (0..=top).map(|p| n_in(p) + n_out(p) + free[p]).collect();
    let mut boundaries = Vec::with_capacity(top);
    for p in 1..=top {
        let mut d = LaurentMatrix::zeros(b, ranks[p], ranks[p - 1]);
        for (j, f) in blocks[p].iter().enumerate() {
            d.set(n_in(p) + j, j, f.clone());
        }
        boundaries.push(d);
    }
    let changes: Vec<(LaurentMatrix, LaurentMatrix)> = ranks.iter().map(|&r| random_invertible(rng, b, r)).collect();
    let boundaries = boundaries
        .into_iter()
        .enumerate()
        .map(|(i, d)| changes[i + 1].0.mul(&d).mul(&changes[i].1))
        .collect();
    FreeComplex::new(b, ranks, boundaries).expect("generated shapes are consistent")
}

/// Alexander complex of a random presentation on ≤ 3 generators.
fn random_alexander_complex<R: Rng>(rng: &mut R) -> FreeComplex {
    let m = rng.gen_range(1..=3usize);
    let s = rng.gen_range(0..=2usize);
    let rels: Vec<Word> = (0..s)
        .map(|_| {
            let len = rng.gen_range(1..=6);
            Word::from_runs((0..len).map(|_| {
                let e = if rng.gen_bool(0.5) { 1 } else { -1 } * rng.gen_range(1..=2i64);
                (rng.gen_range(0..m), e)
            }))
            .reduced()
        })
        .collect();
    let names = (1..=m).map(|i| format!("x{i}")).collect();
    let p = Presentation::new("R", names, rels, false).expect("generated presentation is valid");
    FreeComplex::from_alexander(&alexander_complex(&p).expect("at most 3 variables"))
}

/// A random valid complex over Λ_b, b ≤ 3.
pub fn random_complex<R: Rng>(rng: &mut R, params: &FuzzParams) -> FreeComplex {
    if rng.gen_bool(0.75) {
        random_split_complex(rng, params)
    } else {
        random_alexander_complex(rng)
    }
}

/// Random p-cycles: combinations of a kernel basis, sometimes zero.
pub fn random_cycles<R: Rng>(rng: &mut R, c: &FreeComplex, p: usize) -> Vec<Vec<LaurentPoly>> {
    let b = c.nvars();
    let np = c.rank(p);
    let basis = if p == 0 {
        LaurentMatrix::identity(b, np)
    } else {
        left_kernel_basis(&c.boundary(p))
    };
    let count = rng.gen_range(0..=3);
    (0..count)
        .map(|_| {
            if basis.rows() == 0 || rng.gen_bool(0.15) {
                return vec![LaurentPoly::zero(b); np];
            }
            let mut z = vec![LaurentPoly::zero(b); np];
            for r in 0..basis.rows() {
                if rng.gen_bool(0.6) {
                    let c = LaurentPoly::monomial(b, random_monomial(rng, b), random_coeff(rng));
                    for (zi, e) in z.iter_mut().zip(basis.row(r)) {
                        *zi = &*zi + &(e * &c);
                    }
                }
            }
            z
        })
        .collect()
}

/// Seeded per-instance generator: instance `i` draws from stream `i` of a
/// ChaCha8 generator keyed by `seed`, so results do not depend on the
/// execution order.
pub fn instance_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzViolation {
    pub instance: u64,
    pub kind: String,
    pub ccx: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub count: u64,
    pub seed: u64,
    pub invalid_complexes: u64,
    pub strebel_violations: u64,
    pub euler_violations: u64,
    pub quotient_violations: u64,
    pub first_violation: Option<FuzzViolation>,
    pub falsification: bool,
}

struct InstanceOutcome {
    invalid: bool,
    strebel: bool,
    euler: bool,
    quotient: bool,
    ccx: String,
}

fn audit_instance(seed: u64, i: u64, params: &FuzzParams) -> InstanceOutcome {
    let mut rng = instance_rng(seed, i);
    let c = random_complex(&mut rng, params);
    let invalid = !complex_validate(&c).valid;
    let strebel = strebel_audit(&c).falsification;
    let euler = euler_characteristic_report(&c).falsification;
    let p = rng.gen_range(0..=c.top());
    let cycles = random_cycles(&mut rng, &c, p);
    let quotient = match quotient_rank_bound(&c, &cycles, p) {
        Ok(q) => q.falsification || q.boundary_rank_after < q.boundary_rank_before,
        Err(_) => true,
    };
    let ccx = if invalid || strebel || euler || quotient {
        c.to_ccx_string()
    } else {
        String::new()
    };
    InstanceOutcome {
        invalid,
        strebel,
        euler,
        quotient,
        ccx,
    }
}

/// Run the Strebel, Euler-characteristic and quotient-bound audits on
/// `count` seeded random complexes.
pub fn fuzz_strebel(count: u64, seed: u64, exec: Exec) -> FuzzReport {
    let params = FuzzParams::default();
    let ids: Vec<u64> = (0..count).collect();
    let outcomes = par::map(exec, &ids, |&i| audit_instance(seed, i, &params));
    let mut report = FuzzReport {
        count,
        seed,
        invalid_complexes: 0,
        strebel_violations: 0,
        euler_violations: 0,
        quotient_violations: 0,
        first_violation: None,
        falsification: false,
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        report.invalid_complexes += o.invalid as u64;
        report.strebel_violations += o.strebel as u64;
        report.euler_violations += o.euler as u64;
        report.quotient_violations += o.quotient as u64;
        if report.first_violation.is_none() && (o.invalid || o.strebel || o.euler || o.quotient) {
            let kind = [("invalid", o.invalid), ("strebel", o.strebel), ("euler", o.euler), ("quotient", o.quotient)]
                .iter()
                .filter(|(_, v)| *v)
                .map(|(k, _)| *k)
                .collect::<Vec<_>>()
                .join(",");
            report.first_violation = Some(FuzzViolation {
                instance: i as u64,
                kind,
                ccx: o.ccx,
            });
        }
    }
    report.falsification = report.invalid_complexes + report.strebel_violations + report.euler_violations + report.quotient_violations > 0;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::parse_presentation;

    fn lp(b: usize, s: &str) -> LaurentPoly {
        LaurentPoly::parse(b, s).unwrap()
    }

    fn single(b: usize, f: &str) -> FreeComplex {
        let d = LaurentMatrix::from_rows(b, 1, vec![vec![lp(b, f)]]).unwrap();
        FreeComplex::new(b, vec![1, 1], vec![d]).unwrap()
    }

    #[test]
    fn validation() {
        let t = parse_presentation("gens a b\nrel a b a b^-1 a^-1 b^-1").unwrap();
        let c = FreeComplex::from_alexander(&alexander_complex(&t).unwrap());
        assert!(complex_validate(&c).valid);
        let d2 = LaurentMatrix::from_rows(1, 1, vec![vec![lp(1, "t")]]).unwrap();
        let d1 = LaurentMatrix::from_rows(1, 1, vec![vec![lp(1, "t - 1")]]).unwrap();
        let bad = FreeComplex::new(1, vec![1, 1, 1], vec![d1, d2]).unwrap();
        let v = complex_validate(&bad);
        assert!(!v.valid);
        assert_eq!(
            v.failure,
            Some(ComplexFailure::NotAComplex {
                p: 1,
                row: 0,
                col: 0,
                value: "t^2 - t".into()
            })
        );
        assert!(complex_validate(&FreeComplex::zero(2, vec![0])).valid);
    }

    #[test]
    fn homology_examples() {
        let c = single(1, "t - 1");
        assert_eq!((homology_rank(&c, 0), homology_rank(&c, 1)), (0, 0));
        assert_eq!(augmented_homology_dim(&c, 0), 1);
        let f2 = FreeComplex::from_alexander(&alexander_complex(&Presentation::free_rank(2)).unwrap());
        assert_eq!(homology_rank(&f2, 1), 1);
        let id = single(1, "1");
        assert_eq!((augmented_homology_dim(&id, 0), augmented_homology_dim(&id, 1)), (0, 0));
        let t = parse_presentation("gens a b\nrel a b a b^-1 a^-1 b^-1").unwrap();
        let tc = FreeComplex::from_alexander(&alexander_complex(&t).unwrap());
        assert_eq!(augmented_homology_dim(&tc, 1), 1);
    }

    #[test]
    fn strebel_and_euler_examples() {
        let r = strebel_audit(&single(1, "t - 1"));
        assert_eq!((r.rows[0].rank_lambda, r.rows[0].dim_q), (0, 1));
        assert_eq!((r.rows[1].rank_lambda, r.rows[1].dim_q), (0, 1));
        assert!(!r.falsification);
        let z = FreeComplex::zero(1, vec![1, 1]);
        assert!(strebel_audit(&z).rows.iter().all(|r| r.rank_lambda == 1 && r.dim_q == 1));
        let e = euler_characteristic_report(&single(1, "t - 1"));
        assert_eq!((e.from_ranks, e.from_homology, e.from_augmented), (0, 0, 0));
        let e = euler_characteristic_report(&FreeComplex::zero(1, vec![2, 3]));
        assert_eq!((e.from_ranks, e.from_homology, e.from_augmented), (-1, -1, -1));
    }

    #[test]
    fn quotient_bound_examples() {
        // 0 → Λ --0--> Λ → 0 has H_0 of rank 1; killing the generator leaves 0.
        let c = single(1, "0");
        let q = quotient_rank_bound(&c, &[vec![lp(1, "1")]], 0).unwrap();
        assert_eq!((q.rank_before, q.k_lambda, q.k_q), (1, 0, 0));
        let q = quotient_rank_bound(&c, &[], 0).unwrap();
        assert_eq!((q.k_lambda, q.k_q), (1, 1));
        let q = quotient_rank_bound(&c, &[vec![lp(1, "0")]], 1).unwrap();
        assert_eq!(q.k_lambda, q.rank_before);
        let nc = single(1, "t - 1");
        assert!(matches!(
            quotient_rank_bound(&nc, &[vec![lp(1, "1")]], 1),
            Err(Error::NotACycle { index: 0 })
        ));
    }

    #[test]
    fn cones() {
        let t = parse_presentation("gens a b\nrel a b a b^-1 a^-1 b^-1").unwrap();
        let c = FreeComplex::from_alexander(&alexander_complex(&t).unwrap());
        let cone = mapping_cone(&ChainMap::identity(&c)).unwrap();
        assert!(complex_validate(&cone).valid);
        assert!((0..=cone.top()).all(|p| homology_rank(&cone, p) == 0));
        let z = FreeComplex::zero(1, vec![1]);
        let zero_map = ChainMap::new(z.clone(), z.clone(), vec![LaurentMatrix::zeros(1, 1, 1)]).unwrap();
        let cone = mapping_cone(&zero_map).unwrap();
        assert_eq!((homology_rank(&cone, 0), homology_rank(&cone, 1)), (1, 1));
    }

    #[test]
    fn two_connected_examples() {
        let b = Bounds::default();
        let t = parse_presentation("gens a b\nrel a b a b^-1 a^-1 b^-1").unwrap();
        let h = GroupHom::new(Presentation::free(&["x"]), t.clone(), vec![Word::generator(0)]).unwrap();
        let r = two_connected_torsion_check(&h, &[vec![1], vec![1]], false, &b).unwrap();
        assert_eq!((r.kernel_rank, r.cokernel_rank), (0, 0));
        assert_eq!((r.cone_h1_rank, r.cone_h2_rank), (0, 0));
        assert!(!r.falsification);
        let r = two_connected_torsion_check(&GroupHom::identity(&t), &[vec![1], vec![1]], false, &b).unwrap();
        assert_eq!((r.kernel_rank, r.cokernel_rank), (0, 0));
        let z2 = parse_presentation("gens x y\nrel x^-1 y^-1 x y").unwrap();
        let h = GroupHom::new(Presentation::free(&["x", "y"]), z2, vec![Word::generator(0), Word::generator(1)]).unwrap();
        let r = two_connected_torsion_check(&h, &[vec![1, 0], vec![0, 1]], false, &b).unwrap();
        assert_eq!((r.kernel_rank, r.cokernel_rank), (1, 0));
        assert_eq!(r.hypotheses.h2_spanned, Status::NotCertifiable);
        assert!(!r.falsification);
        assert!(matches!(
            two_connected_torsion_check(&GroupHom::identity(&t), &[vec![1], vec![0]], false, &b),
            Err(Error::InvalidCoefficientSystem { relator: 0 })
        ));
    }

    #[test]
    fn ccx_round_trip() {
        let text = r#"{"vars": 2, "ranks": [1, 2], "boundaries": [[["t1 - 1"], ["t2 - 1"]]]}"#;
        let c = FreeComplex::from_ccx_str(text).unwrap();
        assert_eq!(c.ranks(), &[1, 2]);
        assert_eq!(FreeComplex::from_ccx_str(&c.to_ccx_string()).unwrap(), c);
        let bad = r#"{"vars": 1, "ranks": [1, 1], "boundaries": [[["t", "1"]]]}"#;
        assert!(matches!(FreeComplex::from_ccx_str(bad), Err(Error::InvalidComplex(_))));
    }

    #[test]
    fn generator_is_not_degenerate() {
        let params = FuzzParams::default();
        let (mut strict, mut positive, mut valid) = (0, 0, 0);
        for i in 0..200 {
            let c = random_complex(&mut instance_rng(3, i), &params);
            valid += complex_validate(&c).valid as usize;
            let r = strebel_audit(&c);
            strict += r.rows.iter().any(|r| r.rank_lambda < r.dim_q) as usize;
            positive += r.rows.iter().any(|r| r.rank_lambda > 0) as usize;
        }
        assert_eq!(valid, 200);
        assert!(strict > 20 && positive > 20, "strict {strict}, positive {positive}");
    }

    #[test]
    fn fuzz_small_is_clean_and_deterministic() {
        let a = fuzz_strebel(60, 7, Exec::Sequential);
        let b = fuzz_strebel(60, 7, Exec::Parallel);
        assert_eq!(a, b);
        assert!(!a.falsification, "{:?}", a.first_violation);
    }
}
