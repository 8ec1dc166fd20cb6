//! Fox free differential calculus and Alexander chain complexes.
//!
//! Row convention throughout: a chain complex `C₂ → C₁ → C₀` of free
//! Λ-modules is stored as `d2` (relators × generators) and `d1`
//! (generators × 1), with `d2·d1 = 0`. Ranks are taken over Frac(Λ).

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{abelianization, h1_rational_map};
use crate::laurent::{bareiss_rank, left_kernel_basis, LaurentMatrix, LaurentPoly, Monomial, MAX_VARS};
use crate::nilq::Bounds;
use crate::presentations::{hom_welldefined_upto, GroupHom, Presentation, WellDefinedness, Word};
use crate::report::Status;

/// Finite ℚ-linear combination of reduced words of a free group.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupRingElt {
    terms: BTreeMap<Word, BigRational>,
}

impl GroupRingElt {
    pub fn zero() -> Self {
        GroupRingElt::default()
    }

    pub fn one() -> Self {
        GroupRingElt::from_word(&Word::identity())
    }

    pub fn from_word(w: &Word) -> Self {
        let mut e = GroupRingElt::zero();
        e.add_term(w.reduced(), BigRational::one());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> BigRational {
        self.terms.get(&w.reduced()).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, w: Word, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
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

    pub fn add(&self, other: &GroupRingElt) -> GroupRingElt {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GroupRingElt) -> GroupRingElt {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> GroupRingElt {
        let mut out = GroupRingElt::zero();
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &GroupRingElt) -> GroupRingElt {
        let mut out = GroupRingElt::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.mul(v), a * b);
            }
        }
        out
    }

    /// Push to Λ_b along generator ↦ monomial.
    pub fn abelianize(&self, sys: &CoefficientSystem) -> LaurentPoly {
        let mut out = LaurentPoly::zero(sys.nvars);
        for (w, c) in &self.terms {
            out.add_term(sys.monomial_of(w), c.clone());
        }
        out
    }
}

/// ∂w/∂x_g in the rational group ring of the free group.
pub fn fox_derivative(w: &Word, g: usize) -> GroupRingElt {
    let mut out = GroupRingElt::zero();
    let mut prefix = Word::identity();
    for &(h, e) in w.runs() {
        if h == g {
            if e > 0 {
                for k in 0..e {
                    out.add_term(prefix.mul(&Word::power(g, k)), BigRational::one());
                }
            } else {
                for k in 1..=-e {
                    out.add_term(prefix.mul(&Word::power(g, -k)), -BigRational::one());
                }
            }
        }
        prefix = prefix.mul(&Word::power(h, e));
    }
    out
}

/// A homomorphism from a free group to the free abelian group ℤ^b, given by
/// the images of the generators; it extends to ℚF → Λ_b.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientSystem {
    nvars: usize,
    images: Vec<Monomial>,
}

impl CoefficientSystem {
    pub fn new(nvars: usize, images: Vec<Vec<i64>>) -> Result<Self> {
        if nvars > MAX_VARS {
            return Err(Error::TooManyVariables(nvars));
        }
        let images = images
            .into_iter()
            .map(|row| {
                if row.len() != nvars {
                    return Err(Error::InvalidArgument(format!(
                        "coefficient row of length {} for {} variables",
                        row.len(),
                        nvars
                    )));
                }
                let exps = row
                    .iter()
                    .map(|&x| i32::try_from(x).map_err(|_| Error::Overflow(format!("exponent {x}"))))
                    .collect::<Result<Vec<i32>>>()?;
                Ok(Monomial::from_exponents(&exps))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoefficientSystem { nvars, images })
    }

    /// Torsion-free abelianization of `p`, basis from the Smith form.
    pub fn abelian(p: &Presentation) -> Result<Self> {
        let ab = abelianization(p);
        CoefficientSystem::new(ab.free_rank, ab.generator_images())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn images(&self) -> &[Monomial] {
        &self.images
    }

    pub fn monomial_of(&self, w: &Word) -> Monomial {
        let mut m = Monomial::one();
        for &(g, e) in w.runs() {
            m = m.mul(&self.images[g].pow(e as i32));
        }
        m
    }

    /// Compose with a homomorphism into this system's free group.
    pub fn pull_back(&self, h: &GroupHom) -> CoefficientSystem {
        CoefficientSystem {
            nvars: self.nvars,
            images: h.images().iter().map(|w| self.monomial_of(w)).collect(),
        }
    }

    /// Whether every relator of `p` maps to the identity.
    pub fn kills_relators(&self, p: &Presentation) -> Option<usize> {
        p.relators().iter().position(|r| !self.monomial_of(r).is_one())
    }
}

/// ∂w/∂x_g pushed to Λ_b, computed directly on exponent vectors.
pub fn fox_abelian(w: &Word, g: usize, sys: &CoefficientSystem) -> LaurentPoly {
    let mut out = LaurentPoly::zero(sys.nvars);
    let mut prefix = Monomial::one();
    for &(h, e) in w.runs() {
        let t = sys.images[h];
        if h == g {
            if e > 0 {
                for k in 0..e {
                    out.add_term(prefix.mul(&t.pow(k as i32)), BigRational::one());
                }
            } else {
                for k in 1..=-e {
                    out.add_term(prefix.mul(&t.pow(-(k as i32))), -BigRational::one());
                }
            }
        }
        prefix = prefix.mul(&t.pow(e as i32));
    }
    out
}

/// Fox Jacobian of `words` over `m` generators, pushed to Λ_b.
pub fn fox_jacobian(words: &[Word], m: usize, sys: &CoefficientSystem) -> LaurentMatrix {
    let mut out = LaurentMatrix::zeros(sys.nvars, words.len(), m);
    for (i, w) in words.iter().enumerate() {
        for g in 0..m {
            out.set(i, g, fox_abelian(w, g, sys));
        }
    }
    out
}

/// The cellular chain complex of the cover of the presentation complex
/// determined by a coefficient system.
#[derive(Debug, Clone)]
pub struct AlexanderComplex {
    pub b: usize,
    pub d2: LaurentMatrix,
    pub d1: LaurentMatrix,
}

impl AlexanderComplex {
    pub fn chain_condition_holds(&self) -> bool {
        self.d2.mul(&self.d1).is_zero()
    }

    /// rank over Frac(Λ_b) of H₁.
    pub fn h1_rank(&self) -> usize {
        self.d1.rows() - bareiss_rank(&self.d1) - bareiss_rank(&self.d2)
    }
}

pub fn alexander_complex_with(p: &Presentation, sys: &CoefficientSystem) -> AlexanderComplex {
    let m = p.num_generators();
    let d2 = fox_jacobian(p.relators(), m, sys);
    let mut d1 = LaurentMatrix::zeros(sys.nvars, m, 1);
    let one = LaurentPoly::one(sys.nvars);
    for g in 0..m {
        let t = LaurentPoly::monomial(sys.nvars, sys.images[g], BigRational::one());
        d1.set(g, 0, &t - &one);
    }
    AlexanderComplex { b: sys.nvars, d2, d1 }
}

/// Alexander complex over Λ_b with b the rank of H₁(P)/torsion.
pub fn alexander_complex(p: &Presentation) -> Result<AlexanderComplex> {
    Ok(alexander_complex_with(p, &CoefficientSystem::abelian(p)?))
}

/// Rank of the first torsion-free-derived quotient: rank of H₁ of the
/// universal torsion-free abelian cover.
pub fn h1_rank_abelian_cover(p: &Presentation) -> Result<usize> {
    Ok(alexander_complex(p)?.h1_rank())
}

/// The map induced by `h` on level-one homology with coefficients in the
/// target's Laurent ring.
#[derive(Debug, Clone, Serialize)]
pub struct InducedAlexanderMap {
    pub nvars: usize,
    /// Rank of the source module with its own coefficients.
    pub source_rank: usize,
    /// Rank of the source module with coefficients pulled back from the target.
    pub pulled_back_rank: usize,
    pub target_rank: usize,
    pub image_rank: usize,
    pub h1_rational_injective: bool,
    /// Source 1-cycles (rows) in source chain coordinates.
    #[serde(skip)]
    pub cycles: LaurentMatrix,
    /// Chain map on 1-chains: abelianized Fox Jacobian of the images.
    #[serde(skip)]
    pub chain_map: LaurentMatrix,
    /// `cycles · chain_map`: images of the source cycles.
    #[serde(skip)]
    pub matrix: LaurentMatrix,
}

pub fn induced_alexander_map(h: &GroupHom, bounds: &Bounds) -> Result<InducedAlexanderMap> {
    if let WellDefinedness::Refuted { relator, .. } = hom_welldefined_upto(h, 2, bounds)? {
        return Err(Error::NotWellDefined { relator, degree: 2 });
    }
    let tsys = CoefficientSystem::abelian(h.target())?;
    let psys = tsys.pull_back(h);
    let src = alexander_complex_with(h.source(), &psys);
    let tgt = alexander_complex_with(h.target(), &tsys);
    let chain_map = fox_jacobian(h.images(), h.target().num_generators(), &tsys);
    // Relator cycles must land in the target boundaries.
    let rank_tb = bareiss_rank(&tgt.d2);
    let rel_images = src.d2.mul(&chain_map);
    for r in 0..rel_images.rows() {
        let row = rel_images.select(&[r], &(0..rel_images.cols()).collect::<Vec<_>>());
        if bareiss_rank(&tgt.d2.vstack(&row)) != rank_tb {
            return Err(Error::NotWellDefined { relator: r, degree: 2 });
        }
    }
    let cycles = left_kernel_basis(&src.d1);
    let matrix = cycles.mul(&chain_map);
    let image_rank = bareiss_rank(&matrix.vstack(&tgt.d2)) - rank_tb;
    Ok(InducedAlexanderMap {
        nvars: tsys.nvars(),
        source_rank: h1_rank_abelian_cover(h.source())?,
        pulled_back_rank: src.h1_rank(),
        target_rank: tgt.h1_rank(),
        image_rank,
        h1_rational_injective: h1_rational_map(h).injective,
        cycles,
        chain_map,
        matrix,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum MonoVerdict {
    RankPreserved { rank: usize },
    RankDropped { r_src: usize, r_img: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct MonoCertificate {
    pub verdict: MonoVerdict,
    /// Hypothesis under which equal ranks are expected.
    pub h1_rational_injective: Status,
    pub source_rank: usize,
    pub target_rank: usize,
    pub image_rank: usize,
}

impl MonoCertificate {
    pub fn rank_preserved(&self) -> bool {
        matches!(self.verdict, MonoVerdict::RankPreserved { .. })
    }
}

/// Necessary-condition certificate for injectivity at the metabelian level:
/// the source level-one module and its image have the same rank.
pub fn metabelian_mono_certificate(h: &GroupHom, bounds: &Bounds) -> Result<MonoCertificate> {
    let m = induced_alexander_map(h, bounds)?;
    let verdict = if m.image_rank == m.source_rank {
        MonoVerdict::RankPreserved { rank: m.source_rank }
    } else {
        MonoVerdict::RankDropped {
            r_src: m.source_rank,
            r_img: m.image_rank,
        }
    };
    Ok(MonoCertificate {
        verdict,
        h1_rational_injective: Status::from_bool(m.h1_rational_injective),
        source_rank: m.source_rank,
        target_rank: m.target_rank,
        image_rank: m.image_rank,
    })
}
