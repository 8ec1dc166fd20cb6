//! The graded Lie algebra gr_ℚ(G) and its Chevalley–Eilenberg homology.
//!
//! gr_ℚ(G) is realized inside the graded algebra of ℚG/I^(q+1) as the span
//! of left-normed commutators of the degree-one classes. Homology is
//! computed weight by weight: the CE differentials preserve the total
//! degree of a wedge, so each weight block is an independent rank problem.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{QMatrix, RowEchelon};
use crate::nilq::{algebra_gr_matrices, truncated_quotient, Bounds, NilpotentQuotientData};
use crate::par::{self, Exec};
use crate::presentations::GroupHom;

type Sparse = Vec<(usize, BigRational)>;

/// Finite-dimensional positively graded Lie algebra with a homogeneous basis.
#[derive(Debug, Clone)]
pub struct GradedLie {
    dims: Vec<usize>,
    starts: Vec<usize>,
    labels: Vec<String>,
    /// `brackets[a][b]` = [e_a, e_b] in basis coordinates; empty when zero.
    brackets: Vec<Vec<Sparse>>,
    /// Per degree, basis rows in gr-algebra coordinates (extracted algebras
    /// only).
    gr_basis: Vec<QMatrix>,
}

fn starts_of(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![0];
    for d in dims {
        s.push(s.last().unwrap() + d);
    }
    s
}

impl GradedLie {
    /// Build from structure constants given for pairs `a < b`; the table is
    /// completed by antisymmetry.
    pub fn from_brackets(dims: Vec<usize>, labels: Vec<String>, pairs: Vec<((usize, usize), Sparse)>) -> Result<Self> {
        let starts = starts_of(&dims);
        let n = *starts.last().unwrap();
        if labels.len() != n {
            return Err(Error::InvalidArgument(format!("{} labels for dimension {n}", labels.len())));
        }
        let mut brackets = vec![vec![Vec::new(); n]; n];
        let mut lie = GradedLie {
            dims,
            starts,
            labels,
            brackets: Vec::new(),
            gr_basis: Vec::new(),
        };
        for ((a, b), v) in pairs {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidArgument(format!("bad bracket pair ({a}, {b})")));
            }
            let w = lie.degree_of(a) + lie.degree_of(b);
            if v.iter().any(|(x, _)| *x >= n || lie.degree_of(*x) != w) {
                return Err(Error::InvalidArgument(format!("bracket ({a}, {b}) is not homogeneous")));
            }
            let mut v: Sparse = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            v.sort_by_key(|x| x.0);
            brackets[b][a] = v.iter().map(|(x, c)| (*x, -c.clone())).collect();
            brackets[a][b] = v;
        }
        lie.brackets = brackets;
        Ok(lie)
    }

    /// Abelian Lie algebra concentrated in degree one.
    pub fn abelian(n: usize) -> Self {
        let labels = (1..=n).map(|i| format!("e{i}")).collect();
        GradedLie::from_brackets(vec![n], labels, Vec::new()).unwrap()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn class(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        *self.starts.last().unwrap()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Index range of the degree-k basis.
    pub fn degree_range(&self, k: usize) -> std::ops::Range<usize> {
        self.starts[k - 1]..self.starts[k]
    }

    pub fn degree_of(&self, a: usize) -> usize {
        self.starts.partition_point(|&s| s <= a)
    }

    pub fn bracket(&self, a: usize, b: usize) -> &[(usize, BigRational)] {
        &self.brackets[a][b]
    }

    /// Quotient by the ideal of degrees > c.
    pub fn truncate(&self, c: usize) -> GradedLie {
        let c = c.min(self.class());
        let n = self.starts[c];
        GradedLie {
            dims: self.dims[..c].to_vec(),
            starts: self.starts[..=c].to_vec(),
            labels: self.labels[..n].to_vec(),
            brackets: (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| self.brackets[a][b].iter().filter(|(x, _)| *x < n).cloned().collect())
                        .collect()
                })
                .collect(),
            gr_basis: self.gr_basis.iter().take(c).cloned().collect(),
        }
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|a| {
            self.brackets[a][a].is_empty()
                && (0..n).all(|b| {
                    let ab = &self.brackets[a][b];
                    let ba = &self.brackets[b][a];
                    ab.len() == ba.len() && ab.iter().zip(ba).all(|(x, y)| x.0 == y.0 && x.1 == -y.1.clone())
                })
        })
    }

    fn bracket_vec(&self, v: &Sparse, b: usize) -> Sparse {
        let mut acc = vec![BigRational::zero(); self.dim()];
        for (x, c) in v {
            for (y, d) in &self.brackets[*x][b] {
                acc[*y] += c * d;
            }
        }
        to_sparse(acc)
    }

    /// Σ_cyc [[a,b],c] = 0 for all basis triples.
    pub fn satisfies_jacobi(&self) -> bool {
        let n = self.dim();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let mut acc = vec![BigRational::zero(); n];
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        let inner: Sparse = self.brackets[x][y].clone();
                        for (i, v) in self.bracket_vec(&inner, z) {
                            acc[i] += v;
                        }
                    }
                    if acc.iter().any(|v| !v.is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn to_sparse(v: Vec<BigRational>) -> Sparse {
    v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
}

/// Extract gr_ℚ(G) in degrees 1..=q from the truncated quotient.
pub fn extract_graded_lie(nqd: &NilpotentQuotientData) -> Result<GradedLie> {
    let q = nqd.q();
    let names = nqd.presentation().generators().to_vec();
    let mut gr_basis: Vec<Vec<Vec<BigRational>>> = Vec::with_capacity(q);
    let mut labels: Vec<String> = Vec::new();
    let mut deg_labels: Vec<Vec<String>> = Vec::new();
    // degree 1
    let mut ech = RowEchelon::new(nqd.gr_dim(1));
    let mut b1 = Vec::new();
    let mut l1 = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let v = nqd.gr_generator(i);
        if ech.insert(&v) {
            b1.push(v);
            l1.push(name.clone());
        }
    }
    if b1.len() != nqd.l()[0] {
        return Err(Error::DimensionMismatch {
            degree: 1,
            found: b1.len(),
            expected: nqd.l()[0],
        });
    }
    gr_basis.push(b1);
    deg_labels.push(l1);
    for k in 2..=q {
        let mut ech = RowEchelon::new(nqd.gr_dim(k));
        let mut bk = Vec::new();
        let mut lk = Vec::new();
        for (i, x) in gr_basis[0].iter().enumerate() {
            for (j, y) in gr_basis[k - 2].iter().enumerate() {
                let v = nqd.gr_bracket(1, x, k - 1, y);
                if ech.insert(&v) {
                    bk.push(v);
                    lk.push(format!("[{},{}]", deg_labels[0][i], deg_labels[k - 2][j]));
                }
            }
        }
        if bk.len() != nqd.l()[k - 1] {
            return Err(Error::DimensionMismatch {
                degree: k,
                found: bk.len(),
                expected: nqd.l()[k - 1],
            });
        }
        gr_basis.push(bk);
        deg_labels.push(lk);
    }
    for l in &deg_labels {
        labels.extend(l.iter().cloned());
    }
    let dims: Vec<usize> = gr_basis.iter().map(Vec::len).collect();
    let starts = starts_of(&dims);
    let gr_basis: Vec<QMatrix> = gr_basis
        .into_iter()
        .enumerate()
        .map(|(k, rows)| QMatrix::from_rows(nqd.gr_dim(k + 1), rows))
        .collect();

    let mut pairs = Vec::new();
    for j in 1..=q {
        for k in j..=q {
            if j + k > q {
                break;
            }
            let bj = &gr_basis[j - 1];
            let bk = &gr_basis[k - 1];
            let mut idx = Vec::new();
            let mut rows = Vec::new();
            for a in 0..bj.rows() {
                for b in 0..bk.rows() {
                    if j == k && b <= a {
                        continue;
                    }
                    idx.push((starts[j - 1] + a, starts[k - 1] + b));
                    rows.push(nqd.gr_bracket(j, bj.row(a), k, bk.row(b)));
                }
            }
            if rows.is_empty() {
                continue;
            }
            let target = &gr_basis[j + k - 1];
            let coords = target
                .express_rows(&QMatrix::from_rows(nqd.gr_dim(j + k), rows))
                .ok_or(Error::DimensionMismatch {
                    degree: j + k,
                    found: target.rows() + 1,
                    expected: target.rows(),
                })?;
            for (r, &(a, b)) in idx.iter().enumerate() {
                let v: Sparse = coords
                    .row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (starts[j + k - 1] + i, c.clone()))
                    .collect();
                pairs.push(((a, b), v));
            }
        }
    }
    let mut lie = GradedLie::from_brackets(dims, labels, pairs)?;
    lie.gr_basis = gr_basis;
    Ok(lie)
}

/// Lie-level maps in each degree from algebra-level gr matrices: the image
/// of each source Lie basis vector, expressed in the target Lie basis.
pub fn lie_maps_from_algebra(src: &GradedLie, tgt: &GradedLie, alg: &[QMatrix]) -> Result<Vec<QMatrix>> {
    let c = src.class().min(tgt.class()).min(alg.len());
    (0..c)
        .map(|i| {
            let img = src.gr_basis[i].mul(&alg[i]);
            tgt.gr_basis[i].express_rows(&img).ok_or(Error::DimensionMismatch {
                degree: i + 1,
                found: img.rank(),
                expected: tgt.dims[i],
            })
        })
        .collect()
}

/// Chevalley–Eilenberg data in degrees ≤ 2 (graded model).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CEReport {
    pub h1: usize,
    pub h2: usize,
    pub rank_d2: usize,
    pub rank_d3: usize,
    pub dim_l: usize,
    pub dim_wedge2: usize,
    pub dim_wedge3: usize,
}

/// Wedge bases grouped by weight.
struct Wedges {
    /// pairs[w]: (a, b) with a < b and weight w.
    pairs: Vec<Vec<(usize, usize)>>,
    pair_pos: std::collections::HashMap<(usize, usize), usize>,
    triples: Vec<Vec<(usize, usize, usize)>>,
}

fn wedges(lie: &GradedLie, limit: usize) -> Wedges {
    // Basis elements of degree < limit only.
    let n = lie.starts[limit.min(lie.class() + 1) - 1];
    let maxw = 3 * lie.class() + 1;
    let mut pairs = vec![Vec::new(); maxw + 1];
    let mut pair_pos = std::collections::HashMap::new();
    let mut triples = vec![Vec::new(); maxw + 1];
    for a in 0..n {
        for b in a + 1..n {
            let w = lie.degree_of(a) + lie.degree_of(b);
            pair_pos.insert((a, b), pairs[w].len());
            pairs[w].push((a, b));
            for c in b + 1..n {
                triples[w + lie.degree_of(c)].push((a, b, c));
            }
        }
    }
    Wedges {
        pairs,
        pair_pos,
        triples,
    }
}

/// Add `coef·(e_x ∧ e_c)` to a weight block row.
fn add_wedge(row: &mut [BigRational], pos: &std::collections::HashMap<(usize, usize), usize>, x: usize, c: usize, coef: &BigRational) {
    if x == c {
        return;
    }
    if x < c {
        row[pos[&(x, c)]] += coef;
    } else {
        row[pos[&(c, x)]] -= coef;
    }
}

/// ∂₂ on the weight-w pairs, with brackets restricted to degrees < `cut`.
fn d2_block(lie: &GradedLie, wd: &Wedges, w: usize, cut: usize) -> QMatrix {
    let cols_range = if w <= lie.class() && w < cut {
        lie.degree_range(w)
    } else {
        0..0
    };
    let rows = wd.pairs[w]
        .iter()
        .map(|&(a, b)| {
            let mut r = vec![BigRational::zero(); cols_range.len()];
            for (x, c) in lie.bracket(a, b) {
                if cols_range.contains(x) {
                    r[x - cols_range.start] = c.clone();
                }
            }
            r
        })
        .collect();
    QMatrix::from_rows(cols_range.len(), rows)
}

/// ∂₃ on the weight-w triples, with brackets restricted to degrees < `cut`.
fn d3_block(lie: &GradedLie, wd: &Wedges, w: usize, cut: usize) -> QMatrix {
    let cols = wd.pairs[w].len();
    let one = BigRational::one();
    let rows = wd.triples[w]
        .iter()
        .map(|&(a, b, c)| {
            let mut r = vec![BigRational::zero(); cols];
            for (x, y, z, sign) in [(a, b, c, one.clone()), (a, c, b, -one.clone()), (b, c, a, one.clone())] {
                for (e, coef) in lie.bracket(x, y) {
                    if lie.degree_of(*e) < cut {
                        add_wedge(&mut r, &wd.pair_pos, *e, z, &(coef * &sign));
                    }
                }
            }
            r
        })
        .collect();
    QMatrix::from_rows(cols, rows)
}

pub fn ce_h1_h2(lie: &GradedLie) -> CEReport {
    ce_h1_h2_with(lie, Exec::default())
}

/// H₁ = L/[L,L], H₂ = ker ∂₂ / im ∂₃.
pub fn ce_h1_h2_with(lie: &GradedLie, exec: Exec) -> CEReport {
    let cut = lie.class() + 1;
    let wd = wedges(lie, cut);
    let weights: Vec<usize> = (0..wd.pairs.len()).collect();
    let ranks = par::map(exec, &weights, |&w| {
        let r2 = if wd.pairs[w].is_empty() { 0 } else { d2_block(lie, &wd, w, cut).rank() };
        let r3 = if wd.triples[w].is_empty() { 0 } else { d3_block(lie, &wd, w, cut).rank() };
        (r2, r3)
    });
    let rank_d2: usize = ranks.iter().map(|r| r.0).sum();
    let rank_d3: usize = ranks.iter().map(|r| r.1).sum();
    let n = lie.dim();
    let dim_wedge2 = n * n.saturating_sub(1) / 2;
    let dim_wedge3 = wd.triples.iter().map(Vec::len).sum();
    CEReport {
        h1: n - rank_d2,
        h2: dim_wedge2 - rank_d2 - rank_d3,
        rank_d2,
        rank_d3,
        dim_l: n,
        dim_wedge2,
        dim_wedge3,
    }
}

/// ∂₂∘∂₃ = 0, checked block by block.
pub fn ce_square_zero(lie: &GradedLie) -> bool {
    let cut = lie.class() + 1;
    let wd = wedges(lie, cut);
    (0..wd.pairs.len()).all(|w| {
        if wd.triples[w].is_empty() || wd.pairs[w].is_empty() {
            return true;
        }
        d3_block(lie, &wd, w, cut).mul(&d2_block(lie, &wd, w, cut)).is_zero()
    })
}

/// dim H₂(A;ℚ)/⟨Φ_n(A)⟩ in the graded model: CE-H₂ of gr_ℚ(A) through
/// class n−1, minus l_n.
pub fn dwyer_quotient_dim(p: &crate::Presentation, n: usize, bounds: &Bounds) -> Result<usize> {
    if n <= 1 {
        return Ok(0);
    }
    let nqd = truncated_quotient(p, n, bounds)?;
    let lie = extract_graded_lie(&nqd)?;
    let h2 = ce_h1_h2(&lie.truncate(n - 1)).h2 as i64;
    let value = h2 - nqd.l()[n - 1] as i64;
    if value < 0 {
        return Err(Error::NegativeDimension { n, value });
    }
    Ok(value as usize)
}

/// The map H₂(A)/⟨Φ_n⟩ → H₂(B)/⟨Φ_n⟩ in the graded model, realized as
/// K/B₂ where K ⊂ Λ²L_{<n} are the wedges whose bracket vanishes in
/// L_{≤n} and B₂ = ∂₃(Λ³L_{<n}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DwyerMapData {
    pub dim_src: usize,
    pub dim_tgt: usize,
    pub image_rank: usize,
}

impl DwyerMapData {
    pub fn trivial() -> Self {
        DwyerMapData {
            dim_src: 0,
            dim_tgt: 0,
            image_rank: 0,
        }
    }

    pub fn is_epi(&self) -> bool {
        self.image_rank == self.dim_tgt
    }
}

/// Per weight: (K basis rows, B₂ rows) inside the weight-w wedge block.
fn cycles_and_boundaries(lie: &GradedLie, wd: &Wedges, w: usize, n: usize) -> (QMatrix, QMatrix) {
    let d2 = d2_block(lie, wd, w, n + 1);
    let k = if d2.cols() == 0 {
        QMatrix::identity(wd.pairs[w].len())
    } else {
        d2.left_kernel()
    };
    let b = d3_block(lie, wd, w, n);
    (k, b)
}

/// Dwyer map for `h` at level n ≥ 2, from quotients truncated at q ≥ n.
pub fn dwyer_map_with(
    h: &GroupHom,
    src: &NilpotentQuotientData,
    tgt: &NilpotentQuotientData,
    n: usize,
    exec: Exec,
) -> Result<DwyerMapData> {
    let la = extract_graded_lie(src)?.truncate(n);
    let lb = extract_graded_lie(tgt)?.truncate(n);
    let alg = algebra_gr_matrices(h, src, tgt, exec);
    let f = lie_maps_from_algebra(&la, &lb, &alg[..n - 1])?;
    let wa = wedges(&la, n);
    let wb = wedges(&lb, n);
    let maxw = wa.pairs.len().min(wb.pairs.len());
    let weights: Vec<usize> = (2..maxw).collect();
    let parts = par::map(exec, &weights, |&w| {
        let (ka, ba) = cycles_and_boundaries(&la, &wa, w, n);
        let (kb, bb) = cycles_and_boundaries(&lb, &wb, w, n);
        let rbb = if bb.rows() == 0 { 0 } else { bb.rank() };
        let dim_src = ka.rows() - if ba.rows() == 0 { 0 } else { ba.rank() };
        let dim_tgt = kb.rows() - rbb;
        // Λ²f on the weight-w pairs of A.
        let ncols = wb.pairs[w].len();
        let wedge_f: Vec<Vec<BigRational>> = wa.pairs[w]
            .iter()
            .map(|&(a, b)| {
                let mut r = vec![BigRational::zero(); ncols];
                let (da, db) = (la.degree_of(a), la.degree_of(b));
                let fa = f[da - 1].row(a - la.starts[da - 1]);
                let fb = f[db - 1].row(b - la.starts[db - 1]);
                let oa = lb.starts[da - 1];
                let ob = lb.starts[db - 1];
                for (x, cx) in fa.iter().enumerate() {
                    if cx.is_zero() {
                        continue;
                    }
                    for (y, cy) in fb.iter().enumerate() {
                        if cy.is_zero() {
                            continue;
                        }
                        add_wedge(&mut r, &wb.pair_pos, oa + x, ob + y, &(cx * cy));
                    }
                }
                r
            })
            .collect();
        let wf = QMatrix::from_rows(ncols, wedge_f);
        let img = if ka.rows() == 0 { QMatrix::zeros(0, ncols) } else { ka.mul(&wf) };
        let stacked = img.vstack(&bb);
        let image_rank = if stacked.rows() == 0 { 0 } else { stacked.rank() } - rbb;
        (dim_src, dim_tgt, image_rank)
    });
    Ok(DwyerMapData {
        dim_src: parts.iter().map(|p| p.0).sum(),
        dim_tgt: parts.iter().map(|p| p.1).sum(),
        image_rank: parts.iter().map(|p| p.2).sum(),
    })
}

/// Dwyer map for `h` at level n (graded model).
pub fn dwyer_map(h: &GroupHom, n: usize, bounds: &Bounds) -> Result<DwyerMapData> {
    if n <= 1 {
        return Ok(DwyerMapData::trivial());
    }
    let src = truncated_quotient(h.source(), n, bounds)?;
    let tgt = truncated_quotient(h.target(), n, bounds)?;
    dwyer_map_with(h, &src, &tgt, n, Exec::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::parse_presentation;
    use crate::Presentation;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn heisenberg() -> GradedLie {
        GradedLie::from_brackets(
            vec![2, 1],
            vec!["x".into(), "y".into(), "z".into()],
            vec![((0, 1), vec![(2, q(1))])],
        )
        .unwrap()
    }

    #[test]
    fn free_extraction() {
        let b = Bounds::default();
        let d = truncated_quotient(&Presentation::free_rank(2), 3, &b).unwrap();
        let lie = extract_graded_lie(&d).unwrap();
        assert_eq!(lie.dims(), &[2, 1, 2]);
        assert_eq!(lie.bracket(0, 1), &[(2, q(1))]);
        assert!(lie.is_antisymmetric());
        assert!(lie.satisfies_jacobi());
    }

    #[test]
    fn abelian_and_heisenberg_extraction() {
        let b = Bounds::default();
        let z2 = parse_presentation("gens x y\nrel x^-1 y^-1 x y").unwrap();
        let lie = extract_graded_lie(&truncated_quotient(&z2, 3, &b).unwrap()).unwrap();
        assert_eq!(lie.dims(), &[2, 0, 0]);
        assert!(lie.bracket(0, 1).is_empty());
        let h = parse_presentation("gens x y\nrel y^-1 x^-1 y x^-1 y^-1 x y x\nrel y^-1 x^-1 y x y^-1 x^-1 y^-1 x y^2").unwrap();
        let lie = extract_graded_lie(&truncated_quotient(&h, 3, &b).unwrap()).unwrap();
        assert_eq!(lie.dims(), &[2, 1, 0]);
    }

    #[test]
    fn ce_examples() {
        let ab = ce_h1_h2(&GradedLie::abelian(2));
        assert_eq!((ab.h1, ab.h2), (2, 1));
        let he = ce_h1_h2(&heisenberg());
        assert_eq!((he.h1, he.h2), (2, 2));
        let b = Bounds::default();
        let d = truncated_quotient(&Presentation::free_rank(2), 3, &b).unwrap();
        let lie = extract_graded_lie(&d).unwrap();
        assert!(ce_square_zero(&lie));
        assert_eq!(ce_h1_h2(&lie).h2, 3);
    }

    #[test]
    fn dwyer_dims_free() {
        let b = Bounds::default();
        assert_eq!(dwyer_quotient_dim(&Presentation::free_rank(2), 2, &b).unwrap(), 0);
        assert_eq!(dwyer_quotient_dim(&Presentation::free_rank(2), 3, &b).unwrap(), 0);
        assert_eq!(dwyer_quotient_dim(&Presentation::free_rank(3), 2, &b).unwrap(), 0);
    }

    #[test]
    fn dwyer_map_matches_dimension() {
        let b = Bounds::default();
        let tgt = parse_presentation("gens x y\nrel y^-1 x^-1 y x y^-1 x^-1 y^-1 x y^2").unwrap();
        let h = GroupHom::new(
            Presentation::free(&["x", "y"]),
            tgt.clone(),
            vec![crate::Word::generator(0), crate::Word::generator(1)],
        )
        .unwrap();
        let d2 = dwyer_map(&h, 2, &b).unwrap();
        assert_eq!((d2.dim_src, d2.dim_tgt), (0, 0));
        let d3 = dwyer_map(&h, 3, &b).unwrap();
        assert_eq!(d3.dim_tgt, dwyer_quotient_dim(&tgt, 3, &b).unwrap());
        assert_eq!(d3.dim_tgt, 1);
        assert!(!d3.is_epi());
    }
}
