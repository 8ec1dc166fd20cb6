//! Milnor μ̄-invariants from meridian and longitude data.
//!
//! Conventions: μ̄(i₁…i_{k−1} i_k) is the coefficient of X_{i₁}⋯X_{i_{k−1}}
//! in the Magnus expansion of the longitude λ_{i_k}, after rewriting λ_{i_k}
//! as a word in the chosen meridians. The indeterminacy Δ(I) is the gcd of
//! μ̄(J) over all J obtained from I by deleting at least one index (keeping
//! at least two) and cyclically permuting the rest. Indices are 1-based.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, ParseError, ParseErrorKind, Result};
use crate::nilq::{magnus_in, Bounds, WordSpace};
use crate::par::{self, Exec};
use crate::presentations::{parse_tokens, strip_comment, tokens_with_cols, valid_name, Presentation, Word};

/// Words longer than this during rewriting are reported as overflow.
pub const MAX_REWRITE_LENGTH: u64 = 1 << 22;

pub const INDEX_CONVENTION: &str = "mu(i1..ik) = coefficient of X_i1..X_i(k-1) in longitude k";
pub const DELTA_CONVENTION: &str = "delta(I) = gcd of mu(J), J from I by deleting >= 1 index then cyclic permutation";

/// y = w · g · w⁻¹ for a non-meridian generator y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjugation {
    pub conjugator: Word,
    pub base: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkData {
    m: usize,
    generators: Vec<String>,
    meridians: Vec<usize>,
    conj: Vec<Option<Conjugation>>,
    component: Vec<usize>,
    longitudes: Vec<Word>,
    relators: Vec<Word>,
}

impl LinkData {
    /// `meridians[j]` is the generator chosen for component j (0-based);
    /// every other generator needs a conjugation entry.
    pub fn new(
        generators: Vec<String>,
        meridians: Vec<usize>,
        conj: Vec<Option<Conjugation>>,
        longitudes: Vec<Word>,
        relators: Vec<Word>,
    ) -> Result<Self> {
        let n = generators.len();
        let m = meridians.len();
        if m == 0 {
            return Err(Error::Link("at least one component is required".into()));
        }
        if conj.len() != n {
            return Err(Error::Link("conjugation table has the wrong length".into()));
        }
        if longitudes.len() != m {
            return Err(Error::Link(format!("{} longitudes for {m} components", longitudes.len())));
        }
        for (j, &g) in meridians.iter().enumerate() {
            if g >= n {
                return Err(Error::GeneratorOutOfRange { index: g, count: n });
            }
            if meridians[..j].contains(&g) {
                return Err(Error::Link(format!("meridian `{}` chosen for two components", generators[g])));
            }
            if conj[g].is_some() {
                return Err(Error::Link(format!("meridian `{}` has a conjugation entry", generators[g])));
            }
        }
        for w in longitudes.iter().chain(&relators) {
            if let Some(g) = w.max_generator().filter(|&g| g >= n) {
                return Err(Error::GeneratorOutOfRange { index: g, count: n });
            }
        }
        let mut component = vec![usize::MAX; n];
        for (j, &g) in meridians.iter().enumerate() {
            component[g] = j;
        }
        for y in 0..n {
            let mut chain = vec![y];
            let mut cur = y;
            while component[cur] == usize::MAX {
                let c = conj[cur].as_ref().ok_or_else(|| {
                    Error::Link(format!("incomplete conjugation table: no entry for `{}`", generators[cur]))
                })?;
                if let Some(g) = c.conjugator.max_generator().filter(|&g| g >= n) {
                    return Err(Error::GeneratorOutOfRange { index: g, count: n });
                }
                cur = c.base;
                if cur >= n {
                    return Err(Error::GeneratorOutOfRange { index: cur, count: n });
                }
                if chain.contains(&cur) {
                    return Err(Error::Link(format!("cyclic conjugation bases through `{}`", generators[cur])));
                }
                chain.push(cur);
            }
            let j = component[cur];
            for g in chain {
                component[g] = j;
            }
        }
        for (j, lam) in longitudes.iter().enumerate() {
            let sum: i64 = lam
                .runs()
                .iter()
                .filter(|&&(g, _)| component[g] == j)
                .map(|&(_, e)| e)
                .sum();
            if sum != 0 {
                return Err(Error::Link(format!(
                    "longitude {} has exponent sum {sum} in its own meridian class (framing must be zero)",
                    j + 1
                )));
            }
        }
        Ok(LinkData {
            m,
            generators,
            meridians,
            conj,
            component,
            longitudes,
            relators,
        })
    }

    /// Link data whose longitudes are already words in the meridians.
    pub fn from_meridian_words(longitudes: Vec<Word>) -> Result<Self> {
        let m = longitudes.len();
        let generators = (1..=m).map(|i| format!("x{i}")).collect();
        LinkData::new(generators, (0..m).collect(), vec![None; m], longitudes, Vec::new())
    }

    pub fn components(&self) -> usize {
        self.m
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn meridians(&self) -> &[usize] {
        &self.meridians
    }

    pub fn longitudes(&self) -> &[Word] {
        &self.longitudes
    }

    /// Component whose meridian class contains generator g.
    pub fn component_of(&self, g: usize) -> usize {
        self.component[g]
    }

    /// The group presentation: explicit relators plus y⁻¹·w·g·w⁻¹ for each
    /// conjugation entry.
    pub fn presentation(&self) -> Result<Presentation> {
        let mut rels = self.relators.clone();
        for (y, c) in self.conj.iter().enumerate() {
            if let Some(c) = c {
                let w = &c.conjugator;
                rels.push(
                    Word::generator(y)
                        .inverse()
                        .concat(w)
                        .concat(&Word::generator(c.base))
                        .concat(&w.inverse())
                        .reduced(),
                );
            }
        }
        Presentation::new("link", self.generators.clone(), rels, false)
    }

    /// Longitudes as words in the meridians x₁…x_m (letters 0..m), correct
    /// modulo the (q+1)-st lower central term.
    pub fn rewrite(&self, q: usize) -> Result<Vec<Word>> {
        if q == 0 {
            return Err(Error::InvalidArgument("rewrite depth must be at least 1".into()));
        }
        let n = self.generators.len();
        let mut e: Vec<Word> = (0..n).map(|y| Word::generator(self.component[y])).collect();
        for _ in 1..q {
            let next: Vec<Word> = (0..n)
                .map(|y| match &self.conj[y] {
                    None => e[y].clone(),
                    Some(c) => {
                        let w = c.conjugator.substitute(&e);
                        w.concat(&e[c.base]).concat(&w.inverse()).reduced()
                    }
                })
                .collect();
            if let Some(w) = next.iter().find(|w| w.length() > MAX_REWRITE_LENGTH) {
                return Err(Error::Overflow(format!(
                    "rewritten generator has length {} at depth {q}",
                    w.length()
                )));
            }
            if next == e {
                break;
            }
            e = next;
        }
        Ok(self.longitudes.iter().map(|l| l.substitute(&e).reduced()).collect())
    }
}

fn link_err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse(ParseError::new(line, col, ParseErrorKind::Syntax(msg.into())))
}

fn parse_component(tok: &str, m: Option<usize>, line: usize, col: usize) -> Result<usize> {
    let m = m.ok_or_else(|| link_err(line, col, "`components` must come first"))?;
    match tok.parse::<usize>() {
        Ok(j) if (1..=m).contains(&j) => Ok(j - 1),
        _ => Err(link_err(line, col, format!("component index `{tok}` not in 1..{m}"))),
    }
}

/// Parse a `.lnk` document.
pub fn parse_link(text: &str) -> Result<LinkData> {
    // First pass: declare generators so later lines may refer forward.
    let mut generators: Vec<String> = Vec::new();
    let declare = |gens: &mut Vec<String>, name: &str, line: usize, col: usize| -> Result<()> {
        if !valid_name(name) {
            return Err(link_err(line, col, format!("invalid generator name `{name}`")));
        }
        if !gens.iter().any(|g| g == name) {
            gens.push(name.to_string());
        }
        Ok(())
    };
    for (ln, raw) in text.lines().enumerate() {
        let toks = tokens_with_cols(strip_comment(raw));
        match toks.first().map(|t| t.1) {
            Some("gens") => {
                for &(col, g) in &toks[1..] {
                    declare(&mut generators, g, ln + 1, col)?;
                }
            }
            Some("meridian") if toks.len() == 3 => declare(&mut generators, toks[2].1, ln + 1, toks[2].0)?,
            Some("conj") if toks.len() >= 2 => declare(&mut generators, toks[1].1, ln + 1, toks[1].0)?,
            _ => {}
        }
    }
    let n = generators.len();
    let mut m: Option<usize> = None;
    let mut meridians: Vec<Option<usize>> = Vec::new();
    let mut longitudes: Vec<Option<Word>> = Vec::new();
    let mut conj: Vec<Option<Conjugation>> = vec![None; n];
    let mut relators = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = strip_comment(raw);
        let toks = tokens_with_cols(line);
        let Some(&(kw_col, kw)) = toks.first() else {
            continue;
        };
        match kw {
            "components" => {
                if m.is_some() {
                    return Err(link_err(line_no, kw_col, "`components` given twice"));
                }
                let k = match toks.get(1).map(|t| t.1.parse::<usize>()) {
                    Some(Ok(k)) if k >= 1 && toks.len() == 2 => k,
                    _ => return Err(link_err(line_no, kw_col, "expected `components <m>` with m ≥ 1")),
                };
                m = Some(k);
                meridians = vec![None; k];
                longitudes = vec![None; k];
            }
            "meridian" => {
                if toks.len() != 3 {
                    return Err(link_err(line_no, kw_col, "expected `meridian <j> <generator>`"));
                }
                let j = parse_component(toks[1].1, m, line_no, toks[1].0)?;
                if meridians[j].is_some() {
                    return Err(link_err(line_no, kw_col, format!("second meridian for component {}", j + 1)));
                }
                meridians[j] = generators.iter().position(|g| g == toks[2].1);
            }
            "longitude" => {
                if toks.len() < 2 {
                    return Err(link_err(line_no, kw_col, "expected `longitude <j> <word>`"));
                }
                let j = parse_component(toks[1].1, m, line_no, toks[1].0)?;
                if longitudes[j].is_some() {
                    return Err(link_err(line_no, kw_col, format!("second longitude for component {}", j + 1)));
                }
                let mut runs = Vec::new();
                for &(col, tok) in &toks[2..] {
                    runs.extend_from_slice(parse_tokens(tok, line_no, col, &generators)?.runs());
                }
                let w = Word::from_runs(runs);
                longitudes[j] = Some(w.reduced());
            }
            "conj" => {
                // conj y = w ... | base g
                let y = toks.get(1).map(|t| t.1).unwrap_or("");
                if toks.get(2).map(|t| t.1) != Some("=") {
                    return Err(link_err(line_no, kw_col, "expected `conj <y> = <word> | base <g>`"));
                }
                let bar = toks
                    .iter()
                    .position(|t| t.1 == "|")
                    .ok_or_else(|| link_err(line_no, kw_col, "missing `| base <g>`"))?;
                if toks.len() != bar + 3 || toks[bar + 1].1 != "base" {
                    return Err(link_err(line_no, toks[bar].0, "expected `| base <g>`"));
                }
                let names = &generators;
                let mut runs = Vec::new();
                for &(col, tok) in &toks[3..bar] {
                    let w = parse_tokens(tok, line_no, col, names)?;
                    runs.extend_from_slice(w.runs());
                }
                let (bcol, bname) = toks[bar + 2];
                let base = names
                    .iter()
                    .position(|g| g == bname)
                    .ok_or_else(|| Error::Parse(ParseError::new(line_no, bcol, ParseErrorKind::UnknownGenerator(bname.into()))))?;
                let yi = names.iter().position(|g| g == y).expect("declared in first pass");
                if conj[yi].is_some() {
                    return Err(link_err(line_no, toks[1].0, format!("second conjugation entry for `{y}`")));
                }
                conj[yi] = Some(Conjugation {
                    conjugator: Word::from_runs(runs).reduced(),
                    base,
                });
            }
            "rel" => {
                let mut runs = Vec::new();
                for &(col, tok) in &toks[1..] {
                    runs.extend_from_slice(parse_tokens(tok, line_no, col, &generators)?.runs());
                }
                relators.push(Word::from_runs(runs).reduced());
            }
            "gens" => {}
            other => return Err(link_err(line_no, kw_col, format!("unknown directive `{other}`"))),
        }
    }
    if m.is_none() {
        return Err(link_err(0, 0, "missing `components` line"));
    }
    let meridians = meridians
        .into_iter()
        .enumerate()
        .map(|(j, g)| g.ok_or_else(|| link_err(0, 0, format!("no meridian for component {}", j + 1))))
        .collect::<Result<Vec<_>>>()?;
    let longitudes = longitudes
        .into_iter()
        .enumerate()
        .map(|(j, w)| w.ok_or_else(|| link_err(0, 0, format!("no longitude for component {}", j + 1))))
        .collect::<Result<Vec<_>>>()?;
    LinkData::new(generators, meridians, conj, longitudes, relators)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MilnorEntry {
    pub index: Vec<usize>,
    pub value: i64,
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MilnorTable {
    pub components: usize,
    pub maxlen: usize,
    pub depth: usize,
    pub index_convention: &'static str,
    pub delta_convention: &'static str,
    pub entries: Vec<MilnorEntry>,
}

impl MilnorTable {
    pub fn get(&self, index: &[usize]) -> Option<&MilnorEntry> {
        self.entries.iter().find(|e| e.index == index)
    }

    pub fn to_csv(&self) -> String {
        let sep = if self.components < 10 { "" } else { "." };
        let mut out = String::from("I,value,delta\n");
        for e in &self.entries {
            let i: Vec<String> = e.index.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{},{},{}\n", i.join(sep), e.value, e.delta));
        }
        out
    }
}

/// All multi-indices of length k over 1..=m in lexicographic order.
fn multi_indices(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..=m).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// Cyclic permutations of proper subsequences of I of length ≥ 2.
fn reduced_indices(index: &[usize]) -> Vec<Vec<usize>> {
    let k = index.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << k) - 1 {
        if mask.count_ones() < 2 {
            continue;
        }
        let sub: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).map(|i| index[i]).collect();
        for r in 0..sub.len() {
            let mut rot = sub.clone();
            rot.rotate_left(r);
            out.push(rot);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// μ̄ table for all multi-indices of length 2..=maxlen, rewriting at depth
/// `depth` (≥ maxlen − 1).
pub fn mu_table_with(link: &LinkData, maxlen: usize, depth: usize, bounds: &Bounds, exec: Exec) -> Result<MilnorTable> {
    if maxlen < 2 {
        return Err(Error::InvalidArgument("maxlen must be at least 2".into()));
    }
    if depth + 1 < maxlen {
        return Err(Error::InvalidArgument(format!(
            "rewrite depth {depth} is too small for length {maxlen}"
        )));
    }
    let m = link.m;
    bounds.check(m, maxlen - 1)?;
    let lambdas = link.rewrite(depth)?;
    let space = Arc::new(WordSpace::new(m, maxlen - 1));
    let expansions = par::map(exec, &lambdas, |w| magnus_in(&space, w));
    let mut known: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
    let mut entries = Vec::new();
    for k in 2..=maxlen {
        let indices = multi_indices(m, k);
        let row: Vec<Result<MilnorEntry>> = par::map(exec, &indices, |idx| {
            let letters: Vec<usize> = idx[..k - 1].iter().map(|i| i - 1).collect();
            let c = expansions[idx[k - 1] - 1].coeff(&letters);
            let raw = c
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Overflow(format!("μ̄ value for {idx:?} does not fit in 64 bits")))?;
            let delta = reduced_indices(idx)
                .iter()
                .fold(0i64, |g, j| g.gcd(known.get(j).expect("shorter values computed first")));
            let value = if delta > 0 { raw.rem_euclid(delta) } else { raw };
            Ok(MilnorEntry {
                index: idx.clone(),
                value,
                delta,
            })
        });
        for e in row {
            let e = e?;
            known.insert(e.index.clone(), e.value);
            entries.push(e);
        }
    }
    Ok(MilnorTable {
        components: m,
        maxlen,
        depth,
        index_convention: INDEX_CONVENTION,
        delta_convention: DELTA_CONVENTION,
        entries,
    })
}

pub fn mu_table(link: &LinkData, maxlen: usize, bounds: &Bounds) -> Result<MilnorTable> {
    mu_table_with(link, maxlen, maxlen.saturating_sub(1).max(1), bounds, Exec::default())
}

/// (value, indeterminacy) of μ̄(I) for a 1-based multi-index.
pub fn mu_bar(link: &LinkData, index: &[usize], bounds: &Bounds) -> Result<(i64, i64)> {
    if index.len() < 2 {
        return Err(Error::InvalidArgument("multi-index must have length at least 2".into()));
    }
    if let Some(&i) = index.iter().find(|&&i| i == 0 || i > link.m) {
        return Err(Error::InvalidArgument(format!("index {i} not in 1..{}", link.m)));
    }
    let t = mu_table(link, index.len(), bounds)?;
    let e = t.get(index).expect("table is complete");
    Ok((e.value, e.delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(runs: &[(usize, i64)]) -> Word {
        Word::from_runs(runs.iter().copied())
    }

    fn hopf() -> LinkData {
        LinkData::from_meridian_words(vec![Word::generator(1), Word::generator(0)]).unwrap()
    }

    fn borromean() -> LinkData {
        let c = |a: usize, b: usize| Word::commutator(&Word::generator(a), &Word::generator(b));
        LinkData::from_meridian_words(vec![c(1, 2), c(2, 0), c(0, 1)]).unwrap()
    }

    #[test]
    fn hopf_values() {
        let b = Bounds::default();
        assert_eq!(mu_bar(&hopf(), &[1, 2], &b).unwrap(), (1, 0));
        assert_eq!(mu_bar(&hopf(), &[2, 1], &b).unwrap(), (1, 0));
        assert_eq!(hopf().rewrite(3).unwrap(), vec![Word::generator(1), Word::generator(0)]);
    }

    #[test]
    fn borromean_values() {
        let b = Bounds::default();
        let t = mu_table(&borromean(), 3, &b).unwrap();
        assert!(t.entries.iter().filter(|e| e.index.len() == 2).all(|e| e.value == 0 && e.delta == 0));
        assert_eq!(mu_bar(&borromean(), &[2, 3, 1], &b).unwrap(), (1, 0));
        assert_eq!(t.get(&[1, 2, 3]).unwrap().value.abs(), 1);
        assert_eq!(t.get(&[3, 2, 1]).unwrap().value.abs(), 1);
        assert_eq!(t.get(&[1, 1, 2]).unwrap().value, 0);
    }

    #[test]
    fn unlink_vanishes() {
        let u = LinkData::from_meridian_words(vec![Word::identity(); 3]).unwrap();
        let t = mu_table(&u, 4, &Bounds::default()).unwrap();
        assert_eq!(t.entries.len(), 9 + 27 + 81);
        assert!(t.entries.iter().all(|e| e.value == 0 && e.delta == 0));
    }

    #[test]
    fn indeterminacy() {
        // Whitehead-style data with linking number 2 on both components.
        let l = LinkData::from_meridian_words(vec![w(&[(1, 2)]), w(&[(0, 2)])]).unwrap();
        let t = mu_table(&l, 3, &Bounds::default()).unwrap();
        assert_eq!(t.get(&[1, 2]).unwrap().value, 2);
        let e = t.get(&[1, 1, 2]).unwrap();
        assert_eq!(e.delta, 2);
        assert!((0..2).contains(&e.value));
        assert_eq!(reduced_indices(&[1, 2, 3]).len(), 6);
    }

    #[test]
    fn wirtinger_rewrite() {
        let text = "components 2\n\
                    meridian 1 a1\n\
                    meridian 2 b1\n\
                    conj a2 = b1 | base a1\n\
                    conj b2 = a1 | base b1\n\
                    longitude 1 b2\n\
                    longitude 2 a2\n";
        let l = parse_link(text).unwrap();
        assert_eq!(l.component_of(2), 0);
        assert_eq!(l.rewrite(1).unwrap(), vec![Word::generator(1), Word::generator(0)]);
        assert_eq!(mu_bar(&l, &[1, 2], &Bounds::default()).unwrap(), (1, 0));
        assert_eq!(l.presentation().unwrap().num_relators(), 2);
        let t2 = mu_table_with(&l, 3, 2, &Bounds::default(), Exec::Sequential).unwrap();
        let t5 = mu_table_with(&l, 3, 5, &Bounds::default(), Exec::Parallel).unwrap();
        assert_eq!(t2.entries, t5.entries);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_link("components 1\nmeridian 1 a\nlongitude 1 a\n").is_err());
        let e = parse_link("components 2\nmeridian 3 a\n").unwrap_err();
        assert!(e.to_string().starts_with("2:"), "{e}");
        let e = parse_link("components 2\nmeridian 1 a\nmeridian 2 b\nconj c = a | base a\nlongitude 1 b\nlongitude 2 q\n")
            .unwrap_err();
        assert!(e.to_string().contains("unknown generator"), "{e}");
        let e = parse_link("components 1\nmeridian 1 a\ngens c\nlongitude 1 c\n").unwrap_err();
        assert!(e.to_string().contains("incomplete"), "{e}");
    }

    #[test]
    fn csv_output() {
        let t = mu_table(&hopf(), 2, &Bounds::default()).unwrap();
        assert_eq!(t.to_csv(), "I,value,delta\n11,0,0\n12,1,0\n21,1,0\n22,0,0\n");
    }
}
