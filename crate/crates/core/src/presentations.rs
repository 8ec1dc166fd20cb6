//! Finitely presented groups, words in free groups, and homomorphisms.
//!
//! The `.grp` format is line oriented:
//!
//! ```text
//! # trefoil
//! name trefoil
//! gens a b
//! rel a b a b^-1 a^-1 b^-1
//! flag aspherical
//! ```
//!
//! A `.hom` file names its source and target and assigns one image word per
//! source generator, possibly several per `map` line separated by commas:
//!
//! ```text
//! source F2.grp
//! target trefoil.grp
//! map x -> a, y -> b
//! ```

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, ParseErrorKind, Result};

/// A word in a free group, stored as runs of (generator, nonzero exponent).
///
/// Words are not necessarily reduced; `free_reduce` produces the reduced
/// representative. Equality is structural.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Build a word from runs; zero exponents are dropped, nothing is merged.
    pub fn from_runs<I: IntoIterator<Item = (usize, i64)>>(runs: I) -> Self {
        Word {
            letters: runs.into_iter().filter(|&(_, e)| e != 0).collect(),
        }
    }

    pub fn generator(g: usize) -> Self {
        Word {
            letters: vec![(g, 1)],
        }
    }

    pub fn power(g: usize, e: i64) -> Self {
        Word::from_runs([(g, e)])
    }

    /// The commutator `[u, v] = u⁻¹ v⁻¹ u v`, reduced.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.inverse()
            .concat(&v.inverse())
            .concat(u)
            .concat(v)
            .reduced()
    }

    pub fn runs(&self) -> &[(usize, i64)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of letters counted with multiplicity.
    pub fn length(&self) -> u64 {
        self.letters.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    /// Unit letters `(g, ±1)` in order.
    pub fn unit_letters(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.letters
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// Concatenation without reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() + other.letters.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// Reduced product.
    pub fn mul(&self, other: &Word) -> Word {
        free_reduce(&self.concat(other))
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..e.unsigned_abs() {
            out = out.concat(&base);
        }
        out.reduced()
    }

    pub fn reduced(&self) -> Word {
        free_reduce(self)
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.iter().all(|&(_, e)| e != 0)
            && self.letters.windows(2).all(|w| w[0].0 != w[1].0)
    }

    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.letters
            .iter()
            .filter(|&&(h, _)| h == g)
            .map(|&(_, e)| e)
            .sum()
    }

    /// Exponent sums over all `n` generators.
    pub fn exponent_vector(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0; n];
        for &(g, e) in &self.letters {
            if g < n {
                v[g] += e;
            }
        }
        v
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|&(g, _)| g).max()
    }

    /// Replace each generator `g` by `images[g]`, reducing the result.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Vec::new();
        for &(g, e) in &self.letters {
            let img = if e < 0 { images[g].inverse() } else { images[g].clone() };
            for _ in 0..e.unsigned_abs() {
                out.extend_from_slice(&img.letters);
            }
        }
        free_reduce(&Word { letters: out })
    }

    /// Render with the given generator names in `.grp` token syntax.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "1");
        }
        for (i, &(g, e)) in self.word.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let name = self.names.get(g).map(String::as_str).unwrap_or("?");
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Freely reduce a word: merge adjacent runs of the same generator and drop
/// zero exponents, cascading through cancellations.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<(usize, i64)> = Vec::with_capacity(w.letters.len());
    for &(g, e) in &w.letters {
        if e == 0 {
            continue;
        }
        match stack.last_mut() {
            Some(top) if top.0 == g => {
                top.1 += e;
                if top.1 == 0 {
                    stack.pop();
                }
            }
            _ => stack.push((g, e)),
        }
    }
    Word { letters: stack }
}

/// A finitely presented group `⟨generators | relators⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub name: String,
    generators: Vec<String>,
    relators: Vec<Word>,
    /// User-asserted: the presentation 2-complex is aspherical. Never inferred.
    pub aspherical: bool,
}

pub(crate) fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

impl Presentation {
    pub fn new<S: Into<String>>(
        name: S,
        generators: Vec<String>,
        relators: Vec<Word>,
        aspherical: bool,
    ) -> Result<Self> {
        let mut seen = HashMap::new();
        for g in &generators {
            if !valid_name(g) {
                return Err(ParseError::new(
                    0,
                    0,
                    ParseErrorKind::Syntax(format!("invalid generator name `{g}`")),
                )
                .into());
            }
            if seen.insert(g.clone(), ()).is_some() {
                return Err(
                    ParseError::new(0, 0, ParseErrorKind::DuplicateGenerator(g.clone())).into(),
                );
            }
        }
        let n = generators.len();
        let relators = relators
            .into_iter()
            .map(|r| {
                if let Some(g) = r.max_generator().filter(|&g| g >= n) {
                    Err(Error::GeneratorOutOfRange { index: g, count: n })
                } else {
                    Ok(r.reduced())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation {
            name: name.into(),
            generators,
            relators,
            aspherical,
        })
    }

    /// Free group on the given names.
    pub fn free(names: &[&str]) -> Self {
        Presentation::new(
            format!("F{}", names.len()),
            names.iter().map(|s| s.to_string()).collect(),
            vec![],
            true,
        )
        .expect("valid free group names")
    }

    /// Free group on `m` generators named `x1..xm`.
    pub fn free_rank(m: usize) -> Self {
        let names: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        Presentation::new(format!("F{m}"), names, vec![], true).expect("valid names")
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn num_relators(&self) -> usize {
        self.relators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.max_generator() {
            Some(g) if g >= self.generators.len() => Err(Error::GeneratorOutOfRange {
                index: g,
                count: self.generators.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Parse a whitespace-separated token list (`a b^-1 c^3`) over this
    /// presentation's generators.
    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        parse_tokens(text, 1, 1, &self.generators)
    }

    pub fn to_grp_string(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str(&format!("name {}\n", self.name));
        }
        out.push_str("gens");
        for g in &self.generators {
            out.push(' ');
            out.push_str(g);
        }
        out.push('\n');
        for r in &self.relators {
            if r.is_empty() {
                out.push_str("rel 1\n");
            } else {
                out.push_str(&format!("rel {}\n", r.display_with(&self.generators)));
            }
        }
        if self.aspherical {
            out.push_str("flag aspherical\n");
        }
        out
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}", self.generators.join(", "))?;
        if !self.relators.is_empty() {
            write!(f, " | ")?;
            for (i, r) in self.relators.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", r.display_with(&self.generators))?;
            }
        }
        write!(f, "⟩")
    }
}

/// Split a line into (1-based column, token) pairs.
pub(crate) fn tokens_with_cols(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, t)| (line[..byte].chars().count() + 1, t))
        .collect()
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parse one token `name`, `name^k`.
fn parse_token(
    tok: &str,
    line: usize,
    col: usize,
    names: &[String],
) -> Result<Option<(usize, i64)>, ParseError> {
    if tok == "1" {
        return Ok(None);
    }
    let (name, exp) = match tok.split_once('^') {
        Some((n, e)) => {
            let e: i64 = e
                .parse()
                .map_err(|_| ParseError::new(line, col, ParseErrorKind::BadExponent(tok.into())))?;
            if e == 0 {
                return Err(ParseError::new(line, col, ParseErrorKind::BadExponent(tok.into())));
            }
            (n, e)
        }
        None => (tok, 1),
    };
    if !valid_name(name) {
        return Err(ParseError::new(
            line,
            col,
            ParseErrorKind::Syntax(format!("unexpected token `{tok}`")),
        ));
    }
    let g = names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| ParseError::new(line, col, ParseErrorKind::UnknownGenerator(name.into())))?;
    Ok(Some((g, exp)))
}

/// Parse a run of tokens starting at `col0` on `line`.
pub(crate) fn parse_tokens(
    text: &str,
    line: usize,
    col0: usize,
    names: &[String],
) -> Result<Word, ParseError> {
    let mut runs = Vec::new();
    for (col, tok) in tokens_with_cols(text) {
        if let Some(run) = parse_token(tok, line, col0 + col - 1, names)? {
            runs.push(run);
        }
    }
    Ok(Word::from_runs(runs))
}

/// Parse a `.grp` document.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut name = String::new();
    let mut generators: Vec<String> = Vec::new();
    let mut relators = Vec::new();
    let mut aspherical = false;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = strip_comment(raw);
        let toks = tokens_with_cols(line);
        let Some(&(kw_col, kw)) = toks.first() else {
            continue;
        };
        match kw {
            "gens" => {
                for &(col, g) in &toks[1..] {
                    if !valid_name(g) {
                        return Err(ParseError::new(
                            line_no,
                            col,
                            ParseErrorKind::Syntax(format!("invalid generator name `{g}`")),
                        ));
                    }
                    if generators.iter().any(|h| h == g) {
                        return Err(ParseError::new(
                            line_no,
                            col,
                            ParseErrorKind::DuplicateGenerator(g.into()),
                        ));
                    }
                    generators.push(g.to_string());
                }
            }
            "rel" => {
                let mut runs = Vec::new();
                for &(col, tok) in &toks[1..] {
                    if let Some(run) = parse_token(tok, line_no, col, &generators)? {
                        runs.push(run);
                    }
                }
                relators.push(free_reduce(&Word::from_runs(runs)));
            }
            "flag" => {
                for &(col, flag) in &toks[1..] {
                    match flag {
                        "aspherical" => aspherical = true,
                        other => {
                            return Err(ParseError::new(
                                line_no,
                                col,
                                ParseErrorKind::Syntax(format!("unknown flag `{other}`")),
                            ))
                        }
                    }
                }
            }
            "name" => {
                name = toks[1..].iter().map(|t| t.1).collect::<Vec<_>>().join(" ");
            }
            other => {
                return Err(ParseError::new(
                    line_no,
                    kw_col,
                    ParseErrorKind::Syntax(format!("unknown directive `{other}`")),
                ))
            }
        }
    }
    Ok(Presentation {
        name,
        generators,
        relators,
        aspherical,
    })
}

/// A homomorphism given by generator images. Well-definedness is not an
/// invariant; see [`hom_welldefined_upto`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    source: Presentation,
    target: Presentation,
    images: Vec<Word>,
}

impl GroupHom {
    pub fn new(source: Presentation, target: Presentation, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.num_generators() {
            return Err(Error::InvalidArgument(format!(
                "{} images for {} source generators",
                images.len(),
                source.num_generators()
            )));
        }
        let images = images
            .into_iter()
            .map(|w| target.check_word(&w).map(|_| w.reduced()))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupHom {
            source,
            target,
            images,
        })
    }

    pub fn identity(p: &Presentation) -> Self {
        let images = (0..p.num_generators()).map(Word::generator).collect();
        GroupHom {
            source: p.clone(),
            target: p.clone(),
            images,
        }
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn target(&self) -> &Presentation {
        &self.target
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Image of a source word as a reduced target word.
    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(&self.images)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.target.num_generators() != other.source.num_generators() {
            return Err(Error::InvalidArgument(
                "composition of homomorphisms with mismatched middle group".into(),
            ));
        }
        let images = self.images.iter().map(|w| other.apply(w)).collect();
        GroupHom::new(self.source.clone(), other.target.clone(), images)
    }

    /// Exponent-sum matrix (source generators × target generators).
    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.target.num_generators();
        self.images.iter().map(|w| w.exponent_vector(n)).collect()
    }

    pub fn to_hom_string(&self) -> String {
        let mut out = String::new();
        for (g, w) in self.images.iter().enumerate() {
            out.push_str(&format!(
                "map {} -> {}\n",
                self.source.generators[g],
                w.display_with(&self.target.generators)
            ));
        }
        out
    }
}

/// Header lines of a `.hom` file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HomHeader {
    pub source: Option<String>,
    pub target: Option<String>,
}

/// Read the `source`/`target` path lines of a `.hom` document.
pub fn parse_hom_header(text: &str) -> Result<HomHeader, ParseError> {
    let mut header = HomHeader::default();
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if let Some(rest) = line.strip_prefix("source") {
            if rest.starts_with(char::is_whitespace) {
                header.source = Some(rest.trim().to_string());
            }
        } else if let Some(rest) = line.strip_prefix("target") {
            if rest.starts_with(char::is_whitespace) {
                header.target = Some(rest.trim().to_string());
            }
        } else if !line.is_empty() && !line.starts_with("map") {
            return Err(ParseError::new(
                ln + 1,
                1,
                ParseErrorKind::Syntax(format!("unknown directive in `{line}`")),
            ));
        }
    }
    Ok(header)
}

/// Parse a `.hom` document against already-loaded source and target.
pub fn parse_hom(text: &str, src: &Presentation, tgt: &Presentation) -> Result<GroupHom> {
    let mut images: Vec<Option<Word>> = vec![None; src.num_generators()];
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = strip_comment(raw);
        let toks = tokens_with_cols(line);
        let Some(&(kw_col, kw)) = toks.first() else {
            continue;
        };
        match kw {
            "source" | "target" => continue,
            "map" => {}
            other => {
                return Err(ParseError::new(
                    line_no,
                    kw_col,
                    ParseErrorKind::Syntax(format!("unknown directive `{other}`")),
                )
                .into())
            }
        }
        // Everything after the keyword, split on commas into assignments.
        let body_start = line
            .char_indices()
            .nth(kw_col - 1 + kw.chars().count())
            .map(|(i, _)| i)
            .unwrap_or(line.len());
        let mut offset = body_start;
        for part in line[body_start..].split(',') {
            let col_base = line[..offset].chars().count() + 1;
            offset += part.len() + 1;
            let Some((lhs, rhs)) = part.split_once("->") else {
                return Err(ParseError::new(
                    line_no,
                    col_base,
                    ParseErrorKind::Syntax("expected `generator -> word`".into()),
                )
                .into());
            };
            let lhs_tok = lhs.trim();
            let lhs_col = col_base + lhs.len() - lhs.trim_start().len();
            let g = src.generator_index(lhs_tok).ok_or_else(|| {
                ParseError::new(
                    line_no,
                    lhs_col,
                    ParseErrorKind::UnknownGenerator(lhs_tok.to_string()),
                )
            })?;
            if images[g].is_some() {
                return Err(ParseError::new(
                    line_no,
                    lhs_col,
                    ParseErrorKind::DuplicateAssignment(lhs_tok.to_string()),
                )
                .into());
            }
            let rhs_col = col_base + lhs.chars().count() + 2;
            let w = parse_tokens(rhs, line_no, rhs_col, tgt.generators())?;
            images[g] = Some(free_reduce(&w));
        }
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(g, w)| {
            w.ok_or_else(|| {
                Error::from(ParseError::new(
                    0,
                    0,
                    ParseErrorKind::MissingAssignment(src.generators()[g].clone()),
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GroupHom::new(src.clone(), tgt.clone(), images)
}

/// Outcome of a truncated well-definedness check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum WellDefinedness {
    /// Every source relator maps to 1 in the target's quotient ℚB/I^(q+1).
    CertifiedUpto { q: usize },
    /// The first source relator whose image is nontrivial modulo degree `q+1`.
    Refuted { relator: usize, word: String },
}

impl WellDefinedness {
    pub fn is_certified(&self) -> bool {
        matches!(self, WellDefinedness::CertifiedUpto { .. })
    }
}

/// Check that `h` kills every source relator in the target's truncated
/// Magnus quotient up to degree `q`.
pub fn hom_welldefined_upto(
    h: &GroupHom,
    q: usize,
    bounds: &crate::nilq::Bounds,
) -> Result<WellDefinedness> {
    if q == 0 {
        return Err(Error::InvalidArgument("truncation degree must be ≥ 1".into()));
    }
    let tq = crate::nilq::truncated_quotient(h.target(), q, bounds)?;
    for (i, r) in h.source().relators().iter().enumerate() {
        let img = h.apply(r);
        if !tq.is_trivial(&img) {
            return Ok(WellDefinedness::Refuted {
                relator: i,
                word: r.display_with(h.source().generators()).to_string(),
            });
        }
    }
    Ok(WellDefinedness::CertifiedUpto { q })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(runs: &[(usize, i64)]) -> Word {
        Word::from_runs(runs.iter().copied())
    }

    #[test]
    fn parse_trefoil() {
        let p = parse_presentation("gens a b\nrel a b a b^-1 a^-1 b^-1").unwrap();
        assert_eq!(p.generators(), &["a".to_string(), "b".to_string()]);
        assert_eq!(
            p.relators(),
            &[w(&[(0, 1), (1, 1), (0, 1), (1, -1), (0, -1), (1, -1)])]
        );
        assert!(!p.aspherical);
    }

    #[test]
    fn parse_free_rank_one() {
        let p = parse_presentation("gens x\n").unwrap();
        assert_eq!(p.num_generators(), 1);
        assert_eq!(p.num_relators(), 0);
    }

    #[test]
    fn duplicate_generator() {
        let err = parse_presentation("gens a a").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateGenerator("a".into()));
        assert_eq!((err.line, err.col), (1, 8));
    }

    #[test]
    fn unknown_token_located() {
        let err = parse_presentation("gens a b\n\nrel a c").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownGenerator("c".into()));
        assert_eq!((err.line, err.col), (3, 7));
        let err = parse_presentation("gens a\nrel a^0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::BadExponent(_)));
        let err = parse_presentation("gens a\nrelator a").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn comments_flags_powers() {
        let p = parse_presentation("# a comment\nname Z2\ngens x # trailing\nrel x^2\nflag aspherical\n")
            .unwrap();
        assert_eq!(p.name, "Z2");
        assert_eq!(p.relators(), &[w(&[(0, 2)])]);
        assert!(p.aspherical);
    }

    #[test]
    fn relators_stored_reduced() {
        let p = parse_presentation("gens x y\nrel x y y^-1 x^2").unwrap();
        assert_eq!(p.relators(), &[w(&[(0, 3)])]);
    }

    #[test]
    fn free_reduce_examples() {
        assert!(free_reduce(&w(&[(0, 1), (1, 1), (1, -1), (0, -1)])).is_empty());
        assert_eq!(free_reduce(&w(&[(0, 2), (0, -1)])), w(&[(0, 1)]));
        let comm = w(&[(0, -1), (1, -1), (0, 1), (1, 1)]);
        assert_eq!(free_reduce(&comm), comm);
        assert_eq!(Word::commutator(&Word::generator(0), &Word::generator(1)), comm);
    }

    #[test]
    fn parse_hom_examples() {
        let f1 = parse_presentation("gens x").unwrap();
        let id = parse_hom("map x -> x", &f1, &f1).unwrap();
        assert_eq!(id, GroupHom::identity(&f1));

        let f2 = parse_presentation("gens x y").unwrap();
        let tref = parse_presentation("gens a b\nrel a b a b^-1 a^-1 b^-1").unwrap();
        let h = parse_hom("source F2.grp\ntarget trefoil.grp\nmap x -> a, y -> b", &f2, &tref)
            .unwrap();
        assert_eq!(h.images(), &[Word::generator(0), Word::generator(1)]);

        let err = parse_hom("map x -> q", &f1, &f1).unwrap_err();
        match err {
            Error::Parse(e) => {
                assert_eq!(e.kind, ParseErrorKind::UnknownGenerator("q".into()));
                assert_eq!((e.line, e.col), (1, 10));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_hom_assignment_errors() {
        let f2 = parse_presentation("gens x y").unwrap();
        let err = parse_hom("map x -> x", &f2, &f2).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse(ParseError { kind: ParseErrorKind::MissingAssignment(ref g), .. }) if g == "y"
        ));
        let err = parse_hom("map x -> x, y -> y\nmap x -> y", &f2, &f2).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse(ParseError { kind: ParseErrorKind::DuplicateAssignment(ref g), .. }) if g == "x"
        ));
        let h = parse_hom("map x -> 1\nmap y -> x^2 y", &f2, &f2).unwrap();
        assert!(h.images()[0].is_empty());
    }

    #[test]
    fn hom_header() {
        let h = parse_hom_header("source a.grp\ntarget b.grp\nmap x -> y\n").unwrap();
        assert_eq!(h.source.as_deref(), Some("a.grp"));
        assert_eq!(h.target.as_deref(), Some("b.grp"));
    }

    #[test]
    fn apply_and_compose() {
        let f2 = Presentation::free(&["x", "y"]);
        let x = Word::generator(0);
        let y = Word::generator(1);
        let h = GroupHom::new(
            f2.clone(),
            f2.clone(),
            vec![x.mul(&Word::commutator(&x, &y)), y.clone()],
        )
        .unwrap();
        // x[x,y] = y⁻¹xy
        assert_eq!(h.images()[0], w(&[(1, -1), (0, 1), (1, 1)]));
        let hh = h.then(&h).unwrap();
        assert_eq!(hh.images()[0], w(&[(1, -2), (0, 1), (1, 2)]));
    }

    #[test]
    fn grp_round_trip_fixed() {
        let text = "name t\ngens a b\nrel a b a b^-1 a^-1 b^-1\nrel a^3 b^-2\nflag aspherical\n";
        let p = parse_presentation(text).unwrap();
        assert_eq!(p.to_grp_string(), text);
        assert_eq!(parse_presentation(&p.to_grp_string()).unwrap(), p);
    }
}
