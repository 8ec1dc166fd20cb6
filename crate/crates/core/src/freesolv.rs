//! Hypothesis checks for free solvable subgroups.
//!
//! For elements a₁…a_k of B, the criterion asks that their classes be
//! linearly independent in H₁(B;ℚ) and that H₂(B;ℚ) be carried by the
//! (n−1)-st derived term; the subgroup they generate is then free solvable
//! of derived length n. Only the first hypothesis is decidable from a
//! presentation. For n = 2 the metabelian rank certificate of the map from
//! the free group serves as a necessary-condition probe of the conclusion.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{rational_rank, relation_matrix, IntMatrix};
use crate::fox::{metabelian_mono_certificate, MonoCertificate};
use crate::nilq::{h2_upper_bound, Bounds};
use crate::presentations::{parse_tokens, strip_comment, GroupHom, Presentation, Word};
use crate::report::Status;

#[derive(Debug, Clone, Serialize)]
pub struct FreeSolvHypotheses {
    pub h1_independent: Status,
    pub h2_derived: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct FreeSolvReport {
    pub n: usize,
    pub elements: usize,
    /// Rank of the span of the element classes in H₁(B;ℚ).
    pub h1_rank: usize,
    pub hypotheses: FreeSolvHypotheses,
    pub hypotheses_usable: bool,
    pub metabelian_probe: Option<MonoCertificate>,
    pub falsification: bool,
    pub assumption_refuted: bool,
}

/// Rank of the classes of `elements` in H₁(B;ℚ).
pub fn h1_class_rank(ambient: &Presentation, elements: &[Word]) -> Result<usize> {
    let m = ambient.num_generators();
    for w in elements {
        ambient.check_word(w)?;
    }
    let rows: Vec<Vec<i64>> = elements.iter().map(|w| w.exponent_vector(m)).collect();
    let rel = relation_matrix(ambient);
    Ok(rational_rank(&IntMatrix::from_rows(m, &rows).vstack(&rel)) - rational_rank(&rel))
}

/// The map F_k → B sending the i-th free generator to the i-th element.
pub fn subset_hom(ambient: &Presentation, elements: &[Word]) -> Result<GroupHom> {
    let names: Vec<String> = (1..=elements.len()).map(|i| format!("a{i}")).collect();
    let source = Presentation::new("F", names, Vec::new(), true)?;
    GroupHom::new(source, ambient.clone(), elements.to_vec())
}

pub fn freesolvable_hypotheses(
    ambient: &Presentation,
    elements: &[Word],
    n: usize,
    assume_h2: bool,
    bounds: &Bounds,
) -> Result<FreeSolvReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("derived length must be at least 1".into()));
    }
    let h1_rank = h1_class_rank(ambient, elements)?;
    let h1_independent = Status::from_bool(h1_rank == elements.len());
    // With H₂(B;ℚ) = 0 the hypothesis holds trivially.
    let h2_derived = if h2_upper_bound(ambient) == 0 {
        Status::Certified
    } else if assume_h2 {
        Status::Assumed
    } else {
        Status::NotCertifiable
    };
    let hypotheses_usable = h1_independent == Status::Certified && h2_derived.usable();
    let metabelian_probe = if n == 2 && !elements.is_empty() {
        Some(metabelian_mono_certificate(&subset_hom(ambient, elements)?, bounds)?)
    } else {
        None
    };
    let probe_failed = metabelian_probe.as_ref().is_some_and(|c| !c.rank_preserved());
    Ok(FreeSolvReport {
        n,
        elements: elements.len(),
        h1_rank,
        hypotheses: FreeSolvHypotheses {
            h1_independent,
            h2_derived,
        },
        hypotheses_usable,
        metabelian_probe,
        falsification: hypotheses_usable && h2_derived == Status::Certified && probe_failed,
        assumption_refuted: hypotheses_usable && h2_derived == Status::Assumed && probe_failed,
    })
}

/// One word per non-empty line, over the ambient generators.
pub fn parse_elements(text: &str, ambient: &Presentation) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_tokens(line, ln + 1, 1, ambient.generators())?.reduced());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fox::MonoVerdict;
    use crate::presentations::parse_presentation;
    use proptest::prelude::*;

    fn g(i: usize) -> Word {
        Word::generator(i)
    }

    #[test]
    fn free_generators() {
        let f2 = Presentation::free(&["x", "y"]);
        for n in 1..=3 {
            let r = freesolvable_hypotheses(&f2, &[g(0), g(1)], n, false, &Bounds::default()).unwrap();
            assert_eq!(r.hypotheses.h1_independent, Status::Certified);
            assert!(r.hypotheses_usable);
            assert!(!r.falsification);
            if n == 2 {
                assert!(r.metabelian_probe.unwrap().rank_preserved());
            }
        }
    }

    #[test]
    fn dependent_elements() {
        let f2 = Presentation::free(&["x", "y"]);
        let r = freesolvable_hypotheses(&f2, &[g(0), Word::power(0, 2)], 2, false, &Bounds::default()).unwrap();
        assert_eq!(r.h1_rank, 1);
        assert_eq!(r.hypotheses.h1_independent, Status::Failed);
        assert!(!r.hypotheses_usable && !r.falsification);
    }

    #[test]
    fn second_derived_relator() {
        let xy = Word::commutator(&g(0), &g(1));
        let rel = Word::commutator(&xy, &Word::commutator(&g(1), &xy));
        let b = Presentation::new("B", vec!["x".into(), "y".into()], vec![rel], false).unwrap();
        let r = freesolvable_hypotheses(&b, &[g(0), g(1)], 2, true, &Bounds::default()).unwrap();
        assert_eq!(r.hypotheses.h1_independent, Status::Certified);
        assert_eq!(r.hypotheses.h2_derived, Status::Assumed);
        assert_eq!(r.metabelian_probe.unwrap().verdict, MonoVerdict::RankPreserved { rank: 1 });
        assert!(!r.falsification && !r.assumption_refuted);
    }

    #[test]
    fn elements_file() {
        let t = parse_presentation("gens a b\nrel a b a b^-1 a^-1 b^-1").unwrap();
        let es = parse_elements("# elements\na b^-1\n\nb\n", &t).unwrap();
        assert_eq!(es.len(), 2);
        assert_eq!(h1_class_rank(&t, &es).unwrap(), 1);
        let e = parse_elements("a\nc\n", &t).unwrap_err();
        assert!(e.to_string().starts_with("2:1"), "{e}");
    }

    proptest! {
        #[test]
        fn independence_matches_rank(rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 0..4)) {
            let f3 = Presentation::free(&["x", "y", "z"]);
            let elems: Vec<Word> = rows.iter().map(|r| Word::from_runs(r.iter().enumerate().filter(|e| *e.1 != 0).map(|(i, &e)| (i, e)))).collect();
            let rep = freesolvable_hypotheses(&f3, &elems, 1, false, &Bounds::default()).unwrap();
            let rank = rational_rank(&IntMatrix::from_rows(3, &rows));
            prop_assert_eq!(rep.hypotheses.h1_independent == Status::Certified, rank == rows.len());
        }
    }
}
