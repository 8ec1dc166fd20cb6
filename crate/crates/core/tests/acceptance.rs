//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails or overruns its time budget.

use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use gsl_core::cclab::{
    fuzz_strebel, instance_rng, quotient_rank_bound, random_complex, random_cycles, two_connected_torsion_check,
    FuzzParams,
};
use gsl_core::fox::{h1_rank_abelian_cover, induced_alexander_map, metabelian_mono_certificate, MonoVerdict};
use gsl_core::liehom::{ce_h1_h2, dwyer_quotient_dim, extract_graded_lie};
use gsl_core::milnor::{mu_table, parse_link, LinkData};
use gsl_core::nilq::{
    dwyer_rational_verdict, induced_gr_maps, stallings_rational_verdict, truncated_quotient, witt, GrLevel,
};
use gsl_core::presentations::{parse_hom, parse_presentation};
use gsl_core::report::{MapVerdict, Status};
use gsl_core::{Bounds, Exec, GroupHom, Presentation};
use rand::Rng;

type Check = Result<String, String>;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn grp(name: &str) -> Presentation {
    parse_presentation(&fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn hom(src: &str, tgt: &str, file: &str) -> GroupHom {
    parse_hom(&fs::read_to_string(data(file)).unwrap(), &grp(src), &grp(tgt)).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    let b = Bounds::default();
    let mut checked = 0;
    for (m, qmax) in [(2usize, 6usize), (3, 5)] {
        let nq = truncated_quotient(&Presentation::free_rank(m), qmax, &b).map_err(|e| e.to_string())?;
        for k in 1..=qmax {
            let w = witt(m as u64, k as u64) as usize;
            ensure(nq.l()[k - 1] == w, || format!("m={m} k={k}: l={} witt={w}", nq.l()[k - 1]))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} values of l_k equal witt(m,k)"))
}

fn criterion_2() -> Check {
    let b = Bounds::default();
    let mut vals = Vec::new();
    for n in 2..=5usize {
        let nq = truncated_quotient(&Presentation::free_rank(2), n - 1, &b).map_err(|e| e.to_string())?;
        let lie = extract_graded_lie(&nq).map_err(|e| e.to_string())?;
        let h2 = ce_h1_h2(&lie).h2;
        let w = witt(2, n as u64) as usize;
        ensure(h2 == w, || format!("n={n}: CE H2={h2}, witt(2,{n})={w}"))?;
        vals.push(h2);
    }
    Ok(format!("H2 of free class n-1 for n=2..5: {vals:?}"))
}

fn criterion_3() -> Check {
    let b = Bounds::default();
    let mut count = 0;
    for m in 1..=3 {
        for n in 1..=4 {
            let d = dwyer_quotient_dim(&Presentation::free_rank(m), n, &b).map_err(|e| e.to_string())?;
            ensure(d == 0, || format!("F_{m}, n={n}: {d}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} free-group Dwyer quotients vanish"))
}

fn criterion_4() -> Check {
    for m in 1..=5 {
        let r = h1_rank_abelian_cover(&Presentation::free_rank(m)).map_err(|e| e.to_string())?;
        ensure(r == m - 1, || format!("F_{m}: {r}"))?;
    }
    for name in ["trefoil.grp", "hopf.grp"] {
        let r = h1_rank_abelian_cover(&grp(name)).map_err(|e| e.to_string())?;
        ensure(r == 0, || format!("{name}: {r}"))?;
    }
    Ok("F_1..F_5 give 0..4; trefoil and Hopf give 0".into())
}

fn criterion_5() -> Check {
    let r = fuzz_strebel(1000, 20240601, Exec::default());
    ensure(!r.falsification, || format!("{:?}", r.first_violation))?;
    Ok(format!(
        "1000 complexes: {} rank, {} Euler, {} invalid",
        r.strebel_violations, r.euler_violations, r.invalid_complexes
    ))
}

fn criterion_6() -> Check {
    let params = FuzzParams::default();
    let (mut strict, mut killed) = (0, 0);
    for i in 0..200u64 {
        let mut rng = instance_rng(777, i);
        let c = random_complex(&mut rng, &params);
        let p = rng.gen_range(0..=c.top());
        let cycles = random_cycles(&mut rng, &c, p);
        let q = quotient_rank_bound(&c, &cycles, p).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(q.k_lambda <= q.k_q, || format!("instance {i}: k_Λ={} > k_Q={}", q.k_lambda, q.k_q))?;
        ensure(q.boundary_rank_after >= q.boundary_rank_before, || format!("instance {i}: boundary rank shrank"))?;
        ensure(q.rank_before - q.k_lambda == q.boundary_rank_after - q.boundary_rank_before, || {
            format!("instance {i}: rank accounting off")
        })?;
        strict += (q.k_lambda < q.k_q) as usize;
        killed += (q.k_lambda < q.rank_before) as usize;
    }
    Ok(format!("200 instances hold ({strict} strict, {killed} with homology killed)"))
}

fn criterion_7() -> Check {
    let b = Bounds::default();
    let e = |x: gsl_core::Error| x.to_string();
    let f2 = grp("F2.grp");
    let id_f2 = GroupHom::identity(&f2);
    let twist = hom("F2.grp", "F2.grp", "F2_twist.hom");
    let to_xyy = hom("F2.grp", "B_xyy.grp", "F2_B_xyy.hom");
    let to_meta = hom("F2.grp", "B_meta.grp", "F2_B_meta.hom");
    let meridian = hom("F1.grp", "trefoil.grp", "F1_trefoil.hom");
    let to_z2 = hom("F2.grp", "Z2.grp", "F2_Z2.hom");
    let id_trefoil = GroupHom::identity(&grp("trefoil.grp"));
    let mut lines = 0;

    for h in [&id_f2, &twist] {
        let g = induced_gr_maps(h, 4, GrLevel::Lie, &b).map_err(e)?;
        ensure(g.all_iso(), || "identity/twist: gr not iso".into())?;
        let s = stallings_rational_verdict(h, 5, false, &b).map_err(e)?;
        ensure(s.hypotheses_usable() && s.conclusion_holds && !s.falsification, || {
            "identity/twist: Stallings verdict".into()
        })?;
        lines += 2;
    }
    let g = induced_gr_maps(&to_xyy, 3, GrLevel::Lie, &b).map_err(e)?;
    ensure(
        g.verdict(1) == MapVerdict::Iso && g.verdict(2) == MapVerdict::Iso && g.verdict(3) == MapVerdict::Epi,
        || format!("[[x,y],y]: {:?}", g.degrees),
    )?;
    ensure(g.degrees[2].l_src == 2 && g.degrees[2].l_tgt == 1, || "[[x,y],y]: degree 3 dims".into())?;
    let d2 = dwyer_rational_verdict(&to_xyy, 2, false, &b).map_err(e)?;
    let d3 = dwyer_rational_verdict(&to_xyy, 3, false, &b).map_err(e)?;
    ensure(d2.condition1.holds && d2.condition2.holds && !d2.falsification, || "Dwyer n=2".into())?;
    ensure(!d3.condition1.holds && !d3.condition2.holds && !d3.falsification, || "Dwyer n=3".into())?;
    for n in 1..=4 {
        let d = dwyer_rational_verdict(&id_f2, n, false, &b).map_err(e)?;
        ensure(d.condition1.holds && d.condition2.holds && !d.falsification, || format!("identity Dwyer n={n}"))?;
    }
    lines += 6;

    let s = stallings_rational_verdict(&to_z2, 3, false, &b).map_err(e)?;
    ensure(
        s.hypotheses.h2_epi == Status::NotCertifiable && s.first_failure == Some(2) && !s.falsification,
        || format!("F2->Z2 Stallings: {:?} {:?}", s.hypotheses.h2_epi, s.first_failure),
    )?;
    lines += 1;

    for (name, h, want) in [
        ("F2->B_meta", &to_meta, MonoVerdict::RankPreserved { rank: 1 }),
        ("F2->Z2", &to_z2, MonoVerdict::RankDropped { r_src: 1, r_img: 0 }),
        ("id F2", &id_f2, MonoVerdict::RankPreserved { rank: 1 }),
    ] {
        let c = metabelian_mono_certificate(h, &b).map_err(e)?;
        ensure(c.verdict == want, || format!("{name}: {:?}", c.verdict))?;
        lines += 1;
    }
    let a = induced_alexander_map(&twist, &b).map_err(e)?;
    ensure(a.image_rank == 1, || "twist: image rank".into())?;
    for h in [&id_trefoil, &meridian] {
        let a = induced_alexander_map(h, &b).map_err(e)?;
        ensure(a.image_rank == 0 && a.target_rank == 0, || "trefoil maps: image rank".into())?;
    }
    lines += 3;

    let t = two_connected_torsion_check(&meridian, &[vec![1], vec![1]], false, &b).map_err(e)?;
    ensure(t.kernel_rank == 0 && t.cokernel_rank == 0 && !t.falsification, || "F1->trefoil torsion".into())?;
    let t = two_connected_torsion_check(&id_trefoil, &[vec![1], vec![1]], false, &b).map_err(e)?;
    ensure(t.kernel_rank == 0 && t.cokernel_rank == 0 && !t.falsification, || "identity torsion".into())?;
    let t = two_connected_torsion_check(&to_z2, &[vec![1, 0], vec![0, 1]], false, &b).map_err(e)?;
    ensure(t.kernel_rank == 1 && t.cokernel_rank == 0 && !t.falsification, || "F2->Z2 torsion".into())?;
    lines += 3;
    Ok(format!("{lines} verdicts match, no falsification"))
}

fn criterion_8() -> Check {
    let b = Bounds::default();
    let load = |n: &str| parse_link(&fs::read_to_string(data(n)).unwrap()).map_err(|e| e.to_string());
    let hopf = load("hopf.lnk")?;
    let hopf_w = load("hopf_wirtinger.lnk")?;
    let borr = load("borromean.lnk")?;
    let unlink2 = load("unlink2.lnk")?;
    let unlink3 = load("unlink3.lnk")?;
    let table = |l: &LinkData, k: usize| mu_table(l, k, &b).map_err(|e| e.to_string());

    for l in [&hopf, &hopf_w] {
        let t = table(l, 2)?;
        ensure(t.get(&[1, 2]).map(|e| (e.value, e.delta)) == Some((1, 0)), || "Hopf mu(12)".into())?;
    }
    let t = table(&borr, 3)?;
    ensure(t.get(&[2, 3, 1]).map(|e| (e.value, e.delta)) == Some((1, 0)), || "Borromean mu(231)".into())?;
    ensure(t.entries.iter().filter(|e| e.index.len() == 2).all(|e| e.value == 0), || {
        "Borromean length 2".into()
    })?;
    for l in [&unlink2, &unlink3] {
        let t = table(l, 4)?;
        ensure(t.entries.iter().all(|e| e.value == 0 && e.delta == 0), || "unlink".into())?;
    }
    for l in [&hopf, &hopf_w, &borr, &unlink2, &unlink3] {
        let t = table(l, 2)?;
        for e in &t.entries {
            let sym = t.get(&[e.index[1], e.index[0]]).unwrap();
            ensure(sym.value == e.value, || format!("asymmetric mu at {:?}", e.index))?;
        }
    }
    Ok("Hopf, Borromean, unlink values and linking symmetry hold".into())
}

fn criterion_9() -> Check {
    let meridian = hom("F1.grp", "trefoil.grp", "F1_trefoil.hom");
    let t = two_connected_torsion_check(&meridian, &[vec![1], vec![1]], false, &Bounds::default())
        .map_err(|e| e.to_string())?;
    ensure(t.kernel_rank == 0 && t.cokernel_rank == 0, || {
        format!("ker {}, coker {}", t.kernel_rank, t.cokernel_rank)
    })?;
    Ok(format!(
        "ker 0, coker 0 (H1 mono {:?}, H2 {:?})",
        t.hypotheses.h1_rational_mono, t.hypotheses.h2_spanned
    ))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 9] = [
        ("Witt consistency of lcs on free groups", 30, criterion_1),
        ("CE H2 of free nilpotent Lie algebras equals witt(2,n)", 10, criterion_2),
        ("Dwyer quotients of free groups vanish", 10, criterion_3),
        ("level-one torsion-free derived ranks", 5, criterion_4),
        ("Strebel and Euler audit on 1000 random complexes", 120, criterion_5),
        ("quotient rank bound on 200 instances", 60, criterion_6),
        ("theorem-verdict regression on curated maps", 60, criterion_7),
        ("Milnor invariants of curated links", 5, criterion_8),
        ("two-connected torsion check, meridian into trefoil", 5, criterion_9),
    ];
    let mut failed = 0;
    for (i, (title, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!(
            "[{tag}] criterion {}: {title}: {detail} ({:.2}s, budget {budget}s)",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
