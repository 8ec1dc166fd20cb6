//! `gsl`: command-line front end for the gsl-core invariants.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a hypothesis failed or
//! a certificate could not be obtained, 3 a theorem audit was violated.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;

use gsl_core::cclab::{
    augmented_homology_dim, complex_validate, euler_characteristic_report, fuzz_strebel, homology_rank, strebel_audit,
    two_connected_torsion_check, EulerReport, FreeComplex, StrebelReport,
};
use gsl_core::exactlin::abelianization;
use gsl_core::fox::{h1_rank_abelian_cover, metabelian_mono_certificate, MonoVerdict};
use gsl_core::freesolv::{freesolvable_hypotheses, parse_elements};
use gsl_core::liehom::dwyer_quotient_dim;
use gsl_core::milnor::{mu_table_with, parse_link};
use gsl_core::nilq::{dwyer_rational_verdict, stallings_rational_verdict, truncated_quotient, GrDegree, LcsReport};
use gsl_core::presentations::{parse_hom, parse_presentation};
use gsl_core::report::{MapVerdict, Status};
use gsl_core::{Bounds, Error, Exec, GroupHom, Presentation};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_FALSIFIED: u8 = 3;

#[derive(Parser)]
#[command(name = "gsl", version, about = "Exact invariants of finitely presented groups and links")]
struct Cli {
    /// Emit JSON reports instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Run every computation on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Override the bound on m^q (default: GSL_MAX_BASIS or 5000).
    #[arg(long, global = true, value_name = "N")]
    max_basis: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Abelianization H1 of a presentation.
    Abel { presentation: PathBuf },
    /// Dimensions a_k and l_k of the rational lower-central graded pieces.
    Lcs {
        presentation: PathBuf,
        #[arg(long)]
        upto: usize,
    },
    /// Rational Stallings audit for a homomorphism A → B.
    Stallings {
        source: PathBuf,
        target: PathBuf,
        hom: PathBuf,
        #[arg(long)]
        upto: usize,
        /// Assume H2(A;Q) → H2(B;Q) is onto when it cannot be certified.
        #[arg(long)]
        assume_h2: bool,
    },
    /// Rational Dwyer audit at level n for a homomorphism A → B.
    Dwyer {
        source: PathBuf,
        target: PathBuf,
        hom: PathBuf,
        #[arg(long)]
        n: usize,
        /// Also report dim H2(;Q) (presentations must be flagged aspherical).
        #[arg(long)]
        h2: bool,
    },
    /// Dimension of the rational Dwyer quotient at level n.
    DwyerDim {
        presentation: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Rank of H1 of the universal torsion-free abelian cover.
    AlexRank { presentation: PathBuf },
    /// Metabelian rank certificate for a homomorphism A → B.
    MetaMono {
        source: PathBuf,
        target: PathBuf,
        hom: PathBuf,
    },
    /// Milnor mu-bar table of a link.
    Milnor {
        link: PathBuf,
        #[arg(long)]
        maxlen: usize,
        /// Longitude rewrite depth (default maxlen - 1).
        #[arg(long)]
        depth: Option<usize>,
        /// Emit CSV instead of text.
        #[arg(long)]
        csv: bool,
    },
    /// Validate a chain complex and audit its homology ranks.
    CcxAudit { complex: PathBuf },
    /// Kernel/cokernel torsion check on level-one homology with Z^b coefficients.
    TwoConn {
        source: PathBuf,
        target: PathBuf,
        hom: PathBuf,
        /// `abel` for the free abelianization, or rows like `1,0;0,1`
        /// (one row per target generator).
        #[arg(long)]
        gamma: String,
        /// Assume the H2 spanning hypothesis when it cannot be certified.
        #[arg(long)]
        assume_h2: bool,
    },
    /// Hypothesis check for free solvable subgroups.
    Freesolv {
        presentation: PathBuf,
        #[arg(long)]
        elems: PathBuf,
        #[arg(long)]
        n: usize,
        /// Assume the H2 hypothesis when it cannot be certified.
        #[arg(long)]
        assume_h2: bool,
    },
    /// Strebel-type rank audit on seeded random complexes.
    FuzzStrebel {
        #[arg(long, default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Ctx {
    json: bool,
    bounds: Bounds,
    exec: Exec,
}

impl Ctx {
    fn emit<T: Serialize>(&self, report: &T, text: impl FnOnce() -> String) -> anyhow::Result<()> {
        if self.json {
            println!("{}", serde_json::to_string_pretty(report)?);
        } else {
            print!("{}", text());
        }
        Ok(())
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("{}: cannot read file", path.display()))
}

/// Prefix core errors (which carry line:col for parse failures) with the path.
fn in_file<T>(path: &Path, r: gsl_core::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| anyhow::Error::new(e).context(format!("{}", path.display())))
}

fn load_presentation(path: &Path) -> anyhow::Result<Presentation> {
    let text = read(path)?;
    let mut p = in_file(path, parse_presentation(&text).map_err(Error::from))?;
    if p.name.is_empty() {
        p.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    }
    Ok(p)
}

fn load_hom(src: &Path, tgt: &Path, hom: &Path) -> anyhow::Result<GroupHom> {
    let a = load_presentation(src)?;
    let b = load_presentation(tgt)?;
    let text = read(hom)?;
    in_file(hom, parse_hom(&text, &a, &b))
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Certified => "certified",
        Status::Failed => "failed",
        Status::NotCertifiable => "not certifiable",
        Status::Assumed => "assumed",
    }
}

fn verdict(v: MapVerdict) -> &'static str {
    match v {
        MapVerdict::Iso => "iso",
        MapVerdict::Mono => "mono",
        MapVerdict::Epi => "epi",
        MapVerdict::Neither => "neither",
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn degree_lines(degrees: &[GrDegree]) -> String {
    degrees
        .iter()
        .map(|d| {
            format!(
                "  k={}: l {} -> {}, rank {}, {}\n",
                d.k,
                d.l_src,
                d.l_tgt,
                d.rank,
                verdict(d.verdict)
            )
        })
        .collect()
}

fn parse_gamma(spec: &str, target: &Presentation) -> anyhow::Result<Vec<Vec<i64>>> {
    if spec.trim() == "abel" {
        return Ok(abelianization(target).generator_images());
    }
    spec.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| anyhow!("--gamma: bad integer `{}`", x.trim())))
                .collect()
        })
        .collect()
}

#[derive(Serialize)]
struct AbelReport {
    presentation: String,
    h1: String,
    free_rank: usize,
    torsion: Vec<String>,
}

#[derive(Serialize)]
struct CountReport<'a> {
    presentation: &'a str,
    n: usize,
    value: usize,
}

#[derive(Serialize)]
struct CcxReport {
    valid: bool,
    ranks: Vec<usize>,
    homology_rank: Vec<usize>,
    augmented_dim: Vec<usize>,
    strebel: StrebelReport,
    euler: EulerReport,
    falsification: bool,
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let mut bounds = Bounds::from_env();
    if let Some(n) = cli.max_basis {
        if n == 0 {
            bail!("--max-basis must be positive");
        }
        bounds.max_basis = n;
    }
    let ctx = Ctx {
        json: cli.json,
        bounds,
        exec: if cli.sequential { Exec::Sequential } else { Exec::default() },
    };
    match cli.command {
        Command::Abel { presentation } => {
            let p = load_presentation(&presentation)?;
            let ab = abelianization(&p);
            let r = AbelReport {
                presentation: p.name.clone(),
                h1: ab.describe(),
                free_rank: ab.free_rank,
                torsion: ab.torsion_coefficients.iter().map(|t| t.to_string()).collect(),
            };
            ctx.emit(&r, || format!("H1 = {}\n", r.h1))?;
            Ok(EXIT_OK)
        }
        Command::Lcs { presentation, upto } => {
            let p = load_presentation(&presentation)?;
            let nq = in_file(&presentation, truncated_quotient(&p, upto, &ctx.bounds))?;
            let r = LcsReport::from(&nq);
            ctx.emit(&r, || format!("a = {}\nl = {}\n", join(&r.a), join(&r.l)))?;
            Ok(EXIT_OK)
        }
        Command::Stallings {
            source,
            target,
            hom,
            upto,
            assume_h2,
        } => {
            let h = load_hom(&source, &target, &hom)?;
            let r = stallings_rational_verdict(&h, upto, assume_h2, &ctx.bounds)?;
            ctx.emit(&r, || {
                let mut s = format!(
                    "H1(;Q) iso: {}\nH2 onto: {} (target bound {})\n",
                    status(r.hypotheses.h1_rational_iso),
                    status(r.hypotheses.h2_epi),
                    r.hypotheses.h2_target_upper_bound
                );
                s += &degree_lines(&r.degrees);
                s += &match r.first_failure {
                    None => format!("gr iso through degree {}\n", r.q),
                    Some(k) => format!("gr iso fails at degree {k}\n"),
                };
                if r.falsification {
                    s += "FALSIFICATION: conclusion fails under certified hypotheses\n";
                } else if r.assumption_refuted {
                    s += "assumed H2 hypothesis is refuted by the conclusion\n";
                }
                s
            })?;
            Ok(if r.falsification {
                EXIT_FALSIFIED
            } else if !r.hypotheses_usable() || r.assumption_refuted {
                EXIT_HYPOTHESIS
            } else {
                EXIT_OK
            })
        }
        Command::Dwyer {
            source,
            target,
            hom,
            n,
            h2,
        } => {
            let h = load_hom(&source, &target, &hom)?;
            let r = dwyer_rational_verdict(&h, n, h2, &ctx.bounds)?;
            ctx.emit(&r, || {
                let mut s = format!("H1(;Q) iso: {}\n", status(r.hypotheses.h1_rational_iso));
                s += &degree_lines(&r.degrees);
                s += &format!(
                    "condition 1 (gr iso, k <= {n}): {}\ncondition 2 (Dwyer quotient onto): {} ({} -> {}, rank {})\n",
                    r.condition1.holds, r.condition2.holds, r.dwyer_dim_src, r.dwyer_dim_tgt, r.dwyer_image_rank
                );
                if let Some(d) = &r.h2 {
                    s += &format!("dim H2: {} -> {}\n", d.source, d.target);
                }
                if r.falsification {
                    s += "FALSIFICATION: the two conditions disagree\n";
                }
                s
            })?;
            Ok(if r.falsification {
                EXIT_FALSIFIED
            } else if r.hypotheses.h1_rational_iso != Status::Certified {
                EXIT_HYPOTHESIS
            } else {
                EXIT_OK
            })
        }
        Command::DwyerDim { presentation, n } => {
            let p = load_presentation(&presentation)?;
            let value = in_file(&presentation, dwyer_quotient_dim(&p, n, &ctx.bounds))?;
            let r = CountReport {
                presentation: &p.name,
                n,
                value,
            };
            ctx.emit(&r, || format!("dim = {value}\n"))?;
            Ok(EXIT_OK)
        }
        Command::AlexRank { presentation } => {
            let p = load_presentation(&presentation)?;
            let value = in_file(&presentation, h1_rank_abelian_cover(&p))?;
            let r = CountReport {
                presentation: &p.name,
                n: 1,
                value,
            };
            ctx.emit(&r, || format!("rank = {value}\n"))?;
            Ok(EXIT_OK)
        }
        Command::MetaMono { source, target, hom } => {
            let h = load_hom(&source, &target, &hom)?;
            let c = metabelian_mono_certificate(&h, &ctx.bounds)?;
            ctx.emit(&c, || {
                let v = match c.verdict {
                    MonoVerdict::RankPreserved { rank } => format!("rank preserved ({rank})"),
                    MonoVerdict::RankDropped { r_src, r_img } => format!("rank dropped ({r_src} -> {r_img})"),
                };
                format!(
                    "H1(;Q) injective: {}\nranks: source {}, target {}, image {}\n{v}\n",
                    status(c.h1_rational_injective),
                    c.source_rank,
                    c.target_rank,
                    c.image_rank
                )
            })?;
            Ok(if c.rank_preserved() { EXIT_OK } else { EXIT_HYPOTHESIS })
        }
        Command::Milnor {
            link,
            maxlen,
            depth,
            csv,
        } => {
            let text = read(&link)?;
            let l = in_file(&link, parse_link(&text))?;
            let depth = depth.unwrap_or(maxlen.saturating_sub(1).max(1));
            let t = in_file(&link, mu_table_with(&l, maxlen, depth, &ctx.bounds, ctx.exec))?;
            if csv && !ctx.json {
                print!("{}", t.to_csv());
            } else {
                ctx.emit(&t, || {
                    let mut s = format!("# {}\n# {}\n", t.index_convention, t.delta_convention);
                    for e in &t.entries {
                        s += &format!("mu({}) = {}", join(&e.index), e.value);
                        if e.delta > 0 {
                            s += &format!(" mod {}", e.delta);
                        }
                        s.push('\n');
                    }
                    s
                })?;
            }
            Ok(EXIT_OK)
        }
        Command::CcxAudit { complex } => {
            let text = read(&complex)?;
            let c = in_file(&complex, FreeComplex::from_ccx_str(&text))?;
            let v = complex_validate(&c);
            if let Some(f) = v.failure {
                if ctx.json {
                    println!("{}", serde_json::to_string_pretty(&f)?);
                }
                bail!("{}: not a chain complex: {f}", complex.display());
            }
            let ps: Vec<usize> = (0..=c.top()).collect();
            let strebel = strebel_audit(&c);
            let euler = euler_characteristic_report(&c);
            let r = CcxReport {
                valid: true,
                ranks: c.ranks().to_vec(),
                homology_rank: ps.iter().map(|&p| homology_rank(&c, p)).collect(),
                augmented_dim: ps.iter().map(|&p| augmented_homology_dim(&c, p)).collect(),
                falsification: strebel.falsification || euler.falsification,
                strebel,
                euler,
            };
            ctx.emit(&r, || {
                let mut s = format!("valid complex, ranks {}\n", join(&r.ranks));
                for row in &r.strebel.rows {
                    s += &format!(
                        "  H{}: rank over Lambda {}, dim over Q {}{}\n",
                        row.p,
                        row.rank_lambda,
                        row.dim_q,
                        if row.holds { "" } else { "  VIOLATION" }
                    );
                }
                s += &format!(
                    "euler characteristic: {} (ranks), {} (homology), {} (augmented)\n",
                    r.euler.from_ranks, r.euler.from_homology, r.euler.from_augmented
                );
                if r.falsification {
                    s += "FALSIFICATION: rank audit violated\n";
                }
                s
            })?;
            Ok(if r.falsification { EXIT_FALSIFIED } else { EXIT_OK })
        }
        Command::TwoConn {
            source,
            target,
            hom,
            gamma,
            assume_h2,
        } => {
            let h = load_hom(&source, &target, &hom)?;
            let g = parse_gamma(&gamma, h.target())?;
            let r = two_connected_torsion_check(&h, &g, assume_h2, &ctx.bounds)?;
            ctx.emit(&r, || {
                let mut s = format!(
                    "coefficients Z^{}\nH1(;Q) mono: {}, onto: {}\nH2 spanned: {}\n",
                    r.b,
                    status(r.hypotheses.h1_rational_mono),
                    status(r.hypotheses.h1_rational_epi),
                    status(r.hypotheses.h2_spanned)
                );
                s += &format!(
                    "ranks: source {}, target {}, image {}\nkernel rank {}, cokernel rank {}\ncone: H1 rank {}, H2 rank {}\n",
                    r.source_rank, r.target_rank, r.image_rank, r.kernel_rank, r.cokernel_rank, r.cone_h1_rank, r.cone_h2_rank
                );
                if r.falsification {
                    s += "FALSIFICATION: non-torsion kernel or cokernel under certified hypotheses\n";
                }
                s
            })?;
            let usable = r.hypotheses.h1_rational_mono == Status::Certified && r.hypotheses.h2_spanned.usable();
            Ok(if r.falsification {
                EXIT_FALSIFIED
            } else if !usable {
                EXIT_HYPOTHESIS
            } else {
                EXIT_OK
            })
        }
        Command::Freesolv {
            presentation,
            elems,
            n,
            assume_h2,
        } => {
            let p = load_presentation(&presentation)?;
            let text = read(&elems)?;
            let es = in_file(&elems, parse_elements(&text, &p))?;
            let r = freesolvable_hypotheses(&p, &es, n, assume_h2, &ctx.bounds)?;
            ctx.emit(&r, || {
                let mut s = format!(
                    "{} elements, rank {} in H1(;Q): {}\nH2 hypothesis: {}\n",
                    r.elements,
                    r.h1_rank,
                    status(r.hypotheses.h1_independent),
                    status(r.hypotheses.h2_derived)
                );
                if let Some(c) = &r.metabelian_probe {
                    s += &format!(
                        "metabelian probe: {}\n",
                        if c.rank_preserved() { "rank preserved" } else { "rank dropped" }
                    );
                }
                if r.falsification {
                    s += "FALSIFICATION: probe fails under certified hypotheses\n";
                } else if r.assumption_refuted {
                    s += "assumed H2 hypothesis is refuted by the probe\n";
                }
                s
            })?;
            Ok(if r.falsification {
                EXIT_FALSIFIED
            } else if !r.hypotheses_usable || r.assumption_refuted {
                EXIT_HYPOTHESIS
            } else {
                EXIT_OK
            })
        }
        Command::FuzzStrebel { count, seed } => {
            let r = fuzz_strebel(count, seed, ctx.exec);
            ctx.emit(&r, || {
                let mut s = format!(
                    "{} complexes (seed {}): {} invalid, {} rank violations, {} Euler violations, {} quotient violations\n",
                    r.count, r.seed, r.invalid_complexes, r.strebel_violations, r.euler_violations, r.quotient_violations
                );
                if let Some(v) = &r.first_violation {
                    s += &format!("FALSIFICATION: instance {} ({})\n{}\n", v.instance, v.kind, v.ccx);
                }
                s
            })?;
            Ok(if r.falsification { EXIT_FALSIFIED } else { EXIT_OK })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let not_well_defined = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::NotWellDefined { .. })));
            ExitCode::from(if not_well_defined { EXIT_HYPOTHESIS } else { EXIT_INPUT })
        }
    }
}
