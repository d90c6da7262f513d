//! Command-line front end.
//!
//! Exit codes: 0 means the requested check passed or the artifact was
//! produced; 1 means the run finished but found something negative (a
//! loop that is not automorphic, a nonsplit verdict, a scan
//! counterexample or witness); 2 means the input or invocation was
//! invalid. No report is written on exit 2.

use crate::construct::{
    self, beta_loop, canonical_delta, example1_loop, example2_loop, hora_jed_witness,
    lie_to_loop, predicted_center, random_delta, random_hora_jed,
};
use crate::formats::{
    beta_from_json, lie_from_json, lie_to_json, loop_from_cayley, loop_to_cayley, LoopReport,
    SplitPart,
};
use crate::gf2::FieldF2m;
use crate::lie::{Catalog, LieAlgebraF2, W2PlusMethod};
use crate::loops::{FiniteLoop, SplitOutcome, SplitTranscript, DEFAULT_CLOSURE_BUDGET};
use crate::search::{scan_nonsplit, scan_problem1, ScanMode, DEFAULT_BUDGET_ORDER};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "caloop", version, about = "Finite commutative automorphic loops of exponent 2")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for scans; defaults to the available parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Lie algebras over F2: validation, properties, derived loops.
    #[command(subcommand)]
    Lie(LieCmd),
    /// Cayley-table loops: analysis and nuclear splitting.
    #[command(subcommand)]
    Loop(LoopCmd),
    /// The loop constructions.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Surveys over nilpotent bracket tables.
    #[command(subcommand)]
    Scan(ScanCmd),
}

#[derive(Subcommand)]
enum LieCmd {
    /// Check that a lief2-v1 file is a Lie algebra (Jacobi holds).
    Validate { file: PathBuf },
    /// Series dims and the W-properties.
    Props {
        file: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Derive the loop x * y = x + y + [x, y] as cayley-v1.
    ToLoop {
        file: PathBuf,
        /// Largest loop order to build.
        #[arg(long, default_value_t = construct::DEFAULT_ORDER_CAP)]
        budget_order: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Emit a catalog algebra as lief2-v1.
    Make {
        /// Abelian algebra of this dimension.
        #[arg(long)]
        dim: Option<usize>,
        /// Free nilpotent: generator count (with --class).
        #[arg(long)]
        gens: Option<usize>,
        /// Free nilpotent: nilpotency class (with --gens).
        #[arg(long)]
        class: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LoopCmd {
    /// Predicates, nuclei, center, automorphic check, split attempt.
    /// Exits 1 when the loop is not automorphic.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Nuclear split search. Exits 1 on a nonsplit verdict.
    Split {
        file: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Loop of a beta-v1 file, as cayley-v1.
    Beta {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Field loop with delta into GF(2^m) avoiding 1 (seeded or greedy).
    Example1 {
        /// Field degree m.
        #[arg(long, default_value_t = 4)]
        m: u32,
        /// H dimension (number of delta basis images).
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// Draw delta at random instead of the greedy canonical one.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Subfield loop on GF(2^m) over GF(2^d), order 2^(m+1).
    Example2 {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Nuclear semidirect product from a square-zero endomorphism set.
    Horajed {
        /// K dimension.
        #[arg(long, default_value_t = 4)]
        dim: usize,
        /// H dimension.
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScanArgs {
    /// Dimension or inclusive range, e.g. 5 or 3..5.
    #[arg(long)]
    dim: String,
    /// Visit every flag pattern (excludes --samples).
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Number of seeded draws instead of exhaustion.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Subcommand)]
enum ScanCmd {
    /// Classify candidates; exits 1 if any counterexample is found.
    Problem1 {
        #[command(flatten)]
        scan: ScanArgs,
        /// Largest loop order the W2- branch may build.
        #[arg(long, default_value_t = DEFAULT_BUDGET_ORDER)]
        budget_order: usize,
    },
    /// Hunt nonsplit loops; exits 1 if any witness is found.
    Nonsplit {
        #[command(flatten)]
        scan: ScanArgs,
    },
}

#[derive(Args)]
struct ReportArgs {
    /// Print the report as JSON instead of a text summary.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to a file.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

impl ReportArgs {
    fn emit<T: Serialize>(&self, report: &T, text: &str) -> Result<()> {
        let json = || {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        };
        if self.json {
            print!("{}", json());
        } else {
            println!("{text}");
        }
        if let Some(path) = &self.out {
            fs::write(path, json()).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

pub fn run(cli: Cli) -> i32 {
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Lie(cmd) => run_lie(cmd),
        Command::Loop(cmd) => run_loop(cmd),
        Command::Construct(cmd) => run_construct(cmd),
        Command::Scan(cmd) => run_scan(cmd),
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_lie(path: &Path) -> Result<LieAlgebraF2> {
    let l = lie_from_json(&read_to_string(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    l.validate()
        .with_context(|| format!("{} is not a Lie algebra", path.display()))?;
    Ok(l)
}

fn load_loop(path: &Path) -> Result<FiniteLoop> {
    loop_from_cayley(&read_to_string(path)?)
        .with_context(|| format!("parsing {}", path.display()))
}

fn write_artifact(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct PropsReport {
    dim: usize,
    nilpotent: bool,
    lower_central_dims: Vec<usize>,
    derived_dims: Vec<usize>,
    w1: bool,
    w2: bool,
    w2plus: bool,
}

fn run_lie(cmd: LieCmd) -> Result<i32> {
    match cmd {
        LieCmd::Validate { file } => {
            let l = lie_from_json(&read_to_string(&file)?)
                .with_context(|| format!("parsing {}", file.display()))?;
            match l.validate() {
                Ok(()) => {
                    println!("ok: Lie algebra of dim {}", l.dim());
                    Ok(0)
                }
                Err(e) => {
                    println!("invalid: {e}");
                    Ok(1)
                }
            }
        }
        LieCmd::Props { file, report } => {
            let l = load_lie(&file)?;
            let s = l.series();
            if !s.nilpotent && l.dim() > 20 {
                bail!("W1 check on a non-nilpotent algebra needs dim <= 20");
            }
            let direct = l.check_w2plus(W2PlusMethod::Direct);
            let derived = l.check_w2plus(W2PlusMethod::DerivedSeries);
            assert_eq!(direct, derived, "W2+ implementations disagree");
            let r = PropsReport {
                dim: l.dim(),
                nilpotent: s.nilpotent,
                lower_central_dims: s.lower_central_dims.clone(),
                derived_dims: s.derived_dims.clone(),
                w1: l.check_w1(),
                w2: l.check_w2(),
                w2plus: direct,
            };
            let text = format!(
                "dim {}: nilpotent {}, lcs {:?}, derived {:?}, W1 {}, W2 {}, W2+ {}",
                r.dim, r.nilpotent, r.lower_central_dims, r.derived_dims, r.w1, r.w2, r.w2plus
            );
            report.emit(&r, &text)?;
            Ok(0)
        }
        LieCmd::ToLoop {
            file,
            budget_order,
            out,
        } => {
            let l = load_lie(&file)?;
            let q = lie_to_loop(&l, budget_order)?;
            write_artifact(out.as_ref(), &loop_to_cayley(&q))?;
            Ok(0)
        }
        LieCmd::Make {
            dim,
            gens,
            class,
            out,
        } => {
            let l = match (dim, gens, class) {
                (None, Some(g), Some(c)) => {
                    LieAlgebraF2::catalog_make(Catalog::FreeNilpotent { gens: g, class: c })?
                }
                (Some(n), None, None) => LieAlgebraF2::catalog_make(Catalog::Abelian(n))?,
                _ => bail!("pass either --dim, or --gens with --class"),
            };
            write_artifact(out.as_ref(), &lie_to_json(&l))?;
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct SplitReport {
    order: usize,
    split: Option<SplitPart>,
    transcript: Option<SplitTranscript>,
}

fn run_loop(cmd: LoopCmd) -> Result<i32> {
    match cmd {
        LoopCmd::Analyze { file, report } => {
            let q = load_loop(&file)?;
            let r = LoopReport::analyze(&q, DEFAULT_CLOSURE_BUDGET)?;
            let split = match &r.split {
                Some(s) => format!("K size {}, H size {}", s.k.len(), s.h.len()),
                None => "none".to_string(),
            };
            let text = format!(
                "order {}: commutative {}, exponent2 {}, associative {}, automorphic {}, \
                 |center| {}, |N_l| {}, |N_m| {}, |N_r| {}, split {}",
                r.order,
                r.commutative,
                r.exponent2,
                r.associative,
                r.automorphic,
                r.center.len(),
                r.nucleus_left.len(),
                r.nucleus_middle.len(),
                r.nucleus_right.len(),
                split
            );
            report.emit(&r, &text)?;
            Ok(if r.automorphic { 0 } else { 1 })
        }
        LoopCmd::Split { file, report } => {
            let q = load_loop(&file)?;
            match q.nuclear_split(DEFAULT_CLOSURE_BUDGET)? {
                SplitOutcome::Witness(w) => {
                    let text = format!(
                        "splits: K = {:?}, H = {:?}",
                        w.k, w.h
                    );
                    let r = SplitReport {
                        order: q.order(),
                        split: Some(SplitPart { k: w.k, h: w.h }),
                        transcript: None,
                    };
                    report.emit(&r, &text)?;
                    Ok(0)
                }
                SplitOutcome::NonSplit(t) => {
                    let text = format!(
                        "nonsplit: {} K candidates, {} H candidates, {} pairs examined",
                        t.k_candidates, t.h_candidates, t.pairs_examined
                    );
                    let r = SplitReport {
                        order: q.order(),
                        split: None,
                        transcript: Some(t),
                    };
                    report.emit(&r, &text)?;
                    Ok(1)
                }
            }
        }
    }
}

fn run_construct(cmd: ConstructCmd) -> Result<i32> {
    match cmd {
        ConstructCmd::Beta { file, out } => {
            let b = beta_from_json(&read_to_string(&file)?)
                .with_context(|| format!("parsing {}", file.display()))?;
            let q = beta_loop(&b)?;
            let z = predicted_center(&b).elements(b.k_dim());
            eprintln!("order {}, predicted |Z| = {}", q.order(), z.len());
            write_artifact(out.as_ref(), &loop_to_cayley(&q))?;
            Ok(0)
        }
        ConstructCmd::Example1 { m, d, seed, out } => {
            let f = FieldF2m::new(m)?;
            let delta = match seed {
                Some(s) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    random_delta(&f, d as usize, &mut rng)
                }
                None => canonical_delta(&f, d as usize)?,
            };
            let (q, _) = example1_loop(&f, &delta)?;
            eprintln!("order {}, delta images {delta:?}", q.order());
            write_artifact(out.as_ref(), &loop_to_cayley(&q))?;
            Ok(0)
        }
        ConstructCmd::Example2 { m, d, out } => {
            let (q, _) = example2_loop(m, d)?;
            eprintln!("order {}", q.order());
            write_artifact(out.as_ref(), &loop_to_cayley(&q))?;
            Ok(0)
        }
        ConstructCmd::Horajed { dim, d, seed, out } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, coeffs) = random_hora_jed(dim, d, &mut rng);
            let (q, a) = hora_jed_witness(&x, &coeffs)?;
            eprintln!(
                "order {}, central fixed vector {:?}",
                q.order(),
                a.ones().collect::<Vec<_>>()
            );
            write_artifact(out.as_ref(), &loop_to_cayley(&q))?;
            Ok(0)
        }
    }
}

fn parse_dims(spec: &str) -> Result<Vec<usize>> {
    let parse = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| anyhow!("bad dimension {s:?} in --dim"))
    };
    if let Some((lo, hi)) = spec.split_once("..") {
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if lo > hi {
            bail!("empty range {spec:?}");
        }
        Ok((lo..=hi).collect())
    } else {
        Ok(vec![parse(spec)?])
    }
}

fn scan_mode(args: &ScanArgs) -> Result<ScanMode> {
    match (args.exhaustive, args.samples) {
        (true, None) => Ok(ScanMode::Exhaustive),
        (false, Some(count)) => Ok(ScanMode::Sampled {
            count,
            seed: args.seed,
        }),
        (false, None) => bail!("pass --exhaustive or --samples N"),
        (true, Some(_)) => unreachable!("clap rejects the combination"),
    }
}

fn run_scan(cmd: ScanCmd) -> Result<i32> {
    match cmd {
        ScanCmd::Problem1 { scan, budget_order } => {
            let dims = parse_dims(&scan.dim)?;
            let mode = scan_mode(&scan)?;
            let mut reports = Vec::new();
            for n in dims {
                reports.push(scan_problem1(n, mode, budget_order)?);
            }
            let mut lines = Vec::new();
            let mut found = 0;
            for r in &reports {
                found += r.counterexamples.len();
                lines.push(format!(
                    "dim {}: {} candidates, {} jacobi, {} consistent, {} counterexamples, \
                     {} skipped",
                    r.dim,
                    r.candidates,
                    r.jacobi_passed,
                    r.consistent,
                    r.counterexamples.len(),
                    r.skipped_budget
                ));
            }
            scan.report.emit(&reports, &lines.join("\n"))?;
            Ok(if found > 0 { 1 } else { 0 })
        }
        ScanCmd::Nonsplit { scan } => {
            let dims = parse_dims(&scan.dim)?;
            let mode = scan_mode(&scan)?;
            let mut reports = Vec::new();
            for n in dims {
                reports.push(scan_nonsplit(n, mode)?);
            }
            let mut lines = Vec::new();
            let mut found = 0;
            for r in &reports {
                found += r.witnesses.len();
                lines.push(format!(
                    "dim {}: {} candidates, {} jacobi, {} automorphic, {} with index-4 N_m, \
                     {} nonsplit witnesses",
                    r.dim, r.candidates, r.jacobi_passed, r.automorphic, r.index4,
                    r.witnesses.len()
                ));
            }
            scan.report.emit(&reports, &lines.join("\n"))?;
            Ok(if found > 0 { 1 } else { 0 })
        }
    }
}
