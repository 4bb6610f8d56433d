use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use omega_bounds::bounds::{
    pow2_bound, trivial_bound, BoundEngine, BoundReport, HybridOptions, Pow2Strength, RamificationContext,
};
use omega_bounds::partition::NFactorization;
use omega_bounds::pipeline::{run_line5, run_sums, run_table1, Manifest, RunConfig, Stage};
use omega_bounds::sieves::{ModifiedForm, TotientTerm};
use omega_bounds::sum_problem::{Endpoint, WitnessFilter};
use omega_bounds::Error;

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CHECKPOINT: u8 = 3;

#[derive(Parser)]
#[command(name = "omega-bounds", version, about = "Lower bounds from ω(x^n - 1) and the finite-field sieve pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Directory for CSV, text and manifest outputs.
    #[arg(long, global = true, default_value = "out")]
    output_dir: PathBuf,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Seed mixed into the Pollard rho polynomial choice.
    #[arg(long, global = true)]
    rho_seed: Option<u64>,
    /// Rho iterations allowed per cofactor before giving up.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    effort_cap: Option<u64>,
    /// Record wall-clock timings in the manifest (makes it run-dependent).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print a lower bound on x given n and ω(x^n - 1).
    Bound {
        n: u64,
        omega: usize,
        variant: BoundVariant,
        /// For `ram`: a prime factor of n and whether it divides x^n - 1.
        #[arg(long, value_name = "P:yes|no")]
        divides: Option<String>,
        /// For `pow2`: `thm1.3` (2^{a+2} | x^n - 1 for odd x) or `cor5.3` (2^{a+1}).
        #[arg(long, value_name = "thm1.3|cor5.3")]
        strength: Option<String>,
        /// For `hybrid`: require the top residue class to be non-empty.
        #[arg(long)]
        prop32_constraint: bool,
    },
    /// Cut-offs and search ranges for the line problem over a range of n.
    Table1 {
        #[arg(long, default_value = "2..30", value_parser = parse_range)]
        n_range: (u64, u64),
    },
    /// The degree-5 line problem: intervals, candidates, sieves, exceptions.
    Line5 {
        #[arg(long, value_enum, default_value_t = StageArg::All)]
        stage: StageArg,
        /// Use `φ(k)/k` for the totient factor of the modified sieve.
        #[arg(long)]
        totient_ratio: bool,
        /// Subtract 1 inside the modified-sieve square.
        #[arg(long)]
        subtract_one: bool,
    },
    /// The primitive-element-sum search: interval grids and exception pairs.
    Sums {
        #[arg(long)]
        grids: bool,
        #[arg(long)]
        pairs: bool,
        /// Include `q` equal to an integral lower bound.
        #[arg(long)]
        closed_endpoint: bool,
        /// Only count witnesses coprime to n.
        #[arg(long)]
        coprime: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundVariant {
    Trivial,
    Hybrid,
    Ram,
    Pow2,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Cutoff,
    Intervals,
    Enumerate,
    Sieve,
    All,
}

impl From<StageArg> for Stage {
    fn from(s: StageArg) -> Stage {
        match s {
            StageArg::Cutoff => Stage::Cutoff,
            StageArg::Intervals => Stage::Intervals,
            StageArg::Enumerate => Stage::Enumerate,
            StageArg::Sieve => Stage::Sieve,
            StageArg::All => Stage::All,
        }
    }
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or("expected LO..HI")?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo: u64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: u64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if lo < 2 || hi < lo {
        return Err("need 2 <= LO <= HI".into());
    }
    Ok((lo, hi))
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn parse_divides(s: &str) -> Result<(u64, bool), Failure> {
    let Some((p, flag)) = s.split_once(':') else {
        return usage(format!("--divides expects P:yes|no, got {s:?}"));
    };
    let p: u64 = p.parse().or_else(|_| usage(format!("bad prime in --divides: {p:?}")))?;
    match flag {
        "yes" => Ok((p, true)),
        "no" => Ok((p, false)),
        _ => usage(format!("--divides flag must be yes or no, got {flag:?}")),
    }
}

fn compute_bound(
    n: u64,
    omega: usize,
    variant: BoundVariant,
    divides: Option<&str>,
    strength: Option<&str>,
    prop32: bool,
) -> Result<BoundReport, Failure> {
    if divides.is_some() && !matches!(variant, BoundVariant::Ram) {
        return usage("--divides only applies to the ram variant");
    }
    if strength.is_some() && !matches!(variant, BoundVariant::Pow2) {
        return usage("--strength only applies to the pow2 variant");
    }
    if prop32 && !matches!(variant, BoundVariant::Hybrid) {
        return usage("--prop32-constraint only applies to the hybrid variant");
    }
    let n_fact = NFactorization::of(n).or_else(|e| usage(e.to_string()))?;
    // Argument-shaped library errors are usage errors too.
    let as_usage = |e: Error| match e {
        Error::InvalidArgument(_) | Error::NotABase(_) | Error::NotPrime(_) | Error::InvalidFactorization(_) => {
            Failure::Usage(e.to_string())
        }
        other => Failure::Run(other),
    };
    let report = match variant {
        BoundVariant::Trivial => trivial_bound(&n_fact, omega),
        BoundVariant::Hybrid => BoundEngine::new(n_fact).hybrid(
            omega,
            HybridOptions {
                top_class_nonempty: prop32,
                ..HybridOptions::default()
            },
        ),
        BoundVariant::Ram => {
            let Some(d) = divides else {
                return usage("the ram variant needs --divides P:yes|no");
            };
            let (p, yes) = parse_divides(d)?;
            let ctx = RamificationContext::new(&n_fact, p, yes).map_err(as_usage)?;
            BoundEngine::new(n_fact).ramification(omega, &ctx)
        }
        BoundVariant::Pow2 => {
            let Some(a) = n_fact.pow2_exponent() else {
                return usage(format!("pow2 needs n a power of two, got {n}"));
            };
            let strength = match strength {
                None | Some("thm1.3") => Pow2Strength::Full,
                Some("cor5.3") => Pow2Strength::Weak,
                Some(other) => return usage(format!("--strength must be thm1.3 or cor5.3, got {other:?}")),
            };
            pow2_bound(a, omega, strength)
        }
    };
    report.map_err(as_usage)
}

fn print_report(r: &BoundReport) {
    println!("{}", r.bound);
    println!("variant: {}", r.variant);
    if let Some(c) = &r.witness_composition {
        println!("witness composition: {c}");
    }
    if let Some(t) = &r.witness_level {
        println!("witness level: {t}");
    }
}

fn report_manifest(m: &Manifest, out: &std::path::Path) -> u8 {
    for (name, count) in &m.row_counts {
        println!("{name}: {count}");
    }
    let mut status = 0;
    for (name, diff) in &m.fixture_diffs {
        if diff.is_empty() {
            println!("fixture {name}: match");
        } else {
            status = EXIT_MISMATCH;
            println!(
                "fixture {name}: mismatch (added {:?}, missing {:?})",
                diff.added, diff.missing
            );
        }
    }
    println!("outputs written to {}", out.display());
    status
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut cfg = RunConfig::new(&cli.run.output_dir);
    cfg.workers = cli.run.workers as usize;
    cfg.rho_seed = cli.run.rho_seed;
    if let Some(cap) = cli.run.effort_cap {
        cfg.effort_cap = cap;
    }
    cfg.record_timings = cli.run.timings;

    match cli.command {
        Command::Bound {
            n,
            omega,
            variant,
            divides,
            strength,
            prop32_constraint,
        } => {
            let r = compute_bound(
                n,
                omega,
                variant,
                divides.as_deref(),
                strength.as_deref(),
                prop32_constraint,
            )?;
            print_report(&r);
            Ok(0)
        }
        Command::Table1 { n_range: (lo, hi) } => {
            let m = run_table1(&cfg, lo..=hi)?;
            Ok(report_manifest(&m, &cfg.output_dir))
        }
        Command::Line5 {
            stage,
            totient_ratio,
            subtract_one,
        } => {
            cfg.modified_form = ModifiedForm {
                term: if totient_ratio {
                    TotientTerm::TotientRatio
                } else {
                    TotientTerm::Totient
                },
                subtract_one,
            };
            let m = run_line5(&cfg, stage.into())?;
            Ok(report_manifest(&m, &cfg.output_dir))
        }
        Command::Sums {
            grids,
            pairs,
            closed_endpoint,
            coprime,
        } => {
            if closed_endpoint {
                cfg.endpoint = Endpoint::Closed;
            }
            if coprime {
                cfg.witness_filter = WitnessFilter::Coprime;
            }
            let (grids, pairs) = if grids || pairs { (grids, pairs) } else { (true, true) };
            let out = run_sums(&cfg, grids, pairs)?;
            Ok(report_manifest(&out.manifest, &cfg.output_dir))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Run(e @ Error::MissingCheckpoint { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CHECKPOINT)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_MISMATCH)
        }
    }
}
