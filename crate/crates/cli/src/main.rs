//! `hopflab`: the scaling experiment, the verification suite, and single
//! energy or Hopf-invariant evaluations of stored map descriptors.
//!
//! Exit status: 0 when the run completed and every check passed, 1 when a
//! check failed or a run stopped early, 2 for usage and input errors.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hopflab_core::energy::{energy_mc, energy_quadrature, EnergyParams, Region};
use hopflab_core::experiments::{
    emit_report, run_scaling_with, run_verify, CheckId, DegreeSpec, Format, ScalingRow,
};
use hopflab_core::maps::{composed_with_hopf, hopf_map, multi_bubble, prescribed_hopf_map, SphereMap, DEFAULT_BASEPOINT};
use hopflab_core::geometry::SpherePoint;
use hopflab_core::topology::{bookkept_degree, hopf_invariant_with, HopfOptions};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hopflab", version, about = "Sphere maps of prescribed Hopf degree and their fractional energies")]
struct Cli {
    /// TOML file with [scaling] and [verify] tables; falls back to $HOPFLAB_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite and print one line per check.
    Verify(VerifyArgs),
    /// Estimate E_{s,p} of a stored map on its whole domain sphere.
    Energy(EnergyArgs),
    /// Hopf invariant of a stored map S³ → S² by fiber linking.
    Hopf(HopfArgs),
    /// Energies of the prescribed-degree maps and the log-log slope.
    Scaling(ScalingArgs),
    /// Write the descriptor of a constructed map.
    Build(BuildArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated check names or numbers 1-9; all when omitted.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long)]
    descriptor: PathBuf,
    #[arg(long)]
    s: Option<f64>,
    /// Defaults to n/s.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also run the deterministic quadrature at this resolution.
    #[arg(long)]
    quadrature: Option<usize>,
}

#[derive(Args)]
struct HopfArgs {
    #[arg(long)]
    descriptor: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// `1,4,9` or `kmax:5`.
    #[arg(long)]
    degrees: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct BuildTarget {
    /// prescribed_hopf_map(d)
    #[arg(long, allow_hyphen_values = true)]
    degree: Option<i64>,
    /// The Hopf map itself.
    #[arg(long)]
    hopf: bool,
    /// multi_bubble(k) ∘ h
    #[arg(long)]
    bubbles_over_hopf: Option<usize>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    target: BuildTarget,
    /// Written to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// Bad input; exit 2.
    Usage(String),
    /// A check failed or a run did not complete; exit 1.
    Run(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn run_err(e: impl ToString) -> Failure {
    Failure::Run(e.to_string())
}

fn read_map(path: &Path) -> Result<SphereMap, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    SphereMap::from_json(&text).map_err(|e| usage(format!("bad descriptor {}: {e}", path.display())))
}

fn verify(cli_config: Option<&Path>, args: VerifyArgs) -> Outcome {
    let mut cfg = config::load(cli_config).map_err(usage)?.verify;
    if let Some(list) = args.checks {
        cfg.checks = list.iter().map(|s| s.parse::<CheckId>()).collect::<Result<_, _>>().map_err(usage)?;
    }
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let report = run_verify(&cfg);
    print!("{}", report.to_table());
    if let Some(path) = args.json {
        std::fs::write(&path, report.to_json().map_err(run_err)?).map_err(run_err)?;
    }
    let failed: Vec<String> = report.failures().map(|o| o.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Run(format!("failed checks: {}", failed.join(", "))))
    }
}

fn energy(cli_config: Option<&Path>, args: EnergyArgs) -> Outcome {
    let defaults = config::load(cli_config).map_err(usage)?.scaling;
    let u = read_map(&args.descriptor)?;
    let n = u.domain_dim();
    let s = args.s.unwrap_or(defaults.s);
    let params = match args.p {
        Some(p) => EnergyParams::new(s, p, n),
        None => EnergyParams::critical(s, n),
    }
    .map_err(usage)?;
    let samples = args.samples.unwrap_or(defaults.samples_per_estimate);
    let seed = args.seed.unwrap_or(defaults.seed);
    let estimate = energy_mc(&u, &params, &Region::Whole, samples, seed).map_err(usage)?;
    let quadrature = match args.quadrature {
        Some(r) => Some(energy_quadrature(&u, &params, r).map_err(usage)?),
        None => None,
    };
    let out = json!({
        "map": u.descriptor().variant_name(),
        "value": estimate.value,
        "std_error": estimate.std_error,
        "n_samples": estimate.n_samples,
        "s": params.s,
        "p": params.p,
        "seed": seed,
        "remainder_bound": estimate.remainder_bound,
        "quadrature": quadrature,
    });
    println!("{}", serde_json::to_string_pretty(&out).map_err(run_err)?);
    Ok(())
}

fn hopf(args: HopfArgs) -> Outcome {
    let u = read_map(&args.descriptor)?;
    if (u.domain_dim(), u.codomain_dim()) != (3, 2) {
        return Err(usage(format!("expected a map S³ → S², got S^{} → S^{}", u.domain_dim(), u.codomain_dim())));
    }
    let mut opts = HopfOptions::default();
    if let Some(seed) = args.seed {
        opts.seed = seed;
    }
    if let Some(step) = args.step {
        opts.step = step;
    }
    let linked = hopf_invariant_with(&u, &opts).map_err(run_err)?;
    let booked = bookkept_degree(u.descriptor()).ok();
    let out = json!({ "linking": linked, "bookkeeping": booked });
    println!("{}", serde_json::to_string_pretty(&out).map_err(run_err)?);
    match booked {
        Some(b) if b.value != linked.value => {
            Err(Failure::Run(format!("linking gives {} but the construction carries {}", linked.value, b.value)))
        }
        _ => Ok(()),
    }
}

fn scaling(cli_config: Option<&Path>, args: ScalingArgs) -> Outcome {
    let mut cfg = config::load(cli_config).map_err(usage)?.scaling;
    if let Some(s) = args.s {
        cfg.s = s;
    }
    if args.p.is_some() {
        cfg.p = args.p;
    }
    if let Some(d) = args.degrees {
        cfg.degrees = d.parse::<DegreeSpec>().map_err(usage)?;
    }
    if let Some(n) = args.samples {
        cfg.samples_per_estimate = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.output_path = Some(out);
    }
    if let Some(f) = args.format {
        cfg.format = f.parse::<Format>().map_err(usage)?;
    }
    let out = cfg.output_path.clone().ok_or_else(|| usage("no output path: pass --out or set it in the config"))?;
    cfg.validate().map_err(usage)?;
    let result = run_scaling_with(&cfg, |r: &ScalingRow| {
        eprintln!("d = {:>4}  E = {:.6e} ± {:.2e}", r.d, r.energy.value, r.energy.std_error);
    })
    .map_err(usage)?;
    let files = emit_report(&result, cfg.format, &out).map_err(run_err)?;
    match result.fit {
        Some(f) => println!("slope {:.4} ± {:.4} over {} degrees ≥ 2", f.slope, f.slope_stderr, f.points),
        None => println!("slope undefined: fewer than two degrees ≥ 2"),
    }
    println!("wrote {} and {}", files.main.display(), files.companion.display());
    match result.failure {
        Some(msg) => Err(Failure::Run(format!("partial result: {msg}"))),
        None => Ok(()),
    }
}

fn build(args: BuildArgs) -> Outcome {
    let t = args.target;
    let map = if let Some(d) = t.degree {
        prescribed_hopf_map(d)
    } else if let Some(k) = t.bubbles_over_hopf {
        let b = SpherePoint::new(&DEFAULT_BASEPOINT).expect("unit vector");
        multi_bubble(k, &b).and_then(|v| composed_with_hopf(&v))
    } else {
        Ok(hopf_map())
    }
    .map_err(usage)?;
    let text = map.to_json().map_err(run_err)?;
    match args.out {
        Some(path) => std::fs::write(&path, text).map_err(run_err)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = cli.config.as_deref();
    let outcome = match cli.command {
        Command::Verify(a) => verify(cfg, a),
        Command::Energy(a) => energy(cfg, a),
        Command::Hopf(a) => hopf(a),
        Command::Scaling(a) => scaling(cfg, a),
        Command::Build(a) => build(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(msg)) => {
            eprintln!("hopflab: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("hopflab: {msg}");
            ExitCode::from(2)
        }
    }
}
