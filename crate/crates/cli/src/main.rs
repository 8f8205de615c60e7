mod output;

use bead_lab::asymptotics::{asymptotic_constant, convergence_probe};
use bead_lab::budget::Budget;
use bead_lab::dynamics::{simulate_replicas, summarize, Chain};
use bead_lab::kernels::{verify_inversion, Flavor, RingKernelParams, TorusKernelParams};
use bead_lab::mc::volume_mc;
use bead_lab::progress::Ticker;
use bead_lab::torus::BeadConfiguration;
use bead_lab::verify::{self, Suite};
use bead_lab::volumes::{partition_product, partition_theta, volume_exact, volume_exact_centered};
use bead_lab::{BeadError, LogComplex, RingSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use output::{complex_json, Emitter, Format};
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "bead-lab", version, about = "Exact and simulated quantities for the bead model on the semi-discrete torus")]
struct Cli {
    /// Output format; defaults to CSV for `asymptotics` and JSON elsewhere.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Omit wall-clock fields so repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Worker threads for parallel reductions (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Volume of interlaced configurations with n strings, k beads each, occupation number ell.
    Volume(VolumeArgs),
    /// Partition function, in full or for one theta term.
    Partition(PartitionArgs),
    /// Torus or ring correlation kernel, or the inversion residual.
    Kernel(KernelArgs),
    /// Simulate the non-colliding walk or TASEP on the ring.
    Simulate(SimulateArgs),
    /// Run invariant suites, or check a configuration file.
    Verify(VerifyArgs),
    /// Compare exact volumes with the free energy and fine constant.
    Asymptotics(AsymptoticsArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum VolumeMethod {
    Exact,
    Centered,
    Mc,
}

#[derive(Args, Debug)]
struct VolumeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    ell: usize,
    #[arg(long, value_enum, default_value = "exact")]
    method: VolumeMethod,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    #[arg(long)]
    n: usize,
    /// Fugacity exponent, `x` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    /// Bead intensity, `x` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    /// A single theta term, `t1,t2` with entries in {0,1}.
    #[arg(long)]
    theta: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Torus,
    Ring,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long, value_enum, default_value = "torus")]
    family: Family,
    #[arg(long, default_value = "o")]
    alpha: String,
    /// Time displacement.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    t: f64,
    /// String displacement.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    h: i64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Occupation number (ring family).
    #[arg(long)]
    ell: Option<usize>,
    /// `beta`, `x` or `re,im` (torus family).
    #[arg(long, allow_hyphen_values = true, default_value = "0.9")]
    beta: String,
    #[arg(long, default_value_t = 0)]
    theta2: u8,
    /// Bead intensity `T`, `x` or `re,im` (torus family).
    #[arg(long, allow_hyphen_values = true, default_value = "0.3")]
    intensity: String,
    /// Report the inversion residual instead of a kernel value.
    #[arg(long)]
    verify_inversion: bool,
    #[arg(long, default_value_t = 64)]
    grid: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_chain)]
    chain: Chain,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    ell: usize,
    #[arg(long)]
    horizon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replicas: u64,
    /// Print only the summary line.
    #[arg(long)]
    summary_only: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    suite: Suite,
    /// Validate a configuration JSON file instead of running suites.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct AsymptoticsArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    tau: f64,
    #[arg(long, value_delimiter = ',', default_value = "8,12,16,20")]
    n_list: Vec<usize>,
}

fn parse_chain(s: &str) -> Result<Chain, String> {
    s.parse().map_err(|e: BeadError| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: BeadError| e.to_string())
}

fn parse_complex(s: &str) -> Result<Complex64, BeadError> {
    let bad = || BeadError::structural(format!("cannot parse complex value {s:?}; use x or re,im"));
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok(Complex64::new(s.trim().parse().map_err(|_| bad())?, 0.0)),
    }
}

fn parse_theta(s: &str) -> Result<(u8, u8), BeadError> {
    let bad = || BeadError::structural(format!("theta {s:?} must be t1,t2 with entries 0 or 1"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: u8 = a.trim().parse().map_err(|_| bad())?;
    let b: u8 = b.trim().parse().map_err(|_| bad())?;
    if a > 1 || b > 1 {
        return Err(bad());
    }
    Ok((a, b))
}

/// Outcome of a subcommand before printing.
enum Outcome {
    Ok,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let budget = match Budget::from_env() {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let _ticker = Ticker::start("bead-lab".into());
    match run(&cli, &budget) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                BeadError::Budget { .. } => 3,
                BeadError::Structural(_) => 1,
                _ => 2,
            })
        }
    }
}

fn log_json(l: LogComplex) -> Value {
    json!({ "log_mod": l.log_mod, "phase": l.phase })
}

fn run(cli: &Cli, budget: &Budget) -> Result<Outcome, BeadError> {
    let default_format = match cli.command {
        Command::Asymptotics(_) => Format::Csv,
        _ => Format::Json,
    };
    let out = Emitter::new(cli.format.unwrap_or(default_format), !cli.no_timestamp);
    match &cli.command {
        Command::Volume(a) => {
            let params = json!({ "n": a.n, "k": a.k, "ell": a.ell, "method": format!("{:?}", a.method).to_lowercase() });
            let (record, seed) = match a.method {
                VolumeMethod::Exact | VolumeMethod::Centered => {
                    let v = if a.method == VolumeMethod::Exact {
                        volume_exact(a.n, a.k, a.ell, budget)?
                    } else {
                        volume_exact_centered(a.n, a.k, a.ell, budget)?
                    };
                    (
                        json!({
                            "value": v.value,
                            "log_value": log_json(v.log_value),
                            "method": "exact",
                            "imag_residual": v.imag_residual,
                            "side": v.side,
                            "terms": v.terms,
                        }),
                        None,
                    )
                }
                VolumeMethod::Mc => {
                    let e = volume_mc(a.n, a.k, a.ell, a.samples, a.seed)?;
                    (
                        json!({
                            "value": e.mean,
                            "log_value": log_json(LogComplex::from_real(e.mean)),
                            "method": "mc",
                            "imag_residual": 0.0,
                            "std_error": e.std_error,
                            "samples": e.samples,
                            "acceptance_rate": e.acceptance_rate,
                        }),
                        Some(a.seed),
                    )
                }
            };
            out.record("volume", params, record, seed);
        }
        Command::Partition(a) => {
            let lambda = parse_complex(&a.lambda)?;
            let t = parse_complex(&a.t)?;
            if a.n < 2 || a.n > bead_lab::ringset::MAX_N {
                return Err(BeadError::domain(format!("n={} outside 2..=63", a.n)));
            }
            let theta = a.theta.as_deref().map(parse_theta).transpose()?;
            let value = match theta {
                Some((t1, t2)) => partition_theta(a.n, lambda, t, t1, t2),
                None => partition_product(a.n, lambda, t),
            };
            let params = json!({
                "n": a.n,
                "lambda": complex_json(lambda),
                "t": complex_json(t),
                "theta": theta.map(|(x, y)| vec![x, y]),
            });
            let record = json!({
                "value": complex_json(value),
                "log_value": log_json(LogComplex::from_complex(value)),
                "method": "exact",
            });
            out.record("partition", params, record, None);
        }
        Command::Kernel(a) => {
            let flavor: Flavor = a.alpha.parse()?;
            if a.verify_inversion || a.family == Family::Torus {
                let beta = parse_complex(&a.beta)?;
                let intensity = parse_complex(&a.intensity)?;
                let p = TorusKernelParams::new(a.n, beta, a.theta2, intensity)?;
                let base = json!({
                    "family": "torus",
                    "n": a.n,
                    "beta": complex_json(beta),
                    "theta2": a.theta2,
                    "intensity": complex_json(intensity),
                });
                if a.verify_inversion {
                    let residual = verify_inversion(&p, a.grid)?;
                    let mut params = base;
                    params["grid"] = json!(a.grid);
                    out.record("kernel", params, json!({ "residual": residual, "method": "kernel" }), None);
                } else {
                    let v = p.kernel_torus(flavor, a.t, a.h)?;
                    let mut params = base;
                    params["alpha"] = json!(flavor.to_string());
                    params["t"] = json!(a.t);
                    params["h"] = json!(a.h);
                    out.record("kernel", params, json!({ "value": complex_json(v), "method": "kernel" }), None);
                }
            } else {
                let ell = a.ell.ok_or_else(|| BeadError::structural("the ring family needs --ell"))?;
                let p = RingKernelParams::new(a.n, ell)?;
                let v = p.kernel_ring(flavor, a.t, a.h);
                let params = json!({
                    "family": "ring",
                    "n": a.n,
                    "ell": ell,
                    "theta2": p.theta2,
                    "alpha": flavor.to_string(),
                    "t": a.t,
                    "h": a.h,
                });
                out.record("kernel", params, json!({ "value": complex_json(v), "method": "kernel" }), None);
            }
        }
        Command::Simulate(a) => {
            if a.replicas == 0 {
                return Err(BeadError::domain("need at least one replica"));
            }
            let start = bead_lab::dynamics::packed_state(a.n, a.ell)?;
            let trajs = simulate_replicas(a.chain, start, a.horizon, a.seed, a.replicas)?;
            let summary = summarize(&trajs, budget)?;
            let params = json!({
                "chain": a.chain,
                "n": a.n,
                "ell": a.ell,
                "horizon": a.horizon,
                "replicas": a.replicas,
                "start": start.to_vec(),
            });
            if !a.summary_only {
                let mut rows = Vec::new();
                for (r, traj) in trajs.iter().enumerate() {
                    let mut state: RingSet = traj.initial;
                    for ev in &traj.events {
                        state = state.jump(ev.from).expect("legal event");
                        rows.push(json!({
                            "replica": r,
                            "time": ev.time,
                            "from": ev.from,
                            "to": (ev.from + 1) % a.n,
                            "state": state.to_vec(),
                            "method": "simulated",
                        }));
                    }
                }
                out.event_rows(&rows);
            }
            let mut record = serde_json::to_value(&summary).expect("serializable");
            record["method"] = json!("simulated");
            record["summary"] = json!(true);
            out.record("simulate", params, record, Some(a.seed));
        }
        Command::Verify(a) => {
            if let Some(path) = &a.config {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| BeadError::structural(format!("cannot read {}: {e}", path.display())))?;
                let cfg = BeadConfiguration::from_json(&text)?;
                let valid = cfg.is_valid();
                let mut record = json!({ "valid": valid, "method": "exact", "n": cfg.n(), "k": cfg.k() });
                if valid && cfg.k() > 0 {
                    let tilt = cfg.tilt()?;
                    let path_ell = cfg.occupation_path()?.occupation_number();
                    record["occupation_number"] = json!(cfg.occupation_number()?);
                    record["path_occupation_number"] = json!(path_ell);
                    record["tilt"] = json!(tilt.tau);
                    record["sum_p"] = json!(tilt.sum_p);
                    record["sum_q"] = json!(tilt.sum_q);
                }
                out.record("verify", json!({ "config": path.display().to_string() }), record, None);
                return Ok(if valid { Outcome::Ok } else { Outcome::VerificationFailed });
            }
            let reports = verify::run(a.suite, budget, a.seed)?;
            let passed = reports.iter().all(|r| r.passed());
            for r in &reports {
                for c in &r.checks {
                    eprintln!("[{}] {} {}", r.suite, if c.passed { "PASS" } else { "FAIL" }, c.name);
                }
            }
            let rows: Vec<Value> = reports
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(move |c| {
                        json!({
                            "suite": r.suite,
                            "check": c.name,
                            "passed": c.passed,
                            "value": c.value,
                            "tolerance": c.tolerance,
                            "method": "exact",
                        })
                    })
                })
                .collect();
            out.table("verify", json!({ "suite": a.suite.name() }), json!({ "passed": passed }), &rows, Some(a.seed));
            if !passed {
                return Ok(Outcome::VerificationFailed);
            }
        }
        Command::Asymptotics(a) => {
            let constant = asymptotic_constant(a.p, a.tau)?;
            let probe = convergence_probe(a.p, a.tau, &a.n_list, budget)?;
            let rows: Vec<Value> = probe
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "lhs_log": r.lhs_log,
                        "target_log": r.target_log,
                        "abs_error": r.abs_error,
                        "rel_error": r.rel_error,
                        "k": r.k,
                        "ell": r.ell,
                        "free_energy_lhs": r.free_energy_lhs,
                        "free_energy_target": r.free_energy_target,
                        "free_energy_error": r.free_energy_error,
                        "method": "exact",
                    })
                })
                .collect();
            let params = json!({ "p": a.p, "tau": a.tau, "n_list": a.n_list });
            out.table("asymptotics", params, json!({ "constant": constant }), &rows, None);
        }
    }
    Ok(Outcome::Ok)
}
