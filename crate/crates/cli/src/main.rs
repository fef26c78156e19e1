//! Configuration-driven front end for the helichain simulator.
//!
//! Subcommands: `evolve` (time series), `sweep` (τ×E1 surface), `impurity`
//! (strength scans), `compare` (XX/XXZ vs kicked multiferroic), and
//! `oracle-check` (full-space validation suite). Exit codes: 0 success,
//! 2 configuration error, 3 numerical-integrity error, 4 oracle-check
//! failure.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use helichain::checks::standard_suite;
use helichain::{
    build_chirality_sector, build_h0_sector, build_xxz_sector, env_phase_factor, fmax_unkicked,
    impurity_sweep, initial_state, kick_operator, singlet_fraction, singlet_fraction_env,
    sweep_surface, ChainSpec, Error as CoreError, KickSchedule, KickedWalker, Model, SectorBasis,
    SectorState, SpectralDecomposition, SweepGrid, XxzSpec,
};

use config::{ConfigError, RunConfig};
use output::{argmax_json, fmt_float, surface_summary_json, write_json, CsvWriter};

#[derive(Parser)]
#[command(
    name = "helichain",
    about = "Entanglement sharing over helical multiferroic spin chains",
    version
)]
struct Cli {
    /// TOML run configuration (defaults apply when omitted)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides [output].dir)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker-thread hint for grid sweeps
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Accepted but unused: the simulator has no stochastic elements
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one configuration and emit the f(t) time series as CSV
    Evolve,
    /// Sweep the (tau, E1) grid: CSV surface plus JSON summary
    Sweep,
    /// Scan impurity strengths, kicked and unkicked
    Impurity,
    /// Compare XX and XXZ chains against the kicked multiferroic chain
    Compare,
    /// Run the full-space oracle validation suite
    OracleCheck,
}

enum Failure {
    Config(String),
    Integrity(String),
    OracleFailed(usize),
    Other(anyhow::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Integrity(_) => 3,
            Failure::OracleFailed(_) => 4,
            Failure::Other(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(m) => format!("config error: {m}"),
            Failure::Integrity(m) => format!("integrity error: {m}"),
            Failure::OracleFailed(n) => format!("oracle check failed: {n} check(s) out of tolerance"),
            Failure::Other(e) => format!("error: {e:#}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Integrity(m) => Failure::Integrity(m),
            CoreError::Domain(m) | CoreError::Resource(m) => Failure::Config(m),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.seed.is_some() {
        eprintln!("warning: --seed has no effect; the simulator has no stochastic elements");
    }
    if let Some(threads) = cli.threads {
        // hint only: ignore failure if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    cfg.validate()?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    match cli.command {
        Command::Evolve => run_evolve(&cfg, &out_dir),
        Command::Sweep => run_sweep(&cfg, &out_dir),
        Command::Impurity => run_impurity(&cfg, &out_dir),
        Command::Compare => run_compare(&cfg, &out_dir),
        Command::OracleCheck => run_oracle_check(&cfg, &out_dir),
    }
}

const EVOLVE_HEADER: [&str; 7] = [
    "time",
    "f",
    "fidelity",
    "transfer_prob",
    "type4_weight",
    "re_r",
    "im_r",
];

fn evolve_row(
    csv: &mut CsvWriter,
    state: &SectorState,
    vacuum_energy: f64,
    t: f64,
    basis: &SectorBasis,
    env: Option<&helichain::EnvironmentSpec>,
) -> Result<(), Failure> {
    let (result, r) = match env {
        Some(e) => (
            singlet_fraction_env(state, vacuum_energy, t, basis, e)?,
            env_phase_factor(e, t),
        ),
        None => (
            singlet_fraction(state, vacuum_energy, t, basis)?,
            num_complex::Complex64::new(1.0, 0.0),
        ),
    };
    csv.row(&[
        fmt_float(t),
        fmt_float(result.f),
        fmt_float(result.fidelity),
        fmt_float(result.transfer_prob),
        fmt_float(result.type4_weight),
        fmt_float(r.re),
        fmt_float(r.im),
    ]);
    Ok(())
}

fn run_evolve(cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    let basis = SectorBasis::new(cfg.protocol.n)?;
    let (h, chirality) = match cfg.model()? {
        Model::Multiferroic(spec) => (
            build_h0_sector(&spec, &basis)?,
            Some(build_chirality_sector(&spec, &basis)?),
        ),
        Model::Xxz(spec) => (build_xxz_sector(&spec, &basis)?, None),
    };
    let decomp = SpectralDecomposition::new(&h)?;
    let env = cfg.environment()?;
    let s0 = initial_state(&basis);
    let mut csv = CsvWriter::new(&EVOLVE_HEADER);
    evolve_row(&mut csv, &s0, decomp.vacuum_energy(), 0.0, &basis, env.as_ref())?;

    let kick = cfg.kick.as_ref().and_then(|k| k.tau.zip(k.e1));
    match kick {
        Some((tau, e1)) => {
            let chirality = chirality.ok_or_else(|| {
                Failure::Config("kicked evolution needs the multiferroic model".into())
            })?;
            let bounded = KickSchedule::bounded(tau, e1, cfg.protocol.t_max)?;
            let schedule = match cfg.kick.as_ref().and_then(|k| k.n_max) {
                Some(n) if n > bounded.n_max => {
                    return Err(Failure::Config(format!(
                        "[kick].n_max = {n} exceeds the horizon: at tau = {tau} only {} kicks fit in t_max = {}",
                        bounded.n_max, cfg.protocol.t_max
                    )));
                }
                Some(n) => KickSchedule::new(tau, e1, n)?,
                None => bounded,
            };
            let u0 = decomp.propagator(schedule.tau);
            let u1 = kick_operator(&chirality, schedule.e1)?;
            let mut walker = KickedWalker::new(&u0, &u1, &s0)?;
            for _ in 0..schedule.n_max {
                let r = walker.step();
                let t = schedule.tau * r as f64;
                evolve_row(
                    &mut csv,
                    &walker.state(),
                    decomp.vacuum_energy(),
                    t,
                    &basis,
                    env.as_ref(),
                )?;
            }
        }
        None => {
            let samples = (cfg.protocol.t_max / cfg.protocol.dt + 1e-9).floor() as usize;
            for k in 1..=samples {
                let t = cfg.protocol.dt * k as f64;
                let state = decomp.evolve(&s0, t);
                evolve_row(&mut csv, &state, decomp.vacuum_energy(), t, &basis, env.as_ref())?;
            }
        }
    }
    let path = out_dir.join(cfg.output.evolve_csv.as_deref().unwrap_or("evolve.csv"));
    csv.write_to(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_sweep(cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    let grid = cfg.sweep_grid()?;
    if matches!(grid.model, Model::Xxz(_)) {
        return Err(Failure::Config(
            "sweep needs [model].kind = \"multiferroic\"; use `compare` for XXZ".into(),
        ));
    }
    let surface = sweep_surface(&grid)?;
    let mut csv = CsvWriter::new(&["tau", "e1", "f_max", "argmax_r"]);
    for p in &surface.points {
        csv.row(&[
            fmt_float(p.tau),
            fmt_float(p.e1),
            fmt_float(p.f_max),
            p.argmax_kicks.to_string(),
        ]);
    }
    let surface_path = out_dir.join(
        cfg.output
            .surface_csv
            .as_deref()
            .unwrap_or("sweep_surface.csv"),
    );
    csv.write_to(&surface_path)?;
    let summary_path = out_dir.join(
        cfg.output
            .summary_json
            .as_deref()
            .unwrap_or("sweep_summary.json"),
    );
    write_json(&summary_path, &surface_summary_json(&surface, &grid.e1_values))?;
    println!("wrote {}", surface_path.display());
    println!("wrote {}", summary_path.display());
    println!(
        "f_maxxx = {} at tau = {}, e1 = {}, kicks = {}",
        fmt_float(surface.summary.f_maxxx),
        surface.summary.argmax.tau.map_or_else(|| "-".into(), fmt_float),
        surface.summary.argmax.e1.map_or_else(|| "-".into(), fmt_float),
        surface
            .summary
            .argmax
            .kicks
            .map_or_else(|| "-".into(), |k| k.to_string()),
    );
    Ok(())
}

fn run_impurity(cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    let imp = cfg
        .impurity
        .as_ref()
        .ok_or_else(|| Failure::Config("impurity sweeps need an [impurity] block".into()))?;
    if cfg.model.kind != "multiferroic" {
        return Err(Failure::Config(
            "impurity sweeps need [model].kind = \"multiferroic\"".into(),
        ));
    }
    let kappas: Vec<f64> = match (&imp.kappa_values, imp.kappa) {
        (Some(vs), _) => vs.clone(),
        (None, Some(k)) => vec![k],
        (None, None) => {
            return Err(Failure::Config(
                "[impurity] needs kappa or kappa_values".into(),
            ))
        }
    };
    // the base chain is clean; strengths are applied per sweep point
    let base = ChainSpec::new(cfg.protocol.n).with_couplings(
        cfg.model.j1.unwrap_or(1.0),
        cfg.model.j2.unwrap_or(-1.0),
        cfg.model.e0.unwrap_or(0.01),
    );
    let tau_values = cfg
        .kick
        .as_ref()
        .and_then(|k| k.tau_values.clone())
        .unwrap_or_else(helichain::default_tau_grid);
    let e1_values = cfg
        .kick
        .as_ref()
        .and_then(|k| k.e1_values.clone())
        .unwrap_or_else(helichain::default_e1_grid);
    let grid = SweepGrid {
        model: Model::Multiferroic(base),
        env: cfg.environment()?,
        t_max: cfg.protocol.t_max,
        dt_unkicked: cfg.protocol.dt,
        tau_values,
        e1_values,
    };
    grid.validate()?;
    let points = impurity_sweep(&grid, cfg.impurity_kind()?, &kappas, &imp.sites)?;
    let mut csv = CsvWriter::new(&["kind", "kappa", "f_max_unkicked", "f_maxxx_kicked"]);
    for p in &points {
        csv.row(&[
            imp.kind.clone(),
            fmt_float(p.kappa),
            fmt_float(p.unkicked.f_max),
            fmt_float(p.kicked.f_maxxx),
        ]);
    }
    let path = out_dir.join(cfg.output.impurity_csv.as_deref().unwrap_or("impurity.csv"));
    csv.write_to(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_compare(cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    let compare = cfg.compare.clone().unwrap_or_default();
    let jx = compare.jx.unwrap_or(1.0);
    let jz_values = compare
        .jz_values
        .unwrap_or_else(|| (1..=10).map(|k| k as f64 * 0.2).collect());
    let xxz_grid = |jz: f64| SweepGrid {
        model: Model::Xxz(XxzSpec {
            n_sites: cfg.protocol.n,
            jx,
            jz,
        }),
        env: None,
        t_max: cfg.protocol.t_max,
        dt_unkicked: cfg.protocol.dt,
        tau_values: vec![1.0],
        e1_values: vec![1.0],
    };
    let mut csv = CsvWriter::new(&["kind", "jz_over_jx", "f_max", "fidelity", "argmax_time"]);

    let xx = fmax_unkicked(&xxz_grid(0.0))?;
    csv.row(&[
        "xx".into(),
        fmt_float(0.0),
        fmt_float(xx.f_max),
        fmt_float((2.0 * xx.f_max + 1.0) / 3.0),
        fmt_float(xx.argmax.time),
    ]);

    let mut xxz_json = Vec::new();
    let mut xxz_best = f64::NEG_INFINITY;
    for &jz in &jz_values {
        let r = fmax_unkicked(&xxz_grid(jz * jx))?;
        xxz_best = xxz_best.max(r.f_max);
        csv.row(&[
            "xxz".into(),
            fmt_float(jz),
            fmt_float(r.f_max),
            fmt_float((2.0 * r.f_max + 1.0) / 3.0),
            fmt_float(r.argmax.time),
        ]);
        xxz_json.push(json!({ "jz_over_jx": jz, "f_max": r.f_max }));
    }

    // the multiferroic chain under the same protocol, with kicks optimized
    let mf_grid = cfg.sweep_grid().map_err(|e| {
        Failure::Config(format!("{e} (compare needs the multiferroic model block)"))
    })?;
    if matches!(mf_grid.model, Model::Xxz(_)) {
        return Err(Failure::Config(
            "compare needs [model].kind = \"multiferroic\" for the kicked reference".into(),
        ));
    }
    let mf = sweep_surface(&mf_grid)?;
    csv.row(&[
        "multiferroic_kicked".into(),
        String::new(),
        fmt_float(mf.summary.f_maxxx),
        fmt_float((2.0 * mf.summary.f_maxxx + 1.0) / 3.0),
        fmt_float(mf.summary.argmax.time),
    ]);

    let csv_path = out_dir.join(cfg.output.compare_csv.as_deref().unwrap_or("compare.csv"));
    csv.write_to(&csv_path)?;
    let json_path = out_dir.join(cfg.output.compare_json.as_deref().unwrap_or("compare.json"));
    write_json(
        &json_path,
        &json!({
            "xx_f_max": xx.f_max,
            "xxz": xxz_json,
            "multiferroic": {
                "f_maxxx": mf.summary.f_maxxx,
                "unkicked_f_max": mf.unkicked.f_max,
                "argmax": argmax_json(&mf.summary),
            },
            "multiferroic_exceeds_both": mf.summary.f_maxxx > xx.f_max
                && mf.summary.f_maxxx > xxz_best,
        }),
    )?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    Ok(())
}

fn run_oracle_check(cfg: &RunConfig, out_dir: &Path) -> Result<(), Failure> {
    let checks = standard_suite()?;
    let mut lines = Vec::with_capacity(checks.len() + 1);
    let mut failures = 0usize;
    for check in &checks {
        let status = if check.passed() {
            "PASS"
        } else {
            failures += 1;
            "FAIL"
        };
        lines.push(format!(
            "{status}  residual {:>12.5e}  tol {:>8.1e}  {}",
            check.residual, check.tolerance, check.name
        ));
    }
    lines.push(format!(
        "summary: {}/{} checks passed",
        checks.len() - failures,
        checks.len()
    ));
    let report = lines.join("\n") + "\n";
    print!("{report}");
    let path = out_dir.join(cfg.output.report_txt.as_deref().unwrap_or("oracle_report.txt"));
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Failure::Other(anyhow::anyhow!("creating {}: {e}", out_dir.display())))?;
    std::fs::write(&path, &report)
        .map_err(|e| Failure::Other(anyhow::anyhow!("writing {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    if failures > 0 {
        return Err(Failure::OracleFailed(failures));
    }
    Ok(())
}
