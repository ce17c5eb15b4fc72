use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use knf::cnoidal::{build_cnoidal, CnoidalWave};
use knf::harness::{
    describe, evaluate, run_suite, run_superposition, CellOutcome, ExperimentSpec, SuiteConfig,
    Thresholds,
};
use knf::kdv::evolve_kdv;
use knf::normal_form::{bound_report, fredholm_report, verify_dbp_identity, Convention, NFContext};
use knf::{FourierField, Result, SolverConfig};

#[derive(Parser)]
#[command(
    name = "knf",
    version,
    about = "Cnoidal waves, KdV evolution and normal-form checks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build and certify a 2π-periodic cnoidal wave.
    Cnoidal {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evolve `wave + init` under KdV and store the trajectory.
    Evolve(EvolveArgs),
    /// Normal-form checks.
    Nf {
        #[command(subcommand)]
        cmd: NfCmd,
    },
    /// Run an experiment matrix.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run a single experiment.
    Run {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    wave: PathBuf,
    /// perturbation field (JSON); zero when omitted
    #[arg(long)]
    init: Option<PathBuf>,
    #[arg(long = "N")]
    n: usize,
    #[arg(long)]
    dt: f64,
    #[arg(long = "T")]
    t_end: f64,
    #[arg(long, default_value_t = 100)]
    monitor_every: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Conv {
    Derived,
    Printed,
}

impl Conv {
    fn get(self) -> Convention {
        match self {
            Conv::Derived => Convention::derived(),
            Conv::Printed => Convention::printed(),
        }
    }
}

#[derive(Subcommand)]
enum NfCmd {
    /// Finite-difference check of ∂t[v+K+B] = L0 + R along a stored trajectory.
    Verify {
        /// directory written by `evolve`
        #[arg(long)]
        traj: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        dt_probe: f64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Conv::Derived)]
        convention: Conv,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measured bound ratios against the assembled explicit constants.
    Bounds {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long = "N", default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 8.0)]
        a: f64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Singular values of I + K̃ in the weighted basis.
    Fredholm {
        #[arg(long)]
        s: f64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 8.0)]
        a: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn write_out(dir: Option<&Path>, name: &str, body: &str) -> Result<()> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Cnoidal { a, c, tol, out } => {
            let wave = build_cnoidal(a, c, tol)?;
            if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(&out, wave.to_json()?)?;
            println!(
                "a = {a}, c = {c}: mean = {:.12}, residual = {:.3e}, period error = {:.3e}",
                wave.mean,
                wave.residual,
                (wave.period - std::f64::consts::TAU).abs()
            );
            Ok(wave.residual < 1e-8)
        }
        Cmd::Evolve(e) => {
            let wave: CnoidalWave = read_json(&e.wave)?;
            let mut q0 = wave.profile(e.n);
            if let Some(p) = &e.init {
                let g: FourierField = read_json(p)?;
                q0 = &q0 + &g.resized(e.n);
            }
            let cfg = SolverConfig::new(e.n, e.dt, e.t_end).with_monitor(e.monitor_every);
            let traj = evolve_kdv(&q0, &cfg)?;
            for w in &traj.warnings {
                eprintln!("warning: {w}");
            }
            traj.save(&e.out)?;
            fs::write(e.out.join("wave.json"), wave.to_json()?)?;
            println!(
                "{} samples to T = {}, max energy drift {:.3e}",
                traj.len(),
                e.t_end,
                traj.max_energy_drift()
            );
            Ok(true)
        }
        Cmd::Nf { cmd } => run_nf(cmd),
        Cmd::Suite { config, out, jobs } => {
            let cfg = SuiteConfig::load(&config)?;
            let summary = run_suite(&cfg, out.as_deref(), jobs)?;
            for r in summary.records() {
                println!("{}", describe(r));
            }
            for c in &summary.cells {
                if let Some(err) = &c.error {
                    println!("{}: error: {err}", c.name);
                }
            }
            for c in &summary.checks {
                println!(
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            Ok(summary.pass)
        }
        Cmd::Run { spec } => {
            let spec = ExperimentSpec::from_toml(&fs::read_to_string(&spec)?)?;
            let rec = run_superposition(&spec)?;
            println!("{}", describe(&rec));
            println!("{}", serde_json::to_string_pretty(&rec.fits)?);
            let cell = CellOutcome {
                name: knf::harness::cell_name(&spec),
                spec,
                record: Some(rec),
                error: None,
            };
            let checks = evaluate(std::slice::from_ref(&cell), &Thresholds::default());
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            Ok(checks.iter().all(|c| c.pass))
        }
    }
}

fn run_nf(cmd: NfCmd) -> Result<bool> {
    match cmd {
        NfCmd::Verify {
            traj,
            dt_probe,
            tol,
            convention,
            out,
        } => {
            let wave: CnoidalWave = read_json(&traj.join("wave.json"))?;
            let trajectory = knf::Trajectory::load(&traj)?;
            let n = trajectory.states.first().map(|q| q.n()).unwrap_or(0);
            let ctx = NFContext::from_wave(&wave, n, 0.0);
            let rep = verify_dbp_identity(&trajectory, &ctx, dt_probe, &convention.get())?;
            let mut csv = String::from("t,residual,abs_residual,rhs_norm\n");
            for i in 0..rep.times.len() {
                csv += &format!(
                    "{},{:e},{:e},{:e}\n",
                    rep.times[i], rep.residuals[i], rep.abs_residuals[i], rep.rhs_norms[i]
                );
            }
            print!("{csv}");
            write_out(out.as_deref(), "identity.csv", &csv)?;
            write_out(
                out.as_deref(),
                "identity.json",
                &serde_json::to_string_pretty(&rep)?,
            )?;
            println!(
                "max relative residual {:.3e} (tolerance {tol:e})",
                rep.max_residual()
            );
            Ok(rep.max_residual() < tol)
        }
        NfCmd::Bounds {
            s,
            trials,
            n,
            a,
            t,
            seed,
            out,
        } => {
            let wave = build_cnoidal(a, 0.0, 1e-12)?;
            let ctx = NFContext::from_wave(&wave, n, t);
            let rep = bound_report(&ctx, s, trials, seed, &Convention::derived())?;
            let csv = rep.to_csv();
            print!("{csv}");
            write_out(out.as_deref(), "bounds.csv", &csv)?;
            write_out(
                out.as_deref(),
                "bounds.json",
                &serde_json::to_string_pretty(&rep)?,
            )?;
            Ok(rep.all_hold())
        }
        NfCmd::Fredholm { s, n, a, out } => {
            let wave = build_cnoidal(a, 0.0, 1e-12)?;
            let rep = fredholm_report(&wave.phi_at(2 * n), n, s);
            let json = serde_json::to_string_pretty(&rep)?;
            println!("{json}");
            write_out(out.as_deref(), "fredholm.json", &json)?;
            write_out(
                out.as_deref(),
                "fredholm.csv",
                &format!(
                    "n,s,sigma_min,sigma_max,ktilde_norm,bound\n{},{},{:e},{:e},{:e},{:e}\n",
                    rep.n, rep.s, rep.sigma_min, rep.sigma_max, rep.ktilde_norm, rep.bound
                ),
            )?;
            Ok(rep.sigma_min > 0.0 && rep.ktilde_norm <= rep.bound)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
