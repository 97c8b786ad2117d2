//! Command-line front end.
//!
//! Exit status: 0 when every verdict passes, 1 when one fails, 2 for usage
//! and domain errors, 3 for file errors. Reports go to `--out` or stdout.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::hardcore_sim::{
    concentration_check, decomposition_check, nu_moment_check, separation_experiment, simulate_scan,
    HardcoreState, DEFAULT_C_PRIME, MIN_CONCENTRATION_SITES,
};
use crate::mixing::{analyze_mixing, mixing_curve, mixing_time};
use crate::models::ModelSpec;
use crate::operators::{glauber_kernel, sequence_product_kernel, MarkovKernel, SiteKernelSet};
use crate::projections::{recht_re_sweep, sweep_csv};
use crate::report::{write_atomic, write_report, NamedResult, Report, ResultBody, Spectrum};
use crate::rng::DEFAULT_SEED;
use crate::schedules::{certify_sequence, UpdateSequence};
use crate::spectral::{laplacian_comparison, reversible_spectrum, verify_scan_gap_bound};
use crate::statespace::DEFAULT_STATE_CAP;
use crate::suites::{run_suite, Suite};

pub const THREADS_ENV: &str = "SCAN_SPECTRA_THREADS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FILE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "scan-spectra", version, about = "Spectral gaps and mixing times of Gibbs samplers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Default)]
struct Common {
    /// Builtin model string (e.g. hardcore:complete:n=4,lambda=1) or explicit:<path>
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest admissible number of states
    #[arg(long)]
    cap: Option<usize>,
    /// Optional JSON file with defaults for model, seed, cap, trials and eps
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UnitArg {
    Steps,
    Sweeps,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gaps, norms and the Laplacian singular value of one model
    Spectra {
        #[command(flatten)]
        common: Common,
        /// Scan order, whitespace separated (default: identity)
        #[arg(long)]
        order: Option<String>,
    },
    /// Exact mixing time against its spectral bounds
    Mix {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        tmax: Option<usize>,
        #[arg(long, value_enum, default_value = "steps")]
        unit: UnitArg,
        #[arg(long)]
        order: Option<String>,
    },
    /// Run one verification suite
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: String,
    },
    /// Certificate for an update sequence
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "seq_file")]
        seq: Option<String>,
        #[arg(long)]
        seq_file: Option<PathBuf>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Products of the planar rank-one family
    RechtRe {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
    },
    /// Exact Glauber vs scan mixing on the complete-graph hardcore model
    Hardcore {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Scan trajectories and stopping-time statistics
    Sim {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        sweeps: u64,
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_C_PRIME)]
        c_prime: f64,
    },
}

/// Defaults read from `--config`; command-line flags win.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<String>,
    pub seed: Option<u64>,
    pub state_cap: Option<usize>,
    pub trials: Option<usize>,
    pub eps: Option<f64>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

struct Resolved {
    config: RunConfig,
}

impl Resolved {
    fn new(common: &Common) -> Result<Self> {
        let mut config = match &common.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?
            }
            None => RunConfig::default(),
        };
        if common.model.is_some() {
            config.model = common.model.clone();
        }
        config.seed = common.seed.or(config.seed);
        config.state_cap = common.cap.or(config.state_cap);
        if common.out.is_some() {
            config.out = common.out.clone();
        }
        if common.csv.is_some() {
            config.csv = common.csv.clone();
        }
        if config.state_cap == Some(0) {
            return Err(Error::Domain("state cap must be positive".into()));
        }
        Ok(Self { config })
    }

    fn seed(&self) -> u64 {
        self.config.seed.unwrap_or(DEFAULT_SEED)
    }

    fn cap(&self) -> usize {
        self.config.state_cap.unwrap_or(DEFAULT_STATE_CAP)
    }

    fn model_string(&self) -> Result<&str> {
        self.config
            .model
            .as_deref()
            .ok_or_else(|| Error::Domain("--model is required".into()))
    }

    fn kernels(&self) -> Result<SiteKernelSet> {
        let spec: ModelSpec = self.model_string()?.parse()?;
        SiteKernelSet::from_distribution(&spec.build(self.cap())?)
    }

    fn eps(&self, flag: Option<f64>, default: f64) -> f64 {
        flag.or(self.config.eps).unwrap_or(default)
    }

    fn trials(&self, flag: Option<usize>, default: usize) -> usize {
        flag.or(self.config.trials).unwrap_or(default)
    }
}

fn parse_order(text: Option<&str>, n: usize) -> Result<Vec<usize>> {
    match text {
        Some(t) => Ok(UpdateSequence::parse(t, n)?.indices().to_vec()),
        None => Ok((0..n).collect()),
    }
}

fn emit(report: &Report, run: &Resolved) -> Result<i32> {
    match &run.config.out {
        Some(path) => write_report(report, path)?,
        None => print!("{}", report.to_json()),
    }
    Ok(if report.overall_pass { EXIT_PASS } else { EXIT_FAIL })
}

fn write_csv(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text),
        None => Ok(()),
    }
}

fn spectra(run: &Resolved, order: Option<&str>) -> Result<Report> {
    let kernels = run.kernels()?;
    let order = parse_order(order, kernels.sites())?;
    let glauber = glauber_kernel(&kernels)?;
    let results = vec![
        NamedResult::new(
            "glauber spectrum",
            ResultBody::Spectrum(Spectrum {
                label: glauber.label().to_string(),
                eigenvalues: reversible_spectrum(&glauber)?,
            }),
        ),
        NamedResult::new("scan gap bound", ResultBody::Spectral(verify_scan_gap_bound(&kernels, &order)?)),
        NamedResult::new("laplacian sandwich", ResultBody::Spectral(laplacian_comparison(&kernels)?)),
    ];
    let config = json!({"model": run.model_string()?, "cap": run.cap(), "order": order});
    Ok(Report::new("spectra", config, results))
}

fn mix(run: &Resolved, eps: Option<f64>, tmax: Option<usize>, unit: UnitArg, order: Option<&str>) -> Result<Report> {
    let kernels = run.kernels()?;
    let eps = run.eps(eps, 0.25);
    let kernel: MarkovKernel = match unit {
        UnitArg::Steps => glauber_kernel(&kernels)?,
        UnitArg::Sweeps => sequence_product_kernel(&kernels, &parse_order(order, kernels.sites())?)?,
    };
    let report = match analyze_mixing(&kernel, eps, tmax) {
        Ok(r) => r,
        // kernels without a spectral gap can still be evolved for an explicit horizon
        Err(Error::Domain(_)) if tmax.is_some() => mixing_time(&kernel, eps, tmax.unwrap_or_default())?,
        Err(e) => return Err(e),
    };
    if let Some(path) = run.config.csv.as_deref() {
        let horizon = report.t_mix.value().unwrap_or(report.t_max);
        write_csv(Some(path), &mixing_curve(&kernel, horizon)?.to_csv())?;
    }
    let config = json!({
        "model": run.model_string()?,
        "cap": run.cap(),
        "eps": eps,
        "tmax": tmax,
        "unit": kernel.unit().name(),
    });
    Ok(Report::new("mix", config, vec![NamedResult::new(kernel.label(), ResultBody::Mixing(report))]))
}

fn verify(run: &Resolved, suite: &str) -> Result<Report> {
    let suite: Suite = suite.parse()?;
    let kernels = run.kernels()?;
    let results = run_suite(suite, &kernels, run.seed())?;
    let config = json!({
        "model": run.model_string()?,
        "cap": run.cap(),
        "seed": run.seed(),
        "suite": suite.name(),
    });
    Ok(Report::new(format!("verify {suite}"), config, results))
}

fn certify(n: usize, seq: Option<&str>, seq_file: Option<&Path>, delta: Option<f64>) -> Result<Report> {
    let text = match (seq, seq_file) {
        (Some(s), _) => s.to_string(),
        (None, Some(path)) => fs::read_to_string(path)?,
        (None, None) => return Err(Error::Domain("one of --seq or --seq-file is required".into())),
    };
    let seq = UpdateSequence::parse(&text, n)?;
    let mut cert = certify_sequence(&seq);
    if let Some(d) = delta {
        if !(d > 0.0 && d <= 1.0) {
            return Err(Error::Domain(format!("delta must lie in (0, 1], got {d}")));
        }
        cert = cert.with_delta(d);
    }
    let config = json!({"n": n, "sequence": seq.indices(), "delta": delta});
    Ok(Report::new("certify", config, vec![NamedResult::new("certificate", ResultBody::Certificate(cert))]))
}

fn recht_re(run: &Resolved, ns: &[usize], deltas: &[f64]) -> Result<Report> {
    let rows = recht_re_sweep(ns, deltas)?;
    write_csv(run.config.csv.as_deref(), &sweep_csv(&rows))?;
    let config = json!({"n": ns, "delta": deltas});
    Ok(Report::new("recht-re", config, vec![NamedResult::new("sweep", ResultBody::ProjectionSweep(rows))]))
}

fn hardcore(run: &Resolved, ns: &[usize], eps: Option<f64>) -> Result<Report> {
    let eps = run.eps(eps, 0.25);
    let table = separation_experiment(ns, eps)?;
    write_csv(run.config.csv.as_deref(), &table.to_csv())?;
    let config = json!({"n": ns, "eps": eps});
    Ok(Report::new("hardcore", config, vec![NamedResult::new("separation", ResultBody::Separation(table))]))
}

fn sim(run: &Resolved, n: usize, sweeps: u64, s: usize, trials: Option<usize>, c_prime: f64) -> Result<Report> {
    let seed = run.seed();
    let trials = run.trials(trials, 1000);
    let mut results = vec![
        NamedResult::new(
            "trajectory",
            ResultBody::Trajectory(simulate_scan(n, sweeps, seed, HardcoreState::top(n))?),
        ),
        NamedResult::new("nu moments", ResultBody::NuMoments(nu_moment_check(n, s, trials, seed)?)),
        NamedResult::new(
            "decomposition",
            ResultBody::Decomposition(decomposition_check(n, s, trials, seed)?),
        ),
    ];
    if n >= MIN_CONCENTRATION_SITES {
        results.push(NamedResult::new(
            "concentration",
            ResultBody::Concentration(concentration_check(n, trials, seed, c_prime)?),
        ));
    }
    let config = json!({
        "n": n,
        "sweeps": sweeps,
        "s": s,
        "trials": trials,
        "seed": seed,
        "c_prime": c_prime,
    });
    Ok(Report::new("sim", config, results))
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Spectra { common, order } => {
            let run = Resolved::new(&common)?;
            emit(&spectra(&run, order.as_deref())?, &run)
        }
        Command::Mix { common, eps, tmax, unit, order } => {
            let run = Resolved::new(&common)?;
            emit(&mix(&run, eps, tmax, unit, order.as_deref())?, &run)
        }
        Command::Verify { common, suite } => {
            let run = Resolved::new(&common)?;
            emit(&verify(&run, &suite)?, &run)
        }
        Command::Certify { common, n, seq, seq_file, delta } => {
            let run = Resolved::new(&common)?;
            emit(&certify(n, seq.as_deref(), seq_file.as_deref(), delta)?, &run)
        }
        Command::RechtRe { common, n, delta } => {
            let run = Resolved::new(&common)?;
            emit(&recht_re(&run, &n, &delta)?, &run)
        }
        Command::Hardcore { common, n, eps } => {
            let run = Resolved::new(&common)?;
            emit(&hardcore(&run, &n, eps)?, &run)
        }
        Command::Sim { common, n, sweeps, s, trials, c_prime } => {
            let run = Resolved::new(&common)?;
            emit(&sim(&run, n, sweeps, s, trials, c_prime)?, &run)
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Parse { .. } | Error::Schema(_) => EXIT_FILE,
        _ => EXIT_USAGE,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // an already-initialised pool keeps its size
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Domain("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Reducible("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Parse { line: 1, message: "x".into() }), EXIT_FILE);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), EXIT_FILE);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"model": "hardcore:complete:n=2", "seed": 5, "eps": 0.1}"#).unwrap();
        let common = Common {
            config: Some(path.clone()),
            seed: Some(9),
            ..Common::default()
        };
        let run = Resolved::new(&common).unwrap();
        assert_eq!(run.seed(), 9);
        assert_eq!(run.model_string().unwrap(), "hardcore:complete:n=2");
        assert_eq!(run.eps(None, 0.25), 0.1);
        assert_eq!(run.cap(), DEFAULT_STATE_CAP);

        fs::write(&path, r#"{"modle": "x"}"#).unwrap();
        assert!(matches!(Resolved::new(&common), Err(Error::Parse { .. })));
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        assert_eq!(run(["scan-spectra", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["scan-spectra", "verify", "--suite", "cor32", "--bogus"]), EXIT_USAGE);
    }
}
