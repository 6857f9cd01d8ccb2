use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use quadspec::report::{self, AnalysisReport, ValidateOptions};
use quadspec::{QuadraticForm, QuadraticFormJson, Tolerances};

/// Bundled example symbols, embedded at compile time.
const FIXTURES: &[(&str, &str, &str)] = &[
    (
        "kfp_a1",
        "Kramers-Fokker-Planck quadratic symbol with coupling a=1; trivial singular space, spectral lattice in the open left half-plane",
        include_str!("../fixtures/kfp_a1.json"),
    ),
    (
        "mult_x2",
        "multiplication by -x^2; the singular space is non-symplectic and the semigroup norm stays at 1 (hypothesis-failure exit path)",
        include_str!("../fixtures/mult_x2.json"),
    ),
    (
        "harmonic",
        "-(x^2 + xi^2), elliptic; spectrum { -(2k+1) } and decay rate 1",
        include_str!("../fixtures/harmonic.json"),
    ),
    (
        "imag_harmonic",
        "i (x^2 + xi^2), purely imaginary; singular space is all of phase space and the semigroup is unitary (decay rate 0)",
        include_str!("../fixtures/imag_harmonic.json"),
    ),
];

const MAX_N_ANALYZE: usize = 4;
const MAX_N_VALIDATE: usize = 3;
const MAX_TRUNC: usize = 80;

#[derive(Parser)]
#[command(name = "quadspec", version, about = "Singular-space analysis and spectral prediction for dissipative quadratic forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the structural pipeline on a form, optionally cross-checked numerically
    Analyze {
        /// Input form (JSON: {"n", "Q_re", "Q_im"})
        file: PathBuf,
        /// Also run the Hermite-Galerkin cross-check
        #[arg(long)]
        validate: bool,
        /// Write the report to this file instead of stdout
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
        /// Seed for randomized diagnostics
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        galerkin: GalerkinArgs,
    },
    /// Run only the numerical cross-check and emit CSV curves alongside JSON
    Validate {
        file: PathBuf,
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
        /// Base path for CSV output (<base>_curve.csv, <base>_eigs.csv)
        #[arg(long, value_name = "BASE")]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        galerkin: GalerkinArgs,
    },
    /// List the bundled fixtures
    Fixtures {
        /// Print the JSON of one fixture instead of the list
        #[arg(long, value_name = "NAME")]
        dump: Option<String>,
    },
}

#[derive(Args)]
struct GalerkinArgs {
    /// Hermite truncation degree
    #[arg(long = "N", default_value_t = 30)]
    trunc: usize,
    /// Degree increment for the convergence check
    #[arg(long = "dN", default_value_t = 10)]
    dn: usize,
    /// Number of converged eigenvalues to track
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Semigroup sample times
    #[arg(long, value_delimiter = ',', default_values_t = default_times())]
    times: Vec<f64>,
    /// Lower edge of the decay-fit window (default 0.4 * t_max)
    #[arg(long)]
    fit_lo: Option<f64>,
    /// Upper edge of the decay-fit window (default t_max)
    #[arg(long)]
    fit_hi: Option<f64>,
    /// Matching tolerance for the prediction-vs-oracle table
    #[arg(long, default_value_t = 1e-4)]
    tol_match: f64,
    /// Evolution time for the smoothing diagnostic
    #[arg(long, default_value_t = 0.2)]
    smooth_t: f64,
    /// Skip the smoothing diagnostic
    #[arg(long)]
    no_smoothing: bool,
}

fn default_times() -> Vec<f64> {
    (0..=16).map(|k| 0.5 * k as f64).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Analyze { file, validate, json, seed, galerkin } => {
            let q = load_form(&file)?;
            if let Some(code) = dimension_check(&q, if validate { MAX_N_VALIDATE } else { MAX_N_ANALYZE }, &galerkin) {
                return Ok(code);
            }
            let tol = Tolerances::from_env();
            let mut rep = report::analyze(&q, None, &tol).map_err(|e| e.to_string())?;
            if validate && !rep.failed() {
                let opts = galerkin.to_options(seed, &rep);
                rep.validation = Some(report::validate(&q, &rep, &opts, &tol).map_err(|e| e.to_string())?);
            }
            emit_report(&rep, json.as_deref())?;
            Ok(exit_for(&rep))
        }
        Command::Validate { file, json, csv, seed, galerkin } => {
            let q = load_form(&file)?;
            if let Some(code) = dimension_check(&q, MAX_N_VALIDATE, &galerkin) {
                return Ok(code);
            }
            let tol = Tolerances::from_env();
            let mut rep = report::analyze(&q, None, &tol).map_err(|e| e.to_string())?;
            if !rep.failed() {
                let opts = galerkin.to_options(seed, &rep);
                let val = report::validate(&q, &rep, &opts, &tol).map_err(|e| e.to_string())?;
                let base = csv.unwrap_or_else(|| csv_base(&file, json.as_deref()));
                write_csvs(&base, &val)?;
                rep.validation = Some(val);
            }
            emit_report(&rep, json.as_deref())?;
            Ok(exit_for(&rep))
        }
        Command::Fixtures { dump } => {
            match dump {
                Some(name) => {
                    let (_, _, body) = FIXTURES
                        .iter()
                        .find(|(n, _, _)| *n == name)
                        .ok_or_else(|| format!("unknown fixture {name:?}"))?;
                    print!("{body}");
                }
                None => {
                    for (name, desc, _) in FIXTURES {
                        println!("{name:14} {desc}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_form(path: &PathBuf) -> Result<QuadraticForm, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let wire: QuadraticFormJson =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    wire.to_form().map_err(|e| format!("{}: {e}", path.display()))
}

/// Returns the exit-3 code when the problem is too large (or empty) for a
/// desk-scale run.
fn dimension_check(q: &QuadraticForm, max_n: usize, g: &GalerkinArgs) -> Option<ExitCode> {
    if q.n() == 0 || q.n() > max_n || g.trunc > MAX_TRUNC {
        eprintln!(
            "error: dimension bounds exceeded (n = {}, max {}; N = {}, max {})",
            q.n(),
            max_n,
            g.trunc,
            MAX_TRUNC
        );
        return Some(ExitCode::from(3));
    }
    None
}

impl GalerkinArgs {
    fn to_options(&self, seed: u64, rep: &AnalysisReport) -> ValidateOptions {
        let tmax = self.times.iter().cloned().fold(0.0_f64, f64::max);
        let fit_window = match (self.fit_lo, self.fit_hi) {
            (Some(lo), Some(hi)) => Some((lo, hi)),
            (Some(lo), None) => Some((lo, tmax)),
            (None, Some(hi)) => Some((0.4 * tmax, hi)),
            (None, None) => None,
        };
        let smoothing = match &rep.split {
            Some(split) if !self.no_smoothing && split.n_prime > 0 => {
                vec![(self.smooth_t, 1), (self.smooth_t, 2)]
            }
            _ => vec![],
        };
        ValidateOptions {
            trunc: self.trunc,
            dn: self.dn,
            k: self.k,
            times: self.times.clone(),
            fit_window,
            tol_match: self.tol_match,
            smoothing,
            seed,
        }
    }
}

fn emit_report(rep: &AnalysisReport, out: Option<&std::path::Path>) -> Result<(), String> {
    let body = serde_json::to_string_pretty(rep).map_err(|e| e.to_string())?;
    match out {
        Some(path) => fs::write(path, body + "\n").map_err(|e| format!("{}: {e}", path.display())),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn exit_for(rep: &AnalysisReport) -> ExitCode {
    if rep.failed() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn csv_base(input: &PathBuf, json: Option<&std::path::Path>) -> PathBuf {
    match json {
        Some(p) => p.with_extension(""),
        None => PathBuf::from(input.file_stem().unwrap_or_default()),
    }
}

fn write_csvs(base: &PathBuf, val: &report::ValidationReport) -> Result<(), String> {
    let curve_path = base.with_file_name(format!(
        "{}_curve.csv",
        base.file_name().unwrap_or_default().to_string_lossy()
    ));
    let mut curve = String::from("t,norm\n");
    for (t, norm) in &val.curve {
        curve.push_str(&format!("{t},{norm}\n"));
    }
    fs::write(&curve_path, curve).map_err(|e| format!("{}: {e}", curve_path.display()))?;

    let eigs_path = base.with_file_name(format!(
        "{}_eigs.csv",
        base.file_name().unwrap_or_default().to_string_lossy()
    ));
    let mut eigs = String::from("re,im,matched\n");
    for m in &val.matches {
        eigs.push_str(&format!("{},{},1\n", m.observed.re, m.observed.im));
    }
    for v in &val.unmatched_observed {
        eigs.push_str(&format!("{},{},0\n", v.re, v.im));
    }
    fs::write(&eigs_path, eigs).map_err(|e| format!("{}: {e}", eigs_path.display()))
}
