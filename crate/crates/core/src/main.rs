//! Command-line surface: detection verdicts, Choi spectra, noise thresholds,
//! plot-data sweeps, witness export, and the randomized self-test suite.
//!
//! Exit codes: 0 success, 1 self-test failure, 2 usage error, 3 input
//! validation error. Verdicts are reported in the payload, not the exit code.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use projmap::detector::{
    bound_sweep_to_csv, detect, fmt_sig15, gen_ghz_crossings, linspace, noise_threshold,
    sweep_bound_entangled, sweep_g_abcd, sweep_gen_ghz, sweep_to_csv, DetectorError, DETECT_TOL,
};
use projmap::linalg::{hermitian_eigenvalues, ComplexMatrix, Pauli, HERMITICITY_TOL};
use projmap::maps::{choi_matrix, QubitMapSpec};
use projmap::selftest::run_selftest;
use projmap::states::{
    bell_phi_plus, bound_entangled, g_abcd, gen_ghz, ghz, maximally_mixed, w_state, werner,
    white_noise_mix, DensityState, GhzSign,
};
use projmap::witness::{build_witness, measurement_settings};

#[derive(Parser)]
#[command(
    name = "projmap",
    about = "Genuine multipartite entanglement detection via the projection map",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the canonical detector to a state and report the spectrum
    Detect(DetectArgs),
    /// Print the Choi matrix of a single-qubit map and its eigenvalues
    Choi(ChoiArgs),
    /// White-noise threshold of a pure state by bisection
    Threshold(ThresholdArgs),
    /// Parameter sweeps producing plot-ready CSV data
    Sweep(SweepArgs),
    /// The tripartite witness: Pauli decomposition and expectation values
    Witness(WitnessArgs),
    /// Run the randomized property suites
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct DetectArgs {
    /// Builtin name (ghz3, ghz3-minus, ghz4, w, bell, maximally-mixed,
    /// gen-ghz:THETA, werner:P, noisy-ghz3:X, noisy-ghz4:X, noisy-w:X,
    /// bound:P1,P2, gabcd:A,B,C,D) or a path to a JSON state file
    state: String,
    /// Conjugate each projection with sigma_x
    #[arg(long)]
    unitary_x: bool,
    /// Emit a single JSON document instead of the human table
    #[arg(long)]
    json: bool,
    /// Detection tolerance on the minimum eigenvalue
    #[arg(long, default_value_t = DETECT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct ChoiArgs {
    /// Map name: projection | lindblad:G1,G2,G3
    map: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Builtin pure-state name (e.g. ghz3, ghz4, w, bell)
    state: String,
    #[arg(long)]
    unitary_x: bool,
    /// Bisection accuracy
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep target: gen-ghz | bound | gabcd
    target: String,
    /// Lower end of the parameter grid (each axis)
    #[arg(long)]
    min: Option<f64>,
    /// Upper end of the parameter grid (each axis)
    #[arg(long)]
    max: Option<f64>,
    /// Number of grid intervals per axis (points = steps + 1)
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Fixed b parameter for the gabcd target
    #[arg(long, default_value_t = 0.6)]
    b: f64,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    json: bool,
    /// Also report Tr(W rho) for this state
    #[arg(long)]
    expect: Option<String>,
}

#[derive(Args)]
struct SelftestArgs {
    /// RNG seed (env PMAP_GME_SEED overrides the default)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Debug: replace kappa_3 in the N=3 biseparable suite
    #[arg(long, hide = true)]
    kappa3: Option<f64>,
}

enum CliError {
    /// unknown builtin, malformed parameters (exit 2)
    Usage(String),
    /// a state or file that fails validation (exit 3)
    Validation(String),
}

impl From<DetectorError> for CliError {
    fn from(e: DetectorError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<projmap::states::StateError> for CliError {
    fn from(e: projmap::states::StateError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn parse_params<const N: usize>(name: &str, raw: &str) -> Result<[f64; N], CliError> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != N {
        return Err(CliError::Usage(format!(
            "{name} expects {N} comma-separated parameters, got {}",
            parts.len()
        )));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{name}: cannot parse '{part}' as a number")))?;
    }
    Ok(out)
}

fn parse_state(spec: &str) -> Result<DensityState, CliError> {
    // file route: anything that looks like a path
    if spec.contains('/') || spec.ends_with(".json") || Path::new(spec).is_file() {
        let text = fs::read_to_string(spec)
            .map_err(|e| CliError::Validation(format!("cannot read '{spec}': {e}")))?;
        return DensityState::from_json(&text)
            .map_err(|e| CliError::Validation(format!("invalid state file '{spec}': {e}")));
    }
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let no_params = |got: Option<&str>| -> Result<(), CliError> {
        match got {
            None => Ok(()),
            Some(_) => Err(CliError::Usage(format!(
                "builtin '{name}' takes no parameters"
            ))),
        }
    };
    match name {
        "ghz3" => {
            no_params(params)?;
            Ok(ghz(3, GhzSign::Plus)?)
        }
        "ghz3-minus" => {
            no_params(params)?;
            Ok(ghz(3, GhzSign::Minus)?)
        }
        "ghz4" => {
            no_params(params)?;
            Ok(ghz(4, GhzSign::Plus)?)
        }
        "w" => {
            no_params(params)?;
            Ok(w_state())
        }
        "bell" => {
            no_params(params)?;
            Ok(bell_phi_plus())
        }
        "maximally-mixed" => {
            no_params(params)?;
            Ok(maximally_mixed(3))
        }
        "gen-ghz" => {
            let [theta] = parse_params::<1>(name, params.ok_or_else(|| missing(name, "THETA"))?)?;
            Ok(gen_ghz(theta))
        }
        "werner" => {
            let [p] = parse_params::<1>(name, params.ok_or_else(|| missing(name, "P"))?)?;
            Ok(werner(p)?)
        }
        "noisy-ghz3" => {
            let [x] = parse_params::<1>(name, params.ok_or_else(|| missing(name, "X"))?)?;
            Ok(white_noise_mix(&ghz(3, GhzSign::Plus)?, x)?)
        }
        "noisy-ghz4" => {
            let [x] = parse_params::<1>(name, params.ok_or_else(|| missing(name, "X"))?)?;
            Ok(white_noise_mix(&ghz(4, GhzSign::Plus)?, x)?)
        }
        "noisy-w" => {
            let [x] = parse_params::<1>(name, params.ok_or_else(|| missing(name, "X"))?)?;
            Ok(white_noise_mix(&w_state(), x)?)
        }
        "bound" => {
            let [p1, p2] = parse_params::<2>(name, params.ok_or_else(|| missing(name, "P1,P2"))?)?;
            let p3 = (1.0 - p1 - p2) / 3.0;
            Ok(bound_entangled(p1, p2, p3)?)
        }
        "gabcd" => {
            let [a, b, c, d] =
                parse_params::<4>(name, params.ok_or_else(|| missing(name, "A,B,C,D"))?)?;
            Ok(g_abcd(
                Complex64::new(a, 0.0),
                Complex64::new(b, 0.0),
                Complex64::new(c, 0.0),
                Complex64::new(d, 0.0),
            )?)
        }
        other => Err(CliError::Usage(format!("unknown builtin state '{other}'"))),
    }
}

fn missing(name: &str, what: &str) -> CliError {
    CliError::Usage(format!(
        "builtin '{name}' requires parameters: {name}:{what}"
    ))
}

fn matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let z = m[(i, j)];
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    serde_json::json!(rows)
}

fn cmd_detect(args: &DetectArgs) -> Result<(), CliError> {
    let rho = parse_state(&args.state)?;
    let sx = Pauli::X.matrix();
    let unitary = args.unitary_x.then_some(&sx);
    let report = detect(&rho, unitary, args.tol)?;
    if args.json {
        let doc = serde_json::json!({
            "state": args.state,
            "unitary_x": args.unitary_x,
            "min_eigenvalue": report.min_eigenvalue,
            "spectrum": report.spectrum,
            "detected": report.detected,
            "tolerance": report.tolerance,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        println!("state:          {}", args.state);
        println!("min eigenvalue: {}", fmt_sig15(report.min_eigenvalue));
        println!(
            "spectrum:       [{}]",
            report
                .spectrum
                .iter()
                .map(|e| fmt_sig15(*e))
                .collect::<Vec<_>>()
                .join(", ")
        );
        println!(
            "verdict:        {}",
            if report.detected {
                "genuinely multipartite entangled"
            } else {
                "not detected"
            }
        );
    }
    Ok(())
}

fn parse_map(spec: &str) -> Result<QubitMapSpec, CliError> {
    match spec.split_once(':') {
        None if spec == "projection" => Ok(QubitMapSpec::projection()),
        Some(("lindblad", raw)) => {
            let [g1, g2, g3] = parse_params::<3>("lindblad", raw)?;
            Ok(QubitMapSpec::lindblad(g1, g2, g3))
        }
        _ => Err(CliError::Usage(format!(
            "unknown map '{spec}', expected projection or lindblad:G1,G2,G3"
        ))),
    }
}

fn cmd_choi(args: &ChoiArgs) -> Result<(), CliError> {
    let map = parse_map(&args.map)?;
    let choi = choi_matrix(&map);
    let eigs = hermitian_eigenvalues(&choi, HERMITICITY_TOL)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    if args.json {
        let doc = serde_json::json!({
            "map": args.map,
            "choi": matrix_json(&choi),
            "eigenvalues": eigs,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        println!("Choi matrix of {}:", args.map);
        for i in 0..choi.dim() {
            let row: Vec<String> = (0..choi.dim())
                .map(|j| {
                    let z = choi[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            println!("  [ {} ]", row.join("  "));
        }
        println!(
            "eigenvalues: [{}]",
            eigs.iter()
                .map(|e| fmt_sig15(*e))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    Ok(())
}

fn cmd_threshold(args: &ThresholdArgs) -> Result<(), CliError> {
    let rho = parse_state(&args.state)?;
    let sx = Pauli::X.matrix();
    let unitary = args.unitary_x.then_some(&sx);
    let t = noise_threshold(&rho, unitary, args.tol)?;
    println!("{t:.6}");
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    if args.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let points = args.steps + 1;
    let (csv, summary) = match args.target.as_str() {
        "gen-ghz" => {
            let lo = args.min.unwrap_or(0.0);
            let hi = args.max.unwrap_or(std::f64::consts::FRAC_PI_2);
            let grid = linspace(lo, hi, points);
            let rows = sweep_gen_ghz(&grid)?;
            let negatives = rows.iter().filter(|r| r.min_eigenvalue < 0.0).count();
            let crossings = gen_ghz_crossings(&grid)?;
            let summary = format!(
                "{} rows, {} negative; zero crossings at [{}]",
                rows.len(),
                negatives,
                crossings
                    .iter()
                    .map(|c| format!("{c:.4}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            (sweep_to_csv(&rows), summary)
        }
        "bound" => {
            let lo = args.min.unwrap_or(0.0);
            let hi = args.max.unwrap_or(1.0);
            let grid = linspace(lo, hi, points);
            let rows = sweep_bound_entangled(&grid, &grid)?;
            let valid = rows.iter().filter(|r| r.valid).count();
            let negatives = rows
                .iter()
                .filter(|r| r.valid && r.numeric_min < 0.0)
                .count();
            let worst_gap = rows
                .iter()
                .filter(|r| r.valid)
                .map(|r| (r.analytic_min - r.numeric_min).abs())
                .fold(0.0, f64::max);
            let summary = format!(
                "{} rows ({} valid), {} negative; max analytic-vs-numeric gap {:.3e}",
                rows.len(),
                valid,
                negatives,
                worst_gap
            );
            (bound_sweep_to_csv(&rows), summary)
        }
        "gabcd" => {
            let lo = args.min.unwrap_or(0.0);
            let hi = args.max.unwrap_or(1.0);
            let grid = linspace(lo, hi, points);
            let rows = sweep_g_abcd(&grid, &grid, args.b)?;
            let negatives = rows.iter().filter(|r| r.min_eigenvalue < 0.0).count();
            let summary = format!(
                "{} rows, {} negative (b = {})",
                rows.len(),
                negatives,
                args.b
            );
            (sweep_to_csv(&rows), summary)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown sweep target '{other}', expected gen-ghz, bound, or gabcd"
            )))
        }
    };
    match &args.out {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| {
                CliError::Validation(format!("cannot write '{}': {e}", path.display()))
            })?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            // keep the CSV payload stream clean
            eprintln!("{summary}");
            print!("{csv}");
        }
    }
    Ok(())
}

fn cmd_witness(args: &WitnessArgs) -> Result<(), CliError> {
    let w = build_witness()?;
    let expectation = match &args.expect {
        Some(spec) => Some((spec.clone(), w.expectation(&parse_state(spec)?)?)),
        None => None,
    };
    if args.json {
        let terms: std::collections::BTreeMap<String, f64> = w
            .pauli_terms()
            .iter()
            .map(|(label, &coef)| (label.to_string(), coef))
            .collect();
        let mut doc = serde_json::json!({ "pauli_terms": terms });
        if let Some((state, value)) = &expectation {
            doc["expectation"] = serde_json::json!({ "state": state, "value": value });
        }
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        println!("witness W = Phi_3(|GHZ><GHZ|), Pauli decomposition:");
        for (label, coef) in w.pauli_terms() {
            println!("  {label}  {}", fmt_sig15(*coef));
        }
        let settings = measurement_settings(&w);
        println!(
            "measurement settings: {} (1 Z-basis setting covering [{}] + {} correlations [{}])",
            settings.setting_count,
            settings
                .z_basis_labels
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            settings.correlation_labels.len(),
            settings
                .correlation_labels
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(", "),
        );
        if let Some((state, value)) = &expectation {
            println!("Tr(W * {state}) = {}", fmt_sig15(*value));
        }
    }
    Ok(())
}

fn cmd_selftest(args: &SelftestArgs) -> Result<bool, CliError> {
    let seed = args
        .seed
        .or_else(|| {
            std::env::var("PMAP_GME_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(12345);
    let outcomes = run_selftest(seed, args.samples, args.kappa3)?;
    let mut all_pass = true;
    for o in &outcomes {
        if o.passed() {
            println!("PASS {} ({} samples)", o.name, o.samples);
        } else {
            all_pass = false;
            println!(
                "FAIL {} ({} samples, {} failures): {}",
                o.name,
                o.samples,
                o.failures,
                o.counterexample.as_deref().unwrap_or("")
            );
        }
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Detect(args) => cmd_detect(args),
        Command::Choi(args) => cmd_choi(args),
        Command::Threshold(args) => cmd_threshold(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Witness(args) => cmd_witness(args),
        Command::Selftest(args) => {
            return match cmd_selftest(args) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(CliError::Usage(msg)) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(2)
                }
                Err(CliError::Validation(msg)) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(3)
                }
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
