use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use steane_core::experiments::{
    contour_csv, contour_sweep, ray_crossing, run_encoding, run_shor, Axis, Experiment, ExperimentResult, Method,
    RunSettings, SweepGrid,
};
use steane_core::golden::{compute_all, diff, DiffRow, GoldenFile, Status};
use steane_core::oracle::{
    arbitrate, default_grid, dense_jet, dense_points, jet_points, mc_points, ArbitrationRow, Tolerance,
    DEFAULT_CUBIC_C, DENSE_MAX_QUBITS,
};
use steane_core::ErrorPolynomial;

#[derive(Parser, Debug)]
#[command(name = "steane", version, about = "Exact fidelity polynomials for Steane-code logical zero preparation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "STEANE_THREADS", default_value_t = 0)]
    threads: usize,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Truncation order of the polynomials.
    #[arg(long, global = true, default_value_t = 2)]
    degree: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shor-state preparation fidelity.
    Shor {
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
        verifications: u8,
    },
    /// Logical-zero encoding fidelities (seven-qubit and decoded qubit).
    Encode {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Apply noiseless error correction before evaluating.
        #[arg(long, value_enum)]
        ec: Option<EcArg>,
        /// Shor-state verifications per syndrome block (ft only).
        #[arg(long, default_value_t = 2)]
        verifications: usize,
        /// Repetitions of each syndrome measurement (ft only).
        #[arg(long, default_value_t = 2)]
        repeats: usize,
    },
    /// Fidelity-level contour and ray crossings of a saved result.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.99)]
        level: f64,
        /// Which fidelity of an encoding result to use.
        #[arg(long, value_enum, default_value_t = Measure::Seven)]
        measure: Measure,
        /// Upper end of every axis.
        #[arg(long, default_value_t = 2e-3)]
        max: f64,
        /// Grid points per p_x / p_y axis.
        #[arg(long, default_value_t = 21)]
        steps: usize,
    },
    /// Compare a saved result against an independent numeric oracle.
    Arbitrate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleArg::Auto)]
        oracle: OracleArg,
        /// Cubic remainder constant for the dense oracle.
        #[arg(long, default_value_t = DEFAULT_CUBIC_C)]
        c: f64,
        /// Monte-Carlo samples per grid point.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Standard errors allowed by the Monte-Carlo oracle.
        #[arg(long, default_value_t = 4.0)]
        sigmas: f64,
    },
    /// Run every experiment and diff against the bundled reference coefficients.
    PaperSuite {
        /// Reference file to use instead of the bundled one.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Ft,
    Gates,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EcArg {
    Perfect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Measure {
    Seven,
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleArg {
    /// Dense for registers of at most 8 qubits, Monte-Carlo otherwise.
    Auto,
    Dense,
    /// Second-order Taylor jet of the dense channel.
    Jet,
    Mc,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns `Ok(false)` when a comparison failed.
fn run(cli: Cli) -> Result<bool> {
    let common = &cli.common;
    let settings = RunSettings {
        degree: common.degree,
        threads: common.threads,
    };
    match cli.command {
        Command::Shor { verifications } => {
            let r = run_shor(verifications as usize, settings)?;
            emit(common, &r, || results_csv(&[&r]))?;
            Ok(true)
        }
        Command::Encode {
            method,
            ec,
            verifications,
            repeats,
        } => {
            let experiment = Experiment::Encoding {
                method: match method {
                    MethodArg::Ft => Method::Ft,
                    MethodArg::Gates => Method::Gates,
                },
                verifications,
                repeats,
                perfect_ec: ec.is_some(),
            };
            let r = run_encoding(experiment, settings)?;
            emit(common, &r, || results_csv(&[&r.seven, &r.single]))?;
            Ok(true)
        }
        Command::Sweep {
            input,
            level,
            measure,
            max,
            steps,
        } => {
            let results = read_results(&input)?;
            let r = pick(&results, measure)?;
            let report = sweep(r, level, max, steps);
            emit(common, &report, || contour_csv(&report.contour))?;
            Ok(true)
        }
        Command::Arbitrate {
            input,
            oracle,
            c,
            samples,
            seed,
            sigmas,
        } => {
            let results = read_results(&input)?;
            let mut reports = Vec::new();
            for r in &results {
                reports.push(arbitrate_result(r, oracle, c, samples, seed, sigmas, common.threads)?);
            }
            let pass = reports.iter().all(|r| r.pass);
            emit(common, &reports, || arbitration_csv(&reports))?;
            Ok(pass)
        }
        Command::PaperSuite { golden } => {
            let golden = match golden {
                Some(p) => GoldenFile::from_json(&fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
                None => GoldenFile::bundled(),
            };
            let computed = compute_all(RunSettings {
                degree: golden.degree,
                threads: common.threads,
            })?;
            let rows = diff(&golden, &computed)?;
            let pass = rows.iter().all(|r| r.status != Status::Mismatch);
            emit(common, &rows, || suite_csv(&rows))?;
            Ok(pass)
        }
    }
}

fn emit<T: Serialize>(common: &Common, value: &T, csv: impl FnOnce() -> String) -> Result<()> {
    let text = match common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value)?;
            s.push('\n');
            s
        }
        Format::Csv => csv(),
    };
    match &common.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn results_csv(results: &[&ExperimentResult]) -> String {
    let mut s = String::from("label,target,polynomial,ex,ey,ez,num,den\n");
    for r in results {
        for (name, p) in [
            ("acceptance", &r.acceptance),
            ("fidelity_raw", &r.fidelity_raw),
            ("fidelity", &r.fidelity),
        ] {
            for t in p.to_json_terms() {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.label, r.target, name, t.exp[0], t.exp[1], t.exp[2], t.num, t.den
                ));
            }
        }
    }
    s
}

/// Accepts a single result, an encoding result (`seven`/`single`), or an array of either.
fn read_results(path: &PathBuf) -> Result<Vec<ExperimentResult>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let mut out = Vec::new();
    collect_results(&value, &mut out)?;
    if out.is_empty() {
        bail!("{} contains no experiment results", path.display());
    }
    Ok(out)
}

fn collect_results(v: &Value, out: &mut Vec<ExperimentResult>) -> Result<()> {
    match v {
        Value::Array(items) => items.iter().try_for_each(|i| collect_results(i, out)),
        Value::Object(m) if m.contains_key("fidelity") => {
            out.push(ExperimentResult::from_json(v)?);
            Ok(())
        }
        Value::Object(m) if m.contains_key("seven") && m.contains_key("single") => {
            out.push(ExperimentResult::from_json(&m["seven"])?);
            out.push(ExperimentResult::from_json(&m["single"])?);
            Ok(())
        }
        _ => bail!("unrecognized result JSON"),
    }
}

fn pick(results: &[ExperimentResult], measure: Measure) -> Result<&ExperimentResult> {
    if results.len() == 1 {
        return Ok(&results[0]);
    }
    let want = match measure {
        Measure::Seven => "zero_l",
        Measure::Single => "decoded_qubit",
    };
    results
        .iter()
        .find(|r| r.target == want)
        .with_context(|| format!("no {want} result in input"))
}

#[derive(Serialize)]
struct SweepReport {
    label: String,
    target: String,
    level: f64,
    /// Crossing `p` on the `p_x = p_y = p_z = p` ray.
    uniform: Option<f64>,
    /// Crossings along each single axis.
    axes: [Option<f64>; 3],
    /// `(p_x, p_y, p_z)` points on the contour.
    contour: Vec<[f64; 3]>,
}

fn sweep(r: &ExperimentResult, level: f64, max: f64, steps: usize) -> SweepReport {
    let grid = SweepGrid {
        px: Axis::new(0.0, max, steps),
        py: Axis::new(0.0, max, steps),
        pz_max: max,
        pz_steps: 200,
    };
    let f = &r.fidelity;
    SweepReport {
        label: r.label.clone(),
        target: r.target.clone(),
        level,
        uniform: ray_crossing(f, [1.0, 1.0, 1.0], level, max),
        axes: [
            ray_crossing(f, [1.0, 0.0, 0.0], level, max),
            ray_crossing(f, [0.0, 1.0, 0.0], level, max),
            ray_crossing(f, [0.0, 0.0, 1.0], level, max),
        ],
        contour: contour_sweep(f, &grid, level),
    }
}

#[derive(Serialize)]
struct ArbitrationReport {
    label: String,
    target: String,
    oracle: &'static str,
    tolerance: Tolerance,
    pass: bool,
    rows: Vec<ArbitrationRow>,
}

fn arbitrate_result(
    r: &ExperimentResult,
    oracle: OracleArg,
    c: f64,
    samples: u64,
    seed: u64,
    sigmas: f64,
    threads: usize,
) -> Result<ArbitrationReport> {
    let experiment = Experiment::from_label(&r.label)?;
    let circuit = experiment.circuit()?;
    let eval = experiment.evaluation(circuit.n_qubits);
    let target = eval
        .targets
        .iter()
        .position(|t| t.label() == r.target)
        .with_context(|| format!("experiment {} has no target {}", r.label, r.target))?;
    let oracle = match oracle {
        OracleArg::Auto if circuit.n_qubits <= DENSE_MAX_QUBITS => OracleArg::Dense,
        OracleArg::Auto => OracleArg::Mc,
        o => o,
    };
    let grid = default_grid();
    let poly: ErrorPolynomial = r.fidelity.clone();
    let (name, points, tol) = match oracle {
        OracleArg::Dense => (
            "dense",
            dense_points(&circuit, &eval, target, &grid)?,
            Tolerance::Cubic { c },
        ),
        OracleArg::Jet => {
            let jet = dense_jet(&circuit, &eval, target, 1e-4)?;
            ("jet", jet_points(&jet, &grid), Tolerance::Absolute { eps: 1e-7 })
        }
        _ => (
            "monte_carlo",
            mc_points(&circuit, &eval, target, &grid, samples, seed, threads)?,
            Tolerance::Sigma { k: sigmas },
        ),
    };
    let rows = arbitrate(&poly, &points, tol);
    Ok(ArbitrationReport {
        label: r.label.clone(),
        target: r.target.clone(),
        oracle: name,
        tolerance: tol,
        pass: rows.iter().all(|row| row.pass),
        rows,
    })
}

fn arbitration_csv(reports: &[ArbitrationReport]) -> String {
    let mut s = String::from("label,target,oracle,px,py,pz,poly_value,oracle_value,bound,pass\n");
    for r in reports {
        for row in &r.rows {
            s.push_str(&format!(
                "{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{}\n",
                r.label, r.target, r.oracle, row.p[0], row.p[1], row.p[2], row.poly_value, row.oracle_value, row.bound, row.pass
            ));
        }
    }
    s
}

fn suite_csv(rows: &[DiffRow]) -> String {
    let mut s = String::from("name,status,computed,published,difference\n");
    for r in rows {
        let status = match r.status {
            Status::Match => "match",
            Status::Deviation => "deviation",
            Status::Mismatch => "mismatch",
        };
        s.push_str(&format!(
            "{},{},\"{}\",\"{}\",\"{}\"\n",
            r.name, status, r.computed, r.published, r.difference
        ));
    }
    s
}
