//! Command-line front end: HNFs of matrix files, density predictions, Monte
//! Carlo experiments and gcd distribution tables.
//!
//! [`run_cli`] is the whole program; the binary only forwards process
//! arguments and standard streams to it.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hermite_density::arith::{d_limit_at, d_n_at, f_limit_at, f_n_at, DEFAULT_LIMIT_TOL};
use hermite_density::density::{diag_density, lattice_shape_density, DensityValue, LatticeShape};
use hermite_density::montecarlo::{
    fmt12, round12, run_diag_experiment, run_gcd_det_experiment, run_residue_experiment,
    ExperimentReport,
};
use hermite_density::zeta::DEFAULT_TOL;
use hermite_density::{hnf, DiagPattern, IntMatrix, SampleConfig};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "hermite-density",
    version,
    about = "Hermite normal forms and the densities of their diagonals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// HNF and unimodular witness of a matrix file (stdin if no --input).
    Hnf {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Predicted density of a leading HNF diagonal pattern.
    PredictDiag {
        #[arg(long)]
        n: usize,
        /// Number of columns (defaults to n).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        pattern: DiagPattern,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Predicted density of a lattice basis shape.
    PredictShape {
        #[arg(long)]
        kind: LatticeShape,
        #[arg(long)]
        n: usize,
        /// Bit-size parameter for the NTRU estimate.
        #[arg(long)]
        s: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Empirical frequency of a diagonal pattern.
    McDiag {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        pattern: DiagPattern,
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        json: bool,
    },
    /// Residues of the last diagonal entry given the first n - 1.
    McResidue {
        #[arg(long)]
        n: usize,
        /// Prefix (d_1, ..., d_{n-1}).
        #[arg(long)]
        pattern: DiagPattern,
        #[arg(long)]
        d: u64,
        /// Report only this residue.
        #[arg(long)]
        r: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        json: bool,
    },
    /// Histogram of gcd(det[A|x], det[A|y]) for n x (n-1) matrices A.
    McGcdDet {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        gmax: u64,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Table of f_n(g), D_n(g), f(g) and D(g) for g = 1..gmax.
    Dist {
        /// Finite dimension; omit for the limit columns only.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 10)]
        gmax: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct Sampling {
    /// Center of the cube, row-major (defaults to zeros).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    center: Vec<i64>,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl Sampling {
    fn config(&self, n: usize, m: usize, bound: u64) -> SampleConfig {
        SampleConfig::new(n, m, bound, self.samples, self.seed)
            .with_center(self.center.clone())
            .with_workers(self.workers)
    }
}

enum CliError {
    Param(String),
    Io(String),
}

impl From<hermite_density::Error> for CliError {
    fn from(e: hermite_density::Error) -> Self {
        CliError::Param(e.to_string())
    }
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first) and runs the subcommand.
///
/// Returns the exit code: 0 on success, 1 on parameter and domain errors,
/// 2 on I/O errors.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    let result = dispatch(cli.command).and_then(|out| {
        stdout
            .write_all(out.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))
    });
    match result {
        Ok(()) => 0,
        Err(CliError::Param(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(CliError::Io(msg)) => {
            let _ = writeln!(stderr, "I/O error: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<String> {
    match cmd {
        Command::Hnf { input, json } => cmd_hnf(input.as_deref(), json),
        Command::PredictDiag {
            n,
            m,
            pattern,
            tol,
            json,
        } => {
            let v = diag_density(n, m.unwrap_or(n), &pattern, tol)?;
            Ok(density_output(&v, json))
        }
        Command::PredictShape {
            kind,
            n,
            s,
            tol,
            json,
        } => {
            let v = lattice_shape_density(kind, n, s, tol)?;
            Ok(density_output(&v, json))
        }
        Command::McDiag {
            n,
            m,
            pattern,
            bound,
            sampling,
            json,
        } => {
            let cfg = sampling.config(n, m.unwrap_or(n), bound);
            let rep = run_diag_experiment(&cfg, &pattern)?;
            Ok(if json {
                to_json(&rep)
            } else {
                report_table(&[rep])
            })
        }
        Command::McResidue {
            n,
            pattern,
            d,
            r,
            bound,
            sampling,
            json,
        } => {
            let cfg = sampling.config(n, n, bound);
            let mut reps = run_residue_experiment(&cfg, &pattern, d)?;
            if let Some(r) = r {
                if r >= d {
                    return Err(CliError::Param(format!(
                        "residue {r} must be below d = {d}"
                    )));
                }
                reps.retain(|rep| rep.r == Some(r));
            }
            Ok(if json {
                to_json(&reps)
            } else {
                report_table(&reps)
            })
        }
        Command::McGcdDet {
            n,
            gmax,
            bound,
            sampling,
            csv,
            json,
        } => {
            let cfg = sampling.config(n, n.saturating_sub(1), bound);
            let rep = run_gcd_det_experiment(&cfg, gmax)?;
            if let Some(path) = &csv {
                std::fs::write(path, rep.to_csv()).map_err(io_err(path))?;
            }
            if json {
                return Ok(to_json(&rep));
            }
            let mut out = format!(
                "n {} bound {} samples {} seed {}\n{:>6} {:>8} {:>14} {:>14} {:>14}\n",
                rep.n,
                rep.bound,
                rep.samples,
                rep.seed,
                "g",
                "count",
                "empirical",
                "predicted_dn",
                "predicted_dlimit"
            );
            for g in 1..=rep.gmax {
                let key = g.to_string();
                let _ = writeln!(
                    out,
                    "{g:>6} {:>8} {:>14} {:>14} {:>14}",
                    rep.counts[&key],
                    fmt12(rep.empirical[&key]),
                    fmt12(rep.predicted_dn[&key]),
                    fmt12(rep.predicted_dlimit[&key]),
                );
            }
            let _ = writeln!(out, "tail_mass {}", fmt12(rep.tail_mass));
            let _ = writeln!(out, "undefined_mass {}", fmt12(rep.undefined_mass));
            Ok(out)
        }
        Command::Dist {
            n,
            gmax,
            tol,
            csv,
            json,
        } => cmd_dist(n, gmax, tol, csv.as_deref(), json),
    }
}

fn read_matrix(input: Option<&Path>) -> CliResult<IntMatrix> {
    let text = match input {
        Some(path) => std::fs::read_to_string(path).map_err(io_err(path))?,
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
            s
        }
    };
    Ok(text.parse()?)
}

fn cmd_hnf(input: Option<&Path>, json: bool) -> CliResult<String> {
    let a = read_matrix(input)?;
    let res = hnf(&a);
    if json {
        let v = json!({
            "h": matrix_json(&res.h),
            "u": matrix_json(&res.u),
            "pivot_cols": res.pivot_cols,
            "pivots": res.pivots.iter().map(int_json).collect::<Vec<_>>(),
            "rank": res.rank,
        });
        return Ok(format!("{v:#}\n"));
    }
    let join = |xs: Vec<String>| xs.join(" ");
    Ok(format!(
        "H\n{}\nU\n{}\nrank {}\npivot_cols {}\npivots {}\n",
        res.h.to_string().trim_end(),
        res.u.to_string().trim_end(),
        res.rank,
        join(res.pivot_cols.iter().map(|c| c.to_string()).collect()),
        join(res.pivots.iter().map(|p| p.to_string()).collect()),
    ))
}

/// Integers that fit in `i64` become JSON numbers, larger ones strings.
fn int_json(x: &num_bigint::BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(int_json).collect()))
            .collect(),
    )
}

fn density_output(v: &DensityValue, json: bool) -> String {
    if json {
        return to_json(v);
    }
    let factors: Vec<String> = v
        .pivot_factors
        .iter()
        .map(|(d, e)| format!("{d}^{e}"))
        .collect();
    let zetas: Vec<String> = v.zeta_args.iter().map(|s| format!("zeta({s})")).collect();
    let mut out = format!(
        "density {}\nerror_bound {:e}\n",
        fmt12(v.value),
        v.error_bound
    );
    if !zetas.is_empty() {
        let _ = writeln!(
            out,
            "denominator {} * {}",
            zetas.join(" * "),
            factors.join(" * ")
        );
    }
    if v.heuristic {
        out.push_str("heuristic estimate\n");
    }
    out
}

fn report_table(reps: &[ExperimentReport]) -> String {
    let mut out = String::new();
    if let Some(first) = reps.first() {
        let _ = writeln!(
            out,
            "n {} m {} bound {} samples {} seed {} workers {}",
            first.n, first.m, first.bound, first.samples, first.seed, first.workers
        );
    }
    let _ = writeln!(
        out,
        "{:>12} {:>8} {:>10} {:>14} {:>14} {:>14} {:>14}",
        "event", "trials", "hits", "empirical", "predicted", "abs_error", "stderr"
    );
    for rep in reps {
        let event = match (&rep.pattern, rep.r, rep.d) {
            (_, Some(r), Some(d)) => format!("{r} mod {d}"),
            (Some(p), ..) => format!("{p:?}"),
            _ => String::new(),
        };
        let opt = |x: Option<f64>| x.map_or("-".to_string(), fmt12);
        let _ = writeln!(
            out,
            "{event:>12} {:>8} {:>10} {:>14} {:>14} {:>14} {:>14}",
            rep.trials,
            rep.hits,
            fmt12(rep.empirical),
            opt(rep.predicted),
            opt(rep.abs_error),
            fmt12(rep.stderr),
        );
    }
    out
}

fn cmd_dist(
    n: Option<u32>,
    gmax: u64,
    tol: f64,
    csv: Option<&Path>,
    json: bool,
) -> CliResult<String> {
    if gmax == 0 {
        return Err(CliError::Param("gmax must be >= 1".into()));
    }
    let mut rows = Vec::new();
    for g in 1..=gmax {
        let mut row = serde_json::Map::new();
        row.insert("g".into(), json!(g));
        if let Some(n) = n {
            row.insert("f_n".into(), json!(f_n_at(n, g)?.to_string()));
            row.insert("d_n".into(), json!(d_n_at(n, g, tol)?));
        }
        row.insert(
            "f".into(),
            json!(f_limit_at(g, DEFAULT_LIMIT_TOL)?.to_string()),
        );
        row.insert("d_limit".into(), json!(d_limit_at(g, tol)?));
        rows.push(Value::Object(row));
    }
    let columns: Vec<&str> = if n.is_some() {
        vec!["g", "f_n", "d_n", "f", "d_limit"]
    } else {
        vec!["g", "f", "d_limit"]
    };
    let cell = |v: &Value| match v {
        Value::String(s) => s.clone(),
        Value::Number(x) if x.is_f64() => fmt12(x.as_f64().unwrap_or(f64::NAN)),
        other => other.to_string(),
    };
    if let Some(path) = csv {
        let mut text = columns.join(",") + "\n";
        for row in &rows {
            let cells: Vec<String> = columns.iter().map(|c| cell(&row[*c])).collect();
            text += &(cells.join(",") + "\n");
        }
        std::fs::write(path, text).map_err(io_err(path))?;
    }
    if json {
        return Ok(to_json(&json!({ "n": n, "gmax": gmax, "rows": rows })));
    }
    let mut out = String::new();
    for c in &columns {
        let _ = write!(out, "{c:>16}");
    }
    out.push('\n');
    for row in &rows {
        for c in &columns {
            let _ = write!(out, "{:>16}", cell(&row[*c]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Pretty JSON with every float rounded to 12 significant digits.
fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("reports serialize");
    round_floats(&mut v);
    format!("{v:#}\n")
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(x) if x.is_f64() => {
            if let Some(n) = x
                .as_f64()
                .and_then(|f| serde_json::Number::from_f64(round12(f)))
            {
                *x = n;
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}
