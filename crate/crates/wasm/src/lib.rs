//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes plain numbers or strings and returns a JSON string.
//! The `*_json` functions are the same operations without the JS error type,
//! so they can be tested natively.

use hermite_density::arith::{d_limit_at, d_n_at, f_limit_at, f_n_at, DEFAULT_LIMIT_TOL};
use hermite_density::density::{admissible, diag_density};
use hermite_density::montecarlo::{round12, run_diag_experiment};
use hermite_density::zeta::DEFAULT_TOL;
use hermite_density::{hnf, DiagPattern, IntMatrix, SampleConfig};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest sample count the page may request in one call.
pub const MAX_SAMPLES: u64 = 200_000;

/// Largest `gmax` for the distribution table.
pub const MAX_GMAX: u64 = 500;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn matrix_rows(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|x| json!(x.to_string())).collect()))
            .collect(),
    )
}

/// HNF of a matrix in the text format (`"n m"` then one row per line).
/// Entries are returned as decimal strings.
pub fn hnf_json(text: &str) -> Result<String, String> {
    let a: IntMatrix = text.parse().map_err(err)?;
    let res = hnf(&a);
    Ok(json!({
        "h": matrix_rows(&res.h),
        "u": matrix_rows(&res.u),
        "pivot_cols": res.pivot_cols,
        "pivots": res.pivots.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "rank": res.rank,
    })
    .to_string())
}

/// Predicted density of a diagonal pattern and, when `samples > 0`, a seeded
/// single-threaded Monte Carlo estimate next to it.
pub fn diag_json(
    n: usize,
    m: usize,
    pattern: &str,
    samples: u64,
    bound: u64,
    seed: u64,
) -> Result<String, String> {
    let pattern: DiagPattern = pattern.parse().map_err(err)?;
    if samples > MAX_SAMPLES {
        return Err(format!("at most {MAX_SAMPLES} samples per run"));
    }
    let predicted = if admissible(n, m, pattern.len()) {
        Some(round12(
            diag_density(n, m, &pattern, DEFAULT_TOL)
                .map_err(err)?
                .value,
        ))
    } else {
        None
    };
    let experiment = if samples > 0 {
        let cfg = SampleConfig::new(n, m, bound, samples, seed);
        let rep = run_diag_experiment(&cfg, &pattern).map_err(err)?;
        json!({
            "samples": rep.samples,
            "hits": rep.hits,
            "empirical": round12(rep.empirical),
            "stderr": round12(rep.stderr),
            "bound": rep.bound,
            "seed": rep.seed,
        })
    } else {
        Value::Null
    };
    Ok(json!({
        "n": n,
        "m": m,
        "pattern": pattern.values(),
        "predicted": predicted,
        "experiment": experiment,
    })
    .to_string())
}

/// Rows `g, f_n(g), D_n(g), f(g), D(g)` for `g = 1..=gmax`.
pub fn distribution_json(n: u32, gmax: u64) -> Result<String, String> {
    if !(1..=MAX_GMAX).contains(&gmax) {
        return Err(format!("gmax must be in 1..={MAX_GMAX}"));
    }
    let mut rows = Vec::with_capacity(gmax as usize);
    for g in 1..=gmax {
        rows.push(json!({
            "g": g,
            "f_n": f_n_at(n, g).map_err(err)?.to_string(),
            "d_n": round12(d_n_at(n, g, DEFAULT_TOL).map_err(err)?),
            "f": f_limit_at(g, DEFAULT_LIMIT_TOL).map_err(err)?.to_string(),
            "d_limit": round12(d_limit_at(g, DEFAULT_TOL).map_err(err)?),
        }));
    }
    Ok(json!({ "n": n, "gmax": gmax, "rows": rows }).to_string())
}

#[wasm_bindgen(js_name = hnf)]
pub fn hnf_js(text: &str) -> Result<String, JsError> {
    hnf_json(text).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = diagPattern)]
pub fn diag_js(
    n: usize,
    m: usize,
    pattern: &str,
    samples: u64,
    bound: u64,
    seed: u64,
) -> Result<String, JsError> {
    diag_json(n, m, pattern, samples, bound, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = gcdDistribution)]
pub fn distribution_js(n: u32, gmax: u64) -> Result<String, JsError> {
    distribution_json(n, gmax).map_err(|e| JsError::new(&e))
}
