//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; errors come back as `{"error": "..."}`.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use steane_core::experiments::{ray_crossing, run_shor, Experiment, ExperimentResult, Method, RunSettings};

const SETTINGS: RunSettings = RunSettings { degree: 2, threads: 1 };

#[derive(Serialize)]
struct Evaluated {
    label: String,
    target: String,
    polynomial: String,
    acceptance: String,
    value: f64,
}

fn evaluated(r: &ExperimentResult, p: [f64; 3]) -> Evaluated {
    Evaluated {
        label: r.label.clone(),
        target: r.target.clone(),
        polynomial: r.fidelity.to_string(),
        acceptance: r.acceptance.to_string(),
        value: r.fidelity.eval(p[0], p[1], p[2]),
    }
}

fn to_json<T: Serialize>(r: steane_core::Result<T>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| json!({ "error": e.to_string() }).to_string()),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn check_p(px: f64, py: f64, pz: f64) -> steane_core::Result<[f64; 3]> {
    let p = [px, py, pz];
    if p.iter().any(|v| !(0.0..=1.0).contains(v)) || px + py + pz > 1.0 {
        return Err(steane_core::Error::Invalid("probabilities must lie in [0, 1] and sum to at most 1".into()));
    }
    Ok(p)
}

/// Shor-state fidelity polynomial with `verifications` checks, evaluated at `(px, py, pz)`.
#[wasm_bindgen]
pub fn shor_fidelity(verifications: u32, px: f64, py: f64, pz: f64) -> String {
    to_json(check_p(px, py, pz).and_then(|p| Ok(evaluated(&run_shor(verifications as usize, SETTINGS)?, p))))
}

/// Gate-sequence encoding: seven-qubit and decoded-qubit fidelities at `(px, py, pz)`,
/// optionally after noiseless error correction.
#[wasm_bindgen]
pub fn gate_sequence(perfect_ec: bool, px: f64, py: f64, pz: f64) -> String {
    to_json(check_p(px, py, pz).and_then(|p| {
        let r = Experiment::encoding(Method::Gates, perfect_ec).run(SETTINGS)?;
        Ok(r.iter().map(|x| evaluated(x, p)).collect::<Vec<_>>())
    }))
}

#[derive(Serialize)]
struct Radii {
    verifications: usize,
    uniform: Option<f64>,
    z_axis: Option<f64>,
    x_axis: Option<f64>,
}

/// Error probability at which each Shor-state fidelity first drops to `level`,
/// along the uniform ray and the pure-z and pure-x axes.
#[wasm_bindgen]
pub fn contour_radii(level: f64) -> String {
    to_json((0..=2).map(|v| {
        let f = run_shor(v, SETTINGS)?.fidelity;
        Ok(Radii {
            verifications: v,
            uniform: ray_crossing(&f, [1.0, 1.0, 1.0], level, 0.05),
            z_axis: ray_crossing(&f, [0.0, 0.0, 1.0], level, 0.05),
            x_axis: ray_crossing(&f, [1.0, 0.0, 0.0], level, 0.05),
        })
    })
    .collect::<steane_core::Result<Vec<_>>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn shor_matches_polynomial() {
        let v: Value = serde_json::from_str(&shor_fidelity(0, 1e-3, 1e-3, 1e-3)).unwrap();
        assert!(v["polynomial"].as_str().unwrap().starts_with("1 - 6*px"));
        assert!((v["value"].as_f64().unwrap() - (1.0 - 18e-3 + 152e-6)).abs() < 1e-12);
    }

    #[test]
    fn invalid_input_reports_error() {
        let v: Value = serde_json::from_str(&shor_fidelity(5, 0.0, 0.0, 0.0)).unwrap();
        assert!(v["error"].is_string());
        let v: Value = serde_json::from_str(&shor_fidelity(0, -0.1, 0.0, 0.0)).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn gate_sequence_returns_both_measures() {
        let v: Value = serde_json::from_str(&gate_sequence(false, 0.0, 0.0, 0.0)).unwrap();
        let a = v.as_array().unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0]["value"].as_f64(), Some(1.0));
    }

    #[test]
    fn radii_ordering() {
        let v: Value = serde_json::from_str(&contour_radii(0.99)).unwrap();
        let z: Vec<f64> = (0..3).map(|i| v[i]["z_axis"].as_f64().unwrap()).collect();
        assert!(z[0] > z[1] && z[1] > z[2]);
    }
}
