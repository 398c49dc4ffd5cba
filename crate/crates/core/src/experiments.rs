//! Fidelity experiments: exhaustive fault-path sums turned into polynomials.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    build_ft_encoder, build_gate_sequence_encoder, build_shor_prep, perfect_decoder_gates, NoisyCircuit,
};
use crate::engine::{with_threads, CompiledCircuit, Evaluation, Tally, Target};
use crate::error::{Error, Result};
use crate::pauli::PauliOperator;
use crate::polynomial::{ErrorPolynomial, Monomial, PolyTerm, Var};
use crate::stabilizer::SignedPauli;
use crate::steane::SteaneCode;

/// Run-wide settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunSettings {
    /// Truncation order.
    pub degree: u32,
    /// Worker threads; `0` lets rayon decide.
    pub threads: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            degree: crate::polynomial::DEFAULT_DEGREE,
            threads: 0,
        }
    }
}

impl RunSettings {
    pub fn with_degree(degree: u32) -> Self {
        RunSettings {
            degree,
            ..Default::default()
        }
    }
}

/// Acceptance and fidelity polynomials of one experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentResult {
    pub label: String,
    pub target: String,
    pub degree: u32,
    pub slots: usize,
    /// Fault paths of order `≤ degree`, including those rejected by post-selection.
    pub paths: u64,
    /// Probability that every post-selection succeeds.
    pub acceptance: ErrorPolynomial,
    /// `Σ weight · branch probability · target value`, not yet conditioned.
    pub fidelity_raw: ErrorPolynomial,
    /// `fidelity_raw / acceptance`, expanded to `degree`.
    pub fidelity: ErrorPolynomial,
    #[serde(skip)]
    pub wall_clock: Duration,
}

#[derive(Deserialize)]
struct ResultRecord {
    label: String,
    target: String,
    degree: u32,
    slots: usize,
    paths: u64,
    acceptance: Vec<PolyTerm>,
    fidelity_raw: Vec<PolyTerm>,
    fidelity: Vec<PolyTerm>,
}

impl ExperimentResult {
    /// Parses the JSON produced by serializing an [`ExperimentResult`].
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let r: ResultRecord = serde_json::from_value(value.clone())
            .map_err(|e| Error::Invalid(format!("not an experiment result: {e}")))?;
        Ok(ExperimentResult {
            acceptance: ErrorPolynomial::from_json_terms(&r.acceptance, r.degree)?,
            fidelity_raw: ErrorPolynomial::from_json_terms(&r.fidelity_raw, r.degree)?,
            fidelity: ErrorPolynomial::from_json_terms(&r.fidelity, r.degree)?,
            label: r.label,
            target: r.target,
            degree: r.degree,
            slots: r.slots,
            paths: r.paths,
            wall_clock: Duration::ZERO,
        })
    }
}

/// Turns tallied path contributions into polynomials, one result per target.
fn results_from_tally(
    label: &str,
    tally: &Tally,
    eval: &Evaluation,
    n_slots: usize,
    degree: u32,
    wall_clock: Duration,
) -> Result<Vec<ExperimentResult>> {
    let p0 = ErrorPolynomial::p_identity(degree);
    let mut acceptance = ErrorPolynomial::zero(degree);
    let mut raw = vec![ErrorPolynomial::zero(degree); eval.targets.len()];
    for (counts, entry) in &tally.entries {
        let k: u32 = counts.iter().sum();
        let weight = p0.pow(n_slots as u32 - k);
        let mono = Monomial(*counts);
        acceptance = &acceptance + &weight.mul_monomial(mono, &entry.acceptance.to_rational());
        for (acc, sum) in raw.iter_mut().zip(&entry.fidelity) {
            let c: BigRational = sum.to_rational();
            if !c.is_zero() {
                *acc = &*acc + &weight.mul_monomial(mono, &c);
            }
        }
    }
    if acceptance.constant_term().is_zero() {
        return Err(Error::ExperimentDegenerate);
    }
    let inv = acceptance.reciprocal()?;
    Ok(eval
        .targets
        .iter()
        .zip(raw)
        .map(|(t, fidelity_raw)| ExperimentResult {
            label: label.to_string(),
            target: t.label().to_string(),
            degree,
            slots: n_slots,
            paths: tally.paths,
            acceptance: acceptance.clone(),
            fidelity: &fidelity_raw * &inv,
            fidelity_raw,
            wall_clock,
        })
        .collect())
}

/// Enumerates every fault path of `circuit` up to the truncation order and
/// scores accepted paths with `eval`. Returns one result per target.
pub fn run_conditional(
    label: &str,
    circuit: &NoisyCircuit,
    eval: &Evaluation,
    settings: RunSettings,
) -> Result<Vec<ExperimentResult>> {
    let start = Instant::now();
    let compiled = CompiledCircuit::new(circuit)?;
    let tally = with_threads(settings.threads, || compiled.enumerate(eval, settings.degree))?;
    results_from_tally(
        label,
        &tally,
        eval,
        compiled.n_slots(),
        settings.degree,
        start.elapsed(),
    )
}

/// GHZ target `{XXXX, ZZII, IZZI, IIZZ}` on qubits 0..4 of an `n`-qubit register.
pub fn ghz_target(n: usize) -> Target {
    let mut gens = Vec::with_capacity(4);
    let mut xs = PauliOperator::identity(n);
    for q in 0..4 {
        xs.set(q, crate::pauli::Pauli::X).expect("register has 4 Shor qubits");
    }
    gens.push(SignedPauli::plus(xs));
    for q in 0..3 {
        let zz = PauliOperator::on_qubits(n, &[q, q + 1], crate::pauli::Pauli::Z)
            .expect("register has 4 Shor qubits");
        gens.push(SignedPauli::plus(zz));
    }
    Target::Stabilizer {
        label: "ghz4".into(),
        generators: gens,
    }
}

/// `|0_L⟩` on data qubits 0..7.
pub fn zero_l_target(n: usize) -> Target {
    Target::Stabilizer {
        label: "zero_l".into(),
        generators: SteaneCode::zero_l_generators(n),
    }
}

/// Qubit 0 reads `|0⟩` after the perfect decoder.
pub fn decoded_target() -> Target {
    Target::DecodedZero {
        label: "decoded_qubit".into(),
        decoder: perfect_decoder_gates(),
        qubit: 0,
    }
}

/// A reproducible experiment: circuit plus evaluation targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    /// Shor-state preparation; target: the four-qubit GHZ state.
    Shor { verifications: usize },
    /// `|0_L⟩` encoding; targets: the seven-qubit state and the decoded qubit.
    Encoding {
        method: Method,
        verifications: usize,
        repeats: usize,
        perfect_ec: bool,
    },
}

impl Experiment {
    pub fn shor(verifications: usize) -> Self {
        Experiment::Shor { verifications }
    }

    /// Encoding with the default FT parameters (2 verifications, 2 repeats).
    pub fn encoding(method: Method, perfect_ec: bool) -> Self {
        Experiment::Encoding {
            method,
            verifications: 2,
            repeats: 2,
            perfect_ec,
        }
    }

    /// Stable identifier, e.g. `shor_v2`, `ft_v2_r2_ec`, `gates`.
    pub fn label(&self) -> String {
        match *self {
            Experiment::Shor { verifications } => format!("shor_v{verifications}"),
            Experiment::Encoding {
                method,
                verifications,
                repeats,
                perfect_ec,
            } => {
                let base = match method {
                    Method::Ft => format!("ft_v{verifications}_r{repeats}"),
                    Method::Gates => "gates".to_string(),
                };
                if perfect_ec {
                    format!("{base}_ec")
                } else {
                    base
                }
            }
        }
    }

    /// Inverse of [`Experiment::label`].
    pub fn from_label(label: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("unknown experiment label {label:?}"));
        let (body, perfect_ec) = match label.strip_suffix("_ec") {
            Some(b) => (b, true),
            None => (label, false),
        };
        if let Some(v) = body.strip_prefix("shor_v") {
            if perfect_ec {
                return Err(bad());
            }
            return Ok(Experiment::shor(v.parse().map_err(|_| bad())?));
        }
        if body == "gates" {
            return Ok(Experiment::encoding(Method::Gates, perfect_ec));
        }
        let rest = body.strip_prefix("ft_v").ok_or_else(bad)?;
        let (v, r) = rest.split_once("_r").ok_or_else(bad)?;
        Ok(Experiment::Encoding {
            method: Method::Ft,
            verifications: v.parse().map_err(|_| bad())?,
            repeats: r.parse().map_err(|_| bad())?,
            perfect_ec,
        })
    }

    pub fn circuit(&self) -> Result<NoisyCircuit> {
        match *self {
            Experiment::Shor { verifications } => build_shor_prep(verifications),
            Experiment::Encoding {
                method: Method::Ft,
                verifications,
                repeats,
                ..
            } => build_ft_encoder(verifications, repeats),
            Experiment::Encoding {
                method: Method::Gates,
                ..
            } => Ok(build_gate_sequence_encoder()),
        }
    }

    /// Evaluation for a circuit on `n` qubits.
    pub fn evaluation(&self, n: usize) -> Evaluation {
        match *self {
            Experiment::Shor { .. } => Evaluation {
                perfect_ec: false,
                targets: vec![ghz_target(n)],
            },
            Experiment::Encoding { perfect_ec, .. } => Evaluation {
                perfect_ec,
                targets: vec![zero_l_target(n), decoded_target()],
            },
        }
    }

    /// One result per target.
    pub fn run(&self, settings: RunSettings) -> Result<Vec<ExperimentResult>> {
        let c = self.circuit()?;
        run_conditional(&self.label(), &c, &self.evaluation(c.n_qubits), settings)
    }
}

/// Shor-state fidelity with 0, 1 or 2 verifications.
pub fn run_shor(verifications: usize, settings: RunSettings) -> Result<ExperimentResult> {
    Ok(Experiment::shor(verifications).run(settings)?.remove(0))
}

/// Pass probability of each Shor verification, conditioned on all earlier ones
/// passing. Entry `i` is the acceptance of check `i + 1`.
pub fn shor_check_acceptances(settings: RunSettings) -> Result<Vec<ErrorPolynomial>> {
    let mut out = Vec::new();
    let mut previous = ErrorPolynomial::one(settings.degree);
    for v in 1..=2 {
        let total = run_shor(v, settings)?.acceptance;
        out.push(&total * &previous.reciprocal()?);
        previous = total;
    }
    Ok(out)
}

/// Encoding method for `|0_L⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Repeated X-type syndrome measurement with verified Shor states.
    Ft,
    /// Direct encoding gate sequence.
    Gates,
}

/// Seven-qubit and decoded single-qubit fidelities of an encoding run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EncodingResult {
    pub seven: ExperimentResult,
    pub single: ExperimentResult,
}

/// Runs an encoding experiment against both fidelity measures.
pub fn run_encoding(experiment: Experiment, settings: RunSettings) -> Result<EncodingResult> {
    if !matches!(experiment, Experiment::Encoding { .. }) {
        return Err(Error::Invalid(format!("{} is not an encoding", experiment.label())));
    }
    let mut r = experiment.run(settings)?;
    let single = r.pop().expect("two targets");
    let seven = r.pop().expect("two targets");
    Ok(EncodingResult { seven, single })
}

pub fn run_ft_encoding(settings: RunSettings) -> Result<EncodingResult> {
    run_encoding(Experiment::encoding(Method::Ft, false), settings)
}

pub fn run_gate_sequence(settings: RunSettings) -> Result<EncodingResult> {
    run_encoding(Experiment::encoding(Method::Gates, false), settings)
}

pub fn run_with_perfect_ec(method: Method, settings: RunSettings) -> Result<EncodingResult> {
    run_encoding(Experiment::encoding(method, true), settings)
}

/// Evenly spaced grid axis `[min, max]` with `steps` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Axis { min, max, steps }
    }

    pub fn points(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Grid for a contour sweep: `p_x` and `p_y` cells, and the `p_z` search range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepGrid {
    pub px: Axis,
    pub py: Axis,
    pub pz_max: f64,
    /// Bracketing resolution along `p_z`.
    pub pz_steps: usize,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            px: Axis::new(0.0, 2e-3, 21),
            py: Axis::new(0.0, 2e-3, 21),
            pz_max: 2e-3,
            pz_steps: 200,
        }
    }
}

/// First root of `f(t) = level` on `[0, t_max]`, found by scanning `steps`
/// brackets and bisecting the first sign change.
fn first_crossing(f: impl Fn(f64) -> f64, level: f64, t_max: f64, steps: usize) -> Option<f64> {
    let g = |t: f64| f(t) - level;
    let g0 = g(0.0);
    if g0 == 0.0 {
        return Some(0.0);
    }
    let steps = steps.max(1);
    let mut lo = 0.0;
    let mut glo = g0;
    for i in 1..=steps {
        let hi = t_max * i as f64 / steps as f64;
        let ghi = g(hi);
        if ghi == 0.0 {
            return Some(hi);
        }
        if (glo < 0.0) != (ghi < 0.0) {
            let (mut a, mut b, mut ga) = (lo, hi, glo);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let gm = g(m);
                if gm == 0.0 || b - a <= f64::EPSILON * b.abs().max(1e-300) {
                    return Some(m);
                }
                if (ga < 0.0) != (gm < 0.0) {
                    b = m;
                } else {
                    a = m;
                    ga = gm;
                }
            }
            return Some(0.5 * (a + b));
        }
        lo = hi;
        glo = ghi;
    }
    None
}

/// Points `(p_x, p_y, p_z)` where `fidelity = level`: one per grid cell that has
/// a crossing along `p_z ∈ [0, pz_max]`.
pub fn contour_sweep(poly: &ErrorPolynomial, grid: &SweepGrid, level: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for px in grid.px.points() {
        for py in grid.py.points() {
            let root = first_crossing(|pz| poly.eval(px, py, pz), level, grid.pz_max, grid.pz_steps);
            if let Some(pz) = root {
                out.push([px, py, pz]);
            }
        }
    }
    out
}

/// Distance parameter `t` along `direction` where `fidelity(t · direction) = level`.
pub fn ray_crossing(poly: &ErrorPolynomial, direction: [f64; 3], level: f64, t_max: f64) -> Option<f64> {
    first_crossing(
        |t| poly.eval(t * direction[0], t * direction[1], t * direction[2]),
        level,
        t_max,
        1000,
    )
}

/// CSV with header `px,py,pz`.
pub fn contour_csv(points: &[[f64; 3]]) -> String {
    let mut s = String::from("px,py,pz\n");
    for p in points {
        s.push_str(&format!("{:e},{:e},{:e}\n", p[0], p[1], p[2]));
    }
    s
}

/// Checks the x↔y exchange symmetry of a polynomial.
pub fn is_xy_symmetric(p: &ErrorPolynomial) -> bool {
    p.swap_vars(Var::X, Var::Y) == *p
}

#[cfg(test)]
mod tests {
    #[test]
    fn labels_round_trip() {
        for e in [
            Experiment::shor(0),
            Experiment::shor(2),
            Experiment::encoding(Method::Ft, false),
            Experiment::encoding(Method::Ft, true),
            Experiment::encoding(Method::Gates, false),
            Experiment::encoding(Method::Gates, true),
            Experiment::Encoding {
                method: Method::Ft,
                verifications: 1,
                repeats: 3,
                perfect_ec: false,
            },
        ] {
            assert_eq!(Experiment::from_label(&e.label()).unwrap(), e);
        }
        for bad in ["", "shor_v", "shor_v1_ec", "ft_v2", "gates_x", "ft_vx_r1"] {
            assert!(Experiment::from_label(bad).is_err(), "{bad}");
        }
    }

    use super::*;

    fn poly(terms: &[([u32; 3], i64)]) -> ErrorPolynomial {
        ErrorPolynomial::from_int_terms(terms.iter().copied(), 2)
    }

    #[test]
    fn ray_root_matches_quadratic_formula() {
        // 1 - 18p + 152p² on the uniform ray.
        let f = poly(&[
            ([0, 0, 0], 1),
            ([1, 0, 0], -6),
            ([0, 1, 0], -6),
            ([0, 0, 1], -6),
            ([2, 0, 0], 16),
            ([1, 1, 0], 30),
            ([1, 0, 1], 30),
            ([0, 2, 0], 16),
            ([0, 1, 1], 30),
            ([0, 0, 2], 30),
        ]);
        let t = ray_crossing(&f, [1.0, 1.0, 1.0], 0.99, 1e-2).unwrap();
        let want = (18.0 - (18.0f64 * 18.0 - 4.0 * 152.0 * 0.01).sqrt()) / (2.0 * 152.0);
        assert!((t - want).abs() < 1e-12, "{t} vs {want}");
        assert!((t - 5.5819e-4).abs() < 1e-7);
    }

    #[test]
    fn pure_z_axis_root() {
        let f = poly(&[([0, 0, 0], 1), ([0, 0, 1], -12), ([0, 0, 2], 132)]);
        let pts = contour_sweep(
            &f,
            &SweepGrid {
                px: Axis::new(0.0, 0.0, 1),
                py: Axis::new(0.0, 0.0, 1),
                pz_max: 2e-3,
                pz_steps: 100,
            },
            0.99,
        );
        assert_eq!(pts.len(), 1);
        let want = (12.0 - (144.0f64 - 4.0 * 132.0 * 0.01).sqrt()) / 264.0;
        assert!((pts[0][2] - want).abs() < 1e-12);
        assert!((pts[0][2] - 8.411e-4).abs() < 1e-7);
    }

    #[test]
    fn level_one_at_origin() {
        let f = poly(&[([0, 0, 0], 1), ([1, 0, 0], -3)]);
        let grid = SweepGrid {
            px: Axis::new(0.0, 0.0, 1),
            py: Axis::new(0.0, 0.0, 1),
            pz_max: 1e-3,
            pz_steps: 10,
        };
        assert_eq!(contour_sweep(&f, &grid, 1.0), vec![[0.0, 0.0, 0.0]]);
    }

    #[test]
    fn cells_without_crossing_are_skipped() {
        let f = ErrorPolynomial::one(2);
        assert!(contour_sweep(&f, &SweepGrid::default(), 0.99).is_empty());
    }

    #[test]
    fn csv_has_header() {
        let s = contour_csv(&[[0.0, 1e-4, 2e-4]]);
        assert!(s.starts_with("px,py,pz\n"));
        assert_eq!(s.lines().count(), 2);
    }
}
