//! Independent numeric checks of the fidelity polynomials.
//!
//! * [`dense_run`] applies every noisy gate as an explicit Kraus channel to a
//!   dense density matrix and projects at each post-selection. It shares no
//!   code with the stabilizer engine beyond the circuit description.
//! * [`mc_run`] samples fault assignments at fixed error probabilities and
//!   replays them on the stabilizer engine. Post-selection is handled by
//!   weighting each sample with the probability of the kept branch, which
//!   keeps circuits with many random syndrome outcomes tractable.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Gate, NoisyCircuit, Step};
use crate::engine::{with_threads, CompiledCircuit, Evaluation, PathOutcome, Target};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};
use crate::polynomial::ErrorPolynomial;
use crate::stabilizer::{Basis, SignedPauli};
use crate::steane::SteaneCode;

/// Largest register the dense oracle accepts.
pub const DENSE_MAX_QUBITS: usize = 8;

/// Density matrix on `n ≤ 8` qubits; qubit `q` is bit `q` of the basis index.
#[derive(Clone, Debug)]
pub struct DenseState {
    n: usize,
    dim: usize,
    rho: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A Pauli string acting as `P|a⟩ = phase(a) |a ⊕ flip⟩`.
#[derive(Clone, Copy, Debug)]
struct PauliAction {
    flip: usize,
    zmask: usize,
    /// Power of `i` from the Y factors.
    ipow: u32,
}

impl PauliAction {
    fn single(q: usize, p: Pauli) -> Self {
        let (x, z) = p.bits();
        PauliAction {
            flip: (x as usize) << q,
            zmask: (z as usize) << q,
            ipow: (x && z) as u32,
        }
    }

    fn from_operator(p: &PauliOperator) -> Self {
        let mut a = PauliAction {
            flip: 0,
            zmask: 0,
            ipow: 0,
        };
        for q in 0..p.num_qubits() {
            let s = Self::single(q, p.get(q));
            a.flip |= s.flip;
            a.zmask |= s.zmask;
            a.ipow += s.ipow;
        }
        a
    }

    fn phase(&self, a: usize) -> Complex64 {
        let sign = if (a & self.zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        let ip = match self.ipow % 4 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
        ip * sign
    }
}

impl DenseState {
    /// `|0…0⟩⟨0…0|`.
    pub fn new(n: usize) -> Result<Self> {
        if n > DENSE_MAX_QUBITS {
            return Err(Error::CapacityExceeded {
                n,
                max: DENSE_MAX_QUBITS,
            });
        }
        let dim = 1 << n;
        let mut rho = vec![ZERO; dim * dim];
        rho[0] = ONE;
        Ok(DenseState { n, dim, rho })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|a| self.rho[a * self.dim + a].re).sum()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.rho[row * self.dim + col]
    }

    fn scale(&mut self, s: f64) {
        for v in &mut self.rho {
            *v *= s;
        }
    }

    fn add_scaled(&mut self, other: &DenseState, s: f64) {
        for (a, b) in self.rho.iter_mut().zip(&other.rho) {
            *a += b * s;
        }
    }

    /// `ρ → P ρ`.
    fn left_pauli(&self, p: PauliAction) -> DenseState {
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for a in 0..d {
            let ph = p.phase(a);
            let dst = (a ^ p.flip) * d;
            let src = a * d;
            for b in 0..d {
                out[dst + b] = ph * self.rho[src + b];
            }
        }
        DenseState {
            n: self.n,
            dim: d,
            rho: out,
        }
    }

    /// `ρ → ρ P`.
    fn right_pauli(&self, p: PauliAction) -> DenseState {
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for b in 0..d {
            // (ρP)[a][b] = ρ[a][b ⊕ flip] · phase(b ⊕ flip)
            let src = b ^ p.flip;
            let ph = p.phase(src);
            for a in 0..d {
                out[a * d + b] = self.rho[a * d + src] * ph;
            }
        }
        DenseState {
            n: self.n,
            dim: d,
            rho: out,
        }
    }

    /// `ρ → P ρ P†`.
    fn conjugate_pauli(&self, p: PauliAction) -> DenseState {
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for a in 0..d {
            let pa = p.phase(a);
            let ra = (a ^ p.flip) * d;
            for b in 0..d {
                out[ra + (b ^ p.flip)] = pa * p.phase(b).conj() * self.rho[a * d + b];
            }
        }
        DenseState {
            n: self.n,
            dim: d,
            rho: out,
        }
    }

    fn check(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange { qubit: q, n: self.n })
        }
    }

    /// Noiseless unitary gate.
    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        match *g {
            Gate::Pauli(q, p) => {
                self.check(q)?;
                *self = self.conjugate_pauli(PauliAction::single(q, p));
            }
            Gate::Cnot { control, target } => {
                self.check(control)?;
                self.check(target)?;
                if control == target {
                    return Err(Error::SameQubit(control));
                }
                let d = self.dim;
                let perm = |a: usize| a ^ (((a >> control) & 1) << target);
                let mut out = vec![ZERO; d * d];
                for a in 0..d {
                    let pa = perm(a) * d;
                    for b in 0..d {
                        out[a * d + b] = self.rho[pa + perm(b)];
                    }
                }
                self.rho = out;
            }
            Gate::H(q) => {
                self.check(q)?;
                let d = self.dim;
                let m = 1 << q;
                let h = std::f64::consts::FRAC_1_SQRT_2;
                // Rows, then columns.
                let mut tmp = vec![ZERO; d * d];
                for a in 0..d {
                    let a0 = a & !m;
                    let a1 = a | m;
                    let sign = if a & m != 0 { -1.0 } else { 1.0 };
                    for b in 0..d {
                        tmp[a * d + b] =
                            (self.rho[a0 * d + b] + self.rho[a1 * d + b] * sign) * h;
                    }
                }
                for b in 0..d {
                    let b0 = b & !m;
                    let b1 = b | m;
                    let sign = if b & m != 0 { -1.0 } else { 1.0 };
                    for a in 0..d {
                        self.rho[a * d + b] = (tmp[a * d + b0] + tmp[a * d + b1] * sign) * h;
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies the gate followed by the Kraus sum
    /// `Σ_{a,b} p_a p_b σ_a^j σ_b^k (·) σ_b^k σ_a^j` over all qubits it touches
    /// (16 terms for a CNOT, 4 for a single-qubit gate).
    pub fn apply_noisy_gate(&mut self, g: &Gate, p: [f64; 3]) -> Result<()> {
        self.apply_gate(g)?;
        let probs = [
            (Pauli::I, 1.0 - p[0] - p[1] - p[2]),
            (Pauli::X, p[0]),
            (Pauli::Y, p[1]),
            (Pauli::Z, p[2]),
        ];
        let qubits = g.qubits();
        let mut out = DenseState {
            n: self.n,
            dim: self.dim,
            rho: vec![ZERO; self.rho.len()],
        };
        let terms: Vec<Vec<(Pauli, f64)>> = qubits.iter().map(|_| probs.to_vec()).collect();
        let mut idx = vec![0usize; qubits.len()];
        loop {
            let mut weight = 1.0;
            let mut action = PauliAction {
                flip: 0,
                zmask: 0,
                ipow: 0,
            };
            for (k, &q) in qubits.iter().enumerate() {
                let (pl, w) = terms[k][idx[k]];
                weight *= w;
                let s = PauliAction::single(q, pl);
                action.flip |= s.flip;
                action.zmask |= s.zmask;
                action.ipow += s.ipow;
            }
            if weight != 0.0 {
                out.add_scaled(&self.conjugate_pauli(action), weight);
            }
            // Odometer over the 4^k Kraus labels.
            let mut k = 0;
            loop {
                if k == idx.len() {
                    *self = out;
                    return Ok(());
                }
                idx[k] += 1;
                if idx[k] < 4 {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// `ρ → Π ρ Π` with `Π = (I + s P)/2`; returns the trace of the result.
    pub fn project(&mut self, g: &SignedPauli) -> f64 {
        let p = PauliAction::from_operator(&g.pauli);
        let s = if g.negative { -1.0 } else { 1.0 };
        let mut a = self.left_pauli(p);
        a.scale(s);
        a.add_scaled(self, 1.0);
        a.scale(0.5);
        let mut b = a.right_pauli(p);
        b.scale(s);
        b.add_scaled(&a, 1.0);
        b.scale(0.5);
        *self = b;
        self.trace()
    }

    /// Probability that qubit `q` reads 0.
    pub fn prob_zero(&self, q: usize) -> f64 {
        (0..self.dim)
            .filter(|a| (a >> q) & 1 == 0)
            .map(|a| self.rho[a * self.dim + a].re)
            .sum()
    }

    /// Noiseless perfect error correction on data qubits 0..7.
    pub fn perfect_ec(&self) -> DenseState {
        let n = self.n;
        let gens: Vec<PauliOperator> = SteaneCode::x_generators(n)
            .into_iter()
            .chain(SteaneCode::z_generators(n))
            .collect();
        let mut out = DenseState {
            n,
            dim: self.dim,
            rho: vec![ZERO; self.rho.len()],
        };
        for syndrome in 0..64u32 {
            let mut branch = self.clone();
            let mut alive = true;
            for (i, g) in gens.iter().enumerate() {
                let neg = (syndrome >> i) & 1 == 1;
                let tr = branch.project(&SignedPauli {
                    pauli: g.clone(),
                    negative: neg,
                });
                if tr.abs() < 1e-300 {
                    alive = false;
                    break;
                }
            }
            if !alive {
                continue;
            }
            let bits = |o: u32| [(syndrome >> o) & 1 == 1, (syndrome >> (o + 1)) & 1 == 1, (syndrome >> (o + 2)) & 1 == 1];
            if let Some(q) = SteaneCode::lookup(bits(0)) {
                branch = branch.conjugate_pauli(PauliAction::single(q, Pauli::Z));
            }
            if let Some(q) = SteaneCode::lookup(bits(3)) {
                branch = branch.conjugate_pauli(PauliAction::single(q, Pauli::X));
            }
            out.add_scaled(&branch, 1.0);
        }
        out
    }

    /// Value of `target` on this (normalized) state.
    pub fn target_value(&self, target: &Target) -> Result<f64> {
        match target {
            Target::Stabilizer { generators, .. } => {
                let mut s = self.clone();
                for g in generators {
                    s.project(g);
                }
                Ok(s.trace())
            }
            Target::DecodedZero { decoder, qubit, .. } => {
                let mut s = self.clone();
                for g in decoder {
                    s.apply_gate(g)?;
                }
                Ok(s.prob_zero(*qubit))
            }
        }
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                worst = worst.max((self.rho[a * d + b] - self.rho[b * d + a].conj()).norm());
            }
        }
        worst
    }
}

/// Result of a dense channel simulation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenseOutcome {
    /// Probability that every post-selection succeeds.
    pub acceptance: f64,
    /// Conditional target values, one per target.
    pub fidelities: Vec<f64>,
}

/// Runs `circuit` as a sequence of quantum channels at error probabilities `p`.
pub fn dense_run(circuit: &NoisyCircuit, p: [f64; 3], eval: &Evaluation) -> Result<DenseOutcome> {
    circuit.validate()?;
    let mut s = DenseState::new(circuit.n_qubits)?;
    let mut acceptance = 1.0;
    for step in &circuit.steps {
        match *step {
            Step::Gate { gate, noisy: false } => s.apply_gate(&gate)?,
            Step::Gate { gate, noisy: true } => s.apply_noisy_gate(&gate, p)?,
            Step::Alloc { qubit, initial } => {
                if initial {
                    s.apply_gate(&Gate::Pauli(qubit, Pauli::X))?;
                }
            }
            Step::PostSelect { qubit, basis, keep } => {
                let pl = match basis {
                    Basis::Z => Pauli::Z,
                    Basis::X => Pauli::X,
                };
                let tr = s.project(&SignedPauli {
                    pauli: PauliOperator::single(s.n, qubit, pl)?,
                    negative: keep,
                });
                if tr <= 1e-12 {
                    return Err(Error::ExperimentDegenerate);
                }
                acceptance *= tr;
                s.scale(1.0 / tr);
            }
        }
    }
    if eval.perfect_ec {
        s = s.perfect_ec();
    }
    let fidelities = eval
        .targets
        .iter()
        .map(|t| s.target_value(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(DenseOutcome {
        acceptance,
        fidelities,
    })
}

/// Monte-Carlo estimate of the conditional target values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub samples: u64,
    /// Per-target ratio estimate `Σ w f / Σ w`.
    pub estimate: Vec<f64>,
    /// Delta-method standard error of each estimate.
    pub stderr: Vec<f64>,
    /// Mean acceptance weight relative to the fault-free path.
    pub mean_weight: f64,
}

#[derive(Clone, Debug, Default)]
struct McSums {
    n: u64,
    w: f64,
    ww: f64,
    wf: Vec<f64>,
    wwf: Vec<f64>,
    wwff: Vec<f64>,
}

impl McSums {
    fn new(targets: usize) -> Self {
        McSums {
            wf: vec![0.0; targets],
            wwf: vec![0.0; targets],
            wwff: vec![0.0; targets],
            ..Default::default()
        }
    }

    fn push(&mut self, w: f64, f: &[f64]) {
        self.n += 1;
        self.w += w;
        self.ww += w * w;
        for (i, &v) in f.iter().enumerate() {
            self.wf[i] += w * v;
            self.wwf[i] += w * w * v;
            self.wwff[i] += w * w * v * v;
        }
    }

    fn merge(&mut self, o: &McSums) {
        self.n += o.n;
        self.w += o.w;
        self.ww += o.ww;
        for i in 0..self.wf.len() {
            self.wf[i] += o.wf[i];
            self.wwf[i] += o.wwf[i];
            self.wwff[i] += o.wwff[i];
        }
    }
}

const MC_BLOCK: u64 = 4096;

/// Samples `samples` fault assignments (each slot independently `I/X/Y/Z` with
/// probabilities `p_0, p_x, p_y, p_z`) and replays them. Deterministic for a
/// given seed regardless of thread count.
pub fn mc_run(
    circuit: &NoisyCircuit,
    p: [f64; 3],
    eval: &Evaluation,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::Invalid("need at least one sample".into()));
    }
    let compiled = CompiledCircuit::new(circuit)?;
    let snaps = compiled.snapshots()?;
    let ideal = compiled.replay(&crate::noise::FaultPath { faults: vec![] }, eval)?;
    let n_slots = compiled.n_slots();
    let targets = eval.targets.len();
    let cum = [p[0], p[0] + p[1], p[0] + p[1] + p[2]];
    let blocks = samples.div_ceil(MC_BLOCK);
    // Exponent of the fault-free path; weights are taken relative to it.
    let base = ideal.as_ref().map_or(0, |o| o.accept);

    let value = |o: &PathOutcome| -> (f64, Vec<f64>) {
        let w = 0.5f64.powi(o.accept as i32 - base as i32);
        let f = o
            .values
            .iter()
            .map(|ks| ks.iter().map(|&k| 0.5f64.powi(k as i32)).sum())
            .collect();
        (w, f)
    };

    let per_block = with_threads(threads, || {
        (0..blocks)
            .into_par_iter()
            .map(|b| -> Result<McSums> {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b);
                let mut sums = McSums::new(targets);
                let count = MC_BLOCK.min(samples - b * MC_BLOCK);
                let mut faults = Vec::new();
                for _ in 0..count {
                    faults.clear();
                    for slot in 0..n_slots {
                        let u: f64 = rng.gen();
                        if u < cum[2] {
                            let pl = if u < cum[0] {
                                Pauli::X
                            } else if u < cum[1] {
                                Pauli::Y
                            } else {
                                Pauli::Z
                            };
                            faults.push((slot, pl));
                        }
                    }
                    let outcome = if faults.is_empty() {
                        ideal.clone()
                    } else {
                        match &snaps[faults[0].0] {
                            Some(snap) => compiled.replay_from_snapshot(snap, &faults, eval)?,
                            None => None,
                        }
                    };
                    match outcome {
                        Some(o) => {
                            let (w, f) = value(&o);
                            sums.push(w, &f);
                        }
                        None => sums.push(0.0, &vec![0.0; targets]),
                    }
                }
                Ok(sums)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut total = McSums::new(targets);
    for s in &per_block {
        total.merge(s);
    }
    if total.w <= 0.0 {
        return Err(Error::Inconclusive);
    }
    let mut estimate = Vec::with_capacity(targets);
    let mut stderr = Vec::with_capacity(targets);
    for i in 0..targets {
        let r = total.wf[i] / total.w;
        let ss = (total.wwff[i] - 2.0 * r * total.wwf[i] + r * r * total.ww).max(0.0);
        estimate.push(r);
        stderr.push(ss.sqrt() / total.w);
    }
    Ok(McEstimate {
        samples,
        estimate,
        stderr,
        mean_weight: total.w / samples as f64,
    })
}

/// Tolerance applied when comparing a polynomial against an oracle value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Tolerance {
    /// `|poly − oracle| ≤ c · (p_x + p_y + p_z)^3`, the truncation remainder bound.
    Cubic { c: f64 },
    /// `|poly − oracle| ≤ k · σ_oracle`.
    Sigma { k: f64 },
    /// Fixed absolute tolerance.
    Absolute { eps: f64 },
}

/// Default cubic-remainder constant.
pub const DEFAULT_CUBIC_C: f64 = 1e6;

/// Default arbitration grid: uniform and single-axis points at
/// `p ∈ {1e-4, 3e-4, 1e-3}`.
pub fn default_grid() -> Vec<[f64; 3]> {
    let mut g = Vec::new();
    for p in [1e-4, 3e-4, 1e-3] {
        g.push([p, p, p]);
        g.push([p, 0.0, 0.0]);
        g.push([0.0, p, 0.0]);
        g.push([0.0, 0.0, p]);
    }
    g
}

/// One oracle evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OraclePoint {
    pub p: [f64; 3],
    pub value: f64,
    /// Standard error for stochastic oracles, zero for exact ones.
    pub sigma: f64,
}

/// One row of an arbitration report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArbitrationRow {
    pub p: [f64; 3],
    pub poly_value: f64,
    pub oracle_value: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Compares `poly` with oracle values point by point.
pub fn arbitrate(poly: &ErrorPolynomial, points: &[OraclePoint], tol: Tolerance) -> Vec<ArbitrationRow> {
    points
        .iter()
        .map(|pt| {
            let poly_value = poly.eval(pt.p[0], pt.p[1], pt.p[2]);
            let bound = match tol {
                Tolerance::Cubic { c } => c * (pt.p[0] + pt.p[1] + pt.p[2]).powi(3),
                Tolerance::Sigma { k } => k * pt.sigma,
                Tolerance::Absolute { eps } => eps,
            };
            ArbitrationRow {
                p: pt.p,
                poly_value,
                oracle_value: pt.value,
                bound,
                pass: (poly_value - pt.value).abs() <= bound,
            }
        })
        .collect()
}

/// Dense-oracle values of target `target` at every grid point.
pub fn dense_points(
    circuit: &NoisyCircuit,
    eval: &Evaluation,
    target: usize,
    grid: &[[f64; 3]],
) -> Result<Vec<OraclePoint>> {
    grid.iter()
        .map(|&p| {
            let out = dense_run(circuit, p, eval)?;
            Ok(OraclePoint {
                p,
                value: out.fidelities[target],
                sigma: 0.0,
            })
        })
        .collect()
}

/// Monte-Carlo values of target `target` at every grid point.
pub fn mc_points(
    circuit: &NoisyCircuit,
    eval: &Evaluation,
    target: usize,
    grid: &[[f64; 3]],
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<Vec<OraclePoint>> {
    grid.iter()
        .map(|&p| {
            let est = mc_run(circuit, p, eval, samples, seed, threads)?;
            Ok(OraclePoint {
                p,
                value: est.estimate[target],
                sigma: est.stderr[target],
            })
        })
        .collect()
}

/// Second-order Taylor coefficients of a dense-oracle target value, in the
/// order `1, x, y, z, x², xy, xz, y², yz, z²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DenseJet {
    pub coefficients: [f64; 10],
    pub step: f64,
}

impl DenseJet {
    pub fn eval(&self, p: [f64; 3]) -> f64 {
        let c = &self.coefficients;
        let [x, y, z] = p;
        c[0] + c[1] * x + c[2] * y + c[3] * z + c[4] * x * x + c[5] * x * y + c[6] * x * z
            + c[7] * y * y
            + c[8] * y * z
            + c[9] * z * z
    }

    /// The jet as a polynomial with coefficients rounded to the nearest
    /// integer multiple of `1/den`.
    pub fn rounded(&self, den: i64) -> ErrorPolynomial {
        use num_bigint::BigInt;
        use num_rational::BigRational;
        let exps = [
            [0, 0, 0],
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
            [2, 0, 0],
            [1, 1, 0],
            [1, 0, 1],
            [0, 2, 0],
            [0, 1, 1],
            [0, 0, 2],
        ];
        let terms = exps.iter().zip(self.coefficients).map(|(e, c)| {
            let num = (c * den as f64).round() as i64;
            (
                crate::polynomial::Monomial(*e),
                BigRational::new(BigInt::from(num), BigInt::from(den)),
            )
        });
        ErrorPolynomial::from_terms(terms, 2)
    }
}

/// Extracts the second-order jet of target `target` by symmetric finite
/// differences of step `h` around `p = 0`. The channel is linear in
/// `(p_x, p_y, p_z)`, so negative steps are evaluated as ordinary linear maps.
pub fn dense_jet(circuit: &NoisyCircuit, eval: &Evaluation, target: usize, h: f64) -> Result<DenseJet> {
    let f = |p: [f64; 3]| -> Result<f64> { Ok(dense_run(circuit, p, eval)?.fidelities[target]) };
    let axis = |i: usize, t: f64| {
        let mut p = [0.0; 3];
        p[i] = t;
        p
    };
    let f0 = f([0.0; 3])?;
    let mut c = [0.0; 10];
    c[0] = f0;
    let mut diag = [0.0; 3];
    for i in 0..3 {
        let fp = f(axis(i, h))?;
        let fm = f(axis(i, -h))?;
        c[1 + i] = (fp - fm) / (2.0 * h);
        diag[i] = (fp + fm - 2.0 * f0) / (2.0 * h * h);
    }
    c[4] = diag[0];
    c[7] = diag[1];
    c[9] = diag[2];
    for (slot, i, j) in [(5, 0, 1), (6, 0, 2), (8, 1, 2)] {
        let mut pp = [0.0; 3];
        pp[i] = h;
        pp[j] = h;
        let mm = pp.map(|v| -v);
        let g2 = (f(pp)? + f(mm)? - 2.0 * f0) / (2.0 * h * h);
        c[slot] = g2 - diag[i] - diag[j];
    }
    Ok(DenseJet {
        coefficients: c,
        step: h,
    })
}

/// Jet values of target `target` at every grid point.
pub fn jet_points(jet: &DenseJet, grid: &[[f64; 3]]) -> Vec<OraclePoint> {
    grid.iter()
        .map(|&p| OraclePoint {
            p,
            value: jet.eval(p),
            sigma: 0.0,
        })
        .collect()
}

/// Arbitration of a computed polynomial against a reference one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Arbitration {
    pub computed: Vec<ArbitrationRow>,
    pub reference: Vec<ArbitrationRow>,
}

impl Arbitration {
    pub fn new(computed: &ErrorPolynomial, reference: &ErrorPolynomial, points: &[OraclePoint], tol: Tolerance) -> Self {
        Arbitration {
            computed: arbitrate(computed, points, tol),
            reference: arbitrate(reference, points, tol),
        }
    }

    pub fn computed_passes(&self) -> bool {
        self.computed.iter().all(|r| r.pass)
    }

    pub fn reference_passes(&self) -> bool {
        self.reference.iter().all(|r| r.pass)
    }

    /// The oracle sides with the computed value: it passes everywhere, and
    /// wherever the two candidates disagree it is at least as close.
    pub fn sides_with_computed(&self) -> bool {
        self.computed_passes()
            && self.computed.iter().zip(&self.reference).all(|(c, r)| {
                (c.poly_value - c.oracle_value).abs() <= (r.poly_value - r.oracle_value).abs() + c.bound * 1e-9
            })
    }
}
