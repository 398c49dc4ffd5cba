//! Circuit representation and the builders for every preparation circuit.
//!
//! Qubits are 0-based. In the builders below, "Shor qubit 1" of the usual
//! 1-based description is index 0, data qubit 7 is index 6, and so on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::stabilizer::{Basis, StabilizerState};
use crate::steane::SteaneCode;

/// A Clifford gate from the supported set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    Cnot { control: usize, target: usize },
    Pauli(usize, Pauli),
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    /// Qubits touched, control first for a CNOT.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::Pauli(q, _) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn apply(&self, s: &mut StabilizerState) -> Result<()> {
        match *self {
            Gate::H(q) => s.h(q),
            Gate::Cnot { control, target } => s.cnot(control, target),
            Gate::Pauli(q, p) => s.pauli(q, p),
        }
    }

    /// The inverse gate (every supported gate is self-inverse).
    pub fn inverse(&self) -> Gate {
        *self
    }
}

/// One step of a [`NoisyCircuit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    /// A gate; noisy gates are followed by an independent Pauli channel on
    /// every qubit they touch.
    Gate { gate: Gate, noisy: bool },
    /// Measures `qubit` in `basis` and conditions on outcome `keep`.
    PostSelect { qubit: usize, basis: Basis, keep: bool },
    /// First use of a fresh qubit, prepared noiselessly in `|initial⟩`.
    Alloc { qubit: usize, initial: bool },
}

/// An ordered list of steps acting on a register of `n_qubits` qubits that all
/// start in `|0⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoisyCircuit {
    pub n_qubits: usize,
    pub steps: Vec<Step>,
}

impl NoisyCircuit {
    pub fn new(n_qubits: usize) -> Self {
        NoisyCircuit {
            n_qubits,
            steps: Vec::new(),
        }
    }

    pub fn alloc(&mut self, qubit: usize, initial: bool) -> &mut Self {
        self.steps.push(Step::Alloc { qubit, initial });
        self
    }

    pub fn noisy(&mut self, gate: Gate) -> &mut Self {
        self.steps.push(Step::Gate { gate, noisy: true });
        self
    }

    pub fn noiseless(&mut self, gate: Gate) -> &mut Self {
        self.steps.push(Step::Gate { gate, noisy: false });
        self
    }

    pub fn post_select(&mut self, qubit: usize, basis: Basis, keep: bool) -> &mut Self {
        self.steps.push(Step::PostSelect { qubit, basis, keep });
        self
    }

    pub fn gates(&self) -> impl Iterator<Item = (&Gate, bool)> {
        self.steps.iter().filter_map(|s| match s {
            Step::Gate { gate, noisy } => Some((gate, *noisy)),
            _ => None,
        })
    }

    pub fn count_noisy(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.gates().filter(|(g, noisy)| *noisy && pred(g)).count()
    }

    /// Checks qubit ranges and the measure-and-discard discipline.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        let mut discarded = vec![false; n];
        let check = |q: usize, discarded: &[bool]| -> Result<()> {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
            if discarded[q] {
                return Err(Error::Invalid(format!("qubit {q} used after post-selection")));
            }
            Ok(())
        };
        for step in &self.steps {
            match *step {
                Step::Gate { gate, .. } => {
                    let qs = gate.qubits();
                    for &q in &qs {
                        check(q, &discarded)?;
                    }
                    if qs.len() == 2 && qs[0] == qs[1] {
                        return Err(Error::SameQubit(qs[0]));
                    }
                }
                Step::PostSelect { qubit, .. } => {
                    check(qubit, &discarded)?;
                    discarded[qubit] = true;
                }
                Step::Alloc { qubit, .. } => check(qubit, &discarded)?,
            }
        }
        Ok(())
    }

    /// Noiseless execution of the fault-free path: the final state and the
    /// probability that all post-selections succeed.
    pub fn run_ideal(&self) -> Result<(StabilizerState, crate::stabilizer::BranchProb)> {
        let mut s = StabilizerState::zero(self.n_qubits);
        let mut prob = crate::stabilizer::BranchProb::ONE;
        for step in &self.steps {
            match *step {
                Step::Gate { gate, .. } => gate.apply(&mut s)?,
                Step::PostSelect { qubit, basis, keep } => {
                    prob = prob * s.measure_single(qubit, basis, keep)?;
                }
                Step::Alloc { qubit, initial } => {
                    if initial {
                        s.pauli(qubit, Pauli::X)?;
                    }
                }
            }
        }
        Ok((s, prob))
    }

    /// JSON-friendly step list.
    pub fn dump(&self) -> Vec<StepRecord> {
        self.steps.iter().map(StepRecord::from).collect()
    }
}

/// Serialized form of one step:
/// `{"op": "cnot"|"h"|"x"|"y"|"z"|"postselect"|"alloc", "qubits": [...], "noisy": bool, "basis": "z"|"x", "keep": 0|1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub op: String,
    pub qubits: Vec<usize>,
    pub noisy: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basis: Option<Basis>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub keep: Option<u8>,
}

impl From<&Step> for StepRecord {
    fn from(step: &Step) -> Self {
        match *step {
            Step::Gate { gate, noisy } => {
                let op = match gate {
                    Gate::H(_) => "h",
                    Gate::Cnot { .. } => "cnot",
                    Gate::Pauli(_, Pauli::X) => "x",
                    Gate::Pauli(_, Pauli::Y) => "y",
                    Gate::Pauli(_, Pauli::Z) => "z",
                    Gate::Pauli(_, Pauli::I) => "i",
                };
                StepRecord {
                    op: op.into(),
                    qubits: gate.qubits(),
                    noisy,
                    basis: None,
                    keep: None,
                }
            }
            Step::PostSelect { qubit, basis, keep } => StepRecord {
                op: "postselect".into(),
                qubits: vec![qubit],
                noisy: false,
                basis: Some(basis),
                keep: Some(keep as u8),
            },
            Step::Alloc { qubit, initial } => StepRecord {
                op: "alloc".into(),
                qubits: vec![qubit],
                noisy: false,
                basis: None,
                keep: Some(initial as u8),
            },
        }
    }
}

impl TryFrom<&StepRecord> for Step {
    type Error = Error;

    fn try_from(r: &StepRecord) -> Result<Step> {
        let q = |i: usize| {
            r.qubits
                .get(i)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("step {:?} is missing qubits", r.op)))
        };
        let gate = |gate: Gate| Ok(Step::Gate { gate, noisy: r.noisy });
        match r.op.as_str() {
            "h" => gate(Gate::H(q(0)?)),
            "cnot" => gate(Gate::cnot(q(0)?, q(1)?)),
            "x" => gate(Gate::Pauli(q(0)?, Pauli::X)),
            "y" => gate(Gate::Pauli(q(0)?, Pauli::Y)),
            "z" => gate(Gate::Pauli(q(0)?, Pauli::Z)),
            "postselect" => Ok(Step::PostSelect {
                qubit: q(0)?,
                basis: r.basis.unwrap_or(Basis::Z),
                keep: r.keep.unwrap_or(0) == 1,
            }),
            "alloc" => Ok(Step::Alloc {
                qubit: q(0)?,
                initial: r.keep.unwrap_or(0) == 1,
            }),
            other => Err(Error::Invalid(format!("unknown op {other:?}"))),
        }
    }
}

/// Verification pairs for the Shor-state parity checks, in application order
/// (1-based qubits (1,4) then (1,2)).
pub const VERIFICATION_PAIRS: [(usize, usize); 2] = [(0, 3), (0, 1)];

/// Appends a GHZ-form Shor state on `shor` followed by `verifications` parity
/// checks using the ancillas in `checks`.
fn push_shor_prep(c: &mut NoisyCircuit, shor: [usize; 4], checks: &[usize]) {
    for &q in &shor {
        c.alloc(q, false);
    }
    // |+⟩|000⟩ is prepared noiselessly; only the three CNOTs carry noise.
    c.noiseless(Gate::H(shor[0]));
    for w in shor.windows(2) {
        c.noisy(Gate::cnot(w[0], w[1]));
    }
    for (&anc, &(a, b)) in checks.iter().zip(VERIFICATION_PAIRS.iter()) {
        c.alloc(anc, false);
        c.noisy(Gate::cnot(shor[a], anc));
        c.noisy(Gate::cnot(shor[b], anc));
        c.post_select(anc, Basis::Z, false);
    }
}

fn check_verifications(v: usize) -> Result<()> {
    if v > VERIFICATION_PAIRS.len() {
        Err(Error::InvalidVerifications(v))
    } else {
        Ok(())
    }
}

/// Four-qubit Shor state (GHZ form, final Hadamards omitted) on qubits 0..4,
/// with verification ancillas on qubits 4.. .
pub fn build_shor_prep(verifications: usize) -> Result<NoisyCircuit> {
    check_verifications(verifications)?;
    let mut c = NoisyCircuit::new(4 + verifications);
    let checks: Vec<usize> = (4..4 + verifications).collect();
    push_shor_prep(&mut c, [0, 1, 2, 3], &checks);
    Ok(c)
}

/// Fault-tolerant preparation of `|0_L⟩` on data qubits 0..7.
///
/// The bit-flip syndromes are trivial on `|0000000⟩` and skipped. Each X-type
/// generator is measured `syndrome_repeats` times with a fresh verified Shor
/// state; ancilla `i` controls a CNOT onto the `i`-th qubit of the generator's
/// support, and all four ancillas are post-selected on `|+⟩`.
pub fn build_ft_encoder(shor_verifications: usize, syndrome_repeats: usize) -> Result<NoisyCircuit> {
    check_verifications(shor_verifications)?;
    if syndrome_repeats == 0 {
        return Err(Error::InvalidRepeats);
    }
    let per_block = 4 + shor_verifications;
    let blocks = 3 * syndrome_repeats;
    let mut c = NoisyCircuit::new(7 + blocks * per_block);
    for q in 0..7 {
        c.alloc(q, false);
    }
    let mut next = 7;
    for support in SteaneCode::SUPPORTS {
        for _ in 0..syndrome_repeats {
            let shor = [next, next + 1, next + 2, next + 3];
            let checks: Vec<usize> = (next + 4..next + per_block).collect();
            next += per_block;
            push_shor_prep(&mut c, shor, &checks);
            for (&anc, &data) in shor.iter().zip(support.iter()) {
                c.noisy(Gate::cnot(anc, data));
            }
            for &anc in &shor {
                c.post_select(anc, Basis::X, false);
            }
        }
    }
    Ok(c)
}

/// Pivot qubits receiving the encoder's Hadamards (1-based 5, 6, 7).
pub const ENCODER_PIVOTS: [usize; 3] = [4, 5, 6];

/// CNOTs of the encoder that can be skipped when the input is `|0⟩`
/// (they copy the input qubit onto a weight-3 logical X representative).
pub const ENCODER_INPUT_CNOTS: [(usize, usize); 2] = [(0, 1), (0, 2)];

/// The nine pivot CNOTs `(control, target)` of the encoder, in application order.
pub const ENCODER_CNOTS: [(usize, usize); 9] = [
    (5, 0),
    (5, 2),
    (4, 2),
    (4, 1),
    (5, 3),
    (4, 3),
    (6, 0),
    (6, 1),
    (6, 3),
];

/// Encoder for `|0⟩`: noisy Hadamards on the pivots then nine noisy CNOTs.
pub fn build_gate_sequence_encoder() -> NoisyCircuit {
    gate_sequence_encoder_with(&ENCODER_CNOTS)
}

/// Same as [`build_gate_sequence_encoder`] with a caller-supplied CNOT order.
pub fn gate_sequence_encoder_with(cnots: &[(usize, usize)]) -> NoisyCircuit {
    let mut c = NoisyCircuit::new(7);
    for q in 0..7 {
        c.alloc(q, false);
    }
    for &q in &ENCODER_PIVOTS {
        c.noisy(Gate::H(q));
    }
    for &(a, b) in cnots {
        c.noisy(Gate::cnot(a, b));
    }
    c
}

/// The complete encoder gate list (input-copy CNOTs included) for an arbitrary
/// input state on qubit 0.
pub fn full_encoder_gates_with(cnots: &[(usize, usize)]) -> Vec<Gate> {
    let mut g: Vec<Gate> = ENCODER_INPUT_CNOTS
        .iter()
        .map(|&(a, b)| Gate::cnot(a, b))
        .collect();
    g.extend(ENCODER_PIVOTS.iter().map(|&q| Gate::H(q)));
    g.extend(cnots.iter().map(|&(a, b)| Gate::cnot(a, b)));
    g
}

/// Inverse of the full encoder.
pub fn perfect_decoder_gates_with(cnots: &[(usize, usize)]) -> Vec<Gate> {
    full_encoder_gates_with(cnots)
        .iter()
        .rev()
        .map(Gate::inverse)
        .collect()
}

pub fn perfect_decoder_gates() -> Vec<Gate> {
    perfect_decoder_gates_with(&ENCODER_CNOTS)
}

/// Noiseless decoder acting on qubits 0..7.
pub fn build_perfect_decoder() -> NoisyCircuit {
    let mut c = NoisyCircuit::new(7);
    for g in perfect_decoder_gates() {
        c.noiseless(g);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::BranchProb;

    #[test]
    fn shor_prep_layout() {
        let c = build_shor_prep(0).unwrap();
        assert_eq!(c.count_noisy(|g| matches!(g, Gate::Cnot { .. })), 3);
        let c = build_shor_prep(2).unwrap();
        assert_eq!(c.n_qubits, 6);
        assert_eq!(c.count_noisy(|_| true), 7);
        c.validate().unwrap();
        assert_eq!(build_shor_prep(3), Err(Error::InvalidVerifications(3)));
    }

    #[test]
    fn ideal_shor_prep_passes_verification() {
        for v in 0..=2 {
            let (_, p) = build_shor_prep(v).unwrap().run_ideal().unwrap();
            assert_eq!(p, BranchProb::ONE);
        }
    }

    #[test]
    fn ft_encoder_counts() {
        let c = build_ft_encoder(2, 2).unwrap();
        c.validate().unwrap();
        // 7 Shor-prep CNOTs + 4 syndrome CNOTs per block, six blocks.
        assert_eq!(c.count_noisy(|_| true), 66);
        assert_eq!(c.n_qubits, 7 + 6 * 6);
        assert_eq!(build_ft_encoder(2, 0), Err(Error::InvalidRepeats));
    }

    #[test]
    fn ft_syndrome_couplings_touch_one_data_qubit_per_ancilla() {
        let c = build_ft_encoder(2, 2).unwrap();
        let mut seen = std::collections::HashMap::<usize, Vec<usize>>::new();
        for (g, _) in c.gates() {
            if let Gate::Cnot { control, target } = *g {
                if target < 7 {
                    seen.entry(control).or_default().push(target);
                }
            }
        }
        assert_eq!(seen.len(), 24);
        assert!(seen.values().all(|t| t.len() == 1));
        // First block measures the generator on 1-based qubits {4,5,6,7}.
        let mut first: Vec<usize> = seen
            .iter()
            .filter(|(&a, _)| (7..11).contains(&a))
            .map(|(_, t)| t[0])
            .collect();
        first.sort();
        assert_eq!(first, vec![3, 4, 5, 6]);
    }

    #[test]
    fn gate_sequence_counts() {
        let c = build_gate_sequence_encoder();
        assert_eq!(c.count_noisy(|g| matches!(g, Gate::H(_))), 3);
        assert_eq!(c.count_noisy(|g| matches!(g, Gate::Cnot { .. })), 9);
    }

    #[test]
    fn dump_round_trips() {
        let c = build_shor_prep(1).unwrap();
        let json = serde_json::to_string(&c.dump()).unwrap();
        let back: Vec<StepRecord> = serde_json::from_str(&json).unwrap();
        let steps: Vec<Step> = back.iter().map(|r| Step::try_from(r).unwrap()).collect();
        assert_eq!(steps, c.steps);
    }

    #[test]
    fn validate_rejects_reuse_after_measurement() {
        let mut c = NoisyCircuit::new(2);
        c.post_select(0, Basis::Z, false).noisy(Gate::cnot(0, 1));
        assert!(c.validate().is_err());
    }
}
