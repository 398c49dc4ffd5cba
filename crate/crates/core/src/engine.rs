//! Fault-path replay on the stabilizer engine.
//!
//! A circuit is lowered to a flat op list in which every fault slot becomes an
//! explicit [`Op::Fault`] marker right after its gate. Exhaustive enumeration
//! walks the fault tree depth-first, cloning the state only where a fault is
//! inserted, so paths sharing a fault-free prefix share its simulation.
//!
//! Per-path quantities are powers of one half, so results are tallied as
//! integer counts per `(fault counts, exponent)` and merged by addition. The
//! outcome is independent of worker count and scheduling.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::circuit::{Gate, NoisyCircuit, Step};
use crate::error::Result;
use crate::noise::{label_index, FaultPath};
use crate::pauli::{Pauli, PauliOperator};
use crate::stabilizer::{Basis, BranchProb, SignedPauli, StabilizerState};
use crate::steane::perfect_ec;

/// What a finished path is scored against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// Fidelity of the reduced state on the generators' support with the
    /// stabilizer state they define.
    Stabilizer {
        label: String,
        generators: Vec<SignedPauli>,
    },
    /// Probability that `qubit` reads `|0⟩` after the noiseless `decoder`.
    DecodedZero {
        label: String,
        decoder: Vec<Gate>,
        qubit: usize,
    },
}

impl Target {
    pub fn label(&self) -> &str {
        match self {
            Target::Stabilizer { label, .. } | Target::DecodedZero { label, .. } => label,
        }
    }

    pub fn evaluate(&self, s: &StabilizerState) -> Result<BranchProb> {
        match self {
            Target::Stabilizer { generators, .. } => s.projector_prob(generators),
            Target::DecodedZero { decoder, qubit, .. } => {
                let mut t = s.clone();
                for g in decoder {
                    g.apply(&mut t)?;
                }
                t.prob_single_qubit_zero(*qubit)
            }
        }
    }
}

/// Scoring applied at the end of every accepted path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    /// Apply noiseless Steane error correction to data qubits 0..7 first.
    pub perfect_ec: bool,
    pub targets: Vec<Target>,
}

impl Evaluation {
    /// Target values of one final state, as lists of `2^-k` contributions
    /// (one per error-correction branch with nonzero value).
    pub fn score(&self, s: &StabilizerState) -> Result<Vec<Vec<u32>>> {
        let mut out = vec![Vec::new(); self.targets.len()];
        let branches = if self.perfect_ec {
            perfect_ec(s)?
        } else {
            vec![(BranchProb::ONE, s.clone())]
        };
        for (p, state) in &branches {
            for (t, slot) in self.targets.iter().zip(out.iter_mut()) {
                if let Some(k) = (*p * t.evaluate(state)?).exponent() {
                    slot.push(k);
                }
            }
        }
        Ok(out)
    }
}

/// Exact sum of powers of one half, stored as counts per exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DyadicSum {
    counts: Vec<u64>,
}

impl DyadicSum {
    pub fn add_pow2(&mut self, k: u32) {
        let k = k as usize;
        if self.counts.len() <= k {
            self.counts.resize(k + 1, 0);
        }
        self.counts[k] += 1;
    }

    pub fn merge(&mut self, other: &DyadicSum) {
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.counts.is_empty() {
            return BigRational::zero();
        }
        let top = self.counts.len() - 1;
        let mut num = BigInt::zero();
        for (k, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                num += BigInt::from(c) << (top - k);
            }
        }
        BigRational::new(num, BigInt::one() << top)
    }
}

/// Accumulated contributions of one fault-count class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TallyEntry {
    pub acceptance: DyadicSum,
    pub fidelity: Vec<DyadicSum>,
}

/// Contributions keyed by the number of X, Y and Z faults on the path.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub entries: BTreeMap<[u32; 3], TallyEntry>,
    /// Number of fault paths visited (including those rejected by post-selection).
    pub paths: u64,
}

impl Tally {
    fn record(&mut self, counts: [u32; 3], accept: u32, values: &[Vec<u32>]) {
        let e = self.entries.entry(counts).or_default();
        e.acceptance.add_pow2(accept);
        if e.fidelity.len() < values.len() {
            e.fidelity.resize(values.len(), DyadicSum::default());
        }
        for (sum, ks) in e.fidelity.iter_mut().zip(values) {
            for &k in ks {
                sum.add_pow2(accept + k);
            }
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        for (k, v) in other.entries {
            let e = self.entries.entry(k).or_default();
            e.acceptance.merge(&v.acceptance);
            if e.fidelity.len() < v.fidelity.len() {
                e.fidelity.resize(v.fidelity.len(), DyadicSum::default());
            }
            for (a, b) in e.fidelity.iter_mut().zip(&v.fidelity) {
                a.merge(b);
            }
        }
        self.paths += other.paths;
        self
    }
}

#[derive(Clone, Debug)]
enum Op {
    Gate(Gate),
    Fault(usize),
    PostSelect(SignedPauli),
    Flip(usize),
}

/// Outcome of replaying one fault path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathOutcome {
    /// Probability (as `2^-accept`) that every post-selection succeeds.
    pub accept: u32,
    /// Per-target contributions `2^-k`, conditional on acceptance.
    pub values: Vec<Vec<u32>>,
}

/// A circuit lowered for repeated replay.
#[derive(Clone, Debug)]
pub struct CompiledCircuit {
    n_qubits: usize,
    ops: Vec<Op>,
    /// Op index of every fault slot, in slot order.
    fault_ops: Vec<usize>,
}

impl CompiledCircuit {
    pub fn new(circuit: &NoisyCircuit) -> Result<Self> {
        circuit.validate()?;
        let n = circuit.n_qubits;
        let mut ops = Vec::new();
        let mut fault_ops = Vec::new();
        for step in &circuit.steps {
            match *step {
                Step::Gate { gate, noisy } => {
                    ops.push(Op::Gate(gate));
                    if noisy {
                        for q in gate.qubits() {
                            fault_ops.push(ops.len());
                            ops.push(Op::Fault(q));
                        }
                    }
                }
                Step::PostSelect { qubit, basis, keep } => {
                    let p = match basis {
                        Basis::Z => Pauli::Z,
                        Basis::X => Pauli::X,
                    };
                    ops.push(Op::PostSelect(SignedPauli {
                        pauli: PauliOperator::single(n, qubit, p)?,
                        negative: keep,
                    }));
                }
                Step::Alloc { qubit, initial } => {
                    if initial {
                        ops.push(Op::Flip(qubit));
                    }
                }
            }
        }
        Ok(CompiledCircuit {
            n_qubits: n,
            ops,
            fault_ops,
        })
    }

    pub fn n_slots(&self) -> usize {
        self.fault_ops.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Runs ops `from..` on `state`; `faults` lists `(op index, label)` pairs in
    /// increasing op order, all `≥ from`. Returns the accumulated acceptance
    /// exponent, or `None` if a post-selection fails.
    fn run_segment(
        &self,
        state: &mut StabilizerState,
        from: usize,
        mut accept: u32,
        faults: &[(usize, Pauli)],
    ) -> Result<Option<u32>> {
        let mut next_fault = 0;
        for i in from..self.ops.len() {
            match &self.ops[i] {
                Op::Gate(g) => g.apply(state)?,
                Op::Fault(q) => {
                    if let Some(&(at, p)) = faults.get(next_fault) {
                        if at == i {
                            state.pauli(*q, p)?;
                            next_fault += 1;
                        }
                    }
                }
                Op::PostSelect(g) => match state.measure_pauli(g) {
                    BranchProb::Zero => return Ok(None),
                    BranchProb::Pow2(k) => accept += k,
                },
                Op::Flip(q) => state.pauli(*q, Pauli::X)?,
            }
        }
        Ok(Some(accept))
    }

    /// Replays a single fault path from `|0…0⟩`.
    pub fn replay(&self, path: &FaultPath, eval: &Evaluation) -> Result<Option<PathOutcome>> {
        let faults: Vec<(usize, Pauli)> = path
            .faults
            .iter()
            .map(|&(slot, p)| (self.fault_ops[slot], p))
            .collect();
        let mut s = StabilizerState::zero(self.n_qubits);
        match self.run_segment(&mut s, 0, 0, &faults)? {
            None => Ok(None),
            Some(accept) => Ok(Some(PathOutcome {
                accept,
                values: eval.score(&s)?,
            })),
        }
    }

    /// Fault-free trajectory: the state just before each slot's fault would be
    /// applied, with the acceptance exponent so far (`None` once rejected).
    pub fn snapshots(&self) -> Result<Vec<Option<(StabilizerState, u32)>>> {
        let mut out = Vec::with_capacity(self.fault_ops.len());
        let mut s = StabilizerState::zero(self.n_qubits);
        let mut accept = Some(0);
        let mut from = 0;
        for &at in &self.fault_ops {
            if let Some(a) = accept {
                accept = self.run_range(&mut s, from, at, a)?;
            }
            out.push(accept.map(|a| (s.clone(), a)));
            from = at;
        }
        Ok(out)
    }

    fn run_range(&self, s: &mut StabilizerState, from: usize, to: usize, mut accept: u32) -> Result<Option<u32>> {
        for op in &self.ops[from..to] {
            match op {
                Op::Gate(g) => g.apply(s)?,
                Op::Fault(_) => {}
                Op::PostSelect(g) => match s.measure_pauli(g) {
                    BranchProb::Zero => return Ok(None),
                    BranchProb::Pow2(k) => accept += k,
                },
                Op::Flip(q) => s.pauli(*q, Pauli::X)?,
            }
        }
        Ok(Some(accept))
    }

    /// Replays a path starting from a fault-free snapshot taken at its first
    /// fault. `faults` holds `(slot, label)` sorted by slot and non-empty.
    pub fn replay_from_snapshot(
        &self,
        snapshot: &(StabilizerState, u32),
        faults: &[(usize, Pauli)],
        eval: &Evaluation,
    ) -> Result<Option<PathOutcome>> {
        let ops: Vec<(usize, Pauli)> = faults
            .iter()
            .map(|&(slot, p)| (self.fault_ops[slot], p))
            .collect();
        let mut s = snapshot.0.clone();
        match self.run_segment(&mut s, ops[0].0, snapshot.1, &ops)? {
            None => Ok(None),
            Some(accept) => Ok(Some(PathOutcome {
                accept,
                values: eval.score(&s)?,
            })),
        }
    }

    /// Depth-first enumeration of every fault path of order `≤ max_order`.
    pub fn enumerate(&self, eval: &Evaluation, max_order: u32) -> Result<Tally> {
        // Fault-free path plus one task per (first fault slot, label).
        let snaps = self.snapshots()?;
        let mut tally = Tally::default();
        self.dfs(
            StabilizerState::zero(self.n_qubits),
            0,
            0,
            0,
            [0; 3],
            eval,
            &mut tally,
        )?;
        if max_order == 0 {
            return Ok(tally);
        }
        let tasks: Vec<(usize, Pauli)> = (0..self.fault_ops.len())
            .flat_map(|slot| Pauli::ERRORS.into_iter().map(move |p| (slot, p)))
            .collect();
        let rest = tasks
            .par_iter()
            .map(|&(slot, p)| -> Result<Tally> {
                let mut t = Tally::default();
                let Some((state, accept)) = &snaps[slot] else {
                    t.paths += 1;
                    return Ok(t);
                };
                let mut s = state.clone();
                let at = self.fault_ops[slot];
                let Op::Fault(q) = self.ops[at] else {
                    unreachable!("fault_ops points at fault markers")
                };
                s.pauli(q, p)?;
                let mut counts = [0; 3];
                counts[label_index(p).expect("non-identity")] += 1;
                self.dfs(s, at + 1, *accept, max_order - 1, counts, eval, &mut t)?;
                Ok(t)
            })
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
        Ok(tally.merge(rest))
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        mut state: StabilizerState,
        from: usize,
        mut accept: u32,
        budget: u32,
        counts: [u32; 3],
        eval: &Evaluation,
        tally: &mut Tally,
    ) -> Result<()> {
        for i in from..self.ops.len() {
            match &self.ops[i] {
                Op::Gate(g) => g.apply(&mut state)?,
                Op::Fault(q) => {
                    if budget > 0 {
                        for p in Pauli::ERRORS {
                            let mut s = state.clone();
                            s.pauli(*q, p)?;
                            let mut c = counts;
                            c[label_index(p).expect("non-identity")] += 1;
                            self.dfs(s, i + 1, accept, budget - 1, c, eval, tally)?;
                        }
                    }
                }
                Op::PostSelect(g) => match state.measure_pauli(g) {
                    BranchProb::Zero => {
                        tally.paths += paths_below(self, i, budget);
                        return Ok(());
                    }
                    BranchProb::Pow2(k) => accept += k,
                },
                Op::Flip(q) => state.pauli(*q, Pauli::X)?,
            }
        }
        tally.paths += 1;
        let values = eval.score(&state)?;
        tally.record(counts, accept, &values);
        Ok(())
    }
}

/// Number of complete paths pruned when a branch dies at op `at` with `budget`
/// faults left to place on later slots.
fn paths_below(c: &CompiledCircuit, at: usize, budget: u32) -> u64 {
    let later = c.fault_ops.iter().filter(|&&f| f > at).count() as u64;
    let mut total = 0u64;
    let mut binom = 1u64;
    let mut pow3 = 1u64;
    for k in 0..=budget as u64 {
        if k > later {
            break;
        }
        if k > 0 {
            binom = binom * (later - k + 1) / k;
            pow3 *= 3;
        }
        total += binom * pow3;
    }
    total
}

/// Runs `f` on a pool with `threads` workers (`0` means rayon's default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_shor_prep;
    use crate::noise::enumerate_fault_paths;

    fn ghz_eval() -> Evaluation {
        Evaluation {
            perfect_ec: false,
            targets: vec![Target::Stabilizer {
                label: "ghz".into(),
                generators: ["XXXX", "ZZII", "IZZI", "IIZZ"]
                    .iter()
                    .map(|s| {
                        let mut p: String = s.to_string();
                        while p.len() < 6 {
                            p.push('I');
                        }
                        SignedPauli::plus(p.parse().unwrap())
                    })
                    .collect(),
            }],
        }
    }

    #[test]
    fn dyadic_sum_is_exact() {
        let mut d = DyadicSum::default();
        d.add_pow2(0);
        d.add_pow2(2);
        d.add_pow2(2);
        assert_eq!(d.to_rational(), BigRational::new(3.into(), 2.into()));
    }

    #[test]
    fn dfs_matches_naive_replay() {
        let c = build_shor_prep(2).unwrap();
        let compiled = CompiledCircuit::new(&c).unwrap();
        let eval = ghz_eval();
        let fast = compiled.enumerate(&eval, 2).unwrap();
        let mut slow = Tally::default();
        for (path, _) in enumerate_fault_paths(&c, 2) {
            slow.paths += 1;
            if let Some(out) = compiled.replay(&path, &eval).unwrap() {
                slow.record(path.fault_counts(), out.accept, &out.values);
            }
        }
        assert_eq!(fast.entries, slow.entries);
        assert_eq!(fast.paths, slow.paths);
    }

    #[test]
    fn snapshot_replay_matches_full_replay() {
        let c = build_shor_prep(2).unwrap();
        let compiled = CompiledCircuit::new(&c).unwrap();
        let snaps = compiled.snapshots().unwrap();
        let eval = ghz_eval();
        for (path, _) in enumerate_fault_paths(&c, 2).skip(1) {
            let first = path.faults[0].0;
            let a = compiled.replay(&path, &eval).unwrap();
            let b = compiled
                .replay_from_snapshot(snaps[first].as_ref().unwrap(), &path.faults, &eval)
                .unwrap();
            assert_eq!(a, b, "{path:?}");
        }
    }
}
