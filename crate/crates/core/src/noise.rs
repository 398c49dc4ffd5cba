//! The non-equiprobable Pauli channel and fault-path enumeration.
//!
//! Every noisy gate is followed by an independent single-qubit channel on
//! each qubit it touches: `ρ → p_0 ρ + p_x XρX + p_y YρY + p_z ZρZ`. A CNOT
//! therefore owns two fault slots and a Hadamard one. Noiseless gates,
//! preparations, measurements and idle qubits own none.

use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use crate::circuit::{NoisyCircuit, Step};
use crate::pauli::Pauli;
use crate::polynomial::{ErrorPolynomial, Monomial, Var};

/// Symbolic noise model: probabilities `p_x, p_y, p_z` and `p_0 = 1 - Σ p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseModel {
    pub degree: u32,
}

impl NoiseModel {
    pub fn new(degree: u32) -> Self {
        NoiseModel { degree }
    }

    /// Weight of one slot outcome.
    pub fn outcome_weight(&self, p: Pauli) -> ErrorPolynomial {
        match p {
            Pauli::I => ErrorPolynomial::p_identity(self.degree),
            Pauli::X => ErrorPolynomial::var(Var::X, self.degree),
            Pauli::Y => ErrorPolynomial::var(Var::Y, self.degree),
            Pauli::Z => ErrorPolynomial::var(Var::Z, self.degree),
        }
    }

    /// Weight of a whole path: product over all `n_slots` slots, truncated.
    /// Depends only on how many X, Y and Z faults the path contains.
    pub fn path_weight(&self, fault_counts: [u32; 3], n_slots: usize) -> ErrorPolynomial {
        let k: u32 = fault_counts.iter().sum();
        let idle = n_slots as u32 - k;
        ErrorPolynomial::p_identity(self.degree)
            .pow(idle)
            .mul_monomial(Monomial(fault_counts), &BigRational::one())
    }
}

/// Maps a fault label to its exponent slot in `(e_x, e_y, e_z)`.
pub fn label_index(p: Pauli) -> Option<usize> {
    match p {
        Pauli::I => None,
        Pauli::X => Some(0),
        Pauli::Y => Some(1),
        Pauli::Z => Some(2),
    }
}

/// One independent single-qubit fault location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    /// Index of the noisy gate's step in the circuit.
    pub step: usize,
    pub qubit: usize,
}

/// All fault slots in circuit order (control before target within a CNOT).
pub fn collect_slots(circuit: &NoisyCircuit) -> Vec<Slot> {
    circuit
        .steps
        .iter()
        .enumerate()
        .flat_map(|(step, s)| match s {
            Step::Gate { gate, noisy: true } => gate
                .qubits()
                .into_iter()
                .map(|qubit| Slot { step, qubit })
                .collect(),
            _ => Vec::new(),
        })
        .collect()
}

/// An assignment of non-identity Paulis to a set of slots; unlisted slots are `I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FaultPath {
    /// `(slot index, label)` sorted by slot index.
    pub faults: Vec<(usize, Pauli)>,
}

impl FaultPath {
    pub fn order(&self) -> usize {
        self.faults.len()
    }

    pub fn fault_counts(&self) -> [u32; 3] {
        let mut c = [0; 3];
        for (_, p) in &self.faults {
            if let Some(i) = label_index(*p) {
                c[i] += 1;
            }
        }
        c
    }

    pub fn label(&self, slot: usize) -> Pauli {
        self.faults
            .iter()
            .find(|(s, _)| *s == slot)
            .map_or(Pauli::I, |(_, p)| *p)
    }
}

/// `Σ_{k ≤ max_order} C(n_slots, k) · 3^k`.
pub fn path_count(n_slots: usize, max_order: u32) -> BigUint {
    let mut total = BigUint::from(0u32);
    let mut binom = BigUint::from(1u32);
    let mut pow3 = BigUint::from(1u32);
    for k in 0..=max_order as usize {
        if k > n_slots {
            break;
        }
        if k > 0 {
            binom = binom * (n_slots - k + 1) / k;
            pow3 *= 3u32;
        }
        total += &binom * &pow3;
    }
    total
}

/// Every fault path of order `≤ max_order` with its truncated weight.
///
/// Ordered by increasing order, then lexicographically by slot indices, then
/// by labels (X < Y < Z).
pub fn enumerate_fault_paths(
    circuit: &NoisyCircuit,
    max_order: u32,
) -> impl Iterator<Item = (FaultPath, ErrorPolynomial)> {
    let n_slots = collect_slots(circuit).len();
    let idle: Vec<ErrorPolynomial> = (0..=max_order.min(n_slots as u32))
        .map(|k| ErrorPolynomial::p_identity(max_order).pow(n_slots as u32 - k))
        .collect();
    (0..=max_order as usize)
        .filter(move |&k| k <= n_slots)
        .flat_map(move |k| {
            (0..n_slots).combinations(k).flat_map(move |slots| {
                std::iter::repeat_n(Pauli::ERRORS, k)
                    .multi_cartesian_product()
                    .map(move |labels| FaultPath {
                        faults: slots.iter().copied().zip(labels).collect(),
                    })
            })
        })
        .map(move |path| {
            let counts = path.fault_counts();
            let w = idle[path.order()].mul_monomial(Monomial(counts), &BigRational::one());
            (path, w)
        })
}
