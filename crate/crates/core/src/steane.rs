//! The [7,1,3] Steane code and noiseless (perfect) error correction.

use crate::error::Result;
use crate::pauli::{Pauli, PauliOperator};
use crate::stabilizer::{BranchProb, SignedPauli, StabilizerState};

/// Static description of the Steane code on data qubits `0..7`.
pub struct SteaneCode;

impl SteaneCode {
    /// Generator supports: rows of the Hamming parity-check matrix,
    /// 1-based `{4,5,6,7}`, `{2,3,6,7}`, `{1,3,5,7}`.
    pub const SUPPORTS: [[usize; 4]; 3] = [[3, 4, 5, 6], [1, 2, 5, 6], [0, 2, 4, 6]];

    fn on_support(n: usize, support: &[usize], p: Pauli) -> PauliOperator {
        PauliOperator::on_qubits(n, support, p).expect("register holds the data qubits")
    }

    /// X-type generators embedded in an `n`-qubit register.
    pub fn x_generators(n: usize) -> Vec<PauliOperator> {
        Self::SUPPORTS
            .iter()
            .map(|s| Self::on_support(n, s, Pauli::X))
            .collect()
    }

    pub fn z_generators(n: usize) -> Vec<PauliOperator> {
        Self::SUPPORTS
            .iter()
            .map(|s| Self::on_support(n, s, Pauli::Z))
            .collect()
    }

    pub fn logical_x(n: usize) -> PauliOperator {
        Self::on_support(n, &[0, 1, 2, 3, 4, 5, 6], Pauli::X)
    }

    pub fn logical_z(n: usize) -> PauliOperator {
        Self::on_support(n, &[0, 1, 2, 3, 4, 5, 6], Pauli::Z)
    }

    /// Generators whose joint `+1` eigenspace is `|0_L⟩⟨0_L|` on the data qubits.
    pub fn zero_l_generators(n: usize) -> Vec<SignedPauli> {
        Self::x_generators(n)
            .into_iter()
            .chain(Self::z_generators(n))
            .chain(std::iter::once(Self::logical_z(n)))
            .map(SignedPauli::plus)
            .collect()
    }

    /// `|0_L⟩` as a 7-qubit stabilizer state.
    pub fn zero_l() -> StabilizerState {
        StabilizerState::from_stabilizers(7, &Self::zero_l_generators(7))
            .expect("Steane generators are independent and commute")
    }

    /// Data qubit flagged by a 3-bit syndrome, or `None` for the trivial one.
    ///
    /// With the supports above, syndrome bits `(s1, s2, s3)` read as the binary
    /// number `4·s1 + 2·s2 + s3` name the 1-based qubit in error.
    pub fn lookup(syndrome: [bool; 3]) -> Option<usize> {
        let idx = (syndrome[0] as usize) << 2 | (syndrome[1] as usize) << 1 | syndrome[2] as usize;
        (idx != 0).then(|| idx - 1)
    }
}

/// Noiseless syndrome extraction and lookup-table recovery on data qubits
/// `0..7`.
///
/// Every generator whose outcome is random forks the state; all forks are
/// returned with their probabilities (summing to one), each corrected
/// according to its own syndrome.
pub fn perfect_ec(state: &StabilizerState) -> Result<Vec<(BranchProb, StabilizerState)>> {
    let n = state.num_qubits();
    let gens: Vec<(PauliOperator, Pauli)> = SteaneCode::x_generators(n)
        .into_iter()
        .map(|g| (g, Pauli::Z))
        .chain(SteaneCode::z_generators(n).into_iter().map(|g| (g, Pauli::X)))
        .collect();

    let mut branches = vec![(BranchProb::ONE, state.clone(), [false; 6])];
    for (i, (g, _)) in gens.iter().enumerate() {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for (prob, s, syn) in branches {
            match s.deterministic_sign(g)? {
                Some(neg) => {
                    let mut syn = syn;
                    syn[i] = neg;
                    next.push((prob, s, syn));
                }
                None => {
                    for outcome in [false, true] {
                        let mut t = s.clone();
                        let p = t.measure_pauli(&SignedPauli {
                            pauli: g.clone(),
                            negative: outcome,
                        });
                        let mut syn = syn;
                        syn[i] = outcome;
                        next.push((prob * p, t, syn));
                    }
                }
            }
        }
        branches = next;
    }

    branches
        .into_iter()
        .map(|(prob, mut s, syn)| {
            // X-type checks locate Z errors; Z-type checks locate X errors.
            if let Some(q) = SteaneCode::lookup([syn[0], syn[1], syn[2]]) {
                s.pauli(q, Pauli::Z)?;
            }
            if let Some(q) = SteaneCode::lookup([syn[3], syn[4], syn[5]]) {
                s.pauli(q, Pauli::X)?;
            }
            Ok((prob, s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_commute_and_detect_single_errors() {
        let xs = SteaneCode::x_generators(7);
        let zs = SteaneCode::z_generators(7);
        for a in xs.iter().chain(&zs) {
            for b in xs.iter().chain(&zs) {
                assert!(a.commutes_with(b));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for q in 0..7 {
            let e = PauliOperator::single(7, q, Pauli::X).unwrap();
            let syn = [0, 1, 2].map(|i| !zs[i].commutes_with(&e));
            assert_eq!(SteaneCode::lookup(syn), Some(q));
            assert!(seen.insert(syn));
        }
    }

    #[test]
    fn zero_l_is_codeword() {
        let s = SteaneCode::zero_l();
        s.check_invariants().unwrap();
        for g in SteaneCode::zero_l_generators(7) {
            assert_eq!(s.deterministic_sign(&g.pauli).unwrap(), Some(false));
        }
    }

    fn corrected_fidelity(err: &PauliOperator) -> f64 {
        let mut s = SteaneCode::zero_l();
        s.apply_pauli(err).unwrap();
        let target = SteaneCode::zero_l();
        perfect_ec(&s)
            .unwrap()
            .iter()
            .map(|(p, t)| p.to_f64() * t.overlap_sq(&target).unwrap().to_f64())
            .sum()
    }

    #[test]
    fn corrects_all_weight_one_errors() {
        assert_eq!(corrected_fidelity(&PauliOperator::identity(7)), 1.0);
        for q in 0..7 {
            for p in Pauli::ERRORS {
                let e = PauliOperator::single(7, q, p).unwrap();
                assert_eq!(corrected_fidelity(&e), 1.0, "{e}");
            }
        }
    }

    #[test]
    fn two_bit_flips_become_logical_error() {
        let e: PauliOperator = "XXIIIII".parse().unwrap();
        assert_eq!(corrected_fidelity(&e), 0.0);
    }

    #[test]
    fn random_syndromes_fork() {
        // |0000000⟩ is not an X-generator eigenstate: all 8 X-syndromes occur.
        let branches = perfect_ec(&StabilizerState::zero(7)).unwrap();
        assert_eq!(branches.len(), 8);
        let total: f64 = branches.iter().map(|(p, _)| p.to_f64()).sum();
        assert_eq!(total, 1.0);
    }
}
