//! Phase-free n-qubit Pauli operators stored as packed X/Z bit vectors.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// The three non-identity labels, in enumeration order.
    pub const ERRORS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// An n-qubit Pauli string without phase. Qubit `j` carries an X component iff
/// bit `j` of `x` is set and a Z component iff bit `j` of `z` is set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliOperator {
            n,
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Result<Self> {
        let mut op = Self::identity(n);
        op.set(qubit, p)?;
        Ok(op)
    }

    /// `p` on every listed qubit.
    pub fn on_qubits(n: usize, qubits: &[usize], p: Pauli) -> Result<Self> {
        let mut op = Self::identity(n);
        for &q in qubits {
            op.set(q, p)?;
        }
        Ok(op)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, q: usize) -> Pauli {
        let (w, b) = (q / 64, q % 64);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        let (w, b) = (q / 64, q % 64);
        let (px, pz) = p.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((px as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((pz as u64) << b);
        Ok(())
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn commutes_with(&self, other: &PauliOperator) -> bool {
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        parity & 1 == 0
    }

    /// Product up to phase.
    pub fn mul_assign(&mut self, other: &PauliOperator) {
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
    }

    /// Qubits with a non-identity component.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli::I).collect()
    }

    pub(crate) fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub(crate) fn z_words(&self) -> &[u64] {
        &self.z
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    /// Parses strings such as `"XIZY"`; qubit 0 is the leftmost character.
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut op = PauliOperator::identity(chars.len());
        for (q, c) in chars.into_iter().enumerate() {
            let p = match c.to_ascii_uppercase() {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Invalid(format!("not a Pauli label: {other:?}"))),
            };
            op.set(q, p)?;
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_counts_non_identity_qubits() {
        let p: PauliOperator = "XIYZI".parse().unwrap();
        assert_eq!(p.weight(), 3);
        assert_eq!(PauliOperator::identity(5).weight(), 0);
        assert_eq!(p.support(), vec![0, 2, 3]);
        assert_eq!(p.to_string(), "XIYZI");
    }

    #[test]
    fn commutation() {
        let xx: PauliOperator = "XX".parse().unwrap();
        let zz: PauliOperator = "ZZ".parse().unwrap();
        let zi: PauliOperator = "ZI".parse().unwrap();
        assert!(xx.commutes_with(&zz));
        assert!(!xx.commutes_with(&zi));
        let y: PauliOperator = "Y".parse().unwrap();
        let x: PauliOperator = "X".parse().unwrap();
        assert!(!y.commutes_with(&x));
    }

    #[test]
    fn wide_operators_span_words() {
        let mut p = PauliOperator::identity(130);
        p.set(129, Pauli::Y).unwrap();
        p.set(3, Pauli::X).unwrap();
        assert_eq!(p.get(129), Pauli::Y);
        assert_eq!(p.weight(), 2);
        assert!(p.set(130, Pauli::X).is_err());
    }

    #[test]
    fn self_product_is_identity() {
        let p: PauliOperator = "XYZIZ".parse().unwrap();
        let mut q = p.clone();
        q.mul_assign(&p);
        assert!(q.is_identity());
    }
}
