//! Stabilizer tableau simulator (Aaronson–Gottesman layout).
//!
//! Rows `0..n` are destabilizers and rows `n..2n` stabilizers. Each row is a
//! Hermitian Pauli string (`x = z = 1` means `Y`) together with a sign bit.
//! Global phase is not tracked; every quantity computed from a state
//! (probabilities, overlaps) is insensitive to it.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pauli::{words_for, Pauli, PauliOperator};

/// Probability of a measurement branch. Every branch probability of a
/// stabilizer circuit is either zero or a power of one half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchProb {
    Zero,
    /// `2^-k`
    Pow2(u32),
}

impl BranchProb {
    pub const ONE: BranchProb = BranchProb::Pow2(0);
    pub const HALF: BranchProb = BranchProb::Pow2(1);

    pub fn is_zero(self) -> bool {
        self == BranchProb::Zero
    }

    pub fn exponent(self) -> Option<u32> {
        match self {
            BranchProb::Zero => None,
            BranchProb::Pow2(k) => Some(k),
        }
    }

    pub fn to_rational(self) -> BigRational {
        match self {
            BranchProb::Zero => BigRational::zero(),
            BranchProb::Pow2(k) => {
                BigRational::new(BigInt::one(), BigInt::one() << k as usize)
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            BranchProb::Zero => 0.0,
            BranchProb::Pow2(k) => 0.5f64.powi(k as i32),
        }
    }
}

impl std::ops::Mul for BranchProb {
    type Output = BranchProb;

    fn mul(self, rhs: BranchProb) -> BranchProb {
        match (self, rhs) {
            (BranchProb::Pow2(a), BranchProb::Pow2(b)) => BranchProb::Pow2(a + b),
            _ => BranchProb::Zero,
        }
    }
}

/// Single-qubit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Z,
    X,
}

/// A Pauli generator with a sign: represents `(-1)^negative · pauli`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub pauli: PauliOperator,
    pub negative: bool,
}

impl SignedPauli {
    pub fn plus(pauli: PauliOperator) -> Self {
        SignedPauli {
            pauli,
            negative: false,
        }
    }
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negative { '-' } else { '+' }, self.pauli)
    }
}

/// Pure n-qubit stabilizer state.
#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerState {
    n: usize,
    words: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    signs: Vec<u8>,
}

/// Phase exponent `k` (mod 4) with `P_left · P_right = i^k · (P_left ⊕ P_right)`,
/// for Hermitian Pauli strings given as X/Z words. Also overwrites `left` with
/// the phase-free product.
fn mul_in_place(lx: &mut [u64], lz: &mut [u64], rx: &[u64], rz: &[u64]) -> u32 {
    let mut pc1 = 0u32;
    let mut pc2 = 0u32;
    for i in 0..lx.len() {
        let (ox, oz) = (lx[i], lz[i]);
        let (x2, z2) = (rx[i], rz[i]);
        let nx = ox ^ x2;
        let nz = oz ^ z2;
        let x1z2 = ox & z2;
        let anti = (x2 & oz) ^ x1z2;
        // Two-bit counter per position: cnt1 is the low bit, cnt2 the high bit.
        let cnt2 = (x1z2 ^ nx ^ nz) & anti;
        pc1 += anti.count_ones();
        pc2 += cnt2.count_ones();
        lx[i] = nx;
        lz[i] = nz;
    }
    (pc1 + 2 * pc2) & 3
}

impl StabilizerState {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Self {
        let words = words_for(n);
        let mut s = StabilizerState {
            n,
            words,
            xs: vec![0; 2 * n * words],
            zs: vec![0; 2 * n * words],
            signs: vec![0; 2 * n],
        };
        for q in 0..n {
            s.xs[q * words + q / 64] |= 1 << (q % 64);
            s.zs[(n + q) * words + q / 64] |= 1 << (q % 64);
        }
        s
    }

    /// Computational basis state: stabilizers `(-1)^bits[j] Z_j`.
    pub fn new_basis_state(bits: &[bool]) -> Self {
        let mut s = Self::zero(bits.len());
        for (q, &b) in bits.iter().enumerate() {
            s.signs[s.n + q] = b as u8;
        }
        s
    }

    /// Parses a bit string like `"0110"`; qubit 0 is the leftmost character.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let v = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Invalid(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new_basis_state(&v))
    }

    /// The unique state stabilized by `n` independent commuting generators.
    pub fn from_stabilizers(n: usize, generators: &[SignedPauli]) -> Result<Self> {
        if generators.len() != n {
            return Err(Error::Invalid(format!(
                "need {n} generators, got {}",
                generators.len()
            )));
        }
        for g in generators {
            if g.pauli.num_qubits() != n {
                return Err(Error::SizeMismatch(g.pauli.num_qubits(), n));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !a.pauli.commutes_with(&b.pauli) {
                    return Err(Error::Invalid(format!("generators {a} and {b} anticommute")));
                }
            }
        }
        // Impose each generator with whatever sign the measurement allows, then
        // flip the wrong signs with one Pauli.
        let mut s = Self::zero(n);
        let wrong: Vec<bool> = generators.iter().map(|g| s.measure_pauli(g).is_zero()).collect();
        let fix = flip_solution(n, generators, &wrong)?;
        s.apply_pauli(&fix)?;
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange { qubit: q, n: self.n })
        }
    }

    fn row(&self, r: usize) -> (&[u64], &[u64]) {
        let w = self.words;
        (&self.xs[r * w..(r + 1) * w], &self.zs[r * w..(r + 1) * w])
    }

    fn row_pauli(&self, r: usize) -> PauliOperator {
        let mut p = PauliOperator::identity(self.n);
        let (x, z) = self.row(r);
        for q in 0..self.n {
            let (w, b) = (q / 64, q % 64);
            let xb = (x[w] >> b) & 1 == 1;
            let zb = (z[w] >> b) & 1 == 1;
            p.set(q, Pauli::from_bits(xb, zb)).expect("in range");
        }
        p
    }

    /// Stabilizer generators with signs.
    pub fn stabilizers(&self) -> Vec<SignedPauli> {
        (self.n..2 * self.n)
            .map(|r| SignedPauli {
                pauli: self.row_pauli(r),
                negative: self.signs[r] == 1,
            })
            .collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliOperator> {
        (0..self.n).map(|r| self.row_pauli(r)).collect()
    }

    pub fn h(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let w = self.words;
        let (wi, bit) = (q / 64, q % 64);
        for r in 0..2 * self.n {
            let i = r * w + wi;
            let xb = (self.xs[i] >> bit) & 1;
            let zb = (self.zs[i] >> bit) & 1;
            self.signs[r] ^= (xb & zb) as u8;
            let diff = (xb ^ zb) << bit;
            self.xs[i] ^= diff;
            self.zs[i] ^= diff;
        }
        Ok(())
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::SameQubit(control));
        }
        let w = self.words;
        let (cw, cb) = (control / 64, control % 64);
        let (tw, tb) = (target / 64, target % 64);
        for r in 0..2 * self.n {
            let base = r * w;
            let xc = (self.xs[base + cw] >> cb) & 1;
            let zc = (self.zs[base + cw] >> cb) & 1;
            let xt = (self.xs[base + tw] >> tb) & 1;
            let zt = (self.zs[base + tw] >> tb) & 1;
            self.signs[r] ^= (xc & zt & (xt ^ zc ^ 1)) as u8;
            self.xs[base + tw] ^= xc << tb;
            self.zs[base + cw] ^= zt << cb;
        }
        Ok(())
    }

    /// Applies a single-qubit Pauli.
    pub fn pauli(&mut self, q: usize, p: Pauli) -> Result<()> {
        self.check_qubit(q)?;
        if p == Pauli::I {
            return Ok(());
        }
        let (px, pz) = p.bits();
        let w = self.words;
        let (wi, bit) = (q / 64, q % 64);
        for r in 0..2 * self.n {
            let i = r * w + wi;
            let xb = (self.xs[i] >> bit) & 1;
            let zb = (self.zs[i] >> bit) & 1;
            self.signs[r] ^= ((xb & pz as u64) ^ (zb & px as u64)) as u8;
        }
        Ok(())
    }

    /// Applies a multi-qubit Pauli: flips the sign of every row it anticommutes with.
    pub fn apply_pauli(&mut self, p: &PauliOperator) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch(p.num_qubits(), self.n));
        }
        for r in 0..2 * self.n {
            if self.anticommutes(r, p.x_words(), p.z_words()) {
                self.signs[r] ^= 1;
            }
        }
        Ok(())
    }

    fn anticommutes(&self, r: usize, px: &[u64], pz: &[u64]) -> bool {
        let (x, z) = self.row(r);
        let mut parity = 0;
        for i in 0..self.words {
            parity ^= ((x[i] & pz[i]) ^ (z[i] & px[i])).count_ones();
        }
        parity & 1 == 1
    }

    /// Row `h` ← row `h` · row `i`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        let (rx, rz) = {
            let (x, z) = self.row(i);
            (x.to_vec(), z.to_vec())
        };
        let k = mul_in_place(
            &mut self.xs[h * w..(h + 1) * w],
            &mut self.zs[h * w..(h + 1) * w],
            &rx,
            &rz,
        );
        self.signs[h] ^= self.signs[i] ^ ((k >> 1) & 1) as u8;
    }

    /// Sign `s` such that `(-1)^s · p` is in the stabilizer group, or `None` if
    /// neither `p` nor `-p` is.
    pub fn deterministic_sign(&self, p: &PauliOperator) -> Result<Option<bool>> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch(p.num_qubits(), self.n));
        }
        let (px, pz) = (p.x_words(), p.z_words());
        if (self.n..2 * self.n).any(|r| self.anticommutes(r, px, pz)) {
            return Ok(None);
        }
        Ok(Some(self.product_sign(px, pz)))
    }

    /// For `p` commuting with every stabilizer: multiplies together the
    /// stabilizers selected by anticommuting destabilizers and returns the sign.
    fn product_sign(&self, px: &[u64], pz: &[u64]) -> bool {
        let w = self.words;
        let mut ax = vec![0u64; w];
        let mut az = vec![0u64; w];
        let mut sign = 0u32;
        for i in 0..self.n {
            if self.anticommutes(i, px, pz) {
                let (rx, rz) = self.row(self.n + i);
                let k = mul_in_place(&mut ax, &mut az, rx, rz);
                sign ^= self.signs[self.n + i] as u32 ^ ((k >> 1) & 1);
            }
        }
        debug_assert!(ax == px && az == pz, "operator not in stabilizer group");
        sign == 1
    }

    /// Projects onto the `+1` eigenspace of `(-1)^negative · P` and returns the
    /// probability of that outcome. On a zero-probability branch the state is
    /// left unchanged.
    pub fn measure_pauli(&mut self, g: &SignedPauli) -> BranchProb {
        let n = self.n;
        let (px, pz) = (g.pauli.x_words().to_vec(), g.pauli.z_words().to_vec());
        let pivot = (n..2 * n).find(|&r| self.anticommutes(r, &px, &pz));
        match pivot {
            Some(p) => {
                for r in 0..2 * n {
                    if r != p && self.anticommutes(r, &px, &pz) {
                        self.rowsum(r, p);
                    }
                }
                let w = self.words;
                let d = p - n;
                self.xs.copy_within(p * w..(p + 1) * w, d * w);
                self.zs.copy_within(p * w..(p + 1) * w, d * w);
                self.signs[d] = self.signs[p];
                self.xs[p * w..(p + 1) * w].copy_from_slice(&px);
                self.zs[p * w..(p + 1) * w].copy_from_slice(&pz);
                self.signs[p] = g.negative as u8;
                BranchProb::HALF
            }
            None => {
                if self.product_sign(&px, &pz) == g.negative {
                    BranchProb::ONE
                } else {
                    BranchProb::Zero
                }
            }
        }
    }

    /// Measures qubit `q` in `basis` and keeps outcome `keep`
    /// (`false` ↔ `|0⟩` or `|+⟩`).
    pub fn measure_single(&mut self, q: usize, basis: Basis, keep: bool) -> Result<BranchProb> {
        self.check_qubit(q)?;
        let p = match basis {
            Basis::Z => Pauli::Z,
            Basis::X => Pauli::X,
        };
        let g = SignedPauli {
            pauli: PauliOperator::single(self.n, q, p)?,
            negative: keep,
        };
        Ok(self.measure_pauli(&g))
    }

    /// Probability that every generator in `gens` reads `+1` when measured in order,
    /// i.e. `Tr(ρ Π (I+g)/2)`. This is the fidelity of the reduced state with the
    /// stabilizer state the generators define on their support.
    pub fn projector_prob(&self, gens: &[SignedPauli]) -> Result<BranchProb> {
        let mut s = self.clone();
        let mut prob = BranchProb::ONE;
        for g in gens {
            if g.pauli.num_qubits() != self.n {
                return Err(Error::SizeMismatch(g.pauli.num_qubits(), self.n));
            }
            prob = prob * s.measure_pauli(g);
            if prob.is_zero() {
                break;
            }
        }
        Ok(prob)
    }

    /// `|⟨other|self⟩|²`.
    pub fn overlap_sq(&self, other: &StabilizerState) -> Result<BranchProb> {
        if other.n != self.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        self.projector_prob(&other.stabilizers())
    }

    pub fn prob_single_qubit_zero(&self, q: usize) -> Result<BranchProb> {
        self.clone().measure_single(q, Basis::Z, false)
    }

    /// Checks the tableau's commutation structure and GF(2) rank.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n;
        let rows: Vec<PauliOperator> = (0..2 * n).map(|r| self.row_pauli(r)).collect();
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let should_anti = j == i + n;
                if rows[i].commutes_with(&rows[j]) == should_anti {
                    return Err(Error::Invalid(format!(
                        "rows {i} and {j} have wrong commutation"
                    )));
                }
            }
        }
        if gf2_rank(&self.xs, &self.zs, 2 * n, self.words) != 2 * n {
            return Err(Error::Invalid("tableau rows are dependent".into()));
        }
        Ok(())
    }
}

fn gf2_rank(xs: &[u64], zs: &[u64], rows: usize, words: usize) -> usize {
    let mut m: Vec<Vec<u64>> = (0..rows)
        .map(|r| {
            let mut v = xs[r * words..(r + 1) * words].to_vec();
            v.extend_from_slice(&zs[r * words..(r + 1) * words]);
            v
        })
        .collect();
    let cols = 2 * words * 64;
    let mut rank = 0;
    for c in 0..cols {
        let (wi, b) = (c / 64, c % 64);
        let Some(p) = (rank..rows).find(|&r| (m[r][wi] >> b) & 1 == 1) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && (row[wi] >> b) & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

impl fmt::Debug for StabilizerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.stabilizers().iter().map(|g| g.to_string()).collect();
        write!(f, "StabilizerState[{}]", gens.join(", "))
    }
}

/// A Pauli `Q` anticommuting with exactly the generators marked in `flip`:
/// Gaussian elimination over GF(2) on the symplectic products. Fails when the
/// generators are linearly dependent.
fn flip_solution(n: usize, generators: &[SignedPauli], flip: &[bool]) -> Result<PauliOperator> {
    // Unknowns: (u_0..u_n, v_0..v_n) = X and Z bits of Q; row i encodes
    // Σ u_q z_q(g_i) + v_q x_q(g_i) = flip_i.
    let mut rows: Vec<(Vec<bool>, bool)> = generators
        .iter()
        .zip(flip)
        .map(|(g, &f)| {
            let mut r = vec![false; 2 * n];
            for q in 0..n {
                let (x, z) = g.pauli.get(q).bits();
                r[q] = z;
                r[n + q] = x;
            }
            (r, f)
        })
        .collect();
    let mut pivots = Vec::with_capacity(n);
    let mut rank = 0;
    for col in 0..2 * n {
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r].0[col]) else {
            continue;
        };
        rows.swap(rank, pr);
        for r in 0..rows.len() {
            if r != rank && rows[r].0[col] {
                let (pivot_bits, pivot_rhs) = rows[rank].clone();
                for (a, b) in rows[r].0.iter_mut().zip(&pivot_bits) {
                    *a ^= *b;
                }
                rows[r].1 ^= pivot_rhs;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank < n {
        return Err(Error::Invalid("generators are not independent".into()));
    }
    let mut q = PauliOperator::identity(n);
    for (r, &col) in pivots.iter().enumerate() {
        if rows[r].1 {
            let qubit = col % n;
            let (x, z) = q.get(qubit).bits();
            let p = if col < n { Pauli::from_bits(true, z) } else { Pauli::from_bits(x, true) };
            q.set(qubit, p)?;
        }
    }
    Ok(q)
}
