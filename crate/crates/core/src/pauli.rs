//! Pauli strings in the symplectic (x, z) bit representation.
//!
//! A site with `(x, z) = (1, 1)` denotes `Y` itself, not `XZ`; the overall
//! phase is tracked as a power of `i`.

use std::fmt;
use std::str::FromStr;

use crate::error::MocError;
use crate::gf2::{words_for, WORD_BITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }
}

/// Basis of a two-qubit parity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    XX,
    YY,
    ZZ,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::XX, Basis::YY, Basis::ZZ];

    pub fn pauli(self) -> Pauli {
        match self {
            Basis::XX => Pauli::X,
            Basis::YY => Pauli::Y,
            Basis::ZZ => Pauli::Z,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::XX => "XX",
            Basis::YY => "YY",
            Basis::ZZ => "ZZ",
        })
    }
}

/// Global phase `i^k`, `k` in `0..4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_log_i(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn log_i(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    pub(crate) x: Vec<u64>,
    pub(crate) z: Vec<u64>,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        let w = words_for(n_qubits);
        Self { n_qubits, x: vec![0; w], z: vec![0; w], phase: Phase::PLUS_ONE }
    }

    pub fn single(n_qubits: usize, site: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n_qubits);
        s.set(site, p);
        s
    }

    /// `P_i P_j` with phase +1 for the given basis.
    pub fn parity_check(n_qubits: usize, basis: Basis, i: usize, j: usize) -> Self {
        let mut s = Self::identity(n_qubits);
        s.set(i, basis.pauli());
        s.set(j, basis.pauli());
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn get(&self, site: usize) -> Pauli {
        assert!(site < self.n_qubits, "site {site} out of range");
        let (w, b) = (site / WORD_BITS, site % WORD_BITS);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, site: usize, p: Pauli) {
        assert!(site < self.n_qubits, "site {site} out of range");
        let (w, mask) = (site / WORD_BITS, 1u64 << (site % WORD_BITS));
        let (x, z) = p.bits();
        if x { self.x[w] |= mask } else { self.x[w] &= !mask }
        if z { self.z[w] |= mask } else { self.z[w] &= !mask }
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones() as usize).sum()
    }

    /// Sites carrying a non-identity Pauli, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|&q| self.get(q) != Pauli::I).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n_qubits, other.n_qubits);
        symplectic_parity(&self.x, &self.z, &other.x, &other.z) == 0
    }

    /// `self * rhs` including the phase.
    pub fn mul(&self, rhs: &PauliString) -> PauliString {
        assert_eq!(self.n_qubits, rhs.n_qubits);
        let mut out = rhs.clone();
        let k = mul_into(&self.x, &self.z, &mut out.x, &mut out.z);
        out.phase = Phase::from_log_i(self.phase.0 as u32 + rhs.phase.0 as u32 + k);
        out
    }
}

/// Parity of the symplectic form between two packed Pauli strings.
#[inline]
pub(crate) fn symplectic_parity(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u32 {
    let mut acc = 0u64;
    for k in 0..x1.len() {
        acc ^= (x1[k] & z2[k]) ^ (z1[k] & x2[k]);
    }
    acc.count_ones() & 1
}

/// Overwrites `(x2, z2)` with the product `P1 * P2` and returns the extra
/// power of `i` (mod 4) picked up by the per-site products.
#[inline]
pub(crate) fn mul_into(x1: &[u64], z1: &[u64], x2: &mut [u64], z2: &mut [u64]) -> u32 {
    let mut plus = 0u32;
    let mut minus = 0u32;
    for k in 0..x1.len() {
        let (a, b, c, d) = (x1[k], z1[k], x2[k], z2[k]);
        // X*Y = iZ, Y*Z = iX, Z*X = iY and the reversed orders give -i
        let p = (a & !b & c & d) | (a & b & !c & d) | (!a & b & c & !d);
        let m = (a & !b & !c & d) | (a & b & c & !d) | (!a & b & c & d);
        plus += p.count_ones();
        minus += m.count_ones();
        x2[k] = a ^ c;
        z2[k] = b ^ d;
    }
    // plus - minus (mod 4)
    (plus + 3 * minus) % 4
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(sign)?;
        for q in 0..self.n_qubits {
            let c = match self.get(q) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = MocError;

    /// Parses strings such as `"XIZ"`, `"-YY"` or `"+iXZ"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (Phase::PLUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else {
            (Phase::PLUS_ONE, s.strip_prefix('+').unwrap_or(s))
        };
        let mut out = PauliString::identity(body.len());
        for (q, c) in body.chars().enumerate() {
            let p = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(MocError::InvalidArgument(format!("bad Pauli character {other:?}"))),
            };
            out.set(q, p);
        }
        Ok(out.with_phase(phase))
    }
}
