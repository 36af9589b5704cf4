//! Stabilizer tableau with destabilizers (Aaronson-Gottesman layout).
//!
//! Rows `0..n` are destabilizers and rows `n..2n` stabilizers. Each row is a
//! run of `w = ceil(n / 64)` words in the X block and the same in the Z block;
//! signs live in a separate vector. Only projective Pauli measurements are
//! supported, which is all a measurement-only circuit needs.

use rand::Rng;

use crate::error::{MocError, Result};
use crate::gf2::{rank_in_place, words_for, BitMatrix, WORD_BITS};
use crate::mask::SubsystemMask;
use crate::pauli::{mul_into, symplectic_parity, Basis, Pauli, PauliString, Phase};

/// Result of a projective measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Outcome {
    /// `+1` or `-1`.
    pub eigenvalue: i8,
    /// True when the operator commuted with the whole stabilizer group.
    pub deterministic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    w: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    // true means a -1 sign
    sign: Vec<bool>,
}

impl StabilizerTableau {
    /// `|+>^n`: stabilizers `X_i`, destabilizers `Z_i`.
    pub fn new_plus_state(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(MocError::InvalidArgument("tableau needs at least one qubit".into()));
        }
        let mut t = Self::blank(n_qubits);
        for q in 0..n_qubits {
            t.set_bit(q, q, Pauli::Z);
            t.set_bit(n_qubits + q, q, Pauli::X);
        }
        Ok(t)
    }

    /// `n_system` qubits in `|+>` except `seed_site`, which forms a Bell pair
    /// with an ancilla stored at index `n_system`.
    pub fn new_ancilla_seeded_state(n_system: usize, seed_site: usize) -> Result<Self> {
        if seed_site >= n_system {
            return Err(MocError::InvalidArgument(format!(
                "seed site {seed_site} outside system of {n_system} qubits"
            )));
        }
        let n = n_system + 1;
        let a = n_system;
        let mut t = Self::blank(n);
        for q in 0..n_system {
            if q == seed_site {
                continue;
            }
            t.set_bit(q, q, Pauli::Z);
            t.set_bit(n + q, q, Pauli::X);
        }
        // stabilizers X_s X_a and Z_s Z_a, destabilized by Z_s and X_a
        t.set_bit(n + seed_site, seed_site, Pauli::X);
        t.set_bit(n + seed_site, a, Pauli::X);
        t.set_bit(seed_site, seed_site, Pauli::Z);
        t.set_bit(n + a, seed_site, Pauli::Z);
        t.set_bit(n + a, a, Pauli::Z);
        t.set_bit(a, a, Pauli::X);
        Ok(t)
    }

    fn blank(n: usize) -> Self {
        let w = words_for(n);
        Self { n, w, x: vec![0; 2 * n * w], z: vec![0; 2 * n * w], sign: vec![false; 2 * n] }
    }

    fn set_bit(&mut self, row: usize, q: usize, p: Pauli) {
        let (xb, zb) = p.bits();
        let idx = row * self.w + q / WORD_BITS;
        let mask = 1u64 << (q % WORD_BITS);
        if xb { self.x[idx] |= mask } else { self.x[idx] &= !mask }
        if zb { self.z[idx] |= mask } else { self.z[idx] &= !mask }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    fn row(&self, r: usize) -> (&[u64], &[u64]) {
        let s = r * self.w..(r + 1) * self.w;
        (&self.x[s.clone()], &self.z[s])
    }

    fn row_to_pauli(&self, r: usize) -> PauliString {
        let mut p = PauliString::identity(self.n);
        let (x, z) = self.row(r);
        p.x.copy_from_slice(x);
        p.z.copy_from_slice(z);
        p.with_phase(if self.sign[r] { Phase::MINUS_ONE } else { Phase::PLUS_ONE })
    }

    pub fn stabilizer(&self, i: usize) -> PauliString {
        self.row_to_pauli(self.n + i)
    }

    pub fn destabilizer(&self, i: usize) -> PauliString {
        self.row_to_pauli(i)
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|i| self.stabilizer(i)).collect()
    }

    #[inline]
    /// Whether row `r` anticommutes with `op`, reading only the words in
    /// `support` (those where `op` acts).
    fn anticommutes_on(&self, r: usize, op: &PauliString, support: &[usize]) -> bool {
        let base = r * self.w;
        let mut acc = 0u64;
        for &k in support {
            acc ^= (self.x[base + k] & op.z[k]) ^ (self.z[base + k] & op.x[k]);
        }
        acc.count_ones() % 2 == 1
    }

    /// Row `dst` becomes `row(src) * row(dst)`.
    fn row_mul(&mut self, dst: usize, src: usize) {
        let w = self.w;
        debug_assert_ne!(dst, src);
        let (xs, xd) = split_rows(&mut self.x, w, src, dst);
        let (zs, zd) = split_rows(&mut self.z, w, src, dst);
        if dst < self.n {
            // destabilizer signs are never read, so skip the phase
            for k in 0..w {
                xd[k] ^= xs[k];
                zd[k] ^= zs[k];
            }
            return;
        }
        let k = mul_into(xs, zs, xd, zd);
        let log_i = 2 * u32::from(self.sign[src]) + 2 * u32::from(self.sign[dst]) + k;
        self.sign[dst] = log_i % 4 >= 2;
    }

    fn validate_op(&self, op: &PauliString) -> Result<()> {
        if op.n_qubits() != self.n {
            return Err(MocError::InvalidArgument(format!(
                "operator on {} qubits applied to {}-qubit tableau",
                op.n_qubits(),
                self.n
            )));
        }
        if op.is_identity() {
            return Err(MocError::InvalidArgument("cannot measure the identity".into()));
        }
        if op.phase() != Phase::PLUS_ONE {
            return Err(MocError::InvalidArgument("measured operator must carry phase +1".into()));
        }
        Ok(())
    }

    /// Projectively measures a Hermitian Pauli string with phase +1.
    ///
    /// Random outcomes are fair coin flips drawn from `rng`; deterministic
    /// outcomes leave the tableau untouched.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, op: &PauliString, rng: &mut R) -> Result<Outcome> {
        self.validate_op(op)?;
        Ok(self.measure_with(op, || rng.random::<bool>()))
    }

    /// Measures with a prescribed outcome for the random branch. A
    /// deterministic outcome that disagrees with `eigenvalue` is an error.
    pub fn measure_pauli_forced(&mut self, op: &PauliString, eigenvalue: i8) -> Result<Outcome> {
        self.validate_op(op)?;
        let out = self.measure_with(op, || eigenvalue < 0);
        if out.eigenvalue != eigenvalue {
            return Err(MocError::ZeroNormBranch(format!("{op} has deterministic outcome {}", out.eigenvalue)));
        }
        Ok(out)
    }

    pub fn measure_parity<R: Rng + ?Sized>(&mut self, basis: Basis, i: usize, j: usize, rng: &mut R) -> Result<Outcome> {
        if i == j || i >= self.n || j >= self.n {
            return Err(MocError::InvalidArgument(format!("bad parity pair ({i}, {j})")));
        }
        let op = PauliString::parity_check(self.n, basis, i, j);
        Ok(self.measure_with(&op, || rng.random::<bool>()))
    }

    fn measure_with(&mut self, op: &PauliString, flip: impl FnOnce() -> bool) -> Outcome {
        let n = self.n;
        let support: Vec<usize> = (0..self.w).filter(|&k| op.x[k] | op.z[k] != 0).collect();
        let pivot = (0..n).find(|&i| self.anticommutes_on(n + i, op, &support));
        match pivot {
            Some(p) => {
                let prow = n + p;
                for r in 0..2 * n {
                    if r != prow && r != p && self.anticommutes_on(r, op, &support) {
                        self.row_mul(r, prow);
                    }
                }
                // old stabilizer becomes the destabilizer of the new one
                let w = self.w;
                self.x.copy_within(prow * w..(prow + 1) * w, p * w);
                self.z.copy_within(prow * w..(prow + 1) * w, p * w);
                self.sign[p] = self.sign[prow];
                self.x[prow * w..(prow + 1) * w].copy_from_slice(&op.x);
                self.z[prow * w..(prow + 1) * w].copy_from_slice(&op.z);
                let minus = flip();
                self.sign[prow] = minus;
                Outcome { eigenvalue: if minus { -1 } else { 1 }, deterministic: false }
            }
            None => {
                let mut sx = vec![0u64; self.w];
                let mut sz = vec![0u64; self.w];
                let mut log_i = 0u32;
                for i in 0..n {
                    if self.anticommutes_on(i, op, &support) {
                        let (x, z) = self.row(n + i);
                        log_i += 2 * u32::from(self.sign[n + i]) + mul_into(x, z, &mut sx, &mut sz);
                    }
                }
                debug_assert!(sx == op.x && sz == op.z, "op not in stabilizer group");
                debug_assert!(log_i.is_multiple_of(2));
                Outcome { eigenvalue: if log_i % 4 == 2 { -1 } else { 1 }, deterministic: true }
            }
        }
    }

    /// Entanglement entropy of `region` in bits: `rank(G|_region) - |region|`.
    pub fn entropy(&self, region: &SubsystemMask) -> Result<usize> {
        if region.is_empty() {
            return Err(MocError::InvalidArgument("entropy of an empty region".into()));
        }
        region.check_in_range(self.n)?;
        Ok(self.entropy_unchecked(region.members()))
    }

    pub(crate) fn entropy_unchecked(&self, members: &[usize]) -> usize {
        self.restricted_rank(members) - members.len()
    }

    fn restricted_rank(&self, members: &[usize]) -> usize {
        let n = self.n;
        let w = self.w;
        let k = members.len();
        let locs: Vec<(usize, u32)> = members.iter().map(|&q| (q / WORD_BITS, (q % WORD_BITS) as u32)).collect();
        if 2 * k <= WORD_BITS {
            // single-word rows: incremental xor basis keyed by leading bit
            let mut basis: Vec<u64> = Vec::with_capacity(2 * k);
            for r in n..2 * n {
                let base = r * w;
                let mut v = 0u64;
                for (m, &(wi, b)) in locs.iter().enumerate() {
                    v |= ((self.x[base + wi] >> b) & 1) << (2 * m);
                    v |= ((self.z[base + wi] >> b) & 1) << (2 * m + 1);
                }
                for &b in &basis {
                    v = v.min(v ^ b);
                }
                if v != 0 {
                    let pos = basis.partition_point(|&b| b > v);
                    basis.insert(pos, v);
                    if basis.len() == 2 * k {
                        break;
                    }
                }
            }
            basis.len()
        } else {
            let cols = 2 * k;
            let stride = words_for(cols);
            let mut buf = vec![0u64; n * stride];
            for (i, r) in (n..2 * n).enumerate() {
                let base = r * w;
                let row = &mut buf[i * stride..(i + 1) * stride];
                for (m, &(wi, b)) in locs.iter().enumerate() {
                    let xb = (self.x[base + wi] >> b) & 1;
                    let zb = (self.z[base + wi] >> b) & 1;
                    row[(2 * m) / WORD_BITS] |= xb << ((2 * m) % WORD_BITS);
                    row[(2 * m + 1) / WORD_BITS] |= zb << ((2 * m + 1) % WORD_BITS);
                }
            }
            rank_in_place(&mut buf, n, cols, stride)
        }
    }

    /// The `n x 2n` check matrix of the stabilizer rows (X block then Z block).
    pub fn check_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.n, 2 * self.n);
        for i in 0..self.n {
            let (x, z) = self.row(self.n + i);
            for q in 0..self.n {
                let (wi, b) = (q / WORD_BITS, q % WORD_BITS);
                m.set(i, q, (x[wi] >> b) & 1 == 1);
                m.set(i, self.n + q, (z[wi] >> b) & 1 == 1);
            }
        }
        m
    }

    /// Verifies the symplectic structure: stabilizers commute pairwise and
    /// have full rank, and destabilizer `i` anticommutes only with stabilizer `i`.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.n;
        let sp = |a: usize, b: usize| {
            let (xa, za) = self.row(a);
            let (xb, zb) = self.row(b);
            symplectic_parity(xa, za, xb, zb)
        };
        for i in 0..n {
            for j in 0..n {
                if i < j && sp(n + i, n + j) != 0 {
                    return Err(format!("stabilizers {i} and {j} anticommute"));
                }
                if i < j && sp(i, j) != 0 {
                    return Err(format!("destabilizers {i} and {j} anticommute"));
                }
                let expect = u32::from(i == j);
                if sp(i, n + j) != expect {
                    return Err(format!("destabilizer {i} vs stabilizer {j}: parity {}", sp(i, n + j)));
                }
            }
        }
        let rank = self.check_matrix().rank();
        if rank != n {
            return Err(format!("check matrix rank {rank} != {n}"));
        }
        Ok(())
    }
}

fn split_rows(buf: &mut [u64], w: usize, src: usize, dst: usize) -> (&[u64], &mut [u64]) {
    if src < dst {
        let (a, b) = buf.split_at_mut(dst * w);
        (&a[src * w..(src + 1) * w], &mut b[..w])
    } else {
        let (a, b) = buf.split_at_mut(src * w);
        (&b[..w], &mut a[dst * w..(dst + 1) * w])
    }
}

/// Rank over GF(2) of an arbitrary bit matrix.
pub fn gf2_rank(matrix: &BitMatrix) -> usize {
    matrix.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn plus_state_generators() {
        let t = StabilizerTableau::new_plus_state(4).unwrap();
        let gens: Vec<String> = t.stabilizers().iter().map(|p| p.to_string()).collect();
        assert_eq!(gens, ["+XIII", "+IXII", "+IIXI", "+IIIX"]);
        t.check_invariants().unwrap();
        for q in 0..4 {
            assert_eq!(t.entropy(&SubsystemMask::single(q)).unwrap(), 0);
        }
        assert_eq!(t.entropy(&SubsystemMask::range(0, 2)).unwrap(), 0);
    }

    #[test]
    fn zero_qubits_rejected() {
        assert!(StabilizerTableau::new_plus_state(0).is_err());
    }

    #[test]
    fn single_qubit_x_is_deterministic() {
        let mut t = StabilizerTableau::new_plus_state(1).unwrap();
        let op = PauliString::single(1, 0, Pauli::X);
        let out = t.measure_pauli(&op, &mut rng()).unwrap();
        assert_eq!(out, Outcome { eigenvalue: 1, deterministic: true });
    }

    #[test]
    fn xx_on_plus_state_leaves_tableau_unchanged() {
        let mut t = StabilizerTableau::new_plus_state(2).unwrap();
        let before = t.clone();
        let out = t.measure_parity(Basis::XX, 0, 1, &mut rng()).unwrap();
        assert_eq!(out.eigenvalue, 1);
        assert!(out.deterministic);
        assert_eq!(t, before);
    }

    #[test]
    fn zz_creates_bell_pair() {
        let mut t = StabilizerTableau::new_plus_state(2).unwrap();
        let out = t.measure_parity(Basis::ZZ, 0, 1, &mut rng()).unwrap();
        assert!(!out.deterministic);
        assert_eq!(t.entropy(&SubsystemMask::single(0)).unwrap(), 1);
        t.check_invariants().unwrap();
        // measuring again returns the same eigenvalue
        let again = t.measure_parity(Basis::ZZ, 0, 1, &mut rng()).unwrap();
        assert_eq!(again, Outcome { eigenvalue: out.eigenvalue, deterministic: true });
    }

    #[test]
    fn zz_outcomes_are_fair() {
        let mut r = rng();
        let trials = 10_000;
        let plus = (0..trials)
            .filter(|_| {
                let mut t = StabilizerTableau::new_plus_state(2).unwrap();
                t.measure_parity(Basis::ZZ, 0, 1, &mut r).unwrap().eigenvalue == 1
            })
            .count();
        let freq = plus as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.02, "frequency {freq}");
    }

    #[test]
    fn ancilla_seed() {
        let t = StabilizerTableau::new_ancilla_seeded_state(2, 0).unwrap();
        t.check_invariants().unwrap();
        assert_eq!(t.n_qubits(), 3);
        assert_eq!(t.entropy(&SubsystemMask::single(2)).unwrap(), 1);
        assert_eq!(t.entropy(&SubsystemMask::single(1)).unwrap(), 0);

        let t = StabilizerTableau::new_ancilla_seeded_state(4, 2).unwrap();
        let s = |m: SubsystemMask| t.entropy(&m).unwrap();
        let mi = s(SubsystemMask::single(4)) + s(SubsystemMask::single(2)) - s(SubsystemMask::pair(2, 4));
        assert_eq!(mi, 2);
        assert!(StabilizerTableau::new_ancilla_seeded_state(3, 3).is_err());
    }

    #[test]
    fn measurement_rejects_bad_operators() {
        let mut t = StabilizerTableau::new_plus_state(3).unwrap();
        assert!(t.measure_pauli(&PauliString::identity(3), &mut rng()).is_err());
        let neg = PauliString::single(3, 0, Pauli::Z).with_phase(Phase::MINUS_ONE);
        assert!(t.measure_pauli(&neg, &mut rng()).is_err());
        assert!(t.measure_pauli(&PauliString::single(2, 0, Pauli::Z), &mut rng()).is_err());
        assert!(t.measure_parity(Basis::ZZ, 1, 1, &mut rng()).is_err());
    }

    #[test]
    fn forced_outcomes() {
        let mut t = StabilizerTableau::new_plus_state(2).unwrap();
        let zz = PauliString::parity_check(2, Basis::ZZ, 0, 1);
        let out = t.measure_pauli_forced(&zz, -1).unwrap();
        assert_eq!(out.eigenvalue, -1);
        assert_eq!(t.stabilizer(0).to_string(), "-ZZ");
        assert_eq!(t.stabilizer(1).to_string(), "+XX");
        assert!(t.measure_pauli_forced(&zz, 1).is_err());
        // XX still holds with +1 and YY = -(XX)(ZZ) follows as +1
        let yy = PauliString::parity_check(2, Basis::YY, 0, 1);
        assert_eq!(t.measure_pauli(&yy, &mut rng()).unwrap(), Outcome { eigenvalue: 1, deterministic: true });
    }

    #[test]
    fn empty_region_rejected() {
        let t = StabilizerTableau::new_plus_state(3).unwrap();
        assert!(t.entropy(&SubsystemMask::default()).is_err());
        assert!(t.entropy(&SubsystemMask::single(3)).is_err());
    }

    #[test]
    fn wide_regions_use_matrix_path() {
        // 40 Bell pairs (i, i + 40): half-chain entropy equals the pair count
        let n = 80;
        let mut t = StabilizerTableau::new_plus_state(n).unwrap();
        let mut r = rng();
        for i in 0..40 {
            t.measure_parity(Basis::ZZ, i, i + 40, &mut r).unwrap();
        }
        assert_eq!(t.entropy(&SubsystemMask::range(0, 40)).unwrap(), 40);
        assert_eq!(t.entropy(&SubsystemMask::range(0, 10)).unwrap(), 10);
        assert_eq!(t.entropy(&SubsystemMask::range(0, 50)).unwrap(), 30);
    }
}
