//! Dense state-vector simulator used as ground truth for small systems.
//!
//! Qubit `q` is bit `q` of the basis-state index.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{MocError, Result};
use crate::mask::SubsystemMask;
use crate::pauli::{Basis, Pauli, PauliString, Phase};

/// Largest register the oracle accepts.
pub const DENSE_MAX_QUBITS: usize = 12;

const EIGEN_FLOOR: f64 = 1e-12;
const BRANCH_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    fn check_size(n: usize) -> Result<()> {
        if n == 0 || n > DENSE_MAX_QUBITS {
            return Err(MocError::SizeCap(format!("dense oracle supports 1..={DENSE_MAX_QUBITS} qubits, got {n}")));
        }
        Ok(())
    }

    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        Self::check_size(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn plus_state(n_qubits: usize) -> Result<Self> {
        Self::check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self { n_qubits, amps: vec![a; dim] })
    }

    /// `|+>^n` with qubit `seed_site` Bell-paired to an ancilla at index `n_system`.
    pub fn ancilla_seeded_state(n_system: usize, seed_site: usize) -> Result<Self> {
        if seed_site >= n_system {
            return Err(MocError::InvalidArgument(format!("seed site {seed_site} outside 0..{n_system}")));
        }
        let n = n_system + 1;
        Self::check_size(n)?;
        let dim = 1usize << n;
        let amp = Complex64::new(1.0 / ((1usize << (n_system - 1)) as f64 * 2.0).sqrt(), 0.0);
        let amps = (0..dim)
            .map(|b| {
                let s = (b >> seed_site) & 1;
                let a = (b >> n_system) & 1;
                if s == a { amp } else { Complex64::new(0.0, 0.0) }
            })
            .collect();
        Ok(Self { n_qubits: n, amps })
    }

    /// Wraps raw amplitudes, which must have power-of-two length. Not renormalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(MocError::InvalidArgument(format!("amplitude vector length {len} is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        Self::check_size(n)?;
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let nrm = self.norm_sqr();
        if nrm < BRANCH_FLOOR {
            return Err(MocError::ZeroNormBranch("cannot normalize a null vector".into()));
        }
        let s = 1.0 / nrm.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= s);
        Ok(())
    }

    /// `P|psi>` for a Pauli string on the same register.
    pub fn apply_pauli(&self, op: &PauliString) -> Result<DenseState> {
        if op.n_qubits() != self.n_qubits {
            return Err(MocError::InvalidArgument("Pauli string size mismatch".into()));
        }
        let mut xm = 0usize;
        let mut zm = 0usize;
        let mut n_y = 0u32;
        for q in 0..self.n_qubits {
            match op.get(q) {
                Pauli::I => {}
                Pauli::X => xm |= 1 << q,
                Pauli::Z => zm |= 1 << q,
                Pauli::Y => {
                    xm |= 1 << q;
                    zm |= 1 << q;
                    n_y += 1;
                }
            }
        }
        // Y = i X Z on each site
        let global = i_pow(n_y + u32::from(op.phase().log_i()));
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let sign = if (b & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[b ^ xm] += a * global * sign;
        }
        Ok(DenseState { n_qubits: self.n_qubits, amps: out })
    }

    /// Unnormalized branch `(I + s P)/2 |psi>` for eigenvalue `s`.
    pub fn project(&self, op: &PauliString, eigenvalue: i8) -> Result<DenseState> {
        if op.phase() != Phase::PLUS_ONE || op.is_identity() {
            return Err(MocError::InvalidArgument("projector needs a non-identity operator with phase +1".into()));
        }
        let p = self.apply_pauli(op)?;
        let s = f64::from(eigenvalue.signum());
        let amps = self.amps.iter().zip(&p.amps).map(|(a, b)| (a + b * s) * 0.5).collect();
        Ok(DenseState { n_qubits: self.n_qubits, amps })
    }

    /// Born-rule projective measurement of `op`; the state is renormalized.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, op: &PauliString, rng: &mut R) -> Result<i8> {
        let plus = self.project(op, 1)?;
        let p_plus = plus.norm_sqr() / self.norm_sqr();
        let eigen = if rng.random::<f64>() < p_plus { 1 } else { -1 };
        self.measure_pauli_forced(op, eigen)
    }

    /// Projects onto the prescribed eigenvalue; a zero-norm branch is an error.
    pub fn measure_pauli_forced(&mut self, op: &PauliString, eigenvalue: i8) -> Result<i8> {
        let mut branch = self.project(op, eigenvalue)?;
        if branch.norm_sqr() < BRANCH_FLOOR {
            return Err(MocError::ZeroNormBranch(format!("{op} outcome {eigenvalue}")));
        }
        branch.normalize()?;
        *self = branch;
        Ok(eigenvalue)
    }

    pub fn measure_parity<R: Rng + ?Sized>(&mut self, basis: Basis, i: usize, j: usize, rng: &mut R) -> Result<i8> {
        if i == j || i >= self.n_qubits || j >= self.n_qubits {
            return Err(MocError::InvalidArgument(format!("bad parity pair ({i}, {j})")));
        }
        self.measure_pauli(&PauliString::parity_check(self.n_qubits, basis, i, j), rng)
    }

    /// Probability of outcome `+1` for `op`.
    pub fn prob_plus(&self, op: &PauliString) -> Result<f64> {
        Ok(self.project(op, 1)?.norm_sqr() / self.norm_sqr())
    }

    pub fn apply_single_qubit(&mut self, u: &Matrix2<Complex64>, q: usize) {
        let bit = 1usize << q;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let (a0, a1) = (self.amps[b], self.amps[b | bit]);
                self.amps[b] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                self.amps[b | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
            }
        }
    }

    /// Reduced density matrix of `region` (unnormalized if the state is).
    /// Row index bit `k` is the `k`-th member of the region.
    pub fn reduced_density_matrix(&self, region: &SubsystemMask) -> Result<DMatrix<Complex64>> {
        if region.is_empty() {
            return Err(MocError::InvalidArgument("reduced density matrix of an empty region".into()));
        }
        region.check_in_range(self.n_qubits)?;
        let members = region.members();
        let rest = region.complement(self.n_qubits);
        let (da, db) = (1usize << members.len(), 1usize << rest.len());
        let mut m = DMatrix::<Complex64>::zeros(da, db);
        for (b, &amp) in self.amps.iter().enumerate() {
            let ia = gather(b, members);
            let ib = gather(b, rest.members());
            m[(ia, ib)] = amp;
        }
        Ok(&m * m.adjoint())
    }

    /// Von Neumann entropy of `region` in bits.
    pub fn entropy(&self, region: &SubsystemMask) -> Result<f64> {
        if region.is_empty() {
            return Err(MocError::InvalidArgument("entropy of an empty region".into()));
        }
        region.check_in_range(self.n_qubits)?;
        let comp = region.complement(self.n_qubits);
        if comp.is_empty() {
            return Ok(0.0);
        }
        let smaller = if comp.len() < region.len() { &comp } else { region };
        let rho = self.reduced_density_matrix(smaller)? / Complex64::new(self.norm_sqr(), 0.0);
        let eig = rho.symmetric_eigenvalues();
        Ok(eig.iter().filter(|&&l| l > EIGEN_FLOOR).map(|&l| -l * l.log2()).sum())
    }

    /// `Tr(rho_A^2)` of the state as stored (no normalization).
    pub fn purity_unnormalized(&self, region: &SubsystemMask) -> Result<f64> {
        if region.is_empty() {
            return Ok(self.norm_sqr() * self.norm_sqr());
        }
        let rho = self.reduced_density_matrix(region)?;
        Ok(rho.iter().map(|c| c.norm_sqr()).sum())
    }
}

fn gather(b: usize, members: &[usize]) -> usize {
    members.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((b >> q) & 1) << k))
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Haar-random element of U(d): QR of a complex Ginibre matrix with the
/// phases of R's diagonal absorbed into Q.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let (mut q, r) = m.qr().unpack();
    for k in 0..d {
        let diag = r[(k, k)];
        let ph = if diag.norm() > 0.0 { diag / diag.norm() } else { Complex64::new(1.0, 0.0) };
        for row in 0..d {
            q[(row, k)] *= ph;
        }
    }
    q
}

pub fn haar_single_qubit<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<Complex64> {
    let u = haar_unitary(2, rng);
    Matrix2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)])
}
