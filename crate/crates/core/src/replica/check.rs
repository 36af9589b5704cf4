//! Identity suite for the replica model: exhaustive weight checks, exact
//! Weingarten inverses, Haar moment and lattice Monte Carlo comparisons.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::dense::haar_unitary;
use crate::error::{MocError, Result};
use crate::mask::SubsystemMask;
use crate::pauli::Basis;
use crate::replica::effective::{effective_gate_projection, EFFECTIVE_RESIDUAL_TOL};
use crate::replica::haar::haar_mc_replica;
use crate::replica::lattice::{conditional_renyi, partition_function, ReplicaLattice};
use crate::replica::perm::Permutation;
use crate::replica::weights::{wm_bruteforce, wm_weight, wm_weight_alt};
use crate::replica::weingarten::{gram_matrix, haar_moment, WeingartenTable};
use crate::sampler::CircuitLayer;

/// Monte Carlo agreement threshold in standard errors.
pub const MC_SIGMAS: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WmCount {
    pub n: usize,
    pub d: u64,
    pub total: usize,
    /// Quadruples where the orbit form equals the literal trace.
    pub equal: usize,
    /// Quadruples where the alternative generator form also agrees.
    pub alt_equal: usize,
}

/// Compares the orbit form against the literal replica trace on all of
/// `S_n^4`.
pub fn wm_exhaustive(n: usize, d: u64) -> Result<WmCount> {
    let all = Permutation::all(n);
    let mut out = WmCount { n, d, total: 0, equal: 0, alt_equal: 0 };
    for s1 in &all {
        for s2 in &all {
            for t1 in &all {
                for t2 in &all {
                    let w = wm_weight(s1, s2, t1, t2, d)?;
                    out.total += 1;
                    if w == wm_bruteforce(s1, s2, t1, t2, d)? {
                        out.equal += 1;
                    }
                    if w == wm_weight_alt(s1, s2, t1, t2, d)? {
                        out.alt_equal += 1;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Whether every `n = 2, d = 2` weight is 8 with all four permutations
/// equal and 4 otherwise.
pub fn wm_two_replica_values() -> Result<bool> {
    let all = Permutation::all(2);
    for s1 in &all {
        for s2 in &all {
            for t1 in &all {
                for t2 in &all {
                    let equal = s1 == s2 && s2 == t1 && t1 == t2;
                    let want = if equal { 8 } else { 4 };
                    if wm_weight(s1, s2, t1, t2, 2)? != want {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramCheck {
    pub n: usize,
    pub d: u64,
    /// `G Wg = I` holds exactly.
    pub identity: bool,
    /// The Gram matrix has no inverse (`d < n`).
    pub singular: bool,
}

pub fn gram_identity_check(n: usize, d: u64) -> Result<GramCheck> {
    let table = match WeingartenTable::new(n, d) {
        Ok(t) => t,
        Err(MocError::SingularGram { .. }) => return Ok(GramCheck { n, d, identity: false, singular: true }),
        Err(e) => return Err(e),
    };
    let g = gram_matrix(n, d);
    let wg = table.inverse_matrix();
    let size = g.len();
    let mut identity = true;
    for r in 0..size {
        for c in 0..size {
            let v = (0..size).fold(BigRational::zero(), |acc, k| acc + &g[r][k] * &wg[k][c]);
            let want = if r == c { BigRational::one() } else { BigRational::zero() };
            identity &= v == want;
        }
    }
    Ok(GramCheck { n, d, identity, singular: false })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McCheck {
    pub label: String,
    pub exact: f64,
    pub mean: f64,
    pub stderr: f64,
}

impl McCheck {
    pub fn z(&self) -> f64 {
        if self.stderr > 0.0 {
            (self.mean - self.exact).abs() / self.stderr
        } else if self.mean == self.exact {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn passed(&self) -> bool {
        self.z() <= MC_SIGMAS
    }
}

type MomentIndices = ([usize; 2], [usize; 2], [usize; 2], [usize; 2]);

const SECOND_MOMENTS: [(&str, MomentIndices); 4] = [
    ("|U00|^4", ([0, 0], [0, 0], [0, 0], [0, 0])),
    ("|U00|^2 |U11|^2", ([0, 1], [0, 1], [0, 1], [0, 1])),
    ("U00 U11 U01* U10*", ([0, 1], [0, 1], [0, 1], [1, 0])),
    ("|U00|^2 |U01|^2", ([0, 0], [0, 1], [0, 0], [0, 1])),
];

/// Second Haar moments of U(d) from the Weingarten sum against sampled
/// unitaries.
pub fn haar_moment_mc<R: Rng + ?Sized>(d: usize, samples: usize, rng: &mut R) -> Result<Vec<McCheck>> {
    if samples < 2 {
        return Err(MocError::InvalidArgument("need at least two samples".into()));
    }
    let table = WeingartenTable::new(2, d as u64)?;
    let mut sums = [(0.0f64, 0.0f64); SECOND_MOMENTS.len()];
    for _ in 0..samples {
        let u = haar_unitary(d, rng);
        for (acc, (_, (i, j, k, l))) in sums.iter_mut().zip(SECOND_MOMENTS.iter()) {
            let v = u[(i[0], j[0])] * u[(i[1], j[1])] * u[(k[0], l[0])].conj() * u[(k[1], l[1])].conj();
            acc.0 += v.re;
            acc.1 += v.re * v.re;
        }
    }
    let m = samples as f64;
    SECOND_MOMENTS
        .iter()
        .zip(sums)
        .map(|((label, (i, j, k, l)), (s, s2))| {
            let exact = haar_moment(&table, i, j, k, l)?
                .to_f64()
                .ok_or_else(|| MocError::InvalidArgument("moment out of range".into()))?;
            let mean = s / m;
            let var = (s2 / m - mean * mean) * m / (m - 1.0);
            Ok(McCheck { label: format!("d={d} {label}"), exact, mean, stderr: (var / m).sqrt() })
        })
        .collect()
}

pub struct ReplicaCase {
    pub label: &'static str,
    pub n_sites: usize,
    pub layers: Vec<CircuitLayer>,
    pub region: SubsystemMask,
}

fn layer(pairs: &[(usize, usize)], bases: &[Basis]) -> CircuitLayer {
    CircuitLayer { pairs: pairs.to_vec(), bases: bases.to_vec() }
}

/// Small circuits on 2 to 4 sites with one or two measurement layers.
pub fn replica_cases() -> Vec<ReplicaCase> {
    use Basis::{XX, YY, ZZ};
    vec![
        ReplicaCase { label: "N=2 one layer", n_sites: 2, layers: vec![layer(&[(0, 1)], &[ZZ])], region: SubsystemMask::single(0) },
        ReplicaCase {
            label: "N=2 two layers",
            n_sites: 2,
            layers: vec![layer(&[(0, 1)], &[XX]), layer(&[(0, 1)], &[ZZ])],
            region: SubsystemMask::single(1),
        },
        ReplicaCase { label: "N=3 one layer", n_sites: 3, layers: vec![layer(&[(0, 2)], &[YY])], region: SubsystemMask::single(0) },
        ReplicaCase {
            label: "N=3 two layers",
            n_sites: 3,
            layers: vec![layer(&[(0, 1)], &[ZZ]), layer(&[(1, 2)], &[XX])],
            region: SubsystemMask::single(0),
        },
        ReplicaCase {
            label: "N=4 one layer",
            n_sites: 4,
            layers: vec![layer(&[(0, 2), (1, 3)], &[ZZ, YY])],
            region: SubsystemMask::pair(0, 1),
        },
        ReplicaCase {
            label: "N=4 two layers",
            n_sites: 4,
            layers: vec![layer(&[(0, 1), (2, 3)], &[XX, ZZ]), layer(&[(1, 2), (3, 0)], &[YY, ZZ])],
            region: SubsystemMask::pair(0, 1),
        },
    ]
}

/// `exp(-S_A^(2))` from the exact partition functions against the Haar
/// Monte Carlo estimate, for every case of [`replica_cases`].
pub fn replica_check<R: Rng + ?Sized>(samples: usize, rng: &mut R) -> Result<Vec<McCheck>> {
    replica_cases()
        .into_iter()
        .map(|case| {
            let lattice = ReplicaLattice::from_layers(case.n_sites, &case.layers, 2, 2)?;
            let z_a = partition_function(&lattice, &lattice.boundary(&case.region)?)?;
            let z_e = partition_function(&lattice, &lattice.boundary(&SubsystemMask::default())?)?;
            let exact = (-conditional_renyi(&z_a, &z_e, 2)?).exp();
            let mc = haar_mc_replica(case.n_sites, &case.layers, &case.region, samples, rng)?;
            Ok(McCheck { label: case.label.to_string(), exact, mean: mc.mean, stderr: mc.stderr })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatmechReport {
    pub wm: Vec<WmCount>,
    pub wm_two_replica_values: bool,
    pub gram: Vec<GramCheck>,
    pub moments: Vec<McCheck>,
    pub effective_c: f64,
    pub effective_j: f64,
    pub effective_residual: f64,
    pub replica: Vec<McCheck>,
}

impl StatmechReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for w in &self.wm {
            if w.equal != w.total || w.alt_equal != w.total {
                out.push(format!("W_M n={} d={}: {}/{} equal", w.n, w.d, w.equal, w.total));
            }
        }
        if !self.wm_two_replica_values {
            out.push("W_M n=2 d=2 values differ from 8/4".into());
        }
        for g in &self.gram {
            // a Gram matrix with d < n has no inverse, which is the expected outcome
            let ok = if g.d < g.n as u64 { g.singular } else { g.identity };
            if !ok {
                out.push(format!("Weingarten n={} d={}", g.n, g.d));
            }
        }
        for c in self.moments.iter().chain(&self.replica) {
            if !c.passed() {
                out.push(format!("{}: exact {} vs {} +- {}", c.label, c.exact, c.mean, c.stderr));
            }
        }
        if self.effective_residual >= EFFECTIVE_RESIDUAL_TOL {
            out.push(format!("effective gate residual {:e}", self.effective_residual));
        }
        out
    }
}

/// The full suite. `samples` sets both Monte Carlo comparisons.
pub fn statmech_report<R: Rng + ?Sized>(samples: usize, rng: &mut R) -> Result<StatmechReport> {
    let mut wm = Vec::new();
    for n in 2..=3 {
        for d in 2..=3 {
            wm.push(wm_exhaustive(n, d)?);
        }
    }
    let mut gram = Vec::new();
    for n in 1..=3 {
        for d in 2..=4 {
            gram.push(gram_identity_check(n, d)?);
        }
    }
    let mut moments = Vec::new();
    for d in 2..=4 {
        moments.extend(haar_moment_mc(d, samples, rng)?);
    }
    let eff = effective_gate_projection()?;
    Ok(StatmechReport {
        wm,
        wm_two_replica_values: wm_two_replica_values()?,
        gram,
        moments,
        effective_c: eff.c,
        effective_j: eff.j,
        effective_residual: eff.residual,
        replica: replica_check(samples, rng)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_report_exact_parts_clean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = statmech_report(4000, &mut rng).unwrap();
        // Monte Carlo lines are held to 3 sigma only at acceptance sample sizes
        let exact: Vec<String> = r.failures().into_iter().filter(|f| !f.contains("+-")).collect();
        assert!(exact.is_empty(), "{exact:?}");
        assert!(r.moments.iter().chain(&r.replica).all(|c| c.z() < 5.0));
        assert_eq!(r.wm.iter().find(|w| w.n == 3 && w.d == 2).unwrap().total, 1296);
        assert!(r.gram.iter().any(|g| g.singular && g.n == 3 && g.d == 2));
    }

    #[test]
    fn moment_mc_detects_wrong_value() {
        let c = McCheck { label: String::new(), exact: 1.0, mean: 0.0, stderr: 0.1 };
        assert!(!c.passed());
    }
}
