//! Monte Carlo estimate of `Z_A / Z_empty` for two replicas with explicit
//! Haar single-qubit dressings and a sum over every measurement branch.

use rand::Rng;

use crate::dense::{haar_single_qubit, DenseState};
use crate::error::{MocError, Result};
use crate::mask::SubsystemMask;
use crate::pauli::{Basis, PauliString};
use crate::sampler::CircuitLayer;

pub const HAAR_MC_MAX_SITES: usize = 4;
pub const HAAR_MC_MAX_LAYERS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Per-sample numerator `sum_b Tr(rho_b,A^2)` and denominator `sum_b p_b^2`
/// over unnormalized branches `rho_b`.
pub fn haar_sample<R: Rng + ?Sized>(
    n_sites: usize,
    layers: &[CircuitLayer],
    region: &SubsystemMask,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let mut branches = vec![DenseState::plus_state(n_sites)?];
    for layer in layers {
        let mut dressed = vec![false; n_sites];
        for &(x, y) in &layer.pairs {
            for s in [x, y] {
                if !dressed[s] {
                    dressed[s] = true;
                    let u = haar_single_qubit(rng);
                    for b in &mut branches {
                        b.apply_single_qubit(&u, s);
                    }
                }
            }
        }
        // after the Haar dressing every basis is equivalent to ZZ
        for &(x, y) in &layer.pairs {
            let op = PauliString::parity_check(n_sites, Basis::ZZ, x, y);
            let mut next = Vec::with_capacity(2 * branches.len());
            for b in &branches {
                next.push(b.project(&op, 1)?);
                next.push(b.project(&op, -1)?);
            }
            branches = next;
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for b in &branches {
        let p = b.norm_sqr();
        den += p * p;
        num += b.purity_unnormalized(region)?;
    }
    Ok((num, den))
}

/// Ratio-of-means estimate with a leave-one-out jackknife error.
pub fn haar_mc_replica<R: Rng + ?Sized>(
    n_sites: usize,
    layers: &[CircuitLayer],
    region: &SubsystemMask,
    samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if n_sites > HAAR_MC_MAX_SITES || layers.len() > HAAR_MC_MAX_LAYERS {
        return Err(MocError::SizeCap(format!(
            "Haar Monte Carlo limited to {HAAR_MC_MAX_SITES} sites and {HAAR_MC_MAX_LAYERS} layers"
        )));
    }
    if samples < 2 {
        return Err(MocError::InvalidArgument("need at least two samples".into()));
    }
    region.check_in_range(n_sites)?;
    let mut nums = Vec::with_capacity(samples);
    let mut dens = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (a, b) = haar_sample(n_sites, layers, region, rng)?;
        nums.push(a);
        dens.push(b);
    }
    Ok(jackknife_ratio(&nums, &dens))
}

pub fn jackknife_ratio(nums: &[f64], dens: &[f64]) -> Estimate {
    let m = nums.len() as f64;
    let sn: f64 = nums.iter().sum();
    let sd: f64 = dens.iter().sum();
    let loo: Vec<f64> = nums.iter().zip(dens).map(|(a, b)| (sn - a) / (sd - b)).collect();
    let mean_loo = loo.iter().sum::<f64>() / m;
    let var = (m - 1.0) / m * loo.iter().map(|t| (t - mean_loo).powi(2)).sum::<f64>();
    Estimate { mean: sn / sd, stderr: var.sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn no_layers_gives_exact_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let (a, b) = haar_sample(3, &[], &SubsystemMask::single(0), &mut rng).unwrap();
            assert!((a / b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn caps() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(haar_mc_replica(5, &[], &SubsystemMask::single(0), 10, &mut rng).is_err());
    }

    #[test]
    fn jackknife_of_constant_ratio() {
        let e = jackknife_ratio(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]);
        assert!((e.mean - 0.5).abs() < 1e-15);
        assert!(e.stderr < 1e-15);
    }
}
