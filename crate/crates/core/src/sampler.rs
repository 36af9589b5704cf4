//! Circuit-layer generation: power-law pair distances on a ring, disjoint
//! pair packing and basis assignment.

use rand::Rng;

use crate::error::{MocError, Result};
use crate::pauli::Basis;

/// Truncated power law `P(r) = r^-alpha / Z_N` on `r = 1..=floor(N/2)`.
///
/// `alpha = inf` puts all mass on `r = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeDistribution {
    n_qubits: usize,
    alpha: f64,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl RangeDistribution {
    pub fn new(n_qubits: usize, alpha: f64) -> Result<Self> {
        if n_qubits < 2 {
            return Err(MocError::InvalidArgument(format!("ring of {n_qubits} qubits has no pairs")));
        }
        if alpha.is_nan() || alpha < 0.0 {
            return Err(MocError::InvalidArgument(format!("range exponent must be >= 0, got {alpha}")));
        }
        let r_max = n_qubits / 2;
        let weights: Vec<f64> = if alpha.is_infinite() {
            (1..=r_max).map(|r| if r == 1 { 1.0 } else { 0.0 }).collect()
        } else {
            (1..=r_max).map(|r| (r as f64).powf(-alpha)).collect()
        };
        let z: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *cdf.last_mut().expect("r_max >= 1") = 1.0;
        Ok(Self { n_qubits, alpha, probs, cdf })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r_max(&self) -> usize {
        self.probs.len()
    }

    /// `P(r)`; zero outside the support.
    pub fn prob(&self, r: usize) -> f64 {
        if r == 0 || r > self.r_max() {
            0.0
        } else {
            self.probs[r - 1]
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Exact mean distance under the truncated table.
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| (k + 1) as f64 * p).sum()
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c <= u);
        k.min(self.r_max() - 1) + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisMode {
    /// Independent uniform basis per pair.
    Random,
    /// One uniform basis per layer, shared by all pairs.
    Single,
    /// `ZZ` with probability `p`, otherwise `XX` or `YY` equally.
    Xxz { p: f64 },
}

impl BasisMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BasisMode::Xxz { p } if !(0.0..=1.0).contains(&p) => {
                Err(MocError::InvalidArgument(format!("XXZ weight p = {p} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BasisMode::Random => "random",
            BasisMode::Single => "single",
            BasisMode::Xxz { .. } => "xxz",
        }
    }
}

/// One time step: disjoint pairs with their bases.
///
/// Each pair `(a, b)` is oriented so that walking rightwards (increasing
/// index mod N) from `a` to `b` traverses the sampled arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitLayer {
    pub pairs: Vec<(usize, usize)>,
    pub bases: Vec<Basis>,
}

impl CircuitLayer {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Basis, usize, usize)> + '_ {
        self.bases.iter().zip(&self.pairs).map(|(&b, &(i, j))| (b, i, j))
    }
}

/// Number of pairs per layer for a density `M2/N`; density 0 is the sparse
/// limit with a single pair.
pub fn pairs_per_layer(n_qubits: usize, density: f64) -> Result<usize> {
    if !(0.0..=0.5).contains(&density) {
        return Err(MocError::InvalidArgument(format!("density {density} outside [0, 0.5]")));
    }
    if density == 0.0 {
        return Ok(1);
    }
    let m2 = (density * n_qubits as f64).round() as usize;
    if m2 == 0 || m2 > n_qubits / 2 {
        return Err(MocError::InvalidArgument(format!(
            "density {density} gives {m2} pairs on {n_qubits} qubits"
        )));
    }
    Ok(m2)
}

/// Rejection attempts per pair before switching to exact enumeration.
const DEFAULT_ATTEMPT_BUDGET: usize = 64;

#[derive(Clone, Debug)]
pub struct CircuitSampler {
    dist: RangeDistribution,
    m2: usize,
    mode: BasisMode,
    attempt_budget: usize,
}

impl CircuitSampler {
    pub fn new(n_qubits: usize, alpha: f64, m2: usize, mode: BasisMode) -> Result<Self> {
        mode.validate()?;
        let dist = RangeDistribution::new(n_qubits, alpha)?;
        if m2 == 0 || m2 > n_qubits / 2 {
            return Err(MocError::InvalidArgument(format!("{m2} pairs do not fit on {n_qubits} qubits")));
        }
        Ok(Self { dist, m2, mode, attempt_budget: DEFAULT_ATTEMPT_BUDGET })
    }

    #[cfg(test)]
    pub(crate) fn with_attempt_budget(mut self, budget: usize) -> Self {
        self.attempt_budget = budget.max(1);
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.dist.n_qubits
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    pub fn distribution(&self) -> &RangeDistribution {
        &self.dist
    }

    pub fn mode(&self) -> BasisMode {
        self.mode
    }

    /// Draws one layer.
    ///
    /// Each pair is placed by drawing an unused qubit `i`, a distance and a
    /// direction, and redrawing all three whenever the partner is taken. After
    /// `attempt_budget` failures the same conditional law is sampled directly
    /// by enumerating free (qubit, direction, partner) triples, so sparse
    /// success probabilities cost no more than the enumeration.
    pub fn sample_layer<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CircuitLayer> {
        let n = self.dist.n_qubits;
        let mut free: Vec<usize> = (0..n).collect();
        let mut pos: Vec<usize> = (0..n).collect();
        let mut pairs = Vec::with_capacity(self.m2);

        let take = |q: usize, free: &mut Vec<usize>, pos: &mut Vec<usize>| {
            let k = pos[q];
            let last = *free.last().expect("non-empty");
            free.swap_remove(k);
            if last != q {
                pos[last] = k;
            }
            pos[q] = usize::MAX;
        };

        for placed in 0..self.m2 {
            let mut chosen = None;
            for _ in 0..self.attempt_budget {
                let i = free[rng.random_range(0..free.len())];
                let r = self.dist.sample(rng);
                let right: bool = rng.random();
                let j = if right { (i + r) % n } else { (i + n - r) % n };
                if pos[j] != usize::MAX {
                    chosen = Some(if right { (i, j) } else { (j, i) });
                    break;
                }
            }
            let pair = match chosen {
                Some(p) => p,
                None => self.enumerate_pair(&free, rng).ok_or(MocError::Packing {
                    attempts: self.attempt_budget,
                    placed,
                    wanted: self.m2,
                })?,
            };
            take(pair.0, &mut free, &mut pos);
            take(pair.1, &mut free, &mut pos);
            pairs.push(pair);
        }

        let bases = match self.mode {
            BasisMode::Random => pairs.iter().map(|_| Basis::ALL[rng.random_range(0..3)]).collect(),
            BasisMode::Single => vec![Basis::ALL[rng.random_range(0..3)]; pairs.len()],
            BasisMode::Xxz { p } => pairs
                .iter()
                .map(|_| {
                    let u: f64 = rng.random();
                    if u < p {
                        Basis::ZZ
                    } else if u < p + 0.5 * (1.0 - p) {
                        Basis::XX
                    } else {
                        Basis::YY
                    }
                })
                .collect(),
        };
        Ok(CircuitLayer { pairs, bases })
    }

    /// One attempt's law conditioned on success: triple `(i, dir, j)` with `i`
    /// and `j` free has weight `P(r) / 2`.
    fn enumerate_pair<R: Rng + ?Sized>(&self, free: &[usize], rng: &mut R) -> Option<(usize, usize)> {
        let n = self.dist.n_qubits;
        let mut cands: Vec<((usize, usize), f64)> = Vec::new();
        for &i in free {
            for &j in free {
                if i == j {
                    continue;
                }
                let d_right = (j + n - i) % n;
                let w_right = self.dist.prob(d_right);
                if w_right > 0.0 {
                    cands.push(((i, j), 0.5 * w_right));
                }
                let w_left = self.dist.prob(n - d_right);
                if w_left > 0.0 {
                    cands.push(((j, i), 0.5 * w_left));
                }
            }
        }
        let total: f64 = cands.iter().map(|c| c.1).sum();
        if total <= 0.0 {
            return None;
        }
        let mut u = rng.random::<f64>() * total;
        for &(pair, w) in &cands {
            if u < w {
                return Some(pair);
            }
            u -= w;
        }
        cands.last().map(|c| c.0)
    }
}

/// Expected number of measurements per layer straddling one fixed bond,
/// `M2 * E[r] / N`, using the exact truncated mean.
pub fn expected_crossings(n_qubits: usize, alpha: f64, m2: usize) -> Result<f64> {
    let dist = RangeDistribution::new(n_qubits, alpha)?;
    Ok(m2 as f64 * dist.mean() / n_qubits as f64)
}

/// Whether the oriented pair's arc covers the bond between `cut - 1` and `cut`.
pub fn crosses_cut(n_qubits: usize, pair: (usize, usize), cut: usize) -> bool {
    let n = n_qubits;
    let (a, b) = pair;
    let len = (b + n - a) % n;
    let bond = (cut + n - 1) % n;
    (bond + n - a) % n < len
}

/// Samples `n_layers` layers and counts pairs straddling the bond at `cut`.
pub fn count_crossings_mc<R: Rng + ?Sized>(
    sampler: &CircuitSampler,
    cut: usize,
    n_layers: usize,
    rng: &mut R,
) -> Result<u64> {
    let n = sampler.n_qubits();
    if cut >= n {
        return Err(MocError::InvalidArgument(format!("cut {cut} outside 0..{n}")));
    }
    let mut total = 0u64;
    for _ in 0..n_layers {
        let layer = sampler.sample_layer(rng)?;
        total += layer.pairs.iter().filter(|&&p| crosses_cut(n, p, cut)).count() as u64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    #[test]
    fn table_normalized() {
        for &a in &[0.0, 0.5, 2.0, 4.0, f64::INFINITY] {
            let d = RangeDistribution::new(37, a).unwrap();
            let s: f64 = d.probs().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(d.probs().iter().all(|&p| p >= 0.0));
        }
        let u = RangeDistribution::new(16, 0.0).unwrap();
        assert!(u.probs().iter().all(|&p| (p - 0.125).abs() < 1e-15));
        assert!(RangeDistribution::new(1, 1.0).is_err());
        assert!(RangeDistribution::new(8, -1.0).is_err());
    }

    #[test]
    fn infinite_alpha_is_nearest_neighbour() {
        let d = RangeDistribution::new(64, f64::INFINITY).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!((0..1000).all(|_| d.sample(&mut rng) == 1));
    }

    #[test]
    fn mean_distance_uniform() {
        let e = expected_crossings(100, 0.0, 1).unwrap();
        assert!((e - 0.255).abs() < 1e-12);
    }

    #[test]
    fn crossing_convention() {
        assert!(crosses_cut(8, (3, 4), 4));
        assert!(!crosses_cut(8, (3, 4), 3));
        assert!(crosses_cut(8, (7, 1), 0));
        assert!(crosses_cut(8, (7, 1), 1));
        assert!(!crosses_cut(8, (7, 1), 2));
    }

    #[test]
    fn half_density_covers_every_qubit() {
        let s = CircuitSampler::new(16, 2.0, 8, BasisMode::Random).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let layer = s.sample_layer(&mut rng).unwrap();
            let mut seen = [false; 16];
            for &(i, j) in &layer.pairs {
                assert!(!seen[i] && !seen[j]);
                seen[i] = true;
                seen[j] = true;
            }
            assert!(seen.iter().all(|&b| b));
        }
    }

    #[test]
    fn sparse_limit_single_pair_and_mode_streams_coincide() {
        assert_eq!(pairs_per_layer(64, 0.0).unwrap(), 1);
        assert_eq!(pairs_per_layer(64, 0.5).unwrap(), 32);
        assert!(pairs_per_layer(64, 0.6).is_err());
        let a = CircuitSampler::new(32, 1.0, 1, BasisMode::Random).unwrap();
        let b = CircuitSampler::new(32, 1.0, 1, BasisMode::Single).unwrap();
        let mut ra = ChaCha8Rng::seed_from_u64(8);
        let mut rb = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            assert_eq!(a.sample_layer(&mut ra).unwrap(), b.sample_layer(&mut rb).unwrap());
        }
    }

    #[test]
    fn single_basis_shares_tag() {
        let s = CircuitSampler::new(16, 1.0, 8, BasisMode::Single).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut counts = [0usize; 3];
        let layers = 30_000;
        for _ in 0..layers {
            let l = s.sample_layer(&mut rng).unwrap();
            assert!(l.bases.iter().all(|&b| b == l.bases[0]));
            counts[l.bases[0].index()] += 1;
        }
        for c in counts {
            assert!((c as f64 / layers as f64 - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn dense_local_packing_never_fails() {
        let s = CircuitSampler::new(128, 4.0, 64, BasisMode::Random).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert_eq!(s.sample_layer(&mut rng).unwrap().len(), 64);
        }
    }

    #[test]
    fn impossible_packing_is_reported() {
        // nearest-neighbour only, 3 pairs on 6 sites: any odd gap strands a qubit
        let s = CircuitSampler::new(6, f64::INFINITY, 3, BasisMode::Random).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let errs = (0..200).filter(|_| s.sample_layer(&mut rng).is_err()).count();
        assert!(errs > 0);
        let err = (0..).find_map(|_| s.sample_layer(&mut rng).err()).unwrap();
        assert_eq!(err.category(), "packing");
    }

    /// Literal unbounded rejection sampler, used as the reference law.
    fn reference_layer(n: usize, d: &RangeDistribution, m2: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
        let mut used = vec![false; n];
        let mut pairs = Vec::new();
        while pairs.len() < m2 {
            let free: Vec<usize> = (0..n).filter(|&q| !used[q]).collect();
            let i = free[rng.random_range(0..free.len())];
            let r = d.sample(rng);
            let right: bool = rng.random();
            let j = if right { (i + r) % n } else { (i + n - r) % n };
            if !used[j] {
                used[i] = true;
                used[j] = true;
                pairs.push(if right { (i, j) } else { (j, i) });
            }
        }
        pairs
    }

    #[test]
    fn enumeration_fallback_preserves_the_law() {
        let (n, m2, alpha) = (6, 3, 1.5);
        let fast = CircuitSampler::new(n, alpha, m2, BasisMode::Random).unwrap().with_attempt_budget(1);
        let d = RangeDistribution::new(n, alpha).unwrap();
        let trials = 60_000;
        let key = |p: &[(usize, usize)]| {
            let mut v: Vec<(usize, usize)> = p.to_vec();
            v.sort_unstable();
            v
        };
        let mut h_fast: HashMap<Vec<(usize, usize)>, f64> = HashMap::new();
        let mut h_ref: HashMap<Vec<(usize, usize)>, f64> = HashMap::new();
        let mut r1 = ChaCha8Rng::seed_from_u64(10);
        let mut r2 = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..trials {
            *h_fast.entry(key(&fast.sample_layer(&mut r1).unwrap().pairs)).or_default() += 1.0;
            *h_ref.entry(key(&reference_layer(n, &d, m2, &mut r2))).or_default() += 1.0;
        }
        for (k, &c_ref) in &h_ref {
            let p = c_ref / trials as f64;
            let q = h_fast.get(k).copied().unwrap_or(0.0) / trials as f64;
            let sigma = (2.0 * p * (1.0 - p) / trials as f64).sqrt().max(1e-4);
            assert!((p - q).abs() < 5.0 * sigma, "{k:?}: {p} vs {q}");
        }
    }
}
