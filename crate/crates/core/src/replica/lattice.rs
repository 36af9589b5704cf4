//! Replica lattice of a Haar-dressed parity-measurement circuit and its
//! exact partition function.
//!
//! Before each layer every measured site receives an independent Haar
//! single-qubit unitary. Averaging it gives
//! `E[U^n X U^dag n] = sum_{s,t} Wg(s^-1 t) chi_s Tr(chi_t^dag X)`,
//! so each such twirl carries an output variable `s` and an input variable
//! `t` joined by a Weingarten link. The parity check on sites `(x, y)` then
//! sits between the outputs `(s_x, s_y)` and whatever each site meets next:
//! the input `t'` of its next twirl (argument `t'^-1`) or the final-time
//! boundary permutation `g` (argument `g`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{MocError, Result};
use crate::mask::SubsystemMask;
use crate::replica::perm::Permutation;
use crate::replica::weights::wm_weight;
use crate::replica::weingarten::WeingartenTable;
use crate::sampler::CircuitLayer;

/// Maximum number of summed variables for two replicas.
pub const MAX_VARS_N2: usize = 16;
/// Maximum number of summed variables for three replicas.
pub const MAX_VARS_N3: usize = 8;

/// What a measurement output contracts against after the measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Next {
    /// Input variable of the site's next twirl, entering as its inverse.
    Twirl(usize),
    /// Final-time boundary of this site.
    Boundary(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plaquette {
    pub out_x: usize,
    pub out_y: usize,
    pub next_x: Next,
    pub next_y: Next,
}

#[derive(Clone, Debug)]
pub struct ReplicaLattice {
    n_sites: usize,
    n_replicas: usize,
    d: u64,
    n_vars: usize,
    /// `(output, input)` variable pairs with weight `Wg(out^-1 in)`.
    links: Vec<(usize, usize)>,
    plaquettes: Vec<Plaquette>,
    /// Input variables that meet the initial state.
    initial_inputs: Vec<usize>,
    /// Sites never measured; they meet the initial state at the boundary.
    idle_sites: Vec<usize>,
}

impl ReplicaLattice {
    /// Builds the lattice for `layers` acting on `n_sites` qubits.
    pub fn from_layers(n_sites: usize, layers: &[CircuitLayer], n_replicas: usize, d: u64) -> Result<Self> {
        if n_replicas < 1 {
            return Err(MocError::InvalidArgument("need at least one replica".into()));
        }
        let mut n_vars = 0;
        let mut links = Vec::new();
        let mut initial_inputs = Vec::new();
        let mut plaquettes: Vec<Plaquette> = Vec::new();
        // (plaquette index, which side) waiting for the site's next contraction
        let mut pending: Vec<Option<(usize, bool)>> = vec![None; n_sites];
        let mut touched = vec![false; n_sites];

        for layer in layers {
            for &(x, y) in &layer.pairs {
                if x >= n_sites || y >= n_sites || x == y {
                    return Err(MocError::InvalidArgument(format!("pair ({x}, {y}) on {n_sites} sites")));
                }
                let mut outs = [0usize; 2];
                for (k, &site) in [x, y].iter().enumerate() {
                    let (out, inp) = (n_vars, n_vars + 1);
                    n_vars += 2;
                    links.push((out, inp));
                    match pending[site].take() {
                        Some((p, first)) => {
                            if first {
                                plaquettes[p].next_x = Next::Twirl(inp);
                            } else {
                                plaquettes[p].next_y = Next::Twirl(inp);
                            }
                        }
                        None => initial_inputs.push(inp),
                    }
                    touched[site] = true;
                    outs[k] = out;
                }
                let idx = plaquettes.len();
                plaquettes.push(Plaquette {
                    out_x: outs[0],
                    out_y: outs[1],
                    next_x: Next::Boundary(x),
                    next_y: Next::Boundary(y),
                });
                pending[x] = Some((idx, true));
                pending[y] = Some((idx, false));
            }
        }
        let idle_sites = (0..n_sites).filter(|&s| !touched[s]).collect();
        Ok(Self { n_sites, n_replicas, d, n_vars, links, plaquettes, initial_inputs, idle_sites })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_replicas(&self) -> usize {
        self.n_replicas
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn links(&self) -> &[(usize, usize)] {
        &self.links
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    /// Final-time boundary: the full cycle on `region`, identity elsewhere.
    pub fn boundary(&self, region: &SubsystemMask) -> Result<Vec<Permutation>> {
        region.check_in_range(self.n_sites)?;
        Ok((0..self.n_sites)
            .map(|x| {
                if region.contains(x) {
                    Permutation::full_cycle(self.n_replicas)
                } else {
                    Permutation::identity(self.n_replicas)
                }
            })
            .collect())
    }
}

/// `Tr(chi_g^dag rho0^n)` for the single-site initial state `|+>`. Any
/// permutation of identical pure replicas leaves them unchanged, so this is 1.
pub fn initial_weight(_g: &Permutation) -> BigRational {
    BigRational::one()
}

/// Sum over all `S_n` assignments of the lattice variables of the product of
/// plaquette and link weights, with the final boundary pinned to `boundary`.
pub fn partition_function(lattice: &ReplicaLattice, boundary: &[Permutation]) -> Result<BigRational> {
    let n = lattice.n_replicas;
    let cap = match n {
        1 | 2 => MAX_VARS_N2,
        3 => MAX_VARS_N3,
        _ => return Err(MocError::SizeCap(format!("partition function needs n <= 3, got {n}"))),
    };
    if lattice.n_vars > cap {
        return Err(MocError::SizeCap(format!("{} summed variables exceed the cap of {cap} for n = {n}", lattice.n_vars)));
    }
    if boundary.len() != lattice.n_sites || boundary.iter().any(|g| g.degree() != n) {
        return Err(MocError::InvalidArgument("boundary must hold one S_n element per site".into()));
    }
    let wg = WeingartenTable::new(n, lattice.d)?;
    let perms = Permutation::all(n);
    let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();

    // Scale every Weingarten value by the common denominator so the inner
    // loop stays in integers.
    let denom = perms.iter().fold(BigInt::one(), |acc, p| num_integer_lcm(&acc, wg.value(p).denom()));
    let scaled: Vec<Vec<BigInt>> = perms
        .iter()
        .map(|s| perms.iter().map(|t| (wg.entry(s, t) * BigRational::from_integer(denom.clone())).to_integer()).collect())
        .collect();

    let boundary_ranks: Vec<usize> = boundary.iter().map(Permutation::rank).collect();
    let mut initial = BigRational::one();
    for &s in &lattice.idle_sites {
        initial *= initial_weight(&boundary[s]);
    }

    // W_M is evaluated on ranks; precompute the full table for this n.
    let k = perms.len();
    let mut wm = vec![0u64; k * k * k * k];
    for (a, s1) in perms.iter().enumerate() {
        for (b, s2) in perms.iter().enumerate() {
            for (c, t1) in perms.iter().enumerate() {
                for (e, t2) in perms.iter().enumerate() {
                    wm[((a * k + b) * k + c) * k + e] = wm_weight(s1, s2, t1, t2, lattice.d)?;
                }
            }
        }
    }
    let inv_rank: Vec<usize> = inverses.iter().map(Permutation::rank).collect();

    let mut assign = vec![0usize; lattice.n_vars];
    let mut total = BigInt::zero();
    'outer: loop {
        let mut term = BigInt::one();
        for &(o, i) in &lattice.links {
            let w = &scaled[assign[o]][assign[i]];
            if w.is_zero() {
                term = BigInt::zero();
                break;
            }
            term *= w;
        }
        if !term.is_zero() {
            let mut prod = 1u128;
            for p in &lattice.plaquettes {
                let arg = |nx: &Next| match *nx {
                    Next::Twirl(v) => inv_rank[assign[v]],
                    Next::Boundary(site) => boundary_ranks[site],
                };
                let w = wm[((assign[p.out_x] * k + assign[p.out_y]) * k + arg(&p.next_x)) * k + arg(&p.next_y)];
                prod = prod.checked_mul(u128::from(w)).ok_or_else(|| MocError::SizeCap("W_M product overflow".into()))?;
            }
            term *= BigInt::from(prod);
            for &v in &lattice.initial_inputs {
                let iw = initial_weight(&perms[assign[v]]);
                term *= iw.numer();
                debug_assert!(iw.denom().is_one());
            }
            total += term;
        }
        for slot in assign.iter_mut() {
            *slot += 1;
            if *slot < k {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    let scale = denom.pow(lattice.links.len() as u32);
    Ok(BigRational::new(total, scale) * initial)
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}

/// `(ln z_a - ln z_empty) / (1 - n)` in nats.
pub fn conditional_renyi(z_a: &BigRational, z_empty: &BigRational, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(MocError::InvalidArgument(format!("Renyi index must be >= 2, got {n}")));
    }
    if !z_a.is_positive() || !z_empty.is_positive() {
        return Err(MocError::NonPositive(format!("z_a = {z_a}, z_empty = {z_empty}")));
    }
    let ratio = (z_a / z_empty).to_f64().ok_or_else(|| MocError::NonPositive("ratio not representable".into()))?;
    Ok(ratio.ln() / (1.0 - n as f64))
}

/// `Z_A / Z_empty` for a circuit, region and replica count.
pub fn replica_ratio(n_sites: usize, layers: &[CircuitLayer], region: &SubsystemMask, n: usize) -> Result<BigRational> {
    let lat = ReplicaLattice::from_layers(n_sites, layers, n, 2)?;
    let z_a = partition_function(&lat, &lat.boundary(region)?)?;
    let z_e = partition_function(&lat, &lat.boundary(&SubsystemMask::default())?)?;
    if !z_e.is_positive() {
        return Err(MocError::NonPositive(format!("z_empty = {z_e}")));
    }
    Ok(z_a / z_e)
}
