//! Trajectory observables on stabilizer states. All values are in bits.

use crate::error::{MocError, Result};
use crate::mask::{ensure_disjoint, SubsystemMask};
use crate::tableau::StabilizerTableau;

/// `S_a + S_b - S_ab`.
pub fn mutual_information(state: &StabilizerTableau, a: &SubsystemMask, b: &SubsystemMask) -> Result<i64> {
    ensure_disjoint(&[a, b])?;
    let n = state.n_qubits();
    a.check_in_range(n)?;
    b.check_in_range(n)?;
    let s = |m: &SubsystemMask| state.entropy(m).map(|v| v as i64);
    Ok(s(a)? + s(b)? - s(&a.union(b))?)
}

/// `I(a;b) + I(a;c) - I(a;bc)`, expanded into seven entropies.
pub fn tripartite_mutual_information(
    state: &StabilizerTableau,
    a: &SubsystemMask,
    b: &SubsystemMask,
    c: &SubsystemMask,
) -> Result<i64> {
    ensure_disjoint(&[a, b, c])?;
    let n = state.n_qubits();
    for m in [a, b, c] {
        m.check_in_range(n)?;
    }
    let s = |m: &SubsystemMask| state.entropy(m).map(|v| v as i64);
    let ab = a.union(b);
    let ac = a.union(c);
    let bc = b.union(c);
    let abc = ab.union(c);
    Ok(s(a)? + s(b)? + s(c)? - s(&ab)? - s(&ac)? - s(&bc)? + s(&abc)?)
}

/// Entropy of the ancilla, stored as the last qubit of the register.
pub fn ancilla_entropy(state: &StabilizerTableau) -> usize {
    state.entropy_unchecked(&[state.n_qubits() - 1])
}

/// Minimal-arc distance on a ring.
pub fn ring_distance(n: usize, i: usize, j: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

/// Histogram of Bell pairs among the first `n_system` qubits, index `r - 1`
/// for `r = 1..=n_system/2`.
///
/// A pair counts when both qubits carry one bit and the pair carries none.
pub fn bell_census_system(state: &StabilizerTableau, n_system: usize) -> Result<Vec<u32>> {
    if n_system < 2 || n_system > state.n_qubits() {
        return Err(MocError::InvalidArgument(format!("census over {n_system} of {} qubits", state.n_qubits())));
    }
    let mut hist = vec![0u32; n_system / 2];
    let entangled: Vec<usize> = (0..n_system).filter(|&q| state.entropy_unchecked(&[q]) == 1).collect();
    for (k, &i) in entangled.iter().enumerate() {
        for &j in &entangled[k + 1..] {
            if state.entropy_unchecked(&[i, j]) == 0 {
                hist[ring_distance(n_system, i, j) - 1] += 1;
            }
        }
    }
    Ok(hist)
}

pub fn bell_census(state: &StabilizerTableau) -> Result<Vec<u32>> {
    bell_census_system(state, state.n_qubits())
}

/// The standard probe set for a system of `n_system` qubits.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ObservableSet {
    /// `S(AB)` for the half chain.
    pub s_half: i64,
    /// `I(q_0; q_{N/2-1})`.
    pub mi_antipodal: i64,
    /// `I3(A;B;C)` over the contiguous quarters.
    pub tmi: i64,
    pub s_ancilla: Option<i64>,
    pub bell_histogram: Option<Vec<u32>>,
}

/// Precomputed regions for a given system size.
#[derive(Clone, Debug)]
pub struct Probes {
    n_system: usize,
    quarters: [SubsystemMask; 4],
    half: SubsystemMask,
    q0: SubsystemMask,
    far: SubsystemMask,
}

impl Probes {
    pub fn new(n_system: usize) -> Result<Self> {
        if n_system < 4 {
            return Err(MocError::InvalidArgument(format!("probes need at least 4 qubits, got {n_system}")));
        }
        let quarters = SubsystemMask::quarters(n_system);
        let half = quarters[0].union(&quarters[1]);
        Ok(Self {
            n_system,
            quarters,
            half,
            q0: SubsystemMask::single(0),
            far: SubsystemMask::single(n_system / 2 - 1),
        })
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn evaluate(&self, state: &StabilizerTableau, ancilla: bool, census: bool) -> Result<ObservableSet> {
        let [a, b, c, _] = &self.quarters;
        Ok(ObservableSet {
            s_half: state.entropy(&self.half)? as i64,
            mi_antipodal: mutual_information(state, &self.q0, &self.far)?,
            tmi: tripartite_mutual_information(state, a, b, c)?,
            s_ancilla: if ancilla { Some(ancilla_entropy(state) as i64) } else { None },
            bell_histogram: if census { Some(bell_census_system(state, self.n_system)?) } else { None },
        })
    }
}
