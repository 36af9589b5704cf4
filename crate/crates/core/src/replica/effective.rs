//! Projection of the two-replica parity-measurement channel onto the
//! identity/swap subspace of each site (qubits, two replicas).

use nalgebra::{DMatrix, Matrix4};

use crate::error::{MocError, Result};

pub const EFFECTIVE_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct EffectiveGate {
    /// `<<a b| M |c d>>` with `a, b, c, d` in `{I, S}` (index 0 = identity).
    pub raw: Matrix4<f64>,
    /// The same operator in the orthonormal basis `e_0 = (I + S)/sqrt(12)`,
    /// `e_1 = (I - S)/2`, ordered `|e_a e_b>` with index `2a + b`.
    pub projected: Matrix4<f64>,
    pub c: f64,
    pub j: f64,
    pub residual: f64,
}

/// 16-dimensional replica space of two sites, ordered
/// (site i replica 1, site i replica 2, site j replica 1, site j replica 2),
/// first listed bit most significant.
fn idx(i1: usize, i2: usize, j1: usize, j2: usize) -> usize {
    (i1 << 3) | (i2 << 2) | (j1 << 1) | j2
}

/// Operator on the two-site replica space: identity or replica swap on each site.
fn perm_op(swap_i: bool, swap_j: bool) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(16, 16);
    for u in 0..16 {
        let (i1, i2, j1, j2) = ((u >> 3) & 1, (u >> 2) & 1, (u >> 1) & 1, u & 1);
        let (a1, a2) = if swap_i { (i2, i1) } else { (i1, i2) };
        let (b1, b2) = if swap_j { (j2, j1) } else { (j1, j2) };
        m[(idx(a1, a2, b1, b2), u)] = 1.0;
    }
    m
}

/// `K_p` tensored over both replicas, `p` = parity 0 or 1.
fn kraus_pair(p: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(16, 16);
    for u in 0..16 {
        let (i1, i2, j1, j2) = ((u >> 3) & 1, (u >> 2) & 1, (u >> 1) & 1, u & 1);
        if i1 ^ j1 == p && i2 ^ j2 == p {
            m[(u, u)] = 1.0;
        }
    }
    m
}

fn pauli(k: usize) -> DMatrix<f64> {
    match k {
        0 => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]),
        1 => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        _ => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
    }
}

pub fn effective_gate_projection() -> Result<EffectiveGate> {
    let channel = |x: &DMatrix<f64>| -> DMatrix<f64> {
        (0..2).map(|p| {
            let k = kraus_pair(p);
            &k * x * &k
        })
        .fold(DMatrix::zeros(16, 16), |acc, t| acc + t)
    };
    let hs = |a: &DMatrix<f64>, b: &DMatrix<f64>| (a.transpose() * b).trace();

    let sw = [false, true];
    let mut raw = Matrix4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            let bra = perm_op(sw[a], sw[b]);
            for c in 0..2 {
                for d in 0..2 {
                    let ket = perm_op(sw[c], sw[d]);
                    raw[(2 * a + b, 2 * c + d)] = hs(&bra, &channel(&ket));
                }
            }
        }
    }

    // single-site orthonormal basis as combinations of (I, S)
    let s12 = 12f64.sqrt();
    let coeff = [[1.0 / s12, 1.0 / s12], [0.5, -0.5]];
    let mut projected = Matrix4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    let mut v = 0.0;
                    for p in 0..2 {
                        for q in 0..2 {
                            for r in 0..2 {
                                for s in 0..2 {
                                    v += coeff[a][p] * coeff[b][q] * coeff[c][r] * coeff[d][s] * raw[(2 * p + q, 2 * r + s)];
                                }
                            }
                        }
                    }
                    projected[(2 * a + b, 2 * c + d)] = v;
                }
            }
        }
    }

    let pm = DMatrix::from_iterator(4, 4, projected.iter().copied());
    let coef = |k1: usize, k2: usize| hs(&pauli(k1).kronecker(&pauli(k2)), &pm) / 4.0;
    let c = coef(0, 0);
    let j = 0.5 * (coef(2, 2) + coef(1, 1));
    let model = pauli(0).kronecker(&pauli(0)) * c + (pauli(2).kronecker(&pauli(2)) + pauli(1).kronecker(&pauli(1))) * j;
    let residual = (&pm - model).norm();
    if residual > EFFECTIVE_RESIDUAL_TOL {
        return Err(MocError::Residual { residual, tolerance: EFFECTIVE_RESIDUAL_TOL });
    }
    Ok(EffectiveGate { raw, projected, c, j, residual })
}
