//! Exact Weingarten functions from inverting the permutation Gram matrix.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{MocError, Result};
use crate::replica::perm::Permutation;

/// `Wg` over `S_n` for local dimension `d`, stored as the full inverse
/// Gram matrix indexed by [`Permutation::rank`].
#[derive(Clone, Debug)]
pub struct WeingartenTable {
    n: usize,
    d: u64,
    perms: Vec<Permutation>,
    inverse: Vec<Vec<BigRational>>,
}

/// `G[s][t] = d^cycles(s^-1 t)`.
pub fn gram_matrix(n: usize, d: u64) -> Vec<Vec<BigRational>> {
    let perms = Permutation::all(n);
    perms
        .iter()
        .map(|s| {
            let si = s.inverse();
            perms
                .iter()
                .map(|t| BigRational::from_integer(BigInt::from(d).pow((&si * t).cycle_count() as u32)))
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse over the rationals; `None` if singular.
fn invert(mut a: Vec<Vec<BigRational>>) -> Option<Vec<Vec<BigRational>>> {
    let m = a.len();
    let mut inv: Vec<Vec<BigRational>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..m {
        let piv = (col..m).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for k in 0..m {
            a[col][k] = &a[col][k] / &p;
            inv[col][k] = &inv[col][k] / &p;
        }
        for r in 0..m {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for k in 0..m {
                let t = &f * &a[col][k];
                a[r][k] -= t;
                let t = &f * &inv[col][k];
                inv[r][k] -= t;
            }
        }
    }
    Some(inv)
}

impl WeingartenTable {
    pub fn new(n: usize, d: u64) -> Result<Self> {
        if n == 0 || n > 4 {
            return Err(MocError::SizeCap(format!("Weingarten table supports 1 <= n <= 4, got {n}")));
        }
        if d < 1 {
            return Err(MocError::InvalidArgument("dimension must be positive".into()));
        }
        let inverse = invert(gram_matrix(n, d)).ok_or(MocError::SingularGram { n, d: d as usize })?;
        Ok(Self { n, d, perms: Permutation::all(n), inverse })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn permutations(&self) -> &[Permutation] {
        &self.perms
    }

    /// `Wg(p)`, read from the identity row of the inverse Gram matrix.
    pub fn value(&self, p: &Permutation) -> &BigRational {
        &self.inverse[0][p.rank()]
    }

    /// `(G^-1)[s][t]`, equal to `Wg(s^-1 t)`.
    pub fn entry(&self, s: &Permutation, t: &Permutation) -> &BigRational {
        &self.inverse[s.rank()][t.rank()]
    }

    pub fn inverse_matrix(&self) -> &[Vec<BigRational>] {
        &self.inverse
    }
}

/// Haar moment `E[U_{i1 j1}..U_{in jn} conj(U_{k1 l1})..conj(U_{kn ln})]`
/// from the Weingarten sum over pairs of permutations.
pub fn haar_moment(table: &WeingartenTable, i: &[usize], j: &[usize], k: &[usize], l: &[usize]) -> Result<BigRational> {
    let n = table.n();
    if [i.len(), j.len(), k.len(), l.len()].iter().any(|&len| len != n) {
        return Err(MocError::InvalidArgument(format!("moment indices must have length {n}")));
    }
    let mut total = BigRational::zero();
    for s in table.permutations() {
        if (0..n).any(|m| i[m] != k[s.apply(m)]) {
            continue;
        }
        for t in table.permutations() {
            if (0..n).any(|m| j[m] != l[t.apply(m)]) {
                continue;
            }
            total += table.value(&(&s.inverse() * t));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn single_replica_is_one_over_d() {
        for d in 2..6 {
            let t = WeingartenTable::new(1, d).unwrap();
            assert_eq!(*t.value(&Permutation::identity(1)), q(1, d as i64));
        }
    }

    #[test]
    fn two_replicas_closed_form() {
        // inverse of [[d^2, d], [d, d^2]]
        for d in 2..5i64 {
            let t = WeingartenTable::new(2, d as u64).unwrap();
            let den = d * d * d * d - d * d;
            assert_eq!(*t.value(&Permutation::identity(2)), q(d * d, den));
            assert_eq!(*t.value(&Permutation::full_cycle(2)), q(-d, den));
        }
    }

    #[test]
    fn gram_times_inverse_is_identity() {
        for n in 1..=3 {
            for d in 2..=4 {
                if (d as usize) < n {
                    // rank-deficient: permutation operators are dependent when d < n
                    assert!(WeingartenTable::new(n, d).is_err());
                    continue;
                }
                let g = gram_matrix(n, d);
                let t = WeingartenTable::new(n, d).unwrap();
                let w = t.inverse_matrix();
                let m = g.len();
                for a in 0..m {
                    for b in 0..m {
                        let s: BigRational = (0..m).map(|c| &g[a][c] * &w[c][b]).sum();
                        let want = if a == b { BigRational::one() } else { BigRational::zero() };
                        assert_eq!(s, want);
                    }
                }
            }
        }
    }

    #[test]
    fn class_function() {
        let t = WeingartenTable::new(3, 3).unwrap();
        for s in t.permutations() {
            for u in t.permutations() {
                assert_eq!(t.entry(s, u), t.value(&(&s.inverse() * u)));
            }
        }
    }

    #[test]
    fn singular_gram_reported() {
        // d = 1 < n makes the Gram matrix rank one
        let err = WeingartenTable::new(2, 1).unwrap_err();
        assert_eq!(err.category(), "singular");
    }

    #[test]
    fn known_moments() {
        let t = WeingartenTable::new(2, 2).unwrap();
        // E|U00|^4 = 2 / (d (d + 1))
        assert_eq!(haar_moment(&t, &[0, 0], &[0, 0], &[0, 0], &[0, 0]).unwrap(), q(1, 3));
        let t1 = WeingartenTable::new(1, 2).unwrap();
        assert_eq!(haar_moment(&t1, &[0], &[1], &[0], &[1]).unwrap(), q(1, 2));
        assert_eq!(haar_moment(&t1, &[0], &[1], &[1], &[0]).unwrap(), q(0, 1));
    }
}
