//! Plaquette weight of a two-site mod-`d` parity measurement on `n` replicas.
//!
//! `W_M(s1, s2, t1, t2) = sum_i Tr(K_i^n (chi_s1 x chi_s2) K_i^n (chi_t1 x chi_t2))`
//! with `K_i = sum_j |j, j+i><j, j+i|` and `chi_g |i_1..i_n> = |i_g(1)..i_g(n)>`.

use crate::error::{MocError, Result};
use crate::replica::perm::{orbit_count, Permutation};

fn check_degrees(ps: [&Permutation; 4]) -> Result<usize> {
    let n = ps[0].degree();
    if ps.iter().any(|p| p.degree() != n) {
        return Err(MocError::InvalidArgument("W_M arguments from different S_n".into()));
    }
    Ok(n)
}

fn check_dim(d: u64) -> Result<()> {
    if d < 2 {
        return Err(MocError::InvalidArgument(format!("local dimension {d} < 2")));
    }
    Ok(())
}

/// Orbit-counting form `d^(1 + #Orb<t1 s1, t2 s1, t2 s2>)`.
pub fn wm_weight(s1: &Permutation, s2: &Permutation, t1: &Permutation, t2: &Permutation, d: u64) -> Result<u64> {
    let n = check_degrees([s1, s2, t1, t2])?;
    check_dim(d)?;
    let orbits = orbit_count(n, &[&(t1 * s1), &(t2 * s1), &(t2 * s2)])?;
    Ok(d.pow(1 + orbits as u32))
}

/// Same weight from the generator set `<t1 t2^-1, t2 s1, s1^-1 s2>`.
pub fn wm_weight_alt(s1: &Permutation, s2: &Permutation, t1: &Permutation, t2: &Permutation, d: u64) -> Result<u64> {
    let n = check_degrees([s1, s2, t1, t2])?;
    check_dim(d)?;
    let orbits = orbit_count(n, &[&(t1 * &t2.inverse()), &(t2 * s1), &(&s1.inverse() * s2)])?;
    Ok(d.pow(1 + orbits as u32))
}

/// `chi_g` on a product-basis tuple: output slot `m` holds input `g(m)`.
fn chi_apply(g: &Permutation, input: &[u64], out: &mut [u64]) {
    for (m, o) in out.iter_mut().enumerate() {
        *o = input[g.apply(m)];
    }
}

/// Literal trace over the `d^(2n)`-dimensional two-site replica space.
///
/// `K_i` and the permutation operators are diagonal and monomial in the
/// product basis, so `Tr(K A K B) = sum_u K(u) [A B u = u] K(B u)`.
pub fn wm_bruteforce(s1: &Permutation, s2: &Permutation, t1: &Permutation, t2: &Permutation, d: u64) -> Result<u64> {
    let n = check_degrees([s1, s2, t1, t2])?;
    check_dim(d)?;
    if n > 3 || d > 3 {
        return Err(MocError::SizeCap(format!("brute-force W_M limited to n, d <= 3 (got n = {n}, d = {d})")));
    }
    let dim = d.pow(2 * n as u32);
    // u encodes site-x digits for replicas 0..n then site-y digits
    let decode = |mut u: u64, x: &mut [u64], y: &mut [u64]| {
        for v in x.iter_mut().chain(y.iter_mut()) {
            *v = u % d;
            u /= d;
        }
    };
    let kraus = |i: u64, x: &[u64], y: &[u64]| x.iter().zip(y).all(|(&a, &b)| (a + i) % d == b);
    let (mut x, mut y) = (vec![0; n], vec![0; n]);
    let (mut bx, mut by) = (vec![0; n], vec![0; n]);
    let (mut ax, mut ay) = (vec![0; n], vec![0; n]);
    let mut total = 0u64;
    for i in 0..d {
        for u in 0..dim {
            decode(u, &mut x, &mut y);
            if !kraus(i, &x, &y) {
                continue;
            }
            chi_apply(t1, &x, &mut bx);
            chi_apply(t2, &y, &mut by);
            if !kraus(i, &bx, &by) {
                continue;
            }
            chi_apply(s1, &bx, &mut ax);
            chi_apply(s2, &by, &mut ay);
            if ax == x && ay == y {
                total += 1;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_replica_values() {
        let e = Permutation::identity(2);
        let s = Permutation::full_cycle(2);
        assert_eq!(wm_weight(&e, &e, &e, &e, 2).unwrap(), 8);
        assert_eq!(wm_weight(&s, &s, &s, &s, 2).unwrap(), 8);
        assert_eq!(wm_weight(&e, &e, &s, &e, 2).unwrap(), 4);
        assert_eq!(wm_bruteforce(&e, &e, &s, &e, 2).unwrap(), 4);
        assert_eq!(wm_bruteforce(&s, &s, &s, &s, 2).unwrap(), 8);
    }

    #[test]
    fn three_replica_identity() {
        let e = Permutation::identity(3);
        assert_eq!(wm_bruteforce(&e, &e, &e, &e, 2).unwrap(), 16);
        assert_eq!(wm_weight(&e, &e, &e, &e, 2).unwrap(), 16);
    }

    #[test]
    fn argument_checks() {
        let e2 = Permutation::identity(2);
        let e3 = Permutation::identity(3);
        assert!(wm_weight(&e2, &e3, &e2, &e2, 2).is_err());
        assert!(wm_weight(&e2, &e2, &e2, &e2, 1).is_err());
        let e4 = Permutation::identity(4);
        assert!(wm_bruteforce(&e4, &e4, &e4, &e4, 2).is_err());
    }
}
