//! Elements of the symmetric group `S_n` acting on replica labels `0..n`.
//!
//! Composition is `(f * g)(x) = f(g(x))` everywhere in this crate.

use std::fmt;
use std::ops::Mul;

use crate::error::{MocError, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    /// Builds from the image list `[p(0), p(1), ...]`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(MocError::InvalidArgument(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// The cycle `0 -> 1 -> ... -> n-1 -> 0`; the swap for `n = 2`.
    pub fn full_cycle(n: usize) -> Self {
        Self { images: (0..n).map(|k| (k + 1) % n).collect() }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Self { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &v)| k == v)
    }

    /// `self * rhs`, i.e. apply `rhs` first.
    pub fn compose(&self, rhs: &Permutation) -> Permutation {
        assert_eq!(self.degree(), rhs.degree(), "degree mismatch");
        Permutation { images: rhs.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (k, &v) in self.images.iter().enumerate() {
            images[v] = k;
        }
        Permutation { images }
    }

    pub fn cycle_count(&self) -> usize {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if !seen[start] {
                cycles += 1;
                let mut x = start;
                while !seen[x] {
                    seen[x] = true;
                    x = self.images[x];
                }
            }
        }
        cycles
    }

    /// All `n!` permutations in lexicographic order of their image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }

    /// Position of `self` in [`Permutation::all`].
    pub fn rank(&self) -> usize {
        let n = self.degree();
        let mut rank = 0;
        let mut fact = (1..n).product::<usize>().max(1);
        let mut rest: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pos = rest.iter().position(|&v| v == self.images[k]).expect("valid permutation");
            rank += pos * fact;
            rest.remove(pos);
            if k + 1 < n {
                fact /= n - 1 - k;
            }
        }
        rank
    }
}

impl Mul for &Permutation {
    type Output = Permutation;
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based labels, `e` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("e");
        }
        let n = self.degree();
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            f.write_str("(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{}", x + 1)?;
                first = false;
                x = self.images[x];
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Number of orbits of the group generated by `generators` on `0..n`.
pub fn orbit_count(n: usize, generators: &[&Permutation]) -> Result<usize> {
    if let Some(g) = generators.iter().find(|g| g.degree() != n) {
        return Err(MocError::InvalidArgument(format!("generator of degree {} in S_{n}", g.degree())));
    }
    let mut seen = vec![false; n];
    let mut orbits = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        orbits += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(x) = stack.pop() {
            for g in generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    Ok(orbits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn group_axioms_s3() {
        let all = Permutation::all(3);
        assert_eq!(all.len(), 6);
        let e = Permutation::identity(3);
        for a in &all {
            assert_eq!(a * &a.inverse(), e);
            assert_eq!(&e * a, *a);
            for b in &all {
                for c in &all {
                    assert_eq!(&(a * b) * c, a * &(b * c));
                }
            }
        }
        for (k, p) in all.iter().enumerate() {
            assert_eq!(p.rank(), k);
        }
    }

    #[test]
    fn composition_order() {
        // (f * g)(x) = f(g(x))
        let f = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let g = Permutation::transposition(3, 0, 1);
        let fg = &f * &g;
        for x in 0..3 {
            assert_eq!(fg.apply(x), f.apply(g.apply(x)));
        }
    }

    #[test]
    fn cycles_and_display() {
        assert_eq!(Permutation::identity(4).cycle_count(), 4);
        assert_eq!(Permutation::full_cycle(4).cycle_count(), 1);
        assert_eq!(Permutation::full_cycle(3).to_string(), "(1 2 3)");
        assert_eq!(Permutation::transposition(3, 0, 2).to_string(), "(1 3)");
        assert!(Permutation::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn orbit_basics() {
        let e = Permutation::identity(3);
        assert_eq!(orbit_count(3, &[&e, &e]).unwrap(), 3);
        assert_eq!(orbit_count(3, &[&Permutation::full_cycle(3)]).unwrap(), 1);
        assert_eq!(orbit_count(3, &[]).unwrap(), 3);
        assert!(orbit_count(4, &[&e]).is_err());
    }

    /// Closes the generator set under composition, then reads off orbits.
    fn orbits_by_group_enumeration(n: usize, gens: &[Permutation]) -> usize {
        let mut group: HashSet<Permutation> = HashSet::from([Permutation::identity(n)]);
        loop {
            let mut grown = group.clone();
            for a in &group {
                for g in gens {
                    grown.insert(a * g);
                }
            }
            if grown.len() == group.len() {
                break;
            }
            group = grown;
        }
        let mut orbit_sets: HashSet<Vec<usize>> = HashSet::new();
        for x in 0..n {
            let mut orb: Vec<usize> = group.iter().map(|g| g.apply(x)).collect();
            orb.sort_unstable();
            orb.dedup();
            orbit_sets.insert(orb);
        }
        orbit_sets.len()
    }

    #[test]
    fn orbits_match_group_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for n in 1..=6 {
            let all = Permutation::all(n);
            for _ in 0..60 {
                let k = rng.random_range(0..4);
                let gens: Vec<Permutation> = (0..k).map(|_| all[rng.random_range(0..all.len())].clone()).collect();
                let refs: Vec<&Permutation> = gens.iter().collect();
                assert_eq!(orbit_count(n, &refs).unwrap(), orbits_by_group_enumeration(n, &gens));
            }
        }
    }
}
