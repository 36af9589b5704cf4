use crate::error::{MocError, Result};

/// A set of qubit indices, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SubsystemMask {
    members: Vec<usize>,
}

impl SubsystemMask {
    pub fn new<I: IntoIterator<Item = usize>>(members: I) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn single(q: usize) -> Self {
        Self { members: vec![q] }
    }

    pub fn pair(a: usize, b: usize) -> Self {
        Self::new([a, b])
    }

    pub fn range(start: usize, end: usize) -> Self {
        Self { members: (start..end).collect() }
    }

    /// The four contiguous regions A, B, C, D of an `n`-qubit chain.
    pub fn quarters(n: usize) -> [SubsystemMask; 4] {
        let cut = |k: usize| k * n / 4;
        [
            Self::range(cut(0), cut(1)),
            Self::range(cut(1), cut(2)),
            Self::range(cut(2), cut(3)),
            Self::range(cut(3), cut(4)),
        ]
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.members.binary_search(&q).is_ok()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.members.last().copied()
    }

    pub fn union(&self, other: &SubsystemMask) -> SubsystemMask {
        Self::new(self.members.iter().chain(&other.members).copied())
    }

    pub fn is_disjoint(&self, other: &SubsystemMask) -> bool {
        !self.members.iter().any(|q| other.contains(*q))
    }

    /// Indices in `0..n` not in the mask.
    pub fn complement(&self, n: usize) -> SubsystemMask {
        Self { members: (0..n).filter(|q| !self.contains(*q)).collect() }
    }

    /// Bitmask form for masks over at most 64 qubits.
    pub fn to_bits(&self) -> u64 {
        self.members.iter().fold(0u64, |acc, &q| {
            assert!(q < 64, "to_bits needs indices below 64");
            acc | (1 << q)
        })
    }

    pub fn from_bits(bits: u64) -> Self {
        Self { members: (0..64).filter(|q| bits >> q & 1 == 1).collect() }
    }

    pub(crate) fn check_in_range(&self, n: usize) -> Result<()> {
        match self.max_index() {
            Some(m) if m >= n => Err(MocError::InvalidArgument(format!("qubit {m} outside 0..{n}"))),
            _ => Ok(()),
        }
    }
}

pub(crate) fn ensure_disjoint(masks: &[&SubsystemMask]) -> Result<()> {
    for (i, a) in masks.iter().enumerate() {
        if a.is_empty() {
            return Err(MocError::InvalidArgument("empty region".into()));
        }
        for b in &masks[i + 1..] {
            if !a.is_disjoint(b) {
                return Err(MocError::InvalidArgument("regions overlap".into()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarters_partition_the_chain() {
        let q = SubsystemMask::quarters(16);
        assert_eq!(q[0].members(), &[0, 1, 2, 3]);
        assert_eq!(q[3].members(), &[12, 13, 14, 15]);
        let all = q.iter().fold(SubsystemMask::default(), |acc, m| acc.union(m));
        assert_eq!(all, SubsystemMask::range(0, 16));
    }

    #[test]
    fn complement_and_bits() {
        let m = SubsystemMask::new([3, 1, 1]);
        assert_eq!(m.members(), &[1, 3]);
        assert_eq!(m.complement(5).members(), &[0, 2, 4]);
        assert_eq!(SubsystemMask::from_bits(m.to_bits()), m);
    }

    #[test]
    fn overlap_detection() {
        let a = SubsystemMask::range(0, 2);
        let b = SubsystemMask::range(1, 3);
        assert!(ensure_disjoint(&[&a, &b]).is_err());
        assert!(ensure_disjoint(&[&a, &SubsystemMask::default()]).is_err());
        assert!(ensure_disjoint(&[&a, &SubsystemMask::range(2, 4)]).is_ok());
    }
}
