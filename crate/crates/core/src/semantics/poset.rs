use std::collections::BTreeSet;

use thiserror::Error;

/// Largest poset representable with bitmask downsets.
pub const MAX_POSET_SIZE: usize = 32;
/// Largest size accepted by [`enumerate_posets`].
pub const MAX_ENUMERATED_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("poset size {0} outside the supported range 1..={1}")]
    UnsupportedSize(usize, usize),
    #[error("relation is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("relation is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("relation is not transitive at ({0}, {1}, {2})")]
    NotTransitive(usize, usize, usize),
}

/// A partial order on `{0, …, n−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    size: usize,
    /// `below[i]` has bit `j` set iff `j ≤ i`.
    below: Vec<u32>,
}

impl FinitePoset {
    /// Builds a poset from an order predicate, checking the partial-order laws.
    pub fn from_relation(size: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self, PosetError> {
        if size == 0 || size > MAX_POSET_SIZE {
            return Err(PosetError::UnsupportedSize(size, MAX_POSET_SIZE));
        }
        let mut below = vec![0u32; size];
        for i in 0..size {
            for j in 0..size {
                if leq(j, i) {
                    below[i] |= 1 << j;
                }
            }
        }
        let p = FinitePoset { size, below };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), PosetError> {
        let n = self.size;
        for i in 0..n {
            if !self.leq(i, i) {
                return Err(PosetError::NotReflexive(i));
            }
            for j in 0..n {
                if i != j && self.leq(i, j) && self.leq(j, i) {
                    return Err(PosetError::NotAntisymmetric(i, j));
                }
                for k in 0..n {
                    if self.leq(i, j) && self.leq(j, k) && !self.leq(i, k) {
                        return Err(PosetError::NotTransitive(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn chain(n: usize) -> Result<Self, PosetError> {
        Self::from_relation(n, |i, j| i <= j)
    }

    pub fn antichain(n: usize) -> Result<Self, PosetError> {
        Self::from_relation(n, |i, j| i == j)
    }

    /// Subsets of `{1, …, k}` ordered by inclusion; element `s` is the subset
    /// whose bitmask is `s`.
    pub fn powerset(k: usize) -> Result<Self, PosetError> {
        if k > 5 {
            return Err(PosetError::UnsupportedSize(1 << k, MAX_POSET_SIZE));
        }
        Self::from_relation(1 << k, |s, t| s & t == s)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.below[j] >> i & 1 == 1
    }

    /// Principal downset of `i`, as a bitmask.
    pub fn down(&self, i: usize) -> u32 {
        self.below[i]
    }

    /// Covering pairs `(i, j)` with `i < j` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.size;
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                if i == j || !self.leq(i, j) {
                    continue;
                }
                let between = (0..n).any(|k| k != i && k != j && self.leq(i, k) && self.leq(k, j));
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Adjacency bits of the strict order, row-major; used for isomorphism
    /// canonicalization.
    fn code_under(&self, perm: &[usize]) -> u64 {
        let n = self.size;
        let mut code = 0u64;
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq(i, j) {
                    code |= 1 << (perm[i] * n + perm[j]);
                }
            }
        }
        code
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All partial orders on `n` elements, one per isomorphism class.
///
/// Every poset has a linear extension, so it suffices to enumerate strict
/// orders contained in `<` on labels and keep one per canonical code.
pub fn enumerate_posets(n: usize) -> Result<Vec<FinitePoset>, PosetError> {
    if n == 0 || n > MAX_ENUMERATED_SIZE {
        return Err(PosetError::UnsupportedSize(n, MAX_ENUMERATED_SIZE));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for bits in 0u32..(1 << pairs.len()) {
        let lt = |i: usize, j: usize| {
            pairs
                .iter()
                .position(|&p| p == (i, j))
                .is_some_and(|k| bits >> k & 1 == 1)
        };
        let transitive = (0..n).all(|i| {
            (i + 1..n).all(|j| (j + 1..n).all(|k| !(lt(i, j) && lt(j, k)) || lt(i, k)))
        });
        if !transitive {
            continue;
        }
        let poset = FinitePoset::from_relation(n, |i, j| i == j || lt(i, j))?;
        let canon = perms.iter().map(|p| poset.code_under(p)).min().unwrap_or(0);
        if seen.insert(canon) {
            out.push(poset);
        }
    }
    Ok(out)
}

/// All posets of sizes `1..=max`, smallest first.
pub fn posets_up_to(max: usize) -> Result<Vec<FinitePoset>, PosetError> {
    let mut out = Vec::new();
    for n in 1..=max {
        out.extend(enumerate_posets(n)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent count: all labeled partial orders by brute force over
    /// every relation, then isomorphism classes via sorted-permutation codes.
    fn brute_force_unlabeled(n: usize) -> usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        let perms = permutations(n);
        let mut classes = BTreeSet::new();
        for bits in 0u64..(1 << pairs.len()) {
            let lt = |i: usize, j: usize| {
                i != j && bits >> pairs.iter().position(|&p| p == (i, j)).unwrap() & 1 == 1
            };
            let ok = (0..n).all(|i| {
                (0..n).all(|j| {
                    !(lt(i, j) && lt(j, i)) && (0..n).all(|k| !(lt(i, j) && lt(j, k)) || lt(i, k))
                })
            });
            if ok {
                let p = FinitePoset::from_relation(n, |i, j| i == j || lt(i, j)).unwrap();
                classes.insert(perms.iter().map(|q| p.code_under(q)).min().unwrap());
            }
        }
        classes.len()
    }

    #[test]
    fn counts_match_known_sequence() {
        let counts: Vec<usize> = (1..=5).map(|n| enumerate_posets(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 16, 63]);
    }

    #[test]
    fn three_element_count_matches_brute_force() {
        assert_eq!(brute_force_unlabeled(3), 5);
        assert_eq!(enumerate_posets(3).unwrap().len(), brute_force_unlabeled(3));
        assert_eq!(enumerate_posets(4).unwrap().len(), brute_force_unlabeled(4));
    }

    #[test]
    fn rejects_bad_sizes_and_relations() {
        assert!(matches!(enumerate_posets(0), Err(PosetError::UnsupportedSize(0, 5))));
        assert!(matches!(enumerate_posets(6), Err(PosetError::UnsupportedSize(6, 5))));
        assert!(matches!(
            FinitePoset::from_relation(2, |_, _| true),
            Err(PosetError::NotAntisymmetric(0, 1))
        ));
        assert!(matches!(
            FinitePoset::from_relation(3, |i, j| i == j || (i, j) == (0, 1) || (i, j) == (1, 2)),
            Err(PosetError::NotTransitive(0, 1, 2))
        ));
        assert!(matches!(
            FinitePoset::from_relation(2, |i, j| i < j),
            Err(PosetError::NotReflexive(0))
        ));
    }

    #[test]
    fn powerset_and_covers() {
        let p = FinitePoset::powerset(2).unwrap();
        assert_eq!(p.size(), 4);
        assert!(p.leq(0b01, 0b11));
        assert!(!p.leq(0b01, 0b10));
        assert_eq!(p.covers().len(), 4);
        assert_eq!(FinitePoset::chain(3).unwrap().covers(), vec![(0, 1), (1, 2)]);
    }
}
