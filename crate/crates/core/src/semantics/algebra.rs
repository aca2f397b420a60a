use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::{self, Write as _};

use thiserror::Error;

use super::poset::FinitePoset;

/// Largest carrier for which operation tables are built.
pub const MAX_CARRIER: usize = 512;

/// An element of a [`DownsetAlgebra`], as an index into its carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Elem(pub u16);

impl Elem {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("downset algebra would have more than {0} elements")]
    TooLarge(usize),
    #[error("Heyting law violated: {0}")]
    LawViolated(String),
}

/// The Heyting algebra of downward-closed subsets of a finite poset.
///
/// Elements are indices into `carrier`, sorted by cardinality so that
/// `Elem(0)` is `∅` and the last element is the whole poset.
#[derive(Debug, Clone)]
pub struct DownsetAlgebra {
    poset: FinitePoset,
    carrier: Vec<u32>,
    index: HashMap<u32, Elem>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    imp: Vec<Elem>,
    leq: Vec<bool>,
}

impl DownsetAlgebra {
    /// Enumerates all downsets, tabulates the operations and checks the
    /// Heyting laws exhaustively.
    pub fn new(poset: FinitePoset) -> Result<Self, AlgebraError> {
        let n = poset.size();
        let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        // Breadth-first from ∅: add any element whose strict downset is present.
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([0u32]);
        seen.insert(0u32);
        while let Some(d) = queue.pop_front() {
            for e in 0..n {
                let strict = poset.down(e) & !(1 << e);
                if d >> e & 1 == 0 && strict & !d == 0 {
                    let next = d | 1 << e;
                    if seen.insert(next) {
                        if seen.len() > MAX_CARRIER {
                            return Err(AlgebraError::TooLarge(MAX_CARRIER));
                        }
                        queue.push_back(next);
                    }
                }
            }
        }
        let mut carrier: Vec<u32> = seen.into_iter().collect();
        carrier.sort_by_key(|&m| (m.count_ones(), m));
        let index: HashMap<u32, Elem> = carrier
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, Elem(i as u16)))
            .collect();
        let m = carrier.len();
        let lookup = |mask: u32| {
            index
                .get(&mask)
                .copied()
                .ok_or_else(|| AlgebraError::LawViolated(format!("{mask:#b} is not a downset")))
        };
        let mut meet = Vec::with_capacity(m * m);
        let mut join = Vec::with_capacity(m * m);
        let mut imp = Vec::with_capacity(m * m);
        let mut leq = Vec::with_capacity(m * m);
        for &a in &carrier {
            for &b in &carrier {
                meet.push(lookup(a & b)?);
                join.push(lookup(a | b)?);
                // p ∈ a → b iff every q ≤ p in a is also in b.
                let mut c = 0u32;
                for p in 0..n {
                    if poset.down(p) & a & !b == 0 {
                        c |= 1 << p;
                    }
                }
                imp.push(lookup(c & full)?);
                leq.push(a & !b == 0);
            }
        }
        let alg = DownsetAlgebra {
            poset,
            carrier,
            index,
            meet,
            join,
            imp,
            leq,
        };
        alg.check_laws()?;
        Ok(alg)
    }

    fn check_laws(&self) -> Result<(), AlgebraError> {
        let fail = |s: String| Err(AlgebraError::LawViolated(s));
        for a in self.elements() {
            if self.imp(a, a) != self.top() {
                return fail(format!("{a} -> {a} != T"));
            }
            for b in self.elements() {
                if self.meet(a, self.imp(a, b)) != self.meet(a, b) {
                    return fail(format!("{a} /\\ ({a} -> {b}) != {a} /\\ {b}"));
                }
                if self.meet(a, self.imp(b, a)) != a {
                    return fail(format!("{a} /\\ ({b} -> {a}) != {a}"));
                }
                let ab = self.imp(a, b);
                for c in self.elements() {
                    if self.imp(a, self.meet(b, c)) != self.meet(ab, self.imp(a, c)) {
                        return fail(format!("{a} -> ({b} /\\ {c}) does not distribute"));
                    }
                    // Residuation: a ∧ c ≤ b iff c ≤ a → b.
                    if self.leq(self.meet(a, c), b) != self.leq(c, ab) {
                        return fail(format!("adjunction fails at {a}, {b}, {c}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn size(&self) -> usize {
        self.carrier.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.carrier.len() as u16).map(Elem)
    }

    #[inline]
    pub fn bottom(&self) -> Elem {
        Elem(0)
    }

    #[inline]
    pub fn top(&self) -> Elem {
        Elem(self.carrier.len() as u16 - 1)
    }

    #[inline]
    fn at(&self, a: Elem, b: Elem) -> usize {
        a.index() * self.carrier.len() + b.index()
    }

    #[inline]
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[self.at(a, b)]
    }

    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[self.at(a, b)]
    }

    #[inline]
    pub fn imp(&self, a: Elem, b: Elem) -> Elem {
        self.imp[self.at(a, b)]
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[self.at(a, b)]
    }

    /// The downset, as a bitmask over poset elements.
    pub fn mask(&self, a: Elem) -> u32 {
        self.carrier[a.index()]
    }

    /// The element whose downset is `mask`, if `mask` is downward closed.
    pub fn element_of(&self, mask: u32) -> Option<Elem> {
        self.index.get(&mask).copied()
    }

    /// `{p₁,p₂,…}` listing of an element's downset.
    pub fn show(&self, a: Elem) -> String {
        let mask = self.mask(a);
        let members: Vec<String> = (0..self.poset.size())
            .filter(|p| mask >> p & 1 == 1)
            .map(|p| p.to_string())
            .collect();
        format!("{{{}}}", members.join(","))
    }

    /// Debugging dump: covering relation, carrier, and the three tables.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let covers: Vec<String> = self
            .poset
            .covers()
            .into_iter()
            .map(|(i, j)| format!("{i}<{j}"))
            .collect();
        let _ = writeln!(s, "poset: {} elements, covers [{}]", self.poset.size(), covers.join(" "));
        for a in self.elements() {
            let _ = writeln!(s, "  {a} = {}", self.show(a));
        }
        for (name, table) in [("meet", &self.meet), ("join", &self.join), ("imp", &self.imp)] {
            let _ = writeln!(s, "{name}:");
            for row in table.chunks(self.size()) {
                let cells: Vec<String> = row.iter().map(|e| e.0.to_string()).collect();
                let _ = writeln!(s, "  {}", cells.join(" "));
            }
        }
        s
    }
}

/// Downset algebras of every poset with `1..=max` elements.
pub fn algebras_up_to(max: usize) -> Result<Vec<DownsetAlgebra>, super::SemanticsError> {
    let mut out = Vec::new();
    for p in super::poset::posets_up_to(max)? {
        out.push(DownsetAlgebra::new(p)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_is_boolean() {
        let a = DownsetAlgebra::new(FinitePoset::chain(1).unwrap()).unwrap();
        assert_eq!(a.size(), 2);
        assert_eq!(a.imp(a.top(), a.bottom()), a.bottom());
        assert_eq!(a.imp(a.bottom(), a.bottom()), a.top());
    }

    #[test]
    fn antichain_two_is_four_element_boolean() {
        let a = DownsetAlgebra::new(FinitePoset::antichain(2).unwrap()).unwrap();
        assert_eq!(a.size(), 4);
        // Boolean: every element has a complement.
        for x in a.elements() {
            let not_x = a.imp(x, a.bottom());
            assert_eq!(a.join(x, not_x), a.top());
        }
    }

    #[test]
    fn two_chain_is_goedel_three_valued() {
        let a = DownsetAlgebra::new(FinitePoset::chain(2).unwrap()).unwrap();
        // Downsets of 0 < 1: ∅, {0}, {0,1}.
        assert_eq!(a.size(), 3);
        let mid = Elem(1);
        assert_eq!(a.show(mid), "{0}");
        assert_eq!(a.imp(mid, a.bottom()), a.bottom());
        assert_eq!(a.join(mid, a.imp(mid, a.bottom())), mid);
        assert!(a.leq(a.bottom(), mid) && a.leq(mid, a.top()));
    }

    #[test]
    fn powerset_algebra_sizes() {
        // Antichains of the boolean lattice: Dedekind numbers.
        let sizes: Vec<usize> = (1..=4)
            .map(|k| DownsetAlgebra::new(FinitePoset::powerset(k).unwrap()).unwrap().size())
            .collect();
        assert_eq!(sizes, vec![3, 6, 20, 168]);
    }

    #[test]
    fn all_small_algebras_satisfy_laws() {
        let algs = algebras_up_to(4).unwrap();
        assert_eq!(algs.len(), 1 + 2 + 5 + 16);
    }

    #[test]
    fn dump_mentions_tables() {
        let a = DownsetAlgebra::new(FinitePoset::chain(2).unwrap()).unwrap();
        let d = a.dump();
        assert!(d.contains("covers [0<1]"));
        assert!(d.contains("imp:"));
    }
}
