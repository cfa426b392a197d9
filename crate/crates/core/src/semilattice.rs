//! Finite semilattices with identity given by operation tables, and their
//! representations as antimatroids and as quasi-ordinal spaces.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::quasi_ordinal::{HasseDiagram, PartialOrder};
use crate::state::{Domain, State};

/// A commutative idempotent monoid on objects `0..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemilatticeTable {
    m: usize,
    op: Vec<usize>,
    identity: usize,
    names: Vec<String>,
}

/// Irreducible, prime and singular objects of a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub irreducibles: Vec<usize>,
    pub primes: Vec<usize>,
    /// Singular objects paired with their unique successor.
    pub singulars: Vec<(usize, usize)>,
}

/// `x | y` with objects `a`, `b` such that `xa ≠ xb`, `xa ≠ ya = yb ≠ xb`,
/// and nothing strictly between `x` and `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EqualizerWitness {
    pub x: usize,
    pub y: usize,
    pub a: usize,
    pub b: usize,
}

/// The sets `N(x)` of singular objects not divided by `x`.
#[derive(Debug, Clone)]
pub struct NRepresentation {
    /// One set per object, indexed by object, over a domain of singular objects.
    pub sets: Vec<State>,
    pub family: SetFamily,
    pub injective: bool,
    pub homomorphic: bool,
    /// `None` when the table has separated equalizers.
    pub witness: Option<EqualizerWitness>,
}

impl SemilatticeTable {
    /// Validates the table exhaustively.
    pub fn new(op: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let m = op.len();
        let names = (0..m).map(|i| i.to_string()).collect();
        Self::with_names(op, identity, names)
    }

    pub fn with_names(op: Vec<Vec<usize>>, identity: usize, names: Vec<String>) -> Result<Self> {
        let m = op.len();
        if m == 0 {
            return Err(Error::Validation("a semilattice needs at least one object".into()));
        }
        if names.len() != m {
            return Err(Error::Validation("one name per object is required".into()));
        }
        if identity >= m {
            return Err(Error::Validation(format!("identity {identity} out of range")));
        }
        let mut flat = Vec::with_capacity(m * m);
        for (i, row) in op.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Validation(format!("row {i} has {} entries, expected {m}", row.len())));
            }
            if let Some(&v) = row.iter().find(|&&v| v >= m) {
                return Err(Error::Validation(format!("row {i} has out-of-range entry {v}")));
            }
            flat.extend_from_slice(row);
        }
        let t = Self { m, op: flat, identity, names };
        for x in 0..m {
            if t.mul(x, x) != x {
                return Err(Error::Validation(format!("not idempotent at {x}")));
            }
            if t.mul(identity, x) != x {
                return Err(Error::Validation(format!("identity law fails at {x}")));
            }
            for y in 0..m {
                if t.mul(x, y) != t.mul(y, x) {
                    return Err(Error::Validation(format!("not commutative at ({x},{y})")));
                }
                for z in 0..m {
                    if t.mul(t.mul(x, y), z) != t.mul(x, t.mul(y, z)) {
                        return Err(Error::Validation(format!("not associative at ({x},{y},{z})")));
                    }
                }
            }
        }
        Ok(t)
    }

    /// The union operation on a union-closed family containing `∅`; objects
    /// are the states in size-then-lexicographic order.
    pub fn from_family(f: &SetFamily) -> Result<Self> {
        if !f.is_union_closed() {
            return Err(Error::Validation("family is not union-closed".into()));
        }
        let states = f.sorted();
        let identity = states
            .iter()
            .position(|s| s.is_empty())
            .ok_or_else(|| Error::Validation("family lacks the empty state".into()))?;
        let index = |s: &State| states.binary_search(s).expect("union-closed");
        let op = states.iter().map(|a| states.iter().map(|b| index(&a.union(b))).collect()).collect();
        let names = states.iter().map(|s| f.domain().format_state(s)).collect();
        Self::with_names(op, identity, names)
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Operation rows.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.op.chunks(self.m).map(<[usize]>::to_vec).collect()
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.op[x * self.m + y]
    }

    /// `x | y`: some `z` has `xz = y`, equivalently `xy = y`.
    #[inline]
    pub fn divides(&self, x: usize, y: usize) -> bool {
        self.mul(x, y) == y
    }

    fn strictly_between(&self, x: usize, y: usize) -> bool {
        (0..self.m).any(|z| z != x && z != y && self.divides(x, z) && self.divides(z, y))
    }

    /// Irreducibles, primes and singulars. The identity is neither
    /// irreducible nor prime.
    pub fn classify_elements(&self) -> Classification {
        let m = self.m;
        let objects = || (0..m).filter(|&x| x != self.identity);
        let irreducibles = objects()
            .filter(|&x| {
                (0..m).all(|y| (0..m).all(|z| self.mul(y, z) != x || y == x || z == x))
            })
            .collect();
        let primes = objects()
            .filter(|&x| {
                (0..m).all(|y| {
                    (0..m).all(|z| !self.divides(x, self.mul(y, z)) || self.divides(x, y) || self.divides(x, z))
                })
            })
            .collect();
        let mut singulars = Vec::new();
        for s in 0..m {
            let above: Vec<usize> = (0..m).filter(|&t| t != s && self.divides(s, t)).collect();
            let minimal: Vec<usize> = above
                .iter()
                .copied()
                .filter(|&t| !above.iter().any(|&u| u != t && self.divides(u, t)))
                .collect();
            if let [t] = minimal[..] {
                singulars.push((s, t));
            }
        }
        Classification { irreducibles, primes, singulars }
    }

    /// Every equalizing pair with no object strictly between its members.
    pub fn equalizer_violations(&self) -> Vec<EqualizerWitness> {
        let m = self.m;
        let mut out = Vec::new();
        for x in 0..m {
            for y in 0..m {
                if x == y || !self.divides(x, y) || self.strictly_between(x, y) {
                    continue;
                }
                'ab: for a in 0..m {
                    for b in 0..m {
                        let (xa, xb, ya, yb) = (self.mul(x, a), self.mul(x, b), self.mul(y, a), self.mul(y, b));
                        if xa != xb && xa != ya && ya == yb && yb != xb {
                            out.push(EqualizerWitness { x, y, a, b });
                            break 'ab;
                        }
                    }
                }
            }
        }
        out
    }

    /// `Err` carries the first violating equalizing pair.
    pub fn check_separated_equalizers(&self) -> std::result::Result<(), EqualizerWitness> {
        match self.equalizer_violations().first() {
            Some(&w) => Err(w),
            None => Ok(()),
        }
    }

    pub fn has_separated_equalizers(&self) -> bool {
        self.check_separated_equalizers().is_ok()
    }

    /// Maps each object `x` to `N(x)` over a domain naming the singular objects.
    pub fn to_antimatroid(&self) -> NRepresentation {
        let c = self.classify_elements();
        let singular: Vec<usize> = c.singulars.iter().map(|&(s, _)| s).collect();
        let domain = Arc::new(
            Domain::new(singular.iter().map(|s| format!("s{s}"))).expect("distinct generated labels"),
        );
        let k = singular.len();
        let sets: Vec<State> = (0..self.m)
            .map(|x| State::from_indices(k, (0..k).filter(|&j| !self.divides(x, singular[j]))))
            .collect();
        let mut injective = true;
        for i in 0..self.m {
            for j in i + 1..self.m {
                if sets[i] == sets[j] {
                    injective = false;
                }
            }
        }
        let homomorphic = (0..self.m)
            .all(|x| (0..self.m).all(|y| sets[self.mul(x, y)] == sets[x].union(&sets[y])));
        let family = SetFamily::from_states(domain, sets.iter().cloned()).expect("small family");
        NRepresentation { sets, family, injective, homomorphic, witness: self.check_separated_equalizers().err() }
    }

    /// Hasse diagram on the primes under divisibility, when every
    /// irreducible is prime; otherwise an irreducible that is not prime.
    pub fn to_quasi_ordinal(&self) -> std::result::Result<HasseDiagram, usize> {
        let c = self.classify_elements();
        if let Some(&bad) = c.irreducibles.iter().find(|x| !c.primes.contains(x)) {
            return Err(bad);
        }
        let primes = &c.primes;
        let domain = Arc::new(Domain::new(primes.iter().map(|p| format!("p{p}"))).expect("distinct generated labels"));
        let mut pairs = Vec::new();
        for (i, &p) in primes.iter().enumerate() {
            for (j, &q) in primes.iter().enumerate() {
                if i != j && self.divides(p, q) {
                    pairs.push((i, j));
                }
            }
        }
        let order = PartialOrder::from_pairs(domain, pairs).expect("divisibility is a partial order");
        Ok(order.hasse())
    }

    /// `P_x`: the primes dividing `x`, over the domain of [`Self::to_quasi_ordinal`].
    pub fn prime_divisors(&self, x: usize) -> State {
        let primes = self.classify_elements().primes;
        State::from_indices(primes.len(), (0..primes.len()).filter(|&i| self.divides(primes[i], x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::family_from_chars;
    use crate::fixtures;
    use crate::space::count_states;

    fn boolean(n: usize) -> SemilatticeTable {
        let d = crate::generate::letter_domain(n);
        SemilatticeTable::from_family(&SetFamily::powerset(d).unwrap()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(SemilatticeTable::new(vec![vec![0, 1], vec![1, 1]], 0).is_ok());
        assert!(SemilatticeTable::new(vec![vec![0, 1], vec![0, 1]], 0).is_err());
        assert!(SemilatticeTable::new(vec![vec![0, 0], vec![0, 1]], 0).is_err());
        assert!(SemilatticeTable::new(vec![vec![0, 1], vec![1, 1]], 1).is_err());
        assert!(SemilatticeTable::new(vec![], 0).is_err());
    }

    #[test]
    fn boolean_two_set() {
        let t = boolean(2);
        let c = t.classify_elements();
        let names: Vec<&str> = c.irreducibles.iter().map(|&x| t.name(x)).collect();
        assert_eq!(names, ["A", "B"]);
        assert_eq!(c.primes, c.irreducibles);
        assert!(t.has_separated_equalizers());
    }

    #[test]
    fn crossing_pairs_lack_separated_equalizers() {
        for f in [
            family_from_chars("abc", &["{}", "a,b", "a,c", "b,c", "a,b,c"]).unwrap(),
            family_from_chars("abc", &["{}", "c", "a,b", "b,c", "a,b,c"]).unwrap(),
        ] {
            let t = SemilatticeTable::from_family(&f).unwrap();
            let w = t.check_separated_equalizers().unwrap_err();
            assert_eq!((t.name(w.x), t.name(w.y)), ("{}", "a,b"));
            let rep = t.to_antimatroid();
            assert!(rep.injective && rep.homomorphic);
            assert!(!rep.family.is_learning_space());
        }
    }

    #[test]
    fn antimatroid_round_trip() {
        let f = fixtures::three_concept_family();
        let t = SemilatticeTable::from_family(&f).unwrap();
        assert!(t.has_separated_equalizers());
        let rep = t.to_antimatroid();
        assert!(rep.injective && rep.homomorphic);
        assert!(rep.family.is_learning_space());
        assert_eq!(rep.family.len(), 7);
        assert!(t.to_quasi_ordinal().is_err());
    }

    #[test]
    fn one_object() {
        let t = SemilatticeTable::new(vec![vec![0]], 0).unwrap();
        let rep = t.to_antimatroid();
        assert_eq!(rep.family.len(), 1);
        assert!(rep.family.iter().next().unwrap().is_empty());
    }

    #[test]
    fn quasi_ordinal_representations() {
        let h = boolean(3).to_quasi_ordinal().unwrap();
        assert_eq!(h.domain().len(), 3);
        assert!(h.edges().is_empty());
        let chain: Vec<Vec<usize>> = (0..5).map(|i| (0..5).map(|j| i.max(j)).collect()).collect();
        let t = SemilatticeTable::new(chain, 0).unwrap();
        let h = t.to_quasi_ordinal().unwrap();
        assert_eq!(h.edges().len(), 3);
        assert_eq!(count_states(&h), 5);
    }
}
