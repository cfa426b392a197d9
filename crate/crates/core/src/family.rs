//! Explicit set families and the learning-space axioms checked on them.

use std::collections::VecDeque;
use std::sync::Arc;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::state::{Domain, SharedDomain, State};

/// Largest number of states an explicit family may hold.
pub const MAX_EXPLICIT_STATES: usize = 1 << 24;

/// Inner and outer fringe of a single state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fringes {
    /// Concepts whose removal leaves a state.
    pub inner: State,
    /// Concepts whose addition yields a state.
    pub outer: State,
}

/// A deduplicated family of states over one domain, kept in insertion order.
#[derive(Debug, Clone)]
pub struct SetFamily {
    domain: SharedDomain,
    states: IndexSet<State>,
}

impl PartialEq for SetFamily {
    /// Families are equal when they hold the same states, regardless of order.
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.states.len() == other.states.len()
            && self.states.iter().all(|s| other.states.contains(s))
    }
}

impl SetFamily {
    pub fn new(domain: SharedDomain) -> Self {
        Self { domain, states: IndexSet::new() }
    }

    pub fn from_states(domain: SharedDomain, states: impl IntoIterator<Item = State>) -> Result<Self> {
        let mut f = Self::new(domain);
        for s in states {
            f.insert(s)?;
        }
        Ok(f)
    }

    /// Builds a family from `.states`-style lines such as `"A,B"` or `"{}"`.
    pub fn from_labels(domain: SharedDomain, lines: &[&str]) -> Result<Self> {
        let states = lines.iter().map(|l| domain.parse_state(l)).collect::<Result<Vec<_>>>()?;
        Self::from_states(domain, states)
    }

    /// All subsets of an `n`-concept domain.
    pub fn powerset(domain: SharedDomain) -> Result<Self> {
        let n = domain.len();
        if n >= 24 {
            return Err(Error::Capacity(format!("powerset of {n} concepts")));
        }
        let states = (0u64..1 << n).map(|m| State::from_indices(n, (0..n).filter(|i| m >> i & 1 == 1)));
        Self::from_states(domain, states)
    }

    /// Inserts a state; returns whether it was new.
    pub fn insert(&mut self, s: State) -> Result<bool> {
        if s.universe() != self.domain.len() {
            return Err(Error::Validation(format!(
                "state over {} concepts inserted into a family over {}",
                s.universe(),
                self.domain.len()
            )));
        }
        if self.states.len() >= MAX_EXPLICIT_STATES && !self.states.contains(&s) {
            return Err(Error::Capacity(format!(
                "explicit families hold at most {MAX_EXPLICIT_STATES} states"
            )));
        }
        Ok(self.states.insert(s))
    }

    pub fn remove(&mut self, s: &State) -> bool {
        self.states.shift_remove(s)
    }

    pub fn domain(&self) -> &SharedDomain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, s: &State) -> bool {
        self.states.contains(s)
    }

    /// The stored copy of `s`, if present.
    pub fn get(&self, s: &State) -> Option<&State> {
        self.states.get(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &State> {
        self.states.iter()
    }

    /// States sorted by size, then lexicographically.
    pub fn sorted(&self) -> Vec<State> {
        let mut v: Vec<State> = self.states.iter().cloned().collect();
        v.sort();
        v
    }

    /// The union of all states.
    pub fn union_all(&self) -> State {
        let mut u = self.domain.empty_state();
        for s in &self.states {
            u.union_with(s);
        }
        u
    }

    /// Every nonempty state has a one-element-smaller state in the family.
    pub fn is_accessible(&self) -> bool {
        self.states
            .iter()
            .all(|s| s.is_empty() || s.iter().any(|x| self.states.contains(&s.without(x))))
    }

    pub fn is_union_closed(&self) -> bool {
        let v: Vec<&State> = self.states.iter().collect();
        v.iter().enumerate().all(|(i, a)| v[i + 1..].iter().all(|b| self.states.contains(&a.union(b))))
    }

    pub fn is_intersection_closed(&self) -> bool {
        let v: Vec<&State> = self.states.iter().collect();
        v.iter()
            .enumerate()
            .all(|(i, a)| v[i + 1..].iter().all(|b| self.states.contains(&a.intersection(b))))
    }

    /// Contains the empty state, is accessible and is union-closed.
    pub fn is_learning_space(&self) -> bool {
        self.states.contains(&self.domain.empty_state()) && self.is_accessible() && self.is_union_closed()
    }

    /// Every two members are joined by a path of single-element edits inside
    /// the family whose length equals their symmetric difference.
    pub fn is_well_graded(&self) -> bool {
        let v: Vec<&State> = self.states.iter().collect();
        let n = self.domain.len();
        for (i, &src) in v.iter().enumerate() {
            let mut dist = vec![usize::MAX; v.len()];
            dist[i] = 0;
            let mut queue = VecDeque::from([i]);
            while let Some(u) = queue.pop_front() {
                for x in 0..n {
                    let w = if v[u].contains(x) { v[u].without(x) } else { v[u].with(x) };
                    if let Some(j) = self.states.get_index_of(&w) {
                        if dist[j] == usize::MAX {
                            dist[j] = dist[u] + 1;
                            queue.push_back(j);
                        }
                    }
                }
            }
            for (j, &dst) in v.iter().enumerate() {
                let sym = src.difference(dst).len() + dst.difference(src).len();
                if dist[j] != sym {
                    return false;
                }
            }
        }
        true
    }

    /// Fringes of `s` computed by trying every single-element edit.
    pub fn state_fringes_bruteforce(&self, s: &State) -> Result<Fringes> {
        if !self.contains(s) {
            return Err(Error::NotAState(self.domain.format_state(s)));
        }
        let n = self.domain.len();
        let mut inner = self.domain.empty_state();
        let mut outer = self.domain.empty_state();
        for x in 0..n {
            if s.contains(x) {
                if self.contains(&s.without(x)) {
                    inner.insert(x);
                }
            } else if self.contains(&s.with(x)) {
                outer.insert(x);
            }
        }
        Ok(Fringes { inner, outer })
    }

    /// `{S ∩ keep}` over the sub-domain `keep`.
    pub fn project(&self, keep: &State) -> Result<SetFamily> {
        let sub = Arc::new(self.domain.restrict(keep));
        let map = restriction_map(self.domain.len(), keep);
        let mut f = SetFamily::new(sub.clone());
        for s in &self.states {
            f.insert(s.remap(sub.len(), &map))?;
        }
        Ok(f)
    }

    /// Family with a different (but equally sized) domain object; used when
    /// two families are built independently over the same labels.
    pub fn with_domain(&self, domain: SharedDomain) -> Result<SetFamily> {
        if *domain != *self.domain {
            return Err(Error::Validation("domains differ".into()));
        }
        Ok(SetFamily { domain, states: self.states.clone() })
    }
}

/// Index map from a domain onto the sub-domain formed by `keep`.
pub(crate) fn restriction_map(n: usize, keep: &State) -> Vec<Option<usize>> {
    let mut map = vec![None; n];
    for (j, i) in keep.iter().enumerate() {
        map[i] = Some(j);
    }
    map
}

/// Convenience for tests and examples: a family over single-character labels.
pub fn family_from_chars(domain: &str, states: &[&str]) -> Result<SetFamily> {
    let d = Arc::new(Domain::from_chars(domain)?);
    SetFamily::from_labels(d, states)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4() -> SetFamily {
        family_from_chars("ABC", &["{}", "A", "C", "A,B", "A,C", "B,C", "A,B,C"]).unwrap()
    }

    #[test]
    fn fig4_is_a_learning_space() {
        let f = fig4();
        assert!(f.is_accessible());
        assert!(f.is_union_closed());
        assert!(f.is_learning_space());
        assert!(!f.is_intersection_closed());
    }

    #[test]
    fn missing_empty_state_is_not_accessible() {
        let f = family_from_chars("AB", &["A,B"]).unwrap();
        assert!(!f.is_accessible());
        assert!(!f.is_learning_space());
    }

    #[test]
    fn fiber_example_is_not_accessible() {
        let f = family_from_chars("ABC", &["A,B", "A,B,C", "B,C"]).unwrap();
        assert!(!f.is_accessible());
        assert!(f.is_union_closed());
        assert!(f.is_well_graded());
    }

    #[test]
    fn union_closure_failure() {
        let f = family_from_chars("AB", &["{}", "A", "B"]).unwrap();
        assert!(!f.is_union_closed());
        let mut g = fig4();
        g.remove(&g.domain().state(["A", "C"]).unwrap());
        assert!(g.is_accessible());
        assert!(!g.is_union_closed());
        assert!(!g.is_learning_space());
    }

    #[test]
    fn trivial_families() {
        assert!(family_from_chars("AB", &["{}"]).unwrap().is_learning_space());
        assert!(family_from_chars("AB", &[]).unwrap().is_accessible());
        for n in 0..=10 {
            let d = Arc::new(Domain::new((0..n).map(|i| format!("c{i}"))).unwrap());
            assert!(SetFamily::powerset(d).unwrap().is_learning_space(), "n={n}");
        }
    }

    #[test]
    fn bruteforce_fringes_on_fig4() {
        let f = fig4();
        let d = f.domain().clone();
        let fr = f.state_fringes_bruteforce(&d.state(["B", "C"]).unwrap()).unwrap();
        assert_eq!(d.format_state(&fr.inner), "B");
        assert_eq!(d.format_state(&fr.outer), "A");
        let fr = f.state_fringes_bruteforce(&d.empty_state()).unwrap();
        assert_eq!(d.format_state(&fr.inner), "{}");
        assert_eq!(d.format_state(&fr.outer), "A,C");
        let fr = f.state_fringes_bruteforce(&d.full_state()).unwrap();
        assert!(fr.outer.is_empty());
        assert!(f.state_fringes_bruteforce(&d.state(["B"]).unwrap()).is_err());
    }

    #[test]
    fn fringe_pairs_identify_states() {
        let f = fig4();
        let pairs: Vec<_> = f.iter().map(|s| f.state_fringes_bruteforce(s).unwrap()).collect();
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                assert_ne!(pairs[i], pairs[j]);
            }
        }
    }

    #[test]
    fn duplicates_are_dropped_and_order_kept() {
        let f = family_from_chars("AB", &["A", "{}", "A"]).unwrap();
        assert_eq!(f.len(), 2);
        let d = f.domain();
        assert_eq!(d.format_state(f.iter().next().unwrap()), "A");
    }

    #[test]
    fn projection_of_fig4_onto_b() {
        let f = fig4();
        let keep = f.domain().state(["B"]).unwrap();
        let p = f.project(&keep).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.is_learning_space());
    }
}
