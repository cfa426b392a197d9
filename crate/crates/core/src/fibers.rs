//! Fibers of projections, union-closed families given by generators,
//! recognition of upper subfamilies, and the join of two spaces.

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::base_dimension::{minimize_with_base, BaseFamily};
use crate::error::{Error, Result};
use crate::family::{restriction_map, SetFamily};
use crate::sequence_space::SequenceSpace;
use crate::space::{visit_states, LearningSpace, Traversal};
use crate::state::{SharedDomain, State};

/// `{S ∈ ℒ : K ⊆ S, S ∩ U = ∅}`.
pub fn fiber<S: LearningSpace + ?Sized>(space: &S, know: &State, unknow: &State) -> Result<SetFamily> {
    if !know.is_disjoint(unknow) {
        return Err(Error::Validation(format!(
            "known and unknown concepts overlap in {}",
            space.domain().format_state(&know.intersection(unknow))
        )));
    }
    let mut out = SetFamily::new(space.domain().clone());
    let mut err = None;
    let _ = visit_states(space, |s| {
        if know.is_subset(s) && s.is_disjoint(unknow) {
            if let Err(e) = out.insert(s.clone()) {
                err = Some(e);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// A family given by generators; its members are the unions of generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorFamily {
    domain: SharedDomain,
    sets: Vec<State>,
}

impl GeneratorFamily {
    /// Duplicate generators are dropped.
    pub fn new(domain: SharedDomain, sets: impl IntoIterator<Item = State>) -> Result<Self> {
        let mut out: Vec<State> = Vec::new();
        for s in sets {
            if s.universe() != domain.len() {
                return Err(Error::Validation("generator over a different domain".into()));
            }
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Ok(Self { domain, sets: out })
    }

    pub fn from_family(f: &SetFamily) -> Self {
        Self { domain: f.domain().clone(), sets: f.iter().cloned().collect() }
    }

    pub fn domain(&self) -> &SharedDomain {
        &self.domain
    }

    pub fn sets(&self) -> &[State] {
        &self.sets
    }

    /// `s` is the union of the generators it contains.
    pub fn closure_membership(&self, s: &State) -> bool {
        let mut acc = State::empty(self.domain.len());
        for t in self.sets.iter().filter(|t| t.is_subset(s)) {
            acc.union_with(t);
        }
        acc == *s
    }

    /// `s ∪ T` is a member for every generator `T`, hence for every member `T`.
    /// `s` itself need not be a member.
    pub fn is_safe(&self, s: &State) -> bool {
        self.sets.iter().all(|t| self.closure_membership(&s.union(t)))
    }

    /// Union of all generators.
    pub fn ground(&self) -> State {
        self.sets.iter().fold(State::empty(self.domain.len()), |acc, s| acc.union(s))
    }

    /// All members, by closing the generators under union.
    pub fn closure(&self) -> Result<SetFamily> {
        let mut seen: HashSet<State> = HashSet::new();
        let mut frontier: Vec<State> = Vec::new();
        for s in &self.sets {
            if seen.insert(s.clone()) {
                frontier.push(s.clone());
            }
        }
        while let Some(s) = frontier.pop() {
            for g in &self.sets {
                let u = s.union(g);
                if seen.insert(u.clone()) {
                    if seen.len() > crate::family::MAX_EXPLICIT_STATES {
                        return Err(Error::Capacity("union closure too large".into()));
                    }
                    frontier.push(u);
                }
            }
        }
        let mut v: Vec<State> = seen.into_iter().collect();
        v.sort();
        SetFamily::from_states(self.domain.clone(), v)
    }

    /// Greedy search for an ordering of `s` all of whose prefixes are safe,
    /// trying concepts in domain order.
    pub fn reaching_sequence(&self, s: &State) -> Option<Vec<usize>> {
        let mut prefix = State::empty(self.domain.len());
        let mut seq = Vec::with_capacity(s.len());
        while prefix != *s {
            let x = s.difference(&prefix).iter().find(|&x| self.is_safe(&prefix.with(x)))?;
            prefix.insert(x);
            seq.push(x);
        }
        Some(seq)
    }
}

/// The union closure of `{∅} ∪` generators, treated as a learning space:
/// membership by the generator test, traversal by reverse search. Only
/// accessible members are reached by the traversal.
impl LearningSpace for GeneratorFamily {
    fn domain(&self) -> &SharedDomain {
        &self.domain
    }

    fn contains(&self, s: &State) -> bool {
        self.closure_membership(s)
    }

    fn traverse<T: Traversal>(&self, visitor: &mut T) -> ControlFlow<T::Break> {
        let mut cur = State::empty(self.domain.len());
        let ground = self.ground();
        visitor.enter(&cur, None)?;
        self.walk(&mut cur, &ground, visitor)?;
        visitor.leave(&cur, None);
        ControlFlow::Continue(())
    }

    fn interior(&self, s: &State) -> State {
        let mut acc = State::empty(self.domain.len());
        for t in self.sets.iter().filter(|t| t.is_subset(s)) {
            acc.union_with(t);
        }
        acc
    }

    fn top(&self) -> State {
        self.ground()
    }
}

impl GeneratorFamily {
    /// The parent of `t` removes its highest-indexed concept whose removal
    /// leaves a member.
    fn walk<T: Traversal>(&self, cur: &mut State, ground: &State, visitor: &mut T) -> ControlFlow<T::Break> {
        for x in ground.difference(cur).iter().collect::<Vec<_>>() {
            cur.insert(x);
            let is_child = self.closure_membership(cur)
                && cur.iter().filter(|&y| y > x).all(|y| !self.closure_membership(&cur.without(y)));
            if is_child {
                let flow = visitor.enter(cur, Some(x));
                let flow = match flow {
                    ControlFlow::Continue(()) => self.walk(cur, ground, visitor),
                    b => b,
                };
                if flow.is_continue() {
                    visitor.leave(cur, Some(x));
                }
                if flow.is_break() {
                    cur.remove(x);
                    return flow;
                }
            }
            cur.remove(x);
        }
        ControlFlow::Continue(())
    }
}

/// A learning space containing the generated family as an upper subfamily.
#[derive(Debug, Clone)]
pub struct UpperCompletion {
    /// Minimal sequences over the concepts covered by the generators.
    pub space: SequenceSpace,
    /// The safe ordering found for each generator.
    pub reaching: Vec<Vec<usize>>,
}

/// Finds a learning space of which the union closure of `gen` is an upper
/// subfamily, or `None` when some generator cannot be reached through safe
/// prefixes.
pub fn recognize_upper_subfamily(gen: &GeneratorFamily) -> Result<Option<UpperCompletion>> {
    let mut reaching = Vec::with_capacity(gen.sets.len());
    for s in &gen.sets {
        match gen.reaching_sequence(s) {
            Some(seq) => reaching.push(seq),
            None => return Ok(None),
        }
    }
    let ground = gen.ground();
    let sub = Arc::new(gen.domain.restrict(&ground));
    let map = restriction_map(gen.domain.len(), &ground);
    let m = sub.len();
    let mut prefixes: Vec<State> = Vec::new();
    for seq in &reaching {
        let mut p = State::empty(m);
        for &x in seq {
            p.insert(map[x].expect("generator concept lies in the ground set"));
            if !prefixes.contains(&p) {
                prefixes.push(p.clone());
            }
        }
    }
    // The learning space is generated by the prefixes; its base is the
    // prefixes that are not unions of smaller prefixes.
    let space = GeneratorFamily::new(sub.clone(), prefixes.iter().cloned())?;
    let base_sets = prefixes.iter().filter(|p| {
        let mut acc = State::empty(m);
        for q in prefixes.iter().filter(|q| q.is_subset(p) && q != p) {
            acc.union_with(q);
        }
        acc != **p
    });
    let base = BaseFamily::new(sub, base_sets.cloned());
    let minimized = minimize_with_base(&space, base)?;
    Ok(Some(UpperCompletion { space: minimized.space, reaching }))
}

/// `{S₁ ∪ S₂}`, realised by pooling the two sequence sets.
pub fn join(a: &SequenceSpace, b: &SequenceSpace) -> Result<SequenceSpace> {
    if a.domain() != b.domain() {
        return Err(Error::Validation("spaces are over different domains".into()));
    }
    a.with_sequences(b.sequences())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::space::collect_family;

    #[test]
    fn fiber_of_three_concept_space() {
        let f = fixtures::three_concept_family();
        let d = f.domain().clone();
        let fib = fiber(&f, &d.state(["B"]).unwrap(), &d.empty_state()).unwrap();
        let mut shown: Vec<String> = fib.sorted().iter().map(|s| d.format_state(s)).collect();
        shown.sort();
        assert_eq!(shown, ["A,B", "A,B,C", "B,C"]);
        assert_eq!(fiber(&f, &d.empty_state(), &d.empty_state()).unwrap(), f);
        assert_eq!(fiber(&f, &d.full_state(), &d.empty_state()).unwrap().len(), 1);
        assert!(fiber(&f, &d.state(["A"]).unwrap(), &d.state(["A"]).unwrap()).is_err());
    }

    #[test]
    fn membership_and_safety() {
        let d = Arc::new(crate::state::Domain::from_chars("abc").unwrap());
        let g = GeneratorFamily::new(d.clone(), [d.state(["a"]).unwrap(), d.state(["b"]).unwrap()]).unwrap();
        assert!(g.closure_membership(&d.state(["a", "b"]).unwrap()));
        assert!(!g.closure_membership(&d.state(["a", "c"]).unwrap()));
        assert!(g.closure_membership(&d.state(["a"]).unwrap()));
        let g = GeneratorFamily::new(d.clone(), [d.state(["a", "b"]).unwrap()]).unwrap();
        assert!(g.is_safe(&d.state(["a"]).unwrap()));
        assert!(!g.is_safe(&d.state(["c"]).unwrap()));
        assert!(g.is_safe(&d.empty_state()));
    }

    #[test]
    fn recognition() {
        assert!(recognize_upper_subfamily(&fixtures::pentagon_generators()).unwrap().is_none());
        let d = Arc::new(crate::state::Domain::from_chars("abc").unwrap());
        let singletons = GeneratorFamily::new(d.clone(), (0..3).map(|x| State::from_indices(3, [x]))).unwrap();
        let c = recognize_upper_subfamily(&singletons).unwrap().unwrap();
        assert_eq!(collect_family(&c.space).unwrap().len(), 8);
        let gens = GeneratorFamily::new(d.clone(), ["a,b", "b,c", "a,c"].map(|s| d.parse_state(s).unwrap())).unwrap();
        let c = recognize_upper_subfamily(&gens).unwrap().unwrap();
        let l = collect_family(&c.space).unwrap();
        assert!(l.is_learning_space());
        let upper = gens.closure().unwrap();
        for s in upper.iter() {
            assert!(l.contains(s));
            for t in l.iter() {
                assert!(upper.contains(&s.union(t)));
            }
        }
    }

    #[test]
    fn joins() {
        let a = SequenceSpace::from_chars("ABC", &["ABC"]).unwrap();
        let b = SequenceSpace::from_chars("ABC", &["CBA"]).unwrap();
        let j = join(&a, &b).unwrap();
        assert_eq!(collect_family(&j).unwrap(), fixtures::three_concept_family());
        assert_eq!(join(&j, &j).unwrap(), j);
        let other = SequenceSpace::from_chars("ABD", &["ABD"]).unwrap();
        assert!(join(&a, &other).is_err());
    }
}
