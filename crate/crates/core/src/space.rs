//! The common interface of the three learning-space representations.

use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::family::{Fringes, SetFamily, MAX_EXPLICIT_STATES};
use crate::state::{SharedDomain, State};

/// Callbacks for a depth-first walk over a spanning tree of the states in
/// which every child adds exactly one concept to its parent.
pub trait Traversal {
    type Break;

    /// Reached `state`; `added` is the concept added to the parent, `None` at the root.
    fn enter(&mut self, state: &State, added: Option<usize>) -> ControlFlow<Self::Break>;

    /// All descendants of `state` have been visited.
    fn leave(&mut self, _state: &State, _added: Option<usize>) {}
}

/// A learning space that can decide membership and list its states.
pub trait LearningSpace: Sync {
    fn domain(&self) -> &SharedDomain;

    fn contains(&self, s: &State) -> bool;

    /// Visits every state exactly once, parents before children, starting at ∅.
    fn traverse<T: Traversal>(&self, visitor: &mut T) -> ControlFlow<T::Break>;

    /// The largest state contained in `s`.
    fn interior(&self, s: &State) -> State;

    /// The union of all states.
    fn top(&self) -> State;

    /// Fringes of a member state.
    fn state_fringes(&self, s: &State) -> Result<Fringes> {
        if !self.contains(s) {
            return Err(Error::NotAState(self.domain().format_state(s)));
        }
        let n = self.domain().len();
        let mut inner = self.domain().empty_state();
        let mut outer = self.domain().empty_state();
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
}

struct FnVisitor<F>(F);

impl<F: FnMut(&State) -> ControlFlow<B>, B> Traversal for FnVisitor<F> {
    type Break = B;
    fn enter(&mut self, state: &State, _added: Option<usize>) -> ControlFlow<B> {
        (self.0)(state)
    }
}

/// Calls `f` on every state; stops early when `f` breaks.
pub fn visit_states<S, F, B>(space: &S, f: F) -> ControlFlow<B>
where
    S: LearningSpace + ?Sized,
    F: FnMut(&State) -> ControlFlow<B>,
{
    traverse_dyn(space, &mut FnVisitor(f))
}

fn traverse_dyn<S: LearningSpace + ?Sized, T: Traversal>(space: &S, t: &mut T) -> ControlFlow<T::Break> {
    space.traverse(t)
}

pub fn count_states<S: LearningSpace + ?Sized>(space: &S) -> u64 {
    let mut count = 0u64;
    let _ = visit_states(space, |_| {
        count += 1;
        ControlFlow::<()>::Continue(())
    });
    count
}

/// Lists every state into an explicit family (in traversal order).
pub fn collect_family<S: LearningSpace + ?Sized>(space: &S) -> Result<SetFamily> {
    let mut family = SetFamily::new(space.domain().clone());
    let mut err = None;
    let _ = visit_states(space, |s| match family.insert(s.clone()) {
        Ok(_) => ControlFlow::Continue(()),
        Err(e) => {
            err = Some(e);
            ControlFlow::Break(())
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(family),
    }
}

/// Lists states, failing with a capacity error past `limit`.
pub fn collect_family_capped<S: LearningSpace + ?Sized>(space: &S, limit: usize) -> Result<SetFamily> {
    let limit = limit.min(MAX_EXPLICIT_STATES);
    let mut family = SetFamily::new(space.domain().clone());
    let flow = visit_states(space, |s| {
        if family.len() >= limit {
            return ControlFlow::Break(());
        }
        family.insert(s.clone()).expect("capacity checked above");
        ControlFlow::Continue(())
    });
    if flow.is_break() {
        return Err(Error::Capacity(format!("space has more than {limit} states")));
    }
    Ok(family)
}

impl LearningSpace for SetFamily {
    fn domain(&self) -> &SharedDomain {
        SetFamily::domain(self)
    }

    fn contains(&self, s: &State) -> bool {
        SetFamily::contains(self, s)
    }

    /// Spanning tree: the parent of `S` removes the highest-indexed concept
    /// whose removal stays in the family. Only states reachable from ∅ that
    /// way are visited, so the family should be accessible.
    fn traverse<T: Traversal>(&self, visitor: &mut T) -> ControlFlow<T::Break> {
        let root = self.domain().empty_state();
        if !self.contains(&root) {
            return ControlFlow::Continue(());
        }
        let mut children: HashMap<&State, Vec<(usize, &State)>> = HashMap::new();
        for s in self.iter() {
            if let Some(x) = s.iter().filter(|&x| self.contains(&s.without(x))).last() {
                let parent = self.get(&s.without(x)).expect("member");
                children.entry(parent).or_default().push((x, s));
            }
        }
        for list in children.values_mut() {
            list.sort_by_key(|&(x, _)| x);
        }
        let root = self.get(&root).expect("contains root");
        walk_family(root, None, &children, visitor)
    }

    fn interior(&self, s: &State) -> State {
        let mut acc = self.domain().empty_state();
        for t in self.iter().filter(|t| t.is_subset(s)) {
            acc.union_with(t);
        }
        acc
    }

    fn top(&self) -> State {
        self.union_all()
    }
}

fn walk_family<T: Traversal>(
    s: &State,
    added: Option<usize>,
    children: &HashMap<&State, Vec<(usize, &State)>>,
    visitor: &mut T,
) -> ControlFlow<T::Break> {
    visitor.enter(s, added)?;
    if let Some(list) = children.get(s) {
        for &(x, c) in list {
            walk_family(c, Some(x), children, visitor)?;
        }
    }
    visitor.leave(s, added);
    ControlFlow::Continue(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::family_from_chars;

    #[test]
    fn family_traversal_visits_each_state_once_parent_first() {
        let f = family_from_chars("ABC", &["{}", "A", "C", "A,B", "A,C", "B,C", "A,B,C"]).unwrap();
        let mut seen: Vec<State> = Vec::new();
        let _ = visit_states(&f, |s| {
            if !s.is_empty() {
                assert!(s.iter().any(|x| seen.contains(&s.without(x))));
            }
            seen.push(s.clone());
            ControlFlow::<()>::Continue(())
        });
        assert_eq!(seen.len(), 7);
        assert_eq!(collect_family(&f).unwrap(), f);
        assert_eq!(count_states(&f), 7);
        assert!(collect_family_capped(&f, 6).is_err());
    }

    #[test]
    fn family_interior() {
        let f = family_from_chars("ABC", &["{}", "A", "C", "A,B", "A,C", "B,C", "A,B,C"]).unwrap();
        let d = f.domain().clone();
        assert_eq!(f.interior(&d.state(["B"]).unwrap()), d.empty_state());
        assert_eq!(f.interior(&d.state(["A", "B"]).unwrap()), d.state(["A", "B"]).unwrap());
    }
}
