//! Fringes of a learning space and single-state edits.

use std::collections::HashSet;
use std::ops::ControlFlow;

use crate::base_dimension::{base_of_family, base_of_space, minimize_family, BaseFamily};
use crate::error::{Error, Result};
use crate::family::{SetFamily, MAX_EXPLICIT_STATES};
use crate::sequence_space::SequenceSpace;
use crate::space::{collect_family_capped, visit_states, LearningSpace};
use crate::state::State;

/// Removable states and addable sets of a learning space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceFringe {
    pub removable: Vec<State>,
    pub addable: Vec<State>,
}

/// Result of adding or removing one state.
#[derive(Debug, Clone)]
pub struct Adapted {
    /// Minimal sequences for the edited space.
    pub space: SequenceSpace,
    /// Base of the edited space, recomputed from its states.
    pub base: BaseFamily,
    /// The edited base has the shape predicted from the old base.
    pub base_formula_agrees: bool,
}

/// Base states `S ≠ ∪ℒ` none of whose one-element extensions is in the base.
pub fn space_inner_fringe<S: LearningSpace + ?Sized>(space: &S) -> Result<Vec<State>> {
    let base = base_of_space(space)?;
    Ok(inner_fringe_from_base(space, &base))
}

fn inner_fringe_from_base<S: LearningSpace + ?Sized>(space: &S, base: &BaseFamily) -> Vec<State> {
    let top = space.top();
    let n = space.domain().len();
    base.sets()
        .iter()
        .filter(|s| **s != top && (0..n).filter(|&x| !s.contains(x)).all(|x| !base.contains(&s.with(x))))
        .cloned()
        .collect()
}

/// Concepts `x` for which `s ∪ {x}` can be added, given that `s` is a state.
fn addable_from<S: LearningSpace + ?Sized>(space: &S, s: &State) -> Result<State> {
    let outer = space.state_fringes(s)?.outer;
    let mut cand = s.complement();
    if outer.is_empty() {
        return Ok(cand);
    }
    for y in outer.iter() {
        cand = cand.intersection(&space.state_fringes(&s.with(y))?.outer);
    }
    Ok(cand)
}

/// Sets `S ∪ {x}`, `S` a state, with `x` in the outer fringe of `S ∪ {y}`
/// for every `y` in the outer fringe of `S`. Each is listed once.
pub fn space_outer_fringe<S: LearningSpace + ?Sized>(space: &S) -> Result<Vec<State>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut err = None;
    let _ = visit_states(space, |s| {
        match addable_from(space, s) {
            Ok(c) => {
                for x in c.iter() {
                    let t = s.with(x);
                    if seen.insert(t.clone()) {
                        out.push(t);
                    }
                }
            }
            Err(e) => {
                err = Some(e);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    match err {
        Some(e) => Err(e),
        None => {
            out.sort();
            Ok(out)
        }
    }
}

pub fn space_fringe<S: LearningSpace + ?Sized>(space: &S) -> Result<SpaceFringe> {
    Ok(SpaceFringe { removable: space_inner_fringe(space)?, addable: space_outer_fringe(space)? })
}

/// `ℒ ∖ {s}`, re-minimized.
pub fn remove_state<S: LearningSpace + ?Sized>(space: &S, s: &State) -> Result<Adapted> {
    let d = space.domain();
    let shown = d.format_state(s);
    if !space.contains(s) {
        return Err(Error::InvalidEdit(format!("{shown} is not a state")));
    }
    let base = base_of_space(space)?;
    if !base.contains(s) {
        return Err(Error::InvalidEdit(format!("{shown} is not in the base, so it is a union of other states")));
    }
    if *s == space.top() {
        return Err(Error::InvalidEdit(format!("{shown} is the union of all states")));
    }
    if let Some(x) = s.complement().iter().find(|&x| base.contains(&s.with(x))) {
        return Err(Error::InvalidEdit(format!(
            "{} is in the base and would lose its only predecessor",
            d.format_state(&s.with(x))
        )));
    }
    let mut family = collect_family_capped(space, MAX_EXPLICIT_STATES)?;
    family.remove(s);
    let new_base = base_of_family(&family)?;
    let agrees = new_base.sets().iter().all(|b| {
        (base.contains(b) && b != s) || (b.len() == s.len() + 1 && s.is_subset(b))
    }) && base.sets().iter().filter(|b| *b != s).all(|b| new_base.contains(b));
    finish(&family, new_base, agrees)
}

/// `ℒ ∪ {s}`, re-minimized.
pub fn add_state<S: LearningSpace + ?Sized>(space: &S, s: &State) -> Result<Adapted> {
    let d = space.domain();
    let shown = d.format_state(s);
    if s.universe() != d.len() {
        return Err(Error::Validation("set over a different domain".into()));
    }
    if space.contains(s) {
        return Err(Error::InvalidEdit(format!("{shown} is already a state")));
    }
    let mut addable = false;
    for x in s.iter() {
        let below = s.without(x);
        if space.contains(&below) && addable_from(space, &below)?.contains(x) {
            addable = true;
            break;
        }
    }
    if !addable {
        return Err(Error::InvalidEdit(format!("adding {shown} would break accessibility or union closure")));
    }
    let base = base_of_space(space)?;
    let mut family = collect_family_capped(space, MAX_EXPLICIT_STATES - 1)?;
    family.insert(s.clone())?;
    let new_base = base_of_family(&family)?;
    let agrees = new_base.contains(s)
        && new_base.sets().iter().all(|b| b == s || base.contains(b))
        && base
            .sets()
            .iter()
            .filter(|b| !new_base.contains(b))
            .all(|b| s.is_subset(b) && b.len() == s.len() + 1);
    finish(&family, new_base, agrees)
}

fn finish(family: &SetFamily, base: BaseFamily, agrees: bool) -> Result<Adapted> {
    let m = minimize_family(family)?;
    debug_assert_eq!(m.base, base);
    Ok(Adapted { space: m.space, base, base_formula_agrees: agrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate;
    use crate::space::collect_family;

    fn fmt(d: &crate::state::Domain, v: &[State]) -> Vec<String> {
        v.iter().map(|s| d.format_state(s)).collect()
    }

    #[test]
    fn three_concept_fringes() {
        let f = fixtures::three_concept_family();
        let d = f.domain().clone();
        let inner = space_inner_fringe(&f).unwrap();
        assert_eq!(fmt(&d, &inner), ["A,B", "B,C"]);
        for s in &inner {
            let mut g = f.clone();
            g.remove(s);
            assert!(g.is_learning_space());
        }
        let outer = space_outer_fringe(&f).unwrap();
        assert_eq!(fmt(&d, &outer), ["B"]);
        let added = add_state(&f, &d.state(["B"]).unwrap()).unwrap();
        assert_eq!(collect_family(&added.space).unwrap().len(), 8);
        assert!(added.base_formula_agrees);
        let back = remove_state(&added.space, &d.state(["B"]).unwrap()).unwrap();
        assert_eq!(collect_family(&back.space).unwrap(), f);
        assert!(back.base_formula_agrees);
    }

    #[test]
    fn trivial_spaces() {
        let one = generate::powerset_space(1);
        assert!(space_inner_fringe(&one).unwrap().is_empty());
        assert!(space_inner_fringe(&generate::chain_space(3)).unwrap().is_empty());
        assert!(space_outer_fringe(&generate::powerset_space(4)).unwrap().is_empty());
    }

    #[test]
    fn rejected_edits() {
        let f = fixtures::three_concept_family();
        let d = f.domain().clone();
        assert!(matches!(remove_state(&f, &d.full_state()), Err(Error::InvalidEdit(_))));
        assert!(matches!(remove_state(&f, &d.state(["A", "C"]).unwrap()), Err(Error::InvalidEdit(_))));
        assert!(matches!(remove_state(&f, &d.state(["A"]).unwrap()), Err(Error::InvalidEdit(_))));
        assert!(matches!(add_state(&f, &d.state(["A"]).unwrap()), Err(Error::InvalidEdit(_))));
    }
}
