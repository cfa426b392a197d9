//! A learning space in any of the three representations.

use std::ops::ControlFlow;

use crate::base_dimension::{base_of_family, base_of_sequences, minimize_family, minimize_hasse, minimize_sequences, BaseFamily, Minimized};
use crate::error::Result;
use crate::family::{Fringes, SetFamily};
use crate::parallel;
use crate::quasi_ordinal::HasseDiagram;
use crate::sequence_space::SequenceSpace;
use crate::space::{visit_states, LearningSpace, Traversal};
use crate::state::{SharedDomain, State};

#[derive(Debug, Clone)]
pub enum AnySpace {
    /// Lower sets of a partial order.
    Hasse(HasseDiagram),
    /// Unions of prefixes of learning sequences.
    Sequences(SequenceSpace),
    /// An explicit list of states.
    Explicit(SetFamily),
}

impl AnySpace {
    pub fn kind(&self) -> &'static str {
        match self {
            AnySpace::Hasse(_) => "hasse",
            AnySpace::Sequences(_) => "seqs",
            AnySpace::Explicit(_) => "states",
        }
    }

    pub fn n(&self) -> usize {
        self.domain().len()
    }

    pub fn base(&self) -> Result<BaseFamily> {
        match self {
            AnySpace::Hasse(h) => Ok(BaseFamily::new(h.domain().clone(), h.principal_ideals())),
            AnySpace::Sequences(s) => Ok(base_of_sequences(s)),
            AnySpace::Explicit(f) => base_of_family(f),
        }
    }

    pub fn minimize(&self) -> Result<Minimized> {
        match self {
            AnySpace::Hasse(h) => minimize_hasse(h),
            AnySpace::Sequences(s) => minimize_sequences(s),
            AnySpace::Explicit(f) => minimize_family(f),
        }
    }

    /// The space itself when given by sequences, else a minimal sequence form.
    pub fn to_sequence_space(&self) -> Result<SequenceSpace> {
        match self {
            AnySpace::Sequences(s) => Ok(s.clone()),
            other => Ok(other.minimize()?.space),
        }
    }

    /// Number of states; sequence spaces are counted in parallel.
    pub fn count(&self) -> u64 {
        match self {
            AnySpace::Hasse(h) => h.count_lower_sets(),
            AnySpace::Sequences(s) => parallel::count_sequence_states(s).states,
            AnySpace::Explicit(f) => f.len() as u64,
        }
    }

    /// `{S ∩ keep : S ∈ ℒ}` over the sub-domain `keep`.
    pub fn project(&self, keep: &State) -> Result<AnySpace> {
        Ok(match self {
            AnySpace::Hasse(h) => AnySpace::Hasse(h.restrict(keep)),
            AnySpace::Sequences(s) => AnySpace::Sequences(s.project(keep)?),
            AnySpace::Explicit(f) => AnySpace::Explicit(f.project(keep)?),
        })
    }

    /// Number of states, or `None` when there are more than `cap`.
    pub fn count_capped(&self, cap: u64) -> Option<u64> {
        let mut c = 0u64;
        let flow = visit_states(self, |_| {
            c += 1;
            if c > cap {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        flow.is_continue().then_some(c)
    }
}

impl LearningSpace for AnySpace {
    fn domain(&self) -> &SharedDomain {
        match self {
            AnySpace::Hasse(h) => h.domain(),
            AnySpace::Sequences(s) => s.domain(),
            AnySpace::Explicit(f) => f.domain(),
        }
    }

    fn contains(&self, s: &State) -> bool {
        match self {
            AnySpace::Hasse(h) => LearningSpace::contains(h, s),
            AnySpace::Sequences(sp) => sp.contains(s),
            AnySpace::Explicit(f) => f.contains(s),
        }
    }

    fn traverse<T: Traversal>(&self, visitor: &mut T) -> ControlFlow<T::Break> {
        match self {
            AnySpace::Hasse(h) => h.traverse(visitor),
            AnySpace::Sequences(s) => s.traverse(visitor),
            AnySpace::Explicit(f) => f.traverse(visitor),
        }
    }

    fn interior(&self, s: &State) -> State {
        match self {
            AnySpace::Hasse(h) => h.interior(s),
            AnySpace::Sequences(sp) => sp.interior(s),
            AnySpace::Explicit(f) => f.interior(s),
        }
    }

    fn top(&self) -> State {
        match self {
            AnySpace::Hasse(h) => h.top(),
            AnySpace::Sequences(s) => s.top(),
            AnySpace::Explicit(f) => f.top(),
        }
    }

    fn state_fringes(&self, s: &State) -> Result<Fringes> {
        match self {
            AnySpace::Hasse(h) => h.state_fringes(s),
            AnySpace::Sequences(sp) => sp.fringes(s),
            AnySpace::Explicit(f) => f.state_fringes(s),
        }
    }
}
