//! Data-parallel helpers. With the `parallel` feature off every function
//! runs sequentially and returns identical results.

use std::ops::ControlFlow;

use crate::sequence_space::{SequenceSpace, SequenceStats};
use crate::space::Traversal;
use crate::state::State;

/// `items.map(f)` in input order.
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Number of worker threads available to [`map_collect`].
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

struct Counter;

impl Traversal for Counter {
    type Break = ();
    fn enter(&mut self, _: &State, _: Option<usize>) -> ControlFlow<()> {
        ControlFlow::Continue(())
    }
}

/// Shallowest enumeration-tree depth with at least `want` subtrees, capped at `n`.
fn split_depth(space: &SequenceSpace, want: usize) -> usize {
    let mut depth = 0;
    while depth < space.n() && space.frontier(depth).0.len() < want {
        depth += 1;
    }
    depth
}

/// Counts the states of a sequence space by enumerating the subtrees below
/// a frontier of the enumeration tree independently.
pub fn count_sequence_states(space: &SequenceSpace) -> SequenceStats {
    let depth = split_depth(space, 8 * threads());
    count_sequence_states_at(space, depth)
}

/// [`count_sequence_states`] with an explicit split depth.
pub fn count_sequence_states_at(space: &SequenceSpace, depth: usize) -> SequenceStats {
    let (roots, shallower) = space.frontier(depth);
    let parts = map_collect(&roots, |r| space.enumerate_subtree(r, &mut Counter).expect("frontier states are members").1);
    let mut total = SequenceStats { states: shallower, word_ops: 0 };
    for p in parts {
        total.states += p.states;
        total.word_ops += p.word_ops;
    }
    total
}

/// Every state of a sequence space, gathered subtree by subtree; the order
/// matches the sequential enumeration.
pub fn collect_sequence_states(space: &SequenceSpace) -> Vec<State> {
    struct Gather(Vec<State>);
    impl Traversal for Gather {
        type Break = ();
        fn enter(&mut self, s: &State, _: Option<usize>) -> ControlFlow<()> {
            self.0.push(s.clone());
            ControlFlow::Continue(())
        }
    }
    let depth = split_depth(space, 8 * threads());
    let mut out = Vec::new();
    let mut shallow = Vec::new();
    collect_shallow(space, &State::empty(space.n()), depth, &mut shallow);
    let roots: Vec<State> = shallow.iter().filter(|(_, at_frontier)| *at_frontier).map(|(s, _)| s.clone()).collect();
    let mut parts = map_collect(&roots, |r| {
        let mut g = Gather(Vec::new());
        let _ = space.enumerate_subtree(r, &mut g).expect("frontier states are members");
        g.0
    })
    .into_iter();
    for (s, at_frontier) in shallow {
        if at_frontier {
            out.extend(parts.next().expect("one part per frontier state"));
        } else {
            out.push(s);
        }
    }
    out
}

fn collect_shallow(space: &SequenceSpace, s: &State, depth: usize, out: &mut Vec<(State, bool)>) {
    if depth == 0 {
        out.push((s.clone(), true));
        return;
    }
    out.push((s.clone(), false));
    for (t, _, _) in space.successors(s).expect("member") {
        collect_shallow(space, &t, depth - 1, out);
    }
}
