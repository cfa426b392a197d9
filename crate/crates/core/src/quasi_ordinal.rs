//! Quasi-ordinal spaces: the lower sets of a partial order given by its
//! Hasse diagram.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::family::{restriction_map, Fringes};
use crate::space::{LearningSpace, Traversal};
use crate::state::{SharedDomain, State};

/// A covering relation: an edge `x → y` means `x` is an immediate
/// prerequisite of `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseDiagram {
    domain: SharedDomain,
    edges: Vec<(usize, usize)>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    topo: Vec<usize>,
    rank: Vec<usize>,
}

/// A strict partial order stored as the set of strict successors of each concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialOrder {
    domain: SharedDomain,
    above: Vec<State>,
}

/// Work counters for a lower-set enumeration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub states: u64,
    /// Hasse edges followed while maintaining prerequisite counters.
    pub edge_visits: u64,
    /// Child-list entries copied on descent.
    pub child_copies: u64,
}

impl HasseDiagram {
    /// Validates and builds a diagram. Cycles, self-loops, duplicate edges
    /// and transitive edges are rejected.
    pub fn new(domain: SharedDomain, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = domain.len();
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(x, y) in &edges {
            if x >= n || y >= n {
                return Err(Error::Validation(format!("edge ({x},{y}) outside domain of size {n}")));
            }
            if x == y {
                return Err(Error::Structural(format!("self-loop on `{}`", domain.label(x))));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!(
                "duplicate edge {} -> {}",
                domain.label(w[0].0),
                domain.label(w[0].1)
            )));
        }
        let (succ, pred) = adjacency(n, &edges);
        let topo = longest_path_order(n, &succ, &pred).ok_or_else(|| {
            Error::Structural("the prerequisite graph contains a cycle".into())
        })?;
        let mut rank = vec![0; n];
        for (r, &x) in topo.iter().enumerate() {
            rank[x] = r;
        }
        let h = Self { domain, edges, succ, pred, topo, rank };
        let order = h.order();
        for &(x, y) in &h.edges {
            if h.succ[x].iter().any(|&z| z != y && order.less(z, y)) {
                return Err(Error::Structural(format!(
                    "edge {} -> {} is implied by a longer path",
                    h.domain.label(x),
                    h.domain.label(y)
                )));
            }
        }
        Ok(h)
    }

    /// Builds a diagram from label pairs.
    pub fn from_labels(domain: SharedDomain, edges: &[(&str, &str)]) -> Result<Self> {
        let idx = edges
            .iter()
            .map(|(a, b)| Ok((domain.require(a)?, domain.require(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, idx)
    }

    /// The Hasse diagram of the order generated by an arbitrary acyclic edge set.
    pub fn transitive_reduction(domain: SharedDomain, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = domain.len();
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(x, y) in &edges {
            if x >= n || y >= n {
                return Err(Error::Validation(format!("edge ({x},{y}) outside domain of size {n}")));
            }
            if x == y {
                return Err(Error::Structural(format!("self-loop on `{}`", domain.label(x))));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let (succ, pred) = adjacency(n, &edges);
        let topo = longest_path_order(n, &succ, &pred)
            .ok_or_else(|| Error::Structural("the prerequisite graph contains a cycle".into()))?;
        let above = reachability(n, &succ, &topo);
        let order = PartialOrder { domain: domain.clone(), above };
        Ok(order.hasse())
    }

    pub fn domain(&self) -> &SharedDomain {
        &self.domain
    }

    /// Covering edges, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn successors_of(&self, x: usize) -> &[usize] {
        &self.succ[x]
    }

    pub fn predecessors_of(&self, x: usize) -> &[usize] {
        &self.pred[x]
    }

    /// Concepts sorted by longest path from a minimal element, ties by index.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// The transitive closure of the covering relation.
    pub fn order(&self) -> PartialOrder {
        PartialOrder {
            domain: self.domain.clone(),
            above: reachability(self.domain.len(), &self.succ, &self.topo),
        }
    }

    pub fn is_lower_set(&self, s: &State) -> bool {
        self.edges.iter().all(|&(x, y)| s.contains(x) || !s.contains(y))
    }

    /// Single pass over the edges removing every concept that cannot be in a fringe.
    pub fn fringe_qos(&self, s: &State) -> Result<Fringes> {
        if !self.is_lower_set(s) {
            return Err(Error::NotAState(self.domain.format_state(s)));
        }
        let mut candidates = self.domain.full_state();
        for &(x, y) in &self.edges {
            if !s.contains(x) {
                candidates.remove(y);
            }
            if s.contains(y) {
                candidates.remove(x);
            }
        }
        Ok(Fringes { inner: candidates.intersection(s), outer: candidates.difference(s) })
    }

    /// Diagram of the order restricted to `keep`, over the sub-domain `keep`.
    pub fn restrict(&self, keep: &State) -> HasseDiagram {
        self.order().restrict(keep).hasse()
    }

    /// `{y : y ≤ x}` for every concept `x`: the base of the space.
    pub fn principal_ideals(&self) -> Vec<State> {
        let order = self.order();
        (0..self.domain.len()).map(|x| order.below(x).with(x)).collect()
    }

    /// Depth-first enumeration of the lower sets. The parent of a nonempty
    /// lower set removes its element latest in [`Self::topological_order`].
    pub fn enumerate_lower_sets<T: Traversal>(&self, visitor: &mut T) -> (ControlFlow<T::Break>, EnumerationStats) {
        let n = self.domain.len();
        let mut w = LowerSetWalk {
            h: self,
            state: State::empty(n),
            missing: self.pred.iter().map(Vec::len).collect(),
            stats: EnumerationStats::default(),
        };
        let mut roots: Vec<usize> = (0..n).filter(|&x| self.pred[x].is_empty()).collect();
        roots.sort_unstable_by_key(|&x| self.rank[x]);
        w.stats.states += 1;
        let flow = match visitor.enter(&w.state, None) {
            ControlFlow::Break(b) => ControlFlow::Break(b),
            ControlFlow::Continue(()) => {
                let flow = w.descend(&roots, visitor);
                if flow.is_continue() {
                    visitor.leave(&w.state, None);
                }
                flow
            }
        };
        (flow, w.stats)
    }

    /// Number of lower sets.
    pub fn count_lower_sets(&self) -> u64 {
        struct Nop;
        impl Traversal for Nop {
            type Break = ();
            fn enter(&mut self, _: &State, _: Option<usize>) -> ControlFlow<()> {
                ControlFlow::Continue(())
            }
        }
        self.enumerate_lower_sets(&mut Nop).1.states
    }

    /// Largest lower set contained in `s`.
    pub fn interior_of(&self, s: &State) -> State {
        let mut out = State::empty(self.domain.len());
        for &x in &self.topo {
            if s.contains(x) && self.pred[x].iter().all(|&p| out.contains(p)) {
                out.insert(x);
            }
        }
        out
    }
}

struct LowerSetWalk<'a> {
    h: &'a HasseDiagram,
    state: State,
    missing: Vec<usize>,
    stats: EnumerationStats,
}

impl LowerSetWalk<'_> {
    /// `children` are the concepts addable to the current state that come
    /// after all of its members in topological order, sorted by rank.
    fn descend<T: Traversal>(&mut self, children: &[usize], visitor: &mut T) -> ControlFlow<T::Break> {
        let h = self.h;
        for (i, &x) in children.iter().enumerate() {
            self.state.insert(x);
            let mut unlocked = Vec::new();
            for &y in &h.succ[x] {
                self.stats.edge_visits += 1;
                self.missing[y] -= 1;
                if self.missing[y] == 0 {
                    unlocked.push(y);
                }
            }
            unlocked.sort_unstable_by_key(|&y| h.rank[y]);
            let next = merge_by_rank(&children[i + 1..], &unlocked, &h.rank);
            self.stats.child_copies += next.len() as u64;
            self.stats.states += 1;
            let flow = visitor.enter(&self.state, Some(x));
            let flow = match flow {
                ControlFlow::Continue(()) => self.descend(&next, visitor),
                b => b,
            };
            if flow.is_continue() {
                visitor.leave(&self.state, Some(x));
            }
            for &y in &h.succ[x] {
                self.missing[y] += 1;
            }
            self.state.remove(x);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn merge_by_rank(a: &[usize], b: &[usize], rank: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if rank[a[i]] < rank[b[j]] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for &(x, y) in edges {
        succ[x].push(y);
        pred[y].push(x);
    }
    (succ, pred)
}

/// Kahn's algorithm computing longest-path depth; `None` on a cycle.
fn longest_path_order(n: usize, succ: &[Vec<usize>], pred: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut indeg: Vec<usize> = pred.iter().map(Vec::len).collect();
    let mut depth = vec![0usize; n];
    let mut queue: Vec<usize> = (0..n).filter(|&x| indeg[x] == 0).collect();
    let mut seen = 0;
    while let Some(x) = queue.pop() {
        seen += 1;
        for &y in &succ[x] {
            depth[y] = depth[y].max(depth[x] + 1);
            indeg[y] -= 1;
            if indeg[y] == 0 {
                queue.push(y);
            }
        }
    }
    if seen < n {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| (depth[x], x));
    Some(order)
}

fn reachability(n: usize, succ: &[Vec<usize>], topo: &[usize]) -> Vec<State> {
    let mut above = vec![State::empty(n); n];
    for &x in topo.iter().rev() {
        let mut acc = State::empty(n);
        for &y in &succ[x] {
            acc.insert(y);
            acc.union_with(&above[y]);
        }
        above[x] = acc;
    }
    above
}

impl PartialOrder {
    /// Builds an order from strict relation pairs `(x, y)` meaning `x < y`;
    /// the relation must already be irreflexive and transitive.
    pub fn from_pairs(domain: SharedDomain, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = domain.len();
        let mut above = vec![State::empty(n); n];
        for (x, y) in pairs {
            if x >= n || y >= n {
                return Err(Error::Validation(format!("pair ({x},{y}) outside domain of size {n}")));
            }
            above[x].insert(y);
        }
        for x in 0..n {
            if above[x].contains(x) {
                return Err(Error::Structural(format!("`{}` < itself", domain.label(x))));
            }
            for y in above[x].iter() {
                if !above[y].is_subset(&above[x]) {
                    return Err(Error::Structural("relation is not transitive".into()));
                }
            }
        }
        Ok(Self { domain, above })
    }

    pub fn domain(&self) -> &SharedDomain {
        &self.domain
    }

    pub fn less(&self, x: usize, y: usize) -> bool {
        self.above[x].contains(y)
    }

    /// `{y : x < y}`.
    pub fn above(&self, x: usize) -> &State {
        &self.above[x]
    }

    /// `{y : y < x}`.
    pub fn below(&self, x: usize) -> State {
        let n = self.domain.len();
        State::from_indices(n, (0..n).filter(|&y| self.above[y].contains(x)))
    }

    /// Covering pairs of the order.
    pub fn hasse(&self) -> HasseDiagram {
        let n = self.domain.len();
        let mut edges = Vec::new();
        for x in 0..n {
            for y in self.above[x].iter() {
                let covered = self.above[x].iter().any(|z| z != y && self.above[z].contains(y));
                if !covered {
                    edges.push((x, y));
                }
            }
        }
        HasseDiagram::new(self.domain.clone(), edges).expect("covering relation of a partial order")
    }

    /// The order on `keep`, over the sub-domain `keep`.
    pub fn restrict(&self, keep: &State) -> PartialOrder {
        let sub = Arc::new(self.domain.restrict(keep));
        let map = restriction_map(self.domain.len(), keep);
        let above = keep.iter().map(|x| self.above[x].intersection(keep).remap(sub.len(), &map)).collect();
        PartialOrder { domain: sub, above }
    }

    /// `|Δ(x,y)| − 1` where `Δ(x,y)` holds `x`, `y` and every concept whose
    /// comparison with `x` differs from its comparison with `y`.
    pub fn concept_distance(&self, x: usize, y: usize) -> usize {
        if x == y {
            return 0;
        }
        let below_x = self.below(x);
        let below_y = self.below(y);
        let mut delta = self.above[x].union(&self.above[y]);
        delta = delta.difference(&self.above[x].intersection(&self.above[y]));
        delta.union_with(&below_x.union(&below_y).difference(&below_x.intersection(&below_y)));
        delta.insert(x);
        delta.insert(y);
        delta.len() - 1
    }

    /// Concepts within distance `delta` of `x`, including `x`.
    pub fn neighbourhood(&self, x: usize, delta: usize) -> State {
        let n = self.domain.len();
        State::from_indices(n, (0..n).filter(|&y| self.concept_distance(x, y) <= delta))
    }
}

impl LearningSpace for HasseDiagram {
    fn domain(&self) -> &SharedDomain {
        &self.domain
    }

    fn contains(&self, s: &State) -> bool {
        s.universe() == self.domain.len() && self.is_lower_set(s)
    }

    fn traverse<T: Traversal>(&self, visitor: &mut T) -> ControlFlow<T::Break> {
        self.enumerate_lower_sets(visitor).0
    }

    fn interior(&self, s: &State) -> State {
        self.interior_of(s)
    }

    fn top(&self) -> State {
        self.domain.full_state()
    }

    fn state_fringes(&self, s: &State) -> Result<Fringes> {
        self.fringe_qos(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::space::{collect_family, count_states};
    use crate::state::Domain;

    fn dom(s: &str) -> SharedDomain {
        Arc::new(Domain::from_chars(s).unwrap())
    }

    #[test]
    fn rejects_cycles_loops_and_shortcuts() {
        let d = dom("xyz");
        assert!(matches!(HasseDiagram::new(d.clone(), [(0, 1), (1, 0)]), Err(Error::Structural(_))));
        assert!(matches!(HasseDiagram::new(d.clone(), [(0, 0)]), Err(Error::Structural(_))));
        assert!(matches!(HasseDiagram::new(d.clone(), [(0, 1), (1, 2), (0, 2)]), Err(Error::Structural(_))));
        let r = HasseDiagram::transitive_reduction(d, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(r.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn order_and_lower_sets() {
        let d = dom("xyz");
        let h = HasseDiagram::new(d.clone(), [(0, 1), (1, 2)]).unwrap();
        let o = h.order();
        assert!(o.less(0, 2));
        assert!(!o.less(2, 0));
        assert!(HasseDiagram::new(d.clone(), []).unwrap().order().above(0).is_empty());
        assert!(h.is_lower_set(&d.empty_state()));
        assert!(h.is_lower_set(&d.full_state()));
        assert!(!h.is_lower_set(&d.state(["y"]).unwrap()));
        assert_eq!(h.topological_order(), &[0, 1, 2]);
    }

    #[test]
    fn two_chain_order_counts() {
        let h = fixtures::two_chain_order();
        assert_eq!(h.count_lower_sets(), 19);
        let o = h.order();
        let d = h.domain();
        let chain = d.state(["A", "C", "E", "G"]).unwrap();
        let r = o.restrict(&chain).hasse();
        assert_eq!(r.edges().len(), 3);
    }

    #[test]
    fn bipartite_worst_case_counts() {
        for n in [3, 6, 9] {
            let h = fixtures::bipartite_prerequisites(n);
            let expected = (1u64 << (2 * n / 3)) + (1u64 << (n / 3)) - 1;
            assert_eq!(h.count_lower_sets(), expected, "n={n}");
            let topo = h.topological_order();
            for &(x, y) in h.edges() {
                let px = topo.iter().position(|&c| c == x).unwrap();
                let py = topo.iter().position(|&c| c == y).unwrap();
                assert!(px < py);
            }
        }
    }

    #[test]
    fn edgeless_is_powerset() {
        let d = Arc::new(Domain::new((0..10).map(|i| format!("c{i}"))).unwrap());
        assert_eq!(HasseDiagram::new(d, []).unwrap().count_lower_sets(), 1024);
    }

    #[test]
    fn chain_fringes() {
        let d = dom("xyz");
        let h = HasseDiagram::new(d.clone(), [(0, 1), (1, 2)]).unwrap();
        let f = h.fringe_qos(&d.state(["x"]).unwrap()).unwrap();
        assert_eq!(d.format_state(&f.inner), "x");
        assert_eq!(d.format_state(&f.outer), "y");
        let f = h.fringe_qos(&d.empty_state()).unwrap();
        assert_eq!(d.format_state(&f.outer), "x");
        let f = h.fringe_qos(&d.full_state()).unwrap();
        assert_eq!(d.format_state(&f.inner), "z");
        assert!(h.fringe_qos(&d.state(["z"]).unwrap()).is_err());
    }

    #[test]
    fn restriction_recomputes_covers() {
        let d = dom("xyz");
        let h = HasseDiagram::new(d.clone(), [(0, 1), (1, 2)]).unwrap();
        let r = h.restrict(&d.state(["x", "z"]).unwrap());
        assert_eq!(r.edges(), &[(0, 1)]);
        assert_eq!(r.domain().labels(), &["x", "z"]);
        assert_eq!(h.restrict(&d.full_state()), h);
    }

    #[test]
    fn restricted_two_chain_order() {
        let h = fixtures::two_chain_order();
        let d = h.domain();
        let r = h.restrict(&d.state(["A", "D", "E", "G", "H"]).unwrap());
        let rd = r.domain();
        let mut shown: Vec<String> =
            r.edges().iter().map(|&(x, y)| format!("{}{}", rd.label(x), rd.label(y))).collect();
        shown.sort();
        assert_eq!(shown, ["AD", "AE", "DG", "DH", "EG"]);
    }

    #[test]
    fn distances() {
        let d = dom("xyz");
        let o = HasseDiagram::new(d, [(0, 1), (0, 2)]).unwrap().order();
        assert_eq!(o.concept_distance(0, 0), 0);
        assert_eq!(o.concept_distance(1, 2), 1);
        assert_eq!(o.concept_distance(0, 1), 2);
        assert_eq!(o.concept_distance(1, 0), 2);
        assert_eq!(o.neighbourhood(1, 1).len(), 2);
    }

    #[test]
    fn traversal_matches_lower_set_filter() {
        let h = fixtures::two_chain_order();
        let fam = collect_family(&h).unwrap();
        assert_eq!(fam.len(), 19);
        assert_eq!(count_states(&h), 19);
        assert!(fam.is_learning_space());
        assert!(fam.is_intersection_closed());
        for s in fam.iter() {
            assert_eq!(h.fringe_qos(s).unwrap(), fam.state_fringes_bruteforce(s).unwrap());
        }
        let d = h.domain();
        assert_eq!(h.interior(&d.state(["A", "B", "G"]).unwrap()), d.state(["A", "B"]).unwrap());
    }
}
