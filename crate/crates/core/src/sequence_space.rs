//! Learning spaces generated by learning sequences: every state is a union
//! of one prefix from each sequence.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::family::{restriction_map, Fringes};
use crate::space::{LearningSpace, Traversal};
use crate::state::{words_for, SharedDomain, State, WORD_BITS};

/// Per-sequence minimum excluded positions of a set.
pub type MexVector = Vec<usize>;

/// A validated list of learning sequences over one domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSpace {
    domain: SharedDomain,
    seqs: Vec<Vec<usize>>,
    pos: Vec<Vec<usize>>,
}

/// Work counters for a sequence-space enumeration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SequenceStats {
    pub states: u64,
    /// Word reads and writes on the per-sequence bit vectors and mex vectors.
    pub word_ops: u64,
}

impl SequenceStats {
    pub fn word_ops_per_state(&self) -> f64 {
        if self.states == 0 {
            0.0
        } else {
            self.word_ops as f64 / self.states as f64
        }
    }
}

impl SequenceSpace {
    /// Validates that every sequence is a permutation of the domain; exact
    /// duplicates are dropped with a warning.
    pub fn new(domain: SharedDomain, sequences: Vec<Vec<usize>>) -> Result<Self> {
        let n = domain.len();
        let mut seqs: Vec<Vec<usize>> = Vec::with_capacity(sequences.len());
        for (i, seq) in sequences.into_iter().enumerate() {
            let mut count = vec![0usize; n];
            for &x in &seq {
                if x >= n {
                    return Err(Error::Validation(format!("sequence {i}: concept index {x} outside domain")));
                }
                count[x] += 1;
            }
            let missing: Vec<&str> = (0..n).filter(|&x| count[x] == 0).map(|x| domain.label(x)).collect();
            let repeated: Vec<&str> = (0..n).filter(|&x| count[x] > 1).map(|x| domain.label(x)).collect();
            if !missing.is_empty() || !repeated.is_empty() {
                let mut msg = format!("sequence {i} is not a permutation of the domain");
                if !missing.is_empty() {
                    msg.push_str(&format!("; missing {}", missing.join(",")));
                }
                if !repeated.is_empty() {
                    msg.push_str(&format!("; repeated {}", repeated.join(",")));
                }
                return Err(Error::Validation(msg));
            }
            if seqs.contains(&seq) {
                log::warn!("dropping duplicate learning sequence {i}");
                continue;
            }
            seqs.push(seq);
        }
        if n > 0 && seqs.is_empty() {
            return Err(Error::Validation("at least one learning sequence is required".into()));
        }
        let pos = seqs
            .iter()
            .map(|s| {
                let mut p = vec![0; n];
                for (j, &x) in s.iter().enumerate() {
                    p[x] = j;
                }
                p
            })
            .collect();
        Ok(Self { domain, seqs, pos })
    }

    /// Builds a space from sequences of labels.
    pub fn from_labels<S: AsRef<str>>(domain: SharedDomain, sequences: &[Vec<S>]) -> Result<Self> {
        let seqs = sequences
            .iter()
            .map(|s| s.iter().map(|l| domain.require(l.as_ref())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, seqs)
    }

    /// Single-character labels, e.g. `from_chars("ABC", &["ABC", "CBA"])`.
    pub fn from_chars(domain: &str, sequences: &[&str]) -> Result<Self> {
        let d = Arc::new(crate::state::Domain::from_chars(domain)?);
        let seqs: Vec<Vec<String>> = sequences.iter().map(|s| s.chars().map(String::from).collect()).collect();
        Self::from_labels(d, &seqs)
    }

    pub fn domain(&self) -> &SharedDomain {
        &self.domain
    }

    pub fn n(&self) -> usize {
        self.domain.len()
    }

    /// Number of sequences.
    pub fn k(&self) -> usize {
        self.seqs.len()
    }

    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.seqs
    }

    /// Position of concept `x` in sequence `i`.
    pub fn position(&self, i: usize, x: usize) -> usize {
        self.pos[i][x]
    }

    /// Sequence `i` as label text, e.g. `A,B,C`.
    pub fn format_sequence(&self, i: usize) -> String {
        self.seqs[i].iter().map(|&x| self.domain.label(x)).collect::<Vec<_>>().join(",")
    }

    pub fn mex(&self, s: &State) -> MexVector {
        self.seqs.iter().map(|seq| seq.iter().position(|&x| !s.contains(x)).unwrap_or(seq.len())).collect()
    }

    /// Union of the prefixes of lengths `v`.
    pub fn up(&self, v: &[usize]) -> Result<State> {
        if v.len() != self.k() {
            return Err(Error::Validation(format!("mex vector has {} coordinates, expected {}", v.len(), self.k())));
        }
        if let Some(&bad) = v.iter().find(|&&m| m > self.n()) {
            return Err(Error::Validation(format!("prefix length {bad} exceeds {}", self.n())));
        }
        Ok(self.up_unchecked(v))
    }

    fn up_unchecked(&self, v: &[usize]) -> State {
        let mut s = State::empty(self.n());
        for (seq, &m) in self.seqs.iter().zip(v) {
            for &x in &seq[..m] {
                s.insert(x);
            }
        }
        s
    }

    pub fn contains(&self, s: &State) -> bool {
        s.universe() == self.n() && self.up_unchecked(&self.mex(s)) == *s
    }

    fn require_member(&self, s: &State) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::NotAState(self.domain.format_state(s)))
        }
    }

    /// The parent of `s` in the enumeration tree: repeatedly shorten the
    /// last nonempty prefix until the union changes.
    pub fn predecessor(&self, s: &State) -> Result<State> {
        self.require_member(s)?;
        if s.is_empty() {
            return Err(Error::Validation("the empty state has no predecessor".into()));
        }
        let mut v = self.mex(s);
        loop {
            let j = v.iter().rposition(|&m| m > 0).expect("nonempty state has a nonzero coordinate");
            v[j] -= 1;
            let t = self.up_unchecked(&v);
            if t != *s {
                return Ok(t);
            }
        }
    }

    /// Smallest `i` such that `s` is the union of its mex prefixes in
    /// sequences `0..=i`; zero for the empty state.
    fn branch_floor(&self, s: &State, m: &[usize]) -> usize {
        if s.is_empty() {
            return 0;
        }
        let mut acc = State::empty(self.n());
        for (i, seq) in self.seqs.iter().enumerate() {
            for &x in &seq[..m[i]] {
                acc.insert(x);
            }
            if acc == *s {
                return i;
            }
        }
        unreachable!("member states are the union of their mex prefixes")
    }

    /// Children of `s` in the enumeration tree, each with its mex vector and
    /// the sequence index that generated it.
    pub fn successors(&self, s: &State) -> Result<Vec<(State, MexVector, usize)>> {
        self.require_member(s)?;
        let m = self.mex(s);
        let p = self.branch_floor(s, &m);
        let n = self.n();
        let mut out = Vec::new();
        for i in p..self.k() {
            let Some(x) = self.branch_concept(&m, i) else { continue };
            let t = s.with(x);
            let mut mt = m.clone();
            for (pos, seq) in mt[i..].iter_mut().zip(&self.seqs[i..]) {
                while *pos < n && t.contains(seq[*pos]) {
                    *pos += 1;
                }
            }
            out.push((t, mt, i));
        }
        Ok(out)
    }

    /// The concept added on branch `i`, if the branch exists.
    #[inline]
    fn branch_concept(&self, m: &[usize], i: usize) -> Option<usize> {
        let n = self.n();
        if m[i] >= n {
            return None;
        }
        let x = self.seqs[i][m[i]];
        let clash = (0..i).any(|j| m[j] < n && self.seqs[j][m[j]] == x);
        (!clash).then_some(x)
    }

    /// Depth-first enumeration of every state, maintaining per-sequence bit
    /// vectors so each mex update is a first-zero-bit scan.
    pub fn enumerate_states<T: Traversal>(&self, visitor: &mut T) -> (ControlFlow<T::Break>, SequenceStats) {
        self.enumerate_subtree(&State::empty(self.n()), visitor).expect("the empty state is a member")
    }

    /// Enumerates `root` and all of its descendants in the enumeration tree.
    pub fn enumerate_subtree<T: Traversal>(
        &self,
        root: &State,
        visitor: &mut T,
    ) -> Result<(ControlFlow<T::Break>, SequenceStats)> {
        self.require_member(root)?;
        let m = self.mex(root);
        let p = self.branch_floor(root, &m);
        let mut bits = MexBitState::new(self, root);
        let flow = match visitor.enter(&bits.state, None) {
            ControlFlow::Break(b) => ControlFlow::Break(b),
            ControlFlow::Continue(()) => {
                bits.stats.states += 1;
                let mut mex_stack = vec![m];
                let flow = bits.descend(self, p, 0, &mut mex_stack, visitor);
                if flow.is_continue() {
                    visitor.leave(&bits.state, None);
                }
                flow
            }
        };
        Ok((flow, bits.stats))
    }

    /// States at exactly `depth` levels of the enumeration tree, and the
    /// number of states above them; used to split enumeration across threads.
    pub(crate) fn frontier(&self, depth: usize) -> (Vec<State>, u64) {
        let mut out = Vec::new();
        let mut shallower = 0u64;
        self.collect_frontier(&State::empty(self.n()), depth, &mut out, &mut shallower);
        (out, shallower)
    }

    fn collect_frontier(&self, s: &State, depth: usize, out: &mut Vec<State>, shallower: &mut u64) {
        if depth == 0 {
            out.push(s.clone());
            return;
        }
        *shallower += 1;
        for (t, _, _) in self.successors(s).expect("member") {
            self.collect_frontier(&t, depth - 1, out, shallower);
        }
    }

    /// Inner and outer fringe from the mex vector alone.
    pub fn fringes(&self, s: &State) -> Result<Fringes> {
        self.require_member(s)?;
        let n = self.n();
        let m = self.mex(s);
        let mut outer = State::empty(n);
        for (seq, &mi) in self.seqs.iter().zip(&m) {
            if mi < n {
                outer.insert(seq[mi]);
            }
        }
        let mut inner = State::empty(n);
        let mut v = vec![0; self.k()];
        for x in s.iter() {
            for i in 0..self.k() {
                v[i] = m[i].min(self.pos[i][x]);
            }
            if self.up_unchecked(&v) == s.without(x) {
                inner.insert(x);
            }
        }
        Ok(Fringes { inner, outer })
    }

    /// Restriction of every sequence to the concepts of `keep`.
    pub fn project(&self, keep: &State) -> Result<SequenceSpace> {
        if keep.is_empty() {
            return Err(Error::Validation("projection onto an empty concept set".into()));
        }
        let sub = Arc::new(self.domain.restrict(keep));
        let map = restriction_map(self.n(), keep);
        let seqs = self.seqs.iter().map(|s| s.iter().filter_map(|&x| map[x]).collect()).collect();
        let mut seqs: Vec<Vec<usize>> = seqs;
        let mut seen = Vec::with_capacity(seqs.len());
        seqs.retain(|s| {
            if seen.contains(s) {
                false
            } else {
                seen.push(s.clone());
                true
            }
        });
        SequenceSpace::new(sub, seqs)
    }

    /// `S ∪ T` computed as the prefixes of the pointwise maximum mex.
    pub fn union_via_mex(&self, s: &State, t: &State) -> Result<State> {
        self.require_member(s)?;
        self.require_member(t)?;
        let v: Vec<usize> = self.mex(s).iter().zip(self.mex(t)).map(|(&a, b)| a.max(b)).collect();
        Ok(self.up_unchecked(&v))
    }

    /// Same space with extra sequences appended (duplicates dropped).
    pub fn with_sequences(&self, extra: &[Vec<usize>]) -> Result<SequenceSpace> {
        let mut seqs = self.seqs.clone();
        seqs.extend(extra.iter().filter(|s| !self.seqs.contains(s)).cloned());
        SequenceSpace::new(self.domain.clone(), seqs)
    }
}

/// Traversal scratch: the current state and, for every sequence, a bit
/// vector whose bit `j` records whether that sequence's `j`-th concept is
/// in the state.
struct MexBitState {
    state: State,
    bits: Vec<Vec<u64>>,
    stats: SequenceStats,
}

impl MexBitState {
    fn new(sp: &SequenceSpace, s: &State) -> Self {
        let w = words_for(sp.n());
        let mut bits = vec![vec![0u64; w]; sp.k()];
        for x in s.iter() {
            for (i, b) in bits.iter_mut().enumerate() {
                let j = sp.pos[i][x];
                b[j / WORD_BITS] |= 1 << (j % WORD_BITS);
            }
        }
        Self { state: s.clone(), bits, stats: SequenceStats::default() }
    }

    #[inline]
    fn toggle(&mut self, sp: &SequenceSpace, x: usize) {
        for (i, b) in self.bits.iter_mut().enumerate() {
            let j = sp.pos[i][x];
            b[j / WORD_BITS] ^= 1 << (j % WORD_BITS);
        }
        self.stats.word_ops += sp.k() as u64;
    }

    /// First zero bit of sequence `i` at or after position `from`.
    #[inline]
    fn first_zero(&mut self, i: usize, from: usize, n: usize) -> usize {
        let b = &self.bits[i];
        let mut w = from / WORD_BITS;
        let mut word = b.get(w).copied().unwrap_or(0) | low_mask(from % WORD_BITS);
        loop {
            self.stats.word_ops += 1;
            if word != u64::MAX {
                let t = (word ^ word.wrapping_add(1)).count_ones() as usize - 1;
                return (w * WORD_BITS + t).min(n);
            }
            w += 1;
            if w >= b.len() {
                return n;
            }
            word = b[w];
        }
    }

    fn descend<T: Traversal>(
        &mut self,
        sp: &SequenceSpace,
        p: usize,
        depth: usize,
        mex_stack: &mut Vec<MexVector>,
        visitor: &mut T,
    ) -> ControlFlow<T::Break> {
        let k = sp.k();
        let n = sp.n();
        if mex_stack.len() <= depth + 1 {
            mex_stack.push(vec![0; k]);
        }
        for i in p..k {
            let Some(x) = sp.branch_concept(&mex_stack[depth], i) else { continue };
            self.state.insert(x);
            self.toggle(sp, x);
            let (lower, upper) = mex_stack.split_at_mut(depth + 1);
            let (cur, child) = (&lower[depth], &mut upper[0]);
            child[..i].copy_from_slice(&cur[..i]);
            self.stats.word_ops += i as u64;
            for j in i..k {
                child[j] = self.first_zero(j, cur[j], n);
            }
            self.stats.states += 1;
            let flow = match visitor.enter(&self.state, Some(x)) {
                ControlFlow::Continue(()) => self.descend(sp, i, depth + 1, mex_stack, visitor),
                b => b,
            };
            if flow.is_continue() {
                visitor.leave(&self.state, Some(x));
            }
            self.toggle(sp, x);
            self.state.remove(x);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits == 0 {
        0
    } else {
        (1u64 << bits) - 1
    }
}

impl LearningSpace for SequenceSpace {
    fn domain(&self) -> &SharedDomain {
        &self.domain
    }

    fn contains(&self, s: &State) -> bool {
        SequenceSpace::contains(self, s)
    }

    fn traverse<T: Traversal>(&self, visitor: &mut T) -> ControlFlow<T::Break> {
        self.enumerate_states(visitor).0
    }

    /// `up(mex(s))` is the union of the longest prefixes inside `s`.
    fn interior(&self, s: &State) -> State {
        self.up_unchecked(&self.mex(s))
    }

    fn top(&self) -> State {
        if self.seqs.is_empty() {
            State::empty(self.n())
        } else {
            State::full(self.n())
        }
    }

    fn state_fringes(&self, s: &State) -> Result<Fringes> {
        self.fringes(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::space::{collect_family, count_states, visit_states};

    fn abc() -> SequenceSpace {
        SequenceSpace::from_chars("ABC", &["ABC", "CBA"]).unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(abc().k(), 2);
        assert_eq!(fixtures::six_concept_space().k(), 3);
        let err = SequenceSpace::from_chars("ABC", &["AB"]).unwrap_err();
        assert!(err.to_string().contains("missing C"), "{err}");
        let err = SequenceSpace::from_chars("ABC", &["ABB"]).unwrap_err();
        assert!(err.to_string().contains("repeated B"), "{err}");
        assert_eq!(SequenceSpace::from_chars("ABC", &["ABC", "ABC"]).unwrap().k(), 1);
    }

    #[test]
    fn mex_and_up() {
        let sp = abc();
        let d = sp.domain().clone();
        assert_eq!(sp.mex(&d.empty_state()), vec![0, 0]);
        assert_eq!(sp.mex(&d.state(["B", "C"]).unwrap()), vec![0, 2]);
        assert_eq!(sp.mex(&d.full_state()), vec![3, 3]);
        assert_eq!(d.format_state(&sp.up(&[1, 1]).unwrap()), "A,C");
        assert_eq!(sp.up(&[3, 0]).unwrap(), d.full_state());
        assert!(sp.up(&[4, 0]).is_err());
        assert!(sp.up(&[1]).is_err());
    }

    #[test]
    fn membership_in_six_concept_space() {
        let sp = fixtures::six_concept_space();
        let d = sp.domain().clone();
        assert!(sp.contains(&d.state(["B", "D", "F"]).unwrap()));
        assert!(sp.contains(&d.state(["B", "C", "E", "F"]).unwrap()));
        assert!(!sp.contains(&d.state(["B", "F"]).unwrap()));
        assert!(sp.contains(&d.empty_state()));
    }

    #[test]
    fn predecessor_and_successors() {
        let sp = abc();
        let d = sp.domain().clone();
        let ac = d.state(["A", "C"]).unwrap();
        assert_eq!(d.format_state(&sp.predecessor(&ac).unwrap()), "A");
        assert!(sp.predecessor(&d.empty_state()).is_err());
        assert!(sp.predecessor(&d.state(["B"]).unwrap()).is_err());
        let succ = sp.successors(&d.empty_state()).unwrap();
        let shown: Vec<(String, usize)> = succ.iter().map(|(s, _, i)| (d.format_state(s), *i)).collect();
        assert_eq!(shown, [("A".to_string(), 0), ("C".to_string(), 1)]);
        assert!(sp.successors(&d.full_state()).unwrap().is_empty());
        assert!(sp.successors(&d.state(["B"]).unwrap()).is_err());
    }

    #[test]
    fn predecessor_tree_is_inverse_of_successors() {
        for sp in [abc(), fixtures::six_concept_space()] {
            let fam = collect_family(&sp).unwrap();
            let mut children = 0;
            for s in fam.iter() {
                for (t, mt, _) in sp.successors(s).unwrap() {
                    assert_eq!(sp.predecessor(&t).unwrap(), *s);
                    assert_eq!(sp.mex(&t), mt);
                    children += 1;
                }
                if !s.is_empty() {
                    let p = sp.predecessor(s).unwrap();
                    assert_eq!(p.len() + 1, s.len());
                    assert!(p.is_subset(s));
                }
            }
            assert_eq!(children + 1, fam.len());
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(count_states(&abc()), 7);
        let chain = SequenceSpace::from_chars("ABCDEFGH", &["ABCDEFGH"]).unwrap();
        assert_eq!(count_states(&chain), 9);
        let fam = collect_family(&abc()).unwrap();
        let expected =
            crate::family::family_from_chars("ABC", &["{}", "A", "C", "A,B", "A,C", "B,C", "A,B,C"]).unwrap();
        assert_eq!(fam, expected);
    }

    #[test]
    fn enumeration_matches_prefix_closure_across_word_boundaries() {
        let n = 70;
        let d = Arc::new(crate::state::Domain::new((0..n).map(|i| format!("c{i}"))).unwrap());
        let a: Vec<usize> = (0..n).collect();
        let b: Vec<usize> = (0..n).rev().collect();
        let sp = SequenceSpace::new(d, vec![a, b]).unwrap();
        let (_, stats) = sp.enumerate_states(&mut Counter(0));
        assert_eq!(stats.states, n as u64 * (n as u64 + 1) / 2 + 1);
        let mut seen = 0u64;
        let _ = visit_states(&sp, |s| {
            assert_eq!(sp.interior(s), *s);
            seen += 1;
            ControlFlow::<()>::Continue(())
        });
        assert_eq!(seen, stats.states);
    }

    struct Counter(u64);
    impl Traversal for Counter {
        type Break = ();
        fn enter(&mut self, _: &State, _: Option<usize>) -> ControlFlow<()> {
            self.0 += 1;
            ControlFlow::Continue(())
        }
    }

    #[test]
    fn fringes_and_projection() {
        let sp = abc();
        let d = sp.domain().clone();
        let f = sp.fringes(&d.state(["B", "C"]).unwrap()).unwrap();
        assert_eq!(d.format_state(&f.outer), "A");
        assert_eq!(d.format_state(&f.inner), "B");
        let f = sp.fringes(&d.empty_state()).unwrap();
        assert_eq!(d.format_state(&f.outer), "A,C");
        assert!(f.inner.is_empty());
        assert!(sp.fringes(&d.full_state()).unwrap().outer.is_empty());

        let p = sp.project(&d.state(["B"]).unwrap()).unwrap();
        assert_eq!(count_states(&p), 2);
        assert_eq!(p.k(), 1);
        assert_eq!(sp.project(&d.full_state()).unwrap(), sp);
        assert!(sp.project(&d.empty_state()).is_err());
    }

    #[test]
    fn union_via_mex_matches_bitwise() {
        let sp = abc();
        let d = sp.domain().clone();
        let a = d.state(["A"]).unwrap();
        let c = d.state(["C"]).unwrap();
        assert_eq!(d.format_state(&sp.union_via_mex(&a, &c).unwrap()), "A,C");
        assert_eq!(sp.union_via_mex(&a, &a).unwrap(), a);
        assert!(sp.union_via_mex(&a, &d.state(["B"]).unwrap()).is_err());
    }

    #[test]
    fn subtree_enumeration_partitions_the_space() {
        let sp = fixtures::six_concept_space();
        let total = count_states(&sp);
        let (frontier, shallower) = sp.frontier(2);
        let mut sum = shallower;
        for root in &frontier {
            sum += sp.enumerate_subtree(root, &mut Counter(0)).unwrap().1.states;
        }
        assert_eq!(sum, total);
    }
}
