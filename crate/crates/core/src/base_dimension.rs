//! Bases, chain covers, minimal sequence representations and dimensions.

use std::collections::HashSet;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::matching::hopcroft_karp;
use crate::quasi_ordinal::HasseDiagram;
use crate::sequence_space::SequenceSpace;
use crate::space::{visit_states, LearningSpace};
use crate::state::{SharedDomain, State};

/// The base of a learning space: its states with a single predecessor,
/// sorted by size then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseFamily {
    domain: SharedDomain,
    sets: Vec<State>,
}

impl BaseFamily {
    pub fn new(domain: SharedDomain, sets: impl IntoIterator<Item = State>) -> Self {
        let mut sets: Vec<State> = sets.into_iter().collect();
        sets.sort();
        sets.dedup();
        Self { domain, sets }
    }

    pub fn domain(&self) -> &SharedDomain {
        &self.domain
    }

    pub fn sets(&self) -> &[State] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, s: &State) -> bool {
        self.sets.binary_search(s).is_ok()
    }

    /// Index pairs `(a, b)` with `sets[a] ⊊ sets[b]`.
    pub fn inclusion_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, sa) in self.sets.iter().enumerate() {
            for (b, sb) in self.sets.iter().enumerate() {
                if a != b && sa.is_subset(sb) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn to_family(&self) -> SetFamily {
        SetFamily::from_states(self.domain.clone(), self.sets.iter().cloned()).expect("base fits in a family")
    }
}

/// A partition of the base into chains under inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainCover {
    /// Each chain listed from smallest to largest set.
    pub chains: Vec<Vec<State>>,
    /// Size of the maximum matching the cover was assembled from.
    pub matching_size: usize,
}

/// States of an explicit learning space with exactly one predecessor.
pub fn base_of_family(family: &SetFamily) -> Result<BaseFamily> {
    if !family.is_learning_space() {
        return Err(Error::Validation("family is not a learning space".into()));
    }
    let sets = family
        .iter()
        .filter(|s| s.iter().filter(|&x| family.contains(&s.without(x))).count() == 1)
        .cloned();
    Ok(BaseFamily::new(family.domain().clone(), sets))
}

/// Base of any learning space by testing every state's inner fringe.
pub fn base_of_space<S: LearningSpace + ?Sized>(space: &S) -> Result<BaseFamily> {
    let mut sets = Vec::new();
    let mut err = None;
    let _ = visit_states(space, |s| {
        if s.is_empty() {
            return ControlFlow::Continue(());
        }
        match space.state_fringes(s) {
            Ok(f) if f.inner.len() == 1 => sets.push(s.clone()),
            Ok(_) => {}
            Err(e) => {
                err = Some(e);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    match err {
        Some(e) => Err(e),
        None => Ok(BaseFamily::new(space.domain().clone(), sets)),
    }
}

/// Base of a sequence space from the prefixes of its sequences, scanning
/// each sequence from its longest prefix to its shortest.
pub fn base_of_sequences(sp: &SequenceSpace) -> BaseFamily {
    let n = sp.n();
    let k = sp.k();
    let mut found: HashSet<State> = HashSet::new();
    for (i, seq) in sp.sequences().iter().enumerate() {
        let mut mex = vec![n; k];
        let mut prefix = State::full(n);
        for len in (1..=n).rev() {
            let x = seq[len - 1];
            let px = sp.position(i, x);
            let single = (0..k).all(|j| {
                let pj = sp.position(j, x);
                pj > mex[j] || pj == px
            });
            if single {
                found.insert(prefix.clone());
            }
            prefix.remove(x);
            for (j, m) in mex.iter_mut().enumerate() {
                *m = (*m).min(sp.position(j, x));
            }
        }
    }
    BaseFamily::new(sp.domain().clone(), found)
}

/// Minimum chain cover of the base under inclusion, assembled from a
/// maximum matching between two copies of the base.
pub fn chain_cover(base: &BaseFamily) -> ChainCover {
    let m = base.len();
    let mut adj = vec![Vec::new(); m];
    for (a, b) in base.inclusion_pairs() {
        adj[a].push(b);
    }
    let matching = hopcroft_karp(&adj, m);
    let mut chains = Vec::new();
    for start in 0..m {
        if matching.pair_right[start].is_some() {
            continue;
        }
        let mut chain = vec![base.sets[start].clone()];
        let mut cur = start;
        while let Some(next) = matching.pair_left[cur] {
            chain.push(base.sets[next].clone());
            cur = next;
        }
        chains.push(chain);
    }
    ChainCover { chains, matching_size: matching.size() }
}

fn check_chain<S: LearningSpace + ?Sized>(space: &S, chain: &[State]) -> Result<Vec<State>> {
    let d = space.domain();
    let mut sets: Vec<State> = chain.to_vec();
    sets.sort();
    sets.dedup();
    for s in &sets {
        if !space.contains(s) {
            return Err(Error::NotAState(d.format_state(s)));
        }
    }
    for w in sets.windows(2) {
        if !w[0].is_subset(&w[1]) {
            return Err(Error::Validation(format!(
                "chain sets {} and {} are not nested",
                d.format_state(&w[0]),
                d.format_state(&w[1])
            )));
        }
    }
    let top = space.top();
    if top != d.full_state() {
        return Err(Error::Validation(format!(
            "concepts {} belong to no state, so no learning sequence covers the domain",
            d.format_state(&top.complement())
        )));
    }
    if sets.last() != Some(&top) {
        sets.push(top);
    }
    Ok(sets)
}

/// A learning sequence of `space` having every set of `chain` as a prefix.
/// Each segment between consecutive chain sets is found by removing
/// concepts from the larger set, lowest index first, then reversed.
pub fn extend_chain_to_sequence<S: LearningSpace + ?Sized>(space: &S, chain: &[State]) -> Result<Vec<usize>> {
    let sets = check_chain(space, chain)?;
    let n = space.domain().len();
    let mut seq = Vec::with_capacity(n);
    let mut below = State::empty(n);
    for target in &sets {
        let mut cur = target.clone();
        let mut removed = Vec::with_capacity(target.len() - below.len());
        while cur != below {
            let x = cur
                .difference(&below)
                .iter()
                .find(|&x| space.contains(&cur.without(x)))
                .ok_or_else(|| Error::Validation("space is not accessible between chain sets".into()))?;
            cur.remove(x);
            removed.push(x);
        }
        seq.extend(removed.into_iter().rev());
        below = target.clone();
    }
    Ok(seq)
}

/// Linear-time extension for quasi-ordinal spaces: depth-first search of
/// the diagram started from concepts in decreasing order of the smallest
/// chain set containing them; the sequence is the reversed postorder.
pub fn extend_chain_qos(h: &HasseDiagram, chain: &[State]) -> Result<Vec<usize>> {
    let sets = check_chain(h, chain)?;
    let n = h.domain().len();
    let mut key = vec![sets.len(); n];
    for (r, s) in sets.iter().enumerate().rev() {
        for x in s.iter() {
            key[x] = r;
        }
    }
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&x| (std::cmp::Reverse(key[x]), x));
    let mut visited = vec![false; n];
    let mut post = Vec::with_capacity(n);
    for &s in &starts {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some((x, i)) = stack.last_mut() {
            let succ = h.successors_of(*x);
            if *i < succ.len() {
                let y = succ[*i];
                *i += 1;
                if !visited[y] {
                    visited[y] = true;
                    stack.push((y, 0));
                }
            } else {
                post.push(*x);
                stack.pop();
            }
        }
    }
    post.reverse();
    Ok(post)
}

/// A minimal sequence representation and the data it was built from.
#[derive(Debug, Clone)]
pub struct Minimized {
    pub space: SequenceSpace,
    pub base: BaseFamily,
    pub cover: ChainCover,
}

impl Minimized {
    /// Convex dimension: the number of sequences.
    pub fn dim_c(&self) -> usize {
        self.space.k()
    }
}

/// Base → chain cover → one sequence per chain.
pub fn minimize_with_base<S: LearningSpace + ?Sized>(space: &S, base: BaseFamily) -> Result<Minimized> {
    let cover = chain_cover(&base);
    let mut seqs = Vec::with_capacity(cover.chains.len());
    for chain in &cover.chains {
        seqs.push(extend_chain_to_sequence(space, chain)?);
    }
    if seqs.is_empty() {
        seqs.push(extend_chain_to_sequence(space, &[])?);
    }
    let sp = SequenceSpace::new(space.domain().clone(), seqs)?;
    Ok(Minimized { space: sp, base, cover })
}

pub fn minimize_sequences(sp: &SequenceSpace) -> Result<Minimized> {
    minimize_with_base(sp, base_of_sequences(sp))
}

pub fn minimize_family(family: &SetFamily) -> Result<Minimized> {
    let base = base_of_family(family)?;
    minimize_with_base(family, base)
}

pub fn minimize_hasse(h: &HasseDiagram) -> Result<Minimized> {
    let base = BaseFamily::new(h.domain().clone(), h.principal_ideals());
    let cover = chain_cover(&base);
    let mut seqs = Vec::with_capacity(cover.chains.len().max(1));
    for chain in &cover.chains {
        seqs.push(extend_chain_qos(h, chain)?);
    }
    if seqs.is_empty() {
        seqs.push(Vec::new());
    }
    let sp = SequenceSpace::new(h.domain().clone(), seqs)?;
    Ok(Minimized { space: sp, base, cover })
}

/// Isometric dimension, base size and convex dimension of a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionReport {
    pub n: usize,
    pub dim_b: usize,
    pub dim_c: usize,
    /// Order dimension is two exactly when the convex dimension is two.
    pub order_dim_is_2: bool,
}

impl DimensionReport {
    pub fn from_minimized(m: &Minimized) -> Self {
        let dim_c = if m.base.is_empty() { 0 } else { m.cover.chains.len() };
        let n = m.base.sets().iter().fold(State::empty(m.space.n()), |acc, s| acc.union(s)).len();
        Self { n, dim_b: m.base.len(), dim_c, order_dim_is_2: dim_c == 2 }
    }
}

/// Every permutation of `∪ℒ` whose prefixes are all states, in
/// lexicographic order of concept indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicWords {
    pub words: Vec<Vec<usize>>,
    /// The listing stopped at the limit.
    pub truncated: bool,
}

pub fn enumerate_basic_words<S: LearningSpace + ?Sized>(space: &S, limit: usize) -> BasicWords {
    let top = space.top();
    let mut out = BasicWords { words: Vec::new(), truncated: false };
    let mut word = Vec::new();
    let mut cur = State::empty(space.domain().len());
    if space.contains(&cur) {
        basic_words_rec(space, &top, &mut cur, &mut word, limit, &mut out);
    }
    out
}

fn basic_words_rec<S: LearningSpace + ?Sized>(
    space: &S,
    top: &State,
    cur: &mut State,
    word: &mut Vec<usize>,
    limit: usize,
    out: &mut BasicWords,
) {
    if out.truncated {
        return;
    }
    if cur == top {
        if out.words.len() >= limit {
            out.truncated = true;
        } else {
            out.words.push(word.clone());
        }
        return;
    }
    for x in top.difference(cur).iter().collect::<Vec<_>>() {
        cur.insert(x);
        if space.contains(cur) {
            word.push(x);
            basic_words_rec(space, top, cur, word, limit, out);
            word.pop();
        }
        cur.remove(x);
    }
}

/// Splits the base into two hierarchies (families whose members are pairwise
/// disjoint or nested) when the crossing graph is bipartite.
pub fn is_join_of_two_hierarchies(base: &BaseFamily) -> Option<[Vec<State>; 2]> {
    let sets = base.sets();
    let m = sets.len();
    let crosses = |a: &State, b: &State| !a.is_disjoint(b) && !a.is_subset(b) && !b.is_subset(a);
    let mut color: Vec<Option<u8>> = vec![None; m];
    for start in 0..m {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(0);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            let cu = color[u].expect("colored");
            for v in 0..m {
                if v == u || !crosses(&sets[u], &sets[v]) {
                    continue;
                }
                match color[v] {
                    None => {
                        color[v] = Some(1 - cu);
                        stack.push(v);
                    }
                    Some(cv) if cv == cu => return None,
                    Some(_) => {}
                }
            }
        }
    }
    let mut parts = [Vec::new(), Vec::new()];
    for (s, c) in sets.iter().zip(color) {
        parts[c.expect("colored") as usize].push(s.clone());
    }
    Some(parts)
}
