//! Concept domains and bit-vector knowledge states.
//!
//! A [`State`] is a set of concept indices stored as little-endian 64-bit
//! words: concept `i` lives in bit `i % 64` of word `i / 64`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// An ordered list of distinct concept labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Domain {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            validate_label(label)?;
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate concept label `{label}`")));
            }
        }
        Ok(Self { labels, index })
    }

    /// Domain whose labels are the given characters, e.g. `Domain::from_chars("ABC")`.
    pub fn from_chars(chars: &str) -> Result<Self> {
        Self::new(chars.chars().map(|c| c.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::Validation(format!("unknown concept `{label}`")))
    }

    pub fn empty_state(&self) -> State {
        State::empty(self.len())
    }

    pub fn full_state(&self) -> State {
        State::full(self.len())
    }

    /// Builds a state from concept labels.
    pub fn state<I, S>(&self, labels: I) -> Result<State>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut s = self.empty_state();
        for l in labels {
            s.insert(self.require(l.as_ref())?);
        }
        Ok(s)
    }

    /// Parses the `.states` line syntax: `A,B,C` or `{}`.
    pub fn parse_state(&self, text: &str) -> Result<State> {
        let text = text.trim();
        if text == "{}" || text.is_empty() {
            return Ok(self.empty_state());
        }
        self.state(text.split(','))
    }

    /// Formats a state in the `.states` line syntax.
    pub fn format_state(&self, s: &State) -> String {
        if s.is_empty() {
            return "{}".to_string();
        }
        s.iter().map(|i| self.label(i)).collect::<Vec<_>>().join(",")
    }

    /// Sub-domain formed by the concepts of `keep`, in domain order.
    pub fn restrict(&self, keep: &State) -> Domain {
        Domain::new(keep.iter().map(|i| self.labels[i].clone())).expect("sub-domain of a valid domain")
    }
}

fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() {
        return Err(Error::Validation("empty concept label".into()));
    }
    if label == "{}" || label.starts_with('#') {
        return Err(Error::Validation(format!("reserved concept label `{label}`")));
    }
    if label.chars().any(|c| c == ',' || c.is_whitespace()) {
        return Err(Error::Validation(format!(
            "concept label `{label}` contains a comma or whitespace"
        )));
    }
    Ok(())
}

/// A set of concepts over a domain of `n` concepts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct State {
    n: usize,
    words: Vec<u64>,
}

impl State {
    pub fn empty(n: usize) -> Self {
        Self { n, words: vec![0; words_for(n)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for (w, word) in s.words.iter_mut().enumerate() {
            let lo = w * WORD_BITS;
            let bits = (n - lo).min(WORD_BITS);
            *word = if bits == WORD_BITS { !0 } else { (1u64 << bits) - 1 };
        }
        s
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Builds a state from raw words; bits at or above `n` must be clear.
    pub fn from_words(n: usize, words: Vec<u64>) -> Self {
        assert_eq!(words.len(), words_for(n), "word count does not match domain size");
        let s = Self { n, words };
        debug_assert!(s.iter().all(|i| i < n));
        s
    }

    /// Domain size this state is defined over.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.n, "concept {i} outside domain of size {}", self.n);
        self.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        assert!(i < self.n, "concept {i} outside domain of size {}", self.n);
        self.words[i / WORD_BITS] &= !(1 << (i % WORD_BITS));
    }

    pub fn with(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn without(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.remove(i);
        s
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn union(&self, other: &State) -> State {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &State) -> State {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &State) -> State {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> State {
        State::full(self.n).difference(self)
    }

    pub fn union_with(&mut self, other: &State) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &State) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &State) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Concept indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * WORD_BITS + t)
            })
        })
    }

    /// Maps this state through an index table into a domain of size `m`;
    /// concepts mapped to `None` are dropped.
    pub fn remap(&self, m: usize, map: &[Option<usize>]) -> State {
        State::from_indices(m, self.iter().filter_map(|i| map[i]))
    }

    fn zip_with(&self, other: &State, f: impl Fn(u64, u64) -> u64) -> State {
        debug_assert_eq!(self.n, other.n, "states over different domains");
        State {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Ord for State {
    /// Orders by cardinality, then lexicographically by sorted index list.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
            .then_with(|| self.n.cmp(&other.n))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A domain shared between spaces and families.
pub type SharedDomain = Arc<Domain>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_state_masks_tail_bits() {
        for n in [0, 1, 63, 64, 65, 130] {
            let f = State::full(n);
            assert_eq!(f.len(), n);
            assert!(f.iter().all(|i| i < n));
        }
    }

    #[test]
    fn set_operations() {
        let a = State::from_indices(70, [0, 5, 64, 69]);
        let b = State::from_indices(70, [5, 6, 69]);
        assert_eq!(a.union(&b).iter().collect::<Vec<_>>(), vec![0, 5, 6, 64, 69]);
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![5, 69]);
        assert_eq!(a.difference(&b).iter().collect::<Vec<_>>(), vec![0, 64]);
        assert!(a.intersection(&b).is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.complement().len(), 66);
    }

    #[test]
    fn ordering_is_by_size_then_lexicographic() {
        let mut v = vec![
            State::from_indices(3, [0, 1]),
            State::from_indices(3, [2]),
            State::empty(3),
            State::from_indices(3, [0]),
            State::from_indices(3, [0, 2]),
        ];
        v.sort();
        let d = Domain::from_chars("ABC").unwrap();
        let shown: Vec<_> = v.iter().map(|s| d.format_state(s)).collect();
        assert_eq!(shown, ["{}", "A", "C", "A,B", "A,C"]);
    }

    #[test]
    fn domain_rejects_bad_labels() {
        assert!(Domain::new(["A", "A"]).is_err());
        assert!(Domain::new(["A,B"]).is_err());
        assert!(Domain::new(["{}"]).is_err());
        assert!(Domain::new([""]).is_err());
        assert!(Domain::new(["a b"]).is_err());
        assert!(Domain::new(Vec::<String>::new()).unwrap().is_empty());
    }

    #[test]
    fn parse_and_format_state() {
        let d = Domain::from_chars("ABC").unwrap();
        let s = d.parse_state("C,A").unwrap();
        assert_eq!(d.format_state(&s), "A,C");
        assert_eq!(d.format_state(&d.parse_state("{}").unwrap()), "{}");
        assert!(d.parse_state("A,Z").is_err());
    }
}
