//! Parameterised and random space generators.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::family::SetFamily;
use crate::sequence_space::SequenceSpace;
use crate::state::{Domain, SharedDomain, State};

/// Domain `c0, c1, …, c{n-1}`.
pub fn numbered_domain(n: usize) -> SharedDomain {
    Arc::new(Domain::new((0..n).map(|i| format!("c{i}"))).expect("valid labels"))
}

/// Domain `A, B, C, …` for `n ≤ 26`, numbered beyond that.
pub fn letter_domain(n: usize) -> SharedDomain {
    if n > 26 {
        return numbered_domain(n);
    }
    Arc::new(Domain::new((0..n).map(|i| ((b'A' + i as u8) as char).to_string())).expect("valid labels"))
}

/// `k` independent uniformly random sequences.
pub fn random_sequence_space<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> SequenceSpace {
    let d = letter_domain(n);
    let seqs = (0..k.max(1))
        .map(|_| {
            let mut s: Vec<usize> = (0..n).collect();
            s.shuffle(rng);
            s
        })
        .collect();
    SequenceSpace::new(d, seqs).expect("permutations")
}

/// The first `k` cyclic rotations of `0, 1, …, n−1`.
pub fn rotations(n: usize, k: usize) -> SequenceSpace {
    let seqs = (0..k.clamp(1, n.max(1))).map(|r| (0..n).map(|j| (j + r) % n).collect()).collect();
    SequenceSpace::new(numbered_domain(n), seqs).expect("permutations")
}

/// Every subset of an `n`-set, as `n` rotations.
pub fn powerset_space(n: usize) -> SequenceSpace {
    rotations(n, n)
}

/// A single sequence: the `n + 1` prefixes of `0, …, n−1`.
pub fn chain_space(n: usize) -> SequenceSpace {
    SequenceSpace::new(numbered_domain(n), vec![(0..n).collect()]).expect("permutation")
}

/// A sequence and its reverse.
pub fn sequence_and_reverse(n: usize) -> SequenceSpace {
    SequenceSpace::new(numbered_domain(n), vec![(0..n).collect(), (0..n).rev().collect()]).expect("permutations")
}

/// All sets avoiding the last concept `x`, together with the sets containing
/// `x` that have at least `min_size` elements.
pub fn large_base_family(n: usize, min_size: usize) -> SetFamily {
    assert!((1..24).contains(&n), "desk-scale construction");
    let x = n - 1;
    let states = (0u64..1 << n).filter_map(|m| {
        let has_x = m >> x & 1 == 1;
        (!has_x || m.count_ones() as usize >= min_size).then(|| State::from_indices(n, (0..n).filter(|i| m >> i & 1 == 1)))
    });
    SetFamily::from_states(numbered_domain(n), states).expect("fits")
}
