//! Brute-force oracles shared by the integration tests and the acceptance run.
//! None of these call into the library's enumeration, base or assessment code.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use learnspace::semilattice::SemilatticeTable;
use learnspace::{SequenceSpace, SetFamily, State};

/// All subsets of `0..n` as bit masks.
pub fn all_masks(n: usize) -> impl Iterator<Item = u64> {
    0u64..1 << n
}

pub fn mask_state(n: usize, m: u64) -> State {
    State::from_indices(n, (0..n).filter(|i| m >> i & 1 == 1))
}

pub fn state_mask(s: &State) -> u64 {
    s.iter().fold(0u64, |m, i| m | 1 << i)
}

/// Prefix sets of every sequence closed under union, as masks.
pub fn prefix_union_closure(sp: &SequenceSpace) -> BTreeSet<u64> {
    let mut out: BTreeSet<u64> = BTreeSet::new();
    out.insert(0);
    let mut gens = Vec::new();
    for seq in sp.sequences() {
        let mut m = 0u64;
        for &x in seq {
            m |= 1 << x;
            gens.push(m);
        }
    }
    let mut frontier: Vec<u64> = vec![0];
    while let Some(s) = frontier.pop() {
        for &g in &gens {
            let u = s | g;
            if out.insert(u) {
                frontier.push(u);
            }
        }
    }
    out
}

pub fn family_masks(f: &SetFamily) -> BTreeSet<u64> {
    f.iter().map(state_mask).collect()
}

/// The learning-space axioms checked directly on masks.
pub fn is_learning_space(f: &BTreeSet<u64>) -> bool {
    if !f.contains(&0) {
        return false;
    }
    for &a in f {
        for &b in f {
            if !f.contains(&(a | b)) {
                return false;
            }
        }
        if a != 0 && !(0..64).any(|i| a >> i & 1 == 1 && f.contains(&(a & !(1 << i)))) {
            return false;
        }
    }
    true
}

/// Inner and outer fringe of `s` by trying every single-element edit.
pub fn fringes(f: &BTreeSet<u64>, n: usize, s: u64) -> (u64, u64) {
    let mut inner = 0;
    let mut outer = 0;
    for i in 0..n {
        let b = 1u64 << i;
        if s & b != 0 {
            if f.contains(&(s & !b)) {
                inner |= b;
            }
        } else if f.contains(&(s | b)) {
            outer |= b;
        }
    }
    (inner, outer)
}

/// States with exactly one predecessor.
pub fn base(f: &BTreeSet<u64>, n: usize) -> BTreeSet<u64> {
    f.iter().copied().filter(|&s| fringes(f, n, s).0.count_ones() == 1).collect()
}

/// States whose removal, and sets whose addition, leave a learning space.
/// A removal must also keep the union of all states.
pub fn space_fringe(f: &BTreeSet<u64>, n: usize) -> (BTreeSet<u64>, BTreeSet<u64>) {
    let top = f.iter().fold(0, |a, &b| a | b);
    let mut removable = BTreeSet::new();
    let mut addable = BTreeSet::new();
    for m in all_masks(n) {
        let mut g = f.clone();
        if f.contains(&m) {
            g.remove(&m);
            if is_learning_space(&g) && g.iter().fold(0, |a, &b| a | b) == top {
                removable.insert(m);
            }
        } else {
            g.insert(m);
            if is_learning_space(&g) {
                addable.insert(m);
            }
        }
    }
    (removable, addable)
}

/// All permutations of `top` every prefix of which is a member.
pub fn basic_words(f: &BTreeSet<u64>, top: u64) -> Vec<Vec<usize>> {
    fn rec(f: &BTreeSet<u64>, top: u64, cur: u64, w: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur == top {
            out.push(w.clone());
            return;
        }
        for i in 0..64 {
            let b = 1u64 << i;
            if top & b != 0 && cur & b == 0 && f.contains(&(cur | b)) {
                w.push(i);
                rec(f, top, cur | b, w, out);
                w.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(f, top, 0, &mut Vec::new(), &mut out);
    out
}

/// Fewest basic words whose prefix-union closure is the whole family.
/// A word set works exactly when every base set is a prefix of one of the
/// words, so this is a minimum set cover of the base.
pub fn min_convex_dimension(f: &BTreeSet<u64>, n: usize) -> usize {
    let top = f.iter().fold(0, |a, &b| a | b);
    let b: Vec<u64> = base(f, n).into_iter().collect();
    if b.is_empty() {
        return 0;
    }
    let index = |m: u64| b.iter().position(|&x| x == m);
    let mut covers: HashSet<u128> = HashSet::new();
    for w in basic_words(f, top) {
        let mut c = 0u128;
        let mut p = 0u64;
        for x in w {
            p |= 1 << x;
            if let Some(i) = index(p) {
                c |= 1 << i;
            }
        }
        covers.insert(c);
    }
    let covers: Vec<u128> = covers.iter().copied().filter(|&c| !covers.iter().any(|&d| d != c && d & c == c)).collect();
    let all: u128 = if b.len() == 128 { u128::MAX } else { (1u128 << b.len()) - 1 };
    fn search(covers: &[u128], left: u128, budget: usize) -> bool {
        if left == 0 {
            return true;
        }
        if budget == 0 {
            return false;
        }
        let bit = left.trailing_zeros();
        covers.iter().filter(|&&c| c >> bit & 1 == 1).any(|&c| search(covers, left & !c, budget - 1))
    }
    (1..=b.len()).find(|&k| search(&covers, all, k)).expect("the base itself is always coverable")
}

/// Marginals by summing the prior-weighted answer likelihood of every state.
pub fn direct_marginals(states: &[State], n: usize, log: &[(usize, bool)], beta: f64, eta: f64) -> (Vec<f64>, f64) {
    let mut num = vec![0.0; n];
    let mut total = 0.0;
    for s in states {
        let mut l = 1.0;
        for &(c, correct) in log {
            l *= match (s.contains(c), correct) {
                (true, true) => 1.0 - beta,
                (true, false) => beta,
                (false, true) => eta,
                (false, false) => 1.0 - eta,
            };
        }
        total += l;
        for x in s.iter() {
            num[x] += l;
        }
    }
    (num.iter().map(|v| v / total).collect(), total)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Union semilattice of a family: objects are the states in sorted order,
/// identity is the empty state.
pub fn union_table(states: &[u64]) -> (Vec<Vec<usize>>, usize) {
    let mut v = states.to_vec();
    v.sort_unstable();
    v.dedup();
    let idx = |m: u64| v.iter().position(|&x| x == m).expect("union closed");
    let rows = v.iter().map(|&a| v.iter().map(|&b| idx(a | b)).collect()).collect();
    (rows, idx(0))
}

/// Birkhoff test: the table is the union semilattice of the lower sets of
/// its join-irreducibles exactly when the map to irreducible divisors is a
/// bijective homomorphism onto those lower sets.
pub fn is_distributive_lattice(t: &SemilatticeTable) -> bool {
    let m = t.len();
    let id = t.identity();
    let divides = |x: usize, y: usize| t.mul(x, y) == y;
    let irr: Vec<usize> = (0..m)
        .filter(|&x| x != id && (0..m).all(|a| (0..m).all(|b| t.mul(a, b) != x || a == x || b == x)))
        .collect();
    let phi = |x: usize| -> u64 { irr.iter().enumerate().filter(|(_, &j)| divides(j, x)).fold(0, |a, (i, _)| a | 1 << i) };
    let images: Vec<u64> = (0..m).map(phi).collect();
    let distinct: HashSet<u64> = images.iter().copied().collect();
    if distinct.len() != m {
        return false;
    }
    if !(0..m).all(|x| (0..m).all(|y| images[t.mul(x, y)] == images[x] | images[y])) {
        return false;
    }
    let k = irr.len();
    let lower = (0u64..1 << k)
        .filter(|&s| (0..k).all(|i| s >> i & 1 == 0 || (0..k).all(|j| !divides(irr[j], irr[i]) || s >> j & 1 == 1)))
        .count();
    lower == m
}

/// Sorted (size, predecessor count) pairs of the members; invariant under
/// relabelling the points.
pub fn profile(f: &BTreeSet<u64>, n: usize) -> Vec<(u32, u32)> {
    let mut v: Vec<(u32, u32)> = f.iter().map(|&s| (s.count_ones(), fringes(f, n, s).0.count_ones())).collect();
    v.sort_unstable();
    v
}

/// Two families over `n` points that differ by a relabelling of the points.
pub fn isomorphic(a: &BTreeSet<u64>, b: &BTreeSet<u64>, n: usize) -> bool {
    if a.len() != b.len() || profile(a, n) != profile(b, n) {
        return false;
    }
    fn rec(a: &BTreeSet<u64>, b: &BTreeSet<u64>, n: usize, perm: &mut Vec<usize>, used: u64) -> bool {
        if perm.len() == n {
            return a.iter().all(|&s| {
                let t = (0..n).filter(|&i| s >> i & 1 == 1).fold(0u64, |m, i| m | 1 << perm[i]);
                b.contains(&t)
            });
        }
        for j in 0..n {
            if used >> j & 1 == 0 {
                perm.push(j);
                if rec(a, b, n, perm, used | 1 << j) {
                    return true;
                }
                perm.pop();
            }
        }
        false
    }
    rec(a, b, n, &mut Vec::new(), 0)
}

/// The same edits as [`space_fringe`], checking only the conditions a single
/// edit can break: a removed state must not be a union of smaller states nor
/// the only predecessor of a larger one; an added set needs a predecessor and
/// must keep unions closed.
pub fn space_fringe_local(f: &BTreeSet<u64>, n: usize) -> (BTreeSet<u64>, BTreeSet<u64>) {
    let top = f.iter().fold(0, |a, &b| a | b);
    let mut removable = BTreeSet::new();
    for &m in f {
        if m == 0 || m == top {
            continue;
        }
        let below = f.iter().filter(|&&t| t != m && t & !m == 0).fold(0, |a, &b| a | b);
        let sole_parent = (0..n).any(|i| {
            let t = m | 1 << i;
            t != m && f.contains(&t) && (0..n).all(|j| t >> j & 1 == 0 || t & !(1 << j) == m || !f.contains(&(t & !(1 << j))))
        });
        if below != m && !sole_parent {
            removable.insert(m);
        }
    }
    let mut addable = BTreeSet::new();
    for &s in f {
        for i in 0..n {
            let m = s | 1 << i;
            if m != s && !f.contains(&m) && f.iter().all(|&a| a & !m == 0 || a | m == a || f.contains(&(a | m))) {
                addable.insert(m);
            }
        }
    }
    (removable, addable)
}
