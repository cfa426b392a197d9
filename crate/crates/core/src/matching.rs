//! Maximum bipartite matching by Hopcroft–Karp.

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

/// A maximum matching between `left` and `right` vertex sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// `pair_left[u]` is the right vertex matched to `u`.
    pub pair_left: Vec<Option<usize>>,
    pub pair_right: Vec<Option<usize>>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.pair_left.iter().filter(|p| p.is_some()).count()
    }
}

/// Maximum matching of the bipartite graph with adjacency lists `adj`
/// (left vertex → right vertices), in `O(E √V)`.
pub fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> Matching {
    let n_left = adj.len();
    let mut pl = vec![NIL; n_left];
    let mut pr = vec![NIL; n_right];
    let mut dist = vec![0usize; n_left];
    loop {
        // BFS layers from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if pl[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = pr[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n_left];
        for u in 0..n_left {
            if pl[u] == NIL {
                augment(u, adj, &mut pl, &mut pr, &mut dist, &mut it);
            }
        }
    }
    let opt = |v: Vec<usize>| v.into_iter().map(|x| (x != NIL).then_some(x)).collect();
    Matching { pair_left: opt(pl), pair_right: opt(pr) }
}

/// Iterative layered DFS for an augmenting path from `root`.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    pl: &mut [usize],
    pr: &mut [usize],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if it[u] == adj[u].len() {
            dist[u] = usize::MAX;
            stack.pop();
            continue;
        }
        let v = adj[u][it[u]];
        it[u] += 1;
        let w = pr[v];
        if w == NIL {
            // Flip the path recorded on the stack.
            let mut v = v;
            while let Some(u) = stack.pop() {
                let prev = pl[u];
                pl[u] = v;
                pr[v] = u;
                v = prev;
            }
            return true;
        }
        if dist[w] == dist[u] + 1 {
            stack.push(w);
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_max(adj: &[Vec<usize>], n_right: usize) -> usize {
        fn go(u: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if u == adj.len() {
                return 0;
            }
            let mut best = go(u + 1, adj, used);
            for &v in &adj[u] {
                if !used[v] {
                    used[v] = true;
                    best = best.max(1 + go(u + 1, adj, used));
                    used[v] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; n_right])
    }

    #[test]
    fn perfect_and_partial() {
        let adj = vec![vec![0, 1], vec![0], vec![2]];
        let m = hopcroft_karp(&adj, 3);
        assert_eq!(m.size(), 3);
        assert_eq!(m.pair_left[1], Some(0));
        let adj = vec![vec![0], vec![0], vec![0]];
        assert_eq!(hopcroft_karp(&adj, 1).size(), 1);
        assert_eq!(hopcroft_karp(&[], 0).size(), 0);
    }

    #[test]
    fn agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let nl = rng.gen_range(0..7);
            let nr = rng.gen_range(1..7);
            let adj: Vec<Vec<usize>> =
                (0..nl).map(|_| (0..nr).filter(|_| rng.gen_bool(0.35)).collect()).collect();
            let m = hopcroft_karp(&adj, nr);
            assert_eq!(m.size(), brute_max(&adj, nr));
            for (u, p) in m.pair_left.iter().enumerate() {
                if let Some(v) = p {
                    assert!(adj[u].contains(v));
                    assert_eq!(m.pair_right[*v], Some(u));
                }
            }
        }
    }
}
