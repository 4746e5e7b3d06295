//! Brute-force ground-truth oracles and randomized walk helpers, used by
//! tests and the `oracle` CLI subcommand. Small sizes only, guarded.

use num::Zero;
use rand::Rng;

use crate::embedding::{EmbeddedGraph, VertexId, Walk};
use crate::error::Error;
use crate::rational::Q;

/// Exhaustive maximum-weight stable set with branch and bound. n <= 24.
/// Vertices with non-positive weight are never taken (removal keeps a set
/// stable), so the reported optimum is over all stable sets.
pub fn oracle_mwss(n: usize, edges: &[(usize, usize)], w: &[Q]) -> Result<(Q, Vec<usize>), Error> {
    if n > 24 {
        return Err(Error::Usage(format!("mwss oracle capped at 24 vertices, got {n}")));
    }
    assert_eq!(w.len(), n);
    let mut nbr = vec![0u32; n];
    for &(u, v) in edges {
        assert!(u < n && v < n && u != v);
        nbr[u] |= 1 << v;
        nbr[v] |= 1 << u;
    }
    // suffix sums of positive weights for pruning
    let mut suffix = vec![Q::zero(); n + 1];
    for v in (0..n).rev() {
        suffix[v] = &suffix[v + 1] + if w[v] > Q::zero() { w[v].clone() } else { Q::zero() };
    }
    // the empty set (weight 0) is the incumbent; only strict improvements win
    let mut best = Q::zero();
    let mut best_set: Vec<usize> = Vec::new();
    let mut cur_set: Vec<usize> = Vec::new();

    fn go(
        v: usize,
        blocked: u32,
        cur: Q,
        n: usize,
        nbr: &[u32],
        w: &[Q],
        suffix: &[Q],
        best: &mut Q,
        best_set: &mut Vec<usize>,
        cur_set: &mut Vec<usize>,
    ) {
        if v == n {
            if cur > *best {
                *best = cur;
                *best_set = cur_set.clone();
            }
            return;
        }
        if &cur + &suffix[v] <= *best {
            return;
        }
        if blocked & (1 << v) == 0 && w[v] > Q::zero() {
            cur_set.push(v);
            go(v + 1, blocked | nbr[v], &cur + &w[v], n, nbr, w, suffix, best, best_set, cur_set);
            cur_set.pop();
        }
        go(v + 1, blocked, cur, n, nbr, w, suffix, best, best_set, cur_set);
    }
    go(0, 0, Q::zero(), n, &nbr, w, &suffix, &mut best, &mut best_set, &mut cur_set);
    Ok((best, best_set))
}

/// Convenience wrapper for embedded instances.
pub fn oracle_mwss_embedded(g: &EmbeddedGraph) -> Result<(Q, Vec<VertexId>), Error> {
    let edges: Vec<(usize, usize)> = g.edge_list().iter().map(|e| (e.u, e.v)).collect();
    oracle_mwss(g.n(), &edges, g.weights())
}

/// Exact odd cycle packing number by exhaustive search. n <= 14.
pub fn oracle_ocp(n: usize, edges: &[(usize, usize)]) -> Result<usize, Error> {
    if n > 14 {
        return Err(Error::Usage(format!("ocp oracle capped at 14 vertices, got {n}")));
    }
    let mut nbr = vec![Vec::new(); n];
    for &(u, v) in edges {
        assert!(u < n && v < n && u != v);
        nbr[u].push(v);
        nbr[v].push(u);
    }
    let full: u32 = (1u32 << n) - 1;
    let mut memo: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();

    // simple odd cycles inside `mask` whose minimum vertex is `v0`, as
    // vertex masks (paths explored only through vertices > v0)
    fn odd_cycles_through(v0: usize, mask: u32, nbr: &[Vec<usize>]) -> Vec<u32> {
        fn dfs(
            v0: usize,
            cur: usize,
            path: u32,
            len: usize,
            mask: u32,
            nbr: &[Vec<usize>],
            out: &mut Vec<u32>,
        ) {
            for &w in &nbr[cur] {
                if w == v0 && len >= 3 && len % 2 == 1 {
                    out.push(path);
                } else if w > v0 && mask & (1 << w) != 0 && path & (1 << w) == 0 {
                    dfs(v0, w, path | (1 << w), len + 1, mask, nbr, out);
                }
            }
        }
        let mut out = Vec::new();
        dfs(v0, v0, 1 << v0, 1, mask, nbr, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn pack(
        mask: u32,
        nbr: &[Vec<usize>],
        memo: &mut std::collections::HashMap<u32, usize>,
    ) -> usize {
        if mask == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&mask) {
            return v;
        }
        let v0 = mask.trailing_zeros() as usize;
        // either v0 stays unused, or it joins some odd cycle
        let mut best = pack(mask & !(1 << v0), nbr, memo);
        for c in odd_cycles_through(v0, mask, nbr) {
            best = best.max(1 + pack(mask & !c, nbr, memo));
        }
        memo.insert(mask, best);
        best
    }
    Ok(pack(full, &nbr, &mut memo))
}

/// Random closed walk: a few random steps, then back home along tree paths.
/// Used by property tests (sidedness preservation under switching).
pub fn random_closed_walk<R: Rng>(g: &EmbeddedGraph, rng: &mut R, max_steps: usize) -> Walk {
    let adj = g.adjacency();
    let tree = g.bfs_tree().expect("random walks need a connected graph");
    let start = rng.gen_range(0..g.n());
    let mut verts = vec![start];
    let mut edges = Vec::new();
    let mut cur = start;
    let steps = rng.gen_range(1..=max_steps.max(1));
    for _ in 0..steps {
        if adj[cur].is_empty() {
            break;
        }
        let (e, w) = adj[cur][rng.gen_range(0..adj[cur].len())];
        edges.push(e);
        verts.push(w);
        cur = w;
    }
    let (pv, pe) = tree.path(cur, start);
    edges.extend_from_slice(&pe);
    verts.extend_from_slice(&pv[1..]);
    debug_assert_eq!(*verts.last().unwrap(), start);
    Walk::new(g, verts, edges).expect("constructed walk is incidence-valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qi, qr};

    fn cyc(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    }

    #[test]
    fn mwss_small_cases() {
        let (w, s) = oracle_mwss(5, &cyc(5), &vec![qi(1); 5]).unwrap();
        assert_eq!(w, qi(2));
        assert_eq!(s.len(), 2);

        let (w, _) = oracle_mwss(0, &[], &[]).unwrap();
        assert_eq!(w, qi(0));

        let k4: Vec<(usize, usize)> = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let (w, s) = oracle_mwss(4, &k4, &vec![qi(1); 4]).unwrap();
        assert_eq!(w, qi(1));
        assert_eq!(s.len(), 1);

        let (w, s) = oracle_mwss(2, &[(0, 1)], &[qi(3), qi(1)]).unwrap();
        assert_eq!(w, qi(3));
        assert_eq!(s, vec![0]);

        // rational and negative weights
        let (w, s) = oracle_mwss(3, &[(0, 1), (1, 2)], &[qr(1, 2), qi(2), qi(-5)]).unwrap();
        assert_eq!(w, qi(2));
        assert_eq!(s, vec![1]);

        assert!(oracle_mwss(25, &[], &vec![qi(1); 25]).is_err());
    }

    #[test]
    fn mwss_weight_matches_set() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)];
        let w: Vec<Q> = (0..5).map(|i| qr(i as i64 + 1, 2)).collect();
        let (val, set) = oracle_mwss(5, &edges, &w).unwrap();
        let sum: Q = set.iter().map(|&v| w[v].clone()).sum();
        assert_eq!(val, sum);
        for &(u, v) in &edges {
            assert!(!(set.contains(&u) && set.contains(&v)));
        }
    }

    #[test]
    fn ocp_small_cases() {
        assert_eq!(oracle_ocp(5, &cyc(5)).unwrap(), 1);
        assert_eq!(oracle_ocp(6, &cyc(6)).unwrap(), 0);
        // two disjoint triangles
        let two = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)];
        assert_eq!(oracle_ocp(6, &two).unwrap(), 2);
        let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        assert_eq!(oracle_ocp(4, &k4).unwrap(), 1);
        assert_eq!(oracle_ocp(3, &[]).unwrap(), 0);
        assert!(oracle_ocp(15, &[]).is_err());
    }

    #[test]
    fn random_walks_close() {
        use rand::SeedableRng;
        let g = {
            use crate::embedding::Edge;
            let edges = vec![
                Edge { u: 0, v: 1, sig: true },
                Edge { u: 1, v: 2, sig: true },
                Edge { u: 2, v: 0, sig: true },
            ];
            EmbeddedGraph::new(vec![qi(1); 3], edges, vec![vec![0, 2], vec![0, 1], vec![1, 2]]).unwrap()
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let w = random_closed_walk(&g, &mut rng, 6);
            assert!(w.is_closed());
        }
    }
}
