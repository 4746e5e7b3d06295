//! The affine slack map between node space and edge space, the alternating
//! walk functional, its inversion along an odd 1-tree, and the 0/1 clamp.

use num::{One, Signed, Zero};

use crate::embedding::{EmbeddedGraph, OddOneTree, Walk};
use crate::error::Error;
use crate::rational::Q;

/// Exact vector indexed by the vertices of an instance.
pub type NodeVector = Vec<Q>;
/// Exact vector indexed by the edges; doubles as an arc vector on the dual
/// orientation, which identifies arcs with primal edges.
pub type EdgeVector = Vec<Q>;

/// y(vw) = 1 - x(v) - x(w). Injective on connected non-bipartite graphs.
pub fn sigma(g: &EmbeddedGraph, x: &[Q]) -> EdgeVector {
    g.edge_list()
        .iter()
        .map(|e| Q::one() - &x[e.u] - &x[e.v])
        .collect()
}

/// Alternating sum of y along the stored order of the walk, first edge
/// positive.
pub fn omega_walk(w: &Walk, y: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (i, &e) in w.edges().iter().enumerate() {
        if i % 2 == 0 {
            acc += &y[e];
        } else {
            acc -= &y[e];
        }
    }
    acc
}

/// Inverts the slack map on an integral edge vector. The starting value
/// comes from the alternating sum around the odd cycle, the rest is
/// propagated along the tree; the result is verified against y exactly.
pub fn sigma_inverse(
    g: &EmbeddedGraph,
    y: &[Q],
    t: &OddOneTree,
) -> Result<NodeVector, Error> {
    if y.len() != g.m() {
        return Err(Error::Usage(format!(
            "edge vector has {} entries for {} edges",
            y.len(),
            g.m()
        )));
    }
    if y.iter().any(|v| !v.is_integer()) {
        return Err(Error::Usage("slack inversion expects an integral edge vector".into()));
    }
    let wc = omega_walk(&t.odd_cycle, y);
    if (wc.to_integer() % 2i32).is_zero() {
        return Err(Error::Usage(
            "alternating sum around the odd cycle is even; vector not in the slack image".into(),
        ));
    }
    for e in 0..g.m() {
        if t.tree.tree_edge[e] || e == t.extra {
            continue;
        }
        let w = t.even_closed_walk(g, e)?;
        if !omega_walk(&w, y).is_zero() {
            return Err(Error::Usage(format!(
                "even closed walk through edge {e} has nonzero alternating sum; vector not in the slack image"
            )));
        }
    }
    let v0 = t.odd_cycle.start();
    let mut x: Vec<Option<Q>> = vec![None; g.n()];
    x[v0] = Some((Q::one() - wc) / Q::from_integer(2.into()));
    // tree adjacency from the parent pointers
    let mut nbr: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n()];
    for v in 0..g.n() {
        if let Some((p, e)) = t.tree.parent[v] {
            nbr[v].push((p, e));
            nbr[p].push((v, e));
        }
    }
    let mut queue = std::collections::VecDeque::from([v0]);
    while let Some(v) = queue.pop_front() {
        let xv = x[v].clone().unwrap();
        for &(w, e) in &nbr[v] {
            if x[w].is_none() {
                x[w] = Some(Q::one() - &y[e] - &xv);
                queue.push_back(w);
            }
        }
    }
    let x: Vec<Q> = x
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::Internal("spanning tree missed a vertex".into())))
        .collect::<Result<_, _>>()?;
    if sigma(g, &x) != y {
        return Err(Error::Usage("edge vector is not in the image of the slack map".into()));
    }
    Ok(x)
}

/// Componentwise clamp of an integral feasible point to {0,1}. Feasibility
/// is preserved unconditionally; the weight can only grow because the
/// weights are edge-induced. Both facts are re-checked at runtime and any
/// violation is surfaced as an internal error.
pub fn clamp_to_unit(g: &EmbeddedGraph, x: &[Q]) -> Result<NodeVector, Error> {
    let clamped: Vec<Q> = x
        .iter()
        .map(|v| {
            if v.is_negative() {
                Q::zero()
            } else if v > &Q::one() {
                Q::one()
            } else {
                v.clone()
            }
        })
        .collect();
    for e in g.edge_list() {
        if &clamped[e.u] + &clamped[e.v] > Q::one() {
            return Err(Error::Internal(
                "clamp broke edge feasibility; input point was infeasible".into(),
            ));
        }
    }
    let before: Q = (0..g.n()).map(|v| g.weight(v) * &x[v]).sum();
    let after: Q = (0..g.n()).map(|v| g.weight(v) * &clamped[v]).sum();
    if after < before {
        return Err(Error::Internal(
            "clamp lost weight; weights are not edge-induced".into(),
        ));
    }
    Ok(clamped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::Edge;
    use crate::rational::qi;
    use rand::{Rng, SeedableRng};

    fn embed(weights: Vec<Q>, pairs: &[(usize, usize, bool)]) -> EmbeddedGraph {
        let n = weights.len();
        let edges: Vec<Edge> = pairs.iter().map(|&(u, v, sig)| Edge { u, v, sig }).collect();
        let mut rot = vec![Vec::new(); n];
        for (e, &(u, v, _)) in pairs.iter().enumerate() {
            rot[u].push(e);
            rot[v].push(e);
        }
        EmbeddedGraph::new(weights, edges, rot).unwrap()
    }

    fn proj_triangle() -> EmbeddedGraph {
        embed(vec![qi(1); 3], &[(0, 1, true), (1, 2, true), (2, 0, true)])
    }

    #[test]
    fn sigma_on_known_points() {
        let t = proj_triangle();
        // the zero node vector maps to the all-ones edge vector
        assert_eq!(sigma(&t, &[qi(0), qi(0), qi(0)]), vec![qi(1); 3]);
        // a unit vector zeroes exactly the incident slacks
        assert_eq!(sigma(&t, &[qi(1), qi(0), qi(0)]), vec![qi(0), qi(1), qi(0)]);
    }

    #[test]
    fn sigma_nonnegative_on_feasible_points() {
        let t = proj_triangle();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut tried = 0;
        while tried < 50 {
            let x: Vec<Q> = (0..3).map(|_| crate::rational::qr(rng.gen_range(0..=4), 4)).collect();
            if t.edge_list().iter().any(|e| &x[e.u] + &x[e.v] > Q::one()) {
                continue;
            }
            tried += 1;
            assert!(sigma(&t, &x).iter().all(|v| !v.is_negative()));
        }
    }

    #[test]
    fn omega_on_known_walks() {
        let t = proj_triangle();
        let ones = vec![qi(1); 3];
        let tree = t.spanning_odd_one_tree().unwrap();
        assert_eq!(omega_walk(&tree.odd_cycle, &ones), qi(1));

        let c4 = embed(vec![qi(1); 4], &[(0, 1, false), (1, 2, false), (2, 3, false), (3, 0, false)]);
        let w = Walk::new(&c4, vec![0, 1, 2, 3, 0], vec![0, 1, 2, 3]).unwrap();
        assert_eq!(omega_walk(&w, &vec![qi(1); 4]), qi(0));
    }

    #[test]
    fn omega_vanishes_on_even_walks_of_slack_vectors() {
        // chorded 5-cycle: plenty of non-tree edges and even walks
        let g = embed(
            vec![qi(1); 5],
            &[
                (0, 1, true),
                (1, 2, true),
                (2, 3, true),
                (3, 4, true),
                (4, 0, true),
                (0, 2, true),
            ],
        );
        let t = g.spanning_odd_one_tree().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x: Vec<Q> = (0..5).map(|_| qi(rng.gen_range(-4..=4))).collect();
            let y = sigma(&g, &x);
            for e in 0..g.m() {
                if t.tree.tree_edge[e] || e == t.extra {
                    continue;
                }
                let w = t.even_closed_walk(&g, e).unwrap();
                assert_eq!(omega_walk(&w, &y), qi(0));
            }
        }
    }

    #[test]
    fn inversion_recovers_known_points() {
        let t = proj_triangle();
        let tree = t.spanning_odd_one_tree().unwrap();
        let x = sigma_inverse(&t, &vec![qi(1); 3], &tree).unwrap();
        assert_eq!(x, vec![qi(0); 3]);

        // edges are (ab, bc, ca); y = (1,0,0) pins x = (0,0,1)
        let y = vec![qi(1), qi(0), qi(0)];
        let x = sigma_inverse(&t, &y, &tree).unwrap();
        assert_eq!(x, vec![qi(0), qi(0), qi(1)]);
    }

    #[test]
    fn inversion_round_trips_random_points() {
        let fixtures = [
            proj_triangle(),
            embed(
                vec![qi(1); 5],
                &[
                    (0, 1, true),
                    (1, 2, true),
                    (2, 3, true),
                    (3, 4, true),
                    (4, 0, true),
                    (0, 2, true),
                ],
            ),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for g in &fixtures {
            let t = g.spanning_odd_one_tree().unwrap();
            for _ in 0..200 {
                let x: Vec<Q> = (0..g.n()).map(|_| qi(rng.gen_range(-3..=3))).collect();
                let y = sigma(g, &x);
                assert_eq!(sigma_inverse(g, &y, &t).unwrap(), x);
            }
        }
    }

    #[test]
    fn inversion_rejects_vectors_outside_the_image() {
        let t = proj_triangle();
        let tree = t.spanning_odd_one_tree().unwrap();
        // even alternating sum around the odd cycle
        let y = vec![qi(1), qi(1), qi(0)];
        let wc = omega_walk(&tree.odd_cycle, &y);
        if (wc.to_integer() % 2i32) == 0.into() {
            assert!(sigma_inverse(&t, &y, &tree).is_err());
        }
        // non-integral entries
        let y = vec![crate::rational::qr(1, 2), qi(1), qi(1)];
        assert!(sigma_inverse(&t, &y, &tree).is_err());

        // a perturbed slack vector falls outside the image
        let g = embed(
            vec![qi(1); 5],
            &[
                (0, 1, true),
                (1, 2, true),
                (2, 3, true),
                (3, 4, true),
                (4, 0, true),
                (0, 2, true),
            ],
        );
        let tr = g.spanning_odd_one_tree().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let x: Vec<Q> = (0..5).map(|_| qi(rng.gen_range(-2..=2))).collect();
            let mut y = sigma(&g, &x);
            let bump = rng.gen_range(0..y.len());
            y[bump] += qi(1);
            assert!(sigma_inverse(&g, &y, &tr).is_err());
        }
    }

    #[test]
    fn clamp_known_cases() {
        let e = embed(vec![qi(1), qi(1)], &[(0, 1, false)]);
        assert_eq!(clamp_to_unit(&e, &[qi(2), qi(-1)]).unwrap(), vec![qi(1), qi(0)]);

        let t = proj_triangle();
        let x = vec![qi(0), qi(0), qi(1)];
        assert_eq!(clamp_to_unit(&t, &x).unwrap(), x);
        let x01 = vec![qi(1), qi(0), qi(0)];
        assert_eq!(clamp_to_unit(&t, &x01).unwrap(), x01);
    }

    #[test]
    fn clamp_preserves_feasibility_and_weight_on_random_points() {
        use num::Zero;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let n = rng.gen_range(3..=8);
            let mut pairs = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.4) {
                        pairs.push((u, v, true));
                    }
                }
            }
            // edge-induced weights by construction: w = row sums of random
            // nonnegative costs
            let mut w = vec![Q::zero(); n];
            for &(u, v, _) in &pairs {
                let c = crate::rational::qr(rng.gen_range(0..=6), rng.gen_range(1..=2));
                w[u] += &c;
                w[v] += &c;
            }
            let g = embed(w, &pairs);

            // feasible integral point: lift one vertex, push its neighbors down
            let mut x = vec![qi(0); n];
            let v = rng.gen_range(0..n);
            x[v] = qi(2);
            for &(a, b, _) in &pairs {
                if a == v {
                    x[b] = qi(-1);
                }
                if b == v {
                    x[a] = qi(-1);
                }
            }
            let before: Q = (0..n).map(|u| g.weight(u) * &x[u]).sum();
            let clamped = clamp_to_unit(&g, &x).unwrap();
            let after: Q = (0..n).map(|u| g.weight(u) * &clamped[u]).sum();
            assert!(after >= before);
            for e in g.edge_list() {
                assert!(&clamped[e.u] + &clamped[e.v] <= Q::one());
            }
            assert!(clamped.iter().all(|q| *q == qi(0) || *q == qi(1)));
        }
    }
}