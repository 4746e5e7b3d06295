//! Biconnected components (blocks), cut vertices, and a rooted block tree.
//!
//! The stable set dynamic program processes blocks children-first, folding
//! each cut vertex's subtree value into the unique block on its root side.

use crate::embedding::{EmbeddedGraph, EdgeId, VertexId};
use crate::error::Error;

#[derive(Debug)]
pub struct BlockDecomposition {
    /// sorted vertex list per block
    pub blocks: Vec<Vec<VertexId>>,
    /// edges per block (each graph edge in exactly one block)
    pub block_edges: Vec<Vec<EdgeId>>,
    pub is_cut: Vec<bool>,
    /// for non-root blocks, the cut vertex shared with the parent side
    pub parent_cut: Vec<Option<VertexId>>,
    /// block indices, children before parents; last entry is the root block
    pub order: Vec<usize>,
    /// per vertex: blocks hanging below it (their parent_cut is this vertex)
    pub child_blocks: Vec<Vec<usize>>,
}

/// Decomposes a connected graph with at least one edge into blocks.
pub fn block_decomposition(g: &EmbeddedGraph) -> Result<BlockDecomposition, Error> {
    if g.n() == 0 || !g.is_connected() {
        return Err(Error::Usage("block decomposition needs a connected graph".into()));
    }
    if g.m() == 0 {
        // single vertex: one trivial block
        return Ok(BlockDecomposition {
            blocks: vec![vec![0]],
            block_edges: vec![vec![]],
            is_cut: vec![false],
            parent_cut: vec![None],
            order: vec![0],
            child_blocks: vec![vec![]],
        });
    }
    let adj = g.adjacency();
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut block_edges: Vec<Vec<EdgeId>> = Vec::new();
    let mut timer = 0usize;

    // iterative DFS from 0; frames carry the adjacency cursor
    struct Frame {
        v: VertexId,
        parent_edge: Option<EdgeId>,
        cursor: usize,
    }
    let mut stack = vec![Frame { v: 0, parent_edge: None, cursor: 0 }];
    disc[0] = timer;
    low[0] = timer;
    timer += 1;
    while let Some(top) = stack.last_mut() {
        let v = top.v;
        if top.cursor < adj[v].len() {
            let (e, w) = adj[v][top.cursor];
            top.cursor += 1;
            if Some(e) == top.parent_edge {
                continue;
            }
            if disc[w] == usize::MAX {
                edge_stack.push(e);
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                stack.push(Frame { v: w, parent_edge: Some(e), cursor: 0 });
            } else if disc[w] < disc[v] {
                // back edge to an ancestor
                edge_stack.push(e);
                low[v] = low[v].min(disc[w]);
            }
        } else {
            let frame = stack.pop().unwrap();
            if let Some(parent) = stack.last_mut() {
                let u = parent.v;
                low[u] = low[u].min(low[v]);
                if low[v] >= disc[u] {
                    // u separates this subtree: flush one block
                    let pe = frame.parent_edge.unwrap();
                    let mut blk = Vec::new();
                    while let Some(&e) = edge_stack.last() {
                        edge_stack.pop();
                        blk.push(e);
                        if e == pe {
                            break;
                        }
                    }
                    blk.reverse();
                    block_edges.push(blk);
                }
            }
        }
    }
    debug_assert!(edge_stack.is_empty());

    let nb = block_edges.len();
    let mut blocks: Vec<Vec<VertexId>> = Vec::with_capacity(nb);
    let mut block_count = vec![0usize; n];
    for blk in &block_edges {
        let mut vs: Vec<VertexId> = blk.iter().flat_map(|&e| [g.edge(e).u, g.edge(e).v]).collect();
        vs.sort_unstable();
        vs.dedup();
        for &v in &vs {
            block_count[v] += 1;
        }
        blocks.push(vs);
    }
    // a vertex of a connected graph with edges is a cut vertex iff it lies
    // in at least two blocks
    let is_cut: Vec<bool> = block_count.iter().map(|&c| c >= 2).collect();

    // root the block tree at the first block containing vertex 0
    let root = blocks
        .iter()
        .position(|b| b.contains(&0))
        .expect("vertex 0 lies in some block");
    let mut blocks_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (b, vs) in blocks.iter().enumerate() {
        for &v in vs {
            if is_cut[v] {
                blocks_of[v].push(b);
            }
        }
    }
    let mut parent_cut = vec![None; nb];
    let mut child_blocks: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut seen = vec![false; nb];
    seen[root] = true;
    let mut bfs = std::collections::VecDeque::from([root]);
    let mut order_rev = Vec::with_capacity(nb);
    while let Some(b) = bfs.pop_front() {
        order_rev.push(b);
        for &v in &blocks[b] {
            if !is_cut[v] || parent_cut[b] == Some(v) {
                continue;
            }
            for &c in &blocks_of[v] {
                if !seen[c] {
                    seen[c] = true;
                    parent_cut[c] = Some(v);
                    child_blocks[v].push(c);
                    bfs.push_back(c);
                }
            }
        }
    }
    debug_assert!(seen.iter().all(|&s| s));
    order_rev.reverse();

    Ok(BlockDecomposition {
        blocks,
        block_edges,
        is_cut,
        parent_cut,
        order: order_rev,
        child_blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::Edge;
    use crate::rational::qi;

    fn graph(n: usize, pairs: &[(usize, usize)]) -> EmbeddedGraph {
        let edges: Vec<Edge> = pairs.iter().map(|&(u, v)| Edge { u, v, sig: false }).collect();
        let mut rot = vec![Vec::new(); n];
        for (e, &(u, v)) in pairs.iter().enumerate() {
            rot[u].push(e);
            rot[v].push(e);
        }
        EmbeddedGraph::new((0..n).map(|_| qi(1)).collect(), edges, rot).unwrap()
    }

    #[test]
    fn two_triangles_sharing_a_vertex() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
        let d = block_decomposition(&g).unwrap();
        assert_eq!(d.blocks.len(), 2);
        let mut blocks = d.blocks.clone();
        blocks.sort();
        assert_eq!(blocks, vec![vec![0, 1, 2], vec![2, 3, 4]]);
        assert_eq!(
            (0..5).filter(|&v| d.is_cut[v]).collect::<Vec<_>>(),
            vec![2]
        );
        // children-first order ends at the root block
        assert_eq!(d.order.len(), 2);
        let root = *d.order.last().unwrap();
        assert_eq!(d.parent_cut[root], None);
        let leaf = d.order[0];
        assert_eq!(d.parent_cut[leaf], Some(2));
        assert_eq!(d.child_blocks[2], vec![leaf]);
    }

    #[test]
    fn path_of_three() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let d = block_decomposition(&g).unwrap();
        assert_eq!(d.blocks.len(), 2);
        assert!(d.is_cut[1]);
        assert!(!d.is_cut[0] && !d.is_cut[2]);
        for blk in &d.block_edges {
            assert_eq!(blk.len(), 1);
        }
    }

    #[test]
    fn single_block() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let d = block_decomposition(&g).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0], vec![0, 1, 2, 3]);
        assert!(d.is_cut.iter().all(|&c| !c));
        assert_eq!(d.parent_cut[0], None);
    }

    #[test]
    fn triangle_with_pendant() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        let d = block_decomposition(&g).unwrap();
        assert_eq!(d.blocks.len(), 2);
        assert!(d.is_cut[2]);
        assert_eq!(d.is_cut.iter().filter(|&&c| c).count(), 1);
        let mut blocks = d.blocks.clone();
        blocks.sort();
        assert_eq!(blocks, vec![vec![0, 1, 2], vec![2, 3]]);
    }

    #[test]
    fn star_center_is_cut() {
        let g = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let d = block_decomposition(&g).unwrap();
        assert_eq!(d.blocks.len(), 3);
        assert!(d.is_cut[0]);
        assert_eq!(d.is_cut.iter().filter(|&&c| c).count(), 1);
        // all three blocks hang below vertex 0 except the root block
        let root = *d.order.last().unwrap();
        assert_eq!(d.child_blocks[0].len(), 2);
        assert!(!d.child_blocks[0].contains(&root));
    }

    #[test]
    fn disconnected_rejected() {
        let g = graph(4, &[(0, 1), (2, 3)]);
        assert!(matches!(block_decomposition(&g), Err(Error::Usage(_))));
    }

    #[test]
    fn single_vertex_block() {
        let g = graph(1, &[]);
        let d = block_decomposition(&g).unwrap();
        assert_eq!(d.blocks, vec![vec![0]]);
    }
}
