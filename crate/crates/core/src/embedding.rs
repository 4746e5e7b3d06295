//! Combinatorial surface embeddings: rotation systems with edge signatures,
//! face traversal, Euler genus, walk sidedness, switching, and odd 1-trees.
//!
//! An embedded graph is a simple graph together with a cyclic order of
//! incident edges at every vertex and a per-edge signature bit marking where
//! the local orientations at the two ends disagree. This data determines a
//! cellular embedding in a surface whose Euler genus is 2 + |E| - |V| - |F|,
//! with |F| obtained by the signed face-traversal rule below.

use crate::error::Error;
use crate::rational::Q;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Undirected edge with its signature bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    /// true iff the local orientations at the two ends disagree across
    /// this edge (the edge lies in the signature set).
    pub sig: bool,
}

impl Edge {
    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint that is not `x`. Panics if `x` is not an endpoint.
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            assert_eq!(x, self.v, "vertex {x} not an endpoint");
            self.u
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

/// A walk: alternating vertex/edge sequence. Start vertex and direction are
/// part of the identity (they fix sign conventions downstream).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    verts: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

impl Walk {
    /// Validated constructor: `edges[i]` must join `verts[i]` and `verts[i+1]`.
    pub fn new(g: &EmbeddedGraph, verts: Vec<VertexId>, edges: Vec<EdgeId>) -> Result<Walk, Error> {
        if verts.is_empty() || verts.len() != edges.len() + 1 {
            return Err(Error::Usage(format!(
                "walk shape mismatch: {} vertices, {} edges",
                verts.len(),
                edges.len()
            )));
        }
        for (i, &e) in edges.iter().enumerate() {
            let ed = g
                .edges
                .get(e)
                .ok_or_else(|| Error::Usage(format!("walk uses unknown edge {e}")))?;
            let (a, b) = (verts[i], verts[i + 1]);
            let ok = (ed.u == a && ed.v == b) || (ed.u == b && ed.v == a);
            if !ok {
                return Err(Error::Usage(format!(
                    "walk step {i}: edge {e} does not join vertices {a} and {b}"
                )));
            }
        }
        Ok(Walk { verts, edges })
    }

    /// Zero-length walk at a single vertex (used for faces of isolated vertices).
    pub fn trivial(v: VertexId) -> Walk {
        Walk { verts: vec![v], edges: Vec::new() }
    }

    // internal: callers guarantee incidence
    fn raw(verts: Vec<VertexId>, edges: Vec<EdgeId>) -> Walk {
        debug_assert_eq!(verts.len(), edges.len() + 1);
        Walk { verts, edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.verts[0] == *self.verts.last().unwrap()
    }

    pub fn start(&self) -> VertexId {
        self.verts[0]
    }

    pub fn verts(&self) -> &[VertexId] {
        &self.verts
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn reversed(&self) -> Walk {
        let mut verts = self.verts.clone();
        let mut edges = self.edges.clone();
        verts.reverse();
        edges.reverse();
        Walk { verts, edges }
    }

    /// Closed walk rotated to start at edge position `k`.
    pub fn rotated(&self, k: usize) -> Walk {
        assert!(self.is_closed() && k < self.edges.len().max(1));
        let l = self.edges.len();
        let mut verts = Vec::with_capacity(l + 1);
        verts.extend_from_slice(&self.verts[k..l]);
        verts.extend_from_slice(&self.verts[..=k]);
        let mut edges = Vec::with_capacity(l);
        edges.extend_from_slice(&self.edges[k..]);
        edges.extend_from_slice(&self.edges[..k]);
        Walk { verts, edges }
    }

    /// How many times edge `e` is traversed.
    pub fn multiplicity(&self, e: EdgeId) -> usize {
        self.edges.iter().filter(|&&x| x == e).count()
    }
}

/// Faces of an embedding: one closed walk per face plus the slot structure.
/// A slot is one traversal of an edge by a facial walk; every edge has
/// exactly two slots (possibly both on the same face).
#[derive(Debug, Clone)]
pub struct Faces {
    pub walks: Vec<Walk>,
    /// slot id -> edge traversed
    pub slot_edge: Vec<EdgeId>,
    /// slot id -> face index
    pub slot_face: Vec<usize>,
    /// face -> slot ids in facial-walk order (len = walk length)
    pub face_slots: Vec<Vec<usize>>,
    /// edge -> its two slot ids, in traversal order
    pub edge_slots: Vec<[usize; 2]>,
}

impl Faces {
    pub fn count(&self) -> usize {
        self.walks.len()
    }
}

/// Simple graph with rational vertex weights, a rotation system, and an edge
/// signature. Immutable after construction; all operations are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedGraph {
    weights: Vec<Q>,
    edges: Vec<Edge>,
    /// per vertex, incident edge ids in cyclic order
    rot: Vec<Vec<EdgeId>>,
    /// external vertex labels (stable across induced subgraphs)
    vlabels: Vec<u64>,
    /// external edge labels
    elabels: Vec<u64>,
}

impl EmbeddedGraph {
    pub fn new(weights: Vec<Q>, edges: Vec<Edge>, rot: Vec<Vec<EdgeId>>) -> Result<Self, Error> {
        let vlabels = (0..weights.len() as u64).collect();
        let elabels = (0..edges.len() as u64).collect();
        Self::with_labels(weights, edges, rot, vlabels, elabels)
    }

    pub fn with_labels(
        weights: Vec<Q>,
        edges: Vec<Edge>,
        rot: Vec<Vec<EdgeId>>,
        vlabels: Vec<u64>,
        elabels: Vec<u64>,
    ) -> Result<Self, Error> {
        let n = weights.len();
        let m = edges.len();
        if rot.len() != n {
            return Err(Error::Input(format!(
                "rotation table covers {} vertices, graph has {n}",
                rot.len()
            )));
        }
        if vlabels.len() != n || elabels.len() != m {
            return Err(Error::Input("label count mismatch".into()));
        }
        {
            let mut vs = vlabels.clone();
            vs.sort_unstable();
            vs.dedup();
            if vs.len() != n {
                return Err(Error::Input("duplicate vertex labels".into()));
            }
            let mut es = elabels.clone();
            es.sort_unstable();
            es.dedup();
            if es.len() != m {
                return Err(Error::Input("duplicate edge labels".into()));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::Input(format!(
                    "edge {i} has endpoint outside vertex range"
                )));
            }
            if e.u == e.v {
                return Err(Error::Input(format!("edge {i} is a loop; graphs are simple")));
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert(key) {
                return Err(Error::Input(format!(
                    "parallel edge {i} between vertices {} and {}",
                    key.0, key.1
                )));
            }
        }
        // each rotation must list exactly the incident edges, once each
        let mut deg = vec![0usize; n];
        for e in &edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        for (v, r) in rot.iter().enumerate() {
            let mut seen_e = std::collections::HashSet::new();
            for &e in r {
                if e >= m {
                    return Err(Error::Structure(format!(
                        "rotation at vertex {v} names unknown edge {e}"
                    )));
                }
                if !edges[e].touches(v) {
                    return Err(Error::Structure(format!(
                        "rotation at vertex {v} lists edge {e}, which is not incident to it"
                    )));
                }
                if !seen_e.insert(e) {
                    return Err(Error::Structure(format!(
                        "dart of edge {e} at vertex {v} duplicated in rotation"
                    )));
                }
            }
            if r.len() != deg[v] {
                for e in 0..m {
                    if edges[e].touches(v) && !seen_e.contains(&e) {
                        return Err(Error::Structure(format!(
                            "dart of edge {e} at vertex {v} missing from rotation"
                        )));
                    }
                }
            }
        }
        Ok(EmbeddedGraph { weights, edges, rot, vlabels, elabels })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, v: VertexId) -> &Q {
        &self.weights[v]
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_list(&self) -> &[Edge] {
        &self.edges
    }

    pub fn rotation(&self, v: VertexId) -> &[EdgeId] {
        &self.rot[v]
    }

    pub fn vlabel(&self, v: VertexId) -> u64 {
        self.vlabels[v]
    }

    pub fn vlabels(&self) -> &[u64] {
        &self.vlabels
    }

    pub fn elabel(&self, e: EdgeId) -> u64 {
        self.elabels[e]
    }

    pub fn elabels(&self) -> &[u64] {
        &self.elabels
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rot[v].len()
    }

    /// Same graph with replaced weights.
    pub fn reweighted(&self, weights: Vec<Q>) -> EmbeddedGraph {
        assert_eq!(weights.len(), self.n());
        EmbeddedGraph { weights, ..self.clone() }
    }

    /// Per vertex: (edge id, other endpoint), ascending by edge id.
    pub fn adjacency(&self) -> Vec<Vec<(EdgeId, VertexId)>> {
        let mut adj = vec![Vec::new(); self.n()];
        for (e, ed) in self.edges.iter().enumerate() {
            adj[ed.u].push((e, ed.v));
            adj[ed.v].push((e, ed.u));
        }
        adj
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n()];
        let mut comps = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &(_, w) in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    pub fn is_bipartite(&self) -> bool {
        let adj = self.adjacency();
        let mut color = vec![None::<bool>; self.n()];
        for s in 0..self.n() {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                let cv = color[v].unwrap();
                for &(_, w) in &adj[v] {
                    match color[w] {
                        None => {
                            color[w] = Some(!cv);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cv => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }
}

// --- face traversal -----------------------------------------------------
//
// Darts: edge e has darts 2e (at e.u) and 2e+1 (at e.v). A traversal state
// is (dart, sign): the walk is about to leave the dart's vertex along its
// edge, with `sign` recording whether the local orientation is currently
// flipped. Crossing edge e flips the sign iff e.sig. Arriving at w through
// dart d_op = d^1, the walk continues with the rotation successor of d_op
// when the sign is clean and the predecessor when flipped.
//
// The mirror involution (d, s) -> (d^1, s ^ sig ^ 1) conjugates the step
// map to its inverse, so traversal orbits come in mirrored pairs, each pair
// one face traced in both directions. Exactly one orbit per pair is kept.

impl EmbeddedGraph {
    fn dart_vertex(&self, d: usize) -> VertexId {
        let e = &self.edges[d >> 1];
        if d & 1 == 0 {
            e.u
        } else {
            e.v
        }
    }

    /// Traces all facial walks. Deterministic: the lowest unvisited
    /// (dart, sign) state starts each face; isolated vertices contribute
    /// trivial faces at the end, in vertex order.
    pub fn trace_faces(&self) -> Result<Faces, Error> {
        if self.n() == 0 {
            return Err(Error::Usage("cannot trace faces of an empty graph".into()));
        }
        let m = self.m();
        // position of each dart within its rotation
        let mut pos = vec![[usize::MAX; 2]; m];
        for (v, r) in self.rot.iter().enumerate() {
            for (i, &e) in r.iter().enumerate() {
                let side = usize::from(self.edges[e].v == v);
                debug_assert_eq!(self.dart_vertex(2 * e + side), v);
                pos[e][side] = i;
            }
        }
        let step = |d: usize, s: usize| -> (usize, usize) {
            let e = d >> 1;
            let s2 = s ^ usize::from(self.edges[e].sig);
            let d_op = d ^ 1;
            let w = self.dart_vertex(d_op);
            let i = pos[e][d_op & 1];
            let deg = self.rot[w].len();
            let j = if s2 == 0 { (i + 1) % deg } else { (i + deg - 1) % deg };
            let e2 = self.rot[w][j];
            let side2 = usize::from(self.edges[e2].v == w);
            (2 * e2 + side2, s2)
        };
        let mirror = |d: usize, s: usize| -> (usize, usize) {
            (d ^ 1, s ^ usize::from(self.edges[d >> 1].sig) ^ 1)
        };

        let mut visited = vec![false; 4 * m];
        let sid = |d: usize, s: usize| 2 * d + s;
        let mut walks = Vec::new();
        let mut slot_edge = Vec::new();
        let mut slot_face = Vec::new();
        let mut face_slots = Vec::new();
        let mut edge_slots: Vec<Vec<usize>> = vec![Vec::new(); m];

        for start in 0..4 * m {
            if visited[start] {
                continue;
            }
            let face = walks.len();
            let (mut d, mut s) = (start / 2, start % 2);
            let mut verts = vec![self.dart_vertex(d)];
            let mut edges = Vec::new();
            let mut slots = Vec::new();
            let mut orbit = Vec::new();
            loop {
                let id = sid(d, s);
                if visited[id] {
                    return Err(Error::Internal(format!(
                        "face traversal revisited state (dart {d}, sign {s})"
                    )));
                }
                visited[id] = true;
                orbit.push(id);
                let e = d >> 1;
                edges.push(e);
                let slot = slot_edge.len();
                slot_edge.push(e);
                slot_face.push(face);
                slots.push(slot);
                edge_slots[e].push(slot);
                let (d2, s2) = step(d, s);
                verts.push(self.dart_vertex(d2));
                d = d2;
                s = s2;
                if sid(d, s) == start {
                    break;
                }
            }
            // retire the mirrored orbit; it is this face traced backwards
            for &id in &orbit {
                let (md, ms) = mirror(id / 2, id % 2);
                let mid = sid(md, ms);
                if orbit.contains(&mid) {
                    return Err(Error::Internal(
                        "face traversal produced a self-paired orbit".into(),
                    ));
                }
                if visited[mid] {
                    return Err(Error::Internal(
                        "mirrored traversal state claimed by two faces".into(),
                    ));
                }
                visited[mid] = true;
            }
            debug_assert_eq!(verts[0], *verts.last().unwrap());
            walks.push(Walk::raw(verts, edges));
            face_slots.push(slots);
        }
        for v in 0..self.n() {
            if self.rot[v].is_empty() {
                walks.push(Walk::trivial(v));
                face_slots.push(Vec::new());
            }
        }
        let mut edge_slots2 = Vec::with_capacity(m);
        for (e, slots) in edge_slots.into_iter().enumerate() {
            if slots.len() != 2 {
                return Err(Error::Internal(format!(
                    "edge {e} traversed {} times by facial walks, expected 2",
                    slots.len()
                )));
            }
            edge_slots2.push([slots[0], slots[1]]);
        }
        Ok(Faces { walks, slot_edge, slot_face, face_slots, edge_slots: edge_slots2 })
    }

    /// Euler genus 2 + |E| - |V| - |F| of the carrier surface.
    pub fn euler_genus(&self) -> Result<usize, Error> {
        if !self.is_connected() {
            return Err(Error::Usage(
                "Euler genus requires a connected graph; split components first".into(),
            ));
        }
        let f = self.trace_faces()?.count() as i64;
        let g = 2 + self.m() as i64 - self.n() as i64 - f;
        if g < 0 {
            return Err(Error::Internal(format!("negative Euler genus {g}")));
        }
        Ok(g as usize)
    }

    /// A closed walk is 1-sided iff it crosses the signature an odd number
    /// of times (with multiplicity).
    pub fn walk_sidedness(&self, w: &Walk) -> Result<Sidedness, Error> {
        if !w.is_closed() {
            return Err(Error::Usage("sidedness is defined for closed walks only".into()));
        }
        let odd = w.edges.iter().filter(|&&e| self.edges[e].sig).count() % 2 == 1;
        Ok(if odd { Sidedness::OneSided } else { Sidedness::TwoSided })
    }
}

// --- spanning trees and parity -------------------------------------------

/// Breadth-first spanning tree rooted at 0 of a connected graph.
#[derive(Debug, Clone)]
pub struct BfsTree {
    pub root: VertexId,
    /// parent[v] = (parent vertex, connecting edge); None at the root
    pub parent: Vec<Option<(VertexId, EdgeId)>>,
    pub depth: Vec<usize>,
    pub tree_edge: Vec<bool>,
    /// signature parity of the tree path root -> v
    pub sig_parity: Vec<bool>,
}

impl BfsTree {
    /// Tree path from a to b (through their meet), as (verts, edges).
    pub fn path(&self, a: VertexId, b: VertexId) -> (Vec<VertexId>, Vec<EdgeId>) {
        let (mut x, mut y) = (a, b);
        let mut up_a: Vec<(VertexId, EdgeId)> = Vec::new();
        let mut up_b: Vec<(VertexId, EdgeId)> = Vec::new();
        while self.depth[x] > self.depth[y] {
            let (p, e) = self.parent[x].unwrap();
            up_a.push((x, e));
            x = p;
        }
        while self.depth[y] > self.depth[x] {
            let (p, e) = self.parent[y].unwrap();
            up_b.push((y, e));
            y = p;
        }
        while x != y {
            let (px, ex) = self.parent[x].unwrap();
            let (py, ey) = self.parent[y].unwrap();
            up_a.push((x, ex));
            up_b.push((y, ey));
            x = px;
            y = py;
        }
        // a .. meet .. b
        let mut verts = Vec::with_capacity(up_a.len() + up_b.len() + 1);
        let mut edges = Vec::with_capacity(up_a.len() + up_b.len());
        for &(v, e) in &up_a {
            verts.push(v);
            edges.push(e);
        }
        verts.push(x);
        for &(v, e) in up_b.iter().rev() {
            edges.push(e);
            verts.push(v);
        }
        (verts, edges)
    }
}

/// Spanning tree plus one extra edge closing a unique odd cycle.
#[derive(Debug, Clone)]
pub struct OddOneTree {
    pub tree: BfsTree,
    /// the non-tree edge whose fundamental cycle is odd
    pub extra: EdgeId,
    /// that odd cycle, as a closed walk starting at extra's first endpoint
    pub odd_cycle: Walk,
}

impl EmbeddedGraph {
    /// BFS spanning tree from vertex 0; edges scanned in ascending id order.
    pub fn bfs_tree(&self) -> Result<BfsTree, Error> {
        if self.n() == 0 || !self.is_connected() {
            return Err(Error::Usage("spanning tree requires a nonempty connected graph".into()));
        }
        let adj = self.adjacency();
        let n = self.n();
        let mut parent = vec![None; n];
        let mut depth = vec![0usize; n];
        let mut sig_parity = vec![false; n];
        let mut tree_edge = vec![false; self.m()];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, e));
                    depth[w] = depth[v] + 1;
                    sig_parity[w] = sig_parity[v] ^ self.edges[e].sig;
                    tree_edge[e] = true;
                    queue.push_back(w);
                }
            }
        }
        Ok(BfsTree { root: 0, parent, depth, tree_edge, sig_parity })
    }

    /// Fundamental closed walk of non-tree edge e: e followed by the tree
    /// path back. Starts at e.u.
    pub fn fundamental_cycle(&self, tree: &BfsTree, e: EdgeId) -> Walk {
        assert!(!tree.tree_edge[e]);
        let ed = &self.edges[e];
        let (pverts, pedges) = tree.path(ed.v, ed.u);
        let mut verts = vec![ed.u];
        verts.extend_from_slice(&pverts);
        let mut edges = vec![e];
        edges.extend_from_slice(&pedges);
        Walk::raw(verts, edges)
    }

    /// Checks that every odd closed walk is 1-sided. Length parity and
    /// signature parity are both linear over the cycle space, so on a
    /// non-bipartite graph the condition holds iff parity equals signature
    /// on every fundamental cycle; on a bipartite graph it holds vacuously.
    /// The one-directional basis check "odd implies 1-sided" would NOT be
    /// exhaustive: an even 1-sided basis cycle composed with an odd 1-sided
    /// one is an odd 2-sided closed walk. Returns such a walk on failure.
    pub fn parity_witness(&self) -> Result<Option<Walk>, Error> {
        let tree = self.bfs_tree()?;
        let mut even_one_sided: Option<EdgeId> = None;
        let mut odd_cycle: Option<EdgeId> = None;
        for (e, ed) in self.edges.iter().enumerate() {
            if tree.tree_edge[e] {
                continue;
            }
            let len_odd = (tree.depth[ed.u] + tree.depth[ed.v] + 1) % 2 == 1;
            let sig_odd = tree.sig_parity[ed.u] ^ tree.sig_parity[ed.v] ^ ed.sig;
            if len_odd && !sig_odd {
                return Ok(Some(self.fundamental_cycle(&tree, e)));
            }
            if !len_odd && sig_odd && even_one_sided.is_none() {
                even_one_sided = Some(e);
            }
            if len_odd && odd_cycle.is_none() {
                odd_cycle = Some(e);
            }
        }
        match (even_one_sided, odd_cycle) {
            (Some(a), Some(b)) => Ok(Some(self.composed_cycles(&tree, a, b))),
            _ => Ok(None),
        }
    }

    /// Closed walk traversing both fundamental cycles, joined by a tree path
    /// walked in both directions (which cancels mod 2 in length and
    /// signature). Used to exhibit parity violations that no single
    /// fundamental cycle shows.
    fn composed_cycles(&self, tree: &BfsTree, a: EdgeId, b: EdgeId) -> Walk {
        let ca = self.fundamental_cycle(tree, a);
        let cb = self.fundamental_cycle(tree, b);
        let (pv, pe) = tree.path(ca.start(), cb.start());
        let mut verts = ca.verts().to_vec();
        let mut edges = ca.edges().to_vec();
        verts.extend_from_slice(&pv[1..]);
        edges.extend_from_slice(&pe);
        verts.extend_from_slice(&cb.verts()[1..]);
        edges.extend_from_slice(cb.edges());
        let (rv, re) = tree.path(cb.start(), ca.start());
        verts.extend_from_slice(&rv[1..]);
        edges.extend_from_slice(&re);
        Walk::raw(verts, edges)
    }

    pub fn is_parity_consistent(&self) -> Result<bool, Error> {
        Ok(self.parity_witness()?.is_none())
    }

    /// Switches the local orientation at every vertex of `s`: incident
    /// signature bits flip (per endpoint) and the rotation reverses.
    /// Sidedness of every closed walk is unchanged.
    pub fn switch_local_orientations(&self, s: &[VertexId]) -> EmbeddedGraph {
        let mut flip = vec![false; self.n()];
        for &v in s {
            assert!(v < self.n(), "switch set names unknown vertex {v}");
            flip[v] = true;
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { sig: e.sig ^ flip[e.u] ^ flip[e.v], ..*e })
            .collect();
        let rot = self
            .rot
            .iter()
            .enumerate()
            .map(|(v, r)| {
                if flip[v] {
                    r.iter().rev().copied().collect()
                } else {
                    r.clone()
                }
            })
            .collect();
        EmbeddedGraph { edges, rot, ..self.clone() }
    }

    /// Switches so that the signature becomes the whole edge set. Requires a
    /// connected, non-bipartite, parity-consistent input. Returns the
    /// switched graph and the switching set.
    pub fn normalize_signature_to_all(&self) -> Result<(EmbeddedGraph, Vec<VertexId>), Error> {
        let tree = self.bfs_tree()?;
        if self.is_bipartite() {
            return Err(Error::Usage(
                "signature normalization needs a non-bipartite graph".into(),
            ));
        }
        // switch bit: depth parity xor signature parity of the tree path;
        // every tree edge then lands in the signature
        let s: Vec<bool> = (0..self.n())
            .map(|v| (tree.depth[v] % 2 == 1) ^ tree.sig_parity[v])
            .collect();
        for (e, ed) in self.edges.iter().enumerate() {
            if tree.tree_edge[e] {
                continue;
            }
            if !(ed.sig ^ s[ed.u] ^ s[ed.v]) {
                let cycle = self.fundamental_cycle(&tree, e);
                return Err(Error::Parity {
                    msg: "embedding is not parity-consistent; an odd closed walk is 2-sided or an even one is 1-sided".into(),
                    witness: cycle.edges().to_vec(),
                });
            }
        }
        let set: Vec<VertexId> = (0..self.n()).filter(|&v| s[v]).collect();
        let out = self.switch_local_orientations(&set);
        debug_assert!(out.edges.iter().all(|e| e.sig));
        Ok((out, set))
    }

    /// BFS spanning tree plus the lowest-id non-tree edge closing an odd
    /// cycle. Fails on bipartite input.
    pub fn spanning_odd_one_tree(&self) -> Result<OddOneTree, Error> {
        let tree = self.bfs_tree()?;
        let extra = (0..self.m())
            .find(|&e| {
                !tree.tree_edge[e] && {
                    let ed = &self.edges[e];
                    // BFS: non-tree endpoints differ in depth by at most 1,
                    // so equal parity means equal depth and an odd cycle
                    tree.depth[ed.u] % 2 == tree.depth[ed.v] % 2
                }
            })
            .ok_or_else(|| Error::Usage("bipartite graph has no odd 1-tree".into()))?;
        let odd_cycle = self.fundamental_cycle(&tree, extra);
        debug_assert_eq!(odd_cycle.len() % 2, 1);
        Ok(OddOneTree { tree, extra, odd_cycle })
    }
}

impl OddOneTree {
    fn check_query_edge(&self, g: &EmbeddedGraph, e: EdgeId) -> Result<(), Error> {
        if e >= g.m() {
            return Err(Error::Usage(format!("unknown edge {e}")));
        }
        if self.tree.tree_edge[e] {
            return Err(Error::Usage(format!(
                "edge {e} is a tree edge; closed-walk queries need a non-tree edge"
            )));
        }
        Ok(())
    }

    /// Base closed walk through non-tree edge e: e plus the tree path back.
    fn base_walk(&self, g: &EmbeddedGraph, e: EdgeId) -> Walk {
        g.fundamental_cycle(&self.tree, e)
    }

    /// Appends one lap of the odd cycle, reached from the walk's endpoint by
    /// the nearest tree connection; flips the length parity.
    fn with_lap(&self, g: &EmbeddedGraph, base: Walk) -> Walk {
        let anchor = base.start();
        // nearest odd-cycle vertex from the anchor through tree edges
        let on_cycle: std::collections::HashSet<VertexId> =
            self.odd_cycle.verts().iter().copied().collect();
        let adj = g.adjacency();
        let mut prev: Vec<Option<(VertexId, EdgeId)>> = vec![None; g.n()];
        let mut seen = vec![false; g.n()];
        seen[anchor] = true;
        let mut queue = std::collections::VecDeque::from([anchor]);
        let mut z = None;
        if on_cycle.contains(&anchor) {
            z = Some(anchor);
        }
        while z.is_none() {
            let v = queue.pop_front().expect("tree connects the odd cycle");
            for &(e, w) in &adj[v] {
                if self.tree.tree_edge[e] && !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, e));
                    if on_cycle.contains(&w) {
                        z = Some(w);
                        break;
                    }
                    queue.push_back(w);
                }
            }
        }
        let z = z.unwrap();
        let mut down_verts = Vec::new(); // z -> anchor
        let mut down_edges = Vec::new();
        let mut cur = z;
        while let Some((p, e)) = prev[cur] {
            down_verts.push(cur);
            down_edges.push(e);
            cur = p;
        }
        let k = self
            .odd_cycle
            .verts()
            .iter()
            .position(|&v| v == z)
            .expect("anchor target lies on the odd cycle");
        let lap = self.odd_cycle.rotated(k);
        debug_assert_eq!(lap.start(), z);

        let mut verts = base.verts().to_vec();
        let mut edges = base.edges().to_vec();
        // anchor -> z
        for (&v, &e) in down_verts.iter().rev().zip(down_edges.iter().rev()) {
            edges.push(e);
            verts.push(v);
        }
        // one lap around the odd cycle
        edges.extend_from_slice(lap.edges());
        verts.extend_from_slice(&lap.verts()[1..]);
        // walk back down the same connection, z -> anchor
        let mut cur = z;
        let mut back_edges = Vec::new();
        let mut back_verts = Vec::new();
        while let Some((p, e)) = prev[cur] {
            back_edges.push(e);
            back_verts.push(p);
            cur = p;
        }
        edges.extend(back_edges);
        verts.extend(back_verts);
        debug_assert_eq!(*verts.last().unwrap(), anchor);
        Walk::raw(verts, edges)
    }

    /// Even closed walk through non-tree edge e, using e exactly once.
    pub fn even_closed_walk(&self, g: &EmbeddedGraph, e: EdgeId) -> Result<Walk, Error> {
        self.check_query_edge(g, e)?;
        if e == self.extra {
            // every closed walk in the 1-tree using this edge once has odd
            // length (its edge multiplicities lie in the cycle class of the
            // unique odd cycle)
            return Err(Error::Usage(
                "no even closed walk through the odd 1-tree's extra edge uses it exactly once"
                    .into(),
            ));
        }
        let base = self.base_walk(g, e);
        let w = if base.len() % 2 == 0 { base } else { self.with_lap(g, base) };
        debug_assert_eq!(w.len() % 2, 0);
        debug_assert_eq!(w.multiplicity(e), 1);
        Ok(w)
    }

    /// Odd closed walk through non-tree edge e, using e exactly once.
    pub fn odd_closed_walk(&self, g: &EmbeddedGraph, e: EdgeId) -> Result<Walk, Error> {
        self.check_query_edge(g, e)?;
        if e == self.extra {
            return Ok(self.odd_cycle.clone());
        }
        let base = self.base_walk(g, e);
        let w = if base.len() % 2 == 1 { base } else { self.with_lap(g, base) };
        debug_assert_eq!(w.len() % 2, 1);
        debug_assert_eq!(w.multiplicity(e), 1);
        Ok(w)
    }
}

// --- induced subembeddings ------------------------------------------------

impl EmbeddedGraph {
    /// Induced subembedding on `keep`: rotations are restricted (cyclic order
    /// preserved), labels carried over, ids recompacted in ascending order.
    pub fn induced_subembedding(&self, keep: &[VertexId]) -> Result<EmbeddedGraph, Error> {
        let mut mask = vec![false; self.n()];
        for &v in keep {
            if v >= self.n() {
                return Err(Error::Usage(format!("unknown vertex {v} in induced subembedding")));
            }
            mask[v] = true;
        }
        let kept: Vec<VertexId> = (0..self.n()).filter(|&v| mask[v]).collect();
        let mut vmap = vec![usize::MAX; self.n()];
        for (new, &old) in kept.iter().enumerate() {
            vmap[old] = new;
        }
        let mut emap = vec![usize::MAX; self.m()];
        let mut edges = Vec::new();
        let mut elabels = Vec::new();
        for (e, ed) in self.edges.iter().enumerate() {
            if mask[ed.u] && mask[ed.v] {
                emap[e] = edges.len();
                edges.push(Edge { u: vmap[ed.u], v: vmap[ed.v], sig: ed.sig });
                elabels.push(self.elabels[e]);
            }
        }
        let rot = kept
            .iter()
            .map(|&old| {
                self.rot[old]
                    .iter()
                    .filter(|&&e| emap[e] != usize::MAX)
                    .map(|&e| emap[e])
                    .collect()
            })
            .collect();
        let weights = kept.iter().map(|&v| self.weights[v].clone()).collect();
        let vlabels = kept.iter().map(|&v| self.vlabels[v]).collect();
        Ok(EmbeddedGraph { weights, edges, rot, vlabels, elabels })
    }
}
