//! Dual digraph with the alternating orientation, even-walk selection, and
//! the homology map omega.

use std::collections::VecDeque;

use num::{BigInt, Integer, One, Zero};

use crate::embedding::{EdgeId, EmbeddedGraph, Faces, Walk};
use crate::error::Error;
use crate::preprocess::StandardInstance;

pub type FaceId = usize;

/// The dual of the embedding, with every edge oriented between its two
/// sides. Dual vertices are the faces of the primal graph; arc `e` runs from
/// `tail[e]` to `head[e]`.
#[derive(Debug, Clone)]
pub struct DualDigraph {
    pub faces: Faces,
    pub face_count: usize,
    /// per edge: the face whose side of the edge got the "leave" label
    pub tail: Vec<FaceId>,
    pub head: Vec<FaceId>,
    /// per edge: which of its two slots carries the "leave" label (0 or 1)
    pub leave_slot: Vec<u8>,
}

impl DualDigraph {
    pub fn m(&self) -> usize {
        self.tail.len()
    }

    /// Net flow into each dual vertex under edge values `y`.
    pub fn flux(&self, y: &[BigInt]) -> Vec<BigInt> {
        let mut f = vec![BigInt::zero(); self.face_count];
        for e in 0..self.tail.len() {
            f[self.head[e]] += &y[e];
            f[self.tail[e]] -= &y[e];
        }
        f
    }

    pub fn is_circulation(&self, y: &[BigInt]) -> bool {
        y.len() == self.m() && self.flux(y).iter().all(Zero::is_zero)
    }

    /// True iff slot `s` is the leaving side of its edge.
    fn slot_leaves(&self, s: usize) -> bool {
        let e = self.faces.slot_edge[s];
        self.faces.edge_slots[e][self.leave_slot[e] as usize] == s
    }
}

/// Orient every edge of the dual so that around each face the arcs strictly
/// alternate between leaving and entering.
pub fn alternating_orientation(si: &StandardInstance) -> Result<DualDigraph, Error> {
    orient(si.graph())
}

/// Worker on a bare embedding. Feasibility needs the standard assumptions;
/// on other inputs the 2-coloring conflict surfaces as a structure error.
pub(crate) fn orient(g: &EmbeddedGraph) -> Result<DualDigraph, Error> {
    let faces = g.trace_faces()?;
    let nslots = faces.slot_edge.len();

    // Constraint graph on edge sides: consecutive sides along a facial walk
    // must differ, and the two sides of one edge must differ. Any solution
    // is exactly a 2-coloring.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nslots];
    for slots in &faces.face_slots {
        let k = slots.len();
        for i in 0..k {
            let (a, b) = (slots[i], slots[(i + 1) % k]);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for pair in &faces.edge_slots {
        adj[pair[0]].push(pair[1]);
        adj[pair[1]].push(pair[0]);
    }

    let mut color: Vec<i8> = vec![-1; nslots];
    let mut parent: Vec<usize> = vec![usize::MAX; nslots];
    for s0 in 0..nslots {
        if color[s0] >= 0 {
            continue;
        }
        // components are rooted with "leave" so the result is deterministic
        color[s0] = 1;
        let mut queue = VecDeque::from([s0]);
        while let Some(s) = queue.pop_front() {
            for &t in &adj[s] {
                if color[t] < 0 {
                    color[t] = 1 - color[s];
                    parent[t] = s;
                    queue.push_back(t);
                } else if color[t] == color[s] {
                    return Err(side_conflict(&faces, &parent, s, t));
                }
            }
        }
    }

    let m = g.m();
    let mut tail = vec![0; m];
    let mut head = vec![0; m];
    let mut leave_slot = vec![0u8; m];
    for e in 0..m {
        let [s0, s1] = faces.edge_slots[e];
        let (ls, hs, which) = if color[s0] == 1 { (s0, s1, 0u8) } else { (s1, s0, 1u8) };
        tail[e] = faces.slot_face[ls];
        head[e] = faces.slot_face[hs];
        leave_slot[e] = which;
    }
    let d = DualDigraph { face_count: faces.count(), faces, tail, head, leave_slot };
    check_alternation(&d)?;
    Ok(d)
}

/// The coloring enforces alternation; re-check it end to end anyway.
fn check_alternation(d: &DualDigraph) -> Result<(), Error> {
    for slots in &d.faces.face_slots {
        let k = slots.len();
        for i in 0..k {
            if d.slot_leaves(slots[i]) == d.slot_leaves(slots[(i + 1) % k]) {
                return Err(Error::Internal(
                    "orientation is not alternating around a face".into(),
                ));
            }
        }
    }
    Ok(())
}

fn side_conflict(faces: &Faces, parent: &[usize], s: usize, t: usize) -> Error {
    let climb = |mut x: usize| {
        let mut p = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            p.push(x);
        }
        p
    };
    let (pa, pb) = (climb(s), climb(t));
    // strip the shared tail, keeping the meet point once
    let (mut i, mut j) = (pa.len(), pb.len());
    while i > 1 && j > 1 && pa[i - 2] == pb[j - 2] {
        i -= 1;
        j -= 1;
    }
    let mut cycle: Vec<usize> = pa[..i].to_vec();
    cycle.extend(pb[..j.saturating_sub(1)].iter().rev());
    let mut edges: Vec<EdgeId> = cycle.iter().map(|&s| faces.slot_edge[s]).collect();
    edges.sort_unstable();
    edges.dedup();
    Error::Structure(format!(
        "no alternating orientation exists: the edge-side constraints contain \
         an odd cycle through edges {edges:?}; the embedding violates the \
         standard assumptions"
    ))
}

/// One circulation per dual face. Dual faces correspond to primal vertex
/// stars, and under the alternating orientation every arc of a star is
/// crossed the same way, so the canonical traversal (lowest dart first)
/// yields the plain 0/1 indicator of delta(v).
pub fn facial_circulations(g: &EmbeddedGraph, d: &DualDigraph) -> Vec<Vec<BigInt>> {
    let mut out = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let mut y = vec![BigInt::zero(); g.m()];
        for &e in g.rotation(v) {
            y[e] = BigInt::one();
        }
        assert!(
            d.is_circulation(&y),
            "facial circulation at vertex {v} does not conserve flow"
        );
        out.push(y);
    }
    out
}

/// Homology class: a parity bit plus an integer vector of length g-1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomologyVector {
    pub parity: bool,
    pub free: Vec<BigInt>,
}

impl HomologyVector {
    pub fn zero(k: usize) -> Self {
        HomologyVector { parity: false, free: vec![BigInt::zero(); k] }
    }

    /// The class of the all-ones vector, (1, 0).
    pub fn all_ones_class(k: usize) -> Self {
        HomologyVector { parity: true, free: vec![BigInt::zero(); k] }
    }

    pub fn plus(&self, o: &HomologyVector) -> Self {
        assert_eq!(self.free.len(), o.free.len(), "mixed homology lengths");
        HomologyVector {
            parity: self.parity ^ o.parity,
            free: self.free.iter().zip(&o.free).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        !self.parity && self.free.iter().all(Zero::is_zero)
    }
}

/// Signed incidence row of a walk: coefficient of each edge in the
/// alternating sum, stored sparsely.
fn signed_row(w: &Walk, m: usize) -> Vec<(EdgeId, i64)> {
    let mut dense = vec![0i64; m];
    for (i, &e) in w.edges().iter().enumerate() {
        dense[e] += if i % 2 == 0 { 1 } else { -1 };
    }
    (0..m).filter(|&e| dense[e] != 0).map(|e| (e, dense[e])).collect()
}

fn row_value(row: &[(EdgeId, i64)], y: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for &(e, s) in row {
        acc += s * &y[e];
    }
    acc
}

/// The orientation together with the odd cycle and selected even walks,
/// ready for homology evaluation.
#[derive(Debug, Clone)]
pub struct DualRepresentation {
    pub dual: DualDigraph,
    pub odd_cycle: Walk,
    pub even_walks: Vec<Walk>,
    pub genus: usize,
    m: usize,
    row_c: Vec<(EdgeId, i64)>,
    rows_w: Vec<Vec<(EdgeId, i64)>>,
    /// per edge, the class of the unit vector on that edge
    arc_class: Vec<(bool, Vec<i64>)>,
}

impl DualRepresentation {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Length of the free part of a class, g-1.
    pub fn free_len(&self) -> usize {
        self.rows_w.len()
    }

    /// Exact and linear; the first coordinate is linear mod 2.
    pub fn omega(&self, y: &[BigInt]) -> HomologyVector {
        assert_eq!(y.len(), self.m, "edge vector length mismatch");
        HomologyVector {
            parity: row_value(&self.row_c, y).is_odd(),
            free: self.rows_w.iter().map(|r| row_value(r, y)).collect(),
        }
    }

    /// Class of the unit vector on edge `e` (the increment when one more
    /// unit crosses that arc).
    pub fn arc_class(&self, e: EdgeId) -> HomologyVector {
        let (parity, ref free) = self.arc_class[e];
        HomologyVector { parity, free: free.iter().map(|&c| BigInt::from(c)).collect() }
    }

    pub(crate) fn arc_class_raw(&self, e: EdgeId) -> (bool, &[i64]) {
        let (parity, ref free) = self.arc_class[e];
        (parity, free)
    }

    /// Absolute coefficient sum of each free row: a hard bound on how far
    /// any single arc-simple flow can move a free coordinate.
    pub fn free_l1(&self) -> Vec<i64> {
        self.rows_w
            .iter()
            .map(|r| r.iter().map(|&(_, s)| s.abs()).sum::<i64>().max(1))
            .collect()
    }

    /// True iff the two integer circulations lie in the same homology class.
    pub fn is_homologous(&self, y1: &[BigInt], y2: &[BigInt]) -> Result<bool, Error> {
        for (name, y) in [("first", y1), ("second", y2)] {
            if !self.dual.is_circulation(y) {
                return Err(Error::Usage(format!(
                    "homology comparison expects circulations; the {name} \
                     vector does not conserve flow at every face"
                )));
            }
        }
        Ok(self.omega(y1) == self.omega(y2))
    }
}

/// Fundamental circulations of a spanning tree of the dual: one per
/// non-tree arc, the unit flow around its fundamental cycle. They form a
/// basis of the circulation space.
pub(crate) fn dual_fundamental_circulations(d: &DualDigraph) -> Vec<Vec<BigInt>> {
    let m = d.m();
    let mut nbr: Vec<Vec<(FaceId, EdgeId)>> = vec![Vec::new(); d.face_count];
    for e in 0..m {
        nbr[d.tail[e]].push((d.head[e], e));
        nbr[d.head[e]].push((d.tail[e], e));
    }
    let mut par: Vec<Option<(FaceId, EdgeId)>> = vec![None; d.face_count];
    let mut depth = vec![0usize; d.face_count];
    let mut seen = vec![false; d.face_count];
    let mut tree_arc = vec![false; m];
    for root in 0..d.face_count {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(f) = queue.pop_front() {
            for &(to, e) in &nbr[f] {
                if !seen[to] {
                    seen[to] = true;
                    par[to] = Some((f, e));
                    depth[to] = depth[f] + 1;
                    tree_arc[e] = true;
                    queue.push_back(to);
                }
            }
        }
    }

    let mut out = Vec::new();
    for e in 0..m {
        if tree_arc[e] {
            continue;
        }
        let mut y = vec![BigInt::zero(); m];
        y[e] = BigInt::one();
        // close the cycle: walk the tree from head[e] back to tail[e],
        // adding +1 when a tree arc is crossed with its orientation and -1
        // against it
        let (mut a, mut b) = (d.head[e], d.tail[e]);
        while a != b {
            if depth[a] >= depth[b] {
                let (p, t) = par[a].expect("tree path left its component");
                y[t] += if d.tail[t] == a { 1 } else { -1 };
                a = p;
            } else {
                let (p, t) = par[b].expect("tree path left its component");
                // traversed from parent down to b on the way tail -> head
                y[t] += if d.head[t] == b { 1 } else { -1 };
                b = p;
            }
        }
        debug_assert!(d.is_circulation(&y));
        out.push(y);
    }
    out
}

/// Greedy fraction-free elimination: returns the indices of the first rows
/// that are linearly independent, stopping after `want` of them (pass
/// usize::MAX for a full rank computation).
pub(crate) fn independent_rows(rows: &[Vec<BigInt>], want: usize) -> Vec<usize> {
    let mut pivots: Vec<(usize, Vec<BigInt>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if chosen.len() >= want {
            break;
        }
        let mut r = row.clone();
        for (col, p) in &pivots {
            if r[*col].is_zero() {
                continue;
            }
            let (pv, rv) = (p[*col].clone(), r[*col].clone());
            for k in 0..r.len() {
                r[k] = &r[k] * &pv - &p[k] * &rv;
            }
        }
        if let Some(col) = r.iter().position(|x| !x.is_zero()) {
            let g = r.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if !g.is_one() {
                for x in &mut r {
                    *x = &*x / &g;
                }
            }
            pivots.push((col, r));
            chosen.push(i);
        }
    }
    chosen
}

/// Pick g-1 even closed walks whose omega rows are independent on the
/// circulation space. Candidates are the even fundamental walks of the odd
/// 1-tree, shortest first.
pub fn select_even_walks(si: &StandardInstance, d: &DualDigraph) -> Result<Vec<Walk>, Error> {
    let g = si.graph();
    let genus = si.genus();
    if genus <= 1 {
        return Ok(Vec::new());
    }
    let t = g.spanning_odd_one_tree()?;
    let mut cands: Vec<(Walk, EdgeId)> = Vec::new();
    for e in 0..g.m() {
        if t.tree.tree_edge[e] || e == t.extra {
            continue;
        }
        cands.push((t.even_closed_walk(g, e)?, e));
    }
    cands.sort_by_key(|(w, e)| (w.len(), *e));

    let basis = dual_fundamental_circulations(d);
    let rows: Vec<Vec<BigInt>> = cands
        .iter()
        .map(|(w, _)| {
            let row = signed_row(w, g.m());
            basis.iter().map(|z| row_value(&row, z)).collect()
        })
        .collect();
    let chosen = independent_rows(&rows, genus - 1);
    if chosen.len() != genus - 1 {
        return Err(Error::Internal(format!(
            "even walk selection found only {} independent walks but the \
             embedding has genus {genus}; genus accounting is inconsistent",
            chosen.len()
        )));
    }
    Ok(chosen.into_iter().map(|i| cands[i].0.clone()).collect())
}

/// Build the full dual representation: orientation, odd cycle, selected even
/// walks, and cached incidence rows.
pub fn dual_representation(si: &StandardInstance) -> Result<DualRepresentation, Error> {
    let g = si.graph();
    let dual = alternating_orientation(si)?;
    let t = g.spanning_odd_one_tree()?;
    let even_walks = select_even_walks(si, &dual)?;

    let m = g.m();
    let row_c = signed_row(&t.odd_cycle, m);
    let rows_w: Vec<_> = even_walks.iter().map(|w| signed_row(w, m)).collect();
    let mut arc_class = vec![(false, vec![0i64; rows_w.len()]); m];
    for &(e, s) in &row_c {
        arc_class[e].0 = s % 2 != 0;
    }
    for (j, row) in rows_w.iter().enumerate() {
        for &(e, s) in row {
            arc_class[e].1[j] = s;
        }
    }

    let rep = DualRepresentation {
        dual,
        odd_cycle: t.odd_cycle,
        even_walks,
        genus: si.genus(),
        m,
        row_c,
        rows_w,
        arc_class,
    };

    // construction-time guards: omega must vanish on every facial
    // circulation, and the all-ones vector must land in class (1, 0)
    for y in facial_circulations(g, &rep.dual) {
        if !rep.omega(&y).is_zero() {
            return Err(Error::Internal(
                "omega does not vanish on a facial circulation".into(),
            ));
        }
    }
    let ones = vec![BigInt::one(); m];
    if rep.omega(&ones) != HomologyVector::all_ones_class(rep.free_len()) {
        return Err(Error::Internal(
            "the all-ones vector is not in homology class (1, 0)".into(),
        ));
    }
    Ok(rep)
}
