//! Reduction of an arbitrary branch instance to standard-form subinstances:
//! half-integral persistency fixing, edge-induced cost extraction, direct
//! bipartite solves, and a block-cut dynamic program. A recombination plan
//! records every reduction step so the assembled answer can be replayed.

use std::collections::{HashMap, HashSet};

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::blockcut::{block_decomposition, BlockDecomposition};
use crate::embedding::{EmbeddedGraph, VertexId};
use crate::error::Error;
use crate::rational::{denominator_lcm, scale_to_integers, Q};
use crate::maxflow::FlowNetwork;
use crate::transversal::bipartite_coloring;

/// Doubled bipartite network shared by the persistency reduction and the
/// cost extraction: primed copy 2v feeds from the source, double-primed
/// copy 2v+1 drains to the sink, and each edge uv contributes the two
/// crossing arcs (2u, 2v+1) and (2v, 2u+1).
struct Doubling {
    net: FlowNetwork,
    src: usize,
    snk: usize,
    // per edge: (arc from u side, arc from v side)
    earcs: Vec<(usize, usize)>,
    scale: BigInt,
    total: BigInt,
}

fn doubling(g: &EmbeddedGraph) -> Doubling {
    let n = g.n();
    let scale = denominator_lcm(g.weights().iter());
    let w = scale_to_integers(g.weights(), &scale);
    let total: BigInt = w.iter().sum();
    let inf = &total + BigInt::one();
    let mut net = FlowNetwork::new(2 * n + 2);
    let (src, snk) = (2 * n, 2 * n + 1);
    for v in 0..n {
        net.add_edge(src, 2 * v, w[v].clone());
        net.add_edge(2 * v + 1, snk, w[v].clone());
    }
    let mut earcs = Vec::with_capacity(g.m());
    for e in g.edge_list() {
        let a = net.add_edge(2 * e.u, 2 * e.v + 1, inf.clone());
        let b = net.add_edge(2 * e.v, 2 * e.u + 1, inf.clone());
        earcs.push((a, b));
    }
    Doubling { net, src, snk, earcs, scale, total }
}

/// Outcome of one persistency pass: vertices fixed out (x*=0), fixed in
/// (x*=1), and the residual instance where the optimal relaxation value
/// sits at one half everywhere.
#[derive(Debug)]
pub struct NtReduction {
    pub v0: Vec<VertexId>,
    pub v1: Vec<VertexId>,
    pub half: Vec<VertexId>,
    pub residual: EmbeddedGraph,
}

/// Solves the vertex relaxation max{wx : x_u + x_v <= 1, x in [0,1]} at a
/// half-integral extreme point via the doubled bipartite network, and fixes
/// the integral part. Some optimum stable set contains v1 and avoids v0.
pub fn nemhauser_trotter(g: &EmbeddedGraph) -> Result<NtReduction, Error> {
    if g.weights().iter().any(|w| w.is_negative()) {
        return Err(Error::Usage(
            "persistency reduction expects negative weights to be deleted first".into(),
        ));
    }
    let mut d = doubling(g);
    d.net.max_flow(d.src, d.snk);
    let reach = d.net.residual_reachable(d.src);
    let (mut v0, mut v1, mut half) = (Vec::new(), Vec::new(), Vec::new());
    for v in 0..g.n() {
        // stable-set side of the minimum vertex cover of the doubling
        let in1 = reach[2 * v];
        let in2 = !reach[2 * v + 1];
        match (in1, in2) {
            (true, true) => v1.push(v),
            (false, false) => v0.push(v),
            _ => half.push(v),
        }
    }
    let residual = g.induced_subembedding(&half)?;
    // x* feasibility: a fixed-in vertex can neighbor neither a fixed-in
    // nor a half vertex
    for e in g.edge_list() {
        let a = v1.contains(&e.u);
        let b = v1.contains(&e.v);
        if a && b || a && half.contains(&e.v) || b && half.contains(&e.u) {
            return Err(Error::Internal(
                "persistency pass produced an infeasible relaxation point".into(),
            ));
        }
    }
    Ok(NtReduction { v0, v1, half, residual })
}

/// Nonnegative edge costs whose vertex sums reproduce the weights exactly,
/// i.e. a conic combination of the edge constraint rows. Exists iff the
/// all-half point is optimal for the relaxation, so it always succeeds on
/// the residual of a persistency pass.
pub fn edge_induced_costs(g: &EmbeddedGraph) -> Result<Vec<Q>, Error> {
    if g.weights().iter().any(|w| w.is_negative()) {
        return Err(Error::Infeasible(
            "negative vertex weight cannot be a nonnegative edge combination".into(),
        ));
    }
    let mut d = doubling(g);
    let flow = d.net.max_flow(d.src, d.snk);
    if flow != d.total {
        return Err(Error::Infeasible(
            "vertex weights admit no nonnegative edge-induced costs".into(),
        ));
    }
    let two_scale = BigInt::from(2) * &d.scale;
    let c: Vec<Q> = d
        .earcs
        .iter()
        .map(|&(a, b)| Q::new(d.net.flow_on(a) + d.net.flow_on(b), two_scale.clone()))
        .collect();
    // exact postcondition check: row sums reproduce w
    for v in 0..g.n() {
        let sum: Q = g
            .edge_list()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.touches(v))
            .map(|(i, _)| c[i].clone())
            .sum();
        if &sum != g.weight(v) {
            return Err(Error::Internal(format!(
                "edge cost extraction failed to match the weight at vertex {v}"
            )));
        }
    }
    Ok(c)
}

/// Exact optimum on a bipartite instance with nonnegative weights, via the
/// minimum vertex cover network.
pub fn bipartite_mwss(g: &EmbeddedGraph) -> Result<(Q, Vec<VertexId>), Error> {
    if g.weights().iter().any(|w| w.is_negative()) {
        return Err(Error::Usage("bipartite solver expects nonnegative weights".into()));
    }
    let n = g.n();
    if n == 0 {
        return Ok((Q::zero(), Vec::new()));
    }
    let adj: Vec<Vec<usize>> = g
        .adjacency()
        .into_iter()
        .map(|row| row.into_iter().map(|(_, w)| w).collect())
        .collect();
    let color = bipartite_coloring(n, &adj, &vec![true; n])
        .ok_or_else(|| Error::Usage("bipartite solver called on a non-bipartite graph".into()))?;
    let scale = denominator_lcm(g.weights().iter());
    let w = scale_to_integers(g.weights(), &scale);
    let total: BigInt = w.iter().sum();
    let inf = &total + BigInt::one();
    let mut net = FlowNetwork::new(n + 2);
    let (src, snk) = (n, n + 1);
    for v in 0..n {
        if color[v] {
            net.add_edge(v, snk, w[v].clone());
        } else {
            net.add_edge(src, v, w[v].clone());
        }
    }
    for e in g.edge_list() {
        let (a, b) = if color[e.u] { (e.v, e.u) } else { (e.u, e.v) };
        net.add_edge(a, b, inf.clone());
    }
    let flow = net.max_flow(src, snk);
    let reach = net.residual_reachable(src);
    let set: Vec<VertexId> = (0..n)
        .filter(|&v| if color[v] { !reach[v] } else { reach[v] })
        .collect();
    let weight: Q = set.iter().map(|&v| g.weight(v).clone()).sum();
    // complement is a vertex cover of matching weight
    if weight != Q::new(total - flow, scale) {
        return Err(Error::Internal("vertex cover duality mismatch in bipartite solve".into()));
    }
    for e in g.edge_list() {
        if set.contains(&e.u) && set.contains(&e.v) {
            return Err(Error::Internal("bipartite solve produced an unstable set".into()));
        }
    }
    Ok((weight, set))
}

/// A 2-connected, non-bipartite, parity-consistent instance together with
/// exact nonnegative edge costs realizing its weights and its genus. All of
/// that is re-verified on construction.
#[derive(Debug, Clone)]
pub struct StandardInstance {
    g: EmbeddedGraph,
    c: Vec<Q>,
    genus: usize,
}

impl StandardInstance {
    pub fn new(g: EmbeddedGraph) -> Result<Self, Error> {
        let decomp = block_decomposition(&g)
            .map_err(|e| Error::Internal(format!("standard instance must be connected: {e}")))?;
        if decomp.blocks.len() != 1 {
            return Err(Error::Internal("standard instance must be 2-connected".into()));
        }
        if g.is_bipartite() {
            return Err(Error::Internal("standard instance must be non-bipartite".into()));
        }
        if !g.is_parity_consistent()? {
            return Err(Error::Internal(
                "standard instance has a 2-sided odd closed walk; transversal stage failed".into(),
            ));
        }
        let c = edge_induced_costs(&g)?;
        let genus = g.euler_genus()?;
        Ok(StandardInstance { g, c, genus })
    }

    pub fn graph(&self) -> &EmbeddedGraph {
        &self.g
    }

    pub fn costs(&self) -> &[Q] {
        &self.c
    }

    pub fn genus(&self) -> usize {
        self.genus
    }
}

/// One recorded reduction event. Vertex sets are stored as instance labels,
/// so a plan survives any relabeling done by subinstance extraction.
#[derive(Debug, Clone)]
pub enum Step {
    Component { vertices: Vec<u64> },
    DropNegatives { vertices: Vec<u64> },
    NtFix { v1: Vec<u64>, v0: Vec<u64> },
    BipartiteLeaf { set: Vec<u64>, weight: Q },
    /// cut vertices committed in (kept) or out (removed) at a block
    BlockChoice { kept: Vec<u64>, removed: Vec<u64> },
    StandardLeaf { index: usize, set: Vec<u64>, weight: Q },
    DirectLeaf { set: Vec<u64>, weight: Q },
}

/// Flat log of the reductions that produced a solution. Replaying unions
/// every chosen vertex back together and re-checks stability and weight.
#[derive(Debug, Clone, Default)]
pub struct RecombinationPlan {
    pub steps: Vec<Step>,
}

impl RecombinationPlan {
    pub fn replay(&self, g: &EmbeddedGraph) -> Result<(Q, Vec<VertexId>), Error> {
        let by_label: HashMap<u64, VertexId> =
            g.vlabels().iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut labels: Vec<u64> = Vec::new();
        for step in &self.steps {
            match step {
                Step::NtFix { v1, .. } => labels.extend(v1),
                Step::BipartiteLeaf { set, .. } => labels.extend(set),
                Step::BlockChoice { kept, .. } => labels.extend(kept),
                Step::StandardLeaf { set, .. } => labels.extend(set),
                Step::DirectLeaf { set, .. } => labels.extend(set),
                Step::Component { .. } | Step::DropNegatives { .. } => {}
            }
        }
        labels.sort_unstable();
        labels.dedup();
        let mut set = Vec::with_capacity(labels.len());
        for l in labels {
            match by_label.get(&l) {
                Some(&v) => set.push(v),
                None => return Err(Error::Internal(format!("plan references unknown label {l}"))),
            }
        }
        set.sort_unstable();
        let in_set: HashSet<VertexId> = set.iter().copied().collect();
        for e in g.edge_list() {
            if in_set.contains(&e.u) && in_set.contains(&e.v) {
                return Err(Error::Internal("replayed plan produced an unstable set".into()));
            }
        }
        let weight = set.iter().map(|&v| g.weight(v).clone()).sum();
        Ok((weight, set))
    }
}

/// Intermediate result carried through the reduction recursion: exact
/// value, chosen vertex labels, and the log of steps taken.
struct Partial {
    value: Q,
    labels: Vec<u64>,
    steps: Vec<Step>,
}

impl Partial {
    fn zero() -> Partial {
        Partial { value: Q::zero(), labels: Vec::new(), steps: Vec::new() }
    }

    fn absorb(&mut self, other: Partial) {
        self.value += other.value;
        self.labels.extend(other.labels);
        self.steps.extend(other.steps);
    }
}

trait Driver {
    fn solve_connected(&mut self, g: &EmbeddedGraph) -> Result<Partial, Error>;
}

/// Entry point of the recursion: split into connected components.
fn solve_split<D: Driver>(d: &mut D, g: &EmbeddedGraph) -> Result<Partial, Error> {
    let comps = g.components();
    if comps.len() == 1 {
        return d.solve_connected(g);
    }
    let mut out = Partial::zero();
    for comp in comps {
        let sub = g.induced_subembedding(&comp)?;
        out.steps.push(Step::Component { vertices: sub.vlabels().to_vec() });
        out.absorb(d.solve_connected(&sub)?);
    }
    Ok(out)
}

/// Block-cut dynamic program for a connected graph with at least two
/// blocks. Child subtrees are folded through exact in/out values at their
/// cut vertex; cut-vertex commitments are baked into each block by vertex
/// deletion, and the reduced remainders recurse through the driver. No
/// weight rewriting happens, so weights stay nonnegative throughout.
fn block_dp<D: Driver>(
    d: &mut D,
    g: &EmbeddedGraph,
    decomp: &BlockDecomposition,
) -> Result<Partial, Error> {
    let adj: Vec<HashSet<VertexId>> = g
        .adjacency()
        .iter()
        .map(|row| row.iter().map(|&(_, w)| w).collect())
        .collect();
    // per block: value with the parent cut vertex forced in / forced out
    let mut val: Vec<Option<[Partial; 2]>> = (0..decomp.blocks.len()).map(|_| None).collect();
    let mut root_val: Option<Partial> = None;

    for &b in &decomp.order {
        let r = decomp.parent_cut[b];
        let verts = &decomp.blocks[b];
        let vset: HashSet<VertexId> = verts.iter().copied().collect();
        let cuts: Vec<VertexId> = verts
            .iter()
            .copied()
            .filter(|&v| decomp.is_cut[v] && Some(v) != r)
            .collect();
        // fold exact subtree values for every non-root cut vertex of b
        let mut below: HashMap<VertexId, [Partial; 2]> = HashMap::new();
        for &c in &cuts {
            let mut b_in = Partial::zero();
            let mut b_out = Partial::zero();
            for &child in &decomp.child_blocks[c] {
                let pair = val[child].as_ref().expect("children are processed first");
                b_in.value += &pair[0].value - g.weight(c);
                b_in.labels.extend(pair[0].labels.iter().copied());
                b_in.steps.extend(pair[0].steps.iter().cloned());
                b_out.value += pair[1].value.clone();
                b_out.labels.extend(pair[1].labels.iter().copied());
                b_out.steps.extend(pair[1].steps.iter().cloned());
            }
            below.insert(c, [b_in, b_out]);
        }
        let states: &[Option<bool>] = match r {
            Some(_) => &[Some(true), Some(false)],
            None => &[None],
        };
        let mut results: Vec<Partial> = Vec::new();
        for &state in states {
            let mut best: Option<Partial> = None;
            'mask: for mask in 0u32..(1u32 << cuts.len()) {
                let mut committed_in: Vec<VertexId> =
                    (0..cuts.len()).filter(|&i| mask & (1 << i) != 0).map(|i| cuts[i]).collect();
                if state == Some(true) {
                    committed_in.push(r.unwrap());
                }
                for (i, &a) in committed_in.iter().enumerate() {
                    for &bv in &committed_in[i + 1..] {
                        if adj[a].contains(&bv) {
                            continue 'mask;
                        }
                    }
                }
                let mut gone: HashSet<VertexId> = HashSet::new();
                for &v in &committed_in {
                    gone.insert(v);
                    for &w in adj[v].iter().filter(|w| vset.contains(w)) {
                        gone.insert(w);
                    }
                }
                for (i, &c) in cuts.iter().enumerate() {
                    if mask & (1 << i) == 0 {
                        gone.insert(c);
                    }
                }
                if state == Some(false) {
                    gone.insert(r.unwrap());
                }
                let keep: Vec<VertexId> = verts.iter().copied().filter(|v| !gone.contains(v)).collect();
                let reduced = g.induced_subembedding(&keep)?;
                let inner = solve_split(d, &reduced)?;

                let mut cand = Partial::zero();
                let mut removed_labels: Vec<u64> = Vec::new();
                for (i, &c) in cuts.iter().enumerate() {
                    let pair = &below[&c];
                    if mask & (1 << i) != 0 {
                        cand.value += g.weight(c) + &pair[0].value;
                        cand.labels.extend(pair[0].labels.iter().copied());
                        cand.steps.extend(pair[0].steps.iter().cloned());
                    } else {
                        cand.value += pair[1].value.clone();
                        cand.labels.extend(pair[1].labels.iter().copied());
                        cand.steps.extend(pair[1].steps.iter().cloned());
                        removed_labels.push(g.vlabel(c));
                    }
                }
                if let Some(rv) = r {
                    if state == Some(true) {
                        cand.value += g.weight(rv);
                    } else {
                        removed_labels.push(g.vlabel(rv));
                    }
                }
                let kept_labels: Vec<u64> = committed_in.iter().map(|&v| g.vlabel(v)).collect();
                cand.labels.extend(kept_labels.iter().copied());
                cand.steps.push(Step::BlockChoice { kept: kept_labels, removed: removed_labels });
                cand.absorb(inner);
                if best.as_ref().map_or(true, |bst| cand.value > bst.value) {
                    best = Some(cand);
                }
            }
            results.push(best.expect("the empty commitment is always valid"));
        }
        match r {
            Some(_) => {
                let mut it = results.into_iter();
                val[b] = Some([it.next().unwrap(), it.next().unwrap()]);
            }
            None => root_val = Some(results.into_iter().next().unwrap()),
        }
    }
    let mut out = root_val.ok_or_else(|| Error::Internal("block order had no root".into()))?;
    out.labels.sort_unstable();
    out.labels.dedup();
    Ok(out)
}

struct PlainDriver<'a> {
    leaf: &'a mut dyn FnMut(&EmbeddedGraph) -> Result<(Q, Vec<VertexId>), Error>,
}

impl Driver for PlainDriver<'_> {
    fn solve_connected(&mut self, g: &EmbeddedGraph) -> Result<Partial, Error> {
        let decomp = block_decomposition(g)?;
        if decomp.blocks.len() == 1 {
            let (value, set) = (self.leaf)(g)?;
            let labels: Vec<u64> = set.iter().map(|&v| g.vlabel(v)).collect();
            let steps = vec![Step::DirectLeaf { set: labels.clone(), weight: value.clone() }];
            return Ok(Partial { value, labels, steps });
        }
        block_dp(self, g, &decomp)
    }
}

/// Exact optimum over a graph whose blocks are solved by `leaf`, which is
/// only ever called on connected single-block instances.
pub fn block_solve(
    g: &EmbeddedGraph,
    leaf: &mut dyn FnMut(&EmbeddedGraph) -> Result<(Q, Vec<VertexId>), Error>,
) -> Result<(Q, Vec<VertexId>), Error> {
    let mut d = PlainDriver { leaf };
    let p = solve_split(&mut d, g)?;
    Ok((p.value, labels_to_ids(g, &p.labels)?))
}

fn labels_to_ids(g: &EmbeddedGraph, labels: &[u64]) -> Result<Vec<VertexId>, Error> {
    let by_label: HashMap<u64, VertexId> =
        g.vlabels().iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut ids = labels
        .iter()
        .map(|l| {
            by_label
                .get(l)
                .copied()
                .ok_or_else(|| Error::Internal(format!("unknown vertex label {l}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

/// Fully reduced outcome: the exact optimum, a witness set, every standard
/// instance the leaf solver was consulted on, and the replayable plan.
pub struct Standardized {
    pub value: Q,
    pub set: Vec<VertexId>,
    pub instances: Vec<StandardInstance>,
    pub plan: RecombinationPlan,
}

struct StdDriver<'a> {
    leaf: &'a mut dyn FnMut(&StandardInstance) -> Result<(Q, Vec<VertexId>), Error>,
    instances: Vec<StandardInstance>,
}

impl Driver for StdDriver<'_> {
    fn solve_connected(&mut self, g: &EmbeddedGraph) -> Result<Partial, Error> {
        // negative weights never help a maximum stable set
        let neg: Vec<VertexId> =
            (0..g.n()).filter(|&v| g.weight(v).is_negative()).collect();
        if !neg.is_empty() {
            let keep: Vec<VertexId> = (0..g.n()).filter(|v| !neg.contains(v)).collect();
            let dropped = neg.iter().map(|&v| g.vlabel(v)).collect();
            let sub = g.induced_subembedding(&keep)?;
            let mut out = Partial::zero();
            out.steps.push(Step::DropNegatives { vertices: dropped });
            out.absorb(solve_split(self, &sub)?);
            return Ok(out);
        }
        if g.is_bipartite() {
            let (value, set) = bipartite_mwss(g)?;
            let labels: Vec<u64> = set.iter().map(|&v| g.vlabel(v)).collect();
            let steps = vec![Step::BipartiteLeaf { set: labels.clone(), weight: value.clone() }];
            return Ok(Partial { value, labels, steps });
        }
        let nt = nemhauser_trotter(g)?;
        if !nt.v0.is_empty() || !nt.v1.is_empty() {
            let v1_labels: Vec<u64> = nt.v1.iter().map(|&v| g.vlabel(v)).collect();
            let v0_labels: Vec<u64> = nt.v0.iter().map(|&v| g.vlabel(v)).collect();
            let fixed: Q = nt.v1.iter().map(|&v| g.weight(v).clone()).sum();
            let mut out = Partial {
                value: fixed,
                labels: v1_labels.clone(),
                steps: vec![Step::NtFix { v1: v1_labels, v0: v0_labels }],
            };
            out.absorb(solve_split(self, &nt.residual)?);
            return Ok(out);
        }
        let decomp = block_decomposition(g)?;
        if decomp.blocks.len() > 1 {
            return block_dp(self, g, &decomp);
        }
        // a surviving block: 2-connected, non-bipartite, persistency-stable
        let si = StandardInstance::new(g.clone())?;
        let (value, set) = (self.leaf)(&si)?;
        let check: Q = set.iter().map(|&v| si.graph().weight(v).clone()).sum();
        if check != value {
            return Err(Error::Internal("leaf solver returned a set not matching its value".into()));
        }
        let labels: Vec<u64> = set.iter().map(|&v| si.graph().vlabel(v)).collect();
        let index = self.instances.len();
        self.instances.push(si);
        let steps = vec![Step::StandardLeaf { index, set: labels.clone(), weight: value.clone() }];
        Ok(Partial { value, labels, steps })
    }
}

/// Drives the whole reduction for one branch instance: per component, drop
/// negative weights, alternate persistency fixing with block splitting
/// until stable, solve bipartite pieces directly, and hand every surviving
/// block to `leaf` as a verified standard instance.
pub fn standardize(
    g: &EmbeddedGraph,
    leaf: &mut dyn FnMut(&StandardInstance) -> Result<(Q, Vec<VertexId>), Error>,
) -> Result<Standardized, Error> {
    let mut d = StdDriver { leaf, instances: Vec::new() };
    let p = solve_split(&mut d, g)?;
    let set = labels_to_ids(g, &p.labels)?;
    let plan = RecombinationPlan { steps: p.steps };
    let (rv, rs) = plan.replay(g)?;
    if rv != p.value || rs != set {
        return Err(Error::Internal("plan replay disagrees with the assembled solution".into()));
    }
    Ok(Standardized { value: p.value, set, instances: d.instances, plan })
}
