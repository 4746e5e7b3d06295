//! The stable set polytope as an explicit linear program, plus an exact
//! rational simplex to optimize over it and a small text format for models.
//!
//! The description mirrors the solver's reduction tree. An outer disjunction
//! ranges over the partitions of the two-sided transversal; inside a branch,
//! blocks share their cut vertices and compose by concatenation; a bipartite
//! block is described by edge and box rows alone; every other block gets a
//! disjunction over multisets of homology classes whose parts are unit-flow
//! systems in the cover graph, pulled back to node space through the slack
//! relation y = 1 - Mx. Projecting the whole system to the node variables
//! yields exactly the stable set polytope, so an exact LP over the model
//! reproduces the integer optimum for every objective.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::blockcut::block_decomposition;
use crate::circulation::{build_cover_graph, CoverGraph};
use crate::dual::{dual_representation, DualRepresentation, FaceId, HomologyVector};
use crate::embedding::{EdgeId, EmbeddedGraph, VertexId};
use crate::error::Error;
use crate::preprocess::StandardInstance;
use crate::rational::Q;
use crate::transversal::{branch_partitions, two_sided_transversal};

/// Default ceiling on the number of constraints a model may have.
pub const EF_ROW_CAP: usize = 20_000;

/// Hard stop for the disjunct search; hitting it means the cap logic failed.
const ENUM_STEP_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

impl Rel {
    pub fn label(self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
        }
    }
}

/// Which layer of the construction a constraint belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    FlowConservation,
    Balas,
    BoxBound,
    SigmaPullback,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::FlowConservation => "flow-conservation",
            Provenance::Balas => "balas",
            Provenance::BoxBound => "box",
            Provenance::SigmaPullback => "sigma-pullback",
        }
    }

    fn from_label(s: &str) -> Option<Self> {
        match s {
            "flow-conservation" => Some(Provenance::FlowConservation),
            "balas" => Some(Provenance::Balas),
            "box" => Some(Provenance::BoxBound),
            "sigma-pullback" => Some(Provenance::SigmaPullback),
            _ => None,
        }
    }
}

/// One linear constraint. Terms are (variable index, coefficient), sorted by
/// variable index with nonzero coefficients.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub tag: Provenance,
    pub terms: Vec<(usize, Q)>,
    pub rel: Rel,
    pub rhs: Q,
}

/// A linear program over named variables. Every variable is non-negative;
/// upper bounds appear as explicit rows.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub maximize: bool,
    pub vars: Vec<String>,
    /// dense objective, one entry per variable
    pub objective: Vec<Q>,
    pub rows: Vec<Constraint>,
}

impl LinearModel {
    /// Structural soundness: unique names, objective length, and rows that
    /// reference only declared variables with sorted nonzero terms.
    pub fn validate(&self) -> Result<(), Error> {
        let mut seen = BTreeMap::new();
        for (i, name) in self.vars.iter().enumerate() {
            if let Some(j) = seen.insert(name.clone(), i) {
                return Err(Error::Internal(format!(
                    "model declares variable {name} twice (positions {j} and {i})"
                )));
            }
        }
        if self.objective.len() != self.vars.len() {
            return Err(Error::Internal(format!(
                "objective has {} entries for {} variables",
                self.objective.len(),
                self.vars.len()
            )));
        }
        for (r, row) in self.rows.iter().enumerate() {
            let mut last = None;
            for (v, c) in &row.terms {
                if *v >= self.vars.len() {
                    return Err(Error::Internal(format!(
                        "row {r} references undeclared variable index {v}"
                    )));
                }
                if c.is_zero() {
                    return Err(Error::Internal(format!("row {r} carries a zero coefficient")));
                }
                if let Some(p) = last {
                    if *v <= p {
                        return Err(Error::Internal(format!("row {r} terms are not sorted")));
                    }
                }
                last = Some(*v);
            }
        }
        Ok(())
    }
}

// --- model builder ----------------------------------------------------------

/// RHS scaling of a homogenized row: a plain constant, or that constant times
/// a multiplier variable moved to the left-hand side.
#[derive(Clone, Copy)]
enum Scale {
    Const,
    Var(usize),
}

struct ModelBuilder {
    vars: Vec<String>,
    rows: Vec<Constraint>,
}

impl ModelBuilder {
    fn new() -> Self {
        ModelBuilder { vars: Vec::new(), rows: Vec::new() }
    }

    fn var(&mut self, name: String) -> usize {
        self.vars.push(name);
        self.vars.len() - 1
    }

    fn row(&mut self, tag: Provenance, terms: Vec<(usize, Q)>, rel: Rel, rhs: Q) {
        let mut merged: BTreeMap<usize, Q> = BTreeMap::new();
        for (v, c) in terms {
            let slot = merged.entry(v).or_insert_with(Q::zero);
            *slot += c;
        }
        let terms: Vec<(usize, Q)> =
            merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.rows.push(Constraint { tag, terms, rel, rhs });
    }

    /// Row with right-hand side `rhs * scale`; a variable scale moves the
    /// constant to the left.
    fn scaled_row(
        &mut self,
        tag: Provenance,
        mut terms: Vec<(usize, Q)>,
        rel: Rel,
        rhs: Q,
        scale: Scale,
    ) {
        match scale {
            Scale::Const => self.row(tag, terms, rel, rhs),
            Scale::Var(l) => {
                if !rhs.is_zero() {
                    terms.push((l, -rhs));
                }
                self.row(tag, terms, rel, Q::zero());
            }
        }
    }
}

// --- emission metadata -------------------------------------------------------

/// The emitted model together with everything needed to extend a stable set
/// indicator to a full feasible assignment.
pub struct StabEf {
    pub model: LinearModel,
    /// variable index of each node of the input graph
    pub x_vars: Vec<usize>,
    transversal: Vec<VertexId>,
    branches: Vec<BranchEf>,
    /// true when the transversal is empty and the branch writes directly
    /// onto the node variables
    single: bool,
}

struct BranchEf {
    x1: Vec<VertexId>,
    keep: Vec<VertexId>,
    lam: Option<usize>,
    /// per keep position, the x variable the branch's rows use
    copy_vars: Vec<usize>,
    blocks: Vec<BlockEf>,
}

struct BlockEf {
    /// original graph id per block-local vertex
    verts: Vec<VertexId>,
    kind: BlockKind,
}

enum BlockKind {
    Bipartite,
    Flow(FlowEf),
}

#[derive(Clone, Copy)]
struct CoverArc {
    tail: usize,
    head: usize,
    edge: EdgeId,
}

struct FlowEf {
    rep: DualRepresentation,
    cover: CoverGraph,
    arcs: Vec<CoverArc>,
    /// block-local endpoints of every block edge
    edge_ends: Vec<(usize, usize)>,
    /// symbol = (anchor face, nonzero class reachable from that face's
    /// zero-class node)
    symbols: Vec<(FaceId, HomologyVector)>,
    /// each disjunct is an increasing list of symbol indices whose classes
    /// sum to the all-ones class
    disjuncts: Vec<Vec<usize>>,
    mu_vars: Vec<usize>,
    /// per disjunct, per part: first variable index of its arcs.len()
    /// consecutive flow variables
    flow_base: Vec<Vec<usize>>,
}

// --- block planning -----------------------------------------------------------

struct FlowPlan {
    rep: DualRepresentation,
    cover: CoverGraph,
    arcs: Vec<CoverArc>,
    symbols: Vec<(FaceId, HomologyVector)>,
    /// node index of each symbol's class at its anchor face
    sym_dst: Vec<usize>,
    active: Vec<bool>,
    disjuncts: Vec<Vec<usize>>,
    rows: usize,
}

struct BlockPlan {
    verts: Vec<VertexId>,
    graph: EmbeddedGraph,
    flow: Option<FlowPlan>,
}

struct BranchPlan {
    x1: Vec<VertexId>,
    keep: Vec<VertexId>,
    blocks: Vec<BlockPlan>,
}

fn components(g: &EmbeddedGraph) -> Vec<Vec<VertexId>> {
    let adj = g.adjacency();
    let mut seen = vec![false; g.n()];
    let mut comps = Vec::new();
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = vec![s];
        while let Some(v) = queue.pop() {
            for &(_, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// How many parts a block's disjunction needs. One part suffices at genus 1:
/// the surface cannot hold two disjoint essential curves, so the support of
/// any slack image has a single class-carrying component. Otherwise the
/// parts are node-disjoint pieces of the dual, so the dual vertex count is
/// an upper bound.
fn disjunction_depth(genus: usize, faces: usize) -> usize {
    if genus == 1 {
        1
    } else {
        faces
    }
}

fn plan_flow_block(
    graph: &EmbeddedGraph,
    rows_before: usize,
    cap: usize,
) -> Result<FlowPlan, Error> {
    // the construction reads only the dual structure and the class windows,
    // never the arc costs, so the instance checks run on degree weights,
    // which always admit the unit cost certificate; real weights may not
    // split into edge costs at all
    let mut deg = vec![0i64; graph.n()];
    for e in 0..graph.m() {
        let ed = graph.edge(e);
        deg[ed.u] += 1;
        deg[ed.v] += 1;
    }
    let surrogate = EmbeddedGraph::new(
        deg.into_iter().map(crate::rational::qi).collect(),
        (0..graph.m()).map(|e| *graph.edge(e)).collect(),
        (0..graph.n()).map(|v| graph.rotation(v).to_vec()).collect(),
    )?;
    let si = StandardInstance::new(surrogate)?;
    let rep = dual_representation(&si)?;
    let cover = build_cover_graph(&rep, si.costs())?;
    let mut arcs = Vec::new();
    for u in 0..cover.node_count {
        for (e, v) in cover.out_arcs(u) {
            arcs.push(CoverArc { tail: u, head: v, edge: e });
        }
    }
    let mut active = vec![false; cover.node_count];
    for a in &arcs {
        active[a.tail] = true;
        active[a.head] = true;
    }
    let active_count = active.iter().filter(|&&b| b).count();

    // symbols: classes reachable from (f, 0); unreachable pairs would only
    // produce empty flow systems
    let zero_free = vec![0i64; cover.free_len()];
    let mut symbols = Vec::new();
    let mut sym_free = Vec::new();
    let mut sym_dst = Vec::new();
    let mut sym_rows = Vec::new();
    for f in 0..cover.face_count {
        let src = cover.node(f, false, &zero_free);
        let mut reach = vec![false; cover.node_count];
        reach[src] = true;
        let mut queue = vec![src];
        while let Some(u) = queue.pop() {
            for (_, v) in cover.out_arcs(u) {
                if !reach[v] {
                    reach[v] = true;
                    queue.push(v);
                }
            }
        }
        for idx in 0..cover.node_count {
            if !reach[idx] {
                continue;
            }
            let (nf, parity, free) = cover.decode(idx);
            if nf != f || (!parity && free.iter().all(|&c| c == 0)) {
                continue;
            }
            let class = HomologyVector {
                parity,
                free: free.iter().map(|&c| c.into()).collect(),
            };
            symbols.push((f, class));
            sym_free.push((parity, free));
            sym_dst.push(idx);
            let extra = !active[src] as usize + !active[idx] as usize;
            sym_rows.push(active_count + extra);
        }
    }

    let ell = disjunction_depth(si.genus(), cover.face_count);

    // all sets of at most ell distinct symbols whose classes sum to the
    // all-ones class, as increasing index sequences; repeats are never
    // needed because the parts stand for node-disjoint dual subgraphs,
    // which carry distinct anchor faces
    let mut disjuncts: Vec<Vec<usize>> = Vec::new();
    let mut rows = 1; // the convexity row over the disjunct multipliers
    let mut steps = 0usize;
    let windows = &cover.windows;
    let mut stack: Vec<usize> = Vec::new();
    let mut sum_parity = false;
    let mut sum_free = vec![0i64; cover.free_len()];

    // the remaining parts can still cancel `free` iff each coordinate fits
    // in `left` more window-bounded increments
    fn can_extend(free: &[i64], left: usize, windows: &[i64]) -> bool {
        left >= 1
            && free
                .iter()
                .zip(windows)
                .all(|(&c, &w)| c.abs() <= w.saturating_mul(left as i64))
    }

    // iterative depth-first search over non-decreasing sequences
    let mut next_sym = 0usize;
    loop {
        steps += 1;
        if steps > ENUM_STEP_CAP {
            return Err(Error::Internal(
                "disjunct enumeration did not settle within its step budget".into(),
            ));
        }
        if stack.len() < ell && next_sym < symbols.len() {
            let s = next_sym;
            let (p, ref fr) = sym_free[s];
            let np = sum_parity ^ p;
            let nf: Vec<i64> = sum_free.iter().zip(fr).map(|(a, b)| a + b).collect();
            let hit = np && nf.iter().all(|&c| c == 0);
            if hit || can_extend(&nf, ell - stack.len() - 1, windows) {
                stack.push(s);
                sum_parity = np;
                sum_free = nf;
                next_sym = s + 1;
                if hit {
                    let next_rows: usize = stack.iter().map(|&s| sym_rows[s]).sum();
                    rows += next_rows;
                    if rows_before + rows > cap {
                        return Err(Error::TooLarge(format!(
                            "stable set model needs at least {} constraints (cap {cap})",
                            rows_before + rows
                        )));
                    }
                    disjuncts.push(stack.clone());
                }
                continue;
            }
            next_sym += 1;
            continue;
        }
        // exhausted extensions at this depth: backtrack
        match stack.pop() {
            None => break,
            Some(s) => {
                let (p, ref fr) = sym_free[s];
                sum_parity ^= p;
                for (a, b) in sum_free.iter_mut().zip(fr) {
                    *a -= b;
                }
                next_sym = s + 1;
            }
        }
    }

    if disjuncts.is_empty() {
        return Err(Error::Internal(
            "no homology class multiset reaches the all-ones class; the block \
             disjunction is empty"
            .into(),
        ));
    }

    rows += graph.m(); // slack pullback rows
    Ok(FlowPlan { rep, cover, arcs, symbols, sym_dst, active, disjuncts, rows })
}

fn plan_branch(
    sub: &EmbeddedGraph,
    keep: Vec<VertexId>,
    x1: Vec<VertexId>,
    rows_before: usize,
    cap: usize,
) -> Result<(BranchPlan, usize), Error> {
    let mut blocks = Vec::new();
    let mut rows = 0usize;
    for comp in components(sub) {
        if comp.len() == 1 {
            continue;
        }
        let comp_sub = sub.induced_subembedding(&comp)?;
        let decomp = block_decomposition(&comp_sub)?;
        let mut order: Vec<usize> = (0..decomp.blocks.len()).collect();
        order.sort_by_key(|&b| decomp.blocks[b].clone());
        for b in order {
            let local = &decomp.blocks[b];
            if decomp.block_edges[b].is_empty() {
                continue;
            }
            let sub_ids: Vec<VertexId> = local.iter().map(|&v| comp[v]).collect();
            let graph = sub.induced_subembedding(&sub_ids)?;
            let verts: Vec<VertexId> = sub_ids.iter().map(|&v| keep[v]).collect();
            if graph.is_bipartite() {
                rows += graph.m();
                blocks.push(BlockPlan { verts, graph, flow: None });
            } else {
                let plan = plan_flow_block(&graph, rows_before + rows, cap)?;
                rows += plan.rows;
                blocks.push(BlockPlan { verts, graph, flow: Some(plan) });
            }
        }
    }
    Ok((BranchPlan { x1, keep, blocks }, rows))
}

// --- emission ----------------------------------------------------------------

fn emit_flow_block(
    b: &mut ModelBuilder,
    plan: FlowPlan,
    verts: Vec<VertexId>,
    graph: &EmbeddedGraph,
    x_of: &dyn Fn(usize) -> usize,
    scale: Scale,
    prefix: &str,
) -> BlockEf {
    let FlowPlan { rep, cover, arcs, symbols, sym_dst, active, disjuncts, rows: _ } = plan;
    let zero_free = vec![0i64; cover.free_len()];
    let n_nodes = cover.node_count;
    let mut out_of: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    let mut in_of: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for (i, a) in arcs.iter().enumerate() {
        out_of[a.tail].push(i);
        in_of[a.head].push(i);
    }
    let mut arcs_of_edge: Vec<Vec<usize>> = vec![Vec::new(); graph.m()];
    for (i, a) in arcs.iter().enumerate() {
        arcs_of_edge[a.edge].push(i);
    }
    let edge_ends: Vec<(usize, usize)> =
        (0..graph.m()).map(|e| (graph.edge(e).u, graph.edge(e).v)).collect();

    // variables: per disjunct a multiplier, then flow variables per part
    let mut mu_vars = Vec::new();
    let mut flow_base: Vec<Vec<usize>> = Vec::new();
    for (d, parts) in disjuncts.iter().enumerate() {
        let mu = b.var(format!("{prefix}d{d}_mu"));
        mu_vars.push(mu);
        let mut bases = Vec::new();
        for (i, _) in parts.iter().enumerate() {
            let base = b.vars.len();
            for a in 0..arcs.len() {
                b.var(format!("{prefix}d{d}_p{i}_a{a}"));
            }
            bases.push(base);
        }
        flow_base.push(bases);
    }

    // convexity over the disjunct multipliers
    b.scaled_row(
        Provenance::Balas,
        mu_vars.iter().map(|&v| (v, Q::one())).collect(),
        Rel::Eq,
        Q::one(),
        scale,
    );

    // per part: flow conservation with supply and demand scaled by the
    // disjunct multiplier
    for (d, parts) in disjuncts.iter().enumerate() {
        for (i, &s) in parts.iter().enumerate() {
            let (f, _) = symbols[s];
            let src = cover.node(f, false, &zero_free);
            let dst = sym_dst[s];
            let base = flow_base[d][i];
            for u in 0..n_nodes {
                if !active[u] && u != src && u != dst {
                    continue;
                }
                let mut terms: Vec<(usize, Q)> = Vec::new();
                for &a in &out_of[u] {
                    terms.push((base + a, Q::one()));
                }
                for &a in &in_of[u] {
                    terms.push((base + a, -Q::one()));
                }
                if u == src {
                    terms.push((mu_vars[d], -Q::one()));
                }
                if u == dst {
                    terms.push((mu_vars[d], Q::one()));
                }
                b.row(Provenance::FlowConservation, terms, Rel::Eq, Q::zero());
            }
        }
    }

    // pullback: per edge, total projected flow plus endpoint values equals
    // the scaled all-ones slack
    for e in 0..graph.m() {
        let ed = graph.edge(e);
        let mut terms: Vec<(usize, Q)> = Vec::new();
        for (d, parts) in disjuncts.iter().enumerate() {
            for (i, _) in parts.iter().enumerate() {
                for &a in &arcs_of_edge[e] {
                    terms.push((flow_base[d][i] + a, Q::one()));
                }
            }
        }
        terms.push((x_of(ed.u), Q::one()));
        terms.push((x_of(ed.v), Q::one()));
        b.scaled_row(Provenance::SigmaPullback, terms, Rel::Eq, Q::one(), scale);
    }

    BlockEf {
        verts,
        kind: BlockKind::Flow(FlowEf {
            rep,
            cover,
            arcs,
            edge_ends,
            symbols,
            disjuncts,
            mu_vars,
            flow_base,
        }),
    }
}

fn emit_branch(
    b: &mut ModelBuilder,
    plan: BranchPlan,
    copy_vars: Vec<usize>,
    lam: Option<usize>,
    scale: Scale,
    prefix: &str,
) -> BranchEf {
    let keep_pos: BTreeMap<VertexId, usize> =
        plan.keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut blocks = Vec::new();
    for (k, blk) in plan.blocks.into_iter().enumerate() {
        let BlockPlan { verts, graph, flow } = blk;
        let x_of = |local: usize| copy_vars[keep_pos[&verts[local]]];
        match flow {
            None => {
                for e in 0..graph.m() {
                    let ed = graph.edge(e);
                    b.scaled_row(
                        Provenance::SigmaPullback,
                        vec![(x_of(ed.u), Q::one()), (x_of(ed.v), Q::one())],
                        Rel::Le,
                        Q::one(),
                        scale,
                    );
                }
                blocks.push(BlockEf { verts, kind: BlockKind::Bipartite });
            }
            Some(fp) => {
                let block_prefix = format!("{prefix}k{k}_");
                let ef = emit_flow_block(b, fp, verts.clone(), &graph, &x_of, scale, &block_prefix);
                blocks.push(ef);
            }
        }
    }
    BranchEf { x1: plan.x1, keep: plan.keep, lam, copy_vars, blocks }
}

/// Emits a model whose projection to the node variables is the stable set
/// polytope of `g`. The objective is the node weights of `g`. `budget` caps
/// the transversal search; `cap` bounds the number of constraints, and
/// crossing it is a refusal that reports the computed size.
pub fn emit_stab_ef(g: &EmbeddedGraph, budget: usize, cap: usize) -> Result<StabEf, Error> {
    let tr = two_sided_transversal(g, budget)?;
    let branches = branch_partitions(g, &tr.x)?;
    let single = tr.x.is_empty();
    let adj = g.adjacency();

    let mut builder = ModelBuilder::new();
    let x_vars: Vec<usize> =
        (0..g.n()).map(|v| builder.var(format!("x{}", g.vlabel(v)))).collect();

    // fixed overhead: global box rows, plus linking and convexity when the
    // outer disjunction exists
    let overhead = if single { g.n() } else { 1 + 2 * g.n() };
    let mut rows_total = overhead;
    let mut plans = Vec::new();
    for br in &branches {
        let mut drop = vec![false; g.n()];
        for &v in &tr.x {
            drop[v] = true;
        }
        for &v in &br.x1 {
            for &(_, w) in &adj[v] {
                drop[w] = true;
            }
        }
        let keep: Vec<VertexId> = (0..g.n()).filter(|&v| !drop[v]).collect();
        debug_assert_eq!(keep.len(), br.sub.n());
        if !single {
            rows_total += keep.len(); // copy box rows
        }
        let (plan, rows) = plan_branch(&br.sub, keep, br.x1.clone(), rows_total, cap)?;
        rows_total += rows;
        plans.push(plan);
    }
    if rows_total > cap {
        return Err(Error::TooLarge(format!(
            "stable set model needs {rows_total} constraints (cap {cap})"
        )));
    }

    let mut branch_efs = Vec::new();
    if single {
        let plan = plans.pop().expect("empty transversal yields one branch");
        for v in 0..g.n() {
            builder.row(
                Provenance::BoxBound,
                vec![(x_vars[v], Q::one())],
                Rel::Le,
                Q::one(),
            );
        }
        let copy_vars: Vec<usize> = plan.keep.iter().map(|&v| x_vars[v]).collect();
        branch_efs.push(emit_branch(&mut builder, plan, copy_vars, None, Scale::Const, ""));
    } else {
        // variables: per branch a multiplier and one copy of each kept node
        let mut lam_vars = Vec::new();
        let mut copy_sets = Vec::new();
        for (j, plan) in plans.iter().enumerate() {
            let lam = builder.var(format!("b{j}_lam"));
            lam_vars.push(lam);
            let copies: Vec<usize> = plan
                .keep
                .iter()
                .map(|&v| builder.var(format!("b{j}_x{}", g.vlabel(v))))
                .collect();
            copy_sets.push(copies);
        }
        builder.row(
            Provenance::Balas,
            lam_vars.iter().map(|&l| (l, Q::one())).collect(),
            Rel::Eq,
            Q::one(),
        );
        // each node value is the sum of its branch copies, plus the branch
        // multiplier wherever the branch keeps the node at one
        for v in 0..g.n() {
            let mut terms = vec![(x_vars[v], Q::one())];
            for (j, plan) in plans.iter().enumerate() {
                if let Some(pos) = plan.keep.iter().position(|&u| u == v) {
                    terms.push((copy_sets[j][pos], -Q::one()));
                }
                if plan.x1.contains(&v) {
                    terms.push((lam_vars[j], -Q::one()));
                }
            }
            builder.row(Provenance::Balas, terms, Rel::Eq, Q::zero());
        }
        for v in 0..g.n() {
            builder.row(
                Provenance::BoxBound,
                vec![(x_vars[v], Q::one())],
                Rel::Le,
                Q::one(),
            );
        }
        for (j, plan) in plans.into_iter().enumerate() {
            for &c in &copy_sets[j] {
                builder.row(
                    Provenance::BoxBound,
                    vec![(c, Q::one()), (lam_vars[j], -Q::one())],
                    Rel::Le,
                    Q::zero(),
                );
            }
            let prefix = format!("b{j}_");
            branch_efs.push(emit_branch(
                &mut builder,
                plan,
                copy_sets[j].clone(),
                Some(lam_vars[j]),
                Scale::Var(lam_vars[j]),
                &prefix,
            ));
        }
    }

    debug_assert_eq!(builder.rows.len(), rows_total);
    let mut objective = vec![Q::zero(); builder.vars.len()];
    for v in 0..g.n() {
        objective[x_vars[v]] = g.weight(v).clone();
    }
    let model = LinearModel {
        maximize: true,
        vars: builder.vars,
        objective,
        rows: builder.rows,
    };
    model.validate()?;
    Ok(StabEf { model, x_vars, transversal: tr.x, branches: branch_efs, single })
}

// --- completing a stable set to a model point ---------------------------------

/// Extends the indicator of a stable set to a full feasible assignment of
/// the model: pick the matching branch, split the slack image of the set
/// into dual components, route each class-carrying component as a unit flow
/// and fold the class-free ones into the first part as circulations.
pub fn complete_stable_indicator(
    g: &EmbeddedGraph,
    ef: &StabEf,
    set: &[VertexId],
) -> Result<Vec<Q>, Error> {
    let adj = g.adjacency();
    let in_set = {
        let mut m = vec![false; g.n()];
        for &v in set {
            if v >= g.n() {
                return Err(Error::Usage(format!("unknown vertex {v} in stable set")));
            }
            m[v] = true;
        }
        m
    };
    for &v in set {
        for &(_, w) in &adj[v] {
            if in_set[w] {
                return Err(Error::Usage(format!("vertices {v} and {w} are adjacent; not a stable set")));
            }
        }
    }

    let mut assign = vec![Q::zero(); ef.model.vars.len()];
    for &v in set {
        assign[ef.x_vars[v]] = Q::one();
    }

    let mut x1: Vec<VertexId> =
        ef.transversal.iter().copied().filter(|&v| in_set[v]).collect();
    x1.sort_unstable();
    let j = ef
        .branches
        .iter()
        .position(|b| b.x1 == x1)
        .ok_or_else(|| Error::Internal("no branch matches the stable set's transversal part".into()))?;
    let branch = &ef.branches[j];
    if let Some(lam) = branch.lam {
        assign[lam] = Q::one();
    }
    if !ef.single {
        for (pos, &v) in branch.keep.iter().enumerate() {
            if in_set[v] {
                assign[branch.copy_vars[pos]] = Q::one();
            }
        }
    }
    for &v in set {
        if !x1.contains(&v) && !branch.keep.contains(&v) {
            return Err(Error::Internal(format!(
                "stable vertex {v} fell outside its branch; the partition logic is wrong"
            )));
        }
    }

    for blk in &branch.blocks {
        let flow = match &blk.kind {
            BlockKind::Bipartite => continue,
            BlockKind::Flow(f) => f,
        };
        complete_flow_block(flow, &blk.verts, &in_set, &mut assign)?;
    }
    Ok(assign)
}

fn complete_flow_block(
    flow: &FlowEf,
    verts: &[VertexId],
    in_set: &[bool],
    assign: &mut Vec<Q>,
) -> Result<(), Error> {
    let rep = &flow.rep;
    let cover = &flow.cover;
    let m = flow.edge_ends.len();

    // slack image of the block restriction; stability keeps it 0/1
    let mut y = vec![0u8; m];
    for (e, &(u, v)) in flow.edge_ends.iter().enumerate() {
        let occupied = in_set[verts[u]] as u8 + in_set[verts[v]] as u8;
        if occupied > 1 {
            return Err(Error::Internal("slack image of a stable set fell below zero".into()));
        }
        y[e] = 1 - occupied;
    }

    // weakly connected components of the support, over dual nodes
    let faces = cover.face_count;
    let mut comp_of = vec![usize::MAX; faces];
    let mut comps: Vec<Vec<EdgeId>> = Vec::new();
    let mut adj: Vec<Vec<EdgeId>> = vec![Vec::new(); faces];
    for e in 0..m {
        if y[e] == 1 {
            adj[rep.dual.tail[e]].push(e);
            adj[rep.dual.head[e]].push(e);
        }
    }
    for f in 0..faces {
        if comp_of[f] != usize::MAX || adj[f].is_empty() {
            continue;
        }
        let id = comps.len();
        let mut edges = Vec::new();
        let mut queue = vec![f];
        comp_of[f] = id;
        while let Some(u) = queue.pop() {
            for &e in &adj[u] {
                let other = if rep.dual.tail[e] == u { rep.dual.head[e] } else { rep.dual.tail[e] };
                if comp_of[other] == usize::MAX {
                    comp_of[other] = id;
                    queue.push(other);
                }
            }
        }
        for e in 0..m {
            if y[e] == 1 && comp_of[rep.dual.tail[e]] == id {
                edges.push(e);
            }
        }
        comps.push(edges);
    }

    // class and anchor face of each component; symbol order decides which
    // part of the disjunct a component fills
    let mut routed: Vec<(usize, usize, FaceId)> = Vec::new(); // (symbol, comp, anchor)
    let mut zero_parts: Vec<(usize, FaceId)> = Vec::new();
    for (i, edges) in comps.iter().enumerate() {
        let mut v = vec![num::BigInt::zero(); m];
        for &e in edges {
            v[e] = num::BigInt::one();
        }
        let class = rep.omega(&v);
        let anchor = edges
            .iter()
            .map(|&e| rep.dual.tail[e].min(rep.dual.head[e]))
            .min()
            .expect("component has edges");
        if class.is_zero() {
            zero_parts.push((i, anchor));
        } else {
            let sym = flow
                .symbols
                .iter()
                .position(|(sf, sc)| *sf == anchor && *sc == class)
                .ok_or_else(|| {
                    Error::Internal("a component's class is missing from the symbol table".into())
                })?;
            routed.push((sym, i, anchor));
        }
    }
    routed.sort_by_key(|&(s, _, _)| s);

    let want: Vec<usize> = routed.iter().map(|&(s, _, _)| s).collect();
    let d = flow
        .disjuncts
        .iter()
        .position(|parts| parts == &want)
        .ok_or_else(|| {
            Error::Internal(format!(
                "no disjunct matches the {}-part decomposition of a slack image",
                want.len()
            ))
        })?;
    assign[flow.mu_vars[d]] = Q::one();

    // arc lookup: (cover tail node, dual edge) -> arc index
    let mut arc_at: BTreeMap<(usize, EdgeId), usize> = BTreeMap::new();
    for (i, a) in flow.arcs.iter().enumerate() {
        arc_at.insert((a.tail, a.edge), i);
    }

    // route class-carrying components as unit flows; the first part also
    // absorbs every class-free component as a circulation on top
    for (i, &(_, comp, anchor)) in routed.iter().enumerate() {
        let base = flow.flow_base[d][i];
        walk_and_add(rep, cover, &arc_at, &comps[comp], anchor, base, assign)?;
        if i == 0 {
            for &(z, zanchor) in &zero_parts {
                walk_and_add(rep, cover, &arc_at, &comps[z], zanchor, base, assign)?;
            }
        }
    }
    Ok(())
}

/// Follows an Euler tour of `edges` (a balanced arc set) from `start` in the
/// dual, adding one unit to the matching flow variable per crossed arc.
fn walk_and_add(
    rep: &DualRepresentation,
    cover: &CoverGraph,
    arc_at: &BTreeMap<(usize, EdgeId), usize>,
    edges: &[EdgeId],
    start: FaceId,
    base: usize,
    assign: &mut Vec<Q>,
) -> Result<(), Error> {
    let tour = euler_tour(rep, edges, start)?;
    let mut parity = false;
    let mut free = vec![0i64; cover.free_len()];
    let mut face = start;
    for e in tour {
        let node = cover.node(face, parity, &free);
        let arc = *arc_at
            .get(&(node, e))
            .ok_or_else(|| Error::Internal("a tour step leaves the class window".into()))?;
        assign[base + arc] += Q::one();
        let (pflip, delta) = rep.arc_class_raw(e);
        parity ^= pflip;
        for (j, d) in delta.iter().enumerate() {
            free[j] += d;
        }
        face = rep.dual.head[e];
    }
    Ok(())
}

/// Euler tour over a balanced set of dual arcs starting at `start`,
/// returned as the arc sequence. Standard stack-based construction.
fn euler_tour(
    rep: &DualRepresentation,
    edges: &[EdgeId],
    start: FaceId,
) -> Result<Vec<EdgeId>, Error> {
    let mut out: BTreeMap<FaceId, Vec<EdgeId>> = BTreeMap::new();
    for &e in edges {
        out.entry(rep.dual.tail[e]).or_default().push(e);
    }
    for lst in out.values_mut() {
        lst.sort_unstable_by(|a, b| b.cmp(a)); // pop from the back = ascending
    }
    let mut stack: Vec<(FaceId, Option<EdgeId>)> = vec![(start, None)];
    let mut tour_rev: Vec<EdgeId> = Vec::new();
    while let Some(&(f, via)) = stack.last() {
        if let Some(e) = out.get_mut(&f).and_then(|l| l.pop()) {
            stack.push((rep.dual.head[e], Some(e)));
        } else {
            stack.pop();
            if let Some(e) = via {
                tour_rev.push(e);
            }
        }
    }
    if tour_rev.len() != edges.len() {
        return Err(Error::Internal("arc set is not connected; Euler tour is partial".into()));
    }
    tour_rev.reverse();
    Ok(tour_rev)
}

/// Checks an assignment against every row and the non-negativity bounds.
/// Returns the first violation, if any.
pub fn assignment_satisfies(model: &LinearModel, assign: &[Q]) -> Option<String> {
    if assign.len() != model.vars.len() {
        return Some(format!(
            "assignment has {} values for {} variables",
            assign.len(),
            model.vars.len()
        ));
    }
    for (i, v) in assign.iter().enumerate() {
        if v < &Q::zero() {
            return Some(format!("variable {} is negative: {v}", model.vars[i]));
        }
    }
    for (r, row) in model.rows.iter().enumerate() {
        let lhs: Q = row.terms.iter().map(|(v, c)| c * &assign[*v]).sum();
        let ok = match row.rel {
            Rel::Le => lhs <= row.rhs,
            Rel::Eq => lhs == row.rhs,
            Rel::Ge => lhs >= row.rhs,
        };
        if !ok {
            return Some(format!(
                "row {r} ({}) evaluates to {lhs} {} {}",
                model.rows[r].tag.label(),
                row.rel.label(),
                row.rhs
            ));
        }
    }
    None
}

// --- exact rational simplex ----------------------------------------------------

struct Unbounded;

fn pivot(t: &mut [Vec<Q>], basis: &mut [usize], r: usize, c: usize, rhs: usize) {
    let piv = t[r][c].clone();
    for j in 0..=rhs {
        if !t[r][j].is_zero() {
            let v = &t[r][j] / &piv;
            t[r][j] = v;
        }
    }
    for i in 0..t.len() {
        if i == r || t[i][c].is_zero() {
            continue;
        }
        let f = t[i][c].clone();
        for j in 0..=rhs {
            if t[r][j].is_zero() {
                continue;
            }
            let d = &f * &t[r][j];
            t[i][j] -= d;
        }
    }
    basis[r] = c;
}

/// Minimizing pivot loop under Bland's rule: enter the lowest-index column
/// with a negative reduced cost, leave on the lowest-index basic variable
/// among the tightest rows. Finite by the anti-cycling guarantee.
fn simplex_loop(
    t: &mut [Vec<Q>],
    basis: &mut [usize],
    banned: &[bool],
    rhs: usize,
) -> Result<(), Unbounded> {
    let m = t.len() - 1;
    loop {
        let mut enter = None;
        for j in 0..rhs {
            if !banned[j] && t[m][j].is_negative() {
                enter = Some(j);
                break;
            }
        }
        let Some(c) = enter else { return Ok(()) };
        let mut leave: Option<(Q, usize, usize)> = None;
        for r in 0..m {
            if t[r][c].is_positive() {
                let ratio = &t[r][rhs] / &t[r][c];
                let better = match &leave {
                    None => true,
                    Some((best, bvar, _)) => {
                        ratio < *best || (ratio == *best && basis[r] < *bvar)
                    }
                };
                if better {
                    leave = Some((ratio, basis[r], r));
                }
            }
        }
        let Some((_, _, r)) = leave else { return Err(Unbounded) };
        pivot(t, basis, r, c, rhs);
    }
}

/// Exact two-phase simplex over rationals. Every variable is non-negative.
/// Returns the optimum and one optimal assignment. Infeasible or unbounded
/// inputs are internal errors: an emitted model always contains a point and
/// is boxed in every direction.
pub fn lp_optimize(model: &LinearModel) -> Result<(Q, Vec<Q>), Error> {
    model.validate()?;
    let n = model.vars.len();
    let m = model.rows.len();

    // normalize to rhs >= 0 and pick slack, surplus and artificial columns
    let mut flip = Vec::with_capacity(m);
    let mut rel_eff = Vec::with_capacity(m);
    for row in &model.rows {
        let f = row.rhs.is_negative();
        flip.push(f);
        rel_eff.push(match (row.rel, f) {
            (Rel::Eq, _) => Rel::Eq,
            (Rel::Le, false) | (Rel::Ge, true) => Rel::Le,
            (Rel::Le, true) | (Rel::Ge, false) => Rel::Ge,
        });
    }
    let mut ncols = n;
    let mut slack_col = vec![None; m];
    for r in 0..m {
        if rel_eff[r] != Rel::Eq {
            slack_col[r] = Some(ncols);
            ncols += 1;
        }
    }
    let art_start = ncols;
    let mut art_col = vec![None; m];
    for r in 0..m {
        if rel_eff[r] != Rel::Le {
            art_col[r] = Some(ncols);
            ncols += 1;
        }
    }
    let rhs = ncols;
    let mut t = vec![vec![Q::zero(); ncols + 1]; m + 1];
    let mut basis = vec![0usize; m];
    for r in 0..m {
        let row = &model.rows[r];
        for (v, c) in &row.terms {
            t[r][*v] = if flip[r] { -c.clone() } else { c.clone() };
        }
        t[r][rhs] = if flip[r] { -row.rhs.clone() } else { row.rhs.clone() };
        if let Some(sc) = slack_col[r] {
            t[r][sc] = if rel_eff[r] == Rel::Le { Q::one() } else { -Q::one() };
        }
        match art_col[r] {
            Some(ac) => {
                t[r][ac] = Q::one();
                basis[r] = ac;
            }
            None => basis[r] = slack_col[r].expect("non-artificial rows carry a slack"),
        }
    }

    if art_start < rhs {
        // phase one: minimize the artificial total from the all-artificial
        // (plus slack) starting basis
        for r in 0..m {
            if let Some(ac) = art_col[r] {
                t[m][ac] = Q::one();
            }
        }
        for r in 0..m {
            if art_col[r].is_some() {
                let row_r = t[r].clone();
                for j in 0..=rhs {
                    t[m][j] -= &row_r[j];
                }
            }
        }
        let open = vec![false; ncols];
        simplex_loop(&mut t, &mut basis, &open, rhs)
            .map_err(|_| Error::Internal("phase one of the simplex ran unbounded".into()))?;
        if !t[m][rhs].is_zero() {
            return Err(Error::Internal(
                "model is infeasible; an emitted system always has a point".into(),
            ));
        }
        // drive leftover artificials out of the basis; a row that cannot
        // pivot is redundant and stays inert
        for r in 0..m {
            if basis[r] >= art_start {
                if let Some(c) = (0..art_start).find(|&j| !t[r][j].is_zero()) {
                    pivot(&mut t, &mut basis, r, c, rhs);
                }
            }
        }
    }

    // phase two over the real objective, artificials barred from entering
    let mut banned = vec![false; ncols];
    for b in banned.iter_mut().take(ncols).skip(art_start) {
        *b = true;
    }
    let cost = |j: usize| -> Q {
        if j < n {
            if model.maximize {
                -model.objective[j].clone()
            } else {
                model.objective[j].clone()
            }
        } else {
            Q::zero()
        }
    };
    for j in 0..=rhs {
        t[m][j] = Q::zero();
    }
    for j in 0..n {
        t[m][j] = cost(j);
    }
    for r in 0..m {
        let cb = cost(basis[r]);
        if !cb.is_zero() {
            let row_r = t[r].clone();
            for j in 0..=rhs {
                let d = &cb * &row_r[j];
                t[m][j] -= d;
            }
        }
    }
    simplex_loop(&mut t, &mut basis, &banned, rhs)
        .map_err(|_| Error::Internal("model is unbounded; an emitted system is always boxed".into()))?;

    let mut x = vec![Q::zero(); n];
    for r in 0..m {
        if basis[r] < n {
            x[basis[r]] = t[r][rhs].clone();
        }
    }
    let min_val = -t[m][rhs].clone();
    let opt = if model.maximize { -min_val } else { min_val };
    Ok((opt, x))
}

// --- model text format ----------------------------------------------------------

fn fmt_q_lpx(x: &Q) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn push_terms(out: &mut String, terms: &[(usize, Q)], vars: &[String]) {
    if terms.is_empty() {
        out.push('0');
        return;
    }
    for (i, (v, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push_str("- ");
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&fmt_q_lpx(&c.abs()));
        out.push(' ');
        out.push_str(&vars[*v]);
    }
}

/// Serializes a model: a VARS section, the objective under MAX or MIN, the
/// tagged rows under ST, and one explicit lower bound per variable under
/// BOUNDS. Deterministic for a given model.
pub fn write_lpx(model: &LinearModel) -> String {
    let mut s = String::new();
    s.push_str("VARS\n");
    for v in &model.vars {
        s.push_str(v);
        s.push('\n');
    }
    s.push_str(if model.maximize { "MAX\n" } else { "MIN\n" });
    let obj: Vec<(usize, Q)> = model
        .objective
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(v, c)| (v, c.clone()))
        .collect();
    push_terms(&mut s, &obj, &model.vars);
    s.push('\n');
    s.push_str("ST\n");
    for row in &model.rows {
        s.push_str(row.tag.label());
        s.push_str(": ");
        push_terms(&mut s, &row.terms, &model.vars);
        s.push(' ');
        s.push_str(row.rel.label());
        s.push(' ');
        s.push_str(&fmt_q_lpx(&row.rhs));
        s.push('\n');
    }
    s.push_str("BOUNDS\n");
    for v in &model.vars {
        s.push_str("0 <= ");
        s.push_str(v);
        s.push('\n');
    }
    s
}

fn valid_var_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_term_tokens(
    toks: &[&str],
    index: &BTreeMap<&str, usize>,
) -> Result<Vec<(usize, Q)>, Error> {
    if toks == ["0"] {
        return Ok(Vec::new());
    }
    let mut merged: BTreeMap<usize, Q> = BTreeMap::new();
    let mut i = 0;
    while i < toks.len() {
        let sign = match toks[i] {
            "+" => {
                i += 1;
                Q::one()
            }
            "-" => {
                i += 1;
                -Q::one()
            }
            _ if i == 0 => Q::one(),
            other => {
                return Err(Error::Input(format!("expected + or - before term, found {other:?}")))
            }
        };
        let coef = toks
            .get(i)
            .ok_or_else(|| Error::Input("term is missing its coefficient".into()))
            .and_then(|s| crate::rational::parse_q(s))?;
        let name = toks
            .get(i + 1)
            .ok_or_else(|| Error::Input("term is missing its variable".into()))?;
        let v = *index
            .get(name)
            .ok_or_else(|| Error::Input(format!("undeclared variable {name:?}")))?;
        let slot = merged.entry(v).or_insert_with(Q::zero);
        *slot += sign * coef;
        i += 2;
    }
    Ok(merged.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

/// Parses the text format produced by `write_lpx`. Anything malformed is an
/// input error.
pub fn parse_lpx(text: &str) -> Result<LinearModel, Error> {
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let mut i = 0;
    if lines.get(i) != Some(&"VARS") {
        return Err(Error::Input("expected a VARS header".into()));
    }
    i += 1;
    let mut vars: Vec<String> = Vec::new();
    while i < lines.len() && lines[i] != "MAX" && lines[i] != "MIN" {
        if !valid_var_name(lines[i]) {
            return Err(Error::Input(format!("bad variable name {:?}", lines[i])));
        }
        vars.push(lines[i].to_string());
        i += 1;
    }
    if i == lines.len() {
        return Err(Error::Input("missing the MAX or MIN section".into()));
    }
    let maximize = lines[i] == "MAX";
    i += 1;
    let index: BTreeMap<&str, usize> =
        vars.iter().enumerate().map(|(k, v)| (v.as_str(), k)).collect();
    if index.len() != vars.len() {
        return Err(Error::Input("duplicate variable declaration".into()));
    }
    let obj_line = lines
        .get(i)
        .ok_or_else(|| Error::Input("missing the objective line".into()))?;
    let obj_toks: Vec<&str> = obj_line.split_whitespace().collect();
    let mut objective = vec![Q::zero(); vars.len()];
    for (v, c) in parse_term_tokens(&obj_toks, &index)? {
        objective[v] = c;
    }
    i += 1;
    if lines.get(i) != Some(&"ST") {
        return Err(Error::Input("expected an ST header".into()));
    }
    i += 1;
    let mut rows = Vec::new();
    while i < lines.len() && lines[i] != "BOUNDS" {
        let (tag_s, rest) = lines[i]
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("row without a tag: {:?}", lines[i])))?;
        let tag = Provenance::from_label(tag_s.trim())
            .ok_or_else(|| Error::Input(format!("unknown row tag {:?}", tag_s.trim())))?;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        if toks.len() < 2 {
            return Err(Error::Input(format!("row is too short: {:?}", lines[i])));
        }
        let rel = match toks[toks.len() - 2] {
            "<=" => Rel::Le,
            "=" => Rel::Eq,
            ">=" => Rel::Ge,
            other => return Err(Error::Input(format!("unknown relation {other:?}"))),
        };
        let rhs = crate::rational::parse_q(toks[toks.len() - 1])?;
        let terms = parse_term_tokens(&toks[..toks.len() - 2], &index)?;
        rows.push(Constraint { tag, terms, rel, rhs });
        i += 1;
    }
    if lines.get(i) != Some(&"BOUNDS") {
        return Err(Error::Input("expected a BOUNDS header".into()));
    }
    i += 1;
    let mut covered = vec![false; vars.len()];
    while i < lines.len() {
        let toks: Vec<&str> = lines[i].split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "0" || toks[1] != "<=" {
            return Err(Error::Input(format!("malformed bound line {:?}", lines[i])));
        }
        let v = *index
            .get(toks[2])
            .ok_or_else(|| Error::Input(format!("bound on undeclared variable {:?}", toks[2])))?;
        covered[v] = true;
        i += 1;
    }
    if let Some(v) = covered.iter().position(|&c| !c) {
        return Err(Error::Input(format!("missing the lower bound line for {}", vars[v])));
    }
    let model = LinearModel { maximize, vars, objective, rows };
    model
        .validate()
        .map_err(|e| Error::Input(format!("parsed model is inconsistent: {e}")))?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::Edge;
    use crate::oracle::{oracle_mwss, oracle_mwss_embedded};
    use crate::rational::{qi, qr};
    use crate::solve::{solve, SolveOptions};
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeSet;

    fn embed(weights: Vec<Q>, spec: &[(VertexId, VertexId, bool)]) -> EmbeddedGraph {
        let n = weights.len();
        let mut rot: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for (e, &(u, v, sig)) in spec.iter().enumerate() {
            edges.push(Edge { u, v, sig });
            rot[u].push(e);
            rot[v].push(e);
        }
        EmbeddedGraph::new(weights, edges, rot).unwrap()
    }

    fn proj_triangle(w: i64) -> EmbeddedGraph {
        embed(vec![qi(w); 3], &[(0, 1, true), (1, 2, true), (2, 0, true)])
    }

    fn k4_with_genus(genus: usize) -> EmbeddedGraph {
        let pairs: [(VertexId, VertexId); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for sig_mask in 0..64u32 {
            let edges: Vec<Edge> = pairs
                .iter()
                .enumerate()
                .map(|(e, &(u, v))| Edge { u, v, sig: sig_mask >> e & 1 == 1 })
                .collect();
            for rot_mask in 0..16u32 {
                let mut rot: Vec<Vec<EdgeId>> = vec![Vec::new(); 4];
                for v in 0..4 {
                    let mut inc: Vec<EdgeId> = (0..6).filter(|&e| edges[e].touches(v)).collect();
                    if rot_mask >> v & 1 == 1 {
                        inc.swap(1, 2);
                    }
                    rot[v] = inc;
                }
                let g = EmbeddedGraph::new(vec![qi(1); 4], edges.clone(), rot).unwrap();
                if g.euler_genus().unwrap() == genus && g.is_parity_consistent().unwrap() {
                    return g;
                }
            }
        }
        panic!("no parity-consistent K4 embedding of genus {genus} found");
    }

    fn stable_sets(g: &EmbeddedGraph) -> Vec<Vec<VertexId>> {
        let mut out = Vec::new();
        'mask: for mask in 0u32..(1u32 << g.n()) {
            for e in 0..g.m() {
                let ed = g.edge(e);
                if mask >> ed.u & 1 == 1 && mask >> ed.v & 1 == 1 {
                    continue 'mask;
                }
            }
            out.push((0..g.n()).filter(|v| mask >> v & 1 == 1).collect());
        }
        out
    }

    fn check_all_completions(g: &EmbeddedGraph, ef: &StabEf) {
        for set in stable_sets(g) {
            let assign = complete_stable_indicator(g, ef, &set).unwrap();
            assert_eq!(assignment_satisfies(&ef.model, &assign), None, "set {set:?}");
            let val: Q = ef.model.objective.iter().zip(&assign).map(|(c, a)| c * a).sum();
            let want: Q = set.iter().map(|&v| g.weight(v).clone()).sum();
            assert_eq!(val, want, "set {set:?}");
        }
    }

    #[test]
    fn triangle_model_matches_its_known_optimum() {
        let g = proj_triangle(2);
        let ef = emit_stab_ef(&g, 10, EF_ROW_CAP).unwrap();
        let (opt, x) = lp_optimize(&ef.model).unwrap();
        assert_eq!(opt, qi(2));
        for v in 0..3 {
            assert!(x[ef.x_vars[v]] >= Q::zero() && x[ef.x_vars[v]] <= Q::one());
        }
        let sol = solve(&g, &SolveOptions::default()).unwrap();
        assert_eq!(opt, sol.weight);

        let mut zeroed = ef.model.clone();
        zeroed.objective = vec![Q::zero(); zeroed.vars.len()];
        assert_eq!(lp_optimize(&zeroed).unwrap().0, qi(0));
    }

    #[test]
    fn bipartite_inputs_reduce_to_edge_and_box_rows() {
        let g = embed(
            vec![qi(1); 4],
            &[(0, 1, false), (1, 2, false), (2, 3, false), (3, 0, false)],
        );
        let ef = emit_stab_ef(&g, 10, EF_ROW_CAP).unwrap();
        assert_eq!(ef.model.vars.len(), 4);
        assert_eq!(ef.model.rows.len(), 8);
        assert!(ef
            .model
            .rows
            .iter()
            .all(|r| matches!(r.tag, Provenance::BoxBound | Provenance::SigmaPullback)));
        assert_eq!(lp_optimize(&ef.model).unwrap().0, qi(2));
    }

    #[test]
    fn planar_odd_cycles_branch_without_flow_systems() {
        let g = embed(
            vec![qi(1); 5],
            &[(0, 1, false), (1, 2, false), (2, 3, false), (3, 4, false), (4, 0, false)],
        );
        let ef = emit_stab_ef(&g, 10, EF_ROW_CAP).unwrap();
        assert!(ef.model.rows.iter().any(|r| r.tag == Provenance::Balas));
        assert!(ef.model.rows.iter().all(|r| r.tag != Provenance::FlowConservation));
        assert_eq!(lp_optimize(&ef.model).unwrap().0, qi(2));
        check_all_completions(&g, &ef);
    }

    #[test]
    fn stable_indicators_extend_to_feasible_points() {
        let g = proj_triangle(1);
        let ef = emit_stab_ef(&g, 10, EF_ROW_CAP).unwrap();
        check_all_completions(&g, &ef);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let g = random_graph(&mut rng, 7, 0.35);
        let ef = emit_stab_ef(&g, 10, EF_ROW_CAP).unwrap();
        check_all_completions(&g, &ef);
    }

    #[test]
    fn double_crosscap_k4_gets_a_multi_part_disjunction() {
        let g = k4_with_genus(2);
        let ef = emit_stab_ef(&g, 10, EF_ROW_CAP).unwrap();
        let mut saw_flow = false;
        for br in &ef.branches {
            for blk in &br.blocks {
                let flow = match &blk.kind {
                    BlockKind::Flow(f) => f,
                    BlockKind::Bipartite => continue,
                };
                saw_flow = true;
                assert!(flow.disjuncts.iter().any(|p| p.len() == 2));
                assert!(flow.disjuncts.iter().all(|p| p.len() <= 2));
                // every part's balance system has the same arc pattern, so
                // all disjuncts share one recession cone
                let arcs_n = flow.arcs.len();
                let mut patterns: Vec<BTreeSet<Vec<(usize, i8)>>> = Vec::new();
                for (d, parts) in flow.disjuncts.iter().enumerate() {
                    for i in 0..parts.len() {
                        let base = flow.flow_base[d][i];
                        let mut pat = BTreeSet::new();
                        for row in &ef.model.rows {
                            if row.tag != Provenance::FlowConservation {
                                continue;
                            }
                            let mine: Vec<(usize, i8)> = row
                                .terms
                                .iter()
                                .filter(|(v, _)| *v >= base && *v < base + arcs_n)
                                .map(|(v, c)| (v - base, if c.is_positive() { 1 } else { -1 }))
                                .collect();
                            if !mine.is_empty() {
                                pat.insert(mine);
                            }
                        }
                        patterns.push(pat);
                    }
                }
                for p in &patterns {
                    assert_eq!(p, &patterns[0]);
                }
            }
        }
        assert!(saw_flow);
        check_all_completions(&g, &ef);
    }

    fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> EmbeddedGraph {
        let mut spec = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(p) {
                    spec.push((u, v, rng.gen_bool(0.5)));
                }
            }
        }
        let weights: Vec<Q> =
            (0..n).map(|_| qr(rng.gen_range(1..=12), rng.gen_range(1..=4))).collect();
        embed(weights, &spec)
    }

    #[test]
    fn lp_matches_the_solver_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4242);
        for trial in 0..8 {
            let n = rng.gen_range(4..=8);
            let g = random_graph(&mut rng, n, 0.3);
            let ef = emit_stab_ef(&g, 10, EF_ROW_CAP).unwrap();
            let (opt, _) = lp_optimize(&ef.model).unwrap();
            let sol = solve(&g, &SolveOptions::default()).unwrap();
            assert_eq!(opt, sol.weight, "trial {trial}");

            // the same emitted system answers any non-negative objective
            let pairs: Vec<(usize, usize)> =
                (0..g.m()).map(|e| (g.edge(e).u, g.edge(e).v)).collect();
            let w: Vec<Q> =
                (0..n).map(|_| qr(rng.gen_range(0..=9), rng.gen_range(1..=3))).collect();
            let mut remodel = ef.model.clone();
            remodel.objective = vec![Q::zero(); remodel.vars.len()];
            for v in 0..n {
                remodel.objective[ef.x_vars[v]] = w[v].clone();
            }
            let (ropt, _) = lp_optimize(&remodel).unwrap();
            let (oracle, _) = oracle_mwss(n, &pairs, &w).unwrap();
            assert_eq!(ropt, oracle, "trial {trial} reweighted");
        }
    }

    #[test]
    fn isolated_vertices_and_empty_graphs_stay_trivial() {
        let empty = EmbeddedGraph::new(Vec::new(), Vec::new(), Vec::new()).unwrap();
        let ef = emit_stab_ef(&empty, 10, EF_ROW_CAP).unwrap();
        assert_eq!(lp_optimize(&ef.model).unwrap().0, qi(0));

        let iso = embed(vec![qi(4), qi(-2), qi(3)], &[]);
        let ef = emit_stab_ef(&iso, 10, EF_ROW_CAP).unwrap();
        let (opt, x) = lp_optimize(&ef.model).unwrap();
        assert_eq!(opt, qi(7));
        assert_eq!(x[ef.x_vars[1]], Q::zero());
        let (ow, _) = oracle_mwss_embedded(&iso).unwrap();
        assert_eq!(opt, ow);
    }

    #[test]
    fn row_cap_refusal_reports_the_computed_size() {
        let g = proj_triangle(1);
        match emit_stab_ef(&g, 10, 3) {
            Err(Error::TooLarge(msg)) => assert!(msg.contains("constraints (cap 3)"), "{msg}"),
            Err(other) => panic!("expected a size refusal, got {other:?}"),
            Ok(_) => panic!("expected a size refusal, got a model"),
        }
    }

    #[test]
    fn simplex_handles_the_textbook_cases() {
        let box_row = |terms: Vec<(usize, Q)>, rel: Rel, rhs: Q| Constraint {
            tag: Provenance::BoxBound,
            terms,
            rel,
            rhs,
        };
        let two = LinearModel {
            maximize: true,
            vars: vec!["a".into(), "b".into()],
            objective: vec![qi(1), qi(1)],
            rows: vec![
                box_row(vec![(0, qi(1)), (1, qi(1))], Rel::Le, qr(3, 2)),
                box_row(vec![(0, qi(1))], Rel::Le, qi(1)),
                box_row(vec![(1, qi(1))], Rel::Le, qi(1)),
            ],
        };
        let (opt, x) = lp_optimize(&two).unwrap();
        assert_eq!(opt, qr(3, 2));
        assert_eq!(&x[0] + &x[1], qr(3, 2));

        let lower = LinearModel {
            maximize: false,
            vars: vec!["a".into()],
            objective: vec![qi(1)],
            rows: vec![box_row(vec![(0, qi(1))], Rel::Ge, qr(7, 4))],
        };
        assert_eq!(lp_optimize(&lower).unwrap().0, qr(7, 4));

        let infeasible = LinearModel {
            maximize: true,
            vars: vec!["a".into()],
            objective: vec![qi(0)],
            rows: vec![
                box_row(vec![(0, qi(1))], Rel::Eq, qi(2)),
                box_row(vec![(0, qi(1))], Rel::Le, qi(1)),
            ],
        };
        match lp_optimize(&infeasible) {
            Err(Error::Internal(msg)) => assert!(msg.contains("infeasible"), "{msg}"),
            other => panic!("expected an infeasibility report, got {other:?}"),
        }

        let unbounded = LinearModel {
            maximize: true,
            vars: vec!["a".into()],
            objective: vec![qi(1)],
            rows: Vec::new(),
        };
        match lp_optimize(&unbounded) {
            Err(Error::Internal(msg)) => assert!(msg.contains("unbounded"), "{msg}"),
            other => panic!("expected an unboundedness report, got {other:?}"),
        }
    }

    #[test]
    fn model_text_round_trips_byte_for_byte() {
        let c5 = embed(
            vec![qi(1); 5],
            &[(0, 1, false), (1, 2, false), (2, 3, false), (3, 4, false), (4, 0, false)],
        );
        for g in [proj_triangle(2), c5] {
            let ef = emit_stab_ef(&g, 10, EF_ROW_CAP).unwrap();
            let text = write_lpx(&ef.model);
            let back = parse_lpx(&text).unwrap();
            assert_eq!(write_lpx(&back), text);
            let (a, _) = lp_optimize(&ef.model).unwrap();
            let (b, _) = lp_optimize(&back).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn malformed_model_text_is_an_input_error() {
        let cases = [
            "",
            "NOPE\n",
            "VARS\nx\nMAX\n1 x\nST\nbox: 1 y <= 1\nBOUNDS\n0 <= x\n",
            "VARS\nx\nMAX\n1 x\nST\nweird: 1 x <= 1\nBOUNDS\n0 <= x\n",
            "VARS\nx\nMAX\n1 x\nST\nbox: 1 x <= 1/0\nBOUNDS\n0 <= x\n",
            "VARS\nx\nMAX\n1 x\nST\nbox: 1 x <= 1\nBOUNDS\n",
            "VARS\nx\nMAX\n1 x\nST\nbox: 1 x ?? 1\nBOUNDS\n0 <= x\n",
            "VARS\nx\nx\nMAX\n1 x\nST\nBOUNDS\n0 <= x\n",
        ];
        for text in cases {
            match parse_lpx(text) {
                Err(Error::Input(_)) => {}
                other => panic!("{text:?} should be an input error, got {other:?}"),
            }
        }
    }
}
