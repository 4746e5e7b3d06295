//! Seeded instance families for tests and benchmarks. Each family makes
//! structural claims (surface, parity, planted substructures); the generator
//! re-checks those claims on every emitted instance before returning it.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{Edge, EmbeddedGraph, EdgeId};
use crate::error::Error;
use crate::rational::{qr, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// antipodally identified grid: an even quadrangulation of the
    /// projective plane; bipartite exactly when rows + cols is even
    ProjQuad,
    /// triangle with every edge 1-sided, the smallest odd projective block
    ProjTriangle,
    /// K4 quadrangulating the projective plane
    ProjK4,
    /// outerplanar: an odd rim cycle plus random non-crossing chords
    Planar,
    /// two 1-sided odd cycle gadgets joined by a path, Euler genus 2
    Genus2,
    /// random graph, random signature and rotations, signed weights
    Random,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::ProjQuad,
        Family::ProjTriangle,
        Family::ProjK4,
        Family::Planar,
        Family::Genus2,
        Family::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ProjQuad => "proj-quad",
            Family::ProjTriangle => "proj-triangle",
            Family::ProjK4 => "proj-k4",
            Family::Planar => "planar",
            Family::Genus2 => "genus2",
            Family::Random => "random",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family, Error> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
                Error::Input(format!("unknown family {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone)]
pub struct GenParams {
    pub family: Family,
    pub seed: u64,
    /// proj-quad only: grid rows; both default from the seed
    pub rows: Option<usize>,
    /// proj-quad only: grid cols
    pub cols: Option<usize>,
}

impl GenParams {
    pub fn new(family: Family, seed: u64) -> GenParams {
        GenParams { family, seed, rows: None, cols: None }
    }
}

/// Builds one instance. Deterministic: equal params give equal graphs.
pub fn generate(params: &GenParams) -> Result<EmbeddedGraph, Error> {
    if params.family != Family::ProjQuad && (params.rows.is_some() || params.cols.is_some()) {
        return Err(Error::Input(format!(
            "family {} takes no rows/cols parameters",
            params.family.name()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    match params.family {
        Family::ProjQuad => {
            // default sizes stay within oracle reach and avoid the r + s
            // parity bias (two of the four are non-bipartite)
            let sizes = [(2, 3), (3, 3), (3, 4), (2, 5)];
            let pick = sizes[(params.seed % 4) as usize];
            let r = params.rows.unwrap_or(pick.0);
            let s = params.cols.unwrap_or(pick.1);
            proj_quad(r, s, &mut rng)
        }
        Family::ProjTriangle => proj_triangle(&mut rng),
        Family::ProjK4 => proj_k4(&mut rng),
        Family::Planar => planar_odd(&mut rng),
        Family::Genus2 => genus2(&mut rng),
        Family::Random => random_signed(&mut rng),
    }
}

fn positive_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| qr(rng.gen_range(1..=12), rng.gen_range(1..=4))).collect()
}

// --- projective grid -------------------------------------------------------

type Pt = (usize, usize);

/// Square edge: horizontal h(x, y) joins (x, y)-(x+1, y), vertical v(x, y)
/// joins (x, y)-(x, y+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Sq {
    H(usize, usize),
    V(usize, usize),
}

impl Sq {
    fn ends(self) -> (Pt, Pt) {
        match self {
            Sq::H(x, y) => ((x, y), (x + 1, y)),
            Sq::V(x, y) => ((x, y), (x, y + 1)),
        }
    }
}

/// The r x s grid on a square with antipodal boundary identification: an
/// even quadrangulation of the projective plane with r*s faces. Interior
/// vertices keep the planar rotation; a glued boundary vertex concatenates
/// its two half-stars, the partner's traversed in the opposite sense, and
/// edge signatures record which attachments sit on the flipped side.
fn proj_quad(r: usize, s: usize, rng: &mut ChaCha8Rng) -> Result<EmbeddedGraph, Error> {
    if r < 2 || s < 2 {
        return Err(Error::Input(format!(
            "proj-quad needs rows, cols >= 2, got {r} x {s}"
        )));
    }
    // a side of length 2 facing an even side puts the grid centre next to
    // an identified pair, which would create a parallel edge
    if (r == 2 && s % 2 == 0) || (s == 2 && r % 2 == 0) {
        return Err(Error::Input(format!(
            "proj-quad {r} x {s} degenerates (side 2 against an even side); \
             change either dimension"
        )));
    }

    let antip = |p: Pt| -> Pt { (r - p.0, s - p.1) };
    let boundary = |p: Pt| -> bool { p.0 == 0 || p.0 == r || p.1 == 0 || p.1 == s };
    // glued classes are named by the member lowest in (y, x) order
    let primary = |p: Pt| -> Pt {
        if !boundary(p) {
            return p;
        }
        let q = antip(p);
        if (p.1, p.0) <= (q.1, q.0) {
            p
        } else {
            q
        }
    };

    let mut class_id = std::collections::HashMap::new();
    let mut reps: Vec<Pt> = Vec::new();
    for y in 0..=s {
        for x in 0..=r {
            let p = (x, y);
            if primary(p) == p {
                class_id.insert(p, reps.len());
                reps.push(p);
            }
        }
    }
    let vid = |p: Pt| -> usize { class_id[&primary(p)] };

    let h_exists = |x: i64, y: i64| x >= 0 && (x as usize) < r && y >= 0 && y as usize <= s;
    let v_exists = |x: i64, y: i64| x >= 0 && x as usize <= r && y >= 0 && (y as usize) < s;
    // perimeter edges come in identified pairs; the bottom or left copy is
    // kept and the top or right copy aliases to it
    let pair_of = |e: Sq| -> Option<Sq> {
        match e {
            Sq::H(x, 0) => Some(Sq::H(r - x - 1, s)),
            Sq::H(x, y) if y == s => Some(Sq::H(r - x - 1, 0)),
            Sq::V(0, y) => Some(Sq::V(r, s - y - 1)),
            Sq::V(x, y) if x == r => Some(Sq::V(0, s - y - 1)),
            _ => None,
        }
    };
    let canonical = |e: Sq| -> bool {
        match e {
            Sq::H(_, y) => y != s,
            Sq::V(x, _) => x != r,
        }
    };

    let mut edge_id: std::collections::HashMap<Sq, usize> = std::collections::HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    // a dart on the secondary member of a glued class sits on the flipped
    // half-star; the signature is the xor of the two endpoint flags
    let flip = |p: Pt| -> bool { boundary(p) && primary(p) == p };
    let mut all_sq: Vec<Sq> = Vec::new();
    for y in 0..=s {
        for x in 0..r {
            all_sq.push(Sq::H(x, y));
        }
    }
    for y in 0..s {
        for x in 0..=r {
            all_sq.push(Sq::V(x, y));
        }
    }
    for &e in &all_sq {
        if !canonical(e) {
            continue;
        }
        let (pu, pv) = e.ends();
        let id = edges.len();
        edges.push(Edge { u: vid(pu), v: vid(pv), sig: flip(pu) ^ flip(pv) });
        edge_id.insert(e, id);
        if let Some(twin) = pair_of(e) {
            edge_id.insert(twin, id);
        }
    }

    // compass cycle in clockwise order; a boundary vertex starts just past
    // its outward (missing) direction so the half-star is contiguous
    let star_cw = |p: Pt| -> Vec<Sq> {
        let (x, y) = (p.0 as i64, p.1 as i64);
        let compass = [
            (Sq::H(p.0, p.1), h_exists(x, y)),
            (Sq::V(p.0, p.1.wrapping_sub(1)), v_exists(x, y - 1)),
            (Sq::H(p.0.wrapping_sub(1), p.1), h_exists(x - 1, y)),
            (Sq::V(p.0, p.1), v_exists(x, y)),
        ];
        let k = compass.iter().position(|&(_, ok)| !ok).unwrap_or(3);
        (1..=4)
            .map(|i| compass[(k + i) % 4])
            .filter(|&(_, ok)| ok)
            .map(|(e, _)| e)
            .collect()
    };

    let mut rot: Vec<Vec<EdgeId>> = Vec::with_capacity(reps.len());
    for &p in &reps {
        let mut star = if boundary(p) {
            let mut star = star_cw(p);
            let q = antip(p);
            star.extend(star_cw(q).into_iter().filter(|&e| pair_of(e).is_none()));
            star
        } else {
            // interior: plain counter-clockwise order
            vec![Sq::H(p.0, p.1), Sq::V(p.0, p.1), Sq::H(p.0 - 1, p.1), Sq::V(p.0, p.1 - 1)]
        };
        star.dedup_by_key(|e| edge_id[e]);
        rot.push(star.into_iter().map(|e| edge_id[&e]).collect());
    }

    let weights = positive_weights(rng, reps.len());
    let g = EmbeddedGraph::new(weights, edges, rot)?;

    let expect_n = (r - 1) * (s - 1) + r + s;
    if g.n() != expect_n || g.m() != 2 * r * s {
        return Err(Error::Internal(format!(
            "proj-quad {r} x {s} has {} vertices and {} edges, expected {expect_n} and {}",
            g.n(),
            g.m(),
            2 * r * s
        )));
    }
    let faces = g.trace_faces()?;
    if faces.count() != r * s || faces.walks.iter().any(|w| w.len() != 4) {
        return Err(Error::Internal(format!(
            "proj-quad {r} x {s} is not a quadrangulation ({} faces)",
            faces.count()
        )));
    }
    check(g.euler_genus()? == 1, "proj-quad does not sit on the projective plane")?;
    check(g.is_parity_consistent()?, "proj-quad has a 2-sided odd closed walk")?;
    check(
        g.is_bipartite() == ((r + s) % 2 == 0),
        "proj-quad bipartite exactly when rows + cols is even",
    )?;
    Ok(g)
}

// --- fixed projective fixtures ---------------------------------------------

fn proj_triangle(rng: &mut ChaCha8Rng) -> Result<EmbeddedGraph, Error> {
    let edges = vec![
        Edge { u: 0, v: 1, sig: true },
        Edge { u: 1, v: 2, sig: true },
        Edge { u: 2, v: 0, sig: true },
    ];
    let rot = vec![vec![0, 2], vec![0, 1], vec![1, 2]];
    let g = EmbeddedGraph::new(positive_weights(rng, 3), edges, rot)?;
    check(g.euler_genus()? == 1, "projective triangle genus")?;
    check(g.is_parity_consistent()?, "projective triangle parity")?;
    Ok(g)
}

fn proj_k4(rng: &mut ChaCha8Rng) -> Result<EmbeddedGraph, Error> {
    // quadrangulation of the projective plane with three 4-gonal faces
    let spec = [
        (0, 1, true),
        (0, 2, true),
        (0, 3, false),
        (1, 2, true),
        (1, 3, false),
        (2, 3, false),
    ];
    let edges: Vec<Edge> = spec.iter().map(|&(u, v, sig)| Edge { u, v, sig }).collect();
    let rot = vec![vec![0, 1, 2], vec![0, 4, 3], vec![1, 3, 5], vec![2, 4, 5]];
    let g = EmbeddedGraph::new(positive_weights(rng, 4), edges, rot)?;
    let faces = g.trace_faces()?;
    check(
        faces.count() == 3 && faces.walks.iter().all(|w| w.len() == 4),
        "projective K4 quadrangulation",
    )?;
    check(g.euler_genus()? == 1, "projective K4 genus")?;
    check(g.is_parity_consistent()?, "projective K4 parity")?;
    Ok(g)
}

// --- planar with planted odd cycles ----------------------------------------

/// Odd rim cycle plus random non-crossing chords, embedded with every vertex
/// on the outer face. All odd cycles are 2-sided, so the transversal stage
/// has real work on these.
fn planar_odd(rng: &mut ChaCha8Rng) -> Result<EmbeddedGraph, Error> {
    let n = 5 + 2 * rng.gen_range(0..=3usize);
    let mut present = vec![vec![false; n]; n];
    let mut pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for &(u, v) in &pairs {
        present[u][v] = true;
        present[v][u] = true;
    }
    let crosses = |a: usize, b: usize, c: usize, d: usize| -> bool {
        // chords cross iff exactly one of c, d lies strictly between a and b
        let between = |x: usize| -> bool {
            let rel = |t: usize| (t + n - a) % n;
            0 < rel(x) && rel(x) < rel(b)
        };
        between(c) != between(d)
    };
    let want = rng.gen_range(0..=n.saturating_sub(4));
    let mut chords: Vec<(usize, usize)> = Vec::new();
    let mut tries = 0;
    while chords.len() < want && tries < 40 {
        tries += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let (a, b) = (a.min(b), a.max(b));
        if b - a < 2 || (a == 0 && b == n - 1) || present[a][b] {
            continue;
        }
        if chords.iter().any(|&(c, d)| crosses(a, b, c, d) && crosses(c, d, a, b)) {
            continue;
        }
        present[a][b] = true;
        present[b][a] = true;
        chords.push((a, b));
        pairs.push((a, b));
    }

    let mut edges = Vec::new();
    let mut inc: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); n];
    for (e, &(u, v)) in pairs.iter().enumerate() {
        edges.push(Edge { u, v, sig: false });
        inc[u].push((v, e));
        inc[v].push((u, e));
    }
    // disk embedding: order each star by circular distance to the neighbor
    let rot: Vec<Vec<EdgeId>> = inc
        .into_iter()
        .enumerate()
        .map(|(v, mut star)| {
            star.sort_by_key(|&(w, _)| (w + n - v) % n);
            star.into_iter().map(|(_, e)| e).collect()
        })
        .collect();
    let g = EmbeddedGraph::new(positive_weights(rng, n), edges, rot)?;
    check(g.euler_genus()? == 0, "planar family genus")?;
    check(!g.is_bipartite(), "planar family keeps its odd rim")?;
    Ok(g)
}

// --- Euler genus 2 ----------------------------------------------------------

/// Two blocks, each a 1-sided odd cycle (genus 1), joined by a path. Euler
/// genus is additive over the bridge, so the whole sits on genus 2 while
/// every block stays projective.
fn genus2(rng: &mut ChaCha8Rng) -> Result<EmbeddedGraph, Error> {
    let len_a = if rng.gen_bool(0.5) { 3 } else { 5 };
    let len_b = if rng.gen_bool(0.5) { 3 } else { 5 };
    let bridge = rng.gen_range(1..=3usize);

    let mut edges: Vec<Edge> = Vec::new();
    let mut rot: Vec<Vec<EdgeId>> = Vec::new();
    let cycle = |base: usize, len: usize, edges: &mut Vec<Edge>, rot: &mut Vec<Vec<EdgeId>>| {
        let first = edges.len();
        for i in 0..len {
            edges.push(Edge { u: base + i, v: base + (i + 1) % len, sig: true });
        }
        for i in 0..len {
            // at vertex i: edge from the predecessor, then to the successor
            rot.push(vec![first + (i + len - 1) % len, first + i]);
        }
    };
    cycle(0, len_a, &mut edges, &mut rot);
    cycle(len_a, len_b, &mut edges, &mut rot);
    let n = len_a + len_b + bridge - 1;
    for _ in 0..bridge - 1 {
        rot.push(Vec::new());
    }
    // path from vertex 0 over the fresh vertices to the second cycle's root
    let mut prev = 0usize;
    for k in 0..bridge {
        let next = if k + 1 == bridge { len_a } else { len_a + len_b + k };
        let e = edges.len();
        edges.push(Edge { u: prev, v: next, sig: false });
        rot[prev].push(e);
        rot[next].push(e);
        prev = next;
    }

    let g = EmbeddedGraph::new(positive_weights(rng, n), edges, rot)?;
    check(g.euler_genus()? == 2, "genus2 family surface")?;
    check(g.is_parity_consistent()?, "genus2 family parity")?;
    Ok(g)
}

// --- unstructured -----------------------------------------------------------

/// Random signed graph with random rotations and signed rational weights.
/// Makes no surface claims; it exists to shake weight handling.
fn random_signed(rng: &mut ChaCha8Rng) -> Result<EmbeddedGraph, Error> {
    let n = rng.gen_range(4..=10usize);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(0.3) {
                pairs.push((u, v, rng.gen_bool(0.4)));
            }
        }
    }
    let mut edges = Vec::new();
    let mut rot: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for (e, &(u, v, sig)) in pairs.iter().enumerate() {
        edges.push(Edge { u, v, sig });
        rot[u].push(e);
        rot[v].push(e);
    }
    for star in &mut rot {
        for i in (1..star.len()).rev() {
            star.swap(i, rng.gen_range(0..=i));
        }
    }
    let weights: Vec<Q> =
        (0..n).map(|_| qr(rng.gen_range(-6..=12), rng.gen_range(1..=4))).collect();
    EmbeddedGraph::new(weights, edges, rot)
}

fn check(ok: bool, claim: &str) -> Result<(), Error> {
    if ok {
        Ok(())
    } else {
        Err(Error::Internal(format!("generated instance violates its family claim: {claim}")))
    }
}
