//! Instance file I/O.
//!
//! UTF-8 JSON: `{"vertices":[{"id":..,"w":"p/q"}], "edges":[{"id":..,"u":..,
//! "v":..,"sig":..}], "rot":{"<vertex id>":[edge ids in cyclic order]}}`.
//! Edge ids are dense from 0; vertex ids are arbitrary distinct non-negative
//! integers. The writer is canonical (sorted ids, fixed layout), so files it
//! produces round-trip bit-exactly through the reader.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::embedding::{Edge, EmbeddedGraph};
use crate::error::Error;
use crate::rational::{format_q, parse_q};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileVertex {
    id: u64,
    w: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileEdge {
    id: u64,
    u: u64,
    v: u64,
    sig: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileInstance {
    vertices: Vec<FileVertex>,
    edges: Vec<FileEdge>,
    rot: HashMap<String, Vec<u64>>,
}

/// Parses an instance from JSON text.
pub fn read_instance_str(text: &str) -> Result<EmbeddedGraph, Error> {
    let file: FileInstance = serde_json::from_str(text).map_err(|e| {
        if e.to_string().contains("missing field `rot`") {
            Error::Input(
                "instance has no rotation system: abstract graphs are not accepted; \
                 supply a combinatorial embedding under \"rot\""
                    .into(),
            )
        } else {
            Error::Input(format!("bad instance JSON: {e}"))
        }
    })?;
    let n = file.vertices.len();
    let m = file.edges.len();

    let mut vindex: HashMap<u64, usize> = HashMap::with_capacity(n);
    let mut vlabels = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (i, v) in file.vertices.iter().enumerate() {
        if vindex.insert(v.id, i).is_some() {
            return Err(Error::Input(format!("duplicate vertex id {}", v.id)));
        }
        vlabels.push(v.id);
        weights.push(parse_q(&v.w)?);
    }

    // edge ids must be exactly 0..m
    let mut edges = vec![None; m];
    for e in &file.edges {
        let id = e.id as usize;
        if e.id >= m as u64 || edges[id].is_some() {
            return Err(Error::Input(format!(
                "edge ids must be dense from 0; id {} is out of range or repeated",
                e.id
            )));
        }
        let u = *vindex
            .get(&e.u)
            .ok_or_else(|| Error::Input(format!("edge {} references unknown vertex {}", e.id, e.u)))?;
        let v = *vindex
            .get(&e.v)
            .ok_or_else(|| Error::Input(format!("edge {} references unknown vertex {}", e.id, e.v)))?;
        edges[id] = Some(Edge { u, v, sig: e.sig });
    }
    let edges: Vec<Edge> = edges.into_iter().map(|e| e.unwrap()).collect();

    let mut rot = vec![Vec::new(); n];
    for (key, list) in &file.rot {
        let label: u64 = key
            .parse()
            .map_err(|_| Error::Input(format!("rotation key {key:?} is not a vertex id")))?;
        let &i = vindex
            .get(&label)
            .ok_or_else(|| Error::Input(format!("rotation names unknown vertex {label}")))?;
        rot[i] = list
            .iter()
            .map(|&e| {
                if e < m as u64 {
                    Ok(e as usize)
                } else {
                    Err(Error::Input(format!("rotation at vertex {label} names unknown edge {e}")))
                }
            })
            .collect::<Result<_, _>>()?;
    }
    for (i, v) in file.vertices.iter().enumerate() {
        if !file.rot.contains_key(&v.id.to_string()) && {
            // vertices of degree 0 may omit their (empty) rotation
            edges.iter().any(|e| e.u == i || e.v == i)
        } {
            return Err(Error::Input(format!("missing rotation for vertex {}", v.id)));
        }
    }

    let elabels = (0..m as u64).collect();
    EmbeddedGraph::with_labels(weights, edges, rot, vlabels, elabels)
}

/// Reads an instance file.
pub fn read_instance(path: &std::path::Path) -> Result<EmbeddedGraph, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    read_instance_str(&text)
}

/// Canonical JSON text: vertices sorted by id, edges renumbered densely in
/// label order, rotation keys sorted numerically, 2-space indent, trailing
/// newline.
pub fn write_instance_string(g: &EmbeddedGraph) -> String {
    let mut vorder: Vec<usize> = (0..g.n()).collect();
    vorder.sort_by_key(|&v| g.vlabel(v));
    let mut eorder: Vec<usize> = (0..g.m()).collect();
    eorder.sort_by_key(|&e| g.elabel(e));
    let mut enew = vec![0usize; g.m()];
    for (new, &old) in eorder.iter().enumerate() {
        enew[old] = new;
    }

    let mut s = String::new();
    s.push_str("{\n  \"vertices\": [\n");
    for (i, &v) in vorder.iter().enumerate() {
        let comma = if i + 1 < vorder.len() { "," } else { "" };
        let _ = writeln!(
            s,
            "    {{\"id\": {}, \"w\": \"{}\"}}{comma}",
            g.vlabel(v),
            format_q(g.weight(v))
        );
    }
    s.push_str("  ],\n  \"edges\": [\n");
    for (new, &old) in eorder.iter().enumerate() {
        let ed = g.edge(old);
        let comma = if new + 1 < eorder.len() { "," } else { "" };
        let _ = writeln!(
            s,
            "    {{\"id\": {new}, \"u\": {}, \"v\": {}, \"sig\": {}}}{comma}",
            g.vlabel(ed.u),
            g.vlabel(ed.v),
            ed.sig
        );
    }
    s.push_str("  ],\n  \"rot\": {\n");
    for (i, &v) in vorder.iter().enumerate() {
        let ids: Vec<String> = g.rotation(v).iter().map(|&e| enew[e].to_string()).collect();
        let comma = if i + 1 < vorder.len() { "," } else { "" };
        let _ = writeln!(s, "    \"{}\": [{}]{comma}", g.vlabel(v), ids.join(", "));
    }
    s.push_str("  }\n}\n");
    s
}

/// Writes the canonical form to a file.
pub fn write_instance(g: &EmbeddedGraph, path: &std::path::Path) -> Result<(), Error> {
    std::fs::write(path, write_instance_string(g))
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn projective_triangle() -> EmbeddedGraph {
        let edges = vec![
            Edge { u: 0, v: 1, sig: true },
            Edge { u: 1, v: 2, sig: true },
            Edge { u: 2, v: 0, sig: true },
        ];
        let rot = vec![vec![0, 2], vec![0, 1], vec![1, 2]];
        EmbeddedGraph::new(vec![qi(2), qi(2), qi(2)], edges, rot).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let g = projective_triangle();
        let text = write_instance_string(&g);
        let back = read_instance_str(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(write_instance_string(&back), text);
    }

    #[test]
    fn reads_handwritten_file() {
        let text = r#"{
            "vertices": [{"id": 5, "w": "3/2"}, {"id": 2, "w": "1"}],
            "edges": [{"id": 0, "u": 5, "v": 2, "sig": true}],
            "rot": {"5": [0], "2": [0]}
        }"#;
        let g = read_instance_str(text).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.vlabel(0), 5);
        assert_eq!(g.vlabel(1), 2);
        assert_eq!(*g.weight(0), crate::rational::qr(3, 2));
        assert!(g.edge(0).sig);
    }

    #[test]
    fn rejects_malformed_files() {
        let cases: &[&str] = &[
            // not JSON
            "nope",
            // duplicate vertex id
            r#"{"vertices":[{"id":1,"w":"1/1"},{"id":1,"w":"1/1"}],"edges":[],"rot":{"1":[]}}"#,
            // non-dense edge ids
            r#"{"vertices":[{"id":0,"w":"1/1"},{"id":1,"w":"1/1"}],
                "edges":[{"id":1,"u":0,"v":1,"sig":false}],"rot":{"0":[1],"1":[1]}}"#,
            // unknown endpoint
            r#"{"vertices":[{"id":0,"w":"1/1"}],
                "edges":[{"id":0,"u":0,"v":9,"sig":false}],"rot":{"0":[0]}}"#,
            // bad rational
            r#"{"vertices":[{"id":0,"w":"x"}],"edges":[],"rot":{"0":[]}}"#,
            // zero denominator
            r#"{"vertices":[{"id":0,"w":"1/0"}],"edges":[],"rot":{"0":[]}}"#,
            // missing rotation for a vertex with edges
            r#"{"vertices":[{"id":0,"w":"1/1"},{"id":1,"w":"1/1"}],
                "edges":[{"id":0,"u":0,"v":1,"sig":false}],"rot":{"0":[0]}}"#,
            // rotation for unknown vertex
            r#"{"vertices":[{"id":0,"w":"1/1"}],"edges":[],"rot":{"0":[],"3":[]}}"#,
            // unknown field
            r#"{"vertices":[{"id":0,"w":"1/1","color":1}],"edges":[],"rot":{"0":[]}}"#,
        ];
        for text in cases {
            assert!(read_instance_str(text).is_err(), "accepted: {text}");
        }
    }

    #[test]
    fn abstract_graphs_are_pointed_at_the_embedding_requirement() {
        let text = r#"{"vertices":[{"id":0,"w":"1/1"},{"id":1,"w":"1/1"}],
            "edges":[{"id":0,"u":0,"v":1,"sig":false}]}"#;
        match read_instance_str(text) {
            Err(Error::Input(msg)) => {
                assert!(msg.contains("rotation system"), "{msg}");
                assert!(msg.contains("embedding"), "{msg}");
            }
            other => panic!("expected an input error, got {other:?}"),
        }
    }

    #[test]
    fn corrupted_rotation_is_a_structure_error() {
        let text = r#"{
            "vertices": [{"id": 0, "w": "1/1"}, {"id": 1, "w": "1/1"}, {"id": 2, "w": "1/1"}],
            "edges": [{"id": 0, "u": 0, "v": 1, "sig": false},
                      {"id": 1, "u": 1, "v": 2, "sig": false},
                      {"id": 2, "u": 2, "v": 0, "sig": false}],
            "rot": {"0": [0, 2], "1": [0, 1], "2": [1, 1]}
        }"#;
        match read_instance_str(text) {
            Err(Error::Structure(msg)) => assert!(msg.contains("edge 1")),
            other => panic!("expected structure error, got {other:?}"),
        }
    }
}
