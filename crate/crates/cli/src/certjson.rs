//! Canonical JSON for solve certificates. Hand-rolled so key order and
//! layout are fixed; identical solutions always serialize to identical
//! bytes. All vertex and edge references are external instance labels.

use std::fmt::Write as _;

use crosscap::embedding::EmbeddedGraph;
use crosscap::preprocess::Step;
use crosscap::rational::{format_q, Q};
use crosscap::solve::Solution;

fn u64_list(v: &[u64]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

fn str_list<S: AsRef<str>>(v: &[S]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("\"{}\"", x.as_ref())).collect();
    format!("[{}]", items.join(", "))
}

fn q_list(v: &[Q]) -> String {
    let items: Vec<String> = v.iter().map(format_q).collect();
    str_list(&items)
}

fn step_json(step: &Step) -> String {
    match step {
        Step::Component { vertices } => {
            format!("{{\"step\": \"component\", \"vertices\": {}}}", u64_list(vertices))
        }
        Step::DropNegatives { vertices } => {
            format!("{{\"step\": \"drop-negatives\", \"vertices\": {}}}", u64_list(vertices))
        }
        Step::NtFix { v1, v0 } => format!(
            "{{\"step\": \"nt-fix\", \"v1\": {}, \"v0\": {}}}",
            u64_list(v1),
            u64_list(v0)
        ),
        Step::BipartiteLeaf { set, weight } => format!(
            "{{\"step\": \"bipartite-leaf\", \"set\": {}, \"weight\": \"{}\"}}",
            u64_list(set),
            format_q(weight)
        ),
        Step::BlockChoice { kept, removed } => format!(
            "{{\"step\": \"block-choice\", \"kept\": {}, \"removed\": {}}}",
            u64_list(kept),
            u64_list(removed)
        ),
        Step::StandardLeaf { index, set, weight } => format!(
            "{{\"step\": \"standard-leaf\", \"index\": {index}, \"set\": {}, \"weight\": \"{}\"}}",
            u64_list(set),
            format_q(weight)
        ),
        Step::DirectLeaf { set, weight } => format!(
            "{{\"step\": \"direct-leaf\", \"set\": {}, \"weight\": \"{}\"}}",
            u64_list(set),
            format_q(weight)
        ),
    }
}

/// Renders the full solution: optimum, chosen set, and the reduction tree
/// with one entry per standard block the circulation core solved.
pub fn certificate_json(g: &EmbeddedGraph, sol: &Solution) -> String {
    let cert = &sol.certificate;
    let labels = |vs: &[usize]| -> Vec<u64> { vs.iter().map(|&v| g.vlabel(v)).collect() };

    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"weight\": \"{}\",", format_q(&sol.weight));
    let _ = writeln!(s, "  \"set\": {},", u64_list(&labels(&sol.set)));
    let _ = writeln!(s, "  \"budget\": {},", cert.budget);
    let _ = writeln!(s, "  \"transversal\": {},", u64_list(&labels(&cert.transversal)));
    let _ = writeln!(s, "  \"branch_index\": {},", cert.branch_index);
    let _ = writeln!(s, "  \"branch_kept\": {},", u64_list(&labels(&cert.branch_kept)));
    let _ = writeln!(s, "  \"branch_offset\": \"{}\",", format_q(&cert.branch_offset));

    s.push_str("  \"plan\": [");
    for (i, step) in cert.plan.steps.iter().enumerate() {
        let comma = if i + 1 < cert.plan.steps.len() { "," } else { "" };
        let _ = write!(s, "\n    {}{comma}", step_json(step));
    }
    s.push_str(if cert.plan.steps.is_empty() { "],\n" } else { "\n  ],\n" });

    s.push_str("  \"blocks\": [");
    for (i, b) in cert.blocks.iter().enumerate() {
        let y: Vec<String> = b.y.iter().map(|x| x.to_string()).collect();
        let free: Vec<String> = b.omega_free.iter().map(|x| x.to_string()).collect();
        s.push_str("\n    {\n");
        let _ = writeln!(s, "      \"vertices\": {},", u64_list(&b.vertices));
        let _ = writeln!(s, "      \"edges\": {},", u64_list(&b.edges));
        let _ = writeln!(s, "      \"genus\": {},", b.genus);
        let _ = writeln!(s, "      \"costs\": {},", q_list(&b.costs));
        let _ = writeln!(s, "      \"circulation\": {},", str_list(&y));
        let _ = writeln!(s, "      \"omega_parity\": {},", b.omega_parity);
        let _ = writeln!(s, "      \"omega_free\": {},", str_list(&free));
        let _ = writeln!(s, "      \"circulation_cost\": \"{}\",", format_q(&b.circulation_cost));
        let _ = writeln!(s, "      \"total_cost\": \"{}\",", format_q(&b.total_cost));
        let _ = writeln!(s, "      \"weight\": \"{}\"", format_q(&b.weight));
        s.push_str("    }");
        if i + 1 < cert.blocks.len() {
            s.push(',');
        }
    }
    s.push_str(if cert.blocks.is_empty() { "]\n" } else { "\n  ]\n" });
    s.push_str("}\n");
    s
}
