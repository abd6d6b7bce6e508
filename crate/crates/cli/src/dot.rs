//! DOT export. One arrow per orientation class, pointing source to target;
//! highlighted nodes mark completion ends.

use std::fmt::Write as _;

use cofinite::relations::ElemId;
use cofinite::topograph::{local_name, FinGraph};

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn graph_dot(name: &str, g: &FinGraph, highlight: &[ElemId]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quoted(name));
    for v in g.vertices().iter() {
        let mut attrs = String::new();
        if highlight.contains(v) {
            attrs = " [style=filled, fillcolor=lightblue]".to_string();
        }
        let _ = writeln!(out, "  {}{};", quoted(local_name(v)), attrs);
    }
    for e in g.pair_representatives() {
        let s = local_name(g.src_of(e).expect("edge"));
        let t = local_name(g.tgt_of(e).expect("edge"));
        let mut attrs = format!(" [label={}]", quoted(local_name(e)));
        if highlight.contains(e) {
            attrs = format!(
                " [label={}, color=red, fontcolor=red]",
                quoted(local_name(e))
            );
        }
        let _ = writeln!(out, "  {} -> {}{};", quoted(s), quoted(t), attrs);
    }
    let _ = writeln!(out, "}}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loops_render_one_arrow_per_pair() {
        let g = FinGraph::from_oriented(&["w"], &[("l", "w", "w")]).unwrap();
        let dot = graph_dot("G", &g, &[]);
        assert_eq!(dot.matches("->").count(), 1);
        assert!(dot.contains("\"w\" -> \"w\" [label=\"l\"];"));
    }
}
