//! Canonical printing of documents and definitions. Printing then parsing
//! reproduces the document exactly.

use std::fmt::Write as _;

use cofinite::relations::Partition;
use cofinite::topograph::{inverse_local, local_name, FinGraph, GraphMap};

use crate::document::{Def, Document, SystemDecl};

pub fn print_document(doc: &Document) -> String {
    let mut out = String::new();
    for (name, def) in doc.ordered() {
        match def {
            Def::Graph(g) => print_graph(&mut out, name, g),
            Def::Partition { graph, partition } => {
                print_partition(&mut out, name, graph, partition)
            }
            Def::Map { from, to, map } => print_map(&mut out, name, from, to, map),
            Def::Presentation {
                graph, base_refs, ..
            } => print_presentation(&mut out, name, graph, base_refs),
            Def::System(decl) => print_system(&mut out, name, decl),
        }
    }
    out
}

pub fn print_graph(out: &mut String, name: &str, g: &FinGraph) {
    let _ = writeln!(out, "graph {name} {{");
    let vertices: Vec<&str> = g.vertices().iter().map(local_name).collect();
    let _ = writeln!(out, "  vertices: {};", vertices.join(", "));
    let mut lines = Vec::new();
    for rep in g.pair_representatives() {
        let e = local_name(rep);
        let inv = local_name(g.inv_of(rep).expect("edge"));
        let s = local_name(g.src_of(rep).expect("edge"));
        let t = local_name(g.tgt_of(rep).expect("edge"));
        if inv == inverse_local(e) {
            lines.push(format!("({e}, {s}, {t})"));
        } else {
            lines.push(format!("({e}, {inv}, {s}, {t})"));
        }
    }
    let _ = writeln!(out, "  edges: {};", lines.join(", "));
    if let Some(pos) = g.positive_edges() {
        let names: Vec<&str> = pos.iter().map(|e| local_name(e)).collect();
        let _ = writeln!(out, "  orient: {};", names.join(", "));
    }
    let _ = writeln!(out, "}}");
}

/// Blocks in canonical order; members keep their `v:`/`e:` namespaces,
/// which is exactly the qualified reference syntax.
pub fn print_partition_body(p: &Partition) -> String {
    let mut out = String::new();
    for block in p.blocks_ids() {
        let members: Vec<&str> = block.iter().map(|id| id.as_str()).collect();
        let _ = writeln!(out, "  block {{ {} }};", members.join(", "));
    }
    out
}

pub fn print_partition(out: &mut String, name: &str, graph: &str, p: &Partition) {
    let _ = writeln!(out, "partition {name} on {graph} {{");
    out.push_str(&print_partition_body(p));
    let _ = writeln!(out, "}}");
}

pub fn print_map(out: &mut String, name: &str, from: &str, to: &str, map: &GraphMap) {
    let _ = writeln!(out, "map {name} : {from} -> {to} {{");
    for v in map.source().vertices().iter() {
        let img = map.apply_vertex(v).expect("vertex image");
        let _ = writeln!(out, "  {} -> {};", v, img);
    }
    for e in map.source().edges().iter() {
        let img = map.apply_edge(e).expect("edge image");
        let _ = writeln!(out, "  {} -> {};", e, img);
    }
    let _ = writeln!(out, "}}");
}

pub fn print_presentation(out: &mut String, name: &str, graph: &str, base_refs: &[String]) {
    let _ = writeln!(out, "presentation {name} {{");
    let _ = writeln!(out, "  graph {graph};");
    let _ = writeln!(out, "  base {};", base_refs.join(", "));
    let _ = writeln!(out, "}}");
}

pub fn print_system(out: &mut String, name: &str, decl: &SystemDecl) {
    let _ = writeln!(out, "system {name} {{");
    match decl {
        SystemDecl::Builtin(b) => {
            let _ = writeln!(out, "  builtin: {b};");
        }
        SystemDecl::Explicit { levels, bonds } => {
            for (n, g) in levels.iter().enumerate() {
                let _ = writeln!(out, "  level {n}: {g};");
            }
            for (n, m) in bonds.iter().enumerate() {
                let _ = writeln!(out, "  bond {n}: {m};");
            }
        }
    }
    let _ = writeln!(out, "}}");
}
