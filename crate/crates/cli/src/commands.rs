//! Command dispatch. Every command is a pure function from arguments and
//! file contents to an outcome; identical inputs produce byte-identical
//! output.
//!
//! Exit codes: 0 on success, 1 on domain errors, 2 on usage and parse
//! errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use cofinite::invsys::{boundary_census, complete_at, extend_map, limit_truncation, ChainSystem};
use cofinite::presented::{
    builtin_quotients, builtin_system, complete_window, inclusion_check, integer_line,
    quotient_maps_check,
};
use cofinite::relations::{ElemId, Partition};
use cofinite::topograph::{
    compatible_refinement, edge_id, quotient_graph, vertex_id, CompatiblePartition, FinGraph,
};
use cofinite::uniformity::{uniform_quotient, uniform_sum, SeparationCheck};

use crate::document::{Def, Document, SystemDecl};
use crate::json;
use crate::parser::parse;
use crate::printer;
use crate::{diag::Diagnostic, dot};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn domain(message: String) -> Self {
        Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }

    fn usage(message: String) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("{message}\n{USAGE}"),
        }
    }

    fn diagnostics(path: &str, diags: &[Diagnostic]) -> Self {
        let mut err = String::new();
        for d in diags {
            let _ = writeln!(err, "{path}:{d}");
        }
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: err,
        }
    }
}

pub const USAGE: &str = "\
usage: cofinite <command> [arguments] [flags]

commands:
  validate <file> [name] | validate builtin:<id> [--horizon N]
  refine <file> <graph> <partition> [--format text|json]
  quotient <file> <graph> <partition> [--format text|json]
  uquotient <file> <presentation> <partition> [--format text|json]
  sum <file> <presentation>... [--format text|json]
  closure <file> <presentation> --set a,b,c [--format text|json]
  separate <file> <presentation> [--format text|json]
  complete <file> <presentation> [--horizon N] [--format text|json]
  complete builtin:<id> --horizon N [--window M] [--lookahead K]
  census <file> <system> | builtin:<id> --horizon N [--lookahead K]
  extend <file> <system> --family m0,m1,... [--format text|json]
  export <file> <name> | builtin:<id> [--format dot|json] [--level N] [--window N]

builtins: builtin:integer_line, builtin:phi1, builtin:phi2
";

struct Parsed {
    positional: Vec<String>,
    flags: BTreeMap<String, String>,
}

fn split_flags(args: &[String], allowed: &[&str]) -> Result<Parsed, String> {
    let mut positional = Vec::new();
    let mut flags = BTreeMap::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if let Some(name) = a.strip_prefix("--") {
            if !allowed.contains(&name) {
                return Err(format!("unknown flag `--{name}`"));
            }
            match it.next() {
                Some(v) => {
                    flags.insert(name.to_string(), v.clone());
                }
                None => return Err(format!("flag `--{name}` needs a value")),
            }
        } else {
            positional.push(a.clone());
        }
    }
    Ok(Parsed { positional, flags })
}

fn flag_u32(p: &Parsed, name: &str) -> Result<Option<u32>, String> {
    match p.flags.get(name) {
        None => Ok(None),
        Some(v) => v
            .parse::<u32>()
            .map(Some)
            .map_err(|_| format!("flag `--{name}` expects a number, got `{v}`")),
    }
}

fn format_flag(p: &Parsed) -> Result<&'static str, String> {
    match p.flags.get("format").map(String::as_str) {
        None => Ok("text"),
        Some("text") => Ok("text"),
        Some("json") => Ok("json"),
        Some("dot") => Ok("dot"),
        Some(other) => Err(format!("unknown format `{other}`")),
    }
}

fn load(path: &str) -> Result<Document, Outcome> {
    let text = std::fs::read_to_string(path).map_err(|e| Outcome {
        code: 2,
        stdout: String::new(),
        stderr: format!("error: cannot read `{path}`: {e}\n"),
    })?;
    parse(&text).map_err(|diags| Outcome::diagnostics(path, &diags))
}

fn resolve_system(doc: &Document, name: &str) -> Result<ChainSystem, String> {
    match doc.get(name) {
        Some(Def::System(SystemDecl::Builtin(b))) => {
            builtin_system(b).ok_or_else(|| format!("unknown builtin `{b}`"))
        }
        Some(Def::System(SystemDecl::Explicit { levels, bonds })) => {
            let graphs: Vec<FinGraph> = levels
                .iter()
                .map(|g| doc.graph(g).expect("resolved at parse").clone())
                .collect();
            let maps = bonds
                .iter()
                .map(|m| doc.map(m).expect("resolved at parse").clone())
                .collect();
            ChainSystem::from_levels(graphs, maps).map_err(|e| e.to_string())
        }
        Some(other) => Err(format!("`{name}` is a {}, not a system", other.kind_name())),
        None => Err(format!("unknown system `{name}`")),
    }
}

fn resolve_elems(g: &FinGraph, spec: &str) -> Result<Vec<ElemId>, String> {
    let mut out = Vec::new();
    for raw in spec.split(',').filter(|s| !s.is_empty()) {
        let id = if let Some(name) = raw.strip_prefix("v:") {
            let id = vertex_id(name);
            if !g.vertices().contains(&id) {
                return Err(format!("unknown vertex `{name}`"));
            }
            id
        } else if let Some(name) = raw.strip_prefix("e:") {
            let id = edge_id(name);
            if !g.edges().contains(&id) {
                return Err(format!("unknown edge `{name}`"));
            }
            id
        } else {
            let v = vertex_id(raw);
            let e = edge_id(raw);
            match (g.vertices().contains(&v), g.edges().contains(&e)) {
                (true, false) => v,
                (false, true) => e,
                (true, true) => {
                    return Err(format!("`{raw}` is ambiguous; qualify with v: or e:"))
                }
                (false, false) => return Err(format!("unknown element `{raw}`")),
            }
        };
        out.push(id);
    }
    Ok(out)
}

pub fn run(args: &[String]) -> Outcome {
    let Some(command) = args.first() else {
        return Outcome::usage("missing command".into());
    };
    let rest = &args[1..];
    match command.as_str() {
        "validate" => cmd_validate(rest),
        "refine" => cmd_refine(rest),
        "quotient" => cmd_quotient(rest),
        "uquotient" => cmd_uquotient(rest),
        "sum" => cmd_sum(rest),
        "closure" => cmd_closure(rest),
        "separate" => cmd_separate(rest),
        "complete" => cmd_complete(rest),
        "census" => cmd_census(rest),
        "extend" => cmd_extend(rest),
        "export" => cmd_export(rest),
        "help" | "--help" | "-h" => Outcome {
            code: 0,
            stdout: USAGE.to_string(),
            stderr: String::new(),
        },
        other => Outcome::usage(format!("unknown command `{other}`")),
    }
}

fn cmd_validate(args: &[String]) -> Outcome {
    let p = match split_flags(args, &["horizon", "window"]) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let Some(target) = p.positional.first() else {
        return Outcome::usage("validate needs a target".into());
    };
    if let Some(builtin) = target.strip_prefix("builtin:") {
        let horizon = match flag_u32(&p, "horizon") {
            Ok(h) => h.unwrap_or(10),
            Err(e) => return Outcome::usage(e),
        };
        let mut out = String::new();
        let mut bad = false;
        if builtin == "integer_line" {
            let window = match flag_u32(&p, "window") {
                Ok(w) => w.unwrap_or(5),
                Err(e) => return Outcome::usage(e),
            };
            let line = integer_line();
            let viols = inclusion_check(&line, window);
            for v in &viols {
                bad = true;
                let _ = writeln!(out, "violation: {v}");
            }
            if !bad {
                let _ = writeln!(out, "ok: builtin:integer_line up to window {window}");
            }
        } else {
            let Some(sys) = builtin_system(builtin) else {
                return Outcome::domain(format!("unknown builtin `{builtin}`"));
            };
            for v in sys.validate(horizon) {
                bad = true;
                let _ = writeln!(out, "violation: {v}");
            }
            let qf = builtin_quotients(builtin).expect("builtin quotients");
            for v in quotient_maps_check(&integer_line(), &qf, &sys, horizon) {
                bad = true;
                let _ = writeln!(out, "violation: {v}");
            }
            if !bad {
                let _ = writeln!(out, "ok: builtin:{builtin} up to level {horizon}");
            }
        }
        return Outcome {
            code: if bad { 1 } else { 0 },
            stdout: out,
            stderr: String::new(),
        };
    }

    let doc = match load(target) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let mut out = String::new();
    let mut bad = false;
    let selected: Vec<(&String, &Def)> = match p.positional.get(1) {
        Some(name) => match doc.defs.get_key_value(name) {
            Some((k, v)) => vec![(k, v)],
            None => return Outcome::domain(format!("unknown definition `{name}`")),
        },
        None => doc.ordered(),
    };
    for (name, def) in selected {
        match def {
            Def::Graph(g) => {
                let viols = g.validate();
                if viols.is_empty() {
                    let _ = writeln!(out, "ok: graph {name}");
                } else {
                    bad = true;
                    for v in viols {
                        let _ = writeln!(out, "violation: graph {name}: {v}");
                    }
                }
            }
            Def::Partition { graph, partition } => {
                let g = doc.graph(graph).expect("resolved at parse");
                match cofinite::topograph::compatibility_check(g, partition) {
                    Ok(check) if check.holds() => {
                        let _ = writeln!(out, "ok: partition {name} (compatible)");
                    }
                    Ok(cofinite::topograph::CompatibilityCheck::Incompatible(v)) => {
                        let _ = writeln!(out, "ok: partition {name} (not compatible: {v})");
                    }
                    Ok(_) => unreachable!(),
                    Err(e) => {
                        bad = true;
                        let _ = writeln!(out, "violation: partition {name}: {e}");
                    }
                }
            }
            Def::Map { map, .. } => {
                let viols = map.validate();
                if viols.is_empty() {
                    let _ = writeln!(out, "ok: map {name}");
                } else {
                    bad = true;
                    for v in viols {
                        let _ = writeln!(out, "violation: map {name}: {v}");
                    }
                }
            }
            Def::Presentation { presentation, .. } => {
                let sep = match presentation.separation_check() {
                    SeparationCheck::Separating => "separating".to_string(),
                    SeparationCheck::NotSeparating { witness } => {
                        format!("not separating: ({}, {})", witness.0, witness.1)
                    }
                };
                let _ = writeln!(out, "ok: presentation {name} ({sep})");
            }
            Def::System(_) => {
                let sys = match resolve_system(&doc, name) {
                    Ok(s) => s,
                    Err(e) => return Outcome::domain(e),
                };
                let horizon = match flag_u32(&p, "horizon") {
                    Ok(h) => h.or(sys.max_level()).unwrap_or(10),
                    Err(e) => return Outcome::usage(e),
                };
                let viols = sys.validate(horizon);
                if viols.is_empty() {
                    let _ = writeln!(out, "ok: system {name} up to level {horizon}");
                } else {
                    bad = true;
                    for v in viols {
                        let _ = writeln!(out, "violation: system {name}: {v}");
                    }
                }
            }
        }
    }
    Outcome {
        code: if bad { 1 } else { 0 },
        stdout: out,
        stderr: String::new(),
    }
}

fn doc_graph_and_partition<'d>(
    doc: &'d Document,
    gname: &str,
    pname: &str,
) -> Result<(&'d FinGraph, &'d Partition), String> {
    let g = doc
        .graph(gname)
        .ok_or_else(|| format!("unknown graph `{gname}`"))?;
    let (pg, p) = doc
        .partition(pname)
        .ok_or_else(|| format!("unknown partition `{pname}`"))?;
    if pg != gname {
        return Err(format!("partition `{pname}` lives on `{pg}`, not `{gname}`"));
    }
    Ok((g, p))
}

fn cmd_refine(args: &[String]) -> Outcome {
    let p = match split_flags(args, &["format"]) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let [file, gname, pname] = &p.positional[..] else {
        return Outcome::usage("refine needs <file> <graph> <partition>".into());
    };
    let fmt = match format_flag(&p) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let (g, part) = match doc_graph_and_partition(&doc, gname, pname) {
        Ok(x) => x,
        Err(e) => return Outcome::domain(e),
    };
    let oriented = g.choose_orientation();
    let refined = match compatible_refinement(&oriented, part) {
        Ok(r) => r,
        Err(e) => return Outcome::domain(e.to_string()),
    };
    match fmt {
        "json" => Outcome::ok(json::render(&json::partition_json(
            &format!("{pname}_refined"),
            refined.partition(),
        ))),
        _ => {
            let mut out = String::new();
            printer::print_partition(&mut out, &format!("{pname}_refined"), gname, refined.partition());
            Outcome::ok(out)
        }
    }
}

fn cmd_quotient(args: &[String]) -> Outcome {
    let p = match split_flags(args, &["format"]) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let [file, gname, pname] = &p.positional[..] else {
        return Outcome::usage("quotient needs <file> <graph> <partition>".into());
    };
    let fmt = match format_flag(&p) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let (g, part) = match doc_graph_and_partition(&doc, gname, pname) {
        Ok(x) => x,
        Err(e) => return Outcome::domain(e),
    };
    let k = match CompatiblePartition::new(g, part.clone()) {
        Ok(k) => k,
        Err(e) => return Outcome::domain(e.to_string()),
    };
    let (q, proj) = match quotient_graph(g, &k) {
        Ok(x) => x,
        Err(e) => return Outcome::domain(e.to_string()),
    };
    let qname = format!("{gname}_mod_{pname}");
    match fmt {
        "json" => {
            let value = serde_json::json!({
                "format": json::FORMAT_VERSION,
                "kind": "quotient",
                "graph": json::graph_json(&qname, &q),
                "projection": json::map_json(&format!("{pname}_proj"), &proj),
            });
            Outcome::ok(json::render(&value))
        }
        _ => {
            let mut out = String::new();
            printer::print_graph(&mut out, gname, g);
            printer::print_graph(&mut out, &qname, &q);
            printer::print_map(&mut out, &format!("{pname}_proj"), gname, &qname, &proj);
            Outcome::ok(out)
        }
    }
}

fn cmd_uquotient(args: &[String]) -> Outcome {
    let p = match split_flags(args, &["format"]) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let [file, presname, pname] = &p.positional[..] else {
        return Outcome::usage("uquotient needs <file> <presentation> <partition>".into());
    };
    let fmt = match format_flag(&p) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let Some(pres) = doc.presentation(presname) else {
        return Outcome::domain(format!("unknown presentation `{presname}`"));
    };
    let Some((_, part)) = doc.partition(pname) else {
        return Outcome::domain(format!("unknown partition `{pname}`"));
    };
    let (qpres, proj) = match uniform_quotient(pres, part) {
        Ok(x) => x,
        Err(e) => return Outcome::domain(e.to_string()),
    };
    match fmt {
        "json" => Outcome::ok(json::render(&json::presentation_json(
            &format!("{presname}_q"),
            &qpres,
        ))),
        _ => {
            let mut out = String::new();
            if qpres.is_improper() {
                let _ = writeln!(out, "# improper quotient: no base member contains the kernel");
            }
            let src = doc
                .defs
                .iter()
                .find_map(|(n, d)| match d {
                    Def::Presentation { graph, .. } if n == presname => Some(graph.clone()),
                    _ => None,
                })
                .expect("presentation graph name");
            let qg = format!("{presname}_qg");
            printer::print_graph(&mut out, &src, pres.graph());
            printer::print_graph(&mut out, &qg, qpres.graph());
            let mut base_names = Vec::new();
            for (i, member) in qpres.base().iter().enumerate() {
                let bname = format!("{presname}_qb{i}");
                if !qpres.is_improper() {
                    printer::print_partition(&mut out, &bname, &qg, member);
                    base_names.push(bname);
                } else {
                    let _ = writeln!(out, "# improper base member omitted");
                }
            }
            if !qpres.is_improper() {
                printer::print_presentation(&mut out, &format!("{presname}_q"), &qg, &base_names);
            }
            printer::print_map(&mut out, &format!("{presname}_proj"), &src, &qg, &proj);
            Outcome::ok(out)
        }
    }
}

fn cmd_sum(args: &[String]) -> Outcome {
    let p = match split_flags(args, &["format"]) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    if p.positional.len() < 2 {
        return Outcome::usage("sum needs <file> <presentation>...".into());
    }
    let fmt = match format_flag(&p) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    let doc = match load(&p.positional[0]) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let mut parts = Vec::new();
    for name in &p.positional[1..] {
        match doc.presentation(name) {
            Some(pres) => parts.push(pres),
            None => return Outcome::domain(format!("unknown presentation `{name}`")),
        }
    }
    let (sum, inclusions) = match uniform_sum(&parts) {
        Ok(x) => x,
        Err(e) => return Outcome::domain(e.to_string()),
    };
    match fmt {
        "json" => Outcome::ok(json::render(&json::presentation_json("sum", &sum))),
        _ => {
            let mut out = String::new();
            printer::print_graph(&mut out, "sum_graph", sum.graph());
            let mut base_names = Vec::new();
            for (i, member) in sum.base().iter().enumerate() {
                let bname = format!("sum_b{i}");
                printer::print_partition(&mut out, &bname, "sum_graph", member);
                base_names.push(bname);
            }
            printer::print_presentation(&mut out, "sum", "sum_graph", &base_names);
            for (i, (inc, name)) in inclusions.iter().zip(&p.positional[1..]).enumerate() {
                printer::print_graph(&mut out, &format!("summand{i}"), inc.source());
                printer::print_map(
                    &mut out,
                    &format!("include_{name}"),
                    &format!("summand{i}"),
                    "sum_graph",
                    inc,
                );
            }
            Outcome::ok(out)
        }
    }
}

fn cmd_closure(args: &[String]) -> Outcome {
    let p = match split_flags(args, &["format", "set"]) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let [file, presname] = &p.positional[..] else {
        return Outcome::usage("closure needs <file> <presentation> --set a,b,c".into());
    };
    let Some(spec) = p.flags.get("set") else {
        return Outcome::usage("closure needs --set a,b,c".into());
    };
    let fmt = match format_flag(&p) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let Some(pres) = doc.presentation(presname) else {
        return Outcome::domain(format!("unknown presentation `{presname}`"));
    };
    let set = match resolve_elems(pres.graph(), spec) {
        Ok(s) => s,
        Err(e) => return Outcome::domain(e),
    };
    let report = match pres.closure(&set) {
        Ok(r) => r,
        Err(e) => return Outcome::domain(e.to_string()),
    };
    match fmt {
        "json" => Outcome::ok(json::render(&json::closure_json(&report))),
        _ => {
            let mut out = String::new();
            let render = |ids: &[ElemId]| {
                ids.iter()
                    .map(|id| id.as_str().to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let _ = writeln!(out, "input: {}", render(&report.input));
            for (i, img) in report.member_images.iter().enumerate() {
                let _ = writeln!(out, "image under base[{i}]: {}", render(img));
            }
            let _ = writeln!(out, "closure: {}", render(&report.closure));
            Outcome::ok(out)
        }
    }
}

fn cmd_separate(args: &[String]) -> Outcome {
    let p = match split_flags(args, &["format"]) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let [file, presname] = &p.positional[..] else {
        return Outcome::usage("separate needs <file> <presentation>".into());
    };
    let fmt = match format_flag(&p) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let Some(pres) = doc.presentation(presname) else {
        return Outcome::domain(format!("unknown presentation `{presname}`"));
    };
    match pres.separation_check() {
        SeparationCheck::Separating => match fmt {
            "json" => Outcome::ok(json::render(&serde_json::json!({
                "format": json::FORMAT_VERSION, "kind": "separation", "separating": true
            }))),
            _ => Outcome::ok("separating: true\n".into()),
        },
        SeparationCheck::NotSeparating { witness } => match fmt {
            "json" => Outcome::ok(json::render(&serde_json::json!({
                "format": json::FORMAT_VERSION, "kind": "separation", "separating": false,
                "witness": [witness.0.as_str(), witness.1.as_str()]
            }))),
            _ => Outcome::ok(format!(
                "separating: false\nwitness: ({}, {})\n",
                witness.0, witness.1
            )),
        },
    }
}

fn cmd_complete(args: &[String]) -> Outcome {
    let p = match split_flags(args, &["format", "horizon", "window", "lookahead"]) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let Some(target) = p.positional.first() else {
        return Outcome::usage("complete needs a target".into());
    };
    if let Some(builtin) = target.strip_prefix("builtin:") {
        let (Some(sys), Some(qf)) = (builtin_system(builtin), builtin_quotients(builtin)) else {
            return Outcome::domain(format!("`{builtin}` is not a completable builtin"));
        };
        let horizon = match flag_u32(&p, "horizon") {
            Ok(Some(h)) => h,
            Ok(None) => return Outcome::usage("complete builtin:<id> needs --horizon N".into()),
            Err(e) => return Outcome::usage(e),
        };
        let window = match flag_u32(&p, "window") {
            Ok(w) => w.unwrap_or(horizon),
            Err(e) => return Outcome::usage(e),
        };
        let lookahead = match flag_u32(&p, "lookahead") {
            Ok(l) => l.unwrap_or(5),
            Err(e) => return Outcome::usage(e),
        };
        let line = integer_line();
        let completion = match complete_window(&line, &qf, &sys, window, horizon, lookahead) {
            Ok(c) => c,
            Err(e) => return Outcome::domain(e.to_string()),
        };
        let tg = completion.truncation.graph();
        match format_flag(&p) {
            Ok("dot") => {
                return Outcome::ok(dot::graph_dot(
                    &format!("builtin:{builtin}[{horizon}]"),
                    tg,
                    &completion.boundary,
                ));
            }
            Ok(_) => {}
            Err(e) => return Outcome::usage(e),
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "completion of builtin:{builtin} over window {window} at horizon {horizon}"
        );
        let _ = writeln!(
            out,
            "truncation: {} vertices, {} edge pairs",
            tg.vertices().len(),
            tg.edge_pair_count()
        );
        let _ = writeln!(
            out,
            "embedded: {} vertices, {} edge pairs",
            completion.theta.source().vertices().len(),
            completion.theta.source().edge_pair_count()
        );
        let render = |ids: &[ElemId]| {
            ids.iter()
                .map(|id| id.as_str().to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let _ = writeln!(out, "missed: {}", render(&completion.missed));
        let _ = writeln!(out, "boundary: {}", render(&completion.boundary));
        let covered = completion
            .boundary
            .iter()
            .all(|b| completion.missed.contains(b));
        let _ = writeln!(out, "boundary missed by the embedding: {covered}");
        return Outcome::ok(out);
    }

    let [file, presname] = &p.positional[..] else {
        return Outcome::usage("complete needs <file> <presentation>".into());
    };
    let fmt = match format_flag(&p) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let Some(pres) = doc.presentation(presname) else {
        return Outcome::domain(format!("unknown presentation `{presname}`"));
    };
    let horizon = match flag_u32(&p, "horizon") {
        Ok(h) => h,
        Err(e) => return Outcome::usage(e),
    };
    let completion = match complete_at(pres, horizon) {
        Ok(c) => c,
        Err(e) => return Outcome::domain(e.to_string()),
    };
    let bijective = completion.theta.is_bijective() && completion.theta.validate().is_empty();
    match fmt {
        "json" => {
            let value = serde_json::json!({
                "format": json::FORMAT_VERSION,
                "kind": "completion",
                "presentation": presname,
                "truncation": json::graph_json(&format!("{presname}_hat"), completion.truncation.graph()),
                "theta": json::map_json(&format!("{presname}_theta"), &completion.theta),
                "theta_is_isomorphism": bijective,
            });
            Outcome::ok(json::render(&value))
        }
        _ => {
            let src = doc
                .defs
                .iter()
                .find_map(|(n, d)| match d {
                    Def::Presentation { graph, .. } if n == presname => Some(graph.clone()),
                    _ => None,
                })
                .expect("presentation graph name");
            let mut out = String::new();
            let _ = writeln!(out, "# theta is an isomorphism: {bijective}");
            printer::print_graph(&mut out, &src, pres.graph());
            printer::print_graph(&mut out, &format!("{presname}_hat"), completion.truncation.graph());
            printer::print_map(
                &mut out,
                &format!("{presname}_theta"),
                &src,
                &format!("{presname}_hat"),
                &completion.theta,
            );
            Outcome::ok(out)
        }
    }
}

fn cmd_census(args: &[String]) -> Outcome {
    let p = match split_flags(args, &["format", "horizon", "lookahead"]) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let Some(target) = p.positional.first() else {
        return Outcome::usage("census needs a target".into());
    };
    let horizon = match flag_u32(&p, "horizon") {
        Ok(Some(h)) => h,
        Ok(None) => return Outcome::usage("census needs --horizon N".into()),
        Err(e) => return Outcome::usage(e),
    };
    let lookahead = match flag_u32(&p, "lookahead") {
        Ok(l) => l.unwrap_or(5),
        Err(e) => return Outcome::usage(e),
    };
    let fmt = match format_flag(&p) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    let (name, sys) = if let Some(builtin) = target.strip_prefix("builtin:") {
        match builtin_system(builtin) {
            Some(sys) => (format!("builtin:{builtin}"), sys),
            None => return Outcome::domain(format!("`{builtin}` is not a system builtin")),
        }
    } else {
        let [file, sysname] = &p.positional[..] else {
            return Outcome::usage("census needs <file> <system> or builtin:<id>".into());
        };
        let doc = match load(file) {
            Ok(d) => d,
            Err(o) => return o,
        };
        match resolve_system(&doc, sysname) {
            Ok(sys) => (sysname.clone(), sys),
            Err(e) => return Outcome::domain(e),
        }
    };
    let report = match boundary_census(&sys, horizon, lookahead) {
        Ok(r) => r,
        Err(e) => return Outcome::domain(e.to_string()),
    };
    match fmt {
        "json" => Outcome::ok(json::render(&json::census_json(&name, &report))),
        "dot" => {
            // the truncation at the horizon with the ends highlighted
            let trunc = match limit_truncation(&sys, horizon) {
                Ok(t) => t,
                Err(e) => return Outcome::domain(e.to_string()),
            };
            Outcome::ok(dot::graph_dot(
                &format!("{name}[{horizon}]"),
                trunc.graph(),
                &report.boundary_ids,
            ))
        }
        _ => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "census of {name} at horizon {} (lookahead {})",
                report.horizon, report.lookahead
            );
            let _ = writeln!(out, "rigid threads: {}", report.rigid_threads);
            let _ = writeln!(out, "vertex ends: {}", report.vertex_ends);
            let _ = writeln!(out, "edge end pairs: {}", report.edge_end_pairs);
            let _ = writeln!(out, "ends: {}", report.end_count);
            let _ = writeln!(out, "stabilized: {}", report.stabilized);
            let hist: Vec<String> = report
                .history
                .iter()
                .map(|&(h, v, e)| format!("h={h}: ({v}, {e})"))
                .collect();
            let _ = writeln!(out, "history: {}", hist.join("; "));
            for id in &report.boundary_ids {
                let _ = writeln!(out, "end: {id}");
            }
            Outcome::ok(out)
        }
    }
}

fn cmd_extend(args: &[String]) -> Outcome {
    let p = match split_flags(args, &["format", "family"]) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let [file, sysname] = &p.positional[..] else {
        return Outcome::usage("extend needs <file> <system> --family m0,m1,...".into());
    };
    let Some(family_spec) = p.flags.get("family") else {
        return Outcome::usage("extend needs --family m0,m1,...".into());
    };
    let fmt = match format_flag(&p) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let sys = match resolve_system(&doc, sysname) {
        Ok(s) => s,
        Err(e) => return Outcome::domain(e),
    };
    let mut family = Vec::new();
    for mname in family_spec.split(',').filter(|s| !s.is_empty()) {
        match doc.map(mname) {
            Some(m) => family.push(m.clone()),
            None => return Outcome::domain(format!("unknown map `{mname}`")),
        }
    }
    let extension = match extend_map(&sys, &family) {
        Ok(x) => x,
        Err(e) => return Outcome::domain(e.to_string()),
    };
    match fmt {
        "json" => Outcome::ok(json::render(&json::map_json(
            &format!("{sysname}_ext"),
            &extension.map,
        ))),
        _ => {
            let mut out = String::new();
            printer::print_graph(&mut out, "source", extension.map.source());
            printer::print_graph(&mut out, &format!("{sysname}_hat"), extension.truncation.graph());
            printer::print_map(
                &mut out,
                &format!("{sysname}_ext"),
                "source",
                &format!("{sysname}_hat"),
                &extension.map,
            );
            Outcome::ok(out)
        }
    }
}

fn cmd_export(args: &[String]) -> Outcome {
    let p = match split_flags(args, &["format", "level", "window", "horizon"]) {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let Some(target) = p.positional.first() else {
        return Outcome::usage("export needs a target".into());
    };
    let fmt = match p.flags.get("format").map(String::as_str) {
        None | Some("json") => "json",
        Some("dot") => "dot",
        Some(other) => return Outcome::usage(format!("unknown format `{other}`")),
    };
    if let Some(builtin) = target.strip_prefix("builtin:") {
        let graph = if builtin == "integer_line" {
            let window = match flag_u32(&p, "window") {
                Ok(w) => w.unwrap_or(3),
                Err(e) => return Outcome::usage(e),
            };
            (*integer_line().window(window)).clone()
        } else {
            let Some(sys) = builtin_system(builtin) else {
                return Outcome::domain(format!("unknown builtin `{builtin}`"));
            };
            let level = match flag_u32(&p, "level") {
                Ok(l) => l.unwrap_or(0),
                Err(e) => return Outcome::usage(e),
            };
            match sys.level(level) {
                Ok(g) => (*g).clone(),
                Err(e) => return Outcome::domain(e.to_string()),
            }
        };
        return match fmt {
            "dot" => Outcome::ok(dot::graph_dot(target, &graph, &[])),
            _ => Outcome::ok(json::render(&json::graph_json(target, &graph))),
        };
    }
    let [file, name] = &p.positional[..] else {
        return Outcome::usage("export needs <file> <name> or builtin:<id>".into());
    };
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    match doc.get(name) {
        Some(Def::Graph(g)) => match fmt {
            "dot" => Outcome::ok(dot::graph_dot(name, g, &[])),
            _ => Outcome::ok(json::render(&json::graph_json(name, g))),
        },
        Some(Def::Partition { partition, .. }) => match fmt {
            "dot" => Outcome::domain("partitions have no dot form".into()),
            _ => Outcome::ok(json::render(&json::partition_json(name, partition))),
        },
        Some(Def::Map { map, .. }) => match fmt {
            "dot" => Outcome::domain("maps have no dot form".into()),
            _ => Outcome::ok(json::render(&json::map_json(name, map))),
        },
        Some(Def::Presentation { presentation, .. }) => match fmt {
            "dot" => Outcome::ok(dot::graph_dot(name, presentation.graph(), &[])),
            _ => Outcome::ok(json::render(&json::presentation_json(name, presentation))),
        },
        Some(Def::System(_)) => {
            let sys = match resolve_system(&doc, name) {
                Ok(s) => s,
                Err(e) => return Outcome::domain(e),
            };
            let level = match flag_u32(&p, "level") {
                Ok(l) => l.unwrap_or(0),
                Err(e) => return Outcome::usage(e),
            };
            let g = match sys.level(level) {
                Ok(g) => g,
                Err(e) => return Outcome::domain(e.to_string()),
            };
            match fmt {
                "dot" => Outcome::ok(dot::graph_dot(&format!("{name}[{level}]"), &g, &[])),
                _ => Outcome::ok(json::render(&json::graph_json(
                    &format!("{name}[{level}]"),
                    &g,
                ))),
            }
        }
        None => Outcome::domain(format!("unknown definition `{name}`")),
    }
}
