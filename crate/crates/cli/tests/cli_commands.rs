//! End-to-end runs of every subcommand against the example corpus, checking
//! exit codes and that emitted documents parse back.

use std::process::Command;

use cofinite_cli::parser::parse;

fn corpus(file: &str) -> String {
    format!(
        "{}/tests/corpus/{file}",
        env!("CARGO_MANIFEST_DIR")
    )
}

fn run(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_cofinite"))
        .args(args)
        .output()
        .expect("run the cofinite binary");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8(output.stdout).unwrap(),
        String::from_utf8(output.stderr).unwrap(),
    )
}

#[test]
fn validate_reports_ok_for_the_corpus() {
    for file in ["two_component.cg", "quotients.cg", "finite_system.cg", "sums.cg"] {
        let (code, out, err) = run(&["validate", &corpus(file)]);
        assert_eq!(code, 0, "{file}: {err}");
        assert!(out.lines().all(|l| l.starts_with("ok:")), "{file}:\n{out}");
    }
    let (code, out, _) = run(&["validate", "builtin:phi1", "--horizon", "6"]);
    assert_eq!(code, 0);
    assert!(out.contains("ok: builtin:phi1"));
    let (code, out, _) = run(&["validate", "builtin:integer_line", "--window", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("ok: builtin:integer_line"));
}

#[test]
fn refine_prints_the_derived_partition_in_canonical_syntax() {
    let (code, out, err) = run(&["refine", &corpus("two_component.cg"), "tc", "whole"]);
    assert_eq!(code, 0, "{err}");
    // vertices one class, each orientation side one class
    assert!(out.contains("block { v:u, v:v, v:w };"), "{out}");
    assert!(out.contains("block { e:a, e:l };"), "{out}");
    assert!(out.contains("block { e:~a, e:~l };"), "{out}");
    // and the output is itself a parseable document fragment
    let wrapped = format!(
        "{}\n{}",
        std::fs::read_to_string(corpus("two_component.cg")).unwrap(),
        out.replace("whole_refined", "whole_refined2")
    );
    assert!(parse(&wrapped).is_ok());
}

#[test]
fn quotient_emits_a_self_contained_document() {
    let (code, out, err) = run(&["quotient", &corpus("quotients.cg"), "q", "fold"]);
    assert_eq!(code, 0, "{err}");
    let doc = parse(&out).unwrap_or_else(|e| panic!("{out}\n{e:?}"));
    assert!(doc.graph("q_mod_fold").is_some());
    assert!(doc.map("fold_proj").is_some());
}

#[test]
fn quotient_rejects_incompatible_partitions() {
    let (code, _, err) = run(&["quotient", &corpus("two_component.cg"), "tc", "whole"]);
    assert_eq!(code, 1);
    assert!(err.contains("error:"), "{err}");
}

#[test]
fn uquotient_emits_presentation_and_projection() {
    let (code, out, err) = run(&["uquotient", &corpus("quotients.cg"), "qp", "fold"]);
    assert_eq!(code, 0, "{err}");
    let doc = parse(&out).unwrap_or_else(|e| panic!("{out}\n{e:?}"));
    assert!(doc.presentation("qp_q").is_some());
    assert!(doc.map("qp_proj").is_some());
}

#[test]
fn sum_emits_inclusions_for_every_summand() {
    let (code, out, err) = run(&["sum", &corpus("sums.cg"), "sp1", "sp2"]);
    assert_eq!(code, 0, "{err}");
    let doc = parse(&out).unwrap_or_else(|e| panic!("{out}\n{e:?}"));
    assert!(doc.presentation("sum").is_some());
    assert!(doc.map("include_sp1").is_some());
    assert!(doc.map("include_sp2").is_some());
}

#[test]
fn closure_lists_member_images() {
    let (code, out, err) = run(&[
        "closure",
        &corpus("quotients.cg"),
        "qp",
        "--set",
        "v:x0",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("input: v:x0"));
    assert!(out.contains("closure: v:x0"), "separating base closes points:\n{out}");
    let (code, json_out, _) = run(&[
        "closure",
        &corpus("quotients.cg"),
        "qp",
        "--set",
        "v:x0",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&json_out).unwrap();
    assert_eq!(value["format"], 1);
    assert_eq!(value["closure"][0], "v:x0");
}

#[test]
fn separate_answers_both_ways() {
    let (code, out, _) = run(&["separate", &corpus("quotients.cg"), "qp"]);
    assert_eq!(code, 0);
    assert_eq!(out, "separating: true\n");
    let (code, out, _) = run(&["separate", &corpus("sums.cg"), "sp1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("separating: true"), "{out}");
}

#[test]
fn complete_reports_an_isomorphism_for_finite_presentations() {
    let (code, out, err) = run(&["complete", &corpus("quotients.cg"), "qp"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("# theta is an isomorphism: true"), "{out}");
    let (code, out, _) = run(&[
        "complete",
        "builtin:phi2",
        "--horizon",
        "5",
        "--lookahead",
        "3",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("boundary missed by the embedding: true"), "{out}");
}

#[test]
fn census_works_on_document_systems() {
    let (code, out, err) = run(&[
        "census",
        &corpus("finite_system.cg"),
        "chain",
        "--horizon",
        "1",
        "--lookahead",
        "0",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("vertex ends: 0"));
    assert!(out.contains("rigid threads: 3"), "{out}");
    // horizon beyond the declared levels is a domain error
    let (code, _, err) = run(&[
        "census",
        &corpus("finite_system.cg"),
        "chain",
        "--horizon",
        "4",
        "--lookahead",
        "2",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("error:"));
}

#[test]
fn extend_builds_the_thread_map() {
    let (code, out, err) = run(&[
        "extend",
        &corpus("finite_system.cg"),
        "chain",
        "--family",
        "id0,id1",
    ]);
    assert_eq!(code, 0, "{err}");
    let doc = parse(&out).unwrap_or_else(|e| panic!("{out}\n{e:?}"));
    assert!(doc.map("chain_ext").is_some());
}

#[test]
fn export_formats() {
    let (code, out, _) = run(&["export", &corpus("quotients.cg"), "q", "--format", "dot"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph \"q\""));
    assert_eq!(out.matches("->").count(), 2, "one arrow per pair:\n{out}");

    let (code, out, _) = run(&["export", &corpus("quotients.cg"), "fold", "--format", "json"]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(value["kind"], "partition");
    assert_eq!(value["format"], 1);

    let (code, out, _) = run(&["export", "builtin:phi1", "--level", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(value["vertices"].as_array().unwrap().len(), 7);

    let (code, out, _) = run(&["export", "builtin:integer_line", "--window", "2"]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(value["vertices"].as_array().unwrap().len(), 5);
    assert_eq!(value["edges"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes_follow_the_contract() {
    // unknown command and unknown flag are usage errors
    assert_eq!(run(&["bogus"]).0, 2);
    assert_eq!(run(&["census", "builtin:phi1", "--nope", "1"]).0, 2);
    // parse errors are reported as positioned diagnostics
    let dir = std::env::temp_dir().join("cofinite-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.cg");
    std::fs::write(&bad, "graph G { vertices x; }").unwrap();
    let (code, _, err) = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("1:"), "diagnostics carry positions: {err}");
    // domain errors exit 1
    let (code, _, _) = run(&["separate", &corpus("quotients.cg"), "nope"]);
    assert_eq!(code, 1);
    // help goes to stdout with success
    let (code, out, _) = run(&["help"]);
    assert_eq!(code, 0);
    assert!(out.contains("usage:"));
}
