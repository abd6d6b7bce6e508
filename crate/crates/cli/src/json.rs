//! JSON renderings of the core values. Every object carries a top-level
//! `"format": 1`; keys are emitted in sorted order so output is
//! byte-stable.

use serde_json::{json, Map, Value};

use cofinite::invsys::CensusReport;
use cofinite::relations::Partition;
use cofinite::topograph::{local_name, FinGraph, GraphMap};
use cofinite::uniformity::{ClosureReport, CofinitePresentation};

pub const FORMAT_VERSION: u64 = 1;

fn with_format(mut map: Map<String, Value>) -> Value {
    map.insert("format".into(), json!(FORMAT_VERSION));
    Value::Object(map)
}

pub fn graph_json(name: &str, g: &FinGraph) -> Value {
    let vertices: Vec<&str> = g.vertices().iter().map(local_name).collect();
    let edges: Vec<Value> = g
        .pair_representatives()
        .iter()
        .map(|e| {
            json!({
                "id": local_name(e),
                "inv": local_name(g.inv_of(e).expect("edge")),
                "src": local_name(g.src_of(e).expect("edge")),
                "tgt": local_name(g.tgt_of(e).expect("edge")),
            })
        })
        .collect();
    let mut map = Map::new();
    map.insert("kind".into(), json!("graph"));
    map.insert("name".into(), json!(name));
    map.insert("vertices".into(), json!(vertices));
    map.insert("edges".into(), json!(edges));
    if let Some(pos) = g.positive_edges() {
        let orient: Vec<&str> = pos.iter().map(|e| local_name(e)).collect();
        map.insert("orient".into(), json!(orient));
    }
    with_format(map)
}

pub fn partition_json(name: &str, p: &Partition) -> Value {
    let carrier: Vec<&str> = p.carrier().iter().map(|id| id.as_str()).collect();
    let blocks: Vec<Vec<String>> = p
        .blocks_ids()
        .into_iter()
        .map(|blk| blk.into_iter().map(|id| id.as_str().to_string()).collect())
        .collect();
    let mut map = Map::new();
    map.insert("kind".into(), json!("partition"));
    map.insert("name".into(), json!(name));
    map.insert("carrier".into(), json!(carrier));
    map.insert("blocks".into(), json!(blocks));
    with_format(map)
}

pub fn map_json(name: &str, m: &GraphMap) -> Value {
    let vertices: Vec<Value> = m
        .source()
        .vertices()
        .iter()
        .map(|v| json!([v.as_str(), m.apply_vertex(v).expect("vertex").as_str()]))
        .collect();
    let edges: Vec<Value> = m
        .source()
        .edges()
        .iter()
        .map(|e| json!([e.as_str(), m.apply_edge(e).expect("edge").as_str()]))
        .collect();
    let mut map = Map::new();
    map.insert("kind".into(), json!("map"));
    map.insert("name".into(), json!(name));
    map.insert("vertices".into(), json!(vertices));
    map.insert("edges".into(), json!(edges));
    with_format(map)
}

pub fn presentation_json(name: &str, pres: &CofinitePresentation) -> Value {
    let base: Vec<Value> = pres
        .base()
        .iter()
        .enumerate()
        .map(|(i, p)| partition_json(&format!("{name}.base{i}"), p))
        .collect();
    let mut map = Map::new();
    map.insert("kind".into(), json!("presentation"));
    map.insert("name".into(), json!(name));
    map.insert("graph".into(), graph_json(&format!("{name}.graph"), pres.graph()));
    map.insert("base".into(), json!(base));
    map.insert("improper".into(), json!(pres.is_improper()));
    with_format(map)
}

pub fn closure_json(report: &ClosureReport) -> Value {
    let ids = |v: &[cofinite::relations::ElemId]| -> Vec<String> {
        v.iter().map(|id| id.as_str().to_string()).collect()
    };
    let mut map = Map::new();
    map.insert("kind".into(), json!("closure"));
    map.insert("input".into(), json!(ids(&report.input)));
    map.insert("closure".into(), json!(ids(&report.closure)));
    map.insert(
        "member_images".into(),
        json!(report.member_images.iter().map(|img| ids(img)).collect::<Vec<_>>()),
    );
    map.insert("improper".into(), json!(report.improper));
    with_format(map)
}

pub fn census_json(name: &str, report: &CensusReport) -> Value {
    let mut map = Map::new();
    map.insert("kind".into(), json!("census"));
    map.insert("system".into(), json!(name));
    map.insert("horizon".into(), json!(report.horizon));
    map.insert("lookahead".into(), json!(report.lookahead));
    map.insert("rigid_threads".into(), json!(report.rigid_threads));
    map.insert("vertex_ends".into(), json!(report.vertex_ends));
    map.insert("edge_end_pairs".into(), json!(report.edge_end_pairs));
    map.insert("end_count".into(), json!(report.end_count));
    map.insert("stabilized".into(), json!(report.stabilized));
    map.insert(
        "history".into(),
        json!(report
            .history
            .iter()
            .map(|&(h, v, e)| json!({"horizon": h, "vertex_ends": v, "edge_end_pairs": e}))
            .collect::<Vec<_>>()),
    );
    map.insert(
        "boundary".into(),
        json!(report
            .boundary_ids
            .iter()
            .map(|id| id.as_str())
            .collect::<Vec<_>>()),
    );
    with_format(map)
}

pub fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}
