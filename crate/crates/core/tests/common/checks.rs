//! Property checks shared by the property tests and the acceptance runner.
//! Each returns a list of human-readable mismatches; empty means the
//! property holds on that log.

use std::collections::{BTreeMap, BTreeSet};

use ocelf::encoders::{encode_graph, encode_sequential, encode_tabular};
use ocelf::features::{build_graphs, compute_matrix_with_graphs};
use ocelf::model::EventLog;
use ocelf::{
    compute_matrix, extract_components, extract_leading_type, Distance, ExecutionGraph,
    FeatureMatrix, FeatureSpec, ObjectGraph, ProcessExecution,
};

use super::{all_pairs_distances, brute_force_leading, closure_components};

pub const TOLERANCE: f64 = 1e-9;

fn specs(list: &[&str]) -> Vec<FeatureSpec> {
    list.iter()
        .map(|s| s.parse().expect("valid spec"))
        .collect()
}

/// Every extraction a random log supports: components plus one leading-type
/// run per object type.
pub fn all_extractions(log: &EventLog) -> Vec<(String, Vec<ProcessExecution>)> {
    let graph = ObjectGraph::build(log);
    let mut out = vec![("components".to_owned(), extract_components(log, &graph))];
    for t in log.object_types() {
        let ex = extract_leading_type(log, &graph, t).expect("declared type");
        out.push((format!("leading {t}"), ex.executions));
    }
    out
}

fn column(m: &FeatureMatrix, name: &str) -> usize {
    m.column_index(name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn columns_with_prefix(m: &FeatureMatrix, prefix: &str) -> Vec<usize> {
    m.column_names
        .iter()
        .enumerate()
        .filter(|(_, n)| n.starts_with(prefix))
        .map(|(i, _)| i)
        .collect()
}

/// Conservation, non-negativity, range, sum and monotonicity laws of the
/// feature catalog.
pub fn conservation_violations(log: &EventLog) -> Vec<String> {
    let spec_list = specs(&[
        "P2",
        "P3",
        "execution_duration",
        "P5",
        "P7",
        "P8",
        "service_time",
        "waiting_time",
        "sojourn_time",
        "flow_time",
        "O1",
        "O2",
        "O5",
        "O6",
        "C5",
    ]);
    let mut bad = Vec::new();
    for (label, execs) in all_extractions(log) {
        let m = compute_matrix(log, &execs, &spec_list).expect("catalog computes on random logs");
        let get = |row: usize, c: usize| m.row(row)[c];
        let p2 = column(&m, "P2");
        let p3 = column(&m, "P3");
        let dur = column(&m, "execution_duration");
        let p5 = column(&m, "P5");
        let p7 = columns_with_prefix(&m, "P7[");
        let o5 = column(&m, "O5");
        let o6 = columns_with_prefix(&m, "O6[");
        let c5 = columns_with_prefix(&m, "C5[");
        let non_negative: Vec<usize> = [
            "P2",
            "P3",
            "P5",
            "service_time",
            "waiting_time",
            "sojourn_time",
            "flow_time",
        ]
        .iter()
        .map(|n| column(&m, n))
        .chain(p7.iter().copied())
        .chain(columns_with_prefix(&m, "P8["))
        .collect();
        for i in 0..m.num_rows() {
            let key = m.rows[i];
            let at = || format!("{label}, exec {}, {}", key.exec_id, log.event_id(key.event));
            let (a, b, d) = (
                get(i, p2).unwrap(),
                get(i, p3).unwrap(),
                get(i, dur).unwrap(),
            );
            if (a + b - d).abs() > TOLERANCE {
                bad.push(format!("{}: P2 + P3 = {} but duration = {d}", at(), a + b));
            }
            for &c in &non_negative {
                match get(i, c) {
                    Some(v) if v >= 0.0 => {}
                    other => bad.push(format!("{}: {} = {other:?}", at(), m.column_names[c])),
                }
            }
            let sync = get(i, p5).unwrap();
            for &c in &p7 {
                if get(i, c).unwrap() > sync {
                    bad.push(format!("{}: {} exceeds P5", at(), m.column_names[c]));
                }
            }
            let types: f64 = o6.iter().map(|&c| get(i, c).unwrap()).sum();
            if types != get(i, o5).unwrap() {
                bad.push(format!(
                    "{}: sum of O6 = {types}, O5 = {:?}",
                    at(),
                    get(i, o5)
                ));
            }
            let acts: f64 = c5.iter().map(|&c| get(i, c).unwrap()).sum();
            if acts != 1.0 {
                bad.push(format!("{}: sum of C5 = {acts}", at()));
            }
        }
        for name in ["O1", "O2"] {
            let c = column(&m, name);
            for p in &execs {
                let values: Vec<f64> = m.rows_of(p.exec_id).map(|i| get(i, c).unwrap()).collect();
                if values.windows(2).any(|w| w[1] < w[0]) {
                    bad.push(format!(
                        "{label}, exec {}: {name} decreases: {values:?}",
                        p.exec_id
                    ));
                }
            }
        }
    }
    bad
}

fn object_set(p: &ProcessExecution) -> BTreeSet<usize> {
    p.objects.iter().map(|o| o.index()).collect()
}

/// Components against the transitive-closure oracle, distances against
/// Floyd-Warshall and, for logs of at most `max_lead_objects` objects,
/// leading-type extraction against exhaustive subgraph enumeration.
/// Returns the mismatches and whether the leading-type comparison ran.
pub fn oracle_mismatches(log: &EventLog, max_lead_objects: usize) -> (Vec<String>, bool) {
    let mut bad = Vec::new();
    let graph = ObjectGraph::build(log);

    let comps: Vec<BTreeSet<usize>> = graph
        .connected_components()
        .iter()
        .map(|c| c.iter().map(|o| o.index()).collect())
        .collect();
    let expected = closure_components(log);
    if comps != expected {
        bad.push(format!("components {comps:?}, closure oracle {expected:?}"));
    }

    let execs = extract_components(log, &graph);
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    for p in &execs {
        for e in &p.events {
            *seen.entry(e.index()).or_default() += 1;
        }
    }
    let partition = seen.len() == log.num_events() && seen.values().all(|&c| c == 1);
    if !partition {
        bad.push("component executions do not partition the events".to_owned());
    }

    let dist = all_pairs_distances(log);
    for a in log.object_indices() {
        for b in log.object_indices() {
            let ours = graph.distance(a, b);
            let oracle = dist[a.index()][b.index()].map_or(Distance::Infinite, Distance::Finite);
            if ours != oracle {
                bad.push(format!(
                    "distance({}, {}) = {ours}, oracle {oracle}",
                    log.object_id(a),
                    log.object_id(b)
                ));
            }
        }
    }

    let ran = log.num_objects() <= max_lead_objects;
    if ran {
        for t in log.object_types() {
            let mut ours: Vec<BTreeSet<usize>> = extract_leading_type(log, &graph, t)
                .expect("declared type")
                .executions
                .iter()
                .map(object_set)
                .collect();
            let mut oracle = brute_force_leading(log, t);
            ours.sort();
            oracle.sort();
            if ours != oracle {
                bad.push(format!("leading {t}: {ours:?}, brute force {oracle:?}"));
            }
        }
    }
    (bad, ran)
}

/// Feature specs covering every catalog key, families included.
pub fn full_catalog() -> Vec<FeatureSpec> {
    specs(&[
        "C1",
        "C2",
        "C3",
        "C4",
        "C5",
        "D1[amount]",
        "D2[amount,sum]",
        "D3[amount]",
        "R1",
        "R2",
        "R3",
        "P2",
        "P3",
        "P5",
        "P7",
        "P8",
        "service_time",
        "waiting_time",
        "sojourn_time",
        "flow_time",
        "execution_duration",
        "O1",
        "O2",
        "O3",
        "O5",
        "O6",
    ])
}

fn json_value(v: &serde_json::Value) -> Option<f64> {
    if v.is_null() {
        None
    } else {
        Some(v.as_f64().expect("feature values are numbers"))
    }
}

/// Re-reads the CSV, JSONL and node-link JSON texts and checks that each
/// (execution, event, feature) carries the same value everywhere, including
/// the matrix it came from.
pub fn cross_encoding_mismatches(log: &EventLog) -> Vec<String> {
    let catalog = full_catalog();
    let mut bad = Vec::new();
    for (label, execs) in all_extractions(log) {
        let graphs = build_graphs(log, &execs);
        let m =
            compute_matrix_with_graphs(log, &execs, &graphs, &catalog).expect("catalog computes");
        let csv_text = encode_tabular(log, &m).to_csv_string().unwrap();
        let jsonl = encode_sequential(log, &m, &execs)
            .to_jsonl_string()
            .unwrap();
        let graph_json = encode_graph(log, &m, &execs, &graphs)
            .to_json_string()
            .unwrap();

        type Key = (usize, String, String);
        let mut from_matrix: BTreeMap<Key, Option<f64>> = BTreeMap::new();
        for (i, key) in m.rows.iter().enumerate() {
            for (c, name) in m.column_names.iter().enumerate() {
                from_matrix.insert(
                    (
                        key.exec_id,
                        log.event_id(key.event).to_owned(),
                        name.clone(),
                    ),
                    m.row(i)[c],
                );
            }
        }

        let mut from_csv = BTreeMap::new();
        let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
        let header = reader.headers().unwrap().clone();
        for record in reader.records() {
            let record = record.unwrap();
            let exec: usize = record[1].parse().unwrap();
            for c in 2..header.len() {
                let v = (!record[c].is_empty()).then(|| record[c].parse::<f64>().unwrap());
                from_csv.insert((exec, record[0].to_owned(), header[c].to_owned()), v);
            }
        }

        let mut from_seq = BTreeMap::new();
        for line in jsonl.lines() {
            let seq: serde_json::Value = serde_json::from_str(line).unwrap();
            let exec = seq["exec_id"].as_u64().unwrap() as usize;
            for step in seq["steps"].as_array().unwrap() {
                for (name, v) in step["features"].as_object().unwrap() {
                    from_seq.insert(
                        (
                            exec,
                            step["event"].as_str().unwrap().to_owned(),
                            name.clone(),
                        ),
                        json_value(v),
                    );
                }
            }
        }

        let mut from_graph = BTreeMap::new();
        let mut edge_backwards = Vec::new();
        let parsed: serde_json::Value = serde_json::from_str(&graph_json).unwrap();
        for g in parsed.as_array().unwrap() {
            let exec = g["exec_id"].as_u64().unwrap() as usize;
            let mut order = BTreeMap::new();
            for (pos, node) in g["nodes"].as_array().unwrap().iter().enumerate() {
                let id = node["id"].as_str().unwrap().to_owned();
                order.insert(id.clone(), pos);
                for (name, v) in node["features"].as_object().unwrap() {
                    from_graph.insert((exec, id.clone(), name.clone()), json_value(v));
                }
            }
            for edge in g["edges"].as_array().unwrap() {
                let (a, b) = (edge[0].as_str().unwrap(), edge[1].as_str().unwrap());
                if order[a] >= order[b] {
                    edge_backwards.push(format!("exec {exec}: edge {a} -> {b} points backwards"));
                }
            }
        }

        for (name, other) in [
            ("tabular", &from_csv),
            ("sequential", &from_seq),
            ("graph", &from_graph),
        ] {
            if other.len() != from_matrix.len() {
                bad.push(format!(
                    "{label}: {name} has {} values, matrix {}",
                    other.len(),
                    from_matrix.len()
                ));
            }
            for (k, v) in &from_matrix {
                let w = other.get(k);
                if w != Some(v) {
                    bad.push(format!("{label}: {name} {k:?} = {w:?}, matrix {v:?}"));
                }
            }
        }
        bad.extend(edge_backwards.into_iter().map(|e| format!("{label}: {e}")));

        for (p, g) in execs.iter().zip(&graphs) {
            let fresh = ExecutionGraph::build(log, p);
            if fresh.edges() != g.edges() {
                bad.push(format!(
                    "{label}: exec {} graph differs between builds",
                    p.exec_id
                ));
            }
        }
    }
    bad
}
