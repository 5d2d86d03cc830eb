//! Tabular (CSV), sequential (JSONL) and graph (node-link JSON, DOT)
//! encodings of a [`FeatureMatrix`].
//!
//! Missing values are empty CSV cells and JSON `null`.

use std::fmt::Write as _;
use std::io::Write;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::EncodeError;
use crate::executions::{ExecutionGraph, ProcessExecution};
use crate::features::FeatureMatrix;
use crate::graph::escape;
use crate::model::{EventIdx, EventLog};

/// Canonical text for a feature value; negative zero prints as `0`.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".to_owned()
    } else {
        v.to_string()
    }
}

fn object_labels(log: &EventLog, e: EventIdx) -> Vec<String> {
    log.event_objects(e)
        .iter()
        .map(|&o| log.object_id(o).to_owned())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabularRow {
    pub event_id: String,
    pub exec_id: usize,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabularEncoding {
    /// `event_id`, `exec_id`, then one column per feature.
    pub header: Vec<String>,
    pub rows: Vec<TabularRow>,
}

pub fn encode_tabular(log: &EventLog, matrix: &FeatureMatrix) -> TabularEncoding {
    let mut header = vec!["event_id".to_owned(), "exec_id".to_owned()];
    header.extend(matrix.column_names.iter().cloned());
    let rows = matrix
        .rows
        .iter()
        .enumerate()
        .map(|(i, key)| TabularRow {
            event_id: log.event_id(key.event).to_owned(),
            exec_id: key.exec_id,
            values: matrix.row(i).to_vec(),
        })
        .collect();
    TabularEncoding { header, rows }
}

impl TabularEncoding {
    /// RFC-4180 CSV with LF line endings.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), EncodeError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        writer.write_record(&self.header)?;
        for row in &self.rows {
            let mut record = Vec::with_capacity(row.values.len() + 2);
            record.push(row.event_id.clone());
            record.push(row.exec_id.to_string());
            record.extend(
                row.values
                    .iter()
                    .map(|v| v.map(format_value).unwrap_or_default()),
            );
            writer.write_record(&record)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, EncodeError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV of UTF-8 fields is UTF-8"))
    }
}

/// Feature name/value pairs serialized as a JSON object in column order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureValues(pub Vec<(String, Option<f64>)>);

impl FeatureValues {
    fn from_row(matrix: &FeatureMatrix, row: usize) -> Self {
        FeatureValues(
            matrix
                .column_names
                .iter()
                .cloned()
                .zip(matrix.row(row).iter().copied())
                .collect(),
        )
    }

    pub fn get(&self, name: &str) -> Option<Option<f64>> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

impl Serialize for FeatureValues {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (name, value) in &self.0 {
            map.serialize_entry(name, value)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub event: String,
    pub activity: String,
    pub objects: Vec<String>,
    pub features: FeatureValues,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sequence {
    pub exec_id: usize,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialEncoding {
    pub sequences: Vec<Sequence>,
}

/// One step list per execution, events in stable order (completion time,
/// ties broken by event id).
pub fn encode_sequential(
    log: &EventLog,
    matrix: &FeatureMatrix,
    executions: &[ProcessExecution],
) -> SequentialEncoding {
    let sequences = executions
        .iter()
        .map(|p| {
            let steps = matrix
                .rows_of(p.exec_id)
                .map(|i| {
                    let e = matrix.rows[i].event;
                    Step {
                        event: log.event_id(e).to_owned(),
                        activity: log.activity(e).to_owned(),
                        objects: object_labels(log, e),
                        features: FeatureValues::from_row(matrix, i),
                    }
                })
                .collect();
            Sequence {
                exec_id: p.exec_id,
                steps,
            }
        })
        .collect();
    SequentialEncoding { sequences }
}

impl SequentialEncoding {
    /// One JSON object per execution per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), EncodeError> {
        for seq in &self.sequences {
            serde_json::to_writer(&mut out, seq)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> Result<String, EncodeError> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)?;
        Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphNode {
    pub id: String,
    pub activity: String,
    pub objects: Vec<String>,
    pub features: FeatureValues,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureGraph {
    pub exec_id: usize,
    pub nodes: Vec<GraphNode>,
    /// `[source, target]` event id pairs, sorted lexicographically.
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphEncoding {
    pub graphs: Vec<FeatureGraph>,
}

/// Labeled execution graphs; `graphs[i]` must belong to `executions[i]`.
pub fn encode_graph(
    log: &EventLog,
    matrix: &FeatureMatrix,
    executions: &[ProcessExecution],
    graphs: &[ExecutionGraph],
) -> GraphEncoding {
    assert_eq!(executions.len(), graphs.len(), "one graph per execution");
    let graphs = executions
        .iter()
        .zip(graphs)
        .map(|(p, g)| {
            let nodes = matrix
                .rows_of(p.exec_id)
                .map(|i| {
                    let e = matrix.rows[i].event;
                    GraphNode {
                        id: log.event_id(e).to_owned(),
                        activity: log.activity(e).to_owned(),
                        objects: object_labels(log, e),
                        features: FeatureValues::from_row(matrix, i),
                    }
                })
                .collect();
            let mut edges: Vec<[String; 2]> = g
                .edges()
                .iter()
                .map(|edge| {
                    [
                        log.event_id(edge.source).to_owned(),
                        log.event_id(edge.target).to_owned(),
                    ]
                })
                .collect();
            edges.sort();
            FeatureGraph {
                exec_id: p.exec_id,
                nodes,
                edges,
            }
        })
        .collect();
    GraphEncoding { graphs }
}

impl GraphEncoding {
    /// A JSON array of node-link graphs.
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), EncodeError> {
        serde_json::to_writer_pretty(&mut out, &self.graphs)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    pub fn to_json_string(&self) -> Result<String, EncodeError> {
        let mut buf = Vec::new();
        self.write_json(&mut buf)?;
        Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
    }
}

/// Graphviz rendering of one execution as a variant: nodes show the activity
/// and the event's objects, edges carry the objects that induce them.
pub fn execution_dot(
    log: &EventLog,
    execution: &ProcessExecution,
    graph: &ExecutionGraph,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph execution_{} {{", execution.exec_id);
    out.push_str("  rankdir=LR;\n  node [shape=box, style=rounded];\n");
    for &e in graph.nodes() {
        let _ = writeln!(
            out,
            "  \"{}\" [label=\"{}\\n{}\"];",
            escape(log.event_id(e)),
            escape(log.activity(e)),
            escape(&object_labels(log, e).join(", "))
        );
    }
    for edge in graph.edges() {
        let objects: Vec<&str> = edge.objects.iter().map(|&o| log.object_id(o)).collect();
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\", weight={}];",
            escape(log.event_id(edge.source)),
            escape(log.event_id(edge.target)),
            escape(&objects.join(", ")),
            1 + objects.len() * 4
        );
    }
    out.push_str("}\n");
    out
}
