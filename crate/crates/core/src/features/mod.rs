//! The object-centric feature catalog and the per-(event, execution) matrix.

mod engine;
pub mod spec;

use rayon::prelude::*;

pub use engine::FeatureContext;
pub use spec::{Aggregation, FeatureSpec, DEFAULT_RESOURCE_ATTRIBUTE, DEFAULT_WINDOW};

use crate::error::FeatureError;
use crate::executions::{ExecutionGraph, ProcessExecution};
use crate::model::{EventIdx, EventLog};

/// Computes one feature for one event of one execution.
///
/// Builds fresh log indexes on every call; use [`FeatureContext`] or
/// [`compute_matrix`] for bulk evaluation.
pub fn compute(
    log: &EventLog,
    execution: &ProcessExecution,
    graph: &ExecutionGraph,
    e: EventIdx,
    spec: &FeatureSpec,
) -> Result<Option<f64>, FeatureError> {
    FeatureContext::new(log, std::slice::from_ref(spec)).compute(execution, graph, e, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowKey {
    pub exec_id: usize,
    pub event: EventIdx,
}

/// Feature values for every (event, execution) pair, rows ordered by
/// execution then stable event order. `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub columns: Vec<FeatureSpec>,
    pub column_names: Vec<String>,
    pub rows: Vec<RowKey>,
    values: Vec<Option<f64>>,
}

impl FeatureMatrix {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[Option<f64>] {
        let w = self.columns.len();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn find(&self, exec_id: usize, event: EventIdx) -> Option<&[Option<f64>]> {
        self.rows
            .binary_search(&RowKey { exec_id, event })
            .ok()
            .map(|i| self.row(i))
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn value(&self, exec_id: usize, event: EventIdx, column: &str) -> Option<Option<f64>> {
        let c = self.column_index(column)?;
        self.find(exec_id, event).map(|r| r[c])
    }

    /// Rows belonging to one execution.
    pub fn rows_of(&self, exec_id: usize) -> std::ops::Range<usize> {
        let start = self.rows.partition_point(|k| k.exec_id < exec_id);
        let end = self.rows.partition_point(|k| k.exec_id <= exec_id);
        start..end
    }

    /// Replaces every missing value with zero.
    pub fn impute_zero(&mut self) {
        for v in &mut self.values {
            v.get_or_insert(0.0);
        }
    }
}

pub fn expand_specs(log: &EventLog, specs: &[FeatureSpec]) -> Vec<FeatureSpec> {
    specs.iter().flat_map(|s| s.expand(log)).collect()
}

pub fn build_graphs(log: &EventLog, executions: &[ProcessExecution]) -> Vec<ExecutionGraph> {
    executions
        .par_iter()
        .map(|p| ExecutionGraph::build(log, p))
        .collect()
}

/// Evaluates the expanded `specs` for every event of every execution.
pub fn compute_matrix(
    log: &EventLog,
    executions: &[ProcessExecution],
    specs: &[FeatureSpec],
) -> Result<FeatureMatrix, FeatureError> {
    let graphs = build_graphs(log, executions);
    compute_matrix_with_graphs(log, executions, &graphs, specs)
}

/// As [`compute_matrix`], reusing prebuilt execution graphs (one per
/// execution, same order).
pub fn compute_matrix_with_graphs(
    log: &EventLog,
    executions: &[ProcessExecution],
    graphs: &[ExecutionGraph],
    specs: &[FeatureSpec],
) -> Result<FeatureMatrix, FeatureError> {
    assert_eq!(executions.len(), graphs.len(), "one graph per execution");
    let columns = expand_specs(log, specs);
    let ctx = FeatureContext::new(log, &columns);

    let blocks: Vec<(Vec<RowKey>, Vec<Option<f64>>)> = executions
        .par_iter()
        .zip(graphs.par_iter())
        .map(|(p, g)| {
            let mut keys = Vec::with_capacity(p.events.len());
            let mut values = Vec::with_capacity(p.events.len() * columns.len());
            for &e in &p.events {
                keys.push(RowKey {
                    exec_id: p.exec_id,
                    event: e,
                });
                for spec in &columns {
                    let v = ctx
                        .compute(p, g, e, spec)
                        .map_err(|source| FeatureError::AtRow {
                            event: log.event_id(e).to_owned(),
                            exec_id: p.exec_id,
                            source: Box::new(source),
                        })?;
                    values.push(v);
                }
            }
            Ok((keys, values))
        })
        .collect::<Result<_, FeatureError>>()?;

    let mut rows = Vec::new();
    let mut values = Vec::new();
    for (k, v) in blocks {
        rows.extend(k);
        values.extend(v);
    }
    // Rows out of (exec_id, event) order are sorted together with their values.
    if !rows.windows(2).all(|w| w[0] < w[1]) {
        let width = columns.len();
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by_key(|&i| rows[i]);
        let sorted_values = order
            .iter()
            .flat_map(|&i| values[i * width..(i + 1) * width].iter().copied())
            .collect();
        rows = order.iter().map(|&i| rows[i]).collect();
        values = sorted_values;
    }
    Ok(FeatureMatrix {
        column_names: columns.iter().map(ToString::to_string).collect(),
        columns,
        rows,
        values,
    })
}
