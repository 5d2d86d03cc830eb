//! Process execution extraction and execution graphs.
//!
//! An execution is a connected set of objects together with every event that
//! touches at least one of them. Two extraction strategies are offered:
//! connected components of the object graph, and leading-type extraction,
//! which builds one execution around each object of a chosen type.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::ModelError;
use crate::graph::{Distance, ObjectGraph};
use crate::model::{EventIdx, EventLog, ObjectIdx, TypeIdx};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessExecution {
    pub exec_id: usize,
    /// Member objects, ascending.
    pub objects: Vec<ObjectIdx>,
    /// Events touching any member, in stable order.
    pub events: Vec<EventIdx>,
    pub leading_object: Option<ObjectIdx>,
}

impl ProcessExecution {
    pub fn contains_event(&self, e: EventIdx) -> bool {
        self.events.binary_search(&e).is_ok()
    }

    pub fn contains_object(&self, o: ObjectIdx) -> bool {
        self.objects.binary_search(&o).is_ok()
    }

    pub fn object_ids<'a>(&self, log: &'a EventLog) -> BTreeSet<&'a str> {
        self.objects.iter().map(|&o| log.object_id(o)).collect()
    }

    pub fn event_ids<'a>(&self, log: &'a EventLog) -> Vec<&'a str> {
        self.events.iter().map(|&e| log.event_id(e)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Components,
    LeadingType(String),
}

/// A leading-type candidate removed because another candidate contains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedExecution {
    pub leading_object: ObjectIdx,
    pub objects: Vec<ObjectIdx>,
    pub contained_in: ObjectIdx,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub executions: Vec<ProcessExecution>,
    pub dropped: Vec<DroppedExecution>,
}

impl Extraction {
    /// Events that belong to more than one execution, with their multiplicity.
    pub fn shared_events(&self) -> BTreeMap<EventIdx, usize> {
        let mut counts: BTreeMap<EventIdx, usize> = BTreeMap::new();
        for p in &self.executions {
            for &e in &p.events {
                *counts.entry(e).or_default() += 1;
            }
        }
        counts.retain(|_, c| *c > 1);
        counts
    }
}

/// Union of the traces of `objects`, in stable order.
fn events_of(log: &EventLog, objects: &[ObjectIdx]) -> Vec<EventIdx> {
    let mut events: Vec<EventIdx> = objects
        .iter()
        .flat_map(|&o| log.trace(o).iter().copied())
        .collect();
    events.sort_unstable();
    events.dedup();
    events
}

/// One execution per connected component of the object graph.
pub fn extract_components(log: &EventLog, graph: &ObjectGraph) -> Vec<ProcessExecution> {
    graph
        .connected_components()
        .into_par_iter()
        .enumerate()
        .map(|(exec_id, objects)| ProcessExecution {
            exec_id,
            events: events_of(log, &objects),
            objects,
            leading_object: None,
        })
        .collect()
}

/// Member objects of the execution led by `lead`.
///
/// Every object of the leading object's component is a candidate. A candidate
/// stays unless an object of the same type is strictly closer to `lead`, with
/// distances measured in the whole component. Of the survivors only the part
/// connected to `lead` is kept.
fn leading_members(
    graph: &ObjectGraph,
    log: &EventLog,
    lead: ObjectIdx,
    component: &[ObjectIdx],
) -> Vec<ObjectIdx> {
    let dist = graph.distances_within(lead, component);
    let mut closest: HashMap<Option<TypeIdx>, Distance> = HashMap::new();
    for (i, &o) in component.iter().enumerate() {
        let best = closest.entry(log.type_of(o)).or_insert(Distance::Infinite);
        if dist[i] < *best {
            *best = dist[i];
        }
    }
    let retained: BTreeSet<ObjectIdx> = component
        .iter()
        .enumerate()
        .filter(|&(i, &o)| dist[i] == closest[&log.type_of(o)])
        .map(|(_, &o)| o)
        .collect();

    let mut keep = BTreeSet::from([lead]);
    let mut stack = vec![lead];
    while let Some(u) = stack.pop() {
        for &v in graph.neighbors(u) {
            if retained.contains(&v) && keep.insert(v) {
                stack.push(v);
            }
        }
    }
    keep.into_iter().collect()
}

/// One execution per object of type `lead_type`, minus candidates whose
/// object set is contained in another candidate's.
pub fn extract_leading_type(
    log: &EventLog,
    graph: &ObjectGraph,
    lead_type: &str,
) -> Result<Extraction, ModelError> {
    let lead = log
        .type_by_name(lead_type)
        .ok_or_else(|| ModelError::UnknownType(lead_type.to_owned()))?;

    let components = graph.connected_components();
    let mut component_of = vec![0usize; log.num_objects()];
    for (c, members) in components.iter().enumerate() {
        for &o in members {
            component_of[o.index()] = c;
        }
    }

    let leaders: Vec<ObjectIdx> = log
        .object_indices()
        .filter(|&o| log.type_of(o) == Some(lead))
        .collect();
    let candidates: Vec<Vec<ObjectIdx>> = leaders
        .par_iter()
        .map(|&o| leading_members(graph, log, o, &components[component_of[o.index()]]))
        .collect();

    // Any superset of a candidate contains its leading object.
    let mut containing: HashMap<ObjectIdx, Vec<usize>> = HashMap::new();
    for (i, members) in candidates.iter().enumerate() {
        for &o in members {
            containing.entry(o).or_default().push(i);
        }
    }
    let mut executions = Vec::new();
    let mut dropped = Vec::new();
    for (i, members) in candidates.iter().enumerate() {
        let container = containing[&leaders[i]].iter().copied().find(|&j| {
            j != i && {
                let other = &candidates[j];
                let subset = members.iter().all(|o| other.binary_search(o).is_ok());
                subset && (other.len() > members.len() || j < i)
            }
        });
        match container {
            Some(j) => dropped.push(DroppedExecution {
                leading_object: leaders[i],
                objects: members.clone(),
                contained_in: leaders[j],
            }),
            None => executions.push(ProcessExecution {
                exec_id: executions.len(),
                events: events_of(log, members),
                objects: members.clone(),
                leading_object: Some(leaders[i]),
            }),
        }
    }
    Ok(Extraction {
        executions,
        dropped,
    })
}

pub fn extract(
    log: &EventLog,
    graph: &ObjectGraph,
    strategy: &Strategy,
) -> Result<Extraction, ModelError> {
    match strategy {
        Strategy::Components => Ok(Extraction {
            executions: extract_components(log, graph),
            dropped: Vec::new(),
        }),
        Strategy::LeadingType(t) => extract_leading_type(log, graph, t),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionEdge {
    pub source: EventIdx,
    pub target: EventIdx,
    /// Objects whose traces contain `source` directly followed by `target`.
    pub objects: Vec<ObjectIdx>,
}

/// Directed event graph of one execution: an edge for each pair of events
/// that are consecutive in some member object's trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionGraph {
    nodes: Vec<EventIdx>,
    edges: Vec<ExecutionEdge>,
    incoming: Vec<Vec<(ObjectIdx, EventIdx)>>,
    outgoing: Vec<Vec<EventIdx>>,
}

impl ExecutionGraph {
    pub fn build(log: &EventLog, execution: &ProcessExecution) -> Self {
        let mut pairs: BTreeMap<(EventIdx, EventIdx), Vec<ObjectIdx>> = BTreeMap::new();
        for &o in &execution.objects {
            for w in log.trace(o).windows(2) {
                if w[0] != w[1] {
                    pairs.entry((w[0], w[1])).or_default().push(o);
                }
            }
        }
        let nodes = execution.events.clone();
        let mut incoming = vec![Vec::new(); nodes.len()];
        let mut outgoing = vec![Vec::new(); nodes.len()];
        let pos = |e: EventIdx| {
            nodes
                .binary_search(&e)
                .expect("trace events belong to the execution")
        };
        let edges: Vec<ExecutionEdge> = pairs
            .into_iter()
            .map(|((source, target), objects)| {
                for &o in &objects {
                    incoming[pos(target)].push((o, source));
                }
                outgoing[pos(source)].push(target);
                ExecutionEdge {
                    source,
                    target,
                    objects,
                }
            })
            .collect();
        for list in &mut incoming {
            list.sort_unstable();
        }
        ExecutionGraph {
            nodes,
            edges,
            incoming,
            outgoing,
        }
    }

    pub fn nodes(&self) -> &[EventIdx] {
        &self.nodes
    }

    /// Edges sorted by `(source, target)` in stable event order.
    pub fn edges(&self) -> &[ExecutionEdge] {
        &self.edges
    }

    pub fn position(&self, e: EventIdx) -> Option<usize> {
        self.nodes.binary_search(&e).ok()
    }

    /// `(object, previous event)` for every member object of `e` that has a
    /// prior event, ordered by object.
    pub fn predecessors(&self, e: EventIdx) -> Option<&[(ObjectIdx, EventIdx)]> {
        self.position(e).map(|i| self.incoming[i].as_slice())
    }

    pub fn successors(&self, e: EventIdx) -> Option<&[EventIdx]> {
        self.position(e).map(|i| self.outgoing[i].as_slice())
    }

    /// Distinct predecessor events of `e`, in stable order.
    pub fn predecessor_events(&self, e: EventIdx) -> Vec<EventIdx> {
        let mut out: Vec<EventIdx> = self
            .predecessors(e)
            .unwrap_or_default()
            .iter()
            .map(|&(_, p)| p)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Predecessors of the event named `event_id`, as `(object id, event id)`.
pub fn predecessors<'a>(
    log: &'a EventLog,
    graph: &ExecutionGraph,
    event_id: &str,
) -> Result<BTreeSet<(&'a str, &'a str)>, ModelError> {
    let e = log
        .event_by_id(event_id)
        .filter(|&e| graph.position(e).is_some())
        .ok_or_else(|| ModelError::UnknownEvent(event_id.to_owned()))?;
    Ok(graph
        .predecessors(e)
        .unwrap_or_default()
        .iter()
        .map(|&(o, p)| (log.object_id(o), log.event_id(p)))
        .collect())
}

/// Machine-readable summary of an extraction run.
#[derive(Debug, Clone, Serialize)]
pub struct ExtractionReport {
    pub schema_version: u32,
    pub strategy: String,
    pub lead_type: Option<String>,
    pub execution_count: usize,
    pub executions: Vec<ExecutionSummary>,
    pub dropped: Vec<DroppedSummary>,
    /// Events that appear in more than one execution.
    pub shared_events: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExecutionSummary {
    pub exec_id: usize,
    pub leading_object: Option<String>,
    pub object_count: usize,
    pub event_count: usize,
    pub objects: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DroppedSummary {
    pub leading_object: String,
    pub objects: Vec<String>,
    pub contained_in: String,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

impl ExtractionReport {
    pub fn new(log: &EventLog, strategy: &Strategy, extraction: &Extraction) -> Self {
        let ids = |objs: &[ObjectIdx]| objs.iter().map(|&o| log.object_id(o).to_owned()).collect();
        let (name, lead_type) = match strategy {
            Strategy::Components => ("components", None),
            Strategy::LeadingType(t) => ("leading", Some(t.clone())),
        };
        ExtractionReport {
            schema_version: REPORT_SCHEMA_VERSION,
            strategy: name.to_owned(),
            lead_type,
            execution_count: extraction.executions.len(),
            executions: extraction
                .executions
                .iter()
                .map(|p| ExecutionSummary {
                    exec_id: p.exec_id,
                    leading_object: p.leading_object.map(|o| log.object_id(o).to_owned()),
                    object_count: p.objects.len(),
                    event_count: p.events.len(),
                    objects: ids(&p.objects),
                })
                .collect(),
            dropped: extraction
                .dropped
                .iter()
                .map(|d| DroppedSummary {
                    leading_object: log.object_id(d.leading_object).to_owned(),
                    objects: ids(&d.objects),
                    contained_in: log.object_id(d.contained_in).to_owned(),
                })
                .collect(),
            shared_events: extraction
                .shared_events()
                .into_iter()
                .map(|(e, c)| (log.event_id(e).to_owned(), c))
                .collect(),
        }
    }
}
