//! One flattening comparison per feature class: the same feature evaluated
//! object-centrically on the fixture and on a flattened copy of it.

use ocelf::model::EventLog;
use ocelf::{compute, extract_components, ExecutionGraph, FeatureSpec, ObjectGraph};

use super::{ev, flatten_by_type, flatten_composite, Flattened};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Impact {
    /// Flattening leaves the value intact.
    Unchanged,
    /// Flattening yields a different value.
    Distorted,
    /// The flattened log cannot express the feature: the value is constant
    /// over the whole flattened log while the object-centric one is not.
    Degenerate,
}

#[derive(Debug, Clone)]
pub struct Demonstration {
    pub class: &'static str,
    pub feature: String,
    pub event: &'static str,
    pub notion: &'static str,
    pub expected: Impact,
    pub object_centric: Option<f64>,
    pub flattened: Option<f64>,
    pub holds: bool,
}

impl std::fmt::Display for Demonstration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:<29} {:<14} at {:<3} ({:<9}) object-centric {:?}, flattened {:?}: {:?}{}",
            self.class,
            self.feature,
            self.event,
            self.notion,
            self.object_centric,
            self.flattened,
            self.expected,
            if self.holds { "" } else { " NOT SHOWN" }
        )
    }
}

fn value_in_components(log: &EventLog, event: &str, spec: &FeatureSpec) -> Option<f64> {
    let e = ev(log, event);
    let graph = ObjectGraph::build(log);
    let execs = extract_components(log, &graph);
    let p = execs
        .iter()
        .find(|p| p.contains_event(e))
        .expect("event has an execution");
    compute(log, p, &ExecutionGraph::build(log, p), e, spec).expect("feature computes")
}

fn flattened_values(flat: &Flattened, spec: &FeatureSpec) -> Vec<Option<f64>> {
    flat.log
        .event_indices()
        .map(|e| value_in_components(&flat.log, flat.log.event_id(e), spec))
        .collect()
}

fn flattened_notion(log: &EventLog, notion: &str) -> Flattened {
    match notion {
        "composite" => flatten_composite(log),
        t => flatten_by_type(log, t),
    }
}

/// `case` names the flattened case that holds the inspected copy.
fn demonstrate(
    log: &EventLog,
    class: &'static str,
    feature: &str,
    event: &'static str,
    notion: &'static str,
    case: &str,
    expected: Impact,
) -> Demonstration {
    let spec: FeatureSpec = feature.parse().expect("valid spec");
    let flat = flattened_notion(log, notion);
    let object_centric = value_in_components(log, event, &spec);
    let copy = flat.copy(event, case);
    let flattened = value_in_components(&flat.log, flat.log.event_id(copy), &spec);
    let holds = match expected {
        Impact::Unchanged => object_centric == flattened,
        Impact::Distorted => object_centric != flattened,
        Impact::Degenerate => {
            let all = flattened_values(&flat, &spec);
            object_centric != flattened && all.iter().all(|v| *v == all[0])
        }
    };
    Demonstration {
        class,
        feature: feature.to_owned(),
        event,
        notion,
        expected,
        object_centric,
        flattened,
        holds,
    }
}

/// Feature class, feature, event, case notion, inspected case, expectation.
const CASES: [(&str, &str, &str, &str, &str, Impact); 10] = [
    (
        "control flow, graph based",
        "C2[pick item]",
        "e4",
        "composite",
        "i1+i2+o1",
        Impact::Distorted,
    ),
    (
        "control flow, own activity",
        "C5[pick item]",
        "e3",
        "item",
        "i1",
        Impact::Unchanged,
    ),
    (
        "data flow, aggregated",
        "D1[amount,sum]",
        "e8",
        "item",
        "i1",
        Impact::Distorted,
    ),
    (
        "data flow, own value",
        "D3[amount]",
        "e5",
        "order",
        "o1",
        Impact::Unchanged,
    ),
    (
        "resource workload",
        "R1",
        "e10",
        "item",
        "i1",
        Impact::Distorted,
    ),
    (
        "resource identity",
        "R3[Bob]",
        "e4",
        "item",
        "i2",
        Impact::Unchanged,
    ),
    (
        "performance, execution span",
        "P3",
        "e5",
        "order",
        "o1",
        Impact::Distorted,
    ),
    (
        "performance, synchronization",
        "P5",
        "e8",
        "item",
        "i1",
        Impact::Degenerate,
    ),
    (
        "performance, event local",
        "service_time",
        "e3",
        "item",
        "i1",
        Impact::Unchanged,
    ),
    ("objects", "O5", "e1", "order", "o1", Impact::Degenerate),
];

/// Runs one comparison per feature class on the order/item fixture.
pub fn flattening_demonstrations(log: &EventLog) -> Vec<Demonstration> {
    CASES
        .iter()
        .map(|&(class, feature, event, notion, case, expected)| {
            demonstrate(log, class, feature, event, notion, case, expected)
        })
        .collect()
}

/// Whether the composite flattening orders the two independent picks: the
/// flattened execution graph has an edge from the copy of e3 to that of e4.
pub fn composite_orders_picks(log: &EventLog) -> bool {
    let flat = flatten_composite(log);
    let (a, b) = (flat.copy("e3", "i1+i2+o1"), flat.copy("e4", "i1+i2+o1"));
    let graph = ObjectGraph::build(&flat.log);
    extract_components(&flat.log, &graph).iter().any(|p| {
        ExecutionGraph::build(&flat.log, p)
            .edges()
            .iter()
            .any(|k| k.source == a && k.target == b)
    })
}
