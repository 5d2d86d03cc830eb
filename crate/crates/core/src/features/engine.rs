use std::collections::{BTreeSet, HashMap};

use crate::error::FeatureError;
use crate::executions::{ExecutionGraph, ProcessExecution};
use crate::features::spec::{Aggregation, FeatureSpec};
use crate::model::{AttributeValue, EventIdx, EventLog, ObjectIdx, Timestamp};

/// Log-wide indexes shared by all feature evaluations.
pub struct FeatureContext<'a> {
    log: &'a EventLog,
    /// Earliest completion per object with a nonempty trace, ascending.
    first_seen: Vec<Timestamp>,
    /// Per resource attribute: label -> ascending completion times.
    resources: HashMap<String, HashMap<String, Vec<Timestamp>>>,
}

impl<'a> FeatureContext<'a> {
    /// Prepares indexes for the given (expanded or not) features.
    pub fn new(log: &'a EventLog, specs: &[FeatureSpec]) -> Self {
        let mut first_seen: Vec<Timestamp> = log
            .object_indices()
            .filter_map(|o| {
                log.trace(o)
                    .iter()
                    .map(|&e| log.complete_time(e))
                    .min_by(f64::total_cmp)
            })
            .collect();
        first_seen.sort_by(f64::total_cmp);

        let mut resources = HashMap::new();
        for spec in specs {
            if let FeatureSpec::ResourceWorkload {
                resource_attribute, ..
            } = spec
            {
                resources
                    .entry(resource_attribute.clone())
                    .or_insert_with(|| resource_index(log, resource_attribute));
            }
        }
        FeatureContext {
            log,
            first_seen,
            resources,
        }
    }

    pub fn log(&self) -> &'a EventLog {
        self.log
    }

    /// Value of an event-local feature, without any execution.
    pub fn compute_event_local(
        &self,
        e: EventIdx,
        spec: &FeatureSpec,
    ) -> Result<Option<f64>, FeatureError> {
        use FeatureSpec::*;
        if spec.is_family() {
            return Err(FeatureError::UnexpandedFamily(spec.to_string()));
        }
        let log = self.log;
        let value = match spec {
            CurrentActivity(Some(a)) => indicator(log.activity(e) == a),
            Value { attribute } => numeric_attribute(log, e, attribute)?,
            ObjectCount => Some(log.event_objects(e).len() as f64),
            TypeCount(Some(t)) => Some(
                log.event_objects(e)
                    .iter()
                    .filter(|&&o| log.type_name_of(o) == Some(t.as_str()))
                    .count() as f64,
            ),
            ResourceIs {
                resource: Some(r),
                resource_attribute,
            } => log
                .attribute(e, resource_attribute)
                .map(|v| if v.label() == *r { 1.0 } else { 0.0 }),
            ServiceTime => Some(log.complete_time(e) - log.start_time(e)),
            _ => return Err(FeatureError::UnsupportedSpec(spec.to_string())),
        };
        Ok(value)
    }

    /// Value of `spec` for event `e` within `execution`.
    pub fn compute(
        &self,
        execution: &ProcessExecution,
        graph: &ExecutionGraph,
        e: EventIdx,
        spec: &FeatureSpec,
    ) -> Result<Option<f64>, FeatureError> {
        use FeatureSpec::*;
        let log = self.log;
        if !execution.contains_event(e) {
            return Err(FeatureError::NotInExecution {
                event: log.event_id(e).to_owned(),
                exec_id: execution.exec_id,
            });
        }
        if spec.is_family() {
            return Err(FeatureError::UnexpandedFamily(spec.to_string()));
        }
        if spec.is_event_local() {
            return self.compute_event_local(e, spec);
        }

        let ct = log.complete_time(e);
        let events = &execution.events;
        let ct_of = |x: EventIdx| log.complete_time(x);
        let lo = events.partition_point(|&x| ct_of(x) < ct);
        let hi = events.partition_point(|&x| ct_of(x) <= ct);
        let earlier = &events[..lo];
        let later = &events[hi..];
        let preds = graph.predecessors(e).unwrap_or_default();

        let value = match spec {
            CurrentActivities(Some(a)) => {
                let prefix = &events[..hi];
                let hit = prefix.iter().any(|&n| {
                    log.activity(n) == a
                        && graph
                            .successors(n)
                            .unwrap_or_default()
                            .iter()
                            .all(|&s| ct_of(s) > ct)
                });
                indicator(hit)
            }
            PrecedingActivity(Some(a)) => {
                indicator(preds.iter().any(|&(_, p)| log.activity(p) == a))
            }
            PreviousActivityCount(Some(a)) => {
                Some(earlier.iter().filter(|&&x| log.activity(x) == a).count() as f64)
            }
            FollowingActivityCount(Some(a)) => {
                Some(later.iter().filter(|&&x| log.activity(x) == a).count() as f64)
            }
            PreviousValue {
                attribute,
                aggregation,
            } => aggregate(log, earlier.iter().copied(), attribute, *aggregation)?,
            PrecedingValue {
                attribute,
                aggregation,
            } => aggregate(
                log,
                graph.predecessor_events(e).into_iter(),
                attribute,
                *aggregation,
            )?,
            ResourceWorkload {
                window,
                resource_attribute,
            } => match log.attribute(e, resource_attribute) {
                None => None,
                Some(v) => {
                    let times = self
                        .resources
                        .get(resource_attribute)
                        .and_then(|idx| idx.get(&v.label()));
                    match times {
                        Some(times) => Some(count_in_window(times, ct, *window) as f64 - 1.0),
                        // Index not prepared for this attribute: scan the log.
                        None => {
                            let label = v.label();
                            let times: Vec<Timestamp> = log
                                .event_indices()
                                .filter(|&x| {
                                    log.attribute(x, resource_attribute)
                                        .map(AttributeValue::label)
                                        == Some(label.clone())
                                })
                                .map(ct_of)
                                .collect();
                            Some(count_in_window(&times, ct, *window) as f64 - 1.0)
                        }
                    }
                }
            },
            SystemWorkload { window } => {
                let all = log.events();
                let start = all.partition_point(|x| x.complete_time < ct - window);
                let end = all.partition_point(|x| x.complete_time <= ct);
                Some((end - start) as f64 - 1.0)
            }
            ElapsedTime => Some(ct - ct_of(events[0])),
            RemainingTime => Some(ct_of(*events.last().expect("nonempty")) - ct),
            ExecutionDuration => Some(ct_of(*events.last().expect("nonempty")) - ct_of(events[0])),
            SynchronizationTime => Some(synchronization(log, preds)),
            PoolingTime(Some(t)) => {
                let typed: Vec<(ObjectIdx, EventIdx)> = preds
                    .iter()
                    .copied()
                    .filter(|&(o, _)| log.type_name_of(o) == Some(t.as_str()))
                    .collect();
                Some(synchronization(log, &typed))
            }
            LaggingTime(Some(t)) => {
                let all = preds.iter().map(|&(_, p)| ct_of(p)).min_by(f64::total_cmp);
                let typed = preds
                    .iter()
                    .filter(|&&(o, _)| log.type_name_of(o) == Some(t.as_str()))
                    .map(|&(_, p)| ct_of(p))
                    .min_by(f64::total_cmp);
                match (typed, all) {
                    (Some(typed), Some(all)) => Some(typed - all),
                    _ => Some(0.0),
                }
            }
            WaitingTime => Some(waiting(log, e, preds)),
            SojournTime => Some(waiting(log, e, preds) + service(log, e)),
            FlowTime => {
                Some(synchronization(log, preds) + waiting(log, e, preds) + service(log, e))
            }
            SystemObjectCount => Some(self.first_seen.partition_point(|&t| t <= ct) as f64),
            PreviousObjectCount => {
                Some(previous_objects(log, execution, earlier, None).len() as f64)
            }
            PreviousTypeCount(Some(t)) => {
                Some(previous_objects(log, execution, earlier, Some(t)).len() as f64)
            }
            _ => unreachable!("families and event-local features are handled above"),
        };
        Ok(value)
    }
}

fn resource_index(log: &EventLog, attribute: &str) -> HashMap<String, Vec<Timestamp>> {
    let mut index: HashMap<String, Vec<Timestamp>> = HashMap::new();
    // Events are visited in time order, so each list is ascending.
    for e in log.event_indices() {
        if let Some(v) = log.attribute(e, attribute) {
            index
                .entry(v.label())
                .or_default()
                .push(log.complete_time(e));
        }
    }
    index
}

/// Number of times in the closed interval `[at - window, at]`.
fn count_in_window(times: &[Timestamp], at: Timestamp, window: f64) -> usize {
    let start = times.partition_point(|&t| t < at - window);
    let end = times.partition_point(|&t| t <= at);
    end - start
}

fn indicator(b: bool) -> Option<f64> {
    Some(if b { 1.0 } else { 0.0 })
}

fn numeric_attribute(
    log: &EventLog,
    e: EventIdx,
    attribute: &str,
) -> Result<Option<f64>, FeatureError> {
    match log.attribute(e, attribute) {
        None => Ok(None),
        Some(AttributeValue::Number(n)) => Ok(Some(*n)),
        Some(AttributeValue::String(_)) => Err(FeatureError::TypeMismatch {
            event: log.event_id(e).to_owned(),
            attribute: attribute.to_owned(),
        }),
    }
}

fn aggregate(
    log: &EventLog,
    events: impl Iterator<Item = EventIdx>,
    attribute: &str,
    aggregation: Aggregation,
) -> Result<Option<f64>, FeatureError> {
    let mut values = Vec::new();
    for x in events {
        if let Some(v) = numeric_attribute(log, x, attribute)? {
            values.push(v);
        }
    }
    Ok(aggregation.apply(&values))
}

/// Spread of predecessor completion times; zero with fewer than two.
fn synchronization(log: &EventLog, preds: &[(ObjectIdx, EventIdx)]) -> f64 {
    if preds.len() < 2 {
        return 0.0;
    }
    let times = preds.iter().map(|&(_, p)| log.complete_time(p));
    let max = times.clone().fold(f64::NEG_INFINITY, f64::max);
    let min = times.fold(f64::INFINITY, f64::min);
    max - min
}

fn service(log: &EventLog, e: EventIdx) -> f64 {
    log.complete_time(e) - log.start_time(e)
}

/// Time between the last predecessor completing and the event starting,
/// clamped at zero.
fn waiting(log: &EventLog, e: EventIdx, preds: &[(ObjectIdx, EventIdx)]) -> f64 {
    preds
        .iter()
        .map(|&(_, p)| log.complete_time(p))
        .max_by(f64::total_cmp)
        .map_or(0.0, |last| (log.start_time(e) - last).max(0.0))
}

/// Execution objects touched by `earlier`, optionally of one type.
fn previous_objects(
    log: &EventLog,
    execution: &ProcessExecution,
    earlier: &[EventIdx],
    object_type: Option<&str>,
) -> BTreeSet<ObjectIdx> {
    earlier
        .iter()
        .flat_map(|&x| log.event_objects(x).iter().copied())
        .filter(|&o| execution.contains_object(o))
        .filter(|&o| object_type.is_none_or(|t| log.type_name_of(o) == Some(t)))
        .collect()
}
