//! Feature selectors and their string grammar: `KEY` or `KEY[p1,p2,...]`.
//!
//! Keys are either the short catalog codes (`C1`..`C5`, `D1`..`D3`,
//! `R1`..`R3`, `P2`, `P3`, `P5`, `P7`, `P8`, `O1`..`O6`) or the long names
//! listed in [`FeatureSpec::from_str`]. Keys whose single parameter is an
//! activity, object type or resource may omit it, which selects the whole
//! family (one column per observed value).

use std::fmt;
use std::str::FromStr;

use crate::error::FeatureError;
use crate::model::EventLog;

pub const DEFAULT_WINDOW: f64 = 86_400.0;
pub const DEFAULT_RESOURCE_ATTRIBUTE: &str = "resource";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregation {
    Avg,
    Sum,
    Min,
    Max,
    Last,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Avg => "avg",
            Aggregation::Sum => "sum",
            Aggregation::Min => "min",
            Aggregation::Max => "max",
            Aggregation::Last => "last",
        }
    }

    /// Aggregates values given in stable event order.
    pub fn apply(self, values: &[f64]) -> Option<f64> {
        if values.is_empty() {
            return None;
        }
        Some(match self {
            Aggregation::Avg => values.iter().sum::<f64>() / values.len() as f64,
            Aggregation::Sum => values.iter().sum(),
            Aggregation::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregation::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Aggregation::Last => *values.last().expect("nonempty"),
        })
    }
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "avg" | "mean" => Ok(Aggregation::Avg),
            "sum" => Ok(Aggregation::Sum),
            "min" => Ok(Aggregation::Min),
            "max" => Ok(Aggregation::Max),
            "last" => Ok(Aggregation::Last),
            other => Err(format!("unknown aggregation `{other}`")),
        }
    }
}

/// One feature of the catalog. `Option` parameters set to `None` denote a
/// family that [`FeatureSpec::expand`] turns into concrete features.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSpec {
    /// C1: activity labels a sink of the execution graph cut at the event's time.
    CurrentActivities(Option<String>),
    /// C2: some graph predecessor carries the activity.
    PrecedingActivity(Option<String>),
    /// C3: execution events strictly earlier with the activity.
    PreviousActivityCount(Option<String>),
    /// C4: execution events strictly later with the activity.
    FollowingActivityCount(Option<String>),
    /// C5
    CurrentActivity(Option<String>),
    /// D1
    PreviousValue {
        attribute: String,
        aggregation: Aggregation,
    },
    /// D2
    PrecedingValue {
        attribute: String,
        aggregation: Aggregation,
    },
    /// D3
    Value {
        attribute: String,
    },
    /// R1
    ResourceWorkload {
        window: f64,
        resource_attribute: String,
    },
    /// R2
    SystemWorkload {
        window: f64,
    },
    /// R3
    ResourceIs {
        resource: Option<String>,
        resource_attribute: String,
    },
    /// P2
    ElapsedTime,
    /// P3
    RemainingTime,
    /// P5
    SynchronizationTime,
    /// P7
    PoolingTime(Option<String>),
    /// P8
    LaggingTime(Option<String>),
    ServiceTime,
    WaitingTime,
    SojournTime,
    FlowTime,
    ExecutionDuration,
    /// O1
    SystemObjectCount,
    /// O2
    PreviousObjectCount,
    /// O3
    PreviousTypeCount(Option<String>),
    /// O5
    ObjectCount,
    /// O6
    TypeCount(Option<String>),
}

impl FeatureSpec {
    pub fn is_family(&self) -> bool {
        use FeatureSpec::*;
        matches!(
            self,
            CurrentActivities(None)
                | PrecedingActivity(None)
                | PreviousActivityCount(None)
                | FollowingActivityCount(None)
                | CurrentActivity(None)
                | PoolingTime(None)
                | LaggingTime(None)
                | PreviousTypeCount(None)
                | TypeCount(None)
                | ResourceIs { resource: None, .. }
        )
    }

    /// Features that depend on the event alone, not on an execution.
    pub fn is_event_local(&self) -> bool {
        use FeatureSpec::*;
        matches!(
            self,
            CurrentActivity(_)
                | Value { .. }
                | ObjectCount
                | TypeCount(_)
                | ResourceIs { .. }
                | ServiceTime
        )
    }

    /// Concrete features for this selector; families expand over the log's
    /// observed activities, object types or resources, sorted.
    pub fn expand(&self, log: &EventLog) -> Vec<FeatureSpec> {
        use FeatureSpec::*;
        if !self.is_family() {
            return vec![self.clone()];
        }
        let activities = || log.activities();
        let types = || log.object_types().to_vec();
        match self {
            CurrentActivities(None) => activities()
                .into_iter()
                .map(|a| CurrentActivities(Some(a)))
                .collect(),
            PrecedingActivity(None) => activities()
                .into_iter()
                .map(|a| PrecedingActivity(Some(a)))
                .collect(),
            PreviousActivityCount(None) => activities()
                .into_iter()
                .map(|a| PreviousActivityCount(Some(a)))
                .collect(),
            FollowingActivityCount(None) => activities()
                .into_iter()
                .map(|a| FollowingActivityCount(Some(a)))
                .collect(),
            CurrentActivity(None) => activities()
                .into_iter()
                .map(|a| CurrentActivity(Some(a)))
                .collect(),
            PoolingTime(None) => types().into_iter().map(|t| PoolingTime(Some(t))).collect(),
            LaggingTime(None) => types().into_iter().map(|t| LaggingTime(Some(t))).collect(),
            PreviousTypeCount(None) => types()
                .into_iter()
                .map(|t| PreviousTypeCount(Some(t)))
                .collect(),
            TypeCount(None) => types().into_iter().map(|t| TypeCount(Some(t))).collect(),
            ResourceIs {
                resource: None,
                resource_attribute,
            } => log
                .attribute_labels(resource_attribute)
                .into_iter()
                .map(|r| ResourceIs {
                    resource: Some(r),
                    resource_attribute: resource_attribute.clone(),
                })
                .collect(),
            _ => unreachable!("is_family covers every family"),
        }
    }

    fn code(&self) -> &'static str {
        use FeatureSpec::*;
        match self {
            CurrentActivities(_) => "C1",
            PrecedingActivity(_) => "C2",
            PreviousActivityCount(_) => "C3",
            FollowingActivityCount(_) => "C4",
            CurrentActivity(_) => "C5",
            PreviousValue { .. } => "D1",
            PrecedingValue { .. } => "D2",
            Value { .. } => "D3",
            ResourceWorkload { .. } => "R1",
            SystemWorkload { .. } => "R2",
            ResourceIs { .. } => "R3",
            ElapsedTime => "P2",
            RemainingTime => "P3",
            SynchronizationTime => "P5",
            PoolingTime(_) => "P7",
            LaggingTime(_) => "P8",
            ServiceTime => "service_time",
            WaitingTime => "waiting_time",
            SojournTime => "sojourn_time",
            FlowTime => "flow_time",
            ExecutionDuration => "execution_duration",
            SystemObjectCount => "O1",
            PreviousObjectCount => "O2",
            PreviousTypeCount(_) => "O3",
            ObjectCount => "O5",
            TypeCount(_) => "O6",
        }
    }

    fn params(&self) -> Vec<String> {
        use FeatureSpec::*;
        let window = |w: f64| (w != DEFAULT_WINDOW).then(|| w.to_string());
        let resource_attr = |a: &str| (a != DEFAULT_RESOURCE_ATTRIBUTE).then(|| a.to_owned());
        match self {
            CurrentActivities(p)
            | PrecedingActivity(p)
            | PreviousActivityCount(p)
            | FollowingActivityCount(p)
            | CurrentActivity(p)
            | PoolingTime(p)
            | LaggingTime(p)
            | PreviousTypeCount(p)
            | TypeCount(p) => p.iter().cloned().collect(),
            PreviousValue {
                attribute,
                aggregation,
            }
            | PrecedingValue {
                attribute,
                aggregation,
            } => {
                vec![attribute.clone(), aggregation.as_str().to_owned()]
            }
            Value { attribute } => vec![attribute.clone()],
            ResourceWorkload {
                window: w,
                resource_attribute,
            } => match (window(*w), resource_attr(resource_attribute)) {
                (None, None) => vec![],
                (Some(w), None) => vec![w],
                (_, Some(a)) => vec![w.to_string(), a],
            },
            SystemWorkload { window: w } => window(*w).into_iter().collect(),
            ResourceIs {
                resource,
                resource_attribute,
            } => match (resource, resource_attr(resource_attribute)) {
                (Some(r), None) => vec![r.clone()],
                (Some(r), Some(a)) => vec![r.clone(), a],
                (None, None) => vec![],
                (None, Some(a)) => vec![String::new(), a],
            },
            _ => vec![],
        }
    }
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params();
        if params.is_empty() {
            f.write_str(self.code())
        } else {
            write!(f, "{}[{}]", self.code(), params.join(","))
        }
    }
}

fn syntax(spec: &str, reason: impl Into<String>) -> FeatureError {
    FeatureError::Syntax {
        spec: spec.to_owned(),
        reason: reason.into(),
    }
}

fn parse_window(spec: &str, text: &str) -> Result<f64, FeatureError> {
    let w: f64 = text
        .parse()
        .map_err(|_| syntax(spec, format!("window `{text}` is not a number")))?;
    if !(w.is_finite() && w >= 0.0) {
        return Err(syntax(
            spec,
            "window must be a non-negative number of seconds",
        ));
    }
    Ok(w)
}

impl FromStr for FeatureSpec {
    type Err = FeatureError;

    /// Accepted long names: `current_activities`, `preceding_activity`,
    /// `previous_activity_count`, `following_activity_count`,
    /// `current_activity`, `previous_value`, `preceding_value`, `value`,
    /// `resource_workload`, `system_workload`, `resource_is`, `elapsed_time`,
    /// `remaining_time`, `synchronization_time`, `pooling_time`,
    /// `lagging_time`, `service_time`, `waiting_time`, `sojourn_time`,
    /// `flow_time`, `execution_duration`, `system_object_count`,
    /// `previous_object_count`, `previous_type_count`, `object_count`,
    /// `type_count`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        use FeatureSpec::*;
        let spec = text.trim();
        let (key, body) = match spec.find('[') {
            Some(open) => {
                let Some(inner) = spec[open + 1..].strip_suffix(']') else {
                    return Err(syntax(spec, "missing closing `]`"));
                };
                (spec[..open].trim(), Some(inner))
            }
            None => (spec, None),
        };
        if key.is_empty() {
            return Err(syntax(spec, "empty feature key"));
        }
        // The whole bracket content is the single parameter.
        let single = || body.map(|b| b.trim().to_owned()).filter(|b| !b.is_empty());
        let list = || -> Vec<String> {
            body.map(|b| b.split(',').map(|p| p.trim().to_owned()).collect())
                .unwrap_or_default()
        };
        let no_params = |v: FeatureSpec| match body {
            Some(_) => Err(syntax(spec, format!("`{key}` takes no parameters"))),
            None => Ok(v),
        };
        let attribute_and_agg = || -> Result<(String, Aggregation), FeatureError> {
            let params = list();
            let attribute = params
                .first()
                .filter(|a| !a.is_empty())
                .cloned()
                .ok_or_else(|| syntax(spec, "an attribute name is required"))?;
            let aggregation = match params.get(1) {
                Some(a) => a.parse().map_err(|reason: String| syntax(spec, reason))?,
                None => Aggregation::Avg,
            };
            if params.len() > 2 {
                return Err(syntax(spec, "expected [attribute,aggregation]"));
            }
            Ok((attribute, aggregation))
        };

        match key {
            "C1" | "current_activities" => Ok(CurrentActivities(single())),
            "C2" | "preceding_activity" => Ok(PrecedingActivity(single())),
            "C3" | "previous_activity_count" => Ok(PreviousActivityCount(single())),
            "C4" | "following_activity_count" => Ok(FollowingActivityCount(single())),
            "C5" | "current_activity" => Ok(CurrentActivity(single())),
            "D1" | "previous_value" => {
                let (attribute, aggregation) = attribute_and_agg()?;
                Ok(PreviousValue { attribute, aggregation })
            }
            "D2" | "preceding_value" => {
                let (attribute, aggregation) = attribute_and_agg()?;
                Ok(PrecedingValue { attribute, aggregation })
            }
            "D3" | "value" => {
                let attribute = single().ok_or_else(|| syntax(spec, "an attribute name is required"))?;
                Ok(Value { attribute })
            }
            "R1" | "resource_workload" => {
                let params = list();
                if params.len() > 2 {
                    return Err(syntax(spec, "expected [window,resource_attribute]"));
                }
                let window = match params.first().filter(|w| !w.is_empty()) {
                    Some(w) => parse_window(spec, w)?,
                    None => DEFAULT_WINDOW,
                };
                let resource_attribute = params
                    .get(1)
                    .filter(|a| !a.is_empty())
                    .cloned()
                    .unwrap_or_else(|| DEFAULT_RESOURCE_ATTRIBUTE.to_owned());
                Ok(ResourceWorkload {
                    window,
                    resource_attribute,
                })
            }
            "R2" | "system_workload" => {
                let window = match single() {
                    Some(w) => parse_window(spec, &w)?,
                    None => DEFAULT_WINDOW,
                };
                Ok(SystemWorkload { window })
            }
            "R3" | "resource_is" => {
                let params = list();
                if params.len() > 2 {
                    return Err(syntax(spec, "expected [resource,resource_attribute]"));
                }
                Ok(ResourceIs {
                    resource: params.first().filter(|r| !r.is_empty()).cloned(),
                    resource_attribute: params
                        .get(1)
                        .filter(|a| !a.is_empty())
                        .cloned()
                        .unwrap_or_else(|| DEFAULT_RESOURCE_ATTRIBUTE.to_owned()),
                })
            }
            "P2" | "elapsed_time" => no_params(ElapsedTime),
            "P3" | "remaining_time" => no_params(RemainingTime),
            "P5" | "synchronization_time" => no_params(SynchronizationTime),
            "P7" | "pooling_time" => Ok(PoolingTime(single())),
            "P8" | "lagging_time" => Ok(LaggingTime(single())),
            "service_time" => no_params(ServiceTime),
            "waiting_time" => no_params(WaitingTime),
            "sojourn_time" => no_params(SojournTime),
            "flow_time" => no_params(FlowTime),
            "execution_duration" => no_params(ExecutionDuration),
            "O1" | "system_object_count" => no_params(SystemObjectCount),
            "O2" | "previous_object_count" => no_params(PreviousObjectCount),
            "O3" | "previous_type_count" => Ok(PreviousTypeCount(single())),
            "O4" | "event_objects" => Err(syntax(
                spec,
                "event objects are labels, not numbers; sequential and graph encodings always include them",
            )),
            "O5" | "object_count" => no_params(ObjectCount),
            "O6" | "type_count" => Ok(TypeCount(single())),
            other => Err(syntax(spec, format!("unknown feature key `{other}`"))),
        }
    }
}
