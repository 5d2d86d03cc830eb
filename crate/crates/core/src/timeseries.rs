//! Fixed-window aggregation of event-local features over the whole log.

use std::io::Write;
use std::str::FromStr;

use crate::encoders::format_value;
use crate::error::{EncodeError, FeatureError};
use crate::features::{FeatureContext, FeatureSpec};
use crate::model::{EventLog, Timestamp};
use crate::ocel::format_timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesAggregation {
    Avg,
    Sum,
    /// Events in the window whose value is present and nonzero.
    Count,
}

impl FromStr for SeriesAggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "avg" => Ok(SeriesAggregation::Avg),
            "sum" => Ok(SeriesAggregation::Sum),
            "count" => Ok(SeriesAggregation::Count),
            other => Err(format!(
                "unknown aggregation `{other}` (expected avg, sum or count)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub window_start: Timestamp,
    /// `None` when the window holds no events (or no defined values).
    pub value: Option<f64>,
}

/// Splits the log into windows `[start + k*window, start + (k+1)*window)`
/// aligned to the earliest completion and aggregates `spec` per window.
pub fn sublog_timeseries(
    log: &EventLog,
    window: f64,
    spec: &FeatureSpec,
    aggregation: SeriesAggregation,
) -> Result<Vec<SeriesPoint>, FeatureError> {
    if !(window.is_finite() && window > 0.0) {
        return Err(FeatureError::Syntax {
            spec: window.to_string(),
            reason: "window must be a positive number of seconds".to_owned(),
        });
    }
    if !spec.is_event_local() {
        return Err(FeatureError::UnsupportedSpec(spec.to_string()));
    }
    if spec.is_family() {
        return Err(FeatureError::UnexpandedFamily(spec.to_string()));
    }
    let (Some(first), Some(last)) = (log.events().first(), log.events().last()) else {
        return Ok(Vec::new());
    };
    let start = first.complete_time;
    let n_windows = ((last.complete_time - start) / window).floor() as usize + 1;
    let ctx = FeatureContext::new(log, std::slice::from_ref(spec));

    let mut buckets: Vec<(usize, Vec<f64>)> = vec![(0, Vec::new()); n_windows];
    for e in log.event_indices() {
        let k = (((log.complete_time(e) - start) / window).floor() as usize).min(n_windows - 1);
        buckets[k].0 += 1;
        if let Some(v) = ctx.compute_event_local(e, spec)? {
            buckets[k].1.push(v);
        }
    }
    Ok(buckets
        .into_iter()
        .enumerate()
        .map(|(k, (events, values))| {
            let value = if events == 0 || values.is_empty() {
                None
            } else {
                Some(match aggregation {
                    SeriesAggregation::Avg => values.iter().sum::<f64>() / values.len() as f64,
                    SeriesAggregation::Sum => values.iter().sum(),
                    SeriesAggregation::Count => values.iter().filter(|&&v| v != 0.0).count() as f64,
                })
            };
            SeriesPoint {
                window_start: start + k as f64 * window,
                value,
            }
        })
        .collect())
}

/// Two-column CSV: ISO-8601 window start, value (empty when missing).
pub fn write_timeseries_csv<W: Write>(points: &[SeriesPoint], out: W) -> Result<(), EncodeError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(["window_start", "value"])?;
    for p in points {
        writer.write_record([
            format_timestamp(p.window_start),
            p.value.map(format_value).unwrap_or_default(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
