//! OCEL 1.0 JSON reading and writing.
//!
//! Only event-scoped attributes are kept; object attribute maps (`ocel:ovmap`)
//! are accepted on input and written back empty. A string-valued
//! `start_timestamp` entry in an event's `ocel:vmap` becomes the event start
//! time; without it the start time equals the completion time.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::OcelError;
use crate::model::{AttributeValue, Event, EventLog, EventLogBuilder, Timestamp};

/// The vmap key holding an event's start time.
pub const START_TIMESTAMP_KEY: &str = "start_timestamp";

#[derive(Debug, Deserialize)]
struct InputDocument {
    #[serde(rename = "ocel:events", default)]
    events: BTreeMap<String, InputEvent>,
    #[serde(rename = "ocel:objects", default)]
    objects: BTreeMap<String, InputObject>,
}

#[derive(Debug, Deserialize)]
struct InputEvent {
    #[serde(rename = "ocel:activity")]
    activity: String,
    #[serde(rename = "ocel:timestamp")]
    timestamp: String,
    #[serde(rename = "ocel:omap", default)]
    omap: Vec<String>,
    #[serde(rename = "ocel:vmap", default)]
    vmap: BTreeMap<String, Value>,
}

#[derive(Debug, Deserialize)]
struct InputObject {
    #[serde(rename = "ocel:type")]
    object_type: String,
}

// Fields are declared alphabetically; serialized keys follow field order.

#[derive(Debug, Serialize)]
struct OutputDocument<'a> {
    #[serde(rename = "ocel:events")]
    events: BTreeMap<&'a str, OutputEvent<'a>>,
    #[serde(rename = "ocel:global-log")]
    global_log: GlobalLog,
    #[serde(rename = "ocel:objects")]
    objects: BTreeMap<&'a str, OutputObject<'a>>,
}

#[derive(Debug, Serialize)]
struct GlobalLog {
    #[serde(rename = "ocel:attribute-names")]
    attribute_names: Vec<String>,
    #[serde(rename = "ocel:object-types")]
    object_types: Vec<String>,
    #[serde(rename = "ocel:ordering")]
    ordering: &'static str,
    #[serde(rename = "ocel:version")]
    version: &'static str,
}

#[derive(Debug, Serialize)]
struct OutputEvent<'a> {
    #[serde(rename = "ocel:activity")]
    activity: &'a str,
    #[serde(rename = "ocel:omap")]
    omap: Vec<&'a str>,
    #[serde(rename = "ocel:timestamp")]
    timestamp: String,
    #[serde(rename = "ocel:vmap")]
    vmap: BTreeMap<&'a str, Value>,
}

#[derive(Debug, Serialize)]
struct OutputObject<'a> {
    #[serde(rename = "ocel:ovmap")]
    ovmap: BTreeMap<&'a str, Value>,
    #[serde(rename = "ocel:type")]
    object_type: &'a str,
}

/// Parses an ISO-8601 timestamp into seconds since the epoch.
///
/// Offsets are honoured; timestamps without an offset are read as UTC.
pub fn parse_timestamp(text: &str) -> Option<Timestamp> {
    let parsed = DateTime::parse_from_rfc3339(text)
        .map(|dt| dt.with_timezone(&Utc))
        .or_else(|_| {
            DateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S%.f%z")
                .map(|dt| dt.with_timezone(&Utc))
        })
        .or_else(|_| {
            DateTime::parse_from_str(text, "%Y-%m-%d %H:%M:%S%.f%:z")
                .map(|dt| dt.with_timezone(&Utc))
        })
        .ok()
        .or_else(|| {
            ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"]
                .iter()
                .find_map(|fmt| NaiveDateTime::parse_from_str(text, fmt).ok())
                .map(|naive| naive.and_utc())
        })?;
    let secs = parsed.timestamp();
    let nanos = parsed.timestamp_subsec_nanos();
    if nanos % 1_000_000 == 0 {
        // Inverse of the arithmetic in `format_timestamp`.
        Some((secs * 1000 + i64::from(nanos / 1_000_000)) as f64 / 1000.0)
    } else {
        Some(secs as f64 + f64::from(nanos) / 1e9)
    }
}

/// Formats seconds since the epoch as ISO-8601 UTC with milliseconds.
pub fn format_timestamp(t: Timestamp) -> String {
    let millis = (t * 1000.0).round() as i64;
    DateTime::<Utc>::from_timestamp_millis(millis)
        .map(|dt| dt.to_rfc3339_opts(SecondsFormat::Millis, true))
        .unwrap_or_else(|| t.to_string())
}

pub fn parse_ocel(path: impl AsRef<Path>) -> Result<EventLog, OcelError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| OcelError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ocel_str(&text)
}

pub fn parse_ocel_str(text: &str) -> Result<EventLog, OcelError> {
    let doc: InputDocument = serde_json::from_str(text).map_err(|err| {
        if err.is_data() {
            OcelError::schema("document", err.to_string())
        } else {
            OcelError::Parse {
                line: err.line(),
                column: err.column(),
                message: err.to_string(),
            }
        }
    })?;

    let mut builder = EventLogBuilder::new();
    for (id, obj) in &doc.objects {
        builder.object(id.clone(), obj.object_type.clone());
    }
    for (id, raw) in doc.events {
        let complete_time = parse_timestamp(&raw.timestamp).ok_or_else(|| {
            OcelError::schema(&id, format!("unparseable timestamp `{}`", raw.timestamp))
        })?;
        let mut start_time = complete_time;
        let mut attributes = BTreeMap::new();
        for (name, value) in raw.vmap {
            if name == START_TIMESTAMP_KEY {
                if let Some(st) = value.as_str().and_then(parse_timestamp) {
                    start_time = st;
                    continue;
                }
            }
            match value {
                Value::Null => {}
                Value::Number(n) => {
                    let n = n.as_f64().ok_or_else(|| {
                        OcelError::schema(&id, format!("attribute `{name}` is not a finite number"))
                    })?;
                    attributes.insert(name, AttributeValue::Number(n));
                }
                Value::String(s) => {
                    attributes.insert(name, AttributeValue::String(s));
                }
                Value::Bool(b) => {
                    attributes.insert(name, AttributeValue::String(b.to_string()));
                }
                Value::Array(_) | Value::Object(_) => {
                    return Err(OcelError::schema(
                        &id,
                        format!("attribute `{name}` has a nested value"),
                    ));
                }
            }
        }
        for oid in &raw.omap {
            if !doc.objects.contains_key(oid) {
                return Err(OcelError::schema(
                    oid.clone(),
                    format!("object referenced by event `{id}` is not declared"),
                ));
            }
        }
        builder.push_event(Event {
            id: id.clone(),
            activity: raw.activity,
            complete_time,
            start_time,
            attributes,
        });
        builder.objects(raw.omap);
    }
    Ok(builder.build()?)
}

/// Serializes a log to canonical OCEL JSON with sorted keys.
pub fn to_ocel_string(log: &EventLog) -> Result<String, OcelError> {
    let mut events = BTreeMap::new();
    for e in log.event_indices() {
        let ev = log.event(e);
        let mut vmap: BTreeMap<&str, Value> = ev
            .attributes
            .iter()
            .map(|(k, v)| {
                let value = match v {
                    AttributeValue::Number(n) => Value::from(*n),
                    AttributeValue::String(s) => Value::from(s.as_str()),
                };
                (k.as_str(), value)
            })
            .collect();
        if ev.start_time != ev.complete_time {
            vmap.insert(
                START_TIMESTAMP_KEY,
                Value::from(format_timestamp(ev.start_time)),
            );
        }
        let mut omap: Vec<&str> = log
            .event_objects(e)
            .iter()
            .map(|&o| log.object_id(o))
            .collect();
        omap.sort_unstable();
        events.insert(
            ev.id.as_str(),
            OutputEvent {
                activity: &ev.activity,
                omap,
                timestamp: format_timestamp(ev.complete_time),
                vmap,
            },
        );
    }
    let mut objects = BTreeMap::new();
    for o in log.object_indices() {
        let object_type = log
            .type_name_of(o)
            .ok_or_else(|| OcelError::schema(log.object_id(o), "object has no type"))?;
        objects.insert(
            log.object_id(o),
            OutputObject {
                ovmap: BTreeMap::new(),
                object_type,
            },
        );
    }
    let doc = OutputDocument {
        events,
        global_log: GlobalLog {
            attribute_names: log.attribute_names(),
            object_types: log.object_types().to_vec(),
            ordering: "timestamp",
            version: "1.0",
        },
        objects,
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|err| OcelError::schema("document", err.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn write_ocel(log: &EventLog, path: impl AsRef<Path>) -> Result<(), OcelError> {
    let path = path.as_ref();
    let text = to_ocel_string(log)?;
    let io_err = |source| OcelError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = fs::File::create(path).map_err(io_err)?;
    file.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(())
}
