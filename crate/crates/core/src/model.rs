//! The object-centric event log and its derived lookups.
//!
//! Events and objects are interned: an [`EventIdx`] is the position of an
//! event in the stable total order `(complete_time, event id)`, so comparing
//! two indices compares the events in time. An [`ObjectIdx`] is the position
//! of an object in lexicographic id order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::ModelError;

/// Seconds since the Unix epoch.
pub type Timestamp = f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventIdx(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectIdx(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeIdx(pub u32);

impl EventIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ObjectIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TypeIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An event attribute value. Numeric features only read `Number`.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeValue {
    Number(f64),
    String(String),
}

impl AttributeValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            AttributeValue::Number(n) => Some(*n),
            AttributeValue::String(_) => None,
        }
    }

    /// Label form used for grouping (resources, filters).
    pub fn label(&self) -> String {
        match self {
            AttributeValue::Number(n) => n.to_string(),
            AttributeValue::String(s) => s.clone(),
        }
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Number(n) => write!(f, "{n}"),
            AttributeValue::String(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub id: String,
    pub activity: String,
    pub complete_time: Timestamp,
    pub start_time: Timestamp,
    pub attributes: BTreeMap<String, AttributeValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Object {
    pub id: String,
    /// `None` only for objects referenced by a trace but never declared;
    /// [`validate`] reports them.
    pub object_type: Option<TypeIdx>,
}

/// Immutable object-centric event log.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    events: Vec<Event>,
    objects: Vec<Object>,
    object_types: Vec<String>,
    traces: Vec<Vec<EventIdx>>,
    event_objects: Vec<Vec<ObjectIdx>>,
    event_index: HashMap<String, EventIdx>,
    object_index: HashMap<String, ObjectIdx>,
}

impl EventLog {
    pub fn empty() -> Self {
        EventLogBuilder::new()
            .build()
            .expect("empty log always builds")
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    /// Events in stable total order.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event_indices(&self) -> impl ExactSizeIterator<Item = EventIdx> {
        (0..self.events.len() as u32).map(EventIdx)
    }

    pub fn object_indices(&self) -> impl ExactSizeIterator<Item = ObjectIdx> {
        (0..self.objects.len() as u32).map(ObjectIdx)
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    /// Sorted object type names.
    pub fn object_types(&self) -> &[String] {
        &self.object_types
    }

    pub fn event(&self, e: EventIdx) -> &Event {
        &self.events[e.index()]
    }

    pub fn object(&self, o: ObjectIdx) -> &Object {
        &self.objects[o.index()]
    }

    pub fn event_id(&self, e: EventIdx) -> &str {
        &self.events[e.index()].id
    }

    pub fn object_id(&self, o: ObjectIdx) -> &str {
        &self.objects[o.index()].id
    }

    pub fn type_name(&self, t: TypeIdx) -> &str {
        &self.object_types[t.index()]
    }

    pub fn type_of(&self, o: ObjectIdx) -> Option<TypeIdx> {
        self.objects[o.index()].object_type
    }

    pub fn type_name_of(&self, o: ObjectIdx) -> Option<&str> {
        self.type_of(o).map(|t| self.type_name(t))
    }

    pub fn complete_time(&self, e: EventIdx) -> Timestamp {
        self.events[e.index()].complete_time
    }

    pub fn start_time(&self, e: EventIdx) -> Timestamp {
        self.events[e.index()].start_time
    }

    pub fn activity(&self, e: EventIdx) -> &str {
        &self.events[e.index()].activity
    }

    pub fn attribute(&self, e: EventIdx, name: &str) -> Option<&AttributeValue> {
        self.events[e.index()].attributes.get(name)
    }

    pub fn trace(&self, o: ObjectIdx) -> &[EventIdx] {
        &self.traces[o.index()]
    }

    /// The objects whose trace contains `e`, in object order.
    pub fn event_objects(&self, e: EventIdx) -> &[ObjectIdx] {
        &self.event_objects[e.index()]
    }

    pub fn event_by_id(&self, id: &str) -> Option<EventIdx> {
        self.event_index.get(id).copied()
    }

    pub fn object_by_id(&self, id: &str) -> Option<ObjectIdx> {
        self.object_index.get(id).copied()
    }

    pub fn type_by_name(&self, name: &str) -> Option<TypeIdx> {
        self.object_types
            .binary_search_by(|t| t.as_str().cmp(name))
            .ok()
            .map(|i| TypeIdx(i as u32))
    }

    /// Sorted distinct activity names.
    pub fn activities(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.events.iter().map(|e| e.activity.as_str()).collect();
        set.into_iter().map(str::to_owned).collect()
    }

    /// Sorted distinct attribute names over all events.
    pub fn attribute_names(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .events
            .iter()
            .flat_map(|e| e.attributes.keys().map(String::as_str))
            .collect();
        set.into_iter().map(str::to_owned).collect()
    }

    /// Sorted distinct labels of one attribute over all events.
    pub fn attribute_labels(&self, name: &str) -> Vec<String> {
        let set: BTreeSet<String> = self
            .events
            .iter()
            .filter_map(|e| e.attributes.get(name).map(AttributeValue::label))
            .collect();
        set.into_iter().collect()
    }

    /// The view of one event: its objects, grouped by type.
    pub fn view(&self, e: EventIdx) -> EventView<'_> {
        let mut by_type: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for &o in self.event_objects(e) {
            if let Some(t) = self.type_name_of(o) {
                by_type.entry(t).or_default().insert(self.object_id(o));
            }
        }
        EventView {
            id: self.event_id(e),
            objects: self
                .event_objects(e)
                .iter()
                .map(|&o| self.object_id(o))
                .collect(),
            objects_of_type: by_type,
        }
    }

    /// Minimum complete time over all events.
    pub fn min_complete_time(&self) -> Option<Timestamp> {
        self.events.first().map(|e| e.complete_time)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventView<'a> {
    pub id: &'a str,
    pub objects: BTreeSet<&'a str>,
    pub objects_of_type: BTreeMap<&'a str, BTreeSet<&'a str>>,
}

/// The objects whose trace contains the event `event_id`.
pub fn objects_of<'a>(log: &'a EventLog, event_id: &str) -> Result<BTreeSet<&'a str>, ModelError> {
    let e = log
        .event_by_id(event_id)
        .ok_or_else(|| ModelError::UnknownEvent(event_id.to_owned()))?;
    Ok(log
        .event_objects(e)
        .iter()
        .map(|&o| log.object_id(o))
        .collect())
}

/// Assembles an [`EventLog`] from declared events, objects and trace links.
#[derive(Debug, Default, Clone)]
pub struct EventLogBuilder {
    events: Vec<Event>,
    objects: BTreeMap<String, String>,
    links: BTreeMap<String, Vec<String>>,
}

impl EventLogBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(&mut self, id: impl Into<String>, object_type: impl Into<String>) -> &mut Self {
        self.objects.insert(id.into(), object_type.into());
        self
    }

    /// Adds an event whose start time equals its complete time.
    pub fn event(
        &mut self,
        id: impl Into<String>,
        activity: impl Into<String>,
        complete_time: Timestamp,
    ) -> &mut Self {
        self.events.push(Event {
            id: id.into(),
            activity: activity.into(),
            complete_time,
            start_time: complete_time,
            attributes: BTreeMap::new(),
        });
        self
    }

    pub fn push_event(&mut self, event: Event) -> &mut Self {
        self.events.push(event);
        self
    }

    /// Sets the start time of the most recently added event.
    pub fn started(&mut self, start_time: Timestamp) -> &mut Self {
        if let Some(e) = self.events.last_mut() {
            e.start_time = start_time;
        }
        self
    }

    /// Sets an attribute on the most recently added event.
    pub fn attr(&mut self, name: impl Into<String>, value: AttributeValue) -> &mut Self {
        if let Some(e) = self.events.last_mut() {
            e.attributes.insert(name.into(), value);
        }
        self
    }

    /// Appends `event_id` to the trace of `object_id`.
    pub fn link(&mut self, event_id: impl Into<String>, object_id: impl Into<String>) -> &mut Self {
        self.links
            .entry(object_id.into())
            .or_default()
            .push(event_id.into());
        self
    }

    /// Links the most recently added event to every listed object.
    pub fn objects<I, S>(&mut self, object_ids: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let Some(id) = self.events.last().map(|e| e.id.clone()) else {
            return self;
        };
        for o in object_ids {
            self.link(id.clone(), o);
        }
        self
    }

    /// Builds the log, sorting every trace into the stable total order.
    pub fn build(&self) -> Result<EventLog, ModelError> {
        self.assemble(true)
    }

    /// Builds the log keeping each trace in insertion order; [`validate`]
    /// reports any trace that ends up unsorted.
    pub fn build_preserving_order(&self) -> Result<EventLog, ModelError> {
        self.assemble(false)
    }

    fn assemble(&self, sort_traces: bool) -> Result<EventLog, ModelError> {
        let mut events = self.events.clone();
        events.sort_by(|a, b| {
            a.complete_time
                .total_cmp(&b.complete_time)
                .then_with(|| a.id.cmp(&b.id))
        });
        let mut event_index = HashMap::with_capacity(events.len());
        for (i, e) in events.iter().enumerate() {
            if !e.complete_time.is_finite() || !e.start_time.is_finite() {
                return Err(ModelError::NonFiniteTime(e.id.clone()));
            }
            if event_index
                .insert(e.id.clone(), EventIdx(i as u32))
                .is_some()
            {
                return Err(ModelError::DuplicateEvent(e.id.clone()));
            }
        }

        let types: BTreeSet<&str> = self.objects.values().map(String::as_str).collect();
        let object_types: Vec<String> = types.into_iter().map(str::to_owned).collect();

        // Declared objects plus any object only mentioned by a trace.
        let mut ids: BTreeSet<&str> = self.objects.keys().map(String::as_str).collect();
        ids.extend(self.links.keys().map(String::as_str));
        let mut objects = Vec::with_capacity(ids.len());
        let mut object_index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.into_iter().enumerate() {
            let object_type = self.objects.get(id).map(|t| {
                let pos = object_types.binary_search(t).expect("type registered");
                TypeIdx(pos as u32)
            });
            object_index.insert(id.to_owned(), ObjectIdx(i as u32));
            objects.push(Object {
                id: id.to_owned(),
                object_type,
            });
        }

        let mut traces = vec![Vec::new(); objects.len()];
        let mut event_objects = vec![Vec::new(); events.len()];
        for (oid, evs) in &self.links {
            let o = object_index[oid.as_str()];
            let trace = &mut traces[o.index()];
            for eid in evs {
                let e = *event_index
                    .get(eid.as_str())
                    .ok_or_else(|| ModelError::UnknownEvent(eid.clone()))?;
                trace.push(e);
            }
            if sort_traces {
                trace.sort_unstable();
                trace.dedup();
            }
            let mut seen = BTreeSet::new();
            for &e in trace.iter() {
                if seen.insert(e) {
                    event_objects[e.index()].push(o);
                }
            }
        }
        // Objects were visited in id order, so each list is already sorted.

        Ok(EventLog {
            events,
            objects,
            object_types,
            traces,
            event_objects,
            event_index,
            object_index,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    StartAfterComplete,
    UnsortedTrace,
    OrphanEvent,
    DanglingObject,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::StartAfterComplete => "start_after_complete",
            ViolationKind::UnsortedTrace => "unsorted_trace",
            ViolationKind::OrphanEvent => "orphan_event",
            ViolationKind::DanglingObject => "dangling_object",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Id of the offending event or object.
    pub subject: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return writeln!(f, "log is clean");
        }
        writeln!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {} {}: {}", v.kind.as_str(), v.subject, v.detail)?;
        }
        Ok(())
    }
}

/// Checks the structural invariants of an event log.
pub fn validate(log: &EventLog) -> ValidationReport {
    let mut violations = Vec::new();
    for e in log.event_indices() {
        let ev = log.event(e);
        if ev.start_time > ev.complete_time {
            violations.push(Violation {
                kind: ViolationKind::StartAfterComplete,
                subject: ev.id.clone(),
                detail: format!("start {} > complete {}", ev.start_time, ev.complete_time),
            });
        }
    }
    for o in log.object_indices() {
        let trace = log.trace(o);
        if let Some(w) = trace
            .windows(2)
            .find(|w| log.complete_time(w[0]) > log.complete_time(w[1]))
        {
            violations.push(Violation {
                kind: ViolationKind::UnsortedTrace,
                subject: log.object_id(o).to_owned(),
                detail: format!(
                    "{} completes after its successor {}",
                    log.event_id(w[0]),
                    log.event_id(w[1])
                ),
            });
        }
        if log.type_of(o).is_none() {
            violations.push(Violation {
                kind: ViolationKind::DanglingObject,
                subject: log.object_id(o).to_owned(),
                detail: "referenced by a trace but not declared with a type".to_owned(),
            });
        }
    }
    for e in log.event_indices() {
        if log.event_objects(e).is_empty() {
            violations.push(Violation {
                kind: ViolationKind::OrphanEvent,
                subject: log.event_id(e).to_owned(),
                detail: "event belongs to no object trace".to_owned(),
            });
        }
    }
    ValidationReport { violations }
}
