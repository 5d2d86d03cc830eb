//! Test support: the running-example fixture, random logs, brute-force
//! oracles and a reference flattener. Nothing here calls the union-find,
//! BFS or leading-type code it is used to check.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use ocelf::model::{AttributeValue, Event, EventIdx, EventLog, EventLogBuilder, ObjectIdx};
use ocelf::{parse_ocel, ObjectGraph};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn order_items() -> EventLog {
    parse_ocel(fixture_path("order_items.jsonocel")).expect("fixture parses")
}

pub fn ev(log: &EventLog, id: &str) -> EventIdx {
    log.event_by_id(id)
        .unwrap_or_else(|| panic!("no event {id}"))
}

pub fn obj(log: &EventLog, id: &str) -> ObjectIdx {
    log.object_by_id(id)
        .unwrap_or_else(|| panic!("no object {id}"))
}

pub fn set<'a>(ids: &[&'a str]) -> BTreeSet<&'a str> {
    ids.iter().copied().collect()
}

pub const TYPES: [&str; 3] = ["item", "offer", "order"];
pub const ACTIVITIES: [&str; 4] = ["create", "check", "ship", "pay"];
pub const RESOURCES: [&str; 3] = ["r1", "r2", "r3"];

/// A random valid log with 1..=max_objects objects and 1..=max_events
/// events. Completion times sit on a coarse grid so ties are common; some
/// objects may have no events at all.
pub fn random_log(rng: &mut StdRng, max_objects: usize, max_events: usize) -> EventLog {
    let n_obj = rng.gen_range(1..=max_objects);
    let n_ev = rng.gen_range(1..=max_events);
    let mut b = EventLogBuilder::new();
    let mut objects = Vec::with_capacity(n_obj);
    for i in 0..n_obj {
        let t = TYPES[rng.gen_range(0..TYPES.len())];
        let id = format!("{t}{i}");
        b.object(id.clone(), t);
        objects.push(id);
    }
    for i in 0..n_ev {
        let ct = f64::from(rng.gen_range(0..30u32)) * 2.5;
        let st = ct - f64::from(rng.gen_range(0..4u32));
        b.event(
            format!("e{i}"),
            ACTIVITIES[rng.gen_range(0..ACTIVITIES.len())],
            ct,
        )
        .started(st);
        if rng.gen_bool(0.7) {
            b.attr(
                "amount",
                AttributeValue::Number(f64::from(rng.gen_range(1..100u32))),
            );
        }
        if rng.gen_bool(0.8) {
            b.attr(
                "resource",
                AttributeValue::String(RESOURCES[rng.gen_range(0..RESOURCES.len())].to_owned()),
            );
        }
        let k = match rng.gen_range(0..20) {
            0..=9 => 1,
            10..=16 => 2,
            _ => 3,
        }
        .min(n_obj);
        let chosen: Vec<String> = objects.choose_multiple(rng, k).cloned().collect();
        b.objects(chosen);
    }
    b.build().expect("random log builds")
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Symmetric adjacency matrix over objects from shared events.
pub fn adjacency_matrix(log: &EventLog) -> Vec<Vec<bool>> {
    let n = log.num_objects();
    let mut adj = vec![vec![false; n]; n];
    for e in log.event_indices() {
        for &a in log.event_objects(e) {
            for &b in log.event_objects(e) {
                if a != b {
                    adj[a.index()][b.index()] = true;
                }
            }
        }
    }
    adj
}

/// Components from the reflexive-transitive closure (Warshall).
pub fn closure_components(log: &EventLog) -> Vec<BTreeSet<usize>> {
    let n = log.num_objects();
    let mut reach = adjacency_matrix(log);
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut comps: Vec<BTreeSet<usize>> = Vec::new();
    for i in 0..n {
        let c: BTreeSet<usize> = (0..n).filter(|&j| reach[i][j]).collect();
        if !comps.contains(&c) {
            comps.push(c);
        }
    }
    comps.sort_by_key(|c| *c.iter().next().unwrap());
    comps
}

/// All-pairs shortest paths (Floyd-Warshall); `None` = unreachable.
pub fn all_pairs_distances(log: &EventLog) -> Vec<Vec<Option<u32>>> {
    let n = log.num_objects();
    let adj = adjacency_matrix(log);
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for j in 0..n {
            if adj[i][j] {
                d[i][j] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

fn induced_connected(adj: &[Vec<bool>], nodes: &BTreeSet<usize>) -> bool {
    let Some(&start) = nodes.iter().next() else {
        return false;
    };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in nodes {
            if adj[u][v] && seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen.len() == nodes.len()
}

fn subsets(n: usize) -> impl Iterator<Item = BTreeSet<usize>> {
    (1u32..(1 << n)).map(move |mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
}

fn maximal(candidates: Vec<BTreeSet<usize>>) -> Vec<BTreeSet<usize>> {
    candidates
        .iter()
        .filter(|c| !candidates.iter().any(|d| d != *c && c.is_subset(d)))
        .cloned()
        .collect()
}

/// Leading-type executions by enumerating every connected object subset:
/// for each leading object, the largest connected subset containing it in
/// which no member has a same-type object strictly closer to the leader
/// (distances in the leader's component). Then containment maximality.
pub fn brute_force_leading(log: &EventLog, lead_type: &str) -> Vec<BTreeSet<usize>> {
    let n = log.num_objects();
    assert!(n <= 12, "enumeration is exponential");
    let adj = adjacency_matrix(log);
    let dist = all_pairs_distances(log);
    let type_of = |i: usize| log.type_name_of(ObjectIdx(i as u32));
    let mut per_leader = Vec::new();
    for l in (0..n).filter(|&i| type_of(i) == Some(lead_type)) {
        let eligible = |o: usize| {
            let Some(d) = dist[l][o] else { return false };
            !(0..n).any(|x| type_of(x) == type_of(o) && dist[l][x].is_some_and(|dx| dx < d))
        };
        let candidates: Vec<BTreeSet<usize>> = subsets(n)
            .filter(|s| {
                s.contains(&l) && s.iter().all(|&o| eligible(o)) && induced_connected(&adj, s)
            })
            .collect();
        let best = maximal(candidates);
        assert_eq!(best.len(), 1, "unique maximal execution for leader {l}");
        per_leader.push(best.into_iter().next().unwrap());
    }
    let mut kept: Vec<BTreeSet<usize>> = Vec::new();
    for (i, s) in per_leader.iter().enumerate() {
        let contained = per_leader
            .iter()
            .enumerate()
            .any(|(j, t)| j != i && s.is_subset(t) && (t.len() > s.len() || j < i));
        if !contained {
            kept.push(s.clone());
        }
    }
    kept
}

/// The set-builder extraction read literally: every connected subgraph G'
/// holding some object o of the leading type such that no member has a
/// same-type member strictly closer to o within G', reduced to the maximal
/// ones.
pub fn literal_leading(log: &EventLog, lead_type: &str) -> Vec<BTreeSet<usize>> {
    let n = log.num_objects();
    assert!(n <= 12, "enumeration is exponential");
    let adj = adjacency_matrix(log);
    let type_of = |i: usize| log.type_name_of(ObjectIdx(i as u32));
    let dist_in = |s: &BTreeSet<usize>, from: usize| -> BTreeMap<usize, u32> {
        let mut d = BTreeMap::from([(from, 0u32)]);
        let mut frontier = vec![from];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for u in frontier {
                for &v in s {
                    if adj[u][v] && !d.contains_key(&v) {
                        d.insert(v, d[&u] + 1);
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        d
    };
    let lead_graphs: Vec<BTreeSet<usize>> = subsets(n)
        .filter(|s| induced_connected(&adj, s))
        .filter(|s| {
            s.iter().any(|&o| {
                type_of(o) == Some(lead_type) && {
                    let d = dist_in(s, o);
                    s.iter().all(|&o1| {
                        !s.iter()
                            .any(|&o2| o2 != o1 && type_of(o2) == type_of(o1) && d[&o1] > d[&o2])
                    })
                }
            })
        })
        .collect();
    let mut out = maximal(lead_graphs);
    out.sort();
    out
}

/// A single-object-per-case view of a log, used only to show how flattening
/// distorts features.
pub struct Flattened {
    pub log: EventLog,
}

impl Flattened {
    /// The copy of `event` inside the case named `case`.
    pub fn copy(&self, event: &str, case: &str) -> EventIdx {
        ev(&self.log, &format!("{event}@{case}"))
    }
}

fn flatten_cases(log: &EventLog, cases: Vec<(String, BTreeSet<ObjectIdx>)>) -> Flattened {
    let mut b = EventLogBuilder::new();
    for (name, members) in cases {
        b.object(name.clone(), "case");
        let mut events: BTreeSet<EventIdx> = BTreeSet::new();
        for &o in &members {
            events.extend(log.trace(o).iter().copied());
        }
        for e in events {
            let src = log.event(e);
            b.push_event(Event {
                id: format!("{}@{}", src.id, name),
                ..src.clone()
            });
            b.objects([name.clone()]);
        }
    }
    Flattened {
        log: b.build().expect("flattened log builds"),
    }
}

/// One case per object of `case_type`; events without such an object vanish
/// and events with several are duplicated.
pub fn flatten_by_type(log: &EventLog, case_type: &str) -> Flattened {
    let cases = log
        .object_indices()
        .filter(|&o| log.type_name_of(o) == Some(case_type))
        .map(|o| (log.object_id(o).to_owned(), BTreeSet::from([o])))
        .collect();
    flatten_cases(log, cases)
}

/// One case per group of co-appearing objects (a connected component); the
/// case is named by its member ids joined with `+`.
pub fn flatten_composite(log: &EventLog) -> Flattened {
    let graph = ObjectGraph::build(log);
    let cases = graph
        .connected_components()
        .into_iter()
        .map(|members| {
            let name = members
                .iter()
                .map(|&o| log.object_id(o))
                .collect::<Vec<_>>()
                .join("+");
            (name, members.into_iter().collect())
        })
        .collect();
    flatten_cases(log, cases)
}

pub mod checks;
pub mod flattening;
