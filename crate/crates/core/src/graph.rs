//! The undirected object interaction graph.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::{self, Write as _};
use std::sync::{Arc, OnceLock};

use crate::error::ModelError;
use crate::model::{EventLog, ObjectIdx};
use crate::union_find::UnionFind;

/// Shortest-path length in edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

const UNREACHED: u32 = u32::MAX;

/// Objects linked whenever they share an event. Nodes are every object of the
/// log, isolated ones included.
#[derive(Debug)]
pub struct ObjectGraph {
    adjacency: Vec<Vec<ObjectIdx>>,
    /// Per-source BFS results, filled on first query.
    bfs_cache: Vec<OnceLock<Arc<[u32]>>>,
}

impl ObjectGraph {
    pub fn build(log: &EventLog) -> Self {
        let n = log.num_objects();
        let mut adjacency: Vec<Vec<ObjectIdx>> = vec![Vec::new(); n];
        for e in log.event_indices() {
            let objs = log.event_objects(e);
            for (i, &a) in objs.iter().enumerate() {
                for &b in &objs[i + 1..] {
                    if a != b {
                        adjacency[a.index()].push(b);
                        adjacency[b.index()].push(a);
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_adjacency(adjacency)
    }

    /// Builds a graph from explicit undirected edges over `0..n`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (ObjectIdx, ObjectIdx)>) -> Self {
        let mut adjacency: Vec<Vec<ObjectIdx>> = vec![Vec::new(); n];
        for (a, b) in edges {
            if a != b {
                adjacency[a.index()].push(b);
                adjacency[b.index()].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_adjacency(adjacency)
    }

    fn from_adjacency(adjacency: Vec<Vec<ObjectIdx>>) -> Self {
        let bfs_cache = (0..adjacency.len()).map(|_| OnceLock::new()).collect();
        ObjectGraph {
            adjacency,
            bfs_cache,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, o: ObjectIdx) -> &[ObjectIdx] {
        &self.adjacency[o.index()]
    }

    pub fn has_edge(&self, a: ObjectIdx, b: ObjectIdx) -> bool {
        self.adjacency[a.index()].binary_search(&b).is_ok()
    }

    /// Edges as ordered pairs `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> Vec<(ObjectIdx, ObjectIdx)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (i, list) in self.adjacency.iter().enumerate() {
            let a = ObjectIdx(i as u32);
            out.extend(list.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    /// Maximal connected node sets, ordered by their smallest object.
    pub fn connected_components(&self) -> Vec<Vec<ObjectIdx>> {
        let mut uf = UnionFind::new(self.num_nodes());
        for (a, b) in self.edges() {
            uf.union(a.index(), b.index());
        }
        uf.groups()
            .into_iter()
            .map(|g| g.into_iter().map(|i| ObjectIdx(i as u32)).collect())
            .collect()
    }

    /// BFS distances from `source` to every node (`u32::MAX` = unreachable).
    fn bfs(&self, source: ObjectIdx) -> Arc<[u32]> {
        self.bfs_cache[source.index()]
            .get_or_init(|| {
                let mut dist = vec![UNREACHED; self.num_nodes()];
                let mut queue = VecDeque::new();
                dist[source.index()] = 0;
                queue.push_back(source);
                while let Some(u) = queue.pop_front() {
                    let next = dist[u.index()] + 1;
                    for &v in self.neighbors(u) {
                        if dist[v.index()] == UNREACHED {
                            dist[v.index()] = next;
                            queue.push_back(v);
                        }
                    }
                }
                dist.into()
            })
            .clone()
    }

    pub fn distance(&self, from: ObjectIdx, to: ObjectIdx) -> Distance {
        to_distance(self.bfs(from)[to.index()])
    }

    /// All distances from `source`, indexed by object.
    pub fn distances_from(&self, source: ObjectIdx) -> Vec<Distance> {
        self.bfs(source).iter().map(|&d| to_distance(d)).collect()
    }

    /// BFS distances from `source` restricted to `members` (sorted ascending,
    /// containing `source`), indexed by position in `members`. Not memoized.
    pub fn distances_within(&self, source: ObjectIdx, members: &[ObjectIdx]) -> Vec<Distance> {
        let pos = |o: ObjectIdx| members.binary_search(&o).ok();
        let mut dist = vec![UNREACHED; members.len()];
        let Some(start) = pos(source) else {
            return vec![Distance::Infinite; members.len()];
        };
        dist[start] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let next = dist[pos(u).expect("queued nodes are members")] + 1;
            for &v in self.neighbors(u) {
                if let Some(i) = pos(v) {
                    if dist[i] == UNREACHED {
                        dist[i] = next;
                        queue.push_back(v);
                    }
                }
            }
        }
        dist.into_iter().map(to_distance).collect()
    }

    /// Whether the given node set induces a connected subgraph.
    pub fn is_connected_subset(&self, nodes: &BTreeSet<ObjectIdx>) -> bool {
        let Some(&start) = nodes.iter().next() else {
            return false;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in self.neighbors(u) {
                if nodes.contains(&v) && seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen.len() == nodes.len()
    }

    /// Graphviz rendering with object ids as node names.
    pub fn to_dot(&self, log: &EventLog) -> String {
        let mut out = String::from("graph object_graph {\n");
        for o in log.object_indices() {
            let _ = writeln!(
                out,
                "  \"{}\" [label=\"{}\\n{}\"];",
                escape(log.object_id(o)),
                escape(log.object_id(o)),
                escape(log.type_name_of(o).unwrap_or("?"))
            );
        }
        for (a, b) in self.edges() {
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\";",
                escape(log.object_id(a)),
                escape(log.object_id(b))
            );
        }
        out.push_str("}\n");
        out
    }
}

fn to_distance(d: u32) -> Distance {
    if d == UNREACHED {
        Distance::Infinite
    } else {
        Distance::Finite(d)
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Distance between two objects named by id.
pub fn distance(
    log: &EventLog,
    graph: &ObjectGraph,
    from: &str,
    to: &str,
) -> Result<Distance, ModelError> {
    let a = log
        .object_by_id(from)
        .ok_or_else(|| ModelError::UnknownObject(from.to_owned()))?;
    let b = log
        .object_by_id(to)
        .ok_or_else(|| ModelError::UnknownObject(to.to_owned()))?;
    Ok(graph.distance(a, b))
}
