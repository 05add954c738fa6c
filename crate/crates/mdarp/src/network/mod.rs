//! Road network model.
//!
//! A network is an undirected, connected graph with positive arc lengths
//! (miles) and travel times (minutes). Node ids are the external ids from
//! the source file and survive centroid removal; all dense data structures
//! use internal indices `0..n` and map back through [`Network::node_id`].

mod layered;
mod native;
mod shortest;
pub mod synth;
mod tntp;

pub use layered::{expand_layers, LayeredArc, LayeredNetwork};
pub use native::{load_json, save_json};
pub use shortest::{all_pairs_shortest, ShortestPathTables};
pub use tntp::{load_node_coords, load_tntp, TntpOptions};

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// External node identifier (as written in network files).
pub type NodeId = u32;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("unrecognized network file extension for {0} (expected .tntp or .json)")]
    UnknownFormat(PathBuf),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("arc ({0}, {1}) references an unknown node")]
    UnknownNode(NodeId, NodeId),
    #[error("self-loop arc at node {0}")]
    SelfLoop(NodeId),
    #[error("arc ({0}, {1}) has a non-positive length or time")]
    NonPositiveWeight(NodeId, NodeId),
    #[error("arc ({0}, {1}) declared more than once")]
    DuplicateArc(NodeId, NodeId),
    #[error("arc ({0}, {1}) has different weights in its two directions")]
    AsymmetricArc(NodeId, NodeId),
    #[error("network is not connected ({0} components)")]
    Disconnected(usize),
    #[error("network has no nodes")]
    Empty,
    #[error("shortest-path reconstruction between {0} and {1} did not terminate")]
    PathReconstruction(NodeId, NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    /// Plane coordinates in miles; (0, 0) when the source has none.
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
}

/// Undirected arc; stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub a: NodeId,
    pub b: NodeId,
    /// Length in miles.
    pub distance: f64,
    /// Free-flow travel time in minutes.
    pub time: f64,
}

#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<Node>,
    arcs: Vec<Arc>,
    index: HashMap<NodeId, usize>,
    /// Adjacency per internal index, sorted by neighbor id:
    /// (neighbor index, distance, time).
    adj: Vec<Vec<(usize, f64, f64)>>,
}

impl Network {
    /// Builds and validates a network. Nodes are sorted by id; arcs are
    /// normalized to `a < b` and sorted. Fails on duplicate nodes or arcs,
    /// self-loops, unknown endpoints, non-positive weights, and
    /// disconnected graphs.
    pub fn new(mut nodes: Vec<Node>, arcs: Vec<Arc>) -> Result<Self, NetworkError> {
        if nodes.is_empty() {
            return Err(NetworkError::Empty);
        }
        nodes.sort_by_key(|n| n.id);
        for pair in nodes.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(NetworkError::DuplicateNode(pair[0].id));
            }
        }
        let index: HashMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();

        let mut norm: Vec<Arc> = Vec::with_capacity(arcs.len());
        for arc in arcs {
            if arc.a == arc.b {
                return Err(NetworkError::SelfLoop(arc.a));
            }
            if !index.contains_key(&arc.a) || !index.contains_key(&arc.b) {
                return Err(NetworkError::UnknownNode(arc.a, arc.b));
            }
            if !(arc.distance > 0.0 && arc.time > 0.0)
                || !arc.distance.is_finite()
                || !arc.time.is_finite()
            {
                return Err(NetworkError::NonPositiveWeight(arc.a, arc.b));
            }
            let (a, b) = if arc.a < arc.b {
                (arc.a, arc.b)
            } else {
                (arc.b, arc.a)
            };
            norm.push(Arc { a, b, ..arc });
        }
        norm.sort_by_key(|arc| (arc.a, arc.b));
        for pair in norm.windows(2) {
            if pair[0].a == pair[1].a && pair[0].b == pair[1].b {
                return Err(NetworkError::DuplicateArc(pair[0].a, pair[0].b));
            }
        }

        let mut adj = vec![Vec::new(); nodes.len()];
        for arc in &norm {
            let ia = index[&arc.a];
            let ib = index[&arc.b];
            adj[ia].push((ib, arc.distance, arc.time));
            adj[ib].push((ia, arc.distance, arc.time));
        }
        // Nodes are sorted by id, so sorting neighbors by index also sorts
        // them by external id; the canonical-path tie-break depends on it.
        for list in &mut adj {
            list.sort_by_key(|&(nb, _, _)| nb);
        }

        let net = Network {
            nodes,
            arcs: norm,
            index,
            adj,
        };
        let components = net.component_count();
        if components != 1 {
            return Err(NetworkError::Disconnected(components));
        }
        Ok(net)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn node_id(&self, idx: usize) -> NodeId {
        self.nodes[idx].id
    }

    pub fn node_index(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn neighbors(&self, idx: usize) -> &[(usize, f64, f64)] {
        &self.adj[idx]
    }

    /// Replaces coordinates for the listed nodes; unknown ids are ignored
    /// so a full TNTP node file can be applied after centroid removal.
    pub fn set_coords(&mut self, coords: &HashMap<NodeId, (f64, f64)>) {
        for node in &mut self.nodes {
            if let Some(&(x, y)) = coords.get(&node.id) {
                node.x = x;
                node.y = y;
            }
        }
    }

    fn component_count(&self) -> usize {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &(w, _, _) in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        components
    }
}

impl Serialize for Network {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Network", 2)?;
        st.serialize_field("nodes", &self.nodes)?;
        st.serialize_field("arcs", &self.arcs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Network {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            nodes: Vec<Node>,
            arcs: Vec<Arc>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Network::new(raw.nodes, raw.arcs).map_err(serde::de::Error::custom)
    }
}

/// Loads a network from `path`, picking the format from the extension:
/// `.tntp` (with centroid removal per the file's `<FIRST THRU NODE>`)
/// or `.json`.
pub fn load_network(path: &Path) -> Result<Network, NetworkError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("tntp") => {
            load_tntp(path, &TntpOptions::default())
        }
        Some(ext) if ext.eq_ignore_ascii_case("json") => load_json(path),
        _ => Err(NetworkError::UnknownFormat(path.to_path_buf())),
    }
}
