//! All-pairs shortest paths with one canonical path per node pair.
//!
//! Distances come from a Dijkstra run per source and are symmetrized
//! exactly (`min` of the two orientations), so `D[i][j] == D[j][i]`
//! bitwise. One canonical shortest path per ordered pair is encoded in a
//! next-hop matrix built with a fixed tie-break (smallest next-node id),
//! which route expansion and platoon-path matching rely on: the canonical
//! walk from any node on the path to the same target follows the same
//! suffix. Times are the travel times summed along the canonical
//! *distance*-shortest path, so distance and time always describe the
//! same physical path; `T` is not an independent time-minimal matrix.

use super::{Network, NetworkError, NodeId};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
pub struct ShortestPathTables {
    n: usize,
    node_ids: Vec<NodeId>,
    dist: Vec<f64>,
    time: Vec<f64>,
    next: Vec<u32>,
    /// Direct-arc weight matrices, `INFINITY` where no arc exists.
    arc_dist: Vec<f64>,
    arc_time: Vec<f64>,
}

struct HeapEntry {
    d: f64,
    v: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.v == other.v
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap; node index as a deterministic tie-break.
        other
            .d
            .total_cmp(&self.d)
            .then_with(|| other.v.cmp(&self.v))
    }
}

pub fn all_pairs_shortest(net: &Network) -> Result<ShortestPathTables, NetworkError> {
    let n = net.len();
    let node_ids: Vec<NodeId> = net.nodes().iter().map(|nd| nd.id).collect();

    let mut arc_dist = vec![f64::INFINITY; n * n];
    let mut arc_time = vec![f64::INFINITY; n * n];
    for v in 0..n {
        for &(w, d, t) in net.neighbors(v) {
            arc_dist[v * n + w] = d;
            arc_time[v * n + w] = t;
        }
    }

    let mut dist = vec![f64::INFINITY; n * n];
    for src in 0..n {
        dijkstra(net, src, &mut dist[src * n..(src + 1) * n]);
    }
    // Exact symmetry; the two orientations can differ by rounding because
    // arc weights are accumulated in opposite orders.
    for i in 0..n {
        for j in (i + 1)..n {
            let m = dist[i * n + j].min(dist[j * n + i]);
            dist[i * n + j] = m;
            dist[j * n + i] = m;
        }
    }

    // Canonical next hop: the neighbor minimizing (arc + remaining
    // distance); ties go to the smallest neighbor id. Neighbor lists are
    // id-sorted, so the first argmin wins.
    let mut next = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                next[i * n + j] = i as u32;
                continue;
            }
            let mut best = f64::INFINITY;
            let mut pick = usize::MAX;
            for &(w, d, _) in net.neighbors(i) {
                let via = d + dist[w * n + j];
                if via < best {
                    best = via;
                    pick = w;
                }
            }
            debug_assert!(pick != usize::MAX);
            next[i * n + j] = pick as u32;
        }
    }

    // Times along the canonical paths.
    let mut time = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut t = 0.0;
            let mut cur = i;
            let mut steps = 0;
            while cur != j {
                let hop = next[cur * n + j] as usize;
                t += arc_time[cur * n + hop];
                cur = hop;
                steps += 1;
                if steps > n {
                    return Err(NetworkError::PathReconstruction(node_ids[i], node_ids[j]));
                }
            }
            time[i * n + j] = t;
        }
    }

    Ok(ShortestPathTables {
        n,
        node_ids,
        dist,
        time,
        next,
        arc_dist,
        arc_time,
    })
}

fn dijkstra(net: &Network, src: usize, out: &mut [f64]) {
    out.fill(f64::INFINITY);
    out[src] = 0.0;
    let mut done = vec![false; out.len()];
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry { d: 0.0, v: src });
    while let Some(HeapEntry { d, v }) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &(w, arc, _) in net.neighbors(v) {
            let cand = d + arc;
            if cand < out[w] {
                out[w] = cand;
                heap.push(HeapEntry { d: cand, v: w });
            }
        }
    }
}

impl ShortestPathTables {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn node_id(&self, idx: usize) -> NodeId {
        self.node_ids[idx]
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    #[inline]
    pub fn time(&self, i: usize, j: usize) -> f64 {
        self.time[i * self.n + j]
    }

    #[inline]
    pub fn next_hop(&self, i: usize, j: usize) -> usize {
        self.next[i * self.n + j] as usize
    }

    /// Direct arc length between neighbors, `None` when no arc exists.
    pub fn arc_dist(&self, i: usize, j: usize) -> Option<f64> {
        let d = self.arc_dist[i * self.n + j];
        d.is_finite().then_some(d)
    }

    pub fn arc_time(&self, i: usize, j: usize) -> Option<f64> {
        let t = self.arc_time[i * self.n + j];
        t.is_finite().then_some(t)
    }

    /// Canonical path as internal indices, endpoints included.
    pub fn path_indices(&self, i: usize, j: usize) -> Vec<usize> {
        let mut path = vec![i];
        let mut cur = i;
        while cur != j {
            cur = self.next_hop(cur, j);
            path.push(cur);
            debug_assert!(path.len() <= self.n + 1);
        }
        path
    }

    /// Canonical path as external node ids, endpoints included.
    pub fn path_node_ids(&self, i: usize, j: usize) -> Vec<NodeId> {
        self.path_indices(i, j)
            .into_iter()
            .map(|k| self.node_ids[k])
            .collect()
    }

    /// Visits every arc `(u, v, dist, time)` of the canonical path from
    /// `i` to `j` in traversal order, without allocating.
    #[inline]
    pub fn for_each_arc(&self, i: usize, j: usize, mut f: impl FnMut(usize, usize, f64, f64)) {
        let mut cur = i;
        let mut steps = 0;
        while cur != j {
            let hop = self.next_hop(cur, j);
            f(
                cur,
                hop,
                self.arc_dist[cur * self.n + hop],
                self.arc_time[cur * self.n + hop],
            );
            cur = hop;
            steps += 1;
            assert!(steps <= self.n, "canonical walk failed to reach target");
        }
    }
}
