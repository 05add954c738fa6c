//! Deterministic synthetic networks.
//!
//! `small_connected` builds little random graphs for tests and tiny
//! benchmark instances. `city_tntp` emits a TNTP file pair (network +
//! node coordinates) for a city-scale test network: a jittered street
//! grid of 378 through nodes and 796 undirected arcs behind 38 zone
//! centroids, matching the published scale of the standard reduced
//! Anaheim network so experiments exercise the same problem size.

use super::{Arc, Network, Node, NodeId};
use crate::util;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random connected network with `n` nodes (ids `1..=n`) and
/// `n - 1 + extra` arcs where possible. Arc weights are dyadic rationals
/// (multiples of 1/16) so shortest-path sums are exact in f64; time
/// equals distance (unit speed).
pub fn small_connected(n: usize, extra: usize, seed: u64) -> Network {
    assert!(n >= 2);
    let mut rng = util::rng_from(seed, "synth-small", &[n as u64, extra as u64]);
    let weight = |rng: &mut dyn rand::RngCore| -> f64 {
        // 1/16 .. 64/16, dyadic.
        (rng.next_u32() % 64 + 1) as f64 / 16.0
    };

    let mut arcs: Vec<Arc> = Vec::new();
    let mut have: std::collections::HashSet<(NodeId, NodeId)> = std::collections::HashSet::new();
    for v in 2..=n as NodeId {
        let u = rng.gen_range(1..v);
        let w = weight(&mut rng);
        arcs.push(Arc {
            a: u,
            b: v,
            distance: w,
            time: w,
        });
        have.insert((u, v));
    }
    let mut candidates: Vec<(NodeId, NodeId)> = Vec::new();
    for a in 1..=n as NodeId {
        for b in (a + 1)..=n as NodeId {
            if !have.contains(&(a, b)) {
                candidates.push((a, b));
            }
        }
    }
    candidates.shuffle(&mut rng);
    for &(a, b) in candidates.iter().take(extra) {
        let w = weight(&mut rng);
        arcs.push(Arc {
            a,
            b,
            distance: w,
            time: w,
        });
    }

    let side = (n as f64).sqrt().ceil() as usize;
    let nodes = (1..=n as NodeId)
        .map(|id| Node {
            id,
            x: ((id as usize - 1) % side) as f64,
            y: ((id as usize - 1) / side) as f64,
        })
        .collect();
    Network::new(nodes, arcs).expect("synthetic network construction is valid")
}

const GRID_ROWS: usize = 14;
const GRID_COLS: usize = 27;
const FIRST_THRU: NodeId = 39;
const CENTROIDS: usize = 38;
const SPACING: f64 = 0.4;

fn grid_id(r: usize, c: usize) -> NodeId {
    FIRST_THRU + (r * GRID_COLS + c) as NodeId
}

/// Deterministic per-arc jitter in [0, 1), symmetric in the endpoints.
fn jitter(a: NodeId, b: NodeId) -> f64 {
    let (lo, hi) = (a.min(b), a.max(b));
    let h = util::derive_seed(0x5eed, "city-arc", &[lo as u64, hi as u64]);
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn arc_len(a: NodeId, b: NodeId, base: f64) -> f64 {
    let len = base * (1.0 + 0.06 * jitter(a, b));
    (len * 10_000.0).round() / 10_000.0
}

/// Returns `(network_tntp, node_tntp)` file contents for the synthetic
/// city. Loading the network file with centroid removal yields exactly
/// 378 nodes and 796 undirected arcs.
pub fn city_tntp() -> (String, String) {
    let mut undirected: Vec<(NodeId, NodeId, f64)> = Vec::new();
    for r in 0..GRID_ROWS {
        for c in 0..GRID_COLS - 1 {
            let (a, b) = (grid_id(r, c), grid_id(r, c + 1));
            undirected.push((a, b, arc_len(a, b, SPACING)));
        }
    }
    for r in 0..GRID_ROWS - 1 {
        for c in 0..GRID_COLS {
            let (a, b) = (grid_id(r, c), grid_id(r + 1, c));
            undirected.push((a, b, arc_len(a, b, SPACING)));
        }
    }
    // 81 diagonal shortcuts bring the arc count to 796.
    let diag_cells = (GRID_ROWS - 1) * (GRID_COLS - 1);
    for k in 0..81 {
        let m = k * 4;
        assert!(m < diag_cells);
        let (r, c) = (m / (GRID_COLS - 1), m % (GRID_COLS - 1));
        let (a, b) = (grid_id(r, c), grid_id(r + 1, c + 1));
        undirected.push((a, b, arc_len(a, b, 0.57)));
    }
    assert_eq!(undirected.len(), 796);

    // Centroid connectors; removed on load.
    let mut connectors: Vec<(NodeId, NodeId, f64)> = Vec::new();
    for z in 1..=CENTROIDS {
        let t = (z - 1) * 378 / CENTROIDS;
        for off in [0usize, 1, GRID_COLS] {
            let through = FIRST_THRU + ((t + off) % 378) as NodeId;
            connectors.push((z as NodeId, through, 0.2));
        }
    }

    let links = 2 * (undirected.len() + connectors.len());
    let mut net = String::new();
    net.push_str("<NUMBER OF ZONES> 38\n");
    net.push_str("<NUMBER OF NODES> 416\n");
    net.push_str("<FIRST THRU NODE> 39\n");
    net.push_str(&format!("<NUMBER OF LINKS> {links}\n"));
    net.push_str("<END OF METADATA>\n");
    net.push_str("~ init term capacity length fftime b power speed toll type ;\n");
    let mut row = |a: NodeId, b: NodeId, len: f64| {
        net.push_str(&format!("{a} {b} 9000 {len} {len} 0.15 4 35 0 1 ;\n"));
    };
    for &(a, b, len) in undirected.iter().chain(connectors.iter()) {
        row(a, b, len);
        row(b, a, len);
    }

    let mut nodes = String::from("node X Y ;\n");
    for z in 1..=CENTROIDS {
        let t = (z - 1) * 378 / CENTROIDS;
        let (r, c) = (t / GRID_COLS, t % GRID_COLS);
        nodes.push_str(&format!(
            "{} {:.4} {:.4} ;\n",
            z,
            c as f64 * SPACING + 0.05,
            r as f64 * SPACING + 0.05
        ));
    }
    for r in 0..GRID_ROWS {
        for c in 0..GRID_COLS {
            nodes.push_str(&format!(
                "{} {:.4} {:.4} ;\n",
                grid_id(r, c),
                c as f64 * SPACING,
                r as f64 * SPACING
            ));
        }
    }
    (net, nodes)
}
