//! Layered expansion for the arc-based MILP export.
//!
//! A vehicle may have to pass the same physical node more than once; the
//! flow formulation handles that by stacking `L` copies of the network
//! and linking each node to its copy on the next layer with zero-cost
//! arcs. Every arc, inter-layer links included, exists in both
//! directions, because the exported time-continuity rows couple each
//! directed arc with its reverse. Ascending a layer is therefore
//! possible but never profitable: the links cost nothing either way.

use super::{Network, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayeredArc {
    /// Layered node index `layer * base_len + base_index`.
    pub from: u32,
    pub to: u32,
    pub distance: f64,
    pub time: f64,
    pub interlayer: bool,
}

#[derive(Debug, Clone)]
pub struct LayeredNetwork {
    pub layers: u32,
    base_len: usize,
    base_ids: Vec<NodeId>,
    pub arcs: Vec<LayeredArc>,
}

impl LayeredNetwork {
    pub fn base_len(&self) -> usize {
        self.base_len
    }

    pub fn node_count(&self) -> usize {
        self.base_len * self.layers as usize
    }

    pub fn index(&self, layer: u32, base_index: usize) -> u32 {
        debug_assert!(layer < self.layers && base_index < self.base_len);
        layer * self.base_len as u32 + base_index as u32
    }

    /// Splits a layered index into (layer, base index).
    pub fn decompose(&self, idx: u32) -> (u32, usize) {
        (
            idx / self.base_len as u32,
            (idx % self.base_len as u32) as usize,
        )
    }

    pub fn base_id(&self, idx: u32) -> NodeId {
        self.base_ids[(idx as usize) % self.base_len]
    }
}

pub fn expand_layers(net: &Network, layers: u32) -> LayeredNetwork {
    assert!(layers >= 1, "layer count must be at least 1");
    let n = net.len();
    let mut arcs = Vec::with_capacity(2 * net.arc_count() * layers as usize + n * (layers as usize - 1));
    for layer in 0..layers {
        let offset = layer * n as u32;
        for arc in net.arcs() {
            let ia = net.node_index(arc.a).unwrap() as u32 + offset;
            let ib = net.node_index(arc.b).unwrap() as u32 + offset;
            arcs.push(LayeredArc {
                from: ia,
                to: ib,
                distance: arc.distance,
                time: arc.time,
                interlayer: false,
            });
            arcs.push(LayeredArc {
                from: ib,
                to: ia,
                distance: arc.distance,
                time: arc.time,
                interlayer: false,
            });
        }
    }
    for layer in 0..layers.saturating_sub(1) {
        for v in 0..n as u32 {
            let lo = layer * n as u32 + v;
            let hi = (layer + 1) * n as u32 + v;
            arcs.push(LayeredArc { from: lo, to: hi, distance: 0.0, time: 0.0, interlayer: true });
            arcs.push(LayeredArc { from: hi, to: lo, distance: 0.0, time: 0.0, interlayer: true });
        }
    }
    LayeredNetwork {
        layers,
        base_len: n,
        base_ids: net.nodes().iter().map(|nd| nd.id).collect(),
        arcs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Arc, Node};

    #[test]
    fn counts_and_structure() {
        let net = Network::new(
            vec![
                Node { id: 1, x: 0.0, y: 0.0 },
                Node { id: 2, x: 0.0, y: 0.0 },
                Node { id: 3, x: 0.0, y: 0.0 },
            ],
            vec![
                Arc { a: 1, b: 2, distance: 1.0, time: 1.0 },
                Arc { a: 2, b: 3, distance: 2.0, time: 2.0 },
            ],
        )
        .unwrap();
        let layered = expand_layers(&net, 2);
        // 2 directions x 2 arcs x 2 layers + 2 directions x 3 inter-layer links.
        assert_eq!(layered.arcs.len(), 2 * 2 * 2 + 2 * 3);
        assert_eq!(layered.node_count(), 6);
        let inter: Vec<&LayeredArc> = layered.arcs.iter().filter(|a| a.interlayer).collect();
        assert_eq!(inter.len(), 6);
        for arc in inter {
            assert_eq!(arc.distance, 0.0);
            assert_eq!(arc.time, 0.0);
            let (l0, b0) = layered.decompose(arc.from);
            let (l1, b1) = layered.decompose(arc.to);
            assert_eq!(l0.abs_diff(l1), 1);
            assert_eq!(b0, b1);
        }
        // Every directed arc is immediately followed by its reverse.
        for pair in layered.arcs.chunks(2) {
            assert_eq!(pair[0].from, pair[1].to);
            assert_eq!(pair[0].to, pair[1].from);
        }
        assert_eq!(layered.base_id(layered.index(1, 2)), 3);
    }
}
