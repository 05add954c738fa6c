//! Neighborhood search for platoon join and split locations. Good
//! meeting points sit between the two anchor nodes with a small total
//! connecting distance and a small imbalance between the two legs, so
//! each node is scored by the sum of its shortest-path distances to the
//! anchors plus a weighted absolute difference of those distances.

use crate::network::ShortestPathTables;

/// Candidate nodes for one anchor pair, cheapest first.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateNodeList {
    /// (node index, score), ascending by score then node id.
    pub entries: Vec<(usize, f64)>,
}

impl CandidateNodeList {
    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }
}

/// Scores every node other than the anchors and returns the `n_max`
/// cheapest. Fewer than `n_max` other nodes means all of them.
pub fn search_join_split(
    tables: &ShortestPathTables,
    n1: usize,
    n2: usize,
    n_max: usize,
    phi: f64,
) -> CandidateNodeList {
    let mut entries: Vec<(usize, f64)> = (0..tables.len())
        .filter(|&i| i != n1 && i != n2)
        .map(|i| {
            let d1 = tables.dist(n1, i);
            let d2 = tables.dist(n2, i);
            (i, d1 + d2 + phi * (d1 - d2).abs())
        })
        .collect();
    entries.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap()
            .then(tables.node_id(a.0).cmp(&tables.node_id(b.0)))
    });
    entries.truncate(n_max);
    CandidateNodeList { entries }
}
