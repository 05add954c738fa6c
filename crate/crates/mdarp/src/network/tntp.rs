//! TNTP network and node-coordinate parsing.
//!
//! Only the `init_node`, `term_node`, `length` and `free_flow_time`
//! columns of the arc table are used; everything else is ignored. TNTP
//! files list directed rows, so a road normally appears twice; the two
//! directions are merged into one undirected arc and must carry equal
//! weights. Zone centroids (ids below `<FIRST THRU NODE>`) and their
//! connector links are dropped, which is how the published networks are
//! reduced to their through-traffic core.

use super::{Arc, Network, NetworkError, Node, NodeId};
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

pub struct TntpOptions {
    /// Remove nodes below the file's `<FIRST THRU NODE>` (zone centroids)
    /// together with their connector links.
    pub remove_centroids: bool,
    /// Fallback speed (miles/minute) when a row has no free-flow time.
    pub default_speed: f64,
}

impl Default for TntpOptions {
    fn default() -> Self {
        TntpOptions {
            remove_centroids: true,
            default_speed: 1.0,
        }
    }
}

fn read(path: &Path) -> Result<String, NetworkError> {
    std::fs::read_to_string(path).map_err(|source| NetworkError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> NetworkError {
    NetworkError::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

pub fn load_tntp(path: &Path, options: &TntpOptions) -> Result<Network, NetworkError> {
    let text = read(path)?;
    let mut first_thru: NodeId = 1;
    // Directed rows keyed by (from, to); BTreeMap keeps merge order (and
    // therefore which error surfaces first) deterministic.
    let mut directed: BTreeMap<(NodeId, NodeId), (f64, f64)> = BTreeMap::new();
    let mut max_node: NodeId = 0;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('~') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('<') {
            let Some(end) = rest.find('>') else {
                return Err(parse_err(path, lineno + 1, "unterminated metadata tag"));
            };
            let key = rest[..end].trim().to_ascii_uppercase();
            let value = rest[end + 1..].trim();
            if key == "FIRST THRU NODE" {
                first_thru = value
                    .parse()
                    .map_err(|_| parse_err(path, lineno + 1, "invalid <FIRST THRU NODE>"))?;
            }
            continue;
        }

        let mut fields: Vec<&str> = line.split_whitespace().collect();
        if fields.last() == Some(&";") {
            fields.pop();
        } else if let Some(last) = fields.last_mut() {
            *last = last.trim_end_matches(';');
            if last.is_empty() {
                fields.pop();
            }
        }
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 4 {
            return Err(parse_err(
                path,
                lineno + 1,
                "arc row needs at least init, term, capacity, length",
            ));
        }
        let from: NodeId = fields[0]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "invalid init_node"))?;
        let to: NodeId = fields[1]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "invalid term_node"))?;
        let length: f64 = fields[3]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "invalid length"))?;
        let time: f64 = match fields.get(4) {
            Some(s) => s
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, "invalid free_flow_time"))?,
            None => length / options.default_speed,
        };
        if from == to {
            return Err(NetworkError::SelfLoop(from));
        }
        if directed.insert((from, to), (length, time)).is_some() {
            return Err(NetworkError::DuplicateArc(from.min(to), from.max(to)));
        }
        max_node = max_node.max(from).max(to);
    }

    let cut = if options.remove_centroids { first_thru } else { 1 };

    // Merge directions into undirected arcs, dropping centroid links.
    let mut arcs: Vec<Arc> = Vec::new();
    let mut keep: Vec<bool> = vec![false; max_node as usize + 1];
    for (&(from, to), &(length, time)) in &directed {
        if from < cut || to < cut {
            continue;
        }
        if from < to {
            if let Some(&(rl, rt)) = directed.get(&(to, from)) {
                if rl != length || rt != time {
                    return Err(NetworkError::AsymmetricArc(from, to));
                }
            }
            arcs.push(Arc {
                a: from,
                b: to,
                distance: length,
                time,
            });
        } else if !directed.contains_key(&(to, from)) {
            // Only the reverse orientation is listed; still one road.
            arcs.push(Arc {
                a: to,
                b: from,
                distance: length,
                time,
            });
        }
        keep[from as usize] = true;
        keep[to as usize] = true;
    }

    let nodes: Vec<Node> = (cut..=max_node)
        .filter(|&id| keep[id as usize])
        .map(|id| Node { id, x: 0.0, y: 0.0 })
        .collect();
    Network::new(nodes, arcs)
}

/// Parses a TNTP node-coordinate table (`node x y ;` rows, optional
/// header line).
pub fn load_node_coords(path: &Path) -> Result<HashMap<NodeId, (f64, f64)>, NetworkError> {
    let text = read(path)?;
    let mut coords = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('~') || line.starts_with('<') {
            continue;
        }
        let mut fields: Vec<&str> = line.split_whitespace().collect();
        if fields.last() == Some(&";") {
            fields.pop();
        } else if let Some(last) = fields.last_mut() {
            *last = last.trim_end_matches(';');
        }
        if fields.len() < 3 {
            continue;
        }
        let Ok(id) = fields[0].parse::<NodeId>() else {
            if lineno == 0 {
                // Header line ("node X Y").
                continue;
            }
            return Err(parse_err(path, lineno + 1, "invalid node id"));
        };
        let x: f64 = fields[1]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "invalid x coordinate"))?;
        let y: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, "invalid y coordinate"))?;
        coords.insert(id, (x, y));
    }
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".tntp").tempfile().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const SMALL: &str = "\
<NUMBER OF ZONES> 2
<NUMBER OF NODES> 5
<FIRST THRU NODE> 3
<NUMBER OF LINKS> 10
<END OF METADATA>
~ from to capacity length fftime b power speed toll type ;
1 3 900 0.5 0.5 0.15 4 40 0 1 ;
3 1 900 0.5 0.5 0.15 4 40 0 1 ;
2 5 900 0.7 0.7 0.15 4 40 0 1 ;
5 2 900 0.7 0.7 0.15 4 40 0 1 ;
3 4 900 1.25 1.5 0.15 4 40 0 1 ;
4 3 900 1.25 1.5 0.15 4 40 0 1 ;
4 5 900 2.0 2.25 0.15 4 40 0 1 ;
5 4 900 2.0 2.25 0.15 4 40 0 1 ;
3 5 900 3.0 3.5 0.15 4 40 0 1 ;
5 3 900 3.0 3.5 0.15 4 40 0 1 ;
";

    #[test]
    fn parses_and_removes_centroids() {
        let f = write_tmp(SMALL);
        let net = load_tntp(f.path(), &TntpOptions::default()).unwrap();
        // Centroids 1 and 2 and their connectors are gone.
        assert_eq!(net.len(), 3);
        assert_eq!(net.arc_count(), 3);
        assert!(net.node_index(1).is_none());
        assert!(net.node_index(3).is_some());
        let arc = net.arcs().iter().find(|a| a.a == 3 && a.b == 4).unwrap();
        assert_eq!(arc.distance, 1.25);
        assert_eq!(arc.time, 1.5);
    }

    #[test]
    fn keeps_centroids_when_asked() {
        let f = write_tmp(SMALL);
        let net = load_tntp(
            f.path(),
            &TntpOptions {
                remove_centroids: false,
                default_speed: 1.0,
            },
        )
        .unwrap();
        assert_eq!(net.len(), 5);
        assert_eq!(net.arc_count(), 5);
    }

    #[test]
    fn rejects_asymmetric_weights() {
        let text = "\
<FIRST THRU NODE> 1
<END OF METADATA>
1 2 900 1.0 1.0 ;
2 1 900 1.5 1.0 ;
";
        let f = write_tmp(text);
        let err = load_tntp(f.path(), &TntpOptions::default()).unwrap_err();
        assert!(matches!(err, NetworkError::AsymmetricArc(1, 2)));
    }

    #[test]
    fn rejects_repeated_direction() {
        let text = "\
<END OF METADATA>
1 2 900 1.0 1.0 ;
1 2 900 1.0 1.0 ;
";
        let f = write_tmp(text);
        let err = load_tntp(f.path(), &TntpOptions::default()).unwrap_err();
        assert!(matches!(err, NetworkError::DuplicateArc(1, 2)));
    }

    #[test]
    fn one_way_row_still_becomes_an_undirected_arc() {
        let text = "\
<END OF METADATA>
2 1 900 1.0 1.0 ;
2 3 900 1.0 1.0 ;
3 2 900 1.0 1.0 ;
";
        let f = write_tmp(text);
        let net = load_tntp(f.path(), &TntpOptions::default()).unwrap();
        assert_eq!(net.arc_count(), 2);
        assert!(net.arcs().iter().any(|a| a.a == 1 && a.b == 2));
    }

    #[test]
    fn missing_time_column_defaults_to_distance_over_speed() {
        let text = "\
<END OF METADATA>
1 2 900 3.0 ;
2 1 900 3.0 ;
";
        let f = write_tmp(text);
        let net = load_tntp(
            f.path(),
            &TntpOptions {
                remove_centroids: true,
                default_speed: 0.5,
            },
        )
        .unwrap();
        assert_eq!(net.arcs()[0].time, 6.0);
    }

    #[test]
    fn parses_node_coordinates() {
        let text = "\
node X Y ;
1 100.5 200.25 ;
2 -3.0 4.0 ;
";
        let f = write_tmp(text);
        let coords = load_node_coords(f.path()).unwrap();
        assert_eq!(coords[&1], (100.5, 200.25));
        assert_eq!(coords[&2], (-3.0, 4.0));
    }
}
