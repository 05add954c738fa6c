//! Native JSON network format: nodes and undirected arcs listed once.

use super::{Arc, Network, NetworkError, Node};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    schema_version: u32,
    nodes: Vec<Node>,
    arcs: Vec<Arc>,
}

pub fn load_json(path: &Path) -> Result<Network, NetworkError> {
    let text = std::fs::read_to_string(path).map_err(|source| NetworkError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: NetworkFile = serde_json::from_str(&text).map_err(|e| NetworkError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    Network::new(file.nodes, file.arcs)
}

pub fn save_json(net: &Network, path: &Path) -> Result<(), NetworkError> {
    let file = NetworkFile {
        schema_version: 1,
        nodes: net.nodes().to_vec(),
        arcs: net.arcs().to_vec(),
    };
    let text = serde_json::to_string_pretty(&file).expect("network serialization cannot fail");
    std::fs::write(path, text).map_err(|source| NetworkError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let net = Network::new(
            vec![
                Node { id: 1, x: 0.0, y: 0.0 },
                Node { id: 2, x: 1.0, y: 0.5 },
            ],
            vec![Arc {
                a: 1,
                b: 2,
                distance: 1.25,
                time: 1.5,
            }],
        )
        .unwrap();
        let f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
        save_json(&net, f.path()).unwrap();
        let back = load_json(f.path()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.arcs(), net.arcs());
        assert_eq!(back.nodes()[1].x, 1.0);
    }
}
