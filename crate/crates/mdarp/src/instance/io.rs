use super::{Instance, InstanceError};
use std::path::Path;

pub fn load_instance(path: &Path) -> Result<Instance, InstanceError> {
    let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let inst: Instance = serde_json::from_str(&text).map_err(|e| InstanceError::Parse {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    inst.validate()?;
    Ok(inst)
}

pub fn save_instance(inst: &Instance, path: &Path) -> Result<(), InstanceError> {
    inst.validate()?;
    let text = serde_json::to_string_pretty(inst).expect("instance serialization cannot fail");
    std::fs::write(path, text).map_err(|source| InstanceError::Io {
        path: path.to_path_buf(),
        source,
    })
}
