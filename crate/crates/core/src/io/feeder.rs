use std::path::Path;

use super::{read_text, IoError};
use crate::network::{FeederData, Network, NetworkError};

/// Parses feeder JSON, reporting the failing field path and position.
pub fn parse_network(text: &str, path: &Path) -> Result<Network, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let data: FeederData = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        let message = if field.is_empty() || field == "." {
            format!("line {} column {}: {inner}", inner.line(), inner.column())
        } else {
            format!("line {} column {}, field `{field}`: {inner}", inner.line(), inner.column())
        };
        IoError::FeederParse { path: path.into(), message }
    })?;
    Network::from_data(data).map_err(|e| match e {
        NetworkError::Invalid(report) => IoError::Invalid { path: path.into(), report },
        other => IoError::Data(other.to_string()),
    })
}

pub fn load_network(path: &Path) -> Result<Network, IoError> {
    parse_network(&read_text(path)?, path)
}

/// Normalized feeder JSON: branches oriented away from their source.
pub fn to_feeder_json(net: &Network) -> String {
    let mut s = serde_json::to_string_pretty(net.data()).expect("feeder data serializes");
    s.push('\n');
    s
}

pub fn save_network(net: &Network, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, to_feeder_json(net)).map_err(|source| IoError::Write { path: path.into(), source })
}
