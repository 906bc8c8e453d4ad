//! Reading models from disk.

use std::path::{Path, PathBuf};

use rdtree_core::dsl::{parse_model, ParseError};
use rdtree_core::DecisionTree;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{} has {} parse error(s)", path.display(), errors.len())]
    Parse {
        path: PathBuf,
        errors: Vec<ParseError>,
    },
}

/// Reads and parses a model file. Validation is left to the caller.
pub fn load_model(path: &Path) -> Result<DecisionTree, LoadError> {
    let source = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_model(&source).map_err(|errors| LoadError::Parse {
        path: path.to_path_buf(),
        errors,
    })
}
