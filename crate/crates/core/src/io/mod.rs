//! Run-log persistence, external-run import, and graph/table exports.
//!
//! Every writer stages its output in a temporary file in the target
//! directory and renames it into place.

mod export;
mod runlog;
mod tables;

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use export::{
    dot_landscape, dot_trajectory, graph_json, graphml_landscape, graphml_trajectory,
    write_dot_landscape, write_dot_trajectory, write_graph_json, write_graphml_landscape,
    write_graphml_trajectory,
};
pub use runlog::{import_external, parse_run_log, read_run_log, render_run_log, write_run_log};
pub use tables::{
    correlation_csv, distribution_csv, metrics_csv, operators_csv, pairs_csv, parse_pairs_csv,
    read_pairs_csv, write_pairs_csv,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: field `{field}`: {message}")]
    Schema {
        line: usize,
        field: String,
        message: String,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl IoError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> IoError {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn schema(line: usize, field: &str, message: impl Into<String>) -> IoError {
        IoError::Schema {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

/// Writes `contents` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| IoError::io(path, e))?;
    tmp.write_all(contents).map_err(|e| IoError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| IoError::io(path, e))?;
    tmp.persist(path).map_err(|e| IoError::io(path, e.error))?;
    Ok(())
}

pub fn read_to_string(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}
