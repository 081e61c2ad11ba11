//! On-disk table cache in the CSV table format.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use choco_core::{Bounds, GrundyTable, RuleSet};

use crate::io::{read_table_csv, write_table_csv, TableIoError};

pub const CACHE_ENV: &str = "CHOCO_CACHE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cache {path}: {source}")]
    Format { path: PathBuf, source: TableIoError },
}

/// `$CHOCO_CACHE_DIR`, falling back to `<tmp>/choco-cache`.
pub fn default_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("choco-cache"))
}

pub fn file_name(rules: RuleSet, bounds: Bounds) -> String {
    let b = bounds;
    match rules {
        RuleSet::Rectangular => format!("rect-{}x{}x{}.csv", b.x, b.y, b.z),
        RuleSet::Triangular(k) => format!("tri-k{k}-{}x{}x{}.csv", b.x, b.y, b.z),
    }
}

#[derive(Debug, Clone)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TableCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, rules: RuleSet, bounds: Bounds) -> PathBuf {
        self.dir.join(file_name(rules, bounds))
    }

    /// The cached table, or `None` if nothing is stored for these parameters.
    pub fn load(&self, rules: RuleSet, bounds: Bounds) -> Result<Option<GrundyTable>, CacheError> {
        let path = self.path(rules, bounds);
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        read_table_csv(rules, bounds, BufReader::new(file))
            .map(Some)
            .map_err(|source| CacheError::Format { path, source })
    }

    pub fn store(&self, table: &GrundyTable) -> Result<PathBuf, CacheError> {
        let path = self.path(table.rules(), table.bounds());
        let io_err = |source| CacheError::Io { path: path.clone(), source };
        fs::create_dir_all(&self.dir).map_err(io_err)?;
        let tmp = path.with_extension(format!("csv.{}.tmp", std::process::id()));
        let file = File::create(&tmp).map_err(io_err)?;
        write_table_csv(table, BufWriter::new(file))
            .map_err(|source| CacheError::Format { path: tmp.clone(), source })?;
        fs::rename(&tmp, &path).map_err(io_err)?;
        Ok(path)
    }
}
