//! In-memory CSV tables and the files a command produces.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Formats a float so that it reads back to the same value.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Content {
    Csv(Table),
    Bytes(Vec<u8>),
}

/// One output file, relative to the run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: PathBuf,
    pub content: Content,
}

impl Artifact {
    pub fn csv(name: impl Into<PathBuf>, table: Table) -> Self {
        Artifact { name: name.into(), content: Content::Csv(table) }
    }

    pub fn bytes(name: impl Into<PathBuf>, bytes: Vec<u8>) -> Self {
        Artifact { name: name.into(), content: Content::Bytes(bytes) }
    }

    pub fn table(&self) -> Option<&Table> {
        match &self.content {
            Content::Csv(t) => Some(t),
            Content::Bytes(_) => None,
        }
    }
}

/// Writes every artifact below `dir`, creating directories as needed.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let path = dir.join(&a.name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.to_path_buf(), source })?;
        }
        let bytes = match &a.content {
            Content::Csv(t) => t.to_csv()?,
            Content::Bytes(b) => b.clone(),
        };
        fs::write(&path, bytes).map_err(|source| CliError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}
