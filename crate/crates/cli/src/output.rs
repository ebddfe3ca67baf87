//! Artifact files and their JSON shapes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use editwalk_core::export::Provenance;
use serde::Serialize;

use crate::commands::CliError;

/// Output directory; every file written through it is announced on stdout.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::Validation(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn file(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.root.join(name);
        let file = File::create(&path).map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(BufWriter::new(file))
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Validation(e.to_string()))?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn text(&self, name: &str, body: &str) -> Result<(), CliError> {
        let mut w = self.file(name)?;
        w.write_all(body.as_bytes())?;
        w.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
pub struct Snapshot<'a> {
    pub t: u64,
    pub state: String,
    pub edge_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<&'a [(usize, usize)]>,
}

#[derive(Serialize)]
pub struct ChainSummary {
    pub chain: u64,
    pub final_state: String,
    pub final_edge_count: usize,
    /// `(t, edge count)` at every recorded snapshot.
    pub edge_counts: Vec<(u64, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acyclic: Option<Vec<bool>>,
    /// First recorded step from which every later snapshot is acyclic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acyclic_from: Option<u64>,
}

#[derive(Serialize)]
pub struct SimulationSummary {
    pub provenance: Provenance,
    pub model: String,
    pub steps: u64,
    pub thin: u64,
    pub initial: String,
    pub chains: Vec<ChainSummary>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct StateRow {
    pub state: String,
    pub edges: String,
    pub probability: String,
    pub probability_f64: f64,
}

#[derive(Clone, Serialize)]
pub struct BoundRow {
    pub bound: &'static str,
    pub c: f64,
    pub t: f64,
}

#[derive(Serialize)]
pub struct CommuteRow {
    pub from: String,
    pub to: String,
    pub commute_time: String,
    pub commute_time_f64: f64,
}
