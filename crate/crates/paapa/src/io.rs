//! Persistence: CSV emitters for every tabular output, an edge-list reader,
//! and the JSON metadata sidecar that makes each file reproducible.
//!
//! All CSV files are plain numeric tables with a fixed header and
//! deterministic row order; each file is paired with `<name>.meta.json`
//! carrying the parameters, seeds and generator identity needed to
//! regenerate it bit-identically.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::graph::{EdgeRecord, GraphState};
use crate::params::ModelParams;
use crate::seed::{RNG_NAME, SEED_DERIVATION};
use crate::stats::DegreeHistogram;
use crate::theory::TruncatedLaw;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Reproducibility metadata attached to every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub model: &'static str,
    pub m: u32,
    pub p: f64,
    pub variant: String,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub seed: u64,
    pub replica_index: Option<u64>,
    pub toolkit_version: &'static str,
    pub rng: &'static str,
    pub seed_derivation: &'static str,
    pub replicas: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl RunMetadata {
    pub fn for_params(params: &ModelParams) -> Self {
        RunMetadata {
            model: "pa-apa",
            m: params.m,
            p: params.p,
            variant: params.variant.to_string(),
            horizon: params.horizon,
            seed: params.seed,
            replica_index: None,
            toolkit_version: TOOLKIT_VERSION,
            rng: RNG_NAME,
            seed_derivation: SEED_DERIVATION,
            replicas: params.replicas,
            derived_seed: None,
            checkpoint: None,
            note: None,
        }
    }

    pub fn with_replica(mut self, replica: u64) -> Self {
        self.replica_index = Some(replica);
        self.derived_seed = Some(crate::seed::derive_seed(self.seed, replica));
        self
    }

    pub fn with_checkpoint(mut self, time: u64) -> Self {
        self.checkpoint = Some(time);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Writes `value` as pretty JSON next to `csv_path`, swapping the extension
/// for `.meta.json`.
pub fn write_metadata<T: Serialize>(csv_path: &Path, value: &T) -> std::io::Result<PathBuf> {
    let meta_path = sidecar_path(csv_path);
    write_json(&meta_path, value)?;
    Ok(meta_path)
}

/// Writes `value` as pretty JSON to `path`.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(file, value).map_err(std::io::Error::other)
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    let mut name = csv_path.file_stem().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    csv_path.with_file_name(name)
}

/// Edge list in creation order: `step,source,target`.
pub fn write_edges_csv(path: &Path, state: &GraphState) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "step,source,target")?;
    for edge in state.edges() {
        writeln!(out, "{},{},{}", edge.step, edge.source, edge.target)?;
    }
    out.flush()
}

/// Reads an edge-list CSV produced by [`write_edges_csv`].
pub fn read_edges_csv(path: &Path) -> std::io::Result<Vec<EdgeRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut edges = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || (line_no == 0 && trimmed.starts_with("step")) {
            continue;
        }
        let mut fields = trimmed.split(',');
        let parse = |field: Option<&str>| -> std::io::Result<u64> {
            field
                .ok_or_else(|| bad_row(line_no, trimmed))?
                .trim()
                .parse::<u64>()
                .map_err(|_| bad_row(line_no, trimmed))
        };
        let step = parse(fields.next())?;
        let source = parse(fields.next())? as u32;
        let target = parse(fields.next())? as u32;
        edges.push(EdgeRecord { step, source, target });
    }
    Ok(edges)
}

fn bad_row(line_no: usize, row: &str) -> std::io::Error {
    std::io::Error::new(
        std::io::ErrorKind::InvalidData,
        format!("malformed edge row {}: `{}`", line_no + 1, row),
    )
}

/// Histogram table: `k,count,frac`.
pub fn write_histogram_csv(path: &Path, hist: &DegreeHistogram) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "k,count,frac")?;
    let total = hist.total_vertices() as f64;
    for (&k, &count) in hist.counts() {
        writeln!(out, "{},{},{}", k, count, count as f64 / total)?;
    }
    out.flush()
}

/// Mean-degree trajectory: `t,mean_degree,replicas`.
pub fn write_trajectory_csv(path: &Path, rows: &[(u64, f64, u64)]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "t,mean_degree,replicas")?;
    for &(t, mean, replicas) in rows {
        writeln!(out, "{},{},{}", t, mean, replicas)?;
    }
    out.flush()
}

/// Probability table with a caller-chosen value header (`k,P_k` for the
/// limit law, `k,prob` for exact laws).
pub fn write_law_csv(path: &Path, value_header: &str, law: &TruncatedLaw) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "k,{value_header}")?;
    for (&k, &prob) in &law.probs {
        writeln!(out, "{},{}", k, prob)?;
    }
    out.flush()
}

/// Expected-degree trajectory: `t,expected_degree`.
pub fn write_expected_degree_csv(path: &Path, rows: &[(u64, f64)]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "t,expected_degree")?;
    for &(t, value) in rows {
        writeln!(out, "{},{}", t, value)?;
    }
    out.flush()
}

/// Per-vertex attachment probabilities: `vertex,degree,probability`.
pub fn write_prob_dump_csv(path: &Path, rows: &[(u32, u32, f64)]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "vertex,degree,probability")?;
    for &(vertex, degree, probability) in rows {
        writeln!(out, "{},{},{}", vertex, degree, probability)?;
    }
    out.flush()
}

/// Assortativity sweep table: one row per mixing probability, a column per
/// variant, matching the published table layout.
pub fn write_sweep_csv(path: &Path, rows: &[(f64, Option<f64>, Option<f64>)]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let both = rows.iter().all(|r| r.1.is_some() && r.2.is_some());
    if both {
        writeln!(out, "p,r_paapa2,r_paapa")?;
        for &(p, r2, r1) in rows {
            writeln!(out, "{},{},{}", p, r2.unwrap(), r1.unwrap())?;
        }
    } else {
        writeln!(out, "p,r")?;
        for &(p, r2, r1) in rows {
            writeln!(out, "{},{}", p, r2.or(r1).unwrap_or(f64::NAN))?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grow;
    use crate::params::Variant;
    use crate::seed::replica_rng;
    use crate::stats::histogram;

    fn tmp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("paapa-io-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn edges_round_trip() {
        let params = ModelParams::new(2, 0.5, Variant::PaApa, 40, 5);
        let state = grow(&params, &mut replica_rng(params.seed, 0)).unwrap();
        let dir = tmp_dir("edges");
        let path = dir.join("edges.csv");
        write_edges_csv(&path, &state).unwrap();
        let loaded = read_edges_csv(&path).unwrap();
        let original: Vec<EdgeRecord> = state.edges().collect();
        assert_eq!(loaded, original);
        let head = std::fs::read_to_string(&path).unwrap();
        assert!(head.starts_with("step,source,target\n1,1,1\n"));
    }

    #[test]
    fn histogram_and_metadata_files() {
        let params = ModelParams::new(1, 0.0, Variant::PaApa, 10, 1);
        let state = grow(&params, &mut replica_rng(params.seed, 0)).unwrap();
        let dir = tmp_dir("hist");
        let path = dir.join("hist_t10.csv");
        write_histogram_csv(&path, &histogram(&state)).unwrap();
        let meta = RunMetadata::for_params(&params).with_replica(0).with_checkpoint(10);
        let meta_path = write_metadata(&path, &meta).unwrap();
        assert_eq!(meta_path.file_name().unwrap(), "hist_t10.meta.json");
        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&meta_path).unwrap()).unwrap();
        for key in ["model", "m", "p", "variant", "T", "seed", "replica_index", "toolkit_version"] {
            assert!(parsed.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(parsed["rng"], "chacha8");
    }

    #[test]
    fn malformed_edge_rows_are_rejected() {
        let dir = tmp_dir("bad");
        let path = dir.join("bad.csv");
        std::fs::write(&path, "step,source,target\n1,1\n").unwrap();
        assert!(read_edges_csv(&path).is_err());
    }
}
