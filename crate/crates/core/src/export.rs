//! CSV, JSON and DOT emitters. Every CSV starts with `#` provenance lines;
//! read them back with comment handling enabled.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::hostgraph::HostGraph;
use crate::lattice::SpectrumReport;
use crate::scalar::Scalar;
use crate::spectral::TransitionMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub version: String,
    pub seed: Option<u64>,
    pub host_digest: String,
    pub mode: String,
}

impl Provenance {
    pub fn new(host: &HostGraph, seed: Option<u64>, mode: &str) -> Self {
        Self { version: env!("CARGO_PKG_VERSION").to_string(), seed, host_digest: host.digest(), mode: mode.to_string() }
    }

    pub fn header(&self) -> String {
        let mut out = format!("# editwalk {}\n", self.version);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "# seed {seed}");
        }
        let _ = writeln!(out, "# host {}", self.host_digest);
        let _ = writeln!(out, "# mode {}", self.mode);
        out
    }
}

fn csv_writer<W: Write>(mut w: W, prov: &Provenance) -> Result<csv::Writer<W>> {
    w.write_all(prov.header().as_bytes())?;
    Ok(csv::Writer::from_writer(w))
}

/// Columns `flat,size,eigenvalue,multiplicity`, one row per flat.
pub fn write_spectrum_csv<W: Write, S: Scalar>(w: W, report: &SpectrumReport<S>, prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    out.write_record(["flat", "size", "eigenvalue", "multiplicity"])?;
    for e in &report.entries {
        out.write_record([e.flat.to_hex(), e.flat.len().to_string(), e.eigenvalue.to_string(), e.multiplicity.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Columns `eigenvalue,multiplicity`, distinct eigenvalues, largest first.
pub fn write_eigenvalues_csv<W: Write, S: Scalar>(w: W, report: &SpectrumReport<S>, prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    out.write_record(["eigenvalue", "multiplicity"])?;
    for (v, k) in report.grouped() {
        out.write_record([v.to_string(), k.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    provenance: &'a Provenance,
    chambers: u64,
    frozen: String,
    entries: Vec<EntryJson>,
}

#[derive(Serialize)]
struct EntryJson {
    flat: String,
    size: usize,
    eigenvalue: String,
    eigenvalue_f64: f64,
    multiplicity: u64,
}

pub fn write_spectrum_json<W: Write, S: Scalar>(w: W, report: &SpectrumReport<S>, prov: &Provenance) -> Result<()> {
    let body = SpectrumJson {
        provenance: prov,
        chambers: report.chambers,
        frozen: report.frozen.to_hex(),
        entries: report
            .entries
            .iter()
            .map(|e| EntryJson {
                flat: e.flat.to_hex(),
                size: e.flat.len(),
                eigenvalue: e.eigenvalue.to_string(),
                eigenvalue_f64: e.eigenvalue.to_f64(),
                multiplicity: e.multiplicity,
            })
            .collect(),
    };
    serde_json::to_writer_pretty(w, &body)?;
    Ok(())
}

/// Columns `state,edges,probability` over the chain's states.
pub fn write_distribution_csv<W: Write, S: Scalar>(
    w: W,
    host: &HostGraph,
    states: &[u64],
    values: &[S],
    prov: &Provenance,
) -> Result<()> {
    let m = host.edge_count();
    let mut out = csv_writer(w, prov)?;
    out.write_record(["state", "edges", "probability"])?;
    for (s, v) in states.iter().zip(values) {
        let set = crate::hostgraph::EdgeSet::from_mask(m, *s)?;
        out.write_record([set.to_hex(), host.describe(&set), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// One row of a TV decay table; bounds are blank where they do not apply.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvRow {
    pub t: usize,
    pub tv: f64,
    pub brown_bound: Option<f64>,
    pub closed_bound: Option<f64>,
}

/// Columns `t,tv,brown_bound,closed_bound`.
pub fn write_tv_csv<W: Write>(w: W, rows: &[TvRow], prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    for row in rows {
        out.serialize(row)?;
    }
    if rows.is_empty() {
        out.write_record(["t", "tv", "brown_bound", "closed_bound"])?;
    }
    out.flush()?;
    Ok(())
}

/// Columns `from,to,commute_time`.
pub fn write_commute_csv<W: Write, S: Scalar>(w: W, rows: &[(String, String, S)], prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    out.write_record(["from", "to", "commute_time"])?;
    for (a, b, c) in rows {
        out.write_record([a.clone(), b.clone(), c.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// State graph in Graphviz DOT: nodes are states labelled by their edge lists,
/// arcs carry transition probabilities. Self-loops are omitted.
pub fn state_graph_dot<S: Scalar>(chain: &TransitionMatrix<S>, host: &HostGraph, prov: &Provenance) -> String {
    let mut out = String::new();
    for line in prov.header().lines() {
        let _ = writeln!(out, "// {}", line.trim_start_matches("# "));
    }
    out.push_str("digraph states {\n  node [shape=box, fontsize=10];\n");
    for i in 0..chain.len() {
        let set = chain.state(i);
        let _ = writeln!(out, "  s{} [label=\"{}\"];", i, host.describe(&set));
    }
    for (i, j, w) in chain.transitions() {
        let _ = writeln!(out, "  s{i} -> s{j} [label=\"{w}\"];");
    }
    out.push_str("}\n");
    out
}
