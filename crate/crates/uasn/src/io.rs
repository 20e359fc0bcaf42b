//! On-disk formats.
//!
//! Everything here is deterministic: the same pipeline over the same inputs
//! produces byte-identical files. JSON floats are written in shortest
//! round-trip form and parsed back to the exact same bits (the parser runs
//! with full precision); CSV cells go through the standard float formatter,
//! which has the same shortest round-trip guarantee.

use crate::error::{Error, NodeId, Result};
use crate::harness::MetricsReport;
use crate::model::{Deployment, Field, Node, NodeKind, RateArray};
use crate::orns::PlacementRecord;
use crate::rnmi::{RelayVerdict, SelectionResult};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const DEPLOYMENT_FORMAT: u32 = 1;

#[derive(Serialize, Deserialize)]
struct DeploymentFile {
    format: u32,
    comm_range: f64,
    field: Field,
    nodes: Vec<Node>,
}

/// Writes a deployment as versioned JSON: `{format, comm_range, field,
/// nodes: [{id, kind, position, residual_energy, primary_energy,
/// generation_rate}]}`. Units are metres, joules and bit/s.
pub fn write_deployment_json<W: Write>(mut w: W, deployment: &Deployment) -> Result<()> {
    let file = DeploymentFile {
        format: DEPLOYMENT_FORMAT,
        comm_range: deployment.comm_range,
        field: deployment.field,
        nodes: deployment.nodes().to_vec(),
    };
    serde_json::to_writer_pretty(&mut w, &file)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Reads a deployment back, re-running all construction checks. Files that
/// omit `primary_energy` get it filled with the residual (a fresh battery).
pub fn read_deployment_json<R: Read>(r: R) -> Result<Deployment> {
    let file: DeploymentFile = serde_json::from_reader(r)?;
    if file.format != DEPLOYMENT_FORMAT {
        return Err(Error::InvalidDeployment(format!(
            "unsupported deployment format {} (this build reads format {DEPLOYMENT_FORMAT})",
            file.format
        )));
    }
    let mut nodes = file.nodes;
    for node in &mut nodes {
        if node.primary_energy <= 0.0 {
            node.primary_energy = node.residual_energy;
        }
    }
    Deployment::new(nodes, file.comm_range, file.field)
}

pub fn save_deployment(path: &Path, deployment: &Deployment) -> Result<()> {
    write_deployment_json(BufWriter::new(File::create(path)?), deployment)
}

pub fn load_deployment(path: &Path) -> Result<Deployment> {
    read_deployment_json(BufReader::new(File::open(path)?))
}

/// Rate array as CSV: header `id,<node ids>`, then one row per source node
/// holding the bit/s it sends to each destination.
pub fn write_rate_csv<W: Write>(w: W, rate: &RateArray) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["id".to_string()];
    header.extend((0..rate.len()).map(|j| j.to_string()));
    out.write_record(&header)?;
    for (i, row) in rate.rows().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        out.write_record(&rec)?;
    }
    out.flush().map_err(Error::Io)?;
    Ok(())
}

pub fn read_rate_csv<R: Read>(r: R) -> Result<RateArray> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("id") {
        return Err(Error::InvalidRateArray(
            "rate CSV must start with an `id` column".into(),
        ));
    }
    let n = header.len() - 1;
    for (j, cell) in header.iter().skip(1).enumerate() {
        if cell.parse::<usize>() != Ok(j) {
            return Err(Error::InvalidRateArray(format!(
                "rate CSV column {} is labelled {cell:?}, expected {j}",
                j + 1
            )));
        }
    }
    let mut rows = Vec::with_capacity(n);
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != n + 1 {
            return Err(Error::InvalidRateArray(format!(
                "rate CSV row {i} has {} cells, expected {}",
                record.len(),
                n + 1
            )));
        }
        if record.get(0).and_then(|s| s.parse::<usize>().ok()) != Some(i) {
            return Err(Error::InvalidRateArray(format!(
                "rate CSV row {i} is labelled {:?}",
                record.get(0)
            )));
        }
        let row: Vec<f64> = record
            .iter()
            .skip(1)
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| {
                    Error::InvalidRateArray(format!("rate CSV row {i}: bad number {cell:?}"))
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::InvalidRateArray(format!(
            "rate CSV has {} rows for {n} columns",
            rows.len()
        )));
    }
    RateArray::from_rows(rows)
}

pub fn save_rate(path: &Path, rate: &RateArray) -> Result<()> {
    write_rate_csv(BufWriter::new(File::create(path)?), rate)
}

pub fn load_rate(path: &Path) -> Result<RateArray> {
    read_rate_csv(BufReader::new(File::open(path)?))
}

/// Placement log: one JSON object per line, one line per loop iteration,
/// skipped iterations included.
pub fn write_placement_log<W: Write>(mut w: W, records: &[PlacementRecord]) -> Result<()> {
    for rec in records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_placement_log<R: Read>(r: R) -> Result<Vec<PlacementRecord>> {
    let mut out = Vec::new();
    for line in BufReader::new(r).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

pub fn save_placement_log(path: &Path, records: &[PlacementRecord]) -> Result<()> {
    write_placement_log(BufWriter::new(File::create(path)?), records)
}

pub fn load_placement_log(path: &Path) -> Result<Vec<PlacementRecord>> {
    read_placement_log(BufReader::new(File::open(path)?))
}

/// Relay-selection summary as written to disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionReport {
    pub kept: Vec<NodeId>,
    pub dropped: Vec<NodeId>,
    pub objective: f64,
    pub tau_star: f64,
    pub achieved_lifetime: f64,
    pub constraint_relaxed: bool,
    pub exact: bool,
    pub per_relay: Vec<RelayVerdict>,
}

impl From<&SelectionResult> for SelectionReport {
    fn from(r: &SelectionResult) -> Self {
        SelectionReport {
            kept: r.kept.clone(),
            dropped: r.dropped.clone(),
            objective: r.objective,
            tau_star: r.tau_star,
            achieved_lifetime: r.achieved_lifetime,
            constraint_relaxed: r.constraint_relaxed,
            exact: r.exact,
            per_relay: r.per_relay.clone(),
        }
    }
}

pub fn write_selection_report<W: Write>(mut w: W, report: &SelectionReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, report)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_selection_report<R: Read>(r: R) -> Result<SelectionReport> {
    Ok(serde_json::from_reader(r)?)
}

pub fn save_selection_report(path: &Path, report: &SelectionReport) -> Result<()> {
    write_selection_report(BufWriter::new(File::create(path)?), report)
}

pub fn load_selection_report(path: &Path) -> Result<SelectionReport> {
    read_selection_report(BufReader::new(File::open(path)?))
}

/// Experiment output: the full per-scenario reports, one JSON array.
pub fn write_reports_json<W: Write>(mut w: W, reports: &[MetricsReport]) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, reports)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_reports_json<R: Read>(r: R) -> Result<Vec<MetricsReport>> {
    Ok(serde_json::from_reader(r)?)
}

pub fn save_reports(path: &Path, reports: &[MetricsReport]) -> Result<()> {
    write_reports_json(BufWriter::new(File::create(path)?), reports)
}

pub fn load_reports(path: &Path) -> Result<Vec<MetricsReport>> {
    read_reports_json(BufReader::new(File::open(path)?))
}

/// Lifetime table, one row per (scenario, seed):
/// `case,method,n,seed,lifetime_s,relays_kept`. Failed seeds keep their row
/// with the last two cells empty so seed columns stay aligned across methods.
pub fn write_lifetime_csv<W: Write>(w: W, reports: &[MetricsReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["case", "method", "n", "seed", "lifetime_s", "relays_kept"])?;
    for report in reports {
        for s in &report.per_seed {
            let (lifetime, kept) = if s.error.is_some() {
                (String::new(), String::new())
            } else {
                (
                    s.lifetime_s.map(|v| v.to_string()).unwrap_or_default(),
                    s.relays_kept.to_string(),
                )
            };
            out.write_record([
                report.case.to_string(),
                report.method.to_string(),
                report.n.to_string(),
                s.seed.to_string(),
                lifetime,
                kept,
            ])?;
        }
    }
    out.flush().map_err(Error::Io)?;
    Ok(())
}

pub fn save_lifetime_csv(path: &Path, reports: &[MetricsReport]) -> Result<()> {
    write_lifetime_csv(BufWriter::new(File::create(path)?), reports)
}

/// Bar-chart input, one row per scenario: `case,method,n,iec`.
pub fn write_iec_csv<W: Write>(w: W, reports: &[MetricsReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["case", "method", "n", "iec"])?;
    for report in reports {
        out.write_record([
            report.case.to_string(),
            report.method.to_string(),
            report.n.to_string(),
            report.iec.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    out.flush().map_err(Error::Io)?;
    Ok(())
}

pub fn save_iec_csv(path: &Path, reports: &[MetricsReport]) -> Result<()> {
    write_iec_csv(BufWriter::new(File::create(path)?), reports)
}

fn kind_label(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Sensor => "sensor",
        NodeKind::Relay => "relay",
        NodeKind::SurfaceBuoy => "surface_buoy",
    }
}

/// Scatter-plot input, one row per node: `id,kind,x,y,z` in metres.
pub fn write_positions_csv<W: Write>(w: W, deployment: &Deployment) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["id", "kind", "x", "y", "z"])?;
    for node in deployment.nodes() {
        out.write_record([
            node.id.to_string(),
            kind_label(node.kind).to_string(),
            node.position.x().to_string(),
            node.position.y().to_string(),
            node.position.z().to_string(),
        ])?;
    }
    out.flush().map_err(Error::Io)?;
    Ok(())
}

pub fn save_positions_csv(path: &Path, deployment: &Deployment) -> Result<()> {
    write_positions_csv(BufWriter::new(File::create(path)?), deployment)
}
