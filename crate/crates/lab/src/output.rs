//! Files written by the command line.
//!
//! A run directory holds `report.json`, `trace.json`, `snapshots/` (one CSV
//! per stored snapshot plus `index.csv`, or a single `snapshots.json`) and
//! `paths/<label>.csv`.

use std::fs;
use std::path::Path;

use eplab_core::{field_from_density, to_riemann, FlowField, GasModel, ThresholdReport};
use serde::Serialize;

use crate::error::{io_err, Result};
use crate::runner::RunReport;

/// Upper limit on the number of snapshot files per run.
pub const MAX_SNAPSHOT_FILES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Serialize)]
struct SnapshotRow {
    x: f64,
    rho: f64,
    u: f64,
    #[serde(rename = "R")]
    big_r: f64,
    #[serde(rename = "S")]
    big_s: f64,
    r: f64,
    s: f64,
    #[serde(rename = "X")]
    scaled_r: f64,
    #[serde(rename = "Y")]
    scaled_s: f64,
    phi_x: f64,
}

#[derive(Debug, Serialize)]
struct SnapshotDump {
    t: f64,
    rows: Vec<SnapshotRow>,
}

fn snapshot_rows(field: &FlowField, model: &GasModel) -> Result<Vec<SnapshotRow>> {
    let rf = to_riemann(field, model)?;
    let pf = field_from_density(field)?;
    let grid = field.grid();
    Ok((0..grid.n())
        .map(|i| SnapshotRow {
            x: grid.center(i),
            rho: field.rho()[i],
            u: field.u()[i],
            big_r: rf.riemann_r[i],
            big_s: rf.riemann_s[i],
            r: rf.slope_r[i],
            s: rf.slope_s[i],
            scaled_r: rf.scaled_r[i],
            scaled_s: rf.scaled_s[i],
            phi_x: pf.phi_x[i],
        })
        .collect())
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), value)?;
    Ok(())
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(io_err(path))
}

/// Stored snapshots, thinned to at most [`MAX_SNAPSHOT_FILES`].
pub fn write_snapshots(
    dir: &Path,
    snapshots: &[FlowField],
    model: &GasModel,
    format: Format,
) -> Result<()> {
    create_dir(dir)?;
    let stride = snapshots.len().div_ceil(MAX_SNAPSHOT_FILES).max(1);
    let chosen: Vec<(usize, &FlowField)> = snapshots.iter().enumerate().step_by(stride).collect();
    match format {
        Format::Csv => {
            #[derive(Serialize)]
            struct IndexRow {
                file: String,
                t: f64,
            }
            let mut index = Vec::with_capacity(chosen.len());
            for (j, field) in chosen {
                let file = format!("snap_{j:05}.csv");
                write_csv(&dir.join(&file), snapshot_rows(field, model)?)?;
                index.push(IndexRow { file, t: field.t() });
            }
            write_csv(&dir.join("index.csv"), index)
        }
        Format::Json => {
            let dumps = chosen
                .into_iter()
                .map(|(_, f)| {
                    Ok(SnapshotDump {
                        t: f.t(),
                        rows: snapshot_rows(f, model)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            write_json(&dir.join("snapshots.json"), &dumps)
        }
    }
}

#[derive(Serialize)]
struct PathRow {
    t: f64,
    x: f64,
    #[serde(rename = "X")]
    scaled_r: f64,
    #[serde(rename = "Y")]
    scaled_s: f64,
    rho: f64,
    bound_curve: Option<f64>,
}

/// One CSV per traced path; the Riccati path also carries the bounding curve.
pub fn write_paths(dir: &Path, report: &RunReport) -> Result<()> {
    create_dir(dir)?;
    let riccati = report.verification.riccati.as_ref();
    for p in &report.verification.paths {
        let Some(path) = &p.path else { continue };
        let bound = riccati.filter(|r| r.path_label == p.label).map(|r| r.bound);
        let rows = path.points.iter().map(|pt| PathRow {
            t: pt.t,
            x: pt.x,
            scaled_r: pt.scaled_r,
            scaled_s: pt.scaled_s,
            rho: pt.rho,
            bound_curve: bound.map(|b| b.bound_curve(pt.t)).filter(|v| v.is_finite()),
        });
        write_csv(&dir.join(format!("{}.csv", p.label)), rows)?;
    }
    Ok(())
}

/// `report.json`, `trace.json`, snapshots and paths.
pub fn write_run(dir: &Path, report: &RunReport, format: Format) -> Result<()> {
    create_dir(dir)?;
    write_json(&dir.join("report.json"), report)?;
    write_json(&dir.join("trace.json"), &report.trace)?;
    write_snapshots(
        &dir.join("snapshots"),
        &report.trace.snapshots,
        &report.scenario.model,
        format,
    )?;
    write_paths(&dir.join("paths"), report)
}

/// Classification result: the report as JSON, or per-cell margins as CSV.
pub fn write_classification(
    out: &mut dyn std::io::Write,
    report: &ThresholdReport,
    x: &[f64],
    format: Format,
) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out).map_err(io_err(Path::new("<stdout>")))?;
        }
        Format::Csv => {
            #[derive(Serialize)]
            struct MarginRow {
                x: f64,
                margin_gamma: f64,
                margin_breakdown: f64,
                margin_iso: Option<f64>,
            }
            let mut w = csv::Writer::from_writer(out);
            for (i, &x) in x.iter().enumerate() {
                w.serialize(MarginRow {
                    x,
                    margin_gamma: report.margins_gamma[i],
                    margin_breakdown: report.margins_breakdown[i],
                    margin_iso: report.margins_iso.as_ref().map(|m| m[i]),
                })?;
            }
            w.flush().map_err(io_err(Path::new("<stdout>")))?;
        }
    }
    Ok(())
}
