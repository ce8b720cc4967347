//! CSV artifacts. Numbers are written in the shortest form that parses
//! back to the same `f64`.

use std::path::Path;

use pde_ssc_core::analysis::actuation_energy;
use pde_ssc_core::lmi::{CertificateParams, LmiCertificate};
use pde_ssc_core::{l2_norm_sq, CostReport, DecayReport, TrajectoryRecord};

use crate::CliError;

pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn write_rows(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    w.write_record(header).map_err(|e| CliError::csv(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Long format: one row per recorded time and mesh node.
pub fn write_trajectory(path: &Path, record: &TrajectoryRecord) -> Result<(), CliError> {
    let xs = record.mesh.nodes();
    let with_zt = record.snapshots.first().is_some_and(|s| s.zt.is_some());
    let mut names = vec!["t", "x", "z", "u"];
    if with_zt {
        names.push("zt");
    }
    let rows = record.snapshots.iter().zip(&record.controls).flat_map(|(s, u)| {
        let xs = &xs;
        (0..xs.len()).map(move |k| {
            let mut row = vec![num(s.t), num(xs[k]), num(s.z[k]), num(u[k])];
            if let Some(zt) = &s.zt {
                row.push(num(zt[k]));
            }
            row
        })
    });
    write_rows(path, &header(&names), rows)
}

/// Per-time norms of the state and the actuation.
pub fn write_summary(path: &Path, record: &TrajectoryRecord) -> Result<(), CliError> {
    let energy = actuation_energy(record);
    let rows = record.snapshots.iter().enumerate().map(|(i, s)| {
        let max_abs = s.z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        vec![
            num(s.t),
            num(l2_norm_sq(s, &record.mesh)),
            num(max_abs),
            num(energy.abs[i]),
            num(energy.sq[i]),
        ]
    });
    write_rows(path, &header(&["t", "l2_sq", "max_abs_z", "int_abs_u", "int_sq_u"]), rows)
}

/// One row: tuning, cross weight, per-vertex largest eigenvalue, `gamma`, bound.
pub fn write_certificate(path: &Path, cert: &LmiCertificate) -> Result<(), CliError> {
    let mut names = header(&["feasible", "K", "R", "delta", "beta1", "beta2"]);
    if matches!(cert.params, CertificateParams::Hyperbolic(_)) {
        names.push("p".into());
    }
    names.extend((1..=cert.vertices.len()).map(|i| format!("lambda_max_{i}")));
    names.extend(header(&["gamma", "bound"]));
    let t = cert.tuning();
    let mut row = vec![
        cert.feasible.to_string(),
        num(t.gain),
        num(t.young_weight),
        num(t.decay_rate),
        num(t.beta_disturbance),
        num(t.beta_shape),
    ];
    if let Some(p) = cert.params.cross_weight() {
        row.push(num(p));
    }
    row.extend(cert.vertices.iter().map(|v| num(v.max_eigenvalue)));
    row.push(num(cert.gamma));
    row.push(num(cert.bound));
    write_rows(path, &names, std::iter::once(row))
}

pub fn write_decay(path: &Path, report: &DecayReport) -> Result<(), CliError> {
    let rows = (0..report.times.len()).map(|i| vec![num(report.times[i]), num(report.values[i]), num(report.bounds[i])]);
    write_rows(path, &header(&["t", "V", "bound"]), rows)
}

pub fn write_cost(path: &Path, report: &CostReport) -> Result<(), CliError> {
    let rows = (0..report.times.len()).map(|i| {
        vec![
            num(report.times[i]),
            num(report.i[i]),
            num(report.int_abs_u_a[i]),
            num(report.int_abs_u_b[i]),
        ]
    });
    write_rows(path, &header(&["t", "I", "int_abs_u_A", "int_abs_u_B"]), rows)
}

/// Reads a CSV back as its header and numeric columns. Booleans become 0/1.
pub fn read_columns(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let names: Vec<String> = r
        .headers()
        .map_err(|e| CliError::csv(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut cols = vec![Vec::new(); names.len()];
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::csv(path, e))?;
        for (c, field) in cols.iter_mut().zip(rec.iter()) {
            let v = match field {
                "true" => 1.0,
                "false" => 0.0,
                s => s
                    .parse()
                    .map_err(|_| CliError::Other(format!("{}: non-numeric field {s:?}", path.display())))?,
            };
            c.push(v);
        }
    }
    Ok((names, cols))
}
