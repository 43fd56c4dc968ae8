//! CSV time series and sweep tables. Numbers are written with 17 significant
//! digits so re-reading reproduces every double exactly.

use std::path::Path;

use crate::diagnostics::DiagnosticRecord;
use crate::error::{Error, Result};
use crate::experiments::SweepResult;

pub const DIAGNOSTICS_COLUMNS: [&str; 11] = [
    "time",
    "mass",
    "mass1",
    "mass2",
    "energy",
    "grad_l2",
    "xweight_l2",
    "virial",
    "virial_rate",
    "coupling_overlap",
    "modified_energy",
];

pub const SWEEP_COLUMNS: [&str; 7] = [
    "lambda",
    "err_sup_sigma",
    "err_Linf_L2",
    "err_q8N_L4_value",
    "err_q8N_L4_grad",
    "err_q8N_L4_xw",
    "status",
];

pub const RESIDUAL_COLUMNS: [&str; 2] = ["time", "residual"];

/// `{:.16e}`: 17 significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_number(path: &Path, s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Csv {
        path: path.to_path_buf(),
        message: format!("not a number: {s:?}"),
    })
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Csv {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let found = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            message: format!("unexpected header {:?}", found.iter().collect::<Vec<_>>()),
        });
    }
    r.records().map(|rec| rec.map_err(|e| csv_err(path, e))).collect()
}

pub fn write_diagnostics_csv(path: &Path, records: &[DiagnosticRecord]) -> Result<()> {
    write_rows(
        path,
        &DIAGNOSTICS_COLUMNS,
        records.iter().map(|r| {
            let mut row: Vec<String> = [
                r.time,
                r.mass,
                r.mass1,
                r.mass2,
                r.energy,
                r.grad_l2,
                r.xweight_l2,
                r.virial,
                r.virial_rate,
                r.coupling_overlap,
            ]
            .iter()
            .map(|&v| format_number(v))
            .collect();
            row.push(r.modified_energy.map(format_number).unwrap_or_default());
            row
        }),
    )
}

pub fn read_diagnostics_csv(path: &Path) -> Result<Vec<DiagnosticRecord>> {
    read_rows(path, &DIAGNOSTICS_COLUMNS)?
        .iter()
        .map(|rec| {
            let v = |i: usize| parse_number(path, &rec[i]);
            Ok(DiagnosticRecord {
                time: v(0)?,
                mass: v(1)?,
                mass1: v(2)?,
                mass2: v(3)?,
                energy: v(4)?,
                grad_l2: v(5)?,
                xweight_l2: v(6)?,
                virial: v(7)?,
                virial_rate: v(8)?,
                coupling_overlap: v(9)?,
                modified_energy: if rec[10].is_empty() { None } else { Some(v(10)?) },
            })
        })
        .collect()
}

/// One parsed row of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub err_sup_sigma: f64,
    pub err_linf_l2: f64,
    pub err_q8n_l4_value: f64,
    pub err_q8n_l4_grad: f64,
    pub err_q8n_l4_xw: f64,
    pub status: String,
}

pub fn write_sweep_csv(path: &Path, results: &[SweepResult]) -> Result<()> {
    write_rows(
        path,
        &SWEEP_COLUMNS,
        results.iter().map(|r| {
            vec![
                format_number(r.lambda),
                format_number(r.err_sup_sigma),
                format_number(r.err_linf_l2.value),
                format_number(r.err_q8n_l4.value),
                format_number(r.err_q8n_l4.grad),
                format_number(r.err_q8n_l4.xw),
                r.status_original.label().to_string(),
            ]
        }),
    )
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    read_rows(path, &SWEEP_COLUMNS)?
        .iter()
        .map(|rec| {
            let v = |i: usize| parse_number(path, &rec[i]);
            Ok(SweepRow {
                lambda: v(0)?,
                err_sup_sigma: v(1)?,
                err_linf_l2: v(2)?,
                err_q8n_l4_value: v(3)?,
                err_q8n_l4_grad: v(4)?,
                err_q8n_l4_xw: v(5)?,
                status: rec[6].to_string(),
            })
        })
        .collect()
}

pub fn write_residual_csv(path: &Path, series: &[(f64, f64)]) -> Result<()> {
    write_rows(
        path,
        &RESIDUAL_COLUMNS,
        series.iter().map(|&(t, r)| vec![format_number(t), format_number(r)]),
    )
}
