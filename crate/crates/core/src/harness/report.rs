//! CSV and JSON rendering of an evaluation, and exit codes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::valfield::ValuedField;
use crate::Rat;

use super::scenario::Problem;
use super::theorem::{evaluate, spot_checks, Evaluation, Mode, Overall, SpotCheck};
use super::AnyProblem;

const SPOT_CHECKS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Exit code for a finished run: 0 certified, 2 undetermined (1 with
/// `strict`), 1 violated.
pub fn exit_code(status: Overall, strict: bool) -> i32 {
    match status {
        Overall::Certified => 0,
        Overall::Undetermined if strict => 1,
        Overall::Undetermined => 2,
        Overall::Violated => 1,
    }
}

fn cell(v: Option<&Rat>) -> String {
    v.map(|r| r.to_string()).unwrap_or_default()
}

/// One row per radius; truncated columns are empty when that inequality
/// was skipped.
pub fn csv_table<F: ValuedField>(ev: &Evaluation<F>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["rho".to_string(), "T".to_string()];
    for i in 0..ev.q {
        header.extend([format!("N_{i}"), format!("N_trunc_{i}"), format!("m_{i}")]);
    }
    header.extend(
        [
            "lhsA", "lhsB", "rhs", "defectA", "defectB", "claim_defect", "fmt_consts", "rhs_sigma", "defectB_sigma",
            "untrunc_lhs", "untrunc_rhs", "untrunc_defect", "hyperplane_lhs", "hyperplane_rhs",
        ]
        .map(String::from),
    );
    w.write_record(&header).map_err(csv_error)?;
    for row in &ev.rows {
        let tr = row.truncated.as_ref();
        let mut rec = vec![row.rho.to_string(), row.t.to_string()];
        for i in 0..ev.q {
            rec.push(row.n[i].to_string());
            rec.push(cell(tr.map(|t| &t.n_trunc[i])));
            rec.push(row.m[i].to_string());
        }
        rec.push(cell(tr.map(|t| &t.lhs_a)));
        rec.push(cell(tr.map(|t| &t.lhs_b)));
        rec.push(cell(tr.map(|t| &t.rhs)));
        rec.push(cell(tr.map(|t| &t.defect_a)));
        rec.push(cell(tr.map(|t| &t.defect_b)));
        rec.push(cell(tr.map(|t| &t.claim_defect)));
        rec.push(row.fmt_consts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";"));
        rec.push(cell(tr.map(|t| &t.rhs_sigma)));
        rec.push(cell(tr.map(|t| &t.defect_b_sigma)));
        rec.push(row.untrunc_lhs.to_string());
        rec.push(row.untrunc_rhs.to_string());
        rec.push(row.untrunc_defect.to_string());
        rec.push(cell(tr.and_then(|t| t.hyperplane_lhs.as_ref())));
        rec.push(cell(tr.and_then(|t| t.hyperplane_rhs.as_ref())));
        w.write_record(&rec).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[derive(Serialize)]
#[serde(bound = "")]
struct JsonReport<'a, F: ValuedField> {
    status: Overall,
    evaluation: &'a Evaluation<F>,
    spot_checks: &'a [SpotCheck],
}

pub fn json_report<F: ValuedField>(ev: &Evaluation<F>, checks: &[SpotCheck]) -> Result<String> {
    let report = JsonReport { status: ev.status, evaluation: ev, spot_checks: checks };
    serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))
}

/// A rendered run.
#[derive(Clone, Debug)]
pub struct Rendered {
    pub text: String,
    pub status: Overall,
}

pub fn render_problem<F: ValuedField>(pb: &Problem<F>, mode: Mode, format: Format) -> Result<Rendered> {
    let ev = evaluate(pb, mode)?;
    let checks = spot_checks(pb, &ev, SPOT_CHECKS)?;
    if let Some(bad) = checks.iter().find(|c| !c.agrees) {
        return Err(Error::InternalConsistency(format!(
            "spot check of {} at rho = {}: table {} vs recomputed {}",
            bad.column, bad.rho, bad.table, bad.recomputed
        )));
    }
    let text = match format {
        Format::Csv => csv_table(&ev)?,
        Format::Json => json_report(&ev, &checks)?,
    };
    Ok(Rendered { text, status: ev.status })
}

pub fn render(pb: &AnyProblem, mode: Mode, format: Format) -> Result<Rendered> {
    crate::with_problem!(pb, p => render_problem(p, mode, format))
}
