//! Trace and bound-report writers.

use std::path::{Path, PathBuf};

use caradory::solvers::{evaluate_bound, RunTrace};
use caradory::{Result, Solution, StepRule, TheoremId};

use crate::{BoundConstants, BoundFlag, FormatFlag};

pub fn write_trace(solution: &Solution, format: FormatFlag, out: &Path) -> Result<()> {
    let text = match format {
        FormatFlag::Csv => solution.trace.to_csv(),
        FormatFlag::Json => solution.to_trace_json().to_json()?,
    };
    std::fs::write(out, text)?;
    Ok(())
}

pub fn write_bounds_report(
    trace: &RunTrace,
    which: BoundFlag,
    constants: &BoundConstants,
    trace_out: &Path,
) -> Result<()> {
    let id = match which {
        BoundFlag::Thm1 => match trace.meta.step {
            StepRule::OpenLoop => TheoremId::Thm1Open,
            StepRule::ClosedLoop => TheoremId::Thm1Closed,
        },
        BoundFlag::Thm2 => TheoremId::Thm2Interior,
        BoundFlag::Thm3 => TheoremId::Thm3Exterior,
        BoundFlag::Thm4 => TheoremId::Thm4StrongGd,
        BoundFlag::Thm7 => TheoremId::Thm7Hcgs,
        BoundFlag::Thm8 => TheoremId::Thm8SmoothedFw,
        BoundFlag::Lemma2 => TheoremId::Lemma2,
    };
    let bounds = evaluate_bound(trace, &constants.theory_bounds(), id)?;
    let mut text = String::from("t,f_value,bound,satisfied\n");
    for (row, b) in trace.rows.iter().zip(&bounds) {
        text.push_str(&format!(
            "{},{},{},{}\n",
            row.t,
            row.f_value,
            b,
            row.f_value <= *b
        ));
    }
    let path = bounds_path(trace_out);
    std::fs::write(&path, text)?;
    println!("bound report: {}", path.display());
    Ok(())
}

pub fn bounds_path(trace_out: &Path) -> PathBuf {
    let stem = trace_out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".into());
    trace_out.with_file_name(format!("{stem}.bounds.csv"))
}
