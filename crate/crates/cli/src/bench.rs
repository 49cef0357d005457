//! Manifest-driven batches. Each cell is independent; rows are sorted by
//! cell name so the output does not depend on scheduling.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use mstream_core::io::{report_json, to_canonical_bytes, Algorithm, OrderMode, ParamArgs, RunReport};
use mstream_core::{brute_force_intersection_opt, Error, OracleBudget};

use crate::{emit, load_instance};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    cells: Vec<Cell>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Cell {
    name: String,
    /// Path relative to the manifest, or `fixture:<name>`.
    instance: String,
    algo: String,
    #[serde(default)]
    order: Option<String>,
    #[serde(default)]
    params: ParamArgs,
    #[serde(default)]
    opt: bool,
}

fn run_cell(cell: &Cell, base: &Path, budget: &OracleBudget) -> Result<Value, Error> {
    let (inst, name) = load_instance(&cell.instance, Some(base))?;
    let algorithm: Algorithm = cell.algo.parse()?;
    let order: OrderMode = cell.order.as_deref().unwrap_or("file").parse()?;
    let params = cell.params.resolve(&inst, algorithm)?;
    let mut report = RunReport::execute(&inst, algorithm, order, params, &name)?;
    if cell.opt {
        report = report.with_opt(brute_force_intersection_opt(&inst, budget)?);
    }
    Ok(report_json(&report))
}

pub(crate) fn run(manifest: &Path, jobs: usize, out: Option<&Path>) -> Result<(), Error> {
    let text = fs::read(manifest).map_err(|e| Error::Parameter(format!("cannot read {}: {e}", manifest.display())))?;
    let manifest_data: Manifest = serde_json::from_slice(&text)
        .map_err(|e| Error::Parameter(format!("invalid manifest {}: {e}", manifest.display())))?;
    let mut seen = std::collections::BTreeSet::new();
    if let Some(dup) = manifest_data.cells.iter().find(|c| !seen.insert(c.name.as_str())) {
        return Err(Error::Parameter(format!("duplicate cell name {:?}", dup.name)));
    }
    let base = manifest.parent().unwrap_or(Path::new("."));
    let budget = OracleBudget::from_env()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start {jobs} workers: {e}")))?;
    let mut rows: Vec<(String, Value)> = pool.install(|| {
        manifest_data
            .cells
            .par_iter()
            .map(|cell| {
                let row = match run_cell(cell, base, &budget) {
                    Ok(report) => json!({"name": cell.name, "status": "ok", "report": report}),
                    Err(e) => json!({
                        "name": cell.name,
                        "status": "error",
                        "error": e.to_string(),
                        "exit_code": e.exit_code(),
                    }),
                };
                (cell.name.clone(), row)
            })
            .collect()
    });
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let failed = rows.iter().filter(|(_, r)| r["status"] != "ok").count();
    let out_value = json!({
        "cells": rows.len(),
        "failed": failed,
        "rows": rows.into_iter().map(|(_, r)| r).collect::<Vec<_>>(),
    });
    emit(&to_canonical_bytes(&out_value), out)
}
