// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! Machine-readable command reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use cpmod::{CMatrix, Tolerance};
use serde::{Deserialize, Serialize};

use crate::problem::{from_matrix, MatrixData};

pub const REPORT_FORMAT: &str = "cpmod-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandEcho {
    pub name: String,
    pub file: String,
    pub maps: Vec<String>,
    pub options: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceEcho {
    pub rank_rel_tol: f64,
    pub psd_tol: f64,
    pub eq_abs_tol: f64,
}

impl From<&Tolerance> for ToleranceEcho {
    fn from(t: &Tolerance) -> Self {
        Self {
            rank_rel_tol: t.rank_rel_tol,
            psd_tol: t.psd_tol,
            eq_abs_tol: t.eq_abs_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedMatrix {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub value: MatrixData,
}

/// Everything a command computed. Maps are ordered by key; matrices keep the
/// order in which the command produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub format: String,
    pub command: CommandEcho,
    pub tolerance: ToleranceEcho,
    pub verdicts: BTreeMap<String, bool>,
    pub dimensions: BTreeMap<String, usize>,
    pub residuals: BTreeMap<String, f64>,
    pub values: BTreeMap<String, f64>,
    pub matrices: Vec<NamedMatrix>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verification: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(command: CommandEcho, tol: &Tolerance) -> Self {
        Self {
            format: REPORT_FORMAT.into(),
            command,
            tolerance: tol.into(),
            verdicts: BTreeMap::new(),
            dimensions: BTreeMap::new(),
            residuals: BTreeMap::new(),
            values: BTreeMap::new(),
            matrices: Vec::new(),
            warnings: Vec::new(),
            verification: None,
        }
    }

    pub fn verdict(&mut self, name: &str, value: bool) -> &mut Self {
        self.verdicts.insert(name.into(), value);
        self
    }

    pub fn dimension(&mut self, name: &str, value: usize) -> &mut Self {
        self.dimensions.insert(name.into(), value);
        self
    }

    pub fn residual(&mut self, name: &str, value: f64) -> &mut Self {
        self.residuals.insert(name.into(), value);
        self
    }

    pub fn value(&mut self, name: &str, value: f64) -> &mut Self {
        self.values.insert(name.into(), value);
        self
    }

    pub fn matrix(&mut self, name: impl Into<String>, m: &CMatrix) -> &mut Self {
        self.matrices.push(NamedMatrix {
            name: name.into(),
            rows: m.nrows(),
            cols: m.ncols(),
            value: from_matrix(m),
        });
        self
    }

    pub fn verified(&mut self, name: &str, value: f64) -> &mut Self {
        self.verification
            .get_or_insert_with(BTreeMap::new)
            .insert(name.into(), value);
        self
    }

    pub fn find_matrix(&self, name: &str) -> Option<&NamedMatrix> {
        self.matrices.iter().find(|m| m.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.command;
        let _ = writeln!(out, "{} {} {}", c.name, c.file, c.maps.join(" "));
        for (k, v) in &c.options {
            let _ = writeln!(out, "  --{k} {v}");
        }
        let t = &self.tolerance;
        let _ = writeln!(
            out,
            "tolerance: rank_rel {:e}, psd {:e}, eq_abs {:e}",
            t.rank_rel_tol, t.psd_tol, t.eq_abs_tol
        );
        section(
            &mut out,
            "verdicts",
            self.verdicts.iter().map(|(k, v)| (k, v.to_string())),
        );
        section(
            &mut out,
            "dimensions",
            self.dimensions.iter().map(|(k, v)| (k, v.to_string())),
        );
        section(&mut out, "values", self.values.iter().map(|(k, v)| (k, format!("{v}"))));
        section(
            &mut out,
            "residuals",
            self.residuals.iter().map(|(k, v)| (k, format!("{v:e}"))),
        );
        if let Some(ver) = &self.verification {
            section(&mut out, "verification", ver.iter().map(|(k, v)| (k, format!("{v:e}"))));
        }
        for m in &self.matrices {
            let _ = writeln!(out, "{} ({}x{}):", m.name, m.rows, m.cols);
            for row in &m.value {
                let cells: Vec<String> = row.iter().map(|z| complex(*z)).collect();
                let _ = writeln!(out, "  [{}]", cells.join(", "));
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn section<'a>(out: &mut String, title: &str, rows: impl Iterator<Item = (&'a String, String)>) {
    let rows: Vec<_> = rows.collect();
    if rows.is_empty() {
        return;
    }
    let _ = writeln!(out, "{title}:");
    for (k, v) in rows {
        let _ = writeln!(out, "  {k}: {v}");
    }
}

fn complex([re, im]: [f64; 2]) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(re), clean(im));
    if im == 0.0 {
        format!("{re:.6}")
    } else {
        format!("{re:.6}{:+.6}i", im)
    }
}
