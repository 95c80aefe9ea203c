// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! Problem and element files.
//!
//! ```json
//! {
//!   "format": "cpmod/1",
//!   "algebra": { "m": 2 },
//!   "module": { "k": 2 },
//!   "H_dim": 2,
//!   "K_dim": 4,
//!   "maps": { "Phi": { "E_11": [[[1.0, 0.0], [0.0, 0.0]], ...], ... } }
//! }
//! ```
//!
//! Basis keys are 1-indexed and row-major. When `k` or `m` exceeds 9 the two
//! indices are separated, as in `E_10_3`. Complex entries are `[re, im]`
//! pairs and matrices are nested row-major arrays.

use std::collections::BTreeMap;
use std::path::Path;

use cpmod::scalar::C;
use cpmod::{CMatrix, HilbertModule, ModuleMap};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT: &str = "cpmod/1";

/// Row-major complex matrix as `[[[re, im], ...], ...]`.
pub type MatrixData = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub format: String,
    pub algebra: AlgebraSpec,
    pub module: ModuleSpec,
    #[serde(rename = "H_dim")]
    pub h_dim: usize,
    #[serde(rename = "K_dim")]
    pub k_dim: usize,
    pub maps: BTreeMap<String, BTreeMap<String, MatrixData>>,
}

/// A commutant element `T ⊕ S` given by its two blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementFile {
    pub format: String,
    #[serde(rename = "T")]
    pub t: MatrixData,
    #[serde(rename = "S")]
    pub s: MatrixData,
}

pub fn basis_key(module: &HilbertModule, r: usize, s: usize) -> String {
    if module.k() > 9 || module.m() > 9 {
        format!("E_{}_{}", r + 1, s + 1)
    } else {
        format!("E_{}{}", r + 1, s + 1)
    }
}

pub fn to_matrix(data: &MatrixData, rows: usize, cols: usize, what: &str) -> Result<CMatrix, CliError> {
    if data.len() != rows || data.iter().any(|row| row.len() != cols) {
        let got_cols = data.first().map_or(0, Vec::len);
        return Err(CliError::Input(format!(
            "{what}: expected a {rows}x{cols} matrix, found {}x{got_cols}",
            data.len()
        )));
    }
    if data.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::Input(format!("{what}: non-finite entry")));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let [re, im] = data[i][j];
        C::new(re, im)
    }))
}

pub fn from_matrix(m: &CMatrix) -> MatrixData {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn check_format(found: &str) -> Result<(), CliError> {
    if found == FORMAT {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "unsupported format {found:?}, expected {FORMAT:?}"
        )))
    }
}

fn located(path: &Path) -> impl Fn(CliError) -> CliError + '_ {
    move |e| match e {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    }
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read(path)?).map_err(located(path))
    }

    /// Parses and checks every map against the declared shapes.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let problem: Self = serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
        check_format(&problem.format)?;
        for name in problem.maps.keys() {
            problem.map(name)?;
        }
        Ok(problem)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    pub fn hilbert_module(&self) -> Result<HilbertModule, CliError> {
        HilbertModule::new(self.module.k, self.algebra.m).map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn map(&self, name: &str) -> Result<ModuleMap, CliError> {
        let payload = self
            .maps
            .get(name)
            .ok_or_else(|| CliError::Input(format!("no map named {name:?}")))?;
        let module = self.hilbert_module()?;
        let keys: Vec<String> = (0..module.dim())
            .map(|i| {
                let (r, s) = module.basis_pair(i);
                basis_key(&module, r, s)
            })
            .collect();
        if let Some(extra) = payload.keys().find(|key| !keys.contains(key)) {
            return Err(CliError::Input(format!("map {name:?} has unknown basis key {extra:?}")));
        }
        let mut images = Vec::with_capacity(keys.len());
        for key in &keys {
            let data = payload
                .get(key)
                .ok_or_else(|| CliError::Input(format!("map {name:?} lacks {key}")))?;
            images.push(to_matrix(data, self.k_dim, self.h_dim, &format!("{name}.{key}"))?);
        }
        ModuleMap::new(module, self.h_dim, self.k_dim, images).map_err(|e| CliError::Input(e.to_string()))
    }

    /// Problem file holding the given maps, which must share one shape.
    pub fn from_maps(maps: &[(&str, &ModuleMap)]) -> Self {
        let (_, first) = maps.first().expect("at least one map");
        let module = first.module();
        let payload = maps
            .iter()
            .map(|(name, map)| ((*name).to_string(), map_payload(map)))
            .collect();
        Self {
            format: FORMAT.into(),
            algebra: AlgebraSpec { m: module.m() },
            module: ModuleSpec { k: module.k() },
            h_dim: first.p(),
            k_dim: first.q(),
            maps: payload,
        }
    }
}

/// Basis images of `map` keyed as in problem files.
pub fn map_payload(map: &ModuleMap) -> BTreeMap<String, MatrixData> {
    let module = map.module();
    (0..module.dim())
        .map(|i| {
            let (r, s) = module.basis_pair(i);
            (basis_key(&module, r, s), from_matrix(&map.images()[i]))
        })
        .collect()
}

impl ElementFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read(path)?;
        let element: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(e.to_string()))
            .map_err(located(path))?;
        check_format(&element.format).map_err(located(path))?;
        Ok(element)
    }

    pub fn blocks(&self, d_h: usize, d_k: usize) -> Result<(CMatrix, CMatrix), CliError> {
        Ok((to_matrix(&self.t, d_h, d_h, "T")?, to_matrix(&self.s, d_k, d_k, "S")?))
    }
}
