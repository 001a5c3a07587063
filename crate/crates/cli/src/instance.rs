//! On-disk instance format: a pair of rational-valued sparse functions plus
//! optional mean and domain defaults.
//!
//! Entries are flat integer arrays `[x_1, …, x_d, numerator, denominator]`
//! so values stay exact and files stay diff-friendly. Schema version 1.

use anyhow::{anyhow, bail, Context, Result};
use bbl_core::rational::rat;
use bbl_core::{PointSet, SparseFunction};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeanParams {
    pub p: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema: u32,
    pub dimension: usize,
    /// Rows `[x_1, …, x_d, numerator, denominator]`.
    pub f: Vec<Vec<i64>>,
    pub g: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<MeanParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
}

/// A parsed and validated instance.
#[derive(Debug)]
pub struct Instance {
    pub file: InstanceFile,
    pub f: SparseFunction,
    pub g: SparseFunction,
    /// `sha256:<hex>` of the raw file bytes.
    pub digest: String,
}

fn rows_to_function(dim: usize, rows: &[Vec<i64>], which: &str) -> Result<SparseFunction> {
    let mut f = SparseFunction::new(dim)?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim + 2 {
            bail!(
                "{which}[{i}] has {} integers, expected {} (d coordinates + numerator + denominator)",
                row.len(),
                dim + 2
            );
        }
        let (point, value) = row.split_at(dim);
        let (num, den) = (value[0], value[1]);
        if den <= 0 {
            bail!("{which}[{i}] denominator must be positive, got {den}");
        }
        if num <= 0 {
            bail!("{which}[{i}] value must be positive, got {num}/{den}");
        }
        f.insert(point.to_vec(), rat(num, den))
            .map_err(|e| anyhow!("{which}[{i}]: {e}"))?;
    }
    Ok(f)
}

impl Instance {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)
            .with_context(|| format!("cannot read instance file {}", path.display()))?;
        let file: InstanceFile = serde_json::from_slice(&bytes).map_err(|e| {
            anyhow!(
                "malformed instance JSON at {}:{}:{}: {e}",
                path.display(),
                e.line(),
                e.column()
            )
        })?;
        if file.schema != 1 {
            bail!("unsupported instance schema {}, expected 1", file.schema);
        }
        if file.dimension == 0 {
            bail!("dimension must be at least 1");
        }
        let f = rows_to_function(file.dimension, &file.f, "f")?;
        let g = rows_to_function(file.dimension, &file.g, "g")?;
        if f.is_empty() || g.is_empty() {
            bail!("instance functions must be nonempty");
        }
        let digest = format!("sha256:{:x}", Sha256::digest(&bytes));
        Ok(Instance { file, f, g, digest })
    }

    /// The supports of `f` and `g` as point sets.
    pub fn supports(&self) -> (PointSet, PointSet) {
        (self.f.support(), self.g.support())
    }
}

/// Serializes a pair of functions to the instance schema. Values must fit
/// `i64` numerator/denominator (they do for hand-authored and generated
/// instances; dyadic outputs of floating computations go in reports, not
/// instances).
pub fn to_instance_file(
    f: &SparseFunction,
    g: &SparseFunction,
    mean: Option<MeanParams>,
    domain: Option<String>,
) -> Result<InstanceFile> {
    let encode = |fun: &SparseFunction| -> Result<Vec<Vec<i64>>> {
        fun.iter()
            .map(|(point, value)| {
                let num: i64 = value
                    .numer()
                    .try_into()
                    .map_err(|_| anyhow!("numerator exceeds i64 range"))?;
                let den: i64 = value
                    .denom()
                    .try_into()
                    .map_err(|_| anyhow!("denominator exceeds i64 range"))?;
                let mut row = point.clone();
                row.push(num);
                row.push(den);
                Ok(row)
            })
            .collect()
    };
    Ok(InstanceFile {
        schema: 1,
        dimension: f.dim(),
        f: encode(f)?,
        g: encode(g)?,
        mean,
        domain,
    })
}
