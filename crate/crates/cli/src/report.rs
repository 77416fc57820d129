//! ReportFile: the JSON output of every command.
//!
//! Block components are exact: rationals as "p/q" (or "p") strings and
//! polynomials in the FieldSpecFile syntax. Only nonzero components are
//! listed; `shape` fixes the rest. Floats appear only in `sup_norm` and
//! `max_deviation` fields.

use std::collections::BTreeMap;

use curvlab::orbits::NamedBlock;
use curvlab::polyfield::{fmt_q, index_tuples};
use curvlab::{PolyMatrix, TensorField};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const REPORT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub format_version: u32,
    pub operation: Operation,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputDigest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<Block>,
    /// Largest absolute coefficient over all blocks (equivalence: of the
    /// invariant difference).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub differing: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub properties: Vec<PropertyResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureDump>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq, Default)]
#[serde(deny_unknown_fields)]
pub struct Operation {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct InputDigest {
    pub role: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(role: &str, bytes: &[u8]) -> Self {
        InputDigest { role: role.into(), sha256: hex::encode(Sha256::digest(bytes)) }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub name: String,
    pub shape: Vec<usize>,
    /// 1-based comma-joined index → exact value.
    pub components: BTreeMap<String, String>,
    pub sup_norm: f64,
}

fn key(idx: &[usize]) -> String {
    idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

impl Block {
    pub fn from_tensor(name: &str, t: &TensorField) -> Self {
        let shape = t.dims();
        let mut components = BTreeMap::new();
        for (idx, p) in index_tuples(&shape).iter().zip(t.components()) {
            if !p.is_zero() {
                components.insert(key(idx), p.to_string());
            }
        }
        Block { name: name.into(), shape, components, sup_norm: t.max_abs_coefficient() }
    }

    /// A family of matrices indexed by `outer`, flattened row-major.
    pub fn from_matrices(name: &str, outer: &[usize], ms: &[PolyMatrix]) -> Self {
        let (r, c) = ms.first().map(PolyMatrix::shape).unwrap_or((0, 0));
        let mut shape = outer.to_vec();
        shape.extend([r, c]);
        let mut components = BTreeMap::new();
        let mut sup = 0.0f64;
        for (o, mat) in index_tuples(outer).iter().zip(ms) {
            sup = sup.max(mat.max_abs_coefficient());
            for i in 0..r {
                for j in 0..c {
                    let p = &mat[(i, j)];
                    if !p.is_zero() {
                        let mut idx = o.clone();
                        idx.extend([i, j]);
                        components.insert(key(&idx), p.to_string());
                    }
                }
            }
        }
        Block { name: name.into(), shape, components, sup_norm: sup }
    }

    pub fn from_named(prefix: &str, b: &NamedBlock) -> Self {
        let mut components = BTreeMap::new();
        for (idx, v) in index_tuples(&b.shape).iter().zip(&b.values) {
            if !v.is_zero() {
                components.insert(key(idx), fmt_q(v));
            }
        }
        Block { name: format!("{prefix}{}", b.name), shape: b.shape.clone(), components, sup_norm: b.sup_norm() }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PropertyResult {
    pub name: String,
    pub instances: usize,
    /// 0 for exact checks that hold; relative error for the oracle.
    pub max_deviation: f64,
    pub exact: bool,
    pub passed: bool,
}

/// The lowest-index failing instance of a verify run.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FailureDump {
    pub property: String,
    pub instance: usize,
    pub instance_seed: u64,
    /// Command reproducing exactly this instance.
    pub replay: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Timing {
    pub elapsed_ms: f64,
}

impl ReportFile {
    pub fn new(operation: Operation) -> Self {
        ReportFile {
            format_version: REPORT_VERSION,
            operation,
            inputs: Vec::new(),
            case: None,
            blocks: Vec::new(),
            sup_norm: None,
            verdict: None,
            differing: Vec::new(),
            properties: Vec::new(),
            failure: None,
            notes: Vec::new(),
            timing: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> crate::error::Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            crate::error::CliError::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })
    }

    /// Sets `sup_norm` to the largest block norm.
    pub fn finish_blocks(&mut self) {
        self.sup_norm = Some(self.blocks.iter().map(|b| b.sup_norm).fold(0.0, f64::max));
    }
}
