//! JSON forms of systems, block operators, star specifications and operator
//! pairs. Complex entries are `[re, im]` pairs (a bare number is accepted on
//! input as a real entry). Matrices are lists of rows; a subspace is a list
//! of basis column vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::g_construction::BlockOperator;
use crate::numerics::{c64, ComplexMatrix, Tolerance};
use crate::star_b::{ProjectorFamily, StarParams};
use crate::subspace_system::SubspaceSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

impl Entry {
    fn value(self) -> crate::C64 {
        match self {
            Entry::Complex([re, im]) => c64(re, im),
            Entry::Real(re) => c64(re, 0.0),
        }
    }
}

pub type MatrixJson = Vec<Vec<Entry>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Entry::Complex([m[(i, j)].re, m[(i, j)].im])).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Format("matrix rows have different lengths".into()));
    }
    Ok(ComplexMatrix::from_fn(n, cols, |i, j| rows[i][j].value()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub ambient_dim: usize,
    /// Per subspace, the basis vectors (columns), each of length `ambient_dim`.
    pub subspaces: Vec<Vec<Vec<Entry>>>,
}

impl From<&SubspaceSystem> for SystemJson {
    fn from(s: &SubspaceSystem) -> Self {
        SystemJson {
            ambient_dim: s.ambient_dim(),
            subspaces: s
                .bases()
                .iter()
                .map(|b| {
                    b.column_iter()
                        .map(|c| c.iter().map(|z| Entry::Complex([z.re, z.im])).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

impl SystemJson {
    pub fn to_system(&self, tol: Tolerance) -> Result<SubspaceSystem> {
        let d = self.ambient_dim;
        let bases = self
            .subspaces
            .iter()
            .enumerate()
            .map(|(k, cols)| {
                if cols.iter().any(|c| c.len() != d) {
                    return Err(Error::Format(format!(
                        "subspace {k}: every basis vector needs {d} entries"
                    )));
                }
                Ok(ComplexMatrix::from_fn(d, cols.len(), |i, j| cols[j][i].value()))
            })
            .collect::<Result<Vec<_>>>()?;
        SubspaceSystem::new(d, bases, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOperatorJson {
    pub block_dims: Vec<usize>,
    pub matrix: MatrixJson,
}

impl From<&BlockOperator> for BlockOperatorJson {
    fn from(b: &BlockOperator) -> Self {
        BlockOperatorJson {
            block_dims: b.block_dims().to_vec(),
            matrix: matrix_to_json(b.matrix()),
        }
    }
}

impl BlockOperatorJson {
    pub fn to_operator(&self, tol: Tolerance) -> Result<BlockOperator> {
        BlockOperator::new(self.block_dims.clone(), matrix_from_json(&self.matrix)?, tol)
    }
}

/// `{ "m", "r", "tau", "dim0"?, "projectors"? }`; the projectors may be
/// omitted when only the angles matter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarSpecJson {
    pub m: usize,
    pub r: usize,
    pub tau: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim0: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projectors: Option<Vec<MatrixJson>>,
}

impl StarSpecJson {
    pub fn new(params: &StarParams, fam: Option<&ProjectorFamily>) -> Self {
        StarSpecJson {
            m: params.m,
            r: params.r,
            tau: params.tau.clone(),
            dim0: fam.map(ProjectorFamily::dim0),
            projectors: fam.map(|f| f.projectors().iter().map(matrix_to_json).collect()),
        }
    }

    pub fn params(&self) -> Result<StarParams> {
        StarParams::new(self.m, self.r, self.tau.clone())
    }

    /// The projector family, if the spec carries one.
    pub fn family(&self, tol: Tolerance) -> Result<Option<ProjectorFamily>> {
        let Some(list) = &self.projectors else {
            return Ok(None);
        };
        let qs = list.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        let dim0 = match (self.dim0, qs.first()) {
            (Some(d), _) => d,
            (None, Some(q)) => q.nrows(),
            (None, None) => 1,
        };
        ProjectorFamily::new(dim0, qs, tol).map(Some)
    }
}

/// Pair of self-adjoint operators for the three-subspace embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WildPairJson {
    pub a: MatrixJson,
    pub b: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}
