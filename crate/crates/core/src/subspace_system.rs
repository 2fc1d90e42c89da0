//! Systems of subspaces `S = (H; H₁, …, Hₙ)` of `C^d`, their Gram operators,
//! and the pairwise angle / commutation / orthogonality relations checked
//! directly on the orthoprojectors.
//!
//! Subspaces are stored as orthonormal bases; a basis with zero columns is
//! the zero subspace. Projectors are formed on demand. All indices are
//! 0-based.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    op_norm, orthonormal_range, orthonormality_defect, real, ComplexMatrix, Tolerance,
};
use crate::star_b::{PairRelation, StarParams};

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSystem {
    ambient_dim: usize,
    bases: Vec<ComplexMatrix>,
}

/// Gram operator `G(S)`: block `(i, j)` is `Bᵢ* Bⱼ` for the stored bases.
#[derive(Debug, Clone, PartialEq)]
pub struct GramOperator {
    pub block_dims: Vec<usize>,
    pub matrix: ComplexMatrix,
}

/// `(dim H; dim H₁, …, dim Hₙ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GeneralizedDimension {
    pub ambient: usize,
    pub parts: Vec<usize>,
}

impl GeneralizedDimension {
    pub fn new(ambient: usize, parts: Vec<usize>) -> Self {
        GeneralizedDimension { ambient, parts }
    }

    /// Uniform dimension vector `(ambient; part, …, part)`.
    pub fn uniform(ambient: usize, part: usize, n: usize) -> Self {
        GeneralizedDimension {
            ambient,
            parts: vec![part; n],
        }
    }

    /// `(dim H, dim H₁)` when all parts coincide.
    pub fn collapsed(&self) -> Option<(usize, usize)> {
        let first = *self.parts.first()?;
        self.parts
            .iter()
            .all(|&p| p == first)
            .then_some((self.ambient, first))
    }
}

impl fmt::Display for GeneralizedDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.collapsed() {
            Some((h, p)) => write!(f, "({h};{p})"),
            None => {
                let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
                write!(f, "({};{})", self.ambient, parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relation {
    Angle { tau: f64 },
    Commute,
    Orthogonal,
}

impl From<PairRelation> for Relation {
    fn from(r: PairRelation) -> Self {
        match r {
            PairRelation::Angle(tau) => Relation::Angle { tau },
            PairRelation::Commute => Relation::Commute,
            PairRelation::Orthogonal => Relation::Orthogonal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationViolation {
    pub i: usize,
    pub j: usize,
    pub relation: Relation,
    pub residual: f64,
}

/// Result of checking every pair of a system against the star relations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    pub pairs_checked: usize,
    pub threshold: f64,
    pub max_residual: f64,
    pub violations: Vec<RelationViolation>,
}

impl RelationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Threshold for relation residuals; every operand is a projector, so the
/// natural scale is 1.
pub fn relation_threshold(tol: Tolerance) -> f64 {
    tol.threshold(1.0)
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("angle cosine τ = {tau} must lie in (0, 1)")))
    }
}

impl SubspaceSystem {
    /// Validates shapes and orthonormality of each basis.
    pub fn new(ambient_dim: usize, bases: Vec<ComplexMatrix>, tol: Tolerance) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::Parameter("a system needs at least one subspace".into()));
        }
        for (index, b) in bases.iter().enumerate() {
            if b.nrows() != ambient_dim {
                return Err(Error::Shape(format!(
                    "basis {index} has {} rows, ambient dimension is {ambient_dim}",
                    b.nrows()
                )));
            }
            let deviation = orthonormality_defect(b);
            if deviation > tol.threshold(1.0) {
                return Err(Error::NotOrthonormal { index, deviation });
            }
        }
        Ok(SubspaceSystem { ambient_dim, bases })
    }

    /// Builds a system from arbitrary spanning sets by orthonormalizing each.
    pub fn from_spanning_sets(
        ambient_dim: usize,
        spans: &[ComplexMatrix],
        tol: Tolerance,
    ) -> Result<Self> {
        for (k, s) in spans.iter().enumerate() {
            if s.nrows() != ambient_dim {
                return Err(Error::Shape(format!(
                    "spanning set {k} has {} rows, ambient dimension is {ambient_dim}",
                    s.nrows()
                )));
            }
        }
        let bases = spans.iter().map(|s| orthonormal_range(s, tol)).collect();
        SubspaceSystem::new(ambient_dim, bases, tol)
    }

    pub(crate) fn from_bases_unchecked(ambient_dim: usize, bases: Vec<ComplexMatrix>) -> Self {
        SubspaceSystem { ambient_dim, bases }
    }

    /// The zero system `(C^d; 0, …, 0)` with `n` subspaces.
    pub fn zero(ambient_dim: usize, n: usize) -> Self {
        SubspaceSystem {
            ambient_dim,
            bases: vec![ComplexMatrix::zeros(ambient_dim, 0); n.max(1)],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn basis(&self, k: usize) -> &ComplexMatrix {
        &self.bases[k]
    }

    pub fn bases(&self) -> &[ComplexMatrix] {
        &self.bases
    }

    pub fn subspace_dim(&self, k: usize) -> usize {
        self.bases[k].ncols()
    }

    pub fn projector(&self, k: usize) -> ComplexMatrix {
        let b = &self.bases[k];
        b * b.adjoint()
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        (0..self.len()).map(|k| self.projector(k)).collect()
    }

    /// Image of the system under a unitary `u` of size `ambient_dim`.
    pub fn transformed(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.ambient_dim || u.ncols() != self.ambient_dim {
            return Err(Error::Shape("unitary must match the ambient dimension".into()));
        }
        Ok(SubspaceSystem {
            ambient_dim: self.ambient_dim,
            bases: self.bases.iter().map(|b| u * b).collect(),
        })
    }

    /// Orthogonal direct sum `S ⊕ S'` on `C^{d + d'}`.
    pub fn direct_sum(&self, other: &SubspaceSystem) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "direct sum of systems with {} and {} subspaces",
                self.len(),
                other.len()
            )));
        }
        let (d1, d2) = (self.ambient_dim, other.ambient_dim);
        let bases = self
            .bases
            .iter()
            .zip(&other.bases)
            .map(|(a, b)| crate::numerics::direct_sum(&[a.clone(), b.clone()]))
            .collect();
        Ok(SubspaceSystem {
            ambient_dim: d1 + d2,
            bases,
        })
    }

    pub fn gram(&self) -> GramOperator {
        let block_dims: Vec<usize> = self.bases.iter().map(|b| b.ncols()).collect();
        let total: usize = block_dims.iter().sum();
        let mut stacked = ComplexMatrix::zeros(self.ambient_dim, total);
        let mut col = 0;
        for b in &self.bases {
            stacked.columns_mut(col, b.ncols()).copy_from(b);
            col += b.ncols();
        }
        GramOperator {
            block_dims,
            matrix: stacked.adjoint() * stacked,
        }
    }

    pub fn generalized_dimension(&self) -> GeneralizedDimension {
        GeneralizedDimension {
            ambient: self.ambient_dim,
            parts: self.bases.iter().map(|b| b.ncols()).collect(),
        }
    }

    fn pair(&self, i: usize, j: usize) -> Result<()> {
        let n = self.len();
        if i >= n || j >= n {
            return Err(Error::Parameter(format!(
                "subspace index out of range: ({i}, {j}) with n = {n}"
            )));
        }
        if i == j {
            return Err(Error::Parameter(format!("relation needs distinct indices, got {i} twice")));
        }
        Ok(())
    }

    /// `max(‖PᵢPⱼPᵢ − τ²Pᵢ‖, ‖PⱼPᵢPⱼ − τ²Pⱼ‖)`.
    pub fn angle_residual(&self, i: usize, j: usize, tau: f64) -> Result<f64> {
        self.pair(i, j)?;
        check_tau(tau)?;
        let (pi, pj) = (self.projector(i), self.projector(j));
        let t2 = real(tau * tau);
        let ri = op_norm(&(&pi * &pj * &pi - &pi * t2));
        let rj = op_norm(&(&pj * &pi * &pj - &pj * t2));
        Ok(ri.max(rj))
    }

    /// `‖PᵢPⱼ − PⱼPᵢ‖`.
    pub fn commute_residual(&self, i: usize, j: usize) -> Result<f64> {
        self.pair(i, j)?;
        let (pi, pj) = (self.projector(i), self.projector(j));
        Ok(op_norm(&(&pi * &pj - &pj * &pi)))
    }

    /// `‖PᵢPⱼ‖`, computed as `‖Bᵢ*Bⱼ‖` for orthonormal bases.
    pub fn orthogonal_residual(&self, i: usize, j: usize) -> Result<f64> {
        self.pair(i, j)?;
        Ok(op_norm(&(self.bases[i].adjoint() * &self.bases[j])))
    }

    pub fn check_angle(&self, i: usize, j: usize, tau: f64, tol: Tolerance) -> Result<bool> {
        Ok(self.angle_residual(i, j, tau)? <= relation_threshold(tol))
    }

    pub fn check_commute(&self, i: usize, j: usize, tol: Tolerance) -> Result<bool> {
        Ok(self.commute_residual(i, j)? <= relation_threshold(tol))
    }

    pub fn check_orthogonal(&self, i: usize, j: usize, tol: Tolerance) -> Result<bool> {
        Ok(self.orthogonal_residual(i, j)? <= relation_threshold(tol))
    }

    pub fn relation_residual(&self, i: usize, j: usize, relation: Relation) -> Result<f64> {
        match relation {
            Relation::Angle { tau } => self.angle_residual(i, j, tau),
            Relation::Commute => self.commute_residual(i, j),
            Relation::Orthogonal => self.orthogonal_residual(i, j),
        }
    }

    /// Checks the hub/leaf angle relations, the commutation of each branch
    /// pair and orthogonality of every other pair. An empty report means the
    /// system belongs to the class defined by `params`.
    pub fn verify_relations(&self, params: &StarParams, tol: Tolerance) -> Result<RelationReport> {
        let n = params.n_blocks();
        if self.len() != n {
            return Err(Error::Shape(format!(
                "star with N = {} needs {n} subspaces, system has {}",
                params.n_leaves(),
                self.len()
            )));
        }
        let threshold = relation_threshold(tol);
        let mut report = RelationReport {
            pairs_checked: 0,
            threshold,
            max_residual: 0.0,
            violations: Vec::new(),
        };
        for i in 0..n {
            for j in i + 1..n {
                let relation = Relation::from(params.relation(i, j));
                let residual = self.relation_residual(i, j, relation)?;
                report.pairs_checked += 1;
                report.max_residual = report.max_residual.max(residual);
                if residual > threshold {
                    report.violations.push(RelationViolation {
                        i,
                        j,
                        relation,
                        residual,
                    });
                }
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::from_real_rows;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn lines(phi: f64) -> SubspaceSystem {
        SubspaceSystem::new(
            2,
            vec![
                from_real_rows(2, 1, &[1.0, 0.0]),
                from_real_rows(2, 1, &[phi.cos(), phi.sin()]),
            ],
            tol(),
        )
        .unwrap()
    }

    fn coincident() -> SubspaceSystem {
        let e1 = from_real_rows(2, 1, &[1.0, 0.0]);
        SubspaceSystem::new(2, vec![e1.clone(), e1], tol()).unwrap()
    }

    #[test]
    fn gram_examples() {
        let orth = lines(std::f64::consts::FRAC_PI_2);
        assert!((orth.gram().matrix - crate::numerics::identity(2)).norm() < 1e-15);

        let phi = 0.4_f64;
        let g = lines(phi).gram();
        let expected = from_real_rows(2, 2, &[1.0, phi.cos(), phi.cos(), 1.0]);
        assert!((g.matrix - expected).norm() < 1e-15);
        assert_eq!(g.block_dims, vec![1, 1]);

        let g = coincident().gram();
        assert!((g.matrix - from_real_rows(2, 2, &[1.0; 4])).norm() < 1e-15);
    }

    #[test]
    fn angle_checks() {
        let phi = 0.9_f64;
        assert!(lines(phi).check_angle(0, 1, phi.cos(), tol()).unwrap());
        assert!(!lines(std::f64::consts::FRAC_PI_2)
            .check_angle(0, 1, 0.3, tol())
            .unwrap());
        assert!(!coincident().check_angle(0, 1, 0.5, tol()).unwrap());
        assert!(matches!(
            lines(phi).check_angle(0, 1, 1.0, tol()),
            Err(Error::Parameter(_))
        ));
        assert!(lines(phi).check_angle(0, 0, 0.5, tol()).is_err());
    }

    #[test]
    fn commute_checks() {
        // coordinate subspaces of C³
        let e = |k: usize| {
            let mut m = ComplexMatrix::zeros(3, 1);
            m[(k, 0)] = real(1.0);
            m
        };
        let coord = SubspaceSystem::new(
            3,
            vec![
                crate::numerics::direct_sum(&[from_real_rows(2, 2, &[1.0, 0.0, 0.0, 1.0]), ComplexMatrix::zeros(1, 0)]),
                e(1),
            ],
            tol(),
        )
        .unwrap();
        assert!(coord.check_commute(0, 1, tol()).unwrap());

        // [P₁, P₂] for lines at angle φ has norm cos φ sin φ
        let phi = 0.6_f64;
        let r = lines(phi).commute_residual(0, 1).unwrap();
        assert!((r - phi.cos() * phi.sin()).abs() < 1e-14);
        assert!(!lines(phi).check_commute(0, 1, tol()).unwrap());
        assert!(lines(std::f64::consts::FRAC_PI_2)
            .check_commute(0, 1, tol())
            .unwrap());
    }

    #[test]
    fn orthogonal_checks() {
        let phi = 0.6_f64;
        assert!(lines(std::f64::consts::FRAC_PI_2)
            .check_orthogonal(0, 1, tol())
            .unwrap());
        let r = lines(phi).orthogonal_residual(0, 1).unwrap();
        assert!((r - phi.cos()).abs() < 1e-14);
        assert!(!lines(phi).check_orthogonal(0, 1, tol()).unwrap());
        assert!(!coincident().check_orthogonal(0, 1, tol()).unwrap());
    }

    #[test]
    fn generalized_dimensions() {
        assert_eq!(
            lines(0.3).generalized_dimension(),
            GeneralizedDimension::new(2, vec![1, 1])
        );
        assert_eq!(lines(0.3).generalized_dimension().to_string(), "(2;1)");
        let z = SubspaceSystem::zero(3, 4);
        assert_eq!(z.generalized_dimension(), GeneralizedDimension::new(3, vec![0; 4]));
        let mixed = GeneralizedDimension::new(3, vec![1, 2]);
        assert_eq!(mixed.to_string(), "(3;1,2)");
        assert_eq!(mixed.collapsed(), None);
    }

    #[test]
    fn zero_system_satisfies_every_relation() {
        let params = StarParams::new(1, 1, vec![0.5, 0.3]).unwrap();
        let z = SubspaceSystem::zero(2, params.n_blocks());
        let report = z.verify_relations(&params, tol()).unwrap();
        assert!(report.is_empty());
        assert_eq!(report.pairs_checked, 6);
    }

    #[test]
    fn verify_relations_rejects_wrong_count() {
        let params = StarParams::new(1, 0, vec![0.5]).unwrap();
        assert!(matches!(
            lines(0.3).verify_relations(&params, tol()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn rejects_bad_bases() {
        let not_orth = from_real_rows(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            SubspaceSystem::new(2, vec![not_orth], tol()),
            Err(Error::NotOrthonormal { index: 0, .. })
        ));
        assert!(SubspaceSystem::new(3, vec![from_real_rows(2, 1, &[1.0, 0.0])], tol()).is_err());
        assert!(SubspaceSystem::new(3, vec![], tol()).is_err());
    }

    #[test]
    fn direct_sum_dimensions() {
        let s = lines(0.3).direct_sum(&lines(0.7)).unwrap();
        assert_eq!(s.generalized_dimension(), GeneralizedDimension::new(4, vec![2, 2]));
        assert!(s.check_commute(0, 1, tol()).is_ok());
    }
}
