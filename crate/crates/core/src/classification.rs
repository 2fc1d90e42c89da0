//! Classification of irreducible star systems by the angle cosines `τ`.
//!
//! For `ξ = ξ(τ)` and the pair indices split into `M_l` (`τ_k² < ξ`), `M_e`
//! (`=`) and `M_g` (`>`):
//!
//! * `ξ < 0`: no nonzero system; `ξ = 0`: exactly one, of dimension `(m+r; 1)`;
//! * `ξ > 0`, `|M_l| ≤ 1`: finitely many systems with `dim H₀ = 1`;
//! * `ξ > 0`, `|M_l| = 2`: additionally a one-parameter family with
//!   `dim H₀ = 2`, parametrised by the angle `φ` between `Im R_a` and `Im R_b`;
//! * `ξ > 0`, `|M_l| ≥ 3`: wild.
//!
//! Equalities are decided with an absolute band `eq_tol` on squared cosines.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::g_construction::construct;
use crate::irreducibility::{family_irreducible_q, system_irreducible};
use crate::numerics::{from_real_rows, min_eigenvalue, Tolerance};
use crate::star_b::{assemble, criterion_matrix, kernel_dim_formula, ProjectorFamily, StarParams};
use crate::subspace_system::{GeneralizedDimension, RelationReport};

/// Default width of the equality band on squared cosines.
pub const DEFAULT_EQ_TOL: f64 = 1e-12;

/// Angle cosines before commuting pairs with unequal angles are split.
#[derive(Debug, Clone, PartialEq)]
pub struct RawAngles {
    pub tau_pairs: Vec<(f64, f64)>,
    pub tau_rays: Vec<f64>,
}

impl RawAngles {
    pub fn m(&self) -> usize {
        self.tau_pairs.len()
    }

    pub fn r(&self) -> usize {
        self.tau_rays.len()
    }
}

/// Two commuting subspaces at different angles to the hub are orthogonal,
/// so a pair whose cosines differ by more than `gap_tol` becomes two rays.
/// Kept pairs come first, then the original rays, then the split pairs.
pub fn normalize(raw: &RawAngles, gap_tol: f64) -> Result<StarParams> {
    let mut pairs = Vec::new();
    let mut split = Vec::new();
    for &(a, b) in &raw.tau_pairs {
        if (a - b).abs() > gap_tol {
            split.push(a);
            split.push(b);
        } else {
            pairs.push(0.5 * (a + b));
        }
    }
    let m = pairs.len();
    let r = raw.r() + split.len();
    let mut tau = pairs;
    tau.extend_from_slice(&raw.tau_rays);
    tau.extend(split);
    StarParams::new(m, r, tau)
}

/// Split of the pair indices `0..m` by comparing `τ_k²` with `ξ(τ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexPartition {
    pub m_l: Vec<usize>,
    pub m_e: Vec<usize>,
    pub m_g: Vec<usize>,
}

impl IndexPartition {
    /// Pair order with `M_l` first, then `M_e`, then `M_g`.
    pub fn canonical_order(&self) -> Vec<usize> {
        self.m_l.iter().chain(&self.m_e).chain(&self.m_g).copied().collect()
    }
}

pub fn partition(params: &StarParams, eq_tol: f64) -> IndexPartition {
    let xi = params.xi();
    let mut p = IndexPartition {
        m_l: Vec::new(),
        m_e: Vec::new(),
        m_g: Vec::new(),
    };
    for k in 0..params.m {
        let d = params.tau[k] * params.tau[k] - xi;
        if d.abs() <= eq_tol {
            p.m_e.push(k);
        } else if d < 0.0 {
            p.m_l.push(k);
        } else {
            p.m_g.push(k);
        }
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Empty,
    XiZeroUnique,
    Finite,
    TameFamily,
    Wild,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Empty => "empty",
            Regime::XiZeroUnique => "xi_zero_unique",
            Regime::Finite => "finite",
            Regime::TameFamily => "tame_family",
            Regime::Wild => "wild",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Number of systems in an item: a count, or a continuous family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemCount {
    Finite(usize),
    Family,
}

impl Serialize for ItemCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ItemCount::Finite(n) => s.serialize_u64(*n as u64),
            ItemCount::Family => s.serialize_str("family"),
        }
    }
}

/// Irreducible systems of one generalized dimension `(H; h)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassItem {
    pub count: ItemCount,
    pub gen_dim: (usize, usize),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_range: Option<(f64, f64)>,
    /// Case ids accepted by [`representative`], one per system (or the
    /// family id).
    pub cases: Vec<String>,
}

impl ClassItem {
    fn finite(gen_dim: (usize, usize), cases: Vec<String>) -> Self {
        ClassItem {
            count: ItemCount::Finite(cases.len()),
            gen_dim,
            phi_range: None,
            cases,
        }
    }

    /// Compact label such as `2x(5;1)` or `family(12;2)`.
    pub fn label(&self) -> String {
        let (h, d) = self.gen_dim;
        match self.count {
            ItemCount::Finite(n) => format!("{n}x({h};{d})"),
            ItemCount::Family => format!("family({h};{d})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub regime: Regime,
    pub xi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<IndexPartition>,
    pub items: Vec<ClassItem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_tau: Option<f64>,
    /// Constructive witness of wildness (the CLI command building it).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl ClassificationReport {
    pub fn item_for_case(&self, case: &str) -> Option<&ClassItem> {
        self.items.iter().find(|it| it.cases.iter().any(|c| c == case))
    }

    pub fn case_ids(&self) -> Vec<String> {
        self.items.iter().flat_map(|it| it.cases.iter().cloned()).collect()
    }
}

/// `η(τ) = (ξ − τ_a²)(ξ − τ_b²) / (τ_a² τ_b²)`.
pub fn eta(params: &StarParams, a: usize, b: usize) -> f64 {
    let xi = params.xi();
    let (ta, tb) = (params.tau[a].powi(2), params.tau[b].powi(2));
    (xi - ta) * (xi - tb) / (ta * tb)
}

/// Enumerates all nonzero irreducible systems for `params`.
pub fn classify(params: &StarParams, eq_tol: f64) -> ClassificationReport {
    let xi = params.xi();
    let (m, r) = (params.m, params.r);
    let mut report = ClassificationReport {
        regime: Regime::Empty,
        xi,
        partition: None,
        items: Vec::new(),
        phi_tau: None,
        eta_tau: None,
        witness: None,
    };
    if xi.abs() <= eq_tol {
        report.regime = Regime::XiZeroUnique;
        report.items.push(ClassItem::finite((m + r, 1), vec!["xi-zero".into()]));
        return report;
    }
    if xi < 0.0 {
        return report;
    }
    let part = partition(params, eq_tol);
    let mut base = vec!["all-zero".to_string()];
    base.extend(part.m_e.iter().map(|i| format!("equal:{i}")));
    let singles: Vec<String> = part.m_l.iter().map(|a| format!("single:{a}")).collect();

    match part.m_l.len() {
        0 => {
            report.regime = Regime::Finite;
            report.items.push(ClassItem::finite((m + r + 1, 1), base));
        }
        1 => {
            report.regime = Regime::Finite;
            report.items.push(ClassItem::finite((m + r + 1, 1), base));
            report.items.push(ClassItem::finite((m + r + 2, 1), singles));
        }
        2 => {
            report.regime = Regime::TameFamily;
            let (a, b) = (part.m_l[0], part.m_l[1]);
            let sum = params.tau[a].powi(2) + params.tau[b].powi(2);
            let family_dim = (2 * m + 2 * r + 4, 2);
            report.items.push(ClassItem::finite((m + r + 1, 1), base));
            if (sum - xi).abs() <= eq_tol {
                let mut cases = singles;
                cases.push("both".into());
                report.items.push(ClassItem::finite((m + r + 2, 1), cases));
                report.items.push(family_item(family_dim, 0.0));
            } else if sum < xi {
                report.items.push(ClassItem::finite((m + r + 2, 1), singles));
                report.items.push(ClassItem::finite((m + r + 3, 1), vec!["both".into()]));
                report.items.push(family_item(family_dim, 0.0));
            } else {
                let eta = eta(params, a, b);
                let phi = eta.sqrt().acos();
                report.eta_tau = Some(eta);
                report.phi_tau = Some(phi);
                report.items.push(ClassItem::finite((m + r + 2, 1), singles));
                report.items.push(family_item(family_dim, phi));
                report.items.push(ClassItem {
                    count: ItemCount::Finite(1),
                    gen_dim: (2 * m + 2 * r + 3, 2),
                    phi_range: Some((phi, phi)),
                    cases: vec!["family-critical".into()],
                });
            }
        }
        _ => {
            report.regime = Regime::Wild;
            report.witness = Some("wild-embed".into());
        }
    }
    report.partition = Some(part);
    report
}

fn family_item(gen_dim: (usize, usize), lo: f64) -> ClassItem {
    ClassItem {
        count: ItemCount::Family,
        gen_dim,
        phi_range: Some((lo, FRAC_PI_2)),
        cases: vec!["family".into()],
    }
}

/// `R₁ = diag(1, 0)` and `R₂` the projector onto `(cos φ, sin φ)`.
pub fn two_projections(phi: f64) -> (crate::ComplexMatrix, crate::ComplexMatrix) {
    let (s, c) = phi.sin_cos();
    (
        from_real_rows(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        from_real_rows(2, 2, &[c * c, c * s, c * s, s * s]),
    )
}

/// A projector family realising one enumerated system.
#[derive(Debug, Clone, PartialEq)]
pub struct Representative {
    pub case: String,
    pub phi: Option<f64>,
    pub family: ProjectorFamily,
    /// `(dim H; dim H₀, …, dim H₀)` with `dim H = (N+1)·dim H₀ − dim Ker B`.
    pub expected: GeneralizedDimension,
}

fn parse_index(case: &str, prefix: &str) -> Option<usize> {
    case.strip_prefix(prefix)?.parse().ok()
}

/// Builds the projector family for `case` (an id listed by [`classify`]).
/// `phi` is required for `family` and must lie in the open interval of the
/// family item; for `family-critical` it defaults to `φ(τ)`.
pub fn representative(
    params: &StarParams,
    case: &str,
    phi: Option<f64>,
    eq_tol: f64,
    tol: Tolerance,
) -> Result<Representative> {
    let report = classify(params, eq_tol);
    let item = report
        .item_for_case(case)
        .ok_or_else(|| Error::UnknownCase(format!(
            "case '{case}' is not listed for this τ (regime {}); available: [{}]",
            report.regime,
            report.case_ids().join(", ")
        )))?;
    let m = params.m;
    let scalar = |complement: &[usize]| {
        let flags: Vec<bool> = (0..m).map(|k| complement.contains(&k)).collect();
        ProjectorFamily::scalar(&flags)
    };
    let mut used_phi = None;
    let family = if case == "xi-zero" || case == "all-zero" {
        scalar(&[])
    } else if let Some(i) = parse_index(case, "equal:").or_else(|| parse_index(case, "single:")) {
        scalar(&[i])
    } else if case == "both" {
        scalar(&report.partition.as_ref().expect("tame regime has a partition").m_l)
    } else {
        let part = report.partition.as_ref().expect("tame regime has a partition");
        let (lo, hi) = item.phi_range.expect("family items carry a range");
        let phi = if case == "family-critical" {
            match phi {
                Some(p) if (p - lo).abs() > 1e-12 => {
                    return Err(Error::Parameter(format!(
                        "the critical system exists only at φ = φ(τ) = {lo}, got {p}"
                    )))
                }
                _ => lo,
            }
        } else {
            let p = phi.ok_or_else(|| Error::Parameter("the family needs --phi".into()))?;
            if !(p > lo && p < hi) {
                return Err(Error::Parameter(format!(
                    "φ = {p} lies outside the admissible interval ({lo}, {hi})"
                )));
            }
            p
        };
        used_phi = Some(phi);
        let (ra, rb) = two_projections(phi);
        let mut rs = vec![crate::ComplexMatrix::zeros(2, 2); m];
        rs[part.m_l[0]] = ra;
        rs[part.m_l[1]] = rb;
        ProjectorFamily::from_complements(2, rs, tol)?
    };
    let ker = kernel_dim_formula(params, &family, tol)?;
    let d0 = family.dim0();
    let expected = GeneralizedDimension::uniform(params.n_blocks() * d0 - ker, d0, params.n_blocks());
    Ok(Representative {
        case: case.to_string(),
        phi: used_phi,
        family,
        expected,
    })
}

/// Outcome of checking one representative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub criterion_min_eigenvalue: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relations: Option<RelationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_irreducible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system_irreducible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gen_dim: Option<GeneralizedDimension>,
    pub expected: GeneralizedDimension,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that `fam` satisfies the positivity criterion, that the system
/// built from `B(Q₁, …, Q_m)` satisfies every star relation, that both the
/// family and the system are irreducible and that the generalized dimension
/// is `expected`.
pub fn verify_representative(
    params: &StarParams,
    fam: &ProjectorFamily,
    expected: &GeneralizedDimension,
    tol: Tolerance,
) -> Result<VerificationReport> {
    let crit = criterion_matrix(params, fam)?;
    let mut report = VerificationReport {
        criterion_min_eigenvalue: min_eigenvalue(&crit, tol)?,
        relations: None,
        family_irreducible: None,
        system_irreducible: None,
        gen_dim: None,
        expected: expected.clone(),
        failures: Vec::new(),
    };
    if !crate::numerics::psd_check(&crit, tol)? {
        report.failures.push(format!(
            "positivity criterion Σ τ_k² R_k ≤ ξ(τ) I violated: λ_min(ξI − Σ τ_k² R_k) = {:.3e}",
            report.criterion_min_eigenvalue
        ));
        return Ok(report);
    }
    let system = construct(&assemble(params, fam, tol)?, tol)?;
    let relations = system.verify_relations(params, tol)?;
    for v in &relations.violations {
        report.failures.push(format!(
            "relation {:?} between subspaces {} and {} fails: residual {:.3e}",
            v.relation, v.i, v.j, v.residual
        ));
    }
    report.relations = Some(relations);

    let fam_irr = family_irreducible_q(fam, tol)?;
    if !fam_irr {
        report.failures.push("projector family is reducible".into());
    }
    report.family_irreducible = Some(fam_irr);
    let sys_irr = system_irreducible(&system, tol)?;
    if !sys_irr {
        report.failures.push("constructed system is reducible".into());
    }
    report.system_irreducible = Some(sys_irr);

    let gd = system.generalized_dimension();
    if &gd != expected {
        report
            .failures
            .push(format!("generalized dimension {gd} differs from expected {expected}"));
    }
    report.gen_dim = Some(gd);
    Ok(report)
}

/// Star with three commuting pairs and one ray, `τ = (τ₀, √2τ₀, 2τ₀, 3τ₀)`,
/// so that `ξ = 1 − 16τ₀²`.
pub fn example_star(tau0: f64) -> Result<StarParams> {
    StarParams::new(3, 1, vec![tau0, 2f64.sqrt() * tau0, 2.0 * tau0, 3.0 * tau0])
}

/// One sample of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub tau0: f64,
    pub xi: f64,
    pub regime: Regime,
    /// Space-separated item labels, e.g. `2x(5;1) 1x(6;1)`.
    pub items: String,
    pub phi_tau: Option<f64>,
    /// Set when some equality the classification branches on (`ξ = 0`,
    /// `τ_k² = ξ`, `τ_a² + τ_b² = ξ`) holds only within `eq_tol`.
    pub boundary: bool,
}

/// Evenly spaced samples `min, …, max`; a single step evaluates `min`.
pub fn sweep_points(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(min > 0.0 && max < 1.0 && min <= max) || (steps > 1 && min == max) {
        return Err(Error::Parameter(format!(
            "need 0 < min < max < 1 and steps ≥ 1 (min = max only with one step), got min = {min}, max = {max}, steps = {steps}"
        )));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let h = (max - min) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { max } else { min + h * i as f64 }).collect())
}

pub fn sweep_row(tau0: f64, params: &StarParams, eq_tol: f64) -> SweepRow {
    let report = classify(params, eq_tol);
    let xi = params.xi();
    let mut discriminants = vec![xi];
    discriminants.extend(params.tau[..params.m].iter().map(|t| t * t - xi));
    if let Some(part) = &report.partition {
        if part.m_l.len() == 2 {
            let (a, b) = (part.m_l[0], part.m_l[1]);
            discriminants.push(params.tau[a].powi(2) + params.tau[b].powi(2) - xi);
        }
    }
    SweepRow {
        tau0,
        xi,
        regime: report.regime,
        items: report.items.iter().map(ClassItem::label).collect::<Vec<_>>().join(" "),
        phi_tau: report.phi_tau,
        boundary: discriminants.iter().any(|d| d.abs() <= eq_tol),
    }
}

/// Classifies `family(τ₀)` at every sample, in parallel; rows keep the
/// order of `points`.
pub fn sweep<F>(points: &[f64], family: F, eq_tol: f64) -> Result<Vec<SweepRow>>
where
    F: Fn(f64) -> Result<StarParams> + Sync,
{
    points
        .par_iter()
        .map(|&t| Ok(sweep_row(t, &family(t)?, eq_tol)))
        .collect()
}
