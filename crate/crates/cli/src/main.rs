use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use starsys::classification::{
    classify, example_star, representative, sweep, sweep_points, verify_representative,
    DEFAULT_EQ_TOL,
};
use starsys::g_construction::{construct, gram_roundtrip};
use starsys::irreducibility::{commutant_dim, projector_sum_excess, wild_embed};
use starsys::json::{matrix_from_json, matrix_to_json, BlockOperatorJson, StarSpecJson, SystemJson, WildPairJson};
use starsys::numerics::kernel_basis;
use starsys::sampling;
use starsys::star_b::{assemble, kernel_dim_formula, ProjectorFamily, StarParams};
use starsys::subspace_system::GeneralizedDimension;
use starsys::{Error, Tolerance};

/// Default off-diagonal scale of the three-subspace embedding (ε = 0.1).
const DEFAULT_ALPHA: f64 = 0.04;

#[derive(Parser)]
#[command(name = "starsys", version, about = "Subspace systems on star graphs: classification, construction and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the irreducible systems for the given angles.
    Classify(ClassifyArgs),
    /// Classify a one-parameter family of stars, one CSV row per sample.
    Sweep(SweepArgs),
    /// Build the subspace system of a star operator or block operator.
    Construct(FamilyArgs),
    /// Check a projector family against its expected generalized dimension.
    Verify(FamilyArgs),
    /// Kernel of the star operator: basis plus formula and numerical counts.
    Kernel(FamilyArgs),
    /// Embed a pair of self-adjoint operators as three subspaces.
    WildEmbed(WildArgs),
}

#[derive(Args)]
struct Common {
    /// Relative tolerance for numerical rank, PSD and relation checks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StarArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Comma-separated angle cosines, pairs first, then rays.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    tau: Option<Vec<f64>>,
    /// JSON file: star spec (m, r, tau and optional projectors).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Absolute band on squared cosines for the equalities of the
    /// classification.
    #[arg(long, default_value_t = DEFAULT_EQ_TOL)]
    eq_tol: f64,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    star: StarArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    /// Parameter family: `paper-example` (alias `m3-r1`) is m = 3, r = 1,
    /// τ = (τ₀, √2τ₀, 2τ₀, 3τ₀).
    #[arg(long, default_value = "paper-example")]
    family: String,
    #[arg(long)]
    min: f64,
    #[arg(long)]
    max: f64,
    #[arg(long, default_value_t = 1)]
    steps: usize,
    #[arg(long, default_value_t = DEFAULT_EQ_TOL)]
    eq_tol: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct FamilyArgs {
    #[command(flatten)]
    star: StarArgs,
    /// Use the canonical representative of this case id (see `classify`).
    #[arg(long)]
    case: Option<String>,
    /// Angle between the two complements for the family cases.
    #[arg(long)]
    phi: Option<f64>,
    /// Expected generalized dimension "(H;h)" for `verify` with an explicit
    /// family.
    #[arg(long)]
    dim: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct WildArgs {
    /// JSON file with self-adjoint "a", "b" and optional "alpha".
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Seed for a random pair with ‖A‖ = ‖B‖ = alpha when no input is given.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Size of L for the random pair.
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[command(flatten)]
    common: Common,
}

/// Input problems exit with 2, failed checks with 1.
enum Failure {
    Validation(anyhow::Error),
    Verification(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Validation(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Validation(e.into())
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn tolerance(c: &Common) -> anyhow::Result<Tolerance> {
    Ok(Tolerance::new(c.tol, Tolerance::default().eps_abs)?)
}

fn emit(c: &Common, text: &str) -> anyhow::Result<()> {
    match &c.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(c: &Common, v: &Value) -> anyhow::Result<()> {
    emit(c, &(serde_json::to_string_pretty(v)? + "\n"))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Star parameters and the projector family carried by the input file, if any.
fn load_star(s: &StarArgs, tol: Tolerance) -> anyhow::Result<(StarParams, Option<ProjectorFamily>)> {
    if let Some(path) = &s.input {
        let spec: StarSpecJson = read_json(path)?;
        return Ok((spec.params()?, spec.family(tol)?));
    }
    let (Some(m), Some(r), Some(tau)) = (s.m, s.r, s.tau.clone()) else {
        bail!("give --input FILE or all of --m, --r and --tau");
    };
    Ok((StarParams::new(m, r, tau)?, None))
}

fn cmd_classify(a: &ClassifyArgs) -> CmdResult {
    let tol = tolerance(&a.common)?;
    let (params, _) = load_star(&a.star, tol)?;
    let report = classify(&params, a.star.eq_tol);
    let mut v = serde_json::to_value(&report).map_err(anyhow::Error::from)?;
    v["params"] = serde_json::to_value(&params).map_err(anyhow::Error::from)?;
    emit_json(&a.common, &v)?;
    Ok(())
}

fn family_params(name: &str, tau0: f64) -> starsys::Result<StarParams> {
    match name {
        "paper-example" | "m3-r1" => example_star(tau0),
        other => Err(Error::Parameter(format!("unknown family '{other}'"))),
    }
}

fn cmd_sweep(a: &SweepArgs) -> CmdResult {
    family_params(&a.family, 0.1)?;
    let points = sweep_points(a.min, a.max, a.steps)?;
    let rows = sweep(&points, |t| family_params(&a.family, t), a.eq_tol)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row).map_err(anyhow::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow!("{e}"))?;
    emit(&a.common, &String::from_utf8(bytes).map_err(anyhow::Error::from)?)?;
    Ok(())
}

/// The family to work on: the input file's projectors, or the representative
/// of `--case`. Returns it with the expected generalized dimension when known.
fn resolve_family(
    a: &FamilyArgs,
    params: &StarParams,
    from_file: Option<ProjectorFamily>,
    tol: Tolerance,
) -> anyhow::Result<(ProjectorFamily, Option<GeneralizedDimension>)> {
    let expected = a.dim.as_deref().map(|d| parse_dim(d, params.n_blocks())).transpose()?;
    match (&a.case, from_file) {
        (Some(case), None) => {
            let rep = representative(params, case, a.phi, a.star.eq_tol, tol)?;
            Ok((rep.family, expected.or(Some(rep.expected))))
        }
        (None, Some(fam)) => Ok((fam, expected)),
        (Some(_), Some(_)) => bail!("give either projectors in the input file or --case, not both"),
        (None, None) => bail!("no projector family: give --case or projectors in --input"),
    }
}

/// Parses "(H;h)" into a uniform generalized dimension for `n` subspaces.
fn parse_dim(text: &str, n: usize) -> anyhow::Result<GeneralizedDimension> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    let (h, d) = inner
        .split_once(';')
        .ok_or_else(|| anyhow!("dimension must look like (H;h), got '{text}'"))?;
    Ok(GeneralizedDimension::uniform(h.trim().parse()?, d.trim().parse()?, n))
}

fn is_block_operator_file(path: &PathBuf) -> anyhow::Result<Option<BlockOperatorJson>> {
    let v: Value = read_json(path)?;
    if v.get("block_dims").is_some() {
        return Ok(Some(serde_json::from_value(v)?));
    }
    Ok(None)
}

fn cmd_construct(a: &FamilyArgs) -> CmdResult {
    let tol = tolerance(&a.common)?;
    if let Some(path) = &a.star.input {
        if let Some(bj) = is_block_operator_file(path)? {
            let b = bj.to_operator(tol)?;
            let system = match construct(&b, tol) {
                Ok(s) => s,
                Err(e @ Error::NotPsd { .. }) => return Err(Failure::Verification(e.to_string())),
                Err(e) => return Err(e.into()),
            };
            let residual = gram_roundtrip(&b, tol)?;
            emit_json(
                &a.common,
                &json!({
                    "system": SystemJson::from(&system),
                    "gen_dim": system.generalized_dimension().to_string(),
                    "gram_residual": residual,
                }),
            )?;
            return Ok(());
        }
    }
    let (params, from_file) = load_star(&a.star, tol)?;
    let (fam, _) = resolve_family(a, &params, from_file, tol)?;
    let b = assemble(&params, &fam, tol)?;
    let system = match construct(&b, tol) {
        Ok(s) => s,
        Err(e @ Error::NotPsd { .. }) => return Err(Failure::Verification(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let report = system.verify_relations(&params, tol)?;
    emit_json(
        &a.common,
        &json!({
            "system": SystemJson::from(&system),
            "gen_dim": system.generalized_dimension().to_string(),
            "verification": report,
        }),
    )?;
    if report.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} relation violations", report.violations.len())))
    }
}

fn cmd_verify(a: &FamilyArgs) -> CmdResult {
    let tol = tolerance(&a.common)?;
    let (params, from_file) = load_star(&a.star, tol)?;
    let (fam, expected) = resolve_family(a, &params, from_file, tol)?;
    let expected = expected.ok_or_else(|| anyhow!("an explicit family needs --dim (H;h)"))?;
    let report = verify_representative(&params, &fam, &expected, tol)?;
    emit_json(
        &a.common,
        &json!({ "passed": report.passed(), "report": report }),
    )?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(report.failures.join("; ")))
    }
}

fn cmd_kernel(a: &FamilyArgs) -> CmdResult {
    let tol = tolerance(&a.common)?;
    let (params, from_file) = load_star(&a.star, tol)?;
    let (fam, _) = resolve_family(a, &params, from_file, tol)?;
    let b = assemble(&params, &fam, tol)?;
    let basis = kernel_basis(b.matrix(), tol)?;
    let formula = kernel_dim_formula(&params, &fam, tol);
    let mut out = json!({
        "numeric": basis.ncols(),
        "kernel_basis": matrix_to_json(&basis),
    });
    match &formula {
        Ok(n) => out["formula"] = json!(n),
        Err(e) => {
            out["formula"] = Value::Null;
            out["formula_error"] = json!(e.to_string());
        }
    }
    emit_json(&a.common, &out)?;
    match formula {
        Ok(n) if n == basis.ncols() => Ok(()),
        Ok(n) => Err(Failure::Verification(format!(
            "formula gives {n}, numerical kernel has dimension {}",
            basis.ncols()
        ))),
        Err(e) => Err(Failure::Verification(e.to_string())),
    }
}

fn cmd_wild(a: &WildArgs) -> CmdResult {
    let tol = tolerance(&a.common)?;
    let (am, bm, alpha) = match &a.input {
        Some(path) => {
            let pair: WildPairJson = read_json(path)?;
            let alpha = a.alpha.or(pair.alpha).unwrap_or(DEFAULT_ALPHA);
            (matrix_from_json(&pair.a)?, matrix_from_json(&pair.b)?, alpha)
        }
        None => {
            let alpha = a.alpha.unwrap_or(DEFAULT_ALPHA);
            if a.dim == 0 {
                return Err(Failure::Validation(anyhow!("--dim must be positive")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let am = sampling::hermitian(&mut rng, a.dim, alpha);
            let bm = sampling::hermitian(&mut rng, a.dim, alpha);
            (am, bm, alpha)
        }
    };
    let system = wild_embed(&am, &bm, alpha, tol)?;
    let dim = commutant_dim(system.ambient_dim(), &system.projectors(), tol)?;
    let pair_dim = commutant_dim(am.nrows(), &[am.clone(), bm.clone()], tol)?;
    emit_json(
        &a.common,
        &json!({
            "alpha": alpha,
            "a": matrix_to_json(&am),
            "b": matrix_to_json(&bm),
            "system": SystemJson::from(&system),
            "commutant_dim": dim,
            "pair_commutant_dim": pair_dim,
            "sum_excess": projector_sum_excess(&system),
        }),
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Kernel(a) => cmd_kernel(a),
        Command::WildEmbed(a) => cmd_wild(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
