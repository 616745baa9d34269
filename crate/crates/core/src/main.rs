//! Command-line front end: builds the deleted/kept sets, runs witness
//! pipelines, computes Gram bounds and trajectories, extracts arithmetic
//! progressions, and runs the duality and square-free checks. All outputs are
//! JSON (plus CSV characteristic-function samples); identical configurations
//! and seeds produce byte-identical files.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 not-found results
//! (e.g. no progression of the requested length in the window), 4 I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use rieszkit::construction::{
    box_coeffs, build_s, build_v, build_v_improved, bump_coeffs_l1, bump_l1_total, choose_delta,
    periodized_support, ramp_c_vectors, truncation_index, truncation_index_l1, verify_witness,
    verify_witness_ap, witness_poly, CoeffSequence, ConstructionError, WitnessParams,
};
use rieszkit::frequency_tools::{
    ap_census, density_bounds, example_set_a, example_set_b, extract_approx_ap,
    find_ap_fixed_diff, separation, squarefree_obstruction, squarefree_set, FreqError,
    FrequencySet,
};
use rieszkit::gram::{duality_check, random_projection, GramMatrix};
use rieszkit::interval_sets::{Interval, IntervalSet};
use rieszkit::report::{char_fn_csv, to_json_string, SCHEMA_VERSION};

#[derive(Parser)]
#[command(
    name = "rieszkit",
    version,
    about = "Interval-set constructions and exponential Gram spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the deleted set V and kept set S, with characteristic-function CSVs.
    BuildSet(BuildSetArgs),
    /// Run a witness pipeline and verify the energy bound on the kept set.
    Witness(WitnessArgs),
    /// Gram extremal eigenvalues for lattice frequencies, with sweeps.
    GramBounds(GramBoundsArgs),
    /// Extract an approximate arithmetic progression from a generated set.
    ApExtract(ApExtractArgs),
    /// Randomized projection duality trials (Bessel/frame/Riesz bounds).
    DualityCheck(DualityArgs),
    /// Square-free sieve: fixed-difference progression caps and density.
    SquarefreeCheck(SquarefreeArgs),
    /// Windowed Beurling-density estimates for a generated set.
    Density(DensityArgs),
}

/// Optional TOML file with the same keys as the common flags; flags override.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alpha: Option<f64>,
    epsilon: Option<f64>,
    #[serde(alias = "ell_max")]
    depth: Option<u32>,
    #[serde(rename = "R")]
    r: Option<u32>,
    eta: Option<f64>,
    #[serde(rename = "P")]
    p: Option<u64>,
    #[serde(rename = "K")]
    k: Option<i64>,
    limit: Option<u64>,
    improved: Option<bool>,
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// TOML config file; command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Truncation depth of the layer union.
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long = "R")]
    r: Option<u32>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long = "P")]
    p: Option<u64>,
    #[arg(long = "K")]
    k: Option<i64>,
    #[arg(long)]
    limit: Option<u64>,
    /// Use the multi-factor variant of the deleted set.
    #[arg(long)]
    improved: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct BuildSetArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of characteristic-function samples (at least 4096).
    #[arg(long, default_value_t = 4096)]
    grid: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, ValueEnum)]
enum WitnessMode {
    /// Box coefficients on an exact arithmetic progression.
    Box,
    /// Summable triangle coefficients on an extracted approximate progression.
    Bump,
}

#[derive(Copy, Clone, Debug, PartialEq, ValueEnum)]
enum LambdaGen {
    /// Frequencies written down directly as P*alpha*j + d.
    Ap,
    /// The lattice alpha*Z, truncated to [-K*alpha, K*alpha].
    Lattice,
    /// The mirrored block set with common difference P.
    ExampleA,
    /// The 100^k-strided set (bump mode only; its runs cap at length k).
    ExampleB,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Deletion-budget exponent: eta = epsilon / 2^k (ignored when --eta is given).
    #[arg(long, default_value_t = 1)]
    k_exp: u32,
    /// Progression offset d.
    #[arg(long, default_value_t = 0.0)]
    d: f64,
    #[arg(long, value_enum, default_value_t = WitnessMode::Box)]
    mode: WitnessMode,
    #[arg(long, value_enum, default_value_t = LambdaGen::Ap)]
    lambda: LambdaGen,
    /// Number of blocks for the example-a generator (block sizes 1..=blocks).
    #[arg(long, default_value_t = 11)]
    blocks: u32,
    /// Parameters of the example-b generator.
    #[arg(long, default_value_t = 5)]
    n_param: u64,
    #[arg(long, default_value_t = 4)]
    kmax: u32,
    /// Required multiple for the extracted common difference (bump mode).
    #[arg(long, default_value_t = 1)]
    lmult: u64,
}

#[derive(Args, Debug)]
struct GramBoundsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Use the full window instead of the kept set S.
    #[arg(long)]
    full_window: bool,
    /// Lattice step for the frequency set (default 1: the integers).
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// Depths to sweep (lambda_min per depth at fixed K).
    #[arg(long, value_delimiter = ',')]
    depth_sweep: Vec<u32>,
    /// Truncations K to sweep (lambda_min per K at fixed depth).
    #[arg(long, value_delimiter = ',')]
    k_sweep: Vec<i64>,
    /// Also dump the Gram matrix (JSON and row-major little-endian binary).
    #[arg(long)]
    dump_matrix: bool,
    /// Residue classes mod `--modulus` defining a periodic integer subset;
    /// reports the frame lower-bound estimate of its exponentials on the
    /// deleted set V at each truncation.
    #[arg(long, value_delimiter = ',')]
    residues: Vec<u64>,
    #[arg(long)]
    modulus: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, ValueEnum)]
enum SetGen {
    Lattice,
    ExampleA,
    ExampleB,
    Squarefree,
}

#[derive(Args, Debug)]
struct ApExtractArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = SetGen::ExampleA)]
    gen: SetGen,
    /// Number of blocks for example-a (block sizes 1..=blocks).
    #[arg(long, default_value_t = 11)]
    blocks: u32,
    /// Lattice step for the lattice generator.
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// Half-length of the progression (extracts 2m+1 members).
    #[arg(long, default_value_t = 5)]
    m: u32,
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    #[arg(long, default_value_t = 1)]
    lmult: u64,
    /// Also write the generated frequency set as set.json.
    #[arg(long)]
    dump_set: bool,
}

#[derive(Args, Debug)]
struct DualityArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: u32,
}

#[derive(Args, Debug)]
struct SquarefreeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Largest common difference P to check.
    #[arg(long, default_value_t = 10)]
    p_max: u64,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = SetGen::Lattice)]
    gen: SetGen,
    #[arg(long, default_value_t = 11)]
    blocks: u32,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// Parameter N of the example-b generator.
    #[arg(long, default_value_t = 5)]
    n_param: u64,
    /// Largest block index of the example-b generator.
    #[arg(long, default_value_t = 4)]
    kmax: u32,
    /// Window radii; default is a geometric grid fitted to the window.
    #[arg(long, value_delimiter = ',')]
    r_grid: Vec<f64>,
    /// Also write the generated frequency set as set.json.
    #[arg(long)]
    dump_set: bool,
}

enum Failure {
    Config(String),
    NotFound(String),
    Io(String),
    Internal(String),
}

impl Failure {
    fn exit(&self) -> ExitCode {
        let (code, tag, msg) = match self {
            Failure::Config(m) => (2, "invalid config", m),
            Failure::NotFound(m) => (3, "not found", m),
            Failure::Io(m) => (4, "io error", m),
            Failure::Internal(m) => (1, "internal error", m),
        };
        eprintln!("rieszkit: {tag}: {msg}");
        ExitCode::from(code)
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<rieszkit::gram::GramError> for Failure {
    fn from(e: rieszkit::gram::GramError) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn config_err(e: impl ToString) -> Failure {
    Failure::Config(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::BuildSet(a) => cmd_build_set(a),
        Command::Witness(a) => cmd_witness(a),
        Command::GramBounds(a) => cmd_gram_bounds(a),
        Command::ApExtract(a) => cmd_ap_extract(a),
        Command::DualityCheck(a) => cmd_duality(a),
        Command::SquarefreeCheck(a) => cmd_squarefree(a),
        Command::Density(a) => cmd_density(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.exit(),
    }
}

/// Resolved scalar parameters: flag value, else config-file value, else default.
#[derive(Debug, Clone, serde::Serialize)]
struct Resolved {
    alpha: f64,
    epsilon: f64,
    depth: u32,
    #[serde(rename = "R")]
    r: u32,
    eta: f64,
    #[serde(rename = "P")]
    p: u64,
    #[serde(rename = "K")]
    k: i64,
    limit: u64,
    improved: bool,
    seed: u64,
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig, Failure> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::Io(format!("reading {}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn resolve(common: &CommonArgs) -> Result<Resolved, Failure> {
    let file = load_file_config(&common.config)?;
    let alpha = common.alpha.or(file.alpha).unwrap_or(1.0);
    let epsilon = common.epsilon.or(file.epsilon).unwrap_or(0.5);
    if !(alpha.is_finite() && alpha > 0.0 && alpha <= 1.0) {
        return Err(Failure::Config(format!("alpha {alpha} must be in (0, 1]")));
    }
    if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
        return Err(Failure::Config(format!("epsilon {epsilon} must be in (0, 1)")));
    }
    // Smallest integer R with epsilon strictly below (R-1)/R; the floor can
    // land on the boundary in floating point, so bump until strict.
    let mut default_r = ((1.0 / (1.0 - epsilon)).floor() as u32).max(1) + 1;
    while epsilon >= (default_r as f64 - 1.0) / default_r as f64 {
        default_r += 1;
    }
    let r = common.r.or(file.r).unwrap_or(default_r);
    if r < 2 || epsilon >= (r as f64 - 1.0) / r as f64 {
        return Err(Failure::Config(format!(
            "R = {r} must be an integer above 1/(1 - epsilon) = {}",
            1.0 / (1.0 - epsilon)
        )));
    }
    let eta = common.eta.or(file.eta).unwrap_or(epsilon / 2.0);
    if !(eta.is_finite() && eta > 0.0) || eta >= (r as f64 - 1.0) / r as f64 {
        return Err(Failure::Config(format!(
            "eta = {eta} is degenerate: the kept-energy bound 1 - eta > 1/R needs eta < (R-1)/R = {}",
            (r as f64 - 1.0) / r as f64
        )));
    }
    Ok(Resolved {
        alpha,
        epsilon,
        depth: common.depth.or(file.depth).unwrap_or(10),
        r,
        eta,
        p: common.p.or(file.p).unwrap_or(1),
        k: common.k.or(file.k).unwrap_or(64),
        limit: common.limit.or(file.limit).unwrap_or(1_000_000),
        improved: common.improved || file.improved.unwrap_or(false),
        seed: common.seed.or(file.seed).unwrap_or(0),
    })
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("creating {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = to_json_string(value).map_err(|e| Failure::Internal(e.to_string()))?;
    write_text(dir, name, &text)
}

fn cmd_build_set(args: BuildSetArgs) -> Result<(), Failure> {
    let cfg = resolve(&args.common)?;
    if args.grid < 4096 {
        return Err(Failure::Config(format!("grid {} must be at least 4096", args.grid)));
    }
    let window = Interval::unit_window();
    let v = build_v(cfg.alpha, cfg.epsilon, cfg.depth)?;
    let s = v.complement_in(window);
    write_json(&args.common.out, "V.json", &v)?;
    write_json(&args.common.out, "S.json", &s)?;
    write_text(&args.common.out, "V_chi.csv", &char_fn_csv(&v.char_fn_samples(window, args.grid)))?;
    write_text(&args.common.out, "S_chi.csv", &char_fn_csv(&s.char_fn_samples(window, args.grid)))?;
    let mut improved_measure = None;
    let mut improved_depth = None;
    if cfg.improved {
        // Layer ell of the multi-factor variant carries 2^ell bump families,
        // so its depth is capped independently of the plain construction.
        let depth = cfg.depth.min(10);
        let vi = build_v_improved(cfg.alpha, cfg.epsilon, depth, &ramp_c_vectors(depth))?;
        let si = vi.complement_in(window);
        write_json(&args.common.out, "V_improved.json", &vi)?;
        write_json(&args.common.out, "S_improved.json", &si)?;
        write_text(
            &args.common.out,
            "V_improved_chi.csv",
            &char_fn_csv(&vi.char_fn_samples(window, args.grid)),
        )?;
        improved_measure = Some(vi.measure());
        improved_depth = Some(depth);
    }
    write_json(
        &args.common.out,
        "build_set_report.json",
        &json!({
            "schema": SCHEMA_VERSION,
            "command": "build-set",
            "config": cfg,
            "grid": args.grid,
            "measure_V": v.measure(),
            "measure_S": s.measure(),
            "parts_V": v.parts().len(),
            "measure_V_improved": improved_measure,
            "improved_depth": improved_depth,
        }),
    )
}

/// Grows the stored coefficient support until the tail target is certified.
fn box_with_tail(w: f64, tail: f64) -> Result<(CoeffSequence, i64), Failure> {
    let mut support = 1024u32;
    loop {
        let coeffs = box_coeffs(w, support)?;
        match truncation_index(&coeffs, tail) {
            Ok(m) => return Ok((coeffs, m)),
            Err(ConstructionError::TailUnreachable { .. }) if support < (1 << 22) => support *= 2,
            Err(e) => return Err(e.into()),
        }
    }
}

fn bump_with_l1_tail(w: f64, tail: f64) -> Result<(CoeffSequence, i64), Failure> {
    let mut support = 1024u32;
    loop {
        let coeffs = bump_coeffs_l1(w, support)?;
        match truncation_index_l1(&coeffs, bump_l1_total(w), tail) {
            Ok(m) => return Ok((coeffs, m)),
            Err(ConstructionError::TailUnreachable { .. }) if support < (1 << 22) => support *= 2,
            Err(e) => return Err(e.into()),
        }
    }
}

fn cmd_witness(args: WitnessArgs) -> Result<(), Failure> {
    let mut cfg = resolve(&args.common)?;
    if args.common.eta.is_none() {
        cfg.eta = cfg.epsilon / 2f64.powi(args.k_exp as i32);
    }
    let p = u32::try_from(cfg.p)
        .ok()
        .filter(|&p| p >= 1)
        .ok_or_else(|| Failure::Config(format!("P = {} out of range", cfg.p)))?;
    match args.mode {
        WitnessMode::Box => witness_box(&args, &cfg, p),
        WitnessMode::Bump => witness_bump(&args, &cfg, p),
    }
}

fn witness_box(args: &WitnessArgs, cfg: &Resolved, p: u32) -> Result<(), Failure> {
    if cfg.depth < p {
        return Err(Failure::Config(format!(
            "depth {} must be at least P = {p} so the matching layer is part of the deleted set",
            cfg.depth
        )));
    }
    let mut notes: Vec<String> = Vec::new();
    if cfg.eta > cfg.epsilon / 2.0 + 1e-15 {
        notes.push(format!(
            "eta = {} exceeds epsilon/2 = {}: the layer at scale eta is not contained in the \
             deleted set, so the bound may fail",
            cfg.eta,
            cfg.epsilon / 2.0
        ));
    }
    let tail_target = cfg.eta / 2f64.powi(p as i32);
    let w = cfg.eta * cfg.alpha / 2f64.powi(p as i32);
    let (coeffs, m_tilde) = box_with_tail(w, tail_target)?;
    let need = 2 * m_tilde + 1;

    // Every box-mode frequency family is an exact progression with step
    // P*alpha; only the offset differs, and the energy ignores offsets.
    match args.lambda {
        LambdaGen::Ap => {}
        LambdaGen::Lattice => {
            if cfg.k < p as i64 * m_tilde {
                return Err(Failure::Config(format!(
                    "lattice window K = {} too small for the progression (need {})",
                    cfg.k,
                    p as i64 * m_tilde
                )));
            }
        }
        LambdaGen::ExampleA => {
            let blocks: Vec<u64> = (1..=args.blocks as u64).collect();
            let set = example_set_a(cfg.p, &blocks, None).map_err(config_err)?;
            let (len, _) = find_ap_fixed_diff(&set, cfg.p).map_err(config_err)?;
            if (len as i64) < need {
                write_json(
                    &args.common.out,
                    "witness.json",
                    &json!({
                        "schema": SCHEMA_VERSION,
                        "command": "witness",
                        "mode": "box",
                        "config": cfg,
                        "error": "not_found",
                        "requested_len": need,
                        "best_len": len,
                    }),
                )?;
                return Err(Failure::NotFound(format!(
                    "longest fixed-difference progression in the example-a window has length \
                     {len}, need {need}"
                )));
            }
        }
        LambdaGen::ExampleB => {
            return Err(Failure::Config(
                "the strided example set carries no fixed-difference progressions; \
                 use --mode bump"
                    .into(),
            ));
        }
    }
    let s = build_s(cfg.alpha, cfg.epsilon, cfg.depth)?;
    let kept_energy = coeffs.energy_within(m_tilde);
    let params = WitnessParams {
        alpha: cfg.alpha,
        epsilon: cfg.epsilon,
        eta: cfg.eta,
        r: cfg.r,
        p_or_ell: p,
    };
    let report = verify_witness_ap(&coeffs, m_tilde, p as f64 * cfg.alpha, &s, &params, kept_energy);
    let tail_energy = 1.0 - kept_energy;
    let out = json!({
        "schema": SCHEMA_VERSION,
        "command": "witness",
        "mode": "box",
        "config": cfg,
        "offset_d": args.d,
        "report": report,
        "links": {
            "tail_target": tail_target,
            "tail_energy": tail_energy,
            "tail_below_target": tail_energy < tail_target,
            "kept_energy": kept_energy,
            "kept_energy_above_one_over_R": kept_energy > 1.0 / cfg.r as f64,
            "energy_below_tail": report.energy_on_s <= tail_energy + 1e-12,
        },
        "notes": notes,
    });
    write_json(&args.common.out, "witness.json", &out)
}

fn witness_bump(args: &WitnessArgs, cfg: &Resolved, ell: u32) -> Result<(), Failure> {
    let tail_target = cfg.eta / 2f64.powi(ell as i32);
    let w = cfg.eta / 2f64.powi(ell as i32);
    let (coeffs, m) = bump_with_l1_tail(w, tail_target)?;
    let delta = choose_delta(&coeffs, m, tail_target);
    let lambda = match args.lambda {
        LambdaGen::Ap | LambdaGen::Lattice => {
            FrequencySet::scaled_lattice(cfg.alpha, cfg.k).map_err(config_err)?
        }
        LambdaGen::ExampleA => {
            let blocks: Vec<u64> = (1..=args.blocks as u64).collect();
            example_set_a(cfg.p, &blocks, None).map_err(config_err)?
        }
        LambdaGen::ExampleB => example_set_b(args.n_param, args.kmax, None).map_err(config_err)?,
    };
    let m_u32 = u32::try_from(m).map_err(|_| Failure::Config("support too large".into()))?;
    let ap = match extract_approx_ap(&lambda, m_u32, delta, args.lmult) {
        Ok(ap) => ap,
        Err(FreqError::ApNotFound { requested_len, best_len }) => {
            write_json(
                &args.common.out,
                "witness.json",
                &json!({
                    "schema": SCHEMA_VERSION,
                    "command": "witness",
                    "mode": "bump",
                    "config": cfg,
                    "error": "not_found",
                    "requested_len": requested_len,
                    "best_len": best_len,
                }),
            )?;
            return Err(Failure::NotFound(format!(
                "no approximate progression of length {requested_len} (best {best_len})"
            )));
        }
        Err(e) => return Err(Failure::Config(e.to_string())),
    };
    let poly = witness_poly(&coeffs, m, &ap.s)?;
    // The deleted layer for this witness sits on the extracted difference c:
    // the support of the compressed bump has period 1/c and halfwidth w/(4c).
    let layer =
        periodized_support(1.0 / ap.c as f64, w / (4.0 * ap.c as f64), Interval::unit_window())?;
    let s_used = layer.complement_in(Interval::unit_window());
    let kept_energy = coeffs.energy_within(m);
    let params = WitnessParams {
        alpha: cfg.alpha,
        epsilon: cfg.epsilon,
        eta: cfg.eta,
        r: cfg.r,
        p_or_ell: ell,
    };
    let report = verify_witness(&poly, &s_used, &params, kept_energy);
    let phase_budget = 2.0 * (std::f64::consts::PI * delta / 2.0).sin() * coeffs.l1_within(m);
    let l1_tail = bump_l1_total(w) - coeffs.l1_within(m);
    let pointwise = phase_budget + l1_tail;
    let bound_eta_sq = cfg.r as f64 * cfg.eta * cfg.eta * kept_energy;
    let out = json!({
        "schema": SCHEMA_VERSION,
        "command": "witness",
        "mode": "bump",
        "config": cfg,
        "lmult": args.lmult,
        "report": report,
        "ap": ap,
        "delta": delta,
        "links": {
            "l1_tail": l1_tail,
            "l1_tail_below_target": l1_tail < tail_target,
            "phase_budget": phase_budget,
            "phase_budget_below_target": phase_budget < tail_target,
            "pointwise_bound": pointwise,
            "pointwise_below_eta": pointwise <= cfg.eta,
            "bound_eta_squared": bound_eta_sq,
            "satisfied_eta_squared": report.energy_on_s <= bound_eta_sq + 1e-12,
        },
        "layer_measure": layer.measure(),
        "kept_set_measure": s_used.measure(),
    });
    write_json(&args.common.out, "witness.json", &out)
}

fn cmd_gram_bounds(args: GramBoundsArgs) -> Result<(), Failure> {
    let cfg = resolve(&args.common)?;
    let s = if args.full_window {
        IntervalSet::from_pairs(&[(-0.5, 0.5)]).map_err(config_err)?
    } else {
        build_s(cfg.alpha, cfg.epsilon, cfg.depth)?
    };
    let freqs = FrequencySet::scaled_lattice(args.step, cfg.k).map_err(config_err)?;
    let gram = GramMatrix::build(&freqs, &s)?;
    let (lambda_min, lambda_max) = gram.extremal_eigs()?;

    // Density-vs-measure consistency note: a family denser than the set's
    // measure cannot stay a Riesz sequence, so its lower bound must decay
    // along growing truncations.
    let lattice_density = 1.0 / args.step;
    let landau_note = (lattice_density > s.measure() + 1e-12).then(|| {
        format!(
            "lattice density {lattice_density} exceeds |S| = {}; expect lambda_min to decay as K grows",
            s.measure()
        )
    });

    let mut depth_sweep = Vec::new();
    for &d in &args.depth_sweep {
        let sd = build_s(cfg.alpha, cfg.epsilon, d)?;
        let g = GramMatrix::build(&freqs, &sd)?;
        let (lo, hi) = g.extremal_eigs()?;
        depth_sweep.push(json!({
            "depth": d,
            "lambda_min": lo,
            "lambda_max": hi,
            "measure_S": sd.measure(),
        }));
    }
    let mut k_sweep = Vec::new();
    if !args.k_sweep.is_empty() {
        let family: Vec<FrequencySet> = args
            .k_sweep
            .iter()
            .map(|&k| FrequencySet::scaled_lattice(args.step, k))
            .collect::<Result<_, _>>()
            .map_err(config_err)?;
        let traj = rieszkit::gram::riesz_lower_trajectory(&family, &s)?;
        for (&k, lo) in args.k_sweep.iter().zip(traj) {
            k_sweep.push(json!({"K": k, "lambda_min": lo}));
        }
    }
    if args.dump_matrix {
        write_json(&args.common.out, "gram_matrix.json", &gram.export())?;
        let bin = args.common.out.join("gram_matrix.bin");
        fs::write(&bin, gram.to_binary())
            .map_err(|e| Failure::Io(format!("writing {}: {e}", bin.display())))?;
        println!("wrote {}", bin.display());
    }

    // Frame lower-bound estimate of a periodic integer subset on the deleted
    // set V, via the complement Bessel bound, per truncation.
    let mut complement_bounds = Vec::new();
    if let Some(modulus) = args.modulus {
        if args.residues.is_empty() {
            return Err(Failure::Config("--modulus needs --residues".into()));
        }
        if args.residues.iter().any(|&u| u >= modulus) {
            return Err(Failure::Config("residues must be smaller than the modulus".into()));
        }
        let v = build_v(cfg.alpha, cfg.epsilon, cfg.depth)?;
        let ks = if args.k_sweep.is_empty() { vec![cfg.k] } else { args.k_sweep.clone() };
        for k in ks {
            let omega_prime: Vec<f64> = (-k..=k)
                .filter(|z| args.residues.contains(&(z.rem_euclid(modulus as i64) as u64)))
                .map(|z| z as f64)
                .collect();
            let omega_prime = FrequencySet::new(omega_prime, Some("periodic subset".into()))
                .map_err(config_err)?;
            let bound = rieszkit::gram::complement_frame_bound(&omega_prime, modulus, &v, k)?;
            complement_bounds.push(json!({"K": k, "frame_lower_estimate": bound}));
        }
    }
    write_json(
        &args.common.out,
        "gram_report.json",
        &json!({
            "schema": SCHEMA_VERSION,
            "command": "gram-bounds",
            "config": cfg,
            "step": args.step,
            "full_window": args.full_window,
            "dim": gram.dim(),
            "measure_S": s.measure(),
            "lambda_min": lambda_min,
            "lambda_max": lambda_max,
            "depth_sweep": depth_sweep,
            "k_sweep": k_sweep,
            "residues": args.residues,
            "modulus": args.modulus,
            "complement_frame_bounds": complement_bounds,
            "landau_note": landau_note,
        }),
    )
}

fn generate_set(
    gen: SetGen,
    cfg: &Resolved,
    blocks: u32,
    step: f64,
    n_param: u64,
    kmax: u32,
) -> Result<FrequencySet, Failure> {
    match gen {
        SetGen::Lattice => FrequencySet::scaled_lattice(step, cfg.k).map_err(config_err),
        SetGen::ExampleA => {
            let sizes: Vec<u64> = (1..=blocks as u64).collect();
            example_set_a(cfg.p, &sizes, None).map_err(config_err)
        }
        SetGen::ExampleB => example_set_b(n_param, kmax, None).map_err(config_err),
        SetGen::Squarefree => Ok(squarefree_set(cfg.limit).map_err(config_err)?.mirrored()),
    }
}

fn cmd_ap_extract(args: ApExtractArgs) -> Result<(), Failure> {
    let cfg = resolve(&args.common)?;
    let set = generate_set(args.gen, &cfg, args.blocks, args.step, 5, 4)?;
    if args.dump_set {
        write_json(&args.common.out, "set.json", &set)?;
    }
    let base = json!({
        "schema": SCHEMA_VERSION,
        "command": "ap-extract",
        "config": cfg,
        "gen": format!("{:?}", args.gen),
        "m": args.m,
        "delta": args.delta,
        "lmult": args.lmult,
    });
    match extract_approx_ap(&set, args.m, args.delta, args.lmult) {
        Ok(ap) => {
            let mut out = base;
            out["result"] = serde_json::to_value(&ap).map_err(|e| Failure::Internal(e.to_string()))?;
            write_json(&args.common.out, "ap_extract.json", &out)
        }
        Err(FreqError::ApNotFound { requested_len, best_len }) => {
            let mut out = base;
            out["error"] = json!("not_found");
            out["requested_len"] = json!(requested_len);
            out["best_len"] = json!(best_len);
            write_json(&args.common.out, "ap_extract.json", &out)?;
            Err(Failure::NotFound(format!(
                "no progression of length {requested_len} in the window (best {best_len})"
            )))
        }
        Err(e) => Err(Failure::Config(e.to_string())),
    }
}

fn cmd_duality(args: DualityArgs) -> Result<(), Failure> {
    let cfg = resolve(&args.common)?;
    if args.n < 2 {
        return Err(Failure::Config("n must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut trials = Vec::with_capacity(args.trials as usize);
    let mut all_consistent = true;
    let mut max_frame_dev: f64 = 0.0;
    let mut max_riesz_dev: f64 = 0.0;
    for trial in 0..args.trials {
        let rank = rng.gen_range(1..args.n);
        let p = random_projection(args.n, rank, &mut rng);
        let j_len = rng.gen_range(0..=args.n);
        let mut perm: Vec<usize> = (0..args.n).collect();
        for i in (1..args.n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        perm.truncate(j_len);
        let report = duality_check(&p, args.n, &perm)?;
        let target = 1.0 - report.bessel_opt;
        max_frame_dev = max_frame_dev.max((report.frame_lower - target).abs());
        max_riesz_dev = max_riesz_dev.max((report.riesz_lower - target).abs());
        all_consistent &= report.consistent;
        trials.push(json!({"trial": trial, "j": perm, "report": report}));
    }
    write_json(
        &args.common.out,
        "duality.json",
        &json!({
            "schema": SCHEMA_VERSION,
            "command": "duality-check",
            "config": cfg,
            "n": args.n,
            "trials_run": args.trials,
            "all_consistent": all_consistent,
            "max_frame_deviation": max_frame_dev,
            "max_riesz_deviation": max_riesz_dev,
            "trials": trials,
        }),
    )
}

fn cmd_squarefree(args: SquarefreeArgs) -> Result<(), Failure> {
    let cfg = resolve(&args.common)?;
    if args.p_max < 1 {
        return Err(Failure::Config("p-max must be >= 1".into()));
    }
    let mut reports = Vec::new();
    let mut all_below_cap = true;
    for p in 1..=args.p_max {
        let rep = squarefree_obstruction(p, cfg.limit).map_err(config_err)?;
        all_below_cap &= (rep.observed as u64) <= rep.cap;
        reports.push(rep);
    }
    let mirrored = squarefree_set(cfg.limit).map_err(config_err)?.mirrored();
    let window = Interval::new(-(cfg.limit as f64), cfg.limit as f64).map_err(config_err)?;
    let r_grid: Vec<f64> = [4096.0, 16384.0]
        .into_iter()
        .filter(|&r| r <= window.length())
        .collect();
    if r_grid.is_empty() {
        return Err(Failure::Config("limit too small for the density windows".into()));
    }
    let density = density_bounds(&mirrored, window, &r_grid).map_err(config_err)?;
    let target = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
    write_json(
        &args.common.out,
        "squarefree.json",
        &json!({
            "schema": SCHEMA_VERSION,
            "command": "squarefree-check",
            "config": cfg,
            "p_max": args.p_max,
            "obstructions": reports,
            "all_below_cap": all_below_cap,
            "density": density,
            "density_target": target,
        }),
    )
}

fn cmd_density(args: DensityArgs) -> Result<(), Failure> {
    let cfg = resolve(&args.common)?;
    let set = generate_set(args.gen, &cfg, args.blocks, args.step, args.n_param, args.kmax)?;
    if set.len() < 2 {
        return Err(Failure::Config("generated set has fewer than two points".into()));
    }
    if args.dump_set {
        write_json(&args.common.out, "set.json", &set)?;
    }
    let lo = *set.points().first().expect("nonempty");
    let hi = *set.points().last().expect("nonempty");
    let window = Interval::new(lo, hi).map_err(config_err)?;
    let r_grid: Vec<f64> = if args.r_grid.is_empty() {
        // Geometric grid with ratio 2 between the separation scale and half
        // the window.
        let sep = separation(&set).map_err(config_err)?;
        let mut grid = Vec::new();
        let mut r = 16.0 * sep;
        while r <= window.length() / 2.0 {
            grid.push(r);
            r *= 2.0;
        }
        if grid.is_empty() {
            grid.push(window.length() / 2.0);
        }
        grid
    } else {
        args.r_grid.clone()
    };
    let density = density_bounds(&set, window, &r_grid).map_err(config_err)?;

    // The 100^k-strided generator also reports its progression census.
    let census = if args.gen == SetGen::ExampleB {
        let positive = set.restrict(f64::MIN_POSITIVE, f64::INFINITY);
        let mut by_k = Vec::new();
        for k in 1..=args.kmax {
            let c = ap_census(&positive, 100f64.powi(k as i32), 1e-6).map_err(config_err)?;
            by_k.push(json!({"k": k, "max_len": c.max_len, "maximal_runs": c.runs}));
        }
        Some(by_k)
    } else {
        None
    };
    write_json(
        &args.common.out,
        "density.json",
        &json!({
            "schema": SCHEMA_VERSION,
            "command": "density",
            "config": cfg,
            "gen": format!("{:?}", args.gen),
            "points": set.len(),
            "window": [window.lo, window.hi],
            "r_grid": r_grid,
            "estimate": density,
            "census_by_k": census,
        }),
    )
}
