//! Command-line front end: classify commuting integer-matrix actions, build
//! their analytic torus lifts, certify freeness, and trace orbits.
//!
//! Exit codes: `0` success, `1` the action fails a classification
//! hypothesis (spectral refutation, nontrivial fixed lattice, fixed-point
//! evidence), `2` invalid input, `3` internal verification failure.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use torus_actions::{
    default_amplitudes, fixed_point_on_subgroup, lift_freeness, normalize_action,
    numeric_fixed_point_scan, orbit_iterate, trajectory_csv, verify_normal_form, ActionLawReport,
    ActionSpec, Error, FixedPointReport, FixedPointVerdict, FreeActionFamily, FreenessCertificate,
    NormalFormResult, ScanConfig, ScanReport, SpectralVerdict, SubgroupSpec, TrigAffineMap,
};

#[derive(Parser)]
#[command(
    name = "torus-actions",
    version,
    about = "Classify commuting integer-matrix actions and build free analytic torus actions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an action and run the spectral and fixed-lattice checks
    Check(CheckArgs),
    /// Reduce a rank-3 action to its Klein-four normal form
    NormalForm(NormalFormArgs),
    /// Build the lifted analytic family and verify the action laws
    Construct(ConstructArgs),
    /// Eliminate fixed points symbolically and certify freeness
    VerifyFree(VerifyFreeArgs),
    /// Trace an orbit of the lifted action numerically
    Orbit(OrbitArgs),
    /// Run the built-in example actions end to end
    Demo(DemoArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Action description (JSON), or '-' to read standard input
    input: PathBuf,
    /// Largest group closure enumerated exactly before switching to the
    /// exponent-box tier of the spectral check
    #[arg(long, default_value_t = 1000)]
    closure_cap: usize,
    /// Radius of the exponent box used by box-tier verifications
    #[arg(long = "box", default_value_t = 4)]
    box_radius: i64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct NormalFormArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct AmplitudeArgs {
    /// Comma-separated amplitude values, one per generator
    #[arg(long, conflicts_with = "seed")]
    alpha: Option<String>,
    /// Draw amplitudes uniformly from [0.5, 2.5) with this seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyFreeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    amplitudes: AmplitudeArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OrbitFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct OrbitArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    amplitudes: AmplitudeArgs,
    /// Signed 1-based generator indices applied in order, e.g. "1,2,-1"
    #[arg(long)]
    word: String,
    /// Starting point of the trajectory
    #[arg(long, default_value = "0,0,0")]
    start: String,
    #[arg(long, value_enum, default_value_t = OrbitFormat::Csv)]
    format: OrbitFormat,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// A failed run: message for standard error plus the process exit code.
struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { message: message.into(), code: 2 }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            // The input is well-formed but fails a hypothesis of the
            // classification or freeness argument.
            Error::SpectralObstruction { .. }
            | Error::FixedLatticeNotTrivial { .. }
            | Error::NotInvolution { .. }
            | Error::NotInKleinGroup
            | Error::CandidateNotCommuting { .. }
            | Error::NoTrivialRestriction
            | Error::FixedRankNotOne { .. }
            | Error::RelationViolated { .. }
            | Error::FixedPointEvidence { .. } => 1,
            // The library's own verification failed: a bug, not bad input.
            Error::InternalVerification { .. } => 3,
            // Everything else is a malformed or out-of-scope input.
            _ => 2,
        };
        Failure { message: err.to_string(), code }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => run_check(args),
        Command::NormalForm(args) => run_normal_form(args),
        Command::Construct(args) => run_construct(args),
        Command::VerifyFree(args) => run_verify_free(args),
        Command::Orbit(args) => run_orbit(args),
        Command::Demo(args) => run_demo(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

// --- shared helpers ---------------------------------------------------------

fn read_action(path: &PathBuf) -> Result<ActionSpec, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut buffer = String::new();
        std::io::stdin()
            .read_to_string(&mut buffer)
            .map_err(|e| Failure::input(format!("reading standard input: {e}")))?;
        buffer
    } else {
        fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("invalid action: {e}")))
}

fn parse_number_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(str::trim)
        .map(|piece| {
            piece
                .parse()
                .map_err(|e| Failure::input(format!("invalid {what} entry {piece:?}: {e}")))
        })
        .collect()
}

#[derive(Serialize, Clone)]
struct AmplitudeChoice {
    alpha: Vec<f64>,
    /// "explicit", "seed", or "default" (logarithms of the first primes).
    alpha_source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

fn resolve_amplitudes(args: &AmplitudeArgs, p: usize) -> Result<AmplitudeChoice, Failure> {
    if let Some(text) = &args.alpha {
        let alpha: Vec<f64> = parse_number_list(text, "amplitude")?;
        if alpha.len() != p {
            return Err(Failure::input(format!(
                "expected {p} amplitudes, got {}",
                alpha.len()
            )));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Failure::input("amplitudes must be finite".to_string()));
        }
        return Ok(AmplitudeChoice { alpha, alpha_source: "explicit", seed: None });
    }
    if let Some(seed) = args.seed {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let alpha = (0..p).map(|_| 0.5 + 2.0 * rng.gen::<f64>()).collect();
        return Ok(AmplitudeChoice { alpha, alpha_source: "seed", seed: Some(seed) });
    }
    Ok(AmplitudeChoice { alpha: default_amplitudes(p), alpha_source: "default", seed: None })
}

#[derive(Serialize)]
struct EchoConfig {
    closure_cap: usize,
    #[serde(rename = "box")]
    box_radius: i64,
}

impl EchoConfig {
    fn from(common: &CommonArgs) -> Self {
        EchoConfig { closure_cap: common.closure_cap, box_radius: common.box_radius }
    }
}

/// Writes a complete report to stdout in one shot.  A consumer that stops
/// reading (`head`, a closed pager) produces a broken pipe; die quietly with
/// the conventional status instead of panicking.
fn emit(text: &str) {
    use std::io::Write as _;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    if let Err(err) = lock.write_all(text.as_bytes()).and_then(|()| lock.flush()) {
        if err.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(141);
        }
        panic!("failed writing to stdout: {err}");
    }
}

fn emit_json<T: Serialize>(value: &T) {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize to JSON");
    text.push('\n');
    emit(&text);
}

fn describe_verdict(verdict: &SpectralVerdict) -> String {
    match verdict {
        SpectralVerdict::ExactlyVerified { closure_size } => {
            format!("exactly verified (finite image of size {closure_size})")
        }
        SpectralVerdict::VerifiedOnBox { box_radius } => {
            format!("verified on the exponent box of radius {box_radius}")
        }
        SpectralVerdict::Refuted { witness } => {
            format!("refuted by the exponent vector {witness:?}")
        }
    }
}

fn matrix_grid(m: &torus_actions::IntMatrix, indent: &str) -> String {
    let mut cells: Vec<Vec<String>> = Vec::new();
    for i in 0..m.rows() {
        cells.push((0..m.cols()).map(|j| m.at(i, j).to_string()).collect());
    }
    let widths: Vec<usize> = (0..m.cols())
        .map(|j| cells.iter().map(|row| row[j].len()).max().unwrap_or(1))
        .collect();
    let mut out = String::new();
    for row in &cells {
        out.push_str(indent);
        out.push('[');
        for (j, cell) in row.iter().enumerate() {
            if j > 0 {
                out.push_str("  ");
            }
            let _ = write!(out, "{cell:>width$}", width = widths[j]);
        }
        out.push_str("]\n");
    }
    out
}

// --- check -------------------------------------------------------------------

#[derive(Serialize)]
struct CheckReport {
    config: EchoConfig,
    p: usize,
    q: usize,
    spectral: SpectralVerdict,
    fixed_lattice: FixedLatticeReport,
    hypotheses_hold: bool,
}

#[derive(Serialize)]
struct FixedLatticeReport {
    rank: usize,
    basis: serde_json::Value,
}

fn lattice_report(action: &ActionSpec) -> FixedLatticeReport {
    let lattice = action.fix_lattice();
    let basis = serde_json::Value::Array(
        lattice
            .vectors()
            .iter()
            .map(|v| {
                serde_json::Value::Array(
                    v.iter()
                        .map(|entry| {
                            serde_json::Number::from_str(&entry.to_string())
                                .map(serde_json::Value::Number)
                                .expect("integers are valid JSON numbers")
                        })
                        .collect(),
                )
            })
            .collect(),
    );
    FixedLatticeReport { rank: lattice.rank(), basis }
}

fn run_check(args: CheckArgs) -> Result<u8, Failure> {
    let action = read_action(&args.common.input)?;
    let spectral = action.spectral_unitarity(args.common.closure_cap, args.common.box_radius);
    let fixed_lattice = lattice_report(&action);
    let hypotheses_hold = spectral.is_verified() && fixed_lattice.rank == 0;
    let report = CheckReport {
        config: EchoConfig::from(&args.common),
        p: action.p(),
        q: action.q(),
        spectral,
        fixed_lattice,
        hypotheses_hold,
    };
    match args.format {
        Format::Json => emit_json(&report),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "action: {} generators on Z^{}", report.p, report.q);
            let _ = writeln!(out, "spectral check: {}", describe_verdict(&report.spectral));
            let _ = writeln!(out, "fixed lattice rank: {}", report.fixed_lattice.rank);
            let _ = writeln!(
                out,
                "hypotheses: {}",
                if report.hypotheses_hold { "satisfied" } else { "rejected" }
            );
            emit(&out);
        }
    }
    Ok(if report.hypotheses_hold { 0 } else { 1 })
}

// --- normal-form --------------------------------------------------------------

#[derive(Serialize)]
struct NormalFormReport {
    config: EchoConfig,
    result: NormalFormResult,
    verification: VerificationSummary,
}

#[derive(Serialize)]
struct VerificationSummary {
    ok: bool,
    violations: Vec<String>,
}

fn run_normal_form(args: NormalFormArgs) -> Result<u8, Failure> {
    let action = read_action(&args.common.input)?;
    let result = normalize_action(&action, args.common.closure_cap, args.common.box_radius)?;
    let verification = verify_normal_form(&action, &result);
    let report = NormalFormReport {
        config: EchoConfig::from(&args.common),
        verification: VerificationSummary {
            ok: verification.is_ok(),
            violations: verification.violations().to_vec(),
        },
        result,
    };
    match args.format {
        Format::Json => emit_json(&report),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "parameters: a={} b={} c={} d={}",
                report.result.a, report.result.b, report.result.c, report.result.d
            );
            let _ = writeln!(out, "N =\n{}", matrix_grid(&report.result.n_matrix(), "  "));
            let _ = writeln!(out, "M =\n{}", matrix_grid(&report.result.m_matrix(), "  "));
            let _ = writeln!(
                out,
                "lattice conjugator P =\n{}",
                matrix_grid(&report.result.conjugator, "  ")
            );
            let _ = writeln!(
                out,
                "generator change W =\n{}",
                matrix_grid(&report.result.basis_change, "  ")
            );
            let _ = writeln!(
                out,
                "verification: {}",
                if report.verification.ok { "ok" } else { "FAILED" }
            );
            emit(&out);
        }
    }
    if report.verification.ok {
        Ok(0)
    } else {
        Err(Failure {
            message: format!(
                "normal form failed re-verification: {}",
                report.verification.violations.join("; ")
            ),
            code: 3,
        })
    }
}

// --- construct -----------------------------------------------------------------

#[derive(Serialize)]
struct ConstructReport {
    config: EchoConfig,
    normal_form: NormalFormResult,
    lifts: Vec<TrigAffineMap>,
    display: Vec<String>,
    action_laws: ActionLawReport,
}

fn build_family(common: &CommonArgs, action: &ActionSpec) -> Result<FreeActionFamily, Failure> {
    let result = normalize_action(action, common.closure_cap, common.box_radius)?;
    Ok(FreeActionFamily::build_generators(&result)?)
}

fn run_construct(args: ConstructArgs) -> Result<u8, Failure> {
    let action = read_action(&args.common.input)?;
    let family = build_family(&args.common, &action)?;
    let report = ConstructReport {
        config: EchoConfig::from(&args.common),
        normal_form: family.normal_form().clone(),
        lifts: family.lifts().to_vec(),
        display: family.lifts().iter().map(|l| l.to_string()).collect(),
        action_laws: family.action_law_report(),
    };
    match args.format {
        Format::Json => emit_json(&report),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "normal form: a={} b={} c={} d={}",
                report.normal_form.a, report.normal_form.b, report.normal_form.c,
                report.normal_form.d
            );
            for (i, line) in report.display.iter().enumerate() {
                let _ = writeln!(out, "lift {}: {line}", i + 1);
            }
            for pd in &report.action_laws.pair_defects {
                let _ = writeln!(out, "commutator defect ({}, {}): {}", pd.i, pd.j, pd.defect);
            }
            let all = report.action_laws.all_hold();
            let _ = writeln!(
                out,
                "action laws: {} ({} identities checked)",
                if all { "verified" } else { "FAILED" },
                report.action_laws.identities.len()
            );
            emit(&out);
        }
    }
    if report.action_laws.all_hold() {
        Ok(0)
    } else {
        Err(Failure { message: "constructed lifts fail the action laws".into(), code: 3 })
    }
}

// --- verify-free ------------------------------------------------------------------

#[derive(Serialize)]
struct VerifyFreeReport {
    config: VerifyFreeConfig,
    normal_form: NormalFormResult,
    symbolic: SymbolicSummary,
    certificate: FreenessCertificate,
    scan: ScanReport,
}

#[derive(Serialize)]
struct VerifyFreeConfig {
    closure_cap: usize,
    #[serde(rename = "box")]
    box_radius: i64,
    #[serde(flatten)]
    amplitudes: AmplitudeChoice,
}

#[derive(Serialize)]
struct SymbolicSummary {
    /// Subgroup coefficients ranged over `[-radius, radius]^p`.
    radius: i64,
    elements_checked: usize,
    eliminated: usize,
    identity_elements: usize,
}

/// All vectors of `{-radius, ..., radius}^p` in odometer order.
fn exponent_box(p: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..p {
        let mut next = Vec::new();
        for prefix in &out {
            for v in -radius..=radius {
                let mut item = prefix.clone();
                item.push(v);
                next.push(item);
            }
        }
        out = next;
    }
    out
}

fn run_verify_free(args: VerifyFreeArgs) -> Result<u8, Failure> {
    let action = read_action(&args.common.input)?;
    let family = build_family(&args.common, &action)?;
    let p = family.p();
    let amplitudes = resolve_amplitudes(&args.amplitudes, p)?;

    let mut evidence: Vec<FixedPointReport> = Vec::new();
    for coefficients in exponent_box(p, args.common.box_radius) {
        evidence.push(fixed_point_on_subgroup(&family, &coefficients)?);
    }
    let eliminated =
        evidence.iter().filter(|r| r.verdict == FixedPointVerdict::NoFixedPoint).count();
    let identity_elements =
        evidence.iter().filter(|r| r.verdict == FixedPointVerdict::IdentityMap).count();
    let subgroup = SubgroupSpec::standard(p);
    let certificate = lift_freeness(&subgroup, &evidence)?;
    let scan = numeric_fixed_point_scan(&family, &amplitudes.alpha, &ScanConfig::default())?;

    let report = VerifyFreeReport {
        config: VerifyFreeConfig {
            closure_cap: args.common.closure_cap,
            box_radius: args.common.box_radius,
            amplitudes: amplitudes.clone(),
        },
        normal_form: family.normal_form().clone(),
        symbolic: SymbolicSummary {
            radius: args.common.box_radius,
            elements_checked: evidence.len(),
            eliminated,
            identity_elements,
        },
        certificate,
        scan,
    };
    let clear = report.scan.all_clear();
    match args.format {
        Format::Json => emit_json(&report),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "symbolic elimination: {} of {} subgroup elements have no fixed point \
                 ({} identity)",
                report.symbolic.eliminated,
                report.symbolic.elements_checked,
                report.symbolic.identity_elements
            );
            let _ = writeln!(
                out,
                "certificate: index {} subgroup, quotient exponent {}",
                report.certificate.subgroup_index, report.certificate.quotient_exponent
            );
            let _ = writeln!(out, "  {}", report.certificate.statement);
            let _ = writeln!(
                out,
                "numeric scan (radius {}, grid {}, amplitudes {:?}): smallest displacement {}",
                report.scan.config.exponent_radius,
                report.scan.config.grid,
                report.scan.alpha,
                report.scan.global_minimum().unwrap_or(f64::INFINITY)
            );
            let _ = writeln!(out, "scan verdict: {}", if clear { "clear" } else { "FLAGGED" });
            emit(&out);
        }
    }
    Ok(if clear { 0 } else { 1 })
}

// --- orbit --------------------------------------------------------------------

#[derive(Serialize)]
struct OrbitReport {
    config: OrbitConfig,
    trajectory: Vec<[f64; 3]>,
}

#[derive(Serialize)]
struct OrbitConfig {
    closure_cap: usize,
    #[serde(rename = "box")]
    box_radius: i64,
    word: Vec<i64>,
    start: [f64; 3],
    #[serde(flatten)]
    amplitudes: AmplitudeChoice,
}

fn run_orbit(args: OrbitArgs) -> Result<u8, Failure> {
    let action = read_action(&args.common.input)?;
    let family = build_family(&args.common, &action)?;
    let amplitudes = resolve_amplitudes(&args.amplitudes, family.p())?;
    let word: Vec<i64> = parse_number_list(&args.word, "word")?;
    let start_values: Vec<f64> = parse_number_list(&args.start, "start")?;
    let start: [f64; 3] = start_values
        .try_into()
        .map_err(|v: Vec<f64>| Failure::input(format!("start needs 3 coordinates, got {}", v.len())))?;
    if start.iter().any(|c| !c.is_finite()) {
        return Err(Failure::input("start coordinates must be finite".to_string()));
    }

    let trajectory = orbit_iterate(&family, &amplitudes.alpha, start, &word)?;
    match args.format {
        OrbitFormat::Csv => emit(&trajectory_csv(&trajectory)),
        OrbitFormat::Json => emit_json(&OrbitReport {
            config: OrbitConfig {
                closure_cap: args.common.closure_cap,
                box_radius: args.common.box_radius,
                word,
                start,
                amplitudes,
            },
            trajectory,
        }),
    }
    Ok(0)
}

// --- demo ---------------------------------------------------------------------

#[derive(Serialize)]
struct DemoReport {
    normal_form_pair: DemoClassification,
    disguised_pair: DemoClassification,
    infinite_image: CheckSection,
    lifted_family: DemoFamily,
}

#[derive(Serialize)]
struct DemoClassification {
    spectral: SpectralVerdict,
    result: NormalFormResult,
}

#[derive(Serialize)]
struct CheckSection {
    p: usize,
    q: usize,
    spectral: SpectralVerdict,
    fixed_lattice_rank: usize,
    normal_form_error: String,
}

#[derive(Serialize)]
struct DemoFamily {
    display: Vec<String>,
    action_laws_hold: bool,
    certificate: FreenessCertificate,
    scan_minimum: f64,
    scan_clear: bool,
}

fn run_demo(args: DemoArgs) -> Result<u8, Failure> {
    let cap = 1000;
    let radius = 4;

    let pair = torus_actions::demo_pair();
    let pair_nf = normalize_action(&pair, cap, radius)?;
    let disguised = torus_actions::demo_disguised_pair();
    let disguised_nf = normalize_action(&disguised, cap, radius)?;

    let infinite = torus_actions::demo_infinite_image();
    let infinite_error = normalize_action(&infinite, cap, radius)
        .err()
        .map(|e| e.to_string())
        .unwrap_or_default();

    let family = FreeActionFamily::build_generators(&pair_nf)?;
    let evidence: Vec<FixedPointReport> = exponent_box(family.p(), 2)
        .into_iter()
        .map(|l| fixed_point_on_subgroup(&family, &l))
        .collect::<Result<_, _>>()?;
    let certificate = lift_freeness(&SubgroupSpec::standard(family.p()), &evidence)?;
    let scan_config = ScanConfig { exponent_radius: 1, grid: 32, tolerance: 1e-3 };
    let scan = numeric_fixed_point_scan(&family, &default_amplitudes(family.p()), &scan_config)?;

    let report = DemoReport {
        normal_form_pair: DemoClassification {
            spectral: pair.spectral_unitarity(cap, radius),
            result: pair_nf,
        },
        disguised_pair: DemoClassification {
            spectral: disguised.spectral_unitarity(cap, radius),
            result: disguised_nf,
        },
        infinite_image: CheckSection {
            p: infinite.p(),
            q: infinite.q(),
            spectral: infinite.spectral_unitarity(200, radius),
            fixed_lattice_rank: infinite.fix_lattice().rank(),
            normal_form_error: infinite_error,
        },
        lifted_family: DemoFamily {
            display: family.lifts().iter().map(|l| l.to_string()).collect(),
            action_laws_hold: family.action_law_report().all_hold(),
            certificate,
            scan_minimum: scan.global_minimum().unwrap_or(f64::INFINITY),
            scan_clear: scan.all_clear(),
        },
    };

    match args.format {
        Format::Json => emit_json(&report),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "== pair already in normal form ==");
            let _ = writeln!(
                out,
                "spectral check: {}",
                describe_verdict(&report.normal_form_pair.spectral)
            );
            let nf = &report.normal_form_pair.result;
            let _ = writeln!(out, "parameters: a={} b={} c={} d={}", nf.a, nf.b, nf.c, nf.d);
            let _ = writeln!(out);
            let _ = writeln!(out, "== the same class, disguised by a basis change ==");
            let nf = &report.disguised_pair.result;
            let _ = writeln!(out, "parameters: a={} b={} c={} d={}", nf.a, nf.b, nf.c, nf.d);
            let _ =
                writeln!(out, "recovered conjugator P =\n{}", matrix_grid(&nf.conjugator, "  "));
            let _ = writeln!(out, "== rank-4 action with infinite image ==");
            let _ = writeln!(
                out,
                "spectral check: {}",
                describe_verdict(&report.infinite_image.spectral)
            );
            let _ = writeln!(
                out,
                "fixed lattice rank: {}; normal form: {}",
                report.infinite_image.fixed_lattice_rank, report.infinite_image.normal_form_error
            );
            let _ = writeln!(out);
            let _ = writeln!(out, "== lifted analytic family for the first pair ==");
            for (i, line) in report.lifted_family.display.iter().enumerate() {
                let _ = writeln!(out, "lift {}: {line}", i + 1);
            }
            let _ = writeln!(
                out,
                "action laws: {}",
                if report.lifted_family.action_laws_hold { "verified" } else { "FAILED" }
            );
            let _ = writeln!(out, "freeness: {}", report.lifted_family.certificate.statement);
            let _ = writeln!(
                out,
                "numeric scan minimum: {} ({})",
                report.lifted_family.scan_minimum,
                if report.lifted_family.scan_clear { "clear" } else { "FLAGGED" }
            );
            emit(&out);
        }
    }
    Ok(0)
}
