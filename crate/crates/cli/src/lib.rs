//! Subcommands of the `covercraft` binary. Each stage reads and writes one
//! versioned file so intermediates can be inspected or replaced.

pub mod config;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use covercraft::analytics::diagnostics;
use covercraft::cover::{
    build_from_pairs, coverage_density, density_f64, pairs::order_is_anchor, system_to_json, verify_covering_system,
    PairMining, SystemDocument, VerifyOptions,
};
use covercraft::ntcore::FactorBudget;
use covercraft::search::{brute_oracle, run_experiment, SearchWindow, ORACLE_MAX_WIDTH};
use covercraft::{CoveringSystem, Error, PrimePair, TargetConfig, TOOL_VERSION};

pub use config::RunConfig;

pub const PAIRS_SCHEMA_VERSION: u32 = 1;
pub const ORACLE_SCHEMA_VERSION: u32 = 1;

pub mod exit {
    pub const OK: u8 = 0;
    pub const CONFIG: u8 = 1;
    pub const RESOURCE: u8 = 2;
    pub const VERIFICATION: u8 = 3;
}

/// A failure with its process exit code and itemized messages.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub messages: Vec<String>,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            messages: vec![message.into()],
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.messages {
            writeln!(f, "error: {m}")?;
        }
        Ok(())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config(_) | Error::Domain(_) | Error::Schema(_) => exit::CONFIG,
            Error::Insufficient(_) | Error::Guard(_) | Error::BudgetExceeded { .. } => exit::RESOURCE,
            Error::Invariant(_) | Error::CrtConflict { .. } | Error::DuplicateCoveringPrime { .. } => {
                exit::VERIFICATION
            }
        };
        let messages = match e {
            Error::Config(items) => items,
            Error::Insufficient(rows) => rows
                .iter()
                .map(|s| format!("a = {}: needs {} pairs, has {}", s.a, s.needed, s.available))
                .collect(),
            other => vec![other.to_string()],
        };
        CliError { code, messages }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Pair-mining output with the full factorization transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairsDocument {
    pub schema_version: u32,
    pub tool_version: String,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "M")]
    pub m_bound: u64,
    pub p_max: u64,
    pub factor_budget: FactorBudget,
    pub minings: Vec<PairMining>,
}

impl PairsDocument {
    pub fn pairs(&self) -> Vec<PrimePair> {
        self.minings.iter().flat_map(|m| m.pairs.iter().cloned()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleDocument {
    pub schema_version: u32,
    pub tool_version: String,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "L_N")]
    pub offsets: Vec<i64>,
    pub window: SearchWindow,
    pub survivors: Vec<String>,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(exit::CONFIG, format!("cannot read {}: {e}", path.display())))
}

/// Writes `text` to `path`, or to stdout when there is no path.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::new(exit::CONFIG, format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::new(exit::CONFIG, format!("cannot write to stdout: {e}"))),
    }
}

fn required<'a>(path: Option<&'a PathBuf>, what: &str, flag: &str) -> CliResult<&'a PathBuf> {
    path.ok_or_else(|| CliError::new(exit::CONFIG, format!("no {what} file given (use {flag} or the config file)")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("document serializes");
    s.push('\n');
    s
}

/// Mines pairs for every requested base. With `require_full`, each base
/// must supply enough distinct anchors for every class; otherwise only a
/// base with no pair at all is a shortfall.
pub fn cmd_pairs(cfg: &RunConfig, require_full: bool) -> CliResult<u8> {
    let target = cfg.target()?;
    let minings = cfg
        .bases()
        .into_iter()
        .map(|a| covercraft::cover::find_prime_pairs(a, target.m_bound, target.p_max, target.k, &target.factor_budget))
        .collect::<covercraft::Result<Vec<_>>>()?;
    let doc = PairsDocument {
        schema_version: PAIRS_SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        k: target.k,
        m_bound: target.m_bound,
        p_max: target.p_max,
        factor_budget: target.factor_budget,
        minings,
    };
    emit(cfg.outputs.pairs.as_deref(), &to_json(&doc))?;

    let needed = target.triples().len() * target.min_pairs_per_class;
    let mut shortfall = Vec::new();
    for m in &doc.minings {
        let mut anchors: Vec<u64> = m.pairs.iter().map(|p| p.p).collect();
        anchors.dedup();
        eprintln!(
            "a = {}: {} pairs over {} anchors, {} anchors skipped by the factor budget",
            m.a,
            m.pairs.len(),
            anchors.len(),
            m.skipped().len()
        );
        if anchors.is_empty() || (require_full && anchors.len() < needed) {
            shortfall.push(format!("a = {}: {} usable anchors, {} needed", m.a, anchors.len(), needed));
        }
    }
    if shortfall.is_empty() {
        Ok(exit::OK)
    } else {
        Err(CliError {
            code: exit::RESOURCE,
            messages: shortfall,
        })
    }
}

/// Reads a pairs file and re-checks every pair against `target`.
pub fn load_pairs(path: &Path, target: &TargetConfig) -> CliResult<Vec<PrimePair>> {
    let doc: PairsDocument =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::new(exit::CONFIG, format!("{}: {e}", path.display())))?;
    if doc.schema_version != PAIRS_SCHEMA_VERSION {
        return Err(CliError::new(
            exit::CONFIG,
            format!("unsupported pairs schema version {}", doc.schema_version),
        ));
    }
    let pairs = doc.pairs();
    let mut problems = Vec::new();
    for pair in &pairs {
        for p in pair.check(target.m_bound, target.k) {
            problems.push(format!("pair (a={}, p={}, q={}): {p}", pair.a, pair.p, pair.q));
        }
        if !order_is_anchor(pair.a, pair.p, pair.q.as_biguint()) {
            problems.push(format!("pair (a={}, p={}, q={}): order check failed", pair.a, pair.p, pair.q));
        }
    }
    if problems.is_empty() {
        Ok(pairs)
    } else {
        problems.sort();
        problems.dedup();
        Err(CliError {
            code: exit::VERIFICATION,
            messages: problems,
        })
    }
}

pub fn cmd_cover(cfg: &RunConfig, pairs_path: Option<&PathBuf>) -> CliResult<u8> {
    let target = cfg.target()?;
    let path = required(pairs_path.or(cfg.outputs.pairs.as_ref()), "pairs", "--pairs")?;
    let pairs = load_pairs(path, &target)?;
    let (partition, system) = build_from_pairs(&target, &pairs)?;
    let report = verify_covering_system(&system, &verify_options(cfg, true));
    if !report.passed() {
        return Err(verification_error(&report));
    }
    eprintln!("W has {} bits; {} entries", system.w.bits(), system.entries.len());
    for class in &partition.classes {
        let anchors: Vec<u64> = class.pairs.iter().map(|p| p.p).collect();
        let density = coverage_density(&anchors).map(|d| density_f64(&d)).unwrap_or(f64::NAN);
        eprintln!(
            "a = {} {}: anchors {:?}, sum 1/p = {:.6}{}, density {:.6}",
            class.a,
            class.triple,
            anchors,
            class.reciprocal_sum,
            if class.in_band { "" } else { " (outside band)" },
            density
        );
    }
    if !partition.band_feasible() {
        eprintln!(
            "warning: some classes miss the reciprocal band [{}, {}]",
            partition.band.low, partition.band.high
        );
    }
    let mut text = system_to_json(&system);
    text.push('\n');
    emit(cfg.outputs.system.as_deref(), &text)?;
    Ok(exit::OK)
}

fn verify_options(cfg: &RunConfig, require_complete: bool) -> VerifyOptions {
    VerifyOptions {
        samples: cfg.samples,
        seed: cfg.seed,
        require_complete,
    }
}

fn verification_error(report: &covercraft::VerificationReport) -> CliError {
    CliError {
        code: exit::VERIFICATION,
        messages: report
            .failures
            .iter()
            .map(|f| match f.entry {
                Some(i) => format!("[{}] entry {i}: {}", f.check, f.detail),
                None => format!("[{}] {}", f.check, f.detail),
            })
            .collect(),
    }
}

fn load_document(path: &Path) -> CliResult<SystemDocument> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::new(exit::CONFIG, format!("{}: {e}", path.display())))
}

/// Loads a covering system, rejecting any structural damage.
pub fn load_system(path: &Path, target: &TargetConfig) -> CliResult<CoveringSystem> {
    Ok(load_document(path)?.into_system(target)?)
}

pub fn cmd_search(cfg: &RunConfig, system_path: Option<&PathBuf>, check_oracle: bool, timing: bool) -> CliResult<u8> {
    let target = cfg.target()?;
    let path = required(system_path.or(cfg.outputs.system.as_ref()), "system", "--system")?;
    let system = load_system(path, &target)?;
    let target = &system.config;
    target.check_window(cfg.n)?;
    let window = cfg.window(target.k)?;
    if check_oracle && window.width() > ORACLE_MAX_WIDTH {
        return Err(CliError::new(
            exit::RESOURCE,
            format!("window width {} exceeds the oracle limit {ORACLE_MAX_WIDTH}", window.width()),
        ));
    }
    let report = run_experiment(target, &window, &system)?;
    emit(cfg.outputs.report.as_deref(), &report.to_json_lines(timing))?;
    eprintln!("Q_N = {}, Q = {}", report.q_n, report.q);
    if check_oracle {
        let truth = brute_oracle(&window, target)?;
        let stray: Vec<String> = report
            .survivors
            .iter()
            .filter(|m| truth.binary_search(m).is_err())
            .map(|m| format!("survivor {m} is not in the oracle output"))
            .collect();
        if !stray.is_empty() {
            return Err(CliError {
                code: exit::VERIFICATION,
                messages: stray,
            });
        }
        eprintln!("oracle: {} survivors in the window, containment holds", truth.len());
    }
    Ok(exit::OK)
}

pub fn cmd_oracle(cfg: &RunConfig) -> CliResult<u8> {
    let target = cfg.target()?;
    target.check_window(cfg.n)?;
    let window = cfg.window(target.k)?;
    let survivors = brute_oracle(&window, &target)?;
    let doc = OracleDocument {
        schema_version: ORACLE_SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        k: target.k,
        offsets: target.offsets.clone(),
        window,
        survivors: survivors.iter().map(u64::to_string).collect(),
    };
    emit(cfg.outputs.oracle.as_deref(), &to_json(&doc))?;
    Ok(exit::OK)
}

pub fn cmd_analyze(cfg: &RunConfig) -> CliResult<u8> {
    let table = diagnostics(&cfg.grid, &cfg.brun_multipliers, &cfg.order_sum)?;
    emit(cfg.outputs.diagnostics.as_deref(), &to_json(&table))?;
    let failing: Vec<String> = table
        .rows
        .iter()
        .filter(|r| !r.mertens_holds || r.pi_holds == Some(false))
        .map(|r| format!("bounds fail at x = {}", r.x))
        .collect();
    if failing.is_empty() {
        Ok(exit::OK)
    } else {
        Err(CliError {
            code: exit::VERIFICATION,
            messages: failing,
        })
    }
}

/// Full re-verification of a system file; the itemized report goes to
/// the output and any failure exits with the verification code.
pub fn cmd_verify(
    cfg: &RunConfig,
    system_path: Option<&PathBuf>,
    allow_incomplete: bool,
    out: Option<&Path>,
) -> CliResult<u8> {
    let target = cfg.target()?;
    let path = required(system_path.or(cfg.outputs.system.as_ref()), "system", "--system")?;
    let system = load_document(path)?.into_system_unchecked(&target)?;
    let report = verify_covering_system(&system, &verify_options(cfg, !allow_incomplete));
    emit(out, &to_json(&report))?;
    if report.passed() {
        eprintln!(
            "verified {} entries and {} samples",
            report.entries_checked, report.samples_checked
        );
        Ok(exit::OK)
    } else {
        Err(verification_error(&report))
    }
}
