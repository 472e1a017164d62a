//! Assembly and verification of the CRT covering system.
//!
//! Each entry ties a class `(a, j, k, l)` to a pair `(p, q)` and an offset
//! `I ∈ {0, 1}` with `j·a^I + l ≢ 0 (mod q)`. The residue `b` solves
//! `k·b + j·a^I + l ≡ 0 (mod q)` for every entry at once, so for any
//! `m ≡ b (mod W)` and `i ≡ I (mod p)` the prime `q` divides
//! `k·m + j·a^i + l`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{FormTriple, TargetConfig};
use super::pairs::PrimePair;
use super::partition::Partition;
use crate::error::{Error, Result};
use crate::natural::Natural;
use crate::ntcore::{crt_combine, mod_inverse};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CoverEntry {
    pub a: u64,
    pub triple: FormTriple,
    pub pair: PrimePair,
    /// Exponent offset `I`: smallest `i >= 0` with `j·a^i + l ≢ 0 (mod q)`.
    pub residue_i: u8,
}

impl CoverEntry {
    /// Whether exponent `i` falls in the class this entry covers.
    pub fn covers(&self, i: u64) -> bool {
        i % self.pair.p == self.residue_i as u64 % self.pair.p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringSystem {
    pub config: TargetConfig,
    pub entries: Vec<CoverEntry>,
    pub w: Natural,
    pub b: Natural,
}

/// Smallest `i ∈ {0, 1}` with `j·a^i + l ≢ 0 (mod q)`.
///
/// For `q > K(K-1)` both residues cannot vanish, since that would make `q`
/// divide `j(a - 1)`.
pub fn compute_i(a: u64, j: i64, l: i64, q: &BigUint) -> Result<u8> {
    let qi = BigInt::from(q.clone());
    let r0 = (BigInt::from(j) + l).mod_floor(&qi);
    if !r0.is_zero() {
        return Ok(0);
    }
    let r1 = (BigInt::from(j) * a + l).mod_floor(&qi);
    if !r1.is_zero() {
        return Ok(1);
    }
    Err(Error::Invariant(format!(
        "j·a^i + l ≡ 0 (mod {q}) for both i = 0 and i = 1 (a={a}, j={j}, l={l}); q is too small"
    )))
}

/// `k·b_q + j·a^I + l ≡ 0 (mod q)` solved for `b_q`.
fn local_residue(entry: &CoverEntry) -> Result<BigUint> {
    let q = entry.pair.q.as_biguint();
    let k_inv = mod_inverse(&BigUint::from(entry.triple.k), q).ok_or_else(|| {
        Error::Invariant(format!("k = {} is not invertible modulo {q}", entry.triple.k))
    })?;
    let qi = BigInt::from(q.clone());
    let offset = BigInt::from(entry.triple.j) * BigInt::from(entry.a).pow(entry.residue_i as u32)
        + entry.triple.l;
    let neg = (-offset).mod_floor(&qi).to_biguint().expect("reduced");
    Ok(neg * k_inv % q)
}

/// Solves the CRT system for the classes of `partition`.
pub fn build_covering_system(partition: &Partition, config: &TargetConfig) -> Result<CoveringSystem> {
    let mut entries = Vec::new();
    for class in &partition.classes {
        for pair in &class.pairs {
            let residue_i = compute_i(class.a, class.triple.j, class.triple.l, pair.q.as_biguint())?;
            entries.push(CoverEntry {
                a: class.a,
                triple: class.triple,
                pair: pair.clone(),
                residue_i,
            });
        }
    }
    assemble(config.clone(), entries)
}

/// Builds a system from explicit entries (used by loaders and tests).
pub fn assemble(config: TargetConfig, mut entries: Vec<CoverEntry>) -> Result<CoveringSystem> {
    entries.sort();
    let mut seen = BTreeSet::new();
    for e in &entries {
        if !seen.insert(&e.pair.q) {
            return Err(Error::DuplicateCoveringPrime { q: e.pair.q.to_string() });
        }
    }
    let congruences = entries
        .iter()
        .map(|e| Ok((local_residue(e)?, e.pair.q.as_biguint().clone())))
        .collect::<Result<Vec<_>>>()?;
    let (b, w) = crt_combine(&congruences)?;
    if !b.gcd(&w).is_one() && !w.is_one() {
        return Err(Error::Invariant(format!("gcd(b, W) != 1 for b = {b}")));
    }
    Ok(CoveringSystem {
        config,
        entries,
        w: w.into(),
        b: b.into(),
    })
}

impl CoveringSystem {
    /// Entries for one class `(a, triple)`.
    pub fn entries_for<'a>(&'a self, a: u64, triple: &'a FormTriple) -> impl Iterator<Item = &'a CoverEntry> + 'a {
        self.entries.iter().filter(move |e| e.a == a && &e.triple == triple)
    }

    /// SHA-256 of the canonical JSON document.
    pub fn digest(&self) -> String {
        let doc = SystemDocument::from_system(self);
        let bytes = serde_json::to_vec(&doc).expect("system document serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// Classes of `R × [2, K]` that received no entry.
    pub fn missing_classes(&self) -> Vec<(u64, FormTriple)> {
        let present: BTreeSet<(u64, FormTriple)> = self.entries.iter().map(|e| (e.a, e.triple)).collect();
        let mut missing = Vec::new();
        for a in self.config.bases() {
            for t in self.config.triples() {
                if !present.contains(&(a, t)) {
                    missing.push((a, t));
                }
            }
        }
        missing
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Random `(m, i)` draws checked by exact division.
    pub samples: usize,
    pub seed: u64,
    /// Fail when some class of `R × [2, K]` has no entry.
    pub require_complete: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 10_000,
            seed: 0x5eed,
            require_complete: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationFailure {
    pub check: String,
    /// Index into `entries`, when the failure is tied to one.
    pub entry: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub entries_checked: usize,
    pub samples_checked: usize,
    pub failures: Vec<VerificationFailure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, check: &str, entry: Option<usize>, detail: String) {
        self.failures.push(VerificationFailure {
            check: check.to_string(),
            entry,
            detail,
        });
    }
}

/// Re-checks every invariant of `system` from scratch. Never panics; all
/// problems end up in the returned report.
pub fn verify_covering_system(system: &CoveringSystem, options: &VerifyOptions) -> VerificationReport {
    let cfg = &system.config;
    let mut report = VerificationReport {
        entries_checked: system.entries.len(),
        samples_checked: 0,
        failures: Vec::new(),
    };
    if let Err(e) = cfg.validate() {
        report.fail("config", None, e.to_string());
    }
    let w = system.w.as_biguint();
    let b = system.b.as_biguint();

    let mut seen = BTreeSet::new();
    let mut product = BigUint::one();
    for (idx, e) in system.entries.iter().enumerate() {
        let q = e.pair.q.as_biguint();
        for problem in e.pair.check(cfg.m_bound, cfg.k) {
            report.fail("pair", Some(idx), problem);
        }
        if e.pair.a != e.a {
            report.fail("pair", Some(idx), format!("pair base {} != entry base {}", e.pair.a, e.a));
        }
        if e.a < 2 || e.a > cfg.k {
            report.fail("base", Some(idx), format!("a = {} outside [2, {}]", e.a, cfg.k));
        }
        if !cfg.contains_triple(&e.triple) {
            report.fail("triple", Some(idx), format!("{} is not in R", e.triple));
        }
        if !seen.insert(q) {
            report.fail("distinct", Some(idx), format!("q = {q} repeated"));
        }
        product *= q;
        if q < &BigUint::from(2u32) {
            continue;
        }
        match compute_i(e.a, e.triple.j, e.triple.l, q) {
            Ok(i) if i == e.residue_i => {}
            Ok(i) => report.fail("offset", Some(idx), format!("stored I = {} but minimal is {i}", e.residue_i)),
            Err(err) => report.fail("offset", Some(idx), err.to_string()),
        }
        let qi = BigInt::from(q.clone());
        let value = BigInt::from(e.triple.k) * BigInt::from(b.clone())
            + BigInt::from(e.triple.j) * BigInt::from(e.a).pow(e.residue_i as u32)
            + e.triple.l;
        if !value.mod_floor(&qi).is_zero() {
            report.fail(
                "congruence",
                Some(idx),
                format!("{q} does not divide k·b + j·a^I + l for {}", e.triple),
            );
        }
    }
    if &product != w {
        report.fail("modulus", None, format!("W = {w} is not the product of the covering primes"));
    }
    if b >= w {
        report.fail("residue", None, format!("b = {b} is not reduced modulo W"));
    }
    if !w.is_one() && !b.gcd(w).is_one() {
        report.fail("residue", None, "gcd(b, W) != 1".into());
    }
    if options.require_complete {
        for (a, t) in system.missing_classes() {
            report.fail("complete", None, format!("class a={a} {t} has no covering prime"));
        }
    }
    let sampleable = system
        .entries
        .iter()
        .all(|e| e.pair.q.as_biguint() >= &BigUint::from(2u32) && e.pair.p <= MAX_SAMPLED_ANCHOR);
    if !system.entries.is_empty() && options.samples > 0 && sampleable {
        report.samples_checked = sample_divisibility(system, options, &mut report);
    }
    report
}

const MAX_SAMPLED_ANCHOR: u64 = 1 << 20;

/// Draws `m = b + tW` and `i = I + s·p` and checks `q | k·m + j·a^i + l`
/// with exact integer division.
fn sample_divisibility(system: &CoveringSystem, options: &VerifyOptions, report: &mut VerificationReport) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut failures = 0usize;
    for _ in 0..options.samples {
        let idx = rng.random_range(0..system.entries.len());
        let e = &system.entries[idx];
        let t: u64 = rng.random_range(0..1 << 20);
        let s_lo = if e.residue_i == 0 { 1 } else { 0 };
        let s: u64 = rng.random_range(s_lo..s_lo + 8);
        let m = BigInt::from(system.b.as_biguint().clone()) + BigInt::from(t) * BigInt::from(system.w.as_biguint().clone());
        let i = e.residue_i as u64 + s * e.pair.p;
        let v = form_value(e.triple.k, &m, e.triple.j, e.a, i, e.triple.l);
        let q = BigInt::from(e.pair.q.as_biguint().clone());
        let (_, rem) = v.div_rem(&q);
        if !rem.is_zero() {
            failures += 1;
            if failures <= 10 {
                report.fail(
                    "sample",
                    Some(idx),
                    format!("q = {q} does not divide the form at m = b + {t}·W, i = {i}"),
                );
            }
        }
    }
    if failures > 10 {
        report.fail("sample", None, format!("{} further sampled failures", failures - 10));
    }
    options.samples
}

/// `k·m + j·a^i + l` in exact arithmetic.
pub fn form_value(k: u64, m: &BigInt, j: i64, a: u64, i: u64, l: i64) -> BigInt {
    BigInt::from(k) * m + BigInt::from(j) * BigInt::from(a).pow(i as u32) + l
}

pub const SYSTEM_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub a: u64,
    pub j: i64,
    pub k: u64,
    pub l: i64,
    pub p: u64,
    pub q: Natural,
    #[serde(rename = "I")]
    pub residue_i: u8,
}

/// Versioned on-disk form of a [`CoveringSystem`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDocument {
    pub version: u32,
    pub tool_version: String,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "M")]
    pub m_bound: u64,
    #[serde(rename = "L_N")]
    pub offsets: Vec<i64>,
    pub entries: Vec<EntryRecord>,
    #[serde(rename = "W")]
    pub w: Natural,
    pub b: Natural,
}

impl SystemDocument {
    pub fn from_system(system: &CoveringSystem) -> Self {
        SystemDocument {
            version: SYSTEM_SCHEMA_VERSION,
            tool_version: crate::TOOL_VERSION.to_string(),
            k: system.config.k,
            m_bound: system.config.m_bound,
            offsets: system.config.offsets.clone(),
            entries: system
                .entries
                .iter()
                .map(|e| EntryRecord {
                    a: e.a,
                    j: e.triple.j,
                    k: e.triple.k,
                    l: e.triple.l,
                    p: e.pair.p,
                    q: e.pair.q.clone(),
                    residue_i: e.residue_i,
                })
                .collect(),
            w: system.w.clone(),
            b: system.b.clone(),
        }
    }

    /// Rebuilds the system over `base` (whose K, M and L_N are replaced by
    /// the document's), re-validating every structural invariant.
    pub fn into_system(self, base: &TargetConfig) -> Result<CoveringSystem> {
        let system = self.into_system_unchecked(base)?;
        let report = verify_covering_system(
            &system,
            &VerifyOptions {
                samples: 0,
                seed: 0,
                require_complete: false,
            },
        );
        if !report.passed() {
            let items: Vec<String> = report.failures.iter().map(|f| format!("{}: {}", f.check, f.detail)).collect();
            return Err(Error::Invariant(items.join("; ")));
        }
        Ok(system)
    }

    /// Rebuilds the system with only the version checked, so that a
    /// damaged document can still be handed to [`verify_covering_system`].
    pub fn into_system_unchecked(self, base: &TargetConfig) -> Result<CoveringSystem> {
        if self.version != SYSTEM_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported covering system version {} (expected {SYSTEM_SCHEMA_VERSION})",
                self.version
            )));
        }
        let mut config = base.clone();
        config.k = self.k;
        config.m_bound = self.m_bound;
        config.offsets = self.offsets;
        let system = CoveringSystem {
            config,
            entries: self
                .entries
                .into_iter()
                .map(|r| CoverEntry {
                    a: r.a,
                    triple: FormTriple::new(r.j, r.k, r.l),
                    pair: PrimePair::new(r.a, r.p, r.q),
                    residue_i: r.residue_i,
                })
                .collect(),
            w: self.w,
            b: self.b,
        };
        Ok(system)
    }
}

pub fn system_to_json(system: &CoveringSystem) -> String {
    serde_json::to_string_pretty(&SystemDocument::from_system(system)).expect("system document serializes")
}

pub fn system_from_json(text: &str, base: &TargetConfig) -> Result<CoveringSystem> {
    let doc: SystemDocument = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    doc.into_system(base)
}

/// `|v|` is a unit or zero.
pub fn is_unit_or_zero(v: &BigInt) -> bool {
    v.abs() <= BigInt::one()
}
