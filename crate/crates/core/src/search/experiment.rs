use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forms::{find_candidate_primes, verify_forms_indexed, CoverIndex, OutcomeStatus};
use super::window::SearchWindow;
use crate::cover::{CoveringSystem, ExponentBound, FormTriple, TargetConfig};
use crate::error::{Error, Result};
use crate::natural::Natural;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Outcome counts for one candidate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub witnessed: u64,
    pub checked: u64,
    pub prime_exceptions: u64,
    pub unit_or_zero: u64,
    pub skipped: u64,
}

impl OutcomeCounts {
    fn record(&mut self, status: &OutcomeStatus) {
        match status {
            OutcomeStatus::CompositeWitnessed { .. } => self.witnessed += 1,
            OutcomeStatus::CompositeChecked => self.checked += 1,
            OutcomeStatus::PrimeException => self.prime_exceptions += 1,
            OutcomeStatus::UnitOrZeroException => self.unit_or_zero += 1,
            OutcomeStatus::SkippedZeroOffset => self.skipped += 1,
        }
    }

    pub fn exceptions(&self) -> u64 {
        self.prime_exceptions + self.unit_or_zero
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub m: u64,
    pub survivor: bool,
    #[serde(flatten)]
    pub counts: OutcomeCounts,
}

/// Exceptions seen at one slot `(a, i, j, k, l)` across candidates; the
/// prime column is the empirical count of primes `m` in the class with
/// `|k·m + j·a^i + l|` prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotTally {
    pub a: u64,
    pub i: u64,
    pub j: i64,
    pub k: u64,
    pub l: i64,
    pub prime: u64,
    pub unit_or_zero: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSummary {
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "L_N")]
    pub offsets: Vec<i64>,
    #[serde(rename = "M")]
    pub m_bound: u64,
    pub exponent_bound: ExponentBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub window: SearchWindow,
    pub config: ConfigSummary,
    pub system_digest: String,
    #[serde(rename = "W")]
    pub w: Natural,
    pub b: Natural,
    pub candidates: Vec<CandidateRecord>,
    /// Number of primes in the class within the window.
    pub q_n: u64,
    /// Number of those with no exceptional form.
    pub q: u64,
    pub survivors: Vec<u64>,
    pub tallies: Vec<SlotTally>,
    #[serde(skip)]
    pub wall_time: Option<Duration>,
}

type Exception = ((u64, u64, FormTriple), OutcomeStatus);

/// Runs the window search for `system` over the triples of `config`.
pub fn run_experiment(config: &TargetConfig, window: &SearchWindow, system: &CoveringSystem) -> Result<SearchReport> {
    let started = Instant::now();
    let candidates = find_candidate_primes(window, system);
    let index = CoverIndex::new(system);
    let per_candidate: Vec<(CandidateRecord, Vec<Exception>)> = candidates
        .par_iter()
        .map(|&m| {
            let outcomes = verify_forms_indexed(m, config, window, system, &index)?;
            let mut counts = OutcomeCounts::default();
            let mut exceptions = Vec::new();
            for o in outcomes {
                counts.record(&o.status);
                if o.status.is_exception() {
                    exceptions.push(((o.a, o.i, o.triple), o.status));
                }
            }
            let record = CandidateRecord {
                m,
                survivor: counts.exceptions() == 0,
                counts,
            };
            Ok::<_, Error>((record, exceptions))
        })
        .collect::<Result<_>>()?;

    let mut tallies: BTreeMap<(u64, u64, FormTriple), (u64, u64)> = BTreeMap::new();
    let mut records = Vec::with_capacity(per_candidate.len());
    for (record, exceptions) in per_candidate {
        for (slot, status) in exceptions {
            let entry = tallies.entry(slot).or_default();
            match status {
                OutcomeStatus::PrimeException => entry.0 += 1,
                _ => entry.1 += 1,
            }
        }
        records.push(record);
    }
    let survivors: Vec<u64> = records.iter().filter(|r| r.survivor).map(|r| r.m).collect();
    Ok(SearchReport {
        window: *window,
        config: ConfigSummary {
            k: config.k,
            offsets: config.offsets.clone(),
            m_bound: config.m_bound,
            exponent_bound: config.exponent_bound,
        },
        system_digest: system.digest(),
        w: system.w.clone(),
        b: system.b.clone(),
        q_n: records.len() as u64,
        q: survivors.len() as u64,
        survivors,
        candidates: records,
        tallies: tallies
            .into_iter()
            .map(|((a, i, t), (prime, unit_or_zero))| SlotTally {
                a,
                i,
                j: t.j,
                k: t.k,
                l: t.l,
                prime,
                unit_or_zero,
            })
            .collect(),
        wall_time: Some(started.elapsed()),
    })
}

/// One line of the JSON-lines report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum ReportRecord {
    Header {
        schema_version: u32,
        tool_version: String,
        config: ConfigSummary,
        system_digest: String,
        window: SearchWindow,
        #[serde(rename = "W")]
        w: Natural,
        b: Natural,
    },
    Candidate {
        #[serde(with = "decimal_u64")]
        m: u64,
        survivor: bool,
        #[serde(flatten)]
        counts: OutcomeCounts,
    },
    Trailer {
        #[serde(rename = "Q_N")]
        q_n: u64,
        #[serde(rename = "Q")]
        q: u64,
        #[serde(with = "decimal_u64_list")]
        survivors: Vec<u64>,
        tallies: Vec<SlotTally>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        wall_time_ms: Option<u64>,
    },
}

mod decimal_u64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

mod decimal_u64_list {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl SearchReport {
    /// Header, one record per candidate, trailer. Wall time is written only
    /// when `with_timing` is set, so reruns are byte-identical by default.
    pub fn to_json_lines(&self, with_timing: bool) -> String {
        let mut lines = Vec::with_capacity(self.candidates.len() + 2);
        let header = ReportRecord::Header {
            schema_version: REPORT_SCHEMA_VERSION,
            tool_version: crate::TOOL_VERSION.to_string(),
            config: self.config.clone(),
            system_digest: self.system_digest.clone(),
            window: self.window,
            w: self.w.clone(),
            b: self.b.clone(),
        };
        lines.push(header);
        for c in &self.candidates {
            lines.push(ReportRecord::Candidate {
                m: c.m,
                survivor: c.survivor,
                counts: c.counts,
            });
        }
        lines.push(ReportRecord::Trailer {
            q_n: self.q_n,
            q: self.q,
            survivors: self.survivors.clone(),
            tallies: self.tallies.clone(),
            wall_time_ms: if with_timing {
                self.wall_time.map(|d| d.as_millis() as u64)
            } else {
                None
            },
        });
        let mut out = String::new();
        for rec in lines {
            out.push_str(&serde_json::to_string(&rec).expect("report record serializes"));
            out.push('\n');
        }
        out
    }
}

/// Parses a JSON-lines report back into its records, checking the schema
/// version of the header.
pub fn parse_report(text: &str) -> Result<Vec<ReportRecord>> {
    let records: Vec<ReportRecord> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::Schema(e.to_string())))
        .collect::<Result<_>>()?;
    match records.first() {
        Some(ReportRecord::Header { schema_version, .. }) if *schema_version == REPORT_SCHEMA_VERSION => Ok(records),
        Some(ReportRecord::Header { schema_version, .. }) => {
            Err(Error::Schema(format!("unsupported report version {schema_version}")))
        }
        _ => Err(Error::Schema("report does not start with a header".into())),
    }
}
