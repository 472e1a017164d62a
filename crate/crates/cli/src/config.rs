//! Run configuration: defaults, then a TOML file, then command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use covercraft::analytics::OrderSumParams;
use covercraft::cover::{ExponentBound, OffsetPreset, ReciprocalBand};
use covercraft::ntcore::FactorBudget;
use covercraft::search::SearchWindow;
use covercraft::{Error, Result, TargetConfig};

/// The offset set `L_N`, either spelled out or generated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OffsetSpec {
    List(Vec<i64>),
    Preset {
        preset: PresetName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prime: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    /// `{p, 2p, ..., Kp}` with `p` the least prime above `K` unless given.
    Multiples,
    Factorial,
}

impl OffsetSpec {
    pub fn resolve(&self, k: u64) -> Result<Vec<i64>> {
        match self {
            OffsetSpec::List(v) => Ok(v.clone()),
            OffsetSpec::Preset {
                preset: PresetName::Multiples,
                prime,
            } => OffsetPreset::Multiples(*prime).generate(k),
            OffsetSpec::Preset {
                preset: PresetName::Factorial,
                ..
            } => OffsetPreset::Factorials.generate(k),
        }
    }
}

impl FromStr for OffsetSpec {
    type Err = String;

    /// `5,7`, `multiples`, `multiples:11` or `factorial`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "factorial" {
            return Ok(OffsetSpec::Preset {
                preset: PresetName::Factorial,
                prime: None,
            });
        }
        if let Some(rest) = s.strip_prefix("multiples") {
            let prime = match rest.strip_prefix(':') {
                Some(p) => Some(p.parse().map_err(|e| format!("bad prime in {s:?}: {e}"))?),
                None if rest.is_empty() => None,
                None => return Err(format!("unknown offset preset {s:?}")),
            };
            return Ok(OffsetSpec::Preset {
                preset: PresetName::Multiples,
                prime,
            });
        }
        parse_list(s).map(OffsetSpec::List)
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<T>().map_err(|e| format!("bad list item {t:?}: {e}")))
        .collect()
}

/// Reciprocal band as a pair of fractions such as `"1/32"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandSpec {
    pub low: String,
    pub high: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "M")]
    pub m_bound: u64,
    #[serde(rename = "L_N")]
    pub offsets: OffsetSpec,
    /// Bases to mine; all of `2..=K` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<u64>>,
    pub p_max: u64,
    pub factor_budget: FactorBudget,
    /// The standard band `[M/(4K^3), M/(3K^3)]` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<BandSpec>,
    pub min_pairs_per_class: usize,
    #[serde(rename = "N")]
    pub n: u64,
    /// `floor((1 + 1/K) N)` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<u64>,
    pub exponent_bound: ExponentBound,
    pub seed: u64,
    pub samples: usize,
    pub grid: Vec<u64>,
    pub brun_multipliers: Vec<u64>,
    pub order_sum: OrderSumParams,
    pub outputs: Outputs,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: 2,
            m_bound: 2,
            offsets: OffsetSpec::Preset {
                preset: PresetName::Multiples,
                prime: None,
            },
            bases: None,
            p_max: 1000,
            factor_budget: FactorBudget::default(),
            band: None,
            min_pairs_per_class: 1,
            n: 5000,
            upper: None,
            exponent_bound: ExponentBound::Inclusive,
            seed: 0x5eed,
            samples: 10_000,
            grid: vec![2, 10, 100, 1000, 10_000, 100_000, 1_000_000, 10_000_000],
            brun_multipliers: vec![2, 4],
            order_sum: OrderSumParams::default(),
            outputs: Outputs::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serializes")
    }

    fn band(&self) -> Result<ReciprocalBand> {
        let Some(spec) = &self.band else {
            return Ok(ReciprocalBand::standard(self.m_bound, self.k.max(1)));
        };
        let parse = |s: &str| {
            Ratio::<u64>::from_str(s.trim()).map_err(|e| Error::Config(vec![format!("bad band bound {s:?}: {e}")]))
        };
        Ok(ReciprocalBand {
            low: parse(&spec.low)?,
            high: parse(&spec.high)?,
        })
    }

    /// The validated target; every cross-field problem is reported at once.
    pub fn target(&self) -> Result<TargetConfig> {
        let mut problems = Vec::new();
        let offsets = match self.offsets.resolve(self.k) {
            Ok(v) => v,
            Err(Error::Config(mut p)) => {
                problems.append(&mut p);
                Vec::new()
            }
            Err(e) => return Err(e),
        };
        let band = match self.band() {
            Ok(b) => Some(b),
            Err(Error::Config(mut p)) => {
                problems.append(&mut p);
                None
            }
            Err(e) => return Err(e),
        };
        let mut target = TargetConfig::new(self.k, offsets, self.m_bound);
        target.p_max = self.p_max;
        target.factor_budget = self.factor_budget;
        target.min_pairs_per_class = self.min_pairs_per_class;
        target.exponent_bound = self.exponent_bound;
        if let Some(band) = band {
            target.band = band;
        }
        if let Err(Error::Config(mut p)) = target.validate() {
            problems.append(&mut p);
        }
        for &a in self.bases.iter().flatten() {
            if a < 2 || a > self.k {
                problems.push(format!("base {a} is outside [2, K = {}]", self.k));
            }
        }
        if problems.is_empty() {
            Ok(target)
        } else {
            Err(Error::Config(problems))
        }
    }

    pub fn bases(&self) -> Vec<u64> {
        self.bases.clone().unwrap_or_else(|| (2..=self.k).collect())
    }

    pub fn window(&self, k: u64) -> Result<SearchWindow> {
        let standard = SearchWindow::for_target(self.n, k, self.exponent_bound)?;
        match self.upper {
            Some(upper) => SearchWindow::new(self.n, upper, standard.i_max),
            None => Ok(standard),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut cfg = RunConfig {
            offsets: OffsetSpec::List(vec![5, 7]),
            band: Some(BandSpec {
                low: "1/20".into(),
                high: "1/10".into(),
            }),
            upper: Some(300),
            ..Default::default()
        };
        cfg.outputs.system = Some("system.json".into());
        let text = cfg.to_toml();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
        let dflt = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&dflt.to_toml()).unwrap(), dflt);
    }

    #[test]
    fn partial_files_fill_defaults() {
        let cfg = RunConfig::from_toml("K = 3\nL_N = { preset = \"multiples\", prime = 7 }\n").unwrap();
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.target().unwrap().offsets, vec![7, 14, 21]);
        assert_eq!(cfg.p_max, 1000);
    }

    #[test]
    fn default_offsets_are_multiples() {
        assert_eq!(RunConfig::default().target().unwrap().offsets, vec![3, 6]);
    }

    #[test]
    fn offsets_parse_from_flags() {
        assert_eq!("5,7".parse::<OffsetSpec>().unwrap(), OffsetSpec::List(vec![5, 7]));
        assert_eq!(
            "multiples:11".parse::<OffsetSpec>().unwrap(),
            OffsetSpec::Preset {
                preset: PresetName::Multiples,
                prime: Some(11)
            }
        );
        assert!("multiplez".parse::<OffsetSpec>().is_err());
        assert!("5,x".parse::<OffsetSpec>().is_err());
    }

    #[test]
    fn problems_are_itemized() {
        let cfg = RunConfig {
            k: 3,
            offsets: OffsetSpec::List(vec![5, 5]),
            p_max: 1,
            bases: Some(vec![9]),
            ..Default::default()
        };
        match cfg.target() {
            Err(Error::Config(p)) => assert!(p.len() >= 4, "{p:?}"),
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::from_toml("K = \"two\"").is_err());
        assert!(RunConfig::from_toml("bogus = 1").is_err());
    }
}
