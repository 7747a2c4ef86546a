//! Flat key/value model configuration files.
//!
//! One file describes one model plus optional run defaults:
//!
//! ```text
//! [model]
//! drift = 1.0
//! drift_convention = c_prime      # c | c_prime | c_double_prime
//! sigma2 = 0.0
//!
//! [jumps]
//! family = compound_poisson_exp   # none | stable | tempered_stable |
//!                                 # compound_poisson | compound_poisson_exp
//! rate = 1.0
//! claim_rate = 1.0
//!
//! [run]                           # optional; flags override
//! q = 0.0
//! step = 0.0009765625
//! xmax = 5.0
//! ```
//!
//! Lines starting with `#` or `;` are comments. Keys are case-sensitive.

use std::collections::BTreeMap;
use std::path::Path;

use levyscale::grid::MixedDistribution;
use levyscale::levy::{DriftConvention, JumpMeasure, LevyModel};

#[derive(Debug, Default, Clone)]
pub struct RunDefaults {
    pub q: Option<f64>,
    pub step: Option<f64>,
    pub xmax: Option<f64>,
    pub tol: Option<f64>,
    pub max_terms: Option<usize>,
    pub method: Option<String>,
    pub richardson: Option<bool>,
    pub out: Option<String>,
}

pub struct FileConfig {
    pub model: LevyModel,
    pub run: RunDefaults,
}

type Section = BTreeMap<String, String>;

fn parse_sections(text: &str) -> Result<BTreeMap<String, Section>, String> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current = String::from("");
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| format!("line {}: unterminated section header", lineno + 1))?;
            current = name.trim().to_string();
            sections.entry(current.clone()).or_default();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
        sections
            .entry(current.clone())
            .or_default()
            .insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(sections)
}

fn get_f64(s: &Section, key: &str) -> Result<Option<f64>, String> {
    match s.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<f64>()
            .map(Some)
            .map_err(|_| format!("key {key}: bad number {v:?}")),
    }
}

fn need_f64(s: &Section, key: &str) -> Result<f64, String> {
    get_f64(s, key)?.ok_or_else(|| format!("missing key {key}"))
}

fn get_list(s: &Section, key: &str) -> Result<Vec<f64>, String> {
    match s.get(key) {
        None => Ok(Vec::new()),
        Some(v) => v
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("key {key}: bad number {t:?}"))
            })
            .collect(),
    }
}

pub fn load(path: &Path) -> Result<FileConfig, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let sections = parse_sections(&text)?;
    let empty = Section::new();
    let model_s = sections.get("model").unwrap_or(&empty);
    let jumps_s = sections.get("jumps").unwrap_or(&empty);
    let run_s = sections.get("run").unwrap_or(&empty);

    let sigma2 = get_f64(model_s, "sigma2")?.unwrap_or(0.0);
    let drift = get_f64(model_s, "drift")?.unwrap_or(0.0);
    let convention = match model_s
        .get("drift_convention")
        .map(String::as_str)
        .unwrap_or("c_prime")
    {
        "c" => DriftConvention::C,
        "c_prime" => DriftConvention::CPrime,
        "c_double_prime" => DriftConvention::CDoublePrime,
        other => return Err(format!("unknown drift_convention {other:?}")),
    };

    let family = jumps_s
        .get("family")
        .map(String::as_str)
        .unwrap_or("none");
    let model = match family {
        "none" => LevyModel::new(
            drift,
            convention,
            sigma2,
            JumpMeasure::CompoundPoisson {
                rate: 0.0,
                law: MixedDistribution::empty(),
            },
        ),
        "stable" => {
            let alpha = need_f64(jumps_s, "alpha")?;
            if model_s.contains_key("drift") || model_s.contains_key("sigma2") {
                LevyModel::new(drift, convention, sigma2, JumpMeasure::Stable { alpha })
            } else {
                LevyModel::stable(alpha)
            }
        }
        "tempered_stable" => {
            let alpha = need_f64(jumps_s, "alpha")?;
            let theta = need_f64(jumps_s, "theta")?;
            let scale = get_f64(jumps_s, "scale")?.unwrap_or(1.0);
            LevyModel::new(
                drift,
                convention,
                sigma2,
                JumpMeasure::TemperedStable {
                    alpha,
                    theta,
                    scale,
                },
            )
        }
        "compound_poisson" => {
            let rate = need_f64(jumps_s, "rate")?;
            let locations = get_list(jumps_s, "locations")?;
            let masses = get_list(jumps_s, "masses")?;
            if locations.len() != masses.len() || locations.is_empty() {
                return Err("compound_poisson needs matching nonempty locations/masses".into());
            }
            let law = MixedDistribution::from_atoms(
                locations.into_iter().zip(masses).collect(),
            )
            .map_err(|e| e.to_string())?;
            LevyModel::new(
                drift,
                convention,
                sigma2,
                JumpMeasure::CompoundPoisson { rate, law },
            )
        }
        "compound_poisson_exp" => {
            let rate = need_f64(jumps_s, "rate")?;
            let claim_rate = get_f64(jumps_s, "claim_rate")?.unwrap_or(1.0);
            if sigma2 != 0.0 || convention != DriftConvention::CPrime {
                return Err(
                    "compound_poisson_exp expects sigma2 = 0 and the c_prime convention".into(),
                );
            }
            LevyModel::compound_poisson_exp(drift, rate, claim_rate)
        }
        other => return Err(format!("unknown jump family {other:?}")),
    }
    .map_err(|e| e.to_string())?;

    let run = RunDefaults {
        q: get_f64(run_s, "q")?,
        step: get_f64(run_s, "step")?,
        xmax: get_f64(run_s, "xmax")?,
        tol: get_f64(run_s, "tol")?,
        max_terms: run_s
            .get("max_terms")
            .map(|v| v.parse::<usize>().map_err(|_| format!("bad max_terms {v:?}")))
            .transpose()?,
        method: run_s.get("method").cloned(),
        richardson: run_s
            .get("richardson")
            .map(|v| v.parse::<bool>().map_err(|_| format!("bad richardson {v:?}")))
            .transpose()?,
        out: run_s.get("out").cloned(),
    };
    Ok(FileConfig { model, run })
}
