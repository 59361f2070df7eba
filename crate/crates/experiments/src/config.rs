//! Experiment specification files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swipt_core::SystemParams;
use swipt_sca::{Scheme, ORACLE_MAX_APS};

use crate::error::{ExperimentError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    M,
    N,
    /// `N` varies while `M * N` stays at `product`.
    MN,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::M => "M",
            SweepVariable::N => "N",
            SweepVariable::MN => "N (fixed MN)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<usize>,
    #[serde(default)]
    pub product: Option<usize>,
}

/// One experiment as read from TOML.
///
/// `base` lists only the parameters that differ from the reference setup;
/// `M`, `N`, `K_d` and `L` are required. A scalar `he_target` sets every
/// EU target at once.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    /// Free-text note carried into every output (e.g. grid substitutions).
    pub note: String,
    pub base: SystemParams,
    pub sweep: Option<Sweep>,
    pub n_drops: usize,
    pub n_mc_trials: usize,
    pub schemes: Vec<Scheme>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    name: String,
    #[serde(default)]
    note: String,
    base: toml::Table,
    #[serde(default)]
    sweep: Option<Sweep>,
    #[serde(default = "one")]
    n_drops: usize,
    #[serde(default)]
    n_mc_trials: usize,
    #[serde(default)]
    schemes: Vec<String>,
    #[serde(default)]
    master_seed: u64,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

fn one() -> usize {
    1
}

fn spec_err(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Spec(msg.into())
}

fn base_params(mut table: toml::Table) -> Result<SystemParams> {
    let dim = |table: &toml::Table, key: &str| -> Result<usize> {
        table
            .get(key)
            .and_then(toml::Value::as_integer)
            .and_then(|v| usize::try_from(v).ok())
            .ok_or_else(|| spec_err(format!("base.{key} must be a nonnegative integer")))
    };
    let (m, n, k_d, l) = (dim(&table, "M")?, dim(&table, "N")?, dim(&table, "K_d")?, dim(&table, "L")?);
    let he_target = table.remove("he_target");
    let mut merged = toml::Table::try_from(SystemParams::reference(m, n, k_d, l)).map_err(|e| spec_err(e.to_string()))?;
    if let Some(v) = he_target {
        let t = v
            .as_float()
            .or_else(|| v.as_integer().map(|i| i as f64))
            .ok_or_else(|| spec_err("base.he_target must be a number"))?;
        merged.insert("he_targets".into(), toml::Value::Array(vec![toml::Value::Float(t); l]));
    }
    merged.extend(table);
    let params: SystemParams = merged.try_into().map_err(|e: toml::de::Error| spec_err(e.to_string()))?;
    params.validate().map_err(|e| spec_err(format!("base: {e}")))?;
    Ok(params)
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SpecFile = toml::from_str(text).map_err(|e| spec_err(e.to_string()))?;
        let schemes = file
            .schemes
            .iter()
            .map(|s| Scheme::parse(s).ok_or_else(|| spec_err(format!("unknown scheme '{s}'"))))
            .collect::<Result<Vec<_>>>()?;
        let spec = ExperimentSpec {
            output_dir: file.output_dir.unwrap_or_else(|| PathBuf::from("out").join(&file.name)),
            name: file.name,
            note: file.note,
            base: base_params(file.base)?,
            sweep: file.sweep,
            n_drops: file.n_drops,
            n_mc_trials: file.n_mc_trials,
            schemes,
            master_seed: file.master_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_drops == 0 {
            return Err(spec_err("n_drops must be at least 1"));
        }
        let mut seen = Vec::new();
        for s in &self.schemes {
            if seen.contains(s) {
                return Err(spec_err(format!("scheme '{}' listed twice", s.name())));
            }
            seen.push(*s);
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(spec_err("sweep.values is empty"));
            }
            match (sweep.variable, sweep.product) {
                (SweepVariable::MN, None) => return Err(spec_err("an MN sweep needs sweep.product")),
                (SweepVariable::M | SweepVariable::N, Some(_)) => {
                    return Err(spec_err("sweep.product only applies to MN sweeps"))
                }
                _ => {}
            }
        }
        for (value, params) in self.points()? {
            params
                .validate()
                .map_err(|e| spec_err(format!("sweep value {value}: {e}")))?;
            if self.schemes.contains(&Scheme::Oracle) && params.m > ORACLE_MAX_APS {
                return Err(spec_err(format!(
                    "oracle requested at M = {} (enumeration limit {ORACLE_MAX_APS})",
                    params.m
                )));
            }
        }
        Ok(())
    }

    /// Parameters at every sweep point, tagged with the sweep value. Without
    /// a sweep there is a single point tagged with `M`.
    pub fn points(&self) -> Result<Vec<(usize, SystemParams)>> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![(self.base.m, self.base.clone())]);
        };
        sweep
            .values
            .iter()
            .map(|&v| {
                let (m, n) = match sweep.variable {
                    SweepVariable::M => (v, self.base.n),
                    SweepVariable::N => (self.base.m, v),
                    SweepVariable::MN => {
                        let p = sweep.product.unwrap_or(0);
                        if v == 0 || p % v != 0 {
                            return Err(spec_err(format!("N = {v} does not divide MN = {p}")));
                        }
                        (p / v, v)
                    }
                };
                Ok((v, self.base.with_layout(m, n)))
            })
            .collect()
    }

    pub fn sweep_label(&self) -> &'static str {
        self.sweep.as_ref().map_or("M", |s| s.variable.name())
    }
}
