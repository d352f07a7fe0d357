//! Run configuration: a flat `key = value` file plus `--set` overrides.
//!
//! Grammar: one `key = value` per line; `#` starts a comment; blank lines
//! are ignored; later assignments win. Relative paths are resolved against
//! the directory of the file that names them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fer::{heterodyne_printed, homodyne_reference, FerModel};
use crate::model::{ChannelParams, FiberLink, FiniteSizeConfig, Protocol, DEFAULT_CONFIDENCE_COEFF, DEFAULT_EPSILON};
use crate::optimize::{FerSource, MethodSettings};

/// Seed used when neither the file nor `--seed` gives one.
pub const DEFAULT_SEED: u64 = 20_211_001;

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "CVQKD_CONFIG";

const BUILTIN_PREFIX: &str = "builtin:";

const SCALAR_KEYS: &[&str] = &[
    "transmittance",
    "distance_km",
    "attenuation_db_per_km",
    "excess_noise_snu",
    "detector_efficiency",
    "electronic_noise_snu",
    "protocol",
    "block_size",
    "key_length",
    "key_ratio",
    "eps_pe",
    "eps_bar",
    "eps_pa",
    "confidence_coeff",
    "code_rate",
    "fer_model",
    "fer_mode",
    "output_dir",
    "seed",
    "fixed_snr",
    "assumed_beta",
    "assumed_fer",
    "second.transmittance",
    "second.excess_noise_snu",
    "second.electronic_noise_snu",
    "second.detector_efficiency",
    "applied_va",
    "trials",
    "dim",
    "max_iter",
];

const CODE_FIELDS: &[&str] = &["rate", "fer_model", "alist"];

/// A value together with the directory used to resolve it as a path.
#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    base: PathBuf,
    origin: String,
}

/// Where a FER model comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelRef {
    Builtin(String),
    File(PathBuf),
}

impl ModelRef {
    fn parse(value: &str, base: &Path) -> Self {
        match value.strip_prefix(BUILTIN_PREFIX) {
            Some(name) => Self::Builtin(name.to_string()),
            None => Self::File(base.join(value)),
        }
    }

    pub fn load(&self) -> Result<FerModel> {
        match self {
            Self::Builtin(name) => match name.as_str() {
                "homodyne" | "homodyne-reference" => Ok(homodyne_reference()),
                "heterodyne-printed" => Ok(heterodyne_printed()),
                other => Err(Error::invalid(
                    "fer_model",
                    format!("unknown builtin `{other}` (homodyne, heterodyne-printed)"),
                )),
            },
            Self::File(path) => FerModel::load(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FerMode {
    Reanchor,
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeEntry {
    pub id: String,
    pub rate: f64,
    pub fer_model: ModelRef,
    pub alist: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ChannelParams,
    pub protocol: Protocol,
    pub finite_size: FiniteSizeConfig,
    pub code_rate: f64,
    pub fer_model: ModelRef,
    pub fer_mode: FerMode,
    pub codes: Vec<CodeEntry>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub methods: MethodSettings,
    pub second: Option<ChannelParams>,
    pub applied_va: Option<f64>,
    pub trials: u64,
    pub dim: usize,
    pub max_iter: usize,
}

/// Raw assignments in the order they take effect.
#[derive(Debug, Clone, Default)]
pub struct ConfigSource {
    entries: BTreeMap<String, Entry>,
}

impl ConfigSource {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut src = Self::default();
        src.merge_text(&text, &base, &path.display().to_string())?;
        Ok(src)
    }

    pub fn merge_text(&mut self, text: &str, base: &Path, source_name: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source_name, i + 1, format!("expected `key = value`, got `{line}`")))?;
            let key = k.trim();
            check_key(key).map_err(|m| Error::parse(source_name, i + 1, m))?;
            self.entries.insert(
                key.to_string(),
                Entry {
                    value: v.trim().to_string(),
                    base: base.to_path_buf(),
                    origin: format!("{source_name}:{}", i + 1),
                },
            );
        }
        Ok(())
    }

    /// Applies one `key=value` override; paths resolve against the working
    /// directory.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::invalid("set", format!("`{assignment}` is not key=value")))?;
        let key = k.trim();
        check_key(key).map_err(|m| Error::invalid("set", m))?;
        self.entries.insert(
            key.to_string(),
            Entry {
                value: v.trim().to_string(),
                base: PathBuf::new(),
                origin: "--set".into(),
            },
        );
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|e| {
                e.value
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(static_key(key), format!("`{}` ({}) is not a number", e.value, e.origin)))
            })
            .transpose()
    }

    fn count(&self, key: &str) -> Result<Option<u64>> {
        match self.number(key)? {
            None => Ok(None),
            Some(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(Some(x as u64)),
            Some(x) => Err(Error::invalid(static_key(key), format!("{x} is not a non-negative integer"))),
        }
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let num = |k: &str, default: f64| -> Result<f64> { Ok(self.number(k)?.unwrap_or(default)) };

        let transmittance = match (self.number("transmittance")?, self.number("distance_km")?) {
            (Some(_), Some(_)) => {
                return Err(Error::invalid("transmittance", "give either transmittance or distance_km, not both"))
            }
            (Some(t), None) => Some(t),
            (None, _) => None,
        };
        let xi = num("excess_noise_snu", 0.005)?;
        let eta = num("detector_efficiency", 0.606)?;
        let vel = num("electronic_noise_snu", 0.041)?;
        let params = match transmittance {
            Some(t) => ChannelParams::new(t, xi, eta, vel)?,
            None => ChannelParams::from_fiber(
                num("distance_km", 50.0)?,
                num("attenuation_db_per_km", FiberLink::DEFAULT_ATTENUATION)?,
                xi,
                eta,
                vel,
            )?,
        };

        let protocol = match self.get("protocol") {
            Some(e) => e.value.parse()?,
            None => Protocol::HomodyneGg02,
        };

        let mut fs = match self.get("block_size").map(|e| e.value.as_str()) {
            None | Some("asymptotic") | Some("inf") => {
                let ratio = num("key_ratio", 0.5)?;
                FiniteSizeConfig::asymptotic_with_ratio(ratio)
            }
            Some(_) => {
                let n_total = self.count("block_size")?.expect("present");
                match self.count("key_length")? {
                    Some(n) => FiniteSizeConfig::finite(n_total, n)?,
                    None => FiniteSizeConfig::half_split(n_total)?,
                }
            }
        };
        fs = fs
            .with_epsilons(
                num("eps_pe", DEFAULT_EPSILON)?,
                num("eps_bar", DEFAULT_EPSILON)?,
                num("eps_pa", DEFAULT_EPSILON)?,
            )
            .with_confidence_coeff(num("confidence_coeff", DEFAULT_CONFIDENCE_COEFF)?);
        fs.validate()?;

        let fer_model = match self.get("fer_model") {
            Some(e) => ModelRef::parse(&e.value, &e.base),
            None => ModelRef::Builtin("homodyne".into()),
        };
        let fer_mode = match self.get("fer_mode").map(|e| e.value.as_str()) {
            None | Some("reanchor") => FerMode::Reanchor,
            Some("fixed") => FerMode::Fixed,
            Some(other) => return Err(Error::invalid("fer_mode", format!("`{other}` is not reanchor or fixed"))),
        };

        let mut ids: Vec<&str> = self
            .entries
            .keys()
            .filter_map(|k| k.strip_prefix("code.")?.rsplit_once('.').map(|(id, _)| id))
            .collect();
        ids.dedup();
        let mut codes = Vec::new();
        for id in ids {
            let rate = self
                .number(&format!("code.{id}.rate"))?
                .ok_or_else(|| Error::invalid("code", format!("code `{id}` has no rate")))?;
            let fer = self
                .get(&format!("code.{id}.fer_model"))
                .ok_or_else(|| Error::invalid("code", format!("code `{id}` has no fer_model")))?;
            let alist = self.get(&format!("code.{id}.alist")).map(|e| e.base.join(&e.value));
            codes.push(CodeEntry {
                id: id.to_string(),
                rate,
                fer_model: ModelRef::parse(&fer.value, &fer.base),
                alist,
            });
        }
        // Order codes by rate, then id, so file order does not matter.
        codes.sort_by(|a, b| a.rate.total_cmp(&b.rate).then_with(|| a.id.cmp(&b.id)));

        let second = if self.entries.keys().any(|k| k.starts_with("second.")) {
            Some(ChannelParams::new(
                num("second.transmittance", params.transmittance)?,
                num("second.excess_noise_snu", params.excess_noise)?,
                num("second.detector_efficiency", params.detector_efficiency)?,
                num("second.electronic_noise_snu", params.electronic_noise)?,
            )?)
        } else {
            None
        };

        let defaults = MethodSettings::default();
        Ok(RunConfig {
            params,
            protocol,
            finite_size: fs,
            code_rate: num("code_rate", 0.1)?,
            fer_model,
            fer_mode,
            codes,
            output_dir: self
                .get("output_dir")
                .map(|e| e.base.join(&e.value))
                .unwrap_or_else(|| PathBuf::from("out")),
            seed: self.count("seed")?.unwrap_or(DEFAULT_SEED),
            methods: MethodSettings {
                fixed_snr: num("fixed_snr", defaults.fixed_snr)?,
                assumed_beta: num("assumed_beta", defaults.assumed_beta)?,
                assumed_fer: num("assumed_fer", defaults.assumed_fer)?,
            },
            second,
            applied_va: self.number("applied_va")?,
            trials: self.count("trials")?.unwrap_or(200),
            dim: self.count("dim")?.unwrap_or(8) as usize,
            max_iter: self.count("max_iter")?.unwrap_or(60) as usize,
        })
    }
}

impl RunConfig {
    pub fn fer_source(&self, model: FerModel) -> FerSource {
        match self.fer_mode {
            FerMode::Reanchor => FerSource::Reanchored(model),
            FerMode::Fixed => FerSource::Fixed(model),
        }
    }
}

fn check_key(key: &str) -> std::result::Result<(), String> {
    if SCALAR_KEYS.contains(&key) {
        return Ok(());
    }
    if let Some(rest) = key.strip_prefix("code.") {
        if let Some((id, field)) = rest.rsplit_once('.') {
            if !id.is_empty() && CODE_FIELDS.contains(&field) {
                return Ok(());
            }
        }
    }
    Err(format!("unknown configuration key `{key}`"))
}

/// The `'static` spelling of a known key, for error values.
fn static_key(key: &str) -> &'static str {
    SCALAR_KEYS.iter().find(|k| **k == key).copied().unwrap_or("code")
}
