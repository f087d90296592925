//! Run configuration: a flat JSON object whose keys all have defaults.
//!
//! Unknown keys are rejected. `environment` selects one of the presets
//! (`suburban`, `urban`, `dense-urban`, `high-rise`) or `custom`; explicit
//! `alpha`/`beta`/`gamma` override the preset values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::city::{BuiltUpParams, Environment};
use crate::error::{Result, SimError};
use crate::strategies::{FuzzyConfig, SohtConfig, StrategyConfig, StrategyKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub environment: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    /// Land rectangle, meters. The corridor runs along x.
    pub extent_x: f64,
    pub extent_y: f64,
    pub speed_kmh: f64,
    pub altitude_m: f64,
    pub ttt_ms: f64,
    /// Waypoint sampling interval; defaults to `ttt_ms`.
    pub sampling_ms: Option<f64>,
    pub tau_min_dbm: f64,
    pub hysteresis_db: f64,
    pub safety_margin_db: f64,
    /// Base stations per km².
    pub gbs_density: f64,
    pub h_ext_m: f64,
    pub tx_power_dbm: f64,
    /// Carried for reference only; the path-loss constants already encode it.
    pub carrier_ghz: f64,
    /// NLoS exponent; defaults per environment.
    pub pl_exponent: Option<f64>,
    pub strategies: Vec<StrategyKind>,
    pub n_trials: usize,
    pub base_seed: u64,
    pub out_dir: PathBuf,

    pub soht_psi_ms: f64,
    pub soht_sin_floor: f64,
    pub soht_hysteresis_max_db: f64,
    pub soht_ttt_min_ms: f64,
    pub soht_ttt_max_ms: f64,

    pub fuzzy_speed_centers: [f64; 3],
    pub fuzzy_rsrp_centers: [f64; 3],
    pub fuzzy_load_centers: [f64; 3],
    pub fuzzy_delta_centers: [f64; 3],
    pub fuzzy_ttt_min_ms: f64,
    pub fuzzy_ttt_max_ms: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let soht = SohtConfig::default();
        let fuzzy = FuzzyConfig::default();
        RunConfig {
            environment: Environment::DenseUrban.label().to_string(),
            alpha: None,
            beta: None,
            gamma: None,
            extent_x: 4000.0,
            extent_y: 1000.0,
            speed_kmh: 100.0,
            altitude_m: 100.0,
            ttt_ms: 100.0,
            sampling_ms: None,
            tau_min_dbm: -101.5,
            hysteresis_db: 3.0,
            safety_margin_db: 5.0,
            gbs_density: 6.0,
            h_ext_m: 5.0,
            tx_power_dbm: 30.0,
            carrier_ghz: 28.0,
            pl_exponent: None,
            strategies: StrategyKind::ALL.to_vec(),
            n_trials: 500,
            base_seed: 1,
            out_dir: PathBuf::from("results"),
            soht_psi_ms: soht.psi_ms,
            soht_sin_floor: soht.sin_floor,
            soht_hysteresis_max_db: soht.hysteresis_max_db,
            soht_ttt_min_ms: soht.ttt_min_ms,
            soht_ttt_max_ms: soht.ttt_max_ms,
            fuzzy_speed_centers: fuzzy.speed_centers,
            fuzzy_rsrp_centers: fuzzy.rsrp_centers,
            fuzzy_load_centers: fuzzy.load_centers,
            fuzzy_delta_centers: fuzzy.delta_centers,
            fuzzy_ttt_min_ms: fuzzy.ttt_min_ms,
            fuzzy_ttt_max_ms: fuzzy.ttt_max_ms,
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(SimError::invalid(field, format!("{v} must be positive")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(SimError::invalid(field, format!("{v} must be non-negative")))
    }
}

fn increasing(field: &'static str, c: [f64; 3]) -> Result<()> {
    if c[0] < c[1] && c[1] < c[2] {
        Ok(())
    } else {
        Err(SimError::invalid(field, format!("{c:?} must be strictly increasing")))
    }
}

impl RunConfig {
    /// Parses a JSON document; an empty or whitespace-only document yields the defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = if text.trim().is_empty() {
            RunConfig::default()
        } else {
            serde_json::from_str(text).map_err(|e| SimError::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Applies `key=value` overrides to a JSON document before parsing.
    ///
    /// Values are read as JSON when they parse as such, otherwise as strings.
    pub fn from_json_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut doc: serde_json::Value = if text.trim().is_empty() {
            serde_json::Value::Object(Default::default())
        } else {
            serde_json::from_str(text).map_err(|e| SimError::Config(e.to_string()))?
        };
        let obj = doc
            .as_object_mut()
            .ok_or_else(|| SimError::Config("top level must be a JSON object".into()))?;
        for (key, raw) in overrides {
            let value = serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.clone()));
            obj.insert(key.clone(), value);
        }
        let cfg: RunConfig = serde_json::from_value(doc).map_err(|e| SimError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn preset(&self) -> Option<Environment> {
        Environment::from_label(&self.environment)
    }

    fn has_overrides(&self) -> bool {
        self.alpha.is_some() || self.beta.is_some() || self.gamma.is_some()
    }

    /// Label written to result files.
    pub fn environment_label(&self) -> String {
        match self.preset() {
            Some(env) if !self.has_overrides() => env.label().to_string(),
            _ => "custom".to_string(),
        }
    }

    pub fn built_up(&self) -> Result<BuiltUpParams> {
        let base = match (self.preset(), self.environment.as_str()) {
            (Some(env), _) => Some(env.params()),
            (None, "custom") => None,
            (None, other) => {
                return Err(SimError::invalid(
                    "environment",
                    format!("unknown environment `{other}`"),
                ));
            }
        };
        let pick = |field: &'static str, explicit: Option<f64>, preset: Option<f64>| {
            explicit
                .or(preset)
                .ok_or_else(|| SimError::invalid(field, "required when environment is `custom`"))
        };
        let p = BuiltUpParams {
            alpha: pick("alpha", self.alpha, base.map(|b| b.alpha))?,
            beta: pick("beta", self.beta, base.map(|b| b.beta))?,
            gamma: pick("gamma", self.gamma, base.map(|b| b.gamma))?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn pl_exponent(&self) -> f64 {
        self.pl_exponent
            .unwrap_or_else(|| self.preset().unwrap_or(Environment::DenseUrban).default_pl_exponent())
    }

    pub fn sampling_ms(&self) -> f64 {
        self.sampling_ms.unwrap_or(self.ttt_ms)
    }

    /// True when waypoints are sampled on a grid other than one TTT interval.
    pub fn uses_custom_sampling(&self) -> bool {
        self.sampling_ms.is_some_and(|s| s != self.ttt_ms)
    }

    pub fn channel_params(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.pl_exponent(), self.tx_power_dbm)
    }

    pub fn strategy_config(&self) -> StrategyConfig {
        StrategyConfig {
            hysteresis_db: self.hysteresis_db,
            ttt_ms: self.ttt_ms,
            tau_min: self.tau_min_dbm,
            safety_margin_db: self.safety_margin_db,
            soht: SohtConfig {
                psi_ms: self.soht_psi_ms,
                sin_floor: self.soht_sin_floor,
                hysteresis_min_db: 0.0,
                hysteresis_max_db: self.soht_hysteresis_max_db,
                ttt_min_ms: self.soht_ttt_min_ms,
                ttt_max_ms: self.soht_ttt_max_ms,
            },
            fuzzy: FuzzyConfig {
                speed_centers: self.fuzzy_speed_centers,
                rsrp_centers: self.fuzzy_rsrp_centers,
                load_centers: self.fuzzy_load_centers,
                delta_centers: self.fuzzy_delta_centers,
                ttt_min_ms: self.fuzzy_ttt_min_ms,
                ttt_max_ms: self.fuzzy_ttt_max_ms,
                ..FuzzyConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.built_up()?;
        positive("extent_x", self.extent_x)?;
        positive("extent_y", self.extent_y)?;
        positive("speed_kmh", self.speed_kmh)?;
        positive("altitude_m", self.altitude_m)?;
        positive("ttt_ms", self.ttt_ms)?;
        if let Some(s) = self.sampling_ms {
            positive("sampling_ms", s)?;
        }
        if !self.tau_min_dbm.is_finite() {
            return Err(SimError::invalid("tau_min_dbm", "must be finite"));
        }
        non_negative("hysteresis_db", self.hysteresis_db)?;
        non_negative("safety_margin_db", self.safety_margin_db)?;
        non_negative("gbs_density", self.gbs_density)?;
        non_negative("h_ext_m", self.h_ext_m)?;
        if !self.tx_power_dbm.is_finite() {
            return Err(SimError::invalid("tx_power_dbm", "must be finite"));
        }
        positive("carrier_ghz", self.carrier_ghz)?;
        self.channel_params()?;
        if self.strategies.is_empty() {
            return Err(SimError::invalid("strategies", "at least one strategy is required"));
        }
        if self.n_trials == 0 {
            return Err(SimError::invalid("n_trials", "must be at least 1"));
        }
        positive("soht_psi_ms", self.soht_psi_ms)?;
        positive("soht_sin_floor", self.soht_sin_floor)?;
        non_negative("soht_hysteresis_max_db", self.soht_hysteresis_max_db)?;
        positive("soht_ttt_min_ms", self.soht_ttt_min_ms)?;
        if self.soht_ttt_max_ms < self.soht_ttt_min_ms {
            return Err(SimError::invalid(
                "soht_ttt_max_ms",
                "must not be below soht_ttt_min_ms",
            ));
        }
        increasing("fuzzy_speed_centers", self.fuzzy_speed_centers)?;
        increasing("fuzzy_rsrp_centers", self.fuzzy_rsrp_centers)?;
        increasing("fuzzy_load_centers", self.fuzzy_load_centers)?;
        increasing("fuzzy_delta_centers", self.fuzzy_delta_centers)?;
        positive("fuzzy_ttt_min_ms", self.fuzzy_ttt_min_ms)?;
        if self.fuzzy_ttt_max_ms < self.fuzzy_ttt_min_ms {
            return Err(SimError::invalid(
                "fuzzy_ttt_max_ms",
                "must not be below fuzzy_ttt_min_ms",
            ));
        }
        Ok(())
    }
}
