//! Handover decision procedures.
//!
//! Every strategy runs through [`step`]: the first call attaches to the
//! strongest base station, each call then applies the strategy's trigger,
//! and finally the step counts as an outage if the serving RSRP is below
//! `tau_min`. Outage accounting is shared so that protocols differ only in
//! when they switch.

mod a3;
mod cash;
pub mod fuzzy;
pub mod soht;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::LinkSample;
use crate::error::SimError;
use crate::geometry::Point3;

pub use cash::cash_score;
pub use fuzzy::{FuzzyConfig, FuzzyController};
pub use soht::{soht_params, SohtConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    A3,
    A3t,
    Soht,
    Fuzzy,
    Cash,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::A3,
        StrategyKind::A3t,
        StrategyKind::Soht,
        StrategyKind::Fuzzy,
        StrategyKind::Cash,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::A3 => "a3",
            StrategyKind::A3t => "a3t",
            StrategyKind::Soht => "soht",
            StrategyKind::Fuzzy => "fuzzy",
            StrategyKind::Cash => "cash",
        }
    }

    /// Whether the handover safety margin changes this strategy's decisions.
    pub fn uses_safety_margin(self) -> bool {
        matches!(self, StrategyKind::A3t | StrategyKind::Cash)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SimError::invalid("strategy", format!("unknown strategy `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    /// Hysteresis margin, dB.
    pub hysteresis_db: f64,
    pub ttt_ms: f64,
    /// Minimum viable RSRP, dBm.
    pub tau_min: f64,
    /// Handover safety margin above `tau_min`, dB. May be infinite.
    pub safety_margin_db: f64,
    pub soht: SohtConfig,
    pub fuzzy: FuzzyConfig,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            hysteresis_db: 3.0,
            ttt_ms: 100.0,
            tau_min: -101.5,
            safety_margin_db: 5.0,
            soht: SohtConfig::default(),
            fuzzy: FuzzyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HandoverState {
    pub serving: Option<usize>,
    /// Consecutive-step counters per neighbor (A3, A3T, SOHT, fuzzy).
    pub counters: Vec<u32>,
    /// Single counter bound to `last_candidate` (CASH).
    pub cash_counter: u32,
    pub last_candidate: Option<usize>,
    pub handover_count: u32,
    pub outage_steps: u32,
    pub steps: u32,
}

impl HandoverState {
    pub fn new() -> Self {
        Self::default()
    }

    fn switch_to(&mut self, target: usize) {
        if self.serving != Some(target) {
            self.serving = Some(target);
            self.handover_count += 1;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub uav_pos: Point3,
    pub centerline_y: f64,
    pub gbs_positions: &'a [Point3],
    /// Per-site load in `[0, 1]`, read by the fuzzy controller.
    pub gbs_loads: &'a [f64],
    pub step_duration_ms: f64,
    pub speed_kmh: f64,
    pub pl_exponent: f64,
}

/// Number of consecutive steps a condition must hold to span `ttt_ms`.
pub fn ttt_steps(ttt_ms: f64, step_duration_ms: f64) -> u32 {
    ((ttt_ms / step_duration_ms).round() as u32).max(1)
}

fn strongest(links: &[LinkSample]) -> usize {
    let mut best = 0;
    for (i, link) in links.iter().enumerate().skip(1) {
        if link.rsrp > links[best].rsrp {
            best = i;
        }
    }
    best
}

/// Advances `state` by one waypoint under strategy `kind`.
///
/// `links[i]` must describe base station `i`.
pub fn step(
    kind: StrategyKind,
    state: &mut HandoverState,
    links: &[LinkSample],
    ctx: &StepContext<'_>,
    cfg: &StrategyConfig,
) {
    state.steps += 1;
    if links.is_empty() {
        state.serving = None;
        state.outage_steps += 1;
        return;
    }
    debug_assert!(links.iter().enumerate().all(|(i, l)| l.gbs_id == i));
    if state.serving.is_none() {
        state.serving = Some(strongest(links));
        state.cash_counter = 0;
    }
    if state.counters.len() != links.len() {
        state.counters = vec![0; links.len()];
    }

    match kind {
        StrategyKind::A3 => {
            let n = ttt_steps(cfg.ttt_ms, ctx.step_duration_ms);
            a3::counter_step(state, links, cfg.hysteresis_db, n, |_| true);
        }
        StrategyKind::A3t => {
            let n = ttt_steps(cfg.ttt_ms, ctx.step_duration_ms);
            let ceiling = cfg.tau_min + cfg.safety_margin_db;
            a3::counter_step(state, links, cfg.hysteresis_db, n, |rs| rs <= ceiling);
        }
        StrategyKind::Soht => {
            let serving = state.serving.expect("attached");
            let gbs = ctx.gbs_positions[serving];
            let (delta, ttt) = soht::params_for_link(&cfg.soht, ctx, gbs);
            let n = ttt_steps(ttt, ctx.step_duration_ms);
            a3::counter_step(state, links, delta, n, |_| true);
        }
        StrategyKind::Fuzzy => {
            let serving = state.serving.expect("attached");
            let flc = FuzzyController::new(&cfg.fuzzy);
            let load = ctx.gbs_loads.get(serving).copied().unwrap_or(0.5);
            let delta = flc.hysteresis(ctx.speed_kmh, links[serving].rsrp, load);
            let ttt = flc.time_to_trigger(ctx.speed_kmh, links[serving].rsrp, load);
            let n = ttt_steps(ttt, ctx.step_duration_ms);
            a3::counter_step(state, links, delta, n, |_| true);
        }
        StrategyKind::Cash => cash::cash_step(state, links, ctx, cfg),
    }

    let serving = state.serving.expect("attached");
    if links[serving].rsrp < cfg.tau_min {
        state.outage_steps += 1;
    }
}
