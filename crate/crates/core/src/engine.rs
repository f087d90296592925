//! Trial execution, Monte Carlo campaigns and parameter sweeps.
//!
//! A trial seed fixes the city, the base station sites and their loads.
//! Every strategy evaluated on that seed sees the same link samples, so
//! strategy comparisons are paired. Trial `k` of a campaign uses seed
//! `base_seed + k`; results are gathered by trial index before aggregation,
//! which makes the statistics independent of the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_links, ChannelParams, LinkSample};
use crate::city::{generate_city, place_gbs, BuiltUpParams, CityLayout, Environment, GbsSite};
use crate::config::RunConfig;
use crate::error::{Result, SimError};
use crate::geometry::Point3;
use crate::mobility::{build_flight_plan, FlightPlan};
use crate::rng::{self, Stream};
use crate::stats::Summary;
use crate::strategies::{self, HandoverState, StepContext, StrategyConfig, StrategyKind};

/// Everything about one flight that does not depend on the strategy.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub environment: String,
    pub params: BuiltUpParams,
    pub gbs_density: f64,
    pub seed: u64,
    pub city: CityLayout,
    pub sites: Vec<GbsSite>,
    pub site_positions: Vec<Point3>,
    pub loads: Vec<f64>,
    pub plan: FlightPlan,
    pub channel: ChannelParams,
    /// `links[k][i]`: waypoint `k`, site `i`.
    pub links: Vec<Vec<LinkSample>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub state: HandoverState,
    /// Serving site after each step.
    pub serving: Vec<Option<usize>>,
}

impl Scenario {
    pub fn build(cfg: &RunConfig, seed: u64) -> Result<Scenario> {
        let params = cfg.built_up()?;
        let city = generate_city(&params, cfg.extent_x, cfg.extent_y, seed)?;
        let sites = place_gbs(&city, cfg.gbs_density, cfg.h_ext_m, cfg.tx_power_dbm, seed)?;
        let plan = build_flight_plan(
            cfg.extent_x,
            cfg.extent_y,
            cfg.altitude_m,
            cfg.speed_kmh,
            cfg.ttt_ms,
            cfg.sampling_ms(),
        )?;
        let channel = cfg.channel_params()?;
        Ok(Self::assemble(
            cfg.environment_label(),
            cfg.gbs_density,
            seed,
            city,
            sites,
            plan,
            channel,
        ))
    }

    /// Builds a scenario from explicit parts, e.g. a hand-made city.
    pub fn assemble(
        environment: String,
        gbs_density: f64,
        seed: u64,
        city: CityLayout,
        sites: Vec<GbsSite>,
        plan: FlightPlan,
        channel: ChannelParams,
    ) -> Scenario {
        let mut load_rng = rng::stream_rng(seed, Stream::GbsLoad);
        let loads = sites.iter().map(|_| rng::uniform(&mut load_rng)).collect();
        let links = plan
            .waypoints
            .iter()
            .map(|&wp| sample_links(wp, &sites, &city, &channel))
            .collect();
        Scenario {
            environment,
            params: city.params,
            gbs_density,
            seed,
            site_positions: sites.iter().map(|s| s.position).collect(),
            city,
            sites,
            loads,
            plan,
            channel,
            links,
        }
    }

    pub fn evaluate(&self, kind: StrategyKind, cfg: &StrategyConfig) -> Evaluation {
        let mut state = HandoverState::new();
        let mut serving = Vec::with_capacity(self.links.len());
        for (wp, links) in self.plan.waypoints.iter().zip(&self.links) {
            let ctx = StepContext {
                uav_pos: *wp,
                centerline_y: self.plan.centerline_y,
                gbs_positions: &self.site_positions,
                gbs_loads: &self.loads,
                step_duration_ms: self.plan.step_duration_ms,
                speed_kmh: self.plan.speed_kmh,
                pl_exponent: self.channel.pl_exponent,
            };
            strategies::step(kind, &mut state, links, &ctx, cfg);
            serving.push(state.serving);
        }
        Evaluation { state, serving }
    }

    pub fn trial_result(&self, kind: StrategyKind, cfg: &StrategyConfig) -> TrialResult {
        let eval = self.evaluate(kind, cfg);
        let duration = self.plan.duration_s();
        let total = eval.state.steps;
        TrialResult {
            seed: self.seed,
            environment: self.environment.clone(),
            alpha: self.params.alpha,
            beta: self.params.beta,
            gamma: self.params.gamma,
            gbs_density: self.gbs_density,
            strategy: kind,
            delta_hsm: cfg.safety_margin_db,
            handover_count: eval.state.handover_count,
            outage_steps: eval.state.outage_steps,
            total_steps: total,
            flight_duration_s: duration,
            handover_frequency: eval.state.handover_count as f64 / duration,
            outage_probability: eval.state.outage_steps as f64 / total as f64,
            buildings_nominal: self.city.nominal_building_count(),
            buildings_actual: self.city.buildings.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub seed: u64,
    pub environment: String,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub gbs_density: f64,
    pub strategy: StrategyKind,
    pub delta_hsm: f64,
    pub handover_count: u32,
    pub outage_steps: u32,
    pub total_steps: u32,
    pub flight_duration_s: f64,
    /// Handovers per second.
    pub handover_frequency: f64,
    /// Fraction of steps in outage.
    pub outage_probability: f64,
    pub buildings_nominal: f64,
    pub buildings_actual: usize,
}

/// Runs one flight for one strategy.
pub fn run_trial(cfg: &RunConfig, kind: StrategyKind, seed: u64) -> Result<TrialResult> {
    Ok(Scenario::build(cfg, seed)?.trial_result(kind, &cfg.strategy_config()))
}

/// Runs one flight for every configured strategy on a shared scenario.
pub fn run_trials(cfg: &RunConfig, seed: u64) -> Result<Vec<TrialResult>> {
    let scenario = Scenario::build(cfg, seed)?;
    let scfg = cfg.strategy_config();
    Ok(cfg
        .strategies
        .iter()
        .map(|&k| scenario.trial_result(k, &scfg))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignStats {
    pub environment: String,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub gbs_density: f64,
    pub strategy: StrategyKind,
    pub delta_hsm: f64,
    pub n_trials: usize,
    pub handover_frequency: Summary,
    pub outage_probability: Summary,
    pub handover_count_mean: f64,
    pub buildings_nominal: f64,
    pub buildings_actual_mean: f64,
}

impl CampaignStats {
    /// Aggregates trials that share one sweep cell and strategy.
    pub fn from_trials(trials: &[&TrialResult]) -> CampaignStats {
        let first = trials.first().expect("at least one trial");
        let hf: Vec<f64> = trials.iter().map(|t| t.handover_frequency).collect();
        let op: Vec<f64> = trials.iter().map(|t| t.outage_probability).collect();
        let n = trials.len() as f64;
        CampaignStats {
            environment: first.environment.clone(),
            alpha: first.alpha,
            beta: first.beta,
            gamma: first.gamma,
            gbs_density: first.gbs_density,
            strategy: first.strategy,
            delta_hsm: first.delta_hsm,
            n_trials: trials.len(),
            handover_frequency: Summary::of(&hf),
            outage_probability: Summary::of(&op),
            handover_count_mean: trials.iter().map(|t| t.handover_count as f64).sum::<f64>() / n,
            buildings_nominal: first.buildings_nominal,
            buildings_actual_mean: trials.iter().map(|t| t.buildings_actual as f64).sum::<f64>() / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub trials: Vec<TrialResult>,
    pub stats: Vec<CampaignStats>,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SimError::Config(format!("thread pool: {e}")))
}

/// Runs `n_trials` seeds for every configured strategy.
///
/// Trials are ordered by seed, then by the configured strategy order.
pub fn run_campaign(cfg: &RunConfig, n_trials: usize, jobs: usize) -> Result<Campaign> {
    if n_trials == 0 {
        return Err(SimError::invalid("n_trials", "must be at least 1"));
    }
    let per_seed: Vec<Vec<TrialResult>> = pool(jobs)?.install(|| {
        (0..n_trials as u64)
            .into_par_iter()
            .map(|k| run_trials(cfg, cfg.base_seed.wrapping_add(k)))
            .collect::<Result<_>>()
    })?;
    let stats = cfg
        .strategies
        .iter()
        .enumerate()
        .map(|(s, _)| {
            let column: Vec<&TrialResult> = per_seed.iter().map(|row| &row[s]).collect();
            CampaignStats::from_trials(&column)
        })
        .collect();
    Ok(Campaign {
        trials: per_seed.into_iter().flatten().collect(),
        stats,
    })
}

/// One environment in a sweep: a label, its built-up parameters and the
/// NLoS exponent to use there.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentCell {
    pub label: String,
    pub params: BuiltUpParams,
    pub pl_exponent: f64,
}

impl EnvironmentCell {
    pub fn preset(env: Environment, cfg: &RunConfig) -> Self {
        EnvironmentCell {
            label: env.label().to_string(),
            params: env.params(),
            pl_exponent: cfg.pl_exponent.unwrap_or(env.default_pl_exponent()),
        }
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        Ok(EnvironmentCell {
            label: cfg.environment_label(),
            params: cfg.built_up()?,
            pl_exponent: cfg.pl_exponent(),
        })
    }
}

/// Sweep axes. An empty axis falls back to the single value in the config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepAxes {
    pub environments: Vec<Environment>,
    pub densities: Vec<f64>,
    pub deltas: Vec<f64>,
    pub strategies: Vec<StrategyKind>,
}

/// Environments, densities, deltas and strategies after config fallbacks.
type ResolvedAxes = (Vec<EnvironmentCell>, Vec<f64>, Vec<f64>, Vec<StrategyKind>);

impl SweepAxes {
    fn resolve(&self, cfg: &RunConfig) -> Result<ResolvedAxes> {
        let envs = if self.environments.is_empty() {
            vec![EnvironmentCell::from_config(cfg)?]
        } else {
            self.environments
                .iter()
                .map(|&e| EnvironmentCell::preset(e, cfg))
                .collect()
        };
        let or = |axis: &Vec<f64>, fallback: f64| if axis.is_empty() { vec![fallback] } else { axis.clone() };
        let strategies = if self.strategies.is_empty() {
            cfg.strategies.clone()
        } else {
            self.strategies.clone()
        };
        Ok((
            envs,
            or(&self.densities, cfg.gbs_density),
            or(&self.deltas, cfg.safety_margin_db),
            strategies,
        ))
    }
}

/// Evaluates the Cartesian product environment x density x delta x strategy.
///
/// Every cell uses the seeds `base_seed .. base_seed + n_trials`. Output is
/// ordered by environment, density, delta, then strategy, following the
/// axis order.
pub fn sweep(cfg: &RunConfig, axes: &SweepAxes, n_trials: usize, jobs: usize) -> Result<Vec<CampaignStats>> {
    if n_trials == 0 {
        return Err(SimError::invalid("n_trials", "must be at least 1"));
    }
    let (envs, densities, deltas, kinds) = axes.resolve(cfg)?;
    for &d in &deltas {
        if !(d >= 0.0) {
            return Err(SimError::invalid(
                "safety_margin_db",
                format!("{d} must be non-negative"),
            ));
        }
    }

    let mut work = Vec::new();
    for (e, env) in envs.iter().enumerate() {
        for (d, &density) in densities.iter().enumerate() {
            let mut cell_cfg = cfg.clone();
            cell_cfg.environment = "custom".into();
            cell_cfg.alpha = Some(env.params.alpha);
            cell_cfg.beta = Some(env.params.beta);
            cell_cfg.gamma = Some(env.params.gamma);
            cell_cfg.pl_exponent = Some(env.pl_exponent);
            cell_cfg.gbs_density = density;
            cell_cfg.validate()?;
            for k in 0..n_trials as u64 {
                work.push((e, d, cell_cfg.clone(), cfg.base_seed.wrapping_add(k)));
            }
        }
    }

    // results[item][delta][strategy]
    let results: Vec<Vec<Vec<TrialResult>>> = pool(jobs)?.install(|| {
        work.par_iter()
            .map(|(e, _, cell_cfg, seed)| {
                let mut scenario = Scenario::build(cell_cfg, *seed)?;
                scenario.environment = envs[*e].label.clone();
                Ok(deltas
                    .iter()
                    .map(|&delta| {
                        let mut scfg = cell_cfg.strategy_config();
                        scfg.safety_margin_db = delta;
                        kinds.iter().map(|&k| scenario.trial_result(k, &scfg)).collect()
                    })
                    .collect())
            })
            .collect::<Result<_>>()
    })?;

    let mut out = Vec::new();
    for e in 0..envs.len() {
        for d in 0..densities.len() {
            let rows: Vec<&Vec<Vec<TrialResult>>> = work
                .iter()
                .zip(&results)
                .filter(|((we, wd, _, _), _)| *we == e && *wd == d)
                .map(|(_, r)| r)
                .collect();
            for x in 0..deltas.len() {
                for s in 0..kinds.len() {
                    let column: Vec<&TrialResult> = rows.iter().map(|r| &r[x][s]).collect();
                    out.push(CampaignStats::from_trials(&column));
                }
            }
        }
    }
    Ok(out)
}
