//! Monte Carlo simulation of UAV connectivity along a straight aerial
//! corridor over a synthetic Manhattan-grid city.
//!
//! The pipeline is: [`city`] builds a seeded city and rooftop base stations,
//! [`mobility`] discretizes the flight, [`channel`] classifies each UAV-site
//! link as LoS or NLoS by ray casting and converts distance into RSRP,
//! [`strategies`] decides when to hand over, and [`engine`] runs trials,
//! campaigns and sweeps. [`report`] and [`plot`] write CSV, JSON and SVG.

// Parameter checks use `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod city;
pub mod config;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod mobility;
pub mod plot;
pub mod report;
pub mod rng;
pub mod stats;
pub mod strategies;

pub use channel::{ChannelParams, LinkSample};
pub use city::{Building, BuiltUpParams, CityLayout, Environment, GbsSite};
pub use config::RunConfig;
pub use engine::{
    run_campaign, run_trial, run_trials, sweep, Campaign, CampaignStats, Scenario, SweepAxes, TrialResult,
};
pub use error::{Result, SimError};
pub use geometry::Point3;
pub use mobility::FlightPlan;
pub use strategies::{HandoverState, StepContext, StrategyConfig, StrategyKind};
