//! Self-optimizing hysteresis and time-to-trigger.
//!
//! Both values are recomputed every step from the UAV speed, the distance
//! `d` to the serving site and the bearing `phi` between the velocity and
//! the direction to that site:
//!
//! ```text
//! hys = ( 10 n log10( 2 v psi sin|phi| / d + 1 ) )^-1
//! ttt = ( d / (v sin|phi|) * ( sqrt(2 v psi sin|phi| + d) / d - 1 ) )^-1
//! ```
//!
//! with `v` in m/s and `psi` in seconds. Both expressions blow up as
//! `phi -> 0`, so `sin|phi|` is floored and the results are clamped.

use serde::{Deserialize, Serialize};

use super::StepContext;
use crate::geometry::Point3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SohtConfig {
    /// Measurement periodicity.
    pub psi_ms: f64,
    pub sin_floor: f64,
    pub hysteresis_min_db: f64,
    pub hysteresis_max_db: f64,
    pub ttt_min_ms: f64,
    pub ttt_max_ms: f64,
}

impl Default for SohtConfig {
    fn default() -> Self {
        SohtConfig {
            psi_ms: 100.0,
            sin_floor: 1e-3,
            hysteresis_min_db: 0.0,
            hysteresis_max_db: 10.0,
            ttt_min_ms: 10.0,
            ttt_max_ms: 5120.0,
        }
    }
}

/// Unclamped `(hysteresis dB, TTT ms)`.
pub fn soht_raw(speed_kmh: f64, psi_ms: f64, phi: f64, distance: f64, pl_exponent: f64, sin_floor: f64) -> (f64, f64) {
    let v = speed_kmh / 3.6;
    let psi = psi_ms / 1000.0;
    let s = phi.abs().sin().abs().max(sin_floor);
    let hys = 1.0 / (10.0 * pl_exponent * (2.0 * v * psi * s / distance + 1.0).log10());
    let ttt_s = 1.0 / ((distance / (v * s)) * ((2.0 * v * psi * s + distance).sqrt() / distance - 1.0));
    (hys, ttt_s * 1000.0)
}

fn clamp_or(value: f64, lo: f64, hi: f64, fallback: f64) -> f64 {
    if value.is_nan() {
        fallback
    } else {
        value.clamp(lo, hi)
    }
}

/// Clamped `(hysteresis dB, TTT ms)`.
pub fn soht_params(speed_kmh: f64, phi: f64, distance: f64, pl_exponent: f64, cfg: &SohtConfig) -> (f64, f64) {
    let (hys, ttt) = soht_raw(speed_kmh, cfg.psi_ms, phi, distance, pl_exponent, cfg.sin_floor);
    (
        clamp_or(hys, cfg.hysteresis_min_db, cfg.hysteresis_max_db, cfg.hysteresis_max_db),
        clamp_or(ttt, cfg.ttt_min_ms, cfg.ttt_max_ms, cfg.ttt_max_ms),
    )
}

/// Angle between the flight direction (+x) and the UAV-to-site direction.
pub fn bearing(uav: Point3, gbs: Point3) -> f64 {
    let r = gbs - uav;
    let norm = r.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (r.x / norm).clamp(-1.0, 1.0).acos()
}

pub(super) fn params_for_link(cfg: &SohtConfig, ctx: &StepContext<'_>, gbs: Point3) -> (f64, f64) {
    let distance = ctx.uav_pos.distance(gbs).max(crate::channel::MIN_DISTANCE_M);
    let phi = bearing(ctx.uav_pos, gbs);
    soht_params(ctx.speed_kmh, phi, distance, ctx.pl_exponent, cfg)
}
