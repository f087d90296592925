//! Straight fixed-altitude corridor and its waypoint discretization.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::Point3;

/// Slack applied before taking the ceiling of `D / spacing`, so that an
/// exact multiple is not pushed up one step by rounding.
const COUNT_SLACK: f64 = 1e-9;

/// Distance covered in one sampling interval, in meters.
pub fn waypoint_spacing(speed_kmh: f64, ttt_ms: f64) -> Result<f64> {
    if !(speed_kmh > 0.0 && speed_kmh.is_finite()) {
        return Err(SimError::invalid("speed_kmh", format!("{speed_kmh} must be positive")));
    }
    if !(ttt_ms > 0.0 && ttt_ms.is_finite()) {
        return Err(SimError::invalid("ttt_ms", format!("{ttt_ms} must be positive")));
    }
    Ok(speed_kmh / 3.6 * (ttt_ms / 1000.0))
}

pub fn waypoint_count(length: f64, spacing: f64) -> usize {
    ((length / spacing) - COUNT_SLACK).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightPlan {
    pub start: Point3,
    pub end: Point3,
    pub altitude: f64,
    pub speed_kmh: f64,
    pub centerline_y: f64,
    pub ttt_ms: f64,
    pub step_duration_ms: f64,
    pub spacing: f64,
    pub waypoints: Vec<Point3>,
}

impl FlightPlan {
    /// Flight time from start to end, in seconds.
    pub fn duration_s(&self) -> f64 {
        (self.end.x - self.start.x) / (self.speed_kmh / 3.6)
    }

    pub fn speed_ms(&self) -> f64 {
        self.speed_kmh / 3.6
    }
}

/// Builds the corridor `(0, Y/2, h) -> (D, Y/2, h)` with `D = extent_x`.
///
/// Waypoints sit at `k * spacing` for `k = 0 .. N_wp`, where
/// `N_wp = ceil(D / spacing)` and spacing is the distance flown in one
/// `sampling_ms` interval.
pub fn build_flight_plan(
    extent_x: f64,
    extent_y: f64,
    altitude: f64,
    speed_kmh: f64,
    ttt_ms: f64,
    sampling_ms: f64,
) -> Result<FlightPlan> {
    if !(extent_x > 0.0) {
        return Err(SimError::invalid("extent_x", "must be positive"));
    }
    if !(extent_y > 0.0) {
        return Err(SimError::invalid("extent_y", "must be positive"));
    }
    if !(altitude > 0.0) {
        return Err(SimError::invalid("altitude_m", "must be positive"));
    }
    if !(ttt_ms > 0.0) {
        return Err(SimError::invalid("ttt_ms", "must be positive"));
    }
    let spacing = waypoint_spacing(speed_kmh, sampling_ms).map_err(|e| match e {
        SimError::InvalidParam {
            field: "ttt_ms",
            reason,
        } => SimError::InvalidParam {
            field: "sampling_ms",
            reason,
        },
        other => other,
    })?;
    let y = extent_y / 2.0;
    let count = waypoint_count(extent_x, spacing);
    let waypoints = (0..count)
        .map(|k| Point3::new(k as f64 * spacing, y, altitude))
        .collect();
    Ok(FlightPlan {
        start: Point3::new(0.0, y, altitude),
        end: Point3::new(extent_x, y, altitude),
        altitude,
        speed_kmh,
        centerline_y: y,
        ttt_ms,
        step_duration_ms: sampling_ms,
        spacing,
        waypoints,
    })
}
