//! 28 GHz air-to-ground link model: geometric LoS test, dual-slope path loss
//! and RSRP.

use serde::{Deserialize, Serialize};

use crate::city::{CityLayout, GbsSite};
use crate::error::{Result, SimError};
use crate::geometry::Point3;

pub const LOS_INTERCEPT_DB: f64 = 61.4;
pub const NLOS_INTERCEPT_DB: f64 = 72.0;
pub const MIN_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub pl_exponent: f64,
    pub tx_power: f64,
    pub g_tx: f64,
    pub g_rx: f64,
}

impl ChannelParams {
    pub fn new(pl_exponent: f64, tx_power: f64) -> Result<Self> {
        if !(2.0..=4.5).contains(&pl_exponent) {
            return Err(SimError::invalid(
                "pl_exponent",
                format!("{pl_exponent} is outside [2.0, 4.5]"),
            ));
        }
        Ok(ChannelParams {
            pl_exponent,
            tx_power,
            g_tx: 0.0,
            g_rx: 0.0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSample {
    pub gbs_id: usize,
    pub distance: f64,
    pub los: bool,
    pub path_loss: f64,
    pub rsrp: f64,
}

/// Geometric line-of-sight between a base station antenna and the UAV.
///
/// `host` is the building carrying the antenna; it never blocks its own link.
pub fn is_los(gbs_pos: Point3, uav_pos: Point3, city: &CityLayout, host: Option<usize>) -> bool {
    !city.segment_blocked(gbs_pos, uav_pos, host)
}

/// Path loss in dB; distances under 1 m are treated as 1 m.
pub fn path_loss(distance: f64, los: bool, params: &ChannelParams) -> f64 {
    let d = distance.max(MIN_DISTANCE_M);
    if los {
        LOS_INTERCEPT_DB + 20.0 * d.log10()
    } else {
        NLOS_INTERCEPT_DB + 10.0 * params.pl_exponent * d.log10()
    }
}

pub fn rsrp(path_loss: f64, params: &ChannelParams) -> f64 {
    params.tx_power + params.g_tx + params.g_rx - path_loss
}

/// One link sample per base station, in the order of `sites`.
pub fn sample_links(uav_pos: Point3, sites: &[GbsSite], city: &CityLayout, params: &ChannelParams) -> Vec<LinkSample> {
    sites
        .iter()
        .map(|site| {
            let distance = site.position.distance(uav_pos);
            let los = is_los(site.position, uav_pos, city, Some(site.host_building));
            let pl = path_loss(distance, los, params);
            let link_params = ChannelParams {
                tx_power: site.tx_power,
                ..*params
            };
            LinkSample {
                gbs_id: site.id,
                distance,
                los,
                path_loss: pl,
                rsrp: rsrp(pl, &link_params),
            }
        })
        .collect()
}
