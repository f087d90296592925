//! Manhattan-grid city synthesis and rooftop base station placement.
//!
//! A city is a square lattice of square buildings described by three
//! built-up parameters: the built-up area ratio `alpha`, the building density
//! `beta` (buildings per km²) and the Rayleigh scale `gamma` of the heights.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::{Aabb, Point3};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuiltUpParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl BuiltUpParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = BuiltUpParams { alpha, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(SimError::invalid("alpha", format!("{} is outside (0, 1)", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(SimError::invalid("beta", format!("{} must be positive", self.beta)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(SimError::invalid("gamma", format!("{} must be positive", self.gamma)));
        }
        Ok(())
    }
}

/// The four standard urban presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Environment {
    Suburban,
    Urban,
    DenseUrban,
    HighRise,
}

impl Environment {
    pub const ALL: [Environment; 4] = [
        Environment::Suburban,
        Environment::Urban,
        Environment::DenseUrban,
        Environment::HighRise,
    ];

    pub fn params(self) -> BuiltUpParams {
        let (alpha, beta, gamma) = match self {
            Environment::Suburban => (0.1, 750.0, 8.0),
            Environment::Urban => (0.3, 500.0, 15.0),
            Environment::DenseUrban => (0.5, 300.0, 20.0),
            Environment::HighRise => (0.5, 300.0, 50.0),
        };
        BuiltUpParams { alpha, beta, gamma }
    }

    /// NLoS path-loss exponent used when the configuration does not set one.
    pub fn default_pl_exponent(self) -> f64 {
        match self {
            Environment::Suburban => 2.5,
            Environment::Urban => 3.0,
            Environment::DenseUrban => 3.5,
            Environment::HighRise => 4.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Environment::Suburban => "suburban",
            Environment::Urban => "urban",
            Environment::DenseUrban => "dense-urban",
            Environment::HighRise => "high-rise",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Environment::ALL.into_iter().find(|e| e.label() == label)
    }
}

/// Building width `W` and street width `S`, both in meters.
pub fn building_dimensions(p: &BuiltUpParams) -> Result<(f64, f64)> {
    if !(p.alpha > 0.0 && p.alpha < 1.0) {
        return Err(SimError::invalid("alpha", format!("{} is outside (0, 1)", p.alpha)));
    }
    if !(p.beta > 0.0) {
        return Err(SimError::invalid("beta", format!("{} must be positive", p.beta)));
    }
    let width = 1000.0 * (p.alpha / p.beta).sqrt();
    let street = 1000.0 / p.beta.sqrt() - width;
    Ok((width, street))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub x_min: f64,
    pub y_min: f64,
    pub width: f64,
    pub height: f64,
}

impl Building {
    pub fn center(&self) -> (f64, f64) {
        (self.x_min + self.width / 2.0, self.y_min + self.width / 2.0)
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::new(
            Point3::new(self.x_min, self.y_min, 0.0),
            Point3::new(self.x_min + self.width, self.y_min + self.width, self.height),
        )
    }
}

/// Buildings are stored row-major: index `row * cols + col`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityLayout {
    pub extent_x: f64,
    pub extent_y: f64,
    pub buildings: Vec<Building>,
    pub params: BuiltUpParams,
    pub seed: u64,
    pub cols: usize,
    pub rows: usize,
    pub pitch: f64,
    pub offset: f64,
}

pub fn generate_city(p: &BuiltUpParams, extent_x: f64, extent_y: f64, seed: u64) -> Result<CityLayout> {
    if !(extent_x > 0.0) {
        return Err(SimError::invalid("extent_x", "must be positive"));
    }
    if !(extent_y > 0.0) {
        return Err(SimError::invalid("extent_y", "must be positive"));
    }
    let (width, street) = building_dimensions(p)?;
    let pitch = width + street;
    let cols = (extent_x / pitch).floor() as usize;
    let rows = (extent_y / pitch).floor() as usize;
    let offset = street / 2.0;

    let mut heights = rng::stream_rng(seed, Stream::BuildingHeights);
    let mut buildings = Vec::with_capacity(cols * rows);
    for row in 0..rows {
        for col in 0..cols {
            buildings.push(Building {
                x_min: offset + col as f64 * pitch,
                y_min: offset + row as f64 * pitch,
                width,
                height: rng::rayleigh(&mut heights, p.gamma),
            });
        }
    }
    Ok(CityLayout {
        extent_x,
        extent_y,
        buildings,
        params: *p,
        seed,
        cols,
        rows,
        pitch,
        offset,
    })
}

impl CityLayout {
    pub fn land_area_km2(&self) -> f64 {
        self.extent_x * self.extent_y / 1e6
    }

    /// `beta * A_land`, the building count before snapping to whole grid cells.
    pub fn nominal_building_count(&self) -> f64 {
        self.params.beta * self.land_area_km2()
    }

    /// True if the segment `a -> b` passes through the interior of any
    /// building other than `skip`.
    ///
    /// Only grid columns and rows overlapped by the segment's footprint are
    /// visited, so the cost scales with segment length rather than city size.
    pub fn segment_blocked(&self, a: Point3, b: Point3, skip: Option<usize>) -> bool {
        if self.buildings.is_empty() {
            return false;
        }
        let width = self.buildings[0].width;
        let dx = b.x - a.x;
        let (x_lo, x_hi) = (a.x.min(b.x), a.x.max(b.x));
        let col_lo = (((x_lo - self.offset - width) / self.pitch).floor().max(0.0)) as usize;
        let col_hi = ((x_hi - self.offset) / self.pitch).floor();
        if col_hi < 0.0 {
            return false;
        }
        let col_hi = (col_hi as usize).min(self.cols - 1);

        for col in col_lo..=col_hi {
            let cx0 = self.offset + col as f64 * self.pitch;
            let cx1 = cx0 + width;
            let (t0, t1) = if dx == 0.0 {
                if a.x <= cx0 || a.x >= cx1 {
                    continue;
                }
                (0.0, 1.0)
            } else {
                let ta = ((cx0 - a.x) / dx).clamp(0.0, 1.0);
                let tb = ((cx1 - a.x) / dx).clamp(0.0, 1.0);
                (ta.min(tb), ta.max(tb))
            };
            if t0 >= t1 {
                continue;
            }
            let pa = a.lerp(b, t0);
            let pb = a.lerp(b, t1);
            let z_floor = pa.z.min(pb.z);
            let (y_lo, y_hi) = (pa.y.min(pb.y), pa.y.max(pb.y));
            let row_lo = (((y_lo - self.offset - width) / self.pitch).floor().max(0.0)) as usize;
            let row_hi = ((y_hi - self.offset) / self.pitch).floor();
            if row_hi < 0.0 {
                continue;
            }
            let row_hi = (row_hi as usize).min(self.rows - 1);
            for row in row_lo..=row_hi {
                let idx = row * self.cols + col;
                if Some(idx) == skip {
                    continue;
                }
                let building = &self.buildings[idx];
                if building.height <= z_floor {
                    continue;
                }
                if building.bounds().segment_crosses_interior(a, b) {
                    return true;
                }
            }
        }
        false
    }

    /// Reference scan over every building, used to cross-check the grid walk.
    pub fn segment_blocked_exhaustive(&self, a: Point3, b: Point3, skip: Option<usize>) -> bool {
        self.buildings
            .iter()
            .enumerate()
            .any(|(i, bld)| Some(i) != skip && bld.bounds().segment_crosses_interior(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbsSite {
    pub id: usize,
    pub position: Point3,
    pub tx_power: f64,
    pub host_building: usize,
}

/// Number of base stations for a density (per km²) over the city area.
pub fn gbs_count(city: &CityLayout, density: f64) -> usize {
    (density * city.land_area_km2()).round().max(0.0) as usize
}

/// Places `round(density * area)` base stations on distinct rooftops chosen
/// uniformly at random, with antennas `h_ext` above the roof center.
pub fn place_gbs(city: &CityLayout, density: f64, h_ext: f64, tx_power: f64, seed: u64) -> Result<Vec<GbsSite>> {
    if !(density >= 0.0 && density.is_finite()) {
        return Err(SimError::invalid(
            "gbs_density",
            format!("{density} must be non-negative"),
        ));
    }
    let requested = gbs_count(city, density);
    if requested > city.buildings.len() {
        return Err(SimError::InsufficientRooftops {
            requested,
            available: city.buildings.len(),
        });
    }
    let mut rng = rng::stream_rng(seed, Stream::GbsPlacement);
    let hosts = rng::sample_without_replacement(&mut rng, city.buildings.len(), requested);
    Ok(hosts
        .into_iter()
        .enumerate()
        .map(|(id, host)| {
            let b = &city.buildings[host];
            let (x, y) = b.center();
            GbsSite {
                id,
                position: Point3::new(x, y, b.height + h_ext),
                tx_power,
                host_building: host,
            }
        })
        .collect())
}
