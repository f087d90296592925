//! Mamdani fuzzy controller for the hysteresis margin, plus the weighted
//! time-to-trigger rule.
//!
//! Inputs are UAV speed, serving RSRP and serving-site load, each with three
//! terms (low, medium, high). Low and high are shoulders, medium is a
//! triangle, so the three grades always sum to one. The 27 rules map
//! `(speed, rsrp, load)` to an output term index
//! `clamp(speed + rsrp - load, 0, 2)` (terms indexed 0..=2): the margin grows
//! with speed and serving strength and shrinks with load. Inference is
//! min-max and the crisp value is the centroid of the aggregated set.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyConfig {
    /// slow / medium / fast peaks, km/h.
    pub speed_centers: [f64; 3],
    pub speed_range: [f64; 2],
    /// weak / medium / strong peaks, dBm.
    pub rsrp_centers: [f64; 3],
    pub rsrp_range: [f64; 2],
    /// low / medium / high peaks.
    pub load_centers: [f64; 3],
    pub load_range: [f64; 2],
    /// small / medium / large output peaks, dB.
    pub delta_centers: [f64; 3],
    pub delta_range: [f64; 2],
    pub ttt_min_ms: f64,
    pub ttt_max_ms: f64,
    /// Sample count over the output universe for the centroid.
    pub resolution: usize,
}

impl Default for FuzzyConfig {
    fn default() -> Self {
        FuzzyConfig {
            speed_centers: [20.0, 75.0, 130.0],
            speed_range: [0.0, 150.0],
            rsrp_centers: [-105.0, -85.0, -65.0],
            rsrp_range: [-110.0, -60.0],
            load_centers: [0.1, 0.5, 0.9],
            load_range: [0.0, 1.0],
            delta_centers: [1.0, 3.0, 5.0],
            delta_range: [0.0, 6.0],
            ttt_min_ms: 40.0,
            ttt_max_ms: 480.0,
            resolution: 601,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Membership {
    /// Full membership at or below `peak`, falling to zero at `foot`.
    LeftShoulder {
        peak: f64,
        foot: f64,
    },
    Triangle {
        left: f64,
        peak: f64,
        right: f64,
    },
    /// Zero at or below `foot`, full membership from `peak` upward.
    RightShoulder {
        foot: f64,
        peak: f64,
    },
}

impl Membership {
    pub fn grade(&self, x: f64) -> f64 {
        match *self {
            Membership::LeftShoulder { peak, foot } => {
                if x <= peak {
                    1.0
                } else if x >= foot {
                    0.0
                } else {
                    (foot - x) / (foot - peak)
                }
            }
            Membership::Triangle { left, peak, right } => {
                if x <= left || x >= right {
                    0.0
                } else if x <= peak {
                    (x - left) / (peak - left)
                } else {
                    (right - x) / (right - peak)
                }
            }
            Membership::RightShoulder { foot, peak } => {
                if x >= peak {
                    1.0
                } else if x <= foot {
                    0.0
                } else {
                    (x - foot) / (peak - foot)
                }
            }
        }
    }
}

/// Shoulder / triangle / shoulder partition over three peaks.
fn input_terms(c: [f64; 3]) -> [Membership; 3] {
    [
        Membership::LeftShoulder { peak: c[0], foot: c[1] },
        Membership::Triangle {
            left: c[0],
            peak: c[1],
            right: c[2],
        },
        Membership::RightShoulder { foot: c[1], peak: c[2] },
    ]
}

/// Three triangles of equal half-width around the output peaks.
fn output_terms(c: [f64; 3]) -> [Membership; 3] {
    [
        Membership::Triangle {
            left: 2.0 * c[0] - c[1],
            peak: c[0],
            right: c[1],
        },
        Membership::Triangle {
            left: c[0],
            peak: c[1],
            right: c[2],
        },
        Membership::Triangle {
            left: c[1],
            peak: c[2],
            right: 2.0 * c[2] - c[1],
        },
    ]
}

fn grades(terms: &[Membership; 3], x: f64) -> [f64; 3] {
    [terms[0].grade(x), terms[1].grade(x), terms[2].grade(x)]
}

fn normalized(x: f64, range: [f64; 2]) -> f64 {
    ((x - range[0]) / (range[1] - range[0])).clamp(0.0, 1.0)
}

/// Output term fired by a rule over term indices (0 = low .. 2 = high).
pub fn rule_consequent(speed: usize, rsrp: usize, load: usize) -> usize {
    (speed as i32 + rsrp as i32 - load as i32).clamp(0, 2) as usize
}

#[derive(Debug, Clone)]
pub struct FuzzyController<'a> {
    cfg: &'a FuzzyConfig,
    speed: [Membership; 3],
    rsrp: [Membership; 3],
    load: [Membership; 3],
    output: [Membership; 3],
}

impl<'a> FuzzyController<'a> {
    pub fn new(cfg: &'a FuzzyConfig) -> Self {
        FuzzyController {
            cfg,
            speed: input_terms(cfg.speed_centers),
            rsrp: input_terms(cfg.rsrp_centers),
            load: input_terms(cfg.load_centers),
            output: output_terms(cfg.delta_centers),
        }
    }

    /// Firing strength of each output term (max over rules, min within).
    pub fn output_strengths(&self, speed_kmh: f64, rsrp: f64, load: f64) -> [f64; 3] {
        let gs = grades(&self.speed, speed_kmh);
        let gr = grades(&self.rsrp, rsrp);
        let gl = grades(&self.load, load);
        let mut out = [0.0_f64; 3];
        for (s, &ms) in gs.iter().enumerate() {
            for (r, &mr) in gr.iter().enumerate() {
                for (l, &ml) in gl.iter().enumerate() {
                    let k = rule_consequent(s, r, l);
                    out[k] = out[k].max(ms.min(mr).min(ml));
                }
            }
        }
        out
    }

    /// Crisp hysteresis margin in dB.
    pub fn hysteresis(&self, speed_kmh: f64, rsrp: f64, load: f64) -> f64 {
        let strengths = self.output_strengths(speed_kmh, rsrp, load);
        let [lo, hi] = self.cfg.delta_range;
        let n = self.cfg.resolution.max(2);
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..n {
            let y = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let mu = self
                .output
                .iter()
                .zip(strengths)
                .map(|(term, w)| term.grade(y).min(w))
                .fold(0.0, f64::max);
            num += y * mu;
            den += mu;
        }
        if den == 0.0 {
            (lo + hi) / 2.0
        } else {
            num / den
        }
    }

    /// `w1 f_rsrp + w2 f_load + w3 f_v` in ms.
    ///
    /// The weights are the normalized grades of weak RSRP, high load and
    /// fast speed. Each `f` maps its input linearly onto
    /// `[ttt_min, ttt_max]` so that urgency shortens the window: strong
    /// RSRP lengthens it, high load and high speed shorten it.
    pub fn time_to_trigger(&self, speed_kmh: f64, rsrp: f64, load: f64) -> f64 {
        let span = self.cfg.ttt_max_ms - self.cfg.ttt_min_ms;
        let f_rsrp = self.cfg.ttt_min_ms + span * normalized(rsrp, self.cfg.rsrp_range);
        let f_load = self.cfg.ttt_max_ms - span * normalized(load, self.cfg.load_range);
        let f_speed = self.cfg.ttt_max_ms - span * normalized(speed_kmh, self.cfg.speed_range);
        let raw = [
            self.rsrp[0].grade(rsrp),
            self.load[2].grade(load),
            self.speed[2].grade(speed_kmh),
        ];
        let total: f64 = raw.iter().sum();
        let w = if total > 0.0 {
            raw.map(|g| g / total)
        } else {
            [1.0 / 3.0; 3]
        };
        w[0] * f_rsrp + w[1] * f_load + w[2] * f_speed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn medium_inputs_give_medium_centroid() {
        let cfg = FuzzyConfig::default();
        let flc = FuzzyController::new(&cfg);
        assert_eq!(flc.output_strengths(75.0, -85.0, 0.5), [0.0, 1.0, 0.0]);
        assert!((flc.hysteresis(75.0, -85.0, 0.5) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn strong_serving_gets_larger_margin() {
        let cfg = FuzzyConfig::default();
        let flc = FuzzyController::new(&cfg);
        for speed in [0.0, 50.0, 100.0, 150.0] {
            for load in [0.0, 0.5, 1.0] {
                assert!(flc.hysteresis(speed, -60.0, load) >= flc.hysteresis(speed, -110.0, load));
            }
        }
    }

    #[test]
    fn rule_table_is_monotone() {
        for s in 0..3 {
            for r in 0..3 {
                for l in 0..3 {
                    let k = rule_consequent(s, r, l);
                    if s < 2 {
                        assert!(rule_consequent(s + 1, r, l) >= k);
                    }
                    if r < 2 {
                        assert!(rule_consequent(s, r + 1, l) >= k);
                    }
                    if l < 2 {
                        assert!(rule_consequent(s, r, l + 1) <= k);
                    }
                }
            }
        }
    }

    #[test]
    fn input_partition_sums_to_one() {
        let terms = input_terms([20.0, 75.0, 130.0]);
        for x in [0.0, 20.0, 40.0, 75.0, 100.0, 130.0, 150.0] {
            let g = grades(&terms, x);
            assert!((g.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn outputs_stay_in_bounds(speed in 0.0f64..200.0, rsrp in -140.0f64..-40.0, load in 0.0f64..1.0) {
            let cfg = FuzzyConfig::default();
            let flc = FuzzyController::new(&cfg);
            let ttt = flc.time_to_trigger(speed, rsrp, load);
            prop_assert!(ttt >= cfg.ttt_min_ms - 1e-9 && ttt <= cfg.ttt_max_ms + 1e-9);
            let hys = flc.hysteresis(speed, rsrp, load);
            prop_assert!(hys >= cfg.delta_range[0] && hys <= cfg.delta_range[1]);
        }
    }
}
