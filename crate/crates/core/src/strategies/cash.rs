//! Context-aware smart handover.
//!
//! Candidates are sites ahead of the UAV whose RSRP is at least `tau_min`.
//! Among them the site with the best forward/lateral geometry is chosen, and
//! the UAV moves to it once it beats the serving RSRP by the hysteresis
//! margin while the serving link sits within the safety margin of `tau_min`,
//! for a full TTT window.

use super::{ttt_steps, HandoverState, StepContext, StrategyConfig};
use crate::channel::LinkSample;
use crate::geometry::Point3;

/// `(x_i - x_uav) / (1 + |y_i - y_corridor|)`.
pub fn cash_score(gbs_pos: Point3, uav_x: f64, centerline_y: f64) -> f64 {
    (gbs_pos.x - uav_x) / (1.0 + (gbs_pos.y - centerline_y).abs())
}

/// Highest-scoring candidate, lowest id on ties.
fn best_candidate(links: &[LinkSample], ctx: &StepContext<'_>, tau_min: f64) -> Option<usize> {
    let uav_x = ctx.uav_pos.x;
    let mut best: Option<(usize, f64)> = None;
    for (i, link) in links.iter().enumerate() {
        let pos = ctx.gbs_positions[i];
        if link.rsrp < tau_min || pos.x <= uav_x {
            continue;
        }
        debug_assert!(link.rsrp >= tau_min && pos.x > uav_x);
        let score = cash_score(pos, uav_x, ctx.centerline_y);
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i)
}

pub(super) fn cash_step(state: &mut HandoverState, links: &[LinkSample], ctx: &StepContext<'_>, cfg: &StrategyConfig) {
    let serving = state.serving.expect("attached before trigger evaluation");
    let Some(candidate) = best_candidate(links, ctx, cfg.tau_min) else {
        state.cash_counter = 0;
        state.last_candidate = None;
        return;
    };
    if state.last_candidate != Some(candidate) {
        state.cash_counter = 0;
        state.last_candidate = Some(candidate);
    }
    let rs = links[serving].rsrp;
    let rc = links[candidate].rsrp;
    if rc > rs + cfg.hysteresis_db && rs <= cfg.tau_min + cfg.safety_margin_db {
        state.cash_counter += 1;
        if state.cash_counter >= ttt_steps(cfg.ttt_ms, ctx.step_duration_ms) {
            state.switch_to(candidate);
            state.cash_counter = 0;
        }
    } else {
        state.cash_counter = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::super::*;

    #[test]
    fn score_examples() {
        assert_eq!(cash_score(Point3::new(600.0, 500.0, 30.0), 100.0, 500.0), 500.0);
        assert!((cash_score(Point3::new(600.0, 549.0, 30.0), 100.0, 500.0) - 10.0).abs() < 1e-12);
        let near = cash_score(Point3::new(600.0, 510.0, 30.0), 100.0, 500.0);
        let far = cash_score(Point3::new(600.0, 530.0, 30.0), 100.0, 500.0);
        assert!(near > far);
    }

    #[test]
    fn all_sites_behind_means_no_candidate() {
        let positions = [Point3::new(0.0, 500.0, 30.0), Point3::new(50.0, 500.0, 30.0)];
        let cfg = StrategyConfig::default();
        let mut state = HandoverState::new();
        let c = ctx(100.0, &positions, &[0.5; 2]);
        step(StrategyKind::Cash, &mut state, &links(&[-100.0, -80.0]), &c, &cfg);
        assert_eq!(state.serving, Some(1));
        step(StrategyKind::Cash, &mut state, &links(&[-80.0, -100.0]), &c, &cfg);
        assert_eq!(state.serving, Some(1));
        assert_eq!(state.cash_counter, 0);
        assert_eq!(state.last_candidate, None);
    }

    #[test]
    fn strong_serving_blocks_trigger() {
        let positions = [Point3::new(0.0, 500.0, 30.0), Point3::new(900.0, 500.0, 30.0)];
        let cfg = StrategyConfig::default();
        let mut state = HandoverState::new();
        let c = ctx(100.0, &positions, &[0.5; 2]);
        step(StrategyKind::Cash, &mut state, &links(&[-70.0, -90.0]), &c, &cfg);
        step(StrategyKind::Cash, &mut state, &links(&[-70.0, -60.0]), &c, &cfg);
        assert_eq!(state.serving, Some(0));
        assert_eq!(state.handover_count, 0);
    }

    #[test]
    fn two_site_corridor_hands_over_once() {
        // site 1 lies ahead and dominates a weakening serving link for two steps
        let positions = [Point3::new(0.0, 500.0, 30.0), Point3::new(900.0, 500.0, 30.0)];
        let cfg = StrategyConfig {
            ttt_ms: 200.0,
            ..StrategyConfig::default()
        };
        let trace = [
            [-90.0, -100.0],
            [-98.0, -99.0],
            [-99.0, -95.0],
            [-100.0, -94.0],
            [-101.0, -93.0],
            [-103.0, -92.0],
        ];
        let mut state = HandoverState::new();
        let mut serving = Vec::new();
        for (k, rsrp) in trace.iter().enumerate() {
            let c = ctx(100.0 + k as f64, &positions, &[0.5; 2]);
            step(StrategyKind::Cash, &mut state, &links(rsrp), &c, &cfg);
            serving.push(state.serving.unwrap());
        }
        assert_eq!(serving, vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(state.handover_count, 1);
        assert_eq!(state.outage_steps, 0);
    }

    #[test]
    fn candidate_change_restarts_window() {
        let positions = [
            Point3::new(0.0, 500.0, 30.0),
            Point3::new(900.0, 500.0, 30.0),
            Point3::new(800.0, 500.0, 30.0),
        ];
        let cfg = StrategyConfig {
            ttt_ms: 200.0,
            ..StrategyConfig::default()
        };
        let mut state = HandoverState::new();
        let c = ctx(100.0, &positions, &[0.5; 3]);
        step(
            StrategyKind::Cash,
            &mut state,
            &links(&[-90.0, -120.0, -120.0]),
            &c,
            &cfg,
        );
        // only site 2 qualifies
        step(
            StrategyKind::Cash,
            &mut state,
            &links(&[-100.0, -120.0, -90.0]),
            &c,
            &cfg,
        );
        assert_eq!((state.last_candidate, state.cash_counter), (Some(2), 1));
        // site 1 (further ahead) now qualifies and takes over the window
        step(
            StrategyKind::Cash,
            &mut state,
            &links(&[-100.0, -92.0, -90.0]),
            &c,
            &cfg,
        );
        assert_eq!((state.last_candidate, state.cash_counter), (Some(1), 1));
        assert_eq!(state.serving, Some(0));
    }
}
