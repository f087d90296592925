//! Per-neighbor time-to-trigger automaton shared by A3, A3T, SOHT and the
//! fuzzy controller.

use super::HandoverState;
use crate::channel::LinkSample;

/// A neighbor's counter advances while `R_c > R_s + margin` and
/// `serving_gate(R_s)` holds, and resets otherwise. Once any counter reaches
/// `ttt_steps` the UAV switches to the strongest such neighbor (lowest id on
/// ties) and every counter is cleared.
pub(super) fn counter_step(
    state: &mut HandoverState,
    links: &[LinkSample],
    margin_db: f64,
    ttt_steps: u32,
    serving_gate: impl Fn(f64) -> bool,
) {
    let serving = state.serving.expect("attached before trigger evaluation");
    let rs = links[serving].rsrp;
    let gate = serving_gate(rs);
    let mut winner: Option<usize> = None;
    for (c, link) in links.iter().enumerate() {
        if c == serving {
            state.counters[c] = 0;
            continue;
        }
        if gate && link.rsrp > rs + margin_db {
            state.counters[c] += 1;
        } else {
            state.counters[c] = 0;
        }
        if state.counters[c] >= ttt_steps && winner.is_none_or(|w| link.rsrp > links[w].rsrp) {
            winner = Some(c);
        }
    }
    if let Some(target) = winner {
        state.switch_to(target);
        state.counters.iter_mut().for_each(|c| *c = 0);
    }
}
