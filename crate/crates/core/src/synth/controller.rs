use std::collections::BTreeMap;

use super::game::{SafetyGame, StateId, WinningRegion, INIT};
use crate::error::{Error, Result};

/// Deterministic Boolean strategy over the winning region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyController {
    num_partitions: usize,
    initial: StateId,
    delta: BTreeMap<(StateId, usize), (u32, StateId)>,
}

impl MealyController {
    /// Builds a controller from an explicit transition list, checking that it
    /// is total on its states and closed under its own successors.
    pub fn from_transitions(
        num_partitions: usize,
        initial: StateId,
        transitions: impl IntoIterator<Item = (StateId, usize, u32, StateId)>,
    ) -> Result<Self> {
        let mut delta = BTreeMap::new();
        for (s, k, c, next) in transitions {
            if k >= num_partitions {
                return Err(Error::Artifact(format!(
                    "transition input {k} out of range"
                )));
            }
            if delta.insert((s, k), (c, next)).is_some() {
                return Err(Error::Artifact(format!(
                    "duplicate transition for ({s}, {k})"
                )));
            }
        }
        let ctrl = MealyController {
            num_partitions,
            initial,
            delta,
        };
        for s in ctrl.states() {
            for k in 0..num_partitions {
                let Some((_, next)) = ctrl.delta.get(&(s, k)) else {
                    return Err(Error::Artifact(format!("no transition for ({s}, {k})")));
                };
                if !ctrl.delta.contains_key(&(*next, 0)) {
                    return Err(Error::Artifact(format!(
                        "successor {next} has no transitions"
                    )));
                }
            }
        }
        if !ctrl.delta.contains_key(&(initial, 0)) {
            return Err(Error::Artifact(format!(
                "initial state {initial} has no transitions"
            )));
        }
        Ok(ctrl)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn num_partitions(&self) -> usize {
        self.num_partitions
    }

    /// `(cube, successor)` for partition `k` at state `s`.
    pub fn step(&self, s: StateId, k: usize) -> Option<(u32, StateId)> {
        self.delta.get(&(s, k)).copied()
    }

    /// States with outgoing transitions, ascending.
    pub fn states(&self) -> Vec<StateId> {
        let mut out: Vec<StateId> = self.delta.keys().map(|(s, _)| *s).collect();
        out.dedup();
        out
    }

    /// `(state, input, cube, next)` in ascending order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, usize, u32, StateId)> + '_ {
        self.delta.iter().map(|(&(s, k), &(c, n))| (s, k, c, n))
    }
}

/// Picks, at every winning state and partition, the smallest safe cube whose
/// successor is winning.
pub fn extract_controller(g: &SafetyGame, w: &WinningRegion) -> Result<MealyController> {
    if !w.init_winning() {
        return Err(Error::NotRealizable {
            trap: trap_sequence(g, w),
        });
    }
    let mut delta = BTreeMap::new();
    for s in w.states() {
        for k in 0..g.num_partitions() {
            let c = g
                .moves(s, k)
                .find(|&c| w.contains(g.state(k, c)))
                .ok_or_else(|| Error::contract(format!("winning state {s} is stuck on {k}")))?;
            delta.insert((s, k), (c, g.state(k, c)));
        }
    }
    Ok(MealyController {
        num_partitions: g.num_partitions(),
        initial: INIT,
        delta,
    })
}

/// Partition sequence along which the environment forces a losing play:
/// the environment minimizes the worst removal rank it allows, the system
/// delays by taking the highest rank.
fn trap_sequence(g: &SafetyGame, w: &WinningRegion) -> Vec<usize> {
    let mut seq = Vec::new();
    let mut s = INIT;
    // ranks strictly decrease along the play, so this terminates
    for _ in 0..=g.num_states() {
        let rank_of = |k: usize, c: u32| w.rank(g.state(k, c)).unwrap_or(u32::MAX);
        let mut best: Option<(u32, usize)> = None;
        for k in 0..g.num_partitions() {
            let worst = g.moves(s, k).map(|c| rank_of(k, c)).max().unwrap_or(0);
            if best.is_none_or(|(r, _)| worst < r) {
                best = Some((worst, k));
            }
        }
        let Some((worst, k)) = best else { break };
        if s != INIT
            && worst == 0
            && (0..g.num_partitions()).all(|j| g.moves(s, j).next().is_none())
        {
            // no move survives whatever the environment plays
            break;
        }
        seq.push(k);
        if worst == 0 {
            break;
        }
        let c = g
            .moves(s, k)
            .filter(|&c| rank_of(k, c) == worst)
            .min()
            .expect("a move attains the maximum");
        s = g.state(k, c);
    }
    seq
}
