use crate::booleanize::BooleanSpec;
use crate::error::{Error, Result};
use crate::frontend::SafetyMatrix;

/// Default bound on `K * 2^L`.
pub const DEFAULT_STATE_CAP: u64 = 1 << 20;

/// Literal counts up to this use a precomputed edge table.
const DENSE_EDGE_LIMIT: usize = 10;

pub type StateId = usize;

/// The state before any step has been played.
pub const INIT: StateId = 0;

/// Explicit safety game over `{init} ∪ [0,K) × [0,2^L)`.
///
/// State `(k, c)` records the previous step: partition `k` was played and
/// the system answered with cube `c`.
#[derive(Debug, Clone)]
pub struct SafetyGame {
    num_partitions: usize,
    num_literals: usize,
    extra: Vec<Vec<u32>>,
    matrix: SafetyMatrix,
    edges: Option<Vec<u64>>,
}

impl SafetyGame {
    pub fn num_partitions(&self) -> usize {
        self.num_partitions
    }

    pub fn num_literals(&self) -> usize {
        self.num_literals
    }

    pub fn num_cubes(&self) -> usize {
        1 << self.num_literals
    }

    pub fn num_states(&self) -> usize {
        self.num_partitions * self.num_cubes() + 1
    }

    pub fn state(&self, k: usize, cube: u32) -> StateId {
        1 + k * self.num_cubes() + cube as usize
    }

    /// `(k, cube)` of a non-initial state.
    pub fn decode(&self, s: StateId) -> Option<(usize, u32)> {
        if s == INIT || s >= self.num_states() {
            return None;
        }
        let i = s - 1;
        Some((i / self.num_cubes(), (i % self.num_cubes()) as u32))
    }

    /// Reaction set of partition `k`, ascending.
    pub fn extra(&self, k: usize) -> &[u32] {
        &self.extra[k]
    }

    pub fn matrix(&self) -> &SafetyMatrix {
        &self.matrix
    }

    /// Whether the matrix holds with current atoms from `cur` and next atoms from `next`.
    pub fn safe(&self, cur: u32, next: u32) -> bool {
        match &self.edges {
            Some(bits) => {
                let i = (cur as usize) << self.num_literals | next as usize;
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            None => self.matrix.holds(cur, next),
        }
    }

    /// System moves at `s` against partition `k`: cubes of `extra[k]` whose
    /// edge from `s` is safe. Every cube of `extra[k]` is allowed from init.
    pub fn moves(&self, s: StateId, k: usize) -> impl Iterator<Item = u32> + '_ {
        let cur = self.decode(s).map(|(_, c)| c);
        self.extra[k]
            .iter()
            .copied()
            .filter(move |&c| cur.is_none_or(|p| self.safe(p, c)))
    }
}

pub fn build_game(b: &BooleanSpec) -> Result<SafetyGame> {
    build_game_with_cap(b, DEFAULT_STATE_CAP)
}

/// Enumerates the game; fails when `K * 2^L` exceeds `cap`.
pub fn build_game_with_cap(b: &BooleanSpec, cap: u64) -> Result<SafetyGame> {
    let k = b.num_partitions();
    let l = b.num_literals();
    if k == 0 || l == 0 {
        return Err(Error::contract(
            "the game needs at least one partition and one literal",
        ));
    }
    let states = (k as u128) << l.min(127);
    if l >= 64 || states > u128::from(cap) {
        return Err(Error::StateSpaceTooLarge {
            states: if l >= 64 { u128::MAX } else { states },
            cap,
        });
    }
    if b.matrix.num_literals != l {
        return Err(Error::contract(format!(
            "matrix expects {} literals, the abstraction has {l}",
            b.matrix.num_literals
        )));
    }
    let extra: Vec<Vec<u32>> = b
        .partitions
        .iter()
        .map(|p| p.reaction.iter().collect())
        .collect();
    if let Some(bad) = extra.iter().flatten().find(|&&c| (c as u64) >= 1u64 << l) {
        return Err(Error::contract(format!(
            "cube {bad} out of range for {l} literals"
        )));
    }
    let edges = (l <= DENSE_EDGE_LIMIT).then(|| {
        let n = 1usize << l;
        let mut bits = vec![0u64; (n * n).div_ceil(64)];
        for cur in 0..n {
            for next in 0..n {
                if b.matrix.holds(cur as u32, next as u32) {
                    let i = cur << l | next;
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
        }
        bits
    });
    Ok(SafetyGame {
        num_partitions: k,
        num_literals: l,
        extra,
        matrix: b.matrix.clone(),
        edges,
    })
}

/// Greatest fixpoint of the safe-successor operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinningRegion {
    member: Vec<bool>,
    /// Round in which a losing state was removed, starting at 1.
    rank: Vec<Option<u32>>,
}

impl WinningRegion {
    pub fn contains(&self, s: StateId) -> bool {
        self.member.get(s).copied().unwrap_or(false)
    }

    pub fn init_winning(&self) -> bool {
        self.member[INIT]
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, m)| **m)
            .map(|(s, _)| s)
    }

    pub fn len(&self) -> usize {
        self.member.iter().filter(|m| **m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Removal round of a losing state; `None` for winning states.
    pub fn rank(&self, s: StateId) -> Option<u32> {
        self.rank[s]
    }
}

fn can_stay(g: &SafetyGame, s: StateId, z: &[bool]) -> bool {
    (0..g.num_partitions()).all(|k| g.moves(s, k).any(|c| z[g.state(k, c)]))
}

/// One application of the operator: states from which, for every partition,
/// some safe move stays in `z`. Init is judged the same way over its
/// unconstrained menu.
pub fn force(g: &SafetyGame, z: &[bool]) -> Vec<bool> {
    (0..g.num_states()).map(|s| can_stay(g, s, z)).collect()
}

pub fn solve_safety(g: &SafetyGame) -> WinningRegion {
    let n = g.num_states();
    let mut member = vec![true; n];
    let mut rank = vec![None; n];
    let mut round = 0u32;
    loop {
        round += 1;
        let losing: Vec<StateId> = (1..n)
            .filter(|&s| member[s] && !can_stay(g, s, &member))
            .collect();
        if losing.is_empty() {
            break;
        }
        for s in losing {
            member[s] = false;
            rank[s] = Some(round);
        }
    }
    if !can_stay(g, INIT, &member) {
        member[INIT] = false;
        rank[INIT] = Some(round);
    }
    WinningRegion { member, rank }
}
