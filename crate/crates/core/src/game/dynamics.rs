use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::moves::{improving_moves, ImprovingMove};
use crate::model::Packing;

/// Which improving move to apply when several exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Smallest item id, then smallest target bin.
    First,
    /// Largest cost decrease; ties resolved like `First`.
    MaxGain,
    /// Uniform among all improving moves, driven by a seeded ChaCha8 stream.
    Random,
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" => Ok(Policy::First),
            "max-gain" => Ok(Policy::MaxGain),
            "random" | "seeded-random" => Ok(Policy::Random),
            other => Err(format!(
                "unknown policy `{other}` (expected first, max-gain or random)"
            )),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::First => "first",
            Policy::MaxGain => "max-gain",
            Policy::Random => "random",
        })
    }
}

#[derive(Debug, Clone)]
pub struct DynamicsRun {
    pub packing: Packing,
    pub steps: usize,
    /// The applied moves; bin indices refer to the packing before each move.
    pub log: Vec<ImprovingMove>,
}

impl DynamicsRun {
    /// One move per line.
    pub fn render_log(&self) -> String {
        self.log
            .iter()
            .enumerate()
            .map(|(k, m)| format!("step {}: {m}\n", k + 1))
            .collect()
    }
}

pub fn best_response_dynamics(packing: &Packing, policy: Policy, seed: u64) -> DynamicsRun {
    run_dynamics(packing, policy, seed, |_, _, _| {})
}

/// Applies improving moves until none is left. `observer` sees the packing
/// before each move, the move, and the packing after it.
///
/// Every move strictly increases the load vector sorted in non-increasing
/// order (lexicographically), so the loop terminates.
pub fn run_dynamics(
    packing: &Packing,
    policy: Policy,
    seed: u64,
    mut observer: impl FnMut(&Packing, &ImprovingMove, &Packing),
) -> DynamicsRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = packing.clone();
    let mut log = Vec::new();
    loop {
        let mut moves = improving_moves(&current);
        if moves.is_empty() {
            break;
        }
        let chosen = match policy {
            Policy::First => moves.swap_remove(0),
            Policy::MaxGain => {
                let mut best = 0;
                for k in 1..moves.len() {
                    if moves[k].gain() > moves[best].gain() {
                        best = k;
                    }
                }
                moves.swap_remove(best)
            }
            Policy::Random => {
                let k = rng.gen_range(0..moves.len());
                moves.swap_remove(k)
            }
        };
        let next = current.with_move(chosen.item, chosen.target);
        observer(&current, &chosen, &next);
        log.push(chosen);
        current = next;
    }
    DynamicsRun {
        steps: log.len(),
        packing: current,
        log,
    }
}
