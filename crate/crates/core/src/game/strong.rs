use std::fmt;

use num::{BigInt, One, ToPrimitive, Zero};

use crate::model::{ItemId, Packing};
use crate::rational::{to_pq, Rational, Scaled};
use crate::solver::amount::Amount;
use crate::solver::{max_subset, SizeClassPool};

/// Where a coalition member ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// An existing bin, by index in the original packing.
    Existing(usize),
    /// A fresh bin; labels are numbered in order of first use.
    Fresh(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Existing(b) => write!(f, "bin {b}"),
            Target::Fresh(k) => write!(f, "fresh bin {k}"),
        }
    }
}

/// A joint move after which every member pays strictly less.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionDeviation {
    pub members: Vec<ItemId>,
    pub targets: Vec<Target>,
    pub cost_before: Vec<Rational>,
    pub cost_after: Vec<Rational>,
}

impl fmt::Display for CoalitionDeviation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, id) in self.members.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(
                f,
                "item {} -> {} cost {} -> {}",
                id.0,
                self.targets[k],
                to_pq(&self.cost_before[k]),
                to_pq(&self.cost_after[k])
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrongNashVerdict {
    /// No deviating coalition up to the cap.
    Stable,
    Unstable(CoalitionDeviation),
    /// The node budget ran out before the search finished.
    Inconclusive {
        max_coalition: usize,
        nodes: u64,
    },
}

impl StrongNashVerdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, StrongNashVerdict::Stable)
    }
}

/// Exhaustive search for a coalition deviation with at most `max_coalition`
/// movers.
///
/// Members vacate their bins and arrive at their targets simultaneously; a
/// member gains iff the final load of its target exceeds the load of the bin
/// it left. A member that stays put has unchanged cost, so only movers are
/// enumerated, and items in full bins never move. Each item in id order
/// either stays or moves to an existing bin or to a fresh bin.
pub fn is_strong_nash_direct(
    packing: &Packing,
    max_coalition: usize,
    node_budget: u64,
) -> StrongNashVerdict {
    let instance = packing.instance();
    let one = Rational::one();
    let scaled = Scaled::new(instance.sizes().chain(std::iter::once(&one)));
    let total: BigInt = scaled.values.iter().sum();
    if total < BigInt::from(u128::MAX / 8) {
        let values: Vec<u128> = scaled
            .values
            .iter()
            .map(|v| v.to_u128().expect("fits"))
            .collect();
        search_coalitions(packing, &values, max_coalition, node_budget)
    } else {
        search_coalitions(packing, &scaled.values, max_coalition, node_budget)
    }
}

/// `values` holds the scaled item sizes followed by the scaled capacity.
fn search_coalitions<W: Amount>(
    packing: &Packing,
    values: &[W],
    max_coalition: usize,
    budget: u64,
) -> StrongNashVerdict {
    let (sizes, cap) = values.split_at(values.len() - 1);
    let cap = cap[0].clone();
    let owner: Vec<usize> = packing
        .assignment()
        .into_iter()
        .map(|b| b.expect("valid packing"))
        .collect();
    let mut loads = vec![W::zero(); packing.bin_count()];
    for (i, &b) in owner.iter().enumerate() {
        loads[b] = loads[b].clone() + sizes[i].clone();
    }
    let movable: Vec<usize> = (0..sizes.len())
        .filter(|&i| loads[owner[i]] < cap)
        .collect();
    let mut undecided_in = vec![W::zero(); loads.len()];
    let mut undecided_total = W::zero();
    for &i in &movable {
        undecided_in[owner[i]] = undecided_in[owner[i]].clone() + sizes[i].clone();
        undecided_total = undecided_total + sizes[i].clone();
    }
    let bins = loads.len();
    let mut search = Coalitions {
        sizes,
        cap,
        owner: &owner,
        movable: &movable,
        max_coalition,
        budget,
        nodes: 0,
        departed: vec![W::zero(); bins],
        undecided_in,
        undecided_total,
        existing: vec![Receiving::default(); bins],
        fresh: Vec::new(),
        loads,
        moves: Vec::new(),
    };
    match search.run(0) {
        Ok(None) => StrongNashVerdict::Stable,
        Ok(Some(moves)) => StrongNashVerdict::Unstable(deviation(packing, &moves)),
        Err(()) => StrongNashVerdict::Inconclusive {
            max_coalition,
            nodes: search.nodes,
        },
    }
}

/// Exact costs for a deviation found by the integer search.
fn deviation(packing: &Packing, moves: &[(usize, Target)]) -> CoalitionDeviation {
    let instance = packing.instance();
    let loads = packing.loads();
    let owner: Vec<usize> = packing
        .assignment()
        .into_iter()
        .map(|b| b.expect("packed"))
        .collect();
    let mut existing = loads.clone();
    let mut fresh: Vec<Rational> = Vec::new();
    for &(i, target) in moves {
        let size = instance.size(ItemId(i));
        existing[owner[i]] -= size;
        match target {
            Target::Existing(b) => existing[b] += size,
            Target::Fresh(k) => {
                if fresh.len() <= k {
                    fresh.resize(k + 1, Rational::zero());
                }
                fresh[k] += size;
            }
        }
    }
    let mut dev = CoalitionDeviation {
        members: Vec::new(),
        targets: Vec::new(),
        cost_before: Vec::new(),
        cost_after: Vec::new(),
    };
    for &(i, target) in moves {
        let size = instance.size(ItemId(i));
        let after = match target {
            Target::Existing(b) => &existing[b],
            Target::Fresh(k) => &fresh[k],
        };
        dev.members.push(ItemId(i));
        dev.targets.push(target);
        dev.cost_before.push(size / &loads[owner[i]]);
        dev.cost_after.push(size / after);
    }
    dev
}

#[derive(Debug, Clone, Default)]
struct Receiving<W> {
    arrived: W,
    /// Largest origin load among arrivals; the final load must exceed it.
    required: W,
    arrivals: usize,
}

struct Coalitions<'a, W> {
    sizes: &'a [W],
    cap: W,
    owner: &'a [usize],
    movable: &'a [usize],
    max_coalition: usize,
    budget: u64,
    nodes: u64,
    loads: Vec<W>,
    departed: Vec<W>,
    undecided_in: Vec<W>,
    undecided_total: W,
    existing: Vec<Receiving<W>>,
    fresh: Vec<Receiving<W>>,
    moves: Vec<(usize, Target)>,
}

impl<W: Amount> Coalitions<'_, W> {
    /// Can the final load of `target` still be within capacity and, if
    /// anything arrived, above every arrival's origin load?
    fn feasible(&self, target: Target) -> bool {
        let (low, high, r) = match target {
            Target::Existing(b) => {
                let r = &self.existing[b];
                // Non-negative: departures and undecided items are disjoint parts of the load.
                let base = self.loads[b].clone() + r.arrived.clone() - self.departed[b].clone();
                let low = base.clone() - self.undecided_in[b].clone();
                let high = base + self.undecided_total.clone() - self.undecided_in[b].clone();
                (low, high, r)
            }
            Target::Fresh(k) => {
                let r = &self.fresh[k];
                (
                    r.arrived.clone(),
                    r.arrived.clone() + self.undecided_total.clone(),
                    r,
                )
            }
        };
        low <= self.cap && (r.arrivals == 0 || high > r.required)
    }

    fn all_feasible(&self) -> bool {
        (0..self.existing.len()).all(|b| self.feasible(Target::Existing(b)))
            && (0..self.fresh.len()).all(|k| self.feasible(Target::Fresh(k)))
    }

    fn run(&mut self, next: usize) -> Result<Option<Vec<(usize, Target)>>, ()> {
        if next == self.movable.len() {
            return Ok(if self.moves.is_empty() {
                None
            } else {
                Some(self.moves.clone())
            });
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        let item = self.movable[next];
        let size = self.sizes[item].clone();
        let origin = self.owner[item];
        self.undecided_in[origin] = self.undecided_in[origin].clone() - size.clone();
        self.undecided_total = self.undecided_total.clone() - size.clone();

        let mut result = Ok(None);
        // Stay.
        if self.all_feasible() {
            result = self.run(next + 1);
        }

        if matches!(result, Ok(None)) && self.moves.len() < self.max_coalition {
            self.departed[origin] = self.departed[origin].clone() + size.clone();
            let origin_load = self.loads[origin].clone();
            let fresh_labels = self.fresh.len();
            let targets: Vec<Target> = (0..self.loads.len())
                .filter(|&b| b != origin)
                .map(Target::Existing)
                .chain((0..=fresh_labels).map(Target::Fresh))
                .collect();
            for target in targets {
                if target == Target::Fresh(fresh_labels) {
                    self.fresh.push(Receiving {
                        arrived: W::zero(),
                        required: W::zero(),
                        arrivals: 0,
                    });
                }
                let slot = match target {
                    Target::Existing(b) => &mut self.existing[b],
                    Target::Fresh(k) => &mut self.fresh[k],
                };
                let saved = slot.clone();
                slot.arrived = slot.arrived.clone() + size.clone();
                slot.arrivals += 1;
                if origin_load > slot.required {
                    slot.required = origin_load.clone();
                }
                self.moves.push((item, target));
                if self.all_feasible() {
                    result = self.run(next + 1);
                }
                self.moves.pop();
                match target {
                    Target::Existing(b) => self.existing[b] = saved,
                    Target::Fresh(k) => self.fresh[k] = saved,
                }
                if target == Target::Fresh(fresh_labels) {
                    self.fresh.pop();
                }
                if !matches!(result, Ok(None)) {
                    break;
                }
            }
            self.departed[origin] = self.departed[origin].clone() - size.clone();
        }

        self.undecided_in[origin] = self.undecided_in[origin].clone() + size.clone();
        self.undecided_total = self.undecided_total.clone() + size;
        result
    }
}

/// True iff the packing is a possible output of the subset-sum heuristic:
/// some remaining bin always carries a maximum subset sum of the remaining
/// items.
pub fn is_strong_nash_via_ss(packing: &Packing) -> bool {
    let instance = packing.instance();
    let mut order: Vec<(Rational, usize)> = packing.loads().into_iter().zip(0..).collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut pool = SizeClassPool::from_instance(instance);
    let one = Rational::one();
    let mut remaining: Vec<(Rational, usize)> = order;
    while !remaining.is_empty() {
        let best = max_subset(&pool, &one).total;
        let Some(pos) = remaining.iter().position(|(load, _)| *load == best) else {
            return false;
        };
        let (_, bin) = remaining.remove(pos);
        pool.remove(&packing.bins()[bin]);
    }
    true
}
