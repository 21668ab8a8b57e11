use std::collections::HashMap;
use std::sync::Arc;

use num::{BigInt, One, ToPrimitive};

use super::amount::Amount;
use super::pool::SizeClassPool;
use crate::error::{Error, Result};
use crate::model::{Instance, ItemId, Packing};
use crate::rational::{Rational, Scaled};

/// Exact minimum-bin packing by bin completion.
///
/// The bin holding the largest unpacked item is completed with every maximal
/// feasible sub-multiset of the remaining items, largest sum first. Nodes are
/// pruned by the best of the size, cardinality and Martello–Toth L2 lower
/// bounds and by a table of count vectors already reached with as few bins.
/// Exceeding `budget` nodes returns [`Error::BudgetExceeded`] with the best
/// packing found and the root lower bound.
pub fn opt_pack(instance: &Arc<Instance>, budget: u64) -> Result<Packing> {
    let classes = Classes::new(instance);
    let outcome = match classes.scaled_u128() {
        Some((w, cap)) => solve(&w, &classes.counts, cap, budget),
        None => solve(
            &classes.weights,
            &classes.counts,
            classes.cap.clone(),
            budget,
        ),
    };
    let packing = classes.to_packing(instance, &outcome.bins);
    if outcome.optimal {
        Ok(packing)
    } else {
        Err(Error::BudgetExceeded {
            best: Box::new(packing),
            lower_bound: outcome.lower_bound,
        })
    }
}

/// Best of the size, cardinality and L2 lower bounds on the bin count.
pub fn lower_bound(instance: &Instance) -> usize {
    let classes = Classes::new(instance);
    match classes.scaled_u128() {
        Some((w, cap)) => bound(&w, &classes.counts, &cap),
        None => bound(&classes.weights, &classes.counts, &classes.cap),
    }
}

/// Items grouped by distinct size, largest first, as integers over a common
/// denominator.
struct Classes {
    pool: SizeClassPool,
    weights: Vec<BigInt>,
    counts: Vec<usize>,
    cap: BigInt,
}

impl Classes {
    fn new(instance: &Instance) -> Classes {
        let pool = SizeClassPool::from_instance(instance);
        let one = Rational::one();
        let scaled = Scaled::new(pool.sizes().iter().rev().chain(std::iter::once(&one)));
        let mut weights = scaled.values;
        let cap = weights.pop().expect("capacity present");
        let counts = pool.multiplicities().into_iter().rev().collect();
        Classes {
            pool,
            weights,
            counts,
            cap,
        }
    }

    fn scaled_u128(&self) -> Option<(Vec<u128>, u128)> {
        let total: BigInt = self
            .weights
            .iter()
            .zip(&self.counts)
            .map(|(w, &c)| w * c)
            .sum::<BigInt>()
            + &self.cap;
        if total * 4 >= BigInt::from(u128::MAX / 4) {
            return None;
        }
        let w = self
            .weights
            .iter()
            .map(|w| w.to_u128().expect("fits"))
            .collect();
        Some((w, self.cap.to_u128().expect("fits")))
    }

    fn to_packing(&self, instance: &Arc<Instance>, bins: &[Vec<usize>]) -> Packing {
        let classes = self.counts.len();
        let mut next = vec![0usize; classes];
        let packed = bins
            .iter()
            .map(|bin| {
                let mut members = Vec::new();
                for (k, &c) in bin.iter().enumerate() {
                    let ids = self.pool.class_ids(classes - 1 - k);
                    members.extend_from_slice(&ids[next[k]..next[k] + c]);
                    next[k] += c;
                }
                members.sort();
                members
            })
            .collect::<Vec<Vec<ItemId>>>();
        Packing::from_bins_unchecked(Arc::clone(instance), packed)
    }
}

struct Outcome {
    bins: Vec<Vec<usize>>,
    optimal: bool,
    lower_bound: usize,
}

fn bound<W: Amount>(w: &[W], counts: &[usize], cap: &W) -> usize {
    let total = w
        .iter()
        .zip(counts)
        .fold(W::zero(), |acc, (w, &c)| acc + w.times(c));
    let mut best = total.ceil_div(cap).to_usize();

    // At most k items larger than cap/(k+1) share a bin.
    for k in 1..=3usize {
        let big: usize = w
            .iter()
            .zip(counts)
            .filter(|(w, _)| w.times(k + 1) > *cap)
            .map(|(_, &c)| c)
            .sum();
        best = best.max(big.div_ceil(k));
    }

    // Martello–Toth L2.
    let two = W::from(2);
    let mut thresholds = vec![W::zero()];
    thresholds.extend(
        w.iter()
            .zip(counts)
            .filter(|(w, &c)| c > 0 && (*w).clone() * two.clone() <= *cap)
            .map(|(w, _)| w.clone()),
    );
    for k in thresholds {
        let (mut n1, mut n2) = (0usize, 0usize);
        let (mut s2, mut s3) = (W::zero(), W::zero());
        for (size, &c) in w.iter().zip(counts) {
            if c == 0 {
                continue;
            }
            if size.clone() + k.clone() > *cap {
                n1 += c;
            } else if size.clone() * two.clone() > *cap {
                n2 += c;
                s2 = s2 + size.times(c);
            } else if *size >= k {
                s3 = s3 + size.times(c);
            }
        }
        let free = cap.times(n2) - s2;
        let extra = if s3 > free {
            (s3 - free).ceil_div(cap).to_usize()
        } else {
            0
        };
        best = best.max(n1 + n2 + extra);
    }
    best
}

/// First fit decreasing on count vectors; the initial upper bound.
fn ffd<W: Amount>(w: &[W], counts: &[usize], cap: &W) -> Vec<Vec<usize>> {
    let mut bins: Vec<(W, Vec<usize>)> = Vec::new();
    for (k, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            match bins
                .iter_mut()
                .find(|(load, _)| load.clone() + w[k].clone() <= *cap)
            {
                Some((load, bin)) => {
                    *load = load.clone() + w[k].clone();
                    bin[k] += 1;
                }
                None => {
                    let mut bin = vec![0; counts.len()];
                    bin[k] = 1;
                    bins.push((w[k].clone(), bin));
                }
            }
        }
    }
    bins.into_iter().map(|(_, b)| b).collect()
}

struct Exhausted;

struct Search<'a, W: Amount> {
    w: &'a [W],
    cap: W,
    best: Vec<Vec<usize>>,
    root_lb: usize,
    stack: Vec<Vec<usize>>,
    seen: HashMap<Vec<usize>, usize>,
    nodes: u64,
    budget: u64,
}

fn solve<W: Amount>(w: &[W], counts: &[usize], cap: W, budget: u64) -> Outcome {
    let root_lb = bound(w, counts, &cap);
    let best = ffd(w, counts, &cap);
    if best.len() <= root_lb {
        return Outcome {
            bins: best,
            optimal: true,
            lower_bound: root_lb,
        };
    }
    let mut search = Search {
        w,
        cap,
        best,
        root_lb,
        stack: Vec::new(),
        seen: HashMap::new(),
        nodes: 0,
        budget,
    };
    let mut counts = counts.to_vec();
    let optimal = search.dfs(&mut counts).is_ok();
    Outcome {
        bins: search.best,
        optimal,
        lower_bound: root_lb,
    }
}

impl<'a, W: Amount> Search<'a, W> {
    fn done(&self) -> bool {
        self.best.len() <= self.root_lb
    }

    fn dfs(&mut self, counts: &mut Vec<usize>) -> std::result::Result<(), Exhausted> {
        let used = self.stack.len();
        let Some(first) = counts.iter().position(|&c| c > 0) else {
            if used < self.best.len() {
                self.best = self.stack.clone();
            }
            return Ok(());
        };
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Exhausted);
        }
        let node_lb = bound(self.w, counts, &self.cap);
        if used + node_lb >= self.best.len() {
            return Ok(());
        }
        match self.seen.get(counts.as_slice()) {
            Some(&prev) if prev <= used => return Ok(()),
            _ => {
                self.seen.insert(counts.clone(), used);
            }
        }

        counts[first] -= 1;
        let room = self.cap.clone() - self.w[first].clone();
        let mut completions = Vec::new();
        let mut choice = vec![0; counts.len()];
        self.completions(counts, first, room, None, &mut choice, &mut completions);
        // Largest fill first; ties keep enumeration order.
        completions.sort_by(|a, b| b.0.cmp(&a.0));

        let mut result = Ok(());
        for (_, choice) in completions {
            for (k, &c) in choice.iter().enumerate() {
                counts[k] -= c;
            }
            let mut bin = choice.clone();
            bin[first] += 1;
            self.stack.push(bin);
            result = self.dfs(counts);
            self.stack.pop();
            for (k, &c) in choice.iter().enumerate() {
                counts[k] += c;
            }
            if result.is_err() || self.done() || used + node_lb >= self.best.len() {
                break;
            }
        }
        counts[first] += 1;
        result
    }

    /// Maximal sub-multisets of `counts[k..]` fitting into `room`.
    /// `skipped` is the smallest size left out so far that fit when skipped.
    fn completions(
        &self,
        counts: &[usize],
        k: usize,
        room: W,
        skipped: Option<W>,
        choice: &mut Vec<usize>,
        out: &mut Vec<(W, Vec<usize>)>,
    ) {
        if let Some(s) = &skipped {
            // Even taking everything left, the skipped item would still fit.
            let addable =
                (k..counts.len()).fold(W::zero(), |acc, j| acc + self.w[j].times(counts[j]));
            if room >= addable + s.clone() {
                return;
            }
        }
        if k == counts.len() {
            if skipped.as_ref().is_some_and(|s| *s <= room) {
                return;
            }
            let sum = choice
                .iter()
                .zip(self.w)
                .fold(W::zero(), |acc, (&c, w)| acc + w.times(c));
            out.push((sum, choice.clone()));
            return;
        }
        let fit = (room.clone() / self.w[k].clone()).to_usize().min(counts[k]);
        for c in (0..=fit).rev() {
            choice[k] = c;
            let rest = room.clone() - self.w[k].times(c);
            let skip = if c < counts[k] && self.w[k] <= rest {
                Some(match &skipped {
                    Some(s) if *s < self.w[k] => s.clone(),
                    _ => self.w[k].clone(),
                })
            } else {
                skipped.clone()
            };
            self.completions(counts, k + 1, rest, skip, choice, out);
        }
        choice[k] = 0;
    }
}
