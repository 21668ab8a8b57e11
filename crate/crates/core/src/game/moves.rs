use std::fmt;

use num::One;

use crate::model::{ItemId, Packing};
use crate::rational::{to_pq, Rational};

/// A single item's move to another existing bin that strictly lowers its
/// cost share. Opening a new bin never helps (its cost would be 1), so
/// targets are always existing bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovingMove {
    pub item: ItemId,
    pub source: usize,
    pub target: usize,
    pub cost_before: Rational,
    pub cost_after: Rational,
}

impl ImprovingMove {
    pub fn gain(&self) -> Rational {
        &self.cost_before - &self.cost_after
    }
}

impl fmt::Display for ImprovingMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "item {} bin {} -> bin {} cost {} -> {}",
            self.item.0,
            self.source,
            self.target,
            to_pq(&self.cost_before),
            to_pq(&self.cost_after)
        )
    }
}

/// Every improving move, ordered by item id and then target bin.
///
/// Moving item `i` from `B` to `B'` improves iff `s(B') + s_i <= 1` and
/// `s(B') + s_i > s(B)`.
pub fn improving_moves(packing: &Packing) -> Vec<ImprovingMove> {
    let instance = packing.instance();
    let loads = packing.loads();
    let owner = packing.assignment();
    let one = Rational::one();
    let mut moves = Vec::new();
    for id in instance.ids() {
        let Some(source) = owner[id.0] else { continue };
        let size = instance.size(id);
        for (target, load) in loads.iter().enumerate() {
            if target == source {
                continue;
            }
            let after = load + size;
            if after <= one && after > loads[source] {
                moves.push(ImprovingMove {
                    item: id,
                    source,
                    target,
                    cost_before: size / &loads[source],
                    cost_after: size / after,
                });
            }
        }
    }
    moves
}

/// The first entry [`improving_moves`] would return, found in
/// `O(n log m)` by searching the sorted loads for a bin with load in
/// `(s(B) − s_i, 1 − s_i]`.
pub fn first_improving_move(packing: &Packing) -> Option<ImprovingMove> {
    let instance = packing.instance();
    let loads = packing.loads();
    let owner = packing.assignment();
    let mut sorted: Vec<(&Rational, usize)> = loads.iter().zip(0..).collect();
    sorted.sort();
    let one = Rational::one();
    for id in instance.ids() {
        let Some(source) = owner[id.0] else { continue };
        let size = instance.size(id);
        let own = &loads[source];
        let low = own - size;
        let high = &one - size;
        let start = sorted.partition_point(|(l, _)| **l <= low);
        let end = sorted.partition_point(|(l, _)| **l <= high);
        let target = sorted[start..end]
            .iter()
            .map(|&(_, b)| b)
            .filter(|&b| b != source)
            .min();
        if let Some(target) = target {
            let after = &loads[target] + size;
            return Some(ImprovingMove {
                item: id,
                source,
                target,
                cost_before: size / own,
                cost_after: size / after,
            });
        }
    }
    None
}

/// True iff no item has an improving move.
pub fn is_nash(packing: &Packing) -> bool {
    first_improving_move(packing).is_none()
}
