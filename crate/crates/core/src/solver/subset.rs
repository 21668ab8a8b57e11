use std::collections::HashMap;

use num::{BigInt, ToPrimitive, Zero};

use super::amount::Amount;
use super::pool::SizeClassPool;
use crate::model::ItemId;
use crate::rational::{Rational, Scaled};

/// A maximum-total sub-multiset that fits a given capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetResult {
    /// Chosen items, largest size class first, smallest ids first within a class.
    pub items: Vec<ItemId>,
    pub total: Rational,
}

/// Exact maximum subset sum not exceeding `capacity`.
///
/// Among all maximizers the returned one has the lexicographically greatest
/// count vector when classes are scanned from the largest size down, and it
/// takes the smallest ids of each class. A non-positive capacity or an empty
/// pool yields the empty subset.
pub fn max_subset(pool: &SizeClassPool, capacity: &Rational) -> SubsetResult {
    let empty = SubsetResult {
        items: Vec::new(),
        total: Rational::zero(),
    };
    if pool.is_empty() || capacity <= &Rational::zero() {
        return empty;
    }
    // Largest size first.
    let sizes: Vec<&Rational> = pool.sizes().iter().rev().collect();
    let mult: Vec<usize> = pool.multiplicities().into_iter().rev().collect();
    let scaled = Scaled::new(sizes.iter().copied().chain(std::iter::once(capacity)));
    let (weights, cap) = scaled.values.split_at(sizes.len());
    let cap = &cap[0];

    let total: BigInt = weights
        .iter()
        .zip(&mult)
        .map(|(w, &m)| w * m)
        .sum::<BigInt>()
        + cap;
    let counts = if total < BigInt::from(u128::MAX / 4) {
        let w: Vec<u128> = weights.iter().map(|w| w.to_u128().expect("fits")).collect();
        canonical_counts(&w, &mult, cap.to_u128().expect("fits"))
    } else {
        canonical_counts(weights, &mult, cap.clone())
    };

    let mut items = Vec::new();
    let mut total = Rational::zero();
    let classes = pool.sizes().len();
    for (k, &c) in counts.iter().enumerate() {
        let class = classes - 1 - k;
        items.extend_from_slice(&pool.class_ids(class)[..c]);
        total += sizes[k] * Rational::from_integer(BigInt::from(c));
    }
    SubsetResult { items, total }
}

struct Search<'a, W: Amount> {
    weights: &'a [W],
    mult: &'a [usize],
    suffix: Vec<W>,
    memo: HashMap<(usize, W), W>,
}

impl<'a, W: Amount> Search<'a, W> {
    fn new(weights: &'a [W], mult: &'a [usize]) -> Self {
        let mut suffix = vec![W::zero(); weights.len() + 1];
        for k in (0..weights.len()).rev() {
            suffix[k] = suffix[k + 1].clone() + weights[k].times(mult[k]);
        }
        Search {
            weights,
            mult,
            suffix,
            memo: HashMap::new(),
        }
    }

    fn max_count(&self, k: usize, cap: &W) -> usize {
        let fit = (cap.clone() / self.weights[k].clone()).to_usize();
        fit.min(self.mult[k])
    }

    /// Best total from classes `k..` within `cap`.
    fn best(&mut self, k: usize, cap: &W) -> W {
        if k == self.weights.len() {
            return W::zero();
        }
        if &self.suffix[k] <= cap {
            return self.suffix[k].clone();
        }
        if let Some(v) = self.memo.get(&(k, cap.clone())) {
            return v.clone();
        }
        let mut best = W::zero();
        for c in (0..=self.max_count(k, cap)).rev() {
            let used = self.weights[k].times(c);
            if used.clone() + self.suffix[k + 1].clone() <= best {
                break;
            }
            let rest = cap.clone() - used.clone();
            let value = used + self.best(k + 1, &rest);
            if value > best {
                best = value;
                if &best == cap {
                    break;
                }
            }
        }
        self.memo.insert((k, cap.clone()), best.clone());
        best
    }
}

fn canonical_counts<W: Amount>(weights: &[W], mult: &[usize], cap: W) -> Vec<usize> {
    let mut search = Search::new(weights, mult);
    let mut goal = search.best(0, &cap);
    let mut rem = cap;
    let mut counts = Vec::with_capacity(weights.len());
    for k in 0..weights.len() {
        let mut chosen = 0;
        for c in (0..=search.max_count(k, &rem)).rev() {
            let used = weights[k].times(c);
            let rest = rem.clone() - used.clone();
            if used.clone() + search.best(k + 1, &rest) == goal {
                chosen = c;
                goal = goal - used;
                rem = rest;
                break;
            }
        }
        counts.push(chosen);
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn pool_of(sizes: &[(i64, i64)]) -> (Instance, SizeClassPool) {
        let inst =
            Instance::unrestricted(sizes.iter().map(|&(p, q)| frac(p, q)).collect()).unwrap();
        let pool = SizeClassPool::from_instance(&inst);
        (inst, pool)
    }

    /// Every subset, as a bitmask, scored by the canonical order: total, then
    /// count vector largest-class-first.
    fn brute_force(inst: &Instance, cap: &Rational) -> (Rational, Vec<usize>) {
        let n = inst.len();
        let mut distinct: Vec<Rational> = inst.sizes().cloned().collect();
        distinct.sort_by(|a, b| b.cmp(a));
        distinct.dedup();
        let mut best: Option<(Rational, Vec<usize>)> = None;
        for mask in 0u32..(1 << n) {
            let mut total = Rational::zero();
            let mut counts = vec![0; distinct.len()];
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    let s = inst.size(ItemId(i));
                    total += s;
                    counts[distinct.iter().position(|d| d == s).unwrap()] += 1;
                }
            }
            if &total > cap {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bt, bc)) => total > *bt || (total == *bt && counts > *bc),
            };
            if better {
                best = Some((total, counts));
            }
        }
        best.unwrap()
    }

    fn counts_of(inst: &Instance, items: &[ItemId]) -> Vec<usize> {
        let mut distinct: Vec<Rational> = inst.sizes().cloned().collect();
        distinct.sort_by(|a, b| b.cmp(a));
        distinct.dedup();
        let mut counts = vec![0; distinct.len()];
        for id in items {
            counts[distinct.iter().position(|d| d == inst.size(*id)).unwrap()] += 1;
        }
        counts
    }

    #[test]
    fn halves_fill_one_bin() {
        let (_, pool) = pool_of(&[(1, 2); 3]);
        let r = max_subset(&pool, &frac(1, 1));
        assert_eq!(r.total, frac(1, 1));
        assert_eq!(r.items, vec![ItemId(0), ItemId(1)]);
    }

    #[test]
    fn graham_pool_prefers_exact_fit_without_big_item() {
        let mut sizes = vec![(33, 64); 3];
        sizes.extend([(17, 64); 3]);
        sizes.extend([(13, 64); 3]);
        let (inst, pool) = pool_of(&sizes);
        let r = max_subset(&pool, &frac(1, 1));
        assert_eq!(r.total, frac(1, 1));
        assert_eq!(r.items, vec![ItemId(3), ItemId(4), ItemId(5), ItemId(6)]);
        let (bt, bc) = brute_force(&inst, &frac(1, 1));
        assert_eq!(bt, r.total);
        assert_eq!(bc, counts_of(&inst, &r.items));
    }

    #[test]
    fn exact_pair() {
        let (_, pool) = pool_of(&[(3, 5), (2, 5), (2, 5)]);
        let r = max_subset(&pool, &frac(1, 1));
        assert_eq!(r.total, frac(1, 1));
        assert_eq!(r.items, vec![ItemId(0), ItemId(1)]);
    }

    #[test]
    fn empty_pool_and_tiny_capacity() {
        let r = max_subset(&SizeClassPool::default(), &frac(1, 1));
        assert!(r.items.is_empty());
        let (_, pool) = pool_of(&[(1, 2)]);
        assert_eq!(max_subset(&pool, &frac(1, 3)).total, frac(0, 1));
    }

    #[test]
    fn huge_denominators_use_big_integers() {
        let big = num::pow(BigInt::from(10), 40);
        let s = Rational::new(big.clone() + 1, big.clone() * 3);
        let inst = Instance::unrestricted(vec![s.clone(); 4]).unwrap();
        let r = max_subset(&SizeClassPool::from_instance(&inst), &frac(1, 1));
        assert_eq!(r.items.len(), 2);
        assert_eq!(r.total, s * frac(2, 1));
    }

    fn sizes_strategy(max_len: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
        prop::collection::vec((1i64..=12).prop_flat_map(|q| (1..=q, Just(q))), 0..=max_len)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn matches_exhaustive_enumeration(sizes in sizes_strategy(12), cap in (1i64..=6).prop_map(|p| frac(p, 6))) {
            let (inst, pool) = pool_of(&sizes);
            let r = max_subset(&pool, &cap);
            let (bt, bc) = brute_force(&inst, &cap);
            prop_assert_eq!(&r.total, &bt);
            prop_assert_eq!(counts_of(&inst, &r.items), bc);
            let sum = r.items.iter().fold(Rational::zero(), |a, id| a + inst.size(*id));
            prop_assert_eq!(sum, r.total);
        }

        #[test]
        fn removing_items_never_helps(sizes in sizes_strategy(12), drop in 0usize..12) {
            let (inst, pool) = pool_of(&sizes);
            let full = max_subset(&pool, &frac(1, 1));
            let mut smaller = pool.clone();
            if drop < inst.len() {
                smaller.remove(&[ItemId(drop)]);
            }
            prop_assert!(max_subset(&smaller, &frac(1, 1)).total <= full.total);
            prop_assert_eq!(max_subset(&pool, &frac(1, 1)), full);
        }
    }
}
