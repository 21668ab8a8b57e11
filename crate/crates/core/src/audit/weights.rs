//! Charging the cost of subset-sum bins to their items and bounding the
//! charge collected by each optimal bin.

use std::sync::Arc;

use num::{One, Zero};

use crate::bounds::{lambda_limit, lambda_r, lambda_t};
use crate::error::{Error, Result};
use crate::game::SsTrace;
use crate::model::{validate_packing, Instance, ItemId, Packing};
use crate::rational::{frac, int, to_pq, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRule {
    /// `w_i = s_i / s(B)`: the bin's cost is fully charged.
    Proportional,
    /// `w_i = s_i`: the bin is underpaid by `1 − s(B)`.
    RawSize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinCharge {
    pub items: Vec<ItemId>,
    pub load: Rational,
    pub s_min: Rational,
    pub rule: WeightRule,
    pub underpaid: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightAssignment {
    pub instance: Arc<Instance>,
    /// Size class used for the threshold, `None` for the plain rule.
    pub t: Option<u32>,
    /// Weight per item id.
    pub weights: Vec<Rational>,
    /// Opening index of each item's bin.
    pub opened: Vec<usize>,
    pub bins: Vec<BinCharge>,
}

/// Tolerance at which the series caps are evaluated; caps use the
/// certified lower endpoint, so a pass is a proof.
fn cap_tolerance() -> Rational {
    Rational::new(1.into(), num::pow(num::BigInt::from(10), 12))
}

/// Weights of an SS run. A bin is charged proportionally iff
/// `1 − s_min <= s(B)`, or with `t` given iff `max(1 − s_min, t/(t+1)) <= s(B)`.
pub fn ss_weights(
    instance: &Arc<Instance>,
    trace: &SsTrace,
    t: Option<u32>,
) -> Result<WeightAssignment> {
    if let Some(t) = t {
        if t == 0 || *instance.alpha() > frac(1, t as i64) {
            return Err(Error::Mismatch(format!("instance alpha exceeds 1/{t}")));
        }
    }
    let packing = trace.to_packing(Arc::clone(instance));
    if let Some(v) = validate_packing(&packing).violations.first() {
        return Err(Error::Mismatch(format!(
            "trace does not pack the instance: {v}"
        )));
    }
    let mut remaining: Vec<bool> = vec![true; instance.len()];
    let mut weights = vec![Rational::zero(); instance.len()];
    let mut opened = vec![0; instance.len()];
    let mut bins = Vec::with_capacity(trace.records.len());
    for (b, record) in trace.records.iter().enumerate() {
        let s_min = instance
            .ids()
            .filter(|id| remaining[id.0])
            .map(|id| instance.size(id))
            .min()
            .cloned()
            .unwrap_or_else(Rational::zero);
        let load = packing.bin_load(b);
        if load != record.load || s_min != record.s_min {
            return Err(Error::Mismatch(format!(
                "trace bin {b} records load or s_min inconsistently"
            )));
        }
        let mut threshold = Rational::one() - &s_min;
        if let Some(t) = t {
            threshold = threshold.max(frac(t as i64, t as i64 + 1));
        }
        let rule = if threshold <= load {
            WeightRule::Proportional
        } else {
            WeightRule::RawSize
        };
        for &id in &record.items {
            remaining[id.0] = false;
            opened[id.0] = b;
            let s = instance.size(id);
            weights[id.0] = match rule {
                WeightRule::Proportional => s / &load,
                WeightRule::RawSize => s.clone(),
            };
        }
        let underpaid = match rule {
            WeightRule::Proportional => Rational::zero(),
            WeightRule::RawSize => Rational::one() - &load,
        };
        bins.push(BinCharge {
            items: record.items.clone(),
            load,
            s_min,
            rule,
            underpaid,
        });
    }
    Ok(WeightAssignment {
        instance: Arc::clone(instance),
        t,
        weights,
        opened,
        bins,
    })
}

/// `Σ (1 − s(B))` over the underpaid bins.
pub fn underpaid_total(assignment: &WeightAssignment) -> Rational {
    assignment
        .bins
        .iter()
        .fold(Rational::zero(), |acc, b| acc + &b.underpaid)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptBinAudit {
    pub bin: usize,
    pub items: usize,
    pub weight: Rational,
    pub cap: Rational,
    /// Broken per-item constraints and caps, human readable.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptAudit {
    pub bins: Vec<OptBinAudit>,
    pub ss_bins: usize,
    pub opt_bins: usize,
    pub total_weight: Rational,
    pub underpaid: Rational,
    /// `Σ_O cap(O) + 1`.
    pub cap_sum_plus_one: Rational,
    /// `λ |OPT| + 1` with `λ` the certified upper end of the limit series.
    pub ratio_bound: Rational,
}

impl OptAudit {
    pub fn violations(&self) -> impl Iterator<Item = String> + '_ {
        let mut global = Vec::new();
        if self.underpaid > Rational::one() {
            global.push(format!(
                "underpaid total {} exceeds 1",
                to_pq(&self.underpaid)
            ));
        }
        if &self.total_weight + &self.underpaid != int(self.ss_bins as i64) {
            global.push("weights plus underpaid amount differ from the SS bin count".into());
        }
        if int(self.ss_bins as i64) > self.cap_sum_plus_one {
            global.push(format!(
                "{} SS bins exceed the summed caps plus one",
                self.ss_bins
            ));
        }
        if int(self.ss_bins as i64) > self.ratio_bound {
            global.push(format!("{} SS bins exceed lambda * OPT + 1", self.ss_bins));
        }
        let per_bin = self.bins.iter().flat_map(|b| {
            b.violations
                .iter()
                .map(move |v| format!("opt bin {}: {v}", b.bin))
        });
        global.into_iter().chain(per_bin)
    }

    pub fn passed(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// Checks, for every bin `O` of `opt`, the two per-item constraints along
/// the reverse SS order and the cap `Σ_{i∈O} w_i <= λ_{|O|}` (or `λ^t`).
///
/// Items opened in the same SS bin are ordered by id.
pub fn audit_vs_opt(assignment: &WeightAssignment, opt: &Packing) -> Result<OptAudit> {
    let instance = &assignment.instance;
    if opt.instance().as_ref() != instance.as_ref() {
        return Err(Error::Mismatch(
            "optimal packing is over a different instance".into(),
        ));
    }
    if let Some(v) = validate_packing(opt).violations.first() {
        return Err(Error::InvalidPacking(v.to_string()));
    }
    let tol = cap_tolerance();
    let param_cap = match assignment.t {
        Some(t) => Some(lambda_t(t, &tol)?.lower),
        None => None,
    };
    let floor = assignment.t.map(|t| frac(t as i64, t as i64 + 1));
    let mut bins = Vec::with_capacity(opt.bin_count());
    let mut cap_sum = Rational::zero();
    for (o, members) in opt.bins().iter().enumerate() {
        let mut order = members.clone();
        order.sort_by_key(|id| (std::cmp::Reverse(assignment.opened[id.0]), id.0));
        let mut prefix = Rational::zero();
        let mut min: Option<Rational> = None;
        let mut weight = Rational::zero();
        let mut violations = Vec::new();
        for id in order {
            let s = instance.size(id);
            let w = &assignment.weights[id.0];
            prefix += s;
            min = Some(min.map_or_else(|| s.clone(), |m| m.min(s.clone())));
            let gap = Rational::one() - min.as_ref().expect("set above");
            if *w > s / &prefix {
                violations.push(format!("item {} weight {} > s_i/s(O_i)", id.0, to_pq(w)));
            }
            // With an item of size 1 in O_i the limit is vacuous.
            if !gap.is_zero() && *w > s / &gap {
                violations.push(format!(
                    "item {} weight {} > s_i/(1 - min O_i)",
                    id.0,
                    to_pq(w)
                ));
            }
            if let Some(f) = &floor {
                let denom = prefix.clone().max(gap).max(f.clone());
                if *w > s / denom {
                    violations.push(format!(
                        "item {} weight {} > parametric share",
                        id.0,
                        to_pq(w)
                    ));
                }
            }
            weight += w;
        }
        let cap = match &param_cap {
            Some(c) => c.clone(),
            None => lambda_r(members.len() as u32)?,
        };
        if weight > cap {
            violations.push(format!(
                "weight {} exceeds cap {}",
                to_pq(&weight),
                to_pq(&cap)
            ));
        }
        cap_sum += &cap;
        bins.push(OptBinAudit {
            bin: o,
            items: members.len(),
            weight,
            cap,
            violations,
        });
    }
    let lambda = match assignment.t {
        Some(t) => lambda_t(t, &tol)?.upper,
        None => lambda_limit(&tol)?.upper,
    };
    let total_weight = assignment
        .weights
        .iter()
        .fold(Rational::zero(), |a, w| a + w);
    Ok(OptAudit {
        ss_bins: assignment.bins.len(),
        opt_bins: opt.bin_count(),
        total_weight,
        underpaid: underpaid_total(assignment),
        cap_sum_plus_one: cap_sum + Rational::one(),
        ratio_bound: lambda * int(opt.bin_count() as i64) + Rational::one(),
        bins,
    })
}
