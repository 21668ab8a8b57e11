//! Load groups of an NE packing, regular bins and the weighting argument
//! behind the price-of-anarchy upper bound.

use std::collections::BTreeSet;
use std::fmt;

use num::{One, Zero};
use serde::Serialize;

use crate::bounds::poa_upper;
use crate::error::{Error, Result};
use crate::game::is_nash;
use crate::model::{validate_packing, Packing};
use crate::rational::{frac, int, to_pq, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Group {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Lower ends `(A, B, C)` of the groups: a load above the first is `A`, and
/// so on; `D` takes the rest.
pub fn group_thresholds(t: u32) -> (Rational, Rational, Rational) {
    let t = t as i64;
    if t == 2 {
        (frac(5, 6), frac(3, 4), frac(17, 24))
    } else {
        (
            frac(2 * t + 1, 2 * (t + 1)),
            frac(t + 1, t + 2),
            frac(t * t - t + 1, t * t),
        )
    }
}

pub fn group_of(load: &Rational, t: u32) -> Group {
    let (a, b, c) = group_thresholds(t);
    if *load > a {
        Group::A
    } else if *load > b {
        Group::B
    } else if *load > c {
        Group::C
    } else {
        Group::D
    }
}

/// Size range `(low, high]` of a t-item.
pub fn t_item_range(t: u32) -> (Rational, Rational) {
    let t = t as i64;
    if t == 2 {
        (frac(7, 24), frac(1, 2))
    } else {
        (frac(t - 1, t * t), frac(1, t))
    }
}

pub fn is_t_item_size(size: &Rational, t: u32) -> bool {
    let (low, high) = t_item_range(t);
    *size > low && *size <= high
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GroupCounts {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl GroupCounts {
    pub const CSV_HEADER: &'static str = "name,t,n_a,n_b,n_c,n_d";

    pub fn csv_row(&self, name: &str, t: u32) -> String {
        format!("{name},{t},{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

/// Per-bin groups of a packing plus the derived structure used by the
/// claims. Within a group, "leftmost" means largest load, ties by index.
#[derive(Debug, Clone)]
pub struct GroupClassification {
    pub t: u32,
    pub loads: Vec<Rational>,
    pub labels: Vec<Group>,
    pub counts: GroupCounts,
    /// B/C/D bins with exactly `t` items, all t-items.
    pub regular: Vec<bool>,
    /// Leftmost bin of B, C and D and the two rightmost bins of D.
    pub special: BTreeSet<usize>,
}

impl GroupClassification {
    fn new(packing: &Packing, t: u32) -> GroupClassification {
        let loads = packing.loads();
        let labels: Vec<Group> = loads.iter().map(|l| group_of(l, t)).collect();
        let mut counts = GroupCounts::default();
        for g in &labels {
            match g {
                Group::A => counts.a += 1,
                Group::B => counts.b += 1,
                Group::C => counts.c += 1,
                Group::D => counts.d += 1,
            }
        }
        let instance = packing.instance();
        let regular = packing
            .bins()
            .iter()
            .zip(&labels)
            .map(|(bin, g)| {
                *g != Group::A
                    && bin.len() == t as usize
                    && bin.iter().all(|id| is_t_item_size(instance.size(*id), t))
            })
            .collect();
        let mut special = BTreeSet::new();
        for g in [Group::B, Group::C, Group::D] {
            let mut members: Vec<usize> = (0..loads.len()).filter(|&b| labels[b] == g).collect();
            members.sort_by(|&x, &y| loads[y].cmp(&loads[x]).then(x.cmp(&y)));
            special.extend(members.first());
            if g == Group::D {
                special.extend(members.iter().rev().take(2));
            }
        }
        GroupClassification {
            t,
            loads,
            labels,
            counts,
            regular,
            special,
        }
    }
}

fn check_preconditions(packing: &Packing, t: u32) -> Result<()> {
    if t < 2 {
        return Err(Error::Domain(format!("t = {t}")));
    }
    if *packing.instance().alpha() > frac(1, t as i64) {
        return Err(Error::Mismatch(format!("instance alpha exceeds 1/{t}")));
    }
    if let Some(v) = validate_packing(packing).violations.first() {
        return Err(Error::InvalidPacking(v.to_string()));
    }
    Ok(())
}

/// Groups of an NE packing. Fails on an invalid packing, a size cap above
/// `1/t`, or a packing that is not a Nash equilibrium.
pub fn classify_groups(packing: &Packing, t: u32) -> Result<GroupClassification> {
    check_preconditions(packing, t)?;
    if !is_nash(packing) {
        return Err(Error::InvalidPacking(
            "packing is not a Nash equilibrium".into(),
        ));
    }
    Ok(GroupClassification::new(packing, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    Pass,
    Fail,
    /// The input does not meet the claim's hypothesis; not a counterexample.
    Precondition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub status: ClaimStatus,
    /// Offending or exempted bins (or items, for the counting claim).
    pub exceptions: Vec<usize>,
    pub detail: String,
}

impl ClaimReport {
    pub fn passed(&self) -> bool {
        self.status == ClaimStatus::Pass
    }

    fn precondition(e: Error) -> ClaimReport {
        ClaimReport {
            status: ClaimStatus::Precondition,
            exceptions: Vec::new(),
            detail: e.to_string(),
        }
    }
}

/// At most two bins of an NE packing have load `<= t/(t+1)`.
pub fn low_load_check(packing: &Packing, t: u32) -> ClaimReport {
    let groups = match classify_groups(packing, t) {
        Ok(g) => g,
        Err(e) => return ClaimReport::precondition(e),
    };
    let floor = frac(t as i64, t as i64 + 1);
    let low: Vec<usize> = (0..groups.loads.len())
        .filter(|&b| groups.loads[b] <= floor)
        .collect();
    ClaimReport {
        status: if low.len() <= 2 {
            ClaimStatus::Pass
        } else {
            ClaimStatus::Fail
        },
        detail: format!("{} bins with load <= {}", low.len(), to_pq(&floor)),
        exceptions: low,
    }
}

/// Every B/C/D bin outside a budget of five is regular. Runs on any valid
/// packing; the exceptions are listed either way.
pub fn regular_bins_check(packing: &Packing, t: u32) -> ClaimReport {
    if let Err(e) = check_preconditions(packing, t) {
        return ClaimReport::precondition(e);
    }
    let groups = GroupClassification::new(packing, t);
    let exceptions: Vec<usize> = (0..groups.labels.len())
        .filter(|&b| groups.labels[b] != Group::A && !groups.regular[b])
        .collect();
    let outside = exceptions
        .iter()
        .filter(|b| !groups.special.contains(b))
        .count();
    ClaimReport {
        status: if exceptions.len() <= 5 {
            ClaimStatus::Pass
        } else {
            ClaimStatus::Fail
        },
        detail: format!(
            "{} non-regular B/C/D bins ({} outside the special bins)",
            exceptions.len(),
            outside
        ),
        exceptions,
    }
}

/// Counts the t-items of the `N_t` optimal bins holding `t+1` t-items that
/// sit in regular NE bins made only of such items, and requires at most
/// `(N_t − 1) t`. Also checks that any `t` t-sized items outweigh any `t−1`.
pub fn tuple_count_check(ne: &Packing, opt: &Packing, t: u32) -> ClaimReport {
    let groups = match classify_groups(ne, t) {
        Ok(g) => g,
        Err(e) => return ClaimReport::precondition(e),
    };
    if opt.instance().as_ref() != ne.instance().as_ref() || !validate_packing(opt).is_valid() {
        return ClaimReport::precondition(Error::Mismatch(
            "optimal packing is invalid or over another instance".into(),
        ));
    }
    let instance = ne.instance();
    let mut t_item = vec![false; instance.len()];
    for (b, bin) in ne.bins().iter().enumerate() {
        if groups.regular[b] && !groups.special.contains(&b) {
            for id in bin {
                t_item[id.0] = true;
            }
        }
    }
    let mut in_full = vec![false; instance.len()];
    let mut n_t = 0;
    for bin in opt.bins() {
        if bin.iter().filter(|id| t_item[id.0]).count() == t as usize + 1 {
            n_t += 1;
            for id in bin.iter().filter(|id| t_item[id.0]) {
                in_full[id.0] = true;
            }
        }
    }
    let mut tupled = Vec::new();
    for (b, bin) in ne.bins().iter().enumerate() {
        if groups.regular[b] && !groups.special.contains(&b) && bin.iter().all(|id| in_full[id.0]) {
            tupled.extend(bin.iter().map(|id| id.0));
        }
    }

    let mut sizes: Vec<&Rational> = instance.sizes().filter(|s| is_t_item_size(s, t)).collect();
    sizes.sort();
    let tu = t as usize;
    let ordering = sizes.len() < tu || {
        let smallest: Rational = sizes[..tu].iter().fold(Rational::zero(), |a, s| a + *s);
        let largest: Rational = sizes[sizes.len() - (tu - 1)..]
            .iter()
            .fold(Rational::zero(), |a, s| a + *s);
        smallest > largest
    };

    let counting = n_t == 0 || tupled.len() <= (n_t - 1) * tu;
    ClaimReport {
        status: if counting && ordering {
            ClaimStatus::Pass
        } else {
            ClaimStatus::Fail
        },
        detail: format!(
            "N_t = {n_t}, {} t-items in all-t-item NE tuples (limit {}); tuple ordering {}",
            tupled.len(),
            n_t.saturating_sub(1) * tu,
            if ordering { "holds" } else { "fails" }
        ),
        exceptions: tupled,
    }
}

#[derive(Debug, Clone)]
pub struct PoaWeightReport {
    pub counts: GroupCounts,
    pub ne_bins: usize,
    pub opt_bins: usize,
    pub total_weight: Rational,
    /// `poa_upper(t) · |OPT| + 5`.
    pub bound: Rational,
    pub violations: Vec<String>,
}

impl PoaWeightReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The weighting argument replayed on one NE/OPT pair with `c = 2(t+1)/(2t+1)`:
/// items weigh `c·x`, plus `(1 − cL)/k` in non-special regular bins of load
/// `L` with `k` items.
pub fn poa_weight_audit(ne: &Packing, opt: &Packing, t: u32) -> Result<PoaWeightReport> {
    let groups = classify_groups(ne, t)?;
    if opt.instance().as_ref() != ne.instance().as_ref() {
        return Err(Error::Mismatch(
            "packings are over different instances".into(),
        ));
    }
    if let Some(v) = validate_packing(opt).violations.first() {
        return Err(Error::InvalidPacking(v.to_string()));
    }
    let instance = ne.instance();
    let ti = t as i64;
    let c = frac(2 * (ti + 1), 2 * ti + 1);
    let mut weight = vec![Rational::zero(); instance.len()];
    let mut t_item = vec![false; instance.len()];
    let mut violations = Vec::new();
    for (b, bin) in ne.bins().iter().enumerate() {
        let top_up = groups.regular[b] && !groups.special.contains(&b);
        let extra = if top_up {
            (Rational::one() - &c * &groups.loads[b]) / int(bin.len() as i64)
        } else {
            Rational::zero()
        };
        let mut total = Rational::zero();
        for id in bin {
            let w = &c * instance.size(*id) + &extra;
            total += &w;
            weight[id.0] = w;
            t_item[id.0] = top_up;
        }
        if groups.special.contains(&b) {
            continue;
        }
        if top_up && total != Rational::one() {
            violations.push(format!("regular NE bin {b} weighs {} != 1", to_pq(&total)));
        } else if total < Rational::one() {
            violations.push(format!(
                "NE bin {b} ({}) weighs {} < 1",
                groups.labels[b],
                to_pq(&total)
            ));
        }
    }
    let full_cap = frac(ti + 1, ti);
    let other_cap = frac(2 * ti + 3, 2 * ti + 1);
    for (o, bin) in opt.bins().iter().enumerate() {
        let w = bin.iter().fold(Rational::zero(), |a, id| a + &weight[id.0]);
        let k = bin.iter().filter(|id| t_item[id.0]).count();
        let cap = if k == t as usize + 1 {
            &full_cap
        } else {
            &other_cap
        };
        if k > t as usize + 1 {
            violations.push(format!("OPT bin {o} holds {k} t-items"));
        }
        if w > *cap {
            violations.push(format!("OPT bin {o} weighs {} > {}", to_pq(&w), to_pq(cap)));
        }
    }
    let total_weight = weight.iter().fold(Rational::zero(), |a, w| a + w);
    if int(ne.bin_count() as i64 - 5) > total_weight {
        violations.push(format!(
            "{} NE bins exceed total weight {} + 5",
            ne.bin_count(),
            to_pq(&total_weight)
        ));
    }
    let bound = poa_upper(t)? * int(opt.bin_count() as i64) + int(5);
    if int(ne.bin_count() as i64) > bound {
        violations.push(format!(
            "{} NE bins exceed poa_upper * OPT + 5 = {}",
            ne.bin_count(),
            to_pq(&bound)
        ));
    }
    Ok(PoaWeightReport {
        counts: groups.counts,
        ne_bins: ne.bin_count(),
        opt_bins: opt.bin_count(),
        total_weight,
        bound,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::{Instance, ItemId};

    fn packing(alpha: (i64, i64), bins: &[&[(i64, i64)]]) -> Packing {
        let sizes: Vec<Rational> = bins
            .iter()
            .flat_map(|b| b.iter().map(|&(p, q)| frac(p, q)))
            .collect();
        let inst = Arc::new(Instance::new(frac(alpha.0, alpha.1), sizes).unwrap());
        let mut next = 0;
        let ids = bins
            .iter()
            .map(|b| {
                let v: Vec<ItemId> = (next..next + b.len()).map(ItemId).collect();
                next += b.len();
                v
            })
            .collect();
        Packing::new(inst, ids).unwrap()
    }

    #[test]
    fn thresholds() {
        assert_eq!(group_of(&frac(9, 10), 3), Group::A);
        assert_eq!(group_of(&frac(7, 10), 2), Group::D);
        assert_eq!(group_of(&frac(4, 5), 3), Group::C);
        assert_eq!(group_of(&frac(3, 4), 2), Group::C);
        assert!(frac(2, 3) < frac(7, 10) && frac(7, 10) <= frac(17, 24));
        // Any two t-items outweigh one for t = 2.
        assert!(frac(7, 12) > frac(1, 2));
    }

    #[test]
    fn regular_bin_weight_is_one() {
        let c = frac(6, 5);
        let l = frac(17, 24);
        let w = &c * &l + int(2) * ((Rational::one() - &c * &l) / int(2));
        assert_eq!(w, Rational::one());
    }

    #[test]
    fn non_equilibrium_is_a_precondition_failure() {
        let p = packing(
            (1, 2),
            &[&[(1, 4), (1, 4)], &[(1, 4), (1, 4)], &[(1, 4), (1, 4)]],
        );
        assert_eq!(low_load_check(&p, 2).status, ClaimStatus::Precondition);
        let single = packing((1, 2), &[&[(1, 2), (1, 2)]]);
        assert!(low_load_check(&single, 2).passed());
    }

    #[test]
    fn small_item_bin_is_flagged() {
        let p = packing((1, 3), &[&[(1, 12); 4]]);
        let r = regular_bins_check(&p, 3);
        assert!(r.passed());
        assert_eq!(r.exceptions, vec![0]);
        let many: Vec<&[(i64, i64)]> = vec![&[(1, 12); 4]; 6];
        let r = regular_bins_check(&packing((1, 3), &many), 3);
        assert_eq!(r.status, ClaimStatus::Fail);
        assert_eq!(r.exceptions.len(), 6);
    }

    #[test]
    fn vacuous_counting_claim() {
        let p = packing((1, 2), &[&[(1, 2), (1, 2)]]);
        let r = tuple_count_check(&p, &p, 2);
        assert!(r.passed(), "{}", r.detail);
        assert!(r.detail.starts_with("N_t = 0"));
    }
}
