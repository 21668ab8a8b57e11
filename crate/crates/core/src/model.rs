//! Items, instances, packings and the selfish cost function.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, to_pq, Rational};

/// Dense identifier of an item: its 0-based position in the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ItemId(pub usize);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: ItemId,
    pub size: Rational,
}

/// A multiset of items with sizes in `(0, alpha]`, `alpha <= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    items: Vec<Item>,
    alpha: Rational,
}

impl Instance {
    pub fn new(alpha: Rational, sizes: Vec<Rational>) -> Result<Instance> {
        if !alpha.is_positive() || alpha > Rational::one() {
            return Err(Error::InvalidInstance(format!(
                "alpha must lie in (0, 1], got {}",
                to_pq(&alpha)
            )));
        }
        let mut items = Vec::with_capacity(sizes.len());
        for (i, size) in sizes.into_iter().enumerate() {
            check_size(&size, &alpha)
                .map_err(|m| Error::InvalidInstance(format!("item {i}: {m}")))?;
            items.push(Item {
                id: ItemId(i),
                size,
            });
        }
        Ok(Instance { items, alpha })
    }

    /// Instance with `alpha = 1`.
    pub fn unrestricted(sizes: Vec<Rational>) -> Result<Instance> {
        Instance::new(Rational::one(), sizes)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn size(&self, id: ItemId) -> &Rational {
        &self.items[id.0].size
    }

    pub fn sizes(&self) -> impl Iterator<Item = &Rational> {
        self.items.iter().map(|i| &i.size)
    }

    pub fn total_size(&self) -> Rational {
        self.sizes().fold(Rational::zero(), |acc, s| acc + s)
    }

    /// Largest integer `t` with `alpha <= 1/t`.
    pub fn size_class(&self) -> u32 {
        let t = (Rational::one() / &self.alpha).floor().to_integer();
        num::ToPrimitive::to_u32(&t).unwrap_or(u32::MAX)
    }

    pub fn ids(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.items.iter().map(|i| i.id)
    }
}

fn check_size(size: &Rational, alpha: &Rational) -> std::result::Result<(), String> {
    if !size.is_positive() {
        Err("size must be positive".into())
    } else if size > &Rational::one() {
        Err("size exceeds 1".into())
    } else if size > alpha {
        Err("size exceeds alpha".into())
    } else {
        Ok(())
    }
}

/// Parses the line-oriented instance format: `alpha p/q` followed by one
/// size per non-empty line; `#` starts a comment.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut alpha: Option<Rational> = None;
    let mut sizes = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match &alpha {
            None => {
                let value = line
                    .strip_prefix("alpha")
                    .ok_or_else(|| Error::parse(line_no, "expected `alpha <p>/<q>` header"))?;
                let value = parse_rational(value).map_err(|m| Error::parse(line_no, m))?;
                if !value.is_positive() || value > Rational::one() {
                    return Err(Error::parse(line_no, "alpha must lie in (0, 1]"));
                }
                alpha = Some(value);
            }
            Some(a) => {
                let size = parse_rational(line).map_err(|m| Error::parse(line_no, m))?;
                check_size(&size, a).map_err(|m| Error::parse(line_no, m))?;
                sizes.push(size);
            }
        }
    }
    let alpha = alpha.ok_or_else(|| Error::parse(1, "missing `alpha` header"))?;
    Instance::new(alpha, sizes)
}

pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = format!("alpha {}\n", to_pq(instance.alpha()));
    for item in instance.items() {
        out.push_str(&to_pq(&item.size));
        out.push('\n');
    }
    out
}

/// An assignment of every item of an instance to exactly one bin.
///
/// Bins are ordered; members keep the order they were given in. A `Packing`
/// built through [`Packing::new`] is a partition with loads at most 1 and no
/// empty bins. [`Packing::from_bins_unchecked`] skips that check so that
/// [`validate_packing`] can report on arbitrary input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packing {
    instance: Arc<Instance>,
    bins: Vec<Vec<ItemId>>,
}

impl Packing {
    pub fn new(instance: Arc<Instance>, bins: Vec<Vec<ItemId>>) -> Result<Packing> {
        let packing = Packing::from_bins_unchecked(instance, bins);
        let report = validate_packing(&packing);
        if let Some(first) = report.violations.first() {
            return Err(Error::InvalidPacking(first.to_string()));
        }
        Ok(packing)
    }

    pub fn from_bins_unchecked(instance: Arc<Instance>, bins: Vec<Vec<ItemId>>) -> Packing {
        Packing { instance, bins }
    }

    /// One bin per item, in id order.
    pub fn singletons(instance: Arc<Instance>) -> Packing {
        let bins = instance.ids().map(|id| vec![id]).collect();
        Packing { instance, bins }
    }

    pub fn instance(&self) -> &Arc<Instance> {
        &self.instance
    }

    pub fn bins(&self) -> &[Vec<ItemId>] {
        &self.bins
    }

    pub fn bin_count(&self) -> usize {
        self.bins.len()
    }

    /// Exact load of bin `bin`. Panics on an invalid index.
    pub fn bin_load(&self, bin: usize) -> Rational {
        self.bins[bin]
            .iter()
            .fold(Rational::zero(), |acc, id| acc + self.instance.size(*id))
    }

    pub fn loads(&self) -> Vec<Rational> {
        (0..self.bins.len()).map(|b| self.bin_load(b)).collect()
    }

    /// Bin index of every item (`None` for items missing from the packing).
    pub fn assignment(&self) -> Vec<Option<usize>> {
        let mut owner = vec![None; self.instance.len()];
        for (b, bin) in self.bins.iter().enumerate() {
            for id in bin {
                if let Some(slot) = owner.get_mut(id.0) {
                    *slot = Some(b);
                }
            }
        }
        owner
    }

    pub fn bin_of(&self, item: ItemId) -> Option<usize> {
        self.bins.iter().position(|bin| bin.contains(&item))
    }

    /// Cost share `s_i / s(B)` of `item` in its bin.
    pub fn cost_share(&self, item: ItemId) -> Result<Rational> {
        let bin = self.bin_of(item).ok_or(Error::ItemNotFound(item))?;
        Ok(self.instance.size(item) / self.bin_load(bin))
    }

    /// Moves `item` into bin `target` (or a new bin when `target` equals the
    /// bin count). A source bin left empty is deleted; surviving bins keep
    /// their relative order.
    pub fn with_move(&self, item: ItemId, target: usize) -> Packing {
        let source = self.bin_of(item).expect("item is packed");
        let mut bins = self.bins.clone();
        if target == bins.len() {
            bins.push(Vec::new());
        }
        bins[source].retain(|id| *id != item);
        bins[target].push(item);
        bins.retain(|bin| !bin.is_empty());
        Packing {
            instance: Arc::clone(&self.instance),
            bins,
        }
    }

    /// Loads sorted in non-increasing order; the potential of the dynamics.
    pub fn sorted_loads(&self) -> Vec<Rational> {
        let mut loads = self.loads();
        loads.sort_by(|a, b| b.cmp(a));
        loads
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Overfull { bin: usize, load: Rational },
    EmptyBin { bin: usize },
    UnknownItem { bin: usize, index: usize },
    Missing { item: ItemId },
    Duplicated { item: ItemId, bins: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overfull { bin, load } => {
                write!(f, "bin {bin} is overfull (load {} > 1)", to_pq(load))
            }
            Violation::EmptyBin { bin } => write!(f, "bin {bin} is empty"),
            Violation::UnknownItem { bin, index } => {
                write!(f, "bin {bin} references unknown item index {index}")
            }
            Violation::Missing { item } => write!(f, "item {item} is not packed"),
            Violation::Duplicated { item, bins } => {
                write!(f, "item {item} appears in several bins {bins:?}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every violated packing invariant. An empty report means valid.
pub fn validate_packing(packing: &Packing) -> ValidityReport {
    let n = packing.instance.len();
    let mut violations = Vec::new();
    let mut seen: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (b, bin) in packing.bins.iter().enumerate() {
        if bin.is_empty() {
            violations.push(Violation::EmptyBin { bin: b });
        }
        let mut load = Rational::zero();
        for id in bin {
            if id.0 >= n {
                violations.push(Violation::UnknownItem {
                    bin: b,
                    index: id.0,
                });
                continue;
            }
            load += packing.instance.size(*id);
            seen.entry(id.0).or_default().push(b);
        }
        if load > Rational::one() {
            violations.push(Violation::Overfull { bin: b, load });
        }
    }
    for i in 0..n {
        match seen.get(&i) {
            None => violations.push(Violation::Missing { item: ItemId(i) }),
            Some(bins) if bins.len() > 1 => violations.push(Violation::Duplicated {
                item: ItemId(i),
                bins: bins.clone(),
            }),
            _ => {}
        }
    }
    ValidityReport { violations }
}

/// Interchange form of a packing: per bin, the 0-based input indices of its
/// members, order preserved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingDocument {
    pub bins: Vec<Vec<usize>>,
}

impl PackingDocument {
    pub fn from_packing(packing: &Packing) -> PackingDocument {
        PackingDocument {
            bins: packing
                .bins
                .iter()
                .map(|bin| bin.iter().map(|id| id.0).collect())
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<PackingDocument> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn render(&self) -> String {
        let mut out = serde_json::to_string(self).expect("packing document serializes");
        out.push('\n');
        out
    }

    /// Attaches the document to an instance without validating it.
    pub fn to_packing(&self, instance: Arc<Instance>) -> Packing {
        let bins = self
            .bins
            .iter()
            .map(|bin| bin.iter().map(|&i| ItemId(i)).collect())
            .collect();
        Packing::from_bins_unchecked(instance, bins)
    }
}
