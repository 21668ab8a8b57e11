use std::sync::Arc;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, ItemId, Packing};
use crate::rational::{parse_rational, to_pq, Rational};
use crate::solver::{max_subset, SizeClassPool};

/// One bin opened by the subset-sum heuristic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsRecord {
    pub items: Vec<ItemId>,
    pub load: Rational,
    /// Smallest size still unpacked just before this bin was opened.
    pub s_min: Rational,
}

/// The bins of an SS run in opening order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SsTrace {
    pub records: Vec<SsRecord>,
}

#[derive(Serialize, Deserialize)]
struct TraceDocument {
    format: u32,
    bins: Vec<RecordDocument>,
}

#[derive(Serialize, Deserialize)]
struct RecordDocument {
    items: Vec<usize>,
    load: String,
    s_min: String,
}

impl SsTrace {
    pub fn render(&self) -> String {
        let doc = TraceDocument {
            format: crate::FORMAT_VERSION,
            bins: self
                .records
                .iter()
                .map(|r| RecordDocument {
                    items: r.items.iter().map(|id| id.0).collect(),
                    load: to_pq(&r.load),
                    s_min: to_pq(&r.s_min),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("trace serializes");
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<SsTrace> {
        let doc: TraceDocument =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        let records = doc
            .bins
            .into_iter()
            .map(|r| {
                Ok(SsRecord {
                    items: r.items.into_iter().map(ItemId).collect(),
                    load: parse_rational(&r.load).map_err(Error::Document)?,
                    s_min: parse_rational(&r.s_min).map_err(Error::Document)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SsTrace { records })
    }

    /// The packing the trace describes, bins in opening order.
    pub fn to_packing(&self, instance: Arc<Instance>) -> Packing {
        Packing::from_bins_unchecked(
            instance,
            self.records.iter().map(|r| r.items.clone()).collect(),
        )
    }
}

/// Repeatedly packs a canonical maximum subset of the unpacked items into a
/// new bin.
pub fn ss_pack(instance: &Arc<Instance>) -> (Packing, SsTrace) {
    let mut pool = SizeClassPool::from_instance(instance);
    let mut trace = SsTrace::default();
    let one = Rational::from_integer(1.into());
    while let Some(s_min) = pool.min_size().cloned() {
        let chosen = max_subset(&pool, &one);
        debug_assert!(!chosen.items.is_empty());
        pool.remove(&chosen.items);
        trace.records.push(SsRecord {
            items: chosen.items,
            load: chosen.total,
            s_min,
        });
    }
    (trace.to_packing(Arc::clone(instance)), trace)
}

fn first_fit_order(instance: &Arc<Instance>, order: impl IntoIterator<Item = ItemId>) -> Packing {
    let one = Rational::from_integer(1.into());
    let mut bins: Vec<Vec<ItemId>> = Vec::new();
    let mut loads: Vec<Rational> = Vec::new();
    for id in order {
        let size = instance.size(id);
        match loads.iter().position(|l| l + size <= one) {
            Some(b) => {
                loads[b] += size;
                bins[b].push(id);
            }
            None => {
                loads.push(size.clone());
                bins.push(vec![id]);
            }
        }
    }
    debug_assert!(loads.iter().all(|l| !l.is_zero()));
    Packing::from_bins_unchecked(Arc::clone(instance), bins)
}

/// First fit in input order.
pub fn first_fit(instance: &Arc<Instance>) -> Packing {
    first_fit_order(instance, instance.ids())
}

/// First fit after sorting by non-increasing size, ties by id.
pub fn first_fit_decreasing(instance: &Arc<Instance>) -> Packing {
    let mut order: Vec<ItemId> = instance.ids().collect();
    order.sort_by(|a, b| instance.size(*b).cmp(instance.size(*a)).then(a.cmp(b)));
    first_fit_order(instance, order)
}
