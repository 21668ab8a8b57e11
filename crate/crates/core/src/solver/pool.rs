use crate::model::{Instance, ItemId};
use crate::rational::Rational;

/// Items grouped by distinct size. Sizes are strictly increasing; each class
/// keeps its item ids in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SizeClassPool {
    sizes: Vec<Rational>,
    ids: Vec<Vec<ItemId>>,
}

impl SizeClassPool {
    pub fn from_instance(instance: &Instance) -> SizeClassPool {
        SizeClassPool::from_items(instance, instance.ids())
    }

    pub fn from_items(
        instance: &Instance,
        items: impl IntoIterator<Item = ItemId>,
    ) -> SizeClassPool {
        let mut pairs: Vec<(Rational, ItemId)> = items
            .into_iter()
            .map(|id| (instance.size(id).clone(), id))
            .collect();
        pairs.sort();
        let mut pool = SizeClassPool::default();
        for (size, id) in pairs {
            if pool.sizes.last() != Some(&size) {
                pool.sizes.push(size);
                pool.ids.push(Vec::new());
            }
            pool.ids.last_mut().expect("class exists").push(id);
        }
        pool
    }

    pub fn sizes(&self) -> &[Rational] {
        &self.sizes
    }

    pub fn class_ids(&self, class: usize) -> &[ItemId] {
        &self.ids[class]
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.ids.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.ids.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn min_size(&self) -> Option<&Rational> {
        self.sizes.first()
    }

    /// Drops the given items; emptied classes disappear.
    pub fn remove(&mut self, items: &[ItemId]) {
        for class in &mut self.ids {
            class.retain(|id| !items.contains(id));
        }
        let mut k = 0;
        while k < self.sizes.len() {
            if self.ids[k].is_empty() {
                self.sizes.remove(k);
                self.ids.remove(k);
            } else {
                k += 1;
            }
        }
    }
}
