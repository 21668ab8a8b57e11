//! Exact subset-sum (the SS engine) and exact minimum-bin packing.

pub(crate) mod amount;
mod opt;
mod pool;
mod subset;

pub use opt::{lower_bound, opt_pack};
pub use pool::SizeClassPool;
pub use subset::{max_subset, SubsetResult};

use crate::model::Instance;
use crate::rational::ceil_to_usize;

/// `⌈Σ s_i⌉`, computed exactly.
pub fn size_lower_bound(instance: &Instance) -> usize {
    ceil_to_usize(&instance.total_size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn inst(sizes: &[(i64, i64)]) -> Instance {
        Instance::unrestricted(sizes.iter().map(|&(p, q)| frac(p, q)).collect()).unwrap()
    }

    #[test]
    fn size_bound_examples() {
        assert_eq!(size_lower_bound(&inst(&[(1, 2); 3])), 2);
        assert_eq!(size_lower_bound(&inst(&[])), 0);
        assert_eq!(size_lower_bound(&inst(&[(1, 3); 7])), 3);
    }
}
