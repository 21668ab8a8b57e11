use std::sync::Arc;

use proptest::prelude::*;
use selfish_bins::game::{
    best_response_dynamics, is_nash, is_strong_nash_direct, is_strong_nash_via_ss, ss_pack, Policy,
};
use selfish_bins::rational::frac;
use selfish_bins::{Instance, Packing};

fn sizes(max_len: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((2i64..=24).prop_flat_map(|q| (1..q, Just(q))), 1..=max_len)
}

fn instance(sizes: &[(i64, i64)]) -> Arc<Instance> {
    Arc::new(Instance::unrestricted(sizes.iter().map(|&(p, q)| frac(p, q)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn ss_outputs_are_strong_equilibria(sizes in sizes(9)) {
        let inst = instance(&sizes);
        let (p, trace) = ss_pack(&inst);
        prop_assert!(is_nash(&p));
        prop_assert!(is_strong_nash_via_ss(&p));
        prop_assert!(is_strong_nash_direct(&p, inst.len(), 50_000_000).is_stable());
        for w in trace.records.windows(2) {
            prop_assert!(w[0].load >= w[1].load);
        }
    }

    #[test]
    fn both_strong_checks_agree(sizes in sizes(8), seed in any::<u64>()) {
        let inst = instance(&sizes);
        for start in [Packing::singletons(inst.clone()), selfish_bins::game::first_fit(&inst)] {
            let ne = best_response_dynamics(&start, Policy::Random, seed).packing;
            for p in [start, ne] {
                let direct = is_strong_nash_direct(&p, inst.len(), 50_000_000);
                prop_assert_eq!(direct.is_stable(), is_strong_nash_via_ss(&p), "{:?}", p.bins());
            }
        }
    }
}
