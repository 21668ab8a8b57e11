use std::sync::Arc;

use proptest::prelude::*;
use selfish_bins::audit::{
    audit_vs_opt, low_load_check, poa_weight_audit, regular_bins_check, ss_weights, underpaid_total,
};
use selfish_bins::bounds::poa_upper;
use selfish_bins::game::{best_response_dynamics, run_dynamics, ss_pack, Policy};
use selfish_bins::rational::{frac, int};
use selfish_bins::solver::opt_pack;
use selfish_bins::{Instance, Packing};

/// Sizes `p/q` at most `1/t`.
fn sizes(t: i64, max_len: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec(
        (2i64..=40).prop_flat_map(move |q| (1..=(q / t).max(1), Just(q))),
        1..=max_len,
    )
    .prop_map(move |v| {
        v.into_iter()
            .map(|(p, q)| if p * t > q { (1, t) } else { (p, q) })
            .collect()
    })
}

fn instance(t: i64, sizes: &[(i64, i64)]) -> Arc<Instance> {
    Arc::new(Instance::new(frac(1, t), sizes.iter().map(|&(p, q)| frac(p, q)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn ss_weights_cover_the_ss_cost((t, sizes) in (1i64..=3).prop_flat_map(|t| (Just(t), sizes(t, 14)))) {
        let inst = instance(t, &sizes);
        let (ss, trace) = ss_pack(&inst);
        let opt = opt_pack(&inst, 10_000_000).unwrap();
        let rules = if inst.size_class() >= 2 { vec![None, Some(inst.size_class())] } else { vec![None] };
        for rule in rules {
            let w = ss_weights(&inst, &trace, rule).unwrap();
            prop_assert!(underpaid_total(&w) <= int(1));
            let audit = audit_vs_opt(&w, &opt).unwrap();
            prop_assert_eq!(&audit.total_weight + &audit.underpaid, int(ss.bin_count() as i64));
            let violations: Vec<String> = audit.violations().collect();
            prop_assert!(violations.is_empty(), "{:?}", violations);
        }
    }

    #[test]
    fn equilibria_have_few_irregular_bins(t in 2i64..=4, raw in sizes(4, 16), seed in any::<u64>()) {
        let inst = instance(t, &raw);
        let ne = best_response_dynamics(&Packing::singletons(inst.clone()), Policy::Random, seed).packing;
        let t = t as u32;
        prop_assert!(low_load_check(&ne, t).passed());
        prop_assert!(regular_bins_check(&ne, t).passed());
        let opt = opt_pack(&inst, 10_000_000).unwrap();
        let report = poa_weight_audit(&ne, &opt, t).unwrap();
        prop_assert!(report.passed(), "{:?}", report.violations);
        let bound = poa_upper(t).unwrap() * int(opt.bin_count() as i64) + int(5);
        prop_assert!(int(ne.bin_count() as i64) <= bound);
    }

    #[test]
    fn dynamics_potential_increases(raw in sizes(1, 20), seed in any::<u64>()) {
        let inst = instance(1, &raw);
        let mut increasing = true;
        run_dynamics(&Packing::singletons(inst), Policy::MaxGain, seed, |before, _, after| {
            increasing &= after.sorted_loads() > before.sorted_loads();
        });
        prop_assert!(increasing);
    }
}
