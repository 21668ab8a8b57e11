//! Adversarial instance families with their designed packings, plus seeded
//! random instances and the empirical ratio harness.

mod bundle;
mod graham;
mod poa;
mod random;

pub use bundle::{
    parse_bundle, render_bundle, BundleManifest, FamilyEntry, INSTANCE_FILE, MANIFEST_FILE,
    NE_FILE, OPT_FILE,
};
pub use graham::{
    chain_packing, gen_graham, gen_parametric_ss, graham_modulus, parametric_modulus,
};
pub use poa::{
    gen_poa_lower, min_valid_n, verify_poa_construction, Check, ConstructionBundle,
    ConstructionReport, Mode, NeBinKind, PoaParams, Recurrence,
};
pub use random::random_instance;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::ss_pack;
use crate::model::{validate_packing, Instance, Packing};
use crate::rational::{int, Rational};
use crate::solver::opt_pack;

/// Bin counts of the subset-sum heuristic against an optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioMeasurement {
    pub ss_bins: usize,
    pub opt_bins: usize,
    pub ratio: Rational,
    /// False when `opt_bins` comes from a hint rather than a proof.
    pub opt_certified: bool,
}

/// `|SS| / OPT`, where OPT is the hint's bin count if a hint is given and the
/// exact optimum otherwise.
pub fn measure_ratio(
    instance: &Arc<Instance>,
    hint: Option<&Packing>,
    budget: u64,
) -> Result<RatioMeasurement> {
    let (ss, _) = ss_pack(instance);
    let (opt_bins, certified) = match hint {
        Some(h) => {
            if h.instance().as_ref() != instance.as_ref() {
                return Err(Error::Mismatch("hint packs a different instance".into()));
            }
            if let Some(v) = validate_packing(h).violations.first() {
                return Err(Error::InvalidPacking(v.to_string()));
            }
            (h.bin_count(), false)
        }
        None => (opt_pack(instance, budget)?.bin_count(), true),
    };
    let ratio = if opt_bins == 0 {
        Rational::from_integer(1.into())
    } else {
        int(ss.bin_count() as i64) / int(opt_bins as i64)
    };
    Ok(RatioMeasurement {
        ss_bins: ss.bin_count(),
        opt_bins,
        ratio,
        opt_certified: certified,
    })
}
