//! Certificate audits: the subset-sum weighting argument replayed on
//! concrete runs, and the NE structure used by the price-of-anarchy bound.

mod groups;
mod report;
mod weights;

pub use groups::{
    classify_groups, group_of, group_thresholds, is_t_item_size, low_load_check, poa_weight_audit,
    regular_bins_check, t_item_range, tuple_count_check, ClaimReport, ClaimStatus, Group,
    GroupClassification, GroupCounts, PoaWeightReport,
};
pub use report::{poa_audit_checks, render_checks, ss_audit_checks};
pub use weights::{
    audit_vs_opt, ss_weights, underpaid_total, BinCharge, OptAudit, OptBinAudit, WeightAssignment,
    WeightRule,
};
