//! Uniform pass/fail documents for the audits.

use num::One;

use super::groups::{
    low_load_check, poa_weight_audit, regular_bins_check, tuple_count_check, ClaimReport,
};
use super::weights::OptAudit;
use crate::generators::Check;
use crate::model::Packing;
use crate::rational::{int, to_pq};

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

/// Checks of an SS weighting audit against an optimal packing.
pub fn ss_audit_checks(audit: &OptAudit) -> Vec<Check> {
    let per_item: Vec<String> = audit
        .bins
        .iter()
        .flat_map(|b| {
            b.violations
                .iter()
                .filter(|v| !v.starts_with("weight"))
                .map(move |v| format!("opt bin {}: {v}", b.bin))
        })
        .collect();
    let over_cap: Vec<String> = audit
        .bins
        .iter()
        .filter(|b| b.weight > b.cap)
        .map(|b| {
            format!(
                "opt bin {}: {} > {}",
                b.bin,
                to_pq(&b.weight),
                to_pq(&b.cap)
            )
        })
        .collect();
    let ss = int(audit.ss_bins as i64);
    vec![
        check(
            "underpaid-total",
            audit.underpaid <= num::BigRational::one(),
            format!("underpaid {}", to_pq(&audit.underpaid)),
        ),
        check(
            "weight-identity",
            &audit.total_weight + &audit.underpaid == ss,
            format!(
                "weights {} + underpaid {} vs {} bins",
                to_pq(&audit.total_weight),
                to_pq(&audit.underpaid),
                audit.ss_bins
            ),
        ),
        check(
            "share-constraints",
            per_item.is_empty(),
            summarize(&per_item, "all items within both share limits"),
        ),
        check(
            "opt-bin-caps",
            over_cap.is_empty(),
            summarize(
                &over_cap,
                &format!("{} optimal bins within caps", audit.bins.len()),
            ),
        ),
        check(
            "ratio-bound",
            ss <= audit.cap_sum_plus_one && ss <= audit.ratio_bound,
            format!("{} SS bins, {} optimal bins", audit.ss_bins, audit.opt_bins),
        ),
    ]
}

fn summarize(items: &[String], ok: &str) -> String {
    match items {
        [] => ok.to_string(),
        [first, ..] => format!("{} violations, first: {first}", items.len()),
    }
}

fn claim(name: &str, r: ClaimReport) -> Check {
    check(name, r.passed(), format!("{:?}: {}", r.status, r.detail))
}

/// Claims on NE structure plus the weighting replay for one NE/OPT pair.
pub fn poa_audit_checks(ne: &Packing, opt: &Packing, t: u32) -> Vec<Check> {
    let weights = match poa_weight_audit(ne, opt, t) {
        Ok(r) => check(
            "poa-weights",
            r.passed(),
            match r.violations.first() {
                Some(v) => format!("{} violations, first: {v}", r.violations.len()),
                None => format!(
                    "groups A/B/C/D = {}/{}/{}/{}; {} NE bins <= {}",
                    r.counts.a,
                    r.counts.b,
                    r.counts.c,
                    r.counts.d,
                    r.ne_bins,
                    to_pq(&r.bound)
                ),
            },
        ),
        Err(e) => check("poa-weights", false, e.to_string()),
    };
    vec![
        claim("low-load-bins", low_load_check(ne, t)),
        claim("regular-bins", regular_bins_check(ne, t)),
        claim("tuple-count", tuple_count_check(ne, opt, t)),
        weights,
    ]
}

/// JSON document: format version, kind, overall verdict and the checks.
pub fn render_checks(kind: &str, checks: &[Check]) -> String {
    let value = serde_json::json!({
        "format": crate::FORMAT_VERSION,
        "kind": kind,
        "passed": checks.iter().all(|c| c.passed),
        "checks": checks,
    });
    let mut out = serde_json::to_string_pretty(&value).expect("report serializes");
    out.push('\n');
    out
}
