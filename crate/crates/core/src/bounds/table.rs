use super::poa::{ff_ratio, poa_lower, poa_upper};
use super::series::lambda_t;
use crate::rational::{frac, from_decimal_str, to_decimal, Rational};

/// Published worst-case ratios that are not derived here, per `t = 1..10`:
/// first fit decreasing and the Caprara–Pferschy lower and upper bounds.
const REFERENCE: [(&str, &str, &str); 10] = [
    ("1.222222", "1.606695", "1.621015"),
    ("1.183333", "1.364307", "1.398793"),
    ("1.166667", "1.263293", "1.287682"),
    ("1.150000", "1.206935", "1.223143"),
    ("1.138095", "1.170745", "1.182321"),
    ("1.119048", "1.145460", "1.154150"),
    ("1.109127", "1.126763", "1.133531"),
    ("1.097222", "1.112360", "1.117783"),
    ("1.089899", "1.100918", "1.105360"),
    ("1.081818", "1.091603", "1.095310"),
];

/// Upper end of the price-of-anarchy interval for unrestricted sizes, a
/// published value (the closed form here only covers `t >= 2`).
const POA_UPPER_T1: &str = "1.642857";

pub const TABLE_HEADER: &str = "t,ffd_ref,cp_lb_ref,r_ss,cp_ub_ref,poa_lb,poa_ub,ff";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub t: u32,
    pub ffd_ref: Rational,
    pub cp_lb_ref: Rational,
    pub r_ss: Rational,
    pub cp_ub_ref: Rational,
    pub poa_lb: Rational,
    pub poa_ub: Rational,
    pub ff: Rational,
}

impl TableRow {
    pub fn to_csv(&self) -> String {
        let cells = [
            &self.ffd_ref,
            &self.cp_lb_ref,
            &self.r_ss,
            &self.cp_ub_ref,
            &self.poa_lb,
            &self.poa_ub,
            &self.ff,
        ];
        let mut line = self.t.to_string();
        for c in cells {
            line.push(',');
            line.push_str(&to_decimal(c, 6));
        }
        line
    }
}

/// Rows `t = 1..10`: computed ratios beside the stored reference columns.
/// `r_ss` is the lower end of an interval of width `10^{-12}`.
pub fn results_table() -> Vec<TableRow> {
    (1..=10u32)
        .map(|t| {
            let (ffd, cp_lb, cp_ub) = REFERENCE[t as usize - 1];
            let r_ss = lambda_t(t, &frac(1, 1_000_000_000_000))
                .expect("t >= 1")
                .lower;
            let poa_ub = if t == 1 {
                from_decimal_str(POA_UPPER_T1)
            } else {
                poa_upper(t).expect("t >= 2")
            };
            TableRow {
                t,
                ffd_ref: from_decimal_str(ffd),
                cp_lb_ref: from_decimal_str(cp_lb),
                r_ss,
                cp_ub_ref: from_decimal_str(cp_ub),
                poa_lb: poa_lower(t, 50).expect("t >= 1"),
                poa_ub,
                ff: ff_ratio(t).expect("t >= 1"),
            }
        })
        .collect()
}

pub fn table_csv() -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for row in results_table() {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Signed;

    #[test]
    fn rows() {
        let csv = table_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TABLE_HEADER);
        assert_eq!(lines.len(), 11);
        // The published columns truncate; these are rounded (1.64163256.., 1.46457183..).
        assert_eq!(
            lines[1],
            "1,1.222222,1.606695,1.606695,1.621015,1.641633,1.642857,1.700000"
        );
        assert_eq!(
            lines[2],
            "2,1.183333,1.364307,1.376643,1.398793,1.464572,1.466667,1.500000"
        );
        assert!(lines[4].starts_with("4,1.150000,1.206935,1.214594,"));
        let six = &results_table()[5];
        let tol = frac(1, 1_000_000);
        assert!((&six.poa_lb - from_decimal_str("1.166239")).abs() <= tol);
        assert!((&six.poa_ub - from_decimal_str("1.166253")).abs() <= tol);
    }
}
