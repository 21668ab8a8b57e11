use num::{BigInt, One, Zero};

use crate::error::{domain, Result};
use crate::rational::{frac, int, Rational};

/// `(2t³ + t² + 2) / ((2t+1)(t² − t + 1))`.
pub fn poa_upper(t: u32) -> Result<Rational> {
    if t < 2 {
        return Err(domain("t", &int(t as i64)));
    }
    let t = t as i64;
    Ok(frac(
        2 * t * t * t + t * t + 2,
        (2 * t + 1) * (t * t - t + 1),
    ))
}

/// `(t² + Σ_{j=1}^{terms} (t+1)^{−j} 2^{−j(j−1)/2}) / (t(t−1) + 1)`.
///
/// Also evaluates at `t = 1`, outside the range where it is a proven bound.
pub fn poa_lower(t: u32, terms: u32) -> Result<Rational> {
    if t == 0 {
        return Err(domain("t", &int(0)));
    }
    if terms == 0 {
        return Err(domain("terms", &int(0)));
    }
    let t = t as i64;
    let mut sum = Rational::zero();
    for j in 1..=terms {
        let denom =
            num::pow(BigInt::from(t + 1), j as usize) << ((j as usize) * (j as usize - 1) / 2);
        sum += Rational::new(BigInt::one(), denom);
    }
    Ok((int(t * t) + sum) / int(t * (t - 1) + 1))
}

/// Worst-case ratio of First Fit: `17/10` for `t = 1`, `(t+1)/t` above.
pub fn ff_ratio(t: u32) -> Result<Rational> {
    match t {
        0 => Err(domain("t", &int(0))),
        1 => Ok(frac(17, 10)),
        t => Ok(frac(t as i64 + 1, t as i64)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_decimal_str, to_decimal};
    use num::Signed;

    #[test]
    fn upper_values() {
        assert_eq!(poa_upper(2).unwrap(), frac(22, 15));
        assert_eq!(poa_upper(3).unwrap(), frac(65, 49));
        assert_eq!(poa_upper(10).unwrap(), frac(2102, 1911));
        assert!(poa_upper(1).is_err());
    }

    #[test]
    fn lower_values() {
        let close = |t, s: &str| {
            let d = poa_lower(t, 50).unwrap() - from_decimal_str(s);
            assert!(
                d.abs() <= frac(1, 1_000_000),
                "t={t}: {}",
                to_decimal(&d, 9)
            );
        };
        close(2, "1.464571");
        close(5, "1.199102");
        close(1, "1.641632");
        assert_eq!(
            poa_lower(2, 2).unwrap(),
            (int(4) + frac(1, 3) + frac(1, 18)) / int(3)
        );
    }

    #[test]
    fn sandwich_and_monotone() {
        for t in 2..=10 {
            let up = poa_upper(t).unwrap();
            for k in 1..=30 {
                let lo = poa_lower(t, k).unwrap();
                assert!(lo < up);
                assert!(poa_lower(t, k + 1).unwrap() > lo);
            }
        }
    }

    #[test]
    fn first_fit_values() {
        assert_eq!(ff_ratio(1).unwrap(), frac(17, 10));
        assert_eq!(ff_ratio(2).unwrap(), frac(3, 2));
        assert_eq!(ff_ratio(5).unwrap(), frac(6, 5));
    }
}
