use num::{One, Zero};

use crate::error::{domain, Result};
use crate::rational::{frac, int, pow2, to_decimal, Rational};

/// A closed interval certified to contain a series limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundInterval {
    pub lower: Rational,
    pub upper: Rational,
}

impl BoundInterval {
    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, value: &Rational) -> bool {
        &self.lower <= value && value <= &self.upper
    }

    /// True iff some point of the interval is within `tol` of `value`.
    pub fn near(&self, value: &Rational, tol: &Rational) -> bool {
        &(&self.lower - tol) <= value && value <= &(&self.upper + tol)
    }
}

impl std::fmt::Display for BoundInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}, {}]",
            to_decimal(&self.lower, 9),
            to_decimal(&self.upper, 9)
        )
    }
}

fn pow2r(k: u32) -> Rational {
    Rational::from_integer(pow2(k))
}

/// `Σ_{i<r} 1/(2^i − 1) + 1/2^{r−1}`, the optimum of the plain program with `r` items.
pub fn lambda_r(r: u32) -> Result<Rational> {
    if r == 0 {
        return Err(domain("r", &int(0)));
    }
    let mut value = Rational::one() / pow2r(r - 1);
    for i in 1..r {
        value += Rational::one() / (pow2r(i) - int(1));
    }
    Ok(value)
}

/// `Σ_{i≥1} 1/(2^i − 1)` enclosed by a partial sum and the tail bound
/// `Σ_{i>K} 1/(2^i − 1) <= 2^{1−K}`, with the smallest `K` meeting `tolerance`.
pub fn lambda_limit(tolerance: &Rational) -> Result<BoundInterval> {
    if *tolerance <= Rational::zero() {
        return Err(domain("tolerance", tolerance));
    }
    let mut k = 1;
    while Rational::new(2.into(), pow2(k)) > *tolerance {
        k += 1;
    }
    let mut lower = Rational::zero();
    for i in 1..=k {
        lower += Rational::one() / (pow2r(i) - int(1));
    }
    let upper = &lower + Rational::new(2.into(), pow2(k));
    Ok(BoundInterval { lower, upper })
}

/// `1 + Σ_{i≥1} 1/((t+1) 2^i − 1)` with tail `Σ_{i>k} <= 2/((t+1) 2^k)`.
/// At `t = 1` this is the same interval as [`lambda_limit`].
pub fn lambda_t(t: u32, tolerance: &Rational) -> Result<BoundInterval> {
    if t == 0 {
        return Err(domain("t", &int(0)));
    }
    if *tolerance <= Rational::zero() {
        return Err(domain("tolerance", tolerance));
    }
    let t1 = int(t as i64 + 1);
    let tail = |k: u32| int(2) / (&t1 * pow2r(k));
    let mut k = 0;
    while tail(k) > *tolerance {
        k += 1;
    }
    let mut lower = Rational::one();
    for i in 1..=k {
        lower += Rational::one() / (&t1 * pow2r(i) - int(1));
    }
    let upper = &lower + tail(k);
    Ok(BoundInterval { lower, upper })
}

/// `λ^t(x) = x(t−1)(t+1)/t + Σ_{i≥1} R/(2^i − R)` with `R = 1 − (t−1)x`,
/// summed to `terms` and closed with the tail bounds
/// `R·2^{−terms} <= Σ_{i>terms} <= R·2^{1−terms}`.
pub fn lambda_t_x(t: u32, x: &Rational, terms: u32) -> Result<BoundInterval> {
    check_x(t, x)?;
    let tr = int(t as i64);
    let r = Rational::one() - (&tr - int(1)) * x;
    let mut partial = x * (&tr - int(1)) * (&tr + int(1)) / &tr;
    for i in 1..=terms {
        partial += &r / (pow2r(i) - &r);
    }
    let tail = &r / pow2r(terms);
    let lower = &partial + &tail;
    let upper = partial + tail * int(2);
    Ok(BoundInterval { lower, upper })
}

pub(crate) fn check_x(t: u32, x: &Rational) -> Result<()> {
    if t < 2 {
        return Err(domain("t", &int(t as i64)));
    }
    if *x < frac(1, t as i64 + 1) || *x > frac(1, t as i64) {
        return Err(domain("x", x));
    }
    Ok(())
}

/// Evaluates `λ^t(x)` on `grid + 1` equally spaced points of
/// `[1/(t+1), 1/t]` and reports whether the left endpoint beats every other
/// point with certified intervals (its lower end above their upper ends).
pub fn lambda_t_x_argmax_check(t: u32, grid: u32, terms: u32) -> Result<bool> {
    let left = frac(1, t as i64 + 1);
    let step = (frac(1, t as i64) - &left) / int(grid as i64);
    let at_left = lambda_t_x(t, &left, terms)?;
    for k in 1..=grid {
        let x = &left + &step * int(k as i64);
        if lambda_t_x(t, &x, terms)?.upper >= at_left.lower {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::from_decimal_str;

    fn tol6() -> Rational {
        frac(1, 1_000_000)
    }

    #[test]
    fn lambda_r_values() {
        assert_eq!(lambda_r(1).unwrap(), int(1));
        assert_eq!(lambda_r(2).unwrap(), frac(3, 2));
        assert_eq!(lambda_r(3).unwrap(), frac(19, 12));
        for r in 1..20 {
            assert!(lambda_r(r + 1).unwrap() > lambda_r(r).unwrap());
        }
    }

    #[test]
    fn limit_interval() {
        let iv = lambda_limit(&tol6()).unwrap();
        assert!(iv.width() <= tol6());
        assert!(iv.near(&from_decimal_str("1.606695"), &tol6()));
        // The partial sum overtakes λ_r only once K is about 2r.
        let fine = lambda_limit(&Rational::new(1.into(), pow2(50))).unwrap();
        for r in 1..=20 {
            assert!(fine.lower >= lambda_r(r).unwrap());
            assert!(iv.upper >= lambda_r(r).unwrap());
        }
        let coarse = lambda_limit(&frac(1, 2)).unwrap();
        assert!(coarse.width() <= frac(1, 2));
        assert!(coarse.contains(&(int(1) + frac(1, 3) + frac(1, 7))));
    }

    #[test]
    fn parametric_limits() {
        assert!(lambda_t(2, &tol6())
            .unwrap()
            .near(&from_decimal_str("1.376643"), &tol6()));
        assert!(lambda_t(9, &tol6())
            .unwrap()
            .near(&from_decimal_str("1.103483"), &tol6()));
        assert_eq!(
            lambda_t(1, &tol6()).unwrap(),
            lambda_limit(&tol6()).unwrap()
        );
        for t in 1..10 {
            assert!(lambda_t(t + 1, &tol6()).unwrap().upper < lambda_t(t, &tol6()).unwrap().lower);
        }
    }

    #[test]
    fn x_interval_at_left_endpoint_matches_limit() {
        for t in 2..=6 {
            let a = lambda_t_x(t, &frac(1, t as i64 + 1), 40).unwrap();
            let b = lambda_t(t, &frac(1, 1 << 30)).unwrap();
            assert!(a.lower <= b.upper && b.lower <= a.upper);
        }
    }

    #[test]
    fn argmax_at_left_endpoint() {
        assert!(lambda_t_x_argmax_check(2, 10, 60).unwrap());
        assert!(lambda_t_x_argmax_check(5, 10, 60).unwrap());
        let l = lambda_t_x(3, &frac(1, 4), 60).unwrap();
        let r = lambda_t_x(3, &frac(1, 3), 60).unwrap();
        assert!(l.lower > r.upper);
    }

    #[test]
    fn rejects_bad_domain() {
        assert!(lambda_t_x(2, &frac(1, 5), 10).is_err());
        assert!(lambda_limit(&int(0)).is_err());
    }
}
