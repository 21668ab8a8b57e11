use num::{One, Zero};

use super::series::check_x;
use crate::error::{domain, Error, Result};
use crate::rational::{frac, int, pow2, Rational};

/// Decision variables of the weight-maximization program: `s_1..s_r`, plus
/// the parameter `t` for the variant where every size but the last is at
/// most `1/t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeVector {
    sizes: Vec<Rational>,
    t: Option<u32>,
}

impl SizeVector {
    pub fn new(sizes: Vec<Rational>, t: Option<u32>) -> Result<SizeVector> {
        if sizes.iter().any(|s| *s < Rational::zero()) {
            return Err(Error::Domain("sizes must be non-negative".into()));
        }
        let total = sizes.iter().fold(Rational::zero(), |a, s| a + s);
        if total > Rational::one() {
            return Err(domain("sum of sizes", &total));
        }
        if let Some(t) = t {
            if t == 0 {
                return Err(domain("t", &int(0)));
            }
            let cap = frac(1, t as i64);
            let r = sizes.len();
            if let Some(s) = sizes.iter().take(r.saturating_sub(1)).find(|s| **s > cap) {
                return Err(domain("size above 1/t", s));
            }
        }
        Ok(SizeVector { sizes, t })
    }

    pub fn sizes(&self) -> &[Rational] {
        &self.sizes
    }

    pub fn t(&self) -> Option<u32> {
        self.t
    }
}

/// `Σ_i s_i / max{Σ_{j≤i} s_j, 1 − min_{j≤i} s_j [, t/(t+1)]}`, exactly.
pub fn mp_objective(v: &SizeVector) -> Rational {
    let floor = v.t.map(|t| frac(t as i64, t as i64 + 1));
    let mut prefix = Rational::zero();
    let mut min: Option<Rational> = None;
    let mut value = Rational::zero();
    for s in &v.sizes {
        prefix += s;
        min = Some(match min {
            Some(m) if m <= *s => m,
            _ => s.clone(),
        });
        let mut denom = prefix
            .clone()
            .max(Rational::one() - min.as_ref().expect("set"));
        if let Some(f) = &floor {
            denom = denom.max(f.clone());
        }
        if !s.is_zero() {
            value += s / denom;
        }
    }
    value
}

/// The candidate optimum of the parametric program with free parameter `x`:
/// `x` for the first `t−1` sizes, then `R/2, R/4, ..`, and the last size
/// repeating the previous one, where `R = 1 − (t−1)x`.
pub fn optimal_vector(t: u32, r: u32, x: &Rational) -> Result<SizeVector> {
    check_x(t, x)?;
    if r < t {
        return Err(domain("r below t", &int(r as i64)));
    }
    let rest = Rational::one() - int(t as i64 - 1) * x;
    let mut sizes = vec![x.clone(); t as usize - 1];
    for i in t..r {
        sizes.push(&rest / Rational::from_integer(pow2(i - t + 1)));
    }
    sizes.push(&rest / Rational::from_integer(pow2(r - t)));
    SizeVector::new(sizes, Some(t))
}

/// `x(t−1)(t+1)/t + Σ_{i=1}^{r−t} R/(2^i − R) + R/2^{r−t}` with
/// `R = 1 − (t−1)x`: the objective value of [`optimal_vector`].
pub fn lambda_t_r_x(t: u32, r: u32, x: &Rational) -> Result<Rational> {
    check_x(t, x)?;
    if r < t {
        return Err(domain("r below t", &int(r as i64)));
    }
    let tr = int(t as i64);
    let rest = Rational::one() - (&tr - int(1)) * x;
    let mut value = x * (&tr - int(1)) * (&tr + int(1)) / &tr;
    for i in 1..=(r - t) {
        value += &rest / (Rational::from_integer(pow2(i)) - &rest);
    }
    value += &rest / Rational::from_integer(pow2(r - t));
    Ok(value)
}

fn objective_f64(s: &[f64], floor: f64) -> f64 {
    let mut prefix = 0.0;
    let mut min = f64::INFINITY;
    let mut value = 0.0;
    for &x in s {
        prefix += x;
        min = min.min(x);
        if x > 0.0 {
            value += x / prefix.max(1.0 - min).max(floor);
        }
    }
    value
}

/// Best objective over the grid `{k/grid}` of the feasible region, refined by
/// coordinate ascent that shifts mass between pairs of coordinates (the slack
/// included) in steps halving from `1/grid` to `1/(grid·2^30)`.
///
/// Search runs in floating point; the returned value is the exact objective
/// of the returned vector. The grid has `C(grid + r, r)` points, so keep
/// `r <= 4`.
pub fn mp_bruteforce(r: u32, t: Option<u32>, grid: u32) -> Result<(Rational, SizeVector)> {
    if r == 0 || r > 4 {
        return Err(domain("r", &int(r as i64)));
    }
    if grid == 0 {
        return Err(domain("grid", &int(0)));
    }
    let r = r as usize;
    let floor = t.map_or(0.0, |t| t as f64 / (t as f64 + 1.0));
    // Largest grid count allowed for the first r−1 coordinates.
    let capped = t.map_or(grid, |t| grid / t);

    let g = grid as f64;
    let mut best = (f64::NEG_INFINITY, vec![0u64; r]);
    let mut current = vec![0u64; r];
    grid_search(
        0,
        grid as u64,
        capped as u64,
        g,
        floor,
        &mut current,
        &mut best,
    );

    // Refinement on integer numerators over D = grid·2^30.
    const SCALE: u64 = 1 << 30;
    let d = grid as u64 * SCALE;
    let df = d as f64;
    let limit = t.map(|t| d / t as u64);
    let mut a: Vec<u64> = best.1.iter().map(|&k| k * SCALE).collect();
    let used: u64 = a.iter().sum();
    a.push(d - used); // slack
    let eval = |a: &[u64]| {
        let s: Vec<f64> = a[..r].iter().map(|&v| v as f64 / df).collect();
        objective_f64(&s, floor)
    };
    let mut value = eval(&a);
    let mut step = SCALE;
    let mut passes = 0;
    while step > 0 && passes < 20_000 {
        let mut improved = false;
        for i in 0..=r {
            for j in 0..=r {
                if i == j || a[j] < step {
                    continue;
                }
                if i + 1 < r {
                    if let Some(l) = limit {
                        if a[i] + step > l {
                            continue;
                        }
                    }
                }
                a[i] += step;
                a[j] -= step;
                let v = eval(&a);
                if v > value {
                    value = v;
                    improved = true;
                } else {
                    a[i] -= step;
                    a[j] += step;
                }
            }
        }
        passes += 1;
        if !improved {
            step /= 2;
        }
    }
    let denom = Rational::from_integer(d.into());
    let sizes = a[..r]
        .iter()
        .map(|&v| Rational::from_integer(v.into()) / &denom)
        .collect();
    let vector = SizeVector::new(sizes, t)?;
    Ok((mp_objective(&vector), vector))
}

fn grid_search(
    depth: usize,
    left: u64,
    capped: u64,
    g: f64,
    floor: f64,
    current: &mut Vec<u64>,
    best: &mut (f64, Vec<u64>),
) {
    let r = current.len();
    if depth == r {
        let s: Vec<f64> = current.iter().map(|&k| k as f64 / g).collect();
        let v = objective_f64(&s, floor);
        if v > best.0 {
            *best = (v, current.clone());
        }
        return;
    }
    let top = if depth + 1 < r {
        left.min(capped)
    } else {
        left
    };
    for k in 0..=top {
        current[depth] = k;
        grid_search(depth + 1, left - k, capped, g, floor, current, best);
    }
    current[depth] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::lambda_r;
    use crate::rational::to_f64;
    use proptest::prelude::*;

    fn v(sizes: &[(i64, i64)], t: Option<u32>) -> SizeVector {
        SizeVector::new(sizes.iter().map(|&(p, q)| frac(p, q)).collect(), t).unwrap()
    }

    #[test]
    fn objective_examples() {
        assert_eq!(
            mp_objective(&v(&[(1, 2), (1, 4), (1, 4)], None)),
            frac(19, 12)
        );
        assert_eq!(mp_objective(&v(&[(1, 2), (1, 2)], None)), frac(3, 2));
        assert_eq!(
            mp_objective(&v(&[(1, 3), (1, 3), (1, 3)], Some(2))),
            frac(4, 3)
        );
    }

    #[test]
    fn optimal_vector_for_five_items() {
        let s = v(&[(1, 2), (1, 4), (1, 8), (1, 16), (1, 16)], None);
        assert_eq!(mp_objective(&s), lambda_r(5).unwrap());
    }

    #[test]
    fn parametric_closed_form_matches_vector() {
        assert_eq!(lambda_t_r_x(2, 3, &frac(1, 3)).unwrap(), frac(4, 3));
        let deg = lambda_t_r_x(3, 3, &frac(1, 4)).unwrap();
        assert_eq!(deg, mp_objective(&v(&[(1, 4), (1, 4), (1, 2)], Some(3))));
        for t in 2..=6u32 {
            for r in t..=t + 6 {
                for k in 0..=4i64 {
                    let lo = frac(1, t as i64 + 1);
                    let x = &lo + (frac(1, t as i64) - &lo) * frac(k, 4);
                    let vec = optimal_vector(t, r, &x).unwrap();
                    assert_eq!(
                        lambda_t_r_x(t, r, &x).unwrap(),
                        mp_objective(&vec),
                        "t={t} r={r} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_infeasible_vectors() {
        assert!(SizeVector::new(vec![frac(2, 3), frac(1, 2)], None).is_err());
        assert!(SizeVector::new(vec![frac(2, 3), frac(1, 3)], Some(2)).is_err());
        assert!(SizeVector::new(vec![frac(1, 3), frac(2, 3)], Some(2)).is_ok());
    }

    #[test]
    fn brute_force_small() {
        let (value, _) = mp_bruteforce(2, None, 200).unwrap();
        assert!((to_f64(&value) - 1.5).abs() < 1e-3);
        let (value, _) = mp_bruteforce(3, None, 60).unwrap();
        assert!(value <= frac(19, 12));
        assert!((to_f64(&value) - 19.0 / 12.0).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn objective_never_exceeds_lambda_r(raw in prop::collection::vec(0u32..1000, 1..=4), slack in 0u32..1000) {
            let total: u32 = raw.iter().sum::<u32>() + slack;
            prop_assume!(total > 0);
            let sizes: Vec<Rational> = raw.iter().map(|&k| frac(k as i64, total as i64)).collect();
            let r = sizes.len() as u32;
            let value = mp_objective(&SizeVector::new(sizes, None).unwrap());
            prop_assert!(value <= lambda_r(r).unwrap());
        }
    }
}
