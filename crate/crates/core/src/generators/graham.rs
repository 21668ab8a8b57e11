use std::sync::Arc;

use num::{BigInt, Integer, One, Zero};

use crate::error::{domain, Error, Result};
use crate::model::{Instance, ItemId, Packing};
use crate::rational::{frac, int, pow2, Rational};

fn two_pow_neg(k: u32) -> Rational {
    Rational::new(BigInt::one(), pow2(k))
}

/// Required divisor of `N` for the Graham-style family: the lcm of the
/// per-bin group sizes `2^i − 1`, `1 <= i < r`.
pub fn graham_modulus(r: u32) -> BigInt {
    (1..r).fold(BigInt::one(), |acc, i| acc.lcm(&(pow2(i) - 1)))
}

/// `N` items each of sizes `2^{−i} + ε` for `i < r` and `N` items of size
/// `2^{1−r} − rε`, with `ε = 2^{−2r}`; `alpha = 1`.
pub fn gen_graham(r: u32, n: u32) -> Result<Instance> {
    if r < 2 {
        return Err(domain("r", &int(r as i64)));
    }
    if n == 0 {
        return Err(domain("N", &int(0)));
    }
    let modulus = graham_modulus(r);
    if !(BigInt::from(n) % &modulus).is_zero() {
        return Err(Error::Divisibility(format!(
            "N = {n} is not a multiple of {modulus}"
        )));
    }
    let eps = two_pow_neg(2 * r);
    let mut sizes = Vec::with_capacity((r * n) as usize);
    for i in 1..r {
        sizes.extend(std::iter::repeat_n(two_pow_neg(i) + &eps, n as usize));
    }
    let last = two_pow_neg(r - 1) - int(r as i64) * &eps;
    sizes.extend(std::iter::repeat_n(last, n as usize));
    Instance::unrestricted(sizes)
}

/// Divisor of `N` for the parametric family: lcm of `(t+1) 2^{r−t−1}` and
/// `(t+1) 2^{i−t} − 1` for `t < i < r`.
pub fn parametric_modulus(t: u32, r: u32) -> BigInt {
    let t1 = BigInt::from(t + 1);
    let mut m = &t1 * pow2(r - t - 1);
    for i in (t + 1)..r {
        m = m.lcm(&(&t1 * pow2(i - t) - 1));
    }
    m
}

/// `tN` items of size `1/(t+1) + ε`, `N` items of size
/// `1/((t+1) 2^{i−t}) + ε` for each `t < i < r`, and `N` items of size
/// `1/((t+1) 2^{r−1−t}) − rε`, with `ε = 1/((t+1)^2 2^{2r})`; `alpha = 1/t`.
pub fn gen_parametric_ss(t: u32, r: u32, n: u32) -> Result<Instance> {
    if t < 2 {
        return Err(domain("t", &int(t as i64)));
    }
    if r <= t {
        return Err(domain("r (must exceed t)", &int(r as i64)));
    }
    if n == 0 {
        return Err(domain("N", &int(0)));
    }
    let modulus = parametric_modulus(t, r);
    if !(BigInt::from(n) % &modulus).is_zero() {
        return Err(Error::Divisibility(format!(
            "N = {n} is not a multiple of {modulus}"
        )));
    }
    let t1 = int(t as i64 + 1);
    let eps = Rational::one() / (&t1 * &t1 * Rational::from_integer(pow2(2 * r)));
    let n = n as usize;
    let mut sizes = Vec::with_capacity(r as usize * n);
    sizes.extend(std::iter::repeat_n(Rational::one() / &t1 + &eps, t as usize * n));
    for i in (t + 1)..r {
        let s = Rational::one() / (&t1 * Rational::from_integer(pow2(i - t))) + &eps;
        sizes.extend(std::iter::repeat_n(s, n));
    }
    let last =
        Rational::one() / (&t1 * Rational::from_integer(pow2(r - 1 - t))) - int(r as i64) * &eps;
    sizes.extend(std::iter::repeat_n(last, n));
    Instance::new(frac(1, t as i64), sizes)
        .map_err(|e| Error::InvalidInstance(format!("size cap violated: {e}")))
}

/// `N` bins each holding one item of every class (for the parametric family
/// the `t` large items count as `t` classes). Items are laid out class by
/// class, `N` per class, as both generators produce them.
pub fn chain_packing(instance: &Arc<Instance>, classes: u32, n: u32) -> Result<Packing> {
    let (classes, n) = (classes as usize, n as usize);
    if classes * n != instance.len() {
        return Err(Error::Mismatch(format!(
            "expected {} items, instance has {}",
            classes * n,
            instance.len()
        )));
    }
    let bins = (0..n)
        .map(|b| (0..classes).map(|c| ItemId(c * n + b)).collect())
        .collect();
    Packing::new(Arc::clone(instance), bins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ss_pack;

    #[test]
    fn graham_sizes() {
        let i = gen_graham(3, 3).unwrap();
        let expect: Vec<Rational> = [(33, 64), (17, 64), (13, 64)]
            .iter()
            .flat_map(|&(p, q)| std::iter::repeat_n(frac(p, q), 3))
            .collect();
        assert_eq!(i.sizes().cloned().collect::<Vec<_>>(), expect);

        let i = gen_graham(2, 2).unwrap();
        let expect = vec![frac(9, 16), frac(9, 16), frac(3, 8), frac(3, 8)];
        assert_eq!(i.sizes().cloned().collect::<Vec<_>>(), expect);

        assert!(matches!(gen_graham(3, 4), Err(Error::Divisibility(_))));
        assert_eq!(graham_modulus(4), BigInt::from(21));
    }

    #[test]
    fn graham_chains_fit() {
        for (r, n) in [(2, 1), (3, 3), (4, 21)] {
            let inst = Arc::new(gen_graham(r, n).unwrap());
            let p = chain_packing(&inst, r, n).unwrap();
            let eps = two_pow_neg(2 * r);
            assert!(p.loads().iter().all(|l| *l == Rational::one() - &eps));
        }
    }

    #[test]
    fn parametric_sizes() {
        let i = gen_parametric_ss(2, 3, 3).unwrap();
        let eps = frac(1, 9 * 64);
        assert_eq!(i.len(), 9);
        assert_eq!(*i.size(ItemId(0)), frac(1, 3) + &eps);
        assert_eq!(*i.size(ItemId(8)), frac(1, 3) - int(3) * &eps);
        assert!(i.sizes().all(|s| *s <= frac(1, 2)));
        assert!(matches!(
            gen_parametric_ss(3, 4, 3),
            Err(Error::Divisibility(_))
        ));
        assert!(gen_parametric_ss(3, 4, 4).is_ok());
    }

    #[test]
    fn parametric_chains_fit() {
        for (t, r) in [(2u32, 3u32), (2, 4), (3, 5)] {
            let n = num::ToPrimitive::to_u32(&parametric_modulus(t, r)).unwrap();
            let inst = Arc::new(gen_parametric_ss(t, r, n).unwrap());
            // t large items plus one of each of the r − t smaller classes.
            let p = chain_packing(&inst, r, n).unwrap();
            assert!(p.loads().iter().all(|l| *l < Rational::one()));
            let (ss, _) = ss_pack(&inst);
            assert!(ss.bin_count() >= n as usize);
        }
    }
}
