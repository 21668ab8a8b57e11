use rand::Rng;

use crate::model::Instance;
use crate::rational::{frac, Rational};

/// `n` sizes `p/q` with `q` uniform in `1..=max_denominator` and `p` uniform
/// among the numerators keeping the size in `(0, alpha]`.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    n: usize,
    alpha: &Rational,
    max_denominator: u32,
) -> Instance {
    let sizes = (0..n)
        .map(|_| loop {
            let q = rng.gen_range(1..=max_denominator.max(1)) as i64;
            let top = (alpha * frac(q, 1)).floor().to_integer();
            let top: i64 = num::ToPrimitive::to_i64(&top).unwrap_or(0);
            if top >= 1 {
                break frac(rng.gen_range(1..=top), q);
            }
        })
        .collect();
    Instance::new(alpha.clone(), sizes).expect("sizes respect alpha")
}
