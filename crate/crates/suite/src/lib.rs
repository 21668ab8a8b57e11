//! Helpers for the acceptance runs: seeded instance streams and a reporter
//! that prints one PASS/FAIL line per criterion.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfish_bins::generators::random_instance;
use selfish_bins::{Instance, Packing, Rational};

pub struct Outcome {
    pub label: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!(
            "{status} {}: {} [{:.2}s, limit {}s]",
            self.label,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )
    }
}

#[derive(Default)]
pub struct Reporter {
    pub outcomes: Vec<Outcome>,
}

impl Reporter {
    /// Runs `body`, which returns its own verdict and a summary. Going over
    /// the time limit fails the criterion.
    pub fn run(&mut self, label: &str, limit: Duration, body: impl FnOnce() -> (bool, String)) {
        let start = Instant::now();
        let (ok, detail) = body();
        let elapsed = start.elapsed();
        let mut detail = detail;
        if elapsed > limit {
            detail.push_str("; over time limit");
        }
        let outcome = Outcome {
            label: label.to_string(),
            passed: ok && elapsed <= limit,
            detail,
            elapsed,
            limit,
        };
        println!("{}", outcome.line());
        self.outcomes.push(outcome);
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed).count()
    }
}

/// Collects the first few failure messages so a FAIL line stays short.
#[derive(Default)]
pub struct Failures {
    pub count: usize,
    pub samples: Vec<String>,
}

impl Failures {
    pub fn push(&mut self, message: impl Into<String>) {
        self.count += 1;
        if self.samples.len() < 3 {
            self.samples.push(message.into());
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn summary(&self) -> String {
        if self.count == 0 {
            String::new()
        } else {
            format!(
                "; {} failures, e.g. {}",
                self.count,
                self.samples.join(" | ")
            )
        }
    }
}

/// Instance `k` of a seeded stream: size count uniform in `1..=max_n`.
pub fn sample_instance(
    seed: u64,
    k: u64,
    max_n: usize,
    alpha: &Rational,
    max_denominator: u32,
) -> Arc<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ k);
    let n = rng.gen_range(1..=max_n);
    Arc::new(random_instance(&mut rng, n, alpha, max_denominator))
}

/// Moves a few random items to random bins where they fit (possibly a fresh
/// bin). The result is usually not an equilibrium.
pub fn perturb(packing: &Packing, seed: u64, moves: usize) -> Packing {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = packing.clone();
    let n = current.instance().len();
    if n == 0 {
        return current;
    }
    for _ in 0..moves {
        let item = selfish_bins::ItemId(rng.gen_range(0..n));
        let size = current.instance().size(item).clone();
        let from = current.bin_of(item).expect("item is packed");
        let targets: Vec<usize> = (0..current.bin_count())
            .filter(|&b| {
                b != from && current.bin_load(b) + &size <= Rational::from_integer(1.into())
            })
            .collect();
        // Index equal to the bin count opens a new bin.
        let pick = rng.gen_range(0..=targets.len());
        let target = targets.get(pick).copied().unwrap_or(current.bin_count());
        current = current.with_move(item, target);
    }
    current
}
