//! Shared harness for the acceptance suite: a check collector that prints
//! one pass/fail line per criterion, and a tiny deterministic PRNG for the
//! randomized property criteria.

use std::time::Instant;

pub struct Criterion {
    name: String,
    failures: Vec<String>,
    checks: usize,
    started: Instant,
    limit_secs: f64,
}

impl Criterion {
    pub fn new(name: &str, limit_secs: f64) -> Self {
        Criterion {
            name: name.to_string(),
            failures: Vec::new(),
            checks: 0,
            started: Instant::now(),
            limit_secs,
        }
    }

    pub fn check(&mut self, label: &str, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push(label.to_string());
        }
    }

    pub fn check_close(&mut self, label: &str, value: f64, expected: f64, tol: f64) {
        self.checks += 1;
        if !((value - expected).abs() <= tol) {
            self.failures.push(format!(
                "{label}: {value:.12e} vs {expected:.12e} (tol {tol:.1e})"
            ));
        }
    }

    pub fn finish(mut self) {
        let elapsed = self.started.elapsed().as_secs_f64();
        if elapsed >= self.limit_secs {
            self.failures
                .push(format!("runtime {elapsed:.1} s exceeds {} s", self.limit_secs));
        }
        if self.failures.is_empty() {
            println!(
                "[PASS] {} ({} checks, {elapsed:.2} s)",
                self.name, self.checks
            );
        } else {
            println!("[FAIL] {} ({elapsed:.2} s):", self.name);
            for f in &self.failures {
                println!("       - {f}");
            }
            panic!("{} failed: {:?}", self.name, self.failures);
        }
    }
}

/// xorshift64*; deterministic across platforms, no dependencies.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}
