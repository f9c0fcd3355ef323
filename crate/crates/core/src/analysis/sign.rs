//! Two-tailed sign test on episode outcomes.

use statrs::function::erf::erfc;

use crate::{Error, Result};

/// Above this many non-zero outcomes the normal approximation is used.
pub const EXACT_LIMIT: u64 = 1_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignTest {
    pub successes: u64,
    pub failures: u64,
    pub p_value: f64,
    pub exact: bool,
}

/// Returns above zero count as successes, below zero as failures, and exact
/// zeros are dropped. Fails when nothing is left.
pub fn sign_test(returns: &[f64]) -> Result<SignTest> {
    let successes = returns.iter().filter(|&&r| r > 0.0).count() as u64;
    let failures = returns.iter().filter(|&&r| r < 0.0).count() as u64;
    sign_test_counts(successes, failures)
}

pub fn sign_test_counts(successes: u64, failures: u64) -> Result<SignTest> {
    let n = successes + failures;
    if n == 0 {
        return Err(Error::Undefined("sign test needs at least one non-zero outcome".into()));
    }
    let k = successes.min(failures);
    let exact = n <= EXACT_LIMIT;
    let p = if exact {
        2.0 * binomial_lower_tail(n, k)
    } else {
        let mean = n as f64 / 2.0;
        let sd = (n as f64).sqrt() / 2.0;
        let d = (mean - k as f64 - 0.5).max(0.0);
        erfc(d / sd / std::f64::consts::SQRT_2)
    };
    Ok(SignTest {
        successes,
        failures,
        p_value: p.min(1.0),
        exact,
    })
}

/// P(X <= k) for X ~ Binomial(n, 1/2), summing the pmf by recurrence from 2^-n.
fn binomial_lower_tail(n: u64, k: u64) -> f64 {
    let mut pmf = 0.5f64.powi(n as i32);
    let mut total = pmf;
    for i in 0..k {
        pmf *= (n - i) as f64 / (i + 1) as f64;
        total += pmf;
    }
    total
}
