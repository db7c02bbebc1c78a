//! Exact and log-space binomial coefficients.

use std::sync::OnceLock;

/// Largest `n` for which [`exact`] is tabulated.
pub const EXACT_MAX_N: usize = 64;

fn table() -> &'static Vec<Vec<u128>> {
    static TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(EXACT_MAX_N + 1);
        for n in 0..=EXACT_MAX_N {
            let mut row = vec![1u128; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        rows
    })
}

/// `binom(n, k)` as an exact integer, `None` when `n` is beyond the table.
pub fn exact(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    table().get(n).map(|row| row[k])
}

fn ln_factorials() -> &'static Vec<f64> {
    static LN_FACT: OnceLock<Vec<f64>> = OnceLock::new();
    LN_FACT.get_or_init(|| {
        let mut v = Vec::with_capacity(1025);
        let mut acc = 0.0f64;
        v.push(0.0);
        for i in 1..=1024usize {
            acc += (i as f64).ln();
            v.push(acc);
        }
        v
    })
}

/// `ln binom(n, k)`; `-inf` when `k > n`.
pub fn ln_binom(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if let Some(b) = exact(n, k) {
        return (b as f64).ln();
    }
    let lf = ln_factorials();
    if n < lf.len() {
        lf[n] - lf[k] - lf[n - k]
    } else {
        // Direct summation of ln((n-k+i)/i) keeps full precision for large n.
        let k = k.min(n - k);
        (1..=k)
            .map(|i| ((n - k + i) as f64 / i as f64).ln())
            .sum()
    }
}

/// `binom(n, k)` as a float, exact below [`EXACT_MAX_N`].
pub fn binom_f64(n: usize, k: usize) -> f64 {
    match exact(n, k) {
        Some(b) => b as f64,
        None => ln_binom(n, k).exp(),
    }
}
