use crate::binomial::binom_f64;
use crate::error::{Error, Result};
use crate::evolution::{exact_p, DephasingChannel, ProbabilityTerms};

/// Closed-form series next to the exact terms for the same channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormReport {
    pub closed: ProbabilityTerms,
    pub exact: ProbabilityTerms,
    /// `|closed.p - exact.p|`, attributed to the neglected `O(1/L)` and
    /// `O((omega t)^2)` orders.
    pub discrepancy: f64,
}

/// Tanh-power series for the three terms of `p`, with the cross term linear
/// in `sum_omega`. The cross term is kept with the sign of the series as
/// derived; the exact cross term carries the opposite sign.
pub fn closed_form_terms(l: usize, t: f64, t2: f64, sum_omega: f64) -> Result<ProbabilityTerms> {
    if l == 0 || l % 2 == 1 {
        return Err(Error::OddQubitCount(l));
    }
    if !(t2 > 0.0) || !(t >= 0.0) {
        return Err(Error::Domain(format!("need T2 > 0 and t >= 0, got {t2}, {t}")));
    }
    let h = l / 2;
    let x = (t / t2).powi(2);
    let th = (x / 2.0).tanh();
    let pre = (-(h as f64) * x).exp();
    let b = |k: usize| binom_f64(h, k);
    let term_dd = pre
        * (0..=h)
            .map(|n| b(n).powi(4) / binom_f64(l, 2 * n) * th.powi(2 * n as i32))
            .sum::<f64>();
    let term_d1d1 = pre
        * (1..=h)
            .map(|n| (b(n - 1) * b(n)).powi(2) / binom_f64(l, 2 * n - 1) * th.powi(2 * n as i32 - 1))
            .sum::<f64>();
    let lead = pre / (2.0 * l as f64) * sum_omega * t;
    let down: f64 = (1..=h)
        .map(|n| b(n).powi(3) * b(n) * (2 * n) as f64 / binom_f64(l, 2 * n - 1) * th.powi(2 * n as i32 - 1))
        .sum();
    let up: f64 = (1..=h)
        .map(|n| b(n - 1).powi(3) * b(n) * (2 * n - 1) as f64 / binom_f64(l, 2 * n - 2) * th.powi(2 * n as i32 - 2))
        .sum();
    let term_cross = lead * (up - down);
    Ok(ProbabilityTerms {
        term_dd,
        term_d1d1,
        term_cross,
        p: 0.5 * term_dd + 0.5 * term_d1d1 - term_cross,
    })
}

/// Evaluates the closed forms with the channel's mean field and compares them
/// with the exact evolution.
pub fn exact_p_small_l_by_terms(ch: &DephasingChannel) -> Result<ClosedFormReport> {
    let sum: f64 = ch.fields().iter().sum();
    let closed = closed_form_terms(ch.num_spins(), ch.t(), ch.t2(), sum)?;
    let exact = exact_p(ch)?;
    Ok(ClosedFormReport {
        closed,
        exact,
        discrepancy: (closed.p - exact.p).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::p_zero_field;

    fn zero_field(l: usize, u: f64) -> DephasingChannel {
        DephasingChannel::new(1.0, u / (l as f64).sqrt(), vec![0.0; l]).unwrap()
    }

    #[test]
    fn unit_overlap_at_zero_time() {
        for l in [2, 4, 8] {
            let c = closed_form_terms(l, 0.0, 1.0, 3.0).unwrap();
            assert!((c.term_dd - 1.0).abs() < 1e-15);
            assert_eq!(c.term_d1d1, 0.0);
            assert_eq!(c.term_cross, 0.0);
        }
    }

    #[test]
    fn field_free_terms_within_order_one_over_l() {
        let l = 8;
        let r = exact_p_small_l_by_terms(&zero_field(l, 0.357)).unwrap();
        assert!(r.discrepancy <= 2.0 / l as f64, "{r:?}");
        assert!((r.closed.term_dd - r.exact.term_dd).abs() <= 2.0 / l as f64);
        assert!((r.closed.term_d1d1 - r.exact.term_d1d1).abs() <= 2.0 / l as f64);
    }

    #[test]
    fn cross_term_is_linear_in_field() {
        let a = closed_form_terms(6, 0.3, 1.0, 1e-3).unwrap().term_cross;
        let b = closed_form_terms(6, 0.3, 1.0, 2e-3).unwrap().term_cross;
        assert!((b - 2.0 * a).abs() <= 1e-12 * b.abs());
    }

    /// At weak field the series cross term and the exact one agree in
    /// magnitude up to `O(1/L)` and differ in sign.
    #[test]
    fn cross_term_sign_relative_to_exact() {
        let l = 8;
        let t = 0.6 / (l as f64).sqrt();
        let ch = DephasingChannel::new(1.0, t, vec![1e-4; l]).unwrap();
        let r = exact_p_small_l_by_terms(&ch).unwrap();
        assert!(r.closed.term_cross * r.exact.term_cross < 0.0, "{r:?}");
        let rel = (r.closed.term_cross + r.exact.term_cross).abs() / r.exact.term_cross.abs();
        assert!(rel < 0.5, "{rel}");
    }

    #[test]
    fn series_approach_large_l_limit() {
        let gap = |l: usize| {
            (1..=10)
                .map(|i| {
                    let u = 0.1 * i as f64;
                    let c = closed_form_terms(l, u / (l as f64).sqrt(), 1.0, 0.0).unwrap();
                    (c.p - p_zero_field(u).unwrap()).abs()
                })
                .fold(0.0, f64::max)
        };
        let g: Vec<f64> = [4, 8, 12].into_iter().map(gap).collect();
        assert!(g[0] > g[1] && g[1] > g[2], "{g:?}");
    }

    #[test]
    fn invalid_arguments() {
        assert_eq!(closed_form_terms(3, 0.1, 1.0, 0.0), Err(Error::OddQubitCount(3)));
        assert!(closed_form_terms(4, 0.1, 0.0, 0.0).is_err());
    }
}
