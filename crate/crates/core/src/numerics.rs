//! Log-domain probability arithmetic and binary classical divergences.
//!
//! All quantities are kept in base-2 logarithms. Products of many
//! probabilities are sums here, and sums go through log-sum-exp with
//! max-subtraction, so blocklengths in the hundreds never underflow.

use crate::{Error, Result};
use statrs::function::gamma::ln_gamma;

const LN_2: f64 = std::f64::consts::LN_2;

/// A nonnegative number stored as its base-2 logarithm.
///
/// Exact zero is the distinguished value `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    /// Wraps a raw log2 value.
    pub fn from_log2(l: f64) -> Self {
        debug_assert!(!l.is_nan());
        LogProb(l)
    }

    /// Converts a linear-domain nonnegative number.
    pub fn from_linear(p: f64) -> Result<Self> {
        if !(p >= 0.0) {
            return Err(Error::param("p", p, "must be a nonnegative number"));
        }
        Ok(LogProb(p.log2()))
    }

    pub fn log2(self) -> f64 {
        self.0
    }

    pub fn to_linear(self) -> f64 {
        self.0.exp2()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Log-domain addition (log-sum-exp of two terms).
    pub fn add(self, other: LogProb) -> LogProb {
        let (hi, lo) = if self.0 >= other.0 {
            (self.0, other.0)
        } else {
            (other.0, self.0)
        };
        if hi == f64::NEG_INFINITY {
            return LogProb::ZERO;
        }
        // max-subtraction keeps the exp argument in [-inf, 0]
        LogProb(hi + (lo - hi).exp2().ln_1p() / LN_2)
    }

    /// Log-domain multiplication.
    pub fn mul(self, other: LogProb) -> LogProb {
        if self.is_zero() || other.is_zero() {
            return LogProb::ZERO;
        }
        LogProb(self.0 + other.0)
    }
}

/// Log-sum-exp over a slice of log2 values, with max-subtraction.
pub fn log_sum_exp2(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - m).exp2()).sum();
    m + sum.log2()
}

/// A finite probability vector held in log₂ domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDist {
    weights: Vec<LogProb>,
}

impl FiniteDist {
    /// Tolerance on |sum - 1| in the linear domain.
    pub const NORMALIZATION_TOL: f64 = 1e-12;

    pub fn new(weights: Vec<LogProb>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight vector".into()));
        }
        let logs: Vec<f64> = weights.iter().map(|w| w.log2()).collect();
        let total = log_sum_exp2(&logs).exp2();
        if (total - 1.0).abs() > Self::NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, expected 1 within {}",
                Self::NORMALIZATION_TOL
            )));
        }
        Ok(FiniteDist { weights })
    }

    pub fn from_linear(weights: &[f64]) -> Result<Self> {
        let w = weights
            .iter()
            .map(|&p| LogProb::from_linear(p))
            .collect::<Result<Vec<_>>>()?;
        FiniteDist::new(w)
    }

    /// Two-point distribution {p, 1-p}.
    pub fn bernoulli(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        FiniteDist::from_linear(&[p, 1.0 - p])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[LogProb] {
        &self.weights
    }

    pub fn linear(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.to_linear()).collect()
    }
}

/// Divergence family selector for [`binary_divergence`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceKind {
    Kl,
    /// Rényi of order α, α ∈ (0,1) ∪ (1,∞).
    Renyi(f64),
    Max,
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return Err(Error::param(name, p, "must lie in [0,1]"));
    }
    Ok(())
}

/// Classical divergence D(p‖q) between the two-point distributions
/// {p, 1-p} and {q, 1-q}, in bits.
///
/// Uses the 0·log0 = 0 convention; returns +∞ when the support condition
/// fails (q at an endpoint with p strictly inside, or mismatched endpoints).
pub fn binary_divergence(kind: DivergenceKind, p: f64, q: f64) -> Result<f64> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    if let DivergenceKind::Renyi(alpha) = kind {
        if alpha.is_nan() || alpha <= 0.0 || alpha == 1.0 {
            return Err(Error::param(
                "alpha",
                alpha,
                "Renyi order must lie in (0,1) or (1,inf)",
            ));
        }
    }
    Ok(match kind {
        DivergenceKind::Kl => kl_term(p, q) + kl_term(1.0 - p, 1.0 - q),
        DivergenceKind::Max => {
            let r0 = ratio_or_zero(p, q);
            let r1 = ratio_or_zero(1.0 - p, 1.0 - q);
            let m = r0.max(r1);
            if m == 0.0 {
                // p has empty support; vacuous but p is a distribution so unreachable
                0.0
            } else {
                m.log2()
            }
        }
        DivergenceKind::Renyi(alpha) => {
            if alpha > 1.0 {
                // sum p^α q^(1-α) written as p (p/q)^(α-1): infinite off-support
                let t0 = renyi_term_gt1(p, q, alpha);
                let t1 = renyi_term_gt1(1.0 - p, 1.0 - q, alpha);
                (t0 + t1).log2() / (alpha - 1.0)
            } else {
                // α < 1: terms vanish off-support; log of 0 gives +∞ only for
                // disjoint supports
                let t0 = renyi_term_lt1(p, q, alpha);
                let t1 = renyi_term_lt1(1.0 - p, 1.0 - q, alpha);
                (t0 + t1).log2() / (alpha - 1.0)
            }
        }
    })
}

fn kl_term(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else if q == 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).log2()
    }
}

fn ratio_or_zero(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else if q == 0.0 {
        f64::INFINITY
    } else {
        p / q
    }
}

fn renyi_term_gt1(p: f64, q: f64, alpha: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else if q == 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).powf(alpha - 1.0)
    }
}

fn renyi_term_lt1(p: f64, q: f64, alpha: f64) -> f64 {
    if p == 0.0 || q == 0.0 {
        0.0
    } else {
        p.powf(alpha) * q.powf(1.0 - alpha)
    }
}

/// log₂ of the binomial coefficient C(n, l), via log-gamma.
pub fn log_binomial(n: u64, l: u64) -> Result<f64> {
    if l > n {
        return Err(Error::int(
            "l",
            l as i64,
            "binomial lower index must not exceed the upper index",
        ));
    }
    if l == 0 || l == n {
        // exact zero keeps the product type-class endpoints exact
        return Ok(0.0);
    }
    let nf = n as f64;
    let lf = l as f64;
    Ok((ln_gamma(nf + 1.0) - ln_gamma(lf + 1.0) - ln_gamma(nf - lf + 1.0)) / LN_2)
}

/// Binomial coefficient in the linear domain; exact for small arguments,
/// used for the erasure constraint matrix where n stays at desk scale.
pub fn binomial_f64(n: u64, l: u64) -> f64 {
    if l > n {
        return 0.0;
    }
    let l = l.min(n - l);
    let mut acc = 1.0f64;
    for i in 0..l {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // values frozen from 40-digit evaluation of the defining formulas
    const KL_85_75: f64 = 0.042941569670616822;
    const MAX_85_75: f64 = 0.180572245641820879;
    const RENYI2_85_75: f64 = 0.074962057681222047;

    #[test]
    fn kl_identical_is_zero() {
        assert_eq!(binary_divergence(DivergenceKind::Kl, 0.5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn kl_frozen_value() {
        let d = binary_divergence(DivergenceKind::Kl, 0.85, 0.75).unwrap();
        assert!((d - KL_85_75).abs() < 1e-14, "got {d}");
    }

    #[test]
    fn max_frozen_value() {
        let d = binary_divergence(DivergenceKind::Max, 0.85, 0.75).unwrap();
        assert!((d - MAX_85_75).abs() < 1e-14, "got {d}");
    }

    #[test]
    fn max_matches_brute_force_lambda_grid() {
        // smallest λ with {p,1-p} ≤ 2^λ {q,1-q}, scanned on a fine grid
        let (p, q) = (0.85, 0.75);
        let feasible = |lam: f64| {
            let s = lam.exp2();
            p <= s * q + 1e-15 && (1.0 - p) <= s * (1.0 - q) + 1e-15
        };
        let mut best = f64::INFINITY;
        for i in 0..=200_000 {
            let lam = -1.0 + 3.0 * i as f64 / 200_000.0;
            if feasible(lam) {
                best = lam;
                break;
            }
        }
        let d = binary_divergence(DivergenceKind::Max, p, q).unwrap();
        assert!((d - best).abs() < 1e-4, "closed form {d} vs grid {best}");
    }

    #[test]
    fn renyi_frozen_value() {
        let d = binary_divergence(DivergenceKind::Renyi(2.0), 0.85, 0.75).unwrap();
        assert!((d - RENYI2_85_75).abs() < 1e-14, "got {d}");
    }

    #[test]
    fn support_conventions() {
        assert_eq!(
            binary_divergence(DivergenceKind::Kl, 0.5, 0.0).unwrap(),
            f64::INFINITY
        );
        assert_eq!(
            binary_divergence(DivergenceKind::Kl, 0.5, 1.0).unwrap(),
            f64::INFINITY
        );
        assert_eq!(binary_divergence(DivergenceKind::Kl, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(binary_divergence(DivergenceKind::Kl, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(
            binary_divergence(DivergenceKind::Renyi(2.0), 0.5, 0.0).unwrap(),
            f64::INFINITY
        );
        assert_eq!(
            binary_divergence(DivergenceKind::Max, 1.0, 0.5).unwrap(),
            1.0
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(binary_divergence(DivergenceKind::Kl, f64::NAN, 0.5).is_err());
        assert!(binary_divergence(DivergenceKind::Kl, -0.1, 0.5).is_err());
        assert!(binary_divergence(DivergenceKind::Kl, 0.5, 1.2).is_err());
        assert!(binary_divergence(DivergenceKind::Renyi(1.0), 0.5, 0.4).is_err());
        assert!(binary_divergence(DivergenceKind::Renyi(-2.0), 0.5, 0.4).is_err());
    }

    #[test]
    fn log_binomial_small_exact() {
        assert_eq!(log_binomial(0, 0).unwrap(), 0.0);
        assert!((log_binomial(5, 2).unwrap() - 10f64.log2()).abs() < 1e-13);
        assert!(log_binomial(3, 4).is_err());
    }

    #[test]
    fn log_binomial_against_big_integer() {
        use num_bigint::BigUint;
        let mut c = BigUint::from(1u32);
        for i in 0..25u64 {
            c = c * BigUint::from(50 - i) / BigUint::from(i + 1);
        }
        // C(50,25) fits in f64 exactly enough for a log comparison
        let exact: f64 = c.to_string().parse().unwrap();
        let got = log_binomial(50, 25).unwrap();
        assert!((got - exact.log2()).abs() / exact.log2() < 1e-12);
    }

    #[test]
    fn log_binomial_relative_accuracy_large_n() {
        // Stirling-free check: C(n,l) = C(n-1,l-1) * n/l telescoped in logs
        let mut acc = 0.0f64;
        for i in 0..5000u64 {
            acc += ((10_000 - i) as f64).log2() - ((i + 1) as f64).log2();
        }
        let got = log_binomial(10_000, 5_000).unwrap();
        assert!((got - acc).abs() / acc.abs() < 1e-12);
    }

    #[test]
    fn finite_dist_validation() {
        assert!(FiniteDist::from_linear(&[0.5, 0.4]).is_err());
        assert!(FiniteDist::from_linear(&[]).is_err());
        assert!(FiniteDist::from_linear(&[0.25, 0.75]).is_ok());
        assert!(FiniteDist::from_linear(&[-0.1, 1.1]).is_err());
    }

    proptest! {
        #[test]
        fn logprob_roundtrip_ulp(p in 1e-300f64..=1.0) {
            let lp = LogProb::from_linear(p).unwrap();
            let back = lp.to_linear();
            // the log-domain ulp is amplified by |log2 p| on the way back
            let tol = p * f64::EPSILON * (2.0 + lp.log2().abs());
            prop_assert!((back - p).abs() <= tol);
        }

        #[test]
        fn logprob_add_commutes(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (x, y) = (LogProb::from_linear(a).unwrap(), LogProb::from_linear(b).unwrap());
            prop_assert_eq!(x.add(y), y.add(x));
            if a > 0.0 || b > 0.0 {
                prop_assert!(!x.add(y).is_zero());
            }
        }

        #[test]
        fn divergence_zero_at_equal_args(p in 0.0f64..=1.0, alpha in 0.05f64..4.0) {
            prop_assert_eq!(binary_divergence(DivergenceKind::Kl, p, p).unwrap(), 0.0);
            prop_assert_eq!(binary_divergence(DivergenceKind::Max, p, p).unwrap(), 0.0);
            if (alpha - 1.0).abs() > 1e-3 {
                let d = binary_divergence(DivergenceKind::Renyi(alpha), p, p).unwrap();
                prop_assert!(d.abs() < 1e-12);
            }
        }

        #[test]
        fn monotone_decreasing_in_q(p in 0.02f64..0.98, f1 in 0.01f64..0.99, f2 in 0.01f64..0.99, alpha in 0.05f64..4.0) {
            // 1 > p > q > r > 0 ⇒ D(p‖r) > D(p‖q)
            let q = p * (0.02 + 0.96 * f1);
            let r = q * (0.02 + 0.96 * f2);
            prop_assume!(p > q && q > r && r > 0.0);
            let dq = binary_divergence(DivergenceKind::Kl, p, q).unwrap();
            let dr = binary_divergence(DivergenceKind::Kl, p, r).unwrap();
            prop_assert!(dr > dq);
            if (alpha - 1.0).abs() > 1e-3 {
                let dq = binary_divergence(DivergenceKind::Renyi(alpha), p, q).unwrap();
                let dr = binary_divergence(DivergenceKind::Renyi(alpha), p, r).unwrap();
                prop_assert!(dr > dq);
            }
        }

        #[test]
        fn renyi_limit_is_kl(p in 0.01f64..0.99, q in 0.01f64..0.99) {
            let kl = binary_divergence(DivergenceKind::Kl, p, q).unwrap();
            for alpha in [1.0 - 1e-6, 1.0 + 1e-6] {
                let r = binary_divergence(DivergenceKind::Renyi(alpha), p, q).unwrap();
                prop_assert!((r - kl).abs() <= 1e-4, "alpha={alpha} renyi={r} kl={kl}");
            }
        }

        #[test]
        fn renyi_monotone_in_alpha(p in 0.01f64..0.99, q in 0.01f64..0.99,
                                   a in 0.05f64..4.0, b in 0.05f64..4.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assume!((lo - 1.0).abs() > 1e-3 && (hi - 1.0).abs() > 1e-3);
            let dl = binary_divergence(DivergenceKind::Renyi(lo), p, q).unwrap();
            let dh = binary_divergence(DivergenceKind::Renyi(hi), p, q).unwrap();
            prop_assert!(dl <= dh + 1e-12);
        }
    }
}
