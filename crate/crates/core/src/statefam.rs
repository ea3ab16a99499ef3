//! Closed-form k-extendibility thresholds and k-unextendible divergences
//! for the isotropic and Werner state families.
//!
//! Both families are invariant under a bilateral twirl, so their
//! k-unextendible divergences reduce to binary classical divergences
//! against the family member sitting at the extendibility threshold.

use crate::numerics::{binary_divergence, check_probability, DivergenceKind};
use crate::{Error, Result};

/// Highly symmetric two-parameter state families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateFamily {
    /// U⊗U*-invariant; `param` is the maximally-entangled weight t.
    Isotropic,
    /// U⊗U-invariant; `param` is the antisymmetric weight p.
    Werner,
}

/// A point (family, local dimension, mixing parameter) in one of the families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateFamilyPoint {
    pub family: StateFamily,
    pub d: u32,
    pub param: f64,
}

impl StateFamilyPoint {
    pub fn new(family: StateFamily, d: u32, param: f64) -> Result<Self> {
        check_dimension(d)?;
        check_probability("param", param)?;
        Ok(StateFamilyPoint { family, d, param })
    }
}

fn check_dimension(d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::int("d", d as i64, "local dimension must be >= 2"));
    }
    Ok(())
}

fn check_extendibility(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::int("k", k as i64, "extendibility must be >= 2"));
    }
    Ok(())
}

/// Largest family parameter for which the state is still k-extendible.
///
/// Isotropic: (1/d)(1 + (d-1)/k). Werner: (1/2)((d-1)/k + 1), clamped to 1
/// (every Werner state is k-extendible once the raw threshold exceeds the
/// parameter domain).
pub fn extendibility_threshold(family: StateFamily, d: u32, k: u64) -> Result<f64> {
    check_dimension(d)?;
    check_extendibility(k)?;
    let dm1 = (d - 1) as f64;
    let raw = match family {
        StateFamily::Isotropic => (1.0 + dm1 / k as f64) / d as f64,
        StateFamily::Werner => 0.5 * (dm1 / k as f64 + 1.0),
    };
    Ok(raw.min(1.0))
}

/// k-unextendible divergence of a family state: zero up to the threshold,
/// then the binary divergence against the threshold state.
pub fn unextendible_divergence(
    point: StateFamilyPoint,
    kind: DivergenceKind,
    k: u64,
) -> Result<f64> {
    if matches!(kind, DivergenceKind::Max) {
        return Err(Error::param(
            "kind",
            f64::NAN,
            "use unextendible_max_divergence_isotropic for the max divergence",
        ));
    }
    let threshold = extendibility_threshold(point.family, point.d, k)?;
    if point.param <= threshold {
        return Ok(0.0);
    }
    binary_divergence(kind, point.param, threshold)
}

/// k-unextendible max-relative entropy of an isotropic state, in closed form.
///
/// Equals min over k-extendible q of log₂ max(t/q, (1-t)/(1-q)), which is
/// 0 below the threshold and log₂(t/threshold) above it.
pub fn unextendible_max_divergence_isotropic(t: f64, d: u32, k: u64) -> Result<f64> {
    check_probability("t", t)?;
    let threshold = extendibility_threshold(StateFamily::Isotropic, d, k)?;
    if t <= threshold {
        Ok(0.0)
    } else {
        Ok((t / threshold).log2())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn threshold_anchors() {
        assert_eq!(
            extendibility_threshold(StateFamily::Isotropic, 2, 2).unwrap(),
            0.75
        );
        let limit = extendibility_threshold(StateFamily::Isotropic, 2, 1_000_000_000).unwrap();
        assert!((limit - 0.5).abs() < 1e-8);
        let werner = extendibility_threshold(StateFamily::Werner, 3, 3).unwrap();
        assert!((werner - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn threshold_clamps_and_rejects() {
        // d=5, k=2 raw Werner threshold is 1.5
        assert_eq!(extendibility_threshold(StateFamily::Werner, 5, 2).unwrap(), 1.0);
        assert!(extendibility_threshold(StateFamily::Isotropic, 1, 2).is_err());
        assert!(extendibility_threshold(StateFamily::Isotropic, 2, 1).is_err());
    }

    #[test]
    fn threshold_strictly_decreasing_below_clamp() {
        for family in [StateFamily::Isotropic, StateFamily::Werner] {
            for d in [2u32, 3, 5, 8] {
                let mut prev = f64::INFINITY;
                for k in 2..40u64 {
                    let t = extendibility_threshold(family, d, k).unwrap();
                    if t < 1.0 {
                        assert!(t < prev, "{family:?} d={d} k={k}");
                    }
                    prev = t;
                }
                let far = extendibility_threshold(family, d, 10_000_000).unwrap();
                let limit = match family {
                    StateFamily::Isotropic => 1.0 / d as f64,
                    StateFamily::Werner => 0.5,
                };
                assert!((far - limit).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn divergence_examples() {
        let below =
            StateFamilyPoint::new(StateFamily::Isotropic, 2, 0.6).unwrap();
        assert_eq!(
            unextendible_divergence(below, DivergenceKind::Kl, 2).unwrap(),
            0.0
        );
        let above = StateFamilyPoint::new(StateFamily::Isotropic, 2, 0.85).unwrap();
        let d = unextendible_divergence(above, DivergenceKind::Kl, 2).unwrap();
        assert!((d - 0.042941569670616822).abs() < 1e-14);
        let werner = StateFamilyPoint::new(StateFamily::Werner, 2, 0.9).unwrap();
        let d = unextendible_divergence(werner, DivergenceKind::Kl, 2).unwrap();
        assert!((d - 0.104538155761678215).abs() < 1e-14);
    }

    #[test]
    fn divergence_faithful_and_increasing_above_threshold() {
        let thr = extendibility_threshold(StateFamily::Werner, 3, 4).unwrap();
        let mut prev = 0.0;
        for i in 0..200 {
            let p = thr + (1.0 - thr) * (i as f64 + 1.0) / 200.0;
            let pt = StateFamilyPoint::new(StateFamily::Werner, 3, p).unwrap();
            let d = unextendible_divergence(pt, DivergenceKind::Kl, 4).unwrap();
            assert!(d > prev, "p={p}");
            prev = d;
        }
        let at = StateFamilyPoint::new(StateFamily::Werner, 3, thr).unwrap();
        assert_eq!(unextendible_divergence(at, DivergenceKind::Kl, 4).unwrap(), 0.0);
    }

    #[test]
    fn max_divergence_anchors() {
        assert_eq!(unextendible_max_divergence_isotropic(0.7, 2, 2).unwrap(), 0.0);
        let d = unextendible_max_divergence_isotropic(0.9, 2, 2).unwrap();
        assert!((d - 0.263034405833793834).abs() < 1e-14);
        let ideal = unextendible_max_divergence_isotropic(1.0, 2, 1_000_000_000).unwrap();
        assert!((ideal - 1.0).abs() < 1e-8);
    }

    /// Dense-grid minimization of log₂ max(t/q, (1-t)/(1-q)) over the
    /// k-extendible range of q; certifies the closed form.
    fn grid_oracle(t: f64, d: u32, k: u64) -> f64 {
        let thr = extendibility_threshold(StateFamily::Isotropic, d, k).unwrap();
        let objective = |q: f64| {
            let r0 = if t == 0.0 { 0.0 } else { t / q };
            let r1 = if t == 1.0 { 0.0 } else { (1.0 - t) / (1.0 - q) };
            r0.max(r1).log2()
        };
        let n = 100_000;
        let mut best = f64::INFINITY;
        for i in 0..=n {
            let q = thr * i as f64 / n as f64;
            if q == 0.0 && t > 0.0 {
                continue;
            }
            best = best.min(objective(q));
        }
        // endpoint plus the stationary candidate (the objective is piecewise
        // monotone with its kink at q = t)
        best = best.min(objective(thr));
        if t > 0.0 && t <= thr {
            best = best.min(objective(t));
        }
        best
    }

    #[test]
    fn max_divergence_matches_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t: f64 = rng.gen();
            let d = rng.gen_range(2..6u32);
            let k = rng.gen_range(2..12u64);
            let closed = unextendible_max_divergence_isotropic(t, d, k).unwrap();
            let grid = grid_oracle(t, d, k);
            assert!(
                (closed - grid).abs() < 1e-9,
                "t={t} d={d} k={k}: closed {closed} grid {grid}"
            );
        }
    }
}
