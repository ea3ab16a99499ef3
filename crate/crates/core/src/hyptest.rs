//! Exact classical ε-hypothesis-testing divergence via the optimal
//! Neyman–Pearson test.
//!
//! The general path runs a fractional-knapsack greedy over outcomes sorted
//! by likelihood ratio. Product Bernoulli instances collapse to n+1 type
//! classes and are handled entirely in the log₂ domain.

use crate::numerics::{check_probability, log_binomial, log_sum_exp2, FiniteDist};
use crate::{Error, Result};

/// A binary hypothesis test between two distributions on the same outcome
/// set, with type-I error budget eps.
#[derive(Debug, Clone)]
pub struct HypothesisInstance {
    rho: FiniteDist,
    sigma: FiniteDist,
    eps: f64,
}

impl HypothesisInstance {
    pub fn new(rho: FiniteDist, sigma: FiniteDist, eps: f64) -> Result<Self> {
        if rho.len() != sigma.len() {
            return Err(Error::DimensionMismatch {
                context: "hypothesis test outcome sets",
                expected: rho.len(),
                got: sigma.len(),
            });
        }
        check_eps(eps)?;
        Ok(HypothesisInstance { rho, sigma, eps })
    }

    pub fn rho(&self) -> &FiniteDist {
        &self.rho
    }

    pub fn sigma(&self) -> &FiniteDist {
        &self.sigma
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

/// n-fold products of {1-p, p} against {t, 1-t}; the first outcome of the
/// null hypothesis carries weight 1-p and pairs with weight t.
#[derive(Debug, Clone, Copy)]
pub struct BernoulliProductInstance {
    pub n: u64,
    pub p: f64,
    pub t: f64,
    pub eps: f64,
}

impl BernoulliProductInstance {
    pub fn new(n: u64, p: f64, t: f64, eps: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::int("n", n as i64, "blocklength must be >= 1"));
        }
        check_probability("p", p)?;
        check_probability("t", t)?;
        check_eps(eps)?;
        Ok(BernoulliProductInstance { n, p, t, eps })
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_nan() || !(0.0..1.0).contains(&eps) {
        return Err(Error::param("eps", eps, "must lie in [0,1)"));
    }
    Ok(())
}

/// One group of outcomes sharing a likelihood ratio, in log₂ masses.
struct RatioGroup {
    log_rho: f64,
    log_sigma: f64,
}

/// Greedy Neyman–Pearson evaluation over ratio-sorted groups.
///
/// Groups must be sorted by likelihood ratio descending, with outcomes of
/// equal ratio already merged. Returns -log₂ of the minimal type-II error.
fn neyman_pearson(groups: &[RatioGroup], eps: f64) -> f64 {
    let target = 1.0 - eps;
    let mut accepted_sigma: Vec<f64> = Vec::with_capacity(groups.len() + 1);
    let mut cum_rho_log = f64::NEG_INFINITY;
    for g in groups {
        let deficit = target - cum_rho_log.exp2();
        if deficit <= 0.0 {
            break;
        }
        let rho_mass = g.log_rho.exp2();
        if rho_mass == 0.0 {
            // zero-likelihood outcomes never help the type-I constraint
            continue;
        }
        if deficit >= rho_mass * (1.0 - 1e-12) {
            // accept the whole group
            accepted_sigma.push(g.log_sigma);
            cum_rho_log = log_sum_exp2(&[cum_rho_log, g.log_rho]);
        } else {
            // fractional acceptance on the boundary group
            let lambda = (deficit / rho_mass).clamp(0.0, 1.0);
            if lambda > 0.0 {
                accepted_sigma.push(g.log_sigma + lambda.log2());
            }
            break;
        }
    }
    let log_beta = log_sum_exp2(&accepted_sigma);
    if log_beta == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        -log_beta
    }
}

/// ε-hypothesis-testing divergence for an explicit finite instance.
///
/// Returns -log₂ β with β the minimal type-II error over tests with
/// type-I error at most eps; +∞ when β = 0.
pub fn dh_eps_general(instance: &HypothesisInstance) -> f64 {
    let rho = instance.rho.linear();
    let sigma = instance.sigma.linear();

    // likelihood ratio per outcome; σ=0 with ρ>0 sorts first
    let mut idx: Vec<usize> = (0..rho.len()).collect();
    let ratio = |i: usize| -> f64 {
        if sigma[i] == 0.0 {
            if rho[i] > 0.0 {
                f64::INFINITY
            } else {
                // 0/0 outcomes cost nothing and contribute nothing
                0.0
            }
        } else {
            rho[i] / sigma[i]
        }
    };
    idx.sort_by(|&a, &b| ratio(b).partial_cmp(&ratio(a)).unwrap());

    // merge outcomes with identical ratios so the greedy pass is
    // order-independent
    let mut groups: Vec<RatioGroup> = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let r = ratio(idx[i]);
        let mut rho_mass = 0.0;
        let mut sigma_mass = 0.0;
        while i < idx.len() && ratio(idx[i]) == r {
            rho_mass += rho[idx[i]];
            sigma_mass += sigma[idx[i]];
            i += 1;
        }
        groups.push(RatioGroup {
            log_rho: rho_mass.log2(),
            log_sigma: sigma_mass.log2(),
        });
    }
    neyman_pearson(&groups, instance.eps)
}

/// ε-hypothesis-testing divergence between n-fold Bernoulli products,
/// computed over the n+1 type classes in O(n log n).
///
/// Agrees with [`dh_eps_general`] on the expanded 2ⁿ-outcome instance.
pub fn dh_eps_bernoulli_product(instance: &BernoulliProductInstance) -> Result<f64> {
    let BernoulliProductInstance { n, p, t, eps } = *instance;

    // class ℓ = number of second-outcome symbols; log₂ masses via
    // log-binomials so nothing underflows at large n
    let l_rho0 = (1.0 - p).log2();
    let l_rho1 = p.log2();
    let l_sig0 = t.log2();
    let l_sig1 = (1.0 - t).log2();

    // 0 * -inf must stay 0 (an absent factor, not a vanishing one)
    let weighted = |count: f64, logv: f64| if count == 0.0 { 0.0 } else { count * logv };

    let nn = n as usize;
    let mut log_rho = Vec::with_capacity(nn + 1);
    let mut log_sigma = Vec::with_capacity(nn + 1);
    for l in 0..=n {
        let lb = log_binomial(n, l)?;
        let rest = (n - l) as f64;
        log_rho.push(lb + weighted(rest, l_rho0) + weighted(l as f64, l_rho1));
        log_sigma.push(lb + weighted(rest, l_sig0) + weighted(l as f64, l_sig1));
    }

    // per-class log-ratio is an arithmetic progression in ℓ; its common
    // difference fixes the sort order, and a zero difference means every
    // class shares one ratio
    let delta = (l_rho1 - l_sig1) - (l_rho0 - l_sig0);
    let order: Vec<usize> = if delta == 0.0 || delta.is_nan() {
        // all ratios equal (or one distribution degenerate in a way that
        // leaves a single effective class); merge everything
        let groups = [RatioGroup {
            log_rho: log_sum_exp2(&log_rho),
            log_sigma: log_sum_exp2(&log_sigma),
        }];
        return Ok(neyman_pearson(&groups, eps));
    } else if delta > 0.0 {
        (0..=nn).rev().collect()
    } else {
        (0..=nn).collect()
    };

    // degenerate endpoints (p or t in {0,1}) can still make several classes
    // share a ratio through ±∞ masses; group by the actual ratio value
    let class_ratio = |l: usize| -> f64 {
        if log_sigma[l] == f64::NEG_INFINITY {
            if log_rho[l] == f64::NEG_INFINITY {
                0.0
            } else {
                f64::INFINITY
            }
        } else if log_rho[l] == f64::NEG_INFINITY {
            0.0
        } else {
            log_rho[l] - log_sigma[l]
        }
    };
    let mut order = order;
    order.sort_by(|&a, &b| class_ratio(b).partial_cmp(&class_ratio(a)).unwrap());

    let mut groups: Vec<RatioGroup> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let r = class_ratio(order[i]);
        let mut members_rho = Vec::new();
        let mut members_sigma = Vec::new();
        while i < order.len() && class_ratio(order[i]) == r {
            members_rho.push(log_rho[order[i]]);
            members_sigma.push(log_sigma[order[i]]);
            i += 1;
        }
        groups.push(RatioGroup {
            log_rho: log_sum_exp2(&members_rho),
            log_sigma: log_sum_exp2(&members_sigma),
        });
    }
    Ok(neyman_pearson(&groups, eps))
}

/// Expands a Bernoulli product instance into its explicit 2ⁿ-outcome form.
/// Intended for cross-checks at small n.
pub fn expand_bernoulli_product(instance: &BernoulliProductInstance) -> Result<HypothesisInstance> {
    let BernoulliProductInstance { n, p, t, eps } = *instance;
    if n > 20 {
        return Err(Error::int("n", n as i64, "expansion limited to n <= 20"));
    }
    let size = 1usize << n;
    let mut rho = Vec::with_capacity(size);
    let mut sigma = Vec::with_capacity(size);
    for s in 0..size {
        let ones = (s as u64).count_ones() as u64;
        let zeros = n - ones;
        rho.push((1.0 - p).powi(zeros as i32) * p.powi(ones as i32));
        sigma.push(t.powi(zeros as i32) * (1.0 - t).powi(ones as i32));
    }
    HypothesisInstance::new(
        FiniteDist::from_linear(&rho)?,
        FiniteDist::from_linear(&sigma)?,
        eps,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_lp, Constraint, LinearProgram, LpStatus, Relation};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(rho: &[f64], sigma: &[f64], eps: f64) -> HypothesisInstance {
        HypothesisInstance::new(
            FiniteDist::from_linear(rho).unwrap(),
            FiniteDist::from_linear(sigma).unwrap(),
            eps,
        )
        .unwrap()
    }

    /// Independent oracle: the Neyman–Pearson problem as an explicit LP,
    /// min Σσᵢλᵢ s.t. Σρᵢλᵢ ≥ 1-ε, λᵢ ∈ [0,1].
    pub(crate) fn dh_eps_lp_oracle(rho: &[f64], sigma: &[f64], eps: f64) -> f64 {
        let n = rho.len();
        let lp = LinearProgram {
            num_vars: n,
            objective: sigma.iter().map(|s| -s).collect(),
            constraints: vec![Constraint {
                coeffs: rho.to_vec(),
                relation: Relation::Ge,
                rhs: 1.0 - eps,
            }],
            bounds: vec![(0.0, 1.0); n],
        };
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        let beta = -sol.objective_value;
        if beta <= 0.0 {
            f64::INFINITY
        } else {
            -beta.log2()
        }
    }

    #[test]
    fn identity_instance_anchor() {
        let i = inst(&[0.3, 0.2, 0.5], &[0.3, 0.2, 0.5], 0.05);
        let d = dh_eps_general(&i);
        assert!((d - 0.074000581443776854).abs() < 1e-12, "got {d}");
    }

    #[test]
    fn hand_knapsack_example() {
        // β = 0.5 + 0.5·(0.1/0.2) = 0.75
        let i = inst(&[0.8, 0.2], &[0.5, 0.5], 0.1);
        let d = dh_eps_general(&i);
        assert!((d - 0.415037499278843819).abs() < 1e-12, "got {d}");
    }

    #[test]
    fn disjoint_supports_infinite() {
        let i = inst(&[1.0, 0.0], &[0.0, 1.0], 0.0);
        assert_eq!(dh_eps_general(&i), f64::INFINITY);
    }

    #[test]
    fn rejects_bad_eps() {
        let rho = FiniteDist::from_linear(&[0.5, 0.5]).unwrap();
        assert!(HypothesisInstance::new(rho.clone(), rho.clone(), 1.0).is_err());
        assert!(HypothesisInstance::new(rho.clone(), rho, -0.1).is_err());
        assert!(BernoulliProductInstance::new(1, 0.5, 0.5, 1.0).is_err());
        assert!(BernoulliProductInstance::new(0, 0.5, 0.5, 0.1).is_err());
    }

    #[test]
    fn bernoulli_identity_at_t_complement() {
        // σ equals ρ when t = 1-p
        for n in [1u64, 3, 17, 400] {
            let i = BernoulliProductInstance::new(n, 0.3, 0.7, 0.05).unwrap();
            let d = dh_eps_bernoulli_product(&i).unwrap();
            assert!((d - 0.074000581443776854).abs() < 1e-12, "n={n} got {d}");
        }
    }

    #[test]
    fn bernoulli_n2_hand_enumeration() {
        let i = BernoulliProductInstance::new(2, 0.2, 0.5, 0.1).unwrap();
        let d = dh_eps_bernoulli_product(&i).unwrap();
        assert!((d - 0.607682577221239711).abs() < 1e-12, "got {d}");
    }

    #[test]
    fn bernoulli_n1_reduces_to_general() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p: f64 = rng.gen();
            let t: f64 = rng.gen();
            let eps: f64 = rng.gen_range(0.0..0.9);
            let b = BernoulliProductInstance::new(1, p, t, eps).unwrap();
            let d1 = dh_eps_bernoulli_product(&b).unwrap();
            let g = inst(&[1.0 - p, p], &[t, 1.0 - t], eps);
            let d2 = dh_eps_general(&g);
            assert!(
                (d1 - d2).abs() < 1e-10 || (d1.is_infinite() && d2.is_infinite()),
                "p={p} t={t} eps={eps}: {d1} vs {d2}"
            );
        }
    }

    #[test]
    fn bernoulli_matches_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let p: f64 = rng.gen();
            let t: f64 = rng.gen_range(0.01..0.99);
            let eps: f64 = rng.gen_range(0.0..0.9);
            for n in 1..=8u64 {
                let b = BernoulliProductInstance::new(n, p, t, eps).unwrap();
                let fast = dh_eps_bernoulli_product(&b).unwrap();
                let slow = dh_eps_general(&expand_bernoulli_product(&b).unwrap());
                assert!(
                    (fast - slow).abs() < 1e-10 || (fast.is_infinite() && slow.is_infinite()),
                    "n={n} p={p} t={t} eps={eps}: {fast} vs {slow}"
                );
            }
        }
    }

    #[test]
    fn matches_lp_oracle_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..80 {
            let m = rng.gen_range(2..=8usize);
            let mut rho: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
            let mut sigma: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
            let sr: f64 = rho.iter().sum();
            let ss: f64 = sigma.iter().sum();
            rho.iter_mut().for_each(|x| *x /= sr);
            sigma.iter_mut().for_each(|x| *x /= ss);
            let eps = rng.gen_range(0.0..0.9);
            let d = dh_eps_general(&inst(&rho, &sigma, eps));
            let oracle = dh_eps_lp_oracle(&rho, &sigma, eps);
            assert!((d - oracle).abs() < 1e-8, "{d} vs {oracle}");
        }
    }

    #[test]
    fn equal_ratio_groups_merge() {
        // outcomes 0 and 1 share ratio 2 exactly; any permutation gives the
        // same value
        let d1 = dh_eps_general(&inst(&[0.4, 0.2, 0.4], &[0.2, 0.1, 0.7], 0.3));
        let d2 = dh_eps_general(&inst(&[0.2, 0.4, 0.4], &[0.1, 0.2, 0.7], 0.3));
        let d3 = dh_eps_general(&inst(&[0.4, 0.4, 0.2], &[0.7, 0.2, 0.1], 0.3));
        assert_eq!(d1, d2);
        assert_eq!(d1, d3);
    }

    proptest! {
        #[test]
        fn nonnegative_and_monotone_in_eps(
            raw in proptest::collection::vec(0.01f64..1.0, 2..6),
            raw2 in proptest::collection::vec(0.01f64..1.0, 2..6),
            e1 in 0.0f64..0.95, e2 in 0.0f64..0.95,
        ) {
            let m = raw.len().min(raw2.len());
            let sr: f64 = raw[..m].iter().sum();
            let ss: f64 = raw2[..m].iter().sum();
            let rho: Vec<f64> = raw[..m].iter().map(|x| x / sr).collect();
            let sigma: Vec<f64> = raw2[..m].iter().map(|x| x / ss).collect();
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let dlo = dh_eps_general(&inst(&rho, &sigma, lo));
            let dhi = dh_eps_general(&inst(&rho, &sigma, hi));
            prop_assert!(dlo >= -1e-12);
            prop_assert!(dhi >= dlo - 1e-9);
        }

        #[test]
        fn bernoulli_monotone_in_eps(p in 0.01f64..0.99, t in 0.01f64..0.99,
                                     e1 in 0.0f64..0.9, e2 in 0.0f64..0.9, n in 1u64..60) {
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let dlo = dh_eps_bernoulli_product(&BernoulliProductInstance::new(n, p, t, lo).unwrap()).unwrap();
            let dhi = dh_eps_bernoulli_product(&BernoulliProductInstance::new(n, p, t, hi).unwrap()).unwrap();
            prop_assert!(dlo >= -1e-12);
            prop_assert!(dhi >= dlo - 1e-9);
        }
    }
}
