//! Self-check suites. Quick depth replays the closed-form anchors; full
//! depth adds randomized cross-checks of the independent computation routes
//! (greedy Neyman-Pearson vs LP, type classes vs explicit expansion,
//! closed forms vs dense grids).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unext::bounds::{
    adaptive_depolarizing_bound, continuity_bound, depolarizing_bound, erasure_bound,
    erasure_constraint_matrix, erasure_lp_build, min_k_required, pretty_strong_converse,
    rate_from_divergence, tbr_limit_bound, BoundStatus, ChannelKind, ChannelParams, MinKMode,
};
use unext::hyptest::{
    dh_eps_bernoulli_product, dh_eps_general, expand_bernoulli_product, BernoulliProductInstance,
    HypothesisInstance,
};
use unext::lp::{solve_lp, Constraint, LinearProgram, LpStatus, Relation};
use unext::numerics::{binary_divergence, binomial_f64, DivergenceKind, FiniteDist};
use unext::statefam::{
    extendibility_threshold, unextendible_max_divergence_isotropic, StateFamily,
};

type CheckFn = fn() -> Result<(), String>;

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(detail()) }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || {
        format!("{what}: observed {got}, expected {want} (tol {tol})")
    })
}

fn e<E: std::fmt::Display>(err: E) -> String {
    format!("unexpected error: {err}")
}

fn depol(p: f64, n: u32, eps: f64, k: u64) -> ChannelParams {
    ChannelParams::new(ChannelKind::Depolarizing, p, n, eps, k).unwrap()
}

fn erasure_params(p: f64, n: u32, eps: f64, k: u64) -> ChannelParams {
    ChannelParams::new(ChannelKind::Erasure, p, n, eps, k).unwrap()
}

fn check_thresholds() -> Result<(), String> {
    let t = extendibility_threshold(StateFamily::Isotropic, 2, 2).map_err(e)?;
    ensure(t == 0.75, || format!("isotropic d=2 k=2: {t}, expected 0.75"))?;
    let t = extendibility_threshold(StateFamily::Werner, 2, 2).map_err(e)?;
    ensure(t == 0.75, || format!("werner d=2 k=2: {t}, expected 0.75"))?;
    let t = extendibility_threshold(StateFamily::Isotropic, 3, 1_000_000_000).map_err(e)?;
    close(t, 1.0 / 3.0, 1e-8, "isotropic d=3 large k")?;
    let t = extendibility_threshold(StateFamily::Werner, 5, 2).map_err(e)?;
    ensure(t == 1.0, || format!("werner clamp: {t}, expected 1"))
}

fn check_divergence_anchors() -> Result<(), String> {
    let d = binary_divergence(DivergenceKind::Kl, 0.85, 0.75).map_err(e)?;
    close(d, 0.042941569670616822, 1e-14, "KL(0.85,0.75)")?;
    let d = binary_divergence(DivergenceKind::Max, 0.85, 0.75).map_err(e)?;
    close(d, 0.180572245641820879, 1e-14, "Dmax(0.85,0.75)")?;
    let d = binary_divergence(DivergenceKind::Renyi(2.0), 0.85, 0.75).map_err(e)?;
    close(d, 0.074962057681222047, 1e-14, "D2(0.85,0.75)")
}

fn check_hyptest_anchors() -> Result<(), String> {
    let rho = FiniteDist::from_linear(&[0.6, 0.4]).map_err(e)?;
    let inst = HypothesisInstance::new(rho.clone(), rho, 0.05).map_err(e)?;
    close(
        dh_eps_general(&inst),
        0.074000581443776854,
        1e-12,
        "identity D_h^0.05",
    )?;
    let rho = FiniteDist::from_linear(&[0.75, 0.25]).map_err(e)?;
    let sigma = FiniteDist::from_linear(&[0.5, 0.5]).map_err(e)?;
    let inst = HypothesisInstance::new(rho, sigma, 0.05).map_err(e)?;
    close(
        dh_eps_general(&inst),
        0.152003093445049985,
        1e-12,
        "two-outcome knapsack",
    )
}

fn check_rate_anchors() -> Result<(), String> {
    let r = rate_from_divergence(0.0, 2).map_err(e)?;
    close(r.log2m_total, 0.0, 0.0, "E=0 k=2")?;
    let r = rate_from_divergence((4.0f64 / 3.0).log2(), 2).map_err(e)?;
    close(r.log2m_total, 1.0, 1e-12, "E=log2(4/3) k=2")?;
    let r = rate_from_divergence(1.0, 2).map_err(e)?;
    ensure(r.status == BoundStatus::Invalid, || {
        format!("E=1 k=2 should be Invalid, got {:?}", r.status)
    })
}

fn check_depol_anchors() -> Result<(), String> {
    let r = depolarizing_bound(&depol(0.0, 1, 0.0, 2)).map_err(e)?;
    close(r.log2m_total, 1.0, 1e-12, "noiseless qubit")?;
    let r = depolarizing_bound(&depol(0.25, 1, 0.05, 2)).map_err(e)?;
    close(r.log2m_total, 0.152003093445049985, 1e-9, "antidegradable p=0.25")
}

fn check_erasure_matrix() -> Result<(), String> {
    let m = erasure_constraint_matrix(2, 2).map_err(e)?;
    let want = [
        [0.25, 0.0, 0.0],
        [0.25, 0.5, 0.0],
        [0.25, 1.0, 1.0],
    ];
    for u in 0..3 {
        for v in 0..3 {
            ensure(m[u][v] == want[u][v], || {
                format!("n=2 k=2 entry ({u},{v}): observed {}, expected {}", m[u][v], want[u][v])
            })?;
        }
    }
    Ok(())
}

fn check_erasure_anchors() -> Result<(), String> {
    let lp = erasure_lp_build(&erasure_params(0.0, 1, 0.0, 2)).map_err(e)?;
    let sol = solve_lp(&lp).map_err(e)?;
    ensure(sol.status == LpStatus::Optimal, || format!("{:?}", sol.status))?;
    close(sol.objective_value, 0.5, 1e-10, "n=1 k=2 p=0 eps=0 LP value")?;
    let r = erasure_bound(&erasure_params(0.5, 1, 0.0, 2)).map_err(e)?;
    ensure(r.log2m_total.abs() <= 1e-9, || {
        format!("p=1-1/k exactness: {}", r.log2m_total)
    })
}

fn check_tbr_anchors() -> Result<(), String> {
    let r = tbr_limit_bound(&depol(0.25, 1, 0.05, 2)).map_err(e)?;
    close(r.log2m_total, 0.152003093445049985, 1e-9, "limit depol p=0.25")?;
    let r = tbr_limit_bound(&depol(0.0, 1, 0.0, 2)).map_err(e)?;
    close(r.log2m_total, 1.0, 1e-12, "limit depol p=0")
}

fn check_adaptive_anchors() -> Result<(), String> {
    let r = adaptive_depolarizing_bound(&depol(0.25, 10, 0.05, 2)).map_err(e)?;
    close(r.log2m_total, 0.152003093445049985, 1e-5, "p=0.25 n=10")?;
    let r = adaptive_depolarizing_bound(&depol(0.0, 1, 0.0, 2)).map_err(e)?;
    close(r.log2m_total, 1.0, 1e-12, "p=0 n=1")?;
    let r = adaptive_depolarizing_bound(&depol(0.0, 3, 0.05, 2)).map_err(e)?;
    ensure(r.status == BoundStatus::Invalid, || {
        format!("p=0 n=3 should be Invalid, got {:?}", r.status)
    })
}

fn check_converse_anchors() -> Result<(), String> {
    close(pretty_strong_converse(0.0, 1, 2).map_err(e)?, 0.0, 0.0, "eps=0")?;
    close(
        pretty_strong_converse(0.05, 1, 2).map_err(e)?,
        0.152003093445049985,
        1e-14,
        "eps=0.05 k=2",
    )?;
    close(
        pretty_strong_converse(0.05, 2, 4).map_err(e)?,
        0.049767836775457211,
        1e-14,
        "eps=0.05 n=2 k=4",
    )
}

fn check_min_k_anchors() -> Result<(), String> {
    let k = min_k_required(MinKMode::OneShot { i_h_eps: 1.0, eps: 0.05 }).map_err(e)?;
    ensure(k == 2, || format!("one-shot I=1 eps=0.05: {k}, expected 2"))?;
    let k = min_k_required(MinKMode::Adaptive { i_max: 1.0, eps: 0.05, n: 1 }).map_err(e)?;
    ensure(k == 2, || format!("adaptive I=1 eps=0.05 n=1: {k}, expected 2"))
}

fn check_continuity_anchors() -> Result<(), String> {
    close(continuity_bound(0.0, 2, 2).map_err(e)?, 0.0, 0.0, "eps=0")?;
    close(continuity_bound(1.0, 2, 2).map_err(e)?, 3.0, 1e-14, "eps=1")?;
    close(
        continuity_bound(0.5, 2, 4).map_err(e)?,
        1.877443751081734272,
        1e-12,
        "eps=0.5",
    )
}

/// Independent route for D_h^eps: the defining LP over test vectors.
fn dh_via_lp(rho: &[f64], sigma: &[f64], eps: f64) -> f64 {
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
    let sol = solve_lp(&lp).expect("test LP is well formed");
    let beta = -sol.objective_value;
    if beta <= 0.0 { f64::INFINITY } else { -beta.log2() }
}

fn check_np_vs_lp() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..200 {
        let n = rng.gen_range(2..=8usize);
        let rho: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let sigma: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let zr: f64 = rho.iter().sum();
        let zs: f64 = sigma.iter().sum();
        let rho: Vec<f64> = rho.iter().map(|x| x / zr).collect();
        let sigma: Vec<f64> = sigma.iter().map(|x| x / zs).collect();
        let eps = rng.gen_range(0.0..0.5);
        let inst = HypothesisInstance::new(
            FiniteDist::from_linear(&rho).map_err(e)?,
            FiniteDist::from_linear(&sigma).map_err(e)?,
            eps,
        )
        .map_err(e)?;
        let greedy = dh_eps_general(&inst);
        let lp = dh_via_lp(&rho, &sigma, eps);
        ensure((greedy - lp).abs() <= 1e-8, || {
            format!("trial {trial} (n={n}, eps={eps}): greedy {greedy} vs LP {lp}")
        })?;
    }
    Ok(())
}

fn check_type_class_expansion() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..100 {
        let n = rng.gen_range(1..=8u64);
        let p: f64 = rng.gen();
        let t: f64 = rng.gen();
        let eps = rng.gen_range(0.0..0.9);
        let inst = BernoulliProductInstance::new(n, p, t, eps).map_err(e)?;
        let fast = dh_eps_bernoulli_product(&inst).map_err(e)?;
        let slow = dh_eps_general(&expand_bernoulli_product(&inst).map_err(e)?);
        let ok = (fast - slow).abs() <= 1e-10 || (fast.is_infinite() && slow.is_infinite());
        ensure(ok, || {
            format!("trial {trial} (n={n}, p={p}, t={t}, eps={eps}): classes {fast} vs expanded {slow}")
        })?;
    }
    Ok(())
}

fn check_max_divergence_grid() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..30 {
        let t: f64 = rng.gen();
        let d = rng.gen_range(2..6u32);
        let k = rng.gen_range(2..12u64);
        let thr = extendibility_threshold(StateFamily::Isotropic, d, k).map_err(e)?;
        let objective = |q: f64| {
            let r0 = if t == 0.0 { 0.0 } else { t / q };
            let r1 = if t == 1.0 { 0.0 } else { (1.0 - t) / (1.0 - q) };
            r0.max(r1).log2()
        };
        let steps = 20_000;
        let mut grid = objective(thr);
        for i in 1..steps {
            grid = grid.min(objective(thr * i as f64 / steps as f64));
        }
        if t > 0.0 && t <= thr {
            grid = grid.min(objective(t));
        }
        let closed = unextendible_max_divergence_isotropic(t, d, k).map_err(e)?;
        ensure((closed - grid).abs() <= 1e-9, || {
            format!("trial {trial} (t={t}, d={d}, k={k}): closed {closed} vs grid {grid}")
        })?;
    }
    Ok(())
}

fn check_erasure_column_stochastic() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let n = rng.gen_range(1..=30u32);
        let k = rng.gen_range(2..=10u64);
        let m = erasure_constraint_matrix(n, k).map_err(e)?;
        for v in 0..=n as usize {
            let mut total = 0.0;
            for u in 0..=n as usize {
                total += m[u][v] * binomial_f64(n as u64, u as u64)
                    / binomial_f64(n as u64, v as u64);
            }
            ensure((total - 1.0).abs() <= 1e-9, || {
                format!("n={n} k={k} column {v} mass {total}, expected 1")
            })?;
        }
    }
    Ok(())
}

pub fn run_checks(full: bool) -> bool {
    let quick: &[(&str, &str, CheckFn)] = &[
        ("statefam", "threshold-anchors", check_thresholds),
        ("numerics", "divergence-anchors", check_divergence_anchors),
        ("hyptest", "anchor-values", check_hyptest_anchors),
        ("bounds", "rate-rearrangement-anchors", check_rate_anchors),
        ("bounds", "depolarizing-anchors", check_depol_anchors),
        ("bounds", "erasure-matrix-anchor", check_erasure_matrix),
        ("bounds", "erasure-lp-anchors", check_erasure_anchors),
        ("bounds", "limit-anchors", check_tbr_anchors),
        ("bounds", "adaptive-anchors", check_adaptive_anchors),
        ("bounds", "converse-anchors", check_converse_anchors),
        ("bounds", "min-k-anchors", check_min_k_anchors),
        ("bounds", "continuity-anchors", check_continuity_anchors),
    ];
    let full_only: &[(&str, &str, CheckFn)] = &[
        ("hyptest", "np-vs-lp-random", check_np_vs_lp),
        ("hyptest", "type-class-expansion", check_type_class_expansion),
        ("statefam", "max-divergence-grid", check_max_divergence_grid),
        ("bounds", "erasure-column-stochastic", check_erasure_column_stochastic),
    ];

    let mut all_ok = true;
    let selected = quick
        .iter()
        .chain(if full { full_only.iter() } else { [].iter() });
    for (module, property, f) in selected {
        match f() {
            Ok(()) => println!("PASS [{module}] {property}"),
            Err(detail) => {
                all_ok = false;
                println!("FAIL [{module}] {property}: {detail}");
            }
        }
    }
    if all_ok {
        println!("all checks passed");
    } else {
        println!("some checks FAILED");
    }
    all_ok
}
