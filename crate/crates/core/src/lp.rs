//! Small dense linear-programming solver (two-phase primal simplex).
//!
//! Deterministic by construction: steepest-coefficient entering with a
//! switch to Bland's anti-cycling rule on degenerate stalls, fixed iteration
//! order, no randomized perturbation. Sized for the modest problems produced
//! by the erasure bound and for cross-checking `hyptest`.

use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-8;
const MAX_ITERS: usize = 200_000;
// consecutive pivots without objective progress before switching to Bland
const STALL_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Maximize `objective . x` subject to the constraints and per-variable
/// bounds. Lower bounds must be finite; upper bounds may be infinite.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective_value: f64,
    pub primal: Vec<f64>,
    /// Largest violation of the original constraints and bounds at `primal`.
    pub max_primal_residual: f64,
    /// |primal objective - dual objective| reconstructed from reduced costs.
    pub duality_gap_estimate: f64,
}

/// Largest violation of the constraints and bounds of `lp` at `primal`.
pub fn check_solution(lp: &LinearProgram, primal: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for c in &lp.constraints {
        let lhs: f64 = c.coeffs.iter().zip(primal).map(|(a, x)| a * x).sum();
        let viol = match c.relation {
            Relation::Le => lhs - c.rhs,
            Relation::Ge => c.rhs - lhs,
            Relation::Eq => (lhs - c.rhs).abs(),
        };
        worst = worst.max(viol);
    }
    for (&x, &(lo, hi)) in primal.iter().zip(&lp.bounds) {
        worst = worst.max(lo - x);
        if hi.is_finite() {
            worst = worst.max(x - hi);
        }
    }
    worst
}

fn validate(lp: &LinearProgram) -> Result<()> {
    if lp.objective.len() != lp.num_vars {
        return Err(Error::DimensionMismatch {
            context: "objective length vs num_vars",
            expected: lp.num_vars,
            got: lp.objective.len(),
        });
    }
    if lp.bounds.len() != lp.num_vars {
        return Err(Error::DimensionMismatch {
            context: "bounds length vs num_vars",
            expected: lp.num_vars,
            got: lp.bounds.len(),
        });
    }
    for &c in &lp.objective {
        if !c.is_finite() {
            return Err(Error::param("objective", c, "must be finite"));
        }
    }
    for &(lo, hi) in &lp.bounds {
        if !lo.is_finite() {
            return Err(Error::param("bounds", lo, "lower bound must be finite"));
        }
        if hi.is_nan() || hi < lo {
            return Err(Error::param("bounds", hi, "upper bound must be >= lower"));
        }
    }
    for c in &lp.constraints {
        if c.coeffs.len() != lp.num_vars {
            return Err(Error::DimensionMismatch {
                context: "constraint coefficients vs num_vars",
                expected: lp.num_vars,
                got: c.coeffs.len(),
            });
        }
        if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::param("constraint", c.rhs, "must be finite"));
        }
    }
    Ok(())
}

/// Rows in standard form: variables shifted to z = x - lo >= 0, every rhs
/// normalized nonnegative.
struct Standard {
    // augmented rows, width ncols + 1 (rhs last)
    tab: Vec<Vec<f64>>,
    basis: Vec<usize>,
    rhs_norm: Vec<f64>,
    // per-row column of the slack/surplus (None for equality rows)
    slack_col: Vec<Option<usize>>,
    // true when the row carries a surplus (-1) rather than a slack (+1)
    surplus: Vec<bool>,
    art_col: Vec<Option<usize>>,
    n_struct: usize,
    n_nonart: usize,
    ncols: usize,
    // per-variable equilibration factor: internal w_j = col_scale[j] * (x_j - lo_j)
    col_scale: Vec<f64>,
}

fn build_standard(lp: &LinearProgram) -> Standard {
    let n = lp.num_vars;
    let lo: Vec<f64> = lp.bounds.iter().map(|b| b.0).collect();

    // assemble shifted rows (coeffs, relation, rhs)
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for c in &lp.constraints {
        let shift: f64 = c.coeffs.iter().zip(&lo).map(|(a, l)| a * l).sum();
        rows.push((c.coeffs.clone(), c.relation, c.rhs - shift));
    }
    // equilibrate columns: substitute w_j = s_j z_j with s_j the largest
    // coefficient magnitude in the column, so rows whose coefficients span
    // many orders of magnitude (binomial weights) stay pivotable
    let mut col_scale = vec![1.0f64; n];
    for (j, s) in col_scale.iter_mut().enumerate() {
        let m = rows.iter().fold(0.0f64, |m, r| m.max(r.0[j].abs()));
        if m > 0.0 {
            *s = m;
        }
    }
    for (coeffs, _, _) in rows.iter_mut() {
        for (a, &s) in coeffs.iter_mut().zip(&col_scale) {
            *a /= s;
        }
    }
    for (j, &(l, h)) in lp.bounds.iter().enumerate() {
        if h.is_finite() {
            let mut coeffs = vec![0.0; n];
            coeffs[j] = 1.0;
            rows.push((coeffs, Relation::Le, (h - l) * col_scale[j]));
        }
    }
    // equilibrate: scale each row to unit max coefficient (exact solution
    // preserved; keeps reduced-cost tolerances meaningful for rows carrying
    // large binomial coefficients)
    for (coeffs, _, rhs) in rows.iter_mut() {
        let scale = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if scale > 0.0 && scale != 1.0 {
            for a in coeffs.iter_mut() {
                *a /= scale;
            }
            *rhs /= scale;
        }
    }
    // normalize rhs >= 0
    for (coeffs, rel, rhs) in rows.iter_mut() {
        if *rhs < 0.0 {
            for a in coeffs.iter_mut() {
                *a = -*a;
            }
            *rhs = -*rhs;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows
        .iter()
        .filter(|r| !matches!(r.1, Relation::Eq))
        .count();
    let n_art = rows
        .iter()
        .filter(|r| !matches!(r.1, Relation::Le))
        .count();
    let n_nonart = n + n_slack;
    let ncols = n_nonart + n_art;

    let mut tab = vec![vec![0.0; ncols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut slack_col = vec![None; m];
    let mut surplus = vec![false; m];
    let mut art_col = vec![None; m];
    let mut next_slack = n;
    let mut next_art = n_nonart;
    let mut rhs_norm = Vec::with_capacity(m);

    for (i, (coeffs, rel, rhs)) in rows.into_iter().enumerate() {
        tab[i][..n].copy_from_slice(&coeffs);
        tab[i][ncols] = rhs;
        rhs_norm.push(rhs);
        match rel {
            Relation::Le => {
                tab[i][next_slack] = 1.0;
                slack_col[i] = Some(next_slack);
                basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                tab[i][next_slack] = -1.0;
                slack_col[i] = Some(next_slack);
                surplus[i] = true;
                next_slack += 1;
                tab[i][next_art] = 1.0;
                art_col[i] = Some(next_art);
                basis[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                tab[i][next_art] = 1.0;
                art_col[i] = Some(next_art);
                basis[i] = next_art;
                next_art += 1;
            }
        }
    }

    Standard {
        tab,
        basis,
        rhs_norm,
        slack_col,
        surplus,
        art_col,
        n_struct: n,
        n_nonart,
        ncols,
        col_scale,
    }
}

fn pivot(tab: &mut [Vec<f64>], obj: &mut [f64], basis: &mut [usize], r: usize, c: usize) {
    let p = tab[r][c];
    for v in tab[r].iter_mut() {
        *v /= p;
    }
    tab[r][c] = 1.0;
    let prow = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let f = row[c];
        if f != 0.0 {
            for (v, &pv) in row.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            row[c] = 0.0;
        }
    }
    let f = obj[c];
    if f != 0.0 {
        for (v, &pv) in obj.iter_mut().zip(&prow) {
            *v -= f * pv;
        }
        obj[c] = 0.0;
    }
    basis[r] = c;
}

enum RunOutcome {
    Optimal,
    Unbounded,
}

/// Ratio test for entering column `c`; picks the leaving row, or None when
/// the column is an unblocked ray.
fn leaving_row(tab: &[Vec<f64>], basis: &[usize], c: usize, bland: bool) -> Option<usize> {
    let ncols = tab.first()?.len() - 1;
    let mut best = f64::INFINITY;
    for row in tab.iter() {
        let a = row[c];
        if a > PIVOT_TOL {
            best = best.min(row[ncols] / a);
        }
    }
    if !best.is_finite() {
        return None;
    }
    // among rows attaining the minimum ratio: lowest basic index under Bland
    // (anti-cycling), otherwise the largest pivot magnitude (tiny pivots on
    // degenerate rows wreck the tableau)
    let mut leave: Option<usize> = None;
    for (i, row) in tab.iter().enumerate() {
        let a = row[c];
        if a > PIVOT_TOL && row[ncols] / a <= best + 1e-12 {
            match leave {
                None => leave = Some(i),
                Some(l) => {
                    let better = if bland {
                        basis[i] < basis[l]
                    } else {
                        let al = tab[l][c];
                        a > al || (a == al && basis[i] < basis[l])
                    };
                    if better {
                        leave = Some(i);
                    }
                }
            }
        }
    }
    leave
}

/// Jiggles every rhs upward by a tiny deterministic amount to break the
/// degenerate ties sustaining a cycle. The reported solution is immune: the
/// final basic values are recomputed from the pristine data afterwards.
fn perturb_rhs(tab: &mut [Vec<f64>], seed: &mut u64) {
    let Some(width) = tab.first().map(|r| r.len()) else {
        return;
    };
    let ncols = width - 1;
    for row in tab.iter_mut() {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let u = (*seed >> 11) as f64 / (1u64 << 53) as f64;
        row[ncols] += 1e-10 * (0.5 + u);
    }
}

/// Primal simplex. Enters on the most negative reduced cost, switching to
/// Bland's lowest-index rule after `STALL_LIMIT` degenerate pivots and
/// perturbing the rhs when even that fails to progress. With `bounded_below`
/// set (phase 1), unblocked improving columns are treated as numerical noise
/// and skipped instead of being reported as rays.
fn run_simplex(
    tab: &mut Vec<Vec<f64>>,
    obj: &mut [f64],
    basis: &mut [usize],
    entering_limit: usize,
    bounded_below: bool,
) -> Result<RunOutcome> {
    let ncols = obj.len() - 1;
    let mut stall = 0usize;
    let mut last_obj = obj[ncols];
    let mut seed = 0x9e3779b97f4a7c15u64;
    for _ in 0..MAX_ITERS {
        if stall > 4 * STALL_LIMIT {
            perturb_rhs(tab, &mut seed);
            stall = 0;
        }
        let bland = stall > STALL_LIMIT;
        let mut cols: Vec<usize> = (0..entering_limit)
            .filter(|&j| obj[j] < -COST_TOL)
            .collect();
        if cols.is_empty() {
            return Ok(RunOutcome::Optimal);
        }
        if !bland {
            cols.sort_by(|&a, &b| obj[a].partial_cmp(&obj[b]).unwrap().then(a.cmp(&b)));
        }
        let mut pivoted = false;
        for &c in &cols {
            match leaving_row(tab, basis, c, bland) {
                Some(r) => {
                    pivot(tab, obj, basis, r, c);
                    pivoted = true;
                    break;
                }
                None if bounded_below => continue,
                None => return Ok(RunOutcome::Unbounded),
            }
        }
        if !pivoted {
            // every improving direction is an unblocked ray; impossible for a
            // bounded-below objective, so the remaining reduced costs are noise
            return Ok(RunOutcome::Optimal);
        }
        if (obj[ncols] - last_obj).abs() <= 1e-12 * (1.0 + last_obj.abs()) {
            stall += 1;
        } else {
            stall = 0;
            last_obj = obj[ncols];
        }
    }
    Err(Error::LpFailure("simplex iteration limit reached".into()))
}

/// Solves B z_B = b from the pristine tableau for the given basis, purging
/// the floating-point drift the pivot updates accumulate. Gauss-Jordan with
/// partial pivoting; None when the basis matrix is numerically singular.
fn refine_basic_values(tab0: &[Vec<f64>], basis: &[usize]) -> Option<Vec<f64>> {
    let m = basis.len();
    let ncols = tab0[0].len() - 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, &bj) in basis.iter().enumerate() {
            row[j] = tab0[i][bj];
        }
        row[m] = tab0[i][ncols];
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&r1, &r2| {
            a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap()
        })?;
        if a[piv][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, piv);
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col {
                continue;
            }
            let f = row[col] / prow[col];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(&prow).skip(col) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
    }
    Some((0..m).map(|i| a[i][m] / a[i][i]).collect())
}

fn failed(status: LpStatus) -> LpSolution {
    LpSolution {
        status,
        objective_value: match status {
            LpStatus::Unbounded => f64::INFINITY,
            _ => f64::NAN,
        },
        primal: Vec::new(),
        max_primal_residual: f64::NAN,
        duality_gap_estimate: f64::NAN,
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    validate(lp)?;
    let mut s = build_standard(lp);
    let ncols = s.ncols;
    // pristine copy for post-hoc refinement of basic values
    let mut tab0 = s.tab.clone();

    // phase 1: minimize the artificial total
    if s.n_nonart < ncols {
        let mut obj = vec![0.0; ncols + 1];
        for j in s.n_nonart..ncols {
            obj[j] = 1.0;
        }
        for (i, &b) in s.basis.iter().enumerate() {
            if b >= s.n_nonart {
                for (v, &tv) in obj.iter_mut().zip(&s.tab[i]) {
                    *v -= tv;
                }
            }
        }
        // artificials may leave but never re-enter; the artificial total is
        // bounded below by zero, so rays are noise
        match run_simplex(&mut s.tab, &mut obj, &mut s.basis, s.n_nonart, true)? {
            RunOutcome::Unbounded => {
                return Err(Error::LpFailure("phase 1 reported unbounded".into()))
            }
            RunOutcome::Optimal => {}
        }
        let art_total = match refine_basic_values(&tab0, &s.basis) {
            Some(z) => s
                .basis
                .iter()
                .zip(&z)
                .filter(|(&b, _)| b >= s.n_nonart)
                .map(|(_, &v)| v.max(0.0))
                .sum(),
            None => -obj[ncols],
        };
        if art_total > FEAS_TOL {
            return Ok(failed(LpStatus::Infeasible));
        }
        // drive remaining artificials out of the basis; drop redundant rows
        let mut drop_rows = Vec::new();
        for i in 0..s.tab.len() {
            if s.basis[i] >= s.n_nonart {
                let col = (0..s.n_nonart).find(|&j| s.tab[i][j].abs() > PIVOT_TOL);
                match col {
                    Some(j) => pivot(&mut s.tab, &mut obj, &mut s.basis, i, j),
                    None => drop_rows.push(i),
                }
            }
        }
        for &i in drop_rows.iter().rev() {
            s.tab.remove(i);
            s.basis.remove(i);
            s.rhs_norm.remove(i);
            s.slack_col.remove(i);
            s.surplus.remove(i);
            s.art_col.remove(i);
            tab0.remove(i);
        }
    }

    // phase 2: minimize the negated (shifted) objective in the scaled variables
    let cmin: Vec<f64> = lp
        .objective
        .iter()
        .zip(&s.col_scale)
        .map(|(c, sc)| -c / sc)
        .collect();
    let mut obj = vec![0.0; ncols + 1];
    obj[..s.n_struct].copy_from_slice(&cmin);
    for (i, &b) in s.basis.iter().enumerate() {
        if b < s.n_struct && cmin[b] != 0.0 {
            let f = cmin[b];
            for (v, &tv) in obj.iter_mut().zip(&s.tab[i]) {
                *v -= f * tv;
            }
            obj[b] = 0.0;
        }
    }
    match run_simplex(&mut s.tab, &mut obj, &mut s.basis, s.n_nonart, false)? {
        RunOutcome::Unbounded => return Ok(failed(LpStatus::Unbounded)),
        RunOutcome::Optimal => {}
    }

    // recover the primal point, refined against the pristine data
    let refined = refine_basic_values(&tab0, &s.basis);
    let mut z = vec![0.0; s.n_struct];
    for (i, &b) in s.basis.iter().enumerate() {
        if b < s.n_struct {
            z[b] = match &refined {
                Some(zb) => zb[i],
                None => s.tab[i][ncols],
            };
        }
    }
    let primal: Vec<f64> = z
        .iter()
        .zip(&s.col_scale)
        .zip(&lp.bounds)
        .map(|((wj, sc), &(lo, _))| wj / sc + lo)
        .collect();
    let objective_value: f64 = lp
        .objective
        .iter()
        .zip(&primal)
        .map(|(c, x)| c * x)
        .sum();

    // duals read off the reduced costs of each row's original identity column
    let v_int = -obj[ncols];
    let mut dual_obj = 0.0;
    for i in 0..s.tab.len() {
        let y = match (s.slack_col[i], s.art_col[i]) {
            (Some(j), _) if !s.surplus[i] => -obj[j],
            (Some(j), _) => obj[j],
            (None, Some(j)) => -obj[j],
            (None, None) => unreachable!("every row has a slack or an artificial"),
        };
        dual_obj += y * s.rhs_norm[i];
    }
    let duality_gap_estimate = (v_int - dual_obj).abs();

    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value,
        max_primal_residual: check_solution(lp, &primal),
        primal,
        duality_gap_estimate,
    })
}
