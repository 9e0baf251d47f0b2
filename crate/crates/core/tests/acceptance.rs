//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! The process exits 0 so that a failing statistical criterion shows up in
//! the report without hiding the rest of the workspace results. Set
//! `HUBNET_ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails, and
//! `HUBNET_ACCEPTANCE_ONLY=5,6` to run a subset.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hubnet::edgeout::{degrees_of_freedom, fit, theta_max, EdgeOutConfig, EdgeOutFit};
use hubnet::harness::{
    evaluate, fp_fn_path, hub_recovery, replicate_seed, run_method, Evaluation, MethodId,
};
use hubnet::numcore::{normals, DenseMatrix, Seed};
use hubnet::par;
use hubnet::penreg::{fold_assignment, lambda_max, wfit, Family, PenaltyForm, PenaltySpec};
use hubnet::simgen::{gen_hub_graph, gen_scenario, HubGraphSpec, HubSetting, ScenarioKind, ScenarioSpec};
use rand::Rng;

struct Report {
    results: Vec<(String, bool)>,
}

impl Report {
    fn record(&mut self, id: &str, pass: bool, detail: String) {
        println!("{} [{id}] {detail}", if pass { "PASS" } else { "FAIL" });
        self.results.push((id.to_string(), pass));
    }
}

fn mean(v: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.into_iter().collect();
    v.iter().sum::<f64>() / v.len() as f64
}

// ---------------------------------------------------------------------------
// Scenario comparisons

struct Outcome {
    eval: Evaluation,
    cvm: f64,
}

struct ScenarioRep {
    hub: Outcome,
    lasso: Outcome,
    /// Hubnet false negative rate along its λ path.
    hub_fn_path: Vec<f64>,
}

const SCENARIO_REPS: usize = 20;
const SCENARIO_SEED: Seed = Seed(7);

fn scenario_reps(kind: ScenarioKind) -> Vec<ScenarioRep> {
    let base = ScenarioSpec::new(kind, 100, 500, 10, Seed(0));
    par::try_map_range(SCENARIO_REPS, |r| -> hubnet::Result<ScenarioRep> {
        let spec = base.with_seed(replicate_seed(SCENARIO_SEED, r));
        let data = gen_scenario(&spec)?;
        let folds = fold_assignment(data.x_train.rows(), 10, spec.seed);
        let run = |m| run_method(m, &data.x_train, &data.y_train, Family::Gaussian, &folds);
        let hub = run(MethodId::HubNet)?;
        let lasso = run(MethodId::Lasso)?;
        Ok(ScenarioRep {
            hub_fn_path: fp_fn_path(&hub.path, &data)?.fn_path,
            hub: Outcome { eval: evaluate(&hub.fit, &data)?, cvm: hub.cv.cvm_min() },
            lasso: Outcome { eval: evaluate(&lasso.fit, &data)?, cvm: lasso.cv.cvm_min() },
        })
    })
    .expect("scenario replicate")
}

fn scenario_a(report: &mut Report) {
    let reps = scenario_reps(ScenarioKind::A);
    let hub_fn = mean(reps.iter().map(|r| r.hub.eval.fn_rate));
    let lasso_fn = mean(reps.iter().map(|r| r.lasso.eval.fn_rate));
    let hub_te = mean(reps.iter().map(|r| r.hub.eval.test_error));
    let lasso_te = mean(reps.iter().map(|r| r.lasso.eval.test_error));
    let hub_fp = mean(reps.iter().map(|r| r.hub.eval.fp));
    report.record(
        "1",
        hub_fn <= 0.05 && lasso_fn >= 0.80 && hub_te < lasso_te,
        format!(
            "scenario a, {SCENARIO_REPS} reps: hubnet fn {hub_fn:.3} (<= 0.05), lasso fn {lasso_fn:.3} (>= 0.80), \
             test error hubnet {hub_te:.3} < lasso {lasso_te:.3}; hubnet fp {hub_fp:.3}"
        ),
    );

    let zero_fn = reps.iter().filter(|r| r.hub.eval.fn_rate == 0.0).count();
    report.record(
        "1b",
        zero_fn >= 18,
        format!("scenario a: hubnet keeps every true feature in {zero_fn}/{SCENARIO_REPS} reps (>= 18)"),
    );
    let cvm_wins = reps.iter().filter(|r| r.hub.cvm < r.lasso.cvm).count();
    report.record(
        "1c",
        cvm_wins * 10 >= SCENARIO_REPS * 8,
        format!("scenario a: hub-weighted cvm below lasso cvm in {cvm_wins}/{SCENARIO_REPS} reps (>= 80%)"),
    );
    let (mut steps, mut monotone) = (0usize, 0usize);
    for r in &reps {
        for w in r.hub_fn_path.windows(2) {
            steps += 1;
            monotone += usize::from(w[1] <= w[0]);
        }
    }
    report.record(
        "1d",
        monotone * 10 >= steps * 9,
        format!("scenario a: hubnet fn non-increasing in {monotone}/{steps} path steps (>= 90%)"),
    );
}

fn scenario_c(report: &mut Report) {
    let reps = scenario_reps(ScenarioKind::C);
    let hub_te = mean(reps.iter().map(|r| r.hub.eval.test_error));
    let lasso_te = mean(reps.iter().map(|r| r.lasso.eval.test_error));
    let hub_cvm = mean(reps.iter().map(|r| r.hub.cvm));
    let lasso_cvm = mean(reps.iter().map(|r| r.lasso.cvm));
    report.record(
        "2",
        hub_te > lasso_te && hub_cvm > lasso_cvm,
        format!(
            "scenario c, {SCENARIO_REPS} reps: test error hubnet {hub_te:.3} > lasso {lasso_te:.3}, \
             cvm hubnet {hub_cvm:.3} > lasso {lasso_cvm:.3}"
        ),
    );
}

fn scenario_d(report: &mut Report) {
    let reps = scenario_reps(ScenarioKind::D);
    let hub_te = mean(reps.iter().map(|r| r.hub.eval.test_error));
    let lasso_te = mean(reps.iter().map(|r| r.lasso.eval.test_error));
    report.record(
        "3",
        hub_te <= lasso_te + 0.2,
        format!("scenario d, {SCENARIO_REPS} reps: test error hubnet {hub_te:.3} <= lasso {lasso_te:.3} + 0.2"),
    );
}

// ---------------------------------------------------------------------------
// Hub recovery

fn hub_recovery_s3(report: &mut Report) {
    let seeds = 50;
    let base = HubGraphSpec { setting: HubSetting::S3, n: 100, p: 200, s: 4, seed: Seed(1) };
    let hits = par::try_map_range(seeds, |r| -> hubnet::Result<bool> {
        let data = gen_hub_graph(&HubGraphSpec { seed: replicate_seed(base.seed, r), ..base })?;
        let curve = hub_recovery(&data, 0.0, None)?;
        Ok(curve.exact_indices(4).into_iter().any(|k| curve.max_hub_rank[k] == 4))
    })
    .expect("recovery run");
    let found = hits.iter().filter(|h| **h).count();
    report.record(
        "4",
        found * 10 >= seeds * 9,
        format!("setting s3, gamma 0, (100,200,4): exact hub support with max rank 4 in {found}/{seeds} seeds (>= 90%)"),
    );
}

// ---------------------------------------------------------------------------
// Edge-out exactness against an accelerated proximal gradient oracle

type Mat = Vec<Vec<f64>>;

fn to_mat(m: &DenseMatrix) -> Mat {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// ½‖X − XB‖²_F plus the row penalties, written without the library.
fn edgeout_objective(x: &Mat, b: &Mat, theta: f64, gamma: f64) -> f64 {
    let p = x[0].len();
    let mut rss = 0.0;
    for row in x {
        for j in 0..p {
            let fitted: f64 = (0..p).map(|k| row[k] * b[k][j]).sum();
            rss += (row[j] - fitted).powi(2);
        }
    }
    let t2 = theta * (1.0 - gamma) * ((p - 1) as f64).sqrt();
    let pen: f64 = b
        .iter()
        .map(|r| {
            let l1: f64 = r.iter().map(|v| v.abs()).sum();
            let l2 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            theta * gamma * l1 + t2 * l2
        })
        .sum();
    0.5 * rss + pen
}

fn gram(x: &Mat) -> Mat {
    let p = x[0].len();
    let mut c = vec![vec![0.0; p]; p];
    for row in x {
        for i in 0..p {
            for j in 0..p {
                c[i][j] += row[i] * row[j];
            }
        }
    }
    c
}

fn top_eigenvalue(c: &Mat) -> f64 {
    let p = c.len();
    let mut v = vec![1.0; p];
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w: Vec<f64> = (0..p).map(|i| (0..p).map(|j| c[i][j] * v[j]).sum()).collect();
        let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        lambda = norm;
        v = w.iter().map(|a| a / norm).collect();
    }
    lambda
}

/// Prox of step·(θγ‖·‖₁ + t2‖·‖₂) on the off-diagonal part of a row.
fn prox_row(row: &mut [f64], skip: usize, l1: f64, l2: f64) {
    for (j, v) in row.iter_mut().enumerate() {
        *v = if j == skip { 0.0 } else { v.signum() * (v.abs() - l1).max(0.0) };
    }
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = if norm <= l2 { 0.0 } else { 1.0 - l2 / norm };
    row.iter_mut().for_each(|v| *v *= scale);
}

/// FISTA with function-value restarts on the zero-diagonal problem.
fn oracle_minimum(x: &Mat, theta: f64, gamma: f64) -> f64 {
    let p = x[0].len();
    let c = gram(x);
    let step = 1.0 / (top_eigenvalue(&c) * 1.0001);
    let t2 = theta * (1.0 - gamma) * ((p - 1) as f64).sqrt();
    let mut b = vec![vec![0.0; p]; p];
    let mut y = b.clone();
    let mut t = 1.0f64;
    let mut best = edgeout_objective(x, &b, theta, gamma);
    for _ in 0..40_000 {
        // Gradient of the smooth part at y: C·Y − C.
        let mut next = y.clone();
        for i in 0..p {
            for j in 0..p {
                let g: f64 = (0..p).map(|k| c[i][k] * y[k][j]).sum::<f64>() - c[i][j];
                next[i][j] = y[i][j] - step * g;
            }
            prox_row(&mut next[i], i, step * theta * gamma, step * t2);
        }
        let obj = edgeout_objective(x, &next, theta, gamma);
        if obj > best {
            // Restart momentum from the current iterate.
            y = b.clone();
            t = 1.0;
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let mom = (t - 1.0) / t_next;
        for i in 0..p {
            for j in 0..p {
                y[i][j] = next[i][j] + mom * (next[i][j] - b[i][j]);
            }
        }
        b = next;
        best = obj;
        t = t_next;
    }
    best
}

/// Largest violation of the row subproblem's subgradient conditions.
fn row_violation(x: &Mat, b: &Mat, i: usize, theta: f64, gamma: f64) -> f64 {
    let (n, p) = (x.len(), x[0].len());
    let a: f64 = (0..n).map(|t| x[t][i].powi(2)).sum();
    let t1 = theta * gamma;
    let t2 = theta * (1.0 - gamma) * ((p - 1) as f64).sqrt();
    let r: Vec<f64> = (0..p)
        .map(|j| {
            if j == i {
                return 0.0;
            }
            (0..n)
                .map(|t| {
                    let others: f64 = (0..p).filter(|&k| k != i).map(|k| x[t][k] * b[k][j]).sum();
                    x[t][i] * (x[t][j] - others)
                })
                .sum()
        })
        .collect();
    let row = &b[i];
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        let shrunk = r
            .iter()
            .map(|v| (v.abs() - t1).max(0.0).powi(2))
            .sum::<f64>()
            .sqrt();
        return (shrunk - t2).max(0.0);
    }
    (0..p)
        .filter(|&j| j != i)
        .map(|j| {
            if row[j] != 0.0 {
                (a * row[j] - r[j] + t1 * row[j].signum() + t2 * row[j] / norm).abs()
            } else {
                (r[j].abs() - t1).max(0.0)
            }
        })
        .fold(row[i].abs(), f64::max)
}

fn random_design(rng: &mut impl Rng, n: usize, p: usize) -> DenseMatrix {
    let mut data = normals(rng, n * p);
    // Uneven column scales so ‖X_i‖² differs across rows.
    for (k, v) in data.iter_mut().enumerate() {
        *v *= 0.5 + (k % p) as f64 * 0.25;
    }
    DenseMatrix::new(n, p, data).unwrap()
}

fn edgeout_fits() -> Vec<(DenseMatrix, EdgeOutFit)> {
    let mut rng = Seed(505).rng(0);
    let settings = [(0.6, 0.5), (0.25, 0.0), (0.1, 1.0), (0.03, 0.3)];
    let mut out = Vec::new();
    for _ in 0..25 {
        let x = random_design(&mut rng, 10, 8);
        for &(frac, gamma) in &settings {
            let theta = frac * theta_max(&x, gamma).unwrap();
            let cfg = EdgeOutConfig::new(theta, gamma).unwrap().with_tolerance(1e-300, 200_000);
            out.push((x.clone(), fit(&x, &cfg).unwrap()));
        }
    }
    out
}

fn edgeout_exactness(report: &mut Report, fits: &[(DenseMatrix, EdgeOutFit)]) {
    let mut worst_obj = 0.0f64;
    let mut worst_row = 0.0f64;
    for (x, f) in fits {
        let xm = to_mat(x);
        let bm = to_mat(&f.b);
        let ours = edgeout_objective(&xm, &bm, f.theta, f.gamma);
        let oracle = oracle_minimum(&xm, f.theta, f.gamma);
        worst_obj = worst_obj.max((ours - oracle).abs());
        for i in 0..xm[0].len() {
            worst_row = worst_row.max(row_violation(&xm, &bm, i, f.theta, f.gamma));
        }
    }
    report.record(
        "5",
        worst_obj <= 1e-6 && worst_row <= 1e-8,
        format!(
            "edge-out, {} random 10x8 instances: max |objective - oracle| {worst_obj:.2e} (<= 1e-6), \
             max row optimality violation {worst_row:.2e} (<= 1e-8)",
            fits.len()
        ),
    );
}

// ---------------------------------------------------------------------------
// Weighted lasso KKT and brute force

fn residual_correlations(x: &DenseMatrix, y: &[f64], beta0: f64, beta: &[f64]) -> (f64, Vec<f64>) {
    let (n, p) = x.shape();
    let resid: Vec<f64> = (0..n)
        .map(|i| y[i] - beta0 - x.row(i).iter().zip(beta).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    let mean_resid = resid.iter().sum::<f64>() / n as f64;
    let corr = (0..p)
        .map(|j| (0..n).map(|i| x.get(i, j) * resid[i]).sum::<f64>() / n as f64)
        .collect();
    (mean_resid, corr)
}

fn kkt_violation(x: &DenseMatrix, y: &[f64], spec: &PenaltySpec, beta0: f64, beta: &[f64]) -> f64 {
    let (mean_resid, corr) = residual_correlations(x, y, beta0, beta);
    let mut worst = mean_resid.abs();
    for j in 0..beta.len() {
        let w = spec.weights[j];
        if w.is_infinite() {
            continue;
        }
        let bound = spec.lambda * w;
        let v = if beta[j] != 0.0 {
            (corr[j] - bound * beta[j].signum()).abs()
        } else {
            (corr[j].abs() - bound).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

fn random_problem(rng: &mut impl Rng, n: usize, p: usize, inf_share: f64) -> (DenseMatrix, Vec<f64>, Vec<f64>) {
    let x = DenseMatrix::new(n, p, normals(rng, n * p)).unwrap();
    let noise = normals(rng, n);
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let row = x.row(i);
            1.5 * row[0] - row[1.min(p - 1)] + 0.5 + noise[i]
        })
        .collect();
    let w: Vec<f64> = (0..p)
        .map(|_| if rng.random::<f64>() < inf_share { f64::INFINITY } else { rng.random_range(0.2..3.0) })
        .collect();
    (x, y, w)
}

/// Solves the small dense system `m z = v` by Gaussian elimination.
fn solve_small(mut m: Vec<Vec<f64>>, mut v: Vec<f64>) -> Option<Vec<f64>> {
    let k = v.len();
    for c in 0..k {
        let piv = (c..k).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[piv][c].abs() < 1e-12 {
            return None;
        }
        m.swap(c, piv);
        v.swap(c, piv);
        for r in c + 1..k {
            let f = m[r][c] / m[c][c];
            for cc in c..k {
                m[r][cc] -= f * m[c][cc];
            }
            v[r] -= f * v[c];
        }
    }
    let mut z = vec![0.0; k];
    for c in (0..k).rev() {
        let s: f64 = (c + 1..k).map(|cc| m[c][cc] * z[cc]).sum();
        z[c] = (v[c] - s) / m[c][c];
    }
    Some(z)
}

fn lasso_objective(x: &DenseMatrix, y: &[f64], spec: &PenaltySpec, beta0: f64, beta: &[f64]) -> f64 {
    let n = y.len();
    let rss: f64 = (0..n)
        .map(|i| (y[i] - beta0 - x.row(i).iter().zip(beta).map(|(a, b)| a * b).sum::<f64>()).powi(2))
        .sum();
    let pen: f64 = beta.iter().zip(&spec.weights).filter(|(b, _)| **b != 0.0).map(|(b, w)| w * b.abs()).sum();
    rss / (2.0 * n as f64) + spec.lambda * pen
}

/// Exhaustive search over the 27 sign patterns of a 3-feature lasso.
fn brute_force3(x: &DenseMatrix, y: &[f64], spec: &PenaltySpec) -> Vec<f64> {
    let n = y.len();
    let xbar: Vec<f64> = (0..3).map(|j| (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64).collect();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let xc = |i: usize, j: usize| x.get(i, j) - xbar[j];
    let mut best = (f64::INFINITY, vec![0.0; 3]);
    for code in 0..27 {
        let signs: Vec<i32> = (0..3).map(|j| (code / 3i32.pow(j)) % 3 - 1).collect();
        let active: Vec<usize> = (0..3).filter(|&j| signs[j] != 0).collect();
        if active.iter().any(|&j| spec.weights[j].is_infinite()) {
            continue;
        }
        let mut beta = vec![0.0; 3];
        if !active.is_empty() {
            let m: Vec<Vec<f64>> = active
                .iter()
                .map(|&a| active.iter().map(|&b| (0..n).map(|i| xc(i, a) * xc(i, b)).sum::<f64>() / n as f64).collect())
                .collect();
            let v: Vec<f64> = active
                .iter()
                .map(|&a| {
                    (0..n).map(|i| xc(i, a) * (y[i] - ybar)).sum::<f64>() / n as f64
                        - spec.lambda * spec.weights[a] * signs[a] as f64
                })
                .collect();
            let Some(z) = solve_small(m, v) else { continue };
            if active.iter().zip(&z).any(|(&a, &zv)| zv * signs[a] as f64 <= 0.0) {
                continue;
            }
            for (&a, zv) in active.iter().zip(z) {
                beta[a] = zv;
            }
        }
        let beta0 = ybar - (0..3).map(|j| xbar[j] * beta[j]).sum::<f64>();
        let obj = lasso_objective(x, y, spec, beta0, &beta);
        if obj < best.0 {
            best = (obj, beta);
        }
    }
    best.1
}

fn weighted_lasso(report: &mut Report) {
    let mut rng = Seed(606).rng(0);
    let mut worst_kkt = 0.0f64;
    let mut inf_nonzero = 0usize;
    let mut inf_total = 0usize;
    for _ in 0..500 {
        let n = rng.random_range(15..60);
        let p = rng.random_range(2..20);
        let (x, y, w) = random_problem(&mut rng, n, p, 0.15);
        let form = PenaltyForm::new(1.0, w.clone());
        let lmax = lambda_max(&x, &y, &form).unwrap();
        let lambda = if lmax > 0.0 { lmax * rng.random_range(0.01..1.2) } else { 0.1 };
        let spec = form.at(lambda);
        let f = wfit(&x, &y, &spec, Family::Gaussian).unwrap();
        worst_kkt = worst_kkt.max(kkt_violation(&x, &y, &spec, f.beta0, &f.beta));
        for j in 0..p {
            if w[j].is_infinite() {
                inf_total += 1;
                inf_nonzero += usize::from(f.beta[j] != 0.0);
            }
        }
    }
    let mut worst_brute = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(12..40);
        let (x, y, w) = random_problem(&mut rng, n, 3, 0.1);
        let form = PenaltyForm::new(1.0, w);
        let lmax = lambda_max(&x, &y, &form).unwrap();
        let spec = form.at(lmax.max(1e-3) * rng.random_range(0.02..0.9));
        let f = wfit(&x, &y, &spec, Family::Gaussian).unwrap();
        let oracle = brute_force3(&x, &y, &spec);
        for j in 0..3 {
            worst_brute = worst_brute.max((f.beta[j] - oracle[j]).abs());
        }
    }
    report.record(
        "6",
        worst_kkt <= 1e-6 && worst_brute <= 1e-4 && inf_nonzero == 0,
        format!(
            "weighted lasso: max KKT residual {worst_kkt:.2e} over 500 problems (<= 1e-6), \
             max 3-feature brute-force gap {worst_brute:.2e} (<= 1e-4), {inf_nonzero}/{inf_total} infinite-weight coefficients nonzero"
        ),
    );
}

// ---------------------------------------------------------------------------
// GCV df bounds

fn df_bounds(report: &mut Report, fits: &[(DenseMatrix, EdgeOutFit)]) {
    let mut all = fits.to_vec();
    // Larger fits along a grid, every γ, on hub-structured data.
    let data = gen_scenario(&ScenarioSpec::new(ScenarioKind::A, 40, 60, 4, Seed(12))).unwrap();
    for gamma in [0.0, 0.5, 1.0] {
        let tmax = theta_max(&data.x_train, gamma).unwrap();
        for frac in [1.0, 0.3, 0.05, 0.01] {
            let cfg = EdgeOutConfig::new(frac * tmax, gamma).unwrap();
            all.push((data.x_train.clone(), fit(&data.x_train, &cfg).unwrap()));
        }
    }
    let mut violations = 0;
    let mut exact_nnz = 0;
    let mut lasso_only = 0;
    for (x, f) in &all {
        let df = degrees_of_freedom(x, &f.b, f.theta, f.gamma).unwrap();
        let nnz = f.b.data().iter().filter(|v| **v != 0.0).count() as f64;
        if !(0.0..=nnz).contains(&df) {
            violations += 1;
        }
        if f.gamma == 1.0 {
            lasso_only += 1;
            exact_nnz += usize::from(df == nnz);
        }
    }
    report.record(
        "7",
        violations == 0 && exact_nnz == lasso_only,
        format!(
            "gcv df: {violations}/{} fits outside [0, nnz], gamma = 1 df equals nnz in {exact_nnz}/{lasso_only}",
            all.len()
        ),
    );
}

// ---------------------------------------------------------------------------
// CLI determinism

fn cli_output(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_hubnet"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .status()
        .expect("spawn hubnet");
    assert!(status.success(), "hubnet {args:?} failed");
    std::fs::read(out).expect("read CLI output")
}

fn cli_determinism(report: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let bench = [
        "bench", "--scenario", "a", "--n", "40", "--p", "30", "--s", "3", "--reps", "2", "--seed", "7",
        "--folds", "5",
    ];
    let recover = ["recover", "--setting", "s3", "--n", "50", "--p", "30", "--s", "2", "--reps", "2"];
    let b1 = cli_output(dir.path(), "b1.csv", &bench);
    let b2 = cli_output(dir.path(), "b2.csv", &bench);
    let r1 = cli_output(dir.path(), "r1.csv", &recover);
    let r2 = cli_output(dir.path(), "r2.csv", &recover);
    report.record(
        "8",
        !b1.is_empty() && b1 == b2 && !r1.is_empty() && r1 == r2,
        format!(
            "cli determinism: bench rerun identical {} ({} bytes), recover rerun identical {} ({} bytes)",
            b1 == b2,
            b1.len(),
            r1 == r2,
            r1.len()
        ),
    );
}

fn main() {
    let mut report = Report { results: Vec::new() };
    let start = Instant::now();
    let only: Option<Vec<String>> = std::env::var("HUBNET_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').map(|t| t.trim().to_string()).collect());
    let wanted = |id: &str| only.as_ref().is_none_or(|o| o.iter().any(|t| t == id));
    if wanted("5") || wanted("7") {
        let fits = edgeout_fits();
        if wanted("5") {
            edgeout_exactness(&mut report, &fits);
        }
        if wanted("7") {
            df_bounds(&mut report, &fits);
        }
    }
    if wanted("6") {
        weighted_lasso(&mut report);
    }
    if wanted("8") {
        cli_determinism(&mut report);
    }
    if wanted("4") {
        hub_recovery_s3(&mut report);
    }
    if wanted("1") {
        scenario_a(&mut report);
    }
    if wanted("2") {
        scenario_c(&mut report);
    }
    if wanted("3") {
        scenario_d(&mut report);
    }

    let failed: Vec<&str> = report.results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    println!(
        "acceptance: {}/{} passed in {:.0}s{}",
        report.results.len() - failed.len(),
        report.results.len(),
        start.elapsed().as_secs_f64(),
        if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
    );
    if !failed.is_empty() && std::env::var_os("HUBNET_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
