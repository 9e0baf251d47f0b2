//! Method runners, evaluation metrics and Monte Carlo comparisons.

mod metrics;
mod recovery;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::edgeout::{hub_weights, select_theta_and_fit, EdgeOutFit, HubWeights, ThetaMethod, ThetaSelection};
use crate::error::{Error, Result};
use crate::numcore::{DenseMatrix, Seed};
use crate::penreg::{cross_validate, fold_assignment, univariate_weights, CvReport, Family, FitPath, PenalizedFit, PenaltyForm};
use crate::simgen::{gen_scenario, ScenarioSpec, SimData};
use crate::par;

pub use metrics::{evaluate, fp_fn_path, screening_fp, summarize, Evaluation, MetricsRow, PathCurve, Screening};
pub use recovery::{hub_recovery, hub_ranks, RecoveryCurve};

pub const DEFAULT_CV_FOLDS: usize = 10;
/// Edge-out mix used by the hub-weighted method.
pub const HUBNET_GAMMA: f64 = 0.5;
pub const ELASTICNET_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodId {
    AdaptiveLasso,
    #[serde(rename = "elasticnet")]
    ElasticNet,
    #[serde(rename = "hubnet")]
    HubNet,
    Lasso,
}

impl MethodId {
    /// Every method, in canonical (name) order.
    pub const ALL: [MethodId; 4] = [
        MethodId::AdaptiveLasso,
        MethodId::ElasticNet,
        MethodId::HubNet,
        MethodId::Lasso,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodId::AdaptiveLasso => "adaptive_lasso",
            MethodId::ElasticNet => "elasticnet",
            MethodId::HubNet => "hubnet",
            MethodId::Lasso => "lasso",
        }
    }

    /// Parses a comma-separated list, returning it deduplicated in canonical
    /// order.
    pub fn parse_list(s: &str) -> Result<Vec<MethodId>> {
        let mut out: Vec<MethodId> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        if out.is_empty() {
            return Err(Error::InvalidSpec("empty method list".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodId::ALL
            .into_iter()
            .find(|m| m.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidSpec(format!("unknown method {s:?}")))
    }
}

/// Unsupervised stage of the hub-weighted method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HubStage {
    pub selection: ThetaSelection,
    pub edgeout: EdgeOutFit,
    pub weights: HubWeights,
}

/// Everything one method produced on one training set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRun {
    pub method: MethodId,
    pub fit: PenalizedFit,
    pub cv: CvReport,
    pub path: FitPath,
    pub hub: Option<HubStage>,
}

/// Edge-out at the GCV-chosen θ (γ = 0.5), then hub weights.
pub fn hub_stage(x: &DenseMatrix) -> Result<HubStage> {
    let (selection, edgeout) = select_theta_and_fit(x, HUBNET_GAMMA, ThetaMethod::Gcv, None)?;
    let weights = hub_weights(&edgeout);
    if weights.w.iter().all(|w| w.is_infinite()) {
        return Err(Error::AllWeightsInfinite);
    }
    Ok(HubStage { selection, edgeout, weights })
}

/// Runs one method on standardized `x` with the given CV fold labels.
pub fn run_method(
    method: MethodId,
    x: &DenseMatrix,
    y: &[f64],
    family: Family,
    folds: &[usize],
) -> Result<MethodRun> {
    let p = x.cols();
    let (form, hub) = match method {
        MethodId::Lasso => (PenaltyForm::uniform(1.0, p), None),
        MethodId::ElasticNet => (PenaltyForm::uniform(ELASTICNET_ALPHA, p), None),
        MethodId::AdaptiveLasso => (PenaltyForm::new(1.0, univariate_weights(x, y)?), None),
        MethodId::HubNet => {
            let stage = hub_stage(x)?;
            (PenaltyForm::new(1.0, stage.weights.w.clone()), Some(stage))
        }
    };
    let (cv, path) = cross_validate(x, y, &form, family, folds)?;
    Ok(MethodRun {
        method,
        fit: cv.chosen_fit.clone(),
        cv,
        path,
        hub,
    })
}

/// The hub-weighted pipeline: edge-out hub weights feeding a
/// cross-validated weighted lasso. `x` must be standardized.
pub fn run_hubnet(x: &DenseMatrix, y: &[f64], family: Family, folds: &[usize]) -> Result<MethodRun> {
    run_method(MethodId::HubNet, x, y, family, folds)
}

/// Per-replicate outcome for one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub method: MethodId,
    pub cvm: f64,
    pub eval: Evaluation,
}

/// Seed of replicate `rep` under a base seed.
pub fn replicate_seed(seed: Seed, rep: usize) -> Seed {
    seed.derive(rep as u64)
}

/// Runs `methods` on one fresh replicate. All methods share the data and the
/// fold labels.
pub fn run_replicate(
    spec: &ScenarioSpec,
    methods: &[MethodId],
    folds_k: usize,
) -> Result<Vec<ReplicateResult>> {
    let data = gen_scenario(spec)?;
    let folds = fold_assignment(data.x_train.rows(), folds_k, spec.seed);
    methods
        .iter()
        .map(|&m| {
            let run = run_method(m, &data.x_train, &data.y_train, Family::Gaussian, &folds)?;
            Ok(ReplicateResult {
                method: m,
                cvm: run.cv.cvm_min(),
                eval: evaluate(&run.fit, &data)?,
            })
        })
        .collect()
}

/// Monte Carlo comparison over `reps` fresh replicates of `spec`; replicate
/// `r` uses seed `replicate_seed(seed, r)`. Rows come out in canonical
/// method order.
pub fn compare(
    spec: &ScenarioSpec,
    methods: &[MethodId],
    reps: usize,
    seed: Seed,
    folds_k: usize,
) -> Result<Vec<MetricsRow>> {
    let per_rep = compare_replicates(spec, methods, reps, seed, folds_k)?;
    Ok(summarize(&per_rep))
}

/// The raw per-replicate results behind [`compare`].
pub fn compare_replicates(
    spec: &ScenarioSpec,
    methods: &[MethodId],
    reps: usize,
    seed: Seed,
    folds_k: usize,
) -> Result<Vec<Vec<ReplicateResult>>> {
    if reps == 0 {
        return Err(Error::InvalidSpec("reps must be at least 1".into()));
    }
    if folds_k < 2 || folds_k > spec.n {
        return Err(Error::InvalidSpec(format!("{folds_k} folds with n = {}", spec.n)));
    }
    spec.validate()?;
    let mut methods = methods.to_vec();
    methods.sort();
    methods.dedup();
    par::try_map_range(reps, |r| {
        run_replicate(&spec.with_seed(replicate_seed(seed, r)), &methods, folds_k)
    })
}

/// Training data together with a method's fitted path, for path metrics.
pub fn path_for(data: &SimData, method: MethodId, folds_k: usize, seed: Seed) -> Result<MethodRun> {
    let folds = fold_assignment(data.x_train.rows(), folds_k, seed);
    run_method(method, &data.x_train, &data.y_train, Family::Gaussian, &folds)
}
