//! Synthetic data with known hub structure and known response support.
//!
//! Supervised scenarios:
//!
//! * `A` favourable: `y = X_S 1 + ε`; a random 20% subset T of the other
//!   features follows `X_j = X_S Γ_j + ε_j` with `Γ ~ N(0, 4)`.
//! * `B` adversarial: hubs S₂ drive T with `Γ ~ N(0, 0.25)`; the response
//!   uses S₁, an s-subset of T.
//! * `C` extreme adversarial: every non-hub feature is driven by S₂; the
//!   response uses the next s features.
//! * `D` neutral: `X ~ N(0, Σ)` with a random Σ of condition number 10.
//! * `Fig1`/`Fig2`: every non-hub feature is driven by the hubs; the
//!   response uses the hubs (`Fig1`) or the three features after them
//!   (`Fig2`).
//!
//! Hub graph settings (response free): `S1` a single hub precision matrix,
//! `S2` two hub blocks, `S3` a truncated-normal linear hub model.
//!
//! Feature indices are 0-based. Training features are standardized to unit
//! sample variance; test features reuse the training means and scales.

use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::{
    gen_positive_def, normal, sample_gaussian_with, spd_inverse, standardize,
    symmetric_eigenvalues, DenseMatrix, Seed,
};

// Independent random streams per purpose.
const STRUCTURE_STREAM: u64 = 1;
const TRAIN_STREAM: u64 = 2;
const TEST_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    A,
    B,
    C,
    D,
    Fig1,
    Fig2,
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "a" => ScenarioKind::A,
            "b" => ScenarioKind::B,
            "c" => ScenarioKind::C,
            "d" => ScenarioKind::D,
            "fig1" => ScenarioKind::Fig1,
            "fig2" => ScenarioKind::Fig2,
            other => return Err(Error::InvalidSpec(format!("unknown scenario {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub t_frac: f64,
    pub seed: Seed,
    pub n_test: usize,
}

impl ScenarioSpec {
    /// Spec with the default 20% dependent share and `n_test = n`.
    pub fn new(kind: ScenarioKind, n: usize, p: usize, s: usize, seed: Seed) -> Self {
        Self {
            kind,
            n,
            p,
            s,
            t_frac: 0.2,
            seed,
            n_test: n,
        }
    }

    /// The small hub-model examples: n = 60, p = 40, three hubs.
    pub fn figure(kind: ScenarioKind, seed: Seed) -> Self {
        Self::new(kind, 60, 40, 3, seed)
    }

    pub fn with_seed(mut self, seed: Seed) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.s == 0 || self.s >= self.p {
            return bad(format!("need 0 < s < p, got s = {}, p = {}", self.s, self.p));
        }
        if self.n < 3 {
            return bad(format!("need n >= 3, got {}", self.n));
        }
        if !(self.t_frac > 0.0 && self.t_frac <= 1.0) {
            return bad(format!("t_frac = {} outside (0, 1]", self.t_frac));
        }
        match self.kind {
            ScenarioKind::B if t_size(self.p - self.s, self.t_frac) < self.s => bad(format!(
                "scenario b needs at least s = {} dependent features, T has {}",
                self.s,
                t_size(self.p - self.s, self.t_frac)
            )),
            ScenarioKind::C if 2 * self.s > self.p => {
                bad(format!("scenario c needs 2s <= p, got s = {}", self.s))
            }
            ScenarioKind::Fig2 if 2 * self.s > self.p => {
                bad(format!("fig2 needs 2s <= p, got s = {}", self.s))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HubSetting {
    S1,
    S2,
    S3,
}

impl FromStr for HubSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "s1" | "1" => HubSetting::S1,
            "s2" | "2" => HubSetting::S2,
            "s3" | "3" => HubSetting::S3,
            other => return Err(Error::InvalidSpec(format!("unknown hub setting {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HubGraphSpec {
    pub setting: HubSetting,
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub seed: Seed,
}

impl HubGraphSpec {
    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.s >= self.p {
            return Err(Error::InvalidSpec(format!("need 0 < s < p, got s = {}", self.s)));
        }
        if self.n < 3 {
            return Err(Error::InvalidSpec(format!("need n >= 3, got {}", self.n)));
        }
        if self.setting == HubSetting::S2 && (self.s % 2 != 0 || self.s / 2 >= self.p / 2) {
            return Err(Error::InvalidSpec(format!(
                "setting s2 needs an even s with s/2 < p/2, got s = {}",
                self.s
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Scenario(ScenarioSpec),
    HubGraph(HubGraphSpec),
}

/// Generating quantities kept for inspection.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SimMeta {
    /// Features driven by the hubs.
    pub dependent_set: Vec<usize>,
    /// Hub-to-feature coefficients Γ (hubs × dependent features), when the
    /// generator has one.
    pub gamma: Option<DenseMatrix>,
    /// Precision matrix of the hub graph settings S1/S2.
    pub precision: Option<DenseMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimData {
    pub spec: GeneratorSpec,
    pub x_train: DenseMatrix,
    pub y_train: Vec<f64>,
    pub x_test: DenseMatrix,
    pub y_test: Vec<f64>,
    pub true_support: Vec<usize>,
    pub hub_set: Vec<usize>,
    #[serde(skip)]
    pub meta: SimMeta,
}

impl SimData {
    pub fn p(&self) -> usize {
        self.x_train.cols()
    }

    /// JSON sidecar describing the ground truth.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "true_support": self.true_support,
            "hub_set": self.hub_set,
            "spec": self.spec,
        })
    }
}

fn t_size(pool: usize, frac: f64) -> usize {
    ((pool as f64 * frac).round() as usize).clamp(1, pool)
}

fn sorted_sample<R: Rng>(rng: &mut R, pool: &[usize], k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();
    out.sort_unstable();
    out
}

/// Linear hub layout: which features are driven and by which Γ.
struct HubLayout {
    hubs: Vec<usize>,
    dependent: Vec<usize>,
    gamma: DenseMatrix,
}

impl HubLayout {
    fn draw<R: Rng>(rng: &mut R, hubs: Vec<usize>, dependent: Vec<usize>, sd: f64) -> Self {
        let data = (0..hubs.len() * dependent.len()).map(|_| sd * normal(rng)).collect();
        let gamma = DenseMatrix::from_parts(hubs.len(), dependent.len(), data);
        Self { hubs, dependent, gamma }
    }

    /// Rows where hubs and independent features are N(0,1) and driven
    /// features are `X_hubs Γ + N(0,1)`.
    fn sample<R: Rng>(&self, rng: &mut R, n: usize, p: usize) -> DenseMatrix {
        let mut data = Vec::with_capacity(n * p);
        for _ in 0..n {
            let mut row: Vec<f64> = (0..p).map(|_| normal(rng)).collect();
            let hv: Vec<f64> = self.hubs.iter().map(|&h| row[h]).collect();
            for (c, &j) in self.dependent.iter().enumerate() {
                let drift: f64 = hv.iter().enumerate().map(|(r, v)| v * self.gamma.get(r, c)).sum();
                row[j] += drift;
            }
            data.extend(row);
        }
        DenseMatrix::from_parts(n, p, data)
    }
}

fn response<R: Rng>(rng: &mut R, x: &DenseMatrix, support: &[usize]) -> Vec<f64> {
    (0..x.rows())
        .map(|i| support.iter().map(|&j| x.get(i, j)).sum::<f64>() + normal(rng))
        .collect()
}

/// Generates one replicate of a supervised scenario.
pub fn gen_scenario(spec: &ScenarioSpec) -> Result<SimData> {
    spec.validate()?;
    let (p, s) = (spec.p, spec.s);
    let mut srng = spec.seed.rng(STRUCTURE_STREAM);
    let core: Vec<usize> = (0..s).collect();
    let rest: Vec<usize> = (s..p).collect();

    enum Law {
        Linear(HubLayout),
        Gaussian(DenseMatrix),
    }
    let (law, support) = match spec.kind {
        ScenarioKind::A => {
            let t = sorted_sample(&mut srng, &rest, t_size(rest.len(), spec.t_frac));
            (Law::Linear(HubLayout::draw(&mut srng, core.clone(), t, 2.0)), core.clone())
        }
        ScenarioKind::B => {
            let t = sorted_sample(&mut srng, &rest, t_size(rest.len(), spec.t_frac));
            let s1 = sorted_sample(&mut srng, &t, s);
            (Law::Linear(HubLayout::draw(&mut srng, core.clone(), t, 0.5)), s1)
        }
        ScenarioKind::C => {
            let s1: Vec<usize> = (s..2 * s).collect();
            (Law::Linear(HubLayout::draw(&mut srng, core.clone(), rest.clone(), 0.5)), s1)
        }
        ScenarioKind::D => {
            let sigma = gen_positive_def(p, 10.0, spec.seed.derive(u64::from(u32::MAX)))?;
            (Law::Gaussian(sigma), core.clone())
        }
        ScenarioKind::Fig1 => (
            Law::Linear(HubLayout::draw(&mut srng, core.clone(), rest.clone(), 2.0)),
            core.clone(),
        ),
        ScenarioKind::Fig2 => {
            let s1: Vec<usize> = (s..2 * s).collect();
            (Law::Linear(HubLayout::draw(&mut srng, core.clone(), rest.clone(), 2.0)), s1)
        }
    };

    let draw = |stream: u64, n: usize| -> Result<(DenseMatrix, Vec<f64>)> {
        let mut rng = spec.seed.rng(stream);
        let x = match &law {
            Law::Linear(layout) => layout.sample(&mut rng, n, p),
            Law::Gaussian(sigma) => sample_gaussian_with(n, sigma, &mut rng)?,
        };
        let y = response(&mut rng, &x, &support);
        Ok((x, y))
    };
    let (x_raw, y_train) = draw(TRAIN_STREAM, spec.n)?;
    let (xt_raw, y_test) = draw(TEST_STREAM, spec.n_test)?;
    let (x_train, report) = standardize(&x_raw)?;
    let x_test = report.apply(&xt_raw)?;

    let meta = match law {
        Law::Linear(layout) => SimMeta {
            dependent_set: layout.dependent,
            gamma: Some(layout.gamma),
            precision: None,
        },
        Law::Gaussian(_) => SimMeta::default(),
    };
    Ok(SimData {
        spec: GeneratorSpec::Scenario(*spec),
        x_train,
        y_train,
        x_test,
        y_test,
        true_support: support,
        hub_set: core,
        meta,
    })
}

/// Precision matrix for one hub block: ones on the diagonal and on the hub
/// rows/columns define the pattern, nonzero entries are
/// `Unif([−0.15, −0.015] ∪ [0.015, 0.15])`, the result is symmetrized and its
/// smallest eigenvalue shifted to 0.2.
pub fn hub_precision<R: Rng>(rng: &mut R, p: usize, blocks: &[(usize, usize, usize)]) -> Result<DenseMatrix> {
    let mut pattern = vec![false; p * p];
    for i in 0..p {
        pattern[i * p + i] = true;
    }
    for &(start, len, hubs) in blocks {
        for h in start..start + hubs {
            for k in start..start + len {
                pattern[h * p + k] = true;
                pattern[k * p + h] = true;
            }
        }
    }
    let mut e = vec![0.0; p * p];
    for (v, on) in e.iter_mut().zip(&pattern) {
        if *on {
            let mag = rng.random_range(0.015..=0.15);
            *v = if rng.random::<bool>() { mag } else { -mag };
        }
    }
    let mut ebar = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            ebar.set_unchecked(i, j, 0.5 * (e[i * p + j] + e[j * p + i]));
        }
    }
    let lmin = symmetric_eigenvalues(&ebar)?[0];
    let shift = 0.2 - lmin;
    for i in 0..p {
        let v = ebar.get(i, i) + shift;
        ebar.set_unchecked(i, i, v);
    }
    Ok(ebar)
}

/// Draws from N(0, 4) truncated to [−2, 2] by rejection.
fn truncated_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let v = 2.0 * normal(rng);
        if v.abs() <= 2.0 {
            return v;
        }
    }
}

/// Generates a response-free hub graph design.
pub fn gen_hub_graph(spec: &HubGraphSpec) -> Result<SimData> {
    spec.validate()?;
    let (n, p, s) = (spec.n, spec.p, spec.s);
    let mut srng = spec.seed.rng(STRUCTURE_STREAM);
    let mut rng = spec.seed.rng(TRAIN_STREAM);
    let (x_raw, hubs, meta) = match spec.setting {
        HubSetting::S1 | HubSetting::S2 => {
            let (blocks, hubs) = if spec.setting == HubSetting::S1 {
                (vec![(0, p, s)], (0..s).collect::<Vec<_>>())
            } else {
                let p1 = p / 2;
                let h = s / 2;
                let hubs = (0..h).chain(p1..p1 + h).collect();
                (vec![(0, p1, h), (p1, p - p1, h)], hubs)
            };
            let precision = hub_precision(&mut srng, p, &blocks)?;
            let sigma = spd_inverse(&precision)?;
            let x = sample_gaussian_with(n, &sigma, &mut rng)?;
            let meta = SimMeta {
                dependent_set: (0..p).filter(|j| !hubs.contains(j)).collect(),
                gamma: None,
                precision: Some(precision),
            };
            (x, hubs, meta)
        }
        HubSetting::S3 => {
            let hubs: Vec<usize> = (0..s).collect();
            let dependent: Vec<usize> = (s..p).collect();
            let data = (0..s * (p - s)).map(|_| truncated_normal(&mut srng)).collect();
            let layout = HubLayout {
                hubs: hubs.clone(),
                dependent,
                gamma: DenseMatrix::from_parts(s, p - s, data),
            };
            let x = layout.sample(&mut rng, n, p);
            let meta = SimMeta {
                dependent_set: layout.dependent,
                gamma: Some(layout.gamma),
                precision: None,
            };
            (x, hubs, meta)
        }
    };
    let (x_train, _) = standardize(&x_raw)?;
    Ok(SimData {
        spec: GeneratorSpec::HubGraph(*spec),
        x_train,
        y_train: Vec::new(),
        x_test: DenseMatrix::zeros(0, p),
        y_test: Vec::new(),
        true_support: hubs.clone(),
        hub_set: hubs,
        meta,
    })
}
