//! Riemannian minimization of the fusion frame potential.
//!
//! Every point P_i = V_i V_iᵀ is carried as an orthonormal frame V_i
//! (a point of the Stiefel manifold). Search directions live in the
//! horizontal space {ξ : V_iᵀ ξ = 0} and steps are retracted by QR
//! re-orthonormalization, which keeps every rank fixed. Weights never move.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{gaussian_matrix, orthonormalize, projector_from_frame, Projector};
use crate::io::config_to_json;
use crate::potential::{certify, CertificationReport, CompensatedSum, Configuration};

/// Search direction rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Projected steepest descent.
    #[default]
    Gradient,
    /// Polak–Ribière+ nonlinear conjugate gradient, restarted on non-descent.
    ConjugateGradient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub max_iter: usize,
    /// Stop once max_i ‖grad_i‖_F falls below this.
    pub grad_tol: f64,
    /// First trial step of the backtracking search.
    pub initial_step: f64,
    /// Backtracking factor in (0, 1).
    pub shrink: f64,
    /// Armijo constant in (0, 1).
    pub sufficient_decrease: f64,
    pub seed: u64,
    pub restarts: usize,
    pub method: Method,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            grad_tol: 1e-10,
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            seed: 0,
            restarts: 10,
            method: Method::Gradient,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = self.max_iter > 0
            && self.grad_tol > 0.0
            && self.initial_step > 0.0
            && self.sufficient_decrease > 0.0
            && self.sufficient_decrease < 1.0
            && self.restarts > 0;
        if !positive || !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::Domain(format!("invalid optimizer settings {self:?}")));
        }
        Ok(())
    }
}

/// Gaussian random frames, orthonormalized, `counts[k]` of each rank k, each
/// carrying `weights[k]`. Ranks are drawn in ascending order from one
/// ChaCha stream, so the result depends only on the arguments.
pub fn random_configuration(
    d: usize,
    counts: &BTreeMap<usize, usize>,
    weights: &BTreeMap<usize, f64>,
    seed: u64,
) -> Result<Configuration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let mut ws = Vec::new();
    for (&k, &n) in counts {
        if k == 0 || k >= d {
            return Err(Error::Domain(format!("rank {k} outside 1..{}", d.saturating_sub(1))));
        }
        let w = *weights
            .get(&k)
            .ok_or_else(|| Error::Domain(format!("no weight given for rank {k}")))?;
        if !w.is_finite() {
            return Err(Error::Domain(format!("weight {w} of rank {k} is not finite")));
        }
        for _ in 0..n {
            let p = loop {
                if let Ok(p) = projector_from_frame(&gaussian_matrix(d, k, &mut rng)) {
                    break p;
                }
            };
            points.push(p);
            ws.push(w);
        }
    }
    Configuration::new(points, ws)
}

/// Frames and fixed weights; the optimizer's working representation.
#[derive(Clone, Debug)]
pub struct FrameState {
    pub frames: Vec<DMatrix<f64>>,
    pub weights: Vec<f64>,
}

impl FrameState {
    pub fn from_configuration(config: &Configuration) -> Self {
        Self {
            frames: config.points().iter().map(Projector::frame).collect(),
            weights: config.weights().to_vec(),
        }
    }

    pub fn projectors(&self) -> Vec<DMatrix<f64>> {
        self.frames.iter().map(|v| v * v.transpose()).collect()
    }

    pub fn to_configuration(&self) -> Result<Configuration> {
        let points = self
            .frames
            .iter()
            .map(projector_from_frame)
            .collect::<Result<Vec<_>>>()?;
        Configuration::new(points, self.weights.clone())
    }

    /// FFP_t evaluated on the frames.
    pub fn objective(&self, t: usize) -> f64 {
        let ps = self.projectors();
        let mut acc = CompensatedSum::default();
        for i in 0..ps.len() {
            for j in 0..ps.len() {
                let ip = ps[i].dot(&ps[j]);
                acc.add(self.weights[i] * self.weights[j] * ip.powi(t as i32));
            }
        }
        acc.value()
    }

    /// Objective and horizontal (Riemannian) frame gradients.
    ///
    /// The ambient gradient with respect to P_i is
    /// G_i = 2 ω_i t Σ_j ω_j ⟨P_i,P_j⟩^{t−1} P_j; the frame gradient is
    /// 2 G_i V_i, projected by subtracting V_i (V_iᵀ ·).
    pub fn gradient(&self, t: usize) -> (f64, Vec<DMatrix<f64>>) {
        let ps = self.projectors();
        let n = ps.len();
        let w = &self.weights;
        let mut acc = CompensatedSum::default();
        let mut grads = Vec::with_capacity(n);
        let gram: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| ps[i].dot(&ps[j])).collect())
            .collect();
        for i in 0..n {
            let d = ps[i].nrows();
            let mut g = DMatrix::zeros(d, d);
            for j in 0..n {
                acc.add(w[i] * w[j] * gram[i][j].powi(t as i32));
                let coeff = 2.0 * w[i] * t as f64 * w[j] * gram[i][j].powi(t as i32 - 1);
                g += &ps[j] * coeff;
            }
            let v = &self.frames[i];
            let euclid = 2.0 * g * v;
            let horizontal = &euclid - v * (v.transpose() * &euclid);
            grads.push(horizontal);
        }
        (acc.value(), grads)
    }

    /// R_V(ξ) = qf(V + ξ) for every frame.
    pub fn retract(&self, direction: &[DMatrix<f64>], step: f64) -> Result<Self> {
        let frames = self
            .frames
            .iter()
            .zip(direction)
            .map(|(v, xi)| orthonormalize(&(v + xi * step)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            frames,
            weights: self.weights.clone(),
        })
    }

    /// Projects ambient frame-shaped matrices onto the horizontal spaces.
    pub fn project(&self, vectors: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
        self.frames
            .iter()
            .zip(vectors)
            .map(|(v, x)| x - v * (v.transpose() * x))
            .collect()
    }
}

fn dot(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn max_norm(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    GradientTolerance,
    MaxIterations,
    /// The line search found no decrease above roundoff.
    Stalled,
}

#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub config: Configuration,
    /// Objective at the start and after every accepted step.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub grad_norm: f64,
    pub stop: StopReason,
    /// Largest ‖P² − P‖_F seen over all accepted iterates.
    pub max_idempotency_error: f64,
}

impl OptimizationResult {
    pub fn final_value(&self) -> f64 {
        *self.trace.last().expect("trace starts with the initial value")
    }
}

fn numerical_failure(state: &FrameState, iteration: usize, message: String) -> Error {
    let dump = state
        .to_configuration()
        .map(|c| config_to_json(&c, None).to_string())
        .unwrap_or_else(|e| format!("<unavailable: {e}>"));
    Error::Numerical {
        iteration,
        message,
        dump,
    }
}

/// Minimizes FFP_t over the positions of the points, weights held fixed.
pub fn minimize_ffp(
    config: &Configuration,
    t: usize,
    settings: &OptimizerSettings,
) -> Result<OptimizationResult> {
    if t == 0 {
        return Err(Error::Domain("strength must be at least 1".into()));
    }
    settings.validate()?;
    let mut state = FrameState::from_configuration(config);
    let (mut value, mut grad) = state.gradient(t);
    if !value.is_finite() {
        return Err(numerical_failure(&state, 0, format!("initial objective {value}")));
    }
    let mut trace = vec![value];
    let mut direction: Vec<DMatrix<f64>> = grad.iter().map(|g| -g).collect();
    let mut step = settings.initial_step;
    let mut bb_step: Option<f64> = None;
    let mut max_idem = 0.0f64;
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;

    while iterations < settings.max_iter {
        if max_norm(&grad) <= settings.grad_tol {
            stop = StopReason::GradientTolerance;
            break;
        }
        let mut slope = dot(&grad, &direction);
        if slope >= 0.0 {
            direction = grad.iter().map(|g| -g).collect();
            slope = dot(&grad, &direction);
        }

        // Armijo backtracking from the Barzilai–Borwein step when one is
        // available, otherwise from twice the last accepted step.
        let mut alpha = bb_step
            .unwrap_or(2.0 * step)
            .min(1e6 * settings.initial_step);
        let accepted = loop {
            let trial = state.retract(&direction, alpha)?;
            let trial_value = trial.objective(t);
            if !trial_value.is_finite() {
                return Err(numerical_failure(
                    &trial,
                    iterations,
                    format!("objective {trial_value} at step {alpha:e}"),
                ));
            }
            if trial_value <= value + settings.sufficient_decrease * alpha * slope
                && trial_value <= value
            {
                break Some((trial, alpha));
            }
            alpha *= settings.shrink;
            if alpha < 1e-14 * settings.initial_step {
                break None;
            }
        };
        let Some((next, alpha)) = accepted else {
            stop = StopReason::Stalled;
            break;
        };
        step = alpha;
        iterations += 1;

        let (next_value, next_grad) = next.gradient(t);
        if settings.method == Method::Gradient {
            let moved = next.project(&direction);
            let old_grad = next.project(&grad);
            let y: Vec<DMatrix<f64>> = next_grad.iter().zip(&old_grad).map(|(a, b)| a - b).collect();
            let sy = alpha * dot(&moved, &y);
            let ss = alpha * alpha * dot(&moved, &moved);
            bb_step = (sy > 0.0 && ss > 0.0).then(|| ss / sy);
        }
        for p in next.projectors() {
            max_idem = max_idem.max((&p * &p - &p).norm());
        }
        direction = match settings.method {
            Method::Gradient => next_grad.iter().map(|g| -g).collect(),
            Method::ConjugateGradient => {
                let old_grad = next.project(&grad);
                let old_dir = next.project(&direction);
                let diff: Vec<DMatrix<f64>> =
                    next_grad.iter().zip(&old_grad).map(|(a, b)| a - b).collect();
                let denom = dot(&grad, &grad);
                let beta = if denom > 0.0 {
                    (dot(&next_grad, &diff) / denom).max(0.0)
                } else {
                    0.0
                };
                next_grad
                    .iter()
                    .zip(&old_dir)
                    .map(|(g, dprev)| -g + dprev * beta)
                    .collect()
            }
        };
        state = next;
        value = next_value;
        grad = next_grad;
        trace.push(value);
    }

    Ok(OptimizationResult {
        config: state.to_configuration()?,
        trace,
        iterations,
        grad_norm: max_norm(&grad),
        stop,
        max_idempotency_error: max_idem,
    })
}

/// One restart of a design search.
#[derive(Clone, Debug)]
pub struct RestartRun {
    pub seed: u64,
    pub result: OptimizationResult,
    pub report: CertificationReport,
}

#[derive(Clone, Debug)]
pub struct DesignSearch {
    pub runs: Vec<RestartRun>,
    /// Index into `runs` of the lowest final potential (first on ties).
    pub best: usize,
}

impl DesignSearch {
    pub fn best_run(&self) -> &RestartRun {
        &self.runs[self.best]
    }

    pub fn successes(&self) -> usize {
        self.runs.iter().filter(|r| r.report.is_cubature()).count()
    }
}

/// Searches for a t-design with `counts[k]` points and total mass
/// `masses[k]` on each rank: weights m_k/n_k, random starts seeded
/// `seed + i` for each restart i, each certified at `tol`.
pub fn search_design(
    d: usize,
    counts: &BTreeMap<usize, usize>,
    masses: &BTreeMap<usize, f64>,
    t: usize,
    settings: &OptimizerSettings,
    tol: f64,
) -> Result<DesignSearch> {
    settings.validate()?;
    if counts.keys().ne(masses.keys()) {
        return Err(Error::Domain("counts and masses must cover the same ranks".into()));
    }
    let mut weights = BTreeMap::new();
    for (&k, &n) in counts {
        if n == 0 {
            return Err(Error::Domain(format!("zero points requested for rank {k}")));
        }
        weights.insert(k, masses[&k] / n as f64);
    }
    let mut runs = Vec::with_capacity(settings.restarts);
    for i in 0..settings.restarts {
        let seed = settings.seed.wrapping_add(i as u64);
        let start = random_configuration(d, counts, &weights, seed)?;
        let result = minimize_ffp(&start, t, settings)?;
        let report = certify(&result.config, t, tol.max(f64::MIN_POSITIVE))?;
        runs.push(RestartRun { seed, result, report });
    }
    let best = runs
        .iter()
        .enumerate()
        .fold(0, |best, (i, r)| {
            if r.result.final_value() < runs[best].result.final_value() {
                i
            } else {
                best
            }
        });
    Ok(DesignSearch { runs, best })
}
