//! Fusion frame potential, worst-case cubature error and certification of
//! cubatures and designs by attainment of the potential lower bound.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Projector;
use crate::zonal::{format_rational, t_matrix, SignedMeasure};

/// Default absolute tolerance on the potential gap.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Frobenius distance above which two projectors count as distinct points.
pub const DISTINCT_TOL: f64 = 1e-6;
/// Largest denominator tried when recovering exact masses from floats.
const MASS_DENOMINATOR_LIMIT: i64 = 100_000;

/// Weighted points on a union of Grassmannians in R^d.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    d: usize,
    points: Vec<Projector>,
    weights: Vec<f64>,
}

impl Configuration {
    pub fn new(points: Vec<Projector>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyConfiguration("no points".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::Domain(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        let d = points[0].d();
        if let Some(p) = points.iter().find(|p| p.d() != d) {
            return Err(Error::DimensionMismatch(d, p.d()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::Domain(format!("non-finite weight {w}")));
        }
        Ok(Self { d, points, weights })
    }

    /// Joins several (points, weight) groups.
    pub fn from_groups(groups: Vec<(Vec<Projector>, f64)>) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (ps, w) in groups {
            weights.extend(std::iter::repeat_n(w, ps.len()));
            points.extend(ps);
        }
        Self::new(points, weights)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Projector] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Sorted distinct ranks.
    pub fn ranks(&self) -> Vec<usize> {
        self.rank_counts().into_keys().collect()
    }

    /// m_k = Σ_{P_j of rank k} ω_j.
    pub fn induced_masses(&self) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for (p, w) in self.points.iter().zip(&self.weights) {
            *out.entry(p.rank()).or_insert(0.0) += w;
        }
        out
    }

    pub fn induced_measure(&self) -> SignedMeasure {
        SignedMeasure {
            d: self.d,
            masses: self.induced_masses(),
        }
    }

    /// n_k, the number of points of each rank.
    pub fn rank_counts(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for p in &self.points {
            *out.entry(p.rank()).or_insert(0) += 1;
        }
        out
    }

    /// True when all points of a rank carry the same weight.
    pub fn equal_weights_per_rank(&self) -> bool {
        let mut first: BTreeMap<usize, f64> = BTreeMap::new();
        self.points.iter().zip(&self.weights).all(|(p, &w)| {
            let w0 = *first.entry(p.rank()).or_insert(w);
            (w - w0).abs() <= 1e-12 * w0.abs().max(1.0)
        })
    }

    /// Applies P ↦ O P Oᵀ to every point.
    pub fn conjugated(&self, o: &DMatrix<f64>) -> Self {
        Self {
            d: self.d,
            points: self.points.iter().map(|p| p.conjugated(o)).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Number of points that are pairwise farther apart than `tol`
    /// (first occurrence wins).
    pub fn distinct_count(&self, tol: f64) -> usize {
        self.merge_coincident(tol).len()
    }

    pub fn distinct_counts_per_rank(&self, tol: f64) -> BTreeMap<usize, usize> {
        self.merge_coincident(tol).rank_counts()
    }

    /// Merges points within Frobenius distance `tol`, summing their weights.
    /// Keeps the first representative of each cluster in input order.
    pub fn merge_coincident(&self, tol: f64) -> Self {
        let mut points: Vec<Projector> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (p, &w) in self.points.iter().zip(&self.weights) {
            match points.iter().position(|q| q.rank() == p.rank() && q.distance(p) <= tol) {
                Some(i) => weights[i] += w,
                None => {
                    points.push(p.clone());
                    weights.push(w);
                }
            }
        }
        Self {
            d: self.d,
            points,
            weights,
        }
    }

    /// The weighted Gram matrix entries ⟨P_i,P_j⟩.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| self.points[i].matrix().dot(self.points[j].matrix()))
    }
}

/// Neumaier compensated sum.
#[derive(Default, Clone, Copy, Debug)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// FFP_t = Σ_{i,j} ω_i ω_j ⟨P_i,P_j⟩^t, diagonal included, summed in a fixed
/// order with compensation.
pub fn ffp(config: &Configuration, t: usize) -> f64 {
    let mut acc = CompensatedSum::default();
    let pts = config.points();
    let w = config.weights();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            let ip = pts[i].matrix().dot(pts[j].matrix());
            acc.add(w[i] * w[j] * ip.powi(t as i32));
        }
    }
    acc.value()
}

fn exact_bound_string(measure: &SignedMeasure, t: usize) -> Option<String> {
    let exact = measure.recognize_exact(MASS_DENOMINATOR_LIMIT)?;
    exact.lower_bound(t).ok().map(|b| format_rational(&b))
}

/// E_t² between the cubature and a signed measure:
/// FFP − 2 Σ_i ω_i Σ_ℓ m_ℓ T(rank_i, ℓ) + mᵀTm, clamped at zero when the
/// negative part is within [`DEFAULT_TOL`].
pub fn worst_case_error_sq(config: &Configuration, measure: &SignedMeasure, t: usize) -> Result<f64> {
    if measure.d != config.d() {
        return Err(Error::DimensionMismatch(config.d(), measure.d));
    }
    let mut ranks = config.ranks();
    ranks.extend(measure.ranks());
    let tm = t_matrix(config.d(), &ranks, t)?;
    let tf = tm.to_f64();

    let mut cross = CompensatedSum::default();
    for (p, &w) in config.points().iter().zip(config.weights()) {
        let i = tm.index_of(p.rank()).expect("rank present");
        for (&l, &m) in &measure.masses {
            let j = tm.index_of(l).expect("rank present");
            cross.add(w * m * tf[i][j]);
        }
    }
    let value = ffp(config, t) - 2.0 * cross.value() + measure.lower_bound(t)?;
    Ok(if (-DEFAULT_TOL..0.0).contains(&value) { 0.0 } else { value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Cubature with weights constant on each Grassmannian.
    Design,
    Cubature,
    Neither,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Design => "design",
            Verdict::Cubature => "cubature",
            Verdict::Neither => "neither",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub t: usize,
    pub ffp: f64,
    pub bound: f64,
    /// Exact bound as "p/q" when every mass is a small-denominator rational.
    pub bound_exact: Option<String>,
    pub gap: f64,
    pub masses: BTreeMap<usize, f64>,
    pub rank_counts: BTreeMap<usize, usize>,
    pub equal_weights_per_rank: bool,
    pub verdict: Verdict,
    pub tol: f64,
}

impl CertificationReport {
    pub fn is_cubature(&self) -> bool {
        self.verdict != Verdict::Neither
    }
}

/// Compares FFP_t with the lower bound for the induced measure. Equality (up
/// to `tol`) holds exactly for cubatures of Pol_t.
pub fn certify(config: &Configuration, t: usize, tol: f64) -> Result<CertificationReport> {
    if t == 0 {
        return Err(Error::Domain("strength must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let measure = config.induced_measure();
    let value = ffp(config, t);
    let bound = measure.lower_bound(t)?;
    let gap = value - bound;
    let equal = config.equal_weights_per_rank();
    let verdict = match (gap.abs() <= tol, equal) {
        (true, true) => Verdict::Design,
        (true, false) => Verdict::Cubature,
        (false, _) => Verdict::Neither,
    };
    Ok(CertificationReport {
        t,
        ffp: value,
        bound,
        bound_exact: exact_bound_string(&measure, t),
        gap,
        masses: measure.masses,
        rank_counts: config.rank_counts(),
        equal_weights_per_rank: equal,
        verdict,
        tol,
    })
}

/// Whether a cubature for its induced measure m is also a cubature for the
/// measure with masses `c`, i.e. whether c − m lies in ker T_{K,d}(t).
pub fn equivalent_measure_check(
    config: &Configuration,
    t: usize,
    c: &SignedMeasure,
    tol: f64,
) -> Result<bool> {
    if c.d != config.d() {
        return Err(Error::DimensionMismatch(config.d(), c.d));
    }
    let total = config.total_weight();
    if (c.total_mass() - total).abs() > tol * total.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "mass sums differ: {} vs total weight {total}",
            c.total_mass()
        )));
    }
    let report = certify(config, t, tol)?;
    if !report.is_cubature() {
        return Err(Error::Precondition(format!(
            "configuration is not a cubature of strength {t} (gap {:e})",
            report.gap
        )));
    }
    let m = config.induced_measure();
    let mut ranks = config.ranks();
    ranks.extend(c.ranks());
    let tm = t_matrix(config.d(), &ranks, t)?;
    let diff: Vec<BigRational> = tm
        .ranks
        .iter()
        .map(|&k| {
            BigRational::from_float(c.mass(k)).expect("finite")
                - BigRational::from_float(m.mass(k)).expect("finite")
        })
        .collect();
    let image = tm.apply(&diff);
    let image_norm = image
        .iter()
        .map(|x| x.to_f64().unwrap_or(f64::NAN).powi(2))
        .sum::<f64>()
        .sqrt();
    let t_norm = tm.to_f64().iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    Ok(image_norm <= tol * t_norm)
}

/// The rank-k part of a configuration with its weights.
pub fn extract_marginal(config: &Configuration, k: usize) -> Result<Configuration> {
    let (points, weights): (Vec<_>, Vec<_>) = config
        .points()
        .iter()
        .zip(config.weights())
        .filter(|(p, _)| p.rank() == k)
        .map(|(p, &w)| (p.clone(), w))
        .unzip();
    if points.is_empty() {
        return Err(Error::EmptyConfiguration(format!("no points of rank {k}")));
    }
    Configuration::new(points, weights)
}

/// Linear spot check: Σ_j ω_j ⟨X,P_j⟩ against ∫⟨X,P⟩dσ = Σ_k m_k (k/d) Tr X.
/// Returns (cubature sum, exact integral).
pub fn linear_spot_check(
    config: &Configuration,
    measure: &SignedMeasure,
    x: &DMatrix<f64>,
) -> Result<(f64, f64)> {
    if x.nrows() != config.d() || x.ncols() != config.d() {
        return Err(Error::DimensionMismatch(config.d(), x.nrows()));
    }
    let mut sum = CompensatedSum::default();
    for (p, &w) in config.points().iter().zip(config.weights()) {
        sum.add(w * p.matrix().dot(x));
    }
    let d = config.d() as f64;
    let integral: f64 = measure
        .masses
        .iter()
        .map(|(&k, &m)| m * k as f64 / d * x.trace())
        .sum();
    Ok((sum.value(), integral))
}
