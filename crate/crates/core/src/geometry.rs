//! Orthogonal projectors as points of Grassmannians.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Relative threshold on the R diagonal below which a frame is rejected.
pub const FRAME_RANK_TOL: f64 = 1e-10;
/// Idempotency tolerance per unit of ambient dimension.
pub const IDEMPOTENCY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;

/// A symmetric idempotent d×d matrix of rank k.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    d: usize,
    k: usize,
    mat: DMatrix<f64>,
}

impl Projector {
    /// Wraps a matrix without any checks. Use [`validate`] on the result.
    pub fn from_raw(k: usize, mat: DMatrix<f64>) -> Self {
        let d = mat.nrows();
        Self { d, k, mat }
    }

    /// Validates a full matrix as a projector and symmetrizes it. The rank is
    /// the rounded trace.
    pub fn from_matrix(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        let d = mat.nrows();
        let trace = mat.trace();
        if !trace.is_finite() || trace < 0.5 || trace > d as f64 - 0.5 {
            return Err(Error::Domain(format!(
                "trace {trace} does not correspond to a rank in 1..{}",
                d.saturating_sub(1)
            )));
        }
        let k = trace.round() as usize;
        let asym = (&mat - mat.transpose()).norm();
        if asym > 1e-12 * mat.norm().max(1.0) {
            return Err(Error::Domain(format!("matrix not symmetric: ‖M − Mᵀ‖ = {asym:e}")));
        }
        let p = Self::from_raw(k, symmetrize(&mat));
        let violations = validate(&p, IDEMPOTENCY_TOL);
        if !violations.is_empty() {
            return Err(Error::Domain(violations.join("; ")));
        }
        Ok(p)
    }

    /// Coordinate projector I_{k,d} = diag(1,…,1,0,…,0).
    pub fn coordinate(d: usize, k: usize) -> Self {
        let mut mat = DMatrix::zeros(d, d);
        for i in 0..k {
            mat[(i, i)] = 1.0;
        }
        Self { d, k, mat }
    }

    /// Rank-one projector onto the line spanned by `v`.
    pub fn line(v: &DVector<f64>) -> Result<Self> {
        let d = v.len();
        if d < 2 {
            return Err(Error::Domain(format!("line in R^{d}")));
        }
        let n2 = v.norm_squared();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::DegenerateFrame { smallest: n2.sqrt(), largest: n2.sqrt() });
        }
        Ok(Self { d, k: 1, mat: v * v.transpose() / n2 })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn complement(&self) -> Self {
        complement(self)
    }

    /// O P Oᵀ.
    pub fn conjugated(&self, o: &DMatrix<f64>) -> Self {
        Self {
            d: self.d,
            k: self.k,
            mat: symmetrize(&(o * &self.mat * o.transpose())),
        }
    }

    pub fn distance(&self, other: &Projector) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    /// An orthonormal d×k basis of the range, from a column-pivoted QR.
    pub fn frame(&self) -> DMatrix<f64> {
        let qr = self.mat.clone().col_piv_qr();
        let q = qr.q();
        let basis = q.columns(0, self.k).into_owned();
        // Re-project to suppress roundoff from columns outside the range.
        orthonormalize(&(&self.mat * basis)).unwrap_or_else(|_| q.columns(0, self.k).into_owned())
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Householder QR of the frame; returns Q with the sign convention
/// diag(R) ≥ 0 so that the result is a continuous function of the input.
pub fn orthonormalize(frame: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = frame.ncols();
    let qr = frame.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..k).map(|i| r[(i, i)].abs()).collect();
    let largest = diag.iter().cloned().fold(0.0, f64::max);
    let smallest = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(largest > 0.0) || !(smallest >= FRAME_RANK_TOL * largest) {
        return Err(Error::DegenerateFrame { smallest, largest });
    }
    let mut q = qr.q();
    for i in 0..k {
        if r[(i, i)] < 0.0 {
            q.column_mut(i).neg_mut();
        }
    }
    Ok(q)
}

/// P = QQᵀ for the orthonormalized columns of `frame` (d×k).
pub fn projector_from_frame(frame: &DMatrix<f64>) -> Result<Projector> {
    let (d, k) = frame.shape();
    if k == 0 || k >= d {
        return Err(Error::Domain(format!("frame with {k} columns in R^{d}")));
    }
    let q = orthonormalize(frame)?;
    Ok(Projector::from_raw(k, symmetrize(&(&q * q.transpose()))))
}

/// Same as [`projector_from_frame`] for a list of column vectors.
pub fn projector_from_columns(d: usize, columns: &[DVector<f64>]) -> Result<Projector> {
    if let Some(c) = columns.iter().find(|c| c.len() != d) {
        return Err(Error::DimensionMismatch(d, c.len()));
    }
    if columns.is_empty() {
        return Err(Error::Domain("frame without columns".into()));
    }
    projector_from_frame(&DMatrix::from_columns(columns))
}

/// I − P.
pub fn complement(p: &Projector) -> Projector {
    let mat = DMatrix::identity(p.d, p.d) - &p.mat;
    Projector {
        d: p.d,
        k: p.d - p.k,
        mat,
    }
}

/// ⟨P,Q⟩ = Tr(PQ), computed as the Frobenius inner product of the
/// symmetric matrices.
pub fn inner(p: &Projector, q: &Projector) -> Result<f64> {
    if p.d != q.d {
        return Err(Error::DimensionMismatch(p.d, q.d));
    }
    Ok(p.mat.dot(&q.mat))
}

/// Human-readable descriptions of every violated projector invariant.
pub fn validate(p: &Projector, tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    let m = &p.mat;
    if m.nrows() != m.ncols() {
        out.push(format!("matrix is {}×{}, not square", m.nrows(), m.ncols()));
        return out;
    }
    if m.iter().any(|x| !x.is_finite()) {
        out.push("non-finite entries".into());
        return out;
    }
    let asym = (m - m.transpose()).norm();
    if asym > tol {
        out.push(format!("symmetry violated: ‖M − Mᵀ‖_F = {asym:e}"));
    }
    let idem = (m * m - m).norm();
    if idem > tol * p.d as f64 {
        out.push(format!("idempotency violated: ‖M² − M‖_F = {idem:e}"));
    }
    let tr = m.trace();
    if (tr - p.k as f64).abs() > tol.max(TRACE_TOL) {
        out.push(format!("trace {tr} differs from rank {}", p.k));
    }
    if p.k == 0 || p.k >= p.d {
        out.push(format!("rank {} outside 1..{}", p.k, p.d.saturating_sub(1)));
    }
    out
}

/// d×k matrix of independent standard Gaussians.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
pub fn random_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        if let Ok(q) = orthonormalize(&gaussian_matrix(d, d, rng)) {
            return q;
        }
    }
}

/// Uniformly distributed rank-k projector.
pub fn random_projector<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Projector {
    loop {
        if let Ok(p) = projector_from_frame(&gaussian_matrix(d, k, rng)) {
            return p;
        }
    }
}
