//! Closed-form reproducing kernels of low degree and the intertwining
//! functions p_π^{k,ℓ} for |π| ≤ 2.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::Projector;
use crate::partitions::Partition;
use crate::potential::{certify, Configuration};

/// A real symmetric d×d matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        let asym = (&m - m.transpose()).norm();
        if asym > 1e-12 * m.norm() {
            return Err(Error::Domain(format!("matrix not symmetric: ‖M − Mᵀ‖ = {asym:e}")));
        }
        Ok(Self(m))
    }

    pub fn d(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl From<&Projector> for SymmetricMatrix {
    fn from(p: &Projector) -> Self {
        Self(p.matrix().clone())
    }
}

/// The traces entering the closed forms.
struct Traces {
    x: f64,
    y: f64,
    x2: f64,
    y2: f64,
    xy: f64,
    xyxy: f64,
    x2y: f64,
    xy2: f64,
    x2y2: f64,
}

impl Traces {
    fn new(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Self {
        let xx = x * x;
        let yy = y * y;
        let xy = x * y;
        Self {
            x: x.trace(),
            y: y.trace(),
            x2: xx.trace(),
            y2: yy.trace(),
            xy: xy.trace(),
            xyxy: (&xy * &xy).trace(),
            // Tr(X²Y) = ⟨X², Y⟩ for symmetric matrices.
            x2y: xx.dot(y),
            xy2: x.dot(&yy),
            x2y2: xx.dot(&yy),
        }
    }
}

fn pair(x: &SymmetricMatrix, y: &SymmetricMatrix) -> Result<usize> {
    if x.d() != y.d() {
        return Err(Error::DimensionMismatch(x.d(), y.d()));
    }
    Ok(x.d())
}

fn label(parts: &[usize]) -> Partition {
    Partition::new(parts.to_vec()).expect("valid partition")
}

/// K_{2π} for 2π ∈ {(0), (2), (4), (2,2)}.
pub fn k_hom(label2: &Partition, x: &SymmetricMatrix, y: &SymmetricMatrix) -> Result<f64> {
    let d = pair(x, y)?;
    let df = d as f64;
    let tr = Traces::new(x.matrix(), y.matrix());
    match label2.parts() {
        [] => Ok(1.0),
        [2] => {
            if d < 2 {
                return Err(Error::Domain("K_(2) needs d ≥ 2".into()));
            }
            Ok(tr.xy - tr.x * tr.y / df)
        }
        [4] => Ok((tr.xy * tr.xy + 2.0 * tr.xyxy) / 6.0
            + (tr.x * tr.x + 2.0 * tr.x2) * (tr.y * tr.y + 2.0 * tr.y2) / (6.0 * (df + 2.0) * (df + 4.0))
            - (tr.xy * tr.x * tr.y + 2.0 * tr.xy2 * tr.x + 2.0 * tr.x2y * tr.y + 4.0 * tr.x2y2)
                / (3.0 * (df + 4.0))),
        [2, 2] => {
            if d < 3 {
                return Err(Error::Domain("K_(2,2) needs d ≥ 3".into()));
            }
            Ok((tr.xy * tr.xy - tr.xyxy) / 3.0
                + (tr.x * tr.x - tr.x2) * (tr.y * tr.y - tr.y2) / (3.0 * (df - 1.0) * (df - 2.0))
                - (tr.xy * tr.x * tr.y - tr.xy2 * tr.x - tr.x2y * tr.y + tr.x2y2) / (3.0 * (df - 2.0) / 2.0))
        }
        _ => Err(Error::Domain(format!("no closed-form kernel for {label2}"))),
    }
}

fn supported(pi: &Partition) -> Result<()> {
    match pi.parts() {
        [] | [1] | [2] | [1, 1] => Ok(()),
        _ => Err(Error::Domain(format!("{pi} not in {{(0), (1), (2), (1,1)}}"))),
    }
}

/// p_π on pairs of projectors: 1, K_(2), 2K_(4), 2K_(2,2).
pub fn p_pi(pi: &Partition, p: &Projector, q: &Projector) -> Result<f64> {
    supported(pi)?;
    let (x, y) = (SymmetricMatrix::from(p), SymmetricMatrix::from(q));
    let factor = if pi.size() == 2 { 2.0 } else { 1.0 };
    Ok(factor * k_hom(&pi.doubled(), &x, &y)?)
}

/// v_π^k = √(p_π(I_k, I_k) / dim H_{2π}), in closed form.
pub fn v_pi(pi: &Partition, k: usize, d: usize) -> Result<f64> {
    supported(pi)?;
    let l = pi.length();
    if k < l.max(1) || k + l > d || k >= d {
        return Err(Error::Domain(format!("rank {k} outside [{l}, {}] for {pi} at d = {d}", d.saturating_sub(l))));
    }
    let (k, d) = (k as f64, d as f64);
    let sq = match pi.parts() {
        [] => 1.0,
        [1] => 2.0 * k * (d - k) / ((d - 1.0) * d * (d + 2.0)),
        [2] => {
            8.0 * k * (k + 2.0) * (d - k) * (d - k + 2.0)
                / ((d - 1.0) * d * (d + 1.0) * (d + 2.0) * (d + 4.0) * (d + 6.0))
        }
        _ => {
            8.0 * (k - 1.0) * k * (d - k - 1.0) * (d - k)
                / ((d - 3.0) * (d - 2.0) * (d - 1.0) * d * (d + 1.0) * (d + 2.0))
        }
    };
    Ok(sq.sqrt())
}

/// p_π^{k,ℓ}(P, Q) = p_π(P, Q) / (v_π^k v_π^ℓ).
pub fn intertwining(pi: &Partition, k: usize, l: usize, p: &Projector, q: &Projector) -> Result<f64> {
    if p.rank() != k || q.rank() != l {
        return Err(Error::Domain(format!(
            "ranks ({}, {}) do not match ({k}, {l})",
            p.rank(),
            q.rank()
        )));
    }
    if p.d() != q.d() {
        return Err(Error::DimensionMismatch(p.d(), q.d()));
    }
    let d = p.d();
    let norm = v_pi(pi, k, d)? * v_pi(pi, l, d)?;
    Ok(p_pi(pi, p, q)? / norm)
}

/// ⟨P,Q⟩^t + C.
pub fn reproducing_kernel_poly(t: usize, c: f64, p: &Projector, q: &Projector) -> Result<f64> {
    if !(c >= 0.0) {
        return Err(Error::Domain(format!("constant must be nonnegative, got {c}")));
    }
    if p.d() != q.d() {
        return Err(Error::DimensionMismatch(p.d(), q.d()));
    }
    Ok(p.matrix().dot(q.matrix()).powi(t as i32) + c)
}

/// Degree-3 kernel that vanishes whenever either argument is a projector.
pub fn vanishing_kernel(x: &SymmetricMatrix, y: &SymmetricMatrix) -> Result<f64> {
    let d = pair(x, y)? as f64;
    let tr = Traces::new(x.matrix(), y.matrix());
    Ok((tr.x2y2 * tr.xy - tr.x2y * tr.xy2) / (d + 2.0)
        - (tr.x2y2 * tr.x * tr.y - tr.x2y * tr.x * tr.y2 - tr.xy2 * tr.x2 * tr.y + tr.xy * tr.x2 * tr.y2)
            / ((3.0 * d + 4.0) * (d + 2.0)))
}

/// Both sides of (p_π^{k,m}(P,·), p_π^{m,ℓ}(·,Q))_{G_{m,d}} = p_π^{k,ℓ}(P,Q),
/// with the inner product evaluated by a design on G_{m,d} of unit mass.
///
/// The design must certify at strength max(2|π|, 1).
pub fn convolution_check(
    pi: &Partition,
    k: usize,
    m: usize,
    l: usize,
    cubature: &Configuration,
    p: &Projector,
    q: &Projector,
) -> Result<(f64, f64)> {
    supported(pi)?;
    let ranks = cubature.ranks();
    if ranks != [m] {
        return Err(Error::Precondition(format!("cubature ranks {ranks:?}, expected only {m}")));
    }
    let mass = cubature.total_weight();
    if (mass - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("cubature mass {mass}, expected 1")));
    }
    let strength = (2 * pi.size()).max(1);
    let report = certify(cubature, strength, 1e-9)?;
    if !report.is_cubature() {
        return Err(Error::Precondition(format!(
            "cubature does not certify at strength {strength}: gap {:e}",
            report.gap
        )));
    }
    let mut lhs = 0.0;
    for (r, &w) in cubature.points().iter().zip(cubature.weights()) {
        lhs += w * intertwining(pi, k, m, p, r)? * intertwining(pi, m, l, r, q)?;
    }
    Ok((lhs, intertwining(pi, k, l, p, q)?))
}

/// The four labels π with closed-form kernels.
pub fn supported_labels() -> [Partition; 4] {
    [label(&[]), label(&[1]), label(&[2]), label(&[1, 1])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{complement, random_projector};
    use crate::repdim::dim_irrep;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(d: usize, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
        let g = crate::geometry::gaussian_matrix(d, d, rng);
        SymmetricMatrix::new(&g + g.transpose()).unwrap()
    }

    #[test]
    fn basic_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (x, y) = (random_symmetric(4, &mut rng), random_symmetric(4, &mut rng));
        assert_eq!(k_hom(&label(&[]), &x, &y).unwrap(), 1.0);
        let p = Projector::coordinate(5, 2);
        let pp = SymmetricMatrix::from(&p);
        assert!((k_hom(&label(&[2]), &pp, &pp).unwrap() - 2.0 * 3.0 / 5.0).abs() < 1e-14);
        let line = Projector::coordinate(3, 1);
        assert!((p_pi(&label(&[2]), &line, &line).unwrap() - 8.0 / 35.0).abs() < 1e-14);
        assert!(matches!(k_hom(&label(&[3]), &x, &y), Err(Error::Domain(_))));
        let small = SymmetricMatrix::new(DMatrix::identity(2, 2)).unwrap();
        assert!(k_hom(&label(&[2, 2]), &small, &small).is_err());
        assert!(SymmetricMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn k22_vanishes_in_three_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (x, y) = (random_symmetric(3, &mut rng), random_symmetric(3, &mut rng));
            let scale = x.matrix().norm().powi(2) * y.matrix().norm().powi(2);
            assert!(k_hom(&label(&[2, 2]), &x, &y).unwrap().abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn v_values() {
        assert_eq!(v_pi(&label(&[]), 2, 5).unwrap(), 1.0);
        assert!((v_pi(&label(&[1]), 1, 3).unwrap() - (2.0f64 / 15.0).sqrt()).abs() < 1e-15);
        assert!(matches!(v_pi(&label(&[1, 1]), 1, 5), Err(Error::Domain(_))));
        assert!(v_pi(&label(&[1]), 3, 3).is_err());
        assert!(v_pi(&label(&[3]), 1, 3).is_err());
    }

    #[test]
    fn diagonal_is_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=6 {
            for pi in supported_labels() {
                let l = pi.length();
                if d < 3 && pi.length() == 2 {
                    continue;
                }
                for k in l.max(1)..=(d - l.max(1)) {
                    let p = random_projector(d, k, &mut rng);
                    let dim = dim_irrep(d, &pi.doubled()).unwrap() as f64;
                    let value = intertwining(&pi, k, k, &p, &p).unwrap();
                    assert!((value - dim).abs() <= 1e-10 * dim, "{pi} d={d} k={k}: {value} vs {dim}");
                }
            }
        }
    }

    #[test]
    fn complement_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in 3..6 {
            for _ in 0..20 {
                let p = random_projector(d, 1 + (d % 2), &mut rng);
                let q = random_projector(d, d - 1, &mut rng);
                for pi in supported_labels() {
                    let sign = if pi.size() % 2 == 0 { 1.0 } else { -1.0 };
                    let a = p_pi(&pi, &p, &q).unwrap();
                    let b = sign * p_pi(&pi, &p, &complement(&q)).unwrap();
                    assert!((a - b).abs() < 1e-12, "{pi}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn vanishing_kernel_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_symmetric(4, &mut rng);
        let y = random_symmetric(4, &mut rng);
        let a = vanishing_kernel(&x, &y).unwrap();
        let b = vanishing_kernel(&y, &x).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        let zero = SymmetricMatrix::new(DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(vanishing_kernel(&zero, &y).unwrap(), 0.0);
        let p = SymmetricMatrix::from(&random_projector(4, 2, &mut rng));
        assert!(vanishing_kernel(&x, &p).unwrap().abs() <= 1e-10 * x.matrix().norm().powi(3));
    }

    #[test]
    fn polynomial_kernel() {
        let p = Projector::coordinate(4, 2);
        assert_eq!(reproducing_kernel_poly(0, 0.0, &p, &p).unwrap(), 1.0);
        assert_eq!(reproducing_kernel_poly(3, 0.5, &p, &p).unwrap(), 8.5);
        assert!(reproducing_kernel_poly(1, -1.0, &p, &p).is_err());
    }
}
