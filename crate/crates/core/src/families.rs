//! Explicit designs from group orbits, and the doubling construction that
//! raises the strength of a cubature by one.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{complement, Projector};
use crate::potential::{certify, extract_marginal, Configuration, DEFAULT_TOL, DISTINCT_TOL};
use crate::zonal::SignedMeasure;

pub const ORBIT_DEDUP_TOL: f64 = 1e-8;
/// Groups up to this order are enumerated before acting on seeds.
pub const GROUP_CLOSURE_CAP: usize = 1_000;
pub const ORBIT_CAP: usize = 10_000;
const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Slack allowed when checking a parameter against its interval.
const PARAM_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct OrbitSpec {
    pub generators: Vec<DMatrix<f64>>,
    pub seeds: Vec<Projector>,
    pub dedup_tol: f64,
}

impl OrbitSpec {
    pub fn new(generators: Vec<DMatrix<f64>>, seeds: Vec<Projector>) -> Self {
        Self {
            generators,
            seeds,
            dedup_tol: ORBIT_DEDUP_TOL,
        }
    }
}

/// ‖a − b‖_F ≤ tol, exiting early once the partial sum exceeds tol².
fn within(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    let limit = tol * tol;
    let mut acc = 0.0;
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        acc += (x - y) * (x - y);
        if acc > limit {
            return false;
        }
    }
    true
}

fn check_generators(generators: &[DMatrix<f64>], d: usize) -> Result<()> {
    for (i, g) in generators.iter().enumerate() {
        if g.shape() != (d, d) {
            return Err(Error::DimensionMismatch(d, g.nrows()));
        }
        let err = (g.transpose() * g - DMatrix::identity(d, d)).norm();
        if err > ORTHOGONALITY_TOL {
            return Err(Error::Domain(format!("generator {i} is not orthogonal: ‖GᵀG − I‖ = {err:e}")));
        }
    }
    Ok(())
}

/// All elements of the group generated by `generators`, breadth first from
/// the identity. Fails with [`Error::NonFiniteOrbit`] beyond `cap` elements.
pub fn group_closure(generators: &[DMatrix<f64>], d: usize, cap: usize) -> Result<Vec<DMatrix<f64>>> {
    check_generators(generators, d)?;
    let mut elements = vec![DMatrix::identity(d, d)];
    let mut i = 0;
    while i < elements.len() {
        for g in generators {
            let h = g * &elements[i];
            if !elements.iter().any(|e| within(e, &h, ORBIT_DEDUP_TOL)) {
                if elements.len() == cap {
                    return Err(Error::NonFiniteOrbit { cap });
                }
                elements.push(h);
            }
        }
        i += 1;
    }
    Ok(elements)
}

fn push_new(out: &mut Vec<Projector>, p: Projector, tol: f64) -> bool {
    if out.iter().any(|q| q.rank() == p.rank() && within(q.matrix(), p.matrix(), tol)) {
        return false;
    }
    out.push(p);
    true
}

/// The distinct images R P Rᵀ of the seeds under the generated group.
///
/// Small groups are enumerated first and applied seed by seed in closure
/// order; otherwise the seed set is closed directly under the generators.
pub fn orbit(spec: &OrbitSpec) -> Result<Vec<Projector>> {
    let Some(first) = spec.seeds.first() else {
        return Ok(Vec::new());
    };
    let d = first.d();
    if let Some(p) = spec.seeds.iter().find(|p| p.d() != d) {
        return Err(Error::DimensionMismatch(d, p.d()));
    }
    check_generators(&spec.generators, d)?;
    let mut out = Vec::new();
    match group_closure(&spec.generators, d, GROUP_CLOSURE_CAP) {
        Ok(group) => {
            for seed in &spec.seeds {
                for g in &group {
                    push_new(&mut out, seed.conjugated(g), spec.dedup_tol);
                }
            }
        }
        Err(Error::NonFiniteOrbit { .. }) => {
            for seed in &spec.seeds {
                push_new(&mut out, seed.clone(), spec.dedup_tol);
            }
            let mut i = 0;
            while i < out.len() {
                for g in &spec.generators {
                    let q = out[i].conjugated(g);
                    if push_new(&mut out, q, spec.dedup_tol) && out.len() > ORBIT_CAP {
                        return Err(Error::NonFiniteOrbit { cap: ORBIT_CAP });
                    }
                }
                i += 1;
            }
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

/// Group elements mapping `generic` to pairwise distinct points, one per
/// orbit point. Applied to a special seed these give the orbit with
/// multiplicities, which keeps the weights m_k/n_k valid when points merge.
fn transversal(group: &[DMatrix<f64>], generic: &Projector) -> Vec<DMatrix<f64>> {
    let mut images: Vec<Projector> = Vec::new();
    let mut reps = Vec::new();
    for g in group {
        if push_new(&mut images, generic.conjugated(g), ORBIT_DEDUP_TOL) {
            reps.push(g.clone());
        }
    }
    reps
}

fn check_range(name: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !(value >= lo - PARAM_SLACK && value <= hi + PARAM_SLACK) {
        return Err(Error::Domain(format!("{name} = {value} outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn sqrt0(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

fn from_rows(d: usize, rows: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(d, d, rows)
}

/// d lines forming a simplex around e = (1,…,1) plus the hyperplane e^⊥.
/// Lines carry 1/d each, the hyperplane carries m; the measure is
/// σ_1 + m σ_{d−1}.
pub fn family_lines_hyperplane(d: usize, m: f64) -> Result<(Configuration, SignedMeasure)> {
    if d < 2 {
        return Err(Error::Domain(format!("d = {d} but at least 2 is required")));
    }
    let lo = -1.0 / (d as f64 - 1.0);
    check_range("m", m, lo, 1.0)?;
    let s = sqrt0(1.0 - m);
    let shift = (sqrt0(1.0 + (d as f64 - 1.0) * m) - s) / d as f64;
    let lines = (0..d)
        .map(|i| {
            let p = DVector::from_fn(d, |j, _| shift + if i == j { s } else { 0.0 });
            Projector::line(&p)
        })
        .collect::<Result<Vec<_>>>()?;
    let e = DVector::from_element(d, 1.0);
    let hyperplane = complement(&Projector::line(&e)?);
    let config = Configuration::from_groups(vec![(lines, 1.0 / d as f64), (vec![hyperplane], m)])?;
    let measure = SignedMeasure::from_pairs(d, &[(1, 1.0), (d - 1, m)])?;
    Ok((config, measure))
}

/// Two coordinate lines and two block-diagonal planes in R⁴ with measure
/// m₁σ₁ + σ₂ (weights m₁/2 per line and 1/2 per plane).
pub fn family_r4_1design(m1: f64) -> Result<(Configuration, SignedMeasure)> {
    check_range("m1", m1, -2.0, 2.0)?;
    let lines = [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]
        .iter()
        .map(|v| Projector::line(&DVector::from_row_slice(v)))
        .collect::<Result<Vec<_>>>()?;
    let (u, v) = (sqrt0(2.0 - m1) / 2.0, sqrt0(2.0 + m1) / 2.0);
    let planes = [1.0, -1.0]
        .iter()
        .map(|&sign| {
            let (x, y) = (u, sign * v);
            let b = [x * x, x * y, x * y, y * y];
            let mut m = DMatrix::zeros(4, 4);
            for (offset, (i, j)) in [(0, (0, 0)), (1, (0, 1)), (2, (1, 0)), (3, (1, 1))] {
                m[(i, j)] = b[offset];
                m[(i + 2, j + 2)] = b[offset];
            }
            Projector::from_raw(2, m)
        })
        .collect();
    let config = Configuration::from_groups(vec![(lines, m1 / 2.0), (planes, 0.5)])?;
    let measure = SignedMeasure::from_pairs(4, &[(1, m1), (2, 1.0)])?;
    Ok((config, measure))
}

fn tetrahedral_generators() -> Vec<DMatrix<f64>> {
    vec![
        from_rows(3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        from_rows(3, &[-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]),
    ]
}

/// (1/2) p pᵀ with p = (√(1−a), √(1+a), 0, …).
fn half_line(d: usize, a: f64) -> Projector {
    let mut p = DVector::zeros(d);
    p[0] = sqrt0(1.0 - a);
    p[1] = sqrt0(1.0 + a);
    Projector::from_raw(1, &p * p.transpose() * 0.5)
}

fn orbit_with_multiplicity(group: &[DMatrix<f64>], generic: &Projector, seed: &Projector) -> Vec<Projector> {
    transversal(group, generic)
        .iter()
        .map(|g| seed.conjugated(g))
        .collect()
}

/// Six lines and four planes in R³ under the tetrahedral group; a 2-design
/// for σ₁ + m₂σ₂, m₂ ∈ [−3/8, 3/2]. At m₂ = 3/2 the lines coincide in pairs.
pub fn family_r3_2design(m2: f64) -> Result<(Configuration, SignedMeasure)> {
    check_range("m2", m2, -3.0 / 8.0, 1.5)?;
    let a_of = |m: f64| sqrt0((3.0 + 8.0 * m) / 15.0);
    let group = group_closure(&tetrahedral_generators(), 3, GROUP_CLOSURE_CAP)?;
    let lines = orbit_with_multiplicity(&group, &half_line(3, a_of(0.3)), &half_line(3, a_of(m2)));
    let e = DVector::from_element(3, 1.0);
    let plane = complement(&Projector::line(&e)?);
    let planes = orbit_with_multiplicity(&group, &plane, &plane);
    let config = Configuration::from_groups(vec![(lines, 1.0 / 6.0), (planes, m2 / 4.0)])?;
    let measure = SignedMeasure::from_pairs(3, &[(1, 1.0), (2, m2)])?;
    Ok((config, measure))
}

fn r4_plane_pair(m2: f64) -> [Projector; 2] {
    let b = sqrt0(2.0 - 1.5 / m2);
    let s1 = sqrt0(1.0 - b * b);
    let s2 = sqrt0(2.0 - 3.0 * b + b * b);
    let s4 = sqrt0(4.0 - b * b);
    let s5 = sqrt0(2.0 + 3.0 * b + b * b);
    [1.0, -1.0].map(|sg: f64| {
        #[rustfmt::skip]
        let rows = [
            3.0 - sg * s1, s2, sg * s4, -sg * s5,
            s2, 3.0 + sg * s1, s5, s4,
            sg * s4, s5, 3.0 - sg * s1, -sg * s2,
            -sg * s5, s4, -sg * s2, 3.0 + sg * s1,
        ];
        Projector::from_raw(2, from_rows(4, &rows) / 6.0)
    })
}

/// Eight lines (orbit under a signed cyclic group of order 64) and eight
/// planes (two orbits under a cyclic group of order 4) in R⁴; a 2-design for
/// σ₁ + m₂σ₂, m₂ ∈ [3/4, 3/2].
pub fn family_r4_2design(m2: f64) -> Result<(Configuration, SignedMeasure)> {
    check_range("m2", m2, 0.75, 1.5)?;
    let a_of = |m: f64| sqrt0((8.0 * m - 3.0) / 9.0);
    #[rustfmt::skip]
    let shift = from_rows(4, &[
        0.0, 0.0, 0.0, 1.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
    ]);
    let mut flip = DMatrix::identity(4, 4);
    flip[(0, 0)] = -1.0;
    let g1 = group_closure(&[shift, flip], 4, GROUP_CLOSURE_CAP)?;
    let lines = orbit_with_multiplicity(&g1, &half_line(4, a_of(1.1)), &half_line(4, a_of(m2)));

    #[rustfmt::skip]
    let r3 = from_rows(4, &[
        0.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, -1.0,
    ]);
    let g2 = group_closure(&[r3], 4, GROUP_CLOSURE_CAP)?;
    let generic = r4_plane_pair(1.1);
    let seeds = r4_plane_pair(m2);
    let planes = generic
        .iter()
        .zip(&seeds)
        .flat_map(|(g, s)| orbit_with_multiplicity(&g2, g, s))
        .collect();
    let config = Configuration::from_groups(vec![(lines, 1.0 / 8.0), (planes, m2 / 8.0)])?;
    let measure = SignedMeasure::from_pairs(4, &[(1, 1.0), (2, m2)])?;
    Ok((config, measure))
}

/// The plane whose orbit of 16 forms, with the coordinate axes, the R⁵ design.
pub fn r5_seed_plane() -> Projector {
    let s3 = 3f64.sqrt();
    let a = ((9.0 + 5.0 * s3) / 6.0).sqrt();
    let b = ((9.0 - 5.0 * s3) / 6.0).sqrt();
    let c = (3.0 - 5.0 * s3) / 6.0;
    let e = (3.0 + 5.0 * s3) / 6.0;
    let (h, q) = (1.5f64.sqrt(), (2.0f64 / 3.0).sqrt());
    #[rustfmt::skip]
    let rows = [
        2.0, h, a, c, q,
        h, 2.0, b, q, e,
        a, b, 2.0, -a, -b,
        c, q, -a, 2.0, h,
        q, e, -b, h, 2.0,
    ];
    Projector::from_raw(2, from_rows(5, &rows) / 5.0)
}

pub fn r5_generators() -> Vec<DMatrix<f64>> {
    let mut g1 = DMatrix::identity(5, 5);
    g1[(3, 3)] = 0.0;
    g1[(4, 4)] = 0.0;
    g1[(3, 4)] = 1.0;
    g1[(4, 3)] = -1.0;
    let mut g2 = DMatrix::identity(5, 5);
    g2[(0, 0)] = 0.0;
    g2[(1, 1)] = 0.0;
    g2[(0, 1)] = -1.0;
    g2[(1, 0)] = 1.0;
    g2[(4, 4)] = -1.0;
    vec![g1, g2]
}

/// Five coordinate axes and sixteen planes in R⁵; a 2-design for
/// σ₁ + (5/3)σ₂.
pub fn family_r5_2design() -> Result<(Configuration, SignedMeasure)> {
    let lines = (0..5).map(|i| Projector::line(&DVector::from_fn(5, |j, _| (i == j) as u8 as f64)));
    let lines = lines.collect::<Result<Vec<_>>>()?;
    let planes = orbit(&OrbitSpec::new(r5_generators(), vec![r5_seed_plane()]))?;
    let m2 = 5.0 / 3.0;
    let n2 = planes.len() as f64;
    let config = Configuration::from_groups(vec![(lines, 0.2), (planes, m2 / n2)])?;
    let measure = SignedMeasure::from_pairs(5, &[(1, 1.0), (2, m2)])?;
    Ok((config, measure))
}

/// {(P_j, ω_j)} ∪ {(I − P_j, (−1)^t ω_j)} together with the measure
/// Σ m_k (σ_k + (−1)^t σ_{d−k}). The input must certify as a cubature of
/// strength t for its induced measure; the output then has strength t + 1.
pub fn double_design(config: &Configuration, t: usize) -> Result<(Configuration, SignedMeasure)> {
    let report = certify(config, t, DEFAULT_TOL)?;
    if !report.is_cubature() {
        return Err(Error::Precondition(format!(
            "input is not a cubature of strength {t}: gap {:e}",
            report.gap
        )));
    }
    let sign = if t.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut points = config.points().to_vec();
    let mut weights = config.weights().to_vec();
    points.extend(config.points().iter().map(complement));
    weights.extend(config.weights().iter().map(|w| sign * w));
    let d = config.d();
    let pairs: Vec<(usize, f64)> = report
        .masses
        .iter()
        .flat_map(|(&k, &m)| [(k, m), (d - k, sign * m)])
        .collect();
    Ok((Configuration::new(points, weights)?, SignedMeasure::from_pairs(d, &pairs)?))
}

/// The named parametrized families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    LinesHyperplane { d: usize, m: f64 },
    R4OneDesign { m1: f64 },
    R3TwoDesign { m2: f64 },
    R4TwoDesign { m2: f64 },
    R5TwoDesign,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::LinesHyperplane { .. } => "lines-hyperplane",
            Family::R4OneDesign { .. } => "r4-1design",
            Family::R3TwoDesign { .. } => "r3-2design",
            Family::R4TwoDesign { .. } => "r4-2design",
            Family::R5TwoDesign => "r5-2design",
        }
    }

    pub fn strength(&self) -> usize {
        match self {
            Family::LinesHyperplane { .. } | Family::R4OneDesign { .. } => 1,
            _ => 2,
        }
    }

    /// Admissible interval of the free parameter, if there is one.
    pub fn parameter_range(&self) -> Option<(f64, f64)> {
        match *self {
            Family::LinesHyperplane { d, .. } => Some((-1.0 / (d as f64 - 1.0), 1.0)),
            Family::R4OneDesign { .. } => Some((-2.0, 2.0)),
            Family::R3TwoDesign { .. } => Some((-3.0 / 8.0, 1.5)),
            Family::R4TwoDesign { .. } => Some((0.75, 1.5)),
            Family::R5TwoDesign => None,
        }
    }

    /// Same family with its parameter replaced.
    pub fn with_parameter(self, value: f64) -> Self {
        match self {
            Family::LinesHyperplane { d, .. } => Family::LinesHyperplane { d, m: value },
            Family::R4OneDesign { .. } => Family::R4OneDesign { m1: value },
            Family::R3TwoDesign { .. } => Family::R3TwoDesign { m2: value },
            Family::R4TwoDesign { .. } => Family::R4TwoDesign { m2: value },
            Family::R5TwoDesign => Family::R5TwoDesign,
        }
    }

    pub fn build(&self) -> Result<(Configuration, SignedMeasure)> {
        match *self {
            Family::LinesHyperplane { d, m } => family_lines_hyperplane(d, m),
            Family::R4OneDesign { m1 } => family_r4_1design(m1),
            Family::R3TwoDesign { m2 } => family_r3_2design(m2),
            Family::R4TwoDesign { m2 } => family_r4_2design(m2),
            Family::R5TwoDesign => family_r5_2design(),
        }
    }
}

/// How a table row is produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RowSource {
    Family(Family),
    /// Lines of the r3-2design family at m₂ = 0, doubled at strength 2.
    DoubledIcosahedralLines,
}

/// One optimal configuration: strength t in R^d with n₁ lines and n₂ planes
/// for the measure m₁σ₁ + m₂σ₂. Masses are kept as (numerator, denominator).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableRow {
    pub t: usize,
    pub d: usize,
    pub n1: usize,
    pub n2: usize,
    pub m1: (i64, i64),
    pub m2: (i64, i64),
    pub source: RowSource,
}

impl TableRow {
    pub fn m1(&self) -> f64 {
        self.m1.0 as f64 / self.m1.1 as f64
    }

    pub fn m2(&self) -> f64 {
        self.m2.0 as f64 / self.m2.1 as f64
    }

    /// The configuration with coincident points merged, and its measure.
    pub fn build(&self) -> Result<(Configuration, SignedMeasure)> {
        let (config, measure) = match self.source {
            RowSource::Family(f) => f.build()?,
            RowSource::DoubledIcosahedralLines => {
                let (c, _) = family_r3_2design(0.0)?;
                double_design(&extract_marginal(&c, 1)?, 2)?
            }
        };
        Ok((config.merge_coincident(DISTINCT_TOL), measure))
    }
}

pub fn table1_fixtures() -> Vec<TableRow> {
    vec![
        TableRow { t: 1, d: 4, n1: 2, n2: 1, m1: (2, 1), m2: (1, 1), source: RowSource::Family(Family::R4OneDesign { m1: 2.0 }) },
        TableRow { t: 2, d: 3, n1: 3, n2: 4, m1: (1, 1), m2: (3, 2), source: RowSource::Family(Family::R3TwoDesign { m2: 1.5 }) },
        TableRow { t: 2, d: 4, n1: 4, n2: 8, m1: (1, 1), m2: (3, 2), source: RowSource::Family(Family::R4TwoDesign { m2: 1.5 }) },
        TableRow { t: 2, d: 5, n1: 5, n2: 16, m1: (1, 1), m2: (5, 3), source: RowSource::Family(Family::R5TwoDesign) },
        TableRow { t: 3, d: 3, n1: 6, n2: 6, m1: (1, 1), m2: (1, 1), source: RowSource::DoubledIcosahedralLines },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate;
    use crate::potential::{ffp, Verdict};

    #[test]
    fn orbit_sizes() {
        let e = DVector::from_element(3, 1.0);
        let plane = complement(&Projector::line(&e).unwrap());
        let planes = orbit(&OrbitSpec::new(tetrahedral_generators(), vec![plane.clone()])).unwrap();
        assert_eq!(planes.len(), 4);
        let lines = orbit(&OrbitSpec::new(tetrahedral_generators(), vec![half_line(3, 0.6)])).unwrap();
        assert_eq!(lines.len(), 6);
        let same = orbit(&OrbitSpec::new(vec![DMatrix::identity(3, 3)], vec![plane.clone()])).unwrap();
        assert_eq!(same, vec![plane]);
        assert_eq!(group_closure(&tetrahedral_generators(), 3, 100).unwrap().len(), 24);
        assert_eq!(orbit(&OrbitSpec::new(r5_generators(), vec![r5_seed_plane()])).unwrap().len(), 16);
    }

    #[test]
    fn r4_groups() {
        let (c, _) = family_r4_2design(1.1).unwrap();
        assert_eq!(c.rank_counts(), [(1, 8), (2, 8)].into());
        assert_eq!(c.distinct_counts_per_rank(DISTINCT_TOL), [(1, 8), (2, 8)].into());
        let (c, _) = family_r4_2design(1.5).unwrap();
        assert_eq!(c.distinct_counts_per_rank(DISTINCT_TOL)[&1], 4);
    }

    #[test]
    fn orbit_is_closed() {
        let gens = tetrahedral_generators();
        let pts = orbit(&OrbitSpec::new(gens.clone(), vec![half_line(3, 0.2)])).unwrap();
        for g in &gens {
            for p in &pts {
                let q = p.conjugated(g);
                assert!(pts.iter().any(|r| r.distance(&q) <= ORBIT_DEDUP_TOL));
            }
        }
    }

    #[test]
    fn infinite_groups_are_rejected() {
        let (c, s) = (1f64.cos(), 1f64.sin());
        let rot = from_rows(2, &[c, -s, s, c]);
        let seed = Projector::coordinate(2, 1);
        assert!(matches!(
            orbit(&OrbitSpec::new(vec![rot], vec![seed])),
            Err(Error::NonFiniteOrbit { .. })
        ));
        let skew = from_rows(2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(
            orbit(&OrbitSpec::new(vec![skew], vec![Projector::coordinate(2, 1)])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn lines_hyperplane_endpoints() {
        let (c, _) = family_lines_hyperplane(4, 1.0).unwrap();
        let first = &c.points()[0];
        assert!(c.points()[..4].iter().all(|p| p.distance(first) < 1e-12));
        let lo = -1.0 / 3.0;
        let (c, _) = family_lines_hyperplane(4, lo).unwrap();
        let h = &c.points()[4];
        for p in &c.points()[..4] {
            assert!((p.matrix().dot(h.matrix()) - 1.0).abs() < 1e-12);
        }
        assert!(family_lines_hyperplane(4, 1.1).is_err());
        assert!(family_lines_hyperplane(4, -0.5).is_err());
        assert!(family_lines_hyperplane(1, 0.0).is_err());
    }

    #[test]
    fn r4_1design_endpoints() {
        let (c, _) = family_r4_1design(0.0).unwrap();
        assert!(c.points()[2].matrix().dot(c.points()[3].matrix()).abs() < 1e-15);
        let (c, _) = family_r4_1design(2.0).unwrap();
        assert!(c.points()[2].distance(&c.points()[3]) < 1e-15);
        assert!(family_r4_1design(2.5).is_err());
        for p in c.points() {
            assert!(validate(p, 1e-12).is_empty());
        }
    }

    #[test]
    fn icosahedral_lines_at_zero() {
        let (c, _) = family_r3_2design(0.0).unwrap();
        let lines = extract_marginal(&c, 1).unwrap();
        let g = lines.gram();
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.2 };
                assert!((g[(i, j)] - want).abs() < 1e-12, "{i} {j} {}", g[(i, j)]);
            }
        }
        assert!((ffp(&lines, 2) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn r3_collapse() {
        let (c, _) = family_r3_2design(1.5).unwrap();
        assert_eq!(c.len(), 10);
        let merged = c.merge_coincident(DISTINCT_TOL);
        assert_eq!(merged.rank_counts(), [(1, 3), (2, 4)].into());
        for p in extract_marginal(&merged, 1).unwrap().points() {
            assert!(p.matrix().iter().filter(|x| (**x - 1.0).abs() < 1e-12).count() == 1);
        }
    }

    #[test]
    fn r5_points_are_projectors() {
        let (c, _) = family_r5_2design().unwrap();
        assert_eq!(c.len(), 21);
        for p in c.points() {
            assert!(validate(p, 1e-10).is_empty(), "{:?}", validate(p, 1e-10));
        }
    }

    #[test]
    fn doubling() {
        let (c, _) = family_r3_2design(0.0).unwrap();
        let lines = extract_marginal(&c, 1).unwrap();
        let (doubled, measure) = double_design(&lines, 2).unwrap();
        assert_eq!(doubled.len(), 12);
        assert!(doubled.weights().iter().all(|&w| w > 0.0));
        assert!(measure.masses.values().all(|m| (m - 1.0).abs() < 1e-15));
        let r = certify(&doubled, 3, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Design, "{r:?}");

        let raw = Configuration::new(vec![Projector::coordinate(3, 1)], vec![1.0]).unwrap();
        assert!(matches!(double_design(&raw, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn self_complementary_doubling() {
        let e = |i: usize| Projector::line(&DVector::from_fn(2, |j, _| (i == j) as u8 as f64)).unwrap();
        let c = Configuration::new(vec![e(0), e(1)], vec![0.5, 0.5]).unwrap();
        let (doubled, measure) = double_design(&c, 1).unwrap();
        assert_eq!(doubled.len(), 4);
        assert_eq!(measure.masses, [(1, 0.0)].into());
        let r = certify(&doubled, 2, 1e-12).unwrap();
        assert_eq!(r.bound, 0.0);
        assert!(r.gap.abs() <= 1e-12 && r.is_cubature(), "{r:?}");
    }

    #[test]
    fn table_rows_match_counts() {
        for row in table1_fixtures() {
            let (c, _) = row.build().unwrap();
            let counts = c.rank_counts();
            assert_eq!((counts[&1], counts[&2]), (row.n1, row.n2), "{row:?}");
            let masses = c.induced_masses();
            assert!((masses[&1] - row.m1()).abs() < 1e-12);
            assert!((masses[&2] - row.m2()).abs() < 1e-12);
        }
    }
}
