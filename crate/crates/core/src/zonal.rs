//! Zonal polynomials at identity matrices, the moment matrix T_{K,d}(t) and
//! the exact lower bound of the fusion frame potential.
//!
//! C_π(I_k) depends only on π and k (zero extension does not change the
//! value), so no ambient dimension appears in [`zonal_at_identity`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{hypergeom_coeff, partitions_of, Partition};

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// C_π(I_k) = 2^{2|π|} |π|! (k/2)_π Π_{i<j}(2π_i − 2π_j − i + j) / Π_i (2π_i + l(π) − i)!
///
/// Vanishes when l(π) > k.
pub fn zonal_at_identity(pi: &Partition, k: usize) -> BigRational {
    let l = pi.length();
    if l > k {
        return BigRational::zero();
    }
    let n = pi.size();
    let mut value = BigRational::from_integer(BigInt::from(2).pow(2 * n as u32) * factorial(n));
    value *= hypergeom_coeff(&BigRational::new(BigInt::from(k), BigInt::from(2)), pi);
    for i in 1..=l {
        for j in (i + 1)..=l {
            let (pi_i, pi_j) = (pi.part(i) as i64, pi.part(j) as i64);
            value *= int(2 * pi_i - 2 * pi_j - i as i64 + j as i64);
        }
        value /= BigRational::from_integer(factorial(2 * pi.part(i) + l - i));
    }
    value
}

/// Checks Σ_{|π|=t} C_π(I_k) = k^t for 1 ≤ k ≤ 8, 0 ≤ t ≤ 6.
pub fn trace_identity_holds() -> bool {
    (1..=8usize).all(|k| {
        (0..=6usize).all(|t| {
            let sum = partitions_of(t, usize::MAX)
                .iter()
                .map(|pi| zonal_at_identity(pi, k))
                .fold(BigRational::zero(), |a, b| a + b);
            sum == int(k as i64).pow(t as i32)
        })
    })
}

fn ensure_normalized() {
    static CHECK: OnceLock<bool> = OnceLock::new();
    let ok = *CHECK.get_or_init(trace_identity_holds);
    assert!(ok, "zonal polynomial normalization self-test failed");
}

/// The |K|×|K| matrix of double Haar averages of ⟨P,Q⟩^t.
#[derive(Clone, Debug, PartialEq)]
pub struct TMatrix {
    pub d: usize,
    pub t: usize,
    /// Ranks in ascending order; row/column i corresponds to `ranks[i]`.
    pub ranks: Vec<usize>,
    pub entries: Vec<Vec<BigRational>>,
}

impl TMatrix {
    pub fn index_of(&self, k: usize) -> Option<usize> {
        self.ranks.iter().position(|&r| r == k)
    }

    pub fn entry(&self, k: usize, l: usize) -> Option<&BigRational> {
        Some(&self.entries[self.index_of(k)?][self.index_of(l)?])
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    /// mᵀ T m for masses indexed by rank (missing ranks count as zero).
    pub fn quadratic_form(&self, masses: &BTreeMap<usize, BigRational>) -> BigRational {
        let m: Vec<BigRational> = self
            .ranks
            .iter()
            .map(|k| masses.get(k).cloned().unwrap_or_else(BigRational::zero))
            .collect();
        let mut acc = BigRational::zero();
        for (i, mi) in m.iter().enumerate() {
            if mi.is_zero() {
                continue;
            }
            for (j, mj) in m.iter().enumerate() {
                acc += mi * &self.entries[i][j] * mj;
            }
        }
        acc
    }

    /// T v for a vector indexed like `ranks`.
    pub fn apply(&self, v: &[BigRational]) -> Vec<BigRational> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(v).fold(BigRational::zero(), |a, (x, y)| a + x * y))
            .collect()
    }
}

/// T_{K,d}(t) = Σ_{|π|=t, l(π) ≤ d} c_π c_πᵀ / C_π(I_d), c_π = (C_π(I_k))_{k∈K}.
pub fn t_matrix(d: usize, ranks: &[usize], t: usize) -> Result<TMatrix> {
    ensure_normalized();
    let ranks = validated_ranks(d, ranks)?;
    let r = ranks.len();
    let mut entries = vec![vec![BigRational::zero(); r]; r];
    for pi in partitions_of(t, d) {
        let c: Vec<BigRational> = ranks.iter().map(|&k| zonal_at_identity(&pi, k)).collect();
        if c.iter().all(Zero::is_zero) {
            continue;
        }
        let norm = zonal_at_identity(&pi, d);
        for i in 0..r {
            for j in 0..r {
                entries[i][j] += &c[i] * &c[j] / &norm;
            }
        }
    }
    Ok(TMatrix { d, t, ranks, entries })
}

/// E_{P∈G_{k,d}} E_{Q∈G_{ℓ,d}} ⟨P,Q⟩^t, exactly.
pub fn mean_inner_power(d: usize, k: usize, l: usize, t: usize) -> Result<BigRational> {
    let tm = t_matrix(d, &[k, l], t)?;
    Ok(tm.entry(k, l).expect("rank present").clone())
}

fn validated_ranks(d: usize, ranks: &[usize]) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = ranks.iter().copied().collect();
    if let Some(&bad) = set.iter().find(|&&k| k == 0 || k >= d) {
        return Err(Error::Domain(format!("rank {bad} outside 1..{}", d.saturating_sub(1))));
    }
    Ok(set.into_iter().collect())
}

/// σ = Σ_k m_k σ_{k,d} with floating point masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedMeasure {
    pub d: usize,
    pub masses: BTreeMap<usize, f64>,
}

impl SignedMeasure {
    pub fn new(d: usize, masses: BTreeMap<usize, f64>) -> Result<Self> {
        validated_ranks(d, &masses.keys().copied().collect::<Vec<_>>())?;
        if let Some((k, m)) = masses.iter().find(|(_, m)| !m.is_finite()) {
            return Err(Error::Domain(format!("mass of rank {k} is not finite: {m}")));
        }
        Ok(Self { d, masses })
    }

    pub fn from_pairs(d: usize, pairs: &[(usize, f64)]) -> Result<Self> {
        let mut masses = BTreeMap::new();
        for &(k, m) in pairs {
            *masses.entry(k).or_insert(0.0) += m;
        }
        Self::new(d, masses)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.masses.keys().copied().collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.values().sum()
    }

    pub fn mass(&self, k: usize) -> f64 {
        self.masses.get(&k).copied().unwrap_or(0.0)
    }

    /// Exact binary value of every mass.
    pub fn to_exact(&self) -> ExactMeasure {
        ExactMeasure {
            d: self.d,
            masses: self
                .masses
                .iter()
                .map(|(&k, &m)| (k, BigRational::from_float(m).expect("finite mass")))
                .collect(),
        }
    }

    /// Masses recognized as rationals with denominator ≤ `max_den`, if all are.
    pub fn recognize_exact(&self, max_den: i64) -> Option<ExactMeasure> {
        let masses = self
            .masses
            .iter()
            .map(|(&k, &m)| recognize_rational(m, max_den).map(|q| (k, q)))
            .collect::<Option<BTreeMap<_, _>>>()?;
        Some(ExactMeasure { d: self.d, masses })
    }

    /// 𝒯_σ(t), computed exactly from the binary masses and rounded once.
    pub fn lower_bound(&self, t: usize) -> Result<f64> {
        Ok(self.to_exact().lower_bound(t)?.to_f64().unwrap_or(f64::NAN))
    }
}

/// σ = Σ_k m_k σ_{k,d} with exact rational masses.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMeasure {
    pub d: usize,
    pub masses: BTreeMap<usize, BigRational>,
}

impl ExactMeasure {
    pub fn new(d: usize, masses: BTreeMap<usize, BigRational>) -> Result<Self> {
        validated_ranks(d, &masses.keys().copied().collect::<Vec<_>>())?;
        Ok(Self { d, masses })
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.masses.keys().copied().collect()
    }

    pub fn to_float(&self) -> SignedMeasure {
        SignedMeasure {
            d: self.d,
            masses: self
                .masses
                .iter()
                .map(|(&k, m)| (k, m.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }

    /// 𝒯_σ(t) = mᵀ T_{K,d}(t) m.
    pub fn lower_bound(&self, t: usize) -> Result<BigRational> {
        if self.masses.is_empty() {
            return Ok(BigRational::zero());
        }
        let tm = t_matrix(self.d, &self.ranks(), t)?;
        Ok(tm.quadratic_form(&self.masses))
    }
}

/// 𝒯_σ(t) for a measure supported on `ranks`.
pub fn lower_bound(measure: &SignedMeasure, ranks: &[usize], t: usize) -> Result<f64> {
    if let Some(k) = measure
        .masses
        .iter()
        .find(|(k, m)| **m != 0.0 && !ranks.contains(k))
        .map(|(k, _)| *k)
    {
        return Err(Error::Domain(format!("measure has mass on rank {k} outside {ranks:?}")));
    }
    measure.lower_bound(t)
}

/// Best rational approximation with denominator ≤ `max_den` that matches `x`
/// to within 1e-12 relative, via continued fractions.
pub fn recognize_rational(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let tol = 1e-12 * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            return None;
        }
        if (h2 as f64 / k2 as f64 - x).abs() <= tol {
            return Some(BigRational::new(BigInt::from(h2), BigInt::from(k2)));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// "p/q" (or "p" for integers).
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses "p/q", an integer, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Input(format!("cannot parse {s:?} as a number"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Input(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(BigRational::from_integer(n));
    }
    // Decimal literal: exact base-10 value.
    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    Ok(BigRational::from_integer(digits) * ten.pow(scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn zonal_examples() {
        for k in 0..9 {
            assert_eq!(zonal_at_identity(&p(&[1]), k), q(k as i64, 1));
        }
        assert_eq!(zonal_at_identity(&p(&[1, 1]), 1), q(0, 1));
        assert_eq!(zonal_at_identity(&p(&[2]), 3), q(5, 1));
        assert_eq!(zonal_at_identity(&p(&[1, 1]), 3), q(4, 1));
        assert_eq!(zonal_at_identity(&Partition::zero(), 4), q(1, 1));
    }

    #[test]
    fn trace_identity() {
        assert!(trace_identity_holds());
    }

    #[test]
    fn t_matrix_examples() {
        let tm = t_matrix(5, &[1, 2, 4], 1).unwrap();
        for (i, &k) in tm.ranks.iter().enumerate() {
            for (j, &l) in tm.ranks.iter().enumerate() {
                assert_eq!(tm.entries[i][j], q((k * l) as i64, 5));
            }
        }
        let tm = t_matrix(3, &[2, 1], 2).unwrap();
        assert_eq!(tm.ranks, vec![1, 2]);
        assert_eq!(tm.entries, vec![vec![q(1, 5), q(8, 15)], vec![q(8, 15), q(28, 15)]]);
        assert!(t_matrix(3, &[3], 2).is_err());
    }

    #[test]
    fn mean_inner_power_examples() {
        assert_eq!(mean_inner_power(7, 3, 2, 1).unwrap(), q(6, 7));
        assert_eq!(mean_inner_power(3, 1, 1, 2).unwrap(), q(1, 5));
        assert_eq!(mean_inner_power(4, 2, 2, 2).unwrap(), q(10, 9));
    }

    #[test]
    fn bounds() {
        let m = ExactMeasure::new(5, [(1, q(1, 1)), (2, q(5, 3))].into()).unwrap();
        assert_eq!(m.lower_bound(2).unwrap(), q(131, 45));
        let m = ExactMeasure::new(3, [(1, q(1, 1)), (2, q(3, 2))].into()).unwrap();
        // (3 + 16·3/2 + 28·9/4)/15 = 90/15
        assert_eq!(m.lower_bound(2).unwrap(), q(6, 1));
        let f = SignedMeasure::from_pairs(5, &[(1, 1.0), (2, 5.0 / 3.0)]).unwrap();
        assert!((f.lower_bound(2).unwrap() - 131.0 / 45.0).abs() < 1e-14);
        assert!(lower_bound(&f, &[1], 2).is_err());
        assert!(lower_bound(&f, &[1, 2, 3], 2).is_ok());
    }

    #[test]
    fn rational_recognition() {
        assert_eq!(recognize_rational(5.0 / 3.0, 10_000), Some(q(5, 3)));
        assert_eq!(recognize_rational(-0.375, 10_000), Some(q(-3, 8)));
        assert_eq!(recognize_rational(2.0, 10_000), Some(q(2, 1)));
        assert_eq!(recognize_rational(std::f64::consts::PI, 10_000), None);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("5/3").unwrap(), q(5, 3));
        assert_eq!(parse_rational("-2").unwrap(), q(-2, 1));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("1.5e1").unwrap(), q(15, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&q(131, 45)), "131/45");
        assert_eq!(format_rational(&q(6, 1)), "6");
    }
}
