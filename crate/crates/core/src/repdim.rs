//! Dimensions of irreducible O(d)-representations and of polynomial spaces
//! on single Grassmannians and unions of Grassmannians.
//!
//! All arithmetic is carried out in exact rationals and the results are
//! asserted to be integral.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::partitions::{conjugate, enumerate, Partition};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Validated, deduplicated rank set with every rank in `1..d`.
pub fn rank_set(d: usize, ranks: &[usize]) -> Result<BTreeSet<usize>> {
    if ranks.is_empty() {
        return Err(Error::Domain("rank set is empty".into()));
    }
    let set: BTreeSet<usize> = ranks.iter().copied().collect();
    if let Some(&bad) = set.iter().find(|&&k| k == 0 || k >= d) {
        return Err(Error::Domain(format!("rank {bad} outside 1..{}", d.saturating_sub(1))));
    }
    Ok(set)
}

/// Dimension of the irreducible O(d)-representation labelled by `pi`.
///
/// Valid labels satisfy π̄_1 + π̄_2 ≤ d. Labels with l(π) > d/2 are mapped to
/// their associated partition (first column length c replaced by d − c),
/// which has the same dimension.
pub fn dim_irrep(d: usize, pi: &Partition) -> Result<u64> {
    if d == 0 {
        return Err(Error::Domain("ambient dimension must be at least 1".into()));
    }
    let conj = conjugate(pi);
    if conj.part(1) + conj.part(2) > d {
        return Err(Error::Domain(format!("{pi} is not an O({d}) label")));
    }
    let half = d / 2;
    let pi = if pi.length() > half {
        associated(d, pi)
    } else {
        pi.clone()
    };

    let dd = d as i64;
    let lambda: Vec<BigRational> = (1..=half)
        .map(|i| rat(dd, 2) + rat(pi.part(i) as i64 - i as i64, 1))
        .collect();

    let mut acc = BigRational::one();
    for i in 1..=half {
        for j in (i + 1)..=half {
            let (li, lj) = (&lambda[i - 1], &lambda[j - 1]);
            let num = (li + lj) * (li - lj);
            let den = rat((j - i) as i64 * (dd - i as i64 - j as i64), 1);
            acc *= num / den;
        }
    }
    if d % 2 == 1 {
        for i in 1..=half {
            acc *= rat(2, 1) * &lambda[i - 1] / rat(dd - 2 * i as i64, 1);
        }
    } else if half > 0 && pi.part(half) > 0 {
        acc *= rat(2, 1);
    }

    assert!(acc.is_integer(), "non-integral dimension {acc} for {pi} at d = {d}");
    Ok(acc.to_integer().to_u64().expect("dimension fits in u64"))
}

fn associated(d: usize, pi: &Partition) -> Partition {
    let mut conj = conjugate(pi).parts().to_vec();
    conj[0] = d - conj[0];
    conj.sort_unstable_by(|a, b| b.cmp(a));
    conjugate(&Partition::new(conj).expect("sorted"))
}

/// dim Pol_t(G_{k,d}) = Σ_{|π| ≤ t, l(π) ≤ min(k, d−k)} dim H^d_{2π}.
pub fn dim_pol_single(d: usize, k: usize, t: usize) -> Result<u64> {
    if k == 0 || k >= d {
        return Err(Error::Domain(format!("rank {k} outside 1..{}", d.saturating_sub(1))));
    }
    enumerate(t, k.min(d - k))
        .iter()
        .map(|pi| dim_irrep(d, &pi.doubled()))
        .sum()
}

/// Ranks ordered by min(k, d−k) descending, ties by ascending k.
pub fn canonical_rank_order(d: usize, ranks: &BTreeSet<usize>) -> Vec<usize> {
    let mut order: Vec<usize> = ranks.iter().copied().collect();
    order.sort_by(|a, b| {
        let (ma, mb) = ((*a).min(d - a), (*b).min(d - b));
        mb.cmp(&ma).then(a.cmp(b))
    });
    order
}

/// Σ_{i=1}^{s} dim Pol_{t−i+1}(G_{k_i,d}) for an explicit rank ordering,
/// with s = min(t+1, r). This is a lower bound for every ordering and
/// exact for the canonical one.
pub fn dim_pol_ordered(d: usize, order: &[usize], t: usize) -> Result<u64> {
    let s = (t + 1).min(order.len());
    order[..s]
        .iter()
        .enumerate()
        .map(|(i, &k)| dim_pol_single(d, k, t - i))
        .sum()
}

/// dim Pol_t(G_{K,d}).
pub fn dim_pol_union(d: usize, ranks: &[usize], t: usize) -> Result<u64> {
    let set = rank_set(d, ranks)?;
    dim_pol_ordered(d, &canonical_rank_order(d, &set), t)
}

/// μ_π^d(K) = |{k ∈ K : l(π) ≤ k ≤ d − l(π)}|.
pub fn mu_k(d: usize, ranks: &[usize], pi: &Partition) -> usize {
    let l = pi.length();
    let set: BTreeSet<usize> = ranks.iter().copied().collect();
    set.into_iter().filter(|&k| l <= k && k + l <= d).count()
}

/// r(K) = max_{k ∈ K} min(k, d − k).
pub fn max_rank_index(d: usize, ranks: &[usize]) -> usize {
    ranks.iter().map(|&k| k.min(d.saturating_sub(k))).max().unwrap_or(0)
}

/// Multiplicity of H^d_{2π} in Pol_t(G_{K,d}).
pub fn multiplicity(d: usize, ranks: &[usize], pi: &Partition, t: usize) -> usize {
    if pi.size() > t || pi.length() > max_rank_index(d, ranks) {
        return 0;
    }
    (t - pi.size() + 1).min(mu_k(d, ranks, pi))
}

/// Minimal number of distinct points of a nonnegative-weight cubature of
/// the given `strength` on G_{K,d}: dim Pol_{⌊strength/2⌋}(G_{K,d}).
pub fn min_points_lower_bound(d: usize, ranks: &[usize], strength: usize) -> Result<u64> {
    dim_pol_union(d, ranks, strength / 2)
}

/// Cardinality bound from the marginals: every rank-k part of a cubature of
/// strength t is a cubature of strength s = t − |K| + 1 on G_{k,d}, hence
/// carries at least dim Pol_{⌊s/2⌋}(G_{k,d}) distinct points. Returns 0 when
/// t < |K| − 1 (no marginal statement).
pub fn marginal_points_lower_bound(d: usize, ranks: &[usize], strength: usize) -> Result<u64> {
    let set = rank_set(d, ranks)?;
    if strength + 1 < set.len() {
        return Ok(0);
    }
    let s = strength + 1 - set.len();
    set.iter().map(|&k| dim_pol_single(d, k, s / 2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn irrep_examples() {
        for d in 1..8 {
            assert_eq!(dim_irrep(d, &Partition::zero()).unwrap(), 1);
        }
        assert_eq!(dim_irrep(3, &p(&[2])).unwrap(), 5);
        assert_eq!(dim_irrep(3, &p(&[1])).unwrap(), 3);
        assert_eq!(dim_irrep(4, &p(&[2, 2])).unwrap(), 10);
        // Associated labels share dimensions.
        assert_eq!(dim_irrep(3, &p(&[1, 1])).unwrap(), 3);
        assert_eq!(dim_irrep(4, &p(&[1, 1, 1])).unwrap(), 4);
    }

    #[test]
    fn spherical_harmonics_count() {
        // dim H_(j) on O(3) is 2j + 1.
        for j in 0..8 {
            assert_eq!(dim_irrep(3, &p(&[j])).unwrap(), 2 * j as u64 + 1);
        }
    }

    #[test]
    fn invalid_label() {
        assert!(matches!(dim_irrep(3, &p(&[1, 1, 1, 1])), Err(Error::Domain(_))));
        assert!(matches!(dim_irrep(4, &p(&[2, 2, 1])), Err(Error::Domain(_))));
    }

    #[test]
    fn pol_single() {
        assert_eq!(dim_pol_single(5, 2, 0).unwrap(), 1);
        assert_eq!(dim_pol_single(3, 1, 1).unwrap(), 6);
        assert_eq!(dim_pol_single(3, 2, 1).unwrap(), 6);
        assert!(dim_pol_single(3, 3, 1).is_err());
        assert!(dim_pol_single(3, 0, 1).is_err());
    }

    #[test]
    fn pol_union() {
        assert_eq!(dim_pol_union(3, &[1, 2], 1).unwrap(), 7);
        assert_eq!(dim_pol_union(5, &[2], 3).unwrap(), dim_pol_single(5, 2, 3).unwrap());
        assert_eq!(
            dim_pol_union(4, &[1, 2], 2).unwrap(),
            dim_pol_single(4, 2, 2).unwrap() + dim_pol_single(4, 1, 1).unwrap()
        );
        assert!(dim_pol_union(4, &[], 2).is_err());
        assert!(dim_pol_union(4, &[4], 2).is_err());
    }

    #[test]
    fn canonical_order_ties() {
        let set: BTreeSet<usize> = [1, 2, 3, 4].into_iter().collect();
        assert_eq!(canonical_rank_order(5, &set), vec![2, 3, 1, 4]);
    }

    #[test]
    fn multiplicities() {
        assert_eq!(mu_k(6, &[1, 2, 5], &Partition::zero()), 3);
        assert_eq!(mu_k(3, &[1, 2], &p(&[1])), 2);
        assert_eq!(mu_k(4, &[1, 3], &p(&[1, 1])), 0);
        assert_eq!(multiplicity(3, &[1, 2], &p(&[2]), 1), 0);
        assert_eq!(multiplicity(5, &[1, 2, 3], &Partition::zero(), 1), 2);
        assert_eq!(multiplicity(5, &[1, 2, 3], &Partition::zero(), 7), 3);
        assert_eq!(multiplicity(3, &[1, 2], &p(&[1]), 2), 2);
    }

    #[test]
    fn point_bounds() {
        assert_eq!(min_points_lower_bound(3, &[1, 2], 2).unwrap(), 7);
        assert_eq!(min_points_lower_bound(4, &[2], 0).unwrap(), 1);
        assert_eq!(
            min_points_lower_bound(4, &[1, 2], 2).unwrap(),
            dim_pol_union(4, &[1, 2], 1).unwrap()
        );
        assert_eq!(marginal_points_lower_bound(3, &[1, 2], 3).unwrap(), 12);
        assert_eq!(marginal_points_lower_bound(3, &[1, 2], 0).unwrap(), 0);
    }
}
