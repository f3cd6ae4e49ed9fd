//! Integer partitions: enumeration, conjugation, the componentwise order and
//! generalized hypergeometric coefficients.
//!
//! Partitions are stored without trailing zeros, so the empty list is the
//! zero partition `(0)`. Comparisons pad with zeros implicitly.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A weakly decreasing list of positive integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition, dropping zero parts. Returns `None` when the
    /// nonzero parts are not weakly decreasing.
    pub fn new(parts: impl Into<Vec<usize>>) -> Option<Self> {
        let mut parts: Vec<usize> = parts.into();
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return None;
        }
        Some(Self { parts })
    }

    pub fn zero() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `π_i` with 1-based index and implicit zero padding.
    pub fn part(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// |π|
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// l(π), the number of nonzero parts.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// The partition 2π = (2π_1, 2π_2, ...).
    pub fn doubled(&self) -> Self {
        Self {
            parts: self.parts.iter().map(|p| 2 * p).collect(),
        }
    }

    pub fn conjugate(&self) -> Self {
        conjugate(self)
    }

    pub fn leq(&self, other: &Partition) -> bool {
        leq(self, other)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "(0)");
        }
        let body: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", body.join(","))
    }
}

impl std::str::FromStr for Partition {
    type Err = String;

    /// Parses `(2,1)`, `2,1` or `(0)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        if inner.trim().is_empty() {
            return Ok(Partition::zero());
        }
        let parts = inner
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        Partition::new(parts).ok_or_else(|| format!("{s:?} is not weakly decreasing"))
    }
}

/// All partitions with |π| ≤ `max_size` and l(π) ≤ `max_length`.
///
/// Graded lexicographic order: by size ascending, then by parts in
/// decreasing lexicographic order, so `(2)` precedes `(1,1)`.
pub fn enumerate(max_size: usize, max_length: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    for n in 0..=max_size {
        out.extend(partitions_of(n, max_length));
    }
    out
}

/// Partitions of exactly `n` with at most `max_length` parts, in decreasing
/// lexicographic order.
pub fn partitions_of(n: usize, max_length: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(n, n, max_length, &mut current, &mut out);
    out
}

fn fill(
    remaining: usize,
    max_part: usize,
    slots: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Partition>,
) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    if slots == 0 {
        return;
    }
    for p in (1..=max_part.min(remaining)).rev() {
        current.push(p);
        fill(remaining - p, p, slots - 1, current, out);
        current.pop();
    }
}

/// π̄ with π̄_k = |{i : π_i ≥ k}|.
pub fn conjugate(pi: &Partition) -> Partition {
    let first = pi.part(1);
    let parts = (1..=first)
        .map(|k| pi.parts.iter().filter(|&&p| p >= k).count())
        .collect();
    Partition { parts }
}

/// π ≤ π' iff π_i ≤ π'_i componentwise (zero padded).
pub fn leq(pi: &Partition, pi_prime: &Partition) -> bool {
    let n = pi.length().max(pi_prime.length()) + 1;
    (1..=n).all(|i| pi.part(i) <= pi_prime.part(i))
}

/// Rising factorial (a)_s = a(a+1)...(a+s-1).
pub fn rising_factorial(a: &BigRational, s: usize) -> BigRational {
    let mut acc = BigRational::one();
    let mut x = a.clone();
    for _ in 0..s {
        acc *= &x;
        x += BigRational::one();
    }
    acc
}

/// Generalized hypergeometric coefficient (a)_π = Π_i (a − (i−1)/2)_{π_i}.
pub fn hypergeom_coeff(a: &BigRational, pi: &Partition) -> BigRational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut acc = BigRational::one();
    let mut shift = BigRational::zero();
    for &p in pi.parts() {
        acc *= rising_factorial(&(a - &shift), p);
        shift += &half;
    }
    acc
}
