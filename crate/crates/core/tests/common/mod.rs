#![allow(dead_code)]

use std::collections::BTreeMap;

use grassmann_designs::families::{double_design, family_r3_2design, Family};
use grassmann_designs::geometry::{complement, random_projector, Projector};
use grassmann_designs::potential::{extract_marginal, Configuration};
use nalgebra::DVector;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn line(v: &[f64]) -> Projector {
    Projector::line(&DVector::from_vec(v.to_vec())).unwrap()
}

/// The six diagonals of the icosahedron with weight 1/6 each, built by hand.
pub fn icosahedral_lines() -> Configuration {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let dirs = [
        [0.0, 1.0, g],
        [0.0, 1.0, -g],
        [1.0, g, 0.0],
        [1.0, -g, 0.0],
        [g, 0.0, 1.0],
        [-g, 0.0, 1.0],
    ];
    Configuration::new(dirs.iter().map(|v| line(v)).collect(), vec![1.0 / 6.0; 6]).unwrap()
}

/// Orthogonal complements of the icosahedral lines, weight 1/6 each.
pub fn icosahedral_planes() -> Configuration {
    let lines = icosahedral_lines();
    Configuration::new(lines.points().iter().map(complement).collect(), vec![1.0 / 6.0; 6]).unwrap()
}

/// Families at generic parameters, together with the doubled icosahedral lines.
pub fn certified_families() -> Vec<(String, Configuration, usize)> {
    let mut out = Vec::new();
    let families = [
        Family::LinesHyperplane { d: 3, m: 0.4 },
        Family::LinesHyperplane { d: 5, m: -0.2 },
        Family::R4OneDesign { m1: 0.7 },
        Family::R3TwoDesign { m2: 0.3 },
        Family::R4TwoDesign { m2: 1.1 },
        Family::R5TwoDesign,
    ];
    for f in families {
        let (c, _) = f.build().unwrap();
        out.push((format!("{f:?}"), c, f.strength()));
    }
    let (c, _) = family_r3_2design(0.0).unwrap();
    let (doubled, _) = double_design(&extract_marginal(&c, 1).unwrap(), 2).unwrap();
    out.push(("doubled icosahedral lines".into(), doubled, 3));
    out
}

/// Random configuration with 2..=6 points of random ranks and positive weights.
pub fn random_config<R: Rng>(d: usize, rng: &mut R) -> Configuration {
    let n = rng.random_range(2..=6);
    let points: Vec<Projector> = (0..n)
        .map(|_| {
            let k = rng.random_range(1..d);
            random_projector(d, k, rng)
        })
        .collect();
    let weights = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    Configuration::new(points, weights).unwrap()
}

pub fn masses(pairs: &[(usize, f64)]) -> BTreeMap<usize, f64> {
    pairs.iter().copied().collect()
}

pub fn counts(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
    pairs.iter().copied().collect()
}
