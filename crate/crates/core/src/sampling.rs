//! Seeded random exact inputs for property checks. The same seed yields the same
//! classes on every platform (ChaCha8 stream, integer draws only).

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::kring::{CohomologyModel, KClass};
use crate::lattice::{DivisorClass, PolarisedLattice};
use crate::rational::Q;
use crate::Result;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rational(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Q {
    Q::new(BigInt::from(rng.gen_range(1..=max_num)), BigInt::from(rng.gen_range(1..=max_den)))
}

/// `Σ λ_i g_i` with random positive rationals `λ_i = p/q`, `p ≤ 20`, `q ≤ 7`.
pub fn ample_class(rng: &mut ChaCha8Rng, lattice: &PolarisedLattice) -> DivisorClass {
    let mut d = DivisorClass::zero(lattice.rank());
    for g in lattice.ample_generators() {
        d = &d + &g.scale(&rational(rng, 20, 7));
    }
    d
}

/// `Σ c_i g_i` with integers `1 ≤ c_i ≤ max`.
pub fn integral_ample(rng: &mut ChaCha8Rng, lattice: &PolarisedLattice, max: i64) -> DivisorClass {
    let mut d = DivisorClass::zero(lattice.rank());
    for g in lattice.ample_generators() {
        d = &d + &g.scale(&Q::from_integer(BigInt::from(rng.gen_range(1..=max))));
    }
    d
}

/// Two distinct ample classes, not proportional.
pub fn ample_pair(rng: &mut ChaCha8Rng, lattice: &PolarisedLattice) -> (DivisorClass, DivisorClass) {
    loop {
        let a = ample_class(rng, lattice);
        let b = ample_class(rng, lattice);
        if a != b {
            return (a, b);
        }
    }
}

/// Sum of `rank` line-bundle classes `O(D_j)` (`1 ≤ rank ≤ max_rank`) with
/// integral `D_j` of coordinates in `[-2, 2]`, with a random sign.
pub fn k_class(rng: &mut ChaCha8Rng, model: &CohomologyModel, max_rank: u32) -> Result<KClass> {
    let rank = rng.gen_range(1..=max_rank);
    let rho = model.lattice_rank();
    let mut c = model.zero();
    for _ in 0..rank {
        let d = DivisorClass((0..rho).map(|_| Q::from_integer(BigInt::from(rng.gen_range(-2..=2)))).collect());
        c = c.add(&model.line_class(&d)?);
    }
    if rng.gen_bool(0.25) {
        c = c.scale(&Q::from_integer(BigInt::from(-1)));
    }
    Ok(c)
}

/// Multiplicities `1 ≤ a_i ≤ max` for scaling checks.
pub fn multiplicities(rng: &mut ChaCha8Rng, count: usize, max: u32) -> Vec<u32> {
    (0..count).map(|_| rng.gen_range(1..=max)).collect()
}

/// Relative perturbation of each coordinate by a random factor in `[1 - p, 1 + p]`,
/// `p = percent / 100`, drawn on a grid of step `p / 100`.
pub fn perturb(rng: &mut ChaCha8Rng, d: &DivisorClass, percent: i64) -> DivisorClass {
    DivisorClass(
        d.0.iter()
            .map(|x| {
                let k = rng.gen_range(-100..=100i64);
                x * (Q::from_integer(BigInt::from(1)) + Q::new(BigInt::from(k * percent), BigInt::from(10_000)))
            })
            .collect(),
    )
}
