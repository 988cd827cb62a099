//! Seeded invariant suite over the shipped catalog, small enough to run in a
//! few seconds. The report depends only on the seed.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::catalog;
use crate::chambers::{chamber_representative, decompose, nonlinearity_witness, segment_crossings_amp, segment_crossings_n1, CrossingValue};
use crate::lattice::{DivisorClass, NewtonOptions};
use crate::par::Exec;
use crate::rational::{q, Q};
use crate::report::{pass_fail, CheckEntry, SelfcheckReport};
use crate::sampling;
use crate::sheafmodel::chamber_constancy_check;
use crate::walls::{box_walls, enumerate_walls, EnumerationOptions, Wall};
use crate::Result;

struct Check {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Check {
    Check { ok, detail: detail.into() }
}

/// `r_{k+1} <= C r_k^2` on every step that starts inside the basin `r_k <= 1/100`.
pub fn quadratic_decay(trace: &[Q]) -> bool {
    let basin = q(1, 100);
    let c = Q::from_integer(BigInt::from(1000));
    trace.windows(2).all(|w| w[0] > basin || w[1] <= &c * &w[0] * &w[0])
}

fn injectivity(seed: u64, pairs: usize) -> Result<Check> {
    let mut rng = sampling::rng(seed);
    let mut bad = 0;
    for name in catalog::NAMES {
        let l = catalog::lattice(name)?;
        for _ in 0..pairs {
            let (a, b) = sampling::ample_pair(&mut rng, &l);
            if l.power_map(&a) == l.power_map(&b) {
                bad += 1;
            }
        }
    }
    Ok(check(bad == 0, format!("{} pairs per entry, {bad} collisions", pairs)))
}

fn newton(seed: u64, targets: usize) -> Result<Check> {
    let mut rng = sampling::rng(seed);
    let opts = NewtonOptions::default();
    let mut failed = 0;
    let mut slow = 0;
    for name in catalog::NAMES {
        let l = catalog::lattice(name)?;
        for _ in 0..targets {
            let alpha = sampling::ample_class(&mut rng, &l);
            let seed = sampling::perturb(&mut rng, &alpha, 10);
            match l.newton_invert_power(&l.power_map(&alpha), &seed, &opts) {
                Ok(r) if r.residual <= opts.tol => {
                    if !quadratic_decay(&r.trace) {
                        slow += 1;
                    }
                }
                _ => failed += 1,
            }
        }
    }
    Ok(check(failed == 0 && slow == 0, format!("{targets} targets per entry, {failed} failures, {slow} without quadratic decay")))
}

fn khovanskii_teissier(seed: u64, pairs: usize) -> Result<Check> {
    let mut rng = sampling::rng(seed);
    let mut bad = 0;
    for name in catalog::NAMES {
        let l = catalog::lattice(name)?;
        for _ in 0..pairs {
            let (a, b) = sampling::ample_pair(&mut rng, &l);
            if !l.khovanskii_teissier(&a, &b)?.holds {
                bad += 1;
            }
        }
        let a = sampling::ample_class(&mut rng, &l);
        let twice = a.scale(&Q::from_integer(BigInt::from(2)));
        if !l.khovanskii_teissier(&a, &twice)?.slacks.iter().all(Zero::is_zero) {
            bad += 1;
        }
    }
    Ok(check(bad == 0, format!("{pairs} pairs per entry plus a proportional pair, {bad} violations")))
}

fn hodge(seed: u64, classes: usize) -> Result<Check> {
    let mut rng = sampling::rng(seed);
    let mut bad = 0;
    for name in catalog::NAMES {
        let l = catalog::lattice(name)?;
        for _ in 0..classes {
            if !l.verify_hodge_index(&sampling::ample_class(&mut rng, &l))?.passed {
                bad += 1;
            }
        }
    }
    Ok(check(bad == 0, format!("{classes} classes per entry, {bad} failed certificates")))
}

fn wall_completeness() -> Result<Check> {
    let opts = EnumerationOptions::default();
    let l = catalog::lattice("p1xp1")?;
    let k = catalog::region("p1xp1", "default", &opts.newton)?;
    let f = catalog::sheaf("p1xp1", "r2c0c2_2")?;
    let set = enumerate_walls(&l, &f, &k, &opts)?;
    let oracle = box_walls(&l, &f, &k, 12, &opts.newton, opts.exec);
    let normals = |w: &[Wall]| w.iter().map(|w| w.normal.clone()).collect::<Vec<_>>();
    let single = normals(&set.walls) == vec![vec![BigInt::one(), -BigInt::one()]];
    Ok(check(
        single && normals(&set.walls) == normals(&oracle),
        format!("p1xp1 (2,0,2): {} walls, oracle {}", set.walls.len(), oracle.len()),
    ))
}

fn chambers(seed: u64, samples: usize) -> Result<Check> {
    let opts = EnumerationOptions::default();
    let mut detail = Vec::new();
    let mut ok = true;
    for (entry, sheaf, region, presented, expected) in [
        ("p1xp1", "r2c0c2_2", "segment", "pair", 3),
        ("p1cubed", "r2c0c2_022", "square", "ideal-twist", 9),
    ] {
        let l = catalog::lattice(entry)?;
        let k = catalog::region(entry, region, &opts.newton)?;
        let f = catalog::sheaf(entry, sheaf)?;
        let p = catalog::presented(entry, presented)?;
        let walls = enumerate_walls(&l, &f, &k, &opts)?.walls;
        let cells = decompose(&k, &walls, Exec::Parallel)?;
        let mut reps = 0;
        let mut constant = 0;
        for (i, c) in cells.iter().enumerate() {
            if chamber_constancy_check(&p, &k, &walls, c, samples, seed + i as u64).is_ok() {
                constant += 1;
            }
            if chamber_representative(&l, c, &walls, None, 64).is_ok() {
                reps += 1;
            }
        }
        ok &= cells.len() == expected && constant == cells.len() && reps == cells.len();
        detail.push(format!("{entry} {region}: {} cells, {constant} constant, {reps} represented", cells.len()));
    }
    Ok(check(ok, detail.join("; ")))
}

fn schmitt() -> Result<Check> {
    let l = catalog::lattice("proj-bundle-p2")?;
    let h0 = DivisorClass(vec![Q::one(), q(1, 5)]);
    let h1 = DivisorClass(vec![Q::one(), q(4, 5)]);
    let wall = Wall::from_ints(&[2, -1]);
    let amp = segment_crossings_amp(&l, &h0, &h1, &wall, 0)?;
    let irrational = matches!(
        amp.crossings.as_slice(),
        [c] if matches!(&c.value, CrossingValue::Algebraic { minpoly, irreducible: true, .. }
            if *minpoly == [-14, 36, 9].map(BigInt::from))
    );
    let n1 = segment_crossings_n1(&l.power_map(&h0), &l.power_map(&h1), std::slice::from_ref(&wall))?;
    let rational = n1.crossings.len() == 1 && n1.crossings[0].rational() == Some(&q(14, 45));
    Ok(check(irrational && rational, "Amp root of 9t^2 + 36t - 14, N1 crossing 14/45"))
}

fn nonlinearity() -> Result<Check> {
    let opts = EnumerationOptions::default();
    let l = catalog::lattice("p1cubed")?;
    let k = catalog::region("p1cubed", "default", &opts.newton)?;
    let f = catalog::sheaf("p1cubed", "r2c0c2_022")?;
    let walls = enumerate_walls(&l, &f, &k, &opts)?.walls;
    let found: Vec<String> = walls
        .iter()
        .filter(|w| nonlinearity_witness(&l, w, 5).is_ok())
        .map(|w| format!("{:?}", w.normal.iter().map(ToString::to_string).collect::<Vec<_>>()))
        .collect();
    Ok(check(!found.is_empty(), format!("witnessed on {} of {} walls", found.len(), walls.len())))
}

fn identities(seed: u64, classes: usize) -> Result<Check> {
    let mut rng = sampling::rng(seed);
    let mut bad = 0;
    for name in catalog::NAMES {
        let l = catalog::lattice(name)?;
        let m = catalog::model(name)?;
        let n = l.dimension();
        for _ in 0..classes {
            let c = sampling::k_class(&mut rng, &m, 4)?;
            let hs: Vec<DivisorClass> = (0..n - 1).map(|_| sampling::integral_ample(&mut rng, &l, 2)).collect();
            let a = sampling::multiplicities(&mut rng, n - 1, 3);
            let ok = m.verify_secondway(&c, &hs)?.holds
                && m.verify_firstway_virtual(&c, &hs)?.holds
                && m.verify_scaling(&c, &hs, &a)?.holds
                && m.verify_telescoping(&c, &hs)?.holds;
            if !ok {
                bad += 1;
            }
        }
    }
    for (name, n) in [("p2", 2i64), ("p3", 3)] {
        let m = catalog::model(name)?;
        for k in -5i64..=5 {
            let chi = m.chi(&m.line_class(&DivisorClass::from_ints(&[k]))?);
            let binom = (1..=n).fold(Q::one(), |acc, j| acc * Q::new(BigInt::from(k + j), BigInt::from(j)));
            if chi != binom {
                bad += 1;
            }
        }
    }
    Ok(check(bad == 0, format!("{classes} classes per model and chi of O(k) on P2, P3, {bad} failures")))
}

pub fn run(seed: u64) -> Result<SelfcheckReport> {
    let checks: Vec<(&str, Check)> = vec![
        ("power-map injectivity", injectivity(seed, 20)?),
        ("newton inversion", newton(seed + 1, 5)?),
        ("khovanskii-teissier", khovanskii_teissier(seed + 2, 20)?),
        ("hodge index", hodge(seed + 3, 10)?),
        ("wall completeness", wall_completeness()?),
        ("chamber structure", chambers(seed + 4, 10)?),
        ("amp/n1 dichotomy", schmitt()?),
        ("nonlinearity", nonlinearity()?),
        ("k-ring identities", identities(seed + 5, 3)?),
    ];
    let all = checks.iter().all(|(_, c)| c.ok);
    Ok(SelfcheckReport {
        seed,
        checks: checks
            .into_iter()
            .map(|(name, c)| CheckEntry {
                name: name.to_string(),
                status: pass_fail(c.ok).to_string(),
                detail: c.detail,
            })
            .collect(),
        status: pass_fail(all).to_string(),
    })
}
