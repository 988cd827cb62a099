//! Sign-vector cells of wall arrangements on regions of `P(X)`, crossing
//! parameters along segments in `N_1` (always rational) and in `Amp(X)` (roots of
//! a degree `n-1` polynomial), the nonlinearity mechanism of pulled-back walls,
//! and complete-intersection representatives `A^{n-2} B` of chambers.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CurveClass, DivisorClass, NewtonOptions, PolarisedLattice};
use crate::lp::{max_margin, Constraint, Relation};
use crate::par::{self, Exec};
use crate::poly::{isolate_open, rational_roots_in, Poly};
use crate::rational::{dot, lcm_of_denominators, round_to_dyadic, RatStr, Q};
use crate::region::Region;
use crate::walls::Wall;

/// Affine plane `origin + s·u + t·v` in `N_1` for raster exports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceFile {
    pub origin: Vec<RatStr>,
    pub u: Vec<RatStr>,
    pub v: Vec<RatStr>,
}

/// A wall and a segment of ample classes, crossed in both `Amp(X)` and `N_1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentPreset {
    pub catalog: String,
    pub wall: Vec<i64>,
    pub from: Vec<RatStr>,
    pub to: Vec<RatStr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of(x: &Q) -> Sign {
        match x.cmp(&Q::zero()) {
            Ordering::Less => Sign::Neg,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Zero => '0',
            Sign::Pos => '+',
        }
    }
}

pub fn sign_string(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.symbol()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub signs: Vec<Sign>,
    pub representative: CurveClass,
    /// Walls with sign 0 on the cell.
    pub walls_active: Vec<usize>,
}

impl Chamber {
    pub fn is_open(&self) -> bool {
        self.walls_active.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrossingValue {
    Rational(Q),
    /// Root of `minpoly` (ascending integer coefficients, square-free, no rational
    /// roots) isolated in the open interval `(lo, hi)`.
    Algebraic {
        minpoly: Vec<BigInt>,
        lo: Q,
        hi: Q,
        /// Irreducibility over `Q` is certified (degree at most 3 without rational roots).
        irreducible: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingParameter {
    pub value: CrossingValue,
    /// Indices of the walls crossed at this parameter.
    pub walls: Vec<usize>,
}

impl CrossingParameter {
    pub fn is_rational(&self) -> bool {
        matches!(self.value, CrossingValue::Rational(_))
    }

    pub fn rational(&self) -> Option<&Q> {
        match &self.value {
            CrossingValue::Rational(q) => Some(q),
            CrossingValue::Algebraic { .. } => None,
        }
    }

    /// A rational in a small interval around the value, for ordering and sampling.
    pub fn approx(&self) -> Q {
        match &self.value {
            CrossingValue::Rational(q) => q.clone(),
            CrossingValue::Algebraic { lo, hi, .. } => (lo + hi) / Q::from_integer(2.into()),
        }
    }
}

impl fmt::Display for CrossingParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            CrossingValue::Rational(q) => write!(f, "{q}"),
            CrossingValue::Algebraic { minpoly, lo, hi, .. } => {
                let p = Poly::from_integers(minpoly);
                write!(f, "root of {p} in ({lo}, {hi})")
            }
        }
    }
}

pub fn sign_vector(gamma: &CurveClass, walls: &[Wall]) -> Vec<Sign> {
    walls.iter().map(|w| Sign::of(&w.eval(gamma))).collect()
}

pub fn same_chamber(a: &CurveClass, b: &CurveClass, walls: &[Wall]) -> bool {
    sign_vector(a, walls) == sign_vector(b, walls)
}

/// Barycentric LP for `K ∩ {sign conditions}`: returns a point with maximal
/// uniform margin on the strict conditions, or `None` if the cell is empty.
fn cell_point(region: &Region, rows: &[Vec<Q>], signs: &[Sign]) -> Option<(Vec<Q>, Q)> {
    let k = region.vertices().len();
    let mut hard = region.weight_constraints();
    let mut strict = Vec::new();
    for (row, s) in rows.iter().zip(signs) {
        match s {
            Sign::Zero => hard.push(Constraint {
                coeffs: row.clone(),
                rel: Relation::Eq,
                rhs: Q::zero(),
            }),
            Sign::Pos => strict.push((row.clone(), Q::zero())),
            Sign::Neg => strict.push((row.iter().map(|x| -x).collect(), Q::zero())),
        }
    }
    if strict.is_empty() {
        // closed system; margin is vacuous
        strict.push((vec![Q::zero(); k], -Q::one()));
    }
    match max_margin(vec![true; k], &hard, &strict) {
        Some((x, t)) if t.is_positive() => Some((x, t)),
        _ => None,
    }
}

/// Second stage: keep half the sign margin and push the weights inward so the
/// representative avoids faces of `K` when the cell allows it.
fn centered_point(region: &Region, rows: &[Vec<Q>], signs: &[Sign], margin: &Q) -> Vec<Q> {
    let k = region.vertices().len();
    let half = margin / Q::from_integer(2.into());
    let mut hard = region.weight_constraints();
    for (row, s) in rows.iter().zip(signs) {
        let (coeffs, rel, rhs) = match s {
            Sign::Zero => (row.clone(), Relation::Eq, Q::zero()),
            Sign::Pos => (row.clone(), Relation::Ge, half.clone()),
            Sign::Neg => (row.iter().map(|x| -x).collect(), Relation::Ge, half.clone()),
        };
        hard.push(Constraint { coeffs, rel, rhs });
    }
    let strict: Vec<(Vec<Q>, Q)> = (0..k)
        .map(|i| {
            let mut e = vec![Q::zero(); k];
            e[i] = Q::one();
            (e, Q::zero())
        })
        .collect();
    match max_margin(vec![true; k], &hard, &strict) {
        Some((x, _)) => x,
        None => unreachable!("stage one found a feasible point"),
    }
}

fn interior_weights(region: &Region, rows: &[Vec<Q>], signs: &[Sign]) -> Option<Vec<Q>> {
    let (_, margin) = cell_point(region, rows, signs)?;
    Some(centered_point(region, rows, signs, &margin))
}

/// Convex weights over the region vertices of a relatively interior point of
/// the cell with the given sign vector, or `None` if the cell is empty.
pub fn cell_weights(region: &Region, walls: &[Wall], signs: &[Sign]) -> Option<Vec<Q>> {
    let rows: Vec<Vec<Q>> = walls.iter().map(|w| region.pairing_row(&w.normal_q())).collect();
    interior_weights(region, &rows, signs)
}

/// All realized sign vectors on `K`, including lower-dimensional cells, by
/// extending partial sign vectors one wall at a time with an LP per candidate.
pub fn decompose(region: &Region, walls: &[Wall], exec: Exec) -> Result<Vec<Chamber>> {
    if region.vertices().is_empty() {
        return Err(Error::EmptyRegion);
    }
    let rows: Vec<Vec<Q>> = walls.iter().map(|w| region.pairing_row(&w.normal_q())).collect();
    let mut partial: Vec<Vec<Sign>> = vec![Vec::new()];
    for i in 0..walls.len() {
        let candidates: Vec<Vec<Sign>> = partial
            .iter()
            .flat_map(|p| {
                [Sign::Neg, Sign::Zero, Sign::Pos].into_iter().map(move |s| {
                    let mut v = p.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
        let feasible = par::map(exec, &candidates, |c| cell_point(region, &rows[..=i], c).is_some());
        partial = candidates
            .into_iter()
            .zip(feasible)
            .filter_map(|(c, ok)| ok.then_some(c))
            .collect();
    }
    partial.sort();
    let chambers = par::map(exec, &partial, |signs| {
        let weights = interior_weights(region, &rows, signs).expect("feasible by construction");
        let representative = region.point_from_weights(&weights);
        debug_assert_eq!(&sign_vector(&representative, walls), signs);
        Chamber {
            walls_active: signs
                .iter()
                .enumerate()
                .filter_map(|(i, s)| (*s == Sign::Zero).then_some(i))
                .collect(),
            signs: signs.clone(),
            representative,
        }
    });
    Ok(chambers)
}

/// Per-wall crossings of the segment `γ_u = (1-u)γ₀ + uγ₁`, `u ∈ [0,1]`.
#[derive(Debug, Clone)]
pub struct SegmentCrossings {
    pub crossings: Vec<CrossingParameter>,
    /// Walls containing the entire segment.
    pub containing: Vec<usize>,
}

pub fn segment_crossings_n1(g0: &CurveClass, g1: &CurveClass, walls: &[Wall]) -> Result<SegmentCrossings> {
    if g0 == g1 {
        return Err(Error::Precondition("segment endpoints coincide".into()));
    }
    let mut found: Vec<(Q, usize)> = Vec::new();
    let mut containing = Vec::new();
    for (i, w) in walls.iter().enumerate() {
        let s0 = w.eval(g0);
        let s1 = w.eval(g1);
        if s0.is_zero() && s1.is_zero() {
            containing.push(i);
            continue;
        }
        if s0 == s1 {
            continue;
        }
        let u = &s0 / (&s0 - &s1);
        if !u.is_negative() && u <= Q::one() {
            found.push((u, i));
        }
    }
    found.sort();
    let mut crossings: Vec<CrossingParameter> = Vec::new();
    for (u, i) in found {
        match crossings.last_mut() {
            Some(last) if last.rational() == Some(&u) => last.walls.push(i),
            _ => crossings.push(CrossingParameter {
                value: CrossingValue::Rational(u),
                walls: vec![i],
            }),
        }
    }
    Ok(SegmentCrossings { crossings, containing })
}

/// `f(τ) = a · φ_τ^{n-1}` for `φ_τ = (1-τ)H₀ + τH₁`, ascending coefficients.
pub fn amp_polynomial(lattice: &PolarisedLattice, h0: &DivisorClass, h1: &DivisorClass, wall: &Wall) -> Poly {
    let a = DivisorClass(wall.normal_q());
    let d = h1 - h0;
    let m = lattice.dimension() - 1;
    let mut coeffs = Vec::with_capacity(m + 1);
    let mut binom = Q::one();
    for k in 0..=m {
        let mut classes: Vec<&DivisorClass> = vec![&a];
        classes.extend(std::iter::repeat_n(&d, k));
        classes.extend(std::iter::repeat_n(h0, m - k));
        let v = lattice.intersection_number(&classes).expect("shape checked");
        coeffs.push(&binom * v);
        binom = binom * Q::from_integer(BigInt::from(m - k)) / Q::from_integer(BigInt::from(k + 1));
    }
    Poly::new(coeffs)
}

/// Cauchy bound: every real root has absolute value below it.
fn root_bound(p: &Poly) -> Q {
    let lead = p.leading().abs();
    let max = p.coeffs().iter().map(|c| c.abs()).max().unwrap_or_else(Q::zero);
    Q::one() + max / lead
}

#[derive(Debug, Clone)]
pub struct AmpCrossings {
    pub polynomial: Poly,
    pub crossings: Vec<CrossingParameter>,
}

/// Real roots in `[0,1]` of `a · φ_τ^{n-1}`: rational roots exactly, the rest as
/// Sturm-isolated roots of the rational-root-free square-free part.
pub fn segment_crossings_amp(
    lattice: &PolarisedLattice,
    h0: &DivisorClass,
    h1: &DivisorClass,
    wall: &Wall,
    wall_index: usize,
) -> Result<AmpCrossings> {
    for (i, h) in [h0, h1].into_iter().enumerate() {
        if !lattice.is_in_ample_cone(h, true) {
            return Err(Error::Precondition(format!("segment endpoint {i} is not strictly ample")));
        }
    }
    let f = amp_polynomial(lattice, h0, h1, wall);
    if f.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    let mut crossings: Vec<CrossingParameter> = Vec::new();
    if f.degree() == Some(0) {
        return Ok(AmpCrossings { polynomial: f, crossings });
    }
    let (rational, _) = rational_roots_in(&f, &Q::zero(), &Q::one());
    let bound = root_bound(&f);
    let (_, cofactor) = rational_roots_in(&f, &-bound.clone(), &bound);
    for r in rational {
        crossings.push(CrossingParameter {
            value: CrossingValue::Rational(r),
            walls: vec![wall_index],
        });
    }
    if cofactor.degree().unwrap_or(0) >= 1 {
        let width = Q::new(BigInt::one(), BigInt::from(100));
        let minpoly = cofactor.primitive_integer();
        let irreducible = cofactor.degree().unwrap() <= 3;
        for iso in isolate_open(&cofactor, &Q::zero(), &Q::one(), &width) {
            crossings.push(CrossingParameter {
                value: CrossingValue::Algebraic {
                    minpoly: minpoly.clone(),
                    lo: iso.lo,
                    hi: iso.hi,
                    irreducible,
                },
                walls: vec![wall_index],
            });
        }
    }
    crossings.sort_by_key(|c| c.approx());
    Ok(AmpCrossings { polynomial: f, crossings })
}

#[derive(Debug, Clone)]
pub struct NonlinearityWitness {
    /// Collinear ample classes `H, H', H''` in segment order.
    pub points: [DivisorClass; 3],
    /// `a · H^{n-1}` at each point.
    pub values: [Q; 3],
    pub signs: [Sign; 3],
}

/// Searches segments between integral ample grid classes for one along which the
/// pulled-back wall changes sign twice, or vanishes at an interior double root;
/// neither can happen for an affine hyperplane.
pub fn nonlinearity_witness(lattice: &PolarisedLattice, wall: &Wall, grid: u32) -> Result<NonlinearityWitness> {
    if lattice.dimension() < 3 || lattice.rank() < 2 {
        return Err(Error::Precondition("walls pull back linearly unless n >= 3 and rho >= 2".into()));
    }
    let gens = lattice.ample_generators();
    let mut points: Vec<DivisorClass> = Vec::new();
    let mut coeffs = vec![1u32; gens.len()];
    loop {
        let mut d = DivisorClass::zero(lattice.rank());
        for (c, g) in coeffs.iter().zip(gens) {
            d = &d + &g.scale(&Q::from_integer(BigInt::from(*c)));
        }
        points.push(d);
        let mut i = 0;
        while i < coeffs.len() && coeffs[i] == grid {
            coeffs[i] = 1;
            i += 1;
        }
        if i == coeffs.len() {
            break;
        }
        coeffs[i] += 1;
    }
    let value = |h: &DivisorClass| wall.eval(&lattice.power_map(h));
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (h0, h1) = (&points[i], &points[j]);
            let f = amp_polynomial(lattice, h0, h1, wall);
            if f.degree().unwrap_or(0) < 2 {
                continue;
            }
            if let Some(taus) = alternating_taus(&f) {
                let pts = taus.map(|t| h0.lerp(h1, &t));
                let values = [value(&pts[0]), value(&pts[1]), value(&pts[2])];
                let signs = [Sign::of(&values[0]), Sign::of(&values[1]), Sign::of(&values[2])];
                return Ok(NonlinearityWitness { points: pts, values, signs });
            }
        }
    }
    Err(Error::NotFound)
}

/// Three parameters in `[0,1]` with sign pattern `(s, -s, s)` or `(s, 0, s)` for `s ≠ 0`.
fn alternating_taus(f: &Poly) -> Option<[Q; 3]> {
    let samples: Vec<Q> = (0..=64).map(|k| Q::new(BigInt::from(k), BigInt::from(64))).collect();
    let signs: Vec<Sign> = samples.iter().map(|t| Sign::of(&f.eval(t))).collect();
    for a in 0..samples.len() {
        if signs[a] == Sign::Zero {
            continue;
        }
        for b in a + 1..samples.len() {
            if signs[b] == Sign::Zero || signs[b] == signs[a] {
                continue;
            }
            for c in b + 1..samples.len() {
                if signs[c] == signs[a] {
                    return Some([samples[a].clone(), samples[b].clone(), samples[c].clone()]);
                }
            }
        }
    }
    // interior double roots are rational here only if the square-free part drops degree
    let (roots, _) = rational_roots_in(f, &Q::zero(), &Q::one());
    for r in roots {
        if r.is_zero() || r == Q::one() {
            continue;
        }
        let (s0, s1) = (Sign::of(&f.eval(&Q::zero())), Sign::of(&f.eval(&Q::one())));
        if s0 != Sign::Zero && s0 == s1 && f.derivative().eval(&r).is_zero() {
            return Some([Q::zero(), r, Q::one()]);
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct Representative {
    pub a: Vec<BigInt>,
    pub b: Vec<BigInt>,
    /// `scale · A^{n-2} B` equals the target class exactly.
    pub scale: Q,
    /// `A^{n-2} B`.
    pub curve: CurveClass,
    pub target: CurveClass,
    pub signs: Vec<Sign>,
    /// Binary precision of the rounded `A`.
    pub precision: u32,
}

fn integral(v: &DivisorClass) -> (Vec<BigInt>, Q) {
    let l = lcm_of_denominators(&v.0);
    let s = Q::from_integer(l);
    (v.0.iter().map(|x| (x * &s).to_integer()).collect(), s)
}

/// `A^{n-2} B` as a curve class.
pub fn complete_intersection(lattice: &PolarisedLattice, a: &DivisorClass, b: &DivisorClass) -> CurveClass {
    CurveClass(lattice.lefschetz_map(a).mul_vec(&b.0))
}

/// Integral ample `A, B` with `A^{n-2} B` in the chamber: `C` is the chamber's
/// rational representative, `A` a dyadic rounding of a preimage of `C` at
/// increasing precision, `B = L_A^{-1}(C)`.
pub fn chamber_representative(
    lattice: &PolarisedLattice,
    chamber: &Chamber,
    walls: &[Wall],
    seed: Option<&DivisorClass>,
    max_bits: u32,
) -> Result<Representative> {
    let c = &chamber.representative;
    if sign_vector(c, walls) != chamber.signs {
        return Err(Error::NoRationalPointFound);
    }
    let h = match seed {
        Some(h) => h.clone(),
        None => lattice.invert_power(c, &NewtonOptions::default())?.alpha,
    };
    let mut saw_ample_a = false;
    for bits in 0..=max_bits {
        let a = if lattice.dimension() == 2 {
            h.clone()
        } else {
            DivisorClass(h.0.iter().map(|x| round_to_dyadic(x, bits)).collect())
        };
        if !lattice.is_in_ample_cone(&a, true) {
            continue;
        }
        saw_ample_a = true;
        let b = match lattice.lefschetz_inverse(&a, c) {
            Ok(b) => b,
            Err(Error::SingularLefschetz) => continue,
            Err(e) => return Err(e),
        };
        if !lattice.is_in_ample_cone(&b, true) {
            continue;
        }
        let (a_int, sa) = integral(&a);
        let (b_int, sb) = integral(&b);
        let ad = DivisorClass(a_int.iter().map(|x| Q::from_integer(x.clone())).collect());
        let bd = DivisorClass(b_int.iter().map(|x| Q::from_integer(x.clone())).collect());
        let curve = complete_intersection(lattice, &ad, &bd);
        let scale = (num_traits::pow(sa, lattice.dimension() - 2) * sb).recip();
        let signs = sign_vector(&curve, walls);
        if curve.scale(&scale) != *c || signs != chamber.signs {
            return Err(Error::VerificationFailed(format!(
                "A^(n-2)B has signs {} instead of {}",
                sign_string(&signs),
                sign_string(&chamber.signs)
            )));
        }
        return Ok(Representative {
            a: a_int,
            b: b_int,
            scale,
            curve,
            target: c.clone(),
            signs,
            precision: bits,
        });
    }
    if saw_ample_a {
        Err(Error::BNotAmple)
    } else {
        Err(Error::NoRationalPointFound)
    }
}

/// Affine 2D slice `origin + s·u + t·v`, `s, t ∈ [0, 1]`, rasterized on an
/// `grid × grid` lattice of sign-vector ids. Ids index the returned legend, which
/// lists the sign vectors present in canonical order.
pub fn slice_grid(
    origin: &CurveClass,
    u: &CurveClass,
    v: &CurveClass,
    grid: usize,
    walls: &[Wall],
    exec: Exec,
) -> (Vec<Vec<usize>>, Vec<Vec<Sign>>) {
    let denom = Q::from_integer(BigInt::from(grid.max(2) - 1));
    let rows: Vec<Vec<Vec<Sign>>> = par::map_range(exec, grid, |j| {
        let t = Q::from_integer(BigInt::from(j)) / &denom;
        (0..grid)
            .map(|i| {
                let s = Q::from_integer(BigInt::from(i)) / &denom;
                let p = &(origin + &u.scale(&s)) + &v.scale(&t);
                sign_vector(&p, walls)
            })
            .collect()
    });
    let mut legend: Vec<Vec<Sign>> = rows.iter().flatten().cloned().collect();
    legend.sort();
    legend.dedup();
    let ids = rows
        .iter()
        .map(|r| r.iter().map(|s| legend.binary_search(s).unwrap()).collect())
        .collect();
    (ids, legend)
}

pub fn pairing(a: &[Q], gamma: &CurveClass) -> Q {
    dot(a, &gamma.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn seg(l: &PolarisedLattice, a: &[i64], b: &[i64]) -> Region {
        Region::certify(l, vec![CurveClass::from_ints(a), CurveClass::from_ints(b)], &NewtonOptions::default()).unwrap()
    }

    #[test]
    fn sign_vector_examples() {
        let walls = vec![Wall::from_ints(&[1, -1])];
        assert_eq!(sign_vector(&CurveClass::from_ints(&[1, 2]), &walls), vec![Sign::Neg]);
        assert_eq!(sign_vector(&CurveClass::from_ints(&[2, 2]), &walls), vec![Sign::Zero]);
        assert!(sign_vector(&CurveClass::from_ints(&[2, 2]), &[]).is_empty());
        let (a, b, c) = (CurveClass::from_ints(&[1, 2]), CurveClass::from_ints(&[1, 3]), CurveClass::from_ints(&[2, 1]));
        assert!(same_chamber(&a, &b, &walls));
        assert!(!same_chamber(&a, &c, &walls));
        assert!(same_chamber(&a, &a, &walls));
    }

    #[test]
    fn decompose_segment() {
        let l = crate::catalog::lattice("p1xp1").unwrap();
        let k = seg(&l, &[1, 2], &[2, 1]);
        let walls = vec![Wall::from_ints(&[1, -1])];
        let cells = decompose(&k, &walls, Exec::Sequential).unwrap();
        assert_eq!(cells.iter().map(|c| c.signs.clone()).collect::<Vec<_>>(), vec![
            vec![Sign::Neg],
            vec![Sign::Zero],
            vec![Sign::Pos]
        ]);
        assert_eq!(cells[1].representative, CurveClass(vec![q(3, 2), q(3, 2)]));
        assert_eq!(decompose(&k, &[], Exec::Parallel).unwrap().len(), 1);
    }

    #[test]
    fn decompose_square_with_crossing_walls() {
        let l = crate::catalog::lattice("p1cubed").unwrap();
        // square in the plane γ3 = 2 around (2,2,2); walls γ1 = γ3 and γ2 = γ3
        let corners = [[1, 1], [3, 1], [3, 3], [1, 3]]
            .iter()
            .map(|c| CurveClass::from_ints(&[c[0], c[1], 2]))
            .collect();
        let k = Region::certify(&l, corners, &NewtonOptions::default()).unwrap();
        let walls = vec![Wall::from_ints(&[1, 0, -1]), Wall::from_ints(&[0, 1, -1])];
        let cells = decompose(&k, &walls, Exec::Parallel).unwrap();
        assert_eq!(cells.len(), 9);
        assert_eq!(cells.iter().filter(|c| c.is_open()).count(), 4);
        assert_eq!(cells.iter().filter(|c| c.walls_active.len() == 2).count(), 1);
        for c in &cells {
            assert_eq!(sign_vector(&c.representative, &walls), c.signs);
            assert!(k.contains(&c.representative));
        }
        assert_eq!(decompose(&k, &walls, Exec::Sequential).unwrap(), cells);
    }

    #[test]
    fn n1_crossings() {
        let walls = vec![Wall::from_ints(&[1, -1])];
        let r = segment_crossings_n1(&CurveClass::from_ints(&[1, 2]), &CurveClass::from_ints(&[2, 1]), &walls).unwrap();
        assert_eq!(r.crossings.len(), 1);
        assert_eq!(r.crossings[0].rational(), Some(&q(1, 2)));
        let r = segment_crossings_n1(&CurveClass::from_ints(&[1, 2]), &CurveClass::from_ints(&[1, 3]), &walls).unwrap();
        assert!(r.crossings.is_empty());
        let r = segment_crossings_n1(&CurveClass::from_ints(&[1, 1]), &CurveClass::from_ints(&[2, 2]), &walls).unwrap();
        assert_eq!(r.containing, vec![0]);
        let pb = crate::catalog::lattice("proj-bundle-p2").unwrap();
        let g0 = pb.power_map(&DivisorClass(vec![qi(1), q(1, 5)]));
        let g1 = pb.power_map(&DivisorClass(vec![qi(1), q(4, 5)]));
        assert_eq!(g0, CurveClass(vec![q(11, 25), q(36, 25)]));
        assert_eq!(g1, CurveClass(vec![q(56, 25), q(81, 25)]));
        let r = segment_crossings_n1(&g0, &g1, &[Wall::from_ints(&[2, -1])]).unwrap();
        assert_eq!(r.crossings[0].rational(), Some(&q(14, 45)));
    }

    #[test]
    fn amp_crossing_is_irrational_on_proj_bundle() {
        let pb = crate::catalog::lattice("proj-bundle-p2").unwrap();
        let h0 = DivisorClass(vec![qi(1), q(1, 5)]);
        let h1 = DivisorClass(vec![qi(1), q(4, 5)]);
        let r = segment_crossings_amp(&pb, &h0, &h1, &Wall::from_ints(&[2, -1]), 0).unwrap();
        assert_eq!(r.polynomial.degree(), Some(2));
        assert_eq!(r.crossings.len(), 1);
        match &r.crossings[0].value {
            CrossingValue::Algebraic { minpoly, lo, hi, irreducible } => {
                assert_eq!(minpoly, &vec![BigInt::from(-14), BigInt::from(36), BigInt::from(9)]);
                assert!(*irreducible);
                assert!(lo < hi && hi - lo <= q(1, 100));
                assert!(*lo > q(35, 100) && *hi < q(36, 100));
            }
            other => panic!("expected algebraic, got {other:?}"),
        }
        // h - ξ pairs to a negative constant multiple along h + tξ
        let r = segment_crossings_amp(&pb, &h0, &h1, &Wall::from_ints(&[1, -1]), 0).unwrap();
        assert!(r.crossings.is_empty());
    }

    #[test]
    fn amp_crossing_on_surface_is_linear() {
        let l = crate::catalog::lattice("p1xp1").unwrap();
        let r = segment_crossings_amp(&l, &DivisorClass::from_ints(&[1, 2]), &DivisorClass::from_ints(&[2, 1]), &Wall::from_ints(&[1, -1]), 0)
            .unwrap();
        assert_eq!(r.polynomial.degree(), Some(1));
        assert_eq!(r.crossings[0].rational(), Some(&q(1, 2)));
    }

    #[test]
    fn nonlinearity_on_p1_cubed() {
        let l = crate::catalog::lattice("p1cubed").unwrap();
        let w = nonlinearity_witness(&l, &Wall::from_ints(&[1, 1, -1]), 5).unwrap();
        assert_eq!(w.signs[0], w.signs[2]);
        assert_ne!(w.signs[0], w.signs[1]);
        assert_ne!(w.signs[0], Sign::Zero);
        let d1 = &w.points[1] - &w.points[0];
        let d2 = &w.points[2] - &w.points[0];
        let ratio = &d2.0[d2.0.iter().position(|x| !x.is_zero()).unwrap()] / &d1.0[d1.0.iter().position(|x| !x.is_zero()).unwrap()];
        assert_eq!(d2, d1.scale(&ratio));
        assert!(matches!(nonlinearity_witness(&l, &Wall::from_ints(&[1, -1, 0]), 5), Err(Error::NotFound)));
        let s = crate::catalog::lattice("p1xp1").unwrap();
        assert!(matches!(nonlinearity_witness(&s, &Wall::from_ints(&[1, -1]), 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn representative_examples() {
        let l = crate::catalog::lattice("p1cubed").unwrap();
        let walls = vec![Wall::from_ints(&[1, -1, 0])];
        let chamber = Chamber {
            signs: vec![Sign::Neg],
            representative: CurveClass::from_ints(&[2, 3, 4]),
            walls_active: vec![],
        };
        let r = chamber_representative(&l, &chamber, &walls, None, 64).unwrap();
        assert_eq!(r.curve.scale(&r.scale), CurveClass::from_ints(&[2, 3, 4]));
        assert_eq!(r.signs, vec![Sign::Neg]);
        let b = DivisorClass(r.b.iter().map(|x| Q::from_integer(x.clone())).collect());
        assert!(l.is_in_ample_cone(&b, true));
        let on_wall = Chamber {
            signs: vec![Sign::Zero],
            representative: CurveClass::from_ints(&[2, 2, 3]),
            walls_active: vec![0],
        };
        let r = chamber_representative(&l, &on_wall, &walls, None, 64).unwrap();
        assert!(walls[0].eval(&r.curve).is_zero());
        let s = crate::catalog::lattice("p1xp1").unwrap();
        let surf = Chamber {
            signs: vec![Sign::Pos],
            representative: CurveClass(vec![q(7, 4), q(5, 4)]),
            walls_active: vec![],
        };
        let r = chamber_representative(&s, &surf, &[Wall::from_ints(&[1, -1])], None, 8).unwrap();
        assert_eq!(r.curve.scale(&r.scale), surf.representative);
    }

    #[test]
    fn slice_raster() {
        let walls = vec![Wall::from_ints(&[1, -1])];
        let (ids, legend) = slice_grid(
            &CurveClass::from_ints(&[1, 1]),
            &CurveClass::from_ints(&[1, 0]),
            &CurveClass::from_ints(&[0, 1]),
            5,
            &walls,
            Exec::Parallel,
        );
        assert_eq!(ids.len(), 5);
        assert_eq!(legend.len(), 3);
        assert_eq!(ids[0][0], 1);
        assert_eq!(ids[0][4], 2);
        assert_eq!(ids[4][0], 0);
    }
}
