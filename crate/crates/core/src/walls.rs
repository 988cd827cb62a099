//! Destabilizing-wall candidates for fixed numerical invariants: slopes,
//! discriminant pairings, the Bogomolov/Hodge bound, and exact enumeration of
//! wall normals relevant to a compact region of `P(X)`.
//!
//! A candidate wall for a rank split `(r1, r - r1)` is an integral class
//! `zeta = r c1(E1) - r1 c1` (so `zeta ≡ -r1 c1 mod r`), with hyperplane
//! `zeta · γ = 0` in `N_1`. Candidates are numerical only; no subsheaf is built.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::parse_json;
use crate::lattice::{CurveClass, DivisorClass, FormEntry, NewtonOptions, PolarisedLattice};
use crate::linalg::{ldl, Matrix};
use crate::par::{self, Exec};
use crate::rational::{ceil_sqrt, dot, from_strs, int_vec_to_q, primitive_normal, to_strs, zeros, RatStr, Q};
use crate::region::Region;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafNumerics {
    pub rank: u32,
    pub c1: DivisorClass,
    /// `c2 · D_1 ⋯ D_{n-2}` on sorted basis-index multisets of length `n - 2`.
    pub c2: BTreeMap<Vec<usize>, Q>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SheafFile {
    pub rank: u32,
    pub c1: Vec<RatStr>,
    #[serde(default)]
    pub c2: Vec<FormEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn q_int(x: impl Into<BigInt>) -> Q {
    Q::from_integer(x.into())
}

/// Number of distinct orderings of a multiset.
fn orderings(mono: &[usize]) -> Q {
    let mut counts = BTreeMap::new();
    for &i in mono {
        *counts.entry(i).or_insert(0u64) += 1;
    }
    let fact = |k: u64| (1..=k).fold(BigInt::one(), |a, b| a * b);
    let denom = counts.values().fold(BigInt::one(), |a, &c| a * fact(c));
    Q::new(fact(mono.len() as u64), denom)
}

fn multisets(rho: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(rho: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..rho {
            cur.push(i);
            rec(rho, len, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(rho, len, 0, &mut Vec::new(), &mut out);
    out
}

impl SheafNumerics {
    pub fn new(rank: u32, c1: DivisorClass, c2: impl IntoIterator<Item = (Vec<usize>, Q)>) -> Self {
        let mut map = BTreeMap::new();
        for (mut k, v) in c2 {
            k.sort_unstable();
            if !v.is_zero() {
                map.insert(k, v);
            }
        }
        SheafNumerics {
            rank,
            c1,
            c2: map,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Checks rank, integrality of `c1` and the shape of the `c2` functional.
    pub fn validate(&self, lattice: &PolarisedLattice) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::InvalidInput("sheaf rank must be at least 1".into()));
        }
        if self.c1.rho() != lattice.rank() {
            return Err(Error::DimensionMismatch(format!(
                "c1 has {} coordinates, lattice rank is {}",
                self.c1.rho(),
                lattice.rank()
            )));
        }
        if !self.c1.is_integral() {
            return Err(Error::InvalidInput("c1 must be integral".into()));
        }
        let len = lattice.dimension() - 2;
        for k in self.c2.keys() {
            if k.len() != len || k.iter().any(|&i| i >= lattice.rank()) {
                return Err(Error::DimensionMismatch(format!(
                    "c2 monomial {k:?} must have {len} indices below {}",
                    lattice.rank()
                )));
            }
        }
        Ok(())
    }

    pub fn from_file(lattice: &PolarisedLattice, file: &SheafFile) -> Result<Self> {
        let mut map: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
        for e in &file.c2 {
            let mut k = e.monomial.clone();
            k.sort_unstable();
            if let Some(prev) = map.get(&k) {
                if prev != &e.value.0 {
                    return Err(Error::InvalidInput(format!("c2 monomial {k:?} listed twice with different values")));
                }
            }
            map.insert(k, e.value.0.clone());
        }
        let mut s = SheafNumerics::new(file.rank, DivisorClass(from_strs(&file.c1)), map);
        s.label = file.label.clone();
        s.validate(lattice)?;
        Ok(s)
    }

    pub fn from_json(lattice: &PolarisedLattice, text: &str, source: &str) -> Result<Self> {
        let file: SheafFile = parse_json(text, source)?;
        Self::from_file(lattice, &file)
    }

    pub fn to_file(&self) -> SheafFile {
        SheafFile {
            rank: self.rank,
            c1: to_strs(&self.c1.0),
            c2: self
                .c2
                .iter()
                .map(|(k, v)| FormEntry {
                    monomial: k.clone(),
                    value: RatStr(v.clone()),
                })
                .collect(),
            label: self.label.clone(),
        }
    }

    pub fn r(&self) -> Q {
        q_int(self.rank)
    }

    /// `c2 · φ^{n-2}`.
    pub fn c2_pairing(&self, phi: &DivisorClass) -> Q {
        self.c2
            .iter()
            .map(|(k, v)| {
                let prod = k.iter().fold(Q::one(), |acc, &i| acc * &phi.0[i]);
                v * orderings(k) * prod
            })
            .fold(Q::zero(), |a, b| a + b)
    }

    /// Invariants of `F ⊗ O(D)` for integral `D`.
    pub fn twist(&self, lattice: &PolarisedLattice, d: &DivisorClass) -> SheafNumerics {
        let r = self.r();
        let c1 = &self.c1 + &d.scale(&r);
        let rho = lattice.rank();
        let len = lattice.dimension() - 2;
        let basis: Vec<DivisorClass> = (0..rho).map(|i| DivisorClass::basis(rho, i)).collect();
        let mut c2 = BTreeMap::new();
        for mono in multisets(rho, len) {
            let mut classes: Vec<&DivisorClass> = mono.iter().map(|&i| &basis[i]).collect();
            classes.push(&self.c1);
            classes.push(d);
            let c1d = lattice.intersection_number(&classes).expect("shape checked");
            classes.truncate(len);
            classes.push(d);
            classes.push(d);
            let dd = lattice.intersection_number(&classes).expect("shape checked");
            let old = self.c2.get(&mono).cloned().unwrap_or_else(Q::zero);
            let v = old + (&r - Q::one()) * c1d + &r * (&r - Q::one()) / q_int(2) * dd;
            if !v.is_zero() {
                c2.insert(mono, v);
            }
        }
        SheafNumerics {
            rank: self.rank,
            c1,
            c2,
            label: self.label.clone(),
        }
    }
}

pub fn slope(f: &SheafNumerics, gamma: &CurveClass) -> Q {
    f.c1.pair(gamma) / f.r()
}

fn square_at(lattice: &PolarisedLattice, x: &DivisorClass, phi: &DivisorClass) -> Q {
    let mut classes = vec![x, x];
    classes.extend(std::iter::repeat_n(phi, lattice.dimension() - 2));
    lattice.intersection_number(&classes).expect("shape checked")
}

/// `Δ(F) · φ^{n-2} = (1/r)(c2 φ^{n-2} - ((r-1)/(2r)) c1² φ^{n-2})`.
pub fn discriminant_pairing(lattice: &PolarisedLattice, f: &SheafNumerics, phi: &DivisorClass) -> Q {
    let r = f.r();
    let c1sq = square_at(lattice, &f.c1, phi);
    (f.c2_pairing(phi) - (&r - Q::one()) / (q_int(2) * &r) * c1sq) / r
}

/// `B(φ, r1) = 2 r1 (r - r1) Δ(F) φ^{n-2}`, the bound on `-a1² φ^{n-2}`.
pub fn wall_bound(lattice: &PolarisedLattice, f: &SheafNumerics, phi: &DivisorClass, r1: u32) -> Result<Q> {
    if r1 == 0 || r1 >= f.rank {
        return Err(Error::Precondition(format!("split rank r1 = {r1} must lie in 1..{}", f.rank)));
    }
    let delta = discriminant_pairing(lattice, f, phi);
    if delta.is_negative() {
        return Err(Error::NegativeBound(delta.to_string()));
    }
    Ok(q_int(2) * q_int(r1) * q_int(f.rank - r1) * delta)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WallClass {
    pub zeta: Vec<BigInt>,
    pub r1: u32,
}

impl WallClass {
    /// `a1 = zeta / r`.
    pub fn normal(&self, rank: u32) -> DivisorClass {
        DivisorClass(self.zeta.iter().map(|z| Q::new(z.clone(), BigInt::from(rank))).collect())
    }

    pub fn in_coset(&self, f: &SheafNumerics) -> bool {
        let r = BigInt::from(f.rank);
        self.zeta.iter().zip(&f.c1.0).all(|(z, c)| {
            let target = -(c.to_integer() * BigInt::from(self.r1));
            (z - target).mod_floor(&r).is_zero()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    /// Primitive integral normal with lexicographically positive leading entry.
    pub normal: Vec<BigInt>,
    /// Candidate classes generating this hyperplane, sorted.
    pub classes: Vec<WallClass>,
    /// Rational point of `K` on the wall where the bound was checked.
    pub witness: CurveClass,
    /// Rounded preimage of the witness used for the bound.
    pub witness_preimage: DivisorClass,
    /// `r² B(φ̂, r1) + zeta² φ̂^{n-2}` for the first accepted class.
    pub slack: Q,
}

impl Wall {
    pub fn from_normal(normal: Vec<BigInt>) -> Wall {
        let rho = normal.len();
        Wall {
            normal,
            classes: Vec::new(),
            witness: CurveClass::zero(rho),
            witness_preimage: DivisorClass::zero(rho),
            slack: Q::zero(),
        }
    }

    pub fn from_ints(normal: &[i64]) -> Wall {
        Wall::from_normal(normal.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn normal_q(&self) -> Vec<Q> {
        int_vec_to_q(&self.normal)
    }

    pub fn eval(&self, gamma: &CurveClass) -> Q {
        dot(&self.normal_q(), &gamma.0)
    }
}

/// `K ∩ a^⊥`: a vertex on the wall if there is one, otherwise an LP point.
pub fn wall_meets_region(wall: &Wall, region: &Region) -> Option<CurveClass> {
    let a = wall.normal_q();
    if let Some(v) = region.vertices().iter().find(|v| dot(&a, &v.0).is_zero()) {
        return Some(v.clone());
    }
    region.hyperplane_point(&a)
}

#[derive(Debug, Clone)]
pub struct EnumerationOptions {
    pub safety: Q,
    /// Cap on superset candidates before filtering.
    pub budget: usize,
    pub exec: Exec,
    /// Inversion settings for witness points inside the region.
    pub newton: NewtonOptions,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            safety: q_int(2),
            budget: 2_000_000,
            exec: Exec::Parallel,
            newton: NewtonOptions {
                denominator_bits: 128,
                ..NewtonOptions::default()
            },
        }
    }
}

/// Accepted candidate with the point where the bound held.
#[derive(Debug, Clone)]
pub struct Acceptance {
    pub witness: CurveClass,
    pub preimage: DivisorClass,
    pub slack: Q,
}

/// The filter stage, shared by the ellipsoid enumeration and box oracles.
pub struct WallFilter<'a> {
    lattice: &'a PolarisedLattice,
    sheaf: &'a SheafNumerics,
    region: &'a Region,
    newton: NewtonOptions,
}

impl<'a> WallFilter<'a> {
    pub fn new(lattice: &'a PolarisedLattice, sheaf: &'a SheafNumerics, region: &'a Region, newton: NewtonOptions) -> Self {
        WallFilter {
            lattice,
            sheaf,
            region,
            newton,
        }
    }

    /// Rational points of `K ∩ zeta^⊥` with preimage seeds: vertices on the wall,
    /// crossings on vertex pairs of opposite sign, and the mean of those.
    fn test_points(&self, zeta: &[Q]) -> Vec<(CurveClass, DivisorClass)> {
        let verts = self.region.vertices();
        let pre = self.region.preimages();
        let s: Vec<Q> = verts.iter().map(|v| dot(zeta, &v.0)).collect();
        let mut pts: Vec<(CurveClass, DivisorClass)> = Vec::new();
        for (i, si) in s.iter().enumerate() {
            if si.is_zero() {
                pts.push((verts[i].clone(), pre[i].clone()));
            }
        }
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                if (s[i].is_negative() && s[j].is_positive()) || (s[i].is_positive() && s[j].is_negative()) {
                    let u = &s[i] / (&s[i] - &s[j]);
                    pts.push((verts[i].lerp(&verts[j], &u), pre[i].lerp(&pre[j], &u)));
                }
            }
        }
        if pts.len() >= 2 {
            let k = q_int(pts.len() as u64).recip();
            let mut g = CurveClass::zero(self.region.rho());
            let mut seed = DivisorClass::zero(self.region.rho());
            for (p, a) in &pts {
                g = &g + p;
                seed = &seed + a;
            }
            pts.push((g.scale(&k), seed.scale(&k)));
        }
        pts
    }

    /// Exact preimage when the seed already maps to `g` (always for surfaces,
    /// where the power map is linear), otherwise a Newton-certified one.
    fn preimage(&self, g: &CurveClass, seed: DivisorClass) -> Option<DivisorClass> {
        if self.lattice.power_map(&seed) == *g {
            return Some(seed);
        }
        self.lattice
            .newton_invert_power(g, &seed, &self.newton)
            .ok()
            .map(|r| r.alpha)
    }

    /// Keeps `zeta` iff its hyperplane meets `K` and the bound
    /// `-zeta² φ̂^{n-2} <= r² B(φ̂, r1)` holds at one of the test points.
    pub fn check(&self, zeta: &[BigInt], r1: u32) -> Option<Acceptance> {
        if zeta.iter().all(Zero::is_zero) {
            return None;
        }
        let zq = int_vec_to_q(zeta);
        let zd = DivisorClass(zq.clone());
        let r2 = self.sheaf.r() * self.sheaf.r();
        for (gamma, seed) in self.test_points(&zq) {
            let Some(phi) = self.preimage(&gamma, seed) else {
                continue;
            };
            let Ok(bound) = wall_bound(self.lattice, self.sheaf, &phi, r1) else {
                continue;
            };
            let lhs = -square_at(self.lattice, &zd, &phi);
            let rhs = &r2 * bound;
            if lhs <= rhs {
                return Some(Acceptance {
                    witness: gamma,
                    preimage: phi,
                    slack: rhs - lhs,
                });
            }
        }
        None
    }

    /// Fast necessary condition: the hyperplane separates (or touches) the vertices.
    pub fn meets(&self, zeta: &[BigInt]) -> bool {
        let zq = int_vec_to_q(zeta);
        let s: Vec<Q> = self.region.vertices().iter().map(|v| dot(&zq, &v.0)).collect();
        s.iter().any(|x| !x.is_positive()) && s.iter().any(|x| !x.is_negative())
    }
}

/// Result of the two-phase enumeration with the data that sized the search.
#[derive(Debug, Clone)]
pub struct WallSet {
    pub walls: Vec<Wall>,
    pub reference: DivisorClass,
    /// `log2 λ` for the auxiliary form.
    pub lambda_exponent: i32,
    /// Per split rank `r1`: the radius `R` with `Q(zeta) <= R`.
    pub radii: Vec<(u32, Q)>,
    pub candidates: usize,
}

fn pow2(k: i32) -> Q {
    if k >= 0 {
        q_int(BigInt::one() << k as u32)
    } else {
        Q::new(BigInt::one(), BigInt::one() << (-k) as u32)
    }
}

/// Smallest `k` in `[lo, hi]` such that `pred(2^k)`, for a predicate monotone in `k`.
fn smallest_power(lo: i32, hi: i32, pred: impl Fn(&Q) -> bool) -> Option<i32> {
    if !pred(&pow2(hi)) {
        return None;
    }
    let mut k = 0.clamp(lo, hi);
    if pred(&pow2(k)) {
        while k > lo && pred(&pow2(k - 1)) {
            k -= 1;
        }
    } else {
        while !pred(&pow2(k)) {
            k += 1;
        }
    }
    Some(k)
}

/// Gram matrix of `γ ↦ -γ² φ^{n-2} + λ (γ · φ^{n-1})²`.
fn auxiliary_gram(lattice: &PolarisedLattice, phi: &DivisorClass, lambda: &Q) -> Matrix {
    let m = lattice.lefschetz_map(phi);
    let v = lattice.power_map(phi).0;
    let rho = v.len();
    let mut g = m.scale(&-Q::one());
    for i in 0..rho {
        for j in 0..rho {
            g[(i, j)] += lambda * &v[i] * &v[j];
        }
    }
    g
}

fn definite_form(lattice: &PolarisedLattice, phi: &DivisorClass) -> Result<(Matrix, i32)> {
    let k = smallest_power(-64, 128, |l| auxiliary_gram(lattice, phi, l).is_positive_definite())
        .ok_or_else(|| Error::InternalInconsistency("no power of 2 makes the auxiliary form definite".into()))?;
    Ok((auxiliary_gram(lattice, phi, &pow2(k)), k))
}

/// Smallest power of 2 with `Q* <= κ · (-γ² φ^{n-2})` on `{γ : γ · φ^{n-1} = 0}`,
/// where the right side is positive definite by the Hodge index theorem.
/// Zero when that hyperplane is trivial (`ρ = 1`).
fn comparability(lattice: &PolarisedLattice, reference: &Matrix, phi: &DivisorClass) -> Result<Q> {
    let kernel = Matrix::from_rows(vec![lattice.power_map(phi).0]).nullspace();
    if kernel.is_empty() {
        return Ok(Q::zero());
    }
    let k = Matrix::from_columns(&kernel);
    let kt = k.transpose();
    let neg = kt.mul(&lattice.lefschetz_map(phi)).mul(&k).scale(&-Q::one());
    let star = kt.mul(reference).mul(&k);
    smallest_power(-64, 128, |s| neg.scale(s).sub(&star).is_positive_semidefinite())
        .map(pow2)
        .ok_or_else(|| Error::InternalInconsistency("reference and vertex forms are not comparable".into()))
}

/// All integral `m` with `Q(m - c) <= t`, where `Q = L D Lᵀ`.
struct Ellipsoid<'a> {
    l: &'a Matrix,
    d: &'a [Q],
    center: &'a [Q],
    t: &'a Q,
}

impl Ellipsoid<'_> {
    fn range(&self, i: usize, x: &[Q], used: &Q) -> Option<(BigInt, BigInt, Q)> {
        let rho = self.d.len();
        let sigma = (i + 1..rho).fold(Q::zero(), |acc, j| acc + &self.l[(j, i)] * &x[j]);
        let rest = self.t - used;
        if rest.is_negative() {
            return None;
        }
        let mid = &self.center[i] - &sigma;
        let w = Q::from_integer(ceil_sqrt(&(&rest / &self.d[i])));
        Some(((&mid - &w).floor().to_integer(), (&mid + &w).ceil().to_integer(), sigma))
    }

    /// Depth-first search over coordinates `i, i-1, ..., 0`, with `x_j` fixed for `j > i`.
    fn search(&self, i: usize, m: &mut Vec<BigInt>, x: &mut Vec<Q>, used: &Q, out: &mut Vec<Vec<BigInt>>, cap: usize) -> bool {
        let Some((lo, hi, sigma)) = self.range(i, x, used) else {
            return true;
        };
        let mut mi = lo;
        while mi <= hi {
            let xi = q_int(mi.clone()) - &self.center[i];
            let y = &xi + &sigma;
            let add = &self.d[i] * &y * &y;
            let total = used + &add;
            if &total <= self.t {
                m[i] = mi.clone();
                x[i] = xi;
                if i == 0 {
                    out.push(m.clone());
                    if out.len() > cap {
                        return false;
                    }
                } else if !self.search(i - 1, m, x, &total, out, cap) {
                    return false;
                }
            }
            mi += 1;
        }
        true
    }
}

/// Exact lattice points `m` with `Q(m - center) <= t`, split into blocks over the
/// last coordinate, evaluated with `exec`.
fn lattice_points(g: &Matrix, center: &[Q], t: &Q, budget: usize, exec: Exec) -> Result<Vec<Vec<BigInt>>> {
    let (l, d) = ldl(g).map_err(|_| Error::InternalInconsistency("auxiliary form lost definiteness".into()))?;
    let rho = d.len();
    let e = Ellipsoid { l: &l, d: &d, center, t };
    let top = rho - 1;
    let zero_x = zeros(rho);
    let Some((lo, hi, _)) = e.range(top, &zero_x, &Q::zero()) else {
        return Ok(Vec::new());
    };
    let width = (&hi - &lo).to_usize().unwrap_or(usize::MAX);
    if width > budget {
        return Err(Error::EnumerationBudgetExceeded { budget });
    }
    let blocks: Vec<BigInt> = (0..=width).map(|k| &lo + BigInt::from(k)).collect();
    let results = par::map(exec, &blocks, |mt| {
        let xt = q_int(mt.clone()) - &center[top];
        let add = &d[top] * &xt * &xt;
        let mut out = Vec::new();
        if &add > t {
            return Some(out);
        }
        let mut m = vec![BigInt::zero(); rho];
        m[top] = mt.clone();
        if top == 0 {
            out.push(m);
            return Some(out);
        }
        let mut x = zeros(rho);
        x[top] = xt;
        e.search(top - 1, &mut m, &mut x, &add, &mut out, budget).then_some(out)
    });
    let mut all = Vec::new();
    for block in results {
        let block = block.ok_or(Error::EnumerationBudgetExceeded { budget })?;
        all.extend(block);
        if all.len() > budget {
            return Err(Error::EnumerationBudgetExceeded { budget });
        }
    }
    Ok(all)
}

/// Superset by definite-form search in each coset, then the exact filter; walls
/// deduplicated by primitive normal and sorted.
pub fn enumerate_walls(
    lattice: &PolarisedLattice,
    sheaf: &SheafNumerics,
    region: &Region,
    opts: &EnumerationOptions,
) -> Result<WallSet> {
    sheaf.validate(lattice)?;
    if opts.safety < Q::one() {
        return Err(Error::InvalidInput("safety factor must be at least 1".into()));
    }
    let rho = lattice.rank();
    let reference = region.reference_ample();
    let (gram, lambda_exponent) = definite_form(lattice, &reference)?;
    let mut kappa = Q::zero();
    for phi in region.preimages() {
        kappa = std::cmp::max(kappa, comparability(lattice, &gram, phi)?);
    }
    let r = sheaf.rank;
    let r2 = sheaf.r() * sheaf.r();
    let filter = WallFilter::new(lattice, sheaf, region, opts.newton.clone());
    let mut radii = Vec::new();
    let mut accepted: Vec<(WallClass, Acceptance)> = Vec::new();
    let mut candidates = 0usize;
    for r1 in 1..r {
        let bmax = region
            .preimages()
            .iter()
            .filter_map(|phi| wall_bound(lattice, sheaf, phi, r1).ok())
            .max();
        let Some(bmax) = bmax else {
            radii.push((r1, Q::zero()));
            continue;
        };
        let radius = &opts.safety * &kappa * &r2 * bmax;
        radii.push((r1, radius.clone()));
        if !radius.is_positive() {
            continue;
        }
        // zeta = z0 + r m with z0 = -r1 c1 reduced mod r
        let rb = BigInt::from(r);
        let z0: Vec<BigInt> = sheaf
            .c1
            .0
            .iter()
            .map(|c| (-(c.to_integer() * BigInt::from(r1))).mod_floor(&rb))
            .collect();
        let center: Vec<Q> = z0.iter().map(|z| Q::new(-z.clone(), rb.clone())).collect();
        let points = lattice_points(&gram, &center, &(&radius / &r2), opts.budget.saturating_sub(candidates), opts.exec)?;
        candidates += points.len();
        let zetas: Vec<Vec<BigInt>> = points
            .into_iter()
            .map(|m| m.iter().zip(&z0).map(|(mi, zi)| zi + &rb * mi).collect())
            .collect();
        let verdicts = par::map(opts.exec, &zetas, |z| {
            if filter.meets(z) {
                filter.check(z, r1)
            } else {
                None
            }
        });
        for (z, v) in zetas.into_iter().zip(verdicts) {
            if let Some(acc) = v {
                accepted.push((WallClass { zeta: z, r1 }, acc));
            }
        }
    }
    debug_assert!(accepted.iter().all(|(c, _)| c.zeta.len() == rho));
    Ok(WallSet {
        walls: group_walls(accepted),
        reference,
        lambda_exponent,
        radii,
        candidates,
    })
}

/// Groups accepted classes by primitive normal; the reported witness comes from
/// the smallest class in canonical order.
pub fn group_walls(accepted: Vec<(WallClass, Acceptance)>) -> Vec<Wall> {
    let mut by_normal: BTreeMap<Vec<BigInt>, Vec<(WallClass, Acceptance)>> = BTreeMap::new();
    for (class, acc) in accepted {
        let normal = primitive_normal(&int_vec_to_q(&class.zeta)).expect("nonzero");
        by_normal.entry(normal).or_default().push((class, acc));
    }
    by_normal
        .into_iter()
        .map(|(normal, mut list)| {
            list.sort_by(|a, b| a.0.cmp(&b.0));
            let (_, first) = &list[0];
            Wall {
                normal,
                witness: first.witness.clone(),
                witness_preimage: first.preimage.clone(),
                slack: first.slack.clone(),
                classes: list.into_iter().map(|(c, _)| c).collect(),
            }
        })
        .collect()
}

/// Brute force over every coset class with `‖zeta‖_∞ <= bound`, through the
/// same filter. Independent of the ellipsoid radius; used as a completeness check.
pub fn box_walls(
    lattice: &PolarisedLattice,
    sheaf: &SheafNumerics,
    region: &Region,
    bound: i64,
    newton: &NewtonOptions,
    exec: Exec,
) -> Vec<Wall> {
    let rho = lattice.rank();
    let side = (2 * bound + 1) as usize;
    let total = side.pow(rho as u32);
    let filter = WallFilter::new(lattice, sheaf, region, newton.clone());
    let mut accepted = Vec::new();
    for r1 in 1..sheaf.rank {
        let hits = par::map_range(exec, total, |mut idx| {
            let zeta: Vec<BigInt> = (0..rho)
                .map(|_| {
                    let c = (idx % side) as i64 - bound;
                    idx /= side;
                    BigInt::from(c)
                })
                .collect();
            let class = WallClass { zeta, r1 };
            if !class.in_coset(sheaf) || !filter.meets(&class.zeta) {
                return None;
            }
            filter.check(&class.zeta, r1).map(|a| (class, a))
        });
        accepted.extend(hits.into_iter().flatten());
    }
    group_walls(accepted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn p1xp1() -> PolarisedLattice {
        crate::catalog::lattice("p1xp1").unwrap()
    }

    fn surface_sheaf(r: u32, c1: &[i64], c2: i64) -> SheafNumerics {
        SheafNumerics::new(r, DivisorClass::from_ints(c1), vec![(vec![], qi(c2))])
    }

    fn segment(l: &PolarisedLattice, a: &[Q], b: &[Q]) -> Region {
        Region::certify(l, vec![CurveClass(a.to_vec()), CurveClass(b.to_vec())], &NewtonOptions::default()).unwrap()
    }

    #[test]
    fn slope_examples() {
        let cube = crate::catalog::lattice("p1cubed").unwrap();
        let f = SheafNumerics::new(2, DivisorClass::from_ints(&[1, -1, 0]), vec![]);
        assert_eq!(slope(&f, &CurveClass::from_ints(&[1, 1, 1])), qi(0));
        let g = SheafNumerics::new(1, DivisorClass::from_ints(&[1, 0, 0]), vec![]);
        assert_eq!(slope(&g, &CurveClass::from_ints(&[3, 0, 0])), qi(3));
        let z = SheafNumerics::new(3, DivisorClass::zero(3), vec![]);
        assert_eq!(slope(&z, &CurveClass::from_ints(&[5, 1, 2])), qi(0));
        assert!(f.validate(&cube).is_ok());
    }

    #[test]
    fn discriminant_and_bound_examples() {
        let l = p1xp1();
        let phi = DivisorClass::from_ints(&[1, 1]);
        let f = surface_sheaf(2, &[0, 0], 4);
        assert_eq!(discriminant_pairing(&l, &f, &phi), qi(2));
        assert_eq!(wall_bound(&l, &f, &phi, 1).unwrap(), qi(4));
        let line = surface_sheaf(1, &[1, 0], 7);
        assert_eq!(discriminant_pairing(&l, &line, &phi), qi(7));
        let pb = crate::catalog::lattice("proj-bundle-p2").unwrap();
        let f = SheafNumerics::new(2, DivisorClass::zero(2), vec![(vec![0], qi(2)), (vec![1], qi(2))]);
        assert_eq!(discriminant_pairing(&pb, &f, &DivisorClass::from_ints(&[1, 1])), qi(2));
        let f3 = surface_sheaf(3, &[0, 0], 0);
        assert_eq!(wall_bound(&l, &f3, &phi, 2).unwrap(), qi(0));
        let neg = surface_sheaf(2, &[0, 0], -1);
        assert!(matches!(wall_bound(&l, &neg, &phi, 1), Err(Error::NegativeBound(_))));
        // Δφ = 3/2 with r = 3, r1 = 2
        let f = surface_sheaf(3, &[0, 0], 0);
        let f = SheafNumerics { c2: [(vec![], q(9, 2))].into_iter().collect(), ..f };
        assert_eq!(wall_bound(&l, &f, &phi, 2).unwrap(), qi(6));
    }

    #[test]
    fn single_wall_on_p1xp1() {
        let l = p1xp1();
        let k = segment(&l, &[q(1, 4), q(7, 4)], &[q(7, 4), q(1, 4)]);
        let f = surface_sheaf(2, &[0, 0], 2);
        let set = enumerate_walls(&l, &f, &k, &EnumerationOptions::default()).unwrap();
        assert_eq!(set.walls.len(), 1);
        let w = &set.walls[0];
        assert_eq!(w.normal, vec![BigInt::from(1), BigInt::from(-1)]);
        assert!(w.classes.contains(&WallClass {
            zeta: vec![BigInt::from(2), BigInt::from(-2)],
            r1: 1
        }));
        assert_eq!(w.slack, qi(0));
        assert!(w.eval(&w.witness).is_zero());
    }

    #[test]
    fn zero_discriminant_gives_no_walls() {
        let l = p1xp1();
        let k = segment(&l, &[q(1, 4), q(7, 4)], &[q(7, 4), q(1, 4)]);
        let f = surface_sheaf(2, &[0, 0], 0);
        assert!(enumerate_walls(&l, &f, &k, &EnumerationOptions::default()).unwrap().walls.is_empty());
    }

    #[test]
    fn proj_bundle_wall_found() {
        let pb = crate::catalog::lattice("proj-bundle-p2").unwrap();
        let k = Region::around(&pb, &DivisorClass(vec![qi(1), q(2, 5)]), &q(1, 10)).unwrap();
        let f = SheafNumerics::new(2, DivisorClass::zero(2), vec![(vec![0], qi(2)), (vec![1], qi(2))]);
        let set = enumerate_walls(&pb, &f, &k, &EnumerationOptions::default()).unwrap();
        assert!(set.walls.iter().any(|w| w.normal == vec![BigInt::from(2), BigInt::from(-1)]));
        let a = DivisorClass::from_ints(&[2, -1]);
        let phi = DivisorClass::from_ints(&[1, 1]);
        assert_eq!(-square_at(&pb, &a, &phi), qi(2));
    }

    #[test]
    fn meets_region_examples() {
        let l = p1xp1();
        let k = segment(&l, &[qi(1), qi(2)], &[qi(2), qi(1)]);
        assert_eq!(wall_meets_region(&Wall::from_ints(&[1, -1]), &k), Some(CurveClass(vec![q(3, 2), q(3, 2)])));
        assert_eq!(wall_meets_region(&Wall::from_ints(&[1, 1]), &k), None);
        assert_eq!(wall_meets_region(&Wall::from_ints(&[2, -1]), &k), Some(CurveClass::from_ints(&[1, 2])));
    }

    #[test]
    fn twist_keeps_discriminant() {
        let pb = crate::catalog::lattice("proj-bundle-p2").unwrap();
        let f = SheafNumerics::new(2, DivisorClass::from_ints(&[1, 0]), vec![(vec![0], qi(2)), (vec![1], qi(3))]);
        let g = f.twist(&pb, &DivisorClass::from_ints(&[-1, 2]));
        for phi in [DivisorClass::from_ints(&[1, 1]), DivisorClass(vec![q(3, 2), q(1, 7)])] {
            assert_eq!(discriminant_pairing(&pb, &f, &phi), discriminant_pairing(&pb, &g, &phi));
        }
    }

    #[test]
    fn sheaf_file_round_trip() {
        let pb = crate::catalog::lattice("proj-bundle-p2").unwrap();
        let f = SheafNumerics::new(2, DivisorClass::from_ints(&[1, 0]), vec![(vec![0], q(1, 2))]).with_label("x");
        let text = crate::io::to_json(&f.to_file());
        assert_eq!(SheafNumerics::from_json(&pb, &text, "mem").unwrap(), f);
        let bad = SheafNumerics::new(2, DivisorClass(vec![q(1, 2), qi(0)]), vec![]);
        assert!(bad.validate(&pb).is_err());
    }

    #[test]
    fn smallest_power_search() {
        assert_eq!(smallest_power(-10, 10, |x| x >= &q(1, 3)), Some(-1));
        assert_eq!(smallest_power(-10, 10, |x| x >= &qi(5)), Some(3));
        assert_eq!(smallest_power(-10, 10, |x| x >= &qi(5000)), None);
    }
}
