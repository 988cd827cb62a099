//! Multilinear intersection arithmetic on `N^1` / `N_1`, the power map
//! `alpha -> alpha^{n-1}`, Lefschetz maps and the positivity checks built on them.
//!
//! All guarantees are relative to the rational polyhedral subcone spanned by the
//! declared ample generators; the true ample cone is not computed.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ldl, Matrix};
use crate::lp::{max_margin, Constraint, LinearProgram, Relation};
use crate::io::parse_json;
use crate::rational::{dot, from_f64_dyadic, from_strs, round_to_dyadic, sup_norm, to_f64, to_strs, zeros, RatStr, Q};

macro_rules! class_type {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub Vec<Q>);

        impl $name {
            pub fn new(coords: Vec<Q>) -> Self {
                $name(coords)
            }

            pub fn zero(rho: usize) -> Self {
                $name(zeros(rho))
            }

            pub fn from_ints(v: &[i64]) -> Self {
                $name(v.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect())
            }

            pub fn basis(rho: usize, i: usize) -> Self {
                let mut v = zeros(rho);
                v[i] = Q::one();
                $name(v)
            }

            pub fn coords(&self) -> &[Q] {
                &self.0
            }

            pub fn rho(&self) -> usize {
                self.0.len()
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(Zero::is_zero)
            }

            pub fn is_integral(&self) -> bool {
                self.0.iter().all(|x| x.is_integer())
            }

            pub fn scale(&self, s: &Q) -> Self {
                $name(self.0.iter().map(|x| x * s).collect())
            }

            /// `(1 - u) * self + u * other`.
            pub fn lerp(&self, other: &Self, u: &Q) -> Self {
                let w = Q::one() - u;
                $name(self.0.iter().zip(&other.0).map(|(a, b)| a * &w + b * u).collect())
            }

            pub fn sup_norm(&self) -> Q {
                sup_norm(&self.0)
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, o: &$name) -> $name {
                $name(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, o: &$name) -> $name {
                $name(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                $name(self.0.iter().map(|a| -a).collect())
            }
        }
    };
}

class_type!(DivisorClass);
class_type!(CurveClass);

impl DivisorClass {
    /// `D . gamma`.
    pub fn pair(&self, gamma: &CurveClass) -> Q {
        dot(&self.0, &gamma.0)
    }
}

/// Dense symmetric tensor of order `order` over a rank-`rho` lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymTensor {
    pub order: usize,
    pub rho: usize,
    pub data: Vec<Q>,
}

impl SymTensor {
    /// Contracts one slot with `v`. Symmetry makes the slot irrelevant.
    pub fn contract(&self, v: &[Q]) -> SymTensor {
        assert!(self.order >= 1);
        let rho = self.rho;
        let data = self
            .data
            .chunks(rho)
            .map(|chunk| dot(chunk, v))
            .collect();
        SymTensor {
            order: self.order - 1,
            rho,
            data,
        }
    }

    pub fn scalar(&self) -> Q {
        assert_eq!(self.order, 0);
        self.data[0].clone()
    }

    pub fn as_matrix(&self) -> Matrix {
        assert_eq!(self.order, 2);
        Matrix {
            rows: self.rho,
            cols: self.rho,
            data: self.data.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarisedLattice {
    name: String,
    description: String,
    n: usize,
    rho: usize,
    form: BTreeMap<Vec<usize>, Q>,
    tensor: SymTensor,
    ample_gens: Vec<DivisorClass>,
}

/// Termination controls for [`PolarisedLattice::newton_invert_power`].
#[derive(Debug, Clone)]
pub struct NewtonOptions {
    pub tol: Q,
    pub max_iter: usize,
    /// Iterates are rounded to multiples of `2^-denominator_bits`.
    pub denominator_bits: u32,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: Q::new(BigInt::one(), BigInt::from(10u64).pow(12)),
            max_iter: 60,
            denominator_bits: 256,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub alpha: DivisorClass,
    pub residual: Q,
    pub iterations: usize,
    /// Sup-norm residual before each step, ending with the accepted one.
    pub trace: Vec<Q>,
}

#[derive(Debug, Clone)]
pub struct HodgeCertificate {
    pub passed: bool,
    /// Leading principal minors of the negated restricted form.
    pub minors: Vec<Q>,
    /// On failure, a primitive class with `gamma^2 alpha^{n-2} >= 0`.
    pub witness: Option<DivisorClass>,
}

#[derive(Debug, Clone)]
pub struct KtReport {
    pub holds: bool,
    /// `alpha^{n-j} beta^j`, `j = 0..=n`.
    pub mixed: Vec<Q>,
    /// `m_{j+1}^2 - m_j m_{j+2}`, `j = 0..n-1`.
    pub slacks: Vec<Q>,
}

/// On-disk lattice definition; unlisted monomials are zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub dimension: usize,
    pub rank: usize,
    pub form: Vec<FormEntry>,
    pub ample_generators: Vec<Vec<RatStr>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormEntry {
    pub monomial: Vec<usize>,
    pub value: RatStr,
}

fn canonical(mut idx: Vec<usize>) -> Vec<usize> {
    idx.sort_unstable();
    idx
}

impl PolarisedLattice {
    /// Builds the lattice from its canonical form entries. Only structural checks
    /// are done here; see [`PolarisedLattice::validate`] for the positivity gates.
    pub fn from_form(
        name: impl Into<String>,
        n: usize,
        rho: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, Q)>,
        ample_gens: Vec<DivisorClass>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("dimension must be at least 2, got {n}")));
        }
        if rho < 1 {
            return Err(Error::InvalidInput("rank must be at least 1".into()));
        }
        let mut form = BTreeMap::new();
        for (idx, value) in entries {
            if idx.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "monomial {idx:?} has {} indices, expected {n}",
                    idx.len()
                )));
            }
            if idx.iter().any(|&i| i >= rho) {
                return Err(Error::DimensionMismatch(format!("monomial {idx:?} exceeds rank {rho}")));
            }
            let key = canonical(idx);
            if let Some(prev) = form.get(&key) {
                if prev != &value {
                    return Err(Error::InvalidInput(format!(
                        "monomial {key:?} listed twice with different values"
                    )));
                }
            }
            if !value.is_zero() {
                form.insert(key, value);
            }
        }
        for g in &ample_gens {
            if g.rho() != rho {
                return Err(Error::DimensionMismatch("ample generator length".into()));
            }
        }
        let size = rho.pow(n as u32);
        let mut data = zeros(size);
        for (flat, slot) in data.iter_mut().enumerate() {
            let mut idx = Vec::with_capacity(n);
            let mut r = flat;
            for _ in 0..n {
                idx.push(r % rho);
                r /= rho;
            }
            if let Some(v) = form.get(&canonical(idx)) {
                *slot = v.clone();
            }
        }
        Ok(PolarisedLattice {
            name: name.into(),
            description: String::new(),
            n,
            rho,
            form,
            tensor: SymTensor {
                order: n,
                rho,
                data,
            },
            ample_gens,
        })
    }

    /// Data-sanity gates: generators span a cone with nonempty interior, have
    /// `g^n >= 0`, the barycenter has positive volume, and the Hodge index
    /// certificate passes at the barycenter and at every generator of positive volume.
    pub fn validate(&self) -> Result<()> {
        if self.ample_gens.is_empty() {
            return Err(Error::InvalidInput("no ample generators".into()));
        }
        let m = Matrix::from_rows(self.ample_gens.iter().map(|g| g.0.clone()).collect());
        if m.rank() != self.rho {
            return Err(Error::InvalidInput("ample generators do not span N^1".into()));
        }
        for (i, g) in self.ample_gens.iter().enumerate() {
            let v = self.volume(g);
            if v.is_negative() {
                return Err(Error::InvalidInput(format!("generator {i} has negative top self-intersection")));
            }
            if v.is_positive() {
                // nef boundary generators may carry a degenerate restricted form
                match self.verify_hodge_index(g) {
                    Ok(cert) if !cert.passed => {
                        return Err(Error::InvalidInput(format!("Hodge index fails at generator {i}")));
                    }
                    Err(Error::DegenerateForm) | Ok(_) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        let b = self.barycenter();
        if !self.volume(&b).is_positive() {
            return Err(Error::NotPositive);
        }
        if !self.verify_hodge_index(&b)?.passed {
            return Err(Error::InvalidInput("Hodge index fails at the barycenter".into()));
        }
        Ok(())
    }

    /// Parses and validates a lattice definition.
    pub fn from_json(text: &str, source: &str) -> Result<Self> {
        let file: LatticeFile = parse_json(text, source)?;
        Self::from_file(&file)
    }

    pub fn from_file(file: &LatticeFile) -> Result<Self> {
        let gens = file
            .ample_generators
            .iter()
            .map(|g| DivisorClass(from_strs(g)))
            .collect();
        let lattice = Self::from_form(
            file.name.clone(),
            file.dimension,
            file.rank,
            file.form.iter().map(|e| (e.monomial.clone(), e.value.0.clone())),
            gens,
        )?
        .with_description(file.description.clone());
        lattice.validate()?;
        Ok(lattice)
    }

    pub fn to_file(&self) -> LatticeFile {
        LatticeFile {
            name: self.name.clone(),
            description: self.description.clone(),
            dimension: self.n,
            rank: self.rho,
            form: self
                .form
                .iter()
                .map(|(k, v)| FormEntry {
                    monomial: k.clone(),
                    value: RatStr(v.clone()),
                })
                .collect(),
            ample_generators: self.ample_gens.iter().map(|g| to_strs(&g.0)).collect(),
        }
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rho
    }

    pub fn ample_generators(&self) -> &[DivisorClass] {
        &self.ample_gens
    }

    /// Nonzero entries, keyed by sorted index multiset.
    pub fn form_entries(&self) -> &BTreeMap<Vec<usize>, Q> {
        &self.form
    }

    fn check_len(&self, d: &[Q]) -> Result<()> {
        if d.len() != self.rho {
            return Err(Error::DimensionMismatch(format!(
                "class has {} coordinates, lattice rank is {}",
                d.len(),
                self.rho
            )));
        }
        Ok(())
    }

    pub fn intersection_number(&self, classes: &[&DivisorClass]) -> Result<Q> {
        if classes.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} classes, got {}",
                self.n,
                classes.len()
            )));
        }
        let mut t = self.tensor.clone();
        for c in classes {
            self.check_len(&c.0)?;
            t = t.contract(&c.0);
        }
        Ok(t.scalar())
    }

    /// `classes` contracted into the form, leaving a tensor of the remaining order.
    pub fn partial(&self, classes: &[&DivisorClass]) -> SymTensor {
        assert!(classes.len() <= self.n);
        classes.iter().fold(self.tensor.clone(), |t, c| t.contract(&c.0))
    }

    /// `alpha^(n-k) beta^k`.
    pub fn mixed(&self, alpha: &DivisorClass, beta: &DivisorClass, k: usize) -> Q {
        let mut t = self.tensor.clone();
        for _ in 0..k {
            t = t.contract(&beta.0);
        }
        for _ in k..self.n {
            t = t.contract(&alpha.0);
        }
        t.scalar()
    }

    pub fn volume(&self, alpha: &DivisorClass) -> Q {
        self.mixed(alpha, alpha, 0)
    }

    /// `alpha^k` as a tensor of order `n - k`.
    pub fn power_tensor(&self, alpha: &DivisorClass, k: usize) -> Result<SymTensor> {
        self.check_len(&alpha.0)?;
        if k == 0 || k >= self.n {
            return Err(Error::Precondition(format!("power exponent must be in 1..={}", self.n - 1)));
        }
        Ok((0..k).fold(self.tensor.clone(), |t, _| t.contract(&alpha.0)))
    }

    /// `alpha^{n-1}` in dual coordinates: `e_i . alpha^{n-1}`.
    pub fn power_map(&self, alpha: &DivisorClass) -> CurveClass {
        let t = (0..self.n - 1).fold(self.tensor.clone(), |t, _| t.contract(&alpha.0));
        CurveClass(t.data)
    }

    /// Matrix of `D -> D . H^{n-2}` from `N^1` to `N_1`.
    pub fn lefschetz_map(&self, h: &DivisorClass) -> Matrix {
        let t = (0..self.n - 2).fold(self.tensor.clone(), |t, _| t.contract(&h.0));
        t.as_matrix()
    }

    pub fn lefschetz_inverse(&self, h: &DivisorClass, c: &CurveClass) -> Result<DivisorClass> {
        self.check_len(&h.0)?;
        self.check_len(&c.0)?;
        self.lefschetz_map(h)
            .solve(&c.0)
            .map(DivisorClass)
            .ok_or(Error::SingularLefschetz)
    }

    pub fn barycenter(&self) -> DivisorClass {
        let k = Q::from_integer(BigInt::from(self.ample_gens.len()));
        let mut acc = DivisorClass::zero(self.rho);
        for g in &self.ample_gens {
            acc = &acc + g;
        }
        acc.scale(&k.recip())
    }

    pub fn is_in_ample_cone(&self, d: &DivisorClass, strict: bool) -> bool {
        if d.rho() != self.rho || self.ample_gens.is_empty() {
            return false;
        }
        let k = self.ample_gens.len();
        let hard: Vec<Constraint> = (0..self.rho)
            .map(|i| Constraint {
                coeffs: self.ample_gens.iter().map(|g| g.0[i].clone()).collect(),
                rel: Relation::Eq,
                rhs: d.0[i].clone(),
            })
            .collect();
        if !strict {
            let mut lp = LinearProgram::new(vec![true; k]);
            for c in hard {
                lp.constrain(c.coeffs, c.rel, c.rhs);
            }
            return lp.solve().is_feasible();
        }
        let gens = Matrix::from_rows(self.ample_gens.iter().map(|g| g.0.clone()).collect());
        if gens.rank() < self.rho {
            return false;
        }
        let strict_rows: Vec<(Vec<Q>, Q)> = (0..k)
            .map(|i| {
                let mut e = zeros(k);
                e[i] = Q::one();
                (e, Q::zero())
            })
            .collect();
        matches!(max_margin(vec![true; k], &hard, &strict_rows), Some((_, t)) if t.is_positive())
    }

    /// Negative definiteness of `(g, d) -> g . d . alpha^{n-2}` on the kernel of
    /// `g -> g . alpha^{n-1}`, certified by exact leading-minor signs.
    pub fn verify_hodge_index(&self, alpha: &DivisorClass) -> Result<HodgeCertificate> {
        self.check_len(&alpha.0)?;
        if !self.volume(alpha).is_positive() {
            return Err(Error::NotPositive);
        }
        let functional = self.power_map(alpha);
        let kernel = Matrix::from_rows(vec![functional.0]).nullspace();
        if kernel.is_empty() {
            return Ok(HodgeCertificate {
                passed: true,
                minors: Vec::new(),
                witness: None,
            });
        }
        let b = self.lefschetz_map(alpha);
        let k = Matrix::from_columns(&kernel);
        let restricted = k.transpose().mul(&b).mul(&k);
        if restricted.det().is_zero() {
            return Err(Error::DegenerateForm);
        }
        let neg = restricted.scale(&-Q::one());
        let minors = neg.leading_principal_minors();
        let Some(fail) = minors.iter().position(|m| !m.is_positive()) else {
            return Ok(HodgeCertificate {
                passed: true,
                minors,
                witness: None,
            });
        };
        let idx: Vec<usize> = (0..=fail).collect();
        let block = neg.submatrix(&idx);
        let x = if minors[fail].is_zero() {
            block.nullspace().remove(0)
        } else {
            let (l, _) = ldl(&block).expect("earlier minors are positive");
            let mut e = zeros(fail + 1);
            e[fail] = Q::one();
            l.transpose().solve(&e).expect("unit triangular")
        };
        let mut full = zeros(kernel.len());
        full[..x.len()].clone_from_slice(&x);
        let witness = DivisorClass(k.mul_vec(&full));
        Ok(HodgeCertificate {
            passed: false,
            minors,
            witness: Some(witness),
        })
    }

    pub fn khovanskii_teissier(&self, alpha: &DivisorClass, beta: &DivisorClass) -> Result<KtReport> {
        self.check_len(&alpha.0)?;
        self.check_len(&beta.0)?;
        let mixed: Vec<Q> = (0..=self.n).map(|j| self.mixed(alpha, beta, j)).collect();
        let slacks: Vec<Q> = (0..self.n - 1)
            .map(|j| &mixed[j + 1] * &mixed[j + 1] - &mixed[j] * &mixed[j + 2])
            .collect();
        let holds = slacks.iter().all(|s| !s.is_negative());
        Ok(KtReport { holds, mixed, slacks })
    }

    /// Newton iteration for `alpha^{n-1} = gamma` with rounded rational iterates.
    pub fn newton_invert_power(
        &self,
        gamma: &CurveClass,
        seed: &DivisorClass,
        opts: &NewtonOptions,
    ) -> Result<NewtonResult> {
        self.check_len(&gamma.0)?;
        self.check_len(&seed.0)?;
        if !opts.tol.is_positive() {
            return Err(Error::Precondition("tolerance must be positive".into()));
        }
        let factor = Q::from_integer(BigInt::from(self.n - 1));
        let mut alpha = seed.clone();
        let mut trace = Vec::new();
        for it in 0..=opts.max_iter {
            let diff = gamma - &self.power_map(&alpha);
            let residual = diff.sup_norm();
            trace.push(residual.clone());
            if residual <= opts.tol {
                if !self.is_in_ample_cone(&alpha, true) {
                    return Err(Error::ResultNotAmple);
                }
                return Ok(NewtonResult {
                    alpha,
                    residual,
                    iterations: it,
                    trace,
                });
            }
            if it == opts.max_iter {
                return Err(Error::NoConvergence {
                    iterations: it,
                    residual: format!("{:.3e}", to_f64(&residual)),
                });
            }
            let jac = self.lefschetz_map(&alpha).scale(&factor);
            let step = jac
                .solve(&diff.0)
                .ok_or(Error::SingularDerivative { iteration: it })?;
            alpha = DivisorClass(
                alpha
                    .0
                    .iter()
                    .zip(&step)
                    .map(|(a, s)| round_to_dyadic(&(a + s), opts.denominator_bits))
                    .collect(),
            );
        }
        unreachable!()
    }

    /// Preimage under the power map without a caller-supplied seed: Newton from the
    /// rescaled barycenter, falling back to continuation along the segment from
    /// the barycenter's image when the direct run fails.
    pub fn invert_power(&self, gamma: &CurveClass, opts: &NewtonOptions) -> Result<NewtonResult> {
        let seed = self.scaled_seed(gamma);
        match self.newton_invert_power(gamma, &seed, opts) {
            Ok(r) => Ok(r),
            Err(Error::SingularLefschetz | Error::DimensionMismatch(_)) => unreachable!(),
            Err(first) => self.continuation(gamma, &seed, opts).map_err(|_| first),
        }
    }

    fn scaled_seed(&self, gamma: &CurveClass) -> DivisorClass {
        let b = self.barycenter();
        let pb = self.power_map(&b);
        let num = to_f64(&gamma.sup_norm());
        let den = to_f64(&pb.sup_norm());
        if !(num > 0.0 && den > 0.0) {
            return b;
        }
        let s = (num / den).powf(1.0 / (self.n - 1) as f64);
        b.scale(&from_f64_dyadic(s, 20))
    }

    fn continuation(&self, gamma: &CurveClass, seed: &DivisorClass, opts: &NewtonOptions) -> Result<NewtonResult> {
        let start = self.power_map(seed);
        let mut alpha = seed.clone();
        let mut u = Q::zero();
        let mut step = Q::new(BigInt::one(), BigInt::from(8));
        let min_step = Q::new(BigInt::one(), BigInt::from(1u64 << 20));
        let coarse = NewtonOptions {
            tol: Q::new(BigInt::one(), BigInt::from(1000)),
            max_iter: 30,
            denominator_bits: 64,
        };
        while u < Q::one() {
            let next = std::cmp::min(&u + &step, Q::one());
            let target = start.lerp(gamma, &next);
            match self.newton_invert_power(&target, &alpha, &coarse) {
                Ok(r) => {
                    alpha = r.alpha;
                    u = next;
                    step = &step * Q::from_integer(BigInt::from(2));
                }
                Err(_) => {
                    step /= Q::from_integer(BigInt::from(2));
                    if step < min_step {
                        return Err(Error::NoConvergence {
                            iterations: 0,
                            residual: "continuation stalled".into(),
                        });
                    }
                }
            }
        }
        self.newton_invert_power(gamma, &alpha, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    pub(crate) fn p1_cubed() -> PolarisedLattice {
        PolarisedLattice::from_form(
            "p1cubed",
            3,
            3,
            vec![(vec![0, 1, 2], qi(1))],
            (0..3).map(|i| DivisorClass::basis(3, i)).collect(),
        )
        .unwrap()
    }

    pub(crate) fn proj_bundle() -> PolarisedLattice {
        // basis (h, xi): h^3 = 0, h^2 xi = h xi^2 = xi^3 = 1
        PolarisedLattice::from_form(
            "proj-bundle-p2",
            3,
            2,
            vec![(vec![0, 0, 1], qi(1)), (vec![0, 1, 1], qi(1)), (vec![1, 1, 1], qi(1))],
            vec![DivisorClass::basis(2, 0), DivisorClass::basis(2, 1)],
        )
        .unwrap()
    }

    fn d(v: &[i64]) -> DivisorClass {
        DivisorClass::from_ints(v)
    }

    /// Brute-force multilinear expansion over all index tuples.
    fn brute_intersection(l: &PolarisedLattice, classes: &[&DivisorClass]) -> Q {
        let rho = l.rank();
        let n = classes.len();
        let mut total = Q::zero();
        for flat in 0..rho.pow(n as u32) {
            let mut idx = Vec::new();
            let mut r = flat;
            for _ in 0..n {
                idx.push(r % rho);
                r /= rho;
            }
            let coeff = idx.iter().zip(classes).fold(Q::one(), |acc, (&i, c)| acc * &c.0[i]);
            if coeff.is_zero() {
                continue;
            }
            let mut key = idx.clone();
            key.sort();
            if let Some(v) = l.form_entries().get(&key) {
                total += coeff * v;
            }
        }
        total
    }

    #[test]
    fn p1_cubed_intersections() {
        let l = p1_cubed();
        let (h1, h2, h3) = (d(&[1, 0, 0]), d(&[0, 1, 0]), d(&[0, 0, 1]));
        assert_eq!(l.intersection_number(&[&h1, &h2, &h3]).unwrap(), qi(1));
        assert_eq!(l.intersection_number(&[&h1, &h1, &h2]).unwrap(), qi(0));
        let z = DivisorClass::zero(3);
        assert_eq!(l.intersection_number(&[&h1, &z, &h3]).unwrap(), qi(0));
        assert!(matches!(l.intersection_number(&[&h1, &h2]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn intersection_matches_brute_force() {
        let l = proj_bundle();
        let a = DivisorClass(vec![q(3, 2), qi(-2)]);
        let b = DivisorClass(vec![qi(1), q(1, 3)]);
        let c = DivisorClass(vec![q(-5, 7), qi(4)]);
        for perm in [[&a, &b, &c], [&c, &a, &b], [&b, &c, &a]] {
            assert_eq!(l.intersection_number(&perm).unwrap(), brute_intersection(&l, &perm));
        }
    }

    #[test]
    fn json_round_trip() {
        let pb = proj_bundle();
        let text = crate::io::to_json(&pb.to_file());
        let back = PolarisedLattice::from_json(&text, "mem").unwrap();
        assert_eq!(back, pb);
        assert_eq!(crate::io::to_json(&back.to_file()), text);
        let bad = text.replacen("\"1\"", "\"1.0\"", 1);
        assert!(matches!(PolarisedLattice::from_json(&bad, "mem"), Err(Error::Parse { .. })));
    }

    #[test]
    fn power_map_examples() {
        let l = p1_cubed();
        assert_eq!(l.power_map(&d(&[1, 1, 1])), CurveClass::from_ints(&[2, 2, 2]));
        assert!(l.power_map(&DivisorClass::zero(3)).is_zero());
        let pb = proj_bundle();
        for t in [q(1, 5), q(2, 5), qi(3)] {
            let alpha = DivisorClass(vec![qi(1), t.clone()]);
            let gamma = pb.power_map(&alpha);
            assert_eq!(gamma.0[0], &t * qi(2) + &t * &t);
        }
        let tensor = l.power_tensor(&d(&[1, 1, 1]), 1).unwrap();
        assert_eq!(tensor.order, 2);
        assert!(l.power_tensor(&d(&[1, 1, 1]), 3).is_err());
    }

    #[test]
    fn lefschetz_examples() {
        let l = p1_cubed();
        let m = l.lefschetz_map(&d(&[1, 1, 1]));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[(i, j)], if i == j { qi(0) } else { qi(1) });
            }
        }
        let x = l.lefschetz_inverse(&d(&[1, 1, 1]), &CurveClass::from_ints(&[1, 1, 1])).unwrap();
        assert_eq!(x, DivisorClass(vec![q(1, 2), q(1, 2), q(1, 2)]));
        let pb = proj_bundle();
        let m = pb.lefschetz_map(&d(&[1, 1]));
        assert_eq!(m.to_rows(), vec![vec![qi(1), qi(2)], vec![qi(2), qi(2)]]);
    }

    #[test]
    fn lefschetz_on_surface_is_form() {
        let s = PolarisedLattice::from_form(
            "p1xp1",
            2,
            2,
            vec![(vec![0, 1], qi(1))],
            vec![d(&[1, 0]), d(&[0, 1])],
        )
        .unwrap();
        assert_eq!(s.lefschetz_map(&d(&[5, 1])), s.lefschetz_map(&d(&[1, 7])));
    }

    #[test]
    fn singular_lefschetz() {
        let flat = PolarisedLattice::from_form(
            "flat",
            2,
            2,
            vec![(vec![0, 0], qi(1)), (vec![0, 1], qi(1)), (vec![1, 1], qi(1))],
            vec![d(&[1, 0]), d(&[0, 1])],
        )
        .unwrap();
        assert!(matches!(
            flat.lefschetz_inverse(&d(&[1, 0]), &CurveClass::from_ints(&[1, 2])),
            Err(Error::SingularLefschetz)
        ));
        assert!(matches!(flat.verify_hodge_index(&d(&[1, 0])), Err(Error::DegenerateForm)));
        assert!(flat.validate().is_err());
    }

    #[test]
    fn ample_cone_membership() {
        let l = p1_cubed();
        assert!(l.is_in_ample_cone(&d(&[1, 1, 1]), true));
        assert!(!l.is_in_ample_cone(&d(&[1, 0, -1]), false));
        assert!(!l.is_in_ample_cone(&d(&[1, 1, 0]), true));
        assert!(l.is_in_ample_cone(&d(&[1, 1, 0]), false));
        assert!(!l.is_in_ample_cone(&DivisorClass::zero(3), true));
    }

    #[test]
    fn hodge_index_examples() {
        let pb = proj_bundle();
        let cert = pb.verify_hodge_index(&d(&[1, 1])).unwrap();
        assert!(cert.passed);
        assert_eq!(cert.minors.len(), 1);
        let p2 = PolarisedLattice::from_form("p2", 2, 1, vec![(vec![0, 0], qi(1))], vec![d(&[1])]).unwrap();
        assert!(p2.verify_hodge_index(&d(&[1])).unwrap().passed);
        assert!(p1_cubed().validate().is_ok());
        assert!(pb.validate().is_ok());
    }

    #[test]
    fn hodge_witness_on_indefinite_form() {
        // signature (2,1) on a rank-3 surface lattice: the primitive part is not definite
        let bad = PolarisedLattice::from_form(
            "bad",
            2,
            3,
            vec![(vec![0, 0], qi(1)), (vec![1, 1], qi(1)), (vec![2, 2], qi(-1))],
            vec![d(&[1, 0, 0]), d(&[0, 1, 0]), d(&[0, 0, 1])],
        )
        .unwrap();
        let alpha = d(&[1, 0, 0]);
        let cert = bad.verify_hodge_index(&alpha).unwrap();
        assert!(!cert.passed);
        let w = cert.witness.unwrap();
        assert!(bad.intersection_number(&[&w, &alpha]).unwrap().is_zero());
        assert!(!bad.intersection_number(&[&w, &w]).unwrap().is_negative());
    }

    #[test]
    fn khovanskii_teissier_examples() {
        let l = p1_cubed();
        let kt = l.khovanskii_teissier(&d(&[1, 1, 1]), &d(&[2, 1, 1])).unwrap();
        assert_eq!(kt.mixed, vec![qi(6), qi(8), qi(10), qi(12)]);
        assert_eq!(kt.slacks, vec![qi(4), qi(4)]);
        assert!(kt.holds);
        let kt = l.khovanskii_teissier(&d(&[1, 2, 3]), &d(&[3, 6, 9])).unwrap();
        assert!(kt.slacks.iter().all(Zero::is_zero));
        let kt = l.khovanskii_teissier(&d(&[1, 1, 1]), &d(&[1, 1, 1])).unwrap();
        assert!(kt.slacks.iter().all(Zero::is_zero));
    }

    #[test]
    fn newton_examples() {
        let l = p1_cubed();
        let gamma = CurveClass::from_ints(&[2, 2, 2]);
        let seed = DivisorClass(vec![qi(1), q(9, 10), q(11, 10)]);
        let opts = NewtonOptions::default();
        let r = l.newton_invert_power(&gamma, &seed, &opts).unwrap();
        assert!(r.residual <= opts.tol);
        assert!((&r.alpha - &d(&[1, 1, 1])).sup_norm() < q(1, 1_000_000));

        let fixed = DivisorClass(vec![q(3, 2), qi(1), q(2, 3)]);
        let r = l.newton_invert_power(&l.power_map(&fixed), &fixed, &opts).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.residual.is_zero());
        assert_eq!(r.alpha, fixed);

        let bad = CurveClass::from_ints(&[-2, -2, -2]);
        let err = l.newton_invert_power(&bad, &d(&[1, 1, 1]), &opts).unwrap_err();
        assert!(matches!(
            err,
            Error::NoConvergence { .. } | Error::ResultNotAmple | Error::SingularDerivative { .. }
        ));
    }

    #[test]
    fn invert_power_without_seed() {
        let pb = proj_bundle();
        let alpha = DivisorClass(vec![qi(1), q(2, 5)]);
        let r = pb.invert_power(&pb.power_map(&alpha), &NewtonOptions::default()).unwrap();
        assert!((&r.alpha - &alpha).sup_norm() < q(1, 1_000_000));
    }
}
