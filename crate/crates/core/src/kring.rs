//! Numerical Grothendieck ring modeled by Chern characters in a graded rational
//! cohomology ring, with exact verification of the determinant-class identities
//! (`w`/`u` classes, scaling, telescoping).
//!
//! Classes on a complete intersection `X^(m) = H_1 ∩ ... ∩ H_m` are never built
//! directly. They are carried as pushforwards to `X`: a class restricted from `X`
//! becomes `b * h_1 ... h_m`, the point class stays the point class, and
//! `χ_{X^(m)}(x) = χ_X(pushforward x)`. Equivalence on `X^(m)` is tested against
//! every class restricted from `X`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::parse_json;
use crate::lattice::{DivisorClass, PolarisedLattice};
use crate::linalg::Matrix;
use crate::rational::{zeros, RatStr, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KClass {
    pub ch: Vec<Q>,
    pub label: Option<String>,
}

impl KClass {
    pub fn new(ch: Vec<Q>) -> Self {
        KClass { ch, label: None }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn rank(&self) -> &Q {
        &self.ch[0]
    }

    pub fn is_zero(&self) -> bool {
        self.ch.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &KClass) -> KClass {
        KClass::new(self.ch.iter().zip(&o.ch).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &KClass) -> KClass {
        KClass::new(self.ch.iter().zip(&o.ch).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Q) -> KClass {
        KClass::new(self.ch.iter().map(|a| a * s).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub name: String,
    pub dimension: usize,
    pub chi_structure_sheaf: RatStr,
    pub basis: Vec<BasisEntry>,
    pub mult: Vec<MultEntry>,
    pub integrate: Vec<IntegrateEntry>,
    pub todd: Vec<Term>,
    pub point_class: Vec<Term>,
    pub divisor_embedding: Vec<Vec<Term>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisEntry {
    pub name: String,
    pub degree: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultEntry {
    pub left: String,
    pub right: String,
    pub result: Vec<Term>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegrateEntry {
    pub basis: String,
    pub value: RatStr,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Term {
    pub basis: String,
    pub coeff: RatStr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyModel {
    name: String,
    n: usize,
    names: Vec<String>,
    degrees: Vec<usize>,
    /// `table[i][j]` is the product `e_i e_j` in basis coordinates.
    table: Vec<Vec<Vec<Q>>>,
    integrate: Vec<Q>,
    todd: Vec<Q>,
    point: Vec<Q>,
    chi_o: Q,
    embedding: Vec<Vec<Q>>,
}

/// Class list for identity checks: Chern-character vectors in the model basis,
/// optionally with the `n - 1` divisors and scaling multiplicities.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ClassListFile {
    pub classes: Vec<Vec<RatStr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisors: Option<Vec<Vec<RatStr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u32>>,
}

/// Outcome of one identity check: the difference class and whether it is
/// numerically trivial.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub holds: bool,
    pub difference: KClass,
}

#[derive(Debug, Clone)]
pub struct TelescopingStep {
    pub step: usize,
    pub exponent: Q,
    pub secondway: IdentityCheck,
    pub firstway: IdentityCheck,
}

#[derive(Debug, Clone)]
pub struct TelescopingReport {
    pub holds: bool,
    pub steps: Vec<TelescopingStep>,
    /// `d_1 d_2 ... d_{n-1}`.
    pub total_exponent: Q,
}

impl CohomologyModel {
    pub fn from_json(text: &str, source: &str) -> Result<Self> {
        let file: ModelFile = parse_json(text, source)?;
        Self::from_file(&file)
    }

    /// Builds the dense product table and runs every load-time consistency check.
    pub fn from_file(file: &ModelFile) -> Result<Self> {
        let n = file.dimension;
        let dim = file.basis.len();
        if dim == 0 {
            return Err(Error::InvalidInput("empty basis".into()));
        }
        let mut index = HashMap::new();
        for (i, b) in file.basis.iter().enumerate() {
            if b.degree > n {
                return Err(Error::InvalidInput(format!("basis element {} has degree above {n}", b.name)));
            }
            if index.insert(b.name.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate basis name {}", b.name)));
            }
        }
        if file.basis[0].degree != 0 {
            return Err(Error::InvalidInput("first basis element must be the unit".into()));
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("unknown basis element {name}")))
        };
        let vector = |terms: &[Term]| -> Result<Vec<Q>> {
            let mut v = zeros(dim);
            for t in terms {
                v[lookup(&t.basis)?] += &t.coeff.0;
            }
            Ok(v)
        };
        let mut table = vec![vec![zeros(dim); dim]; dim];
        for (i, row) in table.iter_mut().enumerate() {
            row[0][i] = Q::one();
        }
        for (i, v) in table[0].iter_mut().enumerate() {
            v[i] = Q::one();
        }
        for m in &file.mult {
            let (i, j) = (lookup(&m.left)?, lookup(&m.right)?);
            if i == 0 || j == 0 {
                return Err(Error::InvalidInput("products with the unit are implicit".into()));
            }
            let v = vector(&m.result)?;
            table[i][j] = v.clone();
            table[j][i] = v;
        }
        let mut integrate = zeros(dim);
        for e in &file.integrate {
            integrate[lookup(&e.basis)?] = e.value.0.clone();
        }
        let embedding = file
            .divisor_embedding
            .iter()
            .map(|t| vector(t))
            .collect::<Result<Vec<_>>>()?;
        let model = CohomologyModel {
            name: file.name.clone(),
            n,
            names: file.basis.iter().map(|b| b.name.clone()).collect(),
            degrees: file.basis.iter().map(|b| b.degree).collect(),
            table,
            integrate,
            todd: vector(&file.todd)?,
            point: vector(&file.point_class)?,
            chi_o: file.chi_structure_sheaf.0.clone(),
            embedding,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn to_file(&self) -> ModelFile {
        let terms = |v: &[Q]| -> Vec<Term> {
            v.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| Term {
                    basis: self.names[i].clone(),
                    coeff: RatStr(c.clone()),
                })
                .collect()
        };
        let dim = self.names.len();
        let mut mult = Vec::new();
        for i in 1..dim {
            for j in i..dim {
                let r = terms(&self.table[i][j]);
                if !r.is_empty() {
                    mult.push(MultEntry {
                        left: self.names[i].clone(),
                        right: self.names[j].clone(),
                        result: r,
                    });
                }
            }
        }
        ModelFile {
            name: self.name.clone(),
            dimension: self.n,
            chi_structure_sheaf: RatStr(self.chi_o.clone()),
            basis: self
                .names
                .iter()
                .zip(&self.degrees)
                .map(|(name, &degree)| BasisEntry {
                    name: name.clone(),
                    degree,
                })
                .collect(),
            mult,
            integrate: self
                .integrate
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| IntegrateEntry {
                    basis: self.names[i].clone(),
                    value: RatStr(c.clone()),
                })
                .collect(),
            todd: terms(&self.todd),
            point_class: terms(&self.point),
            divisor_embedding: self.embedding.iter().map(|e| terms(e)).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let inconsistent = |msg: String| Err(Error::InternalInconsistency(format!("model {}: {msg}", self.name)));
        for i in 0..dim {
            for j in 0..dim {
                if self.table[i][j] != self.table[j][i] {
                    return inconsistent(format!("product {} * {} is not commutative", self.names[i], self.names[j]));
                }
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if !c.is_zero() && self.degrees[k] != self.degrees[i] + self.degrees[j] {
                        return inconsistent(format!("product {} * {} breaks the grading", self.names[i], self.names[j]));
                    }
                }
            }
        }
        for i in 1..dim {
            for j in 1..dim {
                for k in 1..dim {
                    let left = self.mul_vec(&self.mul_vec(&unit_vec(dim, i), &unit_vec(dim, j)), &unit_vec(dim, k));
                    let right = self.mul_vec(&unit_vec(dim, i), &self.mul_vec(&unit_vec(dim, j), &unit_vec(dim, k)));
                    if left != right {
                        return inconsistent(format!(
                            "product is not associative on {}, {}, {}",
                            self.names[i], self.names[j], self.names[k]
                        ));
                    }
                }
            }
        }
        for (i, v) in self.integrate.iter().enumerate() {
            if !v.is_zero() && self.degrees[i] != self.n {
                return inconsistent(format!("integration is nonzero on {} of degree below n", self.names[i]));
            }
        }
        if self.point.iter().enumerate().any(|(i, c)| !c.is_zero() && self.degrees[i] != self.n) {
            return inconsistent("point class is not of top degree".into());
        }
        if self.integrate_vec(&self.point) != Q::one() {
            return inconsistent("point class does not integrate to 1".into());
        }
        if self.todd[0] != Q::one() {
            return inconsistent("Todd class must start with 1".into());
        }
        for e in &self.embedding {
            if e.len() != dim || e.iter().enumerate().any(|(i, c)| !c.is_zero() && self.degrees[i] != 1) {
                return inconsistent("divisor embedding must land in degree 1".into());
            }
        }
        let chi = self.chi(&self.unit());
        if chi != self.chi_o {
            return inconsistent(format!(
                "χ(O_X) from Todd data is {chi}, declared {}",
                self.chi_o
            ));
        }
        if self.gram().det().is_zero() {
            return inconsistent("Euler pairing is degenerate on the basis".into());
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.names
    }

    pub fn lattice_rank(&self) -> usize {
        self.embedding.len()
    }

    /// Checks that `lattice` describes the same N¹ with the same top intersections.
    pub fn check_compatible(&self, lattice: &PolarisedLattice) -> Result<()> {
        if lattice.dimension() != self.n || lattice.rank() != self.lattice_rank() {
            return Err(Error::DimensionMismatch(format!(
                "lattice {} (n={}, rho={}) vs model {} (n={}, rho={})",
                lattice.name(),
                lattice.dimension(),
                lattice.rank(),
                self.name,
                self.n,
                self.lattice_rank()
            )));
        }
        let rho = lattice.rank();
        for (mono, value) in lattice.form_entries() {
            let prod = mono
                .iter()
                .fold(self.unit().ch, |acc, &i| self.mul_vec(&acc, &self.embedding[i]));
            if &self.integrate_vec(&prod) != value {
                return Err(Error::InvalidInput(format!(
                    "lattice and model disagree on monomial {mono:?}"
                )));
            }
        }
        let total = lattice.form_entries().len();
        let expected = count_nonzero_monomials(self, rho);
        if total != expected {
            return Err(Error::InvalidInput("lattice and model disagree on the intersection form".into()));
        }
        Ok(())
    }

    fn check(&self, a: &KClass) -> Result<()> {
        if a.ch.len() != self.dim() {
            return Err(Error::ModelMismatch(
                format!("class of length {}", a.ch.len()),
                format!("model {} of dimension {}", self.name, self.dim()),
            ));
        }
        Ok(())
    }

    fn mul_vec(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let dim = self.dim();
        let mut out = zeros(dim);
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &xy * c;
                    }
                }
            }
        }
        out
    }

    fn integrate_vec(&self, a: &[Q]) -> Q {
        crate::rational::dot(a, &self.integrate)
    }

    pub fn unit(&self) -> KClass {
        KClass::new(unit_vec(self.dim(), 0))
    }

    pub fn zero(&self) -> KClass {
        KClass::new(zeros(self.dim()))
    }

    /// `[O_x]`.
    pub fn point_class(&self) -> KClass {
        KClass::new(self.point.clone())
    }

    /// Class whose Chern character is the `j`-th basis element.
    pub fn basis_class(&self, j: usize) -> KClass {
        KClass::new(unit_vec(self.dim(), j))
    }

    /// Degree-1 cohomology class of a divisor.
    pub fn divisor(&self, d: &DivisorClass) -> Result<Vec<Q>> {
        if d.rho() != self.lattice_rank() {
            return Err(Error::DimensionMismatch(format!(
                "divisor of rank {} on model with rank {}",
                d.rho(),
                self.lattice_rank()
            )));
        }
        let mut v = zeros(self.dim());
        for (c, e) in d.0.iter().zip(&self.embedding) {
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi += c * ei;
            }
        }
        Ok(v)
    }

    pub fn mul(&self, a: &KClass, b: &KClass) -> Result<KClass> {
        self.check(a)?;
        self.check(b)?;
        Ok(KClass::new(self.mul_vec(&a.ch, &b.ch)))
    }

    fn product(&self, classes: &[&KClass]) -> KClass {
        KClass::new(
            classes
                .iter()
                .fold(self.unit().ch, |acc, c| self.mul_vec(&acc, &c.ch)),
        )
    }

    /// `∫ ch(a) td(X)`.
    pub fn chi(&self, a: &KClass) -> Q {
        self.integrate_vec(&self.mul_vec(&a.ch, &self.todd))
    }

    /// `χ(a * b)`.
    pub fn euler_pairing(&self, a: &KClass, b: &KClass) -> Result<Q> {
        Ok(self.chi(&self.mul(a, b)?))
    }

    pub fn gram(&self) -> Matrix {
        let dim = self.dim();
        let mut m = Matrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = self.chi(&KClass::new(self.table[i][j].clone()));
            }
        }
        m
    }

    /// `ch(O(D)) = exp(D)`.
    pub fn line_class(&self, d: &DivisorClass) -> Result<KClass> {
        let x = self.divisor(d)?;
        let mut term = self.unit().ch;
        let mut total = term.clone();
        for k in 1..=self.n {
            term = self.mul_vec(&term, &x);
            let inv = Q::new(BigInt::one(), BigInt::from(k));
            term.iter_mut().for_each(|t| *t *= &inv);
            total.iter_mut().zip(&term).for_each(|(a, b)| *a += b);
        }
        Ok(KClass::new(total))
    }

    /// `[O_{aH}] = 1 - [O(-aH)]`.
    pub fn divisor_structure_class(&self, h: &DivisorClass, a: u32) -> Result<KClass> {
        if a == 0 {
            return Err(Error::Precondition("multiplicity must be at least 1".into()));
        }
        let neg = h.scale(&-Q::from_integer(BigInt::from(a)));
        Ok(self.unit().sub(&self.line_class(&neg)?))
    }

    /// Radical test by pairing against every basis class, cross-checked with `ch = 0`.
    pub fn is_numerically_trivial(&self, a: &KClass) -> Result<bool> {
        self.check(a)?;
        let by_pairing = (0..self.dim()).all(|j| {
            self.chi(&KClass::new(self.mul_vec(&a.ch, &unit_vec(self.dim(), j)))).is_zero()
        });
        let by_ch = a.is_zero();
        if by_pairing != by_ch {
            return Err(Error::InternalInconsistency(format!(
                "model {}: Euler pairing and Chern character disagree on triviality",
                self.name
            )));
        }
        Ok(by_ch)
    }

    fn classes_h(&self, hs: &[DivisorClass]) -> Result<Vec<KClass>> {
        if hs.len() + 1 != self.n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} divisors, got {}",
                self.n - 1,
                hs.len()
            )));
        }
        hs.iter().map(|h| self.divisor_structure_class(h, 1)).collect()
    }

    /// Pushforward to `X` of `u_i(c|_{X^(m)})`, `m = n - 1 - i`, for the
    /// multipolarisation `hs = (H_1, ..., H_{n-1})`.
    pub fn u_class(&self, i: usize, c: &KClass, hs: &[DivisorClass]) -> Result<KClass> {
        self.check(c)?;
        if i + 1 > self.n {
            return Err(Error::Precondition(format!("u-index {i} exceeds n-1")));
        }
        let h = self.classes_h(hs)?;
        Ok(self.u_with(i, c, &h, &self.point_class()))
    }

    /// `u_i` with `[O_x]` replaced by `point`.
    pub fn u_class_with_point(&self, i: usize, c: &KClass, hs: &[DivisorClass], point: &KClass) -> Result<KClass> {
        self.check(c)?;
        self.check(point)?;
        let h = self.classes_h(hs)?;
        Ok(self.u_with(i, c, &h, point))
    }

    fn u_with(&self, i: usize, c: &KClass, h: &[KClass], point: &KClass) -> KClass {
        let m = self.n - 1 - i;
        // on Y = X^(m): -r [h_{m+1} ... h_{n-1}] + χ_Y(c| h_{m+1} ... h_{n-1}) [O_x], pushed forward
        let restrict = self.product(&h[..m].iter().collect::<Vec<_>>());
        let cut = self.product(&h[m..].iter().collect::<Vec<_>>());
        let cut_y = self.mul_vec(&cut.ch, &restrict.ch);
        let c_y = self.mul_vec(&c.ch, &restrict.ch);
        let chi = self.chi(&KClass::new(self.mul_vec(&c_y, &cut.ch)));
        KClass::new(cut_y).scale(&-c.rank()).add(&point.scale(&chi))
    }

    /// Auxiliary class `w` on `X^(m)` (pushed forward), with `X' = X^(m+1)` cut out
    /// by `H_{m+1}`.
    fn w_at_depth(&self, m: usize, c: &KClass, h: &[KClass]) -> KClass {
        let restrict = self.product(&h[..m].iter().collect::<Vec<_>>());
        let first = &h[m];
        let rest = self.product(&h[m + 1..].iter().collect::<Vec<_>>());
        let all = self.mul_vec(&rest.ch, &first.ch);
        let c_y = self.mul_vec(&c.ch, &restrict.ch);
        // χ(c · h_{n-1}⋯h_{m+1} · [O_{X'}]) and χ(c · h_{n-1}⋯h_{m+2} · [O_{X'}])
        let chi_top = self.chi(&KClass::new(self.mul_vec(&self.mul_vec(&c_y, &all), &first.ch)));
        let chi_low = self.chi(&KClass::new(self.mul_vec(&c_y, &all)));
        let low = KClass::new(self.mul_vec(&rest.ch, &restrict.ch));
        let top = KClass::new(self.mul_vec(&all, &restrict.ch));
        low.scale(&-chi_top).add(&top.scale(&chi_low))
    }

    pub fn w_class(&self, c: &KClass, hs: &[DivisorClass]) -> Result<KClass> {
        self.check(c)?;
        let h = self.classes_h(hs)?;
        Ok(self.w_at_depth(0, c, &h))
    }

    /// `d_i = H_1 ⋯ H_{n-1} · H_i`, intersection numbers of the multipolarisation.
    pub fn degrees(&self, hs: &[DivisorClass]) -> Result<Vec<Q>> {
        let divs: Vec<Vec<Q>> = hs.iter().map(|h| self.divisor(h)).collect::<Result<_>>()?;
        let all = divs.iter().fold(self.unit().ch, |acc, d| self.mul_vec(&acc, d));
        Ok(divs
            .iter()
            .map(|d| self.integrate_vec(&self.mul_vec(&all, d)))
            .collect())
    }

    fn check_identity(&self, difference: KClass) -> Result<IdentityCheck> {
        let holds = self.is_numerically_trivial(&difference)?;
        Ok(IdentityCheck { holds, difference })
    }

    /// Triviality on `X^(m)` of a pushed-forward class: pairing against every class
    /// restricted from `X`, that is `χ_X(x · b)` for all basis classes `b`.
    fn check_virtual(&self, pushed: KClass) -> IdentityCheck {
        let holds_pairing = (0..self.dim()).all(|j| {
            self.chi(&KClass::new(self.mul_vec(&pushed.ch, &unit_vec(self.dim(), j)))).is_zero()
        });
        IdentityCheck {
            holds: holds_pairing,
            difference: pushed,
        }
    }

    fn secondway_at(&self, m: usize, c: &KClass, h: &[KClass], d: &Q) -> Result<IdentityCheck> {
        let w = self.w_at_depth(m, c, h);
        let lhs = KClass::new(self.mul_vec(&w.ch, &h[m].ch));
        let u = self.u_with(self.n - 1 - m, c, h, &self.point_class());
        self.check_identity(lhs.sub(&u.scale(d)))
    }

    fn firstway_at(&self, m: usize, c: &KClass, h: &[KClass], d: &Q) -> Result<IdentityCheck> {
        let w = self.w_at_depth(m, c, h);
        // w restricted to X^(m+1) and pushed forward
        let restricted = KClass::new(self.mul_vec(&w.ch, &h[m].ch));
        let u = self.u_with(self.n - 2 - m, c, h, &self.point_class());
        Ok(self.check_virtual(restricted.sub(&u.scale(d))))
    }

    /// `w · h_1 ≡ d_1 u_{n-1}(c)` in `K(X)_num`.
    pub fn verify_secondway(&self, c: &KClass, hs: &[DivisorClass]) -> Result<IdentityCheck> {
        self.check(c)?;
        let h = self.classes_h(hs)?;
        let d = self.degrees(hs)?;
        self.secondway_at(0, c, &h, &d[0])
    }

    /// `w|_{X'} ≡ d_1 u_{n-2}(c|_{X'})` in `K(X')_num`, tested against restrictions.
    pub fn verify_firstway_virtual(&self, c: &KClass, hs: &[DivisorClass]) -> Result<IdentityCheck> {
        self.check(c)?;
        let h = self.classes_h(hs)?;
        let d = self.degrees(hs)?;
        self.firstway_at(0, c, &h, &d[0])
    }

    /// `u_{n-1}(c; a_1 H_1, ..., a_{n-1} H_{n-1}) ≡ (a_1 ⋯ a_{n-1}) u_{n-1}(c; H)`.
    pub fn verify_scaling(&self, c: &KClass, hs: &[DivisorClass], a: &[u32]) -> Result<IdentityCheck> {
        self.check(c)?;
        let h = self.classes_h(hs)?;
        if a.len() != hs.len() {
            return Err(Error::DimensionMismatch("one multiplicity per divisor".into()));
        }
        let scaled: Vec<KClass> = hs
            .iter()
            .zip(a)
            .map(|(hd, &ai)| self.divisor_structure_class(hd, ai))
            .collect::<Result<_>>()?;
        let top = self.n - 1;
        let lhs = self.u_with(top, c, &scaled, &self.point_class());
        let factor = a.iter().fold(Q::one(), |acc, &ai| acc * Q::from_integer(BigInt::from(ai)));
        let rhs = self.u_with(top, c, &h, &self.point_class()).scale(&factor);
        self.check_identity(lhs.sub(&rhs))
    }

    /// Steps `i = 1..n-1` of the chain from `u_{n-1}(c)` down to `u_0(c|_{X^(n-1)})`;
    /// step `i` runs the firstway/secondway pair on `X^(n-1-i)` with exponent `d_{n-i}`.
    pub fn verify_telescoping(&self, c: &KClass, hs: &[DivisorClass]) -> Result<TelescopingReport> {
        self.check(c)?;
        let h = self.classes_h(hs)?;
        let d = self.degrees(hs)?;
        let mut steps = Vec::new();
        for i in 1..self.n {
            let m = self.n - 1 - i;
            let exponent = d[m].clone();
            steps.push(TelescopingStep {
                step: i,
                secondway: self.secondway_at(m, c, &h, &exponent)?,
                firstway: self.firstway_at(m, c, &h, &exponent)?,
                exponent,
            });
        }
        let holds = steps.iter().all(|s| s.secondway.holds && s.firstway.holds);
        let total_exponent = d.iter().fold(Q::one(), |acc, x| acc * x);
        Ok(TelescopingReport {
            holds,
            steps,
            total_exponent,
        })
    }
}

fn unit_vec(dim: usize, i: usize) -> Vec<Q> {
    let mut v = zeros(dim);
    v[i] = Q::one();
    v
}

fn count_nonzero_monomials(model: &CohomologyModel, rho: usize) -> usize {
    let mut count = 0;
    let mut idx = vec![0usize; model.n];
    loop {
        let prod = idx
            .iter()
            .fold(model.unit().ch, |acc, &i| model.mul_vec(&acc, &model.embedding[i]));
        if !model.integrate_vec(&prod).is_zero() {
            count += 1;
        }
        // next non-decreasing multi-index
        let mut k = model.n;
        loop {
            if k == 0 {
                return count;
            }
            k -= 1;
            if idx[k] + 1 < rho {
                let v = idx[k] + 1;
                for slot in idx[k..].iter_mut() {
                    *slot = v;
                }
                break;
            }
        }
    }
}
