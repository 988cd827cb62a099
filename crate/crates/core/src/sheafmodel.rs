//! Presented sheaves: direct sums of line-bundle classes, or a total class with
//! declared subobjects. Stability is decided exactly against summand-generated
//! (resp. declared) subobjects only; general subsheaves are not modeled.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chambers::{cell_weights, sign_vector, Chamber, CrossingParameter, CrossingValue};
use crate::error::{Error, Result};
use crate::io::parse_json;
use crate::lattice::{CurveClass, DivisorClass, PolarisedLattice};
use crate::linalg::Matrix;
use crate::rational::{primitive_normal, Q};
use crate::region::Region;
use crate::walls::{slope, SheafFile, SheafNumerics, Wall};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresentationKind {
    DirectSum,
    Filtered,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedSheaf {
    pub kind: PresentationKind,
    /// Line-bundle summands (direct sums) or declared subobjects (filtered).
    pub parts: Vec<SheafNumerics>,
    pub total: SheafNumerics,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PresentationFile {
    DirectSum {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        summands: Vec<SheafFile>,
    },
    Filtered {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        total: SheafFile,
        subobjects: Vec<SheafFile>,
    },
}

impl PresentedSheaf {
    /// `⊕ O(L_i)`; the total has `c2 = Σ_{i<j} L_i L_j`.
    pub fn direct_sum(lattice: &PolarisedLattice, summands: Vec<DivisorClass>) -> Result<PresentedSheaf> {
        if summands.is_empty() {
            return Err(Error::InvalidInput("direct sum needs at least one summand".into()));
        }
        let rho = lattice.rank();
        let len = lattice.dimension() - 2;
        let mut parts = Vec::with_capacity(summands.len());
        for l in &summands {
            let line = SheafNumerics::new(1, l.clone(), []);
            line.validate(lattice)?;
            parts.push(line);
        }
        let basis: Vec<DivisorClass> = (0..rho).map(|i| DivisorClass::basis(rho, i)).collect();
        let mut c2 = BTreeMap::new();
        for mono in monomials(rho, len) {
            let mut v = Q::zero();
            for i in 0..summands.len() {
                for j in i + 1..summands.len() {
                    let mut classes: Vec<&DivisorClass> = mono.iter().map(|&k| &basis[k]).collect();
                    classes.push(&summands[i]);
                    classes.push(&summands[j]);
                    v += lattice.intersection_number(&classes)?;
                }
            }
            if !v.is_zero() {
                c2.insert(mono, v);
            }
        }
        let c1 = summands.iter().fold(DivisorClass::zero(rho), |a, b| &a + b);
        Ok(PresentedSheaf {
            kind: PresentationKind::DirectSum,
            total: SheafNumerics::new(summands.len() as u32, c1, c2),
            parts,
            label: None,
        })
    }

    pub fn filtered(lattice: &PolarisedLattice, total: SheafNumerics, subobjects: Vec<SheafNumerics>) -> Result<PresentedSheaf> {
        total.validate(lattice)?;
        for (i, s) in subobjects.iter().enumerate() {
            s.validate(lattice)?;
            if s.rank >= total.rank {
                return Err(Error::InvalidInput(format!(
                    "declared subobject {i} has rank {} but the total has rank {}",
                    s.rank, total.rank
                )));
            }
        }
        Ok(PresentedSheaf {
            kind: PresentationKind::Filtered,
            parts: subobjects,
            total,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn from_file(lattice: &PolarisedLattice, file: &PresentationFile) -> Result<PresentedSheaf> {
        match file {
            PresentationFile::DirectSum { label, summands } => {
                let mut lines = Vec::with_capacity(summands.len());
                for (i, s) in summands.iter().enumerate() {
                    let f = SheafNumerics::from_file(lattice, s)?;
                    if f.rank != 1 || !f.c2.values().all(Zero::is_zero) {
                        return Err(Error::InvalidInput(format!("summand {i} is not a line-bundle class")));
                    }
                    lines.push(f.c1);
                }
                let mut p = Self::direct_sum(lattice, lines)?;
                p.label = label.clone();
                Ok(p)
            }
            PresentationFile::Filtered { label, total, subobjects } => {
                let total = SheafNumerics::from_file(lattice, total)?;
                let subs = subobjects
                    .iter()
                    .map(|s| SheafNumerics::from_file(lattice, s))
                    .collect::<Result<Vec<_>>>()?;
                let mut p = Self::filtered(lattice, total, subs)?;
                p.label = label.clone();
                Ok(p)
            }
        }
    }

    pub fn from_json(lattice: &PolarisedLattice, text: &str, source: &str) -> Result<PresentedSheaf> {
        let file: PresentationFile = parse_json(text, source)?;
        Self::from_file(lattice, &file)
    }

    pub fn to_file(&self) -> PresentationFile {
        match self.kind {
            PresentationKind::DirectSum => PresentationFile::DirectSum {
                label: self.label.clone(),
                summands: self.parts.iter().map(SheafNumerics::to_file).collect(),
            },
            PresentationKind::Filtered => PresentationFile::Filtered {
                label: self.label.clone(),
                total: self.total.to_file(),
                subobjects: self.parts.iter().map(SheafNumerics::to_file).collect(),
            },
        }
    }

    /// Subobjects the verdict ranges over, as `(part indices, numerics)`: every
    /// proper nonempty sub-sum for direct sums, each declared subobject otherwise.
    pub fn subobjects(&self) -> Vec<(Vec<usize>, SheafNumerics)> {
        match self.kind {
            PresentationKind::Filtered => self.parts.iter().cloned().enumerate().map(|(i, s)| (vec![i], s)).collect(),
            PresentationKind::DirectSum => {
                let k = self.parts.len();
                let rho = self.total.c1.rho();
                (1u64..(1u64 << k).saturating_sub(1))
                    .map(|mask| {
                        let idx: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
                        let c1 = idx.iter().fold(DivisorClass::zero(rho), |a, &i| &a + &self.parts[i].c1);
                        (idx.clone(), SheafNumerics::new(idx.len() as u32, c1, []))
                    })
                    .collect()
            }
        }
    }

    /// Walls `(r c1(S) - r_S c1) · γ = 0` of all modeled subobjects `S`, deduplicated.
    pub fn subobject_walls(&self) -> Vec<Wall> {
        let mut normals: Vec<Vec<BigInt>> = self
            .subobjects()
            .into_iter()
            .filter_map(|(_, s)| primitive_normal(&slope_difference(&s, &self.total).0))
            .collect();
        normals.sort();
        normals.dedup();
        normals.into_iter().map(Wall::from_normal).collect()
    }
}

fn monomials(rho: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|m: Vec<usize>| {
                let start = m.last().copied().unwrap_or(0);
                (start..rho).map(move |i| {
                    let mut v = m.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

/// `r(E) c1(S) - r(S) c1(E)`; its pairing has the sign of `μ(S) - μ(E)`.
fn slope_difference(sub: &SheafNumerics, total: &SheafNumerics) -> DivisorClass {
    &sub.c1.scale(&total.r()) - &total.c1.scale(&sub.r())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Stable,
    ProperlySemistable,
    Unstable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Stable => "stable",
            Status::ProperlySemistable => "properly-semistable",
            Status::Unstable => "unstable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Summand indices of the maximal destabilizer (direct sums), or the indices
    /// of all declared subobjects attaining the maximal slope (filtered).
    pub parts: Vec<usize>,
    pub slope: Q,
    /// `μ(witness) - μ(total)`.
    pub gap: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub total_slope: Q,
    /// `None` when there is no modeled proper subobject.
    pub witness: Option<Witness>,
}

pub fn verdict(f: &PresentedSheaf, gamma: &CurveClass) -> Verdict {
    let total_slope = slope(&f.total, gamma);
    let slopes: Vec<Q> = f.parts.iter().map(|p| slope(p, gamma)).collect();
    let witness = match f.kind {
        // sums of summands have slope at most the largest summand slope, with
        // equality exactly for sub-sums of max-slope summands
        PresentationKind::DirectSum if f.parts.len() >= 2 => {
            let max = slopes.iter().max().unwrap().clone();
            let parts: Vec<usize> = (0..slopes.len()).filter(|&i| slopes[i] == max).collect();
            // all summands tied: the largest proper sub-sum has the same slope
            let parts = if parts.len() == slopes.len() { parts[..1].to_vec() } else { parts };
            Some(Witness {
                gap: &max - &total_slope,
                slope: max,
                parts,
            })
        }
        PresentationKind::DirectSum => None,
        PresentationKind::Filtered if f.parts.is_empty() => None,
        PresentationKind::Filtered => {
            let max = slopes.iter().max().unwrap().clone();
            Some(Witness {
                parts: (0..slopes.len()).filter(|&i| slopes[i] == max).collect(),
                gap: &max - &total_slope,
                slope: max,
            })
        }
    };
    let status = match &witness {
        None => Status::Stable,
        Some(w) if w.gap.is_negative() => Status::Stable,
        Some(w) if w.gap.is_zero() => Status::ProperlySemistable,
        Some(_) => Status::Unstable,
    };
    Verdict { status, total_slope, witness }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnGroup {
    pub slope: Q,
    pub summands: Vec<usize>,
}

/// Slope grouping of a direct sum, strictly decreasing.
pub fn hn_filtration(f: &PresentedSheaf, gamma: &CurveClass) -> Result<Vec<HnGroup>> {
    if f.kind != PresentationKind::DirectSum {
        return Err(Error::Precondition("HN grouping needs a direct-sum presentation".into()));
    }
    let mut groups: BTreeMap<Q, Vec<usize>> = BTreeMap::new();
    for (i, p) in f.parts.iter().enumerate() {
        groups.entry(slope(p, gamma)).or_default().push(i);
    }
    Ok(groups
        .into_iter()
        .rev()
        .map(|(slope, summands)| HnGroup { slope, summands })
        .collect())
}

/// Parameter `u ∈ [0,1]` where `μ(sub) = μ(total)` along `γ_u = (1-u)γ₀ + uγ₁`.
pub fn crossing_parameter(
    sub: &SheafNumerics,
    total: &SheafNumerics,
    g0: &CurveClass,
    g1: &CurveClass,
) -> Result<Option<CrossingParameter>> {
    if sub.rank >= total.rank {
        return Err(Error::Precondition("subobject rank must be below the total rank".into()));
    }
    let zeta = slope_difference(sub, total);
    let s0 = zeta.pair(g0);
    let s1 = zeta.pair(g1);
    if s0.is_zero() && s1.is_zero() {
        return Err(Error::IdenticallyEqual);
    }
    if s0 == s1 {
        return Ok(None);
    }
    let u = &s0 / (&s0 - &s1);
    if u.is_negative() || u > Q::one() {
        return Ok(None);
    }
    Ok(Some(CrossingParameter {
        value: CrossingValue::Rational(u),
        walls: Vec::new(),
    }))
}

#[derive(Debug, Clone)]
pub struct ConstancyReport {
    pub reference: Verdict,
    /// Sampled points with their verdicts, the representative first.
    pub samples: Vec<(CurveClass, Verdict)>,
    /// Samples that fell back to the representative itself.
    pub degenerate: usize,
}

fn same_verdict(a: &Verdict, b: &Verdict, open: bool) -> bool {
    a.status == b.status && (!open || a.witness.as_ref().map(|w| &w.parts) == b.witness.as_ref().map(|w| &w.parts))
}

fn describe(gamma: &CurveClass, v: &Verdict) -> String {
    let coords: Vec<String> = gamma.0.iter().map(ToString::to_string).collect();
    let parts = v.witness.as_ref().map(|w| format!("{:?}", w.parts)).unwrap_or_else(|| "[]".into());
    format!("({}) {} witness {parts}", coords.join(", "), v.status)
}

/// Random exact points of the cell: random convex weights projected onto the
/// equality constraints of the cell, then pulled toward an interior point until
/// every sign condition and weight bound holds.
pub fn sample_cell(region: &Region, walls: &[Wall], chamber: &Chamber, count: usize, seed: u64) -> Result<(Vec<CurveClass>, usize)> {
    let center = cell_weights(region, walls, &chamber.signs).ok_or(Error::EmptyRegion)?;
    let k = center.len();
    let mut eq_rows: Vec<Vec<Q>> = vec![vec![Q::one(); k]];
    let mut eq_rhs = vec![Q::one()];
    for &i in &chamber.walls_active {
        eq_rows.push(region.pairing_row(&walls[i].normal_q()));
        eq_rhs.push(Q::zero());
    }
    let mut aug = Matrix::from_rows(
        eq_rows
            .iter()
            .zip(&eq_rhs)
            .map(|(r, b)| r.iter().cloned().chain([b.clone()]).collect())
            .collect(),
    );
    let rank = aug.rref().len();
    let e = Matrix::from_rows((0..rank).map(|i| aug.row(i)[..k].to_vec()).collect());
    let rhs: Vec<Q> = (0..rank).map(|i| aug.row(i)[k].clone()).collect();
    let gram = e.mul(&e.transpose());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut degenerate = 0;
    for _ in 0..count {
        let raw: Vec<Q> = (0..k).map(|_| Q::from_integer(BigInt::from(rng.gen_range(0..=64u32)))).collect();
        let total: Q = raw.iter().sum();
        let w: Vec<Q> = if total.is_zero() {
            center.clone()
        } else {
            raw.iter().map(|x| x / &total).collect()
        };
        let resid: Vec<Q> = e.mul_vec(&w).iter().zip(&rhs).map(|(a, b)| a - b).collect();
        let y = gram.solve(&resid).expect("independent rows");
        let corr = e.transpose().mul_vec(&y);
        let target: Vec<Q> = w.iter().zip(&corr).map(|(a, b)| a - b).collect();
        let mut t = Q::one();
        let mut found = None;
        for _ in 0..48 {
            let cand: Vec<Q> = center.iter().zip(&target).map(|(c, x)| c + (x - c) * &t).collect();
            if cand.iter().all(|x| !x.is_negative()) {
                let p = region.point_from_weights(&cand);
                if sign_vector(&p, walls) == chamber.signs {
                    found = Some(p);
                    break;
                }
            }
            t /= Q::from_integer(BigInt::from(2));
        }
        points.push(found.unwrap_or_else(|| {
            degenerate += 1;
            region.point_from_weights(&center)
        }));
    }
    Ok((points, degenerate))
}

/// Verdict at the representative and at `samples` seeded exact points of the
/// cell must agree in status, and for open cells in the witness parts.
pub fn chamber_constancy_check(
    f: &PresentedSheaf,
    region: &Region,
    walls: &[Wall],
    chamber: &Chamber,
    samples: usize,
    seed: u64,
) -> Result<ConstancyReport> {
    let reference = verdict(f, &chamber.representative);
    let (points, degenerate) = sample_cell(region, walls, chamber, samples, seed)?;
    let mut log = vec![(chamber.representative.clone(), reference.clone())];
    for (i, p) in points.into_iter().enumerate() {
        let v = verdict(f, &p);
        if !same_verdict(&reference, &v, chamber.is_open()) {
            return Err(Error::ConstancyViolation {
                sample: i,
                first: describe(&chamber.representative, &reference),
                second: describe(&p, &v),
            });
        }
        log.push((p, v));
    }
    Ok(ConstancyReport {
        reference,
        samples: log,
        degenerate,
    })
}
