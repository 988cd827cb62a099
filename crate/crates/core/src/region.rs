//! Compact rational polytopes `K ⊂ N_1` whose vertices are certified in `P(X)`.
//!
//! Membership of non-vertex points in `P(X)` is not certified; `P(X)` is open but
//! not known to be convex, so only vertices (and sampled points) carry preimages.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::parse_json;
use crate::lattice::{CurveClass, DivisorClass, NewtonOptions, PolarisedLattice};
use crate::lp::{Constraint, LinearProgram, LpOutcome, Relation};
use crate::rational::{from_strs, parse_rational, to_strs, zeros, RatStr, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    vertices: Vec<CurveClass>,
    preimages: Vec<DivisorClass>,
    residuals: Vec<Q>,
    tolerance: Q,
}

/// On-disk region: either curve-class vertices (certified by Newton inversion) or
/// ample divisor classes whose power-map images are the vertices.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RegionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<RatStr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ample_vertices: Option<Vec<Vec<RatStr>>>,
}

impl Region {
    /// Certifies each vertex by Newton inversion with a strictly ample result.
    pub fn certify(lattice: &PolarisedLattice, vertices: Vec<CurveClass>, opts: &NewtonOptions) -> Result<Region> {
        let vertices = dedup(vertices);
        if vertices.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let mut preimages = Vec::new();
        let mut residuals = Vec::new();
        for (index, v) in vertices.iter().enumerate() {
            if v.rho() != lattice.rank() {
                return Err(Error::DimensionMismatch(format!(
                    "region vertex {index} has {} coordinates, lattice rank is {}",
                    v.rho(),
                    lattice.rank()
                )));
            }
            let r = lattice.invert_power(v, opts).map_err(|e| Error::RegionNotInP {
                index,
                reason: e.to_string(),
            })?;
            preimages.push(r.alpha);
            residuals.push(r.residual);
        }
        Ok(Region {
            vertices,
            preimages,
            residuals,
            tolerance: opts.tol.clone(),
        })
    }

    /// Region whose vertices are the exact images of strictly ample classes.
    pub fn from_ample(lattice: &PolarisedLattice, ample: Vec<DivisorClass>) -> Result<Region> {
        let mut seen = Vec::new();
        for (index, a) in ample.into_iter().enumerate() {
            if a.rho() != lattice.rank() {
                return Err(Error::DimensionMismatch(format!("region class {index} has wrong length")));
            }
            if !lattice.is_in_ample_cone(&a, true) {
                return Err(Error::RegionNotInP {
                    index,
                    reason: "class is not strictly ample in the modeled cone".into(),
                });
            }
            if !seen.contains(&a) {
                seen.push(a);
            }
        }
        if seen.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let vertices: Vec<CurveClass> = seen.iter().map(|a| lattice.power_map(a)).collect();
        if dedup(vertices.clone()).len() != vertices.len() {
            return Err(Error::InvalidInput("distinct ample classes with equal power-map image".into()));
        }
        let residuals = vec![Q::zero(); seen.len()];
        Ok(Region {
            vertices,
            preimages: seen,
            residuals,
            tolerance: Q::zero(),
        })
    }

    /// Images of the corners of the box `D ± radius·e_i`.
    pub fn around(lattice: &PolarisedLattice, center: &DivisorClass, radius: &Q) -> Result<Region> {
        if !radius.is_positive() {
            return Err(Error::InvalidInput("radius must be positive".into()));
        }
        let rho = lattice.rank();
        if center.rho() != rho {
            return Err(Error::DimensionMismatch("region center has wrong length".into()));
        }
        let corners = (0..1usize << rho)
            .map(|mask| {
                DivisorClass(
                    (0..rho)
                        .map(|i| {
                            if mask >> i & 1 == 1 {
                                &center.0[i] + radius
                            } else {
                                &center.0[i] - radius
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        Region::from_ample(lattice, corners)
    }

    pub fn from_file(lattice: &PolarisedLattice, file: &RegionFile, opts: &NewtonOptions) -> Result<Region> {
        match (&file.vertices, &file.ample_vertices) {
            (Some(v), None) => Region::certify(lattice, v.iter().map(|c| CurveClass(from_strs(c))).collect(), opts),
            (None, Some(a)) => Region::from_ample(lattice, a.iter().map(|c| DivisorClass(from_strs(c))).collect()),
            _ => Err(Error::InvalidInput(
                "region file needs exactly one of \"vertices\" or \"ample_vertices\"".into(),
            )),
        }
    }

    pub fn from_json(lattice: &PolarisedLattice, text: &str, source: &str, opts: &NewtonOptions) -> Result<Region> {
        let file: RegionFile = parse_json(text, source)?;
        Region::from_file(lattice, &file, opts)
    }

    /// `around <divisor> radius <rational>` with the divisor as comma-separated rationals.
    pub fn parse_around(lattice: &PolarisedLattice, text: &str) -> Result<Option<Region>> {
        let words: Vec<&str> = text.split_whitespace().collect();
        match words.as_slice() {
            ["around", divisor, "radius", radius] => {
                let coords = divisor
                    .trim_matches(|c| c == '(' || c == ')' || c == '[' || c == ']')
                    .split(',')
                    .map(|s| parse_rational(s.trim()))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Parse {
                        location: "--region".into(),
                        message: e.to_string(),
                    })?;
                let radius = parse_rational(radius).map_err(|e| Error::Parse {
                    location: "--region".into(),
                    message: e.to_string(),
                })?;
                Region::around(lattice, &DivisorClass(coords), &radius).map(Some)
            }
            _ => Ok(None),
        }
    }

    pub fn to_file(&self) -> RegionFile {
        RegionFile {
            vertices: Some(self.vertices.iter().map(|v| to_strs(&v.0)).collect()),
            ample_vertices: None,
        }
    }

    pub fn vertices(&self) -> &[CurveClass] {
        &self.vertices
    }

    pub fn preimages(&self) -> &[DivisorClass] {
        &self.preimages
    }

    pub fn residuals(&self) -> &[Q] {
        &self.residuals
    }

    pub fn tolerance(&self) -> &Q {
        &self.tolerance
    }

    pub fn rho(&self) -> usize {
        self.vertices[0].rho()
    }

    pub fn barycenter(&self) -> CurveClass {
        let k = Q::from_integer(self.vertices.len().into());
        let mut acc = CurveClass::zero(self.rho());
        for v in &self.vertices {
            acc = &acc + v;
        }
        acc.scale(&k.recip())
    }

    /// Average of the certified vertex preimages.
    pub fn reference_ample(&self) -> DivisorClass {
        let k = Q::from_integer(self.preimages.len().into());
        let mut acc = DivisorClass::zero(self.rho());
        for p in &self.preimages {
            acc = &acc + p;
        }
        acc.scale(&k.recip())
    }

    /// Exact membership in the convex hull of the vertices.
    pub fn contains(&self, gamma: &CurveClass) -> bool {
        let k = self.vertices.len();
        let mut lp = LinearProgram::new(vec![true; k]);
        for i in 0..self.rho() {
            lp.constrain(self.vertices.iter().map(|v| v.0[i].clone()).collect(), Relation::Eq, gamma.0[i].clone());
        }
        lp.constrain(vec![Q::one(); k], Relation::Eq, Q::one());
        lp.solve().is_feasible()
    }

    /// Convex-weight constraints for an LP over `(λ_1..λ_k)` with `Σλ = 1`.
    pub fn weight_constraints(&self) -> Vec<Constraint> {
        vec![Constraint {
            coeffs: vec![Q::one(); self.vertices.len()],
            rel: Relation::Eq,
            rhs: Q::one(),
        }]
    }

    /// Pairing of a divisor with each vertex, as a row over the convex weights.
    pub fn pairing_row(&self, d: &[Q]) -> Vec<Q> {
        self.vertices.iter().map(|v| crate::rational::dot(d, &v.0)).collect()
    }

    pub fn point_from_weights(&self, weights: &[Q]) -> CurveClass {
        let mut acc = zeros(self.rho());
        for (w, v) in weights.iter().zip(&self.vertices) {
            for (a, x) in acc.iter_mut().zip(&v.0) {
                *a += w * x;
            }
        }
        CurveClass(acc)
    }

    /// Rational point of `K ∩ {d·γ = 0}`, if any.
    pub fn hyperplane_point(&self, d: &[Q]) -> Option<CurveClass> {
        let k = self.vertices.len();
        let mut lp = LinearProgram::new(vec![true; k]);
        lp.constrain(vec![Q::one(); k], Relation::Eq, Q::one());
        lp.constrain(self.pairing_row(d), Relation::Eq, Q::zero());
        match lp.solve() {
            LpOutcome::Optimal { x, .. } => Some(self.point_from_weights(&x)),
            _ => None,
        }
    }
}

fn dedup(vertices: Vec<CurveClass>) -> Vec<CurveClass> {
    let mut out: Vec<CurveClass> = Vec::new();
    for v in vertices {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn around_uses_exact_images() {
        let l = crate::catalog::lattice("p1xp1").unwrap();
        let r = Region::around(&l, &DivisorClass::from_ints(&[1, 1]), &q(1, 2)).unwrap();
        assert_eq!(r.vertices().len(), 4);
        assert!(r.residuals().iter().all(Zero::is_zero));
        assert!(r.contains(&CurveClass::from_ints(&[1, 1])));
        assert!(!r.contains(&CurveClass::from_ints(&[2, 2])));
        assert!(matches!(
            Region::around(&l, &DivisorClass::from_ints(&[1, 1]), &qi(1)),
            Err(Error::RegionNotInP { .. })
        ));
    }

    #[test]
    fn certify_reports_failing_vertex() {
        let l = crate::catalog::lattice("p1xp1").unwrap();
        let opts = NewtonOptions::default();
        let ok = Region::certify(&l, vec![CurveClass::from_ints(&[1, 2]), CurveClass::from_ints(&[2, 1])], &opts).unwrap();
        assert_eq!(ok.preimages()[0], DivisorClass::from_ints(&[2, 1]));
        let bad = Region::certify(&l, vec![CurveClass::from_ints(&[1, 2]), CurveClass::from_ints(&[-1, 1])], &opts);
        assert!(matches!(bad, Err(Error::RegionNotInP { index: 1, .. })));
    }

    #[test]
    fn parse_around_spec() {
        let l = crate::catalog::lattice("proj-bundle-p2").unwrap();
        let r = Region::parse_around(&l, "around 1,2/5 radius 1/10").unwrap().unwrap();
        assert_eq!(r.vertices().len(), 4);
        assert!(Region::parse_around(&l, "default").unwrap().is_none());
        assert!(Region::parse_around(&l, "around 1,0.4 radius 1/10").is_err());
    }
}
