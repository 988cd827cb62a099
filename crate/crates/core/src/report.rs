//! Machine-readable reports. Every exact value is a `"p/q"` string or a JSON
//! integer; algebraic numbers carry a minimal polynomial and an isolating
//! interval. No field is ever a float.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::chambers::{AmpCrossings, Chamber, CrossingParameter, CrossingValue, Representative, SegmentCrossings};
use crate::kring::KClass;
use crate::lattice::{CurveClass, DivisorClass};
use crate::rational::{to_strs, RatStr, Q};
use crate::region::Region;
use crate::sheafmodel::Verdict;
use crate::walls::{Wall, WallSet};

/// Integer emitted as a JSON number when it fits in `i64`, else as a string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

pub fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().cloned().map(Int).collect()
}

fn rat(x: &Q) -> RatStr {
    RatStr(x.clone())
}

#[derive(Debug, Clone, Serialize)]
pub struct WallClassEntry {
    pub zeta: Vec<Int>,
    pub r1: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct WallEntry {
    pub normal: Vec<Int>,
    pub classes: Vec<WallClassEntry>,
    pub witness: Vec<RatStr>,
    pub witness_preimage: Vec<RatStr>,
    pub slack: RatStr,
}

impl From<&Wall> for WallEntry {
    fn from(w: &Wall) -> Self {
        WallEntry {
            normal: ints(&w.normal),
            classes: w
                .classes
                .iter()
                .map(|c| WallClassEntry {
                    zeta: ints(&c.zeta),
                    r1: c.r1,
                })
                .collect(),
            witness: to_strs(&w.witness.0),
            witness_preimage: to_strs(&w.witness_preimage.0),
            slack: rat(&w.slack),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusEntry {
    pub r1: u32,
    pub radius: RatStr,
}

#[derive(Debug, Clone, Serialize)]
pub struct WallReport {
    pub lattice: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sheaf: Option<String>,
    pub region: Vec<Vec<RatStr>>,
    pub reference: Vec<RatStr>,
    pub lambda_exponent: i32,
    pub radii: Vec<RadiusEntry>,
    pub candidates: usize,
    pub count: usize,
    pub walls: Vec<WallEntry>,
}

pub fn region_vertices(region: &Region) -> Vec<Vec<RatStr>> {
    region.vertices().iter().map(|v| to_strs(&v.0)).collect()
}

impl WallReport {
    pub fn new(lattice: &str, sheaf: Option<String>, region: &Region, set: &WallSet) -> Self {
        WallReport {
            lattice: lattice.to_string(),
            sheaf,
            region: region_vertices(region),
            reference: to_strs(&set.reference.0),
            lambda_exponent: set.lambda_exponent,
            radii: set
                .radii
                .iter()
                .map(|(r1, radius)| RadiusEntry {
                    r1: *r1,
                    radius: rat(radius),
                })
                .collect(),
            candidates: set.candidates,
            count: set.walls.len(),
            walls: set.walls.iter().map(WallEntry::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentativeEntry {
    pub a: Vec<Int>,
    pub b: Vec<Int>,
    /// `scale · A^{n-2} B` is the cell representative.
    pub scale: RatStr,
    pub curve: Vec<RatStr>,
    pub signs: String,
    pub precision: u32,
}

impl From<&Representative> for RepresentativeEntry {
    fn from(r: &Representative) -> Self {
        RepresentativeEntry {
            a: ints(&r.a),
            b: ints(&r.b),
            scale: rat(&r.scale),
            curve: to_strs(&r.curve.0),
            signs: crate::chambers::sign_string(&r.signs),
            precision: r.precision,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictEntry {
    pub status: String,
    pub total_slope: RatStr,
    pub witness: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<RatStr>,
}

impl From<&Verdict> for VerdictEntry {
    fn from(v: &Verdict) -> Self {
        VerdictEntry {
            status: v.status.to_string(),
            total_slope: rat(&v.total_slope),
            witness: v.witness.as_ref().map(|w| w.parts.clone()).unwrap_or_default(),
            gap: v.witness.as_ref().map(|w| rat(&w.gap)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellEntry {
    pub id: usize,
    pub signs: String,
    pub open: bool,
    pub walls_active: Vec<usize>,
    pub representative: Vec<RatStr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complete_intersection: Option<RepresentativeEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictEntry>,
}

impl CellEntry {
    pub fn new(id: usize, c: &Chamber) -> Self {
        CellEntry {
            id,
            signs: crate::chambers::sign_string(&c.signs),
            open: c.is_open(),
            walls_active: c.walls_active.clone(),
            representative: to_strs(&c.representative.0),
            complete_intersection: None,
            error: None,
            verdict: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChamberReport {
    pub lattice: String,
    pub region: Vec<Vec<RatStr>>,
    pub walls: Vec<Vec<Int>>,
    pub count: usize,
    pub open: usize,
    pub cells: Vec<CellEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceEntry>,
}

/// Raster export: cell `i` of the CSV is the sign vector `legend[i]`.
#[derive(Debug, Clone, Serialize)]
pub struct SliceEntry {
    pub csv: String,
    pub grid: usize,
    pub legend: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingEntry {
    pub is_rational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<RatStr>,
    /// Descending integer coefficients.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minpoly: Option<Vec<Int>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<[RatStr; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub irreducible: Option<bool>,
    pub walls: Vec<usize>,
}

impl From<&CrossingParameter> for CrossingEntry {
    fn from(c: &CrossingParameter) -> Self {
        match &c.value {
            CrossingValue::Rational(q) => CrossingEntry {
                is_rational: true,
                value: Some(rat(q)),
                minpoly: None,
                interval: None,
                irreducible: None,
                walls: c.walls.clone(),
            },
            CrossingValue::Algebraic {
                minpoly,
                lo,
                hi,
                irreducible,
            } => CrossingEntry {
                is_rational: false,
                value: None,
                minpoly: Some(minpoly.iter().rev().cloned().map(Int).collect()),
                interval: Some([rat(lo), rat(hi)]),
                irreducible: Some(*irreducible),
                walls: c.walls.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct N1CrossReport {
    pub from: Vec<RatStr>,
    pub to: Vec<RatStr>,
    pub walls: Vec<Vec<Int>>,
    pub crossings: Vec<CrossingEntry>,
    /// Walls containing the whole segment.
    pub containing: Vec<usize>,
}

impl N1CrossReport {
    pub fn new(g0: &CurveClass, g1: &CurveClass, walls: &[Wall], c: &SegmentCrossings) -> Self {
        N1CrossReport {
            from: to_strs(&g0.0),
            to: to_strs(&g1.0),
            walls: walls.iter().map(|w| ints(&w.normal)).collect(),
            crossings: c.crossings.iter().map(CrossingEntry::from).collect(),
            containing: c.containing.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AmpWallEntry {
    pub wall: Vec<Int>,
    /// Ascending coefficients of `a · φ_τ^{n-1}`.
    pub polynomial: Vec<RatStr>,
    pub degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub crossings: Vec<CrossingEntry>,
}

impl AmpWallEntry {
    pub fn new(wall: &Wall, c: &AmpCrossings) -> Self {
        AmpWallEntry {
            wall: ints(&wall.normal),
            polynomial: to_strs(c.polynomial.coeffs()),
            degree: c.polynomial.degree().unwrap_or(0),
            error: None,
            crossings: c.crossings.iter().map(CrossingEntry::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AmpCrossReport {
    pub from: Vec<RatStr>,
    pub to: Vec<RatStr>,
    pub walls: Vec<AmpWallEntry>,
}

impl AmpCrossReport {
    pub fn new(h0: &DivisorClass, h1: &DivisorClass, walls: Vec<AmpWallEntry>) -> Self {
        AmpCrossReport {
            from: to_strs(&h0.0),
            to: to_strs(&h1.0),
            walls,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossReport {
    pub lattice: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n1: Option<N1CrossReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amp: Option<AmpCrossReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyEntry {
    pub name: String,
    pub status: String,
    pub checked: usize,
    /// Indices of classes whose difference class was not numerically trivial.
    pub failures: Vec<usize>,
}

impl FamilyEntry {
    pub fn new(name: &str, checked: usize, failures: Vec<usize>) -> Self {
        FamilyEntry {
            name: name.to_string(),
            status: pass_fail(failures.is_empty()).to_string(),
            checked,
            failures,
        }
    }
}

pub fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KverifyReport {
    pub model: String,
    pub classes: Vec<Vec<RatStr>>,
    pub divisors: Vec<Vec<RatStr>>,
    pub multiplicities: Vec<u32>,
    pub degrees: Vec<RatStr>,
    pub families: Vec<FamilyEntry>,
    pub status: String,
}

pub fn k_classes(classes: &[KClass]) -> Vec<Vec<RatStr>> {
    classes.iter().map(|c| to_strs(&c.ch)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfcheckReport {
    pub seed: u64,
    pub checks: Vec<CheckEntry>,
    pub status: String,
}
