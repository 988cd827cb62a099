//! Built-in lattices, cohomology models and example inputs, embedded at compile time.

use crate::error::{Error, Result};
use crate::kring::CohomologyModel;
use crate::lattice::{NewtonOptions, PolarisedLattice};
use crate::region::Region;
use crate::sheafmodel::PresentedSheaf;
use crate::walls::SheafNumerics;

pub const NAMES: [&str; 6] = ["p2", "p3", "p1xp1", "p1xp2", "p1cubed", "proj-bundle-p2"];

macro_rules! entry {
    ($name:literal) => {
        (
            $name,
            include_str!(concat!("../catalog/", $name, "/lattice.json")),
            include_str!(concat!("../catalog/", $name, "/model.json")),
        )
    };
}

const ENTRIES: [(&str, &str, &str); 6] = [
    entry!("p2"),
    entry!("p3"),
    entry!("p1xp1"),
    entry!("p1xp2"),
    entry!("p1cubed"),
    entry!("proj-bundle-p2"),
];

macro_rules! input {
    ($path:literal) => {
        ($path, include_str!(concat!("../catalog/", $path)))
    };
}

/// Example inputs keyed by path relative to the catalog root, e.g.
/// `p1xp1/sheaves/r2c0c2_2.json` or `presets/schmitt-demo.json`.
const INPUTS: &[(&str, &str)] = &[
    input!("p1cubed/presented/ideal-twist.json"),
    input!("p1cubed/regions/default.json"),
    input!("p1cubed/regions/square.json"),
    input!("p1cubed/sheaves/r2c0c2_022.json"),
    input!("p1xp1/presented/pair.json"),
    input!("p1xp1/regions/default.json"),
    input!("p1xp1/regions/segment.json"),
    input!("p1xp1/sheaves/r2c0c2_2.json"),
    input!("p1xp1/sheaves/r2c0c2_4.json"),
    input!("p1xp1/sheaves/r2c10c2_3.json"),
    input!("p1xp1/sheaves/r3c0c2_3.json"),
    input!("p1xp1/slices/plane.json"),
    input!("p1xp2/regions/default.json"),
    input!("p2/regions/default.json"),
    input!("p3/regions/default.json"),
    input!("presets/schmitt-demo.json"),
    input!("proj-bundle-p2/presented/pair.json"),
    input!("proj-bundle-p2/regions/box.json"),
    input!("proj-bundle-p2/regions/default.json"),
    input!("proj-bundle-p2/sheaves/r2c0c2_2.json"),
];

fn find(name: &str) -> Result<&'static (&'static str, &'static str, &'static str)> {
    ENTRIES
        .iter()
        .find(|e| e.0 == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown catalog entry {name:?}; known: {}", NAMES.join(", "))))
}

pub fn lattice_json(name: &str) -> Result<&'static str> {
    Ok(find(name)?.1)
}

pub fn model_json(name: &str) -> Result<&'static str> {
    Ok(find(name)?.2)
}

pub fn lattice(name: &str) -> Result<PolarisedLattice> {
    PolarisedLattice::from_json(lattice_json(name)?, &format!("catalog/{name}/lattice.json"))
}

pub fn model(name: &str) -> Result<CohomologyModel> {
    CohomologyModel::from_json(model_json(name)?, &format!("catalog/{name}/model.json"))
}

pub fn input(path: &str) -> Result<&'static str> {
    INPUTS
        .iter()
        .find(|e| e.0 == path)
        .map(|e| e.1)
        .ok_or_else(|| Error::InvalidInput(format!("no catalog input {path:?}")))
}

/// Input paths under `prefix` (an entry name, or `presets`).
pub fn inputs(prefix: &str) -> Vec<&'static str> {
    let dir = format!("{prefix}/");
    INPUTS.iter().filter(|e| e.0.starts_with(&dir)).map(|e| e.0).collect()
}

pub fn region(name: &str, region: &str, opts: &NewtonOptions) -> Result<Region> {
    let path = format!("{name}/regions/{region}.json");
    Region::from_json(&lattice(name)?, input(&path)?, &format!("catalog/{path}"), opts)
}

pub fn sheaf(name: &str, sheaf: &str) -> Result<SheafNumerics> {
    let path = format!("{name}/sheaves/{sheaf}.json");
    SheafNumerics::from_json(&lattice(name)?, input(&path)?, &format!("catalog/{path}"))
}

pub fn presented(name: &str, sheaf: &str) -> Result<PresentedSheaf> {
    let path = format!("{name}/presented/{sheaf}.json");
    PresentedSheaf::from_json(&lattice(name)?, input(&path)?, &format!("catalog/{path}"))
}
