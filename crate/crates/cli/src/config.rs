//! Resolution of command-line references: catalog names, files and inline values.

use std::path::Path;

use movwall::chambers::{SegmentPreset, SliceFile};
use movwall::io::{parse_json, read_text, write_text};
use movwall::kring::CohomologyModel;
use movwall::lattice::NewtonOptions;
use movwall::rational::{parse_rational, Q};
use movwall::region::Region;
use movwall::sheafmodel::PresentedSheaf;
use movwall::walls::SheafNumerics;
use movwall::{catalog, Error, PolarisedLattice, Result};

use crate::Input;

/// A reference is a file when one exists at that path, else a catalog name.
enum Source {
    File(String, String),
    Catalog(String, &'static str),
}

fn resolve(input: &Input, value: &str, dir: &str) -> Result<Source> {
    let path = Path::new(value);
    if path.is_file() {
        return Ok(Source::File(value.to_string(), read_text(path)?));
    }
    let Some(entry) = &input.catalog else {
        return Err(Error::InvalidInput(format!("{value:?} is not a file and no --catalog entry was given")));
    };
    let stem = value.trim_end_matches(".json");
    let rel = format!("{entry}/{dir}/{stem}.json");
    Ok(Source::Catalog(format!("catalog/{rel}"), catalog::input(&rel)?))
}

fn resolve_text(input: &Input, value: &str, dir: &str) -> Result<(String, String)> {
    Ok(match resolve(input, value, dir)? {
        Source::File(name, text) => (name, text),
        Source::Catalog(name, text) => (name, text.to_string()),
    })
}

pub fn lattice(input: &Input) -> Result<PolarisedLattice> {
    match (&input.catalog, &input.lattice) {
        (Some(name), _) => catalog::lattice(name),
        (None, Some(path)) => PolarisedLattice::from_json(&read_text(Path::new(path))?, path),
        (None, None) => Err(Error::InvalidInput("one of --catalog or --lattice is required".into())),
    }
}

pub fn model(input: &Input, lattice: &PolarisedLattice) -> Result<CohomologyModel> {
    let model = match (&input.model, &input.catalog) {
        (Some(path), _) => CohomologyModel::from_json(&read_text(Path::new(path))?, path)?,
        (None, Some(name)) => catalog::model(name)?,
        (None, None) => return Err(Error::InvalidInput("--model is required with --lattice".into())),
    };
    model.check_compatible(lattice)?;
    Ok(model)
}

pub fn sheaf(input: &Input, lattice: &PolarisedLattice) -> Result<SheafNumerics> {
    let Some(value) = &input.sheaf else {
        return Err(Error::InvalidInput("--sheaf is required".into()));
    };
    let (name, text) = resolve_text(input, value, "sheaves")?;
    SheafNumerics::from_json(lattice, &text, &name)
}

pub fn region(input: &Input, lattice: &PolarisedLattice, newton: &NewtonOptions) -> Result<Region> {
    if let Some(region) = Region::parse_around(lattice, &input.region)? {
        return Ok(region);
    }
    let (name, text) = resolve_text(input, &input.region, "regions")?;
    Region::from_json(lattice, &text, &name, newton)
}

pub fn presented(input: &Input, lattice: &PolarisedLattice, value: &str) -> Result<PresentedSheaf> {
    let (name, text) = resolve_text(input, value, "presented")?;
    PresentedSheaf::from_json(lattice, &text, &name)
}

pub fn slice(input: &Input, value: &str) -> Result<SliceFile> {
    let (name, text) = resolve_text(input, value, "slices")?;
    parse_json(&text, &name)
}

pub fn preset(value: &str) -> Result<SegmentPreset> {
    let path = Path::new(value);
    if path.is_file() {
        return parse_json(&read_text(path)?, value);
    }
    let rel = format!("presets/{}.json", value.trim_end_matches(".json"));
    parse_json(catalog::input(&rel)?, &format!("catalog/{rel}"))
}

pub fn safety(input: &Input) -> Result<Q> {
    parse_rational(&input.safety).map_err(|e| Error::Parse {
        location: "--safety".into(),
        message: e.to_string(),
    })
}

/// Comma-separated exact rationals.
pub fn vector(flag: &str, value: &str) -> Result<Vec<Q>> {
    value
        .split(',')
        .enumerate()
        .map(|(i, s)| {
            parse_rational(s.trim()).map_err(|e| Error::Parse {
                location: format!("{flag} entry {i}"),
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn emit(out: Option<&str>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_text(Path::new(path), text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
