use std::fmt::Write as _;
use std::path::Path;

use movwall::chambers::{
    chamber_representative, decompose, segment_crossings_amp, segment_crossings_n1, sign_string, slice_grid, AmpCrossings,
};
use movwall::io::{parse_json, read_text, to_json, write_text};
use movwall::kring::{ClassListFile, KClass};
use movwall::lattice::{CurveClass, DivisorClass, NewtonOptions};
use movwall::par::Exec;
use movwall::poly::Poly;
use movwall::rational::{from_strs, to_strs};
use movwall::report::{
    ints, k_classes, pass_fail, AmpCrossReport, AmpWallEntry, CellEntry, ChamberReport, CrossReport, FamilyEntry, KverifyReport,
    N1CrossReport, RepresentativeEntry, SliceEntry, VerdictEntry, WallReport,
};
use movwall::sheafmodel::{chamber_constancy_check, verdict, PresentedSheaf};
use movwall::walls::{enumerate_walls, EnumerationOptions, SheafNumerics, Wall};
use movwall::{catalog, sampling, selfcheck, Error, PolarisedLattice, Result};

use crate::{config, Input, Mode};

fn enumeration(input: &Input) -> Result<EnumerationOptions> {
    Ok(EnumerationOptions {
        safety: config::safety(input)?,
        budget: input.budget,
        ..Default::default()
    })
}

fn enumerate(input: &Input, lattice: &PolarisedLattice, sheaf: &SheafNumerics, opts: &EnumerationOptions) -> Result<Vec<Wall>> {
    let region = config::region(input, lattice, &NewtonOptions::default())?;
    Ok(enumerate_walls(lattice, sheaf, &region, opts)?.walls)
}

pub fn walls(input: &Input) -> Result<bool> {
    let lattice = config::lattice(input)?;
    let sheaf = config::sheaf(input, &lattice)?;
    let region = config::region(input, &lattice, &NewtonOptions::default())?;
    let set = enumerate_walls(&lattice, &sheaf, &region, &enumeration(input)?)?;
    let report = WallReport::new(lattice.name(), sheaf.label.clone(), &region, &set);
    config::emit(input.out.as_deref(), &to_json(&report))?;
    Ok(true)
}

pub struct ChamberOptions {
    pub representatives: bool,
    pub presented: Option<String>,
    pub samples: usize,
    pub slice: Option<String>,
    pub grid: usize,
    pub csv: String,
}

pub fn chambers(input: &Input, opts: &ChamberOptions) -> Result<bool> {
    let lattice = config::lattice(input)?;
    let region = config::region(input, &lattice, &NewtonOptions::default())?;
    let presented: Option<PresentedSheaf> = opts
        .presented
        .as_deref()
        .map(|p| config::presented(input, &lattice, p))
        .transpose()?;
    let sheaf = match (&input.sheaf, &presented) {
        (Some(_), _) => config::sheaf(input, &lattice)?,
        (None, Some(p)) => p.total.clone(),
        (None, None) => return Err(Error::InvalidInput("chambers needs --sheaf or --presented".into())),
    };
    let walls = enumerate_walls(&lattice, &sheaf, &region, &enumeration(input)?)?.walls;
    let cells = decompose(&region, &walls, Exec::Parallel)?;
    let mut ok = true;
    let mut entries = Vec::with_capacity(cells.len());
    for (i, cell) in cells.iter().enumerate() {
        let mut entry = CellEntry::new(i, cell);
        if opts.representatives {
            match chamber_representative(&lattice, cell, &walls, None, 64) {
                Ok(r) => entry.complete_intersection = Some(RepresentativeEntry::from(&r)),
                Err(e) => {
                    ok = false;
                    entry.error = Some(e.to_string());
                }
            }
        }
        if let Some(p) = &presented {
            if opts.samples > 0 {
                chamber_constancy_check(p, &region, &walls, cell, opts.samples, input.seed.wrapping_add(i as u64))?;
            }
            entry.verdict = Some(VerdictEntry::from(&verdict(p, &cell.representative)));
        }
        entries.push(entry);
    }
    let slice = match &opts.slice {
        None => None,
        Some(value) => {
            let plane = config::slice(input, value)?;
            let (ids, legend) = slice_grid(
                &CurveClass(from_strs(&plane.origin)),
                &CurveClass(from_strs(&plane.u)),
                &CurveClass(from_strs(&plane.v)),
                opts.grid,
                &walls,
                Exec::Parallel,
            );
            let mut csv = String::new();
            for row in &ids {
                let line: Vec<String> = row.iter().map(ToString::to_string).collect();
                writeln!(csv, "{}", line.join(",")).unwrap();
            }
            write_text(Path::new(&opts.csv), &csv)?;
            Some(SliceEntry {
                csv: opts.csv.clone(),
                grid: opts.grid,
                legend: legend.iter().map(|s| sign_string(s)).collect(),
            })
        }
    };
    let report = ChamberReport {
        lattice: lattice.name().to_string(),
        region: movwall::report::region_vertices(&region),
        walls: walls.iter().map(|w| ints(&w.normal)).collect(),
        count: cells.len(),
        open: cells.iter().filter(|c| c.is_open()).count(),
        cells: entries,
        slice,
    };
    config::emit(input.out.as_deref(), &to_json(&report))?;
    Ok(ok)
}

pub struct CrossOptions {
    pub mode: Mode,
    pub preset: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub curves: bool,
    pub walls: Vec<String>,
}

fn wall_arg(value: &str) -> Result<Wall> {
    let v = config::vector("--wall", value)?;
    if v.iter().any(|x| !x.is_integer()) {
        return Err(Error::InvalidInput(format!("wall normal {value:?} must be integral")));
    }
    Ok(Wall::from_normal(v.iter().map(|x| x.to_integer()).collect()))
}

pub fn cross(input: &Input, opts: &CrossOptions) -> Result<bool> {
    let (lattice, walls, from, to) = match &opts.preset {
        Some(name) => {
            let p = config::preset(name)?;
            let wall = Wall::from_normal(p.wall.iter().map(|&x| x.into()).collect());
            (catalog::lattice(&p.catalog)?, vec![wall], from_strs(&p.from), from_strs(&p.to))
        }
        None => {
            let lattice = config::lattice(input)?;
            let (Some(from), Some(to)) = (&opts.from, &opts.to) else {
                return Err(Error::InvalidInput("--from and --to are required without --preset".into()));
            };
            let walls = if opts.walls.is_empty() {
                let sheaf = config::sheaf(input, &lattice)?;
                enumerate(input, &lattice, &sheaf, &enumeration(input)?)?
            } else {
                opts.walls.iter().map(|w| wall_arg(w)).collect::<Result<_>>()?
            };
            let (from, to) = (config::vector("--from", from)?, config::vector("--to", to)?);
            (lattice, walls, from, to)
        }
    };
    for v in [&from, &to] {
        if v.len() != lattice.rank() {
            return Err(Error::DimensionMismatch(format!("segment endpoint needs {} coordinates", lattice.rank())));
        }
    }
    if opts.curves && opts.mode != Mode::N1 {
        return Err(Error::InvalidInput("--curves only applies to --mode n1".into()));
    }
    let n1 = if opts.mode == Mode::Amp {
        None
    } else {
        let (g0, g1) = if opts.curves {
            (CurveClass(from.clone()), CurveClass(to.clone()))
        } else {
            (lattice.power_map(&DivisorClass(from.clone())), lattice.power_map(&DivisorClass(to.clone())))
        };
        let c = segment_crossings_n1(&g0, &g1, &walls)?;
        Some(N1CrossReport::new(&g0, &g1, &walls, &c))
    };
    let amp = if opts.mode == Mode::N1 {
        None
    } else {
        let (h0, h1) = (DivisorClass(from), DivisorClass(to));
        let mut entries = Vec::with_capacity(walls.len());
        for (i, wall) in walls.iter().enumerate() {
            entries.push(match segment_crossings_amp(&lattice, &h0, &h1, wall, i) {
                Ok(c) => AmpWallEntry::new(wall, &c),
                Err(Error::IdenticallyZero) => {
                    let zero = AmpCrossings {
                        polynomial: Poly::zero(),
                        crossings: Vec::new(),
                    };
                    let mut e = AmpWallEntry::new(wall, &zero);
                    e.error = Some(Error::IdenticallyZero.to_string());
                    e
                }
                Err(e) => return Err(e),
            });
        }
        Some(AmpCrossReport::new(&h0, &h1, entries))
    };
    let report = CrossReport {
        lattice: lattice.name().to_string(),
        n1,
        amp,
    };
    config::emit(input.out.as_deref(), &to_json(&report))?;
    Ok(true)
}

pub fn kverify(input: &Input, classes: Option<&str>, count: usize) -> Result<bool> {
    let lattice = config::lattice(input)?;
    let model = config::model(input, &lattice)?;
    let n = lattice.dimension();
    let mut rng = sampling::rng(input.seed);
    let file: ClassListFile = match classes {
        Some(path) => parse_json(&read_text(Path::new(path))?, path)?,
        None => ClassListFile {
            classes: (0..count)
                .map(|_| sampling::k_class(&mut rng, &model, 4).map(|c| to_strs(&c.ch)))
                .collect::<Result<_>>()?,
            ..Default::default()
        },
    };
    let classes: Vec<KClass> = file.classes.iter().map(|c| KClass::new(from_strs(c))).collect();
    let divisors: Vec<DivisorClass> = match &file.divisors {
        Some(d) => d.iter().map(|d| DivisorClass(from_strs(d))).collect(),
        None => (0..n - 1).map(|_| sampling::integral_ample(&mut rng, &lattice, 2)).collect(),
    };
    let multiplicities = match &file.multiplicities {
        Some(a) => a.clone(),
        None => sampling::multiplicities(&mut rng, n - 1, 3),
    };
    let degrees = model.degrees(&divisors)?;
    let mut failures: [Vec<usize>; 4] = Default::default();
    for (i, c) in classes.iter().enumerate() {
        let results = [
            model.verify_secondway(c, &divisors)?.holds,
            model.verify_firstway_virtual(c, &divisors)?.holds,
            model.verify_scaling(c, &divisors, &multiplicities)?.holds,
            model.verify_telescoping(c, &divisors)?.holds,
        ];
        for (f, ok) in failures.iter_mut().zip(results) {
            if !ok {
                f.push(i);
            }
        }
    }
    let names = ["secondway", "firstway-virtual", "scaling", "telescoping"];
    let families: Vec<FamilyEntry> = names
        .iter()
        .zip(failures)
        .map(|(name, f)| FamilyEntry::new(name, classes.len(), f))
        .collect();
    let all = families.iter().all(|f| f.failures.is_empty());
    let report = KverifyReport {
        model: model.name().to_string(),
        classes: k_classes(&classes),
        divisors: divisors.iter().map(|d| to_strs(&d.0)).collect(),
        multiplicities,
        degrees: to_strs(&degrees),
        families,
        status: pass_fail(all).to_string(),
    };
    config::emit(input.out.as_deref(), &to_json(&report))?;
    Ok(all)
}

pub fn catalog_list() -> Result<bool> {
    for name in catalog::NAMES {
        let l = catalog::lattice(name)?;
        println!("{name}\tn={}\trho={}\t{}", l.dimension(), l.rank(), l.description());
    }
    Ok(true)
}

pub fn catalog_show(name: &str) -> Result<bool> {
    let m = catalog::model(name)?;
    println!("{}", catalog::lattice_json(name)?.trim_end());
    println!("model basis: {}", m.basis_names().join(", "));
    for path in catalog::inputs(name) {
        println!("input: {path}");
    }
    Ok(true)
}

pub fn selfcheck(seed: u64, out: Option<&str>) -> Result<bool> {
    let report = selfcheck::run(seed)?;
    config::emit(out, &to_json(&report))?;
    Ok(report.status == "PASS")
}
