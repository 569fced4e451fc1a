use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use linxfer::landscape::{
    best_point, scan_normalized, scan_plane, GridMetadata, LandscapeGrid, Plane, ScanConfig, DEFAULT_RESOLUTION,
};
use linxfer::oracle::Method;
use linxfer::strategies::Target;
use linxfer::{AngleConvention, NormalizationMode};
use serde::Serialize;

use crate::inputs::{parse_pair, usage, ConventionArg, InstanceArgs, NormArg, ReferenceArgs};
use crate::output::{create_dir, emit, write_json, write_text, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaneArg {
    Gamma,
    Beta,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct LandscapeArgs {
    #[command(flatten)]
    pub instances: InstanceArgs,
    #[arg(long, value_enum, default_value_t = PlaneArg::Gamma)]
    pub plane: PlaneArg,
    /// `lo,hi` of the slope axis.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2.0, 2.0])]
    pub slope_range: Vec<f64>,
    /// `lo,hi` of the intercept axis.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2.0, 2.0])]
    pub intcp_range: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    #[arg(long, default_value_t = 8)]
    pub p: usize,
    /// `slope,intcp` held fixed off the scanned plane; defaults to the reference parameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub fixed: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = NormArg::None)]
    pub normalization: NormArg,
    /// X values for fixed-x normalization; one grid per value.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    #[command(flatten)]
    pub reference: ReferenceArgs,
    #[arg(long, value_enum, default_value_t = ConventionArg::Gate)]
    pub convention: ConventionArg,
    #[arg(long, default_value = "landscape-out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct MetadataFile<'a> {
    #[serde(flatten)]
    provenance: Provenance<'a, LandscapeArgs>,
    instance_seed: Option<u64>,
    e_ref_method: Option<Method>,
    grid: GridMetadata,
}

pub fn run(args: &LandscapeArgs) -> Result<()> {
    let planes: &[Plane] = match args.plane {
        PlaneArg::Gamma => &[Plane::GammaPlane],
        PlaneArg::Beta => &[Plane::BetaPlane],
        PlaneArg::Both => &[Plane::GammaPlane, Plane::BetaPlane],
    };
    if args.fixed.is_some() && planes.len() > 1 {
        return Err(usage("--fixed is ambiguous with --plane both"));
    }
    if args.p == 0 {
        return Err(usage("--p must be positive"));
    }
    let slope_range = parse_pair(&args.slope_range, "--slope-range")?;
    let intcp_range = parse_pair(&args.intcp_range, "--intcp-range")?;
    let fixed = args.fixed.as_deref().map(|f| parse_pair(f, "--fixed")).transpose()?;
    let modes: Vec<Option<NormalizationMode>> = match args.normalization {
        NormArg::None | NormArg::SqrtEdges if !args.x.is_empty() => {
            return Err(usage("--x needs --normalization fixed-x"))
        }
        NormArg::None => vec![None],
        NormArg::SqrtEdges => vec![Some(NormalizationMode::SqrtEdges)],
        NormArg::FixedX if args.x.is_empty() => return Err(usage("--normalization fixed-x needs --x")),
        NormArg::FixedX => args.x.iter().map(|&x| Some(NormalizationMode::FixedX { x })).collect(),
    };

    let loaded = args.instances.load_one()?;
    let reference = match args.normalization {
        NormArg::None => None,
        _ => Some(args.reference.resolve(&loaded.instance)?),
    };
    let target = Target::unreferenced(loaded.instance.clone())?.with_convention(AngleConvention::from(args.convention));
    create_dir(&args.out)?;

    let mut summary = String::from("plane,x,factor,best_slope,best_intcp,best_value,best_norm\n");
    for &plane in planes {
        let config = ScanConfig {
            plane,
            fixed_other: fixed.unwrap_or_else(|| plane.default_fixed()),
            slope_range,
            intcp_range,
            resolution: args.resolution,
        };
        for &mode in &modes {
            let grid: LandscapeGrid = match (mode, reference) {
                (Some(mode), Some(r)) => scan_normalized(&target, args.p, &config, mode, r.energy)?,
                _ => scan_plane(&target, args.p, &config)?,
            };
            let name = match mode {
                Some(NormalizationMode::FixedX { x }) => format!("{}_x{x}", plane_tag(plane)),
                Some(NormalizationMode::SqrtEdges) => format!("{}_sqrt-edges", plane_tag(plane)),
                None => plane_tag(plane).to_string(),
            };
            write_text(&args.out.join(format!("{name}.csv")), &grid.to_csv())?;
            write_json(
                &args.out.join(format!("{name}.json")),
                &MetadataFile {
                    provenance: Provenance::new("landscape", args),
                    instance_seed: loaded.seed,
                    e_ref_method: reference.map(|r| r.method),
                    grid: grid.metadata(),
                },
            )?;
            let best = best_point(&grid);
            let x = match mode {
                Some(NormalizationMode::FixedX { x }) => x.to_string(),
                _ => String::new(),
            };
            let factor = grid.normalization.map_or(1.0, |n| n.factor);
            let _ = writeln!(
                summary,
                "{},{x},{factor},{},{},{},{}",
                plane_tag(plane),
                best.slope,
                best.intcp,
                best.value,
                best.norm()
            );
        }
    }
    write_text(&args.out.join("best.csv"), &summary)?;
    emit(&summary)
}

fn plane_tag(plane: Plane) -> &'static str {
    match plane {
        Plane::GammaPlane => "gamma",
        Plane::BetaPlane => "beta",
    }
}
