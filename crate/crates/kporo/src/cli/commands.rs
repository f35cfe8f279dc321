use crate::cli::output::{fmt_f64, to_json, write_output, Csv};
use crate::cli::{svg, with_thread_cap, GlobalOpts};
use crate::covering::{covering_construction, decompose_boundary, ConvexBody, CoverParams};
use crate::dimension::{dim_estimate, BoxCountLadder};
use crate::error::{Error, Result};
use crate::geometry::{sphere_cover, Point};
use crate::porosity::{por_k_set, PorosityParams};
use crate::setgen::{
    gen_cantor, gen_ifs, gen_kplane, gen_product, read_kpgrid_file, write_kpgrid_file, CantorSpec,
    IfsMap, SparseGrid,
};
use clap::Args;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;

pub(crate) type ConfigEcho = BTreeMap<String, String>;

pub(crate) fn echo(pairs: &[(&str, String)]) -> ConfigEcho {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

// ---------------------------------------------------------------- generate

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub global: GlobalOpts,
    /// cantor | kplane | product | ifs
    #[arg(long)]
    pub set: String,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub depth: Option<u32>,
    /// cells per axis R
    #[arg(long)]
    pub resolution: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// comma-separated .kpgrid paths for `product`
    #[arg(long, value_delimiter = ',')]
    pub factors: Vec<PathBuf>,
    /// similarity maps for `ifs`: "scale:off1,off2;scale:off1,off2;…"
    #[arg(long)]
    pub maps: Option<String>,
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Input(format!("missing required flag --{flag}")))
}

pub fn run_generate(args: GenerateArgs) -> Result<()> {
    let out = require(args.global.out.clone(), "out")?;
    let grid = match args.set.as_str() {
        "cantor" => {
            let spec = CantorSpec::new(require(args.lambda, "lambda")?, require(args.depth, "depth")?)?;
            gen_cantor(&spec, require(args.resolution, "resolution")?)?
        }
        "kplane" => gen_kplane(
            require(args.n, "n")?,
            require(args.m, "m")?,
            require(args.resolution, "resolution")?,
        )?,
        "product" => {
            if args.factors.is_empty() {
                return Err(Error::input("product needs --factors a.kpgrid,b.kpgrid"));
            }
            let loaded: Vec<SparseGrid> = args
                .factors
                .iter()
                .map(read_kpgrid_file)
                .collect::<Result<_>>()?;
            let refs: Vec<&SparseGrid> = loaded.iter().collect();
            gen_product(&refs)?
        }
        "ifs" => {
            let maps = parse_ifs_maps(&require(args.maps.clone(), "maps")?)?;
            gen_ifs(
                &maps,
                require(args.n, "n")?,
                require(args.depth, "depth")?,
                require(args.resolution, "resolution")?,
            )?
        }
        other => {
            return Err(Error::Input(format!(
                "unknown --set {other} (expected cantor|kplane|product|ifs)"
            )))
        }
    };
    write_kpgrid_file(&out, &grid)?;
    println!("{} cells  {}", grid.len(), grid.metadata());
    Ok(())
}

fn parse_ifs_maps(spec: &str) -> Result<Vec<IfsMap>> {
    let mut maps = Vec::new();
    for part in spec.split(';').filter(|p| !p.trim().is_empty()) {
        let (scale, offsets) = part
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("ifs map `{part}`: expected scale:o1,o2,…")))?;
        let scale: f64 = scale
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("ifs map `{part}`: bad scale")))?;
        let offset: Vec<f64> = offsets
            .split(',')
            .map(|o| o.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Input(format!("ifs map `{part}`: bad offset")))?;
        maps.push(IfsMap { scale, offset });
    }
    Ok(maps)
}

// ---------------------------------------------------------------- porosity

#[derive(Args, Debug)]
pub struct PorosityArgs {
    #[command(flatten)]
    pub global: GlobalOpts,
    /// input .kpgrid file
    #[arg(long)]
    pub grid: PathBuf,
    /// number of orthogonal hole directions
    #[arg(long)]
    pub k: usize,
    /// occupied-cell sample size for the inf over x
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// dyadic scale-ladder length (r = 1/4, 1/8, …)
    #[arg(long, default_value_t = 4)]
    pub scales: usize,
    #[arg(long, default_value_t = 32)]
    pub frame_resolution: usize,
    #[arg(long, default_value_t = 64)]
    pub t_steps: usize,
}

pub fn run_porosity(args: PorosityArgs) -> Result<()> {
    let grid = read_kpgrid_file(&args.grid)?;
    if grid.is_empty() {
        return Err(Error::input("porosity: the input set is empty"));
    }
    let params = PorosityParams {
        frame_resolution: args.frame_resolution,
        t_steps: args.t_steps,
        seed: args.global.seed,
    };
    let k = args.k;
    let sp = with_thread_cap(args.global.threads, || {
        por_k_set(&grid, k, args.samples, args.global.seed, args.scales, &params)
    })??;

    let mut csv = Csv::new(&[
        "x_cell_index",
        "r",
        "k",
        "rho_hat",
        "error_bound",
        "frame_id",
        "truncated",
    ]);
    for (row, profile) in sp.sample_rows.iter().zip(&sp.profiles) {
        let cell_label = grid
            .cell(*row)
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(":");
        for (r, est) in profile.scales.iter().zip(&profile.estimates) {
            csv.row(&[
                cell_label.clone(),
                fmt_f64(*r),
                args.k.to_string(),
                fmt_f64(est.rho_hat),
                fmt_f64(est.error_bound),
                est.frame_id.to_string(),
                profile.truncated.to_string(),
            ]);
        }
    }
    csv.row(&[
        "summary".into(),
        String::new(),
        args.k.to_string(),
        fmt_f64(sp.value),
        String::new(),
        String::new(),
        sp.exhaustive.to_string(),
    ]);
    write_output(args.global.out.as_deref(), &csv.finish())?;
    if args.global.verbose {
        eprintln!(
            "porosity: sampled {} of {} cells (exhaustive: {}); por_{}(A) <= {}",
            sp.sample_rows.len(),
            grid.len(),
            sp.exhaustive,
            args.k,
            sp.value
        );
    }
    Ok(())
}

// ---------------------------------------------------------------- dimension

#[derive(Args, Debug)]
pub struct DimensionArgs {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[arg(long)]
    pub grid: PathBuf,
    /// box side base: "1/2", "1/3", "1/4", "1/5" (or a decimal)
    #[arg(long)]
    pub delta: String,
    /// fit window "lo:hi" over ladder levels (lo ≥ 2)
    #[arg(long)]
    pub window: String,
}

#[derive(Serialize)]
struct LevelEntry {
    i: u32,
    #[serde(rename = "N")]
    n: u64,
}

#[derive(Serialize)]
struct DimensionDoc {
    version: &'static str,
    config: ConfigEcho,
    set: String,
    delta: f64,
    levels: Vec<LevelEntry>,
    window: [u32; 2],
    dim_hat: f64,
    slope: f64,
}

pub(crate) fn parse_delta(s: &str) -> Result<f64> {
    if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|_| Error::Input(format!("bad delta {s}")))?;
        let den: f64 = den.trim().parse().map_err(|_| Error::Input(format!("bad delta {s}")))?;
        if den == 0.0 {
            return Err(Error::input("delta denominator is zero"));
        }
        Ok(num / den)
    } else {
        s.trim().parse().map_err(|_| Error::Input(format!("bad delta {s}")))
    }
}

pub(crate) fn parse_window(s: &str) -> Result<(u32, u32)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Input(format!("bad window {s}; expected lo:hi")))?;
    let lo: u32 = lo.trim().parse().map_err(|_| Error::Input(format!("bad window {s}")))?;
    let hi: u32 = hi.trim().parse().map_err(|_| Error::Input(format!("bad window {s}")))?;
    Ok((lo, hi))
}

pub fn run_dimension(args: DimensionArgs) -> Result<()> {
    let grid = read_kpgrid_file(&args.grid)?;
    let delta = parse_delta(&args.delta)?;
    let window = parse_window(&args.window)?;
    let ladder = BoxCountLadder::build(&grid, delta, window.1)?;
    let fit = dim_estimate(&ladder, window)?;
    let doc = DimensionDoc {
        version: crate::VERSION,
        config: echo(&[
            ("grid", args.grid.display().to_string()),
            ("delta", args.delta.clone()),
            ("window", args.window.clone()),
        ]),
        set: grid.metadata().to_string(),
        delta: ladder.delta,
        levels: ladder.levels.iter().map(|&(i, n)| LevelEntry { i, n }).collect(),
        window: [window.0, window.1],
        dim_hat: fit.dim_hat,
        slope: fit.ls_slope,
    };
    write_output(args.global.out.as_deref(), &to_json(&doc)?)
}

// ---------------------------------------------------------------- decompose

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub global: GlobalOpts,
    /// square | hexagon | disk | random2d | random3d
    #[arg(long)]
    pub shape: String,
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
    /// boundary samples
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
}

#[derive(Serialize)]
struct PieceEntry {
    cap_id: usize,
    size: usize,
    subspace_dim: usize,
}

#[derive(Serialize)]
struct DecomposeDoc {
    version: &'static str,
    config: ConfigEcho,
    shape: String,
    alpha: f64,
    piece_count: usize,
    cover_size: usize,
    pieces: Vec<PieceEntry>,
}

pub(crate) fn named_body(shape: &str, seed: u64) -> Result<ConvexBody> {
    let pt = |c: &[f64]| Point::new(c.to_vec());
    match shape {
        "square" => ConvexBody::polygon(&[
            pt(&[0.0, 0.0])?,
            pt(&[1.0, 0.0])?,
            pt(&[1.0, 1.0])?,
            pt(&[0.0, 1.0])?,
        ]),
        "hexagon" => {
            let verts: Vec<Point> = (0..6)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / 6.0;
                    pt(&[0.5 + 0.4 * a.cos(), 0.5 + 0.4 * a.sin()])
                })
                .collect::<Result<_>>()?;
            ConvexBody::polygon(&verts)
        }
        "disk" => ConvexBody::ball(pt(&[0.5, 0.5])?, 0.5),
        "random2d" => random_polytope(2, seed),
        "random3d" => random_polytope(3, seed),
        other => Err(Error::Input(format!(
            "unknown --shape {other} (square|hexagon|disk|random2d|random3d)"
        ))),
    }
}

/// Random bounded polytope: half-spaces tangent to spheres of random radii
/// around the center, plus the bounding ball.
pub(crate) fn random_polytope(n: usize, seed: u64) -> Result<ConvexBody> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = Point::new(vec![0.5; n])?;
    let mut body = ConvexBody::new(center.clone(), 0.45)?;
    let facets = rng.gen_range(5..14 + 6 * (n - 2));
    for _ in 0..facets {
        let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0_f64)).collect();
        let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let dir: Vec<f64> = dir.iter().map(|c| c / norm).collect();
        let radius = rng.gen_range(0.15..0.35);
        let anchor: Vec<f64> = center
            .coords()
            .iter()
            .zip(&dir)
            .map(|(c, d)| c + radius * d)
            .collect();
        body.exclude_halfspace(
            Point::new(anchor)?,
            crate::geometry::UnitDirection::new(dir)?,
        )?;
    }
    Ok(body)
}

pub fn run_decompose(args: DecomposeArgs) -> Result<()> {
    let body = named_body(&args.shape, args.global.seed)?;
    let pieces = decompose_boundary(&body, args.alpha, args.samples)?;
    let cover_size = sphere_cover(body.dim(), args.alpha / 3.0, 0)?.len();
    let doc = DecomposeDoc {
        version: crate::VERSION,
        config: echo(&[
            ("shape", args.shape.clone()),
            ("alpha", fmt_f64(args.alpha)),
            ("samples", args.samples.to_string()),
            ("seed", args.global.seed.to_string()),
        ]),
        shape: args.shape.clone(),
        alpha: args.alpha,
        piece_count: pieces.len(),
        cover_size,
        pieces: pieces
            .iter()
            .map(|p| PieceEntry {
                cap_id: p.cap_id,
                size: p.points.len(),
                subspace_dim: p.subspace.dim(),
            })
            .collect(),
    };
    write_output(args.global.out.as_deref(), &to_json(&doc)?)
}

// ---------------------------------------------------------------- cover

#[derive(Args, Debug)]
pub struct CoverArgs {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[arg(long)]
    pub grid: PathBuf,
    /// occupied cell index of the working-ball center, e.g. "128,127"
    #[arg(long)]
    pub center_cell: String,
    /// working-ball radius r
    #[arg(long, default_value_t = 0.25)]
    pub radius: f64,
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
    /// covering-ball radius as a fraction of r
    #[arg(long, default_value_t = 1.0 / 16.0)]
    pub ball_scale: f64,
    #[arg(long, default_value_t = 16)]
    pub frame_resolution: usize,
    #[arg(long, default_value_t = 512)]
    pub boundary_samples: usize,
    /// write a 2D scene dump (cells, balls, half-space boundaries)
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Serialize)]
struct CoverDoc<'a> {
    version: &'static str,
    config: ConfigEcho,
    balls: &'a [crate::covering::CoverBall],
    proof_path_count: usize,
    fallback_count: usize,
    scale: f64,
}

pub fn run_cover(args: CoverArgs) -> Result<()> {
    let grid = read_kpgrid_file(&args.grid)?;
    let cell: Vec<u64> = args
        .center_cell
        .split(',')
        .map(|c| c.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Input(format!("bad --center-cell {}", args.center_cell)))?;
    if !grid.contains_cell(&cell) {
        return Err(Error::input("--center-cell is not an occupied cell"));
    }
    let x = Point::new(grid.cell_center(&cell))?;
    let params = CoverParams {
        ball_scale: args.ball_scale,
        frame_resolution: args.frame_resolution,
        boundary_samples: args.boundary_samples,
        seed: args.global.seed,
    };
    let radius = args.radius;
    let (rho, k, alpha) = (args.rho, args.k, args.alpha);
    let result = with_thread_cap(args.global.threads, || {
        covering_construction(&grid, &x, radius, rho, k, alpha, &params)
    })??;
    if let Some(svg_path) = &args.svg {
        if grid.dim() == 2 {
            std::fs::write(svg_path, svg::render_cover_scene(&grid, &x, radius, &result))?;
        } else {
            eprintln!("--svg ignored: scene dumps are 2D only");
        }
    }
    let doc = CoverDoc {
        version: crate::VERSION,
        config: echo(&[
            ("grid", args.grid.display().to_string()),
            ("center_cell", args.center_cell.clone()),
            ("radius", fmt_f64(args.radius)),
            ("rho", fmt_f64(args.rho)),
            ("k", args.k.to_string()),
            ("alpha", fmt_f64(args.alpha)),
            ("ball_scale", fmt_f64(args.ball_scale)),
            ("frame_resolution", args.frame_resolution.to_string()),
            ("boundary_samples", args.boundary_samples.to_string()),
            ("seed", args.global.seed.to_string()),
        ]),
        balls: &result.balls,
        proof_path_count: result.proof_path_count,
        fallback_count: result.fallback_count,
        scale: result.scale,
    };
    write_output(args.global.out.as_deref(), &to_json(&doc)?)
}
