use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use plane_forge::config::RunConfig;
use plane_forge::evaluate::{argmax_conflict_rate, distance_sweep, DistanceGrid, SweepResult};
use plane_forge::formalize::{formalize_pipeline, initial_stream, verify, CellColoring, PipelineInput};
use plane_forge::geometry::Lattice;
use plane_forge::loss::{estimate_loss, Variant};
use plane_forge::net::{init_network, load_checkpoint, save_checkpoint, ColoringFunction, Network};
use plane_forge::render::{
    rasterize_cells, rasterize_coloring, render_heatmap, save_with_sidecar, RasterSpec, Sidecar, Window,
};
use plane_forge::train::{train, train_with_output};
use plane_forge::{Error, Stream};

#[derive(Parser)]
#[command(
    name = "plane-forge",
    version,
    about = "Neural search for colorings of the plane that avoid given distances"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Overrides the config seed.
    #[arg(long, global = true, env = "PLANE_FORGE_SEED")]
    seed: Option<u64>,
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a network from a run config.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a trained network into a certified periodic cell coloring.
    Formalize(FormalizeArgs),
    /// Check a cell coloring file for conflicts.
    Verify {
        coloring: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Conflict rate over a grid of distance inputs.
    Sweep(SweepArgs),
    /// Draw a network or cell coloring as a PNG.
    Render(RenderArgs),
}

#[derive(Args)]
struct FormalizeArgs {
    /// Run config; trains from scratch unless a checkpoint is given.
    #[arg(long, required_unless_present = "checkpoint")]
    config: Option<PathBuf>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cells along the first lattice vector.
    #[arg(long)]
    k: Option<usize>,
    /// Cells along the second lattice vector.
    #[arg(long)]
    l: Option<usize>,
    /// Cells along the third lattice vector (3D).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    /// Lattice vectors, row by row (4 numbers in 2D, 9 in 3D).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lattice: Option<Vec<f64>>,
}

#[derive(Args)]
struct SweepArgs {
    /// One or more checkpoints; results are combined by pointwise minimum.
    #[arg(long = "checkpoint", required = true)]
    checkpoints: Vec<PathBuf>,
    /// Run config describing the loss the networks were trained on.
    #[arg(long)]
    config: PathBuf,
    /// First axis as lo:hi:count.
    #[arg(long)]
    d1: String,
    /// Optional second axis as lo:hi:count.
    #[arg(long)]
    d2: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    /// Heatmap pixels per grid point.
    #[arg(long, default_value_t = 4)]
    scale: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, conflicts_with = "coloring", required_unless_present = "coloring")]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    coloring: Option<PathBuf>,
    /// x0,y0,x1,y1 (default -3,-3,3,3).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    window: Option<Vec<f64>>,
    /// Height of the 3D slice.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    slice: f64,
    #[arg(long, default_value_t = 1024)]
    width: usize,
    #[arg(long, default_value_t = 1024)]
    height: usize,
    /// Values for the network's distance inputs.
    #[arg(long, value_delimiter = ',')]
    params: Vec<f64>,
    /// Treat the network's last output as the bonus color.
    #[arg(long)]
    bonus: bool,
    /// Darken pixels by their maximum probability.
    #[arg(long)]
    shading: bool,
    #[arg(long)]
    out: PathBuf,
}

/// A command failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonFinite { .. } => 3,
            Error::NoPeriodicityFound(_) => 4,
            Error::Png(_) => 5,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(5);
        }
    }
    let result = match &cli.command {
        Command::Train { config, out } => cmd_train(config, out.as_deref(), cli.seed),
        Command::Formalize(args) => cmd_formalize(args, cli.seed),
        Command::Verify { coloring, report } => cmd_verify(coloring, report.as_deref()),
        Command::Sweep(args) => cmd_sweep(args, cli.seed),
        Command::Render(args) => cmd_render(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut config = RunConfig::from_json(&text)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::from(Error::Io(e)))
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::from(Error::Io(e)))
}

fn cmd_train(config_path: &Path, out: Option<&Path>, seed: Option<u64>) -> CmdResult {
    let config = load_config(config_path, seed)?;
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| config.output_dir.clone());
    create_dir(&out)?;
    write(&out.join("config.json"), &config.to_json())?;
    let spec = config.loss_spec();
    let stream = Stream::new(config.seed);
    let net = init_network(&config.architecture(), config.seed)?;
    log::info!(
        "training {} parameters for {} steps (seed {})",
        net.parameters().len(),
        config.training.steps,
        config.seed
    );
    let (net, trace) = train_with_output(net, &spec, &config.training, &stream.named("train"), Some(&out))?;
    save_checkpoint(&net, &out.join("checkpoint.json"))?;
    write(&out.join("history.csv"), &trace.history.to_csv())?;

    let summary_stream = stream.named("summary");
    let loss = estimate_loss(&net, &spec, &summary_stream)?.value;
    let rate = argmax_conflict_rate(&net, &spec, config.training.eval_pairs, &summary_stream)?;
    let summary = serde_json::json!({
        "seed": config.seed,
        "steps": config.training.steps,
        "final_loss": loss,
        "conflict_rate": rate,
        "eval_pairs": config.training.eval_pairs,
        "success": rate < config.success_threshold,
    });
    write(
        &out.join("summary.json"),
        &serde_json::to_string_pretty(&summary).expect("json"),
    )?;
    println!("final loss {loss:.6e}, argmax conflict rate {:.4}%", 100.0 * rate);
    Ok(0)
}

fn parse_lattice(values: &[f64]) -> Result<Lattice, Failure> {
    let dim = match values.len() {
        4 => 2,
        9 => 3,
        n => return Err(usage(format!("--lattice needs 4 or 9 numbers, got {n}"))),
    };
    let vectors: Vec<Vec<f64>> = values.chunks(dim).map(<[f64]>::to_vec).collect();
    Ok(Lattice::new(&vectors)?)
}

fn cmd_formalize(args: &FormalizeArgs, seed: Option<u64>) -> CmdResult {
    let network = args.checkpoint.as_deref().map(load_checkpoint).transpose()?;
    let mut config = match (&args.config, &network) {
        (Some(path), _) => load_config(path, seed)?,
        (None, Some(net)) => {
            // a bare checkpoint is formalized as a unit-distance coloring
            let mut c = RunConfig::minimal(Variant::Unit, net.num_outputs());
            c.dimension = net.spatial_dim();
            if let Some(s) = seed {
                c.seed = s;
            }
            c
        }
        (None, None) => return Err(usage("formalize needs --config or --checkpoint")),
    };
    let dim = config.dimension;
    if let Some(values) = &args.lattice {
        config.formalize.lattice = Some(parse_lattice(values)?);
    }
    if args.k.is_some() || args.l.is_some() || args.m.is_some() {
        let base = config
            .formalize
            .resolution
            .clone()
            .unwrap_or_else(|| plane_forge::formalize::default_resolution(dim));
        let mut res = base;
        for (i, v) in [args.k, args.l, args.m].into_iter().enumerate() {
            if let Some(v) = v {
                if i >= dim {
                    return Err(usage("--m only applies to 3D configs"));
                }
                res[i] = v;
            }
        }
        config.formalize.resolution = Some(res);
    }
    if let Some(r) = args.rounds {
        config.formalize.rounds = r;
    }
    config.validate()?;
    let out = args.out.clone().unwrap_or_else(|| config.output_dir.clone());
    create_dir(&out)?;

    let spec = config.loss_spec();
    let stream = Stream::new(config.seed).named("formalize");
    // train here rather than inside the pipeline so the network survives a
    // failed periodicity search
    let network = match network {
        Some(n) => n,
        None => {
            log::info!("training the initial network");
            let fresh = init_network(&config.architecture(), config.seed)?;
            let (n, _) = train(fresh, &spec, &config.training, &initial_stream(&stream))?;
            save_checkpoint(&n, &out.join("checkpoint.json"))?;
            n
        }
    };
    let outcome = formalize_pipeline(
        PipelineInput::Network(&network),
        &spec,
        &config.training,
        &config.formalize,
        &stream,
    )?;
    outcome.coloring.save(&out.join("coloring.json"))?;
    write(&out.join("report.json"), &outcome.report.to_json())?;
    save_checkpoint(&outcome.periodic_network, &out.join("periodic_checkpoint.json"))?;

    let raster = RasterSpec::new(
        default_window(dim, -3.0, -3.0, 3.0, 3.0, 0.0),
        1024,
        1024,
        spec.num_colors,
    );
    let image = rasterize_cells(&outcome.coloring, &raster)?;
    save_with_sidecar(&image, &Sidecar::for_raster(&raster, None)?, &out.join("coloring.png"))?;

    println!("{}", outcome.report.summary());
    Ok(if outcome.report.certified { 0 } else { 5 })
}

fn cmd_verify(path: &Path, report_path: Option<&Path>) -> CmdResult {
    let coloring = CellColoring::load(path)?;
    let report = verify(&coloring);
    println!("{}", report.summary());
    for v in report.violations.iter().take(20) {
        println!(
            "  color {} cells {:?} and {:?} (translate {:?}): distance {} within [{}, {}]",
            v.color, v.cell_a, v.cell_b, v.translate, v.distance, v.interval[0], v.interval[1]
        );
    }
    if report.violations.len() > 20 {
        println!("  ... {} more", report.violations.len() - 20);
    }
    if let Some(p) = report_path {
        write(p, &report.to_json())?;
    }
    Ok(if report.certified { 0 } else { 1 })
}

fn parse_axis(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || usage(format!("axis `{text}` is not lo:hi:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(usage(format!("axis `{text}` is empty")));
    }
    if n > 1 && hi <= lo {
        return Err(usage(format!("axis `{text}` must increase")));
    }
    Ok(DistanceGrid::linspace(lo, hi, n))
}

fn cmd_sweep(args: &SweepArgs, seed: Option<u64>) -> CmdResult {
    let config = load_config(&args.config, seed)?;
    let mut axes = vec![parse_axis(&args.d1)?];
    if let Some(d2) = &args.d2 {
        axes.push(parse_axis(d2)?);
    }
    let grid = DistanceGrid::new(axes)?;
    let spec = config.loss_spec();
    let stream = Stream::new(config.seed).named("sweep");
    let mut sweeps = Vec::new();
    for (i, path) in args.checkpoints.iter().enumerate() {
        let net = load_checkpoint(path)?;
        log::info!("sweeping {}", path.display());
        sweeps.push(distance_sweep(&net, &spec, &grid, args.pairs, &stream.child(i as u64))?);
    }
    let combined = SweepResult::min_of(&sweeps)?;
    create_dir(&args.out)?;
    write(&args.out.join("sweep.csv"), &combined.to_csv())?;
    write(
        &args.out.join("sweep.json"),
        &serde_json::to_string_pretty(&combined).expect("json"),
    )?;
    let image = render_heatmap(&combined, args.scale)?;
    let source = (args.checkpoints.len() == 1).then(|| args.checkpoints[0].as_path());
    save_with_sidecar(
        &image,
        &Sidecar::for_heatmap(&combined, &image, source)?,
        &args.out.join("heatmap.png"),
    )?;
    let best = combined.rates.iter().copied().fold(f64::INFINITY, f64::min);
    println!(
        "{} grid points, lowest conflict rate {:.4}%",
        combined.rates.len(),
        100.0 * best
    );
    Ok(0)
}

/// Window over `[x0, x1] x [y0, y1]`, lifted to the plane `z = slice` in 3D.
fn default_window(dim: usize, x0: f64, y0: f64, x1: f64, y1: f64, slice: f64) -> Window {
    let mut w = Window::rect(x0, y0, x1, y1);
    if dim == 3 {
        w.origin.push(slice);
        w.right.push(0.0);
        w.down.push(0.0);
    }
    w
}

fn cmd_render(args: &RenderArgs) -> CmdResult {
    let [x0, y0, x1, y1] = match args.window.as_deref() {
        None => [-3.0, -3.0, 3.0, 3.0],
        Some(&[a, b, c, d]) => [a, b, c, d],
        Some(_) => return Err(usage("--window needs x0,y0,x1,y1")),
    };
    if !(x1 > x0 && y1 > y0) {
        return Err(usage("--window must have x1 > x0 and y1 > y0"));
    }
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let (image, spec, source) = if let Some(path) = &args.checkpoint {
        let net: Network = load_checkpoint(path)?;
        let outputs = net.num_outputs();
        let regular = if args.bonus { outputs - 1 } else { outputs };
        let window = default_window(net.spatial_dim(), x0, y0, x1, y1, args.slice);
        let mut spec = RasterSpec::new(window, args.width, args.height, regular);
        spec.shading = args.shading;
        (rasterize_coloring(&net, &args.params, regular, &spec)?, spec, path)
    } else {
        let path = args.coloring.as_ref().expect("clap enforces one input");
        let coloring = CellColoring::load(path)?;
        let window = default_window(coloring.grid().dim(), x0, y0, x1, y1, args.slice);
        let spec = RasterSpec::new(window, args.width, args.height, coloring.num_colors());
        (rasterize_cells(&coloring, &spec)?, spec, path)
    };
    save_with_sidecar(&image, &Sidecar::for_raster(&spec, Some(source))?, &args.out)?;
    println!("wrote {} ({}x{})", args.out.display(), image.width, image.height);
    Ok(0)
}
