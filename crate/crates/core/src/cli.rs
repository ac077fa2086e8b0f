//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 I/O error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bayes::{bayes_classifier, bayes_error, posterior, DEFAULT_TAU_UNC};
use crate::bounds::{
    check_eps_list, compute_bounds_detailed, epsilon_sweep, fmt_sig9, sweep_csv, zeta_sharp,
    BoundsOptions, BoundsReport, Intermediates,
};
use crate::convolution::convolve_distribution;
use crate::correctness::{
    all_correct_probability, bayes_predictions, neighbor_correctness, neighbor_correctness_self,
    read_predictions, write_predictions,
};
use crate::density::{
    calibrate_moons, kde_default_spec, kde_fit_with_bandwidths, make_gaussian_mixture,
    make_uniform_patches, moons_default_spec, overlapping_squares, sample_moons, squares_rects,
    Bandwidth, LabeledDensity, MoonsDensity, MoonsParams, SampleSet,
};
use crate::error::{Error, Result};
use crate::grid::{Grid2D, GridSpec};
use crate::render::{render_svg, ColorScale, RenderOptions};
use crate::vicinity::{build_kernel, Norm, VicinityKernel};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Flags that take no value; `key=true` in a config file turns them on.
const SWITCHES: &[&str] = &["dump-intermediates"];

#[derive(Parser, Debug)]
#[command(
    name = "robust-bound",
    version,
    about = "Bayes errors, vicinity-convolved distributions and robust-accuracy upper bounds for 2-D labeled densities"
)]
pub struct Cli {
    /// Grid as x0,y0,dx,dy,nx,ny (default depends on the distribution).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Posterior slack: a cell is uncertain when its max posterior is below 1 − tau.
    #[arg(long, global = true, default_value_t = DEFAULT_TAU_UNC)]
    pub tau_unc: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Also write every pipeline stage (D', hardened, D†, regions).
    #[arg(long, global = true)]
    pub dump_intermediates: bool,
    /// key=value file of long flags; flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a labeled density and write its grids.
    Density {
        #[arg(value_enum)]
        kind: DistKind,
        #[command(flatten)]
        params: DistParams,
    },
    /// Find the Moons noise level whose Bayes error matches a target.
    CalibrateMoons {
        #[arg(long, default_value_t = 0.0854)]
        target_beta: f64,
        #[arg(long, default_value_t = 64)]
        quadrature_points: usize,
        /// Cells per side of the default Moons grid.
        #[arg(long, default_value_t = 512)]
        resolution: usize,
    },
    /// Print the Bayes error.
    BayesError {
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Convolve with the vicinity and write D'.
    Convolve {
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        vicinity: VicinityArgs,
    },
    /// All bounds for one vicinity.
    Bounds {
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        vicinity: VicinityArgs,
        /// Density floor for the margin term (default: smallest support evidence).
        #[arg(long)]
        p_min: Option<f64>,
    },
    /// Bounds over a list of radii, written to sweep.csv.
    Sweep {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, value_enum, default_value_t = NormArg::Linf)]
        norm: NormArg,
        /// Comma-separated ascending radii.
        #[arg(long)]
        eps: String,
        #[arg(long)]
        p_min: Option<f64>,
    },
    /// Mass of the uncertainty region of D'.
    ZetaSharp {
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        vicinity: VicinityArgs,
    },
    /// Sample-based neighbor correctness.
    Correctness {
        #[command(subcommand)]
        alg: CorrectnessCommand,
    },
    /// Heatmap SVG of a grid CSV.
    Render {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to <out>/<input stem>.svg.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        vmin: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        vmax: Option<f64>,
        #[arg(long, default_value_t = 256)]
        max_cells: usize,
    },
    /// Draw labeled Moons samples.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value = "samples.csv")]
        name: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum CorrectnessCommand {
    /// Test points against a separate reference sample.
    Alg1 {
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        /// `index,predicted_label` for the reference sample; defaults to the
        /// grid Bayes classifier of --dist.
        #[arg(long)]
        predictions: Option<PathBuf>,
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        dist: DistArgs,
    },
    /// The sample is its own reference.
    Alg2 {
        /// Labeled sample, used as both test and reference set.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        predictions: Option<PathBuf>,
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Probability that n vicinity draws are all classified correctly.
    Product {
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        vicinity: VicinityArgs,
        /// Comma-separated sample counts.
        #[arg(long, default_value = "0,1,10,100")]
        n_samples: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistKind {
    Moons,
    Mixture,
    Squares,
    Kde,
    /// A density directory written by `density`.
    File,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormArg {
    Linf,
    L2,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Linf => Norm::LInf,
            NormArg::L2 => Norm::L2,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct DistArgs {
    #[arg(long, value_enum)]
    pub dist: Option<DistKind>,
    #[command(flatten)]
    pub params: DistParams,
}

#[derive(Args, Debug, Clone)]
pub struct DistParams {
    /// Moons noise level.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub quadrature_points: usize,
    /// Labeled samples (x1,x2,label) for the KDE.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// `auto` (Scott's rule) or a fixed bandwidth.
    #[arg(long, default_value = "auto")]
    pub bandwidth: String,
    /// Mixture priors, e.g. 0.5,0.5.
    #[arg(long)]
    pub priors: Option<String>,
    /// Mixture means, one x,y pair per class separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub means: Option<String>,
    /// Mixture standard deviations, one per class.
    #[arg(long)]
    pub sigmas: Option<String>,
    /// Directory written by `density`.
    #[arg(long)]
    pub density_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct VicinityArgs {
    #[arg(long, value_enum, default_value_t = NormArg::Linf)]
    pub norm: NormArg,
    #[arg(long)]
    pub eps: f64,
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args(args: Vec<OsString>) -> i32 {
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let command_line = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    match run(&cli, &command_line) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        EXIT_NUMERIC
    } else if e.is_io() {
        EXIT_IO
    } else {
        EXIT_USAGE
    }
}

/// Appends `--key value` for every config entry whose flag is not already
/// on the command line.
fn merge_config(mut args: Vec<OsString>) -> Result<Vec<OsString>> {
    let pos = args.iter().position(|a| a == "--config");
    let path = match pos {
        Some(i) => PathBuf::from(
            args.get(i + 1)
                .ok_or_else(|| Error::param("config", "missing file name"))?,
        ),
        None => match args
            .iter()
            .find_map(|a| a.to_str()?.strip_prefix("--config=").map(PathBuf::from))
        {
            Some(p) => p,
            None => return Ok(args),
        },
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let present = |key: &str| {
        args.iter().any(|a| {
            a.to_str()
                .is_some_and(|s| s == format!("--{key}") || s.starts_with(&format!("--{key}=")))
        })
    };
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.clone(),
            line: n + 1,
            reason: format!("expected key=value, got `{line}`"),
        })?;
        let (key, value) = (key.trim().trim_start_matches("--"), value.trim());
        if key == "config" || present(key) {
            continue;
        }
        if SWITCHES.contains(&key) {
            match value {
                "true" | "1" | "yes" => extra.push(OsString::from(format!("--{key}"))),
                "false" | "0" | "no" => {}
                other => {
                    return Err(Error::Parse {
                        path: path.clone(),
                        line: n + 1,
                        reason: format!("`{key}` expects true or false, got `{other}`"),
                    })
                }
            }
        } else {
            extra.push(OsString::from(format!("--{key}={value}")));
        }
    }
    args.extend(extra);
    Ok(args)
}

struct Ctx<'a> {
    cli: &'a Cli,
    command_line: &'a str,
}

impl Ctx<'_> {
    fn provenance(&self, spec: Option<&GridSpec>) -> String {
        format!(
            "# robust-bound {}, command: {}, seed: {}, grid: {}, tau_unc: {}",
            env!("CARGO_PKG_VERSION"),
            self.command_line,
            self.cli.seed,
            spec.map_or_else(|| "none".to_string(), |s| s.to_csv_field()),
            fmt_sig9(self.cli.tau_unc)
        )
    }

    fn out_dir(&self) -> Result<&Path> {
        let dir = self.cli.out.as_path();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(dir)
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.out_dir()?.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    fn explicit_grid(&self) -> Result<Option<GridSpec>> {
        self.cli.grid.as_deref().map(GridSpec::parse).transpose()
    }

    fn load(&self, dist: &DistArgs) -> Result<LabeledDensity> {
        let kind = dist.dist.ok_or_else(|| {
            Error::param("dist", "required: moons, mixture, squares, kde or file")
        })?;
        self.build(kind, &dist.params)
    }

    fn build(&self, kind: DistKind, p: &DistParams) -> Result<LabeledDensity> {
        let grid = self.explicit_grid()?;
        match kind {
            DistKind::Moons => {
                let sigma = p.sigma.ok_or_else(|| {
                    Error::param("sigma", "required for moons (see calibrate-moons)")
                })?;
                let params = MoonsParams {
                    sigma,
                    quadrature_points: p.quadrature_points,
                };
                let spec = grid.unwrap_or_else(|| moons_default_spec(512));
                Ok(MoonsDensity::new(params)?.labeled_density(&spec)?.0)
            }
            DistKind::Squares => match grid {
                None => Ok(overlapping_squares()),
                Some(spec) => make_uniform_patches(&[0.5, 0.5], &squares_rects(), &spec),
            },
            DistKind::Mixture => {
                let priors = parse_list(p.priors.as_deref(), "priors")?;
                let sigmas = parse_list(p.sigmas.as_deref(), "sigmas")?;
                let means = parse_means(p.means.as_deref())?;
                let spec = match grid {
                    Some(s) => s,
                    None => mixture_default_spec(&means, &sigmas)?,
                };
                make_gaussian_mixture(&priors, &means, &sigmas, &spec)
            }
            DistKind::Kde => {
                let path = p
                    .samples
                    .as_ref()
                    .ok_or_else(|| Error::param("samples", "required for kde"))?;
                let samples = SampleSet::read_csv(path)?;
                let bandwidth = parse_bandwidth(&p.bandwidth)?;
                let spec = match grid {
                    Some(s) => s,
                    None => kde_default_spec(&samples, bandwidth, 512)?,
                };
                Ok(kde_fit_with_bandwidths(&samples, bandwidth, &spec)?.0)
            }
            DistKind::File => {
                let dir = p
                    .density_dir
                    .as_ref()
                    .ok_or_else(|| Error::param("density_dir", "required for --dist file"))?;
                LabeledDensity::read_dir(dir)
            }
        }
    }

    fn kernel(&self, d: &LabeledDensity, v: &VicinityArgs) -> Result<VicinityKernel> {
        build_kernel(v.norm.into(), v.eps, (d.spec().dx, d.spec().dy))
    }

    fn dump(&self, name: &str, im: &Intermediates, spec: &GridSpec) -> Result<()> {
        let dir = self.out_dir()?.join(name);
        let prov = self.provenance(Some(spec));
        im.dprime.write_dir(&dir.join("dprime"), Some(&prov))?;
        im.hardened.write_dir(&dir.join("hardened"), Some(&prov))?;
        im.dagger.write_dir(&dir.join("dagger"), Some(&prov))?;
        for (file, region) in [
            ("k_d.csv", &im.k_d),
            ("k_dprime.csv", &im.k_dprime),
            ("k_dagger.csv", &im.k_dagger),
        ] {
            region.mask.write_csv(&dir.join(file), Some(&prov))?;
        }
        Ok(())
    }
}

fn parse_list(s: Option<&str>, name: &'static str) -> Result<Vec<f64>> {
    let s = s.ok_or_else(|| Error::param(name, "required for mixture"))?;
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::param(name, format!("`{v}`: {e}")))
        })
        .collect()
}

fn parse_means(s: Option<&str>) -> Result<Vec<[f64; 2]>> {
    let s = s.ok_or_else(|| Error::param("means", "required for mixture"))?;
    s.split(';')
        .map(|pair| {
            let v = parse_list(Some(pair), "means")?;
            match v.as_slice() {
                [x, y] => Ok([*x, *y]),
                _ => Err(Error::param("means", format!("expected x,y, got `{pair}`"))),
            }
        })
        .collect()
}

fn parse_bandwidth(s: &str) -> Result<Bandwidth> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Bandwidth::Auto);
    }
    s.parse::<f64>()
        .map(Bandwidth::Fixed)
        .map_err(|e| Error::param("bandwidth", format!("`{s}`: {e}")))
}

fn parse_eps_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::param("eps", format!("`{v}`: {e}")))
        })
        .collect()
}

/// Means ± 7 standard deviations, 256 cells along the longer side.
fn mixture_default_spec(means: &[[f64; 2]], sigmas: &[f64]) -> Result<GridSpec> {
    if means.is_empty() {
        return Err(Error::param("means", "need at least one class"));
    }
    let pad = 7.0 * sigmas.iter().cloned().fold(0.0, f64::max);
    let fold = |axis: usize, f: fn(f64, f64) -> f64, init: f64| {
        means.iter().map(|m| m[axis]).fold(init, f)
    };
    let (x0, x1) = (
        fold(0, f64::min, f64::MAX) - pad,
        fold(0, f64::max, f64::MIN) + pad,
    );
    let (y0, y1) = (
        fold(1, f64::min, f64::MAX) - pad,
        fold(1, f64::max, f64::MIN) + pad,
    );
    let cell = (x1 - x0).max(y1 - y0) / 256.0;
    GridSpec::new(
        x0,
        y0,
        cell,
        cell,
        ((x1 - x0) / cell).ceil() as usize,
        ((y1 - y0) / cell).ceil() as usize,
    )
}

fn print_report(r: &BoundsReport) {
    print!("{r}");
}

pub fn run(cli: &Cli, command_line: &str) -> Result<()> {
    if !(cli.tau_unc >= 0.0 && cli.tau_unc < 0.5) {
        return Err(Error::param(
            "tau_unc",
            format!("must lie in [0, 0.5), got {}", cli.tau_unc),
        ));
    }
    let ctx = Ctx { cli, command_line };
    let opts = |p_min: Option<f64>| BoundsOptions {
        tau_unc: cli.tau_unc,
        p_min_override: p_min,
    };
    match &cli.command {
        Command::Density { kind, params } => {
            let d = ctx.build(*kind, params)?;
            let prov = ctx.provenance(Some(d.spec()));
            d.write_dir(ctx.out_dir()?, Some(&prov))?;
            println!(
                "wrote {} classes on {} grid to {}",
                d.num_classes(),
                d.spec().resolution_label(),
                cli.out.display()
            );
        }
        Command::CalibrateMoons {
            target_beta,
            quadrature_points,
            resolution,
        } => {
            let spec = match ctx.explicit_grid()? {
                Some(s) => s,
                None => moons_default_spec(*resolution),
            };
            let cal = calibrate_moons(*target_beta, &spec, *quadrature_points)?;
            let mut csv = ctx.provenance(Some(&spec));
            csv.push_str("\nsigma,beta_D\n");
            for (s, b) in &cal.sweep {
                let _ = writeln!(csv, "{},{}", fmt_sig9(*s), fmt_sig9(*b));
            }
            ctx.write("calibration.csv", &csv)?;
            ctx.write(
                "sigma.txt",
                &format!("{}\n{}\n", ctx.provenance(Some(&spec)), fmt_sig9(cal.sigma)),
            )?;
            println!("sigma* = {}", fmt_sig9(cal.sigma));
            println!("beta_D = {}", fmt_sig9(cal.beta));
        }
        Command::BayesError { dist } => {
            let d = ctx.load(dist)?;
            println!("beta_D = {}", fmt_sig9(bayes_error(&d)));
        }
        Command::Convolve { dist, vicinity } => {
            let d = ctx.load(dist)?;
            let k = ctx.kernel(&d, vicinity)?;
            let dp = convolve_distribution(&d, &k)?;
            let prov = ctx.provenance(Some(d.spec()));
            dp.write_dir(&ctx.out_dir()?.join("convolved"), Some(&prov))?;
            println!("beta_D      = {}", fmt_sig9(bayes_error(&d)));
            println!("beta_Dprime = {}", fmt_sig9(posterior(&dp).bayes_error()));
        }
        Command::Bounds {
            dist,
            vicinity,
            p_min,
        } => {
            let d = ctx.load(dist)?;
            let k = ctx.kernel(&d, vicinity)?;
            let (r, im) = compute_bounds_detailed(&d, &k, &opts(*p_min))?;
            let prov = ctx.provenance(Some(d.spec()));
            ctx.write(
                "bounds.csv",
                &sweep_csv(std::slice::from_ref(&r), Some(&prov)),
            )?;
            if cli.dump_intermediates {
                ctx.dump("intermediates", &im, d.spec())?;
            }
            print_report(&r);
        }
        Command::Sweep {
            dist,
            norm,
            eps,
            p_min,
        } => {
            let d = ctx.load(dist)?;
            let eps = parse_eps_list(eps)?;
            let rows = if cli.dump_intermediates {
                check_eps_list(&eps)?;
                let mut rows = Vec::new();
                for &e in &eps {
                    let k = build_kernel((*norm).into(), e, (d.spec().dx, d.spec().dy))?;
                    let (r, im) = compute_bounds_detailed(&d, &k, &opts(*p_min))?;
                    ctx.dump(&format!("intermediates/eps_{}", fmt_sig9(e)), &im, d.spec())?;
                    rows.push(r);
                }
                rows
            } else {
                epsilon_sweep(&d, (*norm).into(), &eps, &opts(*p_min))?
            };
            let prov = ctx.provenance(Some(d.spec()));
            let path = ctx.write("sweep.csv", &sweep_csv(&rows, Some(&prov)))?;
            print!("{}", sweep_csv(&rows, None));
            eprintln!("wrote {}", path.display());
        }
        Command::ZetaSharp { dist, vicinity } => {
            let d = ctx.load(dist)?;
            let k = ctx.kernel(&d, vicinity)?;
            let z = zeta_sharp(&d, &k, cli.tau_unc)?;
            println!("zeta_sharp = {}", fmt_sig9(z));
            println!("upper bound = {}", fmt_sig9(1.0 - z));
        }
        Command::Correctness { alg } => run_correctness(&ctx, alg)?,
        Command::Render {
            input,
            output,
            vmin,
            vmax,
            max_cells,
        } => {
            let grid = Grid2D::read_csv(input)?;
            let auto = ColorScale::auto(&grid);
            let scale = match (vmin, vmax) {
                (None, None) => auto,
                (lo, hi) => ColorScale::new(lo.unwrap_or(auto.vmin), hi.unwrap_or(auto.vmax))?,
            };
            let svg = render_svg(
                &grid,
                &RenderOptions {
                    scale: Some(scale),
                    max_cells: *max_cells,
                    title: Some(ctx.provenance(Some(grid.spec()))),
                    ..Default::default()
                },
            );
            let path = match output {
                Some(p) => p.clone(),
                None => {
                    let stem = input
                        .file_stem()
                        .map_or("grid".into(), |s| s.to_string_lossy().into_owned());
                    ctx.out_dir()?.join(format!("{stem}.svg"))
                }
            };
            fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
            println!("wrote {}", path.display());
        }
        Command::Sample { n, sigma, name } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let s = sample_moons(*n, *sigma, &mut rng)?;
            let path = ctx.write(name, &s.to_csv(Some(&ctx.provenance(None))))?;
            println!("wrote {} samples to {}", s.len(), path.display());
        }
    }
    Ok(())
}

fn predictions_for(
    ctx: &Ctx,
    explicit: Option<&PathBuf>,
    dist: &DistArgs,
    s: &SampleSet,
) -> Result<Vec<usize>> {
    match explicit {
        Some(p) => read_predictions(p),
        None => {
            let d = ctx.load(dist).map_err(|e| match e {
                Error::InvalidParameter { name: "dist", .. } => Error::param(
                    "predictions",
                    "give --predictions or a --dist for the Bayes classifier",
                ),
                other => other,
            })?;
            let pred = bayes_predictions(&bayes_classifier(&d), s);
            let prov = ctx.provenance(Some(d.spec()));
            write_predictions(&ctx.out_dir()?.join("predictions.csv"), &pred, Some(&prov))?;
            Ok(pred)
        }
    }
}

fn run_correctness(ctx: &Ctx, alg: &CorrectnessCommand) -> Result<()> {
    match alg {
        CorrectnessCommand::Alg1 {
            test,
            reference,
            predictions,
            theta,
            dist,
        } => {
            let test = SampleSet::read_csv(test)?;
            let reference = SampleSet::read_csv(reference)?;
            let pred = predictions_for(ctx, predictions.as_ref(), dist, &reference)?;
            let r = neighbor_correctness(&test, &reference, &pred, *theta)?;
            let csv = format!(
                "{}\nalpha_strict,alpha_vacuous,coverage,n_test,n_reference\n{},{},{},{},{}\n",
                ctx.provenance(None),
                fmt_sig9(r.alpha_strict),
                fmt_sig9(r.alpha_vacuous),
                fmt_sig9(r.coverage),
                r.n_test,
                r.n_reference
            );
            ctx.write("correctness.csv", &csv)?;
            println!("alpha         = {}", fmt_sig9(r.alpha_strict));
            println!("alpha_vacuous = {}", fmt_sig9(r.alpha_vacuous));
            println!("coverage      = {}", fmt_sig9(r.coverage));
        }
        CorrectnessCommand::Alg2 {
            input,
            predictions,
            theta,
            dist,
        } => {
            let s = SampleSet::read_csv(input)?;
            let pred = predictions_for(ctx, predictions.as_ref(), dist, &s)?;
            let alpha = neighbor_correctness_self(&s, &pred, *theta)?;
            let csv = format!(
                "{}\nalpha,n\n{},{}\n",
                ctx.provenance(None),
                fmt_sig9(alpha),
                s.len()
            );
            ctx.write("correctness.csv", &csv)?;
            println!("alpha = {}", fmt_sig9(alpha));
        }
        CorrectnessCommand::Product {
            dist,
            vicinity,
            n_samples,
            trials,
        } => {
            let d = ctx.load(dist)?;
            let k = ctx.kernel(&d, vicinity)?;
            let ns = n_samples
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::param("n_samples", format!("`{v}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut csv = ctx.provenance(Some(d.spec()));
            csv.push_str("\nn_samples,estimate,std_error,trials\n");
            for n in ns {
                let e = all_correct_probability(&d, &k, n, *trials, ctx.cli.seed)?;
                let _ = writeln!(
                    csv,
                    "{n},{},{},{}",
                    fmt_sig9(e.estimate),
                    fmt_sig9(e.std_error),
                    e.trials
                );
                println!(
                    "n={n}: {} ± {}",
                    fmt_sig9(e.estimate),
                    fmt_sig9(e.std_error)
                );
            }
            ctx.write("product.csv", &csv)?;
        }
    }
    Ok(())
}
