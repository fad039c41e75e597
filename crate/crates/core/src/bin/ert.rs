use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ert_core::container::{read_elliptical, read_image, read_radon, write_container, ErsgObject};
use ert_core::forward::{add_noise, elliptical_sinogram, pixel_sinogram};
use ert_core::inversion::{
    default_band, direct_invert, lift_k_to_f, reconstruct, reduce_to_radon, AnalyticSource,
    EllipticalData, GriddedSource, NoiseSpec, ReconstructConfig,
};
use ert_core::metrics::{compare, disk_interior_means, disk_mask, default_margin, locate_peak};
use ert_core::pgm::{render_pgm, Window};
use ert_core::phantom::{rasterize, validate_admissible};
use ert_core::radon::{fbp, RampWindow};
use ert_core::{AnisotropyParams, Axis, EllipticalSinogram, Error, ImageGeometry, NodeCount, Phantom, Result};

#[derive(Parser)]
#[command(name = "ert", version, about = "Elliptical Radon transform toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize a phantom onto [-1,1]².
    Phantom {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
        /// Average a 4×4 sub-grid per pixel.
        #[arg(long)]
        supersample: bool,
    },
    /// Elliptical sinogram of a phantom on a (u, t) grid.
    Forward {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[command(flatten)]
        aniso: Aniso,
        #[arg(long, default_value_t = 256)]
        nu: usize,
        #[arg(long, default_value_t = 256)]
        nt: usize,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-2,2")]
        u_range: (f64, f64),
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "0,2")]
        t_range: (f64, f64),
        #[arg(long, value_enum, default_value_t = Mode::Quadrature)]
        mode: Mode,
        /// Raster size used by the pixel projector.
        #[arg(long, default_value_t = 256)]
        size: usize,
        /// Fixed azimuthal node count; default adapts to t.
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add seeded Gaussian noise scaled to a fraction of the data norm.
    Noise {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regular Radon sinogram of k from elliptical data.
    Reduce {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        aniso: AnisoOpt,
        #[command(flatten)]
        lines: Lines,
        #[arg(long)]
        out: PathBuf,
    },
    /// Filtered backprojection of a regular sinogram onto [-1,1]².
    Fbp {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long, value_enum, default_value_t = Filter::RamLak)]
        filter: Filter,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover f from a reconstructed k.
    Lift {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        aniso: Aniso,
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reduce, filter, backproject and lift in one run.
    Reconstruct {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        aniso: AnisoOpt,
        #[command(flatten)]
        lines: Lines,
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long, value_enum, default_value_t = Filter::RamLak)]
        filter: Filter,
        /// Relative noise added to the elliptical samples before reduction.
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the intermediate k image.
        #[arg(long)]
        k_out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Closed-form inversion with a band-limited kernel.
    Direct {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        aniso: AnisoOpt,
        #[arg(long, default_value_t = 256)]
        size: usize,
        /// Band limit B; default π / (median spacing of t²).
        #[arg(long)]
        band: Option<f64>,
        /// Extra band multipliers evaluated for the report, e.g. 0.5,2.
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<f64>,
        /// Averaging radius for the reported peak location.
        #[arg(long, default_value_t = 0.0)]
        peak_radius: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Error metrics of image b against reference a.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = MaskArg::All)]
        mask: MaskArg,
        /// Phantom for the disk mask and interior means; default the reference phantom.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write an image container as 16-bit PGM.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        window: Option<(f64, f64)>,
    },
}

#[derive(Args)]
struct Aniso {
    #[arg(long, default_value_t = 0.8)]
    a1: f64,
    #[arg(long, default_value_t = 1.0)]
    a2: f64,
}

/// Scales that may also come from an input container.
#[derive(Args)]
struct AnisoOpt {
    #[arg(long)]
    a1: Option<f64>,
    #[arg(long)]
    a2: Option<f64>,
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct Source {
    /// Elliptical sinogram container.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Phantom JSON evaluated on demand; the reference phantom if neither is given.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct Lines {
    #[arg(long, default_value_t = 256)]
    ntheta: usize,
    #[arg(long, default_value_t = 256)]
    ns: usize,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-1,1")]
    s_range: (f64, f64),
    /// Fixed azimuthal node count for on-demand sources.
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Quadrature,
    Pixel,
}

#[derive(Clone, Copy, ValueEnum)]
enum Filter {
    RamLak,
    Hann,
}

impl From<Filter> for RampWindow {
    fn from(f: Filter) -> Self {
        match f {
            Filter::RamLak => RampWindow::RamLak,
            Filter::Hann => RampWindow::Hann,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MaskArg {
    All,
    Disks,
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected LO,HI, got `{s}`"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("`{lo}`: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("`{hi}`: {e}"))?;
    Ok((lo, hi))
}

fn load_phantom(spec: Option<&Path>) -> Result<Phantom> {
    match spec {
        Some(p) => Phantom::load(p),
        None => Ok(Phantom::paper()),
    }
}

fn unit_square(size: usize) -> Result<ImageGeometry> {
    ImageGeometry::square(size, -1.0, 1.0)
}

impl Aniso {
    fn params(&self) -> Result<AnisotropyParams> {
        AnisotropyParams::planar(self.a1, self.a2)
    }
}

impl AnisoOpt {
    /// Flags if given, else `fallback`, else the defaults; flags that
    /// contradict `fallback` are rejected.
    fn resolve(&self, fallback: Option<&AnisotropyParams>) -> Result<AnisotropyParams> {
        match fallback {
            Some(p) => {
                let s = p.scales();
                for (flag, have, name) in [(self.a1, s[0], "a1"), (self.a2, s[1], "a2")] {
                    if flag.is_some_and(|v| v != have) {
                        return Err(Error::InvalidArgument(format!(
                            "--{name} {} contradicts the container's {name} = {have}",
                            flag.unwrap()
                        )));
                    }
                }
                Ok(p.clone())
            }
            None => AnisotropyParams::planar(self.a1.unwrap_or(0.8), self.a2.unwrap_or(1.0)),
        }
    }
}

impl Lines {
    fn axis(&self) -> Result<Axis> {
        Axis::new(self.s_range.0, self.s_range.1, self.ns)
    }

    /// Node rule for on-demand sources: one `s` step as the target pixel.
    fn node_count(&self) -> NodeCount {
        match self.nodes {
            Some(n) => NodeCount::Fixed(n),
            None => NodeCount::Adaptive {
                pixel: (self.s_range.1 - self.s_range.0).abs() / self.ns as f64,
            },
        }
    }
}

enum Loaded {
    Gridded(EllipticalSinogram),
    Analytic(Phantom),
}

impl Source {
    fn load(&self) -> Result<Loaded> {
        match (&self.input, &self.spec) {
            (Some(p), _) => Ok(Loaded::Gridded(read_elliptical(p)?)),
            (None, spec) => Ok(Loaded::Analytic(load_phantom(spec.as_deref())?)),
        }
    }
}

/// Runs `f` with the data source selected on the command line.
fn with_source<T>(
    source: &Source,
    aniso: &AnisoOpt,
    lines: &Lines,
    f: impl FnOnce(&dyn EllipticalData, &AnisotropyParams) -> Result<T>,
) -> Result<T> {
    match source.load()? {
        Loaded::Gridded(sin) => {
            let params = aniso.resolve(Some(&sin.params))?;
            f(&GriddedSource::new(&sin), &params)
        }
        Loaded::Analytic(phantom) => {
            let params = aniso.resolve(None)?;
            let report = validate_admissible(&phantom, &params)?;
            if !report.admissible {
                eprintln!(
                    "warning: disks {:?} map outside the unit disk (max |z| = {:.3}); s ∈ [-1, 1] will not cover them",
                    report.offenders, report.max_norm
                );
            }
            f(&AnalyticSource::new(&phantom, &params, lines.node_count())?, &params)
        }
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Phantom { spec, size, out, supersample } => {
            let phantom = load_phantom(spec.as_deref())?;
            let img = rasterize(&phantom, unit_square(size)?, supersample);
            write_container(out, &ErsgObject::Image(img))
        }
        Command::Forward { spec, aniso, nu, nt, u_range, t_range, mode, size, nodes, out } => {
            let phantom = load_phantom(spec.as_deref())?;
            let params = aniso.params()?;
            let u = Axis::new(u_range.0, u_range.1, nu)?;
            let t = Axis::new(t_range.0, t_range.1, nt)?;
            let sin = match mode {
                Mode::Quadrature => {
                    let nodes = match nodes {
                        Some(n) => NodeCount::Fixed(n),
                        None => NodeCount::Adaptive { pixel: 2.0 / size as f64 },
                    };
                    elliptical_sinogram(&phantom, &params, u, t, nodes)?
                }
                Mode::Pixel => pixel_sinogram(&rasterize(&phantom, unit_square(size)?, false), &params, u, t)?,
            };
            write_container(out, &ErsgObject::Elliptical(sin))
        }
        Command::Noise { input, ratio, seed, out } => {
            let sin = read_elliptical(input)?;
            write_container(out, &ErsgObject::Elliptical(add_noise(&sin, ratio, seed)?))
        }
        Command::Reduce { source, aniso, lines, out } => {
            let s = lines.axis()?;
            let (radon, report) = with_source(&source, &aniso, &lines, |src, params| {
                reduce_to_radon(src, params, lines.ntheta, s)
            })?;
            eprintln!(
                "zeroed theta rows: {}, guard nodes: {}, clipped samples: {}",
                report.zeroed_rows, report.guarded, report.clipped
            );
            write_container(out, &ErsgObject::Radon(radon))
        }
        Command::Fbp { input, size, filter, out } => {
            let radon = read_radon(input)?;
            let (k, _) = fbp(&radon, unit_square(size)?, filter.into())?;
            write_container(out, &ErsgObject::Image(k))
        }
        Command::Lift { input, aniso, size, out } => {
            let k = read_image(input)?;
            let f = lift_k_to_f(&k, &aniso.params()?, unit_square(size)?)?;
            write_container(out, &ErsgObject::Image(f))
        }
        Command::Reconstruct { source, aniso, lines, size, filter, noise, seed, out, k_out, report } => {
            let geometry = unit_square(size)?;
            let cfg = ReconstructConfig {
                ntheta: lines.ntheta,
                s: lines.axis()?,
                k_geometry: geometry,
                f_geometry: geometry,
                window: filter.into(),
                noise: noise.map(|ratio| NoiseSpec { ratio, seed }),
            };
            let rec = with_source(&source, &aniso, &lines, |src, params| reconstruct(src, params, &cfg))?;
            write_container(out, &ErsgObject::Image(rec.f))?;
            if let Some(p) = k_out {
                write_container(p, &ErsgObject::Image(rec.k))?;
            }
            write_text(report.as_deref(), &rec.diagnostics.to_text())
        }
        Command::Direct { input, aniso, size, band, sweep, peak_radius, out, report } => {
            let sin = read_elliptical(input)?;
            aniso.resolve(Some(&sin.params))?;
            let geometry = unit_square(size)?;
            let base = band.unwrap_or_else(|| default_band(&sin));
            let mut text = String::new();
            let _ = writeln!(text, "default_band = {}", default_band(&sin));
            let mut describe = |b: f64, img: &ert_core::GridImage| {
                let (px, py) = locate_peak(img, peak_radius).unwrap_or((f64::NAN, f64::NAN));
                let max = img.data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let _ = writeln!(text, "band = {b} peak = ({px}, {py}) max = {max} l2 = {}", img.l2_norm());
            };
            let img = direct_invert(&sin, geometry, base)?;
            describe(base, &img);
            for m in sweep {
                let b = base * m;
                describe(b, &direct_invert(&sin, geometry, b)?);
            }
            write_container(out, &ErsgObject::Image(img))?;
            write_text(report.as_deref(), &text)
        }
        Command::Compare { a, b, mask, spec, report } => {
            let (a, b) = (read_image(a)?, read_image(b)?);
            let phantom = load_phantom(spec.as_deref())?;
            let m = (mask == MaskArg::Disks).then(|| disk_mask(&phantom, &a));
            let mut metrics = compare(&a, &b, m.as_deref())?;
            if mask == MaskArg::Disks || spec.is_some() {
                metrics.disk_means = disk_interior_means(&b, &phantom, default_margin(&b));
            }
            write_text(report.as_deref(), &metrics.to_text())
        }
        Command::Render { input, out, window } => {
            let img = read_image(input)?;
            render_pgm(&img, out, window.map(|(lo, hi)| Window { lo, hi }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
