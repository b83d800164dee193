//! `nrs` — simulate non-regular (quadrant-masked) video sampling and
//! reconstruct it with the single-frame, bidirectional multi-frame and
//! recursive multi-frame pipelines.

mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use nrs_core::merge::WeightScheme;
use nrs_core::metrics::{self, MetricReport, SsimWindow};
use nrs_core::pipeline::{self, MfWindow, Mode, PipelineConfig};
use nrs_core::sampling::{apply_mask, generate_quadrant_mask, Mask};
use nrs_core::video_io::{self, MotionKind, PixelFormat};
use nrs_core::{FsrParams, MeParams, VideoBuffer};

#[derive(Parser)]
#[command(
    name = "nrs",
    about = "Non-regular video sampling simulation and frequency selective reconstruction",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a quadrant sampling mask file.
    Mask(MaskArgs),
    /// Reconstruct a video: apply the mask, run a pipeline, report quality.
    Run(RunArgs),
    /// Compare a reconstruction against the pristine original.
    Eval(EvalArgs),
    /// Run the full gain experiment: SF baseline plus MF/RMF over a K range.
    Sweep(sweep::SweepArgs),
    /// Generate a synthetic test sequence (translation, zoom or rotation).
    Synth(SynthArgs),
}

#[derive(Args)]
struct MaskArgs {
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write a human-readable PBM next to the packed file.
    #[arg(long)]
    pbm: Option<PathBuf>,
}

/// Reconstruction parameters; a config file provides the base values and
/// individual flags override.
#[derive(Args, Clone)]
pub struct FsrArgs {
    /// Flat key-value parameter file (block_size, border_width, fft_size,
    /// iterations, rho, gamma, delta).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    block_size: Option<usize>,
    #[arg(long)]
    border_width: Option<usize>,
    #[arg(long)]
    fft_size: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

impl FsrArgs {
    pub fn build(&self) -> Result<FsrParams> {
        let mut params = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                FsrParams::from_text(&text)?
            }
            None => FsrParams::default(),
        };
        if let Some(v) = self.block_size {
            params.block_size = v;
        }
        if let Some(v) = self.border_width {
            params.border_width = v;
        }
        if let Some(v) = self.fft_size {
            params.fft_size = v;
        }
        if let Some(v) = self.iterations {
            params.iterations = v;
        }
        if let Some(v) = self.rho {
            params.rho = v;
        }
        if let Some(v) = self.gamma {
            params.gamma = v;
        }
        if let Some(v) = self.delta {
            params.delta = v;
        }
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args, Clone)]
pub struct MeArgs {
    /// Matching window side (odd).
    #[arg(long)]
    me_window: Option<usize>,
    /// Maximum displacement per axis.
    #[arg(long)]
    me_range: Option<usize>,
    /// Minimum jointly valid window positions per candidate.
    #[arg(long)]
    min_overlap: Option<usize>,
}

impl MeArgs {
    pub fn build(&self) -> Result<MeParams> {
        let mut params = MeParams::default();
        if let Some(v) = self.me_window {
            params.window = v;
        }
        if let Some(v) = self.me_range {
            params.search_range = v;
        }
        if let Some(v) = self.min_overlap {
            params.min_overlap = v;
        }
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args, Clone)]
pub struct InputFormatArgs {
    /// Width for headerless .yuv input.
    #[arg(long)]
    yuv_width: Option<usize>,
    /// Height for headerless .yuv input.
    #[arg(long)]
    yuv_height: Option<usize>,
    /// Chroma layout for headerless .yuv input.
    #[arg(long, default_value = "420", value_parser = parse_pixel_format)]
    yuv_format: PixelFormat,
}

pub(crate) fn parse_pixel_format(s: &str) -> Result<PixelFormat, String> {
    match s {
        "420" => Ok(PixelFormat::C420),
        "444" => Ok(PixelFormat::C444),
        "mono" | "gray" => Ok(PixelFormat::Mono),
        other => Err(format!("unknown format `{other}` (expected 420, 444 or mono)")),
    }
}

pub(crate) fn parse_scheme(s: &str) -> Result<WeightScheme, String> {
    match s {
        "equal" => Ok(WeightScheme::Equal),
        "linear" | "linear_decreasing" => Ok(WeightScheme::LinearDecreasing),
        other => Err(format!("unknown schedule `{other}` (expected equal or linear)")),
    }
}

pub(crate) fn parse_ssim_window(s: &str) -> Result<SsimWindow, String> {
    match s {
        "gaussian" => Ok(SsimWindow::Gaussian),
        "uniform" => Ok(SsimWindow::Uniform),
        other => Err(format!("unknown window `{other}` (expected gaussian or uniform)")),
    }
}

pub fn read_video(path: &Path, fmt: &InputFormatArgs) -> Result<VideoBuffer> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let video = match ext.as_str() {
        "y4m" => video_io::read_y4m(path)?,
        "yuv" => {
            let (Some(w), Some(h)) = (fmt.yuv_width, fmt.yuv_height) else {
                bail!("raw YUV input needs --yuv-width and --yuv-height");
            };
            video_io::read_yuv(path, w, h, fmt.yuv_format)?
        }
        "pgm" => VideoBuffer::new(vec![video_io::read_pgm(path)?])?,
        other => bail!("unsupported input extension `.{other}` (expected y4m, yuv or pgm)"),
    };
    Ok(video)
}

/// Runs `f` inside a rayon pool sized by `--threads`, the NRS_THREADS
/// environment variable, or the default.
pub fn with_thread_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let threads = match threads {
        Some(n) => Some(n),
        None => std::env::var("NRS_THREADS")
            .ok()
            .map(|v| v.parse().context("NRS_THREADS must be an integer"))
            .transpose()?,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("building thread pool")?;
    Ok(pool.install(f))
}

#[derive(Args)]
struct RunArgs {
    /// Pipeline: sf, mf or rmf.
    #[arg(long)]
    mode: String,
    /// Number of support frames K (ignored by sf).
    #[arg(long, default_value_t = 1)]
    support: usize,
    /// Mask file produced by `nrs mask`.
    #[arg(long)]
    mask: PathBuf,
    /// Pristine input video; the mask is applied internally.
    #[arg(long = "in")]
    input: PathBuf,
    /// Reconstructed video output (Y4M).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-frame PSNR/SSIM CSV against the pristine input.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Projection weighting over temporal distance.
    #[arg(long, default_value = "equal", value_parser = parse_scheme)]
    schedule: WeightScheme,
    /// Divide merged pixels by the full schedule weight regardless of
    /// per-pixel availability.
    #[arg(long)]
    eq2_literal: bool,
    /// Bidirectional reference window: symmetric (K each way) or total.
    #[arg(long, default_value = "symmetric")]
    mf_window: String,
    /// Margin of excluded border pixels in the quality metrics.
    #[arg(long, default_value_t = 4)]
    margin: usize,
    #[arg(long, default_value = "gaussian", value_parser = parse_ssim_window)]
    ssim_window: SsimWindow,
    /// Worker threads (NRS_THREADS as fallback, default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Label used in the report CSV; defaults to the input file stem.
    #[arg(long)]
    sequence: Option<String>,
    #[command(flatten)]
    fsr: FsrArgs,
    #[command(flatten)]
    me: MeArgs,
    #[command(flatten)]
    input_format: InputFormatArgs,
}

fn cmd_mask(args: &MaskArgs) -> Result<()> {
    let mask = generate_quadrant_mask(args.width, args.height, args.seed)?;
    mask.save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    if let Some(pbm) = &args.pbm {
        let mut file = std::fs::File::create(pbm)?;
        mask.write_pbm(&mut file)?;
    }
    eprintln!(
        "mask {}x{} seed {} -> {} ({} acquired pixels)",
        args.width,
        args.height,
        args.seed,
        args.out.display(),
        mask.acquired_count()
    );
    Ok(())
}

pub fn build_config(
    mode: Mode,
    support: usize,
    fsr: FsrParams,
    me: MeParams,
    scheme: WeightScheme,
    eq2_literal: bool,
    mf_window: MfWindow,
) -> PipelineConfig {
    PipelineConfig {
        mode,
        support,
        fsr,
        me,
        scheme,
        eq2_literal,
        mf_window,
    }
    .normalized()
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let mode = Mode::from_str(&args.mode)?;
    let mf_window = MfWindow::from_str(&args.mf_window)?;
    let config = build_config(
        mode,
        args.support,
        args.fsr.build()?,
        args.me.build()?,
        args.schedule,
        args.eq2_literal,
        mf_window,
    );

    let original = read_video(&args.input, &args.input_format)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let mask = Mask::load(&args.mask)
        .with_context(|| format!("reading {}", args.mask.display()))?;
    if mask.acquired_count() == 0 {
        eprintln!(
            "warning: mask {} has no acquired pixels; reconstruction degenerates to zeros",
            args.mask.display()
        );
    }

    let sampled_frames: Vec<_> = original
        .frames()
        .iter()
        .map(|f| apply_mask(f, &mask).map(|s| s.frame))
        .collect::<nrs_core::Result<_>>()?;
    let sampled = VideoBuffer::with_fps(sampled_frames, original.fps)?;

    eprintln!(
        "reconstructing {} frames at {}x{} with mode {} (K={})",
        sampled.len(),
        sampled.width(),
        sampled.height(),
        config.mode.as_str(),
        config.support
    );
    let recon = with_thread_pool(args.threads, || pipeline::run(&sampled, &mask, &config))??;

    if let Some(out) = &args.out {
        video_io::write_y4m(&recon, out, PixelFormat::C420)
            .with_context(|| format!("writing {}", out.display()))?;
        eprintln!("wrote {}", out.display());
    }
    if let Some(report) = &args.report {
        let (psnr, ssim) = metrics::evaluate_video(&original, &recon, args.margin, args.ssim_window)?;
        let sequence = args.sequence.clone().unwrap_or_else(|| file_stem(&args.input));
        let entry = MetricReport {
            sequence,
            mode: config.mode.as_str().to_string(),
            support: config.support,
            psnr,
            ssim,
        };
        let mut file = std::fs::File::create(report)?;
        metrics::write_metrics_csv(std::slice::from_ref(&entry), &mut file)?;
        eprintln!(
            "wrote {} (mean {:.3} dB / {:.5})",
            report.display(),
            entry.mean_psnr(),
            entry.mean_ssim()
        );
    }
    Ok(())
}

#[derive(Args)]
struct EvalArgs {
    /// Pristine original.
    #[arg(long)]
    reference: PathBuf,
    /// Reconstruction under test.
    #[arg(long)]
    test: PathBuf,
    /// Output CSV.
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value_t = 4)]
    margin: usize,
    #[arg(long, default_value = "gaussian", value_parser = parse_ssim_window)]
    ssim_window: SsimWindow,
    /// Sequence label in the CSV; defaults to the test file stem.
    #[arg(long)]
    sequence: Option<String>,
    #[arg(long, default_value = "eval")]
    mode_label: String,
    #[arg(long, default_value_t = 0)]
    support_label: usize,
    #[command(flatten)]
    input_format: InputFormatArgs,
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let reference = read_video(&args.reference, &args.input_format)
        .with_context(|| format!("reading {}", args.reference.display()))?;
    let test = read_video(&args.test, &args.input_format)
        .with_context(|| format!("reading {}", args.test.display()))?;
    let (psnr, ssim) = metrics::evaluate_video(&reference, &test, args.margin, args.ssim_window)?;
    let entry = MetricReport {
        sequence: args.sequence.clone().unwrap_or_else(|| file_stem(&args.test)),
        mode: args.mode_label.clone(),
        support: args.support_label,
        psnr,
        ssim,
    };
    let mut file = std::fs::File::create(&args.report)?;
    metrics::write_metrics_csv(std::slice::from_ref(&entry), &mut file)?;
    eprintln!(
        "wrote {} (mean {:.3} dB / {:.5})",
        args.report.display(),
        entry.mean_psnr(),
        entry.mean_ssim()
    );
    Ok(())
}

#[derive(Args)]
struct SynthArgs {
    /// translate, zoom or rotate.
    #[arg(long)]
    kind: String,
    /// Base texture width (output shrinks to keep all motion inside).
    #[arg(long, default_value_t = 192)]
    width: usize,
    /// Base texture height.
    #[arg(long, default_value_t = 144)]
    height: usize,
    #[arg(long, default_value_t = 20)]
    frames: usize,
    /// Pixels per frame (translate), scale per frame (zoom), degrees per
    /// frame (rotate).
    #[arg(long, default_value_t = 2.0)]
    rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional PGM base image instead of the generated texture.
    #[arg(long)]
    base: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let kind = match args.kind.as_str() {
        "translate" => MotionKind::Translate,
        "zoom" => MotionKind::Zoom,
        "rotate" => MotionKind::Rotate,
        other => bail!("unknown kind `{other}` (expected translate, zoom or rotate)"),
    };
    let base = match &args.base {
        Some(path) => video_io::read_pgm(path)
            .with_context(|| format!("reading {}", path.display()))?,
        None => video_io::synthetic_texture(args.width, args.height, args.seed),
    };
    let video = video_io::synthesize_sequence(kind, &base, args.frames, args.rate)?;
    video_io::write_y4m(&video, &args.out, PixelFormat::C420)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!(
        "wrote {} ({} frames at {}x{})",
        args.out.display(),
        video.len(),
        video.width(),
        video.height()
    );
    Ok(())
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Mask(args) => cmd_mask(args),
        Command::Run(args) => cmd_run(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => sweep::cmd_sweep(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
