//! The gain-sweep experiment driver: one SF baseline run per sequence, then
//! MF and RMF over a range of support frame counts, with per-frame metrics,
//! per-mode gain tables and a gnuplot-ready gain curve.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;

use nrs_core::merge::WeightScheme;
use nrs_core::metrics::{self, GainMetric, MetricReport, SsimWindow};
use nrs_core::pipeline::{self, MfWindow, Mode};
use nrs_core::sampling::{apply_mask, generate_quadrant_mask};
use nrs_core::video_io::{self, PixelFormat};
use nrs_core::VideoBuffer;

use crate::{build_config, file_stem, read_video, with_thread_pool, FsrArgs, InputFormatArgs, MeArgs};

#[derive(Args)]
pub struct SweepArgs {
    /// Input videos; one sweep row set per sequence.
    #[arg(long = "in", required = true)]
    inputs: Vec<PathBuf>,
    /// Seed of the fixed quadrant mask applied to every frame.
    #[arg(long, default_value_t = 0)]
    mask_seed: u64,
    /// Comma-separated pipelines to evaluate.
    #[arg(long, default_value = "sf,mf,rmf")]
    modes: String,
    /// Inclusive support-frame range, e.g. `1..5`.
    #[arg(long, default_value = "1..5")]
    support: String,
    #[arg(long, default_value = "equal", value_parser = crate::parse_scheme)]
    schedule: WeightScheme,
    #[arg(long)]
    eq2_literal: bool,
    #[arg(long, default_value = "symmetric")]
    mf_window: String,
    #[arg(long, default_value_t = 4)]
    margin: usize,
    #[arg(long, default_value = "gaussian", value_parser = crate::parse_ssim_window)]
    ssim_window: SsimWindow,
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for all result files.
    #[arg(long)]
    out_dir: PathBuf,
    /// Also write every reconstruction as Y4M.
    #[arg(long)]
    save_recon: bool,
    #[command(flatten)]
    fsr: FsrArgs,
    #[command(flatten)]
    me: MeArgs,
    #[command(flatten)]
    input_format: InputFormatArgs,
}

/// Parses an inclusive `a..b` range (also accepts a single `k`).
fn parse_support_range(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().context("bad support range start")?;
        let b: usize = b.trim_start_matches('=').trim().parse().context("bad support range end")?;
        if a == 0 || b < a {
            bail!("support range must be nonempty and start at 1 or higher");
        }
        Ok((a..=b).collect())
    } else {
        let k: usize = s.trim().parse().context("bad support value")?;
        if k == 0 {
            bail!("support must be at least 1");
        }
        Ok(vec![k])
    }
}

fn parse_modes(s: &str) -> Result<Vec<Mode>> {
    let mut modes = Vec::new();
    for token in s.split(',') {
        let mode = Mode::from_str(token.trim())?;
        if !modes.contains(&mode) {
            modes.push(mode);
        }
    }
    if modes.is_empty() {
        bail!("--modes must name at least one pipeline");
    }
    Ok(modes)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let modes = parse_modes(&args.modes)?;
    let supports = parse_support_range(&args.support)?;
    let mf_window = MfWindow::from_str(&args.mf_window)?;
    let fsr = args.fsr.build()?;
    let me = args.me.build()?;

    // Fail before producing any output if an input is missing.
    for input in &args.inputs {
        if !input.exists() {
            bail!("input file {} does not exist", input.display());
        }
    }
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;

    let mut reports: Vec<MetricReport> = Vec::new();
    for input in &args.inputs {
        let sequence = file_stem(input);
        let original = read_video(input, &args.input_format)
            .with_context(|| format!("reading {}", input.display()))?;
        let mask = generate_quadrant_mask(original.width(), original.height(), args.mask_seed)?;
        let sampled_frames: Vec<_> = original
            .frames()
            .iter()
            .map(|f| apply_mask(f, &mask).map(|s| s.frame))
            .collect::<nrs_core::Result<_>>()?;
        let sampled = VideoBuffer::with_fps(sampled_frames, original.fps)?;

        let add_report = |mode: Mode,
                              support: usize,
                              recon: &VideoBuffer,
                              reports: &mut Vec<MetricReport>|
         -> Result<()> {
            let (psnr, ssim) =
                metrics::evaluate_video(&original, recon, args.margin, args.ssim_window)?;
            if args.save_recon {
                let name = format!("{}_{}_K{}.y4m", sequence, mode.as_str(), support);
                video_io::write_y4m(recon, &args.out_dir.join(name), PixelFormat::C420)?;
            }
            reports.push(MetricReport {
                sequence: sequence.clone(),
                mode: mode.as_str().to_string(),
                support,
                psnr,
                ssim,
            });
            Ok(())
        };

        // The single-frame baseline is always computed: it doubles as the
        // pre-reconstruction stage of the bidirectional pipeline and as the
        // gain reference.
        eprintln!("[{}] sf", sequence);
        let sf_config = build_config(
            Mode::Sf,
            0,
            fsr.clone(),
            me.clone(),
            args.schedule,
            args.eq2_literal,
            mf_window,
        );
        let sf = with_thread_pool(args.threads, || {
            pipeline::reconstruct_sf(&sampled, &mask, &sf_config)
        })??;
        if modes.contains(&Mode::Sf) {
            add_report(Mode::Sf, 0, &sf, &mut reports)?;
        }

        for &support in &supports {
            for mode in [Mode::Mf, Mode::Rmf] {
                if !modes.contains(&mode) {
                    continue;
                }
                eprintln!("[{}] {} K={}", sequence, mode.as_str(), support);
                let config = build_config(
                    mode,
                    support,
                    fsr.clone(),
                    me.clone(),
                    args.schedule,
                    args.eq2_literal,
                    mf_window,
                );
                let recon = with_thread_pool(args.threads, || -> nrs_core::Result<VideoBuffer> {
                    match mode {
                        Mode::Mf => {
                            pipeline::reconstruct_mf_with_stage1(&sampled, &mask, &config, sf.frames())
                        }
                        Mode::Rmf => pipeline::reconstruct_rmf(&sampled, &mask, &config),
                        Mode::Sf => unreachable!(),
                    }
                })??;
                add_report(mode, support, &recon, &mut reports)?;
            }
        }
    }

    write_outputs(&args.out_dir, &reports)?;
    eprintln!("results in {}", args.out_dir.display());
    Ok(())
}

fn write_outputs(out_dir: &Path, reports: &[MetricReport]) -> Result<()> {
    let mut metrics_csv = std::fs::File::create(out_dir.join("metrics.csv"))?;
    metrics::write_metrics_csv(reports, &mut metrics_csv)?;

    let mut runs = std::fs::File::create(out_dir.join("runs_summary.csv"))?;
    {
        use std::io::Write;
        writeln!(runs, "sequence,mode,K,mean_psnr_db,mean_ssim")?;
        for r in reports {
            writeln!(
                runs,
                "{},{},{},{},{}",
                r.sequence,
                r.mode,
                r.support,
                metrics::format_psnr(r.mean_psnr()),
                metrics::format_ssim(r.mean_ssim())
            )?;
        }
    }

    if reports.iter().any(|r| r.mode == "sf") && reports.iter().any(|r| r.mode != "sf") {
        let table = metrics::gain_table(reports, "sf")?;
        for mode in table.modes() {
            let mut file = std::fs::File::create(out_dir.join(format!("gains_{mode}.csv")))?;
            metrics::write_gain_csv(&table, &mode, &mut file)?;
        }
        let mut psnr_table = std::fs::File::create(out_dir.join("gain_table_psnr.csv"))?;
        metrics::write_gain_matrix_csv(&table, GainMetric::Psnr, &mut psnr_table)?;
        let mut ssim_table = std::fs::File::create(out_dir.join("gain_table_ssim.csv"))?;
        metrics::write_gain_matrix_csv(&table, GainMetric::Ssim, &mut ssim_table)?;
        let mut plot = std::fs::File::create(out_dir.join("gain_curve.dat"))?;
        metrics::write_gain_plot_dat(&table, &mut plot)?;
    }
    Ok(())
}
