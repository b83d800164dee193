//! The three reconstruction pipelines over a sampled video.
//!
//! * `sf`: every frame reconstructed independently.
//! * `mf`: all frames pre-reconstructed single-frame; motion is estimated
//!   between the dense pre-reconstructions, then the originally acquired
//!   pixels of up to K preceding and K succeeding neighbors are projected in
//!   (nearest frame wins on collision, the preceding one on equal distance)
//!   and the merged frame is reconstructed.
//! * `rmf`: strictly causal; motion estimation runs between the raw sampled
//!   current frame (missing pixels neglected in matching) and the already
//!   reconstructed preceding frames, then the raw acquired pixels of those
//!   preceding frames are projected in and merged with the configured
//!   temporal weighting. Each output immediately becomes a reference for
//!   the next frame.

use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::{Frame, VideoBuffer};
use crate::fsr::{reconstruct_frame, FsrParams};
use crate::merge::{make_schedule, merge_frames, merge_nearest, WeightScheme};
use crate::motion::{compensate, estimate_dense_motion, FrameView, MeParams};
use crate::sampling::{Mask, SampledFrame};

/// Which pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sf,
    Mf,
    Rmf,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Sf => "sf",
            Mode::Mf => "mf",
            Mode::Rmf => "rmf",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "sf" => Ok(Mode::Sf),
            "mf" => Ok(Mode::Mf),
            "rmf" => Ok(Mode::Rmf),
            other => Err(Error::parameter(
                "mode",
                format!("unknown mode `{other}` (expected sf, mf or rmf)"),
            )),
        }
    }
}

/// How the bidirectional pipeline counts its reference window: K preceding
/// plus K succeeding frames, or K references total taken nearest-first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MfWindow {
    #[default]
    Symmetric,
    Total,
}

impl FromStr for MfWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<MfWindow> {
        match s {
            "symmetric" => Ok(MfWindow::Symmetric),
            "total" => Ok(MfWindow::Total),
            other => Err(Error::parameter(
                "mf-window",
                format!("unknown window `{other}` (expected symmetric or total)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub mode: Mode,
    /// Maximum number of support frames K.
    pub support: usize,
    pub fsr: FsrParams,
    pub me: MeParams,
    pub scheme: WeightScheme,
    /// Divide merged pixels by the full schedule weight instead of the
    /// weight of the contributing projections only.
    pub eq2_literal: bool,
    pub mf_window: MfWindow,
}

impl PipelineConfig {
    pub fn new(mode: Mode, support: usize) -> Self {
        PipelineConfig {
            mode,
            support,
            fsr: FsrParams::default(),
            me: MeParams::default(),
            scheme: WeightScheme::Equal,
            eq2_literal: false,
            mf_window: MfWindow::default(),
        }
    }

    /// A multi-frame mode without support frames degenerates to the
    /// single-frame pipeline.
    pub fn normalized(mut self) -> Self {
        if self.support == 0 {
            self.mode = Mode::Sf;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.fsr.validate()?;
        self.me.validate()?;
        if self.mode != Mode::Sf && self.support == 0 {
            return Err(Error::parameter(
                "support",
                "multi-frame modes need at least one support frame",
            ));
        }
        Ok(())
    }
}

fn sampled(frame: &Frame, mask: &Mask) -> SampledFrame {
    SampledFrame {
        frame: frame.clone(),
        mask: mask.clone(),
    }
}

fn check_video(video: &VideoBuffer, mask: &Mask) -> Result<()> {
    if video.width() != mask.width() || video.height() != mask.height() {
        return Err(Error::DimensionMismatch {
            expected_width: mask.width(),
            expected_height: mask.height(),
            width: video.width(),
            height: video.height(),
        });
    }
    Ok(())
}

/// Single-frame pipeline: frames are independent and processed in parallel.
pub fn reconstruct_sf(video: &VideoBuffer, mask: &Mask, config: &PipelineConfig) -> Result<VideoBuffer> {
    config.validate()?;
    check_video(video, mask)?;
    let frames: Result<Vec<Frame>> = video
        .frames()
        .par_iter()
        .map(|f| reconstruct_frame(&sampled(f, mask), None, &config.fsr))
        .collect();
    VideoBuffer::with_fps(frames?, video.fps)
}

/// Reference offsets for frame `t` of `total` frames: nearest first, the
/// preceding frame before the succeeding one on equal distance.
fn mf_reference_offsets(t: usize, total: usize, support: usize, window: MfWindow) -> Vec<isize> {
    let mut offsets = Vec::new();
    for k in 1..=support {
        if t >= k {
            offsets.push(-(k as isize));
        }
        if t + k < total {
            offsets.push(k as isize);
        }
    }
    if window == MfWindow::Total {
        offsets.truncate(support);
    }
    offsets
}

/// Bidirectional multi-frame pipeline with an explicit pre-reconstruction
/// stage. `stage1` must hold the single-frame reconstruction of every frame;
/// [`reconstruct_mf`] computes it on the fly, the sweep driver reuses its
/// baseline run.
pub fn reconstruct_mf_with_stage1(
    video: &VideoBuffer,
    mask: &Mask,
    config: &PipelineConfig,
    stage1: &[Frame],
) -> Result<VideoBuffer> {
    config.validate()?;
    check_video(video, mask)?;
    if stage1.len() != video.len() {
        return Err(Error::parameter(
            "stage1",
            "pre-reconstruction frame count mismatch",
        ));
    }
    let total = video.len();
    let frames: Result<Vec<Frame>> = (0..total)
        .into_par_iter()
        .map(|t| {
            let mut projections = Vec::new();
            for offset in mf_reference_offsets(t, total, config.support, config.mf_window) {
                let ref_index = (t as isize + offset) as usize;
                // Vectors come from the dense pre-reconstructed pair; the
                // projection carries only the neighbor's originally acquired
                // pixels (its reconstructed fill holds no new information).
                let field = estimate_dense_motion(
                    FrameView::full(&stage1[t]),
                    FrameView::full(&stage1[ref_index]),
                    &config.me,
                )?;
                projections.push(compensate(
                    FrameView::masked(video.frame(ref_index), mask),
                    &field,
                    offset.unsigned_abs(),
                )?);
            }
            let current = sampled(video.frame(t), mask);
            let merged = merge_nearest(&current, &projections)?;
            reconstruct_frame(
                &SampledFrame {
                    frame: merged.values,
                    mask: mask.clone(),
                },
                Some(&merged.class),
                &config.fsr,
            )
        })
        .collect();
    VideoBuffer::with_fps(frames?, video.fps)
}

/// Bidirectional multi-frame pipeline (pre-reconstruction included).
pub fn reconstruct_mf(video: &VideoBuffer, mask: &Mask, config: &PipelineConfig) -> Result<VideoBuffer> {
    let stage1 = reconstruct_sf(video, mask, &PipelineConfig {
        mode: Mode::Sf,
        ..config.clone()
    })?;
    reconstruct_mf_with_stage1(video, mask, config, stage1.frames())
}

/// Recursive multi-frame pipeline: strictly sequential over frames, causal.
pub fn reconstruct_rmf(video: &VideoBuffer, mask: &Mask, config: &PipelineConfig) -> Result<VideoBuffer> {
    config.validate()?;
    check_video(video, mask)?;
    let schedule = make_schedule(config.support, config.scheme)?;
    let mut outputs: Vec<Frame> = Vec::with_capacity(video.len());

    for t in 0..video.len() {
        let current = sampled(video.frame(t), mask);
        let output = if t == 0 {
            // No preceding frames: plain single-frame reconstruction.
            reconstruct_frame(&current, None, &config.fsr)?
        } else {
            let mut projections = Vec::with_capacity(config.support.min(t));
            for k in 1..=config.support.min(t) {
                // Vectors are matched against the already reconstructed
                // (dense, recursively improved) reference; the projection
                // itself carries the raw acquired pixels of that frame.
                let field = estimate_dense_motion(
                    FrameView::from(&current),
                    FrameView::full(&outputs[t - k]),
                    &config.me,
                )?;
                projections.push(compensate(
                    FrameView::masked(video.frame(t - k), mask),
                    &field,
                    k,
                )?);
            }
            let merged = merge_frames(&current, &projections, &schedule, config.eq2_literal)?;
            reconstruct_frame(
                &SampledFrame {
                    frame: merged.values,
                    mask: mask.clone(),
                },
                Some(&merged.class),
                &config.fsr,
            )?
        };
        outputs.push(output);
    }
    VideoBuffer::with_fps(outputs, video.fps)
}

/// Runs the pipeline selected by the (normalized) configuration.
pub fn run(video: &VideoBuffer, mask: &Mask, config: &PipelineConfig) -> Result<VideoBuffer> {
    let config = config.clone().normalized();
    match config.mode {
        Mode::Sf => reconstruct_sf(video, mask, &config),
        Mode::Mf => reconstruct_mf(video, mask, &config),
        Mode::Rmf => reconstruct_rmf(video, mask, &config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{apply_mask, generate_quadrant_mask};
    use crate::video_io::synthetic_texture;

    fn test_fsr() -> FsrParams {
        FsrParams {
            block_size: 4,
            border_width: 6,
            fft_size: 16,
            iterations: 40,
            ..FsrParams::default()
        }
    }

    fn test_me() -> MeParams {
        MeParams {
            window: 9,
            search_range: 4,
            min_overlap: 6,
        }
    }

    fn test_config(mode: Mode, support: usize) -> PipelineConfig {
        PipelineConfig {
            fsr: test_fsr(),
            me: test_me(),
            ..PipelineConfig::new(mode, support)
        }
    }

    fn sampled_video(frames: usize, size: usize, seed: u64) -> (VideoBuffer, Mask, VideoBuffer) {
        let base = synthetic_texture(size + 2 * frames, size, seed);
        let original =
            crate::video_io::synthesize_sequence(crate::video_io::MotionKind::Translate, &base, frames, 2.0)
                .unwrap();
        let mask = generate_quadrant_mask(original.width(), original.height(), seed).unwrap();
        let sampled_frames: Vec<Frame> = original
            .frames()
            .iter()
            .map(|f| apply_mask(f, &mask).unwrap().frame)
            .collect();
        let sampled = VideoBuffer::with_fps(sampled_frames, original.fps).unwrap();
        (sampled, mask, original)
    }

    #[test]
    fn sf_single_frame_matches_direct_call() {
        let (video, mask, _) = sampled_video(1, 24, 3);
        let config = test_config(Mode::Sf, 0);
        let out = reconstruct_sf(&video, &mask, &config).unwrap();
        let direct =
            reconstruct_frame(&sampled(video.frame(0), &mask), None, &config.fsr).unwrap();
        assert_eq!(out.frame(0), &direct);
    }

    #[test]
    fn sf_frames_independent() {
        let (video, mask, _) = sampled_video(3, 24, 4);
        let config = test_config(Mode::Sf, 0);
        let out = reconstruct_sf(&video, &mask, &config).unwrap();
        let reversed = VideoBuffer::with_fps(
            video.frames().iter().rev().cloned().collect(),
            video.fps,
        )
        .unwrap();
        let out_rev = reconstruct_sf(&reversed, &mask, &config).unwrap();
        for t in 0.. 3 {
            assert_eq!(out.frame(t), out_rev.frame(2 - t));
        }
    }

    #[test]
    fn fully_acquired_video_identity() {
        let frames: Vec<Frame> = (0..2)
            .map(|t| Frame::from_fn(16, 16, |m, n| ((m + n + t) % 256) as f64))
            .collect();
        let video = VideoBuffer::new(frames).unwrap();
        let mask = Mask::from_grid(16, 16, vec![true; 256]).unwrap();
        let out = reconstruct_sf(&video, &mask, &test_config(Mode::Sf, 0)).unwrap();
        assert_eq!(out.frames(), video.frames());
    }

    #[test]
    fn acquired_pixels_preserved_all_pipelines() {
        let (video, mask, _) = sampled_video(4, 24, 5);
        for (mode, support) in [(Mode::Sf, 0), (Mode::Mf, 2), (Mode::Rmf, 2)] {
            let out = run(&video, &mask, &test_config(mode, support)).unwrap();
            for t in 0..video.len() {
                for m in 0..video.height() {
                    for n in 0..video.width() {
                        if mask.is_acquired(m, n) {
                            assert_eq!(
                                out.frame(t).get(m, n),
                                video.frame(t).get(m, n),
                                "mode {:?} frame {t} pixel ({m},{n})",
                                mode
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mf_window_shrinks_at_sequence_ends() {
        assert_eq!(mf_reference_offsets(0, 10, 2, MfWindow::Symmetric), vec![1, 2]);
        assert_eq!(
            mf_reference_offsets(5, 10, 2, MfWindow::Symmetric),
            vec![-1, 1, -2, 2]
        );
        assert_eq!(mf_reference_offsets(9, 10, 2, MfWindow::Symmetric), vec![-1, -2]);
        assert_eq!(
            mf_reference_offsets(5, 10, 3, MfWindow::Total),
            vec![-1, 1, -2]
        );
    }

    #[test]
    fn static_video_mf_equals_sf() {
        // With a fixed mask and zero motion, every projection duplicates the
        // current frame's own sampling pattern, so the merged frame equals
        // the sampled frame and the multi-frame output equals single-frame.
        let frame = synthetic_texture(24, 24, 9);
        let mask = generate_quadrant_mask(24, 24, 9).unwrap();
        let sampled_frame = apply_mask(&frame, &mask).unwrap().frame;
        let video = VideoBuffer::new(vec![sampled_frame; 3]).unwrap();
        let sf = reconstruct_sf(&video, &mask, &test_config(Mode::Sf, 0)).unwrap();
        let mf = reconstruct_mf(&video, &mask, &test_config(Mode::Mf, 1)).unwrap();
        for t in 0..3 {
            assert_eq!(mf.frame(t), sf.frame(t), "frame {t}");
        }
    }

    #[test]
    fn translating_mf_beats_sf_on_middle_frame() {
        let (video, mask, original) = sampled_video(3, 32, 11);
        let sf = reconstruct_sf(&video, &mask, &test_config(Mode::Sf, 0)).unwrap();
        let mf = reconstruct_mf(&video, &mask, &test_config(Mode::Mf, 1)).unwrap();
        let psnr_sf = crate::metrics::psnr(original.frame(1), sf.frame(1), 4).unwrap();
        let psnr_mf = crate::metrics::psnr(original.frame(1), mf.frame(1), 4).unwrap();
        assert!(
            psnr_mf > psnr_sf,
            "mf {psnr_mf:.2} dB should beat sf {psnr_sf:.2} dB"
        );
    }

    #[test]
    fn rmf_first_frame_is_single_frame() {
        let (video, mask, _) = sampled_video(2, 24, 6);
        let rmf = reconstruct_rmf(&video, &mask, &test_config(Mode::Rmf, 2)).unwrap();
        let sf = reconstruct_sf(&video, &mask, &test_config(Mode::Sf, 0)).unwrap();
        assert_eq!(rmf.frame(0), sf.frame(0));
    }

    #[test]
    fn rmf_prefix_causality() {
        let (video, mask, _) = sampled_video(5, 24, 7);
        let config = test_config(Mode::Rmf, 3);
        let full = reconstruct_rmf(&video, &mask, &config).unwrap();
        for t_count in [1usize, 3] {
            let prefix = video.truncated(t_count).unwrap();
            let out = reconstruct_rmf(&prefix, &mask, &config).unwrap();
            for t in 0..t_count {
                assert_eq!(out.frame(t), full.frame(t), "prefix {t_count} frame {t}");
            }
        }
    }

    #[test]
    fn k_zero_multiframe_degenerates_to_sf() {
        let (video, mask, _) = sampled_video(2, 24, 8);
        let sf = run(&video, &mask, &test_config(Mode::Sf, 0)).unwrap();
        let mf0 = run(&video, &mask, &test_config(Mode::Mf, 0)).unwrap();
        let rmf0 = run(&video, &mask, &test_config(Mode::Rmf, 0)).unwrap();
        assert_eq!(sf, mf0);
        assert_eq!(sf, rmf0);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let (video, mask, _) = sampled_video(3, 24, 10);
        let config = test_config(Mode::Rmf, 2);
        let run_with = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run(&video, &mask, &config).unwrap())
        };
        assert_eq!(run_with(1), run_with(3));
    }

    #[test]
    fn rejects_mode_k_mismatch() {
        let config = test_config(Mode::Rmf, 1);
        let mut bad = config;
        bad.support = 0;
        assert!(bad.validate().is_err());
        assert_eq!(bad.clone().normalized().mode, Mode::Sf);
    }
}
