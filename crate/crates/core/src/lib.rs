//! Simulation and reconstruction of non-regularly sampled video.
//!
//! A quadrant mask keeps one random pixel of every 2x2 cell (25% density),
//! emulating a masked low resolution sensor. The missing 75% are filled by
//! frequency selective reconstruction (FSR): a block-wise greedy sparse
//! Fourier model fitted to the available samples. Three pipelines are
//! provided:
//!
//! * `sf`  — every frame reconstructed on its own,
//! * `mf`  — bidirectional multi-frame: pre-reconstruct all frames, project
//!   pixels from up to K preceding and K succeeding neighbors (nearest wins),
//! * `rmf` — recursive multi-frame: motion estimation runs between the raw
//!   sampled frame and already reconstructed preceding frames, projections
//!   are merged with temporal-distance weights, no pre-reconstruction pass.
//!
//! [`metrics`] evaluates PSNR/SSIM with a border margin and aggregates gains
//! against the single-frame baseline.

#[doc(hidden)]
pub mod bruteforce;
pub mod error;
pub mod frame;
pub mod fsr;
pub mod merge;
pub mod metrics;
pub mod motion;
pub mod pipeline;
pub mod sampling;
pub mod video_io;

pub use error::{Error, Result};
pub use frame::{Frame, SampleClass, VideoBuffer};
pub use fsr::FsrParams;
pub use merge::{MergedFrame, ProjectedFrame, WeightScheme, WeightSchedule};
pub use motion::{MeParams, MotionField};
pub use pipeline::{Mode, PipelineConfig};
pub use sampling::{Mask, SampledFrame};
