//! Shared fixtures for the criterion benchmarks.

use nrs_core::sampling::{apply_mask, generate_quadrant_mask};
use nrs_core::video_io::synthetic_texture;
use nrs_core::{Frame, Mask, SampledFrame};

pub fn sampled_texture(size: usize, seed: u64) -> SampledFrame {
    let frame = synthetic_texture(size, size, seed);
    let mask = generate_quadrant_mask(size, size, seed ^ 0xBEEF).unwrap();
    apply_mask(&frame, &mask).unwrap()
}

pub fn shifted_pair(size: usize, seed: u64, shift: usize) -> (Frame, Frame) {
    let base = synthetic_texture(size + shift, size, seed);
    let current = Frame::from_fn(size, size, |m, n| base.get(m, n + shift));
    let reference = Frame::from_fn(size, size, |m, n| base.get(m, n));
    (current, reference)
}

pub fn quadrant_mask(size: usize, seed: u64) -> Mask {
    generate_quadrant_mask(size, size, seed).unwrap()
}
