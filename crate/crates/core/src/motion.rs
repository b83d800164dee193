//! Mask-aware dense block motion estimation and motion-compensated
//! projection.
//!
//! Every pixel gets its own integer displacement, found by exhaustive search
//! over a square candidate range. The matching cost is the mean absolute
//! difference over window positions that are valid in both frames, so
//! missing pixels of a non-regularly sampled frame simply drop out of the
//! matching. Candidates with too little joint support are rejected.
//!
//! The search is organized per candidate displacement: one pass builds
//! summed-area tables of the masked absolute differences and of the joint
//! validity counts, then every pixel reads its window sums in O(1). Winners
//! are kept under a strict total order (cost, |dm|+|dn|, dn, dm), which
//! makes the result independent of candidate enumeration and of how the
//! candidate set is split across threads.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::merge::ProjectedFrame;
use crate::sampling::{Mask, SampledFrame};

/// Matching parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeParams {
    /// Side length of the square matching window, odd.
    pub window: usize,
    /// Maximum displacement magnitude per axis.
    pub search_range: usize,
    /// Minimum number of jointly valid window positions for a candidate to
    /// be considered.
    pub min_overlap: usize,
}

impl Default for MeParams {
    fn default() -> Self {
        MeParams {
            window: 17,
            search_range: 16,
            min_overlap: 16,
        }
    }
}

impl MeParams {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window % 2 == 0 {
            return Err(Error::parameter("window", "must be odd and at least 3"));
        }
        if self.min_overlap == 0 {
            return Err(Error::parameter("min_overlap", "must be at least 1"));
        }
        if self.search_range > i16::MAX as usize {
            return Err(Error::parameter("search_range", "too large"));
        }
        Ok(())
    }
}

/// A frame together with an optional validity mask. Lets the estimator and
/// the projector accept both fully valid reconstructed frames and raw
/// sampled frames.
#[derive(Debug, Clone, Copy)]
pub struct FrameView<'a> {
    frame: &'a Frame,
    mask: Option<&'a Mask>,
}

impl<'a> FrameView<'a> {
    pub fn full(frame: &'a Frame) -> Self {
        FrameView { frame, mask: None }
    }

    pub fn masked(frame: &'a Frame, mask: &'a Mask) -> Self {
        FrameView {
            frame,
            mask: Some(mask),
        }
    }

    pub fn width(&self) -> usize {
        self.frame.width()
    }

    pub fn height(&self) -> usize {
        self.frame.height()
    }

    #[inline]
    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.mask.map_or(true, |m| m.is_acquired(row, col))
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.frame.get(row, col)
    }
}

impl<'a> From<&'a Frame> for FrameView<'a> {
    fn from(frame: &'a Frame) -> Self {
        FrameView::full(frame)
    }
}

impl<'a> From<&'a SampledFrame> for FrameView<'a> {
    fn from(sampled: &'a SampledFrame) -> Self {
        FrameView::masked(&sampled.frame, &sampled.mask)
    }
}

/// Dense per-pixel motion field. Vectors are stored at current-frame
/// positions and point into the reference frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionField {
    width: usize,
    height: usize,
    dm: Vec<i16>,
    dn: Vec<i16>,
    valid: Vec<bool>,
    cost: Vec<f32>,
}

impl MotionField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn vector(&self, row: usize, col: usize) -> (i16, i16) {
        let idx = row * self.width + col;
        (self.dm[idx], self.dn[idx])
    }

    #[inline]
    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.valid[row * self.width + col]
    }

    #[inline]
    pub fn cost(&self, row: usize, col: usize) -> f32 {
        self.cost[row * self.width + col]
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Binary dump: `NRSMVF1` magic line, ASCII dims, then little-endian
    /// per-pixel records (dm: i16, dn: i16, valid: u8, cost: f32).
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "NRSMVF1")?;
        writeln!(w, "{} {}", self.width, self.height)?;
        for idx in 0..self.width * self.height {
            w.write_all(&self.dm[idx].to_le_bytes())?;
            w.write_all(&self.dn[idx].to_le_bytes())?;
            w.write_all(&[u8::from(self.valid[idx])])?;
            w.write_all(&self.cost[idx].to_le_bytes())?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut file)?;
        file.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = BufReader::new(std::fs::File::open(path)?);
        let mut magic = String::new();
        reader.read_line(&mut magic)?;
        if magic.trim_end() != "NRSMVF1" {
            return Err(Error::format(path, "missing NRSMVF1 magic"));
        }
        let mut dims = String::new();
        reader.read_line(&mut dims)?;
        let mut it = dims.split_whitespace();
        let width: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::format(path, "bad width"))?;
        let height: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::format(path, "bad height"))?;
        let count = width * height;
        let mut dm = Vec::with_capacity(count);
        let mut dn = Vec::with_capacity(count);
        let mut valid = Vec::with_capacity(count);
        let mut cost = Vec::with_capacity(count);
        let mut rec = [0u8; 9];
        for i in 0..count {
            reader
                .read_exact(&mut rec)
                .map_err(|_| Error::truncated(path, format!("record {i}")))?;
            dm.push(i16::from_le_bytes([rec[0], rec[1]]));
            dn.push(i16::from_le_bytes([rec[2], rec[3]]));
            valid.push(rec[4] != 0);
            cost.push(f32::from_le_bytes([rec[5], rec[6], rec[7], rec[8]]));
        }
        Ok(MotionField {
            width,
            height,
            dm,
            dn,
            valid,
            cost,
        })
    }
}

/// Mean absolute difference over positions valid in both patches. Returns
/// `f64::INFINITY` when fewer than `min_overlap` positions are jointly
/// valid.
pub fn matching_cost(
    cur: &[f64],
    cur_valid: &[bool],
    reference: &[f64],
    ref_valid: &[bool],
    min_overlap: usize,
) -> Result<f64> {
    if cur.len() != reference.len()
        || cur.len() != cur_valid.len()
        || reference.len() != ref_valid.len()
    {
        return Err(Error::parameter("patch", "patch sizes must match"));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..cur.len() {
        if cur_valid[i] && ref_valid[i] {
            sum += (cur[i] - reference[i]).abs();
            count += 1;
        }
    }
    if count < min_overlap {
        return Ok(f64::INFINITY);
    }
    Ok(sum / count as f64)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    cost: f64,
    dm: i16,
    dn: i16,
}

impl Candidate {
    const NONE: Candidate = Candidate {
        cost: f64::INFINITY,
        dm: 0,
        dn: 0,
    };

    /// Strict total order: lower cost wins, ties resolve to smaller
    /// |dm|+|dn|, then smaller dn, then smaller dm.
    #[inline]
    fn beats(&self, other: &Candidate) -> bool {
        if self.cost != other.cost {
            return self.cost < other.cost;
        }
        let self_l1 = (self.dm as i32).abs() + (self.dn as i32).abs();
        let other_l1 = (other.dm as i32).abs() + (other.dn as i32).abs();
        if self_l1 != other_l1 {
            return self_l1 < other_l1;
        }
        if self.dn != other.dn {
            return self.dn < other.dn;
        }
        self.dm < other.dm
    }
}

/// Exhaustive dense motion search between `current` and `reference`.
///
/// Matching windows are clipped at frame borders; a candidate is rejected at
/// a pixel when its joint-valid count drops below `min_overlap` or when it
/// would displace the pixel itself outside the reference frame. Pixels where
/// every candidate is rejected come back invalid.
pub fn estimate_dense_motion(
    current: FrameView<'_>,
    reference: FrameView<'_>,
    params: &MeParams,
) -> Result<MotionField> {
    params.validate()?;
    let width = current.width();
    let height = current.height();
    if reference.width() != width || reference.height() != height {
        return Err(Error::DimensionMismatch {
            expected_width: width,
            expected_height: height,
            width: reference.width(),
            height: reference.height(),
        });
    }

    let range = params.search_range as i32;
    let candidates: Vec<(i32, i32)> = (-range..=range)
        .flat_map(|dm| (-range..=range).map(move |dn| (dm, dn)))
        .collect();

    // Split candidates across threads; each chunk keeps its own per-pixel
    // best and chunks merge under the total order, so the outcome does not
    // depend on the split.
    let threads = rayon::current_num_threads().max(1);
    let chunk_size = candidates.len().div_ceil(threads * 2).max(1);

    let best = candidates
        .par_chunks(chunk_size)
        .map(|chunk| {
            let mut local = vec![Candidate::NONE; width * height];
            let mut scan = CandidateScan::new(width, height, params.window);
            for &(dm, dn) in chunk {
                scan.accumulate(&current, &reference, dm, dn, params.min_overlap, &mut local);
            }
            local
        })
        .reduce(
            || vec![Candidate::NONE; width * height],
            |mut a, b| {
                for (best, cand) in a.iter_mut().zip(b) {
                    if cand.beats(best) {
                        *best = cand;
                    }
                }
                a
            },
        );

    let mut dm = Vec::with_capacity(width * height);
    let mut dn = Vec::with_capacity(width * height);
    let mut valid = Vec::with_capacity(width * height);
    let mut cost = Vec::with_capacity(width * height);
    for cand in &best {
        let ok = cand.cost.is_finite();
        dm.push(if ok { cand.dm } else { 0 });
        dn.push(if ok { cand.dn } else { 0 });
        valid.push(ok);
        cost.push(cand.cost as f32);
    }
    Ok(MotionField {
        width,
        height,
        dm,
        dn,
        valid,
        cost,
    })
}

/// Per-candidate evaluation buffers: summed-area tables over the masked
/// absolute differences and the joint-valid indicator.
struct CandidateScan {
    width: usize,
    height: usize,
    half_window: usize,
    sat_diff: Vec<f64>,
    sat_count: Vec<f64>,
}

impl CandidateScan {
    fn new(width: usize, height: usize, window: usize) -> Self {
        CandidateScan {
            width,
            height,
            half_window: window / 2,
            sat_diff: vec![0.0; (width + 1) * (height + 1)],
            sat_count: vec![0.0; (width + 1) * (height + 1)],
        }
    }

    fn accumulate(
        &mut self,
        current: &FrameView<'_>,
        reference: &FrameView<'_>,
        dm: i32,
        dn: i32,
        min_overlap: usize,
        best: &mut [Candidate],
    ) {
        let (w, h) = (self.width, self.height);
        let stride = w + 1;

        // Joint-valid absolute differences for this displacement; positions
        // whose reference partner falls outside the frame contribute
        // nothing.
        for m in 0..h {
            let rm = m as i32 + dm;
            let row_in = rm >= 0 && (rm as usize) < h;
            for n in 0..w {
                let idx = (m + 1) * stride + (n + 1);
                let mut diff = 0.0;
                let mut count = 0.0;
                if row_in {
                    let rn = n as i32 + dn;
                    if rn >= 0
                        && (rn as usize) < w
                        && current.is_valid(m, n)
                        && reference.is_valid(rm as usize, rn as usize)
                    {
                        diff = (current.value(m, n)
                            - reference.value(rm as usize, rn as usize))
                        .abs();
                        count = 1.0;
                    }
                }
                self.sat_diff[idx] =
                    diff + self.sat_diff[idx - 1] + self.sat_diff[idx - stride]
                        - self.sat_diff[idx - stride - 1];
                self.sat_count[idx] =
                    count + self.sat_count[idx - 1] + self.sat_count[idx - stride]
                        - self.sat_count[idx - stride - 1];
            }
        }

        // The candidate only applies to pixels it keeps inside the
        // reference frame.
        let m_lo = (-dm).max(0) as usize;
        let m_hi = ((h as i32 - dm).min(h as i32)).max(0) as usize;
        let n_lo = (-dn).max(0) as usize;
        let n_hi = ((w as i32 - dn).min(w as i32)).max(0) as usize;
        let hw = self.half_window;

        for m in m_lo..m_hi {
            let top = m.saturating_sub(hw);
            let bottom = (m + hw + 1).min(h);
            for n in n_lo..n_hi {
                let left = n.saturating_sub(hw);
                let right = (n + hw + 1).min(w);
                let count = self.sat_count[bottom * stride + right]
                    - self.sat_count[top * stride + right]
                    - self.sat_count[bottom * stride + left]
                    + self.sat_count[top * stride + left];
                if count < min_overlap as f64 {
                    continue;
                }
                let sum = self.sat_diff[bottom * stride + right]
                    - self.sat_diff[top * stride + right]
                    - self.sat_diff[bottom * stride + left]
                    + self.sat_diff[top * stride + left];
                let cand = Candidate {
                    // Guard against cancellation noise turning an exact-zero
                    // window sum slightly negative.
                    cost: sum.max(0.0) / count,
                    dm: dm as i16,
                    dn: dn as i16,
                };
                let slot = &mut best[m * w + n];
                if cand.beats(slot) {
                    *slot = cand;
                }
            }
        }
    }
}

/// Projects reference pixels along a motion field into the current frame's
/// coordinate system. Output pixels are valid exactly where the field entry
/// is valid and the displaced reference position carries a valid pixel.
pub fn compensate(
    reference: FrameView<'_>,
    field: &MotionField,
    source_distance: usize,
) -> Result<ProjectedFrame> {
    let width = field.width();
    let height = field.height();
    if reference.width() != width || reference.height() != height {
        return Err(Error::DimensionMismatch {
            expected_width: width,
            expected_height: height,
            width: reference.width(),
            height: reference.height(),
        });
    }
    let mut values = Frame::new(width, height);
    let mut valid = vec![false; width * height];
    for m in 0..height {
        for n in 0..width {
            if !field.is_valid(m, n) {
                continue;
            }
            let (dm, dn) = field.vector(m, n);
            let rm = m as i32 + dm as i32;
            let rn = n as i32 + dn as i32;
            debug_assert!(
                rm >= 0 && (rm as usize) < height && rn >= 0 && (rn as usize) < width,
                "valid field entry points outside the reference frame"
            );
            let (rm, rn) = (rm as usize, rn as usize);
            if reference.is_valid(rm, rn) {
                values.set(m, n, reference.value(rm, rn));
                valid[m * width + n] = true;
            }
        }
    }
    ProjectedFrame::new(values, valid, source_distance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{apply_mask, generate_quadrant_mask};
    use proptest::prelude::*;

    fn texture(width: usize, height: usize, seed: u64) -> Frame {
        // Deterministic pseudo-texture with no repeated local patterns.
        Frame::from_fn(width, height, |m, n| {
            let x = (m * 131 + n * 31 + seed as usize * 17) as f64;
            128.0 + 90.0 * (x * 0.37).sin() * ((m as f64 * 0.21).cos() + 0.3)
                + 20.0 * ((n as f64) * 0.13).sin()
        })
    }

    fn shifted_pair(base: &Frame, dm: usize, dn: usize, size: usize) -> (Frame, Frame) {
        // current[m,n] = base[m+dm, n+dn]; reference[m,n] = base[m,n]
        let current = Frame::from_fn(size, size, |m, n| base.get(m + dm, n + dn));
        let reference = Frame::from_fn(size, size, |m, n| base.get(m, n));
        (current, reference)
    }

    #[test]
    fn matching_cost_identical_patches() {
        let vals = vec![1.0, 2.0, 3.0, 4.0];
        let valid = vec![true; 4];
        let c = matching_cost(&vals, &valid, &vals, &valid, 1).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn matching_cost_joint_support_mean() {
        let cur = vec![1.0, 3.0, 5.0, 7.0, 100.0];
        let cur_valid = vec![true, true, true, true, false];
        let reference = vec![0.0, 0.0, 0.0, 0.0, 0.0];
        let ref_valid = vec![true; 5];
        let c = matching_cost(&cur, &cur_valid, &reference, &ref_valid, 1).unwrap();
        assert_eq!(c, 4.0);
    }

    #[test]
    fn matching_cost_rejects_insufficient_overlap() {
        let cur = vec![1.0, 2.0];
        let c = matching_cost(&cur, &[false, false], &cur, &[true, true], 1).unwrap();
        assert!(c.is_infinite());
        let c = matching_cost(&cur, &[true, true], &cur, &[true, true], 3).unwrap();
        assert!(c.is_infinite());
    }

    #[test]
    fn matching_cost_size_mismatch() {
        assert!(matching_cost(&[1.0], &[true], &[1.0, 2.0], &[true, true], 1).is_err());
    }

    #[test]
    fn identical_frames_give_zero_field() {
        let frame = texture(24, 24, 1);
        let params = MeParams {
            window: 5,
            search_range: 3,
            min_overlap: 4,
        };
        let field =
            estimate_dense_motion(FrameView::full(&frame), FrameView::full(&frame), &params)
                .unwrap();
        for m in 0..24 {
            for n in 0..24 {
                assert!(field.is_valid(m, n));
                assert_eq!(field.vector(m, n), (0, 0), "pixel ({m},{n})");
                assert_eq!(field.cost(m, n), 0.0);
            }
        }
    }

    #[test]
    fn constant_frames_tie_break_to_zero() {
        let frame = Frame::from_fn(16, 16, |_, _| 42.0);
        let params = MeParams {
            window: 5,
            search_range: 2,
            min_overlap: 4,
        };
        let field =
            estimate_dense_motion(FrameView::full(&frame), FrameView::full(&frame), &params)
                .unwrap();
        for m in 0..16 {
            for n in 0..16 {
                assert_eq!(field.vector(m, n), (0, 0));
            }
        }
    }

    #[test]
    fn global_shift_recovered() {
        let base = texture(48, 48, 7);
        let (current, reference) = shifted_pair(&base, 2, 0, 40);
        let params = MeParams {
            window: 9,
            search_range: 4,
            min_overlap: 8,
        };
        let field = estimate_dense_motion(
            FrameView::full(&current),
            FrameView::full(&reference),
            &params,
        )
        .unwrap();
        // Interior pixels: window and shift fully inside.
        for m in 8..32 {
            for n in 8..32 {
                assert_eq!(field.vector(m, n), (2, 0), "pixel ({m},{n})");
            }
        }
    }

    #[test]
    fn masked_current_side_recovers_shift() {
        let base = texture(48, 48, 9);
        let (current, reference) = shifted_pair(&base, 0, 3, 40);
        let mask = generate_quadrant_mask(40, 40, 5).unwrap();
        let sampled = apply_mask(&current, &mask).unwrap();
        let params = MeParams {
            window: 11,
            search_range: 4,
            min_overlap: 8,
        };
        let field = estimate_dense_motion(
            FrameView::from(&sampled),
            FrameView::full(&reference),
            &params,
        )
        .unwrap();
        let mut hits = 0;
        let mut total = 0;
        for m in 8..32 {
            for n in 8..32 {
                total += 1;
                if field.vector(m, n) == (0, 3) {
                    hits += 1;
                }
            }
        }
        assert!(
            hits as f64 >= 0.95 * total as f64,
            "recovered {hits}/{total}"
        );
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = Frame::new(8, 8);
        let b = Frame::new(10, 8);
        let params = MeParams::default();
        assert!(
            estimate_dense_motion(FrameView::full(&a), FrameView::full(&b), &params).is_err()
        );
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let base = texture(40, 40, 3);
        let (current, reference) = shifted_pair(&base, 1, 2, 32);
        let params = MeParams {
            window: 7,
            search_range: 3,
            min_overlap: 5,
        };
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                estimate_dense_motion(
                    FrameView::full(&current),
                    FrameView::full(&reference),
                    &params,
                )
                .unwrap()
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn compensate_zero_field_full_reference() {
        let reference = texture(16, 16, 2);
        let params = MeParams {
            window: 5,
            search_range: 1,
            min_overlap: 2,
        };
        let field = estimate_dense_motion(
            FrameView::full(&reference),
            FrameView::full(&reference),
            &params,
        )
        .unwrap();
        let proj = compensate(FrameView::full(&reference), &field, 1).unwrap();
        assert_eq!(proj.values(), &reference);
        assert!((0..16).all(|m| (0..16).all(|n| proj.is_valid(m, n))));
    }

    #[test]
    fn compensate_missing_reference_pixel_is_invalid() {
        let frame = texture(8, 8, 4);
        let mut bits = vec![true; 64];
        bits[3 * 8 + 3] = false;
        let mask = Mask::from_grid(8, 8, bits).unwrap();
        let sampled = apply_mask(&frame, &mask).unwrap();
        let params = MeParams {
            window: 3,
            search_range: 0,
            min_overlap: 1,
        };
        let field =
            estimate_dense_motion(FrameView::full(&frame), FrameView::full(&frame), &params)
                .unwrap();
        let proj = compensate(FrameView::from(&sampled), &field, 1).unwrap();
        assert!(!proj.is_valid(3, 3));
        assert!(proj.is_valid(2, 3));
    }

    #[test]
    fn field_dump_round_trip() {
        let frame = texture(12, 10, 8);
        let params = MeParams {
            window: 5,
            search_range: 2,
            min_overlap: 3,
        };
        let field =
            estimate_dense_motion(FrameView::full(&frame), FrameView::full(&frame), &params)
                .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.nrsmvf");
        field.save(&path).unwrap();
        let loaded = MotionField::load(&path).unwrap();
        assert_eq!(field, loaded);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn matching_cost_symmetric_and_shift_invariant(
            vals in proptest::collection::vec(0.0f64..255.0, 16),
            offset in -50.0f64..50.0,
        ) {
            let cur = &vals[..8];
            let reference = &vals[8..];
            let valid = vec![true; 8];
            let a = matching_cost(cur, &valid, reference, &valid, 1).unwrap();
            let b = matching_cost(reference, &valid, cur, &valid, 1).unwrap();
            prop_assert_eq!(a, b);

            // Adding the same constant to both patches keeps the cost.
            let cur_s: Vec<f64> = cur.iter().map(|v| v + offset).collect();
            let ref_s: Vec<f64> = reference.iter().map(|v| v + offset).collect();
            let c = matching_cost(&cur_s, &valid, &ref_s, &valid, 1).unwrap();
            prop_assert!((a - c).abs() < 1e-9);
        }
    }
}
