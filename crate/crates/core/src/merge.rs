//! Merging of motion-compensated projections into the current sampled
//! frame.
//!
//! Originally acquired pixels always pass through unchanged; only missing
//! positions receive projected values. The weighted variant averages all
//! projections that reach a position, the nearest variant keeps the
//! temporally closest one (used by the bidirectional baseline).

use std::io::Write;

use crate::error::{Error, Result};
use crate::frame::{ClassGrid, Frame, SampleClass};
use crate::sampling::SampledFrame;

/// A reference frame motion-compensated into the current frame's
/// coordinates, with its temporal distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedFrame {
    values: Frame,
    valid: Vec<bool>,
    source_distance: usize,
}

impl ProjectedFrame {
    pub fn new(values: Frame, valid: Vec<bool>, source_distance: usize) -> Result<Self> {
        if valid.len() != values.width() * values.height() {
            return Err(Error::parameter(
                "valid",
                "validity mask does not match frame dimensions",
            ));
        }
        if source_distance == 0 {
            return Err(Error::parameter("source_distance", "must be at least 1"));
        }
        debug_assert!(
            values
                .samples()
                .iter()
                .zip(&valid)
                .all(|(v, &ok)| !ok || v.is_finite()),
            "valid projected pixel with non-finite value"
        );
        Ok(ProjectedFrame {
            values,
            valid,
            source_distance,
        })
    }

    pub fn values(&self) -> &Frame {
        &self.values
    }

    #[inline]
    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.valid[row * self.values.width() + col]
    }

    pub fn source_distance(&self) -> usize {
        self.source_distance
    }

    pub fn width(&self) -> usize {
        self.values.width()
    }

    pub fn height(&self) -> usize {
        self.values.height()
    }
}

/// How projections are weighted by temporal distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    Equal,
    LinearDecreasing,
}

/// Weights `w_k` for temporal distances `k = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSchedule {
    scheme: WeightScheme,
    weights: Vec<f64>,
}

impl WeightSchedule {
    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn max_distance(&self) -> usize {
        self.weights.len()
    }

    /// Weight for temporal distance `k` (1-based).
    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k - 1]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Builds the weight schedule for up to `k_max` support frames: equal
/// weights of 1, or linearly decreasing `w_k = (K - k + 1) / K`.
pub fn make_schedule(k_max: usize, scheme: WeightScheme) -> Result<WeightSchedule> {
    if k_max == 0 {
        return Err(Error::parameter("K", "must be at least 1"));
    }
    let weights = (1..=k_max)
        .map(|k| match scheme {
            WeightScheme::Equal => 1.0,
            WeightScheme::LinearDecreasing => (k_max - k + 1) as f64 / k_max as f64,
        })
        .collect();
    Ok(WeightSchedule { scheme, weights })
}

/// The densified current frame: acquired samples, projected estimates and
/// the positions still missing.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedFrame {
    pub values: Frame,
    /// Acquired / Reconstructed (= projected) / Missing per position.
    pub class: ClassGrid,
    contributor_count: Vec<u16>,
}

impl MergedFrame {
    pub fn contributor_count(&self, row: usize, col: usize) -> u16 {
        self.contributor_count[row * self.values.width() + col]
    }

    /// Debug dump of the class grid as a P5 PGM: 0 = missing,
    /// 128 = projected, 255 = acquired.
    pub fn write_class_pgm(&self, mut w: impl Write) -> Result<()> {
        let (width, height) = (self.values.width(), self.values.height());
        write!(w, "P5\n{} {}\n255\n", width, height)?;
        let bytes: Vec<u8> = self
            .class
            .classes()
            .iter()
            .map(|c| match c {
                SampleClass::Missing => 0u8,
                SampleClass::Reconstructed => 128,
                SampleClass::Acquired => 255,
            })
            .collect();
        w.write_all(&bytes)?;
        Ok(())
    }
}

fn check_projection_dims(current: &SampledFrame, projections: &[ProjectedFrame]) -> Result<()> {
    for p in projections {
        if p.width() != current.width() || p.height() != current.height() {
            return Err(Error::DimensionMismatch {
                expected_width: current.width(),
                expected_height: current.height(),
                width: p.width(),
                height: p.height(),
            });
        }
    }
    Ok(())
}

/// Weighted merge of all valid projections into the missing positions of
/// `current`.
///
/// With `full_denominator` set, the weighted sum is divided by the total
/// schedule weight regardless of how many projections actually reach a
/// pixel (pixels reached by fewer frames shrink toward zero); by default
/// the denominator only counts the contributing projections.
pub fn merge_frames(
    current: &SampledFrame,
    projections: &[ProjectedFrame],
    schedule: &WeightSchedule,
    full_denominator: bool,
) -> Result<MergedFrame> {
    check_projection_dims(current, projections)?;
    let k_max = schedule.max_distance();
    if projections.len() > k_max {
        return Err(Error::parameter(
            "projections",
            format!("more projections ({}) than schedule weights ({})", projections.len(), k_max),
        ));
    }
    for p in projections {
        if p.source_distance() > k_max {
            return Err(Error::parameter(
                "projections",
                format!(
                    "projection distance {} exceeds schedule maximum {}",
                    p.source_distance(),
                    k_max
                ),
            ));
        }
    }

    let (width, height) = (current.width(), current.height());
    // Per-pixel sums accumulate in ascending temporal distance so the
    // result does not depend on the order of the projection list.
    let mut order: Vec<usize> = (0..projections.len()).collect();
    order.sort_by_key(|&i| (projections[i].source_distance(), i));
    let total_weight: f64 = schedule.weights().iter().take(k_max).sum();

    let mut values = current.frame.clone();
    let mut class = ClassGrid::filled(width, height, SampleClass::Missing);
    let mut contributor_count = vec![0u16; width * height];

    for row in 0..height {
        for col in 0..width {
            if current.mask.is_acquired(row, col) {
                class.set(row, col, SampleClass::Acquired);
                continue;
            }
            let mut num = 0.0;
            let mut den = 0.0;
            let mut count = 0u16;
            for &i in &order {
                let p = &projections[i];
                if p.is_valid(row, col) {
                    let w = schedule.weight(p.source_distance());
                    num += w * p.values().get(row, col);
                    den += w;
                    count += 1;
                }
            }
            if count > 0 {
                let denominator = if full_denominator { total_weight } else { den };
                values.set(row, col, num / denominator);
                class.set(row, col, SampleClass::Reconstructed);
                contributor_count[row * width + col] = count;
            }
        }
    }

    Ok(MergedFrame {
        values,
        class,
        contributor_count,
    })
}

/// Nearest-frame merge: at each missing position the valid projection with
/// the smallest temporal distance wins; equal distances resolve to the
/// earlier list entry.
pub fn merge_nearest(
    current: &SampledFrame,
    projections: &[ProjectedFrame],
) -> Result<MergedFrame> {
    check_projection_dims(current, projections)?;
    let (width, height) = (current.width(), current.height());
    let mut order: Vec<usize> = (0..projections.len()).collect();
    order.sort_by_key(|&i| (projections[i].source_distance(), i));

    let mut values = current.frame.clone();
    let mut class = ClassGrid::filled(width, height, SampleClass::Missing);
    let mut contributor_count = vec![0u16; width * height];

    for row in 0..height {
        for col in 0..width {
            if current.mask.is_acquired(row, col) {
                class.set(row, col, SampleClass::Acquired);
                continue;
            }
            for &i in &order {
                let p = &projections[i];
                if p.is_valid(row, col) {
                    values.set(row, col, p.values().get(row, col));
                    class.set(row, col, SampleClass::Reconstructed);
                    contributor_count[row * width + col] = 1;
                    break;
                }
            }
        }
    }

    Ok(MergedFrame {
        values,
        class,
        contributor_count,
    })
}
