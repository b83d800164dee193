use crate::error::{Error, Result};

/// A full-resolution luma plane with real-valued samples, row-major.
///
/// All internal processing stays in `f64`; quantization to 8 bit happens
/// only at file boundaries (see [`crate::video_io`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Frame {
    pub fn new(width: usize, height: usize) -> Self {
        Frame {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_data(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "sample count does not match dimensions",
            });
        }
        Ok(Frame {
            width,
            height,
            data,
        })
    }

    /// Builds a frame by evaluating `f(row, col)` at every position.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for m in 0..height {
            for n in 0..width {
                data.push(f(m, n));
            }
        }
        Frame {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col] = value;
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn same_dims(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_dims(&self, width: usize, height: usize) -> Result<()> {
        if self.width != width || self.height != height {
            return Err(Error::DimensionMismatch {
                expected_width: width,
                expected_height: height,
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }
}

/// Classification of a pixel position during reconstruction.
///
/// `Acquired` positions carry original sensor samples, `Reconstructed`
/// positions carry estimates (filled by earlier blocks of the current frame
/// or projected from neighboring frames), `Missing` positions carry no
/// information at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum SampleClass {
    Missing = 0,
    Reconstructed = 1,
    Acquired = 2,
}

/// Per-pixel [`SampleClass`] grid matching a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGrid {
    width: usize,
    height: usize,
    classes: Vec<SampleClass>,
}

impl ClassGrid {
    pub fn filled(width: usize, height: usize, class: SampleClass) -> Self {
        ClassGrid {
            width,
            height,
            classes: vec![class; width * height],
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> SampleClass {
        self.classes[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, class: SampleClass) {
        self.classes[row * self.width + col] = class;
    }

    pub fn classes(&self) -> &[SampleClass] {
        &self.classes
    }
}

/// An ordered sequence of frames with constant dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoBuffer {
    frames: Vec<Frame>,
    /// Frame rate as numerator:denominator, preserved across read/write.
    pub fps: (u32, u32),
}

impl VideoBuffer {
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        Self::with_fps(frames, (25, 1))
    }

    pub fn with_fps(frames: Vec<Frame>, fps: (u32, u32)) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::EmptyVideo);
        }
        let (w, h) = (frames[0].width(), frames[0].height());
        for f in &frames {
            f.check_dims(w, h)?;
        }
        Ok(VideoBuffer { frames, fps })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, t: usize) -> &Frame {
        &self.frames[t]
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    /// Keeps only the first `count` frames.
    pub fn truncated(&self, count: usize) -> Result<VideoBuffer> {
        VideoBuffer::with_fps(self.frames[..count.min(self.frames.len())].to_vec(), self.fps)
    }
}
