//! Quadrant-based non-regular sampling mask and its application to frames.
//!
//! The simulated sensor keeps exactly one pixel of every aligned 2x2 cell;
//! the other three are covered. Which quadrant survives is chosen per cell
//! by a seeded generator, so the pattern is random but exactly reproducible.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::frame::Frame;

/// Boolean grid of acquired positions. `true` marks set A (originally
/// acquired), `false` set B (missing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    acquired: Vec<bool>,
}

/// A frame as produced by the masked sensor: samples at acquired positions,
/// zeros elsewhere. The zeros are placeholders and must never be read as
/// signal; every consumer goes through the mask.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFrame {
    pub frame: Frame,
    pub mask: Mask,
}

/// SplitMix64 mixing function. Small, portable and well studied; the mask
/// pattern must be bit-identical across platforms, so no external RNG is
/// used here.
#[inline]
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_even_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 || width % 2 != 0 || height % 2 != 0 {
        return Err(Error::InvalidDimensions {
            width,
            height,
            reason: "mask dimensions must be even and positive",
        });
    }
    Ok(())
}

impl Mask {
    /// Builds a mask from an explicit grid. Only the dimension invariant is
    /// enforced; arbitrary patterns (including all-false) are representable
    /// so that externally supplied mask files can be loaded.
    pub fn from_grid(width: usize, height: usize, acquired: Vec<bool>) -> Result<Self> {
        check_even_dims(width, height)?;
        if acquired.len() != width * height {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "bit count does not match dimensions",
            });
        }
        Ok(Mask {
            width,
            height,
            acquired,
        })
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
    pub fn is_acquired(&self, row: usize, col: usize) -> bool {
        self.acquired[row * self.width + col]
    }

    pub fn bits(&self) -> &[bool] {
        &self.acquired
    }

    pub fn acquired_count(&self) -> usize {
        self.acquired.iter().filter(|&&b| b).count()
    }

    /// True when every aligned 2x2 cell contains exactly one acquired pixel
    /// (the quadrant sampling law; implies exactly 25% density).
    pub fn is_quadrant_pattern(&self) -> bool {
        for cy in 0..self.height / 2 {
            for cx in 0..self.width / 2 {
                let mut count = 0;
                for dy in 0..2 {
                    for dx in 0..2 {
                        if self.is_acquired(2 * cy + dy, 2 * cx + dx) {
                            count += 1;
                        }
                    }
                }
                if count != 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Writes the mask in the NRSMASK1 format: magic line, ASCII dimensions,
    /// then all `width*height` bits row-major, packed 8 per byte MSB first.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "NRSMASK1")?;
        writeln!(w, "{} {}", self.width, self.height)?;
        let mut byte = 0u8;
        let mut filled = 0;
        for &bit in &self.acquired {
            byte = (byte << 1) | u8::from(bit);
            filled += 1;
            if filled == 8 {
                w.write_all(&[byte])?;
                byte = 0;
                filled = 0;
            }
        }
        if filled > 0 {
            byte <<= 8 - filled;
            w.write_all(&[byte])?;
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
        if magic.trim_end() != "NRSMASK1" {
            return Err(Error::format(path, "missing NRSMASK1 magic"));
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
        check_even_dims(width, height)
            .map_err(|_| Error::format(path, "dimensions must be even and positive"))?;

        let total = width * height;
        let mut packed = vec![0u8; total.div_ceil(8)];
        reader
            .read_exact(&mut packed)
            .map_err(|_| Error::truncated(path, "mask bits shorter than dimensions"))?;
        let mut acquired = Vec::with_capacity(total);
        for i in 0..total {
            acquired.push(packed[i / 8] & (0x80 >> (i % 8)) != 0);
        }
        Mask::from_grid(width, height, acquired)
    }

    /// PBM-style ASCII dump (P1), `1` = acquired. Human-inspectable fixture
    /// companion to the packed format.
    pub fn write_pbm(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "P1")?;
        writeln!(w, "{} {}", self.width, self.height)?;
        for row in 0..self.height {
            let line: Vec<&str> = (0..self.width)
                .map(|col| if self.is_acquired(row, col) { "1" } else { "0" })
                .collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Generates the fixed quadrant mask: one uniformly chosen quadrant of each
/// 2x2 cell is acquired, independently per cell, deterministic in `seed`.
pub fn generate_quadrant_mask(width: usize, height: usize, seed: u64) -> Result<Mask> {
    check_even_dims(width, height)?;
    let cells_x = width / 2;
    let cells_y = height / 2;
    let mut acquired = vec![false; width * height];
    for cy in 0..cells_y {
        for cx in 0..cells_x {
            let cell_index = (cy * cells_x + cx) as u64;
            // Counter-based SplitMix64 stream: element `cell_index` of the
            // sequence seeded with `seed`. Top two bits pick the quadrant.
            let r = splitmix64(seed.wrapping_add(cell_index.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            let quadrant = (r >> 62) as usize;
            let (dy, dx) = (quadrant >> 1, quadrant & 1);
            acquired[(2 * cy + dy) * width + (2 * cx + dx)] = true;
        }
    }
    Ok(Mask {
        width,
        height,
        acquired,
    })
}

/// Applies a mask to a full frame: acquired positions keep their value,
/// missing positions are set to 0.
pub fn apply_mask(full: &Frame, mask: &Mask) -> Result<SampledFrame> {
    full.check_dims(mask.width, mask.height)?;
    let mut frame = Frame::new(mask.width, mask.height);
    for row in 0..mask.height {
        for col in 0..mask.width {
            if mask.is_acquired(row, col) {
                frame.set(row, col, full.get(row, col));
            }
        }
    }
    Ok(SampledFrame {
        frame,
        mask: mask.clone(),
    })
}

impl SampledFrame {
    pub fn width(&self) -> usize {
        self.frame.width()
    }

    pub fn height(&self) -> usize {
        self.frame.height()
    }
}
