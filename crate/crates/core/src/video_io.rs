//! Raw video and still-image I/O plus synthetic test sequences.
//!
//! Y4M is the canonical container (luma read, chroma discarded); planar YUV
//! with explicit dimensions and single-frame PGM are also supported. All
//! samples enter processing as real-valued luma and are quantized back to
//! 8 bit only when written.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::frame::{Frame, VideoBuffer};

/// Chroma layout of a Y4M or planar YUV stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PixelFormat {
    #[default]
    C420,
    C444,
    Mono,
}

impl PixelFormat {
    fn chroma_plane_len(self, width: usize, height: usize) -> usize {
        match self {
            PixelFormat::C420 => (width / 2) * (height / 2),
            PixelFormat::C444 => width * height,
            PixelFormat::Mono => 0,
        }
    }
}

fn luma_to_byte(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

fn frame_from_bytes(bytes: &[u8], width: usize, height: usize) -> Frame {
    Frame::from_data(
        width,
        height,
        bytes.iter().map(|&b| b as f64).collect(),
    )
    .expect("plane length checked by caller")
}

/// Reads a Y4M stream: luma only, 4:2:0 and 4:4:4 (and mono) accepted.
pub fn read_y4m(path: impl AsRef<Path>) -> Result<VideoBuffer> {
    let path = path.as_ref();
    let mut reader = BufReader::new(File::open(path)?);
    read_y4m_from(&mut reader, path)
}

fn read_line(reader: &mut impl Read, path: &Path, what: &str) -> Result<String> {
    let mut line = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        match reader.read_exact(&mut byte) {
            Ok(()) => {
                if byte[0] == b'\n' {
                    break;
                }
                line.push(byte[0]);
                if line.len() > 1024 {
                    return Err(Error::format(path, format!("{what}: header line too long")));
                }
            }
            Err(_) if what == "stream header" && line.is_empty() => {
                return Err(Error::format(path, "empty file"));
            }
            Err(_) => return Err(Error::truncated(path, format!("unterminated {what}"))),
        }
    }
    String::from_utf8(line).map_err(|_| Error::format(path, format!("{what}: not ASCII")))
}

fn read_y4m_from(reader: &mut impl Read, path: &Path) -> Result<VideoBuffer> {
    let header = read_line(reader, path, "stream header")?;
    let mut tokens = header.split(' ');
    if tokens.next() != Some("YUV4MPEG2") {
        return Err(Error::format(path, "missing YUV4MPEG2 signature"));
    }

    let mut width = 0usize;
    let mut height = 0usize;
    let mut fps = (25u32, 1u32);
    let mut format = PixelFormat::C420;
    for token in tokens {
        if token.is_empty() {
            continue;
        }
        let (tag, rest) = token.split_at(1);
        match tag {
            "W" => {
                width = rest
                    .parse()
                    .map_err(|_| Error::format(path, format!("bad width token {token}")))?
            }
            "H" => {
                height = rest
                    .parse()
                    .map_err(|_| Error::format(path, format!("bad height token {token}")))?
            }
            "F" => {
                let mut it = rest.split(':');
                let num = it.next().and_then(|t| t.parse().ok());
                let den = it.next().and_then(|t| t.parse().ok());
                fps = match (num, den) {
                    (Some(n), Some(d)) if d > 0 => (n, d),
                    _ => return Err(Error::format(path, format!("bad frame rate token {token}"))),
                };
            }
            "C" => {
                format = match rest {
                    "420" | "420jpeg" | "420mpeg2" | "420paldv" => PixelFormat::C420,
                    "444" => PixelFormat::C444,
                    "mono" => PixelFormat::Mono,
                    other => {
                        return Err(Error::format(
                            path,
                            format!("unsupported colorspace C{other}"),
                        ))
                    }
                };
            }
            // Interlacing, aspect and extension tokens don't affect luma.
            "I" | "A" | "X" => {}
            _ => return Err(Error::format(path, format!("unsupported header token {token}"))),
        }
    }
    if width == 0 || height == 0 {
        return Err(Error::format(path, "missing W or H in header"));
    }
    if format == PixelFormat::C420 && (width % 2 != 0 || height % 2 != 0) {
        return Err(Error::format(path, "C420 requires even dimensions"));
    }

    let luma_len = width * height;
    let chroma_len = format.chroma_plane_len(width, height);
    let mut frames = Vec::new();
    let mut luma = vec![0u8; luma_len];
    let mut chroma = vec![0u8; chroma_len];
    loop {
        let mut first = [0u8; 1];
        match reader.read_exact(&mut first) {
            Ok(()) => {}
            Err(_) => break, // clean end of stream
        }
        let mut marker = vec![first[0]];
        loop {
            let mut b = [0u8; 1];
            reader
                .read_exact(&mut b)
                .map_err(|_| Error::truncated(path, format!("frame {} marker", frames.len())))?;
            if b[0] == b'\n' {
                break;
            }
            marker.push(b[0]);
        }
        if !marker.starts_with(b"FRAME") {
            return Err(Error::format(
                path,
                format!("expected FRAME marker before frame {}", frames.len()),
            ));
        }
        reader
            .read_exact(&mut luma)
            .map_err(|_| Error::truncated(path, format!("luma plane of frame {}", frames.len())))?;
        for plane in 0..2 {
            if chroma_len > 0 {
                reader.read_exact(&mut chroma).map_err(|_| {
                    Error::truncated(
                        path,
                        format!("chroma plane {} of frame {}", plane, frames.len()),
                    )
                })?;
            }
        }
        frames.push(frame_from_bytes(&luma, width, height));
    }
    if frames.is_empty() {
        return Err(Error::format(path, "no frames in stream"));
    }
    VideoBuffer::with_fps(frames, fps)
}

/// Writes a Y4M stream. Chroma planes, when the format has them, are
/// written as the constant 128.
pub fn write_y4m(video: &VideoBuffer, path: impl AsRef<Path>, format: PixelFormat) -> Result<()> {
    let path = path.as_ref();
    if format == PixelFormat::C420 && (video.width() % 2 != 0 || video.height() % 2 != 0) {
        return Err(Error::format(path, "C420 requires even dimensions"));
    }
    let mut w = BufWriter::new(File::create(path)?);
    let colorspace = match format {
        PixelFormat::C420 => "C420",
        PixelFormat::C444 => "C444",
        PixelFormat::Mono => "Cmono",
    };
    writeln!(
        w,
        "YUV4MPEG2 W{} H{} F{}:{} Ip A1:1 {}",
        video.width(),
        video.height(),
        video.fps.0,
        video.fps.1,
        colorspace
    )?;
    let chroma = vec![128u8; format.chroma_plane_len(video.width(), video.height())];
    for frame in video.frames() {
        writeln!(w, "FRAME")?;
        let luma: Vec<u8> = frame.samples().iter().map(|&v| luma_to_byte(v)).collect();
        w.write_all(&luma)?;
        w.write_all(&chroma)?;
        w.write_all(&chroma)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads headerless planar YUV with explicit dimensions.
pub fn read_yuv(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    format: PixelFormat,
) -> Result<VideoBuffer> {
    let path = path.as_ref();
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions {
            width,
            height,
            reason: "explicit dimensions required for raw YUV",
        });
    }
    let mut reader = BufReader::new(File::open(path)?);
    let luma_len = width * height;
    let chroma_len = format.chroma_plane_len(width, height);
    let mut luma = vec![0u8; luma_len];
    let mut chroma = vec![0u8; 2 * chroma_len];
    let mut frames = Vec::new();
    loop {
        match reader.read_exact(&mut luma) {
            Ok(()) => {}
            Err(_) if frames.is_empty() => return Err(Error::format(path, "no frames in file")),
            Err(_) => break,
        }
        if chroma_len > 0 {
            reader
                .read_exact(&mut chroma)
                .map_err(|_| Error::truncated(path, format!("chroma of frame {}", frames.len())))?;
        }
        frames.push(frame_from_bytes(&luma, width, height));
    }
    VideoBuffer::new(frames)
}

/// Reads a binary PGM (P5, maxval 255) as a single frame.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<Frame> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;

    let mut pos = 0usize;
    let mut token = |what: &str| -> Result<String> {
        // Skip whitespace and `#` comments.
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(path, format!("missing {what}")));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    if token("magic")? != "P5" {
        return Err(Error::format(path, "not a P5 PGM"));
    }
    let width: usize = token("width")?
        .parse()
        .map_err(|_| Error::format(path, "bad width"))?;
    let height: usize = token("height")?
        .parse()
        .map_err(|_| Error::format(path, "bad height"))?;
    let maxval: usize = token("maxval")?
        .parse()
        .map_err(|_| Error::format(path, "bad maxval"))?;
    if maxval != 255 {
        return Err(Error::format(path, "only maxval 255 supported"));
    }
    pos += 1; // single whitespace byte after maxval
    if bytes.len() < pos + width * height {
        return Err(Error::truncated(path, "pixel data"));
    }
    Ok(frame_from_bytes(&bytes[pos..pos + width * height], width, height))
}

/// Writes a frame as binary PGM (P5, maxval 255).
pub fn write_pgm(frame: &Frame, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{} {}\n255\n", frame.width(), frame.height())?;
    let bytes: Vec<u8> = frame.samples().iter().map(|&v| luma_to_byte(v)).collect();
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

/// Motion class of a synthetic sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionKind {
    /// Horizontal pan: frame `i` is the base cropped at column offset
    /// `round(rate * i)`.
    Translate,
    /// Scaling about the center by `rate^i`; requires `rate >= 1`.
    Zoom,
    /// Rotation about the center by `rate * i` degrees.
    Rotate,
}

fn bilinear(base: &Frame, y: f64, x: f64) -> Option<f64> {
    if y < 0.0 || x < 0.0 || y > (base.height() - 1) as f64 || x > (base.width() - 1) as f64 {
        return None;
    }
    let y0 = y.floor() as usize;
    let x0 = x.floor() as usize;
    let y1 = (y0 + 1).min(base.height() - 1);
    let x1 = (x0 + 1).min(base.width() - 1);
    let fy = y - y0 as f64;
    let fx = x - x0 as f64;
    let top = base.get(y0, x0) * (1.0 - fx) + base.get(y0, x1) * fx;
    let bottom = base.get(y1, x0) * (1.0 - fx) + base.get(y1, x1) * fx;
    Some(top * (1.0 - fy) + bottom * fy)
}

fn even_floor(v: usize) -> usize {
    v & !1
}

/// Builds a deterministic synthetic sequence with the requested motion from
/// a base image. Output frames are smaller than the base so every sample
/// stays inside it; an error is returned when the motion would run out of
/// content.
pub fn synthesize_sequence(
    kind: MotionKind,
    base: &Frame,
    frames: usize,
    rate: f64,
) -> Result<VideoBuffer> {
    if frames == 0 {
        return Err(Error::EmptyVideo);
    }
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::parameter("rate", "must be finite and nonnegative"));
    }
    let out_of_content = || Error::parameter("rate", "motion exceeds base extent");

    let result: Vec<Frame> = match kind {
        MotionKind::Translate => {
            let max_shift = (rate * (frames - 1) as f64).ceil() as usize;
            if base.width() <= max_shift + 2 {
                return Err(out_of_content());
            }
            let out_w = even_floor(base.width() - max_shift);
            let out_h = even_floor(base.height());
            (0..frames)
                .map(|i| {
                    let x0 = (rate * i as f64).round() as usize;
                    Frame::from_fn(out_w, out_h, |m, n| base.get(m, n + x0))
                })
                .collect()
        }
        MotionKind::Zoom => {
            if rate < 1.0 {
                return Err(out_of_content());
            }
            let out_w = even_floor(base.width());
            let out_h = even_floor(base.height());
            let cy = (base.height() - 1) as f64 / 2.0;
            let cx = (base.width() - 1) as f64 / 2.0;
            let mut frames_out = Vec::with_capacity(frames);
            for i in 0..frames {
                let scale = rate.powi(i as i32);
                let mut frame = Frame::new(out_w, out_h);
                for m in 0..out_h {
                    for n in 0..out_w {
                        let sy = cy + (m as f64 - cy) / scale;
                        let sx = cx + (n as f64 - cx) / scale;
                        let v = bilinear(base, sy, sx).ok_or_else(out_of_content)?;
                        frame.set(m, n, v);
                    }
                }
                frames_out.push(frame);
            }
            frames_out
        }
        MotionKind::Rotate => {
            let side = even_floor(
                (base.width().min(base.height()) as f64 / std::f64::consts::SQRT_2).floor()
                    as usize,
            );
            if side < 2 {
                return Err(out_of_content());
            }
            let cy = (base.height() - 1) as f64 / 2.0;
            let cx = (base.width() - 1) as f64 / 2.0;
            let oc = (side - 1) as f64 / 2.0;
            let mut frames_out = Vec::with_capacity(frames);
            for i in 0..frames {
                let theta = (rate * i as f64).to_radians();
                let (sin, cos) = theta.sin_cos();
                let mut frame = Frame::new(side, side);
                for m in 0..side {
                    for n in 0..side {
                        let dy = m as f64 - oc;
                        let dx = n as f64 - oc;
                        let sy = cy + dy * cos - dx * sin;
                        let sx = cx + dy * sin + dx * cos;
                        let v = bilinear(base, sy, sx).ok_or_else(out_of_content)?;
                        frame.set(m, n, v);
                    }
                }
                frames_out.push(frame);
            }
            frames_out
        }
    };
    VideoBuffer::new(result)
}

/// Deterministic multi-octave value-noise texture in [16, 240], rich in the
/// mid frequencies the reconstruction fixtures need.
pub fn synthetic_texture(width: usize, height: usize, seed: u64) -> Frame {
    fn lattice(seed: u64, octave: u64, gy: i64, gx: i64) -> f64 {
        let mut h = seed ^ octave.wrapping_mul(0xA076_1D64_78BD_642F);
        h ^= (gy as u64).wrapping_mul(0xE703_7ED1_A0B4_28DB);
        h ^= (gx as u64).wrapping_mul(0x8EBC_6AF0_9C88_C6E3);
        let mut z = h.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        (z ^ (z >> 31)) as f64 / u64::MAX as f64
    }

    let octaves: [(f64, f64); 4] = [(24.0, 0.40), (12.0, 0.30), (6.0, 0.20), (3.0, 0.10)];
    Frame::from_fn(width, height, |m, n| {
        let mut acc = 0.0;
        for (oi, &(cell, weight)) in octaves.iter().enumerate() {
            let fy = m as f64 / cell;
            let fx = n as f64 / cell;
            let gy = fy.floor() as i64;
            let gx = fx.floor() as i64;
            let ty = fy - gy as f64;
            let tx = fx - gx as f64;
            // Smoothstep interpolation between lattice values.
            let sy = ty * ty * (3.0 - 2.0 * ty);
            let sx = tx * tx * (3.0 - 2.0 * tx);
            let v00 = lattice(seed, oi as u64, gy, gx);
            let v01 = lattice(seed, oi as u64, gy, gx + 1);
            let v10 = lattice(seed, oi as u64, gy + 1, gx);
            let v11 = lattice(seed, oi as u64, gy + 1, gx + 1);
            let top = v00 * (1.0 - sx) + v01 * sx;
            let bottom = v10 * (1.0 - sx) + v11 * sx;
            acc += weight * (top * (1.0 - sy) + bottom * sy);
        }
        16.0 + 224.0 * acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_video(frames: usize) -> VideoBuffer {
        let list: Vec<Frame> = (0..frames)
            .map(|t| Frame::from_fn(16, 16, |m, n| ((m * 16 + n + t * 31) % 256) as f64))
            .collect();
        VideoBuffer::with_fps(list, (30, 1)).unwrap()
    }

    #[test]
    fn y4m_round_trip_bit_exact_luma() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.y4m");
        let video = sample_video(3);
        write_y4m(&video, &path, PixelFormat::C420).unwrap();
        let back = read_y4m(&path).unwrap();
        assert_eq!(back.fps, (30, 1));
        assert_eq!(back.frames(), video.frames());

        write_y4m(&back, &path, PixelFormat::C444).unwrap();
        let again = read_y4m(&path).unwrap();
        assert_eq!(again.frames(), video.frames());
    }

    #[test]
    fn y4m_header_and_frame_count() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.y4m");
        let mut data = b"YUV4MPEG2 W16 H16 F30:1 C420\n".to_vec();
        for _ in 0..2 {
            data.extend_from_slice(b"FRAME\n");
            data.extend_from_slice(&[100u8; 16 * 16]);
            data.extend_from_slice(&[128u8; 2 * 8 * 8]);
        }
        std::fs::write(&path, &data).unwrap();
        let video = read_y4m(&path).unwrap();
        assert_eq!(video.len(), 2);
        assert_eq!((video.width(), video.height()), (16, 16));
        assert_eq!(video.frame(0).get(3, 3), 100.0);
    }

    #[test]
    fn y4m_truncated_frame_names_index() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.y4m");
        let mut data = b"YUV4MPEG2 W16 H16 F30:1 C420\n".to_vec();
        data.extend_from_slice(b"FRAME\n");
        data.extend_from_slice(&[0u8; 16 * 16 + 2 * 64]);
        data.extend_from_slice(b"FRAME\n");
        data.extend_from_slice(&[0u8; 100]); // short
        std::fs::write(&path, &data).unwrap();
        let err = read_y4m(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("frame 1"), "message: {msg}");
    }

    #[test]
    fn y4m_unsupported_colorspace_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.y4m");
        std::fs::write(&path, b"YUV4MPEG2 W16 H16 F30:1 C422\nFRAME\n").unwrap();
        assert!(read_y4m(&path).is_err());
    }

    #[test]
    fn y4m_write_clamps_and_rounds() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cl.y4m");
        let mut frame = Frame::new(2, 2);
        frame.set(0, 0, 255.7);
        frame.set(0, 1, -3.0);
        frame.set(1, 0, 99.5);
        let video = VideoBuffer::new(vec![frame]).unwrap();
        write_y4m(&video, &path, PixelFormat::Mono).unwrap();
        let back = read_y4m(&path).unwrap();
        assert_eq!(back.frame(0).get(0, 0), 255.0);
        assert_eq!(back.frame(0).get(0, 1), 0.0);
        assert_eq!(back.frame(0).get(1, 0), 100.0);
    }

    #[test]
    fn raw_yuv_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.yuv");
        let mut data = Vec::new();
        for t in 0..2u8 {
            data.extend(std::iter::repeat(t + 1).take(16)); // 4x4 luma
            data.extend(std::iter::repeat(128u8).take(2 * 4)); // 2x2 chroma x2
        }
        std::fs::write(&path, &data).unwrap();
        let video = read_yuv(&path, 4, 4, PixelFormat::C420).unwrap();
        assert_eq!(video.len(), 2);
        assert_eq!(video.frame(1).get(0, 0), 2.0);
    }

    #[test]
    fn pgm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.pgm");
        let frame = Frame::from_fn(7, 5, |m, n| ((m * 7 + n * 3) % 256) as f64);
        write_pgm(&frame, &path).unwrap();
        let back = read_pgm(&path).unwrap();
        assert_eq!(back, frame);
    }

    #[test]
    fn pgm_comment_handling() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.pgm");
        let mut data = b"P5\n# a comment\n2 2\n255\n".to_vec();
        data.extend_from_slice(&[1, 2, 3, 4]);
        std::fs::write(&path, &data).unwrap();
        let frame = read_pgm(&path).unwrap();
        assert_eq!(frame.samples(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn translate_exact_integer_shift() {
        let base = synthetic_texture(64, 32, 1);
        let video = synthesize_sequence(MotionKind::Translate, &base, 10, 2.0).unwrap();
        assert_eq!(video.len(), 10);
        for i in 0..10 {
            let offset = 2 * i;
            for m in 0..video.height() {
                for n in 0..video.width() {
                    assert_eq!(video.frame(i).get(m, n), base.get(m, n + offset));
                }
            }
        }
    }

    #[test]
    fn translate_rate_zero_static() {
        let base = synthetic_texture(32, 32, 2);
        let video = synthesize_sequence(MotionKind::Translate, &base, 4, 0.0).unwrap();
        for i in 1..4 {
            assert_eq!(video.frame(i), video.frame(0));
        }
    }

    #[test]
    fn translate_exceeding_base_rejected() {
        let base = synthetic_texture(16, 16, 3);
        assert!(synthesize_sequence(MotionKind::Translate, &base, 10, 2.0).is_err());
    }

    #[test]
    fn zoom_scales_about_center() {
        let base = synthetic_texture(48, 48, 4);
        let video = synthesize_sequence(MotionKind::Zoom, &base, 3, 1.01).unwrap();
        assert_eq!(video.len(), 3);
        // Center pixel barely moves under zoom about the center.
        let c = 23; // (48-1)/2 rounded down; sample near center
        assert!((video.frame(2).get(c, c) - base.get(c, c)).abs() < 20.0);
        // Zoom-out is out of content.
        assert!(synthesize_sequence(MotionKind::Zoom, &base, 3, 0.9).is_err());
    }

    #[test]
    fn rotate_output_fits_any_angle() {
        let base = synthetic_texture(40, 40, 5);
        let video = synthesize_sequence(MotionKind::Rotate, &base, 8, 5.0).unwrap();
        assert_eq!(video.width(), 28); // floor(40 / sqrt(2)) even
        assert_eq!(video.frame(0).get(3, 3), base.get(3 + 6, 3 + 6));
    }

    #[test]
    fn texture_deterministic_and_in_range() {
        let a = synthetic_texture(32, 32, 7);
        let b = synthetic_texture(32, 32, 7);
        assert_eq!(a, b);
        assert!(a.samples().iter().all(|&v| (16.0..=240.0).contains(&v)));
        let c = synthetic_texture(32, 32, 8);
        assert_ne!(a, c);
    }
}
