//! Frequency selective reconstruction: block-wise greedy estimation of a
//! sparse Fourier model from the available samples of a frame.
//!
//! For every block, an `fft_size` x `fft_size` area centered on the block is
//! extracted and each position classified as acquired, reconstructed or
//! missing. A weight window decaying with the distance from the block center
//! (factor `rho` per pixel of Euclidean distance, reconstructed samples
//! additionally scaled by `delta`) steers a greedy matching pursuit: per
//! iteration the Fourier basis function with the largest weighted residual
//! projection is selected and its coefficient incremented by `gamma` times
//! the projection estimate, always together with its conjugate partner so
//! the model stays real. Missing pixels of the block are replaced by the
//! final model values.
//!
//! The residual spectrum is tracked in the frequency domain: selecting basis
//! `(k,l)` shifts the precomputed window spectrum, so no per-iteration FFT
//! is required. The spatial model is synthesized once per block by an
//! unnormalized inverse FFT of the coefficient grid.

use std::collections::HashMap;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::frame::{ClassGrid, Frame, SampleClass};
use crate::sampling::SampledFrame;

type Cplx = Complex<f64>;

/// Valid sample range of the 8-bit luma sources.
pub const SAMPLE_MAX: f64 = 255.0;

/// Parameters of the frequency selective reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct FsrParams {
    /// Side length of the square reconstruction block.
    pub block_size: usize,
    /// Border of support samples around the block on each side.
    pub border_width: usize,
    /// Side length of the square FFT area; must equal
    /// `block_size + 2 * border_width` and be a power of two.
    pub fft_size: usize,
    /// Number of greedy iterations per block.
    pub iterations: usize,
    /// Spatial decay factor of the sample weights, in (0,1).
    pub rho: f64,
    /// Orthogonality deficiency compensation applied to every coefficient
    /// update, in (0,1].
    pub gamma: f64,
    /// Weight scale of already reconstructed (estimated) samples, in [0,1].
    pub delta: f64,
}

impl Default for FsrParams {
    fn default() -> Self {
        FsrParams {
            block_size: 4,
            border_width: 14,
            fft_size: 32,
            iterations: 100,
            rho: 0.7,
            gamma: 0.5,
            delta: 0.5,
        }
    }
}

impl FsrParams {
    pub fn validate(&self) -> Result<()> {
        if self.block_size == 0 {
            return Err(Error::parameter("block_size", "must be positive"));
        }
        if self.fft_size != self.block_size + 2 * self.border_width {
            return Err(Error::parameter(
                "fft_size",
                format!(
                    "must equal block_size + 2*border_width ({} + 2*{} != {})",
                    self.block_size, self.border_width, self.fft_size
                ),
            ));
        }
        if !self.fft_size.is_power_of_two() {
            return Err(Error::parameter("fft_size", "must be a power of two"));
        }
        if self.iterations == 0 {
            return Err(Error::parameter("iterations", "must be at least 1"));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::parameter("rho", "must lie in (0,1)"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::parameter("gamma", "must lie in (0,1]"));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::parameter("delta", "must lie in [0,1]"));
        }
        Ok(())
    }

    /// Parses the flat key-value parameter file format. Unset keys keep
    /// their defaults; `#` starts a comment; `key = value` and `key value`
    /// are both accepted.
    pub fn from_text(text: &str) -> Result<FsrParams> {
        let mut params = FsrParams::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.splitn(2, '=');
            let (key, value) = match (parts.next(), parts.next()) {
                (Some(k), Some(v)) => (k.trim(), v.trim()),
                _ => {
                    let mut ws = line.split_whitespace();
                    match (ws.next(), ws.next()) {
                        (Some(k), Some(v)) => (k, v),
                        _ => {
                            return Err(Error::parameter(
                                "params",
                                format!("line {}: expected `key = value`", lineno + 1),
                            ))
                        }
                    }
                }
            };
            let bad = |k: &str| {
                Error::parameter("params", format!("line {}: bad value for {}", lineno + 1, k))
            };
            match key {
                "block_size" => params.block_size = value.parse().map_err(|_| bad(key))?,
                "border_width" => params.border_width = value.parse().map_err(|_| bad(key))?,
                "fft_size" => params.fft_size = value.parse().map_err(|_| bad(key))?,
                "iterations" => params.iterations = value.parse().map_err(|_| bad(key))?,
                "rho" => params.rho = value.parse().map_err(|_| bad(key))?,
                "gamma" => params.gamma = value.parse().map_err(|_| bad(key))?,
                "delta" => params.delta = value.parse().map_err(|_| bad(key))?,
                other => {
                    return Err(Error::parameter(
                        "params",
                        format!("line {}: unknown key `{}`", lineno + 1, other),
                    ))
                }
            }
        }
        params.validate()?;
        Ok(params)
    }

    pub fn to_text(&self) -> String {
        format!(
            "block_size = {}\nborder_width = {}\nfft_size = {}\niterations = {}\nrho = {}\ngamma = {}\ndelta = {}\n",
            self.block_size,
            self.border_width,
            self.fft_size,
            self.iterations,
            self.rho,
            self.gamma,
            self.delta
        )
    }
}

/// Nonnegative weight per position of the FFT area. Zero exactly at missing
/// positions; acquired positions carry `rho^d`, reconstructed positions
/// `delta * rho^d`, with `d` the Euclidean distance to the block center.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightWindow {
    fft_size: usize,
    values: Vec<f64>,
}

impl WeightWindow {
    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Per-pixel `rho^d` over the FFT area, `d` measured from the center of a
/// `block_h` x `block_w` block placed at `border` in both dimensions.
fn rho_decay_grid(params: &FsrParams, block_h: usize, block_w: usize) -> Vec<f64> {
    let n = params.fft_size;
    let center_m = params.border_width as f64 + block_h as f64 / 2.0;
    let center_n = params.border_width as f64 + block_w as f64 / 2.0;
    let mut grid = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let dm = i as f64 - center_m;
            let dn = j as f64 - center_n;
            grid.push(params.rho.powf((dm * dm + dn * dn).sqrt()));
        }
    }
    grid
}

fn window_from_classes(
    classes: &[SampleClass],
    decay: &[f64],
    delta: f64,
    fft_size: usize,
) -> WeightWindow {
    let values = classes
        .iter()
        .zip(decay)
        .map(|(&class, &rho_d)| match class {
            SampleClass::Acquired => rho_d,
            SampleClass::Reconstructed => delta * rho_d,
            SampleClass::Missing => 0.0,
        })
        .collect();
    WeightWindow { fft_size, values }
}

/// Builds the weight window for a full (non-shrunk) block geometry.
pub fn weight_window(classes: &[SampleClass], params: &FsrParams) -> Result<WeightWindow> {
    params.validate()?;
    let n = params.fft_size;
    if classes.len() != n * n {
        return Err(Error::parameter(
            "area",
            format!("expected {}x{} area classes", n, n),
        ));
    }
    let decay = rho_decay_grid(params, params.block_size, params.block_size);
    Ok(window_from_classes(classes, &decay, params.delta, n))
}

/// Sparse Fourier model of one FFT area.
#[derive(Debug, Clone)]
pub struct FsrModel {
    fft_size: usize,
    /// Expansion coefficients on the full frequency grid, row-major `(k,l)`.
    /// Zero outside the selected set; conjugate-symmetric by construction.
    coefficients: Vec<Cplx>,
    /// Selected frequency indices, in selection order, conjugate partners
    /// included.
    selected: Vec<(usize, usize)>,
    /// Spatial model: superposition of the selected basis functions.
    model: Vec<f64>,
    /// Largest |imaginary part| observed before the real cast of the model.
    max_imag: f64,
}

impl FsrModel {
    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn coefficients(&self) -> &[Cplx] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize, l: usize) -> Cplx {
        self.coefficients[k * self.fft_size + l]
    }

    pub fn selected(&self) -> &[(usize, usize)] {
        &self.selected
    }

    pub fn model(&self) -> &[f64] {
        &self.model
    }

    pub fn max_imag(&self) -> f64 {
        self.max_imag
    }

    fn zero(fft_size: usize) -> FsrModel {
        FsrModel {
            fft_size,
            coefficients: vec![Cplx::new(0.0, 0.0); fft_size * fft_size],
            selected: Vec::new(),
            model: vec![0.0; fft_size * fft_size],
            max_imag: 0.0,
        }
    }
}

/// Reusable 2-D FFT machinery for one transform size.
struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Cplx>,
    transpose_buf: Vec<Cplx>,
}

impl Fft2 {
    fn new(n: usize) -> Fft2 {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Fft2 {
            n,
            forward,
            inverse,
            scratch: vec![Cplx::new(0.0, 0.0); scratch_len],
            transpose_buf: vec![Cplx::new(0.0, 0.0); n * n],
        }
    }

    fn transform(&mut self, buf: &mut [Cplx], inverse: bool) {
        let n = self.n;
        let fft = if inverse {
            self.inverse.clone()
        } else {
            self.forward.clone()
        };
        for row in buf.chunks_exact_mut(n) {
            fft.process_with_scratch(row, &mut self.scratch);
        }
        for i in 0..n {
            for j in 0..n {
                self.transpose_buf[j * n + i] = buf[i * n + j];
            }
        }
        for row in self.transpose_buf.chunks_exact_mut(n) {
            fft.process_with_scratch(row, &mut self.scratch);
        }
        for i in 0..n {
            for j in 0..n {
                buf[i * n + j] = self.transpose_buf[j * n + i];
            }
        }
    }
}

fn greedy_model(fft2: &mut Fft2, area: &[f64], window: &WeightWindow, params: &FsrParams) -> FsrModel {
    let n = params.fft_size;
    let n2 = n * n;
    let weight_sum = window.sum();
    if weight_sum == 0.0 {
        return FsrModel::zero(n);
    }
    let w = window.values();

    // Window spectrum and initial weighted-residual spectrum.
    let mut win_spec: Vec<Cplx> = w.iter().map(|&v| Cplx::new(v, 0.0)).collect();
    fft2.transform(&mut win_spec, false);
    let mut res_spec: Vec<Cplx> = area
        .iter()
        .zip(w)
        .map(|(&a, &wv)| Cplx::new(a * wv, 0.0))
        .collect();
    fft2.transform(&mut res_spec, false);

    let mut coefficients = vec![Cplx::new(0.0, 0.0); n2];
    let mut selected_flag = vec![false; n2];
    let mut selected = Vec::new();
    let mask = n - 1; // fft_size is a power of two

    for _ in 0..params.iterations {
        // Pick the basis with the largest residual-energy reduction; the
        // weighted basis norm is the same for every complex exponential, so
        // this is the largest projection magnitude. Ties resolve to the
        // smaller linear index.
        let mut best = 0usize;
        let mut best_energy = res_spec[0].norm_sqr();
        for (idx, v) in res_spec.iter().enumerate().skip(1) {
            let e = v.norm_sqr();
            if e > best_energy {
                best_energy = e;
                best = idx;
            }
        }
        if best_energy == 0.0 {
            // Residual spectrum exactly zero: remaining iterations are no-ops.
            break;
        }
        let (k, l) = (best / n, best % n);
        let projection = res_spec[best] / weight_sum;
        let self_conjugate = (2 * k) % n == 0 && (2 * l) % n == 0;

        if self_conjugate {
            let inc = Cplx::new(params.gamma * projection.re, 0.0);
            coefficients[best] += inc;
            if !selected_flag[best] {
                selected_flag[best] = true;
                selected.push((k, l));
            }
            for ki in 0..n {
                let row_shift = ((ki + n - k) & mask) * n;
                for li in 0..n {
                    let shifted = row_shift + ((li + n - l) & mask);
                    res_spec[ki * n + li] -= inc * win_spec[shifted];
                }
            }
        } else {
            let inc = params.gamma * projection;
            let inc_conj = inc.conj();
            let conj_idx = ((n - k) & mask) * n + ((n - l) & mask);
            coefficients[best] += inc;
            coefficients[conj_idx] += inc_conj;
            if !selected_flag[best] {
                selected_flag[best] = true;
                selected.push((k, l));
                selected_flag[conj_idx] = true;
                selected.push(((n - k) & mask, (n - l) & mask));
            }
            for ki in 0..n {
                let row_minus = ((ki + n - k) & mask) * n;
                let row_plus = ((ki + k) & mask) * n;
                for li in 0..n {
                    let minus = row_minus + ((li + n - l) & mask);
                    let plus = row_plus + ((li + l) & mask);
                    res_spec[ki * n + li] -= inc * win_spec[minus] + inc_conj * win_spec[plus];
                }
            }
        }
    }

    // Synthesize the spatial model: the unnormalized inverse transform is
    // exactly the superposition of the selected basis functions.
    let mut model_spec = coefficients.clone();
    fft2.transform(&mut model_spec, true);
    let mut model = Vec::with_capacity(n2);
    let mut max_imag: f64 = 0.0;
    for v in &model_spec {
        max_imag = max_imag.max(v.im.abs());
        model.push(v.re);
    }
    debug_assert!(max_imag < 1e-9, "model imaginary residue {max_imag}");

    FsrModel {
        fft_size: n,
        coefficients,
        selected,
        model,
        max_imag,
    }
}

/// Runs the greedy sparse-model generation on one FFT area.
///
/// The window must be zero wherever `area` holds no information; an all-zero
/// window yields the zero model with an empty selection.
pub fn generate_block_model(
    area: &[f64],
    window: &WeightWindow,
    params: &FsrParams,
) -> Result<FsrModel> {
    params.validate()?;
    let n = params.fft_size;
    if area.len() != n * n || window.fft_size != n {
        return Err(Error::parameter(
            "area",
            format!("area and window must be {}x{}", n, n),
        ));
    }
    let mut fft2 = Fft2::new(n);
    Ok(greedy_model(&mut fft2, area, window, params))
}

/// Reconstructs one frame: every missing pixel is replaced by the model
/// value of the block that owns it, acquired pixels pass through untouched.
///
/// `prior` optionally classifies non-acquired positions that already carry
/// estimates (e.g. pixels projected from neighboring frames); those enter
/// the weight windows as reconstructed samples with their values taken from
/// `sampled.frame`. Blocks are processed in raster order and pixels filled
/// by earlier blocks support later ones as reconstructed samples.
pub fn reconstruct_frame(
    sampled: &SampledFrame,
    prior: Option<&ClassGrid>,
    params: &FsrParams,
) -> Result<Frame> {
    params.validate()?;
    let width = sampled.width();
    let height = sampled.height();
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions {
            width,
            height,
            reason: "cannot reconstruct an empty frame",
        });
    }
    if width < params.block_size || height < params.block_size {
        return Err(Error::InvalidDimensions {
            width,
            height,
            reason: "frame must be at least one block in each dimension",
        });
    }
    sampled.frame.check_dims(sampled.mask.width(), sampled.mask.height())?;
    if let Some(grid) = prior {
        if grid.width() != width || grid.height() != height {
            return Err(Error::DimensionMismatch {
                expected_width: width,
                expected_height: height,
                width: grid.width(),
                height: grid.height(),
            });
        }
    }

    let n = params.fft_size;
    let border = params.border_width as isize;
    let block = params.block_size;

    // Working copies; values at missing positions are never read (their
    // window weight is zero).
    let mut values: Vec<f64> = sampled.frame.samples().to_vec();
    let mut classes: Vec<SampleClass> = Vec::with_capacity(width * height);
    for row in 0..height {
        for col in 0..width {
            let class = if sampled.mask.is_acquired(row, col) {
                SampleClass::Acquired
            } else {
                match prior.map(|g| g.get(row, col)) {
                    Some(SampleClass::Reconstructed) | Some(SampleClass::Acquired) => {
                        SampleClass::Reconstructed
                    }
                    _ => SampleClass::Missing,
                }
            };
            classes.push(class);
        }
    }

    let mut fft2 = Fft2::new(n);
    let mut decay_cache: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
    decay_cache.insert((block, block), rho_decay_grid(params, block, block));

    let mut area = vec![0.0f64; n * n];
    let mut area_classes = vec![SampleClass::Missing; n * n];

    for block_m in (0..height).step_by(block) {
        let bh = block.min(height - block_m);
        for block_n in (0..width).step_by(block) {
            let bw = block.min(width - block_n);
            let origin_m = block_m as isize - border;
            let origin_n = block_n as isize - border;

            for i in 0..n {
                let fm = origin_m + i as isize;
                for j in 0..n {
                    let fn_ = origin_n + j as isize;
                    let idx = i * n + j;
                    if fm >= 0 && (fm as usize) < height && fn_ >= 0 && (fn_ as usize) < width {
                        let pos = fm as usize * width + fn_ as usize;
                        area[idx] = values[pos];
                        area_classes[idx] = classes[pos];
                    } else {
                        area[idx] = 0.0;
                        area_classes[idx] = SampleClass::Missing;
                    }
                }
            }

            let decay = decay_cache
                .entry((bh, bw))
                .or_insert_with(|| rho_decay_grid(params, bh, bw));
            let window = window_from_classes(&area_classes, decay, params.delta, n);
            let model = greedy_model(&mut fft2, &area, &window, params);

            for di in 0..bh {
                let fm = block_m + di;
                for dj in 0..bw {
                    let fn_ = block_n + dj;
                    if sampled.mask.is_acquired(fm, fn_) {
                        continue;
                    }
                    let g = model.model[(params.border_width + di) * n + params.border_width + dj];
                    values[fm * width + fn_] = g;
                    classes[fm * width + fn_] = SampleClass::Reconstructed;
                }
            }
        }
    }

    // Assemble: acquired samples bit-exact from the input, model values
    // clipped to the valid range.
    let mut out = Frame::new(width, height);
    for row in 0..height {
        for col in 0..width {
            let v = if sampled.mask.is_acquired(row, col) {
                sampled.frame.get(row, col)
            } else {
                values[row * width + col].clamp(0.0, SAMPLE_MAX)
            };
            out.set(row, col, v);
        }
    }
    Ok(out)
}
