//! Slow, direct implementations used as independent cross-checks in tests.
//!
//! Nothing here shares code with the optimized paths it checks: the motion
//! search is a literal per-pixel window loop, the least-squares fit solves
//! dense normal equations, and the SSIM evaluates every window from
//! scratch. Not part of the supported API.

use rustfft::num_complex::Complex;

use crate::frame::Frame;
use crate::motion::{FrameView, MeParams};
use crate::sampling::Mask;

type Cplx = Complex<f64>;

fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit(x: u64) -> f64 {
    mix(x) as f64 / u64::MAX as f64
}

fn conj_index(k: usize, l: usize, n: usize) -> (usize, usize) {
    ((n - k) % n, (n - l) % n)
}

/// Case seeds frozen for the oracle-equivalence checks. At 25% sampling of
/// an 8x8 area (16 samples against 64 basis functions), greedy support
/// identification only succeeds when the windowed spectrum of the content
/// peaks on the true support; instances where it does not are unsolvable
/// for any matching pursuit and say nothing about the coefficient update
/// the oracle pins down. This list was drawn once from [`sparse_case`],
/// keeping the first ten single-pair, eight DC-plus-pair and six two-pair
/// identifiable instances.
pub const SPARSE_CASE_SEEDS: [u64; 24] = [
    0, 1, 3, 4, 6, 7, 10, 12, 13, 15, 16, 18, 19, 21, 24, 25, 27, 30, 50, 65, 68, 83, 104, 119,
];

/// Mask seed paired with a sparse case seed.
pub fn sparse_case_mask_seed(seed: u64) -> u64 {
    mix(seed)
}

/// Deterministic sparse ground truth for one case seed. Three families
/// rotate by seed: a single conjugate pair, DC plus a pair, and two
/// distinct pairs. Coefficients follow the greedy model's superposition
/// convention (a pair contributes c*phi + conj(c)*conj(phi), self-conjugate
/// indices a real coefficient).
pub fn sparse_case(seed: u64, n: usize) -> (Vec<(usize, usize)>, Vec<(f64, f64)>) {
    let pair_at = |salt: u64| -> (usize, usize) {
        let mut j = salt;
        loop {
            let k = (mix(seed ^ (j.wrapping_mul(0x61C8_8646_80B5_83EB))) % n as u64) as usize;
            let l =
                (mix(seed ^ ((j + 1).wrapping_mul(0xD6E8_FEB8_6659_FD93))) % n as u64) as usize;
            if !((2 * k) % n == 0 && (2 * l) % n == 0) {
                return (k, l);
            }
            j += 2;
        }
    };
    let coef = |salt: u64| -> (f64, f64) {
        let amp = 0.5 + 1.5 * unit(seed ^ salt);
        let phase = 2.0 * std::f64::consts::PI * unit(seed ^ (salt + 1));
        (amp * phase.cos(), amp * phase.sin())
    };
    match seed % 3 {
        0 => (vec![pair_at(10)], vec![coef(100)]),
        1 => (
            vec![pair_at(10), (0, 0)],
            vec![coef(100), (30.0 + 60.0 * unit(seed ^ 300), 0.0)],
        ),
        _ => {
            let p1 = pair_at(10);
            let mut salt = 40u64;
            let p2 = loop {
                let p = pair_at(salt);
                if p != p1 && p != conj_index(p1.0, p1.1, n) {
                    break p;
                }
                salt += 2;
            };
            (vec![p1, p2], vec![coef(100), coef(200)])
        }
    }
}

/// Evaluates the sparse synthesis at the acquired positions of a mask.
pub fn sampled_area(
    indices: &[(usize, usize)],
    coefs: &[(f64, f64)],
    mask: &Mask,
    n: usize,
) -> Vec<f64> {
    let mut area = vec![0.0f64; n * n];
    for m in 0..n {
        for q in 0..n {
            if !mask.is_acquired(m, q) {
                continue;
            }
            let mut acc = 0.0;
            for (t, &(k, l)) in indices.iter().enumerate() {
                let phase = 2.0 * std::f64::consts::PI * ((k * m + l * q) % n) as f64 / n as f64;
                if (2 * k) % n == 0 && (2 * l) % n == 0 {
                    acc += coefs[t].0 * phase.cos();
                } else {
                    acc += 2.0 * (coefs[t].0 * phase.cos() - coefs[t].1 * phase.sin());
                }
            }
            area[m * n + q] = acc;
        }
    }
    area
}

/// Solves the dense weighted least-squares fit of a real signal onto the
/// subspace spanned by the given Fourier basis indices together with their
/// conjugate partners. Returns one complex coefficient per input index, in
/// the same convention as the greedy model (signal = sum of c*phi + conj
/// terms; self-conjugate indices get a real coefficient).
///
/// `area` and `weights` are `n*n` row-major grids.
pub fn wls_fit(area: &[f64], weights: &[f64], n: usize, indices: &[(usize, usize)]) -> Vec<Cplx> {
    assert_eq!(area.len(), n * n);
    assert_eq!(weights.len(), n * n);

    // Real parameterization: a self-conjugate index contributes one basis
    // column (its ±1 pattern), every other index two (cosine and negative
    // sine of its phase, each doubled by the conjugate partner).
    #[derive(Clone, Copy)]
    enum Param {
        SelfConj { k: usize, l: usize },
        PairRe { k: usize, l: usize },
        PairIm { k: usize, l: usize },
    }

    let mut params: Vec<Param> = Vec::new();
    for &(k, l) in indices {
        if (2 * k) % n == 0 && (2 * l) % n == 0 {
            params.push(Param::SelfConj { k, l });
        } else {
            params.push(Param::PairRe { k, l });
            params.push(Param::PairIm { k, l });
        }
    }
    let dim = params.len();

    let basis_value = |p: Param, m: usize, q: usize| -> f64 {
        let phase = |k: usize, l: usize| {
            2.0 * std::f64::consts::PI * ((k * m + l * q) % n) as f64 / n as f64
        };
        match p {
            Param::SelfConj { k, l } => phase(k, l).cos(),
            Param::PairRe { k, l } => 2.0 * phase(k, l).cos(),
            Param::PairIm { k, l } => -2.0 * phase(k, l).sin(),
        }
    };

    // Normal equations A^T W A x = A^T W y over the weighted support.
    let mut ata = vec![0.0f64; dim * dim];
    let mut aty = vec![0.0f64; dim];
    for m in 0..n {
        for q in 0..n {
            let w = weights[m * n + q];
            if w == 0.0 {
                continue;
            }
            let y = area[m * n + q];
            let row: Vec<f64> = params.iter().map(|&p| basis_value(p, m, q)).collect();
            for i in 0..dim {
                aty[i] += w * row[i] * y;
                for j in 0..dim {
                    ata[i * dim + j] += w * row[i] * row[j];
                }
            }
        }
    }

    let x = solve_dense(&mut ata, &mut aty, dim);

    let mut coefficients = Vec::with_capacity(indices.len());
    let mut cursor = 0usize;
    for &(k, l) in indices {
        if (2 * k) % n == 0 && (2 * l) % n == 0 {
            coefficients.push(Cplx::new(x[cursor], 0.0));
            cursor += 1;
        } else {
            coefficients.push(Cplx::new(x[cursor], x[cursor + 1]));
            cursor += 2;
        }
    }
    coefficients
}

/// Gaussian elimination with partial pivoting; `a` is `dim x dim`
/// row-major, `b` the right-hand side.
fn solve_dense(a: &mut [f64], b: &mut [f64], dim: usize) -> Vec<f64> {
    for col in 0..dim {
        let mut pivot = col;
        for row in col + 1..dim {
            if a[row * dim + col].abs() > a[pivot * dim + col].abs() {
                pivot = row;
            }
        }
        if pivot != col {
            for j in 0..dim {
                a.swap(col * dim + j, pivot * dim + j);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * dim + col];
        assert!(diag.abs() > 1e-12, "singular normal equations");
        for row in col + 1..dim {
            let factor = a[row * dim + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for j in col..dim {
                a[row * dim + j] -= factor * a[col * dim + j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; dim];
    for col in (0..dim).rev() {
        let mut acc = b[col];
        for j in col + 1..dim {
            acc -= a[col * dim + j] * x[j];
        }
        x[col] = acc / a[col * dim + col];
    }
    x
}

/// Winner of the exhaustive masked-SAD search at a single pixel, computed
/// with direct window sums. Returns `(dm, dn, cost)`; `None` when every
/// candidate is rejected.
pub fn dense_motion_at(
    current: &FrameView<'_>,
    reference: &FrameView<'_>,
    params: &MeParams,
    m: usize,
    q: usize,
) -> Option<(i32, i32, f64)> {
    let width = current.width();
    let height = current.height();
    let hw = (params.window / 2) as i32;
    let range = params.search_range as i32;
    let mut best: Option<(i32, i32, f64)> = None;

    for dm in -range..=range {
        for dn in -range..=range {
            let target_m = m as i32 + dm;
            let target_n = q as i32 + dn;
            if target_m < 0
                || target_m >= height as i32
                || target_n < 0
                || target_n >= width as i32
            {
                continue;
            }
            let mut sum = 0.0;
            let mut count = 0usize;
            for u in -hw..=hw {
                for v in -hw..=hw {
                    let cm = m as i32 + u;
                    let cn = q as i32 + v;
                    if cm < 0 || cm >= height as i32 || cn < 0 || cn >= width as i32 {
                        continue;
                    }
                    let rm = cm + dm;
                    let rn = cn + dn;
                    if rm < 0 || rm >= height as i32 || rn < 0 || rn >= width as i32 {
                        continue;
                    }
                    if current.is_valid(cm as usize, cn as usize)
                        && reference.is_valid(rm as usize, rn as usize)
                    {
                        sum += (current.value(cm as usize, cn as usize)
                            - reference.value(rm as usize, rn as usize))
                        .abs();
                        count += 1;
                    }
                }
            }
            if count < params.min_overlap {
                continue;
            }
            let cost = sum / count as f64;
            let better = match best {
                None => true,
                Some((bm, bn, bc)) => {
                    if cost != bc {
                        cost < bc
                    } else {
                        let l1 = dm.abs() + dn.abs();
                        let bl1 = bm.abs() + bn.abs();
                        (l1, dn, dm) < (bl1, bn, bm)
                    }
                }
            };
            if better {
                best = Some((dm, dn, cost));
            }
        }
    }
    best
}

/// Mean SSIM evaluated window by window with an explicitly built 2-D
/// window, no separable filtering.
pub fn reference_ssim(reference: &Frame, test: &Frame, margin: usize, gaussian: bool) -> f64 {
    const WIN: usize = 11;
    let c1 = (0.01 * 255.0) * (0.01 * 255.0);
    let c2 = (0.03 * 255.0) * (0.03 * 255.0);

    let mut weights = [[0.0f64; WIN]; WIN];
    let mut total = 0.0;
    for (i, row) in weights.iter_mut().enumerate() {
        for (j, w) in row.iter_mut().enumerate() {
            *w = if gaussian {
                let dy = i as f64 - 5.0;
                let dx = j as f64 - 5.0;
                (-(dy * dy + dx * dx) / (2.0 * 1.5 * 1.5)).exp()
            } else {
                1.0
            };
            total += *w;
        }
    }
    for row in weights.iter_mut() {
        for w in row.iter_mut() {
            *w /= total;
        }
    }

    let x0 = margin;
    let y0 = margin;
    let rw = reference.width() - 2 * margin;
    let rh = reference.height() - 2 * margin;
    assert!(rw >= WIN && rh >= WIN);

    let mut sum = 0.0;
    let mut count = 0usize;
    for wy in 0..=rh - WIN {
        for wx in 0..=rw - WIN {
            let mut mu_x = 0.0;
            let mut mu_y = 0.0;
            for i in 0..WIN {
                for j in 0..WIN {
                    let a = reference.get(y0 + wy + i, x0 + wx + j);
                    let b = test.get(y0 + wy + i, x0 + wx + j);
                    mu_x += weights[i][j] * a;
                    mu_y += weights[i][j] * b;
                }
            }
            let mut var_x = 0.0;
            let mut var_y = 0.0;
            let mut cov = 0.0;
            for i in 0..WIN {
                for j in 0..WIN {
                    let a = reference.get(y0 + wy + i, x0 + wx + j) - mu_x;
                    let b = test.get(y0 + wy + i, x0 + wx + j) - mu_y;
                    var_x += weights[i][j] * a * a;
                    var_y += weights[i][j] * b * b;
                    cov += weights[i][j] * a * b;
                }
            }
            sum += ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2))
                / ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2));
            count += 1;
        }
    }
    sum / count as f64
}
