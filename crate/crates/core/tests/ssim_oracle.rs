//! The separable SSIM implementation against a direct window-by-window
//! evaluation.

use nrs_core::bruteforce::reference_ssim;
use nrs_core::metrics::{ssim, SsimWindow};
use nrs_core::sampling::{apply_mask, generate_quadrant_mask};
use nrs_core::video_io::synthetic_texture;
use nrs_core::Frame;

fn fixtures() -> Vec<(Frame, Frame)> {
    let texture = synthetic_texture(48, 40, 11);
    let shifted = Frame::from_fn(48, 40, |m, n| (texture.get(m, n) + 12.0).min(255.0));
    let noisy = Frame::from_fn(48, 40, |m, n| {
        let v = texture.get(m, n) + ((m * 31 + n * 17) % 13) as f64 - 6.0;
        v.clamp(0.0, 255.0)
    });
    let blurry = Frame::from_fn(48, 40, |m, n| {
        let m1 = (m + 1).min(39);
        let n1 = (n + 1).min(47);
        (texture.get(m, n) + texture.get(m1, n) + texture.get(m, n1) + texture.get(m1, n1)) / 4.0
    });
    let masked = {
        let mask = generate_quadrant_mask(48, 40, 3).unwrap();
        apply_mask(&texture, &mask).unwrap().frame
    };
    let other = synthetic_texture(48, 40, 99);
    vec![
        (texture.clone(), shifted),
        (texture.clone(), noisy),
        (texture.clone(), blurry),
        (texture.clone(), masked),
        (texture, other),
    ]
}

#[test]
fn separable_ssim_matches_direct_evaluation() {
    for (i, (a, b)) in fixtures().iter().enumerate() {
        for margin in [0usize, 4] {
            let fast = ssim(a, b, margin, SsimWindow::Gaussian).unwrap();
            let direct = reference_ssim(a, b, margin, true);
            assert!(
                (fast - direct).abs() < 1e-6,
                "fixture {i} margin {margin}: {fast} vs {direct}"
            );

            let fast_u = ssim(a, b, margin, SsimWindow::Uniform).unwrap();
            let direct_u = reference_ssim(a, b, margin, false);
            assert!(
                (fast_u - direct_u).abs() < 1e-6,
                "fixture {i} margin {margin} uniform: {fast_u} vs {direct_u}"
            );
        }
    }
}
