use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use nrs_bench::{quadrant_mask, sampled_texture, shifted_pair};
use nrs_core::frame::SampleClass;
use nrs_core::fsr::{generate_block_model, reconstruct_frame, weight_window, FsrParams};
use nrs_core::metrics::{psnr, ssim, SsimWindow};
use nrs_core::motion::{estimate_dense_motion, FrameView, MeParams};
use nrs_core::video_io::synthetic_texture;

fn bench_block_model(c: &mut Criterion) {
    let params = FsrParams::default();
    let n = params.fft_size;
    let mask = quadrant_mask(n, 42);
    let classes: Vec<SampleClass> = mask
        .bits()
        .iter()
        .map(|&b| if b { SampleClass::Acquired } else { SampleClass::Missing })
        .collect();
    let window = weight_window(&classes, &params).unwrap();
    let texture = synthetic_texture(n, n, 7);
    let area: Vec<f64> = texture
        .samples()
        .iter()
        .zip(mask.bits())
        .map(|(&v, &b)| if b { v } else { 0.0 })
        .collect();

    c.bench_function("block_model_32x32_100it", |b| {
        b.iter(|| generate_block_model(black_box(&area), &window, &params).unwrap())
    });
}

fn bench_frame_reconstruction(c: &mut Criterion) {
    let params = FsrParams::default();
    let mut group = c.benchmark_group("reconstruct_frame");
    group.sample_size(10);
    for size in [64usize, 128] {
        let sampled = sampled_texture(size, 3);
        group.bench_with_input(BenchmarkId::from_parameter(size), &size, |b, _| {
            b.iter(|| reconstruct_frame(black_box(&sampled), None, &params).unwrap())
        });
    }
    group.finish();
}

fn bench_motion(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_motion_128");
    group.sample_size(10);
    for range in [8usize, 16] {
        let params = MeParams {
            window: 17,
            search_range: range,
            min_overlap: 16,
        };
        let (current, reference) = shifted_pair(128, 9, 2);
        group.bench_with_input(BenchmarkId::from_parameter(range), &range, |b, _| {
            b.iter(|| {
                estimate_dense_motion(
                    FrameView::full(black_box(&current)),
                    FrameView::full(&reference),
                    &params,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_metrics(c: &mut Criterion) {
    let a = synthetic_texture(128, 128, 1);
    let b_frame = synthetic_texture(128, 128, 2);
    c.bench_function("psnr_128", |b| {
        b.iter(|| psnr(black_box(&a), &b_frame, 4).unwrap())
    });
    c.bench_function("ssim_128", |b| {
        b.iter(|| ssim(black_box(&a), &b_frame, 4, SsimWindow::Gaussian).unwrap())
    });
}

criterion_group!(
    benches,
    bench_block_model,
    bench_frame_reconstruction,
    bench_motion,
    bench_metrics
);
criterion_main!(benches);
