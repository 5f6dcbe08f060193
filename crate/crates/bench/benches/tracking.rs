use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nftrack_core::propagation::channel_matrix;
use nftrack_core::scenario::{reference_scenario, stream_rng};
use nftrack_core::signal::synthesize_rx;
use nftrack_core::tracker::{estimate_step, TrackState};
use nftrack_core::{AwarenessSet, ChannelModel, ChannelPredictor};

fn channel_prediction(c: &mut Criterion) {
    let sc = reference_scenario();
    let predictor = ChannelPredictor::new(&sc.array, sc.environment.surfaces(), &sc.ofdm);
    let p = sc.trajectory[40];
    let mut g = c.benchmark_group("channel");
    g.bench_function("predict_nf", |b| b.iter(|| predictor.channel(black_box(p), ChannelModel::NearField)));
    g.bench_function("predict_ff", |b| b.iter(|| predictor.channel(black_box(p), ChannelModel::FarField)));
    g.bench_function("true_channel", |b| {
        b.iter(|| channel_matrix(black_box(p), &sc.array, sc.environment.surfaces(), &sc.ofdm))
    });
    g.finish();
}

fn tracking_step(c: &mut Criterion) {
    let sc = reference_scenario();
    let known = sc.environment.known_surfaces(&AwarenessSet::full(sc.environment.len()));
    let predictor = ChannelPredictor::new(&sc.array, &known, &sc.ofdm);
    let p = sc.trajectory[40];
    let h = channel_matrix(p, &sc.array, sc.environment.surfaces(), &sc.ofdm);
    let rx = synthesize_rx(40, &h, &sc.signal, &sc.ofdm, &mut stream_rng(sc.seed, 1, 0, 40)).unwrap();
    let state = TrackState::new(sc.trajectory[39]);

    let mut g = c.benchmark_group("estimate_step");
    g.sample_size(20);
    for model in [ChannelModel::NearField, ChannelModel::FarField] {
        g.bench_function(model.label(), |b| {
            b.iter(|| estimate_step(black_box(&rx), &state, &sc.tracker, &predictor, model))
        });
    }
    g.finish();
}

criterion_group!(benches, channel_prediction, tracking_step);
criterion_main!(benches);
