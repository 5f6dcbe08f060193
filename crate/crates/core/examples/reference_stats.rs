//! Quick look at tracking accuracy and timing on the reference scene.

use std::time::Instant;

use nftrack_core::scenario::{reference_scenario, rmse_map, run_tracking, sweep_eta, MapRegion};
use nftrack_core::{AwarenessSet, ChannelModel};

fn main() {
    let sc = reference_scenario();
    let full = AwarenessSet::full(sc.environment.len());
    for model in [ChannelModel::NearField, ChannelModel::FarField] {
        let t = Instant::now();
        let recs = run_tracking(&sc, &full, model).unwrap();
        let n = recs.len() as f64;
        let rmse = (recs.iter().map(|r| r.error * r.error).sum::<f64>() / n).sqrt();
        let max_step = recs.iter().map(|r| r.elapsed).fold(0.0, f64::max);
        let mean_step = recs.iter().map(|r| r.elapsed).sum::<f64>() / n;
        println!(
            "track {}: rmse {rmse:.4} m, mean step {mean_step:.4} s, max step {max_step:.4} s, total {:.1} s",
            model.label(),
            t.elapsed().as_secs_f64()
        );
    }

    let t = Instant::now();
    let cells = rmse_map(&sc, &sc.map_positions(), 5, ChannelModel::NearField, &full).unwrap();
    let vals: Vec<f64> = cells.iter().filter_map(|c| c.rmse).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let max = vals.iter().cloned().fold(0.0, f64::max);
    println!("map nf eta=1: {} cells, mean {mean:.4}, max {max:.4}, {:.1} s", vals.len(), t.elapsed().as_secs_f64());

    let coarse = MapRegion { x_min: 1.0, x_max: 19.0, y_min: 1.0, y_max: 14.0, spacing: 3.0 }.positions();
    let t = Instant::now();
    let rows = sweep_eta(&sc, &coarse, 4, &[ChannelModel::NearField, ChannelModel::FarField]).unwrap();
    for r in rows {
        println!("eta {:.3} {} rmse {:.4}", r.eta, r.model.label(), r.rmse);
    }
    println!("sweep {:.1} s", t.elapsed().as_secs_f64());
}
