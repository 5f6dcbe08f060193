//! Prints an ASCII map of propagation zones for the reference scene.
//!
//! Legend: `L` LOS only, `M` LOS + reflections, `N` reflections only,
//! `#` blind, `p` partial (elements disagree on LOS), `A` array.

use nftrack_core::propagation::{build_path_set, PathKind};
use nftrack_core::scenario::reference_scenario;
use nftrack_core::Point;

fn zone(sc: &nftrack_core::Scenario, p: Point) -> char {
    let ps = build_path_set(p, &sc.array, sc.environment.surfaces());
    let los = ps.per_element.iter().any(|e| e.iter().any(|r| r.kind == PathKind::Los));
    let nlos = ps.per_element.iter().any(|e| e.iter().any(|r| r.kind != PathKind::Los));
    match (los, nlos) {
        (false, false) => '#',
        (false, true) => 'N',
        (true, false) => 'L',
        (true, true) => 'M',
    }
}

fn main() {
    let sc = reference_scenario();
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if !args.is_empty() {
        for xy in args.chunks(2) {
            println!("({}, {}) -> {}", xy[0], xy[1], zone(&sc, Point::new(xy[0], xy[1])));
        }
        return;
    }
    let cell = 0.25;
    let (w, h) = (20.0, 15.0);
    let rows = (h / cell) as usize;
    let cols = (w / cell) as usize;
    for j in (0..=rows).rev() {
        let y = j as f64 * cell;
        let line: String = (0..=cols)
            .map(|i| {
                let p = Point::new(i as f64 * cell, y);
                if sc.array.elements().iter().any(|e| e.distance(p) < cell) {
                    return 'A';
                }
                let ps = build_path_set(p, &sc.array, sc.environment.surfaces());
                let los = ps.per_element.iter().filter(|e| e.iter().any(|r| r.kind == PathKind::Los)).count();
                let nlos = ps.per_element.iter().filter(|e| e.iter().any(|r| r.kind != PathKind::Los)).count();
                let n = sc.array.len();
                match (los, nlos) {
                    (0, 0) => '#',
                    (l, _) if l > 0 && l < n => 'p',
                    (0, _) => 'N',
                    (_, 0) => 'L',
                    _ => 'M',
                }
            })
            .collect();
        println!("{y:5.2} {line}");
    }
    let traj_zones: Vec<char> = sc.trajectory.iter().map(|&p| zone(&sc, p)).collect();
    let mut compressed = String::new();
    for (k, c) in traj_zones.into_iter().enumerate() {
        if !compressed.ends_with(c) {
            compressed.push(c);
            let p = sc.trajectory[k];
            eprintln!("step {k:4} ({:6.2}, {:6.2}) enters {c}", p.x, p.y);
        }
    }
    println!("trajectory: {} steps, zones {}", sc.trajectory.len(), compressed);
}
