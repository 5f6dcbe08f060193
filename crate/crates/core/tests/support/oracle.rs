//! Brute-force occlusion and Fermat oracle for the path indicators, shared
//! by the oracle test and the acceptance suite.
//!
//! Occlusion: the distance from a point sliding along a leg to a wall
//! segment is convex in the leg parameter, so its minimum (with the end
//! neighbourhoods excluded) is found by ternary search and compared with the
//! tolerance. Reflection: the bounce length over the surface extent is
//! convex, so a dense sweep followed by a ternary refinement locates the
//! Fermat point; a valid bounce needs that point strictly inside the extent
//! and both endpoints on the same side.

use nftrack_core::propagation::{los_indicator, nlos_indicator};
use nftrack_core::{Point, ReflectModel, Segment, Surface, EPS_GEOM};
use rand::Rng;

pub const MARGIN: f64 = 10.0 * EPS_GEOM;

pub fn point_segment_distance(q: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let t = ((q - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
    (a + d * t - q).norm()
}

pub fn ternary_min(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

#[derive(Debug, PartialEq)]
pub enum Verdict {
    Yes,
    No,
    TooClose,
}

/// Does `wall` come within tolerance of the leg `a -> b`, ignoring the
/// tolerance balls around both ends?
pub fn oracle_blocked(a: Point, b: Point, wall: &Segment) -> Verdict {
    let len = a.distance(b);
    let skip = EPS_GEOM / len;
    let at = |t: f64| point_segment_distance(a + (b - a) * t, wall.a(), wall.b());
    let (_, dmin) = ternary_min(skip, 1.0 - skip, at);
    // Wall endpoints sitting near the excluded end balls are ambiguous.
    let near_end = [wall.a(), wall.b()].iter().any(|&w| {
        let (da, db) = (w.distance(a), w.distance(b));
        (da - EPS_GEOM).abs() < MARGIN || (db - EPS_GEOM).abs() < MARGIN
    });
    let crossing_near_end = {
        let d = b - a;
        let (l1, l2) = (wall.signed_distance(a), wall.signed_distance(b));
        l1 * l2 < 0.0 && {
            let x = a + d * (l1 / (l1 - l2));
            x.distance(a) < EPS_GEOM + MARGIN || x.distance(b) < EPS_GEOM + MARGIN
        }
    };
    if near_end || crossing_near_end || (dmin > EPS_GEOM * 1e-3 && dmin < EPS_GEOM + MARGIN) {
        Verdict::TooClose
    } else if dmin <= EPS_GEOM {
        Verdict::Yes
    } else {
        Verdict::No
    }
}

pub fn oracle_los(antenna: Point, p: Point, surfaces: &[Surface]) -> Verdict {
    let mut close = false;
    for s in surfaces {
        match oracle_blocked(antenna, p, s.geom()) {
            Verdict::Yes => return Verdict::No,
            Verdict::TooClose => close = true,
            Verdict::No => {}
        }
    }
    if close {
        Verdict::TooClose
    } else {
        Verdict::Yes
    }
}

pub fn oracle_nlos(antenna: Point, via: &Surface, p: Point, surfaces: &[Surface]) -> Verdict {
    let g = via.geom();
    let side = |q: Point| (g.b() - g.a()).cross(q - g.a()) / g.length();
    let (sa, sp) = (side(antenna), side(p));
    if sa.abs() < MARGIN || sp.abs() < MARGIN {
        return Verdict::TooClose;
    }
    if sa * sp < 0.0 {
        return Verdict::No;
    }
    let r_at = |t: f64| g.a() + (g.b() - g.a()) * t;
    let bounce = |t: f64| antenna.distance(r_at(t)) + r_at(t).distance(p);
    // Dense sweep, then refine around the best sample.
    let samples = 10_000;
    let best = (0..=samples).min_by(|&i, &j| bounce(i as f64 / samples as f64).total_cmp(&bounce(j as f64 / samples as f64)));
    let i = best.unwrap() as f64;
    let lo = ((i - 1.0) / samples as f64).max(0.0);
    let hi = ((i + 1.0) / samples as f64).min(1.0);
    let (t, _) = ternary_min(lo, hi, bounce);
    let slack = MARGIN / g.length();
    if t < slack || t > 1.0 - slack {
        // Either the minimizer sits on a clamped end (no specular point) or
        // it is ambiguous.
        let unclamped_near = t.min(1.0 - t) > EPS_GEOM / g.length() * 1e-3;
        return if unclamped_near { Verdict::TooClose } else { Verdict::No };
    }
    let r = r_at(t);
    let mut close = false;
    for w in surfaces.iter().filter(|w| w.id() != via.id()) {
        for (a, b) in [(antenna, r), (r, p)] {
            match oracle_blocked(a, b, w.geom()) {
                Verdict::Yes => return Verdict::No,
                Verdict::TooClose => close = true,
                Verdict::No => {}
            }
        }
    }
    if close {
        Verdict::TooClose
    } else {
        Verdict::Yes
    }
}

fn random_point(rng: &mut impl Rng) -> Point {
    Point::new(rng.random_range(0.0..10.0), rng.random_range(0.0..10.0))
}

/// Comparison tallies over a batch of random scenes.
#[derive(Debug, Default, Clone, Copy)]
pub struct OracleTally {
    pub compared: usize,
    pub skipped: usize,
    pub positives: usize,
    pub mismatches: usize,
}

/// Random scenes with at most 3 surfaces and 8 elements; every indicator
/// value is compared with the oracle unless the oracle calls it ambiguous.
pub fn compare_random_scenes(rng: &mut impl Rng, scenes: usize) -> OracleTally {
    let mut t = OracleTally::default();
    for _ in 0..scenes {
        let s_count = rng.random_range(1..=3);
        let surfaces: Vec<Surface> = (0..s_count)
            .map(|id| {
                let a = random_point(rng);
                let b = a + Point::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
                let geom = Segment::new(a, b).unwrap();
                Surface::new(id, geom, ReflectModel::ConstantBeta(0.5)).unwrap()
            })
            .collect();
        let elements: Vec<Point> = (0..rng.random_range(1..=8)).map(|_| random_point(rng)).collect();
        let p = random_point(rng);

        for &e in &elements {
            match oracle_los(e, p, &surfaces) {
                Verdict::TooClose => t.skipped += 1,
                v => {
                    t.compared += 1;
                    t.mismatches += (los_indicator(e, p, &surfaces) != (v == Verdict::Yes)) as usize;
                }
            }
            for s in &surfaces {
                match oracle_nlos(e, s, p, &surfaces) {
                    Verdict::TooClose => t.skipped += 1,
                    v => {
                        t.compared += 1;
                        let expected = v == Verdict::Yes;
                        t.positives += expected as usize;
                        t.mismatches += (nlos_indicator(e, s, p, &surfaces) != expected) as usize;
                    }
                }
            }
        }
    }
    t
}
