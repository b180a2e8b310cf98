//! Benchmark fixtures shared by the criterion targets.

use fenchel_core::paths::half_twist_flute;
use fenchel_core::{CoordSeq, PantsGeom, RateFn};

/// Deterministic pants spread over short, moderate and long cuffs.
pub fn pants_grid() -> Vec<PantsGeom> {
    let ls = [0.05, 0.5, 2.0, 8.0, 40.0];
    let mut out = Vec::with_capacity(ls.len().pow(3));
    for &a in &ls {
        for &b in &ls {
            for &c in &[0.0, 0.5, 2.0, 8.0, 40.0] {
                out.push(PantsGeom::new(a, b, c).expect("valid lengths"));
            }
        }
    }
    out
}

/// Two structures with overrides, so distance evaluation touches both paths.
pub fn metric_pair() -> (CoordSeq, CoordSeq) {
    let z = half_twist_flute(0.5).expect("valid flute");
    let w = CoordSeq::new(RateFn::power_log(1.0, 0.5, 0.0).expect("rate"))
        .expect("valid lengths")
        .with_twists(RateFn::constant(0.25).expect("rate"))
        .expect("valid twists");
    (z, w)
}
