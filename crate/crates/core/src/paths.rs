//! Deformation paths in coordinate space.
//!
//! A zig-zag path from `z` to `w` moves one coordinate block at a time:
//! segment `k` occupies `t in [1 - 2^(1-k), 1 - 2^(-k))` and linearly
//! interpolates block `k` (length, twist and peripheral length of index `k`)
//! from `z` to `w`, with the earlier blocks already equal to `w`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::flutes::{
    classify_completeness_with, orthodistance_series, CompletenessStatus, CompletenessVerdict,
    FluteStructure,
};
use crate::fnspace::{Coord, CoordSeq, Peripheral};
use crate::rate::RateFn;

/// Segment index `k >= 1` containing `t in [0, 1)` and the local parameter.
fn zigzag_segment(t: f64) -> (u64, f64) {
    let mut k = 1u64;
    let mut start = 0.0;
    let mut width = 0.5;
    while t >= start + width {
        start += width;
        width *= 0.5;
        k += 1;
    }
    (k, (t - start) / width)
}

fn check_unit(name: &str, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(format!("{name} = {t} must lie in [0, 1]")));
    }
    Ok(())
}

fn lerp(a: f64, b: f64, u: f64) -> f64 {
    if u == 0.0 {
        a
    } else {
        (1.0 - u) * a + u * b
    }
}

fn zigzag(z: &CoordSeq, w: &CoordSeq, t: f64, peripheral: bool) -> Result<CoordSeq> {
    check_unit("t", t)?;
    if t == 1.0 {
        return Ok(w.clone());
    }
    let (k, u) = zigzag_segment(t);
    let mut coords = Vec::with_capacity(k as usize);
    let mut cuffs = Vec::new();
    for m in 1..=k {
        let (a, b) = (z.eval(m)?, w.eval(m)?);
        let s = if m < k { 1.0 } else { u };
        coords.push((
            m,
            Coord {
                length: if s == 1.0 { b.length } else { lerp(a.length, b.length, s) },
                twist: if s == 1.0 { b.twist } else { lerp(a.twist, b.twist, s) },
            },
        ));
        if peripheral {
            let (pa, pb) = (z.peripheral_length(m)?, w.peripheral_length(m)?);
            cuffs.push((m, if s == 1.0 { pb } else { lerp(pa, pb, s) }));
        }
    }
    z.set_overrides(coords)?.set_peripheral_values(cuffs)
}

/// Zig-zag path from `z` to `w` at time `t in [0, 1]`.
pub fn zigzag_eval(z: &CoordSeq, w: &CoordSeq, t: f64) -> Result<CoordSeq> {
    zigzag(z, w, t, true)
}

/// Straight line `(1 - s) z + s w` in Fenchel–Nielsen coordinates.
pub fn segment_eval(z: &CoordSeq, w: &CoordSeq, s: f64) -> Result<CoordSeq> {
    check_unit("s", s)?;
    CoordSeq::blend(z, w, s)
}

/// Peripheral lengths divided by `s >= 1`; `s = inf` makes every isolated
/// planar end a cusp.
pub fn peripheral_scale_eval(z: &CoordSeq, s: f64) -> Result<CoordSeq> {
    if s.is_nan() || s < 1.0 {
        return Err(domain(format!("peripheral scale s = {s} must be >= 1")));
    }
    if s == 1.0 {
        Ok(z.clone())
    } else if s.is_infinite() {
        z.clone().with_peripheral(Peripheral::cusps())
    } else {
        z.scale_peripheral(1.0 / s)
    }
}

/// A path in coordinate space, evaluated at `t in [0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PathSpec {
    Zigzag { from: CoordSeq, to: CoordSeq },
    Segment { from: CoordSeq, to: CoordSeq },
    /// `t` runs the scale `s = 1 / (1 - t)` from 1 to infinity.
    PeripheralScale { from: CoordSeq },
    /// Scale `from` to all cusps on `[0, 1/2]`, then zig-zag the remaining
    /// coordinates to `to` while its peripheral lengths grow back from 0.
    Concat { from: CoordSeq, to: CoordSeq },
}

impl PathSpec {
    pub fn start(&self) -> Result<CoordSeq> {
        self.eval(0.0)
    }

    pub fn end(&self) -> Result<CoordSeq> {
        self.eval(1.0)
    }

    pub fn eval(&self, t: f64) -> Result<CoordSeq> {
        check_unit("t", t)?;
        match self {
            PathSpec::Zigzag { from, to } => zigzag_eval(from, to, t),
            PathSpec::Segment { from, to } => segment_eval(from, to, t),
            PathSpec::PeripheralScale { from } => peripheral_scale_eval(from, 1.0 / (1.0 - t)),
            PathSpec::Concat { from, to } => {
                if t <= 0.5 {
                    return peripheral_scale_eval(from, 1.0 / (1.0 - 2.0 * t));
                }
                let u = 2.0 * t - 1.0;
                if u == 1.0 {
                    return Ok(to.clone());
                }
                let moved = zigzag(from, to, u, false)?;
                let grown = if u == 0.0 {
                    Peripheral::cusps()
                } else {
                    to.scale_peripheral(u)?.peripheral().clone()
                };
                moved.with_peripheral(grown)
            }
        }
    }
}

/// One row of the non-convexity table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonconvexityRow {
    pub n: u64,
    pub d_n: f64,
    pub cumulative: f64,
    pub asymptote: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonconvexityReport {
    pub truncation: u64,
    pub endpoints: [CompletenessVerdict; 2],
    pub midpoint: CompletenessVerdict,
    pub partial_sum: f64,
    pub lower_tail: f64,
    pub upper_tail: f64,
    pub rows: Vec<NonconvexityRow>,
}

impl NonconvexityReport {
    /// Both endpoints complete while the midpoint is not.
    pub fn shows_nonconvexity(&self) -> bool {
        self.endpoints
            .iter()
            .all(|v| v.status == CompletenessStatus::CitedComplete)
            && self.midpoint.status == CompletenessStatus::IncompleteByConvergence
    }
}

/// Half-twist flute with lengths `4 ln(m + 1)`, twists `twist` and
/// peripheral lengths `2^(-n)`.
pub fn half_twist_flute(twist: f64) -> Result<CoordSeq> {
    CoordSeq::new(RateFn::log(4.0)?)?
        .with_twists(RateFn::constant(twist)?)?
        .with_peripheral(Peripheral::from_family(RateFn::geometric(1.0, 0.5)?.into())?)
}

/// Two half-twist flutes whose straight-line midpoint is incomplete.
pub fn nonconvexity_experiment(truncation: u64) -> Result<NonconvexityReport> {
    if truncation < 10 {
        return Err(domain(format!("truncation must be >= 10, got {truncation}")));
    }
    let x0 = half_twist_flute(0.5)?;
    let x1 = half_twist_flute(-0.5)?;
    let mid = FluteStructure::new(segment_eval(&x0, &x1, 0.5)?)?;
    let verdict = |x: &CoordSeq| classify_completeness_with(&FluteStructure::new(x.clone())?, truncation);
    let endpoints = [verdict(&x0)?, verdict(&x1)?];
    let midpoint = classify_completeness_with(&mid, truncation)?;
    let series = orthodistance_series(&mid, truncation)?;
    let rows = series
        .rows
        .iter()
        .map(|r| {
            let n = r.n as f64;
            let asymptote = 2.0 * (1.0 / (n * n) + 1.0 / ((n + 1.0) * (n + 1.0)));
            NonconvexityRow {
                n: r.n,
                d_n: r.term,
                cumulative: r.cumulative,
                asymptote,
                ratio: r.term / asymptote,
            }
        })
        .collect();
    Ok(NonconvexityReport {
        truncation,
        endpoints,
        midpoint,
        partial_sum: series.partial_sum,
        lower_tail: series.lower_tail,
        upper_tail: series.upper_tail,
        rows,
    })
}
