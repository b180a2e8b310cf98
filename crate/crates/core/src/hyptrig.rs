//! Hyperbolic trigonometry of a pair of pants.
//!
//! A pair of pants with boundary lengths `l1`, `l2`, `lp` is the double of a
//! right-angled hexagon whose alternate sides are `a = l1/2`, `b = l2/2`,
//! `c = lp/2`. The orthodistance between the `l1` and `l2` boundaries is the
//! hexagon side `d` joining `a` and `b`, given by
//!
//! ```text
//! cosh d = (cosh c + cosh a cosh b) / (sinh a sinh b)
//! ```
//!
//! which we evaluate through the cancellation-free form
//! `sinh^2(d/2) = (cosh c + cosh(a - b)) / (2 sinh a sinh b)`.
//!
//! Cutting the hexagon along the common perpendicular between `c` and `d`
//! gives two right-angled pentagons. With `c = c1 + c2` and `d = d1 + d2`,
//! the pentagon relations read `sinh d1 = cosh c1 / sinh a` and
//! `sinh d2 = cosh c2 / sinh b`, while the perpendicular `h` satisfies
//! `cosh h = coth c1 coth d1 = coth c2 coth d2`. The second pair is exactly
//! the stationarity condition of `d1 + d2` as a function of the split, so
//! [`pentagon_split`] recovers the true foot of the perpendicular by
//! minimizing `d1 + d2`; this gives an evaluation route independent of the
//! hexagon rule.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Above this half-length, cosh/sinh combinations are evaluated as logarithms.
const LOG_DOMAIN_THRESHOLD: f64 = 30.0;

/// A hyperbolic pair of pants, given by its three boundary lengths.
///
/// A zero length encodes a cusp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PantsGeom {
    pub l1: f64,
    pub l2: f64,
    pub lp: f64,
}

impl PantsGeom {
    pub fn new(l1: f64, l2: f64, lp: f64) -> Result<Self> {
        for (name, v) in [("l1", l1), ("l2", l2), ("lp", lp)] {
            if !v.is_finite() || v < 0.0 {
                return Err(domain(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        Ok(Self { l1, l2, lp })
    }

    /// Hexagon half-lengths `(a, b, c)`.
    pub fn halves(&self) -> (f64, f64, f64) {
        (self.l1 / 2.0, self.l2 / 2.0, self.lp / 2.0)
    }

    fn check_cuffs(&self) -> Result<()> {
        if !(self.l1 > 0.0 && self.l2 > 0.0) {
            return Err(domain(format!(
                "orthodistance needs l1 > 0 and l2 > 0 (got l1 = {}, l2 = {})",
                self.l1, self.l2
            )));
        }
        Ok(())
    }
}

/// Collar sandwich for the orthodistance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthoBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Result of splitting the hexagon into two right-angled pentagons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PentagonSplit {
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
}

impl PentagonSplit {
    pub fn total(&self) -> f64 {
        self.d1 + self.d2
    }
}

/// Half-width `r(x) = arcsinh(1 / sinh x)` of the standard collar about a
/// geodesic of half-length `x`.
pub fn collar_width(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain(format!("collar width needs finite x > 0, got {x}")));
    }
    Ok(inv_sinh(x).asinh())
}

/// `1 / sinh x` without overflow, accurate for both tiny and large `x`.
fn inv_sinh(x: f64) -> f64 {
    2.0 * (-x).exp() / -(-2.0 * x).exp_m1()
}

fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
}

fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    x + (-(-2.0 * x).exp_m1()).ln() - std::f64::consts::LN_2
}

fn ln_add_exp(u: f64, v: f64) -> f64 {
    let (hi, lo) = if u >= v { (u, v) } else { (v, u) };
    hi + (lo - hi).exp().ln_1p()
}

/// `arcsinh(exp(log_y))` for `log_y` of any magnitude.
fn asinh_exp(log_y: f64) -> f64 {
    if log_y > 300.0 {
        log_y + std::f64::consts::LN_2
    } else {
        log_y.exp().asinh()
    }
}

/// Distance between the `l1` and `l2` boundary geodesics (hexagon rule).
pub fn orthodistance(p: &PantsGeom) -> Result<f64> {
    p.check_cuffs()?;
    let (a, b, c) = p.halves();
    let half = if a.max(b).max(c) <= LOG_DOMAIN_THRESHOLD {
        let s2 = (c.cosh() + (a - b).cosh()) / (2.0 * a.sinh() * b.sinh());
        s2.sqrt().asinh()
    } else {
        let ln_num = ln_add_exp(ln_cosh(c), ln_cosh(a - b));
        let ln_den = std::f64::consts::LN_2 + ln_sinh(a) + ln_sinh(b);
        asinh_exp(0.5 * (ln_num - ln_den))
    };
    Ok(2.0 * half)
}

/// Collar lower bound `r(l1/2) + r(l2/2)` and upper bound `lower + lp/2`.
pub fn orthodistance_bounds(p: &PantsGeom) -> Result<OrthoBounds> {
    p.check_cuffs()?;
    let (a, b, c) = p.halves();
    let lower = collar_width(a)? + collar_width(b)?;
    Ok(OrthoBounds {
        lower,
        upper: lower + c,
    })
}

fn pentagon_leg(c_part: f64, half_cuff: f64) -> f64 {
    if c_part.max(half_cuff) <= LOG_DOMAIN_THRESHOLD {
        (c_part.cosh() * inv_sinh(half_cuff)).asinh()
    } else {
        asinh_exp(ln_cosh(c_part) - ln_sinh(half_cuff))
    }
}

/// Splits `c = lp/2` at the foot of the perpendicular to `d`.
///
/// The split minimizes `d1(c1) + d2(c - c1)`. The objective is strictly
/// convex, and its derivative `tanh c1 tanh d1 - tanh c2 tanh d2` is
/// increasing in `c1`, so the minimizer is found by bisection on `[0, c]`.
pub fn pentagon_split(p: &PantsGeom) -> Result<PentagonSplit> {
    p.check_cuffs()?;
    let (a, b, c) = p.halves();
    let split = |c1: f64| -> PentagonSplit {
        let c2 = c - c1;
        PentagonSplit {
            c1,
            c2,
            d1: pentagon_leg(c1, a),
            d2: pentagon_leg(c2, b),
        }
    };
    if c == 0.0 {
        return Ok(split(0.0));
    }
    if a == b {
        return Ok(split(c / 2.0));
    }
    let slope = |c1: f64| -> f64 {
        let s = split(c1);
        s.c1.tanh() * s.d1.tanh() - s.c2.tanh() * s.d2.tanh()
    };
    let (mut lo, mut hi) = (0.0_f64, c);
    let (f_lo, f_hi) = (slope(lo), slope(hi));
    if !(f_lo <= 0.0 && f_hi >= 0.0) {
        return Err(Error::Numerical {
            message: "pentagon split slope does not change sign".into(),
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(split(mid));
        }
        let f = slope(mid);
        if f.is_nan() {
            break;
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (f_lo, f_hi) = (slope(lo), slope(hi));
    if hi - lo <= 1e-12 * c.max(1.0) {
        return Ok(split(0.5 * (lo + hi)));
    }
    Err(Error::Numerical {
        message: "pentagon split bisection did not converge".into(),
        lo,
        hi,
        f_lo,
        f_hi,
    })
}
