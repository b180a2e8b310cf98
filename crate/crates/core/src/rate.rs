//! Symbolic rate functions `A * ratio^m * m^(-p) * ln(m + 1)^q`.
//!
//! Every family the coordinate sequences need lives in this algebra:
//! constants, logarithmic growth (`4 ln(m + 1)`), power decay
//! (`m^(-1/r)`), power growth of twist counts (`m^(1/n)`) and geometric
//! peripheral lengths (`2^(-m)`). The algebra is closed under products and
//! reciprocals, and asymptotic questions (boundedness, summability,
//! comparison with `m^(-e)`) reduce to exact comparisons of the exponents.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// Exponents closer than this (relative) are treated as equal.
pub const EXPONENT_TOL: f64 = 1e-12;

pub(crate) fn exp_cmp(x: f64, y: f64) -> Ordering {
    let scale = 1f64.max(x.abs()).max(y.abs());
    if (x - y).abs() <= EXPONENT_TOL * scale {
        Ordering::Equal
    } else {
        x.total_cmp(&y)
    }
}

pub(crate) fn exp_eq(x: f64, y: f64) -> bool {
    exp_cmp(x, y) == Ordering::Equal
}

/// A single term `A * ratio^m * m^(-p) * ln(m + 1)^q`, evaluated at `m >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RateRepr", into = "RateRepr")]
pub struct RateFn {
    amplitude: f64,
    ratio: f64,
    p: f64,
    q: f64,
}

/// Growth class of a term, ignoring the amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Growth {
    pub ratio: f64,
    pub p: f64,
    pub q: f64,
}

impl Growth {
    /// Asymptotic comparison: `Greater` means `self` grows strictly faster.
    pub fn cmp_asymptotic(&self, other: &Growth) -> Ordering {
        exp_cmp(self.ratio, other.ratio)
            .then(exp_cmp(other.p, self.p))
            .then(exp_cmp(self.q, other.q))
    }

    pub fn is_bounded(&self) -> bool {
        match exp_cmp(self.ratio, 1.0) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match exp_cmp(self.p, 0.0) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => exp_cmp(self.q, 0.0) != Ordering::Greater,
            },
        }
    }

    pub fn tends_to_zero(&self) -> bool {
        match exp_cmp(self.ratio, 1.0) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match exp_cmp(self.p, 0.0) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => exp_cmp(self.q, 0.0) == Ordering::Less,
            },
        }
    }

    pub fn is_constant(&self) -> bool {
        exp_eq(self.ratio, 1.0) && exp_eq(self.p, 0.0) && exp_eq(self.q, 0.0)
    }

    /// Whether `sum_m m^... ` of this class converges.
    pub fn is_summable(&self) -> bool {
        match exp_cmp(self.ratio, 1.0) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match exp_cmp(self.p, 1.0) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => exp_cmp(self.q, -1.0) == Ordering::Less,
            },
        }
    }

    /// Whether this class is bounded below by a multiple of `m^(-e)`.
    /// `e = f64::INFINITY` asks for some polynomial lower bound.
    pub fn dominates_power(&self, e: f64) -> bool {
        match exp_cmp(self.ratio, 1.0) {
            Ordering::Less => false,
            Ordering::Greater => true,
            Ordering::Equal => {
                if e.is_infinite() {
                    return true;
                }
                match exp_cmp(self.p, e) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => exp_cmp(self.q, 0.0) != Ordering::Less,
                }
            }
        }
    }
}

impl RateFn {
    pub fn new(amplitude: f64, ratio: f64, p: f64, q: f64) -> Result<Self> {
        if !amplitude.is_finite() || amplitude == 0.0 {
            return Err(config(format!("amplitude must be finite and nonzero, got {amplitude}")));
        }
        if !ratio.is_finite() || ratio <= 0.0 {
            return Err(config(format!("ratio must be finite and > 0, got {ratio}")));
        }
        if !p.is_finite() || !q.is_finite() {
            return Err(config(format!("exponents must be finite, got p = {p}, q = {q}")));
        }
        Ok(Self {
            amplitude,
            ratio,
            p,
            q,
        })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(value, 1.0, 0.0, 0.0)
    }

    /// `A * m^(-p) * ln(m + 1)^q`.
    pub fn power_log(amplitude: f64, p: f64, q: f64) -> Result<Self> {
        Self::new(amplitude, 1.0, p, q)
    }

    /// `A * ln(m + 1)`.
    pub fn log(amplitude: f64) -> Result<Self> {
        Self::new(amplitude, 1.0, 0.0, 1.0)
    }

    /// `A * ratio^m`.
    pub fn geometric(amplitude: f64, ratio: f64) -> Result<Self> {
        Self::new(amplitude, ratio, 0.0, 0.0)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn growth(&self) -> Growth {
        Growth {
            ratio: self.ratio,
            p: self.p,
            q: self.q,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.ratio == 1.0 && self.p == 0.0 && self.q == 0.0
    }

    fn same_shape(&self, other: &RateFn) -> bool {
        self.ratio == other.ratio && self.p == other.p && self.q == other.q
    }

    pub fn eval(&self, m: u64) -> f64 {
        let x = m as f64;
        let mut v = self.amplitude;
        if self.ratio != 1.0 {
            v *= self.ratio.powf(x);
        }
        if self.p != 0.0 {
            v *= x.powf(-self.p);
        }
        if self.q != 0.0 {
            v *= x.ln_1p().powf(self.q);
        }
        v
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.amplitude * factor, self.ratio, self.p, self.q)
    }

    pub fn mul(&self, other: &RateFn) -> Result<Self> {
        Self::new(
            self.amplitude * other.amplitude,
            self.ratio * other.ratio,
            self.p + other.p,
            self.q + other.q,
        )
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(1.0 / self.amplitude, 1.0 / self.ratio, -self.p, -self.q)
    }

    /// Asymptotic comparison by `(ratio, -p, q, |A|)`.
    pub fn cmp_asymptotic(&self, other: &RateFn) -> Ordering {
        self.growth()
            .cmp_asymptotic(&other.growth())
            .then(self.amplitude.abs().total_cmp(&other.amplitude.abs()))
    }

    /// Certified upper bound on `sum_{m >= k} |f(m)|`, or `+inf` when no
    /// bound can be certified (including divergent series).
    pub fn tail_upper(&self, k: u64) -> f64 {
        let k = k.max(1);
        let a = self.amplitude.abs();
        let g = self.growth();
        if !g.is_summable() {
            return f64::INFINITY;
        }
        let kf = k as f64;
        match exp_cmp(self.ratio, 1.0) {
            Ordering::Less => {
                let step = |j: f64| {
                    self.ratio
                        * ((j + 1.0) / j).powf((-self.p).max(0.0))
                        * ((j + 2.0).ln() / (j + 1.0).ln()).powf(self.q.max(0.0))
                };
                // Sum explicitly until the term ratio is certified below 1.
                let mut j = k;
                while step(j as f64) >= 1.0 {
                    j = j.saturating_mul(2);
                    if j > 1 << 24 {
                        return f64::INFINITY;
                    }
                }
                let head: f64 = (k..j).map(|m| self.eval(m).abs()).sum();
                head + self.eval(j).abs() / (1.0 - step(j as f64))
            }
            Ordering::Greater => f64::INFINITY,
            Ordering::Equal => {
                let p = self.p;
                let q = self.q;
                if exp_cmp(p, 1.0) == Ordering::Greater {
                    if q <= 0.0 {
                        a * (kf + 1.0).ln().powf(q) * power_tail(p, kf)
                    } else {
                        let eps = (p - 1.0) / 2.0;
                        let c = (q / (std::f64::consts::E * eps)).powf(q) * 2f64.powf(eps);
                        a * c * power_tail(p - eps, kf)
                    }
                } else if k < 2 {
                    self.eval(1).abs() + self.tail_upper(2)
                } else {
                    // p == 1, q < -1
                    self.eval(k).abs() + a * kf.ln().powf(q + 1.0) / (-q - 1.0)
                }
            }
        }
    }
}

/// `sum_{m >= k} m^(-s) <= k^(-s) + k^(1-s)/(s-1)` for `s > 1`.
fn power_tail(s: f64, k: f64) -> f64 {
    k.powf(-s) + k.powf(1.0 - s) / (s - 1.0)
}

/// Serialized form; accepts `{"const": v}`, `{"A", "p", "q", "ratio"}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct RateRepr {
    #[serde(rename = "const", default, skip_serializing_if = "Option::is_none")]
    constant: Option<f64>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
}

impl TryFrom<RateRepr> for RateFn {
    type Error = crate::Error;

    fn try_from(r: RateRepr) -> Result<Self> {
        match (r.constant, r.amplitude) {
            (Some(c), None) => {
                if r.p.is_some() || r.q.is_some() || r.ratio.is_some() {
                    return Err(config("'const' cannot be combined with p, q or ratio"));
                }
                RateFn::constant(c)
            }
            (None, Some(a)) => RateFn::new(
                a,
                r.ratio.unwrap_or(1.0),
                r.p.unwrap_or(0.0),
                r.q.unwrap_or(0.0),
            ),
            (Some(_), Some(_)) => Err(config("give either 'const' or 'A', not both")),
            (None, None) => Err(config("rate function needs 'const' or 'A'")),
        }
    }
}

impl From<RateFn> for RateRepr {
    fn from(f: RateFn) -> Self {
        if f.is_constant() {
            return RateRepr {
                constant: Some(f.amplitude),
                ..Default::default()
            };
        }
        let nz = |v: f64, default: f64| (v != default).then_some(v);
        RateRepr {
            constant: None,
            amplitude: Some(f.amplitude),
            p: nz(f.p, 0.0),
            q: nz(f.q, 0.0),
            ratio: nz(f.ratio, 1.0),
        }
    }
}

/// A finite sum of rate terms with like shapes merged.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RateSum {
    terms: Vec<RateFn>,
}

impl RateSum {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn new(terms: impl IntoIterator<Item = RateFn>) -> Self {
        let mut out = Self::zero();
        for t in terms {
            out.push(t);
        }
        out
    }

    fn push(&mut self, t: RateFn) {
        if let Some(existing) = self.terms.iter_mut().find(|e| e.same_shape(&t)) {
            existing.amplitude += t.amplitude;
            if existing.amplitude == 0.0 {
                let shape = *existing;
                self.terms.retain(|e| !e.same_shape(&shape));
            }
        } else {
            self.terms.push(t);
        }
    }

    pub fn terms(&self) -> &[RateFn] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, m: u64) -> f64 {
        self.terms.iter().map(|t| t.eval(m)).sum()
    }

    pub fn all_positive(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude > 0.0)
    }

    /// Fastest-growing term.
    pub fn dominant(&self) -> Option<&RateFn> {
        self.terms
            .iter()
            .max_by(|a, b| a.growth().cmp_asymptotic(&b.growth()))
    }

    /// Growth class of the sum (exact when amplitudes are positive).
    pub fn growth(&self) -> Option<Growth> {
        self.dominant().map(|t| t.growth())
    }

    pub fn is_bounded(&self) -> bool {
        self.growth().is_none_or(|g| g.is_bounded())
    }

    pub fn is_summable(&self) -> bool {
        self.terms.iter().all(|t| t.growth().is_summable())
    }

    pub fn tail_upper(&self, k: u64) -> f64 {
        self.terms.iter().map(|t| t.tail_upper(k)).sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if factor == 0.0 {
            return Ok(Self::zero());
        }
        Ok(Self::new(
            self.terms
                .iter()
                .map(|t| t.scaled(factor))
                .collect::<Result<Vec<_>>>()?,
        ))
    }

    pub fn add(&self, other: &RateSum) -> Self {
        Self::new(self.terms.iter().chain(other.terms.iter()).copied())
    }

    /// Lower bound `ell_m >= c m^(-e)` for a positive sum.
    pub fn dominates_power(&self, e: f64) -> bool {
        self.growth().is_some_and(|g| g.dominates_power(e))
    }
}

impl From<RateFn> for RateSum {
    fn from(t: RateFn) -> Self {
        Self { terms: vec![t] }
    }
}

/// Whether `sum_m r(ell_m / 2)` converges, `r` the collar half-width.
///
/// Since `r(x) ~ 2 e^(-x)` as `x -> inf` and `r(x) -> inf` as `x -> 0`, the
/// series converges exactly when `e^(-ell_m / 2)` is summable. For a sum of
/// positive terms this is decided by the dominant term, with the single
/// borderline `ell_m ~ 2 ln(m + 1)` resolved by the next term.
pub fn collar_series_converges(lengths: &RateSum) -> bool {
    let Some(d) = lengths.dominant() else {
        return false;
    };
    let g = d.growth();
    match exp_cmp(g.ratio, 1.0) {
        Ordering::Greater => return true,
        Ordering::Less => return false,
        Ordering::Equal => {}
    }
    match exp_cmp(g.p, 0.0) {
        Ordering::Less => return true,
        Ordering::Greater => return false,
        Ordering::Equal => {}
    }
    match exp_cmp(g.q, 1.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => match exp_cmp(d.amplitude, 2.0) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => lengths.terms().iter().any(|t| {
                !t.same_shape(d)
                    && exp_eq(t.ratio, 1.0)
                    && exp_eq(t.p, 0.0)
                    && t.q > 0.0
                    && t.q < 1.0
            }),
        },
    }
}

/// Certified upper bound on `sum_{m >= k} r(ell_m / 2)` for positive
/// lengths, or `+inf` when none can be certified at this `k`.
///
/// With `D` the dominant term, `ell_m >= D(m)`. When
/// `h(m) = D(m) / (2 ln(m + 1))` is nondecreasing on `[k, inf)` and
/// `s = h(k) > 1`, each term is at most `F (m + 1)^(-s)` with
/// `F = 2 / (1 - e^(-D(k)))`, and the sum is at most `F k^(1-s) / (s - 1)`.
pub fn collar_tail_upper(lengths: &RateSum, k: u64) -> f64 {
    let k = k.max(1);
    let Some(d) = lengths.dominant() else {
        return f64::INFINITY;
    };
    if !lengths.all_positive() || d.ratio < 1.0 {
        return f64::INFINITY;
    }
    let kf = k as f64;
    let lk = (kf + 1.0).ln();
    let slope = kf * d.ratio.ln() - d.p + ((d.q - 1.0) / lk).min(0.0);
    if slope < 0.0 {
        return f64::INFINITY;
    }
    let dk = d.eval(k);
    let s = dk / (2.0 * lk);
    // NaN falls through to the infinite bound as well.
    if s.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) {
        return f64::INFINITY;
    }
    let factor = 2.0 / -(-dk).exp_m1();
    factor * kf.powf(1.0 - s) / (s - 1.0)
}
