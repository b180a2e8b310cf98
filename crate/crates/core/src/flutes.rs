//! Completeness and end geometry of flute structures.
//!
//! Pants `n >= 1` of a flute is bounded by `gamma_n`, `gamma_(n+1)` and the
//! peripheral curve `ell'_n`. For a zero-twist flute the distance from
//! `gamma_1` to `gamma_(N+1)` is `sum_{n <= N} d_n` with `d_n` the
//! orthodistance inside pants `n`, and every `d_n` lies in
//! `[r(ell_n/2) + r(ell_(n+1)/2), r(ell_n/2) + r(ell_(n+1)/2) + ell'_n/2]`.

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Error, Result};
use crate::fnspace::{CoordSeq, Topology};
use crate::hyptrig::{collar_width, orthodistance, orthodistance_bounds, PantsGeom};
use crate::rate::{collar_series_converges, collar_tail_upper, exp_eq, RateSum};

/// Truncation used for verdict evidence unless the caller picks another.
pub const DEFAULT_TRUNCATION: u64 = 1000;

/// Citation attached to half-twist completeness verdicts.
pub const HALF_TWIST_CITATION: &str = "BHS Thm 9.7";

/// A one-ended flute: pants curves `gamma_n` plus peripheral lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoordSeq", into = "CoordSeq")]
pub struct FluteStructure {
    core: CoordSeq,
}

impl TryFrom<CoordSeq> for FluteStructure {
    type Error = Error;

    fn try_from(core: CoordSeq) -> Result<Self> {
        Self::new(core)
    }
}

impl From<FluteStructure> for CoordSeq {
    fn from(f: FluteStructure) -> Self {
        f.core
    }
}

impl FluteStructure {
    pub fn new(core: CoordSeq) -> Result<Self> {
        if core.topology() != Topology::Flute {
            return Err(config(format!(
                "flute structures need flute topology, got {:?}",
                core.topology()
            )));
        }
        Ok(Self { core })
    }

    pub fn core(&self) -> &CoordSeq {
        &self.core
    }

    /// Pants `n >= 1`: cuffs `gamma_n`, `gamma_(n+1)` and `ell'_n`.
    pub fn pants(&self, n: u64) -> Result<PantsGeom> {
        if n == 0 {
            return Err(domain("pants indices start at 1"));
        }
        let l1 = self.core.eval(n)?.length;
        let l2 = self.core.eval(n + 1)?.length;
        PantsGeom::new(l1, l2, self.core.peripheral_length(n)?)
    }

    fn length_asymptotic(&self) -> RateSum {
        self.core.lengths().asymptotic()
    }

    /// Common residue mod 1 of every twist, if there is one.
    fn twist_residue(&self) -> Option<f64> {
        let base = self.core.twists().as_constant()?;
        let integral = |x: f64| x == x.round();
        if !self.core.counts().iter().all(|c| integral(c.weight)) {
            return None;
        }
        let r = base.rem_euclid(1.0);
        for c in self.core.overrides().values() {
            if c.twist.rem_euclid(1.0) != r {
                return None;
            }
        }
        Some(r)
    }
}

/// One row of series evidence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub n: u64,
    pub term: f64,
    pub cumulative: f64,
}

/// Partial sum of `sum d_n` with certified bounds on the remainder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub truncation: u64,
    pub partial_sum: f64,
    pub lower_tail: f64,
    pub upper_tail: f64,
    pub rows: Vec<SeriesRow>,
}

impl SeriesReport {
    /// Interval containing the full series.
    pub fn limit_bracket(&self) -> (f64, f64) {
        (self.partial_sum + self.lower_tail, self.partial_sum + self.upper_tail)
    }
}

/// `sum_{n=1..N} d_n` for a zero-twist flute.
pub fn orthodistance_series(f: &FluteStructure, n: u64) -> Result<SeriesReport> {
    if !f.core.is_zero_twist() {
        return Err(config(
            "the orthodistance series measures distance only on zero-twist flutes",
        ));
    }
    series(f, n)
}

fn series(f: &FluteStructure, big_n: u64) -> Result<SeriesReport> {
    if big_n < 2 {
        return Err(domain(format!("series truncation must be >= 2, got {big_n}")));
    }
    let mut rows = Vec::with_capacity(big_n as usize);
    let mut cumulative = 0.0;
    for n in 1..=big_n {
        let term = orthodistance(&f.pants(n)?)?;
        cumulative += term;
        rows.push(SeriesRow { n, term, cumulative });
    }
    Ok(SeriesReport {
        truncation: big_n,
        partial_sum: cumulative,
        lower_tail: if collar_series_converges(&f.length_asymptotic()) {
            0.0
        } else {
            f64::INFINITY
        },
        upper_tail: upper_tail(f, big_n)?,
        rows,
    })
}

/// Bound on `sum_{n > N} d_n` from the termwise collar sandwich.
fn upper_tail(f: &FluteStructure, big_n: u64) -> Result<f64> {
    let core = &f.core;
    if core.lengths().has_shifts() || core.peripheral().family().has_shifts() {
        return Ok(f64::INFINITY);
    }
    // Explicit values past N are bounded one pants at a time.
    let horizon = core.explicit_horizon().max(big_n);
    let mut explicit = 0.0;
    for n in big_n + 1..=horizon {
        explicit += orthodistance_bounds(&f.pants(n)?)?.upper;
    }
    let lengths = f.length_asymptotic();
    let peripheral = core.peripheral().family().asymptotic();
    let k = horizon + 1;
    let collar = collar_tail_upper(&lengths, k) + collar_tail_upper(&lengths, k + 1);
    let cusp = if peripheral.is_zero() {
        0.0
    } else {
        peripheral.tail_upper(k) / 2.0
    };
    Ok(explicit + collar + cusp)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CompletenessStatus {
    CompleteByDivergence,
    IncompleteByConvergence,
    CitedComplete,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletenessVerdict {
    pub status: CompletenessStatus,
    /// Which rule produced the status.
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    /// Orthodistance terms `d_n` with certified tails.
    pub evidence: SeriesReport,
}

/// Classifies the nonisolated end with the default truncation.
pub fn classify_completeness(f: &FluteStructure) -> Result<CompletenessVerdict> {
    classify_completeness_with(f, DEFAULT_TRUNCATION)
}

/// Completeness of the nonisolated end.
///
/// Rules, in order:
/// 1. `sum r(ell_n / 2)` diverges: every ray to the end crosses infinitely
///    many disjoint collars of divergent total width, for any twists.
/// 2. Twists integral, `sum r(ell_n / 2)` and `sum ell'_n` converge: the
///    pants curves converge to a boundary at finite distance.
/// 3. Twists `1/2 mod 1` with `ell ~ A ln(m + 1)`: cited.
/// 4. Anything else is indeterminate.
pub fn classify_completeness_with(f: &FluteStructure, truncation: u64) -> Result<CompletenessVerdict> {
    let evidence = series(f, truncation)?;
    let lengths = f.length_asymptotic();
    let peripheral = f.core.peripheral().family().asymptotic();
    let residue = f.twist_residue();
    let verdict = |status, rule: &str, citation: Option<&str>| CompletenessVerdict {
        status,
        rule: rule.to_string(),
        citation: citation.map(str::to_string),
        evidence: evidence.clone(),
    };
    if !collar_series_converges(&lengths) {
        return Ok(verdict(
            CompletenessStatus::CompleteByDivergence,
            "collar widths r(l_n/2) have divergent sum",
            None,
        ));
    }
    if residue == Some(0.0) && peripheral.is_summable() {
        return Ok(verdict(
            CompletenessStatus::IncompleteByConvergence,
            "sum of r(l_n/2) + r(l_(n+1)/2) + l'_n/2 converges",
            None,
        ));
    }
    if residue == Some(0.5) && is_log_growth(&lengths) {
        return Ok(verdict(
            CompletenessStatus::CitedComplete,
            "half-twist flute with logarithmic lengths",
            Some(HALF_TWIST_CITATION),
        ));
    }
    Ok(verdict(
        CompletenessStatus::Indeterminate,
        "no rule applies",
        None,
    ))
}

fn is_log_growth(lengths: &RateSum) -> bool {
    lengths
        .growth()
        .is_some_and(|g| exp_eq(g.ratio, 1.0) && exp_eq(g.p, 0.0) && exp_eq(g.q, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum End {
    /// The planar end enclosed by the peripheral curve of pants `n >= 1`.
    Isolated(u64),
    Nonisolated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EndGeometry {
    Cusp,
    Funnel,
    EscapingGeodesics,
    HalfPlaneBoundary,
    Unknown,
}

pub fn classify_end(f: &FluteStructure, end: End) -> Result<EndGeometry> {
    match end {
        End::Isolated(0) => Err(domain("isolated ends are numbered from 1")),
        End::Isolated(n) => Ok(if f.core.peripheral_length(n)? == 0.0 {
            EndGeometry::Cusp
        } else {
            EndGeometry::Funnel
        }),
        End::Nonisolated => Ok(match classify_completeness(f)?.status {
            CompletenessStatus::CompleteByDivergence | CompletenessStatus::CitedComplete => {
                EndGeometry::EscapingGeodesics
            }
            CompletenessStatus::IncompleteByConvergence => EndGeometry::HalfPlaneBoundary,
            CompletenessStatus::Indeterminate => EndGeometry::Unknown,
        }),
    }
}

/// Lower bound `r(ell_n/2) + r(ell_(n+1)/2)` of a single term.
pub fn collar_term(f: &FluteStructure, n: u64) -> Result<f64> {
    let p = f.pants(n)?;
    Ok(collar_width(p.l1 / 2.0)? + collar_width(p.l2 / 2.0)?)
}
