//! Lazily evaluated Fenchel–Nielsen coordinate sequences and the product
//! metric on them.
//!
//! A [`CoordSeq`] stores symbolic families for the pants-curve lengths, the
//! twists, the peripheral (cusp or cuff) lengths and any integral twist
//! counts added by mapping classes, plus finitely many explicit overrides.
//! Coordinates are produced on demand for any index `m >= 1`.
//!
//! Twists are dimensionless: a full Dehn twist adds `1`, a half twist `1/2`.
//!
//! On a bi-infinite flute the pants curves carry integer labels
//! `0, 1, -1, 2, -2, ...` which are folded onto `m = 1, 2, 3, 4, 5, ...`.
//! Each symbolic term keeps its own label shift so that index shifts compose
//! exactly.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Error, Result};
use crate::rate::{RateFn, RateSum};

/// Topology of the indexing of the pants curves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    /// One-ended flute: pants `n` bounded by `gamma_n`, `gamma_(n+1)` and a
    /// peripheral curve.
    #[default]
    Flute,
    /// Two-ended flute with integer labels folded onto `m >= 1`.
    BiInfiniteFlute,
    /// Any other surface; indices only order the pants curves.
    Generic,
}

/// Folded index `m >= 1` of the integer label `j`.
pub fn fold_label(j: i64) -> u64 {
    if j > 0 {
        2 * j as u64
    } else {
        1 + 2 * j.unsigned_abs()
    }
}

/// Integer label of the folded index `m >= 1`.
pub fn unfold_index(m: u64) -> i64 {
    if m.is_multiple_of(2) {
        (m / 2) as i64
    } else {
        -(((m - 1) / 2) as i64)
    }
}

fn reindex(m: u64, shift: i64) -> u64 {
    if shift == 0 {
        m
    } else {
        fold_label(unfold_index(m) - shift)
    }
}

/// A rate term with a label shift (nonzero only on bi-infinite flutes).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(flatten)]
    pub rate: RateFn,
    #[serde(default, skip_serializing_if = "is_zero_i64")]
    pub shift: i64,
}

fn is_zero_i64(v: &i64) -> bool {
    *v == 0
}

impl From<RateFn> for Term {
    fn from(rate: RateFn) -> Self {
        Self { rate, shift: 0 }
    }
}

/// A finite sum of shifted rate terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Family {
    terms: Vec<Term>,
}

impl Family {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut out = Self::zero();
        for t in terms {
            out.push(t);
        }
        out
    }

    fn push(&mut self, t: Term) {
        let like = |e: &Term| {
            e.shift == t.shift
                && e.rate.ratio() == t.rate.ratio()
                && e.rate.p() == t.rate.p()
                && e.rate.q() == t.rate.q()
        };
        match self.terms.iter().position(like) {
            Some(i) => {
                let a = self.terms[i].rate.amplitude() + t.rate.amplitude();
                if a == 0.0 {
                    self.terms.remove(i);
                } else {
                    self.terms[i].rate = RateFn::new(a, t.rate.ratio(), t.rate.p(), t.rate.q())
                        .expect("shape already validated");
                }
            }
            None => self.terms.push(t),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, m: u64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.rate.eval(reindex(m, t.shift)))
            .sum()
    }

    /// The family with shifts dropped; shifts move the index by a bounded
    /// amount and do not change any growth class.
    pub fn asymptotic(&self) -> RateSum {
        RateSum::new(self.terms.iter().map(|t| t.rate))
    }

    pub fn has_shifts(&self) -> bool {
        self.terms.iter().any(|t| t.shift != 0)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if factor == 0.0 {
            return Ok(Self::zero());
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(Term {
                    rate: t.rate.scaled(factor)?,
                    shift: t.shift,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(terms))
    }

    pub fn add(&self, other: &Family) -> Self {
        Self::new(self.terms.iter().chain(other.terms.iter()).copied())
    }

    fn shifted(&self, k: i64) -> Self {
        Self::new(self.terms.iter().map(|t| Term {
            rate: t.rate,
            shift: t.shift + k,
        }))
    }

    pub(crate) fn all_positive(&self) -> bool {
        self.terms.iter().all(|t| t.rate.amplitude() > 0.0)
    }

    /// Constant value if the family is a single unshifted constant (or zero).
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.as_slice() {
            [] => Some(0.0),
            [t] if t.rate.is_constant() => Some(t.rate.amplitude()),
            _ => None,
        }
    }
}

impl From<RateFn> for Family {
    fn from(rate: RateFn) -> Self {
        Self::new([Term::from(rate)])
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FamilyRepr {
    One(Term),
    Many(Vec<Term>),
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.terms.as_slice() {
            [t] => FamilyRepr::One(*t).serialize(s),
            ts => FamilyRepr::Many(ts.to_vec()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match FamilyRepr::deserialize(d)? {
            FamilyRepr::One(t) => Family::new([t]),
            FamilyRepr::Many(ts) => Family::new(ts),
        })
    }
}

/// Integral twist counts `weight * ceil(counts(m))` added by a multi-twist.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountTerm {
    pub weight: f64,
    pub counts: RateFn,
    #[serde(default, skip_serializing_if = "is_zero_i64")]
    pub shift: i64,
}

impl CountTerm {
    pub fn eval(&self, m: u64) -> f64 {
        self.weight * self.counts.eval(reindex(m, self.shift)).ceil()
    }
}

fn merge_counts(terms: impl IntoIterator<Item = CountTerm>) -> Vec<CountTerm> {
    let mut out: Vec<CountTerm> = Vec::new();
    for t in terms {
        match out
            .iter()
            .position(|e| e.counts == t.counts && e.shift == t.shift)
        {
            Some(i) => {
                out[i].weight += t.weight;
                if out[i].weight == 0.0 {
                    out.remove(i);
                }
            }
            None if t.weight != 0.0 => out.push(t),
            None => {}
        }
    }
    out
}

/// Peripheral (cusp or cuff) lengths `ell'_n`, one per pants; twist is 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Peripheral {
    family: Family,
    values: BTreeMap<u64, f64>,
}

impl Peripheral {
    /// All isolated planar ends are cusps.
    pub fn cusps() -> Self {
        Self::default()
    }

    pub fn from_family(family: Family) -> Result<Self> {
        let p = Self {
            family,
            values: BTreeMap::new(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Explicit lengths for pants `1..=n`; later pants are cusps.
    pub fn from_list(values: &[f64]) -> Result<Self> {
        let p = Self {
            family: Family::zero(),
            values: values
                .iter()
                .enumerate()
                .map(|(i, v)| (i as u64 + 1, *v))
                .collect(),
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !self.family.all_positive() {
            return Err(config("peripheral family must have positive amplitudes"));
        }
        for (&n, &v) in &self.values {
            if n == 0 || !v.is_finite() || v < 0.0 {
                return Err(config(format!("peripheral length at {n} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn values(&self) -> &BTreeMap<u64, f64> {
        &self.values
    }

    pub fn eval(&self, n: u64) -> f64 {
        match self.values.get(&n) {
            Some(v) => *v,
            None => self.family.eval(n),
        }
    }

    fn scaled(&self, factor: f64) -> Result<Self> {
        Ok(Self {
            family: self.family.scaled(factor)?,
            values: self.values.iter().map(|(k, v)| (*k, v * factor)).collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PeripheralRepr {
    List(Vec<f64>),
    Family(Family),
    Full {
        #[serde(default)]
        family: Family,
        #[serde(default)]
        values: Vec<(u64, f64)>,
    },
}

impl Serialize for Peripheral {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let contiguous = self.values.keys().copied().eq(1..=self.values.len() as u64);
        let repr = if self.values.is_empty() && !self.family.is_zero() {
            PeripheralRepr::Family(self.family.clone())
        } else if self.family.is_zero() && contiguous {
            PeripheralRepr::List(self.values.values().copied().collect())
        } else {
            PeripheralRepr::Full {
                family: self.family.clone(),
                values: self.values.iter().map(|(k, v)| (*k, *v)).collect(),
            }
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Peripheral {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = match PeripheralRepr::deserialize(d)? {
            PeripheralRepr::List(v) => Peripheral {
                family: Family::zero(),
                values: v.iter().enumerate().map(|(i, x)| (i as u64 + 1, *x)).collect(),
            },
            PeripheralRepr::Full { family, values } => Peripheral {
                family,
                values: values.into_iter().collect(),
            },
            PeripheralRepr::Family(family) => Peripheral {
                family,
                values: BTreeMap::new(),
            },
        };
        p.validate().map_err(serde::de::Error::custom)?;
        Ok(p)
    }
}

/// One Fenchel–Nielsen pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coord {
    pub length: f64,
    pub twist: f64,
}

/// A lazily evaluated sequence of Fenchel–Nielsen coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoordSeqRepr", into = "CoordSeqRepr")]
pub struct CoordSeq {
    topology: Topology,
    lengths: Family,
    twists: Family,
    counts: Vec<CountTerm>,
    peripheral: Peripheral,
    overrides: BTreeMap<u64, Coord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoordSeqRepr {
    #[serde(default, skip_serializing_if = "is_default_topology")]
    topology: Topology,
    lengths: Family,
    #[serde(default)]
    twists: Family,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    counts: Vec<CountTerm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    overrides: Vec<(u64, f64, f64)>,
    #[serde(default)]
    peripheral: Peripheral,
}

fn is_default_topology(t: &Topology) -> bool {
    *t == Topology::Flute
}

impl TryFrom<CoordSeqRepr> for CoordSeq {
    type Error = Error;

    fn try_from(r: CoordSeqRepr) -> Result<Self> {
        let seq = CoordSeq {
            topology: r.topology,
            lengths: r.lengths,
            twists: r.twists,
            counts: r.counts,
            peripheral: r.peripheral,
            overrides: r
                .overrides
                .into_iter()
                .map(|(m, length, twist)| (m, Coord { length, twist }))
                .collect(),
        };
        seq.validate()?;
        Ok(seq)
    }
}

impl From<CoordSeq> for CoordSeqRepr {
    fn from(s: CoordSeq) -> Self {
        CoordSeqRepr {
            topology: s.topology,
            lengths: s.lengths,
            twists: s.twists,
            counts: s.counts,
            overrides: s
                .overrides
                .into_iter()
                .map(|(m, c)| (m, c.length, c.twist))
                .collect(),
            peripheral: s.peripheral,
        }
    }
}

impl CoordSeq {
    /// Zero-twist, all-cusp structure with the given lengths.
    pub fn new(lengths: impl Into<Family>) -> Result<Self> {
        let seq = CoordSeq {
            topology: Topology::Flute,
            lengths: lengths.into(),
            twists: Family::zero(),
            counts: Vec::new(),
            peripheral: Peripheral::cusps(),
            overrides: BTreeMap::new(),
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn with_twists(mut self, twists: impl Into<Family>) -> Result<Self> {
        self.twists = twists.into();
        self.validate()?;
        Ok(self)
    }

    pub fn with_peripheral(mut self, peripheral: Peripheral) -> Result<Self> {
        self.peripheral = peripheral;
        self.validate()?;
        Ok(self)
    }

    pub fn with_topology(mut self, topology: Topology) -> Result<Self> {
        self.topology = topology;
        self.validate()?;
        Ok(self)
    }

    pub fn with_override(mut self, m: u64, coord: Coord) -> Result<Self> {
        self.overrides.insert(m, coord);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.lengths.is_zero() {
            return Err(config("length family must have at least one term"));
        }
        if !self.lengths.all_positive() {
            return Err(config("length family must have positive amplitudes"));
        }
        self.peripheral.validate()?;
        let shifted = self.lengths.has_shifts()
            || self.twists.has_shifts()
            || self.peripheral.family.has_shifts()
            || self.counts.iter().any(|c| c.shift != 0);
        if shifted && self.topology != Topology::BiInfiniteFlute {
            return Err(config("label shifts are only meaningful on a bi-infinite flute"));
        }
        for c in &self.counts {
            if !c.weight.is_finite() {
                return Err(config("count weight must be finite"));
            }
        }
        for (&m, c) in &self.overrides {
            if m == 0 {
                return Err(config("override index must be >= 1"));
            }
            if !(c.length.is_finite() && c.length > 0.0 && c.twist.is_finite()) {
                return Err(config(format!("override at {m} is not a valid coordinate: {c:?}")));
            }
        }
        Ok(())
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn lengths(&self) -> &Family {
        &self.lengths
    }

    pub fn twists(&self) -> &Family {
        &self.twists
    }

    pub fn counts(&self) -> &[CountTerm] {
        &self.counts
    }

    pub fn peripheral(&self) -> &Peripheral {
        &self.peripheral
    }

    pub fn overrides(&self) -> &BTreeMap<u64, Coord> {
        &self.overrides
    }

    /// Coordinate `m >= 1`; overrides take precedence over the families.
    pub fn eval(&self, m: u64) -> Result<Coord> {
        if m == 0 {
            return Err(domain("coordinate indices start at 1"));
        }
        if let Some(c) = self.overrides.get(&m) {
            return Ok(*c);
        }
        let length = self.lengths.eval(m);
        if !(length.is_finite() && length > 0.0) {
            return Err(config(format!("length family evaluates to {length} at m = {m}")));
        }
        let twist = self.twists.eval(m) + self.counts.iter().map(|c| c.eval(m)).sum::<f64>();
        Ok(Coord { length, twist })
    }

    /// Peripheral length of pants `n >= 1` (0 encodes a cusp).
    pub fn peripheral_length(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(domain("pants indices start at 1"));
        }
        let v = self.peripheral.eval(n);
        if !(v.is_finite() && v >= 0.0) {
            return Err(config(format!("peripheral family evaluates to {v} at n = {n}")));
        }
        Ok(v)
    }

    /// Whether the twist at every index is exactly zero.
    pub fn is_zero_twist(&self) -> bool {
        self.twists.is_zero()
            && self.counts.is_empty()
            && self.overrides.values().all(|c| c.twist == 0.0)
    }

    /// Largest index at which an explicit value (override or peripheral
    /// value) replaces the symbolic families.
    pub fn explicit_horizon(&self) -> u64 {
        let a = self.overrides.keys().next_back().copied().unwrap_or(0);
        let b = self.peripheral.values.keys().next_back().copied().unwrap_or(0);
        a.max(b)
    }

    pub(crate) fn set_overrides(&self, entries: impl IntoIterator<Item = (u64, Coord)>) -> Result<Self> {
        let mut out = self.clone();
        out.overrides.extend(entries);
        out.validate()?;
        Ok(out)
    }

    pub(crate) fn set_peripheral_values(&self, entries: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut out = self.clone();
        out.peripheral.values.extend(entries);
        out.validate()?;
        Ok(out)
    }

    pub(crate) fn scale_peripheral(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        out.peripheral = self.peripheral.scaled(factor)?;
        Ok(out)
    }

    /// Adds `sign * ceil(counts(m))` to every twist.
    pub(crate) fn add_counts(&self, counts: RateFn, sign: f64) -> Result<Self> {
        let mut out = self.clone();
        for (&m, c) in out.overrides.iter_mut() {
            c.twist += sign * counts.eval(m).ceil();
        }
        out.counts = merge_counts(self.counts.iter().copied().chain([CountTerm {
            weight: sign,
            counts,
            shift: 0,
        }]));
        Ok(out)
    }

    /// Relabels along a bi-infinite flute: the new coordinate at label `j`
    /// is the old coordinate at label `j - k`.
    pub(crate) fn shift_labels(&self, k: i64) -> Result<Self> {
        if self.topology != Topology::BiInfiniteFlute {
            return Err(Error::Topology(format!(
                "index shift needs a bi-infinite flute, structure is {:?}",
                self.topology
            )));
        }
        let move_index = |m: u64| fold_label(unfold_index(m) + k);
        Ok(CoordSeq {
            topology: self.topology,
            lengths: self.lengths.shifted(k),
            twists: self.twists.shifted(k),
            counts: merge_counts(self.counts.iter().map(|c| CountTerm {
                shift: c.shift + k,
                ..*c
            })),
            peripheral: Peripheral {
                family: self.peripheral.family.shifted(k),
                values: self
                    .peripheral
                    .values
                    .iter()
                    .map(|(m, v)| (move_index(*m), *v))
                    .collect(),
            },
            overrides: self
                .overrides
                .iter()
                .map(|(m, c)| (move_index(*m), *c))
                .collect(),
        })
    }

    /// Componentwise `(1 - s) z + s w`; `s = 0` and `s = 1` return the
    /// endpoints unchanged.
    pub(crate) fn blend(z: &CoordSeq, w: &CoordSeq, s: f64) -> Result<Self> {
        if z.topology != w.topology {
            return Err(Error::Topology("endpoints have different topologies".into()));
        }
        if s == 0.0 {
            return Ok(z.clone());
        }
        if s == 1.0 {
            return Ok(w.clone());
        }
        let u = 1.0 - s;
        let keys: Vec<u64> = z
            .overrides
            .keys()
            .chain(w.overrides.keys())
            .copied()
            .collect();
        let mut overrides = BTreeMap::new();
        for m in keys {
            let (a, b) = (z.eval(m)?, w.eval(m)?);
            overrides.insert(
                m,
                Coord {
                    length: u * a.length + s * b.length,
                    twist: u * a.twist + s * b.twist,
                },
            );
        }
        let pkeys: Vec<u64> = z
            .peripheral
            .values
            .keys()
            .chain(w.peripheral.values.keys())
            .copied()
            .collect();
        let mut pvalues = BTreeMap::new();
        for n in pkeys {
            pvalues.insert(n, u * z.peripheral.eval(n) + s * w.peripheral.eval(n));
        }
        let out = CoordSeq {
            topology: z.topology,
            lengths: z.lengths.scaled(u)?.add(&w.lengths.scaled(s)?),
            twists: z.twists.scaled(u)?.add(&w.twists.scaled(s)?),
            counts: merge_counts(
                z.counts
                    .iter()
                    .map(|c| CountTerm {
                        weight: u * c.weight,
                        ..*c
                    })
                    .chain(w.counts.iter().map(|c| CountTerm {
                        weight: s * c.weight,
                        ..*c
                    })),
            ),
            peripheral: Peripheral {
                family: z.peripheral.family.scaled(u)?.add(&w.peripheral.family.scaled(s)?),
                values: pvalues,
            },
            overrides,
        };
        out.validate()?;
        Ok(out)
    }
}

/// Indices where `a` and `b` differ, provided their symbolic families agree.
///
/// Returns `None` when the families differ, in which case the two sequences
/// may differ at infinitely many indices. Peripheral differences are
/// reported by pants index in the second set.
pub fn finite_difference(a: &CoordSeq, b: &CoordSeq) -> Result<Option<(BTreeSet<u64>, BTreeSet<u64>)>> {
    if a.topology != b.topology
        || a.lengths != b.lengths
        || a.twists != b.twists
        || a.counts != b.counts
        || a.peripheral.family != b.peripheral.family
    {
        return Ok(None);
    }
    let mut coords = BTreeSet::new();
    for &m in a.overrides.keys().chain(b.overrides.keys()) {
        if a.eval(m)? != b.eval(m)? {
            coords.insert(m);
        }
    }
    let mut peripheral = BTreeSet::new();
    for &n in a.peripheral.values.keys().chain(b.peripheral.values.keys()) {
        if a.peripheral.eval(n) != b.peripheral.eval(n) {
            peripheral.insert(n);
        }
    }
    Ok(Some((coords, peripheral)))
}

/// Truncated product metric with its certified tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncated {
    pub value: f64,
    pub tail_bound: f64,
}

impl Truncated {
    /// Interval `[value, value + tail_bound]` containing the full metric.
    pub fn interval(&self) -> (f64, f64) {
        (self.value, self.value + self.tail_bound)
    }
}

fn bounded_gap(x: f64) -> f64 {
    let d = x.abs();
    d / (1.0 + d)
}

/// `sum_{i=1..n} 2^(-i) [ |dl|/(1+|dl|) + |dt|/(1+|dt|) ]` with tail `2^(1-n)`.
pub fn fn_distance(z: &CoordSeq, w: &CoordSeq, n: u64) -> Result<Truncated> {
    if n == 0 {
        return Err(domain("truncation index must be >= 1"));
    }
    let mut value = 0.0;
    let mut weight = 1.0;
    for i in 1..=n {
        weight *= 0.5;
        let (a, b) = (z.eval(i)?, w.eval(i)?);
        value += weight * (bounded_gap(a.length - b.length) + bounded_gap(a.twist - b.twist));
    }
    Ok(Truncated {
        value,
        tail_bound: 2f64.powi(1 - n.min(1100) as i32),
    })
}
