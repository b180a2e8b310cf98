//! Mapping classes acting on coordinate sequences and the
//! always/sometimes/never quasiconformal trichotomy.
//!
//! A multi-twist with counts `n_m` is quasiconformal relative to a structure
//! with pants lengths `ell_m` exactly when `sup_m |n_m| ell_m < inf`, and the
//! decision is made on the rate algebra. Shifts are only supported on
//! bi-infinite flutes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::flutes::{classify_completeness_with, CompletenessStatus, FluteStructure};
use crate::fnspace::{Coord, CoordSeq, CountTerm, Family, Term, Topology};
use crate::hyptrig::collar_width;
use crate::rate::{collar_series_converges, exp_eq, RateFn, RateSum};

/// Indices sampled when the product cannot be decided symbolically.
pub const SAMPLE_HORIZON: u64 = 1_000_000;

/// Twist counts of a multi-twist generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MultiTwist {
    /// `sign * ceil(counts(m))` full twists about every `gamma_m`.
    Rate {
        counts: RateFn,
        #[serde(default = "plus_one")]
        sign: i8,
    },
    /// Finitely many twists `(m, n_m)`.
    Finite { twists: Vec<(u64, i64)> },
}

fn plus_one() -> i8 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Generator {
    MultiTwist(MultiTwist),
    /// Moves label `j` to `j + offset` on a bi-infinite flute.
    Shift { offset: i64 },
    /// Pairs `(m, pi(m))` of a finite permutation of coordinate indices.
    FinitePerm { pairs: Vec<(u64, u64)> },
}

impl Generator {
    fn validate(&self) -> Result<()> {
        match self {
            Generator::MultiTwist(MultiTwist::Rate { counts, sign }) => {
                if counts.amplitude() <= 0.0 {
                    return Err(config("twist counts need a positive amplitude; use sign to invert"));
                }
                if !matches!(sign, 1 | -1) {
                    return Err(config(format!("twist sign must be +1 or -1, got {sign}")));
                }
            }
            Generator::MultiTwist(MultiTwist::Finite { twists }) => {
                let mut seen = BTreeSet::new();
                for &(m, _) in twists {
                    if m == 0 || !seen.insert(m) {
                        return Err(config(format!("invalid or repeated twist index {m}")));
                    }
                }
            }
            Generator::Shift { .. } => {}
            Generator::FinitePerm { pairs } => {
                let from: BTreeSet<u64> = pairs.iter().map(|p| p.0).collect();
                let to: BTreeSet<u64> = pairs.iter().map(|p| p.1).collect();
                if from.len() != pairs.len() || from != to || from.contains(&0) {
                    return Err(config("permutation pairs must define a bijection of indices >= 1"));
                }
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Generator {
        match self {
            Generator::MultiTwist(MultiTwist::Rate { counts, sign }) => {
                Generator::MultiTwist(MultiTwist::Rate {
                    counts: *counts,
                    sign: -sign,
                })
            }
            Generator::MultiTwist(MultiTwist::Finite { twists }) => {
                Generator::MultiTwist(MultiTwist::Finite {
                    twists: twists.iter().map(|&(m, n)| (m, -n)).collect(),
                })
            }
            Generator::Shift { offset } => Generator::Shift { offset: -offset },
            Generator::FinitePerm { pairs } => Generator::FinitePerm {
                pairs: pairs.iter().map(|&(a, b)| (b, a)).collect(),
            },
        }
    }

    fn apply(&self, z: &CoordSeq) -> Result<CoordSeq> {
        match self {
            Generator::MultiTwist(MultiTwist::Rate { counts, sign }) => {
                z.add_counts(*counts, f64::from(*sign))
            }
            Generator::MultiTwist(MultiTwist::Finite { twists }) => {
                let mut entries = Vec::with_capacity(twists.len());
                for &(m, n) in twists {
                    let c = z.eval(m)?;
                    entries.push((
                        m,
                        Coord {
                            length: c.length,
                            twist: c.twist + n as f64,
                        },
                    ));
                }
                z.set_overrides(entries)
            }
            Generator::Shift { offset } => z.shift_labels(*offset),
            Generator::FinitePerm { pairs } => {
                let mut entries = Vec::with_capacity(pairs.len());
                for &(m, image) in pairs {
                    entries.push((image, z.eval(m)?));
                }
                z.set_overrides(entries)
            }
        }
    }
}

/// A finite composition `g_1 o g_2 o ... o g_k`, applied right to left.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MappingClassRepr", into = "MappingClassRepr")]
pub struct MappingClass {
    generators: Vec<Generator>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MappingClassRepr {
    generators: Vec<Generator>,
}

impl TryFrom<MappingClassRepr> for MappingClass {
    type Error = Error;

    fn try_from(r: MappingClassRepr) -> Result<Self> {
        Self::new(r.generators)
    }
}

impl From<MappingClass> for MappingClassRepr {
    fn from(m: MappingClass) -> Self {
        MappingClassRepr {
            generators: m.generators,
        }
    }
}

impl MappingClass {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(generators: Vec<Generator>) -> Result<Self> {
        for g in &generators {
            g.validate()?;
        }
        Ok(Self { generators })
    }

    pub fn generator(g: Generator) -> Result<Self> {
        Self::new(vec![g])
    }

    /// Multi-twist with `ceil(counts(m))` twists about every pants curve.
    pub fn multi_twist(counts: RateFn) -> Result<Self> {
        Self::generator(Generator::MultiTwist(MultiTwist::Rate { counts, sign: 1 }))
    }

    /// `n` full twists about `gamma_m`.
    pub fn dehn_twist(m: u64, n: i64) -> Result<Self> {
        Self::generator(Generator::MultiTwist(MultiTwist::Finite { twists: vec![(m, n)] }))
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// `self o other`.
    pub fn compose(&self, other: &MappingClass) -> MappingClass {
        MappingClass {
            generators: self.generators.iter().chain(&other.generators).cloned().collect(),
        }
    }

    pub fn inverse(&self) -> MappingClass {
        MappingClass {
            generators: self.generators.iter().rev().map(Generator::inverse).collect(),
        }
    }

    pub fn has_shift(&self) -> bool {
        self.generators
            .iter()
            .any(|g| matches!(g, Generator::Shift { offset } if *offset != 0))
    }

    pub fn net_shift(&self) -> i64 {
        self.generators
            .iter()
            .map(|g| match g {
                Generator::Shift { offset } => *offset,
                _ => 0,
            })
            .sum()
    }
}

/// Action on coordinates; the rightmost generator acts first.
pub fn act(mc: &MappingClass, z: &CoordSeq) -> Result<CoordSeq> {
    let mut out = z.clone();
    for g in mc.generators.iter().rev() {
        out = g.apply(&out)?;
    }
    Ok(out)
}

impl fmt::Display for MappingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

/// Parses a comma-separated composition such as
/// `twist-power:0.5,perm:1-2,shift:1,twist:3:2`. A trailing `^-1` inverts a
/// generator.
impl FromStr for MappingClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut gens = Vec::new();
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (body, invert) = match token.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (token, false),
            };
            let g = parse_generator(body)?;
            g.validate()?;
            gens.push(if invert { g.inverse() } else { g });
        }
        Self::new(gens)
    }
}

fn parse_generator(token: &str) -> Result<Generator> {
    let bad = || config(format!("cannot parse mapping-class generator `{token}`"));
    let (kind, args) = token.split_once(':').ok_or_else(bad)?;
    let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
    let rate = |counts: RateFn| Generator::MultiTwist(MultiTwist::Rate { counts, sign: 1 });
    Ok(match kind {
        "twist-power" => rate(RateFn::power_log(1.0, -num(args)?, 0.0)?),
        "twist-const" => rate(RateFn::constant(num(args)?)?),
        "twist-log" => rate(RateFn::log(num(args)?)?),
        "twist" => {
            let mut it = args.split(':');
            let m = it.next().ok_or_else(bad)?.parse::<u64>().map_err(|_| bad())?;
            let n = match it.next() {
                Some(v) => v.parse::<i64>().map_err(|_| bad())?,
                None => 1,
            };
            if it.next().is_some() {
                return Err(bad());
            }
            Generator::MultiTwist(MultiTwist::Finite { twists: vec![(m, n)] })
        }
        "shift" => Generator::Shift {
            offset: args.parse().map_err(|_| bad())?,
        },
        "perm" => {
            let cycle = args
                .split('-')
                .map(|v| v.parse::<u64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            if cycle.len() < 2 {
                return Err(bad());
            }
            let pairs = (0..cycle.len())
                .map(|i| (cycle[i], cycle[(i + 1) % cycle.len()]))
                .collect();
            Generator::FinitePerm { pairs }
        }
        _ => return Err(bad()),
    })
}

/// Eventual behaviour of the net twist counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CountClass {
    /// Zero outside finitely many indices.
    Zero,
    /// Eventually equal to a nonzero constant.
    Bounded { eventual: f64 },
    /// `|n_m| ~ dominant(m)`.
    Unbounded { dominant: RateFn },
    /// Leading terms cancel; nothing is decided symbolically.
    Ambiguous,
}

/// Net effect of a mapping class up to finitely many coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    pub net_shift: i64,
    pub has_shift: bool,
    pub counts: Vec<CountTerm>,
}

/// Every generator except the rate multi-twists has finite support once
/// shifts cancel, so the class is decided by the net count terms.
pub fn normal_form(mc: &MappingClass) -> Result<NormalForm> {
    let topology = if mc.has_shift() {
        Topology::BiInfiniteFlute
    } else {
        Topology::Flute
    };
    let reference = CoordSeq::new(RateFn::constant(1.0)?)?.with_topology(topology)?;
    let image = act(mc, &reference)?;
    Ok(NormalForm {
        net_shift: mc.net_shift(),
        has_shift: mc.has_shift(),
        counts: image.counts().to_vec(),
    })
}

pub fn count_class(counts: &[CountTerm]) -> CountClass {
    let unbounded: Vec<&CountTerm> = counts
        .iter()
        .filter(|c| !c.counts.growth().is_bounded())
        .collect();
    if let Some(top) = unbounded
        .iter()
        .map(|c| c.counts.growth())
        .max_by(|a, b| a.cmp_asymptotic(b))
    {
        let leading: Vec<&&CountTerm> = unbounded
            .iter()
            .filter(|c| c.counts.growth().cmp_asymptotic(&top).is_eq())
            .collect();
        let shifts: BTreeSet<i64> = leading.iter().map(|c| c.shift).collect();
        if !exp_eq(top.ratio, 1.0) && shifts.len() > 1 {
            return CountClass::Ambiguous;
        }
        let coefficient: f64 = leading.iter().map(|c| c.weight * c.counts.amplitude()).sum();
        let scale: f64 = leading.iter().map(|c| (c.weight * c.counts.amplitude()).abs()).sum();
        if coefficient.abs() <= 1e-12 * scale {
            return CountClass::Ambiguous;
        }
        return CountClass::Unbounded {
            dominant: RateFn::new(coefficient.abs(), top.ratio, top.p, top.q)
                .expect("validated exponents"),
        };
    }
    let mut eventual = 0.0;
    for c in counts {
        let g = c.counts.growth();
        if g.is_constant() {
            eventual += c.weight * c.counts.amplitude().ceil();
        } else if g.tends_to_zero() {
            eventual += c.weight;
        } else {
            return CountClass::Ambiguous;
        }
    }
    if eventual == 0.0 {
        CountClass::Zero
    } else {
        CountClass::Bounded { eventual }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SupportClass {
    Finite,
    Infinite,
}

pub fn support_class(mc: &MappingClass) -> Result<SupportClass> {
    let nf = normal_form(mc)?;
    Ok(if nf.net_shift == 0 && count_class(&nf.counts) == CountClass::Zero {
        SupportClass::Finite
    } else {
        SupportClass::Infinite
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QcVerdict {
    Qc,
    NotQc,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledSup {
    pub sup: f64,
    pub argmax: u64,
    pub horizon: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatsuzakiResult {
    pub verdict: QcVerdict,
    pub counts: CountClass,
    /// Leading term of `|n_m| ell_m` when decided symbolically.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product: Option<RateFn>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled: Option<SampledSup>,
}

/// Decides `sup_m |n_m| ell_m < inf` for a multi-twist relative to `x`.
pub fn matsuzaki_classify(mc: &MappingClass, x: &CoordSeq) -> Result<MatsuzakiResult> {
    let nf = normal_form(mc)?;
    if nf.has_shift {
        return Err(Error::Topology(
            "shifts are not supported on pants curves; classify multi-twists only".into(),
        ));
    }
    let counts = count_class(&nf.counts);
    let lengths = x.lengths().asymptotic();
    let decided = |verdict, product| MatsuzakiResult {
        verdict,
        counts: counts.clone(),
        product,
        sampled: None,
    };
    if !x.lengths().has_shifts() {
        let dom = lengths.dominant().copied();
        match (&counts, dom) {
            (CountClass::Zero, _) => return Ok(decided(QcVerdict::Qc, None)),
            (CountClass::Bounded { eventual }, Some(d)) => {
                let product = d.scaled(eventual.abs())?;
                let v = if lengths.is_bounded() { QcVerdict::Qc } else { QcVerdict::NotQc };
                return Ok(decided(v, Some(product)));
            }
            (CountClass::Unbounded { dominant }, Some(d)) => {
                let product = dominant.mul(&d)?;
                let v = if product.growth().is_bounded() { QcVerdict::Qc } else { QcVerdict::NotQc };
                return Ok(decided(v, Some(product)));
            }
            _ => {}
        }
    }
    let mut best = SampledSup {
        sup: 0.0,
        argmax: 1,
        horizon: SAMPLE_HORIZON,
    };
    for m in 1..=SAMPLE_HORIZON {
        let n: f64 = nf.counts.iter().map(|c| c.eval(m)).sum();
        let v = n.abs() * x.eval(m)?.length;
        if v > best.sup {
            best.sup = v;
            best.argmax = m;
        }
    }
    Ok(MatsuzakiResult {
        verdict: QcVerdict::Indeterminate,
        counts,
        product: None,
        sampled: Some(best),
    })
}

/// Index `r` of a `D_r` subspace: `r in N` or `r = 1/n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DrIndex {
    Zero,
    Natural(u32),
    Reciprocal(u32),
}

impl DrIndex {
    /// Exponent `e = 1/r` of the lower bound `c m^(-e)`.
    pub fn exponent(&self) -> f64 {
        match self {
            DrIndex::Zero => f64::INFINITY,
            DrIndex::Natural(n) => 1.0 / f64::from(*n),
            DrIndex::Reciprocal(n) => f64::from(*n),
        }
    }
}

impl FromStr for DrIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || config(format!("r = `{s}` is not in N or of the form 1/n"));
        let s = s.trim();
        if let Some(den) = s.strip_prefix("1/") {
            let n: u32 = den.parse().map_err(|_| bad())?;
            return match n {
                0 => Err(bad()),
                1 => Ok(DrIndex::Natural(1)),
                n => Ok(DrIndex::Reciprocal(n)),
            };
        }
        match s.parse::<u32>().map_err(|_| bad())? {
            0 => Ok(DrIndex::Zero),
            n => Ok(DrIndex::Natural(n)),
        }
    }
}

impl TryFrom<String> for DrIndex {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DrIndex> for String {
    fn from(r: DrIndex) -> Self {
        r.to_string()
    }
}

impl fmt::Display for DrIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DrIndex::Zero => write!(f, "0"),
            DrIndex::Natural(n) => write!(f, "{n}"),
            DrIndex::Reciprocal(n) => write!(f, "1/{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Membership {
    Member,
    NotMember,
}

impl From<bool> for Membership {
    fn from(b: bool) -> Self {
        if b {
            Membership::Member
        } else {
            Membership::NotMember
        }
    }
}

/// `c m^(-1/r) <= ell_m <= C` for some constants, decided on the rate algebra.
pub fn dr_membership(lengths: &RateSum, r: DrIndex) -> Membership {
    (lengths.dominates_power(r.exponent()) && lengths.is_bounded()).into()
}

/// Levels of the chain `C > D_0 > ... > D_(1/2) > D_1 > D_2 > ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainLevel {
    Complete,
    Dr(DrIndex),
}

impl ChainLevel {
    /// Larger keys are smaller subspaces.
    pub fn depth(&self) -> (u8, f64) {
        match self {
            ChainLevel::Complete => (0, 0.0),
            ChainLevel::Dr(r) => (1, -r.exponent()),
        }
    }
}

/// Membership in a chain level for a zero-twist, all-cusp flute.
pub fn chain_membership(lengths: &RateSum, level: ChainLevel) -> Membership {
    match level {
        ChainLevel::Complete => (!collar_series_converges(lengths)).into(),
        ChainLevel::Dr(r) => dr_membership(lengths, r),
    }
}

/// MCG-invariant subspaces of the coordinate space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SubspaceDesc {
    FullH,
    GeodComplete,
    MetrComplete,
    SystoleBounded {
        epsilon: f64,
    },
    #[serde(rename = "D_R")]
    Dr {
        r: DrIndex,
        /// Declared upper bound on the pants lengths of a transverse
        /// decomposition, if any.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        transverse_upper: Option<f64>,
    },
}

impl SubspaceDesc {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SubspaceDesc::SystoleBounded { epsilon } if !(epsilon.is_finite() && epsilon > 0.0) => {
                Err(config(format!("systole bound must be finite and > 0, got {epsilon}")))
            }
            SubspaceDesc::Dr { transverse_upper: Some(c), .. } if !(c.is_finite() && c > 0.0) => {
                Err(config(format!("transverse upper bound must be finite and > 0, got {c}")))
            }
            _ => Ok(()),
        }
    }

    /// Whether a flute structure lies in the subspace, when decidable.
    pub fn contains(&self, x: &CoordSeq) -> Result<Option<bool>> {
        let lengths = x.lengths().asymptotic();
        Ok(match *self {
            SubspaceDesc::FullH => Some(true),
            SubspaceDesc::GeodComplete | SubspaceDesc::MetrComplete => {
                let Ok(f) = FluteStructure::new(x.clone()) else {
                    return Ok(None);
                };
                match classify_completeness_with(&f, 2)?.status {
                    CompletenessStatus::CompleteByDivergence | CompletenessStatus::CitedComplete => {
                        Some(true)
                    }
                    CompletenessStatus::IncompleteByConvergence => Some(false),
                    CompletenessStatus::Indeterminate => None,
                }
            }
            SubspaceDesc::SystoleBounded { epsilon } => systole_at_least(x, &lengths, epsilon),
            SubspaceDesc::Dr { r, .. } => {
                if x.overrides().values().any(|c| c.length <= 0.0) {
                    Some(false)
                } else {
                    Some(dr_membership(&lengths, r) == Membership::Member)
                }
            }
        })
    }
}

fn systole_at_least(x: &CoordSeq, lengths: &RateSum, eps: f64) -> Option<bool> {
    if x.overrides().values().any(|c| c.length < eps)
        || x.peripheral().values().values().any(|&v| v > 0.0 && v < eps)
    {
        return Some(false);
    }
    let peripheral = x.peripheral().family().asymptotic();
    if !peripheral.is_zero() && peripheral.growth().is_some_and(|g| g.tends_to_zero()) {
        return Some(false);
    }
    if lengths.growth().is_some_and(|g| g.tends_to_zero()) {
        return Some(false);
    }
    // Nondecreasing positive terms are bounded below by their value at 1.
    let floor: f64 = lengths
        .terms()
        .iter()
        .filter(|t| t.ratio() >= 1.0 && t.p() <= 0.0 && t.q() >= 0.0)
        .map(|t| t.eval(1))
        .sum();
    let peripheral_ok = peripheral.is_zero()
        || peripheral
            .terms()
            .iter()
            .all(|t| t.ratio() >= 1.0 && t.p() <= 0.0 && t.q() >= 0.0 && t.eval(1) >= eps);
    if floor >= eps && peripheral_ok {
        Some(true)
    } else {
        None
    }
}

impl FromStr for SubspaceDesc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || config(format!("unknown subspace `{s}`"));
        let d = match s.split_once(':') {
            None => match s {
                "full" | "full-h" => SubspaceDesc::FullH,
                "complete" | "geod-complete" => SubspaceDesc::GeodComplete,
                "metric-complete" | "metr-complete" => SubspaceDesc::MetrComplete,
                _ => return Err(bad()),
            },
            Some(("systole", eps)) => SubspaceDesc::SystoleBounded {
                epsilon: eps.parse().map_err(|_| bad())?,
            },
            Some(("dr", r)) => SubspaceDesc::Dr {
                r: r.parse()?,
                transverse_upper: None,
            },
            Some(_) => return Err(bad()),
        };
        d.validate()?;
        Ok(d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Trichotomy {
    Always,
    Sometimes,
    Never,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    pub qc: CoordSeq,
    pub not_qc: CoordSeq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrichotomyVerdict {
    #[serde(rename = "type")]
    pub kind: Trichotomy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Witnesses>,
    /// Short proof tag.
    pub tag: String,
    pub detail: String,
}

fn verdict(kind: Trichotomy, witnesses: Option<Witnesses>, tag: &str, detail: String) -> TrichotomyVerdict {
    TrichotomyVerdict {
        kind,
        witnesses,
        tag: tag.into(),
        detail,
    }
}

/// Zero-twist, all-cusp flute with the given lengths.
fn witness(lengths: impl IntoIterator<Item = RateFn>) -> Result<CoordSeq> {
    CoordSeq::new(Family::new(lengths.into_iter().map(Term::from)))
}

fn pair(qc: CoordSeq, not_qc: CoordSeq) -> Option<Witnesses> {
    Some(Witnesses { qc, not_qc })
}

/// Always/sometimes/never quasiconformal relative to `sub`.
pub fn trichotomy(mc: &MappingClass, sub: &SubspaceDesc) -> Result<TrichotomyVerdict> {
    sub.validate()?;
    if support_class(mc)? == SupportClass::Finite {
        return Ok(verdict(
            Trichotomy::Always,
            None,
            "finite-support",
            "finitely supported classes are quasiconformal relative to every structure".into(),
        ));
    }
    if mc.has_shift() {
        return Ok(verdict(
            Trichotomy::Unknown,
            None,
            "outside-fragment",
            "index shifts are not classified".into(),
        ));
    }
    let one = RateFn::constant(1.0)?;
    match count_class(&normal_form(mc)?.counts) {
        CountClass::Zero | CountClass::Ambiguous => Ok(verdict(
            Trichotomy::Unknown,
            None,
            "leading-cancellation",
            "net twist counts cancel to leading order".into(),
        )),
        CountClass::Unbounded { dominant } => {
            let fast = dominant.recip()?;
            match *sub {
                SubspaceDesc::FullH | SubspaceDesc::GeodComplete | SubspaceDesc::MetrComplete => {
                    Ok(verdict(
                        Trichotomy::Sometimes,
                        pair(witness([fast])?, witness([one])?),
                        "witness-pair",
                        "lengths 1/n_m give bounded products, constant lengths do not".into(),
                    ))
                }
                SubspaceDesc::SystoleBounded { epsilon } => Ok(verdict(
                    Trichotomy::Never,
                    None,
                    "divergent-product-forced",
                    format!("every ell_m >= {epsilon} so |n_m| ell_m >= {epsilon} |n_m| is unbounded"),
                )),
                SubspaceDesc::Dr { r, transverse_upper } => {
                    if dr_membership(&fast.into(), r) == Membership::Member {
                        return Ok(verdict(
                            Trichotomy::Sometimes,
                            pair(witness([fast])?, witness([one])?),
                            "witness-pair",
                            format!("lengths 1/n_m lie in D_{r}; constant lengths do not give bounded products"),
                        ));
                    }
                    let mut detail = format!(
                        "aligned-family scope: every ell_m >= c m^(-1/r) in D_{r} leaves |n_m| ell_m unbounded"
                    );
                    if let Some(c) = transverse_upper {
                        let k = 2.0 * collar_width(c / 2.0)?;
                        detail.push_str(&format!(
                            "; transverse curves have length >= K = 2 r(C/2) = {k}"
                        ));
                    }
                    Ok(verdict(Trichotomy::Never, None, "divergent-product-forced", detail))
                }
            }
        }
        CountClass::Bounded { .. } => match *sub {
            SubspaceDesc::SystoleBounded { epsilon } => Ok(verdict(
                Trichotomy::Sometimes,
                pair(
                    witness([RateFn::constant(epsilon)?])?,
                    witness([RateFn::constant(epsilon)?, RateFn::log(1.0)?])?,
                ),
                "witness-pair",
                "bounded counts: constant lengths are qc, logarithmic lengths are not".into(),
            )),
            SubspaceDesc::FullH | SubspaceDesc::GeodComplete | SubspaceDesc::MetrComplete => {
                Ok(verdict(
                    Trichotomy::Sometimes,
                    pair(witness([one])?, witness([one, RateFn::log(1.0)?])?),
                    "witness-pair",
                    "bounded counts: constant lengths are qc, logarithmic lengths are not".into(),
                ))
            }
            SubspaceDesc::Dr { .. } => Ok(verdict(
                Trichotomy::Unknown,
                None,
                "outside-fragment",
                "bounded counts on bounded lengths: the transverse case is not decided".into(),
            )),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TranslationVerdict {
    Never,
    Unknown,
}

/// Powers `n_i = ceil(powers(i))` of maps with translation lengths
/// `tau(phi_i) >= tau_inf > 0`: unbounded powers are never qc.
pub fn never_qc_by_translation(powers: &RateFn, tau_inf: f64) -> Result<TranslationVerdict> {
    if !(tau_inf.is_finite() && tau_inf > 0.0) {
        return Err(config(format!("tau_inf must be finite and > 0, got {tau_inf}")));
    }
    Ok(if powers.growth().is_bounded() {
        TranslationVerdict::Unknown
    } else {
        TranslationVerdict::Never
    })
}

/// Twist counts of the normal form evaluated at `m`.
pub fn net_twist(mc: &MappingClass, m: u64) -> Result<f64> {
    let reference = CoordSeq::new(RateFn::constant(1.0)?)?;
    let image = act(mc, &reference)?;
    Ok(image.eval(m)?.twist)
}
