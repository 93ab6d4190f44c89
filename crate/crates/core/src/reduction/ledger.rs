use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::ReductionError;
use crate::gammafn::{ln_gamma, Case, HalfInt};

/// What a gamma argument is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaBase {
    Alpha,
    Beta,
    AlphaPlusBeta,
    /// A constant; the whole argument lives in the offset.
    PureNumber,
}

impl GammaBase {
    fn symbol(self) -> &'static str {
        match self {
            GammaBase::Alpha => "α",
            GammaBase::Beta => "β",
            GammaBase::AlphaPlusBeta => "α + β",
            GammaBase::PureNumber => "",
        }
    }
}

/// The argument `base + offset` of one scalar gamma factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GammaArg {
    pub base: GammaBase,
    pub offset: HalfInt,
}

impl GammaArg {
    pub fn alpha(offset: HalfInt) -> Self {
        GammaArg { base: GammaBase::Alpha, offset }
    }

    pub fn beta(offset: HalfInt) -> Self {
        GammaArg { base: GammaBase::Beta, offset }
    }

    pub fn alpha_plus_beta(offset: HalfInt) -> Self {
        GammaArg { base: GammaBase::AlphaPlusBeta, offset }
    }

    pub fn number(value: HalfInt) -> Self {
        GammaArg { base: GammaBase::PureNumber, offset: value }
    }

    pub fn shifted(self, by: HalfInt) -> Self {
        GammaArg { base: self.base, offset: self.offset + by }
    }

    /// Numeric argument for the given parameters.
    pub fn evaluate(self, alpha: f64, beta: Option<f64>) -> Result<f64, ReductionError> {
        let base = match self.base {
            GammaBase::Alpha => alpha,
            GammaBase::Beta => beta.ok_or(ReductionError::MissingBeta)?,
            GammaBase::AlphaPlusBeta => alpha + beta.ok_or(ReductionError::MissingBeta)?,
            GammaBase::PureNumber => 0.0,
        };
        Ok(base + self.offset.to_f64())
    }
}

// Sort by base, then by decreasing offset: Γ(α), Γ(α - 1/2), ...
impl Ord for GammaArg {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.base.cmp(&other.base).then(other.offset.cmp(&self.offset))
    }
}

impl PartialOrd for GammaArg {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GammaArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base == GammaBase::PureNumber {
            return write!(f, "Γ({})", self.offset);
        }
        let sym = self.base.symbol();
        match self.offset.twice() {
            0 => write!(f, "Γ({sym})"),
            t if t < 0 => write!(f, "Γ({sym} − {})", self.offset.abs()),
            _ => write!(f, "Γ({sym} + {})", self.offset),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Numerator,
    Denominator,
}

/// One gamma factor with its side of the fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaFactor {
    pub base: GammaBase,
    pub twice_offset: i64,
    pub side: Side,
}

impl GammaFactor {
    pub fn arg(&self) -> GammaArg {
        GammaArg { base: self.base, offset: HalfInt::from_twice(self.twice_offset) }
    }
}

/// Exact product `π^e · ∏ Γ(num_i) / ∏ Γ(den_j)`.
///
/// Equality compares normalized ledgers, i.e. multisets after cancelling
/// identical numerator and denominator factors.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "LedgerWire", try_from = "LedgerWire")]
pub struct FactorLedger {
    pi_exponent: Rational64,
    numerator: Vec<GammaArg>,
    denominator: Vec<GammaArg>,
}

impl FactorLedger {
    pub fn one() -> Self {
        FactorLedger { pi_exponent: Rational64::from_integer(0), numerator: vec![], denominator: vec![] }
    }

    pub fn pi_power(exponent: HalfInt) -> Self {
        FactorLedger { pi_exponent: half_to_rational(exponent), ..Self::one() }
    }

    pub fn gamma(arg: GammaArg) -> Self {
        FactorLedger { numerator: vec![arg], ..Self::one() }
    }

    pub fn inv_gamma(arg: GammaArg) -> Self {
        FactorLedger { denominator: vec![arg], ..Self::one() }
    }

    /// Fully expanded multivariate gamma `Γ_q(arg)` (real) or `Γ̃_q(arg)`
    /// (complex) as a π power times `q` scalar gammas.
    pub fn mvgamma(case: Case, q: usize, arg: GammaArg) -> Self {
        let step = case.offset_step();
        FactorLedger {
            pi_exponent: half_to_rational(case.pi_exponent(q)),
            numerator: (0..q as i64).map(|j| arg.shifted(-(step * j))).collect(),
            denominator: vec![],
        }
    }

    /// Concatenating product; nothing is cancelled.
    pub fn times(&self, other: &FactorLedger) -> Self {
        let mut out = self.clone();
        out.pi_exponent += other.pi_exponent;
        out.numerator.extend_from_slice(&other.numerator);
        out.denominator.extend_from_slice(&other.denominator);
        out
    }

    pub fn inverse(&self) -> Self {
        FactorLedger {
            pi_exponent: -self.pi_exponent,
            numerator: self.denominator.clone(),
            denominator: self.numerator.clone(),
        }
    }

    pub fn product<'a>(items: impl IntoIterator<Item = &'a FactorLedger>) -> Self {
        items.into_iter().fold(Self::one(), |acc, l| acc.times(l))
    }

    /// Cancels common factors and sorts both sides.
    pub fn normalized(&self) -> Self {
        let mut counts: BTreeMap<GammaArg, i64> = BTreeMap::new();
        for a in &self.numerator {
            *counts.entry(*a).or_default() += 1;
        }
        for a in &self.denominator {
            *counts.entry(*a).or_default() -= 1;
        }
        let mut numerator = vec![];
        let mut denominator = vec![];
        for (arg, c) in counts {
            let target = if c > 0 { &mut numerator } else { &mut denominator };
            target.extend(std::iter::repeat_n(arg, c.unsigned_abs() as usize));
        }
        FactorLedger { pi_exponent: self.pi_exponent, numerator, denominator }
    }

    pub fn pi_exponent(&self) -> Rational64 {
        self.pi_exponent
    }

    pub fn numerator(&self) -> &[GammaArg] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[GammaArg] {
        &self.denominator
    }

    pub fn factors(&self) -> impl Iterator<Item = GammaFactor> + '_ {
        let side = |s| move |a: &GammaArg| GammaFactor { base: a.base, twice_offset: a.offset.twice(), side: s };
        self.numerator.iter().map(side(Side::Numerator)).chain(self.denominator.iter().map(side(Side::Denominator)))
    }

    pub fn involves_beta(&self) -> bool {
        self.numerator
            .iter()
            .chain(&self.denominator)
            .any(|a| matches!(a.base, GammaBase::Beta | GammaBase::AlphaPlusBeta))
    }

    /// `pi_exponent · log π + Σ log Γ(num) − Σ log Γ(den)` at (α, β).
    pub fn log_value(&self, alpha: f64, beta: Option<f64>) -> Result<f64, ReductionError> {
        let eval = |arg: &GammaArg| -> Result<f64, ReductionError> {
            let x = arg.evaluate(alpha, beta)?;
            if !(x > 0.0) {
                return Err(ReductionError::ArgumentDomain { factor: arg.to_string(), value: x });
            }
            Ok(ln_gamma(x))
        };
        let num = self.numerator.iter().map(eval).sum::<Result<f64, _>>()?;
        let den = self.denominator.iter().map(eval).sum::<Result<f64, _>>()?;
        let e = *self.pi_exponent.numer() as f64 / *self.pi_exponent.denom() as f64;
        Ok(e * PI.ln() + num - den)
    }
}

/// Free-function form of [`FactorLedger::log_value`].
pub fn ledger_to_log_value(ledger: &FactorLedger, alpha: f64, beta: Option<f64>) -> Result<f64, ReductionError> {
    ledger.log_value(alpha, beta)
}

pub(crate) fn half_to_rational(h: HalfInt) -> Rational64 {
    Rational64::new(h.twice(), 2)
}

impl PartialEq for FactorLedger {
    fn eq(&self, other: &Self) -> bool {
        let a = self.normalized();
        let b = other.normalized();
        a.pi_exponent == b.pi_exponent && a.numerator == b.numerator && a.denominator == b.denominator
    }
}

impl Eq for FactorLedger {}

impl fmt::Display for FactorLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        if *self.pi_exponent.numer() != 0 {
            parts.push(format!("π^({})", self.pi_exponent));
        }
        parts.extend(self.numerator.iter().map(ToString::to_string));
        let mut text = if parts.is_empty() { "1".to_string() } else { parts.join(" ") };
        if !self.denominator.is_empty() {
            let den: Vec<String> = self.denominator.iter().map(ToString::to_string).collect();
            text = format!("{text} / [{}]", den.join(" "));
        }
        f.write_str(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalWire {
    num: i64,
    den: i64,
}

#[derive(Serialize, Deserialize)]
struct LedgerWire {
    pi_exponent: RationalWire,
    factors: Vec<GammaFactor>,
}

impl From<FactorLedger> for LedgerWire {
    fn from(l: FactorLedger) -> Self {
        LedgerWire {
            pi_exponent: RationalWire { num: *l.pi_exponent.numer(), den: *l.pi_exponent.denom() },
            factors: l.factors().collect(),
        }
    }
}

impl TryFrom<LedgerWire> for FactorLedger {
    type Error = String;

    fn try_from(w: LedgerWire) -> Result<Self, Self::Error> {
        if w.pi_exponent.den == 0 {
            return Err("zero denominator in pi exponent".into());
        }
        let mut out = FactorLedger::one();
        out.pi_exponent = Rational64::new(w.pi_exponent.num, w.pi_exponent.den);
        for f in w.factors {
            match f.side {
                Side::Numerator => out.numerator.push(f.arg()),
                Side::Denominator => out.denominator.push(f.arg()),
            }
        }
        Ok(out)
    }
}
