use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ledger::{FactorLedger, GammaArg, GammaBase};
use super::{BlockMethod, ReductionError};
use crate::gammafn::{Case, HalfInt};

/// Integral families that the engine reduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    GammaReal,
    GammaComplex,
    Beta1Real,
    Beta1Complex,
    Beta2Real,
}

impl Family {
    pub fn case(self) -> Case {
        match self {
            Family::GammaComplex | Family::Beta1Complex => Case::Complex,
            _ => Case::Real,
        }
    }

    pub fn has_beta(self) -> bool {
        !matches!(self, Family::GammaReal | Family::GammaComplex)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::GammaReal => "gamma_real",
            Family::GammaComplex => "gamma_complex",
            Family::Beta1Real => "beta1_real",
            Family::Beta1Complex => "beta1_complex",
            Family::Beta2Real => "beta2_real",
        }
    }

    /// The integral in words, e.g. `∫_{X>0} |X|^{α-(p+1)/2} e^{-tr X} dX`.
    pub fn integral(self) -> &'static str {
        match self {
            Family::GammaReal => "∫_{X>0} |X|^{α-(p+1)/2} e^{-tr X} dX",
            Family::GammaComplex => "∫_{X̃>0} |det X̃|^{α-p} e^{-tr X̃} dX̃",
            Family::Beta1Real => "∫_{0<X<I} |X|^{α-(p+1)/2} |I-X|^{β-(p+1)/2} dX",
            Family::Beta1Complex => "∫_{0<X̃<I} |det X̃|^{α-p} |det(I-X̃)|^{β-p} dX̃",
            Family::Beta2Real => "∫_{X>0} |X|^{α-(p+1)/2} |I+X|^{-(α+β)} dX",
        }
    }

    /// Symbol of the closed form, e.g. `Γ̃_3(α)`.
    pub fn closed_form_symbol(self, p: usize) -> String {
        match self {
            Family::GammaReal => format!("Γ_{p}(α)"),
            Family::GammaComplex => format!("Γ̃_{p}(α)"),
            Family::Beta1Complex => format!("B̃_{p}(α, β)"),
            Family::Beta1Real | Family::Beta2Real => format!("B_{p}(α, β)"),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "gamma_real" => Family::GammaReal,
            "gamma_complex" => Family::GammaComplex,
            "beta1_real" => Family::Beta1Real,
            "beta1_complex" => Family::Beta1Complex,
            "beta2_real" => Family::Beta2Real,
            other => return Err(format!("unknown family '{other}'")),
        })
    }
}

/// Named change-of-variable moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Substitution {
    SchurSplit,
    YShift,
    URatio,
    Stiefel,
    WWhiten,
    GaussianBlock,
    UShiftBlock,
}

impl Substitution {
    pub fn name(self) -> &'static str {
        match self {
            Substitution::SchurSplit => "schur_split",
            Substitution::YShift => "y_shift",
            Substitution::URatio => "u_ratio",
            Substitution::Stiefel => "stiefel",
            Substitution::WWhiten => "w_whiten",
            Substitution::GaussianBlock => "gaussian_block",
            Substitution::UShiftBlock => "u_shift_block",
        }
    }
}

/// One substitution with the factors it emits, uncancelled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub kind: Substitution,
    pub note: String,
    pub factors: FactorLedger,
}

/// Variables integrated out in a step (1-based indices of the original matrix).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Eliminated {
    /// Diagonal entry `x_kk` with the off-diagonal row beside it.
    Scalar { index: usize },
    /// Rows and columns `first..=last`.
    Block { first: usize, last: usize },
}

impl fmt::Display for Eliminated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eliminated::Scalar { index } => write!(f, "x_{index}{index}"),
            Eliminated::Block { first, last } => write!(f, "block {first}..{last}"),
        }
    }
}

/// Kernel left after a step: same family at `size`, with shifted parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub size: usize,
    pub alpha_offset: HalfInt,
    pub beta_offset: HalfInt,
}

/// A convergence requirement `base > bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub base: GammaBase,
    pub bound: HalfInt,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.base {
            GammaBase::Alpha => "α",
            GammaBase::Beta => "β",
            GammaBase::AlphaPlusBeta => "α + β",
            GammaBase::PureNumber => "1",
        };
        write!(f, "{sym} > {}", self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    /// 1-based.
    pub step_index: usize,
    /// Dimension of the kernel before the step.
    pub size_before: usize,
    pub eliminated: Eliminated,
    pub substitutions: Vec<Move>,
    /// Normalized product of the moves' factors.
    pub contribution: FactorLedger,
    pub residual: Residual,
    /// Increase of the |X| exponent of the residual beyond `α − (m+1)/2`
    /// (real) or `α − m` (complex) carried from the eliminated variables.
    pub residual_exponent_shift: HalfInt,
    pub conditions: Vec<Condition>,
}

impl ReductionStep {
    pub(crate) fn new(
        index: usize,
        size_before: usize,
        eliminated: Eliminated,
        moves: Vec<Move>,
        residual: Residual,
        residual_exponent_shift: HalfInt,
    ) -> Self {
        let raw = FactorLedger::product(moves.iter().map(|m| &m.factors));
        ReductionStep {
            step_index: index,
            size_before,
            eliminated,
            contribution: raw.normalized(),
            conditions: conditions_of(&raw),
            substitutions: moves,
            residual,
            residual_exponent_shift,
        }
    }
}

/// Convergence requirements implied by the raw numerator factors: each
/// `Γ(base + c)` needs `base > −c`. The tightest bound per base is kept.
pub fn conditions_of(raw: &FactorLedger) -> Vec<Condition> {
    let mut tightest: BTreeMap<GammaBase, HalfInt> = BTreeMap::new();
    for arg in raw.numerator() {
        if arg.base == GammaBase::PureNumber {
            continue;
        }
        let bound = -arg.offset;
        tightest.entry(arg.base).and_modify(|b| *b = (*b).max(bound)).or_insert(bound);
    }
    tightest.into_iter().map(|(base, bound)| Condition { base, bound }).collect()
}

/// Full derivation of a closed form by successive elimination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub family: Family,
    pub p: usize,
    pub schedule: Vec<usize>,
    pub method: BlockMethod,
    pub steps: Vec<ReductionStep>,
    /// Normalized product of all step contributions.
    pub total: FactorLedger,
}

impl ReductionTrace {
    pub(crate) fn new(family: Family, p: usize, schedule: Vec<usize>, method: BlockMethod, steps: Vec<ReductionStep>) -> Self {
        let total = FactorLedger::product(steps.iter().map(|s| &s.contribution)).normalized();
        ReductionTrace { family, p, schedule, method, steps, total }
    }

    pub fn case(&self) -> Case {
        self.family.case()
    }

    /// Product of every move's factors before any cancellation.
    pub fn raw_total(&self) -> FactorLedger {
        FactorLedger::product(self.steps.iter().flat_map(|s| s.substitutions.iter().map(|m| &m.factors)))
    }

    pub fn closed_form(&self) -> FactorLedger {
        super::closed_form_ledger(self.family, self.p)
    }

    pub fn matches_closed_form(&self) -> bool {
        self.total == self.closed_form()
    }

    /// Tightest condition per base over all steps.
    pub fn validity(&self) -> Vec<Condition> {
        conditions_of(&self.raw_total())
    }

    pub fn log_value(&self, alpha: f64, beta: Option<f64>) -> Result<f64, ReductionError> {
        if self.family.has_beta() && beta.is_none() {
            return Err(ReductionError::MissingBeta);
        }
        self.total.log_value(alpha, beta)
    }

    /// Per-step scalar gamma arguments in `α`, used by structural checks.
    pub fn step_alpha_numerators(&self) -> Vec<Vec<GammaArg>> {
        self.steps
            .iter()
            .map(|s| s.contribution.numerator().iter().copied().filter(|a| a.base == GammaBase::Alpha).collect())
            .collect()
    }
}
