use super::ledger::{FactorLedger, GammaArg};
use super::trace::{Eliminated, Family, Move, ReductionStep, ReductionTrace, Residual, Substitution};
use super::{BlockMethod, ReductionError};
use crate::gammafn::{Case, HalfInt};

fn g(arg: GammaArg) -> FactorLedger {
    FactorLedger::gamma(arg)
}

fn inv(arg: GammaArg) -> FactorLedger {
    FactorLedger::inv_gamma(arg)
}

fn alpha(offset: HalfInt) -> GammaArg {
    GammaArg::alpha(offset)
}

fn num(value: HalfInt) -> GammaArg {
    GammaArg::number(value)
}

fn mv(move_kind: Substitution, note: impl Into<String>, factors: FactorLedger) -> Move {
    Move { kind: move_kind, note: note.into(), factors }
}

fn h(n: usize) -> i64 {
    n as i64
}

fn residual(size: usize) -> Residual {
    Residual { size, alpha_offset: HalfInt::ZERO, beta_offset: HalfInt::ZERO }
}

/// `det`/`|·|` and adjoint marks used in notes.
fn marks(case: Case) -> (&'static str, &'static str) {
    match case {
        Case::Real => ("|", "'"),
        Case::Complex => ("|det ", "*"),
    }
}

fn check_dim(p: usize) -> Result<(), ReductionError> {
    if p == 0 {
        Err(ReductionError::InvalidDimension(p))
    } else {
        Ok(())
    }
}

fn check_schedule(p: usize, schedule: &[usize]) -> Result<(), ReductionError> {
    check_dim(p)?;
    let bad = |reason: &str| ReductionError::InvalidSchedule { schedule: schedule.to_vec(), p, reason: reason.into() };
    if schedule.is_empty() {
        return Err(bad("schedule is empty"));
    }
    if schedule.contains(&0) {
        return Err(bad("block sizes must be positive"));
    }
    if schedule.iter().sum::<usize>() != p {
        return Err(bad("block sizes must sum to p"));
    }
    Ok(())
}

/// Closed form of a family as a fully expanded ledger.
pub fn closed_form_ledger(family: Family, p: usize) -> FactorLedger {
    let case = family.case();
    let gp = |arg| FactorLedger::mvgamma(case, p, arg);
    if family.has_beta() {
        gp(alpha(HalfInt::ZERO))
            .times(&gp(GammaArg::beta(HalfInt::ZERO)))
            .times(&gp(GammaArg::alpha_plus_beta(HalfInt::ZERO)).inverse())
    } else {
        gp(alpha(HalfInt::ZERO))
    }
}

/// One scalar elimination of the gamma integral at current size `m`.
fn gamma_scalar_step(case: Case, index: usize, m: usize) -> ReductionStep {
    let s = case.offset_step();
    let d = s * (h(m) - 1);
    let (det, adj) = marks(case);
    let mut moves = vec![mv(
        Substitution::SchurSplit,
        if m == 1 {
            "∫_0^∞ x^{α-1} e^{-x} dx".to_string()
        } else {
            format!(
                "{det}X| = {det}X11|·(x_{m}{m} − X21 X11⁻¹ X12); Y = x_{m}{m}^(-1/2) X21 X11^(-1/2); ∫ x_{m}{m}^(α-1) e^(-x_{m}{m}) dx_{m}{m}"
            )
        },
        g(alpha(HalfInt::ZERO)),
    )];
    if m >= 2 {
        moves.push(mv(
            Substitution::Stiefel,
            format!("u = YY{adj} over {}; ∫_0^1 u^{{{d}-1}} (1-u)^{{α-{d}-1}} du", coords((m - 1) * case.real_dim())),
            FactorLedger::pi_power(d)
                .times(&inv(num(d)))
                .times(&g(num(d)))
                .times(&g(alpha(-d)))
                .times(&inv(alpha(HalfInt::ZERO))),
        ));
    }
    let shift = if m == 1 { HalfInt::ZERO } else { s };
    ReductionStep::new(index, m, Eliminated::Scalar { index: m }, moves, residual(m - 1), shift)
}

/// Block elimination of `q` rows from a kernel of size `m`, leaving `r = m − q`.
fn gamma_block_step(
    case: Case,
    method: BlockMethod,
    index: usize,
    m: usize,
    q: usize,
    eliminated: Eliminated,
) -> ReductionStep {
    let s = case.offset_step();
    let r = m - q;
    let (det, adj) = marks(case);
    let moves = match method {
        BlockMethod::Gaussian | BlockMethod::GaussianMirror => {
            let (pivot, schur) = if method == BlockMethod::Gaussian {
                ("X11", "X22 − X21 X11⁻¹ X12")
            } else {
                ("X22", "X11 − X12 X22⁻¹ X21")
            };
            let mut moves = vec![mv(
                Substitution::UShiftBlock,
                if r == 0 {
                    format!("∫ {det}X|^(α-h) e^(-tr X) dX over the {q}×{q} block")
                } else {
                    format!("U = {schur} ({q}×{q}); ∫ {det}U|^(α-{}-h) e^(-tr U) dU", s * h(r))
                },
                FactorLedger::mvgamma(case, q, alpha(-(s * h(r)))),
            )];
            if r > 0 {
                moves.push(mv(
                    Substitution::GaussianBlock,
                    format!("Y = off-diagonal block · {pivot}^(-1/2); ∫ e^(-tr YY{adj}) dY over {r}×{q}"),
                    FactorLedger::pi_power(s * h(r * q)),
                ));
            }
            moves
        }
        BlockMethod::Stiefel | BlockMethod::OneAtATime => {
            let gq = |arg| FactorLedger::mvgamma(Case::Real, q, arg);
            let a0 = alpha(HalfInt::ZERO);
            let mut moves = vec![mv(
                Substitution::SchurSplit,
                if r == 0 {
                    format!("∫ |X|^(α-h) e^(-tr X) dX over the {q}×{q} block")
                } else {
                    "|X| = |X11| |X22| |I − YY'|, Y = X22^(-1/2) X21 X11^(-1/2); ∫ |X22|^(α-(q+1)/2) e^(-tr X22) dX22".to_string()
                },
                gq(a0),
            )];
            if r > 0 {
                let half_r = HalfInt::from_twice(h(r));
                moves.push(mv(
                    Substitution::Stiefel,
                    format!("S = YY' ({q}×{q}) over Y in {r}×{q}; ∫_0^I |S|^({half_r}-({q}+1)/2) |I-S|^(α-{half_r}-({q}+1)/2) dS"),
                    FactorLedger::pi_power(HalfInt::HALF * h(r * q))
                        .times(&gq(num(half_r)).inverse())
                        .times(&gq(num(half_r)))
                        .times(&gq(alpha(-half_r)))
                        .times(&gq(a0).inverse()),
                ));
            }
            moves
        }
    };
    let shift = if r == 0 { HalfInt::ZERO } else { s * h(q) };
    ReductionStep::new(index, m, eliminated, moves, residual(r), shift)
}

/// Gamma integral with the default method for the schedule: one-at-a-time
/// moves when every block is 1, Gaussian blocks otherwise.
pub fn reduce_gamma(case: Case, p: usize, schedule: &[usize]) -> Result<ReductionTrace, ReductionError> {
    let method = if schedule.iter().all(|&b| b == 1) { BlockMethod::OneAtATime } else { BlockMethod::Gaussian };
    reduce_gamma_with(case, p, schedule, method)
}

pub fn reduce_gamma_real(p: usize, schedule: &[usize]) -> Result<ReductionTrace, ReductionError> {
    reduce_gamma(Case::Real, p, schedule)
}

pub fn reduce_gamma_complex(p: usize, schedule: &[usize]) -> Result<ReductionTrace, ReductionError> {
    reduce_gamma(Case::Complex, p, schedule)
}

pub fn reduce_gamma_with(
    case: Case,
    p: usize,
    schedule: &[usize],
    method: BlockMethod,
) -> Result<ReductionTrace, ReductionError> {
    check_schedule(p, schedule)?;
    let family = match case {
        Case::Real => Family::GammaReal,
        Case::Complex => Family::GammaComplex,
    };
    let invalid = |reason: &str| ReductionError::InvalidSchedule { schedule: schedule.to_vec(), p, reason: reason.into() };
    let mut steps = vec![];
    match method {
        BlockMethod::OneAtATime => {
            if schedule.iter().any(|&b| b != 1) {
                return Err(invalid("one-at-a-time reduction needs every block of size 1"));
            }
            for (k, m) in (1..=p).rev().enumerate() {
                steps.push(gamma_scalar_step(case, k + 1, m));
            }
        }
        BlockMethod::Gaussian | BlockMethod::Stiefel => {
            if method == BlockMethod::Stiefel && case == Case::Complex {
                return Err(ReductionError::UnsupportedMethod { family, method });
            }
            let mut m = p;
            for (k, &q) in schedule.iter().rev().enumerate() {
                if method == BlockMethod::Stiefel && m > q && m - q < q {
                    return Err(invalid("Stiefel block elimination needs each peeled block no larger than what remains"));
                }
                let eliminated = Eliminated::Block { first: m - q + 1, last: m };
                steps.push(gamma_block_step(case, method, k + 1, m, q, eliminated));
                m -= q;
            }
        }
        BlockMethod::GaussianMirror => {
            let mut start = 0;
            for (k, &q) in schedule.iter().enumerate() {
                let m = p - start;
                let eliminated = Eliminated::Block { first: start + 1, last: start + q };
                steps.push(gamma_block_step(case, method, k + 1, m, q, eliminated));
                start += q;
            }
        }
    }
    Ok(ReductionTrace::new(family, p, schedule.to_vec(), method, steps))
}

/// Type-1 beta integral, one diagonal entry at a time.
pub fn reduce_beta1(p: usize, case: Case) -> Result<ReductionTrace, ReductionError> {
    check_dim(p)?;
    let s = case.offset_step();
    let (det, adj) = marks(case);
    let a0 = alpha(HalfInt::ZERO);
    let b = GammaArg::beta;
    let ab = GammaArg::alpha_plus_beta;
    let mut steps = vec![];
    for (k, m) in (1..=p).rev().enumerate() {
        let d = s * (h(m) - 1);
        let moves = if m == 1 {
            vec![mv(
                Substitution::URatio,
                "∫_0^1 x^(α-1) (1-x)^(β-1) dx",
                g(a0).times(&g(b(HalfInt::ZERO))).times(&inv(ab(HalfInt::ZERO))),
            )]
        } else {
            vec![
                mv(
                    Substitution::YShift,
                    format!(
                        "y = x_{m}{m} − X21 X11⁻¹ X12; 0 < y < b with b = 1 − X21 (X11⁻¹ + (I−X11)⁻¹) X12; {det}X| = {det}X11| y, {det}I−X| = {det}I−X11| (b − y)"
                    ),
                    FactorLedger::one(),
                ),
                mv(
                    Substitution::URatio,
                    format!("u = y/b; ∫_0^1 u^(α-{d}-1) (1-u)^(β-{d}-1) du, leaving b^(α+β-{})", d * 2 + HalfInt::ONE),
                    g(alpha(-d)).times(&g(b(-d))).times(&inv(ab(-(d * 2)))),
                ),
                mv(
                    Substitution::WWhiten,
                    format!("W = X21 X11^(-1/2) (I−X11)^(-1/2), b = 1 − WW{adj}; dX21 = {det}X11|^({s}) {det}I−X11|^({s}) dW"),
                    FactorLedger::one(),
                ),
                mv(
                    Substitution::Stiefel,
                    format!("v = WW{adj}; ∫_0^1 v^({d}-1) (1-v)^(α+β-{}-1) dv", d * 2),
                    FactorLedger::pi_power(d)
                        .times(&inv(num(d)))
                        .times(&g(num(d)))
                        .times(&g(ab(-(d * 2))))
                        .times(&inv(ab(-d))),
                ),
            ]
        };
        let shift = if m == 1 { HalfInt::ZERO } else { s };
        steps.push(ReductionStep::new(k + 1, m, Eliminated::Scalar { index: m }, moves, residual(m - 1), shift));
    }
    let family = match case {
        Case::Real => Family::Beta1Real,
        Case::Complex => Family::Beta1Complex,
    };
    Ok(ReductionTrace::new(family, p, vec![1; p], BlockMethod::OneAtATime, steps))
}

/// Type-2 real beta integral. Each step lowers the residual β by 1/2.
pub fn reduce_beta2_real(p: usize) -> Result<ReductionTrace, ReductionError> {
    check_dim(p)?;
    let half = HalfInt::HALF;
    let mut steps = vec![];
    for (k, m) in (1..=p).rev().enumerate() {
        let d = half * (h(m) - 1);
        let bo = -(half * h(k));
        let bk = GammaArg::beta(bo);
        let abk = GammaArg::alpha_plus_beta(bo);
        let moves = if m == 1 {
            vec![mv(
                Substitution::URatio,
                format!("∫_0^∞ x^(α-1) (1+x)^(-(α+β{})) dx", signed(bo)),
                g(alpha(HalfInt::ZERO)).times(&g(bk)).times(&inv(abk)),
            )]
        } else {
            vec![
                mv(
                    Substitution::YShift,
                    format!("y = x_{m}{m} − X21 X11⁻¹ X12 > 0; |I+X| = |I+X11| (b + y) with b = 1 + X21 (X11⁻¹ − (I+X11)⁻¹) X12"),
                    FactorLedger::one(),
                ),
                mv(
                    Substitution::URatio,
                    format!("u = y/b; ∫_0^∞ u^(α-{d}-1) (1+u)^(-(α+β{})) du, leaving b^(-(β{}))", signed(bo), signed(bo + d)),
                    g(alpha(-d)).times(&g(bk.shifted(d))).times(&inv(abk)),
                ),
                mv(
                    Substitution::WWhiten,
                    "W = X21 X11^(-1/2) (I+X11)^(-1/2), b = 1 + WW'; dX21 = |X11|^(1/2) |I+X11|^(1/2) dW",
                    FactorLedger::one(),
                ),
                mv(
                    Substitution::Stiefel,
                    format!("v = WW'; ∫_0^∞ v^({d}-1) (1+v)^(-(β{})) dv", signed(bo + d)),
                    FactorLedger::pi_power(d)
                        .times(&inv(num(d)))
                        .times(&g(num(d)))
                        .times(&g(bk))
                        .times(&inv(bk.shifted(d))),
                ),
            ]
        };
        let (res, shift) = if m == 1 {
            (residual(0), HalfInt::ZERO)
        } else {
            (Residual { size: m - 1, alpha_offset: HalfInt::ZERO, beta_offset: bo - half }, half)
        };
        steps.push(ReductionStep::new(k + 1, m, Eliminated::Scalar { index: m }, moves, res, shift));
    }
    Ok(ReductionTrace::new(Family::Beta2Real, p, vec![1; p], BlockMethod::OneAtATime, steps))
}

fn coords(n: usize) -> String {
    if n == 1 {
        "1 real coordinate".into()
    } else {
        format!("{n} real coordinates")
    }
}

fn signed(x: HalfInt) -> String {
    match x.twice() {
        0 => String::new(),
        t if t < 0 => format!(" − {}", x.abs()),
        _ => format!(" + {x}"),
    }
}

/// Dispatch on family. Block schedules apply to the gamma families only.
pub fn reduce(
    family: Family,
    p: usize,
    schedule: Option<&[usize]>,
    method: Option<BlockMethod>,
) -> Result<ReductionTrace, ReductionError> {
    let ones = vec![1; p];
    let schedule = schedule.unwrap_or(&ones);
    match family {
        Family::GammaReal | Family::GammaComplex => match method {
            Some(m) => reduce_gamma_with(family.case(), p, schedule, m),
            None => reduce_gamma(family.case(), p, schedule),
        },
        _ => {
            check_schedule(p, schedule)?;
            if let Some(m) = method.filter(|&m| m != BlockMethod::OneAtATime) {
                return Err(ReductionError::UnsupportedMethod { family, method: m });
            }
            if schedule.iter().any(|&b| b != 1) {
                return Err(ReductionError::InvalidSchedule {
                    schedule: schedule.to_vec(),
                    p,
                    reason: "beta integrals are reduced one entry at a time".into(),
                });
            }
            match family {
                Family::Beta1Real => reduce_beta1(p, Case::Real),
                Family::Beta1Complex => reduce_beta1(p, Case::Complex),
                _ => reduce_beta2_real(p),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gammafn::{log_beta_p, log_mvgamma};
    use crate::reduction::trace::Condition;
    use crate::reduction::GammaBase;

    fn hi(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn gamma_real_p1_is_scalar_gamma() {
        let t = reduce_gamma_real(1, &[1]).unwrap();
        assert_eq!(t.total, FactorLedger::gamma(alpha(HalfInt::ZERO)));
        assert_eq!(t.total.pi_exponent(), 0.into());
    }

    #[test]
    fn gamma_real_p3_steps() {
        let t = reduce_gamma_real(3, &[1, 1, 1]).unwrap();
        let nums = t.step_alpha_numerators();
        assert_eq!(nums, vec![vec![alpha(hi(-2))], vec![alpha(hi(-1))], vec![alpha(hi(0))]]);
        assert!(t.matches_closed_form());
        assert_eq!(t.steps[0].residual_exponent_shift, HalfInt::HALF);
        assert_eq!(t.validity(), vec![Condition { base: GammaBase::Alpha, bound: HalfInt::ONE }]);
    }

    #[test]
    fn complex_shift_is_one() {
        let t = reduce_gamma_complex(3, &[1, 1, 1]).unwrap();
        assert!(t.matches_closed_form());
        assert!(t.steps[..2].iter().all(|s| s.residual_exponent_shift == HalfInt::ONE));
        assert_eq!(t.steps[0].contribution.pi_exponent(), 2.into());
    }

    #[test]
    fn every_method_matches() {
        for case in [Case::Real, Case::Complex] {
            for sched in [vec![2, 3], vec![3, 2], vec![1, 2, 2], vec![5], vec![4, 1]] {
                for method in [BlockMethod::Gaussian, BlockMethod::GaussianMirror] {
                    let t = reduce_gamma_with(case, 5, &sched, method).unwrap();
                    assert!(t.matches_closed_form(), "{case} {sched:?} {method:?}");
                }
            }
        }
        let t = reduce_gamma_with(Case::Real, 5, &[3, 2], BlockMethod::Stiefel).unwrap();
        assert!(t.matches_closed_form());
        assert!(reduce_gamma_with(Case::Real, 5, &[2, 3], BlockMethod::Stiefel).is_err());
        assert!(matches!(
            reduce_gamma_with(Case::Complex, 5, &[3, 2], BlockMethod::Stiefel),
            Err(ReductionError::UnsupportedMethod { .. })
        ));
    }

    #[test]
    fn bad_schedules() {
        assert!(reduce_gamma_real(4, &[2, 1]).is_err());
        assert!(reduce_gamma_real(2, &[0, 2]).is_err());
        assert!(reduce_gamma_real(0, &[]).is_err());
        assert!(reduce_gamma_with(Case::Real, 3, &[2, 1], BlockMethod::OneAtATime).is_err());
        assert!(reduce(Family::Beta1Real, 3, Some(&[2, 1]), None).is_err());
    }

    #[test]
    fn beta_families_match_closed_forms() {
        for p in 1..=6 {
            assert!(reduce_beta1(p, Case::Real).unwrap().matches_closed_form());
            assert!(reduce_beta1(p, Case::Complex).unwrap().matches_closed_form());
            assert!(reduce_beta2_real(p).unwrap().matches_closed_form());
        }
    }

    #[test]
    fn beta1_real_p2_step_contribution() {
        let t = reduce_beta1(2, Case::Real).unwrap();
        let step = &t.steps[0];
        let expected = FactorLedger::pi_power(HalfInt::HALF)
            .times(&g(alpha(hi(-1))))
            .times(&g(GammaArg::beta(hi(-1))))
            .times(&inv(GammaArg::alpha_plus_beta(hi(-1))));
        assert_eq!(step.contribution, expected);
    }

    #[test]
    fn beta2_residual_beta_drops() {
        let t = reduce_beta2_real(3).unwrap();
        assert_eq!(t.steps[0].residual.beta_offset, -HalfInt::HALF);
        assert_eq!(t.steps[1].residual.beta_offset, -HalfInt::ONE);
        let v = t.validity();
        assert!(v.contains(&Condition { base: GammaBase::Beta, bound: HalfInt::ONE }));
        assert!(v.contains(&Condition { base: GammaBase::Alpha, bound: HalfInt::ONE }));
    }

    #[test]
    fn numeric_values_agree_with_closed_forms() {
        let t = reduce_gamma_complex(4, &[1, 1, 1, 1]).unwrap();
        let v = t.log_value(5.0, None).unwrap();
        assert!((v - log_mvgamma(4, 5.0, Case::Complex).unwrap()).abs() < 1e-12);
        let t = reduce_beta2_real(3).unwrap();
        let v = t.log_value(2.5, Some(3.25)).unwrap();
        assert!((v - log_beta_p(3, 2.5, 3.25, Case::Real).unwrap()).abs() < 1e-12);
        assert!(matches!(t.log_value(2.5, None), Err(ReductionError::MissingBeta)));
    }
}
