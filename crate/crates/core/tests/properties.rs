use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

use matvar_core::densities::{
    log_density_beta, log_density_gamma, BetaKind, MatrixBetaParams, MatrixGammaParams,
};
use matvar_core::gammafn::{ln_gamma, log_beta_p, log_gamma_p, log_gamma_p_complex, log_mvgamma, Case, HalfInt};
use matvar_core::matcore::{
    cholesky_factor, triangular_jacobian_log, Matrix, MatrixRecord, Partition, PdMatrix, Pivot, Scalar,
};
use matvar_core::reduction::{
    ledger_to_log_value, reduce, reduce_beta1, reduce_beta2_real, reduce_gamma_real, Family, GammaArg,
};
use matvar_core::samplers::Sampler;

fn real_pd(p: usize, entries: &[f64]) -> Matrix<f64> {
    let b = Matrix::from_fn(p, p, |i, j| entries[i * p + j]);
    b.matmul(&b.adjoint()).add(&Matrix::identity(p).scale(0.5))
}

fn complex_pd(p: usize, entries: &[f64]) -> Matrix<Complex64> {
    let b = Matrix::from_fn(p, p, |i, j| Complex64::new(entries[2 * (i * p + j)], entries[2 * (i * p + j) + 1]));
    b.matmul(&b.adjoint()).add(&Matrix::identity(p).scale(0.5))
}

fn rel_diff<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> f64 {
    a.sub(b).frobenius() / b.frobenius()
}

/// A composition of `p` from cut points.
fn schedule_from(p: usize, cuts: &[bool]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut run = 1;
    for i in 1..p {
        if cuts[i - 1] {
            out.push(run);
            run = 1;
        } else {
            run += 1;
        }
    }
    out.push(run);
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn real_recursion(p in 2usize..=12, extra in 1e-3f64..20.0) {
        let a = (p as f64 - 1.0) / 2.0 + extra;
        let lhs = log_gamma_p(p, a).unwrap();
        let rhs = (p as f64 - 1.0) / 2.0 * PI.ln() + ln_gamma(a) + log_gamma_p(p - 1, a - 0.5).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn complex_recursion(p in 2usize..=10, extra in 1e-3f64..20.0) {
        let a = p as f64 - 1.0 + extra;
        let lhs = log_gamma_p_complex(p, a).unwrap();
        let rhs = (p as f64 - 1.0) * PI.ln() + ln_gamma(a) + log_gamma_p_complex(p - 1, a - 1.0).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn block_identity_and_mirror(p in 2usize..=6, split in 0usize..5, extra in 1e-3f64..15.0) {
        let p1 = 1 + split % (p - 1);
        let p2 = p - p1;
        let a = (p as f64 - 1.0) / 2.0 + extra;
        let full = log_gamma_p(p, a).unwrap();
        let block = |q1: usize, q2: usize| {
            (q1 * q2) as f64 / 2.0 * PI.ln() + log_gamma_p(q1, a).unwrap() + log_gamma_p(q2, a - q1 as f64 / 2.0).unwrap()
        };
        prop_assert!((block(p1, p2) - full).abs() <= 1e-12 * full.abs().max(1.0));
        prop_assert!((block(p2, p1) - full).abs() <= 1e-12 * full.abs().max(1.0));
    }

    #[test]
    fn beta_is_symmetric(p in 1usize..=6, x in 1e-3f64..10.0, y in 1e-3f64..10.0, complex: bool) {
        let case = if complex { Case::Complex } else { Case::Real };
        let b = case.domain_bound(p);
        let (a, c) = (b + x, b + y);
        let l = log_beta_p(p, a, c, case).unwrap();
        let r = log_beta_p(p, c, a, case).unwrap();
        prop_assert!((l - r).abs() <= 1e-13 * l.abs().max(1.0));
    }

    #[test]
    fn cholesky_reconstructs(p in 1usize..=8, entries in prop::collection::vec(-2.0f64..2.0, 128)) {
        let x = real_pd(p, &entries);
        let l = cholesky_factor(&x).unwrap();
        prop_assert!(rel_diff(&l.reconstruct(), &x) <= 1e-10);
        let z = complex_pd(p, &entries);
        let l = cholesky_factor(&z).unwrap();
        prop_assert!(rel_diff(&l.reconstruct(), &z) <= 1e-10);
    }

    #[test]
    fn log_det_splits_over_partition(p in 2usize..=8, cut in 0usize..7, entries in prop::collection::vec(-2.0f64..2.0, 128)) {
        let p1 = 1 + cut % (p - 1);
        let x = PdMatrix::new(real_pd(p, &entries)).unwrap();
        let part = Partition::new(&x, p1).unwrap();
        let s = part.schur_complement(Pivot::OnX11).unwrap();
        prop_assert!((x.log_det() - part.x11.log_det() - s.log_det()).abs() <= 1e-10);
        let s2 = part.schur_complement(Pivot::OnX22).unwrap();
        prop_assert!((x.log_det() - part.x22.log_det() - s2.log_det()).abs() <= 1e-10);
        let z = PdMatrix::new(complex_pd(p, &entries)).unwrap();
        let part = Partition::new(&z, p1).unwrap();
        let s = part.schur_complement(Pivot::OnX11).unwrap();
        prop_assert!((z.log_det() - part.x11.log_det() - s.log_det()).abs() <= 1e-10);
    }

    #[test]
    fn hermitian_forms_are_real(p in 2usize..=6, entries in prop::collection::vec(-2.0f64..2.0, 128)) {
        let z = PdMatrix::new(complex_pd(p, &entries)).unwrap();
        let part = Partition::new(&z, p - 1).unwrap();
        // X21 X11⁻¹ X12 with X21 a single row
        let row: Vec<Complex64> = part.x21.row(0).to_vec();
        let col: Vec<Complex64> = row.iter().map(|c| c.conj()).collect();
        let solved = part.x11.solve(&col);
        let form: Complex64 = row.iter().zip(&solved).map(|(a, b)| a * b).sum();
        prop_assert!(form.im.abs() < 1e-12 * form.re.abs().max(1.0));
        prop_assert!(form.re >= 0.0);
        prop_assert!(part.x11.hermitian_form(&col).im().abs() < 1e-12 * form.re.abs().max(1.0));
    }

    #[test]
    fn jacobian_is_positive(p in 1usize..=8, entries in prop::collection::vec(-2.0f64..2.0, 128)) {
        let l = cholesky_factor(&real_pd(p, &entries)).unwrap();
        let j = triangular_jacobian_log(&l);
        prop_assert!(j.is_finite() && j.exp() > 0.0);
        let l = cholesky_factor(&complex_pd(p, &entries)).unwrap();
        prop_assert!(triangular_jacobian_log(&l).is_finite());
    }

    #[test]
    fn matrix_json_round_trips(p in 1usize..=5, entries in prop::collection::vec(-2.0f64..2.0, 64)) {
        let x = real_pd(p, &entries);
        let text = serde_json::to_string(&MatrixRecord::from_matrix(&x)).unwrap();
        let back: MatrixRecord = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_matrix::<f64>().unwrap(), x);
        let z = complex_pd(p, &entries);
        let text = serde_json::to_string(&MatrixRecord::from_matrix(&z)).unwrap();
        let back: MatrixRecord = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_matrix::<Complex64>().unwrap(), z);
    }

    #[test]
    fn traces_evaluate_to_closed_forms(p in 1usize..=8, x in 1e-2f64..8.0, y in 1e-2f64..8.0) {
        for family in [Family::GammaReal, Family::GammaComplex, Family::Beta1Real, Family::Beta1Complex, Family::Beta2Real] {
            let case = family.case();
            let b = case.domain_bound(p);
            let (a, c) = (b + x, b + y);
            let trace = reduce(family, p, None, None).unwrap();
            let (beta, want) = if family.has_beta() {
                (Some(c), log_beta_p(p, a, c, case).unwrap())
            } else {
                (None, log_mvgamma(p, a, case).unwrap())
            };
            let got = ledger_to_log_value(&trace.total, a, beta).unwrap();
            prop_assert!((got - want).abs() <= 1e-11 * want.abs().max(1.0), "{family} p={p}: {got} vs {want}");
        }
    }

    #[test]
    fn every_schedule_gives_the_same_ledger(p in 1usize..=10, cuts in prop::collection::vec(any::<bool>(), 9), complex: bool) {
        let family = if complex { Family::GammaComplex } else { Family::GammaReal };
        let schedule = schedule_from(p, &cuts);
        let blocks = reduce(family, p, Some(&schedule), None).unwrap();
        let ones = reduce(family, p, None, None).unwrap();
        prop_assert_eq!(blocks.total.normalized(), ones.total.normalized());
        prop_assert_eq!(blocks.steps.len(), schedule.len());
    }

    #[test]
    fn type1_density_is_symmetric(p in 1usize..=4, x in 0.1f64..5.0, y in 0.1f64..5.0, entries in prop::collection::vec(-2.0f64..2.0, 64)) {
        // U = A (A + B)⁻¹-style point strictly inside O < U < I
        let a = real_pd(p, &entries);
        let b = real_pd(p, &entries[16..]);
        let s = cholesky_factor(&a.add(&b)).unwrap();
        let u = s.inverse_congruence(&a).hermitian_part();
        let bound = Case::Real.domain_bound(p);
        let (al, be) = (bound + x, bound + y);
        let f = MatrixBetaParams::new(p, al, be, BetaKind::Type1, Case::Real).unwrap();
        let g = MatrixBetaParams::new(p, be, al, BetaKind::Type1, Case::Real).unwrap();
        let l = log_density_beta(&f, &u).unwrap();
        let r = log_density_beta(&g, &Matrix::identity(p).sub(&u)).unwrap();
        prop_assert!((l - r).abs() <= 1e-11 * l.abs().max(1.0), "{l} vs {r}");
    }

    #[test]
    fn draws_are_in_support(seed: u64, p in 1usize..=4, complex: bool) {
        let mut s = Sampler::from_seed(seed, 0);
        let case = if complex { Case::Complex } else { Case::Real };
        let a = case.domain_bound(p) + 0.7;
        let params = MatrixBetaParams::new(p, a, a + 0.3, BetaKind::Type1, case).unwrap();
        for _ in 0..20 {
            if complex {
                let x = s.gamma_matrix::<Complex64>(p, a).unwrap();
                prop_assert!(PdMatrix::new(x.matrix().clone()).is_ok());
                let u = s.beta_matrix::<Complex64>(&params).unwrap();
                prop_assert!(PdMatrix::new(Matrix::identity(p).sub(u.matrix())).is_ok());
            } else {
                let x = s.gamma_matrix::<f64>(p, a).unwrap();
                prop_assert!(PdMatrix::new(x.matrix().clone()).is_ok());
                let u = s.beta_matrix::<f64>(&params).unwrap();
                prop_assert!(PdMatrix::new(Matrix::identity(p).sub(u.matrix())).is_ok());
            }
        }
    }

    #[test]
    fn streams_are_reproducible(seed: u64, stream in 0u64..8) {
        let draw = || {
            let mut s = Sampler::from_seed(seed, stream);
            (0..5).map(|_| s.gamma_matrix::<f64>(3, 2.0).unwrap().into_matrix()).collect::<Vec<_>>()
        };
        prop_assert_eq!(draw(), draw());
    }
}

#[test]
fn per_step_structure_of_real_gamma_trace() {
    for p in 1..=8usize {
        let trace = reduce_gamma_real(p, &vec![1; p]).unwrap();
        let mut pi_sum = Rational64::from_integer(0);
        for (k, step) in trace.steps.iter().enumerate() {
            // step k (1-based) eliminates a row of size p − k + 1; its π power is (p−k)/2
            let m = (p - k - 1) as i64;
            let c = step.contribution.normalized();
            assert_eq!(c.pi_exponent(), Rational64::new(m, 2), "p={p} step {k}");
            assert_eq!(c.numerator(), &[GammaArg::alpha(HalfInt::from_twice(-m))]);
            assert!(c.denominator().is_empty());
            pi_sum += c.pi_exponent();
        }
        assert_eq!(pi_sum, Rational64::new((p * (p - 1)) as i64, 4));
    }
}

#[test]
fn beta_traces_have_2p_over_p_factors() {
    for p in 1..=8usize {
        for trace in [reduce_beta1(p, Case::Real), reduce_beta1(p, Case::Complex), reduce_beta2_real(p)] {
            let total = trace.unwrap().total.normalized();
            assert_eq!(total.numerator().len(), 2 * p);
            assert_eq!(total.denominator().len(), p);
        }
    }
}

#[test]
fn gamma_density_scale_covariance() {
    // X ~ Gamma_2(α, B) ⇒ cX ~ Gamma_2(α, B/c), densities related by c^{p(p+1)/2}
    let (p, alpha, c) = (2usize, 2.3, 1.7);
    let v = PdMatrix::new(Matrix::from_rows(&[[2.0, 0.4], [0.4, 1.0]]).unwrap()).unwrap();
    let v_inv = Matrix::from_rows(&[[1.0, -0.4], [-0.4, 2.0]]).unwrap().scale(1.0 / 1.84);
    let b = PdMatrix::new(v_inv.scale(0.5)).unwrap();
    let f = MatrixGammaParams::new(alpha, b.clone()).unwrap();
    let g = MatrixGammaParams::new(alpha, PdMatrix::from_symmetrizing(b.matrix().scale(1.0 / c)).unwrap()).unwrap();
    let x = Matrix::from_rows(&[[1.3, -0.2], [-0.2, 0.8]]).unwrap();
    let lf = log_density_gamma(&f, &x).unwrap();
    let lg = log_density_gamma(&g, &x.scale(c)).unwrap();
    let jac = (p * (p + 1)) as f64 / 2.0 * c.ln();
    assert!((lf - (lg + jac)).abs() < 1e-12, "{lf} vs {}", lg + jac);

    // Wishart form with n = 2α degrees of freedom and B = ½V⁻¹
    let n = 2.0 * alpha;
    let wishart = (n - p as f64 - 1.0) / 2.0 * x_log_det(&x)
        - 0.5 * v_inv.trace_product(&x)
        - n * p as f64 / 2.0 * 2f64.ln()
        - n / 2.0 * v.log_det()
        - log_gamma_p(p, n / 2.0).unwrap();
    assert!((lf - wishart).abs() < 1e-12, "{lf} vs {wishart}");
}

fn x_log_det(x: &Matrix<f64>) -> f64 {
    PdMatrix::new(x.clone()).unwrap().log_det()
}

/// Composite Simpson on (0, 1) after mapping.
fn simpson(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / n as f64;
    let mut acc = f(0.0) + f(1.0);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn scalar_densities_normalize() {
    let scalar = |x: f64| Matrix::from_rows(&[[x]]).unwrap();
    let gamma = MatrixGammaParams::<f64>::standard(1, 3.5).unwrap();
    // x = u/(1−u)
    let total = simpson(20_000, |u| {
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        let x = u / (1.0 - u);
        log_density_gamma(&gamma, &scalar(x)).unwrap().exp() / (1.0 - u).powi(2)
    });
    assert!((total - 1.0).abs() < 1e-8, "gamma {total}");

    let b1 = MatrixBetaParams::new(1, 2.5, 3.0, BetaKind::Type1, Case::Real).unwrap();
    let total = simpson(20_000, |u| {
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        log_density_beta(&b1, &scalar(u)).unwrap().exp()
    });
    assert!((total - 1.0).abs() < 1e-8, "beta1 {total}");

    let b2 = MatrixBetaParams::new(1, 2.5, 3.0, BetaKind::Type2, Case::Real).unwrap();
    let total = simpson(20_000, |u| {
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        let x = u / (1.0 - u);
        log_density_beta(&b2, &scalar(x)).unwrap().exp() / (1.0 - u).powi(2)
    });
    assert!((total - 1.0).abs() < 1e-8, "beta2 {total}");
}

#[test]
fn complex_and_real_scalar_beta_densities_agree() {
    for (a, b, x) in [(2.0, 3.0, 0.3), (0.7, 1.9, 0.85), (4.5, 0.6, 0.01)] {
        let r = MatrixBetaParams::new(1, a, b, BetaKind::Type1, Case::Real).unwrap();
        let c = MatrixBetaParams::new(1, a, b, BetaKind::Type1, Case::Complex).unwrap();
        let lr = log_density_beta(&r, &Matrix::from_rows(&[[x]]).unwrap()).unwrap();
        let lc = log_density_beta(&c, &Matrix::from_rows(&[[Complex64::new(x, 0.0)]]).unwrap()).unwrap();
        assert_eq!(lr, lc);
    }
}
