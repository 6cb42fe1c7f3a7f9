//! End-to-end acceptance gate: every deliverable of the toolkit checked at
//! its stated tolerance, one criterion per test, one pass line each.

use std::time::{Duration, Instant};

use num_complex::Complex64;

use asymtorus_core::classical::{
    commutative_scalar_curvature, has_uniform_weight, integrate_momenta, CPoly,
};
use asymtorus_core::curvature::{
    assemble, connection_terms, functional_kernel, kernel_identity_holds, trace_reduce_chiral,
    trace_reduce_plain, two_bein_terms, Channel, OperandTag,
};
use asymtorus_core::goldens;
use asymtorus_core::modfn::ModularFunction;
use asymtorus_core::scalar::Gauss;
use asymtorus_core::symbol::{parametrix, Letter};
use asymtorus_core::torus::TorusElement;

use asymtorus_lab::config::ProfileConfig;
use asymtorus_lab::dirac::BlockDirac;
use asymtorus_lab::gns::GnsBasis;
use asymtorus_lab::heat::fit_heat_window;
use asymtorus_lab::modular::{
    evaluate_functional, random_matrix, random_positive_matrix, trace_identity_gap,
    CurvatureEvaluator, ModularFrame, PolyWeight,
};
use asymtorus_lab::quadrature::{descriptor_quadrature, descriptor_shapes};
use asymtorus_lab::Sampler;

/// A positive conformal factor `1 + small random self-adjoint profile` with
/// modes along both directions.  The amplitudes keep the truncated
/// right-multiplication matrix positive by a wide margin.
fn random_factor(sampler: &mut Sampler, theta: f64) -> TorusElement<Complex64> {
    let coeffs: Vec<((i64, i64), Complex64)> = [(1i64, 0i64), (0, 1), (1, 1)]
        .iter()
        .map(|&(m, n)| ((m, n), sampler.complex() * 0.06))
        .collect();
    let w = TorusElement::from_coeffs(theta, coeffs);
    let profile = w.add(&w.star().unwrap()).unwrap();
    TorusElement::<Complex64>::one(theta)
        .add(&profile)
        .unwrap()
}

#[test]
fn subleading_word_lists_match_the_references() {
    let t0 = Instant::now();
    let (_, _, b2) = parametrix().unwrap();
    let even = b2.even_part();
    let plain = even.spin_plain_part();
    let chiral = even.spin_chiral_part();
    let plain_ref = goldens::b2_even_plain().unwrap();
    let chiral_ref = goldens::b2_even_chiral().unwrap();
    assert!(
        plain.sub(&plain_ref).is_zero(),
        "spin-scalar word list deviates from the reference"
    );
    assert!(
        chiral.sub(&chiral_ref).is_zero(),
        "chiral word list deviates from the reference"
    );
    let elapsed = t0.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "word-list check took {:.2?}, limit 10s",
        elapsed
    );
    println!(
        "PASS: word lists match the references exactly ({} + {} words, {:.2?})",
        plain.len(),
        chiral.len(),
        elapsed
    );
}

#[test]
fn curvature_tables_match_under_one_normalization() {
    let t0 = Instant::now();

    let plain = assemble(Channel::Plain).unwrap();
    let (c, checks) = plain
        .verify_against(
            &goldens::curvature_plain().unwrap(),
            &OperandTag::Single(Letter::D11),
        )
        .unwrap();
    assert_eq!(c, Gauss::one(), "spin-scalar normalization is {}", c);
    assert_eq!(checks.len(), 6);
    for (tag, ok) in &checks {
        assert!(*ok, "spin-scalar entry {} deviates from the table", tag);
    }

    let chiral = assemble(Channel::Chiral).unwrap();
    let (c, checks) = chiral
        .verify_against(
            &goldens::curvature_chiral().unwrap(),
            &OperandTag::Single(Letter::D12),
        )
        .unwrap();
    assert_eq!(c, -Gauss::i(), "chiral normalization is {}", c);
    assert_eq!(checks.len(), 3);
    for (tag, ok) in &checks {
        assert!(*ok, "chiral entry {} deviates from the table", tag);
    }

    let elapsed = t0.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "table check took {:.2?}, limit 60s",
        elapsed
    );
    println!(
        "PASS: 6 + 3 curvature functions match the tables exactly under one \
         normalization per channel ({:.2?})",
        elapsed
    );
}

#[test]
fn kernel_identities_hold_exactly() {
    let pkg = assemble(Channel::Plain).unwrap();
    let (h, sector2) = trace_reduce_plain(&pkg).unwrap();
    let reference =
        ModularFunction::parse("(pi/3) * k^-3 * (1-s) / (s * (s+1)^2)").unwrap();
    assert!(h.eq_value(&reference), "kernel is {}", h);
    assert!(sector2.is_zero(), "second sector is {}", sector2);
    assert!(
        kernel_identity_holds(&h).unwrap(),
        "swap identity fails for {}",
        h
    );

    let subs = trace_reduce_chiral(&assemble(Channel::Chiral).unwrap()).unwrap();
    for (i, v) in subs.iter().enumerate() {
        assert!(v.is_zero(), "chiral substitution {} is {}", i, v);
    }
    println!(
        "PASS: H(s) = {} exactly, swap identity and chiral substitutions hold",
        h.pretty_unicode()
    );
}

#[test]
fn classical_limit_reproduces_the_conformal_curvature() {
    let (_, _, b2) = parametrix().unwrap();
    let even = b2.even_part();
    let plain = CPoly::collapse(&even.spin_plain_part()).unwrap();
    let chiral = CPoly::collapse(&even.spin_chiral_part()).unwrap();
    assert_eq!(plain.to_lines().len(), 13, "collapsed term count");
    assert!(plain == goldens::classical_plain().unwrap());
    assert!(chiral == goldens::classical_chiral().unwrap());

    let d11_key = (-2i64, [0u32, 0, 1, 0, 0]);
    let d1sq_key = (-3i64, [2u32, 0, 0, 0, 0]);
    let integral = integrate_momenta(&plain).unwrap();
    assert_eq!(integral.pi_power, 1);
    assert_eq!(integral.terms.len(), 2);
    assert_eq!(integral.terms[&d11_key], Gauss::from_ratio(1, 6));
    assert_eq!(integral.terms[&d1sq_key], Gauss::from_ratio(-1, 3));

    let chiral_integral = integrate_momenta(&chiral).unwrap();
    assert!(chiral_integral.is_zero(), "chiral integral: {}", chiral_integral);

    let r = commutative_scalar_curvature().unwrap();
    assert_eq!(r.pi_power, 0);
    assert_eq!(r.terms.len(), 2);
    assert_eq!(r.terms[&d11_key], Gauss::from_int(2));
    assert_eq!(r.terms[&d1sq_key], Gauss::from_int(-4));
    assert!(has_uniform_weight(&r, -1));
    println!(
        "PASS: 13-term collapse, momentum integral, and scalar curvature {} \
         all match exactly; chiral integral vanishes",
        r
    );
}

#[test]
fn closed_forms_agree_with_quadrature_everywhere() {
    let t0 = Instant::now();
    let mut sampler = Sampler::new(501);
    let shapes = descriptor_shapes().unwrap();
    assert!(!shapes.is_empty());
    let mut worst = 0.0f64;
    for d in &shapes {
        let closed = d.eval_closed_unit().unwrap();
        for _ in 0..20 {
            let s = sampler.range(0.2, 5.0);
            let t = sampler.range(0.2, 5.0);
            let (reference, _) = closed.eval_f64(1.0, s, t);
            let q = descriptor_quadrature(d, s, t, 1e-10).unwrap_or_else(|e| {
                panic!(
                    "quadrature failed on n={:?} m={:?} k1={} k2={} at ({}, {}): {}",
                    d.n, d.m, d.k1, d.k2, s, t, e
                )
            });
            let rel = (reference - q).abs() / reference.abs().max(q.abs()).max(1e-12);
            assert!(
                rel <= 1e-8,
                "descriptor n={:?} m={:?} k1={} k2={} deviates by {:.3e} at ({}, {})",
                d.n,
                d.m,
                d.k1,
                d.k2,
                rel,
                s,
                t
            );
            worst = worst.max(rel);
        }
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed < Duration::from_secs(300),
        "quadrature sweep took {:.2?}, limit 5min",
        elapsed
    );
    println!(
        "PASS: {} descriptor shapes at 20 points each agree with quadrature \
         (worst relative deviation {:.3e}, {:.2?})",
        shapes.len(),
        worst,
        elapsed
    );
}

#[test]
fn rearrangement_identity_holds_on_random_ensembles() {
    let mut sampler = Sampler::new(601);
    let dim = 8;
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let kmat = random_positive_matrix(&mut sampler, dim);
        let frame = ModularFrame::new(&kmat).unwrap();
        let x = random_matrix(&mut sampler, dim);
        let y = random_matrix(&mut sampler, dim);
        let poly = PolyWeight::random(&mut sampler, 4);
        let gap = trace_identity_gap(&poly, &x, &y, &frame);
        assert!(
            gap <= 1e-10,
            "trial {}: trace identity gap {:.3e} exceeds 1e-10",
            trial,
            gap
        );
        worst = worst.max(gap);
    }
    println!(
        "PASS: rearrangement trace identity holds over 100 random trials \
         (worst relative gap {:.3e})",
        worst
    );
}

#[test]
fn dressed_heat_coefficient_vanishes_at_both_angles() {
    let t0 = Instant::now();
    let golden_mean = (5f64.sqrt() - 1.0) / 2.0;
    let tau = std::f64::consts::TAU;
    let mut reports = Vec::new();
    for &theta in &[0.2, golden_mean] {
        // Dressed factor 1 + 0.2(U1 + U1*): |c0| small and shrinking in N.
        let profile = ProfileConfig {
            eps: 0.2,
            ..ProfileConfig::default()
        };
        let k = profile.element(theta).unwrap();
        let mut previous = f64::INFINITY;
        for &n in &[24usize, 32] {
            let basis = GnsBasis::new(n);
            let d = BlockDirac::build(&k, &basis).unwrap();
            let squares = d.squared_eigenvalues();
            let window = (4.0 / (n * n) as f64, 8.0 / (n * n) as f64);
            let fit = fit_heat_window(&squares, window, 40).unwrap();
            assert!(
                fit.c0.abs() <= 0.02,
                "theta = {}: |c0| = {:.3e} at N = {} exceeds 0.02",
                theta,
                fit.c0.abs(),
                n
            );
            assert!(
                fit.c0.abs() < previous,
                "theta = {}: |c0| did not shrink from N = 24 to N = 32 \
                 ({:.3e} -> {:.3e})",
                theta,
                previous,
                fit.c0.abs()
            );
            previous = fit.c0.abs();
            if n == 32 {
                reports.push(format!("theta={}: |c0|={:.2e}", theta, previous));
            }
        }

        // Flat control: the leading coefficient is the area term and the
        // constant term is numerically zero.
        let flat = ProfileConfig::default().element(theta).unwrap();
        let basis = GnsBasis::new(24);
        let d = BlockDirac::build(&flat, &basis).unwrap();
        let fit = fit_heat_window(
            &d.squared_eigenvalues(),
            (4.0 / 576.0, 8.0 / 576.0),
            40,
        )
        .unwrap();
        let area = 1.0 / tau;
        assert!(
            (fit.c_minus1 - area).abs() <= 0.01 * area,
            "theta = {}: flat c_minus1 = {:.6e} is not within 1% of {:.6e}",
            theta,
            fit.c_minus1,
            area
        );
        assert!(
            fit.c0.abs() <= 5e-3,
            "theta = {}: flat |c0| = {:.3e} exceeds 5e-3",
            theta,
            fit.c0.abs()
        );
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed < Duration::from_secs(600),
        "heat runs took {:.2?}, limit 10min",
        elapsed
    );
    println!(
        "PASS: dressed-factor heat fits stay flat and sharpen with N at both \
         angles ({}; flat control within 1%; {:.2?})",
        reports.join(", "),
        elapsed
    );
}

#[test]
fn curvature_trace_vanishes_for_random_factors() {
    let t0 = Instant::now();
    let mut sampler = Sampler::new(801);
    let plain = assemble(Channel::Plain).unwrap();
    let chiral = assemble(Channel::Chiral).unwrap();
    let basis = GnsBasis::new(12);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let theta = sampler.range(0.15, 0.45);
        let k = random_factor(&mut sampler, theta);
        let ev = CurvatureEvaluator::new(&k, &basis).unwrap();

        let (total, largest) = ev.package_trace(&plain);
        assert!(largest > 1e-6, "trial {}: degenerate scale", trial);
        let rel = total.norm() / largest;
        assert!(
            rel <= 1e-8,
            "trial {}: spin-scalar curvature trace {:.3e} relative to its \
             largest entry {:.3e} exceeds 1e-8",
            trial,
            rel,
            largest
        );
        worst = worst.max(rel);

        let (total, largest) = ev.package_trace(&chiral);
        let rel = total.norm() / largest.max(1.0);
        assert!(
            rel <= 1e-8,
            "trial {}: chiral curvature trace {:.3e} exceeds 1e-8",
            trial,
            rel
        );
        worst = worst.max(rel);
    }
    println!(
        "PASS: curvature traces vanish for 10 random factors at N = 12 \
         (worst relative magnitude {:.3e}, {:.2?})",
        worst,
        t0.elapsed()
    );
}

#[test]
fn two_bein_functional_vanishes_and_connection_does_not() {
    // The cancellation is an identity: the one-variable kernel of the
    // two-bein combination is the zero function.
    let (weight, kernel) = functional_kernel(&two_bein_terms()).unwrap();
    assert_eq!(weight, 3);
    assert!(kernel.num.is_zero(), "symbolic kernel must vanish");

    let mut sampler = Sampler::new(901);
    let basis = GnsBasis::new(8);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let theta = sampler.range(0.15, 0.45);
        let k = random_factor(&mut sampler, theta);
        let (value, scale) = evaluate_functional(&two_bein_terms(), &k, &basis).unwrap();
        assert!(scale > 1e-6, "trial {}: degenerate scale", trial);
        assert!(
            value.abs() <= 1e-9,
            "trial {}: two-bein functional {:.3e} exceeds 1e-9 (scale {:.3e})",
            trial,
            value,
            scale
        );
        worst = worst.max(value.abs());
    }

    // The connection-Laplacian combination does not cancel: on the dressed
    // factor it produces a genuinely nonzero value.
    let profile = ProfileConfig {
        eps: 0.2,
        ..ProfileConfig::default()
    };
    let k = profile.element(0.2).unwrap();
    let (value, _) = evaluate_functional(&connection_terms(), &k, &basis).unwrap();
    assert!(
        value.abs() > 1e-4,
        "connection functional is {:.3e}, expected a nonzero value",
        value
    );
    println!(
        "PASS: two-bein functional vanishes on 10 random factors (worst \
         |value| {:.3e}) while the connection functional stays at {:.3e}",
        worst,
        value
    );
}
