use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use torsionlab::exactpoly::{rat, ExactPolynomial};
use torsionlab::torsion::torsion_closed_form;
use torsionlab::variety::{build_qm, variety_points, DomainD};
use torsionlab::verify::{
    all_passed, check_girard_newton, check_lemma_kappa, check_partial_fractions, check_power_sums,
    check_residue_lemma, check_small_p_table, check_vanishing, eight_fold_exact, kappa, partial_fractions_even_p,
    printed_partial_fraction_coeffs, sweep, Provenance, Status, TABLE_TOL, VANISHING_TOL,
};
use torsionlab::{Family, Manifold};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Simple roots of Q_M away from ±1, from companion eigenvalues of the
/// shifted polynomial (QR stalls on ±-symmetric spectra without the shift).
fn eigen_roots(m: &Manifold) -> Vec<Complex64> {
    const SHIFT: f64 = 0.1234;
    let k = build_qm(m).unwrap().root_polynomial().square_free_part();
    let n = k.degree().unwrap();
    let mut cs: Vec<f64> = (0..=n).map(|i| k.coeff(i as i64).to_f64().unwrap()).collect();
    for i in 0..n {
        for j in (i..n).rev() {
            cs[j] += SHIFT * cs[j + 1];
        }
    }
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -cs[i] / cs[n];
    }
    let schur = Schur::try_new(comp, f64::EPSILON, 100_000).unwrap();
    schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z + SHIFT)
        .filter(|z| (z - 1.0).norm() > 1e-4 && (z + 1.0).norm() > 1e-4)
        .collect()
}

#[test]
fn vanishing_examples() {
    for m in [Manifold::fig8_p(6), Manifold::fig8_q(3), Manifold::five_two_q(3)] {
        let r = check_vanishing(&m);
        assert!(r.passed(), "{r}");
        assert!(r.deviation.unwrap() < VANISHING_TOL, "{r}");
        assert_eq!(r.expected, "0");
    }
    let r = check_vanishing(&Manifold::fig8_p(6));
    assert!(r.details.iter().any(|d| d.starts_with("exact Σ over all roots = 0 ")), "{:?}", r.details);
}

#[test]
fn vanishing_matches_an_independent_root_sum() {
    // Σ over the simple roots of 1/τ, with roots from companion eigenvalues.
    for m in [Manifold::fig8_p(7), Manifold::fig8_p(-6), Manifold::fig8_p(8), Manifold::fig8_q(2), Manifold::fig8_q(-3)] {
        let total: Complex64 = eigen_roots(&m)
            .into_iter()
            .filter(|z| (z * z + 1.0).norm() > 1e-6)
            .map(|z| 1.0 / torsion_closed_form(z, &m).unwrap())
            .sum();
        // ±i are each other's reciprocals and both lie in D, so the doubled
        // sum over D counts each of them twice.
        let extra: Complex64 = if m.family == Family::FigureEightP && m.parameter % 4 == 0 {
            [c(0.0, 1.0), c(0.0, -1.0)].iter().map(|&z| 2.0 / torsion_closed_form(z, &m).unwrap()).sum()
        } else {
            c(0.0, 0.0)
        };
        assert!((total + extra).norm() < 1e-6, "{m:?}: {}", total + extra);
        assert!(check_vanishing(&m).passed());
    }
}

#[test]
fn printed_discrepancies_are_findings() {
    let odd = check_vanishing(&Manifold::fig8_p(7));
    assert_eq!(odd.status, Status::Finding, "{odd}");
    let four = check_vanishing(&Manifold::fig8_p(8));
    assert_eq!(four.status, Status::Finding, "{four}");
    assert!(four.details.iter().any(|d| d.contains("64/(20−p²) = -16/11")), "{:?}", four.details);
    let even = check_vanishing(&Manifold::fig8_p(6));
    assert_eq!(even.status, Status::Pass, "{even}");
}

#[test]
fn small_p_table() {
    // (5 ∓ 2√5)/4 at p = ±4: 4/(5−2√5) + 4/(5+2√5) = 40/5.
    let s5 = 5f64.sqrt();
    assert!((4.0 / (5.0 - 2.0 * s5) + 4.0 / (5.0 + 2.0 * s5) - 8.0).abs() < 1e-12);
    for p in -4..=4 {
        let r = check_small_p_table(p);
        assert!(r.passed(), "{r}");
        assert!(r.deviation.unwrap() < TABLE_TOL);
        assert_eq!(r.expected, if p.abs() == 4 { "8" } else { "2" });
    }
    assert!(!check_small_p_table(5).passed());
}

#[test]
fn kappa_examples() {
    let x = |c: &[i64]| ExactPolynomial::from_i64s(c);
    assert_eq!(kappa(7), x(&[1, 2, 1]));
    assert_eq!(kappa(8), x(&[1, 0, 2, 0, 1]));
    assert_eq!(kappa(6), ExactPolynomial::one());
    for m in [Manifold::fig8_p(7), Manifold::fig8_p(8), Manifold::fig8_q(2)] {
        let r = check_lemma_kappa(&m);
        assert_eq!(r.status, Status::Pass, "{r}");
    }
    // Direct exact division for q = 2: (1+x)² divides, (1+x)³ does not.
    let q = build_qm(&Manifold::fig8_q(2)).unwrap().root_polynomial();
    assert!(q.divide_exact(&x(&[1, 2, 1])).is_ok());
    assert!(q.divide_exact(&x(&[1, 3, 3, 1])).is_err());
    let f = check_lemma_kappa(&Manifold::five_two_q(3));
    assert_eq!(f.provenance, Provenance::Derived);
}

#[test]
fn residue_lemma_with_controls() {
    let r = check_residue_lemma(200, 20, 20240101);
    assert_eq!(r.status, Status::Pass, "{r}\n{:?}", r.details);
    assert_eq!(r.computed, "200 zero sums, 20 nonzero controls");
}

#[test]
fn power_sums_are_real() {
    for m in [Manifold::fig8_p(6), Manifold::fig8_p(-7), Manifold::fig8_q(3), Manifold::five_two_q(3)] {
        for n in [-1, 1, 2, 3] {
            let r = check_power_sums(&m, n);
            assert!(r.passed(), "{r}");
        }
    }
}

#[test]
fn eight_fold_sums() {
    // p = 4: 8τ = 10 ∓ 4√5, so 2Σ(8τ)² = 4(100 + 80).
    assert_eq!(eight_fold_exact(4, 2).unwrap(), rat(720));
    for (p, n) in [(6, 2), (6, 3), (-8, 2), (10, 3), (12, 2)] {
        let m = Manifold::fig8_p(p);
        let numeric: Complex64 = variety_points(&m)
            .unwrap()
            .iter()
            .map(|pt| (8.0 * torsion_closed_form(pt.a, &m).unwrap()).powi(n as i32))
            .sum::<Complex64>()
            * 2.0;
        let exact = eight_fold_exact(p, n).unwrap();
        assert!(exact.is_integer(), "p={p} n={n}: {exact}");
        let e = exact.to_f64().unwrap();
        assert!((numeric.re - e).abs() < 1e-9 * e.abs().max(1.0) && numeric.im.abs() < 1e-6, "{numeric} vs {e}");
    }
    assert_eq!(eight_fold_exact(6, 2).unwrap(), rat(9216));
}

#[test]
fn partial_fraction_coefficients() {
    let m = 3;
    let printed = printed_partial_fraction_coeffs(m);
    assert_eq!(printed, [rat(-33), rat(30), rat(-12), rat(-3)]);
    let pf = partial_fractions_even_p(m).unwrap();
    assert_eq!(pf.c, [rat(33), rat(-30), rat(12), rat(-3)]);
    let ell = pf.ell.clone().unwrap();
    assert!(ell.is_integral());
    // As rational functions of y: N(y)/((1−y)³(1+y)) = ℓ(y) + Σ poles.
    let p = 2 * m;
    let n = |y: f64| {
        (4 - p) as f64 + (p - 2) as f64 * y + (2 * p) as f64 * y * y + (2 + p) as f64 * y.powi(3)
            - (4 + p) as f64 * y.powi(4)
            + (2 * p) as f64 * y.powi(2 + m as i32)
    };
    let cs: Vec<f64> = pf.c.iter().map(|r: &BigRational| r.to_f64().unwrap()).collect();
    for y in [-3.7, -0.4, 0.3, 2.5, 11.0] {
        let lhs = n(y) / ((1.0 - y).powi(3) * (1.0 + y));
        let ell_y: f64 = ell.terms().map(|(e, k)| k.to_f64().unwrap() * y.powi(e as i32)).sum();
        let u = 1.0 - y;
        let rhs = ell_y + cs[0] / u + cs[1] / (u * u) + cs[2] / (u * u * u) + cs[3] / (1.0 + y);
        assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0), "y={y}: {lhs} vs {rhs}");
    }
    for m in [-5, -4, -3, 3, 4, 5] {
        let r = check_partial_fractions(m);
        assert_eq!(r.status, Status::Finding, "{r}");
    }
}

#[test]
fn girard_newton_agrees() {
    for m in [Manifold::fig8_p(9), Manifold::fig8_q(2), Manifold::five_two_q(2)] {
        let r = check_girard_newton(&m, 12);
        assert_eq!(r.status, Status::Pass, "{r}");
    }
}

#[test]
fn sweep_keeps_order_and_reports_carry_both_sides() {
    let ms: Vec<Manifold> = (5..=9).map(Manifold::fig8_p).collect();
    let rs = sweep(&ms, check_vanishing);
    assert!(all_passed(&rs));
    for (m, r) in ms.iter().zip(&rs) {
        assert_eq!(r.parameters, format!("p={}", m.parameter));
        assert!(!r.computed.is_empty() && !r.expected.is_empty());
        let line = r.to_string();
        assert!(line.contains("computed=") && line.contains("expected="), "{line}");
    }
    let v = serde_json::to_value(&rs[0]).unwrap();
    for key in ["claim", "family", "parameters", "computed", "expected", "provenance", "tolerance", "status", "method"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn domain_points_only_in_numeric_sum() {
    // The numeric vanishing sum runs over D; points and their reciprocals
    // together give twice that sum.
    let m = Manifold::fig8_p(9);
    let pts = variety_points(&m).unwrap();
    assert!(pts.iter().all(|p| DomainD::contains(p.a)));
    let half: Complex64 = pts.iter().map(|p| 1.0 / torsion_closed_form(p.a, &m).unwrap()).sum();
    let other: Complex64 = pts.iter().map(|p| 1.0 / torsion_closed_form(1.0 / p.a, &m).unwrap()).sum();
    assert!((half - other).norm() < 1e-8);
}
