use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torsionlab::ddouble::{CField, Cdd};
use torsionlab::exactpoly::ExactPolynomial;
use torsionlab::linalg::{Mat2, Matrix};
use torsionlab::variety::{
    adjoint, adjoint_in_basis, build_qm, compute_variety, killing_gram, reconstruct_representation, variety_points,
    DomainD, ReconstructionRoute, DET_GATE, RESIDUAL_GATE,
};
use torsionlab::rootfind::Precision;
use torsionlab::Manifold;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn eval(q: &ExactPolynomial, z: Complex64) -> Complex64 {
    q.terms().fold(c(0.0, 0.0), |acc, (e, k)| acc + Complex64::powi(&z, e as i32) * k.to_f64().unwrap())
}

/// Distinct roots of Q_M via companion-matrix eigenvalues (independent of the
/// library's root finder), clustered to merge repeated roots.  The variable
/// is shifted first: QR iteration stalls on the ±-symmetric spectra of even
/// polynomials.
fn oracle_roots(m: &Manifold) -> Vec<Complex64> {
    const SHIFT: f64 = 0.1234;
    let k = build_qm(m).unwrap().root_polynomial();
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
    let schur = Schur::try_new(comp, f64::EPSILON, 100_000).expect("QR iteration did not converge");
    let mut out: Vec<Complex64> = Vec::new();
    for z in schur.complex_eigenvalues().iter().map(|z| z + SHIFT) {
        if !out.iter().any(|w| (w - z).norm() < 1e-4) {
            out.push(z);
        }
    }
    out
}

fn oracle_points(m: &Manifold) -> Vec<Complex64> {
    oracle_roots(m)
        .into_iter()
        .filter(|z| (z - 1.0).norm() > 1e-4 && (z + 1.0).norm() > 1e-4)
        .filter(|z| DomainD::contains_with_tol(*z, 1e-4))
        .collect()
}

fn random_sl2(rng: &mut ChaCha8Rng) -> Mat2<Complex64> {
    loop {
        let mut e = || c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let g = Mat2::new(e(), e(), e(), e());
        let d = g.det();
        if d.norm() > 0.1 {
            let s = d.sqrt();
            return Mat2::new(g.m[0][0] / s, g.m[0][1] / s, g.m[1][0] / s, g.m[1][1] / s);
        }
    }
}

fn manifolds() -> Vec<Manifold> {
    let mut v: Vec<Manifold> = (-12..=12).map(Manifold::fig8_p).collect();
    v.extend((-6..=6).filter(|&q| q != 0).map(Manifold::fig8_q));
    v.extend((-4..=4).filter(|&q| q != 0).map(Manifold::five_two_q));
    v
}

#[test]
fn printed_and_normalized_qm() {
    assert_eq!(build_qm(&Manifold::fig8_p(4)).unwrap(), ExactPolynomial::from_terms(&[(2, 1), (4, 2), (6, 1)]));
    assert_eq!(
        build_qm(&Manifold::fig8_p(0)).unwrap().root_polynomial(),
        ExactPolynomial::from_terms(&[(0, -1), (2, 1), (4, 4), (6, 1), (8, -1)])
    );
    let five_two = ExactPolynomial::from_i64s(&[1, -1, -2, -1, -2, 1, 0, 0, 1, -2, -1, -2, -1, 1]);
    assert_eq!(build_qm(&Manifold::five_two_q(1)).unwrap().root_polynomial(), five_two);
}

#[test]
fn point_counts_match_eigenvalue_oracle() {
    for m in manifolds() {
        let pts = variety_points(&m).unwrap();
        let oracle = oracle_points(&m);
        assert_eq!(pts.len(), oracle.len(), "{m:?}");
        for p in &pts {
            assert!(oracle.iter().any(|z| (z - p.a).norm() < 1e-6), "{m:?}: {} not an oracle root", p.a);
        }
    }
}

#[test]
fn spec_point_counts() {
    assert_eq!(variety_points(&Manifold::fig8_p(4)).unwrap().len(), 2);
    let p6 = variety_points(&Manifold::fig8_p(6)).unwrap();
    assert_eq!(p6.len(), 6);
    assert!(p6.iter().all(|p| (p.a.norm() - 1.0).abs() > 1e-6 || p.a.re.abs() > 1e-6));
    assert_eq!(variety_points(&Manifold::fig8_p(5)).unwrap().len(), 4);
    let p0 = variety_points(&Manifold::fig8_p(0)).unwrap();
    let phi = (1.0 - 5f64.sqrt()) / 2.0;
    let mut expect = [c(0.0, -1.0), c(0.0, 1.0), c(phi, 0.0), c(-phi, 0.0)].to_vec();
    for p in &p0 {
        let i = expect.iter().position(|z| (z - p.a).norm() < 1e-12).expect("unexpected p = 0 point");
        expect.remove(i);
    }
    assert!(expect.is_empty());
}

#[test]
fn points_are_roots_in_d_with_reciprocal_closure() {
    for m in manifolds() {
        let v = compute_variety(&m, Precision::Auto).unwrap();
        let k = v.qm.root_polynomial();
        let scale: f64 = k.terms().map(|(_, x)| x.to_f64().unwrap().abs()).sum();
        for p in &v.points {
            assert!(DomainD::contains(p.a), "{m:?}: {}", p.a);
            assert!(eval(&k, p.a).norm() <= 1e-9 * scale, "{m:?}: Q({}) = {}", p.a, eval(&k, p.a));
        }
        // Points ∪ reciprocals exhaust the simple roots away from ±1.
        let simple: Vec<Complex64> = oracle_roots(&m)
            .into_iter()
            .filter(|z| (z - 1.0).norm() > 1e-4 && (z + 1.0).norm() > 1e-4)
            .collect();
        let closure: Vec<Complex64> = v.points.iter().flat_map(|p| [p.a, 1.0 / p.a]).collect();
        let unit_i = v.points.iter().filter(|p| (p.a.norm() - 1.0).abs() < 1e-9 && p.a.re.abs() < 1e-9).count();
        assert_eq!(closure.len() - unit_i, simple.len(), "{m:?}");
        for z in &simple {
            assert!(closure.iter().any(|w| (w - z).norm() < 1e-6), "{m:?}: {z} missing");
        }
    }
}

#[test]
fn ordering_is_by_modulus_then_argument() {
    for m in manifolds() {
        let pts = variety_points(&m).unwrap();
        for w in pts.windows(2) {
            let (x, y) = (w[0].a, w[1].a);
            assert!(x.norm() <= y.norm() + 1e-12, "{m:?}: {x} before {y}");
        }
    }
}

#[test]
fn special_unit_matrices_at_p4() {
    let m = Manifold::fig8_p(4);
    let pts = variety_points(&m).unwrap();
    let plus_i = pts.iter().find(|p| (p.a - c(0.0, 1.0)).norm() < 1e-15).unwrap();
    let rep = reconstruct_representation(plus_i, &m).unwrap();
    assert_eq!(rep.route, ReconstructionRoute::SpecialUnit);
    let x1 = rep.matrices[0].to_c64();
    let s5 = 5f64.sqrt();
    let expected = [[c((-1.0 + s5) / 4.0, 0.0), c(1.0, 0.0)], [c((-5.0 - s5) / 8.0, 0.0), c((-1.0 + s5) / 4.0, 0.0)]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((x1.m[i][j] - expected[i][j]).norm() < 1e-14, "entry ({i},{j}) = {}", x1.m[i][j]);
        }
    }
}

#[test]
fn every_reconstruction_meets_its_invariants() {
    for m in manifolds() {
        for p in variety_points(&m).unwrap() {
            let rep = reconstruct_representation(&p, &m).unwrap();
            assert!(rep.invariant_violations().is_empty(), "{m:?} at {}: {:?}", p.a, rep.invariant_violations());
            assert!(rep.max_residual() <= RESIDUAL_GATE);
            assert!(rep.det_deviation <= DET_GATE);
            if m.is_hyperbolic() {
                assert!(rep.irreducible && (rep.commutator_trace - 2.0).norm() > 1e-8, "{m:?} at {}", p.a);
            }
        }
    }
}

#[test]
fn both_square_root_signs_are_tried_at_p6() {
    let m = Manifold::fig8_p(6);
    let p = variety_points(&m).unwrap()[0];
    let rep = reconstruct_representation(&p, &m).unwrap();
    assert_eq!(rep.route, ReconstructionRoute::ClosedForm);
    let signs: Vec<_> = rep.candidates.iter().filter(|k| k.label.starts_with("eta=")).collect();
    assert_eq!(signs.len(), 2);
    assert_eq!(signs.iter().filter(|k| k.residual <= RESIDUAL_GATE).count(), 1, "{:?}", rep.candidates);
}

#[test]
fn meridian_is_diagonal_off_unit_i() {
    let m = Manifold::fig8_p(7);
    for p in variety_points(&m).unwrap() {
        let rep = reconstruct_representation(&p, &m).unwrap();
        let mer = rep.matrices[2].to_c64();
        assert!(mer.m[0][1].norm() < 1e-14 && mer.m[1][0].norm() < 1e-14);
        assert!((mer.m[0][0] - p.a).norm() < 1e-14 && (mer.m[1][1] - 1.0 / p.a).norm() < 1e-12);
    }
}

#[test]
fn adjoint_preserves_killing_form_and_is_functorial() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAD);
    let k = killing_gram([1.0, 1.0, 1.0]);
    for _ in 0..200 {
        let (g, h) = (random_sl2(&mut rng), random_sl2(&mut rng));
        let a = adjoint(&g);
        let congruence = a.transpose().matmul(&k).matmul(&a).sub(&k).max_abs();
        assert!(congruence < 1e-10 * 8.0 * a.max_abs().powi(2), "‖AᵀKA − K‖ = {congruence:e}");
        let prod = adjoint(&(g * h)).sub(&adjoint(&g).matmul(&adjoint(&h))).max_abs();
        assert!(prod < 1e-10 * a.max_abs() * adjoint(&h).max_abs(), "{prod:e}");
        assert!((a.det() - 1.0).norm() < 1e-10 * a.max_abs().powi(3));
    }
}

#[test]
fn adjoint_examples() {
    assert!(adjoint(&Mat2::<Complex64>::identity()).sub(&Matrix::identity(3)).max_abs() < 1e-15);
    let a = c(0.3, -0.7);
    let ad = adjoint(&Mat2::diag(a, 1.0 / a));
    let (a2, am2) = (a * a, 1.0 / (a * a));
    let expect = [
        [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), (a2 + am2) / 2.0, (a2 - am2) / 2.0],
        [c(0.0, 0.0), (a2 - am2) / 2.0, (a2 + am2) / 2.0],
    ];
    for i in 0..3 {
        for j in 0..3 {
            assert!((ad.get(i, j) - expect[i][j]).norm() < 1e-13, "({i},{j})");
        }
    }
}

#[test]
fn scaled_basis_is_a_similarity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let scales = [0.5, 3.0, -1.25];
    let s = Matrix::from_fn(3, 3, |i, j| if i == j { c(scales[i], 0.0) } else { c(0.0, 0.0) });
    let s_inv = Matrix::from_fn(3, 3, |i, j| if i == j { c(1.0 / scales[i], 0.0) } else { c(0.0, 0.0) });
    for _ in 0..20 {
        let g = random_sl2(&mut rng);
        let scaled = adjoint_in_basis(&g, scales);
        let conj = s_inv.matmul(&adjoint(&g)).matmul(&s);
        assert!(scaled.sub(&conj).max_abs() < 1e-12 * conj.max_abs());
        let k = killing_gram(scales);
        assert!(scaled.transpose().matmul(&k).matmul(&scaled).sub(&k).max_abs() < 1e-9 * k.max_abs() * conj.max_abs().powi(2));
    }
}

#[test]
fn double_double_and_double_agree() {
    let m = Manifold::five_two_q(3);
    let dd = compute_variety(&m, Precision::Double).unwrap();
    let hi = compute_variety(&m, Precision::DoubleDouble).unwrap();
    assert_eq!(dd.points.len(), hi.points.len());
    for (x, y) in dd.points.iter().zip(&hi.points) {
        assert!((x.a - y.a).norm() < 1e-10);
        assert!((Cdd::from_c64(y.a) - y.a_dd).abs() < 1e-15);
    }
}
