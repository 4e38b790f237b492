use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torsionlab::ddouble::{CField, Cdd};
use torsionlab::linalg::Mat2;
use torsionlab::presentation::{build_presentation, symbolic_differentials};
use torsionlab::rootfind::Precision;
use torsionlab::torsion::{
    torsion_chain_complex, torsion_chain_complex_with, torsion_closed_form, torsion_inverse_rational, torsion_table,
    write_csv, ChainOptions, Method, SubsetChoice, CHAIN_GATE, CROSS_CHECK_TOL,
};
use torsionlab::variety::{reconstruct_representation, variety_points};
use torsionlab::{Family, Manifold, TorsionError};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

fn random_sl2(rng: &mut ChaCha8Rng) -> Mat2<Cdd> {
    loop {
        let mut e = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let g = Mat2::new(e(), e(), e(), e());
        let d = g.det();
        if d.norm() > 0.2 {
            let s = d.sqrt();
            let g = Mat2::new(g.m[0][0] / s, g.m[0][1] / s, g.m[1][0] / s, g.m[1][1] / s);
            return Mat2::from_c64(&g);
        }
    }
}

fn expected_ratio(f: Family) -> f64 {
    match f {
        Family::FigureEightP => 1.0,
        Family::FigureEightQ | Family::FiveTwoQ => -1.0,
    }
}

#[test]
fn unit_i_values_at_p4() {
    let m = Manifold::fig8_p(4);
    let s5 = 5f64.sqrt();
    let plus = torsion_closed_form(c(0.0, 1.0), &m).unwrap();
    let minus = torsion_closed_form(c(0.0, -1.0), &m).unwrap();
    assert!((plus - c((5.0 - 2.0 * s5) / 4.0, 0.0)).norm() < 1e-14, "{plus}");
    assert!((minus - c((5.0 + 2.0 * s5) / 4.0, 0.0)).norm() < 1e-14, "{minus}");
}

#[test]
fn p0_values() {
    let m = Manifold::fig8_p(0);
    let mut got: Vec<f64> = variety_points(&m)
        .unwrap()
        .iter()
        .map(|p| {
            let t = torsion_closed_form(p.a, &m).unwrap();
            assert!(t.im.abs() < 1e-12, "{t}");
            t.re
        })
        .collect();
    got.sort_by(f64::total_cmp);
    for (g, e) in got.iter().zip([1.25, 1.25, 5.0, 5.0]) {
        assert!((g - e).abs() < 1e-12, "{got:?}");
    }
}

#[test]
fn unit_i_outside_the_variety_is_a_branch_error() {
    assert!(matches!(torsion_closed_form(c(0.0, 1.0), &Manifold::fig8_p(5)), Err(TorsionError::BranchDomain(_))));
    assert!(matches!(torsion_closed_form(c(0.0, -1.0), &Manifold::fig8_p(6)), Err(TorsionError::BranchDomain(_))));
}

#[test]
fn reciprocal_and_conjugate_symmetry() {
    let ms = [
        Manifold::fig8_p(5),
        Manifold::fig8_p(6),
        Manifold::fig8_p(-9),
        Manifold::fig8_p(12),
        Manifold::fig8_q(2),
        Manifold::fig8_q(-3),
        Manifold::five_two_q(3),
        Manifold::five_two_q(-4),
    ];
    for m in ms {
        for p in variety_points(&m).unwrap() {
            if (p.a * p.a + 1.0).norm() < 1e-9 {
                continue;
            }
            let t = torsion_closed_form(p.a, &m).unwrap();
            let t_inv = torsion_closed_form(1.0 / p.a, &m).unwrap();
            assert!(rel(t, t_inv) < 1e-8, "{m:?} at {}: {t} vs {t_inv}", p.a);
            let t_bar = torsion_closed_form(p.a.conj(), &m).unwrap();
            assert!(rel(t.conj(), t_bar) < 1e-8, "{m:?} at {}: {t} vs {t_bar}", p.a);
        }
    }
}

#[test]
fn inverse_rational_form_matches_closed_form() {
    for m in [Manifold::fig8_p(5), Manifold::fig8_p(-7), Manifold::fig8_q(2), Manifold::fig8_q(-5), Manifold::five_two_q(3)]
    {
        for p in variety_points(&m).unwrap() {
            let inv = torsion_inverse_rational(p.a, &m).unwrap();
            let cf = torsion_closed_form(p.a, &m).unwrap();
            assert!(rel(inv, 1.0 / cf) < 1e-9, "{m:?} at {}: {inv} vs {}", p.a, 1.0 / cf);
        }
    }
}

#[test]
fn inverse_rational_rejects_a_repeated_root() {
    // −1 is a double root of Q_M for odd p.
    let r = torsion_inverse_rational(c(-1.0, 0.0), &Manifold::fig8_p(5));
    assert!(matches!(r, Err(TorsionError::DerivativeVanishes)), "{r:?}");
}

#[test]
fn cross_check_with_constant_sign() {
    for m in [Manifold::fig8_p(6), Manifold::fig8_p(-5), Manifold::fig8_q(2), Manifold::five_two_q(3)] {
        let recs = torsion_table(&m, Method::Both, Precision::Auto).unwrap();
        assert!(!recs.is_empty());
        for r in &recs {
            assert!(r.modulus_mismatch().unwrap() < CROSS_CHECK_TOL, "{m:?}: {r:?}");
            let ratio = r.ratio.unwrap();
            assert!((ratio - expected_ratio(m.family)).norm() < CROSS_CHECK_TOL, "{m:?} at {}: ratio {ratio}", r.a);
        }
    }
}

#[test]
fn chain_condition_for_every_family_up_to_eight() {
    let mut ms: Vec<Manifold> = (-8..=8).filter(|&p: &i64| p.abs() >= 5).map(Manifold::fig8_p).collect();
    ms.extend((-8..=8).filter(|&q| q != 0).map(Manifold::fig8_q));
    ms.extend((-8..=8).filter(|&q| q != 0 && q != 1).map(Manifold::five_two_q));
    for m in ms {
        let recs = torsion_table(&m, Method::ChainComplex, Precision::Auto).unwrap();
        for r in recs {
            let norm = r.chain_norm.unwrap_or_else(|| panic!("{m:?} at {}: {:?}", r.a, r.notes));
            assert!(norm < CHAIN_GATE, "{m:?} at {}: ‖δδ‖ = {norm:e}", r.a);
        }
    }
}

#[test]
fn invariance_under_subsets_conjugation_and_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7A0);
    for m in [Manifold::fig8_p(7), Manifold::fig8_q(-2), Manifold::five_two_q(3)] {
        let pres = build_presentation(&m).unwrap();
        let diffs = symbolic_differentials(&pres);
        for p in variety_points(&m).unwrap() {
            let rep = reconstruct_representation(&p, &m).unwrap();
            let base = torsion_chain_complex(&rep).unwrap().value;
            for seed in 0..4 {
                let opts = ChainOptions { subsets: SubsetChoice::Random(seed), ..ChainOptions::default() };
                let t = torsion_chain_complex_with(&rep, &diffs, &opts).unwrap().value;
                assert!(rel(t, base) < 1e-8, "{m:?} subsets {seed}: {t} vs {base}");
            }
            for _ in 0..3 {
                let conj = rep.conjugated(&random_sl2(&mut rng));
                let t = torsion_chain_complex_with(&conj, &diffs, &ChainOptions::default()).unwrap().value;
                assert!(rel(t, base) < 1e-8, "{m:?} conjugated: {t} vs {base}");
            }
            for scales in [[2.0, 0.5, 3.0], [-1.0, 0.25, 1.5]] {
                let opts = ChainOptions { basis_scales: scales, ..ChainOptions::default() };
                let t = torsion_chain_complex_with(&rep, &diffs, &opts).unwrap().value;
                assert!(rel(t, base) < 1e-9, "{m:?} scales {scales:?}: {t} vs {base}");
            }
        }
    }
}

#[test]
fn non_representation_violates_the_chain_condition() {
    let m = Manifold::fig8_p(6);
    let p = variety_points(&m).unwrap()[0];
    let mut rep = reconstruct_representation(&p, &m).unwrap();
    rep.matrices[0].m[0][1] = rep.matrices[0].m[0][1] + Cdd::from_c64(c(1e-3, 0.0));
    // Stored residuals are stale, so only the chain gate can catch this.
    let r = torsion_chain_complex(&rep);
    assert!(matches!(r, Err(TorsionError::ChainConditionViolated { .. })), "{r:?}");
}

#[test]
fn csv_has_fixed_columns() {
    let recs = torsion_table(&Manifold::fig8_p(4), Method::Both, Precision::Auto).unwrap();
    let mut buf = Vec::new();
    write_csv(&recs, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "family,parameter,re_a,im_a,re_tau_cf,im_tau_cf,re_tau_cc,im_tau_cc,ratio,residual"
    );
    assert_eq!(lines.count(), 2);
}
