//! Character-variety side: the polynomial Q_M, its roots in the domain D, the
//! SL₂(ℂ) representation attached to each root, and the adjoint action.

use crate::ddouble::{CField, Cdd};
use crate::error::{Result, TorsionError};
use crate::exactpoly::ExactPolynomial;
use crate::family::{Family, Manifold};
use crate::linalg::{Mat2, Matrix};
use crate::presentation::{self, GroupWord, MERIDIAN, X1, X2};
use crate::rootfind::{self, Precision, ReciprocalPairing, RootSet};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

/// Relator residual accepted for a representation.
pub const RESIDUAL_GATE: f64 = 1e-9;
/// Allowed deviation of det φ(x_i) from 1.
pub const DET_GATE: f64 = 1e-10;
/// Commutator-trace distance from 2 below which a representation is reducible.
pub const IRREDUCIBLE_GATE: f64 = 1e-8;
/// Tolerance for membership of the unit circle and the point −i.
pub const DOMAIN_TOL: f64 = 1e-9;
/// Number of deterministic seeds of the Newton fallback.
pub const NEWTON_SEEDS: usize = 16;

/// The printed polynomial Q_M, Laurent-normalized.
pub fn build_qm(m: &Manifold) -> Result<ExactPolynomial> {
    m.validate()?;
    let n = m.parameter;
    let terms: Vec<(i64, i64)> = match m.family {
        Family::FigureEightP => vec![
            (0, 1),
            (n - 4, -1),
            (n - 2, 1),
            (n, 2),
            (n + 2, 1),
            (n + 4, -1),
            (2 * n, 1),
        ],
        Family::FigureEightQ => vec![
            (0, 1),
            (2 * n, -1),
            (4 * n - 1, -1),
            (4 * n, -2),
            (4 * n + 1, -1),
            (6 * n, -1),
            (8 * n, 1),
        ],
        Family::FiveTwoQ => vec![
            (0, 1),
            (1, -1),
            (2 * n, -2),
            (4 * n - 1, -1),
            (4 * n, -2),
            (6 * n - 1, 1),
            (8 * n, 1),
            (10 * n - 1, -2),
            (10 * n, -1),
            (12 * n - 1, -2),
            (14 * n - 2, -1),
            (14 * n - 1, 1),
        ],
    };
    Ok(ExactPolynomial::from_terms(&terms))
}

/// The domain D = {|a| < 1} ∪ {|a| = 1, Im a > 0} ∪ {−i}.
#[derive(Clone, Copy, Debug, Default)]
pub struct DomainD;

impl DomainD {
    pub fn contains(a: Complex64) -> bool {
        Self::contains_with_tol(a, DOMAIN_TOL)
    }

    pub fn contains_with_tol(a: Complex64, tol: f64) -> bool {
        let r = a.norm();
        if (a - Complex64::new(0.0, -1.0)).norm() <= tol {
            return true;
        }
        if (r - 1.0).abs() <= tol {
            return a.im > tol;
        }
        r < 1.0
    }
}

/// A point of Q_M⁻¹(0) ∩ D.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarietyPoint {
    pub a: Complex64,
    /// The same root to double-double accuracy.
    pub a_dd: Cdd,
}

impl Serialize for VarietyPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a.re, self.a.im].serialize(s)
    }
}

/// Everything computed on the way from Q_M to the variety points.
#[derive(Clone, Debug, Serialize)]
pub struct Variety {
    pub manifold: Manifold,
    pub qm: ExactPolynomial,
    /// Degree of the root polynomial of Q_M.
    pub degree: usize,
    /// All roots of Q_M with multiplicities.
    pub roots: RootSet,
    /// Exact factors split off before numeric root finding (x−1, x+1, x²+1).
    pub split_factors: Vec<ExactPolynomial>,
    /// Reciprocal pairing of the remaining simple roots.
    pub pairing: ReciprocalPairing,
    pub points: Vec<VarietyPoint>,
}

fn unit_i(sign: f64) -> VarietyPoint {
    VarietyPoint { a: Complex64::new(0.0, sign), a_dd: Cdd::from_parts(0.0, sign) }
}

/// Q_M, its roots, and the points of D, at the requested precision.
pub fn compute_variety(m: &Manifold, precision: Precision) -> Result<Variety> {
    let qm = build_qm(m)?;
    let root_poly = qm.root_polynomial();
    let degree = root_poly.degree().unwrap_or(0);
    let roots = rootfind::find_roots_with(&root_poly, precision)?;

    let mut rest = root_poly.square_free_part();
    let mut split = Vec::new();
    let mut points = Vec::new();
    for f in [
        ExactPolynomial::from_terms(&[(0, -1), (1, 1)]),
        ExactPolynomial::from_terms(&[(0, 1), (1, 1)]),
        ExactPolynomial::from_terms(&[(0, 1), (2, 1)]),
    ] {
        if f.divides(&rest) {
            rest = rest.divide_exact(&f)?;
            if f.degree() == Some(2) {
                points.push(unit_i(-1.0));
                points.push(unit_i(1.0));
            }
            split.push(f);
        }
    }

    let pairing = if rest.degree().unwrap_or(0) > 0 {
        let simple = rootfind::find_roots_with(&rest, precision)?;
        let pairing = rootfind::pair_reciprocal_roots(&simple)?;
        if !pairing.self_paired.is_empty() {
            return Err(TorsionError::PairingFailure { unmatched: pairing.self_paired.len() });
        }
        for &(i, j) in &pairing.pairs {
            let (ri, rj) = (&simple.roots[i], &simple.roots[j]);
            let pick = if (ri.value.norm() - 1.0).abs() <= DOMAIN_TOL {
                if ri.value.im > 0.0 { ri } else { rj }
            } else {
                ri
            };
            points.push(VarietyPoint { a: pick.value, a_dd: pick.value_dd });
        }
        pairing
    } else {
        ReciprocalPairing { pairs: Vec::new(), self_paired: Vec::new() }
    };

    if let Some(p) = points.iter().find(|p| !DomainD::contains(p.a)) {
        return Err(TorsionError::BranchDomain(format!("selected root {} lies outside D", p.a)));
    }
    points.sort_by(|x, y| rootfind::root_order(x.a, y.a));
    Ok(Variety { manifold: *m, qm, degree, roots, split_factors: split, pairing, points })
}

/// The distinct roots of Q_M in D, ordered by (|a|, arg a).
pub fn variety_points(m: &Manifold) -> Result<Vec<VarietyPoint>> {
    compute_variety(m, Precision::Auto).map(|v| v.points)
}

/// How a representation was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconstructionRoute {
    /// Closed-form entries of φ(x₁) with a chosen square-root sign.
    ClosedForm,
    /// Explicit matrices at φ(𝔪) = diag(±i, ∓i).
    SpecialUnit,
    /// Trace of φ(x₁) from the cubic relation, then linear back-substitution.
    Cubic,
    /// Damped Newton from a deterministic seed.
    Newton { seed: usize },
}

/// A candidate that was tried and its worst relator residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub label: String,
    pub residual: f64,
}

/// An SL₂(ℂ) representation attached to a variety point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Representation {
    pub manifold: Manifold,
    #[serde(serialize_with = "ser_c64")]
    pub a: Complex64,
    #[serde(skip)]
    pub a_dd: Cdd,
    /// φ(x_i) for every generator, in generator order.
    pub matrices: Vec<Mat2<Cdd>>,
    /// Square-root sign of the closed-form entries, where used.
    pub eta: Option<i8>,
    pub route: ReconstructionRoute,
    /// ‖φ(r_i) − I‖_max per relator.
    pub relator_residuals: Vec<f64>,
    /// max_i |det φ(x_i) − 1|.
    pub det_deviation: f64,
    /// Distance of a from the nearest eigenvalue of the coordinate element
    /// (φ(𝔪) for p/1, the longitude word for 1/q).
    pub eigen_deviation: f64,
    #[serde(serialize_with = "ser_c64")]
    pub commutator_trace: Complex64,
    pub irreducible: bool,
    pub candidates: Vec<Candidate>,
}

fn ser_c64<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Evaluate a word in the generators.
pub fn eval_word<F: CField>(w: &GroupWord, mats: &[Mat2<F>], invs: &[Mat2<F>]) -> Mat2<F> {
    w.letters().iter().fold(Mat2::identity(), |acc, l| {
        acc * if l.exp == 1 { mats[l.gen] } else { invs[l.gen] }
    })
}

impl Representation {
    pub fn max_residual(&self) -> f64 {
        self.relator_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn inverses(&self) -> Vec<Mat2<Cdd>> {
        self.matrices.iter().map(|m| m.inverse()).collect()
    }

    pub fn eval(&self, w: &GroupWord) -> Mat2<Cdd> {
        eval_word(w, &self.matrices, &self.inverses())
    }

    /// Conjugate every generator image by `g`: φ ↦ g φ g⁻¹.
    pub fn conjugated(&self, g: &Mat2<Cdd>) -> Representation {
        let gi = g.inverse();
        let mut r = self.clone();
        r.matrices = self.matrices.iter().map(|m| *g * *m * gi).collect();
        r.refresh_diagnostics();
        r
    }

    /// Recompute residuals and invariants from the current matrices.
    pub fn refresh_diagnostics(&mut self) {
        let d = diagnostics(&self.manifold, &self.matrices, self.a_dd);
        self.relator_residuals = d.residuals;
        self.det_deviation = d.det_deviation;
        self.eigen_deviation = d.eigen_deviation;
        self.commutator_trace = d.commutator_trace;
        self.irreducible = d.irreducible;
    }

    /// Every invariant violation, as text (empty when valid).  Reducibility
    /// is reported separately through [`Representation::irreducible`].
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.det_deviation > DET_GATE {
            v.push(format!("det deviation {:.3e} > {DET_GATE:e}", self.det_deviation));
        }
        if self.max_residual() > RESIDUAL_GATE {
            v.push(format!("relator residual {:.3e} > {RESIDUAL_GATE:e}", self.max_residual()));
        }
        if self.eigen_deviation > 1e-8 {
            v.push(format!("eigenvalue deviation {:.3e}", self.eigen_deviation));
        }
        v
    }
}

struct Diagnostics {
    residuals: Vec<f64>,
    det_deviation: f64,
    eigen_deviation: f64,
    commutator_trace: Complex64,
    irreducible: bool,
}

fn eigen_distance(m: &Mat2<Cdd>, target: Cdd) -> f64 {
    let t = m.trace();
    let disc = (t * t - Cdd::from_i64(4)).sqrt();
    let half = Cdd::from_parts(0.5, 0.0);
    let l1 = (t + disc) * half;
    let l2 = (t - disc) * half;
    (l1 - target).abs().min((l2 - target).abs())
}

fn diagnostics(m: &Manifold, mats: &[Mat2<Cdd>], a: Cdd) -> Diagnostics {
    let invs: Vec<Mat2<Cdd>> = mats.iter().map(|x| x.inverse()).collect();
    let id = Mat2::identity();
    let residuals = presentation::relators(m)
        .expect("validated manifold")
        .iter()
        .map(|r| eval_word(r, mats, &invs).max_abs_diff(&id))
        .collect();
    let det_deviation = mats.iter().map(|x| (x.det() - Cdd::one()).abs()).fold(0.0, f64::max);
    let coord = match m.family {
        Family::FigureEightP => mats[MERIDIAN],
        _ => eval_word(&presentation::longitude_word(m.family), mats, &invs),
    };
    let eigen_deviation = eigen_distance(&coord, a);
    let c = mats[X1] * mats[MERIDIAN] * invs[X1] * invs[MERIDIAN];
    let commutator_trace = c.trace().to_c64();
    let irreducible = (commutator_trace - Complex64::new(2.0, 0.0)).norm() > IRREDUCIBLE_GATE;
    Diagnostics { residuals, det_deviation, eigen_deviation, commutator_trace, irreducible }
}

fn c(n: i64) -> Cdd {
    Cdd::from_i64(n)
}

/// φ(x₁) from the closed-form entries at meridian eigenvalue M.
fn closed_form_x1(mm: Cdd, eta: i8) -> Mat2<Cdd> {
    let m2 = mm * mm;
    let m4 = m2 * m2;
    let m6 = m4 * m2;
    let m8 = m4 * m4;
    let disc = c(1) - c(2) * m2 - m4 - c(2) * m6 + m8;
    let s = disc.sqrt() * c(eta as i64);
    let x = (c(1) + m2 - m4 + s) / (c(2) * (c(1) - m2));
    let d = m2 - c(1);
    let z = -(c(1) - c(3) * m2 + m4 + s) / (c(2) * d * d);
    let w = (c(-1) + m2 + m4 + s) / (c(2) * m2 * d);
    Mat2::new(x, Cdd::one(), z, w)
}

/// φ(x₁) at φ(𝔪) = diag(εi, −εi).
fn special_x1(eps: i8) -> Mat2<Cdd> {
    let s5 = Cdd::from_i64(5).sqrt() * c(eps as i64);
    let d = (c(-1) + s5) / c(4);
    Mat2::new(d, Cdd::one(), (c(-5) - s5) / c(8), d)
}

/// Complete φ(x₁), φ(𝔪) to all generators of a figure-eight family.
fn fig8_generators(m: &Manifold, x1: Mat2<Cdd>, mm: Mat2<Cdd>) -> Vec<Mat2<Cdd>> {
    // r1 = 𝔪 x1 x2 𝔪⁻¹ x1⁻¹ gives x2 = x1⁻¹ 𝔪⁻¹ x1 𝔪.
    let x2 = x1.inverse() * mm.inverse() * x1 * mm;
    let mut mats = vec![x1, x2, mm];
    if m.family == Family::FigureEightQ {
        mats.push(x1 * x2 * x1.inverse() * x2.inverse());
    }
    mats
}

fn build_rep(
    m: &Manifold,
    p: &VarietyPoint,
    mats: Vec<Mat2<Cdd>>,
    eta: Option<i8>,
    route: ReconstructionRoute,
    candidates: Vec<Candidate>,
) -> Representation {
    let d = diagnostics(m, &mats, p.a_dd);
    Representation {
        manifold: *m,
        a: p.a,
        a_dd: p.a_dd,
        matrices: mats,
        eta,
        route,
        relator_residuals: d.residuals,
        det_deviation: d.det_deviation,
        eigen_deviation: d.eigen_deviation,
        commutator_trace: d.commutator_trace,
        irreducible: d.irreducible,
        candidates,
    }
}

fn worst(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
}

fn reconstruct_fig8(m: &Manifold, p: &VarietyPoint) -> Result<Representation> {
    let a = p.a_dd;
    let big_m = match m.family {
        Family::FigureEightP => a,
        _ => a.powi(-m.parameter),
    };
    let mm = Mat2::diag(big_m, Cdd::one() / big_m);
    if m.family == Family::FigureEightP && (big_m * big_m + Cdd::one()).abs() < DOMAIN_TOL {
        let eps: i8 = if big_m.to_c64().im > 0.0 { 1 } else { -1 };
        let mats = fig8_generators(m, special_x1(eps), mm);
        let rep = build_rep(m, p, mats, None, ReconstructionRoute::SpecialUnit, Vec::new());
        let r = rep.max_residual();
        if r > RESIDUAL_GATE {
            return Err(TorsionError::NoValidSign { best_residual: r });
        }
        return Ok(rep);
    }
    let mut best: Option<Representation> = None;
    let mut cands = Vec::new();
    for eta in [1i8, -1] {
        let mats = fig8_generators(m, closed_form_x1(big_m, eta), mm);
        let rep = build_rep(m, p, mats, Some(eta), ReconstructionRoute::ClosedForm, Vec::new());
        let r = worst(&rep.relator_residuals);
        cands.push(Candidate { label: format!("eta={eta:+}"), residual: r });
        if r <= RESIDUAL_GATE && best.as_ref().map_or(true, |b| r < b.max_residual()) {
            best = Some(rep);
        }
    }
    match best {
        Some(mut rep) => {
            rep.candidates = cands;
            Ok(rep)
        }
        None => Err(TorsionError::NoValidSign {
            best_residual: cands.iter().map(|c| c.residual).fold(f64::INFINITY, f64::min),
        }),
    }
}

/// 5₂ generators from the normalized φ(x₁) = [[x, 1], [xw − 1, w]].
fn five_two_generators<F: CField>(x: F, w: F, big_m: F) -> Vec<Mat2<F>> {
    let x1 = Mat2::new(x, F::one(), x * w - F::one(), w);
    let mm = Mat2::diag(big_m, F::one() / big_m);
    let x1s = x1 * x1;
    // r1 = 𝔪 x1² x2⁻¹ 𝔪⁻¹ x1⁻² gives x2 = 𝔪⁻¹ x1⁻² 𝔪 x1².
    let x2 = mm.inverse() * x1s.inverse() * mm * x1s;
    let l = x1s * x2.inverse() * x1s.inverse() * x2;
    vec![x1, x2, mm, l]
}

/// Residual vector of the Newton fallback: r2 − I entries and the
/// longitude constraint ℓ = diag(1/a, a) (off-diagonals and ℓ₀₀).
fn five_two_newton_residual(u: [Complex64; 2], big_m: Complex64, a: Complex64) -> [Complex64; 7] {
    let g = five_two_generators(u[0], u[1], big_m);
    let (x1, x2, mm, l) = (g[0], g[1], g[2], g[3]);
    let r2 = mm * x2.inverse() * mm.inverse() * x1.inverse() * x2;
    [
        r2.m[0][0] - 1.0,
        r2.m[0][1],
        r2.m[1][0],
        r2.m[1][1] - 1.0,
        l.m[0][0] - 1.0 / a,
        l.m[0][1],
        l.m[1][0],
    ]
}

fn norm7(f: &[Complex64; 7]) -> f64 {
    f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Levenberg–Marquardt from one seed; returns the final (x, w).
fn five_two_newton(seed: usize, big_m: Complex64, a: Complex64) -> [Complex64; 2] {
    let r = [0.3, 0.7, 1.2, 2.0, 3.5, 6.0][seed % 6];
    let th = 2.0 * std::f64::consts::PI * ((seed as f64 * 0.618_033) % 1.0);
    let mut u = [Complex64::from_polar(r, th), Complex64::from_polar(r, 2.3 * th + 1.0)];
    let mut lam = 1e-3;
    for _ in 0..200 {
        let f = five_two_newton_residual(u, big_m, a);
        let mut jac = [[Complex64::new(0.0, 0.0); 2]; 7];
        for j in 0..2 {
            let h = 1e-7 * u[j].norm().max(1.0);
            let mut du = u;
            du[j] += h;
            let fj = five_two_newton_residual(du, big_m, a);
            for k in 0..7 {
                jac[k][j] = (fj[k] - f[k]) / h;
            }
        }
        // Normal equations (JᴴJ + λ diag) δ = −Jᴴf.
        let mut a_ = [[Complex64::new(0.0, 0.0); 2]; 2];
        let mut g = [Complex64::new(0.0, 0.0); 2];
        for k in 0..7 {
            for i in 0..2 {
                g[i] += jac[k][i].conj() * f[k];
                for j in 0..2 {
                    a_[i][j] += jac[k][i].conj() * jac[k][j];
                }
            }
        }
        for (i, row) in a_.iter_mut().enumerate() {
            row[i] += lam * (row[i].re + 1e-300);
        }
        let det = a_[0][0] * a_[1][1] - a_[0][1] * a_[1][0];
        let step = [
            -(a_[1][1] * g[0] - a_[0][1] * g[1]) / det,
            -(a_[0][0] * g[1] - a_[1][0] * g[0]) / det,
        ];
        let trial = [u[0] + step[0], u[1] + step[1]];
        let fn_ = five_two_newton_residual(trial, big_m, a);
        if norm7(&fn_).is_finite() && norm7(&fn_) < norm7(&f) {
            u = trial;
            lam = (lam / 10.0).max(1e-12);
        } else {
            lam *= 10.0;
        }
        if norm7(&fn_) < 1e-14 || lam > 1e10 {
            break;
        }
    }
    u
}

fn reconstruct_five_two(m: &Manifold, p: &VarietyPoint) -> Result<Representation> {
    let a = p.a_dd;
    let big_m = a.powi(m.parameter);
    let m2 = big_m * big_m;
    let m4 = m2 * m2;
    let cubic = [-m2, m4 + Cdd::one(), -(m4 + m2 + Cdd::one()), m2];
    let inv_a = Cdd::one() / a;
    let mut cands = Vec::new();
    let mut best: Option<Representation> = None;
    for (k, s) in rootfind::complex_roots(&cubic)?.into_iter().enumerate() {
        let s2 = s * s;
        let s3 = s2 * s;
        let num = m4 * s2 - m2 * s3 - m2 * s2 + m2 * s + m2 + s3 - s;
        let den = s * (m4 - m2 * s - m2 + s);
        let x = num / den;
        let mats = five_two_generators(x, s - x, big_m);
        let ell_dev = (mats[3].m[0][0] - inv_a).abs();
        let rep = build_rep(m, p, mats, None, ReconstructionRoute::Cubic, Vec::new());
        let r = worst(&rep.relator_residuals).max(if ell_dev < 1e-7 { 0.0 } else { f64::INFINITY });
        cands.push(Candidate { label: format!("cubic root {k}"), residual: r });
        if r <= RESIDUAL_GATE && best.as_ref().map_or(true, |b| r < b.max_residual()) {
            best = Some(rep);
        }
    }
    if best.is_none() {
        let (mc, ac) = (big_m.to_c64(), p.a);
        for seed in 0..NEWTON_SEEDS {
            let u = five_two_newton(seed, mc, ac);
            let mats = five_two_generators(Cdd::from_c64(u[0]), Cdd::from_c64(u[1]), big_m);
            let ell_dev = (mats[3].m[0][0] - inv_a).abs();
            let rep = build_rep(m, p, mats, None, ReconstructionRoute::Newton { seed }, Vec::new());
            let r = worst(&rep.relator_residuals).max(if ell_dev < 1e-7 { 0.0 } else { f64::INFINITY });
            cands.push(Candidate { label: format!("newton seed {seed}"), residual: r });
            if r <= RESIDUAL_GATE {
                best = Some(rep);
                break;
            }
        }
    }
    match best {
        Some(mut rep) => {
            rep.candidates = cands;
            Ok(rep)
        }
        None => Err(TorsionError::NewtonDivergence {
            best_residual: cands.iter().map(|c| c.residual).fold(f64::INFINITY, f64::min),
        }),
    }
}

/// The representation attached to a variety point.
pub fn reconstruct_representation(p: &VarietyPoint, m: &Manifold) -> Result<Representation> {
    m.validate()?;
    match m.family {
        Family::FigureEightP | Family::FigureEightQ => reconstruct_fig8(m, p),
        Family::FiveTwoQ => reconstruct_five_two(m, p),
    }
}

/// Convenience: reconstruct from a double-precision coordinate.
pub fn reconstruct_at(a: Complex64, m: &Manifold) -> Result<Representation> {
    reconstruct_representation(&VarietyPoint { a, a_dd: Cdd::from_c64(a) }, m)
}

/// The 3×3 matrix of the adjoint action on sl₂.
pub type AdjointMatrix<F> = Matrix<F>;

/// Ordered Killing-orthogonal basis (H, E+F, E−F) of sl₂.
pub fn sl2_basis<F: CField>() -> [Mat2<F>; 3] {
    let (o, z) = (F::one(), F::zero());
    [Mat2::new(o, z, z, -o), Mat2::new(z, o, o, z), Mat2::new(z, o, -o, z)]
}

/// Coordinates of a traceless X in (H, E+F, E−F).
fn sl2_coords<F: CField>(x: &Mat2<F>) -> [F; 3] {
    let half = F::from_parts(0.5, 0.0);
    [x.m[0][0], (x.m[0][1] + x.m[1][0]) * half, (x.m[0][1] - x.m[1][0]) * half]
}

/// Matrix of X ↦ gXg⁻¹ on (H, E+F, E−F).
pub fn adjoint<F: CField>(g: &Mat2<F>) -> AdjointMatrix<F> {
    adjoint_in_basis(g, [1.0, 1.0, 1.0])
}

/// Matrix of the adjoint action on the rescaled basis (s₀H, s₁(E+F), s₂(E−F)).
pub fn adjoint_in_basis<F: CField>(g: &Mat2<F>, scales: [f64; 3]) -> AdjointMatrix<F> {
    let gi = g.inverse();
    let basis = sl2_basis::<F>();
    let mut out = Matrix::zeros(3, 3);
    for j in 0..3 {
        let y = *g * basis[j] * gi;
        let co = sl2_coords(&y);
        for i in 0..3 {
            out.set(i, j, co[i].scale(scales[j] / scales[i]));
        }
    }
    out
}

/// Gram matrix of the Killing form B(X, Y) = 4 tr(XY) on the scaled basis.
pub fn killing_gram(scales: [f64; 3]) -> Matrix<Complex64> {
    let base = [8.0, 8.0, -8.0];
    Matrix::from_fn(3, 3, |i, j| {
        if i == j {
            Complex64::new(base[i] * scales[i] * scales[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Generator index helpers re-exported for callers building words by hand.
pub const GENERATOR_X1: usize = X1;
pub const GENERATOR_X2: usize = X2;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::ExactPolynomial;

    fn cc(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn qm_p4_is_printed_sextic() {
        let q = build_qm(&Manifold::fig8_p(4)).unwrap();
        assert_eq!(q, ExactPolynomial::from_terms(&[(2, 1), (4, 2), (6, 1)]));
    }

    #[test]
    fn qm_p0_normalizes() {
        let q = build_qm(&Manifold::fig8_p(0)).unwrap().root_polynomial();
        assert_eq!(q, ExactPolynomial::from_terms(&[(0, -1), (2, 1), (4, 4), (6, 1), (8, -1)]));
    }

    #[test]
    fn domain_membership() {
        assert!(DomainD::contains(cc(0.5, 0.0)));
        assert!(DomainD::contains(cc(0.0, 1.0)));
        assert!(DomainD::contains(cc(0.0, -1.0)));
        assert!(!DomainD::contains(cc(0.6, -0.8)));
        assert!(DomainD::contains(cc(0.6, 0.8)));
        assert!(!DomainD::contains(cc(1.0, 0.0)));
        assert!(!DomainD::contains(cc(-1.0, 0.0)));
        assert!(!DomainD::contains(cc(2.0, 0.0)));
    }

    #[test]
    fn p4_points_are_plus_minus_i() {
        let pts = variety_points(&Manifold::fig8_p(4)).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().any(|p| (p.a - cc(0.0, 1.0)).norm() < 1e-15));
        assert!(pts.iter().any(|p| (p.a - cc(0.0, -1.0)).norm() < 1e-15));
    }

    #[test]
    fn adjoint_of_identity() {
        let a = adjoint(&Mat2::<Complex64>::identity());
        assert!(a.sub(&Matrix::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn adjoint_is_multiplicative() {
        let g = Mat2::new(cc(1.0, 0.5), cc(0.3, 0.0), cc(0.2, -0.1), cc(0.0, 0.0));
        let g = {
            let d = g.det().sqrt();
            Mat2::new(g.m[0][0] / d, g.m[0][1] / d, g.m[1][0] / d, g.m[1][1] / d)
        };
        let h = Mat2::new(cc(2.0, 0.0), cc(1.0, 1.0), cc(0.0, 0.0), cc(0.5, 0.0));
        let lhs = adjoint(&(g * h));
        let rhs = adjoint(&g).matmul(&adjoint(&h));
        assert!(lhs.sub(&rhs).max_abs() < 1e-13);
    }

    #[test]
    fn diagonal_adjoint_mixes_e_plus_f_block() {
        let a = cc(0.3, 0.4);
        let ad = adjoint(&Mat2::diag(a, 1.0 / a));
        let (a2, am2) = (a * a, 1.0 / (a * a));
        assert!((ad.get(0, 0) - 1.0).norm() < 1e-14);
        assert!((ad.get(1, 1) - (a2 + am2) / 2.0).norm() < 1e-13);
        assert!((ad.get(1, 2) - (a2 - am2) / 2.0).norm() < 1e-13);
    }
}
