//! Adjoint torsion two ways: closed-form expressions in the eigenvalue
//! coordinate, and the torsion of the based cochain complex assembled from
//! Fox derivatives evaluated through the adjoint representation.

use crate::ddouble::{CField, Cdd};
use crate::error::{Result, TorsionError};
use crate::family::{Family, Manifold};
use crate::linalg::{Mat2, Matrix};
use crate::presentation::{self, Differentials, GroupRingElement, WProvenance};
use crate::rootfind::Precision;
use crate::variety::{self, adjoint_in_basis, Representation, VarietyPoint};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

/// Scaled chain-condition gate ‖δ_aδ_b‖ / (‖δ_a‖‖δ_b‖), max-entry norms.
pub const CHAIN_GATE: f64 = 1e-9;
/// Smallest retained relative singular value of an acyclic differential.
pub const ACYCLIC_GATE: f64 = 1e-6;
/// Agreement required between |closed form| and |chain complex|.
pub const CROSS_CHECK_TOL: f64 = 1e-7;
/// Relative size below which a derivative counts as vanishing.
pub const DERIVATIVE_GATE: f64 = 1e-10;

fn k<F: CField>(n: i64) -> F {
    F::from_i64(n)
}

fn near_unit_i<F: CField>(a: F) -> bool {
    (a * a + F::one()).abs() < variety::DOMAIN_TOL
}

/// Terms `(j, e, c)` of the 5₂ numerator P(a) = Σ c·a^e·(a^{2q})^j.
pub fn five_two_terms(q: i64) -> Vec<(i64, i64, i64)> {
    let rows: [&[(i64, i64)]; 7] = [
        &[(0, 1 - 2 * q), (1, 28 * q + 2), (2, 3 - 42 * q), (3, 36 * q - 8), (4, 2 - 20 * q)],
        &[(-1, 4 * q - 1), (0, 18 * q - 3), (1, 3 - 32 * q), (2, 4 - 54 * q), (3, -2), (4, 8 * q - 1)],
        &[(-1, 1 - 4 * q), (0, -10 * q), (1, -8 * q - 3), (2, 38 * q - 4), (3, 5 - 34 * q), (4, 1 - 10 * q)],
        &[(-1, 10 * q - 1), (0, 18 * q + 2), (1, 7 - 56 * q), (2, 74 * q - 8), (3, 10 * q)],
        &[(-1, 14 * q - 3), (0, 18 * q), (1, 9 - 76 * q), (2, -3), (3, 16 * q - 3)],
        &[(-1, 24 * q - 2), (0, 1 - 10 * q), (1, 2 - 52 * q), (2, -18 * q - 1)],
        &[(-2, 4 * q - 1), (-1, 8 * q), (0, 5 - 62 * q), (1, 56 * q - 6), (2, 2 - 6 * q)],
    ];
    rows.iter()
        .enumerate()
        .flat_map(|(j, row)| row.iter().map(move |&(e, c)| (j as i64, e, c)))
        .collect()
}

/// The 5₂ numerator polynomial P(a) (a Laurent expression in a and a^{2q}).
pub fn five_two_p<F: CField>(a: F, q: i64) -> F {
    let ia = F::one() / a;
    // a^e for e in −2..=4.
    let mut pows = [F::one(); 7];
    pows[1] = ia;
    pows[0] = ia * ia;
    for e in 1..=4 {
        pows[2 + e] = pows[1 + e] * a;
    }
    let u = a.powi(2 * q);
    let mut rows = [F::zero(); 7];
    for (j, e, c) in five_two_terms(q) {
        rows[j as usize] = rows[j as usize] + k::<F>(c) * pows[(e + 2) as usize];
    }
    rows.iter().rev().fold(F::zero(), |acc, &t| acc * u + t)
}

/// P as an exact Laurent polynomial in a.
pub fn five_two_p_poly(q: i64) -> crate::exactpoly::ExactPolynomial {
    let terms: Vec<(i64, i64)> = five_two_terms(q).into_iter().map(|(j, e, c)| (e + 2 * q * j, c)).collect();
    crate::exactpoly::ExactPolynomial::from_terms(&terms)
}

/// Closed-form torsion in any scalar field.
pub fn torsion_closed_form_in<F: CField>(a: F, m: &Manifold) -> Result<F> {
    m.validate()?;
    let n = m.parameter;
    let two = k::<F>(2);
    match m.family {
        Family::FigureEightP => {
            if near_unit_i(a) {
                let qm = variety::build_qm(m)?;
                let sign = if a.to_c64().im > 0.0 { 1 } else { -1 };
                let (re, im) = qm.eval_at_i(sign);
                if !(re == num_rational::BigRational::from_integer(0.into())
                    && im == num_rational::BigRational::from_integer(0.into()))
                {
                    return Err(TorsionError::BranchDomain(format!(
                        "±i is not a root of Q_M for p = {n}"
                    )));
                }
                // (10 + a p √−5)/8 with √−5 = i√5.
                let s5 = k::<F>(5).sqrt();
                return Ok((k::<F>(10) + a * k::<F>(n) * F::i() * s5) / k::<F>(8));
            }
            let p = n;
            let a2 = a * a;
            let a4 = a2 * a2;
            let a6 = a4 * a2;
            let a8 = a4 * a4;
            let num = k::<F>(4 - p) + k::<F>(p - 2) * a2 + k::<F>(2 * p) * a4 + k::<F>(2 + p) * a6
                - k::<F>(4 + p) * a8
                + k::<F>(2 * p) * a.powi(4 + p);
            let d = a2 - F::one();
            Ok(-num / (two * d * d * d * (F::one() + a2)))
        }
        Family::FigureEightQ => {
            let q = n;
            let u = a.powi(2 * q);
            let (u2, u3, u4) = (u * u, u * u * u, u * u * u * u);
            let num = u3
                * (k::<F>(4 * q - 1) + k::<F>(1 - 2 * q) * u + two * (F::one() + a) * u2
                    + k::<F>(1 + 2 * q) * u3
                    - k::<F>(1 + 4 * q) * u4);
            let d = u2 - F::one();
            let den = two * d * d * d * (F::one() - two * u - u2 - two * u3 + u4);
            if den.abs() == 0.0 {
                return Err(TorsionError::BranchDomain(format!("denominator vanishes at a = {:?}", a.to_c64())));
            }
            Ok(-num / den)
        }
        Family::FiveTwoQ => {
            let d = a * a - F::one();
            let d2 = d * d;
            Ok(-(a * a) * five_two_p(a, n) / (two * d2 * d2))
        }
    }
}

/// Closed-form torsion at a double-precision coordinate.
pub fn torsion_closed_form(a: Complex64, m: &Manifold) -> Result<Complex64> {
    torsion_closed_form_in(a, m)
}

/// The rational-function form of 1/τ.
pub fn torsion_inverse_rational_in<F: CField>(a: F, m: &Manifold) -> Result<F> {
    m.validate()?;
    let n = m.parameter;
    let two = k::<F>(2);
    let qm = variety::build_qm(m)?;
    let (num, den, den_scale) = match m.family {
        Family::FigureEightP => {
            let d = F::one() - a * a;
            let num = two * d * d * d * (F::one() + a * a) * a.powi(n - 5);
            let dq = qm.derivative();
            (num, dq.eval(a), abs_eval(&dq, a))
        }
        Family::FigureEightQ => {
            let u = a.powi(4 * n);
            let d = u - F::one();
            // The displayed form carries an overall sign opposite to the
            // closed form; negated here so that both describe the same τ.
            let num = -two * d * d * d * (u - (a * a + a + F::one()) * a.powi(2 * n - 1) + F::one());
            let dq = qm.mul_x_pow(4 * n + 1).derivative();
            (num, dq.eval(a), abs_eval(&dq, a))
        }
        Family::FiveTwoQ => {
            let d = a * a - F::one();
            let d2 = d * d;
            let p = a * a * five_two_p(a, n);
            (-two * d2 * d2, p, 1.0)
        }
    };
    if den.abs() <= DERIVATIVE_GATE * den_scale || den.abs() == 0.0 {
        return Err(TorsionError::DerivativeVanishes);
    }
    Ok(num / den)
}

pub fn torsion_inverse_rational(a: Complex64, m: &Manifold) -> Result<Complex64> {
    torsion_inverse_rational_in(a, m)
}

/// Σ |c_e| |a|^e, the natural scale of a Laurent evaluation.
fn abs_eval<F: CField>(p: &crate::exactpoly::ExactPolynomial, a: F) -> f64 {
    let r = a.abs();
    p.terms().map(|(e, c)| c.to_f64().unwrap_or(f64::INFINITY).abs() * r.powi(e as i32)).sum()
}

/// How the column subsets b^i are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetChoice {
    /// Complete-pivoting elimination.
    Pivoted,
    /// Random admissible subsets from a seeded generator.
    Random(u64),
}

/// Options of the chain-complex engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainOptions {
    pub subsets: SubsetChoice,
    /// Scales (s₀, s₁, s₂) of the basis (s₀H, s₁(E+F), s₂(E−F)).
    pub basis_scales: [f64; 3],
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions { subsets: SubsetChoice::Pivoted, basis_scales: [1.0, 1.0, 1.0] }
    }
}

/// The three differentials evaluated at a representation, in the layout
/// δ¹: 3×3g, δ²: 3g×3g, δ³: 3g×3.
#[derive(Clone, Debug)]
pub struct EvaluatedDifferentials {
    pub d1: Matrix<Cdd>,
    pub d2: Matrix<Cdd>,
    pub d3: Matrix<Cdd>,
}

/// Σ n_w Ad(φ(w)), evaluating words in sorted order so shared prefixes are
/// multiplied once.
fn eval_ring_adjoint(
    u: &GroupRingElement,
    mats: &[Mat2<Cdd>],
    invs: &[Mat2<Cdd>],
    scales: [f64; 3],
) -> Matrix<Cdd> {
    let mut acc: Matrix<Cdd> = Matrix::zeros(3, 3);
    let mut stack: Vec<Mat2<Cdd>> = vec![Mat2::identity()];
    let mut prev: &[presentation::Letter] = &[];
    for (w, c) in u.terms() {
        let letters = w.letters();
        let common = prev.iter().zip(letters).take_while(|(x, y)| x == y).count();
        stack.truncate(common + 1);
        for l in &letters[common..] {
            let top = *stack.last().expect("non-empty stack");
            stack.push(top * if l.exp == 1 { mats[l.gen] } else { invs[l.gen] });
        }
        prev = letters;
        let g = stack.last().expect("non-empty stack");
        let coef = Cdd::from_i64(c.to_i64().expect("small Fox coefficient"));
        acc = acc.add(&adjoint_in_basis(g, scales).scale(coef));
    }
    acc
}

/// T(u) = Σ n_w Ad(φ(w))ᵀ, the anti-homomorphic evaluation.
fn eval_t(u: &GroupRingElement, mats: &[Mat2<Cdd>], invs: &[Mat2<Cdd>], scales: [f64; 3]) -> Matrix<Cdd> {
    eval_ring_adjoint(u, mats, invs, scales).transpose()
}

/// Evaluate the symbolic differentials through the adjoint of `rep`.
pub fn evaluate_differentials(
    diffs: &Differentials,
    rep: &Representation,
    scales: [f64; 3],
) -> EvaluatedDifferentials {
    let g = diffs.d1.len();
    let mats = &rep.matrices;
    let invs = rep.inverses();
    let mut d1 = Matrix::zeros(3, 3 * g);
    let mut d2 = Matrix::zeros(3 * g, 3 * g);
    let mut d3 = Matrix::zeros(3 * g, 3);
    for j in 0..g {
        d1.set_block(0, 3 * j, &eval_t(&diffs.d1[j], mats, &invs, scales));
        d3.set_block(3 * j, 0, &eval_t(&diffs.d3[j], mats, &invs, scales));
        for i in 0..g {
            d2.set_block(3 * i, 3 * j, &eval_t(&diffs.d2[i][j], mats, &invs, scales));
        }
    }
    EvaluatedDifferentials { d1, d2, d3 }
}

/// ‖AB‖ as (scaled, absolute) max-entry norms.
pub fn composition_norm(a: &Matrix<Cdd>, b: &Matrix<Cdd>) -> (f64, f64) {
    let abs = a.matmul(b).max_abs();
    let scale = a.max_abs() * b.max_abs();
    (if scale > 0.0 { abs / scale } else { abs }, abs)
}

/// Result of the chain-complex engine.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainTorsion {
    #[serde(serialize_with = "ser_c64")]
    pub value: Complex64,
    /// Ranks of δ³, δ², δ¹.
    pub ranks: [usize; 3],
    /// Smallest retained singular value relative to the largest, over all three.
    pub margin: f64,
    /// Scaled chain-condition norms of δ²δ³ and δ¹δ².
    pub chain_norms: [f64; 2],
    /// The same norms without scaling.
    pub chain_norms_abs: [f64; 2],
    /// Column subsets b⁰, b¹, b².
    pub subsets: [Vec<usize>; 3],
}

fn ser_c64<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn random_subset(d: &Matrix<Cdd>, rank: usize, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..d.cols()).collect();
    order.shuffle(rng);
    let full = d.singular_values().first().copied().unwrap_or(0.0);
    let mut chosen: Vec<usize> = Vec::new();
    for j in order {
        if chosen.len() == rank {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(j);
        let sub = Matrix::from_fn(d.rows(), trial.len(), |r, c| d.get(r, trial[c]).to_c64());
        let sv = sub.singular_values();
        if sv.last().copied().unwrap_or(0.0) > ACYCLIC_GATE * full {
            chosen = trial;
        }
    }
    if chosen.len() == rank {
        chosen.sort_unstable();
        Some(chosen)
    } else {
        None
    }
}

/// Torsion of the based complex C⁰ →δ³ C¹ →δ² C² →δ¹ C³.
pub fn torsion_of_complex(ev: &EvaluatedDifferentials, subsets: SubsetChoice) -> Result<ChainTorsion> {
    let g3 = ev.d2.rows();
    let d = [&ev.d3, &ev.d2, &ev.d1];
    let dims = [3, g3, g3, 3];
    let (n23, a23) = composition_norm(&ev.d2, &ev.d3);
    let (n12, a12) = composition_norm(&ev.d1, &ev.d2);
    let worst = n23.max(n12);
    if !(worst < CHAIN_GATE) {
        return Err(TorsionError::ChainConditionViolated { norm: worst });
    }
    let expected = [3, g3 - 3, 3];
    let mut ranks = [0usize; 3];
    let mut margin = f64::INFINITY;
    for i in 0..3 {
        let sv = d[i].singular_values();
        let top = sv.first().copied().unwrap_or(0.0);
        ranks[i] = sv.iter().filter(|&&s| s > ACYCLIC_GATE * top).count();
        let kept = if expected[i] >= 1 && expected[i] <= sv.len() { sv[expected[i] - 1] } else { 0.0 };
        margin = margin.min(if top > 0.0 { kept / top } else { 0.0 });
    }
    if ranks != expected || !(margin > ACYCLIC_GATE) {
        return Err(TorsionError::NotAcyclic { margin, ranks: ranks.to_vec() });
    }
    let mut bs: [Vec<usize>; 3] = Default::default();
    for i in 0..3 {
        bs[i] = match subsets {
            SubsetChoice::Pivoted => d[i].pivot_columns(expected[i]),
            SubsetChoice::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(i as u64));
                random_subset(d[i], expected[i], &mut rng)
                    .ok_or(TorsionError::NotAcyclic { margin, ranks: ranks.to_vec() })?
            }
        };
    }
    let mut tau = Cdd::one();
    for i in 0..4 {
        let n = dims[i];
        let mut t: Matrix<Cdd> = Matrix::zeros(n, n);
        let mut col = 0;
        if i > 0 {
            for &j in &bs[i - 1] {
                for r in 0..n {
                    t.set(r, col, d[i - 1].get(r, j));
                }
                col += 1;
            }
        }
        if i < 3 {
            for &j in &bs[i] {
                t.set(j, col, Cdd::one());
                col += 1;
            }
        }
        debug_assert_eq!(col, n);
        let det = t.det();
        if det.is_zero() {
            return Err(TorsionError::NotAcyclic { margin, ranks: ranks.to_vec() });
        }
        // [b^i/c^i] = det(T_i)⁻¹ enters with exponent (−1)^{i+1}; the sign
        // (−1)^{|C|} is +1 in the acyclic case.
        tau = if i % 2 == 0 { tau * det } else { tau / det };
    }
    Ok(ChainTorsion {
        value: tau.to_c64(),
        ranks,
        margin,
        chain_norms: [n23, n12],
        chain_norms_abs: [a23, a12],
        subsets: bs,
    })
}

/// Chain-complex torsion of a validated representation.
pub fn torsion_chain_complex(rep: &Representation) -> Result<ChainTorsion> {
    let pres = presentation::build_presentation(&rep.manifold)?;
    let diffs = presentation::symbolic_differentials(&pres);
    torsion_chain_complex_with(rep, &diffs, &ChainOptions::default())
}

pub fn torsion_chain_complex_with(
    rep: &Representation,
    diffs: &Differentials,
    opts: &ChainOptions,
) -> Result<ChainTorsion> {
    if rep.max_residual() > variety::RESIDUAL_GATE {
        return Err(TorsionError::InvalidArgument(format!(
            "representation residual {:.3e} above the gate",
            rep.max_residual()
        )));
    }
    let ev = evaluate_differentials(diffs, rep, opts.basis_scales);
    torsion_of_complex(&ev, opts.subsets)
}

/// One row of the torsion table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionRecord {
    pub family: Family,
    pub parameter: i64,
    #[serde(serialize_with = "ser_c64")]
    pub a: Complex64,
    #[serde(serialize_with = "ser_opt_c64")]
    pub closed_form: Option<Complex64>,
    #[serde(serialize_with = "ser_opt_c64")]
    pub chain_complex: Option<Complex64>,
    /// closed_form / chain_complex.
    #[serde(serialize_with = "ser_opt_c64")]
    pub ratio: Option<Complex64>,
    pub residual: f64,
    pub margin: Option<f64>,
    pub chain_norm: Option<f64>,
    pub irreducible: bool,
    pub notes: Vec<String>,
}

fn ser_opt_c64<S: Serializer>(z: &Option<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    z.map(|z| [z.re, z.im]).serialize(s)
}

impl TorsionRecord {
    /// Relative disagreement of the moduli, when both methods ran.
    pub fn modulus_mismatch(&self) -> Option<f64> {
        match (self.closed_form, self.chain_complex) {
            (Some(c), Some(t)) => Some((c.norm() - t.norm()).abs() / c.norm().max(t.norm())),
            _ => None,
        }
    }
}

/// Which torsion paths to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    ChainComplex,
    Both,
}

impl std::str::FromStr for Method {
    type Err = TorsionError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" | "closed-form" => Ok(Method::ClosedForm),
            "chain" | "chain-complex" => Ok(Method::ChainComplex),
            "both" => Ok(Method::Both),
            _ => Err(TorsionError::Parse(format!("unknown method {s:?}"))),
        }
    }
}

fn record_for(
    m: &Manifold,
    p: &VarietyPoint,
    diffs: &Differentials,
    provenance: WProvenance,
    method: Method,
) -> TorsionRecord {
    let mut notes = Vec::new();
    if provenance != WProvenance::Printed {
        notes.push("W derived".to_string());
    }
    let closed_form = if method != Method::ChainComplex {
        match torsion_closed_form_in(p.a_dd, m) {
            Ok(v) => Some(v.to_c64()),
            Err(e) => {
                notes.push(format!("closed form: {e}"));
                None
            }
        }
    } else {
        None
    };
    let mut residual = f64::NAN;
    let mut irreducible = true;
    let mut chain = None;
    if method != Method::ClosedForm {
        match variety::reconstruct_representation(p, m) {
            Ok(rep) => {
                residual = rep.max_residual();
                irreducible = rep.irreducible;
                if !rep.irreducible {
                    notes.push("reducible representation".to_string());
                }
                match torsion_chain_complex_with(&rep, diffs, &ChainOptions::default()) {
                    Ok(c) => chain = Some(c),
                    Err(e) => notes.push(format!("chain complex: {e}")),
                }
            }
            Err(e) => notes.push(format!("representation: {e}")),
        }
    }
    let ratio = match (closed_form, &chain) {
        (Some(c), Some(t)) => Some(c / t.value),
        _ => None,
    };
    TorsionRecord {
        family: m.family,
        parameter: m.parameter,
        a: p.a,
        closed_form,
        chain_complex: chain.as_ref().map(|c| c.value),
        ratio,
        residual,
        margin: chain.as_ref().map(|c| c.margin),
        chain_norm: chain.as_ref().map(|c| c.chain_norms[0].max(c.chain_norms[1])),
        irreducible,
        notes,
    }
}

/// Torsion at every variety point, in variety order (parallel across points).
pub fn torsion_table(m: &Manifold, method: Method, precision: Precision) -> Result<Vec<TorsionRecord>> {
    let var = variety::compute_variety(m, precision)?;
    let pres = presentation::build_presentation(m)?;
    let diffs = presentation::symbolic_differentials(&pres);
    Ok(var
        .points
        .par_iter()
        .map(|p| record_for(m, p, &diffs, pres.w_provenance, method))
        .collect())
}

/// Fixed CSV header of the torsion table.
pub const CSV_HEADER: [&str; 10] =
    ["family", "parameter", "re_a", "im_a", "re_tau_cf", "im_tau_cf", "re_tau_cc", "im_tau_cc", "ratio", "residual"];

fn sci(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Write records as CSV with 17 significant digits.
pub fn write_csv<W: std::io::Write>(records: &[TorsionRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let cf = r.closed_form.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let cc = r.chain_complex.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let ratio = r.ratio.map_or(f64::NAN, |z| z.re);
        w.write_record([
            r.family.name().to_string(),
            r.parameter.to_string(),
            sci(r.a.re),
            sci(r.a.im),
            sci(cf.re),
            sci(cf.im),
            sci(cc.re),
            sci(cc.im),
            sci(ratio),
            sci(r.residual),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_i_values_at_p4() {
        let m = Manifold::fig8_p(4);
        let s5 = 5f64.sqrt();
        let tp = torsion_closed_form(c(0.0, 1.0), &m).unwrap();
        let tm = torsion_closed_form(c(0.0, -1.0), &m).unwrap();
        assert!((tp - c((5.0 - 2.0 * s5) / 4.0, 0.0)).norm() < 1e-14);
        assert!((tm - c((5.0 + 2.0 * s5) / 4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn unit_i_rejected_when_not_a_root() {
        assert!(matches!(
            torsion_closed_form(c(0.0, 1.0), &Manifold::fig8_p(6)),
            Err(TorsionError::BranchDomain(_))
        ));
    }

    #[test]
    fn csv_header_is_fixed() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap().trim(),
            "family,parameter,re_a,im_a,re_tau_cf,im_tau_cf,re_tau_cc,im_tau_cc,ratio,residual"
        );
    }

    #[test]
    fn inverse_form_at_repeated_root_fails() {
        // a = i is a double root of Q_M for p = 8.
        assert_eq!(
            torsion_inverse_rational(c(0.0, 1.0), &Manifold::fig8_p(8)),
            Err(TorsionError::DerivativeVanishes)
        );
    }
}
