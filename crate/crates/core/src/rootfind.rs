//! All complex roots of an exact polynomial: exact square-free
//! decomposition, Aberth–Ehrlich simultaneous iteration on each factor, and
//! Newton polishing in double-double.  Multiplicities come only from the
//! decomposition, never from clustering.

use crate::ddouble::{CField, Cdd};
use crate::error::{Result, TorsionError};
use crate::exactpoly::ExactPolynomial;
use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use std::str::FromStr;

/// Aberth sweeps before giving up.
pub const MAX_ABERTH_SWEEPS: usize = 200;
/// Newton polishing steps per root.
pub const MAX_POLISH_STEPS: usize = 50;
/// Factor degree above which the iteration itself runs in double-double.
pub const DD_DEGREE_THRESHOLD: usize = 60;
/// Accepted residual `|p(a)| / (max|c| · max(1,|a|)^deg)`.
pub const RESIDUAL_BOUND: f64 = 1e-12;
/// Matching tolerance `|a·b − 1|` for reciprocal pairing.
pub const PAIRING_TOL: f64 = 1e-9;

/// Working precision of the Aberth iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Double below the degree threshold, double-double above it.
    #[default]
    Auto,
    Double,
    #[serde(rename = "dd")]
    DoubleDouble,
}

impl Precision {
    pub fn use_dd(self, degree: usize) -> bool {
        match self {
            Precision::Auto => degree > DD_DEGREE_THRESHOLD,
            Precision::Double => false,
            Precision::DoubleDouble => true,
        }
    }
}

impl FromStr for Precision {
    type Err = TorsionError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Precision::Auto),
            "double" => Ok(Precision::Double),
            "dd" | "double-double" => Ok(Precision::DoubleDouble),
            _ => Err(TorsionError::Parse(format!("unknown precision profile {s:?}"))),
        }
    }
}

/// One distinct root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    /// The polished value to double-double accuracy.
    pub value_dd: Cdd,
    pub multiplicity: usize,
    /// `|f(a)| / (max|c| · max(1,|a|)^deg)` on the square-free factor.
    pub residual: f64,
}

impl Serialize for Root {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct R {
            re: f64,
            im: f64,
            mult: usize,
            residual: f64,
        }
        R { re: self.value.re, im: self.value.im, mult: self.multiplicity, residual: self.residual }
            .serialize(s)
    }
}

/// The zero set of a polynomial with multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Degree of the normalised (root) polynomial.
    pub degree: usize,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn worst_residual(&self) -> f64 {
        self.roots.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

impl Serialize for RootSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.roots.len()))?;
        for r in &self.roots {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}

/// Evaluate `p(z)`, `p'(z)` and the absolute bound `Σ|c_i||z|^i`.
fn horner<F: CField>(c: &[F], z: F) -> (F, F, f64) {
    let n = c.len() - 1;
    let mut b = c[n];
    let mut d = F::zero();
    let az = z.abs();
    let mut e = c[n].abs();
    for i in (0..n).rev() {
        d = d * z + b;
        b = b * z + c[i];
        e = e * az + c[i].abs();
    }
    (b, d, e)
}

/// Fujiwara upper bound on the moduli of the roots.
fn fujiwara(c: &[f64]) -> f64 {
    let n = c.len() - 1;
    let lead = c[n];
    let mut m: f64 = 0.0;
    for i in 1..=n {
        let mut v = (c[n - i] / lead).abs();
        if i == n {
            v /= 2.0;
        }
        m = m.max(v.powf(1.0 / i as f64));
    }
    2.0 * m
}

/// Deterministic starting points: alternately on the inner and outer
/// Fujiwara circles, rotated by `offset`.
fn initial_guesses<F: CField>(c: &[F], offset: f64) -> Vec<F> {
    let n = c.len() - 1;
    let mags: Vec<f64> = c.iter().map(|v| v.abs()).collect();
    let upper = fujiwara(&mags);
    let rev: Vec<f64> = mags.iter().rev().cloned().collect();
    let lower = if mags[0] > 0.0 { 1.0 / fujiwara(&rev) } else { upper * 1e-3 };
    (0..n)
        .map(|k| {
            let r = if k % 2 == 0 { lower } else { upper };
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + offset;
            F::from_parts(r * th.cos(), r * th.sin())
        })
        .collect()
}

/// Aberth–Ehrlich iteration in the field `F`.  Returns the approximations
/// and whether every root met the backward-error stopping rule.
pub fn aberth<F: CField>(c: &[F], offset: f64, max_sweeps: usize) -> (Vec<F>, bool) {
    let n = c.len() - 1;
    let mut z = initial_guesses(c, offset);
    let mut done = vec![false; n];
    let tol = 8.0 * F::epsilon() * n as f64;
    for _ in 0..max_sweeps {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp, bound) = horner(c, z[k]);
            if p.abs() <= tol * bound {
                done[k] = true;
                continue;
            }
            all = false;
            let w = p / dp;
            let mut s = F::zero();
            for j in 0..n {
                if j != k {
                    s = s + F::one() / (z[k] - z[j]);
                }
            }
            let step = w / (F::one() - w * s);
            if step.abs().is_finite() {
                z[k] = z[k] - step;
            }
        }
        if all {
            return (z, true);
        }
    }
    let ok = (0..n).all(|k| {
        let (p, _, b) = horner(c, z[k]);
        p.abs() <= tol * b
    });
    (z, ok)
}

/// Newton polishing in the field of `c`.
pub fn polish<F: CField>(c: &[F], mut z: F, steps: usize) -> F {
    for _ in 0..steps {
        let (p, dp, _) = horner(c, z);
        if dp.is_zero() {
            break;
        }
        let step = p / dp;
        z = z - step;
        if step.abs() <= F::epsilon() * z.abs().max(1.0) {
            break;
        }
    }
    z
}

fn scaled_residual(c: &[Cdd], z: Cdd) -> f64 {
    let n = c.len() - 1;
    let maxc = c.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let (p, _, _) = horner(c, z);
    p.abs() / (maxc * z.abs().max(1.0).powi(n as i32))
}

/// Roots of one square-free factor, polished in double-double.
fn square_free_roots(f: &ExactPolynomial, precision: Precision) -> Result<Vec<(Cdd, f64)>> {
    let deg = f.degree().unwrap_or(0);
    let cdd: Vec<Cdd> = f.field_coeffs();
    if deg == 1 {
        let z = -(cdd[0] / cdd[1]);
        return Ok(vec![(z, scaled_residual(&cdd, z))]);
    }
    let mut worst = f64::INFINITY;
    for attempt in 0..4 {
        let offset = 0.7 + 0.37 * attempt as f64;
        let approx: Vec<Cdd> = if precision.use_dd(deg) {
            aberth(&cdd, offset, MAX_ABERTH_SWEEPS).0
        } else {
            let c64: Vec<Complex64> = f.field_coeffs();
            aberth(&c64, offset, MAX_ABERTH_SWEEPS).0.into_iter().map(Cdd::from_c64).collect()
        };
        let polished: Vec<(Cdd, f64)> = approx
            .into_iter()
            .map(|z| {
                let z = polish(&cdd, z, MAX_POLISH_STEPS);
                (z, scaled_residual(&cdd, z))
            })
            .collect();
        worst = polished.iter().map(|r| r.1).fold(0.0, f64::max);
        let distinct = polished.iter().enumerate().all(|(i, a)| {
            polished[i + 1..]
                .iter()
                .all(|b| (a.0 - b.0).abs() > 1e-13 * a.0.abs().max(1.0))
        });
        if worst <= RESIDUAL_BOUND && distinct && worst.is_finite() {
            return Ok(polished);
        }
    }
    Err(TorsionError::ConvergenceFailure { worst_residual: worst })
}

/// Deterministic order: modulus (to 1e-9), then argument.
pub fn root_order(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    let qa = (a.norm() * 1e9).round() as i64;
    let qb = (b.norm() * 1e9).round() as i64;
    qa.cmp(&qb).then(a.arg().total_cmp(&b.arg()))
}

/// All roots with multiplicities, auto precision.
pub fn find_roots(p: &ExactPolynomial) -> Result<RootSet> {
    find_roots_with(p, Precision::Auto)
}

pub fn find_roots_with(p: &ExactPolynomial, precision: Precision) -> Result<RootSet> {
    let f = p.root_polynomial();
    let degree = match f.degree() {
        None | Some(0) => {
            return Err(TorsionError::InvalidArgument("need a polynomial of degree ≥ 1".into()))
        }
        Some(d) => d,
    };
    let mut roots = Vec::with_capacity(degree);
    for (factor, mult) in f.square_free_decomposition() {
        for (z, residual) in square_free_roots(&factor, precision)? {
            roots.push(Root { value: z.to_c64(), value_dd: z, multiplicity: mult, residual });
        }
    }
    roots.sort_by(|a, b| root_order(a.value, b.value));
    Ok(RootSet { roots, degree })
}

/// Roots of a polynomial with numeric complex coefficients (ascending), no
/// multiplicity handling.  Used for small auxiliary equations.
pub fn complex_roots<F: CField>(c: &[F]) -> Result<Vec<F>> {
    let mut c = c.to_vec();
    while c.len() > 1 && c.last().is_some_and(|v| v.is_zero()) {
        c.pop();
    }
    if c.len() < 2 {
        return Err(TorsionError::InvalidArgument("need degree ≥ 1".into()));
    }
    if c.len() == 2 {
        return Ok(vec![-(c[0] / c[1])]);
    }
    let (z, _) = aberth(&c, 0.7, MAX_ABERTH_SWEEPS);
    Ok(z.into_iter().map(|z| polish(&c, z, MAX_POLISH_STEPS)).collect())
}

/// Reciprocal matching of a root set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReciprocalPairing {
    /// Index pairs `(i, j)` with `roots[i]·roots[j] ≈ 1`, `|roots[i]| ≤ |roots[j]|`.
    pub pairs: Vec<(usize, usize)>,
    /// Indices with `a ≈ 1/a` (that is `a = ±1`).
    pub self_paired: Vec<usize>,
}

/// Match every root with its reciprocal (greedy by closeness).
pub fn pair_reciprocal_roots(rs: &RootSet) -> Result<ReciprocalPairing> {
    let v: Vec<Cdd> = rs.roots.iter().map(|r| r.value_dd).collect();
    let n = v.len();
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        if rs.roots[i].value.norm() == 0.0 {
            return Err(TorsionError::PairingFailure { unmatched: 1 });
        }
        for j in i..n {
            if rs.roots[i].multiplicity != rs.roots[j].multiplicity {
                continue;
            }
            let cost = (v[i] * v[j] - Cdd::one()).abs();
            if cost <= PAIRING_TOL {
                cand.push((cost, i, j));
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used = vec![false; n];
    let mut out = ReciprocalPairing { pairs: Vec::new(), self_paired: Vec::new() };
    for (_, i, j) in cand {
        if used[i] || used[j] {
            continue;
        }
        used[i] = true;
        used[j] = true;
        if i == j {
            out.self_paired.push(i);
        } else if rs.roots[i].value.norm() <= rs.roots[j].value.norm() {
            out.pairs.push((i, j));
        } else {
            out.pairs.push((j, i));
        }
    }
    let unmatched = used.iter().filter(|u| !**u).count();
    if unmatched > 0 {
        return Err(TorsionError::PairingFailure { unmatched });
    }
    out.pairs.sort();
    out.self_paired.sort();
    Ok(out)
}
