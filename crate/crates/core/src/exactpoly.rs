//! Exact univariate Laurent polynomials over the rationals.
//!
//! A value is `x^{-shift} · Σ c_i x^i`.  Everything needed for the
//! divisibility, square-freeness and exact root-sum checks lives here:
//! Euclidean division, monic gcd, square-free decomposition, inverses modulo
//! a polynomial, and traces over the roots via Newton's identities.

use crate::ddouble::CField;
use crate::error::{Result, TorsionError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Render a rational as `n` or `n/d`.
pub fn rational_to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || TorsionError::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Exact Laurent polynomial `x^{-shift} · Σ coeffs[i] x^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactPolynomial {
    coeffs: Vec<Rational>,
    shift: u32,
}

impl ExactPolynomial {
    /// Build from ascending coefficients and a shift, canonicalising.
    pub fn new(coeffs: Vec<Rational>, shift: u32) -> Self {
        let mut p = ExactPolynomial { coeffs, shift };
        p.canonicalize();
        p
    }

    pub fn zero() -> Self {
        ExactPolynomial { coeffs: Vec::new(), shift: 0 }
    }

    pub fn one() -> Self {
        Self::constant(rat(1))
    }

    pub fn x() -> Self {
        Self::monomial(1, rat(1))
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c], 0)
    }

    /// `c · x^e` for any integer `e`.
    pub fn monomial(e: i64, c: Rational) -> Self {
        Self::from_laurent_parts(e, vec![c])
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect(), 0)
    }

    pub fn from_rationals(coeffs: Vec<Rational>) -> Self {
        Self::new(coeffs, 0)
    }

    /// Accumulate integer terms `(exponent, coefficient)`; exponents may be
    /// negative and may repeat.
    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut c = vec![rat(0); (hi - lo + 1) as usize];
        for &(e, v) in terms {
            c[(e - lo) as usize] += rat(v);
        }
        Self::from_laurent_parts(lo, c)
    }

    /// Coefficients `c` where `c[0]` multiplies `x^low`.
    pub fn from_laurent_parts(low: i64, coeffs: Vec<Rational>) -> Self {
        if low >= 0 {
            let mut c = vec![rat(0); low as usize];
            c.extend(coeffs);
            Self::new(c, 0)
        } else {
            Self::new(coeffs, (-low) as u32)
        }
    }

    fn canonicalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.shift = 0;
            return;
        }
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let drop = lead_zeros.min(self.shift as usize);
        if drop > 0 {
            self.coeffs.drain(..drop);
            self.shift -= drop as u32;
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// True when there are no negative exponents.
    pub fn is_polynomial(&self) -> bool {
        self.shift == 0
    }

    /// Degree of the stored coefficient vector (ordinary degree when
    /// `shift == 0`); `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Smallest exponent carrying a nonzero coefficient.
    pub fn min_exponent(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| i as i64 - self.shift as i64)
    }

    /// Largest exponent carrying a nonzero coefficient.
    pub fn max_exponent(&self) -> Option<i64> {
        self.degree().map(|d| d as i64 - self.shift as i64)
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        let s = self.shift as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (i as i64 - s, c))
    }

    /// Coefficient of `x^e`.
    pub fn coeff(&self, e: i64) -> Rational {
        let i = e + self.shift as i64;
        if i < 0 || i as usize >= self.coeffs.len() {
            rat(0)
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    pub fn leading_coeff(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(|| rat(0))
    }

    /// Divide out the lowest power of x: the result is an ordinary
    /// polynomial with nonzero constant term and the same nonzero roots.
    pub fn root_polynomial(&self) -> ExactPolynomial {
        match self.min_exponent() {
            None => Self::zero(),
            Some(lo) => self.mul_x_pow(-lo),
        }
    }

    /// Multiply by `x^k` for any integer `k`.
    pub fn mul_x_pow(&self, k: i64) -> ExactPolynomial {
        if self.is_zero() {
            return Self::zero();
        }
        Self::from_laurent_parts(k - self.shift as i64, self.coeffs.clone())
    }

    pub fn scale(&self, c: &Rational) -> ExactPolynomial {
        if c.is_zero() {
            return Self::zero();
        }
        ExactPolynomial { coeffs: self.coeffs.iter().map(|a| a * c).collect(), shift: self.shift }
    }

    pub fn monic(&self) -> ExactPolynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.leading_coeff();
        self.scale(&(rat(1) / l))
    }

    pub fn pow(&self, n: u32) -> ExactPolynomial {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Formal derivative; on Laurent terms `c x^e ↦ e c x^{e-1}`.
    pub fn derivative(&self) -> ExactPolynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let s = self.shift as i64;
        let c: Vec<Rational> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * rat(i as i64 - s))
            .collect();
        Self::from_laurent_parts(-s - 1, c)
    }

    /// `x^{deg} p(1/x)` on the stored coefficient vector.
    pub fn reverse(&self) -> ExactPolynomial {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c, 0)
    }

    /// Coefficient sequence of the root polynomial equals its reverse.
    pub fn is_palindromic(&self) -> bool {
        let r = self.root_polynomial();
        r == r.reverse()
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = rat(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        if self.shift > 0 {
            acc /= num_traits::pow(x.clone(), self.shift as usize);
        }
        acc
    }

    /// Exact value at `x = ±i` as `(re, im)`.
    pub fn eval_at_i(&self, sign: i8) -> (Rational, Rational) {
        let mut re = rat(0);
        let mut im = rat(0);
        for (e, c) in self.terms() {
            // (±i)^e cycles with period 4.
            let k = (e * sign as i64).rem_euclid(4);
            match k {
                0 => re += c,
                1 => im += c,
                2 => re -= c,
                _ => im -= c,
            }
        }
        (re, im)
    }

    /// Coefficients converted to a numeric field.
    pub fn field_coeffs<F: CField>(&self) -> Vec<F> {
        self.coeffs.iter().map(F::from_rational).collect()
    }

    /// Numeric evaluation (Horner, then the Laurent shift).
    pub fn eval<F: CField>(&self, x: F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + F::from_rational(c);
        }
        if self.shift > 0 {
            acc = acc * x.powi(-(self.shift as i64));
        }
        acc
    }

    /// Euclidean division of ordinary polynomials.
    pub fn div_rem(&self, d: &ExactPolynomial) -> Result<(ExactPolynomial, ExactPolynomial)> {
        if d.is_zero() {
            return Err(TorsionError::InvalidArgument("division by the zero polynomial".into()));
        }
        if !self.is_polynomial() || !d.is_polynomial() {
            return Err(TorsionError::InvalidArgument(
                "Euclidean division needs ordinary polynomials".into(),
            ));
        }
        let (q, r) = div_rem_coeffs(&self.coeffs, &d.coeffs);
        Ok((Self::new(q, 0), Self::new(r, 0)))
    }

    /// Remainder modulo an ordinary polynomial `k`; negative powers of x are
    /// interpreted through the inverse of x modulo `k` (needs `k(0) ≠ 0`).
    pub fn rem_mod(&self, k: &ExactPolynomial) -> Result<ExactPolynomial> {
        if self.shift == 0 {
            return Ok(self.div_rem(k)?.1);
        }
        let xinv = x_inverse_mod(k)?;
        let pos = ExactPolynomial::new(self.coeffs.clone(), 0).div_rem(k)?.1;
        let mut fac = ExactPolynomial::one();
        for _ in 0..self.shift {
            fac = (&fac * &xinv).div_rem(k)?.1;
        }
        Ok((&pos * &fac).div_rem(k)?.1)
    }

    /// Exact quotient `self / d`, or `NotDivisible` carrying the remainder.
    /// Laurent inputs are divided on their root polynomials, monomials
    /// being units.
    pub fn divide_exact(&self, d: &ExactPolynomial) -> Result<ExactPolynomial> {
        if d.is_zero() {
            return Err(TorsionError::InvalidArgument("division by the zero polynomial".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (lp, ld) = (self.min_exponent().unwrap(), d.min_exponent().unwrap());
        let (q, r) = self.root_polynomial().div_rem(&d.root_polynomial())?;
        if !r.is_zero() {
            return Err(TorsionError::NotDivisible { remainder: r.to_string() });
        }
        Ok(q.mul_x_pow(lp - ld))
    }

    pub fn divides(&self, p: &ExactPolynomial) -> bool {
        p.divide_exact(self).is_ok()
    }

    /// Monic gcd over the rationals.  Laurent inputs are replaced by their
    /// root polynomials (powers of x are units there).
    pub fn gcd(&self, other: &ExactPolynomial) -> ExactPolynomial {
        let a = if self.is_polynomial() { self.clone() } else { self.root_polynomial() };
        let b = if other.is_polynomial() { other.clone() } else { other.root_polynomial() };
        let mut r0 = a;
        let mut r1 = b;
        while !r1.is_zero() {
            let (_, r) = div_rem_coeffs(&r0.coeffs, &r1.coeffs);
            r0 = r1;
            r1 = ExactPolynomial::new(r, 0).monic();
        }
        r0.monic()
    }

    /// `gcd(f, f') = 1`, tested on the root polynomial.
    pub fn is_square_free(&self) -> bool {
        let f = self.root_polynomial();
        f.gcd(&f.derivative()).degree() == Some(0)
    }

    /// Yun's square-free decomposition of the root polynomial:
    /// `f = lc · Π a_i^i` with each `a_i` monic, square-free and pairwise
    /// coprime.  Constant factors are omitted.
    pub fn square_free_decomposition(&self) -> Vec<(ExactPolynomial, usize)> {
        let f = self.root_polynomial();
        let mut out = Vec::new();
        if f.degree().unwrap_or(0) == 0 {
            return out;
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.divide_exact(&a0).expect("gcd divides");
        let mut c = fp.divide_exact(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.divide_exact(&a).expect("gcd divides");
            c = d.divide_exact(&a).expect("gcd divides");
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// Product of the square-free factors (monic).
    pub fn square_free_part(&self) -> ExactPolynomial {
        self.square_free_decomposition()
            .into_iter()
            .fold(ExactPolynomial::one(), |acc, (f, _)| &acc * &f)
    }

    /// Largest `m` with `d^m | self`.
    pub fn multiplicity_of(&self, d: &ExactPolynomial) -> usize {
        if d.degree().unwrap_or(0) == 0 || self.is_zero() {
            return 0;
        }
        let mut m = 0;
        let mut cur = self.clone();
        while let Ok(q) = cur.divide_exact(d) {
            m += 1;
            cur = q;
        }
        m
    }

    /// True when the coefficients are all integers.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Largest absolute value of a coefficient, as a double.
    pub fn max_abs_coeff(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs.iter().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
}

/// Plain coefficient-vector Euclidean division over the rationals.
fn div_rem_coeffs(a: &[Rational], d: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r: Vec<Rational> = a.to_vec();
    while r.last().is_some_and(|c| c.is_zero()) {
        r.pop();
    }
    let dd = d.len() - 1;
    if r.len() < d.len() {
        return (Vec::new(), r);
    }
    let inv_lead = rat(1) / d[dd].clone();
    let mut q = vec![rat(0); r.len() - dd];
    for i in (0..q.len()).rev() {
        let c = &r[i + dd] * &inv_lead;
        if !c.is_zero() {
            for (j, dj) in d.iter().enumerate() {
                if !dj.is_zero() {
                    let t = &c * dj;
                    r[i + j] -= t;
                }
            }
        }
        q[i] = c;
    }
    r.truncate(dd);
    (q, r)
}

/// Inverse of x modulo `k` (requires `k(0) ≠ 0`).
pub fn x_inverse_mod(k: &ExactPolynomial) -> Result<ExactPolynomial> {
    let c0 = k.coeff(0);
    if !k.is_polynomial() || c0.is_zero() {
        return Err(TorsionError::NotCoprime("x is not invertible modulo k".into()));
    }
    // k = c0 + x·k1  ⇒  x·(−k1/c0) ≡ 1.
    let k1 = ExactPolynomial::new(k.coeffs()[1..].to_vec(), 0);
    Ok(k1.scale(&(-rat(1) / c0)))
}

/// Inverse of `a` modulo `k` by the extended Euclidean algorithm.
pub fn mod_inverse(a: &ExactPolynomial, k: &ExactPolynomial) -> Result<ExactPolynomial> {
    let a = a.rem_mod(k)?;
    if a.is_zero() {
        return Err(TorsionError::NotCoprime("element is zero modulo k".into()));
    }
    let (mut r0, mut r1) = (k.clone(), a);
    let (mut s0, mut s1) = (ExactPolynomial::zero(), ExactPolynomial::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1)?;
        let s = &s0 - &(&q * &s1);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        // Keep the remainder sequence monic to tame coefficient growth.
        if !r1.is_zero() {
            let l = rat(1) / r1.leading_coeff();
            r1 = r1.scale(&l);
            s1 = s1.scale(&l);
        }
    }
    if r0.degree() != Some(0) {
        return Err(TorsionError::NotCoprime(format!("gcd has degree {}", r0.degree().unwrap_or(0))));
    }
    let c = rat(1) / r0.leading_coeff();
    s0.scale(&c).rem_mod(k)
}

/// Power sums `p_j = Σ a^j` over the roots of `k` (with multiplicity) for
/// `j = 0..count`, by Newton's identities.
pub fn power_sums(k: &ExactPolynomial, count: usize) -> Vec<Rational> {
    let k = k.monic();
    let n = k.degree().unwrap_or(0);
    let c = k.coeffs();
    // e-coefficients: k = x^n + c_{n-1} x^{n-1} + … + c_0.
    let cn = |i: usize| -> Rational { if i > n { rat(0) } else { c[n - i].clone() } };
    let mut p: Vec<Rational> = Vec::with_capacity(count);
    for j in 0..count {
        if j == 0 {
            p.push(rat(n as i64));
            continue;
        }
        let mut s = if j <= n { cn(j) * rat(j as i64) } else { rat(0) };
        for i in 1..=(j - 1).min(n) {
            s += cn(i) * &p[j - i];
        }
        p.push(-s);
    }
    p
}

/// `trace(r(C_k))` for the companion matrix `C_k`: `Σ_j r_j p_j`, with `r`
/// first reduced modulo `k`.
pub fn trace_mod(r: &ExactPolynomial, k: &ExactPolynomial) -> Result<Rational> {
    let r = r.rem_mod(k)?;
    let n = k.degree().unwrap_or(0);
    let p = power_sums(k, n.max(1));
    let mut s = rat(0);
    for (j, c) in r.coeffs().iter().enumerate() {
        s += c * &p[j];
    }
    Ok(s)
}

/// `trace(C_k^j)` by explicit companion-matrix powers (independent of the
/// Newton recurrence; cubic cost per power, for cross-checks).
pub fn companion_power_trace(k: &ExactPolynomial, j: usize) -> Rational {
    let k = k.monic();
    let n = k.degree().unwrap_or(0);
    if n == 0 {
        return rat(0);
    }
    let c = k.coeffs();
    // Column convention: C e_i = e_{i+1} (i < n−1), C e_{n−1} = −Σ c_i e_i.
    let mut comp = vec![vec![rat(0); n]; n];
    for i in 0..n - 1 {
        comp[i + 1][i] = rat(1);
    }
    for (i, row) in comp.iter_mut().enumerate() {
        row[n - 1] = -c[i].clone();
    }
    let mut acc: Vec<Vec<Rational>> = (0..n)
        .map(|r| (0..n).map(|s| if r == s { rat(1) } else { rat(0) }).collect())
        .collect();
    for _ in 0..j {
        let mut next = vec![vec![rat(0); n]; n];
        for r in 0..n {
            for t in 0..n {
                if acc[r][t].is_zero() {
                    continue;
                }
                for s in 0..n {
                    if !comp[t][s].is_zero() {
                        next[r][s] += &acc[r][t] * &comp[t][s];
                    }
                }
            }
        }
        acc = next;
    }
    (0..n).fold(rat(0), |s, i| s + &acc[i][i])
}

/// `Σ_{k(a)=0} num(a)/den(a)` exactly, for square-free `k` with `k(0) ≠ 0`
/// and `den` invertible modulo `k`.  Numerator and denominator may be
/// Laurent.
pub fn sum_over_roots_exact(
    k: &ExactPolynomial,
    num: &ExactPolynomial,
    den: &ExactPolynomial,
) -> Result<Rational> {
    check_root_modulus(k)?;
    let inv = mod_inverse(den, k)?;
    let r = (num.rem_mod(k)? * inv).rem_mod(k)?;
    trace_mod(&r, k)
}

fn check_root_modulus(k: &ExactPolynomial) -> Result<()> {
    if k.is_zero() || k.degree() == Some(0) {
        return Err(TorsionError::InvalidArgument("k must have positive degree".into()));
    }
    if !k.is_polynomial() || k.coeff(0).is_zero() {
        return Err(TorsionError::InvalidArgument("k must be a polynomial with k(0) ≠ 0".into()));
    }
    if !k.is_square_free() {
        return Err(TorsionError::NotCoprime("k is not square-free (gcd(k, k′) ≠ 1)".into()));
    }
    Ok(())
}

/// Which route [`sum_rational_over_roots_exact_detailed`] used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ResidueRoute {
    /// `(1+x^ε)^η g · (D′)^{-1} mod k` with `D = (1+x^ε)^η k`.
    Literal,
    /// Wrapper shares roots with k; cancelled to `g · (k′)^{-1} mod k`.
    Cancelled,
}

/// The summand of the residue lemma: `Σ_{k(a)=0} (1+a^ε)^η g(a) / D′(a)`
/// where `D = (1+x^ε)^η k`.
pub fn sum_rational_over_roots_exact(
    k: &ExactPolynomial,
    g: &ExactPolynomial,
    eta: u32,
    eps: u32,
) -> Result<Rational> {
    sum_rational_over_roots_exact_detailed(k, g, eta, eps).map(|(v, _)| v)
}

pub fn residue_wrapper(eta: u32, eps: u32) -> ExactPolynomial {
    ExactPolynomial::from_terms(&[(0, 1), (eps as i64, 1)]).pow(eta)
}

pub fn sum_rational_over_roots_exact_detailed(
    k: &ExactPolynomial,
    g: &ExactPolynomial,
    eta: u32,
    eps: u32,
) -> Result<(Rational, ResidueRoute)> {
    if eta > 2 || !(1..=2).contains(&eps) {
        return Err(TorsionError::InvalidArgument(format!("η={eta}, ε={eps} out of range")));
    }
    check_root_modulus(k)?;
    let w = residue_wrapper(eta, eps);
    let d = &w * k;
    let dp = d.derivative().rem_mod(k)?;
    if k.gcd(&dp).degree() == Some(0) {
        let inv = mod_inverse(&dp, k)?;
        let r = ((&w * g).rem_mod(k)? * inv).rem_mod(k)?;
        Ok((trace_mod(&r, k)?, ResidueRoute::Literal))
    } else {
        let inv = mod_inverse(&k.derivative(), k)?;
        let r = (g.rem_mod(k)? * inv).rem_mod(k)?;
        Ok((trace_mod(&r, k)?, ResidueRoute::Cancelled))
    }
}

impl fmt::Display for ExactPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let cs = rational_to_string(&a);
            match (e, a.is_one()) {
                (0, _) => write!(f, "{cs}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{cs}*x")?,
                (_, true) => write!(f, "x^{e}")?,
                (_, false) => write!(f, "{cs}*x^{e}")?,
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<ExactPolynomial> for ExactPolynomial {
            type Output = ExactPolynomial;
            fn $m(self, o: ExactPolynomial) -> ExactPolynomial {
                (&self).$m(&o)
            }
        }
        impl $tr<&ExactPolynomial> for ExactPolynomial {
            type Output = ExactPolynomial;
            fn $m(self, o: &ExactPolynomial) -> ExactPolynomial {
                (&self).$m(o)
            }
        }
        impl $tr<ExactPolynomial> for &ExactPolynomial {
            type Output = ExactPolynomial;
            fn $m(self, o: ExactPolynomial) -> ExactPolynomial {
                self.$m(&o)
            }
        }
    };
}

impl Add<&ExactPolynomial> for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn add(self, o: &ExactPolynomial) -> ExactPolynomial {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let s = self.shift.max(o.shift);
        let (da, db) = ((s - self.shift) as usize, (s - o.shift) as usize);
        let len = (self.coeffs.len() + da).max(o.coeffs.len() + db);
        let mut c = vec![rat(0); len];
        for (i, v) in self.coeffs.iter().enumerate() {
            c[i + da] += v;
        }
        for (i, v) in o.coeffs.iter().enumerate() {
            c[i + db] += v;
        }
        ExactPolynomial::new(c, s)
    }
}

impl Sub<&ExactPolynomial> for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn sub(self, o: &ExactPolynomial) -> ExactPolynomial {
        self + &(-o)
    }
}

impl Mul<&ExactPolynomial> for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn mul(self, o: &ExactPolynomial) -> ExactPolynomial {
        if self.is_zero() || o.is_zero() {
            return ExactPolynomial::zero();
        }
        let mut c = vec![rat(0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        ExactPolynomial::new(c, self.shift + o.shift)
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn neg(self) -> ExactPolynomial {
        ExactPolynomial { coeffs: self.coeffs.iter().map(|c| -c).collect(), shift: self.shift }
    }
}

impl Neg for ExactPolynomial {
    type Output = ExactPolynomial;
    fn neg(self) -> ExactPolynomial {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    shift: u32,
    coeffs: Vec<String>,
}

impl Serialize for ExactPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson { shift: self.shift, coeffs: self.coeffs.iter().map(rational_to_string).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(ExactPolynomial::new(coeffs, j.shift))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> ExactPolynomial {
        ExactPolynomial::from_i64s(c)
    }

    #[test]
    fn square_of_one_plus_x() {
        assert_eq!(&p(&[1, 1]) * &p(&[1, 1]), p(&[1, 2, 1]));
    }

    #[test]
    fn zero_absorbs() {
        assert!((&p(&[3, 0, 5]) * &ExactPolynomial::zero()).is_zero());
    }

    #[test]
    fn laurent_shift_canonicalises() {
        let a = ExactPolynomial::from_terms(&[(-2, 1), (-1, 0), (3, 4)]);
        assert_eq!(a.shift(), 2);
        assert_eq!(a.min_exponent(), Some(-2));
        let b = ExactPolynomial::from_terms(&[(-2, 1), (-2, -1), (1, 1)]);
        assert_eq!(b, ExactPolynomial::x());
        assert_eq!(b.shift(), 0);
    }

    #[test]
    fn laurent_product_adds_shifts() {
        let a = ExactPolynomial::from_terms(&[(-1, 1), (1, 1)]);
        let sq = &a * &a;
        assert_eq!(sq, ExactPolynomial::from_terms(&[(-2, 1), (0, 2), (2, 1)]));
    }

    #[test]
    fn derivative_power_rule() {
        assert_eq!(p(&[0, 0, 1, 0, 2, 0, 1]).derivative(), p(&[0, 2, 0, 8, 0, 6]));
        assert!(p(&[7]).derivative().is_zero());
        // d/dx x^{-2} = −2 x^{-3}
        let d = ExactPolynomial::monomial(-2, rat(1)).derivative();
        assert_eq!(d, ExactPolynomial::monomial(-3, rat(-2)));
    }

    #[test]
    fn reverse_small() {
        assert_eq!(p(&[1, 2, 3]).reverse(), p(&[3, 2, 1]));
    }

    #[test]
    fn gcd_examples() {
        let f = p(&[2, 4]);
        assert_eq!(f.gcd(&ExactPolynomial::zero()), p(&[1, 2]).monic());
        let a = &(&p(&[1, 1]) * &p(&[1, 1])) * &p(&[1, -1]);
        assert_eq!(a.gcd(&p(&[1, 1])), p(&[1, 1]));
    }

    #[test]
    fn exact_division_and_remainder() {
        let a = &p(&[1, 1]) * &p(&[3, 0, 2]);
        assert_eq!(a.divide_exact(&p(&[1, 1])).unwrap(), p(&[3, 0, 2]));
        assert!(matches!(a.divide_exact(&p(&[2, 1])), Err(TorsionError::NotDivisible { .. })));
        assert_eq!(a.divide_exact(&ExactPolynomial::one()).unwrap(), a);
    }

    #[test]
    fn yun_decomposition() {
        let f = &(&p(&[1, 1]).pow(3) * &p(&[-2, 0, 1])) * &p(&[5, 1]).pow(2);
        let dec = f.square_free_decomposition();
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0], (p(&[-2, 0, 1]), 1));
        assert_eq!(dec[1], (p(&[5, 1]), 2));
        assert_eq!(dec[2], (p(&[1, 1]), 3));
    }

    #[test]
    fn yun_with_negative_leading_coefficient() {
        let f = &p(&[1, 0, 1]).pow(2) * &p(&[-1, 0, 2, 0, 3, 0, -1]);
        let dec = f.square_free_decomposition();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[1], (p(&[1, 0, 1]), 2));
        assert_eq!(f.square_free_part().degree(), Some(8));
    }

    #[test]
    fn inverse_mod() {
        let k = p(&[1, 0, 1]);
        let inv = mod_inverse(&p(&[1, 1]), &k).unwrap();
        let prod = (&inv * &p(&[1, 1])).rem_mod(&k).unwrap();
        assert!(prod.is_one());
        assert!(mod_inverse(&p(&[1, 1]), &p(&[-1, 0, 1])).is_err());
    }

    #[test]
    fn negative_powers_reduce_through_x_inverse() {
        let k = p(&[2, -3, 1]); // roots 1, 2
        let r = ExactPolynomial::monomial(-1, rat(1)).rem_mod(&k).unwrap();
        // Σ 1/a over {1,2} = 3/2
        assert_eq!(trace_mod(&r, &k).unwrap(), ratio(3, 2));
    }

    #[test]
    fn newton_sums_match_companion_powers() {
        let k = p(&[3, -1, 4, 1, -5, 9, 2]);
        let ps = power_sums(&k, 10);
        for (j, v) in ps.iter().enumerate() {
            assert_eq!(*v, companion_power_trace(&k, j), "j={j}");
        }
    }

    #[test]
    fn odd_symmetry_sum_vanishes() {
        let k = p(&[-2, 0, 1]);
        assert_eq!(sum_rational_over_roots_exact(&k, &p(&[1]), 0, 1).unwrap(), rat(0));
    }

    #[test]
    fn sum_over_quadratic_roots() {
        // Σ a over roots of x²−3x+2 = 3.
        let k = p(&[2, -3, 1]);
        let v = sum_over_roots_exact(&k, &ExactPolynomial::x(), &ExactPolynomial::one()).unwrap();
        assert_eq!(v, rat(3));
    }

    #[test]
    fn non_square_free_k_rejected() {
        let k = p(&[1, 2, 1]);
        assert!(matches!(
            sum_rational_over_roots_exact(&k, &p(&[1]), 0, 1),
            Err(TorsionError::NotCoprime(_))
        ));
    }

    #[test]
    fn gaussian_evaluation() {
        let f = p(&[1, 2, 3, 4]); // 1 + 2i − 3 − 4i
        assert_eq!(f.eval_at_i(1), (rat(-2), rat(-2)));
        assert_eq!(f.eval_at_i(-1), (rat(-2), rat(2)));
        let g = ExactPolynomial::monomial(-1, rat(1)); // 1/i = −i
        assert_eq!(g.eval_at_i(1), (rat(0), rat(-1)));
    }

    #[test]
    fn json_round_trip() {
        let a = ExactPolynomial::new(vec![ratio(1, 2), rat(0), rat(-3)], 1);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"shift":1,"coeffs":["1/2","0","-3"]}"#);
        let b: ExactPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn display_laurent() {
        let a = ExactPolynomial::from_terms(&[(-1, 2), (0, -1), (3, 1)]);
        assert_eq!(a.to_string(), "2*x^-1 - 1 + x^3");
    }
}
