//! Free-group words, integral group rings, Fox derivatives, and the surgery
//! presentations with their identity words W in P∗F.
//!
//! Generator indices: x1 = 0, x2 = 1, the meridian 𝔪 = x3 = 2 and, in the
//! 1/q families, the longitude copy 𝔪′ = x4 = 3.  Words in P∗F reuse
//! [`GroupWord`] with relator letters ρ_k encoded as generator `g + k`.

use crate::error::{Result, TorsionError};
use crate::family::{Family, Manifold};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub const X1: usize = 0;
pub const X2: usize = 1;
pub const MERIDIAN: usize = 2;
pub const MERIDIAN_PRIME: usize = 3;

/// One letter `x_gen^{±1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub exp: i8,
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    /// Reduce an arbitrary letter sequence.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            assert!(l.exp == 1 || l.exp == -1, "letters carry exponent ±1");
            if out.last().is_some_and(|t| t.gen == l.gen && t.exp == -l.exp) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord { letters: out }
    }

    pub fn gen(i: usize) -> Self {
        GroupWord { letters: vec![Letter { gen: i, exp: 1 }] }
    }

    /// `x_i^n`.
    pub fn gen_pow(i: usize, n: i64) -> Self {
        let exp = if n >= 0 { 1 } else { -1 };
        GroupWord { letters: vec![Letter { gen: i, exp }; n.unsigned_abs() as usize] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, o: &GroupWord) -> GroupWord {
        GroupWord::new(self.letters.iter().chain(o.letters.iter()).copied())
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            letters: self.letters.iter().rev().map(|l| Letter { gen: l.gen, exp: -l.exp }).collect(),
        }
    }

    pub fn pow(&self, n: i64) -> GroupWord {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut acc = GroupWord::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// `[u, v] = u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &GroupWord, v: &GroupWord) -> GroupWord {
        u.mul(v).mul(&u.inverse()).mul(&v.inverse())
    }

    /// `u X u⁻¹`.
    pub fn conjugate(u: &GroupWord, x: &GroupWord) -> GroupWord {
        u.mul(x).mul(&u.inverse())
    }

    /// Product of words.
    pub fn product<'a>(ws: impl IntoIterator<Item = &'a GroupWord>) -> GroupWord {
        ws.into_iter().fold(GroupWord::identity(), |a, w| a.mul(w))
    }

    /// Substitute a word for every generator (a homomorphism of free groups).
    pub fn substitute(&self, images: &[GroupWord]) -> GroupWord {
        let mut out = Vec::new();
        for l in &self.letters {
            let img = &images[l.gen];
            if l.exp == 1 {
                out.extend(img.letters.iter().copied());
            } else {
                out.extend(img.inverse().letters);
            }
        }
        GroupWord::new(out)
    }

    /// Render in the compact syntax, naming generators with `name`.
    pub fn render_with(&self, name: impl Fn(usize) -> String) -> String {
        if self.letters.is_empty() {
            return "1".into();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let n = (j - i) as i64 * l.exp as i64;
            if n == 1 {
                parts.push(name(l.gen));
            } else {
                parts.push(format!("{}^{}", name(l.gen), n));
            }
            i = j;
        }
        parts.join(" ")
    }

    /// Parse the compact syntax `x1 x2^-1 x3^5` (`1` is the empty word).
    pub fn parse(s: &str) -> Result<GroupWord> {
        Self::parse_with(s, |tok| {
            tok.strip_prefix('x')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .map(|k| k - 1)
        })
    }

    pub fn parse_with(s: &str, resolve: impl Fn(&str) -> Option<usize>) -> Result<GroupWord> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, n) = match tok.split_once('^') {
                Some((a, e)) => {
                    (a, e.parse::<i64>().map_err(|_| TorsionError::Parse(format!("bad exponent in {tok:?}")))?)
                }
                None => (tok, 1),
            };
            let g = resolve(name).ok_or_else(|| TorsionError::Parse(format!("unknown letter {name:?}")))?;
            let exp = if n >= 0 { 1 } else { -1 };
            letters.extend(std::iter::repeat(Letter { gen: g, exp }).take(n.unsigned_abs() as usize));
        }
        Ok(GroupWord::new(letters))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(|g| format!("x{}", g + 1)))
    }
}

impl Serialize for GroupWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        GroupWord::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Finite ℤ-linear combination of words; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupRingElement {
    terms: BTreeMap<GroupWord, BigInt>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(GroupWord::identity())
    }

    pub fn from_word(w: GroupWord) -> Self {
        let mut t = BTreeMap::new();
        t.insert(w, BigInt::one());
        GroupRingElement { terms: t }
    }

    pub fn terms(&self) -> &BTreeMap<GroupWord, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: GroupWord, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            let keys: Vec<GroupWord> =
                self.terms.iter().filter(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).collect();
            for k in keys {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, o: &GroupRingElement) -> GroupRingElement {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> GroupRingElement {
        GroupRingElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &GroupRingElement) -> GroupRingElement {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &GroupRingElement) -> GroupRingElement {
        let mut r = GroupRingElement::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                r.add_term(a.mul(b), ca * cb);
            }
        }
        r
    }

    /// Apply a free-group homomorphism to every word.
    pub fn substitute(&self, images: &[GroupWord]) -> GroupRingElement {
        let mut r = GroupRingElement::zero();
        for (w, c) in &self.terms {
            r.add_term(w.substitute(images), c.clone());
        }
        r
    }

    /// Sum of the coefficients (augmentation).
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("{c}·({w})")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Fox derivative ∂w/∂x_i: prefix sums, with `−(prefix·x_i⁻¹)` for inverse
/// letters.
pub fn fox_derivative(w: &GroupWord, i: usize) -> GroupRingElement {
    let mut r = GroupRingElement::zero();
    let mut prefix: Vec<Letter> = Vec::new();
    for &l in w.letters() {
        if l.gen == i {
            if l.exp == 1 {
                r.add_term(GroupWord::new(prefix.iter().copied()), BigInt::one());
            } else {
                let mut p = prefix.clone();
                p.push(l);
                r.add_term(GroupWord::new(p), -BigInt::one());
            }
        }
        prefix.push(l);
    }
    r
}

/// Where a presentation's W-word came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WProvenance {
    /// Transcribed from the printed identity word.
    Printed,
    /// Printed 1/q word adapted to p/1 by dropping ρ4 and reading 𝔪′ as [x1,x2].
    CandidateAdapted,
    /// Identity word built for the p/1 presentation: V · ρ3 · 𝔪 ρ3⁻¹ 𝔪⁻¹.
    Derived,
}

/// Outcome of the ψ(W) = 1 check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WValidation {
    pub provenance: WProvenance,
    pub w: String,
    pub reduces_to_identity: bool,
    /// ψ(W) after free reduction.
    pub psi_w: String,
    pub psi_w_length: usize,
}

/// Presentation of π₁ of a surgery manifold with its identity word.
#[derive(Clone, Debug, PartialEq)]
pub struct SurgeryPresentation {
    pub manifold: Manifold,
    pub generators: usize,
    pub relators: Vec<GroupWord>,
    /// W ∈ P∗F; relator letter ρ_k is encoded as generator `generators + k`.
    pub w: GroupWord,
    pub w_provenance: WProvenance,
    /// Every candidate W that was tried, in order.
    pub w_candidates: Vec<WValidation>,
}

impl SurgeryPresentation {
    /// Name of generator or relator letter `idx` in P∗F.
    pub fn letter_name(&self, idx: usize) -> String {
        if idx < self.generators {
            format!("x{}", idx + 1)
        } else {
            format!("r{}", idx - self.generators + 1)
        }
    }

    pub fn render_w(&self) -> String {
        self.w.render_with(|i| self.letter_name(i))
    }

    /// ψ: substitute r_k for ρ_k.
    pub fn psi_images(&self) -> Vec<GroupWord> {
        (0..self.generators)
            .map(GroupWord::gen)
            .chain(self.relators.iter().cloned())
            .collect()
    }

    /// ψ(W) after free reduction.
    pub fn psi(&self, w: &GroupWord) -> GroupWord {
        w.substitute(&self.psi_images())
    }
}

fn rho(g: usize, k: usize, e: i64) -> GroupWord {
    GroupWord::gen_pow(g + k, e)
}

fn x(i: usize) -> GroupWord {
    GroupWord::gen(i)
}

/// The relators of a family, as printed with 𝔪 ↦ x3 and 𝔪′ ↦ x4.
pub fn relators(m: &Manifold) -> Result<Vec<GroupWord>> {
    m.validate()?;
    let n = m.parameter;
    let mm = x(MERIDIAN);
    Ok(match m.family {
        Family::FigureEightP | Family::FigureEightQ => {
            let (a, b) = (x(X1), x(X2));
            let r1 = GroupWord::product([&mm, &a, &b, &mm.inverse(), &a.inverse()]);
            let r2 = GroupWord::product([&mm, &b, &a, &b, &mm.inverse(), &b.inverse()]);
            let c = GroupWord::commutator(&a, &b);
            if m.family == Family::FigureEightP {
                vec![r1, r2, c.mul(&mm.pow(n))]
            } else {
                vec![r1, r2, mm.mul(&c.pow(n)), x(MERIDIAN_PRIME).mul(&c.inverse())]
            }
        }
        Family::FiveTwoQ => {
            let (a2, b) = (x(X1).pow(2), x(X2));
            let r1 = GroupWord::product([&mm, &a2, &b.inverse(), &mm.inverse(), &a2.inverse()]);
            let r2 = GroupWord::product([&mm, &b.inverse(), &mm.inverse(), &x(X1).inverse(), &b]);
            let ell = longitude_word(Family::FiveTwoQ);
            vec![r1, r2, mm.mul(&ell.pow(n)), x(MERIDIAN_PRIME).mul(&ell.inverse())]
        }
    })
}

/// The word whose eigenvalue is the coordinate a in the 1/q families:
/// [x1,x2] for 4_1 and [x1², x2⁻¹] for 5_2.
pub fn longitude_word(f: Family) -> GroupWord {
    match f {
        Family::FigureEightP | Family::FigureEightQ => GroupWord::commutator(&x(X1), &x(X2)),
        Family::FiveTwoQ => GroupWord::commutator(&x(X1).pow(2), &x(X2).inverse()),
    }
}

/// Common first four factors of the 4_1 identity words.
fn fig8_prefix(g: usize) -> GroupWord {
    let (a, b) = (x(X1), x(X2));
    let t2 = GroupWord::product([&a, &b, &a.inverse()]);
    let c = GroupWord::commutator(&a, &b);
    GroupWord::product([
        &rho(g, 0, 1),
        &GroupWord::conjugate(&a, &rho(g, 1, 1)),
        &GroupWord::conjugate(&t2, &rho(g, 0, -1)),
        &GroupWord::conjugate(&c, &rho(g, 1, -1)),
    ])
}

/// Tail `ρ4⁻¹ · u ρ3 u⁻¹ · ρ4 · ρ3⁻¹`, shared by the printed 1/q words.
fn one_over_q_tail(g: usize, u: &GroupWord) -> GroupWord {
    GroupWord::product([
        &rho(g, 3, -1),
        &GroupWord::conjugate(u, &rho(g, 2, 1)),
        &rho(g, 3, 1),
        &rho(g, 2, -1),
    ])
}

/// Candidate identity words for a family, in order of preference.
pub fn w_candidates(f: Family) -> Vec<(WProvenance, GroupWord)> {
    let g = f.generator_count();
    match f {
        Family::FigureEightQ => {
            vec![(WProvenance::Printed, fig8_prefix(g).mul(&one_over_q_tail(g, &x(MERIDIAN_PRIME))))]
        }
        Family::FiveTwoQ => {
            let (a, b) = (x(X1), x(X2));
            let u1 = a.pow(2);
            let u2 = GroupWord::product([&a.pow(2), &b.inverse(), &a.inverse()]);
            let u3 = GroupWord::product([&a.pow(2), &b.inverse(), &a.pow(-2), &b]);
            let w = GroupWord::product([
                &rho(g, 0, 1),
                &GroupWord::conjugate(&u1, &rho(g, 1, 1)),
                &GroupWord::conjugate(&u2, &rho(g, 0, -1)),
                &GroupWord::conjugate(&u3, &rho(g, 1, -1)),
                &one_over_q_tail(g, &x(MERIDIAN_PRIME)),
            ]);
            vec![(WProvenance::Printed, w)]
        }
        Family::FigureEightP => {
            let c = GroupWord::commutator(&x(X1), &x(X2));
            // Printed 1/q word with the ρ4 letters deleted and 𝔪′ read as [x1,x2].
            let adapted = GroupWord::product([
                &fig8_prefix(g),
                &GroupWord::conjugate(&c, &rho(g, 2, 1)),
                &rho(g, 2, -1),
            ]);
            let mm = x(MERIDIAN);
            let derived = GroupWord::product([
                &fig8_prefix(g),
                &rho(g, 2, 1),
                &GroupWord::conjugate(&mm, &rho(g, 2, -1)),
            ]);
            vec![(WProvenance::CandidateAdapted, adapted), (WProvenance::Derived, derived)]
        }
    }
}

/// Build the presentation; the first candidate W whose ψ-image reduces to
/// the identity is attached (the last candidate if none does).
pub fn build_presentation(m: &Manifold) -> Result<SurgeryPresentation> {
    let rels = relators(m)?;
    let g = m.family.generator_count();
    let mut p = SurgeryPresentation {
        manifold: *m,
        generators: g,
        relators: rels,
        w: GroupWord::identity(),
        w_provenance: WProvenance::Printed,
        w_candidates: Vec::new(),
    };
    let cands = w_candidates(m.family);
    let mut chosen = None;
    for (prov, w) in cands {
        p.w = w.clone();
        p.w_provenance = prov;
        let v = validate_w_word(&p);
        let ok = v.reduces_to_identity;
        p.w_candidates.push(v);
        if ok && chosen.is_none() {
            chosen = Some((prov, w));
        }
    }
    if let Some((prov, w)) = chosen {
        p.w = w;
        p.w_provenance = prov;
    }
    Ok(p)
}

/// Report whether ψ(W) freely reduces to the empty word.
pub fn validate_w_word(p: &SurgeryPresentation) -> WValidation {
    let img = p.psi(&p.w);
    WValidation {
        provenance: p.w_provenance,
        w: p.render_w(),
        reduces_to_identity: img.is_identity(),
        psi_w: img.to_string(),
        psi_w_length: img.len(),
    }
}

/// Symbolic differentials of the cochain complex
/// `𝔤 →δ³ 𝔤^g →δ² 𝔤^g →δ¹ 𝔤`.
#[derive(Clone, Debug, PartialEq)]
pub struct Differentials {
    /// δ¹_j = 1 − x_j (a 1×g row).
    pub d1: Vec<GroupRingElement>,
    /// δ²[i][j] = ∂r_j/∂x_i (g×g).
    pub d2: Vec<Vec<GroupRingElement>>,
    /// δ³_i = ψ(∂W/∂ρ_i) (a g×1 column).
    pub d3: Vec<GroupRingElement>,
}

pub fn symbolic_differentials(p: &SurgeryPresentation) -> Differentials {
    let g = p.generators;
    let d1 = (0..g)
        .map(|j| GroupRingElement::one().sub(&GroupRingElement::from_word(x(j))))
        .collect();
    let d2 = (0..g)
        .map(|i| (0..g).map(|j| fox_derivative(&p.relators[j], i)).collect())
        .collect();
    let images = p.psi_images();
    let d3 = (0..g).map(|k| fox_derivative(&p.w, g + k).substitute(&images)).collect();
    Differentials { d1, d2, d3 }
}

#[derive(Serialize)]
struct PresentationJson<'a> {
    family: Family,
    parameter: i64,
    generators: usize,
    relators: Vec<String>,
    w_word: String,
    w_provenance: WProvenance,
    w_candidates: &'a [WValidation],
}

impl Serialize for SurgeryPresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PresentationJson {
            family: self.manifold.family,
            parameter: self.manifold.parameter,
            generators: self.generators,
            relators: self.relators.iter().map(|r| r.to_string()).collect(),
            w_word: self.render_w(),
            w_provenance: self.w_provenance,
            w_candidates: &self.w_candidates,
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> GroupWord {
        GroupWord::parse(s).unwrap()
    }

    fn ring(terms: &[(&str, i64)]) -> GroupRingElement {
        let mut r = GroupRingElement::zero();
        for (s, c) in terms {
            r.add_term(w(s), BigInt::from(*c));
        }
        r
    }

    #[test]
    fn parse_and_render() {
        let a = w("x1 x2^-1 x3^5");
        assert_eq!(a.len(), 7);
        assert_eq!(a.to_string(), "x1 x2^-1 x3^5");
        assert_eq!(w("x1 x1^-1").to_string(), "1");
        assert!(GroupWord::parse("y1").is_err());
    }

    #[test]
    fn fox_of_generator() {
        assert_eq!(fox_derivative(&w("x1"), 0), GroupRingElement::one());
        assert!(fox_derivative(&w("x2"), 0).is_zero());
    }

    #[test]
    fn fox_of_conjugate() {
        // ∂(x1 x2 x1⁻¹)/∂x1 = 1 − x1 x2 x1⁻¹
        assert_eq!(fox_derivative(&w("x1 x2 x1^-1"), 0), ring(&[("1", 1), ("x1 x2 x1^-1", -1)]));
    }

    #[test]
    fn fox_of_power() {
        assert_eq!(
            fox_derivative(&w("x1^4"), 0),
            ring(&[("1", 1), ("x1", 1), ("x1^2", 1), ("x1^3", 1)])
        );
        assert_eq!(fox_derivative(&w("x1^-1"), 0), ring(&[("x1^-1", -1)]));
    }

    #[test]
    fn printed_relators() {
        let p = build_presentation(&Manifold::fig8_p(5)).unwrap();
        assert_eq!(p.generators, 3);
        assert_eq!(p.relators[2], w("x1 x2 x1^-1 x2^-1 x3^5"));
        let q = build_presentation(&Manifold::fig8_q(2)).unwrap();
        assert_eq!(q.relators[2], w("x3 x1 x2 x1^-1 x2^-1 x1 x2 x1^-1 x2^-1"));
        assert_eq!(q.relators[3], w("x4 x2 x1 x2^-1 x1^-1"));
        let f = build_presentation(&Manifold::five_two_q(3)).unwrap();
        assert_eq!(f.relators[1], w("x3 x2^-1 x3^-1 x1^-1 x2"));
    }

    #[test]
    fn trivially_reducing_w() {
        let mut p = build_presentation(&Manifold::fig8_q(1)).unwrap();
        p.w = GroupWord::new([Letter { gen: 4, exp: 1 }, Letter { gen: 4, exp: -1 }]);
        assert!(validate_w_word(&p).reduces_to_identity);
    }

    #[test]
    fn delta_one_row() {
        let p = build_presentation(&Manifold::fig8_p(3)).unwrap();
        let d = symbolic_differentials(&p);
        for (j, e) in d.d1.iter().enumerate() {
            assert_eq!(*e, ring(&[("1", 1), (&format!("x{}", j + 1), -1)]));
        }
    }
}
