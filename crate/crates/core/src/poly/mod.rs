//! Exact multivariate polynomials over ℚ.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! lex with the *last* variable heaviest (x_d > … > x_1). The leading term is
//! therefore the map's last entry.

mod interval;
mod linear;
mod text;

pub use interval::{eval_box, sign_at, sign_on_box, Fi, RInterval, Sign, SignEval};
pub use linear::{inverse as inverse_q, pullback, rank as rank_q, shear, LinearMap, MapKind};
pub use text::parse_poly;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    /// `o / self`, assuming `self` divides `o`.
    pub fn quotient_of(&self, o: &Monomial) -> Monomial {
        Monomial(o.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// `Some(D)` if this monomial is `x_i^D` with D ≥ 1.
    pub fn pure_power_of(&self, i: usize) -> Option<u32> {
        let only_i = self.0.iter().enumerate().all(|(j, &e)| j == i || e == 0);
        (only_i && self.0[i] > 0).then_some(self.0[i])
    }

    /// Variables with nonzero exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len());
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        MPoly::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} vars");
        MPoly::monomial(Monomial::var(nvars, i), Q::one())
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let nvars = m.nvars();
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = MPoly::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars);
            p.add_term(m, c);
        }
        p
    }

    /// Affine form `c0 + Σ a_i x_i`.
    pub fn affine(c0: Q, coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut p = MPoly::constant(n, c0);
        for (i, a) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), a.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] > 0)
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn leading_coeff(&self) -> Option<&Q> {
        self.terms.values().next_back()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// `c · m · self`
    pub fn mul_term(&self, m: &Monomial, c: &Q) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, v)| (t.mul(m), v * c)).collect(),
        }
    }

    /// `self -= c · m · g`, in place.
    pub fn sub_mul_term(&mut self, g: &MPoly, m: &Monomial, c: &Q) {
        for (t, v) in &g.terms {
            self.add_term(t.mul(m), -(v * c));
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn monic(&self) -> MPoly {
        match self.leading_coeff() {
            Some(lc) => self.scale(&lc.recip()),
            None => self.clone(),
        }
    }

    /// Divides out the rational content so coefficients become coprime
    /// integers with a positive leading coefficient.
    pub fn primitive(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = Q::new(num_gcd, den_lcm);
        if self.leading_coeff().unwrap().is_negative() {
            content = -content;
        }
        self.scale(&content.recip())
    }

    pub fn derivative(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut dm = m.clone();
                dm.0[i] -= 1;
                out.add_term(dm, c * Q::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: n,
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[Q]) -> Result<Q> {
        self.check_dim(x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Q]) -> Q {
        // Accumulate over a common denominator so the hot loop stays in ℤ.
        let dens: Vec<BigInt> = x.iter().map(|v| v.denom().clone()).collect();
        let nums: Vec<BigInt> = x.iter().map(|v| v.numer().clone()).collect();
        let degs: Vec<u32> = (0..self.nvars).map(|i| self.degree_in(i)).collect();
        let pw = |base: &BigInt, e: u32| -> Vec<BigInt> {
            let mut v = Vec::with_capacity(e as usize + 1);
            v.push(BigInt::one());
            for k in 0..e as usize {
                let nxt = &v[k] * base;
                v.push(nxt);
            }
            v
        };
        let np: Vec<Vec<BigInt>> = nums.iter().zip(&degs).map(|(b, &e)| pw(b, e)).collect();
        let dp: Vec<Vec<BigInt>> = dens.iter().zip(&degs).map(|(b, &e)| pw(b, e)).collect();
        // value = Σ c_m Π n_i^{e_i} d_i^{D_i - e_i} / Π d_i^{D_i}
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = BigInt::one();
            for i in 0..self.nvars {
                let e = m.0[i];
                if e > 0 {
                    t *= &np[i][e as usize];
                }
                let rest = degs[i] - e;
                if rest > 0 {
                    t *= &dp[i][rest as usize];
                }
            }
            acc += c * Q::from_integer(t);
        }
        let mut den = BigInt::one();
        for i in 0..self.nvars {
            den *= &dp[i][degs[i] as usize];
        }
        acc / Q::from_integer(den)
    }

    /// Floating-point evaluation (no guarantees; used by heuristics only).
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = to_f64(c);
                for (i, &e) in m.0.iter().enumerate() {
                    if e > 0 {
                        t *= x[i].powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Substitutes `x_i ↦ forms[i]` (all forms share one variable count).
    pub fn compose(&self, forms: &[MPoly]) -> MPoly {
        assert_eq!(forms.len(), self.nvars);
        let m = forms.first().map(|f| f.nvars).unwrap_or(0);
        let powers: Vec<Vec<MPoly>> = forms
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let dmax = self.degree_in(i);
                let mut v = vec![MPoly::one(m)];
                for k in 0..dmax as usize {
                    let nxt = &v[k] * f;
                    v.push(nxt);
                }
                v
            })
            .collect();
        let mut out = MPoly::zero(m);
        for (mono, c) in &self.terms {
            let mut t = MPoly::constant(m, c.clone());
            for (i, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            for (tm, tc) in t.terms {
                out.add_term(tm, tc);
            }
        }
        out
    }

    /// Re-embeds into `n ≥ nvars` variables (extra variables unused).
    pub fn extend_vars(&self, n: usize) -> MPoly {
        assert!(n >= self.nvars);
        MPoly {
            nvars: n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(n, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Drops trailing variables that must not occur in the polynomial.
    pub fn restrict_vars(&self, n: usize) -> MPoly {
        assert!(self.terms.keys().all(|m| m.0[n..].iter().all(|&e| e == 0)));
        MPoly {
            nvars: n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial(m.0[..n].to_vec()), c.clone()))
                .collect(),
        }
    }

    pub fn product(nvars: usize, factors: &[MPoly]) -> MPoly {
        let mut acc = MPoly::one(nvars);
        for f in factors {
            acc = &acc * f;
        }
        acc
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for MPoly {
            type Output = MPoly;
            fn $f(self, o: MPoly) -> MPoly {
                (&self).$f(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::format_poly(self))
    }
}

impl serde::Serialize for MPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct Repr<'a> {
            nvars: usize,
            poly: &'a str,
        }
        Repr {
            nvars: self.nvars,
            poly: &self.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for MPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Repr {
            nvars: usize,
            poly: String,
        }
        let r = Repr::deserialize(d)?;
        parse_poly(&r.poly, r.nvars).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests;
