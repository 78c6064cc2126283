//! Certified sign evaluation: exact rational intervals plus an outward-rounded
//! f64 pre-pass. Every sign this module reports is a proof, never a guess.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::MPoly;
use crate::rational::{enclose, pow2, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of(q: &Q) -> Sign {
        if q.is_positive() {
            Sign::Pos
        } else if q.is_negative() {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }

    pub fn mul(self, o: Sign) -> Sign {
        match (self, o) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Pos,
            _ => Sign::Neg,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RInterval {
    #[serde(with = "crate::rational::ser")]
    pub lo: Q,
    #[serde(with = "crate::rational::ser")]
    pub hi: Q,
}

impl RInterval {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "empty interval");
        RInterval { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        RInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Some(sign)` when the interval excludes zero.
    pub fn strict_sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Pos)
        } else if self.hi.is_negative() {
            Some(Sign::Neg)
        } else {
            None
        }
    }

    pub fn add(&self, o: &RInterval) -> RInterval {
        RInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn scale(&self, c: &Q) -> RInterval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            RInterval { lo: a, hi: b }
        } else {
            RInterval { lo: b, hi: a }
        }
    }

    pub fn mul(&self, o: &RInterval) -> RInterval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RInterval { lo, hi }
    }

    pub fn pow(&self, e: u32) -> RInterval {
        if e == 0 {
            return RInterval::point(Q::one());
        }
        let pl = num_traits::pow(self.lo.clone(), e as usize);
        let ph = num_traits::pow(self.hi.clone(), e as usize);
        if e % 2 == 1 {
            RInterval { lo: pl, hi: ph }
        } else if self.contains_zero() {
            RInterval {
                lo: Q::zero(),
                hi: pl.max(ph),
            }
        } else if pl <= ph {
            RInterval { lo: pl, hi: ph }
        } else {
            RInterval { lo: ph, hi: pl }
        }
    }
}

/// Term-wise exact interval evaluation; always contains `p(box)`.
pub fn eval_box(p: &MPoly, bx: &[RInterval]) -> RInterval {
    assert_eq!(bx.len(), p.nvars(), "box dimension");
    let pows: Vec<Vec<RInterval>> = bx
        .iter()
        .enumerate()
        .map(|(i, iv)| (0..=p.degree_in(i)).map(|e| iv.pow(e)).collect())
        .collect();
    let mut acc = RInterval::point(Q::zero());
    for (m, c) in p.terms() {
        let mut t = RInterval::point(c.clone());
        for (i, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                t = t.mul(&pows[i][e as usize]);
            }
        }
        acc = acc.add(&t);
    }
    acc
}

/// Outward-rounded f64 interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fi {
    pub lo: f64,
    pub hi: f64,
}

impl Fi {
    pub const ENTIRE: Fi = Fi {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Fi {
        if lo.is_nan() || hi.is_nan() {
            return Fi::ENTIRE;
        }
        Fi { lo, hi }
    }

    /// Exact for representable `x` (no widening).
    pub fn exact(x: f64) -> Fi {
        Fi { lo: x, hi: x }
    }

    pub fn enclose(x: &Q) -> Fi {
        let (lo, hi) = enclose(x);
        Fi { lo, hi }
    }

    pub fn enclose_interval(iv: &RInterval) -> Fi {
        Fi {
            lo: enclose(&iv.lo).0,
            hi: enclose(&iv.hi).1,
        }
    }

    pub fn add(self, o: Fi) -> Fi {
        Fi::new((self.lo + o.lo).next_down(), (self.hi + o.hi).next_up())
    }

    pub fn mul(self, o: Fi) -> Fi {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        if c.iter().any(|v| v.is_nan()) {
            return Fi::ENTIRE;
        }
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // Products of exact zeros stay exact; everything else is widened.
        let lo = if lo == 0.0 && c.iter().all(|&v| v >= 0.0) { 0.0 } else { lo.next_down() };
        let hi = if hi == 0.0 && c.iter().all(|&v| v <= 0.0) { 0.0 } else { hi.next_up() };
        Fi { lo, hi }
    }

    pub fn pow(self, e: u32) -> Fi {
        if e == 0 {
            return Fi::exact(1.0);
        }
        if e.is_multiple_of(2) && self.lo < 0.0 && self.hi > 0.0 {
            let a = self.lo.abs().max(self.hi);
            let m = Fi { lo: 0.0, hi: a }.pow(e);
            return Fi { lo: 0.0, hi: m.hi };
        }
        let mut acc = self;
        for _ in 1..e {
            acc = acc.mul(self);
        }
        if e.is_multiple_of(2) && acc.lo < 0.0 {
            acc.lo = 0.0;
        }
        acc
    }

    pub fn strict_sign(self) -> Option<Sign> {
        if self.lo > 0.0 {
            Some(Sign::Pos)
        } else if self.hi < 0.0 {
            Some(Sign::Neg)
        } else {
            None
        }
    }

    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

/// A polynomial with coefficients pre-enclosed in f64 intervals, paired with
/// its exact form for fallbacks.
#[derive(Clone, Debug)]
pub struct SignEval {
    poly: MPoly,
    terms: Vec<(Vec<u32>, Fi)>,
    degs: Vec<u32>,
}

impl SignEval {
    pub fn new(p: &MPoly) -> SignEval {
        // Float terms carry a power-of-two multiple of p so that huge exact
        // coefficients (primitive integer forms) still enclose finitely.
        let shift = p
            .terms()
            .values()
            .map(|c| c.numer().bits() as i64 - c.denom().bits() as i64)
            .max()
            .unwrap_or(0);
        let scale = pow2(-shift);
        SignEval {
            poly: p.clone(),
            terms: p
                .terms()
                .iter()
                .map(|(m, c)| (m.exps().to_vec(), Fi::enclose(&(c * &scale))))
                .collect(),
            degs: (0..p.nvars()).map(|i| p.degree_in(i)).collect(),
        }
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }

    /// Term-wise f64 enclosure of a positive multiple of the polynomial,
    /// together with the sum of term magnitudes.
    pub fn eval_fi(&self, x: &[Fi]) -> (Fi, f64) {
        let pows: Vec<Vec<Fi>> = x
            .iter()
            .zip(&self.degs)
            .map(|(iv, &d)| {
                let mut v = Vec::with_capacity(d as usize + 1);
                v.push(Fi::exact(1.0));
                for e in 1..=d {
                    v.push(iv.pow(e));
                }
                v
            })
            .collect();
        let mut acc = Fi::exact(0.0);
        let mut mag = 0.0;
        for (m, c) in &self.terms {
            let mut t = *c;
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = t.mul(pows[i][e as usize]);
                }
            }
            mag += t.mag();
            acc = acc.add(t);
        }
        (acc, mag)
    }

    /// Exact sign at a rational point; the f64 pass settles most calls.
    pub fn sign_at(&self, x: &[Q]) -> Sign {
        let fx: Vec<Fi> = x.iter().map(Fi::enclose).collect();
        self.sign_at_with(&fx, x)
    }

    pub fn sign_at_with(&self, fx: &[Fi], x: &[Q]) -> Sign {
        if let Some(s) = self.eval_fi(fx).0.strict_sign() {
            return s;
        }
        Sign::of(&self.poly.eval_unchecked(x))
    }

    /// Certified strict sign on a box, or `None` if undecided.
    pub fn sign_on_box(&self, bx: &[RInterval]) -> Option<Sign> {
        let fb: Vec<Fi> = bx.iter().map(Fi::enclose_interval).collect();
        self.sign_on_boxes(&fb, bx)
    }

    /// As `sign_on_box`, with `fb` an f64 enclosure of `bx` supplied.
    pub fn sign_on_boxes(&self, fb: &[Fi], bx: &[RInterval]) -> Option<Sign> {
        let (v, mag) = self.eval_fi(fb);
        if let Some(s) = v.strict_sign() {
            return Some(s);
        }
        // When the float enclosure straddles zero by far more than its own
        // rounding slack, the exact term-wise interval straddles too.
        let slack = 1e-9 * mag;
        if v.lo < -slack && v.hi > slack {
            return None;
        }
        eval_box(&self.poly, bx).strict_sign()
    }

    /// Certified strict sign on an f64 box whose endpoints are exact.
    pub fn sign_on_fbox(&self, bx: &[Fi]) -> Option<Sign> {
        self.eval_fi(bx).0.strict_sign()
    }
}

pub fn sign_at(p: &MPoly, x: &[Q]) -> Sign {
    SignEval::new(p).sign_at(x)
}

pub fn sign_on_box(p: &MPoly, bx: &[RInterval]) -> Option<Sign> {
    SignEval::new(p).sign_on_box(bx)
}
