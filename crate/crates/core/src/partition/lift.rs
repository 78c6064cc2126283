//! Lift bases. The public Veronese lift uses plain monomials; the cut search
//! uses tensor Chebyshev polynomials on normalized coordinates, which span the
//! same space but are far better conditioned on [−1, 1]^k.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::poly::{MPoly, Monomial};
use crate::rational::Q;

/// Exponent vectors of all nonconstant monomials of degree ≤ D, graded and
/// ascending in lex order within each degree: for k = 2, D = 2 this is
/// x, y, x², xy, y².
pub fn exponents(k: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for deg in 1..=d {
        let mut layer = Vec::new();
        let mut cur = vec![0u32; k];
        compositions(deg as u32, 0, &mut cur, &mut layer);
        layer.sort_by(|a, b| Monomial::new(a.clone()).cmp(&Monomial::new(b.clone())));
        out.extend(layer);
    }
    out
}

fn compositions(left: u32, i: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    for e in 0..=left {
        cur[i] = e;
        compositions(left - e, i + 1, cur, out);
    }
    cur[i] = 0;
}

/// `C(D+k, k) − 1`
pub fn lift_dim(k: usize, d: usize) -> usize {
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = c * (d as u128 + i) / i;
    }
    (c - 1) as usize
}

/// Smallest D with `C(D+k, k) − 1 ≥ s`.
pub fn min_degree_for(k: usize, s: usize) -> usize {
    let mut d = 1;
    while lift_dim(k, d) < s {
        d += 1;
    }
    d
}

pub fn veronese_lift(x: &[Q], d: usize) -> Vec<Q> {
    assert!(d >= 1);
    exponents(x.len(), d)
        .iter()
        .map(|e| {
            e.iter()
                .zip(x)
                .fold(Q::one(), |acc, (&k, v)| acc * num_traits::pow(v.clone(), k as usize))
        })
        .collect()
}

/// T_0..T_d at `y`.
pub fn cheb_f64(y: f64, d: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(d + 1);
    t.push(1.0);
    if d >= 1 {
        t.push(y);
    }
    for n in 2..=d {
        t.push(2.0 * y * t[n - 1] - t[n - 2]);
    }
    t
}

pub fn cheb_exact(y: &Q, d: usize) -> Vec<Q> {
    let two = Q::from_integer(BigInt::from(2));
    let mut t = Vec::with_capacity(d + 1);
    t.push(Q::one());
    if d >= 1 {
        t.push(y.clone());
    }
    for n in 2..=d {
        let v = &two * y * &t[n - 1] - &t[n - 2];
        t.push(v);
    }
    t
}

/// Row of the Chebyshev lift at `y`, constant term last.
pub fn cheb_row_f64(y: &[f64], exps: &[Vec<u32>], d: usize, out: &mut Vec<f64>) {
    let ts: Vec<Vec<f64>> = y.iter().map(|&v| cheb_f64(v, d)).collect();
    out.clear();
    for e in exps {
        out.push(e.iter().enumerate().map(|(i, &k)| ts[i][k as usize]).product());
    }
    out.push(1.0);
}

pub fn cheb_row_exact(y: &[Q], exps: &[Vec<u32>], d: usize) -> Vec<Q> {
    let ts: Vec<Vec<Q>> = y.iter().map(|v| cheb_exact(v, d)).collect();
    let mut out: Vec<Q> = exps
        .iter()
        .map(|e| {
            e.iter()
                .enumerate()
                .fold(Q::one(), |acc, (i, &k)| acc * &ts[i][k as usize])
        })
        .collect();
    out.push(Q::one());
    out
}

/// Integer monomial coefficients of T_0..T_d.
fn cheb_coeffs(d: usize) -> Vec<Vec<BigInt>> {
    let mut t: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    if d >= 1 {
        t.push(vec![BigInt::zero(), BigInt::one()]);
    }
    for n in 2..=d {
        let mut c = vec![BigInt::zero(); n + 1];
        for (i, v) in t[n - 1].iter().enumerate() {
            c[i + 1] += v * 2;
        }
        for (i, v) in t[n - 2].iter().enumerate() {
            c[i] -= v;
        }
        t.push(c);
    }
    t
}

/// Converts Chebyshev-lift coefficients (constant last) to a monomial MPoly
/// in the normalized coordinates.
pub fn cheb_to_poly(k: usize, d: usize, exps: &[Vec<u32>], coeffs: &[Q]) -> MPoly {
    assert_eq!(coeffs.len(), exps.len() + 1);
    let tc = cheb_coeffs(d);
    let mut p = MPoly::constant(k, coeffs[exps.len()].clone());
    for (e, a) in exps.iter().zip(coeffs) {
        if a.is_zero() {
            continue;
        }
        // Tensor product of univariate coefficient vectors.
        let mut terms: Vec<(Vec<u32>, BigInt)> = vec![(vec![0; k], BigInt::one())];
        for (i, &ei) in e.iter().enumerate() {
            let mut next = Vec::new();
            for (m, c) in &terms {
                for (pow, tcoef) in tc[ei as usize].iter().enumerate() {
                    if tcoef.is_zero() {
                        continue;
                    }
                    let mut m2 = m.clone();
                    m2[i] = pow as u32;
                    next.push((m2, c * tcoef));
                }
            }
            terms = next;
        }
        for (m, c) in terms {
            p.add_term(Monomial::new(m), a * Q::from_integer(c));
        }
    }
    p
}
