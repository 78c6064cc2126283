//! Verified ham-sandwich cuts in lifted space.
//!
//! The search runs in f64: a smoothed Gauss–Newton solve of
//! `F_i(a) = E_{p∈S_i} tanh(h_a(p)/τ_i) = 0`, with per-set temperatures
//! annealed from the interquartile range down. Candidates are then rounded to
//! dyadic coefficients, optionally snapped exactly through chosen points, and
//! accepted only after exact side counts pass.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::poly::Sign;
use crate::rational::{dyadic_round, Q};

/// Access to lifted points: f64 rows for the search, exact rows for snapping,
/// and exact signs for verification. Rows end with the constant coordinate 1.
pub(crate) trait Lifted {
    fn ncols(&self) -> usize;
    fn row(&self, i: usize) -> &[f64];
    fn exact_row(&self, i: usize) -> Vec<Q>;
    fn signs(&self, coeffs: &[Q], rows: &[usize]) -> Vec<Sign>;
}

/// A set to bisect: (row index, multiplicity) pairs.
pub(crate) type HsSet = Vec<(usize, u64)>;

#[derive(Clone, Debug)]
pub(crate) struct SearchParams {
    pub beta: Q,
    pub beta_fallback: Q,
    pub restarts: usize,
    pub iters: usize,
    pub snap_max: usize,
    pub coeff_bits: i32,
}

pub(crate) struct Found {
    pub coeffs: Vec<Q>,
    pub beta: Q,
    pub restarts_used: usize,
}

struct Flat {
    m: usize,
    a: Vec<f64>,
    row_of: Vec<usize>,
    set_of: Vec<usize>,
    w: Vec<f64>,
    mults: Vec<u64>,
    spans: Vec<(usize, usize)>,
    mass: Vec<u64>,
}

impl Flat {
    fn new(pts: &impl Lifted, sets: &[HsSet]) -> Flat {
        let m = pts.ncols();
        let mut f = Flat {
            m,
            a: Vec::new(),
            row_of: Vec::new(),
            set_of: Vec::new(),
            w: Vec::new(),
            mults: Vec::new(),
            spans: Vec::new(),
            mass: Vec::new(),
        };
        for (si, s) in sets.iter().enumerate() {
            let start = f.row_of.len();
            let tot: u64 = s.iter().map(|x| x.1).sum();
            for &(r, mult) in s {
                f.a.extend_from_slice(pts.row(r));
                f.row_of.push(r);
                f.set_of.push(si);
                f.w.push(mult as f64 / tot as f64);
                f.mults.push(mult);
            }
            f.spans.push((start, f.row_of.len()));
            f.mass.push(tot);
        }
        f
    }

    fn len(&self) -> usize {
        self.row_of.len()
    }

    fn arow(&self, e: usize) -> &[f64] {
        &self.a[e * self.m..(e + 1) * self.m]
    }

    fn h(&self, u: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|e| self.arow(e).iter().zip(u).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn mult(&self, e: usize) -> u64 {
        self.mults[e]
    }

    /// Sets whose f64 sides exceed β; `zero` rows count as on the cut.
    fn f64_fails(&self, h: &[f64], beta: f64, zero: &[bool]) -> usize {
        let mut bad = 0;
        for (si, &(s, t)) in self.spans.iter().enumerate() {
            let (mut p, mut n) = (0u64, 0u64);
            for e in s..t {
                if zero[e] {
                    continue;
                }
                if h[e] > 0.0 {
                    p += self.mult(e);
                } else if h[e] < 0.0 {
                    n += self.mult(e);
                }
            }
            let lim = beta * self.mass[si] as f64;
            if p as f64 > lim || n as f64 > lim {
                bad += 1;
            }
        }
        bad
    }

    /// Every set split with |pos − neg| no larger than its heaviest location.
    fn near_half(&self, h: &[f64]) -> bool {
        self.spans.iter().all(|&(s, t)| {
            let (mut p, mut n, mut mx) = (0u64, 0u64, 0u64);
            for e in s..t {
                mx = mx.max(self.mults[e]);
                if h[e] > 0.0 {
                    p += self.mults[e];
                } else {
                    n += self.mults[e];
                }
            }
            p.abs_diff(n) <= mx
        })
    }

    /// Entries of set `si` sorted by h.
    fn sorted(&self, si: usize, h: &[f64]) -> Vec<usize> {
        let (s, t) = self.spans[si];
        let mut v: Vec<usize> = (s..t).collect();
        v.sort_by(|&a, &b| h[a].total_cmp(&h[b]).then(a.cmp(&b)));
        v
    }

    /// Weighted median entry of set `si` in h order.
    fn median(&self, si: usize, h: &[f64]) -> usize {
        let order = self.sorted(si, h);
        let half = self.mass[si] as f64 / 2.0;
        let mut acc = 0.0;
        for &e in &order {
            acc += self.mult(e) as f64;
            if acc >= half {
                return e;
            }
        }
        *order.last().unwrap()
    }
}

pub(crate) fn find_cut(
    pts: &impl Lifted,
    sets: &[HsSet],
    params: &SearchParams,
    rng: &mut impl Rng,
) -> Option<Found> {
    let flat = Flat::new(pts, sets);
    if flat.len() == 0 {
        return None;
    }
    let beta_f = crate::rational::to_f64(&params.beta_fallback);
    let none = vec![false; flat.len()];
    let found = |coeffs, beta: &Q, restart| Found {
        coeffs,
        beta: beta.clone(),
        restarts_used: restart,
    };
    for restart in 0..params.restarts {
        let mut sm = Smooth::new(&flat, rng);
        let mut relaxed: Option<(usize, Vec<f64>)> = None;
        for it in 0..params.iters {
            let ok_relaxed = flat.f64_fails(&sm.h, beta_f, &none) == 0;
            if ok_relaxed && relaxed.is_none() {
                relaxed = Some((it, sm.u.clone()));
            }
            // Exact halving is attempted whenever the iterate is close.
            if flat.near_half(&sm.h) || (ok_relaxed && it % 8 == 0) {
                if let Some(c) = finish_half(pts, &flat, sets, &sm.u, params) {
                    return Some(found(c, &params.beta, restart));
                }
            }
            if relaxed.as_ref().is_some_and(|(i0, _)| it >= i0 + RELAXED_PATIENCE) {
                break;
            }
            if !sm.step(&flat) {
                break;
            }
        }
        if let Some(c) = finish_half(pts, &flat, sets, &sm.u, params) {
            return Some(found(c, &params.beta, restart));
        }
        let u = relaxed.map(|r| r.1).unwrap_or(sm.u);
        if let Some(c) = finish_relaxed(pts, &flat, sets, &u, params) {
            return Some(found(c, &params.beta_fallback, restart));
        }
    }
    None
}

/// Iterations spent hunting for an exact halving once the fallback β holds.
const RELAXED_PATIENCE: usize = 40;

fn normalize(u: &mut [f64]) {
    let m = u.len() - 1;
    let nrm = u[..m].iter().map(|v| v * v).sum::<f64>().sqrt();
    if nrm > 0.0 && nrm.is_finite() {
        for v in u.iter_mut() {
            *v /= nrm;
        }
    }
}

fn quantile(v: &mut [f64], q: f64) -> f64 {
    let k = ((v.len() - 1) as f64 * q).round() as usize;
    *v.select_nth_unstable_by(k, |a, b| a.total_cmp(b)).1
}

/// Gauss–Newton on the tanh-smoothed balance equations.
struct Smooth {
    u: Vec<f64>,
    h: Vec<f64>,
    kappa: f64,
}

impl Smooth {
    fn new(flat: &Flat, rng: &mut impl Rng) -> Smooth {
        let m = flat.m;
        let mut u: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        u[m - 1] = 0.0;
        let h = flat.h(&u);
        u[m - 1] = -quantile(&mut h.clone(), 0.5);
        normalize(&mut u);
        let h = flat.h(&u);
        Smooth { u, h, kappa: 1.0 }
    }

    fn step(&mut self, flat: &Flat) -> bool {
        let m = flat.m;
        let s = flat.spans.len();
        let h = &self.h;
        let taus: Vec<f64> = (0..s)
            .map(|si| {
                let (a, b) = flat.spans[si];
                let mut hv: Vec<f64> = h[a..b].to_vec();
                let iqr = if hv.len() > 1 {
                    quantile(&mut hv, 0.75) - quantile(&mut hv, 0.25)
                } else {
                    0.0
                };
                let floor = 1e-12 * (h[a..b].iter().fold(0.0f64, |x, y| x.max(y.abs())) + 1e-300);
                (self.kappa * iqr).max(floor)
            })
            .collect();
        let eval_f = |h: &[f64]| -> Vec<f64> {
            let mut f = vec![0.0; s];
            for e in 0..flat.len() {
                let si = flat.set_of[e];
                f[si] += flat.w[e] * (h[e] / taus[si]).tanh();
            }
            f
        };
        let f = eval_f(h);
        let mut jac = DMatrix::<f64>::zeros(s, m);
        for e in 0..flat.len() {
            let si = flat.set_of[e];
            let t = (h[e] / taus[si]).tanh();
            let c = flat.w[e] * (1.0 - t * t) / taus[si];
            if c == 0.0 {
                continue;
            }
            for (j, a) in flat.arow(e).iter().enumerate() {
                jac[(si, j)] += c * a;
            }
        }
        let g = &jac * jac.transpose();
        let tr = g.trace().max(1e-300);
        let reg = g + DMatrix::identity(s, s) * (1e-10 * tr / s as f64);
        let fv = DVector::from_vec(f.clone());
        let Some(lam) = reg.clone().cholesky().map(|c| c.solve(&fv)).or_else(|| reg.lu().solve(&fv))
        else {
            return false;
        };
        let step = jac.transpose() * lam;
        let f0: f64 = f.iter().map(|v| v * v).sum();
        let mut alpha = 1.0;
        let mut un = self.u.clone();
        let mut hn = Vec::new();
        while alpha > 1.0 / 64.0 {
            un = self.u.iter().zip(step.iter()).map(|(a, b)| a - alpha * b).collect();
            hn = flat.h(&un);
            let fnew: f64 = eval_f(&hn).iter().map(|v| v * v).sum();
            if fnew < f0 * (1.0 - 0.1 * alpha) {
                break;
            }
            alpha /= 2.0;
        }
        let nrm = un[..m - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(nrm > 0.0 && nrm.is_finite()) {
            return false;
        }
        for v in un.iter_mut() {
            *v /= nrm;
        }
        for v in hn.iter_mut() {
            *v /= nrm;
        }
        self.u = un;
        self.h = hn;
        self.kappa = (self.kappa * 0.9).max(0.01);
        true
    }
}

/// Minimal-norm f64 correction making `c·u = 0` for every constraint row.
fn project(u: &mut [f64], rows: &[Vec<f64>]) {
    if rows.is_empty() {
        return;
    }
    let m = u.len();
    let c = DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
    let g = &c * c.transpose();
    let tr = g.trace().max(1e-300);
    let g = g + DMatrix::identity(rows.len(), rows.len()) * (1e-13 * tr / rows.len() as f64);
    let cu = &c * DVector::from_column_slice(u);
    if let Some(y) = g.lu().solve(&cu) {
        let d = c.transpose() * y;
        for (v, dv) in u.iter_mut().zip(d.iter()) {
            *v -= dv;
        }
    }
}

/// Exact bisection at β = 1/2: every even set is split through the gap of its
/// middle pair, every other set is snapped through its weighted median.
fn finish_half(
    pts: &impl Lifted,
    flat: &Flat,
    sets: &[HsSet],
    u0: &[f64],
    params: &SearchParams,
) -> Option<Vec<Q>> {
    let mut u = u0.to_vec();
    let s = flat.spans.len();
    let mut snaps: Vec<usize> = Vec::new();
    for _ in 0..8 {
        let h = flat.h(&u);
        let mut cons = Vec::with_capacity(s);
        snaps.clear();
        for si in 0..s {
            let order = flat.sorted(si, &h);
            let half = flat.mass[si];
            let mut acc = 0u64;
            let mut gap = None;
            for w in 0..order.len().saturating_sub(1) {
                acc += flat.mult(order[w]);
                if 2 * acc == half {
                    gap = Some((order[w], order[w + 1]));
                    break;
                }
                if 2 * acc > half {
                    break;
                }
            }
            match gap {
                Some((a, b)) => cons.push(
                    flat.arow(a)
                        .iter()
                        .zip(flat.arow(b))
                        .map(|(x, y)| 0.5 * (x + y))
                        .collect(),
                ),
                None => {
                    let e = flat.median(si, &h);
                    snaps.push(e);
                    cons.push(flat.arow(e).to_vec());
                }
            }
        }
        if snaps.len() > params.snap_max {
            return None;
        }
        project(&mut u, &cons);
        normalize(&mut u);
        let h = flat.h(&u);
        let mut zero = vec![false; flat.len()];
        for &e in &snaps {
            zero[e] = true;
        }
        if flat.f64_fails(&h, 0.5, &zero) == 0 {
            break;
        }
    }
    let rows: Vec<usize> = snaps.iter().map(|&e| flat.row_of[e]).collect();
    let coeffs = snap_exact(pts, &round(&u, params.coeff_bits), &rows)?;
    exact_ok(pts, sets, &coeffs, &params.beta).then_some(coeffs)
}

/// Acceptance at the fallback β, snapping only the sets that fail.
fn finish_relaxed(
    pts: &impl Lifted,
    flat: &Flat,
    sets: &[HsSet],
    u0: &[f64],
    params: &SearchParams,
) -> Option<Vec<Q>> {
    let beta = &params.beta_fallback;
    let coeffs = round(u0, params.coeff_bits);
    let fails = exact_fails(pts, sets, &coeffs, beta);
    if fails.is_empty() {
        return Some(coeffs);
    }
    if fails.len() > params.snap_max {
        return None;
    }
    let mut u = u0.to_vec();
    let h = flat.h(&u);
    let meds: Vec<usize> = fails.iter().map(|&si| flat.median(si, &h)).collect();
    let cons: Vec<Vec<f64>> = meds.iter().map(|&e| flat.arow(e).to_vec()).collect();
    project(&mut u, &cons);
    normalize(&mut u);
    let rows: Vec<usize> = meds.iter().map(|&e| flat.row_of[e]).collect();
    let coeffs = snap_exact(pts, &round(&u, params.coeff_bits), &rows)?;
    exact_ok(pts, sets, &coeffs, beta).then_some(coeffs)
}

fn round(u: &[f64], bits: i32) -> Vec<Q> {
    u.iter().map(|&v| dyadic_round(v, bits)).collect()
}

/// Exact minimal-norm correction `a = a0 + Φᵀy` with `Φa = 0`.
/// Minimal-norm correction of `a0` that vanishes on the given rows, in
/// integers: rows and `a0` are scaled to integer vectors (neither changes a
/// sign), and the Gram system is solved fraction-free.
fn snap_exact(pts: &impl Lifted, a0: &[Q], rows: &[usize]) -> Option<Vec<Q>> {
    if rows.is_empty() {
        return Some(a0.to_vec());
    }
    let phi: Vec<Vec<BigInt>> = rows.iter().map(|&r| integer_row(&pts.exact_row(r))).collect();
    let a0 = integer_row(a0);
    let dot = |x: &[BigInt], y: &[BigInt]| -> BigInt { x.iter().zip(y).map(|(a, b)| a * b).sum() };
    let gram: Vec<Vec<BigInt>> = phi
        .iter()
        .map(|r| phi.iter().map(|c| dot(r, c)).collect())
        .collect();
    let rhs: Vec<BigInt> = phi.iter().map(|r| -dot(r, &a0)).collect();
    // gram · y = det · rhs, so det·a0 + Σ y_i φ_i vanishes on every row.
    let (y, det) = bareiss_solve(gram, rhs)?;
    let mut a: Vec<BigInt> = a0.iter().map(|v| v * &det).collect();
    for (yi, r) in y.iter().zip(&phi) {
        if yi.is_zero() {
            continue;
        }
        for (aj, rj) in a.iter_mut().zip(r) {
            *aj += yi * rj;
        }
    }
    if det.is_negative() {
        a.iter_mut().for_each(|v| *v = -&*v);
    }
    if a[..a.len() - 1].iter().all(|v| v.is_zero()) {
        return None;
    }
    Some(a.into_iter().map(Q::from_integer).collect())
}

fn integer_row(r: &[Q]) -> Vec<BigInt> {
    let l = r.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    r.iter().map(|v| v.numer() * (&l / v.denom())).collect()
}

/// Fraction-free elimination on a nonsingular integer system: returns
/// (y, det) with `a · y = det · b`.
pub(crate) fn bareiss_solve(mut a: Vec<Vec<BigInt>>, b: Vec<BigInt>) -> Option<(Vec<BigInt>, BigInt)> {
    let n = a.len();
    for (row, bi) in a.iter_mut().zip(b) {
        row.push(bi);
    }
    let mut prev = BigInt::one();
    let mut sign = 1;
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        if p != k {
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    // Back substitution; det·y_i is integral by Cramer's rule.
    let det = &prev * sign;
    let mut y = vec![BigInt::zero(); n];
    for i in (0..n).rev() {
        let mut acc = &a[i][n] * &det;
        for j in i + 1..n {
            acc -= &a[i][j] * &y[j];
        }
        y[i] = acc / &a[i][i];
    }
    Some((y, det))
}

pub(crate) fn exact_fails(pts: &impl Lifted, sets: &[HsSet], coeffs: &[Q], beta: &Q) -> Vec<usize> {
    let rows: Vec<usize> = sets.iter().flat_map(|s| s.iter().map(|x| x.0)).collect();
    let signs = pts.signs(coeffs, &rows);
    let mut k = 0;
    let mut fails = Vec::new();
    for (si, s) in sets.iter().enumerate() {
        let (mut p, mut n, mut tot) = (0u64, 0u64, 0u64);
        for &(_, mult) in s {
            match signs[k] {
                Sign::Pos => p += mult,
                Sign::Neg => n += mult,
                Sign::Zero => {}
            }
            tot += mult;
            k += 1;
        }
        if !side_ok(p, tot, beta) || !side_ok(n, tot, beta) {
            fails.push(si);
        }
    }
    fails
}

/// `side ≤ β·total`, exactly.
pub(crate) fn side_ok(side: u64, total: u64, beta: &Q) -> bool {
    Q::from_integer(side.into()) <= beta * Q::from_integer(total.into())
}

fn exact_ok(pts: &impl Lifted, sets: &[HsSet], coeffs: &[Q], beta: &Q) -> bool {
    exact_fails(pts, sets, coeffs, beta).is_empty()
}
