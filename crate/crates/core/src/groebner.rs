//! Buchberger's algorithm under lex order (x_d > … > x_1), normal forms,
//! elimination and leading-term dimension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{MPoly, Monomial};
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealGens {
    nvars: usize,
    gens: Vec<MPoly>,
}

impl IdealGens {
    /// Zero polynomials are dropped; they do not change the ideal.
    pub fn new(nvars: usize, gens: Vec<MPoly>) -> IdealGens {
        assert!(gens.iter().all(|g| g.nvars() == nvars));
        IdealGens {
            nvars,
            gens: gens.into_iter().filter(|g| !g.is_zero()).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn gens(&self) -> &[MPoly] {
        &self.gens
    }

    pub fn push(&mut self, g: MPoly) {
        assert_eq!(g.nvars(), self.nvars);
        if !g.is_zero() {
            self.gens.push(g);
        }
    }
}

/// Reduced lex Gröbner basis, monic, sorted by ascending leading monomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GBasis {
    nvars: usize,
    basis: Vec<MPoly>,
}

impl GBasis {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn basis(&self) -> &[MPoly] {
        &self.basis
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, h: &MPoly) -> bool {
        normal_form(h, self).is_zero()
    }

    /// Buchberger's criterion, checked on every pair.
    pub fn all_s_polys_reduce(&self) -> bool {
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                let s = s_polynomial(&self.basis[i], &self.basis[j]);
                if !normal_form(&s, self).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Wraps polynomials already known to form a reduced basis.
    pub(crate) fn from_reduced(nvars: usize, mut basis: Vec<MPoly>) -> GBasis {
        basis.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
        GBasis { nvars, basis }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_basis: usize,
    pub max_degree: usize,
    pub max_reductions: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_basis: 400,
            max_degree: 400,
            max_reductions: 20_000,
        }
    }
}

pub fn s_polynomial(f: &MPoly, g: &MPoly) -> MPoly {
    let (mf, cf) = f.leading_term().expect("nonzero f");
    let (mg, cg) = g.leading_term().expect("nonzero g");
    let l = mf.lcm(mg);
    let a = f.mul_term(&mf.quotient_of(&l), &cf.recip());
    let b = g.mul_term(&mg.quotient_of(&l), &cg.recip());
    &a - &b
}

/// Full reduction of `h` by `divisors`, trying divisors in the given order.
pub fn reduce_by(h: &MPoly, divisors: &[&MPoly]) -> MPoly {
    let n = h.nvars();
    let leads: Vec<(Monomial, Q)> = divisors
        .iter()
        .map(|g| {
            let (m, c) = g.leading_term().expect("nonzero divisor");
            (m.clone(), c.clone())
        })
        .collect();
    let mut p = h.clone();
    let mut rem = MPoly::zero(n);
    while let Some((m, c)) = p.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
        match leads.iter().position(|(lm, _)| lm.divides(&m)) {
            Some(k) => {
                let q = leads[k].0.quotient_of(&m);
                let coef = &c / &leads[k].1;
                p.sub_mul_term(divisors[k], &q, &coef);
            }
            None => {
                p.add_term(m.clone(), -c.clone());
                rem.add_term(m, c);
            }
        }
    }
    rem
}

pub fn normal_form(h: &MPoly, g: &GBasis) -> MPoly {
    let refs: Vec<&MPoly> = g.basis.iter().collect();
    reduce_by(h, &refs)
}

pub fn buchberger(ideal: &IdealGens, budget: &Budget) -> Result<GBasis> {
    let n = ideal.nvars();
    let mut basis: Vec<MPoly> = Vec::new();
    for g in ideal.gens() {
        let p = g.primitive();
        if !basis.contains(&p) {
            basis.push(p);
        }
    }
    if basis.is_empty() {
        return Ok(GBasis { nvars: n, basis });
    }
    if basis.iter().any(|g| g.is_constant()) {
        return Ok(unit(n));
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let mut reductions = 0usize;
    while !pairs.is_empty() {
        // Normal strategy: smallest lcm first.
        let k = (0..pairs.len())
            .min_by(|&a, &b| pair_lcm(&basis, pairs[a]).cmp(&pair_lcm(&basis, pairs[b])))
            .unwrap();
        let (i, j) = pairs.swap_remove(k);
        let li = basis[i].leading_monomial().unwrap();
        let lj = basis[j].leading_monomial().unwrap();
        if li.coprime(lj) || chain_criterion(&basis, &pairs, i, j) {
            continue;
        }
        reductions += 1;
        if reductions > budget.max_reductions {
            return Err(Error::BudgetExceeded(format!(
                "more than {} S-polynomial reductions",
                budget.max_reductions
            )));
        }
        let s = s_polynomial(&basis[i], &basis[j]);
        let refs: Vec<&MPoly> = basis.iter().collect();
        let r = reduce_by(&s, &refs);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return Ok(unit(n));
        }
        let r = r.primitive();
        if r.total_degree() > budget.max_degree {
            return Err(Error::BudgetExceeded(format!(
                "basis element of degree {} exceeds {}",
                r.total_degree(),
                budget.max_degree
            )));
        }
        let idx = basis.len();
        basis.push(r);
        if basis.len() > budget.max_basis {
            return Err(Error::BudgetExceeded(format!(
                "basis size exceeds {}",
                budget.max_basis
            )));
        }
        for i in 0..idx {
            pairs.push((i, idx));
        }
    }
    Ok(interreduce(n, basis))
}

fn pair_lcm(basis: &[MPoly], (i, j): (usize, usize)) -> Monomial {
    basis[i]
        .leading_monomial()
        .unwrap()
        .lcm(basis[j].leading_monomial().unwrap())
}

/// Skip (i, j) if some k has lm_k | lcm(i, j) with both (i, k) and (j, k)
/// already processed.
fn chain_criterion(basis: &[MPoly], pending: &[(usize, usize)], i: usize, j: usize) -> bool {
    let l = pair_lcm(basis, (i, j));
    let open = |a: usize, b: usize| pending.contains(&(a.min(b), a.max(b)));
    (0..basis.len()).any(|k| {
        k != i
            && k != j
            && basis[k].leading_monomial().unwrap().divides(&l)
            && !open(i, k)
            && !open(j, k)
    })
}

fn unit(n: usize) -> GBasis {
    GBasis {
        nvars: n,
        basis: vec![MPoly::one(n)],
    }
}

fn interreduce(n: usize, basis: Vec<MPoly>) -> GBasis {
    // Minimal basis: drop elements whose leader is divisible by another's.
    let mut keep: Vec<MPoly> = Vec::new();
    let mut sorted = basis;
    sorted.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    for g in sorted {
        let lm = g.leading_monomial().unwrap();
        if !keep
            .iter()
            .any(|h| h.leading_monomial().unwrap().divides(lm))
        {
            keep.push(g);
        }
    }
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<&MPoly> = keep
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, h)| h)
            .collect();
        let (lm, lc) = keep[i].leading_term().unwrap();
        let tail = &keep[i] - &MPoly::monomial(lm.clone(), lc.clone());
        let mut r = reduce_by(&tail, &others);
        r.add_term(lm.clone(), lc.clone());
        out.push(r.monic());
    }
    GBasis::from_reduced(n, out)
}

/// Basis elements involving only `x_1..x_k`, re-embedded in k variables.
pub fn elimination_gens(g: &GBasis, k: usize) -> Vec<MPoly> {
    g.basis
        .iter()
        .filter(|p| (k..g.nvars).all(|i| !p.uses_var(i)))
        .map(|p| p.restrict_vars(k))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PurePower {
    Found(u32),
    Absent,
    UnitIdeal,
}

pub fn pure_power_leader(g: &GBasis, var: usize) -> PurePower {
    if g.is_unit() {
        return PurePower::UnitIdeal;
    }
    g.basis
        .iter()
        .filter_map(|p| p.leading_monomial().unwrap().pure_power_of(var))
        .min()
        .map_or(PurePower::Absent, PurePower::Found)
}

/// Krull dimension of ℚ[x]/I; −1 for the unit ideal.
pub fn ideal_dimension(g: &GBasis) -> i64 {
    if g.is_unit() {
        return -1;
    }
    let n = g.nvars;
    assert!(n < 32);
    let masks: Vec<u32> = g
        .basis
        .iter()
        .map(|p| {
            p.leading_monomial()
                .unwrap()
                .support()
                .fold(0u32, |m, i| m | (1 << i))
        })
        .collect();
    (0u32..1 << n)
        .filter(|&u| masks.iter().all(|&m| m & !u != 0))
        .map(|u| u.count_ones() as i64)
        .max()
        .unwrap_or(0)
}

/// Convenience: the reduced basis of a single polynomial is its monic form.
pub fn principal(p: &MPoly) -> GBasis {
    if p.is_zero() {
        return GBasis {
            nvars: p.nvars(),
            basis: vec![],
        };
    }
    if p.is_constant() {
        return unit(p.nvars());
    }
    GBasis::from_reduced(p.nvars(), vec![p.monic()])
}
