//! Single-level (1/r)-partitioning polynomials by iterated polynomial
//! ham-sandwich cuts.
//!
//! Each round bisects every cell that still holds more than |Q|/r points
//! (counted with multiplicity) by one polynomial whose degree is the smallest
//! D with C(D+k,k)−1 ≥ #cells, raised only when the search fails. In one
//! dimension the cut is written down directly as a product of linear
//! factors, which also serves as the slab fallback in higher dimensions.

mod lift;
mod search;

pub use lift::{exponents, lift_dim, min_degree_for, veronese_lift};

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Fi, MPoly, RInterval, Sign, SignEval};
use crate::rational::{pow2_at_least, qf, to_f64, Q};
use search::{HsSet, Lifted, SearchParams};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WPoint {
    #[serde(with = "crate::rational::ser_vec")]
    pub coords: Vec<Q>,
    #[serde(with = "crate::rational::ser")]
    pub weight: Q,
    pub mult: u64,
}

impl WPoint {
    pub fn unit(coords: Vec<Q>) -> WPoint {
        WPoint {
            coords,
            weight: Q::one(),
            mult: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointMultiset {
    dim: usize,
    points: Vec<WPoint>,
}

impl PointMultiset {
    pub fn new(dim: usize, points: Vec<WPoint>) -> Result<PointMultiset> {
        for p in &points {
            if p.coords.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.coords.len(),
                });
            }
            if p.mult == 0 || p.weight.is_negative() {
                return Err(Error::Precondition(
                    "multiplicities must be ≥ 1 and weights ≥ 0".into(),
                ));
            }
        }
        Ok(PointMultiset { dim, points })
    }

    pub fn from_coords(dim: usize, coords: Vec<Vec<Q>>) -> Result<PointMultiset> {
        PointMultiset::new(dim, coords.into_iter().map(WPoint::unit).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[WPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Σ multiplicities.
    pub fn total(&self) -> u64 {
        self.points.iter().map(|p| p.mult).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    #[serde(with = "crate::rational::ser")]
    pub beta: Q,
    #[serde(with = "crate::rational::ser")]
    pub beta_fallback: Q,
    /// Total degree budget; `None` derives one from the bisection schedule.
    pub degree_cap: Option<usize>,
    pub restart_budget: usize,
    pub seed: u64,
    pub iters: usize,
    /// How many times a round may raise its degree before falling back to slabs.
    pub max_raise: usize,
    pub snap_max: usize,
    pub coeff_bits: i32,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            beta: qf(1, 2),
            beta_fallback: qf(11, 20),
            degree_cap: None,
            restart_budget: 4,
            seed: 0,
            iters: 300,
            max_raise: 3,
            snap_max: 16,
            coeff_bits: 40,
        }
    }
}

/// Degrees the pure bisection schedule would use for `rounds` rounds.
pub fn schedule_degrees(k: usize, rounds: usize) -> Vec<usize> {
    (0..rounds).map(|t| min_degree_for(k, 1usize << t.min(40))).collect()
}

pub fn default_cap(k: usize, r: &Q) -> usize {
    let rounds = (to_f64(r).log2().ceil().max(1.0) as usize).min(40);
    8 * schedule_degrees(k, rounds).iter().sum::<usize>() + 16
}

/// Normalizing frame `y = (x − center) / scale` with dyadic center and a
/// power-of-two scale, chosen so every input lands in [−1, 1]^k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    #[serde(with = "crate::rational::ser_vec")]
    pub center: Vec<Q>,
    #[serde(with = "crate::rational::ser")]
    pub scale: Q,
}

impl Frame {
    pub fn fit<'a>(k: usize, pts: impl Iterator<Item = &'a [Q]>) -> Frame {
        let mut lo: Vec<Option<Q>> = vec![None; k];
        let mut hi: Vec<Option<Q>> = vec![None; k];
        for p in pts {
            for i in 0..k {
                if lo[i].as_ref().is_none_or(|v| &p[i] < v) {
                    lo[i] = Some(p[i].clone());
                }
                if hi[i].as_ref().is_none_or(|v| &p[i] > v) {
                    hi[i] = Some(p[i].clone());
                }
            }
        }
        let mut center = Vec::with_capacity(k);
        let mut half = Q::zero();
        for i in 0..k {
            let (l, h) = match (&lo[i], &hi[i]) {
                (Some(l), Some(h)) => (l.clone(), h.clone()),
                _ => (Q::zero(), Q::zero()),
            };
            let mid = crate::rational::dyadic_round(to_f64(&((&l + &h) / Q::from_integer(2.into()))), 20);
            let ext = (&h - &mid).abs().max((&mid - &l).abs());
            center.push(mid);
            if ext > half {
                half = ext;
            }
        }
        let scale = if half.is_zero() {
            Q::one()
        } else {
            pow2_at_least(&half)
        };
        Frame { center, scale }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn normalize(&self, x: &[Q]) -> Vec<Q> {
        x.iter()
            .zip(&self.center)
            .map(|(v, c)| (v - c) / &self.scale)
            .collect()
    }

    /// Rewrites a polynomial in normalized coordinates as one in `x`.
    pub fn to_global(&self, local: &MPoly) -> MPoly {
        let k = self.dim();
        let inv = self.scale.recip();
        let forms: Vec<MPoly> = (0..k)
            .map(|i| {
                let mut a = vec![Q::zero(); k];
                a[i] = inv.clone();
                MPoly::affine(-(&self.center[i] * &inv), &a)
            })
            .collect();
        local.compose(&forms)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutForm {
    /// Polynomial in the frame's normalized coordinates.
    Poly(MPoly),
    /// `Π_j (dir·y − root_j)` in normalized coordinates; roots ascending.
    Roots {
        #[serde(with = "crate::rational::ser_vec")]
        dir: Vec<Q>,
        #[serde(with = "crate::rational::ser_vec")]
        roots: Vec<Q>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub round: usize,
    pub degree: usize,
    #[serde(with = "crate::rational::ser")]
    pub beta: Q,
    pub form: CutForm,
}

impl Cut {
    pub fn local_poly(&self) -> MPoly {
        match &self.form {
            CutForm::Poly(p) => p.clone(),
            CutForm::Roots { dir, roots } => {
                let k = dir.len();
                let factors: Vec<MPoly> = roots
                    .iter()
                    .map(|r| MPoly::affine(-r.clone(), dir))
                    .collect();
                MPoly::product(k, &factors)
            }
        }
    }

    pub fn global_poly(&self, frame: &Frame) -> MPoly {
        frame.to_global(&self.local_poly())
    }

    pub fn evaluator(&self) -> CutEval {
        match &self.form {
            CutForm::Poly(p) => CutEval::Poly(Box::new(SignEval::new(p))),
            CutForm::Roots { dir, roots } => CutEval::Roots {
                dir: dir.clone(),
                roots: roots.clone(),
            },
        }
    }
}

/// Fast certified sign of one cut at normalized points.
#[derive(Clone, Debug)]
pub enum CutEval {
    Poly(Box<SignEval>),
    Roots { dir: Vec<Q>, roots: Vec<Q> },
}

impl CutEval {
    pub fn sign(&self, y: &[Q], fy: &[Fi]) -> Sign {
        match self {
            CutEval::Poly(se) => se.sign_at_with(fy, y),
            CutEval::Roots { dir, roots } => {
                let t: Q = dir.iter().zip(y).map(|(a, b)| a * b).sum();
                roots_sign(roots, &t)
            }
        }
    }
}

impl CutEval {
    /// Certified strict sign on a box of normalized coordinates.
    pub fn sign_on_box(&self, fb: &[Fi], bx: &[RInterval]) -> Option<Sign> {
        match self {
            CutEval::Poly(se) => se.sign_on_boxes(fb, bx),
            CutEval::Roots { dir, roots } => {
                let t = dir
                    .iter()
                    .zip(bx)
                    .fold(RInterval::point(Q::zero()), |acc, (a, iv)| acc.add(&iv.scale(a)));
                let lo = roots.partition_point(|r| *r < t.lo);
                let hi = roots.partition_point(|r| *r <= t.hi);
                (lo == hi).then(|| roots_sign(roots, &t.lo))
            }
        }
    }
}

/// Sign of `Π (t − ρ_j)` for ascending roots.
fn roots_sign(roots: &[Q], t: &Q) -> Sign {
    match roots.binary_search(t) {
        Ok(_) => Sign::Zero,
        Err(pos) => {
            if (roots.len() - pos).is_multiple_of(2) {
                Sign::Pos
            } else {
                Sign::Neg
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellInfo {
    pub signs: Vec<Sign>,
    pub count: u64,
    #[serde(with = "crate::rational::ser")]
    pub weight: Q,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub total: u64,
    pub max_cell: u64,
    pub degree: usize,
    pub round_degrees: Vec<usize>,
    pub round_sets: Vec<usize>,
    pub round_betas: Vec<String>,
    pub schedule_degrees: Vec<usize>,
    pub degree_raises: usize,
    pub restarts: usize,
    pub on_zero: u64,
    pub degree_cap: usize,
    /// Set when the slab construction replaced the polynomial search.
    pub fallback: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub frame: Frame,
    pub cuts: Vec<Cut>,
    /// Per input point: index into `cells`, or `None` if on Z(g).
    pub cell_of: Vec<Option<usize>>,
    pub cells: Vec<CellInfo>,
    pub stats: PartitionStats,
}

impl PartitionResult {
    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn degree(&self) -> usize {
        self.cuts.iter().map(|c| c.degree).sum()
    }

    /// The partitioning polynomial g = Π cuts, in the original coordinates.
    pub fn g(&self) -> MPoly {
        let k = self.dim();
        let f: Vec<MPoly> = self.cuts.iter().map(|c| c.global_poly(&self.frame)).collect();
        MPoly::product(k, &f)
    }

    pub fn global_cuts(&self) -> Vec<MPoly> {
        self.cuts.iter().map(|c| c.global_poly(&self.frame)).collect()
    }

    pub fn sign_vector(&self, i: usize) -> Option<&[Sign]> {
        self.cell_of[i].map(|c| self.cells[c].signs.as_slice())
    }

    pub fn evaluators(&self) -> Vec<CutEval> {
        self.cuts.iter().map(|c| c.evaluator()).collect()
    }

    /// Sign vector of an arbitrary point; `None` if it lies on Z(g).
    pub fn locate(&self, evals: &[CutEval], x: &[Q]) -> Option<Vec<Sign>> {
        let y = self.frame.normalize(x);
        let fy: Vec<Fi> = y.iter().map(Fi::enclose).collect();
        let mut out = Vec::with_capacity(evals.len());
        for e in evals {
            let s = e.sign(&y, &fy);
            if s == Sign::Zero {
                return None;
            }
            out.push(s);
        }
        Some(out)
    }
}

struct Loc {
    y: Vec<Q>,
    fy: Vec<Fi>,
    mult: u64,
    signs: Vec<Sign>,
    zero: bool,
}

struct Builder {
    k: usize,
    r: Q,
    total: u64,
    locs: Vec<Loc>,
    cuts: Vec<Cut>,
    stats: PartitionStats,
    cap: usize,
}

impl Builder {
    fn reset(&mut self) {
        for l in &mut self.locs {
            l.signs.clear();
            l.zero = false;
        }
        self.cuts.clear();
        let total = self.stats.total;
        let cap = self.stats.degree_cap;
        let restarts = self.stats.restarts;
        self.stats = PartitionStats {
            total,
            degree_cap: cap,
            restarts,
            ..Default::default()
        };
    }

    /// Current cells exceeding |Q|/r, as lists of location indices.
    fn oversized(&self) -> Vec<Vec<usize>> {
        let mut groups: BTreeMap<&[Sign], (Vec<usize>, u64)> = BTreeMap::new();
        for (i, l) in self.locs.iter().enumerate() {
            if !l.zero {
                let g = groups.entry(l.signs.as_slice()).or_default();
                g.0.push(i);
                g.1 += l.mult;
            }
        }
        let total = Q::from_integer(self.total.into());
        groups
            .into_values()
            .filter(|(_, m)| Q::from_integer((*m).into()) * &self.r > total)
            .map(|(v, _)| v)
            .collect()
    }

    fn apply(&mut self, cut: Cut) -> Result<()> {
        let ev = cut.evaluator();
        for l in &mut self.locs {
            if l.zero {
                continue;
            }
            let s = ev.sign(&l.y, &l.fy);
            if s == Sign::Zero {
                l.zero = true;
            }
            l.signs.push(s);
        }
        self.stats.round_degrees.push(cut.degree);
        self.stats.round_betas.push(cut.beta.to_string());
        self.stats.degree += cut.degree;
        self.cuts.push(cut);
        if self.stats.degree > self.cap {
            return Err(Error::DegreeCap {
                cap: self.cap,
                needed: self.stats.degree,
            });
        }
        Ok(())
    }

    /// Polynomial ham-sandwich rounds; `Ok(false)` means the search gave up.
    fn run_general(&mut self, cfg: &PartitionConfig, rng: &mut ChaCha8Rng) -> Result<bool> {
        let params = SearchParams {
            beta: cfg.beta.clone(),
            beta_fallback: cfg.beta_fallback.clone(),
            restarts: cfg.restart_budget.max(1),
            iters: cfg.iters,
            snap_max: cfg.snap_max,
            coeff_bits: cfg.coeff_bits,
        };
        loop {
            let sets = self.oversized();
            if sets.is_empty() {
                return Ok(true);
            }
            let round = self.cuts.len() + 1;
            let d0 = min_degree_for(self.k, sets.len());
            let mut found = None;
            for d in d0..=d0 + cfg.max_raise {
                if self.stats.degree + d > self.cap {
                    break;
                }
                let attempt = {
                    let lifted = ChebLift::new(self, &sets, d);
                    search::find_cut(&lifted, &lifted.sets, &params, rng).map(|f| {
                        let poly = lift::cheb_to_poly(self.k, d, &lifted.exps, &f.coeffs);
                        (f, poly)
                    })
                };
                if let Some((f, poly)) = attempt {
                    self.stats.restarts += f.restarts_used;
                    found = Some(Cut {
                        round,
                        degree: poly.total_degree(),
                        beta: f.beta,
                        form: CutForm::Poly(poly.primitive()),
                    });
                    break;
                }
                self.stats.restarts += params.restarts;
                self.stats.degree_raises += 1;
            }
            let Some(cut) = found else {
                return Ok(false);
            };
            self.stats.round_sets.push(sets.len());
            self.stats.schedule_degrees.push(d0);
            self.apply(cut)?;
        }
    }

    /// Exact one-dimensional rounds along `dir`: one root per oversized cell,
    /// in the gap of its weighted median or on the median itself.
    fn run_slabs(&mut self, dir: Vec<Q>) -> Result<()> {
        let t: Vec<Q> = self
            .locs
            .iter()
            .map(|l| dir.iter().zip(&l.y).map(|(a, b)| a * b).sum())
            .collect();
        let total = Q::from_integer(self.total.into());
        let vanish = self.r > total;
        loop {
            let sets = self.oversized();
            if sets.is_empty() {
                return Ok(());
            }
            let mut roots: Vec<Q> = Vec::new();
            if vanish {
                roots = sets.iter().flatten().map(|&i| t[i].clone()).collect();
            } else {
                for s in &sets {
                    roots.push(median_root(s, &t, &self.locs));
                }
            }
            roots.sort();
            roots.dedup();
            let round = self.cuts.len() + 1;
            self.stats.round_sets.push(sets.len());
            self.stats.schedule_degrees.push(min_degree_for(self.k, sets.len()));
            let cut = Cut {
                round,
                degree: roots.len(),
                beta: qf(1, 2),
                form: CutForm::Roots {
                    dir: dir.clone(),
                    roots,
                },
            };
            self.apply(cut)?;
        }
    }
}

/// Root bisecting a set of locations along `t` at β = 1/2.
fn median_root(set: &[usize], t: &[Q], locs: &[Loc]) -> Q {
    // Group by t value: distinct locations may share a projection.
    let mut by_t: BTreeMap<&Q, u64> = BTreeMap::new();
    for &i in set {
        *by_t.entry(&t[i]).or_default() += locs[i].mult;
    }
    let m: u64 = by_t.values().sum();
    let vals: Vec<(&Q, u64)> = by_t.into_iter().collect();
    let mut acc = 0u64;
    for (j, &(v, w)) in vals.iter().enumerate() {
        acc += w;
        if 2 * acc == m && j + 1 < vals.len() {
            return (v + vals[j + 1].0) / Q::from_integer(2.into());
        }
        if 2 * acc >= m {
            return v.clone();
        }
    }
    unreachable!("nonempty set")
}

/// Chebyshev lift of the locations taking part in one round.
struct ChebLift<'a> {
    b: &'a Builder,
    d: usize,
    exps: Vec<Vec<u32>>,
    locs: Vec<usize>,
    rows: Vec<f64>,
    sets: Vec<HsSet>,
}

impl<'a> ChebLift<'a> {
    fn new(b: &'a Builder, sets: &[Vec<usize>], d: usize) -> ChebLift<'a> {
        let exps = lift::exponents(b.k, d);
        let mut locs = Vec::new();
        let mut rows = Vec::new();
        let mut hs = Vec::new();
        let mut buf = Vec::new();
        for s in sets {
            let mut h = Vec::with_capacity(s.len());
            for &i in s {
                let yf: Vec<f64> = b.locs[i].y.iter().map(to_f64).collect();
                lift::cheb_row_f64(&yf, &exps, d, &mut buf);
                rows.extend_from_slice(&buf);
                h.push((locs.len(), b.locs[i].mult));
                locs.push(i);
            }
            hs.push(h);
        }
        ChebLift {
            b,
            d,
            exps,
            locs,
            rows,
            sets: hs,
        }
    }
}

impl Lifted for ChebLift<'_> {
    fn ncols(&self) -> usize {
        self.exps.len() + 1
    }

    fn row(&self, i: usize) -> &[f64] {
        let m = self.ncols();
        &self.rows[i * m..(i + 1) * m]
    }

    fn exact_row(&self, i: usize) -> Vec<Q> {
        lift::cheb_row_exact(&self.b.locs[self.locs[i]].y, &self.exps, self.d)
    }

    fn signs(&self, coeffs: &[Q], rows: &[usize]) -> Vec<Sign> {
        let poly = lift::cheb_to_poly(self.b.k, self.d, &self.exps, coeffs);
        let se = SignEval::new(&poly);
        rows.iter()
            .map(|&r| {
                let l = &self.b.locs[self.locs[r]];
                se.sign_at_with(&l.fy, &l.y)
            })
            .collect()
    }
}

/// Builds a (1/r)-partitioning polynomial for `q`.
pub fn partitioning_polynomial(
    q: &PointMultiset,
    r: &Q,
    cfg: &PartitionConfig,
) -> Result<PartitionResult> {
    let k = q.dim();
    if k == 0 {
        return Err(Error::Precondition("dimension must be ≥ 1".into()));
    }
    if *r <= Q::one() {
        return Err(Error::Precondition("r must exceed 1".into()));
    }
    if cfg.beta < qf(1, 2) || cfg.beta >= Q::one() || cfg.beta_fallback < cfg.beta {
        return Err(Error::Config("need 1/2 ≤ beta ≤ beta_fallback < 1".into()));
    }
    // Identical locations are merged into multiplicities.
    let mut index: BTreeMap<&[Q], usize> = BTreeMap::new();
    let mut loc_of = Vec::with_capacity(q.len());
    let mut uniq: Vec<(&[Q], u64)> = Vec::new();
    for p in q.points() {
        let id = *index.entry(p.coords.as_slice()).or_insert_with(|| {
            uniq.push((p.coords.as_slice(), 0));
            uniq.len() - 1
        });
        uniq[id].1 += p.mult;
        loc_of.push(id);
    }
    let frame = Frame::fit(k, uniq.iter().map(|u| u.0));
    let locs: Vec<Loc> = uniq
        .iter()
        .map(|(x, mult)| {
            let y = frame.normalize(x);
            let fy = y.iter().map(Fi::enclose).collect();
            Loc {
                y,
                fy,
                mult: *mult,
                signs: Vec::new(),
                zero: false,
            }
        })
        .collect();
    let total = q.total();
    let cap = cfg.degree_cap.unwrap_or_else(|| default_cap(k, r));
    let mut b = Builder {
        k,
        r: r.clone(),
        total,
        locs,
        cuts: Vec::new(),
        stats: PartitionStats {
            total,
            degree_cap: cap,
            ..Default::default()
        },
        cap,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let total_q = Q::from_integer(total.into());
    if k == 1 {
        b.run_slabs(vec![Q::one()])?;
    } else if *r > total_q || !b.run_general(cfg, &mut rng)? {
        let tag = if *r > total_q { "vanishing" } else { "slabs" };
        b.reset();
        let dir: Vec<Q> = (0..k)
            .map(|_| Q::from_integer(rng.random_range(1i64..=1 << 16).into()))
            .collect();
        b.run_slabs(dir)?;
        b.stats.fallback = Some(tag.to_string());
    }
    Ok(finish(q, b, frame, &loc_of))
}

fn finish(q: &PointMultiset, b: Builder, frame: Frame, loc_of: &[usize]) -> PartitionResult {
    let mut cell_index: BTreeMap<&[Sign], usize> = BTreeMap::new();
    for l in &b.locs {
        if !l.zero {
            let n = cell_index.len();
            cell_index.entry(l.signs.as_slice()).or_insert(n);
        }
    }
    // Renumber cells by sign vector order for stable output.
    let order: Vec<&[Sign]> = cell_index.keys().cloned().collect();
    let id_of: BTreeMap<&[Sign], usize> = order.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut cells: Vec<CellInfo> = order
        .iter()
        .map(|s| CellInfo {
            signs: s.to_vec(),
            count: 0,
            weight: Q::zero(),
        })
        .collect();
    let mut stats = b.stats.clone();
    let mut cell_of = Vec::with_capacity(q.len());
    for (p, &li) in q.points().iter().zip(loc_of) {
        let l = &b.locs[li];
        if l.zero {
            stats.on_zero += p.mult;
            cell_of.push(None);
        } else {
            let c = id_of[l.signs.as_slice()];
            cells[c].count += p.mult;
            cells[c].weight += &p.weight * Q::from_integer(p.mult.into());
            cell_of.push(Some(c));
        }
    }
    stats.max_cell = cells.iter().map(|c| c.count).max().unwrap_or(0);
    PartitionResult {
        frame,
        cuts: b.cuts,
        cell_of,
        cells,
        stats,
    }
}

/// Affine functional `h(z) = c + Σ a_i z_i` on lifted space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineFunctional {
    #[serde(with = "crate::rational::ser_vec")]
    pub coeffs: Vec<Q>,
    #[serde(with = "crate::rational::ser")]
    pub constant: Q,
}

impl AffineFunctional {
    pub fn eval(&self, z: &[Q]) -> Q {
        &self.constant + self.coeffs.iter().zip(z).map(|(a, b)| a * b).sum::<Q>()
    }
}

/// Lifted point sets, each a list of (point, multiplicity).
pub type LiftedSet = Vec<(Vec<Q>, u64)>;

struct Explicit {
    m: usize,
    rows: Vec<f64>,
    exact: Vec<Vec<Q>>,
}

impl Lifted for Explicit {
    fn ncols(&self) -> usize {
        self.m + 1
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * (self.m + 1)..(i + 1) * (self.m + 1)]
    }

    fn exact_row(&self, i: usize) -> Vec<Q> {
        let mut r = self.exact[i].clone();
        r.push(Q::one());
        r
    }

    fn signs(&self, coeffs: &[Q], rows: &[usize]) -> Vec<Sign> {
        rows.iter()
            .map(|&i| {
                let v: Q = self.exact[i].iter().zip(coeffs).map(|(a, b)| a * b).sum::<Q>()
                    + &coeffs[self.m];
                Sign::of(&v)
            })
            .collect()
    }
}

/// An affine functional on ℝ^m leaving at most β·|S| of every set strictly
/// on each side, verified by exact counting.
pub fn ham_sandwich_cut(sets: &[LiftedSet], beta: &Q, seed: u64) -> Result<AffineFunctional> {
    let m = sets
        .iter()
        .flat_map(|s| s.iter().map(|p| p.0.len()))
        .next()
        .unwrap_or(1);
    if sets.len() > m.max(1) {
        return Err(Error::Precondition(format!(
            "{} sets cannot be bisected in ℝ^{m}",
            sets.len()
        )));
    }
    if *beta < qf(1, 2) {
        return Err(Error::Precondition("beta must be ≥ 1/2".into()));
    }
    let mut ex = Explicit {
        m,
        rows: Vec::new(),
        exact: Vec::new(),
    };
    let mut hs = Vec::new();
    for s in sets {
        let mut h = Vec::new();
        for (p, mult) in s {
            if p.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: p.len(),
                });
            }
            ex.rows.extend(p.iter().map(to_f64));
            ex.rows.push(1.0);
            h.push((ex.exact.len(), *mult));
            ex.exact.push(p.clone());
        }
        hs.push(h);
    }
    let params = SearchParams {
        beta: beta.clone(),
        beta_fallback: beta.clone(),
        restarts: 8,
        iters: 300,
        snap_max: 16,
        coeff_bits: 40,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = search::find_cut(&ex, &hs, &params, &mut rng).ok_or(Error::CutSearchFailed {
        restarts: params.restarts,
        sets: sets.len(),
        dim: m,
    })?;
    Ok(AffineFunctional {
        constant: f.coeffs[m].clone(),
        coeffs: f.coeffs[..m].to_vec(),
    })
}

#[cfg(test)]
mod tests;
