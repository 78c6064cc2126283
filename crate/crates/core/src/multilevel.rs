//! The d-level construction: partition, trap the points lying on the zero
//! set, project the variety they live on one dimension down, and partition
//! again with a much larger parameter.
//!
//! Level i works in ℝ^{d−i+1}: the points still on Z(g_1,…,g_{i−1}) are
//! pushed through a certified projection of that variety, partitioned
//! there, and the cuts are pulled back to ℝ^d. Regions are the sign cells
//! of a level's cuts (optionally split further by grid flood fill).

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cells::{refine_components, BoxCover, GridLabels, GridSpec};
use crate::error::{Error, Result};
use crate::groebner::{buchberger, normal_form, IdealGens};
use crate::partition::{
    default_cap, partitioning_polynomial, Cut, CutEval, CutForm, Frame, PartitionConfig,
    PartitionStats, PointMultiset, WPoint,
};
use crate::poly::{pullback, LinearMap, MPoly, Sign};
use crate::projection::{build_projection, ProjectionCertificate, ProjectionConfig, VarietyHandle};
use crate::rational::Q;

/// SplitMix64 finalizer over a sequence of words; used for per-level and
/// per-node seeds so results never depend on scheduling.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut z = seed;
    for &p in parts {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(p.wrapping_mul(0xD6E8_FEB8_6659_FD93));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultilevelConfig {
    /// Schedule exponent: r_{i+1} = r_i^c.
    pub c: u32,
    pub partition: PartitionConfig,
    pub projection: ProjectionConfig,
    pub seed: u64,
    /// Forces g_1 instead of computing a partitioning polynomial.
    pub seed_polynomial: Option<MPoly>,
    /// Stop after this many levels (default: the dimension).
    pub max_levels: Option<usize>,
    /// Split sign cells into grid-connected pieces.
    pub refine: Option<GridSpec>,
    /// Boxes per region cover.
    pub cover_boxes: usize,
    /// Fresh partitions tried when a level's polynomial vanishes on the variety.
    pub resample_budget: usize,
}

impl Default for MultilevelConfig {
    fn default() -> Self {
        MultilevelConfig {
            c: 2,
            partition: PartitionConfig::default(),
            projection: ProjectionConfig::default(),
            seed: 0,
            seed_polynomial: None,
            max_levels: None,
            refine: None,
            cover_boxes: 16,
            resample_budget: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub level: usize,
    pub index: usize,
    pub sign_id: Vec<Sign>,
    /// Grid component within the sign cell, when refined.
    pub component: Option<usize>,
    #[serde(with = "crate::rational::ser_vec")]
    pub witness: Vec<Q>,
    pub count: u64,
    #[serde(with = "crate::rational::ser")]
    pub weight: Q,
    /// Indices into the input point list.
    pub members: Vec<usize>,
    pub cover: BoxCover,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    #[serde(with = "crate::rational::ser")]
    pub r: Q,
    /// π_i: ℝ^d → ℝ^k (identity at level 1).
    pub projection: LinearMap,
    pub certificate: Option<ProjectionCertificate>,
    /// Cuts in ℝ^k, expressed through `frame`; g_i is their product pulled back by π_i.
    pub frame: Frame,
    pub cuts: Vec<Cut>,
    pub stats: PartitionStats,
    pub regions: Vec<Region>,
    pub variety_before: VarietyHandle,
    /// Achieved degree D_i = deg g_i.
    pub degree: usize,
    pub degree_cap: usize,
    /// Points (with multiplicity) entering the level, |Q_{i−1}|.
    pub input: u64,
    /// Points left on Z(g_i), |Q_i|.
    pub on_zero: u64,
    /// Partition attempts discarded because g_i vanished on the variety.
    pub resamples: usize,
}

impl LevelRecord {
    pub fn target_dim(&self) -> usize {
        self.projection.nrows()
    }

    /// Factors of g_i as polynomials on ℝ^d.
    pub fn g_factors(&self) -> Vec<MPoly> {
        self.cuts
            .iter()
            .map(|c| pullback(&c.global_poly(&self.frame), &self.projection).expect("surjective"))
            .collect()
    }

    pub fn g(&self) -> MPoly {
        MPoly::product(self.projection.ncols(), &self.g_factors())
    }

    pub fn max_region(&self) -> u64 {
        self.regions.iter().map(|r| r.count).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiPartition {
    pub dim: usize,
    pub total: u64,
    #[serde(with = "crate::rational::ser")]
    pub r: Q,
    /// r_1..r_d of the schedule.
    #[serde(with = "crate::rational::ser_vec")]
    pub schedule: Vec<Q>,
    pub levels: Vec<LevelRecord>,
    pub exceptional: Vec<WPoint>,
    pub exceptional_index: Vec<usize>,
    /// Δ_i = D_1⋯D_i for completed levels.
    pub ledger: Vec<u64>,
    pub config: MultilevelConfig,
}

impl MultiPartition {
    pub fn regions(&self) -> impl Iterator<Item = &Region> {
        self.levels.iter().flat_map(|l| l.regions.iter())
    }

    pub fn exceptional_count(&self) -> u64 {
        self.exceptional.iter().map(|p| p.mult).sum()
    }

    /// Distinct locations in P*.
    pub fn exceptional_locations(&self) -> usize {
        let mut v: Vec<&[Q]> = self.exceptional.iter().map(|p| p.coords.as_slice()).collect();
        v.sort();
        v.dedup();
        v.len()
    }
}

/// True iff g is not in the ideal of V — necessary for g not to vanish on
/// any component of V.
pub fn nonvanishing_check(v: &VarietyHandle, g: &MPoly) -> bool {
    !normal_form(g, &v.gb).is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerLine {
    pub level: usize,
    pub degree: usize,
    pub cap: usize,
    pub delta: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub lines: Vec<LedgerLine>,
    pub exceptional_locations: usize,
    pub violations: Vec<String>,
}

impl LedgerReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks deg g_i ≤ cap_i, Δ_i = Π D_j, the schedule bounds, and
/// |P*| ≤ Δ of the last level (counting distinct locations).
pub fn degree_ledger_check(mp: &MultiPartition) -> LedgerReport {
    let mut violations = Vec::new();
    let mut lines = Vec::new();
    let mut delta: u64 = 1;
    if mp.ledger.len() != mp.levels.len() {
        violations.push(format!(
            "ledger has {} entries for {} levels",
            mp.ledger.len(),
            mp.levels.len()
        ));
    }
    let d = mp.dim.max(1) as u32;
    let r_max = num_traits::pow(mp.r.clone(), (mp.config.c.max(1) as usize).pow(d - 1));
    for (i, l) in mp.levels.iter().enumerate() {
        let g_deg: usize = l.cuts.iter().map(|c| c.degree).sum();
        if g_deg != l.degree {
            violations.push(format!("level {}: recorded degree {} ≠ Σ cut degrees {g_deg}", l.level, l.degree));
        }
        if l.degree > l.degree_cap {
            violations.push(format!("level {}: degree {} exceeds cap {}", l.level, l.degree, l.degree_cap));
        }
        if l.r < mp.r || l.r > r_max {
            violations.push(format!("level {}: r_i outside [r, r^K]", l.level));
        }
        delta = delta.saturating_mul(l.degree.max(1) as u64);
        if mp.ledger.get(i) != Some(&delta) {
            violations.push(format!("level {}: Δ recorded {:?}, expected {delta}", l.level, mp.ledger.get(i)));
        }
        lines.push(LedgerLine {
            level: l.level,
            degree: l.degree,
            cap: l.degree_cap,
            delta,
        });
    }
    let locs = mp.exceptional_locations();
    if locs as u64 > delta && !mp.exceptional.is_empty() {
        violations.push(format!("|P*| has {locs} locations, more than Δ = {delta}"));
    }
    LedgerReport {
        lines,
        exceptional_locations: locs,
        violations,
    }
}

/// Builds P*, the regions P_ij and per-level data for a weighted point set.
pub fn build_multipartition(
    p: &PointMultiset,
    r: &Q,
    cfg: &MultilevelConfig,
) -> Result<MultiPartition> {
    let d = p.dim();
    if d == 0 {
        return Err(Error::Precondition("dimension must be ≥ 1".into()));
    }
    if *r <= Q::one() {
        return Err(Error::Precondition("r must exceed 1".into()));
    }
    if cfg.c < 1 {
        return Err(Error::Config("c must be ≥ 1".into()));
    }
    if let Some(s) = &cfg.seed_polynomial {
        if s.nvars() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.nvars(),
            });
        }
        if s.is_constant() {
            return Err(Error::Precondition("seed polynomial must be nonconstant".into()));
        }
    }
    let mut schedule = vec![r.clone()];
    for _ in 1..d {
        let last = schedule.last().unwrap().clone();
        schedule.push(num_traits::pow(last, cfg.c as usize));
    }
    let max_levels = cfg.max_levels.unwrap_or(d).clamp(1, d);
    let mut live: Vec<usize> = (0..p.len()).collect();
    let mut variety = VarietyHandle::ambient(d);
    let mut levels: Vec<LevelRecord> = Vec::new();
    let mut ledger = Vec::new();
    let mut delta: u64 = 1;
    for i in 1..=max_levels {
        if live.is_empty() {
            break;
        }
        let (rec, next_live, next_variety) =
            build_level(p, &live, &variety, i, &schedule[i - 1], cfg, i < max_levels)
                .map_err(|e| e.at_level(i))?;
        delta = delta.saturating_mul(rec.degree.max(1) as u64);
        ledger.push(delta);
        levels.push(rec);
        live = next_live;
        if let Some(v) = next_variety {
            variety = VarietyHandle {
                degree_ledger: delta,
                ..v
            };
        }
    }
    let exceptional = live.iter().map(|&j| p.points()[j].clone()).collect();
    Ok(MultiPartition {
        dim: d,
        total: p.total(),
        r: r.clone(),
        schedule,
        levels,
        exceptional,
        exceptional_index: live,
        ledger,
        config: cfg.clone(),
    })
}

type LevelOut = (LevelRecord, Vec<usize>, Option<VarietyHandle>);

fn build_level(
    p: &PointMultiset,
    live: &[usize],
    variety: &VarietyHandle,
    i: usize,
    r_i: &Q,
    cfg: &MultilevelConfig,
    need_next: bool,
) -> Result<LevelOut> {
    let d = p.dim();
    let k = d - i + 1;
    let (pi, certificate) = if i == 1 {
        (LinearMap::identity(d), None)
    } else {
        if variety.claimed_dim != k as i64 {
            return Err(Error::Projection(format!(
                "variety has dimension {}, expected {k}",
                variety.claimed_dim
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[i as u64, 1]));
        let (pi, cert) = build_projection(variety, k, &cfg.projection, &mut rng)?;
        (pi, Some(cert))
    };
    let projected: Vec<WPoint> = live
        .iter()
        .map(|&j| {
            let w = &p.points()[j];
            WPoint {
                coords: pi.apply(&w.coords),
                weight: w.weight.clone(),
                mult: w.mult,
            }
        })
        .collect();
    let input: u64 = projected.iter().map(|w| w.mult).sum();
    let multiset = PointMultiset::new(k, projected)?;
    let mut resamples = 0;
    loop {
        let (frame, cuts, stats, cell_of, cap) = match (&cfg.seed_polynomial, i) {
            (Some(s), 1) => seeded_level(&multiset, s),
            _ => {
                let mut pc = cfg.partition.clone();
                pc.seed = derive_seed(cfg.seed, &[i as u64, 2, resamples as u64]);
                let res = partitioning_polynomial(&multiset, r_i, &pc)?;
                let cap = pc.degree_cap.unwrap_or_else(|| default_cap(k, r_i));
                let cell_of = (0..multiset.len())
                    .map(|j| res.sign_vector(j).map(|s| s.to_vec()))
                    .collect();
                (res.frame, res.cuts, res.stats, cell_of, cap)
            }
        };
        let degree: usize = cuts.iter().map(|c| c.degree).sum();
        let next_live: Vec<usize> = live
            .iter()
            .zip(&cell_of)
            .filter(|(_, c)| c.is_none())
            .map(|(&j, _)| j)
            .collect();
        let rec = LevelRecord {
            level: i,
            r: r_i.clone(),
            projection: pi.clone(),
            certificate: certificate.clone(),
            frame,
            cuts,
            stats,
            regions: Vec::new(),
            variety_before: variety.clone(),
            degree,
            degree_cap: cap,
            input,
            on_zero: next_live.iter().map(|&j| p.points()[j].mult).sum(),
            resamples,
        };
        // A live point off Z(g_i) certifies g_i ∉ I(V_{i−1}); only when every
        // point is trapped does the normal form have to decide.
        let g = (next_live.len() == live.len() && i > 1).then(|| rec.g());
        let vanishes = g.as_ref().is_some_and(|g| !nonvanishing_check(variety, g));
        let next_variety = if need_next && !next_live.is_empty() && !vanishes {
            let g = g.unwrap_or_else(|| rec.g());
            let mut gens = variety.gens.clone();
            gens.push(g.clone());
            let mut basis = variety.gb.basis().to_vec();
            basis.push(g);
            let gb = buchberger(&IdealGens::new(d, basis), &cfg.projection.budget)?;
            let v = VarietyHandle {
                gens,
                claimed_dim: crate::groebner::ideal_dimension(&gb),
                gb,
                degree_ledger: 1,
            };
            Some(v)
        } else {
            None
        };
        let dim_ok = next_variety.as_ref().is_none_or(|v| v.claimed_dim == k as i64 - 1);
        if vanishes || !dim_ok {
            if cfg.seed_polynomial.is_some() && i == 1 {
                return Err(Error::Precondition("seed polynomial does not cut the dimension".into()));
            }
            resamples += 1;
            if resamples > cfg.resample_budget {
                return Err(Error::Projection(format!(
                    "g_{i} kept vanishing on a component after {resamples} partitions"
                )));
            }
            continue;
        }
        let mut rec = rec;
        rec.regions = make_regions(p, live, &multiset, &rec, &cell_of, cfg);
        return Ok((rec, next_live, next_variety));
    }
}

type Assignment = (Frame, Vec<Cut>, PartitionStats, Vec<Option<Vec<Sign>>>, usize);

fn seeded_level(q: &PointMultiset, s: &MPoly) -> Assignment {
    let k = q.dim();
    let frame = Frame {
        center: vec![Q::zero(); k],
        scale: Q::one(),
    };
    let deg = s.total_degree();
    let cut = Cut {
        round: 0,
        degree: deg,
        beta: Q::one(),
        form: CutForm::Poly(s.clone()),
    };
    let eval = cut.evaluator();
    let cell_of: Vec<Option<Vec<Sign>>> = q
        .points()
        .iter()
        .map(|w| {
            let fy: Vec<_> = w.coords.iter().map(crate::poly::Fi::enclose).collect();
            match eval.sign(&w.coords, &fy) {
                Sign::Zero => None,
                sg => Some(vec![sg]),
            }
        })
        .collect();
    let stats = PartitionStats {
        total: q.total(),
        degree: deg,
        round_degrees: vec![deg],
        degree_cap: deg,
        on_zero: q
            .points()
            .iter()
            .zip(&cell_of)
            .filter(|(_, c)| c.is_none())
            .map(|(w, _)| w.mult)
            .sum(),
        fallback: Some("seeded".into()),
        ..Default::default()
    };
    (frame, vec![cut], stats, cell_of, deg)
}

fn make_regions(
    p: &PointMultiset,
    live: &[usize],
    projected: &PointMultiset,
    rec: &LevelRecord,
    cell_of: &[Option<Vec<Sign>>],
    cfg: &MultilevelConfig,
) -> Vec<Region> {
    let mut cells: std::collections::BTreeMap<&[Sign], Vec<usize>> = Default::default();
    for (t, c) in cell_of.iter().enumerate() {
        if let Some(s) = c {
            cells.entry(s.as_slice()).or_default().push(t);
        }
    }
    let grid = cfg.refine.as_ref().and_then(|spec| {
        let evals: Vec<CutEval> = rec.cuts.iter().map(|c| c.evaluator()).collect();
        GridLabels::new(rec.target_dim(), &evals, spec)
    });
    let mut regions = Vec::new();
    for (signs, members) in cells {
        let groups: Vec<(Option<usize>, Vec<usize>)> = match &grid {
            Some(g) => {
                let ys: Vec<Vec<Q>> = members
                    .iter()
                    .map(|&t| rec.frame.normalize(&projected.points()[t].coords))
                    .collect();
                refine_components(g, signs, &ys)
                    .into_iter()
                    .enumerate()
                    .map(|(ci, grp)| (Some(ci), grp.into_iter().map(|j| members[j]).collect()))
                    .collect()
            }
            None => vec![(None, members)],
        };
        for (component, grp) in groups {
            let idx: Vec<usize> = grp.iter().map(|&t| live[t]).collect();
            let pts: Vec<&[Q]> = idx.iter().map(|&j| p.points()[j].coords.as_slice()).collect();
            let count = idx.iter().map(|&j| p.points()[j].mult).sum();
            let weight = idx
                .iter()
                .map(|&j| {
                    let w = &p.points()[j];
                    &w.weight * Q::from_integer(w.mult.into())
                })
                .sum();
            regions.push(Region {
                level: rec.level,
                index: regions.len(),
                sign_id: signs.to_vec(),
                component,
                witness: pts[0].to_vec(),
                count,
                weight,
                cover: BoxCover::from_points(&pts, cfg.cover_boxes),
                members: idx,
            });
        }
    }
    regions
}
