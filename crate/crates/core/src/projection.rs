//! Certified projections of varieties onto coordinate spaces.
//!
//! Each stage shears the last variable into the others, recomputes the lex
//! basis and accepts the shear once some basis element has a pure power of
//! that variable as its leading monomial; the elimination ideal then cuts out
//! the projection of the variety. The trivial shear (all λ = 0) is tried
//! first.

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groebner::{
    buchberger, elimination_gens, ideal_dimension, pure_power_leader, Budget, GBasis, IdealGens,
    PurePower,
};
use crate::poly::{LinearMap, MPoly, MapKind};
use crate::rational::Q;

/// A variety carried as generators plus their reduced lex basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyHandle {
    pub gens: IdealGens,
    pub gb: GBasis,
    pub claimed_dim: i64,
    /// Running product D_1⋯D_i of partitioning degrees.
    pub degree_ledger: u64,
}

impl VarietyHandle {
    /// All of ℂ^d.
    pub fn ambient(d: usize) -> VarietyHandle {
        let gens = IdealGens::new(d, vec![]);
        let gb = buchberger(&gens, &Budget::default()).expect("zero ideal");
        VarietyHandle {
            gens,
            gb,
            claimed_dim: d as i64,
            degree_ledger: 1,
        }
    }

    pub fn new(gens: IdealGens, degree_ledger: u64, budget: &Budget) -> Result<VarietyHandle> {
        let gb = buchberger(&gens, budget)?;
        let claimed_dim = ideal_dimension(&gb);
        Ok(VarietyHandle {
            gens,
            gb,
            claimed_dim,
            degree_ledger: degree_ledger.max(1),
        })
    }

    pub fn from_polys(nvars: usize, polys: Vec<MPoly>, budget: &Budget) -> Result<VarietyHandle> {
        VarietyHandle::new(IdealGens::new(nvars, polys), 1, budget)
    }

    pub fn nvars(&self) -> usize {
        self.gens.nvars()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    /// Integer shear coefficients are drawn from [1, lambda_max].
    pub lambda_max: u64,
    /// Random shears tried after the trivial one, per stage.
    pub max_retries: usize,
    pub budget: Budget,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig {
            lambda_max: 1 << 16,
            max_retries: 5,
            budget: Budget::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    /// Number of variables before the stage.
    pub vars: usize,
    #[serde(with = "crate::rational::ser_vec")]
    pub lambdas: Vec<Q>,
    /// D with x_vars^D the pure-power leader.
    pub leader_degree: u32,
    pub basis_size: usize,
    /// Random shears tried after the trivial one.
    pub retries: usize,
    pub dim_before: i64,
    pub dim_after: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionCertificate {
    pub ambient: usize,
    pub target: usize,
    pub stages: Vec<StageRecord>,
    /// Generators of the final elimination ideal; empty when valid.
    pub final_elimination: Vec<MPoly>,
}

impl ProjectionCertificate {
    pub fn total_retries(&self) -> usize {
        self.stages.iter().map(|s| s.retries).sum()
    }

    pub fn max_stage_retries(&self) -> usize {
        self.stages.iter().map(|s| s.retries).max().unwrap_or(0)
    }

    /// Shear of ℝ^ambient equal to the composition of all stage shears.
    pub fn composed_shear(&self) -> LinearMap {
        let d = self.ambient;
        let mut t = LinearMap::identity(d);
        for s in &self.stages {
            let sh = LinearMap::shear(d, s.vars - 1, &s.lambdas);
            t = t.compose(&sh, MapKind::Shear);
        }
        t
    }

    /// The certified projection ℝ^ambient → ℝ^target.
    pub fn projection(&self) -> LinearMap {
        let inv = self.composed_shear().inverse().expect("shears are unimodular");
        LinearMap::drop_to(self.ambient, self.target).compose(&inv, MapKind::Projection)
    }
}

/// Integer shear coefficients λ_1..λ_{i−1}, uniform in [1, lambda_max].
pub fn random_shear_coeffs(stage: usize, lambda_max: u64, rng: &mut impl Rng) -> Vec<Q> {
    (1..stage)
        .map(|_| Q::from_integer(rng.random_range(1..=lambda_max.max(1)).into()))
        .collect()
}

/// One certified stage: shear x_i into x_1..x_{i−1}, then eliminate x_i.
pub fn project_once(
    v: &VarietyHandle,
    cfg: &ProjectionConfig,
    rng: &mut impl Rng,
) -> Result<(LinearMap, VarietyHandle, StageRecord)> {
    let i = v.nvars();
    if v.gb.is_unit() {
        return Err(Error::Precondition("variety is empty".into()));
    }
    if v.claimed_dim < 1 || v.claimed_dim > i as i64 - 1 {
        return Err(Error::Precondition(format!(
            "ideal dimension {} outside [1, {}]",
            v.claimed_dim,
            i - 1
        )));
    }
    for retry in 0..=cfg.max_retries {
        let lambdas = if retry == 0 {
            vec![Q::zero(); i - 1]
        } else {
            random_shear_coeffs(i, cfg.lambda_max, rng)
        };
        let gb = if retry == 0 {
            v.gb.clone()
        } else {
            let sheared: Vec<MPoly> = v
                .gb
                .basis()
                .iter()
                .map(|g| crate::poly::shear(g, i - 1, &lambdas))
                .collect();
            buchberger(&IdealGens::new(i, sheared), &cfg.budget)?
        };
        let PurePower::Found(deg) = pure_power_leader(&gb, i - 1) else {
            continue;
        };
        let elim = elimination_gens(&gb, i - 1);
        let gens = IdealGens::new(i - 1, elim.clone());
        let next = VarietyHandle {
            gens,
            gb: GBasis::from_reduced(i - 1, elim),
            claimed_dim: 0,
            degree_ledger: v.degree_ledger,
        };
        let dim_after = ideal_dimension(&next.gb);
        if dim_after != v.claimed_dim {
            return Err(Error::Projection(format!(
                "dimension changed from {} to {dim_after} despite a pure-power leader",
                v.claimed_dim
            )));
        }
        let next = VarietyHandle {
            claimed_dim: dim_after,
            ..next
        };
        let rec = StageRecord {
            vars: i,
            lambdas: lambdas.clone(),
            leader_degree: deg,
            basis_size: gb.basis().len(),
            retries: retry,
            dim_before: v.claimed_dim,
            dim_after,
        };
        return Ok((LinearMap::shear(i, i - 1, &lambdas), next, rec));
    }
    Err(Error::Projection(format!(
        "no pure-power leader in x{i} after {} random shears",
        cfg.max_retries
    )))
}

/// Composes d−k certified stages into π: ℝ^d → ℝ^k with π(V) dense in ℂ^k.
pub fn build_projection(
    v: &VarietyHandle,
    k: usize,
    cfg: &ProjectionConfig,
    rng: &mut impl Rng,
) -> Result<(LinearMap, ProjectionCertificate)> {
    let d = v.nvars();
    if k < 1 || k >= d {
        return Err(Error::Precondition(format!("target dimension {k} outside [1, {}]", d - 1)));
    }
    if v.claimed_dim != k as i64 {
        return Err(Error::Precondition(format!(
            "variety has dimension {}, not {k}",
            v.claimed_dim
        )));
    }
    let mut cur = v.clone();
    let mut stages = Vec::new();
    while cur.nvars() > k {
        let (_, next, rec) = project_once(&cur, cfg, rng)?;
        stages.push(rec);
        cur = next;
    }
    let cert = ProjectionCertificate {
        ambient: d,
        target: k,
        stages,
        final_elimination: cur.gb.basis().to_vec(),
    };
    if !cert.final_elimination.is_empty() {
        return Err(Error::Projection("final elimination ideal is not zero".into()));
    }
    Ok((cert.projection(), cert))
}

/// Re-derives the certificate from scratch: one basis of the generators
/// under the composed shear, a pure-power leader for every eliminated
/// variable, and a zero elimination ideal in the target variables.
pub fn verify_certificate(
    v: &VarietyHandle,
    pi: &LinearMap,
    cert: &ProjectionCertificate,
    budget: &Budget,
) -> Result<bool> {
    let d = v.nvars();
    if cert.ambient != d || pi.ncols() != d || pi.nrows() != cert.target {
        return Ok(false);
    }
    if cert.stages.len() != d - cert.target || *pi != cert.projection() {
        return Ok(false);
    }
    let t = cert.composed_shear();
    let gens: Vec<MPoly> = v
        .gens
        .gens()
        .iter()
        .map(|g| crate::poly::pullback(g, &t))
        .collect::<Result<_>>()?;
    let gb = buchberger(&IdealGens::new(d, gens), budget)?;
    for s in &cert.stages {
        let sub = GBasis::from_reduced(s.vars, elimination_gens(&gb, s.vars));
        if !matches!(pure_power_leader(&sub, s.vars - 1), PurePower::Found(_)) {
            return Ok(false);
        }
    }
    Ok(cert.final_elimination.is_empty() && elimination_gens(&gb, cert.target).is_empty())
}

#[cfg(test)]
mod tests;
