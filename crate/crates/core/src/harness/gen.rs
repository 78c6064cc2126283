//! Deterministic point and range generators with exact rational output.

use std::str::FromStr;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cells::Range;
use crate::error::{Error, Result};
use crate::partition::PointMultiset;
use crate::poly::MPoly;
use crate::rational::{dyadic_round, pow2, Q};

/// Coordinates are multiples of 2^-GRID_BITS.
const GRID_BITS: i64 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointSpec {
    Uniform,
    OnCircle,
    OnLine,
    MomentCurve,
    Clustered,
}

impl FromStr for PointSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" => PointSpec::Uniform,
            "on-circle" => PointSpec::OnCircle,
            "on-line" => PointSpec::OnLine,
            "moment-curve" => PointSpec::MomentCurve,
            "clustered" => PointSpec::Clustered,
            _ => return Err(Error::Config(format!("unknown point spec {s:?}"))),
        })
    }
}

fn dyadic(rng: &mut impl Rng, bits: i64) -> Q {
    Q::new(rng.random_range(0..1i64 << bits).into(), (1i64 << bits).into())
}

/// Points of the given kind in ℝ^d. Curves live in the first coordinates
/// (the circle in x1, x2), remaining coordinates are zero.
pub fn generate_points(spec: PointSpec, n: usize, d: usize, seed: u64) -> Result<PointMultiset> {
    if n == 0 {
        return Err(Error::Precondition("need at least one point".into()));
    }
    if d == 0 || (spec == PointSpec::OnCircle && d < 2) {
        return Err(Error::Precondition(format!("dimension {d} too small for {spec:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero_pad = |mut v: Vec<Q>| {
        v.resize(d, Q::from_integer(0.into()));
        v
    };
    let coords: Vec<Vec<Q>> = match spec {
        PointSpec::Uniform => (0..n)
            .map(|_| (0..d).map(|_| dyadic(&mut rng, GRID_BITS)).collect())
            .collect(),
        PointSpec::OnCircle => (0..n)
            .map(|_| {
                // t ↦ ((1−t²)/(1+t²), 2t/(1+t²)) with t dyadic in [−2, 2).
                let t = dyadic(&mut rng, GRID_BITS) * Q::from_integer(4.into()) - Q::from_integer(2.into());
                let den = Q::one() + &t * &t;
                zero_pad(vec![(Q::one() - &t * &t) / &den, (&t + &t) / &den])
            })
            .collect(),
        PointSpec::OnLine => (0..n).map(|i| zero_pad(vec![Q::from_integer((i as i64).into())])).collect(),
        PointSpec::MomentCurve => (0..n)
            .map(|_| {
                let t = dyadic(&mut rng, 10);
                (1..=d as i32).map(|e| num_traits::pow(t.clone(), e as usize)).collect()
            })
            .collect(),
        PointSpec::Clustered => {
            let centers: Vec<Vec<f64>> = (0..8)
                .map(|_| (0..d).map(|_| rng.random_range(0.15..0.85)).collect())
                .collect();
            let noise = Normal::new(0.0, 0.03).expect("valid sigma");
            (0..n)
                .map(|_| {
                    let c = &centers[rng.random_range(0..centers.len())];
                    c.iter()
                        .map(|m| dyadic_round(m + noise.sample(&mut rng), GRID_BITS as i32))
                        .collect()
                })
                .collect()
        }
    };
    PointMultiset::from_coords(d, coords)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RangeSpec {
    Halfspaces,
    Disks,
    Annuli,
    EllipsoidPairs,
}

impl FromStr for RangeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "halfspaces" => RangeSpec::Halfspaces,
            "disks" => RangeSpec::Disks,
            "annuli" => RangeSpec::Annuli,
            "ellipsoid-pairs" => RangeSpec::EllipsoidPairs,
            _ => return Err(Error::Config(format!("unknown range spec {s:?}"))),
        })
    }
}

/// Parameters of generated ranges, all multiples of 2^-10.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeParams {
    /// Features are placed in [0, extent]^d.
    pub extent: f64,
    pub min_radius: f64,
    pub max_radius: f64,
}

impl Default for RangeParams {
    fn default() -> Self {
        RangeParams {
            extent: 1.0,
            min_radius: 0.05,
            max_radius: 0.5,
        }
    }
}

fn sq_dist(c: &[Q], scales: Option<&[Q]>) -> MPoly {
    let d = c.len();
    (0..d)
        .map(|i| {
            let t = MPoly::var(d, i) - MPoly::constant(d, c[i].clone());
            let t2 = &t * &t;
            match scales {
                Some(s) => t2.scale(&s[i]),
                None => t2,
            }
        })
        .fold(MPoly::zero(d), |a, b| a + b)
}

/// Deterministic random ranges of one kind in ℝ^d.
pub fn generate_ranges(spec: RangeSpec, count: usize, d: usize, params: &RangeParams, seed: u64) -> Result<Vec<Range>> {
    if d == 0 {
        return Err(Error::Precondition("dimension must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q10 = |x: f64| dyadic_round(x, 10);
    let point = |rng: &mut ChaCha8Rng| -> Vec<Q> { (0..d).map(|_| q10(rng.random_range(0.0..params.extent))).collect() };
    let radius = |rng: &mut ChaCha8Rng| q10(rng.random_range(params.min_radius..params.max_radius)).max(pow2(-10));
    (0..count)
        .map(|_| match spec {
            RangeSpec::Halfspaces => {
                // a·(x − p) ≥ 0 through a random point of the extent.
                let p = point(&mut rng);
                let a: Vec<Q> = loop {
                    let a: Vec<Q> = (0..d).map(|_| q10(rng.random_range(-1.0..1.0))).collect();
                    if a.iter().any(|v| *v != Q::from_integer(0.into())) {
                        break a;
                    }
                };
                let c0 = -a.iter().zip(&p).map(|(x, y)| x * y).sum::<Q>();
                Range::atom(MPoly::affine(c0, &a))
            }
            RangeSpec::Disks => {
                let (c, r) = (point(&mut rng), radius(&mut rng));
                Range::atom(MPoly::constant(d, &r * &r) - sq_dist(&c, None))
            }
            RangeSpec::Annuli => {
                let c = point(&mut rng);
                let r1 = radius(&mut rng);
                let r2 = &r1 + radius(&mut rng);
                let d2 = sq_dist(&c, None);
                Range::all_of(d, vec![&d2 - &MPoly::constant(d, &r1 * &r1), MPoly::constant(d, &r2 * &r2) - d2])
            }
            RangeSpec::EllipsoidPairs => {
                let ellipsoid = |rng: &mut ChaCha8Rng| {
                    let c = point(rng);
                    let inv: Vec<Q> = (0..d)
                        .map(|_| {
                            let a = radius(rng);
                            (&a * &a).recip()
                        })
                        .collect();
                    MPoly::one(d) - sq_dist(&c, Some(&inv))
                };
                let e1 = ellipsoid(&mut rng);
                let e2 = ellipsoid(&mut rng);
                Range::all_of(d, vec![e1, e2])
            }
        })
        .collect()
}
