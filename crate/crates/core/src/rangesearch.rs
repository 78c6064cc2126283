//! Partition trees over multilevel partitions and exact weighted range
//! counting.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cells::{classify, Range, RangeEval, Verdict};
use crate::error::{Error, Result};
use crate::multilevel::{build_multipartition, derive_seed, MultiPartition, MultilevelConfig};
use crate::partition::{PointMultiset, WPoint};
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Nodes holding at most this many points (with multiplicity) are leaves.
    pub n0: u64,
    /// A node over n points partitions with r = ⌈n^eta⌉.
    pub eta: f64,
    pub multilevel: MultilevelConfig,
    pub seed: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            n0: 64,
            eta: 0.25,
            multilevel: MultilevelConfig::default(),
            seed: 0,
        }
    }
}

/// The partition parameter for a node of `n` points: the least integer
/// r ≥ n^eta, and at least 2.
pub fn node_r(n: u64, eta: f64) -> u64 {
    let x = (n as f64).powf(eta);
    let mut r = x.round() as u64;
    if (r as f64) < x * (1.0 - 1e-12) {
        r += 1;
    }
    r.max(2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Node {
    Leaf {
        points: Vec<WPoint>,
    },
    Internal {
        r: u64,
        mp: Box<MultiPartition>,
        /// One child per region, in `mp.regions()` order.
        children: Vec<Node>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionTree {
    pub dim: usize,
    pub total: u64,
    pub params: TreeParams,
    pub root: Node,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    pub nodes_visited: u64,
    pub regions_classified: u64,
    /// Regions classified `Crosses`, indexed by level − 1.
    pub crossed_per_level: Vec<u64>,
    pub exceptional_scanned: u64,
    pub leaf_points_scanned: u64,
    #[serde(with = "crate::rational::ser")]
    pub weight: Q,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    pub nodes: usize,
    pub leaves: usize,
    pub height: usize,
    /// Points (with multiplicity) stored in leaves and exceptional lists.
    pub stored_points: u64,
    pub regions: usize,
    /// Serialized size of the region descriptors of all internal nodes.
    pub descriptor_bytes: usize,
}

fn weight_of(p: &WPoint) -> Q {
    &p.weight * Q::from_integer(p.mult.into())
}

impl PartitionTree {
    pub fn build(p: &PointMultiset, params: &TreeParams) -> Result<PartitionTree> {
        if params.n0 < 1 || !(params.eta > 0.0 && params.eta < 1.0) {
            return Err(Error::Config("need n0 ≥ 1 and 0 < eta < 1".into()));
        }
        let root = build_node(p.points().to_vec(), p.dim(), params, params.seed, &[])?;
        Ok(PartitionTree {
            dim: p.dim(),
            total: p.total(),
            params: params.clone(),
            root,
        })
    }

    pub fn query(&self, gamma: &Range) -> Result<(Q, QueryStats)> {
        if gamma.nvars() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: gamma.nvars(),
            });
        }
        let ev = gamma.evaluator();
        let mut stats = QueryStats::default();
        query_node(&self.root, &ev, &mut stats);
        Ok((stats.weight.clone(), stats))
    }

    pub fn stats(&self) -> TreeStats {
        let mut s = TreeStats::default();
        collect_stats(&self.root, 1, &mut s);
        s
    }
}

fn build_node(
    points: Vec<WPoint>,
    dim: usize,
    params: &TreeParams,
    seed: u64,
    path: &[usize],
) -> Result<Node> {
    let n: u64 = points.iter().map(|p| p.mult).sum();
    let single_location = points.windows(2).all(|w| w[0].coords == w[1].coords);
    if n <= params.n0 || single_location {
        return Ok(Node::Leaf { points });
    }
    let r = node_r(n, params.eta);
    let cfg = MultilevelConfig {
        seed: derive_seed(seed, &[0]),
        ..params.multilevel.clone()
    };
    let ms = PointMultiset::new(dim, points)?;
    let mp = build_multipartition(&ms, &Q::from_integer(r.into()), &cfg).map_err(|e| Error::Node {
        path: path.to_vec(),
        source: Box::new(e),
    })?;
    // A region as large as the node would never shrink; keep it as a leaf.
    if mp.regions().any(|reg| reg.count >= n) {
        return Ok(Node::Leaf {
            points: ms.points().to_vec(),
        });
    }
    let groups: Vec<(usize, Vec<WPoint>)> = mp
        .regions()
        .enumerate()
        .map(|(i, reg)| (i, reg.members.iter().map(|&j| ms.points()[j].clone()).collect()))
        .collect();
    let children = groups
        .into_par_iter()
        .map(|(i, pts)| {
            let sub = [path, &[i]].concat();
            build_node(pts, dim, params, derive_seed(seed, &[1, i as u64]), &sub)
        })
        .collect::<Result<Vec<Node>>>()?;
    let mut mp = mp;
    // Children hold the points; members would only duplicate them.
    for l in &mut mp.levels {
        for reg in &mut l.regions {
            reg.members.clear();
        }
    }
    Ok(Node::Internal {
        r,
        mp: Box::new(mp),
        children,
    })
}

fn query_node(node: &Node, gamma: &RangeEval, stats: &mut QueryStats) {
    stats.nodes_visited += 1;
    match node {
        Node::Leaf { points } => {
            stats.leaf_points_scanned += points.len() as u64;
            for p in points {
                if gamma.contains(&p.coords) {
                    stats.weight += weight_of(p);
                }
            }
        }
        Node::Internal { mp, children, .. } => {
            for (reg, child) in mp.regions().zip(children) {
                stats.regions_classified += 1;
                match classify(reg, gamma) {
                    Verdict::Inside => stats.weight += &reg.weight,
                    Verdict::Outside => {}
                    Verdict::Crosses => {
                        if stats.crossed_per_level.len() < reg.level {
                            stats.crossed_per_level.resize(reg.level, 0);
                        }
                        stats.crossed_per_level[reg.level - 1] += 1;
                        query_node(child, gamma, stats);
                    }
                }
            }
            stats.exceptional_scanned += mp.exceptional.len() as u64;
            for p in &mp.exceptional {
                if gamma.contains(&p.coords) {
                    stats.weight += weight_of(p);
                }
            }
        }
    }
}

fn collect_stats(node: &Node, depth: usize, s: &mut TreeStats) {
    s.nodes += 1;
    s.height = s.height.max(depth);
    match node {
        Node::Leaf { points } => {
            s.leaves += 1;
            s.stored_points += points.iter().map(|p| p.mult).sum::<u64>();
        }
        Node::Internal { mp, children, .. } => {
            s.stored_points += mp.exceptional_count();
            s.regions += children.len();
            s.descriptor_bytes += mp
                .regions()
                .map(|r| serde_json::to_vec(r).map_or(0, |v| v.len()))
                .sum::<usize>();
            for c in children {
                collect_stats(c, depth + 1, s);
            }
        }
    }
}

/// Exact linear scan.
pub fn brute_force_count(p: &PointMultiset, gamma: &Range) -> Q {
    let ev = gamma.evaluator();
    p.points()
        .iter()
        .filter(|w| ev.contains(&w.coords))
        .map(weight_of)
        .fold(Q::zero(), |a, b| a + b)
}
