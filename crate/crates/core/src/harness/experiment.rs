use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gen::{generate_points, generate_ranges, PointSpec, RangeParams, RangeSpec};
use super::log2_slope;
use crate::cells::{count_crossed_by_zero_set, Range};
use crate::error::{Error, Result};
use crate::multilevel::{build_multipartition, degree_ledger_check, derive_seed, MultilevelConfig};
use crate::partition::{default_cap, partitioning_polynomial, schedule_degrees, PartitionConfig, PointMultiset};
use crate::poly::parse_poly;
use crate::projection::{build_projection, verify_certificate, ProjectionConfig, VarietyHandle};
use crate::rangesearch::{brute_force_count, Node, PartitionTree, TreeParams};
use crate::rational::{parse_rational, q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PartitionCheck,
    CrossingExponent,
    QueryScaling,
    ProjectionSuite,
    OracleEquivalence,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PartitionCheck => "partition-check",
            ExperimentKind::CrossingExponent => "crossing-exponent",
            ExperimentKind::QueryScaling => "query-scaling",
            ExperimentKind::ProjectionSuite => "projection-suite",
            ExperimentKind::OracleEquivalence => "oracle-equivalence",
        }
    }

    /// Grid keys and their defaults.
    fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            ExperimentKind::PartitionCheck => &[("points", "uniform"), ("n", "4096"), ("d", "2"), ("r", "16"), ("beta", "1/2")],
            ExperimentKind::CrossingExponent => &[
                ("points", "uniform"),
                ("n", "20000"),
                ("d", "2"),
                ("r", "4,16,64,256"),
                ("lines", "200"),
                ("slope_min", "0.35"),
                ("slope_max", "0.65"),
            ],
            ExperimentKind::QueryScaling => &[
                ("points", "uniform"),
                ("n", "1024,4096,16384,65536"),
                ("d", "2"),
                ("queries", "200"),
                ("n0", "64"),
                ("eta", "0.25"),
                ("slope_min", "0.35"),
                ("slope_max", "0.75"),
            ],
            ExperimentKind::ProjectionSuite => &[("max_retries", "5")],
            ExperimentKind::OracleEquivalence => &[
                ("points", "uniform"),
                ("n", "10000"),
                ("d", "2"),
                ("halfspaces", "500"),
                ("disks", "300"),
                ("annuli", "200"),
                ("n0", "64"),
                ("eta", "0.25"),
            ],
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "partition-check" => ExperimentKind::PartitionCheck,
            "crossing-exponent" => ExperimentKind::CrossingExponent,
            "query-scaling" => ExperimentKind::QueryScaling,
            "projection-suite" => ExperimentKind::ProjectionSuite,
            "oracle-equivalence" => ExperimentKind::OracleEquivalence,
            _ => return Err(Error::Config(format!("unknown experiment kind {s:?}"))),
        })
    }
}

/// An experiment is fully determined by its kind, grid and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub kind: ExperimentKind,
    /// Every grid key of the kind, defaults filled in.
    pub grid: BTreeMap<String, String>,
    pub seed: u64,
    /// Directory receiving `<kind>.csv` and `<kind>.json`.
    pub out: Option<PathBuf>,
}

impl Experiment {
    pub fn new(kind: ExperimentKind, seed: u64) -> Experiment {
        let grid = kind.defaults().iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Experiment {
            kind,
            grid,
            seed,
            out: None,
        }
    }

    /// From a flat config record with `kind`, `seed`, optional `out`, and
    /// grid overrides. Unknown keys are rejected.
    pub fn from_kv(kv: &BTreeMap<String, String>) -> Result<Experiment> {
        let kind: ExperimentKind = kv
            .get("kind")
            .ok_or_else(|| Error::Config("missing key kind".into()))?
            .parse()?;
        let seed = kv
            .get("seed")
            .ok_or_else(|| Error::Config("missing key seed".into()))?
            .parse()
            .map_err(|_| Error::Config("seed must be an unsigned integer".into()))?;
        let mut e = Experiment::new(kind, seed);
        e.out = kv.get("out").map(PathBuf::from);
        for (k, v) in kv {
            if matches!(k.as_str(), "kind" | "seed" | "out") {
                continue;
            }
            e.set(k, v)?;
        }
        Ok(e)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.grid.get_mut(key) {
            Some(v) => {
                *v = value.to_string();
                Ok(())
            }
            None => Err(Error::Config(format!("{} has no key {key:?}", self.kind.name()))),
        }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = &self.grid[key];
        v.parse().map_err(|_| Error::Config(format!("bad value {v:?} for {key}")))
    }

    fn list(&self, key: &str) -> Result<Vec<u64>> {
        let v = &self.grid[key];
        let xs = v
            .split(',')
            .map(|s| s.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Config(format!("bad list {v:?} for {key}")))?;
        if xs.is_empty() {
            return Err(Error::Config(format!("empty list for {key}")));
        }
        Ok(xs)
    }

    fn points(&self, n: usize, d: usize, salt: u64) -> Result<PointMultiset> {
        let spec: PointSpec = self.get("points")?;
        generate_points(spec, n, d, derive_seed(self.seed, &[salt]))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SoftCheck {
    pub metric: String,
    pub value: Option<f64>,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub kind: String,
    pub seed: u64,
    pub grid: BTreeMap<String, String>,
    /// No hard assertion failed.
    pub pass: bool,
    pub failures: Vec<String>,
    pub soft: Option<SoftCheck>,
    pub metrics: BTreeMap<String, f64>,
    pub cell_seconds: Vec<f64>,
    pub total_seconds: f64,
}

/// CSV rows (timing-free, so reruns are byte-identical) plus a JSON summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Summary,
}

impl Report {
    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.summary.kind));
        let json = dir.join(format!("{}.json", self.summary.kind));
        std::fs::write(&csv, self.csv_bytes()?)?;
        std::fs::write(&json, serde_json::to_vec_pretty(&self.summary)?)?;
        Ok((csv, json))
    }
}

/// One grid cell's outcome: CSV fields, hard failures, a numeric metric.
struct Cell {
    fields: Vec<String>,
    failures: Vec<String>,
    metric: Option<(f64, f64)>,
    seconds: f64,
}

impl Cell {
    fn failed(width: usize, key: String, e: Error) -> Cell {
        let mut fields = vec![key.clone()];
        fields.resize(width - 1, String::new());
        fields.push(format!("error: {e}"));
        Cell {
            fields,
            failures: vec![format!("{key}: {e}")],
            metric: None,
            seconds: 0.0,
        }
    }
}

fn f4(x: f64) -> String {
    format!("{x:.4}")
}

/// Runs the grid concurrently; rows come back in grid order. The report is
/// also written when `e.out` is set.
pub fn run_experiment(e: &Experiment) -> Result<Report> {
    let start = Instant::now();
    let (header, cells, soft) = match e.kind {
        ExperimentKind::PartitionCheck => partition_check(e)?,
        ExperimentKind::CrossingExponent => crossing_exponent(e)?,
        ExperimentKind::QueryScaling => query_scaling(e)?,
        ExperimentKind::ProjectionSuite => projection_suite(e)?,
        ExperimentKind::OracleEquivalence => oracle_equivalence(e)?,
    };
    let failures: Vec<String> = cells.iter().flat_map(|c| c.failures.clone()).collect();
    let mut metrics = BTreeMap::new();
    let soft = soft.map(|(metric, lo, hi)| {
        let pts: Vec<(f64, f64)> = cells.iter().filter_map(|c| c.metric).collect();
        let value = log2_slope(&pts);
        if let Some(v) = value {
            metrics.insert("slope".to_string(), v);
        }
        SoftCheck {
            metric,
            value,
            lo,
            hi,
            pass: value.is_some_and(|v| (lo..=hi).contains(&v)),
        }
    });
    let summary = Summary {
        kind: e.kind.name().to_string(),
        seed: e.seed,
        grid: e.grid.clone(),
        pass: failures.is_empty(),
        failures,
        soft,
        metrics,
        cell_seconds: cells.iter().map(|c| c.seconds).collect(),
        total_seconds: start.elapsed().as_secs_f64(),
    };
    let report = Report {
        header: header.iter().map(|s| s.to_string()).collect(),
        rows: cells.into_iter().map(|c| c.fields).collect(),
        summary,
    };
    if let Some(dir) = &e.out {
        report.write(dir)?;
    }
    Ok(report)
}

type Plan = (&'static [&'static str], Vec<Cell>, Option<(String, f64, f64)>);

fn partition_check(e: &Experiment) -> Result<Plan> {
    const H: &[&str] = &[
        "r", "n", "d", "degree", "schedule_degree", "degree_cap", "cells", "max_cell", "bound", "on_zero", "fallback", "status",
    ];
    let (n, d): (usize, usize) = (e.get("n")?, e.get("d")?);
    let beta = parse_rational(&e.grid["beta"])?;
    let pts = e.points(n, d, 0)?;
    let rs = e.list("r")?;
    let cells = rs
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let t = Instant::now();
            let cfg = PartitionConfig {
                beta: beta.clone(),
                seed: derive_seed(e.seed, &[1, i as u64]),
                ..Default::default()
            };
            let rq = q(r as i64);
            let res = match partitioning_polynomial(&pts, &rq, &cfg) {
                Ok(res) => res,
                Err(err) => return Cell::failed(H.len(), format!("r={r}"), err),
            };
            let bound = pts.total() / r;
            let sched: usize = schedule_degrees(d, rounds_for(r)).iter().sum();
            let cap = default_cap(d, &rq);
            let mut failures = Vec::new();
            if res.stats.max_cell > bound {
                failures.push(format!("r={r}: cell of {} > {bound}", res.stats.max_cell));
            }
            if res.degree() > cap {
                failures.push(format!("r={r}: degree {} > cap {cap}", res.degree()));
            }
            Cell {
                fields: vec![
                    r.to_string(),
                    n.to_string(),
                    d.to_string(),
                    res.degree().to_string(),
                    sched.to_string(),
                    cap.to_string(),
                    res.cells.len().to_string(),
                    res.stats.max_cell.to_string(),
                    bound.to_string(),
                    res.stats.on_zero.to_string(),
                    res.stats.fallback.clone().unwrap_or_default(),
                    if failures.is_empty() { "ok" } else { "fail" }.to_string(),
                ],
                failures,
                metric: None,
                seconds: t.elapsed().as_secs_f64(),
            }
        })
        .collect();
    Ok((H, cells, None))
}

/// Bisection rounds needed to get cells of at most n/r: ⌈log2 r⌉.
fn rounds_for(r: u64) -> usize {
    (64 - (r.max(2) - 1).leading_zeros()) as usize
}

fn crossing_exponent(e: &Experiment) -> Result<Plan> {
    const H: &[&str] = &[
        "r", "n", "lines", "levels", "regions", "degree", "exceptional", "max_crossed", "mean_crossed", "ledger", "status",
    ];
    let (n, d, lines): (usize, usize, usize) = (e.get("n")?, e.get("d")?, e.get("lines")?);
    let pts = e.points(n, d, 0)?;
    let rs = e.list("r")?;
    let ranges = generate_ranges(RangeSpec::Halfspaces, lines, d, &RangeParams::default(), derive_seed(e.seed, &[2]))?;
    let hs: Vec<_> = ranges.iter().map(|r| r.atoms()[0].clone()).collect();
    let cells = rs
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let t = Instant::now();
            let cfg = MultilevelConfig {
                seed: derive_seed(e.seed, &[1, i as u64]),
                ..Default::default()
            };
            let mp = match build_multipartition(&pts, &q(r as i64), &cfg) {
                Ok(mp) => mp,
                Err(err) => return Cell::failed(H.len(), format!("r={r}"), err),
            };
            let crossed: Vec<usize> = hs.iter().map(|h| count_crossed_by_zero_set(mp.regions(), h)).collect();
            let max = crossed.iter().copied().max().unwrap_or(0);
            let mean = crossed.iter().sum::<usize>() as f64 / crossed.len().max(1) as f64;
            let ledger = degree_ledger_check(&mp);
            let failures = ledger.violations.iter().map(|v| format!("r={r}: {v}")).collect::<Vec<_>>();
            Cell {
                fields: vec![
                    r.to_string(),
                    n.to_string(),
                    lines.to_string(),
                    mp.levels.len().to_string(),
                    mp.regions().count().to_string(),
                    mp.levels.iter().map(|l| l.degree.to_string()).collect::<Vec<_>>().join(";"),
                    mp.exceptional_count().to_string(),
                    max.to_string(),
                    f4(mean),
                    if ledger.ok() { "ok" } else { "violated" }.to_string(),
                    if failures.is_empty() { "ok" } else { "fail" }.to_string(),
                ],
                failures,
                metric: Some((r as f64, max as f64)),
                seconds: t.elapsed().as_secs_f64(),
            }
        })
        .collect();
    let soft = ("max regions crossed vs r".to_string(), e.get("slope_min")?, e.get("slope_max")?);
    Ok((H, cells, Some(soft)))
}

fn tree_params(e: &Experiment, salt: u64) -> Result<TreeParams> {
    Ok(TreeParams {
        n0: e.get("n0")?,
        eta: e.get("eta")?,
        seed: derive_seed(e.seed, &[salt]),
        ..Default::default()
    })
}

/// Ledger violations over every multipartition stored in the tree.
fn tree_ledger_violations(node: &Node, out: &mut Vec<String>) {
    if let Node::Internal { mp, children, .. } = node {
        out.extend(degree_ledger_check(mp).violations);
        for c in children {
            tree_ledger_violations(c, out);
        }
    }
}

/// Queries the tree and compares each answer with the exact scan.
/// Returns (mismatches, per-query regions classified).
fn check_queries(tree: &PartitionTree, pts: &PointMultiset, ranges: &[Range]) -> Result<(usize, Vec<u64>)> {
    let res = ranges
        .par_iter()
        .map(|g| {
            let (w, st) = tree.query(g)?;
            Ok((w != brute_force_count(pts, g), st.regions_classified))
        })
        .collect::<Result<Vec<(bool, u64)>>>()?;
    Ok((res.iter().filter(|r| r.0).count(), res.iter().map(|r| r.1).collect()))
}

fn query_scaling(e: &Experiment) -> Result<Plan> {
    const H: &[&str] = &[
        "n", "queries", "nodes", "height", "mean_regions", "max_regions", "mismatches", "ledger", "status",
    ];
    let (d, queries): (usize, usize) = (e.get("d")?, e.get("queries")?);
    let ns = e.list("n")?;
    let ranges = generate_ranges(RangeSpec::Halfspaces, queries, d, &RangeParams::default(), derive_seed(e.seed, &[2]))?;
    let cells = ns
        .par_iter()
        .enumerate()
        .map(|(i, &n)| {
            let t = Instant::now();
            let run = || -> Result<Cell> {
                let pts = e.points(n as usize, d, 10 + i as u64)?;
                let tree = PartitionTree::build(&pts, &tree_params(e, 20 + i as u64)?)?;
                let (mismatches, regions) = check_queries(&tree, &pts, &ranges)?;
                let mean = regions.iter().sum::<u64>() as f64 / regions.len().max(1) as f64;
                let mut violations = Vec::new();
                tree_ledger_violations(&tree.root, &mut violations);
                let mut failures: Vec<String> = violations.iter().map(|v| format!("n={n}: {v}")).collect();
                if mismatches > 0 {
                    failures.push(format!("n={n}: {mismatches} answers differ from the exact scan"));
                }
                let st = tree.stats();
                Ok(Cell {
                    fields: vec![
                        n.to_string(),
                        queries.to_string(),
                        st.nodes.to_string(),
                        st.height.to_string(),
                        f4(mean),
                        regions.iter().max().copied().unwrap_or(0).to_string(),
                        mismatches.to_string(),
                        if violations.is_empty() { "ok" } else { "violated" }.to_string(),
                        if failures.is_empty() { "ok" } else { "fail" }.to_string(),
                    ],
                    failures,
                    metric: Some((n as f64, mean)),
                    seconds: t.elapsed().as_secs_f64(),
                })
            };
            run().unwrap_or_else(|err| Cell::failed(H.len(), format!("n={n}"), err))
        })
        .collect();
    let soft = ("mean regions visited vs n".to_string(), e.get("slope_min")?, e.get("slope_max")?);
    Ok((H, cells, Some(soft)))
}

/// Curves and surfaces whose projection certificates are exercised.
pub const GOLDEN_VARIETIES: &[(&str, usize, &[&str], usize)] = &[
    ("circle", 2, &["x1^2 + x2^2 - 1"], 1),
    ("hyperbola", 2, &["x1*x2 - 1"], 1),
    ("parallel-lines", 2, &["x2^2 - x2"], 1),
    ("twisted-cubic", 3, &["x2 - x1^2", "x3 - x1^3"], 1),
    ("sphere", 3, &["x1^2 + x2^2 + x3^2 - 1"], 2),
];

fn projection_suite(e: &Experiment) -> Result<Plan> {
    const H: &[&str] = &["variety", "d", "k", "stages", "total_retries", "max_stage_retries", "leader_degrees", "verified", "status"];
    let max_retries: usize = e.get("max_retries")?;
    let cfg = ProjectionConfig {
        max_retries,
        ..Default::default()
    };
    let cells = GOLDEN_VARIETIES
        .par_iter()
        .enumerate()
        .map(|(i, &(name, d, gens, k))| {
            let t = Instant::now();
            let run = || -> Result<Cell> {
                let polys = gens.iter().map(|g| parse_poly(g, d)).collect::<Result<Vec<_>>>()?;
                let v = VarietyHandle::from_polys(d, polys, &cfg.budget)?;
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(e.seed, &[i as u64]));
                let (pi, cert) = build_projection(&v, k, &cfg, &mut rng)?;
                let verified = verify_certificate(&v, &pi, &cert, &cfg.budget)?;
                let mut failures = Vec::new();
                if !verified {
                    failures.push(format!("{name}: certificate does not re-verify"));
                }
                if cert.max_stage_retries() > max_retries {
                    failures.push(format!("{name}: {} retries", cert.max_stage_retries()));
                }
                Ok(Cell {
                    fields: vec![
                        name.to_string(),
                        d.to_string(),
                        k.to_string(),
                        cert.stages.len().to_string(),
                        cert.total_retries().to_string(),
                        cert.max_stage_retries().to_string(),
                        cert.stages.iter().map(|s| s.leader_degree.to_string()).collect::<Vec<_>>().join(";"),
                        verified.to_string(),
                        if failures.is_empty() { "ok" } else { "fail" }.to_string(),
                    ],
                    failures,
                    metric: None,
                    seconds: t.elapsed().as_secs_f64(),
                })
            };
            run().unwrap_or_else(|err| Cell::failed(H.len(), name.to_string(), err))
        })
        .collect();
    Ok((H, cells, None))
}

fn oracle_equivalence(e: &Experiment) -> Result<Plan> {
    const H: &[&str] = &["family", "count", "matches", "mean_regions", "max_regions", "status"];
    let (n, d): (usize, usize) = (e.get("n")?, e.get("d")?);
    let pts = e.points(n, d, 0)?;
    let tree = PartitionTree::build(&pts, &tree_params(e, 1)?)?;
    let mut violations = Vec::new();
    tree_ledger_violations(&tree.root, &mut violations);
    let families = [
        ("halfspaces", RangeSpec::Halfspaces),
        ("disks", RangeSpec::Disks),
        ("annuli", RangeSpec::Annuli),
    ];
    let mut cells = Vec::new();
    for (i, (key, spec)) in families.into_iter().enumerate() {
        let t = Instant::now();
        let count: usize = e.get(key)?;
        let run = || -> Result<Cell> {
            let ranges = generate_ranges(spec, count, d, &RangeParams::default(), derive_seed(e.seed, &[2, i as u64]))?;
            let (mismatches, regions) = check_queries(&tree, &pts, &ranges)?;
            let mean = regions.iter().sum::<u64>() as f64 / regions.len().max(1) as f64;
            let failures = if mismatches > 0 {
                vec![format!("{key}: {mismatches} of {count} differ from the exact scan")]
            } else {
                Vec::new()
            };
            Ok(Cell {
                fields: vec![
                    key.to_string(),
                    count.to_string(),
                    (count - mismatches).to_string(),
                    f4(mean),
                    regions.iter().max().copied().unwrap_or(0).to_string(),
                    if failures.is_empty() { "ok" } else { "fail" }.to_string(),
                ],
                failures,
                metric: None,
                seconds: t.elapsed().as_secs_f64(),
            })
        };
        cells.push(run().unwrap_or_else(|err| Cell::failed(H.len(), key.to_string(), err)));
    }
    if let Some(c) = cells.first_mut() {
        c.failures.extend(violations.into_iter().map(|v| format!("ledger: {v}")));
    }
    Ok((H, cells, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind, kv: &[(&str, &str)]) -> Experiment {
        let mut e = Experiment::new(kind, 5);
        for (k, v) in kv {
            e.set(k, v).unwrap();
        }
        e
    }

    #[test]
    fn config_records() {
        let kv = super::super::parse_kv("kind = partition-check\nseed = 3\nn = 512\nr = 4,8\n").unwrap();
        let e = Experiment::from_kv(&kv).unwrap();
        assert_eq!(e.kind, ExperimentKind::PartitionCheck);
        assert_eq!(e.grid["n"], "512");
        assert_eq!(e.grid["points"], "uniform");
        let mut bad = kv.clone();
        bad.insert("lines".into(), "3".into());
        assert!(Experiment::from_kv(&bad).is_err());
        bad.remove("lines");
        bad.remove("seed");
        assert!(Experiment::from_kv(&bad).is_err());
        assert!("warp".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn partition_check_small() {
        let e = small(ExperimentKind::PartitionCheck, &[("n", "512"), ("r", "4,8")]);
        let rep = run_experiment(&e).unwrap();
        assert!(rep.summary.pass, "{:?}", rep.summary.failures);
        assert_eq!(rep.rows.len(), 2);
        assert_eq!(rep.rows[0][0], "4");
        assert_eq!(rep.csv_bytes().unwrap(), run_experiment(&e).unwrap().csv_bytes().unwrap());
    }

    #[test]
    fn crossing_and_scaling_small() {
        let e = small(ExperimentKind::CrossingExponent, &[("n", "600"), ("r", "4,16"), ("lines", "20")]);
        let rep = run_experiment(&e).unwrap();
        assert!(rep.summary.pass, "{:?}", rep.summary.failures);
        assert!(rep.summary.soft.as_ref().unwrap().value.is_some());
        let e = small(ExperimentKind::QueryScaling, &[("n", "256,1024"), ("queries", "20")]);
        let rep = run_experiment(&e).unwrap();
        assert!(rep.summary.pass, "{:?}", rep.summary.failures);
        assert!(rep.rows.iter().all(|r| r[6] == "0"));
    }

    #[test]
    fn projection_suite_passes() {
        let rep = run_experiment(&Experiment::new(ExperimentKind::ProjectionSuite, 1)).unwrap();
        assert!(rep.summary.pass, "{:?}", rep.summary.failures);
        assert_eq!(rep.rows.len(), GOLDEN_VARIETIES.len());
    }

    #[test]
    fn oracle_small_and_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut e = small(
            ExperimentKind::OracleEquivalence,
            &[("n", "800"), ("halfspaces", "20"), ("disks", "10"), ("annuli", "10")],
        );
        e.out = Some(dir.path().to_path_buf());
        let rep = run_experiment(&e).unwrap();
        assert!(rep.summary.pass, "{:?}", rep.summary.failures);
        let csv = std::fs::read(dir.path().join("oracle-equivalence.csv")).unwrap();
        assert_eq!(csv, rep.csv_bytes().unwrap());
        let s: Summary = serde_json::from_slice(&std::fs::read(dir.path().join("oracle-equivalence.json")).unwrap()).unwrap();
        assert_eq!(s.kind, "oracle-equivalence");
    }

    #[test]
    fn failed_cell_is_recorded() {
        let e = small(ExperimentKind::PartitionCheck, &[("n", "64"), ("r", "1,4")]);
        let rep = run_experiment(&e).unwrap();
        assert!(!rep.summary.pass);
        assert!(rep.rows[0].last().unwrap().starts_with("error"));
        assert_eq!(rep.rows[1].last().unwrap(), "ok");
    }
}
