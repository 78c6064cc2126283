use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use polypart::cells::{GridSpec, Range};
use polypart::harness::{generate_points, read_kv_file, read_points_file, run_experiment, Experiment, PointSpec};
use polypart::multilevel::{build_multipartition, degree_ledger_check, MultilevelConfig};
use polypart::partition::PointMultiset;
use polypart::poly::parse_poly;
use polypart::projection::{build_projection, verify_certificate, ProjectionConfig, VarietyHandle};
use polypart::rangesearch::{PartitionTree, TreeParams};
use polypart::rational::{parse_rational, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "polypart", version, about = "Multilevel polynomial partitions and partition trees")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a multilevel partition and print its summary as JSON.
    Partition(PartitionArgs),
    /// Build a partition tree and write it as JSON.
    BuildTree(TreeArgs),
    /// Answer range counting queries against a stored tree.
    Query(QueryArgs),
    /// Run an experiment and write its CSV and JSON report.
    Experiment(ExperimentArgs),
    /// Certify a generic projection of a variety to a lower dimension.
    CertifyProjection(ProjectionArgs),
}

#[derive(Args)]
struct PointsArgs {
    /// CSV of points, one per row (rationals or exact decimals).
    #[arg(long, conflicts_with = "gen")]
    points: Option<PathBuf>,
    /// The last CSV column is a weight.
    #[arg(long)]
    weighted: bool,
    /// Generate points instead: uniform, on-circle, on-line, moment-curve, clustered.
    #[arg(long)]
    gen: Option<PointSpec>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
}

impl PointsArgs {
    fn load(&self, seed: u64) -> Result<PointMultiset> {
        match (&self.points, self.gen) {
            (Some(p), _) => read_points_file(p, self.weighted).with_context(|| format!("reading {}", p.display())),
            (None, Some(spec)) => Ok(generate_points(spec, self.n, self.d, seed)?),
            (None, None) => bail!("give --points FILE or --gen SPEC"),
        }
    }
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    input: PointsArgs,
    #[arg(long)]
    r: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    c: u32,
    /// Force the first-level polynomial.
    #[arg(long)]
    seed_poly: Option<String>,
    #[arg(long)]
    max_levels: Option<usize>,
    /// Split sign cells into grid components.
    #[arg(long)]
    refine: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TreeArgs {
    #[command(flatten)]
    input: PointsArgs,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    n0: u64,
    #[arg(long, default_value_t = 0.25)]
    eta: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    tree: PathBuf,
    /// Range formula such as "(1 - x1^2 - x2^2 >= 0) & (x1 >= 0)"; repeatable.
    #[arg(long = "range", required = true)]
    ranges: Vec<String>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat key = value config; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid override, key=value; repeatable.
    #[arg(long = "set")]
    sets: Vec<String>,
}

#[derive(Args)]
struct ProjectionArgs {
    #[arg(long)]
    nvars: usize,
    /// Generator of the ideal; repeatable.
    #[arg(long = "poly", required = true)]
    polys: Vec<String>,
    /// Target dimension (default: the variety's dimension).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, v: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => writeln!(std::io::stdout(), "{text}")?,
    }
    Ok(())
}

fn partition(a: PartitionArgs) -> Result<bool> {
    let pts = a.input.load(a.seed)?;
    let r: Q = parse_rational(&a.r)?;
    let cfg = MultilevelConfig {
        c: a.c,
        seed: a.seed,
        seed_polynomial: a.seed_poly.as_deref().map(|s| parse_poly(s, pts.dim())).transpose()?,
        max_levels: a.max_levels,
        refine: a.refine.then(GridSpec::default),
        ..Default::default()
    };
    let mp = build_multipartition(&pts, &r, &cfg)?;
    let ledger = degree_ledger_check(&mp);
    let levels: Vec<serde_json::Value> = mp
        .levels
        .iter()
        .map(|l| {
            serde_json::json!({
                "level": l.level,
                "r": l.r.to_string(),
                "input": l.input,
                "degree": l.degree,
                "degree_cap": l.degree_cap,
                "regions": l.regions.len(),
                "max_region": l.max_region(),
                "on_zero": l.on_zero,
                "projection_certified": l.certificate.is_some(),
            })
        })
        .collect();
    emit(
        a.out.as_deref(),
        &serde_json::json!({
            "dim": mp.dim,
            "total": mp.total,
            "schedule": mp.schedule.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "levels": levels,
            "exceptional": mp.exceptional_count(),
            "exceptional_locations": mp.exceptional_locations(),
            "ledger": mp.ledger,
            "ledger_ok": ledger.ok(),
            "violations": ledger.violations,
        }),
    )?;
    Ok(ledger.ok())
}

fn build_tree(a: TreeArgs) -> Result<bool> {
    let pts = a.input.load(a.seed)?;
    let params = TreeParams {
        n0: a.n0,
        eta: a.eta,
        seed: a.seed,
        ..Default::default()
    };
    let tree = PartitionTree::build(&pts, &params)?;
    let f = std::fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    serde_json::to_writer(std::io::BufWriter::new(f), &tree)?;
    emit(None, &serde_json::to_value(tree.stats())?)?;
    Ok(true)
}

fn query(a: QueryArgs) -> Result<bool> {
    let f = std::fs::File::open(&a.tree).with_context(|| format!("opening {}", a.tree.display()))?;
    let tree: PartitionTree = serde_json::from_reader(std::io::BufReader::new(f))?;
    let mut out = std::io::stdout().lock();
    for src in &a.ranges {
        let gamma = Range::parse(src, tree.dim)?;
        let (w, st) = tree.query(&gamma)?;
        writeln!(out, "{w}\t{}\t{}", st.regions_classified, st.nodes_visited)?;
    }
    Ok(true)
}

fn experiment(a: ExperimentArgs) -> Result<bool> {
    let mut kv = match &a.config {
        Some(p) => read_kv_file(p).with_context(|| format!("reading {}", p.display()))?,
        None => Default::default(),
    };
    if let Some(k) = a.kind {
        kv.insert("kind".into(), k);
    }
    if let Some(s) = a.seed {
        kv.insert("seed".into(), s.to_string());
    }
    if let Some(o) = &a.out {
        kv.insert("out".into(), o.display().to_string());
    }
    for s in &a.sets {
        let (k, v) = s.split_once('=').with_context(|| format!("--set {s:?}: expected key=value"))?;
        kv.insert(k.trim().into(), v.trim().into());
    }
    if !kv.contains_key("seed") {
        bail!("--seed is required");
    }
    let e = Experiment::from_kv(&kv)?;
    let rep = run_experiment(&e)?;
    emit(None, &serde_json::to_value(&rep.summary)?)?;
    if e.out.is_none() {
        std::io::stdout().write_all(&rep.csv_bytes()?)?;
    }
    Ok(rep.summary.pass)
}

fn certify_projection(a: ProjectionArgs) -> Result<bool> {
    let polys = a.polys.iter().map(|s| parse_poly(s, a.nvars)).collect::<polypart::Result<Vec<_>>>()?;
    let cfg = ProjectionConfig::default();
    let v = VarietyHandle::from_polys(a.nvars, polys, &cfg.budget)?;
    let k = match a.k {
        Some(k) => k,
        None => usize::try_from(v.claimed_dim).context("the variety is empty")?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (pi, cert) = build_projection(&v, k, &cfg, &mut rng)?;
    let ok = verify_certificate(&v, &pi, &cert, &cfg.budget)?;
    emit(
        a.out.as_deref(),
        &serde_json::json!({ "verified": ok, "projection": pi, "certificate": cert }),
    )?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Partition(a) => partition(a),
        Cmd::BuildTree(a) => build_tree(a),
        Cmd::Query(a) => query(a),
        Cmd::Experiment(a) => experiment(a),
        Cmd::CertifyProjection(a) => certify_projection(a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
