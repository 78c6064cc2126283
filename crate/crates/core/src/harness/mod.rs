//! Instance generators, experiment runners and report emission.

mod experiment;
mod gen;
mod io;

pub use experiment::{run_experiment, Experiment, ExperimentKind, Report, Summary};
pub use gen::{generate_points, generate_ranges, PointSpec, RangeParams, RangeSpec};
pub use experiment::{SoftCheck, GOLDEN_VARIETIES};
pub use io::{parse_kv, read_kv_file, read_points, read_points_file, write_points};

/// Ordinary least-squares slope of log2(y) against log2(x).
pub fn log2_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let lp: Vec<(f64, f64)> = pts
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.log2(), y.log2()))
        .collect();
    if lp.len() < 2 {
        return None;
    }
    let n = lp.len() as f64;
    let mx = lp.iter().map(|p| p.0).sum::<f64>() / n;
    let my = lp.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = lp.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = lp.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
