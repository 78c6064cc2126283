use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::partition::{PointMultiset, WPoint};
use crate::rational::{parse_rational, Q};

/// Flat `key = value` records; `#` starts a comment, later keys win.
pub fn parse_kv(src: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", i + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_kv_file(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_kv(&std::fs::read_to_string(path)?)
}

/// Reads points, one per row, coordinates as rationals or exact decimals.
/// With `weighted`, the last column is the point's weight. Rows starting
/// with `#` are skipped.
pub fn read_points(rdr: impl Read, weighted: bool) -> Result<PointMultiset> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(rdr);
    let mut pts = Vec::new();
    let mut dim = None;
    for (i, rec) in csv.records().enumerate() {
        let rec = rec?;
        let mut vals = rec
            .iter()
            .map(parse_rational)
            .collect::<Result<Vec<Q>>>()
            .map_err(|e| Error::Config(format!("row {}: {e}", i + 1)))?;
        let weight = if weighted {
            vals.pop().ok_or_else(|| Error::Config(format!("row {}: missing weight", i + 1)))?
        } else {
            Q::from_integer(1.into())
        };
        match dim {
            None => dim = Some(vals.len()),
            Some(d) if d != vals.len() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: vals.len(),
                })
            }
            _ => {}
        }
        pts.push(WPoint {
            coords: vals,
            weight,
            mult: 1,
        });
    }
    let dim = dim.ok_or_else(|| Error::Precondition("no points".into()))?;
    PointMultiset::new(dim, pts)
}

/// Writes one row per point (repeated `mult` times), weights appended.
pub fn write_points(p: &PointMultiset, mut w: impl Write, weighted: bool) -> Result<()> {
    for pt in p.points() {
        let mut row: Vec<String> = pt.coords.iter().map(|c| c.to_string()).collect();
        if weighted {
            row.push(pt.weight.to_string());
        }
        let line = row.join(",");
        for _ in 0..pt.mult {
            writeln!(w, "{line}")?;
        }
    }
    Ok(())
}

pub fn read_points_file(path: &Path, weighted: bool) -> Result<PointMultiset> {
    read_points(std::fs::File::open(path)?, weighted)
}
