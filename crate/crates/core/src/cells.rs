//! Semialgebraic ranges, sound region classification against them, and
//! grid-based splitting of sign cells into connected pieces.

use std::collections::VecDeque;
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multilevel::Region;
use crate::partition::CutEval;
use crate::poly::{parse_poly, Fi, MPoly, RInterval, Sign, SignEval};
use crate::rational::Q;

/// Boolean combination of atoms `atoms[i] ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    Atom(usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    fn eval<T: Copy>(&self, atom: &impl Fn(usize) -> T, ops: &KleeneOps<T>) -> T {
        match self {
            Formula::Atom(i) => atom(*i),
            Formula::Not(f) => (ops.not)(f.eval(atom, ops)),
            Formula::And(fs) => fs.iter().fold(ops.t, |a, f| (ops.and)(a, f.eval(atom, ops))),
            Formula::Or(fs) => fs.iter().fold(ops.f, |a, f| (ops.or)(a, f.eval(atom, ops))),
        }
    }
}

struct KleeneOps<T> {
    t: T,
    f: T,
    not: fn(T) -> T,
    and: fn(T, T) -> T,
    or: fn(T, T) -> T,
}

const BOOL: KleeneOps<bool> = KleeneOps {
    t: true,
    f: false,
    not: |a| !a,
    and: |a, b| a && b,
    or: |a, b| a || b,
};

/// Three-valued truth: `None` is unknown.
const KLEENE: KleeneOps<Option<bool>> = KleeneOps {
    t: Some(true),
    f: Some(false),
    not: |a| a.map(|v| !v),
    and: |a, b| match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    },
    or: |a, b| match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    },
};

/// A semialgebraic range in ℝ^d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Range {
    nvars: usize,
    atoms: Vec<MPoly>,
    formula: Formula,
}

impl Range {
    pub fn new(nvars: usize, atoms: Vec<MPoly>, formula: Formula) -> Result<Range> {
        if atoms.iter().any(|a| a.nvars() != nvars) {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                got: atoms.iter().map(|a| a.nvars()).find(|&n| n != nvars).unwrap(),
            });
        }
        if atoms.iter().any(|a| a.is_zero()) {
            return Err(Error::Precondition("range atoms must be nonzero".into()));
        }
        fn check(f: &Formula, n: usize) -> bool {
            match f {
                Formula::Atom(i) => *i < n,
                Formula::Not(g) => check(g, n),
                Formula::And(gs) | Formula::Or(gs) => !gs.is_empty() && gs.iter().all(|g| check(g, n)),
            }
        }
        if !check(&formula, atoms.len()) {
            return Err(Error::Precondition("malformed range formula".into()));
        }
        Ok(Range { nvars, atoms, formula })
    }

    /// `{h ≥ 0}`.
    pub fn atom(h: MPoly) -> Result<Range> {
        Range::new(h.nvars(), vec![h], Formula::Atom(0))
    }

    /// Conjunction `h_1 ≥ 0 ∧ … ∧ h_s ≥ 0`.
    pub fn all_of(nvars: usize, hs: Vec<MPoly>) -> Result<Range> {
        let f = match hs.len() {
            1 => Formula::Atom(0),
            n => Formula::And((0..n).map(Formula::Atom).collect()),
        };
        Range::new(nvars, hs, f)
    }

    /// The zero set `{h = 0}` as `h ≥ 0 ∧ −h ≥ 0`.
    pub fn zero_set(h: MPoly) -> Result<Range> {
        let n = h.nvars();
        let neg = -&h;
        Range::all_of(n, vec![h, neg])
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn atoms(&self) -> &[MPoly] {
        &self.atoms
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    /// Maximum atom degree D_0.
    pub fn max_degree(&self) -> usize {
        self.atoms.iter().map(|a| a.total_degree()).max().unwrap_or(0)
    }

    /// Atom count s.
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.formula
            .eval(&|i| !self.atoms[i].eval_unchecked(x).is_negative(), &BOOL)
    }

    pub fn evaluator(&self) -> RangeEval {
        RangeEval {
            atoms: self.atoms.iter().map(SignEval::new).collect(),
            range: self.clone(),
        }
    }

    pub fn parse(src: &str, nvars: usize) -> Result<Range> {
        let mut p = RangeParser {
            s: src,
            pos: 0,
            nvars,
            atoms: Vec::new(),
        };
        let f = p.expr()?;
        p.skip_ws();
        if p.pos != src.len() {
            return Err(p.err("trailing input"));
        }
        Range::new(nvars, p.atoms, f)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(r: &Range, f: &Formula, nested: bool, out: &mut fmt::Formatter<'_>) -> fmt::Result {
            match f {
                Formula::Atom(i) => write!(out, "({} >= 0)", r.atoms[*i]),
                Formula::Not(g) => {
                    out.write_str("!")?;
                    go(r, g, true, out)
                }
                Formula::And(gs) | Formula::Or(gs) if gs.len() == 1 => go(r, &gs[0], nested, out),
                Formula::And(gs) | Formula::Or(gs) => {
                    let sep = if matches!(f, Formula::And(_)) { " & " } else { " | " };
                    if nested {
                        out.write_str("(")?;
                    }
                    for (k, g) in gs.iter().enumerate() {
                        if k > 0 {
                            out.write_str(sep)?;
                        }
                        go(r, g, true, out)?;
                    }
                    if nested {
                        out.write_str(")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, &self.formula, false, out)
    }
}

struct RangeParser<'a> {
    s: &'a str,
    pos: usize,
    nvars: usize,
    atoms: Vec<MPoly>,
}

impl RangeParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.s[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conj()?];
        while self.eat('|') {
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while self.eat('&') {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat('!') {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if !self.eat('(') {
            return Err(self.err("expected '(' or '!'"));
        }
        let start = self.pos;
        let close = self.s[start..]
            .find(['(', ')'])
            .map(|i| start + i)
            .ok_or_else(|| self.err("unclosed '('"))?;
        let inner = &self.s[start..close];
        if self.s[close..].starts_with(')') && !inner.contains(['&', '|', '!']) {
            // Atom: "<poly> >= 0".
            let Some(ge) = inner.find(">=") else {
                return Err(self.err("expected '>= 0' in atom"));
            };
            if inner[ge + 2..].trim() != "0" {
                self.pos = start + ge + 2;
                return Err(self.err("atoms compare against 0"));
            }
            let h = parse_poly(inner[..ge].trim(), self.nvars).map_err(|e| match e {
                Error::Parse { offset, msg } => Error::Parse {
                    offset: start + offset,
                    msg,
                },
                e => e,
            })?;
            if h.is_zero() {
                return Err(self.err("atom polynomial is zero"));
            }
            self.atoms.push(h);
            self.pos = close + 1;
            return Ok(Formula::Atom(self.atoms.len() - 1));
        }
        let f = self.expr()?;
        if !self.eat(')') {
            return Err(self.err("expected ')'"));
        }
        Ok(f)
    }
}

/// A range with its atoms prepared for repeated certified sign queries.
#[derive(Clone, Debug)]
pub struct RangeEval {
    atoms: Vec<SignEval>,
    range: Range,
}

impl RangeEval {
    pub fn range(&self) -> &Range {
        &self.range
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        let fx: Vec<Fi> = x.iter().map(Fi::enclose).collect();
        self.range.formula.eval(
            &|i| self.atoms[i].sign_at_with(&fx, x) != Sign::Neg,
            &BOOL,
        )
    }

    /// Certified truth value on a whole box, if uniform.
    pub fn on_box(&self, fb: &[Fi], bx: &[RInterval]) -> Option<bool> {
        self.range.formula.eval(
            &|i| {
                let a = &self.atoms[i];
                if a.poly().is_constant() {
                    return Some(!a.poly().coeff(&crate::poly::Monomial::one(bx.len())).is_negative());
                }
                match a.sign_on_boxes(fb, bx) {
                    Some(Sign::Pos) => Some(true),
                    Some(Sign::Neg) => Some(false),
                    _ => None,
                }
            },
            &KLEENE,
        )
    }
}

/// Rational boxes covering every point of a region.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxCover {
    pub boxes: Vec<Vec<RInterval>>,
}

impl BoxCover {
    /// Tight bounding boxes of at most `max_boxes` groups, found by
    /// repeatedly halving the widest group at its median.
    pub fn from_points(points: &[&[Q]], max_boxes: usize) -> BoxCover {
        if points.is_empty() {
            return BoxCover::default();
        }
        let approx: Vec<Vec<f64>> = points
            .iter()
            .map(|p| p.iter().map(crate::rational::to_f64).collect())
            .collect();
        let width = |g: &[usize]| -> (f64, usize) {
            let k = approx[g[0]].len();
            (0..k)
                .map(|a| {
                    let (lo, hi) = g.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                        (lo.min(approx[i][a]), hi.max(approx[i][a]))
                    });
                    (hi - lo, a)
                })
                .fold((-1.0, 0), |best, w| if w.0 > best.0 { w } else { best })
        };
        let mut groups: Vec<Vec<usize>> = vec![(0..points.len()).collect()];
        while groups.len() < max_boxes.max(1) {
            let (gi, (w, axis)) = groups
                .iter()
                .enumerate()
                .map(|(i, g)| (i, width(g)))
                .fold((0, (-1.0, 0)), |best, c| if c.1 .0 > best.1 .0 { c } else { best });
            if w <= 0.0 {
                break;
            }
            let mut g = groups.swap_remove(gi);
            g.sort_by(|&a, &b| points[a][axis].cmp(&points[b][axis]));
            let mid = g.len() / 2;
            // Keep equal coordinates together so both halves shrink.
            let split = (1..g.len())
                .filter(|&j| points[g[j - 1]][axis] != points[g[j]][axis])
                .min_by_key(|&j| j.abs_diff(mid))
                .unwrap_or(mid);
            let hi = g.split_off(split);
            groups.push(g);
            groups.push(hi);
        }
        groups.sort();
        let boxes = groups
            .iter()
            .map(|g| {
                let k = points[g[0]].len();
                (0..k)
                    .map(|a| {
                        let lo = g.iter().map(|&i| &points[i][a]).min().unwrap().clone();
                        let hi = g.iter().map(|&i| &points[i][a]).max().unwrap().clone();
                        RInterval::new(lo, hi)
                    })
                    .collect()
            })
            .collect();
        BoxCover { boxes }
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.boxes
            .iter()
            .any(|b| b.iter().zip(x).all(|(iv, v)| iv.contains(v)))
    }

    /// Uniform certified truth of the range over the whole cover.
    pub fn truth(&self, gamma: &RangeEval) -> Option<bool> {
        let mut seen: Option<bool> = None;
        for b in &self.boxes {
            let fb: Vec<Fi> = b.iter().map(Fi::enclose_interval).collect();
            let t = gamma.on_box(&fb, b)?;
            if seen.is_some_and(|s| s != t) {
                return None;
            }
            seen = Some(t);
        }
        seen
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Inside,
    Outside,
    Crosses,
}

/// Sound three-way classification: `Inside`/`Outside` are certified for
/// every point of the region; `Crosses` is the safe default.
pub fn classify(region: &Region, gamma: &RangeEval) -> Verdict {
    if region.cover.is_empty() {
        return Verdict::Outside;
    }
    let v = match region.cover.truth(gamma) {
        Some(true) => Verdict::Inside,
        Some(false) => Verdict::Outside,
        None => Verdict::Crosses,
    };
    if v != Verdict::Crosses {
        let w = gamma.contains(&region.witness);
        assert_eq!(
            w,
            v == Verdict::Inside,
            "witness contradicts certified verdict {v:?} for region {}:{}",
            region.level,
            region.index
        );
    }
    v
}

/// Number of regions classified `Crosses`: an upper bound on true crossings.
pub fn count_crossed<'a>(regions: impl IntoIterator<Item = &'a Region>, x: &RangeEval) -> usize {
    regions
        .into_iter()
        .filter(|r| classify(r, x) == Verdict::Crosses)
        .count()
}

/// Regions crossed by the hypersurface Z(h): those whose cover meets Z(h)
/// or has boxes on both sides of it. For a connected region with points on
/// both sides this is a genuine crossing.
pub fn count_crossed_by_zero_set<'a>(regions: impl IntoIterator<Item = &'a Region>, h: &MPoly) -> usize {
    let side = Range::atom(h.clone()).expect("nonzero").evaluator();
    count_crossed(regions, &side)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Dyadic subdivisions per axis of the frame cube [−1, 1]^k.
    pub depth: u32,
    /// Maximum number of grid cells.
    pub budget: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            depth: 8,
            budget: 1 << 16,
        }
    }
}

/// Certified cut signs on every cell of a uniform grid over [−1, 1]^k.
pub struct GridLabels {
    k: usize,
    side: usize,
    /// `labels[cell * ncuts + j]`: certified sign of cut j, if any.
    labels: Vec<Option<Sign>>,
    ncuts: usize,
}

impl GridLabels {
    /// `None` when the grid would need fewer than two cells per axis.
    pub fn new(k: usize, cuts: &[CutEval], spec: &GridSpec) -> Option<GridLabels> {
        if k == 0 || k > 3 {
            return None;
        }
        let mut depth = spec.depth;
        while depth > 0 && (1usize << (depth as usize * k)) > spec.budget {
            depth -= 1;
        }
        if depth == 0 {
            return None;
        }
        let side = 1usize << depth;
        let ncells = side.pow(k as u32);
        let h = 2.0 / side as f64;
        let mut labels = Vec::with_capacity(ncells * cuts.len());
        for cell in 0..ncells {
            let idx = unflatten(cell, side, k);
            let fb: Vec<Fi> = idx
                .iter()
                .map(|&i| Fi::new(-1.0 + h * i as f64, -1.0 + h * (i + 1) as f64))
                .collect();
            let mut rb: Option<Vec<RInterval>> = None;
            for c in cuts {
                let fast = match c {
                    CutEval::Poly(se) => se.sign_on_fbox(&fb),
                    CutEval::Roots { .. } => None,
                };
                let s = fast.or_else(|| {
                    let rb = rb.get_or_insert_with(|| {
                        idx.iter()
                            .map(|&i| {
                                let den = Q::from_integer((side as i64).into());
                                let lo = Q::from_integer((2 * i as i64 - side as i64).into()) / &den;
                                let hi = Q::from_integer((2 * i as i64 + 2 - side as i64).into()) / &den;
                                RInterval::new(lo, hi)
                            })
                            .collect()
                    });
                    c.sign_on_box(&fb, rb)
                });
                labels.push(s);
            }
        }
        Some(GridLabels {
            k,
            side,
            labels,
            ncuts: cuts.len(),
        })
    }

    /// Cell of the closed grid containing a point of [−1, 1]^k.
    fn cell_of(&self, y: &[Q]) -> Option<usize> {
        let mut cell = 0;
        for v in y.iter().rev() {
            let t = (v + Q::from_integer(1.into())) * Q::from_integer((self.side as i64).into())
                / Q::from_integer(2.into());
            if t.is_negative() || t > Q::from_integer((self.side as i64).into()) {
                return None;
            }
            let i = (t.floor().to_integer().try_into().unwrap_or(0usize)).min(self.side - 1);
            cell = cell * self.side + i;
        }
        Some(cell)
    }

    fn compatible(&self, cell: usize, signs: &[Sign]) -> bool {
        let l = &self.labels[cell * self.ncuts..(cell + 1) * self.ncuts];
        l.iter().zip(signs).all(|(a, s)| a.is_none_or(|a| a == *s))
    }
}

fn unflatten(mut cell: usize, side: usize, k: usize) -> Vec<usize> {
    let mut idx = Vec::with_capacity(k);
    for _ in 0..k {
        idx.push(cell % side);
        cell /= side;
    }
    idx
}

/// Groups points of one sign cell by flood fill over grid cells where no
/// cut is certified to have the wrong sign. Closed cells and a shared
/// exterior keep the fill an over-approximation of connectivity, so points
/// in different groups lie in different connected components. Points are
/// given in the frame's normalized coordinates; returns index groups.
pub fn refine_components(
    grid: &GridLabels,
    signs: &[Sign],
    points: &[Vec<Q>],
) -> Vec<Vec<usize>> {
    if points.is_empty() {
        return Vec::new();
    }
    let ncells = grid.side.pow(grid.k as u32);
    const UNSEEN: usize = usize::MAX;
    let mut comp = vec![UNSEEN; ncells];
    let mut exterior_comp: Option<usize> = None;
    let mut next = 0;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of_comp: Vec<Option<usize>> = Vec::new();
    let mut outside_points = Vec::new();
    for (pi, y) in points.iter().enumerate() {
        let Some(start) = grid.cell_of(y) else {
            outside_points.push(pi);
            continue;
        };
        if comp[start] == UNSEEN {
            let id = next;
            next += 1;
            group_of_comp.push(None);
            let mut touches_boundary = false;
            let mut queue = VecDeque::from([start]);
            comp[start] = id;
            while let Some(c) = queue.pop_front() {
                let idx = unflatten(c, grid.side, grid.k);
                let mut stride = 1;
                for a in 0..grid.k {
                    if idx[a] == 0 || idx[a] + 1 == grid.side {
                        touches_boundary = true;
                    }
                    for (ok, nb) in [(idx[a] > 0, c.wrapping_sub(stride)), (idx[a] + 1 < grid.side, c + stride)] {
                        if ok && comp[nb] == UNSEEN && grid.compatible(nb, signs) {
                            comp[nb] = id;
                            queue.push_back(nb);
                        }
                    }
                    stride *= grid.side;
                }
            }
            // Everything reaching the frame boundary may connect outside.
            if touches_boundary {
                match exterior_comp {
                    Some(e) => group_of_comp[id] = group_of_comp[e],
                    None => exterior_comp = Some(id),
                }
            }
        }
        let cid = comp[start];
        let gid = match group_of_comp[cid] {
            Some(g) => g,
            None => {
                groups.push(Vec::new());
                group_of_comp[cid] = Some(groups.len() - 1);
                groups.len() - 1
            }
        };
        groups[gid].push(pi);
    }
    if !outside_points.is_empty() {
        let gid = match exterior_comp.and_then(|e| group_of_comp[e]) {
            Some(g) => g,
            None => {
                groups.push(Vec::new());
                groups.len() - 1
            }
        };
        groups[gid].extend(outside_points);
        groups[gid].sort_unstable();
    }
    groups
}

#[cfg(test)]
mod tests;
