//! Step functions on ordinal intervals `[0, top]`, atomic measures and
//! Cantor schemes with their Rademacher measure families.
//!
//! Functions are finite combinations of indicators of clopen intervals
//! `(a, b]`; the interval `(-1, b]` is written `[0, b]` and contains `0`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::ordinal::Ordinal;
use crate::schreier::FiniteSet;

/// The clopen interval `(lo, hi]`; `lo == None` stands for `-1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Interval {
    pub lo: Option<Ordinal>,
    pub hi: Ordinal,
}

impl Interval {
    pub fn new(lo: Option<Ordinal>, hi: Ordinal) -> Result<Self, Error> {
        if lo.as_ref().is_some_and(|l| *l >= hi) {
            return Err(Error::Shape(format!("empty interval ({:?}, {hi}]", lo)));
        }
        Ok(Interval { lo, hi })
    }

    /// `(lo, hi]` with an ordinal left endpoint.
    pub fn open_closed(lo: Ordinal, hi: Ordinal) -> Result<Self, Error> {
        Interval::new(Some(lo), hi)
    }

    /// `[0, hi]`.
    pub fn from_zero(hi: Ordinal) -> Self {
        Interval { lo: None, hi }
    }

    pub fn contains(&self, x: &Ordinal) -> bool {
        self.lo.as_ref().is_none_or(|l| l < x) && x <= &self.hi
    }

    /// The least point: `lo + 1`, or `0` for `[0, hi]`.
    pub fn least_point(&self) -> Ordinal {
        match &self.lo {
            None => Ordinal::zero(),
            Some(l) => l.successor(),
        }
    }

    fn lo_le(a: &Option<Ordinal>, b: &Option<Ordinal>) -> bool {
        match (a, b) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => x <= y,
        }
    }

    fn max_lo(a: &Option<Ordinal>, b: &Option<Ordinal>) -> Option<Ordinal> {
        if Self::lo_le(a, b) {
            b.clone()
        } else {
            a.clone()
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = Self::max_lo(&self.lo, &other.lo);
        let hi = self.hi.clone().min(other.hi.clone());
        Interval::new(lo, hi).ok()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lo {
            None => write!(f, "[0,{}]", self.hi),
            Some(l) => write!(f, "({},{}]", l, self.hi),
        }
    }
}

impl FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Shape(format!("bad interval {s:?}"));
        let t = s.trim();
        let body = t.strip_suffix(']').ok_or_else(bad)?;
        let (lo, rest) = if let Some(r) = body.strip_prefix('[') {
            let (z, hi) = r.split_once(',').ok_or_else(bad)?;
            if z.trim() != "0" {
                return Err(bad());
            }
            (None, hi)
        } else {
            let r = body.strip_prefix('(').ok_or_else(bad)?;
            let (lo, hi) = r.split_once(',').ok_or_else(bad)?;
            if lo.trim() == "-1" {
                (None, hi)
            } else {
                (Some(lo.parse::<Ordinal>()?), hi)
            }
        };
        Interval::new(lo, rest.parse()?)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite union of clopen intervals, kept sorted, disjoint and with
/// touching intervals merged.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct IntervalSet(Vec<Interval>);

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet(Vec::new())
    }

    pub fn from_intervals(mut v: Vec<Interval>) -> Self {
        v.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            if let Some(last) = out.last_mut() {
                if Interval::lo_le(&iv.lo, &Some(last.hi.clone())) {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        IntervalSet(out)
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &Ordinal) -> bool {
        let i = self.0.partition_point(|iv| iv.hi < *x);
        self.0.get(i).is_some_and(|iv| iv.contains(x))
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.0.len() && j < other.0.len() {
            if let Some(x) = self.0[i].intersect(&other.0[j]) {
                out.push(x);
            }
            if self.0[i].hi <= other.0[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        IntervalSet::from_intervals(v)
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.intersect(other) == *self
    }

    pub fn is_disjoint(&self, other: &IntervalSet) -> bool {
        self.intersect(other).is_empty()
    }

    pub fn least_point(&self) -> Option<Ordinal> {
        self.0.first().map(|iv| iv.least_point())
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(" u "))
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Piece {
    pub interval: Interval,
    pub value: f64,
}

/// A step function on `[0, top]`: finitely many disjoint pieces, zero
/// elsewhere. Adjacent pieces with equal values are merged and zero pieces
/// dropped, so equal functions have equal representations.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct StepFunction {
    pub top: Ordinal,
    pieces: Vec<Piece>,
}

impl StepFunction {
    pub fn zero(top: Ordinal) -> Self {
        StepFunction {
            top,
            pieces: Vec::new(),
        }
    }

    pub fn new(top: Ordinal, pieces: Vec<(Interval, f64)>) -> Result<Self, Error> {
        let mut pieces: Vec<Piece> = pieces
            .into_iter()
            .map(|(interval, value)| Piece { interval, value })
            .collect();
        pieces.sort_by(|a, b| a.interval.hi.cmp(&b.interval.hi));
        for p in &pieces {
            if p.interval.hi > top {
                return Err(Error::Shape(format!("piece {} exceeds {top}", p.interval)));
            }
            if !p.value.is_finite() {
                return Err(Error::Shape("non-finite value".into()));
            }
        }
        for w in pieces.windows(2) {
            if !Interval::lo_le(&Some(w[0].interval.hi.clone()), &w[1].interval.lo) {
                return Err(Error::Shape(format!(
                    "pieces {} and {} overlap",
                    w[0].interval, w[1].interval
                )));
            }
        }
        let mut f = StepFunction { top, pieces };
        f.canonicalize();
        Ok(f)
    }

    fn canonicalize(&mut self) {
        let mut out: Vec<Piece> = Vec::with_capacity(self.pieces.len());
        for p in self.pieces.drain(..) {
            if p.value == 0.0 {
                continue;
            }
            if let Some(last) = out.last_mut() {
                if last.value == p.value && p.interval.lo.as_ref() == Some(&last.interval.hi) {
                    last.interval.hi = p.interval.hi;
                    continue;
                }
            }
            out.push(p);
        }
        self.pieces = out;
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, x: &Ordinal) -> Result<f64, Error> {
        if *x > self.top {
            return Err(Error::Shape(format!("{x} lies outside [0,{}]", self.top)));
        }
        let i = self.pieces.partition_point(|p| p.interval.hi < *x);
        Ok(match self.pieces.get(i) {
            Some(p) if p.interval.contains(x) => p.value,
            _ => 0.0,
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.pieces.iter().map(|p| p.value.abs()).fold(0.0, f64::max)
    }

    /// Closure of the support, which for clopen pieces is the union itself.
    pub fn support(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.pieces.iter().map(|p| p.interval.clone()).collect())
    }

    pub fn preimage(&self, v: f64) -> IntervalSet {
        IntervalSet::from_intervals(
            self.pieces
                .iter()
                .filter(|p| p.value == v)
                .map(|p| p.interval.clone())
                .collect(),
        )
    }

    /// Whether the function equals `v` at every point of `set`.
    pub fn is_constant_on(&self, set: &IntervalSet, v: f64) -> bool {
        if v == 0.0 {
            return set.is_disjoint(&self.support());
        }
        set.intervals().iter().all(|iv| {
            let covering: Vec<Interval> = self
                .pieces
                .iter()
                .filter(|p| p.value == v)
                .filter_map(|p| p.interval.intersect(iv))
                .collect();
            IntervalSet::from_intervals(covering) == IntervalSet(vec![iv.clone()])
        })
    }

    /// The restriction to `[0, beta]`.
    pub fn restrict(&self, beta: &Ordinal) -> StepFunction {
        StepFunction {
            top: beta.clone().min(self.top.clone()),
            pieces: self.clipped(beta),
        }
    }

    /// Zero above `beta`, same domain.
    pub fn project(&self, beta: &Ordinal) -> StepFunction {
        StepFunction {
            top: self.top.clone(),
            pieces: self.clipped(beta),
        }
    }

    fn clipped(&self, beta: &Ordinal) -> Vec<Piece> {
        let cut = Interval::from_zero(beta.clone());
        self.pieces
            .iter()
            .filter_map(|p| {
                p.interval.intersect(&cut).map(|interval| Piece {
                    interval,
                    value: p.value,
                })
            })
            .collect()
    }

    /// `self + c * other` on the common domain.
    pub fn add_scaled(&self, c: f64, other: &StepFunction) -> Result<StepFunction, Error> {
        if self.top != other.top {
            return Err(Error::Shape("step functions on different domains".into()));
        }
        let mut cuts: BTreeSet<Option<Ordinal>> = BTreeSet::new();
        for p in self.pieces.iter().chain(&other.pieces) {
            cuts.insert(p.interval.lo.clone());
            cuts.insert(Some(p.interval.hi.clone()));
        }
        let cuts: Vec<Option<Ordinal>> = cuts.into_iter().collect();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let hi = w[1].clone().unwrap();
            let v = self.eval(&hi)? + c * other.eval(&hi)?;
            pieces.push(Piece {
                interval: Interval { lo: w[0].clone(), hi },
                value: v,
            });
        }
        let mut f = StepFunction {
            top: self.top.clone(),
            pieces,
        };
        f.canonicalize();
        Ok(f)
    }
}

/// Pairwise disjointness of closed supports.
pub fn disjoint(fs: &[StepFunction]) -> bool {
    let supports: Vec<IntervalSet> = fs.iter().map(|f| f.support()).collect();
    for i in 0..supports.len() {
        for j in i + 1..supports.len() {
            if !supports[i].is_disjoint(&supports[j]) {
                return false;
            }
        }
    }
    true
}

/// A point of one of the compact spaces in play.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Ordinal(Ordinal),
    Set(FiniteSet),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Ordinal(o) => write!(f, "{o}"),
            Point::Set(s) => write!(f, "({s})"),
        }
    }
}

/// A finitely supported signed measure with exact rational weights.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct AtomicMeasure {
    atoms: BTreeMap<Point, BigRational>,
}

impl AtomicMeasure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_atom(&mut self, p: Point, w: BigRational) {
        let e = self.atoms.entry(p).or_insert_with(BigRational::zero);
        *e += w;
        self.atoms.retain(|_, w| !w.is_zero());
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Point, &BigRational)> {
        self.atoms.iter()
    }

    pub fn total_variation(&self) -> BigRational {
        self.atoms.values().map(|w| w.abs()).sum()
    }
}

impl Serialize for AtomicMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(String, String)> = self.atoms.iter().map(|(p, w)| (p.to_string(), w.to_string())).collect();
        v.serialize(s)
    }
}

pub fn exact(v: f64) -> Result<BigRational, Error> {
    BigRational::from_float(v).ok_or_else(|| Error::Shape(format!("non-finite value {v}")))
}

/// `<mu, f>`, exact in the values of `f`.
pub fn pair(mu: &AtomicMeasure, f: &StepFunction) -> Result<BigRational, Error> {
    let mut acc = BigRational::zero();
    for (p, w) in mu.atoms() {
        let Point::Ordinal(x) = p else {
            return Err(Error::Shape(format!("atom {p} is not an ordinal")));
        };
        let v = f.eval(x)?;
        if v != 0.0 {
            acc += w * exact(v)?;
        }
    }
    Ok(acc)
}

/// Squared weak-2 norm of a finite family of measures:
/// the maximum over sign patterns `s` on the atoms of `sum_i <mu_i, s>^2`.
pub fn weak2_norm_sq_measures(mus: &[AtomicMeasure]) -> Result<BigRational, Error> {
    let points: Vec<&Point> = mus
        .iter()
        .flat_map(|m| m.atoms.keys())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let k = points.len();
    if k > 20 {
        return Err(Error::Budget(format!("{k} atoms for sign enumeration")));
    }
    let index: BTreeMap<&Point, usize> = points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let rows: Vec<Vec<(usize, &BigRational)>> = mus
        .iter()
        .map(|m| m.atoms.iter().map(|(p, w)| (index[p], w)).collect())
        .collect();
    let mut best = BigRational::zero();
    let patterns: u64 = if k == 0 { 1 } else { 1 << (k - 1) };
    for bits in 0..patterns {
        let mut total = BigRational::zero();
        for row in &rows {
            let mut s = BigRational::zero();
            for (i, w) in row {
                if bits >> i & 1 == 1 {
                    s -= *w;
                } else {
                    s += *w;
                }
            }
            total += &s * &s;
        }
        if total > best {
            best = total;
        }
    }
    Ok(best)
}

/// A sign: `+1` or `-1`.
pub type Sign = i8;

/// A node of the dyadic tree, written as its sign sequence.
pub type SignSeq = Vec<Sign>;

pub fn format_signs(d: &[Sign]) -> String {
    if d.is_empty() {
        return "()".into();
    }
    let parts: Vec<&str> = d.iter().map(|&e| if e > 0 { "+" } else { "-" }).collect();
    format!("({})", parts.join(","))
}

/// All sign sequences of length `len` in lexicographic order `+` before `-`.
pub fn sign_sequences(len: usize) -> Vec<SignSeq> {
    (0..1u64 << len)
        .map(|bits| {
            (0..len)
                .map(|i| if bits >> (len - 1 - i) & 1 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect()
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub enum Cell {
    Intervals(IntervalSet),
    Points(BTreeSet<Point>),
}

impl Cell {
    pub fn is_empty(&self) -> bool {
        match self {
            Cell::Intervals(s) => s.is_empty(),
            Cell::Points(p) => p.is_empty(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Cell::Intervals(s), Point::Ordinal(x)) => s.contains(x),
            (Cell::Points(ps), p) => ps.contains(p),
            _ => false,
        }
    }

    fn is_subset(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Intervals(a), Cell::Intervals(b)) => a.is_subset(b),
            (Cell::Points(a), Cell::Points(b)) => a.is_subset(b),
            _ => false,
        }
    }

    fn is_disjoint(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Intervals(a), Cell::Intervals(b)) => a.is_disjoint(b),
            (Cell::Points(a), Cell::Points(b)) => a.is_disjoint(b),
            _ => true,
        }
    }

    pub fn least_point(&self) -> Option<Point> {
        match self {
            Cell::Intervals(s) => s.least_point().map(Point::Ordinal),
            Cell::Points(p) => p.first().cloned(),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Intervals(s) => write!(f, "{s}"),
            Cell::Points(p) => {
                let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

/// A Cantor scheme of depth `m`: one non-empty cell per sign sequence of
/// length at most `m`, children nested in parents and siblings disjoint.
#[derive(Clone, PartialEq, Debug)]
pub struct CantorScheme {
    depth: usize,
    cells: BTreeMap<SignSeq, Cell>,
}

impl CantorScheme {
    pub fn new(depth: usize, cells: BTreeMap<SignSeq, Cell>) -> Result<Self, Error> {
        let s = CantorScheme { depth, cells };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), Error> {
        for len in 0..=self.depth {
            for d in sign_sequences(len) {
                let c = self.cells.get(&d).ok_or_else(|| Error::EmptyCell(format_signs(&d)))?;
                if c.is_empty() {
                    return Err(Error::EmptyCell(format_signs(&d)));
                }
                if len < self.depth {
                    let mut plus = d.clone();
                    plus.push(1);
                    let mut minus = d.clone();
                    minus.push(-1);
                    let (a, b) = match (self.cells.get(&plus), self.cells.get(&minus)) {
                        (Some(a), Some(b)) => (a, b),
                        _ => return Err(Error::EmptyCell(format_signs(&plus))),
                    };
                    if !a.is_subset(c) || !b.is_subset(c) {
                        return Err(Error::Shape(format!("children of {} are not nested", format_signs(&d))));
                    }
                    if !a.is_disjoint(b) {
                        return Err(Error::Shape(format!("children of {} overlap", format_signs(&d))));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn cell(&self, d: &[Sign]) -> Option<&Cell> {
        self.cells.get(d)
    }

    pub fn cells(&self) -> impl Iterator<Item = (&SignSeq, &Cell)> {
        self.cells.iter()
    }
}

/// One chosen point per leaf cell.
pub type Selector = BTreeMap<SignSeq, Point>;

/// The least point of every leaf cell.
pub fn default_selector(scheme: &CantorScheme) -> Selector {
    sign_sequences(scheme.depth)
        .into_iter()
        .map(|d| {
            let p = scheme.cells[&d].least_point().expect("cells are non-empty");
            (d, p)
        })
        .collect()
}

/// `mu_i = 2^-m sum_eps eps_i delta_{psi(eps)}` for `i = 1..=m`.
pub fn rademacher(scheme: &CantorScheme, selector: &Selector) -> Result<Vec<AtomicMeasure>, Error> {
    let m = scheme.depth;
    let scale = BigRational::new(BigInt::one(), BigInt::one() << m);
    let mut out = vec![AtomicMeasure::new(); m];
    for d in sign_sequences(m) {
        let p = selector.get(&d).ok_or_else(|| Error::EmptyCell(format_signs(&d)))?;
        if !scheme.cells[&d].contains(p) {
            return Err(Error::SelectorOutside(p.to_string()));
        }
        for (i, mu) in out.iter_mut().enumerate() {
            let w = if d[i] > 0 { scale.clone() } else { -scale.clone() };
            mu.add_atom(p.clone(), w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(t: &str) -> Ordinal {
        t.parse().unwrap()
    }

    fn iv(t: &str) -> Interval {
        t.parse().unwrap()
    }

    #[test]
    fn evaluation() {
        let f = StepFunction::new(o("4"), vec![(iv("(0,2]"), 1.0), (iv("(2,4]"), -1.0)]).unwrap();
        assert_eq!(f.eval(&o("1")).unwrap(), 1.0);
        assert_eq!(f.eval(&o("0")).unwrap(), 0.0);
        assert_eq!(f.eval(&o("3")).unwrap(), -1.0);
        assert!(f.eval(&o("5")).is_err());
        assert_eq!(f.sup_norm(), 1.0);
        assert_eq!(f.support().to_string(), "(0,4]");
    }

    #[test]
    fn interval_text() {
        for t in ["[0,w]", "(w*2,w*4]", "(1,2]"] {
            assert_eq!(iv(t).to_string(), t);
        }
        assert_eq!(iv("(-1,3]").to_string(), "[0,3]");
    }

    #[test]
    fn union_merges() {
        let s = IntervalSet::from_intervals(vec![iv("(2,4]"), iv("(0,2]"), iv("(5,6]")]);
        assert_eq!(s.to_string(), "(0,4] u (5,6]");
        let t = IntervalSet::from_intervals(vec![iv("(0,5]"), iv("(1,2]"), iv("(3,9]")]);
        assert_eq!(t.to_string(), "(0,9]");
    }

    #[test]
    fn restriction_and_projection() {
        let f = StepFunction::new(o("w*2"), vec![(iv("(0,w]"), 1.0), (iv("(w,w*2]"), 2.0)]).unwrap();
        let r = f.restrict(&o("w + 3"));
        assert_eq!(r.top, o("w + 3"));
        assert_eq!(r.eval(&o("w + 2")).unwrap(), 2.0);
        let p = f.project(&o("w"));
        assert_eq!(p.eval(&o("w + 2")).unwrap(), 0.0);
        assert_eq!(p.top, o("w*2"));
    }

    #[test]
    fn selector_examples() {
        let cell = Cell::Intervals(IntervalSet::from_intervals(vec![iv("(0,2]")]));
        assert_eq!(cell.least_point(), Some(Point::Ordinal(o("1"))));
        let pts: BTreeSet<Point> = [Point::Set("2,3".parse().unwrap()), Point::Set("4".parse().unwrap())]
            .into_iter()
            .collect();
        assert_eq!(
            Cell::Points(pts).least_point(),
            Some(Point::Set("2,3".parse().unwrap()))
        );
    }

    #[test]
    fn addition() {
        let f = StepFunction::new(o("4"), vec![(iv("(0,2]"), 1.0)]).unwrap();
        let g = StepFunction::new(o("4"), vec![(iv("(1,4]"), 1.0)]).unwrap();
        let h = f.add_scaled(-1.0, &g).unwrap();
        assert_eq!(h.eval(&o("1")).unwrap(), 1.0);
        assert_eq!(h.eval(&o("2")).unwrap(), 0.0);
        assert_eq!(h.eval(&o("3")).unwrap(), -1.0);
    }
}
