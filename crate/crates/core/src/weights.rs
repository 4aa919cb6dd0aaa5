//! Repeated-average weights `p[xi]` and their square-root companions
//! `q[xi, zeta]`, the averaging operators built from them, and exact checks
//! of their permanence and convexity along streams.
//!
//! `p[0] = 1`; `p[beta+1]_E = p[beta]_F / min E_m` where `E_m` is the last
//! greedy `S[beta+1]` block of `E` and `F` the last `S[beta]` block of `E_m`;
//! for a limit, `p[lambda]_E = p[lambda[min E_m] + 1]_{E_m}`. The weights `q`
//! follow the same recursion over the families `S[zeta][S[xi]]` with
//! `sqrt(min E_m)` in place of `min E_m` and `S[xi]` at level zero.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::ordinal::{Kind, Ordinal};
use crate::schreier::{greedy_blocks, Decomposer, Family, FiniteSet, Leaf, Limits, Recognizer};

/// An exact number `c / sqrt(r)` with rational `c` and squarefree `r`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Weight {
    coeff: BigRational,
    radicand: u64,
}

fn squarefree_split(mut n: u64) -> (u64, u64) {
    // n = f^2 * r with r squarefree
    let (mut f, mut r) = (1u64, 1u64);
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        f *= p.pow(e / 2);
        if e % 2 == 1 {
            r *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (f, r * n)
}

impl Weight {
    pub fn rational(c: BigRational) -> Self {
        Weight { coeff: c, radicand: 1 }
    }

    pub fn one() -> Self {
        Weight::rational(BigRational::one())
    }

    /// `1 / sqrt(n)`.
    pub fn inv_sqrt(n: u64) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidWeight("sqrt of zero".into()));
        }
        let (f, r) = squarefree_split(n);
        Ok(Weight {
            coeff: BigRational::new(BigInt::one(), BigInt::from(f)),
            radicand: r,
        })
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.radicand == 1
    }

    pub fn mul(&self, other: &Weight) -> Weight {
        let g = self.radicand.gcd(&other.radicand);
        let r = (self.radicand / g) * (other.radicand / g);
        Weight {
            coeff: &self.coeff * &other.coeff / BigRational::from_integer(BigInt::from(g)),
            radicand: r,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Weight {
        Weight {
            coeff: &self.coeff * c,
            radicand: self.radicand,
        }
    }

    /// Sum of two weights with the same radicand.
    pub fn checked_add(&self, other: &Weight) -> Option<Weight> {
        if self.coeff.is_zero() {
            return Some(other.clone());
        }
        if other.coeff.is_zero() {
            return Some(self.clone());
        }
        (self.radicand == other.radicand).then(|| Weight {
            coeff: &self.coeff + &other.coeff,
            radicand: self.radicand,
        })
    }

    pub fn square(&self) -> BigRational {
        &self.coeff * &self.coeff / BigRational::from_integer(BigInt::from(self.radicand))
    }

    pub fn to_f64(&self) -> f64 {
        self.coeff.to_f64().unwrap_or(f64::NAN) / (self.radicand as f64).sqrt()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = (self.coeff.numer(), self.coeff.denom());
        if self.radicand == 1 {
            write!(f, "{a}/{b}")
        } else {
            write!(f, "{a}/({b}*sqrt({}))", self.radicand)
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidWeight(s.to_string());
        let (a, rest) = s.trim().split_once('/').ok_or_else(bad)?;
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        if let Some(inner) = rest.trim().strip_prefix('(').and_then(|x| x.strip_suffix("))")) {
            let (b, r) = inner.split_once("*sqrt(").ok_or_else(bad)?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            let r: u64 = r.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            let w = Weight::inv_sqrt(r)?;
            return Ok(w.scale(&BigRational::new(a, b)));
        }
        let b: BigInt = rest.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        Ok(Weight::rational(BigRational::new(a, b)))
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn last_block(fam: &Family, set: &FiniteSet) -> FiniteSet {
    greedy_blocks(fam, set).pop().unwrap_or_default()
}

/// `p[xi]_E` straight from the recursive definition.
pub fn p_weight(xi: &Ordinal, set: &FiniteSet) -> Result<BigRational, Error> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    match xi.kind() {
        Kind::Zero => Ok(BigRational::one()),
        Kind::Successor => {
            let beta = xi.predecessor().unwrap();
            let em = last_block(&Family::Base(xi.clone()), set);
            let fl = last_block(&Family::Base(beta.clone()), &em);
            let min = em.minimum().unwrap();
            Ok(p_weight(&beta, &fl)? / BigRational::from_integer(BigInt::from(min)))
        }
        Kind::Limit => {
            let em = last_block(&Family::Base(xi.clone()), set);
            let level = xi.fundamental(em.minimum().unwrap())?.successor();
            p_weight(&level, &em)
        }
    }
}

/// `q[xi, zeta]_E` straight from the recursive definition.
pub fn q_weight(xi: &Ordinal, zeta: &Ordinal, set: &FiniteSet) -> Result<Weight, Error> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    match zeta.kind() {
        Kind::Zero => Ok(Weight::one()),
        Kind::Successor => {
            let beta = zeta.predecessor().unwrap();
            let em = last_block(&Family::conv(zeta.clone(), xi.clone()), set);
            let fl = last_block(&Family::conv(beta.clone(), xi.clone()), &em);
            let w = q_weight(xi, &beta, &fl)?;
            Ok(w.mul(&Weight::inv_sqrt(em.minimum().unwrap())?))
        }
        Kind::Limit => {
            let em = last_block(&Family::conv(zeta.clone(), xi.clone()), set);
            let level = zeta.fundamental(em.minimum().unwrap())?.successor();
            q_weight(xi, &level, &em)
        }
    }
}

/// Walks a stream and reports, after every element, the weight of the
/// initial segment read so far.
pub(crate) struct Walker {
    dec: Decomposer,
    divisors: Vec<u64>,
}

impl Walker {
    pub(crate) fn p(xi: &Ordinal) -> Self {
        Walker {
            dec: Decomposer::new(Recognizer::fresh(xi, &Leaf::Singletons)),
            divisors: Vec::new(),
        }
    }

    pub(crate) fn q(xi: &Ordinal, zeta: &Ordinal) -> Self {
        Walker {
            dec: Decomposer::new(Recognizer::fresh(zeta, &Leaf::Schreier(xi.clone()))),
            divisors: Vec::new(),
        }
    }

    /// Returns true when `n` opens a new block.
    pub(crate) fn push(&mut self, n: u64) -> Result<bool, Error> {
        let fresh = self.dec.push(n)?;
        self.divisors.clear();
        self.dec.current.divisors(&mut self.divisors);
        Ok(fresh)
    }

    pub(crate) fn blocks_started(&self) -> usize {
        self.dec.blocks_started
    }

    pub(crate) fn block_len(&self) -> usize {
        self.dec.block_len
    }

    /// The product of minima: `p = 1/D` and `q = 1/sqrt(D)`.
    pub(crate) fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub(crate) fn p_value(&self) -> BigRational {
        let d: BigInt = self.divisors.iter().map(|&m| BigInt::from(m)).product();
        BigRational::new(BigInt::one(), d)
    }

    pub(crate) fn q_value(&self) -> Result<Weight, Error> {
        self.divisors
            .iter()
            .try_fold(Weight::one(), |acc, &m| Ok(acc.mul(&Weight::inv_sqrt(m)?)))
    }
}

fn sum_by_divisors(counts: &HashMap<Vec<u64>, u64>) -> BigRational {
    counts
        .iter()
        .map(|(d, c)| {
            let den: BigInt = d.iter().map(|&m| BigInt::from(m)).product();
            BigRational::new(BigInt::from(*c), den)
        })
        .sum()
}

fn over_budget(what: &str, limits: &Limits) -> Error {
    Error::Budget(format!("{what} exceeds {} elements", limits.max_block_len))
}

/// `sum p[xi]_F` over the initial segments `F` of the stream ending inside
/// each of the first `blocks` blocks of its `S[xi]` decomposition.
pub fn convexity_sums<I>(xi: &Ordinal, stream: I, blocks: usize, limits: &Limits) -> Result<Vec<BigRational>, Error>
where
    I: IntoIterator<Item = u64>,
{
    let mut w = Walker::p(xi);
    let mut out = Vec::with_capacity(blocks);
    let mut counts: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut seen = 0;
    for n in stream {
        seen += 1;
        if w.push(n)? && w.blocks_started() > 1 {
            out.push(sum_by_divisors(&counts));
            counts.clear();
            if out.len() == blocks {
                return Ok(out);
            }
        }
        if w.block_len() > limits.max_block_len {
            return Err(over_budget(&format!("block {} of S[{xi}]", w.blocks_started()), limits));
        }
        *counts.entry(w.divisors().to_vec()).or_insert(0) += 1;
    }
    Err(Error::StreamExhausted(seen))
}

/// One block of the `S[zeta][S[xi]]` decomposition: the exact value of
/// `sum_r (sum_{F in segment r} q_F p_F)^2`, where segments are the `S[xi]`
/// blocks inside it.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareSum {
    pub value: BigRational,
    /// Whether `q` was constant on every segment; the value is only
    /// meaningful when it was.
    pub q_constant: bool,
    pub segments: usize,
}

pub fn square_sums<I>(
    xi: &Ordinal,
    zeta: &Ordinal,
    stream: I,
    blocks: usize,
    limits: &Limits,
) -> Result<Vec<SquareSum>, Error>
where
    I: IntoIterator<Item = u64>,
{
    let mut pw = Walker::p(xi);
    let mut qw = Walker::q(xi, zeta);
    let mut out = Vec::with_capacity(blocks);
    let mut acc = BlockAccumulator::new();
    let mut seen = 0;
    for n in stream {
        seen += 1;
        let new_segment = pw.push(n)?;
        let new_block = qw.push(n)?;
        if new_block && qw.blocks_started() > 1 {
            out.push(acc.finish());
            if out.len() == blocks {
                return Ok(out);
            }
        }
        if qw.block_len() > limits.max_block_len {
            return Err(over_budget(
                &format!("block {} of S[{zeta}][S[{xi}]]", qw.blocks_started()),
                limits,
            ));
        }
        if new_segment {
            acc.close_segment();
        }
        acc.add(qw.divisors(), pw.divisors());
    }
    Err(Error::StreamExhausted(seen))
}

struct BlockAccumulator {
    total: BigRational,
    q_constant: bool,
    segments: usize,
    seg_q: Option<Vec<u64>>,
    seg_p: HashMap<Vec<u64>, u64>,
}

impl BlockAccumulator {
    fn new() -> Self {
        BlockAccumulator {
            total: BigRational::zero(),
            q_constant: true,
            segments: 0,
            seg_q: None,
            seg_p: HashMap::new(),
        }
    }

    fn add(&mut self, q: &[u64], p: &[u64]) {
        match &self.seg_q {
            None => self.seg_q = Some(q.to_vec()),
            Some(cur) if cur != q => self.q_constant = false,
            _ => {}
        }
        *self.seg_p.entry(p.to_vec()).or_insert(0) += 1;
    }

    fn close_segment(&mut self) {
        let Some(q) = self.seg_q.take() else {
            return;
        };
        let p_sum = sum_by_divisors(&self.seg_p);
        let qd: BigInt = q.iter().map(|&m| BigInt::from(m)).product();
        // q^2 = 1/qd
        self.total += &p_sum * &p_sum / BigRational::from_integer(qd);
        self.segments += 1;
        self.seg_p.clear();
    }

    fn finish(&mut self) -> SquareSum {
        self.close_segment();
        let done = std::mem::replace(self, BlockAccumulator::new());
        SquareSum {
            value: done.total,
            q_constant: done.q_constant,
            segments: done.segments,
        }
    }
}

/// A vector space over the reals as seen by the averaging operators.
pub trait VectorSpace: Clone {
    fn add_scaled(&mut self, c: f64, other: &Self) -> Result<(), Error>;
}

/// A vector space admitting exact rational scalars.
pub trait RationalSpace: Clone {
    fn add_scaled_exact(&mut self, c: &BigRational, other: &Self) -> Result<(), Error>;
}

impl VectorSpace for Vec<f64> {
    fn add_scaled(&mut self, c: f64, other: &Self) -> Result<(), Error> {
        if self.len() != other.len() {
            return Err(Error::Shape("vector lengths differ".into()));
        }
        for (a, b) in self.iter_mut().zip(other) {
            *a += c * b;
        }
        Ok(())
    }
}

impl RationalSpace for Vec<BigRational> {
    fn add_scaled_exact(&mut self, c: &BigRational, other: &Self) -> Result<(), Error> {
        if self.len() != other.len() {
            return Err(Error::Shape("vector lengths differ".into()));
        }
        for (a, b) in self.iter_mut().zip(other) {
            *a += c * b;
        }
        Ok(())
    }
}

impl VectorSpace for crate::space::StepFunction {
    fn add_scaled(&mut self, c: f64, other: &Self) -> Result<(), Error> {
        *self = crate::space::StepFunction::add_scaled(self, c, other)?;
        Ok(())
    }
}

/// Vectors indexed by finite sets; missing sets stand for the zero vector.
pub trait Collection<V> {
    fn vector(&self, set: &FiniteSet) -> Option<V>;
}

#[derive(Clone, Debug, Default)]
pub struct IndexedFamily<V> {
    entries: BTreeMap<FiniteSet, V>,
}

impl<V: Clone> IndexedFamily<V> {
    pub fn new() -> Self {
        IndexedFamily {
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, set: FiniteSet, v: V) {
        self.entries.insert(set, v);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<V: Clone> Collection<V> for IndexedFamily<V> {
    fn vector(&self, set: &FiniteSet) -> Option<V> {
        self.entries.get(set).cloned()
    }
}

impl<V, F: Fn(&FiniteSet) -> Option<V>> Collection<V> for F {
    fn vector(&self, set: &FiniteSet) -> Option<V> {
        self(set)
    }
}

/// A coefficient of an averaging operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub set: FiniteSet,
    pub weight: Weight,
}

/// The coefficients of `avg[xi](M, n) = sum p[xi]_F u_F`, where `F` runs over
/// the initial segments of `M` ending inside the `n`-th `S[xi]` block.
pub fn avg_terms<I>(xi: &Ordinal, stream: I, n: usize, limits: &Limits) -> Result<Vec<Term>, Error>
where
    I: IntoIterator<Item = u64>,
{
    block_terms(Walker::p(xi), None, stream, n, limits)
}

/// The coefficients of `avg2[xi, zeta](M, n) = sum q[xi,zeta]_F p[xi]_F u_F`,
/// over the initial segments ending inside the `n`-th `S[zeta][S[xi]]` block.
pub fn avg2_terms<I>(xi: &Ordinal, zeta: &Ordinal, stream: I, n: usize, limits: &Limits) -> Result<Vec<Term>, Error>
where
    I: IntoIterator<Item = u64>,
{
    block_terms(Walker::q(xi, zeta), Some(Walker::p(xi)), stream, n, limits)
}

fn block_terms<I>(
    mut outer: Walker,
    mut p: Option<Walker>,
    stream: I,
    n: usize,
    limits: &Limits,
) -> Result<Vec<Term>, Error>
where
    I: IntoIterator<Item = u64>,
{
    if n == 0 {
        return Err(Error::Config("blocks are numbered from 1".into()));
    }
    let mut prefix = Vec::new();
    let mut out = Vec::new();
    let mut seen = 0;
    for e in stream {
        seen += 1;
        if let Some(pw) = p.as_mut() {
            pw.push(e)?;
        }
        outer.push(e)?;
        if outer.blocks_started() > n {
            return Ok(out);
        }
        prefix.push(e);
        if outer.blocks_started() == n {
            if outer.block_len() > limits.max_block_len {
                return Err(over_budget(&format!("block {n}"), limits));
            }
            let weight = match &p {
                None => Weight::rational(outer.p_value()),
                Some(pw) => outer.q_value()?.scale(&pw.p_value()),
            };
            out.push(Term {
                set: FiniteSet::new(prefix.clone())?,
                weight,
            });
        }
    }
    Err(Error::StreamExhausted(seen))
}

fn combine<V: VectorSpace, C: Collection<V>>(terms: &[Term], coll: &C, zero: V) -> Result<V, Error> {
    let mut acc = zero;
    for t in terms {
        if let Some(v) = coll.vector(&t.set) {
            acc.add_scaled(t.weight.to_f64(), &v)?;
        }
    }
    Ok(acc)
}

pub fn avg<I, V, C>(xi: &Ordinal, stream: I, coll: &C, n: usize, zero: V, limits: &Limits) -> Result<V, Error>
where
    I: IntoIterator<Item = u64>,
    V: VectorSpace,
    C: Collection<V>,
{
    combine(&avg_terms(xi, stream, n, limits)?, coll, zero)
}

pub fn avg_exact<I, V, C>(xi: &Ordinal, stream: I, coll: &C, n: usize, zero: V, limits: &Limits) -> Result<V, Error>
where
    I: IntoIterator<Item = u64>,
    V: RationalSpace,
    C: Collection<V>,
{
    let mut acc = zero;
    for t in avg_terms(xi, stream, n, limits)? {
        if let Some(v) = coll.vector(&t.set) {
            acc.add_scaled_exact(t.weight.coeff(), &v)?;
        }
    }
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
pub fn avg2<I, V, C>(
    xi: &Ordinal,
    zeta: &Ordinal,
    stream: I,
    coll: &C,
    n: usize,
    zero: V,
    limits: &Limits,
) -> Result<V, Error>
where
    I: IntoIterator<Item = u64>,
    V: VectorSpace,
    C: Collection<V>,
{
    combine(&avg2_terms(xi, zeta, stream, n, limits)?, coll, zero)
}

/// Outcome of one identity of the permanence suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub pass: bool,
    /// Number of initial segments or blocks examined.
    pub checked: usize,
    pub detail: String,
}

/// Exhaustive permanence comparisons are done for blocks up to this size;
/// larger blocks are sampled at this many evenly spaced initial segments.
pub const PERMANENCE_SAMPLE: usize = 4096;

/// Checks, on the first `blocks` blocks of `S[zeta][S[xi]]` in `stream`:
/// permanence of `p` and `q` (the weight of an initial segment only depends
/// on its part after the last completed block), `sum p = 1` on every
/// `S[xi]` block, and `sum_r (sum q p)^2 = 1` on every `S[zeta][S[xi]]` block.
pub fn verify_perm<I>(xi: &Ordinal, zeta: &Ordinal, stream: I, blocks: usize, limits: &Limits) -> Vec<IdentityCheck>
where
    I: IntoIterator<Item = u64> + Clone,
{
    let mut out = Vec::new();
    let fam_q = Family::conv(zeta.clone(), xi.clone());
    let q_blocks = crate::schreier::decompose(&fam_q, stream.clone(), blocks, limits);
    let q_blocks = match q_blocks {
        Ok(b) => b,
        Err(e) => {
            for name in ["p permanence", "q permanence", "p convexity", "q square convexity"] {
                out.push(IdentityCheck {
                    name: name.into(),
                    pass: false,
                    checked: 0,
                    detail: e.to_string(),
                });
            }
            return out;
        }
    };
    let covered: usize = q_blocks.iter().map(|b| b.len()).sum();
    let m: Vec<u64> = stream.clone().into_iter().take(covered).collect();
    let p_blocks = greedy_blocks(&Family::Base(xi.clone()), &FiniteSet::new(m.clone()).unwrap());

    out.push(permanence(&m, &p_blocks, Walker::p(xi), "p permanence", |tail| {
        p_weight(xi, tail).map(Weight::rational)
    }));
    out.push(permanence(&m, &q_blocks, Walker::q(xi, zeta), "q permanence", |tail| {
        q_weight(xi, zeta, tail)
    }));

    match convexity_sums(xi, stream.clone(), p_blocks.len(), limits) {
        Ok(sums) => {
            let bad: Vec<String> = sums
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.is_one())
                .map(|(i, s)| format!("block {}: {s}", i + 1))
                .collect();
            out.push(IdentityCheck {
                name: "p convexity".into(),
                pass: bad.is_empty(),
                checked: sums.len(),
                detail: if bad.is_empty() {
                    format!("sum = 1 on {} blocks", sums.len())
                } else {
                    bad.join("; ")
                },
            });
        }
        Err(e) => out.push(IdentityCheck {
            name: "p convexity".into(),
            pass: false,
            checked: 0,
            detail: e.to_string(),
        }),
    }

    match square_sums(xi, zeta, stream, blocks, limits) {
        Ok(sums) => {
            let bad: Vec<String> = sums
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.q_constant || !s.value.is_one())
                .map(|(i, s)| format!("block {}: {}", i + 1, s.value))
                .collect();
            out.push(IdentityCheck {
                name: "q square convexity".into(),
                pass: bad.is_empty(),
                checked: sums.len(),
                detail: if bad.is_empty() {
                    format!("square sum = 1 on {} blocks", sums.len())
                } else {
                    bad.join("; ")
                },
            });
        }
        Err(e) => out.push(IdentityCheck {
            name: "q square convexity".into(),
            pass: false,
            checked: 0,
            detail: e.to_string(),
        }),
    }
    out
}

fn permanence<F>(m: &[u64], blocks: &[FiniteSet], mut walker: Walker, name: &str, direct: F) -> IdentityCheck
where
    F: Fn(&FiniteSet) -> Result<Weight, Error>,
{
    let use_q = name.starts_with('q');
    let mut checked = 0;
    let mut pos = 0;
    let mut failures = Vec::new();
    for block in blocks {
        let len = block.len();
        let stride = len.div_ceil(PERMANENCE_SAMPLE).max(1);
        for j in 0..len {
            let fresh = walker.push(m[pos + j]);
            if let Err(e) = fresh {
                failures.push(e.to_string());
                break;
            }
            let at_sample = j % stride == stride - 1 || j + 1 == len;
            if !at_sample {
                continue;
            }
            let streamed = if use_q {
                walker.q_value()
            } else {
                Ok(Weight::rational(walker.p_value()))
            };
            let tail = FiniteSet::new(m[pos..=pos + j].to_vec()).unwrap();
            match (streamed, direct(&tail)) {
                (Ok(a), Ok(b)) if a == b => {}
                (Ok(a), Ok(b)) => failures.push(format!("{}: {a} vs {b}", m[pos + j])),
                (Err(e), _) | (_, Err(e)) => failures.push(e.to_string()),
            }
            checked += 1;
        }
        pos += len;
    }
    IdentityCheck {
        name: name.into(),
        pass: failures.is_empty(),
        checked,
        detail: if failures.is_empty() {
            format!("{checked} initial segments agree")
        } else {
            failures.truncate(5);
            failures.join("; ")
        },
    }
}
