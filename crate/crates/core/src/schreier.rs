//! Schreier families `S[xi]` and their convolutions `S[zeta][S[xi]]`.
//!
//! Membership is decided by an online recognizer that consumes the elements
//! of a set in increasing order and keeps the greedy decomposition of what it
//! has seen so far. Every recognizer either accepts the next element and
//! updates its state, or rejects it and leaves the state untouched, so the
//! same machinery serves membership, maximality, stream decomposition, the
//! repeated-average weights and the exact residual ranks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::ordinal::{Kind, Ordinal};

/// A finite subset of the positive integers, stored increasing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FiniteSet(Vec<u64>);

impl FiniteSet {
    pub fn new(mut elems: Vec<u64>) -> Result<Self, Error> {
        if elems.contains(&0) {
            return Err(Error::InvalidSet("elements must be positive".into()));
        }
        elems.sort_unstable();
        let before = elems.len();
        elems.dedup();
        if elems.len() != before {
            return Err(Error::InvalidSet("repeated element".into()));
        }
        Ok(FiniteSet(elems))
    }

    /// Consecutive integers `lo..=hi`.
    pub fn interval(lo: u64, hi: u64) -> Self {
        FiniteSet((lo.max(1)..=hi).collect())
    }

    pub fn empty() -> Self {
        FiniteSet(Vec::new())
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn minimum(&self) -> Option<u64> {
        self.0.first().copied()
    }

    pub fn maximum(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.0.binary_search(&n).is_ok()
    }

    /// `self ⌢ n`; `n` must exceed the maximum.
    pub fn extended(&self, n: u64) -> Result<Self, Error> {
        if self.maximum().is_some_and(|m| n <= m) || n == 0 {
            return Err(Error::NotIncreasing(n));
        }
        let mut v = self.0.clone();
        v.push(n);
        Ok(FiniteSet(v))
    }

    pub fn prefix(&self, len: usize) -> Self {
        FiniteSet(self.0[..len].to_vec())
    }

    /// Initial segment relation.
    pub fn is_prefix_of(&self, other: &FiniteSet) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for FiniteSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim().trim_start_matches(['(', '{']).trim_end_matches([')', '}']);
        if t.trim().is_empty() {
            return Ok(FiniteSet::empty());
        }
        let elems = t
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidSet(format!("bad element {p:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if elems.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSet("elements must increase".into()));
        }
        FiniteSet::new(elems)
    }
}

impl Serialize for FiniteSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        FiniteSet::new(Vec::<u64>::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Family {
    /// `S[xi]`.
    Base(Ordinal),
    /// `S[outer][S[inner]]`: unions of maximal-first `S[inner]` blocks whose
    /// minima form a set of `S[outer]`.
    Conv { outer: Ordinal, inner: Ordinal },
}

impl Family {
    pub fn base(xi: impl Into<Ordinal>) -> Self {
        Family::Base(xi.into())
    }

    pub fn conv(outer: impl Into<Ordinal>, inner: impl Into<Ordinal>) -> Self {
        Family::Conv {
            outer: outer.into(),
            inner: inner.into(),
        }
    }

    pub(crate) fn recognizer(&self) -> Recognizer {
        match self {
            Family::Base(xi) => Recognizer::fresh(xi, &Leaf::Singletons),
            Family::Conv { outer, inner } => Recognizer::Convolution {
                outer: Box::new(Recognizer::fresh(outer, &Leaf::Singletons)),
                inner: inner.clone(),
                current: None,
            },
        }
    }

    /// The rank of the tree of non-empty members: `w^xi` for `S[xi]` and
    /// `w^(xi + zeta)` for `S[zeta][S[xi]]`.
    pub fn tree_rank(&self) -> Ordinal {
        match self {
            Family::Base(xi) => Ordinal::omega_pow(xi.clone()),
            Family::Conv { outer, inner } => Ordinal::omega_pow(inner.add(outer)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Base(xi) => write!(f, "S[{xi}]"),
            Family::Conv { outer, inner } => write!(f, "S[{outer}][S[{inner}]]"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidFamily(s.to_string());
        let t = s.trim();
        let rest = t.strip_prefix("S[").ok_or_else(bad)?;
        let close = matching_bracket(rest).ok_or_else(bad)?;
        let first: Ordinal = rest[..close].parse()?;
        let tail = rest[close + 1..].trim();
        if tail.is_empty() {
            return Ok(Family::Base(first));
        }
        let inner_text = tail
            .strip_prefix("[S[")
            .and_then(|x| x.strip_suffix("]]"))
            .ok_or_else(bad)?;
        Ok(Family::Conv {
            outer: first,
            inner: inner_text.parse()?,
        })
    }
}

fn matching_bracket(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' if depth == 0 => return Some(i),
            ']' => depth -= 1,
            _ => {}
        }
    }
    None
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// What sits at level zero of a hierarchy: singletons for `S[xi]` itself,
/// or whole `S[xi]` blocks for the hierarchy `S[zeta][S[xi]]` indexed by zeta.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Leaf {
    Singletons,
    Schreier(Ordinal),
}

impl Leaf {
    fn exponent(&self) -> Ordinal {
        match self {
            Leaf::Singletons => Ordinal::zero(),
            Leaf::Schreier(xi) => xi.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Recognizer {
    Singleton {
        used: bool,
    },
    /// Level `pred + 1`: at most `first` blocks of level `pred`.
    Successor {
        pred: Ordinal,
        leaf: Leaf,
        first: u64,
        blocks: u64,
        current: Box<Recognizer>,
    },
    /// Level `lambda` defers to level `lambda[min] + 1`.
    Limit {
        lambda: Ordinal,
        leaf: Leaf,
        inner: Option<Box<Recognizer>>,
    },
    /// A whole `S[xi]` used as level zero; contributes no weight.
    Opaque(Box<Recognizer>),
    Convolution {
        outer: Box<Recognizer>,
        inner: Ordinal,
        current: Option<Box<Recognizer>>,
    },
}

impl Recognizer {
    pub(crate) fn fresh(level: &Ordinal, leaf: &Leaf) -> Recognizer {
        match level.kind() {
            Kind::Zero => match leaf {
                Leaf::Singletons => Recognizer::Singleton { used: false },
                Leaf::Schreier(xi) => Recognizer::Opaque(Box::new(Recognizer::fresh(xi, &Leaf::Singletons))),
            },
            Kind::Successor => {
                let pred = level.predecessor().unwrap();
                let current = Box::new(Recognizer::fresh(&pred, leaf));
                Recognizer::Successor {
                    pred,
                    leaf: leaf.clone(),
                    first: 0,
                    blocks: 0,
                    current,
                }
            }
            Kind::Limit => Recognizer::Limit {
                lambda: level.clone(),
                leaf: leaf.clone(),
                inner: None,
            },
        }
    }

    /// Accepts `n` (larger than everything seen) or rejects it without change.
    pub(crate) fn try_push(&mut self, n: u64) -> bool {
        match self {
            Recognizer::Singleton { used } => {
                if *used {
                    false
                } else {
                    *used = true;
                    true
                }
            }
            Recognizer::Successor {
                pred,
                leaf,
                first,
                blocks,
                current,
            } => {
                if *blocks == 0 {
                    let ok = current.try_push(n);
                    debug_assert!(ok);
                    *first = n;
                    *blocks = 1;
                    return true;
                }
                if current.try_push(n) {
                    return true;
                }
                if *blocks >= *first {
                    return false;
                }
                let mut next = Recognizer::fresh(pred, leaf);
                let ok = next.try_push(n);
                debug_assert!(ok);
                **current = next;
                *blocks += 1;
                true
            }
            Recognizer::Limit { lambda, leaf, inner } => match inner {
                Some(r) => r.try_push(n),
                None => {
                    let level = lambda
                        .fundamental(n)
                        .expect("limit level has a fundamental sequence")
                        .successor();
                    let mut r = Recognizer::fresh(&level, leaf);
                    let ok = r.try_push(n);
                    debug_assert!(ok);
                    *inner = Some(Box::new(r));
                    true
                }
            },
            Recognizer::Opaque(r) => r.try_push(n),
            Recognizer::Convolution { outer, inner, current } => {
                if let Some(c) = current {
                    if c.try_push(n) {
                        return true;
                    }
                }
                if !outer.try_push(n) {
                    return false;
                }
                let mut next = Recognizer::fresh(inner, &Leaf::Singletons);
                next.try_push(n);
                *current = Some(Box::new(next));
                true
            }
        }
    }

    /// Minima at the successor levels of the hierarchy, outermost first.
    pub(crate) fn divisors(&self, out: &mut Vec<u64>) {
        match self {
            Recognizer::Successor { first, current, .. } => {
                out.push(*first);
                current.divisors(out);
            }
            Recognizer::Limit { inner: Some(r), .. } => r.divisors(out),
            _ => {}
        }
    }

    /// Exact rank of the recognized set as a node of the family's tree.
    pub(crate) fn rank(&self) -> Ordinal {
        match self {
            Recognizer::Singleton { .. } => Ordinal::zero(),
            Recognizer::Successor {
                pred,
                leaf,
                first,
                blocks,
                current,
            } => {
                let block = Ordinal::omega_pow(leaf.exponent().add(pred));
                block.mul_nat(first - blocks).add(&current.rank())
            }
            Recognizer::Limit { inner, .. } => inner.as_ref().map(|r| r.rank()).unwrap_or_default(),
            Recognizer::Opaque(r) => r.rank(),
            Recognizer::Convolution { outer, inner, current } => {
                let tail = current.as_ref().map(|c| c.rank()).unwrap_or_default();
                Ordinal::omega_pow_mul(inner, &outer.rank()).add(&tail)
            }
        }
    }
}

/// Splits an increasing sequence into consecutive greedy blocks of a family.
/// Each finished block is maximal in the family.
#[derive(Clone, Debug)]
pub(crate) struct Decomposer {
    template: Recognizer,
    pub(crate) current: Recognizer,
    pub(crate) block_len: usize,
    pub(crate) blocks_started: usize,
    last: u64,
}

impl Decomposer {
    pub(crate) fn new(template: Recognizer) -> Self {
        Decomposer {
            current: template.clone(),
            template,
            block_len: 0,
            blocks_started: 0,
            last: 0,
        }
    }

    /// Returns true when `n` opened a new block.
    pub(crate) fn push(&mut self, n: u64) -> Result<bool, Error> {
        if n <= self.last {
            return Err(Error::NotIncreasing(n));
        }
        self.last = n;
        if self.blocks_started > 0 && self.current.try_push(n) {
            self.block_len += 1;
            return Ok(false);
        }
        self.current = self.template.clone();
        let ok = self.current.try_push(n);
        debug_assert!(ok);
        self.block_len = 1;
        self.blocks_started += 1;
        Ok(true)
    }
}

/// Budget for operations that walk streams.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Largest block that will be materialized.
    pub max_block_len: usize,
    /// Most nodes a brute-force rank computation may visit.
    pub max_nodes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_block_len: 1 << 20,
            max_nodes: 1 << 24,
        }
    }
}

pub fn member(fam: &Family, set: &FiniteSet) -> bool {
    let mut r = fam.recognizer();
    set.as_slice().iter().all(|&n| r.try_push(n))
}

pub(crate) fn recognize(fam: &Family, set: &FiniteSet) -> Result<Recognizer, Error> {
    let mut r = fam.recognizer();
    for &n in set.as_slice() {
        if !r.try_push(n) {
            return Err(Error::NotMember {
                set: set.to_string(),
                family: fam.to_string(),
            });
        }
    }
    Ok(r)
}

/// A member is maximal when no proper extension lies in the family. By
/// spreading it is enough to try `max + 1`.
pub fn is_maximal(fam: &Family, set: &FiniteSet) -> Result<bool, Error> {
    let max = set.maximum().ok_or(Error::EmptySet)?;
    let mut r = recognize(fam, set)?;
    Ok(!r.try_push(max + 1))
}

/// The first `k` blocks of the decomposition of a stream into consecutive
/// maximal members of `fam`.
pub fn decompose<I>(fam: &Family, stream: I, k: usize, limits: &Limits) -> Result<Vec<FiniteSet>, Error>
where
    I: IntoIterator<Item = u64>,
{
    let mut out = Vec::with_capacity(k);
    if k == 0 {
        return Ok(out);
    }
    let mut dec = Decomposer::new(fam.recognizer());
    let mut block: Vec<u64> = Vec::new();
    let mut seen = 0usize;
    for n in stream {
        if n == 0 {
            return Err(Error::InvalidSet("elements must be positive".into()));
        }
        seen += 1;
        if dec.push(n)? && !block.is_empty() {
            out.push(FiniteSet(std::mem::take(&mut block)));
            if out.len() == k {
                return Ok(out);
            }
        }
        block.push(n);
        if block.len() > limits.max_block_len {
            return Err(Error::Budget(format!(
                "block {} of {fam} exceeds {} elements",
                out.len() + 1,
                limits.max_block_len
            )));
        }
    }
    Err(Error::StreamExhausted(seen))
}

/// Greedy splitting of a set into consecutive blocks of `fam`; the last
/// block may be non-maximal.
pub fn greedy_blocks(fam: &Family, set: &FiniteSet) -> Vec<FiniteSet> {
    let mut dec = Decomposer::new(fam.recognizer());
    let mut out: Vec<Vec<u64>> = Vec::new();
    for &n in set.as_slice() {
        if dec.push(n).expect("finite sets are increasing") {
            out.push(Vec::new());
        }
        out.last_mut().unwrap().push(n);
    }
    out.into_iter().map(FiniteSet).collect()
}

/// Canonical representation of a member: the greedy blocks of the family
/// one level down (`S[inner]` for a convolution, `S[beta]` for `S[beta+1]`,
/// and the defining level for a limit).
pub fn canonical_rep(fam: &Family, set: &FiniteSet) -> Result<Vec<FiniteSet>, Error> {
    recognize(fam, set)?;
    if set.is_empty() {
        return Ok(Vec::new());
    }
    let lower = match fam {
        Family::Conv { inner, .. } => Family::Base(inner.clone()),
        Family::Base(xi) => match xi.kind() {
            Kind::Zero => return Ok(vec![set.clone()]),
            Kind::Successor => Family::Base(xi.predecessor().unwrap()),
            Kind::Limit => {
                let level = xi.fundamental(set.minimum().unwrap())?.successor();
                return canonical_rep(&Family::Base(level), set);
            }
        },
    };
    Ok(greedy_blocks(&lower, set))
}

/// Exact rank of a non-empty member as a node of the tree of the family.
pub fn residual_rank(fam: &Family, set: &FiniteSet) -> Result<Ordinal, Error> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(recognize(fam, set)?.rank())
}

/// Rank of `set` in the tree of members of `fam` contained in `[1, n]`.
///
/// `S[1]` has the closed form `min E - |E|` (valid once `n >= 2 max E`);
/// every other family is ranked by iterating derived trees.
pub fn node_rank(fam: &Family, set: &FiniteSet, n: u64, limits: &Limits) -> Result<u64, Error> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let r = recognize(fam, set)?;
    if *fam == Family::Base(Ordinal::one()) && n >= 2 * set.maximum().unwrap() {
        return Ok(set.minimum().unwrap() - set.len() as u64);
    }
    brute_force_rank(r, set.maximum().unwrap(), n, limits)
}

/// Rank by derived trees without any closed form.
pub fn node_rank_brute(fam: &Family, set: &FiniteSet, n: u64, limits: &Limits) -> Result<u64, Error> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let r = recognize(fam, set)?;
    brute_force_rank(r, set.maximum().unwrap(), n, limits)
}

fn brute_force_rank(root: Recognizer, max: u64, n: u64, limits: &Limits) -> Result<u64, Error> {
    // depth-first: a node leaves the derived trees one stage after its
    // last child does
    fn visit(state: &Recognizer, last: u64, n: u64, budget: &mut usize) -> Result<Option<u64>, Error> {
        let mut best: Option<u64> = None;
        for next in last + 1..=n {
            let mut s = state.clone();
            if s.try_push(next) {
                if *budget == 0 {
                    return Err(Error::Budget("rank tree node budget exhausted".into()));
                }
                *budget -= 1;
                let r = visit(&s, next, n, budget)?.map_or(0, |r| r + 1);
                best = Some(best.map_or(r, |b| b.max(r)));
            }
        }
        Ok(best)
    }
    let mut budget = limits.max_nodes;
    Ok(visit(&root, max, n, &mut budget)?.map_or(0, |r| r + 1))
}

/// All members of `fam` contained in `[1, n]`, including the empty set.
pub fn members_within(fam: &Family, n: u64) -> Vec<FiniteSet> {
    let mut out = vec![FiniteSet::empty()];
    let mut stack = vec![(Vec::<u64>::new(), fam.recognizer())];
    while let Some((elems, state)) = stack.pop() {
        let start = elems.last().copied().unwrap_or(0) + 1;
        for next in start..=n {
            let mut s = state.clone();
            if s.try_push(next) {
                let mut e = elems.clone();
                e.push(next);
                out.push(FiniteSet(e.clone()));
                stack.push((e, s));
            }
        }
    }
    out.sort();
    out
}

/// Least `k` such that every member of `small` inside `[1, n]` with minimum
/// at least `k` is also a member of `large`.
pub fn almost_inclusion_index(small: &Family, large: &Family, n: u64) -> u64 {
    let mut k = 1;
    for e in members_within(small, n) {
        if let Some(m) = e.minimum() {
            if !member(large, &e) {
                k = k.max(m + 1);
            }
        }
    }
    k
}

/// Violations of the inclusion `S[lambda[j] + 1] ⊆ S[lambda[j + 1]]` among
/// subsets of `[1, n]`, for `j = 1..=upto`.
pub fn fundamental_inclusion_violations(lambda: &Ordinal, upto: u64, n: u64) -> Result<Vec<(u64, FiniteSet)>, Error> {
    let mut bad = Vec::new();
    for j in 1..=upto {
        let small = Family::Base(lambda.fundamental(j)?.successor());
        let large = Family::Base(lambda.fundamental(j + 1)?);
        for e in members_within(&small, n) {
            if !member(&large, &e) {
                bad.push((j, e));
            }
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> FiniteSet {
        t.parse().unwrap()
    }

    fn o(t: &str) -> Ordinal {
        t.parse().unwrap()
    }

    #[test]
    fn membership_examples() {
        let s1 = Family::base(1);
        assert!(member(&s1, &s("2,5")));
        assert!(!member(&s1, &s("1,2")));
        assert!(member(&Family::base(2), &s("2,3,4,5,6,7")));
        assert!(!member(&Family::base(2), &s("2,3,4,5,6,7,8")));
        assert!(member(&Family::base(0), &s("9")));
        assert!(!member(&Family::base(0), &s("1,2")));
        assert!(member(
            &Family::Base(o("w")),
            &s("3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23")
        ));
        assert!(member(&s1, &FiniteSet::empty()));
    }

    #[test]
    fn maximal_examples() {
        assert!(is_maximal(&Family::base(1), &s("3,4,5")).unwrap());
        assert!(!is_maximal(&Family::base(1), &s("3,4")).unwrap());
        assert!(matches!(
            is_maximal(&Family::base(1), &s("1,2")),
            Err(Error::NotMember { .. })
        ));
        assert_eq!(is_maximal(&Family::base(1), &FiniteSet::empty()), Err(Error::EmptySet));
    }

    #[test]
    fn decompose_examples() {
        let b = decompose(&Family::base(1), 3.., 2, &Limits::default()).unwrap();
        assert_eq!(b, vec![s("3,4,5"), s("6,7,8,9,10,11")]);
        let b = decompose(&Family::base(2), 2.., 1, &Limits::default()).unwrap();
        assert_eq!(b, vec![FiniteSet::interval(2, 7)]);
        assert!(matches!(
            decompose(&Family::base(1), vec![3, 4], 1, &Limits::default()),
            Err(Error::StreamExhausted(2))
        ));
    }

    #[test]
    fn canonical_rep_example() {
        let fam = Family::conv(1, 1);
        let rep = canonical_rep(&fam, &s("2,3,4,5,6,7")).unwrap();
        assert_eq!(rep, vec![s("2,3"), s("4,5,6,7")]);
    }

    #[test]
    fn node_rank_examples() {
        let l = Limits::default();
        assert_eq!(node_rank(&Family::base(1), &s("4,9"), 50, &l).unwrap(), 2);
        assert_eq!(node_rank(&Family::base(2), &s("2,3"), 30, &l).unwrap(), 15);
        assert_eq!(residual_rank(&Family::base(2), &s("2,3")).unwrap(), Ordinal::omega());
        assert_eq!(residual_rank(&Family::base(2), &s("2")).unwrap(), o("w + 1"));
    }

    #[test]
    fn family_text() {
        for t in ["S[2]", "S[w + 1]", "S[1][S[w]]"] {
            assert_eq!(t.parse::<Family>().unwrap().to_string(), t);
        }
    }
}
