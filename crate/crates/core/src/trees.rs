//! Finite trees with derived-tree ranks, and the ordinal-labelled trees
//! `T[gamma]` whose nodes carry step functions on `[0, w^gamma]`.
//!
//! For a successor `gamma = beta + 1` the tree is the disjoint union over
//! `n >= 1` of `T[beta, n]`: a chain of `n` nodes labelled
//! `w*beta + n - 1, ..., w*beta` followed (when `beta >= 1`) by a copy of
//! `T[beta]`. The node at depth `k` of the chain carries the alternating
//! indicator of `2^k` consecutive intervals of length `w^beta * 2^(n-k)`;
//! a node `s` of the copy carries `2^n` translates of the function of `s`.
//! For a limit `gamma` the tree is the union over `1 <= z < gamma` of
//! `T[z + 1]` with every label moved up by `w^z`, functions unchanged.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;

use serde::Serialize;

use crate::error::Error;
use crate::ordinal::{Kind, Ordinal};
use crate::schreier::{self, Decomposer, Family, FiniteSet};
use crate::space::{CantorScheme, Cell, Interval, IntervalSet, Sign, SignSeq, StepFunction};

#[derive(Clone, Debug)]
struct TreeNode<L> {
    label: L,
    parent: Option<usize>,
    children: Vec<usize>,
}

/// A finite tree: a set of non-empty sequences closed under non-empty
/// initial segments, ordered by extension.
#[derive(Clone, Debug)]
pub struct Tree<L> {
    nodes: Vec<TreeNode<L>>,
    roots: Vec<usize>,
}

impl<L: Clone + Eq + Hash> Default for Tree<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L: Clone + Eq + Hash> Tree<L> {
    pub fn new() -> Self {
        Tree {
            nodes: Vec::new(),
            roots: Vec::new(),
        }
    }

    /// Builds from an explicit list of sequences; every non-empty initial
    /// segment of a listed sequence must also be listed.
    pub fn from_paths<I: IntoIterator<Item = Vec<L>>>(paths: I) -> Result<Self, Error> {
        let mut paths: Vec<Vec<L>> = paths.into_iter().collect();
        paths.sort_by_key(|p| p.len());
        let mut ids: HashMap<Vec<L>, usize> = HashMap::new();
        let mut t = Tree::new();
        for p in paths {
            if p.is_empty() {
                return Err(Error::InvalidTree("empty sequence".into()));
            }
            if ids.contains_key(&p) {
                continue;
            }
            let id = if p.len() == 1 {
                t.add_root(p[0].clone())
            } else {
                let parent = *ids
                    .get(&p[..p.len() - 1])
                    .ok_or_else(|| Error::InvalidTree("not closed under initial segments".into()))?;
                t.add_child(parent, p[p.len() - 1].clone())
            };
            ids.insert(p, id);
        }
        Ok(t)
    }

    pub fn add_root(&mut self, label: L) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            label,
            parent: None,
            children: Vec::new(),
        });
        self.roots.push(id);
        id
    }

    pub fn add_child(&mut self, parent: usize, label: L) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            label,
            parent: Some(parent),
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn path(&self, mut id: usize) -> Vec<L> {
        let mut out = vec![self.nodes[id].label.clone()];
        while let Some(p) = self.nodes[id].parent {
            out.push(self.nodes[p].label.clone());
            id = p;
        }
        out.reverse();
        out
    }

    pub fn paths(&self) -> Vec<Vec<L>> {
        (0..self.len()).map(|i| self.path(i)).collect()
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.nodes[id].children
    }

    pub fn is_maximal(&self, id: usize) -> bool {
        self.nodes[id].children.is_empty()
    }

    /// The derived tree: everything except the maximal nodes.
    pub fn derived(&self) -> Tree<L> {
        let keep: Vec<Vec<L>> = (0..self.len())
            .filter(|&i| !self.is_maximal(i))
            .map(|i| self.path(i))
            .collect();
        Tree::from_paths(keep).expect("derived tree is closed under initial segments")
    }

    /// For every node, the index of the derived tree from which it is
    /// removed: maximal nodes get 0, and so on.
    pub fn node_ranks(&self) -> Vec<u64> {
        let mut alive: Vec<usize> = self.nodes.iter().map(|n| n.children.len()).collect();
        let mut rank = vec![0u64; self.len()];
        let mut layer: Vec<usize> = (0..self.len()).filter(|&i| alive[i] == 0).collect();
        let mut stage = 0;
        while !layer.is_empty() {
            let mut next = Vec::new();
            for &i in &layer {
                rank[i] = stage;
                if let Some(p) = self.nodes[i].parent {
                    alive[p] -= 1;
                    if alive[p] == 0 {
                        next.push(p);
                    }
                }
            }
            layer = next;
            stage += 1;
        }
        rank
    }

    /// Number of derivations needed to empty the tree.
    pub fn rank_finite(&self) -> u64 {
        let r = self.node_ranks();
        self.roots.iter().map(|&i| r[i] + 1).max().unwrap_or(0)
    }
}

/// A node of `T[gamma]`: its sequence of labels.
pub type Node = Vec<Ordinal>;

pub fn format_node(node: &[Ordinal]) -> String {
    let parts: Vec<String> = node.iter().map(|l| l.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub fn parse_node(s: &str) -> Result<Node, Error> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    t.split([',', ';'])
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.parse::<Ordinal>())
        .collect()
}

enum Decoded {
    /// In `T[beta, n]` for a successor `beta + 1`: `chain` chain nodes, then
    /// possibly a node of `T[beta]`.
    Successor {
        beta: Ordinal,
        n: u64,
        chain: u64,
        tail: Option<Node>,
    },
    /// In the copy of `T[z + 1]` inside a limit tree.
    Limit { z: Ordinal, inner: Node },
}

/// Handle on the intensional tree `T[gamma]`, `gamma >= 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TGamma {
    gamma: Ordinal,
}

const MAX_CHAIN: u64 = 40;

impl TGamma {
    pub fn new(gamma: Ordinal) -> Result<Self, Error> {
        if gamma.is_zero() {
            return Err(Error::InvalidTree("gamma must be at least 1".into()));
        }
        Ok(TGamma { gamma })
    }

    pub fn gamma(&self) -> &Ordinal {
        &self.gamma
    }

    /// The functions live on `[0, w^gamma]`.
    pub fn top(&self) -> Ordinal {
        Ordinal::omega_pow(self.gamma.clone())
    }

    fn chain_label(beta: &Ordinal, n: u64, depth: u64) -> Ordinal {
        Ordinal::omega_pow_mul(&Ordinal::one(), beta).add_nat(n - depth)
    }

    fn sub(gamma: Ordinal) -> TGamma {
        TGamma { gamma }
    }

    fn decode(&self, node: &[Ordinal]) -> Result<Decoded, Error> {
        let bad = || Error::InvalidNode(format!("{} in T[{}]", format_node(node), self.gamma));
        let first = node.first().ok_or_else(bad)?;
        match self.gamma.kind() {
            Kind::Zero => Err(bad()),
            Kind::Successor => {
                let beta = self.gamma.predecessor().unwrap();
                let (alpha, k) = first.div_omega();
                if alpha != beta {
                    return Err(bad());
                }
                let n = k + 1;
                let chain = (node.len() as u64).min(n);
                for (i, l) in node.iter().take(chain as usize).enumerate() {
                    if *l != Self::chain_label(&beta, n, i as u64 + 1) {
                        return Err(bad());
                    }
                }
                let tail = if node.len() as u64 > n {
                    if beta.is_zero() {
                        return Err(bad());
                    }
                    let t: Node = node[n as usize..].to_vec();
                    Self::sub(beta.clone()).decode(&t).map_err(|_| bad())?;
                    Some(t)
                } else {
                    None
                };
                Ok(Decoded::Successor { beta, n, chain, tail })
            }
            Kind::Limit => {
                let z = first.leading_exponent();
                if z.is_zero() || z >= self.gamma {
                    return Err(bad());
                }
                let shift = Ordinal::omega_pow(z.clone());
                let bound = Ordinal::omega_pow(z.successor());
                let mut inner = Vec::with_capacity(node.len());
                for l in node {
                    if *l >= bound {
                        return Err(bad());
                    }
                    inner.push(shift.left_subtract(l).ok_or_else(bad)?);
                }
                Self::sub(z.successor()).decode(&inner).map_err(|_| bad())?;
                Ok(Decoded::Limit { z, inner })
            }
        }
    }

    fn shift_up(z: &Ordinal, node: Node) -> Node {
        let shift = Ordinal::omega_pow(z.clone());
        node.into_iter().map(|l| shift.add(&l)).collect()
    }

    pub fn contains(&self, node: &[Ordinal]) -> bool {
        self.decode(node).is_ok()
    }

    /// Exact rank of the node in `T[gamma]`.
    pub fn g_rank(&self, node: &[Ordinal]) -> Result<Ordinal, Error> {
        match self.decode(node)? {
            Decoded::Successor {
                beta,
                n,
                chain,
                tail: None,
            } => Ok(Ordinal::omega_pow_mul(&Ordinal::one(), &beta).add_nat(n - chain)),
            Decoded::Successor {
                beta, tail: Some(t), ..
            } => Self::sub(beta).g_rank(&t),
            Decoded::Limit { z, inner } => Self::sub(z.successor()).g_rank(&inner),
        }
    }

    /// Rank of the truncation in which every root index and every
    /// copy index of a limit tree is at most `bound`.
    pub fn truncated_rank(&self, bound: u64) -> u64 {
        match self.gamma.kind() {
            Kind::Zero => 0,
            Kind::Successor => {
                let beta = self.gamma.predecessor().unwrap();
                let below = if beta.is_zero() {
                    0
                } else {
                    Self::sub(beta).truncated_rank(bound)
                };
                below + bound
            }
            Kind::Limit => self
                .finite_copies(bound)
                .into_iter()
                .map(|z| Self::sub(z.successor()).truncated_rank(bound))
                .max()
                .unwrap_or(0),
        }
    }

    fn finite_copies(&self, bound: u64) -> Vec<Ordinal> {
        (1..=bound).map(Ordinal::nat).filter(|z| *z < self.gamma).collect()
    }

    /// Node rank inside the truncation of [`TGamma::truncated_rank`].
    pub fn g_rank_truncated(&self, node: &[Ordinal], bound: u64) -> Result<u64, Error> {
        match self.decode(node)? {
            Decoded::Successor {
                beta,
                n,
                chain,
                tail: None,
            } => {
                let below = if beta.is_zero() {
                    0
                } else {
                    Self::sub(beta).truncated_rank(bound)
                };
                Ok(below + n - chain)
            }
            Decoded::Successor {
                beta, tail: Some(t), ..
            } => Self::sub(beta).g_rank_truncated(&t, bound),
            Decoded::Limit { z, inner } => Self::sub(z.successor()).g_rank_truncated(&inner, bound),
        }
    }

    /// Roots with root index (and copy index) at most `bound`, in label order.
    pub fn roots(&self, bound: u64) -> Vec<Node> {
        match self.gamma.kind() {
            Kind::Zero => Vec::new(),
            Kind::Successor => {
                let beta = self.gamma.predecessor().unwrap();
                (1..=bound).map(|n| vec![Self::chain_label(&beta, n, 1)]).collect()
            }
            Kind::Limit => self
                .finite_copies(bound)
                .into_iter()
                .flat_map(|z| {
                    Self::sub(z.successor())
                        .roots(bound)
                        .into_iter()
                        .map(move |r| Self::shift_up(&z, r))
                        .collect::<Vec<_>>()
                })
                .collect(),
        }
    }

    /// Immediate successors of a node inside the same truncation.
    pub fn children(&self, node: &[Ordinal], bound: u64) -> Result<Vec<Node>, Error> {
        let tails: Vec<Node> = match self.decode(node)? {
            Decoded::Successor { beta, n, chain, tail } => match tail {
                _ if chain < n => vec![vec![Self::chain_label(&beta, n, chain + 1)]],
                None if beta.is_zero() => Vec::new(),
                None => Self::sub(beta).roots(bound),
                Some(t) => Self::sub(beta)
                    .children(&t, bound)?
                    .into_iter()
                    .map(|c| c[t.len()..].to_vec())
                    .collect(),
            },
            Decoded::Limit { z, inner } => {
                return Ok(Self::sub(z.successor())
                    .children(&inner, bound)?
                    .into_iter()
                    .map(|c| Self::shift_up(&z, c))
                    .collect())
            }
        };
        Ok(tails
            .into_iter()
            .map(|t| {
                let mut c = node.to_vec();
                c.extend(t);
                c
            })
            .collect())
    }

    pub fn is_maximal(&self, node: &[Ordinal]) -> Result<bool, Error> {
        Ok(match self.decode(node)? {
            Decoded::Successor { beta, n, chain, tail } => match tail {
                Some(t) => Self::sub(beta).is_maximal(&t)?,
                None => chain == n && beta.is_zero(),
            },
            Decoded::Limit { z, inner } => Self::sub(z.successor()).is_maximal(&inner)?,
        })
    }

    /// The truncation with all indices at most `bound`, as a finite tree.
    pub fn materialize(&self, bound: u64, max_nodes: usize) -> Result<Tree<Ordinal>, Error> {
        let mut tree = Tree::new();
        let mut stack: Vec<(Option<usize>, Node)> = self.roots(bound).into_iter().rev().map(|r| (None, r)).collect();
        while let Some((parent, node)) = stack.pop() {
            if tree.len() >= max_nodes {
                return Err(Error::Budget(format!("truncated tree exceeds {max_nodes} nodes")));
            }
            let label = node.last().unwrap().clone();
            let id = match parent {
                None => tree.add_root(label),
                Some(p) => tree.add_child(p, label),
            };
            for c in self.children(&node, bound)?.into_iter().rev() {
                stack.push((Some(id), c));
            }
        }
        Ok(tree)
    }

    /// The least root with rank at least `target`.
    pub fn least_root_with_rank(&self, target: &Ordinal) -> Option<Node> {
        let (alpha, k) = target.div_omega();
        match self.gamma.kind() {
            Kind::Zero => None,
            Kind::Successor => {
                let beta = self.gamma.predecessor().unwrap();
                let n = match alpha.cmp(&beta) {
                    std::cmp::Ordering::Less => 1,
                    std::cmp::Ordering::Equal => k + 1,
                    std::cmp::Ordering::Greater => return None,
                };
                Some(vec![Self::chain_label(&beta, n, 1)])
            }
            Kind::Limit => {
                let z = if alpha.is_zero() { Ordinal::one() } else { alpha };
                if z >= self.gamma {
                    return None;
                }
                let r = Self::sub(z.successor()).least_root_with_rank(target)?;
                Some(Self::shift_up(&z, r))
            }
        }
    }

    /// The least immediate successor of `node` with rank at least `target`.
    pub fn least_child_with_rank(&self, node: &[Ordinal], target: &Ordinal) -> Result<Option<Node>, Error> {
        let tail: Option<Node> = match self.decode(node)? {
            Decoded::Successor { beta, n, chain, tail } => match tail {
                _ if chain < n => {
                    let c = vec![Self::chain_label(&beta, n, chain + 1)];
                    let g = Ordinal::omega_pow_mul(&Ordinal::one(), &beta).add_nat(n - chain - 1);
                    (g >= *target).then_some(c)
                }
                None if beta.is_zero() => None,
                None => Self::sub(beta).least_root_with_rank(target),
                Some(t) => Self::sub(beta)
                    .least_child_with_rank(&t, target)?
                    .map(|c| c[t.len()..].to_vec()),
            },
            Decoded::Limit { z, inner } => {
                return Ok(Self::sub(z.successor())
                    .least_child_with_rank(&inner, target)?
                    .map(|c| Self::shift_up(&z, c)))
            }
        };
        Ok(tail.map(|t| {
            let mut c = node.to_vec();
            c.extend(t);
            c
        }))
    }

    /// Extends a node to a maximal one by repeatedly taking the least child.
    pub fn leftmost_maximal_extension(&self, node: &[Ordinal]) -> Result<Node, Error> {
        let mut cur = node.to_vec();
        while let Some(c) = self.least_child_with_rank(&cur, &Ordinal::zero())? {
            cur = c;
        }
        Ok(cur)
    }

    /// The function carried by a node.
    pub fn function(&self, node: &[Ordinal]) -> Result<StepFunction, Error> {
        let pieces = self.pieces(node)?;
        StepFunction::new(self.top(), pieces)
    }

    fn pieces(&self, node: &[Ordinal]) -> Result<Vec<(Interval, f64)>, Error> {
        match self.decode(node)? {
            Decoded::Successor { beta, n, chain, tail } => {
                if n > MAX_CHAIN {
                    return Err(Error::Budget(format!(
                        "root index {n} too large for explicit functions"
                    )));
                }
                let unit = Ordinal::omega_pow(beta.clone());
                match tail {
                    None => {
                        let width = 1u64 << (n - chain);
                        Ok((1..=1u64 << chain)
                            .map(|i| {
                                let lo = unit.mul_nat(width * (i - 1));
                                let hi = unit.mul_nat(width * i);
                                let v = if i % 2 == 1 { 1.0 } else { -1.0 };
                                (Interval { lo: Some(lo), hi }, v)
                            })
                            .collect())
                    }
                    Some(t) => {
                        let inner = Self::sub(beta).pieces(&t)?;
                        let mut out = Vec::with_capacity(inner.len() << n);
                        for i in 1..=1u64 << n {
                            let base = unit.mul_nat(i - 1);
                            for (iv, v) in &inner {
                                let lo = iv
                                    .lo
                                    .as_ref()
                                    .ok_or_else(|| Error::InvalidTree("function does not vanish at 0".into()))?;
                                out.push((
                                    Interval {
                                        lo: Some(base.add(lo)),
                                        hi: base.add(&iv.hi),
                                    },
                                    *v,
                                ));
                            }
                        }
                        Ok(out)
                    }
                }
            }
            Decoded::Limit { z, inner } => Self::sub(z.successor()).pieces(&inner),
        }
    }

    /// The scheme `A_() = supp f_1`, `A_(d, e) = A_d ∩ {f_(|d|+1) = e}` along
    /// the initial segments of `node`.
    /// The scheme of the functions along a maximal branch.
    pub fn cantor_scheme(&self, node: &[Ordinal]) -> Result<CantorScheme, Error> {
        if !self.is_maximal(node)? {
            return Err(Error::NotMaximal(format_node(node)));
        }
        let fs: Vec<StepFunction> = (1..=node.len())
            .map(|k| self.function(&node[..k]))
            .collect::<Result<_, _>>()?;
        scheme_from_functions(&fs)
    }
}

impl fmt::Display for TGamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T[{}]", self.gamma)
    }
}

/// Builds the scheme generated by a sequence of `{-1, 0, 1}`-valued step
/// functions, the first one giving the root cell.
pub fn scheme_from_functions(fs: &[StepFunction]) -> Result<CantorScheme, Error> {
    let mut cells: BTreeMap<SignSeq, Cell> = BTreeMap::new();
    let root = fs
        .first()
        .map(|f| f.support())
        .ok_or_else(|| Error::InvalidTree("empty branch".into()))?;
    let mut layer: Vec<(SignSeq, IntervalSet)> = vec![(Vec::new(), root)];
    for f in fs {
        let plus = f.preimage(1.0);
        let minus = f.preimage(-1.0);
        let mut next = Vec::with_capacity(layer.len() * 2);
        for (d, a) in &layer {
            for (e, pre) in [(1 as Sign, &plus), (-1, &minus)] {
                let mut child = d.clone();
                child.push(e);
                next.push((child, a.intersect(pre)));
            }
        }
        for (d, a) in layer {
            cells.insert(d, Cell::Intervals(a));
        }
        layer = next;
    }
    for (d, a) in layer {
        cells.insert(d, Cell::Intervals(a));
    }
    CantorScheme::new(fs.len(), cells)
}

/// The map of the sharpness construction from `S[1 + zeta][S[xi]]` into
/// `T[w^zeta]`: for every non-empty initial segment of `set`, its node.
pub fn phi_chain(xi: &Ordinal, zeta: &Ordinal, tree: &TGamma, set: &FiniteSet) -> Result<Vec<Node>, Error> {
    let outer = Ordinal::one().add(zeta);
    let fam = Family::conv(outer.clone(), xi.clone());
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if !schreier::member(&fam, set) {
        return Err(Error::NotMember {
            set: set.to_string(),
            family: fam.to_string(),
        });
    }
    let minima_family = Family::Base(outer);
    let elems = set.as_slice();
    let mut blocks = Decomposer::new(Family::Base(xi.clone()).recognizer());
    blocks.push(elems[0])?;
    let mut minima = FiniteSet::new(vec![elems[0]])?;
    let target = schreier::residual_rank(&minima_family, &minima)?;
    let mut node = tree
        .least_root_with_rank(&target)
        .ok_or_else(|| Error::InvalidTree(format!("{tree} has no root of rank {target}")))?;
    let mut out = vec![node.clone()];
    for &p in &elems[1..] {
        if blocks.push(p)? {
            minima = minima.extended(p)?;
            let target = schreier::residual_rank(&minima_family, &minima)?;
            node = tree
                .least_child_with_rank(&node, &target)?
                .ok_or_else(|| Error::InvalidTree(format!("no child of {} with rank {target}", format_node(&node))))?;
        }
        out.push(node.clone());
    }
    Ok(out)
}

pub fn phi_map(xi: &Ordinal, zeta: &Ordinal, tree: &TGamma, set: &FiniteSet) -> Result<Node, Error> {
    Ok(phi_chain(xi, zeta, tree, set)?.pop().unwrap())
}

#[derive(Serialize)]
pub struct NodeRecord {
    pub node: String,
    pub rank: Ordinal,
    pub function: StepFunction,
}

/// Every node of a truncation with its rank and function.
pub fn describe(tree: &TGamma, bound: u64, max_nodes: usize) -> Result<Vec<NodeRecord>, Error> {
    let t = tree.materialize(bound, max_nodes)?;
    t.paths()
        .into_iter()
        .map(|p| {
            Ok(NodeRecord {
                node: format_node(&p),
                rank: tree.g_rank(&p)?,
                function: tree.function(&p)?,
            })
        })
        .collect()
}
