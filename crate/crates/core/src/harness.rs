//! Scenario runners producing machine-readable reports.
//!
//! Every report is deterministic given its configuration except for the
//! `wall_time_ms` field.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::ordinal::Ordinal;
use crate::schreier::{decompose, greedy_blocks, Family, FiniteSet, Limits};
use crate::space::{self, default_selector, rademacher, sign_sequences, Point, Sign, StepFunction};
use crate::tensor::{
    self, pi_norm_with, weak_1_norm_pi, weak_2_norm_pi_lower, LpBudget, TensorMatrix, GROTHENDIECK_BOUND,
};
use crate::trees::{format_node, phi_chain, scheme_from_functions, Node, TGamma};
use crate::weights::{self, IndexedFamily, Walker, Weight};

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    /// The property being checked.
    pub anchor: String,
    pub relation: String,
    pub value: String,
    pub reference: String,
    pub exact: bool,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub wall_time_ms: u128,
}

impl Report {
    pub fn new(scenario: &str, parameters: BTreeMap<String, String>) -> Self {
        Report {
            scenario: scenario.into(),
            parameters,
            checks: Vec::new(),
            pass: true,
            wall_time_ms: 0,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    /// Records a failed check for an error that stopped the scenario.
    pub fn push_error(&mut self, name: &str, anchor: &str, e: &Error) {
        self.push(Check {
            name: name.into(),
            anchor: anchor.into(),
            relation: "completes".into(),
            value: "error".into(),
            reference: "-".into(),
            exact: true,
            pass: false,
            detail: e.to_string(),
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_csv(&self) -> Result<String, Error> {
        csv_rows(std::slice::from_ref(self))
    }
}

/// CSV with one line per check.
pub fn csv_rows(reports: &[Report]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(e.to_string());
    w.write_record([
        "scenario",
        "name",
        "anchor",
        "relation",
        "value",
        "reference",
        "exact",
        "pass",
        "detail",
    ])
    .map_err(io)?;
    for r in reports {
        for c in &r.checks {
            w.write_record([
                r.scenario.as_str(),
                &c.name,
                &c.anchor,
                &c.relation,
                &c.value,
                &c.reference,
                if c.exact { "true" } else { "false" },
                if c.pass { "true" } else { "false" },
                &c.detail,
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn exact_check(name: &str, anchor: &str, value: String, reference: &str, pass: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        anchor: anchor.into(),
        relation: "==".into(),
        value,
        reference: reference.into(),
        exact: true,
        pass,
        detail,
    }
}

fn float_check(name: &str, anchor: &str, relation: &str, value: f64, reference: f64, tol: f64) -> Check {
    let pass = match relation {
        "<=" => value <= reference + tol,
        ">=" => value >= reference - tol,
        _ => (value - reference).abs() <= tol,
    };
    Check {
        name: name.into(),
        anchor: anchor.into(),
        relation: relation.into(),
        value: format!("{value:.12}"),
        reference: format!("{reference}"),
        exact: false,
        pass,
        detail: format!("tolerance {tol:e}"),
    }
}

// ---------------------------------------------------------------- permanence

#[derive(Clone, Debug)]
pub struct PermConfig {
    pub xi: Ordinal,
    pub zeta: Ordinal,
    /// Each stream is `start, start + 1, ...`.
    pub starts: Vec<u64>,
    pub blocks: usize,
    pub limits: Limits,
}

impl Default for PermConfig {
    fn default() -> Self {
        PermConfig {
            xi: Ordinal::one(),
            zeta: Ordinal::one(),
            starts: vec![3],
            blocks: 1,
            limits: Limits::default(),
        }
    }
}

pub fn run_perm_suite(cfg: &PermConfig) -> Report {
    let t0 = Instant::now();
    let starts: Vec<String> = cfg.starts.iter().map(|s| s.to_string()).collect();
    let mut r = Report::new(
        "perm",
        params(&[
            ("xi", cfg.xi.to_string()),
            ("zeta", cfg.zeta.to_string()),
            ("starts", starts.join(",")),
            ("blocks", cfg.blocks.to_string()),
        ]),
    );
    for &start in &cfg.starts {
        for c in weights::verify_perm(&cfg.xi, &cfg.zeta, start.., cfg.blocks, &cfg.limits) {
            r.push(Check {
                name: format!("start {start}: {}", c.name),
                anchor: c.name.clone(),
                relation: "==".into(),
                value: if c.pass { "1".into() } else { "0".into() },
                reference: "1".into(),
                exact: true,
                pass: c.pass,
                detail: format!("{} ({} checked)", c.detail, c.checked),
            });
        }
    }
    r.wall_time_ms = t0.elapsed().as_millis();
    r
}

// ---------------------------------------------------------------- sharpness

#[derive(Clone, Debug)]
pub struct SharpnessConfig {
    pub xi: Ordinal,
    pub zeta: Ordinal,
    pub start: u64,
    pub limits: Limits,
    pub lp: LpBudget,
}

impl SharpnessConfig {
    pub fn new(xi: Ordinal, zeta: Ordinal, start: u64) -> Self {
        SharpnessConfig {
            xi,
            zeta,
            start,
            limits: Limits {
                max_block_len: 1 << 16,
                ..Limits::default()
            },
            lp: LpBudget::default(),
        }
    }
}

/// The finite model of the sharpness construction.
#[derive(Clone, Debug, Serialize)]
pub struct SharpnessOutcome {
    pub block: FiniteSet,
    pub segments: Vec<FiniteSet>,
    /// The nodes `s_1 < ... < s_m`.
    pub nodes: Vec<String>,
    pub branch: String,
    /// `a_i`, the value of `q` on the `i`-th segment.
    pub coefficients: Vec<Weight>,
    /// Exact value of the pairing, grouped by radicand.
    pub pairing: BTreeMap<u64, String>,
    pub pairing_is_one: bool,
    pub coefficients_constant: bool,
    pub certificate_bound: f64,
    pub certified_lower: f64,
    pub lp_columns: usize,
    pub lp_value: f64,
    pub lp_lower: f64,
}

fn walk_weights(xi: &Ordinal, outer: &Ordinal, block: &FiniteSet) -> Result<Vec<(BigRational, Weight)>, Error> {
    let mut pw = Walker::p(xi);
    let mut qw = Walker::q(xi, outer);
    let mut out = Vec::with_capacity(block.len());
    for &n in block.as_slice() {
        pw.push(n)?;
        qw.push(n)?;
        out.push((pw.p_value(), qw.q_value()?));
    }
    Ok(out)
}

fn node_key(n: &Node) -> String {
    format_node(n)
}

fn atom_index(d: &[Sign]) -> usize {
    d.iter().fold(0, |acc, &e| (acc << 1) | usize::from(e < 0))
}

pub fn sharpness_instance(cfg: &SharpnessConfig) -> Result<SharpnessOutcome, Error> {
    let (xi, zeta) = (&cfg.xi, &cfg.zeta);
    let outer = Ordinal::one().add(zeta);
    let fam = Family::conv(outer.clone(), xi.clone());
    let block = decompose(&fam, cfg.start.., 1, &cfg.limits)?.remove(0);
    let segments = greedy_blocks(&Family::Base(xi.clone()), &block);
    let m = segments.len();
    if m > cfg.lp.max_short_side {
        return Err(Error::Budget(format!("{m} segments")));
    }
    let tree = TGamma::new(Ordinal::omega_pow(zeta.clone()))?;
    let chain = phi_chain(xi, zeta, &tree, &block)?;

    let mut seg_of = Vec::with_capacity(block.len());
    let mut nodes: Vec<Node> = Vec::with_capacity(m);
    let mut pos = 0;
    for (i, seg) in segments.iter().enumerate() {
        let s = chain[pos].clone();
        if chain[pos..pos + seg.len()].iter().any(|t| *t != s) {
            return Err(Error::InvalidTree(format!("the node changes inside segment {}", i + 1)));
        }
        if let Some(prev) = nodes.last() {
            if !(s.len() > prev.len() && s.starts_with(prev)) {
                return Err(Error::InvalidTree("segment nodes do not increase".into()));
            }
        }
        nodes.push(s);
        seg_of.extend(std::iter::repeat_n(i, seg.len()));
        pos += seg.len();
    }
    let branch = tree.leftmost_maximal_extension(nodes.last().unwrap())?;
    let l = branch.len();
    if l > 16 {
        return Err(Error::Budget(format!("branch of length {l}")));
    }
    let fs: Vec<StepFunction> = (1..=l).map(|k| tree.function(&branch[..k])).collect::<Result<_, _>>()?;
    let scheme = scheme_from_functions(&fs)?;
    let selector = default_selector(&scheme);
    let mus = rademacher(&scheme, &selector)?;
    let levels: Vec<usize> = nodes.iter().map(|s| s.len()).collect();

    let weights_along = walk_weights(xi, &outer, &block)?;
    let mut coefficients: Vec<Weight> = Vec::with_capacity(m);
    let mut constant = true;
    for (t, (_, q)) in weights_along.iter().enumerate() {
        let i = seg_of[t];
        if coefficients.len() == i {
            coefficients.push(q.clone());
        } else if coefficients[i] != *q {
            constant = false;
        }
    }

    // exact pairing of sum_k a_k mu_{s_k} (x) delta_{E_k} with the average
    let mut pair_cache: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
    let mut pairing: BTreeMap<u64, BigRational> = BTreeMap::new();
    for (t, (p, q)) in weights_along.iter().enumerate() {
        let k = seg_of[t];
        let level = chain[t].len();
        let key = (levels[k], level);
        if let std::collections::btree_map::Entry::Vacant(e) = pair_cache.entry(key) {
            e.insert(space::pair(&mus[levels[k] - 1], &fs[level - 1])?);
        }
        let w = coefficients[k].mul(q).scale(&(p * &pair_cache[&key]));
        let e = pairing.entry(w.radicand()).or_insert_with(BigRational::zero);
        *e += w.coeff();
    }
    pairing.retain(|_, v| !v.is_zero());
    let pairing_is_one = pairing.len() == 1 && pairing.get(&1).is_some_and(|v| v.is_one());

    // the tensor on rows E_i and columns the selected atoms
    let atoms: Vec<(Vec<Sign>, Ordinal)> = sign_sequences(l)
        .into_iter()
        .map(|d| {
            let Point::Ordinal(x) = selector[&d].clone() else {
                unreachable!("tree schemes select ordinals")
            };
            (d, x)
        })
        .collect();
    let mut grouped: BTreeMap<(usize, String), (f64, usize)> = BTreeMap::new();
    for (t, (p, q)) in weights_along.iter().enumerate() {
        let c = p.to_f64().unwrap_or(f64::NAN) * q.to_f64();
        let e = grouped
            .entry((seg_of[t], node_key(&chain[t])))
            .or_insert((0.0, chain[t].len()));
        e.0 += c;
    }
    let values: Vec<Vec<f64>> = fs
        .iter()
        .map(|f| atoms.iter().map(|(_, x)| f.eval(x)).collect())
        .collect::<Result<_, _>>()?;
    let mut v = TensorMatrix::zeros(m, atoms.len());
    for ((i, _), (c, level)) in &grouped {
        for (col, f) in values[level - 1].iter().enumerate() {
            v.0[(*i, col)] += c * f;
        }
    }
    let column_of: BTreeMap<&Ordinal, usize> = atoms.iter().enumerate().map(|(c, (_, x))| (x, c)).collect();
    let mut b = TensorMatrix::zeros(m, atoms.len());
    for (i, mu) in levels.iter().map(|&lv| &mus[lv - 1]).enumerate() {
        let a = coefficients[i].to_f64();
        for (p, w) in mu.atoms() {
            let Point::Ordinal(x) = p else { continue };
            let col = column_of[x];
            b.0[(i, col)] += a * w.to_f64().unwrap_or(f64::NAN);
        }
    }
    let cert = tensor::DualCertificate::new(b);
    let certified_lower = cert.lower_bound(&v)?;

    // LP on the full model, or on Hadamard-balanced columns when too large
    let cols: Vec<usize> = if m * atoms.len() <= cfg.lp.max_entries {
        (0..atoms.len()).collect()
    } else {
        let k = m.next_power_of_two();
        (0..k)
            .map(|c| {
                let mut d: Vec<Sign> = vec![1; l];
                for (i, &lv) in levels.iter().enumerate() {
                    d[lv - 1] = if (i & c).count_ones() % 2 == 0 { 1 } else { -1 };
                }
                atom_index(&d)
            })
            .collect()
    };
    let restricted = TensorMatrix(nalgebra::DMatrix::from_fn(m, cols.len(), |i, j| v.0[(i, cols[j])]));
    let lp = pi_norm_with(&restricted, &cfg.lp)?;

    Ok(SharpnessOutcome {
        block,
        segments,
        nodes: nodes.iter().map(|n| format_node(n)).collect(),
        branch: format_node(&branch),
        coefficients,
        pairing: pairing.into_iter().map(|(r, v)| (r, v.to_string())).collect(),
        pairing_is_one,
        coefficients_constant: constant,
        certificate_bound: cert.bound,
        certified_lower,
        lp_columns: cols.len(),
        lp_value: lp.value,
        lp_lower: lp.lower,
    })
}

pub fn run_sharpness(cfg: &SharpnessConfig) -> Report {
    let t0 = Instant::now();
    let mut r = Report::new(
        "sharpness",
        params(&[
            ("xi", cfg.xi.to_string()),
            ("zeta", cfg.zeta.to_string()),
            ("start", cfg.start.to_string()),
        ]),
    );
    match sharpness_instance(cfg) {
        Err(e) => r.push_error("construction", "the averaged collection exists in budget", &e),
        Ok(o) => {
            r.push(exact_check(
                "q constant on segments",
                "q depends only on the current segment",
                o.coefficients_constant.to_string(),
                "true",
                o.coefficients_constant,
                format!(
                    "a = [{}]",
                    o.coefficients
                        .iter()
                        .map(|w| w.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            ));
            let value: Vec<String> = o.pairing.iter().map(|(r, v)| format!("{v}@sqrt({r})")).collect();
            r.push(exact_check(
                "dual pairing",
                "pairing with the Rademacher functional",
                if o.pairing_is_one {
                    "1".into()
                } else {
                    value.join(" + ")
                },
                "1",
                o.pairing_is_one,
                format!(
                    "block {}..{} split in {} segments, nodes {}, branch {}",
                    o.block.minimum().unwrap_or(0),
                    o.block.maximum().unwrap_or(0),
                    o.segments.len(),
                    o.nodes.join(" < "),
                    o.branch
                ),
            ));
            r.push(float_check(
                "functional norm",
                "weak-2 bound of the Rademacher functionals",
                "<=",
                o.certificate_bound,
                1.0,
                1e-12,
            ));
            r.push(float_check(
                "certified lower bound",
                "projective norm of the average",
                ">=",
                o.certified_lower,
                1.0,
                1e-9,
            ));
            let mut lp = float_check(
                "LP projective norm",
                "projective norm of the average",
                ">=",
                o.lp_lower,
                1.0,
                1e-9,
            );
            lp.detail = format!("{} columns, decomposition cost {:.12}", o.lp_columns, o.lp_value);
            r.push(lp);
        }
    }
    r.wall_time_ms = t0.elapsed().as_millis();
    r
}

// ---------------------------------------------------------------- blocking

#[derive(Clone, Debug)]
pub struct BlockingConfig {
    pub xi: Ordinal,
    pub start: u64,
    pub blocks: usize,
    /// Points of each factor per block.
    pub width: usize,
    pub eps: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for BlockingConfig {
    fn default() -> Self {
        BlockingConfig {
            xi: Ordinal::one(),
            start: 3,
            blocks: 3,
            width: 2,
            eps: 0.01,
            seed: 7,
            restarts: 8,
        }
    }
}

fn random_signs(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect()
}

/// Averages of vectors supported in disjoint diagonal rectangles, plus
/// small perturbations, and the splitting of L-shaped averages into a
/// row-disjoint and a column-disjoint part.
pub fn run_blocking_demo(cfg: &BlockingConfig) -> Report {
    let t0 = Instant::now();
    let mut r = Report::new(
        "blocking",
        params(&[
            ("xi", cfg.xi.to_string()),
            ("start", cfg.start.to_string()),
            ("blocks", cfg.blocks.to_string()),
            ("eps", cfg.eps.to_string()),
            ("seed", cfg.seed.to_string()),
        ]),
    );
    if let Err(e) = blocking_checks(cfg, &mut r) {
        r.push_error("blocking", "scenario within budget", &e);
    }
    r.wall_time_ms = t0.elapsed().as_millis();
    r
}

fn blocking_checks(cfg: &BlockingConfig, r: &mut Report) -> Result<(), Error> {
    if cfg.xi > Ordinal::one() {
        return Err(Error::Config("the blocking demo needs xi <= 1".into()));
    }
    let budget = LpBudget::default();
    let limits = Limits::default();
    let (nb, w) = (cfg.blocks, cfg.width);
    let size = nb * w;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let blocks = decompose(&Family::Base(cfg.xi.clone()), cfg.start.., nb, &limits)?;
    let stream: Vec<u64> = blocks.iter().flat_map(|b| b.as_slice().to_vec()).collect();

    // diagonal collections: clean indicators, random signs, perturbed signs
    let mut indicator = IndexedFamily::new();
    let mut signed = IndexedFamily::new();
    let mut perturbed = IndexedFamily::new();
    let mut pos = 0;
    for (n, b) in blocks.iter().enumerate() {
        let mut rows = vec![0.0; size];
        for x in rows.iter_mut().skip(n * w).take(w) {
            *x = 1.0;
        }
        for _ in b.as_slice() {
            pos += 1;
            let set = FiniteSet::new(stream[..pos].to_vec())?;
            indicator.insert(set.clone(), TensorMatrix::elementary(&rows, &rows));
            let mut f = vec![0.0; size];
            let mut g = vec![0.0; size];
            let (sf, sg) = (random_signs(&mut rng, w), random_signs(&mut rng, w));
            f[n * w..(n + 1) * w].copy_from_slice(&sf);
            g[n * w..(n + 1) * w].copy_from_slice(&sg);
            let u = TensorMatrix::elementary(&f, &g);
            signed.insert(set.clone(), u.clone());
            // entries of the perturbation sum to less than eps / 2^(n+1)
            let eta = cfg.eps / (2f64.powi(n as i32 + 1) * (size * size) as f64);
            let noise = TensorMatrix(nalgebra::DMatrix::from_fn(size, size, |_, _| rng.gen_range(-eta..eta)));
            perturbed.insert(set, u.plus(&noise)?);
        }
    }
    let avg_all = |coll: &IndexedFamily<TensorMatrix>| -> Result<Vec<TensorMatrix>, Error> {
        (1..=nb)
            .map(|n| weights::avg(&cfg.xi, cfg.start.., coll, n, TensorMatrix::zeros(size, size), &limits))
            .collect()
    };
    let clean = avg_all(&indicator)?;
    let v = weak_1_norm_pi(&clean, &budget)?.value;
    r.push(float_check(
        "indicator blocks weak-1",
        "disjoint blocks have weak-1 norm one",
        "==",
        v,
        1.0,
        1e-9,
    ));
    let ws = avg_all(&signed)?;
    let v = weak_1_norm_pi(&ws, &budget)?.value;
    r.push(float_check(
        "signed blocks weak-1",
        "disjoint blocks have weak-1 norm one",
        "<=",
        v,
        1.0,
        1e-9,
    ));
    let ws = avg_all(&perturbed)?;
    let v = weak_1_norm_pi(&ws, &budget)?.value;
    r.push(float_check(
        "perturbed blocks weak-1",
        "almost disjoint blocks have weak-1 norm near one",
        "<=",
        v,
        1.0 + cfg.eps,
        1e-9,
    ));

    // L-shaped tensors: w_n lives on [0, a_n] x [0, a_n] minus [0, a_(n-1)]^2
    let mut ls: Vec<TensorMatrix> = Vec::with_capacity(nb);
    for n in 0..nb {
        let hi = (n + 1) * w;
        let lo = n * w;
        let raw = TensorMatrix(nalgebra::DMatrix::from_fn(size, size, |i, j| {
            if i < hi && j < hi && (i >= lo || j >= lo) {
                rng.gen_range(-1.0..1.0)
            } else {
                0.0
            }
        }));
        let norm = pi_norm_with(&raw, &budget)?.value;
        ls.push(raw.scaled(1.0 / norm));
    }
    let mut us = Vec::with_capacity(nb);
    let mut vs = Vec::with_capacity(nb);
    let mut split_ok = true;
    let mut norms_ok = true;
    for (n, wn) in ls.iter().enumerate() {
        let lo = n * w;
        let u = TensorMatrix(nalgebra::DMatrix::from_fn(size, size, |i, j| {
            if i >= lo {
                wn.get(i, j)
            } else {
                0.0
            }
        }));
        let v = TensorMatrix(nalgebra::DMatrix::from_fn(size, size, |i, j| {
            if i < lo {
                wn.get(i, j)
            } else {
                0.0
            }
        }));
        split_ok &= u.plus(&v)? == *wn;
        let pw = pi_norm_with(wn, &budget)?.value;
        norms_ok &= pi_norm_with(&u, &budget)?.value <= pw + 1e-9;
        norms_ok &= pi_norm_with(&v, &budget)?.value <= pw + 1e-9;
        us.push(u);
        vs.push(v);
    }
    r.push(exact_check(
        "L-shape split",
        "w = u + v with u row-disjoint and v column-disjoint",
        split_ok.to_string(),
        "true",
        split_ok && rows_disjoint(&us) && cols_disjoint(&vs),
        format!("{nb} tensors"),
    ));
    r.push(exact_check(
        "split parts are contractive",
        "projections onto rows or columns have norm one",
        norms_ok.to_string(),
        "true",
        norms_ok,
        String::new(),
    ));
    let wu = weak_2_norm_pi_lower(&us, cfg.restarts, cfg.seed, &budget)?.value;
    let wv = weak_2_norm_pi_lower(&vs, cfg.restarts, cfg.seed + 1, &budget)?.value;
    let ww = weak_2_norm_pi_lower(&ls, cfg.restarts, cfg.seed + 2, &budget)?.value;
    r.push(float_check(
        "row-disjoint weak-2",
        "Grothendieck bound for disjoint factors",
        "<=",
        wu,
        GROTHENDIECK_BOUND,
        1e-9,
    ));
    r.push(float_check(
        "column-disjoint weak-2",
        "Grothendieck bound for disjoint factors",
        "<=",
        wv,
        GROTHENDIECK_BOUND,
        1e-9,
    ));
    r.push(float_check(
        "L-shaped weak-2",
        "triangle inequality after splitting",
        "<=",
        ww,
        2.0 * GROTHENDIECK_BOUND,
        1e-9,
    ));
    Ok(())
}

fn rows_disjoint(us: &[TensorMatrix]) -> bool {
    let (m, n) = us.first().map_or((0, 0), |u| u.shape());
    (0..m).all(|i| us.iter().filter(|u| (0..n).any(|j| u.get(i, j) != 0.0)).count() <= 1)
}

fn cols_disjoint(us: &[TensorMatrix]) -> bool {
    let (m, n) = us.first().map_or((0, 0), |u| u.shape());
    (0..n).all(|j| us.iter().filter(|u| (0..m).any(|i| u.get(i, j) != 0.0)).count() <= 1)
}

// ---------------------------------------------------------------- Grothendieck probe

#[derive(Clone, Debug)]
pub struct GrothConfig {
    /// Number of tensors; the first factor lives on `2^count` points.
    pub count: usize,
    /// Points of the second factor.
    pub width: usize,
    pub samples: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for GrothConfig {
    fn default() -> Self {
        GrothConfig {
            count: 3,
            width: 4,
            samples: 8,
            restarts: 4,
            seed: 11,
        }
    }
}

/// `f_n = r_n / sqrt(count)` on the sign cube, so that
/// `sup_j sum_n f_n(j)^2 = 1`.
pub fn rademacher_family(count: usize) -> Vec<Vec<f64>> {
    let s = (count as f64).sqrt();
    (0..count)
        .map(|n| {
            (0..1usize << count)
                .map(|j| if j >> n & 1 == 0 { 1.0 / s } else { -1.0 / s })
                .collect()
        })
        .collect()
}

pub fn run_groth_probe(cfg: &GrothConfig) -> Report {
    let t0 = Instant::now();
    let mut r = Report::new(
        "groth",
        params(&[
            ("count", cfg.count.to_string()),
            ("width", cfg.width.to_string()),
            ("samples", cfg.samples.to_string()),
            ("seed", cfg.seed.to_string()),
        ]),
    );
    if let Err(e) = groth_checks(cfg, &mut r) {
        r.push_error("groth", "scenario within budget", &e);
    }
    r.wall_time_ms = t0.elapsed().as_millis();
    r
}

fn groth_checks(cfg: &GrothConfig, r: &mut Report) -> Result<(), Error> {
    let budget = LpBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let fs = rademacher_family(cfg.count);
    let wf = tensor::weak_p_norm_vec(&fs, 2.0)?;
    r.push(float_check(
        "first factors weak-2",
        "Rademacher functions are 2-weakly bounded",
        "==",
        wf,
        1.0,
        1e-12,
    ));
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let us: Vec<TensorMatrix> = fs
            .iter()
            .map(|f| {
                let g: Vec<f64> = (0..cfg.width).map(|_| rng.gen_range(-1.0..1.0)).collect();
                TensorMatrix::elementary(f, &g)
            })
            .collect();
        let v = weak_2_norm_pi_lower(&us, cfg.restarts, rng.gen(), &budget)?.value;
        worst = worst.max(v);
    }
    r.push(float_check(
        "sampled weak-2 lower bound",
        "Grothendieck bound for 2-weakly bounded first factors",
        "<=",
        worst,
        GROTHENDIECK_BOUND,
        0.0,
    ));
    // a single tensor
    let g: Vec<f64> = (0..cfg.width).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f: Vec<f64> = (0..cfg.width).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let one = vec![TensorMatrix::elementary(&f, &g)];
    let v = weak_2_norm_pi_lower(&one, cfg.restarts, cfg.seed, &budget)?.value;
    let bound = f.iter().fold(0.0f64, |a, x| a.max(x.abs())) * g.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    r.push(float_check("single tensor", "cross norm", "<=", v, bound, 1e-9));
    // both factors disjointly supported
    let k = cfg.count.min(6);
    let us: Vec<TensorMatrix> = (0..k)
        .map(|n| {
            let mut f = vec![0.0; k];
            let mut g = vec![0.0; k];
            f[n] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            g[n] = rng.gen_range(-1.0..1.0);
            TensorMatrix::elementary(&f, &g)
        })
        .collect();
    let v = weak_1_norm_pi(&us, &budget)?.value;
    r.push(float_check(
        "disjoint pairs weak-1",
        "disjoint blocks have weak-1 norm at most one",
        "<=",
        v,
        1.0,
        1e-9,
    ));
    Ok(())
}

// ---------------------------------------------------------------- biorthogonal lower bound

#[derive(Clone, Debug)]
pub struct LowerBoundConfig {
    pub trials: usize,
    pub seed: u64,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        LowerBoundConfig { trials: 12, seed: 5 }
    }
}

fn random_simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<BigRational> {
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    raw.iter()
        .map(|&x| BigRational::new(BigInt::from(x), BigInt::from(total)))
        .collect()
}

/// Square roots of rationals `n/d` as exact weights `n / sqrt(n d)`.
fn sqrt_weight(c: &BigRational) -> Result<Weight, Error> {
    let n = c.numer().to_u64().ok_or_else(|| Error::InvalidWeight(c.to_string()))?;
    let d = c.denom().to_u64().ok_or_else(|| Error::InvalidWeight(c.to_string()))?;
    Ok(Weight::inv_sqrt(n * d)?.scale(&BigRational::from_integer(BigInt::from(n))))
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundTrial {
    pub branch: String,
    pub levels: Vec<usize>,
    pub pairing_is_one: bool,
    pub lp_lower: f64,
}

/// One random configuration: a maximal branch of `T[1]` or `T[2]`, levels
/// `s_1 < ... < s_m`, vectors `x_j` of `l_inf^p` biorthogonal to coordinate
/// functionals in blocks, positive `a` with `sum a^2 = 1` and `b` summing
/// to one on each block.
pub fn lower_bound_trial(rng: &mut ChaCha8Rng) -> Result<LowerBoundTrial, Error> {
    let budget = LpBudget::default();
    let (tree, branch) = if rng.gen_bool(0.5) {
        let t = TGamma::new(Ordinal::one())?;
        let n = rng.gen_range(1..=4u64);
        let b = t.leftmost_maximal_extension(&[Ordinal::nat(n - 1)])?;
        (t, b)
    } else {
        let t = TGamma::new(Ordinal::nat(2))?;
        let n = rng.gen_range(1..=2u64);
        let root = vec![Ordinal::omega().add_nat(n - 1)];
        let mut node = root;
        for _ in 1..n {
            node = t.children(&node, 1)?.remove(0);
        }
        let k = rng.gen_range(1..=4 - n);
        node.push(Ordinal::nat(k - 1));
        let b = t.leftmost_maximal_extension(&node)?;
        (t, b)
    };
    let l = branch.len();
    let fs: Vec<StepFunction> = (1..=l).map(|k| tree.function(&branch[..k])).collect::<Result<_, _>>()?;
    let scheme = scheme_from_functions(&fs)?;
    let selector = default_selector(&scheme);
    let mus = rademacher(&scheme, &selector)?;
    let mut levels: Vec<usize> = (1..=l).filter(|_| rng.gen_bool(0.6)).collect();
    if levels.is_empty() {
        levels.push(rng.gen_range(1..=l));
    }
    let m = levels.len();
    let a2 = random_simplex(rng, m);
    let a: Vec<Weight> = a2.iter().map(sqrt_weight).collect::<Result<_, _>>()?;
    let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=2)).collect();
    let extra = rng.gen_range(0..=2usize);
    let p = m + extra;
    let mut xs: Vec<Vec<BigRational>> = Vec::new();
    let mut bs: Vec<BigRational> = Vec::new();
    let mut owner = Vec::new();
    for (i, &sz) in sizes.iter().enumerate() {
        for b in random_simplex(rng, sz) {
            let mut x = vec![BigRational::zero(); p];
            x[i] = BigRational::one();
            for c in x.iter_mut().skip(m) {
                *c = BigRational::new(BigInt::from(rng.gen_range(-4..=4)), BigInt::from(4));
            }
            xs.push(x);
            bs.push(b);
            owner.push(i);
        }
    }
    // exact pairing <sum_k a_k mu_{s_k} (x) e*_k, sum_{i,j} a_i b_j f_{s_i} (x) x_j>
    let mut pairing: BTreeMap<u64, BigRational> = BTreeMap::new();
    for k in 0..m {
        for i in 0..m {
            let mf = space::pair(&mus[levels[k] - 1], &fs[levels[i] - 1])?;
            if mf.is_zero() {
                continue;
            }
            for (j, x) in xs.iter().enumerate() {
                if owner[j] != i && x[k].is_zero() {
                    continue;
                }
                let c = &mf * &bs[j] * &x[k];
                let w = a[k].mul(&a[i]).scale(&c);
                *pairing.entry(w.radicand()).or_insert_with(BigRational::zero) += w.coeff();
            }
        }
    }
    pairing.retain(|_, v| !v.is_zero());
    let pairing_is_one = pairing.len() == 1 && pairing.get(&1).is_some_and(|v| v.is_one());

    let atoms: Vec<Ordinal> = sign_sequences(l)
        .into_iter()
        .map(|d| match &selector[&d] {
            Point::Ordinal(x) => x.clone(),
            Point::Set(_) => unreachable!("tree schemes select ordinals"),
        })
        .collect();
    let mut u = TensorMatrix::zeros(atoms.len(), p);
    for i in 0..m {
        let ai = a[i].to_f64();
        let f = &fs[levels[i] - 1];
        let fv: Vec<f64> = atoms.iter().map(|x| f.eval(x)).collect::<Result<_, _>>()?;
        for (j, x) in xs.iter().enumerate() {
            let bj = bs[j].to_f64().unwrap_or(f64::NAN);
            for (row, fx) in fv.iter().enumerate() {
                for (col, xc) in x.iter().enumerate() {
                    u.0[(row, col)] += ai * bj * fx * xc.to_f64().unwrap_or(f64::NAN);
                }
            }
        }
    }
    let lp = pi_norm_with(&u, &budget)?;
    Ok(LowerBoundTrial {
        branch: format_node(&branch),
        levels,
        pairing_is_one,
        lp_lower: lp.lower,
    })
}

pub fn run_lower_bound_probe(cfg: &LowerBoundConfig) -> Report {
    let t0 = Instant::now();
    let mut r = Report::new(
        "lower-bound",
        params(&[("trials", cfg.trials.to_string()), ("seed", cfg.seed.to_string())]),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for t in 0..cfg.trials {
        match lower_bound_trial(&mut rng) {
            Err(e) => r.push_error(&format!("trial {t}"), "biorthogonal lower bound", &e),
            Ok(o) => {
                r.push(exact_check(
                    &format!("trial {t} pairing"),
                    "pairing of biorthogonal configurations",
                    if o.pairing_is_one { "1".into() } else { "other".into() },
                    "1",
                    o.pairing_is_one,
                    format!("branch {}, levels {:?}", o.branch, o.levels),
                ));
                r.push(float_check(
                    &format!("trial {t} projective norm"),
                    "biorthogonal lower bound",
                    ">=",
                    o.lp_lower,
                    1.0,
                    1e-9,
                ));
            }
        }
    }
    r.wall_time_ms = t0.elapsed().as_millis();
    r
}

/// The instances of `verify all`.
pub fn run_all(seed: u64) -> Vec<Report> {
    let mut out = vec![run_perm_suite(&PermConfig::default())];
    for (xi, zeta, start) in [(0u64, 0u64, 3u64), (1, 0, 3), (1, 1, 2)] {
        out.push(run_sharpness(&SharpnessConfig::new(
            Ordinal::nat(xi),
            Ordinal::nat(zeta),
            start,
        )));
    }
    out.push(run_blocking_demo(&BlockingConfig {
        seed,
        ..BlockingConfig::default()
    }));
    out.push(run_groth_probe(&GrothConfig {
        seed,
        ..GrothConfig::default()
    }));
    out.push(run_lower_bound_probe(&LowerBoundConfig {
        seed,
        ..LowerBoundConfig::default()
    }));
    out
}
