//! One line per acceptance criterion, written straight to stderr so that it
//! shows up in the test log even when the criterion passes.

use std::io::Write;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tensorlab_core::harness::{lower_bound_trial, rademacher_family, sharpness_instance, GrothConfig, SharpnessConfig};
use tensorlab_core::schreier::{member, members_within, node_rank, node_rank_brute};
use tensorlab_core::space::{default_selector, pair, rademacher, weak2_norm_sq_measures};
use tensorlab_core::tensor::{eps_norm, pi_norm, weak_1_norm_pi, weak_2_norm_pi_lower, LpBudget, GROTHENDIECK_BOUND};
use tensorlab_core::weights::{convexity_sums, square_sums};
use tensorlab_core::{DualCertificate, Family, FiniteSet, Limits, Ordinal, StepFunction, TGamma, TensorMatrix};

// criteria run one at a time so their runtimes are not shared
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn line(id: u32, name: &str, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(
        err,
        "criterion {id:>2} {verdict} [{:.2}s] {name}: {detail}",
        elapsed.as_secs_f64()
    );
}

fn subsets(n: u64) -> impl Iterator<Item = FiniteSet> {
    (0u32..1 << n).map(move |bits| FiniteSet::new((1..=n).filter(|i| bits >> (i - 1) & 1 == 1).collect()).unwrap())
}

fn xi_values() -> Vec<Ordinal> {
    vec![
        Ordinal::zero(),
        Ordinal::one(),
        Ordinal::nat(2),
        Ordinal::nat(3),
        Ordinal::omega(),
        Ordinal::omega().successor(),
    ]
}

/// Every reachable block in criteria 1 and 2 has at most 2046 elements and
/// every other one is astronomically long, so a smaller cap changes no
/// verdict and only shortens the walk to the first overflow.
fn block_limits() -> Limits {
    Limits {
        max_block_len: 1 << 16,
        ..Limits::default()
    }
}

#[test]
fn criterion_01_convexity_of_p() {
    let _guard = serial();
    let t = Instant::now();
    let limits = block_limits();
    let mut wrong = Vec::new();
    let mut infeasible = Vec::new();
    let mut exact = 0;
    for xi in xi_values() {
        for start in 2u64..=6 {
            match convexity_sums(&xi, start.., 3, &limits) {
                Ok(sums) => {
                    if sums.iter().all(|s| s.is_one()) {
                        exact += 1;
                    } else {
                        wrong.push(format!("xi={xi} start={start}"));
                    }
                }
                Err(e) => infeasible.push(format!("xi={xi} start={start} ({e})")),
            }
        }
    }
    let elapsed = t.elapsed();
    let pass = wrong.is_empty() && infeasible.is_empty() && elapsed < Duration::from_secs(5);
    line(
        1,
        "sum of p over three blocks is exactly 1",
        pass,
        elapsed,
        &format!(
            "{exact}/30 cells exact, wrong: [{}], beyond budget: [{}]",
            wrong.join("; "),
            infeasible.join("; ")
        ),
    );
    assert!(wrong.is_empty(), "{wrong:?}");
    assert!(infeasible.is_empty(), "{} cells beyond budget", infeasible.len());
    assert!(elapsed < Duration::from_secs(5));
}

#[test]
fn criterion_02_square_convexity_of_q() {
    let _guard = serial();
    let t = Instant::now();
    let limits = block_limits();
    let mut wrong = Vec::new();
    let mut infeasible = Vec::new();
    let mut exact = 0;
    for xi in 0u64..=2 {
        for zeta in 0u64..=2 {
            for start in 2u64..=6 {
                match square_sums(&Ordinal::nat(xi), &Ordinal::nat(zeta), start.., 3, &limits) {
                    Ok(sums) => {
                        if sums.iter().all(|s| s.q_constant && s.value.is_one()) {
                            exact += 1;
                        } else {
                            wrong.push(format!("xi={xi} zeta={zeta} start={start}"));
                        }
                    }
                    Err(e) => infeasible.push(format!("xi={xi} zeta={zeta} start={start} ({e})")),
                }
            }
        }
    }
    let elapsed = t.elapsed();
    let pass = wrong.is_empty() && infeasible.is_empty() && elapsed < Duration::from_secs(10);
    line(
        2,
        "sum over segments of (q times sum p)^2 is exactly 1",
        pass,
        elapsed,
        &format!(
            "{exact}/45 cells exact, wrong: [{}], beyond budget: [{}]",
            wrong.join("; "),
            infeasible.join("; ")
        ),
    );
    assert!(wrong.is_empty(), "{wrong:?}");
    assert!(infeasible.is_empty(), "{} cells beyond budget", infeasible.len());
    assert!(elapsed < Duration::from_secs(10));
}

fn regular_families() -> Vec<Family> {
    vec![
        Family::base(1u64),
        Family::base(2u64),
        Family::base(3u64),
        Family::base(Ordinal::omega()),
        Family::base(Ordinal::omega().successor()),
        Family::conv(1u64, 1u64),
        Family::conv(2u64, 1u64),
    ]
}

#[test]
fn criterion_03_hereditary_and_spreading() {
    let _guard = serial();
    let t = Instant::now();
    let all: Vec<FiniteSet> = subsets(10).collect();
    let mut violations = Vec::new();
    for fam in regular_families() {
        let members: Vec<&FiniteSet> = all.iter().filter(|s| member(&fam, s)).collect();
        for f in &members {
            // hereditary: dropping one element at a time suffices
            for skip in 0..f.len() {
                let mut v = f.as_slice().to_vec();
                v.remove(skip);
                if !member(&fam, &FiniteSet::new(v).unwrap()) {
                    violations.push(format!("{fam} not hereditary at {f}"));
                }
            }
        }
        // spreading: E member, G in [1,10] the same size and G >= E pointwise
        for e in &members {
            for g in all.iter().filter(|g| g.len() == e.len()) {
                let dominates = e.as_slice().iter().zip(g.as_slice()).all(|(a, b)| a <= b);
                if dominates && !member(&fam, g) {
                    violations.push(format!("{fam}: spread {g} of {e}"));
                }
            }
        }
    }
    let elapsed = t.elapsed();
    let pass = violations.is_empty() && elapsed < Duration::from_secs(30);
    line(
        3,
        "seven families hereditary and spreading on [1,10]",
        pass,
        elapsed,
        &format!("{} violations", violations.len()),
    );
    assert!(violations.is_empty(), "{:?}", &violations[..violations.len().min(5)]);
    assert!(elapsed < Duration::from_secs(30));
}

#[test]
fn criterion_04_successor_is_convolution() {
    let _guard = serial();
    let t = Instant::now();
    let mut disagreements = 0;
    for xi in 0u64..=2 {
        let (a, b) = (Family::base(xi + 1), Family::conv(1u64, xi));
        disagreements += subsets(10).filter(|s| member(&a, s) != member(&b, s)).count();
    }
    let pass = disagreements == 0;
    line(
        4,
        "S[xi+1] equals S[1][S[xi]] on [1,10] for xi = 0, 1, 2",
        pass,
        t.elapsed(),
        &format!("{disagreements} disagreements over 3 x 1024 sets"),
    );
    assert_eq!(disagreements, 0);
}

/// Maximal branches of the truncated tree.
fn maximal_branches(t: &TGamma, bound: u64) -> Vec<Vec<Ordinal>> {
    let tree = t.materialize(bound, 1 << 16).unwrap();
    tree.paths().into_iter().filter(|p| t.is_maximal(p).unwrap()).collect()
}

fn trees() -> [TGamma; 2] {
    [
        TGamma::new(Ordinal::one()).unwrap(),
        TGamma::new(Ordinal::nat(2)).unwrap(),
    ]
}

#[test]
fn criterion_05_biorthogonality() {
    let _guard = serial();
    let t = Instant::now();
    let mut branches = 0;
    let mut bad = Vec::new();
    for tree in trees() {
        for b in maximal_branches(&tree, 4) {
            branches += 1;
            let scheme = tree.cantor_scheme(&b).unwrap();
            let mus = rademacher(&scheme, &default_selector(&scheme)).unwrap();
            let fs: Vec<StepFunction> = (1..=b.len()).map(|k| tree.function(&b[..k]).unwrap()).collect();
            for (j, mu) in mus.iter().enumerate() {
                for (i, f) in fs.iter().enumerate() {
                    let v = pair(mu, f).unwrap();
                    let want = if i == j { v.is_one() } else { v.is_zero() };
                    if !want {
                        bad.push(format!("{tree} {b:?}: <mu_{}, f_{}> = {v}", j + 1, i + 1));
                    }
                }
            }
        }
    }
    let elapsed = t.elapsed();
    let pass = bad.is_empty() && elapsed < Duration::from_secs(5);
    line(
        5,
        "Rademacher measures biorthogonal to the tree functions",
        pass,
        elapsed,
        &format!(
            "{branches} maximal branches of T[1], T[2] with indices up to 4, {} failures",
            bad.len()
        ),
    );
    assert!(bad.is_empty(), "{bad:?}");
    assert!(elapsed < Duration::from_secs(5));
}

#[test]
fn criterion_06_rademacher_weak_two() {
    let _guard = serial();
    let t = Instant::now();
    let mut worst = num_rational::BigRational::zero();
    let mut checked = 0;
    for tree in trees() {
        for b in maximal_branches(&tree, 4).into_iter().filter(|b| b.len() <= 3) {
            let scheme = tree.cantor_scheme(&b).unwrap();
            let mus = rademacher(&scheme, &default_selector(&scheme)).unwrap();
            let v = weak2_norm_sq_measures(&mus).unwrap();
            if v > worst {
                worst = v;
            }
            checked += 1;
        }
    }
    let pass = checked > 0 && worst <= num_rational::BigRational::one();
    line(
        6,
        "weak-2 norm of Rademacher measures at most 1, depth up to 3",
        pass,
        t.elapsed(),
        &format!("{checked} schemes, largest squared norm {worst}"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_sharpness() {
    let _guard = serial();
    let mut all = true;
    for (xi, zeta, start) in [(0u64, 0u64, 3u64), (1, 0, 3), (1, 1, 2)] {
        let t = Instant::now();
        let cfg = SharpnessConfig::new(Ordinal::nat(xi), Ordinal::nat(zeta), start);
        let (pass, detail) = match sharpness_instance(&cfg) {
            Ok(o) => {
                let elapsed = t.elapsed();
                (
                    o.pairing_is_one && o.lp_lower >= 1.0 - 1e-9 && elapsed < Duration::from_secs(60),
                    format!(
                        "block of {} elements in {} segments, pairing {:?}, LP lower bound {:.9} on {} columns",
                        o.block.len(),
                        o.segments.len(),
                        o.pairing,
                        o.lp_lower,
                        o.lp_columns
                    ),
                )
            }
            Err(e) => (false, e.to_string()),
        };
        all &= pass;
        line(
            7,
            &format!("sharpness at xi={xi}, zeta={zeta}, start {start}"),
            pass,
            t.elapsed(),
            &detail,
        );
    }
    assert!(all);
}

#[test]
fn criterion_08_lower_bound_configurations() {
    let _guard = serial();
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    let trials = 16;
    for k in 0..trials {
        match lower_bound_trial(&mut rng) {
            Ok(tr) => {
                worst = worst.min(tr.lp_lower);
                if !tr.pairing_is_one || tr.lp_lower < 1.0 - 1e-9 {
                    failures.push(format!("trial {k}: {tr:?}"));
                }
            }
            Err(e) => failures.push(format!("trial {k}: {e}")),
        }
    }
    let pass = failures.is_empty();
    line(
        8,
        "random biorthogonal configurations have projective norm at least 1",
        pass,
        t.elapsed(),
        &format!(
            "{trials} trials, smallest certified bound {worst:.9}, {} failures",
            failures.len()
        ),
    );
    assert!(pass, "{failures:?}");
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> TensorMatrix {
    TensorMatrix::from_rows(
        &(0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect::<Vec<Vec<f64>>>(),
    )
    .unwrap()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

#[test]
fn criterion_09_norm_engine() {
    let _guard = serial();
    let t = Instant::now();
    let id = TensorMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let p = pi_norm(&id).unwrap();
    // explicit decomposition of cost 1 and a dual form of norm 1 pairing to 1
    let decomposition = TensorMatrix::elementary(&[1.0, 1.0], &[1.0, 1.0])
        .scaled(0.5)
        .plus(&TensorMatrix::elementary(&[1.0, -1.0], &[1.0, -1.0]).scaled(0.5))
        .unwrap();
    let form = DualCertificate::new(TensorMatrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap());
    let oracle_ok = decomposition == id && form.bound <= 1.0 && form.lower_bound(&id).unwrap() == 1.0;
    let identity_ok = (p.value - 1.0).abs() <= 1e-8 && oracle_ok;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut order_bad = 0;
    for _ in 0..200 {
        let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let u = random_matrix(&mut rng, m, n);
        if eps_norm(&u) > pi_norm(&u).unwrap().value + 1e-9 {
            order_bad += 1;
        }
    }
    let mut cross_worst: f64 = 0.0;
    for _ in 0..200 {
        let (m, n) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let u = TensorMatrix::elementary(&x, &y);
        let want = sup(&x) * sup(&y);
        cross_worst = cross_worst
            .max((pi_norm(&u).unwrap().value - want).abs())
            .max((eps_norm(&u) - want).abs());
    }
    let pass = identity_ok && order_bad == 0 && cross_worst <= 1e-9;
    line(
        9,
        "projective and injective norm engine",
        pass,
        t.elapsed(),
        &format!(
            "identity {:.12} (oracle {oracle_ok}), eps > pi on {order_bad}/200, cross-norm error {cross_worst:.2e}",
            p.value
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_weak_norm_bounds() {
    let _guard = serial();
    let t = Instant::now();
    let budget = LpBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut disjoint_worst: f64 = 0.0;
    for k in 1..=8usize {
        for _ in 0..2 {
            // x_n on coordinates 2n, 2n+1 and y_n on coordinate n
            let us: Vec<TensorMatrix> = (0..k)
                .map(|n| {
                    let mut x = vec![0.0; 2 * k];
                    x[2 * n] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    x[2 * n + 1] = rng.gen_range(-1.0..1.0);
                    let mut y = vec![0.0; k];
                    y[n] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    TensorMatrix::elementary(&x, &y)
                })
                .collect();
            disjoint_worst = disjoint_worst.max(weak_1_norm_pi(&us, &budget).unwrap().value);
        }
    }
    let cfg = GrothConfig::default();
    let fs = rademacher_family(cfg.count);
    let mut groth_worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let us: Vec<TensorMatrix> = fs
            .iter()
            .map(|f| {
                let g: Vec<f64> = (0..cfg.width).map(|_| rng.gen_range(-1.0..1.0)).collect();
                TensorMatrix::elementary(f, &g)
            })
            .collect();
        groth_worst = groth_worst.max(
            weak_2_norm_pi_lower(&us, cfg.restarts, rng.gen(), &budget)
                .unwrap()
                .value,
        );
    }
    let pass = disjoint_worst <= 1.0 + 1e-9 && groth_worst <= GROTHENDIECK_BOUND;
    line(
        10,
        "disjoint weak-1 at most 1 and Rademacher weak-2 below the Grothendieck bound",
        pass,
        t.elapsed(),
        &format!(
            "largest disjoint weak-1 {disjoint_worst:.12} (k up to 8), largest weak-2 lower bound {groth_worst:.6} <= {GROTHENDIECK_BOUND}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_11_rank_oracles() {
    let _guard = serial();
    let t = Instant::now();
    let limits = Limits::default();
    let s1 = Family::base(1u64);
    let mut rank_bad = Vec::new();
    let mut members = 0;
    for e in subsets(10).filter(|e| !e.is_empty() && member(&s1, e)) {
        members += 1;
        let closed = node_rank(&s1, &e, 20, &limits).unwrap();
        let brute = node_rank_brute(&s1, &e, 20, &limits).unwrap();
        if closed != brute || closed != e.minimum().unwrap() - e.len() as u64 {
            rank_bad.push(format!("{e}: closed {closed}, brute {brute}"));
        }
    }
    debug_assert_eq!(members + 1, members_within(&s1, 10).len());
    let mut nodes = 0;
    let mut tree_bad = Vec::new();
    for tree in trees() {
        for bound in 1..=4 {
            let m = tree.materialize(bound, 1 << 18).unwrap();
            let ranks = m.node_ranks();
            for (id, r) in ranks.iter().enumerate() {
                nodes += 1;
                let p = m.path(id);
                if tree.g_rank_truncated(&p, bound).unwrap() != *r {
                    tree_bad.push(format!("{tree} bound {bound} node {p:?}"));
                }
            }
            if m.rank_finite() != tree.truncated_rank(bound) {
                tree_bad.push(format!("{tree} bound {bound}: tree rank"));
            }
        }
    }
    let pass = rank_bad.is_empty() && tree_bad.is_empty();
    line(
        11,
        "closed-form and tree ranks agree with brute force",
        pass,
        t.elapsed(),
        &format!(
            "{members} members of S[1] in [1,10], {nodes} tree nodes, {} mismatches",
            rank_bad.len() + tree_bad.len()
        ),
    );
    assert!(pass, "{rank_bad:?} {tree_bad:?}");
}
