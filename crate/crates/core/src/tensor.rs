//! Injective and projective norms of tensors in `l_inf^m (x) l_inf^n`, and
//! weak-p norms of finite families.
//!
//! A tensor is an `m x n` matrix. Its injective norm is the largest entry in
//! absolute value; the projective norm is computed by linear programming and
//! comes with a dual certificate that proves the lower bound independently
//! of the solver.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::lp;
use crate::weights::VectorSpace;

/// Upper bound for the Grothendieck constant used by the probes.
pub const GROTHENDIECK_BOUND: f64 = 1.78222;

#[derive(Clone, PartialEq, Debug)]
pub struct TensorMatrix(pub DMatrix<f64>);

impl TensorMatrix {
    pub fn zeros(m: usize, n: usize) -> Self {
        TensorMatrix(DMatrix::zeros(m, n))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, Error> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(TensorMatrix(DMatrix::from_fn(m, n, |i, j| rows[i][j])))
    }

    /// `x (x) y`.
    pub fn elementary(x: &[f64], y: &[f64]) -> Self {
        TensorMatrix(DMatrix::from_fn(x.len(), y.len(), |i, j| x[i] * y[j]))
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.0.nrows())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn scaled(&self, c: f64) -> Self {
        TensorMatrix(&self.0 * c)
    }

    pub fn plus(&self, other: &TensorMatrix) -> Result<Self, Error> {
        if self.shape() != other.shape() {
            return Err(Error::Shape("tensor shapes differ".into()));
        }
        Ok(TensorMatrix(&self.0 + &other.0))
    }

    pub fn inner(&self, other: &TensorMatrix) -> Result<f64, Error> {
        if self.shape() != other.shape() {
            return Err(Error::Shape("tensor shapes differ".into()));
        }
        Ok(self.0.component_mul(&other.0).sum())
    }
}

impl VectorSpace for TensorMatrix {
    fn add_scaled(&mut self, c: f64, other: &Self) -> Result<(), Error> {
        if self.shape() != other.shape() {
            return Err(Error::Shape("tensor shapes differ".into()));
        }
        self.0 += &other.0 * c;
        Ok(())
    }
}

impl Serialize for TensorMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TensorMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        TensorMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for TensorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

pub fn eps_norm(u: &TensorMatrix) -> f64 {
    u.0.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// A matrix `B` acting on tensors by `<B, U> = sum B_ij U_ij`, with `bound`
/// the exactly enumerated value of `max_(e,d) e^T B d`. Every tensor
/// satisfies `pi(U) >= <B, U> / max(bound, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCertificate {
    pub b: TensorMatrix,
    pub bound: f64,
}

impl DualCertificate {
    pub fn new(b: TensorMatrix) -> Self {
        let (bound, _, _) = lp::injective_dual_norm(&b.0);
        DualCertificate { b, bound }
    }

    /// The certified lower bound for `pi(u)`.
    pub fn lower_bound(&self, u: &TensorMatrix) -> Result<f64, Error> {
        Ok(pair_dual(u, self)? / self.bound.max(1.0))
    }
}

pub fn pair_dual(u: &TensorMatrix, cert: &DualCertificate) -> Result<f64, Error> {
    u.inner(&cert.b)
}

/// Problem size accepted by [`pi_norm`] after duplicate and zero rows and
/// columns are removed.
#[derive(Clone, Copy, Debug)]
pub struct LpBudget {
    pub max_entries: usize,
    pub max_short_side: usize,
    pub max_iterations: usize,
}

impl Default for LpBudget {
    fn default() -> Self {
        LpBudget {
            max_entries: 256,
            max_short_side: 16,
            max_iterations: 20_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PiNorm {
    /// Cost of the decomposition found; an upper bound.
    pub value: f64,
    /// Lower bound proved by the certificate.
    pub lower: f64,
    pub certificate: DualCertificate,
    /// Number of elementary tensors in the decomposition.
    pub terms: usize,
    pub iterations: usize,
}

/// For every original row: its representative and sign, or `None` if zero.
type RowMap = Vec<Option<(usize, f64)>>;

/// Groups equal rows up to sign, drops zero rows.
fn reduce_rows(rows: &[Vec<f64>]) -> (Vec<Vec<f64>>, RowMap) {
    let mut reps: Vec<Vec<f64>> = Vec::new();
    let mut map = Vec::with_capacity(rows.len());
    for r in rows {
        let Some(first) = r.iter().find(|x| **x != 0.0) else {
            map.push(None);
            continue;
        };
        let s = if *first < 0.0 { -1.0 } else { 1.0 };
        let norm: Vec<f64> = r.iter().map(|x| x * s).collect();
        let k = match reps.iter().position(|p| *p == norm) {
            Some(k) => k,
            None => {
                reps.push(norm);
                reps.len() - 1
            }
        };
        map.push(Some((k, s)));
    }
    (reps, map)
}

pub fn pi_norm(u: &TensorMatrix) -> Result<PiNorm, Error> {
    pi_norm_with(u, &LpBudget::default())
}

pub fn pi_norm_with(u: &TensorMatrix, budget: &LpBudget) -> Result<PiNorm, Error> {
    let (m, n) = u.shape();
    let (rows, row_map) = reduce_rows(&u.rows());
    let cols_t: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let (cols, col_map) = reduce_rows(&cols_t);
    let (rm, rn) = (rows.len(), cols.len());
    if rm == 0 || rn == 0 {
        return Ok(PiNorm {
            value: 0.0,
            lower: 0.0,
            certificate: DualCertificate::new(TensorMatrix::zeros(m, n)),
            terms: 0,
            iterations: 0,
        });
    }
    if rm * rn > budget.max_entries || rm.min(rn) > budget.max_short_side {
        return Err(Error::Budget(format!(
            "reduced tensor is {rm} x {rn}, beyond {} entries or short side {}",
            budget.max_entries, budget.max_short_side
        )));
    }
    let reduced = DMatrix::from_fn(rm, rn, |i, j| cols[j][i]);
    let sol = lp::solve(&reduced, budget.max_iterations)?;
    // lift the prices back: one representative per class carries them
    let mut b = DMatrix::<f64>::zeros(m, n);
    let mut row_seen = vec![false; rm];
    for (i, rmap) in row_map.iter().enumerate() {
        let Some((ri, rs)) = *rmap else { continue };
        if std::mem::replace(&mut row_seen[ri], true) {
            continue;
        }
        let mut col_seen = vec![false; rn];
        for (j, cmap) in col_map.iter().enumerate() {
            let Some((cj, cs)) = *cmap else { continue };
            if std::mem::replace(&mut col_seen[cj], true) {
                continue;
            }
            b[(i, j)] = sol.prices[(ri, cj)] * rs * cs;
        }
    }
    let certificate = DualCertificate::new(TensorMatrix(b));
    let lower = certificate.lower_bound(u)?;
    Ok(PiNorm {
        value: sol.value,
        lower,
        certificate,
        terms: sol.terms.len(),
        iterations: sol.iterations,
    })
}

/// `sup over unit x* of (sum |x*(x_n)|^p)^(1/p)` for vectors of `l_inf^N`,
/// attained at a coordinate functional.
pub fn weak_p_norm_vec(xs: &[Vec<f64>], p: f64) -> Result<f64, Error> {
    if p < 1.0 {
        return Err(Error::Config("p must be at least 1".into()));
    }
    let len = xs.first().map_or(0, |x| x.len());
    if xs.iter().any(|x| x.len() != len) {
        return Err(Error::Shape("vectors of different lengths".into()));
    }
    Ok((0..len)
        .map(|j| xs.iter().map(|x| x[j].abs().powf(p)).sum::<f64>().powf(1.0 / p))
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakNorm {
    pub value: f64,
    /// The coefficients at which the value was attained.
    pub coefficients: Vec<f64>,
}

/// Whether no row (or no column) carries entries of two different tensors.
/// Then any sign pattern is undone by flipping coordinates, an isometry.
fn separated_supports(us: &[TensorMatrix]) -> bool {
    let (m, n) = us[0].shape();
    let owners = |len: usize, nonzero: &dyn Fn(&TensorMatrix, usize) -> bool| {
        (0..len).all(|i| us.iter().filter(|u| nonzero(u, i)).count() <= 1)
    };
    owners(m, &|u, i| u.0.row(i).iter().any(|x| *x != 0.0))
        || owners(n, &|u, j| u.0.column(j).iter().any(|x| *x != 0.0))
}

/// `max over signs of pi(sum e_n u_n)`, by enumerating all signs with the
/// first one fixed. Families with separated row or column supports need
/// only one sign pattern.
pub fn weak_1_norm_pi(us: &[TensorMatrix], budget: &LpBudget) -> Result<WeakNorm, Error> {
    let k = us.len();
    if k == 0 {
        return Ok(WeakNorm {
            value: 0.0,
            coefficients: Vec::new(),
        });
    }
    if k > 16 {
        return Err(Error::Budget(format!("{k} tensors for sign enumeration")));
    }
    if us.iter().any(|u| u.shape() != us[0].shape()) {
        return Err(Error::Shape("tensors of different shapes".into()));
    }
    let mut best = WeakNorm {
        value: f64::NEG_INFINITY,
        coefficients: Vec::new(),
    };
    let patterns = if separated_supports(us) { 1 } else { 1u32 << (k - 1) };
    for bits in 0..patterns {
        let signs: Vec<f64> = (0..k)
            .map(|i| if i > 0 && bits >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        let v = pi_norm_with(&combination(us, &signs)?, budget)?.value;
        if v > best.value {
            best = WeakNorm {
                value: v,
                coefficients: signs,
            };
        }
    }
    Ok(best)
}

pub fn combination(us: &[TensorMatrix], coeffs: &[f64]) -> Result<TensorMatrix, Error> {
    let (m, n) = us.first().map_or((0, 0), |u| u.shape());
    let mut acc = TensorMatrix::zeros(m, n);
    for (u, c) in us.iter().zip(coeffs) {
        acc.add_scaled(*c, u)?;
    }
    Ok(acc)
}

/// Random starts used by [`weak_2_norm_pi_lower`] when the caller has no
/// preference.
pub const DEFAULT_RESTARTS: usize = 64;

/// A certified lower bound for `sup over unit a of pi(sum a_n u_n)`.
///
/// The search starts from all ones, from every coordinate and from
/// `restarts - 1` seeded random directions. From each start the coefficients
/// are improved by `a <- g / |g|` with `g_n = <B, u_n>`, `B` the normalized
/// certificate at `a`; the certified value never decreases along the way.
pub fn weak_2_norm_pi_lower(
    us: &[TensorMatrix],
    restarts: usize,
    seed: u64,
    budget: &LpBudget,
) -> Result<WeakNorm, Error> {
    let k = us.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = WeakNorm {
        value: 0.0,
        coefficients: vec![0.0; k],
    };
    if k == 0 {
        return Ok(best);
    }
    // all ones, then each coordinate, then random directions
    for start in 0..restarts.max(1) + k {
        let mut a: Vec<f64> = match start {
            0 => vec![1.0; k],
            s if s <= k => (0..k).map(|n| if n + 1 == s { 1.0 } else { 0.0 }).collect(),
            _ => (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        a.iter_mut().for_each(|x| *x /= norm);
        let mut last = f64::NEG_INFINITY;
        for _ in 0..60 {
            let w = combination(us, &a)?;
            let pi = pi_norm_with(&w, budget)?;
            if pi.lower > best.value {
                best = WeakNorm {
                    value: pi.lower,
                    coefficients: a.clone(),
                };
            }
            if pi.lower <= last + 1e-10 {
                break;
            }
            last = pi.lower;
            let scale = pi.certificate.bound.max(1.0);
            let g: Vec<f64> = us
                .iter()
                .map(|u| Ok(pair_dual(u, &pi.certificate)? / scale))
                .collect::<Result<_, Error>>()?;
            let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gn == 0.0 {
                break;
            }
            a = g.iter().map(|x| x / gn).collect();
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(rows: &[&[f64]]) -> TensorMatrix {
        TensorMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_2x2() {
        let u = t(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let p = pi_norm(&u).unwrap();
        assert!((p.value - 1.0).abs() < 1e-8, "{p:?}");
        assert!((p.lower - 1.0).abs() < 1e-8);
        assert_eq!(eps_norm(&u), 1.0);
    }

    #[test]
    fn hadamard_2x2() {
        let u = t(&[&[1.0, 1.0], &[1.0, -1.0]]);
        let p = pi_norm(&u).unwrap();
        assert!((p.value - 2.0).abs() < 1e-8);
        assert!((p.lower - 2.0).abs() < 1e-8);
    }

    #[test]
    fn elementary_tensor() {
        let u = TensorMatrix::elementary(&[0.5, -1.0, 0.25], &[1.0, 0.3]);
        let p = pi_norm(&u).unwrap();
        assert!((p.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn weak_p_columns() {
        let xs = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!((weak_p_norm_vec(&xs, 2.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicates_do_not_change_the_norm() {
        let u = t(&[&[1.0, 1.0], &[1.0, -1.0], &[-1.0, -1.0], &[0.0, 0.0]]);
        let p = pi_norm(&u).unwrap();
        assert!((p.value - 2.0).abs() < 1e-8);
        assert!((p.lower - 2.0).abs() < 1e-8);
    }
}
