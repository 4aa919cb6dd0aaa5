//! Revised simplex with column generation for the decomposition program
//!
//! ```text
//! minimize    sum(lambda) + sum(alpha) + sum(beta)
//! subject to  sum lambda_(e,d) e d^T + alpha - beta = U,  all variables >= 0,
//! ```
//!
//! over sign vectors `e`, `d`. Its optimum is the projective norm of `U` in
//! `l_inf^m (x) l_inf^n`, and the optimal simplex prices form a dual matrix
//! `B` with `sup e^T B d <= 1`.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Column {
    /// `sign * e_r` for a flattened index `r`.
    Coord { r: usize, sign: f64 },
    /// `e d^T`.
    Elem { e: Vec<i8>, d: Vec<i8> },
}

impl Column {
    fn negated(self) -> Self {
        match self {
            Column::Coord { r, sign } => Column::Coord { r, sign: -sign },
            Column::Elem { e, d } => Column::Elem {
                e: e.into_iter().map(|x| -x).collect(),
                d,
            },
        }
    }

    fn dense(&self, m: usize, n: usize) -> DVector<f64> {
        let mut v = DVector::zeros(m * n);
        match self {
            Column::Coord { r, sign } => v[*r] = *sign,
            Column::Elem { e, d } => {
                for i in 0..m {
                    for j in 0..n {
                        v[i * n + j] = (e[i] * d[j]) as f64;
                    }
                }
            }
        }
        v
    }
}

pub(crate) struct LpSolution {
    pub value: f64,
    pub prices: DMatrix<f64>,
    pub terms: Vec<(f64, Column)>,
    pub iterations: usize,
}

const OPT_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-12;
const REFACTOR_EVERY: usize = 40;
const SMOOTHING: f64 = 0.7;

/// `max_e ||B^T e||_1` together with a maximizing `(e, d)`; enumerates the
/// shorter side.
pub(crate) fn injective_dual_norm(b: &DMatrix<f64>) -> (f64, Vec<i8>, Vec<i8>) {
    let (m, n) = b.shape();
    if m == 0 || n == 0 {
        return (0.0, vec![1; m], vec![1; n]);
    }
    let live_rows: Vec<usize> = (0..m).filter(|&i| b.row(i).iter().any(|x| *x != 0.0)).collect();
    let live_cols: Vec<usize> = (0..n).filter(|&j| b.column(j).iter().any(|x| *x != 0.0)).collect();
    if live_rows.len() < m || live_cols.len() < n {
        let sub = b.select_rows(&live_rows).select_columns(&live_cols);
        let (best, rs, cs) = injective_dual_norm(&sub);
        let mut row_signs = vec![1i8; m];
        let mut col_signs = vec![1i8; n];
        live_rows.iter().zip(rs).for_each(|(&i, s)| row_signs[i] = s);
        live_cols.iter().zip(cs).for_each(|(&j, s)| col_signs[j] = s);
        return (best, row_signs, col_signs);
    }
    let (short, long, transposed) = if m <= n { (m, n, false) } else { (n, m, true) };
    let entry = |s: usize, l: usize| if transposed { b[(l, s)] } else { b[(s, l)] };
    let mut sums = vec![0.0f64; long];
    // start from all +1 and walk a Gray code, so each step flips one sign
    for (l, acc) in sums.iter_mut().enumerate() {
        *acc = (0..short).map(|s| entry(s, l)).sum();
    }
    let mut signs = vec![1i8; short];
    let mut best = sums.iter().map(|x| x.abs()).sum::<f64>();
    let mut best_signs = signs.clone();
    for k in 1u64..1 << (short - 1) {
        let flip = k.trailing_zeros() as usize;
        signs[flip] = -signs[flip];
        let f = 2.0 * signs[flip] as f64;
        for (l, acc) in sums.iter_mut().enumerate() {
            *acc += f * entry(flip, l);
        }
        let v = sums.iter().map(|x| x.abs()).sum::<f64>();
        if v > best {
            best = v;
            best_signs = signs.clone();
        }
    }
    let other: Vec<i8> = (0..long)
        .map(|l| {
            let s: f64 = (0..short).map(|s| best_signs[s] as f64 * entry(s, l)).sum();
            if s < 0.0 {
                -1
            } else {
                1
            }
        })
        .collect();
    if transposed {
        (best, other, best_signs)
    } else {
        (best, best_signs, other)
    }
}

pub(crate) fn solve(u: &DMatrix<f64>, max_iter: usize) -> Result<LpSolution, Error> {
    let (m, n) = u.shape();
    let size = m * n;
    let b: DVector<f64> = DVector::from_iterator(size, (0..m).flat_map(|i| (0..n).map(move |j| u[(i, j)])));
    let mut basis: Vec<Column> = (0..size)
        .map(|r| Column::Coord {
            r,
            sign: if b[r] < 0.0 { -1.0 } else { 1.0 },
        })
        .collect();
    let mut binv = DMatrix::<f64>::zeros(size, size);
    for r in 0..size {
        binv[(r, r)] = if b[r] < 0.0 { -1.0 } else { 1.0 };
    }
    let mut x: DVector<f64> = b.abs();
    let ones = DVector::<f64>::from_element(size, 1.0);
    // best dual point so far, by the lower bound it proves
    let mut center: Option<(f64, DMatrix<f64>)> = None;
    for iter in 0..max_iter {
        if iter > 0 && iter % REFACTOR_EVERY == 0 {
            let mut bm = DMatrix::<f64>::zeros(size, size);
            for (k, c) in basis.iter().enumerate() {
                bm.set_column(k, &c.dense(m, n));
            }
            binv = bm
                .try_inverse()
                .ok_or_else(|| Error::Lp("basis became singular".into()))?;
            x = &binv * &b;
        }
        let y = binv.transpose() * &ones;
        let prices = DMatrix::from_fn(m, n, |i, j| y[i * n + j]);

        // pricing: coordinate columns, then the best elementary tensor
        let mut entering: Option<(f64, Column)> = None;
        for r in 0..size {
            let red = 1.0 - y[r].abs();
            if red < -OPT_TOL && entering.as_ref().is_none_or(|(best, _)| red < *best) {
                let sign = if y[r] < 0.0 { -1.0 } else { 1.0 };
                entering = Some((red, Column::Coord { r, sign }));
            }
        }
        let (best, mut e, mut d) = injective_dual_norm(&prices);
        let bound = prices.dot(u) / best.max(1.0);
        if center.as_ref().is_none_or(|(c, _)| bound > *c) {
            center = Some((bound, prices.clone()));
        }
        let mut red = 1.0 - best;
        if red < -OPT_TOL {
            // price at a point between the current and the best duals
            let (_, c) = center.as_ref().expect("set above");
            let mixed = c * SMOOTHING + &prices * (1.0 - SMOOTHING);
            let (_, se, sd) = injective_dual_norm(&mixed);
            let col = Column::Elem { e: se, d: sd };
            let r = 1.0 - col.dense(m, n).dot(&y);
            if r < -OPT_TOL {
                red = r;
                let Column::Elem { e: se, d: sd } = col else {
                    unreachable!()
                };
                (e, d) = (se, sd);
            }
        }
        if red < -OPT_TOL && entering.as_ref().is_none_or(|(b, _)| red < *b) {
            entering = Some((red, Column::Elem { e, d }));
        }
        let Some((_, col)) = entering else {
            // a tiny negative weight left by rounding is a flipped column
            let value = x.abs().sum();
            let terms = basis
                .into_iter()
                .zip(x.iter())
                .filter(|(_, v)| v.abs() > 1e-14)
                .map(|(c, &v)| if v < 0.0 { (-v, c.negated()) } else { (v, c) })
                .collect();
            return Ok(LpSolution {
                value,
                prices,
                terms,
                iterations: iter,
            });
        };
        let a = col.dense(m, n);
        let w = &binv * &a;
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..size {
            if w[i] > PIVOT_TOL {
                let ratio = x[i].max(0.0) / w[i];
                let better = match leave {
                    None => true,
                    Some((k, t)) => ratio < t - 1e-15 || (ratio <= t + 1e-15 && w[i] > w[k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, theta) = leave.ok_or_else(|| Error::Lp("unbounded direction".into()))?;
        for i in 0..size {
            x[i] -= theta * w[i];
        }
        x[r] = theta;
        let pivot = w[r];
        let row_r: Vec<f64> = (0..size).map(|j| binv[(r, j)] / pivot).collect();
        for i in 0..size {
            if i == r {
                continue;
            }
            let f = w[i];
            if f != 0.0 {
                for j in 0..size {
                    binv[(i, j)] -= f * row_r[j];
                }
            }
        }
        for j in 0..size {
            binv[(r, j)] = row_r[j];
        }
        basis[r] = col;
    }
    Err(Error::Lp(format!("no convergence after {max_iter} iterations")))
}
