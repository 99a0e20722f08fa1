//! Dense complex linear solves at working precision.

use thiserror::Error;

use crate::numeric::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, right-hand side has {rhs} entries")]
    Shape { rows: usize, cols: usize, rhs: usize },
    #[error("numerical rank {rank} below column count {cols}")]
    RankDeficient { rank: usize, cols: usize },
}

#[derive(Clone, Debug)]
pub struct LinearSolution<T> {
    pub x: Vec<T>,
    /// Number of pivots above the rank threshold.
    pub rank: usize,
    /// `log2(max |pivot| / min |pivot|)`, a cheap condition estimate.
    pub log2_condition: f64,
}

/// Pivots smaller than `2^-tol_bits` times the largest matrix entry count as zero.
pub fn default_rank_tolerance(prec: u32) -> f64 {
    0.75 * prec as f64
}

fn max_log2<T: Scalar>(a: &[Vec<T>]) -> f64 {
    a.iter().flatten().map(|v| v.log2_abs()).fold(f64::NEG_INFINITY, f64::max)
}

/// Solves `A x = b`: Gaussian elimination with partial pivoting for square `A`,
/// Householder least squares for tall `A`.
pub fn linear_solve<T: Scalar>(a: &[Vec<T>], b: &[T], tol_bits: f64) -> Result<LinearSolution<T>, LinalgError> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    if b.len() != rows || rows < cols {
        return Err(LinalgError::Shape { rows, cols, rhs: b.len() });
    }
    if rows == cols {
        lu_solve(a, b, tol_bits)
    } else {
        qr_solve(a, b, tol_bits)
    }
}

fn lu_solve<T: Scalar>(a: &[Vec<T>], b: &[T], tol_bits: f64) -> Result<LinearSolution<T>, LinalgError> {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a.to_vec();
    let mut rhs: Vec<T> = b.to_vec();
    let floor = max_log2(a) - tol_bits;
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, m[i][k].log2_abs()))
            .fold((k, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
        pivots.push(best);
        if best <= floor {
            continue;
        }
        m.swap(k, p);
        rhs.swap(k, p);
        let (top, bottom) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let inv = T::one(pivot_row[k].prec()).div(&pivot_row[k]);
        let (rhs_top, rhs_bottom) = rhs.split_at_mut(k + 1);
        let pivot_rhs = &rhs_top[k];
        for (row, r) in bottom.iter_mut().zip(rhs_bottom.iter_mut()) {
            if row[k].is_zero() {
                continue;
            }
            let f = row[k].mul(&inv);
            for j in k + 1..n {
                row[j] = row[j].sub(&f.mul(&pivot_row[j]));
            }
            *r = r.sub(&f.mul(pivot_rhs));
        }
    }
    finish(m, rhs, pivots, floor, n)
}

fn finish<T: Scalar>(
    r: Vec<Vec<T>>,
    rhs: Vec<T>,
    pivots: Vec<f64>,
    floor: f64,
    n: usize,
) -> Result<LinearSolution<T>, LinalgError> {
    let rank = pivots.iter().filter(|&&p| p > floor).count();
    if rank < n {
        return Err(LinalgError::RankDeficient { rank, cols: n });
    }
    let mut x = vec![T::zero(rhs[0].prec()); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k].clone();
        for j in k + 1..n {
            acc = acc.sub(&r[k][j].mul(&x[j]));
        }
        x[k] = acc.div(&r[k][k]);
    }
    let hi = pivots.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(LinearSolution { x, rank, log2_condition: hi - lo })
}

fn qr_solve<T: Scalar>(a: &[Vec<T>], b: &[T], tol_bits: f64) -> Result<LinearSolution<T>, LinalgError> {
    let rows = a.len();
    let cols = a[0].len();
    let mut m: Vec<Vec<T>> = a.to_vec();
    let mut rhs: Vec<T> = b.to_vec();
    let floor = max_log2(a) - tol_bits;
    let prec = b[0].prec();
    let mut pivots = Vec::with_capacity(cols);
    for k in 0..cols {
        // v = x − α e1, α = −phase(x0)·‖x‖
        let mut norm2 = T::zero(prec);
        for row in m.iter().skip(k) {
            norm2 = norm2.add(&row[k].mul(&row[k].conj()));
        }
        let norm = norm2.sqrt();
        pivots.push(norm.log2_abs());
        if norm.log2_abs() <= floor {
            continue;
        }
        let x0 = m[k][k].clone();
        let phase = if x0.is_zero() { T::one(prec) } else { x0.div(&x0.abs()) };
        let alpha = phase.mul(&norm).neg();
        let mut v: Vec<T> = (k..rows).map(|i| m[i][k].clone()).collect();
        v[0] = v[0].sub(&alpha);
        let mut vnorm2 = T::zero(prec);
        for c in &v {
            vnorm2 = vnorm2.add(&c.mul(&c.conj()));
        }
        if vnorm2.is_zero() {
            continue;
        }
        let two_over = T::from_i64(2, prec).div(&vnorm2);
        // H y = y − (2 v^H y / v^H v) v
        let reflect = |y: &mut [T]| {
            let mut dot = T::zero(prec);
            for (vi, yi) in v.iter().zip(y.iter()) {
                dot = dot.add(&vi.conj().mul(yi));
            }
            let f = dot.mul(&two_over);
            for (vi, yi) in v.iter().zip(y.iter_mut()) {
                *yi = yi.sub(&f.mul(vi));
            }
        };
        for j in k..cols {
            let mut col: Vec<T> = (k..rows).map(|i| m[i][j].clone()).collect();
            reflect(&mut col);
            for (i, c) in col.into_iter().enumerate() {
                m[k + i][j] = c;
            }
        }
        reflect(&mut rhs[k..]);
    }
    // R is the leading cols×cols block; its diagonal magnitudes are the column norms above
    let r: Vec<Vec<T>> = m.into_iter().take(cols).collect();
    rhs.truncate(cols);
    finish(r, rhs, pivots, floor, cols)
}
