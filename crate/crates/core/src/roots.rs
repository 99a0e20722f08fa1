//! Simultaneous root finding (Aberth–Ehrlich) with precision doubling.

use thiserror::Error;

use crate::numeric::{poly_eval_with_derivative, BigComplex, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("polynomial has zero leading coefficient or degree 0")]
    Degenerate,
    #[error("root iteration did not converge at {bits} bits (degree {degree})")]
    NotConverged { degree: usize, bits: u32 },
}

const START_BITS: u32 = 64;
const MAX_ITER: usize = 2000;

fn trim<T: Scalar>(p: &[T]) -> &[T] {
    let mut end = p.len();
    while end > 0 && p[end - 1].is_zero() {
        end -= 1;
    }
    &p[..end]
}

/// Points on a circle enclosing all roots, slightly rotated off the real axis.
fn initial_guesses(p: &[BigComplex], prec: u32) -> Vec<BigComplex> {
    let n = p.len() - 1;
    let lead = p[n].log2_abs();
    let log_r = (1..=n)
        .filter(|&k| !p[n - k].is_zero())
        .map(|k| (p[n - k].log2_abs() - lead) / k as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let log_r = if log_r.is_finite() { log_r + 1.0 } else { 0.0 };
    let radius = rug::Float::with_val(prec, log_r).exp2();
    (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            let (s, c) = angle.sin_cos();
            BigComplex::new(
                rug::Float::with_val(prec, &radius * c),
                rug::Float::with_val(prec, &radius * s),
            )
        })
        .collect()
}

/// Aberth iteration until every correction is below `2^-tol_bits` relative to its root.
/// Returns whether all roots converged.
pub fn aberth<T: Scalar>(p: &[T], z: &mut [T], tol_bits: f64, max_iter: usize) -> bool {
    let n = z.len();
    let prec = z.first().map_or(53, |v| v.prec());
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (f, df) = poly_eval_with_derivative(p, &z[i]);
            if f.is_zero() {
                done[i] = true;
                continue;
            }
            let w = f.div(&df);
            let mut s = T::zero(prec);
            for j in 0..n {
                if j != i {
                    s = s.add(&T::one(prec).div(&z[i].sub(&z[j])));
                }
            }
            let step = w.div(&T::one(prec).sub(&w.mul(&s)));
            z[i] = z[i].sub(&step);
            if step.log2_abs() < z[i].log2_abs().max(-tol_bits) - tol_bits {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return true;
        }
    }
    false
}

/// All complex roots of `p` (ascending coefficients) to about `0.9·prec` bits.
pub fn polynomial_roots(p: &[BigComplex], prec: u32) -> Result<Vec<BigComplex>, RootError> {
    let p = trim(p);
    if p.len() < 2 {
        return Err(RootError::Degenerate);
    }
    let degree = p.len() - 1;
    let mut bits = START_BITS.min(prec);
    let mut z = initial_guesses(p, bits);
    loop {
        let q: Vec<BigComplex> = p.iter().map(|c| c.with_prec(bits)).collect();
        z = z.iter().map(|c| c.with_prec(bits)).collect();
        let last = bits >= prec;
        let tol = if last { 0.9 } else { 0.5 } * bits as f64;
        let ok = aberth(&q, &mut z, tol, if last { MAX_ITER } else { MAX_ITER / 4 });
        if last {
            return if ok { Ok(z) } else { Err(RootError::NotConverged { degree, bits }) };
        }
        bits = (bits * 2).min(prec);
    }
}

/// Roots sorted by real part, then imaginary part.
pub fn sorted_roots(p: &[BigComplex], prec: u32) -> Result<Vec<BigComplex>, RootError> {
    let mut z = polynomial_roots(p, prec)?;
    z.sort_by(|a, b| {
        let (a, b) = (a.to_c64(), b.to_c64());
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::poly_eval;

    fn ints(v: &[i64], prec: u32) -> Vec<BigComplex> {
        v.iter().map(|&c| BigComplex::from_i64(c, prec)).collect()
    }

    #[test]
    fn square_root_of_two() {
        let p = ints(&[-2, 0, 1], 256);
        let z = sorted_roots(&p, 256).unwrap();
        let two = rug::Float::with_val(256, 2);
        let s = two.sqrt();
        let err = rug::Float::with_val(256, z[1].re() - &s).abs();
        assert!(err.get_exp().unwrap_or(i32::MIN) < -220);
        assert!(z[1].im().is_zero() || z[1].im().get_exp().unwrap() < -220);
        let err0 = rug::Float::with_val(256, z[0].re() + &s).abs();
        assert!(err0.get_exp().unwrap_or(i32::MIN) < -220);
    }

    #[test]
    fn roots_of_unity_degree_12() {
        let mut c = vec![0i64; 13];
        c[0] = -1;
        c[12] = 1;
        let p = ints(&c, 200);
        let z = polynomial_roots(&p, 200).unwrap();
        for r in &z {
            assert!(poly_eval(&p, r).log2_abs() < -170.0);
        }
    }

    #[test]
    fn large_coefficients() {
        // (x − 10^6)(x − 3)(x − 1)
        let p = ints(&[-3_000_000, 4_000_003, -1_000_004, 1], 128);
        let z = sorted_roots(&p, 128).unwrap();
        assert!(z[2].sub(&BigComplex::from_i64(1_000_000, 128)).log2_abs() < -80.0);
        assert!(z[1].sub(&BigComplex::from_i64(3, 128)).log2_abs() < -100.0);
    }
}
