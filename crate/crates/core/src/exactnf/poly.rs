//! Dense univariate polynomials over Z and Q, ascending coefficients.

use rug::ops::Pow;
use rug::{Integer, Rational};

pub type ZPoly = Vec<Integer>;
pub type QPoly = Vec<Rational>;

pub fn zpoly(coeffs: &[i64]) -> ZPoly {
    coeffs.iter().map(|&c| Integer::from(c)).collect()
}

pub fn trim_z(p: &mut ZPoly) {
    while p.last().map_or(false, |c| *c == 0) {
        p.pop();
    }
}

pub fn trim_q(p: &mut QPoly) {
    while p.last().map_or(false, |c| *c == 0) {
        p.pop();
    }
}

/// Degree, `None` for the zero polynomial.
pub fn degree<T: PartialEq<i32>>(p: &[T]) -> Option<usize> {
    p.iter().rposition(|c| *c != 0)
}

pub fn z_derivative(p: &[Integer]) -> ZPoly {
    p.iter().enumerate().skip(1).map(|(i, c)| Integer::from(c * i as u32)).collect()
}

pub fn z_to_q(p: &[Integer]) -> QPoly {
    p.iter().map(|c| Rational::from(c)).collect()
}

pub fn content(p: &[Integer]) -> Integer {
    let mut g = Integer::new();
    for c in p {
        g.gcd_mut(c);
    }
    g
}

pub fn z_eval(p: &[Integer], x: &Integer) -> Integer {
    let mut acc = Integer::new();
    for c in p.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

pub fn q_add(a: &[Rational], b: &[Rational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut out: QPoly = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => Rational::from(x + y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => Rational::new(),
        })
        .collect();
    trim_q(&mut out);
    out
}

pub fn q_neg(a: &[Rational]) -> QPoly {
    a.iter().map(|c| Rational::from(-c)).collect()
}

pub fn q_sub(a: &[Rational], b: &[Rational]) -> QPoly {
    q_add(a, &q_neg(b))
}

pub fn q_mul(a: &[Rational], b: &[Rational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Rational::from(x * y);
        }
    }
    trim_q(&mut out);
    out
}

/// Quotient and remainder; `b` must be nonzero.
pub fn q_divrem(a: &[Rational], b: &[Rational]) -> (QPoly, QPoly) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead = b[db].clone();
    let mut r: QPoly = a.to_vec();
    trim_q(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::new(); r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = Rational::from(&r[dr] / &lead);
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            r[dr - db + j] -= Rational::from(&c * bj);
        }
        r[dr] = Rational::new();
        q[dr - db] = c;
        trim_q(&mut r);
    }
    trim_q(&mut q);
    (q, r)
}

pub fn q_monic(p: &[Rational]) -> QPoly {
    match p.last() {
        Some(l) if *l != 0 => p.iter().map(|c| Rational::from(c / l)).collect(),
        _ => p.to_vec(),
    }
}

/// `(g, s, t)` with `s·a + t·b = g`, `g` monic (or zero when both inputs are).
pub fn q_ext_gcd(a: &[Rational], b: &[Rational]) -> (QPoly, QPoly, QPoly) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    trim_q(&mut r0);
    trim_q(&mut r1);
    let one = vec![Rational::from(1)];
    let (mut s0, mut s1) = (one.clone(), Vec::new());
    let (mut t0, mut t1) = (Vec::new(), one);
    while !r1.is_empty() {
        let (q, r) = q_divrem(&r0, &r1);
        let s2 = q_sub(&s0, &q_mul(&q, &s1));
        let t2 = q_sub(&t0, &q_mul(&q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    match r0.last().cloned() {
        Some(l) => {
            let inv = |p: &[Rational]| p.iter().map(|c| Rational::from(c / &l)).collect::<QPoly>();
            (inv(&r0), inv(&s0), inv(&t0))
        }
        None => (r0, s0, t0),
    }
}

pub fn q_gcd(a: &[Rational], b: &[Rational]) -> QPoly {
    q_ext_gcd(a, b).0
}

/// `lc(b)^(deg a − deg b + 1)·a mod b` over Z.
pub fn pseudo_rem(a: &[Integer], b: &[Integer]) -> ZPoly {
    let db = degree(b).expect("pseudo-division by zero");
    let lead = b[db].clone();
    let mut r: ZPoly = a.to_vec();
    trim_z(&mut r);
    let Some(da) = degree(&r) else { return r };
    if da < db {
        return r;
    }
    let mut steps = da - db + 1;
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = r[dr].clone();
        for v in r.iter_mut() {
            *v *= &lead;
        }
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            r[dr - db + j] -= Integer::from(&c * bj);
        }
        trim_z(&mut r);
        steps -= 1;
    }
    if steps > 0 {
        let f = Integer::from(lead.pow(steps as u32));
        for v in r.iter_mut() {
            *v *= &f;
        }
    }
    r
}

/// Resultant by the subresultant algorithm.
pub fn resultant(a: &[Integer], b: &[Integer]) -> Integer {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim_z(&mut a);
    trim_z(&mut b);
    let (Some(mut da), Some(mut db)) = (degree(&a), degree(&b)) else {
        return Integer::new();
    };
    let mut sign = 1i32;
    if da < db {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut da, &mut db);
        if da % 2 == 1 && db % 2 == 1 {
            sign = -1;
        }
    }
    if db == 0 {
        return b[0].clone().pow(da as u32) * sign;
    }
    let ca = content(&a);
    let cb = content(&b);
    for c in a.iter_mut() {
        *c /= &ca;
    }
    for c in b.iter_mut() {
        *c /= &cb;
    }
    let t = ca.clone().pow(db as u32) * cb.clone().pow(da as u32);
    let mut g = Integer::from(1);
    let mut h = Integer::from(1);
    loop {
        let (da, db) = (degree(&a).unwrap(), degree(&b).unwrap());
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            sign = -sign;
        }
        let r = pseudo_rem(&a, &b);
        a = b;
        let div = Integer::from(&g * h.clone().pow(delta));
        b = r.into_iter().map(|c| c / &div).collect();
        g = a[degree(&a).unwrap()].clone();
        if delta > 0 {
            h = g.clone().pow(delta) / h.clone().pow(delta - 1);
        }
        match degree(&b) {
            None => return Integer::new(),
            Some(0) => {
                let da = degree(&a).unwrap() as u32;
                let hb = b[0].clone().pow(da) / h.clone().pow(da - 1);
                return hb * t * sign;
            }
            Some(_) => {}
        }
    }
}

/// `(−1)^(n(n−1)/2)·Res(f, f′)/lc(f)`.
pub fn poly_discriminant(f: &[Integer]) -> Integer {
    let mut f = f.to_vec();
    trim_z(&mut f);
    let n = degree(&f).unwrap_or(0);
    let r = resultant(&f, &z_derivative(&f)) / &f[n];
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::determinant;
    use rand::{Rng, SeedableRng};

    fn sylvester(a: &[Integer], b: &[Integer]) -> Integer {
        let (m, n) = (a.len() - 1, b.len() - 1);
        let size = m + n;
        let mut rows = Vec::with_capacity(size);
        for i in 0..n {
            let mut r = vec![Integer::new(); size];
            for (j, c) in a.iter().rev().enumerate() {
                r[i + j] = c.clone();
            }
            rows.push(r);
        }
        for i in 0..m {
            let mut r = vec![Integer::new(); size];
            for (j, c) in b.iter().rev().enumerate() {
                r[i + j] = c.clone();
            }
            rows.push(r);
        }
        determinant(&rows)
    }

    #[test]
    fn small_discriminants() {
        assert_eq!(poly_discriminant(&zpoly(&[-2, 0, 1])), 8);
        assert_eq!(poly_discriminant(&zpoly(&[1, 1, 0, 1])), -31);
        assert_eq!(poly_discriminant(&zpoly(&[2, -3, 1])), 1);
    }

    #[test]
    fn resultant_matches_sylvester_determinant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let da = rng.gen_range(1..7);
            let db = rng.gen_range(1..7);
            let mut a: ZPoly = (0..=da).map(|_| Integer::from(rng.gen_range(-9..=9))).collect();
            let mut b: ZPoly = (0..=db).map(|_| Integer::from(rng.gen_range(-9..=9))).collect();
            a[da] = Integer::from(rng.gen_range(1..=9));
            b[db] = Integer::from(-rng.gen_range(1..=9));
            assert_eq!(resultant(&a, &b), sylvester(&a, &b), "{a:?} {b:?}");
        }
    }

    #[test]
    fn discriminant_of_product() {
        // disc(fg) = disc(f)·disc(g)·Res(f, g)²
        let f = zpoly(&[3, -1, 0, 2]);
        let g = zpoly(&[-5, 4, 1]);
        let fg: ZPoly = {
            let q = q_mul(&z_to_q(&f), &z_to_q(&g));
            q.iter().map(|c| c.numer().clone()).collect()
        };
        let r = resultant(&f, &g);
        assert_eq!(poly_discriminant(&fg), poly_discriminant(&f) * poly_discriminant(&g) * r.square());
    }

    #[test]
    fn extended_gcd_identity() {
        let a = z_to_q(&zpoly(&[-1, 0, 1])); // (x−1)(x+1)
        let b = z_to_q(&zpoly(&[-2, 1, 1])); // (x−1)(x+2)
        let (g, s, t) = q_ext_gcd(&a, &b);
        assert_eq!(g, z_to_q(&zpoly(&[-1, 1])));
        assert_eq!(q_add(&q_mul(&s, &a), &q_mul(&t, &b)), g);
    }
}
