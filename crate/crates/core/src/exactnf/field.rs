//! Number fields `Q[x]/(f)` with `f` monic over Z, and polynomials over them.

use std::fmt;

use rug::{Integer, Rational};

use super::poly::{degree, q_ext_gcd, q_gcd, trim_z, z_derivative, z_to_q, ZPoly};
use super::ExactError;
use crate::lattice::{MembershipBase, LatticeError, RecognitionConfig};
use crate::numeric::{poly_eval_with_derivative, BigComplex, Scalar};
use crate::roots::polynomial_roots;

/// Power-basis coordinates over a common positive denominator, reduced.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    num: Vec<Integer>,
    den: Integer,
}

impl FieldElement {
    fn normalized(mut num: Vec<Integer>, mut den: Integer) -> Self {
        if den < 0 {
            den = -den;
            for c in num.iter_mut() {
                *c = Integer::from(-&*c);
            }
        }
        let mut g = den.clone();
        for c in &num {
            g.gcd_mut(c);
        }
        if g != 1 && g != 0 {
            den /= &g;
            for c in num.iter_mut() {
                *c /= &g;
            }
        }
        FieldElement { num, den }
    }

    pub fn coords(&self) -> Vec<Rational> {
        self.num.iter().map(|c| Rational::from((c.clone(), self.den.clone()))).collect()
    }

    pub fn numerators(&self) -> &[Integer] {
        &self.num
    }

    pub fn denominator(&self) -> &Integer {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| *c == 0)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.num.iter().skip(1).all(|c| *c == 0) {
            Some(Rational::from((self.num[0].clone(), self.den.clone())))
        } else {
            None
        }
    }

    /// Space-separated `num/den` coordinates.
    pub fn to_text(&self) -> String {
        self.coords().iter().map(|q| format!("{}/{}", q.numer(), q.denom())).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_text())
    }
}

pub type FPoly = Vec<FieldElement>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberField {
    f: ZPoly,
}

impl NumberField {
    /// `f` ascending, monic and squarefree.
    pub fn new(mut f: ZPoly) -> Result<Self, ExactError> {
        trim_z(&mut f);
        let d = degree(&f).ok_or(ExactError::BadField("zero polynomial".into()))?;
        if d == 0 {
            return Err(ExactError::BadField("constant polynomial".into()));
        }
        if f[d] != 1 {
            return Err(ExactError::BadField("defining polynomial is not monic".into()));
        }
        let g = q_gcd(&z_to_q(&f), &z_to_q(&z_derivative(&f)));
        if g.len() > 1 {
            return Err(ExactError::BadField("defining polynomial is not squarefree".into()));
        }
        Ok(NumberField { f })
    }

    /// `Q` as `Q[x]/(x)`.
    pub fn rationals() -> Self {
        NumberField { f: vec![Integer::new(), Integer::from(1)] }
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    pub fn poly(&self) -> &[Integer] {
        &self.f
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { num: vec![Integer::new(); self.degree()], den: Integer::from(1) }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(&Rational::from(1))
    }

    pub fn from_int(&self, v: i64) -> FieldElement {
        self.from_rational(&Rational::from(v))
    }

    pub fn from_rational(&self, q: &Rational) -> FieldElement {
        let mut num = vec![Integer::new(); self.degree()];
        num[0] = q.numer().clone();
        FieldElement { num, den: q.denom().clone() }
    }

    /// The class of `x`.
    pub fn generator(&self) -> FieldElement {
        self.reduce(vec![Integer::new(), Integer::from(1)], Integer::from(1))
    }

    pub fn element(&self, coords: &[Rational]) -> Result<FieldElement, ExactError> {
        if coords.len() != self.degree() {
            return Err(ExactError::Shape { expected: self.degree(), got: coords.len() });
        }
        let mut den = Integer::from(1);
        for q in coords {
            den.lcm_mut(q.denom());
        }
        let num = coords.iter().map(|q| Integer::from(q.numer() * Integer::from(&den / q.denom()))).collect();
        Ok(FieldElement::normalized(num, den))
    }

    /// Reduces an integer polynomial (over `den`) modulo `f`.
    fn reduce(&self, mut p: Vec<Integer>, den: Integer) -> FieldElement {
        let d = self.degree();
        for i in (d..p.len()).rev() {
            if p[i] == 0 {
                continue;
            }
            let c = std::mem::take(&mut p[i]);
            for j in 0..d {
                p[i - d + j] -= Integer::from(&c * &self.f[j]);
            }
        }
        p.resize(d, Integer::new());
        FieldElement::normalized(p, den)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let den = Integer::from(&a.den * &b.den);
        let num = a.num.iter().zip(&b.num).map(|(x, y)| Integer::from(x * &b.den) + Integer::from(y * &a.den)).collect();
        FieldElement::normalized(num, den)
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement { num: a.num.iter().map(|c| Integer::from(-c)).collect(), den: a.den.clone() }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let d = self.degree();
        let mut prod = vec![Integer::new(); 2 * d - 1];
        for (i, x) in a.num.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                prod[i + j] += Integer::from(x * y);
            }
        }
        self.reduce(prod, Integer::from(&a.den * &b.den))
    }

    pub fn scale(&self, a: &FieldElement, k: i64) -> FieldElement {
        FieldElement::normalized(a.num.iter().map(|c| Integer::from(c * k)).collect(), a.den.clone())
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, ExactError> {
        if a.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let (g, s, _) = q_ext_gcd(&a.coords(), &z_to_q(&self.f));
        if g.len() != 1 {
            return Err(ExactError::BadField("element shares a factor with the defining polynomial".into()));
        }
        let mut den = Integer::from(1);
        for q in &s {
            den.lcm_mut(q.denom());
        }
        let num = s.iter().map(|q| Integer::from(q.numer() * Integer::from(&den / q.denom()))).collect();
        Ok(self.reduce(num, den))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, ExactError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, e: u32) -> FieldElement {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `g(x)` for an integer polynomial `g`.
    pub fn eval_int_poly(&self, g: &[Integer], x: &FieldElement) -> FieldElement {
        let mut acc = self.zero();
        for c in g.iter().rev() {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, &self.from_rational(&Rational::from(c)));
        }
        acc
    }

    /// Image under the embedding sending the generator to `beta`.
    pub fn embed(&self, a: &FieldElement, beta: &BigComplex) -> BigComplex {
        let prec = beta.prec();
        let mut acc = BigComplex::zero(prec);
        for c in a.num.iter().rev() {
            acc = acc.mul(beta).add(&BigComplex::from_integer(c, prec));
        }
        acc.div(&BigComplex::from_integer(&a.den, prec))
    }

    /// All complex roots of `f` at `prec` bits, i.e. the embeddings.
    pub fn embeddings(&self, prec: u32) -> Result<Vec<BigComplex>, ExactError> {
        if self.degree() == 1 {
            return Ok(vec![BigComplex::from_integer(&Integer::from(-&self.f[0]), prec)]);
        }
        let p: Vec<BigComplex> = self.f.iter().map(|c| BigComplex::from_integer(c, prec + 32)).collect();
        let roots = polynomial_roots(&p, prec + 32).map_err(|e| ExactError::Numeric(e.to_string()))?;
        Ok(roots.into_iter().map(|r| r.with_prec(prec)).collect())
    }

    /// Newton refinement of an approximate root of `f` to `prec` bits.
    pub fn refine_embedding(&self, beta: &BigComplex, prec: u32) -> BigComplex {
        let mut z = beta.with_prec(prec);
        let p: Vec<BigComplex> = self.f.iter().map(|c| BigComplex::from_integer(c, prec)).collect();
        for _ in 0..64 {
            let (v, dv) = poly_eval_with_derivative(&p, &z);
            if v.is_zero() || dv.is_zero() {
                break;
            }
            let step = v.div(&dv);
            z = z.sub(&step);
            if step.log2_abs() < z.log2_abs().max(0.0) - (prec as f64 - 8.0) {
                break;
            }
        }
        z
    }

    pub fn poly_trim(&self, p: &mut FPoly) {
        while p.last().map_or(false, FieldElement::is_zero) {
            p.pop();
        }
    }

    pub fn poly_from_ints(&self, p: &[Integer]) -> FPoly {
        p.iter().map(|c| self.from_rational(&Rational::from(c))).collect()
    }

    pub fn poly_add(&self, a: &[FieldElement], b: &[FieldElement]) -> FPoly {
        let n = a.len().max(b.len());
        let mut out: FPoly = (0..n)
            .map(|i| match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => self.add(x, y),
                (Some(x), None) | (None, Some(x)) => x.clone(),
                (None, None) => self.zero(),
            })
            .collect();
        self.poly_trim(&mut out);
        out
    }

    pub fn poly_scale(&self, a: &[FieldElement], c: &FieldElement) -> FPoly {
        let mut out: FPoly = a.iter().map(|x| self.mul(x, c)).collect();
        self.poly_trim(&mut out);
        out
    }

    pub fn poly_sub(&self, a: &[FieldElement], b: &[FieldElement]) -> FPoly {
        self.poly_add(a, &self.poly_scale(b, &self.from_int(-1)))
    }

    pub fn poly_mul(&self, a: &[FieldElement], b: &[FieldElement]) -> FPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        self.poly_trim(&mut out);
        out
    }

    pub fn poly_pow(&self, a: &[FieldElement], e: u32) -> FPoly {
        (0..e).fold(vec![self.one()], |acc, _| self.poly_mul(&acc, a))
    }

    pub fn poly_derivative(&self, a: &[FieldElement]) -> FPoly {
        let mut out: FPoly = a.iter().enumerate().skip(1).map(|(i, c)| self.scale(c, i as i64)).collect();
        self.poly_trim(&mut out);
        out
    }

    pub fn poly_rem(&self, a: &[FieldElement], b: &[FieldElement]) -> Result<FPoly, ExactError> {
        let mut b = b.to_vec();
        self.poly_trim(&mut b);
        let db = b.len().checked_sub(1).ok_or(ExactError::DivisionByZero)?;
        let inv = self.inv(&b[db])?;
        let mut r = a.to_vec();
        self.poly_trim(&mut r);
        while r.len() > db {
            let dr = r.len() - 1;
            let c = self.mul(&r[dr], &inv);
            for (j, bj) in b.iter().enumerate() {
                r[dr - db + j] = self.sub(&r[dr - db + j], &self.mul(&c, bj));
            }
            r[dr] = self.zero();
            self.poly_trim(&mut r);
        }
        Ok(r)
    }

    /// Monic gcd.
    pub fn poly_gcd(&self, a: &[FieldElement], b: &[FieldElement]) -> Result<FPoly, ExactError> {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        self.poly_trim(&mut r0);
        self.poly_trim(&mut r1);
        while !r1.is_empty() {
            let r = self.poly_rem(&r0, &r1)?;
            r0 = std::mem::replace(&mut r1, r);
        }
        match r0.last() {
            Some(l) => {
                let inv = self.inv(l)?;
                Ok(self.poly_scale(&r0, &inv))
            }
            None => Ok(r0),
        }
    }

    pub fn poly_embed(&self, p: &[FieldElement], beta: &BigComplex) -> Vec<BigComplex> {
        p.iter().map(|c| self.embed(c, beta)).collect()
    }
}

/// A root of `g` lying in `field`, found numerically through the embedding
/// `beta` and verified exactly. `Ok(None)` when no complex root of `g` yields a
/// relation; an error when relations were found but none was exact.
pub fn root_in_field(
    g: &[Integer],
    field: &NumberField,
    beta: &BigComplex,
    cfg: &RecognitionConfig,
) -> Result<Option<FieldElement>, ExactError> {
    let mut g = g.to_vec();
    trim_z(&mut g);
    let dg = degree(&g).ok_or(ExactError::BadField("zero polynomial".into()))?;
    if dg == 0 || field.degree() % dg != 0 {
        return Err(ExactError::DegreeMismatch { poly: dg, field: field.degree() });
    }
    let prec = beta.prec();
    let p: Vec<BigComplex> = g.iter().map(|c| BigComplex::from_integer(c, prec + 32)).collect();
    let roots = polynomial_roots(&p, prec + 32).map_err(|e| ExactError::Numeric(e.to_string()))?;
    let base = MembershipBase::new(beta, field.degree(), prec, cfg)?;
    let mut spurious = 0;
    for r in roots {
        match base.recognize(&r.with_prec(prec)) {
            Ok(rec) => {
                let rho = field.element(&rec.value)?;
                if field.eval_int_poly(&g, &rho).is_zero() {
                    return Ok(Some(rho));
                }
                spurious += 1;
            }
            Err(LatticeError::NoRelation(_)) => {}
            Err(e) => return Err(ExactError::Lattice(e)),
        }
    }
    if spurious > 0 {
        return Err(ExactError::PrecisionInsufficient { bits: prec, spurious });
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnf::poly::zpoly;
    use rand::{Rng, SeedableRng};

    fn q2() -> NumberField {
        NumberField::new(zpoly(&[-2, 0, 1])).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn quadratic_arithmetic() {
        let k = q2();
        let b = k.generator();
        assert_eq!(k.mul(&b, &b).coords(), vec![r(2, 1), r(0, 1)]);
        assert_eq!(k.inv(&b).unwrap().coords(), vec![r(0, 1), r(1, 2)]);
        assert_eq!(k.inv(&k.zero()), Err(ExactError::DivisionByZero));
    }

    #[test]
    fn rejects_bad_defining_polynomials() {
        assert!(NumberField::new(zpoly(&[-2, 0, 2])).is_err());
        assert!(NumberField::new(zpoly(&[1, 2, 1])).is_err());
        assert!(NumberField::new(zpoly(&[5])).is_err());
    }

    #[test]
    fn field_axioms_on_random_elements() {
        let k = NumberField::new(zpoly(&[6, -48, 144, -154, -40, -736, 6174, 1])).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let rand_el = |rng: &mut rand_chacha::ChaCha8Rng| {
            let c: Vec<Rational> = (0..k.degree()).map(|_| r(rng.gen_range(-30..30), rng.gen_range(1..8))).collect();
            k.element(&c).unwrap()
        };
        for _ in 0..20 {
            let (a, b, c) = (rand_el(&mut rng), rand_el(&mut rng), rand_el(&mut rng));
            assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
            assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
            if !a.is_zero() {
                assert_eq!(k.mul(&k.inv(&a).unwrap(), &a), k.one());
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let k = q2();
        let beta = &k.embeddings(128).unwrap()[0];
        let a = k.element(&[r(1, 3), r(-2, 5)]).unwrap();
        let b = k.element(&[r(7, 1), r(1, 1)]).unwrap();
        let lhs = k.embed(&k.mul(&a, &b), beta);
        let rhs = k.embed(&a, beta).mul(&k.embed(&b, beta));
        assert!(lhs.sub(&rhs).log2_abs() < -100.0);
    }

    #[test]
    fn roots_in_quadratic_field() {
        let k = q2();
        let beta = k.refine_embedding(&BigComplex::from_f64(1.41, 0.0, 64), 512);
        let cfg = RecognitionConfig::default();
        let rho = root_in_field(&zpoly(&[-2, 0, 1]), &k, &beta, &cfg).unwrap().unwrap();
        assert!(rho == k.generator() || rho == k.neg(&k.generator()));
        assert_eq!(root_in_field(&zpoly(&[-3, 0, 1]), &k, &beta, &cfg).unwrap(), None);
    }

    #[test]
    fn polynomial_gcd_over_field() {
        let k = q2();
        let b = k.generator();
        // (x − b)(x + 1) and (x − b)(x − 3)
        let lin = |c: &FieldElement| vec![k.neg(c), k.one()];
        let p = k.poly_mul(&lin(&b), &lin(&k.from_int(-1)));
        let q = k.poly_mul(&lin(&b), &lin(&k.from_int(3)));
        assert_eq!(k.poly_gcd(&p, &q).unwrap(), lin(&b));
    }
}
