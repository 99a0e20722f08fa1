//! Integer lattice reduction and recognition of algebraic numbers.
//!
//! [`lll_reduce`] keeps the Gram matrix exactly and the Gram–Schmidt data in
//! floating point (the L² strategy), then checks size reduction and the Lovász
//! condition in exact integer arithmetic. Recognition embeds complex numbers
//! as two scaled columns and raises the scale in stages, reusing the
//! transform of the previous stage.

use std::fmt::Write as _;

use rug::{Assign, Float, Integer, Rational};
use thiserror::Error;

use crate::numeric::{BigComplex, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice basis is empty or has rows of unequal length")]
    Shape,
    #[error("basis rows are linearly dependent")]
    Dependent,
    #[error("delta must lie in (1/4, 1)")]
    BadDelta,
    #[error("LLL post-check failed: {0}")]
    Check(String),
    #[error("no relation found: {0}")]
    NoRelation(String),
    #[error("polynomial text line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    pub basis: Vec<Vec<Integer>>,
}

impl IntegerLattice {
    pub fn new(basis: Vec<Vec<Integer>>) -> Result<Self, LatticeError> {
        let dim = basis.first().map(|r| r.len()).ok_or(LatticeError::Shape)?;
        if dim == 0 || basis.iter().any(|r| r.len() != dim) {
            return Err(LatticeError::Shape);
        }
        Ok(IntegerLattice { basis })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, LatticeError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| Integer::from(v)).collect()).collect())
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn gram(&self) -> Vec<Vec<Integer>> {
        let d = self.basis.len();
        let mut g = vec![vec![Integer::new(); d]; d];
        for i in 0..d {
            for j in 0..=i {
                let v = dot(&self.basis[i], &self.basis[j]);
                g[j][i].assign(&v);
                g[i][j] = v;
            }
        }
        g
    }
}

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut acc = Integer::new();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn default_delta() -> Rational {
    Rational::from((99, 100))
}

#[derive(Clone, Debug)]
pub struct LllOutput {
    pub lattice: IntegerLattice,
    /// Unimodular `U` with `U · input = output`.
    pub transform: Vec<Vec<Integer>>,
    pub swaps: usize,
}

/// LLL reduction with parameter `delta`; output verified exactly.
pub fn lll_reduce(l: &IntegerLattice, delta: &Rational) -> Result<LllOutput, LatticeError> {
    if *delta <= Rational::from((1, 4)) || *delta >= 1 {
        return Err(LatticeError::BadDelta);
    }
    let d = l.rank();
    // floating passes aim slightly above delta so rounding rarely breaks the exact check
    let target = Rational::from(delta + (Rational::from(1) - delta) / 16u32);
    let mut basis = l.basis.clone();
    let mut transform = identity(d);
    let mut swaps = 0;
    let mut precs = vec![None];
    precs.extend((0..5).map(|i| Some((2 * d as u32 + 64) << i)));
    for prec in precs {
        let pass = match prec {
            None => l2_pass::<Dpe>(&basis, &target, 53),
            Some(p) => l2_pass::<Float>(&basis, &target, p),
        };
        let Ok((b, u, n)) = pass else { continue };
        basis = b;
        transform = mat_mul(&u, &transform);
        swaps += n;
        exact_size_reduce(&mut basis, &mut transform)?;
        if check_lll(&basis, delta).is_ok() {
            return Ok(LllOutput { lattice: IntegerLattice { basis }, transform, swaps });
        }
    }
    integral_gso(&l.basis)?;
    check_lll(&basis, delta).map_err(LatticeError::Check)?;
    Ok(LllOutput { lattice: IntegerLattice { basis }, transform, swaps })
}

fn identity(d: usize) -> Vec<Vec<Integer>> {
    (0..d).map(|i| (0..d).map(|j| Integer::from((i == j) as i32)).collect()).collect()
}

fn mat_mul(a: &[Vec<Integer>], b: &[Vec<Integer>]) -> Vec<Vec<Integer>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let mut acc = Integer::new();
                    for (k, x) in row.iter().enumerate() {
                        if *x != 0 {
                            acc += x * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `b_k ← b_k − x·b_j` on basis, transform and Gram matrix.
fn reduce_row(b: &mut [Vec<Integer>], u: &mut [Vec<Integer>], g: &mut [Vec<Integer>], k: usize, j: usize, x: &Integer) {
    let (bj, uj) = (b[j].clone(), u[j].clone());
    for (c, v) in b[k].iter_mut().zip(&bj) {
        *c -= x * v;
    }
    for (c, v) in u[k].iter_mut().zip(&uj) {
        *c -= x * v;
    }
    let d = g.len();
    // G_kk ← G_kk − 2x·G_kj + x²·G_jj
    let t = Integer::from(x * &g[k][j]) * 2u32 - Integer::from(x * x) * &g[j][j];
    g[k][k] -= t;
    for i in 0..d {
        if i == k {
            continue;
        }
        let v = Integer::from(x * &g[j][i]);
        g[k][i] -= &v;
        let w = g[k][i].clone();
        g[i][k] = w;
    }
}

type Pass = (Vec<Vec<Integer>>, Vec<Vec<Integer>>, usize);

/// Floating type for the Gram–Schmidt data of [`l2_pass`].
trait GsoNum: Clone {
    fn from_integer(v: &Integer, prec: u32) -> Self;
    fn from_rational(v: &Rational, prec: u32) -> Self;
    fn zero(prec: u32) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    /// Nearest integer, `None` when it is zero.
    fn round(&self) -> Option<Integer>;
    fn abs_le_half(&self) -> bool;
    fn le(&self, o: &Self) -> bool;
    fn is_positive(&self) -> bool;
}

impl GsoNum for Float {
    fn from_integer(v: &Integer, prec: u32) -> Self {
        Float::with_val(prec, v)
    }
    fn from_rational(v: &Rational, prec: u32) -> Self {
        Float::with_val(prec, v)
    }
    fn zero(prec: u32) -> Self {
        Float::new(prec)
    }
    fn mul(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self / o)
    }
    fn sub(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self - o)
    }
    fn round(&self) -> Option<Integer> {
        let r = Float::with_val(self.prec(), self.round_ref());
        if r.is_zero() {
            None
        } else {
            r.to_integer()
        }
    }
    fn abs_le_half(&self) -> bool {
        self.get_exp().map_or(true, |e| e < 0 || (e == 0 && Float::with_val(self.prec(), self.abs_ref()) <= 0.51))
    }
    fn le(&self, o: &Self) -> bool {
        self <= o
    }
    fn is_positive(&self) -> bool {
        *self > 0
    }
}

/// `m·2^e` with `|m|` in `[1/2, 1)` or `m = 0`: a double with unbounded exponent.
#[derive(Clone, Copy, Debug)]
struct Dpe {
    m: f64,
    e: i64,
}

impl Dpe {
    fn normalized(m: f64, e: i64) -> Self {
        if m == 0.0 || !m.is_finite() {
            return Dpe { m: if m.is_finite() { 0.0 } else { m }, e: 0 };
        }
        let bits = m.to_bits();
        let raw = ((bits >> 52) & 0x7ff) as i64;
        let frac = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
        Dpe { m: frac, e: e + raw - 1022 }
    }

    fn pow2(k: i64) -> f64 {
        if k < -1022 {
            0.0
        } else {
            f64::from_bits(((1023 + k) as u64) << 52)
        }
    }
}

impl GsoNum for Dpe {
    fn from_integer(v: &Integer, _: u32) -> Self {
        let (m, e) = v.to_f64_exp();
        Dpe::normalized(m, e as i64)
    }
    fn from_rational(v: &Rational, _: u32) -> Self {
        Dpe::normalized(v.to_f64(), 0)
    }
    fn zero(_: u32) -> Self {
        Dpe { m: 0.0, e: 0 }
    }
    fn mul(&self, o: &Self) -> Self {
        Dpe::normalized(self.m * o.m, self.e + o.e)
    }
    fn div(&self, o: &Self) -> Self {
        Dpe::normalized(self.m / o.m, self.e - o.e)
    }
    fn sub(&self, o: &Self) -> Self {
        if o.m == 0.0 {
            return *self;
        }
        if self.m == 0.0 {
            return Dpe { m: -o.m, e: o.e };
        }
        let d = self.e - o.e;
        if d > 60 {
            *self
        } else if d < -60 {
            Dpe { m: -o.m, e: o.e }
        } else if d >= 0 {
            Dpe::normalized(self.m - o.m * Dpe::pow2(-d), self.e)
        } else {
            Dpe::normalized(self.m * Dpe::pow2(d) - o.m, o.e)
        }
    }
    fn round(&self) -> Option<Integer> {
        if self.m == 0.0 || self.e < 0 {
            return None;
        }
        if self.e <= 52 {
            let v = (self.m * Dpe::pow2(self.e)).round();
            return if v == 0.0 { None } else { Integer::from_f64(v) };
        }
        let top = Integer::from_f64((self.m * Dpe::pow2(53)).round())?;
        Some(top << (self.e - 53) as u32)
    }
    fn abs_le_half(&self) -> bool {
        self.e < 0 || (self.e <= 1 && (self.m * Dpe::pow2(self.e)).abs() <= 0.51)
    }
    fn le(&self, o: &Self) -> bool {
        !o.sub(self).m.is_sign_negative() || o.sub(self).m == 0.0
    }
    fn is_positive(&self) -> bool {
        self.m > 0.0
    }
}

/// One floating-point LLL run. Returns basis, transform and swap count.
fn l2_pass<F: GsoNum>(input: &[Vec<Integer>], delta: &Rational, prec: u32) -> Result<Pass, LatticeError> {
    let d = input.len();
    let mut b = input.to_vec();
    let mut u = identity(d);
    let mut g = IntegerLattice { basis: b.clone() }.gram();
    let fdelta = F::from_rational(delta, prec);
    let mut r = vec![vec![F::zero(prec); d]; d];
    let mut mu = vec![vec![F::zero(prec); d]; d];
    let mut s = vec![F::zero(prec); d + 1];
    let mut swaps = 0;
    if g[0][0] == 0 {
        return Err(LatticeError::Dependent);
    }
    r[0][0] = F::from_integer(&g[0][0], prec);
    let bits = input.iter().flatten().map(|c| c.significant_bits()).max().unwrap_or(1) as usize;
    let round_limit = 64 + 4 * bits / prec.min(53).max(1) as usize;
    let mut k = 1;
    while k < d {
        // lazy size reduction of b_k
        let mut rounds = 0;
        loop {
            for j in 0..k {
                let mut acc = F::from_integer(&g[k][j], prec);
                for i in 0..j {
                    acc = acc.sub(&mu[j][i].mul(&r[k][i]));
                }
                mu[k][j] = acc.div(&r[j][j]);
                r[k][j] = acc;
            }
            if (0..k).all(|j| mu[k][j].abs_le_half()) {
                break;
            }
            rounds += 1;
            if rounds > round_limit {
                return Err(LatticeError::Check("size reduction does not settle".into()));
            }
            for j in (0..k).rev() {
                let Some(x) = mu[k][j].round() else { continue };
                reduce_row(&mut b, &mut u, &mut g, k, j, &x);
                let xf = F::from_integer(&x, prec);
                for i in 0..j {
                    mu[k][i] = mu[k][i].sub(&xf.mul(&mu[j][i]));
                }
                mu[k][j] = mu[k][j].sub(&xf);
            }
        }
        // s_j = ‖b_k‖² − Σ_{i<j} μ_ki·r_ki
        s[0] = F::from_integer(&g[k][k], prec);
        for j in 1..=k {
            s[j] = s[j - 1].sub(&mu[k][j - 1].mul(&r[k][j - 1]));
        }
        if fdelta.mul(&r[k - 1][k - 1]).le(&s[k - 1]) {
            r[k][k] = s[k].clone();
            if !r[k][k].is_positive() {
                return Err(LatticeError::Dependent);
            }
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            swaps += 1;
            if k == 1 {
                if g[0][0] == 0 {
                    return Err(LatticeError::Dependent);
                }
                r[0][0] = F::from_integer(&g[0][0], prec);
            } else {
                k -= 1;
            }
        }
    }
    Ok((b, u, swaps))
}

/// Exact integral Gram–Schmidt: `d_i = det Gram(b_0..b_{i−1})` (with `d_0 = 1`)
/// and `λ_ij = d_{j+1}·μ_ij`.
fn integral_gso(b: &[Vec<Integer>]) -> Result<(Vec<Integer>, Vec<Vec<Integer>>), LatticeError> {
    let n = b.len();
    let mut dd = vec![Integer::from(1); n + 1];
    let mut lam = vec![vec![Integer::new(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut u = dot(&b[i], &b[j]);
            for k in 0..j {
                u = (u * &dd[k + 1] - Integer::from(&lam[i][k] * &lam[j][k])) / &dd[k];
            }
            if j < i {
                lam[i][j] = u;
            } else {
                if u == 0 {
                    return Err(LatticeError::Dependent);
                }
                dd[i + 1] = u;
            }
        }
    }
    Ok((dd, lam))
}

/// Makes every `|μ_kj| ≤ 1/2` using exact arithmetic.
fn exact_size_reduce(b: &mut [Vec<Integer>], u: &mut [Vec<Integer>]) -> Result<(), LatticeError> {
    let n = b.len();
    let (dd, mut lam) = integral_gso(b)?;
    for k in 1..n {
        for j in (0..k).rev() {
            // μ = λ_kj / d_{j+1}; reduce when |2λ| > d_{j+1}
            let two_lam = Integer::from(&lam[k][j] * 2u32);
            if two_lam.clone().abs() <= dd[j + 1] {
                continue;
            }
            let q = Rational::from((lam[k][j].clone(), dd[j + 1].clone())).round();
            let x = q.numer().clone();
            let bj = b[j].clone();
            for (c, v) in b[k].iter_mut().zip(&bj) {
                *c -= &x * v;
            }
            let uj = u[j].clone();
            for (c, v) in u[k].iter_mut().zip(&uj) {
                *c -= &x * v;
            }
            let dj = dd[j + 1].clone();
            lam[k][j] -= Integer::from(&x * &dj);
            for i in 0..j {
                let t = Integer::from(&x * &lam[j][i]);
                lam[k][i] -= t;
            }
        }
    }
    Ok(())
}

/// Exact verification of size reduction and the Lovász condition.
pub fn check_lll(b: &[Vec<Integer>], delta: &Rational) -> Result<(), String> {
    let (dd, lam) = integral_gso(b).map_err(|e| e.to_string())?;
    let (p, q) = (delta.numer(), delta.denom());
    for k in 1..b.len() {
        for j in 0..k {
            if Integer::from(&lam[k][j] * 2u32).abs() > dd[j + 1] {
                return Err(format!("row {k} not size-reduced against row {j}"));
            }
        }
        // δ·B_{k−1} ≤ B_k + μ²·B_{k−1}  ⇔  p·d_k² ≤ q·(d_{k+1}·d_{k−1} + λ²)
        let lhs = Integer::from(p * Integer::from(dd[k].square_ref()));
        let rhs = Integer::from(q * (Integer::from(&dd[k + 1] * &dd[k - 1]) + Integer::from(lam[k][k - 1].square_ref())));
        if lhs > rhs {
            return Err(format!("Lovász condition fails at row {k}"));
        }
    }
    Ok(())
}

/// Exact determinant by fraction-free elimination.
pub fn determinant(m: &[Vec<Integer>]) -> Integer {
    let n = m.len();
    let mut a: Vec<Vec<Integer>> = m.to_vec();
    let mut sign = 1;
    let mut prev = Integer::from(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else {
            return Integer::new();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (Integer::from(&a[i][j] * &a[k][k]) - Integer::from(&a[i][k] * &a[k][j])) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].clone() * sign
}

#[derive(Clone, Debug, PartialEq)]
pub struct Recognition<T> {
    pub value: T,
    /// Bits by which the relation beats the `2^(-P/2)` acceptance margin.
    pub certified_bits: f64,
}

const GUARD_BITS: u32 = 16;
const FIRST_STAGE_BITS: u32 = 64;

const STAGE_STEP: u32 = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct RecognitionConfig {
    pub delta: Rational,
    /// Largest accepted coefficient, in bits. `None`: half the size of a
    /// generic lattice vector for [`algdep`], `P/4` for [`field_membership`].
    pub max_height_bits: Option<u32>,
}

impl Default for RecognitionConfig {
    fn default() -> Self {
        RecognitionConfig { delta: default_delta(), max_height_bits: None }
    }
}

fn is_real(c: &BigComplex, prec: u32) -> bool {
    c.im().is_zero() || c.im().get_exp().map_or(true, |e| e < -(prec as i32) / 2)
}

/// Integer relations among `cols` (each a complex number, embedded as two
/// columns scaled by `2^s`), with `s` raised in stages up to `prec − 16`.
/// Returns the reduced coefficient rows, shortest first.
fn integer_relations(cols: &[BigComplex], prec: u32, delta: &Rational) -> Result<Vec<Vec<Integer>>, LatticeError> {
    let real = cols.iter().all(|c| is_real(c, prec));
    relations_from(identity(cols.len()), cols, real, prec, FIRST_STAGE_BITS, delta)
}

fn scaled_columns(cols: &[BigComplex], s: u32, prec: u32) -> Vec<(Integer, Integer)> {
    cols.iter()
        .map(|c| {
            let re = Float::with_val(prec + 64, c.re() << s).round().to_integer().unwrap_or_default();
            let im = Float::with_val(prec + 64, c.im() << s).round().to_integer().unwrap_or_default();
            (re, im)
        })
        .collect()
}

fn embed_rows(u: &[Vec<Integer>], scaled: &[(Integer, Integer)], real: bool) -> Vec<Vec<Integer>> {
    u.iter()
        .map(|row| {
            let mut v = row.clone();
            let mut re = Integer::new();
            let mut im = Integer::new();
            for (x, (a, b)) in row.iter().zip(scaled) {
                re += x * a;
                im += x * b;
            }
            v.push(re);
            if !real {
                v.push(im);
            }
            v
        })
        .collect()
}

/// Progressive reduction starting from the coefficient rows `u` at scale `2^first`.
fn relations_from(
    mut u: Vec<Vec<Integer>>,
    cols: &[BigComplex],
    real: bool,
    prec: u32,
    first: u32,
    delta: &Rational,
) -> Result<Vec<Vec<Integer>>, LatticeError> {
    let n = cols.len();
    let top = prec.saturating_sub(GUARD_BITS).max(8);
    let mut s = first.min(top);
    loop {
        let basis = embed_rows(&u, &scaled_columns(cols, s, prec), real);
        let d = if s >= top { delta.clone() } else { Rational::from((3, 4)) };
        let out = lll_reduce(&IntegerLattice::new(basis)?, &d)?;
        u = out.lattice.basis.iter().map(|r| r[..n].to_vec()).collect();
        if s >= top {
            return Ok(u);
        }
        s = (s + STAGE_STEP).min(top);
    }
}

/// Expected bit size of the entries of a generic reduced vector.
fn generic_bits(cols: &[BigComplex], prec: u32) -> f64 {
    let k = if cols.iter().all(|c| is_real(c, prec)) { 1.0 } else { 2.0 };
    k * prec.saturating_sub(GUARD_BITS) as f64 / cols.len() as f64
}

fn height_bits(v: &[Integer]) -> u32 {
    v.iter().map(|c| c.significant_bits()).max().unwrap_or(0)
}

fn eval_relation(coeffs: &[Integer], cols: &[BigComplex], prec: u32) -> (f64, f64) {
    let mut acc = BigComplex::zero(prec);
    let mut norm2 = Integer::new();
    for (c, v) in coeffs.iter().zip(cols) {
        acc = acc.add(&v.mul(&BigComplex::from_integer(c, prec)));
        norm2 += Integer::from(c.square_ref());
    }
    let log_norm = 0.5 * Float::with_val(64, &norm2).log2().to_f64();
    (acc.log2_abs(), log_norm)
}

/// Integer polynomial of degree ≤ `maxdeg` vanishing at `alpha` (ascending
/// coefficients, content 1, positive leading coefficient).
pub fn algdep(alpha: &BigComplex, maxdeg: usize, cfg: &RecognitionConfig) -> Result<Recognition<Vec<Integer>>, LatticeError> {
    let prec = alpha.prec();
    let mut powers = vec![BigComplex::one(prec + 32)];
    let a = alpha.with_prec(prec + 32);
    for i in 1..=maxdeg {
        powers.push(powers[i - 1].mul(&a));
    }
    let rows = integer_relations(&powers, prec, &cfg.delta)?;
    let mut poly = rows[0].clone();
    while poly.len() > 1 && poly.last().map_or(false, |c| *c == 0) {
        poly.pop();
    }
    if poly.len() < 2 {
        return Err(LatticeError::NoRelation("shortest vector is a constant".into()));
    }
    normalize_poly(&mut poly);
    let bound = cfg.max_height_bits.map_or(generic_bits(&powers, prec) / 2.0, f64::from);
    if height_bits(&poly) as f64 > bound {
        return Err(LatticeError::NoRelation(format!(
            "coefficients of {} bits exceed the {bound:.0}-bit height bound at {prec} bits",
            height_bits(&poly)
        )));
    }
    let (log_val, log_norm) = eval_relation(&poly, &powers, prec);
    let certified_bits = -(log_val - log_norm) - prec as f64 / 2.0;
    if certified_bits <= 0.0 {
        return Err(LatticeError::NoRelation(format!(
            "|p(α)| = 2^{log_val:.1} not below 2^(-P/2)·‖p‖ at {prec} bits"
        )));
    }
    Ok(Recognition { value: poly, certified_bits })
}

/// Divides out the content and makes the leading coefficient positive.
pub fn normalize_poly(p: &mut [Integer]) {
    let mut g = Integer::new();
    for c in p.iter() {
        g.gcd_mut(c);
    }
    if g == 0 {
        return;
    }
    if p.last().map_or(false, |c| *c < 0) {
        g = -g;
    }
    for c in p.iter_mut() {
        *c /= &g;
    }
}

/// Rationals `q` with `tau = Σ q_i·beta^i`, `deg` the degree of `beta`.
pub fn field_membership(
    tau: &BigComplex,
    beta: &BigComplex,
    deg: usize,
    cfg: &RecognitionConfig,
) -> Result<Recognition<Vec<Rational>>, LatticeError> {
    MembershipBase::new(beta, deg, tau.prec().min(beta.prec()), cfg)?.recognize(tau)
}

/// Reduced lattice of the powers `β^i`, reusable for many targets `τ`.
pub struct MembershipBase {
    powers: Vec<BigComplex>,
    rows: Vec<Vec<Integer>>,
    real: bool,
    prec: u32,
    cfg: RecognitionConfig,
}

impl MembershipBase {
    pub fn new(beta: &BigComplex, deg: usize, prec: u32, cfg: &RecognitionConfig) -> Result<Self, LatticeError> {
        let prec = prec.min(beta.prec());
        let b = beta.with_prec(prec + 32);
        let mut powers = vec![BigComplex::one(prec + 32)];
        for i in 1..deg {
            powers.push(powers[i - 1].mul(&b));
        }
        let real = powers.iter().all(|c| is_real(c, prec));
        let rows = relations_from(identity(deg), &powers, real, prec, FIRST_STAGE_BITS, &cfg.delta)?;
        Ok(MembershipBase { powers, rows, real, prec, cfg: cfg.clone() })
    }

    pub fn recognize(&self, tau: &BigComplex) -> Result<Recognition<Vec<Rational>>, LatticeError> {
        let prec = self.prec.min(tau.prec());
        let deg = self.powers.len();
        let bound = self.cfg.max_height_bits.unwrap_or(prec / 4);
        let none = || LatticeError::NoRelation(format!("no relation within {bound} bits of height at {prec} bits"));
        let tau_real = is_real(tau, prec);
        if self.real && !tau_real {
            return Err(none());
        }
        let mut cols = self.powers.clone();
        cols.push(tau.with_prec(self.prec + 32));
        let mut u: Vec<Vec<Integer>> = self
            .rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.push(Integer::new());
                r
            })
            .collect();
        let mut last = vec![Integer::new(); deg + 1];
        last[deg] = Integer::from(1);
        u.push(last);
        let top = self.prec.saturating_sub(GUARD_BITS).max(8);
        let rows = relations_from(u, &cols, self.real && tau_real, self.prec, top, &self.cfg.delta)?;
        for row in rows {
            let den = row[deg].clone();
            if den == 0 || height_bits(&row) > bound {
                continue;
            }
            let (log_val, log_norm) = eval_relation(&row, &cols, prec);
            let certified_bits = -(log_val - log_norm) - prec as f64 / 2.0;
            if certified_bits <= 0.0 {
                continue;
            }
            let q = row[..deg].iter().map(|c| -Rational::from((c.clone(), den.clone()))).collect();
            return Ok(Recognition { value: q, certified_bits });
        }
        Err(none())
    }
}

/// `deg k` followed by `k + 1` coefficient lines, constant term first.
pub fn poly_to_text(p: &[Integer]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "deg {}", p.len().saturating_sub(1));
    for c in p {
        let _ = writeln!(s, "{c}");
    }
    s
}

pub fn poly_from_text(text: &str) -> Result<Vec<Integer>, LatticeError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (ln, head) = lines.next().ok_or(LatticeError::Parse { line: 1, msg: "empty input".into() })?;
    let deg: usize = head
        .trim()
        .strip_prefix("deg")
        .and_then(|r| r.trim().parse().ok())
        .ok_or(LatticeError::Parse { line: ln + 1, msg: format!("expected `deg k`, got `{}`", head.trim()) })?;
    let mut out = Vec::with_capacity(deg + 1);
    for (ln, l) in lines {
        let v: Integer = l.trim().parse().map_err(|_| LatticeError::Parse { line: ln + 1, msg: format!("bad integer `{}`", l.trim()) })?;
        out.push(v);
    }
    if out.len() != deg + 1 {
        return Err(LatticeError::Parse { line: 0, msg: format!("expected {} coefficients, found {}", deg + 1, out.len()) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rug::ops::Pow;

    fn ints(rows: &[&[i64]]) -> IntegerLattice {
        IntegerLattice::from_i64(rows).unwrap()
    }

    #[test]
    fn identity_is_fixed() {
        let l = ints(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(lll_reduce(&l, &default_delta()).unwrap().lattice, l);
    }

    #[test]
    fn two_dimensional_example() {
        let out = lll_reduce(&ints(&[&[4, 0], &[3, 1]]), &default_delta()).unwrap();
        let b1 = &out.lattice.basis[0];
        assert_eq!(dot(b1, b1), 2);
        // oracle: no nonzero combination with small coefficients is shorter
        let mut best = i64::MAX;
        for x in -20i64..=20 {
            for y in -20i64..=20 {
                if (x, y) != (0, 0) {
                    let v = (4 * x + 3 * y, y);
                    best = best.min(v.0 * v.0 + v.1 * v.1);
                }
            }
        }
        assert_eq!(best, 2);
    }

    #[test]
    fn dependent_rows_rejected() {
        let err = lll_reduce(&ints(&[&[1, 2], &[2, 4]]), &default_delta()).unwrap_err();
        assert_eq!(err, LatticeError::Dependent);
    }

    #[test]
    fn scrambled_basis_satisfies_bound_and_transform() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 10;
        let base: Vec<Vec<Integer>> =
            (0..n).map(|i| (0..n).map(|j| Integer::from(if i == j { rng.gen_range(50..200) } else { rng.gen_range(-20..20) })).collect()).collect();
        // scramble by a random unimodular matrix (product of elementary operations)
        let mut b = base.clone();
        for _ in 0..60 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                let x = Integer::from(rng.gen_range(-9..=9));
                let bj = b[j].clone();
                for (c, v) in b[i].iter_mut().zip(&bj) {
                    *c += &x * v;
                }
            }
        }
        let l = IntegerLattice::new(b.clone()).unwrap();
        let out = lll_reduce(&l, &default_delta()).unwrap();
        check_lll(&out.lattice.basis, &default_delta()).unwrap();
        assert_eq!(mat_mul(&out.transform, &b), out.lattice.basis);
        assert_eq!(determinant(&out.transform).abs(), 1);
        let det = determinant(&base).abs();
        let b1 = dot(&out.lattice.basis[0], &out.lattice.basis[0]);
        // ‖b1‖ ≤ 2^{9/4}·det^{1/10}  ⇔  ‖b1‖^20 ≤ 2^45·det^2
        assert!(b1.clone().pow(10) <= (Integer::from(1) << 45) * Integer::from(det.square_ref()));
    }

    fn real(v: &str, prec: u32) -> BigComplex {
        BigComplex::parse(v, "0", prec).unwrap()
    }

    fn as_i64(p: &[Integer]) -> Vec<i64> {
        p.iter().map(|c| c.to_i64().unwrap()).collect()
    }

    #[test]
    fn algdep_small_cases() {
        let d = RecognitionConfig::default();
        assert_eq!(as_i64(&algdep(&real("1.5", 128), 1, &d).unwrap().value), vec![-3, 2]);
        let s2 = BigComplex::from_i64(2, 200).sqrt();
        assert_eq!(as_i64(&algdep(&s2, 2, &d).unwrap().value), vec![-2, 0, 1]);
    }

    #[test]
    fn algdep_sum_of_radicals_matches_resultant() {
        let prec = 300;
        let two = Float::with_val(prec, 2);
        let a = Float::with_val(prec, two.cbrt_ref()) + Float::with_val(prec, two.sqrt_ref());
        let alpha = BigComplex::new(a, Float::new(prec));
        let r = algdep(&alpha, 6, &RecognitionConfig::default()).unwrap();
        // Res_y(y³ − 2, (x − y)² − 2) = x⁶ − 6x⁴ − 4x³ + 12x² − 24x − 4
        assert_eq!(as_i64(&r.value), vec![-4, -24, 12, -4, -6, 0, 1]);
        assert!(r.certified_bits > 0.0);
    }

    #[test]
    fn membership_golden_ratio() {
        let prec = 256;
        let s5 = BigComplex::from_i64(5, prec).sqrt();
        let phi = s5.add(&BigComplex::one(prec)).div(&BigComplex::from_i64(2, prec));
        let q = field_membership(&s5, &phi, 2, &RecognitionConfig::default()).unwrap().value;
        assert_eq!(q, vec![Rational::from(-1), Rational::from(2)]);
        let q = field_membership(&phi, &phi, 2, &RecognitionConfig::default()).unwrap().value;
        assert_eq!(q, vec![Rational::from(0), Rational::from(1)]);
        let seven_thirds = BigComplex::from_i64(7, prec).div(&BigComplex::from_i64(3, prec));
        let q = field_membership(&seven_thirds, &phi, 2, &RecognitionConfig::default()).unwrap().value;
        assert_eq!(q, vec![Rational::from((7, 3)), Rational::from(0)]);
    }

    #[test]
    fn transcendental_input_has_no_relation() {
        let pi = BigComplex::new(Float::with_val(256, rug::float::Constant::Pi), Float::new(256));
        let cfg = RecognitionConfig::default();
        for d in 1..=4 {
            assert!(matches!(algdep(&pi, d, &cfg), Err(LatticeError::NoRelation(_))));
        }
    }

    #[test]
    fn residual_shrinks_with_precision() {
        let cfg = RecognitionConfig::default();
        let mut prev = f64::INFINITY;
        for prec in [200, 400, 800] {
            let alpha = BigComplex::from_i64(3, prec).sqrt().add(&BigComplex::from_f64(0.0, 1.0, prec));
            let p = algdep(&alpha, 4, &cfg).unwrap().value;
            let hi = BigComplex::from_i64(3, 4 * prec).sqrt().add(&BigComplex::from_f64(0.0, 1.0, 4 * prec));
            let cols: Vec<BigComplex> = (0..p.len()).map(|i| pow(&hi, i)).collect();
            let v = eval_relation(&p, &cols, 4 * prec).0;
            assert!(v < prev);
            prev = v;
        }
    }

    fn pow(x: &BigComplex, k: usize) -> BigComplex {
        (0..k).fold(BigComplex::one(x.prec()), |acc, _| acc.mul(x))
    }

    #[test]
    fn polynomial_text_round_trip() {
        let p: Vec<Integer> = [-2i64, 0, 1].iter().map(|&c| Integer::from(c)).collect();
        let t = poly_to_text(&p);
        assert_eq!(t, "deg 2\n-2\n0\n1\n");
        assert_eq!(poly_from_text(&t).unwrap(), p);
        assert!(poly_from_text("deg 2\n1\n").is_err());
    }
}
