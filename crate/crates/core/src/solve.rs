//! Newton refinement with precision escalation, multistart search and
//! solution files.
//!
//! The multistart search works in an affine search gauge: the `pc` scale is an
//! unknown pinned to 1 and the largest `p3` factor has zero root sum. Each
//! start tries full Newton steps first and falls back to damped Newton.
//! Converged points are moved to the canonical gauge of the ansatz before
//! deduplication:
//!
//! - principal width 1: `x ↦ s·x` makes the scale 1, then a shift enforces
//!   the hauptmodul equation;
//! - otherwise: a shift kills the root sum of the translation factor and
//!   `x ↦ t·x` sets the first nonzero weight-1 coefficient `t` (factor
//!   order, translation factor excluded) to 1.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ansatz::{AnsatzError, BelyiAnsatz, GaugeKind, NormalizationSpec};
use crate::linalg::{default_rank_tolerance, linear_solve, LinalgError};
use crate::numeric::{poly_affine_substitute, poly_mul, BigComplex, Scalar, F64_BITS};
use crate::roots::polynomial_roots;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Ansatz(#[from] AnsatzError),
    #[error("Jacobian numerically singular at {bits} bits (rank {rank} of {cols})")]
    RankDeficient { bits: u32, rank: usize, cols: usize },
    #[error("Newton diverged at {bits} bits (relative residual 2^{residual:.1})")]
    Divergence { bits: u32, residual: f64 },
    #[error("iteration budget exhausted at {bits} bits (relative residual 2^{residual:.1})")]
    BudgetExhausted { bits: u32, residual: f64 },
    #[error("no solution found from {starts} starts")]
    NoSolution { starts: usize },
    #[error("solution file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionConfig {
    pub start_bits: u32,
    pub target_bits: u32,
    /// Newton iterations allowed at each precision level.
    pub max_iterations: usize,
    /// Smallest damping factor tried, as `2^-damping_floor`.
    pub damping_floor: u32,
    /// Accept when the relative residual drops below `2^(-accept·bits)`.
    pub accept: f64,
    /// Double the precision once it drops below `2^(-escalate·bits)`.
    pub escalate: f64,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            start_bits: 128,
            target_bits: 512,
            max_iterations: 60,
            damping_floor: 10,
            accept: 0.9,
            escalate: 0.4,
        }
    }
}

impl PrecisionConfig {
    pub fn with_target(target_bits: u32) -> Self {
        PrecisionConfig { target_bits, start_bits: 128.min(target_bits), ..Default::default() }
    }
}

/// A square or overdetermined polynomial system with a relative residual.
pub trait System: Sync {
    fn variables(&self) -> usize;
    /// Residual vector and, per row, `log2` of the size of its largest term.
    fn residual_scaled<T: Scalar>(&self, x: &[T], prec: u32) -> Result<(Vec<T>, Vec<f64>), SolveError>;
    fn jacobian<T: Scalar>(&self, x: &[T], prec: u32) -> Result<Vec<Vec<T>>, SolveError>;

    fn relative_residual<T: Scalar>(&self, x: &[T], prec: u32) -> Result<f64, SolveError> {
        let (r, s) = self.residual_scaled(x, prec)?;
        Ok(relative(&r, &s))
    }
}

fn relative<T: Scalar>(r: &[T], s: &[f64]) -> f64 {
    r.iter().zip(s).map(|(r, s)| r.log2_abs() - s).fold(f64::NEG_INFINITY, f64::max)
}

/// `log2` of the Euclidean norm of the relative residual vector.
fn merit<T: Scalar>(r: &[T], s: &[f64]) -> f64 {
    let top = relative(r, s);
    if !top.is_finite() {
        return top;
    }
    let sum: f64 = r.iter().zip(s).map(|(r, s)| (r.log2_abs() - s - top).exp2().powi(2)).sum();
    top + 0.5 * sum.log2()
}

impl System for BelyiAnsatz {
    fn variables(&self) -> usize {
        self.variable_count()
    }
    fn residual_scaled<T: Scalar>(&self, x: &[T], prec: u32) -> Result<(Vec<T>, Vec<f64>), SolveError> {
        Ok(self.residual_with_scale(x, prec)?)
    }
    fn jacobian<T: Scalar>(&self, x: &[T], prec: u32) -> Result<Vec<Vec<T>>, SolveError> {
        Ok(BelyiAnsatz::jacobian(self, x, prec)?)
    }
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome<T> {
    pub x: Vec<T>,
    pub prec: u32,
    pub residual_log2: f64,
}

fn power_of_two<T: Scalar>(e: i32, prec: u32) -> T {
    T::from_f64(2f64.powi(e), 0.0, prec)
}

/// Solves `J·dx = r` after scaling rows and columns of `J` by powers of two
/// to unit max-norm. Returns the unscaled `dx`.
fn equilibrated_solve<T: Scalar>(mut jac: Vec<Vec<T>>, mut rhs: Vec<T>, prec: u32) -> Result<Vec<T>, LinalgError> {
    let exponent = |v: f64| if v.is_finite() { -(v.round() as i32) } else { 0 };
    for (row, b) in jac.iter_mut().zip(rhs.iter_mut()) {
        let e = exponent(row.iter().map(|c| c.log2_abs()).fold(f64::NEG_INFINITY, f64::max));
        let f: T = power_of_two(e, prec);
        for c in row.iter_mut() {
            *c = c.mul(&f);
        }
        *b = b.mul(&f);
    }
    let cols = jac.first().map_or(0, |r| r.len());
    let mut col_scale = Vec::with_capacity(cols);
    for j in 0..cols {
        let e = exponent(jac.iter().map(|r| r[j].log2_abs()).fold(f64::NEG_INFINITY, f64::max));
        let f: T = power_of_two(e, prec);
        for row in jac.iter_mut() {
            row[j] = row[j].mul(&f);
        }
        col_scale.push(f);
    }
    let sol = linear_solve(&jac, &rhs, default_rank_tolerance(prec))?;
    Ok(sol.x.iter().zip(&col_scale).map(|(x, f)| x.mul(f)).collect())
}

/// Damped Newton at a fixed precision until the relative residual is below `2^-stop_bits`.
pub fn newton_at<T: Scalar, S: System>(
    sys: &S,
    x0: Vec<T>,
    prec: u32,
    stop_bits: f64,
    cfg: &PrecisionConfig,
) -> Result<NewtonOutcome<T>, SolveError> {
    let mut x = x0;
    let (mut r, s) = sys.residual_scaled(&x, prec)?;
    let mut rel = relative(&r, &s);
    let mut m = merit(&r, &s);
    for _ in 0..cfg.max_iterations {
        if rel <= -stop_bits {
            return Ok(NewtonOutcome { x, prec, residual_log2: rel });
        }
        let jac = sys.jacobian(&x, prec)?;
        let rhs: Vec<T> = r.iter().map(|v| v.neg()).collect();
        let dx = match equilibrated_solve(jac, rhs, prec) {
            Ok(sol) => sol,
            Err(LinalgError::RankDeficient { rank, cols }) => {
                return Err(SolveError::RankDeficient { bits: prec, rank, cols })
            }
            Err(LinalgError::Shape { .. }) => unreachable!("system shape is fixed"),
        };
        let mut t = T::one(prec);
        let half = T::from_f64(0.5, 0.0, prec);
        let mut accepted = false;
        for _ in 0..=cfg.damping_floor {
            let trial: Vec<T> = x.iter().zip(&dx).map(|(a, d)| a.add(&d.mul(&t))).collect();
            let (tr, ts) = sys.residual_scaled(&trial, prec)?;
            let tm = merit(&tr, &ts);
            if tm < m {
                x = trial;
                rel = relative(&tr, &ts);
                r = tr;
                m = tm;
                accepted = true;
                break;
            }
            t = t.mul(&half);
        }
        if !accepted {
            // no progress possible at this precision
            if rel <= -0.75 * stop_bits.min(0.9 * prec as f64) {
                return Ok(NewtonOutcome { x, prec, residual_log2: rel });
            }
            return Err(SolveError::Divergence { bits: prec, residual: rel });
        }
    }
    if rel <= -stop_bits {
        return Ok(NewtonOutcome { x, prec, residual_log2: rel });
    }
    Err(SolveError::BudgetExhausted { bits: prec, residual: rel })
}

/// Newton through the precision ladder `start_bits, 2·start_bits, …, target_bits`.
pub fn newton_refine<S: System>(
    sys: &S,
    x0: &[BigComplex],
    cfg: &PrecisionConfig,
) -> Result<NewtonOutcome<BigComplex>, SolveError> {
    let target = cfg.target_bits.max(F64_BITS);
    let mut bits = cfg.start_bits.clamp(F64_BITS, target);
    let mut x: Vec<BigComplex> = x0.iter().map(|c| c.with_prec(bits)).collect();
    loop {
        let stop = if bits >= target { cfg.accept } else { cfg.escalate } * bits as f64;
        let out = newton_at(sys, x, bits, stop, cfg)?;
        if bits >= target {
            return Ok(out);
        }
        bits = (bits * 2).min(target);
        x = out.x.iter().map(|c| c.with_prec(bits)).collect();
    }
}

/// Numerical rank of the Jacobian at `x`.
pub fn jacobian_rank<S: System>(sys: &S, x: &[BigComplex], prec: u32) -> Result<usize, SolveError> {
    let jac: Vec<Vec<BigComplex>> = sys.jacobian(x, prec)?;
    let zero = vec![BigComplex::zero(prec); jac.len()];
    Ok(match equilibrated_solve(jac, zero, prec) {
        Ok(s) => s.len(),
        Err(LinalgError::RankDeficient { rank, .. }) => rank,
        Err(LinalgError::Shape { .. }) => 0,
    })
}

#[derive(Clone, Debug)]
pub struct NumericSolution {
    /// The ansatz in the gauge the coefficients satisfy.
    pub ansatz: BelyiAnsatz,
    pub prec: u32,
    /// One value per variable of `ansatz`, in unknown order.
    pub coeffs: Vec<BigComplex>,
    pub residual_log2: f64,
    pub jacobian_rank: usize,
}

impl NumericSolution {
    fn from_outcome(ansatz: BelyiAnsatz, out: NewtonOutcome<BigComplex>) -> Result<Self, SolveError> {
        let jacobian_rank = jacobian_rank(&ansatz, &out.x, out.prec)?;
        Ok(NumericSolution {
            ansatz,
            prec: out.prec,
            coeffs: out.x,
            residual_log2: out.residual_log2,
            jacobian_rank,
        })
    }

    pub fn value(&self, symbol: &str) -> Option<&BigComplex> {
        self.ansatz.index_of(symbol).ok().map(|i| &self.coeffs[i])
    }

    /// `precision_bits`, `unknowns`, optional `gauge` lines, then one `symbol re im` line per variable.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "precision_bits {}", self.prec);
        let _ = writeln!(s, "unknowns {}", self.ansatz.variable_count());
        if self.ansatz.normalization.kind == GaugeKind::Affine {
            for &(u, v) in &self.ansatz.normalization.gauge_fixes {
                let _ = writeln!(s, "gauge {} {}", self.ansatz.symbol(u), v);
            }
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            let (re, im) = c.to_decimal_strings();
            let _ = writeln!(s, "{} {} {}", self.ansatz.symbol(i), re, im);
        }
        s
    }

    /// Parses a solution file against `ansatz`. `gauge` lines switch to the affine
    /// gauge with those fixes.
    pub fn from_text(ansatz: &BelyiAnsatz, text: &str) -> Result<Self, SolveError> {
        let err = |line: usize, msg: String| SolveError::Parse { line, msg };
        let mut prec = None;
        let mut declared = None;
        let mut fixes: Vec<(String, i64, usize)> = Vec::new();
        let mut values: Vec<(String, String, String, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok[0] {
                "precision_bits" if tok.len() == 2 => {
                    prec = Some(tok[1].parse::<u32>().map_err(|e| err(ln, e.to_string()))?)
                }
                "unknowns" if tok.len() == 2 => {
                    declared = Some(tok[1].parse::<usize>().map_err(|e| err(ln, e.to_string()))?)
                }
                "gauge" if tok.len() == 3 => {
                    let v = tok[2].parse::<i64>().map_err(|e| err(ln, e.to_string()))?;
                    fixes.push((tok[1].to_string(), v, ln));
                }
                _ if tok.len() == 3 => values.push((tok[0].into(), tok[1].into(), tok[2].into(), ln)),
                _ => return Err(err(ln, format!("unrecognised line `{line}`"))),
            }
        }
        let prec = prec.ok_or_else(|| err(0, "missing precision_bits".into()))?;
        let mut a = ansatz.clone();
        if !fixes.is_empty() {
            let mut spec = a.normalization.clone();
            spec.kind = GaugeKind::Affine;
            spec.linear_equation.clear();
            spec.gauge_fixes.clear();
            a.normalization = spec.clone();
            for (sym, v, ln) in &fixes {
                let u = a.index_of(sym).map_err(|e| err(*ln, e.to_string()))?;
                spec.gauge_fixes.push((u, *v));
            }
            a.normalization = spec;
        }
        let count = a.variable_count();
        if let Some(d) = declared {
            if d != count {
                return Err(err(0, format!("unknowns {d} but the ansatz has {count}")));
            }
        }
        let mut coeffs: Vec<Option<BigComplex>> = vec![None; count];
        for (sym, re, im, ln) in values {
            let u = a.index_of(&sym).map_err(|e| err(ln, e.to_string()))?;
            let v = BigComplex::parse(&re, &im, prec).ok_or_else(|| err(ln, format!("bad number in `{sym}`")))?;
            coeffs[u] = Some(v);
        }
        let coeffs: Vec<BigComplex> = coeffs
            .into_iter()
            .enumerate()
            .map(|(u, c)| c.ok_or_else(|| err(0, format!("missing value for {}", a.symbol(u)))))
            .collect::<Result<_, _>>()?;
        let residual_log2 = a.relative_residual_log2(&coeffs, prec)?;
        Ok(NumericSolution { ansatz: a, prec, coeffs, residual_log2, jacobian_rank: 0 })
    }
}

/// Refines a starting point in the gauge of `ansatz`.
pub fn refine_guess(ansatz: &BelyiAnsatz, guess: &[BigComplex], cfg: &PrecisionConfig) -> Result<NumericSolution, SolveError> {
    let out = newton_refine(ansatz, guess, cfg)?;
    NumericSolution::from_outcome(ansatz.clone(), out)
}

/// Affine ansatz with the translation row `t = 0` and the scale row `s = 1`.
struct SearchSystem {
    ansatz: BelyiAnsatz,
    translation: usize,
}

impl SearchSystem {
    fn new(base: &BelyiAnsatz) -> Self {
        let mut spec = base.normalization.clone();
        spec.kind = GaugeKind::Affine;
        spec.linear_equation.clear();
        spec.gauge_fixes.clear();
        let ansatz = base.with_normalization(spec);
        let tf = ansatz.translation_factor().expect("p3 has a factor");
        let translation = ansatz.factors[tf].subleading();
        SearchSystem { ansatz, translation }
    }
}

impl System for SearchSystem {
    fn variables(&self) -> usize {
        self.ansatz.variable_count()
    }
    fn residual_scaled<T: Scalar>(&self, x: &[T], prec: u32) -> Result<(Vec<T>, Vec<f64>), SolveError> {
        let (mut r, mut s) = self.ansatz.residual_with_scale(x, prec)?;
        let t = x[self.translation].with_prec(prec);
        s.push(t.log2_abs().max(0.0));
        r.push(t);
        r.push(x[self.ansatz.unknowns].with_prec(prec).sub(&T::one(prec)));
        s.push(0.0);
        Ok((r, s))
    }
    fn jacobian<T: Scalar>(&self, x: &[T], prec: u32) -> Result<Vec<Vec<T>>, SolveError> {
        let mut j = self.ansatz.jacobian(x, prec)?;
        let cols = self.variables();
        for u in [self.translation, self.ansatz.unknowns] {
            let mut row = vec![T::zero(prec); cols];
            row[u] = T::one(prec);
            j.push(row);
        }
        Ok(j)
    }
}

/// `x ↦ λy + μ` applied to a point of the scaled (affine) ansatz.
fn substitute<T: Scalar>(a: &BelyiAnsatz, x: &[T], lambda: &T, mu: &T) -> Vec<T> {
    let mut out = x.to_vec();
    for (i, f) in a.factors.iter().enumerate() {
        let p = poly_affine_substitute(&a.factor_poly(x, i), lambda, mu);
        out[f.offset..f.offset + f.degree].clone_from_slice(&p[..f.degree]);
    }
    if a.has_scale() {
        let prec = lambda.prec();
        let mut lh = T::one(prec);
        for _ in 0..a.principal_width {
            lh = lh.mul(lambda);
        }
        out[a.unknowns] = x[a.unknowns].div(&lh);
    }
    out
}

/// Moves a point of the search gauge to the canonical gauge; returns the target
/// ansatz and coordinates.
fn canonicalize<T: Scalar>(base: &BelyiAnsatz, search: &BelyiAnsatz, x: &[T]) -> Option<(BelyiAnsatz, Vec<T>)> {
    let prec = x[0].prec();
    let one = T::one(prec);
    let zero = T::zero(prec);
    let h = base.principal_width;
    if base.normalization.kind == GaugeKind::Hauptmodul {
        let k = x[search.unknowns].clone();
        if k.is_zero() {
            return None;
        }
        let y = substitute(search, x, &k, &zero);
        let mut n = T::zero(prec);
        for &(u, c) in &base.normalization.linear_equation {
            n = n.add(&y[u].mul_i64(c));
        }
        let mu = T::from_i64(base.normalization.j_constants.0, prec).sub(&n).div(&T::from_i64(h as i64, prec));
        let mut z = substitute(search, &y, &one, &mu);
        z.truncate(base.unknowns);
        return Some((base.clone(), z));
    }
    let tf = search.translation_factor()?;
    let ft = &search.factors[tf];
    let mu = x[ft.subleading()].div(&T::from_i64(ft.degree as i64, prec)).neg();
    let y = substitute(search, x, &one, &mu);
    let weight_one: Vec<usize> = search
        .factors
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != tf)
        .map(|(_, f)| f.subleading())
        .collect();
    let biggest = weight_one.iter().map(|&u| y[u].log2_abs()).fold(f64::NEG_INFINITY, f64::max);
    let pivot = *weight_one.iter().find(|&&u| y[u].log2_abs() > biggest - 20.0)?;
    let z = substitute(search, &y, &y[pivot], &zero);
    let spec = NormalizationSpec {
        kind: GaugeKind::Affine,
        j_constants: base.normalization.j_constants,
        linear_equation: Vec::new(),
        gauge_fixes: vec![(ft.subleading(), 0), (pivot, 1)],
    };
    Some((base.with_normalization(spec), z))
}

fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        p = poly_mul(&p, &[-r, Complex64::new(1.0, 0.0)]);
    }
    p
}

fn random_in_disc(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm_sqr() <= 1.0 {
            return z;
        }
    }
}

/// Random roots for every factor, the translation factor centred, then
/// `x ↦ λx` with `λ^h` the least-squares scale of `p3 − p2 = 1728·k·pc`.
/// Even starts draw roots uniformly from the unit disc; odd starts use a
/// uniform argument and a radius log-uniform over two decades.
fn random_start(sys: &SearchSystem, rng: &mut ChaCha8Rng, index: usize) -> Option<Vec<Complex64>> {
    let a = &sys.ansatz;
    let tf = a.translation_factor()?;
    let mut draw = || {
        if index % 2 == 0 {
            random_in_disc(rng)
        } else {
            let r = 10f64.powf(-2.0 * rng.gen::<f64>());
            Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        }
    };
    let mut roots: Vec<Vec<Complex64>> = a.factors.iter().map(|f| (0..f.degree).map(|_| draw()).collect()).collect();
    let shift = roots[tf].iter().sum::<Complex64>() / roots[tf].len() as f64;
    let mut x = vec![Complex64::new(0.0, 0.0); a.variable_count()];
    let fill = |x: &mut Vec<Complex64>, roots: &[Vec<Complex64>]| {
        for (f, r) in a.factors.iter().zip(roots) {
            let p = poly_from_roots(r);
            x[f.offset..f.offset + f.degree].copy_from_slice(&p[..f.degree]);
        }
    };
    for r in roots.iter_mut().flatten() {
        *r -= shift;
    }
    fill(&mut x, &roots);
    x[a.unknowns] = Complex64::new(1.0, 0.0);
    let (p3, p2, pc) = a.products(&x);
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for i in 0..a.n {
        let c = pc.get(i).copied().unwrap_or_default() * 1728.0;
        let d = p3.get(i).copied().unwrap_or_default() - p2.get(i).copied().unwrap_or_default();
        num += c.conj() * d;
        den += c.norm_sqr();
    }
    let k = num / den;
    if !k.is_finite() || k.norm() < 1e-12 {
        return None;
    }
    let lambda = k.powf(1.0 / a.principal_width as f64);
    for r in roots.iter_mut().flatten() {
        *r /= lambda;
    }
    fill(&mut x, &roots);
    Some(x)
}

/// Full Newton steps at double precision; `None` on blow-up or no convergence.
fn plain_newton<S: System>(sys: &S, mut x: Vec<Complex64>, stop_bits: f64, iterations: usize) -> Option<Vec<Complex64>> {
    for _ in 0..iterations {
        let (r, s) = sys.residual_scaled(&x, F64_BITS).ok()?;
        if relative(&r, &s) <= -stop_bits {
            return Some(x);
        }
        let jac = sys.jacobian(&x, F64_BITS).ok()?;
        let rhs: Vec<Complex64> = r.iter().map(|v| -v).collect();
        let dx = equilibrated_solve(jac, rhs, F64_BITS).ok()?;
        for (a, d) in x.iter_mut().zip(&dx) {
            *a += d;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    None
}

/// Smallest distance between roots of the factors, relative to the diameter of
/// all roots, must exceed this.
const GENERIC_SEPARATION: f64 = 1e-4;

/// All roots of all factors pairwise distinct, scale nonzero.
fn is_generic(a: &BelyiAnsatz, x: &[Complex64]) -> bool {
    if a.has_scale() && x[a.unknowns].norm() < 1e-10 {
        return false;
    }
    let mut all = Vec::new();
    for i in 0..a.factors.len() {
        let p: Vec<BigComplex> = a.factor_poly(x, i).iter().map(|c| c.to_big()).collect();
        match polynomial_roots(&p, 64) {
            Ok(r) => all.extend(r.iter().map(|z| z.to_c64())),
            Err(_) => return false,
        }
    }
    let mut diameter: f64 = 0.0;
    let mut closest = f64::INFINITY;
    for i in 0..all.len() {
        for j in 0..i {
            let d = (all[i] - all[j]).norm();
            diameter = diameter.max(d);
            closest = closest.min(d);
        }
    }
    all.len() < 2 || closest > GENERIC_SEPARATION * diameter
}

fn same_point(a: &[Complex64], b: &[Complex64]) -> bool {
    let tol = 2f64.powi(-20);
    a.len() == b.len() && a.iter().zip(b).all(|(u, v)| (u - v).norm() <= tol * u.norm().max(1.0))
}

fn lex_key(x: &[BigComplex]) -> Vec<(f64, f64)> {
    x.iter().map(|c| c.to_c64()).map(|c| (c.re, c.im)).collect()
}

#[derive(Clone, Debug)]
pub struct MultistartConfig {
    pub starts: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
    pub precision: PrecisionConfig,
}

impl Default for MultistartConfig {
    fn default() -> Self {
        MultistartConfig { starts: 4000, seed: 1, threads: 0, precision: PrecisionConfig::default() }
    }
}

/// One low-precision attempt; `None` on failure or a degenerate point.
fn attempt(base: &BelyiAnsatz, sys: &SearchSystem, seed: u64, index: usize) -> Option<(BelyiAnsatz, Vec<Complex64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let x0 = random_start(sys, &mut rng, index)?;
    let x = match plain_newton(sys, x0.clone(), 40.0, 100) {
        Some(x) => x,
        None => {
            let cfg = PrecisionConfig { max_iterations: 150, damping_floor: 20, ..Default::default() };
            newton_at(sys, x0, F64_BITS, 40.0, &cfg).ok()?.x
        }
    };
    if !is_generic(&sys.ansatz, &x) {
        return None;
    }
    let (target, y) = canonicalize(base, &sys.ansatz, &x)?;
    if target.relative_residual_log2(&y, F64_BITS).ok()? > -30.0 {
        return None;
    }
    Some((target, y))
}

/// Random-start search for the solution classes of `base`, each refined to
/// `cfg.precision.target_bits`. Sorted lexicographically by coefficients and
/// independent of the thread count; empty when no start succeeds.
pub fn multistart_search(base: &BelyiAnsatz, cfg: &MultistartConfig) -> Vec<NumericSolution> {
    let search = SearchSystem::new(base);
    let run = || -> Vec<Option<(BelyiAnsatz, Vec<Complex64>)>> {
        (0..cfg.starts).into_par_iter().map(|i| attempt(base, &search, cfg.seed, i)).collect()
    };
    let found = with_threads(cfg.threads, run);
    let mut classes: Vec<(BelyiAnsatz, Vec<Complex64>)> = Vec::new();
    for (a, x) in found.into_iter().flatten() {
        if !classes.iter().any(|(b, y)| b.normalization == a.normalization && same_point(y, &x)) {
            classes.push((a, x));
        }
    }
    let refine = || -> Vec<Result<NumericSolution, SolveError>> {
        classes
            .par_iter()
            .map(|(a, x)| {
                let guess: Vec<BigComplex> = x.iter().map(|c| c.to_big()).collect();
                refine_guess(a, &guess, &cfg.precision)
            })
            .collect()
    };
    let refined = with_threads(cfg.threads, refine);
    let mut out: Vec<NumericSolution> = Vec::new();
    for s in refined.into_iter().flatten() {
        let key: Vec<Complex64> = s.coeffs.iter().map(|c| c.to_c64()).collect();
        let dup = out.iter().any(|t| {
            t.ansatz.normalization == s.ansatz.normalization
                && same_point(&t.coeffs.iter().map(|c| c.to_c64()).collect::<Vec<_>>(), &key)
        });
        if !dup {
            out.push(s);
        }
    }
    out.sort_by(|a, b| {
        lex_key(&a.coeffs)
            .iter()
            .zip(lex_key(&b.coeffs).iter())
            .map(|(u, v)| u.0.total_cmp(&v.0).then(u.1.total_cmp(&v.1)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    if threads == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::build_ansatz;
    use crate::perm::{gamma0_triple, Permutation};
    use crate::triple::{profile, PermutationTriple};

    struct SqrtTwo;

    impl System for SqrtTwo {
        fn variables(&self) -> usize {
            1
        }
        fn residual_scaled<T: Scalar>(&self, x: &[T], prec: u32) -> Result<(Vec<T>, Vec<f64>), SolveError> {
            let sq = x[0].with_prec(prec).mul(&x[0].with_prec(prec));
            let scale = sq.log2_abs().max(1.0);
            Ok((vec![sq.sub(&T::from_i64(2, prec))], vec![scale]))
        }
        fn jacobian<T: Scalar>(&self, x: &[T], prec: u32) -> Result<Vec<Vec<T>>, SolveError> {
            Ok(vec![vec![x[0].with_prec(prec).mul_i64(2)]])
        }
    }

    #[test]
    fn sqrt_two_through_the_ladder() {
        let cfg = PrecisionConfig::with_target(1024);
        let out = newton_refine(&SqrtTwo, &[BigComplex::from_i64(1, 64)], &cfg).unwrap();
        assert_eq!(out.prec, 1024);
        assert!(out.residual_log2 <= -0.9 * 1024.0);
        let s = rug::Float::with_val(1024, 2).sqrt();
        let err = rug::Float::with_val(1024, out.x[0].re() - &s);
        assert!(err.is_zero() || err.get_exp().unwrap() < -900);
    }

    #[test]
    fn index_one_converges_from_nearby_start() {
        let t = PermutationTriple::from_pair(Permutation::identity(1), Permutation::identity(1)).unwrap();
        let a = build_ansatz(&profile(&t).unwrap()).unwrap();
        let guess = [BigComplex::from_i64(700, 64), BigComplex::from_i64(-900, 64)];
        let s = refine_guess(&a, &guess, &PrecisionConfig::with_target(256)).unwrap();
        assert_eq!(s.value("f0").unwrap().round_gaussian(), (744.into(), 0.into()));
        assert_eq!(s.value("d0").unwrap().round_gaussian(), ((-984).into(), 0.into()));
        assert_eq!(s.jacobian_rank, 2);
    }

    #[test]
    fn multistart_finds_gamma0_2() {
        let a = build_ansatz(&profile(&gamma0_triple(2)).unwrap()).unwrap();
        let cfg = MultistartConfig { starts: 64, ..Default::default() };
        let sols = multistart_search(&a, &cfg);
        assert_eq!(sols.len(), 1);
        let s = &sols[0];
        let want = [("a0", 232), ("d0", 40), ("e0", -536), ("c0", -24)];
        for (sym, v) in want {
            let (re, im) = s.value(sym).unwrap().round_gaussian();
            assert_eq!((re, im), (v.into(), 0.into()), "{sym}");
        }
        assert!(s.residual_log2 <= -0.9 * 512.0);
    }

    #[test]
    fn solution_file_round_trip() {
        let a = build_ansatz(&profile(&gamma0_triple(3)).unwrap()).unwrap();
        let sols = multistart_search(&a, &MultistartConfig { starts: 200, ..Default::default() });
        let text = sols[0].to_text();
        let back = NumericSolution::from_text(&a, &text).unwrap();
        assert_eq!(back.coeffs, sols[0].coeffs);
        assert!(back.residual_log2 < -400.0);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let a = build_ansatz(&profile(&gamma0_triple(4)).unwrap()).unwrap();
        let one = multistart_search(&a, &MultistartConfig { starts: 2000, threads: 1, ..Default::default() });
        let four = multistart_search(&a, &MultistartConfig { starts: 2000, threads: 4, ..Default::default() });
        assert!(!one.is_empty());
        assert_eq!(one.len(), four.len());
        for (u, v) in one.iter().zip(&four) {
            assert_eq!(u.to_text(), v.to_text());
        }
    }

    #[test]
    fn degree_seven_has_two_conjugate_classes() {
        let s0 = Permutation::from_cycles(7, &[&[1, 2], &[3, 4]]).unwrap();
        let s1 = Permutation::from_images(&[1, 3, 5, 6, 2, 7, 4]).unwrap();
        let t = PermutationTriple::from_pair(s0, s1).unwrap();
        let a = build_ansatz(&profile(&t).unwrap()).unwrap();
        let sols = multistart_search(&a, &MultistartConfig { starts: 4000, ..Default::default() });
        assert_eq!(sols.len(), 2);
    }

    #[test]
    fn gamma0_5_single_class() {
        let a = build_ansatz(&profile(&gamma0_triple(5)).unwrap()).unwrap();
        let sols = multistart_search(&a, &MultistartConfig { starts: 2000, ..Default::default() });
        assert_eq!(sols.len(), 1);
    }
}
