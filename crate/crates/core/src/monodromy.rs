//! Monodromy of a Belyi map by numerical continuation of the fiber.
//!
//! The base point is a negative real `y0` with `−1728 < y0 < 0` (default −1000).
//! Loops, all based at `y0`:
//! - around 0: the circle `|y| = |y0|`, counterclockwise;
//! - around 1728: the lower half of that circle to `|y0|`, the circle of
//!   radius `1728 − |y0|` about 1728 counterclockwise, then back;
//! - around ∞: the circle about 1728 through `y0`, clockwise.
//!
//! A loop acts by sending the label of the root where a path ends to the
//! label of the root it started from. With this labeling `σ1` (around 0),
//! `σ0` (around 1728) and `σ∞` satisfy `σ0·σ1·σ∞ = 1`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::exactnf::CertifiedBelyiMap;
use crate::numeric::{poly_eval, poly_eval_with_derivative, BigComplex, Scalar};
use crate::perm::{Permutation, PermError};
use crate::roots::{sorted_roots, RootError};
use crate::solve::NumericSolution;
use crate::triple::{PermutationTriple, TripleError};

pub const DEFAULT_BASE_POINT: i64 = -1000;
pub const DEFAULT_MAX_DEGREE: usize = 64;
pub const DEFAULT_TRACKING_BITS: u32 = 128;

const CORRECTOR_ITERATIONS: usize = 8;
const MIN_STEP_LOG2: i32 = -40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonodromyError {
    #[error("p3 − y·pc must have exact degree deg p3 > deg pc")]
    Degenerate,
    #[error("base point must be a negative real in (−1728, 0)")]
    BadBasePoint,
    #[error("fiber roots clustered (separation 2^{separation_log2:.1}); move the base point")]
    Clustered { separation_log2: f64 },
    #[error("path crossing on loop around {target} at parameter {t:.6}")]
    PathCrossing { target: &'static str, t: f64 },
    #[error("loop around {target} does not return to the fiber")]
    NotClosed { target: &'static str },
    #[error("degree {degree} exceeds the monodromy limit {limit}")]
    DegreeLimit { degree: usize, limit: usize },
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("recovered permutations are not a valid triple: {0}")]
    Triple(#[from] TripleError),
}

/// `Φ = p3/pc` with complex coefficients, ascending.
#[derive(Clone, Debug)]
pub struct NumericMap {
    pub p3: Vec<BigComplex>,
    pub pc: Vec<BigComplex>,
}

impl NumericMap {
    pub fn new(p3: Vec<BigComplex>, pc: Vec<BigComplex>) -> Result<Self, MonodromyError> {
        let n = p3.len().saturating_sub(1);
        if n == 0 || p3[n].is_zero() || pc.is_empty() || pc.len() - 1 >= n {
            return Err(MonodromyError::Degenerate);
        }
        Ok(NumericMap { p3, pc })
    }

    pub fn from_certified(map: &CertifiedBelyiMap, prec: u32) -> Result<Self, MonodromyError> {
        let (p3, pc) = map.numeric_map(prec);
        Self::new(p3, pc)
    }

    pub fn from_solution(sol: &NumericSolution, prec: u32) -> Result<Self, MonodromyError> {
        let x: Vec<BigComplex> = sol.coeffs.iter().map(|c| c.with_prec(prec)).collect();
        let (p3, _, pc) = sol.ansatz.products(&x);
        Self::new(p3, pc)
    }

    pub fn degree(&self) -> usize {
        self.p3.len() - 1
    }

    fn prec(&self) -> u32 {
        self.p3[0].prec()
    }

    /// `p3 − y·pc`.
    fn fiber_poly(&self, y: &BigComplex) -> Vec<BigComplex> {
        let mut q = self.p3.clone();
        for (i, c) in self.pc.iter().enumerate() {
            q[i] = q[i].sub(&c.mul(y));
        }
        q
    }

    /// Newton step for `p3(x) − y·pc(x)` and `dx/dy` at `x`.
    fn newton(&self, x: &BigComplex, y: &BigComplex) -> (BigComplex, BigComplex) {
        let (a, da) = poly_eval_with_derivative(&self.p3, x);
        let (c, dc) = poly_eval_with_derivative(&self.pc, x);
        let f = a.sub(&c.mul(y));
        let df = da.sub(&dc.mul(y));
        (f.div(&df), c.div(&df))
    }
}

#[derive(Clone, Debug)]
pub struct FiberState {
    pub y0: BigComplex,
    /// Labels `1..n` in this order.
    pub roots: Vec<BigComplex>,
    pub prec: u32,
}

fn rel_dist_log2(a: &BigComplex, b: &BigComplex) -> f64 {
    let scale = a.log2_abs().max(b.log2_abs()).max(0.0);
    a.sub(b).log2_abs() - scale
}

fn min_separation_log2(roots: &[BigComplex]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            m = m.min(rel_dist_log2(&roots[i], &roots[j]));
        }
    }
    m
}

/// The `n` roots of `p3 − y0·pc`, sorted, certified pairwise separated.
pub fn fiber_at(map: &NumericMap, y0: &BigComplex, prec: u32) -> Result<FiberState, MonodromyError> {
    let y0 = y0.with_prec(prec);
    let m = NumericMap { p3: map.p3.iter().map(|c| c.with_prec(prec)).collect(), pc: map.pc.iter().map(|c| c.with_prec(prec)).collect() };
    let q = m.fiber_poly(&y0);
    let roots = sorted_roots(&q, prec)?;
    let sep = min_separation_log2(&roots);
    if sep <= -(prec as f64) / 4.0 {
        return Err(MonodromyError::Clustered { separation_log2: sep });
    }
    Ok(FiberState { y0, roots, prec })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loop {
    AroundZero,
    Around1728,
    AroundInfinity,
}

impl Loop {
    fn name(self) -> &'static str {
        match self {
            Loop::AroundZero => "0",
            Loop::Around1728 => "1728",
            Loop::AroundInfinity => "infinity",
        }
    }
}

/// `center + radius·e^{iθ}`, θ running from `from` to `to`.
#[derive(Clone, Copy, Debug)]
struct Arc {
    center: f64,
    radius: f64,
    from: f64,
    to: f64,
}

impl Arc {
    fn at(&self, t: f64, prec: u32) -> BigComplex {
        let th = self.from + (self.to - self.from) * t;
        BigComplex::from_f64(self.center + self.radius * th.cos(), self.radius * th.sin(), prec)
    }

    fn length(&self) -> f64 {
        self.radius * (self.to - self.from).abs()
    }
}

fn loop_arcs(l: Loop, r: f64) -> Vec<Arc> {
    match l {
        Loop::AroundZero => vec![Arc { center: 0.0, radius: r, from: PI, to: 3.0 * PI }],
        Loop::Around1728 => vec![
            Arc { center: 0.0, radius: r, from: PI, to: 2.0 * PI },
            Arc { center: 1728.0, radius: 1728.0 - r, from: PI, to: 3.0 * PI },
            Arc { center: 0.0, radius: r, from: 2.0 * PI, to: PI },
        ],
        Loop::AroundInfinity => vec![Arc { center: 1728.0, radius: 1728.0 + r, from: PI, to: -PI }],
    }
}

/// Predictor–corrector continuation of all fiber roots along one arc.
fn track_arc(map: &NumericMap, xs: &mut Vec<BigComplex>, arc: &Arc, target: &'static str) -> Result<(), MonodromyError> {
    let prec = map.prec();
    let tol = -(prec as f64) * 0.75;
    let mut t = 0.0f64;
    let mut h = (64.0 / arc.length().max(1.0)).min(1.0 / 16.0);
    let mut clean = 0;
    let mut y = arc.at(0.0, prec);
    while t < 1.0 {
        let t1 = (t + h).min(1.0);
        let y1 = arc.at(t1, prec);
        let dy = y1.sub(&y);
        let sep = min_separation_log2(xs);
        let mut next = Vec::with_capacity(xs.len());
        let mut ok = true;
        for x in xs.iter() {
            let (_, dxdy) = map.newton(x, &y);
            let mut z = x.add(&dxdy.mul(&dy));
            let mut converged = false;
            for k in 0..CORRECTOR_ITERATIONS {
                let (d, _) = map.newton(&z, &y1);
                z = z.sub(&d);
                let rel = d.log2_abs() - z.log2_abs().max(0.0);
                // the first correction must stay well inside the basin of this root
                if k == 0 && rel > sep - 3.0 {
                    break;
                }
                if rel < tol || d.is_zero() {
                    converged = true;
                    break;
                }
            }
            if !converged || rel_dist_log2(&z, x) > sep - 2.0 {
                ok = false;
                break;
            }
            next.push(z);
        }
        if ok && min_separation_log2(&next) > -(prec as f64) / 4.0 {
            *xs = next;
            t = t1;
            y = y1;
            clean += 1;
            if clean >= 4 {
                h = (h * 2.0).min(0.25);
                clean = 0;
            }
        } else {
            h /= 2.0;
            clean = 0;
            if h < (MIN_STEP_LOG2 as f64).exp2() {
                return Err(MonodromyError::PathCrossing { target, t });
            }
        }
    }
    Ok(())
}

/// Permutation induced by `l`: the label where a path ends goes to the label it started from.
pub fn track_loop(map: &NumericMap, fs: &FiberState, l: Loop) -> Result<Permutation, MonodromyError> {
    let r = -fs.y0.to_c64().re;
    if !(r > 0.0 && r < 1728.0) || fs.y0.to_c64().im != 0.0 {
        return Err(MonodromyError::BadBasePoint);
    }
    let m = NumericMap {
        p3: map.p3.iter().map(|c| c.with_prec(fs.prec)).collect(),
        pc: map.pc.iter().map(|c| c.with_prec(fs.prec)).collect(),
    };
    let mut xs = fs.roots.clone();
    for arc in loop_arcs(l, r) {
        track_arc(&m, &mut xs, &arc, l.name())?;
    }
    let sep = min_separation_log2(&fs.roots);
    let n = xs.len();
    let mut images = vec![usize::MAX; n];
    for (start, end) in xs.iter().enumerate() {
        let (j, d) = fs
            .roots
            .iter()
            .enumerate()
            .map(|(j, r)| (j, rel_dist_log2(end, r)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if d > sep - 2.0 || images[j] != usize::MAX {
            return Err(MonodromyError::NotClosed { target: l.name() });
        }
        images[j] = start;
    }
    Ok(Permutation::from_images(&images.iter().map(|i| i + 1).collect::<Vec<_>>())?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyConfig {
    pub base_point: i64,
    pub prec: u32,
    pub max_degree: usize,
}

impl Default for MonodromyConfig {
    fn default() -> Self {
        MonodromyConfig { base_point: DEFAULT_BASE_POINT, prec: DEFAULT_TRACKING_BITS, max_degree: DEFAULT_MAX_DEGREE }
    }
}

/// `(σ0, σ1, σ∞)` from the loops around 1728, 0 and ∞, validated as a triple.
pub fn monodromy_triple(map: &NumericMap, cfg: &MonodromyConfig) -> Result<PermutationTriple, MonodromyError> {
    let n = map.degree();
    if n > cfg.max_degree {
        return Err(MonodromyError::DegreeLimit { degree: n, limit: cfg.max_degree });
    }
    let fs = fiber_at(map, &BigComplex::from_i64(cfg.base_point, cfg.prec), cfg.prec)?;
    let s1 = track_loop(map, &fs, Loop::AroundZero)?;
    let s0 = track_loop(map, &fs, Loop::Around1728)?;
    let sinf = track_loop(map, &fs, Loop::AroundInfinity)?;
    Ok(PermutationTriple::new(s0, s1, sinf)?)
}

/// Largest `log2 |p3(x) − y0·pc(x)|` over the fiber, relative to the size of the terms.
pub fn fiber_residual_log2(map: &NumericMap, fs: &FiberState) -> f64 {
    let q = map.fiber_poly(&fs.y0.with_prec(map.prec()));
    let abs: Vec<BigComplex> = q.iter().map(|c| c.abs()).collect();
    fs.roots
        .iter()
        .map(|x| {
            let v = poly_eval(&q, &x.with_prec(map.prec())).log2_abs();
            let s = poly_eval(&abs, &x.with_prec(map.prec()).abs()).log2_abs();
            v - s.max(0.0)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
