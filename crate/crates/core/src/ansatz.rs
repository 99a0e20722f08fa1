//! The Belyi polynomial ansatz of a genus-zero subgroup.
//!
//! With `Φ = p3/pc = 1728 + p2/pc` the three polynomials factor as
//!
//! ```text
//! p3 = F·A³        F: σ1 fixed points, A: σ1 3-cycles
//! p2 = D·E²        D: σ0 fixed points, E: σ0 2-cycles
//! pc = ∏_w C_w^w   one factor per cusp width, the principal cusp removed
//! ```
//!
//! every factor monic. The unknowns are the non-leading coefficients of the
//! factors; the equations are the coefficients of `p3 − p2 − 1728·pc` below
//! `x^n`, followed by the gauge conditions.
//!
//! Symbol prefixes: `f` (σ1 fixed points), `a` (3-cycles), `d` (σ0 fixed
//! points), `e` (2-cycles), `b` (width-1 cusps), then `c, g, h, k, ...` for
//! the remaining cusp widths in increasing order. In the affine gauge the
//! extra unknown `s` scales `pc`.

use std::fmt;

use thiserror::Error;

use crate::numeric::{poly_mul, poly_pow, Scalar};
use crate::triple::SubgroupProfile;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnsatzError {
    #[error("genus {0} is not zero")]
    NonzeroGenus(u64),
    #[error("expected {expected} unknowns, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("input carries {have} bits, {want} requested")]
    PrecisionUnderflow { have: u32, want: u32 },
    #[error("no coefficient available to fix the scale")]
    NoScaleCoefficient,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
}

/// 744 and 196884: the constant and linear q-expansion coefficients of `j`.
pub const J_CONSTANT: i64 = 744;
pub const J_LINEAR: i64 = 196884;
pub const J_1728: i64 = 1728;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorRole {
    Order3Simple,
    Order3Cubed,
    Order2Simple,
    Order2Squared,
    Cusp,
}

impl FactorRole {
    pub fn name(self) -> &'static str {
        match self {
            FactorRole::Order3Simple => "order3-simple",
            FactorRole::Order3Cubed => "order3-cubed",
            FactorRole::Order2Simple => "order2-simple",
            FactorRole::Order2Squared => "order2-squared",
            FactorRole::Cusp => "cusp",
        }
    }

    pub fn member(self) -> Member {
        match self {
            FactorRole::Order3Simple | FactorRole::Order3Cubed => Member::P3,
            FactorRole::Order2Simple | FactorRole::Order2Squared => Member::P2,
            FactorRole::Cusp => Member::Pc,
        }
    }
}

/// Which of `p3`, `p2`, `pc` a factor belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Member {
    P3,
    P2,
    Pc,
}

impl Member {
    pub fn name(self) -> &'static str {
        match self {
            Member::P3 => "p3",
            Member::P2 => "p2",
            Member::Pc => "pc",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSpec {
    pub role: FactorRole,
    pub degree: usize,
    pub multiplicity: u32,
    pub prefix: String,
    /// Flat index of this factor's `x^0` coefficient.
    pub offset: usize,
}

impl FactorSpec {
    /// Coefficient of `x^(d-1)`; the negated sum of the roots.
    pub fn subleading(&self) -> usize {
        self.offset + self.degree - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeKind {
    /// `x` is the hauptmodul `q⁻¹ + 0 + O(q)` at a width-1 principal cusp.
    Hauptmodul,
    /// Translation and scale fixed by pinning two coefficients; `pc` carries a scale unknown.
    Affine,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationSpec {
    pub kind: GaugeKind,
    /// `(744, 196884)`; only the first enters the equations.
    pub j_constants: (i64, i64),
    /// Hauptmodul gauge: `Σ coeff·unknown = 744`.
    pub linear_equation: Vec<(usize, i64)>,
    /// Affine gauge: `unknown = value`.
    pub gauge_fixes: Vec<(usize, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BelyiAnsatz {
    pub n: usize,
    pub factors: Vec<FactorSpec>,
    pub unknowns: usize,
    pub principal_width: usize,
    pub normalization: NormalizationSpec,
}

const CUSP_PREFIXES: &[&str] = &["c", "g", "h", "k", "m", "r", "t", "u", "v", "w", "y", "z"];

/// Factor structure of the Belyi map of a genus-zero profile.
pub fn build_ansatz(p: &SubgroupProfile) -> Result<BelyiAnsatz, AnsatzError> {
    if p.genus != 0 {
        return Err(AnsatzError::NonzeroGenus(p.genus));
    }
    let h = p.principal_cusp.width;
    let mut specs: Vec<(FactorRole, usize, u32, String)> = vec![
        (FactorRole::Order3Simple, p.e3, 1, "f".into()),
        (FactorRole::Order3Cubed, p.three_cycles(), 3, "a".into()),
        (FactorRole::Order2Simple, p.e2, 1, "d".into()),
        (FactorRole::Order2Squared, p.two_cycles(), 2, "e".into()),
    ];
    let mut next_prefix = CUSP_PREFIXES.iter();
    for &(width, count) in p.cusp_widths.parts() {
        let k = if width == h { count - 1 } else { count };
        if k == 0 {
            continue;
        }
        let prefix = if width == 1 {
            "b".to_string()
        } else {
            next_prefix.next().map(|s| s.to_string()).unwrap_or_else(|| format!("c{width}_"))
        };
        specs.push((FactorRole::Cusp, k, width as u32, prefix));
    }
    let mut factors = Vec::new();
    let mut offset = 0;
    for (role, degree, multiplicity, prefix) in specs {
        if degree == 0 {
            continue;
        }
        factors.push(FactorSpec { role, degree, multiplicity, prefix, offset });
        offset += degree;
    }
    let mut ansatz = BelyiAnsatz {
        n: p.index,
        factors,
        unknowns: offset,
        principal_width: h,
        normalization: NormalizationSpec {
            kind: GaugeKind::Hauptmodul,
            j_constants: (J_CONSTANT, J_LINEAR),
            linear_equation: Vec::new(),
            gauge_fixes: Vec::new(),
        },
    };
    ansatz.normalization = normalization_equation(&ansatz)?;
    Ok(ansatz)
}

/// Hauptmodul gauge for a width-1 principal cusp: expanding `Φ(x) = x + Σ m·t − Σ w·u + O(1/x)`
/// (`t`, `u` the subleading coefficients of numerator and cusp factors) and matching
/// `j = q⁻¹ + 744 + …` gives one linear equation. Otherwise the affine gauge: the
/// largest `p3` factor has zero root sum and the first other factor's subleading
/// coefficient is 1.
pub fn normalization_equation(a: &BelyiAnsatz) -> Result<NormalizationSpec, AnsatzError> {
    if a.principal_width == 1 {
        let linear_equation = a
            .factors
            .iter()
            .filter_map(|f| match f.role.member() {
                Member::P3 => Some((f.subleading(), f.multiplicity as i64)),
                Member::Pc => Some((f.subleading(), -(f.multiplicity as i64))),
                Member::P2 => None,
            })
            .collect();
        return Ok(NormalizationSpec {
            kind: GaugeKind::Hauptmodul,
            j_constants: (J_CONSTANT, J_LINEAR),
            linear_equation,
            gauge_fixes: Vec::new(),
        });
    }
    let translation = a.translation_factor().ok_or(AnsatzError::NoScaleCoefficient)?;
    let scale = a
        .factors
        .iter()
        .enumerate()
        .find(|(i, _)| *i != translation)
        .map(|(_, f)| f.subleading())
        .ok_or(AnsatzError::NoScaleCoefficient)?;
    Ok(NormalizationSpec {
        kind: GaugeKind::Affine,
        j_constants: (J_CONSTANT, J_LINEAR),
        linear_equation: Vec::new(),
        gauge_fixes: vec![(a.factors[translation].subleading(), 0), (scale, 1)],
    })
}

impl BelyiAnsatz {
    /// Index of the largest-degree `p3` factor (first on ties).
    pub fn translation_factor(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, f) in self.factors.iter().enumerate() {
            if f.role.member() == Member::P3 && best.map_or(true, |b| f.degree > self.factors[b].degree) {
                best = Some(i);
            }
        }
        best
    }

    pub fn has_scale(&self) -> bool {
        self.normalization.kind == GaugeKind::Affine
    }

    /// Coefficient unknowns, plus the scale of `pc` in the affine gauge.
    pub fn variable_count(&self) -> usize {
        self.unknowns + usize::from(self.has_scale())
    }

    /// `n` coefficient equations followed by the gauge rows.
    pub fn equation_count(&self) -> usize {
        self.n
            + match self.normalization.kind {
                GaugeKind::Hauptmodul => 1,
                GaugeKind::Affine => self.normalization.gauge_fixes.len(),
            }
    }

    pub fn with_normalization(&self, normalization: NormalizationSpec) -> Self {
        BelyiAnsatz { normalization, ..self.clone() }
    }

    /// Degrees of `p3`, `p2`, `pc`.
    pub fn degrees(&self) -> (usize, usize, usize) {
        let deg = |m: Member| -> usize {
            self.factors
                .iter()
                .filter(|f| f.role.member() == m)
                .map(|f| f.degree * f.multiplicity as usize)
                .sum()
        };
        (deg(Member::P3), deg(Member::P2), deg(Member::Pc))
    }

    pub fn symbol(&self, index: usize) -> String {
        if index == self.unknowns {
            return "s".to_string();
        }
        let f = self
            .factors
            .iter()
            .find(|f| index >= f.offset && index < f.offset + f.degree)
            .expect("unknown index in range");
        format!("{}{}", f.prefix, index - f.offset)
    }

    pub fn symbols(&self) -> Vec<String> {
        (0..self.variable_count()).map(|i| self.symbol(i)).collect()
    }

    pub fn index_of(&self, symbol: &str) -> Result<usize, AnsatzError> {
        (0..self.variable_count())
            .find(|&i| self.symbol(i) == symbol)
            .ok_or_else(|| AnsatzError::UnknownSymbol(symbol.to_string()))
    }

    /// Weight of an unknown under `x ↦ λx`: `d − k` for the `x^k` coefficient of a
    /// degree-`d` factor, `h` for the scale.
    pub fn weight(&self, index: usize) -> usize {
        if index == self.unknowns {
            return self.principal_width;
        }
        let f = self.factors.iter().find(|f| index >= f.offset && index < f.offset + f.degree).unwrap();
        f.offset + f.degree - index
    }

    /// Monic coefficient vector (ascending) of a factor.
    pub fn factor_poly<T: Scalar>(&self, x: &[T], factor: usize) -> Vec<T> {
        let f = &self.factors[factor];
        let prec = x.first().map(|v| v.prec()).unwrap_or(crate::numeric::F64_BITS);
        let mut p: Vec<T> = x[f.offset..f.offset + f.degree].to_vec();
        p.push(T::one(prec));
        p
    }

    /// Product of the factors of a member, optionally leaving one factor out.
    fn member_product<T: Scalar>(&self, x: &[T], member: Member, skip: Option<usize>, prec: u32) -> Vec<T> {
        let mut acc = vec![T::one(prec)];
        for (i, f) in self.factors.iter().enumerate() {
            if f.role.member() != member || Some(i) == skip {
                continue;
            }
            acc = poly_mul(&acc, &poly_pow(&self.factor_poly(x, i), f.multiplicity));
        }
        acc
    }

    /// `(p3, p2, pc)` with `pc` including the scale unknown.
    pub fn products<T: Scalar>(&self, x: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
        let prec = x[0].prec();
        let p3 = self.member_product(x, Member::P3, None, prec);
        let p2 = self.member_product(x, Member::P2, None, prec);
        let mut pc = self.member_product(x, Member::Pc, None, prec);
        if self.has_scale() {
            pc = pc.iter().map(|c| c.mul(&x[self.unknowns])).collect();
        }
        (p3, p2, pc)
    }

    fn check_input<T: Scalar>(&self, x: &[T], prec: u32) -> Result<(), AnsatzError> {
        if x.len() != self.variable_count() {
            return Err(AnsatzError::WrongLength { expected: self.variable_count(), got: x.len() });
        }
        if let Some(c) = x.iter().find(|c| c.prec() < prec) {
            return Err(AnsatzError::PrecisionUnderflow { have: c.prec(), want: prec });
        }
        Ok(())
    }

    /// Residual vector and, per row, `log2` of the largest term entering it
    /// (clamped at 0), for relative error measurements.
    pub fn residual_with_scale<T: Scalar>(&self, x: &[T], prec: u32) -> Result<(Vec<T>, Vec<f64>), AnsatzError> {
        self.check_input(x, prec)?;
        let x: Vec<T> = x.iter().map(|c| c.with_prec(prec)).collect();
        let (p3, p2, pc) = self.products(&x);
        let zero = T::zero(prec);
        let mut res = Vec::with_capacity(self.equation_count());
        let mut scale = Vec::with_capacity(self.equation_count());
        for i in 0..self.n {
            let a = p3.get(i).unwrap_or(&zero);
            let b = p2.get(i).unwrap_or(&zero);
            let c = pc.get(i).map(|c| c.mul_i64(J_1728)).unwrap_or_else(|| zero.clone());
            scale.push(a.log2_abs().max(b.log2_abs()).max(c.log2_abs()).max(0.0));
            res.push(a.sub(b).sub(&c));
        }
        match self.normalization.kind {
            GaugeKind::Hauptmodul => {
                let mut acc = T::from_i64(-J_CONSTANT, prec);
                let mut big = (J_CONSTANT as f64).log2();
                for &(u, k) in &self.normalization.linear_equation {
                    let term = x[u].mul_i64(k);
                    big = big.max(term.log2_abs());
                    acc = acc.add(&term);
                }
                res.push(acc);
                scale.push(big);
            }
            GaugeKind::Affine => {
                for &(u, v) in &self.normalization.gauge_fixes {
                    res.push(x[u].sub(&T::from_i64(v, prec)));
                    scale.push(x[u].log2_abs().max(0.0));
                }
            }
        }
        Ok((res, scale))
    }

    /// Coefficients `x^0..x^{n−1}` of `p3 − p2 − 1728·pc`, then the gauge rows.
    pub fn residual<T: Scalar>(&self, x: &[T], prec: u32) -> Result<Vec<T>, AnsatzError> {
        Ok(self.residual_with_scale(x, prec)?.0)
    }

    /// `max_i log2(|r_i| / scale_i)`: the residual relative to the size of its terms.
    pub fn relative_residual_log2<T: Scalar>(&self, x: &[T], prec: u32) -> Result<f64, AnsatzError> {
        let (r, s) = self.residual_with_scale(x, prec)?;
        Ok(r.iter().zip(&s).map(|(r, s)| r.log2_abs() - s).fold(f64::NEG_INFINITY, f64::max))
    }

    /// Jacobian of [`BelyiAnsatz::residual`], rows by equations and columns by unknowns.
    ///
    /// The column of coefficient `k` of a factor `F` of multiplicity `m` in a product
    /// `F^m·G` is the coefficient vector of `m·F^(m−1)·G·x^k`; each column is
    /// assembled on its own.
    pub fn jacobian<T: Scalar>(&self, x: &[T], prec: u32) -> Result<Vec<Vec<T>>, AnsatzError> {
        self.check_input(x, prec)?;
        let x: Vec<T> = x.iter().map(|c| c.with_prec(prec)).collect();
        let rows = self.equation_count();
        let cols = self.variable_count();
        let zero = T::zero(prec);
        let mut jac = vec![vec![zero.clone(); cols]; rows];
        let scale = if self.has_scale() { x[self.unknowns].clone() } else { T::one(prec) };
        for (fi, f) in self.factors.iter().enumerate() {
            let member = f.role.member();
            let others = self.member_product(&x, member, Some(fi), prec);
            let fp = self.factor_poly(&x, fi);
            let mut cofactor = poly_mul(&poly_pow(&fp, f.multiplicity - 1), &others);
            let factor = match member {
                Member::P3 => T::from_i64(f.multiplicity as i64, prec),
                Member::P2 => T::from_i64(-(f.multiplicity as i64), prec),
                Member::Pc => scale.mul_i64(-(f.multiplicity as i64) * J_1728),
            };
            cofactor = cofactor.iter().map(|c| c.mul(&factor)).collect();
            for k in 0..f.degree {
                let col = f.offset + k;
                for (i, c) in cofactor.iter().enumerate() {
                    if i + k < self.n {
                        jac[i + k][col] = c.clone();
                    }
                }
            }
        }
        if self.has_scale() {
            let pc = self.member_product(&x, Member::Pc, None, prec);
            for (i, c) in pc.iter().enumerate().take(self.n) {
                jac[i][self.unknowns] = c.mul_i64(-J_1728);
            }
        }
        match self.normalization.kind {
            GaugeKind::Hauptmodul => {
                for &(u, k) in &self.normalization.linear_equation {
                    jac[self.n][u] = T::from_i64(k, prec);
                }
            }
            GaugeKind::Affine => {
                for (r, &(u, _)) in self.normalization.gauge_fixes.iter().enumerate() {
                    jac[self.n + r][u] = T::one(prec);
                }
            }
        }
        Ok(jac)
    }

    /// Human-readable gauge condition, e.g. `3*a91 - 1*b1 - 7*c38 = 744`.
    pub fn normalization_string(&self) -> String {
        match self.normalization.kind {
            GaugeKind::Hauptmodul => {
                let mut s = String::new();
                for (k, &(u, c)) in self.normalization.linear_equation.iter().enumerate() {
                    let sym = self.symbol(u);
                    match (k, c < 0) {
                        (0, false) => s.push_str(&format!("{}*{}", c, sym)),
                        (0, true) => s.push_str(&format!("-{}*{}", -c, sym)),
                        (_, false) => s.push_str(&format!(" + {}*{}", c, sym)),
                        (_, true) => s.push_str(&format!(" - {}*{}", -c, sym)),
                    }
                }
                if s.is_empty() {
                    s.push('0');
                }
                format!("{} = {}", s, self.normalization.j_constants.0)
            }
            GaugeKind::Affine => {
                let fixes: Vec<String> = self
                    .normalization
                    .gauge_fixes
                    .iter()
                    .map(|&(u, v)| format!("{} = {}", self.symbol(u), v))
                    .collect();
                fixes.join(", ")
            }
        }
    }

    /// Text dump: one `role degree multiplicity prefix` line per factor, then
    /// `unknowns`, `equations`, `gauge`, `normalization` lines.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for f in &self.factors {
            s.push_str(&format!("{} {} {} {}\n", f.role.name(), f.degree, f.multiplicity, f.prefix));
        }
        s.push_str(&format!("unknowns {}\n", self.unknowns));
        s.push_str(&format!("equations {}\n", self.equation_count()));
        let gauge = match self.normalization.kind {
            GaugeKind::Hauptmodul => "hauptmodul",
            GaugeKind::Affine => "affine",
        };
        s.push_str(&format!("gauge {}\n", gauge));
        s.push_str(&format!("normalization {}\n", self.normalization_string()));
        s
    }
}

impl fmt::Display for BelyiAnsatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::BigComplex;
    use crate::perm::gamma0_triple;
    use crate::triple::{profile, profile_from_passport, Passport};
    use num_complex::Complex64;

    fn degree_276_ansatz() -> BelyiAnsatz {
        let pp = Passport {
            n: 276,
            s0: "1^12 2^132".parse().unwrap(),
            s1: "3^92".parse().unwrap(),
            sinf: "1^3 7^39".parse().unwrap(),
        };
        build_ansatz(&profile_from_passport(&pp).unwrap()).unwrap()
    }

    fn big(v: &[i64], prec: u32) -> Vec<BigComplex> {
        v.iter().map(|&c| BigComplex::from_i64(c, prec)).collect()
    }

    #[test]
    fn degree_276_factor_structure() {
        let a = degree_276_ansatz();
        let shape: Vec<(usize, u32)> = a.factors.iter().map(|f| (f.degree, f.multiplicity)).collect();
        assert_eq!(shape, vec![(92, 3), (12, 1), (132, 2), (2, 1), (39, 7)]);
        assert_eq!(a.unknowns, 277);
        assert_eq!(a.equation_count(), 277);
        assert_eq!(a.degrees(), (276, 276, 275));
        assert_eq!(a.normalization_string(), "3*a91 - 1*b1 - 7*c38 = 744");
    }

    #[test]
    fn index_one() {
        let t = crate::perm::gamma0_triple(1);
        let a = build_ansatz(&profile(&t).unwrap()).unwrap();
        assert_eq!(a.unknowns, 2);
        assert_eq!(a.normalization_string(), "1*f0 = 744");
        let r = a.residual(&big(&[744, -984], 128), 128).unwrap();
        assert!(r.iter().all(|c| c.is_zero()));
        let j = a.jacobian(&big(&[700, -900], 128), 128).unwrap();
        assert_eq!(j[0][0], BigComplex::from_i64(1, 128));
        assert_eq!(j[1][0], BigComplex::from_i64(1, 128));
        assert_eq!(j[0][1], BigComplex::from_i64(-1, 128));
    }

    #[test]
    fn gamma0_2_exact_solution() {
        let a = build_ansatz(&profile(&gamma0_triple(2)).unwrap()).unwrap();
        assert_eq!(a.symbols(), vec!["a0", "d0", "e0", "c0"]);
        assert_eq!(a.normalization_string(), "3*a0 - 2*c0 = 744");
        // (t+256)³ − 1728t² = (t+64)(t−512)², t = x − 24, so e0 = −536
        let r = a.residual(&big(&[232, 40, -536, -24], 64), 64).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn gamma0_3_normalization() {
        let a = build_ansatz(&profile(&gamma0_triple(3)).unwrap()).unwrap();
        assert_eq!(a.normalization_string(), "1*f0 + 3*a0 - 3*c0 = 744");
        assert_eq!(a.unknowns, 5);
    }

    #[test]
    fn affine_gauge_for_wide_principal_cusp() {
        let s0 = crate::perm::Permutation::from_cycles(7, &[&[1, 2], &[3, 4]]).unwrap();
        let s1 = crate::perm::Permutation::from_images(&[1, 3, 5, 6, 2, 7, 4]).unwrap();
        let t = crate::triple::validate_triple(s0, s1).unwrap();
        let a = build_ansatz(&profile(&t).unwrap()).unwrap();
        assert_eq!(a.normalization.kind, GaugeKind::Affine);
        assert_eq!(a.principal_width, 7);
        assert_eq!(a.unknowns, 8);
        assert_eq!(a.variable_count(), 9);
        assert_eq!(a.equation_count(), 9);
        assert_eq!(a.normalization_string(), "a1 = 0, f0 = 1");
    }

    /// Central differences at `h = 2^{-P/4}` carry truncation error `O(h²) = 2^{-P/2}`.
    fn check_fd(a: &BelyiAnsatz, x: &[BigComplex], prec: u32) {
        let jac = a.jacobian(x, prec).unwrap();
        let mut h = BigComplex::from_i64(1, prec);
        h.0 >>= prec / 4;
        for col in 0..a.variable_count() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[col] = xp[col].add(&h);
            xm[col] = xm[col].sub(&h);
            let rp = a.residual(&xp, prec).unwrap();
            let rm = a.residual(&xm, prec).unwrap();
            for row in 0..a.equation_count() {
                let fd = rp[row].sub(&rm[row]).div(&h.mul_i64(2));
                let diff = fd.sub(&jac[row][col]).log2_abs();
                let size = jac[row][col].log2_abs().max(0.0);
                assert!(diff - size < -(prec as f64) / 2.0 + 8.0, "row {row} col {col}: {diff} vs {size}");
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let prec = 256;
        for n in [2u64, 3, 4, 5] {
            let a = build_ansatz(&profile(&gamma0_triple(n)).unwrap()).unwrap();
            let x: Vec<BigComplex> = (0..a.variable_count())
                .map(|_| BigComplex::from_f64(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), prec))
                .collect();
            check_fd(&a, &x, prec);
        }
    }

    #[test]
    fn jacobian_shape_and_f64_path() {
        let a = build_ansatz(&profile(&gamma0_triple(5)).unwrap()).unwrap();
        let x: Vec<Complex64> = (0..a.variable_count()).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let j = a.jacobian(&x, 53).unwrap();
        assert_eq!((j.len(), j[0].len()), (a.equation_count(), a.variable_count()));
    }

    #[test]
    fn precision_underflow_is_reported() {
        let a = build_ansatz(&profile(&gamma0_triple(2)).unwrap()).unwrap();
        let x = big(&[1, 2, 3, 4], 64);
        assert_eq!(a.residual(&x, 128), Err(AnsatzError::PrecisionUnderflow { have: 64, want: 128 }));
        assert!(matches!(a.residual(&x[..3], 64), Err(AnsatzError::WrongLength { .. })));
    }

    #[test]
    fn nonzero_genus_rejected() {
        let prof = profile(&gamma0_triple(11)).unwrap();
        assert_eq!(build_ansatz(&prof), Err(AnsatzError::NonzeroGenus(1)));
    }
}
