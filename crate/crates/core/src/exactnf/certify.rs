//! Exact certification of numerical Belyi maps and the certified-map file.

use std::fmt::Write as _;

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::field::{FPoly, FieldElement, NumberField};
use super::ExactError;
use crate::ansatz::{BelyiAnsatz, FactorRole, FactorSpec, GaugeKind, Member, NormalizationSpec, J_1728, J_CONSTANT, J_LINEAR};
use crate::lattice::{algdep, LatticeError, MembershipBase, RecognitionConfig};
use crate::numeric::{BigComplex, Scalar};
use crate::solve::{jacobian_rank, NumericSolution};

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyConfig {
    pub recognition: RecognitionConfig,
    /// Largest field degree probed by `algdep`.
    pub max_field_degree: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig { recognition: RecognitionConfig::default(), max_field_degree: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapFactor {
    pub member: Member,
    pub prefix: String,
    pub multiplicity: u32,
    /// Monic, ascending.
    pub poly: FPoly,
}

impl MapFactor {
    pub fn degree(&self) -> usize {
        self.poly.len().saturating_sub(1)
    }

    fn name(&self) -> String {
        format!("{}:{}^{}", self.member.name(), self.prefix, self.multiplicity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapNormalization {
    Hauptmodul,
    /// `symbol = value` pins.
    Affine(Vec<(String, i64)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedBelyiMap {
    pub field: NumberField,
    /// Complex value of the field generator.
    pub embedding: BigComplex,
    pub precision: u32,
    pub normalization: MapNormalization,
    pub factors: Vec<MapFactor>,
    /// Scale of `pc` (1 in the hauptmodul gauge).
    pub scale: FieldElement,
    pub p3: FPoly,
    pub p2: FPoly,
    pub pc: FPoly,
    pub certificate: Vec<Predicate>,
    /// Informational `key: value` pairs (field degree, recognition margin).
    pub info: Vec<(String, String)>,
}

fn role(member: Member, mult: u32) -> Result<FactorRole, ExactError> {
    Ok(match (member, mult) {
        (Member::P3, 1) => FactorRole::Order3Simple,
        (Member::P3, 3) => FactorRole::Order3Cubed,
        (Member::P2, 1) => FactorRole::Order2Simple,
        (Member::P2, 2) => FactorRole::Order2Squared,
        (Member::Pc, _) => FactorRole::Cusp,
        _ => return Err(ExactError::Parse { line: 0, msg: format!("multiplicity {mult} impossible for {}", member.name()) }),
    })
}

impl CertifiedBelyiMap {
    /// The ansatz the map solves, rebuilt from the declared factors.
    pub fn ansatz(&self) -> Result<BelyiAnsatz, ExactError> {
        let mut factors = Vec::with_capacity(self.factors.len());
        let mut offset = 0;
        for f in &self.factors {
            factors.push(FactorSpec {
                role: role(f.member, f.multiplicity)?,
                degree: f.degree(),
                multiplicity: f.multiplicity,
                prefix: f.prefix.clone(),
                offset,
            });
            offset += f.degree();
        }
        let n = self.p3.len().saturating_sub(1);
        let principal_width = n - self.pc.len().saturating_sub(1);
        let mut a = BelyiAnsatz {
            n,
            factors,
            unknowns: offset,
            principal_width,
            normalization: NormalizationSpec {
                kind: GaugeKind::Hauptmodul,
                j_constants: (J_CONSTANT, J_LINEAR),
                linear_equation: Vec::new(),
                gauge_fixes: Vec::new(),
            },
        };
        match &self.normalization {
            MapNormalization::Hauptmodul => {
                a.normalization.linear_equation = a
                    .factors
                    .iter()
                    .filter_map(|f| match f.role.member() {
                        Member::P3 => Some((f.subleading(), f.multiplicity as i64)),
                        Member::Pc => Some((f.subleading(), -(f.multiplicity as i64))),
                        Member::P2 => None,
                    })
                    .collect();
            }
            MapNormalization::Affine(fixes) => {
                a.normalization.kind = GaugeKind::Affine;
                for (sym, v) in fixes {
                    let i = a.index_of(sym).map_err(|e| ExactError::Parse { line: 0, msg: e.to_string() })?;
                    a.normalization.gauge_fixes.push((i, *v));
                }
            }
        }
        Ok(a)
    }

    /// Exact values of the ansatz variables.
    pub fn unknown_values(&self) -> Vec<FieldElement> {
        let mut v: Vec<FieldElement> =
            self.factors.iter().flat_map(|f| f.poly[..f.degree()].iter().cloned()).collect();
        if matches!(self.normalization, MapNormalization::Affine(_)) {
            v.push(self.scale.clone());
        }
        v
    }

    /// `(p3, pc)` as complex polynomials at `prec` bits.
    pub fn numeric_map(&self, prec: u32) -> (Vec<BigComplex>, Vec<BigComplex>) {
        let beta = self.field.refine_embedding(&self.embedding, prec);
        (self.field.poly_embed(&self.p3, &beta), self.field.poly_embed(&self.pc, &beta))
    }

    /// Re-runs every predicate from the exact data (plus the embedding).
    pub fn verify(&self) -> Vec<Predicate> {
        let k = &self.field;
        let mut out = Vec::new();
        let mut push = |name: &str, passed: bool, detail: String| {
            out.push(Predicate { name: name.to_string(), passed, detail });
        };
        push("field_squarefree", NumberField::new(k.poly().to_vec()).is_ok(), String::new());

        let prec = self.precision.max(64);
        let beta = self.embedding.with_prec(prec);
        let f: Vec<BigComplex> = k.poly().iter().map(|c| BigComplex::from_integer(c, prec)).collect();
        let fv = crate::numeric::poly_eval(&f, &beta).log2_abs();
        let embedding_ok = k.degree() == 1 || fv < beta.log2_abs().max(0.0) * k.degree() as f64 - prec as f64 / 2.0;
        push("embedding", embedding_ok, String::new());

        let monic = self.factors.iter().all(|fa| fa.poly.last().map_or(false, |l| *l == k.one()));
        push("factors_monic", monic, String::new());

        let product = |m: Member| -> FPoly {
            self.factors
                .iter()
                .filter(|fa| fa.member == m)
                .fold(vec![k.one()], |acc, fa| k.poly_mul(&acc, &k.poly_pow(&fa.poly, fa.multiplicity)))
        };
        let pc_declared = k.poly_scale(&product(Member::Pc), &self.scale);
        let factored = product(Member::P3) == self.p3 && product(Member::P2) == self.p2 && pc_declared == self.pc;
        push("factorization", factored, String::new());

        let lhs = k.poly_sub(&k.poly_sub(&self.p3, &self.p2), &k.poly_scale(&self.pc, &k.from_int(J_1728)));
        push("identity", lhs.is_empty(), String::new());

        push("normalization", self.normalization_holds(), String::new());

        let mut coprime = true;
        let mut squarefree = true;
        for (i, a) in self.factors.iter().enumerate() {
            if a.degree() == 0 {
                continue;
            }
            match k.poly_gcd(&a.poly, &k.poly_derivative(&a.poly)) {
                Ok(g) if g.len() == 1 => {}
                _ => squarefree = false,
            }
            for b in self.factors.iter().skip(i + 1) {
                if b.degree() == 0 {
                    continue;
                }
                match k.poly_gcd(&a.poly, &b.poly) {
                    Ok(g) if g.len() == 1 => {}
                    _ => coprime = false,
                }
            }
        }
        push("squarefree", squarefree, String::new());
        push("coprime", coprime, String::new());

        let (passed, detail) = match self.ansatz() {
            Ok(a) => {
                let p2 = 2 * prec;
                let beta2 = k.refine_embedding(&self.embedding, p2);
                let x: Vec<BigComplex> = self.unknown_values().iter().map(|v| k.embed(v, &beta2)).collect();
                match jacobian_rank(&a, &x, p2) {
                    Ok(r) => (r == a.variable_count(), format!("{r}/{} at {p2} bits", a.variable_count())),
                    Err(e) => (false, e.to_string()),
                }
            }
            Err(e) => (false, e.to_string()),
        };
        push("jacobian_rank", passed, detail);
        out
    }

    fn normalization_holds(&self) -> bool {
        let k = &self.field;
        let sub = |fa: &MapFactor| fa.poly.get(fa.degree().wrapping_sub(1)).cloned().unwrap_or_else(|| k.zero());
        match &self.normalization {
            MapNormalization::Hauptmodul => {
                let mut acc = k.zero();
                for fa in &self.factors {
                    let w = fa.multiplicity as i64;
                    match fa.member {
                        Member::P3 if fa.degree() > 0 => acc = k.add(&acc, &k.scale(&sub(fa), w)),
                        Member::Pc if fa.degree() > 0 => acc = k.sub(&acc, &k.scale(&sub(fa), w)),
                        _ => {}
                    }
                }
                self.scale == k.one() && acc == k.from_int(J_CONSTANT)
            }
            MapNormalization::Affine(fixes) => {
                let Ok(a) = self.ansatz() else { return false };
                let vals = self.unknown_values();
                fixes.iter().all(|(s, v)| a.index_of(s).map_or(false, |i| vals[i] == k.from_int(*v)))
            }
        }
    }

    pub fn all_passed(&self) -> bool {
        self.certificate.iter().all(|p| p.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let d = self.field.degree();
        let _ = writeln!(s, "field deg {d}");
        for c in self.field.poly() {
            let _ = writeln!(s, "{c}");
        }
        let (re, im) = self.embedding.to_decimal_strings();
        let _ = writeln!(s, "embedding {re} {im}");
        let _ = writeln!(s, "precision {}", self.precision);
        match &self.normalization {
            MapNormalization::Hauptmodul => {
                let _ = writeln!(s, "normalization hauptmodul");
            }
            MapNormalization::Affine(fixes) => {
                let pins: Vec<String> = fixes.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(s, "normalization affine {}", pins.join(" "));
            }
        }
        let mut poly = |name: &str, p: &[FieldElement]| {
            let _ = writeln!(s, "poly {name} deg {}", p.len().saturating_sub(1));
            for c in p {
                let _ = writeln!(s, "{}", c.to_text());
            }
        };
        poly("p3", &self.p3);
        poly("p2", &self.p2);
        poly("pc", &self.pc);
        poly("scale", std::slice::from_ref(&self.scale));
        for f in &self.factors {
            poly(&f.name(), &f.poly);
        }
        let _ = writeln!(s, "certificate");
        for p in &self.certificate {
            let v = if p.passed { "pass" } else { "fail" };
            if p.detail.is_empty() {
                let _ = writeln!(s, "{}: {v}", p.name);
            } else {
                let _ = writeln!(s, "{}: {v} {}", p.name, p.detail);
            }
        }
        for (k, v) in &self.info {
            let _ = writeln!(s, "{k}: {v}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, ExactError> {
        let lines: Vec<(usize, &str)> =
            text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let mut pos = 0;
        let err = |line: usize, msg: &str| ExactError::Parse { line, msg: msg.to_string() };
        let mut next = |what: &str| -> Result<(usize, &str), ExactError> {
            let r = lines.get(pos).copied().ok_or_else(|| err(0, &format!("unexpected end of file, expected {what}")))?;
            pos += 1;
            Ok(r)
        };
        let (ln, head) = next("field header")?;
        let d: usize = head
            .strip_prefix("field deg ")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| err(ln, "expected `field deg D`"))?;
        let mut f = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            let (ln, l) = next("field coefficient")?;
            f.push(l.parse::<Integer>().map_err(|_| err(ln, "bad integer"))?);
        }
        let field = NumberField::new(f)?;
        let (ln, l) = next("embedding")?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "embedding" {
            return Err(err(ln, "expected `embedding re im`"));
        }
        let (ln2, l) = next("precision")?;
        let precision: u32 =
            l.strip_prefix("precision ").and_then(|v| v.parse().ok()).ok_or_else(|| err(ln2, "expected `precision P`"))?;
        let embedding = BigComplex::parse(parts[1], parts[2], precision.max(64)).ok_or_else(|| err(ln, "bad embedding"))?;
        let (ln, l) = next("normalization")?;
        let normalization = match l.strip_prefix("normalization ") {
            Some("hauptmodul") => MapNormalization::Hauptmodul,
            Some(rest) if rest.starts_with("affine") => {
                let mut fixes = Vec::new();
                for pin in rest.split_whitespace().skip(1) {
                    let (k, v) = pin.split_once('=').ok_or_else(|| err(ln, "expected symbol=value"))?;
                    fixes.push((k.to_string(), v.parse().map_err(|_| err(ln, "bad pin value"))?));
                }
                MapNormalization::Affine(fixes)
            }
            _ => return Err(err(ln, "expected `normalization hauptmodul|affine ...`")),
        };
        let mut polys: Vec<(String, FPoly)> = Vec::new();
        loop {
            let (ln, l) = next("poly or certificate")?;
            if l == "certificate" {
                break;
            }
            let rest = l.strip_prefix("poly ").ok_or_else(|| err(ln, "expected `poly <name> deg k`"))?;
            let mut it = rest.split_whitespace();
            let name = it.next().ok_or_else(|| err(ln, "missing polynomial name"))?.to_string();
            let k: usize = match (it.next(), it.next()) {
                (Some("deg"), Some(v)) => v.parse().map_err(|_| err(ln, "bad degree"))?,
                _ => return Err(err(ln, "expected `deg k`")),
            };
            let mut p = Vec::with_capacity(k + 1);
            for _ in 0..=k {
                let (ln, l) = next("coefficient line")?;
                let coords: Result<Vec<Rational>, _> = l.split_whitespace().map(|t| t.parse::<Rational>()).collect();
                let coords = coords.map_err(|_| err(ln, "bad rational"))?;
                p.push(field.element(&coords).map_err(|e| err(ln, &e.to_string()))?);
            }
            polys.push((name, p));
        }
        let mut certificate = Vec::new();
        let mut info = Vec::new();
        while pos < lines.len() {
            let (ln, l) = lines[pos];
            pos += 1;
            let (k, v) = l.split_once(": ").ok_or_else(|| err(ln, "expected `key: value`"))?;
            let mut it = v.splitn(2, ' ');
            match it.next() {
                Some(s @ ("pass" | "fail")) => certificate.push(Predicate {
                    name: k.to_string(),
                    passed: s == "pass",
                    detail: it.next().unwrap_or("").to_string(),
                }),
                _ => info.push((k.to_string(), v.to_string())),
            }
        }
        let mut take = |name: &str| -> Result<FPoly, ExactError> {
            let i = polys.iter().position(|(n, _)| n == name).ok_or_else(|| err(0, &format!("missing poly {name}")))?;
            Ok(polys.remove(i).1)
        };
        let p3 = take("p3")?;
        let p2 = take("p2")?;
        let pc = take("pc")?;
        let scale = take("scale")?.pop().ok_or_else(|| err(0, "empty scale"))?;
        let mut factors = Vec::new();
        for (name, poly) in polys {
            let bad = || err(0, &format!("bad factor name {name}"));
            let (member, rest) = name.split_once(':').ok_or_else(bad)?;
            let (prefix, mult) = rest.split_once('^').ok_or_else(bad)?;
            let member = match member {
                "p3" => Member::P3,
                "p2" => Member::P2,
                "pc" => Member::Pc,
                _ => return Err(bad()),
            };
            factors.push(MapFactor {
                member,
                prefix: prefix.to_string(),
                multiplicity: mult.parse().map_err(|_| bad())?,
                poly,
            });
        }
        Ok(CertifiedBelyiMap { field, embedding, precision, normalization, factors, scale, p3, p2, pc, certificate, info })
    }
}

fn recognition_error(symbol: String, bits: u32, e: LatticeError) -> ExactError {
    ExactError::Recognition { symbol, bits, detail: e.to_string() }
}

/// Smallest degree `d ≤ max` for which `algdep` finds a relation.
fn probe_degree(x: &BigComplex, max: usize, cfg: &RecognitionConfig) -> Result<Option<Vec<Integer>>, LatticeError> {
    for d in 1..=max {
        match algdep(x, d, cfg) {
            Ok(r) => return Ok(Some(r.value)),
            Err(LatticeError::NoRelation(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Recognizes every coefficient in one number field and verifies the result exactly.
pub fn certify_map(sol: &NumericSolution, cfg: &CertifyConfig) -> Result<CertifiedBelyiMap, ExactError> {
    let a = &sol.ansatz;
    let prec = sol.prec;
    let xs: Vec<BigComplex> = sol.coeffs.iter().map(|c| c.with_prec(prec)).collect();

    let mut best: Option<Vec<Integer>> = None;
    for (i, x) in xs.iter().enumerate() {
        let m = probe_degree(x, cfg.max_field_degree, &cfg.recognition)
            .map_err(|e| recognition_error(a.symbol(i), prec, e))?
            .ok_or_else(|| ExactError::Recognition {
                symbol: a.symbol(i),
                bits: prec,
                detail: format!("no minimal polynomial of degree ≤ {}", cfg.max_field_degree),
            })?;
        if best.as_ref().map_or(true, |b| m.len() > b.len()) {
            best = Some(m.into_iter().collect());
            if best.as_ref().map_or(0, |b| b.len() - 1) == cfg.max_field_degree {
                break;
            }
        }
    }
    let minpoly = best.unwrap_or_else(|| vec![Integer::new(), Integer::from(1)]);
    let d = minpoly.len() - 1;
    let (field, beta) = if d == 1 {
        (NumberField::rationals(), BigComplex::zero(prec))
    } else {
        // generator c·α is a root of the monic c^(d−1)·m(x/c)
        let gen = xs
            .iter()
            .position(|x| probe_degree(x, d, &cfg.recognition).ok().flatten().as_ref() == Some(&minpoly))
            .expect("generator coefficient");
        let lead = minpoly[d].clone();
        let f: Vec<Integer> = minpoly
            .iter()
            .enumerate()
            .map(|(i, c)| if i == d { Integer::from(1) } else { Integer::from(c * lead.clone().pow((d - 1 - i) as u32)) })
            .collect();
        let field = NumberField::new(f)?;
        let beta = xs[gen].mul(&BigComplex::from_integer(&lead, prec));
        let beta = field.refine_embedding(&beta, prec);
        (field, beta)
    };

    let base = MembershipBase::new(&beta, d, prec, &cfg.recognition)
        .map_err(|e| recognition_error("field generator".into(), prec, e))?;
    let mut values = Vec::with_capacity(xs.len());
    let mut margin = f64::INFINITY;
    for (i, x) in xs.iter().enumerate() {
        let r = base.recognize(x).map_err(|e| recognition_error(a.symbol(i), prec, e))?;
        margin = margin.min(r.certified_bits);
        values.push(field.element(&r.value)?);
    }

    let factors: Vec<MapFactor> = a
        .factors
        .iter()
        .map(|f| {
            let mut poly: FPoly = values[f.offset..f.offset + f.degree].to_vec();
            poly.push(field.one());
            MapFactor { member: f.role.member(), prefix: f.prefix.clone(), multiplicity: f.multiplicity, poly }
        })
        .collect();
    let scale = if a.has_scale() { values[a.unknowns].clone() } else { field.one() };
    let product = |m: Member| -> FPoly {
        factors
            .iter()
            .filter(|fa| fa.member == m)
            .fold(vec![field.one()], |acc, fa| field.poly_mul(&acc, &field.poly_pow(&fa.poly, fa.multiplicity)))
    };
    let p3 = product(Member::P3);
    let p2 = product(Member::P2);
    let pc = field.poly_scale(&product(Member::Pc), &scale);
    let normalization = match a.normalization.kind {
        GaugeKind::Hauptmodul => MapNormalization::Hauptmodul,
        GaugeKind::Affine => {
            MapNormalization::Affine(a.normalization.gauge_fixes.iter().map(|&(i, v)| (a.symbol(i), v)).collect())
        }
    };
    let mut map = CertifiedBelyiMap {
        field,
        embedding: beta,
        precision: prec,
        normalization,
        factors,
        scale,
        p3,
        p2,
        pc,
        certificate: Vec::new(),
        info: vec![
            ("field_degree".to_string(), d.to_string()),
            ("recognition_margin_bits".to_string(), format!("{:.0}", margin.floor())),
        ],
    };
    map.certificate = map.verify();
    let failed: Vec<String> = map.certificate.iter().filter(|p| !p.passed).map(|p| p.name.clone()).collect();
    if !failed.is_empty() {
        return Err(ExactError::PredicateFailed(failed));
    }
    Ok(map)
}
