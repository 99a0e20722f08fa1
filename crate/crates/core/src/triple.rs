//! Permutation triples and the subgroup profile they determine.
//!
//! A triple `(σ0, σ1, σ∞)` with `σ0² = σ1³ = σ0σ1σ∞ = 1` acting transitively
//! describes a finite-index subgroup of the modular group: `σ0` and `σ1` are
//! the images of the order-2 and order-3 generators in the coset action, and
//! the cycles of `σ∞` are the cusps.

use std::fmt;

use thiserror::Error;

use crate::perm::{self, compose, cycle_type, orbits, CycleType, PermError, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TripleError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("{name}^{order} is not the identity")]
    OrderViolation { name: &'static str, order: u32 },
    #[error("s0*s1*sinf is not the identity")]
    ProductNotIdentity,
    #[error("not transitive; orbits: {0}")]
    NotTransitive(String),
    #[error("cycle types do not sum to the degree {0}")]
    DegreeMismatch(usize),
    #[error("genus formula gives {twelve_g}/12, not a nonnegative integer")]
    BadGenus { twelve_g: i64 },
}

/// A validated triple: orders divide 2 and 3, product is the identity, transitive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationTriple {
    s0: Permutation,
    s1: Permutation,
    sinf: Permutation,
}

impl PermutationTriple {
    /// Validates `(s0, s1)` and completes it with `sinf = (s0·s1)⁻¹`.
    pub fn from_pair(s0: Permutation, s1: Permutation) -> Result<Self, TripleError> {
        let sinf = compose(&s0, &s1)?.inverse();
        Self::new(s0, s1, sinf)
    }

    /// Validates a full triple, including `s0·s1·sinf = 1`.
    pub fn new(s0: Permutation, s1: Permutation, sinf: Permutation) -> Result<Self, TripleError> {
        let n = s0.degree();
        for p in [&s1, &sinf] {
            if p.degree() != n {
                return Err(PermError::DegreeMismatch(n, p.degree()).into());
            }
        }
        if !s0.pow(2).is_identity() {
            return Err(TripleError::OrderViolation { name: "s0", order: 2 });
        }
        if !s1.pow(3).is_identity() {
            return Err(TripleError::OrderViolation { name: "s1", order: 3 });
        }
        if !perm::product(&[&s0, &s1, &sinf]).is_identity() {
            return Err(TripleError::ProductNotIdentity);
        }
        let orbs = orbits(&[s0.clone(), s1.clone()], n);
        if orbs.len() > 1 {
            let desc: Vec<String> = orbs
                .iter()
                .map(|o| {
                    let pts: Vec<String> = o.iter().map(|x| (x + 1).to_string()).collect();
                    format!("{{{}}}", pts.join(","))
                })
                .collect();
            return Err(TripleError::NotTransitive(desc.join(" ")));
        }
        Ok(PermutationTriple { s0, s1, sinf })
    }

    pub fn degree(&self) -> usize {
        self.s0.degree()
    }

    pub fn s0(&self) -> &Permutation {
        &self.s0
    }

    pub fn s1(&self) -> &Permutation {
        &self.s1
    }

    pub fn sinf(&self) -> &Permutation {
        &self.sinf
    }

    /// `(π σ0 π⁻¹, π σ1 π⁻¹, π σ∞ π⁻¹)`.
    pub fn conjugate_by(&self, pi: &Permutation) -> Self {
        let inv = pi.inverse();
        let c = |p: &Permutation| perm::product(&[pi, p, &inv]);
        PermutationTriple { s0: c(&self.s0), s1: c(&self.s1), sinf: c(&self.sinf) }
    }

    pub fn cycle_types(&self) -> Passport {
        Passport {
            n: self.degree(),
            s0: cycle_type(&self.s0),
            s1: cycle_type(&self.s1),
            sinf: cycle_type(&self.sinf),
        }
    }

    /// Shared triple text format: `n`, `s0`, `s1`, `sinf` lines with 1-based images.
    pub fn to_text(&self) -> String {
        let line = |name: &str, p: &Permutation| {
            let imgs: Vec<String> = p.images_one_based().iter().map(|v| v.to_string()).collect();
            format!("{} {}\n", name, imgs.join(" "))
        };
        format!(
            "n {}\n{}{}{}",
            self.degree(),
            line("s0", &self.s0),
            line("s1", &self.s1),
            line("sinf", &self.sinf)
        )
    }
}

/// Validates a pair and builds the triple.
pub fn validate_triple(s0: Permutation, s1: Permutation) -> Result<PermutationTriple, TripleError> {
    PermutationTriple::from_pair(s0, s1)
}

/// Cycle types of the three permutations; enough to derive everything but the
/// congruence verdict and the principal cusp label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Passport {
    pub n: usize,
    pub s0: CycleType,
    pub s1: CycleType,
    pub sinf: CycleType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Congruence {
    Congruence,
    Noncongruence,
    Undecided,
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Congruence::Congruence => "congruence",
            Congruence::Noncongruence => "noncongruence",
            Congruence::Undecided => "undecided",
        })
    }
}

/// The cusp placed at infinity: smallest width, ties broken by the smallest point
/// label in the cycle. `point` is `None` when only cycle types are known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrincipalCusp {
    pub width: usize,
    pub point: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupProfile {
    pub index: usize,
    pub e2: usize,
    pub e3: usize,
    pub cusp_widths: CycleType,
    pub num_cusps: usize,
    pub level: u64,
    pub genus: u64,
    pub congruence: Congruence,
    pub principal_cusp: PrincipalCusp,
    pub passport: Passport,
}

impl SubgroupProfile {
    /// Number of 2-cycles of `σ0`.
    pub fn two_cycles(&self) -> usize {
        (self.index - self.e2) / 2
    }

    /// Number of 3-cycles of `σ1`.
    pub fn three_cycles(&self) -> usize {
        (self.index - self.e3) / 3
    }

    /// Stable `key value` report lines.
    pub fn report(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("index {}\n", self.index));
        s.push_str(&format!("e2 {}\n", self.e2));
        s.push_str(&format!("e3 {}\n", self.e3));
        s.push_str(&format!("cycle_type_s0 {}\n", self.passport.s0));
        s.push_str(&format!("cycle_type_s1 {}\n", self.passport.s1));
        s.push_str(&format!("cycle_type_sinf {}\n", self.passport.sinf));
        s.push_str(&format!("cusps {}\n", self.num_cusps));
        s.push_str(&format!("cusp_widths {}\n", self.cusp_widths));
        s.push_str(&format!("level {}\n", self.level));
        s.push_str(&format!("genus {}\n", self.genus));
        s.push_str(&format!("principal_cusp_width {}\n", self.principal_cusp.width));
        match self.principal_cusp.point {
            Some(p) => s.push_str(&format!("principal_cusp_point {}\n", p + 1)),
            None => s.push_str("principal_cusp_point unknown\n"),
        }
        s.push_str(&format!("congruence {}\n", self.congruence));
        s
    }
}

/// `12·g = 12 + n − 3·e2 − 4·e3 − 6·c`, checked to be a nonnegative multiple of 12.
fn genus_from_counts(n: usize, e2: usize, e3: usize, cusps: usize) -> Result<u64, TripleError> {
    let twelve_g = 12 + n as i64 - 3 * e2 as i64 - 4 * e3 as i64 - 6 * cusps as i64;
    if twelve_g < 0 || twelve_g % 12 != 0 {
        return Err(TripleError::BadGenus { twelve_g });
    }
    Ok((twelve_g / 12) as u64)
}

/// Profile from cycle types alone; congruence is `undecided` and the principal
/// cusp has no point label.
pub fn profile_from_passport(passport: &Passport) -> Result<SubgroupProfile, TripleError> {
    let n = passport.n;
    for ct in [&passport.s0, &passport.s1, &passport.sinf] {
        if ct.degree() != n {
            return Err(TripleError::DegreeMismatch(n));
        }
    }
    if passport.s0.parts().iter().any(|(l, _)| *l > 2) {
        return Err(TripleError::OrderViolation { name: "s0", order: 2 });
    }
    if passport.s1.parts().iter().any(|(l, _)| *l != 1 && *l != 3) {
        return Err(TripleError::OrderViolation { name: "s1", order: 3 });
    }
    let e2 = passport.s0.count(1);
    let e3 = passport.s1.count(1);
    let num_cusps = passport.sinf.num_cycles();
    let genus = genus_from_counts(n, e2, e3, num_cusps)?;
    let min_width = passport.sinf.parts().first().map(|(l, _)| *l).unwrap_or(1);
    Ok(SubgroupProfile {
        index: n,
        e2,
        e3,
        cusp_widths: passport.sinf.clone(),
        num_cusps,
        level: passport.sinf.lcm(),
        genus,
        congruence: Congruence::Undecided,
        principal_cusp: PrincipalCusp { width: min_width, point: None },
        passport: passport.clone(),
    })
}

/// Full profile of a validated triple, with the congruence verdict left `undecided`.
pub fn profile(t: &PermutationTriple) -> Result<SubgroupProfile, TripleError> {
    let mut prof = profile_from_passport(&t.cycle_types())?;
    let principal = t
        .sinf()
        .cycles()
        .into_iter()
        .min_by_key(|c| (c.len(), c[0]))
        .expect("nonempty degree");
    prof.principal_cusp = PrincipalCusp { width: principal.len(), point: Some(principal[0]) };
    Ok(prof)
}

/// Profile including the congruence verdict.
pub fn analyze(t: &PermutationTriple) -> Result<SubgroupProfile, TripleError> {
    let mut prof = profile(t)?;
    prof.congruence = hsu_congruence_test(t);
    Ok(prof)
}

// ---------------------------------------------------------------------------
// Congruence test.
//
// l and r are the images of L = [[1,1],[0,1]] and R = [[1,0],[1,1]]; with the
// homomorphism convention of `gamma0_triple`, l = σ∞⁻¹ and r = σ0·σ∞·σ0. The
// level N is the order of l. Words multiply left to right like matrices.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LevelClass {
    Odd,
    PowerOfTwo,
    Mixed,
}

/// Relations per level class. In the mixed case `a, b` are the odd parts of
/// `l, r` and `l, r` are replaced by their 2-parts. `s` abbreviates
/// `l^20 r^1/5 l^-4 r^-1`. Fractional exponents are inverses modulo the odd
/// part (`1/2`) or the 2-part (`1/5`) of the level.
const RELATIONS: &[(LevelClass, &str)] = &[
    (LevelClass::Odd, "(r^2 l^-1/2)^3 = 1"),
    (LevelClass::PowerOfTwo, "(l r^-1 l)^-1 s (l r^-1 l) = s^-1"),
    (LevelClass::PowerOfTwo, "s^-1 r s = r^25"),
    (LevelClass::PowerOfTwo, "(s r^5 l r^-1 l)^3 = 1"),
    (LevelClass::Mixed, "a^-1 r^-1 a r = 1"),
    (LevelClass::Mixed, "(a b^-1 a)^4 = 1"),
    (LevelClass::Mixed, "(a b^-1 a)^2 = (b^-1 a)^3"),
    (LevelClass::Mixed, "(a b^-1 a)^2 = (b^2 a^-1/2)^3"),
    (LevelClass::Mixed, "(l r^-1 l)^-1 s (l r^-1 l) = s^-1"),
    (LevelClass::Mixed, "s^-1 r s = r^25"),
    (LevelClass::Mixed, "(l r^-1 l)^2 = (s r^5 l r^-1 l)^3"),
];

struct RelationContext {
    l: Permutation,
    r: Permutation,
    a: Permutation,
    b: Permutation,
    s: Permutation,
    odd_modulus: u64,
    two_modulus: u64,
}

#[derive(Clone, Debug)]
enum Token {
    Sym(char),
    Open,
    Close,
    Pow(i64, i64),
    One,
}

fn tokenize(word: &str) -> Vec<Token> {
    let chars: Vec<char> = word.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '(' => out.push(Token::Open),
            ')' => out.push(Token::Close),
            '1' => out.push(Token::One),
            '^' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && (chars[j] == '-' || chars[j] == '/' || chars[j].is_ascii_digit()) {
                    // a following symbol starts a new factor
                    if j > start && chars[j] == '-' {
                        break;
                    }
                    j += 1;
                }
                let e: String = chars[start..j].iter().collect();
                let (num, den) = match e.split_once('/') {
                    Some((n, d)) => (n.parse().unwrap(), d.parse().unwrap()),
                    None => (e.parse().unwrap(), 1),
                };
                out.push(Token::Pow(num, den));
                i = j;
                continue;
            }
            c => out.push(Token::Sym(c)),
        }
        i += 1;
    }
    out
}

fn inverse_mod(x: i64, m: u64) -> i64 {
    let m = m as i64;
    (1..m.max(2)).find(|&y| (x * y).rem_euclid(m) == 1 % m).unwrap_or(0)
}

impl RelationContext {
    fn symbol(&self, c: char) -> &Permutation {
        match c {
            'l' => &self.l,
            'r' => &self.r,
            'a' => &self.a,
            'b' => &self.b,
            's' => &self.s,
            _ => panic!("unknown relation symbol {c}"),
        }
    }

    fn exponent(&self, base: char, num: i64, den: i64) -> i64 {
        if den == 1 {
            return num;
        }
        let modulus = if matches!(base, 'a' | 'b') || self.two_modulus == 1 {
            self.odd_modulus
        } else {
            self.two_modulus
        };
        num * inverse_mod(den, modulus)
    }

    fn eval(&self, word: &str) -> Permutation {
        let tokens = tokenize(word);
        let mut pos = 0;
        self.eval_seq(&tokens, &mut pos)
    }

    fn eval_seq(&self, tokens: &[Token], pos: &mut usize) -> Permutation {
        let mut acc = Permutation::identity(self.l.degree());
        while *pos < tokens.len() {
            let (factor, base) = match &tokens[*pos] {
                Token::Close => break,
                Token::One => {
                    *pos += 1;
                    (Permutation::identity(self.l.degree()), '1')
                }
                Token::Sym(c) => {
                    *pos += 1;
                    (self.symbol(*c).clone(), *c)
                }
                Token::Open => {
                    *pos += 1;
                    let inner = self.eval_seq(tokens, pos);
                    *pos += 1;
                    (inner, '(')
                }
                Token::Pow(..) => panic!("dangling exponent"),
            };
            let factor = match tokens.get(*pos) {
                Some(Token::Pow(num, den)) => {
                    *pos += 1;
                    factor.pow(self.exponent(base, *num, *den))
                }
                _ => factor,
            };
            acc = perm::product(&[&acc, &factor]);
        }
        acc
    }

    fn holds(&self, relation: &str) -> bool {
        let (lhs, rhs) = relation.split_once('=').expect("relation has '='");
        self.eval(lhs) == self.eval(rhs)
    }
}

/// Congruence verdict from the relation table for the level class of `N`.
pub fn hsu_congruence_test(t: &PermutationTriple) -> Congruence {
    let l = t.sinf().inverse();
    let r = perm::product(&[t.s0(), t.sinf(), t.s0()]);
    let level = match l.order().to_u64() {
        Some(v) => v,
        None => return Congruence::Undecided,
    };
    if level == 1 {
        return Congruence::Congruence;
    }
    let two_part = level & level.wrapping_neg();
    let odd_part = level / two_part;
    let class = match (two_part, odd_part) {
        (1, _) => LevelClass::Odd,
        (_, 1) => LevelClass::PowerOfTwo,
        _ => LevelClass::Mixed,
    };
    let (a, b, l2, r2) = if class == LevelClass::Mixed {
        // c ≡ 1 (mod odd), c ≡ 0 (mod 2-part); d the other way around
        let c = (two_part as i64) * inverse_mod(two_part as i64, odd_part);
        let d = (odd_part as i64) * inverse_mod(odd_part as i64, two_part);
        (l.pow(c), r.pow(c), l.pow(d), r.pow(d))
    } else {
        (l.clone(), r.clone(), l.clone(), r.clone())
    };
    let two_modulus = if class == LevelClass::Odd { 1 } else { two_part };
    let odd_modulus = if class == LevelClass::PowerOfTwo { 1 } else { odd_part };
    let fifth = if two_modulus > 1 { inverse_mod(5, two_modulus) } else { 0 };
    let s = perm::product(&[&l2.pow(20), &r2.pow(fifth), &l2.pow(-4), &r2.inverse()]);
    let ctx = RelationContext { l: l2, r: r2, a, b, s, odd_modulus, two_modulus };
    let all = RELATIONS
        .iter()
        .filter(|(c, _)| *c == class)
        .all(|(_, rel)| ctx.holds(rel));
    if all {
        Congruence::Congruence
    } else {
        Congruence::Noncongruence
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::gamma0_triple;

    fn p(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn validation() {
        let t = validate_triple(Permutation::identity(1), Permutation::identity(1)).unwrap();
        assert!(t.sinf().is_identity());
        let t = validate_triple(p(3, &[&[1, 2]]), p(3, &[&[1, 2, 3]])).unwrap();
        assert_eq!(t.degree(), 3);
        let err = validate_triple(p(4, &[&[1, 2], &[3, 4]]), Permutation::identity(4)).unwrap_err();
        assert_eq!(err, TripleError::NotTransitive("{1,2} {3,4}".into()));
        let err = validate_triple(p(3, &[&[1, 2, 3]]), Permutation::identity(3)).unwrap_err();
        assert_eq!(err, TripleError::OrderViolation { name: "s0", order: 2 });
        let err = validate_triple(p(4, &[&[1, 2]]), p(4, &[&[1, 2, 3, 4]])).unwrap_err();
        assert_eq!(err, TripleError::OrderViolation { name: "s1", order: 3 });
    }

    #[test]
    fn product_check() {
        let s0 = p(3, &[&[1, 2]]);
        let s1 = p(3, &[&[1, 2, 3]]);
        assert_eq!(
            PermutationTriple::new(s0, s1, Permutation::identity(3)),
            Err(TripleError::ProductNotIdentity)
        );
    }

    #[test]
    fn degree_276_passport_profile() {
        let pp = Passport {
            n: 276,
            s0: "1^12 2^132".parse().unwrap(),
            s1: "3^92".parse().unwrap(),
            sinf: "1^3 7^39".parse().unwrap(),
        };
        let prof = profile_from_passport(&pp).unwrap();
        assert_eq!((prof.index, prof.e2, prof.e3, prof.num_cusps), (276, 12, 0, 42));
        assert_eq!((prof.level, prof.genus), (7, 0));
        assert_eq!(prof.principal_cusp.width, 1);
        assert_eq!(prof.congruence, Congruence::Undecided);
    }

    #[test]
    fn index_one_profile() {
        let t = validate_triple(Permutation::identity(1), Permutation::identity(1)).unwrap();
        let prof = analyze(&t).unwrap();
        assert_eq!((prof.index, prof.e2, prof.e3, prof.num_cusps, prof.genus), (1, 1, 1, 1, 0));
        assert_eq!(prof.congruence, Congruence::Congruence);
    }

    #[test]
    fn gamma0_11_has_genus_one() {
        let prof = profile(&gamma0_triple(11)).unwrap();
        assert_eq!((prof.index, prof.e2, prof.e3), (12, 0, 0));
        assert_eq!(prof.cusp_widths.to_string(), "1 11");
        assert_eq!(prof.genus, 1);
        assert_eq!(prof.principal_cusp, PrincipalCusp { width: 1, point: Some(0) });
    }

    #[test]
    fn corrupted_passport_is_rejected() {
        let pp = Passport {
            n: 4,
            s0: "2^2".parse().unwrap(),
            s1: "1 3".parse().unwrap(),
            sinf: "4".parse().unwrap(),
        };
        // 12 + 4 - 0 - 4 - 6 = 6
        assert_eq!(profile_from_passport(&pp), Err(TripleError::BadGenus { twelve_g: 6 }));
    }

    #[test]
    fn exponent_tokens() {
        let toks = tokenize("(l r^-1 l)^-1 s");
        assert!(matches!(toks[3], Token::Pow(-1, 1)));
        assert!(matches!(toks[6], Token::Pow(-1, 1)));
        assert!(matches!(tokenize("l^-1/2")[1], Token::Pow(-1, 2)));
    }

    #[test]
    fn gamma0_levels_are_congruence() {
        for n in 1..=12 {
            assert_eq!(hsu_congruence_test(&gamma0_triple(n)), Congruence::Congruence, "N = {n}");
        }
    }

    #[test]
    fn index_seven_psl27_subgroup() {
        // cycle types (1^3 2^2, 1 3^2, 7): the S4 subgroups of PSL(2,7), level 7 congruence
        let s0 = p(7, &[&[1, 2], &[3, 4]]);
        let s1 = Permutation::from_images(&[1, 3, 5, 6, 2, 7, 4]).unwrap();
        let t = validate_triple(s0, s1).unwrap();
        assert_eq!(cycle_type(t.sinf()).to_string(), "7");
        assert_eq!(hsu_congruence_test(&t), Congruence::Congruence);
    }
}
