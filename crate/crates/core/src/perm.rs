//! Permutations on `{1..n}` and the handful of permutation-group algorithms
//! the pipeline needs.
//!
//! Points are stored 0-based internally; every text form (parsing, `Display`,
//! cycle notation) is 1-based.
//!
//! Composition convention, used everywhere in this crate: `compose(p, q)`
//! applies `q` first, then `p`, i.e. `compose(p, q)(i) = p(q(i))`.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rug::Integer;
use thiserror::Error;

use crate::triple::PermutationTriple;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("not a bijection: image {value} {reason}")]
    NotBijection { value: usize, reason: &'static str },
    #[error("empty generator list on {0} points")]
    NoGenerators(usize),
    #[error("conjugacy search exceeded its time limit of {0:?}")]
    Timeout(Duration),
    #[error("malformed cycle type `{0}`")]
    BadCycleType(String),
}

/// A permutation of `{1..n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Builds a permutation from 1-based images (`images[i-1]` is the image of `i`).
    pub fn from_images(images: &[usize]) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut zero_based = Vec::with_capacity(n);
        for &v in images {
            if v == 0 || v > n {
                return Err(PermError::NotBijection { value: v, reason: "is out of range" });
            }
            if seen[v - 1] {
                return Err(PermError::NotBijection { value: v, reason: "appears twice" });
            }
            seen[v - 1] = true;
            zero_based.push(v - 1);
        }
        Ok(Permutation { images: zero_based })
    }

    pub(crate) fn from_zero_based(images: Vec<usize>) -> Self {
        debug_assert!({
            let mut s = images.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &v)| i == v)
        });
        Permutation { images }
    }

    /// Builds a permutation of degree `n` from 1-based disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (1..=n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x == 0 || x > n {
                    return Err(PermError::NotBijection { value: x, reason: "is out of range" });
                }
                if touched[x - 1] {
                    return Err(PermError::NotBijection { value: x, reason: "appears twice" });
                }
                touched[x - 1] = true;
                images[x - 1] = cycle[(k + 1) % cycle.len()];
            }
        }
        Permutation::from_images(&images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 0-based point.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// 1-based images, the serialized form.
    pub fn images_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v + 1).collect()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = compose_unchecked(&acc, &sq);
            }
            sq = compose_unchecked(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    /// Disjoint cycles (0-based), each starting at its smallest point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Length of the cycle through each point.
    pub(crate) fn cycle_length_of_points(&self) -> Vec<usize> {
        let mut len = vec![0; self.degree()];
        for c in self.cycles() {
            for &x in &c {
                len[x] = c.len();
            }
        }
        len
    }

    /// Order of the permutation (lcm of its cycle lengths).
    pub fn order(&self) -> Integer {
        let mut l = Integer::from(1);
        for c in self.cycles() {
            l.lcm_u_mut(c.len() as u32);
        }
        l
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({})", self)
    }
}

/// Cycle notation, 1-based, fixed points omitted; the identity prints as `()`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            write!(f, "(")?;
            for (k, x) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

fn compose_unchecked(p: &Permutation, q: &Permutation) -> Permutation {
    Permutation { images: q.images.iter().map(|&x| p.images[x]).collect() }
}

/// `p ∘ q`: applies `q` first, then `p`.
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation, PermError> {
    if p.degree() != q.degree() {
        return Err(PermError::DegreeMismatch(p.degree(), q.degree()));
    }
    Ok(compose_unchecked(p, q))
}

/// Left-to-right product of a word: `product(&[x, y, z]) = x ∘ y ∘ z` (z applied first).
pub(crate) fn product(word: &[&Permutation]) -> Permutation {
    let mut acc = Permutation::identity(word[0].degree());
    for p in word {
        acc = compose_unchecked(&acc, p);
    }
    acc
}

/// Multiset of cycle lengths, stored as sorted `(length, count)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    parts: Vec<(usize, usize)>,
}

impl CycleType {
    pub fn from_lengths(lengths: impl IntoIterator<Item = usize>) -> Self {
        let mut map = BTreeMap::new();
        for l in lengths {
            *map.entry(l).or_insert(0usize) += 1;
        }
        CycleType { parts: map.into_iter().collect() }
    }

    pub fn parts(&self) -> &[(usize, usize)] {
        &self.parts
    }

    /// Σ length·count.
    pub fn degree(&self) -> usize {
        self.parts.iter().map(|(l, c)| l * c).sum()
    }

    /// Number of cycles of exactly this length.
    pub fn count(&self, length: usize) -> usize {
        self.parts.iter().find(|(l, _)| *l == length).map_or(0, |(_, c)| *c)
    }

    pub fn num_cycles(&self) -> usize {
        self.parts.iter().map(|(_, c)| c).sum()
    }

    /// lcm of the cycle lengths.
    pub fn lcm(&self) -> u64 {
        let mut l = Integer::from(1);
        for (len, _) in &self.parts {
            l.lcm_u_mut(*len as u32);
        }
        l.to_u64().expect("cycle-length lcm fits in u64")
    }
}

/// Exponent notation, e.g. `1^12 2^132`; a count of one is printed bare (`1 3^2`).
impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (l, c)) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if *c == 1 {
                write!(f, "{}", l)?;
            } else {
                write!(f, "{}^{}", l, c)?;
            }
        }
        Ok(())
    }
}

impl FromStr for CycleType {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PermError::BadCycleType(s.to_string());
        let mut lengths = Vec::new();
        for tok in s.split_whitespace() {
            let (l, c) = match tok.split_once('^') {
                Some((l, c)) => (l, c),
                None => (tok, "1"),
            };
            let l: usize = l.parse().map_err(|_| bad())?;
            let c: usize = c.parse().map_err(|_| bad())?;
            if l == 0 {
                return Err(bad());
            }
            lengths.extend(std::iter::repeat(l).take(c));
        }
        if lengths.is_empty() {
            return Err(bad());
        }
        Ok(CycleType::from_lengths(lengths))
    }
}

pub fn cycle_type(p: &Permutation) -> CycleType {
    CycleType::from_lengths(p.cycles().iter().map(|c| c.len()))
}

/// Orbits (0-based, each sorted) of the group generated by `gens` on `n` points.
pub fn orbits(gens: &[Permutation], n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            for g in gens {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// True iff the orbit of point 1 under `⟨gens⟩` is all of `{1..n}`.
pub fn is_transitive(gens: &[Permutation], n: usize) -> Result<bool, PermError> {
    if let Some(g) = gens.iter().find(|g| g.degree() != n) {
        return Err(PermError::DegreeMismatch(g.degree(), n));
    }
    if gens.is_empty() {
        return if n <= 1 { Ok(true) } else { Err(PermError::NoGenerators(n)) };
    }
    Ok(n == 0 || orbits(gens, n)[0].len() == n)
}

struct Level {
    base_point: usize,
    /// Indices into the strong generating set of generators fixing all earlier base points.
    gens: Vec<usize>,
    /// `transversal[x] = Some(u)` with `u(base_point) = x` for each orbit point `x`.
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
    checked: HashSet<(usize, usize)>,
}

impl Level {
    fn new(base_point: usize, n: usize) -> Self {
        Level {
            base_point,
            gens: Vec::new(),
            transversal: vec![None; n],
            orbit: Vec::new(),
            checked: HashSet::new(),
        }
    }

    fn rebuild_orbit(&mut self, strong: &[Permutation]) {
        let n = self.transversal.len();
        self.transversal = vec![None; n];
        self.transversal[self.base_point] = Some(Permutation::identity(n));
        self.orbit = vec![self.base_point];
        let mut k = 0;
        while k < self.orbit.len() {
            let x = self.orbit[k];
            for &gi in &self.gens {
                let y = strong[gi].apply(x);
                if self.transversal[y].is_none() {
                    let u = compose_unchecked(&strong[gi], self.transversal[x].as_ref().unwrap());
                    self.transversal[y] = Some(u);
                    self.orbit.push(y);
                }
            }
            k += 1;
        }
    }
}

/// Base and strong generating set built by the deterministic Schreier–Sims algorithm.
pub struct StabilizerChain {
    strong: Vec<Permutation>,
    levels: Vec<Level>,
    n: usize,
}

impl StabilizerChain {
    /// Base points are chosen in increasing order (first moved point), so the chain
    /// and its timing are reproducible.
    pub fn new(gens: &[Permutation]) -> Result<Self, PermError> {
        let n = gens.first().map(|g| g.degree()).ok_or(PermError::NoGenerators(0))?;
        if let Some(g) = gens.iter().find(|g| g.degree() != n) {
            return Err(PermError::DegreeMismatch(g.degree(), n));
        }
        let mut chain = StabilizerChain { strong: Vec::new(), levels: Vec::new(), n };
        for g in gens.iter().filter(|g| !g.is_identity()) {
            chain.add_strong_generator(g.clone(), 0);
        }
        for lvl in chain.levels.iter_mut() {
            lvl.rebuild_orbit(&chain.strong);
        }
        chain.complete();
        Ok(chain)
    }

    /// Adds `h` (which fixes the first `from_level` base points) to levels `0..=j`
    /// where `j` is the first level whose base point `h` moves; extends the base if needed.
    fn add_strong_generator(&mut self, h: Permutation, from_level: usize) -> usize {
        let mut j = from_level;
        while j < self.levels.len() && h.apply(self.levels[j].base_point) == self.levels[j].base_point {
            j += 1;
        }
        if j == self.levels.len() {
            let moved = (0..self.n).find(|&x| h.apply(x) != x).expect("nonidentity strong generator");
            self.levels.push(Level::new(moved, self.n));
        }
        let idx = self.strong.len();
        self.strong.push(h);
        for lvl in self.levels.iter_mut().take(j + 1) {
            lvl.gens.push(idx);
        }
        j
    }

    /// Sifts `g` through levels `start..`; returns the residue and the level where it stopped.
    fn strip(&self, g: &Permutation, start: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for (i, lvl) in self.levels.iter().enumerate().skip(start) {
            let x = h.apply(lvl.base_point);
            match &lvl.transversal[x] {
                Some(u) => h = compose_unchecked(&u.inverse(), &h),
                None => return (h, i),
            }
        }
        let depth = self.levels.len();
        (h, depth)
    }

    fn complete(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            let level = i - 1;
            let mut restart = None;
            'scan: for oi in 0..self.levels[level].orbit.len() {
                let x = self.levels[level].orbit[oi];
                for gk in 0..self.levels[level].gens.len() {
                    let gi = self.levels[level].gens[gk];
                    if !self.levels[level].checked.insert((x, gi)) {
                        continue;
                    }
                    let lvl = &self.levels[level];
                    let s = &self.strong[gi];
                    let ux = lvl.transversal[x].as_ref().unwrap();
                    let usx = lvl.transversal[s.apply(x)].as_ref().unwrap();
                    let schreier = compose_unchecked(&usx.inverse(), &compose_unchecked(s, ux));
                    let (h, _) = self.strip(&schreier, level + 1);
                    if !h.is_identity() {
                        let j = self.add_strong_generator(h, level + 1);
                        for l in level + 1..=j {
                            let strong = &self.strong;
                            self.levels[l].rebuild_orbit(strong);
                        }
                        restart = Some(j + 1);
                        break 'scan;
                    }
                }
            }
            match restart {
                Some(next) => i = next,
                None => i -= 1,
            }
        }
    }

    pub fn order(&self) -> Integer {
        self.levels.iter().fold(Integer::from(1), |acc, l| acc * l.orbit.len() as u32)
    }

    /// 0-based base points.
    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.n && {
            let (h, depth) = self.strip(g, 0);
            depth == self.levels.len() && h.is_identity()
        }
    }
}

/// Exact order of `⟨gens⟩`.
pub fn group_order(gens: &[Permutation]) -> Result<Integer, PermError> {
    Ok(StabilizerChain::new(gens)?.order())
}

pub const DEFAULT_CONJUGACY_TIMEOUT: Duration = Duration::from_secs(60);

/// Finds `π` with `π a_i π⁻¹ = b_i` for all three members of the triples.
///
/// Backtracking over point maps: each point of `a` may only go to a point of `b`
/// lying in cycles of the same lengths under all three permutations, and every
/// choice is propagated along the generators before branching again.
pub fn simultaneously_conjugate(
    a: &PermutationTriple,
    b: &PermutationTriple,
    timeout: Duration,
) -> Result<Option<Permutation>, PermError> {
    let n = a.degree();
    if b.degree() != n {
        return Err(PermError::DegreeMismatch(n, b.degree()));
    }
    let ga = [a.s0(), a.s1(), a.sinf()];
    let gb = [b.s0(), b.s1(), b.sinf()];
    for (p, q) in ga.iter().zip(gb.iter()) {
        if cycle_type(p) != cycle_type(q) {
            return Ok(None);
        }
    }
    let sig = |t: &[&Permutation; 3]| -> Vec<[usize; 3]> {
        let lens: Vec<Vec<usize>> = t.iter().map(|p| p.cycle_length_of_points()).collect();
        (0..n).map(|i| [lens[0][i], lens[1][i], lens[2][i]]).collect()
    };
    let sa = sig(&ga);
    let sb = sig(&gb);
    let search = ConjugacySearch {
        ga,
        gb,
        sa,
        sb,
        deadline: Instant::now() + timeout,
        timeout,
    };
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    match search.extend(&mut map, &mut used)? {
        true => Ok(Some(Permutation::from_zero_based(map))),
        false => Ok(None),
    }
}

struct ConjugacySearch<'a> {
    ga: [&'a Permutation; 3],
    gb: [&'a Permutation; 3],
    sa: Vec<[usize; 3]>,
    sb: Vec<[usize; 3]>,
    deadline: Instant,
    timeout: Duration,
}

impl ConjugacySearch<'_> {
    fn extend(&self, map: &mut [usize], used: &mut [bool]) -> Result<bool, PermError> {
        let Some(p) = map.iter().position(|&v| v == usize::MAX) else {
            return Ok(true);
        };
        for q in 0..map.len() {
            if used[q] || self.sa[p] != self.sb[q] {
                continue;
            }
            if Instant::now() > self.deadline {
                return Err(PermError::Timeout(self.timeout));
            }
            let mut trail = Vec::new();
            if self.propagate(p, q, map, used, &mut trail) && self.extend(map, used)? {
                return Ok(true);
            }
            for x in trail {
                used[map[x]] = false;
                map[x] = usize::MAX;
            }
        }
        Ok(false)
    }

    fn propagate(&self, p: usize, q: usize, map: &mut [usize], used: &mut [bool], trail: &mut Vec<usize>) -> bool {
        let mut queue = VecDeque::from([(p, q)]);
        map[p] = q;
        used[q] = true;
        trail.push(p);
        while let Some((x, y)) = queue.pop_front() {
            for k in 0..3 {
                let (x2, y2) = (self.ga[k].apply(x), self.gb[k].apply(y));
                if map[x2] == usize::MAX {
                    if used[y2] || self.sa[x2] != self.sb[y2] {
                        return false;
                    }
                    map[x2] = y2;
                    used[y2] = true;
                    trail.push(x2);
                    queue.push_back((x2, y2));
                } else if map[x2] != y2 {
                    return false;
                }
            }
        }
        true
    }
}

/// Points of the projective line over `Z/N`, as canonical `(c, d)` representatives.
/// `(0:1)` comes first; the rest are sorted by representative.
pub(crate) fn projective_line(n: u64) -> Vec<(u64, u64)> {
    if n == 1 {
        return vec![(0, 0)];
    }
    let units: Vec<u64> = (1..n).filter(|&u| gcd(u, n) == 1).collect();
    let mut points = Vec::new();
    for c in 0..n {
        for d in 0..n {
            if gcd(gcd(c, d), n) != 1 {
                continue;
            }
            let canon = canonical_point(c, d, n, &units);
            if canon == (c, d) {
                points.push(canon);
            }
        }
    }
    points.sort_by_key(|&(c, d)| (c != 0 || d != 1, c, d));
    points
}

fn canonical_point(c: u64, d: u64, n: u64, units: &[u64]) -> (u64, u64) {
    units.iter().map(|&u| (u * c % n, u * d % n)).min().unwrap_or((c, d))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Right action of a 2×2 integer matrix `[[a, b], [c, d]]` on `P¹(Z/N)`, as a permutation.
pub(crate) fn matrix_action(points: &[(u64, u64)], n: u64, m: [[i64; 2]; 2]) -> Permutation {
    if n == 1 {
        return Permutation::identity(1);
    }
    let units: Vec<u64> = (1..n).filter(|&u| gcd(u, n) == 1).collect();
    let index: std::collections::HashMap<(u64, u64), usize> =
        points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let md = |v: i64| v.rem_euclid(n as i64) as u64;
    let images = points
        .iter()
        .map(|&(c, d)| {
            let (c, d) = (c as i64, d as i64);
            let nc = md(c * m[0][0] + d * m[1][0]);
            let nd = md(c * m[0][1] + d * m[1][1]);
            index[&canonical_point(nc, nd, n, &units)]
        })
        .collect();
    Permutation::from_zero_based(images)
}

/// The coset action of the modular group on `Γ0(N)\PSL2(Z)`, realized on `P¹(Z/N)`.
///
/// `σ0` is the image of `S = [[0,-1],[1,0]]` and `σ1` the image of `ST` under the
/// homomorphism `g ↦ (x ↦ x·g⁻¹)`, so `σ∞` is the translation `x ↦ x·T` whose
/// cycles are the cusp widths of `Γ0(N)`. Point 1 is `(0:1)`, whose stabilizer is `Γ0(N)`.
pub fn gamma0_triple(n: u64) -> PermutationTriple {
    assert!(n >= 1, "level must be positive");
    let points = projective_line(n);
    // S⁻¹ = [[0,1],[-1,0]], (ST)⁻¹ = [[1,1],[-1,0]]
    let s0 = matrix_action(&points, n, [[0, 1], [-1, 0]]);
    let s1 = matrix_action(&points, n, [[1, 1], [-1, 0]]);
    PermutationTriple::from_pair(s0, s1).expect("coset action is a valid triple")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn composition_examples() {
        let id = Permutation::identity(3);
        let t = p(3, &[&[1, 2]]);
        assert_eq!(compose(&id, &t).unwrap(), t);
        assert!(compose(&t, &t).unwrap().is_identity());
        let c = p(3, &[&[1, 2, 3]]);
        assert_eq!(compose(&c, &t).unwrap(), p(3, &[&[1, 3]]));
        assert_eq!(compose(&c, &Permutation::identity(4)), Err(PermError::DegreeMismatch(3, 4)));
    }

    #[test]
    fn cycle_types() {
        assert_eq!(cycle_type(&Permutation::identity(5)).to_string(), "1^5");
        let q = p(6, &[&[1, 2], &[3, 4, 5]]);
        assert_eq!(cycle_type(&q).to_string(), "1 2 3");
        let parsed: CycleType = "1^3 7^39".parse().unwrap();
        assert_eq!(parsed.degree(), 276);
        assert_eq!(parsed.count(7), 39);
        assert_eq!(parsed.lcm(), 7);
    }

    #[test]
    fn bijection_errors() {
        assert!(matches!(Permutation::from_images(&[1, 1]), Err(PermError::NotBijection { value: 1, .. })));
        assert!(Permutation::from_images(&[3, 1]).is_err());
    }

    #[test]
    fn transitivity() {
        assert!(is_transitive(&[p(3, &[&[1, 2, 3]])], 3).unwrap());
        assert!(!is_transitive(&[p(3, &[&[1, 2]])], 3).unwrap());
        assert_eq!(is_transitive(&[], 2), Err(PermError::NoGenerators(2)));
        let t = gamma0_triple(2);
        assert!(is_transitive(&[t.s0().clone(), t.s1().clone()], 3).unwrap());
    }

    #[test]
    fn small_group_orders() {
        assert_eq!(group_order(&[p(3, &[&[1, 2]]), p(3, &[&[1, 2, 3]])]).unwrap(), 6);
        assert_eq!(group_order(&[Permutation::identity(4)]).unwrap(), 1);
        // S_8 and A_8
        let s8 = [p(8, &[&[1, 2]]), p(8, &[&[1, 2, 3, 4, 5, 6, 7, 8]])];
        assert_eq!(group_order(&s8).unwrap(), 40320);
        let a8 = [p(8, &[&[1, 2, 3]]), p(8, &[&[2, 3, 4, 5, 6, 7, 8]])];
        assert_eq!(group_order(&a8).unwrap(), 20160);
    }

    #[test]
    fn mathieu_group_orders() {
        let g1 = p(12, &[&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]]);
        let g2 = p(12, &[&[3, 7, 11, 8], &[4, 10, 5, 6]]);
        let g3 = p(12, &[&[1, 12], &[2, 11], &[3, 6], &[4, 8], &[5, 9], &[7, 10]]);
        assert_eq!(group_order(&[g1.clone(), g2.clone()]).unwrap(), 7920);
        assert_eq!(group_order(&[g1, g2, g3]).unwrap(), 95040);
    }

    #[test]
    fn psl2_orders_from_coset_action() {
        // PSL2(Z) acts on P¹(F_p) through PSL(2, p) of order p(p²-1)/2.
        for q in [5u64, 7, 11, 13, 23] {
            let t = gamma0_triple(q);
            let ord = group_order(&[t.s0().clone(), t.s1().clone()]).unwrap();
            assert_eq!(ord, q * (q * q - 1) / 2, "p = {q}");
        }
    }

    #[test]
    fn chain_membership() {
        let t = gamma0_triple(7);
        let chain = StabilizerChain::new(&[t.s0().clone(), t.s1().clone()]).unwrap();
        assert!(chain.contains(t.sinf()));
        assert!(!chain.contains(&p(8, &[&[1, 2]])));
    }

    #[test]
    fn gamma0_small_levels() {
        let t1 = gamma0_triple(1);
        assert_eq!(t1.degree(), 1);
        let t2 = gamma0_triple(2);
        assert_eq!(t2.degree(), 3);
        assert_eq!(cycle_type(t2.s0()).to_string(), "1 2");
        assert_eq!(cycle_type(t2.s1()).to_string(), "3");
        assert_eq!(cycle_type(t2.sinf()).to_string(), "1 2");
        let t11 = gamma0_triple(11);
        assert_eq!(t11.degree(), 12);
        assert_eq!(cycle_type(t11.sinf()).to_string(), "1 11");
        // point 1 = (0:1) is fixed by T, i.e. it is the cusp at infinity
        assert_eq!(t11.sinf().apply(0), 0);
    }

    #[test]
    fn conjugacy_search() {
        let a = gamma0_triple(6);
        assert!(simultaneously_conjugate(&a, &a, DEFAULT_CONJUGACY_TIMEOUT).unwrap().is_some());
        let pi = p(12, &[&[1, 5, 9], &[2, 12], &[3, 7, 4, 10]]);
        let b = a.conjugate_by(&pi);
        let found = simultaneously_conjugate(&a, &b, DEFAULT_CONJUGACY_TIMEOUT).unwrap().unwrap();
        assert_eq!(a.conjugate_by(&found), b);
        let c = gamma0_triple(11);
        let d = gamma0_triple(7);
        // different degrees
        assert!(simultaneously_conjugate(&c, &d, DEFAULT_CONJUGACY_TIMEOUT).is_err());
        // same degree (8 = index of Γ0(7)), different cycle types
        let g4 = gamma0_triple(4);
        let g5 = gamma0_triple(5);
        assert_eq!(simultaneously_conjugate(&g4, &g5, DEFAULT_CONJUGACY_TIMEOUT).unwrap(), None);
    }
}
