//! Noncommutative polynomials over `Scalar`, oriented rewriting systems with
//! a critical-pair confluence check, and star structures.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::{format_term, Atom, FreeExpr};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Generator index into an [`Alphabet`].
pub type Gen = u8;
pub type Word = Vec<Gen>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NcError {
    #[error("rule {lhs} -> {rhs} does not decrease the word order")]
    NotDecreasing { lhs: String, rhs: String },
    #[error("critical pair at {witness} does not resolve")]
    NotConfluent { witness: String },
    #[error("star is not involutive on generator {0}")]
    StarNotInvolutive(String),
    #[error("star does not preserve the relation with leading word {0}")]
    StarIncompatible(String),
    #[error("element is not homogeneous of degree {0}")]
    Inhomogeneous(usize),
    #[error("symbol {0} is not in the alphabet")]
    UnknownSymbol(String),
}

/// Degree-lexicographic comparison of words.
pub fn deglex(a: &[Gen], b: &[Gen]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    /// 0 for algebra generators, +1/-1 for `delta^(+1/-1)`.
    pub grade: i32,
    pub star_partner: Gen,
    pub star_scale: Scalar,
}

/// Ordered generator list; the index order is the term order on letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    gens: Vec<Generator>,
}

impl Alphabet {
    pub fn new(gens: Vec<Generator>) -> Result<Self, NcError> {
        for g in &gens {
            let p = gens.get(g.star_partner as usize).ok_or_else(|| NcError::StarNotInvolutive(g.name.clone()))?;
            let back = gens.get(p.star_partner as usize).map(|b| &b.name);
            let total = g.star_scale.conj() * &p.star_scale;
            if back != Some(&g.name) || !total.is_one() {
                return Err(NcError::StarNotInvolutive(g.name.clone()));
            }
        }
        Ok(Alphabet { gens })
    }

    /// Self-adjoint generators with the given names.
    pub fn free(names: &[&str]) -> Self {
        let gens = names
            .iter()
            .enumerate()
            .map(|(i, n)| Generator { name: n.to_string(), grade: 0, star_partner: i as Gen, star_scale: Scalar::one() })
            .collect();
        Alphabet { gens }
    }

    /// `z < z*` with `z <-> z*`.
    pub fn quantum_plane() -> Self {
        let g = |name: &str, p| Generator { name: name.into(), grade: 0, star_partner: p, star_scale: Scalar::one() };
        Alphabet { gens: vec![g("z", 1), g("z*", 0)] }
    }

    /// `delta < delta^-1 < z < z*` with `delta* = delta^-1`.
    pub fn ore_extension() -> Self {
        let g = |name: &str, grade, p| Generator { name: name.into(), grade, star_partner: p, star_scale: Scalar::one() };
        Alphabet { gens: vec![g("delta", 1, 1), g("delta^-1", -1, 0), g("z", 0, 3), g("z*", 0, 2)] }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generator(&self, g: Gen) -> &Generator {
        &self.gens[g as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<Gen> {
        self.gens.iter().position(|g| g.name == name).map(|i| i as Gen)
    }

    pub fn name(&self, g: Gen) -> &str {
        &self.gens[g as usize].name
    }

    /// Sum of generator grades along a word.
    pub fn grade(&self, w: &[Gen]) -> i32 {
        w.iter().map(|&g| self.gens[g as usize].grade).sum()
    }

    /// Map a parsed atom to a generator by name.
    pub fn atom(&self, a: Atom) -> Option<Gen> {
        self.index_of(a.name())
    }
}

/// Finite linear combination of words with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct NCPoly {
    terms: BTreeMap<Word, Scalar>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        NCPoly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        NCPoly::monomial(Vec::new(), c)
    }

    pub fn generator(g: Gen) -> Self {
        NCPoly::monomial(vec![g], Scalar::one())
    }

    pub fn word(w: &[Gen]) -> Self {
        NCPoly::monomial(w.to_vec(), Scalar::one())
    }

    pub fn monomial(w: Word, c: Scalar) -> Self {
        let mut p = NCPoly::zero();
        p.add_term(w, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut p = NCPoly::zero();
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Word, Scalar> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[Gen]) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// The constant term when nothing else occurs.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                let v = e.get() + &c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_scaled(&mut self, o: &NCPoly, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &o.terms {
            self.add_term(w.clone(), x * c);
        }
    }

    pub fn add(&self, o: &NCPoly) -> NCPoly {
        let mut r = self.clone();
        r.add_scaled(o, &Scalar::one());
        r
    }

    pub fn sub(&self, o: &NCPoly) -> NCPoly {
        let mut r = self.clone();
        r.add_scaled(o, &Scalar::from_int(-1));
        r
    }

    pub fn neg(&self) -> NCPoly {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> NCPoly {
        if c.is_zero() {
            return NCPoly::zero();
        }
        NCPoly { terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect() }
    }

    /// Free (concatenation) product; normal-form it with a rewriting system.
    pub fn mul(&self, o: &NCPoly) -> NCPoly {
        let mut r = NCPoly::zero();
        for (u, a) in &self.terms {
            for (v, b) in &o.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                r.add_term(w, a * b);
            }
        }
        r
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).max()
    }

    pub fn is_homogeneous(&self, degree: usize) -> bool {
        self.terms.keys().all(|w| w.len() == degree)
    }

    /// Coefficient-wise complex conjugation; words are untouched.
    pub fn conj_coeffs(&self) -> NCPoly {
        NCPoly { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.conj())).collect() }
    }

    /// Convert a parsed expression; every atom must be in the alphabet.
    pub fn from_free(e: &FreeExpr, alphabet: &Alphabet) -> Result<NCPoly, NcError> {
        let mut p = NCPoly::zero();
        for (atoms, c) in &e.terms {
            let mut w = Word::with_capacity(atoms.len());
            for &a in atoms {
                w.push(alphabet.atom(a).ok_or_else(|| NcError::UnknownSymbol(a.name().into()))?);
            }
            p.add_term(w, c.clone());
        }
        Ok(p)
    }

    /// Terms in degree-lex order.
    pub fn sorted_terms(&self) -> Vec<(&Word, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| deglex(a.0, b.0));
        v
    }

    /// Parseable text; runs of `delta` print as one power.
    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (w, c) in self.sorted_terms().into_iter().rev() {
            let names = word_names(w, alphabet);
            let t = format_term(c, names.iter().map(String::as_str));
            if out.is_empty() {
                out.push_str(&t);
            } else if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&t);
            }
        }
        out
    }
}

/// Printable letter names with delta runs folded into powers.
pub fn word_names(w: &[Gen], alphabet: &Alphabet) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let g = alphabet.generator(w[i]);
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        if g.grade != 0 && j - i > 1 {
            out.push(format!("delta^{}", g.grade * (j - i) as i32));
            i = j;
        } else {
            out.push(g.name.clone());
            i += 1;
        }
    }
    out
}

/// Displays via generator names `x0, x1, ...` when no alphabet is at hand.
impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .sorted_terms()
            .into_iter()
            .map(|(w, c)| {
                let names: Vec<String> = w.iter().map(|g| format!("x{g}")).collect();
                format_term(c, names.iter().map(String::as_str))
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: NCPoly,
}

impl Rule {
    pub fn new(lhs: Word, rhs: NCPoly) -> Self {
        Rule { lhs, rhs }
    }
}

/// Which redex to contract first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPair {
    pub word: Word,
    pub rules: (usize, usize),
    pub left: NCPoly,
    pub right: NCPoly,
    pub resolves: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfluenceReport {
    pub pairs: Vec<CriticalPair>,
}

impl ConfluenceReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(|p| p.resolves)
    }

    pub fn witness(&self) -> Option<&CriticalPair> {
        self.pairs.iter().find(|p| !p.resolves)
    }
}

/// Rules oriented by degree-lex order over an alphabet.
pub struct RewriteSystem {
    alphabet: Alphabet,
    rules: Vec<Rule>,
    cache: Mutex<HashMap<Word, NCPoly>>,
}

impl Clone for RewriteSystem {
    fn clone(&self) -> Self {
        RewriteSystem { alphabet: self.alphabet.clone(), rules: self.rules.clone(), cache: Mutex::new(HashMap::new()) }
    }
}

impl fmt::Debug for RewriteSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RewriteSystem").field("alphabet", &self.alphabet).field("rules", &self.rules).finish()
    }
}

impl RewriteSystem {
    /// Checks orientation and local confluence.
    pub fn new(alphabet: Alphabet, rules: Vec<Rule>) -> Result<Self, NcError> {
        let rs = RewriteSystem::unchecked(alphabet, rules)?;
        let report = rs.check_local_confluence();
        if let Some(w) = report.witness() {
            return Err(NcError::NotConfluent { witness: rs.word_text(&w.word) });
        }
        Ok(rs)
    }

    /// Checks orientation only, so that non-confluent systems can be inspected.
    pub fn unchecked(alphabet: Alphabet, rules: Vec<Rule>) -> Result<Self, NcError> {
        for r in &rules {
            let ok = !r.lhs.is_empty() && r.rhs.terms().keys().all(|w| deglex(w, &r.lhs) == Ordering::Less);
            if !ok {
                return Err(NcError::NotDecreasing { lhs: word_text(&r.lhs, &alphabet), rhs: r.rhs.to_text(&alphabet) });
            }
        }
        Ok(RewriteSystem { alphabet, rules, cache: Mutex::new(HashMap::new()) })
    }

    /// `z*z -> q zz*`.
    pub fn quantum_plane() -> Self {
        let rules = vec![Rule::new(vec![1, 0], NCPoly::monomial(vec![0, 1], Scalar::q()))];
        RewriteSystem::new(Alphabet::quantum_plane(), rules).expect("quantum plane relations are confluent")
    }

    /// Quantum plane with `delta^(+-1)` adjoined, `v delta = q^(2 alpha) delta v`
    /// for `v` in `{z, z*}`; `two_alpha` is `2 alpha`.
    pub fn ore_extension(two_alpha: i64) -> Self {
        let (d, di, z, zs) = (0, 1, 2, 3);
        let up = Scalar::s_pow(2 * two_alpha);
        let down = Scalar::s_pow(-2 * two_alpha);
        let rules = vec![
            Rule::new(vec![zs, z], NCPoly::monomial(vec![z, zs], Scalar::q())),
            Rule::new(vec![z, d], NCPoly::monomial(vec![d, z], up.clone())),
            Rule::new(vec![zs, d], NCPoly::monomial(vec![d, zs], up)),
            Rule::new(vec![z, di], NCPoly::monomial(vec![di, z], down.clone())),
            Rule::new(vec![zs, di], NCPoly::monomial(vec![di, zs], down)),
            Rule::new(vec![d, di], NCPoly::one()),
            Rule::new(vec![di, d], NCPoly::one()),
        ];
        RewriteSystem::new(Alphabet::ore_extension(), rules).expect("Ore relations are confluent")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn word_text(&self, w: &[Gen]) -> String {
        word_text(w, &self.alphabet)
    }

    pub fn text(&self, p: &NCPoly) -> String {
        p.to_text(&self.alphabet)
    }

    fn redexes(&self, w: &[Gen]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (ri, r) in self.rules.iter().enumerate() {
            let n = r.lhs.len();
            if n > w.len() {
                continue;
            }
            for pos in 0..=w.len() - n {
                if w[pos..pos + n] == r.lhs[..] {
                    out.push((pos, ri));
                }
            }
        }
        out
    }

    pub fn is_normal(&self, w: &[Gen]) -> bool {
        self.redexes(w).is_empty()
    }

    /// One contraction of rule `ri` at position `pos`, scaled by `c`.
    fn contract(&self, w: &[Gen], pos: usize, ri: usize, c: &Scalar) -> NCPoly {
        let r = &self.rules[ri];
        let mut out = NCPoly::zero();
        for (v, x) in r.rhs.terms() {
            let mut nw = w[..pos].to_vec();
            nw.extend_from_slice(v);
            nw.extend_from_slice(&w[pos + r.lhs.len()..]);
            out.add_term(nw, x * c);
        }
        out
    }

    fn nf_word(&self, w: &[Gen]) -> NCPoly {
        if let Some(p) = self.cache.lock().expect("cache lock").get(w) {
            return p.clone();
        }
        let red = self.redexes(w);
        let result = match red.iter().min() {
            None => NCPoly::word(w),
            Some(&(pos, ri)) => {
                let step = self.contract(w, pos, ri, &Scalar::one());
                let mut out = NCPoly::zero();
                for (v, c) in step.terms() {
                    out.add_scaled(&self.nf_word(v), c);
                }
                out
            }
        };
        self.cache.lock().expect("cache lock").insert(w.to_vec(), result.clone());
        result
    }

    /// Unique normal form (leftmost strategy, memoised per word).
    pub fn normal_form(&self, x: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in x.terms() {
            if w.len() < 2 {
                out.add_term(w.clone(), c.clone());
            } else {
                out.add_scaled(&self.nf_word(w), c);
            }
        }
        out
    }

    /// Normal form reached by an explicit strategy, without memoisation.
    pub fn normal_form_with(&self, x: &NCPoly, strategy: Strategy) -> NCPoly {
        let mut rng = ChaCha8Rng::seed_from_u64(match strategy {
            Strategy::Random(s) => s,
            _ => 0,
        });
        let mut work = x.clone();
        let mut done = NCPoly::zero();
        while let Some((w, c)) = work.terms.pop_first() {
            let red = self.redexes(&w);
            if red.is_empty() {
                done.add_term(w, c);
                continue;
            }
            let &(pos, ri) = match strategy {
                Strategy::Leftmost => red.iter().min().unwrap(),
                Strategy::Rightmost => red.iter().max().unwrap(),
                Strategy::Random(_) => &red[rng.gen_range(0..red.len())],
            };
            let step = self.contract(&w, pos, ri, &c);
            work.add_scaled(&step, &Scalar::one());
        }
        done
    }

    /// Normal-formed product.
    pub fn mul(&self, a: &NCPoly, b: &NCPoly) -> NCPoly {
        self.normal_form(&a.mul(b))
    }

    /// All overlap and inclusion ambiguities with both contractions normal-formed.
    pub fn check_local_confluence(&self) -> ConfluenceReport {
        let mut pairs = Vec::new();
        let one = Scalar::one();
        for (i, r1) in self.rules.iter().enumerate() {
            for (j, r2) in self.rules.iter().enumerate() {
                let (l1, l2) = (&r1.lhs, &r2.lhs);
                // proper overlaps: suffix of l1 equals prefix of l2
                for k in 1..l1.len().min(l2.len()) {
                    if l1[l1.len() - k..] == l2[..k] {
                        let mut w = l1.clone();
                        w.extend_from_slice(&l2[k..]);
                        let a = self.contract(&w, 0, i, &one);
                        let b = self.contract(&w, l1.len() - k, j, &one);
                        pairs.push(self.resolve(w, (i, j), &a, &b));
                    }
                }
                // inclusions: l2 occurs inside l1
                if i != j && l2.len() <= l1.len() {
                    for pos in 0..=l1.len() - l2.len() {
                        if l1[pos..pos + l2.len()] == l2[..] && (l1 != l2 || i < j) {
                            let a = self.contract(l1, 0, i, &one);
                            let b = self.contract(l1, pos, j, &one);
                            pairs.push(self.resolve(l1.clone(), (i, j), &a, &b));
                        }
                    }
                }
            }
        }
        ConfluenceReport { pairs }
    }

    fn resolve(&self, word: Word, rules: (usize, usize), a: &NCPoly, b: &NCPoly) -> CriticalPair {
        let left = self.normal_form_with(a, Strategy::Leftmost);
        let right = self.normal_form_with(b, Strategy::Leftmost);
        let resolves = left == right;
        CriticalPair { word, rules, left, right, resolves }
    }

    /// Antilinear antimultiplicative image, normal-formed.
    pub fn star(&self, x: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in x.terms() {
            let mut coeff = c.conj();
            let mut nw = Word::with_capacity(w.len());
            for &g in w.iter().rev() {
                let gen = self.alphabet.generator(g);
                coeff = coeff * &gen.star_scale;
                nw.push(gen.star_partner);
            }
            out.add_term(nw, coeff);
        }
        self.normal_form(&out)
    }

    /// Every relation `lhs - rhs` is sent into the ideal by star.
    pub fn check_star_compatible(&self) -> Result<(), NcError> {
        for r in &self.rules {
            let rel = NCPoly::word(&r.lhs).sub(&r.rhs);
            if !self.star(&rel).is_zero() {
                return Err(NcError::StarIncompatible(self.word_text(&r.lhs)));
            }
        }
        Ok(())
    }

    /// Normal words of a given length, in degree-lex order.
    pub fn normal_words(&self, len: usize) -> Vec<Word> {
        all_words(self.alphabet.len(), len).into_iter().filter(|w| self.is_normal(w)).collect()
    }
}

fn word_text(w: &[Gen], alphabet: &Alphabet) -> String {
    if w.is_empty() {
        return "1".into();
    }
    word_names(w, alphabet).join(" * ")
}

/// All words of length `len` over `n` letters in lexicographic order.
pub fn all_words(n: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * n);
        for w in &out {
            for g in 0..n {
                let mut v = w.clone();
                v.push(g as Gen);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Coefficient rows of homogeneous elements against the lexicographic word
/// basis of the given length.
pub fn graded_component_matrix(elems: &[NCPoly], alphabet_len: usize, degree: usize) -> Result<Matrix<Scalar>, NcError> {
    let basis = all_words(alphabet_len, degree);
    let index: HashMap<&Word, usize> = basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut m = Matrix::zeros(elems.len(), basis.len());
    for (r, e) in elems.iter().enumerate() {
        for (w, c) in e.terms() {
            let col = index.get(w).ok_or(NcError::Inhomogeneous(degree))?;
            m.set(r, *col, c.clone());
        }
    }
    Ok(m)
}

/// Rank and kernel basis of a scalar matrix.
pub fn rank_kernel(m: &Matrix<Scalar>) -> (usize, Vec<Vec<Scalar>>) {
    m.rank_kernel()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp() -> RewriteSystem {
        RewriteSystem::quantum_plane()
    }

    #[test]
    fn quantum_plane_rule() {
        let r = qp();
        let x = r.normal_form(&NCPoly::word(&[1, 0]));
        assert_eq!(x, NCPoly::monomial(vec![0, 1], Scalar::q()));
    }

    #[test]
    fn double_application() {
        let r = qp();
        let x = r.normal_form(&NCPoly::word(&[1, 1, 0]));
        assert_eq!(x, NCPoly::monomial(vec![0, 1, 1], Scalar::q_pow(2)));
    }

    #[test]
    fn generator_is_normal() {
        let r = qp();
        assert_eq!(r.normal_form(&NCPoly::generator(0)), NCPoly::generator(0));
    }

    #[test]
    fn ore_is_confluent() {
        let r = RewriteSystem::ore_extension(3);
        assert!(r.check_local_confluence().passed());
        assert!(!r.check_local_confluence().pairs.is_empty());
        r.check_star_compatible().unwrap();
    }

    #[test]
    fn identical_lhs_fails_with_witness() {
        let a = Alphabet::free(&["a", "b"]);
        let rules = vec![Rule::new(vec![0, 1], NCPoly::generator(0)), Rule::new(vec![0, 1], NCPoly::generator(1))];
        let rs = RewriteSystem::unchecked(a.clone(), rules.clone()).unwrap();
        let rep = rs.check_local_confluence();
        assert!(!rep.passed());
        assert_eq!(rep.witness().unwrap().word, vec![0, 1]);
        assert!(matches!(RewriteSystem::new(a, rules), Err(NcError::NotConfluent { .. })));
    }

    #[test]
    fn increasing_rule_rejected() {
        let a = Alphabet::free(&["a", "b"]);
        let rules = vec![Rule::new(vec![0, 1], NCPoly::word(&[1, 0]))];
        assert!(matches!(RewriteSystem::unchecked(a, rules), Err(NcError::NotDecreasing { .. })));
    }

    #[test]
    fn star_examples() {
        let r = qp();
        assert_eq!(r.star(&NCPoly::generator(0)), NCPoly::generator(1));
        let zzs = NCPoly::word(&[0, 1]);
        assert_eq!(r.star(&zzs), zzs);
        // q^(1/2) w = z*, so its star is z
        let w = NCPoly::monomial(vec![1], Scalar::s_pow(-1));
        assert_eq!(r.star(&w.scale(&Scalar::s())), NCPoly::generator(0));
    }

    #[test]
    fn component_matrix_row() {
        // basis (zz, zw, wz, ww)
        let e = NCPoly::from_terms([(vec![0, 1], Scalar::one()), (vec![1, 0], -Scalar::q_pow(-1))]);
        let m = graded_component_matrix(&[e], 2, 2).unwrap();
        assert_eq!(m.row(0), &[Scalar::zero(), Scalar::one(), -Scalar::q_pow(-1), Scalar::zero()]);
        assert_eq!(graded_component_matrix(&[], 2, 2).unwrap().rows(), 0);
        assert!(graded_component_matrix(&[NCPoly::generator(0)], 2, 2).is_err());
    }

    #[test]
    fn text_is_parseable() {
        let r = RewriteSystem::ore_extension(3);
        let x = NCPoly::monomial(vec![0, 0, 2], Scalar::s_pow(3));
        assert_eq!(r.text(&x), "q^(3/2) * delta^2 * z");
    }
}
