//! The factorisable Dolbeault calculus on the quantum plane: bigraded
//! forms with left coefficients, the two differentials, wedge, star, the
//! factorisation map on `(0,1) (x) (1,0)` and bilinear pairings built from
//! a table on basis 1-forms.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::braided::BraidedSpace;
use crate::expr::{format_term, parse_free, Atom, ParseError};
use crate::linalg::Matrix;
use crate::ncalg::{Alphabet, Gen, NCPoly, NcError, RewriteSystem, Rule, Word};
use crate::scalar::Scalar;

/// Basis 1-form symbol: `dz`, `dz*`, `dbz`, `dbz*`.
pub type Sym = u8;
/// Set of symbols, i.e. a canonical form word.
pub type Mask = u8;

pub const DZ: Sym = 0;
pub const DZS: Sym = 1;
pub const DBZ: Sym = 2;
pub const DBZS: Sym = 3;

pub const Z: Gen = 0;
pub const ZS: Gen = 1;

pub fn sym_name(f: Sym) -> &'static str {
    ["dz", "dz*", "dbz", "dbz*"][f as usize]
}

/// `(dz)* = dbz*`, `(dz*)* = dbz`.
pub fn sym_star(f: Sym) -> Sym {
    3 - f
}

pub fn is_holomorphic(f: Sym) -> bool {
    f < 2
}

/// The generator a basis 1-form is the differential of.
pub fn sym_gen(f: Sym) -> Gen {
    f & 1
}

pub fn dsym(g: Gen, holomorphic: bool) -> Sym {
    if holomorphic {
        g
    } else {
        2 + g
    }
}

pub fn mask_of(f: Sym) -> Mask {
    1 << f
}

pub fn mask_syms(m: Mask) -> Vec<Sym> {
    (0..4).filter(|f| m & (1 << f) != 0).collect()
}

pub fn bidegree(m: Mask) -> (usize, usize) {
    ((m & 0b0011).count_ones() as usize, (m & 0b1100).count_ones() as usize)
}

pub fn mask_degree(m: Mask) -> usize {
    m.count_ones() as usize
}

fn word_mask(w: &[Gen]) -> Mask {
    debug_assert!(w.windows(2).all(|p| p[0] < p[1]));
    w.iter().fold(0, |m, &f| m | (1 << f))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("relation block for {0} is singular")]
    Singular(&'static str),
    #[error("{what} fails at {witness}")]
    Inconsistent { what: String, witness: String },
    #[error(transparent)]
    Rewrite(#[from] NcError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Unsupported(String),
}

/// Element of `Omega` as `sum a_m omega_m` with coefficients on the left.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Form {
    terms: BTreeMap<Mask, NCPoly>,
}

impl Form {
    pub fn zero() -> Self {
        Form::default()
    }

    pub fn function(a: NCPoly) -> Self {
        Form::term(a, 0)
    }

    pub fn basis(m: Mask) -> Self {
        Form::term(NCPoly::one(), m)
    }

    pub fn sym(f: Sym) -> Self {
        Form::basis(mask_of(f))
    }

    pub fn term(a: NCPoly, m: Mask) -> Self {
        let mut x = Form::zero();
        x.add_term(m, &a);
        x
    }

    pub fn terms(&self) -> &BTreeMap<Mask, NCPoly> {
        &self.terms
    }

    pub fn coeff(&self, m: Mask) -> NCPoly {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mask, a: &NCPoly) {
        if a.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_default();
        *e = e.add(a);
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut r = self.clone();
        for (m, a) in &o.terms {
            r.add_term(*m, a);
        }
        r
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Form {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        let mut r = Form::zero();
        for (m, a) in &self.terms {
            r.add_term(*m, &a.scale(c));
        }
        r
    }

    /// Projection to bidegree `(p, q)`.
    pub fn component(&self, p: usize, q: usize) -> Form {
        Form { terms: self.terms.iter().filter(|(m, _)| bidegree(**m) == (p, q)).map(|(m, a)| (*m, a.clone())).collect() }
    }

    /// Bidegree when homogeneous and nonzero.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys().map(|m| bidegree(*m));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// Total degree when homogeneous and nonzero.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| mask_degree(*m));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }
}

/// Element of `Omega^1 (x)_A ... (x)_A Omega^1` with coefficients on the
/// left of basis symbol sequences.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tensor {
    terms: BTreeMap<Vec<Sym>, NCPoly>,
}

impl Tensor {
    pub fn zero() -> Self {
        Tensor::default()
    }

    pub fn term(a: NCPoly, seq: Vec<Sym>) -> Self {
        let mut t = Tensor::zero();
        t.add_term(seq, &a);
        t
    }

    pub fn basis(seq: &[Sym]) -> Self {
        Tensor::term(NCPoly::one(), seq.to_vec())
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Sym>, NCPoly> {
        &self.terms
    }

    pub fn coeff(&self, seq: &[Sym]) -> NCPoly {
        self.terms.get(seq).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, seq: Vec<Sym>, a: &NCPoly) {
        if a.is_zero() {
            return;
        }
        let e = self.terms.entry(seq.clone()).or_default();
        *e = e.add(a);
        if e.is_zero() {
            self.terms.remove(&seq);
        }
    }

    pub fn add(&self, o: &Tensor) -> Tensor {
        let mut r = self.clone();
        for (s, a) in &o.terms {
            r.add_term(s.clone(), a);
        }
        r
    }

    pub fn sub(&self, o: &Tensor) -> Tensor {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Tensor {
        let mut r = Tensor::zero();
        for (s, a) in &self.terms {
            r.add_term(s.clone(), &a.scale(c));
        }
        r
    }

    /// Keep terms whose first symbol satisfies `keep`.
    pub fn filter_first(&self, keep: impl Fn(Sym) -> bool) -> Tensor {
        Tensor { terms: self.terms.iter().filter(|(s, _)| keep(s[0])).map(|(s, a)| (s.clone(), a.clone())).collect() }
    }
}

/// Element `sum omega_m b_m` with coefficients on the right.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RightForm {
    pub terms: BTreeMap<Mask, NCPoly>,
}

/// One stated exchange relation `gen * sym = sum c sym' gen'`.
#[derive(Debug, Clone)]
pub struct ExchangeRelation {
    pub gen: Gen,
    pub sym: Sym,
    pub rhs: Vec<(Scalar, Sym, Gen)>,
}

fn q(k: i64) -> Scalar {
    Scalar::q_pow(k)
}

/// The degree-one relations of the calculus, one per generator and basis
/// symbol.
pub fn stated_relations() -> Vec<ExchangeRelation> {
    let one = Scalar::one();
    let r = |gen, sym, rhs| ExchangeRelation { gen, sym, rhs };
    vec![
        r(Z, DZ, vec![(q(2), DZ, Z)]),
        r(ZS, DZS, vec![(q(2), DZS, ZS)]),
        r(Z, DZS, vec![(q(1), DZS, Z)]),
        r(ZS, DZ, vec![(q(1), DZ, ZS), (&q(2) - &one, DZS, Z)]),
        r(Z, DBZS, vec![(q(-1), DBZS, Z), (&q(-2) - &one, DBZ, ZS)]),
        r(ZS, DBZS, vec![(q(-2), DBZS, ZS)]),
        r(Z, DBZ, vec![(q(-2), DBZ, Z)]),
        r(ZS, DBZ, vec![(q(-1), DBZ, ZS)]),
    ]
}

/// The listed relation `(dbz*) z = q z dbz* + (q^2 - 1) z* dbz`, which is
/// implied by the others.
pub fn redundant_relation() -> (Sym, Gen, Vec<(Scalar, Gen, Sym)>) {
    (DBZS, Z, vec![(q(1), Z, DBZS), (&q(2) - &Scalar::one(), ZS, DBZ)])
}

/// Wedge relations oriented into canonical order.
pub fn stated_wedge_rules() -> Vec<Rule> {
    let one = Scalar::one();
    let t = |pairs: Vec<(Scalar, Sym, Sym)>| NCPoly::from_terms(pairs.into_iter().map(|(c, a, b)| (vec![a, b], c)));
    let mut rules: Vec<Rule> = (0..4).map(|f| Rule::new(vec![f, f], NCPoly::zero())).collect();
    rules.push(Rule::new(vec![DZS, DZ], t(vec![(-q(-1), DZ, DZS)])));
    rules.push(Rule::new(vec![DBZS, DBZ], t(vec![(-q(-1), DBZ, DBZS)])));
    rules.push(Rule::new(vec![DBZ, DZ], t(vec![(-q(2), DZ, DBZ)])));
    rules.push(Rule::new(vec![DBZS, DZS], t(vec![(-q(2), DZS, DBZS)])));
    rules.push(Rule::new(vec![DBZ, DZS], t(vec![(-q(1), DZS, DBZ)])));
    rules.push(Rule::new(vec![DBZS, DZ], t(vec![(-q(1), DZ, DBZS), (&one - &q(2), DZS, DBZ)])));
    rules
}

/// Factorisation map on basis pairs `(0,1) (x) (1,0) -> (1,0) (x) (0,1)`.
pub fn stated_theta() -> BTreeMap<(Sym, Sym), Vec<(Scalar, Sym, Sym)>> {
    let mut m = BTreeMap::new();
    m.insert((DBZ, DZ), vec![(q(2), DZ, DBZ)]);
    m.insert((DBZS, DZS), vec![(q(2), DZS, DBZS)]);
    m.insert((DBZ, DZS), vec![(q(1), DZS, DBZ)]);
    m.insert((DBZS, DZ), vec![(q(1), DZ, DBZS), (&q(2) - &Scalar::one(), DZS, DBZ)]);
    m
}

/// The q-epsilon pairing on `(z, z*)`: `eta(z, z*) = q^(3/2)`,
/// `eta(z*, z) = -q^(1/2)`, zero on the diagonal. Obtained from
/// `eta(z w) = q`, `eta(w z) = -1` with `z* = q^(1/2) w`.
pub fn eta_q_epsilon() -> [[Scalar; 2]; 2] {
    let zw = [[Scalar::zero(), Scalar::q()], [Scalar::from_int(-1), Scalar::zero()]];
    let lambda = [Scalar::one(), Scalar::s()];
    let mut out: [[Scalar; 2]; 2] = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = &(&lambda[i] * &lambda[j]) * &zw[i][j];
        }
    }
    out
}

type PushTable = Vec<Vec<Vec<(Scalar, Gen, Sym)>>>;

/// Rewriting context for the calculus, immutable once built.
#[derive(Debug, Clone)]
pub struct Calculus {
    alg: RewriteSystem,
    forms: RewriteSystem,
    /// `[gen][sym]`: `gen sym = sum c sym' gen'`
    forward: Vec<Vec<Vec<(Scalar, Sym, Gen)>>>,
    /// `[sym][gen]`: `sym gen = sum c gen' sym'`
    push: PushTable,
    /// `[mask][gen]`: `omega_m gen = sum c gen' omega_m'`
    push_mask: Vec<Vec<Vec<(Scalar, Gen, Mask)>>>,
    /// `[gen][mask]`: `gen omega_m = sum c omega_m' gen'`
    pull_mask: Vec<Vec<Vec<(Scalar, Mask, Gen)>>>,
    /// `[m1][m2]`: `omega_m1 ^ omega_m2 = sum c omega_m`
    wedge: Vec<Vec<Vec<(Scalar, Mask)>>>,
    theta: BTreeMap<(Sym, Sym), Vec<(Scalar, Sym, Sym)>>,
    theta_inv: BTreeMap<(Sym, Sym), Vec<(Scalar, Sym, Sym)>>,
}

impl Calculus {
    /// Installs the relation tables, derives the inverse exchange rules and
    /// checks the wedge system for confluence.
    pub fn build() -> Result<Self, CalculusError> {
        let alg = RewriteSystem::quantum_plane();
        let forms = RewriteSystem::new(Alphabet::free(&["dz", "dz*", "dbz", "dbz*"]), stated_wedge_rules())?;

        let mut forward = vec![vec![Vec::new(); 4]; 2];
        for r in stated_relations() {
            forward[r.gen as usize][r.sym as usize] = r.rhs.clone();
        }

        // invert each 4x4 family block: inputs (gen, sym), outputs (sym', gen')
        let mut push: PushTable = vec![vec![Vec::new(); 2]; 4];
        for (holo, name) in [(true, "holomorphic forms"), (false, "antiholomorphic forms")] {
            let syms = [dsym(Z, holo), dsym(ZS, holo)];
            let input = |g: Gen, f: Sym| (g as usize) * 2 + sym_gen(f) as usize;
            let output = |f: Sym, g: Gen| (sym_gen(f) as usize) * 2 + g as usize;
            let mut m = Matrix::zeros(4, 4);
            for g in [Z, ZS] {
                for &f in &syms {
                    for (c, f2, g2) in &forward[g as usize][f as usize] {
                        if is_holomorphic(*f2) != holo {
                            return Err(CalculusError::Inconsistent { what: "family preservation".into(), witness: sym_name(f).into() });
                        }
                        let (r, col) = (output(*f2, *g2), input(g, f));
                        let v = m.get(r, col) + c;
                        m.set(r, col, v);
                    }
                }
            }
            let inv = m.inverse().ok_or(CalculusError::Singular(name))?;
            for &f2 in &syms {
                for g2 in [Z, ZS] {
                    let col = output(f2, g2);
                    let mut terms = Vec::new();
                    for g in [Z, ZS] {
                        for &f in &syms {
                            let c = inv.get(input(g, f), col);
                            if !c.is_zero() {
                                terms.push((c.clone(), g, f));
                            }
                        }
                    }
                    push[f2 as usize][g2 as usize] = terms;
                }
            }
        }

        let mut wedge = vec![vec![Vec::new(); 16]; 16];
        for m1 in 0..16u8 {
            for m2 in 0..16u8 {
                let mut w = mask_syms(m1);
                w.extend(mask_syms(m2));
                let nf = forms.normal_form(&NCPoly::word(&w));
                wedge[m1 as usize][m2 as usize] = nf.terms().iter().map(|(w, c)| (c.clone(), word_mask(w))).collect();
            }
        }

        let mut calc = Calculus {
            alg,
            forms,
            forward,
            push,
            push_mask: Vec::new(),
            pull_mask: Vec::new(),
            wedge,
            theta: stated_theta(),
            theta_inv: BTreeMap::new(),
        };

        calc.push_mask = (0..16u8).map(|m| (0..2u8).map(|g| calc.push_mask_entry(m, g)).collect()).collect();
        calc.pull_mask = (0..2u8).map(|g| (0..16u8).map(|m| calc.pull_mask_entry(g, m)).collect()).collect();
        calc.theta_inv = calc.invert_theta()?;
        Ok(calc)
    }

    pub fn algebra(&self) -> &RewriteSystem {
        &self.alg
    }

    pub fn form_rewriting(&self) -> &RewriteSystem {
        &self.forms
    }

    pub fn forward_rule(&self, g: Gen, f: Sym) -> &[(Scalar, Sym, Gen)] {
        &self.forward[g as usize][f as usize]
    }

    /// Derived rule `sym gen = sum c gen' sym'`.
    pub fn push_rule(&self, f: Sym, g: Gen) -> &[(Scalar, Gen, Sym)] {
        &self.push[f as usize][g as usize]
    }

    pub fn theta_table(&self) -> &BTreeMap<(Sym, Sym), Vec<(Scalar, Sym, Sym)>> {
        &self.theta
    }

    pub fn theta_inv_table(&self) -> &BTreeMap<(Sym, Sym), Vec<(Scalar, Sym, Sym)>> {
        &self.theta_inv
    }

    /// Wedge-reduce a symbol word with a scalar.
    fn reduce_syms(&self, c: &Scalar, syms: &[Sym]) -> Vec<(Scalar, Mask)> {
        self.forms.normal_form(&NCPoly::monomial(syms.to_vec(), c.clone())).terms().iter().map(|(w, x)| (x.clone(), word_mask(w))).collect()
    }

    /// `seq * g = sum c g' seq'` without wedge reduction.
    fn push_seq_gen(&self, seq: &[Sym], g: Gen) -> Vec<(Scalar, Gen, Vec<Sym>)> {
        let mut states = vec![(Scalar::one(), g, Vec::new())];
        for &f in seq.iter().rev() {
            let mut next = Vec::new();
            for (c, y, tail) in states {
                for (k, x, f2) in &self.push[f as usize][y as usize] {
                    let mut t = vec![*f2];
                    t.extend_from_slice(&tail);
                    next.push((&c * k, *x, t));
                }
            }
            states = next;
        }
        states
    }

    /// `g * seq = sum c seq' g'` without wedge reduction.
    fn pull_seq_gen(&self, g: Gen, seq: &[Sym]) -> Vec<(Scalar, Vec<Sym>, Gen)> {
        let mut states = vec![(Scalar::one(), Vec::new(), g)];
        for &f in seq {
            let mut next = Vec::new();
            for (c, head, y) in states {
                for (k, f2, x) in &self.forward[y as usize][f as usize] {
                    let mut h = head.clone();
                    h.push(*f2);
                    next.push((&c * k, h, *x));
                }
            }
            states = next;
        }
        states
    }

    fn push_mask_entry(&self, m: Mask, g: Gen) -> Vec<(Scalar, Gen, Mask)> {
        let mut acc: BTreeMap<(Gen, Mask), Scalar> = BTreeMap::new();
        for (c, x, seq) in self.push_seq_gen(&mask_syms(m), g) {
            for (k, m2) in self.reduce_syms(&c, &seq) {
                let e = acc.entry((x, m2)).or_default();
                *e = &*e + &k;
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((x, m2), c)| (c, x, m2)).collect()
    }

    fn pull_mask_entry(&self, g: Gen, m: Mask) -> Vec<(Scalar, Mask, Gen)> {
        let mut acc: BTreeMap<(Mask, Gen), Scalar> = BTreeMap::new();
        for (c, seq, x) in self.pull_seq_gen(g, &mask_syms(m)) {
            for (k, m2) in self.reduce_syms(&c, &seq) {
                let e = acc.entry((m2, x)).or_default();
                *e = &*e + &k;
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((m2, x), c)| (c, m2, x)).collect()
    }

    fn invert_theta(&self) -> Result<BTreeMap<(Sym, Sym), Vec<(Scalar, Sym, Sym)>>, CalculusError> {
        let dom: Vec<(Sym, Sym)> = [DBZ, DBZS].iter().flat_map(|&a| [DZ, DZS].map(|b| (a, b))).collect();
        let cod: Vec<(Sym, Sym)> = [DZ, DZS].iter().flat_map(|&a| [DBZ, DBZS].map(|b| (a, b))).collect();
        let mut m = Matrix::zeros(4, 4);
        for (j, p) in dom.iter().enumerate() {
            for (c, a, b) in self.theta.get(p).into_iter().flatten() {
                let i = cod.iter().position(|x| *x == (*a, *b)).expect("codomain pair");
                m.set(i, j, c.clone());
            }
        }
        let inv = m.inverse().ok_or(CalculusError::Singular("factorisation map"))?;
        let mut out = BTreeMap::new();
        for (j, p) in cod.iter().enumerate() {
            let terms = dom.iter().enumerate().filter(|(i, _)| !inv.get(*i, j).is_zero()).map(|(i, (a, b))| (inv.get(i, j).clone(), *a, *b)).collect();
            out.insert(*p, terms);
        }
        Ok(out)
    }

    // -- algebra-level helpers ------------------------------------------

    pub fn nf(&self, a: &NCPoly) -> NCPoly {
        self.alg.normal_form(a)
    }

    pub fn amul(&self, a: &NCPoly, b: &NCPoly) -> NCPoly {
        self.alg.mul(a, b)
    }

    pub fn astar(&self, a: &NCPoly) -> NCPoly {
        self.alg.star(a)
    }

    fn normalise(&self, x: Form) -> Form {
        let mut out = Form::zero();
        for (m, a) in x.terms {
            out.add_term(m, &self.nf(&a));
        }
        out
    }

    fn normalise_tensor(&self, t: Tensor) -> Tensor {
        let mut out = Tensor::zero();
        for (s, a) in t.terms {
            out.add_term(s, &self.nf(&a));
        }
        out
    }

    /// `omega_m * b` with left coefficients.
    pub fn push_poly(&self, m: Mask, b: &NCPoly) -> Form {
        let mut out = Form::zero();
        for (w, c) in b.terms() {
            let mut states: BTreeMap<Mask, NCPoly> = BTreeMap::new();
            states.insert(m, NCPoly::constant(c.clone()));
            for &y in w {
                let mut next: BTreeMap<Mask, NCPoly> = BTreeMap::new();
                for (m1, acc) in &states {
                    for (k, x, m2) in &self.push_mask[*m1 as usize][y as usize] {
                        let e = next.entry(*m2).or_default();
                        *e = e.add(&self.amul(acc, &NCPoly::monomial(vec![*x], k.clone())));
                    }
                }
                states = next;
            }
            for (m2, a) in states {
                out.add_term(m2, &a);
            }
        }
        self.normalise(out)
    }

    /// `seq * b` in the tensor product over the algebra, left coefficients.
    pub fn push_poly_seq(&self, seq: &[Sym], b: &NCPoly) -> Tensor {
        let mut out = Tensor::zero();
        for (w, c) in b.terms() {
            let mut states: BTreeMap<Vec<Sym>, NCPoly> = BTreeMap::new();
            states.insert(seq.to_vec(), NCPoly::constant(c.clone()));
            for &y in w {
                let mut next: BTreeMap<Vec<Sym>, NCPoly> = BTreeMap::new();
                for (s, acc) in &states {
                    for (k, x, s2) in self.push_seq_gen(s, y) {
                        let e = next.entry(s2).or_default();
                        *e = e.add(&self.amul(acc, &NCPoly::monomial(vec![x], k)));
                    }
                }
                states = next;
            }
            for (s, a) in states {
                out.add_term(s, &a);
            }
        }
        self.normalise_tensor(out)
    }

    /// `a * omega_m` with right coefficients.
    pub fn pull_poly(&self, a: &NCPoly, m: Mask) -> RightForm {
        let mut out: BTreeMap<Mask, NCPoly> = BTreeMap::new();
        for (w, c) in a.terms() {
            let mut states: BTreeMap<Mask, NCPoly> = BTreeMap::new();
            states.insert(m, NCPoly::constant(c.clone()));
            for &x in w.iter().rev() {
                let mut next: BTreeMap<Mask, NCPoly> = BTreeMap::new();
                for (m1, acc) in &states {
                    for (k, m2, y) in &self.pull_mask[x as usize][*m1 as usize] {
                        let e = next.entry(*m2).or_default();
                        *e = e.add(&self.amul(&NCPoly::monomial(vec![*y], k.clone()), acc));
                    }
                }
                states = next;
            }
            for (m2, b) in states {
                let e = out.entry(m2).or_default();
                *e = e.add(&b);
            }
        }
        RightForm { terms: out.into_iter().map(|(m, b)| (m, self.nf(&b))).filter(|(_, b)| !b.is_zero()).collect() }
    }

    /// `a * seq` in the tensor product, right coefficients.
    pub fn pull_poly_seq(&self, a: &NCPoly, seq: &[Sym]) -> BTreeMap<Vec<Sym>, NCPoly> {
        let mut out: BTreeMap<Vec<Sym>, NCPoly> = BTreeMap::new();
        for (w, c) in a.terms() {
            let mut states: BTreeMap<Vec<Sym>, NCPoly> = BTreeMap::new();
            states.insert(seq.to_vec(), NCPoly::constant(c.clone()));
            for &x in w.iter().rev() {
                let mut next: BTreeMap<Vec<Sym>, NCPoly> = BTreeMap::new();
                for (s, acc) in &states {
                    for (k, s2, y) in self.pull_seq_gen(x, s) {
                        let e = next.entry(s2).or_default();
                        *e = e.add(&self.amul(&NCPoly::monomial(vec![y], k), acc));
                    }
                }
                states = next;
            }
            for (s, b) in states {
                let e = out.entry(s).or_default();
                *e = e.add(&b);
            }
        }
        out.into_iter().map(|(s, b)| (s, self.nf(&b))).filter(|(_, b)| !b.is_zero()).collect()
    }

    // -- forms ------------------------------------------------------------

    pub fn left_mul(&self, a: &NCPoly, x: &Form) -> Form {
        let mut out = Form::zero();
        for (m, c) in x.terms() {
            out.add_term(*m, &self.amul(a, c));
        }
        out
    }

    pub fn right_mul(&self, x: &Form, b: &NCPoly) -> Form {
        self.mul(x, &Form::function(b.clone()))
    }

    /// Wedge product.
    pub fn mul(&self, x: &Form, y: &Form) -> Form {
        let mut out = Form::zero();
        for (m1, a) in x.terms() {
            for (m2, b) in y.terms() {
                let pushed = self.push_poly(*m1, b);
                for (m3, c) in pushed.terms() {
                    let ac = a.mul(c);
                    for (k, m4) in &self.wedge[*m3 as usize][*m2 as usize] {
                        out.add_term(*m4, &ac.scale(k));
                    }
                }
            }
        }
        self.normalise(out)
    }

    /// Wedge of basis form words.
    pub fn wedge_basis(&self, m1: Mask, m2: Mask) -> &[(Scalar, Mask)] {
        &self.wedge[m1 as usize][m2 as usize]
    }

    /// `d` on one algebra word, restricted to one family.
    fn deriv_word(&self, w: &Word, holo: bool) -> Form {
        let mut out = Form::zero();
        for k in 0..w.len() {
            let prefix = NCPoly::word(&w[..k]);
            let tail = self.push_poly(mask_of(dsym(w[k], holo)), &NCPoly::word(&w[k + 1..]));
            out = out.add(&self.left_mul(&prefix, &tail));
        }
        out
    }

    fn deriv(&self, x: &Form, holo: bool) -> Form {
        let mut out = Form::zero();
        for (m, a) in x.terms() {
            for (w, c) in a.terms() {
                let da = self.deriv_word(w, holo).scale(c);
                out = out.add(&self.mul(&da, &Form::basis(*m)));
            }
        }
        out
    }

    /// Holomorphic differential, bidegree `(1,0)`.
    pub fn partial(&self, x: &Form) -> Form {
        self.deriv(x, true)
    }

    /// Antiholomorphic differential, bidegree `(0,1)`.
    pub fn dbar(&self, x: &Form) -> Form {
        self.deriv(x, false)
    }

    pub fn d(&self, x: &Form) -> Form {
        self.partial(x).add(&self.dbar(x))
    }

    /// `(a omega)* = omega* a*`, with
    /// `(f1 ^ ... ^ fk)* = (-1)^(k(k-1)/2) fk* ^ ... ^ f1*`.
    pub fn star(&self, x: &Form) -> Form {
        let mut out = Form::zero();
        for (m, a) in x.terms() {
            let syms = mask_syms(*m);
            let k = syms.len();
            let sign = if (k * k.saturating_sub(1) / 2) % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
            let starred: Vec<Sym> = syms.iter().rev().map(|f| sym_star(*f)).collect();
            let astar = self.astar(a);
            for (c, m2) in self.reduce_syms(&sign, &starred) {
                out = out.add(&self.push_poly(m2, &astar).scale(&c));
            }
        }
        out
    }

    pub fn to_right(&self, x: &Form) -> RightForm {
        let mut out: BTreeMap<Mask, NCPoly> = BTreeMap::new();
        for (m, a) in x.terms() {
            for (m2, b) in self.pull_poly(a, *m).terms {
                let e = out.entry(m2).or_default();
                *e = e.add(&b);
            }
        }
        RightForm { terms: out.into_iter().filter(|(_, b)| !b.is_zero()).collect() }
    }

    pub fn from_right(&self, x: &RightForm) -> Form {
        let mut out = Form::zero();
        for (m, b) in &x.terms {
            out = out.add(&self.push_poly(*m, b));
        }
        out
    }

    // -- tensors ------------------------------------------------------------

    /// `x (x)_A y` for 1-forms.
    pub fn tensor(&self, x: &Form, y: &Form) -> Tensor {
        let mut out = Tensor::zero();
        for (m1, a) in x.terms() {
            for (m2, b) in y.terms() {
                assert!(mask_degree(*m1) == 1 && mask_degree(*m2) == 1, "tensor of 1-forms");
                let f = mask_syms(*m1)[0];
                let g = mask_syms(*m2)[0];
                for (s, c) in self.push_poly_seq(&[f], b).terms() {
                    let mut seq = s.clone();
                    seq.push(g);
                    out.add_term(seq, &self.amul(a, c));
                }
            }
        }
        out
    }

    pub fn tensor_left_mul(&self, a: &NCPoly, t: &Tensor) -> Tensor {
        let mut out = Tensor::zero();
        for (s, c) in t.terms() {
            out.add_term(s.clone(), &self.amul(a, c));
        }
        out
    }

    pub fn tensor_right_mul(&self, t: &Tensor, b: &NCPoly) -> Tensor {
        let mut out = Tensor::zero();
        for (s, a) in t.terms() {
            for (s2, c) in self.push_poly_seq(s, b).terms() {
                out.add_term(s2.clone(), &self.amul(a, c));
            }
        }
        out
    }

    /// Right-coefficient form of a tensor.
    pub fn tensor_to_right(&self, t: &Tensor) -> BTreeMap<Vec<Sym>, NCPoly> {
        let mut out: BTreeMap<Vec<Sym>, NCPoly> = BTreeMap::new();
        for (s, a) in t.terms() {
            for (s2, b) in self.pull_poly_seq(a, s) {
                let e = out.entry(s2).or_default();
                *e = e.add(&b);
            }
        }
        out.into_iter().filter(|(_, b)| !b.is_zero()).collect()
    }

    /// `dagger(x (x) y) = y* (x) x*` on a 2-tensor.
    pub fn dagger(&self, t: &Tensor) -> Tensor {
        let mut out = Tensor::zero();
        for (s, a) in t.terms() {
            assert_eq!(s.len(), 2);
            let seq = [sym_star(s[1]), sym_star(s[0])];
            out = out.add(&self.push_poly_seq(&seq, &self.astar(a)));
        }
        out
    }

    /// Wedge of a 2-tensor.
    pub fn wedge_tensor(&self, t: &Tensor) -> Form {
        let mut out = Form::zero();
        for (s, a) in t.terms() {
            let mut x = Form::function(a.clone());
            for f in s {
                x = self.mul(&x, &Form::sym(*f));
            }
            out = out.add(&x);
        }
        out
    }

    /// `x (x) f` for a 1-form `x` and basis symbol `f`.
    pub fn tensor_with_basis(&self, x: &Form, f: Sym) -> Tensor {
        self.tensor(x, &Form::sym(f))
    }

    // -- parsing and printing ----------------------------------------------

    /// Parse an expression over `z, z*, w, dz, dz*, dbz, dbz*`.
    pub fn parse(&self, text: &str) -> Result<Form, CalculusError> {
        let e = parse_free(text)?;
        let mut out = Form::zero();
        for (atoms, c) in &e.terms {
            let mut x = Form::function(NCPoly::constant(c.clone()));
            for a in atoms {
                let f = match a {
                    Atom::Z => Form::function(NCPoly::generator(Z)),
                    Atom::ZStar => Form::function(NCPoly::generator(ZS)),
                    Atom::Dz => Form::sym(DZ),
                    Atom::DzStar => Form::sym(DZS),
                    Atom::Dbz => Form::sym(DBZ),
                    Atom::DbzStar => Form::sym(DBZS),
                    other => return Err(NcError::UnknownSymbol(other.name().into()).into()),
                };
                x = self.mul(&x, &f);
            }
            out = out.add(&x);
        }
        Ok(out)
    }

    /// Canonical left-normal text.
    pub fn text(&self, x: &Form) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (m, a) in x.terms() {
            for (w, c) in a.sorted_terms().into_iter().rev() {
                let mut names: Vec<String> = w.iter().map(|g| self.alg.alphabet().name(*g).to_string()).collect();
                names.extend(mask_syms(*m).into_iter().map(|f| sym_name(f).to_string()));
                parts.push(format_term(c, names.iter().map(String::as_str)));
            }
        }
        join_signed(&parts)
    }

    pub fn tensor_text(&self, t: &Tensor) -> String {
        if t.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (s, a) in t.terms() {
            let pair = s.iter().map(|f| sym_name(*f)).collect::<Vec<_>>().join(" (x) ");
            parts.push(format!("({}) {}", self.alg.text(a), pair));
        }
        parts.join(" + ")
    }

    /// Monomials `z^a z*^b` with `a + b = n`.
    pub fn monomials(n: usize) -> Vec<NCPoly> {
        (0..=n).map(|a| NCPoly::word(&[vec![Z; n - a], vec![ZS; a]].concat())).collect()
    }

    /// Rank of `partial` on the degree-`n` monomials; equal to `n + 1`
    /// exactly when no nonconstant holomorphic-closed polynomial exists
    /// in that degree.
    pub fn holomorphic_kernel_dim(&self, n: usize) -> usize {
        let monos = Calculus::monomials(n);
        let images: Vec<Form> = monos.iter().map(|m| self.partial(&Form::function(m.clone()))).collect();
        let mut keys: Vec<(Mask, Word)> = Vec::new();
        for x in &images {
            for (m, a) in x.terms() {
                for w in a.terms().keys() {
                    if !keys.contains(&(*m, w.clone())) {
                        keys.push((*m, w.clone()));
                    }
                }
            }
        }
        let mut mat = Matrix::zeros(keys.len(), monos.len());
        for (j, x) in images.iter().enumerate() {
            for (m, a) in x.terms() {
                for (w, c) in a.terms() {
                    let i = keys.iter().position(|k| k.0 == *m && &k.1 == w).unwrap();
                    mat.set(i, j, c.clone());
                }
            }
        }
        monos.len() - mat.rank()
    }

    /// The factorisation map table written through the braiding:
    /// `Theta(dbz v (x) dz u) = (d (x) dbar) Psi(v (x) u)` with `Psi` moved
    /// to the basis `(z, z*)`.
    pub fn theta_from_braiding(space: &BraidedSpace) -> BTreeMap<(Sym, Sym), Vec<(Scalar, Sym, Sym)>> {
        let psi = psi_in_star_basis(space);
        let mut out = BTreeMap::new();
        for v in [Z, ZS] {
            for u in [Z, ZS] {
                let col = (v as usize) * 2 + u as usize;
                let mut terms = Vec::new();
                for row in 0..4 {
                    let c = psi.get(row, col);
                    if !c.is_zero() {
                        let (a, b) = ((row / 2) as Gen, (row % 2) as Gen);
                        terms.push((c.clone(), dsym(a, true), dsym(b, false)));
                    }
                }
                out.insert((dsym(v, false), dsym(u, true)), terms);
            }
        }
        out
    }
}

/// `Psi` on `(z, w)` rewritten on `(z, z*)` with `z* = q^(1/2) w`.
pub fn psi_in_star_basis(space: &BraidedSpace) -> Matrix<Scalar> {
    let lambda = [Scalar::one(), Scalar::s()];
    let scale = |idx: usize| &lambda[idx / 2] * &lambda[idx % 2];
    let psi = space.psi();
    let mut out = Matrix::zeros(4, 4);
    for r in 0..4 {
        for c in 0..4 {
            let v = psi.get(r, c);
            if !v.is_zero() {
                out.set(r, c, &(v * &scale(c)) * &scale(r).inv().expect("nonzero"));
            }
        }
    }
    out
}

fn join_signed(parts: &[String]) -> String {
    let mut out = String::new();
    for t in parts {
        if out.is_empty() {
            out.push_str(t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(t);
        }
    }
    out
}

/// Algebra-valued table on pairs of basis 1-forms, extended as a bimodule
/// map: `phi(a f (x) g b) = a phi(f, g) b`, evaluated in a target rewriting
/// system containing the quantum plane at generator offset `offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTable {
    pub values: BTreeMap<(Sym, Sym), NCPoly>,
    pub offset: Gen,
}

impl PairTable {
    pub fn new(offset: Gen) -> Self {
        PairTable { values: BTreeMap::new(), offset }
    }

    pub fn get(&self, f: Sym, g: Sym) -> NCPoly {
        self.values.get(&(f, g)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, f: Sym, g: Sym, v: NCPoly) {
        if v.is_zero() {
            self.values.remove(&(f, g));
        } else {
            self.values.insert((f, g), v);
        }
    }

    /// Move a quantum-plane element into the target alphabet.
    pub fn embed(&self, a: &NCPoly) -> NCPoly {
        NCPoly::from_terms(a.terms().iter().map(|(w, c)| (w.iter().map(|g| g + self.offset).collect(), c.clone())))
    }

    /// Evaluate on `x (x) y` over the ground field: `x` is taken with left
    /// coefficients and `y` with right coefficients.
    pub fn eval(&self, calc: &Calculus, target: &RewriteSystem, x: &Form, y: &Form) -> NCPoly {
        let yr = calc.to_right(y);
        let mut out = NCPoly::zero();
        for (m1, a) in x.terms() {
            for (m2, b) in &yr.terms {
                if mask_degree(*m1) != 1 || mask_degree(*m2) != 1 {
                    continue;
                }
                let v = self.get(mask_syms(*m1)[0], mask_syms(*m2)[0]);
                if v.is_zero() {
                    continue;
                }
                out = out.add(&self.embed(a).mul(&v).mul(&self.embed(b)));
            }
        }
        target.normal_form(&out)
    }
}

/// `phi_-(dbz u (x) dz v) = eta(u, v)`, zero elsewhere.
pub fn phi_minus_table(eta: &[[NCPoly; 2]; 2]) -> PairTable {
    let mut t = PairTable::new(0);
    for u in [Z, ZS] {
        for v in [Z, ZS] {
            t.set(dsym(u, false), dsym(v, true), eta[u as usize][v as usize].clone());
        }
    }
    t
}

/// `phi_+ = phi_- o Theta^-1` on `(1,0) (x) (0,1)` basis pairs.
pub fn phi_plus_table(calc: &Calculus, minus: &PairTable) -> PairTable {
    let mut t = PairTable::new(minus.offset);
    for (pair, terms) in calc.theta_inv_table() {
        let mut v = NCPoly::zero();
        for (c, a, b) in terms {
            v.add_scaled(&minus.get(*a, *b), c);
        }
        t.set(pair.0, pair.1, v);
    }
    t
}

/// Scalar pairing as algebra-valued table entries.
pub fn eta_constant(eta: &[[Scalar; 2]; 2]) -> [[NCPoly; 2]; 2] {
    let c = |i: usize, j: usize| NCPoly::constant(eta[i][j].clone());
    [[c(0, 0), c(0, 1)], [c(1, 0), c(1, 1)]]
}

/// The quotient-map pairing `eta(u, v) = u v`.
pub fn eta_product() -> [[NCPoly; 2]; 2] {
    let w = |i: Gen, j: Gen| NCPoly::word(&[i, j]);
    [[w(Z, Z), w(Z, ZS)], [w(ZS, Z), w(ZS, ZS)]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn calc() -> Calculus {
        Calculus::build().unwrap()
    }

    fn p(c: &Calculus, s: &str) -> Form {
        c.parse(s).unwrap()
    }

    #[test]
    fn derived_inverse_rules() {
        let c = calc();
        // (dz) z = q^-2 z dz
        assert_eq!(c.push_rule(DZ, Z), &[(q(-2), Z, DZ)]);
        // (dz) z* = q^-1 z* dz - q^-2 (q^2 - 1) z dz*
        assert_eq!(p(&c, "dz * z*"), p(&c, "q^-1 * z* * dz - q^-2 * (q^2 - 1) * z * dz*"));
    }

    #[test]
    fn redundant_relation_is_implied() {
        let c = calc();
        let (f, g, rhs) = redundant_relation();
        let mut expect: Vec<_> = rhs.clone();
        expect.sort_by_key(|t| (t.1, t.2));
        let mut got = c.push_rule(f, g).to_vec();
        got.sort_by_key(|t| (t.1, t.2));
        assert_eq!(got, expect);
    }

    #[test]
    fn wedge_examples() {
        let c = calc();
        assert_eq!(p(&c, "dz* * dz"), p(&c, "-q^-1 * dz * dz*"));
        assert_eq!(p(&c, "dbz * dz"), p(&c, "-q^2 * dz * dbz"));
        assert!(p(&c, "dz * dz").is_zero());
    }

    #[test]
    fn differentials_of_squares() {
        let c = calc();
        let zz = p(&c, "z * z");
        assert_eq!(c.dbar(&zz), p(&c, "(1 + q^2) * z * dbz"));
        assert_eq!(c.partial(&zz), p(&c, "(1 + q^-2) * z * dz"));
        assert!(c.partial(&p(&c, "dbz")).is_zero());
        assert!(c.dbar(&p(&c, "dz")).is_zero());
        assert!(c.partial(&p(&c, "1")).is_zero());
    }

    #[test]
    fn dbar_respects_the_algebra_relation() {
        let c = calc();
        let lhs = c.dbar(&Form::function(NCPoly::word(&[ZS, Z])));
        let rhs = c.dbar(&Form::function(NCPoly::monomial(vec![Z, ZS], Scalar::q())));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, p(&c, "q * z * dbz* + q^2 * z* * dbz"));
    }

    #[test]
    fn star_of_forms() {
        let c = calc();
        assert_eq!(c.star(&p(&c, "dz")), p(&c, "dbz*"));
        let x = p(&c, "z * dz");
        assert_eq!(c.star(&x), p(&c, "dbz* * z*"));
        assert_eq!(c.star(&c.star(&x)), x);
    }

    #[test]
    fn theta_matches_braiding_and_inverse() {
        let c = calc();
        let from_psi = Calculus::theta_from_braiding(&BraidedSpace::qplane());
        for (k, v) in c.theta_table() {
            let mut a = v.clone();
            let mut b = from_psi[k].clone();
            a.sort_by_key(|t| (t.1, t.2));
            b.sort_by_key(|t| (t.1, t.2));
            assert_eq!(a, b);
        }
        let inv = &c.theta_inv_table()[&(DZ, DBZS)];
        let mut inv = inv.clone();
        inv.sort_by_key(|t| (t.1, t.2));
        assert_eq!(inv, vec![(-(&q(-2) * &(&q(2) - &Scalar::one())), DBZ, DZS), (q(-1), DBZS, DZ)]);
    }

    #[test]
    fn pairing_values() {
        let c = calc();
        let eta = eta_q_epsilon();
        let minus = phi_minus_table(&eta_constant(&eta));
        let plus = phi_plus_table(&c, &minus);
        let alg = c.algebra();
        let k = |x: Scalar| NCPoly::constant(x);
        assert_eq!(minus.eval(&c, alg, &p(&c, "dbz"), &p(&c, "dz*")), k(Scalar::s_pow(3)));
        assert_eq!(minus.eval(&c, alg, &p(&c, "dbz"), &p(&c, "dz")), NCPoly::zero());
        assert_eq!(plus.eval(&c, alg, &p(&c, "dz"), &p(&c, "dbz*")), k(-Scalar::s_pow(3)));
        assert_eq!(plus.eval(&c, alg, &p(&c, "dz*"), &p(&c, "dbz")), k(Scalar::s()));
        assert_eq!(plus.eval(&c, alg, &p(&c, "dz"), &p(&c, "dbz")), NCPoly::zero());
    }

    #[test]
    fn text_round_trip() {
        let c = calc();
        let x = p(&c, "z* * dbz + q^(1/2) * z * dz * dbz*");
        assert_eq!(c.parse(&c.text(&x)).unwrap(), x);
    }

    #[test]
    fn holomorphic_closed_polynomials_are_constant() {
        let c = calc();
        for n in 1..=3 {
            assert_eq!(c.holomorphic_kernel_dim(n), 0);
        }
    }
}
