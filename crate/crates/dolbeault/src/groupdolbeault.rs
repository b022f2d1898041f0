//! Dolbeault complexes on finite groups with a Cayley-graph calculus: the
//! degree-2 relations of the L, LL and Woronowicz exterior algebras, the
//! bigraded splitting, the factorisation relations and the inner
//! differentials `partial = [theta10, .}`, `dbar = [theta01, .}`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::group::{FiniteGroup, GroupFunction, Q};
use crate::linalg::{Echelon, Matrix, SparseVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Flavor {
    L,
    LL,
    Wor,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::L => "L",
            Flavor::LL => "LL",
            Flavor::Wor => "Wor",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupCalculusError {
    #[error("invalid generator split: {0}")]
    Split(String),
    #[error("Woronowicz calculus needs each half to be a union of conjugacy classes")]
    NotBicovariant,
    #[error("factorisation condition fails: {0}")]
    Factorisation(String),
}

/// `C = C10 ⊔ C01` with `C10 = C01^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSplit {
    pub c10: Vec<usize>,
    pub c01: Vec<usize>,
}

impl GeneratorSplit {
    pub fn new(g: &FiniteGroup, c10: Vec<usize>, c01: Vec<usize>) -> Result<Self, GroupCalculusError> {
        let e = g.identity();
        let all: Vec<usize> = c10.iter().chain(&c01).copied().collect();
        if all.contains(&e) {
            return Err(GroupCalculusError::Split("identity is not a generator".into()));
        }
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != all.len() {
            return Err(GroupCalculusError::Split("halves overlap or repeat".into()));
        }
        let mut inv01: Vec<usize> = c01.iter().map(|&a| g.inv(a)).collect();
        let mut s10 = c10.clone();
        inv01.sort();
        s10.sort();
        if inv01 != s10 {
            return Err(GroupCalculusError::Split("inversion does not map C01 onto C10".into()));
        }
        Ok(GeneratorSplit { c10, c01 })
    }

    /// `C10` listed as the inverses of `C01` in order.
    pub fn from_c01(g: &FiniteGroup, c01: Vec<usize>) -> Result<Self, GroupCalculusError> {
        let c10 = c01.iter().map(|&a| g.inv(a)).collect();
        GeneratorSplit::new(g, c10, c01)
    }

    /// `C01 = {t, x, y, z}` on A4.
    pub fn a4(g: &FiniteGroup) -> Self {
        let c01 = ["t", "x", "y", "z"].iter().map(|n| g.index_of(n).expect("A4 element")).collect();
        GeneratorSplit::from_c01(g, c01).expect("A4 split")
    }

    /// `C10 = {+1}`, `C01 = {-1}` on `Z/N`.
    pub fn cyclic(g: &FiniteGroup) -> Self {
        let n = g.order();
        GeneratorSplit::new(g, vec![1], vec![n - 1]).expect("Z/N split")
    }
}

/// Degree-`k` quotient of `V^{(x)k}` by the ideal of the degree-2
/// relations. Surviving words are the lexicographically smallest ones.
#[derive(Debug, Clone)]
struct Quotient {
    survivors: Vec<usize>,
    /// normal form of every word as `(survivor word, coefficient)`
    nf: Vec<Vec<(usize, Q)>>,
}

impl Quotient {
    fn build(m: usize, k: usize, rels: &[SparseVec<Q>]) -> Self {
        let total = m.pow(k as u32);
        let flip = |i: usize| total - 1 - i;
        let mut ech: Echelon<Q> = Echelon::new();
        if k >= 2 {
            for i in 0..=k - 2 {
                let pre = m.pow(i as u32);
                let post = m.pow((k - 2 - i) as u32);
                for r in rels {
                    for p in 0..pre {
                        for s in 0..post {
                            let v: SparseVec<Q> = r.iter().map(|(&w, c)| (flip((p * m * m + w) * post + s), c.clone())).collect();
                            ech.insert(&v);
                        }
                    }
                }
            }
        }
        let survivors: Vec<usize> = (0..total).filter(|&w| !ech.is_pivot(flip(w))).collect();
        let nf = (0..total)
            .map(|w| {
                let mut v = SparseVec::new();
                v.insert(flip(w), Q::one());
                let mut r: Vec<(usize, Q)> = ech.reduce(&v).into_iter().map(|(i, c)| (flip(i), c)).collect();
                r.sort_by_key(|t| t.0);
                r
            })
            .collect();
        Quotient { survivors, nf }
    }
}

/// Form on the group with left function coefficients, reduced to the
/// surviving basis words of its degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupForm {
    pub degree: usize,
    pub terms: BTreeMap<usize, GroupFunction>,
}

impl GroupForm {
    pub fn zero(degree: usize) -> Self {
        GroupForm { degree, terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|f| f.is_zero())
    }

    fn add_term(&mut self, w: usize, f: &GroupFunction) {
        match self.terms.get_mut(&w) {
            Some(e) => *e = e.add(f),
            None => {
                self.terms.insert(w, f.clone());
            }
        }
        if self.terms[&w].is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, o: &GroupForm) -> GroupForm {
        assert_eq!(self.degree, o.degree, "degree mismatch");
        let mut r = self.clone();
        for (w, f) in &o.terms {
            r.add_term(*w, f);
        }
        r
    }

    pub fn sub(&self, o: &GroupForm) -> GroupForm {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> GroupForm {
        GroupForm { degree: self.degree, terms: self.terms.iter().map(|(w, f)| (*w, f.neg())).collect() }
    }

    pub fn coeff(&self, w: usize, n: usize) -> GroupFunction {
        self.terms.get(&w).cloned().unwrap_or_else(|| GroupFunction::zero(n))
    }
}

/// A Dolbeault complex on a finite group.
#[derive(Debug, Clone)]
pub struct GroupCalculus {
    group: FiniteGroup,
    split: GeneratorSplit,
    flavor: Flavor,
    factorised: bool,
    /// `C10` then `C01`, as group elements
    gens: Vec<usize>,
    relations: Vec<SparseVec<Q>>,
    base_dim2: usize,
    quotients: Vec<Quotient>,
}

/// Outcome of the degree-2 factorisation step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorisationReport {
    pub dim_before: usize,
    pub dim_after: usize,
    /// `dim(H ∩ V^{1001})`, `dim(H ∩ V^{0110})` for the added space `H`
    pub meets_1001: usize,
    pub meets_0110: usize,
    pub c_invertible: bool,
    /// every `V^{0110}` class equals a `V^{1001}` class
    pub onto: bool,
    pub already_implied: bool,
}

impl GroupCalculus {
    /// Degree-2 relations for the flavor, projected to the bigraded pieces.
    pub fn build(group: FiniteGroup, split: GeneratorSplit, flavor: Flavor) -> Result<Self, GroupCalculusError> {
        let gens: Vec<usize> = split.c10.iter().chain(&split.c01).copied().collect();
        if flavor == Flavor::Wor && !(group.is_union_of_classes(&split.c10) && group.is_union_of_classes(&split.c01)) {
            return Err(GroupCalculusError::NotBicovariant);
        }
        let mut calc = GroupCalculus {
            group,
            split,
            flavor,
            factorised: false,
            gens,
            relations: Vec::new(),
            base_dim2: 0,
            quotients: Vec::new(),
        };
        let raw = calc.flavor_relations();
        calc.relations = raw.iter().flat_map(|r| calc.project(r)).collect();
        calc.rebuild();
        calc.base_dim2 = calc.dim(2);
        Ok(calc)
    }

    /// Build from an explicit relation list, without flavor relations.
    pub fn with_relations(group: FiniteGroup, split: GeneratorSplit, relations: Vec<SparseVec<Q>>) -> Self {
        let gens: Vec<usize> = split.c10.iter().chain(&split.c01).copied().collect();
        let mut calc = GroupCalculus { group, split, flavor: Flavor::L, factorised: false, gens, relations, base_dim2: 0, quotients: Vec::new() };
        calc.rebuild();
        calc.base_dim2 = calc.dim(2);
        calc
    }

    fn rebuild(&mut self) {
        let m = self.m();
        // reduce the degree-2 relations to a basis first
        let q2 = Quotient::build(m, 2, &self.relations);
        let mut ech: Echelon<Q> = Echelon::new();
        let mut basis = Vec::new();
        for r in &self.relations {
            if ech.insert(r) {
                basis.push(r.clone());
            }
        }
        self.relations = basis;
        self.quotients = vec![Quotient::build(m, 0, &[]), Quotient::build(m, 1, &[]), q2, Quotient::build(m, 3, &self.relations)];
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn split(&self) -> &GeneratorSplit {
        &self.split
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn is_factorised(&self) -> bool {
        self.factorised
    }

    /// Number of basic 1-forms.
    pub fn m(&self) -> usize {
        self.gens.len()
    }

    /// Group elements labelling the basic 1-forms, `C10` first.
    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn position(&self, a: usize) -> Option<usize> {
        self.gens.iter().position(|&g| g == a)
    }

    pub fn is_holomorphic(&self, pos: usize) -> bool {
        pos < self.split.c10.len()
    }

    pub fn relations(&self) -> &[SparseVec<Q>] {
        &self.relations
    }

    pub fn base_dim2(&self) -> usize {
        self.base_dim2
    }

    /// `dim Lambda^k` for `k <= 3`.
    pub fn dim(&self, k: usize) -> usize {
        self.quotients[k].survivors.len()
    }

    /// `dim Lambda^{p,q}` for `p + q <= 3`.
    pub fn bidim(&self, p: usize, q: usize) -> usize {
        let k = p + q;
        self.quotients[k].survivors.iter().filter(|&&w| self.word_bidegree(k, w) == (p, q)).count()
    }

    pub fn word(&self, k: usize, w: usize) -> Vec<usize> {
        let m = self.m();
        let mut out = vec![0; k];
        let mut r = w;
        for i in (0..k).rev() {
            out[i] = r % m;
            r /= m;
        }
        out
    }

    pub fn word_index(&self, letters: &[usize]) -> usize {
        letters.iter().fold(0, |acc, &l| acc * self.m() + l)
    }

    fn word_bidegree(&self, k: usize, w: usize) -> (usize, usize) {
        let letters = self.word(k, w);
        let p = letters.iter().filter(|&&l| self.is_holomorphic(l)).count();
        (p, k - p)
    }

    pub fn word_text(&self, k: usize, w: usize) -> String {
        if k == 0 {
            return "1".into();
        }
        self.word(k, w).iter().map(|&l| format!("e^{}", self.group.name(self.gens[l]))).collect::<Vec<_>>().join(" ^ ")
    }

    /// Product of the group elements along a word.
    fn word_element(&self, letters: &[usize]) -> usize {
        letters.iter().fold(self.group.identity(), |acc, &l| self.group.mul(acc, self.gens[l]))
    }

    fn flavor_relations(&self) -> Vec<SparseVec<Q>> {
        let m = self.m();
        let g = &self.group;
        match self.flavor {
            Flavor::L | Flavor::LL => {
                let mut out = Vec::new();
                for target in 0..g.order() {
                    if target == g.identity() && self.flavor == Flavor::L {
                        continue;
                    }
                    let mut v = SparseVec::new();
                    for i in 0..m {
                        for j in 0..m {
                            if g.mul(self.gens[i], self.gens[j]) == target {
                                v.insert(i * m + j, Q::one());
                            }
                        }
                    }
                    if !v.is_empty() {
                        out.push(v);
                    }
                }
                out
            }
            Flavor::Wor => {
                let psi = self.braiding();
                let id_minus = Matrix::identity(m * m).sub(&psi);
                let (_, ker) = id_minus.rank_kernel();
                ker.iter().map(|v| crate::linalg::sparse(v)).collect()
            }
        }
    }

    /// `Psi(e^a (x) e^b) = e^{a b a^-1} (x) e^a` on `V (x) V`.
    pub fn braiding(&self) -> Matrix<Q> {
        let m = self.m();
        let mut psi = Matrix::zeros(m * m, m * m);
        for i in 0..m {
            for j in 0..m {
                let c = self.group.conj(self.gens[i], self.gens[j]);
                if let Some(k) = self.position(c) {
                    psi.set(k * m + i, i * m + j, Q::one());
                }
            }
        }
        psi
    }

    fn part_of(&self, idx: usize) -> usize {
        let m = self.m();
        (!self.is_holomorphic(idx / m)) as usize + (!self.is_holomorphic(idx % m)) as usize
    }

    /// Split a degree-2 vector into its `(2,0)`, `(1,1)`, `(0,2)` parts.
    fn project(&self, r: &SparseVec<Q>) -> Vec<SparseVec<Q>> {
        (0..3)
            .map(|part| r.iter().filter(|(i, _)| self.part_of(**i) == part).map(|(i, c)| (*i, c.clone())).collect::<SparseVec<Q>>())
            .filter(|v| !v.is_empty())
            .collect()
    }

    /// True when every relation of the flavor lies in one bigraded piece
    /// before projection.
    pub fn relations_homogeneous(&self) -> bool {
        self.flavor_relations().iter().all(|r| self.project(r).len() <= 1)
    }

    /// The added degree-2 relations `e^a e^{b^-1} + e^{a b^-1 a^-1} e^a`.
    pub fn factorisation_relations(&self) -> Result<Vec<SparseVec<Q>>, GroupCalculusError> {
        let m = self.m();
        let g = &self.group;
        let mut out = Vec::new();
        for &a in &self.split.c01 {
            for &b in &self.split.c01 {
                let c = g.inv(b);
                let i = self.position(a).unwrap();
                let j = self.position(c).unwrap();
                let k = self.position(g.conj(a, c)).filter(|&k| self.is_holomorphic(k)).ok_or_else(|| {
                    GroupCalculusError::Factorisation(format!("{} {} {}^-1 is not in C10", g.name(a), g.name(c), g.name(a)))
                })?;
                let mut v = SparseVec::new();
                v.insert(i * m + j, Q::one());
                let e = v.entry(k * m + i).or_insert_with(Q::zero);
                *e += Q::one();
                out.push(v);
            }
        }
        Ok(out)
    }

    /// Impose the factorisation relations and check both conditions.
    pub fn factorise(&self) -> Result<(GroupCalculus, FactorisationReport), GroupCalculusError> {
        let m = self.m();
        let h = self.factorisation_relations()?;
        let in_1001 = |i: usize| self.is_holomorphic(i / m) && !self.is_holomorphic(i % m);
        let in_0110 = |i: usize| !self.is_holomorphic(i / m) && self.is_holomorphic(i % m);
        let unit = |i: usize| -> SparseVec<Q> { std::iter::once((i, Q::one())).collect() };
        let rank_of = |vs: &[SparseVec<Q>]| {
            let mut e: Echelon<Q> = Echelon::new();
            vs.iter().filter(|v| e.insert(v)).count()
        };
        let rh = rank_of(&h);
        let intersect = |pred: &dyn Fn(usize) -> bool| {
            let sub: Vec<SparseVec<Q>> = (0..m * m).filter(|&i| pred(i)).map(unit).collect();
            let both: Vec<SparseVec<Q>> = h.iter().cloned().chain(sub.iter().cloned()).collect();
            rh + sub.len() - rank_of(&both)
        };
        let meets_1001 = intersect(&in_1001);
        let meets_0110 = intersect(&in_0110);

        // the component c: V^{0110} -> V^{1001} of Psi
        let idx0110: Vec<usize> = (0..m * m).filter(|&i| in_0110(i)).collect();
        let idx1001: Vec<usize> = (0..m * m).filter(|&i| in_1001(i)).collect();
        let psi = self.braiding();
        let mut c = Matrix::zeros(idx1001.len(), idx0110.len());
        for (col, &src) in idx0110.iter().enumerate() {
            for (row, &dst) in idx1001.iter().enumerate() {
                c.set(row, col, psi.get(dst, src).clone());
            }
        }
        let c_invertible = c.rows() == c.cols() && c.rank() == c.rows();

        let mut base: Echelon<Q> = Echelon::new();
        for r in &self.relations {
            base.insert(r);
        }
        let already_implied = h.iter().all(|v| base.contains(v));

        let mut next = self.clone();
        next.relations.extend(h);
        next.factorised = true;
        next.rebuild();

        let mut span: Echelon<Q> = Echelon::new();
        for r in next.relations.iter().cloned().chain(idx1001.iter().map(|&i| unit(i))) {
            span.insert(&r);
        }
        let onto = idx0110.iter().all(|&i| span.contains(&unit(i)));
        let report = FactorisationReport {
            dim_before: self.dim(2),
            dim_after: next.dim(2),
            meets_1001,
            meets_0110,
            c_invertible,
            onto,
            already_implied,
        };
        if meets_1001 != 0 || meets_0110 != 0 {
            return Err(GroupCalculusError::Factorisation("added relations meet V^{1001} or V^{0110}".into()));
        }
        if !c_invertible {
            return Err(GroupCalculusError::Factorisation("component c of Psi is not invertible".into()));
        }
        Ok((next, report))
    }

    /// Dimension of the degree-2 span of `Lambda^{1,0} Lambda^{0,1}` and of
    /// `Lambda^{0,1} Lambda^{1,0}` inside `Lambda^{1,1}`, and `dim Lambda^{1,1}`.
    pub fn mixed_images(&self) -> (usize, usize, usize) {
        let m = self.m();
        let q = &self.quotients[2];
        let image_rank = |first_holo: bool| {
            let mut e: Echelon<Q> = Echelon::new();
            for i in 0..m {
                for j in 0..m {
                    if self.is_holomorphic(i) == first_holo && self.is_holomorphic(j) != first_holo {
                        let v: SparseVec<Q> = q.nf[i * m + j].iter().cloned().collect();
                        e.insert(&v);
                    }
                }
            }
            e.rank()
        };
        (image_rank(true), image_rank(false), self.bidim(1, 1))
    }

    // -- forms ----------------------------------------------------------

    pub fn n(&self) -> usize {
        self.group.order()
    }

    pub fn function(&self, f: GroupFunction) -> GroupForm {
        let mut x = GroupForm::zero(0);
        x.add_term(0, &f);
        x
    }

    /// `e^{gens[pos]}`.
    pub fn basic(&self, pos: usize) -> GroupForm {
        let mut x = GroupForm::zero(1);
        x.add_term(pos, &GroupFunction::one(self.n()));
        x
    }

    /// `f e^{gens[pos]}`.
    pub fn one_form(&self, f: GroupFunction, pos: usize) -> GroupForm {
        let mut x = GroupForm::zero(1);
        x.add_term(pos, &f);
        x
    }

    /// Reduce an unreduced word-indexed combination.
    fn reduce(&self, k: usize, raw: BTreeMap<usize, GroupFunction>) -> GroupForm {
        let mut out = GroupForm::zero(k);
        let q = &self.quotients[k];
        for (w, f) in raw {
            for (s, c) in &q.nf[w] {
                out.add_term(*s, &f.scale(c));
            }
        }
        out
    }

    /// Coefficient of each surviving word; words are reduced on entry.
    pub fn form_from_words(&self, k: usize, terms: &[(Vec<usize>, GroupFunction)]) -> GroupForm {
        let mut raw: BTreeMap<usize, GroupFunction> = BTreeMap::new();
        for (letters, f) in terms {
            assert_eq!(letters.len(), k);
            let w = self.word_index(letters);
            let e = raw.entry(w).or_insert_with(|| GroupFunction::zero(self.n()));
            *e = e.add(f);
        }
        self.reduce(k, raw)
    }

    /// Wedge product; `omega f = R_{prod omega}(f) omega`.
    pub fn mul(&self, x: &GroupForm, y: &GroupForm) -> GroupForm {
        let k = x.degree + y.degree;
        assert!(k <= 3, "forms above degree 3 are not tracked");
        let m = self.m();
        let mut raw: BTreeMap<usize, GroupFunction> = BTreeMap::new();
        for (w1, f1) in &x.terms {
            let l1 = self.word(x.degree, *w1);
            let shift = self.word_element(&l1);
            for (w2, f2) in &y.terms {
                let coeff = f1.mul(&f2.shift(&self.group, shift));
                let w = w1 * m.pow(y.degree as u32) + w2;
                let e = raw.entry(w).or_insert_with(|| GroupFunction::zero(self.n()));
                *e = e.add(&coeff);
            }
        }
        self.reduce(k, raw)
    }

    /// `sum e^a` over `C10` (`Some(true)`), `C01` (`Some(false)`) or all.
    pub fn theta(&self, part: Option<bool>) -> GroupForm {
        let mut x = GroupForm::zero(1);
        for pos in 0..self.m() {
            if part.map_or(true, |h| self.is_holomorphic(pos) == h) {
                x.add_term(pos, &GroupFunction::one(self.n()));
            }
        }
        x
    }

    /// `[t, x} = t x - (-1)^{|x|} x t`.
    fn graded_commutator(&self, t: &GroupForm, x: &GroupForm) -> GroupForm {
        let a = self.mul(t, x);
        let b = self.mul(x, t);
        if x.degree % 2 == 0 {
            a.sub(&b)
        } else {
            a.add(&b)
        }
    }

    pub fn partial(&self, x: &GroupForm) -> GroupForm {
        self.graded_commutator(&self.theta(Some(true)), x)
    }

    pub fn dbar(&self, x: &GroupForm) -> GroupForm {
        self.graded_commutator(&self.theta(Some(false)), x)
    }

    pub fn d(&self, x: &GroupForm) -> GroupForm {
        self.graded_commutator(&self.theta(None), x)
    }

    /// `(e^a)* = -e^{a^-1}`, graded-antimultiplicative, real coefficients.
    pub fn star(&self, x: &GroupForm) -> GroupForm {
        let k = x.degree;
        let sign_k = if (k * k.saturating_sub(1) / 2 + k) % 2 == 0 { Q::one() } else { -Q::one() };
        let mut raw: BTreeMap<usize, GroupFunction> = BTreeMap::new();
        for (w, f) in &x.terms {
            let starred: Vec<usize> =
                self.word(k, *w).iter().rev().map(|&l| self.position(self.group.inv(self.gens[l])).expect("C closed under inverse")).collect();
            let coeff = f.shift(&self.group, self.word_element(&starred)).scale(&sign_k);
            let e = raw.entry(self.word_index(&starred)).or_insert_with(|| GroupFunction::zero(self.n()));
            *e = e.add(&coeff);
        }
        self.reduce(k, raw)
    }

    /// Bidegree `(p, q)` part.
    pub fn component(&self, x: &GroupForm, p: usize) -> GroupForm {
        GroupForm { degree: x.degree, terms: x.terms.iter().filter(|(w, _)| self.word_bidegree(x.degree, **w).0 == p).map(|(w, f)| (*w, f.clone())).collect() }
    }

    pub fn form_text(&self, x: &GroupForm) -> String {
        if x.is_zero() {
            return "0".into();
        }
        x.terms.iter().map(|(w, f)| format!("{} {}", f.text(), self.word_text(x.degree, *w))).collect::<Vec<_>>().join(" + ")
    }

    /// Run the double-complex identities on all delta functions and all
    /// basic 1-forms; returns the first failure as a witness.
    pub fn double_complex_check(&self) -> Result<(), String> {
        let n = self.n();
        let mut probes: Vec<(String, GroupForm)> =
            (0..n).map(|g| (format!("delta_{}", self.group.name(g)), self.function(GroupFunction::delta(n, g)))).collect();
        probes.extend((0..self.m()).map(|p| (format!("e^{}", self.group.name(self.gens[p])), self.basic(p))));
        for (name, x) in &probes {
            let px = self.partial(x);
            let bx = self.dbar(x);
            let checks = [
                ("partial^2", self.partial(&px)),
                ("dbar^2", self.dbar(&bx)),
                ("partial dbar + dbar partial", self.partial(&bx).add(&self.dbar(&px))),
            ];
            for (what, v) in checks {
                if !v.is_zero() {
                    return Err(format!("{what} on {name} = {}", self.form_text(&v)));
                }
            }
        }
        for p in 0..self.m() {
            let s = self.star(&self.basic(p));
            let expect_holo = !self.is_holomorphic(p);
            if s.terms.keys().any(|&w| self.is_holomorphic(w) != expect_holo) {
                return Err(format!("star does not exchange bidegree on e^{}", self.group.name(self.gens[p])));
            }
        }
        Ok(())
    }

    /// Whether the star of every degree-2 relation lies in the relation
    /// span, i.e. whether the star descends to the degree-2 quotient.
    pub fn star_descends(&self) -> bool {
        let m = self.m();
        let mut span: Echelon<Q> = Echelon::new();
        for r in &self.relations {
            span.insert(r);
        }
        self.relations.iter().all(|r| {
            let mut v = SparseVec::new();
            for (&w, c) in r {
                let (i, j) = (w / m, w % m);
                let si = self.position(self.group.inv(self.gens[i])).expect("closed under inverse");
                let sj = self.position(self.group.inv(self.gens[j])).expect("closed under inverse");
                let e = v.entry(sj * m + si).or_insert_with(Q::zero);
                *e += c;
            }
            span.contains(&v)
        })
    }

    /// `braiding()` read as a map of basis pairs: it must be a permutation
    /// and satisfy the braid relation on `V (x) V (x) V`.
    pub fn braid_relation_check(&self) -> Result<(), String> {
        let m = self.m();
        let psi = self.braiding();
        let mut image = vec![usize::MAX; m * m];
        for (col, slot) in image.iter_mut().enumerate() {
            let rows: Vec<usize> = (0..m * m).filter(|&r| !psi.get(r, col).is_zero()).collect();
            match rows.as_slice() {
                [r] if psi.get(*r, col).is_one() => *slot = *r,
                _ => return Err(format!("column {} of Psi is not a basis vector", self.pair_text(col))),
            }
        }
        let mut seen = vec![false; m * m];
        for &r in &image {
            if std::mem::replace(&mut seen[r], true) {
                return Err(format!("Psi is not invertible: {} is hit twice", self.pair_text(r)));
            }
        }
        let p12 = |(a, b, c): (usize, usize, usize)| {
            let r = image[a * m + b];
            (r / m, r % m, c)
        };
        let p23 = |(a, b, c): (usize, usize, usize)| {
            let r = image[b * m + c];
            (a, r / m, r % m)
        };
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let x = (a, b, c);
                    let lhs = p12(p23(p12(x)));
                    let rhs = p23(p12(p23(x)));
                    if lhs != rhs {
                        let name = |i: usize| self.group.name(self.gens[i]).to_string();
                        return Err(format!("braid relation fails on e^{} (x) e^{} (x) e^{}", name(a), name(b), name(c)));
                    }
                }
            }
        }
        Ok(())
    }

    fn pair_text(&self, idx: usize) -> String {
        let m = self.m();
        format!("e^{} (x) e^{}", self.group.name(self.gens[idx / m]), self.group.name(self.gens[idx % m]))
    }

    /// `e^a f = R_a(f) e^a` and `d(f e^a) = df e^a + f de^a` for one `f`.
    pub fn bimodule_check(&self, f: &GroupFunction) -> Result<(), String> {
        let fx = self.function(f.clone());
        for p in 0..self.m() {
            let a = self.gens[p];
            let lhs = self.mul(&self.basic(p), &fx);
            if lhs != self.one_form(f.shift(&self.group, a), p) {
                return Err(format!("e^{} f != R(f) e^{}: {}", self.group.name(a), self.group.name(a), self.form_text(&lhs)));
            }
            let fe = self.mul(&fx, &self.basic(p));
            let leib = self.mul(&self.d(&fx), &self.basic(p)).add(&self.mul(&fx, &self.d(&self.basic(p))));
            if self.d(&fe) != leib {
                return Err(format!("Leibniz fails on f e^{}", self.group.name(a)));
            }
        }
        Ok(())
    }

    /// `d * = * d` and `* partial = dbar *` on delta functions and basic
    /// 1-forms.
    pub fn star_commutation_check(&self) -> Result<(), String> {
        let n = self.n();
        let mut probes: Vec<(String, GroupForm)> =
            (0..n).map(|g| (format!("delta_{}", self.group.name(g)), self.function(GroupFunction::delta(n, g)))).collect();
        probes.extend((0..self.m()).map(|p| (format!("e^{}", self.group.name(self.gens[p])), self.basic(p))));
        for (name, x) in &probes {
            if self.d(&self.star(x)) != self.star(&self.d(x)) {
                return Err(format!("d * != * d on {name}"));
            }
            if self.star(&self.partial(x)) != self.dbar(&self.star(x)) {
                return Err(format!("* partial != dbar * on {name}"));
            }
        }
        Ok(())
    }
}
