//! Hermitian metrics, Chern connections, generalised braidings, torsion
//! and the preservation identities, over the quantum-plane calculus or a
//! finite-group calculus.
//!
//! Everything is written against [`Geometry`]: a free left module of
//! 1-forms with basis `e^0..e^{n-1}`, each basis element either of type
//! `(1,0)` or `(0,1)`. One-forms and 2-tensors carry left coefficients.
//! A connection on a subset of the basis is `nabla e^i = -Gamma^i_k (x) e^k`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::group::{GroupFunction, Q};
use crate::groupdolbeault::{GroupCalculus, GroupForm};
use crate::linalg::Matrix;
use crate::ncalg::NCPoly;
use crate::qdolbeault::{is_holomorphic, mask_of, mask_syms, sym_name, sym_star, Calculus, Form, PairTable, Sym, Z, ZS};
use crate::scalar::Scalar;

pub type OneForm<E> = BTreeMap<usize, E>;
pub type Tensor2<E> = BTreeMap<(usize, usize), E>;

/// `Gamma` matrix with rows and columns indexed by `basis`.
pub type Christoffel<E> = Vec<Vec<OneForm<E>>>;

/// A left connection on the span of `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection<E> {
    pub basis: Vec<usize>,
    pub gamma: Christoffel<E>,
}

impl<E: Clone> Connection<E> {
    pub fn zero(basis: Vec<usize>) -> Self {
        let n = basis.len();
        Connection { basis, gamma: vec![vec![BTreeMap::new(); n]; n] }
    }

    /// Block sum on the union of the two bases.
    pub fn direct_sum(a: &Connection<E>, b: &Connection<E>) -> Self {
        let mut basis = a.basis.clone();
        basis.extend(&b.basis);
        let (na, nb) = (a.basis.len(), b.basis.len());
        let mut gamma = vec![vec![BTreeMap::new(); na + nb]; na + nb];
        for i in 0..na {
            for k in 0..na {
                gamma[i][k] = a.gamma[i][k].clone();
            }
        }
        for i in 0..nb {
            for k in 0..nb {
                gamma[na + i][na + k] = b.gamma[i][k].clone();
            }
        }
        Connection { basis, gamma }
    }

    fn row(&self, i: usize) -> Option<usize> {
        self.basis.iter().position(|&b| b == i)
    }
}

/// Generalised braiding on basis pairs, extended left-linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct Sigma<E> {
    pub values: BTreeMap<(usize, usize), Tensor2<E>>,
}

/// Hermitian metric `g^{ij} = <e^i, e^j>` on the span of `basis`, with
/// inverse `g~` and projection `P` (identity for free modules).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricData<E> {
    pub basis: Vec<usize>,
    pub g: Vec<Vec<E>>,
    pub g_tilde: Option<Vec<Vec<E>>>,
    pub p: Vec<Vec<E>>,
    pub hermitian: bool,
}

/// Bilinear metric `(e^i, e^j)` on basis pairs, extended as
/// `(a x, y b) = a (x, y) b`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundMetric<E> {
    pub values: BTreeMap<(usize, usize), E>,
}

/// The algebra, its 1-forms and 2-forms, as needed by the connection
/// machinery. Provided methods implement the module operations.
pub trait Geometry {
    type Elem: Clone + PartialEq + fmt::Debug;
    type Form2: Clone + PartialEq + fmt::Debug;

    fn dim(&self) -> usize;
    fn basis_name(&self, i: usize) -> String;
    fn is_holomorphic(&self, i: usize) -> bool;
    /// `(e^i)* = c e^j`, `c` a real constant.
    fn star_basis(&self, i: usize) -> (usize, Self::Elem);

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn star(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn text(&self, a: &Self::Elem) -> String;

    /// `e^i b = sum c e^j` as `(j, c)`.
    fn push(&self, i: usize, b: &Self::Elem) -> Vec<(usize, Self::Elem)>;
    /// `a e^i = sum e^j c` as `(j, c)`.
    fn pull(&self, a: &Self::Elem, i: usize) -> Vec<(usize, Self::Elem)>;
    fn diff(&self, a: &Self::Elem) -> OneForm<Self::Elem>;

    fn form2_zero(&self) -> Self::Form2;
    fn form2_add(&self, x: &Self::Form2, y: &Self::Form2) -> Self::Form2;
    fn form2_left(&self, a: &Self::Elem, x: &Self::Form2) -> Self::Form2;
    fn form2_is_zero(&self, x: &Self::Form2) -> bool;
    fn form2_text(&self, x: &Self::Form2) -> String;
    /// Part of holomorphic degree `p`.
    fn form2_component(&self, x: &Self::Form2, p: usize) -> Self::Form2;
    fn wedge(&self, i: usize, j: usize) -> Self::Form2;
    fn d_basis(&self, i: usize) -> Self::Form2;

    /// Algebra generators for bimodule probes.
    fn generators(&self) -> Vec<Self::Elem>;
    /// Further elements on which the defining identity of `sigma` is
    /// re-verified after solving.
    fn test_elems(&self) -> Vec<Self::Elem>;

    /// Solve for `sigma(e^i (x) e^j)`, `i` in `basis`, from the probe
    /// `b -> nabla(e^i b) - nabla(e^i) b = sigma(e^i (x) db)`.
    fn solve_sigma(&self, basis: &[usize], probe: &dyn Fn(usize, &Self::Elem) -> Result<Tensor2<Self::Elem>, String>) -> Result<Sigma<Self::Elem>, String>;
    /// Inverse of a braiding defined on all basis pairs.
    fn invert_sigma(&self, s: &Sigma<Self::Elem>) -> Result<Sigma<Self::Elem>, String>;
    /// Write a `(1,1)`-form as `sum f e^p (x) e^k` with `e^p` antiholomorphic
    /// when `antiholomorphic_first`, else holomorphic.
    fn factor_11(&self, x: &Self::Form2, antiholomorphic_first: bool) -> Result<Tensor2<Self::Elem>, String>;
    /// Inverse of a metric matrix when the geometry can compute one.
    fn invert_matrix(&self, g: &[Vec<Self::Elem>]) -> Option<Vec<Vec<Self::Elem>>>;

    // -- provided ---------------------------------------------------------

    fn accumulate<K: Ord + Clone>(&self, map: &mut BTreeMap<K, Self::Elem>, k: K, c: &Self::Elem) {
        let v = match map.get(&k) {
            Some(e) => self.add(e, c),
            None => c.clone(),
        };
        if self.is_zero(&v) {
            map.remove(&k);
        } else {
            map.insert(k, v);
        }
    }

    fn basis1(&self, i: usize) -> OneForm<Self::Elem> {
        BTreeMap::from([(i, self.one())])
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn one_add(&self, x: &OneForm<Self::Elem>, y: &OneForm<Self::Elem>) -> OneForm<Self::Elem> {
        let mut out = x.clone();
        for (i, c) in y {
            self.accumulate(&mut out, *i, c);
        }
        out
    }

    fn one_neg(&self, x: &OneForm<Self::Elem>) -> OneForm<Self::Elem> {
        x.iter().map(|(i, c)| (*i, self.neg(c))).collect()
    }

    fn one_left(&self, a: &Self::Elem, x: &OneForm<Self::Elem>) -> OneForm<Self::Elem> {
        let mut out = BTreeMap::new();
        for (i, c) in x {
            self.accumulate(&mut out, *i, &self.mul(a, c));
        }
        out
    }

    fn one_right(&self, x: &OneForm<Self::Elem>, b: &Self::Elem) -> OneForm<Self::Elem> {
        let mut out = BTreeMap::new();
        for (i, a) in x {
            for (j, c) in self.push(*i, b) {
                self.accumulate(&mut out, j, &self.mul(a, &c));
            }
        }
        out
    }

    /// `(a e^i)* = (e^i)* a*`.
    fn one_star(&self, x: &OneForm<Self::Elem>) -> OneForm<Self::Elem> {
        let mut out = BTreeMap::new();
        for (i, a) in x {
            let (j, s) = self.star_basis(*i);
            for (k, c) in self.push(j, &self.star(a)) {
                self.accumulate(&mut out, k, &self.mul(&s, &c));
            }
        }
        out
    }

    /// Holomorphic (`true`) or antiholomorphic part.
    fn one_part(&self, x: &OneForm<Self::Elem>, holomorphic: bool) -> OneForm<Self::Elem> {
        x.iter().filter(|(i, _)| self.is_holomorphic(**i) == holomorphic).map(|(i, c)| (*i, c.clone())).collect()
    }

    fn one_wedge(&self, x: &OneForm<Self::Elem>, y: &OneForm<Self::Elem>) -> Self::Form2 {
        let mut out = self.form2_zero();
        for (p, a) in x {
            for (q, b) in y {
                for (p2, c) in self.push(*p, b) {
                    out = self.form2_add(&out, &self.form2_left(&self.mul(a, &c), &self.wedge(p2, *q)));
                }
            }
        }
        out
    }

    fn one_d(&self, x: &OneForm<Self::Elem>) -> Self::Form2 {
        let mut out = self.form2_zero();
        for (i, a) in x {
            for (p, c) in self.diff(a) {
                out = self.form2_add(&out, &self.form2_left(&c, &self.wedge(p, *i)));
            }
            out = self.form2_add(&out, &self.form2_left(a, &self.d_basis(*i)));
        }
        out
    }

    fn one_text(&self, x: &OneForm<Self::Elem>) -> String {
        if x.is_empty() {
            return "0".into();
        }
        x.iter().map(|(i, c)| format!("({}) {}", self.text(c), self.basis_name(*i))).collect::<Vec<_>>().join(" + ")
    }

    fn t_add(&self, x: &Tensor2<Self::Elem>, y: &Tensor2<Self::Elem>) -> Tensor2<Self::Elem> {
        let mut out = x.clone();
        for (k, c) in y {
            self.accumulate(&mut out, *k, c);
        }
        out
    }

    fn t_sub(&self, x: &Tensor2<Self::Elem>, y: &Tensor2<Self::Elem>) -> Tensor2<Self::Elem> {
        let neg: Tensor2<Self::Elem> = y.iter().map(|(k, c)| (*k, self.neg(c))).collect();
        self.t_add(x, &neg)
    }

    fn t_left(&self, a: &Self::Elem, t: &Tensor2<Self::Elem>) -> Tensor2<Self::Elem> {
        let mut out = BTreeMap::new();
        for (k, c) in t {
            self.accumulate(&mut out, *k, &self.mul(a, c));
        }
        out
    }

    /// `(a e^i (x) e^j) b`.
    fn t_right(&self, t: &Tensor2<Self::Elem>, b: &Self::Elem) -> Tensor2<Self::Elem> {
        let mut out = BTreeMap::new();
        for ((i, j), a) in t {
            for (j2, c) in self.push(*j, b) {
                for (i2, c2) in self.push(*i, &c) {
                    self.accumulate(&mut out, (i2, j2), &self.mul(a, &c2));
                }
            }
        }
        out
    }

    /// `x (x) e^j`.
    fn t_of(&self, x: &OneForm<Self::Elem>, j: usize) -> Tensor2<Self::Elem> {
        x.iter().map(|(i, c)| ((*i, j), c.clone())).collect()
    }

    /// `dagger(x (x) y) = y* (x) x*`.
    fn t_dagger(&self, t: &Tensor2<Self::Elem>) -> Tensor2<Self::Elem> {
        let mut out = BTreeMap::new();
        for ((i, j), a) in t {
            let (i2, si) = self.star_basis(*i);
            let (j2, sj) = self.star_basis(*j);
            let pair: Tensor2<Self::Elem> = BTreeMap::from([((j2, i2), self.mul(&sj, &si))]);
            out = self.t_add(&out, &self.t_right(&pair, &self.star(a)));
        }
        out
    }

    /// Right-coefficient form: `e^i (x) e^j b`.
    fn t_to_right(&self, t: &Tensor2<Self::Elem>) -> Tensor2<Self::Elem> {
        let mut out = BTreeMap::new();
        for ((i, j), a) in t {
            for (i2, c) in self.pull(a, *i) {
                for (j2, c2) in self.pull(&c, *j) {
                    self.accumulate(&mut out, (i2, j2), &c2);
                }
            }
        }
        out
    }

    fn t_wedge(&self, t: &Tensor2<Self::Elem>) -> Self::Form2 {
        let mut out = self.form2_zero();
        for ((i, j), a) in t {
            out = self.form2_add(&out, &self.form2_left(a, &self.wedge(*i, *j)));
        }
        out
    }

    fn t_text(&self, t: &Tensor2<Self::Elem>) -> String {
        if t.is_empty() {
            return "0".into();
        }
        t.iter().map(|((i, j), c)| format!("({}) {} (x) {}", self.text(c), self.basis_name(*i), self.basis_name(*j))).collect::<Vec<_>>().join(" + ")
    }

    // -- connections ------------------------------------------------------

    /// `nabla(sum a e^i) = sum da (x) e^i + a nabla(e^i)`.
    fn nabla(&self, conn: &Connection<Self::Elem>, x: &OneForm<Self::Elem>) -> Result<Tensor2<Self::Elem>, String> {
        let mut out = BTreeMap::new();
        for (i, a) in x {
            let r = conn.row(*i).ok_or_else(|| format!("{} is outside the connection's module", self.basis_name(*i)))?;
            for (p, c) in self.diff(a) {
                self.accumulate(&mut out, (p, *i), &c);
            }
            for (k, g) in conn.gamma[r].iter().enumerate() {
                for (p, c) in g {
                    self.accumulate(&mut out, (*p, conn.basis[k]), &self.neg(&self.mul(a, c)));
                }
            }
        }
        Ok(out)
    }

    /// `nabla(e^i b) - nabla(e^i) b`.
    fn sigma_probe(&self, conn: &Connection<Self::Elem>, i: usize, b: &Self::Elem) -> Result<Tensor2<Self::Elem>, String> {
        let eb: OneForm<Self::Elem> = {
            let mut x = BTreeMap::new();
            for (j, c) in self.push(i, b) {
                self.accumulate(&mut x, j, &c);
            }
            x
        };
        let lhs = self.nabla(conn, &eb)?;
        let rhs = self.t_right(&self.nabla(conn, &self.basis1(i))?, b);
        Ok(self.t_sub(&lhs, &rhs))
    }

    fn sigma_apply(&self, s: &Sigma<Self::Elem>, t: &Tensor2<Self::Elem>) -> Result<Tensor2<Self::Elem>, String> {
        let mut out = BTreeMap::new();
        for (k, a) in t {
            let v = s.values.get(k).ok_or_else(|| format!("sigma undefined on {} (x) {}", self.basis_name(k.0), self.basis_name(k.1)))?;
            out = self.t_add(&out, &self.t_left(a, v));
        }
        Ok(out)
    }

    /// `sigma(e^i (x) db)` with `db` expanded on the basis.
    fn sigma_on_diff(&self, s: &Sigma<Self::Elem>, i: usize, b: &Self::Elem) -> Result<Tensor2<Self::Elem>, String> {
        let mut t = BTreeMap::new();
        for (p, c) in self.diff(b) {
            for (i2, c2) in self.push(i, &c) {
                self.accumulate(&mut t, (i2, p), &c2);
            }
        }
        self.sigma_apply(s, &t)
    }

    /// Solve for the braiding of `conn` and verify it: right-linearity on
    /// generator probes and the defining identity on the test elements.
    fn sigma_from_connection(&self, conn: &Connection<Self::Elem>) -> Result<Sigma<Self::Elem>, String> {
        let probe = |i: usize, b: &Self::Elem| self.sigma_probe(conn, i, b);
        let s = self.solve_sigma(&conn.basis, &probe)?;
        self.sigma_bimodule_check(&s, &conn.basis)?;
        for &i in &conn.basis {
            for b in self.test_elems().iter().chain(self.generators().iter()) {
                let lhs = self.sigma_on_diff(&s, i, b)?;
                let rhs = self.sigma_probe(conn, i, b)?;
                if lhs != rhs {
                    return Err(format!(
                        "sigma(e (x) db) != nabla(e b) - nabla(e) b at e = {}, b = {}: {} vs {}",
                        self.basis_name(i),
                        self.text(b),
                        self.t_text(&lhs),
                        self.t_text(&rhs)
                    ));
                }
            }
        }
        Ok(s)
    }

    /// `sigma(t b) = sigma(t) b` on basis pairs and generators.
    fn sigma_bimodule_check(&self, s: &Sigma<Self::Elem>, first: &[usize]) -> Result<(), String> {
        for &i in first {
            for j in 0..self.dim() {
                let pair: Tensor2<Self::Elem> = BTreeMap::from([((i, j), self.one())]);
                for b in self.generators() {
                    let lhs = self.sigma_apply(s, &self.t_right(&pair, &b))?;
                    let rhs = self.t_right(&self.sigma_apply(s, &pair)?, &b);
                    if lhs != rhs {
                        return Err(format!(
                            "sigma is not a right module map at {} (x) {} times {}: {} vs {}",
                            self.basis_name(i),
                            self.basis_name(j),
                            self.text(&b),
                            self.t_text(&lhs),
                            self.t_text(&rhs)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// `Gamma_other = -D(g) g~ - g (Gamma_known)* g~` with `D = partial`
    /// when the known symbols are antiholomorphic, else `dbar`.
    fn chern_complete(&self, metric: &MetricData<Self::Elem>, known: &Christoffel<Self::Elem>, known_antiholomorphic: bool) -> Result<Christoffel<Self::Elem>, String> {
        let gt = metric.g_tilde.as_ref().ok_or("metric has no inverse")?;
        let n = metric.basis.len();
        let stars: Vec<Vec<OneForm<Self::Elem>>> = (0..n).map(|l| (0..n).map(|j| self.one_star(&known[l][j])).collect()).collect();
        let mut out = vec![vec![BTreeMap::new(); n]; n];
        for i in 0..n {
            for k in 0..n {
                let mut acc: OneForm<Self::Elem> = BTreeMap::new();
                for j in 0..n {
                    let dg = self.one_part(&self.diff(&metric.g[i][j]), known_antiholomorphic);
                    acc = self.one_add(&acc, &self.one_right(&dg, &gt[j][k]));
                    for l in 0..n {
                        let t = self.one_right(&self.one_left(&metric.g[i][j], &stars[l][j]), &gt[l][k]);
                        acc = self.one_add(&acc, &t);
                    }
                }
                out[i][k] = self.one_neg(&acc);
            }
        }
        Ok(out)
    }

    /// `dg^{ij} + Gamma^i_k g^{kj} + g^{ik} (Gamma^j_k)* = 0`.
    fn hermitian_check(&self, conn: &Connection<Self::Elem>, metric: &MetricData<Self::Elem>) -> Result<(), String> {
        if conn.basis != metric.basis {
            return Err("connection and metric use different bases".into());
        }
        let n = conn.basis.len();
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.diff(&metric.g[i][j]);
                for k in 0..n {
                    acc = self.one_add(&acc, &self.one_right(&conn.gamma[i][k], &metric.g[k][j]));
                    acc = self.one_add(&acc, &self.one_left(&metric.g[i][k], &self.one_star(&conn.gamma[j][k])));
                }
                if !acc.is_empty() {
                    return Err(format!(
                        "entry ({}, {}): dg + Gamma g + g Gamma* = {}",
                        self.basis_name(conn.basis[i]),
                        self.basis_name(conn.basis[j]),
                        self.one_text(&acc)
                    ));
                }
            }
        }
        Ok(())
    }

    /// `T(e^i) = wedge(nabla e^i) - d e^i` per basis element.
    fn torsion(&self, conn: &Connection<Self::Elem>) -> Vec<Self::Form2> {
        conn.basis
            .iter()
            .map(|&i| {
                let nab = self.nabla(conn, &self.basis1(i)).expect("basis element of the connection");
                let w = self.t_wedge(&nab);
                self.form2_add(&w, &self.form2_left(&self.neg(&self.one()), &self.d_basis(i)))
            })
            .collect()
    }

    /// `(dbar (x) id - id ^ dbar_E) dbar_E` as a matrix of `(0,2)`-forms:
    /// `R^i_l = -dbar Gamma^i_l - Gamma^i_k ^ Gamma^k_l`.
    fn holomorphic_curvature(&self, gamma: &Christoffel<Self::Elem>) -> Vec<Vec<Self::Form2>> {
        let n = gamma.len();
        let mut out = vec![vec![self.form2_zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                let db = self.form2_component(&self.one_d(&gamma[i][l]), 0);
                let mut acc = self.form2_left(&self.neg(&self.one()), &db);
                for k in 0..n {
                    let w = self.one_wedge(&gamma[i][k], &gamma[k][l]);
                    acc = self.form2_add(&acc, &self.form2_left(&self.neg(&self.one()), &w));
                }
                out[i][l] = acc;
            }
        }
        out
    }

    /// `Pg = g`, `g P* = g`, `g g~ = P`, `g~ g = P*`, `g~* = g~` and
    /// `g* = g` for hermitian metrics; the first violated identity is named.
    fn verify_fgp(&self, m: &MetricData<Self::Elem>) -> Result<(), String> {
        let gt = m.g_tilde.as_ref().ok_or("no inverse supplied")?;
        let mm = |a: &[Vec<Self::Elem>], b: &[Vec<Self::Elem>]| -> Vec<Vec<Self::Elem>> {
            let n = a.len();
            (0..n)
                .map(|i| (0..n).map(|k| (0..n).fold(self.zero(), |acc, j| self.add(&acc, &self.mul(&a[i][j], &b[j][k])))).collect())
                .collect()
        };
        let st = |a: &[Vec<Self::Elem>]| -> Vec<Vec<Self::Elem>> {
            let n = a.len();
            (0..n).map(|i| (0..n).map(|j| self.star(&a[j][i])).collect()).collect()
        };
        let p_star = st(&m.p);
        let mut checks: Vec<(&str, Vec<Vec<Self::Elem>>, Vec<Vec<Self::Elem>>)> = vec![
            ("P g = g", mm(&m.p, &m.g), m.g.clone()),
            ("g P* = g", mm(&m.g, &p_star), m.g.clone()),
            ("g g~ = P", mm(&m.g, gt), m.p.clone()),
            ("g~ g = P*", mm(gt, &m.g), p_star.clone()),
            ("g~* = g~", st(gt), gt.clone()),
        ];
        if m.hermitian {
            checks.push(("g* = g", st(&m.g), m.g.clone()));
        }
        for (name, lhs, rhs) in checks {
            for i in 0..lhs.len() {
                for j in 0..lhs.len() {
                    if lhs[i][j] != rhs[i][j] {
                        return Err(format!("{name} fails at ({i}, {j}): {} vs {}", self.text(&lhs[i][j]), self.text(&rhs[i][j])));
                    }
                }
            }
        }
        Ok(())
    }

    fn metric(&self, basis: Vec<usize>, g: Vec<Vec<Self::Elem>>, hermitian: bool) -> MetricData<Self::Elem> {
        let n = basis.len();
        let p = (0..n).map(|i| (0..n).map(|j| if i == j { self.one() } else { self.zero() }).collect()).collect();
        let g_tilde = self.invert_matrix(&g);
        MetricData { basis, g, g_tilde, p, hermitian }
    }

    /// `(a e^i, e^j b) = a (e^i, e^j) b`, `y` given with left coefficients.
    fn round_eval(&self, rm: &RoundMetric<Self::Elem>, x: &OneForm<Self::Elem>, y: &OneForm<Self::Elem>) -> Self::Elem {
        let mut out = self.zero();
        for (i, a) in x {
            for (j0, b0) in y {
                for (j, b) in self.pull(b0, *j0) {
                    if let Some(v) = rm.values.get(&(*i, j)) {
                        out = self.add(&out, &self.mul(&self.mul(a, v), &b));
                    }
                }
            }
        }
        out
    }

    /// `(id (x) (,))(nabla (x) id) + ((,) (x) id)(id (x) sigma^-1 nabla) = d(,)`
    /// on `a e^i (x) e^j b` over the ground field.
    fn round_preservation_check(&self, conn: &Connection<Self::Elem>, sigma_inv: &Sigma<Self::Elem>, rm: &RoundMetric<Self::Elem>) -> Result<(), String> {
        let mut coeffs = vec![self.one()];
        coeffs.extend(self.generators());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                for a in &coeffs {
                    for b in &coeffs {
                        let x = self.one_left(a, &self.basis1(i));
                        let y = self.one_right(&self.basis1(j), b);
                        let mut lhs: OneForm<Self::Elem> = BTreeMap::new();
                        for ((p, k), c) in self.nabla(conn, &x)? {
                            let r = self.round_eval(rm, &self.basis1(k), &y);
                            lhs = self.one_add(&lhs, &self.one_right(&self.one_left(&c, &self.basis1(p)), &r));
                        }
                        let t = self.sigma_apply(sigma_inv, &self.nabla(conn, &y)?)?;
                        for ((k, l), bb) in self.t_to_right(&t) {
                            let r = self.round_eval(rm, &x, &self.basis1(k));
                            lhs = self.one_add(&lhs, &self.one_left(&r, &self.one_right(&self.basis1(l), &bb)));
                        }
                        let rhs = self.diff(&self.round_eval(rm, &x, &y));
                        if lhs != rhs {
                            return Err(format!(
                                "on ({}) {} (x) {} ({}): lhs {} vs d(,) {}",
                                self.text(a),
                                self.basis_name(i),
                                self.basis_name(j),
                                self.text(b),
                                self.one_text(&lhs),
                                self.one_text(&rhs)
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `sigma dagger sigma = dagger` on `a e^i (x) e^j` with `i` in `first`.
    fn sigma_dagger_check(&self, s: &Sigma<Self::Elem>, first: &[usize]) -> Result<(), String> {
        let mut coeffs = vec![self.one()];
        coeffs.extend(self.generators());
        for &i in first {
            for j in 0..self.dim() {
                for a in &coeffs {
                    let t: Tensor2<Self::Elem> = BTreeMap::from([((i, j), a.clone())]);
                    let lhs = self.sigma_apply(s, &self.t_dagger(&self.sigma_apply(s, &t)?))?;
                    let rhs = self.t_dagger(&t);
                    if lhs != rhs {
                        return Err(format!(
                            "sigma dagger sigma != dagger on ({}) {} (x) {}: {} vs {}",
                            self.text(a),
                            self.basis_name(i),
                            self.basis_name(j),
                            self.t_text(&lhs),
                            self.t_text(&rhs)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// `sigma dagger sigma = dagger` and `nabla(xi*) = sigma dagger nabla(xi)`
    /// on `xi = a e^i`.
    fn star_preservation_check(&self, conn: &Connection<Self::Elem>, s: &Sigma<Self::Elem>) -> Result<(), String> {
        self.sigma_dagger_check(s, &(0..self.dim()).collect::<Vec<_>>())?;
        let mut coeffs = vec![self.one()];
        coeffs.extend(self.generators());
        for i in 0..self.dim() {
            for a in &coeffs {
                let xi = self.one_left(a, &self.basis1(i));
                let lhs = self.nabla(conn, &self.one_star(&xi))?;
                let rhs = self.sigma_apply(s, &self.t_dagger(&self.nabla(conn, &xi)?))?;
                if lhs != rhs {
                    return Err(format!(
                        "nabla(xi*) != sigma dagger nabla(xi) at xi = ({}) {}: {} vs {}",
                        self.text(a),
                        self.basis_name(i),
                        self.t_text(&lhs),
                        self.t_text(&rhs)
                    ));
                }
            }
        }
        Ok(())
    }
}

// -- quantum plane ----------------------------------------------------------

/// The quantum-plane calculus with basis `dz, dz*, dbz, dbz*` (indices are
/// the form symbols).
#[derive(Debug, Clone, Copy)]
pub struct PlaneGeometry<'a> {
    pub calc: &'a Calculus,
}

impl<'a> PlaneGeometry<'a> {
    pub fn new(calc: &'a Calculus) -> Self {
        PlaneGeometry { calc }
    }

    pub fn holomorphic_basis() -> Vec<usize> {
        vec![0, 1]
    }

    pub fn antiholomorphic_basis() -> Vec<usize> {
        vec![2, 3]
    }

    fn sym(i: usize) -> Sym {
        i as Sym
    }

    /// Embed a scalar matrix-valued braiding into the table form.
    fn scalar_matrix(&self, s: &Sigma<NCPoly>) -> Result<Matrix<Scalar>, String> {
        let n = self.dim();
        let mut m = Matrix::zeros(n * n, n * n);
        for ((i, j), t) in &s.values {
            for ((k, l), c) in t {
                let v = c.as_constant().ok_or_else(|| format!("non-constant braiding entry on {} (x) {}", self.basis_name(*i), self.basis_name(*j)))?;
                m.set(k * n + l, i * n + j, v);
            }
        }
        Ok(m)
    }
}

impl<'a> Geometry for PlaneGeometry<'a> {
    type Elem = NCPoly;
    type Form2 = Form;

    fn dim(&self) -> usize {
        4
    }

    fn basis_name(&self, i: usize) -> String {
        sym_name(Self::sym(i)).into()
    }

    fn is_holomorphic(&self, i: usize) -> bool {
        is_holomorphic(Self::sym(i))
    }

    fn star_basis(&self, i: usize) -> (usize, NCPoly) {
        (sym_star(Self::sym(i)) as usize, NCPoly::one())
    }

    fn zero(&self) -> NCPoly {
        NCPoly::zero()
    }

    fn one(&self) -> NCPoly {
        NCPoly::one()
    }

    fn add(&self, a: &NCPoly, b: &NCPoly) -> NCPoly {
        a.add(b)
    }

    fn neg(&self, a: &NCPoly) -> NCPoly {
        a.neg()
    }

    fn mul(&self, a: &NCPoly, b: &NCPoly) -> NCPoly {
        self.calc.amul(a, b)
    }

    fn star(&self, a: &NCPoly) -> NCPoly {
        self.calc.astar(a)
    }

    fn is_zero(&self, a: &NCPoly) -> bool {
        self.calc.nf(a).is_zero()
    }

    fn text(&self, a: &NCPoly) -> String {
        self.calc.algebra().text(a)
    }

    fn push(&self, i: usize, b: &NCPoly) -> Vec<(usize, NCPoly)> {
        let f = self.calc.push_poly(mask_of(Self::sym(i)), b);
        f.terms().iter().map(|(m, c)| (mask_syms(*m)[0] as usize, c.clone())).collect()
    }

    fn pull(&self, a: &NCPoly, i: usize) -> Vec<(usize, NCPoly)> {
        let r = self.calc.pull_poly(a, mask_of(Self::sym(i)));
        r.terms.into_iter().map(|(m, c)| (mask_syms(m)[0] as usize, c)).collect()
    }

    fn diff(&self, a: &NCPoly) -> OneForm<NCPoly> {
        let f = self.calc.d(&Form::function(a.clone()));
        f.terms().iter().map(|(m, c)| (mask_syms(*m)[0] as usize, c.clone())).collect()
    }

    fn form2_zero(&self) -> Form {
        Form::zero()
    }

    fn form2_add(&self, x: &Form, y: &Form) -> Form {
        x.add(y)
    }

    fn form2_left(&self, a: &NCPoly, x: &Form) -> Form {
        self.calc.left_mul(a, x)
    }

    fn form2_is_zero(&self, x: &Form) -> bool {
        x.is_zero()
    }

    fn form2_text(&self, x: &Form) -> String {
        self.calc.text(x)
    }

    fn form2_component(&self, x: &Form, p: usize) -> Form {
        x.component(p, 2 - p)
    }

    fn wedge(&self, i: usize, j: usize) -> Form {
        self.calc.mul(&Form::sym(Self::sym(i)), &Form::sym(Self::sym(j)))
    }

    fn d_basis(&self, i: usize) -> Form {
        self.calc.d(&Form::sym(Self::sym(i)))
    }

    fn generators(&self) -> Vec<NCPoly> {
        vec![NCPoly::generator(Z), NCPoly::generator(ZS)]
    }

    fn test_elems(&self) -> Vec<NCPoly> {
        let mut v = Calculus::monomials(2);
        v.extend(Calculus::monomials(3));
        v
    }

    /// `sigma(e (x) dz-part)` is the part of the probe whose first factor
    /// has the type of the differential it came from.
    fn solve_sigma(&self, basis: &[usize], probe: &dyn Fn(usize, &NCPoly) -> Result<Tensor2<NCPoly>, String>) -> Result<Sigma<NCPoly>, String> {
        let mut values = BTreeMap::new();
        for &i in basis {
            for u in [Z, ZS] {
                let t = probe(i, &NCPoly::generator(u))?;
                for holo in [true, false] {
                    let part: Tensor2<NCPoly> = t.iter().filter(|((p, _), _)| self.is_holomorphic(*p) == holo).map(|(k, c)| (*k, c.clone())).collect();
                    let j = crate::qdolbeault::dsym(u, holo) as usize;
                    values.insert((i, j), part);
                }
            }
        }
        Ok(Sigma { values })
    }

    fn invert_sigma(&self, s: &Sigma<NCPoly>) -> Result<Sigma<NCPoly>, String> {
        let n = self.dim();
        let m = self.scalar_matrix(s)?;
        let inv = m.inverse().ok_or("braiding is not invertible")?;
        let mut values = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let mut t = BTreeMap::new();
                for k in 0..n {
                    for l in 0..n {
                        let c = inv.get(k * n + l, i * n + j);
                        if !c.is_zero() {
                            t.insert((k, l), NCPoly::constant(c.clone()));
                        }
                    }
                }
                values.insert((i, j), t);
            }
        }
        Ok(Sigma { values })
    }

    fn factor_11(&self, x: &Form, antiholomorphic_first: bool) -> Result<Tensor2<NCPoly>, String> {
        let firsts: Vec<usize> = (0..4).filter(|&i| self.is_holomorphic(i) != antiholomorphic_first).collect();
        let seconds: Vec<usize> = (0..4).filter(|&i| self.is_holomorphic(i) == antiholomorphic_first).collect();
        let pairs: Vec<(usize, usize)> = firsts.iter().flat_map(|&p| seconds.iter().map(move |&k| (p, k))).collect();
        let masks: Vec<u8> = (0..16u8).filter(|m| crate::qdolbeault::bidegree(*m) == (1, 1)).collect();
        let mut m = Matrix::zeros(masks.len(), pairs.len());
        for (c, &(p, k)) in pairs.iter().enumerate() {
            for (mask, coeff) in self.wedge(p, k).terms() {
                let r = masks.iter().position(|x| x == mask).ok_or("wedge leaves bidegree (1,1)")?;
                let v = coeff.as_constant().ok_or("non-constant wedge table")?;
                m.set(r, c, v);
            }
        }
        let inv = m.inverse().ok_or("the wedge map on this ordering is not invertible")?;
        let mut out = BTreeMap::new();
        for (mask, a) in x.terms() {
            let r = masks.iter().position(|y| y == mask).ok_or("form is not of bidegree (1,1)")?;
            for (c, pair) in pairs.iter().enumerate() {
                let k = inv.get(c, r);
                if !k.is_zero() {
                    self.accumulate(&mut out, *pair, &a.scale(k));
                }
            }
        }
        Ok(out)
    }

    /// Constant matrices only.
    fn invert_matrix(&self, g: &[Vec<NCPoly>]) -> Option<Vec<Vec<NCPoly>>> {
        let n = g.len();
        let rows: Option<Vec<Vec<Scalar>>> = g.iter().map(|r| r.iter().map(|c| if c.is_zero() { Some(Scalar::zero()) } else { c.as_constant() }).collect()).collect();
        let inv = Matrix::from_rows(rows?, n).inverse()?;
        Some((0..n).map(|i| (0..n).map(|j| NCPoly::constant(inv.get(i, j).clone())).filter_map(Some).collect()).collect())
    }
}

/// `<e^i, e^j> = table(e^i (x) (e^j)*)` on `basis`.
pub fn plane_hermitian_metric(geo: &PlaneGeometry, table: &PairTable, basis: &[usize]) -> MetricData<NCPoly> {
    let g = basis.iter().map(|&i| basis.iter().map(|&j| table.get(i as Sym, sym_star(j as Sym))).collect()).collect();
    geo.metric(basis.to_vec(), g, true)
}

/// Block-diagonal metric with the two summands perpendicular.
pub fn perpendicular_sum<G: Geometry>(geo: &G, a: &MetricData<G::Elem>, b: &MetricData<G::Elem>) -> MetricData<G::Elem> {
    let (na, nb) = (a.basis.len(), b.basis.len());
    let block = |x: &[Vec<G::Elem>], y: &[Vec<G::Elem>]| -> Vec<Vec<G::Elem>> {
        (0..na + nb)
            .map(|i| {
                (0..na + nb)
                    .map(|j| match (i < na, j < na) {
                        (true, true) => x[i][j].clone(),
                        (false, false) => y[i - na][j - na].clone(),
                        _ => geo.zero(),
                    })
                    .collect()
            })
            .collect()
    };
    let mut basis = a.basis.clone();
    basis.extend(&b.basis);
    let g_tilde = match (&a.g_tilde, &b.g_tilde) {
        (Some(x), Some(y)) => Some(block(x, y)),
        _ => None,
    };
    MetricData { basis, g: block(&a.g, &b.g), g_tilde, p: block(&a.p, &b.p), hermitian: a.hermitian && b.hermitian }
}

/// `(,)` equal to `phi_+` on `(1,0) (x) (0,1)` and `phi_-` on
/// `(0,1) (x) (1,0)`, zero on the diagonal blocks.
pub fn plane_round_metric(plus: &PairTable, minus: &PairTable) -> RoundMetric<NCPoly> {
    let mut values = BTreeMap::new();
    for t in [plus, minus] {
        for ((f, g), v) in &t.values {
            values.insert((*f as usize, *g as usize), v.clone());
        }
    }
    RoundMetric { values }
}

/// `(d (x) dbar) Psi (v (x) u)` for the antiholomorphic half and
/// `(d (x) partial) Psi^-1 (v (x) u)` for the holomorphic half, with `Psi`
/// in the `(z, z*)` basis.
pub fn plane_sigma_from_braiding(geo: &PlaneGeometry, v: usize, u: usize, holomorphic: bool) -> Tensor2<NCPoly> {
    let space = crate::braided::BraidedSpace::qplane();
    let psi = if holomorphic {
        crate::qdolbeault::psi_in_star_basis(&crate::braided::BraidedSpace::new(space.labels().to_vec(), space.psi_inv().clone()).expect("inverse braiding"))
    } else {
        crate::qdolbeault::psi_in_star_basis(&space)
    };
    let col = v * 2 + u;
    let mut out = BTreeMap::new();
    for row in 0..4 {
        let c = psi.get(row, col);
        if c.is_zero() {
            continue;
        }
        let (x, y) = ((row / 2) as u8, (row % 2) as u8);
        let second = crate::qdolbeault::dsym(y, holomorphic) as usize;
        for first in [crate::qdolbeault::dsym(x, true) as usize, crate::qdolbeault::dsym(x, false) as usize] {
            geo.accumulate(&mut out, (first, second), &NCPoly::constant(c.clone()));
        }
    }
    out
}

// -- finite groups ----------------------------------------------------------

/// A finite-group calculus with basis `e^a`, `a` in `C10` then `C01`.
#[derive(Debug, Clone, Copy)]
pub struct GroupGeometry<'a> {
    pub calc: &'a GroupCalculus,
}

impl<'a> GroupGeometry<'a> {
    pub fn new(calc: &'a GroupCalculus) -> Self {
        GroupGeometry { calc }
    }

    fn n(&self) -> usize {
        self.calc.n()
    }

    pub fn elem_of(&self, i: usize) -> usize {
        self.calc.gens()[i]
    }

    pub fn pos(&self, a: usize) -> usize {
        self.calc.position(a).expect("generator")
    }

    pub fn holomorphic_basis(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.is_holomorphic(i)).collect()
    }

    pub fn antiholomorphic_basis(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.is_holomorphic(i)).collect()
    }

    pub fn constant(&self, c: Q) -> GroupFunction {
        GroupFunction::constant(self.n(), c)
    }

    fn value_at(f: &GroupFunction, x: usize) -> Q {
        f.0[x].clone()
    }

    fn coeffs(&self, x: &GroupForm) -> BTreeMap<usize, GroupFunction> {
        x.terms.clone()
    }
}

impl<'a> Geometry for GroupGeometry<'a> {
    type Elem = GroupFunction;
    type Form2 = GroupForm;

    fn dim(&self) -> usize {
        self.calc.m()
    }

    fn basis_name(&self, i: usize) -> String {
        format!("e^{}", self.calc.group().name(self.elem_of(i)))
    }

    fn is_holomorphic(&self, i: usize) -> bool {
        self.calc.is_holomorphic(i)
    }

    fn star_basis(&self, i: usize) -> (usize, GroupFunction) {
        let inv = self.calc.group().inv(self.elem_of(i));
        (self.pos(inv), self.constant(-Q::one()))
    }

    fn zero(&self) -> GroupFunction {
        GroupFunction::zero(self.n())
    }

    fn one(&self) -> GroupFunction {
        GroupFunction::one(self.n())
    }

    fn add(&self, a: &GroupFunction, b: &GroupFunction) -> GroupFunction {
        a.add(b)
    }

    fn neg(&self, a: &GroupFunction) -> GroupFunction {
        a.neg()
    }

    fn mul(&self, a: &GroupFunction, b: &GroupFunction) -> GroupFunction {
        a.mul(b)
    }

    /// Real-valued functions.
    fn star(&self, a: &GroupFunction) -> GroupFunction {
        a.clone()
    }

    fn is_zero(&self, a: &GroupFunction) -> bool {
        a.is_zero()
    }

    fn text(&self, a: &GroupFunction) -> String {
        if let Some(c) = a.0.first() {
            if a.0.iter().all(|x| x == c) {
                return c.to_string();
            }
        }
        a.text()
    }

    fn push(&self, i: usize, b: &GroupFunction) -> Vec<(usize, GroupFunction)> {
        vec![(i, b.shift(self.calc.group(), self.elem_of(i)))]
    }

    fn pull(&self, a: &GroupFunction, i: usize) -> Vec<(usize, GroupFunction)> {
        let inv = self.calc.group().inv(self.elem_of(i));
        vec![(i, a.shift(self.calc.group(), inv))]
    }

    fn diff(&self, a: &GroupFunction) -> OneForm<GroupFunction> {
        let mut out = BTreeMap::new();
        for i in 0..self.dim() {
            let c = a.shift(self.calc.group(), self.elem_of(i)).sub(a);
            self.accumulate(&mut out, i, &c);
        }
        out
    }

    fn form2_zero(&self) -> GroupForm {
        GroupForm::zero(2)
    }

    fn form2_add(&self, x: &GroupForm, y: &GroupForm) -> GroupForm {
        x.add(y)
    }

    fn form2_left(&self, a: &GroupFunction, x: &GroupForm) -> GroupForm {
        self.calc.mul(&self.calc.function(a.clone()), x)
    }

    fn form2_is_zero(&self, x: &GroupForm) -> bool {
        x.is_zero()
    }

    fn form2_text(&self, x: &GroupForm) -> String {
        self.calc.form_text(x)
    }

    fn form2_component(&self, x: &GroupForm, p: usize) -> GroupForm {
        self.calc.component(x, p)
    }

    fn wedge(&self, i: usize, j: usize) -> GroupForm {
        self.calc.mul(&self.calc.basic(i), &self.calc.basic(j))
    }

    fn d_basis(&self, i: usize) -> GroupForm {
        self.calc.d(&self.calc.basic(i))
    }

    fn generators(&self) -> Vec<GroupFunction> {
        (0..self.n()).map(|g| GroupFunction::delta(self.n(), g)).collect()
    }

    fn test_elems(&self) -> Vec<GroupFunction> {
        let n = self.n() as i64;
        vec![GroupFunction::from_ints(&(0..n).map(|x| x * x - 3 * x + 1).collect::<Vec<_>>())]
    }

    /// `S^{ic}(x)` is the value at `x` of the probe with `f = delta_{x a_i c}`.
    fn solve_sigma(&self, basis: &[usize], probe: &dyn Fn(usize, &GroupFunction) -> Result<Tensor2<GroupFunction>, String>) -> Result<Sigma<GroupFunction>, String> {
        let grp = self.calc.group();
        let n = self.n();
        let mut values: BTreeMap<(usize, usize), Tensor2<GroupFunction>> = BTreeMap::new();
        for &i in basis {
            for c in 0..self.dim() {
                let mut t: Tensor2<GroupFunction> = BTreeMap::new();
                for x in 0..n {
                    let y = grp.mul(grp.mul(x, self.elem_of(i)), self.elem_of(c));
                    let r = probe(i, &GroupFunction::delta(n, y))?;
                    for (k, f) in r {
                        let v = Self::value_at(&f, x);
                        if v.is_zero() {
                            continue;
                        }
                        let e = t.entry(k).or_insert_with(|| GroupFunction::zero(n));
                        e.0[x] = v;
                    }
                }
                values.insert((i, c), t);
            }
        }
        Ok(Sigma { values })
    }

    fn invert_sigma(&self, s: &Sigma<GroupFunction>) -> Result<Sigma<GroupFunction>, String> {
        let m = self.dim();
        let n = self.n();
        let mut values: BTreeMap<(usize, usize), Tensor2<GroupFunction>> = BTreeMap::new();
        for x in 0..n {
            let mut mat: Matrix<Q> = Matrix::zeros(m * m, m * m);
            for i in 0..m {
                for j in 0..m {
                    let t = s.values.get(&(i, j)).ok_or("sigma must be defined on all basis pairs")?;
                    for ((k, l), f) in t {
                        mat.set(k * m + l, i * m + j, Self::value_at(f, x));
                    }
                }
            }
            let inv = mat.inverse().ok_or_else(|| format!("sigma is not invertible at {}", self.calc.group().name(x)))?;
            for i in 0..m {
                for j in 0..m {
                    let t = values.entry((i, j)).or_default();
                    for k in 0..m {
                        for l in 0..m {
                            let v = inv.get(k * m + l, i * m + j);
                            if !v.is_zero() {
                                t.entry((k, l)).or_insert_with(|| GroupFunction::zero(n)).0[x] = v.clone();
                            }
                        }
                    }
                }
            }
        }
        Ok(Sigma { values })
    }

    fn factor_11(&self, x: &GroupForm, antiholomorphic_first: bool) -> Result<Tensor2<GroupFunction>, String> {
        let firsts: Vec<usize> = (0..self.dim()).filter(|&i| self.is_holomorphic(i) != antiholomorphic_first).collect();
        let seconds: Vec<usize> = (0..self.dim()).filter(|&i| self.is_holomorphic(i) == antiholomorphic_first).collect();
        let pairs: Vec<(usize, usize)> = firsts.iter().flat_map(|&p| seconds.iter().map(move |&k| (p, k))).collect();
        let mut keys: Vec<usize> = Vec::new();
        let images: Vec<BTreeMap<usize, GroupFunction>> = pairs.iter().map(|&(p, k)| self.coeffs(&self.wedge(p, k))).collect();
        for im in &images {
            for w in im.keys() {
                if !keys.contains(w) {
                    keys.push(*w);
                }
            }
        }
        for w in x.terms.keys() {
            if !keys.contains(w) {
                return Err(format!("{} is outside the image of the wedge map", self.calc.word_text(2, *w)));
            }
        }
        if keys.len() != pairs.len() {
            return Err(format!("wedge map from {} pairs onto {} words is not bijective", pairs.len(), keys.len()));
        }
        let mut mat: Matrix<Q> = Matrix::zeros(keys.len(), pairs.len());
        for (c, im) in images.iter().enumerate() {
            for (w, f) in im {
                let r = keys.iter().position(|k| k == w).expect("collected");
                // the wedge relations have constant coefficients
                mat.set(r, c, Self::value_at(f, 0));
            }
        }
        let inv = mat.inverse().ok_or("the wedge map on this ordering is not invertible")?;
        let mut out = BTreeMap::new();
        for (w, f) in &x.terms {
            let r = keys.iter().position(|k| k == w).expect("checked");
            for (c, pair) in pairs.iter().enumerate() {
                let k = inv.get(c, r);
                if !k.is_zero() {
                    self.accumulate(&mut out, *pair, &f.scale(k));
                }
            }
        }
        Ok(out)
    }

    /// Pointwise inverse.
    fn invert_matrix(&self, g: &[Vec<GroupFunction>]) -> Option<Vec<Vec<GroupFunction>>> {
        let k = g.len();
        let n = self.n();
        let mut out = vec![vec![GroupFunction::zero(n); k]; k];
        for x in 0..n {
            let m = Matrix::from_rows(g.iter().map(|r| r.iter().map(|f| Self::value_at(f, x)).collect()).collect(), k);
            let inv = m.inverse()?;
            for i in 0..k {
                for j in 0..k {
                    out[i][j].0[x] = inv.get(i, j).clone();
                }
            }
        }
        Some(out)
    }
}

/// Diagonal metric from per-basis weights.
pub fn group_diagonal_metric(geo: &GroupGeometry, basis: Vec<usize>, weights: &[GroupFunction]) -> MetricData<GroupFunction> {
    let k = basis.len();
    let g = (0..k).map(|i| (0..k).map(|j| if i == j { weights[i].clone() } else { geo.zero() }).collect()).collect();
    geo.metric(basis, g, true)
}

/// `dbar_E = Theta^{0110} dbar` on `E = Omega^{1,0}`, as Christoffel
/// symbols on the holomorphic basis.
pub fn holomorphic_structure<G: Geometry>(geo: &G, e_basis: &[usize]) -> Result<Christoffel<G::Elem>, String> {
    structure_from_theta(geo, e_basis, true)
}

/// `partial_F = Theta^{1001} partial` on `F = Omega^{0,1}`.
pub fn antiholomorphic_structure<G: Geometry>(geo: &G, f_basis: &[usize]) -> Result<Christoffel<G::Elem>, String> {
    structure_from_theta(geo, f_basis, false)
}

fn structure_from_theta<G: Geometry>(geo: &G, basis: &[usize], dbar: bool) -> Result<Christoffel<G::Elem>, String> {
    let k = basis.len();
    let mut gamma = vec![vec![BTreeMap::new(); k]; k];
    for (r, &i) in basis.iter().enumerate() {
        let dx = geo.d_basis(i);
        // (1,1) part of d e^i
        let part = geo.form2_component(&dx, 1);
        let t = geo.factor_11(&part, dbar)?;
        for ((p, kk), f) in t {
            let col = basis.iter().position(|&b| b == kk).ok_or("second factor outside the module")?;
            geo.accumulate(&mut gamma[r][col], p, &geo.neg(&f));
        }
    }
    Ok(gamma)
}

/// Torsion `wedge(D e^i) - (d e^i)^{1,1}` of a one-type connection
/// `D e^i = -Gamma^i_k (x) e^k` on `basis`; zero for the structures above.
pub fn structure_torsion<G: Geometry>(geo: &G, basis: &[usize], gamma: &Christoffel<G::Elem>) -> Vec<G::Form2> {
    basis
        .iter()
        .enumerate()
        .map(|(r, &i)| {
            let mut t: Tensor2<G::Elem> = BTreeMap::new();
            for (col, &k) in basis.iter().enumerate() {
                for (p, f) in &gamma[r][col] {
                    geo.accumulate(&mut t, (*p, k), &geo.neg(f));
                }
            }
            let part = geo.form2_component(&geo.d_basis(i), 1);
            geo.form2_add(&geo.t_wedge(&t), &geo.form2_left(&geo.neg(&geo.one()), &part))
        })
        .collect()
}

fn gamma_add<G: Geometry>(geo: &G, a: &Christoffel<G::Elem>, b: &Christoffel<G::Elem>) -> Christoffel<G::Elem> {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| geo.one_add(x, y)).collect()).collect()
}

/// Chern connection on `E = Omega^{1,0}` via `Gamma_+ = -partial(g) g~ - g Gamma_-^* g~`
/// with `Gamma_-` from `Theta^{0110} dbar`. Returns `(Gamma_-, Gamma_+, nabla_E)`.
#[allow(clippy::type_complexity)]
pub fn chern_e<G: Geometry>(geo: &G, metric: &MetricData<G::Elem>) -> Result<(Christoffel<G::Elem>, Christoffel<G::Elem>, Connection<G::Elem>), String> {
    let minus = holomorphic_structure(geo, &metric.basis)?;
    let plus = geo.chern_complete(metric, &minus, true)?;
    let conn = Connection { basis: metric.basis.clone(), gamma: gamma_add(geo, &minus, &plus) };
    Ok((minus, plus, conn))
}

/// Conjugate construction on `F = Omega^{0,1}`. Returns `(Gamma_+, Gamma_-, nabla_F)`.
#[allow(clippy::type_complexity)]
pub fn chern_f<G: Geometry>(geo: &G, metric: &MetricData<G::Elem>) -> Result<(Christoffel<G::Elem>, Christoffel<G::Elem>, Connection<G::Elem>), String> {
    let plus = antiholomorphic_structure(geo, &metric.basis)?;
    let minus = geo.chern_complete(metric, &plus, false)?;
    let conn = Connection { basis: metric.basis.clone(), gamma: gamma_add(geo, &plus, &minus) };
    Ok((plus, minus, conn))
}

/// Closed-form group connection on `E`, split as `(Gamma_-, Gamma_+)`:
/// `nabla_E e^{b^-1} = sum_a e^a (x) (e^{b^-1} - e^{a^-1 b^-1 a}) + sum_a e^{a^-1} (x) e^{b^-1}
///  - sum_{a,s,c} g^{b^-1, a^-1 s^-1 a} e^{a^-1} g~_{s^-1 c^-1} (x) e^{c^-1}`.
pub fn group_chern_e_closed(geo: &GroupGeometry, metric: &MetricData<GroupFunction>) -> Result<(Christoffel<GroupFunction>, Christoffel<GroupFunction>), String> {
    let calc = geo.calc;
    let grp = calc.group();
    let gt = metric.g_tilde.as_ref().ok_or("metric has no inverse")?;
    let idx = |pos: usize| metric.basis.iter().position(|&b| b == pos).expect("holomorphic basis");
    let c01: Vec<usize> = calc.split().c01.clone();
    let k = metric.basis.len();
    let mut minus = vec![vec![BTreeMap::new(); k]; k];
    let mut plus = vec![vec![BTreeMap::new(); k]; k];
    for r in 0..k {
        let beta = geo.elem_of(metric.basis[r]);
        for &a in &c01 {
            let pa = geo.pos(a);
            let pai = geo.pos(grp.inv(a));
            // first line: Gamma_- = -(delta sum e^a - sum_{a^-1 beta a = gamma} e^a)
            geo.accumulate(&mut minus[r][r], pa, &geo.neg(&geo.one()));
            let conj = grp.mul(grp.mul(grp.inv(a), beta), a);
            geo.accumulate(&mut minus[r][idx(geo.pos(conj))], pa, &geo.one());
            // second line
            geo.accumulate(&mut plus[r][r], pai, &geo.neg(&geo.one()));
            for &s in &c01 {
                let mid = grp.mul(grp.mul(grp.inv(a), grp.inv(s)), a);
                let gv = &metric.g[r][idx(geo.pos(mid))];
                let si = idx(geo.pos(grp.inv(s)));
                for col in 0..k {
                    let coeff = gv.mul(&gt[si][col].shift(grp, grp.inv(a)));
                    geo.accumulate(&mut plus[r][col], pai, &coeff);
                }
            }
        }
    }
    Ok((minus, plus))
}

/// `nabla_F e^a = sum dbar(g^{ab}) g~_{bc} (x) e^c`.
pub fn group_chern_f_closed(geo: &GroupGeometry, metric: &MetricData<GroupFunction>) -> Result<Christoffel<GroupFunction>, String> {
    let gt = metric.g_tilde.as_ref().ok_or("metric has no inverse")?;
    let k = metric.basis.len();
    let mut gamma = vec![vec![BTreeMap::new(); k]; k];
    for a in 0..k {
        for c in 0..k {
            let mut acc = BTreeMap::new();
            for b in 0..k {
                let db = geo.one_part(&geo.diff(&metric.g[a][b]), false);
                acc = geo.one_add(&acc, &geo.one_right(&db, &gt[b][c]));
            }
            gamma[a][c] = geo.one_neg(&acc);
        }
    }
    Ok(gamma)
}

/// Braidings stated for diagonal metrics:
/// `sigma_F(e^a (x) e^{b^-1}) = e^{a b^-1 a^-1} (x) e^a`,
/// `sigma_F(e^a (x) e^b) = g^{aa}/R_{aba^-1}(g^{aa}) e^{aba^-1} (x) e^a`,
/// `sigma_E(e^{b^-1} (x) e^a) = e^a (x) e^{a^-1 b^-1 a}`,
/// `sigma_E(e^{b^-1} (x) e^{a^-1}) = g^{b^-1 b^-1} R_{a^-1}(g~_{c c}) e^{a^-1} (x) e^c`,
/// `c = a b^-1 a^-1`.
pub fn group_sigma_formula(geo: &GroupGeometry, g_e: &MetricData<GroupFunction>, g_f: &MetricData<GroupFunction>) -> Result<Sigma<GroupFunction>, String> {
    let grp = geo.calc.group();
    let diag = |m: &MetricData<GroupFunction>, pos: usize| -> GroupFunction {
        let i = m.basis.iter().position(|&b| b == pos).expect("basis");
        m.g[i][i].clone()
    };
    let diag_inv = |m: &MetricData<GroupFunction>, pos: usize| -> Result<GroupFunction, String> {
        let i = m.basis.iter().position(|&b| b == pos).expect("basis");
        Ok(m.g_tilde.as_ref().ok_or("metric has no inverse")?[i][i].clone())
    };
    let mut values = BTreeMap::new();
    for i in 0..geo.dim() {
        let x = geo.elem_of(i);
        for j in 0..geo.dim() {
            let y = geo.elem_of(j);
            let t: Tensor2<GroupFunction> = if !geo.is_holomorphic(i) {
                let a = x;
                let c = grp.mul(grp.mul(a, y), grp.inv(a));
                let coeff = if geo.is_holomorphic(j) {
                    geo.one()
                } else {
                    let gaa = diag(g_f, i);
                    gaa.mul(&gaa.shift(grp, c).recip().ok_or("vanishing metric entry")?)
                };
                BTreeMap::from([((geo.pos(c), i), coeff)])
            } else if !geo.is_holomorphic(j) {
                let a = y;
                let c = grp.mul(grp.mul(grp.inv(a), x), a);
                BTreeMap::from([((j, geo.pos(c)), geo.one())])
            } else {
                let ai = y;
                let a = grp.inv(ai);
                let c = grp.mul(grp.mul(a, x), ai);
                let coeff = diag(g_e, i).mul(&diag_inv(g_e, geo.pos(c))?.shift(grp, ai));
                BTreeMap::from([((j, geo.pos(c)), coeff)])
            };
            let t = t.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            values.insert((i, j), t);
        }
    }
    Ok(Sigma { values })
}

/// `(e^a, e^{a^-1}) = -g^{aa}` from a diagonal doubled metric.
pub fn group_round_metric(geo: &GroupGeometry, metric: &MetricData<GroupFunction>) -> RoundMetric<GroupFunction> {
    let grp = geo.calc.group();
    let mut values = BTreeMap::new();
    for (r, &i) in metric.basis.iter().enumerate() {
        let j = geo.pos(grp.inv(geo.elem_of(i)));
        values.insert((i, j), metric.g[r][r].neg());
    }
    RoundMetric { values }
}

/// Edge symmetry between diagonal metrics on `F` and `E`, written as
/// `g^{a^-1 a^-1} = R_{a^-1}(g^{aa})` for `a` in `C01`.
pub fn edge_symmetry_check(geo: &GroupGeometry, g_e: &MetricData<GroupFunction>, g_f: &MetricData<GroupFunction>) -> Result<(), String> {
    let grp = geo.calc.group();
    for (r, &pa) in g_f.basis.iter().enumerate() {
        let a = geo.elem_of(pa);
        let ai = grp.inv(a);
        let re = g_e.basis.iter().position(|&b| b == geo.pos(ai)).ok_or("E basis incomplete")?;
        for (m, name) in [(g_e, "E"), (g_f, "F")] {
            for i in 0..m.basis.len() {
                for j in 0..m.basis.len() {
                    if i != j && !m.g[i][j].is_zero() {
                        return Err(format!("metric on {name} is not diagonal"));
                    }
                }
            }
        }
        let lhs = &g_e.g[re][re];
        let rhs = g_f.g[r][r].shift(grp, ai);
        if lhs != &rhs {
            return Err(format!("g^{{{0},{0}}} = {1} but R_{0}(g^{{{2},{2}}}) = {3}", grp.name(ai), lhs.text(), grp.name(a), rhs.text()));
        }
    }
    Ok(())
}

/// Random positive rational weights in `[1/den, num]`.
pub fn random_weights(rng: &mut impl rand::Rng, n: usize) -> GroupFunction {
    GroupFunction((0..n).map(|_| Q::new(rng.gen_range(1..=9).into(), rng.gen_range(1..=9).into())).collect())
}

/// Christoffel symbols compared entrywise.
pub fn christoffel_diff<G: Geometry>(geo: &G, a: &Christoffel<G::Elem>, b: &Christoffel<G::Elem>) -> Result<(), String> {
    for i in 0..a.len() {
        for k in 0..a.len() {
            if a[i][k] != b[i][k] {
                return Err(format!("entry ({i}, {k}): {} vs {}", geo.one_text(&a[i][k]), geo.one_text(&b[i][k])));
            }
        }
    }
    Ok(())
}

/// Kernel vector `(z, -q z*)` of the degenerate product metric, its matrix
/// and `g v`.
pub fn degenerate_metric(calc: &Calculus) -> (Vec<Vec<NCPoly>>, [NCPoly; 2], [NCPoly; 2]) {
    let minus = crate::qdolbeault::phi_minus_table(&crate::qdolbeault::eta_product());
    let plus = crate::qdolbeault::phi_plus_table(calc, &minus);
    let geo = PlaneGeometry::new(calc);
    let mut m = plane_hermitian_metric(&geo, &plus, &PlaneGeometry::holomorphic_basis());
    for row in m.g.iter_mut() {
        for e in row.iter_mut() {
            *e = calc.nf(e);
        }
    }
    let v = [NCPoly::generator(Z), NCPoly::monomial(vec![ZS], -Scalar::q())];
    let gv = [calc.nf(&calc.amul(&m.g[0][0], &v[0]).add(&calc.amul(&m.g[0][1], &v[1]))), calc.nf(&calc.amul(&m.g[1][0], &v[0]).add(&calc.amul(&m.g[1][1], &v[1])))];
    (m.g, v, gv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::groupdolbeault::{Flavor, GeneratorSplit};
    use crate::qdolbeault::{eta_constant, eta_q_epsilon, phi_minus_table, phi_plus_table, DBZ, DBZS, DZ, DZS};

    fn plane() -> Calculus {
        Calculus::build().unwrap()
    }

    fn tables(c: &Calculus) -> (PairTable, PairTable) {
        let minus = phi_minus_table(&eta_constant(&eta_q_epsilon()));
        let plus = phi_plus_table(c, &minus);
        (plus, minus)
    }

    fn k(c: Scalar) -> NCPoly {
        NCPoly::constant(c)
    }

    #[test]
    fn plane_metric_values() {
        let c = plane();
        let geo = PlaneGeometry::new(&c);
        let (plus, minus) = tables(&c);
        let gf = plane_hermitian_metric(&geo, &minus, &PlaneGeometry::antiholomorphic_basis());
        let ge = plane_hermitian_metric(&geo, &plus, &PlaneGeometry::holomorphic_basis());
        assert_eq!(gf.g, vec![vec![k(Scalar::s_pow(3)), NCPoly::zero()], vec![NCPoly::zero(), k(-Scalar::s_pow(1))]]);
        assert_eq!(ge.g, vec![vec![k(-Scalar::s_pow(3)), NCPoly::zero()], vec![NCPoly::zero(), k(Scalar::s_pow(1))]]);
        geo.verify_fgp(&gf).unwrap();
        geo.verify_fgp(&ge).unwrap();
    }

    #[test]
    fn plane_zero_connection() {
        let c = plane();
        let geo = PlaneGeometry::new(&c);
        let (plus, minus) = tables(&c);
        let gf = plane_hermitian_metric(&geo, &minus, &PlaneGeometry::antiholomorphic_basis());
        let ge = plane_hermitian_metric(&geo, &plus, &PlaneGeometry::holomorphic_basis());
        let (_, _, ne) = chern_e(&geo, &ge).unwrap();
        let (_, _, nf) = chern_f(&geo, &gf).unwrap();
        assert_eq!(ne, Connection::zero(vec![0, 1]));
        assert_eq!(nf, Connection::zero(vec![2, 3]));
        let conn = Connection::direct_sum(&ne, &nf);
        let metric = perpendicular_sum(&geo, &ge, &gf);
        geo.hermitian_check(&conn, &metric).unwrap();
        assert!(geo.torsion(&conn).iter().all(|t| t.is_zero()));
        let s = geo.sigma_from_connection(&conn).unwrap();
        for v in 0..2 {
            for u in 0..2 {
                let du = geo.t_add(&s.values[&(2 + v, u)], &s.values[&(2 + v, 2 + u)]);
                assert_eq!(du, plane_sigma_from_braiding(&geo, v, u, false), "sigma_F");
                let du = geo.t_add(&s.values[&(v, u)], &s.values[&(v, 2 + u)]);
                assert_eq!(du, plane_sigma_from_braiding(&geo, v, u, true), "sigma_E");
            }
        }
        geo.star_preservation_check(&conn, &s).unwrap();
        geo.sigma_dagger_check(&s, &[DBZ as usize, DBZS as usize]).unwrap();
        let inv = geo.invert_sigma(&s).unwrap();
        geo.round_preservation_check(&conn, &inv, &plane_round_metric(&plus, &minus)).unwrap();
    }

    #[test]
    fn plane_nonconstant_metric_fails_hermitian() {
        let c = plane();
        let geo = PlaneGeometry::new(&c);
        let g = vec![vec![NCPoly::word(&[Z, ZS]), NCPoly::zero()], vec![NCPoly::zero(), NCPoly::one()]];
        let m = MetricData { basis: vec![0, 1], g: g.clone(), g_tilde: None, p: vec![], hermitian: true };
        let err = geo.hermitian_check(&Connection::zero(vec![0, 1]), &m).unwrap_err();
        assert!(err.contains("(dz, dz)"), "{err}");
    }

    #[test]
    fn plane_corrupted_inverse_named() {
        let c = plane();
        let geo = PlaneGeometry::new(&c);
        let (plus, _) = tables(&c);
        let mut ge = plane_hermitian_metric(&geo, &plus, &PlaneGeometry::holomorphic_basis());
        ge.g_tilde.as_mut().unwrap()[0][0] = NCPoly::one();
        let err = geo.verify_fgp(&ge).unwrap_err();
        assert!(err.starts_with("g g~ = P"), "{err}");
    }

    #[test]
    fn plane_zero_connection_with_varying_round_metric_fails() {
        let c = plane();
        let geo = PlaneGeometry::new(&c);
        let (plus, minus) = tables(&c);
        let conn = Connection::direct_sum(&Connection::zero(vec![0, 1]), &Connection::zero(vec![2, 3]));
        let s = geo.sigma_from_connection(&conn).unwrap();
        let inv = geo.invert_sigma(&s).unwrap();
        let mut rm = plane_round_metric(&plus, &minus);
        rm.values.insert((DBZ as usize, DZ as usize), NCPoly::word(&[Z]));
        assert!(geo.round_preservation_check(&conn, &inv, &rm).is_err());
        let _ = DZS;
    }

    #[test]
    fn degenerate_kernel() {
        let c = plane();
        let (g, _, gv) = degenerate_metric(&c);
        let q2 = Scalar::q_pow(-2);
        assert_eq!(g[0][0], NCPoly::monomial(vec![Z, ZS], q2.clone()));
        assert_eq!(g[0][1], NCPoly::monomial(vec![Z, Z], q2.clone()));
        assert_eq!(g[1][0], NCPoly::monomial(vec![ZS, ZS], q2.clone()));
        assert_eq!(g[1][1], c.nf(&NCPoly::monomial(vec![ZS, Z], q2)));
        assert!(gv[0].is_zero() && gv[1].is_zero());
    }

    fn zn(n: usize) -> GroupCalculus {
        let g = FiniteGroup::cyclic(n);
        let s = GeneratorSplit::cyclic(&g);
        GroupCalculus::build(g, s, Flavor::LL).unwrap().factorise().unwrap().0
    }

    #[test]
    fn cyclic_chern_pair() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 3..=8 {
            let calc = zn(n);
            let geo = GroupGeometry::new(&calc);
            let grp = calc.group();
            let (plus, minus) = (geo.pos(1), geo.pos(n - 1));
            let g_minus = random_weights(&mut rng, n);
            let g_plus = g_minus.shift(grp, 1);
            let ge = group_diagonal_metric(&geo, vec![plus], &[g_plus.recip().unwrap()]);
            let gf = group_diagonal_metric(&geo, vec![minus], &[g_minus.recip().unwrap()]);
            edge_symmetry_check(&geo, &ge, &gf).unwrap();
            let (m_, p_, ne) = chern_e(&geo, &ge).unwrap();
            let (cm, cp) = group_chern_e_closed(&geo, &ge).unwrap();
            christoffel_diff(&geo, &m_, &cm).unwrap();
            christoffel_diff(&geo, &p_, &cp).unwrap();
            let (_, _, nf) = chern_f(&geo, &gf).unwrap();
            christoffel_diff(&geo, &nf.gamma, &group_chern_f_closed(&geo, &gf).unwrap()).unwrap();
            // (1 - rho) e (x) e
            for (conn, pos, a) in [(&ne, plus, 1), (&nf, minus, n - 1)] {
                let gaa = if pos == plus { &ge.g[0][0] } else { &gf.g[0][0] };
                let rho = gaa.mul(&gaa.shift(grp, a).recip().unwrap());
                let expect: Tensor2<GroupFunction> = BTreeMap::from([((pos, pos), geo.one().sub(&rho))]);
                assert_eq!(geo.nabla(conn, &geo.basis1(pos)).unwrap(), expect);
            }
            let conn = Connection::direct_sum(&ne, &nf);
            let s = geo.sigma_from_connection(&conn).unwrap();
            assert_eq!(s, group_sigma_formula(&geo, &ge, &gf).unwrap());
            let metric = perpendicular_sum(&geo, &ge, &gf);
            geo.hermitian_check(&conn, &metric).unwrap();
            geo.star_preservation_check(&conn, &s).unwrap();
            let inv = geo.invert_sigma(&s).unwrap();
            geo.round_preservation_check(&conn, &inv, &group_round_metric(&geo, &metric)).unwrap();
        }
    }

    fn a4(flavor: Flavor) -> GroupCalculus {
        let g = FiniteGroup::a4();
        let s = GeneratorSplit::a4(&g);
        GroupCalculus::build(g, s, flavor).unwrap().factorise().unwrap().0
    }

    fn euclidean(geo: &GroupGeometry, basis: Vec<usize>) -> MetricData<GroupFunction> {
        let w = vec![geo.one(); basis.len()];
        group_diagonal_metric(geo, basis, &w)
    }

    fn random_symmetric(geo: &GroupGeometry, basis: Vec<usize>, rng: &mut impl rand::Rng) -> MetricData<GroupFunction> {
        let k = basis.len();
        let n = geo.calc.group().order();
        let mut g = vec![vec![geo.zero(); k]; k];
        for i in 0..k {
            g[i][i] = GroupFunction((0..n).map(|_| Q::from_integer((10 + rng.gen_range(0..10)).into())).collect());
            for j in 0..i {
                let f = random_weights(rng, n);
                g[i][j] = f.clone();
                g[j][i] = f;
            }
        }
        geo.metric(basis, g, true)
    }

    #[test]
    fn a4_chern_paths_agree() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for flavor in [Flavor::LL, Flavor::Wor] {
            let calc = a4(flavor);
            let geo = GroupGeometry::new(&calc);
            let eb = geo.holomorphic_basis();
            let fb = geo.antiholomorphic_basis();
            let weights: Vec<GroupFunction> = eb.iter().map(|_| random_weights(&mut rng, 12)).collect();
            let metrics = [euclidean(&geo, eb.clone()), group_diagonal_metric(&geo, eb.clone(), &weights), random_symmetric(&geo, eb.clone(), &mut rng)];
            for ge in &metrics {
                geo.verify_fgp(ge).unwrap();
                let (m_, p_, ne) = chern_e(&geo, ge).unwrap();
                let (cm, cp) = group_chern_e_closed(&geo, ge).unwrap();
                christoffel_diff(&geo, &m_, &cm).unwrap();
                christoffel_diff(&geo, &p_, &cp).unwrap();
                geo.hermitian_check(&ne, ge).unwrap();
                assert!(geo.holomorphic_curvature(&m_).iter().flatten().all(|x| x.is_zero()));
            }
            let gf = random_symmetric(&geo, fb.clone(), &mut rng);
            let (_, _, nf) = chern_f(&geo, &gf).unwrap();
            christoffel_diff(&geo, &nf.gamma, &group_chern_f_closed(&geo, &gf).unwrap()).unwrap();
            geo.hermitian_check(&nf, &gf).unwrap();
        }
    }

    #[test]
    fn a4_wor_euclidean_torsion_is_theta_wedge() {
        let calc = a4(Flavor::Wor);
        let geo = GroupGeometry::new(&calc);
        let eb = geo.holomorphic_basis();
        let (_, _, ne) = chern_e(&geo, &euclidean(&geo, eb.clone())).unwrap();
        let theta = calc.theta(Some(true));
        for (t, &i) in geo.torsion(&ne).iter().zip(&eb) {
            assert_eq!(*t, calc.mul(&theta, &calc.basic(i)));
            assert!(!t.is_zero());
        }
    }

    #[test]
    fn a4_ll_euclidean_torsion_is_not_theta_wedge() {
        let calc = a4(Flavor::LL);
        let geo = GroupGeometry::new(&calc);
        let eb = geo.holomorphic_basis();
        let (_, _, ne) = chern_e(&geo, &euclidean(&geo, eb.clone())).unwrap();
        let theta = calc.theta(Some(true));
        let t = geo.torsion(&ne);
        assert_ne!(t[0], calc.mul(&theta, &calc.basic(eb[0])));
    }

    #[test]
    fn a4_sigma_matches_diagonal_formulas() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let calc = a4(Flavor::Wor);
        let geo = GroupGeometry::new(&calc);
        let eb = geo.holomorphic_basis();
        let fb = geo.antiholomorphic_basis();
        let we: Vec<GroupFunction> = eb.iter().map(|_| random_weights(&mut rng, 12)).collect();
        let wf: Vec<GroupFunction> = fb.iter().map(|_| random_weights(&mut rng, 12)).collect();
        let ge = group_diagonal_metric(&geo, eb, &we);
        let gf = group_diagonal_metric(&geo, fb, &wf);
        let (_, _, ne) = chern_e(&geo, &ge).unwrap();
        let (_, _, nf) = chern_f(&geo, &gf).unwrap();
        let conn = Connection::direct_sum(&ne, &nf);
        let s = geo.sigma_from_connection(&conn).unwrap();
        assert_eq!(s, group_sigma_formula(&geo, &ge, &gf).unwrap());
        geo.hermitian_check(&conn, &perpendicular_sum(&geo, &ge, &gf)).unwrap();
    }

    #[test]
    fn a4_constant_f_metric_gives_conjugation_braiding() {
        let calc = a4(Flavor::Wor);
        let geo = GroupGeometry::new(&calc);
        let fb = geo.antiholomorphic_basis();
        let grp = calc.group();
        let (_, _, nf) = chern_f(&geo, &euclidean(&geo, fb.clone())).unwrap();
        assert_eq!(nf, Connection::zero(fb.clone()));
        let s = geo.sigma_from_connection(&nf).unwrap();
        for &i in &fb {
            for &j in &fb {
                let (a, b) = (geo.elem_of(i), geo.elem_of(j));
                let c = geo.pos(grp.mul(grp.mul(a, b), grp.inv(a)));
                assert_eq!(s.values[&(i, j)], BTreeMap::from([((c, i), geo.one())]));
            }
        }
    }

    // the doubled Euclidean Chern connection on A4 is not *-preserving:
    // sigma_E braids by inverse conjugation where dagger sigma_F^-1 dagger
    // braids by conjugation
    #[test]
    fn a4_doubled_euclidean_is_not_star_preserving() {
        let calc = a4(Flavor::Wor);
        let geo = GroupGeometry::new(&calc);
        let ge = euclidean(&geo, geo.holomorphic_basis());
        let gf = euclidean(&geo, geo.antiholomorphic_basis());
        let conn = Connection::direct_sum(&chern_e(&geo, &ge).unwrap().2, &chern_f(&geo, &gf).unwrap().2);
        let s = geo.sigma_from_connection(&conn).unwrap();
        let err = geo.star_preservation_check(&conn, &s).unwrap_err();
        assert!(err.contains("sigma dagger sigma"), "{err}");
    }

    #[test]
    fn cyclic_constant_metric_is_torsion_free() {
        for n in 3..=6 {
            let calc = zn(n);
            let geo = GroupGeometry::new(&calc);
            let ge = euclidean(&geo, geo.holomorphic_basis());
            let gf = euclidean(&geo, geo.antiholomorphic_basis());
            let conn = Connection::direct_sum(&chern_e(&geo, &ge).unwrap().2, &chern_f(&geo, &gf).unwrap().2);
            assert!(geo.torsion(&conn).iter().all(|t| t.is_zero()));
        }
    }

    #[test]
    fn cyclic_negative_controls() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let calc = zn(5);
        let geo = GroupGeometry::new(&calc);
        let (plus, minus) = (geo.pos(1), geo.pos(4));
        let g_minus = random_weights(&mut rng, 5);
        let mut g_plus = g_minus.shift(calc.group(), 1);
        g_plus.0[0] = g_plus.0[0].clone() + Q::one();
        let ge = group_diagonal_metric(&geo, vec![plus], &[g_plus.recip().unwrap()]);
        let gf = group_diagonal_metric(&geo, vec![minus], &[g_minus.recip().unwrap()]);
        assert!(edge_symmetry_check(&geo, &ge, &gf).is_err());
        let conn = Connection::direct_sum(&chern_e(&geo, &ge).unwrap().2, &chern_f(&geo, &gf).unwrap().2);
        let mut s = geo.sigma_from_connection(&conn).unwrap();
        let t = s.values.get_mut(&(plus, minus)).unwrap();
        for v in t.values_mut() {
            *v = v.neg();
        }
        assert!(geo.star_preservation_check(&conn, &s).is_err());
    }

    #[test]
    fn plane_holomorphic_curvature_and_factorisation() {
        let c = plane();
        let geo = PlaneGeometry::new(&c);
        let minus = holomorphic_structure(&geo, &PlaneGeometry::holomorphic_basis()).unwrap();
        assert!(minus.iter().flatten().all(|x| x.is_empty()));
        assert!(geo.holomorphic_curvature(&minus).iter().flatten().all(|x| x.is_zero()));
        // dbz ^ dz factorises back to itself in either order
        let w = geo.wedge(DBZ as usize, DZ as usize);
        let t = geo.factor_11(&w, true).unwrap();
        assert_eq!(t, BTreeMap::from([((DBZ as usize, DZ as usize), NCPoly::one())]));
        let back = geo.t_wedge(&geo.factor_11(&w, false).unwrap());
        assert_eq!(back, w);
    }
}
