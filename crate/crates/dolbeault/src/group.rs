//! Finite groups from multiplication tables or permutation generators, and
//! functions on them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("bad permutation {0:?}")]
    BadPermutation(String),
    #[error("table is not a group: {0}")]
    NotAGroup(String),
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("unknown preset {0}")]
    UnknownPreset(String),
}

/// Permutation of `{0, ..., n-1}` as its image list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// Parse cycle notation on points `1..=n`, e.g. `"(1 2 3)(4 5)"` or `"()"`.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Self, GroupError> {
        let bad = || GroupError::BadPermutation(text.to_string());
        let mut img: Vec<usize> = (0..n).collect();
        let mut seen = BTreeSet::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let pts: Vec<usize> = body[..close]
                .split(|c: char| c == ' ' || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            for &p in &pts {
                if p == 0 || p > n || !seen.insert(p) {
                    return Err(bad());
                }
            }
            for k in 0..pts.len() {
                img[pts[k] - 1] = pts[(k + 1) % pts.len()] - 1;
            }
            rest = body[close + 1..].trim_start();
        }
        Ok(Perm(img))
    }

    /// `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            out[j] = i;
        }
        Perm(out)
    }
}

/// Group on indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    /// Validate a multiplication table. Associativity is checked on all
    /// triples when the order is at most 24, otherwise on a fixed sample.
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = names.len();
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(GroupError::NotAGroup("table shape".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| GroupError::NotAGroup("no identity".into()))?;
        let mut inv = vec![0; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| GroupError::NotAGroup(format!("{} has no inverse", names[a])))?;
        }
        let triples: Box<dyn Iterator<Item = (usize, usize, usize)>> = if n <= 24 {
            Box::new((0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c)))))
        } else {
            Box::new((0..n).map(move |a| (a, (a * 7 + 3) % n, (a * 13 + 5) % n)))
        };
        for (a, b, c) in triples {
            if table[table[a][b]][c] != table[a][table[b][c]] {
                return Err(GroupError::NotAGroup(format!("({} {}) {} not associative", names[a], names[b], names[c])));
            }
        }
        Ok(FiniteGroup { names, table, inv, identity })
    }

    /// Closure of named permutations. The identity is named `e`, the
    /// generators keep their names, inverses of named elements are named
    /// `name^-1` and anything else by the product that first reached it.
    pub fn from_permutations(gens: &[(String, Perm)]) -> Result<Self, GroupError> {
        let degree = gens.first().map(|g| g.1 .0.len()).unwrap_or(0);
        if gens.iter().any(|g| g.1 .0.len() != degree) {
            return Err(GroupError::BadPermutation("mixed degrees".into()));
        }
        let mut elems: Vec<Perm> = vec![Perm::identity(degree)];
        let mut names: Vec<Option<String>> = vec![Some("e".into())];
        let mut index: BTreeMap<Perm, usize> = BTreeMap::new();
        index.insert(elems[0].clone(), 0);
        for (name, p) in gens {
            match index.get(p) {
                Some(&k) => {
                    if names[k].is_none() {
                        names[k] = Some(name.clone());
                    }
                }
                None => {
                    index.insert(p.clone(), elems.len());
                    elems.push(p.clone());
                    names.push(Some(name.clone()));
                }
            }
        }
        let mut words: Vec<String> = names.iter().map(|n| n.clone().unwrap()).collect();
        let mut queue: VecDeque<usize> = (0..elems.len()).collect();
        while let Some(k) = queue.pop_front() {
            for (gname, g) in gens {
                let p = elems[k].compose(g);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elems.len());
                    words.push(format!("{}*{}", words[k], gname));
                    elems.push(p);
                    names.push(None);
                    queue.push_back(elems.len() - 1);
                }
            }
        }
        for k in 0..elems.len() {
            if names[k].is_none() {
                let inv = index[&elems[k].inverse()];
                if let Some(base) = names[inv].clone().filter(|b| !b.ends_with("^-1")) {
                    names[k] = Some(format!("{base}^-1"));
                }
            }
        }
        let names: Vec<String> = names.into_iter().zip(words).map(|(n, w)| n.unwrap_or(w)).collect();
        let table = elems.iter().map(|a| elems.iter().map(|b| index[&a.compose(b)]).collect()).collect();
        FiniteGroup::from_table(names, table)
    }

    /// The alternating group on 4 points with generators
    /// `t=(123), u=(14)(23), v=(12)(34), w=(13)(24), x=(134), y=(243), z=(142)`.
    pub fn a4() -> Self {
        let gens: Vec<(String, Perm)> = [
            ("t", "(1 2 3)"),
            ("u", "(1 4)(2 3)"),
            ("v", "(1 2)(3 4)"),
            ("w", "(1 3)(2 4)"),
            ("x", "(1 3 4)"),
            ("y", "(2 4 3)"),
            ("z", "(1 4 2)"),
        ]
        .iter()
        .map(|(n, c)| (n.to_string(), Perm::parse_cycles(c, 4).expect("valid cycle")))
        .collect();
        FiniteGroup::from_permutations(&gens).expect("A4 closes")
    }

    /// `Z/n` with elements named by residues.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|k| k.to_string()).collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_table(names, table).expect("cyclic group")
    }

    pub fn preset(name: &str) -> Result<Self, GroupError> {
        match name {
            "a4" | "A4" => Ok(FiniteGroup::a4()),
            _ => {
                if let Some(n) = name.strip_prefix('z').or_else(|| name.strip_prefix('Z')) {
                    if let Ok(n) = n.parse::<usize>() {
                        if n >= 1 {
                            return Ok(FiniteGroup::cyclic(n));
                        }
                    }
                }
                Err(GroupError::UnknownPreset(name.into()))
            }
        }
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// `a b a^-1`.
    pub fn conj(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.inv(a))
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize, GroupError> {
        self.names.iter().position(|n| n == name).ok_or_else(|| GroupError::UnknownElement(name.into()))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn conjugacy_class(&self, a: usize) -> BTreeSet<usize> {
        (0..self.order()).map(|g| self.conj(g, a)).collect()
    }

    pub fn conjugacy_classes(&self) -> Vec<BTreeSet<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for a in 0..self.order() {
            if seen.contains(&a) {
                continue;
            }
            let c = self.conjugacy_class(a);
            seen.extend(c.iter().copied());
            out.push(c);
        }
        out
    }

    pub fn is_union_of_classes(&self, set: &[usize]) -> bool {
        set.iter().all(|&a| self.conjugacy_class(a).iter().all(|b| set.contains(b)))
    }
}

/// Function on a group, `f(g)` at index `g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupFunction(pub Vec<Q>);

impl GroupFunction {
    pub fn zero(n: usize) -> Self {
        GroupFunction(vec![Q::zero(); n])
    }

    pub fn constant(n: usize, c: Q) -> Self {
        GroupFunction(vec![c; n])
    }

    pub fn one(n: usize) -> Self {
        GroupFunction::constant(n, Q::one())
    }

    pub fn delta(n: usize, g: usize) -> Self {
        let mut f = GroupFunction::zero(n);
        f.0[g] = Q::one();
        f
    }

    pub fn from_ints(v: &[i64]) -> Self {
        GroupFunction(v.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        GroupFunction(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        GroupFunction(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        GroupFunction(self.0.iter().zip(&o.0).map(|(a, b)| a * b).collect())
    }

    pub fn neg(&self) -> Self {
        GroupFunction(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: &Q) -> Self {
        GroupFunction(self.0.iter().map(|a| a * c).collect())
    }

    /// Pointwise inverse; `None` if some value vanishes.
    pub fn recip(&self) -> Option<Self> {
        self.0.iter().map(|a| if a.is_zero() { None } else { Some(a.recip()) }).collect::<Option<Vec<_>>>().map(GroupFunction)
    }

    /// `R_a(f)(g) = f(g a)`.
    pub fn shift(&self, g: &FiniteGroup, a: usize) -> Self {
        GroupFunction((0..g.order()).map(|x| self.0[g.mul(x, a)].clone()).collect())
    }

    pub fn text(&self) -> String {
        format!("[{}]", self.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a4_generator_products() {
        let g = FiniteGroup::a4();
        assert_eq!(g.order(), 12);
        let e = |n: &str| g.index_of(n).unwrap();
        assert_eq!(g.mul(e("t"), e("v")), e("x"));
        assert_eq!(g.mul(e("u"), e("t")), e("x"));
        assert_eq!(g.mul(e("t"), e("w")), e("y"));
        assert_eq!(g.mul(e("v"), e("t")), e("y"));
        assert_eq!(g.mul(e("t"), e("u")), e("z"));
        assert_eq!(g.mul(e("w"), e("t")), e("z"));
        for n in ["t^-1", "x^-1", "y^-1", "z^-1"] {
            assert!(g.index_of(n).is_ok());
        }
    }

    #[test]
    fn a4_classes() {
        let g = FiniteGroup::a4();
        let c01: Vec<usize> = ["t", "x", "y", "z"].iter().map(|n| g.index_of(n).unwrap()).collect();
        assert!(g.is_union_of_classes(&c01));
        assert_eq!(g.conjugacy_classes().len(), 4);
        assert!(!g.is_abelian());
    }

    #[test]
    fn cycle_parsing() {
        let p = Perm::parse_cycles("(1 2 3)", 3).unwrap();
        assert_eq!(p.0, vec![1, 2, 0]);
        assert!(Perm::parse_cycles("(1 1)", 3).is_err());
        assert!(Perm::parse_cycles("(1 2", 3).is_err());
    }

    #[test]
    fn rejects_non_group() {
        let t = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::from_table(vec!["a".into(), "b".into()], t).is_err());
    }

    #[test]
    fn shift_convention() {
        let g = FiniteGroup::cyclic(5);
        let f = GroupFunction::from_ints(&[0, 1, 2, 3, 4]);
        assert_eq!(f.shift(&g, 1), GroupFunction::from_ints(&[1, 2, 3, 4, 0]));
    }
}
