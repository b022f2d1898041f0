//! Braided vector spaces, braided integers and factorials, and the graded
//! dimensions of the braided symmetric and exterior algebras.

use thiserror::Error;

use crate::linalg::Matrix;
use crate::ncalg::{NCPoly, RewriteSystem};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("braiding matrix must be {expected}x{expected}, got {rows}x{cols}")]
    Shape { expected: usize, rows: usize, cols: usize },
    #[error("braiding is not invertible")]
    Singular,
    #[error("braid relation fails on V^3")]
    BraidRelation,
}

/// Graded dimensions, indexed by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedDims(pub Vec<usize>);

/// `V` with basis labels and `Psi` on `V (x) V`. Basis of `V^{(x)n}` is
/// lexicographic in the label indices; columns of a matrix are inputs.
#[derive(Debug, Clone)]
pub struct BraidedSpace {
    labels: Vec<String>,
    psi: Matrix<Scalar>,
    psi_inv: Matrix<Scalar>,
}

impl BraidedSpace {
    pub fn new(labels: Vec<String>, psi: Matrix<Scalar>) -> Result<Self, BraidError> {
        let n = labels.len();
        if psi.rows() != n * n || psi.cols() != n * n {
            return Err(BraidError::Shape { expected: n * n, rows: psi.rows(), cols: psi.cols() });
        }
        let psi_inv = psi.inverse().ok_or(BraidError::Singular)?;
        let space = BraidedSpace { labels, psi, psi_inv };
        if !space.braid_relation_holds() {
            return Err(BraidError::BraidRelation);
        }
        Ok(space)
    }

    /// Braiding from a bijection on basis pairs with scalar weights:
    /// `Psi(e_a (x) e_b) = w(a, b) e_c (x) e_d`.
    pub fn from_pair_map(labels: Vec<String>, f: impl Fn(usize, usize) -> (usize, usize, Scalar)) -> Result<Self, BraidError> {
        let n = labels.len();
        let mut psi = Matrix::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                let (c, d, w) = f(a, b);
                psi.set(c * n + d, a * n + b, w);
            }
        }
        BraidedSpace::new(labels, psi)
    }

    /// Basis `(z, w)` with `Psi(z z) = q^2 z z`, `Psi(w w) = q^2 w w`,
    /// `Psi(z w) = q w z`, `Psi(w z) = q z w + (q^2 - 1) w z`.
    pub fn qplane() -> Self {
        let q = Scalar::q();
        let q2 = Scalar::q_pow(2);
        let mut psi = Matrix::zeros(4, 4);
        psi.set(0, 0, q2.clone());
        psi.set(2, 1, q.clone());
        psi.set(1, 2, q);
        psi.set(2, 2, &q2 - &Scalar::one());
        psi.set(3, 3, q2);
        BraidedSpace::new(vec!["z".into(), "w".into()], psi).expect("quantum plane braiding is valid")
    }

    /// The vector-space flip on a space of dimension `n`.
    pub fn flip(n: usize) -> Self {
        let labels = (0..n).map(|i| format!("e{i}")).collect();
        BraidedSpace::from_pair_map(labels, |a, b| (b, a, Scalar::one())).expect("flip is a braiding")
    }

    /// One-dimensional space with `Psi = lambda id`.
    pub fn scalar(lambda: Scalar) -> Result<Self, BraidError> {
        BraidedSpace::new(vec!["e".into()], Matrix::from_rows(vec![vec![lambda]], 1))
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn psi(&self) -> &Matrix<Scalar> {
        &self.psi
    }

    pub fn psi_inv(&self) -> &Matrix<Scalar> {
        &self.psi_inv
    }

    fn id_pow(&self, k: usize) -> Matrix<Scalar> {
        Matrix::identity(self.dim().pow(k as u32))
    }

    /// `Psi` acting in slots `(k, k+1)` of `V^{(x)n}`, `1 <= k < n`.
    pub fn psi_at(&self, k: usize, n: usize) -> Matrix<Scalar> {
        assert!(k >= 1 && k < n);
        self.id_pow(k - 1).kron(&self.psi).kron(&self.id_pow(n - k - 1))
    }

    pub fn braid_relation_holds(&self) -> bool {
        let a = self.psi_at(1, 3);
        let b = self.psi_at(2, 3);
        a.mul(&b).mul(&a) == b.mul(&a).mul(&b)
    }

    /// `(Psi - q^2)(Psi + 1)`.
    pub fn hecke_defect(&self) -> Matrix<Scalar> {
        let id = self.id_pow(2);
        let a = self.psi.sub(&id.scale(&Scalar::q_pow(2)));
        let b = self.psi.add(&id);
        a.mul(&b)
    }

    /// `[n, Psi] = id + Psi_{n-1} + Psi_{n-1} Psi_{n-2} + ... + Psi_{n-1} ... Psi_1`.
    pub fn braided_integer(&self, n: usize) -> Matrix<Scalar> {
        assert!(n >= 1);
        let mut term = self.id_pow(n);
        let mut acc = term.clone();
        for j in 0..n - 1 {
            term = term.mul(&self.psi_at(n - j - 1, n));
            acc = acc.add(&term);
        }
        acc
    }

    /// `[n, Psi]! = ([n-1, Psi]! (x) id) [n, Psi]`, `[1, Psi]! = id`.
    pub fn braided_factorial(&self, n: usize) -> Matrix<Scalar> {
        assert!(n >= 1);
        let mut f = self.id_pow(1);
        for k in 2..=n {
            f = f.kron(&self.id_pow(1)).mul(&self.braided_integer(k));
        }
        f
    }

    /// Graded dimensions of `TV / (+)_n ker [n, Psi]!`.
    pub fn sym_dims(&self, max_n: usize) -> GradedDims {
        let mut dims = vec![1];
        for n in 1..=max_n {
            dims.push(self.braided_factorial(n).rank());
        }
        GradedDims(dims)
    }

    /// Spanning matrix (columns) of the degree-`n` slice of the ideal
    /// generated by `Im(id + Psi)`.
    fn ideal_slice(&self, n: usize) -> Matrix<Scalar> {
        let gen = self.psi.add(&self.id_pow(2));
        let total = self.dim().pow(n as u32);
        let mut cols: Vec<Vec<Scalar>> = Vec::new();
        for k in 0..=n - 2 {
            let m = self.id_pow(k).kron(&gen).kron(&self.id_pow(n - 2 - k));
            for c in 0..m.cols() {
                let col = m.column(c);
                if col.iter().any(|x| !x.is_zero()) {
                    cols.push(col);
                }
            }
        }
        Matrix::from_rows(cols, total)
    }

    /// Graded dimensions of `TV / <Im(id + Psi)>`.
    pub fn ext_dims(&self, max_n: usize) -> GradedDims {
        let mut dims = vec![1];
        for n in 1..=max_n {
            let total = self.dim().pow(n as u32);
            if n == 1 {
                dims.push(total);
                continue;
            }
            dims.push(total - self.ideal_slice(n).rank());
        }
        GradedDims(dims)
    }

    /// Dimensions of `ker(id + Psi)` and `ker(id - Psi)` on `V (x) V`.
    pub fn degree_two_kernels(&self) -> (usize, usize) {
        let id = self.id_pow(2);
        let total = id.cols();
        (total - self.psi.add(&id).rank(), total - id.sub(&self.psi).rank())
    }
}

/// Degree-2 relations of the quantum-plane braiding, i.e. the kernel of
/// `[2, Psi]!`, written over `z, z*` through `w = q^(-1/2) z*` and reduced
/// by the quantum-plane rewriting system. Returns the relations and their
/// normal forms (all zero when the two presentations agree).
pub fn qplane_relations_in_quantum_plane(space: &BraidedSpace, rs: &RewriteSystem) -> Vec<(NCPoly, NCPoly)> {
    let (_, kernel) = space.braided_factorial(2).rank_kernel();
    let letter = |i: usize| match i {
        0 => NCPoly::generator(0),
        _ => NCPoly::monomial(vec![1], Scalar::s_pow(-1)),
    };
    kernel
        .iter()
        .map(|v| {
            let mut rel = NCPoly::zero();
            for (idx, c) in v.iter().enumerate() {
                let (i, j) = (idx / 2, idx % 2);
                rel.add_scaled(&letter(i).mul(&letter(j)), c);
            }
            let nf = rs.normal_form(&rel);
            (rel, nf)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qplane_entries() {
        let b = BraidedSpace::qplane();
        assert_eq!(b.psi().get(0, 0), &Scalar::q_pow(2));
        assert_eq!(b.psi().get(1, 2), &Scalar::q());
        assert!(b.hecke_defect().is_zero());
    }

    #[test]
    fn small_integers() {
        let b = BraidedSpace::qplane();
        assert_eq!(b.braided_integer(1), Matrix::identity(2));
        assert_eq!(b.braided_integer(2), b.psi().add(&Matrix::identity(4)));
        assert_eq!(b.braided_factorial(2), b.braided_integer(2));
    }

    #[test]
    fn degree_two_kernel_vector() {
        let b = BraidedSpace::qplane();
        let (r, k) = b.braided_factorial(2).rank_kernel();
        assert_eq!((r, k.len()), (3, 1));
        let v = &k[0];
        // proportional to z w - q^-1 w z
        let ratio = v[2].div(&v[1]).unwrap();
        assert_eq!(ratio, -Scalar::q_pow(-1));
        assert!(v[0].is_zero() && v[3].is_zero());
    }

    #[test]
    fn classical_factorial() {
        let b = BraidedSpace::flip(1);
        assert_eq!(b.braided_factorial(4), Matrix::identity(1).scale(&Scalar::from_int(24)));
        assert_eq!(BraidedSpace::flip(2).ext_dims(3), GradedDims(vec![1, 2, 1, 0]));
    }

    #[test]
    fn naturality() {
        let b = BraidedSpace::qplane();
        let rs = RewriteSystem::quantum_plane();
        let rels = qplane_relations_in_quantum_plane(&b, &rs);
        assert_eq!(rels.len(), 1);
        assert!(!rels[0].0.is_zero());
        assert!(rels[0].1.is_zero());
    }

    #[test]
    fn rejects_non_braiding() {
        let mut m = Matrix::identity(4);
        m.set(0, 1, Scalar::one());
        m.set(1, 0, Scalar::from_int(2));
        assert!(BraidedSpace::new(vec!["a".into(), "b".into()], m).is_err());
    }
}
