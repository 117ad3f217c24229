//! Dense complex matrices on `2^K` dimensions and the small amount of
//! Hermitian linear algebra the analysis needs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{DfsError, Result};
use crate::pauli::{phase_value, PauliElement};

/// Column state vector of length `2^K`, amplitudes in computational-basis order.
pub type Ket = DVector<Complex64>;

/// Largest qubit count for which dense `2^K x 2^K` operators are built by default.
pub const DEFAULT_DENSE_LIMIT: usize = 12;

pub(crate) fn check_dense(n_qubits: usize, limit: usize) -> Result<()> {
    if n_qubits > limit || n_qubits >= usize::BITS as usize - 1 {
        return Err(DfsError::DenseLimit { n_qubits, limit });
    }
    Ok(())
}

/// `2^K x 2^K` complex operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(DfsError::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(DenseOperator { n_qubits, matrix })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        DenseOperator {
            n_qubits,
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        DenseOperator {
            n_qubits,
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    /// Natural representation of `p`: the tensor product of its letters times `i^phase`.
    pub fn from_pauli(p: &PauliElement, dense_limit: usize) -> Result<Self> {
        check_dense(p.n_qubits(), dense_limit)?;
        let n = p.n_qubits();
        let dim = 1usize << n;
        let mut matrix = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let (row, k) = p.act_on_basis(col as u64);
            matrix[(row as usize, col)] = phase_value(k);
        }
        Ok(DenseOperator { n_qubits: n, matrix })
    }

    /// Adds `coeff · p` in place without materializing `p`.
    pub fn add_pauli(&mut self, coeff: Complex64, p: &PauliElement) {
        debug_assert_eq!(p.n_qubits(), self.n_qubits);
        for col in 0..self.dim() {
            let (row, k) = p.act_on_basis(col as u64);
            self.matrix[(row as usize, col)] += coeff * phase_value(k);
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * factor,
        }
    }

    pub fn apply(&self, ket: &Ket) -> Ket {
        &self.matrix * ket
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = &self.matrix * self.matrix.adjoint();
        max_abs_diff(&prod, &DMatrix::identity(self.dim(), self.dim())) < tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs_diff(&self.matrix, &self.matrix.adjoint()) < tol
    }
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending with
/// eigenvectors in matching columns.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// `S^{-1/2}` of a positive-definite Hermitian `S`, together with its smallest eigenvalue.
pub fn inverse_sqrt_hermitian(s: &DMatrix<Complex64>) -> (DMatrix<Complex64>, f64) {
    let (values, vectors) = hermitian_eigen(s);
    let min = values.first().copied().unwrap_or(0.0);
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values
            .iter()
            .map(|&v| Complex64::new(1.0 / v.max(f64::MIN_POSITIVE).sqrt(), 0.0)),
    ));
    (&vectors * diag * vectors.adjoint(), min)
}

/// Orthonormal basis (as columns) of the null space of `b`: the eigenvectors of
/// `b†b` whose eigenvalue is below `tol`.
pub fn null_space(b: &DMatrix<Complex64>, tol: f64) -> DMatrix<Complex64> {
    let gram = b.adjoint() * b;
    let (values, vectors) = hermitian_eigen(&gram);
    let cols: Vec<_> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < tol)
        .map(|(i, _)| vectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(b.ncols(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Numerical rank of a Hermitian matrix: eigenvalues with modulus above `tol`.
pub fn hermitian_rank(m: &DMatrix<Complex64>, tol: f64) -> usize {
    hermitian_eigen(m).0.iter().filter(|v| v.abs() > tol).count()
}

/// Gram-Schmidt with one re-orthogonalization pass. Candidates whose residual
/// norm falls below `null_tol` are dropped.
pub fn orthonormalize<'a>(candidates: impl IntoIterator<Item = &'a Ket>, null_tol: f64) -> Vec<Ket> {
    let mut basis: Vec<Ket> = Vec::new();
    for v in candidates {
        if let Some(u) = orthogonal_residual(&basis, v, null_tol) {
            basis.push(u);
        }
    }
    basis
}

/// Component of `v` orthogonal to `basis`, normalized, or `None` when it is null.
pub fn orthogonal_residual(basis: &[Ket], v: &Ket, null_tol: f64) -> Option<Ket> {
    let mut u = v.clone();
    for _ in 0..2 {
        for b in basis {
            let overlap = b.dotc(&u);
            u -= b * overlap;
        }
    }
    let norm = u.norm();
    (norm >= null_tol).then(|| u / Complex64::new(norm, 0.0))
}

/// Stacks kets as the columns of a matrix.
pub fn columns(kets: &[Ket], dim: usize) -> DMatrix<Complex64> {
    if kets.is_empty() {
        DMatrix::zeros(dim, 0)
    } else {
        DMatrix::from_columns(kets)
    }
}

/// Frobenius distance between the orthogonal projectors onto the column spans
/// of two orthonormal bases. Zero iff the spans coincide.
pub fn subspace_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let pa = a * a.adjoint();
    let pb = b * b.adjoint();
    (pa - pb).norm()
}

/// Computational basis state `|index⟩` in dimension `dim`.
pub fn basis_ket(dim: usize, index: usize) -> Ket {
    let mut k = Ket::zeros(dim);
    k[index] = Complex64::new(1.0, 0.0);
    k
}

/// Applies `p` to a ket using its permutation-with-phases structure.
pub fn apply_pauli(p: &PauliElement, ket: &Ket) -> Ket {
    let mut out = Ket::zeros(ket.len());
    for (b, amp) in ket.iter().enumerate() {
        if *amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (row, k) = p.act_on_basis(b as u64);
        out[row as usize] += amp * phase_value(k);
    }
    out
}
