//! Reference implementations used as oracles by the integration suites. They
//! share no numerics with the library: Pauli matrices are built from
//! Kronecker products of the 2x2 matrices and spans are handled by plain
//! Gram-Schmidt or SVD.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type M = DMatrix<Complex64>;
pub type V = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense matrix of a Pauli string with optional `+`, `-`, `i`, `+i`, `-i`
/// prefix; the leftmost letter acts on the most significant bit.
pub fn pauli_matrix(text: &str) -> M {
    let mut rest = text;
    let mut factor = c(1.0, 0.0);
    if let Some(r) = rest.strip_prefix('+') {
        rest = r;
    } else if let Some(r) = rest.strip_prefix('-') {
        factor = -factor;
        rest = r;
    }
    if let Some(r) = rest.strip_prefix('i') {
        factor *= c(0.0, 1.0);
        rest = r;
    }
    let mut out = M::from_element(1, 1, factor);
    for letter in rest.chars() {
        let m = match letter {
            'I' => M::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]),
            'X' => M::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
            'Y' => M::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
            'Z' => M::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
            other => panic!("bad letter {other}"),
        };
        out = out.kronecker(&m);
    }
    out
}

/// Ket from `(amplitude, bitstring)` terms, normalized.
pub fn ket(terms: &[(f64, &str)]) -> V {
    let n = terms[0].1.len();
    let mut v = V::zeros(1 << n);
    for &(a, bits) in terms {
        v[usize::from_str_radix(bits, 2).unwrap()] += c(a, 0.0);
    }
    let norm = v.norm();
    v / c(norm, 0.0)
}

pub fn basis(dim: usize, index: usize) -> V {
    let mut v = V::zeros(dim);
    v[index] = c(1.0, 0.0);
    v
}

/// Modified Gram-Schmidt; vectors with residual norm below `tol` are dropped.
pub fn gram_schmidt(vectors: &[V], tol: f64) -> Vec<V> {
    let mut out: Vec<V> = Vec::new();
    for v in vectors {
        let mut u = v.clone();
        for _ in 0..2 {
            for b in &out {
                let overlap = b.dotc(&u);
                u -= b * overlap;
            }
        }
        let norm = u.norm();
        if norm > tol {
            out.push(u / c(norm, 0.0));
        }
    }
    out
}

/// Orthogonal projector onto the span of `vectors`.
pub fn span_projector(vectors: &[V], dim: usize) -> M {
    gram_schmidt(vectors, 1e-10)
        .iter()
        .fold(M::zeros(dim, dim), |acc, v| acc + v * v.adjoint())
}

/// Frobenius distance between the projectors onto two spans.
pub fn span_distance(a: &[V], b: &[V], dim: usize) -> f64 {
    (span_projector(a, dim) - span_projector(b, dim)).norm()
}

/// Numerical rank from the column space.
pub fn column_rank(m: &M, tol: f64) -> usize {
    let cols: Vec<V> = (0..m.ncols()).map(|j| m.column(j).into_owned()).collect();
    gram_schmidt(&cols, tol).len()
}

/// Orthonormal null-space basis of `b` from its SVD.
fn null_space(b: &M, tol: f64) -> M {
    let n = b.ncols();
    // Pad with zero rows so the SVD returns a full right basis.
    let rows = b.nrows().max(n);
    let mut padded = M::zeros(rows, n);
    padded.view_mut((0, 0), (b.nrows(), n)).copy_from(b);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let cols: Vec<V> = (0..n)
        .filter(|&i| svd.singular_values[i] < tol)
        .map(|i| v_t.row(i).adjoint())
        .collect();
    if cols.is_empty() {
        M::zeros(n, 0)
    } else {
        M::from_columns(&cols)
    }
}

/// Simultaneous eigenspaces of commuting-or-not unitary matrices with
/// eigenvalues in `{1, i, -1, -i}`: returns `(eigenvalue exponents, orthonormal
/// basis)` for every nonzero joint eigenspace.
pub fn joint_eigenspaces(mats: &[M], dim: usize) -> Vec<(Vec<u8>, Vec<V>)> {
    let roots = [c(1., 0.), c(0., 1.), c(-1., 0.), c(0., -1.)];
    let mut branches: Vec<(Vec<u8>, M)> = vec![(Vec::new(), M::identity(dim, dim))];
    for g in mats {
        let mut next = Vec::new();
        for (prefix, q) in &branches {
            for (k, &lambda) in roots.iter().enumerate() {
                let b = g * q - q * lambda;
                let y = null_space(&b, 1e-8);
                if y.ncols() == 0 {
                    continue;
                }
                let mut p = prefix.clone();
                p.push(k as u8);
                next.push((p, q * y));
            }
        }
        branches = next;
    }
    branches
        .into_iter()
        .map(|(p, q)| (p, (0..q.ncols()).map(|j| q.column(j).into_owned()).collect()))
        .collect()
}

/// Exponent `k` of the root of unity closest to `z`.
pub fn nearest_root(z: Complex64) -> u8 {
    let roots = [c(1., 0.), c(0., 1.), c(-1., 0.), c(0., -1.)];
    (0..4)
        .min_by(|&a, &b| (z - roots[a]).norm().total_cmp(&(z - roots[b]).norm()))
        .unwrap() as u8
}
