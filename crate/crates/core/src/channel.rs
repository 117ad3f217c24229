//! Kraus channels whose operators live in the group algebra of a Pauli
//! subgroup, density-matrix evolution and purity diagnostics.

use std::collections::HashSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{self, check_dense, hermitian_eigen, inverse_sqrt_hermitian, max_abs_diff, DenseOperator, Ket};
use crate::dfs::ket_to_pairs;
use crate::error::{DfsError, Result};
use crate::pauli::{phase_value, PauliElement};
use crate::sampling::{complex_normal, seeded_rng};
use crate::subgroup::{PauliSubgroup, DEFAULT_ORDER_CAP};

/// `Σ A†A = I` must hold to this tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// `S = Σ A†A` with a smaller eigenvalue is rejected as degenerate.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Upper bound on operators per channel drawn by [`decoherence_scan`].
pub const SCAN_MAX_OPERATORS: usize = 8;

/// Group-algebra coordinates of a Kraus set.
#[derive(Clone, Debug)]
pub struct AlgebraCoefficients {
    pub elements: Vec<PauliElement>,
    /// One vector per operator, aligned with `elements`.
    pub coefficients: Vec<Vec<Complex64>>,
    /// Largest entrywise error of rebuilding the operators from `coefficients`.
    pub reprojection_residual: f64,
}

/// Trace-preserving set of Kraus operators.
#[derive(Clone, Debug)]
pub struct KrausSet {
    n_qubits: usize,
    operators: Vec<DenseOperator>,
    algebra: Option<AlgebraCoefficients>,
}

impl KrausSet {
    /// Wraps explicit operators after checking `Σ A†A = I`.
    pub fn new(n_qubits: usize, operators: Vec<DenseOperator>) -> Result<Self> {
        let set = KrausSet {
            n_qubits,
            operators,
            algebra: None,
        };
        set.check()?;
        Ok(set)
    }

    /// `A_d = Σ_n a_{d,n} G_n` over the elements of `group`.
    pub fn from_group_algebra(
        group: &PauliSubgroup,
        coefficients: Vec<Vec<Complex64>>,
        dense_limit: usize,
    ) -> Result<Self> {
        check_dense(group.n_qubits(), dense_limit)?;
        let mut operators = Vec::with_capacity(coefficients.len());
        for coeffs in &coefficients {
            if coeffs.len() != group.order() {
                return Err(DfsError::DimensionMismatch {
                    expected: group.order(),
                    found: coeffs.len(),
                });
            }
            let mut op = DenseOperator::zeros(group.n_qubits());
            for (a, g) in coeffs.iter().zip(group.elements()) {
                op.add_pauli(*a, g);
            }
            operators.push(op);
        }
        let set = KrausSet {
            n_qubits: group.n_qubits(),
            operators,
            algebra: Some(AlgebraCoefficients {
                elements: group.elements().to_vec(),
                coefficients,
                reprojection_residual: 0.0,
            }),
        };
        set.check()?;
        Ok(set)
    }

    fn check(&self) -> Result<()> {
        if self.operators.is_empty() {
            return Err(DfsError::Constraint("a Kraus set needs at least one operator".into()));
        }
        let dim = 1usize << self.n_qubits;
        for op in &self.operators {
            if op.dim() != dim {
                return Err(DfsError::DimensionMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
        }
        let err = self.normalization_error();
        if err > NORMALIZATION_TOL {
            return Err(DfsError::Constraint(format!(
                "sum of A^dag A deviates from identity by {err:e}"
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn operators(&self) -> &[DenseOperator] {
        &self.operators
    }

    pub fn algebra(&self) -> Option<&AlgebraCoefficients> {
        self.algebra.as_ref()
    }

    /// Largest entrywise deviation of `Σ A†A` from the identity.
    pub fn normalization_error(&self) -> f64 {
        let dim = 1usize << self.n_qubits;
        let sum = self.operators.iter().fold(DMatrix::zeros(dim, dim), |acc, a| {
            acc + a.matrix().adjoint() * a.matrix()
        });
        max_abs_diff(&sum, &DMatrix::identity(dim, dim))
    }

    pub fn to_json_value(&self) -> Result<KrausJson> {
        let algebra = self
            .algebra
            .as_ref()
            .ok_or_else(|| DfsError::Serde("only group-algebra Kraus sets have a coefficient form".into()))?;
        Ok(KrausJson {
            n_qubits: self.n_qubits,
            subgroup: algebra.elements.iter().map(ToString::to_string).collect(),
            operators: algebra
                .coefficients
                .iter()
                .map(|v| v.iter().map(|a| [a.re, a.im]).collect())
                .collect(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value()?)?)
    }

    pub fn from_json(text: &str, dense_limit: usize) -> Result<Self> {
        let doc: KrausJson = serde_json::from_str(text)?;
        let elements = doc
            .subgroup
            .iter()
            .map(|s| PauliElement::parse(s, Some(doc.n_qubits)))
            .collect::<Result<Vec<_>>>()?;
        let group = PauliSubgroup::closure_on(doc.n_qubits, &elements, DEFAULT_ORDER_CAP)?;
        if group.elements() != elements.as_slice() {
            return Err(DfsError::Domain(
                "subgroup list must be a closed group in canonical order".into(),
            ));
        }
        let coefficients = doc
            .operators
            .iter()
            .map(|v| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Self::from_group_algebra(&group, coefficients, dense_limit)
    }
}

/// Wire form of a group-algebra Kraus set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrausJson {
    pub n_qubits: usize,
    pub subgroup: Vec<String>,
    /// Coefficient vectors over `subgroup`, as `[re, im]` pairs.
    pub operators: Vec<Vec<[f64; 2]>>,
}

/// Draws `n_ops` operators with complex normal coefficients over the group
/// elements and right-multiplies each by `S^{-1/2}`, `S = Σ A†A`, so the set is
/// trace preserving. `S` lies in the group algebra, so the result does too;
/// the recorded coefficients are recovered by trace-inner-product projection.
pub fn random_group_algebra_kraus(
    group: &PauliSubgroup,
    n_ops: usize,
    seed: u64,
    dense_limit: usize,
) -> Result<KrausSet> {
    check_dense(group.n_qubits(), dense_limit)?;
    if n_ops == 0 {
        return Err(DfsError::Constraint("n_ops must be at least 1".into()));
    }
    let mut rng = seeded_rng(seed);
    let n = group.n_qubits();
    let dim = 1usize << n;

    let raw: Vec<DenseOperator> = (0..n_ops)
        .map(|_| {
            let mut op = DenseOperator::zeros(n);
            for g in group.elements() {
                op.add_pauli(complex_normal(&mut rng), g);
            }
            op
        })
        .collect();
    let s = raw.iter().fold(DMatrix::zeros(dim, dim), |acc, a| {
        acc + a.matrix().adjoint() * a.matrix()
    });
    let (inv_sqrt, min_eig) = inverse_sqrt_hermitian(&s);
    if min_eig < SINGULAR_TOL {
        return Err(DfsError::DegenerateKraus {
            min_eigenvalue: min_eig,
        });
    }
    let operators: Vec<DenseOperator> = raw
        .into_iter()
        .map(|a| DenseOperator::new(n, a.into_matrix() * &inv_sqrt).expect("square 2^K"))
        .collect();

    let (coefficients, residual) = reproject(group, &operators);
    if residual > NORMALIZATION_TOL {
        return Err(DfsError::Domain(format!(
            "normalized operators left the group algebra (residual {residual:e})"
        )));
    }
    let set = KrausSet {
        n_qubits: n,
        operators,
        algebra: Some(AlgebraCoefficients {
            elements: group.elements().to_vec(),
            coefficients,
            reprojection_residual: residual,
        }),
    };
    set.check()?;
    Ok(set)
}

/// Coefficients `a_n = tr(G_n† A) / 2^K`, assigned to the first element of each
/// scalar-multiple class so the expansion is unique.
fn reproject(group: &PauliSubgroup, operators: &[DenseOperator]) -> (Vec<Vec<Complex64>>, f64) {
    let n = group.n_qubits();
    let dim = 1usize << n;
    let mut seen = HashSet::new();
    let leaders: Vec<bool> = group
        .elements()
        .iter()
        .map(|g| seen.insert(g.without_phase()))
        .collect();
    let mut coefficients = Vec::with_capacity(operators.len());
    let mut residual: f64 = 0.0;
    for op in operators {
        let coeffs: Vec<Complex64> = group
            .elements()
            .iter()
            .zip(&leaders)
            .map(|(g, &lead)| {
                if !lead {
                    return Complex64::new(0.0, 0.0);
                }
                let tr: Complex64 = (0..dim)
                    .map(|b| {
                        let (row, k) = g.act_on_basis(b as u64);
                        phase_value(k).conj() * op.matrix()[(row as usize, b)]
                    })
                    .sum();
                tr / dim as f64
            })
            .collect();
        let mut rebuilt = DenseOperator::zeros(n);
        for (a, g) in coeffs.iter().zip(group.elements()) {
            rebuilt.add_pauli(*a, g);
        }
        residual = residual.max(rebuilt.max_abs_diff(op));
        coefficients.push(coeffs);
    }
    (coefficients, residual)
}

/// The channel `{G_n / √N}` over every element of `group`; on `{II, ZI, IZ, ZZ}`
/// it is the equal-weight dephasing channel.
pub fn uniform_group_channel(group: &PauliSubgroup, dense_limit: usize) -> Result<KrausSet> {
    let w = Complex64::new(1.0 / (group.order() as f64).sqrt(), 0.0);
    let coefficients = (0..group.order())
        .map(|i| {
            let mut v = vec![Complex64::new(0.0, 0.0); group.order()];
            v[i] = w;
            v
        })
        .collect();
    KrausSet::from_group_algebra(group, coefficients, dense_limit)
}

/// Hermitian, positive semidefinite, unit-trace `2^K x 2^K` matrix.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-10;
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const EIGEN_FLOOR: f64 = -1e-8;

    /// Validates trace, hermiticity and positivity.
    pub fn new(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::unchecked(n_qubits, matrix)?;
        rho.validate(Self::TRACE_TOL)?;
        Ok(rho)
    }

    fn unchecked(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(DfsError::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(DensityMatrix { n_qubits, matrix })
    }

    /// Checks the density-matrix invariants with a caller-chosen trace tolerance.
    pub fn validate(&self, trace_tol: f64) -> Result<()> {
        let tr = self.matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > trace_tol {
            return Err(DfsError::InvalidState(format!("trace {tr} is not 1")));
        }
        if max_abs_diff(&self.matrix, &self.matrix.adjoint()) > Self::HERMITIAN_TOL {
            return Err(DfsError::InvalidState("matrix is not Hermitian".into()));
        }
        let min = self.min_eigenvalue();
        if min < Self::EIGEN_FLOOR {
            return Err(DfsError::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `|ψ⟩⟨ψ|` for a ket of length `2^K`; the ket is normalized first.
    pub fn pure(ket: &Ket) -> Result<Self> {
        let n_qubits = qubits_for_dim(ket.len())?;
        let norm = ket.norm();
        if norm < 1e-12 {
            return Err(DfsError::InvalidState("zero vector".into()));
        }
        let v = ket / Complex64::new(norm, 0.0);
        Self::new(n_qubits, &v * v.adjoint())
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        DensityMatrix {
            n_qubits,
            matrix: DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.matrix).0.first().copied().unwrap_or(0.0)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalized reference state.
    pub fn fidelity(&self, ket: &Ket) -> f64 {
        ket.dotc(&(&self.matrix * ket)).re
    }

    /// Reduced state on the listed qubits (0-based string positions, qubit 1 = 0),
    /// kept in the given order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.n_qubits;
        if keep.iter().any(|&q| q >= n) || keep.iter().collect::<HashSet<_>>().len() != keep.len() {
            return Err(DfsError::InvalidState(format!(
                "bad qubit list {keep:?} for {n} qubits"
            )));
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let bit = |q: usize| n - 1 - q;
        let compose = |kept_idx: usize, traced_idx: usize| -> usize {
            let mut full = 0usize;
            for (j, &q) in keep.iter().enumerate() {
                if (kept_idx >> (keep.len() - 1 - j)) & 1 == 1 {
                    full |= 1 << bit(q);
                }
            }
            for (j, &q) in traced.iter().enumerate() {
                if (traced_idx >> (traced.len() - 1 - j)) & 1 == 1 {
                    full |= 1 << bit(q);
                }
            }
            full
        };
        let d_keep = 1usize << keep.len();
        let d_trace = 1usize << traced.len();
        let mut out = DMatrix::zeros(d_keep, d_keep);
        for r in 0..d_keep {
            for c in 0..d_keep {
                out[(r, c)] = (0..d_trace).map(|t| self.matrix[(compose(r, t), compose(c, t))]).sum();
            }
        }
        Ok(DensityMatrix {
            n_qubits: keep.len(),
            matrix: out,
        })
    }

    /// Dense amplitudes as rows of `[re, im]` pairs, computational-basis order.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        self.matrix
            .row_iter()
            .map(|row| row.iter().map(|a| [a.re, a.im]).collect())
            .collect()
    }
}

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(DfsError::InvalidState(format!(
            "dimension {dim} is not 2^K with K >= 1"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// `ρ ↦ Σ_d A_d ρ A_d†`.
pub fn apply_channel(kraus: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if kraus.n_qubits != rho.n_qubits {
        return Err(DfsError::DimensionMismatch {
            expected: 1 << kraus.n_qubits,
            found: 1 << rho.n_qubits,
        });
    }
    let dim = rho.matrix.nrows();
    let out = kraus.operators.iter().fold(DMatrix::zeros(dim, dim), |acc, a| {
        acc + a.matrix() * &rho.matrix * a.matrix().adjoint()
    });
    DensityMatrix::unchecked(rho.n_qubits, out)
}

/// `tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTrial {
    pub trial: usize,
    pub seed: u64,
    pub purity: f64,
    pub fidelity: f64,
    pub trace_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n_qubits: usize,
    pub state: Vec<[f64; 2]>,
    pub operators_per_channel: usize,
    pub trials: Vec<ScanTrial>,
    pub min_purity: f64,
    pub mean_purity: f64,
    pub min_fidelity: f64,
    pub mean_fidelity: f64,
    pub max_trace_error: f64,
}

/// Seed of channel `trial` within a scan seeded by `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((trial as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
        ^ trial as u64
}

/// Sends `state` through `trials` independent random group-algebra channels
/// and records purity and fidelity of each output. Each channel has
/// `min(N, 8)` operators.
pub fn decoherence_scan(
    group: &PauliSubgroup,
    state: &Ket,
    trials: usize,
    seed: u64,
    dense_limit: usize,
) -> Result<ScanReport> {
    check_dense(group.n_qubits(), dense_limit)?;
    let dim = 1usize << group.n_qubits();
    if state.len() != dim {
        return Err(DfsError::DimensionMismatch {
            expected: dim,
            found: state.len(),
        });
    }
    let norm = state.norm();
    if norm < 1e-12 {
        return Err(DfsError::InvalidState("zero vector".into()));
    }
    let psi = state / Complex64::new(norm, 0.0);
    let rho = DensityMatrix::pure(&psi)?;
    let n_ops = group.order().clamp(1, SCAN_MAX_OPERATORS);

    let mut out = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut s = trial_seed(seed, trial);
        let kraus = loop {
            match random_group_algebra_kraus(group, n_ops, s, dense_limit) {
                Ok(k) => break k,
                Err(DfsError::DegenerateKraus { .. }) => s = s.wrapping_add(1),
                Err(e) => return Err(e),
            }
        };
        let rho_out = apply_channel(&kraus, &rho)?;
        out.push(ScanTrial {
            trial,
            seed: s,
            purity: rho_out.purity(),
            fidelity: rho_out.fidelity(&psi),
            trace_error: (rho_out.trace() - Complex64::new(1.0, 0.0)).norm(),
        });
    }
    let count = out.len().max(1) as f64;
    Ok(ScanReport {
        n_qubits: group.n_qubits(),
        state: ket_to_pairs(&psi),
        operators_per_channel: n_ops,
        min_purity: out.iter().map(|t| t.purity).fold(f64::INFINITY, f64::min),
        mean_purity: out.iter().map(|t| t.purity).sum::<f64>() / count,
        min_fidelity: out.iter().map(|t| t.fidelity).fold(f64::INFINITY, f64::min),
        mean_fidelity: out.iter().map(|t| t.fidelity).sum::<f64>() / count,
        max_trace_error: out.iter().map(|t| t.trace_error).fold(0.0, f64::max),
        trials: out,
    })
}

/// Largest `‖A|j⟩ − c_A|j⟩‖` over operators `A` and code states `|j⟩`, where
/// `c_A = ⟨j_0|A|j_0⟩` is shared by every code state.
pub fn code_residual(kraus: &KrausSet, code: &[Ket]) -> f64 {
    let mut worst: f64 = 0.0;
    for op in kraus.operators() {
        let Some(first) = code.first() else { return 0.0 };
        let c = first.dotc(&op.apply(first));
        for j in code {
            worst = worst.max((op.apply(j) - j * c).norm());
        }
    }
    worst
}

/// Parameters of the two upper-triangular 2x2 blocks
/// `[[c_d, d_d], [0, e_d]]`, `d = 1, 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangularParams {
    pub c1: Complex64,
    pub c2: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub e1: Complex64,
    pub e2: Complex64,
}

/// Tolerance on the three normalization constraints.
pub const CONSTRAINT_TOL: f64 = 1e-10;

impl TriangularParams {
    /// Random parameters satisfying the normalization constraints.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let (c1, c2) = unit_pair(rng);
        // d ⟂ c in the sense c1* d1 + c2* d2 = 0.
        let t = complex_normal(rng);
        let (d1, d2) = (-t * c2.conj(), t * c1.conj());
        let d_norm = (d1.norm_sqr() + d2.norm_sqr()).sqrt();
        let scale = rng.random_range(0.1..0.9);
        let (d1, d2) = (d1 * (scale / d_norm), d2 * (scale / d_norm));
        let (e1, e2) = unit_pair(rng);
        let e_scale = (1.0 - scale * scale).sqrt();
        TriangularParams {
            c1,
            c2,
            d1,
            d2,
            e1: e1 * e_scale,
            e2: e2 * e_scale,
        }
    }

    /// Checks the three normalization constraints, naming the first violated one.
    pub fn check(&self) -> Result<()> {
        let cross = self.c1.conj() * self.d1 + self.c2.conj() * self.d2;
        if cross.norm() > CONSTRAINT_TOL {
            return Err(DfsError::Constraint(format!("c1* d1 + c2* d2 = {cross}, expected 0")));
        }
        let c = self.c1.norm_sqr() + self.c2.norm_sqr();
        if (c - 1.0).abs() > CONSTRAINT_TOL {
            return Err(DfsError::Constraint(format!("|c1|^2 + |c2|^2 = {c}, expected 1")));
        }
        let de = self.d1.norm_sqr() + self.d2.norm_sqr() + self.e1.norm_sqr() + self.e2.norm_sqr();
        if (de - 1.0).abs() > CONSTRAINT_TOL {
            return Err(DfsError::Constraint(format!(
                "|d1|^2 + |d2|^2 + |e1|^2 + |e2|^2 = {de}, expected 1"
            )));
        }
        Ok(())
    }
}

fn unit_pair<R: Rng + ?Sized>(rng: &mut R) -> (Complex64, Complex64) {
    let a = complex_normal(rng);
    let b = complex_normal(rng);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / n, b / n)
}

/// The non-Abelian order-8 group generated by `XXI` and `IZZ`; it equals
/// `{±III, ±XXI, ±IZZ, ±iXYZ}`.
pub fn q8_group() -> PauliSubgroup {
    let gens: Vec<PauliElement> = ["XXI", "IZZ", "-III", "+iXYZ"]
        .iter()
        .map(|s| s.parse().expect("valid literal"))
        .collect();
    PauliSubgroup::closure(&gens).expect("order 8")
}

/// Computational-basis indices of the code `{|000⟩, |111⟩, |100⟩, |011⟩}`.
pub const Q8_CODE: [usize; 4] = [0b000, 0b111, 0b100, 0b011];

/// The four two-dimensional invariant subspaces of the 3-qubit space under
/// the order-8 group, as pairs of basis indices.
pub const Q8_SUBSPACES: [[usize; 2]; 4] = [[0b000, 0b110], [0b111, 0b001], [0b100, 0b010], [0b011, 0b101]];

pub fn q8_code_states() -> Vec<Ket> {
    Q8_CODE.iter().map(|&i| dense::basis_ket(8, i)).collect()
}

/// Kraus pair
/// `A_d = (c_d+e_d)/2 III + d_d/2 XXI + (c_d−e_d)/2 IZZ + d_d/2 iXYZ`, whose
/// restriction to every invariant subspace is `[[c_d, d_d], [0, e_d]]`.
pub fn triangular_kraus(params: &TriangularParams) -> Result<KrausSet> {
    params.check()?;
    let group = q8_group();
    let half = Complex64::new(0.5, 0.0);
    let coefficients = [(params.c1, params.d1, params.e1), (params.c2, params.d2, params.e2)]
        .iter()
        .map(|&(c, d, e)| {
            group
                .elements()
                .iter()
                .map(|g| match g.to_string().as_str() {
                    "+III" => (c + e) * half,
                    "+XXI" => d * half,
                    "+IZZ" => (c - e) * half,
                    "+iXYZ" => d * half,
                    _ => Complex64::new(0.0, 0.0),
                })
                .collect()
        })
        .collect();
    KrausSet::from_group_algebra(&group, coefficients, 3)
}

/// Invariance of the four listed subspaces: the largest leak
/// `‖(I − P_V) g P_V‖` over all group elements and subspaces.
pub fn q8_subspace_leak() -> f64 {
    let group = q8_group();
    let mut worst: f64 = 0.0;
    for pair in Q8_SUBSPACES {
        let basis: Vec<Ket> = pair.iter().map(|&i| dense::basis_ket(8, i)).collect();
        let q = dense::columns(&basis, 8);
        let proj = &q * q.adjoint();
        let complement = DMatrix::<Complex64>::identity(8, 8) - &proj;
        for g in group.elements() {
            let gm = DenseOperator::from_pauli(g, 3).expect("3 qubits").into_matrix();
            worst = worst.max((&complement * gm * &proj).norm());
        }
    }
    worst
}

/// Threshold above which a code residual counts as a DFS violation in the probe.
pub const PROBE_FAILURE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub unconstrained_draws: usize,
    pub unconstrained_failures: usize,
    pub min_unconstrained_residual: f64,
    pub constrained_draws: usize,
    pub constrained_failures: usize,
    pub max_constrained_residual: f64,
    pub max_constrained_normalization_error: f64,
    pub subspace_leak: f64,
}

/// Compares generic two-operator channels over the order-8 group with
/// channels built from constrained triangular parameters, on the code
/// `{|000⟩, |111⟩, |100⟩, |011⟩}`.
pub fn q8_genericity_probe(seed: u64, draws: usize) -> Result<ProbeReport> {
    let group = q8_group();
    let code = q8_code_states();
    let mut unconstrained_failures = 0;
    let mut min_unconstrained: f64 = f64::INFINITY;
    for draw in 0..draws {
        let mut s = trial_seed(seed, draw);
        let kraus = loop {
            match random_group_algebra_kraus(&group, 2, s, 3) {
                Ok(k) => break k,
                Err(DfsError::DegenerateKraus { .. }) => s = s.wrapping_add(1),
                Err(e) => return Err(e),
            }
        };
        let r = code_residual(&kraus, &code);
        min_unconstrained = min_unconstrained.min(r);
        if r > PROBE_FAILURE_TOL {
            unconstrained_failures += 1;
        }
    }

    let mut rng = seeded_rng(seed ^ 0x5A5A_5A5A);
    let mut constrained_failures = 0;
    let mut max_constrained: f64 = 0.0;
    let mut max_norm_err: f64 = 0.0;
    for _ in 0..draws {
        let kraus = triangular_kraus(&TriangularParams::random(&mut rng))?;
        let r = code_residual(&kraus, &code);
        max_constrained = max_constrained.max(r);
        max_norm_err = max_norm_err.max(kraus.normalization_error());
        if r > PROBE_FAILURE_TOL {
            constrained_failures += 1;
        }
    }

    Ok(ProbeReport {
        unconstrained_draws: draws,
        unconstrained_failures,
        min_unconstrained_residual: min_unconstrained,
        constrained_draws: draws,
        constrained_failures,
        max_constrained_residual: max_constrained,
        max_constrained_normalization_error: max_norm_err,
        subspace_leak: q8_subspace_leak(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::basis_ket;
    use crate::dfs::dfs_basis;

    const LIMIT: usize = crate::dense::DEFAULT_DENSE_LIMIT;

    fn p(s: &str) -> PauliElement {
        s.parse().unwrap()
    }

    fn group(gens: &[&str]) -> PauliSubgroup {
        PauliSubgroup::closure(&gens.iter().map(|s| p(s)).collect::<Vec<_>>()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn random_kraus_is_normalized_and_in_algebra() {
        let g = group(&["XXII", "IIXX"]);
        let k = random_group_algebra_kraus(&g, 3, 9, LIMIT).unwrap();
        assert!(k.normalization_error() < 1e-9);
        let alg = k.algebra().unwrap();
        assert!(alg.reprojection_residual < 1e-9);
        // Only I, XXII, IIXX, XXXX carry weight.
        assert_eq!(alg.elements.len(), 4);
        for v in &alg.coefficients {
            assert_eq!(v.len(), 4);
        }
    }

    #[test]
    fn trivial_group_kraus_is_a_phase() {
        let g = PauliSubgroup::closure_on(2, &[], DEFAULT_ORDER_CAP).unwrap();
        let k = random_group_algebra_kraus(&g, 1, 5, LIMIT).unwrap();
        let m = k.operators()[0].matrix();
        let phase = m[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        let expected = DMatrix::<Complex64>::identity(4, 4) * phase;
        assert!(max_abs_diff(m, &expected) < 1e-12);
    }

    #[test]
    fn kraus_with_minus_identity_reprojects() {
        let g = group(&["-II", "ZX", "XZ"]);
        let k = random_group_algebra_kraus(&g, 2, 1, LIMIT).unwrap();
        assert!(k.algebra().unwrap().reprojection_residual < 1e-9);
    }

    #[test]
    fn zero_ops_rejected() {
        let g = group(&["Z"]);
        assert!(random_group_algebra_kraus(&g, 0, 0, LIMIT).is_err());
    }

    #[test]
    fn identity_channel_leaves_state() {
        let g = PauliSubgroup::closure_on(1, &[], DEFAULT_ORDER_CAP).unwrap();
        let k = uniform_group_channel(&g, LIMIT).unwrap();
        let rho = DensityMatrix::pure(&Ket::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)])).unwrap();
        let out = apply_channel(&k, &rho).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn dephasing_kills_coherence() {
        let g = group(&["ZI", "IZ"]);
        let k = uniform_group_channel(&g, LIMIT).unwrap();
        // |+>|0> = (|00> + |10>)/√2
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = Ket::from_vec(vec![c(s, 0.), c(0., 0.), c(s, 0.), c(0., 0.)]);
        let rho = DensityMatrix::pure(&psi).unwrap();
        let out = apply_channel(&k, &rho).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                if r == col {
                    assert!((out.matrix()[(r, r)] - rho.matrix()[(r, r)]).norm() < 1e-12);
                } else {
                    assert!(out.matrix()[(r, col)].norm() < 1e-12);
                }
            }
        }
        let reduced = out.partial_trace(&[0]).unwrap();
        assert!((reduced.purity() - 0.5).abs() < 1e-12);
        assert!((out.purity() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn purities() {
        assert!((DensityMatrix::maximally_mixed(1).purity() - 0.5).abs() < 1e-15);
        let rho = DensityMatrix::pure(&basis_ket(4, 2)).unwrap();
        assert!((purity(&rho) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        let bad = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.5, 0.), c(-0.5, 0.)]));
        assert!(DensityMatrix::new(1, bad).is_err());
        let bad_trace = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.5, 0.), c(0.4, 0.)]));
        assert!(DensityMatrix::new(1, bad_trace).is_err());
        assert!(DensityMatrix::new(1, DMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn partial_trace_of_product() {
        // |0><0| ⊗ |+><+|
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = Ket::from_vec(vec![c(s, 0.), c(s, 0.), c(0., 0.), c(0., 0.)]);
        let rho = DensityMatrix::pure(&psi).unwrap();
        let first = rho.partial_trace(&[0]).unwrap();
        assert!((first.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        let second = rho.partial_trace(&[1]).unwrap();
        assert!((second.matrix()[(0, 1)].re - 0.5).abs() < 1e-12);
        assert!(rho.partial_trace(&[2]).is_err());
        assert!(rho.partial_trace(&[0, 0]).is_err());
    }

    #[test]
    fn dfs_state_survives_channel() {
        let g = group(&["XXII", "IIXX"]);
        let ch = &g.characters().unwrap()[2];
        let basis = dfs_basis(&g, ch, LIMIT).unwrap();
        let psi = (&basis.vectors[0] * c(0.6, 0.) + &basis.vectors[3] * c(0., 0.8)).clone();
        let report = decoherence_scan(&g, &psi, 6, 3, LIMIT).unwrap();
        assert!(report.min_purity > 1.0 - 1e-9);
        assert!(report.min_fidelity > 1.0 - 1e-9);
        assert!(report.max_trace_error < 1e-9);
    }

    #[test]
    fn mixture_of_irreps_decoheres() {
        let g = group(&["ZI", "IZ"]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = Ket::from_vec(vec![c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)]);
        let report = decoherence_scan(&g, &psi, 32, 0, LIMIT).unwrap();
        assert!(report.min_purity < 1.0 - 1e-3);
    }

    #[test]
    fn identity_group_scan() {
        let g = PauliSubgroup::closure_on(2, &[], DEFAULT_ORDER_CAP).unwrap();
        let psi = Ket::from_vec(vec![c(0.5, 0.), c(0.5, 0.), c(0., 0.5), c(0.5, 0.)]);
        let report = decoherence_scan(&g, &psi, 4, 0, LIMIT).unwrap();
        assert!(report.min_purity > 1.0 - 1e-12);
    }

    #[test]
    fn triangular_identity_params() {
        let params = TriangularParams {
            c1: c(1., 0.),
            c2: c(0., 0.),
            d1: c(0., 0.),
            d2: c(0., 0.),
            e1: c(1., 0.),
            e2: c(0., 0.),
        };
        let k = triangular_kraus(&params).unwrap();
        let eye = DenseOperator::identity(3);
        assert!(k.operators()[0].max_abs_diff(&eye) < 1e-15);
        assert!(k.operators()[1].max_abs_diff(&DenseOperator::zeros(3)) < 1e-15);
    }

    #[test]
    fn triangular_code_states_share_eigenvalue() {
        let mut rng = seeded_rng(17);
        let params = TriangularParams::random(&mut rng);
        let k = triangular_kraus(&params).unwrap();
        let a1 = &k.operators()[0];
        for idx in [0b000, 0b100, 0b111, 0b011] {
            let v = basis_ket(8, idx);
            assert!((a1.apply(&v) - &v * params.c1).norm() < 1e-12, "state {idx:03b}");
        }
        let v = basis_ket(8, 0b110);
        let image = a1.apply(&v);
        // Upper-triangular block: |110> picks up a |000> component d1.
        assert!((image[0] - params.d1).norm() < 1e-12);
        assert!((image[0b110] - params.e1).norm() < 1e-12);
    }

    #[test]
    fn triangular_rejects_bad_params() {
        let params = TriangularParams {
            c1: c(1., 0.),
            c2: c(0., 0.),
            d1: c(0.5, 0.),
            d2: c(0., 0.),
            e1: c(0.5, 0.),
            e2: c(0.5, 0.),
        };
        match triangular_kraus(&params) {
            Err(DfsError::Constraint(msg)) => assert!(msg.contains("c1* d1")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn subspaces_are_invariant() {
        assert!(q8_subspace_leak() < 1e-12);
    }

    #[test]
    fn kraus_json_round_trip() {
        let g = group(&["ZI", "IZ"]);
        let k = random_group_algebra_kraus(&g, 2, 4, LIMIT).unwrap();
        let text = k.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["n_qubits"], 2);
        assert_eq!(v["subgroup"][0], "+II");
        let back = KrausSet::from_json(&text, LIMIT).unwrap();
        for (a, b) in back.operators().iter().zip(k.operators()) {
            assert!(a.max_abs_diff(b) < 1e-12);
        }
        let plain = KrausSet::new(1, vec![DenseOperator::identity(1)]).unwrap();
        assert!(plain.to_json().is_err());
    }
}
