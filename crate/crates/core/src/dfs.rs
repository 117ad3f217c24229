//! Irrep projectors, multiplicities, decoherence-free bases and their
//! verification against random group-algebra Kraus operators.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{self, apply_pauli, check_dense, DenseOperator, Ket};
use crate::error::{DfsError, Result};
use crate::pauli::{phase_value, PauliElement};
use crate::sampling::{complex_normal, seeded_rng};
use crate::subgroup::{Character, PauliSubgroup};

/// Projections with norm below this are treated as zero.
pub const NULL_PROJECTION_TOL: f64 = 1e-8;
/// `verify_dfs` passes when every residual stays below this.
pub const RESIDUAL_PASS_TOL: f64 = 1e-9;

/// Orthogonal projector onto the states transforming by one character.
#[derive(Clone, Debug)]
pub struct IrrepProjector {
    pub character: Character,
    pub matrix: DenseOperator,
    pub multiplicity: u128,
}

/// Orthonormal basis of the states transforming by one character.
#[derive(Clone, Debug)]
pub struct DfsBasis {
    pub character: Character,
    pub vectors: Vec<Ket>,
    pub multiplicity: u128,
}

impl DfsBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    /// Basis vectors as the columns of a `2^K x m` matrix.
    pub fn as_matrix(&self, dim: usize) -> DMatrix<Complex64> {
        dense::columns(&self.vectors, dim)
    }

    pub fn to_json_value(&self) -> DfsBasisJson {
        DfsBasisJson {
            character_label: self.character.label(),
            multiplicity: self.multiplicity,
            vectors: self.vectors.iter().map(ket_to_pairs).collect(),
        }
    }
}

/// Wire form of a basis; amplitudes are `[re, im]` in computational-basis order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfsBasisJson {
    pub character_label: usize,
    pub multiplicity: u128,
    pub vectors: Vec<Vec<[f64; 2]>>,
}

pub fn ket_to_pairs(ket: &Ket) -> Vec<[f64; 2]> {
    ket.iter().map(|a| [a.re, a.im]).collect()
}

pub fn ket_from_pairs(pairs: &[[f64; 2]]) -> Ket {
    Ket::from_iterator(pairs.len(), pairs.iter().map(|&[re, im]| Complex64::new(re, im)))
}

fn check_character(group: &PauliSubgroup, ch: &Character) -> Result<()> {
    if !group.is_abelian() {
        return Err(DfsError::NonAbelian);
    }
    if !group.owns(ch) {
        return Err(DfsError::ForeignCharacter);
    }
    Ok(())
}

/// `P = (1/N) Σ_n χ(G_n)* G_n`.
pub fn projector(group: &PauliSubgroup, ch: &Character, dense_limit: usize) -> Result<IrrepProjector> {
    check_character(group, ch)?;
    check_dense(group.n_qubits(), dense_limit)?;
    let inv_n = 1.0 / group.order() as f64;
    let mut matrix = DenseOperator::zeros(group.n_qubits());
    for (i, g) in group.elements().iter().enumerate() {
        matrix.add_pauli(ch.complex_value_at(i).conj() * inv_n, g);
    }
    let multiplicity = matrix.trace().re.round().max(0.0) as u128;
    Ok(IrrepProjector {
        character: ch.clone(),
        matrix,
        multiplicity,
    })
}

/// `m_k = (1/N) Σ_n χ^k(G_n)* tr G_n`, evaluated exactly: only the scalar
/// multiples of the identity have nonzero trace, `tr(i^p I) = i^p 2^K`.
pub fn multiplicity(group: &PauliSubgroup, ch: &Character) -> Result<u128> {
    check_character(group, ch)?;
    let mut re = 0i64;
    let mut im = 0i64;
    for (i, g) in group.elements().iter().enumerate() {
        if let Some((p, _)) = g.trace_symbolic() {
            let k = (p + 4 - ch.value_at(i)) & 3;
            match k {
                0 => re += 1,
                1 => im += 1,
                2 => re -= 1,
                _ => im -= 1,
            }
        }
    }
    if im != 0 || re < 0 {
        return Err(DfsError::Domain(format!(
            "character sum {re}{im:+}i is not a non-negative integer"
        )));
    }
    scaled_power_of_two(re as u128, group.n_qubits(), group.order())
}

/// `weight · 2^k / n` for power-of-two `n`, exactly.
fn scaled_power_of_two(weight: u128, k: usize, n: usize) -> Result<u128> {
    if weight == 0 {
        return Ok(0);
    }
    if !n.is_power_of_two() {
        return Err(DfsError::Domain(format!("order {n} is not a power of two")));
    }
    let log_n = n.trailing_zeros() as usize;
    let shift_weight = weight.trailing_zeros() as usize;
    let odd = weight >> shift_weight;
    let exp = (k + shift_weight)
        .checked_sub(log_n)
        .ok_or_else(|| DfsError::Domain(format!("{weight}·2^{k} is not divisible by {n}")))?;
    let bits = 128 - odd.leading_zeros() as usize;
    if exp + bits > 128 {
        return Err(DfsError::Domain(format!("multiplicity {odd}·2^{exp} overflows")));
    }
    Ok(odd << exp)
}

/// Projection of `|b⟩` onto the character, computed from the permutation
/// structure of the group elements.
fn project_basis_state(group: &PauliSubgroup, ch: &Character, b: u64, dim: usize) -> Ket {
    let inv_n = 1.0 / group.order() as f64;
    let mut out = Ket::zeros(dim);
    for (i, g) in group.elements().iter().enumerate() {
        let (row, k) = g.act_on_basis(b);
        out[row as usize] += ch.complex_value_at(i).conj() * phase_value(k) * inv_n;
    }
    out
}

/// Orthonormal basis of the character's invariant subspace.
///
/// Computational basis states are projected in lexicographic order. The
/// projection of `|b⟩` is supported on the coset `b ⊕ X(G)` of X masks, and
/// projections of states in one coset are parallel, so one representative per
/// coset suffices and the kept vectors are orthogonal by disjoint support.
pub fn dfs_basis(group: &PauliSubgroup, ch: &Character, dense_limit: usize) -> Result<DfsBasis> {
    check_character(group, ch)?;
    check_dense(group.n_qubits(), dense_limit)?;
    let m = multiplicity(group, ch)?;
    let dim = 1usize << group.n_qubits();
    let mut covered = vec![false; dim];
    let mut vectors = Vec::new();
    for b in 0..dim {
        if vectors.len() as u128 >= m {
            break;
        }
        if covered[b] {
            continue;
        }
        let v = project_basis_state(group, ch, b as u64, dim);
        for g in group.elements() {
            covered[(b as u64 ^ g.x_mask().low_word()) as usize] = true;
        }
        let norm = v.norm();
        if norm < NULL_PROJECTION_TOL {
            continue;
        }
        vectors.push(v / Complex64::new(norm, 0.0));
    }
    Ok(DfsBasis {
        character: ch.clone(),
        vectors,
        multiplicity: m,
    })
}

/// Every character of an Abelian subgroup with its basis; characters of
/// multiplicity zero carry an empty basis.
pub fn decompose(group: &PauliSubgroup, dense_limit: usize) -> Result<Vec<DfsBasis>> {
    group
        .characters()?
        .iter()
        .map(|ch| dfs_basis(group, ch, dense_limit))
        .collect()
}

/// Outcome of one random Kraus draw in [`verify_dfs`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    /// `a_n`, aligned with the group's canonical element order.
    pub coefficients: Vec<Complex64>,
    /// Mean of `⟨ψ_z|A|ψ_z⟩` over the tested vectors.
    pub eigenvalue: Complex64,
    /// `Σ_n a_n γ_n` when a character is attached.
    pub predicted_eigenvalue: Option<Complex64>,
    pub prediction_error: Option<f64>,
    /// Largest `‖A ψ_z − c ψ_z‖` over the tested vectors.
    pub residual: f64,
    /// Largest `|⟨ψ_z|A|ψ_z⟩ − c|`.
    pub eigenvalue_spread: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub trials: Vec<TrialOutcome>,
    pub max_residual: f64,
    pub passed: bool,
}

/// Checks `A|ψ_z⟩ = c|ψ_z⟩` with one `c` for all basis vectors, for random
/// `A = Σ_n a_n G_n` with complex standard normal `a_n`.
pub fn verify_dfs(group: &PauliSubgroup, basis: &DfsBasis, trials: usize, seed: u64) -> VerificationReport {
    verify_states(group, &basis.vectors, Some(&basis.character), trials, seed)
}

/// [`verify_dfs`] for an arbitrary list of unit vectors. Without a character
/// no eigenvalue prediction is made.
pub fn verify_states(
    group: &PauliSubgroup,
    vectors: &[Ket],
    character: Option<&Character>,
    trials: usize,
    seed: u64,
) -> VerificationReport {
    let mut rng = seeded_rng(seed);
    let character = character.filter(|ch| group.owns(ch));
    // G_n ψ_z is independent of the draw; cache it.
    let images: Vec<Vec<Ket>> = vectors
        .iter()
        .map(|v| group.elements().iter().map(|g| apply_pauli(g, v)).collect())
        .collect();

    let mut outcomes = Vec::with_capacity(trials);
    for trial in 0..trials.max(1) {
        let coefficients: Vec<Complex64> = group.elements().iter().map(|_| complex_normal(&mut rng)).collect();
        let applied: Vec<Ket> = images
            .iter()
            .map(|imgs| {
                imgs.iter()
                    .zip(&coefficients)
                    .fold(Ket::zeros(imgs.first().map_or(0, |v| v.len())), |acc, (img, a)| {
                        acc + img * *a
                    })
            })
            .collect();
        let rayleigh: Vec<Complex64> = vectors.iter().zip(&applied).map(|(v, av)| v.dotc(av)).collect();
        let eigenvalue = if rayleigh.is_empty() {
            Complex64::new(0.0, 0.0)
        } else {
            rayleigh.iter().sum::<Complex64>() / rayleigh.len() as f64
        };
        let residual = vectors
            .iter()
            .zip(&applied)
            .map(|(v, av)| (av - v * eigenvalue).norm())
            .fold(0.0, f64::max);
        let eigenvalue_spread = rayleigh.iter().map(|r| (r - eigenvalue).norm()).fold(0.0, f64::max);
        let predicted = character.map(|ch| {
            coefficients
                .iter()
                .enumerate()
                .map(|(i, a)| a * ch.complex_value_at(i))
                .sum::<Complex64>()
        });
        outcomes.push(TrialOutcome {
            trial,
            prediction_error: predicted.map(|p| (p - eigenvalue).norm()),
            predicted_eigenvalue: predicted,
            coefficients,
            eigenvalue,
            residual,
            eigenvalue_spread,
        });
    }
    let max_residual = outcomes.iter().map(|t| t.residual).fold(0.0, f64::max);
    VerificationReport {
        passed: max_residual < RESIDUAL_PASS_TOL,
        trials: outcomes,
        max_residual,
    }
}

/// Which scalar multiples of the identity an Abelian subgroup contains; this
/// fixes the closed-form DFS dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseClass {
    /// Contains `-I` and `±iI`: supported characters have `m = 2^{K+2}/N`.
    #[serde(rename = "contains_minus_identity")]
    AllScalars,
    /// Contains `-I` but not `±iI`: supported characters have `m = 2^{K+1}/N`.
    #[serde(rename = "minus_identity_only")]
    MinusIdentityOnly,
    /// No scalar besides `I`: every character has `m = 2^K/N`.
    #[serde(rename = "no_phase_factors")]
    NoPhaseFactors,
}

impl PhaseClass {
    pub fn of(group: &PauliSubgroup) -> Self {
        match (group.contains_minus_identity(), group.contains_imaginary_identity()) {
            (_, true) => PhaseClass::AllScalars,
            (true, false) => PhaseClass::MinusIdentityOnly,
            (false, false) => PhaseClass::NoPhaseFactors,
        }
    }

    fn weight(self) -> u128 {
        match self {
            PhaseClass::AllScalars => 4,
            PhaseClass::MinusIdentityOnly => 2,
            PhaseClass::NoPhaseFactors => 1,
        }
    }

    /// Whether a character is supported (has nonzero multiplicity), given
    /// its values on `-I` and `iI` where present.
    pub fn supports(self, group: &PauliSubgroup, ch: &Character) -> bool {
        let n = group.n_qubits();
        let minus = ch.value(group, &PauliElement::scalar(n, 2));
        let imag = ch.value(group, &PauliElement::scalar(n, 1));
        match self {
            PhaseClass::NoPhaseFactors => true,
            PhaseClass::MinusIdentityOnly => minus == Some(2),
            PhaseClass::AllScalars => imag == Some(1),
        }
    }
}

impl fmt::Display for PhaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseClass::AllScalars => "contains_minus_identity",
            PhaseClass::MinusIdentityOnly => "minus_identity_only",
            PhaseClass::NoPhaseFactors => "no_phase_factors",
        })
    }
}

impl FromStr for PhaseClass {
    type Err = DfsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "contains_minus_identity" | "all_scalars" => Ok(PhaseClass::AllScalars),
            "minus_identity_only" => Ok(PhaseClass::MinusIdentityOnly),
            "no_phase_factors" => Ok(PhaseClass::NoPhaseFactors),
            other => Err(DfsError::Domain(format!("unknown phase class {other:?}"))),
        }
    }
}

/// Closed-form DFS dimension for the supported characters of an Abelian
/// subgroup of order `n` on `k` qubits. Unsupported characters have dimension 0.
pub fn dimension_formula(k: usize, n: usize, class: PhaseClass) -> Result<u128> {
    let max_log = match class {
        PhaseClass::AllScalars => k + 2,
        PhaseClass::MinusIdentityOnly => k + 1,
        PhaseClass::NoPhaseFactors => k,
    };
    let min_order = class.weight() as usize;
    if n == 0 || !n.is_power_of_two() || n < min_order || n.trailing_zeros() as usize > max_log {
        return Err(DfsError::Domain(format!(
            "no Abelian subgroup of order {n} on {k} qubits in class {class}"
        )));
    }
    scaled_power_of_two(class.weight(), k, n)
}

/// Joint eigenspace of a set of group elements for one eigenvalue assignment.
#[derive(Clone, Debug)]
pub struct JointEigenspace {
    /// Exponents `k` with `g v = i^k v`, one per entry of `PauliSubgroup::generators`.
    pub generator_values: Vec<u8>,
    /// Exponents on every group element, in canonical order.
    pub values: Vec<u8>,
    pub basis: Vec<Ket>,
}

impl JointEigenspace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub spaces: Vec<JointEigenspace>,
}

impl SearchResult {
    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    pub fn total_dimension(&self) -> usize {
        self.spaces.iter().map(JointEigenspace::dimension).sum()
    }
}

/// Searches the whole space for simultaneous eigenvectors of all group
/// elements by intersecting eigenspaces one generator at a time. A non-Abelian
/// subgroup of the Pauli group has none.
pub fn nonabelian_one_dim_search(group: &PauliSubgroup, dense_limit: usize) -> Result<SearchResult> {
    check_dense(group.n_qubits(), dense_limit)?;
    let dim = 1usize << group.n_qubits();
    let mut seen = HashSet::new();
    let gens: Vec<&PauliElement> = group
        .generators()
        .iter()
        .filter(|g| seen.insert((*g).clone()))
        .collect();

    let mut branches: Vec<(Vec<u8>, DMatrix<Complex64>)> = vec![(Vec::new(), DMatrix::identity(dim, dim))];
    for g in gens {
        let mut next = Vec::new();
        for (prefix, q) in &branches {
            let gq = DMatrix::from_columns(
                &(0..q.ncols())
                    .map(|c| apply_pauli(g, &q.column(c).into_owned()))
                    .collect::<Vec<_>>(),
            );
            for k in 0..4u8 {
                let b = &gq - q * phase_value(k);
                let y = dense::null_space(&b, NULL_PROJECTION_TOL);
                if y.ncols() == 0 {
                    continue;
                }
                let mut values = prefix.clone();
                values.push(k);
                next.push((values, q * y));
            }
        }
        branches = next;
    }

    let spaces = branches
        .into_iter()
        .map(|(generator_values, q)| {
            let basis: Vec<Ket> = (0..q.ncols()).map(|c| q.column(c).into_owned()).collect();
            let v = &basis[0];
            let values = group
                .elements()
                .iter()
                .map(|g| nearest_phase(v.dotc(&apply_pauli(g, v))))
                .collect();
            JointEigenspace {
                generator_values,
                values,
                basis,
            }
        })
        .collect();
    Ok(SearchResult { spaces })
}

fn nearest_phase(z: Complex64) -> u8 {
    (0..4u8)
        .min_by(|&a, &b| (z - phase_value(a)).norm().total_cmp(&(z - phase_value(b)).norm()))
        .unwrap_or(0)
}
