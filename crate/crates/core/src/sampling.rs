//! Seeded random draws: complex Gaussian coefficients, Pauli elements and
//! random subgroups for property suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dfs::PhaseClass;
use crate::pauli::{Commutation, PauliElement};
use crate::subgroup::{PauliSubgroup, DEFAULT_ORDER_CAP};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Circularly symmetric complex normal with `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid sigma");
    Complex64::new(normal.sample(rng), normal.sample(rng))
}

/// Uniform Pauli string on `k <= 64` qubits; the phase is uniform over `{±1, ±i}`
/// when `with_phase`, else `+1`.
pub fn random_element<R: Rng + ?Sized>(k: usize, with_phase: bool, rng: &mut R) -> PauliElement {
    assert!((1..=64).contains(&k));
    let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let phase = if with_phase { rng.random_range(0..4u8) } else { 0 };
    PauliElement::from_words(k, phase, rng.random::<u64>() & mask, rng.random::<u64>() & mask)
}

/// Random Abelian subgroup in the requested phase class.
///
/// Draws up to `k + 2` Hermitian strings with random sign, keeps each one that
/// commutes with everything kept so far and does not bring `-I` into the
/// closure, then adjoins `-I` or `iI` as the class requires.
pub fn random_abelian_subgroup<R: Rng + ?Sized>(k: usize, class: PhaseClass, rng: &mut R) -> PauliSubgroup {
    let draws = rng.random_range(1..=k + 2);
    let mut kept: Vec<PauliElement> = Vec::new();
    for _ in 0..draws {
        let sign = if rng.random::<bool>() { 2 } else { 0 };
        let g = random_element(k, false, rng).with_phase(sign);
        if g.is_scalar() {
            continue;
        }
        if kept
            .iter()
            .any(|h| h.commutation_unchecked(&g) == Commutation::Anticommute)
        {
            continue;
        }
        let mut trial = kept.clone();
        trial.push(g);
        let closure = PauliSubgroup::closure_on(k, &trial, DEFAULT_ORDER_CAP).expect("bounded order");
        if !closure.contains_minus_identity() {
            kept = trial;
        }
    }
    match class {
        PhaseClass::NoPhaseFactors => {}
        PhaseClass::MinusIdentityOnly => kept.push(PauliElement::scalar(k, 2)),
        PhaseClass::AllScalars => kept.push(PauliElement::scalar(k, 1)),
    }
    PauliSubgroup::closure_on(k, &kept, DEFAULT_ORDER_CAP).expect("bounded order")
}

/// Random non-Abelian subgroup: between 2 and `k + 2` random elements (random
/// phases), redrawn until at least one pair anticommutes.
pub fn random_nonabelian_subgroup<R: Rng + ?Sized>(k: usize, rng: &mut R) -> PauliSubgroup {
    loop {
        let count = rng.random_range(2..=k + 2);
        let gens: Vec<PauliElement> = (0..count).map(|_| random_element(k, true, rng)).collect();
        let group = PauliSubgroup::closure_on(k, &gens, DEFAULT_ORDER_CAP).expect("bounded order");
        if !group.is_abelian() {
            return group;
        }
    }
}
