//! Exact arithmetic on Pauli-group elements in symplectic (X-mask, Z-mask) form.
//!
//! An element is `i^phase · σ_1 ⊗ … ⊗ σ_K`, where each `σ_j` is one of the
//! letters `I, X, Y, Z` chosen by the bit pair `(x_j, z_j)`:
//! `(0,0) = I`, `(1,0) = X`, `(0,1) = Z`, `(1,1) = Y`. The phase counts the
//! factor in front of the *letters*, so the string `"Y"` has phase 0 and
//! `Y = i·X·Z` is accounted for inside [`PauliElement::mul`].
//!
//! Qubit 1 is the leftmost letter and the most significant bit of both the
//! masks and computational-basis indices: `"ZI"` has `z_mask = 0b10`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{DfsError, Result};

/// `i^k` as a complex number.
pub fn phase_value(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Order of the full Pauli group on `k` qubits, `4^(k+1)`, when it fits in a `u128`.
pub fn pauli_group_order(k: usize) -> Option<u128> {
    4u128.checked_pow(u32::try_from(k + 1).ok()?)
}

/// Number of phase-free Pauli strings on `k` qubits, `4^k`.
pub fn pauli_string_count(k: usize) -> Option<u128> {
    4u128.checked_pow(u32::try_from(k).ok()?)
}

/// K-bit vector stored in little-endian 64-bit words. Bit `i` of the mask is
/// qubit `K - i` (1-based), so for `K <= 64` the first word reads like the
/// letter string written in binary.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMask {
    words: Vec<u64>,
}

impl BitMask {
    pub fn zeros(n_bits: usize) -> Self {
        BitMask {
            words: vec![0; n_bits.div_ceil(64).max(1)],
        }
    }

    pub fn from_word(word: u64, n_bits: usize) -> Self {
        let mut mask = Self::zeros(n_bits);
        mask.words[0] = word;
        mask.clear_above(n_bits);
        mask
    }

    pub fn get(&self, bit: usize) -> bool {
        self.words.get(bit / 64).is_some_and(|w| (w >> (bit % 64)) & 1 == 1)
    }

    pub fn set(&mut self, bit: usize, value: bool) {
        let word = &mut self.words[bit / 64];
        if value {
            *word |= 1 << (bit % 64);
        } else {
            *word &= !(1 << (bit % 64));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Lowest word; the whole mask when `K <= 64`.
    pub fn low_word(&self) -> u64 {
        self.words[0]
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn zip_count(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b).count_ones())
            .sum()
    }

    fn xor(&self, other: &Self) -> Self {
        BitMask {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        }
    }

    fn clear_above(&mut self, n_bits: usize) {
        for (i, word) in self.words.iter_mut().enumerate() {
            let lo = i * 64;
            if lo >= n_bits {
                *word = 0;
            } else if n_bits - lo < 64 {
                *word &= (1u64 << (n_bits - lo)) - 1;
            }
        }
    }
}

impl Ord for BitMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for BitMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Whether two Pauli elements commute or anticommute. There is no third case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Commutation {
    Commute,
    Anticommute,
}

/// Single-qubit letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// One member of the Pauli group `P_K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliElement {
    n_qubits: usize,
    phase: u8,
    x: BitMask,
    z: BitMask,
}

impl PauliElement {
    pub fn identity(n_qubits: usize) -> Self {
        Self::scalar(n_qubits, 0)
    }

    /// `i^phase · I`.
    pub fn scalar(n_qubits: usize, phase: u8) -> Self {
        assert!(n_qubits >= 1, "a Pauli element needs at least one qubit");
        PauliElement {
            n_qubits,
            phase: phase & 3,
            x: BitMask::zeros(n_qubits),
            z: BitMask::zeros(n_qubits),
        }
    }

    /// Builds an element from masks. Bits at positions `>= n_qubits` are dropped.
    pub fn from_masks(n_qubits: usize, phase: u8, mut x: BitMask, mut z: BitMask) -> Self {
        assert!(n_qubits >= 1, "a Pauli element needs at least one qubit");
        let words = n_qubits.div_ceil(64);
        x.words.resize(words, 0);
        z.words.resize(words, 0);
        x.clear_above(n_qubits);
        z.clear_above(n_qubits);
        PauliElement {
            n_qubits,
            phase: phase & 3,
            x,
            z,
        }
    }

    /// Convenience constructor for `K <= 64`.
    pub fn from_words(n_qubits: usize, phase: u8, x: u64, z: u64) -> Self {
        Self::from_masks(
            n_qubits,
            phase,
            BitMask::from_word(x, n_qubits),
            BitMask::from_word(z, n_qubits),
        )
    }

    pub fn parse(text: &str, n_qubits: Option<usize>) -> Result<Self> {
        parse_pauli(text, n_qubits)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Exponent `k` of the global factor `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn x_mask(&self) -> &BitMask {
        &self.x
    }

    pub fn z_mask(&self) -> &BitMask {
        &self.z
    }

    /// Letter on 0-based string position `pos` (qubit `pos + 1`).
    pub fn letter(&self, pos: usize) -> Letter {
        let bit = self.n_qubits - 1 - pos;
        Letter::from_bits(self.x.get(bit), self.z.get(bit))
    }

    /// True for the four scalar multiples `±I, ±iI`.
    pub fn is_scalar(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.phase == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// Same letters, phase reset to `+1`.
    pub fn without_phase(&self) -> Self {
        PauliElement {
            phase: 0,
            ..self.clone()
        }
    }

    pub fn with_phase(&self, phase: u8) -> Self {
        PauliElement {
            phase: phase & 3,
            ..self.clone()
        }
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> u32 {
        self.x
            .words
            .iter()
            .zip(&self.z.words)
            .map(|(a, b)| (a | b).count_ones())
            .sum()
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(DfsError::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Group product `self · other`, phase included.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_size(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        // Per qubit, σ(x,z) = i^{xz} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{z1 x2}.
        let y1 = self.x.zip_count(&self.z, |a, b| a & b) as i64;
        let y2 = other.x.zip_count(&other.z, |a, b| a & b) as i64;
        let swap = self.z.zip_count(&other.x, |a, b| a & b) as i64;
        let x = self.x.xor(&other.x);
        let z = self.z.xor(&other.z);
        let y = x.zip_count(&z, |a, b| a & b) as i64;
        let phase = (self.phase as i64 + other.phase as i64 + y1 + y2 + 2 * swap - y).rem_euclid(4);
        PauliElement {
            n_qubits: self.n_qubits,
            phase: phase as u8,
            x,
            z,
        }
    }

    pub fn commutes(&self, other: &Self) -> Result<Commutation> {
        self.check_same_size(other)?;
        Ok(self.commutation_unchecked(other))
    }

    pub(crate) fn commutation_unchecked(&self, other: &Self) -> Commutation {
        let overlap = self.x.zip_count(&other.z, |a, b| a & b) + self.z.zip_count(&other.x, |a, b| a & b);
        if overlap.is_multiple_of(2) {
            Commutation::Commute
        } else {
            Commutation::Anticommute
        }
    }

    /// `p†`: same letters, conjugated phase.
    pub fn adjoint(&self) -> Self {
        self.with_phase((4 - self.phase) & 3)
    }

    /// Group inverse; equals the adjoint because every element is unitary.
    pub fn inverse(&self) -> Self {
        self.adjoint()
    }

    /// Action on a computational basis state `|b⟩`: returns `(b', k)` with
    /// `p|b⟩ = i^k |b'⟩`. Only valid for `K <= 64`.
    pub fn act_on_basis(&self, b: u64) -> (u64, u8) {
        debug_assert!(self.n_qubits <= 64);
        let x = self.x.low_word();
        let z = self.z.low_word();
        let k = self.phase as u32 + (x & z).count_ones() + 2 * (z & b).count_ones();
        (b ^ x, (k & 3) as u8)
    }

    /// Trace of the natural representation as `(phase exponent, log2 magnitude)`;
    /// `None` for traceless elements.
    pub fn trace_symbolic(&self) -> Option<(u8, usize)> {
        self.is_scalar().then_some((self.phase, self.n_qubits))
    }
}

impl Ord for PauliElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n_qubits
            .cmp(&other.n_qubits)
            .then(self.phase.cmp(&other.phase))
            .then_with(|| self.x.cmp(&other.x))
            .then_with(|| self.z.cmp(&other.z))
    }
}

impl PartialOrd for PauliElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(sign)?;
        for pos in 0..self.n_qubits {
            write!(f, "{}", self.letter(pos).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliElement {
    type Err = DfsError;

    fn from_str(s: &str) -> Result<Self> {
        parse_pauli(s, None)
    }
}

impl Serialize for PauliElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `sign? body` with sign in `{+, -, +i, -i, i}` and body in `{I,X,Y,Z}+`.
/// Error positions are 0-based character offsets into `text`.
pub fn parse_pauli(text: &str, n_qubits: Option<usize>) -> Result<PauliElement> {
    let chars: Vec<char> = text.chars().collect();
    let err = |position: usize, message: String| DfsError::Parse { position, message };

    let mut pos = 0;
    while pos < chars.len() && chars[pos].is_whitespace() {
        pos += 1;
    }
    let mut end = chars.len();
    while end > pos && chars[end - 1].is_whitespace() {
        end -= 1;
    }

    let mut phase = 0u8;
    match chars.get(pos) {
        Some('+') => pos += 1,
        Some('-') => {
            phase = 2;
            pos += 1;
        }
        _ => {}
    }
    if chars.get(pos) == Some(&'i') {
        phase = (phase + 1) & 3;
        pos += 1;
    }

    let body = &chars[pos.min(end)..end];
    if body.is_empty() {
        return Err(err(pos, "empty Pauli body".into()));
    }
    let n = body.len();
    if let Some(expected) = n_qubits {
        if expected != n {
            return Err(err(pos, format!("expected {expected} letters, found {n}")));
        }
    }

    let mut x = BitMask::zeros(n);
    let mut z = BitMask::zeros(n);
    for (offset, &c) in body.iter().enumerate() {
        let letter = match c {
            'I' => Letter::I,
            'X' => Letter::X,
            'Y' => Letter::Y,
            'Z' => Letter::Z,
            other => {
                return Err(err(
                    pos + offset,
                    format!("unexpected character {other:?}, expected one of I, X, Y, Z"),
                ))
            }
        };
        let (xb, zb) = letter.bits();
        let bit = n - 1 - offset;
        x.set(bit, xb);
        z.set(bit, zb);
    }
    Ok(PauliElement {
        n_qubits: n,
        phase,
        x,
        z,
    })
}
