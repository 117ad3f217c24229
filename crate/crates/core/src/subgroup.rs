//! Subgroups of the Pauli group: closure from generators, structural flags and
//! the one-dimensional characters of Abelian subgroups.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{DfsError, Result};
use crate::pauli::{phase_value, Commutation, PauliElement};

/// Default cap on subgroup order during closure.
pub const DEFAULT_ORDER_CAP: usize = 1 << 20;

/// Human-readable form of `i^k`.
pub fn phase_label(k: u8) -> &'static str {
    match k & 3 {
        0 => "+1",
        1 => "+i",
        2 => "-1",
        _ => "-i",
    }
}

/// Independent generating set of an Abelian subgroup, built as a tower
/// `H_0 = {I} < H_1 < …` where `H_i` is the union of cosets `g_i^j H_{i-1}`.
#[derive(Clone, Debug)]
struct AbelianTower {
    generators: Vec<PauliElement>,
    /// Smallest `m_i > 0` with `g_i^{m_i} ∈ H_{i-1}`; always 2 or 4.
    orders: Vec<u8>,
    /// Coordinates of `g_i^{m_i}` in terms of `g_0 … g_{i-1}`.
    relations: Vec<Vec<u8>>,
    /// Coordinates of every group element, aligned with `PauliSubgroup::elements`.
    coords: Vec<Vec<u8>>,
}

/// A closed subgroup of `P_K` with its generators and structural flags.
#[derive(Clone, Debug)]
pub struct PauliSubgroup {
    n_qubits: usize,
    elements: Vec<PauliElement>,
    index: HashMap<PauliElement, usize>,
    generators: Vec<PauliElement>,
    is_abelian: bool,
    contains_minus_identity: bool,
    contains_imaginary_identity: bool,
    fingerprint: u64,
    tower: Option<AbelianTower>,
}

impl PartialEq for PauliSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.elements == other.elements
    }
}

impl PauliSubgroup {
    /// Smallest subgroup containing `generators`. An empty list yields `{I}` on one qubit.
    pub fn closure(generators: &[PauliElement]) -> Result<Self> {
        let n = generators.first().map_or(1, PauliElement::n_qubits);
        Self::closure_on(n, generators, DEFAULT_ORDER_CAP)
    }

    /// Closure on an explicit qubit count with an explicit order cap.
    pub fn closure_on(n_qubits: usize, generators: &[PauliElement], cap: usize) -> Result<Self> {
        for g in generators {
            if g.n_qubits() != n_qubits {
                return Err(DfsError::QubitMismatch {
                    left: n_qubits,
                    right: g.n_qubits(),
                });
            }
        }

        let identity = PauliElement::identity(n_qubits);
        let mut seen: HashMap<PauliElement, ()> = HashMap::new();
        let mut elements = vec![identity.clone()];
        seen.insert(identity.clone(), ());
        let mut queue = VecDeque::from([identity.clone()]);
        while let Some(e) = queue.pop_front() {
            for g in generators {
                let prod = e.mul_unchecked(g);
                if seen.contains_key(&prod) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(DfsError::OrderCap { cap });
                }
                seen.insert(prod.clone(), ());
                elements.push(prod.clone());
                queue.push_back(prod);
            }
        }
        elements.sort();

        let is_abelian = generators.iter().enumerate().all(|(i, a)| {
            generators[i + 1..]
                .iter()
                .all(|b| a.commutation_unchecked(b) == Commutation::Commute)
        });
        let index: HashMap<PauliElement, usize> = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let contains_minus_identity = index.contains_key(&PauliElement::scalar(n_qubits, 2));
        let contains_imaginary_identity = index.contains_key(&PauliElement::scalar(n_qubits, 1));
        let fingerprint = fingerprint(&elements);

        let mut group = PauliSubgroup {
            n_qubits,
            elements,
            index,
            generators: generators.to_vec(),
            is_abelian,
            contains_minus_identity,
            contains_imaginary_identity,
            fingerprint,
            tower: None,
        };
        if is_abelian {
            group.tower = Some(group.build_tower());
        }
        Ok(group)
    }

    /// Closure of the system operators of an interaction Hamiltonian. The Kraus
    /// operators it induces live in the group algebra of exactly this subgroup.
    pub fn from_error_generators(terms: &[PauliElement]) -> Result<Self> {
        Self::closure(terms)
    }

    fn build_tower(&self) -> AbelianTower {
        let n = self.n_qubits;
        let identity = PauliElement::identity(n);
        let mut members: HashMap<PauliElement, Vec<u8>> = HashMap::from([(identity, Vec::new())]);
        let mut tower = AbelianTower {
            generators: Vec::new(),
            orders: Vec::new(),
            relations: Vec::new(),
            coords: Vec::new(),
        };

        for g in &self.generators {
            if members.contains_key(g) {
                continue;
            }
            let mut power = g.clone();
            let mut order = 1u8;
            while !members.contains_key(&power) {
                power = power.mul_unchecked(g);
                order += 1;
            }
            let relation = members[&power].clone();

            let old: Vec<(PauliElement, Vec<u8>)> = members.drain().collect();
            let mut g_pow = PauliElement::identity(n);
            for j in 0..order {
                for (h, c) in &old {
                    let mut coords = c.clone();
                    coords.push(j);
                    members.insert(g_pow.mul_unchecked(h), coords);
                }
                g_pow = g_pow.mul_unchecked(g);
            }
            tower.generators.push(g.clone());
            tower.orders.push(order);
            tower.relations.push(relation);
        }

        let r = tower.generators.len();
        tower.coords = self
            .elements
            .iter()
            .map(|e| {
                let mut c = members.remove(e).expect("tower spans the closure");
                c.resize(r, 0);
                c
            })
            .collect();
        tower
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Elements in canonical order: phase, then X mask, then Z mask.
    pub fn elements(&self) -> &[PauliElement] {
        &self.elements
    }

    pub fn generators(&self) -> &[PauliElement] {
        &self.generators
    }

    /// Independent generators found while sifting, for Abelian groups.
    pub fn independent_generators(&self) -> Option<&[PauliElement]> {
        self.tower.as_ref().map(|t| t.generators.as_slice())
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_abelian(&self) -> bool {
        self.is_abelian
    }

    pub fn contains_minus_identity(&self) -> bool {
        self.contains_minus_identity
    }

    pub fn contains_imaginary_identity(&self) -> bool {
        self.contains_imaginary_identity
    }

    pub fn contains(&self, p: &PauliElement) -> bool {
        self.index.contains_key(p)
    }

    pub fn position(&self, p: &PauliElement) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// All one-dimensional characters, trivial first, then in lexicographic order
    /// of the values taken on the independent generators.
    pub fn characters(&self) -> Result<Vec<Character>> {
        let tower = self.tower.as_ref().ok_or(DfsError::NonAbelian)?;
        let mut assignments: Vec<Vec<u8>> = vec![Vec::new()];
        for (i, &order) in tower.orders.iter().enumerate() {
            let mut next = Vec::with_capacity(assignments.len() * order as usize);
            for prefix in &assignments {
                // χ(g_i)^{m_i} must equal χ(g_i^{m_i}), which is fixed by the prefix.
                let target = dot_mod4(&tower.relations[i], prefix);
                for c in 0..4u8 {
                    if (order as u32 * c as u32) % 4 == target as u32 {
                        let mut a = prefix.clone();
                        a.push(c);
                        next.push(a);
                    }
                }
            }
            assignments = next;
        }
        assignments.sort();

        Ok(assignments
            .into_iter()
            .enumerate()
            .map(|(i, generator_values)| {
                let values = tower.coords.iter().map(|c| dot_mod4(c, &generator_values)).collect();
                Character {
                    label: i + 1,
                    n_qubits: self.n_qubits,
                    fingerprint: self.fingerprint,
                    generator_values,
                    values,
                }
            })
            .collect())
    }

    /// Character built from explicit values on the independent generators, if
    /// they respect the group relations.
    pub fn character_from_generator_values(&self, label: usize, generator_values: &[u8]) -> Result<Character> {
        let tower = self.tower.as_ref().ok_or(DfsError::NonAbelian)?;
        if generator_values.len() != tower.generators.len() {
            return Err(DfsError::ForeignCharacter);
        }
        for (i, &order) in tower.orders.iter().enumerate() {
            let target = dot_mod4(&tower.relations[i], &generator_values[..i]);
            if (order as u32 * generator_values[i] as u32) % 4 != target as u32 {
                return Err(DfsError::ForeignCharacter);
            }
        }
        let values = tower.coords.iter().map(|c| dot_mod4(c, generator_values)).collect();
        Ok(Character {
            label,
            n_qubits: self.n_qubits,
            fingerprint: self.fingerprint,
            generator_values: generator_values.iter().map(|v| v & 3).collect(),
            values,
        })
    }

    pub(crate) fn owns(&self, ch: &Character) -> bool {
        ch.fingerprint == self.fingerprint && ch.n_qubits == self.n_qubits && ch.values.len() == self.order()
    }

    /// `Σ_n |tr G_n|²` over the natural representation, with the verdict
    /// "irreducible" exactly when the sum equals the group order.
    pub fn reducibility_sum(&self, dense_limit: usize) -> Result<(f64, Reducibility)> {
        crate::dense::check_dense(self.n_qubits, dense_limit)?;
        let dim = 1u64 << self.n_qubits;
        let mut sum = 0.0;
        for g in &self.elements {
            // Off-diagonal permutation whenever the X mask is nonzero.
            if !g.x_mask().is_zero() {
                continue;
            }
            let trace: num_complex::Complex64 = (0..dim).map(|b| phase_value(g.act_on_basis(b).1)).sum();
            sum += trace.norm_sqr();
        }
        let n = self.order() as f64;
        let verdict = if (sum - n).abs() < 0.5 {
            Reducibility::Irreducible
        } else {
            Reducibility::Reducible
        };
        Ok((sum, verdict))
    }

    pub fn to_json_value(&self) -> SubgroupJson {
        SubgroupJson {
            n_qubits: self.n_qubits,
            generators: self.generators.iter().map(ToString::to_string).collect(),
            elements: self.elements.iter().map(ToString::to_string).collect(),
            order: self.order(),
            is_abelian: self.is_abelian,
            contains_minus_identity: self.contains_minus_identity,
            contains_imaginary_identity: self.contains_imaginary_identity,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value())?)
    }

    /// Rebuilds the subgroup from its generators and checks the listed elements.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SubgroupJson = serde_json::from_str(text)?;
        doc.try_into()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reducibility {
    Irreducible,
    Reducible,
}

/// Wire form of a subgroup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgroupJson {
    pub n_qubits: usize,
    pub generators: Vec<String>,
    pub elements: Vec<String>,
    pub order: usize,
    pub is_abelian: bool,
    pub contains_minus_identity: bool,
    #[serde(default)]
    pub contains_imaginary_identity: bool,
}

impl TryFrom<SubgroupJson> for PauliSubgroup {
    type Error = DfsError;

    fn try_from(doc: SubgroupJson) -> Result<Self> {
        let generators = doc
            .generators
            .iter()
            .map(|s| PauliElement::parse(s, Some(doc.n_qubits)))
            .collect::<Result<Vec<_>>>()?;
        let group = PauliSubgroup::closure_on(doc.n_qubits, &generators, DEFAULT_ORDER_CAP)?;
        let listed = doc
            .elements
            .iter()
            .map(|s| PauliElement::parse(s, Some(doc.n_qubits)))
            .collect::<Result<Vec<_>>>()?;
        let mut sorted = listed.clone();
        sorted.sort();
        if sorted != group.elements || doc.order != group.order() {
            return Err(DfsError::Domain(
                "listed elements do not match the closure of the generators".into(),
            ));
        }
        Ok(group)
    }
}

/// A one-dimensional irrep: each group element maps to `i^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    label: usize,
    n_qubits: usize,
    fingerprint: u64,
    generator_values: Vec<u8>,
    values: Vec<u8>,
}

impl Character {
    /// 1-based index `k` of `Γ^k`.
    pub fn label(&self) -> usize {
        self.label
    }

    /// Exponents on the group's elements, aligned with [`PauliSubgroup::elements`].
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Exponents on [`PauliSubgroup::independent_generators`].
    pub fn generator_values(&self) -> &[u8] {
        &self.generator_values
    }

    pub fn value_at(&self, index: usize) -> u8 {
        self.values[index]
    }

    pub fn value(&self, group: &PauliSubgroup, p: &PauliElement) -> Option<u8> {
        if !group.owns(self) {
            return None;
        }
        group.position(p).map(|i| self.values[i])
    }

    pub fn complex_value_at(&self, index: usize) -> num_complex::Complex64 {
        phase_value(self.values[index])
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn summary(&self, group: &PauliSubgroup) -> CharacterJson {
        CharacterJson {
            label: self.label,
            values: group
                .elements()
                .iter()
                .zip(&self.values)
                .map(|(e, &v)| (e.to_string(), phase_label(v).to_string()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterJson {
    pub label: usize,
    /// `(element, value)` pairs in canonical element order.
    pub values: Vec<(String, String)>,
}

fn dot_mod4(coords: &[u8], values: &[u8]) -> u8 {
    (coords
        .iter()
        .zip(values)
        .map(|(&a, &b)| a as u32 * b as u32)
        .sum::<u32>()
        % 4) as u8
}

fn fingerprint(elements: &[PauliElement]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0100_0000_01b3;
    let mut h = OFFSET;
    let mut feed = |v: u64| {
        for byte in v.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    for e in elements {
        feed(e.phase() as u64);
        e.x_mask().words().iter().for_each(|&w| feed(w));
        e.z_mask().words().iter().for_each(|&w| feed(w));
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliElement {
        s.parse().unwrap()
    }

    fn group(gens: &[&str]) -> PauliSubgroup {
        PauliSubgroup::closure(&gens.iter().map(|s| p(s)).collect::<Vec<_>>()).unwrap()
    }

    fn strings(g: &PauliSubgroup) -> Vec<String> {
        g.elements().iter().map(ToString::to_string).collect()
    }

    #[test]
    fn qz_closure() {
        let g = group(&["ZI", "IZ"]);
        assert_eq!(g.order(), 4);
        assert_eq!(strings(&g), ["+II", "+IZ", "+ZI", "+ZZ"]);
        assert!(g.is_abelian());
        assert!(!g.contains_minus_identity());
    }

    #[test]
    fn q2z_from_six_pairs() {
        let g = group(&["ZZII", "ZIIZ", "IIZZ", "ZIZI", "IZZI", "IZIZ"]);
        let expected = group(&["IIII", "ZZII", "ZIIZ", "IIZZ", "ZIZI", "IZZI", "IZIZ", "ZZZZ"]);
        assert_eq!(g.order(), 8);
        assert_eq!(g, expected);
        assert_eq!(g.independent_generators().unwrap().len(), 3);
    }

    #[test]
    fn empty_generators() {
        let g = PauliSubgroup::closure(&[]).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.elements()[0].is_identity());
        let chars = g.characters().unwrap();
        assert_eq!(chars.len(), 1);
        assert!(chars[0].is_trivial());
    }

    #[test]
    fn hamiltonian_terms() {
        let g = PauliSubgroup::from_error_generators(&[p("ZI"), p("IZ")]).unwrap();
        assert_eq!(strings(&g), ["+II", "+IZ", "+ZI", "+ZZ"]);
        let g = PauliSubgroup::from_error_generators(&[p("ZZII"), p("IIZZ")]).unwrap();
        assert_eq!(strings(&g), ["+IIII", "+IIZZ", "+ZZII", "+ZZZZ"]);
    }

    #[test]
    fn mixed_sizes_rejected() {
        assert!(matches!(
            PauliSubgroup::closure(&[p("ZI"), p("Z")]),
            Err(DfsError::QubitMismatch { .. })
        ));
    }

    #[test]
    fn cap_enforced() {
        let gens = [p("XI"), p("ZI"), p("IX"), p("IZ")];
        assert!(matches!(
            PauliSubgroup::closure_on(2, &gens, 10),
            Err(DfsError::OrderCap { cap: 10 })
        ));
        assert_eq!(PauliSubgroup::closure_on(2, &gens, 64).unwrap().order(), 32);
    }

    #[test]
    fn q8_is_nonabelian() {
        let g = group(&["XXI", "IZZ"]);
        assert_eq!(g.order(), 8);
        assert!(!g.is_abelian());
        assert!(g.contains_minus_identity());
        assert!(g.contains(&p("+iXYZ")));
        assert!(matches!(g.characters(), Err(DfsError::NonAbelian)));
    }

    #[test]
    fn qx_sign_table() {
        let g = group(&["XXII", "IIXX"]);
        let chars = g.characters().unwrap();
        let order = [p("IIII"), p("XXII"), p("IIXX"), p("XXXX")];
        let rows: Vec<Vec<&str>> = chars
            .iter()
            .map(|c| order.iter().map(|e| phase_label(c.value(&g, e).unwrap())).collect())
            .collect();
        assert_eq!(
            rows,
            vec![
                vec!["+1", "+1", "+1", "+1"],
                vec!["+1", "+1", "-1", "-1"],
                vec!["+1", "-1", "+1", "-1"],
                vec!["+1", "-1", "-1", "+1"],
            ]
        );
    }

    #[test]
    fn imaginary_identity_gives_quarter_turn_values() {
        let g = group(&["iI"]);
        assert_eq!(g.order(), 4);
        assert!(g.contains_imaginary_identity());
        let vals: Vec<u8> = g
            .characters()
            .unwrap()
            .iter()
            .map(|c| c.value(&g, &p("iI")).unwrap())
            .collect();
        assert_eq!(vals, [0, 1, 2, 3]);
    }

    #[test]
    fn character_from_values_respects_relations() {
        let g = group(&["-I", "Z"]);
        // -I has relative order 2 with (-I)^2 = I, so its value is ±1.
        assert!(g.character_from_generator_values(1, &[1, 0]).is_err());
        assert!(g.character_from_generator_values(1, &[2, 0]).is_ok());
    }

    #[test]
    fn reducibility() {
        let p1 = group(&["X", "Z", "iI"]);
        assert_eq!(p1.order(), 16);
        let (sum, verdict) = p1.reducibility_sum(12).unwrap();
        assert_eq!(sum, 16.0);
        assert_eq!(verdict, Reducibility::Irreducible);

        let qx = group(&["XXII", "IIXX"]);
        assert_eq!(qx.reducibility_sum(12).unwrap(), (256.0, Reducibility::Reducible));

        let trivial = PauliSubgroup::closure_on(2, &[], DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(trivial.reducibility_sum(12).unwrap(), (16.0, Reducibility::Reducible));
        assert!(qx.reducibility_sum(3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = group(&["ZZII", "IIZZ"]);
        let text = g.to_json().unwrap();
        let back = PauliSubgroup::from_json(&text).unwrap();
        assert_eq!(back, g);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["order"], 4);
        assert_eq!(value["is_abelian"], true);
        assert_eq!(value["elements"][1], "+IIZZ");

        let mut bad: SubgroupJson = serde_json::from_str(&text).unwrap();
        bad.elements.pop();
        assert!(PauliSubgroup::try_from(bad).is_err());
    }

    #[test]
    fn foreign_character_lookup() {
        let a = group(&["ZI", "IZ"]);
        let b = group(&["XI", "IX"]);
        let ch = &b.characters().unwrap()[1];
        assert_eq!(ch.value(&a, &p("ZI")), None);
    }
}
