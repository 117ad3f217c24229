mod common;

use common::*;
use dfs_core::channel::{apply_channel, random_group_algebra_kraus, DensityMatrix};
use dfs_core::dfs::{self, dimension_formula, PhaseClass};
use dfs_core::sampling::{random_abelian_subgroup, random_element, seeded_rng};
use dfs_core::{Commutation, DenseOperator, PauliElement, PauliSubgroup};
use proptest::prelude::*;

const LIMIT: usize = 12;

fn element(max_qubits: usize) -> impl Strategy<Value = PauliElement> {
    (1..=max_qubits, any::<u64>()).prop_map(|(k, seed)| random_element(k, true, &mut seeded_rng(seed)))
}

fn same_size_pair(max_qubits: usize) -> impl Strategy<Value = (PauliElement, PauliElement)> {
    (1..=max_qubits, any::<u64>()).prop_map(|(k, seed)| {
        let mut rng = seeded_rng(seed);
        (random_element(k, true, &mut rng), random_element(k, true, &mut rng))
    })
}

fn abelian_group(max_qubits: usize) -> impl Strategy<Value = PauliSubgroup> {
    (1..=max_qubits, 0..3usize, any::<u64>()).prop_map(|(k, class, seed)| {
        let class = [
            PhaseClass::NoPhaseFactors,
            PhaseClass::MinusIdentityOnly,
            PhaseClass::AllScalars,
        ][class];
        random_abelian_subgroup(k, class, &mut seeded_rng(seed))
    })
}

fn diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn format_parse_round_trip(p in element(64)) {
        let text = p.to_string();
        prop_assert_eq!(text.parse::<PauliElement>().unwrap(), p.clone());
        let json = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<PauliElement>(&json).unwrap(), p);
    }

    #[test]
    fn dense_matches_kronecker(p in element(5)) {
        let lib = DenseOperator::from_pauli(&p, LIMIT).unwrap();
        prop_assert!(diff(lib.matrix(), &pauli_matrix(&p.to_string())) < 1e-15);
        prop_assert!(lib.is_unitary(1e-12));
        prop_assert_eq!(lib.is_hermitian(1e-12), p.is_hermitian());
    }

    #[test]
    fn product_is_homomorphic((p, q) in same_size_pair(5)) {
        let pq = p.mul(&q).unwrap();
        let expected = pauli_matrix(&p.to_string()) * pauli_matrix(&q.to_string());
        prop_assert!(diff(&pauli_matrix(&pq.to_string()), &expected) < 1e-12);
    }

    #[test]
    fn commutation_matches_matrices((p, q) in same_size_pair(5)) {
        let a = pauli_matrix(&p.to_string());
        let b = pauli_matrix(&q.to_string());
        let commute = diff(&(&a * &b), &(&b * &a)) < 1e-12;
        let expected = if commute { Commutation::Commute } else { Commutation::Anticommute };
        prop_assert_eq!(p.commutes(&q).unwrap(), expected);
        if !commute {
            prop_assert!(diff(&(&a * &b), &(-(&b * &a))) < 1e-12);
        }
    }

    #[test]
    fn wide_group_axioms(k in 1usize..=130, seed in any::<u64>()) {
        // Beyond 64 qubits the masks span several words.
        let mut rng = seeded_rng(seed);
        let mut draw = || {
            let mut s = String::new();
            for _ in 0..k {
                s.push(['I', 'X', 'Y', 'Z'][rand::Rng::random_range(&mut rng, 0..4)]);
            }
            s.parse::<PauliElement>().unwrap()
        };
        let (a, b, c) = (draw(), draw(), draw());
        prop_assert_eq!(a.to_string().parse::<PauliElement>().unwrap(), a.clone());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert!(a.mul(&a.inverse()).unwrap().is_identity());
        prop_assert_eq!(a.mul(&PauliElement::identity(k)).unwrap(), a.clone());
        let ab = a.mul(&b).unwrap();
        let ba = b.mul(&a).unwrap();
        match a.commutes(&b).unwrap() {
            Commutation::Commute => prop_assert_eq!(ab, ba),
            Commutation::Anticommute => prop_assert_eq!(ab, ba.with_phase((ba.phase() + 2) % 4)),
        }
    }

    #[test]
    fn adjoint_is_conjugate_transpose(p in element(4)) {
        let m = pauli_matrix(&p.to_string());
        prop_assert!(diff(&pauli_matrix(&p.adjoint().to_string()), &m.adjoint()) < 1e-15);
        prop_assert_eq!(p.adjoint(), p.inverse());
    }

    #[test]
    fn basis_action_matches_matrix(p in element(6), b in any::<u64>()) {
        let k = p.n_qubits();
        let b = b & ((1u64 << k) - 1);
        let (row, phase) = p.act_on_basis(b);
        let m = pauli_matrix(&p.to_string());
        let expected = [c(1., 0.), c(0., 1.), c(-1., 0.), c(0., -1.)][phase as usize];
        prop_assert!((m[(row as usize, b as usize)] - expected).norm() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_is_a_group(k in 1usize..=4, seed in any::<u64>(), count in 1usize..=4) {
        let mut rng = seeded_rng(seed);
        let gens: Vec<PauliElement> = (0..count).map(|_| random_element(k, true, &mut rng)).collect();
        let g = PauliSubgroup::closure(&gens).unwrap();
        prop_assert!(g.order().is_power_of_two());
        for x in &gens {
            prop_assert!(g.contains(x));
        }
        for x in g.elements() {
            prop_assert!(g.contains(&x.inverse()));
            for y in g.elements() {
                prop_assert!(g.contains(&x.mul(y).unwrap()));
            }
        }
        let again = PauliSubgroup::closure(g.elements()).unwrap();
        prop_assert_eq!(again.elements(), g.elements());
        prop_assert_eq!(PauliSubgroup::from_json(&g.to_json().unwrap()).unwrap(), g);
    }

    #[test]
    fn characters_are_homomorphisms(g in abelian_group(5)) {
        let chars = g.characters().unwrap();
        prop_assert_eq!(chars.len(), g.order());
        for ch in &chars {
            for (i, x) in g.elements().iter().enumerate() {
                for (j, y) in g.elements().iter().enumerate() {
                    let xy = g.position(&x.mul(y).unwrap()).unwrap();
                    prop_assert_eq!(ch.value_at(xy), (ch.value_at(i) + ch.value_at(j)) % 4);
                }
            }
        }
        // Row orthogonality: Σ χ_a χ_b* = N δ_ab.
        for a in &chars {
            for b in &chars {
                let s: num_complex::Complex64 = (0..g.order())
                    .map(|i| a.complex_value_at(i) * b.complex_value_at(i).conj())
                    .sum();
                let expected = if a == b { g.order() as f64 } else { 0.0 };
                prop_assert!((s - c(expected, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn projectors_resolve_identity(g in abelian_group(4)) {
        let dim = 1usize << g.n_qubits();
        let chars = g.characters().unwrap();
        let ps: Vec<M> = chars
            .iter()
            .map(|ch| dfs::projector(&g, ch, LIMIT).unwrap().matrix.into_matrix())
            .collect();
        let sum = ps.iter().fold(M::zeros(dim, dim), |acc, p| acc + p);
        prop_assert!(diff(&sum, &M::identity(dim, dim)) < 1e-12);
        for (i, a) in ps.iter().enumerate() {
            prop_assert!(diff(a, &a.adjoint()) < 1e-12);
            for (j, b) in ps.iter().enumerate() {
                let expected = if i == j { a.clone() } else { M::zeros(dim, dim) };
                prop_assert!(diff(&(a * b), &expected) < 1e-12);
            }
        }
    }

    #[test]
    fn bases_are_orthonormal_eigenvectors(g in abelian_group(5)) {
        let class = PhaseClass::of(&g);
        let formula = dimension_formula(g.n_qubits(), g.order(), class).unwrap();
        let mats: Vec<M> = g.elements().iter().map(|e| pauli_matrix(&e.to_string())).collect();
        let mut total = 0;
        for ch in g.characters().unwrap() {
            let b = dfs::dfs_basis(&g, &ch, LIMIT).unwrap();
            let m = b.vectors.len();
            total += m;
            prop_assert_eq!(m as u128, if class.supports(&g, &ch) { formula } else { 0 });
            for (i, u) in b.vectors.iter().enumerate() {
                for (j, v) in b.vectors.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((u.dotc(v) - c(expected, 0.0)).norm() < 1e-12);
                }
                for (n, gm) in mats.iter().enumerate() {
                    prop_assert!((gm * u - u * ch.complex_value_at(n)).norm() < 1e-12);
                }
            }
        }
        prop_assert_eq!(total, 1usize << g.n_qubits());
    }

    #[test]
    fn random_channels_are_trace_preserving(g in abelian_group(3), n_ops in 1usize..=4, seed in any::<u64>()) {
        let k = random_group_algebra_kraus(&g, n_ops, seed, LIMIT).unwrap();
        prop_assert!(k.normalization_error() < 1e-9);
        // Every operator lies in the span of the group elements.
        let alg = k.algebra().unwrap();
        for (op, coeffs) in k.operators().iter().zip(&alg.coefficients) {
            let rebuilt = alg
                .elements
                .iter()
                .zip(coeffs)
                .fold(M::zeros(op.dim(), op.dim()), |acc, (e, a)| acc + pauli_matrix(&e.to_string()) * *a);
            prop_assert!(diff(&rebuilt, op.matrix()) < 1e-9);
        }
        let mut rng = seeded_rng(seed ^ 1);
        let psi = V::from_fn(1 << g.n_qubits(), |_, _| dfs_core::sampling::complex_normal(&mut rng));
        let rho = DensityMatrix::pure(&psi).unwrap();
        let out = apply_channel(&k, &rho).unwrap();
        prop_assert!(out.validate(1e-9).is_ok());
        prop_assert!(out.purity() <= 1.0 + 1e-9);
    }
}
