use num_bigint::BigUint;
use proptest::prelude::*;
use qmp_core::exact::qi;
use qmp_core::stabilizer::*;

fn ps(n: usize, d: i64) -> PhaseSpace {
    PhaseSpace::new(n, d).unwrap()
}

/// Brute-force `M^ω` by scanning every vector of the phase space.
fn brute_complement_size(m: &Submodule) -> u64 {
    let space = m.space;
    let total = (space.d as u64).pow(space.dim() as u32);
    let mut count = 0;
    for mut idx in 0..total {
        let mut v = vec![0i64; space.dim()];
        for x in v.iter_mut() {
            *x = (idx % space.d as u64) as i64;
            idx /= space.d as u64;
        }
        if m.generators().iter().all(|g| space.omega(&v, g) == 0) {
            count += 1;
        }
    }
    count
}

/// Brute-force `|M|` by closing the generator set under addition.
fn brute_span_size(space: PhaseSpace, gens: &[Vec<i64>]) -> usize {
    let mut set = std::collections::BTreeSet::from([vec![0i64; space.dim()]]);
    loop {
        let mut grown = set.clone();
        for v in &set {
            for g in gens {
                grown.insert(v.iter().zip(g).map(|(a, b)| (a + b).rem_euclid(space.d)).collect());
            }
        }
        if grown.len() == set.len() {
            return set.len();
        }
        set = grown;
    }
}

#[test]
fn diagonal_two_qubit_state() {
    let m = Submodule::span(ps(2, 2), &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]]).unwrap();
    assert!(m.is_lagrangian());
    let s = entropy_vector(&m).unwrap();
    assert_eq!(s.in_log_d(0b01), Some(qi(1)));
    assert_eq!(s.in_log_d(0b10), Some(qi(1)));
    assert_eq!(s.in_log_d(0b11), Some(qi(0)));
    let mono = LinearEntropyInequality::monotonicity(2, 0b01, 0b11);
    assert!(!check_inequality(&s, &mono).unwrap().holds());
    let h = classical_model_entropies(&m).unwrap();
    assert_eq!(h.in_log_d(0b01), Some(qi(2)));
    assert_eq!(h.in_log_d(0b11), Some(qi(2)));
}

#[test]
fn single_qubit_isotropic_count() {
    let all: Vec<Submodule> = enumerate_isotropic(1, 2, u64::MAX).unwrap().collect();
    assert_eq!(all.len(), 4);
    assert_eq!(all.iter().filter(|m| m.is_lagrangian()).count(), 3);
}

#[test]
fn isotropic_counts_match_brute_force() {
    // Count isotropic subspaces by closing every subset of vectors of F_d^{2n}.
    for &(n, d) in &[(1usize, 3i64), (2, 2)] {
        let space = ps(n, d);
        let total = (d as u64).pow(2 * n as u32);
        let vecs: Vec<Vec<i64>> = (0..total)
            .map(|mut idx| {
                (0..2 * n)
                    .map(|_| {
                        let x = (idx % d as u64) as i64;
                        idx /= d as u64;
                        x
                    })
                    .collect()
            })
            .collect();
        let mut found = std::collections::BTreeSet::new();
        for a in &vecs {
            for b in &vecs {
                let m = Submodule::span(space, &[a.clone(), b.clone()]).unwrap();
                if m.is_isotropic() {
                    found.insert(m);
                }
            }
        }
        let enumerated: std::collections::BTreeSet<Submodule> = enumerate_isotropic(n, d, u64::MAX)
            .unwrap()
            .map(|m| Submodule::span(space, m.generators()).unwrap())
            .collect();
        assert_eq!(enumerated, found, "n={n} d={d}");
    }
}

#[test]
fn enumeration_rejects_composite_and_oversized() {
    assert!(enumerate_isotropic(2, 4, u64::MAX).is_err());
    assert!(enumerate_isotropic(7, 2, u64::MAX).is_err());
    assert!(enumerate_isotropic_bounded(5, 2, u64::MAX, 1 << 9).is_err());
    assert!(enumerate_isotropic_bounded(5, 2, u64::MAX, 1 << 10).is_ok());
}

#[test]
fn sweep_four_qubits() {
    let report = stabilizer_sweep(
        4,
        2,
        &[
            InequalityFamily::StrongSubadditivity,
            InequalityFamily::WeakMonotonicity,
            InequalityFamily::Monotonicity,
            InequalityFamily::Ingleton,
            InequalityFamily::ZhangYeung,
        ],
    )
    .unwrap();
    assert!(report.submodules > report.vectors.len());
    for f in &report.families {
        let min = f.min_slack.as_ref().unwrap().in_log_d(2).unwrap();
        match f.family {
            InequalityFamily::Monotonicity => assert!(f.violations > 0 && min < qi(0)),
            _ => assert!(f.violations == 0 && min >= qi(0), "{} min {}", f.family, min),
        }
    }
    let balanced: Vec<bool> = report.families.iter().map(|f| f.balanced).collect();
    assert_eq!(balanced, vec![true, false, false, true, true]);
}

#[test]
fn composite_entropies_are_exact() {
    // Correlated order-2 and order-3 parts over Z_6.
    let m = Submodule::span(ps(2, 6), &[vec![2, 0, 2, 0], vec![0, 3, 0, 3]]).unwrap();
    assert!(m.is_isotropic());
    let s = entropy_vector(&m).unwrap();
    // |M_1| = 1, so S_1 = log 6; |M| = 6, so S_12 = 2 log 6 − log 6.
    assert_eq!(s.in_log_d(0b01), Some(qi(1)));
    assert_eq!(s.in_log_d(0b11), Some(qi(1)));
    let m = Submodule::span(ps(1, 6), &[vec![2, 0]]).unwrap();
    let s = entropy_vector(&m).unwrap();
    assert_eq!(s.in_log_d(0b1), None);
    assert!((s.get(0b1).to_f64() - 2f64.ln()).abs() < 1e-12);
}

fn submodule_strategy() -> impl Strategy<Value = Submodule> {
    (1usize..=3, prop::sample::select(vec![2i64, 3, 4, 6]), 1usize..=4)
        .prop_flat_map(|(n, d, k)| prop::collection::vec(prop::collection::vec(0..d, 2 * n), k).prop_map(move |g| Submodule::span(ps(n, d), &g).unwrap()))
}

fn isotropic_strategy() -> impl Strategy<Value = Submodule> {
    (1usize..=3, prop::sample::select(vec![2i64, 3, 4, 6]), 1usize..=3, any::<u64>()).prop_map(|(n, d, k, seed)| {
        // Grow an isotropic module by adding random vectors from the current complement.
        let space = ps(n, d);
        let mut m = Submodule::zero(space);
        let mut state = seed | 1;
        for _ in 0..k {
            let comp = m.symplectic_complement();
            let mut v = vec![0i64; space.dim()];
            for g in comp.generators() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let c = (state % d as u64) as i64;
                for (x, y) in v.iter_mut().zip(g) {
                    *x = (*x + c * y).rem_euclid(d);
                }
            }
            let mut gens = m.generators().to_vec();
            gens.push(v);
            m = Submodule::span(space, &gens).unwrap();
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn complement_cardinality_and_involution(m in submodule_strategy()) {
        let c = m.symplectic_complement();
        prop_assert_eq!(m.cardinality() * c.cardinality(), m.space.cardinality());
        prop_assert_eq!(&c.symplectic_complement(), &m);
    }

    #[test]
    fn howell_cardinality_matches_closure(m in submodule_strategy()) {
        prop_assume!(m.space.dim() <= 4);
        prop_assert_eq!(m.cardinality(), BigUint::from(brute_span_size(m.space, m.generators())));
        prop_assert_eq!(m.symplectic_complement().cardinality(), BigUint::from(brute_complement_size(&m)));
    }

    #[test]
    fn isotropic_module_invariants(m in isotropic_strategy()) {
        prop_assert!(m.is_isotropic());
        let s = entropy_vector(&m).unwrap();
        let h = classical_model_entropies(&m).unwrap();
        let comp = m.symplectic_complement();
        for i in 1..=m.space.all() {
            let size = i.count_ones() as i64;
            // S_I = H(X_I) − |I| log d
            let lhs = s.get(i);
            let unit = LogValue::ln_of(&BigUint::from(m.space.d as u64), &[2, 3]);
            prop_assert_eq!(lhs, &h.get(i) - &unit.scale(&qi(size)));
            // π_I(M^ω) is the complement of M_I inside the phase space of I.
            let local = m.restrict(i).project(i);
            prop_assert_eq!(comp.project(i), local.symplectic_complement());
            if m.is_lagrangian() {
                prop_assert_eq!(s.get(i), s.get(m.space.all() & !i));
            }
        }
        for q in InequalityFamily::StrongSubadditivity.instances(m.space.n) {
            prop_assert!(check_inequality(&s, &q).unwrap().holds());
        }
    }
}
