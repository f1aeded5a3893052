use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use qmp_core::exact::binomial;
use qmp_core::lattice::{GroupSpec, Weight, YoungDiagram};
use qmp_core::multiplicities::{
    highest_weight_multiplicities, irrep_weight_multiplicity, kronecker, kronecker_bruteforce, kronecker_table,
    littlewood_richardson, littlewood_richardson_padded, lr_padding, stencil, stretch,
};

fn y(s: &str) -> YoungDiagram {
    s.parse().unwrap()
}

/// Littlewood–Richardson rule by enumeration: fillings of λ/α with content β that are
/// semistandard and whose reverse row reading word is a lattice word.
fn lr_bruteforce(alpha: &YoungDiagram, beta: &YoungDiagram, lambda: &YoungDiagram) -> u64 {
    let n = lambda.num_rows();
    let Ok(a) = alpha.padded(n) else { return 0 };
    if a.iter().zip(lambda.rows()).any(|(x, l)| x > l) || lambda.boxes() != alpha.boxes() + beta.boxes() {
        return 0;
    }
    let cells: Vec<(usize, usize)> =
        (0..n).flat_map(|r| (a[r]..lambda.rows()[r]).map(move |c| (r, c as usize))).collect();
    let labels = beta.num_rows();
    let mut fill: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    fn rec(
        i: usize,
        cells: &[(usize, usize)],
        labels: usize,
        beta: &[u32],
        fill: &mut BTreeMap<(usize, usize), usize>,
        used: &mut Vec<u32>,
    ) -> u64 {
        if i == cells.len() {
            if used.as_slice() != beta {
                return 0;
            }
            // Reading word: rows top to bottom, each right to left.
            let mut rows: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
            for (&(r, c), &v) in fill.iter() {
                rows.entry(r).or_default().push((c, v));
            }
            let mut seen = vec![0u32; labels];
            for (_, mut row) in rows {
                row.sort_by(|x, y| y.0.cmp(&x.0));
                for (_, v) in row {
                    seen[v] += 1;
                    if v > 0 && seen[v] > seen[v - 1] {
                        return 0;
                    }
                }
            }
            return 1;
        }
        let (r, c) = cells[i];
        let mut total = 0;
        for v in 0..labels {
            if used[v] >= beta[v] {
                continue;
            }
            if c > 0 {
                if let Some(&left) = fill.get(&(r, c - 1)) {
                    if left > v {
                        continue;
                    }
                }
            }
            if r > 0 {
                if let Some(&up) = fill.get(&(r - 1, c)) {
                    if up >= v {
                        continue;
                    }
                }
            }
            fill.insert((r, c), v);
            used[v] += 1;
            total += rec(i + 1, cells, labels, beta, fill, used);
            used[v] -= 1;
            fill.remove(&(r, c));
        }
        total
    }
    rec(0, &cells, labels, beta.rows(), &mut fill, &mut vec![0; labels])
}

#[test]
fn kronecker_paper_and_trivial_values() {
    for k in 1..=6 {
        for a in YoungDiagram::partitions(k, 3) {
            for b in YoungDiagram::partitions(k, 3) {
                let expect = u32::from(a == b);
                assert_eq!(kronecker(&a, &b, &YoungDiagram::new(vec![k]).unwrap()), BigUint::from(expect));
            }
        }
        let t = YoungDiagram::new(vec![k]).unwrap();
        assert_eq!(kronecker_bruteforce(&t, &t, &t).unwrap(), BigUint::from(1u32));
    }
    assert_eq!(kronecker(&y("[1,1]"), &y("[1,1]"), &y("[2]")), BigUint::from(1u32));
    assert_eq!(kronecker(&y("[1,1]"), &y("[1,1]"), &y("[1,1]")), BigUint::from(0u32));
    assert_eq!(kronecker_bruteforce(&y("[2,1]"), &y("[2,1]"), &y("[2,1]")).unwrap(), BigUint::from(1u32));
    assert!(kronecker_bruteforce(&y("[13]"), &y("[13]"), &y("[13]")).is_err());
}

#[test]
fn kronecker_symmetric_in_arguments() {
    for k in 2..=6 {
        let parts = YoungDiagram::partitions(k, 3);
        for a in &parts {
            for b in &parts {
                for c in &parts {
                    let g = kronecker(a, b, c);
                    for (x, yy, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                        assert_eq!(g, kronecker(x, yy, z));
                    }
                }
            }
        }
    }
}

#[test]
fn schur_weyl_dimension_count() {
    // dim Sym^k(C^8) = Σ g_{αβγ} dim V_α dim V_β dim V_γ over ≤ 2-row diagrams.
    for k in 1..=6u32 {
        let table = kronecker_table(k, [2, 2, 2]);
        let mut total = BigUint::from(0u32);
        for (key, g) in &table.entries {
            total += g * key[0].gl_dimension(2) * key[1].gl_dimension(2) * key[2].gl_dimension(2);
        }
        let sym = binomial(k as i64 + 7, 7).to_biguint().unwrap();
        assert_eq!(total, sym, "k = {k}");
    }
}

#[test]
fn kostant_inversion_is_delta() {
    for d in 1..=3usize {
        let g = GroupSpec::u(&[d]);
        for k in 0..=6u32 {
            let parts = YoungDiagram::partitions(k, d);
            for lam in &parts {
                let wm = |w: &Weight| -> BigInt {
                    if w.coords.iter().any(|&x| x < 0) {
                        return BigInt::from(0);
                    }
                    BigInt::from(irrep_weight_multiplicity(&g, lam, w).unwrap())
                };
                for mu in &parts {
                    let m = highest_weight_multiplicities(wm, &g, &Weight::new(mu.padded(d).unwrap().iter().map(|&x| x as i64).collect()))
                        .unwrap();
                    assert_eq!(m, BigUint::from(u32::from(lam == mu)), "λ={lam} μ={mu}");
                }
            }
        }
    }
}

#[test]
fn sym_weights_under_su2_and_diagonal_clebsch_gordan() {
    // Weight function of C²⊗C² under diagonal U(2): (2,0)↦1, (1,1)↦2, (0,2)↦1.
    let g = GroupSpec::u(&[2]);
    let wm = |w: &Weight| -> BigInt {
        match w.coords.as_slice() {
            [2, 0] | [0, 2] => BigInt::from(1),
            [1, 1] => BigInt::from(2),
            _ => BigInt::from(0),
        }
    };
    assert_eq!(highest_weight_multiplicities(wm, &g, &Weight::new(vec![2, 0])).unwrap(), BigUint::from(1u32));
    assert_eq!(highest_weight_multiplicities(wm, &g, &Weight::new(vec![1, 1])).unwrap(), BigUint::from(1u32));
    // An inconsistent weight function is reported, not clamped.
    let bad2 = |w: &Weight| -> BigInt { BigInt::from(u8::from(w.coords == vec![2, 0])) };
    assert!(highest_weight_multiplicities(bad2, &g, &Weight::new(vec![1, 1])).is_err());
    // Trivial group: identity stencil.
    let triv = GroupSpec::u(&[1, 1]);
    assert_eq!(stencil(&triv).terms.len(), 1);
}

#[test]
fn sym2_of_two_qubits_pairs_equal_diagrams() {
    // Sym²(C²⊗C²) = V_(2)⊗V_(2) ⊕ V_(1,1)⊗V_(1,1) under U(2)×U(2).
    let g = GroupSpec::u(&[2, 2]);
    let weights: Vec<Vec<i64>> = vec![vec![1, 0, 1, 0], vec![1, 0, 0, 1], vec![0, 1, 1, 0], vec![0, 1, 0, 1]];
    let mut counts: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for i in 0..4 {
        for j in i..4 {
            let w: Vec<i64> = weights[i].iter().zip(&weights[j]).map(|(a, b)| a + b).collect();
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    let wm = |w: &Weight| BigInt::from(*counts.get(&w.coords).unwrap_or(&0));
    for (l, expect) in [([2, 0, 2, 0], 1u32), ([1, 1, 1, 1], 1), ([2, 0, 1, 1], 0), ([1, 1, 2, 0], 0)] {
        let m = highest_weight_multiplicities(wm, &g, &Weight::new(l.to_vec())).unwrap();
        assert_eq!(m, BigUint::from(expect), "{l:?}");
    }
}

#[test]
fn littlewood_richardson_against_tableaux() {
    assert_eq!(lr_bruteforce(&y("[2,1]"), &y("[2,1]"), &y("[3,2,1]")), 2);
    assert_eq!(littlewood_richardson(&y("[2,1]"), &y("[2,1]"), &y("[3,2,1]")), BigUint::from(2u32));
    for n in 1..=5u32 {
        for lam in YoungDiagram::partitions(n, 4) {
            for na in 0..=n {
                for a in YoungDiagram::partitions(na, 4) {
                    for b in YoungDiagram::partitions(n - na, 4) {
                        let c = littlewood_richardson(&a, &b, &lam);
                        assert_eq!(c, BigUint::from(lr_bruteforce(&a, &b, &lam)), "{a} {b} {lam}");
                        if lam.first_row() > a.first_row() + b.first_row() {
                            assert_eq!(c, BigUint::from(0u32));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn littlewood_richardson_padding_independent() {
    for (a, b, l) in [("[2,1]", "[2,1]", "[3,2,1]"), ("[1]", "[1]", "[2]"), ("[2]", "[1,1]", "[3,1]"), ("[2,1]", "[1]", "[2,2]")] {
        let (a, b, l) = (y(a), y(b), y(l));
        let k = lr_padding(&a, &b, &l);
        let c0 = littlewood_richardson_padded(&a, &b, &l, k).unwrap();
        let c1 = littlewood_richardson_padded(&a, &b, &l, k + 2).unwrap();
        assert_eq!(c0, c1);
    }
}

#[test]
fn stretching() {
    let one = y("[1]");
    let s = stretch(&one, &one, &one, 5);
    assert!(s.iter().all(|v| *v == BigUint::from(1u32)));
    assert!(stretch(&y("[2]"), &y("[1,1]"), &y("[3]"), 4).iter().all(|v| *v == BigUint::from(0u32)));
    // g_{(k,k),(k,k),(k,k)} is 1 for even k and 0 for odd k: a quasi-polynomial of period 2.
    let s = stretch(&y("[1,1]"), &y("[1,1]"), &y("[1,1]"), 8);
    let expect: Vec<u32> = (1..=8).map(|k| u32::from(k % 2 == 0)).collect();
    assert_eq!(s, expect.into_iter().map(BigUint::from).collect::<Vec<_>>());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_triples_match_characters(k in 1u32..=9, seeds in prop::collection::vec(any::<prop::sample::Index>(), 3)) {
        let parts = YoungDiagram::partitions(k, 3);
        let pick = |i: &prop::sample::Index| parts[i.index(parts.len())].clone();
        let (a, b, c) = (pick(&seeds[0]), pick(&seeds[1]), pick(&seeds[2]));
        prop_assert_eq!(kronecker(&a, &b, &c), kronecker_bruteforce(&a, &b, &c).unwrap());
    }
}
