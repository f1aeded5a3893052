use num_bigint::BigUint;
use proptest::prelude::*;
use qmp_core::counting::{contingency_count, dilated_count, kostant_partition, vector_partition_count, VectorPartitionProblem};
use qmp_core::lattice::{GroupSpec, Weight};

/// Enumerates every `x ∈ {0..=bound}^s` and counts solutions of `Σ x_i c_i = target`.
fn brute_vpp(columns: &[Vec<i64>], target: &[i64], bound: i64) -> u64 {
    let s = columns.len();
    let mut x = vec![0i64; s];
    let mut count = 0;
    loop {
        let ok = (0..target.len()).all(|r| columns.iter().zip(&x).map(|(c, xi)| c[r] * xi).sum::<i64>() == target[r]);
        if ok {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == s {
                return count;
            }
            x[i] += 1;
            if x[i] <= bound {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

/// Enumerates all `a×b×c` tables cell by cell with pruning on the marginals.
fn brute_tables(a: &[i64], b: &[i64], c: &[i64]) -> u64 {
    let cells: Vec<(usize, usize, usize)> =
        (0..a.len()).flat_map(|i| (0..b.len()).flat_map(move |j| (0..c.len()).map(move |k| (i, j, k)))).collect();
    fn rec(idx: usize, cells: &[(usize, usize, usize)], ra: &mut [i64], rb: &mut [i64], rc: &mut [i64]) -> u64 {
        if idx == cells.len() {
            return u64::from(ra.iter().chain(rb.iter()).chain(rc.iter()).all(|&x| x == 0));
        }
        let (i, j, k) = cells[idx];
        let mut total = 0;
        let top = ra[i].min(rb[j]).min(rc[k]);
        for v in 0..=top {
            ra[i] -= v;
            rb[j] -= v;
            rc[k] -= v;
            total += rec(idx + 1, cells, ra, rb, rc);
            ra[i] += v;
            rb[j] += v;
            rc[k] += v;
        }
        total
    }
    if a.iter().sum::<i64>() != b.iter().sum::<i64>() || a.iter().sum::<i64>() != c.iter().sum::<i64>() {
        return 0;
    }
    rec(0, &cells, &mut a.to_vec(), &mut b.to_vec(), &mut c.to_vec())
}

#[test]
fn kostant_su3_against_enumeration() {
    let g = GroupSpec::su(&[3]);
    let roots = vec![vec![1, -1, 0], vec![1, 0, -1], vec![0, 1, -1]];
    assert_eq!(brute_vpp(&roots, &[1, 0, -1], 3), 2);
    assert_eq!(kostant_partition(&g, &Weight::new(vec![1, 0, -1])).unwrap(), BigUint::from(2u32));
    assert_eq!(brute_vpp(&roots, &[0, 1, -1], 3), 1);
    assert_eq!(kostant_partition(&g, &Weight::new(vec![0, 1, -1])).unwrap(), BigUint::from(1u32));
    assert_eq!(kostant_partition(&g, &Weight::new(vec![0, 0, 0])).unwrap(), BigUint::from(1u32));
    assert_eq!(kostant_partition(&g, &Weight::new(vec![-1, 0, 1])).unwrap(), BigUint::from(0u32));
    let su2 = GroupSpec::su(&[2]);
    for m in 0..6 {
        assert_eq!(kostant_partition(&su2, &Weight::new(vec![m, -m])).unwrap(), BigUint::from(1u32));
    }
}

#[test]
fn tensor_columns_dilate_linearly() {
    // Columns (1, ω_i) for the four weights of C²⊗C² in pairing coordinates.
    let cols = vec![vec![1, 1, 1], vec![1, 1, -1], vec![1, -1, 1], vec![1, -1, -1]];
    let p = VectorPartitionProblem::new(cols.clone(), vec![2, 0, 0]).unwrap();
    let mut prev = BigUint::from(0u32);
    for k in 1..=6u64 {
        let v = dilated_count(&p, k);
        let target: Vec<i64> = vec![2 * k as i64, 0, 0];
        assert_eq!(v, BigUint::from(brute_vpp(&cols, &target, 2 * k as i64)));
        // Solutions are x1 = x4, x2 = x3 with x1 + x2 = k.
        assert_eq!(v, BigUint::from(k + 1));
        assert!(v >= prev);
        prev = v;
    }
    assert_eq!(dilated_count(&p, 1), vector_partition_count(&p));
    let zero = p.with_target(vec![0, 0, 0]);
    for k in 1..5 {
        assert_eq!(dilated_count(&zero, k), BigUint::from(1u32));
    }
}

#[test]
fn contingency_matches_enumeration() {
    let cases: Vec<(Vec<i64>, Vec<i64>, Vec<i64>)> = vec![
        (vec![1, 1], vec![1, 1], vec![1, 1]),
        (vec![2, 0], vec![1, 1], vec![1, 1]),
        (vec![3, 2], vec![4, 1], vec![2, 2, 1]),
        (vec![2, 2, 1], vec![3, 1, 1], vec![2, 2, 1]),
        (vec![4, 3], vec![5, 2], vec![6, 1]),
        (vec![3, 3], vec![2, 2, 2], vec![1, 1, 1, 3]),
    ];
    for (a, b, c) in cases {
        let k = a.iter().sum();
        assert_eq!(contingency_count(k, &a, &b, &c), BigUint::from(brute_tables(&a, &b, &c)), "{a:?} {b:?} {c:?}");
    }
}

#[test]
fn two_row_scale_fast_path_agrees_with_generic() {
    // 2×2×2 shapes go through the allocation-free loop; compare against a padded 3-row shape.
    let v = contingency_count(40, &[25, 15], &[22, 18], &[30, 10]);
    let w = contingency_count(40, &[25, 15, 0], &[22, 18], &[30, 10]);
    assert_eq!(v, w);
    assert_eq!(v, BigUint::from(brute_tables(&[25, 15], &[22, 18], &[30, 10])));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vpp_matches_enumeration(
        cols in prop::collection::vec(prop::collection::vec(0i64..3, 2), 1..5),
        target in prop::collection::vec(0i64..5, 2),
    ) {
        // Prepend a constant row so every instance is pointed.
        let cols: Vec<Vec<i64>> = cols.into_iter().map(|c| { let mut v = vec![1]; v.extend(c); v }).collect();
        let t0 = 4;
        let mut t = vec![t0];
        t.extend(target);
        let p = VectorPartitionProblem::new(cols.clone(), t.clone()).unwrap();
        prop_assert_eq!(p.count(), BigUint::from(brute_vpp(&cols, &t, t0)));
    }

    #[test]
    fn contingency_symmetries(
        a in prop::collection::vec(0i64..4, 2..4),
        b0 in prop::collection::vec(0i64..4, 2..4),
        c0 in prop::collection::vec(0i64..4, 2..4),
    ) {
        let k: i64 = a.iter().sum();
        // Rescale b and c into compositions of k by moving excess into the last entry.
        let fit = |v: &Vec<i64>| -> Option<Vec<i64>> {
            let s: i64 = v[..v.len() - 1].iter().sum();
            if s > k { return None; }
            let mut w = v.clone();
            *w.last_mut().unwrap() = k - s;
            Some(w)
        };
        if let (Some(b), Some(c)) = (fit(&b0), fit(&c0)) {
            let base = contingency_count(k, &a, &b, &c);
            prop_assert_eq!(&base, &contingency_count(k, &b, &c, &a));
            prop_assert_eq!(&base, &contingency_count(k, &c, &a, &b));
            let mut ar = a.clone();
            ar.reverse();
            prop_assert_eq!(&base, &contingency_count(k, &ar, &b, &c));
            prop_assert_eq!(base, BigUint::from(brute_tables(&a, &b, &c)));
        }
    }
}
