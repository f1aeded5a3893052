use std::collections::BTreeSet;

use proptest::prelude::*;
use qmp_core::exact::{qi, qr, rationalize, Q};
use qmp_core::flow::{haar_sample_with, marginals, rng_from_seed, PureState};
use qmp_core::lattice::tensor_weights;
use qmp_core::moment_polytope::{
    abelian_polytope, candidate_hyperplanes, determinant_polynomial, empirical_dimension, evaluate_witness, marginal_polytope,
    ressayre_check, FacetSource, PolytopeOptions, RessayreCandidate, RessayreOutcome,
};
use qmp_core::polytope::{HalfSpace, Membership, Polytope};
use qmp_core::Error;

fn three_qubit_vertices() -> BTreeSet<Vec<Q>> {
    let h = qr(1, 2);
    let mut v = BTreeSet::new();
    v.insert(vec![qi(1), qi(1), qi(1)]);
    v.insert(vec![h.clone(), h.clone(), h.clone()]);
    for i in 0..3 {
        let mut p = vec![h.clone(); 3];
        p[i] = qi(1);
        v.insert(p);
    }
    v
}

#[test]
fn three_qubits_polygonal_inequalities() {
    let mp = marginal_polytope(&[2, 2, 2], &PolytopeOptions::default()).unwrap();
    assert_eq!(mp.polytope.vertices.iter().cloned().collect::<BTreeSet<_>>(), three_qubit_vertices());
    let ressayre: BTreeSet<HalfSpace> =
        mp.facets.iter().filter(|f| matches!(f.source, FacetSource::Ressayre { .. })).map(|f| f.halfspace.clone()).collect();
    // λ_j + λ_k ≤ 1 + λ_i for each i.
    let mut expect = BTreeSet::new();
    for i in 0..3 {
        let mut n = vec![qi(-1); 3];
        n[i] = qi(1);
        expect.insert(HalfSpace::new(n, qi(-1)).unwrap());
    }
    assert_eq!(ressayre, expect);
    assert_eq!(mp.facets.len(), 6);
}

#[test]
fn published_candidates_and_determinants() {
    let ws = tensor_weights(&[2, 2, 4]).unwrap();
    let bravyi = RessayreCandidate::from_ints(&ws, &[-1, 1, 1, -1, 2, 0, -2, 0], 0).unwrap();
    assert!(bravyi.spans_hyperplane(&ws));
    let RessayreOutcome::Valid(w) = ressayre_check(&bravyi, &ws, 32, &mut rng_from_seed(1)).unwrap() else { panic!() };
    assert_eq!(evaluate_witness(&bravyi, &ws, &w.assignment).unwrap(), w.determinant);
    assert_eq!(determinant_polynomial(&bravyi, &ws).unwrap().to_string(), "-ψ_{112} ψ_{121}^3 ψ_{213}");

    let ws = tensor_weights(&[3, 3, 3]).unwrap();
    let h7 = RessayreCandidate::from_ints(&ws, &[0, -1, 1, -1, 0, 1, 1, 0, -1], -1).unwrap();
    assert!(ressayre_check(&h7, &ws, 32, &mut rng_from_seed(2)).unwrap().is_valid());
    assert_eq!(determinant_polynomial(&h7, &ws).unwrap().to_string(), "-ψ_{112} ψ_{123} ψ_{211}^2");

    // The polygonal candidate for three qubits has a 1×1 matrix whose entry is ψ_{111}.
    let ws = tensor_weights(&[2, 2, 2]).unwrap();
    let poly = RessayreCandidate::from_ints(&ws, &[-1, 1, -1, 1, 1, -1], -1).unwrap();
    assert_eq!((poly.below.len(), poly.neg_roots_below.len()), (1, 1));
    assert_eq!(determinant_polynomial(&poly, &ws).unwrap().to_string(), "ψ_{111}");
    // Flipping it breaks the dimension count.
    let flipped = RessayreCandidate::from_ints(&ws, &[1, -1, 1, -1, -1, 1], 1).unwrap();
    assert_eq!(ressayre_check(&flipped, &ws, 8, &mut rng_from_seed(3)).unwrap(), RessayreOutcome::Invalid("dim".into()));
}

#[test]
fn candidates_include_the_polygonal_wall() {
    let ws = tensor_weights(&[2, 2, 2]).unwrap();
    let cands = candidate_hyperplanes(&ws).unwrap();
    // (−1,−1,1) in pairing form is H = (−1,1,−1,1,1,−1) with c = −1.
    assert!(cands.iter().any(|c| c.halfspace == HalfSpace::new([-1, 1, -1, 1, 1, -1].map(qi).to_vec(), qi(-1)).unwrap()));
    let keys: BTreeSet<_> = cands.iter().map(|c| c.halfspace.clone()).collect();
    assert_eq!(keys.len(), cands.len());
    for c in &cands {
        assert!(c.spans_hyperplane(&ws));
        assert!(cands.iter().any(|d| d.halfspace == c.halfspace.flipped()));
    }
    let ws2 = tensor_weights(&[2, 2]).unwrap();
    assert!(candidate_hyperplanes(&ws2).unwrap().iter().any(|c| c.halfspace.normal == [1, -1, -1, 1].map(qi).to_vec()
        && c.halfspace.offset == qi(0)));
}

#[test]
fn abelian_polytopes_are_cubes() {
    let sq = abelian_polytope(&tensor_weights(&[2, 2]).unwrap()).unwrap();
    assert_eq!(sq.vertices.len(), 4);
    assert_eq!(sq.volume(), qi(4));
    let cube = abelian_polytope(&tensor_weights(&[2, 2, 2]).unwrap()).unwrap();
    assert_eq!(cube.vertices.len(), 8);
    assert_eq!(cube.halfspaces.len(), 6);
    let point = abelian_polytope(&tensor_weights(&[1]).unwrap()).unwrap();
    assert_eq!(point.vertices.len(), 1);
}

#[test]
fn two_factors_are_isospectral() {
    let mp = marginal_polytope(&[2, 2], &PolytopeOptions::default()).unwrap();
    let v: BTreeSet<Vec<Q>> = mp.polytope.vertices.iter().cloned().collect();
    assert_eq!(v, [vec![qi(1), qi(1)], vec![qr(1, 2), qr(1, 2)]].into_iter().collect());
    let mp = marginal_polytope(&[2, 3], &PolytopeOptions::default()).unwrap();
    assert_eq!(mp.polytope.dim(), 1);
    assert!(mp.polytope.contains(&[qr(3, 4), qr(3, 4), qr(1, 4)]));
    assert!(!mp.polytope.contains(&[qr(3, 4), qr(1, 2), qr(1, 4)]));
}

#[test]
fn oversized_factor_is_degenerate() {
    assert!(matches!(marginal_polytope(&[2, 2, 5], &PolytopeOptions::default()), Err(Error::Degenerate(_))));
    assert_eq!(empirical_dimension(&[2, 2, 2], 12, 5), 3);
    assert_eq!(empirical_dimension(&[2, 3], 12, 5), 1);
}

fn soundness(dims: &[usize], samples: usize) {
    let mp = marginal_polytope(dims, &PolytopeOptions::default()).unwrap();
    let mut rng = rng_from_seed(99);
    for _ in 0..samples {
        let lam = marginals(&haar_sample_with(dims, &mut rng)).reduced_spectra();
        // Float spectra are checked against every facet with a small tolerance.
        for f in &mp.facets {
            let s: f64 = f.halfspace.normal.iter().zip(&lam).map(|(a, x)| qmp_core::exact::q_to_f64(a) * x).sum::<f64>()
                - qmp_core::exact::q_to_f64(&f.halfspace.offset);
            assert!(s > -1e-9, "{dims:?}: {} violated by {lam:?}", f.halfspace);
        }
    }
    // Every Ressayre facet holds at the maximally mixed point and has a re-checkable witness.
    let ws = tensor_weights(dims).unwrap();
    let mixed: Vec<Q> = dims.iter().flat_map(|&d| vec![Q::new(1.into(), (d as i64).into()); d - 1]).collect();
    for f in &mp.facets {
        assert!(f.halfspace.contains(&mixed));
        if let FacetSource::Ressayre { h, c, witness } = &f.source {
            let cand = RessayreCandidate::new(&ws, h.clone(), c.clone()).unwrap();
            assert_eq!(&evaluate_witness(&cand, &ws, &witness.assignment).unwrap(), &witness.determinant);
            assert_ne!(witness.determinant, qi(0));
        }
    }
}

#[test]
fn haar_spectra_lie_in_the_polytope() {
    soundness(&[2, 2, 2], 1000);
    soundness(&[2, 2, 4], 1000);
}

#[test]
fn bravyi_inequality_is_a_facet_for_two_two_four() {
    let mp = marginal_polytope(&[2, 2, 4], &PolytopeOptions::default()).unwrap();
    // −Z_A + Z_B + 2Z_{C,13} ≥ 0 in reduced coordinates (λ_A, λ_B, λ_C1, λ_C2, λ_C3).
    assert!(mp.facets.iter().any(|f| matches!(&f.source, FacetSource::Ressayre { h, .. }
        if *h == [-1, 1, 1, -1, 2, 0, -2, 0].map(qi).to_vec())));
}

#[test]
fn three_qubit_facets_are_touched_by_explicit_states() {
    // |000⟩, GHZ and |0⟩⊗EPR patterns reach every facet of the three-qubit polytope.
    let mp = marginal_polytope(&[2, 2, 2], &PolytopeOptions::default()).unwrap();
    let mut states = vec![PureState::product_zero(&[2, 2, 2]).unwrap(), PureState::ghz(3)];
    for pos in 0..3 {
        let mut a = [0.0; 8];
        let (x, y) = [(0b000, 0b011), (0b000, 0b101), (0b000, 0b110)][pos];
        a[x] = 1.0;
        a[y] = 1.0;
        states.push(PureState::from_real(vec![2, 2, 2], &a).unwrap());
    }
    for f in &mp.facets {
        let touched = states.iter().any(|s| {
            let lam: Vec<Q> = marginals(s).max_eigenvalues().iter().map(|&x| rationalize(x, 64)).collect();
            f.halfspace.slack(&lam) == qi(0)
        });
        assert!(touched, "{}", f.halfspace);
    }
}

#[test]
fn membership_examples() {
    let mp = marginal_polytope(&[2, 2, 2], &PolytopeOptions::default()).unwrap();
    let h = qr(1, 2);
    assert!(matches!(mp.polytope.membership(&[h.clone(), h.clone(), h.clone()]), Membership::Boundary(_)));
    let w_pyramid = Polytope::from_points(&[
        vec![qi(1), qi(1), qi(1)],
        vec![qi(1), h.clone(), h.clone()],
        vec![h.clone(), qi(1), h.clone()],
        vec![h.clone(), h.clone(), qi(1)],
    ])
    .unwrap();
    assert!(matches!(w_pyramid.membership(&[h.clone(), h.clone(), h.clone()]), Membership::Outside(_)));
    let p = [qr(76, 100), qr(79, 100), qr(88, 100)];
    assert_eq!(w_pyramid.membership(&p), Membership::Inside);
    assert!(mp.polytope.contains(&p));
    assert_eq!(w_pyramid.l1_distance(&[h.clone(), h.clone(), h.clone()]).unwrap(), h);
}

#[test]
fn three_qutrits_contain_h7() {
    let mp = marginal_polytope(&[3, 3, 3], &PolytopeOptions::default()).unwrap();
    eprintln!("candidates {} valid {} facets {} vertices {}", mp.candidates, mp.valid, mp.facets.len(), mp.polytope.vertices.len());
    assert!(mp.facets.iter().any(|f| matches!(&f.source, FacetSource::Ressayre { h, .. }
        if *h == [0, -1, 1, -1, 0, 1, 1, 0, -1].map(qi).to_vec())));
    soundness(&[3, 3, 3], 200);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn h_v_round_trip(pts in prop::collection::vec(prop::collection::vec(-4i64..5, 3), 4..9)) {
        let pts: Vec<Vec<Q>> = pts.into_iter().map(|p| p.into_iter().map(qi).collect()).collect();
        let p = Polytope::from_points(&pts).unwrap();
        if p.is_full_dimensional() {
            let q = Polytope::from_halfspaces(&p.halfspaces, 3).unwrap();
            let a: BTreeSet<_> = p.vertices.iter().cloned().collect();
            let b: BTreeSet<_> = q.vertices.iter().cloned().collect();
            prop_assert_eq!(a, b);
            let ha: BTreeSet<_> = p.halfspaces.iter().map(|h| h.normalized()).collect();
            let hb: BTreeSet<_> = q.halfspaces.iter().map(|h| h.normalized()).collect();
            prop_assert_eq!(ha, hb);
            for v in &p.vertices {
                prop_assert!(matches!(p.membership(v), Membership::Boundary(_)));
            }
        }
    }
}
