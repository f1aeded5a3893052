use proptest::prelude::*;
use qmp_core::exact::{qi, qr};
use qmp_core::flow::{
    flow_step, flow_to_minimum, haar_sample, haar_symmetric_with, linear_entropy, marginals, moment_norm2, polytope_refine,
    rng_from_seed, shifted_flow, FlowOptions, PureState, RefineOptions, ShiftedOptions,
};

fn regression_state() -> PureState {
    // (|000⟩ + |001⟩ + |100⟩ + 2|110⟩)/√7
    let mut a = [0.0; 8];
    a[0b000] = 1.0;
    a[0b001] = 1.0;
    a[0b100] = 1.0;
    a[0b110] = 2.0;
    PureState::from_real(vec![2, 2, 2], &a).unwrap()
}

#[test]
fn regression_state_flows_to_maximally_mixed() {
    let psi = regression_state();
    // Marginals are [[2,1],[1,5]]/7, [[3,2],[2,4]]/7, [[6,1],[1,1]]/7.
    let exact = [(7.0 + 13f64.sqrt()) / 14.0, (7.0 + 17f64.sqrt()) / 14.0, (7.0 + 29f64.sqrt()) / 14.0];
    let l0 = marginals(&psi).max_eigenvalues();
    for ((x, e), rounded) in l0.iter().zip(exact).zip([0.76, 0.79, 0.88]) {
        assert!((x - e).abs() < 1e-12, "{l0:?}");
        assert!((x - rounded).abs() < 0.005);
    }
    let res = flow_to_minimum(&psi, &FlowOptions::default());
    assert!(res.converged);
    assert!(res.trace.is_monotone());
    assert!(res.trace.points[1].norm2 < res.trace.points[0].norm2);
    for x in res.marginals.max_eigenvalues() {
        assert!((x - 0.5).abs() < 1e-4, "{x}");
    }
}

#[test]
fn w_state_is_critical() {
    let res = flow_to_minimum(&PureState::w(3), &FlowOptions::default());
    for x in res.marginals.max_eigenvalues() {
        assert!((x - 2.0 / 3.0).abs() < 1e-4);
    }
    assert!(res.trace.is_monotone());
}

#[test]
fn product_states_do_not_move() {
    let p = PureState::product_zero(&[2, 3, 2]).unwrap();
    let res = flow_to_minimum(&p, &FlowOptions::default());
    assert!(res.converged);
    assert_eq!(res.marginals.max_eigenvalues().iter().map(|x| (x * 1e9).round()).collect::<Vec<_>>(), vec![1e9; 3]);
}

#[test]
fn shifted_oracle_projects_onto_pyramid() {
    // The nearest point of the upper pyramid to (1,1,½) lies on λ₁ + λ₂ − λ₃ = 1.
    let r = shifted_flow(&PureState::w(3), &[qi(1), qi(1), qr(1, 2)], &ShiftedOptions::default()).unwrap();
    for (x, e) in r.mu.iter().zip([5.0 / 6.0, 5.0 / 6.0, 2.0 / 3.0]) {
        assert!((x - e).abs() < 1e-5, "{:?}", r.mu);
    }
    let r = shifted_flow(&PureState::ghz(3), &[qi(1), qi(1), qi(1)], &ShiftedOptions::default()).unwrap();
    assert!(r.mu.iter().all(|x| (x - 1.0).abs() < 2e-3), "{:?}", r.mu);
    assert!(shifted_flow(&PureState::w(3), &[qr(1, 3), qi(1), qi(1)], &ShiftedOptions::default()).is_err());
}

#[test]
fn refinement_recovers_three_qubit_polytopes() {
    let prod = polytope_refine(&PureState::product_zero(&[2, 2, 2]).unwrap(), &RefineOptions::default()).unwrap();
    assert!(prod.complete);
    assert_eq!(prod.polytope.vertices, vec![vec![qi(1), qi(1), qi(1)]]);

    let w = polytope_refine(&PureState::w(3), &RefineOptions::default()).unwrap();
    assert!(w.complete);
    let mut expect = vec![vec![qi(1), qi(1), qi(1)]];
    for i in 0..3 {
        let mut v = vec![qr(1, 2); 3];
        v[i] = qi(1);
        expect.push(v);
    }
    expect.sort();
    let mut got = w.polytope.vertices.clone();
    got.sort();
    assert_eq!(got, expect);

    let ghz = polytope_refine(&PureState::ghz(3), &RefineOptions::default()).unwrap();
    assert!(ghz.complete);
    let mut got = ghz.polytope.vertices.clone();
    got.sort();
    expect.push(vec![qr(1, 2); 3]);
    expect.sort();
    assert_eq!(got, expect);
}

#[test]
fn haar_samples_are_reproducible() {
    let a = haar_sample(&[2, 3], 11);
    assert_eq!(a, haar_sample(&[2, 3], 11));
    assert_ne!(a, haar_sample(&[2, 3], 12));
}

#[test]
fn symmetric_samples_have_equal_marginals() {
    let mut rng = rng_from_seed(3);
    for n in 2..=4 {
        let s = haar_symmetric_with(n, &mut rng);
        let l = marginals(&s).max_eigenvalues();
        assert!(l.iter().all(|x| (x - l[0]).abs() < 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn marginals_are_states_and_steps_decrease_norm(seed in any::<u64>(), dims in prop::collection::vec(2usize..4, 2..4)) {
        let psi = haar_sample(&dims, seed);
        let ms = marginals(&psi);
        for (rho, spec) in ms.rhos.iter().zip(&ms.spectra) {
            let tr: f64 = (0..rho.nrows()).map(|i| rho[(i, i)].re).sum();
            prop_assert!((tr - 1.0).abs() < 1e-12);
            prop_assert!(spec.iter().all(|&x| x > -1e-12));
            prop_assert!((rho - rho.adjoint()).norm() < 1e-12);
        }
        // ‖μ‖² = n − Σ 1/d_k − n·E.
        let n = dims.len() as f64;
        let inv: f64 = dims.iter().map(|&d| 1.0 / d as f64).sum();
        prop_assert!((moment_norm2(&ms) - (n - inv - n * linear_entropy(&ms))).abs() < 1e-12);
        let step = flow_step(&psi, 1e-3);
        prop_assert!(moment_norm2(&marginals(&step)) <= moment_norm2(&ms) + 1e-15);
        let norm: f64 = step.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }
}
