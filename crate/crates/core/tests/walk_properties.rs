use num_complex::Complex64;
use proptest::prelude::*;
use qbird_core::qwalk::{AcceptanceTable, RegisterLayout, WalkState};

const TOL: f64 = 1e-10;

/// Layouts with 1..=4 parameters, 1..=3 qubits each and at most 14 qubits in total.
fn layout() -> impl Strategy<Value = RegisterLayout> {
    (1usize..=4, 1usize..=3)
        .prop_flat_map(|(p, a)| (prop::collection::vec(1usize..=3, p), Just(a)))
        .prop_map(|(q, a)| RegisterLayout::new(&q, a).unwrap())
        .prop_filter("fits the test budget", |l| l.total_qubits() <= 14)
}

fn case() -> impl Strategy<Value = (RegisterLayout, Vec<Complex64>, Vec<f64>)> {
    layout().prop_flat_map(|l| {
        let dim = l.dimension();
        let moves = (1usize << l.state_qubits()) * l.num_params() * 2;
        let amps = prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
            .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect::<Vec<_>>());
        (Just(l), amps, prop::collection::vec(0.0f64..=1.0, moves))
    })
}

fn normalized(layout: &RegisterLayout, mut amps: Vec<Complex64>) -> WalkState {
    let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= n);
    WalkState::from_amplitudes(layout.clone(), amps).unwrap()
}

fn max_diff(a: &WalkState, b: &WalkState) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_factor_preserves_norm((layout, amps, acc) in case()) {
        let table = AcceptanceTable::from_values(&layout, acc).unwrap();
        let mut st = normalized(&layout, amps);
        for _ in 0..5 {
            st.apply_v();
            prop_assert!((st.norm_sqr() - 1.0).abs() < TOL);
            st.apply_b(&table).unwrap();
            prop_assert!((st.norm_sqr() - 1.0).abs() < TOL);
            st.apply_f();
            prop_assert!((st.norm_sqr() - 1.0).abs() < TOL);
            st.apply_sflip();
            prop_assert!((st.norm_sqr() - 1.0).abs() < TOL);
            st.apply_r();
            prop_assert!((st.norm_sqr() - 1.0).abs() < TOL);
            st.apply_w(&table).unwrap();
            prop_assert!((st.norm_sqr() - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn reflections_and_coin_invert((layout, amps, acc) in case()) {
        let table = AcceptanceTable::from_values(&layout, acc).unwrap();
        let start = normalized(&layout, amps);

        let mut st = start.clone();
        st.apply_r();
        st.apply_r();
        prop_assert!(max_diff(&st, &start) < TOL);

        st.apply_sflip();
        st.apply_sflip();
        prop_assert!(max_diff(&st, &start) < TOL);

        st.apply_v();
        st.apply_v();
        prop_assert!(max_diff(&st, &start) < TOL);

        st.apply_b(&table).unwrap();
        st.apply_b_dagger(&table).unwrap();
        prop_assert!(max_diff(&st, &start) < TOL);

        // A move followed by the sign flip is undone by repeating the pair.
        for _ in 0..2 {
            st.apply_f();
            st.apply_sflip();
        }
        prop_assert!(max_diff(&st, &start) < TOL);
    }

    #[test]
    fn s_marginal_is_a_distribution((layout, amps, acc) in case()) {
        let table = AcceptanceTable::from_values(&layout, acc).unwrap();
        let mut st = normalized(&layout, amps);
        st.apply_w(&table).unwrap();
        let m = st.s_marginal();
        prop_assert_eq!(m.len(), 1usize << layout.state_qubits());
        prop_assert!(m.iter().all(|&p| p >= 0.0));
        prop_assert!((m.iter().sum::<f64>() - 1.0).abs() < TOL);
    }
}

#[test]
fn certain_rejection_leaves_state_register_fixed() {
    // A = 0 everywhere: the coin never flips, so W acts trivially on S.
    let layout = RegisterLayout::new(&[2, 2], 2).unwrap();
    let table = AcceptanceTable::constant(&layout, 0.0).unwrap();
    for idx in 0..16 {
        let mut st = WalkState::basis(layout.clone(), idx, 26).unwrap();
        for _ in 0..3 {
            st.apply_w(&table).unwrap();
        }
        let m = st.s_marginal();
        assert!((m[idx] - 1.0).abs() < TOL);
    }
}
