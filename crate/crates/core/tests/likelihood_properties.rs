use num_complex::Complex64;
use proptest::prelude::*;
use qbird_core::gwsignal::{
    acceptance_probability, gaussian_log_likelihood, generate_injection, log_likelihood_on_grid, FrequencyGrid,
    LikelihoodOracle, LogLikelihood, NoiseSpec, ParamKind, PsdModel, SourceParams, ToyInspiral,
};
use qbird_core::lattice::{LatticeGrid, ParameterSpec};
use rayon::prelude::*;

fn bins() -> impl Strategy<Value = Vec<(Complex64, Complex64, f64)>> {
    prop::collection::vec(
        ((-5.0f64..5.0, -5.0f64..5.0), (-5.0f64..5.0, -5.0f64..5.0), 0.1f64..10.0)
            .prop_map(|((a, b), (c, d), s)| (Complex64::new(a, b), Complex64::new(c, d), s)),
        1..64,
    )
}

fn split(b: &[(Complex64, Complex64, f64)]) -> (Vec<Complex64>, Vec<Complex64>, Vec<f64>) {
    (
        b.iter().map(|x| x.0).collect(),
        b.iter().map(|x| x.1).collect(),
        b.iter().map(|x| x.2).collect(),
    )
}

fn oracle(noise: NoiseSpec) -> LikelihoodOracle {
    let grid = FrequencyGrid::spanning(20.0, 256.0, 0.25).unwrap();
    let psd = PsdModel::default();
    let truth = SourceParams::new(19.5, 2.0);
    let data = generate_injection(&ToyInspiral, &truth, &psd, noise, &grid).unwrap();
    LikelihoodOracle::new(
        data,
        &psd,
        Box::new(ToyInspiral),
        vec![ParamKind::ChirpMass, ParamKind::MassRatio],
        truth,
    )
    .unwrap()
}

fn lattice() -> LatticeGrid {
    let specs = [
        ParameterSpec::new("chirp_mass", 19.4, 19.6, "Msun").unwrap(),
        ParameterSpec::new("mass_ratio", 1.9, 2.1, "").unwrap(),
    ];
    LatticeGrid::uniform(&specs, &[3, 3]).unwrap()
}

proptest! {
    #[test]
    fn bin_order_does_not_matter(b in bins(), seed in any::<u64>()) {
        let (d, h, s) = split(&b);
        let mut perm = b.clone();
        let n = perm.len();
        for i in 0..n {
            perm.swap(i, (seed as usize).wrapping_add(i * 7919) % n);
        }
        let (dp, hp, sp) = split(&perm);
        let l1 = gaussian_log_likelihood(&d, &h, &s).unwrap();
        let l2 = gaussian_log_likelihood(&dp, &hp, &sp).unwrap();
        prop_assert!((l1 - l2).abs() <= 1e-12 * l1.abs().max(1.0));
    }

    #[test]
    fn bands_factorize(b in bins(), at in 0usize..64) {
        let (d, h, s) = split(&b);
        let k = at.min(b.len());
        let full = gaussian_log_likelihood(&d, &h, &s).unwrap();
        let lo = gaussian_log_likelihood(&d[..k], &h[..k], &s[..k]).unwrap();
        let hi = gaussian_log_likelihood(&d[k..], &h[k..], &s[k..]).unwrap();
        prop_assert!((full - (lo + hi)).abs() <= 1e-12 * full.abs().max(1.0));
        prop_assert!(full <= 0.0);
    }

    #[test]
    fn acceptance_satisfies_detailed_balance(lx in -50.0f64..0.0, ly in -50.0f64..0.0, beta in 0.0f64..2.0) {
        let a_xy = acceptance_probability(0.0, ly - lx, beta).unwrap();
        let a_yx = acceptance_probability(0.0, lx - ly, beta).unwrap();
        prop_assert!((0.0..=1.0).contains(&a_xy));
        prop_assert!(a_xy == 1.0 || a_yx == 1.0);
        let lhs = a_xy * (beta * lx).exp();
        let rhs = a_yx * (beta * ly).exp();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(rhs));
    }
}

#[test]
fn extreme_exponents_stay_finite() {
    assert_eq!(acceptance_probability(0.0, -1e308, 1.0).unwrap(), (-745.0f64).exp());
    assert_eq!(acceptance_probability(0.0, 1e308, 1.0).unwrap(), 1.0);
    assert_eq!(acceptance_probability(0.0, -1e308, 0.0).unwrap(), 1.0);
    assert!(acceptance_probability(0.0, 1.0, -0.5).is_err());
}

#[test]
fn oracle_peaks_at_truth_in_zero_noise() {
    let o = oracle(NoiseSpec::Zero);
    assert_eq!(o.log_likelihood(&[19.5, 2.0]).unwrap(), 0.0);
    assert!(o.log_likelihood(&[19.45, 2.0]).unwrap() < 0.0);
    assert!(o.log_likelihood(&[19.5, 2.05]).unwrap() < 0.0);
}

#[test]
fn oracle_memo_is_consistent_under_concurrency() {
    let o = oracle(NoiseSpec::Gaussian { seed: 11 });
    let grid = lattice();
    let serial: Vec<f64> = (0..grid.len())
        .map(|i| o.evaluate(&o.source_params(&grid.values_at(i)).unwrap()).unwrap())
        .collect();
    let first = log_likelihood_on_grid(&o, &grid).unwrap();
    assert_eq!(o.cached_len(), grid.len());
    // Hammer the memo from many threads with overlapping keys.
    let hammered: Vec<f64> = (0..8 * grid.len())
        .into_par_iter()
        .map(|i| o.log_likelihood(&grid.values_at(i % grid.len())).unwrap())
        .collect();
    assert_eq!(o.cached_len(), grid.len());
    for (i, v) in hammered.iter().enumerate() {
        assert_eq!(v.to_bits(), serial[i % grid.len()].to_bits());
    }
    assert_eq!(
        first.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        serial.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
}

#[test]
fn oracle_acceptance_matches_likelihood_ratio() {
    let o = oracle(NoiseSpec::Zero);
    let grid = lattice();
    for label in 0..grid.len() {
        let x = grid.point(label);
        for p in 0..2 {
            let y = grid.neighbor(&x, p, qbird_core::lattice::Shift::Up).unwrap();
            let (lx, ly) = (o.at_point(&grid, &x).unwrap(), o.at_point(&grid, &y).unwrap());
            for beta in [0.05, 0.5, 1.0] {
                let fwd = o.acceptance(&grid, &x, &y, beta).unwrap();
                let back = o.acceptance(&grid, &y, &x, beta).unwrap();
                let expected = (beta * (ly - lx)).exp().min(1.0);
                assert!((fwd - expected).abs() <= 1e-12, "{fwd} vs {expected}");
                if fwd > 1e-300 && back > 1e-300 {
                    assert!(((fwd / back).ln() - beta * (ly - lx)).abs() < 1e-9);
                }
            }
        }
    }
}
