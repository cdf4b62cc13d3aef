use std::f64::consts::SQRT_2;

use breather_lab::creutz::equivalence_check;
use breather_lab::evolve::{integrate, integrate_model};
use breather_lab::experiment::two_cell_profile;
use breather_lab::figures;
use breather_lab::lattice::FrozenModel;
use breather_lab::spectral::{analytic_defect, build_linear_model, eigensolve};
use breather_lab::{LatticeParams, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn weak_excitation_follows_linear_chain() {
    let i_in = 1e-6;
    let p = figures::breather();
    let s0 = StateVector::single_site(p.n_cells, i_in).unwrap();
    let nonlinear = integrate(&p, &s0, 10.0, 1e-3, 100).unwrap();
    let frozen = FrozenModel {
        kappa: p.kappa,
        nu: p.nu,
        gammas: vec![p.gamma0; p.n_cells],
    };
    let linear = integrate_model(&frozen, &s0, 10.0, 1e-3, 100).unwrap();
    assert_eq!(nonlinear.len(), linear.len());
    let mut worst: f64 = 0.0;
    for k in 0..linear.len() {
        for (a, b) in nonlinear.intensities_at(k).iter().zip(linear.intensities_at(k)) {
            worst = worst.max((a - b).abs() / i_in);
        }
    }
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn weight_tracks_distance_from_thresholds() {
    let gs = figures::gamma_s_breather();
    let g0c = analytic_defect(SQRT_2, 1.0, gs, 0.0).unwrap().gamma_0c.unwrap();
    let weights: Vec<f64> = (0..20)
        .map(|k| {
            let g0 = g0c * k as f64 / 21.0;
            analytic_defect(SQRT_2, 1.0, gs, g0).unwrap().weight.unwrap()
        })
        .collect();
    assert!(weights.windows(2).all(|w| w[1] < w[0]), "{weights:?}");

    let gsc = 2f64.powf(0.25);
    let weights: Vec<f64> = (1..=20)
        .map(|k| {
            let g = gsc + (SQRT_2 - gsc) * k as f64 / 21.0;
            analytic_defect(SQRT_2, 1.0, g, 0.0).unwrap().weight.unwrap()
        })
        .collect();
    assert!(weights.windows(2).all(|w| w[1] > w[0]), "{weights:?}");
}

#[test]
fn second_cell_lowers_defect_energy() {
    let p = figures::breather();
    let energies: Vec<f64> = (0..20)
        .map(|k| {
            let g2 = 1.2 * k as f64 / 19.0;
            let prof = two_cell_profile(&p, g2).unwrap();
            let spec = eigensolve(&build_linear_model(p.kappa, p.nu, &prof).unwrap()).unwrap();
            spec.defect_energy().unwrap()
        })
        .collect();
    assert!(energies.windows(2).all(|w| w[1] < w[0]), "{energies:?}");
}

#[test]
fn creutz_equivalence_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let kappa = rng.gen_range(1.1..2.5);
        let gammas = rng.gen_range(0.0..0.95) * kappa;
        let gamma0 = rng.gen_range(0.0..1.0) * gammas;
        let p = LatticeParams::new(20, kappa, 1.0, gamma0, gammas, rng.gen_range(0.5..2.0)).unwrap();
        let s0 = StateVector::single_site(20, rng.gen_range(1.0..1e3)).unwrap();
        let dev = equivalence_check(&p, &s0, 20.0, 1e-3).unwrap();
        assert!(dev < 1e-8, "{p:?}: {dev}");
    }
}

#[test]
fn eigenvectors_solve_hermitian_problem() {
    let prof = breather_lab::GammaProfile::end_defect(60, SQRT_2, figures::gamma_s_breather(), 0.0).unwrap();
    let model = build_linear_model(SQRT_2, 1.0, &prof).unwrap();
    let spec = eigensolve(&model).unwrap();
    let residual = &model.h_h * &spec.eigenvectors_h
        - &spec.eigenvectors_h * nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(spec.eigenvalues.clone()));
    assert!(residual.amax() < 1e-10, "{}", residual.amax());
}
