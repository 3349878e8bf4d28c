//! Randomized checks of the structural invariants.

use catsim::fock::{embed, ladder_operators, partial_trace_operator};
use catsim::models::CouplingSpec;
use catsim::observables::{negativity_on, number_and_parity};
use catsim::phasespace::{joint_quadrature_distribution, linspace};
use catsim::scenario::ScenarioConfig;
use catsim::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
}

fn cmatrix(r: usize, k: usize) -> impl Strategy<Value = DMatrix<C64>> {
    prop::collection::vec(complex(), r * k).prop_map(move |v| DMatrix::from_vec(r, k, v))
}

/// Full-rank density matrix A A† / Tr of dimension `d`.
fn density(dims: Dims) -> impl Strategy<Value = DensityMatrix> {
    let d = dims.total();
    cmatrix(d, d).prop_map(move |a| {
        let m = &a * a.adjoint() + DMatrix::identity(d, d) * c(1e-3, 0.0);
        let tr = m.trace();
        DensityMatrix::new(Operator::new(m / tr, dims).unwrap()).unwrap()
    })
}

fn pure(dims: Dims) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(complex(), dims.total())
        .prop_filter("nonzero", |v| v.iter().any(|z| z.norm() > 1e-3))
        .prop_map(move |v| StateVector::normalized(DVector::from_vec(v), dims).unwrap())
}

fn mode_params() -> impl Strategy<Value = ModeParams> {
    (-1.0..1.0f64, 0.0..2.0f64, complex(), 0.0..1.0f64, 0.0..1.0f64).prop_map(
        |(detuning, kerr, drive, gamma, eta)| ModeParams {
            detuning,
            kerr,
            drive: drive * 3.0,
            gamma,
            eta,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ladder_commutator_is_identity_below_the_cut(n in 2usize..30) {
        let l = ladder_operators(FockSpace::new(n).unwrap());
        let comm = l.annihilation.commutator(&l.creation);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((comm.matrix()[(i, j)] - c(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parity_anticommutes_with_annihilation(n in 2usize..30) {
        let l = ladder_operators(FockSpace::new(n).unwrap());
        let pa = l.parity.matrix() * l.annihilation.matrix();
        let ap = l.annihilation.matrix() * l.parity.matrix();
        prop_assert_eq!(max_abs(&(pa + ap)), 0.0);
    }

    #[test]
    fn displacement_is_unitary_on_the_low_block(r in 0.0..2.0f64, th in 0.0..6.3f64) {
        let n = 40;
        let alpha = C64::from_polar(r, th);
        let d = displacement(alpha, FockSpace::new(n).unwrap()).unwrap();
        let m = d.matrix();
        let prod = m.adjoint() * m;
        // D|m⟩ reaches Fock numbers up to about (√m + |α|)², so the retained
        // columns stay normalized only well below the cut.
        let cut = ((n as f64).sqrt() - r - 1.5).powi(2) as usize;
        for i in 0..cut {
            for j in 0..cut {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((prod[(i, j)] - c(want, 0.0)).norm() < 1e-8, "({i},{j})");
            }
        }
    }

    #[test]
    fn tensor_product_is_associative(
        a in cmatrix(2, 2), b in cmatrix(3, 3), cm in cmatrix(2, 2)
    ) {
        let (a, b, cm) = (
            Operator::from_matrix(a).unwrap(),
            Operator::from_matrix(b).unwrap(),
            Operator::from_matrix(cm).unwrap(),
        );
        let left = tensor_product(&tensor_product(&a, &b), &cm);
        let right = tensor_product(&a, &tensor_product(&b, &cm));
        prop_assert!(max_abs(&(left.matrix() - right.matrix())) < 1e-14);
    }

    #[test]
    fn partial_trace_recovers_product_factors(
        ra in density(Dims::Mode(3)), rb in density(Dims::Mode(4))
    ) {
        let ab = ra.tensor(&rb);
        let a = partial_trace_operator(&ab, (3, 4), Subsystem::A).unwrap();
        let b = partial_trace_operator(&ab, (3, 4), Subsystem::B).unwrap();
        prop_assert!(max_abs(&(a.matrix() - ra.matrix())) < 1e-14);
        prop_assert!(max_abs(&(b.matrix() - rb.matrix())) < 1e-14);
    }

    #[test]
    fn one_mode_hamiltonian_is_hermitian(p in mode_params(), n in 4usize..20) {
        let model = build_one_mode(&p, n).unwrap();
        prop_assert!(model.hamiltonian().hermiticity_error() < 1e-12);
    }

    #[test]
    fn cat_matches_displaced_vacuum_superposition(r in 0.2..2.5f64, th in 0.0..6.3f64, odd in any::<bool>()) {
        let n = 30;
        let xi = C64::from_polar(r, th);
        let parity = if odd { CatParity::Odd } else { CatParity::Even };
        let sign = if odd { -1.0 } else { 1.0 };
        let space = FockSpace::new(n).unwrap();
        let plus = displacement(xi, space).unwrap();
        let minus = displacement(-xi, space).unwrap();
        let v = plus.matrix().column(0) + minus.matrix().column(0) * c(sign, 0.0);
        let want = StateVector::normalized(v.into_owned(), space.dims()).unwrap();
        let got = cat_state(xi, parity, n).unwrap();
        let diff = got.amplitudes() - want.amplitudes();
        prop_assert!(diff.iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn cat_is_blind_to_the_sign_of_alpha(r in 0.2..2.5f64, th in 0.0..6.3f64, odd in any::<bool>()) {
        let xi = C64::from_polar(r, th);
        let parity = if odd { CatParity::Odd } else { CatParity::Even };
        let a = cat_state(xi, parity, 30).unwrap();
        let b = cat_state(-xi, parity, 30).unwrap();
        let f = fidelity_pure(&a, &b.to_density()).unwrap();
        prop_assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rhs_is_linear(
        p in mode_params(),
        r1 in density(Dims::Mode(6)),
        r2 in density(Dims::Mode(6)),
        w in 0.0..1.0f64,
    ) {
        let model = build_one_mode(&p, 6).unwrap();
        let mix = DensityMatrix::mixture(&[(w, &r1), (1.0 - w, &r2)]).unwrap();
        let lhs = lindblad_rhs(&model, &mix).unwrap();
        let a = lindblad_rhs(&model, &r1).unwrap();
        let b = lindblad_rhs(&model, &r2).unwrap();
        let rhs = a.matrix() * c(w, 0.0) + b.matrix() * c(1.0 - w, 0.0);
        prop_assert!(max_abs(&(lhs.matrix() - rhs)) < 1e-12 * (1.0 + max_abs(lhs.matrix())));
    }

    #[test]
    fn trajectories_stay_hermitian_and_keep_sector_populations(
        p in mode_params(), rho0 in density(Dims::Mode(8))
    ) {
        let p = ModeParams { gamma: 0.0, ..p };
        let model = build_one_mode(&p, 8).unwrap();
        let traj = evolve(&model, &rho0, &[0.0, 0.5, 1.0, 2.0], &EvolveOptions::default()).unwrap();
        let even = |r: &DensityMatrix| (0..8).step_by(2).map(|k| r.matrix()[(k, k)].re).sum::<f64>();
        let e0 = even(&rho0);
        for r in &traj.states {
            prop_assert!(r.hermiticity_error() < 1e-10);
            prop_assert!((even(r) - e0).abs() < 1e-8);
        }
    }

    #[test]
    fn uncoupled_modes_stay_separable(
        pa in mode_params(), pb in mode_params(),
        ra in density(Dims::Mode(4)), rb in density(Dims::Mode(4)),
    ) {
        let model = build_two_mode(&pa, &pb, &CouplingSpec::linear(0.0), 4, 4).unwrap();
        let traj = evolve(&model, &ra.tensor(&rb), &[0.1, 0.5, 1.0], &EvolveOptions::default()).unwrap();
        for r in &traj.states {
            prop_assert!(negativity(r, None).unwrap() < 1e-10);
        }
    }

    #[test]
    fn pure_bipartite_states_have_equal_marginal_entropies(psi in pure(Dims::Pair(3, 4))) {
        let rho = psi.to_density();
        let a = catsim::fock::partial_trace(&rho, (3, 4), Subsystem::A).unwrap();
        let b = catsim::fock::partial_trace(&rho, (3, 4), Subsystem::B).unwrap();
        prop_assert!((von_neumann_entropy(&a) - von_neumann_entropy(&b)).abs() < 1e-8);
    }

    #[test]
    fn purity_and_fidelity_match_the_eigen_expansion(
        rho in density(Dims::Mode(6)), psi in pure(Dims::Mode(6))
    ) {
        let comps = dominant_eigencomponents(&rho, 6).unwrap();
        let p: f64 = comps.iter().map(|c| c.weight * c.weight).sum();
        prop_assert!((purity(&rho) - p).abs() < 1e-10);
        let f: f64 = comps
            .iter()
            .map(|c| c.weight * psi.inner(&c.state).unwrap().norm_sqr())
            .sum();
        prop_assert!((fidelity_pure(&psi, &rho).unwrap() - f).abs() < 1e-10);
    }

    #[test]
    fn product_states_carry_no_correlation(
        ra in density(Dims::Mode(3)), rb in density(Dims::Mode(4))
    ) {
        let rho = ra.tensor(&rb);
        prop_assert!(negativity(&rho, None).unwrap().abs() < 1e-10);
        prop_assert!(mutual_information(&rho, None).unwrap().abs() < 1e-10);
    }

    #[test]
    fn mutual_information_is_nonnegative_and_negativity_side_free(rho in density(Dims::Pair(3, 3))) {
        prop_assert!(mutual_information(&rho, None).unwrap() >= 0.0);
        let a = negativity_on(&rho, None, Subsystem::A).unwrap();
        let b = negativity_on(&rho, None, Subsystem::B).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn coherent_wigner_is_nonnegative_and_normalized(r in 0.0..2.0f64, th in 0.0..6.3f64) {
        let alpha = C64::from_polar(r, th);
        let rho = StateVector::coherent(alpha, FockSpace::new(30).unwrap()).unwrap().to_density();
        let axis = linspace(-5.0, 5.0, 101);
        let w = wigner(&rho, &axis, &axis).unwrap();
        prop_assert!(w.min() > -1e-8);
        prop_assert!((w.integral() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn random_states_have_normalized_wigner(rho in density(Dims::Mode(5))) {
        let axis = linspace(-6.0, 6.0, 121);
        let w = wigner(&rho, &axis, &axis).unwrap();
        prop_assert!((w.integral() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn joint_marginals_match_reduced_quadratures(rho in density(Dims::Pair(3, 4))) {
        let xs = linspace(-9.0, 9.0, 361);
        let joint = joint_quadrature_distribution(&rho, None, &xs, &xs).unwrap();
        let ra = catsim::fock::partial_trace(&rho, (3, 4), Subsystem::A).unwrap();
        let rb = catsim::fock::partial_trace(&rho, (3, 4), Subsystem::B).unwrap();
        let qa = quadrature_distribution(&ra, 0.0, &xs).unwrap();
        let qb = quadrature_distribution(&rb, 0.0, &xs).unwrap();
        for (x, y) in joint.marginal_a().iter().zip(&qa.density) {
            prop_assert!((x - y).abs() < 1e-8);
        }
        for (x, y) in joint.marginal_b().iter().zip(&qb.density) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn config_round_trips(p in mode_params(), n in 4usize..40, samples in 2usize..50) {
        let v = serde_json::json!({
            "system": "one_mode",
            "energy_unit": "eta_a",
            "mode_a": serde_json::to_value(p).unwrap(),
            "truncation": {"a": n},
            "initial": {"kind": "cat", "parity": "odd"},
            "time": {"t_max": 1.5, "samples": samples}
        });
        let cfg = ScenarioConfig::from_value(v).unwrap();
        let once = cfg.to_value();
        let twice = ScenarioConfig::from_value(once.clone()).unwrap().to_value();
        prop_assert_eq!(once, twice);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn propagated_steady_state_is_stationary(gamma in 0.05..0.5f64, r in 0.5..1.5f64) {
        let p = ModeParams {
            drive: C64::from_polar(r, -0.7),
            ..ModeParams::reference().with_gamma(gamma)
        };
        let model = build_one_mode(&p, 12).unwrap();
        let tol = 1e-6;
        let rho0 = DensityMatrix::fock(Dims::Mode(12), 0).unwrap();
        let ss = steady_state(&model, SteadyStateMethod::Propagate, Some(&rho0), &SteadyStateOptions::with_tol(tol)).unwrap();
        let residual = max_abs(lindblad_rhs(&model, &ss).unwrap().matrix());
        prop_assert!(residual < tol);
        let later = evolve(&model, &ss, &[1.0], &EvolveOptions::default()).unwrap();
        let (n0, p0) = number_and_parity(&ss);
        let (n1, p1) = number_and_parity(&later.states[0]);
        prop_assert!((n0 - n1).abs() <= 10.0 * tol);
        prop_assert!((p0 - p1).abs() <= 10.0 * tol);
        prop_assert!((purity(&ss) - purity(&later.states[0])).abs() <= 10.0 * tol);
    }
}

#[test]
fn embedding_matches_kronecker_ordering() {
    // Index i_a · N_b + i_b.
    let la = ladder_operators(FockSpace::new(3).unwrap());
    let a = embed(&la.number, Subsystem::A, (3, 2)).unwrap();
    let diag: Vec<f64> = (0..6).map(|k| a.matrix()[(k, k)].re).collect();
    assert_eq!(diag, [0.0, 0.0, 1.0, 1.0, 2.0, 2.0]);
}

#[test]
fn even_cat_wigner_goes_negative() {
    let rho = cat_state(C64::new(2.0, 0.0), CatParity::Even, 30).unwrap().to_density();
    let axis = linspace(-4.0, 4.0, 161);
    assert!(wigner(&rho, &axis, &axis).unwrap().min() < -0.1);
}
