//! Randomized invariants over generated seeds and inputs.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use ins_eqf::check;
use ins_eqf::eqf::{self, FilterConfig, FilterState, NoiseConfig, PositionMeasurement};
use ins_eqf::ins::{Gravity, InsInput, InsState};
use ins_eqf::io::fmt_f64;
use ins_eqf::lie::{So3, Vec3};
use ins_eqf::metrics::{anees, rmse_blocks};
use ins_eqf::symmetry::{chart, chart_inv, SymmetryElement, SymmetryKind};

fn kind() -> impl Strategy<Value = SymmetryKind> {
    prop::sample::select(SymmetryKind::ALL.to_vec())
}

fn vec3(s: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-s..s).prop_map(Vec3::from)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_and_action_axioms(k in kind(), seed in any::<u64>()) {
        prop_assert!(check::group_axioms(k, 4, seed) <= 1e-10);
        prop_assert!(check::action_axioms(k, 4, seed) <= 1e-10);
    }

    #[test]
    fn exp_log_and_adjoint(k in kind(), seed in any::<u64>()) {
        prop_assert!(check::exp_log_roundtrip(k, 4, seed) <= 1e-9);
        prop_assert!(check::adjoint_commutation(k, 4, seed) <= 1e-9);
    }

    #[test]
    fn lift_reproduces_the_dynamics(k in kind(), seed in any::<u64>()) {
        prop_assert!(check::lift_error(k, 2, seed, &Gravity::default()) <= 1e-5);
    }

    #[test]
    fn tangent_group_navigation_is_exact(seed in any::<u64>()) {
        let scan = check::residual_scan(SymmetryKind::Tg, seed, &Gravity::default());
        prop_assert!(scan.worst_scaled <= 1e-10, "{}", scan.worst_scaled);
    }

    #[test]
    fn chart_inverts(k in kind(), eps in prop::collection::vec(-0.5f64..0.5, 18)) {
        let eps = DVector::from_vec(eps[..k.dim()].to_vec());
        let back = chart(k, &chart_inv(k, &eps).unwrap()).unwrap();
        prop_assert!((back - &eps).amax() <= 1e-10);
    }

    #[test]
    fn so3_exp_log_roundtrip(axis in vec3(1.0), angle in 0.0f64..3.1) {
        prop_assume!(axis.norm() > 1e-3);
        let phi = axis.normalize() * angle;
        prop_assert!((So3::exp(&phi).log().unwrap() - phi).amax() <= 1e-9);
    }

    #[test]
    fn quaternion_roundtrip(phi in vec3(3.0)) {
        let r = So3::exp(&phi);
        let q = r.to_quaternion();
        prop_assert!(q[0] >= 0.0);
        let back = So3::from_quaternion(q[0], q[1], q[2], q[3]);
        prop_assert!((back.matrix() - r.matrix()).amax() <= 1e-14);
    }

    #[test]
    fn float_cells_roundtrip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let s = fmt_f64(x);
        prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn anees_is_quadratic_in_the_error(e in prop::collection::vec(-2.0f64..2.0, 6), scale in 0.1f64..10.0) {
        let errors = vec![DVector::from_vec(e[..3].to_vec()), DVector::from_vec(e[3..].to_vec())];
        let covs = vec![DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 0.5])); 2];
        let base = anees(&errors, &covs).unwrap();
        let scaled: Vec<_> = errors.iter().map(|v| v * scale).collect();
        let s = anees(&scaled, &covs).unwrap();
        prop_assert!(base >= 0.0);
        prop_assert!((s - scale * scale * base).abs() <= 1e-9 * (1.0 + s));
    }

    #[test]
    fn rmse_ignores_run_order(seed in any::<u64>(), shift in 0usize..5) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let truth: Vec<Vec<InsState>> = (0..5).map(|_| vec![check::random_state(&mut rng, SymmetryKind::Sd); 2]).collect();
        let est: Vec<Vec<InsState>> = (0..5).map(|_| vec![check::random_state(&mut rng, SymmetryKind::Sd); 2]).collect();
        let a = rmse_blocks(&truth, &est).unwrap();
        let (mut t2, mut e2) = (truth.clone(), est.clone());
        t2.rotate_left(shift);
        e2.rotate_left(shift);
        let b = rmse_blocks(&t2, &e2).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.attitude_deg - y.attitude_deg).abs() <= 1e-9);
            prop_assert!((x.position - y.position).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Covariance stays symmetric positive definite through many propagate/update cycles.
    #[test]
    fn covariance_stays_symmetric_pd(k in kind(), gyro in vec3(0.5), acc in vec3(2.0), fix in vec3(5.0)) {
        let noise = NoiseConfig::from_densities(2e-3, 2e-2, 1e-2, 1e-2, 1e-2, 1e-2, 0.2);
        let cfg = FilterConfig::default();
        let mut fs = FilterState::new(SymmetryElement::identity(k), DMatrix::identity(k.dim(), k.dim()) * 0.1, 0.0);
        let u = InsInput::imu(gyro, acc + Vec3::new(0.0, 0.0, 9.81));
        for step in 1..=2000 {
            fs = eqf::propagate(&fs, &u, 0.005, &noise, &cfg).unwrap();
            if step % 20 == 0 {
                let y = fix * (step as f64 * 1e-3).sin();
                fs = eqf::update_position(&fs, &PositionMeasurement { t: fs.t, pos: y }, &noise, &cfg).unwrap().0;
            }
        }
        let s = &fs.sigma;
        prop_assert!((s - s.transpose()).amax() <= 1e-9 * s.amax());
        prop_assert!(s.clone().cholesky().is_some());
    }
}
