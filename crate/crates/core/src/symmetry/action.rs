//! State and input actions, lifts and the local chart for each symmetry kind.

use nalgebra::{DVector, SVector};

use super::{SymmetryElement, SymmetryError, SymmetryKind};
use crate::ins::{stack2, stack3, InsInput, InsState};
use crate::lie::{GroupElement, Hg3, LieError, Se23, SemiDirect, Vec3};

fn dvec<const N: usize>(v: &SVector<f64, N>) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

fn svec<const N: usize>(v: &DVector<f64>, start: usize) -> SVector<f64, N> {
    SVector::<f64, N>::from_column_slice(&v.as_slice()[start..start + N])
}

fn v3(v: &DVector<f64>, start: usize) -> Vec3 {
    svec::<3>(v, start)
}

fn concat(parts: &[&[f64]]) -> DVector<f64> {
    DVector::from_iterator(parts.iter().map(|p| p.len()).sum(), parts.iter().flat_map(|p| p.iter().copied()))
}

fn base_se23(x: &SymmetryElement) -> Se23 {
    x.se23().expect("kind has an SE23 base")
}

fn base_hg3(x: &SymmetryElement) -> Hg3 {
    x.hg3().expect("kind has an HG3 base")
}

/// State action `φ(X, ξ)`, a right action of the group on the INS state.
pub fn act_state(x: &SymmetryElement, xi: &InsState) -> InsState {
    let g = x.gamma();
    match x.kind {
        SymmetryKind::So3R12 => InsState {
            rot: xi.rot.compose(&x.rot()),
            vel: xi.vel + v3(g, 0),
            pos: xi.pos + v3(g, 3),
            bias_gyro: xi.bias_gyro + v3(g, 6),
            bias_acc: xi.bias_acc + v3(g, 9),
            bias_vel: xi.bias_vel,
        },
        SymmetryKind::Se23R6 => {
            let t = xi.nav().compose(&base_se23(x));
            xi.with_nav(&t).with_bias6(&(xi.bias6() + svec::<6>(g, 0)))
        }
        SymmetryKind::Tfg => {
            let t = xi.nav().compose(&base_se23(x));
            let at = x.rot().inverse();
            let d = xi.bias6() - svec::<6>(g, 0);
            let b = stack2(&(at * d.fixed_rows::<3>(0).into_owned()), &(at * d.fixed_rows::<3>(3).into_owned()));
            xi.with_nav(&t).with_bias6(&b)
        }
        SymmetryKind::Tg => {
            let c = base_se23(x);
            let t = xi.nav().compose(&c);
            let b = c.inverse().adjoint() * (xi.bias9() - svec::<9>(g, 0));
            xi.with_nav(&t).with_bias9(&b)
        }
        SymmetryKind::Dp => {
            let bb = base_hg3(x);
            let nav = Hg3::from_parts(xi.rot, xi.vel).compose(&bb);
            let b = bb.inverse().adjoint() * (xi.bias6() - svec::<6>(g, 0));
            InsState { rot: nav.rot, vel: nav.vel(), pos: xi.pos + v3(g, 6), ..*xi }.with_bias6(&b)
        }
        SymmetryKind::Sd => {
            let c = base_se23(x);
            let t = xi.nav().compose(&c);
            let b = c.hg().inverse().adjoint() * (xi.bias6() - svec::<6>(g, 0));
            xi.with_nav(&t).with_bias6(&b)
        }
    }
}

/// Input action `ψ(X, u)`; defined for the tangent and direct-position groups only.
pub fn act_input(x: &SymmetryElement, u: &InsInput) -> Result<InsInput, SymmetryError> {
    let g = x.gamma();
    match x.kind {
        SymmetryKind::Tg => {
            let c = base_se23(x);
            let ci = c.inverse();
            let ad = ci.adjoint();
            let mut w = ad * (u.w9() - svec::<9>(g, 0));
            let corr = w.fixed_rows::<3>(6) + ci.vel();
            w.fixed_rows_mut::<3>(6).copy_from(&corr);
            let tau = ad * u.tau9();
            Ok(InsInput::from_w9_tau9(&w, &tau))
        }
        SymmetryKind::Dp => {
            let b = base_hg3(x);
            let ad = b.inverse().adjoint();
            let w = ad * (u.w6() - svec::<6>(g, 0));
            let tau = ad * u.tau6();
            let at = b.rot.inverse();
            Ok(InsInput {
                gyro: w.fixed_rows::<3>(0).into_owned(),
                acc: w.fixed_rows::<3>(3).into_owned(),
                vel: at * (u.vel - b.vel()),
                tau_gyro: tau.fixed_rows::<3>(0).into_owned(),
                tau_acc: tau.fixed_rows::<3>(3).into_owned(),
                tau_vel: u.tau_vel,
            })
        }
        k => Err(SymmetryError::UnsupportedKind(k)),
    }
}

/// The group element `X` with `φ(X, ξ̊) = ξ`.
pub fn origin_lift(kind: SymmetryKind, xi: &InsState) -> SymmetryElement {
    let (base, gamma) = match kind {
        SymmetryKind::So3R12 => {
            (GroupElement::So3(xi.rot), concat(&[xi.vel.as_slice(), xi.pos.as_slice(), xi.bias_gyro.as_slice(), xi.bias_acc.as_slice()]))
        }
        SymmetryKind::Se23R6 => (GroupElement::Se23(xi.nav()), dvec(&xi.bias6())),
        SymmetryKind::Tfg => {
            let r = xi.rot.matrix();
            (GroupElement::Se23(xi.nav()), dvec(&-stack2(&(r * xi.bias_gyro), &(r * xi.bias_acc))))
        }
        SymmetryKind::Tg => {
            let t = xi.nav();
            (GroupElement::Se23(t), dvec(&-(t.adjoint() * xi.bias9())))
        }
        SymmetryKind::Dp => {
            let b = Hg3::from_parts(xi.rot, xi.vel);
            let beta = -(b.adjoint() * xi.bias6());
            (GroupElement::Hg3(b), concat(&[beta.as_slice(), xi.pos.as_slice()]))
        }
        SymmetryKind::Sd => {
            let t = xi.nav();
            (GroupElement::Se23(t), dvec(&-(t.hg().adjoint() * xi.bias6())))
        }
    };
    SymmetryElement { kind, g: SemiDirect { base, gamma, rep: kind.representation() } }
}

/// Closed-form `X` with `φ(X, ξ₁) = ξ₂`.
pub fn transfer(kind: SymmetryKind, from: &InsState, to: &InsState) -> SymmetryElement {
    origin_lift(kind, from).inverse().compose(&origin_lift(kind, to)).expect("same kind")
}

/// Equivariant error `e = φ(X̂⁻¹, ξ)`.
pub fn error(x_hat: &SymmetryElement, xi: &InsState) -> InsState {
    act_state(&x_hat.inverse(), xi)
}

/// State estimate `ξ̂ = φ(X̂, ξ̊)`.
pub fn estimate(x_hat: &SymmetryElement) -> InsState {
    act_state(x_hat, &InsState::origin())
}

/// Local coordinates `ε = log(φ_ξ̊⁻¹(e))` of an error state.
pub fn chart(kind: SymmetryKind, e: &InsState) -> Result<DVector<f64>, SymmetryError> {
    origin_lift(kind, e).log()
}

/// Inverse chart `φ(exp ε, ξ̊)`.
pub fn chart_inv(kind: SymmetryKind, eps: &DVector<f64>) -> Result<InsState, SymmetryError> {
    if eps.len() != kind.dim() {
        return Err(LieError::DimensionMismatch { expected: kind.dim(), got: eps.len() }.into());
    }
    Ok(estimate(&SymmetryElement::exp(kind, eps)?))
}

/// Lift `Λ(ξ, u)` with `dφ_ξ(Λ(ξ, u)) = f(ξ, u)`.
pub fn lift(kind: SymmetryKind, xi: &InsState, u: &InsInput, g: &crate::ins::Gravity) -> DVector<f64> {
    let rt = xi.rot.inverse();
    let om = u.gyro - xi.bias_gyro;
    let acc = u.acc - xi.bias_acc + rt * g.0;
    let nu = u.vel - xi.bias_vel;
    let l1 = stack3(&om, &acc, &(nu + rt * xi.vel));
    match kind {
        SymmetryKind::So3R12 => {
            let r = xi.rot.matrix();
            let pd = xi.vel + r * nu;
            concat(&[
                om.as_slice(),
                (r * (u.acc - xi.bias_acc) + g.0).as_slice(),
                pd.as_slice(),
                u.tau_gyro.as_slice(),
                u.tau_acc.as_slice(),
            ])
        }
        SymmetryKind::Se23R6 => concat(&[l1.as_slice(), u.tau6().as_slice()]),
        SymmetryKind::Tfg => {
            let l2 = stack2(&(xi.bias_gyro.cross(&om) - u.tau_gyro), &(xi.bias_acc.cross(&om) - u.tau_acc));
            concat(&[l1.as_slice(), l2.as_slice()])
        }
        SymmetryKind::Tg => {
            let l2 = Se23::ad(&xi.bias9()) * l1 - u.tau9();
            concat(&[l1.as_slice(), l2.as_slice()])
        }
        SymmetryKind::Dp => {
            let l1 = stack2(&om, &acc);
            let l2 = Hg3::ad(&xi.bias6()) * l1 - u.tau6();
            let l3 = xi.vel + xi.rot * nu;
            concat(&[l1.as_slice(), l2.as_slice(), l3.as_slice()])
        }
        SymmetryKind::Sd => {
            let l2 = Hg3::ad(&xi.bias6()) * crate::lie::maps::pi(&l1) - u.tau6();
            concat(&[l1.as_slice(), l2.as_slice()])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ins::{dynamics, Gravity};
    use crate::lie::So3;

    fn dist(a: &InsState, b: &InsState) -> f64 {
        a.distance(b)
    }
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rv(rng: &mut ChaCha8Rng, s: f64) -> Vec3 {
        Vec3::new(rng.random_range(-s..s), rng.random_range(-s..s), rng.random_range(-s..s))
    }

    fn random_state(rng: &mut ChaCha8Rng, kind: SymmetryKind) -> InsState {
        InsState {
            rot: So3::exp(&rv(rng, 1.0)),
            vel: rv(rng, 3.0),
            pos: rv(rng, 10.0),
            bias_gyro: rv(rng, 0.1),
            bias_acc: rv(rng, 0.5),
            bias_vel: if kind == SymmetryKind::Tg { rv(rng, 0.2) } else { Vec3::zeros() },
        }
    }

    fn random_input(rng: &mut ChaCha8Rng, kind: SymmetryKind) -> InsInput {
        InsInput {
            gyro: rv(rng, 1.0),
            acc: rv(rng, 10.0),
            vel: if kind.has_input_action() { rv(rng, 1.0) } else { Vec3::zeros() },
            tau_gyro: rv(rng, 0.01),
            tau_acc: rv(rng, 0.1),
            tau_vel: if kind == SymmetryKind::Tg { rv(rng, 0.05) } else { Vec3::zeros() },
        }
    }

    fn random_element(rng: &mut ChaCha8Rng, kind: SymmetryKind) -> SymmetryElement {
        let v = DVector::from_fn(kind.dim(), |_, _| rng.random_range(-1.0..1.0));
        SymmetryElement::exp(kind, &v).unwrap()
    }

    #[test]
    fn identity_acts_trivially() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for kind in SymmetryKind::ALL {
            let xi = random_state(&mut rng, kind);
            let id = SymmetryElement::identity(kind);
            assert!(dist(&act_state(&id, &xi), &xi) < 1e-14);
            if kind.has_input_action() {
                let u = random_input(&mut rng, kind);
                let v = act_input(&id, &u).unwrap();
                assert_relative_eq!(v.w9(), u.w9(), epsilon = 1e-14);
                assert_relative_eq!(v.tau9(), u.tau9(), epsilon = 1e-14);
            } else {
                assert_eq!(act_input(&id, &InsInput::default()), Err(SymmetryError::UnsupportedKind(kind)));
            }
        }
    }

    #[test]
    fn actions_are_right_actions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for kind in SymmetryKind::ALL {
            for _ in 0..50 {
                let (x, y) = (random_element(&mut rng, kind), random_element(&mut rng, kind));
                let xi = random_state(&mut rng, kind);
                let yx = y.compose(&x).unwrap();
                let lhs = act_state(&x, &act_state(&y, &xi));
                assert!(dist(&lhs, &act_state(&yx, &xi)) < 1e-10, "{kind}");
                if kind.has_input_action() {
                    let u = random_input(&mut rng, kind);
                    let a = act_input(&x, &act_input(&y, &u).unwrap()).unwrap();
                    let b = act_input(&yx, &u).unwrap();
                    assert_relative_eq!(a.w9(), b.w9(), epsilon = 1e-10);
                    assert_relative_eq!(a.tau9(), b.tau9(), epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn transfer_is_a_witness_of_transitivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in SymmetryKind::ALL {
            let (a, b) = (random_state(&mut rng, kind), random_state(&mut rng, kind));
            let x = transfer(kind, &a, &b);
            assert!(dist(&act_state(&x, &a), &b) < 1e-10, "{kind}");
            assert!(dist(&estimate(&origin_lift(kind, &a)), &a) < 1e-12);
        }
    }

    #[test]
    fn chart_roundtrip_and_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for kind in SymmetryKind::ALL {
            assert_eq!(chart(kind, &InsState::origin()).unwrap(), DVector::zeros(kind.dim()));
            for _ in 0..20 {
                let mut eps = DVector::from_fn(kind.dim(), |_, _| rng.random_range(-1.0..1.0));
                let n = eps.norm();
                if n > 1.0 {
                    eps /= n;
                }
                let e = chart_inv(kind, &eps).unwrap();
                assert_relative_eq!(chart(kind, &e).unwrap(), eps, epsilon = 1e-9);
            }
        }
        assert!(chart_inv(SymmetryKind::Tg, &DVector::zeros(15)).is_err());
    }

    #[test]
    fn mekf_chart_is_rotation_log() {
        let e = InsState::new(So3::exp(&Vec3::new(0.1, 0.2, -0.3)), Vec3::new(1.0, 2.0, 3.0), Vec3::zeros(), Vec3::zeros(), Vec3::zeros());
        let eps = chart(SymmetryKind::So3R12, &e).unwrap();
        assert_relative_eq!(eps.rows(0, 3).into_owned(), DVector::from_vec(vec![0.1, 0.2, -0.3]), epsilon = 1e-12);
        assert_relative_eq!(eps.rows(3, 3).into_owned(), DVector::from_vec(vec![1.0, 2.0, 3.0]), epsilon = 1e-12);
    }

    #[test]
    fn chart_rejects_rotation_near_pi() {
        let e =
            InsState::new(So3::exp(&Vec3::new(std::f64::consts::PI, 0.0, 0.0)), Vec3::zeros(), Vec3::zeros(), Vec3::zeros(), Vec3::zeros());
        for kind in SymmetryKind::ALL {
            assert!(matches!(chart(kind, &e), Err(SymmetryError::ChartDomain(_))));
        }
    }

    #[test]
    fn error_of_estimate_is_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in SymmetryKind::ALL {
            let x = random_element(&mut rng, kind);
            let e = error(&x, &estimate(&x));
            assert!(dist(&e, &InsState::origin()) < 1e-10);
            assert!(chart(kind, &e).unwrap().norm() < 1e-9);
        }
    }

    #[test]
    fn invariant_error_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let xi = random_state(&mut rng, SymmetryKind::Se23R6);
        let xh = random_state(&mut rng, SymmetryKind::Se23R6);
        let e = error(&origin_lift(SymmetryKind::Se23R6, &xh), &xi);
        let t = xi.nav().compose(&xh.nav().inverse());
        assert_relative_eq!(*e.rot.matrix(), *t.rot.matrix(), epsilon = 1e-12);
        assert_relative_eq!(e.pos, t.pos(), epsilon = 1e-12);
        assert_relative_eq!(e.bias6(), xi.bias6() - xh.bias6(), epsilon = 1e-12);
        let e = error(&origin_lift(SymmetryKind::Tfg, &xh), &xi);
        let r = xh.rot.matrix();
        assert_relative_eq!(e.bias_gyro, r * (xi.bias_gyro - xh.bias_gyro), epsilon = 1e-12);
        assert_relative_eq!(e.bias_acc, r * (xi.bias_acc - xh.bias_acc), epsilon = 1e-12);
    }

    #[test]
    fn mekf_lift_at_origin() {
        let g = Gravity::default();
        let l = lift(SymmetryKind::So3R12, &InsState::origin(), &InsInput::default(), &g);
        let mut expect = DVector::zeros(15);
        expect.rows_mut(3, 3).copy_from_slice(g.0.as_slice());
        assert_eq!(l, expect);
    }

    #[test]
    fn iekf_lift_matches_compact_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = Gravity::default();
        let xi = random_state(&mut rng, SymmetryKind::Se23R6);
        let u = random_input(&mut rng, SymmetryKind::Se23R6);
        let c = crate::ins::compact_matrices(&xi, &u, &g);
        let t = xi.nav().matrix();
        let ti = xi.nav().inverse().matrix();
        let to5 = |m: nalgebra::Matrix5<f64>| nalgebra::DMatrix::from_column_slice(5, 5, m.as_slice());
        let m = to5(c.w - c.b + c.d) + &ti * to5(c.g - c.d) * &t;
        let l = lift(SymmetryKind::Se23R6, &xi, &u, &g);
        let expect = Se23::vee(&m);
        assert_relative_eq!(l.rows(0, 9).into_owned(), dvec(&expect), epsilon = 1e-12);
    }

    fn state_delta(a: &InsState, b: &InsState, h: f64) -> [Vec3; 6] {
        // Body-frame rotation rate and Euclidean rates from a central difference.
        let dr = (a.rot.inverse().compose(&b.rot)).log().unwrap() / h;
        [
            dr,
            (b.vel - a.vel) / h,
            (b.pos - a.pos) / h,
            (b.bias_gyro - a.bias_gyro) / h,
            (b.bias_acc - a.bias_acc) / h,
            (b.bias_vel - a.bias_vel) / h,
        ]
    }

    #[test]
    fn lift_property_by_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = Gravity::default();
        let h = 1e-6;
        for kind in SymmetryKind::ALL {
            for _ in 0..100 {
                let xi = random_state(&mut rng, kind);
                let mut u = random_input(&mut rng, kind);
                if kind != SymmetryKind::Tg && kind != SymmetryKind::Dp {
                    u.vel = Vec3::zeros();
                }
                let l = lift(kind, &xi, &u, &g);
                let at = |s: f64| act_state(&SymmetryElement::exp(kind, &(&l * s)).unwrap(), &xi);
                let (m, p) = (at(-h), at(h));
                let d = state_delta(&m, &p, 2.0 * h);
                let f = dynamics(&xi, &u, &g);
                let want = [f.rot, f.vel, f.pos, f.bias_gyro, f.bias_acc, f.bias_vel];
                for (i, (got, w)) in d.iter().zip(want.iter()).enumerate() {
                    let err = (got - w).norm();
                    assert!(err <= 1e-5 * w.norm().max(1.0), "{kind} block {i}: {got} vs {w}");
                }
            }
        }
    }

    #[test]
    fn tangent_and_direct_position_lifts_are_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = Gravity::default();
        for kind in [SymmetryKind::Tg, SymmetryKind::Dp] {
            for _ in 0..50 {
                let x = random_element(&mut rng, kind);
                let xi = random_state(&mut rng, kind);
                let u = random_input(&mut rng, kind);
                let lhs = lift(kind, &act_state(&x, &xi), &act_input(&x, &u).unwrap(), &g);
                let rhs = x.inverse().adjoint() * lift(kind, &xi, &u, &g);
                assert_relative_eq!(lhs, rhs, epsilon = 1e-9, max_relative = 1e-9);
            }
        }
    }
}
