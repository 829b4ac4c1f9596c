//! Property suite: group and action axioms, lift correctness, linearization oracles,
//! filter equivalences and output equivariance. Every property reports the measured
//! worst case next to its tolerance and the seed that reproduces it.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eqf::reference::{Iekf, Mekf};
use crate::eqf::{
    self, oracle, position_output, state_matrix, tfg_iekf_state_matrix, FilterConfig, FilterState, NoiseConfig, OutputModel,
    PositionMeasurement,
};
use crate::ins::{dynamics, Gravity, InsInput, InsState};
use crate::lie::{hat, Se23, So3, Vec3};
use crate::symmetry::{act_input, act_state, chart_inv, estimate, lift, origin_lift, SymmetryElement, SymmetryKind};

fn rv(rng: &mut ChaCha8Rng, s: f64) -> Vec3 {
    Vec3::new(rng.random_range(-s..s), rng.random_range(-s..s), rng.random_range(-s..s))
}

/// Random state; the virtual bias is only populated for the tangent group.
pub fn random_state(rng: &mut ChaCha8Rng, kind: SymmetryKind) -> InsState {
    InsState {
        rot: So3::exp(&rv(rng, 1.5)),
        vel: rv(rng, 3.0),
        pos: rv(rng, 5.0),
        bias_gyro: rv(rng, 0.1),
        bias_acc: rv(rng, 0.5),
        bias_vel: if kind == SymmetryKind::Tg { rv(rng, 0.2) } else { Vec3::zeros() },
    }
}

/// Random IMU-like input; `ν` and the drifts are populated where the kind has them.
pub fn random_input(rng: &mut ChaCha8Rng, kind: SymmetryKind) -> InsInput {
    InsInput {
        gyro: rv(rng, 1.0),
        acc: rv(rng, 3.0) + Vec3::new(0.0, 0.0, 9.8),
        vel: if kind.has_input_action() { rv(rng, 1.0) } else { Vec3::zeros() },
        tau_gyro: rv(rng, 0.01),
        tau_acc: rv(rng, 0.1),
        tau_vel: if kind == SymmetryKind::Tg { rv(rng, 0.05) } else { Vec3::zeros() },
    }
}

pub fn random_element(rng: &mut ChaCha8Rng, kind: SymmetryKind) -> SymmetryElement {
    let v = DVector::from_fn(kind.dim(), |_, _| rng.random_range(-1.0..1.0));
    SymmetryElement::exp(kind, &v).expect("exp is total")
}

fn rng_for(seed: u64, kind: SymmetryKind) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ ((kind as u64 + 1) << 32))
}

fn mat_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1.0)
}

/// Worst deviation from associativity, identity and inverse laws.
pub fn group_axioms(kind: SymmetryKind, samples: usize, seed: u64) -> f64 {
    let mut rng = rng_for(seed, kind);
    let id = SymmetryElement::identity(kind).matrix();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (x, y, z) = (random_element(&mut rng, kind), random_element(&mut rng, kind), random_element(&mut rng, kind));
        let l = x.compose(&y).and_then(|xy| xy.compose(&z)).expect("same kind");
        let r = y.compose(&z).and_then(|yz| x.compose(&yz)).expect("same kind");
        worst = worst.max(mat_err(&l.matrix(), &r.matrix()));
        worst = worst.max(mat_err(&x.compose(&SymmetryElement::identity(kind)).unwrap().matrix(), &x.matrix()));
        worst = worst.max(mat_err(&x.compose(&x.inverse()).unwrap().matrix(), &id));
        worst = worst.max(mat_err(&x.inverse().compose(&x).unwrap().matrix(), &id));
    }
    worst
}

fn state_err(a: &InsState, b: &InsState) -> f64 {
    a.distance(b)
}

/// Worst deviation from the right-action laws on states (and inputs where an action exists).
pub fn action_axioms(kind: SymmetryKind, samples: usize, seed: u64) -> f64 {
    let mut rng = rng_for(seed, kind);
    let id = SymmetryElement::identity(kind);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (x, y) = (random_element(&mut rng, kind), random_element(&mut rng, kind));
        let xi = random_state(&mut rng, kind);
        let xy = x.compose(&y).unwrap();
        worst = worst.max(state_err(&act_state(&id, &xi), &xi));
        worst = worst.max(state_err(&act_state(&y, &act_state(&x, &xi)), &act_state(&xy, &xi)));
        if kind.has_input_action() {
            let u = random_input(&mut rng, kind);
            let a = act_input(&y, &act_input(&x, &u).unwrap()).unwrap();
            let b = act_input(&xy, &u).unwrap();
            worst = worst.max((a.w9() - b.w9()).amax()).max((a.tau9() - b.tau9()).amax());
        }
    }
    worst
}

/// Worst `exp`/`log` roundtrip error, both ways.
pub fn exp_log_roundtrip(kind: SymmetryKind, samples: usize, seed: u64) -> f64 {
    let mut rng = rng_for(seed, kind);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let v = DVector::from_fn(kind.dim(), |_, _| rng.random_range(-1.5..1.5));
        let x = SymmetryElement::exp(kind, &v).unwrap();
        worst = worst.max((x.log().unwrap() - &v).amax());
        let y = random_element(&mut rng, kind);
        let back = SymmetryElement::exp(kind, &y.log().unwrap()).unwrap();
        worst = worst.max(mat_err(&back.matrix(), &y.matrix()));
    }
    worst
}

/// Worst violation of `Ad_X ad_v Ad_X⁻¹ = ad_{Ad_X v}`.
pub fn adjoint_commutation(kind: SymmetryKind, samples: usize, seed: u64) -> f64 {
    let mut rng = rng_for(seed, kind);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = random_element(&mut rng, kind);
        let v = DVector::from_fn(kind.dim(), |_, _| rng.random_range(-1.0..1.0));
        let ad = x.adjoint();
        let lhs = &ad * SymmetryElement::ad(kind, &v).unwrap() * x.inverse().adjoint();
        let rhs = SymmetryElement::ad(kind, &(&ad * &v)).unwrap();
        worst = worst.max(mat_err(&lhs, &rhs));
    }
    worst
}

/// Worst relative error of `dφ_ξ Λ(ξ, u) = f(ξ, u)` by central differences.
pub fn lift_error(kind: SymmetryKind, samples: usize, seed: u64, g: &Gravity) -> f64 {
    let mut rng = rng_for(seed, kind);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let xi = random_state(&mut rng, kind);
        let u = random_input(&mut rng, kind);
        let l = lift(kind, &xi, &u, g);
        let at = |s: f64| act_state(&SymmetryElement::exp(kind, &(&l * s)).unwrap(), &xi);
        let (a, b) = (at(-h), at(h));
        let got = [
            a.rot.inverse().compose(&b.rot).log().unwrap() / (2.0 * h),
            (b.vel - a.vel) / (2.0 * h),
            (b.pos - a.pos) / (2.0 * h),
            (b.bias_gyro - a.bias_gyro) / (2.0 * h),
            (b.bias_acc - a.bias_acc) / (2.0 * h),
            (b.bias_vel - a.bias_vel) / (2.0 * h),
        ];
        let f = dynamics(&xi, &u, g);
        let want = [f.rot, f.vel, f.pos, f.bias_gyro, f.bias_acc, f.bias_vel];
        for (x, w) in got.iter().zip(&want) {
            worst = worst.max((x - w).norm() / w.norm().max(1.0));
        }
    }
    worst
}

/// Deliberate defects used to show that the suite detects them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Evaluates the closed-form `Aₜ⁰` with the sign of `g^∧` flipped.
    FlipGravity,
}

/// Worst relative deviation of the closed-form `Aₜ⁰` from the finite-difference Jacobian
/// of the exact error flow at `ε = 0`.
pub fn state_matrix_error(kind: SymmetryKind, samples: usize, seed: u64, g: &Gravity, mutation: Option<Mutation>) -> f64 {
    let mut rng = rng_for(seed, kind);
    let model_g = match mutation {
        Some(Mutation::FlipGravity) => Gravity(-g.0),
        None => *g,
    };
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = origin_lift(kind, &random_state(&mut rng, kind));
        let mut u = random_input(&mut rng, kind);
        u.vel = Vec3::zeros();
        let fd = oracle::error_jacobian(&x, &u, g, 1e-4).expect("sampled errors stay in the chart");
        worst = worst.max(rel_err(&state_matrix(&x, &u, &model_g), &fd));
    }
    worst
}

/// First-order error dynamics of the comparison table, written directly in terms of the
/// estimate. Rows without a closed form there are left as `None`.
pub fn table_rates(kind: SymmetryKind, x_hat: &SymmetryElement, u: &InsInput, g: &Gravity, eps: &DVector<f64>) -> Vec<Option<Vec3>> {
    let xi = estimate(x_hat);
    let r = *xi.rot.matrix();
    let (gh, vh, ph) = (hat(&g.0), hat(&xi.vel), hat(&xi.pos));
    let b = |i: usize| Vec3::new(eps[3 * i], eps[3 * i + 1], eps[3 * i + 2]);
    let zero = Some(Vec3::zeros());
    match kind {
        SymmetryKind::So3R12 => {
            let (er, ev, ebw, eba) = (b(0), b(1), b(3), b(4));
            vec![Some(-r * ebw), Some(-hat(&(r * (u.acc - xi.bias_acc))) * er - r * eba), Some(ev), zero, zero]
        }
        SymmetryKind::Se23R6 => {
            let (er, ev, ebw, eba) = (b(0), b(1), b(3), b(4));
            vec![Some(-r * ebw), Some(gh * er - vh * r * ebw - r * eba), Some(ev - ph * r * ebw), zero, zero]
        }
        SymmetryKind::Tfg => {
            let (er, ev, ebw, eba) = (b(0), b(1), b(3), b(4));
            let w = hat(&(r * (u.gyro - xi.bias_gyro)));
            vec![Some(ebw), Some(gh * er + vh * ebw + eba), Some(ev + ph * ebw), Some(w * ebw), Some(w * eba)]
        }
        SymmetryKind::Tg => {
            let (er, ev, ebw, eba, ebn) = (b(0), b(1), b(3), b(4), b(5));
            vec![Some(ebw), Some(gh * er + eba), Some(ev + ebn), None, None, None]
        }
        SymmetryKind::Dp => {
            // Layout (R, v, b_ω, b_a, p).
            let (er, ev, ebw, eba) = (b(0), b(1), b(2), b(3));
            vec![Some(ebw), Some(gh * er + eba), None, None, Some(ev + vh * er)]
        }
        SymmetryKind::Sd => {
            let (er, ev, ebw, eba) = (b(0), b(1), b(3), b(4));
            vec![Some(ebw), Some(gh * er + eba), Some(ev + ph * ebw), None, None]
        }
    }
}

/// Worst deviation between the table rows and `Aₜ⁰ ε` for random unit `ε`. Not part of
/// [`run`]: the direct position row carries `+v̂^∧ε_R` where the error flow gives `−v̂^∧ε_R`.
pub fn table_error(kind: SymmetryKind, samples: usize, seed: u64, g: &Gravity) -> f64 {
    let mut rng = rng_for(seed, kind);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = origin_lift(kind, &random_state(&mut rng, kind));
        let mut u = random_input(&mut rng, kind);
        u.vel = Vec3::zeros();
        let eps = DVector::from_fn(kind.dim(), |_, _| rng.random_range(-1.0..1.0));
        let ae = state_matrix(&x, &u, g) * &eps;
        for (i, row) in table_rates(kind, &x, &u, g, &eps).into_iter().enumerate() {
            if let Some(t) = row {
                worst = worst.max((ae.fixed_rows::<3>(3 * i) - t).amax());
            }
        }
    }
    worst
}

/// Navigation rows `(R, v, p)` of `ε̇ − Aₜ⁰ ε` at error `ε`.
pub fn navigation_residual(x_hat: &SymmetryElement, eps: &DVector<f64>, u: &InsInput, g: &Gravity) -> f64 {
    let kind = x_hat.kind;
    let r = oracle::error_rate(x_hat, eps, u, g).expect("error within the chart") - state_matrix(x_hat, u, g) * eps;
    let rows: Vec<usize> = match kind {
        SymmetryKind::Dp => (0..6).chain(12..15).collect(),
        _ => (0..9).collect(),
    };
    rows.iter().map(|&i| r[i].abs()).fold(0.0, f64::max)
}

/// Scan of the navigation residual along a random direction: the worst ratio
/// `residual / (1 + ‖ε‖)` over `‖ε‖ ≤ 1` and the least-squares log-log slope over
/// `‖ε‖ ∈ [1e-2, 1e-1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualScan {
    pub worst_scaled: f64,
    pub slope: f64,
}

pub fn residual_scan(kind: SymmetryKind, seed: u64, g: &Gravity) -> ResidualScan {
    let mut rng = rng_for(seed, kind);
    let x = origin_lift(kind, &random_state(&mut rng, kind));
    let mut u = random_input(&mut rng, kind);
    u.vel = Vec3::zeros();
    let dir = DVector::from_fn(kind.dim(), |_, _| rng.random_range(-1.0..1.0)).normalize();
    let worst_scaled =
        [0.01, 0.1, 0.3, 0.6, 1.0].iter().map(|&s| navigation_residual(&x, &(&dir * s), &u, g) / (1.0 + s)).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = (0..5)
        .map(|i| {
            let s = 10f64.powf(-2.0 + 0.25 * i as f64);
            (s.ln(), navigation_residual(&x, &(&dir * s), &u, g).max(f64::MIN_POSITIVE).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    ResidualScan { worst_scaled, slope }
}

fn lockstep_input(k: usize) -> (InsInput, Option<Vec3>) {
    let t = k as f64 * 0.005;
    let u = InsInput::imu(Vec3::new(0.2 * t.sin(), -0.1, 0.3 * t.cos()), Vec3::new(0.3, -0.2 * t.sin(), 9.7));
    let y = (k % 20 == 19).then(|| Vec3::new(t.sin(), 0.5 * t, -0.2 * t.cos()));
    (u, y)
}

/// Worst state and covariance gap between an equivariant filter and its textbook
/// counterpart over `steps` IMU steps with a position fix every 20th step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lockstep {
    pub state: f64,
    pub covariance: f64,
}

impl Lockstep {
    pub fn worst(&self) -> f64 {
        self.state.max(self.covariance)
    }
}

fn lockstep_setup() -> (NoiseConfig, FilterConfig, InsState, DMatrix<f64>) {
    let noise = NoiseConfig::from_densities(2e-3, 2e-2, 0.0, 1e-3, 1e-2, 0.0, 0.3);
    let x0 = InsState::new(So3::exp(&Vec3::new(0.1, 0.2, 0.3)), Vec3::new(0.5, 0.0, 0.0), Vec3::zeros(), Vec3::zeros(), Vec3::zeros());
    let p0 = DMatrix::from_diagonal(&DVector::from_fn(15, |i, _| 0.01 * (1.0 + i as f64)));
    (noise, FilterConfig::default(), x0, p0)
}

/// Equivariant filter on SO(3) × R¹² against the multiplicative EKF.
pub fn mekf_lockstep(steps: usize) -> Lockstep {
    let (noise, cfg, x0, p0) = lockstep_setup();
    let mut fs = FilterState::new(origin_lift(SymmetryKind::So3R12, &x0), p0.clone(), 0.0);
    let mut mekf = Mekf { x: x0, p: p0 };
    let q = noise.input_covariance(SymmetryKind::So3R12);
    let mut out = Lockstep { state: 0.0, covariance: 0.0 };
    for k in 0..steps {
        let (u, y) = lockstep_input(k);
        fs = eqf::propagate(&fs, &u, 0.005, &noise, &cfg).expect("finite");
        mekf.propagate(&u, 0.005, &q, &cfg.gravity);
        if let Some(y) = y {
            fs = eqf::update_position(&fs, &PositionMeasurement { t: 0.0, pos: y }, &noise, &cfg).expect("well-posed").0;
            mekf.update_position(&y, &noise.r_pos);
        }
        out.state = out.state.max(fs.estimate().distance(&mekf.x));
        out.covariance = out.covariance.max((&fs.sigma - &mekf.p).amax());
    }
    out
}

/// Equivariant filter on SE₂(3) × R⁶ against the imperfect IEKF, both using the
/// right-invariant position output.
pub fn iekf_lockstep(steps: usize) -> Lockstep {
    let (noise, cfg, x0, p0) = lockstep_setup();
    let mut fs = FilterState::new(origin_lift(SymmetryKind::Se23R6, &x0), p0.clone(), 0.0);
    let mut iekf = Iekf { x: x0, p: p0 };
    let q = noise.input_covariance(SymmetryKind::Se23R6);
    let rm = DMatrix::from_column_slice(3, 3, noise.r_pos.as_slice());
    let mut out = Lockstep { state: 0.0, covariance: 0.0 };
    for k in 0..steps {
        let (u, y) = lockstep_input(k);
        fs = eqf::propagate(&fs, &u, 0.005, &noise, &cfg).expect("finite");
        iekf.propagate(&u, 0.005, &q, &cfg.gravity);
        if let Some(y) = y {
            let r = DVector::from_column_slice((y - fs.estimate().pos).as_slice());
            fs = eqf::update_with(&fs, &iekf.output_matrix(), &r, &rm).expect("well-posed").0;
            iekf.update_position(&y, &noise.r_pos);
        }
        out.state = out.state.max(fs.estimate().distance(&iekf.x));
        out.covariance = out.covariance.max((&fs.sigma - &iekf.p).amax());
    }
    out
}

/// Worst gap between the two-frame `Aₜ⁰` and the two-frame IEKF matrix.
pub fn tfg_equivalence(samples: usize, seed: u64, g: &Gravity) -> f64 {
    let kind = SymmetryKind::Tfg;
    let mut rng = rng_for(seed, kind);
    (0..samples)
        .map(|_| {
            let x = origin_lift(kind, &random_state(&mut rng, kind));
            let u = random_input(&mut rng, kind);
            mat_err(&state_matrix(&x, &u, g), &tfg_iekf_state_matrix(&x, &u, g))
        })
        .fold(0.0, f64::max)
}

/// Smallest log-log slope of `‖r − C⋆ε‖` over `‖ε‖ ∈ [1e-3, 1e-1]`.
pub fn output_slope(kind: SymmetryKind, samples: usize, seed: u64) -> f64 {
    let mut rng = rng_for(seed, kind);
    let mut least = f64::INFINITY;
    for _ in 0..samples {
        let x = origin_lift(kind, &random_state(&mut rng, kind));
        let dir = DVector::from_fn(kind.dim(), |_, _| rng.random_range(-1.0..1.0)).normalize();
        let res = |s: f64| {
            let eps = &dir * s;
            let y = act_state(&x, &chart_inv(kind, &eps).unwrap()).pos;
            let (c, r) = position_output(&x, &y, OutputModel::Equivariant);
            (r - c * eps).norm()
        };
        least = least.min((res(1e-1) / res(1e-3)).log10() / 2.0);
    }
    least
}

/// Largest gap between `Se23::exp` of a twist and its numeric matrix exponential; guards
/// the closed forms the rest of the suite relies on.
pub fn closed_form_exp(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let v = nalgebra::SVector::<f64, 9>::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let m = crate::lie::series::expm(&Se23::wedge(&v), &crate::lie::Numerics::default());
        worst = worst.max(mat_err(&Se23::exp(&v).matrix(), &m));
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Samples per kind for the algebraic properties.
    pub samples: usize,
    pub mutation: Option<Mutation>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { seed: 7, samples: 1000, mutation: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    /// Whether `measured` must stay below (`true`) or above the tolerance.
    pub upper: bool,
    pub seed: u64,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        if self.upper {
            self.measured <= self.tolerance
        } else {
            self.measured >= self.tolerance
        }
    }
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.upper { "<=" } else { ">=" };
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {:<40} {:.3e} {op} {:.1e}", self.name, self.measured, self.tolerance)?;
        if !self.passed() {
            write!(f, " (seed {})", self.seed)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckReport {
    pub results: Vec<PropertyResult>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(PropertyResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.results.iter().filter(|r| !r.passed())
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        let failed = self.failures().count();
        write!(f, "{} properties, {} failed", self.results.len(), failed)
    }
}

/// Runs the whole suite.
pub fn run(opts: &CheckOptions) -> CheckReport {
    let g = Gravity::default();
    let n = opts.samples;
    let seed = opts.seed;
    let mut results = Vec::new();
    let mut push = |name: String, measured: f64, tolerance: f64, upper: bool| {
        results.push(PropertyResult { name, measured, tolerance, upper, seed });
    };
    push("se23 closed-form exp".into(), closed_form_exp(n.min(200), seed), 1e-10, true);
    for kind in SymmetryKind::ALL {
        let k = kind.name();
        push(format!("{k}: group axioms"), group_axioms(kind, n, seed), 1e-10, true);
        push(format!("{k}: action axioms"), action_axioms(kind, n, seed), 1e-10, true);
        push(format!("{k}: exp/log roundtrip"), exp_log_roundtrip(kind, n, seed), 1e-9, true);
        push(format!("{k}: Ad/ad commutation"), adjoint_commutation(kind, n, seed), 1e-9, true);
        push(format!("{k}: lift property"), lift_error(kind, 100, seed, &g), 1e-5, true);
        push(format!("{k}: A oracle"), state_matrix_error(kind, 5, seed, &g, opts.mutation), 1e-5, true);
        let scan = residual_scan(kind, seed, &g);
        if kind == SymmetryKind::Tg {
            push(format!("{k}: navigation exactness"), scan.worst_scaled, 1e-10, true);
        } else {
            push(format!("{k}: navigation residual slope - 2"), (scan.slope - 2.0).abs(), 0.3, true);
        }
        if kind.has_equivariant_output() {
            push(format!("{k}: equivariant output slope"), output_slope(kind, 10, seed), 2.7, false);
        }
    }
    push("mekf lockstep".into(), mekf_lockstep(1000).worst(), 1e-8, true);
    push("iekf lockstep".into(), iekf_lockstep(1000).worst(), 1e-8, true);
    push("tfg A equals two-frame IEKF".into(), tfg_equivalence(20, seed, &g), 1e-12, true);
    CheckReport { results }
}
