//! Matrix power series: exponential and `phi1(M) = sum_k M^k / (k+1)!`.

use nalgebra::DMatrix;

use super::Numerics;

/// Plain truncated sum `sum_{k < terms} m^k / (k+1)!`.
pub fn phi1_truncated(m: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let mut sum = DMatrix::zeros(n, n);
    let mut p = DMatrix::identity(n, n);
    let mut f = 1.0;
    for k in 0..terms {
        f *= (k + 1) as f64;
        sum += &p / f;
        p = &p * m;
    }
    sum
}

/// Series for `exp(z)` and `phi1(z)` with early stop on small terms.
fn series_pair(z: &DMatrix<f64>, num: &Numerics) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = z.nrows();
    let mut e = DMatrix::identity(n, n);
    let mut p = DMatrix::identity(n, n);
    // term_k = z^k / k!; exp gets term_k, phi1 gets term_k / (k+1).
    let mut term = DMatrix::identity(n, n);
    for k in 1..num.series_cap {
        term = &term * z / k as f64;
        let scale = (k + 1) as f64;
        e += &term;
        p += &term / scale;
        if term.norm() < num.series_tol {
            break;
        }
    }
    (e, p)
}

fn scaling(m: &DMatrix<f64>) -> i32 {
    let norm = m.norm();
    if norm <= 0.5 {
        0
    } else {
        (norm / 0.5).log2().ceil() as i32
    }
}

/// `(exp(m), phi1(m))` by scaling and squaring, stable for large norms.
pub fn exp_phi1(m: &DMatrix<f64>, num: &Numerics) -> (DMatrix<f64>, DMatrix<f64>) {
    let s = scaling(m);
    let z = m / 2f64.powi(s);
    let (mut e, mut p) = series_pair(&z, num);
    let n = m.nrows();
    for _ in 0..s {
        // phi1(2z) = phi1(z) (exp(z) + I) / 2, exp(2z) = exp(z)^2
        p = &p * (&e + DMatrix::identity(n, n)) * 0.5;
        e = &e * &e;
    }
    (e, p)
}

/// `phi1(m) = sum_k m^k / (k+1)!`, the left Jacobian when `m = ad_v`.
pub fn phi1(m: &DMatrix<f64>, num: &Numerics) -> DMatrix<f64> {
    exp_phi1(m, num).1
}

/// Matrix exponential.
pub fn expm(m: &DMatrix<f64>, num: &Numerics) -> DMatrix<f64> {
    exp_phi1(m, num).0
}

/// Exponential truncated after the cubic term, `I + M + M^2/2 + M^3/6`.
pub fn expm_cubic(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let m2 = m * m;
    let m3 = &m2 * m;
    DMatrix::identity(n, n) + m + m2 * 0.5 + m3 * (1.0 / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(scale: f64) -> DMatrix<f64> {
        DMatrix::from_fn(5, 5, |i, j| scale * (((3 * i + 7 * j) % 11) as f64 / 11.0 - 0.4))
    }

    #[test]
    fn scaled_matches_truncated() {
        for scale in [0.0, 0.1, 1.0, 3.0] {
            let m = sample(scale);
            let a = phi1(&m, &Numerics::default());
            let b = phi1_truncated(&m, 80);
            assert_relative_eq!(a, b, epsilon = 1e-11, max_relative = 1e-11);
        }
    }

    #[test]
    fn phi1_identity_relation() {
        // m phi1(m) = exp(m) - I
        let m = sample(2.0);
        let (e, p) = exp_phi1(&m, &Numerics::default());
        assert_relative_eq!(&m * p, e - DMatrix::identity(5, 5), epsilon = 1e-11);
    }
}
