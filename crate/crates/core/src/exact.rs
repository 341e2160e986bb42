//! Closed-form evaluation of the Gamma-function constants behind every
//! moment formula handled by this crate. All operations are pure and
//! deterministic; ratios of ball volumes are accumulated in log space
//! because terms like `kappa((k + 1) * (d + p))` overflow a direct `f64`
//! evaluation already for moderate `d * k`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Ambient dimension `d` together with a simplex/subspace dimension `k`,
/// validated so `1 <= d` and `0 <= k <= d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    d: usize,
    k: usize,
}

impl Dims {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::Domain(format!("ambient dimension d={d} must be >= 1")));
        }
        if k > d {
            return Err(Error::Domain(format!("subspace dimension k={k} exceeds d={d}")));
        }
        Ok(Dims { d, k })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// The closed-form scalar constants of the integral-geometry identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityId {
    /// Linear section integral of power `d` against `|E|^k`.
    FtLinear,
    /// Affine section integral of power `d + 1` against `|E|^{k+1}`.
    FtAffine,
    /// Affine section integral of power `p + d + 1` against
    /// `|E|^{k+1}` times the projection moment of order `p`.
    SectionProjection,
    /// Point moment over `(k+1)`-tuples against the affine section integral.
    AffineBpMoment,
    /// Origin-pinned point moment against the linear section integral.
    LinearBpMoment,
}

/// log of `kappa(p)`; valid for `p > -2`.
pub(crate) fn ln_kappa(p: f64) -> f64 {
    0.5 * p * PI.ln() - libm::lgamma(0.5 * p + 1.0)
}

/// Volume of the unit `p`-ball, `pi^{p/2} / Gamma(p/2 + 1)`, for real `p >= 0`.
pub fn kappa(p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::Domain(format!("kappa requires p >= 0, got {p}")));
    }
    Ok(ln_kappa(p).exp())
}

fn ln_omega(p: f64) -> f64 {
    p.ln() + ln_kappa(p)
}

/// Surface area of the unit `(p-1)`-sphere, `p * kappa(p)`, for real `p > 0`.
pub fn omega(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("omega requires p > 0, got {p}")));
    }
    Ok(ln_omega(p).exp())
}

/// log of the subspace coefficient `b_{q,k}`; caller checks `q > k - 1`.
pub(crate) fn ln_subspace_coeff(q: f64, k: usize) -> f64 {
    let mut acc = 0.0;
    for j in 1..=k {
        acc += ln_omega(q - k as f64 + j as f64) - ln_omega(j as f64);
    }
    acc
}

/// The coefficient `b_{q,k} = (omega_{q-k+1} ... omega_q) / (omega_1 ... omega_k)`
/// for real `q > k - 1`; the empty product at `k = 0` is 1.
pub fn subspace_coeff(q: f64, k: usize) -> Result<f64> {
    if !(q > k as f64 - 1.0) {
        return Err(Error::Domain(format!(
            "subspace_coeff requires q > k - 1, got q={q}, k={k}"
        )));
    }
    Ok(ln_subspace_coeff(q, k).exp())
}

fn ln_factorial(n: f64) -> f64 {
    libm::lgamma(n + 1.0)
}

fn check_dk(d: usize, k: usize, op: &str) -> Result<()> {
    if d < 1 || k < 1 || k > d {
        return Err(Error::Domain(format!("{op} requires 1 <= k <= d, got d={d}, k={k}")));
    }
    Ok(())
}

/// `p`-th moment of the `k`-volume of the convex hull of `k + 1` i.i.d.
/// points uniform in the unit `d`-ball, for real `p > -1`.
pub fn ball_simplex_moment(d: usize, k: usize, p: f64) -> Result<f64> {
    check_dk(d, k, "ball_simplex_moment")?;
    if !(p > -1.0) {
        return Err(Error::Domain(format!(
            "ball_simplex_moment requires p > -1, got {p}"
        )));
    }
    let (df, kf) = (d as f64, k as f64);
    let ln = -p * ln_factorial(kf)
        + (kf + 1.0) * (ln_kappa(df + p) - ln_kappa(df))
        + ln_kappa(kf * (df + p) + df)
        - ln_kappa((kf + 1.0) * (df + p))
        + ln_subspace_coeff(df, k)
        - ln_subspace_coeff(df + p, k);
    Ok(ln.exp())
}

/// The integral of `|conv(0, y_1, ..., y_k)|^m` over `k`-tuples of points in
/// the unit `k`-ball (an integral over `(B^k)^k`, not an expectation):
/// `(k!)^{-m} kappa_{k+m}^k b_{k,k} / b_{k+m,k}`.
///
/// Only `m >= 0` is accepted; the closed form is applied in the source
/// identities with exponent `p + d - k > 0` only, and its validity on
/// `(-1, 0)` is not established, so negative exponents are rejected
/// rather than guessed.
pub fn origin_ball_integral(k: usize, m: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain(format!("origin_ball_integral requires k >= 1, got {k}")));
    }
    if !(m >= 0.0) {
        return Err(Error::Domain(format!(
            "origin_ball_integral requires m >= 0, got {m}"
        )));
    }
    let kf = k as f64;
    // b_{k,k} = 1.
    let ln = -m * ln_factorial(kf) + kf * ln_kappa(kf + m) - ln_subspace_coeff(kf + m, k);
    Ok(ln.exp())
}

/// The coefficient `alpha_{d,k}` with `E|conv(X_0..X_k)| = alpha_{d,k} V_k(E)`
/// for i.i.d. uniform points in a non-degenerate ellipsoid `E`:
/// `2^{-k} ((d+1)!)^{k+1} / ((d+1)(k+1))! * (kappa_{d+1}^{k+1} / kappa_{(d+1)(k+1)})^2`.
pub fn mean_volume_coeff(d: usize, k: usize) -> Result<f64> {
    check_dk(d, k, "mean_volume_coeff")?;
    let (df, kf) = (d as f64, k as f64);
    let ln = -kf * 2.0_f64.ln() + (kf + 1.0) * ln_factorial(df + 1.0)
        - ln_factorial((df + 1.0) * (kf + 1.0))
        + 2.0 * ((kf + 1.0) * ln_kappa(df + 1.0) - ln_kappa((df + 1.0) * (kf + 1.0)));
    Ok(ln.exp())
}

/// The scalar constant of the named identity at parameters `(d, k, p)`.
/// `p` is ignored for [`IdentityId::FtLinear`] and [`IdentityId::FtAffine`].
pub fn identity_constant(id: IdentityId, d: usize, k: usize, p: f64) -> Result<f64> {
    if d < 1 || k > d {
        return Err(Error::Domain(format!(
            "identity_constant requires 0 <= k <= d, d >= 1, got d={d}, k={k}"
        )));
    }
    let (df, kf) = (d as f64, k as f64);
    let ln = match id {
        IdentityId::FtLinear => df * ln_kappa(kf) - kf * ln_kappa(df),
        IdentityId::FtAffine => {
            (df + 1.0) * ln_kappa(kf) - (kf + 1.0) * ln_kappa(df)
                + ln_kappa(df * (kf + 1.0))
                - ln_kappa(kf * (df + 1.0))
        }
        IdentityId::SectionProjection => {
            if !(p > -1.0) {
                return Err(Error::Domain(format!(
                    "section/projection constant requires p > -1, got {p}"
                )));
            }
            (kf + 1.0) * ln_kappa(df) - (df + 1.0) * ln_kappa(kf)
                + ln_kappa(kf * (df + p) + kf)
                - ln_kappa(kf * (df + p) + df)
        }
        IdentityId::AffineBpMoment => {
            if !(p > -df + kf - 1.0) {
                return Err(Error::Domain(format!(
                    "affine moment constant requires p > -d + k - 1, got p={p}, d={d}, k={k}"
                )));
            }
            -p * ln_factorial(kf) + (kf + 1.0) * ln_kappa(df + p)
                - (p + df + 1.0) * ln_kappa(kf)
                + ln_kappa(kf * (df + p) + kf)
                - ln_kappa((kf + 1.0) * (df + p))
                + ln_subspace_coeff(df, k)
                - ln_subspace_coeff(df + p, k)
        }
        IdentityId::LinearBpMoment => {
            if !(p > -df + kf) {
                return Err(Error::Domain(format!(
                    "linear moment constant requires p > -d + k, got p={p}, d={d}, k={k}"
                )));
            }
            -p * ln_factorial(kf) + kf * ln_kappa(df + p) - (p + df) * ln_kappa(kf)
                + ln_subspace_coeff(df, k)
                - ln_subspace_coeff(df + p, k)
        }
    };
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kappa_small_dimensions() {
        assert_relative_eq!(kappa(0.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(kappa(1.0).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(kappa(2.0).unwrap(), PI, max_relative = 1e-14);
        assert_relative_eq!(kappa(3.0).unwrap(), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert!(kappa(-0.5).is_err());
    }

    #[test]
    fn omega_small_dimensions() {
        assert_relative_eq!(omega(1.0).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(omega(2.0).unwrap(), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(omega(3.0).unwrap(), 4.0 * PI, max_relative = 1e-14);
        assert!(omega(0.0).is_err());
        assert!(omega(-1.0).is_err());
    }

    /// Recursive quadrature oracle: kappa_k = kappa_{k-1} * int_{-1}^{1} (1 - t^2)^{(k-1)/2} dt.
    /// The substitution t = sin(u) makes the integrand smooth, so composite
    /// Simpson reaches 1e-10 easily.
    fn kappa_by_quadrature(k: usize) -> f64 {
        let mut vol = 1.0;
        for j in 1..=k {
            let f = |u: f64| u.cos().powi(j as i32);
            let n = 20_000;
            let h = PI / n as f64;
            let mut s = f(-PI / 2.0) + f(PI / 2.0);
            for i in 1..n {
                let u = -PI / 2.0 + i as f64 * h;
                s += if i % 2 == 1 { 4.0 * f(u) } else { 2.0 * f(u) };
            }
            vol *= s * h / 3.0;
        }
        vol
    }

    #[test]
    fn kappa_matches_recursive_quadrature() {
        for k in 1..=8 {
            let exact = kappa(k as f64).unwrap();
            let quad = kappa_by_quadrature(k);
            assert!(
                (exact - quad).abs() <= 1e-10,
                "k={k}: kappa={exact}, quadrature={quad}"
            );
        }
    }

    #[test]
    fn subspace_coeff_examples() {
        assert_relative_eq!(subspace_coeff(1.0, 1).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(subspace_coeff(2.0, 1).unwrap(), PI, max_relative = 1e-12);
        assert_relative_eq!(subspace_coeff(3.0, 2).unwrap(), 2.0 * PI, max_relative = 1e-12);
        let expected = 2.5 * kappa(2.5).unwrap() / 2.0;
        assert_relative_eq!(subspace_coeff(2.5, 1).unwrap(), expected, max_relative = 1e-12);
        assert!(subspace_coeff(0.0, 1).is_err());
    }

    #[test]
    fn subspace_coeff_diagonal_is_one() {
        for k in 0..=8 {
            assert_relative_eq!(
                subspace_coeff(k as f64, k).unwrap(),
                1.0,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn ball_simplex_moment_classical_values() {
        // Mean distance between two uniform points in the unit disk / 3-ball.
        assert_relative_eq!(
            ball_simplex_moment(2, 1, 1.0).unwrap(),
            128.0 / (45.0 * PI),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            ball_simplex_moment(3, 1, 1.0).unwrap(),
            36.0 / 35.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn ball_simplex_moment_zeroth_is_one() {
        for d in 1..=6 {
            for k in 1..=d {
                assert_eq!(ball_simplex_moment(d, k, 0.0).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn ball_simplex_moment_domain() {
        assert!(ball_simplex_moment(2, 3, 1.0).is_err());
        assert!(ball_simplex_moment(2, 0, 1.0).is_err());
        assert!(ball_simplex_moment(2, 1, -1.0).is_err());
    }

    #[test]
    fn origin_ball_integral_values() {
        for k in 1..=4 {
            assert_relative_eq!(
                origin_ball_integral(k, 0.0).unwrap(),
                kappa(k as f64).unwrap().powi(k as i32),
                max_relative = 1e-12
            );
        }
        // int_{-1}^{1} |y| dy = 1.
        assert_relative_eq!(origin_ball_integral(1, 1.0).unwrap(), 1.0, max_relative = 1e-12);
        // Mean triangle area with one vertex at the disk center is
        // (1/2) E[r1 r2 |sin phi|] = (1/2)(2/3)^2(2/pi) = 4/(9 pi);
        // times kappa_2^2 this gives 4 pi / 9.
        assert_relative_eq!(
            origin_ball_integral(2, 1.0).unwrap(),
            4.0 * PI / 9.0,
            max_relative = 1e-12
        );
        assert!(origin_ball_integral(0, 1.0).is_err());
        assert!(origin_ball_integral(2, -0.5).is_err());
    }

    #[test]
    fn mean_volume_coeff_values() {
        assert_relative_eq!(mean_volume_coeff(1, 1).unwrap(), 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(
            mean_volume_coeff(2, 1).unwrap(),
            128.0 / (45.0 * PI * PI),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            mean_volume_coeff(2, 2).unwrap(),
            35.0 / (48.0 * PI * PI),
            max_relative = 1e-12
        );
        assert!(mean_volume_coeff(2, 3).is_err());
    }

    #[test]
    fn identity_constant_examples() {
        assert_relative_eq!(
            identity_constant(IdentityId::FtLinear, 2, 1, 0.0).unwrap(),
            4.0 / PI,
            max_relative = 1e-12
        );
        for d in 1..=6 {
            assert_relative_eq!(
                identity_constant(IdentityId::FtLinear, d, d, 0.0).unwrap(),
                1.0,
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(
            identity_constant(IdentityId::FtAffine, 2, 1, 0.0).unwrap(),
            3.0 / PI,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            identity_constant(IdentityId::SectionProjection, 2, 1, 0.0).unwrap(),
            PI / 3.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            identity_constant(IdentityId::AffineBpMoment, 2, 1, 1.0).unwrap(),
            PI / 6.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn identity_constant_domain() {
        assert!(identity_constant(IdentityId::SectionProjection, 3, 2, -1.5).is_err());
        assert!(identity_constant(IdentityId::AffineBpMoment, 3, 2, -2.5).is_err());
        assert!(identity_constant(IdentityId::LinearBpMoment, 3, 2, -1.5).is_err());
    }

    /// Substituting the unit ball into both section-integral identities forces
    /// `ball_simplex_moment * C_sp = C_bp * kappa_k^p`.
    #[test]
    fn ball_consistency_of_constants() {
        for d in 1..=5 {
            for k in 1..=d {
                for &p in &[0.0, 0.5, 1.0, 2.0] {
                    let lhs = ball_simplex_moment(d, k, p).unwrap()
                        * identity_constant(IdentityId::SectionProjection, d, k, p).unwrap();
                    let rhs = identity_constant(IdentityId::AffineBpMoment, d, k, p).unwrap()
                        * kappa(k as f64).unwrap().powf(p);
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn outputs_finite_positive() {
        for d in 1..=8 {
            for k in 1..=d {
                for &p in &[-0.5, 0.0, 0.5, 1.0, 2.0, 5.0] {
                    let v = ball_simplex_moment(d, k, p).unwrap();
                    assert!(v.is_finite() && v > 0.0, "d={d} k={k} p={p}: {v}");
                }
            }
        }
        // A combination that would overflow without log-space evaluation.
        let v = ball_simplex_moment(8, 8, 5.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn dims_validation() {
        assert!(Dims::new(0, 0).is_err());
        assert!(Dims::new(2, 3).is_err());
        let dims = Dims::new(3, 2).unwrap();
        assert_eq!((dims.d(), dims.k()), (3, 2));
    }
}
