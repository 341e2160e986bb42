//! Streaming Monte Carlo estimators for both sides of every verified
//! identity, and the samplers behind the distributional equality checks.
//!
//! Estimates are accumulated in fixed-index chunks, one substream per chunk,
//! and merged in chunk order, so results are bit-identical for any worker
//! count.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    ball_simplex_moment, identity_constant, kappa, mean_volume_coeff, IdentityId,
};
use crate::geometry::{
    ball_intrinsic_volume, gram_factor, projection_volume, section_volume, simplex_volume,
    AffineSubspace, Ellipsoid,
};
use crate::sampling::{
    beta_sample, coupled_gram_ratio, gaussian_matrix, gaussian_vector, haar_affine_sample,
    haar_subspace, uniform_in_ball, uniform_in_ellipsoid, BetaSpec, RandomStream,
};
use crate::stats::{ks_two_sample, z_compare};

/// Number of fixed substream chunks an estimate is accumulated over. The
/// partition is independent of the worker count, which only schedules
/// chunks.
const CHUNKS: u64 = 64;

/// Default sample count for moment identities.
pub const DEFAULT_MOMENT_SAMPLES: u64 = 1_000_000;
/// Default per-side sample count for distributional (KS) identities.
pub const DEFAULT_KS_SAMPLES: u64 = 100_000;

/// Welford-style streaming mean and sum of squared deviations, mergeable
/// across chunks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunningMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    pub fn merge(&mut self, other: &RunningMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 += other.m2
            + delta * delta * (self.count as f64 * other.count as f64) / total as f64;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sum_sq_dev(&self) -> f64 {
        self.m2
    }

    /// Standard error of the mean; 0 until two samples are seen.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2.max(0.0) / (self.count as f64 * (self.count as f64 - 1.0))).sqrt()
    }
}

/// A labelled Monte Carlo point estimate with its standard error and the
/// seed that reproduces it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub label: String,
    pub value: f64,
    pub stderr: f64,
    pub count: u64,
    pub seed: u64,
}

impl EstimateReport {
    pub fn new(label: String, value: f64, stderr: f64, count: u64, seed: u64) -> Self {
        EstimateReport { label, value, stderr, count, seed }
    }

    fn from_moments(label: &str, moments: &RunningMoments, seed: u64) -> Self {
        EstimateReport {
            label: label.to_string(),
            value: moments.mean(),
            stderr: moments.stderr(),
            count: moments.count(),
            seed,
        }
    }

    /// The same estimate scaled by a deterministic constant.
    pub fn scaled(&self, factor: f64) -> Self {
        EstimateReport {
            label: self.label.clone(),
            value: self.value * factor,
            stderr: self.stderr * factor.abs(),
            count: self.count,
            seed: self.seed,
        }
    }
}

/// One side of an identity: either an exact closed-form value or a Monte
/// Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measurement {
    Exact { value: f64 },
    Estimated(EstimateReport),
}

impl Measurement {
    pub fn exact(value: f64) -> Self {
        Measurement::Exact { value }
    }

    pub fn value(&self) -> f64 {
        match self {
            Measurement::Exact { value } => *value,
            Measurement::Estimated(e) => e.value,
        }
    }

    pub fn stderr(&self) -> f64 {
        match self {
            Measurement::Exact { .. } => 0.0,
            Measurement::Estimated(e) => e.stderr,
        }
    }
}

/// Runs `f` on `n` draws spread over [`CHUNKS`] fixed substreams of
/// `stream`, scheduled over `workers` threads, merged in chunk order.
fn chunked_moments<F>(stream: &RandomStream, n: u64, workers: usize, f: F) -> RunningMoments
where
    F: Fn(&mut RandomStream) -> f64 + Sync,
{
    let workers = workers.max(1);
    let next = AtomicU64::new(0);
    let slots: Vec<OnceLock<RunningMoments>> = (0..CHUNKS).map(|_| OnceLock::new()).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers.min(CHUNKS as usize) {
            scope.spawn(|| loop {
                let c = next.fetch_add(1, Ordering::Relaxed);
                if c >= CHUNKS {
                    break;
                }
                let count = n / CHUNKS + u64::from(c < n % CHUNKS);
                let mut sub = stream.split(c);
                let mut rm = RunningMoments::new();
                for _ in 0..count {
                    rm.push(f(&mut sub));
                }
                slots[c as usize].set(rm).expect("chunk filled twice");
            });
        }
    });
    let mut total = RunningMoments::new();
    for slot in &slots {
        total.merge(slot.get().expect("chunk missing"));
    }
    total
}

fn check_estimator_args(e: &Ellipsoid, k: usize, n: u64, op: &str) -> Result<()> {
    if k < 1 || k > e.dim() {
        return Err(Error::Domain(format!(
            "{op} requires 1 <= k <= d, got d={}, k={k}",
            e.dim()
        )));
    }
    if n < 2 {
        return Err(Error::Domain(format!("{op} requires n >= 2, got {n}")));
    }
    Ok(())
}

fn powf_or_zero(base: f64, exp: f64) -> f64 {
    if base == 0.0 && exp > 0.0 {
        0.0
    } else {
        base.powf(exp)
    }
}

/// Mean of `|conv(X_0..X_k)|^p` over `n` tuples of i.i.d. uniform points
/// in `e`; estimates the `p`-th simplex-volume moment.
pub fn estimate_simplex_moment(
    stream: &RandomStream,
    e: &Ellipsoid,
    k: usize,
    p: f64,
    n: u64,
    workers: usize,
) -> Result<EstimateReport> {
    check_estimator_args(e, k, n, "estimate_simplex_moment")?;
    if !(p > -1.0) {
        return Err(Error::Domain(format!(
            "estimate_simplex_moment requires p > -1, got {p}"
        )));
    }
    let moments = chunked_moments(stream, n, workers, |s| {
        let pts: Vec<DVector<f64>> = (0..=k).map(|_| uniform_in_ellipsoid(s, e)).collect();
        let vol = simplex_volume(&pts).expect("valid point tuple");
        powf_or_zero(vol, p)
    });
    Ok(EstimateReport::from_moments("simplex_moment", &moments, stream.seed()))
}

/// Mean of `|conv(0, X_1..X_k)|^p` over i.i.d. uniform points in `e`.
pub fn estimate_origin_moment(
    stream: &RandomStream,
    e: &Ellipsoid,
    k: usize,
    p: f64,
    n: u64,
    workers: usize,
) -> Result<EstimateReport> {
    check_estimator_args(e, k, n, "estimate_origin_moment")?;
    let (df, kf) = (e.dim() as f64, k as f64);
    if !(p > -df + kf) {
        return Err(Error::Domain(format!(
            "estimate_origin_moment requires p > -d + k, got p={p}"
        )));
    }
    let moments = chunked_moments(stream, n, workers, |s| {
        let mut pts = vec![DVector::zeros(e.dim())];
        pts.extend((0..k).map(|_| uniform_in_ellipsoid(s, e)));
        let vol = simplex_volume(&pts).expect("valid point tuple");
        powf_or_zero(vol, p)
    });
    Ok(EstimateReport::from_moments("origin_moment", &moments, stream.seed()))
}

/// Mean of `|P_L e|^p` over Haar-random `k`-dimensional subspaces.
pub fn estimate_projection_moment(
    stream: &RandomStream,
    e: &Ellipsoid,
    k: usize,
    p: f64,
    n: u64,
    workers: usize,
) -> Result<EstimateReport> {
    check_estimator_args(e, k, n, "estimate_projection_moment")?;
    let moments = chunked_moments(stream, n, workers, |s| {
        let l = haar_subspace(s, e.dim(), k).expect("haar draw");
        projection_volume(e, &l).expect("matching dimensions").powf(p)
    });
    Ok(EstimateReport::from_moments("projection_moment", &moments, stream.seed()))
}

/// Mean of `|e ^ L|^q` over Haar-random linear `k`-subspaces through the
/// origin; the invariant measure is a probability measure, so the mean is
/// the integral itself.
pub fn estimate_linear_section_integral(
    stream: &RandomStream,
    e: &Ellipsoid,
    k: usize,
    q: f64,
    n: u64,
    workers: usize,
) -> Result<EstimateReport> {
    check_estimator_args(e, k, n, "estimate_linear_section_integral")?;
    let moments = chunked_moments(stream, n, workers, |s| {
        let l = haar_subspace(s, e.dim(), k).expect("haar draw");
        let flat = AffineSubspace::through_origin(l);
        section_volume(e, &flat).expect("matching dimensions").powf(q)
    });
    Ok(EstimateReport::from_moments("linear_section_integral", &moments, stream.seed()))
}

/// Unbiased estimate of the invariant integral of `|e ^ S|^q` over affine
/// `k`-flats, by weighted sampling of flats. Flats missing the ellipsoid
/// contribute zero, which at `q = 0` makes the integrand the hit indicator.
pub fn estimate_affine_section_integral(
    stream: &RandomStream,
    e: &Ellipsoid,
    k: usize,
    q: f64,
    n: u64,
    workers: usize,
) -> Result<EstimateReport> {
    if k >= e.dim() {
        return Err(Error::Domain(format!(
            "estimate_affine_section_integral requires 0 <= k <= d - 1, got d={}, k={k}",
            e.dim()
        )));
    }
    if n < 2 {
        return Err(Error::Domain(format!("n must be >= 2, got {n}")));
    }
    let moments = chunked_moments(stream, n, workers, |s| {
        let draw = haar_affine_sample(s, e, k).expect("affine haar draw");
        let vol = section_volume(e, &draw.subspace).expect("matching dimensions");
        if vol > 0.0 {
            draw.weight * vol.powf(q)
        } else {
            0.0
        }
    });
    Ok(EstimateReport::from_moments("affine_section_integral", &moments, stream.seed()))
}

/// Intrinsic volume `V_k(e)` estimated through the mean projection volume:
/// `C(d,k) kappa_d / (kappa_k kappa_{d-k})` times the first projection
/// moment.
pub fn estimate_intrinsic_volume(
    stream: &RandomStream,
    e: &Ellipsoid,
    k: usize,
    n: u64,
    workers: usize,
) -> Result<EstimateReport> {
    let d = e.dim();
    if k > d {
        return Err(Error::Domain(format!(
            "estimate_intrinsic_volume requires 0 <= k <= d, got d={d}, k={k}"
        )));
    }
    if k == 0 {
        return Ok(EstimateReport::new("intrinsic_volume".into(), 1.0, 0.0, n, stream.seed()));
    }
    // C(d,k) kappa_d / (kappa_k kappa_{d-k}) is the ball intrinsic volume
    // divided by kappa_k.
    let kubota = ball_intrinsic_volume(d, k)? / kappa(k as f64)?;
    let proj = estimate_projection_moment(stream, e, k, 1.0, n, workers)?;
    let mut report = proj.scaled(kubota);
    report.label = "intrinsic_volume".into();
    Ok(report)
}

/// Which spherically symmetric family to draw simplex vertices from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    UniformBallIid,
    GaussianIid,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform-ball" | "uniform-ball-iid" | "ball" => Ok(Family::UniformBallIid),
            "gaussian" | "gaussian-iid" => Ok(Family::GaussianIid),
            other => Err(Error::Validation(format!("unknown family '{other}'"))),
        }
    }
}

fn family_point(stream: &mut RandomStream, d: usize, family: Family) -> DVector<f64> {
    match family {
        Family::UniformBallIid => uniform_in_ball(stream, d),
        Family::GaussianIid => gaussian_vector(stream, d),
    }
}

/// Per-side samples for the affine-transform distributional law: transformed
/// simplex volumes on one side, projection-factor-scaled plain volumes with
/// an independent Haar subspace on the other.
pub fn sample_transform_law_pair(
    stream: &RandomStream,
    e: &Ellipsoid,
    k: usize,
    n: u64,
    family: Family,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_estimator_args(e, k, n, "sample_transform_law_pair")?;
    let d = e.dim();
    let kap_k = kappa(k as f64)?;
    let mut lhs_stream = stream.split(0);
    let mut rhs_stream = stream.split(1);
    let mut lhs = Vec::with_capacity(n as usize);
    let mut rhs = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let pts: Vec<DVector<f64>> = (0..=k)
            .map(|_| e.sym_root() * family_point(&mut lhs_stream, d, family))
            .collect();
        lhs.push(simplex_volume(&pts)?);
    }
    for _ in 0..n {
        let pts: Vec<DVector<f64>> =
            (0..=k).map(|_| family_point(&mut rhs_stream, d, family)).collect();
        let vol = simplex_volume(&pts)?;
        let xi = haar_subspace(&mut rhs_stream, d, k)?;
        rhs.push(projection_volume(e, &xi)? / kap_k * vol);
    }
    Ok((lhs, rhs))
}

/// Per-side samples for the Gaussian Gram-ratio law: the projection factor
/// evaluated on Gaussian spans against the coupled singular-value ratio.
pub fn sample_gram_pair(
    stream: &RandomStream,
    e: &Ellipsoid,
    k: usize,
    n: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_estimator_args(e, k, n, "sample_gram_pair")?;
    let d = e.dim();
    let mut lhs_stream = stream.split(0);
    let mut rhs_stream = stream.split(1);
    let mut lhs = Vec::with_capacity(n as usize);
    let mut rhs = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let g = gaussian_matrix(&mut lhs_stream, d, k);
        lhs.push(gram_factor(e.sym_root(), &g)?);
    }
    for _ in 0..n {
        rhs.push(coupled_gram_ratio(&mut rhs_stream, e.semi_axes(), k)?);
    }
    Ok((lhs, rhs))
}

/// Per-side samples for the Beta factorization of the squared simplex
/// volume in an ellipsoid.
pub fn sample_beta_pair(
    stream: &RandomStream,
    e: &Ellipsoid,
    k: usize,
    n: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_estimator_args(e, k, n, "sample_beta_pair")?;
    let d = e.dim();
    let (df, kf) = (d as f64, k as f64);
    let eta_spec = BetaSpec::new(df / 2.0 + 1.0, kf * df / 2.0)?;
    let factor_specs: Vec<BetaSpec> = (1..=k)
        .map(|i| BetaSpec::new((df - kf + i as f64) / 2.0, (kf - i as f64) / 2.0 + 1.0))
        .collect::<Result<_>>()?;
    let k_factorial: f64 = (1..=k).map(|j| j as f64).product();
    let mut lhs_stream = stream.split(0);
    let mut rhs_stream = stream.split(1);
    let mut lhs = Vec::with_capacity(n as usize);
    let mut rhs = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let pts: Vec<DVector<f64>> =
            (0..=k).map(|_| uniform_in_ellipsoid(&mut lhs_stream, e)).collect();
        let vol = simplex_volume(&pts)?;
        let eta = beta_sample(&mut lhs_stream, &eta_spec);
        lhs.push(k_factorial.powi(2) * eta * (1.0 - eta).powi(k as i32) * vol * vol);
    }
    for _ in 0..n {
        let eta_prime = beta_sample(&mut rhs_stream, &eta_spec);
        let mut prod = (1.0 - eta_prime).powi(k as i32);
        for spec in &factor_specs {
            prod *= beta_sample(&mut rhs_stream, spec);
        }
        let ratio = coupled_gram_ratio(&mut rhs_stream, e.semi_axes(), k)?;
        rhs.push(prod * ratio * ratio);
    }
    Ok((lhs, rhs))
}

/// Pass/fail thresholds: two-sided z threshold for moment identities and
/// KS significance level for distributional identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyPolicy {
    pub z_threshold: f64,
    pub alpha: f64,
}

impl Default for VerifyPolicy {
    fn default() -> Self {
        VerifyPolicy { z_threshold: 4.0, alpha: 0.01 }
    }
}

/// Parameters of one identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityParams {
    pub d: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub semi_axes: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
}

/// The verdict record for one verified identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: IdentityParams,
    pub lhs: Measurement,
    pub rhs: Measurement,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_stat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_p_value: Option<f64>,
    pub pass: bool,
    /// Set when the requested exponent sits in a range where the integrand
    /// may have infinite variance, making the CLT-based comparison
    /// uncertifiable.
    pub heavy_tail: bool,
    pub n: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Canonical identity labels accepted by [`verify_identity`].
pub const IDENTITY_CATALOG: &[&str] = &[
    "affine-transform-law",
    "mean-transform-law",
    "gram-ratio-law",
    "ellipsoid-moment",
    "mean-volume-coeff",
    "beta-factorization",
    "affine-point-moment",
    "section-projection",
    "ft-linear",
    "ft-affine",
    "linear-origin-moment",
    "mu-normalization",
];

/// Resolve a label (canonical or alias) to its canonical form.
pub fn canonical_identity(label: &str) -> Result<&'static str> {
    let lower = label.to_ascii_lowercase();
    let resolved = match lower.as_str() {
        "thm-1.1" => "affine-transform-law",
        "cor-1.2" => "mean-transform-law",
        "cor-1.4" => "gram-ratio-law",
        "thm-2.1" => "ellipsoid-moment",
        "cor-1.9" => "mean-volume-coeff",
        "thm-1.10" => "beta-factorization",
        "thm-1.11" => "affine-point-moment",
        "thm-1.12" => "section-projection",
        "eq-4.3" => "ft-affine",
        "thm-1.14" => "linear-origin-moment",
        other => other,
    };
    IDENTITY_CATALOG
        .iter()
        .find(|&&c| c == resolved)
        .copied()
        .ok_or_else(|| Error::UnknownIdentity(label.to_string()))
}

/// Deterministic random rotation for rotated-ellipsoid experiments.
pub fn random_rotation(seed: u64, d: usize) -> nalgebra::DMatrix<f64> {
    let mut s = RandomStream::new(seed).split(u64::MAX);
    let l = haar_subspace(&mut s, d, d).expect("square haar frame");
    l.frame().clone()
}

fn build_ellipsoid(params: &IdentityParams) -> Result<Ellipsoid> {
    if params.semi_axes.len() != params.d {
        return Err(Error::Validation(format!(
            "semi_axes length {} does not match d={}",
            params.semi_axes.len(),
            params.d
        )));
    }
    match params.rotation_seed {
        Some(seed) => {
            let u = random_rotation(seed, params.d);
            Ellipsoid::from_semi_axes(&params.semi_axes, Some(&u))
        }
        None => Ellipsoid::from_semi_axes(&params.semi_axes, None),
    }
}

fn summarize(label: &str, samples: &[f64], seed: u64) -> EstimateReport {
    let mut rm = RunningMoments::new();
    for &v in samples {
        rm.push(v);
    }
    EstimateReport::from_moments(label, &rm, seed)
}

/// Run one identity check from the catalog: Monte Carlo on each side (or an
/// exact closed form where one exists), compared by z-score or a two-sample
/// KS test according to the identity kind.
pub fn verify_identity(
    label: &str,
    params: &IdentityParams,
    n: u64,
    seed: u64,
    workers: usize,
    policy: &VerifyPolicy,
) -> Result<IdentityReport> {
    let identity = canonical_identity(label)?;
    let e = build_ellipsoid(params)?;
    let (d, k) = (params.d, params.k);
    let p = params.p.unwrap_or(1.0);
    let root = RandomStream::new(seed);
    let lhs_stream = root.split(0);
    let rhs_stream = root.split(1);
    let kap_k = kappa(k as f64)?;
    let heavy_tail = params.p.is_some_and(|p| p < -0.5);

    let report = |lhs: Measurement, rhs: Measurement| {
        let z = z_compare(&lhs, &rhs);
        IdentityReport {
            identity: identity.to_string(),
            params: params.clone(),
            lhs,
            rhs,
            z_score: Some(z),
            ks_stat: None,
            ks_p_value: None,
            pass: z.abs() <= policy.z_threshold,
            heavy_tail,
            n,
            seed,
            workers,
        }
    };

    let out = match identity {
        "ft-linear" => {
            let lhs = estimate_linear_section_integral(&lhs_stream, &e, k, d as f64, n, workers)?;
            let rhs = identity_constant(IdentityId::FtLinear, d, k, 0.0)?
                * e.volume().powi(k as i32);
            report(Measurement::Estimated(lhs), Measurement::exact(rhs))
        }
        "ft-affine" => {
            let lhs =
                estimate_affine_section_integral(&lhs_stream, &e, k, d as f64 + 1.0, n, workers)?;
            let rhs = identity_constant(IdentityId::FtAffine, d, k, 0.0)?
                * e.volume().powi(k as i32 + 1);
            report(Measurement::Estimated(lhs), Measurement::exact(rhs))
        }
        "mu-normalization" => {
            if params.semi_axes.iter().any(|&a| a != 1.0) {
                return Err(Error::Domain(
                    "mu-normalization is stated for the unit ball; use semi_axes of all 1".into(),
                ));
            }
            let lhs = estimate_affine_section_integral(&lhs_stream, &e, k, 0.0, n, workers)?;
            let rhs = kappa((d - k) as f64)?;
            report(Measurement::Estimated(lhs), Measurement::exact(rhs))
        }
        "ellipsoid-moment" => {
            let lhs = estimate_simplex_moment(&lhs_stream, &e, k, p, n, workers)?;
            let rhs = estimate_projection_moment(&rhs_stream, &e, k, p, n, workers)?
                .scaled(ball_simplex_moment(d, k, p)? / kap_k.powf(p));
            report(Measurement::Estimated(lhs), Measurement::Estimated(rhs))
        }
        "mean-volume-coeff" => {
            let lhs = estimate_simplex_moment(&lhs_stream, &e, k, 1.0, n, workers)?;
            let rhs = estimate_intrinsic_volume(&rhs_stream, &e, k, n, workers)?
                .scaled(mean_volume_coeff(d, k)?);
            report(Measurement::Estimated(lhs), Measurement::Estimated(rhs))
        }
        "mean-transform-law" => {
            let lhs = estimate_simplex_moment(&lhs_stream, &e, k, 1.0, n, workers)?;
            let rhs = estimate_intrinsic_volume(&rhs_stream, &e, k, n, workers)?
                .scaled(ball_simplex_moment(d, k, 1.0)? / ball_intrinsic_volume(d, k)?);
            report(Measurement::Estimated(lhs), Measurement::Estimated(rhs))
        }
        "affine-point-moment" => {
            let lhs = estimate_simplex_moment(&lhs_stream, &e, k, p, n, workers)?
                .scaled(e.volume().powi(k as i32 + 1));
            let rhs = estimate_affine_section_integral(
                &rhs_stream,
                &e,
                k,
                p + d as f64 + 1.0,
                n,
                workers,
            )?
            .scaled(identity_constant(IdentityId::AffineBpMoment, d, k, p)?);
            report(Measurement::Estimated(lhs), Measurement::Estimated(rhs))
        }
        "section-projection" => {
            let lhs = estimate_affine_section_integral(
                &lhs_stream,
                &e,
                k,
                p + d as f64 + 1.0,
                n,
                workers,
            )?
            .scaled(identity_constant(IdentityId::SectionProjection, d, k, p)?);
            let rhs = estimate_projection_moment(&rhs_stream, &e, k, p, n, workers)?
                .scaled(e.volume().powi(k as i32 + 1));
            report(Measurement::Estimated(lhs), Measurement::Estimated(rhs))
        }
        "linear-origin-moment" => {
            let lhs = estimate_origin_moment(&lhs_stream, &e, k, p, n, workers)?
                .scaled(e.volume().powi(k as i32));
            let rhs =
                estimate_linear_section_integral(&rhs_stream, &e, k, p + d as f64, n, workers)?
                    .scaled(identity_constant(IdentityId::LinearBpMoment, d, k, p)?);
            report(Measurement::Estimated(lhs), Measurement::Estimated(rhs))
        }
        "affine-transform-law" => {
            let family = params.family.unwrap_or(Family::GaussianIid);
            let (lhs, rhs) = sample_transform_law_pair(&root, &e, k, n, family)?;
            let ks = ks_two_sample(&lhs, &rhs)?;
            IdentityReport {
                identity: identity.to_string(),
                params: params.clone(),
                lhs: Measurement::Estimated(summarize("transformed_volume", &lhs, seed)),
                rhs: Measurement::Estimated(summarize("projection_factor_volume", &rhs, seed)),
                z_score: None,
                ks_stat: Some(ks.statistic),
                ks_p_value: Some(ks.p_value),
                pass: ks.p_value >= policy.alpha,
                heavy_tail,
                n,
                seed,
                workers,
            }
        }
        "gram-ratio-law" => {
            let (lhs, rhs) = sample_gram_pair(&root, &e, k, n)?;
            let ks = ks_two_sample(&lhs, &rhs)?;
            IdentityReport {
                identity: identity.to_string(),
                params: params.clone(),
                lhs: Measurement::Estimated(summarize("gram_factor", &lhs, seed)),
                rhs: Measurement::Estimated(summarize("coupled_gram_ratio", &rhs, seed)),
                z_score: None,
                ks_stat: Some(ks.statistic),
                ks_p_value: Some(ks.p_value),
                pass: ks.p_value >= policy.alpha,
                heavy_tail,
                n,
                seed,
                workers,
            }
        }
        "beta-factorization" => {
            let (lhs, rhs) = sample_beta_pair(&root, &e, k, n)?;
            let ks = ks_two_sample(&lhs, &rhs)?;
            IdentityReport {
                identity: identity.to_string(),
                params: params.clone(),
                lhs: Measurement::Estimated(summarize("beta_weighted_volume", &lhs, seed)),
                rhs: Measurement::Estimated(summarize("beta_gram_product", &rhs, seed)),
                z_score: None,
                ks_stat: Some(ks.statistic),
                ks_p_value: Some(ks.p_value),
                pass: ks.p_value >= policy.alpha,
                heavy_tail,
                n,
                seed,
                workers,
            }
        }
        other => return Err(Error::UnknownIdentity(other.to_string())),
    };
    Ok(out)
}
