//! Seeded, reproducible generation of every random object the estimators
//! consume: Gaussian matrices, uniform points in ellipsoids, Haar frames on
//! the linear and affine Grassmannians, and Beta variables.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::kappa;
use crate::geometry::{signed_thin_qr, AffineSubspace, Ellipsoid, LinearSubspace};

/// Cap on redraws for probability-zero degeneracies hit by floating point.
const MAX_REDRAWS: usize = 100;

/// A deterministic random source identified by a root seed and a path of
/// split indices. Identical `(seed, path)` replay identical output
/// bit-for-bit; children obtained through [`RandomStream::split`] are
/// derived by hashing the path, so sibling streams are independent
/// regardless of how much output the parent has consumed.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    path: Vec<u64>,
    rng: ChaCha12Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::with_path(seed, Vec::new())
    }

    fn with_path(seed: u64, path: Vec<u64>) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        for idx in &path {
            hasher.update(idx.to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest);
        RandomStream { seed, path, rng: ChaCha12Rng::from_seed(key) }
    }

    /// Child stream at the given split index.
    pub fn split(&self, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push(index);
        Self::with_path(self.seed, path)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

/// Beta distribution parameters, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSpec {
    alpha1: f64,
    alpha2: f64,
}

impl BetaSpec {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(alpha1 > 0.0 && alpha2 > 0.0) {
            return Err(Error::Domain(format!(
                "Beta parameters must be positive, got ({alpha1}, {alpha2})"
            )));
        }
        Ok(BetaSpec { alpha1, alpha2 })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }
}

/// A Haar-direction flat with the constant importance weight that makes
/// weighted means unbiased for the rigid-motion-invariant measure on flats.
#[derive(Debug, Clone)]
pub struct WeightedAffineSample {
    pub subspace: AffineSubspace,
    pub weight: f64,
}

/// `d x k` matrix of i.i.d. standard normal entries.
pub fn gaussian_matrix(stream: &mut RandomStream, d: usize, k: usize) -> DMatrix<f64> {
    // Column-major fill order is part of the determinism contract.
    let mut m = DMatrix::zeros(d, k);
    for j in 0..k {
        for i in 0..d {
            m[(i, j)] = stream.sample(StandardNormal);
        }
    }
    m
}

pub fn gaussian_vector(stream: &mut RandomStream, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| stream.sample(StandardNormal))
}

/// Uniform point in the unit `d`-ball: normalized Gaussian direction times
/// a `U^{1/d}` radius.
pub fn uniform_in_ball(stream: &mut RandomStream, d: usize) -> DVector<f64> {
    let mut g = gaussian_vector(stream, d);
    let mut norm = g.norm();
    while norm == 0.0 {
        g = gaussian_vector(stream, d);
        norm = g.norm();
    }
    let u: f64 = stream.random();
    g * (u.powf(1.0 / d as f64) / norm)
}

/// Uniform point in the ellipsoid, via the symmetric root acting on a
/// uniform ball point.
pub fn uniform_in_ellipsoid(stream: &mut RandomStream, e: &Ellipsoid) -> DVector<f64> {
    e.sym_root() * uniform_in_ball(stream, e.dim())
}

/// Haar-distributed `k`-dimensional linear subspace of `R^d`: thin QR of a
/// Gaussian matrix with the positive-diagonal sign convention.
pub fn haar_subspace(stream: &mut RandomStream, d: usize, k: usize) -> Result<LinearSubspace> {
    if k < 1 || k > d {
        return Err(Error::Domain(format!(
            "haar_subspace requires 1 <= k <= d, got d={d}, k={k}"
        )));
    }
    for _ in 0..MAX_REDRAWS {
        let g = gaussian_matrix(stream, d, k);
        let (q, r) = signed_thin_qr(&g);
        if (0..k).all(|j| r[(j, j)] > 1e-10) {
            return LinearSubspace::from_frame(q);
        }
    }
    Err(Error::ResamplingExhausted("haar_subspace kept drawing rank-deficient matrices".into()))
}

/// Orthonormal basis of the orthogonal complement of `l`, deterministic
/// given the stream (the Gaussian completion is drawn from it).
fn complement_frame(stream: &mut RandomStream, l: &LinearSubspace) -> Result<DMatrix<f64>> {
    let d = l.ambient_dim();
    let k = l.dim();
    for _ in 0..MAX_REDRAWS {
        let g = gaussian_matrix(stream, d, d - k);
        let mut joined = DMatrix::zeros(d, d);
        joined.view_mut((0, 0), (d, k)).copy_from(l.frame());
        joined.view_mut((0, k), (d, d - k)).copy_from(&g);
        let (q, r) = signed_thin_qr(&joined);
        if (k..d).all(|j| r[(j, j)] > 1e-10) {
            return Ok(q.columns(k, d - k).into_owned());
        }
    }
    Err(Error::ResamplingExhausted("complement basis kept degenerating".into()))
}

/// One draw of the product decomposition of the affine Haar measure: a Haar
/// direction `L` and an offset uniform in the complement ball of radius
/// `r = lambda_1(E)`, with weight `kappa_{d-k} r^{d-k}`. The radius covers
/// the shadow of `E` on every complement, so for any integrable `f`
/// vanishing on flats missing `E` the weighted mean of `f` estimates the
/// invariant integral unbiasedly.
pub fn haar_affine_sample(
    stream: &mut RandomStream,
    e: &Ellipsoid,
    k: usize,
) -> Result<WeightedAffineSample> {
    let d = e.dim();
    if k >= d {
        return Err(Error::Domain(format!(
            "haar_affine_sample requires 0 <= k <= d - 1, got d={d}, k={k}"
        )));
    }
    let direction = if k == 0 {
        LinearSubspace::from_frame(DMatrix::zeros(d, 0))?
    } else {
        haar_subspace(stream, d, k)?
    };
    let complement = complement_frame(stream, &direction)?;
    let r = e.max_semi_axis();
    let local = uniform_in_ball(stream, d - k) * r;
    let offset = &complement * local;
    let weight = kappa((d - k) as f64)? * r.powi((d - k) as i32);
    Ok(WeightedAffineSample { subspace: AffineSubspace::new(direction, offset)?, weight })
}

/// Beta variate by the two-Gamma ratio construction. The Gamma sampler is
/// a rejection scheme valid for all shapes, including shapes below 1.
pub fn beta_sample(stream: &mut RandomStream, spec: &BetaSpec) -> f64 {
    let g1 = Gamma::new(spec.alpha1, 1.0).expect("validated shape");
    let g2 = Gamma::new(spec.alpha2, 1.0).expect("validated shape");
    loop {
        let x: f64 = g1.sample(stream);
        let y: f64 = g2.sample(stream);
        if x + y > 0.0 {
            return x / (x + y);
        }
    }
}

/// One draw of `sqrt(det(G_l' G_l) / det(G' G))` where `G` is a `d x k`
/// standard Gaussian matrix and `G_l = diag(lambda) G` reuses the same
/// entries. The coupling of numerator and denominator is mandatory.
pub fn coupled_gram_ratio(
    stream: &mut RandomStream,
    semi_axes: &[f64],
    k: usize,
) -> Result<f64> {
    let d = semi_axes.len();
    if k < 1 || k > d {
        return Err(Error::Domain(format!(
            "coupled_gram_ratio requires 1 <= k <= d, got d={d}, k={k}"
        )));
    }
    if semi_axes.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::Domain("semi-axes must be positive".into()));
    }
    let scaling = DMatrix::from_diagonal(&DVector::from_row_slice(semi_axes));
    for _ in 0..MAX_REDRAWS {
        let g = gaussian_matrix(stream, d, k);
        match crate::geometry::gram_factor(&scaling, &g) {
            Ok(v) => return Ok(v),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ResamplingExhausted("coupled_gram_ratio kept drawing singular matrices".into()))
}
