//! Deterministic Euclidean computations: ellipsoids given by a
//! positive-definite quadratic form, orthonormal subspace frames, and the
//! volumes of simplices, projections and affine sections.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exact::kappa;

/// Relative degeneracy threshold for Gram determinants: below
/// `GRAM_EPS * (largest column norm)^(2k)` a spanned volume is treated as 0.
const GRAM_EPS: f64 = 1e-13;

/// A non-degenerate ellipsoid `{x : x' Q x <= 1}` stored by its shape matrix
/// `Q` with cached spectral data. The symmetric root `A = Q^{-1/2}` is the
/// canonical transform mapping the unit ball onto the ellipsoid; any other
/// matrix with the same `A' A` yields the same body.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    dim: usize,
    shape: DMatrix<f64>,
    inverse_shape: DMatrix<f64>,
    semi_axes: Vec<f64>,
    principal_frame: DMatrix<f64>,
    sym_root: DMatrix<f64>,
    inv_sym_root: DMatrix<f64>,
    volume: f64,
}

impl Ellipsoid {
    /// Unit ball in dimension `d`.
    pub fn unit_ball(d: usize) -> Result<Self> {
        Self::from_semi_axes(&vec![1.0; d], None)
    }

    /// Axis-aligned (or `frame`-rotated) ellipsoid with the given semi-axes.
    pub fn from_semi_axes(semi_axes: &[f64], frame: Option<&DMatrix<f64>>) -> Result<Self> {
        let d = semi_axes.len();
        if d == 0 {
            return Err(Error::Domain("ellipsoid needs at least one semi-axis".into()));
        }
        for (i, &a) in semi_axes.iter().enumerate() {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::Domain(format!("semi-axis {i} must be positive, got {a}")));
            }
        }
        let u = match frame {
            Some(u) => {
                if u.nrows() != d || u.ncols() != d {
                    return Err(Error::Validation(format!(
                        "frame must be {d}x{d}, got {}x{}",
                        u.nrows(),
                        u.ncols()
                    )));
                }
                let residual = (u.transpose() * u - DMatrix::identity(d, d)).abs().max();
                if residual > 1e-10 {
                    return Err(Error::Validation(format!(
                        "frame is not orthogonal: residual {residual:.3e}"
                    )));
                }
                u.clone()
            }
            None => DMatrix::identity(d, d),
        };
        let q = &u * DMatrix::from_diagonal(&DVector::from_iterator(
            d,
            semi_axes.iter().map(|a| a.powi(-2)),
        )) * u.transpose();
        // Symmetrize: the triple product is symmetric only up to rounding.
        let q = (&q + q.transpose()) * 0.5;
        Self::from_shape(&q)
    }

    /// Ellipsoid from a symmetric positive-definite shape matrix `Q`.
    pub fn from_shape(shape: &DMatrix<f64>) -> Result<Self> {
        let d = shape.nrows();
        if d == 0 || shape.ncols() != d {
            return Err(Error::Validation(format!(
                "shape must be square and non-empty, got {}x{}",
                shape.nrows(),
                shape.ncols()
            )));
        }
        let scale = shape.abs().max();
        let asym = (shape - shape.transpose()).abs().max();
        if asym > 1e-12 * scale.max(1.0) {
            return Err(Error::Validation(format!(
                "shape matrix is not symmetric: residual {asym:.3e}"
            )));
        }
        let sym = (shape + shape.transpose()) * 0.5;
        let eig = sym.clone().symmetric_eigen();
        // Order by ascending eigenvalue, i.e. descending semi-axis.
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        for &i in &order {
            let ev = eig.eigenvalues[i];
            if !(ev > 0.0) {
                return Err(Error::Validation(format!(
                    "shape matrix is not positive definite: eigenvalue {ev:.6e}"
                )));
            }
        }
        let semi_axes: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].powf(-0.5)).collect();
        let principal_frame =
            DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
        let axis_diag = |exps: &dyn Fn(f64) -> f64| {
            &principal_frame
                * DMatrix::from_diagonal(&DVector::from_iterator(d, semi_axes.iter().map(|&a| exps(a))))
                * principal_frame.transpose()
        };
        let sym_root = axis_diag(&|a| a);
        let inv_sym_root = axis_diag(&|a| 1.0 / a);
        let inverse_shape = axis_diag(&|a| a * a);
        let volume = kappa(d as f64)? * semi_axes.iter().product::<f64>();
        Ok(Ellipsoid {
            dim: d,
            shape: sym,
            inverse_shape,
            semi_axes,
            principal_frame,
            sym_root,
            inv_sym_root,
            volume,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Shape matrix `Q` with the body `{x : x' Q x <= 1}`.
    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    /// `H = Q^{-1}`, the matrix entering projection volumes.
    pub fn inverse_shape(&self) -> &DMatrix<f64> {
        &self.inverse_shape
    }

    /// Semi-axes in descending order.
    pub fn semi_axes(&self) -> &[f64] {
        &self.semi_axes
    }

    /// Largest semi-axis.
    pub fn max_semi_axis(&self) -> f64 {
        self.semi_axes[0]
    }

    /// Orthogonal matrix of principal directions, columns matching `semi_axes`.
    pub fn principal_frame(&self) -> &DMatrix<f64> {
        &self.principal_frame
    }

    /// Symmetric positive-definite `A = Q^{-1/2}` with `E = A B^d`.
    pub fn sym_root(&self) -> &DMatrix<f64> {
        &self.sym_root
    }

    /// `A^{-1} = Q^{1/2}`, mapping the ellipsoid onto the unit ball.
    pub fn inv_sym_root(&self) -> &DMatrix<f64> {
        &self.inv_sym_root
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        (x.transpose() * &self.shape * x)[(0, 0)] <= 1.0
    }
}

/// A `k`-dimensional linear subspace of `R^d`, stored as a `d x k` matrix
/// with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSubspace {
    frame: DMatrix<f64>,
}

impl LinearSubspace {
    /// Wrap an already-orthonormal frame. Residual tolerance 1e-12.
    pub fn from_frame(frame: DMatrix<f64>) -> Result<Self> {
        let k = frame.ncols();
        if frame.nrows() < k {
            return Err(Error::Domain(format!(
                "subspace dimension {k} exceeds ambient dimension {}",
                frame.nrows()
            )));
        }
        let residual = (frame.transpose() * &frame - DMatrix::identity(k, k)).abs().max();
        if k > 0 && residual > 1e-12 {
            return Err(Error::Validation(format!(
                "frame columns are not orthonormal: residual {residual:.3e}"
            )));
        }
        Ok(LinearSubspace { frame })
    }

    /// Span of the columns of an arbitrary full-rank matrix, orthonormalized
    /// by QR with the positive-diagonal sign convention.
    pub fn span(vectors: &DMatrix<f64>) -> Result<Self> {
        let (q, r) = signed_thin_qr(vectors);
        let scale = column_norm_max(vectors).max(1.0);
        for j in 0..vectors.ncols() {
            if r[(j, j)].abs() <= 1e-12 * scale {
                return Err(Error::Degenerate(format!(
                    "spanning vectors are rank deficient at column {j}"
                )));
            }
        }
        LinearSubspace::from_frame(q)
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// Orthogonal projection of `x` onto the subspace.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.frame * (self.frame.transpose() * x)
    }
}

/// A `k`-flat `L + u`, canonicalized so the offset `u` lies in the orthogonal
/// complement of the direction space.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    direction: LinearSubspace,
    offset: DVector<f64>,
}

impl AffineSubspace {
    pub fn new(direction: LinearSubspace, offset: DVector<f64>) -> Result<Self> {
        if offset.len() != direction.ambient_dim() {
            return Err(Error::Domain(format!(
                "offset dimension {} does not match ambient dimension {}",
                offset.len(),
                direction.ambient_dim()
            )));
        }
        let offset = &offset - direction.project(&offset);
        Ok(AffineSubspace { direction, offset })
    }

    pub fn through_origin(direction: LinearSubspace) -> Self {
        let d = direction.ambient_dim();
        AffineSubspace { direction, offset: DVector::zeros(d) }
    }

    pub fn direction(&self) -> &LinearSubspace {
        &self.direction
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }
}

/// An ordered tuple of points in a common ambient dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    ambient_dim: usize,
    points: Vec<DVector<f64>>,
}

impl PointConfig {
    pub fn new(points: Vec<DVector<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Domain("point configuration needs at least one point".into()));
        };
        let d = first.len();
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::Domain("points have mismatched dimensions".into()));
        }
        Ok(PointConfig { ambient_dim: d, points })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn volume(&self) -> Result<f64> {
        simplex_volume(&self.points)
    }
}

fn column_norm_max(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).norm()).fold(0.0, f64::max)
}

/// Thin QR with the positive-diagonal sign convention on `R`.
pub(crate) fn signed_thin_qr(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for j in 0..r.nrows().min(r.ncols()) {
        if r[(j, j)] < 0.0 {
            for i in 0..q.nrows() {
                q[(i, j)] = -q[(i, j)];
            }
            for c in 0..r.ncols() {
                r[(j, c)] = -r[(j, c)];
            }
        }
    }
    (q, r)
}

/// sqrt(det(M' M)) for a `d x k` matrix of spanning vectors, with the
/// degeneracy clamp of [`GRAM_EPS`]. Computed from the diagonal of a
/// column-pivoted QR factorization.
fn gram_volume(m: &DMatrix<f64>) -> f64 {
    let k = m.ncols();
    if k == 0 {
        return 1.0;
    }
    let qr = m.clone().col_piv_qr();
    let r = qr.r();
    let mut det_sqrt = 1.0;
    for j in 0..k {
        det_sqrt *= r[(j, j)].abs();
    }
    let scale = column_norm_max(m);
    if det_sqrt * det_sqrt <= GRAM_EPS * scale.powi(2 * k as i32) {
        return 0.0;
    }
    det_sqrt
}

fn ln_factorial_int(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `m`-dimensional volume of the simplex spanned by `m + 1` points in `R^d`,
/// `1 <= m <= d`: `sqrt(det(X' X)) / m!` with columns `x_i - x_0`. Degenerate
/// configurations yield 0.
pub fn simplex_volume(points: &[DVector<f64>]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Domain("simplex needs at least two points".into()));
    }
    let d = points[0].len();
    let m = points.len() - 1;
    if m > d {
        return Err(Error::Domain(format!(
            "cannot span a {m}-simplex in dimension {d}"
        )));
    }
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Domain("points have mismatched dimensions".into()));
    }
    let x = DMatrix::from_fn(d, m, |i, j| points[j + 1][i] - points[0][i]);
    Ok(gram_volume(&x) / ln_factorial_int(m).exp())
}

/// Volume of the orthogonal projection of `E` onto `L`:
/// `kappa_k * sqrt(det(O' H O))` with `H = Q^{-1}`.
pub fn projection_volume(e: &Ellipsoid, l: &LinearSubspace) -> Result<f64> {
    if l.ambient_dim() != e.dim() {
        return Err(Error::Domain(format!(
            "subspace ambient dimension {} does not match ellipsoid dimension {}",
            l.ambient_dim(),
            e.dim()
        )));
    }
    let k = l.dim();
    let m = l.frame().transpose() * e.inverse_shape() * l.frame();
    let det = m.determinant().max(0.0);
    Ok(kappa(k as f64)? * det.sqrt())
}

/// `k`-volume of the intersection of `E` with the flat `S`. Substituting
/// `x = u + O y` into the quadratic form and completing the square gives an
/// ellipsoid of squared radius `rho^2 = 1 - u'Qu + b'M^{-1}b` in the local
/// metric `M = O'QO`; an empty or tangent intersection yields 0.
pub fn section_volume(e: &Ellipsoid, s: &AffineSubspace) -> Result<f64> {
    if s.direction().ambient_dim() != e.dim() {
        return Err(Error::Domain(format!(
            "flat ambient dimension {} does not match ellipsoid dimension {}",
            s.direction().ambient_dim(),
            e.dim()
        )));
    }
    let k = s.direction().dim();
    let o = s.direction().frame();
    let u = s.offset();
    let c = (u.transpose() * e.shape() * u)[(0, 0)];
    if k == 0 {
        return Ok(if 1.0 - c > 0.0 { 1.0 } else { 0.0 });
    }
    let m = o.transpose() * e.shape() * o;
    let b = o.transpose() * (e.shape() * u);
    let chol = m.clone().cholesky().ok_or_else(|| {
        Error::Degenerate("local section metric is not positive definite".into())
    })?;
    let w = chol.solve(&b);
    let rho2 = 1.0 - c + b.dot(&w);
    if rho2 <= 0.0 {
        return Ok(0.0);
    }
    let det = chol.determinant();
    Ok(kappa(k as f64)? * rho2.powf(k as f64 / 2.0) / det.sqrt())
}

/// `sqrt(det(X'A'AX) / det(X'X))` for a nonsingular `A` and full-rank
/// spanning vectors `X`; equals the projection-volume factor
/// `|P_L E| / kappa_k` of the ellipsoid of `A` on the span of `X`.
pub fn gram_factor(a: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<f64> {
    let d = a.nrows();
    if a.ncols() != d || x.nrows() != d {
        return Err(Error::Domain(format!(
            "expected square A ({d}x{}) matching X with {} rows",
            a.ncols(),
            x.nrows()
        )));
    }
    let denom = gram_volume(x);
    if denom == 0.0 {
        return Err(Error::Degenerate("spanning vectors are rank deficient".into()));
    }
    let numer = gram_volume(&(a * x));
    Ok(numer / denom)
}

/// Intrinsic volume `V_k` of the unit `d`-ball: `C(d,k) kappa_d / kappa_{d-k}`.
pub fn ball_intrinsic_volume(d: usize, k: usize) -> Result<f64> {
    if d < 1 || k > d {
        return Err(Error::Domain(format!(
            "ball_intrinsic_volume requires 0 <= k <= d, got d={d}, k={k}"
        )));
    }
    let ln_binom = ln_factorial_int(d) - ln_factorial_int(k) - ln_factorial_int(d - k);
    Ok(ln_binom.exp() * kappa(d as f64)? / kappa((d - k) as f64)?)
}
