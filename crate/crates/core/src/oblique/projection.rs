use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numkit::{self, max_abs, SpectrumComparison, SymMatrix, DEFAULT_REL_TOL};

/// An `n`-dimensional real space with scalar product `H` and metric `G`,
/// both positive-definite.
#[derive(Debug, Clone)]
pub struct MetricSpace {
    h: SymMatrix,
    g: SymMatrix,
    h_inv: DMatrix<f64>,
    g_inv: DMatrix<f64>,
}

impl MetricSpace {
    pub fn new(h: SymMatrix, g: SymMatrix) -> Result<Self> {
        if h.dim() != g.dim() {
            return Err(Error::DimensionMismatch(format!("H is {0}x{0} but G is {1}x{1}", h.dim(), g.dim())));
        }
        if h.dim() == 0 {
            return Err(Error::InvalidInput("zero-dimensional space".into()));
        }
        check_positive_definite(&h, "H")?;
        check_positive_definite(&g, "G")?;
        let h_inv = numkit::invert(h.as_matrix(), "H")?;
        let g_inv = numkit::invert(g.as_matrix(), "G")?;
        Ok(Self { h, g, h_inv, g_inv })
    }

    /// Space whose scalar product is the identity.
    pub fn with_metric(g: SymMatrix) -> Result<Self> {
        Self::new(SymMatrix::identity(g.dim()), g)
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn h(&self) -> &SymMatrix {
        &self.h
    }

    pub fn g(&self) -> &SymMatrix {
        &self.g
    }

    pub fn h_inv(&self) -> &DMatrix<f64> {
        &self.h_inv
    }

    pub fn g_inv(&self) -> &DMatrix<f64> {
        &self.g_inv
    }

    pub fn h_is_identity(&self) -> bool {
        let n = self.dim();
        max_abs(&(self.h.as_matrix() - DMatrix::identity(n, n))) <= 1e-14
    }

    /// The operator `Ĝ = H⁻¹G`.
    pub fn metric_operator(&self) -> DMatrix<f64> {
        &self.h_inv * self.g.as_matrix()
    }

    /// `det₊ G = det(H⁻¹G) = det G / det H`.
    pub fn det_plus_g(&self) -> f64 {
        numkit::spectrum(&self.g).pseudodet() / numkit::spectrum(&self.h).pseudodet()
    }
}

fn check_positive_definite(a: &SymMatrix, name: &str) -> Result<()> {
    let s = numkit::spectrum(a);
    let max = s.max_abs();
    match s.values.last() {
        Some(&min) if min > DEFAULT_REL_TOL * max && min > 0.0 => Ok(()),
        Some(&min) => Err(Error::NotPositiveDefinite(format!("{name} has eigenvalue {min:e}"))),
        None => Ok(()),
    }
}

/// A certified pair of complementary projections `P0 + P1 = I`.
#[derive(Debug, Clone)]
pub struct ProjectionPair {
    p0: DMatrix<f64>,
    p1: DMatrix<f64>,
    n0: usize,
    n1: usize,
}

impl ProjectionPair {
    pub fn p0(&self) -> &DMatrix<f64> {
        &self.p0
    }

    pub fn p1(&self) -> &DMatrix<f64> {
        &self.p1
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn dim(&self) -> usize {
        self.p0.nrows()
    }

    /// The same pair with the roles of the two subspaces exchanged.
    pub fn swapped(&self) -> Self {
        Self { p0: self.p1.clone(), p1: self.p0.clone(), n0: self.n1, n1: self.n0 }
    }
}

/// Certifies `P0`, `P1` as complementary, nontrivial projections.
///
/// Residuals are measured as the largest absolute entry, relative to
/// `max(1, |P0|, |P1|)`. Ranks are counted as the singular values above 1/2,
/// which is exact for idempotents since their nonzero singular values are ≥ 1.
pub fn validate_projection_pair(p0: DMatrix<f64>, p1: DMatrix<f64>, tol: f64) -> Result<ProjectionPair> {
    if !p0.is_square() || p0.shape() != p1.shape() {
        return Err(Error::DimensionMismatch(format!(
            "P0 is {}x{}, P1 is {}x{}",
            p0.nrows(),
            p0.ncols(),
            p1.nrows(),
            p1.ncols()
        )));
    }
    let n = p0.nrows();
    if n == 0 {
        return Err(Error::InvalidInput("zero-dimensional projections".into()));
    }
    numkit::ensure_finite(&p0)?;
    numkit::ensure_finite(&p1)?;
    let scale = max_abs(&p0).max(max_abs(&p1)).max(1.0);

    for p in [&p0, &p1] {
        let residual = max_abs(&(p * p - p)) / scale;
        if residual > tol {
            return Err(Error::NotIdempotent { residual });
        }
    }
    let identity = DMatrix::<f64>::identity(n, n);
    let residual = max_abs(&(&p0 + &p1 - &identity)) / scale;
    if residual > tol {
        return Err(Error::NotComplementary { residual });
    }
    let residual = max_abs(&(&p0 * &p1)).max(max_abs(&(&p1 * &p0))) / scale;
    if residual > tol {
        return Err(Error::NotComplementary { residual });
    }

    let n0 = numkit::singular_values(&p0).iter().filter(|&&s| s > 0.5).count();
    let n1 = numkit::singular_values(&p1).iter().filter(|&&s| s > 0.5).count();
    if n0 + n1 != n {
        return Err(Error::NotComplementary { residual: (n0 + n1) as f64 - n as f64 });
    }
    if n0 == 0 || n0 == n {
        return Err(Error::Trivial { n0, n });
    }
    Ok(ProjectionPair { p0, p1, n0, n1 })
}

/// Adjoint with respect to the scalar product: `P† = H⁻¹PᵀH`.
pub fn h_adjoint(p: &DMatrix<f64>, space: &MetricSpace) -> DMatrix<f64> {
    space.h_inv() * p.transpose() * space.h().as_matrix()
}

/// Dual projections `P* = H P† H⁻¹` acting on covector components.
/// With `P† = H⁻¹PᵀH` this is `Pᵀ` for every `H`.
pub fn dual_projections(pair: &ProjectionPair, space: &MetricSpace) -> (DMatrix<f64>, DMatrix<f64>) {
    let dual = |p: &DMatrix<f64>| space.h().as_matrix() * h_adjoint(p, space) * space.h_inv();
    (dual(&pair.p0), dual(&pair.p1))
}

/// The four induced forms as full `n × n` matrices in an orthonormal basis.
#[derive(Debug, Clone)]
pub struct FullInducedMetrics {
    pub l0: SymMatrix,
    pub l1: SymMatrix,
    pub gamma0: SymMatrix,
    pub gamma1: SymMatrix,
}

/// `L_i = P_iᵀ G P_i` and `Γ_i = P_i G⁻¹ P_iᵀ`; only valid when `H = I`.
pub fn induced_metrics_full(pair: &ProjectionPair, space: &MetricSpace) -> Result<FullInducedMetrics> {
    if !space.h_is_identity() {
        return Err(Error::NonIdentityH);
    }
    check_dims(pair, space)?;
    let g = space.g().as_matrix();
    let gi = space.g_inv();
    let l = |p: &DMatrix<f64>| SymMatrix::new(p.transpose() * g * p);
    let gamma = |p: &DMatrix<f64>| SymMatrix::new(p * gi * p.transpose());
    Ok(FullInducedMetrics { l0: l(&pair.p0)?, l1: l(&pair.p1)?, gamma0: gamma(&pair.p0)?, gamma1: gamma(&pair.p1)? })
}

pub(crate) fn check_dims(pair: &ProjectionPair, space: &MetricSpace) -> Result<()> {
    if pair.dim() != space.dim() {
        return Err(Error::DimensionMismatch(format!(
            "projections act on dimension {}, space has dimension {}",
            pair.dim(),
            space.dim()
        )));
    }
    Ok(())
}

/// Singular values of `P0` and `P1` under the standard inner product.
#[derive(Debug, Clone)]
pub struct SvdDualityReport {
    pub singular_values0: Vec<f64>,
    pub singular_values1: Vec<f64>,
    pub norm0: f64,
    pub norm1: f64,
    pub comparison: SpectrumComparison,
    pub matched: bool,
}

/// Classic `G = H = I` statement: `‖P0‖ = ‖P1‖` and equal singular values
/// apart from the multiplicities of 0 and 1.
pub fn singular_value_duality(pair: &ProjectionPair, tol: f64) -> SvdDualityReport {
    let s0 = numkit::singular_values(&pair.p0);
    let s1 = numkit::singular_values(&pair.p1);
    let norm0 = s0.first().copied().unwrap_or(0.0);
    let norm1 = s1.first().copied().unwrap_or(0.0);
    let a = numkit::Spectrum::new(s0.clone(), DEFAULT_REL_TOL);
    let b = numkit::Spectrum::new(s1.clone(), DEFAULT_REL_TOL);
    let comparison = numkit::spectra_match(&a, &b, &[0.0, 1.0], tol);
    let norms_equal = (norm0 - norm1).abs() <= tol * norm0.max(norm1).max(1.0);
    let matched = comparison.matched && norms_equal;
    SvdDualityReport { singular_values0: s0, singular_values1: s1, norm0, norm1, comparison, matched }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn worked_pair_is_valid() {
        let (p0, p1, _) = fixtures::worked_projection_matrices();
        let pair = validate_projection_pair(p0, p1, 1e-10).unwrap();
        assert_eq!((pair.n0(), pair.n1()), (2, 2));
    }

    #[test]
    fn identity_pair_is_trivial() {
        let err = validate_projection_pair(DMatrix::identity(3, 3), DMatrix::zeros(3, 3), 1e-10).unwrap_err();
        assert_eq!(err, Error::Trivial { n0: 3, n: 3 });
        let err = validate_projection_pair(DMatrix::zeros(3, 3), DMatrix::identity(3, 3), 1e-10).unwrap_err();
        assert_eq!(err, Error::Trivial { n0: 0, n: 3 });
    }

    #[test]
    fn perturbed_pair_is_rejected() {
        let (mut p0, p1, _) = fixtures::worked_projection_matrices();
        p0[(1, 1)] += 1e-3;
        assert!(matches!(validate_projection_pair(p0, p1, 1e-10), Err(Error::NotIdempotent { .. })));
    }

    #[test]
    fn non_complementary_pair_is_rejected() {
        let (p0, _, _) = fixtures::worked_projection_matrices();
        let err = validate_projection_pair(p0.clone(), p0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::NotComplementary { .. }));
    }

    #[test]
    fn dual_projections_are_transposes() {
        let (p0, p1, g) = fixtures::worked_projection_matrices();
        let pair = validate_projection_pair(p0, p1, 1e-10).unwrap();
        let space = MetricSpace::with_metric(g).unwrap();
        let (d0, d1) = dual_projections(&pair, &space);
        assert!(max_abs(&(d0 - pair.p0().transpose())) < 1e-14);
        assert!(max_abs(&(d1 - pair.p1().transpose())) < 1e-14);
    }

    #[test]
    fn dual_of_orthogonal_projection_is_itself() {
        let p0 = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let p1 = DMatrix::identity(2, 2) - &p0;
        let pair = validate_projection_pair(p0, p1, 1e-12).unwrap();
        let space = MetricSpace::with_metric(SymMatrix::identity(2)).unwrap();
        let (d0, _) = dual_projections(&pair, &space);
        assert!(max_abs(&(d0 - pair.p0())) < 1e-15);
    }

    #[test]
    fn full_metrics_reproduce_worked_example() {
        let (p0, p1, g) = fixtures::worked_projection_matrices();
        let pair = validate_projection_pair(p0, p1, 1e-10).unwrap();
        let space = MetricSpace::with_metric(g).unwrap();
        let m = induced_metrics_full(&pair, &space).unwrap();
        let l0 = [[1.0, 1.0, 0.0, 0.0], [1.0, 4.0, 0.0, 3.0], [0.0; 4], [0.0, 3.0, 0.0, 3.0]];
        let gamma0 = [[5.0, 0.0, 2.0, 2.0], [0.0; 4], [2.0, 0.0, 5.0, 5.0], [2.0, 0.0, 5.0, 5.0]];
        let l1 = [[0.0; 4], [0.0, 4.0, -1.0, 1.0], [0.0, -1.0, 2.0, -2.0], [0.0, 1.0, -2.0, 2.0]];
        let gamma1 = [[2.0, -2.0, 3.0, 2.0], [-2.0, 2.0, -3.0, -2.0], [3.0, -3.0, 9.0, 3.0], [2.0, -2.0, 3.0, 2.0]];
        for i in 0..4 {
            for j in 0..4 {
                assert!((m.l0.as_matrix()[(i, j)] - l0[i][j]).abs() < 1e-12);
                assert!((m.l1.as_matrix()[(i, j)] - l1[i][j]).abs() < 1e-12);
                assert!((m.gamma0.as_matrix()[(i, j)] - gamma0[i][j] / 3.0).abs() < 1e-12);
                assert!((m.gamma1.as_matrix()[(i, j)] - gamma1[i][j] / 3.0).abs() < 1e-12);
            }
        }
        assert_eq!(numkit::rank(&m.l0, DEFAULT_REL_TOL), 2);
        assert_eq!(numkit::rank(&m.gamma1, DEFAULT_REL_TOL), 2);
    }

    #[test]
    fn full_metrics_need_identity_scalar_product() {
        let (p0, p1, g) = fixtures::worked_projection_matrices();
        let pair = validate_projection_pair(p0, p1, 1e-10).unwrap();
        let h = SymMatrix::from_diagonal(&[1.0, 2.0, 1.0, 1.0]).unwrap();
        let space = MetricSpace::new(h, g).unwrap();
        assert_eq!(induced_metrics_full(&pair, &space).unwrap_err(), Error::NonIdentityH);
    }

    #[test]
    fn orthogonal_projection_with_unit_metric() {
        let p0 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.0]));
        let p1 = DMatrix::identity(3, 3) - &p0;
        let pair = validate_projection_pair(p0.clone(), p1, 1e-12).unwrap();
        let space = MetricSpace::with_metric(SymMatrix::identity(3)).unwrap();
        let m = induced_metrics_full(&pair, &space).unwrap();
        assert!(max_abs(&(m.l0.as_matrix() - &p0)) < 1e-15);
        assert!(max_abs(&(m.gamma0.as_matrix() - &p0)) < 1e-15);
        let svd = singular_value_duality(&pair, 1e-9);
        assert!(svd.matched);
        assert!(svd.singular_values0.iter().all(|s| s.abs() < 1e-12 || (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn worked_pair_has_equal_norms() {
        let (p0, p1, _) = fixtures::worked_projection_matrices();
        let pair = validate_projection_pair(p0, p1, 1e-10).unwrap();
        let svd = singular_value_duality(&pair, 1e-9);
        assert!(svd.matched, "{}", svd.comparison.report);
        assert!((svd.norm0 - svd.norm1).abs() < 1e-12);
    }

    #[test]
    fn metric_space_rejects_indefinite_metric() {
        let g = SymMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        assert!(matches!(MetricSpace::with_metric(g), Err(Error::NotPositiveDefinite(_))));
    }
}
