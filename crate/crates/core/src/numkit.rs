//! Dense real matrix primitives shared by the rest of the crate.
//!
//! Everything here is a thin, deterministic layer over `nalgebra`: symmetric
//! eigendecomposition with a fixed ordering, the pseudodeterminant, PSD square
//! roots, characteristic polynomials via Faddeev–LeVerrier, and a tolerant
//! multiset comparison for spectra.

use std::cmp::Ordering;

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen};

use crate::error::{Error, Result};

/// Default relative cutoff used to classify eigenvalues and singular values as zero.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// A real symmetric matrix. Construction symmetrizes the input as `(a + aᵀ)/2`,
/// which is exactly symmetric in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
        }
        ensure_finite(&m)?;
        let sym = (&m + m.transpose()) * 0.5;
        Ok(Self(sym))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

impl AsRef<DMatrix<f64>> for SymMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Eigenvalues sorted in descending order together with the absolute cutoff
/// below which a value counts as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub zero_tol: f64,
}

impl Spectrum {
    /// Sorts `values` descending and derives the cutoff
    /// `rel_tol * dim * max|λ|` (floored at the smallest positive float).
    pub fn new(mut values: Vec<f64>, rel_tol: f64) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        let zero_tol = scaled_cutoff(&values, rel_tol);
        Self { values, zero_tol }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied().filter(move |v| v.abs() > self.zero_tol)
    }

    pub fn rank(&self) -> usize {
        self.nonzero().count()
    }

    /// Product of the eigenvalues above the zero cutoff; 1 for an empty product.
    pub fn pseudodet(&self) -> f64 {
        self.nonzero().product()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Appends `count` zero eigenvalues, keeping the order and the cutoff.
    pub fn padded_with_zeros(&self, count: usize) -> Self {
        let mut values = self.values.clone();
        values.extend(std::iter::repeat_n(0.0, count));
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        Self { values, zero_tol: self.zero_tol }
    }
}

fn scaled_cutoff(values: &[f64], rel_tol: f64) -> f64 {
    let max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    (rel_tol * values.len().max(1) as f64 * max).max(f64::MIN_POSITIVE)
}

/// Symmetric eigendecomposition: spectrum plus orthonormal eigenvectors as columns,
/// in the same order as `spectrum.values`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub spectrum: Spectrum,
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&self.spectrum.values));
        &self.vectors * lambda * self.vectors.transpose()
    }
}

pub fn sym_eig(a: &SymMatrix) -> SymEigen {
    sym_eig_with_tol(a, DEFAULT_REL_TOL)
}

/// Eigenvalues are ordered descending; every eigenvector is sign-normalized so
/// its first non-negligible component is positive, and exact ties are ordered
/// lexicographically by eigenvector.
pub fn sym_eig_with_tol(a: &SymMatrix, rel_tol: f64) -> SymEigen {
    let n = a.dim();
    if n == 0 {
        return SymEigen { spectrum: Spectrum::new(Vec::new(), rel_tol), vectors: DMatrix::zeros(0, 0) };
    }
    let eig = SymmetricEigen::new(a.as_matrix().clone());
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
                if first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            (eig.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|(la, va), (lb, vb)| {
        lb.partial_cmp(la).unwrap_or(Ordering::Equal).then_with(|| {
            va.iter()
                .zip(vb)
                .map(|(x, y)| y.partial_cmp(x).unwrap_or(Ordering::Equal))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    });
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, (_, v)) in pairs.iter().enumerate() {
        vectors.set_column(k, &DVector::from_column_slice(v));
    }
    SymEigen { spectrum: Spectrum::new(values, rel_tol), vectors }
}

pub fn spectrum(a: &SymMatrix) -> Spectrum {
    sym_eig(a).spectrum
}

/// Product of the eigenvalues with `|λ| > rel_tol · dim · max|λ|`.
/// Returns 1 (the empty product) for the zero-dimensional and the all-zero matrix.
pub fn pseudodet(a: &SymMatrix, rel_tol: f64) -> f64 {
    sym_eig_with_tol(a, rel_tol).spectrum.pseudodet()
}

pub fn rank(a: &SymMatrix, rel_tol: f64) -> usize {
    sym_eig_with_tol(a, rel_tol).spectrum.rank()
}

/// Unique symmetric PSD square root. Eigenvalues down to `-1e-10 · max|λ|` are
/// clamped to zero; anything more negative is rejected.
pub fn psd_sqrt(a: &SymMatrix) -> Result<SymMatrix> {
    spectral_map(a, |l| l.sqrt())
}

/// Inverse square root of a positive-definite matrix.
pub fn pd_inv_sqrt(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = sym_eig(a);
    if let Some(&min) = eig.spectrum.values.last() {
        if min <= eig.spectrum.zero_tol {
            return Err(Error::NotPositiveDefinite(format!("smallest eigenvalue {min:e}")));
        }
    }
    Ok(rebuild(&eig, |l| 1.0 / l.sqrt()))
}

fn spectral_map(a: &SymMatrix, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    let eig = sym_eig(a);
    let floor = -1e-10 * eig.spectrum.max_abs();
    if let Some(&min) = eig.spectrum.values.last() {
        if min < floor {
            return Err(Error::NotPsd { eigenvalue: min });
        }
    }
    Ok(rebuild(&eig, |l| f(l.max(0.0))))
}

fn rebuild(eig: &SymEigen, f: impl Fn(f64) -> f64) -> SymMatrix {
    let n = eig.vectors.nrows();
    let mut scaled = eig.vectors.clone();
    for (k, &l) in eig.spectrum.values.iter().enumerate() {
        let s = f(l);
        scaled.column_mut(k).scale_mut(s);
    }
    let m = if n == 0 { DMatrix::zeros(0, 0) } else { scaled * eig.vectors.transpose() };
    SymMatrix((&m + m.transpose()) * 0.5)
}

/// Monic characteristic polynomial, coefficients in descending powers:
/// `[1, c_{n-1}, …, c_0]` for `λⁿ + c_{n-1}λⁿ⁻¹ + … + c_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub coefficients: Vec<f64>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Expands `∏ (λ − rᵢ)`.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k] += ck;
                next[k + 1] -= r * ck;
            }
            c = next;
        }
        Self { coefficients: c }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Multiplies by `(λ − root)`.
    pub fn times_linear(&self, root: f64) -> Self {
        let mut other = Self::from_roots(&[root]);
        other.coefficients = poly_mul(&self.coefficients, &other.coefficients);
        other
    }

    /// Largest coefficient difference, scaled by `max(1, |coefficient|)`.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        if self.coefficients.len() != other.coefficients.len() {
            return f64::INFINITY;
        }
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1.0))
            .fold(0.0, f64::max)
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Faddeev–LeVerrier recurrence. Accepts any square matrix.
pub fn charpoly(a: &DMatrix<f64>) -> CharPoly {
    let n = a.nrows();
    let mut coefficients = vec![0.0; n + 1];
    coefficients[0] = 1.0;
    let mut m = DMatrix::<f64>::zeros(n, n);
    let identity = DMatrix::<f64>::identity(n, n);
    for k in 1..=n {
        m = a * &m + &identity * coefficients[k - 1];
        let am = a * &m;
        coefficients[k] = -am.trace() / k as f64;
    }
    CharPoly { coefficients }
}

/// Outcome of comparing two spectra up to a set of ignored values.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumComparison {
    pub matched: bool,
    pub kept_a: Vec<f64>,
    pub kept_b: Vec<f64>,
    pub max_diff: f64,
    pub report: String,
}

/// Compares the multisets of eigenvalues left after removing everything
/// within `tol` of a value in `ignore`. Distances are measured relative to
/// `max(1, |λ|)`, so `tol` acts as an absolute tolerance for small eigenvalues
/// and a relative one for large eigenvalues.
pub fn spectra_match(a: &Spectrum, b: &Spectrum, ignore: &[f64], tol: f64) -> SpectrumComparison {
    let keep = |s: &Spectrum| -> Vec<f64> {
        let mut v: Vec<f64> = s
            .values
            .iter()
            .copied()
            .filter(|&l| ignore.iter().all(|&z| (l - z).abs() > tol * l.abs().max(1.0)))
            .collect();
        v.sort_by(|x, y| y.partial_cmp(x).unwrap_or(Ordering::Equal));
        v
    };
    let kept_a = keep(a);
    let kept_b = keep(b);
    if kept_a.len() != kept_b.len() {
        let report = format!(
            "{} eigenvalues kept on the left, {} on the right: {:?} vs {:?}",
            kept_a.len(),
            kept_b.len(),
            kept_a,
            kept_b
        );
        return SpectrumComparison { matched: false, kept_a, kept_b, max_diff: f64::INFINITY, report };
    }
    let mut max_diff = 0.0_f64;
    let mut worst = None;
    for (i, (x, y)) in kept_a.iter().zip(&kept_b).enumerate() {
        let d = (x - y).abs() / x.abs().max(y.abs()).max(1.0);
        if d > max_diff {
            max_diff = d;
            worst = Some(i);
        }
    }
    let matched = max_diff <= tol;
    let report = match (matched, worst) {
        (true, _) | (false, None) => format!("{} shared eigenvalues, max scaled difference {max_diff:e}", kept_a.len()),
        (false, Some(i)) => format!("eigenvalue #{i} differs: {} vs {} (scaled {max_diff:e})", kept_a[i], kept_b[i]),
    };
    SpectrumComparison { matched, kept_a, kept_b, max_diff, report }
}

/// Pseudodeterminant of a general (non-symmetric) operator: the product of
/// its complex eigenvalues with modulus above `rel_tol · n · max|λ|`. The
/// imaginary part of the product must vanish to `1e-8` relative.
pub fn general_pseudodet(m: &DMatrix<f64>, rel_tol: f64) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("general_pseudodet needs a square matrix".into()));
    }
    ensure_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(1.0);
    }
    let eigs = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .map(|s| s.complex_eigenvalues())
        .ok_or_else(|| Error::InvalidInput("Schur iteration did not converge".into()))?;
    let max = eigs.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let cutoff = (rel_tol * n as f64 * max).max(f64::MIN_POSITIVE);
    let product = eigs.iter().filter(|z| z.norm() > cutoff).fold(Complex::new(1.0, 0.0), |acc, z| acc * z);
    if product.im.abs() > 1e-8 * product.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidInput(format!(
            "eigenvalue product has non-negligible imaginary part {:e}",
            product.im
        )));
    }
    Ok(product.re)
}

/// Determinant through LU factorization.
pub fn lu_det(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    m.clone().lu().determinant()
}

pub fn invert(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    if m.nrows() == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    m.clone().try_inverse().ok_or_else(|| Error::Singular(what.to_string()))
}

/// Singular values, sorted descending: the `min(r, c)` largest eigenvalues
/// of the symmetric `[[0, M], [Mᵀ, 0]]`, whose spectrum is `±σ` plus zeros.
/// nalgebra's bidiagonal SVD can return wrong values for rank-deficient
/// 2×2 blocks, so it is not used here.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Vec::new();
    }
    let mut jw = DMatrix::zeros(r + c, r + c);
    jw.view_mut((0, r), (r, c)).copy_from(m);
    jw.view_mut((r, 0), (c, r)).copy_from(&m.transpose());
    let mut s: Vec<f64> = SymmetricEigen::new(jw).eigenvalues.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    s.truncate(r.min(c));
    s.iter_mut().for_each(|x| *x = x.max(0.0));
    s
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest absolute row sum.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch("ragged rows".into()));
    }
    let m = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    ensure_finite(&m)?;
    Ok(m)
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn ensure_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("non-finite matrix entry".into()))
    }
}
