use nalgebra::{DMatrix, DVector};

use super::projection::{check_dims, MetricSpace, ProjectionPair};
use super::COMPLEMENTARITY_MARGIN;
use crate::error::{Error, Result};
use crate::numkit::{self, max_abs, SymMatrix};

/// Bases of the two ranges, each orthonormal with respect to `H`, together
/// with their cross-Gram block `Ω = VᵀHW`.
#[derive(Debug, Clone)]
pub struct NaturalBasis {
    pub v: DMatrix<f64>,
    pub w: DMatrix<f64>,
    pub omega: DMatrix<f64>,
}

impl NaturalBasis {
    pub fn n0(&self) -> usize {
        self.v.ncols()
    }

    pub fn n1(&self) -> usize {
        self.w.ncols()
    }

    /// Re-expresses both subspaces in rotated orthonormal frames `V·q0`, `W·q1`.
    pub fn rotated(&self, q0: &DMatrix<f64>, q1: &DMatrix<f64>, space: &MetricSpace) -> Result<Self> {
        for (q, k) in [(q0, self.n0()), (q1, self.n1())] {
            if q.shape() != (k, k) || max_abs(&(q.transpose() * q - DMatrix::identity(k, k))) > 1e-10 {
                return Err(Error::InvalidInput("rotation must be orthogonal and match the subspace".into()));
            }
        }
        let v = &self.v * q0;
        let w = &self.w * q1;
        let omega = v.transpose() * space.h().as_matrix() * &w;
        Ok(Self { v, w, omega })
    }
}

/// Builds the natural basis by column-pivoted modified Gram–Schmidt in the
/// `H` inner product over the columns of `P0` and `P1`.
pub fn natural_basis(pair: &ProjectionPair, space: &MetricSpace) -> Result<NaturalBasis> {
    check_dims(pair, space)?;
    let h = space.h().as_matrix();
    let v = h_orthonormal_span(pair.p0(), h, pair.n0())?;
    let w = h_orthonormal_span(pair.p1(), h, pair.n1())?;
    let omega = v.transpose() * h * &w;
    let sigma_max = numkit::singular_values(&omega).first().copied().unwrap_or(0.0);
    if sigma_max >= 1.0 - COMPLEMENTARITY_MARGIN {
        return Err(Error::NearlyParallel { sigma_max });
    }
    Ok(NaturalBasis { v, w, omega })
}

fn h_orthonormal_span(cols: &DMatrix<f64>, h: &DMatrix<f64>, expected: usize) -> Result<DMatrix<f64>> {
    let n = cols.nrows();
    let h_dot = |a: &DVector<f64>, b: &DVector<f64>| a.dot(&(h * b));
    let mut residual: Vec<DVector<f64>> = cols.column_iter().map(|c| c.into_owned()).collect();
    let scale = residual.iter().map(|r| h_dot(r, r).max(0.0).sqrt()).fold(0.0, f64::max);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(expected);
    while basis.len() < expected {
        let (k, norm) = residual
            .iter()
            .enumerate()
            .map(|(k, r)| (k, h_dot(r, r).max(0.0).sqrt()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if norm <= 1e-9 * scale || scale == 0.0 {
            return Err(Error::DegenerateSubspace { found: basis.len(), expected });
        }
        let mut q = &residual[k] / norm;
        // second pass keeps the basis orthonormal to working precision
        for b in &basis {
            let c = h_dot(b, &q);
            q -= b * c;
        }
        let qn = h_dot(&q, &q).sqrt();
        q /= qn;
        for r in residual.iter_mut() {
            let c = h_dot(&q, r);
            *r -= &q * c;
        }
        basis.push(q);
    }
    let mut out = DMatrix::zeros(n, expected);
    for (j, b) in basis.iter().enumerate() {
        out.set_column(j, b);
    }
    Ok(out)
}

/// Blocks of the metric and of its inverse over an adapted basis `U = [V | W]`.
///
/// The dual blocks are read off `(UᵀGU)⁻¹`; the Schur-complement identities
/// linking the two sets are then checked by [`MetricBlocks::multi_residuals`].
#[derive(Debug, Clone)]
pub struct MetricBlocks {
    pub l0: SymMatrix,
    pub l1: SymMatrix,
    /// `WᵀGV`, `n1 × n0`.
    pub v_off: DMatrix<f64>,
    pub gamma0: SymMatrix,
    pub gamma1: SymMatrix,
    /// Lower-left block of `(UᵀGU)⁻¹`, `n1 × n0`.
    pub lambda_off: DMatrix<f64>,
    /// `VᵀHW`, `n0 × n1`.
    pub omega: DMatrix<f64>,
    pub h00: SymMatrix,
    pub h11: SymMatrix,
    pub basis_v: DMatrix<f64>,
    pub basis_w: DMatrix<f64>,
    natural: bool,
}

impl MetricBlocks {
    pub fn from_natural(nb: &NaturalBasis, space: &MetricSpace) -> Result<Self> {
        let mut blocks = Self::from_adapted(&nb.v, &nb.w, space)?;
        blocks.natural = true;
        Ok(blocks)
    }

    /// Blocks over an arbitrary adapted basis; columns of `v` must span the
    /// first subspace and columns of `w` the second.
    pub fn from_adapted(v: &DMatrix<f64>, w: &DMatrix<f64>, space: &MetricSpace) -> Result<Self> {
        let n = space.dim();
        let (n0, n1) = (v.ncols(), w.ncols());
        if v.nrows() != n || w.nrows() != n || n0 + n1 != n {
            return Err(Error::DimensionMismatch(format!(
                "adapted basis {}x{} + {}x{} does not match dimension {n}",
                v.nrows(),
                n0,
                w.nrows(),
                n1
            )));
        }
        let mut u = DMatrix::zeros(n, n);
        u.view_mut((0, 0), (n, n0)).copy_from(v);
        u.view_mut((0, n0), (n, n1)).copy_from(w);
        let gram_g = u.transpose() * space.g().as_matrix() * &u;
        let gram_h = u.transpose() * space.h().as_matrix() * &u;
        let inv = numkit::invert(&gram_g, "G Gram").map_err(|_| Error::SingularGram)?;
        if numkit::lu_det(&gram_h).abs() <= f64::MIN_POSITIVE || !inv.iter().all(|x| x.is_finite()) {
            return Err(Error::SingularGram);
        }
        let block = |m: &DMatrix<f64>, r: usize, c: usize, nr: usize, nc: usize| m.view((r, c), (nr, nc)).into_owned();

        let blocks = Self {
            l0: SymMatrix::new(block(&gram_g, 0, 0, n0, n0))?,
            l1: SymMatrix::new(block(&gram_g, n0, n0, n1, n1))?,
            v_off: block(&gram_g, n0, 0, n1, n0),
            gamma0: SymMatrix::new(block(&inv, 0, 0, n0, n0))?,
            gamma1: SymMatrix::new(block(&inv, n0, n0, n1, n1))?,
            lambda_off: block(&inv, n0, 0, n1, n0),
            omega: block(&gram_h, 0, n0, n0, n1),
            h00: SymMatrix::new(block(&gram_h, 0, 0, n0, n0))?,
            h11: SymMatrix::new(block(&gram_h, n0, n0, n1, n1))?,
            basis_v: v.clone(),
            basis_w: w.clone(),
            natural: false,
        };
        for (m, name) in [(&blocks.l0, "L0"), (&blocks.l1, "L1"), (&blocks.gamma0, "Γ0"), (&blocks.gamma1, "Γ1")] {
            let s = numkit::spectrum(m);
            if let Some(&min) = s.values.last() {
                if min <= 0.0 {
                    return Err(Error::NotPositiveDefinite(format!("block {name} has eigenvalue {min:e}")));
                }
            }
        }
        Ok(blocks)
    }

    pub fn n0(&self) -> usize {
        self.l0.dim()
    }

    pub fn n1(&self) -> usize {
        self.l1.dim()
    }

    /// Whether the blocks were read in an `H`-orthonormal (natural) basis.
    pub fn is_natural(&self) -> bool {
        self.natural
    }

    /// Relative residuals of the four Schur-complement identities
    /// `Γ0⁻¹ = L0 − V_offᵀL1⁻¹V_off`, `Γ1⁻¹ = L1 − V_off L0⁻¹ V_offᵀ`,
    /// `L0⁻¹ = Γ0 − ΛᵀΓ1⁻¹Λ`, `L1⁻¹ = Γ1 − ΛΓ0⁻¹Λᵀ`.
    pub fn multi_residuals(&self) -> Result<[f64; 4]> {
        let inv = |m: &SymMatrix, name: &str| numkit::invert(m.as_matrix(), name);
        let (l0, l1, g0, g1) =
            (self.l0.as_matrix(), self.l1.as_matrix(), self.gamma0.as_matrix(), self.gamma1.as_matrix());
        let (l0i, l1i, g0i, g1i) =
            (inv(&self.l0, "L0")?, inv(&self.l1, "L1")?, inv(&self.gamma0, "Γ0")?, inv(&self.gamma1, "Γ1")?);
        let v = &self.v_off;
        let lam = &self.lambda_off;
        let rel = |lhs: &DMatrix<f64>, rhs: DMatrix<f64>| max_abs(&(lhs - rhs)) / max_abs(lhs).max(1.0);
        Ok([
            rel(&g0i, l0 - v.transpose() * &l1i * v),
            rel(&g1i, l1 - v * &l0i * v.transpose()),
            rel(&l0i, g0 - lam.transpose() * &g1i * lam),
            rel(&l1i, g1 - lam * &g0i * lam.transpose()),
        ])
    }
}
