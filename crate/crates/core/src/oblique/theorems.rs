use nalgebra::DMatrix;

use super::natural::MetricBlocks;
use super::projection::{check_dims, MetricSpace, ProjectionPair};
use crate::error::Result;
use crate::numkit::{self, max_abs, spectra_match, Spectrum, SpectrumComparison, SymMatrix};

/// The four partner forms, one per induced metric, as block matrices.
#[derive(Debug, Clone)]
pub struct KSigmaForms {
    pub k0: SymMatrix,
    pub k1: SymMatrix,
    pub sigma0: SymMatrix,
    pub sigma1: SymMatrix,
}

impl KSigmaForms {
    pub fn n0(&self) -> usize {
        self.k0.dim()
    }

    pub fn n1(&self) -> usize {
        self.k1.dim()
    }

    /// Spectra of the forms on the whole space, in the order `K0, K1, Σ0, Σ1`.
    /// A form living on one subspace vanishes on the other, which contributes
    /// zeros to its spectrum.
    pub fn full_spectra(&self, rel_tol: f64) -> [Spectrum; 4] {
        let (n0, n1) = (self.n0(), self.n1());
        let s = |m: &SymMatrix, pad: usize| numkit::sym_eig_with_tol(m, rel_tol).spectrum.padded_with_zeros(pad);
        [s(&self.k0, n1), s(&self.k1, n0), s(&self.sigma0, n1), s(&self.sigma1, n0)]
    }
}

/// `K0 = Γ0^½ L0 Γ0^½`, `K1 = Γ1^½ L1 Γ1^½`, `Σ0 = L0^½ Γ0 L0^½`, `Σ1 = L1^½ Γ1 L1^½`.
///
/// The text's definition of `Σ0` and `Σ1` gives both the same right-hand side;
/// the matrix forms above are the ones consistent with the rest of the theory.
pub fn k_sigma_forms(blocks: &MetricBlocks) -> Result<KSigmaForms> {
    let sandwich = |outer: &SymMatrix, inner: &SymMatrix| -> Result<SymMatrix> {
        let r = numkit::psd_sqrt(outer)?;
        SymMatrix::new(r.as_matrix() * inner.as_matrix() * r.as_matrix())
    };
    Ok(KSigmaForms {
        k0: sandwich(&blocks.gamma0, &blocks.l0)?,
        k1: sandwich(&blocks.gamma1, &blocks.l1)?,
        sigma0: sandwich(&blocks.l0, &blocks.gamma0)?,
        sigma1: sandwich(&blocks.l1, &blocks.gamma1)?,
    })
}

/// Bridge matrices linking the partner forms.
///
/// `b = Γ1^½ V_off L0^-½` (`n1 × n0`) and `d = L1^½ Λ Γ0^-½` (`n1 × n0`), so
/// that `K0 = I + dᵀd`, `Σ1 = I + ddᵀ`, `K1 = I + bbᵀ`, `Σ0 = I + bᵀb`.
/// Rows of `d` are indexed by the second subspace and columns by the first,
/// matching `D_{μ,α}` on graphs.
#[derive(Debug, Clone)]
pub struct BridgeMatrices {
    pub b: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub rel_tol: f64,
    /// `‖B0 + B1ᵀ‖` and `‖D1 + D0ᵀ‖`, the two antisymmetry relations.
    pub antisymmetry_residuals: [f64; 2],
    /// `ddᵀ` against `M⁻¹ bbᵀ M` with `M = Γ1^½ L1^½`, relative.
    pub similarity_residual: f64,
    /// Residuals of `K0 = I + dᵀd`, `Σ1 = I + ddᵀ`, `K1 = I + bbᵀ`, `Σ0 = I + bᵀb`,
    /// relative to `max(1, ‖form‖)`.
    pub closed_form_residuals: [f64; 4],
}

impl BridgeMatrices {
    pub fn n0(&self) -> usize {
        self.d.ncols()
    }

    pub fn n1(&self) -> usize {
        self.d.nrows()
    }

    pub fn max_residual(&self) -> f64 {
        self.antisymmetry_residuals
            .iter()
            .chain(&self.closed_form_residuals)
            .chain(std::iter::once(&self.similarity_residual))
            .fold(0.0, |m, &r| m.max(r))
    }
}

pub fn bridge_matrices(blocks: &MetricBlocks, rel_tol: f64) -> Result<BridgeMatrices> {
    let forms = k_sigma_forms(blocks)?;
    let sqrt = |m: &SymMatrix| numkit::psd_sqrt(m).map(SymMatrix::into_matrix);
    let inv_sqrt = |m: &SymMatrix| numkit::pd_inv_sqrt(m).map(SymMatrix::into_matrix);
    let (l0h, l0ih) = (sqrt(&blocks.l0)?, inv_sqrt(&blocks.l0)?);
    let (l1h, l1ih) = (sqrt(&blocks.l1)?, inv_sqrt(&blocks.l1)?);
    let (g0h, g0ih) = (sqrt(&blocks.gamma0)?, inv_sqrt(&blocks.gamma0)?);
    let (g1h, g1ih) = (sqrt(&blocks.gamma1)?, inv_sqrt(&blocks.gamma1)?);
    let v = &blocks.v_off;
    let lam = &blocks.lambda_off;

    let b0 = &g1h * v * &l0ih;
    let b1 = &l0h * lam.transpose() * &g1ih;
    let d0 = &g0h * v.transpose() * &l1ih;
    let d1 = &l1h * lam * &g0ih;
    let rel = |r: DMatrix<f64>, scale: f64| max_abs(&r) / scale.max(1.0);
    let antisymmetry_residuals = [rel(&b0 + b1.transpose(), max_abs(&b0)), rel(&d1 + d0.transpose(), max_abs(&d1))];

    let (b, d) = (b0, d1);
    let m = &g1h * &l1h;
    let m_inv = numkit::invert(&m, "Γ1^½ L1^½")?;
    let ddt = &d * d.transpose();
    let similarity_residual = rel(&ddt - &m_inv * (&b * b.transpose()) * &m, max_abs(&ddt));

    let closed = |form: &SymMatrix, product: DMatrix<f64>| {
        let k = form.dim();
        rel(form.as_matrix() - DMatrix::identity(k, k) - product, max_abs(form.as_matrix()))
    };
    let closed_form_residuals = [
        closed(&forms.k0, d.transpose() * &d),
        closed(&forms.sigma1, &d * d.transpose()),
        closed(&forms.k1, &b * b.transpose()),
        closed(&forms.sigma0, b.transpose() * &b),
    ];

    let singular_values = numkit::singular_values(&d);
    let rank = bridge_rank(&singular_values, d.nrows().max(d.ncols()), rel_tol);
    Ok(BridgeMatrices {
        b,
        d,
        rank,
        singular_values,
        rel_tol,
        antisymmetry_residuals,
        similarity_residual,
        closed_form_residuals,
    })
}

/// Counts singular values whose square clears `rel_tol · dim · max(1, s_max²)`.
/// The squares are what show up as eigenvalues `1 + s²` of the partner forms,
/// hence the unit floor.
fn bridge_rank(singular_values: &[f64], dim: usize, rel_tol: f64) -> usize {
    let smax2 = singular_values.first().map_or(0.0, |s| s * s);
    let cutoff = rel_tol * dim.max(1) as f64 * smax2.max(1.0);
    singular_values.iter().filter(|s| *s * *s > cutoff).count()
}

/// Pseudodeterminants of the four induced metrics and of the metric itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudodetSet {
    pub l0: f64,
    pub l1: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub g: f64,
}

impl PseudodetSet {
    /// `(det₊L1 / det₊Γ0, det₊L0 / det₊Γ1)`.
    pub fn ratios(&self) -> (f64, f64) {
        (self.l1 / self.gamma0, self.l0 / self.gamma1)
    }
}

#[derive(Debug, Clone)]
pub struct Theorem1Report {
    pub pseudodets: PseudodetSet,
    pub lhs1: f64,
    pub lhs2: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Theorem1Report {
    /// Largest relative deviation of either ratio from `det₊G`.
    pub fn max_rel_error(&self) -> f64 {
        let scale = self.rhs.abs().max(f64::MIN_POSITIVE);
        ((self.lhs1 - self.rhs).abs() / scale).max((self.lhs2 - self.rhs).abs() / scale)
    }
}

/// Pseudodeterminants through block determinants.
///
/// In an adapted basis with `H`-Gram blocks `h00, h01, h11`:
/// `det₊L0 = det L0 / det(h00 − h01 h11⁻¹ h10)`, `det₊L1 = det L1 / det(h11 − h10 h00⁻¹ h01)`,
/// `det₊Γ0 = det Γ0 · det h00`, `det₊Γ1 = det Γ1 · det h11`.
/// In the natural basis these are `det L0 / det(I − ΩΩᵀ)`, `det L1 / det(I − ΩᵀΩ)`,
/// `det Γ0` and `det Γ1`.
pub fn verify_theorem1(blocks: &MetricBlocks, space: &MetricSpace, tol: f64) -> Theorem1Report {
    let omega = &blocks.omega;
    let (s00, s11) = if blocks.is_natural() {
        let (n0, n1) = (blocks.n0(), blocks.n1());
        (DMatrix::identity(n0, n0) - omega * omega.transpose(), DMatrix::identity(n1, n1) - omega.transpose() * omega)
    } else {
        let h00 = blocks.h00.as_matrix();
        let h11 = blocks.h11.as_matrix();
        let h00_inv =
            numkit::invert(h00, "h00").unwrap_or_else(|_| DMatrix::from_element(h00.nrows(), h00.ncols(), f64::NAN));
        let h11_inv =
            numkit::invert(h11, "h11").unwrap_or_else(|_| DMatrix::from_element(h11.nrows(), h11.ncols(), f64::NAN));
        (h00 - omega * h11_inv * omega.transpose(), h11 - omega.transpose() * h00_inv * omega)
    };
    let det = |m: &DMatrix<f64>| numkit::lu_det(m);
    let (h00_det, h11_det) =
        if blocks.is_natural() { (1.0, 1.0) } else { (det(blocks.h00.as_matrix()), det(blocks.h11.as_matrix())) };
    let pseudodets = PseudodetSet {
        l0: det(blocks.l0.as_matrix()) / det(&s00),
        l1: det(blocks.l1.as_matrix()) / det(&s11),
        gamma0: det(blocks.gamma0.as_matrix()) * h00_det,
        gamma1: det(blocks.gamma1.as_matrix()) * h11_det,
        g: space.det_plus_g(),
    };
    let (lhs1, lhs2) = pseudodets.ratios();
    let rhs = pseudodets.g;
    let within = |x: f64| (x - rhs).abs() <= tol * rhs.abs();
    Theorem1Report { pseudodets, lhs1, lhs2, rhs, pass: within(lhs1) && within(lhs2) }
}

/// Pseudodeterminants from the full-space operators `H⁻¹P0ᵀGP0`, `H⁻¹P1ᵀGP1`,
/// `P0G⁻¹P0ᵀH`, `P1G⁻¹P1ᵀH` and `H⁻¹G`, via their complex eigenvalues.
pub fn theorem1_operator_oracle(pair: &ProjectionPair, space: &MetricSpace, rel_tol: f64) -> Result<PseudodetSet> {
    check_dims(pair, space)?;
    let h = space.h().as_matrix();
    let g = space.g().as_matrix();
    let primal = |p: &DMatrix<f64>| space.h_inv() * p.transpose() * g * p;
    let dual = |p: &DMatrix<f64>| p * space.g_inv() * p.transpose() * h;
    let pd = |m: DMatrix<f64>| numkit::general_pseudodet(&m, rel_tol);
    Ok(PseudodetSet {
        l0: pd(primal(pair.p0()))?,
        l1: pd(primal(pair.p1()))?,
        gamma0: pd(dual(pair.p0()))?,
        gamma1: pd(dual(pair.p1()))?,
        g: pd(space.metric_operator())?,
    })
}

/// Eigenvalue counts of one partner form on the whole space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormMultiplicity {
    pub name: &'static str,
    pub above_one: usize,
    pub one: usize,
    pub zero: usize,
    /// Expected `(above_one, one, zero)` from the rank of the bridge matrix.
    pub expected: (usize, usize, usize),
}

impl FormMultiplicity {
    pub fn consistent(&self) -> bool {
        (self.above_one, self.one, self.zero) == self.expected
    }
}

#[derive(Debug, Clone)]
pub struct Theorem2Report {
    /// Full-space spectra of `K0, K1, Σ0, Σ1`.
    pub spectra: [Spectrum; 4],
    pub comparisons: Vec<(String, SpectrumComparison)>,
    pub matched: bool,
    pub min_nonzero: Option<f64>,
    pub rank: usize,
    pub multiplicities: [FormMultiplicity; 4],
    pub multiplicity_ok: bool,
    pub pass: bool,
}

const FORM_NAMES: [&str; 4] = ["K0", "K1", "Sigma0", "Sigma1"];

/// Checks that the four partner forms share their spectrum outside `{0, 1}`,
/// that every nonzero eigenvalue is at least `1 − tol`, and that the counts of
/// eigenvalues above one, equal to one and equal to zero follow from the rank
/// of the bridge matrix.
pub fn verify_theorem2(forms: &KSigmaForms, bridge: &BridgeMatrices, tol: f64) -> Theorem2Report {
    let spectra = forms.full_spectra(bridge.rel_tol);
    let mut comparisons = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            let c = spectra_match(&spectra[i], &spectra[j], &[0.0, 1.0], tol);
            comparisons.push((format!("{}~{}", FORM_NAMES[i], FORM_NAMES[j]), c));
        }
    }
    let matched = comparisons.iter().all(|(_, c)| c.matched);
    let min_nonzero = spectra.iter().flat_map(|s| s.nonzero()).reduce(f64::min);
    let min_ok = min_nonzero.is_none_or(|m| m >= 1.0 - tol);

    let (n0, n1, r) = (forms.n0(), forms.n1(), bridge.rank);
    let expected = [(r, n0 - r.min(n0), n1), (r, n1 - r.min(n1), n0), (r, n0 - r.min(n0), n1), (r, n1 - r.min(n1), n0)];
    let multiplicities: [FormMultiplicity; 4] =
        std::array::from_fn(|k| classify(FORM_NAMES[k], &spectra[k], n0.max(n1), bridge.rel_tol, expected[k]));
    let multiplicity_ok = multiplicities.iter().all(FormMultiplicity::consistent);
    Theorem2Report {
        spectra,
        comparisons,
        matched,
        min_nonzero,
        rank: r,
        pass: matched && min_ok && multiplicity_ok,
        multiplicities,
        multiplicity_ok,
    }
}

fn classify(
    name: &'static str,
    s: &Spectrum,
    dim: usize,
    rel_tol: f64,
    expected: (usize, usize, usize),
) -> FormMultiplicity {
    let top = s.values.first().map_or(0.0, |&l| l - 1.0);
    let one_cutoff = rel_tol * dim.max(1) as f64 * top.max(1.0);
    let (mut above_one, mut one, mut zero) = (0, 0, 0);
    for &l in &s.values {
        if l.abs() <= s.zero_tol {
            zero += 1;
        } else if (l - 1.0).abs() <= one_cutoff {
            one += 1;
        } else if l > 1.0 {
            above_one += 1;
        }
    }
    FormMultiplicity { name, above_one, one, zero, expected }
}
