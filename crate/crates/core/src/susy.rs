//! Supercharge and Hamiltonian built from the bridge matrix `D`.
//!
//! On the direct sum of the two subspaces, `𝒬 = [[0, 0], [D, 0]]` is
//! nilpotent and `{𝒬, 𝒬ᵀ} = diag(DᵀD, DDᵀ) = diag(K0 − I, Σ1 − I)`, so the
//! two diagonal blocks of `ℋ` share their nonzero spectrum.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numkit::{self, max_abs, SymMatrix};
use crate::oblique::{BridgeMatrices, KSigmaForms};

/// Which partner form fills the upper block of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HamiltonianBlocks {
    /// `diag(K0 − I, Σ1 − I)`, which the algebra requires.
    #[default]
    K0Sigma1,
    /// `diag(K1 − I, Σ1 − I)`, as the text writes it. Only defined when the
    /// two subspaces have equal dimension, and it does not satisfy the algebra
    /// in general.
    K1Sigma1,
}

impl FromStr for HamiltonianBlocks {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k0" | "K0" => Ok(Self::K0Sigma1),
            "k1" | "K1" => Ok(Self::K1Sigma1),
            other => Err(Error::Parse(format!("unknown Hamiltonian block choice {other:?}"))),
        }
    }
}

impl fmt::Display for HamiltonianBlocks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::K0Sigma1 => "K0",
            Self::K1Sigma1 => "K1",
        })
    }
}

/// Max-entry residuals of the algebra relations, each divided by the size of
/// the products involved: `max(1, |ℋ||𝒬|)` for commutators, `max(1, |𝒬|²)`
/// for `{𝒬, 𝒬}`, and `max(1, |ℋ|)` for relations against `ℋ`. Rounding in
/// the products scales with those magnitudes, which reach `1e6` for nearly
/// parallel subspaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusyResiduals {
    /// `[ℋ, 𝒬]`.
    pub h_q: f64,
    /// `[ℋ, 𝒬ᵀ]`.
    pub h_qt: f64,
    /// `{𝒬, 𝒬}`.
    pub q_q: f64,
    /// `{𝒬ᵀ, 𝒬ᵀ}`.
    pub qt_qt: f64,
    /// `{𝒬, 𝒬ᵀ} − ℋ`.
    pub anticommutator: f64,
    /// `𝒬₊² − ℋ` with `𝒬₊ = 𝒬 + 𝒬ᵀ`.
    pub q_plus: f64,
    /// `𝒬₋² − ℋ` with `𝒬₋ = i(𝒬 − 𝒬ᵀ)`, i.e. `−(𝒬 − 𝒬ᵀ)² − ℋ`.
    pub q_minus: f64,
    /// Largest unscaled residual over all relations.
    pub absolute: f64,
}

impl SusyResiduals {
    pub fn max(&self) -> f64 {
        [self.h_q, self.h_qt, self.q_q, self.qt_qt, self.anticommutator, self.q_plus, self.q_minus]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct SusyPair {
    pub hamiltonian: SymMatrix,
    pub supercharge: DMatrix<f64>,
    pub blocks: HamiltonianBlocks,
    pub n0: usize,
    pub n1: usize,
    pub residuals: SusyResiduals,
    rel_tol: f64,
}

/// Assembles `ℋ` and `𝒬` and checks the scaled algebra residuals against `tol`.
pub fn build_susy(
    bridge: &BridgeMatrices,
    forms: &KSigmaForms,
    blocks: HamiltonianBlocks,
    tol: f64,
) -> Result<SusyPair> {
    let (n0, n1) = (bridge.n0(), bridge.n1());
    let top = match blocks {
        HamiltonianBlocks::K0Sigma1 => &forms.k0,
        HamiltonianBlocks::K1Sigma1 => &forms.k1,
    };
    if top.dim() != n0 || forms.sigma1.dim() != n1 {
        return Err(Error::DimensionMismatch(format!(
            "upper block is {}x{} but the first subspace has dimension {n0}",
            top.dim(),
            top.dim()
        )));
    }
    let n = n0 + n1;
    let mut h = DMatrix::zeros(n, n);
    h.view_mut((0, 0), (n0, n0)).copy_from(&(top.as_matrix() - DMatrix::identity(n0, n0)));
    h.view_mut((n0, n0), (n1, n1)).copy_from(&(forms.sigma1.as_matrix() - DMatrix::identity(n1, n1)));
    let mut q = DMatrix::zeros(n, n);
    q.view_mut((n0, 0), (n1, n0)).copy_from(&bridge.d);

    let qt = q.transpose();
    let plus = &q + &qt;
    let minus = &q - &qt;
    let (hn, qn) = (max_abs(&h), max_abs(&q));
    let raw = [
        max_abs(&(&h * &q - &q * &h)),
        max_abs(&(&h * &qt - &qt * &h)),
        max_abs(&(&q * &q * 2.0)),
        max_abs(&(&qt * &qt * 2.0)),
        max_abs(&(&q * &qt + &qt * &q - &h)),
        max_abs(&(&plus * &plus - &h)),
        max_abs(&(-(&minus * &minus) - &h)),
    ];
    let (comm, nil, diag) = ((hn * qn).max(1.0), (qn * qn).max(1.0), hn.max(1.0));
    let residuals = SusyResiduals {
        h_q: raw[0] / comm,
        h_qt: raw[1] / comm,
        q_q: raw[2] / nil,
        qt_qt: raw[3] / nil,
        anticommutator: raw[4] / diag,
        q_plus: raw[5] / diag,
        q_minus: raw[6] / diag,
        absolute: raw.into_iter().fold(0.0, f64::max),
    };
    let residual = residuals.max();
    if residual > tol || !residual.is_finite() {
        return Err(Error::AlgebraViolation { residual });
    }
    Ok(SusyPair { hamiltonian: SymMatrix::new(h)?, supercharge: q, blocks, n0, n1, residuals, rel_tol: bridge.rel_tol })
}

#[derive(Debug, Clone)]
pub struct GroundStates {
    /// Orthonormal columns spanning the kernel of `ℋ`.
    pub basis: DMatrix<f64>,
    pub dimension: usize,
    /// Kernel vectors concentrated on the first / second subspace.
    pub split: (usize, usize),
}

/// Kernel of `ℋ`. Eigenvalues of `ℋ` are squared singular values of `D`, so
/// the cutoff is `rel_tol · dim · max(1, λ_max)`, the same as for the rank of `D`.
pub fn ground_states(pair: &SusyPair) -> GroundStates {
    let n = pair.n0 + pair.n1;
    let eig = numkit::sym_eig(&pair.hamiltonian);
    let top = eig.spectrum.values.first().copied().unwrap_or(0.0);
    let cutoff = pair.rel_tol * n.max(1) as f64 * top.max(1.0);
    let idx: Vec<usize> = (0..n).filter(|&i| eig.spectrum.values[i].abs() <= cutoff).collect();
    let mut basis = DMatrix::zeros(n, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        basis.set_column(k, &eig.vectors.column(i));
    }
    let upper = basis.columns(0, idx.len()).row_iter().take(pair.n0).map(|r| r.norm_squared()).sum::<f64>();
    let split = (upper.round() as usize, idx.len() - upper.round() as usize);
    GroundStates { dimension: idx.len(), basis, split }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graphcycles::{cycle_cocycle_basis, graph_metric_blocks, spanning_tree};
    use crate::oblique::{
        bridge_matrices, k_sigma_forms, natural_basis, validate_projection_pair, MetricBlocks, MetricSpace,
    };

    fn graph_pair(weights: &[f64]) -> (BridgeMatrices, KSigmaForms) {
        let g = fixtures::worked_graph(weights);
        let basis = cycle_cocycle_basis(&g, &spanning_tree(&g).unwrap());
        let (_, blocks) = graph_metric_blocks(&g, &basis).unwrap();
        (bridge_matrices(&blocks, 1e-10).unwrap(), k_sigma_forms(&blocks).unwrap())
    }

    #[test]
    fn unit_graph_hamiltonian() {
        let (bridge, forms) = graph_pair(&[1.0; 5]);
        let pair = build_susy(&bridge, &forms, HamiltonianBlocks::default(), 1e-10).unwrap();
        let spec = numkit::spectrum(&pair.hamiltonian).values;
        let expected = [3.0, 3.0, 1.0, 1.0, 0.0];
        assert!(spec.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12), "{spec:?}");
        let gs = ground_states(&pair);
        assert_eq!(gs.dimension, 1);
        assert_eq!(gs.split, (0, 1));
    }

    #[test]
    fn printed_variant_fails_on_shape() {
        let (bridge, forms) = graph_pair(&[1.0; 5]);
        assert!(matches!(
            build_susy(&bridge, &forms, HamiltonianBlocks::K1Sigma1, 1e-10),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn printed_variant_violates_algebra_on_square_blocks() {
        let (p0, p1, g) = fixtures::worked_projection_matrices();
        let pair = validate_projection_pair(p0, p1, 1e-10).unwrap();
        let space = MetricSpace::with_metric(g).unwrap();
        let blocks = MetricBlocks::from_natural(&natural_basis(&pair, &space).unwrap(), &space).unwrap();
        let bridge = bridge_matrices(&blocks, 1e-10).unwrap();
        let forms = k_sigma_forms(&blocks).unwrap();
        assert!(build_susy(&bridge, &forms, HamiltonianBlocks::K0Sigma1, 1e-10).is_ok());
        assert!(matches!(
            build_susy(&bridge, &forms, HamiltonianBlocks::K1Sigma1, 1e-10),
            Err(Error::AlgebraViolation { .. })
        ));
    }

    #[test]
    fn zero_bridge_gives_zero_hamiltonian() {
        let p0 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0]));
        let p1 = DMatrix::identity(3, 3) - &p0;
        let pair = validate_projection_pair(p0, p1, 1e-12).unwrap();
        let space = MetricSpace::with_metric(SymMatrix::identity(3)).unwrap();
        let blocks = MetricBlocks::from_natural(&natural_basis(&pair, &space).unwrap(), &space).unwrap();
        let bridge = bridge_matrices(&blocks, 1e-10).unwrap();
        let forms = k_sigma_forms(&blocks).unwrap();
        let susy = build_susy(&bridge, &forms, HamiltonianBlocks::K0Sigma1, 1e-10).unwrap();
        assert!(max_abs(susy.hamiltonian.as_matrix()) < 1e-15);
        assert_eq!(susy.residuals.max(), 0.0);
        assert_eq!(ground_states(&susy).dimension, 3);
    }
}
