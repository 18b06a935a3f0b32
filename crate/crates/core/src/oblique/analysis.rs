use super::natural::{natural_basis, MetricBlocks};
use super::projection::{MetricSpace, ProjectionPair};
use super::theorems::{
    bridge_matrices, k_sigma_forms, theorem1_operator_oracle, verify_theorem1, verify_theorem2, BridgeMatrices,
    KSigmaForms, PseudodetSet, Theorem1Report, Theorem2Report,
};
use crate::error::{Error, Result};

/// Everything computed for one pair: blocks, both theorem reports, the
/// partner forms and the bridge matrices.
#[derive(Debug, Clone)]
pub struct PairAnalysis {
    pub blocks: MetricBlocks,
    pub multi_residuals: [f64; 4],
    pub theorem1: Theorem1Report,
    /// Pseudodeterminants from the full-space operators, when a pair is known.
    pub oracle: Option<Result<PseudodetSet, Error>>,
    pub forms: KSigmaForms,
    pub bridge: BridgeMatrices,
    pub theorem2: Theorem2Report,
}

impl PairAnalysis {
    pub fn pass(&self) -> bool {
        self.theorem1.pass && self.theorem2.pass
    }

    /// Largest relative deviation between the block and operator pseudodeterminants.
    pub fn oracle_error(&self) -> Option<f64> {
        let o = self.oracle.as_ref()?.as_ref().ok()?;
        let b = &self.theorem1.pseudodets;
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE);
        Some(
            [rel(b.l0, o.l0), rel(b.l1, o.l1), rel(b.gamma0, o.gamma0), rel(b.gamma1, o.gamma1), rel(b.g, o.g)]
                .into_iter()
                .fold(0.0, f64::max),
        )
    }
}

/// Natural basis, blocks and both theorem checks for a certified pair.
pub fn analyze_pair(pair: &ProjectionPair, space: &MetricSpace, tol: f64, rel_tol: f64) -> Result<PairAnalysis> {
    let nb = natural_basis(pair, space)?;
    let blocks = MetricBlocks::from_natural(&nb, space)?;
    let mut analysis = analyze_blocks(blocks, space, tol, rel_tol)?;
    analysis.oracle = Some(theorem1_operator_oracle(pair, space, rel_tol));
    Ok(analysis)
}

/// Theorem checks on blocks read in any adapted basis.
pub fn analyze_blocks(blocks: MetricBlocks, space: &MetricSpace, tol: f64, rel_tol: f64) -> Result<PairAnalysis> {
    let multi_residuals = blocks.multi_residuals()?;
    let theorem1 = verify_theorem1(&blocks, space, tol);
    let forms = k_sigma_forms(&blocks)?;
    let bridge = bridge_matrices(&blocks, rel_tol)?;
    let theorem2 = verify_theorem2(&forms, &bridge, tol);
    Ok(PairAnalysis { blocks, multi_residuals, theorem1, oracle: None, forms, bridge, theorem2 })
}
