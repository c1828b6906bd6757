//! Pairs the cut-set lower bound with the ebits a simulated protocol spends.

use serde::Serialize;

use super::{
    activation_distill, lp_lower_bound, npt_one_vs_rest_scan, Classification, Cut, CutConstraintSet, EdgeWeights,
};
use crate::error::Result;
use crate::locc::{ebit_accounting, locc_audit, prepare_bcabe, Preparation, ProtocolMode};
use crate::states::FamilyLabel;
use crate::tensor::{QubitSubset, STATE_TOL};

/// Bound and achieved cost are equal when they agree within this.
pub const EXACTNESS_TOL: f64 = 1e-9;

/// Why a `1 : 2N-1` cut demands one ebit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutJustification {
    pub cut: Cut,
    pub classification: Classification,
    pub min_pt_eigenvalue: f64,
    pub negativity: f64,
    /// Pair left out of the joint measurement; contains the isolated party.
    pub residual_pair: (usize, usize),
    pub activation_min_fidelity: f64,
    pub activation_perfect: bool,
    pub required_ebits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostCertificate {
    pub two_n: usize,
    pub label: FamilyLabel,
    pub lower_bound: f64,
    pub achieved: f64,
    pub exact: bool,
    pub witness_weights: EdgeWeights,
    /// SHA-256 of the first branch transcript.
    pub protocol_transcript_id: String,
    pub audit_passed: bool,
    /// Trace distance between the prepared and the target state.
    pub state_distance: f64,
    pub mode: ProtocolMode,
}

#[derive(Debug, Clone)]
pub struct CertifiedRun {
    pub certificate: CostCertificate,
    pub justifications: Vec<CutJustification>,
    pub preparation: Preparation,
}

pub fn cost_certificate(two_n: usize, label: FamilyLabel, mode: ProtocolMode) -> Result<CertifiedRun> {
    let mut constraints = CutConstraintSet::new(two_n);
    let mut justifications = Vec::with_capacity(two_n);
    for report in npt_one_vs_rest_scan(two_n, label)? {
        let party = report.cut.smaller_side_party();
        // The isolated party and its singlet partner stay out of the measurement.
        let partner = if party % 2 == 1 { party + 1 } else { party - 1 };
        let together = QubitSubset::new((1..=two_n).filter(|&q| q != party && q != partner).collect())?;
        let activation = activation_distill(two_n, label, &together)?;
        let perfect = activation.is_perfect(STATE_TOL);
        let justified = report.classification == Classification::Npt && perfect;
        let required_ebits = if justified { 1.0 } else { 0.0 };
        constraints.push(report.cut.clone(), required_ebits)?;
        justifications.push(CutJustification {
            cut: report.cut,
            classification: report.classification,
            min_pt_eigenvalue: report.min_pt_eigenvalue,
            negativity: report.negativity,
            residual_pair: activation.residual_pair,
            activation_min_fidelity: activation.min_fidelity(),
            activation_perfect: perfect,
            required_ebits,
        });
    }
    let bound = lp_lower_bound(&constraints)?;

    let preparation = prepare_bcabe(two_n, label, mode)?;
    let mut achieved = 0usize;
    let mut audit_passed = true;
    for t in &preparation.transcripts {
        achieved = achieved.max(ebit_accounting(t)?.total);
        audit_passed &= locc_audit(t).passed();
    }
    let achieved = achieved as f64;
    let certificate = CostCertificate {
        two_n,
        label,
        lower_bound: bound.value,
        achieved,
        exact: (bound.value - achieved).abs() < EXACTNESS_TOL,
        witness_weights: bound.witness,
        protocol_transcript_id: preparation.transcripts.first().map(|t| t.digest()).unwrap_or_default(),
        audit_passed,
        state_distance: preparation.distance_to_target()?,
        mode,
    };
    Ok(CertifiedRun {
        certificate,
        justifications,
        preparation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smolin_certificate() {
        let run = cost_certificate(4, FamilyLabel::RhoPlus, ProtocolMode::Exact).unwrap();
        let c = &run.certificate;
        assert_eq!(c.lower_bound.round(), 2.0);
        assert_eq!(c.achieved, 2.0);
        assert!(c.exact && c.audit_passed);
        assert!(c.state_distance < 1e-12);
        assert_eq!(run.justifications.len(), 4);
        assert!(run.justifications.iter().all(|j| j.required_ebits == 1.0));
        for j in &run.justifications {
            let party = j.cut.smaller_side_party();
            let (a, b) = j.residual_pair;
            assert!(a == party || b == party);
            assert_eq!(a.div_ceil(2), b.div_ceil(2), "residual pair shares a singlet");
        }
        assert_eq!(c.protocol_transcript_id.len(), 64);
    }
}
