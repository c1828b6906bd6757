//! Activation: `2N-2` parties measure jointly which smaller family their
//! qubits belong to, leaving the two excluded parties with a known Bell pair
//! that one local Pauli turns into `Φ+`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::{build_family, family_support, recursion_terms, BellLabel, FamilyLabel};
use crate::tensor::{
    apply_unitary_on_subset, fidelity_with_pure, partial_trace, project_and_renormalize, CMatrix, DensityMatrix, Pauli,
    QubitSubset,
};

/// Pauli correction applied to the lower-numbered residual qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ResidualCorrection {
    Identity,
    Z,
    X,
    /// `X` first, then `Z`.
    ZX,
}

impl ResidualCorrection {
    pub const ALL: [ResidualCorrection; 4] = [Self::Identity, Self::Z, Self::X, Self::ZX];

    pub fn matrix(self) -> CMatrix {
        match self {
            Self::Identity => Pauli::I.matrix(),
            Self::Z => Pauli::Z.matrix(),
            Self::X => Pauli::X.matrix(),
            Self::ZX => Pauli::Z.matrix() * Pauli::X.matrix(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Identity => "I",
            Self::Z => "Z",
            Self::X => "X",
            Self::ZX => "ZX",
        }
    }
}

/// Correction taking each residual Bell state to `Φ+` up to global phase.
/// Validated against [`discover_correction`] in the tests.
pub const CORRECTION_TABLE: [(BellLabel, ResidualCorrection); 4] = [
    (BellLabel::PhiPlus, ResidualCorrection::Identity),
    (BellLabel::PhiMinus, ResidualCorrection::Z),
    (BellLabel::PsiPlus, ResidualCorrection::X),
    (BellLabel::PsiMinus, ResidualCorrection::ZX),
];

pub fn correction_for(residual: BellLabel) -> ResidualCorrection {
    CORRECTION_TABLE
        .iter()
        .find(|(b, _)| *b == residual)
        .map(|(_, c)| *c)
        .expect("table covers every Bell state")
}

/// Searches the four corrections for one mapping `residual` onto `Φ+`.
pub fn discover_correction(residual: BellLabel) -> Option<ResidualCorrection> {
    let target = BellLabel::PhiPlus.state();
    let first = QubitSubset::single(1).expect("qubit 1");
    ResidualCorrection::ALL.into_iter().find(|c| {
        let corrected = apply_unitary_on_subset(&residual.projector(), &c.matrix(), &first).expect("2 qubits");
        fidelity_with_pure(&corrected, &target).is_ok_and(|f| (1.0 - f).abs() < 1e-12)
    })
}

/// Bell state left on the residual pair of `target` when the measuring
/// parties find `outcome`.
pub fn expected_residual(target: FamilyLabel, outcome: FamilyLabel) -> BellLabel {
    recursion_terms(target)
        .into_iter()
        .find(|(_, fam)| *fam == outcome)
        .map(|(bell, _)| bell)
        .expect("each outcome appears once in the recursion")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivationBranch {
    pub outcome: FamilyLabel,
    pub probability: f64,
    pub residual: BellLabel,
    pub correction: ResidualCorrection,
    /// Fidelity of the uncorrected residual with the expected Bell state.
    pub residual_fidelity: f64,
    /// Fidelity of the corrected residual with `Φ+`.
    pub fidelity: f64,
    #[serde(skip)]
    pub corrected_state: DensityMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivationResult {
    pub two_n: usize,
    pub label: FamilyLabel,
    pub together: Vec<usize>,
    pub residual_pair: (usize, usize),
    pub branches: Vec<ActivationBranch>,
}

impl ActivationResult {
    pub fn min_fidelity(&self) -> f64 {
        self.branches.iter().map(|b| b.fidelity).fold(1.0, f64::min)
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Every outcome has probability 1/4 and every corrected residual is `Φ+`,
    /// both within `tol`.
    pub fn is_perfect(&self, tol: f64) -> bool {
        self.branches.len() == 4
            && self
                .branches
                .iter()
                .all(|b| (b.probability - 0.25).abs() <= tol && (1.0 - b.fidelity).abs() <= tol)
    }
}

/// Runs the activation measurement on `together` and corrects the residual pair.
pub fn activation_distill(two_n: usize, label: FamilyLabel, together: &QubitSubset) -> Result<ActivationResult> {
    let rho = build_family(two_n, label)?;
    together.check_range(two_n)?;
    if together.len() + 2 != two_n {
        return Err(Error::InvalidArgument(format!(
            "{} parties measure together; activation needs {}",
            together.len(),
            two_n - 2
        )));
    }
    let rest = together.complement(two_n);
    let (a, b) = (rest.indices()[0], rest.indices()[1]);
    let phi_plus = BellLabel::PhiPlus.state();
    let first = QubitSubset::single(1)?;

    let mut branches = Vec::with_capacity(4);
    for outcome in FamilyLabel::ALL {
        let p = family_support(two_n - 2, outcome)?.embed(together, two_n)?;
        let (post, probability) = match project_and_renormalize(&rho, &p) {
            Ok(v) => v,
            Err(Error::ZeroProbabilityBranch(_)) => continue,
            Err(e) => return Err(e),
        };
        let residual_state = partial_trace(&post, together)?;
        let residual = expected_residual(label, outcome);
        let correction = correction_for(residual);
        let corrected_state = apply_unitary_on_subset(&residual_state, &correction.matrix(), &first)?;
        branches.push(ActivationBranch {
            outcome,
            probability,
            residual,
            correction,
            residual_fidelity: fidelity_with_pure(&residual_state, &residual.state())?,
            fidelity: fidelity_with_pure(&corrected_state, &phi_plus)?,
            corrected_state,
        });
    }
    Ok(ActivationResult {
        two_n,
        label,
        together: together.indices().to_vec(),
        residual_pair: (a, b),
        branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn table_matches_search() {
        for (bell, corr) in CORRECTION_TABLE {
            assert_eq!(discover_correction(bell), Some(corr), "{bell}");
        }
    }

    #[test]
    fn smolin_activation_on_last_two() {
        let r = activation_distill(4, FamilyLabel::RhoPlus, &QubitSubset::new(vec![3, 4]).unwrap()).unwrap();
        assert_eq!(r.residual_pair, (1, 2));
        assert_eq!(r.branches.len(), 4);
        for b in &r.branches {
            assert_abs_diff_eq!(b.probability, 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(b.residual_fidelity, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(b.fidelity, 1.0, epsilon = 1e-12);
        }
        let by_outcome: Vec<_> = r.branches.iter().map(|b| (b.outcome, b.correction)).collect();
        assert_eq!(
            by_outcome,
            vec![
                (FamilyLabel::RhoPlus, ResidualCorrection::Identity),
                (FamilyLabel::RhoMinus, ResidualCorrection::Z),
                (FamilyLabel::SigmaPlus, ResidualCorrection::X),
                (FamilyLabel::SigmaMinus, ResidualCorrection::ZX),
            ]
        );
    }

    #[test]
    fn every_family_and_residual_pair_at_four() {
        for label in FamilyLabel::ALL {
            for i in 1..=4 {
                for j in (i + 1)..=4 {
                    let together = QubitSubset::new((1..=4).filter(|&q| q != i && q != j).collect()).unwrap();
                    let r = activation_distill(4, label, &together).unwrap();
                    assert!(r.is_perfect(1e-12), "{label} residual ({i},{j})");
                    assert_abs_diff_eq!(r.total_probability(), 1.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn six_qubits() {
        let together = QubitSubset::new(vec![3, 4, 5, 6]).unwrap();
        for label in FamilyLabel::ALL {
            assert!(activation_distill(6, label, &together).unwrap().is_perfect(1e-12));
        }
    }

    #[test]
    fn wrong_group_size() {
        let err = activation_distill(6, FamilyLabel::RhoPlus, &QubitSubset::new(vec![3, 4]).unwrap());
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }
}
