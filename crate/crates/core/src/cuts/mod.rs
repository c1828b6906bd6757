//! Bipartite cuts between parties, PPT/NPT classification, activation and the
//! cut-set lower bound on entanglement cost.
//!
//! Each qubit of a BCABE state belongs to its own party, so parties and qubits
//! share the same 1-based numbering.

mod activation;
pub mod certificate;
mod lp;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{build_family, FamilyLabel};
use crate::tensor::{hermitian_eigenvalues, partial_transpose, DensityMatrix, QubitSubset};

pub use activation::{
    activation_distill, correction_for, discover_correction, expected_residual, ActivationBranch, ActivationResult,
    ResidualCorrection, CORRECTION_TABLE,
};
pub use certificate::{cost_certificate, CertifiedRun, CostCertificate, CutJustification, EXACTNESS_TOL};
pub use lp::{lp_lower_bound, solve_covering, CoveringProgram, LowerBound, LpSolution};

/// A cut is NPT when the smallest partial-transpose eigenvalue lies below this.
pub const NPT_THRESHOLD: f64 = -1e-10;

/// Bipartition of parties `1..=n` with party 1 on side A.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    num_parties: usize,
    side_a: QubitSubset,
    side_b: QubitSubset,
}

impl Cut {
    /// Canonicalizes so that party 1 is on side A.
    pub fn new(side: QubitSubset, num_parties: usize) -> Result<Self> {
        side.check_range(num_parties)
            .map_err(|_| Error::InvalidCut(format!("{:?} exceeds {num_parties} parties", side.indices())))?;
        if side.is_empty() || side.len() == num_parties {
            return Err(Error::InvalidCut(format!(
                "side {:?} is not a proper nonempty subset of 1..={num_parties}",
                side.indices()
            )));
        }
        let other = side.complement(num_parties);
        let (side_a, side_b) = if side.contains(1) { (side, other) } else { (other, side) };
        Ok(Self {
            num_parties,
            side_a,
            side_b,
        })
    }

    /// The cut separating `party` from everyone else.
    pub fn one_vs_rest(party: usize, num_parties: usize) -> Result<Self> {
        Self::new(QubitSubset::single(party)?, num_parties)
    }

    pub fn num_parties(&self) -> usize {
        self.num_parties
    }

    pub fn side_a(&self) -> &QubitSubset {
        &self.side_a
    }

    pub fn side_b(&self) -> &QubitSubset {
        &self.side_b
    }

    pub fn smaller_side(&self) -> usize {
        self.side_a.len().min(self.side_b.len())
    }

    /// The lone party of a `1 : n-1` cut; otherwise the lowest party of side B.
    pub fn smaller_side_party(&self) -> usize {
        if self.side_a.len() == 1 {
            self.side_a.indices()[0]
        } else {
            self.side_b.indices()[0]
        }
    }

    /// Whether the pair `(i, j)` has one party on each side.
    pub fn crosses(&self, i: usize, j: usize) -> bool {
        self.side_a.contains(i) != self.side_a.contains(j)
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &QubitSubset| s.indices().iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}}:{{{}}}", join(&self.side_a), join(&self.side_b))
    }
}

impl Serialize for Cut {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Cut", 2)?;
        st.serialize_field("side_a", self.side_a.indices())?;
        st.serialize_field("side_b", self.side_b.indices())?;
        st.end()
    }
}

/// All canonical bipartitions, ordered by the size of side A and then
/// lexicographically. With `side_size`, keeps cuts where either side has that
/// many parties.
pub fn enumerate_cuts(num_parties: usize, side_size: Option<usize>) -> Result<Vec<Cut>> {
    if !(2..=crate::tensor::MAX_QUBITS).contains(&num_parties) {
        return Err(Error::InvalidSize(num_parties));
    }
    if let Some(k) = side_size {
        if k == 0 || k >= num_parties {
            return Err(Error::InvalidSideSize {
                side_size: k,
                num_parties,
            });
        }
    }
    let mut cuts = Vec::new();
    // Side A = {1} ∪ (subset of 2..=n) encoded by `mask`; the full set is excluded.
    for mask in 0..(1usize << (num_parties - 1)) - 1 {
        let mut side = vec![1];
        side.extend((2..=num_parties).filter(|p| mask & (1 << (p - 2)) != 0));
        let cut = Cut::new(QubitSubset::new(side)?, num_parties)?;
        if side_size.is_none_or(|k| cut.side_a.len() == k || cut.side_b.len() == k) {
            cuts.push(cut);
        }
    }
    cuts.sort_by(|x, y| (x.side_a.len(), x.side_a.indices()).cmp(&(y.side_a.len(), y.side_a.indices())));
    Ok(cuts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "PPT")]
    Ppt,
    #[serde(rename = "NPT")]
    Npt,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutReport {
    pub cut: Cut,
    pub min_pt_eigenvalue: f64,
    /// Sum of the moduli of the negative partial-transpose eigenvalues; zero for PPT cuts.
    pub negativity: f64,
    pub classification: Classification,
    /// `min_pt_eigenvalue - NPT_THRESHOLD`: negative for NPT cuts, and its
    /// modulus is the distance from the decision boundary.
    pub margin: f64,
}

/// Partial transpose over side A and its spectrum.
pub fn analyze_cut(rho: &DensityMatrix, cut: &Cut) -> Result<CutReport> {
    if cut.num_parties != rho.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: rho.num_qubits(),
            actual: cut.num_parties,
        });
    }
    let pt = partial_transpose(rho, &cut.side_a)?;
    let spectrum = hermitian_eigenvalues(&pt)?;
    let min = spectrum.first().copied().unwrap_or(0.0);
    let classification = if min < NPT_THRESHOLD {
        Classification::Npt
    } else {
        Classification::Ppt
    };
    let negativity = match classification {
        Classification::Ppt => 0.0,
        Classification::Npt => spectrum.iter().filter(|&&x| x < 0.0).map(|x| -x).sum(),
    };
    Ok(CutReport {
        cut: cut.clone(),
        min_pt_eigenvalue: min,
        negativity,
        classification,
        margin: min - NPT_THRESHOLD,
    })
}

/// Analyzes independent cuts in parallel; output order follows `cuts`.
pub fn analyze_cuts(rho: &DensityMatrix, cuts: &[Cut]) -> Result<Vec<CutReport>> {
    cuts.par_iter().map(|c| analyze_cut(rho, c)).collect()
}

/// Reports for every `1 : 2N-1` cut of a family.
pub fn npt_one_vs_rest_scan(two_n: usize, label: FamilyLabel) -> Result<Vec<CutReport>> {
    let rho = build_family(two_n, label)?;
    analyze_cuts(&rho, &enumerate_cuts(two_n, Some(1))?)
}

/// Nonnegative weights on unordered party pairs `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    num_parties: usize,
    weights: Vec<f64>,
}

impl EdgeWeights {
    pub fn zeros(num_parties: usize) -> Self {
        Self {
            num_parties,
            weights: vec![0.0; num_parties * num_parties.saturating_sub(1) / 2],
        }
    }

    /// Pairs in storage order: `(1,2), (1,3), ..., (n-1,n)`.
    pub fn pairs(num_parties: usize) -> impl Iterator<Item = (usize, usize)> {
        (1..=num_parties).flat_map(move |i| ((i + 1)..=num_parties).map(move |j| (i, j)))
    }

    fn slot(&self, i: usize, j: usize) -> Result<usize> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        if i == 0 || i == j || j > self.num_parties {
            return Err(Error::InvalidArgument(format!(
                "({i}, {j}) is not a pair of distinct parties in 1..={}",
                self.num_parties
            )));
        }
        let n = self.num_parties;
        // Pairs before row i, then offset within the row.
        Ok((i - 1) * (2 * n - i) / 2 + (j - i - 1))
    }

    pub fn num_parties(&self) -> usize {
        self.num_parties
    }

    pub fn get(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.weights[self.slot(i, j)?])
    }

    pub fn set(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        if w.is_nan() || w < 0.0 {
            return Err(Error::InvalidArgument(format!("edge weight {w} is negative")));
        }
        let k = self.slot(i, j)?;
        self.weights[k] = w;
        Ok(())
    }

    pub fn add(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        let cur = self.get(i, j)?;
        self.set(i, j, cur + w)
    }

    pub fn values(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Total weight on pairs crossing `cut`.
    pub fn crossing(&self, cut: &Cut) -> f64 {
        Self::pairs(self.num_parties)
            .zip(&self.weights)
            .filter(|((i, j), _)| cut.crosses(*i, *j))
            .map(|(_, w)| w)
            .sum()
    }

    /// Nonzero entries as `(i, j, weight)`.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        Self::pairs(self.num_parties)
            .zip(&self.weights)
            .filter(|(_, &w)| w != 0.0)
            .map(|((i, j), &w)| (i, j, w))
            .collect()
    }
}

impl Serialize for EdgeWeights {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EdgeWeights", 2)?;
        st.serialize_field("num_parties", &self.num_parties)?;
        st.serialize_field("weights", &self.entries())?;
        st.end()
    }
}

/// Per-cut ebit requirements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutConstraintSet {
    num_parties: usize,
    constraints: Vec<(Cut, f64)>,
}

impl CutConstraintSet {
    pub fn new(num_parties: usize) -> Self {
        Self {
            num_parties,
            constraints: Vec::new(),
        }
    }

    /// Every `1 : n-1` cut with requirement `ebits`.
    pub fn one_vs_rest(num_parties: usize, ebits: f64) -> Result<Self> {
        let mut set = Self::new(num_parties);
        for cut in enumerate_cuts(num_parties, Some(1))? {
            set.push(cut, ebits)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, cut: Cut, required_ebits: f64) -> Result<()> {
        if cut.num_parties != self.num_parties {
            return Err(Error::InvalidCut(format!(
                "cut over {} parties added to a {}-party constraint set",
                cut.num_parties, self.num_parties
            )));
        }
        if required_ebits.is_nan() || required_ebits < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "requirement {required_ebits} is negative"
            )));
        }
        self.constraints.push((cut, required_ebits));
        Ok(())
    }

    pub fn num_parties(&self) -> usize {
        self.num_parties
    }

    pub fn constraints(&self) -> &[(Cut, f64)] {
        &self.constraints
    }

    pub fn is_satisfied_by(&self, w: &EdgeWeights, tol: f64) -> bool {
        self.constraints.iter().all(|(c, r)| w.crossing(c) >= r - tol)
    }
}
