//! Parity bit strings, the GHZ (cat) basis and the four BCABE families
//! `rho±` and `sigma±`.
//!
//! A `2N`-qubit family is the uniform mixture of the `2^(2N-2)` GHZ projectors
//! `(|s> ± |s̄>)/√2` whose canonical string `s` starts with `0` and has an even
//! (`rho`) or odd (`sigma`) number of zeros. For `2N = 2` the families reduce to
//! the Bell projectors, which is the base case of the two-qubit recursion.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{
    apply_unitary_on_subset, qubit_bit, tensor_product, trace_distance, CMatrix, CVector, DensityMatrix, Pauli,
    Projector, PureState, QubitSubset, MAX_QUBITS, STATE_TOL,
};

/// Weights at or below this are dropped from Bell-tuple decompositions.
pub const BELL_WEIGHT_CUTOFF: f64 = 1e-12;

fn check_even_size(two_n: usize, min: usize) -> Result<()> {
    if two_n < min || !two_n.is_multiple_of(2) || two_n > MAX_QUBITS {
        return Err(Error::InvalidSize(two_n));
    }
    Ok(())
}

/// Bit string of even length `2N >= 2`; index 0 is qubit 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisString {
    bits: Vec<bool>,
}

impl BasisString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.len() < 2 || !bits.len().is_multiple_of(2) {
            return Err(Error::InvalidBitString(format!(
                "length {} is not even and >= 2",
                bits.len()
            )));
        }
        Ok(Self { bits })
    }

    /// The `len`-bit string whose binary value is `index` (qubit 1 first).
    pub fn from_index(index: usize, len: usize) -> Result<Self> {
        let bits = (0..len).map(|k| index & (1 << (len - 1 - k)) != 0).collect();
        Self::new(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn first_bit(&self) -> bool {
        self.bits[0]
    }

    pub fn zero_count(&self) -> usize {
        self.bits.iter().filter(|b| !**b).count()
    }

    /// Computational-basis index, qubit 1 most significant.
    pub fn index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BasisString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBitString(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

/// Bitwise complement.
pub fn complement(s: &BasisString) -> BasisString {
    s.complement()
}

/// Which parity family a canonical string belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StringFamily {
    /// Even number of zeros.
    P,
    /// Odd number of zeros.
    Q,
}

/// Canonical (first bit 0) strings of the given parity family, lexicographic.
pub fn enumerate_parity_strings(two_n: usize, family: StringFamily) -> Result<Vec<BasisString>> {
    check_even_size(two_n, 4)?;
    Ok(parity_strings(two_n, family))
}

fn parity_strings(two_n: usize, family: StringFamily) -> Vec<BasisString> {
    let want_even = family == StringFamily::P;
    // First bit fixed to 0: the canonical half of the index range.
    (0..1usize << (two_n - 1))
        .map(|i| BasisString::from_index(i, two_n).expect("two_n is even"))
        .filter(|s| (s.zero_count() % 2 == 0) == want_even)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The four BCABE families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyLabel {
    #[serde(rename = "rho+")]
    RhoPlus,
    #[serde(rename = "rho-")]
    RhoMinus,
    #[serde(rename = "sigma+")]
    SigmaPlus,
    #[serde(rename = "sigma-")]
    SigmaMinus,
}

impl FamilyLabel {
    pub const ALL: [FamilyLabel; 4] = [
        FamilyLabel::RhoPlus,
        FamilyLabel::RhoMinus,
        FamilyLabel::SigmaPlus,
        FamilyLabel::SigmaMinus,
    ];

    pub fn string_family(self) -> StringFamily {
        match self {
            FamilyLabel::RhoPlus | FamilyLabel::RhoMinus => StringFamily::P,
            FamilyLabel::SigmaPlus | FamilyLabel::SigmaMinus => StringFamily::Q,
        }
    }

    pub fn sign(self) -> Sign {
        match self {
            FamilyLabel::RhoPlus | FamilyLabel::SigmaPlus => Sign::Plus,
            FamilyLabel::RhoMinus | FamilyLabel::SigmaMinus => Sign::Minus,
        }
    }

    pub fn from_parts(family: StringFamily, sign: Sign) -> Self {
        match (family, sign) {
            (StringFamily::P, Sign::Plus) => FamilyLabel::RhoPlus,
            (StringFamily::P, Sign::Minus) => FamilyLabel::RhoMinus,
            (StringFamily::Q, Sign::Plus) => FamilyLabel::SigmaPlus,
            (StringFamily::Q, Sign::Minus) => FamilyLabel::SigmaMinus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyLabel::RhoPlus => "rho+",
            FamilyLabel::RhoMinus => "rho-",
            FamilyLabel::SigmaPlus => "sigma+",
            FamilyLabel::SigmaMinus => "sigma-",
        }
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family {s:?}")))
    }
}

/// The two-qubit Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellLabel {
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    /// Two bits `(psi, minus)` as read from a random tape.
    pub fn from_bits(psi: bool, minus: bool) -> Self {
        BellLabel::ALL[2 * usize::from(psi) + usize::from(minus)]
    }

    pub fn to_bits(self) -> (bool, bool) {
        let i = self as usize;
        (i & 2 != 0, i & 1 != 0)
    }

    /// Amplitude of `|b1 b2>`.
    pub fn amplitude(self, b1: bool, b2: bool) -> f64 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match (self, b1, b2) {
            (BellLabel::PhiPlus | BellLabel::PhiMinus, false, false) => h,
            (BellLabel::PhiPlus, true, true) => h,
            (BellLabel::PhiMinus, true, true) => -h,
            (BellLabel::PsiPlus | BellLabel::PsiMinus, false, true) => h,
            (BellLabel::PsiPlus, true, false) => h,
            (BellLabel::PsiMinus, true, false) => -h,
            _ => 0.0,
        }
    }

    pub fn state(self) -> PureState {
        let amps = [(false, false), (false, true), (true, false), (true, true)]
            .map(|(a, b)| Complex64::new(self.amplitude(a, b), 0.0));
        PureState::from_vector(CVector::from_column_slice(&amps)).expect("Bell states are normalized")
    }

    pub fn projector(self) -> DensityMatrix {
        self.state().projector()
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `(|base> ± |complement(base)>)/√2` with `base` starting with 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzBasisState {
    base: BasisString,
    sign: Sign,
    state: PureState,
}

impl GhzBasisState {
    pub fn base(&self) -> &BasisString {
        &self.base
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }
}

pub fn ghz_state(base: &BasisString, sign: Sign) -> Result<GhzBasisState> {
    if base.first_bit() {
        return Err(Error::NonCanonicalBase(base.to_string()));
    }
    if base.len() > MAX_QUBITS {
        return Err(Error::TooManyQubits(base.len()));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = CVector::zeros(1 << base.len());
    v[base.index()] = Complex64::new(h, 0.0);
    v[base.complement().index()] = Complex64::new(sign.value() * h, 0.0);
    Ok(GhzBasisState {
        base: base.clone(),
        sign,
        state: PureState::from_vector(v)?,
    })
}

/// All `2^(2N)` GHZ basis states: both string families, both signs.
pub fn ghz_basis(two_n: usize) -> Result<Vec<GhzBasisState>> {
    check_even_size(two_n, 2)?;
    let mut out = Vec::with_capacity(1 << two_n);
    for label in FamilyLabel::ALL {
        for s in parity_strings(two_n, label.string_family()) {
            out.push(ghz_state(&s, label.sign())?);
        }
    }
    Ok(out)
}

/// Uniform mixture of the family's GHZ projectors.
pub fn build_family(two_n: usize, label: FamilyLabel) -> Result<DensityMatrix> {
    check_even_size(two_n, 2)?;
    let strings = parity_strings(two_n, label.string_family());
    let w = 1.0 / strings.len() as f64;
    let dim = 1usize << two_n;
    let mut m = CMatrix::zeros(dim, dim);
    let half = Complex64::new(0.5 * w, 0.0);
    let cross = half * label.sign().value();
    for s in &strings {
        let (i, j) = (s.index(), s.complement().index());
        m[(i, i)] += half;
        m[(j, j)] += half;
        m[(i, j)] += cross;
        m[(j, i)] += cross;
    }
    DensityMatrix::new(m)
}

/// Projector onto the support of a family.
pub fn family_support(two_n: usize, label: FamilyLabel) -> Result<Projector> {
    check_even_size(two_n, 2)?;
    let states: Vec<PureState> = parity_strings(two_n, label.string_family())
        .iter()
        .map(|s| ghz_state(s, label.sign()).map(|g| g.state))
        .collect::<Result<_>>()?;
    Projector::onto_span(&states)
}

/// Four-qubit state assembled from Bell-pair products:
/// `1/4 Σ_b [b]_{12} ⊗ [b]_{34}` over the four Bell states.
pub fn smolin_state() -> DensityMatrix {
    let parts: Vec<DensityMatrix> = BellLabel::ALL
        .iter()
        .map(|b| tensor_product(&b.projector(), &b.projector()).expect("4 qubits"))
        .collect();
    DensityMatrix::mixture(parts.iter().map(|p| (0.25, p))).expect("equal dimensions")
}

/// Where the Bell pair sits in the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPlacement {
    /// Qubits 1 and 2.
    Leading,
    /// Qubits `2N-1` and `2N`.
    Trailing,
}

/// Terms `(Bell pair, smaller family)` of the two-qubit recursion, each with
/// weight 1/4.
pub fn recursion_terms(target: FamilyLabel) -> [(BellLabel, FamilyLabel); 4] {
    use BellLabel::*;
    use FamilyLabel::*;
    match target {
        RhoPlus => [
            (PhiPlus, RhoPlus),
            (PhiMinus, RhoMinus),
            (PsiPlus, SigmaPlus),
            (PsiMinus, SigmaMinus),
        ],
        RhoMinus => [
            (PhiPlus, RhoMinus),
            (PhiMinus, RhoPlus),
            (PsiPlus, SigmaMinus),
            (PsiMinus, SigmaPlus),
        ],
        SigmaPlus => [
            (PsiPlus, RhoPlus),
            (PsiMinus, RhoMinus),
            (PhiPlus, SigmaPlus),
            (PhiMinus, SigmaMinus),
        ],
        SigmaMinus => [
            (PsiPlus, RhoMinus),
            (PsiMinus, RhoPlus),
            (PhiPlus, SigmaMinus),
            (PhiMinus, SigmaPlus),
        ],
    }
}

/// Right-hand side of the recursion for `target` on `two_n` qubits.
pub fn recursion_rhs(two_n: usize, target: FamilyLabel, placement: PairPlacement) -> Result<DensityMatrix> {
    check_even_size(two_n, 4)?;
    let parts = recursion_terms(target)
        .into_iter()
        .map(|(bell, fam)| {
            let pair = bell.projector();
            let rest = build_family(two_n - 2, fam)?;
            match placement {
                PairPlacement::Leading => tensor_product(&pair, &rest),
                PairPlacement::Trailing => tensor_product(&rest, &pair),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    DensityMatrix::mixture(parts.iter().map(|p| (0.25, p)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursionCheck {
    pub family: FamilyLabel,
    pub placement: PairPlacement,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursionReport {
    pub two_n: usize,
    pub checks: Vec<RecursionCheck>,
}

impl RecursionReport {
    pub fn max_distance(&self) -> f64 {
        self.checks.iter().map(|c| c.distance).fold(0.0, f64::max)
    }
}

/// Trace distance between each directly built family and its recursive
/// assembly, for both placements of the Bell pair (8 checks).
pub fn verify_recursion(two_n: usize) -> Result<RecursionReport> {
    check_even_size(two_n, 4)?;
    let mut checks = Vec::with_capacity(8);
    for family in FamilyLabel::ALL {
        let direct = build_family(two_n, family)?;
        for placement in [PairPlacement::Leading, PairPlacement::Trailing] {
            let rhs = recursion_rhs(two_n, family, placement)?;
            checks.push(RecursionCheck {
                family,
                placement,
                distance: trace_distance(&direct, &rhs)?,
            });
        }
    }
    Ok(RecursionReport { two_n, checks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PauliConnection {
    pub qubit: usize,
    pub pauli: Pauli,
}

/// First single-qubit Pauli conjugation (lowest qubit, then X, Y, Z) mapping
/// family `a` onto family `b`.
pub fn pauli_connection_search(a: FamilyLabel, b: FamilyLabel, two_n: usize) -> Result<Option<PauliConnection>> {
    if a == b {
        return Err(Error::InvalidArgument("source and target families coincide".into()));
    }
    check_even_size(two_n, 2)?;
    let source = build_family(two_n, a)?;
    let target = build_family(two_n, b)?;
    for qubit in 1..=two_n {
        let subset = QubitSubset::single(qubit)?;
        for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
            let mapped = apply_unitary_on_subset(&source, &pauli.matrix(), &subset)?;
            if trace_distance(&mapped, &target)? < STATE_TOL {
                return Ok(Some(PauliConnection { qubit, pauli }));
            }
        }
    }
    Ok(None)
}

/// Disjoint pairs of 1-based qubits covering a register.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pairing(Vec<(usize, usize)>);

impl Pairing {
    pub fn new(pairs: Vec<(usize, usize)>, num_qubits: usize) -> Result<Self> {
        let mut seen = vec![false; num_qubits + 1];
        for &(a, b) in &pairs {
            for q in [a, b] {
                if q == 0 || q > num_qubits {
                    return Err(Error::InvalidPairing(format!(
                        "qubit {q} out of range 1..={num_qubits}"
                    )));
                }
                if std::mem::replace(&mut seen[q], true) {
                    return Err(Error::InvalidPairing(format!("qubit {q} appears twice")));
                }
            }
        }
        if let Some(q) = (1..=num_qubits).find(|&q| !seen[q]) {
            return Err(Error::InvalidPairing(format!("qubit {q} is not covered")));
        }
        Ok(Self(pairs))
    }

    /// `(1,2)(3,4)...(2N-1,2N)`.
    pub fn consecutive(num_qubits: usize) -> Result<Self> {
        Self::new((1..=num_qubits / 2).map(|k| (2 * k - 1, 2 * k)).collect(), num_qubits)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.0.len()
    }
}

/// Product of Bell states, `tuple[k]` placed on `pairing[k]`.
pub fn bell_product_state(pairing: &Pairing, tuple: &[BellLabel]) -> Result<PureState> {
    if tuple.len() != pairing.pairs().len() {
        return Err(Error::DimensionMismatch {
            expected: pairing.pairs().len(),
            actual: tuple.len(),
        });
    }
    let n = pairing.num_qubits();
    let v = CVector::from_fn(1 << n, |x, _| {
        let amp: f64 = pairing
            .pairs()
            .iter()
            .zip(tuple)
            .map(|(&(a, b), bell)| bell.amplitude(x & qubit_bit(a, n) != 0, x & qubit_bit(b, n) != 0))
            .product();
        Complex64::new(amp, 0.0)
    });
    PureState::from_vector(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellTerm {
    pub tuple: Vec<BellLabel>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellDecomposition {
    pub pairing: Pairing,
    pub terms: Vec<BellTerm>,
    pub reconstruction_error: f64,
}

/// Weights `tr(rho ⊗_k [Bell_{t_k}])` over all `4^N` tuples, lexicographic in
/// the tuple (first pair most significant). Fails unless the kept terms
/// reconstruct `rho`.
pub fn bell_tuple_decomposition(rho: &DensityMatrix, pairing: &Pairing) -> Result<BellDecomposition> {
    if pairing.num_qubits() != rho.num_qubits() {
        return Err(Error::InvalidPairing(format!(
            "pairing covers {} qubits, state has {}",
            pairing.num_qubits(),
            rho.num_qubits()
        )));
    }
    let n_pairs = pairing.pairs().len();
    let dim = rho.dim();
    let mut terms = Vec::new();
    let mut rebuilt = CMatrix::zeros(dim, dim);
    for code in 0..1usize << (2 * n_pairs) {
        let tuple: Vec<BellLabel> = (0..n_pairs)
            .map(|k| BellLabel::ALL[(code >> (2 * (n_pairs - 1 - k))) & 3])
            .collect();
        let psi = bell_product_state(pairing, &tuple)?;
        let v = psi.amplitudes();
        let weight = v.dotc(&(rho.matrix() * v)).re;
        if weight > BELL_WEIGHT_CUTOFF {
            rebuilt += (v * v.adjoint()) * Complex64::new(weight, 0.0);
            terms.push(BellTerm { tuple, weight });
        }
    }
    let rebuilt = DensityMatrix::from_matrix_unchecked(rebuilt);
    let err = trace_distance(rho, &rebuilt)?;
    if err > STATE_TOL {
        return Err(Error::NotBellCorrelated(err));
    }
    Ok(BellDecomposition {
        pairing: pairing.clone(),
        terms,
        reconstruction_error: err,
    })
}

/// Largest trace distance between a family and its image under any swap of
/// two qubits.
pub fn permutation_invariance_check(two_n: usize, label: FamilyLabel) -> Result<f64> {
    let rho = build_family(two_n, label)?;
    let mut worst = 0.0f64;
    for i in 1..=two_n {
        for j in (i + 1)..=two_n {
            let mut order: Vec<usize> = (1..=two_n).collect();
            order.swap(i - 1, j - 1);
            worst = worst.max(trace_distance(&rho, &rho.permute_qubits(&order)?)?);
        }
    }
    Ok(worst)
}
