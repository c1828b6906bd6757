//! Dense multi-qubit pure states and density matrices.
//!
//! Qubits are numbered from 1. Qubit 1 is the most significant bit of a
//! computational-basis index, so the string `|a_1 a_2 ... a_n>` maps to the
//! integer whose binary digits read `a_1 a_2 ... a_n`.

mod eigen;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eigen::{hermitian_deviation, hermitian_eigenvalues, hermitian_eigh, HermitianEigen};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest supported register.
pub const MAX_QUBITS: usize = 12;
/// Equality tolerance for states (normalization, trace, hermiticity).
pub const STATE_TOL: f64 = 1e-12;
/// Tolerance for positivity, idempotence and unitarity checks.
pub const CHECK_TOL: f64 = 1e-10;
/// Branch probabilities below this are reported as zero-probability.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Bit mask of qubit `q` (1-based) in an `n`-qubit index.
#[inline]
pub(crate) fn qubit_bit(q: usize, n: usize) -> usize {
    1 << (n - q)
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(())
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: dim.next_power_of_two().max(2),
            actual: dim,
        });
    }
    let n = dim.trailing_zeros() as usize;
    check_qubit_count(n)?;
    Ok(n)
}

/// Strictly increasing set of 1-based qubit positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitSubset {
    indices: Vec<usize>,
}

impl QubitSubset {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&q| q == 0) {
            return Err(Error::QubitOutOfRange {
                index: bad,
                num_qubits: 0,
            });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnorderedSubset(indices));
        }
        Ok(Self { indices })
    }

    /// Builds a subset from unordered, possibly repeated positions.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(indices)
    }

    pub fn empty() -> Self {
        Self { indices: Vec::new() }
    }

    pub fn all(n: usize) -> Self {
        Self {
            indices: (1..=n).collect(),
        }
    }

    pub fn single(q: usize) -> Result<Self> {
        Self::new(vec![q])
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.indices.binary_search(&q).is_ok()
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.indices.last() {
            Some(&q) if q > n => Err(Error::QubitOutOfRange {
                index: q,
                num_qubits: n,
            }),
            _ => Ok(()),
        }
    }

    /// Positions of `1..=n` not in this subset.
    pub fn complement(&self, n: usize) -> Self {
        Self {
            indices: (1..=n).filter(|q| !self.contains(*q)).collect(),
        }
    }

    pub(crate) fn mask(&self, n: usize) -> usize {
        self.indices.iter().fold(0, |m, &q| m | qubit_bit(q, n))
    }
}

/// Index bookkeeping for an operator acting on a subset of an `n`-qubit register.
pub(crate) struct Embedding {
    /// Full-register offsets of each sub-register basis state.
    scatter: Vec<usize>,
    /// Sub-register index of each full-register basis state.
    gather: Vec<usize>,
    rest_mask: usize,
}

impl Embedding {
    pub(crate) fn new(subset: &QubitSubset, n: usize) -> Self {
        let k = subset.len();
        let scatter: Vec<usize> = (0..1usize << k)
            .map(|a| {
                subset
                    .indices()
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| a & (1 << (k - 1 - t)) != 0)
                    .fold(0, |m, (_, &q)| m | qubit_bit(q, n))
            })
            .collect();
        let gather = (0..1usize << n)
            .map(|r| {
                subset
                    .indices()
                    .iter()
                    .fold(0, |acc, &q| (acc << 1) | usize::from(r & qubit_bit(q, n) != 0))
            })
            .collect();
        let rest_mask = ((1usize << n) - 1) & !subset.mask(n);
        Self {
            scatter,
            gather,
            rest_mask,
        }
    }

    /// `(op ⊗ I) · m` with `op` on the embedded subset.
    pub(crate) fn left_apply(&self, op: &CMatrix, m: &CMatrix) -> CMatrix {
        let dim = m.nrows();
        let sub = op.nrows();
        let mut out = CMatrix::zeros(dim, m.ncols());
        for r in 0..dim {
            let a_row = self.gather[r];
            let base = r & self.rest_mask;
            for a in 0..sub {
                let coeff = op[(a_row, a)];
                if coeff == ZERO {
                    continue;
                }
                let src = base | self.scatter[a];
                for c in 0..m.ncols() {
                    out[(r, c)] += coeff * m[(src, c)];
                }
            }
        }
        out
    }

    pub(crate) fn full_operator(&self, op: &CMatrix) -> CMatrix {
        let dim = self.gather.len();
        CMatrix::from_fn(dim, dim, |r, c| {
            if r & self.rest_mask == c & self.rest_mask {
                op[(self.gather[r], self.gather[c])]
            } else {
                ZERO
            }
        })
    }
}

/// Operator on `n` qubits acting as `op` on `subset` and identity elsewhere.
pub fn embed_operator(op: &CMatrix, subset: &QubitSubset, n: usize) -> Result<CMatrix> {
    check_qubit_count(n)?;
    subset.check_range(n)?;
    let expected = 1usize << subset.len();
    if op.nrows() != expected || op.ncols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: op.nrows(),
        });
    }
    Ok(Embedding::new(subset, n).full_operator(op))
}

/// Normalized pure state on `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(CVector::from_vec(amplitudes))
    }

    pub fn from_vector(amplitudes: CVector) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len())?;
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    pub(crate) fn from_vector_unchecked(amplitudes: CVector) -> Self {
        let num_qubits = amplitudes.len().trailing_zeros() as usize;
        Self { num_qubits, amplitudes }
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        if num_qubits == 0 || index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        Ok(Self::from_vector_unchecked(v))
    }

    /// Computational basis state from a string of `0`/`1` characters.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let index = bits.chars().try_fold(0usize, |acc, ch| match ch {
            '0' => Ok(acc << 1),
            '1' => Ok((acc << 1) | 1),
            _ => Err(Error::InvalidBitString(bits.to_string())),
        })?;
        Self::basis(bits.len(), index)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_matrix_unchecked(m)
    }
}

/// Mixed state on `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_square(matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    fn from_square(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let num_qubits = qubits_for_dim(matrix.nrows())?;
        Ok(Self { num_qubits, matrix })
    }

    /// For matrices that are density matrices by construction.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let num_qubits = matrix.nrows().trailing_zeros() as usize;
        Self { num_qubits, matrix }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        Self::from_square(CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0))
    }

    /// Checks every density-matrix invariant.
    pub fn validate(&self) -> Result<()> {
        let dev = hermitian_deviation(&self.matrix);
        if dev > STATE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let min = self.eigenvalues()?.first().copied().unwrap_or(0.0);
        if min < -CHECK_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Spectrum in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Reorders qubits: qubit `order[k]` of `self` becomes qubit `k + 1`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<Self> {
        let n = self.num_qubits;
        let mut seen = vec![false; n + 1];
        if order.len() != n
            || order
                .iter()
                .any(|&q| q == 0 || q > n || std::mem::replace(&mut seen[q], true))
        {
            return Err(Error::InvalidPairing(format!(
                "{order:?} is not a permutation of 1..={n}"
            )));
        }
        let map: Vec<usize> = (0..self.dim())
            .map(|i| {
                order.iter().enumerate().fold(0, |acc, (k, &src)| {
                    if i & qubit_bit(src, n) != 0 {
                        acc | qubit_bit(k + 1, n)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out[(map[i], map[j])] = self.matrix[(i, j)];
            }
        }
        Ok(Self::from_matrix_unchecked(out))
    }

    /// Probability-weighted mixture of states on a common register.
    pub fn mixture<'a>(parts: impl IntoIterator<Item = (f64, &'a DensityMatrix)>) -> Result<Self> {
        let mut acc: Option<CMatrix> = None;
        for (w, rho) in parts {
            let scaled = rho.matrix() * Complex64::new(w, 0.0);
            acc = Some(match acc {
                None => scaled,
                Some(m) if m.nrows() == scaled.nrows() => m + scaled,
                Some(m) => {
                    return Err(Error::DimensionMismatch {
                        expected: m.nrows(),
                        actual: scaled.nrows(),
                    })
                }
            });
        }
        let m = acc.ok_or(Error::DimensionMismatch { expected: 1, actual: 0 })?;
        Self::from_square(m)
    }
}

/// Operations shared by pure states and density matrices.
pub trait QuantumState: Sized {
    fn num_qubits(&self) -> usize;
    fn tensor(&self, other: &Self) -> Result<Self>;
    fn apply_on_subset(&self, u: &CMatrix, subset: &QubitSubset) -> Result<Self>;
}

impl QuantumState for PureState {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn tensor(&self, other: &Self) -> Result<Self> {
        check_qubit_count(self.num_qubits + other.num_qubits)?;
        Ok(Self::from_vector_unchecked(
            self.amplitudes.kronecker(&other.amplitudes),
        ))
    }

    fn apply_on_subset(&self, u: &CMatrix, subset: &QubitSubset) -> Result<Self> {
        check_local_unitary(u, subset, self.num_qubits)?;
        let emb = Embedding::new(subset, self.num_qubits);
        let col = CMatrix::from_column_slice(self.dim(), 1, self.amplitudes.as_slice());
        let out = emb.left_apply(u, &col);
        Ok(Self::from_vector_unchecked(CVector::from_column_slice(out.as_slice())))
    }
}

impl QuantumState for DensityMatrix {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn tensor(&self, other: &Self) -> Result<Self> {
        check_qubit_count(self.num_qubits + other.num_qubits)?;
        Ok(Self::from_matrix_unchecked(self.matrix.kronecker(&other.matrix)))
    }

    fn apply_on_subset(&self, u: &CMatrix, subset: &QubitSubset) -> Result<Self> {
        check_local_unitary(u, subset, self.num_qubits)?;
        let emb = Embedding::new(subset, self.num_qubits);
        // U rho U^† = (U (U rho)^†)^† for Hermitian rho.
        let half = emb.left_apply(u, &self.matrix);
        let full = emb.left_apply(u, &half.adjoint()).adjoint();
        Ok(Self::from_matrix_unchecked(full))
    }
}

fn check_local_unitary(u: &CMatrix, subset: &QubitSubset, n: usize) -> Result<()> {
    subset.check_range(n)?;
    let expected = 1usize << subset.len();
    if u.nrows() != expected || u.ncols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: u.nrows(),
        });
    }
    let dev = max_abs(&(u.adjoint() * u - CMatrix::identity(expected, expected)));
    if dev > CHECK_TOL {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

/// `a ⊗ b`, with `a` on the lower-numbered qubits.
pub fn tensor_product<S: QuantumState>(a: &S, b: &S) -> Result<S> {
    a.tensor(b)
}

/// Applies `u` on `subset` (conjugation for density matrices).
pub fn apply_unitary_on_subset<S: QuantumState>(state: &S, u: &CMatrix, subset: &QubitSubset) -> Result<S> {
    state.apply_on_subset(u, subset)
}

/// Traces out the qubits in `discard`.
pub fn partial_trace(rho: &DensityMatrix, discard: &QubitSubset) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    discard.check_range(n)?;
    if discard.is_empty() {
        return Ok(rho.clone());
    }
    if discard.len() == n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            actual: n,
        });
    }
    let keep = discard.complement(n);
    let kept = Embedding::new(&keep, n).scatter;
    let dropped = Embedding::new(discard, n).scatter;
    let dk = kept.len();
    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            out[(i, j)] = dropped.iter().map(|&d| rho.matrix[(kept[i] | d, kept[j] | d)]).sum();
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Transposes the tensor indices of `subset`. The result is Hermitian but may
/// have negative eigenvalues.
pub fn partial_transpose(rho: &DensityMatrix, subset: &QubitSubset) -> Result<CMatrix> {
    let n = rho.num_qubits();
    subset.check_range(n)?;
    let mask = subset.mask(n);
    let dim = rho.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let i2 = (i & !mask) | (j & mask);
            let j2 = (j & !mask) | (i & mask);
            out[(i2, j2)] = rho.matrix[(i, j)];
        }
    }
    Ok(out)
}

/// `<psi|rho|psi>`, clamped to `[0, 1]`.
pub fn fidelity_with_pure(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: psi.dim(),
        });
    }
    let v = psi.amplitudes();
    let f = v.dotc(&(&rho.matrix * v)).re;
    Ok(f.clamp(0.0, 1.0))
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let diff = &a.matrix - &b.matrix;
    let d = 0.5 * hermitian_eigenvalues(&diff)?.iter().map(|x| x.abs()).sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}

/// Hermitian idempotent operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    num_qubits: usize,
    matrix: CMatrix,
}

impl Projector {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let num_qubits = qubits_for_dim(matrix.nrows())?;
        let herm = hermitian_deviation(&matrix);
        if herm > CHECK_TOL {
            return Err(Error::NotProjector(herm));
        }
        let idem = max_abs(&(&matrix * &matrix - &matrix));
        if idem > CHECK_TOL {
            return Err(Error::NotProjector(idem));
        }
        Ok(Self { num_qubits, matrix })
    }

    /// Projector onto the span of an orthonormal family.
    pub fn onto_span(states: &[PureState]) -> Result<Self> {
        let first = states
            .first()
            .ok_or(Error::DimensionMismatch { expected: 1, actual: 0 })?;
        let dim = first.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for s in states {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: s.dim(),
                });
            }
            m += s.amplitudes() * s.amplitudes().adjoint();
        }
        Self::new(m)
    }

    /// `self` on `subset` of an `n`-qubit register, identity elsewhere.
    pub fn embed(&self, subset: &QubitSubset, n: usize) -> Result<Self> {
        if subset.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: subset.len(),
            });
        }
        let m = embed_operator(&self.matrix, subset, n)?;
        Ok(Self {
            num_qubits: n,
            matrix: m,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Returns `(P rho P / p, p)` with `p = tr(P rho P)`.
pub fn project_and_renormalize(rho: &DensityMatrix, p: &Projector) -> Result<(DensityMatrix, f64)> {
    if rho.dim() != p.matrix.nrows() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: p.matrix.nrows(),
        });
    }
    let projected = &p.matrix * &rho.matrix * &p.matrix;
    let prob = projected.trace().re;
    if prob < MIN_BRANCH_PROBABILITY {
        return Err(Error::ZeroProbabilityBranch(prob));
    }
    let prob = prob.min(1.0);
    let normalized = projected / Complex64::new(prob, 0.0);
    Ok((DensityMatrix::from_matrix_unchecked(normalized), prob))
}

/// Single-qubit Pauli operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> CMatrix {
        let i = Complex64::new(0.0, 1.0);
        let e = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -i, i, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        CMatrix::from_row_slice(2, 2, &e)
    }
}

impl std::fmt::Display for Pauli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn phi_plus() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![c(h), ZERO, ZERO, c(h)]).unwrap()
    }

    #[test]
    fn subset_validation() {
        assert!(QubitSubset::new(vec![2, 1]).is_err());
        assert!(QubitSubset::new(vec![1, 1]).is_err());
        assert!(QubitSubset::new(vec![0]).is_err());
        let s = QubitSubset::new(vec![1, 3]).unwrap();
        assert!(s.check_range(2).is_err());
        assert_eq!(s.complement(4).indices(), &[2, 4]);
        assert_eq!(s.mask(3), 0b101);
    }

    #[test]
    fn maximally_mixed_tensor() {
        let half = DensityMatrix::maximally_mixed(1).unwrap();
        let quarter = tensor_product(&half, &half).unwrap();
        assert_eq!(quarter, DensityMatrix::maximally_mixed(2).unwrap());
    }

    #[test]
    fn basis_tensor_order() {
        let ket = tensor_product(&PureState::from_bits("0").unwrap(), &PureState::from_bits("1").unwrap()).unwrap();
        assert_eq!(ket.amplitudes().as_slice(), &[ZERO, ONE, ZERO, ZERO]);
    }

    #[test]
    fn bell_square_is_rank_one() {
        let p = phi_plus().projector();
        let pp = tensor_product(&p, &p).unwrap();
        assert_eq!(pp.dim(), 16);
        assert_abs_diff_eq!(pp.trace(), 1.0, epsilon = 1e-15);
        let ev = pp.eigenvalues().unwrap();
        assert_abs_diff_eq!(ev[15], 1.0, epsilon = 1e-12);
        assert!(ev[..15].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let p = phi_plus().projector();
        let r = partial_trace(&p, &QubitSubset::single(2).unwrap()).unwrap();
        assert!(max_abs(&(r.matrix() - DensityMatrix::maximally_mixed(1).unwrap().matrix())) < 1e-15);
        assert_eq!(partial_trace(&p, &QubitSubset::empty()).unwrap(), p);
        assert!(partial_trace(&p, &QubitSubset::single(3).unwrap()).is_err());
    }

    #[test]
    fn transpose_edge_cases() {
        let i = Complex64::new(0.0, 1.0);
        let psi = PureState::new(vec![c(0.6), i * 0.8]).unwrap();
        let rho = psi.projector();
        let full = partial_transpose(&rho, &QubitSubset::all(1)).unwrap();
        assert_eq!(full, rho.matrix().transpose());
        assert_eq!(&partial_transpose(&rho, &QubitSubset::empty()).unwrap(), rho.matrix());
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        // PT of [Phi+] over qubit 2 is the swap operator divided by 2.
        let pt = partial_transpose(&phi_plus().projector(), &QubitSubset::single(2).unwrap()).unwrap();
        let mut swap = CMatrix::zeros(4, 4);
        for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(r, col)] = c(0.5);
        }
        assert!(max_abs(&(&pt - &swap)) < 1e-15);
        let ev = hermitian_eigenvalues(&pt).unwrap();
        for (a, b) in ev.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn fidelity_and_distance_on_pure_states() {
        let psi = phi_plus();
        let rho = psi.projector();
        assert_abs_diff_eq!(fidelity_with_pure(&rho, &psi).unwrap(), 1.0, epsilon = 1e-15);
        let perp = PureState::from_bits("01").unwrap();
        assert_abs_diff_eq!(fidelity_with_pure(&rho, &perp).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(trace_distance(&rho, &rho).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(trace_distance(&rho, &perp.projector()).unwrap(), 1.0, epsilon = 1e-14);
        assert!(fidelity_with_pure(&rho, &PureState::from_bits("0").unwrap()).is_err());
    }

    #[test]
    fn local_unitaries() {
        let x = Pauli::X.matrix();
        let q1 = QubitSubset::single(1).unwrap();
        let out = apply_unitary_on_subset(&PureState::from_bits("00").unwrap(), &x, &q1).unwrap();
        assert_eq!(out, PureState::from_bits("10").unwrap());

        let rho = phi_plus().projector();
        let same = apply_unitary_on_subset(&rho, &Pauli::I.matrix(), &q1).unwrap();
        assert_eq!(same, rho);

        let not_unitary = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(
            apply_unitary_on_subset(&rho, &not_unitary, &q1),
            Err(Error::NotUnitary(_))
        ));
        assert!(matches!(
            apply_unitary_on_subset(&rho, &CMatrix::identity(4, 4), &q1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn projection_branches() {
        let psi = phi_plus();
        let rho = psi.projector();
        let p = Projector::onto_span(std::slice::from_ref(&psi)).unwrap();
        let (post, prob) = project_and_renormalize(&rho, &p).unwrap();
        assert_abs_diff_eq!(prob, 1.0, epsilon = 1e-15);
        assert!(max_abs(&(post.matrix() - rho.matrix())) < 1e-15);

        let perp = Projector::onto_span(&[PureState::from_bits("01").unwrap()]).unwrap();
        assert!(matches!(
            project_and_renormalize(&rho, &perp),
            Err(Error::ZeroProbabilityBranch(_))
        ));
    }

    #[test]
    fn projector_rejects_non_idempotent() {
        assert!(matches!(
            Projector::new(CMatrix::identity(2, 2) * c(0.5)),
            Err(Error::NotProjector(_))
        ));
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityMatrix::new(CMatrix::identity(2, 2)),
            Err(Error::InvalidTrace(_))
        ));
        let m = CMatrix::from_row_slice(2, 2, &[c(1.5), ZERO, ZERO, c(-0.5)]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotPositive(_))));
        assert!(DensityMatrix::new(CMatrix::identity(3, 3)).is_err());
        assert!(matches!(PureState::new(vec![ONE, ONE]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn permutation_swaps_qubits() {
        let rho = PureState::from_bits("011").unwrap().projector();
        let swapped = rho.permute_qubits(&[2, 1, 3]).unwrap();
        assert_eq!(swapped, PureState::from_bits("101").unwrap().projector());
        assert!(rho.permute_qubits(&[1, 1, 2]).is_err());
    }
}
