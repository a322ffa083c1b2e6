//! Dense complex linear-algebra substrate.
//!
//! States, operators, tensor products, partial traces, hermitian
//! eigendecomposition, unitary time evolution, norms and entropies. Types
//! are immutable values after construction; every operation is a pure
//! function. All spaces are tensor products of two-level entities with
//! entity 0 as the most significant factor.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::entity::{check_capacity, EntitySet};
use crate::error::{Error, Result};
use crate::math::{fabs, fln, fmax, fsqrt};
use crate::scalar::Float;

/// Normalization tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-10;
/// Hermiticity tolerance, entrywise.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Unitarity tolerance, entrywise on `A^H A - I`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Eigenvalue floor for positive semi-definite operators.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalue floor for density operators.
pub const DENSITY_PSD_TOL: f64 = 1e-9;
/// Trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exact zeros by the entropy.
pub const ENTROPY_CLAMP: f64 = 1e-12;

#[inline]
pub(crate) fn czero<T: Float>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Float>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub(crate) fn creal<T: Float>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Number of entities for a dimension that must be a power of two.
pub fn entities_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { dim });
    }
    Ok(dim.trailing_zeros() as usize)
}

fn max_abs_entry<T: Float>(m: &DMatrix<Complex<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| fmax(acc, z.norm()))
}

fn hermiticity_residual<T: Float>(m: &DMatrix<Complex<T>>) -> T {
    let mut worst = T::zero();
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            let d = m[(r, c)] - m[(c, r)].conj();
            worst = fmax(worst, d.norm());
        }
    }
    worst
}

/// Structural tag carried by an [`Operator`], checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Hermitian,
    Unitary,
    /// Positive semi-definite (implies hermitian).
    Psd,
    General,
}

/// A dense square operator on the tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Float> {
    entries: DMatrix<Complex<T>>,
    kind: OperatorKind,
}

impl<T: Float> Operator<T> {
    /// Validates `entries` against `kind` and wraps them.
    pub fn new(entries: DMatrix<Complex<T>>, kind: OperatorKind) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimMismatch { left: entries.nrows(), right: entries.ncols() });
        }
        match kind {
            OperatorKind::General => {}
            OperatorKind::Hermitian => {
                let res = hermiticity_residual(&entries);
                if res > T::from_f64_const(HERMITIAN_TOL) {
                    return Err(Error::NotHermitian { residual: res.as_diag() });
                }
            }
            OperatorKind::Unitary => {
                let gram = entries.adjoint() * &entries;
                let res = max_abs_entry(&(gram - DMatrix::identity(entries.nrows(), entries.ncols())));
                if res > T::from_f64_const(UNITARY_TOL) {
                    return Err(Error::NotUnitary { residual: res.as_diag() });
                }
            }
            OperatorKind::Psd => {
                let res = hermiticity_residual(&entries);
                if res > T::from_f64_const(HERMITIAN_TOL) {
                    return Err(Error::NotHermitian { residual: res.as_diag() });
                }
                let candidate = Operator { entries: entries.clone(), kind: OperatorKind::Hermitian };
                let eig = candidate.eigh()?;
                let min = eig.values[0];
                if min < -T::from_f64_const(PSD_TOL) {
                    return Err(Error::NotPsd {
                        context: "operator".into(),
                        min_eigenvalue: min.as_diag(),
                    });
                }
            }
        }
        Ok(Operator { entries, kind })
    }

    /// Wraps entries without validation; caller guarantees the kind holds.
    pub(crate) fn from_parts(entries: DMatrix<Complex<T>>, kind: OperatorKind) -> Self {
        Operator { entries, kind }
    }

    pub fn identity(dim: usize) -> Self {
        Operator::from_parts(DMatrix::identity(dim, dim), OperatorKind::Unitary)
    }

    pub fn zeros(dim: usize) -> Self {
        Operator::from_parts(DMatrix::zeros(dim, dim), OperatorKind::Hermitian)
    }

    /// Pauli X on a single entity.
    pub fn pauli_x() -> Self {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = cone();
        m[(1, 0)] = cone();
        Operator::from_parts(m, OperatorKind::Hermitian)
    }

    /// Pauli Y on a single entity.
    pub fn pauli_y() -> Self {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = Complex::new(T::zero(), -T::one());
        m[(1, 0)] = Complex::new(T::zero(), T::one());
        Operator::from_parts(m, OperatorKind::Hermitian)
    }

    /// Pauli Z on a single entity.
    pub fn pauli_z() -> Self {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = cone();
        m[(1, 1)] = -cone::<T>();
        Operator::from_parts(m, OperatorKind::Hermitian)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex<T>> {
        self.entries
    }

    pub fn dagger(&self) -> Operator<T> {
        let kind = match self.kind {
            OperatorKind::General => OperatorKind::General,
            k => k,
        };
        Operator::from_parts(self.entries.adjoint(), kind)
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries.trace()
    }

    /// Scales by a real factor. Hermiticity survives; unitarity does not.
    pub fn scale(&self, factor: T) -> Operator<T> {
        let kind = match self.kind {
            OperatorKind::Hermitian => OperatorKind::Hermitian,
            OperatorKind::Psd if factor >= T::zero() => OperatorKind::Psd,
            OperatorKind::Psd => OperatorKind::Hermitian,
            _ => OperatorKind::General,
        };
        Operator::from_parts(self.entries.map(|z| z.scale(factor)), kind)
    }

    /// Sum of two operators of matching dimension.
    pub fn add(&self, other: &Operator<T>) -> Result<Operator<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch { left: self.dim(), right: other.dim() });
        }
        let kind = match (self.kind, other.kind) {
            (OperatorKind::Psd, OperatorKind::Psd) => OperatorKind::Psd,
            (OperatorKind::Hermitian | OperatorKind::Psd, OperatorKind::Hermitian | OperatorKind::Psd) => {
                OperatorKind::Hermitian
            }
            _ => OperatorKind::General,
        };
        Ok(Operator::from_parts(&self.entries + &other.entries, kind))
    }

    /// Matrix product; the result carries no structural guarantee.
    pub fn mul(&self, other: &Operator<T>) -> Result<Operator<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch { left: self.dim(), right: other.dim() });
        }
        let kind = match (self.kind, other.kind) {
            (OperatorKind::Unitary, OperatorKind::Unitary) => OperatorKind::Unitary,
            _ => OperatorKind::General,
        };
        Ok(Operator::from_parts(&self.entries * &other.entries, kind))
    }

    /// Applies the operator to a raw amplitude vector.
    pub fn apply_raw(&self, v: &DVector<Complex<T>>) -> Result<DVector<Complex<T>>> {
        if self.dim() != v.len() {
            return Err(Error::DimMismatch { left: self.dim(), right: v.len() });
        }
        Ok(&self.entries * v)
    }

    /// Kronecker product. Entity indices of `other` follow those of `self`.
    pub fn tensor(&self, other: &Operator<T>) -> Result<Operator<T>> {
        let dim = self.dim() * other.dim();
        check_capacity(entities_for_dim(dim)?)?;
        let kind = match (self.kind, other.kind) {
            (OperatorKind::Hermitian, OperatorKind::Hermitian) => OperatorKind::Hermitian,
            (OperatorKind::Unitary, OperatorKind::Unitary) => OperatorKind::Unitary,
            (OperatorKind::Psd, OperatorKind::Psd) => OperatorKind::Psd,
            _ => OperatorKind::General,
        };
        Ok(Operator::from_parts(self.entries.kronecker(&other.entries), kind))
    }

    /// Largest singular value. For hermitian kinds this is max |eigenvalue|.
    pub fn spectral_norm(&self) -> T {
        match self.kind {
            OperatorKind::Hermitian | OperatorKind::Psd => {
                let eig = self.eigh().expect("kind-checked hermitian operator");
                eig.values.iter().fold(T::zero(), |acc, &v| fmax(acc, fabs(v)))
            }
            _ => {
                if max_abs_entry(&self.entries) == T::zero() {
                    return T::zero();
                }
                self.entries
                    .clone()
                    .singular_values()
                    .iter()
                    .fold(T::zero(), |acc, &v| fmax(acc, v))
            }
        }
    }

    /// Hermitian eigendecomposition with deterministic output.
    ///
    /// Eigenvalues ascend. Within a degenerate block the eigenvectors are
    /// re-orthonormalized against the computational basis in index order,
    /// and every eigenvector's largest-modulus entry is rotated to the
    /// positive real axis, so repeated runs and permuted inputs agree.
    pub fn eigh(&self) -> Result<Eigh<T>> {
        match self.kind {
            OperatorKind::Hermitian | OperatorKind::Psd => {}
            _ => {
                let res = hermiticity_residual(&self.entries);
                if res > T::from_f64_const(HERMITIAN_TOL) {
                    return Err(Error::NotHermitian { residual: res.as_diag() });
                }
            }
        }
        let dim = self.dim();
        // Exact symmetrization defends the solver against roundoff in inputs
        // assembled by long chains of arithmetic.
        let sym = (&self.entries + self.entries.adjoint()).map(|z| z.scale(T::from_f64_const(0.5)));
        let eig = sym.symmetric_eigen();

        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("real eigenvalues").then(a.cmp(&b))
        });
        let values: Vec<T> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(dim, dim);
        for (col, &i) in order.iter().enumerate() {
            vectors.set_column(col, &eig.eigenvectors.column(i));
        }

        let scale = values.iter().fold(T::one(), |acc, &v| fmax(acc, fabs(v)));
        let cluster_tol = T::from_f64_const(1e-11) * scale;
        for (start, end) in cluster_ranges(&values, cluster_tol) {
            if end - start > 1 {
                rebase_degenerate_block(&mut vectors, start, end);
            }
        }
        for col in 0..dim {
            normalize_column_phase(&mut vectors, col);
        }
        Ok(Eigh { values, vectors: Operator::from_parts(vectors, OperatorKind::Unitary) })
    }

    /// Hermitian square root of a PSD operator; negative roundoff clamps to 0.
    pub fn sqrt_psd(&self) -> Result<Operator<T>> {
        let eig = self.eigh()?;
        let v = eig.vectors.entries();
        let mut scaled = v.clone();
        for (col, &lam) in eig.values.iter().enumerate() {
            let root = if lam > T::zero() { fsqrt(lam) } else { T::zero() };
            for r in 0..scaled.nrows() {
                scaled[(r, col)] = scaled[(r, col)].scale(root);
            }
        }
        Ok(Operator::from_parts(scaled * v.adjoint(), OperatorKind::Psd))
    }
}

/// Replaces eigenvector columns `start..end` (a degenerate block) with the
/// Gram–Schmidt orthonormalization of the computational basis projected
/// onto the block span, taken in index order.
fn rebase_degenerate_block<T: Float>(vectors: &mut DMatrix<Complex<T>>, start: usize, end: usize) {
    let dim = vectors.nrows();
    let width = end - start;
    let block = vectors.columns(start, width).clone_owned();
    let projector = &block * block.adjoint();

    let mut accepted: Vec<DVector<Complex<T>>> = Vec::with_capacity(width);
    let accept_tol = T::from_f64_const(1e-10);
    'candidates: for j in 0..dim {
        if accepted.len() == width {
            break;
        }
        let mut w: DVector<Complex<T>> = projector.column(j).clone_owned();
        for a in &accepted {
            let overlap = a.dotc(&w);
            w -= a.map(|z| z * overlap);
        }
        let norm = w.norm();
        if norm <= accept_tol {
            continue 'candidates;
        }
        w /= Complex::new(norm, T::zero());
        accepted.push(w);
    }
    if accepted.len() < width {
        // Numerically impossible for a true projector; keep the solver's
        // block rather than emit a rank-deficient basis.
        return;
    }
    for (offset, a) in accepted.iter().enumerate() {
        vectors.set_column(start + offset, a);
    }
}

/// Ascending `values` split into maximal runs closer than `tol`.
pub(crate) fn cluster_ranges<T: Float>(values: &[T], tol: T) -> Vec<(usize, usize)> {
    let mut ranges = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        ranges.push((start, end));
        start = end;
    }
    ranges
}

/// Rotates the column's largest-modulus entry onto the positive real axis.
pub(crate) fn normalize_column_phase<T: Float>(vectors: &mut DMatrix<Complex<T>>, col: usize) {
    let dim = vectors.nrows();
    let mut best = 0;
    let mut best_norm = T::zero();
    for r in 0..dim {
        let n = vectors[(r, col)].norm();
        if n > best_norm * (T::one() + T::from_f64_const(1e-12)) {
            best = r;
            best_norm = n;
        }
    }
    if best_norm == T::zero() {
        return;
    }
    let pivot = vectors[(best, col)];
    let phase = pivot.conj().unscale(pivot.norm());
    for r in 0..dim {
        vectors[(r, col)] *= phase;
    }
}

/// Result of [`Operator::eigh`]: `A = V diag(values) V^H`.
#[derive(Debug, Clone)]
pub struct Eigh<T: Float> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: Operator<T>,
}

/// A normalized pure state on `2^n` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Float> {
    amplitudes: DVector<Complex<T>>,
}

impl<T: Float> StateVector<T> {
    /// Validates normalization and the power-of-two dimension.
    pub fn new(amplitudes: DVector<Complex<T>>) -> Result<Self> {
        entities_for_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        let res = fabs(norm - T::one());
        if res > T::from_f64_const(NORM_TOL) {
            return Err(Error::NotNormalized { residual: res.as_diag() });
        }
        Ok(StateVector { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: DVector<Complex<T>>) -> Result<Self> {
        entities_for_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        if norm <= T::from_f64_const(1e-300) {
            return Err(Error::ZeroNormProjection);
        }
        Ok(StateVector { amplitudes: amplitudes.unscale(norm) })
    }

    /// Computational basis state `|index⟩` on `entities` two-level factors.
    pub fn basis(entities: usize, index: usize) -> Self {
        let dim = 1usize << entities;
        assert!(index < dim, "basis index out of range");
        let mut amps = DVector::zeros(dim);
        amps[index] = cone();
        StateVector { amplitudes: amps }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Number of two-level entities this state lives on.
    pub fn entities(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &DVector<Complex<T>> {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector<T>) -> Complex<T> {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Kronecker product. `other`'s entities follow `self`'s.
    pub fn tensor(&self, other: &StateVector<T>) -> Result<StateVector<T>> {
        let dim = self.dim() * other.dim();
        check_capacity(entities_for_dim(dim)?)?;
        Ok(StateVector { amplitudes: self.amplitudes.kronecker(&other.amplitudes) })
    }

    /// `|ψ⟩⟨ψ|` as a density operator.
    pub fn density(&self) -> DensityOperator<T> {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator { entries: m }
    }
}

/// The six named single-entity states usable in product expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedQubit {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl NamedQubit {
    /// All six states in canonical order: computational, Hadamard, circular.
    pub const ALL: [NamedQubit; 6] = [
        NamedQubit::Zero,
        NamedQubit::One,
        NamedQubit::Plus,
        NamedQubit::Minus,
        NamedQubit::PlusI,
        NamedQubit::MinusI,
    ];

    pub fn parse(token: &str) -> Option<NamedQubit> {
        match token {
            "0" => Some(NamedQubit::Zero),
            "1" => Some(NamedQubit::One),
            "+" => Some(NamedQubit::Plus),
            "-" => Some(NamedQubit::Minus),
            "i" => Some(NamedQubit::PlusI),
            "-i" => Some(NamedQubit::MinusI),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            NamedQubit::Zero => "0",
            NamedQubit::One => "1",
            NamedQubit::Plus => "+",
            NamedQubit::Minus => "-",
            NamedQubit::PlusI => "i",
            NamedQubit::MinusI => "-i",
        }
    }

    pub fn state<T: Float>(self) -> StateVector<T> {
        let h = T::from_f64_const(std::f64::consts::FRAC_1_SQRT_2);
        let amps = match self {
            NamedQubit::Zero => vec![cone(), czero()],
            NamedQubit::One => vec![czero(), cone()],
            NamedQubit::Plus => vec![creal(h), creal(h)],
            NamedQubit::Minus => vec![creal(h), creal(-h)],
            NamedQubit::PlusI => vec![creal(h), Complex::new(T::zero(), h)],
            NamedQubit::MinusI => vec![creal(h), Complex::new(T::zero(), -h)],
        };
        StateVector { amplitudes: DVector::from_vec(amps) }
    }
}

/// Product of named single-entity states, entity 0 first.
pub fn product_state<T: Float>(factors: &[NamedQubit]) -> Result<StateVector<T>> {
    if factors.is_empty() {
        return Err(Error::Argument("product state needs at least one factor".into()));
    }
    check_capacity(factors.len())?;
    let mut state = factors[0].state::<T>();
    for f in &factors[1..] {
        state = state.tensor(&f.state())?;
    }
    Ok(state)
}

/// A dense density operator (hermitian, unit trace, PSD).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T: Float> {
    entries: DMatrix<Complex<T>>,
}

impl<T: Float> DensityOperator<T> {
    /// Validates hermiticity, trace 1, and eigenvalue floor.
    pub fn new(entries: DMatrix<Complex<T>>) -> Result<Self> {
        entities_for_dim(entries.nrows())?;
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimMismatch { left: entries.nrows(), right: entries.ncols() });
        }
        let herm = hermiticity_residual(&entries);
        if herm > T::from_f64_const(HERMITIAN_TOL) {
            return Err(Error::NotHermitian { residual: herm.as_diag() });
        }
        let tr = entries.trace();
        let tr_res = (tr - cone::<T>()).norm();
        if tr_res > T::from_f64_const(TRACE_TOL) {
            return Err(Error::BadTrace { residual: tr_res.as_diag() });
        }
        let op = Operator::from_parts(entries.clone(), OperatorKind::Hermitian);
        let min = op.eigh()?.values[0];
        if min < -T::from_f64_const(DENSITY_PSD_TOL) {
            return Err(Error::NotPsd { context: "density operator".into(), min_eigenvalue: min.as_diag() });
        }
        Ok(DensityOperator { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entities(&self) -> usize {
        self.entries.nrows().trailing_zeros() as usize
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries.trace()
    }

    /// Reduced density operator on `keep`, tracing out the rest.
    ///
    /// Kept entities retain their relative order; keeping every entity
    /// returns the input unchanged.
    pub fn partial_trace(&self, keep: &EntitySet) -> Result<DensityOperator<T>> {
        let n = self.entities();
        let entries = partial_trace_matrix(&self.entries, keep, n)?;
        Ok(DensityOperator { entries })
    }

    /// Von Neumann entropy in nats: `-Σ λ ln λ` over eigenvalues above
    /// [`ENTROPY_CLAMP`]; smaller eigenvalues are clamped to zero.
    pub fn von_neumann_entropy(&self) -> T {
        let op = Operator::from_parts(self.entries.clone(), OperatorKind::Hermitian);
        let eig = op.eigh().expect("density operator is hermitian");
        let clamp = T::from_f64_const(ENTROPY_CLAMP);
        let mut s = T::zero();
        for &lam in &eig.values {
            if lam >= clamp {
                s = s - lam * fln(lam);
            }
        }
        fmax(s, T::zero())
    }
}

/// Partial trace over raw matrix entries; `keep` must be a nonempty subset
/// of `{0..entities-1}`.
pub fn partial_trace_matrix<T: Float>(
    m: &DMatrix<Complex<T>>,
    keep: &EntitySet,
    entities: usize,
) -> Result<DMatrix<Complex<T>>> {
    if keep.is_empty() {
        return Err(Error::Argument("partial trace keep set is empty".into()));
    }
    if !keep.is_subset(&EntitySet::full(entities)) {
        return Err(Error::Argument(format!(
            "keep set {keep} exceeds the {entities}-entity universe"
        )));
    }
    let kept: Vec<usize> = keep.to_vec();
    let traced: Vec<usize> = keep.complement(entities).to_vec();
    let nk = kept.len();
    let nt = traced.len();
    let dk = 1usize << nk;
    let dt = 1usize << nt;

    // Entity e owns bit (entities - 1 - e) of a full basis index.
    let place = |positions: &[usize], sub: usize| -> usize {
        let mut idx = 0usize;
        for (p, &e) in positions.iter().enumerate() {
            let bit = (sub >> (positions.len() - 1 - p)) & 1;
            idx |= bit << (entities - 1 - e);
        }
        idx
    };

    let mut out = DMatrix::zeros(dk, dk);
    for rk in 0..dk {
        for ck in 0..dk {
            let mut acc = czero::<T>();
            for t in 0..dt {
                let row = place(&kept, rk) | place(&traced, t);
                let col = place(&kept, ck) | place(&traced, t);
                acc += m[(row, col)];
            }
            out[(rk, ck)] = acc;
        }
    }
    Ok(out)
}

/// Schrödinger evolution `e^{-iHt}|ψ⟩` via eigendecomposition (ħ = 1).
pub fn evolve<T: Float>(psi: &StateVector<T>, h: &Operator<T>, t: T) -> Result<StateVector<T>> {
    let eig = propagator_eig(psi, h)?;
    Ok(evolve_with_eig(psi, &eig, t))
}

/// Eigendecomposition reusable across many sample times of one Hamiltonian.
pub fn propagator_eig<T: Float>(psi: &StateVector<T>, h: &Operator<T>) -> Result<Eigh<T>> {
    if psi.dim() != h.dim() {
        return Err(Error::DimMismatch { left: psi.dim(), right: h.dim() });
    }
    h.eigh()
}

/// Applies `e^{-iHt}` given `H`'s eigendecomposition.
pub fn evolve_with_eig<T: Float>(psi: &StateVector<T>, eig: &Eigh<T>, t: T) -> StateVector<T> {
    let v = eig.vectors.entries();
    let mut coeffs = v.adjoint() * psi.amplitudes();
    for (i, &lam) in eig.values.iter().enumerate() {
        let phase = Complex::new(T::zero(), -(lam * t)).exp();
        coeffs[i] *= phase;
    }
    StateVector { amplitudes: v * coeffs }
}
