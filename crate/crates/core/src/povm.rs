//! Generalized measurements and the observer's detection-threshold rule.
//!
//! A POVM is an ordered list of labeled positive semi-definite effects
//! summing to the identity. Measuring a state yields Born-rule
//! probabilities `p_i = ⟨ψ|E_i|ψ⟩`; a classical record is produced only
//! under the dominance rule — exactly one outcome's probability exceeds
//! the detection threshold `ε` while every other stays at or below it —
//! otherwise the observer records nothing.
//!
//! The module also computes which entities a POVM actually recognizes
//! (its weight in terms acting non-trivially on each entity) and handles
//! informationally complete representations: rank testing and completion
//! of an arbitrary POVM to an IC one containing it as a rescaled subset.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::entity::EntitySet;
use crate::error::{Error, Result};
use crate::hamiltonian::{pauli_code_digit, pauli_decompose};
use crate::math::{fabs, fmax};
use crate::qcore::{entities_for_dim, product_state, NamedQubit, Operator, OperatorKind, StateVector};
use crate::scalar::Float;

/// PSD tolerance on effect eigenvalues.
pub const EFFECT_PSD_TOL: f64 = 1e-10;
/// Entrywise tolerance on `Σ E_i - I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Gram-rank tolerance for informational completeness.
pub const IC_RANK_TOL: f64 = 1e-9;
/// Default relative threshold for recognized support.
pub const DEFAULT_SUPPORT_DELTA: f64 = 1e-6;
/// Default detection threshold.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Whether a record back-acts on the global state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservationMode {
    /// No state update; the POVM reads the state as a channel.
    Witness,
    /// A record applies `|ψ⟩ → √E_k|ψ⟩ / ‖·‖`.
    Projective,
}

impl ObservationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ObservationMode::Witness => "witness",
            ObservationMode::Projective => "projective",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "witness" => Some(ObservationMode::Witness),
            "projective" => Some(ObservationMode::Projective),
            _ => None,
        }
    }
}

/// The observer's record rule: detection threshold plus back-action mode.
#[derive(Debug, Clone, Copy)]
pub struct DominanceRule<T: Float> {
    epsilon: T,
    mode: ObservationMode,
}

impl<T: Float> DominanceRule<T> {
    /// `epsilon` must lie in the open interval (0, 0.5).
    pub fn new(epsilon: T, mode: ObservationMode) -> Result<Self> {
        if !(epsilon > T::zero() && epsilon < T::from_f64_const(0.5)) {
            return Err(Error::Argument(format!(
                "epsilon must lie in (0, 0.5), got {epsilon}"
            )));
        }
        Ok(DominanceRule { epsilon, mode })
    }

    pub fn witness(epsilon: T) -> Result<Self> {
        DominanceRule::new(epsilon, ObservationMode::Witness)
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn mode(&self) -> ObservationMode {
        self.mode
    }
}

fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() {
        return Err(Error::BadLabel { label: label.into(), reason: "empty".into() });
    }
    if label == "-" {
        return Err(Error::BadLabel {
            label: label.into(),
            reason: "reserved for the no-record marker".into(),
        });
    }
    if !label.chars().all(|c| c.is_ascii_graphic() && c != ',') {
        return Err(Error::BadLabel {
            label: label.into(),
            reason: "labels are comma-free printable ASCII".into(),
        });
    }
    Ok(())
}

/// An ordered, labeled POVM.
#[derive(Debug, Clone)]
pub struct Povm<T: Float> {
    dim: usize,
    effects: Vec<Operator<T>>,
    labels: Vec<String>,
}

impl<T: Float> Povm<T> {
    /// Validates effects and labels into a POVM.
    ///
    /// Failures identify the violated invariant and its numeric residual:
    /// a non-PSD effect reports its index and minimum eigenvalue, a
    /// completeness failure the largest entry of `Σ E_i − I`.
    pub fn validate(effects: Vec<Operator<T>>, labels: Vec<String>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::Argument("a POVM needs at least one effect".into()));
        }
        if effects.len() != labels.len() {
            return Err(Error::Argument(format!(
                "{} effects but {} labels",
                effects.len(),
                labels.len()
            )));
        }
        let dim = effects[0].dim();
        entities_for_dim(dim)?;
        for label in &labels {
            validate_label(label)?;
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel { label: label.clone() });
            }
        }
        let mut sum: DMatrix<Complex<T>> = DMatrix::zeros(dim, dim);
        for (i, effect) in effects.iter().enumerate() {
            if effect.dim() != dim {
                return Err(Error::DimMismatch { left: effect.dim(), right: dim });
            }
            let eig = effect.eigh().map_err(|e| match e {
                Error::NotHermitian { residual } => Error::NotHermitian { residual },
                other => other,
            })?;
            let min = eig.values[0];
            if min < -T::from_f64_const(EFFECT_PSD_TOL) {
                return Err(Error::NotPsd {
                    context: format!("effect {i} ({})", labels[i]),
                    min_eigenvalue: min.as_diag(),
                });
            }
            sum += effect.entries();
        }
        let residual = (&sum - DMatrix::<Complex<T>>::identity(dim, dim))
            .iter()
            .fold(T::zero(), |a, z| fmax(a, z.norm()));
        if residual > T::from_f64_const(COMPLETENESS_TOL) {
            return Err(Error::PovmIncomplete { residual: residual.as_diag() });
        }
        Ok(Povm { dim, effects, labels })
    }

    /// Rank-1 projector POVM from an orthonormal basis.
    pub fn projective_from_basis(basis: &[StateVector<T>], labels: Vec<String>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::Argument("empty basis".into()));
        }
        let dim = basis[0].dim();
        if basis.len() != dim {
            return Err(Error::Argument(format!(
                "projective POVM needs {dim} basis vectors, got {}",
                basis.len()
            )));
        }
        let tol = T::from_f64_const(1e-9);
        for (i, v) in basis.iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::DimMismatch { left: v.dim(), right: dim });
            }
            for (j, w) in basis.iter().enumerate().skip(i) {
                let overlap = v.inner(w).norm();
                let target = if i == j { T::one() } else { T::zero() };
                if fabs(overlap - target) > tol {
                    return Err(Error::Argument(format!(
                        "basis vectors {i} and {j} are not orthonormal (|⟨{i}|{j}⟩| = {overlap})"
                    )));
                }
            }
        }
        let effects = basis
            .iter()
            .map(|v| {
                let m = v.amplitudes() * v.amplitudes().adjoint();
                Operator::from_parts(m, OperatorKind::Psd)
            })
            .collect();
        Povm::validate(effects, labels)
    }

    /// Computational-basis POVM on `entities` two-level factors, labeled by
    /// bitstrings.
    pub fn computational(entities: usize) -> Result<Self> {
        let dim = 1usize << entities;
        let basis: Vec<StateVector<T>> = (0..dim).map(|i| StateVector::basis(entities, i)).collect();
        let labels = (0..dim).map(|i| format!("{i:0width$b}", width = entities)).collect();
        Povm::projective_from_basis(&basis, labels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[Operator<T>] {
        &self.effects
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Born-rule probabilities `⟨ψ|E_i|ψ⟩`, clamped into [0, 1].
    pub fn born_probabilities(&self, psi: &StateVector<T>) -> Result<Vec<T>> {
        if psi.dim() != self.dim {
            return Err(Error::DimMismatch { left: psi.dim(), right: self.dim });
        }
        let mut probs = Vec::with_capacity(self.effects.len());
        for effect in &self.effects {
            let ev = effect.apply_raw(psi.amplitudes())?;
            let p = psi.amplitudes().dotc(&ev).re;
            probs.push(num_traits::clamp(p, T::zero(), T::one()));
        }
        Ok(probs)
    }

    /// Weight each entity carries across the Pauli expansions of the
    /// effects, and the set of entities above `delta` relative weight.
    ///
    /// Expanding `E = Σ_s c_s P_s`, entity `i`'s weight is `Σ |c_s|²` over
    /// strings with a non-identity factor at `i`, summed across effects.
    pub fn recognized_support(&self, entity_count: usize, delta: T) -> Result<RecognizedSupport<T>> {
        if self.dim != 1usize << entity_count {
            return Err(Error::DimMismatch { left: self.dim, right: 1usize << entity_count });
        }
        if delta < T::zero() {
            return Err(Error::Argument(format!("delta must be nonnegative, got {delta}")));
        }
        let mut weights = vec![T::zero(); entity_count];
        for effect in &self.effects {
            let coeffs = pauli_decompose(effect)?;
            for (code, c) in coeffs.iter().enumerate() {
                let w = c.norm_sqr();
                if w == T::zero() {
                    continue;
                }
                for (e, weight) in weights.iter_mut().enumerate() {
                    if pauli_code_digit(code, e, entity_count).is_some() {
                        *weight = *weight + w;
                    }
                }
            }
        }
        let max = weights.iter().fold(T::zero(), |a, &w| fmax(a, w));
        let entities = if max > T::zero() {
            weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > delta * max)
                .map(|(e, _)| e)
                .collect()
        } else {
            EntitySet::EMPTY
        };
        Ok(RecognizedSupport { entities, weights })
    }

    /// Gram-rank test for informational completeness: the effects must
    /// span the full `d²`-dimensional space of hermitian operators.
    pub fn is_informationally_complete(&self) -> IcStatus {
        let n = self.effects.len();
        let mut gram = DMatrix::<T>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let g = hs_inner(&self.effects[i], &self.effects[j]);
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        let eig = gram.symmetric_eigen();
        let max = eig.eigenvalues.iter().fold(T::zero(), |a, &v| fmax(a, fabs(v)));
        let tol = T::from_f64_const(IC_RANK_TOL) * fmax(max, T::one());
        let rank = eig.eigenvalues.iter().filter(|&&v| v > tol).count();
        IcStatus { rank, complete: rank == self.dim * self.dim }
    }

    /// Embeds this POVM into an informationally complete one.
    ///
    /// The result's first `len()` effects are `c·E_i` for a single scale
    /// `c = 1/2`; appended effects are projectors onto product states drawn
    /// from the fixed sequence {0, 1, +, −, i, −i}^N in lexicographic
    /// order, greedily keeping those that raise the Gram rank, scaled by a
    /// common factor, plus one PSD remainder restoring completeness.
    /// An already-complete input is returned unchanged with `c = 1`.
    pub fn ic_completion(&self) -> Result<IcCompletion<T>> {
        let status = self.is_informationally_complete();
        if status.complete {
            return Ok(IcCompletion { povm: self.clone(), input_scale: T::one(), appended: 0 });
        }
        let entities = entities_for_dim(self.dim)?;
        let full_rank = self.dim * self.dim;

        // Hilbert–Schmidt orthonormal basis of the current effect span.
        let mut span: Vec<DMatrix<Complex<T>>> = Vec::new();
        for effect in &self.effects {
            gram_schmidt_push(&mut span, effect.entries().clone());
        }

        let mut picked: Vec<Operator<T>> = Vec::new();
        'candidates: for code in 0..6usize.pow(entities as u32) {
            if span.len() >= full_rank {
                break 'candidates;
            }
            let mut factors = Vec::with_capacity(entities);
            let mut rest = code;
            for _ in 0..entities {
                factors.push(NamedQubit::ALL[rest % 6]);
                rest /= 6;
            }
            factors.reverse();
            let state = product_state::<T>(&factors)?;
            let projector = state.amplitudes() * state.amplitudes().adjoint();
            if gram_schmidt_push(&mut span, projector.clone()) {
                picked.push(Operator::from_parts(projector, OperatorKind::Psd));
            }
        }
        if span.len() < full_rank {
            return Err(Error::Numeric(format!(
                "informational completion reached rank {} of {full_rank}",
                span.len()
            )));
        }

        let c = T::from_f64_const(0.5);
        let mut accumulated = Operator::<T>::zeros(self.dim);
        for q in &picked {
            accumulated = accumulated.add(q)?;
        }
        let lam_max = accumulated.eigh()?.values.last().copied().unwrap_or(T::zero());
        let gamma = (T::one() - c) / (T::from_f64_const(2.0) * lam_max);
        let mut remainder = DMatrix::<Complex<T>>::identity(self.dim, self.dim)
            .map(|z| z * Complex::new(T::one() - c, T::zero()));
        remainder -= accumulated.entries().map(|z| z.scale(gamma));

        let mut effects: Vec<Operator<T>> = self.effects.iter().map(|e| e.scale(c)).collect();
        let mut labels = self.labels.clone();
        for (m, q) in picked.iter().enumerate() {
            effects.push(q.scale(gamma));
            labels.push(unique_label(&labels, &format!("ic{m}")));
        }
        effects.push(Operator::from_parts(remainder, OperatorKind::Psd));
        labels.push(unique_label(&labels, "icrest"));

        let appended = picked.len() + 1;
        let povm = Povm::validate(effects, labels)?;
        Ok(IcCompletion { povm, input_scale: c, appended })
    }
}

/// Real Hilbert–Schmidt inner product of two hermitian operators.
fn hs_inner<T: Float>(a: &Operator<T>, b: &Operator<T>) -> T {
    let mut acc = T::zero();
    for (x, y) in a.entries().iter().zip(b.entries().iter()) {
        acc = acc + (x.conj() * y).re;
    }
    acc
}

/// Orthonormalizes `m` against `span`; pushes and reports true when the
/// residual is significant.
fn gram_schmidt_push<T: Float>(
    span: &mut Vec<DMatrix<Complex<T>>>,
    mut m: DMatrix<Complex<T>>,
) -> bool {
    for b in span.iter() {
        let overlap: Complex<T> =
            b.iter().zip(m.iter()).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
                acc + x.conj() * *y
            });
        m -= b.map(|z| z * overlap);
    }
    let norm = m.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
    let norm = num_traits::Float::sqrt(norm);
    if norm <= T::from_f64_const(1e-7) {
        return false;
    }
    span.push(m.map(|z| z.unscale(norm)));
    true
}

fn unique_label(existing: &[String], base: &str) -> String {
    let mut candidate = base.to_string();
    while existing.contains(&candidate) {
        candidate.insert(0, '_');
    }
    candidate
}

/// The entities a POVM gives significant measure to.
#[derive(Debug, Clone)]
pub struct RecognizedSupport<T: Float> {
    pub entities: EntitySet,
    pub weights: Vec<T>,
}

/// Result of the informational-completeness test.
#[derive(Debug, Clone, Copy)]
pub struct IcStatus {
    pub complete: bool,
    pub rank: usize,
}

/// An IC POVM embedding the input as its first effects.
#[derive(Debug, Clone)]
pub struct IcCompletion<T: Float> {
    pub povm: Povm<T>,
    /// Common scale on the original effects; divide them back out to
    /// recover the input.
    pub input_scale: T,
    /// Number of appended effects, including the completeness remainder.
    pub appended: usize,
}

/// The record rule: `Some(k)` iff `k` is the unique index with `p_k > ε`
/// (all other probabilities then sit at or below `ε`); otherwise nothing
/// is recorded.
pub fn dominant_outcome<T: Float>(probs: &[T], rule: &DominanceRule<T>) -> Option<usize> {
    let mut above = probs.iter().enumerate().filter(|(_, &p)| p > rule.epsilon());
    match (above.next(), above.next()) {
        (Some((k, _)), None) => Some(k),
        _ => None,
    }
}
