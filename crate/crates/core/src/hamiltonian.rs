//! Pauli-string Hamiltonians and their exact bipartite decompositions.
//!
//! A Hamiltonian is a real-weighted sum of Pauli strings plus an explicit
//! identity offset:
//!
//! ```text
//!   H = c_I · I  +  Σ_k  c_k · P_k,    P_k ∈ {X, Y, Z, I}^⊗N
//! ```
//!
//! Term lists are canonical (sorted by factor signature, duplicates merged,
//! zeros dropped), which makes the decomposition of `H` relative to any
//! entity bipartition exact and unique: each term is routed by the support
//! of its non-identity factors. The identity offset only generates global
//! phase and is excluded from every norm comparison.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::entity::{check_capacity, EntitySet};
use crate::error::{Error, Result};
use crate::math::fabs;
use crate::qcore::{czero, entities_for_dim, Operator, OperatorKind};
use crate::scalar::Float;

/// Single-entity Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn parse(c: char) -> Option<Pauli> {
        match c {
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn matrix<T: Float>(self) -> Operator<T> {
        match self {
            Pauli::X => Operator::pauli_x(),
            Pauli::Y => Operator::pauli_y(),
            Pauli::Z => Operator::pauli_z(),
        }
    }
}

/// One weighted Pauli string. Factors map entity index to a non-identity
/// Pauli; unlisted entities carry the identity. An empty factor map is the
/// explicit identity term.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm<T: Float> {
    pub coefficient: T,
    factors: BTreeMap<usize, Pauli>,
}

impl<T: Float> PauliTerm<T> {
    pub fn new(coefficient: T, factors: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        PauliTerm { coefficient, factors: factors.into_iter().collect() }
    }

    /// The explicit identity term (global energy offset).
    pub fn identity(coefficient: T) -> Self {
        PauliTerm { coefficient, factors: BTreeMap::new() }
    }

    /// Non-identity factors in ascending entity order.
    pub fn factors(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.factors.iter().map(|(&e, &p)| (e, p))
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// Entities carrying a non-identity factor.
    pub fn support(&self) -> EntitySet {
        self.factors.keys().copied().collect()
    }

    /// Canonical ordering key: the factor signature, ignoring coefficient.
    fn signature(&self) -> Vec<(usize, Pauli)> {
        self.factors.iter().map(|(&e, &p)| (e, p)).collect()
    }

    /// Formats as `<coeff> * P<i> P<j> ...` (or `<coeff> * I`).
    pub fn to_text(&self) -> String {
        let mut s = format!("{} *", self.coefficient);
        if self.factors.is_empty() {
            s.push_str(" I");
        } else {
            for (e, p) in self.factors() {
                s.push(' ');
                s.push(p.letter());
                s.push_str(&e.to_string());
            }
        }
        s
    }
}

/// A canonicalized Pauli-string Hamiltonian on a fixed entity count.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerms<T: Float> {
    entity_count: usize,
    terms: Vec<PauliTerm<T>>,
    identity: T,
}

impl<T: Float> HamiltonianTerms<T> {
    /// Builds a canonical term list: duplicates merged by coefficient
    /// addition, zero terms dropped, identity terms folded into the offset.
    pub fn build(entity_count: usize, terms: impl IntoIterator<Item = PauliTerm<T>>) -> Result<Self> {
        check_capacity(entity_count)?;
        let mut identity = T::zero();
        let mut merged: BTreeMap<Vec<(usize, Pauli)>, T> = BTreeMap::new();
        for term in terms {
            if !num_traits::Float::is_finite(term.coefficient) {
                return Err(Error::Argument(format!(
                    "non-finite coefficient in term {}",
                    term.to_text()
                )));
            }
            if let Some(bad) = term.factors.keys().find(|&&e| e >= entity_count) {
                return Err(Error::Argument(format!(
                    "entity {bad} >= {entity_count} in term {}",
                    term.to_text()
                )));
            }
            if term.is_identity() {
                identity = identity + term.coefficient;
            } else {
                let entry = merged.entry(term.signature()).or_insert_with(T::zero);
                *entry = *entry + term.coefficient;
            }
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != T::zero())
            .map(|(sig, c)| PauliTerm { coefficient: c, factors: sig.into_iter().collect() })
            .collect();
        Ok(HamiltonianTerms { entity_count, terms, identity })
    }

    /// The zero Hamiltonian.
    pub fn zero(entity_count: usize) -> Self {
        HamiltonianTerms { entity_count, terms: Vec::new(), identity: T::zero() }
    }

    pub fn entity_count(&self) -> usize {
        self.entity_count
    }

    /// Canonical non-identity terms.
    pub fn terms(&self) -> &[PauliTerm<T>] {
        &self.terms
    }

    /// Global energy offset (coefficient of the identity).
    pub fn identity_offset(&self) -> T {
        self.identity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.identity == T::zero()
    }

    /// Union of the supports of all non-identity terms.
    pub fn support(&self) -> EntitySet {
        let mut s = EntitySet::new();
        for t in &self.terms {
            s = s.union(&t.support());
        }
        s
    }

    /// Dense hermitian realization on the full `2^N` space.
    pub fn realize(&self) -> Result<Operator<T>> {
        check_capacity(self.entity_count)?;
        let dim = 1usize << self.entity_count;
        let mut acc: DMatrix<Complex<T>> = DMatrix::zeros(dim, dim);
        for term in &self.terms {
            acc += term_matrix(term, self.entity_count);
        }
        if self.identity != T::zero() {
            for i in 0..dim {
                acc[(i, i)] += Complex::new(self.identity, T::zero());
            }
        }
        Ok(Operator::from_parts(acc, OperatorKind::Hermitian))
    }

    /// Spectral norm of the non-identity part, computed on the compacted
    /// support so far-away identity factors cost nothing.
    pub fn spectral_norm_compact(&self) -> Result<T> {
        if self.terms.is_empty() {
            return Ok(T::zero());
        }
        let support = self.support();
        let (mut compact, _) = self.restrict(&support)?;
        compact.identity = T::zero();
        Ok(compact.realize()?.spectral_norm())
    }

    /// Terms whose support is entirely inside `subset`, re-indexed onto the
    /// compacted `0..subset.len()` universe. Also returns the ascending
    /// original indices so callers can map back.
    ///
    /// Terms that straddle the subset boundary are dropped; the identity
    /// offset is kept.
    pub fn restrict(&self, subset: &EntitySet) -> Result<(HamiltonianTerms<T>, Vec<usize>)> {
        if subset.is_empty() {
            return Err(Error::Argument("restriction to an empty entity set".into()));
        }
        if !subset.is_subset(&EntitySet::full(self.entity_count)) {
            return Err(Error::Argument(format!(
                "subset {subset} exceeds the {}-entity universe",
                self.entity_count
            )));
        }
        let indices = subset.to_vec();
        let position: BTreeMap<usize, usize> =
            indices.iter().enumerate().map(|(pos, &e)| (e, pos)).collect();
        let mut terms = Vec::new();
        for term in &self.terms {
            if term.support().is_subset(subset) {
                terms.push(PauliTerm {
                    coefficient: term.coefficient,
                    factors: term.factors.iter().map(|(e, &p)| (position[e], p)).collect(),
                });
            }
        }
        let mut restricted = HamiltonianTerms::build(indices.len(), terms)?;
        restricted.identity = self.identity;
        Ok((restricted, indices))
    }

    /// Exact split of the term list relative to `system`: terms supported
    /// inside the system, inside its complement, and across the cut.
    pub fn decompose_bipartite(&self, system: &EntitySet) -> Result<BipartiteSplit<T>> {
        let universe = EntitySet::full(self.entity_count);
        if system.is_empty() || *system == universe {
            return Err(Error::Argument(format!(
                "system {system} must be a nonempty proper subset of the {}-entity universe",
                self.entity_count
            )));
        }
        if !system.is_subset(&universe) {
            return Err(Error::Argument(format!(
                "system {system} exceeds the {}-entity universe",
                self.entity_count
            )));
        }
        let environment = system.complement(self.entity_count);
        let mut self_s = Vec::new();
        let mut self_e = Vec::new();
        let mut int = Vec::new();
        for term in &self.terms {
            let support = term.support();
            if support.is_subset(system) {
                self_s.push(term.clone());
            } else if support.is_subset(&environment) {
                self_e.push(term.clone());
            } else {
                int.push(term.clone());
            }
        }
        let h_self_s = HamiltonianTerms::build(self.entity_count, self_s)?;
        let h_self_e = HamiltonianTerms::build(self.entity_count, self_e)?;
        let h_int = HamiltonianTerms::build(self.entity_count, int)?;
        let norms = SplitNorms {
            self_s: h_self_s.spectral_norm_compact()?,
            self_e: h_self_e.spectral_norm_compact()?,
            interaction: h_int.spectral_norm_compact()?,
        };
        Ok(BipartiteSplit {
            system: *system,
            identity: self.identity,
            h_self_s,
            h_self_e,
            h_int,
            norms,
        })
    }

    /// Terms whose non-identity support is exactly `{i, j}` — the direct
    /// interaction between one pair of entities.
    pub fn pairwise_interaction(&self, i: usize, j: usize) -> Result<HamiltonianTerms<T>> {
        if i == j {
            return Err(Error::Argument(format!(
                "pairwise interaction needs distinct entities, got {i} twice"
            )));
        }
        let pair: EntitySet = [i, j].into_iter().collect();
        let picked: Vec<PauliTerm<T>> =
            self.terms.iter().filter(|t| t.support() == pair).cloned().collect();
        HamiltonianTerms::build(self.entity_count, picked)
    }

    /// One term per line in the canonical text syntax.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&t.to_text());
            out.push('\n');
        }
        if self.identity != T::zero() {
            out.push_str(&PauliTerm::identity(self.identity).to_text());
            out.push('\n');
        }
        out
    }

    /// Parses the line-oriented text syntax `<coeff> * <P><idx> [...]`.
    ///
    /// Blank lines and `#` comments are skipped; `<coeff> * I` denotes the
    /// identity term.
    pub fn parse(entity_count: usize, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            terms.push(
                parse_term(line)
                    .map_err(|msg| Error::Argument(format!("term line {}: {msg}", lineno + 1)))?,
            );
        }
        HamiltonianTerms::build(entity_count, terms)
    }
}

impl<T: Float> fmt::Display for HamiltonianTerms<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

fn parse_term<T: Float>(line: &str) -> std::result::Result<PauliTerm<T>, String> {
    let (coeff_text, factors_text) = line
        .split_once('*')
        .ok_or_else(|| format!("expected `<coeff> * <factors>`, got {line:?}"))?;
    let coeff: f64 = coeff_text
        .trim()
        .parse()
        .map_err(|_| format!("bad coefficient {:?}", coeff_text.trim()))?;
    let coefficient =
        T::from_f64(coeff).ok_or_else(|| format!("coefficient {coeff} does not fit the scalar"))?;
    let mut factors = BTreeMap::new();
    let mut saw_identity = false;
    for token in factors_text.split_whitespace() {
        if token == "I" {
            saw_identity = true;
            continue;
        }
        let mut chars = token.chars();
        let letter = chars.next().ok_or_else(|| "empty factor".to_string())?;
        let pauli = Pauli::parse(letter).ok_or_else(|| format!("bad Pauli letter in {token:?}"))?;
        let idx: usize =
            chars.as_str().parse().map_err(|_| format!("bad entity index in {token:?}"))?;
        if factors.insert(idx, pauli).is_some() {
            return Err(format!("entity {idx} listed twice"));
        }
    }
    if factors.is_empty() && !saw_identity {
        return Err("term has no factors (use `I` for the identity term)".into());
    }
    if saw_identity && !factors.is_empty() {
        return Err("identity factor mixed with Pauli factors".into());
    }
    Ok(PauliTerm { coefficient, factors })
}

/// Dense matrix of a single Pauli term on `entities` factors.
fn term_matrix<T: Float>(term: &PauliTerm<T>, entities: usize) -> DMatrix<Complex<T>> {
    let dim = 1usize << entities;
    let mut m = DMatrix::from_diagonal_element(1, 1, Complex::new(term.coefficient, T::zero()));
    for e in 0..entities {
        let factor: DMatrix<Complex<T>> = match term.factors.get(&e) {
            None => DMatrix::identity(2, 2),
            Some(p) => p.matrix::<T>().into_entries(),
        };
        m = m.kronecker(&factor);
    }
    debug_assert_eq!(m.nrows(), dim);
    m
}

/// Norms of the three parts of a [`BipartiteSplit`] (identity excluded).
#[derive(Debug, Clone, Copy)]
pub struct SplitNorms<T: Float> {
    pub self_s: T,
    pub self_e: T,
    pub interaction: T,
}

/// Exact bipartite decomposition `H = H_S + H_E + H_int (+ identity)`.
#[derive(Debug, Clone)]
pub struct BipartiteSplit<T: Float> {
    system: EntitySet,
    identity: T,
    pub h_self_s: HamiltonianTerms<T>,
    pub h_self_e: HamiltonianTerms<T>,
    pub h_int: HamiltonianTerms<T>,
    pub norms: SplitNorms<T>,
}

impl<T: Float> BipartiteSplit<T> {
    pub fn system(&self) -> EntitySet {
        self.system
    }

    /// Identity offset carried over from the input.
    pub fn identity_offset(&self) -> T {
        self.identity
    }

    /// Re-assembles the full Hamiltonian from the parts.
    pub fn reassemble(&self) -> Result<HamiltonianTerms<T>> {
        let n = self.h_self_s.entity_count();
        let mut terms: Vec<PauliTerm<T>> = Vec::new();
        terms.extend(self.h_self_s.terms().iter().cloned());
        terms.extend(self.h_self_e.terms().iter().cloned());
        terms.extend(self.h_int.terms().iter().cloned());
        terms.push(PauliTerm::identity(self.identity));
        HamiltonianTerms::build(n, terms)
    }
}

/// Expands a dense operator in the Pauli-string basis.
///
/// Returns the `4^N` coefficients of `A = Σ_s c_s P_s` indexed by the
/// base-4 string code with entity 0 as the most significant digit
/// (0 = I, 1 = X, 2 = Y, 3 = Z). For hermitian input every coefficient is
/// real up to roundoff.
pub fn pauli_decompose<T: Float>(op: &Operator<T>) -> Result<Vec<Complex<T>>> {
    let entities = entities_for_dim(op.dim())?;
    let mut coeffs = vec![czero::<T>(); 1 << (2 * entities)];
    decompose_rec(op.entries(), entities, 0, &mut coeffs);
    Ok(coeffs)
}

/// Peels off the leading entity: the four quadrant combinations of the
/// matrix are the I/X/Y/Z components on that entity, each recursing on a
/// half-size block.
fn decompose_rec<T: Float>(
    m: &DMatrix<Complex<T>>,
    entities: usize,
    base: usize,
    coeffs: &mut [Complex<T>],
) {
    if entities == 0 {
        coeffs[base] += m[(0, 0)];
        return;
    }
    let h = m.nrows() / 2;
    let half = T::from_f64_const(0.5);
    let a = m.view((0, 0), (h, h));
    let b = m.view((0, h), (h, h));
    let c = m.view((h, 0), (h, h));
    let d = m.view((h, h), (h, h));

    let comp_i = (a + d).map(|z| z.scale(half));
    let comp_x = (b + c).map(|z| z.scale(half));
    let comp_y = (b - c).map(|z| (z * Complex::new(T::zero(), T::one())).scale(half));
    let comp_z = (a - d).map(|z| z.scale(half));

    let stride = 1usize << (2 * (entities - 1));
    decompose_rec(&comp_i, entities - 1, base, coeffs);
    decompose_rec(&comp_x, entities - 1, base + stride, coeffs);
    decompose_rec(&comp_y, entities - 1, base + 2 * stride, coeffs);
    decompose_rec(&comp_z, entities - 1, base + 3 * stride, coeffs);
}

/// Decodes one digit of a base-4 Pauli string code.
pub fn pauli_code_digit(code: usize, entity: usize, entities: usize) -> Option<Pauli> {
    let shift = 2 * (entities - 1 - entity);
    match (code >> shift) & 3 {
        0 => None,
        1 => Some(Pauli::X),
        2 => Some(Pauli::Y),
        _ => Some(Pauli::Z),
    }
}

/// Rebuilds a term list from dense Pauli coefficients, dropping entries
/// with |c| below `tol`.
pub fn terms_from_coeffs<T: Float>(
    coeffs: &[Complex<T>],
    entities: usize,
    tol: T,
) -> Result<HamiltonianTerms<T>> {
    let mut terms = Vec::new();
    for (code, c) in coeffs.iter().enumerate() {
        if fabs(c.re) <= tol && fabs(c.im) <= tol {
            continue;
        }
        let factors: Vec<(usize, Pauli)> = (0..entities)
            .filter_map(|e| pauli_code_digit(code, e, entities).map(|p| (e, p)))
            .collect();
        if factors.is_empty() {
            terms.push(PauliTerm::identity(c.re));
        } else {
            terms.push(PauliTerm::new(c.re, factors));
        }
    }
    HamiltonianTerms::build(entities, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn zz(i: usize, j: usize, c: f64) -> PauliTerm<f64> {
        PauliTerm::new(c, [(i, Pauli::Z), (j, Pauli::Z)])
    }

    fn x(i: usize, c: f64) -> PauliTerm<f64> {
        PauliTerm::new(c, [(i, Pauli::X)])
    }

    #[test]
    fn build_merges_duplicates() {
        let h = HamiltonianTerms::build(2, [zz(0, 1, 0.5), zz(0, 1, 0.5)]).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_relative_eq!(h.terms()[0].coefficient, 1.0);
    }

    #[test]
    fn build_cancels_to_empty() {
        let h = HamiltonianTerms::build(2, [x(0, 1.0), x(0, -1.0)]).unwrap();
        assert!(h.terms().is_empty());
        assert!(h.is_zero());
    }

    #[test]
    fn build_rejects_out_of_range_index() {
        let err = HamiltonianTerms::build(2, [x(5, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
        assert!(err.to_string().contains("entity 5 >= 2"));
    }

    #[test]
    fn build_is_order_independent() {
        let a = HamiltonianTerms::build(3, [zz(0, 1, 1.0), x(2, 0.3), x(0, -0.2)]).unwrap();
        let b = HamiltonianTerms::build(3, [x(0, -0.2), zz(0, 1, 1.0), x(2, 0.3)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identity_terms_fold_into_offset() {
        let h = HamiltonianTerms::build(
            1,
            [PauliTerm::identity(0.25), PauliTerm::identity(0.5), x(0, 1.0)],
        )
        .unwrap();
        assert_relative_eq!(h.identity_offset(), 0.75);
        assert_eq!(h.terms().len(), 1);
        // The offset shifts every eigenvalue but not norm comparisons.
        assert_relative_eq!(h.spectral_norm_compact().unwrap(), 1.0);
    }

    #[test]
    fn decompose_routes_by_support() {
        let h = HamiltonianTerms::build(
            2,
            [PauliTerm::new(1.0, [(0, Pauli::Z)]), x(1, 1.0), zz(0, 1, 0.5)],
        )
        .unwrap();
        let split = h.decompose_bipartite(&EntitySet::single(0)).unwrap();
        assert_eq!(split.h_self_s.terms().len(), 1);
        assert_eq!(split.h_self_e.terms().len(), 1);
        assert_eq!(split.h_int.terms().len(), 1);
        assert_relative_eq!(split.norms.self_s, 1.0, epsilon = 1e-12);
        assert_relative_eq!(split.norms.self_e, 1.0, epsilon = 1e-12);
        assert_relative_eq!(split.norms.interaction, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn decompose_pure_interaction() {
        let h = HamiltonianTerms::build(2, [zz(0, 1, 1.0)]).unwrap();
        let split = h.decompose_bipartite(&EntitySet::single(0)).unwrap();
        assert!(split.h_self_s.terms().is_empty());
        assert!(split.h_self_e.terms().is_empty());
        assert_eq!(split.h_int.terms().len(), 1);
    }

    #[test]
    fn decompose_rejects_trivial_bipartitions() {
        let h = HamiltonianTerms::build(2, [zz(0, 1, 1.0)]).unwrap();
        assert!(h.decompose_bipartite(&EntitySet::EMPTY).is_err());
        assert!(h.decompose_bipartite(&EntitySet::full(2)).is_err());
    }

    #[test]
    fn pairwise_picks_exact_support() {
        let chain = HamiltonianTerms::build(3, [zz(0, 1, 1.0), zz(1, 2, 1.0)]).unwrap();
        let h01 = chain.pairwise_interaction(0, 1).unwrap();
        assert_eq!(h01.terms().len(), 1);
        assert_eq!(h01.terms()[0].support().to_vec(), vec![0, 1]);
        let h02 = chain.pairwise_interaction(0, 2).unwrap();
        assert!(h02.terms().is_empty());
        assert!(chain.pairwise_interaction(1, 1).is_err());
    }

    #[test]
    fn text_round_trip() {
        let h = HamiltonianTerms::build(3, [zz(0, 1, 0.5), x(2, 1.0), PauliTerm::identity(0.25)])
            .unwrap();
        let text = h.to_text();
        assert_eq!(text, "0.5 * Z0 Z1\n1 * X2\n0.25 * I\n");
        let back: HamiltonianTerms<f64> = HamiltonianTerms::parse(3, &text).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn parse_reports_bad_lines() {
        let err = HamiltonianTerms::<f64>::parse(2, "0.5 * Q0").unwrap_err();
        assert!(err.to_string().contains("line 1"));
        let err = HamiltonianTerms::<f64>::parse(2, "0.5 Z0").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn realize_matches_pauli_decompose_round_trip() {
        let h = HamiltonianTerms::build(
            3,
            [zz(0, 1, 1.0), x(2, 0.3), PauliTerm::new(-0.7, [(0, Pauli::Y), (2, Pauli::X)])],
        )
        .unwrap();
        let dense = h.realize().unwrap();
        let coeffs = pauli_decompose(&dense).unwrap();
        let back = terms_from_coeffs(&coeffs, 3, 1e-12).unwrap();
        assert_eq!(back.terms().len(), h.terms().len());
        for (a, b) in back.terms().iter().zip(h.terms()) {
            assert_eq!(a.support(), b.support());
            assert_relative_eq!(a.coefficient, b.coefficient, epsilon = 1e-12);
        }
    }
}
