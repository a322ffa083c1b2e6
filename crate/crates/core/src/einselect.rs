//! Hamiltonian-dominance einselection conditions and their consequences.
//!
//! The einselection conditions for a system `S` monitored through a
//! proximate environmental fragment `F` demand that the self-Hamiltonians
//! of both sides be dominated by their interaction. Dominance is
//! operationalized as `‖H_S‖/‖H_{S-F}‖ ≤ η` and `‖H_F‖/‖H_{S-F}‖ ≤ η`
//! for a configurable threshold `η`, with spectral norms throughout and
//! the Hamiltonian restricted to `S ∪ F`.
//!
//! On top of the conditions this module extracts the pointer basis from
//! the operator-Schmidt decomposition of the interaction, the coupling
//! matrix `λ_jk` in a jointly diagonalizing basis pair, the halo of
//! single-entity perturbations of `S`, the impossibility check for two
//! non-overlapping systems claiming each other's fragments, and the
//! mutual-information separability test for fragment pairs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::entity::EntitySet;
use crate::error::{Error, Result};
use crate::hamiltonian::{terms_from_coeffs, HamiltonianTerms, Pauli, PauliTerm};
use crate::math::{fabs, fmax};
use crate::qcore::{cluster_ranges, normalize_column_phase, Operator, OperatorKind, StateVector};
use crate::scalar::Float;

/// Commutator-norm threshold below which Schmidt factors count as
/// commuting and the pointer basis is exact.
pub const EXACT_COMMUTATOR_TOL: f64 = 1e-9;
/// Off-diagonal leakage allowed by [`coupling_matrix`].
pub const JOINT_DIAGONAL_TOL: f64 = 1e-9;
/// Relative cutoff for discarding numerically-zero Schmidt weights.
const SCHMIDT_WEIGHT_CUTOFF: f64 = 1e-12;

/// Outcome of the dominance conditions for one `(S, F)` pair.
#[derive(Debug, Clone)]
pub struct EinselectReport<T: Float> {
    pub system: EntitySet,
    pub fragment: EntitySet,
    /// `‖H_S‖ / ‖H_{S-F}‖`; `+∞` when the interaction vanishes.
    pub ratio_s: T,
    /// `‖H_F‖ / ‖H_{S-F}‖`; `+∞` when the interaction vanishes.
    pub ratio_f: T,
    pub eta: T,
    /// `‖H_{S-F}‖` on the restricted universe.
    pub interaction_norm: T,
    pub satisfied: bool,
}

impl<T: Float> EinselectReport<T> {
    /// `max(ratio_s, ratio_f)`, the quantity the halo orders by.
    pub fn ratio(&self) -> T {
        fmax(self.ratio_s, self.ratio_f)
    }
}

fn validate_eta<T: Float>(eta: T) -> Result<()> {
    if !(eta > T::zero() && eta < T::one()) {
        return Err(Error::Argument(format!("eta must lie in (0,1), got {eta}")));
    }
    Ok(())
}

/// Evaluates the dominance conditions for `system` against `fragment`.
///
/// The Hamiltonian is restricted to terms supported inside `S ∪ F`; the
/// three parts come from routing each term by support. A vanishing
/// interaction yields `satisfied = false` with infinite ratio sentinels.
pub fn check_conditions<T: Float>(
    h: &HamiltonianTerms<T>,
    system: &EntitySet,
    fragment: &EntitySet,
    eta: T,
) -> Result<EinselectReport<T>> {
    validate_eta(eta)?;
    if system.is_empty() || fragment.is_empty() {
        return Err(Error::Argument("system and fragment must be nonempty".into()));
    }
    if !system.is_disjoint(fragment) {
        return Err(Error::Argument(format!(
            "system {system} and fragment {fragment} overlap"
        )));
    }
    let pool = system.union(fragment);
    if !pool.is_subset(&EntitySet::full(h.entity_count())) {
        return Err(Error::Argument(format!(
            "{pool} exceeds the {}-entity universe",
            h.entity_count()
        )));
    }
    let (restricted, indices) = h.restrict(&pool)?;
    let compact_system: EntitySet = indices
        .iter()
        .enumerate()
        .filter(|(_, e)| system.contains(**e))
        .map(|(pos, _)| pos)
        .collect();
    let split = restricted.decompose_bipartite(&compact_system)?;
    let interaction_norm = split.norms.interaction;
    let (ratio_s, ratio_f, satisfied) = if interaction_norm > T::zero() {
        let rs = split.norms.self_s / interaction_norm;
        let rf = split.norms.self_e / interaction_norm;
        (rs, rf, fmax(rs, rf) <= eta)
    } else {
        (T::infinity(), T::infinity(), false)
    };
    Ok(EinselectReport {
        system: *system,
        fragment: *fragment,
        ratio_s,
        ratio_f,
        eta,
        interaction_norm,
        satisfied,
    })
}

/// One term of an operator-Schmidt decomposition of an interaction.
///
/// `system_part` absorbs the Schmidt weight, so the interaction equals
/// `Σ_m system_part_m ⊗ fragment_part_m` on the reordered
/// (system-block ⊗ fragment-block) space.
#[derive(Debug, Clone)]
pub struct SchmidtPair<T: Float> {
    pub weight: T,
    pub system_part: Operator<T>,
    pub fragment_part: Operator<T>,
}

/// Operator-Schmidt decomposition of an interaction Hamiltonian across the
/// cut between `system` entities and the rest of the term support.
#[derive(Debug, Clone)]
pub struct OperatorSchmidt<T: Float> {
    /// Ascending original indices of the system-side entities.
    pub system_entities: Vec<usize>,
    /// Ascending original indices of the fragment-side entities.
    pub fragment_entities: Vec<usize>,
    /// Pairs in descending weight order.
    pub pairs: Vec<SchmidtPair<T>>,
}

/// Decomposes `h_int` as `Σ_m A_m ⊗ B_m` across the system/fragment cut.
///
/// Each Pauli term splits exactly into a system-side and a fragment-side
/// string, so the decomposition is the real SVD of the term-coefficient
/// matrix in the Pauli operator basis; the factors come out hermitian by
/// construction. Column signs are fixed so each system factor's largest
/// coefficient is positive.
pub fn operator_schmidt<T: Float>(
    h_int: &HamiltonianTerms<T>,
    system: &EntitySet,
) -> Result<OperatorSchmidt<T>> {
    if h_int.terms().is_empty() {
        return Err(Error::ZeroInteraction);
    }
    let support = h_int.support();
    let s_set = support.intersection(system);
    let f_set = support.difference(system);
    if s_set.is_empty() {
        return Err(Error::Argument("interaction has no support on the system".into()));
    }
    if f_set.is_empty() {
        return Err(Error::Argument("interaction has no support outside the system".into()));
    }
    let s_entities = s_set.to_vec();
    let f_entities = f_set.to_vec();
    let ns = s_entities.len();
    let nf = f_entities.len();

    let mut coeff = DMatrix::<T>::zeros(1 << (2 * ns), 1 << (2 * nf));
    for term in h_int.terms() {
        let row = pauli_code(&s_entities, term);
        let col = pauli_code(&f_entities, term);
        coeff[(row, col)] = coeff[(row, col)] + term.coefficient;
    }

    let svd = coeff.svd(true, true);
    let u = svd.u.as_ref().expect("svd computed with u");
    let v_t = svd.v_t.as_ref().expect("svd computed with v");
    let smax = svd.singular_values.iter().fold(T::zero(), |a, &s| fmax(a, s));
    if smax == T::zero() {
        return Err(Error::ZeroInteraction);
    }
    let cutoff = T::from_f64_const(SCHMIDT_WEIGHT_CUTOFF) * smax;

    let mut pairs = Vec::new();
    for (m, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            continue;
        }
        let mut uc: DVector<T> = u.column(m).into_owned();
        let mut vc: DVector<T> = v_t.row(m).transpose();
        // Deterministic sign: largest |entry| of the system column positive.
        let mut pivot = 0;
        for i in 0..uc.len() {
            if fabs(uc[i]) > fabs(uc[pivot]) {
                pivot = i;
            }
        }
        if uc[pivot] < T::zero() {
            uc = -uc;
            vc = -vc;
        }
        let system_part = realize_pauli_coeffs(uc.map(|x| x * s).as_slice(), ns)?;
        let fragment_part = realize_pauli_coeffs(vc.as_slice(), nf)?;
        pairs.push(SchmidtPair { weight: s, system_part, fragment_part });
    }
    Ok(OperatorSchmidt { system_entities: s_entities, fragment_entities: f_entities, pairs })
}

/// Base-4 Pauli code of a term restricted to `entities`, first entity most
/// significant (0 = I, 1 = X, 2 = Y, 3 = Z).
fn pauli_code<T: Float>(entities: &[usize], term: &PauliTerm<T>) -> usize {
    let mut code = 0usize;
    for (pos, &e) in entities.iter().enumerate() {
        if let Some((_, p)) = term.factors().find(|(fe, _)| *fe == e) {
            let digit = match p {
                Pauli::X => 1,
                Pauli::Y => 2,
                Pauli::Z => 3,
            };
            code |= digit << (2 * (entities.len() - 1 - pos));
        }
    }
    code
}

/// Realizes `Σ_code coeffs[code] · P_code` densely on `entities` factors.
fn realize_pauli_coeffs<T: Float>(coeffs: &[T], entities: usize) -> Result<Operator<T>> {
    let complex: Vec<Complex<T>> = coeffs.iter().map(|&x| Complex::new(x, T::zero())).collect();
    let terms = terms_from_coeffs(&complex, entities, T::zero())?;
    terms.realize()
}

/// Pointer basis extracted from an interaction Hamiltonian.
#[derive(Debug, Clone)]
pub struct PointerBasis<T: Float> {
    /// System entities (ascending original indices) the basis lives on.
    pub entities: Vec<usize>,
    /// Unitary whose columns are the pointer states.
    pub vectors: Operator<T>,
    /// True when all system-side Schmidt factors commute within
    /// [`EXACT_COMMUTATOR_TOL`]; the basis then diagonalizes every factor.
    pub exact: bool,
    /// Largest pairwise commutator norm among the weighted factors.
    pub residual_commutator_norm: T,
    /// Schmidt weights in descending order.
    pub schmidt_weights: Vec<T>,
    /// The decomposition the basis was derived from.
    pub schmidt: OperatorSchmidt<T>,
}

/// Extracts the basis einselected for `system` by `h_int`.
///
/// When the system-side Schmidt factors all commute, their common
/// eigenbasis is the exact pointer basis. Otherwise the eigenbasis of the
/// dominant factor is returned, tagged approximate, with the worst
/// commutator norm as the diagnostic.
pub fn pointer_basis<T: Float>(
    h_int: &HamiltonianTerms<T>,
    system: &EntitySet,
) -> Result<PointerBasis<T>> {
    let schmidt = operator_schmidt(h_int, system)?;
    let factors: Vec<&Operator<T>> = schmidt.pairs.iter().map(|p| &p.system_part).collect();

    let mut residual = T::zero();
    for i in 0..factors.len() {
        for j in (i + 1)..factors.len() {
            let ab = factors[i].mul(factors[j])?;
            let ba = factors[j].mul(factors[i])?;
            let comm = Operator::from_parts(ab.entries() - ba.entries(), OperatorKind::General);
            residual = fmax(residual, comm.spectral_norm());
        }
    }

    let exact = residual <= T::from_f64_const(EXACT_COMMUTATOR_TOL);
    let vectors = if exact {
        common_eigenbasis(&factors)?
    } else {
        factors[0].eigh()?.vectors
    };
    Ok(PointerBasis {
        entities: schmidt.system_entities.clone(),
        vectors,
        exact,
        residual_commutator_norm: residual,
        schmidt_weights: schmidt.pairs.iter().map(|p| p.weight).collect(),
        schmidt,
    })
}

/// Common eigenbasis of a family of commuting hermitian operators,
/// deterministic via successive refinement of degenerate blocks.
fn common_eigenbasis<T: Float>(factors: &[&Operator<T>]) -> Result<Operator<T>> {
    let dim = factors[0].dim();
    let first = factors[0].eigh()?;
    let mut vectors = first.vectors.entries().clone();
    let scale = first.values.iter().fold(T::one(), |a, &v| fmax(a, fabs(v)));
    let tol = T::from_f64_const(1e-8) * scale;
    let mut blocks: Vec<(usize, usize)> = cluster_ranges(&first.values, tol);

    for factor in &factors[1..] {
        let mut refined = Vec::new();
        for &(start, end) in &blocks {
            let width = end - start;
            if width == 1 {
                refined.push((start, end));
                continue;
            }
            let block = vectors.columns(start, width).clone_owned();
            let sub = block.adjoint() * factor.entries() * &block;
            let sub_eig = Operator::from_parts(sub, OperatorKind::Hermitian).eigh()?;
            let rotated = &block * sub_eig.vectors.entries();
            for (offset, col) in (start..end).enumerate() {
                vectors.set_column(col, &rotated.column(offset));
            }
            let sub_scale = sub_eig.values.iter().fold(T::one(), |a, &v| fmax(a, fabs(v)));
            let sub_tol = T::from_f64_const(1e-8) * sub_scale;
            for (s, e) in cluster_ranges(&sub_eig.values, sub_tol) {
                refined.push((start + s, start + e));
            }
        }
        blocks = refined;
    }
    for col in 0..dim {
        normalize_column_phase(&mut vectors, col);
    }
    Ok(Operator::from_parts(vectors, OperatorKind::Unitary))
}

/// The coupling matrix `λ_jk` of an interaction in a jointly diagonalizing
/// basis pair: row `j` indexes the fragment basis, column `k` the system
/// basis.
#[derive(Debug, Clone)]
pub struct CouplingMatrix<T: Float> {
    pub lambda: DMatrix<T>,
    pub system_entities: Vec<usize>,
    pub fragment_entities: Vec<usize>,
}

/// Computes `λ_jk = ⟨s_k f_j| H_int |s_k f_j⟩`, requiring the product
/// basis to diagonalize the interaction within [`JOINT_DIAGONAL_TOL`].
pub fn coupling_matrix<T: Float>(
    h_int: &HamiltonianTerms<T>,
    system: &EntitySet,
    s_basis: &Operator<T>,
    f_basis: &Operator<T>,
) -> Result<CouplingMatrix<T>> {
    if h_int.terms().is_empty() {
        return Err(Error::ZeroInteraction);
    }
    let support = h_int.support();
    let s_entities = support.intersection(system).to_vec();
    let f_entities = support.difference(system).to_vec();
    if s_entities.is_empty() || f_entities.is_empty() {
        return Err(Error::Argument(
            "interaction must touch both the system and the fragment".into(),
        ));
    }
    let ds = 1usize << s_entities.len();
    let df = 1usize << f_entities.len();
    if s_basis.dim() != ds {
        return Err(Error::DimMismatch { left: s_basis.dim(), right: ds });
    }
    if f_basis.dim() != df {
        return Err(Error::DimMismatch { left: f_basis.dim(), right: df });
    }
    for basis in [s_basis, f_basis] {
        let gram = basis.entries().adjoint() * basis.entries();
        let res = (gram - DMatrix::identity(basis.dim(), basis.dim()))
            .iter()
            .fold(T::zero(), |a, z| fmax(a, z.norm()));
        if res > T::from_f64_const(1e-9) {
            return Err(Error::NotUnitary { residual: res.as_diag() });
        }
    }

    let reordered = reorder_to_blocks(h_int, &s_entities, &f_entities)?;
    let product = s_basis.entries().kronecker(f_basis.entries());
    let m = product.adjoint() * reordered.entries() * product;

    let mut leakage = T::zero();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if r != c {
                leakage = fmax(leakage, m[(r, c)].norm());
            }
        }
    }
    if leakage > T::from_f64_const(JOINT_DIAGONAL_TOL) {
        return Err(Error::NotJointlyDiagonal { leakage: leakage.as_diag() });
    }
    let mut lambda = DMatrix::<T>::zeros(df, ds);
    for k in 0..ds {
        for j in 0..df {
            lambda[(j, k)] = m[(k * df + j, k * df + j)].re;
        }
    }
    Ok(CouplingMatrix { lambda, system_entities: s_entities, fragment_entities: f_entities })
}

/// Realizes the interaction on its support with entities reordered to
/// (system block, fragment block).
fn reorder_to_blocks<T: Float>(
    h_int: &HamiltonianTerms<T>,
    s_entities: &[usize],
    f_entities: &[usize],
) -> Result<Operator<T>> {
    let mut position = std::collections::BTreeMap::new();
    for (pos, &e) in s_entities.iter().chain(f_entities.iter()).enumerate() {
        position.insert(e, pos);
    }
    let n = position.len();
    let mut terms = Vec::new();
    for term in h_int.terms() {
        let factors: Vec<(usize, Pauli)> =
            term.factors().map(|(e, p)| (position[&e], p)).collect();
        terms.push(PauliTerm::new(term.coefficient, factors));
    }
    HamiltonianTerms::build(n, terms)?.realize()
}

/// One candidate system in a halo scan.
#[derive(Debug, Clone)]
pub struct HaloEntry<T: Float> {
    pub candidate: EntitySet,
    /// `max(ratio_s, ratio_f)` for the candidate; `+∞` when the adjusted
    /// fragment is empty or the interaction vanishes.
    pub ratio: T,
    pub in_halo: bool,
    /// Full report, absent when the adjusted fragment is empty.
    pub report: Option<EinselectReport<T>>,
}

/// Scans single-entity perturbations of `system` within `system ∪ fragment`.
///
/// Candidates add one fragment entity, drop one system entity (when that
/// leaves the system nonempty), and optionally swap one of each. Each
/// candidate `S'` is checked against `F' = (S ∪ F) \ S'`; entries sort by
/// ratio ascending with the candidate set as the tie-break.
pub fn halo_scan<T: Float>(
    h: &HamiltonianTerms<T>,
    system: &EntitySet,
    fragment: &EntitySet,
    eta: T,
    include_swaps: bool,
) -> Result<Vec<HaloEntry<T>>> {
    validate_eta(eta)?;
    if system.is_empty() || fragment.is_empty() {
        return Err(Error::Argument("system and fragment must be nonempty".into()));
    }
    if !system.is_disjoint(fragment) {
        return Err(Error::Argument(format!(
            "system {system} and fragment {fragment} overlap"
        )));
    }
    let pool = system.union(fragment);
    let mut candidates: Vec<EntitySet> = Vec::new();
    for k in fragment.iter() {
        candidates.push(system.with(k));
    }
    for k in system.iter() {
        let shrunk = system.without(k);
        if !shrunk.is_empty() {
            candidates.push(shrunk);
        }
    }
    if include_swaps {
        for add in fragment.iter() {
            for rm in system.iter() {
                candidates.push(system.with(add).without(rm));
            }
        }
    }

    let mut entries = Vec::with_capacity(candidates.len());
    for candidate in candidates {
        let adjusted = pool.difference(&candidate);
        let entry = if adjusted.is_empty() {
            HaloEntry { candidate, ratio: T::infinity(), in_halo: false, report: None }
        } else {
            let report = check_conditions(h, &candidate, &adjusted, eta)?;
            HaloEntry {
                candidate,
                ratio: report.ratio(),
                in_halo: report.satisfied,
                report: Some(report),
            }
        };
        entries.push(entry);
    }
    entries.sort_by(|a, b| {
        a.ratio
            .partial_cmp(&b.ratio)
            .expect("ratios are never NaN")
            .then(a.candidate.cmp(&b.candidate))
    });
    Ok(entries)
}

/// Outcome of the two-system exclusion check.
#[derive(Debug, Clone)]
pub struct ExclusionOutcome<T: Float> {
    pub report1: EinselectReport<T>,
    pub report2: EinselectReport<T>,
    /// True when the universe is exactly `s1 ∪ s2`, so each "fragment"
    /// coincides with the other system and the containment structure
    /// collapses.
    pub degenerate: bool,
    pub both: bool,
}

/// Checks whether two non-overlapping systems can simultaneously satisfy
/// the conditions with each embedded in the other's complement.
///
/// `F¹` is the complement of `s1` (it contains `s2`) and vice versa. When
/// the shared environment outside both systems is empty the containment
/// structure degenerates and `both` is false by definition.
pub fn exclusion_check<T: Float>(
    h: &HamiltonianTerms<T>,
    s1: &EntitySet,
    s2: &EntitySet,
    eta: T,
) -> Result<ExclusionOutcome<T>> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::Argument("both systems must be nonempty".into()));
    }
    if !s1.is_disjoint(s2) {
        return Err(Error::Argument(format!("systems {s1} and {s2} overlap")));
    }
    let n = h.entity_count();
    let universe = EntitySet::full(n);
    if !s1.union(s2).is_subset(&universe) {
        return Err(Error::Argument(format!(
            "systems exceed the {n}-entity universe"
        )));
    }
    let f1 = s1.complement(n);
    let f2 = s2.complement(n);
    let degenerate = f1.difference(s2).is_empty();
    let report1 = check_conditions(h, s1, &f1, eta)?;
    let report2 = check_conditions(h, s2, &f2, eta)?;
    let both = report1.satisfied && report2.satisfied && !degenerate;
    Ok(ExclusionOutcome { report1, report2, degenerate, both })
}

/// Mutual-information separability verdict for a fragment pair.
#[derive(Debug, Clone, Copy)]
pub struct Separability<T: Float> {
    /// `I(F1:F2) = S(ρ_F1) + S(ρ_F2) − S(ρ_F1∪F2)` in nats.
    pub mutual_information: T,
    pub separable_fapp: bool,
}

/// Quantum mutual information between two disjoint fragments of a pure
/// global state; zero iff the joint marginal is a product.
pub fn fragment_separability<T: Float>(
    psi: &StateVector<T>,
    f1: &EntitySet,
    f2: &EntitySet,
    tol: T,
) -> Result<Separability<T>> {
    if f1.is_empty() || f2.is_empty() {
        return Err(Error::Argument("fragments must be nonempty".into()));
    }
    if !f1.is_disjoint(f2) {
        return Err(Error::Argument(format!("fragments {f1} and {f2} overlap")));
    }
    let universe = EntitySet::full(psi.entities());
    if !f1.union(f2).is_subset(&universe) {
        return Err(Error::Argument(format!(
            "fragments exceed the {}-entity universe",
            psi.entities()
        )));
    }
    let rho = psi.density();
    let s1 = rho.partial_trace(f1)?.von_neumann_entropy();
    let s2 = rho.partial_trace(f2)?.von_neumann_entropy();
    let s12 = rho.partial_trace(&f1.union(f2))?.von_neumann_entropy();
    let mutual_information = s1 + s2 - s12;
    Ok(Separability { mutual_information, separable_fapp: mutual_information <= tol })
}
