//! The virtual machine induced by observation: a stochastic finite state
//! machine over record labels.
//!
//! The unitary propagator acts on the physical state; the observer's
//! records live in a different space entirely, and consecutive records
//! define transitions of a classical FSM. This module estimates that
//! machine from traces (`infer_fsm`), computes the analytic transition
//! law a witness-mode observer would predict from Born probabilities
//! along the exact trajectory (`predict_transitions`), compares the two
//! (`fsm_diff`), and exports the machine as a plain-text graph.
//!
//! FSM states are exactly the outcome labels that appear in the traces,
//! in lexicographic order.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianTerms;
use crate::math::{fabs, fmax, fsqrt};
use crate::observer::{ObservationSchedule, RecordTrace};
use crate::povm::{dominant_outcome, DominanceRule, ObservationMode, Povm};
use crate::qcore::{evolve_with_eig, StateVector};
use crate::scalar::Float;

/// How a gap (a "recorded nothing") affects transition counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapPolicy {
    /// A gap ends the current run; transitions never span a gap.
    Break,
    /// Gaps are skipped; the records on either side count as adjacent.
    Bridge,
}

impl GapPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            GapPolicy::Break => "break",
            GapPolicy::Bridge => "bridge",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "break" => Some(GapPolicy::Break),
            "bridge" => Some(GapPolicy::Bridge),
            _ => None,
        }
    }
}

/// A stochastic FSM estimated from record traces.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticFsm<T: Float> {
    /// Observed outcome labels, lexicographically sorted.
    states: Vec<String>,
    /// Transition counts, row = from, column = to.
    counts: DMatrix<u64>,
    /// Row-normalized counts; a row with zero observations stays zero
    /// (absorbing-unknown).
    probs: DMatrix<T>,
    /// Contiguous record segments the counts came from.
    runs: usize,
}

impl<T: Float> StochasticFsm<T> {
    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn counts(&self) -> &DMatrix<u64> {
        &self.counts
    }

    pub fn probs(&self) -> &DMatrix<T> {
        &self.probs
    }

    pub fn runs(&self) -> usize {
        self.runs
    }

    pub fn total_transitions(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_total(&self, row: usize) -> u64 {
        self.counts.row(row).iter().sum()
    }

    /// True when a state was never seen with a successor.
    pub fn is_unknown_row(&self, row: usize) -> bool {
        self.row_total(row) == 0
    }
}

/// Estimates the stochastic FSM from one or more record traces.
///
/// All traces must share one outcome label set. Probabilities are
/// row-normalized counts with no smoothing.
pub fn infer_fsm<T: Float>(traces: &[RecordTrace<T>], gap_policy: GapPolicy) -> Result<StochasticFsm<T>> {
    if traces.is_empty() {
        return Err(Error::Argument("no traces to infer from".into()));
    }
    let mut reference: Vec<&str> = traces[0].labels.iter().map(String::as_str).collect();
    reference.sort_unstable();
    for t in &traces[1..] {
        let mut labels: Vec<&str> = t.labels.iter().map(String::as_str).collect();
        labels.sort_unstable();
        if labels != reference {
            return Err(Error::Argument(format!(
                "trace {:?} uses a different label set than {:?}",
                t.scenario_id, traces[0].scenario_id
            )));
        }
    }

    let mut states: Vec<String> = Vec::new();
    for t in traces {
        for r in &t.records {
            if let Some(label) = t.outcome_label(r) {
                if !states.iter().any(|s| s == label) {
                    states.push(label.to_string());
                }
            }
        }
    }
    states.sort_unstable();

    let n = states.len();
    let index = |label: &str| states.iter().position(|s| s == label).expect("collected above");
    let mut counts = DMatrix::<u64>::zeros(n, n);
    let mut runs = 0usize;

    for t in traces {
        let mut prev: Option<usize> = None;
        let mut in_run = false;
        for r in &t.records {
            match t.outcome_label(r) {
                Some(label) => {
                    let state = index(label);
                    if let Some(p) = prev {
                        counts[(p, state)] += 1;
                    }
                    if !in_run {
                        runs += 1;
                        in_run = true;
                    }
                    prev = Some(state);
                }
                None => {
                    if gap_policy == GapPolicy::Break {
                        prev = None;
                        in_run = false;
                    }
                }
            }
        }
    }
    if gap_policy == GapPolicy::Bridge {
        // A bridged trace is one contiguous run when it has any record.
        runs = traces.iter().filter(|t| t.recorded() > 0).count();
    }

    let probs = normalize_rows::<T>(&counts);
    Ok(StochasticFsm { states, counts, probs, runs })
}

fn normalize_rows<T: Float>(counts: &DMatrix<u64>) -> DMatrix<T> {
    let n = counts.nrows();
    let mut probs = DMatrix::<T>::zeros(n, n);
    for r in 0..n {
        let total: u64 = counts.row(r).iter().sum();
        if total == 0 {
            continue;
        }
        let denom = T::from_count(total as usize);
        for c in 0..n {
            probs[(r, c)] = T::from_count(counts[(r, c)] as usize) / denom;
        }
    }
    probs
}

/// The analytic transition law along the exact trajectory.
#[derive(Debug, Clone)]
pub struct PredictedTransitions<T: Float> {
    /// Predicted outcome labels, lexicographically sorted.
    pub states: Vec<String>,
    /// Row-stochastic conditional transition matrix.
    pub matrix: DMatrix<T>,
}

/// Computes the conditional transition probabilities between dominant
/// outcomes at consecutive sample times, from Born probabilities along
/// the exact record-free trajectory. Deterministic; nothing is sampled.
///
/// Only witness-mode rules are accepted: the prediction assumes the
/// trajectory is undisturbed. Transitions follow break-policy adjacency
/// (a gap separates its neighbors).
pub fn predict_transitions<T: Float>(
    psi0: &StateVector<T>,
    h: &HamiltonianTerms<T>,
    schedule: &ObservationSchedule<T>,
    povm: &Povm<T>,
    rule: &DominanceRule<T>,
) -> Result<PredictedTransitions<T>> {
    if rule.mode() != ObservationMode::Witness {
        return Err(Error::Argument(
            "predict_transitions is defined for witness-mode rules".into(),
        ));
    }
    if povm.dim() != psi0.dim() {
        return Err(Error::DimMismatch { left: povm.dim(), right: psi0.dim() });
    }
    let dense = h.realize()?;
    if dense.dim() != psi0.dim() {
        return Err(Error::DimMismatch { left: dense.dim(), right: psi0.dim() });
    }
    let eig = dense.eigh()?;

    let mut outcomes: Vec<Option<usize>> = Vec::with_capacity(schedule.steps());
    for t in schedule.times() {
        let psi = evolve_with_eig(psi0, &eig, t);
        let probs = povm.born_probabilities(&psi)?;
        outcomes.push(dominant_outcome(&probs, rule));
    }

    let mut states: Vec<String> = Vec::new();
    for o in outcomes.iter().flatten() {
        let label = &povm.labels()[*o];
        if !states.contains(label) {
            states.push(label.clone());
        }
    }
    states.sort_unstable();
    let n = states.len();
    let index_of = |o: usize| {
        let label = &povm.labels()[o];
        states.iter().position(|s| s == label).expect("collected above")
    };
    let mut counts = DMatrix::<u64>::zeros(n, n);
    for pair in outcomes.windows(2) {
        if let (Some(a), Some(b)) = (pair[0], pair[1]) {
            counts[(index_of(a), index_of(b))] += 1;
        }
    }
    Ok(PredictedTransitions { states, matrix: normalize_rows::<T>(&counts) })
}

/// Edgewise comparison of an estimated FSM against a predicted law.
#[derive(Debug, Clone)]
pub struct FsmDiff<T: Float> {
    pub states: Vec<String>,
    /// `|p̂ - p|` per edge; rows with no observations are zero.
    pub deviations: DMatrix<T>,
    pub max_deviation: T,
    /// Binomial standard error `√(p(1-p)/n_row)` per edge, `+∞` on rows
    /// with no observations.
    pub std_errors: DMatrix<T>,
}

/// Compares empirical transition frequencies to predicted probabilities.
///
/// The label sets must agree exactly; deviations on rows the traces never
/// left are not defined and excluded (reported as zero with infinite
/// standard error).
pub fn fsm_diff<T: Float>(
    empirical: &StochasticFsm<T>,
    predicted: &PredictedTransitions<T>,
) -> Result<FsmDiff<T>> {
    if empirical.states != predicted.states {
        return Err(Error::Argument(format!(
            "label mismatch: empirical {:?} vs predicted {:?}",
            empirical.states, predicted.states
        )));
    }
    let n = empirical.states.len();
    let mut deviations = DMatrix::<T>::zeros(n, n);
    let mut std_errors = DMatrix::<T>::zeros(n, n);
    let mut max_deviation = T::zero();
    for r in 0..n {
        let total = empirical.row_total(r);
        for c in 0..n {
            if total == 0 {
                std_errors[(r, c)] = T::infinity();
                continue;
            }
            let p = predicted.matrix[(r, c)];
            let dev = fabs(empirical.probs[(r, c)] - p);
            deviations[(r, c)] = dev;
            max_deviation = fmax(max_deviation, dev);
            std_errors[(r, c)] =
                fsqrt(p * (T::one() - p) / T::from_count(total as usize));
        }
    }
    Ok(FsmDiff { states: empirical.states.clone(), deviations, max_deviation, std_errors })
}

/// Renders the FSM as deterministic plain text: one line per state in
/// lexicographic order, then one line per observed edge
/// `<from> -> <to> [p=<prob>, n=<count>]` with probabilities at six
/// decimals.
pub fn export_graph<T: Float>(fsm: &StochasticFsm<T>) -> String {
    let mut out = String::new();
    for (r, state) in fsm.states.iter().enumerate() {
        out.push_str(state);
        out.push('\n');
        for (c, target) in fsm.states.iter().enumerate() {
            let n = fsm.counts[(r, c)];
            if n == 0 {
                continue;
            }
            let p = fsm.probs[(r, c)].as_diag();
            out.push_str(&format!("{state} -> {target} [p={p:.6}, n={n}]\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observer::Record;
    use crate::povm::Povm;
    use approx::assert_relative_eq;

    fn synthetic_trace(labels: &[&str], outcomes: &[Option<&str>]) -> RecordTrace<f64> {
        let label_vec: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let records = outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| Record {
                time: i as f64,
                outcome: o.map(|l| label_vec.iter().position(|x| x == l).unwrap()),
                p_max: 1.0,
                probs: None,
            })
            .collect();
        RecordTrace {
            scenario_id: "synthetic".into(),
            seed: 0,
            epsilon: 0.01,
            mode: ObservationMode::Witness,
            labels: label_vec,
            records,
        }
    }

    #[test]
    fn alternation_is_deterministic() {
        let t = synthetic_trace(
            &["A", "B"],
            &[Some("A"), Some("B"), Some("A"), Some("B"), Some("A")],
        );
        let fsm = infer_fsm(&[t], GapPolicy::Break).unwrap();
        assert_eq!(fsm.states(), &["A".to_string(), "B".to_string()]);
        assert_eq!(fsm.counts()[(0, 1)], 2);
        assert_eq!(fsm.counts()[(1, 0)], 2);
        assert_relative_eq!(fsm.probs()[(0, 1)], 1.0);
        assert_relative_eq!(fsm.probs()[(1, 0)], 1.0);
        assert_eq!(fsm.runs(), 1);
        assert_eq!(fsm.total_transitions(), 4);
    }

    #[test]
    fn gap_policy_semantics() {
        let t = synthetic_trace(&["A", "B"], &[Some("A"), None, Some("B")]);
        let broken = infer_fsm(&[t.clone()], GapPolicy::Break).unwrap();
        assert_eq!(broken.total_transitions(), 0);
        assert_eq!(broken.runs(), 2);
        let bridged = infer_fsm(&[t], GapPolicy::Bridge).unwrap();
        assert_eq!(bridged.total_transitions(), 1);
        assert_eq!(bridged.counts()[(0, 1)], 1);
        assert_eq!(bridged.runs(), 1);
    }

    #[test]
    fn counts_conservation_under_break() {
        let t = synthetic_trace(
            &["A", "B"],
            &[Some("A"), Some("A"), None, Some("B"), Some("A"), Some("B"), None, None, Some("B")],
        );
        let fsm = infer_fsm(&[t], GapPolicy::Break).unwrap();
        // Runs of lengths 2, 3, 1 → (2-1) + (3-1) + (1-1) transitions.
        assert_eq!(fsm.runs(), 3);
        assert_eq!(fsm.total_transitions(), 3);
    }

    #[test]
    fn infer_rejects_empty_and_mismatched() {
        assert!(infer_fsm::<f64>(&[], GapPolicy::Break).is_err());
        let a = synthetic_trace(&["A"], &[Some("A")]);
        let b = synthetic_trace(&["B"], &[Some("B")]);
        assert!(infer_fsm(&[a, b], GapPolicy::Break).is_err());
    }

    #[test]
    fn unknown_rows_stay_zero() {
        let t = synthetic_trace(&["A", "B"], &[Some("A"), Some("B")]);
        let fsm = infer_fsm(&[t], GapPolicy::Break).unwrap();
        assert!(!fsm.is_unknown_row(0));
        assert!(fsm.is_unknown_row(1));
        assert_eq!(fsm.probs().row(1).iter().copied().sum::<f64>(), 0.0);
    }

    #[test]
    fn predict_stationary_is_identity_row() {
        let h = HamiltonianTerms::<f64>::zero(1);
        let povm = Povm::computational(1).unwrap();
        let rule = DominanceRule::witness(0.01).unwrap();
        let schedule = ObservationSchedule::new(0.0, 1.0, 5).unwrap();
        let p = predict_transitions(&StateVector::basis(1, 0), &h, &schedule, &povm, &rule).unwrap();
        assert_eq!(p.states, vec!["0".to_string()]);
        assert_relative_eq!(p.matrix[(0, 0)], 1.0);
    }

    #[test]
    fn predict_rabi_alternation_matrix() {
        use crate::hamiltonian::{Pauli, PauliTerm};
        // H = 0.5·X0 sampled at dt = π flips the outcome every step.
        let h = HamiltonianTerms::build(1, [PauliTerm::new(0.5, [(0, Pauli::X)])]).unwrap();
        let povm = Povm::computational(1).unwrap();
        let rule = DominanceRule::witness(0.01).unwrap();
        let schedule = ObservationSchedule::new(0.0, std::f64::consts::PI, 16).unwrap();
        let p = predict_transitions(&StateVector::basis(1, 0), &h, &schedule, &povm, &rule).unwrap();
        assert_eq!(p.states, vec!["0".to_string(), "1".to_string()]);
        assert_relative_eq!(p.matrix[(0, 0)], 0.0);
        assert_relative_eq!(p.matrix[(0, 1)], 1.0);
        assert_relative_eq!(p.matrix[(1, 0)], 1.0);
        assert_relative_eq!(p.matrix[(1, 1)], 0.0);
    }

    #[test]
    fn predict_rejects_projective_rules() {
        let h = HamiltonianTerms::<f64>::zero(1);
        let povm = Povm::computational(1).unwrap();
        let rule = DominanceRule::new(0.01, ObservationMode::Projective).unwrap();
        let schedule = ObservationSchedule::new(0.0, 1.0, 2).unwrap();
        assert!(
            predict_transitions(&StateVector::basis(1, 0), &h, &schedule, &povm, &rule).is_err()
        );
    }

    #[test]
    fn diff_identical_is_zero() {
        let t = synthetic_trace(&["A", "B"], &[Some("A"), Some("B"), Some("A"), Some("B")]);
        let fsm = infer_fsm(&[t], GapPolicy::Break).unwrap();
        let predicted = PredictedTransitions {
            states: fsm.states().to_vec(),
            matrix: fsm.probs().clone(),
        };
        let diff = fsm_diff(&fsm, &predicted).unwrap();
        assert_eq!(diff.max_deviation, 0.0);
    }

    #[test]
    fn diff_rejects_disjoint_labels() {
        let t = synthetic_trace(&["A"], &[Some("A"), Some("A")]);
        let fsm = infer_fsm(&[t], GapPolicy::Break).unwrap();
        let predicted = PredictedTransitions {
            states: vec!["Z".to_string()],
            matrix: DMatrix::from_element(1, 1, 1.0),
        };
        assert!(fsm_diff(&fsm, &predicted).is_err());
    }

    #[test]
    fn export_alternation_graph() {
        let t = synthetic_trace(
            &["A", "B"],
            &[Some("A"), Some("B"), Some("A"), Some("B"), Some("A")],
        );
        let fsm = infer_fsm(&[t], GapPolicy::Break).unwrap();
        let text = export_graph(&fsm);
        assert_eq!(
            text,
            "A\nA -> B [p=1.000000, n=2]\nB\nB -> A [p=1.000000, n=2]\n"
        );
    }

    #[test]
    fn export_node_without_edges() {
        let t = synthetic_trace(&["A", "B"], &[Some("A"), Some("B")]);
        let fsm = infer_fsm(&[t], GapPolicy::Break).unwrap();
        let text = export_graph(&fsm);
        assert_eq!(text, "A\nA -> B [p=1.000000, n=1]\nB\n");
    }
}
