//! Structured report documents with stable key order.
//!
//! Reports serialize through serde structs, so key order is declaration
//! order and repeated runs produce byte-identical JSON. Ratios that can be
//! the infinite sentinel serialize as the string `"inf"` instead of a
//! number; JSON has no infinity literal.

use einsel_core::einselect::{EinselectReport, ExclusionOutcome, HaloEntry, Separability};
use einsel_core::povm::RecognizedSupport;
use einsel_core::vmx::{FsmDiff, PredictedTransitions, StochasticFsm};
use serde::ser::Serializer;
use serde::Serialize;

/// A nonnegative ratio that may be the `+∞` sentinel.
#[derive(Debug, Clone, Copy)]
pub struct Ratio(pub f64);

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            serializer.serialize_f64(self.0)
        } else {
            serializer.serialize_str("inf")
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ScheduleEcho {
    pub t0: f64,
    pub dt: f64,
    pub steps: usize,
}

/// Effective scenario parameters after command-line overrides.
#[derive(Debug, Serialize)]
pub struct ScenarioEcho {
    pub id: String,
    pub entities: usize,
    pub hamiltonian: Vec<String>,
    pub initial_state: String,
    pub povm_labels: Vec<String>,
    pub epsilon: f64,
    pub mode: String,
    pub seed: u64,
    pub schedule: ScheduleEcho,
}

#[derive(Debug, Serialize)]
pub struct ConditionsJson {
    pub system: Vec<usize>,
    pub fragment: Vec<usize>,
    pub ratio_s: Ratio,
    pub ratio_f: Ratio,
    pub eta: f64,
    pub interaction_norm: f64,
    pub satisfied: bool,
}

impl ConditionsJson {
    pub fn from_report(r: &EinselectReport<f64>) -> Self {
        ConditionsJson {
            system: r.system.to_vec(),
            fragment: r.fragment.to_vec(),
            ratio_s: Ratio(r.ratio_s),
            ratio_f: Ratio(r.ratio_f),
            eta: r.eta,
            interaction_norm: r.interaction_norm,
            satisfied: r.satisfied,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct HaloEntryJson {
    pub candidate: Vec<usize>,
    pub ratio: Ratio,
    pub in_halo: bool,
}

impl HaloEntryJson {
    pub fn from_entry(e: &HaloEntry<f64>) -> Self {
        HaloEntryJson {
            candidate: e.candidate.to_vec(),
            ratio: Ratio(e.ratio),
            in_halo: e.in_halo,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ExclusionJson {
    pub report1: ConditionsJson,
    pub report2: ConditionsJson,
    pub degenerate: bool,
    pub both: bool,
}

impl ExclusionJson {
    pub fn from_outcome(o: &ExclusionOutcome<f64>) -> Self {
        ExclusionJson {
            report1: ConditionsJson::from_report(&o.report1),
            report2: ConditionsJson::from_report(&o.report2),
            degenerate: o.degenerate,
            both: o.both,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SeparabilityJson {
    pub frag1: Vec<usize>,
    pub frag2: Vec<usize>,
    pub mutual_information: f64,
    pub tol: f64,
    pub separable_fapp: bool,
}

impl SeparabilityJson {
    pub fn from_result(f1: &[usize], f2: &[usize], tol: f64, s: &Separability<f64>) -> Self {
        SeparabilityJson {
            frag1: f1.to_vec(),
            frag2: f2.to_vec(),
            mutual_information: s.mutual_information,
            tol,
            separable_fapp: s.separable_fapp,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SupportJson {
    pub entities: Vec<usize>,
    pub weights: Vec<f64>,
    pub delta: f64,
}

impl SupportJson {
    pub fn from_support(s: &RecognizedSupport<f64>, delta: f64) -> Self {
        SupportJson { entities: s.entities.to_vec(), weights: s.weights.clone(), delta }
    }
}

#[derive(Debug, Serialize)]
pub struct TraceSummaryJson {
    pub samples: usize,
    pub records: usize,
    pub gaps: usize,
}

#[derive(Debug, Serialize)]
pub struct FsmJson {
    pub states: Vec<String>,
    pub counts: Vec<Vec<u64>>,
    pub probs: Vec<Vec<f64>>,
    pub runs: usize,
    pub gap_policy: String,
}

impl FsmJson {
    pub fn from_fsm(fsm: &StochasticFsm<f64>, gap_policy: &str) -> Self {
        let n = fsm.states().len();
        let counts = (0..n)
            .map(|r| (0..n).map(|c| fsm.counts()[(r, c)]).collect())
            .collect();
        let probs = (0..n)
            .map(|r| (0..n).map(|c| fsm.probs()[(r, c)]).collect())
            .collect();
        FsmJson {
            states: fsm.states().to_vec(),
            counts,
            probs,
            runs: fsm.runs(),
            gap_policy: gap_policy.to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PredictionJson {
    pub states: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl PredictionJson {
    pub fn from_prediction(p: &PredictedTransitions<f64>) -> Self {
        let n = p.states.len();
        PredictionJson {
            states: p.states.clone(),
            matrix: (0..n).map(|r| (0..n).map(|c| p.matrix[(r, c)]).collect()).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DiffEdgeJson {
    pub from: String,
    pub to: String,
    pub empirical: f64,
    pub predicted: f64,
    pub deviation: f64,
    pub std_error: Ratio,
}

#[derive(Debug, Serialize)]
pub struct DiffJson {
    pub max_deviation: f64,
    pub edges: Vec<DiffEdgeJson>,
}

impl DiffJson {
    pub fn from_diff(
        diff: &FsmDiff<f64>,
        empirical: &StochasticFsm<f64>,
        predicted: &PredictedTransitions<f64>,
    ) -> Self {
        let n = diff.states.len();
        let mut edges = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if empirical.counts()[(r, c)] == 0 && predicted.matrix[(r, c)] == 0.0 {
                    continue;
                }
                edges.push(DiffEdgeJson {
                    from: diff.states[r].clone(),
                    to: diff.states[c].clone(),
                    empirical: empirical.probs()[(r, c)],
                    predicted: predicted.matrix[(r, c)],
                    deviation: diff.deviations[(r, c)],
                    std_error: Ratio(diff.std_errors[(r, c)]),
                });
            }
        }
        DiffJson { max_deviation: diff.max_deviation, edges }
    }
}

/// Full report for `einsel run`.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub scenario: ScenarioEcho,
    pub einselect: Option<ConditionsJson>,
    pub recognized_support: SupportJson,
    pub trace_summary: TraceSummaryJson,
    pub fsm: FsmJson,
    pub prediction: Option<PredictionJson>,
    pub fsm_diff: Option<DiffJson>,
}

/// Full report for `einsel analyze`.
#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub scenario: ScenarioEcho,
    pub conditions: Option<ConditionsJson>,
    pub halo: Option<Vec<HaloEntryJson>>,
    pub exclusion: Option<ExclusionJson>,
    pub separability: Option<SeparabilityJson>,
    pub recognized_support: SupportJson,
}

/// Report for `einsel fsm`.
#[derive(Debug, Serialize)]
pub struct FsmReport {
    pub trace: String,
    pub scenario_id: String,
    pub fsm: FsmJson,
}

/// Serializes a report with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
