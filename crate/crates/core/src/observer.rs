//! Scheduled observation of a unitary trajectory.
//!
//! The global state evolves as `|U(t)⟩ = e^{-iHt}|ψ₀⟩`. At each sample
//! time the observer evaluates the POVM's Born probabilities and applies
//! the dominance rule: a unique outcome above the detection threshold is
//! recorded, anything else records nothing. Witness mode never touches
//! the state (the records are a pure function of the trajectory);
//! projective mode records the dominant outcome with its Born probability
//! and then applies the measurement update, so a seed is consumed.
//!
//! Traces serialize to a CSV with a metadata header; times and
//! probabilities print with 17 significant digits so round trips are
//! bit-exact for `f64`.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianTerms;
use crate::math::fmax;
use crate::povm::{dominant_outcome, DominanceRule, ObservationMode, Povm};
use crate::qcore::{evolve_with_eig, Operator, StateVector};
use crate::scalar::Float;

/// Evenly spaced sample times `t_i = t0 + i·dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationSchedule<T: Float> {
    t0: T,
    dt: T,
    steps: usize,
}

impl<T: Float> ObservationSchedule<T> {
    pub fn new(t0: T, dt: T, steps: usize) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::Argument(format!("schedule dt must be positive, got {dt}")));
        }
        if steps == 0 {
            return Err(Error::Argument("schedule needs at least one step".into()));
        }
        if !num_traits::Float::is_finite(t0) {
            return Err(Error::Argument("schedule t0 must be finite".into()));
        }
        Ok(ObservationSchedule { t0, dt, steps })
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Sample times, strictly increasing.
    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        let (t0, dt) = (self.t0, self.dt);
        (0..self.steps).map(move |i| t0 + T::from_count(i) * dt)
    }
}

/// One observation: a record or a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct Record<T: Float> {
    pub time: T,
    /// Index into the trace's label list, or `None` for "recorded nothing".
    pub outcome: Option<usize>,
    /// Largest Born probability at this sample time.
    pub p_max: T,
    /// Full probability vector, kept for post-hoc dominance re-checks.
    /// Absent on traces parsed back from CSV.
    pub probs: Option<Vec<T>>,
}

/// Time-ordered classical record emitted by one observer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordTrace<T: Float> {
    pub scenario_id: String,
    pub seed: u64,
    pub epsilon: T,
    pub mode: ObservationMode,
    /// Outcome labels the records index into.
    pub labels: Vec<String>,
    pub records: Vec<Record<T>>,
}

impl<T: Float> RecordTrace<T> {
    /// Label of a record's outcome, `None` for gaps.
    pub fn outcome_label(&self, record: &Record<T>) -> Option<&str> {
        record.outcome.map(|k| self.labels[k].as_str())
    }

    /// Number of records carrying an outcome.
    pub fn recorded(&self) -> usize {
        self.records.iter().filter(|r| r.outcome.is_some()).count()
    }

    /// Number of gaps.
    pub fn gaps(&self) -> usize {
        self.records.len() - self.recorded()
    }

    /// Re-checks the dominance invariant on every record that kept its
    /// probability digest: an outcome implies its probability exceeds ε
    /// and every other sits at or below ε.
    pub fn recheck_dominance(&self) -> bool {
        self.records.iter().all(|r| match (&r.outcome, &r.probs) {
            (Some(k), Some(probs)) => {
                probs[*k] > self.epsilon
                    && probs.iter().enumerate().all(|(j, &p)| j == *k || p <= self.epsilon)
            }
            _ => true,
        })
    }

    /// Serializes to the trace CSV format.
    ///
    /// Header: `# scenario=<id> seed=<n> epsilon=<e> mode=<m>`, then
    /// `t,outcome,p_max` rows with `-` marking gaps.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# scenario={} seed={} epsilon={} mode={}\n",
            self.scenario_id,
            self.seed,
            self.epsilon,
            self.mode.as_str()
        );
        out.push_str("t,outcome,p_max\n");
        for r in &self.records {
            let outcome = self.outcome_label(r).unwrap_or("-");
            out.push_str(&format!("{:.16e},{},{:.16e}\n", r.time, outcome, r.p_max));
        }
        out
    }

    /// Parses a trace CSV produced by [`RecordTrace::to_csv`].
    ///
    /// The label list is rebuilt from the outcomes that appear, in first-
    /// appearance order; probability digests are not recoverable.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Argument("empty trace file".into()))?;
        let header = header
            .strip_prefix("# ")
            .ok_or_else(|| Error::Argument("trace header must start with `# `".into()))?;
        let mut scenario_id = None;
        let mut seed = None;
        let mut epsilon = None;
        let mut mode = None;
        for pair in header.split_whitespace() {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("bad header field {pair:?}")))?;
            match key {
                "scenario" => scenario_id = Some(value.to_string()),
                "seed" => {
                    seed = Some(value.parse::<u64>().map_err(|_| {
                        Error::Argument(format!("bad seed {value:?} in trace header"))
                    })?)
                }
                "epsilon" => {
                    let e: f64 = value.parse().map_err(|_| {
                        Error::Argument(format!("bad epsilon {value:?} in trace header"))
                    })?;
                    epsilon = T::from_f64(e);
                }
                "mode" => {
                    mode = ObservationMode::parse(value);
                    if mode.is_none() {
                        return Err(Error::Argument(format!("bad mode {value:?} in trace header")));
                    }
                }
                other => return Err(Error::Argument(format!("unknown header field {other:?}"))),
            }
        }
        let columns = lines
            .next()
            .ok_or_else(|| Error::Argument("trace file missing column row".into()))?;
        if columns != "t,outcome,p_max" {
            return Err(Error::Argument(format!("unexpected column row {columns:?}")));
        }

        let mut labels: Vec<String> = Vec::new();
        let mut records = Vec::new();
        let mut last_time: Option<T> = None;
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let (t_text, outcome_text, p_text) = match (fields.next(), fields.next(), fields.next(), fields.next())
            {
                (Some(a), Some(b), Some(c), None) => (a, b, c),
                _ => return Err(Error::Argument(format!("trace row {}: expected 3 fields", n + 3))),
            };
            let time_f: f64 = t_text
                .parse()
                .map_err(|_| Error::Argument(format!("trace row {}: bad time {t_text:?}", n + 3)))?;
            let p_f: f64 = p_text
                .parse()
                .map_err(|_| Error::Argument(format!("trace row {}: bad p_max {p_text:?}", n + 3)))?;
            let time = T::from_f64(time_f)
                .ok_or_else(|| Error::Argument("time does not fit scalar".into()))?;
            if let Some(prev) = last_time {
                if time <= prev {
                    return Err(Error::Argument(format!(
                        "trace row {}: times must strictly increase",
                        n + 3
                    )));
                }
            }
            last_time = Some(time);
            let outcome = if outcome_text == "-" {
                None
            } else {
                let idx = match labels.iter().position(|l| l == outcome_text) {
                    Some(i) => i,
                    None => {
                        labels.push(outcome_text.to_string());
                        labels.len() - 1
                    }
                };
                Some(idx)
            };
            records.push(Record {
                time,
                outcome,
                p_max: T::from_f64(p_f)
                    .ok_or_else(|| Error::Argument("p_max does not fit scalar".into()))?,
                probs: None,
            });
        }
        Ok(RecordTrace {
            scenario_id: scenario_id
                .ok_or_else(|| Error::Argument("trace header missing scenario".into()))?,
            seed: seed.ok_or_else(|| Error::Argument("trace header missing seed".into()))?,
            epsilon: epsilon
                .ok_or_else(|| Error::Argument("trace header missing epsilon".into()))?,
            mode: mode.ok_or_else(|| Error::Argument("trace header missing mode".into()))?,
            labels,
            records,
        })
    }
}

/// Uniform draw in [0, 1) from the top 53 bits of the stream.
fn unit_uniform<T: Float>(rng: &mut ChaCha20Rng) -> T {
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0);
    T::from_f64_const(u)
}

/// Runs one observed trajectory and returns its record trace.
///
/// Witness mode evolves cumulatively from the initial state and consumes
/// no randomness. Projective mode evolves across `dt` segments from the
/// post-update state; when dominance holds for outcome `k`, the record is
/// emitted with probability `p_k` (one draw) and the state updates to
/// `√E_k|ψ⟩/‖·‖`, otherwise nothing is recorded and the state is left
/// alone. Identical inputs and seed reproduce the trace bit-for-bit.
pub fn run_trajectory<T: Float>(
    psi0: &StateVector<T>,
    h: &HamiltonianTerms<T>,
    schedule: &ObservationSchedule<T>,
    povm: &Povm<T>,
    rule: &DominanceRule<T>,
    seed: u64,
    scenario_id: &str,
) -> Result<RecordTrace<T>> {
    if povm.dim() != psi0.dim() {
        return Err(Error::DimMismatch { left: povm.dim(), right: psi0.dim() });
    }
    let dense = h.realize()?;
    if dense.dim() != psi0.dim() {
        return Err(Error::DimMismatch { left: dense.dim(), right: psi0.dim() });
    }
    let eig = dense.eigh()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(schedule.steps());

    match rule.mode() {
        ObservationMode::Witness => {
            for t in schedule.times() {
                let psi = evolve_with_eig(psi0, &eig, t);
                let probs = povm.born_probabilities(&psi)?;
                let outcome = dominant_outcome(&probs, rule);
                records.push(make_record(t, outcome, probs));
            }
        }
        ObservationMode::Projective => {
            let roots: Vec<Operator<T>> =
                povm.effects().iter().map(|e| e.sqrt_psd()).collect::<Result<_>>()?;
            // Advance to the first sample time, then step by dt.
            let mut psi = evolve_with_eig(psi0, &eig, schedule.t0());
            for (i, t) in schedule.times().enumerate() {
                if i > 0 {
                    psi = evolve_with_eig(&psi, &eig, schedule.dt());
                }
                let probs = povm.born_probabilities(&psi)?;
                let mut outcome = dominant_outcome(&probs, rule);
                if let Some(k) = outcome {
                    let draw: T = unit_uniform(&mut rng);
                    if draw < probs[k] {
                        let projected = roots[k].apply_raw(psi.amplitudes())?;
                        psi = StateVector::normalized(projected)?;
                    } else {
                        outcome = None;
                    }
                }
                records.push(make_record(t, outcome, probs));
            }
        }
    }
    Ok(RecordTrace {
        scenario_id: scenario_id.to_string(),
        seed,
        epsilon: rule.epsilon(),
        mode: rule.mode(),
        labels: povm.labels().to_vec(),
        records,
    })
}

fn make_record<T: Float>(time: T, outcome: Option<usize>, probs: Vec<T>) -> Record<T> {
    let p_max = probs.iter().fold(T::zero(), |a, &p| fmax(a, p));
    Record { time, outcome, p_max, probs: Some(probs) }
}

/// The einselected state for outcome `k`: `√E_k|ψ⟩` normalized, together
/// with its fidelity `|⟨out|ψ⟩|²` against the pre-measurement state.
pub fn einselected_state<T: Float>(
    povm: &Povm<T>,
    k: usize,
    psi: &StateVector<T>,
) -> Result<(StateVector<T>, T)> {
    if k >= povm.len() {
        return Err(Error::Argument(format!(
            "outcome index {k} out of range for {} effects",
            povm.len()
        )));
    }
    if povm.dim() != psi.dim() {
        return Err(Error::DimMismatch { left: povm.dim(), right: psi.dim() });
    }
    let root = povm.effects()[k].sqrt_psd()?;
    let projected = root.apply_raw(psi.amplitudes())?;
    let out = StateVector::normalized(projected)?;
    let fidelity = out.inner(psi).norm_sqr();
    Ok((out, fidelity))
}
