//! Scenario files: a line-oriented sectioned text format.
//!
//! ```text
//! [scenario]
//! id = rabi
//! entities = 1
//!
//! [hamiltonian]
//! 0.5 * X0
//!
//! [state]
//! init = 0
//!
//! [povm]
//! effect z0
//! proj 0
//!
//! effect z1
//! proj 1
//!
//! [observer]
//! epsilon = 0.01
//! mode = witness
//! seed = 7
//!
//! [schedule]
//! t0 = 0
//! dt = 3.141592653589793
//! steps = 64
//! ```
//!
//! Hamiltonian lines use the Pauli term grammar `<coeff> * <P><idx> ...`.
//! POVM effects are either `proj <factor> ...` with factors from
//! `{0, 1, +, -, i, -i, *}` (`*` is the identity on that entity) or a
//! `matrix` block of `row` lines whose entries are `re,im` pairs. An
//! optional `[analysis]` section configures the einselection analyses.
//!
//! Loading validates everything it can and reports *all* problems, each
//! tagged with a field path. `to_text` re-serializes canonically; files
//! written in canonical form round-trip byte-for-byte.

use einsel_core::entity::{max_entities, EntitySet};
use einsel_core::hamiltonian::HamiltonianTerms;
use einsel_core::observer::ObservationSchedule;
use einsel_core::povm::{DominanceRule, ObservationMode, Povm, DEFAULT_EPSILON};
use einsel_core::qcore::{product_state, NamedQubit, Operator, OperatorKind, StateVector};
use einsel_core::vmx::GapPolicy;
use nalgebra::DMatrix;
use num_complex::Complex;

/// One validation problem, tagged with the field that caused it.
#[derive(Debug, Clone)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Issue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// A single POVM effect as written in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectSpec {
    pub label: String,
    pub body: EffectBody,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EffectBody {
    /// Projector onto a product of named states; `None` factors are
    /// identity legs.
    Proj(Vec<Option<NamedQubit>>),
    /// Explicit dense matrix, row-major `(re, im)` entries.
    Matrix(Vec<Vec<(f64, f64)>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverConfig {
    pub epsilon: f64,
    pub mode: ObservationMode,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    pub t0: f64,
    pub dt: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisConfig {
    pub system: Option<Vec<usize>>,
    pub fragment: Option<Vec<usize>>,
    pub system2: Option<Vec<usize>>,
    pub frag1: Option<Vec<usize>>,
    pub frag2: Option<Vec<usize>>,
    pub eta: f64,
    pub delta: f64,
    pub tol: f64,
    pub swaps: bool,
}

impl AnalysisConfig {
    fn new() -> Self {
        AnalysisConfig {
            eta: 0.1,
            delta: einsel_core::povm::DEFAULT_SUPPORT_DELTA,
            tol: 1e-6,
            ..Default::default()
        }
    }
}

/// A fully parsed and validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub entities: usize,
    pub hamiltonian: HamiltonianTerms<f64>,
    pub initial: Vec<NamedQubit>,
    pub effects: Vec<EffectSpec>,
    pub observer: ObserverConfig,
    pub schedule: ScheduleConfig,
    pub analysis: Option<AnalysisConfig>,
}

impl Scenario {
    /// Parses and validates, reporting every problem found.
    pub fn parse(text: &str) -> Result<Scenario, Vec<Issue>> {
        Parser::new(text).run()
    }

    pub fn initial_state(&self) -> StateVector<f64> {
        product_state(&self.initial).expect("validated at load")
    }

    pub fn build_povm(&self) -> Povm<f64> {
        build_povm(self.entities, &self.effects).expect("validated at load")
    }

    pub fn dominance_rule(&self) -> DominanceRule<f64> {
        DominanceRule::new(self.observer.epsilon, self.observer.mode).expect("validated at load")
    }

    pub fn observation_schedule(&self) -> ObservationSchedule<f64> {
        ObservationSchedule::new(self.schedule.t0, self.schedule.dt, self.schedule.steps)
            .expect("validated at load")
    }

    /// Canonical serialization; the inverse of [`Scenario::parse`] on
    /// canonical files.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[scenario]\n");
        out.push_str(&format!("id = {}\n", self.id));
        out.push_str(&format!("entities = {}\n", self.entities));
        out.push_str("\n[hamiltonian]\n");
        out.push_str(&self.hamiltonian.to_text());
        out.push_str("\n[state]\n");
        let expr: Vec<&str> = self.initial.iter().map(|q| q.token()).collect();
        out.push_str(&format!("init = {}\n", expr.join(" ")));
        out.push_str("\n[povm]\n");
        for (i, effect) in self.effects.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("effect {}\n", effect.label));
            match &effect.body {
                EffectBody::Proj(factors) => {
                    let tokens: Vec<&str> =
                        factors.iter().map(|f| f.map_or("*", |q| q.token())).collect();
                    out.push_str(&format!("proj {}\n", tokens.join(" ")));
                }
                EffectBody::Matrix(rows) => {
                    out.push_str("matrix\n");
                    for row in rows {
                        let cells: Vec<String> =
                            row.iter().map(|(re, im)| format!("{re},{im}")).collect();
                        out.push_str(&format!("row {}\n", cells.join(" ")));
                    }
                }
            }
        }
        out.push_str("\n[observer]\n");
        out.push_str(&format!("epsilon = {}\n", self.observer.epsilon));
        out.push_str(&format!("mode = {}\n", self.observer.mode.as_str()));
        out.push_str(&format!("seed = {}\n", self.observer.seed));
        out.push_str("\n[schedule]\n");
        out.push_str(&format!("t0 = {}\n", self.schedule.t0));
        out.push_str(&format!("dt = {}\n", self.schedule.dt));
        out.push_str(&format!("steps = {}\n", self.schedule.steps));
        if let Some(a) = &self.analysis {
            out.push_str("\n[analysis]\n");
            let set = |v: &Vec<usize>| {
                v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
            };
            if let Some(v) = &a.system {
                out.push_str(&format!("system = {}\n", set(v)));
            }
            if let Some(v) = &a.fragment {
                out.push_str(&format!("fragment = {}\n", set(v)));
            }
            if let Some(v) = &a.system2 {
                out.push_str(&format!("system2 = {}\n", set(v)));
            }
            if let Some(v) = &a.frag1 {
                out.push_str(&format!("frag1 = {}\n", set(v)));
            }
            if let Some(v) = &a.frag2 {
                out.push_str(&format!("frag2 = {}\n", set(v)));
            }
            out.push_str(&format!("eta = {}\n", a.eta));
            out.push_str(&format!("delta = {}\n", a.delta));
            out.push_str(&format!("tol = {}\n", a.tol));
            out.push_str(&format!("swaps = {}\n", a.swaps));
        }
        out
    }
}

pub fn entity_set(indices: &[usize]) -> EntitySet {
    indices.iter().copied().collect()
}

/// Builds the dense POVM from effect specs; paths in errors are relative
/// to `povm.effects`.
pub fn build_povm(entities: usize, specs: &[EffectSpec]) -> Result<Povm<f64>, Vec<Issue>> {
    let dim = 1usize << entities;
    let mut issues = Vec::new();
    let mut effects = Vec::new();
    let mut labels = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let path = format!("povm.effects[{i}]");
        match &spec.body {
            EffectBody::Proj(factors) => {
                if factors.len() != entities {
                    issues.push(Issue {
                        path,
                        message: format!(
                            "proj lists {} factors for {entities} entities",
                            factors.len()
                        ),
                    });
                    continue;
                }
                let mut m = DMatrix::<Complex<f64>>::identity(1, 1);
                for f in factors {
                    let leg = match f {
                        Some(q) => {
                            let s = q.state::<f64>();
                            s.amplitudes() * s.amplitudes().adjoint()
                        }
                        None => DMatrix::identity(2, 2),
                    };
                    m = m.kronecker(&leg);
                }
                effects.push(Operator::new(m, OperatorKind::General).expect("square by construction"));
                labels.push(spec.label.clone());
            }
            EffectBody::Matrix(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    issues.push(Issue {
                        path,
                        message: format!("matrix must be {dim}x{dim} for {entities} entities"),
                    });
                    continue;
                }
                let m = DMatrix::from_fn(dim, dim, |r, c| {
                    let (re, im) = rows[r][c];
                    Complex::new(re, im)
                });
                effects.push(Operator::new(m, OperatorKind::General).expect("square by construction"));
                labels.push(spec.label.clone());
            }
        }
    }
    if !issues.is_empty() {
        return Err(issues);
    }
    Povm::validate(effects, labels).map_err(|e| {
        vec![Issue { path: "povm".into(), message: e.to_string() }]
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Scenario,
    Hamiltonian,
    State,
    Povm,
    Observer,
    Schedule,
    Analysis,
}

struct Parser<'a> {
    text: &'a str,
    issues: Vec<Issue>,
    id: Option<String>,
    entities: Option<usize>,
    ham_lines: Vec<(usize, String)>,
    init_expr: Option<(usize, String)>,
    effects: Vec<EffectSpec>,
    pending_matrix: Option<Vec<Vec<(f64, f64)>>>,
    pending_label: Option<String>,
    epsilon: Option<f64>,
    mode: Option<ObservationMode>,
    seed: Option<u64>,
    t0: Option<f64>,
    dt: Option<f64>,
    steps: Option<usize>,
    analysis: Option<AnalysisConfig>,
    seen_sections: Vec<Section>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            issues: Vec::new(),
            id: None,
            entities: None,
            ham_lines: Vec::new(),
            init_expr: None,
            effects: Vec::new(),
            pending_matrix: None,
            pending_label: None,
            epsilon: None,
            mode: None,
            seed: None,
            t0: None,
            dt: None,
            steps: None,
            analysis: None,
            seen_sections: Vec::new(),
        }
    }

    fn issue(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue { path: path.into(), message: message.into() });
    }

    fn run(mut self) -> Result<Scenario, Vec<Issue>> {
        let mut section = Section::None;
        let lines: Vec<&str> = self.text.lines().collect();
        for (idx, raw) in lines.iter().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                self.finish_effect();
                section = match name {
                    "scenario" => Section::Scenario,
                    "hamiltonian" => Section::Hamiltonian,
                    "state" => Section::State,
                    "povm" => Section::Povm,
                    "observer" => Section::Observer,
                    "schedule" => Section::Schedule,
                    "analysis" => Section::Analysis,
                    other => {
                        self.issue(format!("line {lineno}"), format!("unknown section [{other}]"));
                        Section::None
                    }
                };
                if section != Section::None {
                    if self.seen_sections.contains(&section) {
                        self.issue(format!("line {lineno}"), format!("duplicate section [{name}]"));
                    }
                    self.seen_sections.push(section);
                    if section == Section::Analysis {
                        self.analysis = Some(AnalysisConfig::new());
                    }
                }
                continue;
            }
            match section {
                Section::None => {
                    self.issue(format!("line {lineno}"), "content before any [section]");
                }
                Section::Scenario => self.scenario_line(lineno, line),
                Section::Hamiltonian => self.ham_lines.push((lineno, line.to_string())),
                Section::State => self.state_line(lineno, line),
                Section::Povm => self.povm_line(lineno, line),
                Section::Observer => self.observer_line(lineno, line),
                Section::Schedule => self.schedule_line(lineno, line),
                Section::Analysis => self.analysis_line(lineno, line),
            }
        }
        self.finish_effect();
        self.assemble()
    }

    fn key_value(&mut self, lineno: usize, line: &str) -> Option<(String, String)> {
        match line.split_once('=') {
            Some((k, v)) => Some((k.trim().to_string(), v.trim().to_string())),
            None => {
                self.issue(format!("line {lineno}"), format!("expected `key = value`, got {line:?}"));
                None
            }
        }
    }

    fn scenario_line(&mut self, lineno: usize, line: &str) {
        let Some((key, value)) = self.key_value(lineno, line) else { return };
        match key.as_str() {
            "id" => {
                if value.is_empty()
                    || !value.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
                {
                    self.issue("scenario.id", format!("id {value:?} must be [A-Za-z0-9_-]+"));
                } else {
                    self.id = Some(value);
                }
            }
            "entities" => match value.parse::<usize>() {
                Ok(n) => self.entities = Some(n),
                Err(_) => self.issue("scenario.entities", format!("bad count {value:?}")),
            },
            other => self.issue(format!("line {lineno}"), format!("unknown scenario key {other:?}")),
        }
    }

    fn state_line(&mut self, lineno: usize, line: &str) {
        let Some((key, value)) = self.key_value(lineno, line) else { return };
        if key == "init" {
            self.init_expr = Some((lineno, value));
        } else {
            self.issue(format!("line {lineno}"), format!("unknown state key {key:?}"));
        }
    }

    fn povm_line(&mut self, lineno: usize, line: &str) {
        if let Some(label) = line.strip_prefix("effect ") {
            self.finish_effect();
            self.pending_label = Some(label.trim().to_string());
            return;
        }
        if self.pending_label.is_none() && self.pending_matrix.is_none() {
            self.issue(format!("line {lineno}"), "POVM content before any `effect <label>`");
            return;
        }
        if let Some(expr) = line.strip_prefix("proj") {
            let label = match self.pending_label.take() {
                Some(l) => l,
                None => {
                    self.issue(format!("line {lineno}"), "proj without a pending effect label");
                    return;
                }
            };
            let mut factors = Vec::new();
            let mut ok = true;
            for token in expr.split_whitespace() {
                if token == "*" {
                    factors.push(None);
                } else {
                    match NamedQubit::parse(token) {
                        Some(q) => factors.push(Some(q)),
                        None => {
                            self.issue(
                                format!("line {lineno}"),
                                format!("unknown state factor {token:?} (expect 0,1,+,-,i,-i,*)"),
                            );
                            ok = false;
                        }
                    }
                }
            }
            if ok {
                self.effects.push(EffectSpec { label, body: EffectBody::Proj(factors) });
            }
            return;
        }
        if line == "matrix" {
            self.pending_matrix = Some(Vec::new());
            return;
        }
        if let Some(cells) = line.strip_prefix("row ") {
            let Some(matrix) = self.pending_matrix.as_mut() else {
                self.issue(format!("line {lineno}"), "row outside a matrix block");
                return;
            };
            let mut row = Vec::new();
            for cell in cells.split_whitespace() {
                let parsed = cell.split_once(',').and_then(|(re, im)| {
                    Some((re.parse::<f64>().ok()?, im.parse::<f64>().ok()?))
                });
                match parsed {
                    Some(pair) => row.push(pair),
                    None => {
                        self.issues.push(Issue {
                            path: format!("line {lineno}"),
                            message: format!("bad matrix cell {cell:?} (expect re,im)"),
                        });
                        return;
                    }
                }
            }
            matrix.push(row);
            return;
        }
        self.issue(format!("line {lineno}"), format!("unexpected POVM line {line:?}"));
    }

    fn finish_effect(&mut self) {
        if let Some(matrix) = self.pending_matrix.take() {
            if let Some(label) = self.pending_label.take() {
                self.effects.push(EffectSpec { label, body: EffectBody::Matrix(matrix) });
            } else {
                self.issue("povm", "matrix block without a label");
            }
        } else if let Some(label) = self.pending_label.take() {
            self.issue("povm", format!("effect {label:?} has no proj or matrix body"));
        }
    }

    fn observer_line(&mut self, lineno: usize, line: &str) {
        let Some((key, value)) = self.key_value(lineno, line) else { return };
        match key.as_str() {
            "epsilon" => match value.parse::<f64>() {
                Ok(e) => self.epsilon = Some(e),
                Err(_) => self.issue("observer.epsilon", format!("bad number {value:?}")),
            },
            "mode" => match ObservationMode::parse(&value) {
                Some(m) => self.mode = Some(m),
                None => self.issue(
                    "observer.mode",
                    format!("bad mode {value:?} (expect witness|projective)"),
                ),
            },
            "seed" => match value.parse::<u64>() {
                Ok(s) => self.seed = Some(s),
                Err(_) => self.issue("observer.seed", format!("bad seed {value:?}")),
            },
            other => self.issue(format!("line {lineno}"), format!("unknown observer key {other:?}")),
        }
    }

    fn schedule_line(&mut self, lineno: usize, line: &str) {
        let Some((key, value)) = self.key_value(lineno, line) else { return };
        match key.as_str() {
            "t0" => match value.parse::<f64>() {
                Ok(v) => self.t0 = Some(v),
                Err(_) => self.issue("schedule.t0", format!("bad number {value:?}")),
            },
            "dt" => match value.parse::<f64>() {
                Ok(v) => self.dt = Some(v),
                Err(_) => self.issue("schedule.dt", format!("bad number {value:?}")),
            },
            "steps" => match value.parse::<usize>() {
                Ok(v) => self.steps = Some(v),
                Err(_) => self.issue("schedule.steps", format!("bad count {value:?}")),
            },
            other => self.issue(format!("line {lineno}"), format!("unknown schedule key {other:?}")),
        }
    }

    fn analysis_line(&mut self, lineno: usize, line: &str) {
        let Some((key, value)) = self.key_value(lineno, line) else { return };
        let parse_set = |value: &str| -> Result<Vec<usize>, String> {
            let mut out = Vec::new();
            for token in value.split_whitespace() {
                out.push(token.parse::<usize>().map_err(|_| format!("bad index {token:?}"))?);
            }
            if out.is_empty() {
                return Err("empty entity set".into());
            }
            Ok(out)
        };
        let analysis = self.analysis.as_mut().expect("analysis section open");
        match key.as_str() {
            "system" | "fragment" | "system2" | "frag1" | "frag2" => match parse_set(&value) {
                Ok(set) => match key.as_str() {
                    "system" => analysis.system = Some(set),
                    "fragment" => analysis.fragment = Some(set),
                    "system2" => analysis.system2 = Some(set),
                    "frag1" => analysis.frag1 = Some(set),
                    _ => analysis.frag2 = Some(set),
                },
                Err(m) => self.issues.push(Issue { path: format!("analysis.{key}"), message: m }),
            },
            "eta" | "delta" | "tol" => match value.parse::<f64>() {
                Ok(v) => match key.as_str() {
                    "eta" => analysis.eta = v,
                    "delta" => analysis.delta = v,
                    _ => analysis.tol = v,
                },
                Err(_) => self
                    .issues
                    .push(Issue { path: format!("analysis.{key}"), message: format!("bad number {value:?}") }),
            },
            "swaps" => match value.parse::<bool>() {
                Ok(v) => analysis.swaps = v,
                Err(_) => self.issue("analysis.swaps", format!("bad flag {value:?}")),
            },
            other => self.issue(format!("line {lineno}"), format!("unknown analysis key {other:?}")),
        }
    }

    fn assemble(mut self) -> Result<Scenario, Vec<Issue>> {
        let entities = match (self.entities, self.id.as_ref()) {
            (Some(n), Some(_)) => n,
            _ => {
                if self.id.is_none() {
                    self.issue("scenario.id", "missing");
                }
                if self.entities.is_none() {
                    self.issue("scenario.entities", "missing");
                }
                return Err(self.issues);
            }
        };
        if entities == 0 || entities > max_entities() {
            self.issue(
                "scenario.entities",
                format!("{entities} outside 1..={} (cap from EINSEL_MAX_ENTITIES)", max_entities()),
            );
            return Err(self.issues);
        }

        // Hamiltonian: parse each line separately so every bad term is
        // reported with its index.
        let mut term_text = String::new();
        for (i, (lineno, line)) in self.ham_lines.iter().enumerate() {
            match HamiltonianTerms::<f64>::parse(entities, line) {
                Ok(_) => {
                    term_text.push_str(line);
                    term_text.push('\n');
                }
                Err(e) => {
                    let msg = e.to_string().replace("term line 1: ", "");
                    self.issues.push(Issue {
                        path: format!("hamiltonian.terms[{i}]"),
                        message: format!("line {lineno}: {msg}"),
                    });
                }
            }
        }
        let hamiltonian = HamiltonianTerms::<f64>::parse(entities, &term_text)
            .unwrap_or_else(|_| HamiltonianTerms::zero(entities));

        // Initial state.
        let mut initial = Vec::new();
        match &self.init_expr {
            None => self.issue("state.init", "missing"),
            Some((lineno, expr)) => {
                for token in expr.split_whitespace() {
                    match NamedQubit::parse(token) {
                        Some(q) => initial.push(q),
                        None => self.issues.push(Issue {
                            path: "state.init".into(),
                            message: format!("line {lineno}: unknown state {token:?}"),
                        }),
                    }
                }
                if initial.len() != entities {
                    self.issues.push(Issue {
                        path: "state.init".into(),
                        message: format!("{} factors for {entities} entities", initial.len()),
                    });
                }
            }
        }

        // POVM.
        if self.effects.is_empty() {
            self.issue("povm", "no effects");
        } else if let Err(mut povm_issues) = build_povm(entities, &self.effects) {
            self.issues.append(&mut povm_issues);
        }

        // Observer.
        let epsilon = self.epsilon.unwrap_or(DEFAULT_EPSILON);
        let mode = self.mode.unwrap_or(ObservationMode::Witness);
        let seed = self.seed.unwrap_or(0);
        if let Err(e) = DominanceRule::new(epsilon, mode) {
            self.issue("observer.epsilon", e.to_string());
        }

        // Schedule.
        let t0 = self.t0.unwrap_or(0.0);
        let dt = match self.dt {
            Some(v) => v,
            None => {
                self.issue("schedule.dt", "missing");
                1.0
            }
        };
        let steps = match self.steps {
            Some(v) => v,
            None => {
                self.issue("schedule.steps", "missing");
                1
            }
        };
        if let Err(e) = ObservationSchedule::new(t0, dt, steps) {
            self.issue("schedule", e.to_string());
        }

        // Analysis cross-validation.
        if let Some(a) = &self.analysis {
            let check_set = |issues: &mut Vec<Issue>, key: &str, set: &Option<Vec<usize>>| {
                if let Some(v) = set {
                    for &i in v {
                        if i >= entities {
                            issues.push(Issue {
                                path: format!("analysis.{key}"),
                                message: format!("entity {i} >= {entities}"),
                            });
                        }
                    }
                    let unique: std::collections::BTreeSet<usize> = v.iter().copied().collect();
                    if unique.len() != v.len() {
                        issues.push(Issue {
                            path: format!("analysis.{key}"),
                            message: "duplicate entity index".into(),
                        });
                    }
                }
            };
            check_set(&mut self.issues, "system", &a.system);
            check_set(&mut self.issues, "fragment", &a.fragment);
            check_set(&mut self.issues, "system2", &a.system2);
            check_set(&mut self.issues, "frag1", &a.frag1);
            check_set(&mut self.issues, "frag2", &a.frag2);
            if !(a.eta > 0.0 && a.eta < 1.0) {
                self.issue("analysis.eta", format!("{} outside (0,1)", a.eta));
            }
            if a.fragment.is_some() && a.system.is_none() {
                self.issue("analysis.fragment", "fragment given without system");
            }
            if a.frag1.is_some() != a.frag2.is_some() {
                self.issue("analysis.frag1", "frag1 and frag2 must be given together");
            }
        }

        if !self.issues.is_empty() {
            return Err(self.issues);
        }
        Ok(Scenario {
            id: self.id.expect("checked above"),
            entities,
            hamiltonian,
            initial,
            effects: self.effects,
            observer: ObserverConfig { epsilon, mode, seed },
            schedule: ScheduleConfig { t0, dt, steps },
            analysis: self.analysis,
        })
    }
}

/// Gap policy option shared by run/fsm commands.
pub fn parse_gap_policy(s: &str) -> Result<GapPolicy, String> {
    GapPolicy::parse(s).ok_or_else(|| format!("bad gap policy {s:?} (expect break|bridge)"))
}
