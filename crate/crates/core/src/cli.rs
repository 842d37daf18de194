//! Command implementations behind the `fivequdit` binary.
//!
//! Every command produces a JSON document (or JSON lines for `simulate`)
//! and a pass/fail flag; the binary maps these to output files and exit
//! codes.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::circuit::{build_encoding_circuit, circuit_unitary_check, GateJson};
use crate::code::{encode, Codebook, CodewordJson};
use crate::decoder::{build_recovery, logical_fidelity};
use crate::error::QeccError;
use crate::kl::{verify, Verdict};
use crate::laflamme::laflamme_report;
use crate::math::{inner_product, CodeParams, QuditState, DEFAULT_TOL, LAMBDA_TOL};
use crate::optimality::falsify;
use crate::pauli::{full_pauli_error_set, random_single_register_error, ErrorKind, RegisterError};

pub const MAX_DEFAULT_N: usize = 5;
pub const MAX_LARGE_N: usize = 8;
/// Decoded fidelity must be at least `1 - FIDELITY_TOL`.
pub const FIDELITY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Qecc(#[from] QeccError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Encode,
    Verify,
    CircuitCheck,
    Simulate,
    Optimality,
    ReportAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub trials: usize,
    pub tol: Option<f64>,
    pub format: OutputFormat,
    pub timestamp: bool,
    pub allow_large_n: bool,
}

impl RunConfig {
    pub fn new(command: Command, n: usize) -> Self {
        Self {
            command,
            n,
            k: 0,
            seed: 0,
            trials: 100,
            tol: None,
            format: OutputFormat::Json,
            timestamp: true,
            allow_large_n: false,
        }
    }

    /// Checks the config, returning any warnings to print.
    pub fn validate(&self) -> Result<Vec<String>, CliError> {
        let mut warnings = Vec::new();
        if self.n < 2 {
            return Err(CliError::Usage(format!(
                "--n must be at least 2, got {}",
                self.n
            )));
        }
        if self.n > MAX_DEFAULT_N {
            if !self.allow_large_n || self.n > MAX_LARGE_N {
                return Err(CliError::Usage(format!(
                    "--n {} exceeds {MAX_DEFAULT_N}; pass --allow-large-n for n up to {MAX_LARGE_N}",
                    self.n
                )));
            }
            warnings.push(format!(
                "n = {} builds {}-dimensional states; the sweeps may take a long time",
                self.n,
                self.n.pow(5)
            ));
        }
        if self.command == Command::Encode && self.k >= self.n {
            return Err(CliError::Usage(format!("--k must be below n = {}", self.n)));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if let Some(tol) = self.tol {
            CodeParams::with_tol(self.n, tol).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        Ok(warnings)
    }

    fn params(&self, n: usize) -> Result<CodeParams, CliError> {
        Ok(CodeParams::with_tol(n, self.tol.unwrap_or(DEFAULT_TOL))?)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output: String,
    pub ok: bool,
    /// Records that crossed a threshold, for stderr.
    pub offending: Vec<String>,
}

pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let started = Instant::now();
    let (mut doc, ok, offending, lines) = match config.command {
        Command::Encode => {
            let (doc, ok) = encode_doc(config)?;
            (doc, ok, vec![], None)
        }
        Command::Verify => {
            let (doc, ok) = verify_doc(config, config.n)?;
            (doc, ok, vec![], None)
        }
        Command::CircuitCheck => {
            let (doc, ok) = circuit_doc(config, config.n)?;
            (doc, ok, vec![], None)
        }
        Command::Simulate => {
            let sim = simulate(config, config.n)?;
            let offending = sim
                .records
                .iter()
                .filter(|r| r.fidelity < 1.0 - FIDELITY_TOL)
                .map(|r| serde_json::to_string(r).expect("serializable"))
                .collect();
            let ok = sim.summary.failures == 0;
            let lines: Vec<Value> = sim.records.iter().map(|r| json!(r)).collect();
            (json!(sim.summary), ok, offending, Some(lines))
        }
        Command::Optimality => {
            let (doc, ok) = optimality_doc(config, config.n)?;
            (doc, ok, vec![], None)
        }
        Command::ReportAll => {
            let (doc, ok) = report_all(config)?;
            (doc, ok, vec![], None)
        }
    };
    if config.timestamp {
        if let Value::Object(map) = &mut doc {
            map.insert(
                "elapsed_seconds".into(),
                json!(started.elapsed().as_secs_f64()),
            );
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs());
            map.insert("timestamp".into(), json!(now));
        }
    }
    let mut offending = offending;
    if !ok && offending.is_empty() {
        offending.push(serde_json::to_string(&doc).expect("serializable"));
    }
    let output = match (config.format, lines) {
        (OutputFormat::Json, None) => format!(
            "{}\n",
            serde_json::to_string_pretty(&doc).expect("serializable")
        ),
        (OutputFormat::Json, Some(lines)) => {
            let mut out = String::new();
            for l in lines.iter().chain(std::iter::once(&doc)) {
                out.push_str(&serde_json::to_string(l).expect("serializable"));
                out.push('\n');
            }
            out
        }
        (OutputFormat::Text, None) => render_text(&doc),
        (OutputFormat::Text, Some(lines)) => {
            let mut out = String::new();
            for l in &lines {
                out.push_str(&render_inline(l));
                out.push('\n');
            }
            out.push_str(&render_text(&doc));
            out
        }
    };
    Ok(RunOutcome {
        output,
        ok,
        offending,
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn encode_doc(config: &RunConfig) -> Result<(Value, bool), CliError> {
    let params = config.params(config.n)?;
    let word = encode(&params, config.k)?;
    Ok((to_value(&CodewordJson::from_state(config.k, &word)), true))
}

fn verify_doc(config: &RunConfig, n: usize) -> Result<(Value, bool), CliError> {
    let params = config.params(n)?;
    let book = Codebook::build(&params);
    let (lm, mut report) = verify(&book, &full_pauli_error_set(&params))?;
    report.elapsed_seconds = report.elapsed_seconds.filter(|_| config.timestamp);
    Ok((to_value(&report), lm.verdict() == Verdict::Pass))
}

#[derive(Debug, Clone, Serialize)]
pub struct CircuitResidual {
    pub k: usize,
    pub overlap: [f64; 2],
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CircuitCheckReport {
    pub n: usize,
    pub gate_count: usize,
    pub circuit: Vec<GateJson>,
    pub residuals: Vec<CircuitResidual>,
    pub max_residual: f64,
    pub unitarity_residual: f64,
}

/// `|<encode(k)| circuit |k,0,0,0,0>> - 1|` for every `k`.
pub fn circuit_check(params: &CodeParams) -> Result<CircuitCheckReport, QeccError> {
    let circuit = build_encoding_circuit(params);
    let residuals = (0..params.n)
        .map(|k| {
            let input = QuditState::basis(params.n, &[k, 0, 0, 0, 0])?;
            let out = circuit.apply(&input)?;
            let overlap = inner_product(&encode(params, k)?, &out)?;
            Ok(CircuitResidual {
                k,
                overlap: [overlap.re, overlap.im],
                residual: (overlap - Complex64::new(1.0, 0.0)).norm(),
            })
        })
        .collect::<Result<Vec<_>, QeccError>>()?;
    Ok(CircuitCheckReport {
        n: params.n,
        gate_count: circuit.gates().len(),
        circuit: circuit.to_json(),
        max_residual: residuals.iter().map(|r| r.residual).fold(0.0, f64::max),
        residuals,
        unitarity_residual: circuit_unitary_check(&circuit)?,
    })
}

fn circuit_doc(config: &RunConfig, n: usize) -> Result<(Value, bool), CliError> {
    let report = circuit_check(&config.params(n)?)?;
    let ok = report.max_residual < LAMBDA_TOL && report.unitarity_residual < LAMBDA_TOL;
    Ok((to_value(&report), ok))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub register: usize,
    pub error_kind: String,
    pub fidelity: f64,
    pub syndrome: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub summary: bool,
    pub n: usize,
    pub trials: usize,
    pub min_fidelity: f64,
    pub failures: usize,
    pub corrected_dimension: usize,
    pub leftover_projector_rank: usize,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub records: Vec<TrialRecord>,
    pub summary: SimulationSummary,
}

/// A normalized random logical superposition, deterministic in `rng`.
pub fn random_logical_coeffs(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let raw: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|c| c / norm).collect()
}

/// Trial `t` uses seed `config.seed + t`: even trials apply a random
/// nontrivial Pauli, odd trials a random unitary.
fn simulate(config: &RunConfig, n: usize) -> Result<Simulation, CliError> {
    let params = config.params(n)?;
    let book = Codebook::build(&params);
    let plan = build_recovery(&book, &full_pauli_error_set(&params))?;
    let mut records = Vec::with_capacity(config.trials);
    for t in 0..config.trials as u64 {
        let seed = config.seed.wrapping_add(t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = book.encode_superposition(&random_logical_coeffs(n, &mut rng))?;
        let error = if t % 2 == 0 {
            let register = rng.random_range(1..=5);
            let ab = rng.random_range(1..n * n);
            RegisterError::pauli(&params, register, ab / n, ab % n)?
        } else {
            random_single_register_error(&params, seed)
        };
        let error_kind = match error.kind() {
            ErrorKind::Pauli { a, b } => format!("X^{a} Z^{b}"),
            ErrorKind::MatrixUnit { i0, j0 } => format!("E({i0},{j0})"),
            ErrorKind::Arbitrary(_) => "random-unitary".to_string(),
        };
        let (fidelity, syndrome) = match plan.decode(&error.apply(&psi)?) {
            Ok(out) => (logical_fidelity(&out.state, &psi)?, out.syndrome_label),
            Err(QeccError::Undecodable(_)) => (0.0, "undecodable".to_string()),
            Err(e) => return Err(e.into()),
        };
        records.push(TrialRecord {
            seed,
            register: error.register(),
            error_kind,
            fidelity,
            syndrome,
        });
    }
    let summary = SimulationSummary {
        summary: true,
        n,
        trials: records.len(),
        min_fidelity: records.iter().map(|r| r.fidelity).fold(1.0, f64::min),
        failures: records
            .iter()
            .filter(|r| r.fidelity < 1.0 - FIDELITY_TOL)
            .count(),
        corrected_dimension: plan.corrected_dimension(),
        leftover_projector_rank: plan.leftover_projector_rank(),
    };
    Ok(Simulation { records, summary })
}

fn optimality_doc(config: &RunConfig, n: usize) -> Result<(Value, bool), CliError> {
    let report = falsify(&config.params(n)?, config.trials, config.seed)?;
    let ok = report.passes();
    Ok((to_value(&report), ok))
}

/// Four-register candidates have `n^4`-dimensional words; the falsifier is
/// run for the two smallest dimensions.
const REPORT_ALL_OPTIMALITY_MAX_N: usize = 3;

fn report_all(config: &RunConfig) -> Result<(Value, bool), CliError> {
    let mut all_ok = true;
    let mut sections = Vec::new();
    for n in 2..=MAX_DEFAULT_N {
        let mut section = Map::new();
        section.insert("n".into(), json!(n));
        let (v, ok) = verify_doc(config, n)?;
        all_ok &= ok;
        section.insert("verify".into(), v);
        let (v, ok) = circuit_doc(config, n)?;
        all_ok &= ok;
        section.insert("circuit_check".into(), v);
        let sim = simulate(config, n)?;
        all_ok &= sim.summary.failures == 0;
        section.insert("simulate".into(), json!(sim.summary));
        if n <= REPORT_ALL_OPTIMALITY_MAX_N {
            let (v, ok) = optimality_doc(config, n)?;
            all_ok &= ok;
            section.insert("optimality".into(), v);
        }
        sections.push(Value::Object(section));
    }
    let laflamme = laflamme_report()?;
    all_ok &= laflamme
        .lambda_max_diff_logical_shift
        .is_some_and(|d| d < LAMBDA_TOL);
    Ok((
        json!({ "sections": sections, "laflamme": laflamme, "all_passed": all_ok }),
        all_ok,
    ))
}

/// Renders a JSON document as indented `key: value` lines.
pub fn render_text(doc: &Value) -> String {
    let mut out = String::new();
    render_into(doc, 0, &mut out);
    out
}

fn render_into(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                if is_scalar_like(val) {
                    out.push_str(&format!("{pad}{key}: {}\n", render_inline(val)));
                } else {
                    out.push_str(&format!("{pad}{key}:\n"));
                    render_into(val, depth + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if is_scalar_like(item) {
                    out.push_str(&format!("{pad}- {}\n", render_inline(item)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_into(item, depth + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", render_inline(other))),
    }
}

fn is_scalar_like(v: &Value) -> bool {
    match v {
        Value::Array(items) => {
            items.len() <= 8 && items.iter().all(|i| !i.is_object() && !i.is_array())
        }
        Value::Object(_) => false,
        _ => true,
    }
}

fn render_inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!(
            "[{}]",
            items
                .iter()
                .map(render_inline)
                .collect::<Vec<_>>()
                .join(", ")
        ),
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", render_inline(v)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}
