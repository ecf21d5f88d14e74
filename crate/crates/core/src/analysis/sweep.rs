use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::fidelity_from_hellinger;
use crate::engine::{Execution, NoiseKind, Normalization, RunConfig};
use crate::error::{Error, Result};
use crate::gbqc::{bell_experiment, x_gate_experiment, ExperimentOutcome};
use crate::mbqc::mbqc_x_experiment;
use crate::vqa::{median, run_vqa, Graph, VqaConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "xgate-gbqc")]
    XGateGbqc,
    #[serde(rename = "bell-gbqc")]
    BellGbqc,
    #[serde(rename = "xgate-mbqc")]
    XGateMbqc,
    #[serde(rename = "vqa")]
    Vqa,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::XGateGbqc,
        Experiment::BellGbqc,
        Experiment::XGateMbqc,
        Experiment::Vqa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::XGateGbqc => "xgate-gbqc",
            Experiment::BellGbqc => "bell-gbqc",
            Experiment::XGateMbqc => "xgate-mbqc",
            Experiment::Vqa => "vqa",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

fn default_restarts() -> usize {
    5
}

/// A noise sweep of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub experiment: Experiment,
    pub noise_type: NoiseKind,
    /// Ascending, each in `[0, 0.5)`.
    pub probabilities: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    /// Report unnormalized states instead of herald-normalized ones.
    #[serde(default)]
    pub raw: bool,
    /// Optimizer restarts per probability (variational experiment only).
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

impl SweepSpec {
    pub fn new(experiment: Experiment, noise_type: NoiseKind, probabilities: Vec<f64>, n_samples: usize, seed: u64) -> Self {
        SweepSpec {
            experiment,
            noise_type,
            probabilities,
            n_samples,
            seed,
            raw: false,
            restarts: default_restarts(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: SweepSpec = serde_json::from_str(text).map_err(|e| Error::Config(format!("sweep spec: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.probabilities.is_empty() {
            return Err(Error::Config("no probabilities to sweep".into()));
        }
        for &p in &self.probabilities {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::Probability(p));
            }
        }
        if self.probabilities.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("probabilities must be strictly ascending".into()));
        }
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be positive".into()));
        }
        Ok(())
    }

    pub fn normalization(&self) -> Normalization {
        if self.raw {
            Normalization::None
        } else {
            Normalization::Herald
        }
    }
}

/// `f64` that serializes to JSON as a number when finite and as a string
/// otherwise, so every value survives a round trip. Equality is bitwise,
/// except that all NaNs are equal (their payload is not kept).
#[derive(Debug, Clone, Copy)]
pub struct Float(pub f64);

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        (self.0.is_nan() && other.0.is_nan()) || self.0.to_bits() == other.0.to_bits()
    }
}

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Float {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(Float(x)),
            Repr::Text(t) => t.parse().map(Float).map_err(serde::de::Error::custom),
        }
    }
}

/// One output value: CSV columns `p,scenario,observable,value,stderr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: Float,
    pub scenario: String,
    pub observable: String,
    pub value: Float,
    pub stderr: Float,
}

impl SweepRow {
    fn new(p: f64, scenario: &str, observable: impl Into<String>, value: f64, stderr: f64) -> Self {
        SweepRow {
            p: Float(p),
            scenario: scenario.to_string(),
            observable: observable.into(),
            value: Float(value),
            stderr: Float(stderr),
        }
    }
}

pub const CSV_HEADER: [&str; 5] = ["p", "scenario", "observable", "value", "stderr"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn value(&self, p: f64, observable: &str) -> Option<(f64, f64)> {
        self.rows
            .iter()
            .find(|r| r.p.0 == p && r.observable == observable)
            .map(|r| (r.value.0, r.stderr.0))
    }

    /// `(value, stderr)` of `observable` at every swept probability, in
    /// sweep order.
    pub fn series(&self, observable: &str) -> Vec<(f64, f64)> {
        self.spec
            .probabilities
            .iter()
            .filter_map(|&p| self.value(p, observable))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows_csv(&self.rows, out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn write_rows_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        // `Display` for f64 prints the shortest string that parses back to
        // the same bits
        w.write_record([
            r.p.0.to_string(),
            r.scenario.clone(),
            r.observable.clone(),
            r.value.0.to_string(),
            r.stderr.0.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rd = csv::Reader::from_reader(input);
    if rd.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!("unexpected CSV header {:?}", rd.headers()?)));
    }
    let float = |s: &str| -> Result<Float> {
        s.parse()
            .map(Float)
            .map_err(|_| Error::Config(format!("not a number: {s:?}")))
    };
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        rows.push(SweepRow {
            p: float(&rec[0])?,
            scenario: rec[1].to_string(),
            observable: rec[2].to_string(),
            value: float(&rec[3])?,
            stderr: float(&rec[4])?,
        });
    }
    Ok(rows)
}

fn outcome_rows(p: f64, scenario: &str, o: &ExperimentOutcome, bell: bool) -> Result<Vec<SweepRow>> {
    let rho = &o.rho;
    let mut rows = Vec::new();
    for i in 0..rho.dim() {
        rows.push(SweepRow::new(p, scenario, format!("rho_{i}{i}"), rho.entries[(i, i)].re, rho.entry_stderr(i, i)));
    }
    if bell {
        let last = rho.dim() - 1;
        rows.push(SweepRow::new(
            p,
            scenario,
            format!("rho_0{last}_re"),
            rho.entries[(0, last)].re,
            rho.entry_stderr(0, last),
        ));
    }
    rows.push(SweepRow::new(p, scenario, "trace", rho.trace(), rho.trace_stderr()));
    rows.push(SweepRow::new(p, scenario, "herald_probability", rho.herald_probability, rho.herald_probability_stderr()));
    rows.push(SweepRow::new(p, scenario, "discarded_weight", rho.discarded_weight, rho.discarded_weight_stderr()));
    rows.push(SweepRow::new(p, scenario, "hellinger", o.hellinger, o.hellinger_stderr));
    let h = o.hellinger.min(1.0);
    let dfdh = 4.0 * h * (1.0 - h * h);
    rows.push(SweepRow::new(p, scenario, "fidelity", fidelity_from_hellinger(h)?, dfdh * o.hellinger_stderr));
    Ok(rows)
}

/// Standard error of a median over independent restarts, from their spread.
pub fn median_stderr(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    if v.len() < 2 {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    1.2533 * (var / n).sqrt()
}

/// Run every probability of `spec` and collect the result rows in sweep
/// order. All probabilities share the spec seed, so each trajectory sees
/// the same underlying draws scaled by a different noise strength and the
/// curves are smooth in `p`. Results do not depend on the thread count.
pub fn run_sweep(spec: &SweepSpec, execution: Execution) -> Result<SweepResult> {
    spec.validate()?;
    let scenario = spec.noise_type.label();
    let mut rows = Vec::new();
    if spec.experiment == Experiment::Vqa {
        let cfg = VqaConfig {
            graph: Graph::square(),
            noise_types: vec![spec.noise_type],
            probabilities: spec.probabilities.clone(),
            noiseless: false,
            restarts: spec.restarts,
            seed: spec.seed,
            n_samples: spec.n_samples,
            max_iters: 500,
        };
        let report = run_vqa(&cfg, execution).map_err(|e| e.context(format!("{} ({scenario})", spec.experiment)))?;
        for s in &report.summary {
            let p = s.p;
            rows.push(SweepRow::new(p, scenario, "approximation_ratio", s.median_approximation_ratio, median_stderr(&s.approximation_ratios)));
            rows.push(SweepRow::new(p, scenario, "relative_error", s.median_relative_error, median_stderr(&s.relative_errors)));
            rows.push(SweepRow::new(p, scenario, "final_energy", median(&s.final_energies), median_stderr(&s.final_energies)));
        }
        return Ok(SweepResult {
            spec: spec.clone(),
            rows,
        });
    }
    for &p in &spec.probabilities {
        let cfg = RunConfig::new(spec.n_samples, spec.seed)
            .normalized(spec.normalization())
            .with_execution(execution);
        let noise = spec.noise_type.model(p);
        let outcome = match spec.experiment {
            Experiment::XGateGbqc => x_gate_experiment(&noise, &cfg),
            Experiment::BellGbqc => bell_experiment(&noise, &cfg),
            Experiment::XGateMbqc => mbqc_x_experiment(&noise, &cfg),
            Experiment::Vqa => unreachable!("handled above"),
        }
        .map_err(|e| e.context(format!("{} ({scenario}) at p = {p}", spec.experiment)))?;
        rows.extend(outcome_rows(p, scenario, &outcome, spec.experiment == Experiment::BellGbqc)?);
    }
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
    })
}
