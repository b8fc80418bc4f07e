use serde::Serialize;

use crate::Result;

/// Exact outcome counts over an enumerated coin space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExactCounts {
    pub valid: u64,
    pub dont_know: u64,
    pub invalid: u64,
    pub total: u64,
}

impl ExactCounts {
    /// Whether `dont_know / total == num / den` exactly.
    pub fn dont_know_equals(&self, num: u64, den: u64) -> bool {
        self.dont_know as u128 * den as u128 == num as u128 * self.total as u128
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputReport {
    pub input_id: String,
    pub p_valid: f64,
    pub p_dontknow: f64,
    pub p_invalid: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_counts: Option<ExactCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// Largest `3 sqrt(p(1-p)/trials)` over the three estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl InputReport {
    /// Probability mass charged against the protocol: invalid outputs plus
    /// "don't know" in excess of the budget.
    pub fn excess_error(&self, dont_know_budget: f64) -> f64 {
        self.p_invalid + (self.p_dontknow - dont_know_budget).max(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum EvaluationMethod {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub protocol: String,
    pub problem: String,
    pub method: EvaluationMethod,
    pub dont_know_budget: f64,
    pub inputs: Vec<InputReport>,
    /// Max over inputs of `invalid + excess dont_know over the budget`.
    pub worst_case: f64,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    #[serde(rename = "input-id")]
    input_id: &'a str,
    p_valid: f64,
    p_dontknow: f64,
    p_invalid: f64,
    trials: Option<u64>,
    radius: Option<f64>,
}

impl EvaluationReport {
    pub(crate) fn new(
        protocol: String,
        problem: String,
        method: EvaluationMethod,
        dont_know_budget: f64,
        inputs: Vec<InputReport>,
    ) -> Self {
        let worst_case = inputs.iter().map(|r| r.excess_error(dont_know_budget)).fold(0.0, f64::max);
        Self { protocol, problem, method, dont_know_budget, inputs, worst_case }
    }

    pub fn max_invalid(&self) -> f64 {
        self.inputs.iter().map(|r| r.p_invalid).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Columns: `input-id, p_valid, p_dontknow, p_invalid, trials, radius`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.inputs {
            w.serialize(CsvRow {
                input_id: &r.input_id,
                p_valid: r.p_valid,
                p_dontknow: r.p_dontknow,
                p_invalid: r.p_invalid,
                trials: r.trials,
                radius: r.radius,
            })?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Serialization(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
