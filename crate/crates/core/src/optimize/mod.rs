//! Derivative-free minimizers with full evaluation traces.
//!
//! [`local_minimize`] is a linear-approximation trust-region method (COBYLA
//! without constraints) used by the per-instance strategies.
//! [`global_minimize`] is a tree-structured Parzen estimator used to train
//! linear parameters inside a box.

mod cobyla;
mod tpe;

use std::io::Write;

use serde::Serialize;

pub use cobyla::{local_minimize, local_minimize_with, LocalOptions};
pub use tpe::{global_minimize, global_minimize_with, GlobalOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub params: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    BudgetExhausted,
    Converged,
    /// The objective returned NaN or infinity; the trace stops before it.
    NonFinite,
    /// The simplex inverse lost accuracy.
    RoundingLimited,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveTrace {
    pub evaluations: Vec<Evaluation>,
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub eval_count: usize,
    pub termination: Termination,
}

impl ObjectiveTrace {
    /// One `{"params": [...], "value": ...}` object per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.evaluations {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Wraps an objective, recording every evaluation and enforcing a budget.
pub(crate) struct Recorder<F> {
    objective: F,
    budget: usize,
    evaluations: Vec<Evaluation>,
    best: Option<usize>,
    stop: Option<Termination>,
}

impl<F: FnMut(&[f64]) -> f64> Recorder<F> {
    pub(crate) fn new(objective: F, budget: usize) -> Self {
        Recorder {
            objective,
            budget,
            evaluations: Vec::with_capacity(budget.min(1 << 16)),
            best: None,
            stop: None,
        }
    }

    /// `None` once the budget is spent or the objective misbehaved.
    pub(crate) fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.stop.is_some() {
            return None;
        }
        if self.evaluations.len() >= self.budget {
            self.stop = Some(Termination::BudgetExhausted);
            return None;
        }
        let value = (self.objective)(x);
        if !value.is_finite() {
            self.stop = Some(Termination::NonFinite);
            return None;
        }
        let idx = self.evaluations.len();
        if self.best.is_none_or(|b| value < self.evaluations[b].value) {
            self.best = Some(idx);
        }
        self.evaluations.push(Evaluation {
            params: x.to_vec(),
            value,
        });
        Some(value)
    }

    pub(crate) fn finish(self, fallback: Termination) -> ObjectiveTrace {
        let termination = self.stop.unwrap_or(fallback);
        let (best_params, best_value) = match self.best {
            Some(b) => (self.evaluations[b].params.clone(), self.evaluations[b].value),
            None => (Vec::new(), f64::INFINITY),
        };
        ObjectiveTrace {
            eval_count: self.evaluations.len(),
            evaluations: self.evaluations,
            best_params,
            best_value,
            termination,
        }
    }
}
