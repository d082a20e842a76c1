//! Position evaluation contract consumed by the search, plus built-in
//! evaluators that need no trained network.

mod builtin;
mod service;
mod table;

use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

use crate::encoding::{policy_index, PolicyScheme};
use crate::rules::{GameState, Move};
use crate::search::SearchState;

pub use builtin::{material_balance, MaterialEvaluator, UniformEvaluator, MATERIAL_K};
pub use service::{EvalHandle, EvalService, FLUSH_DEADLINE};
pub use table::TableEvaluator;

/// Value for the side to move plus a prior over every legal move.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation<M> {
    pub value: f32,
    pub priors: Vec<(M, f32)>,
}

impl<M: Copy> Evaluation<M> {
    pub fn uniform(moves: &[M]) -> Evaluation<M> {
        let p = if moves.is_empty() {
            0.0
        } else {
            1.0 / moves.len() as f32
        };
        Evaluation {
            value: 0.0,
            priors: moves.iter().map(|&m| (m, p)).collect(),
        }
    }
}

impl Evaluation<Move> {
    /// Priors scattered into a full policy vector of `scheme`.
    pub fn dense(&self, state: &GameState, scheme: PolicyScheme) -> Vec<f32> {
        let mut out = vec![0.0; scheme.size()];
        for &(mv, p) in &self.priors {
            let i = policy_index(mv, state, scheme).expect("legal moves are representable");
            out[i] = p;
        }
        out
    }
}

pub trait Evaluator<S: SearchState>: Send + Sync {
    /// One evaluation per state, in order. States must not be terminal.
    fn evaluate_batch(&self, states: &[S]) -> Vec<Evaluation<S::Move>>;
}

impl<S: SearchState, E: Evaluator<S> + ?Sized> Evaluator<S> for Arc<E> {
    fn evaluate_batch(&self, states: &[S]) -> Vec<Evaluation<S::Move>> {
        (**self).evaluate_batch(states)
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot read evaluator table {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("evaluator table line {line}: {reason}")]
    Table { line: usize, reason: String },
    #[error("batch size must be at least 1")]
    BatchSize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvaluatorKind {
    Uniform,
    Material,
    Table(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluatorSpec {
    pub kind: EvaluatorKind,
    pub batch_size: usize,
}

impl EvaluatorSpec {
    pub fn new(kind: EvaluatorKind) -> EvaluatorSpec {
        EvaluatorSpec { kind, batch_size: 8 }
    }

    /// Builds the evaluator. Table files are read and validated here.
    pub fn build(&self) -> Result<Arc<dyn Evaluator<GameState>>, EvalError> {
        if self.batch_size == 0 {
            return Err(EvalError::BatchSize);
        }
        Ok(match &self.kind {
            EvaluatorKind::Uniform => Arc::new(UniformEvaluator),
            EvaluatorKind::Material => Arc::new(MaterialEvaluator::default()),
            EvaluatorKind::Table(path) => Arc::new(TableEvaluator::load(path)?),
        })
    }
}

/// Evaluates `states` with the evaluator described by `spec`, in chunks of
/// `spec.batch_size`.
pub fn evaluate_batch(states: &[GameState], spec: &EvaluatorSpec) -> Result<Vec<Evaluation<Move>>, EvalError> {
    let evaluator = spec.build()?;
    Ok(states
        .chunks(spec.batch_size)
        .flat_map(|chunk| evaluator.evaluate_batch(chunk))
        .collect())
}
