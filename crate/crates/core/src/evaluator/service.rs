use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use crate::search::SearchState;

use super::{Evaluation, Evaluator};

/// Longest a partial batch waits for more requests before it is flushed.
pub const FLUSH_DEADLINE: Duration = Duration::from_millis(1);

struct Request<S: SearchState> {
    states: Vec<S>,
    reply: Sender<Vec<Evaluation<S::Move>>>,
}

/// Evaluator running on its own thread. Requests from many workers are
/// merged into batches of up to `batch_size` states.
pub struct EvalService<S: SearchState> {
    tx: Option<Sender<Request<S>>>,
    thread: Option<JoinHandle<()>>,
}

/// Cheap, cloneable submission handle.
#[derive(Clone)]
pub struct EvalHandle<S: SearchState> {
    tx: Sender<Request<S>>,
}

impl<S: SearchState> EvalService<S> {
    pub fn start(evaluator: Arc<dyn Evaluator<S>>, batch_size: usize) -> EvalService<S> {
        let (tx, rx) = mpsc::channel::<Request<S>>();
        let batch_size = batch_size.max(1);
        let thread = thread::Builder::new()
            .name("evaluator".into())
            .spawn(move || serve(evaluator, rx, batch_size))
            .expect("spawn evaluator thread");
        EvalService {
            tx: Some(tx),
            thread: Some(thread),
        }
    }

    pub fn handle(&self) -> EvalHandle<S> {
        EvalHandle {
            tx: self.tx.clone().expect("service running"),
        }
    }
}

impl<S: SearchState> Drop for EvalService<S> {
    fn drop(&mut self) {
        self.tx.take();
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl<S: SearchState> EvalHandle<S> {
    /// Blocks until the service has evaluated `states`.
    pub fn evaluate(&self, states: Vec<S>) -> Vec<Evaluation<S::Move>> {
        let (reply, rx) = mpsc::channel();
        self.tx
            .send(Request { states, reply })
            .expect("evaluator service stopped");
        rx.recv().expect("evaluator service dropped a request")
    }
}

fn serve<S: SearchState>(evaluator: Arc<dyn Evaluator<S>>, rx: Receiver<Request<S>>, batch_size: usize) {
    while let Ok(first) = rx.recv() {
        let mut pending = vec![first];
        let mut count = pending[0].states.len();
        let deadline = Instant::now() + FLUSH_DEADLINE;
        while count < batch_size {
            let left = deadline.saturating_duration_since(Instant::now());
            match rx.recv_timeout(left) {
                Ok(req) => {
                    count += req.states.len();
                    pending.push(req);
                }
                Err(RecvTimeoutError::Timeout) | Err(RecvTimeoutError::Disconnected) => break,
            }
        }
        let states: Vec<S> = pending.iter().flat_map(|r| r.states.iter().cloned()).collect();
        let mut results = evaluator.evaluate_batch(&states).into_iter();
        for req in pending {
            let part: Vec<_> = results.by_ref().take(req.states.len()).collect();
            // A worker that gave up (search stopped) no longer listens.
            let _ = req.reply.send(part);
        }
    }
}
