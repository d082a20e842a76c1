use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, AtomicU64, AtomicU8, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use crate::evaluator::Evaluation;

use super::config::SearchConfig;
use super::formulas::{cpuct_for, enhance_checks, normalize, u_divisor_for};
use super::state::{SearchState, TranspositionKey};

const NEW: u8 = 0;
const PENDING: u8 = 1;
const EXPANDED: u8 = 2;

pub(crate) const NO_CHILD: usize = usize::MAX;

fn add_f64(cell: &AtomicU64, delta: f64) {
    let mut cur = cell.load(Ordering::Relaxed);
    loop {
        let next = (f64::from_bits(cur) + delta).to_bits();
        match cell.compare_exchange_weak(cur, next, Ordering::AcqRel, Ordering::Relaxed) {
            Ok(_) => return,
            Err(actual) => cur = actual,
        }
    }
}

/// Nodes visited on the way down, each with the index of the edge taken.
pub(crate) type Path<S> = Vec<(Arc<Node<S>>, usize)>;

pub(crate) struct Edge<S: SearchState> {
    pub mv: S::Move,
    /// Prior after check enhancement, before root noise.
    pub base_prior: f32,
    prior: AtomicU32,
    visits: AtomicU32,
    in_flight: AtomicU32,
    value_sum: AtomicU64,
    pub child: OnceLock<Arc<Node<S>>>,
}

impl<S: SearchState> Edge<S> {
    pub fn prior(&self) -> f32 {
        f32::from_bits(self.prior.load(Ordering::Relaxed))
    }

    pub fn set_prior(&self, p: f32) {
        self.prior.store(p.to_bits(), Ordering::Relaxed);
    }

    pub fn visits(&self) -> u32 {
        self.visits.load(Ordering::Acquire)
    }

    pub fn in_flight(&self) -> u32 {
        self.in_flight.load(Ordering::Acquire)
    }

    pub fn value_sum(&self) -> f64 {
        f64::from_bits(self.value_sum.load(Ordering::Acquire))
    }

    /// Settled mean value; `None` when unvisited.
    pub fn q(&self) -> Option<f32> {
        let n = self.visits();
        (n > 0).then(|| (self.value_sum() / n as f64) as f32)
    }
}

pub(crate) struct Expansion<S: SearchState> {
    pub value: f32,
    pub edges: Box<[Edge<S>]>,
}

pub(crate) struct Node<S: SearchState> {
    pub state: S,
    pub terminal: Option<f32>,
    status: AtomicU8,
    expansion: OnceLock<Expansion<S>>,
    visits: AtomicU32,
    winning: AtomicUsize,
}

impl<S: SearchState> Node<S> {
    pub fn new(state: S) -> Node<S> {
        let terminal = state.terminal_value();
        Node {
            state,
            terminal,
            status: AtomicU8::new(NEW),
            expansion: OnceLock::new(),
            visits: AtomicU32::new(0),
            winning: AtomicUsize::new(NO_CHILD),
        }
    }

    pub fn expansion(&self) -> Option<&Expansion<S>> {
        self.expansion.get()
    }

    pub fn edges(&self) -> &[Edge<S>] {
        self.expansion.get().map_or(&[], |e| &e.edges)
    }

    pub fn is_expanded(&self) -> bool {
        self.status.load(Ordering::Acquire) == EXPANDED
    }

    pub fn visits(&self) -> u32 {
        self.visits.load(Ordering::Acquire)
    }

    pub fn winning_child(&self) -> Option<usize> {
        let w = self.winning.load(Ordering::Acquire);
        (w != NO_CHILD).then_some(w)
    }

    fn mark_winning(&self, idx: usize) {
        // The first winning move found is kept.
        let _ = self
            .winning
            .compare_exchange(NO_CHILD, idx, Ordering::AcqRel, Ordering::Acquire);
    }

    fn try_claim(&self) -> Result<(), u8> {
        self.status
            .compare_exchange(NEW, PENDING, Ordering::AcqRel, Ordering::Acquire)
            .map(|_| ())
    }
}

/// Evaluation kept for transpositions: raw value and priors.
pub(crate) type StoredEval<M> = Arc<Evaluation<M>>;

pub(crate) struct TranspositionTable<M> {
    map: Mutex<HashMap<TranspositionKey, StoredEval<M>>>,
}

impl<M> TranspositionTable<M> {
    pub fn new() -> TranspositionTable<M> {
        TranspositionTable {
            map: Mutex::new(HashMap::new()),
        }
    }

    pub fn get(&self, key: &TranspositionKey) -> Option<StoredEval<M>> {
        self.map.lock().expect("table lock").get(key).cloned()
    }

    pub fn insert(&self, key: TranspositionKey, eval: StoredEval<M>) {
        self.map.lock().expect("table lock").entry(key).or_insert(eval);
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("table lock").len()
    }
}

pub(crate) enum Descent<S: SearchState> {
    /// Needs an evaluator call before it can be backed up.
    Leaf { path: Path<S>, leaf: Arc<Node<S>> },
    /// Value known without evaluation (terminal or transposition hit).
    Known {
        path: Path<S>,
        leaf: Arc<Node<S>>,
        value: f32,
    },
    /// Ran into a node another rollout is evaluating.
    Collision { path: Path<S> },
}

pub(crate) struct Tree<S: SearchState> {
    pub root: Arc<Node<S>>,
    pub table: Arc<TranspositionTable<S::Move>>,
    pub config: SearchConfig,
}

impl<S: SearchState> Tree<S> {
    /// PUCT child choice at an expanded node, counting in-flight rollouts
    /// as virtual losses.
    pub fn select(&self, node: &Node<S>) -> usize {
        let cfg = &self.config;
        if cfg.fix_checkmates {
            if let Some(w) = node.winning_child() {
                return w;
            }
        }
        let edges = node.edges();
        let vl = cfg.virtual_loss as f64;
        let mut stats = Vec::with_capacity(edges.len());
        let mut sum_n = 0.0;
        for e in edges {
            let inflight = e.in_flight() as f64;
            let n = e.visits() as f64 + vl * inflight;
            let w = e.value_sum() - vl * inflight;
            sum_n += n;
            stats.push((n, w));
        }
        let c = cpuct_for(sum_n, cfg);
        let u_div = if cfg.u_scaling { u_divisor_for(sum_n, cfg) } else { 1.0 };
        // The node's own expansion visit keeps the exploration term alive
        // before any child has been tried.
        let sqrt_total = (sum_n + 1.0).sqrt();
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (i, (e, &(n, w))) in edges.iter().zip(&stats).enumerate() {
            let q = if n > 0.0 { w / n } else { cfg.q_init as f64 };
            let u = c * e.prior() as f64 * sqrt_total / (u_div + n);
            let score = q + u;
            if score > best_score {
                best_score = score;
                best = i;
            }
        }
        best
    }

    pub fn descend(&self) -> Descent<S> {
        let mut path: Path<S> = Vec::with_capacity(32);
        let mut node = self.root.clone();
        loop {
            let idx = self.select(&node);
            let edge = &node.edges()[idx];
            edge.in_flight.fetch_add(1, Ordering::AcqRel);
            let child = edge
                .child
                .get_or_init(|| Arc::new(Node::new(node.state.play(edge.mv))))
                .clone();
            path.push((node.clone(), idx));
            if let Some(v) = child.terminal {
                if self.config.fix_checkmates && v <= -1.0 {
                    node.mark_winning(idx);
                }
                return Descent::Known {
                    path,
                    leaf: child,
                    value: v,
                };
            }
            if child.is_expanded() {
                node = child;
                continue;
            }
            match child.try_claim() {
                Ok(()) => {
                    if self.config.transpositions {
                        if let Some(stored) = child.state.transposition_key().and_then(|k| self.table.get(&k)) {
                            self.expand(&child, &stored);
                            return Descent::Known {
                                path,
                                leaf: child,
                                value: stored.value,
                            };
                        }
                    }
                    return Descent::Leaf { path, leaf: child };
                }
                Err(EXPANDED) => node = child,
                Err(_) => return Descent::Collision { path },
            }
        }
    }

    /// Attaches edges built from `eval` and publishes the node as expanded.
    pub fn expand(&self, node: &Node<S>, eval: &Evaluation<S::Move>) {
        let cfg = &self.config;
        let mut entries: Vec<(S::Move, f32, u32)> = eval
            .priors
            .iter()
            .map(|&(m, p)| (m, p.max(0.0), node.state.move_order(m)))
            .collect();
        entries.sort_by_key(|e| e.2);
        let mut priors: Vec<f32> = entries.iter().map(|e| e.1).collect();
        normalize(&mut priors);
        let checks: Vec<bool> = if cfg.enhance_checks || cfg.fix_checkmates {
            entries.iter().map(|e| node.state.gives_check(e.0)).collect()
        } else {
            Vec::new()
        };
        if cfg.enhance_checks {
            enhance_checks(&mut priors, &checks, cfg);
        }
        let edges: Box<[Edge<S>]> = entries
            .iter()
            .zip(&priors)
            .map(|(&(mv, _, _), &p)| Edge {
                mv,
                base_prior: p,
                prior: AtomicU32::new(p.to_bits()),
                visits: AtomicU32::new(0),
                in_flight: AtomicU32::new(0),
                value_sum: AtomicU64::new(0f64.to_bits()),
                child: OnceLock::new(),
            })
            .collect();
        if cfg.fix_checkmates {
            // A checking move that leaves no reply ends the game on the spot.
            for (i, e) in edges.iter().enumerate() {
                if !checks[i] {
                    continue;
                }
                let child = e.child.get_or_init(|| Arc::new(Node::new(node.state.play(e.mv))));
                if child.terminal.is_some_and(|v| v <= -1.0) {
                    node.mark_winning(i);
                    break;
                }
            }
        }
        let _ = node.expansion.set(Expansion {
            value: eval.value,
            edges,
        });
        node.status.store(EXPANDED, Ordering::Release);
    }

    /// Propagates `value` (for the side to move at `leaf`) up `path`.
    pub fn backup(&self, path: &[(Arc<Node<S>>, usize)], leaf: &Node<S>, value: f32) {
        leaf.visits.fetch_add(1, Ordering::AcqRel);
        let mut v = -(value as f64);
        for (node, idx) in path.iter().rev() {
            let e = &node.edges()[*idx];
            add_f64(&e.value_sum, v);
            e.visits.fetch_add(1, Ordering::AcqRel);
            e.in_flight.fetch_sub(1, Ordering::AcqRel);
            node.visits.fetch_add(1, Ordering::AcqRel);
            v = -v;
        }
    }

    pub fn revert(&self, path: &[(Arc<Node<S>>, usize)]) {
        for (node, idx) in path {
            node.edges()[*idx].in_flight.fetch_sub(1, Ordering::AcqRel);
        }
    }

    /// Expands the root directly (no rollout is counted for it).
    pub fn expand_root(&self, eval: &Evaluation<S::Move>) {
        if self.root.try_claim().is_ok() {
            self.expand(&self.root, eval);
            self.root.visits.fetch_add(1, Ordering::AcqRel);
        }
    }
}

/// Checks visit conservation, settled virtual losses, Q ranges and value
/// consistency (an edge's value sum equals the negated value mass below it)
/// over the subtree reachable from `root`.
pub(crate) fn check_invariants<S: SearchState>(root: &Arc<Node<S>>) -> Result<usize, String> {
    let mut stack = vec![root.clone()];
    let mut checked = 0;
    while let Some(node) = stack.pop() {
        checked += 1;
        let Some(exp) = node.expansion() else { continue };
        let mut sum_n: u64 = 0;
        for e in exp.edges.iter() {
            if e.in_flight() != 0 {
                return Err(format!("edge {} still has {} rollouts in flight", e.mv, e.in_flight()));
            }
            let n = e.visits();
            sum_n += n as u64;
            if let Some(q) = e.q() {
                if !(-1.0 - 1e-5..=1.0 + 1e-5).contains(&q) {
                    return Err(format!("edge {} has Q {q} outside [-1, 1]", e.mv));
                }
            }
            if let Some(child) = e.child.get() {
                let child_mass = match (child.terminal, child.expansion()) {
                    (Some(t), _) => child.visits() as f64 * t as f64,
                    (None, Some(ce)) => {
                        if child.visits() == 0 {
                            0.0
                        } else {
                            ce.value as f64 + ce.edges.iter().map(|x| x.value_sum()).sum::<f64>()
                        }
                    }
                    (None, None) => 0.0,
                };
                if child.visits() != n {
                    return Err(format!(
                        "edge {} has {n} visits but its child has {}",
                        e.mv,
                        child.visits()
                    ));
                }
                if (e.value_sum() + child_mass).abs() > 1e-6 * (1.0 + n as f64) {
                    return Err(format!(
                        "edge {} value sum {} does not mirror child mass {child_mass}",
                        e.mv,
                        e.value_sum()
                    ));
                }
                stack.push(child.clone());
            } else if n != 0 {
                return Err(format!("edge {} visited without a child", e.mv));
            }
        }
        if node.visits() as u64 != 1 + sum_n {
            return Err(format!("node has {} visits, expected 1 + {sum_n}", node.visits()));
        }
    }
    Ok(checked)
}
