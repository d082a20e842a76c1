//! PUCT Monte-Carlo tree search with batched evaluation, virtual loss,
//! transpositions and the Q-value based move selection refinements.

mod config;
mod formulas;
mod state;
mod tree;

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::evaluator::{EvalHandle, EvalService, Evaluation, Evaluator};
use crate::timecontrol::{self, SearchSnapshot, TimeBudget};

pub use config::{NoiseMode, SearchConfig};
pub use formulas::{
    apply_root_noise, argmax, blend_policy, cpuct_for, enhance_checks, q_thresh_for, u_divisor_for, value_to_cp,
};
pub use state::{SearchState, TranspositionKey};

use tree::{Descent, Node, Path, TranspositionTable, Tree};

pub const MAX_PV: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("the root position is already decided")]
    TerminalRoot,
    #[error("the search budget is empty")]
    ZeroBudget,
    #[error("invalid search configuration: {0}")]
    Config(String),
}

/// Node and/or time budget. `infinite` runs until the stop flag is raised.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchLimits {
    pub nodes: Option<u64>,
    pub time: Option<TimeBudget>,
    pub infinite: bool,
}

impl SearchLimits {
    pub fn nodes(n: u64) -> SearchLimits {
        SearchLimits {
            nodes: Some(n),
            ..SearchLimits::default()
        }
    }

    pub fn time(budget: TimeBudget) -> SearchLimits {
        SearchLimits {
            time: Some(budget),
            ..SearchLimits::default()
        }
    }

    pub fn infinite() -> SearchLimits {
        SearchLimits {
            infinite: true,
            ..SearchLimits::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Score {
    /// Centipawns from the side to move.
    Cp(i32),
    /// Moves to mate; negative when the side to move gets mated.
    Mate(i32),
}

#[derive(Clone, Debug)]
pub struct ChildStats<M> {
    pub mv: M,
    pub prior: f32,
    pub visits: u32,
    /// Mean value, or the configured initial Q when unvisited.
    pub q: f32,
    /// Q after the principal-variation correction (equal to `q` when off).
    pub adjusted_q: f32,
    pub policy: f32,
}

/// Callback for periodic progress reports during a search.
pub type ProgressFn<'a, M> = dyn Fn(&SearchResult<M>) + Sync + 'a;

#[derive(Clone, Debug)]
pub struct SearchResult<M> {
    pub best_move: M,
    pub best_q: f32,
    pub score: Score,
    pub pv: Vec<M>,
    pub depth: usize,
    /// Rollouts completed by this search.
    pub nodes: u64,
    pub elapsed: Duration,
    pub children: Vec<ChildStats<M>>,
}

impl<M: Copy> SearchResult<M> {
    /// Move-selection distribution over the root moves.
    pub fn policy(&self) -> Vec<(M, f32)> {
        self.children.iter().map(|c| (c.mv, c.policy)).collect()
    }

    pub fn nps(&self) -> u64 {
        let ms = self.elapsed.as_millis().max(1) as u64;
        self.nodes * 1000 / ms
    }
}

enum Backend<'a, S: SearchState> {
    Direct(&'a dyn Evaluator<S>),
    Service(EvalHandle<S>),
}

impl<S: SearchState> Backend<'_, S> {
    fn evaluate(&self, states: Vec<S>) -> Vec<Evaluation<S::Move>> {
        match self {
            Backend::Direct(e) => e.evaluate_batch(&states),
            Backend::Service(h) => h.evaluate(states),
        }
    }
}

struct Control<'a> {
    external_stop: &'a AtomicBool,
    stop: AtomicBool,
    node_limit: Option<u64>,
    reserved: AtomicU64,
    completed: AtomicU64,
}

impl Control<'_> {
    fn stopped(&self) -> bool {
        self.stop.load(Ordering::Acquire) || self.external_stop.load(Ordering::Acquire)
    }

    fn reserve(&self) -> bool {
        match self.node_limit {
            None => {
                self.reserved.fetch_add(1, Ordering::AcqRel);
                true
            }
            Some(limit) => self
                .reserved
                .fetch_update(Ordering::AcqRel, Ordering::Acquire, |r| (r < limit).then_some(r + 1))
                .is_ok(),
        }
    }

    fn release(&self) {
        self.reserved.fetch_sub(1, Ordering::AcqRel);
    }

    fn limit_reached(&self) -> bool {
        self.node_limit
            .is_some_and(|l| self.completed.load(Ordering::Acquire) >= l)
    }
}

/// A search engine instance. Keeps the previous tree so the subtree of the
/// position actually reached can be reused on the next call.
pub struct Searcher<S: SearchState> {
    config: SearchConfig,
    evaluator: Arc<dyn Evaluator<S>>,
    last_root: Option<Arc<Node<S>>>,
    last_table: Option<Arc<TranspositionTable<S::Move>>>,
    rng: ChaCha8Rng,
    previous_q: Option<f32>,
}

impl<S: SearchState + PartialEq> Searcher<S> {
    pub fn new(config: SearchConfig, evaluator: Arc<dyn Evaluator<S>>) -> Result<Searcher<S>, SearchError> {
        config.validate().map_err(SearchError::Config)?;
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(Searcher {
            config,
            evaluator,
            last_root: None,
            last_table: None,
            rng,
            previous_q: None,
        })
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn set_config(&mut self, config: SearchConfig) -> Result<(), SearchError> {
        config.validate().map_err(SearchError::Config)?;
        self.rng = ChaCha8Rng::seed_from_u64(config.seed);
        self.config = config;
        self.new_game();
        Ok(())
    }

    /// Changes the move-selection temperature without discarding the tree.
    pub fn set_temperature(&mut self, temperature: f32) {
        self.config.temperature = temperature.max(0.0);
    }

    pub fn set_evaluator(&mut self, evaluator: Arc<dyn Evaluator<S>>) {
        self.evaluator = evaluator;
        self.new_game();
    }

    /// Forgets the tree and the previous move's value.
    pub fn new_game(&mut self) {
        self.last_root = None;
        self.last_table = None;
        self.previous_q = None;
    }

    /// Stored evaluation for a transposition key from the last search.
    /// Always `None` with transpositions disabled.
    pub fn lookup_transposition(&self, key: &TranspositionKey) -> Option<Evaluation<S::Move>> {
        if !self.config.transpositions {
            return None;
        }
        self.last_table.as_ref()?.get(key).map(|e| (*e).clone())
    }

    /// Number of stored evaluations from the last search.
    pub fn transposition_count(&self) -> usize {
        self.last_table.as_ref().map_or(0, |t| t.len())
    }

    /// Verifies the tree statistics of the last search; returns the number
    /// of nodes checked.
    pub fn check_invariants(&self) -> Result<usize, String> {
        match &self.last_root {
            Some(root) => tree::check_invariants(root),
            None => Ok(0),
        }
    }

    fn reusable_root(&self, root: &S) -> Option<Arc<Node<S>>> {
        if !self.config.reuse_tree {
            return None;
        }
        let old = self.last_root.as_ref()?;
        if old.state == *root {
            return old.is_expanded().then(|| old.clone());
        }
        for e in old.edges() {
            let Some(child) = e.child.get() else { continue };
            if child.state == *root {
                return child.is_expanded().then(|| child.clone());
            }
            for g in child.edges() {
                if let Some(grand) = g.child.get() {
                    if grand.state == *root && grand.is_expanded() {
                        return Some(grand.clone());
                    }
                }
            }
        }
        None
    }

    pub fn search(
        &mut self,
        root: &S,
        limits: &SearchLimits,
        stop: &AtomicBool,
        on_progress: Option<&ProgressFn<'_, S::Move>>,
    ) -> Result<SearchResult<S::Move>, SearchError> {
        let start = Instant::now();
        if root.terminal_value().is_some() {
            return Err(SearchError::TerminalRoot);
        }
        if limits.nodes == Some(0) || (limits.nodes.is_none() && limits.time.is_none() && !limits.infinite) {
            return Err(SearchError::ZeroBudget);
        }

        let root_node = self
            .reusable_root(root)
            .unwrap_or_else(|| Arc::new(Node::new(root.clone())));
        let tree = Tree {
            root: root_node,
            table: Arc::new(TranspositionTable::new()),
            config: self.config.clone(),
        };
        if !tree.root.is_expanded() {
            let eval = self.evaluator.evaluate_batch(std::slice::from_ref(root)).remove(0);
            tree.expand_root(&eval);
            if let Some(key) = root.transposition_key() {
                tree.table.insert(key, Arc::new(eval));
            }
        }
        let edges = tree.root.edges();
        let mut priors: Vec<f32> = edges.iter().map(|e| e.base_prior).collect();
        apply_root_noise(&mut priors, &self.config, &mut self.rng);
        for (e, p) in edges.iter().zip(priors) {
            e.set_prior(p);
        }

        let control = Control {
            external_stop: stop,
            stop: AtomicBool::new(false),
            node_limit: if limits.infinite { None } else { limits.nodes },
            reserved: AtomicU64::new(0),
            completed: AtomicU64::new(0),
        };
        let time = if limits.infinite { None } else { limits.time };

        if edges.len() > 1 {
            let workers = self.config.workers;
            if workers == 1 {
                let backend = Backend::Direct(&*self.evaluator);
                self.worker(&tree, &control, &backend, time, start, true, on_progress);
            } else {
                let service = EvalService::start(self.evaluator.clone(), self.config.batch_size * workers);
                let this = &*self;
                thread::scope(|scope| {
                    for _ in 1..workers {
                        let backend = Backend::Service(service.handle());
                        let (tree, control) = (&tree, &control);
                        scope.spawn(move || this.worker(tree, control, &backend, time, start, false, None));
                    }
                    let backend = Backend::Service(service.handle());
                    this.worker(&tree, &control, &backend, time, start, true, on_progress);
                    control.stop.store(true, Ordering::Release);
                });
            }
        }

        let nodes = control.completed.load(Ordering::Acquire);
        let temperature = self.config.temperature;
        let result = summarize(&tree, nodes, start.elapsed(), temperature, &mut self.rng);
        self.previous_q = Some(result.best_q);
        self.last_root = Some(tree.root.clone());
        self.last_table = Some(tree.table.clone());
        Ok(result)
    }

    #[allow(clippy::too_many_arguments)]
    fn worker(
        &self,
        tree: &Tree<S>,
        control: &Control<'_>,
        backend: &Backend<'_, S>,
        time: Option<TimeBudget>,
        start: Instant,
        leader: bool,
        on_progress: Option<&ProgressFn<'_, S::Move>>,
    ) {
        let batch_size = self.config.batch_size;
        let mut extension_decided = false;
        let mut target_ms = time.map(|t| t.target_ms);
        let mut last_report = Instant::now();
        let mut rollouts_done = false;
        loop {
            if control.stopped() || control.limit_reached() {
                break;
            }
            let mut batch: Vec<(Path<S>, Arc<Node<S>>)> = Vec::with_capacity(batch_size);
            let mut collided = false;
            for _ in 0..batch_size {
                if !control.reserve() {
                    rollouts_done = true;
                    break;
                }
                match tree.descend() {
                    Descent::Known { path, leaf, value } => {
                        tree.backup(&path, &leaf, value);
                        control.completed.fetch_add(1, Ordering::AcqRel);
                    }
                    Descent::Leaf { path, leaf } => batch.push((path, leaf)),
                    Descent::Collision { path } => {
                        tree.revert(&path);
                        control.release();
                        collided = true;
                        break;
                    }
                }
            }
            if !batch.is_empty() {
                let states: Vec<S> = batch.iter().map(|(_, leaf)| leaf.state.clone()).collect();
                let evals = backend.evaluate(states);
                for ((path, leaf), eval) in batch.iter().zip(evals) {
                    tree.expand(leaf, &eval);
                    let value = eval.value;
                    if self.config.transpositions {
                        if let Some(key) = leaf.state.transposition_key() {
                            tree.table.insert(key, Arc::new(eval));
                        }
                    }
                    tree.backup(path, leaf, value);
                    control.completed.fetch_add(1, Ordering::AcqRel);
                }
            } else if collided {
                thread::yield_now();
            }
            if rollouts_done
                && control.node_limit.is_some()
                && control.reserved.load(Ordering::Acquire) >= control.node_limit.unwrap()
                && (control.limit_reached() || !leader)
            {
                break;
            }
            if !leader {
                continue;
            }
            let elapsed = start.elapsed();
            if let (Some(budget), Some(target)) = (time, target_ms.as_mut()) {
                let ms = elapsed.as_millis() as u64;
                if ms >= budget.hard_cap_ms {
                    control.stop.store(true, Ordering::Release);
                    break;
                }
                if !extension_decided && ms >= budget.target_ms {
                    extension_decided = true;
                    let best_q = most_visited_q(&tree.root);
                    if timecontrol::extend(self.previous_q, best_q) {
                        *target = budget.extended_target();
                    }
                }
                if ms >= *target || tree.root.winning_child().is_some() {
                    control.stop.store(true, Ordering::Release);
                    break;
                }
                let snapshot = snapshot(&tree.root, ms, budget.target_ms);
                if timecontrol::early_stop(&snapshot) {
                    control.stop.store(true, Ordering::Release);
                    break;
                }
            }
            if let Some(report) = on_progress {
                if last_report.elapsed() >= Duration::from_secs(1) {
                    last_report = Instant::now();
                    let nodes = control.completed.load(Ordering::Acquire);
                    report(&summarize_current(tree, nodes, elapsed));
                }
            }
        }
    }
}

fn snapshot<S: SearchState>(root: &Node<S>, elapsed_ms: u64, target_ms: u64) -> SearchSnapshot {
    let edges = root.edges();
    let top_prior = argmax(&edges.iter().map(|e| e.base_prior).collect::<Vec<_>>());
    let top_q = edges
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.q().map(|q| (i, q)))
        .fold(None, |best: Option<(usize, f32)>, (i, q)| match best {
            Some((_, bq)) if bq >= q => best,
            _ => Some((i, q)),
        });
    SearchSnapshot {
        legal_moves: edges.len(),
        elapsed_ms,
        target_ms,
        top_prior: top_prior.map_or(0.0, |i| edges[i].base_prior),
        top_prior_has_max_q: top_prior.is_some() && top_q.map(|t| t.0) == top_prior,
    }
}

fn most_visited_q<S: SearchState>(root: &Node<S>) -> f32 {
    root.edges()
        .iter()
        .filter(|e| e.visits() > 0)
        .max_by_key(|e| e.visits())
        .and_then(|e| e.q())
        .unwrap_or(-1.0)
}

/// Index chosen by the final selection rule at `node` (temperature 0,
/// no PV correction); `None` when nothing was visited.
fn pv_choice<S: SearchState>(node: &Node<S>, config: &SearchConfig) -> Option<usize> {
    let edges = node.edges();
    if let Some(w) = node.winning_child() {
        if config.fix_checkmates && edges[w].visits() > 0 {
            return Some(w);
        }
    }
    let visits: Vec<u32> = edges.iter().map(|e| e.visits()).collect();
    let total: u64 = visits.iter().map(|&v| v as u64).sum();
    if total == 0 {
        return None;
    }
    let q: Vec<f32> = edges.iter().map(|e| e.q().unwrap_or(config.q_init)).collect();
    let scores = blend_policy(&visits, &q, q_thresh_for(total as f64, config), 0.0, config);
    argmax(&scores)
}

/// Deepest Q (root mover's view) along the line below a root child, at
/// most `depth` plies down.
fn pv_tail_q<S: SearchState>(child: &Arc<Node<S>>, config: &SearchConfig) -> Option<f32> {
    let mut node = child.clone();
    let mut sign = -1.0f32;
    let mut last = None;
    for _ in 0..config.pv_depth {
        if let Some(t) = node.terminal {
            last = Some(sign * t);
            break;
        }
        let Some(i) = pv_choice(&node, config) else { break };
        let e = &node.edges()[i];
        last = e.q().map(|q| sign * q).or(last);
        let Some(next) = e.child.get().cloned() else { break };
        node = next;
        sign = -sign;
    }
    last
}

fn root_stats<S: SearchState>(tree: &Tree<S>) -> (Vec<u32>, Vec<f32>, Vec<f32>) {
    let cfg = &tree.config;
    let edges = tree.root.edges();
    let visits: Vec<u32> = edges.iter().map(|e| e.visits()).collect();
    let q: Vec<f32> = edges.iter().map(|e| e.q().unwrap_or(cfg.q_init)).collect();
    let adjusted: Vec<f32> = edges
        .iter()
        .zip(&q)
        .map(|(e, &q)| {
            if !cfg.q_pv || e.visits() == 0 {
                return q;
            }
            match e.child.get().and_then(|c| pv_tail_q(c, cfg)) {
                Some(tail) => q.min(tail),
                None => q,
            }
        })
        .collect();
    (visits, q, adjusted)
}

fn build_result<S: SearchState>(
    tree: &Tree<S>,
    nodes: u64,
    elapsed: Duration,
    choose: impl FnOnce(&[f32]) -> usize,
    temperature: f32,
) -> SearchResult<S::Move> {
    let cfg = &tree.config;
    let root = &tree.root;
    let edges = root.edges();
    let (visits, q, adjusted) = root_stats(tree);
    let total: u64 = visits.iter().map(|&v| v as u64).sum();
    let policy = if total == 0 {
        edges.iter().map(|e| e.base_prior).collect()
    } else {
        blend_policy(&visits, &adjusted, q_thresh_for(total as f64, cfg), temperature, cfg)
    };
    let best = match root.winning_child() {
        Some(w) if cfg.fix_checkmates => w,
        _ if total == 0 => argmax(&policy).unwrap_or(0),
        _ => choose(&policy),
    };
    let best_edge = &edges[best];

    let mut pv = vec![best_edge.mv];
    let mut end: Option<Arc<Node<S>>> = best_edge.child.get().cloned();
    while let Some(node) = end.clone() {
        if pv.len() >= MAX_PV || node.terminal.is_some() {
            break;
        }
        let Some(i) = pv_choice(&node, cfg) else { break };
        let e = &node.edges()[i];
        pv.push(e.mv);
        end = e.child.get().cloned();
    }

    // Without visits the root's own evaluation is the best estimate.
    let best_q = best_edge
        .q()
        .unwrap_or_else(|| root.expansion().map_or(0.0, |e| e.value));
    let mut score = Score::Cp((100.0 * value_to_cp(best_q, cfg)).round() as i32);
    if let Some(t) = end.as_ref().and_then(|n| n.terminal) {
        let len = pv.len() as i32;
        // The side to move at the end of an odd-length line is the opponent.
        let for_root = if len % 2 == 1 { -t } else { t };
        if for_root >= 1.0 {
            score = Score::Mate((len + 1) / 2);
        } else if for_root <= -1.0 {
            score = Score::Mate(-(len / 2));
        }
    }

    let children = edges
        .iter()
        .enumerate()
        .map(|(i, e)| ChildStats {
            mv: e.mv,
            prior: e.prior(),
            visits: visits[i],
            q: q[i],
            adjusted_q: adjusted[i],
            policy: policy[i],
        })
        .collect();
    SearchResult {
        best_move: best_edge.mv,
        best_q,
        score,
        depth: pv.len(),
        pv,
        nodes,
        elapsed,
        children,
    }
}

fn summarize<S: SearchState>(
    tree: &Tree<S>,
    nodes: u64,
    elapsed: Duration,
    temperature: f32,
    rng: &mut ChaCha8Rng,
) -> SearchResult<S::Move> {
    let sample = |policy: &[f32]| -> usize {
        if temperature <= 0.0 {
            return argmax(policy).unwrap_or(0);
        }
        let total: f32 = policy.iter().sum();
        let mut x = rng.random::<f32>() * total;
        for (i, &p) in policy.iter().enumerate() {
            if x < p {
                return i;
            }
            x -= p;
        }
        argmax(policy).unwrap_or(0)
    };
    build_result(tree, nodes, elapsed, sample, temperature)
}

fn summarize_current<S: SearchState>(tree: &Tree<S>, nodes: u64, elapsed: Duration) -> SearchResult<S::Move> {
    build_result(tree, nodes, elapsed, |p| argmax(p).unwrap_or(0), 0.0)
}

/// One-shot search with a fresh tree.
pub fn run_search<S: SearchState + PartialEq>(
    root: &S,
    config: &SearchConfig,
    evaluator: Arc<dyn Evaluator<S>>,
    limits: &SearchLimits,
) -> Result<SearchResult<S::Move>, SearchError> {
    let mut searcher = Searcher::new(config.clone(), evaluator)?;
    searcher.search(root, limits, &AtomicBool::new(false), None)
}
