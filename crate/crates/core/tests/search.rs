mod common;

use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::toy::{negamax, negamax_moves, random_tree, Toy, ToyEvaluator, ToyMove, ToyNode, ToyTree};
use zhengine::evaluator::{Evaluator, MaterialEvaluator, UniformEvaluator};
use zhengine::rules::{GameState, Move};
use zhengine::search::{run_search, NoiseMode, Score, SearchConfig, SearchError, SearchLimits, SearchState, Searcher};
use zhengine::timecontrol::TimeBudget;

fn toy_searcher(config: SearchConfig) -> Searcher<Toy> {
    Searcher::new(config, Arc::new(ToyEvaluator)).unwrap()
}

fn chess_searcher(config: SearchConfig, eval: Arc<dyn Evaluator<GameState>>) -> Searcher<GameState> {
    Searcher::new(config, eval).unwrap()
}

fn go<S: SearchState + PartialEq>(
    s: &mut Searcher<S>,
    root: &S,
    nodes: u64,
) -> zhengine::search::SearchResult<S::Move> {
    let r = s
        .search(root, &SearchLimits::nodes(nodes), &AtomicBool::new(false), None)
        .unwrap();
    s.check_invariants().unwrap();
    r
}

#[test]
fn depth_two_tree_converges_to_negamax() {
    for seed in 0..5 {
        let tree = random_tree(3, 2, seed);
        let oracle = negamax(&tree, 0);
        let best = negamax_moves(&tree);
        let root = Toy::root(tree);
        let mut s = toy_searcher(SearchConfig::deterministic());
        let r = go(&mut s, &root, 10_000);
        assert!(
            (r.best_q - oracle).abs() <= 0.05,
            "seed {seed}: Q {} vs negamax {oracle}",
            r.best_q
        );
        assert!(
            best.contains(&r.best_move.0),
            "seed {seed}: {} not in {best:?}",
            r.best_move
        );
    }
}

#[test]
fn deeper_tree_finds_negamax_move() {
    let tree = random_tree(4, 4, 11);
    let best = negamax_moves(&tree);
    let root = Toy::root(tree);
    let mut s = toy_searcher(SearchConfig::deterministic());
    let r = go(&mut s, &root, 30_000);
    assert!(best.contains(&r.best_move.0), "{} not in {best:?}", r.best_move);
}

#[test]
fn node_budget_is_exact() {
    let root = Toy::root(random_tree(3, 3, 2));
    for n in [1, 7, 8, 9, 100, 1234] {
        let mut s = toy_searcher(SearchConfig::deterministic());
        let r = go(&mut s, &root, n);
        assert_eq!(r.nodes, n);
        let visits: u64 = r.children.iter().map(|c| c.visits as u64).sum();
        assert_eq!(visits, n);
    }
}

#[test]
fn errors_on_terminal_root_and_empty_budget() {
    let mate = GameState::from_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3").unwrap();
    let cfg = SearchConfig::deterministic();
    let e = run_search(&mate, &cfg, Arc::new(UniformEvaluator), &SearchLimits::nodes(10));
    assert_eq!(e.unwrap_err(), SearchError::TerminalRoot);
    let start = GameState::startpos();
    let e = run_search(&start, &cfg, Arc::new(UniformEvaluator), &SearchLimits::nodes(0));
    assert_eq!(e.unwrap_err(), SearchError::ZeroBudget);
    let e = run_search(&start, &cfg, Arc::new(UniformEvaluator), &SearchLimits::default());
    assert_eq!(e.unwrap_err(), SearchError::ZeroBudget);
}

#[test]
fn single_legal_move_returns_at_once() {
    // The checked king has a single flight square.
    let s = GameState::from_fen("k7/8/8/8/8/8/1q6/K7 w - - 0 1").unwrap();
    assert_eq!(s.legal_moves().len(), 1);
    let r = run_search(
        &s,
        &SearchConfig::default(),
        Arc::new(UniformEvaluator),
        &SearchLimits::nodes(800),
    )
    .unwrap();
    assert_eq!(r.best_move, s.legal_moves()[0]);
    assert_eq!(r.nodes, 0);
}

#[test]
fn deterministic_mode_repeats_bit_for_bit() {
    let s = GameState::from_fen("r1bqkb1r/pppp1ppp/2n2n2/4p3/2B1P3/5N2/PPPP1PPP/RNBQK2R[] w KQkq - 4 4").unwrap();
    let runs: Vec<_> = (0..3)
        .map(|_| {
            let mut se = chess_searcher(SearchConfig::deterministic(), Arc::new(MaterialEvaluator::default()));
            go(&mut se, &s, 1500)
        })
        .collect();
    for r in &runs[1..] {
        assert_eq!(r.best_move, runs[0].best_move);
        assert_eq!(r.pv, runs[0].pv);
        assert_eq!(r.best_q.to_bits(), runs[0].best_q.to_bits());
        for (a, b) in r.children.iter().zip(&runs[0].children) {
            assert_eq!(
                (a.mv, a.visits, a.q.to_bits(), a.policy.to_bits()),
                (b.mv, b.visits, b.q.to_bits(), b.policy.to_bits())
            );
        }
    }
}

#[test]
fn seeded_dirichlet_noise_is_reproducible() {
    let s = GameState::startpos();
    let cfg = SearchConfig {
        noise: NoiseMode::Dirichlet,
        seed: 42,
        ..SearchConfig::deterministic()
    };
    let a = run_search(&s, &cfg, Arc::new(UniformEvaluator), &SearchLimits::nodes(300)).unwrap();
    let b = run_search(&s, &cfg, Arc::new(UniformEvaluator), &SearchLimits::nodes(300)).unwrap();
    let pa: Vec<_> = a.children.iter().map(|c| c.prior.to_bits()).collect();
    let pb: Vec<_> = b.children.iter().map(|c| c.prior.to_bits()).collect();
    assert_eq!(pa, pb);
    let sum: f32 = a.children.iter().map(|c| c.prior).sum();
    assert!((sum - 1.0).abs() < 1e-5);
}

#[test]
fn mate_in_one_is_locked_in() {
    let s = GameState::from_fen("6k1/5ppp/8/8/8/8/8/R5K1[] w - - 0 1").unwrap();
    let r = run_search(
        &s,
        &SearchConfig::deterministic(),
        Arc::new(UniformEvaluator),
        &SearchLimits::nodes(200),
    )
    .unwrap();
    assert_eq!(r.best_move.to_string(), "a1a8");
    assert_eq!(r.score, Score::Mate(1));
    let mated = r.children.iter().find(|c| c.mv == r.best_move).unwrap();
    assert!(mated.visits >= 190, "winning child got {} visits", mated.visits);
}

#[test]
fn winning_child_takes_every_later_visit() {
    // Root with three moves; move 2 ends the game in the mover's favour.
    let leaf = |v: f32| ToyNode {
        children: vec![],
        terminal: Some(v),
        value: 0.0,
        priors: None,
        checks: vec![],
    };
    let tree = ToyTree {
        nodes: vec![
            ToyNode {
                children: vec![1, 2, 3],
                terminal: None,
                value: 0.0,
                priors: Some(vec![0.6, 0.3, 0.1]),
                checks: vec![false, false, false],
            },
            leaf(0.0),
            leaf(0.5),
            leaf(-1.0),
        ],
    };
    let root = Toy::root(tree);
    let mut s = toy_searcher(SearchConfig::deterministic());
    let r = go(&mut s, &root, 1000);
    assert_eq!(r.best_move, ToyMove(2));
    let others: u32 = r.children.iter().filter(|c| c.mv != ToyMove(2)).map(|c| c.visits).sum();
    assert!(others < 20, "{others} visits went elsewhere");
    assert_eq!(r.score, Score::Mate(1));
}

#[test]
fn two_winning_children_keep_the_first_found() {
    let leaf = |v: f32| ToyNode {
        children: vec![],
        terminal: Some(v),
        value: 0.0,
        priors: None,
        checks: vec![],
    };
    let tree = ToyTree {
        nodes: vec![
            ToyNode {
                children: vec![1, 2, 3],
                terminal: None,
                value: 0.0,
                priors: Some(vec![0.1, 0.2, 0.7]),
                checks: vec![false, false, false],
            },
            leaf(-1.0),
            leaf(0.0),
            leaf(-1.0),
        ],
    };
    let mut s = toy_searcher(SearchConfig::deterministic());
    let r = go(&mut s, &Toy::root(tree), 300);
    // The high-prior win is tried first and keeps all later visits.
    assert_eq!(r.best_move, ToyMove(2));
    assert_eq!(r.children[0].visits, 0);
}

#[test]
fn transposition_counters_must_match() {
    let play = |moves: &[&str]| {
        moves.iter().fold(GameState::startpos(), |s, m| {
            s.apply_move(m.parse::<Move>().unwrap()).unwrap()
        })
    };
    let key = |s: &GameState| s.transposition_key().unwrap();
    let back = play(&["g1f3", "g8f6", "f3g1", "f6g8"]);
    assert_eq!(back.position_key(), GameState::startpos().position_key());
    assert_ne!(key(&back), key(&GameState::startpos()));
    // The pawn moves reset the no-progress counter at different plies.
    let a = play(&["e2e4", "e7e5", "g1f3"]);
    let b = play(&["g1f3", "e7e5", "e2e4"]);
    assert_eq!(a.position_key(), b.position_key());
    assert_ne!(key(&a), key(&b));
    let c = play(&["g1f3", "g8f6", "b1c3"]);
    let d = play(&["b1c3", "g8f6", "g1f3"]);
    assert_eq!(key(&c), key(&d));
}

#[test]
fn transposition_lookup_reuses_evaluations() {
    let play = |moves: &[&str]| {
        moves.iter().fold(GameState::startpos(), |s, m| {
            s.apply_move(m.parse::<Move>().unwrap()).unwrap()
        })
    };
    let root = play(&["g1f3", "g8f6"]);
    let mut s = chess_searcher(SearchConfig::deterministic(), Arc::new(MaterialEvaluator::default()));
    go(&mut s, &root, 3000);
    let other_order = play(&["b1c3", "g8f6", "g1f3"]);
    let stored = s
        .lookup_transposition(&other_order.transposition_key().unwrap())
        .expect("hit");
    let fresh = MaterialEvaluator::default()
        .evaluate_batch(std::slice::from_ref(&other_order))
        .remove(0);
    assert_eq!(stored, fresh);
    // Reachable through Ng1 Ng8, but with other counters than the start.
    let back = play(&["g1f3", "g8f6", "f3g1", "f6g8"]);
    assert!(s
        .lookup_transposition(&GameState::startpos().transposition_key().unwrap())
        .is_none());
    assert_eq!(back.position_key(), GameState::startpos().position_key());

    let off = SearchConfig {
        transpositions: false,
        ..SearchConfig::deterministic()
    };
    let mut s = chess_searcher(off, Arc::new(MaterialEvaluator::default()));
    go(&mut s, &root, 3000);
    assert!(s
        .lookup_transposition(&other_order.transposition_key().unwrap())
        .is_none());
}

#[test]
fn tree_is_reused_after_the_root_advances() {
    let root = GameState::startpos();
    let mut s = chess_searcher(SearchConfig::deterministic(), Arc::new(MaterialEvaluator::default()));
    let first = go(&mut s, &root, 2000);
    let reply = first.pv.get(1).copied();
    let mut next = root.apply_move(first.best_move).unwrap();
    if let Some(r) = reply {
        next = next.apply_move(r).unwrap();
    }
    let second = go(&mut s, &next, 10);
    let carried: u64 = second.children.iter().map(|c| c.visits as u64).sum();
    assert!(carried > 10, "no statistics carried over ({carried})");
}

#[test]
fn parallel_workers_keep_invariants() {
    let s = GameState::from_fen("r1bqkb1r/pppp1ppp/2n2n2/4p3/2B1P3/5N2/PPPP1PPP/RNBQK2R[] w KQkq - 4 4").unwrap();
    let cfg = SearchConfig {
        workers: 3,
        batch_size: 4,
        ..SearchConfig::default()
    };
    let mut se = chess_searcher(cfg, Arc::new(MaterialEvaluator::default()));
    let r = go(&mut se, &s, 2000);
    assert_eq!(r.nodes, 2000);
    assert!(s.legal_moves().contains(&r.best_move));
}

#[test]
fn time_limit_is_respected() {
    let s = GameState::startpos();
    let mut se = chess_searcher(SearchConfig::default(), Arc::new(MaterialEvaluator::default()));
    let budget = TimeBudget {
        target_ms: 300,
        hard_cap_ms: 300,
    };
    let t = Instant::now();
    let r = se
        .search(&s, &SearchLimits::time(budget), &AtomicBool::new(false), None)
        .unwrap();
    assert!(t.elapsed() < Duration::from_millis(400));
    assert!(r.nodes > 0);
    se.check_invariants().unwrap();
}

#[test]
fn stop_flag_ends_infinite_search() {
    let s = GameState::startpos();
    let mut se = chess_searcher(SearchConfig::default(), Arc::new(UniformEvaluator));
    let stop = AtomicBool::new(false);
    let t = Instant::now();
    std::thread::scope(|scope| {
        scope.spawn(|| {
            std::thread::sleep(Duration::from_millis(150));
            stop.store(true, std::sync::atomic::Ordering::Release);
        });
        let r = se.search(&s, &SearchLimits::infinite(), &stop, None).unwrap();
        assert!(r.nodes > 0);
    });
    assert!(t.elapsed() < Duration::from_millis(500));
}

#[test]
fn pv_and_depth_agree() {
    let s = GameState::startpos();
    let r = run_search(
        &s,
        &SearchConfig::deterministic(),
        Arc::new(MaterialEvaluator::default()),
        &SearchLimits::nodes(1500),
    )
    .unwrap();
    assert_eq!(r.depth, r.pv.len());
    assert_eq!(r.pv[0], r.best_move);
    let mut st = s.clone();
    for m in &r.pv {
        st = st.apply_move(*m).unwrap();
    }
    let total: f32 = r.children.iter().map(|c| c.policy).sum();
    assert!((total - 1.0).abs() < 1e-5);
    for c in &r.children {
        assert!(c.adjusted_q <= c.q + 1e-6);
        if c.visits == 0 {
            assert_eq!(c.q, -1.0);
        }
    }
}
