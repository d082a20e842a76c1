mod common;

use std::sync::Arc;

use common::fixtures::{mate_in_one_suite, mating_moves, DESK_MATES};
use zhengine::evaluator::UniformEvaluator;
use zhengine::rules::GameState;
use zhengine::search::{run_search, SearchConfig, SearchLimits};

fn mate_config() -> SearchConfig {
    SearchConfig {
        enhance_checks: true,
        fix_checkmates: true,
        ..SearchConfig::deterministic()
    }
}

#[test]
fn desk_positions_are_mate_in_one() {
    for fen in DESK_MATES {
        let state = GameState::from_fen(fen).unwrap();
        assert!(!state.is_checkmate() && state.outcome().is_none(), "{fen}");
        assert!(!mating_moves(&state).is_empty(), "no mate in {fen}");
    }
}

#[test]
fn uniform_search_finds_every_mate() {
    let suite = mate_in_one_suite();
    assert_eq!(suite.len(), 20);
    for state in suite {
        let mates = mating_moves(&state);
        let r = run_search(
            &state,
            &mate_config(),
            Arc::new(UniformEvaluator),
            &SearchLimits::nodes(800),
        )
        .unwrap();
        assert!(
            mates.contains(&r.best_move),
            "{}: played {}, mates {mates:?}",
            state.to_fen(),
            r.best_move
        );
    }
}
