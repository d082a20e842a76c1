use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zhengine::encoding::{
    decode_index, encode_planes, is_binary_plane, legal_policy_mask, plane, policy_index, uci_labels, PolicyScheme,
    NUM_PLANES, PLANE_SIZE,
};
use zhengine::rules::{Color, GameState};

const SCHEMES: [PolicyScheme; 2] = [PolicyScheme::Uci2272, PolicyScheme::Map5184];

/// Every position along seeded random games until `count` are collected.
fn positions(count: usize, seed: u64) -> Vec<GameState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut state = GameState::startpos();
        for _ in 0..rng.random_range(20..160) {
            let moves = state.legal_moves();
            if moves.is_empty() || out.len() == count {
                break;
            }
            out.push(state.clone());
            state = state.play_unchecked(moves[rng.random_range(0..moves.len())]);
        }
    }
    out
}

#[test]
fn table_sizes() {
    assert_eq!(PolicyScheme::Uci2272.size(), 2272);
    assert_eq!(PolicyScheme::Map5184.size(), 5184);
    assert_eq!(uci_labels().len(), 2272);
    let distinct: HashSet<&String> = uci_labels().iter().collect();
    assert_eq!(distinct.len(), 2272);
    for scheme in SCHEMES {
        assert_eq!(scheme.to_string().parse::<PolicyScheme>().unwrap(), scheme);
        assert_eq!(PolicyScheme::from_code(scheme.code()), Some(scheme));
    }
}

#[test]
fn policy_indices_round_trip_on_random_positions() {
    for state in positions(10_000, 7) {
        let moves = state.legal_moves();
        for scheme in SCHEMES {
            let mut seen = HashSet::new();
            for &mv in &moves {
                let i = policy_index(mv, &state, scheme).unwrap();
                assert!(i < scheme.size());
                assert!(
                    seen.insert(i),
                    "{} and another move share {i} in {}",
                    mv,
                    state.to_fen()
                );
                assert_eq!(
                    decode_index(i, &state, scheme).unwrap(),
                    mv,
                    "{scheme} at {}",
                    state.to_fen()
                );
            }
            let mask = legal_policy_mask(&state, scheme);
            assert_eq!(mask.iter().filter(|&&b| b).count(), moves.len());
        }
    }
}

#[test]
fn planes_have_shape_and_range() {
    for state in positions(10_000, 8) {
        let planes = encode_planes(&state);
        assert_eq!(planes.values().len(), NUM_PLANES * PLANE_SIZE);
        assert_eq!(planes.perspective(), state.turn());
        for p in 0..NUM_PLANES {
            for &v in planes.plane(p) {
                assert!((0.0..=1.0).contains(&v), "plane {p} holds {v} at {}", state.to_fen());
                if is_binary_plane(p) {
                    assert!(v == 0.0 || v == 1.0, "plane {p} holds {v}");
                }
            }
        }
        let colour = if state.turn() == Color::White { 1.0 } else { 0.0 };
        assert!(planes.plane(plane::COLOUR).iter().all(|&v| v == colour));
        // One-hot piece planes: each square holds at most one piece.
        for sq in 0..64 {
            let filled: f32 = (0..12).map(|p| planes.get(p, sq)).sum();
            assert!(filled <= 1.0);
        }
        let on_board: f32 = (0..12).flat_map(|p| planes.plane(p).iter()).sum();
        assert_eq!(on_board as u32, state.board().occupied().count());
    }
}

#[test]
fn counters_may_exceed_one() {
    // Move and no-progress counters are scaled by a soft bound, not clipped.
    let state = GameState::from_fen("4k3/8/8/8/8/8/8/4K3[] w - - 80 1000").unwrap();
    let planes = encode_planes(&state);
    assert!(planes.get(plane::MOVE_COUNT, 0) > 1.0);
    assert!(planes.get(plane::NO_PROGRESS, 0) > 1.0);
}
