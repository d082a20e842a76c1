//! Small explicit game trees for exercising the search without chess.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zhengine::evaluator::{Evaluation, Evaluator};
use zhengine::search::{SearchState, TranspositionKey};

#[derive(Clone, Debug)]
pub struct ToyNode {
    pub children: Vec<usize>,
    /// Final value for the side to move when the game ends here.
    pub terminal: Option<f32>,
    /// What the evaluator reports for a non-terminal node.
    pub value: f32,
    pub priors: Option<Vec<f32>>,
    pub checks: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct ToyTree {
    pub nodes: Vec<ToyNode>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToyMove(pub usize);

impl fmt::Display for ToyMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct Toy {
    pub tree: Arc<ToyTree>,
    pub node: usize,
}

impl PartialEq for Toy {
    fn eq(&self, other: &Toy) -> bool {
        self.node == other.node && Arc::ptr_eq(&self.tree, &other.tree)
    }
}

impl Toy {
    pub fn root(tree: ToyTree) -> Toy {
        Toy {
            tree: Arc::new(tree),
            node: 0,
        }
    }

    fn data(&self) -> &ToyNode {
        &self.tree.nodes[self.node]
    }
}

impl SearchState for Toy {
    type Move = ToyMove;

    fn legal_moves(&self) -> Vec<ToyMove> {
        (0..self.data().children.len()).map(ToyMove).collect()
    }

    fn play(&self, mv: ToyMove) -> Toy {
        Toy {
            tree: self.tree.clone(),
            node: self.data().children[mv.0],
        }
    }

    fn terminal_value(&self) -> Option<f32> {
        self.data().terminal
    }

    fn gives_check(&self, mv: ToyMove) -> bool {
        self.data().checks.get(mv.0).copied().unwrap_or(false)
    }

    fn move_order(&self, mv: ToyMove) -> u32 {
        mv.0 as u32
    }

    fn transposition_key(&self) -> Option<TranspositionKey> {
        None
    }
}

/// Reports each node's stored value and priors (uniform when unset).
pub struct ToyEvaluator;

impl Evaluator<Toy> for ToyEvaluator {
    fn evaluate_batch(&self, states: &[Toy]) -> Vec<Evaluation<ToyMove>> {
        states
            .iter()
            .map(|s| {
                let d = s.data();
                let moves = s.legal_moves();
                let mut e = Evaluation::uniform(&moves);
                e.value = d.value;
                if let Some(p) = &d.priors {
                    e.priors = moves.iter().zip(p).map(|(&m, &p)| (m, p)).collect();
                }
                e
            })
            .collect()
    }
}

/// Full tree with `branching` moves per node and terminal leaves at
/// `depth`, leaf values drawn uniformly from (-0.9, 0.9).
pub fn random_tree(branching: usize, depth: usize, seed: u64) -> ToyTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = vec![ToyNode {
        children: Vec::new(),
        terminal: None,
        value: 0.0,
        priors: None,
        checks: Vec::new(),
    }];
    let mut frontier = vec![(0usize, 0usize)];
    while let Some((id, d)) = frontier.pop() {
        if d == depth {
            nodes[id].terminal = Some(rng.random_range(-0.9..0.9));
            continue;
        }
        for _ in 0..branching {
            let child = nodes.len();
            nodes.push(ToyNode {
                children: Vec::new(),
                terminal: None,
                value: 0.0,
                priors: None,
                checks: Vec::new(),
            });
            nodes[id].children.push(child);
            frontier.push((child, d + 1));
        }
    }
    ToyTree { nodes }
}

/// Exhaustive negamax value for the side to move at `node`.
pub fn negamax(tree: &ToyTree, node: usize) -> f32 {
    let n = &tree.nodes[node];
    if let Some(v) = n.terminal {
        return v;
    }
    n.children
        .iter()
        .map(|&c| -negamax(tree, c))
        .fold(f32::NEG_INFINITY, f32::max)
}

/// Root move(s) achieving the negamax value.
pub fn negamax_moves(tree: &ToyTree) -> Vec<usize> {
    let best = negamax(tree, 0);
    tree.nodes[0]
        .children
        .iter()
        .enumerate()
        .filter(|(_, &c)| (-negamax(tree, c) - best).abs() < 1e-6)
        .map(|(i, _)| i)
        .collect()
}
