use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::rules::{GameState, Move};

use super::{EvalError, Evaluation, Evaluator};

#[derive(Clone, Debug)]
struct Entry {
    value: f32,
    priors: HashMap<Move, f32>,
}

/// Fixed evaluations read from a text file with lines
/// `FEN | value | move:prior,move:prior,...`. Blank lines and lines starting
/// with `#` are ignored. Positions are matched by position key, so move
/// counters in the FEN do not matter. Unknown positions evaluate uniformly.
#[derive(Clone, Debug, Default)]
pub struct TableEvaluator {
    entries: HashMap<u64, Entry>,
}

impl TableEvaluator {
    pub fn load(path: &Path) -> Result<TableEvaluator, EvalError> {
        let text = fs::read_to_string(path).map_err(|source| EvalError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        TableEvaluator::parse(&text)
    }

    pub fn parse(text: &str) -> Result<TableEvaluator, EvalError> {
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let fail = |reason: String| EvalError::Table { line, reason };
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('|').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(fail(format!("expected 3 `|`-separated fields, found {}", fields.len())));
            }
            let state = GameState::from_fen(fields[0]).map_err(|e| fail(e.to_string()))?;
            let value: f32 = fields[1]
                .parse()
                .map_err(|_| fail(format!("bad value `{}`", fields[1])))?;
            if !(-1.0..=1.0).contains(&value) {
                return Err(fail(format!("value {value} outside [-1, 1]")));
            }
            let legal = state.legal_moves();
            let mut priors = HashMap::new();
            for item in fields[2].split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (mv, p) = item
                    .rsplit_once(':')
                    .ok_or_else(|| fail(format!("expected move:prior, found `{item}`")))?;
                let mv: Move = mv.parse().map_err(|_| fail(format!("bad move `{mv}`")))?;
                if !legal.contains(&mv) {
                    return Err(fail(format!("move {mv} is not legal in this position")));
                }
                let p: f32 = p.parse().map_err(|_| fail(format!("bad prior `{p}`")))?;
                if !p.is_finite() || p < 0.0 {
                    return Err(fail(format!("prior {p} must be a non-negative number")));
                }
                priors.insert(mv, p);
            }
            let sum: f32 = priors.values().sum();
            if sum > 0.0 {
                for p in priors.values_mut() {
                    *p /= sum;
                }
            } else {
                priors.clear();
            }
            entries.insert(state.position_key(), Entry { value, priors });
        }
        Ok(TableEvaluator { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn evaluate(&self, state: &GameState) -> Evaluation<Move> {
        let moves = state.legal_moves();
        match self.entries.get(&state.position_key()) {
            Some(entry) if !entry.priors.is_empty() => Evaluation {
                value: entry.value,
                priors: moves
                    .into_iter()
                    .map(|m| (m, entry.priors.get(&m).copied().unwrap_or(0.0)))
                    .collect(),
            },
            Some(entry) => Evaluation {
                value: entry.value,
                ..Evaluation::uniform(&moves)
            },
            None => Evaluation::uniform(&moves),
        }
    }
}

impl Evaluator<GameState> for TableEvaluator {
    fn evaluate_batch(&self, states: &[GameState]) -> Vec<Evaluation<Move>> {
        states.iter().map(|s| self.evaluate(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FEN: &str = "3k2r1/pBpr1p1p/Pp3p1B/3p4/2PPn2B/5NPp/q4PpP/1R1QR1K1[NNbp] w - - 1 23";

    #[test]
    fn renormalizes_listed_priors() {
        let t = TableEvaluator::parse(&format!("# comment\n\n{FEN} | 0.25 | N@e6:2, e1e2:2\n")).unwrap();
        let s = GameState::from_fen(FEN).unwrap();
        let e = t.evaluate(&s);
        assert_eq!(e.value, 0.25);
        assert_eq!(e.priors.len(), 73);
        let ne6 = e.priors.iter().find(|p| p.0 == "N@e6".parse().unwrap()).unwrap().1;
        assert!((ne6 - 0.5).abs() < 1e-6);
        assert_eq!(e.priors.iter().filter(|p| p.1 == 0.0).count(), 71);
    }

    #[test]
    fn empty_table_is_uniform() {
        let t = TableEvaluator::parse("").unwrap();
        let e = t.evaluate(&GameState::startpos());
        assert!(e.priors.iter().all(|p| (p.1 - 0.05).abs() < 1e-7));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = [
            format!("\n{FEN} | 0.1 | e2e4:1\n"),
            format!("{FEN} | 2 | N@e6:1"),
            format!("{FEN} | x | N@e6:1"),
            format!("{FEN} | 0.1"),
            "not a fen | 0 | e2e4:1".to_string(),
        ];
        let lines = [2, 1, 1, 1, 1];
        for (text, line) in bad.iter().zip(lines) {
            match TableEvaluator::parse(text) {
                Err(EvalError::Table { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
