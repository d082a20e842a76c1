//! Crazyhouse engine library: rules, input/policy encodings, PUCT search,
//! time management, UCI front-end, self-play arena and data pipeline.

pub mod arena;
pub mod encoding;
pub mod evaluator;
pub mod pgn;
pub mod pipeline;
pub mod rules;
pub mod search;
pub mod timecontrol;
pub mod uci;
