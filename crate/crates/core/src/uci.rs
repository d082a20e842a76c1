//! UCI front end: reads commands line by line, runs searches on a worker
//! thread so `stop` and `isready` stay responsive.

use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, ScopedJoinHandle};

use crate::evaluator::{Evaluator, EvaluatorKind, EvaluatorSpec};
use crate::rules::{GameState, Move, RulesError};
use crate::search::{NoiseMode, Score, SearchConfig, SearchLimits, SearchResult, Searcher};
use crate::timecontrol::{self, ClockState};

pub const ENGINE_NAME: &str = "zhengine";
pub const ENGINE_AUTHOR: &str = "zhengine developers";

/// Everything `setoption` can change.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineOptions {
    pub search: SearchConfig,
    pub evaluator: EvaluatorKind,
    pub human_variety: bool,
}

impl Default for EngineOptions {
    fn default() -> EngineOptions {
        EngineOptions {
            search: SearchConfig::default(),
            evaluator: EvaluatorKind::Material,
            human_variety: false,
        }
    }
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "1" | "on" => Ok(true),
        "false" | "0" | "off" => Ok(false),
        _ => Err(format!("expected true or false, got {v:?}")),
    }
}

fn parse_num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.trim().parse().map_err(|_| format!("cannot parse {v:?}"))
}

impl EngineOptions {
    /// `option ...` lines announced after `uci`.
    pub fn option_lines(&self) -> Vec<String> {
        let c = &self.search;
        let float = |name: &str, v: f32| format!("option name {name} type string default {v}");
        let spin = |name: &str, v: u64, min: u64, max: u64| {
            format!("option name {name} type spin default {v} min {min} max {max}")
        };
        let check = |name: &str, v: bool| format!("option name {name} type check default {v}");
        let evaluator = match &self.evaluator {
            EvaluatorKind::Uniform => "uniform".to_string(),
            EvaluatorKind::Material => "material".to_string(),
            EvaluatorKind::Table(p) => p.display().to_string(),
        };
        let noise = match c.noise {
            NoiseMode::Off => "off",
            NoiseMode::Dirichlet => "dirichlet",
            NoiseMode::Constant => "constant",
        };
        vec![
            "option name UCI_Variant type combo default crazyhouse var crazyhouse".to_string(),
            format!("option name Evaluator type string default {evaluator}"),
            spin("Threads", c.workers as u64, 1, 256),
            spin("Batch_Size", c.batch_size as u64, 1, 1024),
            float("CPuct_Init", c.c_puct_init),
            float("CPuct_Base", c.c_puct_base),
            float("Dirichlet_Alpha", c.dirichlet_alpha),
            float("Dirichlet_Mix", c.dirichlet_mix),
            format!("option name Noise type combo default {noise} var off var dirichlet var constant"),
            spin("Virtual_Loss", c.virtual_loss as u64, 0, 100),
            float("Q_Init", c.q_init),
            float("Q_Factor", c.q_factor),
            float("Q_Thresh_Init", c.q_thresh_init),
            float("Q_Thresh_Max", c.q_thresh_max),
            float("Q_Thresh_Base", c.q_thresh_base),
            float("U_Min", c.u_min),
            float("U_Init", c.u_init),
            float("U_Base", c.u_base),
            float("Check_Thresh", c.check_thresh),
            float("Check_Factor", c.check_factor),
            float("Temperature", c.temperature),
            spin("Temperature_Moves", c.temperature_moves as u64, 0, 1000),
            float("Centipawn_Lambda", c.centipawn_lambda),
            spin("PV_Depth", c.pv_depth as u64, 1, 64),
            check("Enhance_Checks", c.enhance_checks),
            check("Fix_Checkmates", c.fix_checkmates),
            check("U_Scaling", c.u_scaling),
            check("Q_Selection", c.q_selection),
            check("Q_PV", c.q_pv),
            check("Transpositions", c.transpositions),
            check("Reuse_Tree", c.reuse_tree),
            spin("Seed", c.seed, 0, u32::MAX as u64),
            check("Human_Variety", self.human_variety),
        ]
    }

    /// Applies one `setoption`. Names are case-insensitive.
    pub fn set(&mut self, name: &str, value: &str) -> Result<(), String> {
        let mut next = self.clone();
        let c = &mut next.search;
        match name.to_ascii_lowercase().as_str() {
            "uci_variant" => {
                if !value.eq_ignore_ascii_case("crazyhouse") {
                    return Err(format!("unsupported variant {value}"));
                }
            }
            "evaluator" => {
                next.evaluator = match value.to_ascii_lowercase().as_str() {
                    "uniform" => EvaluatorKind::Uniform,
                    "material" => EvaluatorKind::Material,
                    _ => EvaluatorKind::Table(PathBuf::from(value)),
                }
            }
            "threads" => c.workers = parse_num(value)?,
            "batch_size" => c.batch_size = parse_num(value)?,
            "cpuct_init" => c.c_puct_init = parse_num(value)?,
            "cpuct_base" => c.c_puct_base = parse_num(value)?,
            "dirichlet_alpha" => c.dirichlet_alpha = parse_num(value)?,
            "dirichlet_mix" => c.dirichlet_mix = parse_num(value)?,
            "noise" => {
                c.noise = match value.to_ascii_lowercase().as_str() {
                    "off" => NoiseMode::Off,
                    "dirichlet" => NoiseMode::Dirichlet,
                    "constant" => NoiseMode::Constant,
                    _ => return Err(format!("unknown noise mode {value}")),
                }
            }
            "virtual_loss" => c.virtual_loss = parse_num(value)?,
            "q_init" => c.q_init = parse_num(value)?,
            "q_factor" => c.q_factor = parse_num(value)?,
            "q_thresh_init" => c.q_thresh_init = parse_num(value)?,
            "q_thresh_max" => c.q_thresh_max = parse_num(value)?,
            "q_thresh_base" => c.q_thresh_base = parse_num(value)?,
            "u_min" => c.u_min = parse_num(value)?,
            "u_init" => c.u_init = parse_num(value)?,
            "u_base" => c.u_base = parse_num(value)?,
            "check_thresh" => c.check_thresh = parse_num(value)?,
            "check_factor" => c.check_factor = parse_num(value)?,
            "temperature" => c.temperature = parse_num(value)?,
            "temperature_moves" => c.temperature_moves = parse_num(value)?,
            "centipawn_lambda" => c.centipawn_lambda = parse_num(value)?,
            "pv_depth" => c.pv_depth = parse_num(value)?,
            "enhance_checks" => c.enhance_checks = parse_bool(value)?,
            "fix_checkmates" => c.fix_checkmates = parse_bool(value)?,
            "u_scaling" => c.u_scaling = parse_bool(value)?,
            "q_selection" => c.q_selection = parse_bool(value)?,
            "q_pv" => c.q_pv = parse_bool(value)?,
            "transpositions" => c.transpositions = parse_bool(value)?,
            "reuse_tree" => c.reuse_tree = parse_bool(value)?,
            "seed" => c.seed = parse_num(value)?,
            "human_variety" => next.human_variety = parse_bool(value)?,
            _ => return Err(format!("unknown option {name}")),
        }
        next.search.validate()?;
        *self = next;
        Ok(())
    }

    fn build_evaluator(&self) -> Result<Arc<dyn Evaluator<GameState>>, String> {
        EvaluatorSpec {
            kind: self.evaluator.clone(),
            batch_size: self.search.batch_size,
        }
        .build()
        .map_err(|e| e.to_string())
    }
}

/// Parsed `go` arguments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GoCommand {
    pub wtime: Option<u64>,
    pub btime: Option<u64>,
    pub winc: Option<u64>,
    pub binc: Option<u64>,
    pub movestogo: Option<u32>,
    pub movetime: Option<u64>,
    pub nodes: Option<u64>,
    pub infinite: bool,
}

impl GoCommand {
    pub fn parse(args: &[&str]) -> GoCommand {
        let mut go = GoCommand::default();
        let mut it = args.iter();
        while let Some(&tok) = it.next() {
            let mut num = || it.next().and_then(|v| v.parse::<u64>().ok());
            match tok {
                "wtime" => go.wtime = num(),
                "btime" => go.btime = num(),
                "winc" => go.winc = num(),
                "binc" => go.binc = num(),
                "movestogo" => go.movestogo = num().map(|v| v as u32),
                "movetime" => go.movetime = num(),
                "nodes" => go.nodes = num(),
                "infinite" => go.infinite = true,
                _ => {}
            }
        }
        go
    }

    pub fn limits(&self, state: &GameState, human_variety: bool) -> SearchLimits {
        let white = state.turn() == crate::rules::Color::White;
        let remaining = if white { self.wtime } else { self.btime };
        let increment = if white { self.winc } else { self.binc };
        let time = if self.movetime.is_some() || remaining.is_some() {
            let clock = ClockState {
                remaining_ms: remaining.or(self.movetime).unwrap_or(0),
                increment_ms: increment.unwrap_or(0),
                moves_to_go: self.movestogo,
                move_number: state.fullmove_number(),
                fixed_move_time_ms: self.movetime,
                human_variety,
            };
            Some(timecontrol::allocate(&clock))
        } else {
            None
        };
        SearchLimits {
            nodes: self.nodes,
            infinite: self.infinite || (time.is_none() && self.nodes.is_none()),
            time,
        }
    }
}

/// Applies a `position` command to produce the new game state.
pub fn parse_position(args: &[&str]) -> Result<GameState, String> {
    let (mut state, rest) = match args.first() {
        Some(&"startpos") => (GameState::startpos(), &args[1..]),
        Some(&"fen") => {
            let end = args.iter().position(|&t| t == "moves").unwrap_or(args.len());
            let fen = args[1..end].join(" ");
            (GameState::from_fen(&fen).map_err(|e| e.to_string())?, &args[end..])
        }
        _ => return Err("position needs startpos or fen".into()),
    };
    if let Some((&"moves", moves)) = rest.split_first() {
        for m in moves {
            let mv: Move = m.parse().map_err(|e: RulesError| e.to_string())?;
            state = state.apply_move(mv).map_err(|e| e.to_string())?;
        }
    }
    Ok(state)
}

pub fn format_info(r: &SearchResult<Move>) -> String {
    let score = match r.score {
        Score::Cp(cp) => format!("cp {cp}"),
        Score::Mate(n) => format!("mate {n}"),
    };
    let pv: Vec<String> = r.pv.iter().map(|m| m.to_string()).collect();
    format!(
        "info depth {} score {score} nodes {} nps {} time {} pv {}",
        r.depth,
        r.nodes,
        r.nps(),
        r.elapsed.as_millis(),
        pv.join(" ")
    )
}

struct Output<W: Write> {
    sink: Mutex<W>,
}

impl<W: Write> Output<W> {
    fn line(&self, text: &str) {
        let mut w = self.sink.lock().expect("output lock");
        // A closed output leaves nothing useful to report to.
        let _ = writeln!(w, "{text}");
        let _ = w.flush();
    }
}

/// Runs a session with default options. Returns on `quit` or end of
/// input; at end of input a running finite search is allowed to finish.
pub fn run_session<R: BufRead, W: Write + Send>(input: R, output: W) -> io::Result<()> {
    run_session_with(input, output, EngineOptions::default())
}

pub fn run_session_with<R: BufRead, W: Write + Send>(input: R, output: W, options: EngineOptions) -> io::Result<()> {
    let out = Output {
        sink: Mutex::new(output),
    };
    let stop = AtomicBool::new(false);
    let mut options = options;
    let mut state = GameState::startpos();
    let mut searcher: Option<Searcher<GameState>> = None;
    let mut dirty = true;

    thread::scope(|scope| -> io::Result<()> {
        let mut active: Option<(ScopedJoinHandle<'_, Searcher<GameState>>, bool)> = None;
        let finish = |active: &mut Option<(ScopedJoinHandle<'_, Searcher<GameState>>, bool)>,
                      searcher: &mut Option<Searcher<GameState>>,
                      halt: bool| {
            if let Some((handle, _)) = active.take() {
                if halt {
                    stop.store(true, Ordering::Release);
                }
                *searcher = Some(handle.join().expect("search thread panicked"));
            }
        };

        for line in input.lines() {
            let line = line?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let Some((&cmd, args)) = tokens.split_first() else {
                continue;
            };
            if active.as_ref().is_some_and(|(h, _)| h.is_finished()) {
                finish(&mut active, &mut searcher, false);
            }
            match cmd {
                "uci" => {
                    out.line(&format!("id name {ENGINE_NAME} {}", env!("CARGO_PKG_VERSION")));
                    out.line(&format!("id author {ENGINE_AUTHOR}"));
                    for l in options.option_lines() {
                        out.line(&l);
                    }
                    out.line("uciok");
                }
                "isready" => out.line("readyok"),
                "setoption" => {
                    finish(&mut active, &mut searcher, true);
                    let (name, value) = parse_setoption(args);
                    match options.set(&name, &value) {
                        Ok(()) => dirty = true,
                        Err(e) => out.line(&format!("info string error: {e}")),
                    }
                }
                "ucinewgame" => {
                    finish(&mut active, &mut searcher, true);
                    if let Some(s) = searcher.as_mut() {
                        s.new_game();
                    }
                    state = GameState::startpos();
                }
                "position" => {
                    finish(&mut active, &mut searcher, true);
                    match parse_position(args) {
                        Ok(s) => state = s,
                        Err(e) => out.line(&format!("info string error: {e}")),
                    }
                }
                "go" => {
                    finish(&mut active, &mut searcher, true);
                    if dirty || searcher.is_none() {
                        match options.build_evaluator() {
                            Ok(ev) => match Searcher::new(options.search.clone(), ev) {
                                Ok(s) => {
                                    searcher = Some(s);
                                    dirty = false;
                                }
                                Err(e) => {
                                    out.line(&format!("info string error: {e}"));
                                    out.line("bestmove 0000");
                                    continue;
                                }
                            },
                            Err(e) => {
                                out.line(&format!("info string error: {e}"));
                                out.line("bestmove 0000");
                                continue;
                            }
                        }
                    }
                    let go = GoCommand::parse(args);
                    let limits = go.limits(&state, options.human_variety);
                    let mut s = searcher.take().expect("searcher built");
                    s.set_temperature(options.search.temperature_at(state.fullmove_number()));
                    stop.store(false, Ordering::Release);
                    let root = state.clone();
                    let (out, stop) = (&out, &stop);
                    let infinite = limits.infinite;
                    let handle = scope.spawn(move || {
                        let report = |r: &SearchResult<Move>| out.line(&format_info(r));
                        match s.search(&root, &limits, stop, Some(&report)) {
                            Ok(r) => {
                                out.line(&format_info(&r));
                                out.line(&format!("bestmove {}", r.best_move));
                            }
                            Err(e) => {
                                out.line(&format!("info string error: {e}"));
                                out.line("bestmove 0000");
                            }
                        }
                        s
                    });
                    active = Some((handle, infinite));
                }
                "stop" => finish(&mut active, &mut searcher, true),
                "quit" => {
                    finish(&mut active, &mut searcher, true);
                    return Ok(());
                }
                _ => {}
            }
        }
        let halt = active.as_ref().is_some_and(|(_, infinite)| *infinite);
        finish(&mut active, &mut searcher, halt);
        Ok(())
    })
}

fn parse_setoption(args: &[&str]) -> (String, String) {
    let name_at = args.iter().position(|&t| t == "name").map_or(0, |i| i + 1);
    let value_at = args.iter().position(|&t| t == "value");
    let name_end = value_at.unwrap_or(args.len());
    let name = args[name_at.min(name_end)..name_end].join(" ");
    let value = value_at.map_or(String::new(), |i| args[i + 1..].join(" "));
    (name, value)
}
