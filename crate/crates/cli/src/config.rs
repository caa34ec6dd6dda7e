//! Flat `section.key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. Every key is optional; unknown or
//! repeated keys are rejected with their line number. [`ExperimentConfig::to_text`]
//! writes every key, defaults included, in a fixed order, and parses back to an
//! equal config.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use creyes_core::agent::{LoopConfig, NetworkKind, RewardConfig, TrainConfig};
use creyes_core::emma::EmmaParams;
use creyes_core::env::{GameId, GameSpec};
use creyes_core::fovea::FoveaConfig;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalConfig {
    pub episodes: usize,
    /// Exploration rate of evaluation rollouts.
    pub epsilon: f64,
    /// Radius of the binary fixation map.
    pub radius_px: f64,
    /// Gaussian width of saliency maps; defaults to one degree of visual angle.
    pub sigma_px: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub game: GameSpec,
    pub pausing: bool,
    pub fovea: FoveaConfig,
    pub emma: EmmaParams,
    pub reward: RewardConfig,
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let emma = EmmaParams::default();
        Self {
            game: GameSpec::new(GameId::ChaseDot),
            pausing: true,
            fovea: FoveaConfig::default(),
            emma,
            reward: RewardConfig::default(),
            train: TrainConfig::default(),
            eval: EvalConfig {
                episodes: 10,
                epsilon: 0.01,
                radius_px: 2.0,
                sigma_px: emma.px_per_deg,
            },
            out: PathBuf::from("out"),
            seed: 0,
        }
    }
}

pub const KEYS: &[&str] = &[
    "game.id",
    "game.tick_hz",
    "game.frame_skip",
    "game.sticky_prob",
    "game.max_steps",
    "game.max_consecutive_pauses",
    "game.pausing",
    "fovea.grid_rows",
    "fovea.grid_cols",
    "fovea.patch_size",
    "fovea.frame_size",
    "fovea.memory_depth",
    "emma.encoding_scale",
    "emma.eccentricity_exp",
    "emma.t_prep",
    "emma.t_exec_base",
    "emma.t_exec_per_deg",
    "emma.object_frequency",
    "emma.px_per_deg",
    "reward.pause_penalty",
    "reward.saccade_cost",
    "reward.clip_training_reward",
    "train.network",
    "train.gamma",
    "train.learning_rate",
    "train.batch_size",
    "train.replay_capacity",
    "train.warmup",
    "train.epsilon_start",
    "train.epsilon_end",
    "train.epsilon_decay_steps",
    "train.target_sync",
    "train.train_every",
    "train.huber_delta",
    "train.steps",
    "eval.episodes",
    "eval.epsilon",
    "eval.radius_px",
    "eval.sigma_px",
    "run.out",
    "run.seed",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: cannot parse {value:?}"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(format!("{key}: expected a boolean, got {value:?}")),
    }
}

impl ExperimentConfig {
    pub fn loop_config(&self) -> LoopConfig {
        LoopConfig {
            game: self.game,
            fovea: self.fovea,
            emma: self.emma,
            reward: self.reward,
            pausing: self.pausing,
        }
    }

    /// Train config with the run seed applied.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.train
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        Self::parse_named(text, "<config>")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_named(&text, &path.display().to_string())
    }

    fn parse_named(text: &str, source: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen: Vec<&str> = Vec::new();
        let mut max_steps = None;
        let mut sigma = None;
        for (i, raw) in text.lines().enumerate() {
            let err = |m: String| CliError::Usage(format!("{source}:{}: {m}", i + 1));
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `section.key = value`, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let known = KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| err(format!("unknown key {key:?}")))?;
            if seen.contains(known) {
                return Err(err(format!("duplicate key {key:?}")));
            }
            seen.push(known);
            match key {
                "game.max_steps" => max_steps = Some(parse(key, value).map_err(err)?),
                "eval.sigma_px" => sigma = Some(parse(key, value).map_err(err)?),
                _ => cfg.set(key, value).map_err(err)?,
            }
        }
        cfg.game.max_steps = max_steps.unwrap_or(cfg.game.game.default_horizon());
        cfg.eval.sigma_px = sigma.unwrap_or(cfg.emma.px_per_deg);
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "game.id" => self.game.game = GameId::from_str(v).map_err(|e| format!("{key}: {e}"))?,
            "game.tick_hz" => self.game.tick_hz = parse(key, v)?,
            "game.frame_skip" => self.game.frame_skip = parse(key, v)?,
            "game.sticky_prob" => self.game.sticky_prob = parse(key, v)?,
            "game.max_steps" => self.game.max_steps = parse(key, v)?,
            "game.max_consecutive_pauses" => self.game.max_consecutive_pauses = parse(key, v)?,
            "game.pausing" => self.pausing = parse_bool(key, v)?,
            "fovea.grid_rows" => self.fovea.grid_rows = parse(key, v)?,
            "fovea.grid_cols" => self.fovea.grid_cols = parse(key, v)?,
            "fovea.patch_size" => self.fovea.patch_size = parse(key, v)?,
            "fovea.frame_size" => self.fovea.frame_size = parse(key, v)?,
            "fovea.memory_depth" => self.fovea.memory_depth = parse(key, v)?,
            "emma.encoding_scale" => self.emma.encoding_scale = parse(key, v)?,
            "emma.eccentricity_exp" => self.emma.eccentricity_exp = parse(key, v)?,
            "emma.t_prep" => self.emma.t_prep = parse(key, v)?,
            "emma.t_exec_base" => self.emma.t_exec_base = parse(key, v)?,
            "emma.t_exec_per_deg" => self.emma.t_exec_per_deg = parse(key, v)?,
            "emma.object_frequency" => self.emma.object_frequency = parse(key, v)?,
            "emma.px_per_deg" => self.emma.px_per_deg = parse(key, v)?,
            "reward.pause_penalty" => self.reward.pause_penalty = parse(key, v)?,
            "reward.saccade_cost" => self.reward.saccade_cost = parse(key, v)?,
            "reward.clip_training_reward" => self.reward.clip_training_reward = parse_bool(key, v)?,
            "train.network" => self.train.network = NetworkKind::from_str(v).map_err(|e| format!("{key}: {e}"))?,
            "train.gamma" => self.train.gamma = parse(key, v)?,
            "train.learning_rate" => self.train.learning_rate = parse(key, v)?,
            "train.batch_size" => self.train.batch_size = parse(key, v)?,
            "train.replay_capacity" => self.train.replay_capacity = parse(key, v)?,
            "train.warmup" => self.train.warmup = parse(key, v)?,
            "train.epsilon_start" => self.train.epsilon_start = parse(key, v)?,
            "train.epsilon_end" => self.train.epsilon_end = parse(key, v)?,
            "train.epsilon_decay_steps" => self.train.epsilon_decay_steps = parse(key, v)?,
            "train.target_sync" => self.train.target_sync = parse(key, v)?,
            "train.train_every" => self.train.train_every = parse(key, v)?,
            "train.huber_delta" => self.train.huber_delta = parse(key, v)?,
            "train.steps" => self.train.steps = parse(key, v)?,
            "eval.episodes" => self.eval.episodes = parse(key, v)?,
            "eval.epsilon" => self.eval.epsilon = parse(key, v)?,
            "eval.radius_px" => self.eval.radius_px = parse(key, v)?,
            "eval.sigma_px" => self.eval.sigma_px = parse(key, v)?,
            "run.out" => self.out = PathBuf::from(v),
            "run.seed" => self.seed = parse(key, v)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    fn get(&self, key: &str) -> String {
        fn s(v: impl Display) -> String {
            v.to_string()
        }
        match key {
            "game.id" => s(self.game.game.name()),
            "game.tick_hz" => s(self.game.tick_hz),
            "game.frame_skip" => s(self.game.frame_skip),
            "game.sticky_prob" => s(self.game.sticky_prob),
            "game.max_steps" => s(self.game.max_steps),
            "game.max_consecutive_pauses" => s(self.game.max_consecutive_pauses),
            "game.pausing" => s(self.pausing),
            "fovea.grid_rows" => s(self.fovea.grid_rows),
            "fovea.grid_cols" => s(self.fovea.grid_cols),
            "fovea.patch_size" => s(self.fovea.patch_size),
            "fovea.frame_size" => s(self.fovea.frame_size),
            "fovea.memory_depth" => s(self.fovea.memory_depth),
            "emma.encoding_scale" => s(self.emma.encoding_scale),
            "emma.eccentricity_exp" => s(self.emma.eccentricity_exp),
            "emma.t_prep" => s(self.emma.t_prep),
            "emma.t_exec_base" => s(self.emma.t_exec_base),
            "emma.t_exec_per_deg" => s(self.emma.t_exec_per_deg),
            "emma.object_frequency" => s(self.emma.object_frequency),
            "emma.px_per_deg" => s(self.emma.px_per_deg),
            "reward.pause_penalty" => s(self.reward.pause_penalty),
            "reward.saccade_cost" => s(self.reward.saccade_cost),
            "reward.clip_training_reward" => s(self.reward.clip_training_reward),
            "train.network" => s(self.train.network.name()),
            "train.gamma" => s(self.train.gamma),
            "train.learning_rate" => s(self.train.learning_rate),
            "train.batch_size" => s(self.train.batch_size),
            "train.replay_capacity" => s(self.train.replay_capacity),
            "train.warmup" => s(self.train.warmup),
            "train.epsilon_start" => s(self.train.epsilon_start),
            "train.epsilon_end" => s(self.train.epsilon_end),
            "train.epsilon_decay_steps" => s(self.train.epsilon_decay_steps),
            "train.target_sync" => s(self.train.target_sync),
            "train.train_every" => s(self.train.train_every),
            "train.huber_delta" => s(self.train.huber_delta),
            "train.steps" => s(self.train.steps),
            "eval.episodes" => s(self.eval.episodes),
            "eval.epsilon" => s(self.eval.epsilon),
            "eval.radius_px" => s(self.eval.radius_px),
            "eval.sigma_px" => s(self.eval.sigma_px),
            "run.out" => s(self.out.display()),
            "run.seed" => s(self.seed),
            _ => unreachable!("key table and getter disagree on {key}"),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let core = |r: creyes_core::Result<()>| r.map_err(|e| CliError::Usage(e.to_string()));
        core(self.loop_config().validate())?;
        core(self.train.validate())?;
        if !(0.0..=1.0).contains(&self.eval.epsilon) {
            return Err(CliError::Usage("eval.epsilon must lie in [0, 1]".into()));
        }
        if !(self.eval.radius_px >= 0.0) {
            return Err(CliError::Usage("eval.radius_px must be >= 0".into()));
        }
        if !(self.eval.sigma_px > 0.0) {
            return Err(CliError::Usage("eval.sigma_px must be > 0".into()));
        }
        Ok(())
    }

    /// Every key with its resolved value, one per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut section = "";
        for key in KEYS {
            let this = key.split('.').next().unwrap_or("");
            if this != section {
                if !section.is_empty() {
                    out.push('\n');
                }
                section = this;
            }
            out.push_str(&format!("{key} = {}\n", self.get(key)));
        }
        out
    }
}
