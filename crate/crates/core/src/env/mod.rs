//! Pausable, deterministic micro-games standing in for the arcade emulator.
//!
//! A [`GameState`] is a single-threaded state machine. Each non-pause step applies
//! sticky actions, then advances the world `frame_skip` ticks at 20 Hz with the
//! effective action held. A PAUSE step leaves the world, its RNG and the rendered
//! frame untouched and only bumps the consecutive-pause counter.

mod chase;
mod lane;
mod lcg;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use chase::ChaseWorld;
pub use lane::{LaneObject, LaneWorld, ObjectKind};
pub use lcg::Lcg;

use crate::error::{Error, Result};
use crate::frame::Frame;

pub const TICK_HZ: u32 = 20;
/// Wall-clock length of one displayed tick.
pub const TICK_MS: f64 = 1000.0 / TICK_HZ as f64;

pub const NUM_MOTOR_ACTIONS: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MotorAction {
    Noop = 0,
    Up = 1,
    Down = 2,
    Left = 3,
    Right = 4,
    Fire = 5,
    Pause = 6,
}

impl MotorAction {
    pub const ALL: [MotorAction; NUM_MOTOR_ACTIONS] = [
        MotorAction::Noop,
        MotorAction::Up,
        MotorAction::Down,
        MotorAction::Left,
        MotorAction::Right,
        MotorAction::Fire,
        MotorAction::Pause,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            MotorAction::Noop => "NOOP",
            MotorAction::Up => "UP",
            MotorAction::Down => "DOWN",
            MotorAction::Left => "LEFT",
            MotorAction::Right => "RIGHT",
            MotorAction::Fire => "FIRE",
            MotorAction::Pause => "PAUSE",
        }
    }
}

impl fmt::Display for MotorAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MotorAction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::data(None, format!("unknown motor action {s:?}")))
    }
}

pub type MotorMask = [bool; NUM_MOTOR_ACTIONS];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameId {
    ChaseDot,
    LaneCollect,
}

impl GameId {
    pub fn name(self) -> &'static str {
        match self {
            GameId::ChaseDot => "chase_dot",
            GameId::LaneCollect => "lane_collect",
        }
    }

    /// Horizon in non-pause ticks.
    pub fn default_horizon(self) -> u32 {
        match self {
            GameId::ChaseDot => 200,
            GameId::LaneCollect => 1000,
        }
    }
}

impl FromStr for GameId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chase_dot" => Ok(GameId::ChaseDot),
            "lane_collect" => Ok(GameId::LaneCollect),
            other => Err(Error::Config(format!("unknown game {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameSpec {
    pub game: GameId,
    pub tick_hz: u32,
    /// Ticks advanced per non-pause step.
    pub frame_skip: u32,
    pub sticky_prob: f64,
    /// Horizon in non-pause ticks.
    pub max_steps: u32,
    pub max_consecutive_pauses: u32,
}

impl GameSpec {
    pub fn new(game: GameId) -> Self {
        Self {
            game,
            tick_hz: TICK_HZ,
            frame_skip: 1,
            sticky_prob: 0.25,
            max_steps: game.default_horizon(),
            max_consecutive_pauses: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tick_hz != TICK_HZ {
            return Err(Error::Config(format!("game.tick_hz must be {TICK_HZ}, got {}", self.tick_hz)));
        }
        if self.frame_skip < 1 {
            return Err(Error::Config("game.frame_skip must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.sticky_prob) {
            return Err(Error::Config(format!(
                "game.sticky_prob must lie in [0, 1), got {}",
                self.sticky_prob
            )));
        }
        if self.max_consecutive_pauses < 1 {
            return Err(Error::Config("game.max_consecutive_pauses must be >= 1".into()));
        }
        if self.max_steps < 1 {
            return Err(Error::Config("game.max_steps must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum World {
    Chase(ChaseWorld),
    Lane(LaneWorld),
}

impl World {
    fn tick(&mut self, action: MotorAction) -> TickOutcome {
        match self {
            World::Chase(w) => w.tick(action),
            World::Lane(w) => w.tick(action),
        }
    }

    fn render(&self) -> Frame {
        match self {
            World::Chase(w) => w.render(),
            World::Lane(w) => w.render(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct TickOutcome {
    pub score: i64,
    pub dead: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    pub frame: Frame,
    /// Game points earned this step, unclipped.
    pub score_delta: i64,
    pub terminal: bool,
    pub paused: bool,
    pub effective_motor: MotorAction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameState {
    spec: GameSpec,
    world: World,
    sticky_rng: ChaCha8Rng,
    score: i64,
    pause_counter: u32,
    step_index: u64,
    tick: u64,
    terminal: bool,
    last_effective: MotorAction,
}

/// Starts a game. The world RNG and the sticky-action RNG are separate ChaCha
/// streams of the same seed; CHASE_DOT targets come from the documented LCG.
pub fn reset(spec: GameSpec, seed: u64) -> Result<(GameState, Frame)> {
    spec.validate()?;
    let world = match spec.game {
        GameId::ChaseDot => World::Chase(ChaseWorld::new(seed)),
        GameId::LaneCollect => World::Lane(LaneWorld::new(stream_rng(seed, 0))),
    };
    let state = GameState {
        spec,
        world,
        sticky_rng: stream_rng(seed, 1),
        score: 0,
        pause_counter: 0,
        step_index: 0,
        tick: 0,
        terminal: false,
        last_effective: MotorAction::Noop,
    };
    let frame = state.render();
    Ok((state, frame))
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Returns `prev` with probability `xi`, otherwise `chosen`. PAUSE is never
/// replaced and does not consume a draw.
pub fn apply_sticky<R: Rng + ?Sized>(
    prev: MotorAction,
    chosen: MotorAction,
    xi: f64,
    rng: &mut R,
) -> MotorAction {
    if chosen == MotorAction::Pause {
        return chosen;
    }
    if rng.gen::<f64>() < xi {
        prev
    } else {
        chosen
    }
}

impl GameState {
    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn score(&self) -> i64 {
        self.score
    }

    pub fn pause_counter(&self) -> u32 {
        self.pause_counter
    }

    /// Number of non-pause steps taken.
    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    /// Number of world ticks elapsed.
    pub fn game_tick(&self) -> u64 {
        self.tick
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    pub fn last_effective_action(&self) -> MotorAction {
        self.last_effective
    }

    pub fn render(&self) -> Frame {
        self.world.render()
    }

    /// Every action is legal except PAUSE once the pause bound is reached.
    pub fn legal_motor_mask(&self) -> MotorMask {
        let mut mask = [true; NUM_MOTOR_ACTIONS];
        mask[MotorAction::Pause.index()] = self.pause_counter < self.spec.max_consecutive_pauses;
        mask
    }

    pub fn step(&mut self, action: MotorAction) -> Result<StepResult> {
        if self.terminal {
            return Err(Error::Usage("step called on a terminal state".into()));
        }
        if action == MotorAction::Pause {
            if self.pause_counter >= self.spec.max_consecutive_pauses {
                return Err(Error::MaskViolation {
                    counter: self.pause_counter,
                    limit: self.spec.max_consecutive_pauses,
                });
            }
            self.pause_counter += 1;
            return Ok(StepResult {
                frame: self.render(),
                score_delta: 0,
                terminal: false,
                paused: true,
                effective_motor: MotorAction::Pause,
            });
        }

        let effective = apply_sticky(
            self.last_effective,
            action,
            self.spec.sticky_prob,
            &mut self.sticky_rng,
        );
        let mut delta = 0;
        for _ in 0..self.spec.frame_skip {
            let outcome = self.world.tick(effective);
            delta += outcome.score;
            self.tick += 1;
            if outcome.dead || self.tick >= u64::from(self.spec.max_steps) {
                self.terminal = true;
                break;
            }
        }
        self.score += delta;
        self.pause_counter = 0;
        self.step_index += 1;
        self.last_effective = effective;
        Ok(StepResult {
            frame: self.render(),
            score_delta: delta,
            terminal: self.terminal,
            paused: false,
            effective_motor: effective,
        })
    }
}
