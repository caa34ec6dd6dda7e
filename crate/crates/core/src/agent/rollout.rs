//! The closed perception–action loop: foveated observation, joint action,
//! game step, EMMA timing of the gaze shift, penalised reward, memory update.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::network::{EncodedObs, QNetwork};
use super::{compute_reward, select_action, AgentAction, Reward, RewardConfig};
use crate::emma::{eccentricity_deg, gaze_shift_time, EmmaParams};
use crate::env::{self, GameSpec, GameState, MotorAction, MotorMask, TICK_MS};
use crate::error::{Error, Result};
use crate::fovea::{cell_center, observe, FoveaConfig, ObservationCanvas, SensoryAction};
use crate::log::{EpisodeLog, StepRecord};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopConfig {
    pub game: GameSpec,
    pub fovea: FoveaConfig,
    pub emma: EmmaParams,
    pub reward: RewardConfig,
    /// When false, PAUSE stays masked for the whole episode.
    pub pausing: bool,
}

impl LoopConfig {
    pub fn new(game: GameSpec) -> Self {
        Self {
            game,
            fovea: FoveaConfig::default(),
            emma: EmmaParams::default(),
            reward: RewardConfig::default(),
            pausing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.game.validate()?;
        self.fovea.validate()?;
        self.emma.validate()?;
        self.reward.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub reward: Reward,
    pub score_delta: i64,
    pub paused: bool,
    pub done: bool,
    pub ecc_deg: f64,
    pub emma_ms: f64,
}

/// One running episode. Gaze starts on the centre cell, which is observed at reset.
#[derive(Clone, Debug)]
pub struct Rollout {
    cfg: LoopConfig,
    state: GameState,
    memory: ObservationCanvas,
    gaze: SensoryAction,
    pending_pause_ms: f64,
    steps: u64,
    log: EpisodeLog,
    record: bool,
}

impl Rollout {
    pub fn start(cfg: LoopConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let (state, frame) = env::reset(cfg.game, seed)?;
        let mut memory = ObservationCanvas::empty(cfg.fovea.memory_depth);
        observe(&frame, SensoryAction::CENTER, &mut memory, &cfg.fovea);
        Ok(Self {
            cfg,
            state,
            memory,
            gaze: SensoryAction::CENTER,
            pending_pause_ms: 0.0,
            steps: 0,
            log: EpisodeLog::default(),
            record: true,
        })
    }

    /// Skip building the per-step log (training loops only need outcomes).
    pub fn without_log(mut self) -> Self {
        self.record = false;
        self
    }

    pub fn config(&self) -> &LoopConfig {
        &self.cfg
    }

    pub fn observation(&self) -> &ObservationCanvas {
        &self.memory
    }

    pub fn game(&self) -> &GameState {
        &self.state
    }

    pub fn gaze(&self) -> SensoryAction {
        self.gaze
    }

    pub fn is_done(&self) -> bool {
        self.state.is_terminal()
    }

    pub fn motor_mask(&self) -> MotorMask {
        let mut mask = self.state.legal_motor_mask();
        if !self.cfg.pausing {
            mask[MotorAction::Pause.index()] = false;
        }
        mask
    }

    pub fn step(&mut self, action: AgentAction) -> Result<StepOutcome> {
        if action.motor == MotorAction::Pause && !self.cfg.pausing {
            return Err(Error::MaskViolation {
                counter: self.state.pause_counter(),
                limit: 0,
            });
        }
        let result = self.state.step(action.motor)?;

        let from = cell_center(self.gaze);
        let to = observe(&result.frame, action.sensory, &mut self.memory, &self.cfg.fovea);
        self.gaze = action.sensory;
        let ecc = eccentricity_deg(from, to, &self.cfg.emma);
        let emma_ms = gaze_shift_time(from, to, &self.cfg.emma) * 1000.0;

        let frame_duration = if result.paused {
            self.pending_pause_ms += emma_ms;
            None
        } else {
            let d = TICK_MS + self.pending_pause_ms;
            self.pending_pause_ms = 0.0;
            Some(d)
        };

        let reward = compute_reward(result.score_delta, result.paused, ecc, &self.cfg.reward);
        if self.record {
            self.log.steps.push(StepRecord {
                step: self.steps,
                game_tick: self.state.game_tick(),
                motor_action: action.motor,
                effective_motor: result.effective_motor,
                sensory_cell: action.sensory.index(),
                gaze_x_px: to.0,
                gaze_y_px: to.1,
                emma_time_ms: emma_ms,
                frame_duration_ms: frame_duration,
                score_delta: result.score_delta,
                cumulative_score: self.state.score(),
                paused: result.paused,
                terminal: result.terminal,
            });
        }
        self.steps += 1;
        Ok(StepOutcome {
            reward,
            score_delta: result.score_delta,
            paused: result.paused,
            done: result.terminal,
            ecc_deg: ecc,
            emma_ms,
        })
    }

    pub fn log(&self) -> &EpisodeLog {
        &self.log
    }

    pub fn into_log(self) -> EpisodeLog {
        self.log
    }
}

pub trait Policy {
    fn act(&mut self, obs: &ObservationCanvas, mask: &MotorMask) -> Result<AgentAction>;
}

impl<F> Policy for F
where
    F: FnMut(&ObservationCanvas, &MotorMask) -> Result<AgentAction>,
{
    fn act(&mut self, obs: &ObservationCanvas, mask: &MotorMask) -> Result<AgentAction> {
        self(obs, mask)
    }
}

/// ε-greedy over a frozen network.
pub struct GreedyPolicy<'a> {
    net: &'a QNetwork,
    epsilon: f64,
    rng: ChaCha8Rng,
}

impl<'a> GreedyPolicy<'a> {
    pub fn new(net: &'a QNetwork, epsilon: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(2);
        Self { net, epsilon, rng }
    }

    pub fn values(&self, obs: &ObservationCanvas) -> Result<(EncodedObs, super::HeadValues)> {
        let enc = self.net.encode(obs)?;
        let q = self.net.forward(&enc)?;
        Ok((enc, q))
    }
}

impl Policy for GreedyPolicy<'_> {
    fn act(&mut self, obs: &ObservationCanvas, mask: &MotorMask) -> Result<AgentAction> {
        let (_, q) = self.values(obs)?;
        select_action(&q.motor, &q.sensory, self.epsilon, mask, &mut self.rng)
    }
}

/// Plays one episode to termination with any policy.
pub fn run_policy_episode<P: Policy + ?Sized>(cfg: &LoopConfig, policy: &mut P, seed: u64) -> Result<EpisodeLog> {
    let mut rollout = Rollout::start(*cfg, seed)?;
    while !rollout.is_done() {
        let mask = rollout.motor_mask();
        let action = policy.act(rollout.observation(), &mask)?;
        rollout.step(action)?;
    }
    Ok(rollout.into_log())
}

/// Plays one ε-greedy episode with `net`; the policy RNG is derived from `seed`.
pub fn run_episode(cfg: &LoopConfig, net: &QNetwork, epsilon: f64, seed: u64) -> Result<EpisodeLog> {
    let mut policy = GreedyPolicy::new(net, epsilon, seed);
    run_policy_episode(cfg, &mut policy, seed)
}
