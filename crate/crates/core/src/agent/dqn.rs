//! Replay-based temporal-difference training of the dual-head network.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::network::{NetworkKind, QNetwork, QNetworkSpec};
use super::replay::{ReplayBuffer, Transition};
use super::rollout::{LoopConfig, Rollout};
use super::{masked_argmax, masked_max, select_action};
use crate::env::NUM_MOTOR_ACTIONS;
use crate::error::{Error, Result};
use crate::fovea::GRID_CELLS;

/// Exploration never drops below this during training.
pub const MIN_EPSILON: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub network: NetworkKind,
    pub gamma: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub replay_capacity: usize,
    /// Transitions collected before the first update.
    pub warmup: usize,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Environment steps over which ε decays linearly.
    pub epsilon_decay_steps: u64,
    /// Gradient updates between target-network copies.
    pub target_sync: u64,
    /// Environment steps between gradient updates.
    pub train_every: u64,
    pub huber_delta: f64,
    /// Environment-step budget.
    pub steps: u64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            network: NetworkKind::Linear,
            gamma: 0.99,
            learning_rate: 2.5e-4,
            batch_size: 32,
            replay_capacity: 100_000,
            warmup: 5_000,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_steps: 100_000,
            target_sync: 1_000,
            train_every: 1,
            huber_delta: 1.0,
            steps: 50_000,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(0.0..1.0).contains(&self.gamma) {
            return bad("train.gamma must lie in [0, 1)");
        }
        if !(self.learning_rate > 0.0) {
            return bad("train.learning_rate must be > 0");
        }
        if self.batch_size == 0 || self.replay_capacity == 0 || self.target_sync == 0 || self.train_every == 0 {
            return bad("train.batch_size, train.replay_capacity, train.target_sync and train.train_every must be positive");
        }
        if self.warmup > self.replay_capacity {
            return bad("train.warmup cannot exceed train.replay_capacity");
        }
        let eps_ok = |e: f64| (MIN_EPSILON..=1.0).contains(&e);
        if !eps_ok(self.epsilon_start) || !eps_ok(self.epsilon_end) || self.epsilon_end > self.epsilon_start {
            return bad("train.epsilon_start/epsilon_end must satisfy 0.05 <= end <= start <= 1");
        }
        if !(self.huber_delta > 0.0) {
            return bad("train.huber_delta must be > 0");
        }
        Ok(())
    }

    pub fn epsilon_at(&self, env_step: u64) -> f64 {
        if env_step >= self.epsilon_decay_steps {
            return self.epsilon_end;
        }
        let frac = env_step as f64 / self.epsilon_decay_steps as f64;
        self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)
    }
}

pub type Batch<'a> = [&'a Transition];

/// Per-head regression targets `r + γ·max q'(s')`; the motor max respects the
/// next-state mask and terminal transitions do not bootstrap.
pub fn td_targets(batch: &Batch<'_>, target: &QNetwork, gamma: f64) -> Result<Vec<(f64, f64)>> {
    batch
        .iter()
        .map(|t| {
            if t.done {
                return Ok((t.reward, t.reward));
            }
            let q = target.forward(&t.next_obs)?;
            let motor = masked_max(&q.motor, &t.next_mask)
                .ok_or_else(|| Error::Usage("next-state motor mask is empty".into()))?;
            let sensory = q.sensory.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok((t.reward + gamma * motor, t.reward + gamma * sensory))
        })
        .collect()
}

fn huber(x: f64, delta: f64) -> (f64, f64) {
    if x.abs() <= delta {
        (0.5 * x * x, x)
    } else {
        (delta * (x.abs() - 0.5 * delta), delta * x.signum())
    }
}

/// Mean over the batch of Huber(q_motor − y_motor) + Huber(q_sensory − y_sensory)
/// and its gradient with respect to every parameter.
pub fn loss_and_grad(
    net: &QNetwork,
    batch: &Batch<'_>,
    targets: &[(f64, f64)],
    huber_delta: f64,
) -> Result<(f64, Vec<super::Tensor>)> {
    if batch.is_empty() {
        return Err(Error::Usage("empty batch".into()));
    }
    let mut grads = net.zero_grads();
    let scale = 1.0 / batch.len() as f64;
    let mut loss = 0.0;
    for (t, &(y_m, y_s)) in batch.iter().zip(targets) {
        let q = net.forward(&t.obs)?;
        let (lm, gm) = huber(q.motor[t.motor.index()] - y_m, huber_delta);
        let (ls, gs) = huber(q.sensory[t.sensory.index()] - y_s, huber_delta);
        loss += (lm + ls) * scale;
        let mut d_motor = [0.0; NUM_MOTOR_ACTIONS];
        let mut d_sensory = [0.0; GRID_CELLS];
        d_motor[t.motor.index()] = gm * scale;
        d_sensory[t.sensory.index()] = gs * scale;
        if gm != 0.0 || gs != 0.0 {
            net.backward(&t.obs, &d_motor, &d_sensory, &mut grads)?;
        }
    }
    Ok((loss, grads))
}

/// One SGD update on a given batch. Returns the pre-update loss.
pub fn train_on_batch(net: &mut QNetwork, target: &QNetwork, batch: &Batch<'_>, cfg: &TrainConfig) -> Result<f64> {
    let targets = td_targets(batch, target, cfg.gamma)?;
    let (loss, grads) = loss_and_grad(net, batch, &targets, cfg.huber_delta)?;
    for (p, g) in net.params_mut().iter_mut().zip(&grads) {
        for (w, d) in p.data.iter_mut().zip(&g.data) {
            *w -= cfg.learning_rate * d;
        }
    }
    Ok(loss)
}

/// Samples a batch uniformly from `replay` and applies one update.
pub fn train_step(
    net: &mut QNetwork,
    target: &QNetwork,
    replay: &ReplayBuffer,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    if replay.len() < cfg.warmup.max(1) {
        return Err(Error::Usage(format!(
            "replay holds {} transitions, warmup needs {}",
            replay.len(),
            cfg.warmup
        )));
    }
    let batch = replay.sample(cfg.batch_size, rng);
    train_on_batch(net, target, &batch, cfg)
}

/// One line of the training metrics file, emitted per finished episode.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingRow {
    pub step: u64,
    /// Mean loss over the updates made during the episode.
    pub loss: Option<f64>,
    pub epsilon: f64,
    /// Mean game score over the last 20 episodes.
    pub mean_return: f64,
}

pub const METRICS_HEADER: &str = "step,loss,epsilon,mean_return";

impl TrainingRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{}",
            self.step,
            self.loss.map(|l| l.to_string()).unwrap_or_default(),
            self.epsilon,
            self.mean_return
        )
    }
}

/// SplitMix64 step, used to derive per-episode seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub struct Trainer {
    loop_cfg: LoopConfig,
    cfg: TrainConfig,
    net: QNetwork,
    target: QNetwork,
    replay: ReplayBuffer,
    rng: ChaCha8Rng,
    env_steps: u64,
    train_steps: u64,
    episodes: u64,
    recent: VecDeque<f64>,
}

impl Trainer {
    pub fn new(loop_cfg: LoopConfig, cfg: TrainConfig) -> Result<Self> {
        loop_cfg.validate()?;
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let spec = QNetworkSpec::new(cfg.network, loop_cfg.fovea.memory_depth);
        let net = QNetwork::init(spec, &mut rng);
        Ok(Self {
            loop_cfg,
            cfg,
            target: net.clone(),
            net,
            replay: ReplayBuffer::new(cfg.replay_capacity),
            rng,
            env_steps: 0,
            train_steps: 0,
            episodes: 0,
            recent: VecDeque::with_capacity(20),
        })
    }

    pub fn network(&self) -> &QNetwork {
        &self.net
    }

    pub fn into_network(self) -> QNetwork {
        self.net
    }

    pub fn env_steps(&self) -> u64 {
        self.env_steps
    }

    pub fn train_steps(&self) -> u64 {
        self.train_steps
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    pub fn epsilon(&self) -> f64 {
        self.cfg.epsilon_at(self.env_steps)
    }

    /// Trains until the step budget is spent, calling `on_episode` after every
    /// completed episode. An episode cut short by the budget is not reported.
    pub fn run(&mut self, mut on_episode: impl FnMut(&TrainingRow)) -> Result<()> {
        while self.env_steps < self.cfg.steps {
            if let Some(row) = self.run_episode()? {
                on_episode(&row);
            }
        }
        Ok(())
    }

    fn run_episode(&mut self) -> Result<Option<TrainingRow>> {
        let seed = derive_seed(self.cfg.seed, self.episodes);
        let mut rollout = Rollout::start(self.loop_cfg, seed)?.without_log();
        let mut obs = Arc::new(self.net.encode(rollout.observation())?);
        let (mut loss_sum, mut loss_n) = (0.0, 0u32);
        let mut score = 0i64;
        while !rollout.is_done() {
            if self.env_steps >= self.cfg.steps {
                return Ok(None);
            }
            let mask = rollout.motor_mask();
            let q = self.net.forward(&obs)?;
            let eps = self.epsilon();
            let action = select_action(&q.motor, &q.sensory, eps, &mask, &mut self.rng)?;
            let out = rollout.step(action)?;
            score += out.score_delta;
            let next = Arc::new(self.net.encode(rollout.observation())?);
            self.replay.push(Transition {
                obs,
                motor: action.motor,
                sensory: action.sensory,
                reward: out.reward.training,
                next_obs: next.clone(),
                done: out.done,
                next_mask: rollout.motor_mask(),
            });
            obs = next;
            self.env_steps += 1;

            if self.replay.len() >= self.cfg.warmup.max(self.cfg.batch_size)
                && self.env_steps.is_multiple_of(self.cfg.train_every)
            {
                let loss = train_step(&mut self.net, &self.target, &self.replay, &self.cfg, &mut self.rng)?;
                loss_sum += loss;
                loss_n += 1;
                self.train_steps += 1;
                if self.train_steps.is_multiple_of(self.cfg.target_sync) {
                    self.target = self.net.clone();
                }
            }
        }
        self.episodes += 1;
        if self.recent.len() == 20 {
            self.recent.pop_front();
        }
        self.recent.push_back(score as f64);
        Ok(Some(TrainingRow {
            step: self.env_steps,
            loss: (loss_n > 0).then(|| loss_sum / f64::from(loss_n)),
            epsilon: self.epsilon(),
            mean_return: self.recent.iter().sum::<f64>() / self.recent.len() as f64,
        }))
    }
}

/// Greedy motor choice of a network for a fixed observation, exposed for diagnostics.
pub fn greedy_motor(net: &QNetwork, obs: &super::EncodedObs, mask: &crate::env::MotorMask) -> Result<usize> {
    let q = net.forward(obs)?;
    masked_argmax(&q.motor, mask).ok_or_else(|| Error::Usage("every motor action is masked".into()))
}
