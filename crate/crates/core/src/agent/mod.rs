//! The dual-head value-learning agent.
//!
//! One network scores motor actions and sensory (gaze) actions from the same
//! foveated memory. Both heads learn from a single scalar reward: the game
//! score minus a pause penalty and a saccade cost proportional to the gaze
//! shift in degrees.

pub mod checkpoint;
pub mod dqn;
pub mod features;
pub mod grid;
pub mod network;
pub mod replay;
pub mod rollout;

use rand::Rng;

pub use dqn::{derive_seed, td_targets, train_step, Batch, TrainConfig, Trainer, TrainingRow, METRICS_HEADER};
pub use grid::{evaluate_cell, grid_search, grid_search_with, select_best, CellEvaluation, GridCell, GridReport, GridSearch};
pub use network::{EncodedObs, HeadValues, NetworkKind, QNetwork, QNetworkSpec, Tensor};
pub use replay::{ReplayBuffer, Transition};
pub use rollout::{run_episode, run_policy_episode, GreedyPolicy, LoopConfig, Policy, Rollout, StepOutcome};

use crate::env::{MotorAction, MotorMask, NUM_MOTOR_ACTIONS};
use crate::error::{Error, Result};
use crate::fovea::{SensoryAction, GRID_CELLS};

/// Joint action: a game input and the next gaze cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AgentAction {
    pub motor: MotorAction,
    pub sensory: SensoryAction,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardConfig {
    /// Charged on every PAUSE step.
    pub pause_penalty: f64,
    /// Charged per degree of gaze shift.
    pub saccade_cost: f64,
    /// Sign-clip the game score (not the penalties) for training.
    pub clip_training_reward: bool,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            pause_penalty: 0.1,
            saccade_cost: 0.01,
            clip_training_reward: true,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pause_penalty >= 0.0) {
            return Err(Error::Config("reward.pause_penalty must be >= 0".into()));
        }
        if !(self.saccade_cost >= 0.0) {
            return Err(Error::Config("reward.saccade_cost must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reward {
    /// Score minus penalties, used for logging.
    pub logged: f64,
    /// What the learner sees.
    pub training: f64,
}

pub fn compute_reward(score_delta: i64, paused: bool, ecc_deg: f64, cfg: &RewardConfig) -> Reward {
    let penalty = if paused { cfg.pause_penalty } else { 0.0 } + cfg.saccade_cost * ecc_deg;
    let score = score_delta as f64;
    let clipped = if cfg.clip_training_reward { score.signum() * f64::from(score != 0.0) } else { score };
    Reward {
        logged: score - penalty,
        training: clipped - penalty,
    }
}

/// Index of the maximum, lowest index on ties.
fn argmax<I: Iterator<Item = (usize, f64)>>(it: I) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in it {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

pub fn masked_argmax(q: &[f64; NUM_MOTOR_ACTIONS], mask: &MotorMask) -> Option<usize> {
    argmax(q.iter().copied().enumerate().filter(|&(i, _)| mask[i]))
}

pub fn masked_max(q: &[f64; NUM_MOTOR_ACTIONS], mask: &MotorMask) -> Option<f64> {
    masked_argmax(q, mask).map(|i| q[i])
}

/// Joint ε-greedy: one coin decides whether both heads explore; exploration
/// draws the motor action uniformly over legal actions and the cell uniformly
/// over all 25 cells.
pub fn select_action<R: Rng + ?Sized>(
    motor_q: &[f64; NUM_MOTOR_ACTIONS],
    sensory_q: &[f64; GRID_CELLS],
    epsilon: f64,
    mask: &MotorMask,
    rng: &mut R,
) -> Result<AgentAction> {
    let legal: Vec<usize> = (0..NUM_MOTOR_ACTIONS).filter(|&i| mask[i]).collect();
    if legal.is_empty() {
        return Err(Error::Usage("every motor action is masked".into()));
    }
    let (motor, cell) = if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        (legal[rng.gen_range(0..legal.len())], rng.gen_range(0..GRID_CELLS))
    } else {
        (
            masked_argmax(motor_q, mask).expect("non-empty mask"),
            argmax(sensory_q.iter().copied().enumerate()).expect("25 cells"),
        )
    };
    Ok(AgentAction {
        motor: MotorAction::from_index(motor).expect("index < 7"),
        sensory: SensoryAction::new(cell)?,
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    const ALL_LEGAL: MotorMask = [true; NUM_MOTOR_ACTIONS];

    #[test]
    fn reward_examples() {
        let cfg = RewardConfig::default();
        assert_eq!(compute_reward(0, false, 0.0, &cfg).logged, 0.0);
        let r = compute_reward(50, false, 10.0, &cfg);
        assert!((r.logged - 49.9).abs() < 1e-12);
        assert!((r.training - 0.9).abs() < 1e-12);
        let p = compute_reward(0, true, 0.0, &cfg);
        assert!((p.logged + 0.1).abs() < 1e-12);
        assert_eq!(p.logged, p.training);
        let raw = RewardConfig { clip_training_reward: false, ..cfg };
        assert_eq!(compute_reward(50, false, 0.0, &raw).training, 50.0);
        assert_eq!(compute_reward(-3, false, 0.0, &cfg).training, -1.0);
    }

    #[test]
    fn masked_pause_skipped_with_lowest_tie() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let q = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 9.0];
        let mut mask = ALL_LEGAL;
        mask[MotorAction::Pause.index()] = false;
        let a = select_action(&q, &[0.0; 25], 0.0, &mask, &mut rng).unwrap();
        assert_eq!(a.motor, MotorAction::Noop);
        let unmasked = select_action(&q, &[0.0; 25], 0.0, &ALL_LEGAL, &mut rng).unwrap();
        assert_eq!(unmasked.motor, MotorAction::Pause);
    }

    #[test]
    fn sensory_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = [0.0; 25];
        s[12] = 1.0;
        let a = select_action(&[0.0; 7], &s, 0.0, &ALL_LEGAL, &mut rng).unwrap();
        assert_eq!(a.sensory.index(), 12);
    }

    #[test]
    fn all_masked_is_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            select_action(&[0.0; 7], &[0.0; 25], 0.5, &[false; 7], &mut rng),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn uniform_exploration() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut counts = [0usize; 7];
        let n = 10_000;
        for _ in 0..n {
            let a = select_action(&[0.0; 7], &[0.0; 25], 1.0, &ALL_LEGAL, &mut rng).unwrap();
            counts[a.motor.index()] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 1.0 / 7.0).abs() < 0.02, "{counts:?}");
        }
    }

    #[test]
    fn constant_shift_keeps_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let mq: [f64; 7] = std::array::from_fn(|_| rng.gen_range(-5.0..5.0));
            let sq: [f64; 25] = std::array::from_fn(|_| rng.gen_range(-5.0..5.0));
            let c = rng.gen_range(-100.0..100.0);
            let a = select_action(&mq, &sq, 0.0, &ALL_LEGAL, &mut rng).unwrap();
            let b = select_action(&mq.map(|v| v + c), &sq.map(|v| v + c), 0.0, &ALL_LEGAL, &mut rng).unwrap();
            assert_eq!(a, b);
        }
    }
}
