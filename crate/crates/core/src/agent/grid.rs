//! Penalty calibration: retrain per (c_pause, c_sacc) cell and keep the cell
//! whose frame-duration histogram is closest to a reference.

use super::dqn::{derive_seed, TrainConfig, Trainer};
use super::rollout::{run_episode, LoopConfig};
use super::{QNetwork, RewardConfig};
use crate::error::{Error, Result};
use crate::saliency::{histogram_distance, DurationHistogram};

#[derive(Clone, Debug, PartialEq)]
pub struct GridSearch {
    pub base: LoopConfig,
    pub train: TrainConfig,
    pub c_pause: Vec<f64>,
    pub c_sacc: Vec<f64>,
    pub eval_episodes: usize,
    pub eval_epsilon: f64,
    pub eval_seed: u64,
}

impl GridSearch {
    pub fn new(base: LoopConfig, train: TrainConfig, c_pause: Vec<f64>, c_sacc: Vec<f64>) -> Self {
        Self {
            base,
            train,
            c_pause,
            c_sacc,
            eval_episodes: 5,
            eval_epsilon: 0.01,
            eval_seed: 1_000,
        }
    }

    /// Cells in row-major order over (c_pause, c_sacc).
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.c_pause
            .iter()
            .flat_map(|&p| self.c_sacc.iter().map(move |&s| (p, s)))
            .collect()
    }

    pub fn reward_for(&self, c_pause: f64, c_sacc: f64) -> RewardConfig {
        RewardConfig {
            pause_penalty: c_pause,
            saccade_cost: c_sacc,
            ..self.base.reward
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellEvaluation {
    pub network: QNetwork,
    pub histogram: DurationHistogram,
    pub mean_score: f64,
    /// Fraction of decision steps that were pauses.
    pub pause_rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridCell {
    pub c_pause: f64,
    pub c_sacc: f64,
    pub distance: f64,
    pub mean_score: f64,
    pub pause_rate: f64,
    pub histogram: DurationHistogram,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridReport {
    /// Every cell in grid order.
    pub cells: Vec<GridCell>,
    /// Index into `cells` of the winner.
    pub best: usize,
}

impl GridReport {
    pub fn best_cell(&self) -> &GridCell {
        &self.cells[self.best]
    }
}

/// Trains one cell with the shared seed and budget, then evaluates it with
/// the shared evaluation seeds.
pub fn evaluate_cell(grid: &GridSearch, c_pause: f64, c_sacc: f64) -> Result<CellEvaluation> {
    let cfg = LoopConfig {
        reward: grid.reward_for(c_pause, c_sacc),
        ..grid.base
    };
    let mut trainer = Trainer::new(cfg, grid.train)?;
    trainer.run(|_| {})?;
    let network = trainer.into_network();

    let mut histogram = DurationHistogram::default();
    let (mut score, mut pauses, mut steps) = (0.0, 0usize, 0usize);
    for i in 0..grid.eval_episodes {
        let log = run_episode(&cfg, &network, grid.eval_epsilon, derive_seed(grid.eval_seed, i as u64))?;
        histogram.merge(&DurationHistogram::from_log(&log)?)?;
        score += log.final_score() as f64;
        pauses += log.pause_count();
        steps += log.len();
    }
    let n = grid.eval_episodes.max(1) as f64;
    Ok(CellEvaluation {
        network,
        histogram,
        mean_score: score / n,
        pause_rate: if steps == 0 { 0.0 } else { pauses as f64 / steps as f64 },
    })
}

pub fn grid_search(grid: &GridSearch, reference: &DurationHistogram) -> Result<GridReport> {
    grid_search_with(grid, reference, |_| {})
}

/// As [`grid_search`], reporting each cell as soon as it is scored.
pub fn grid_search_with(
    grid: &GridSearch,
    reference: &DurationHistogram,
    mut on_cell: impl FnMut(&GridCell),
) -> Result<GridReport> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(Error::Usage("grid search needs at least one c_pause and one c_sacc value".into()));
    }
    if grid.eval_episodes == 0 {
        return Err(Error::Usage("grid search needs at least one evaluation episode".into()));
    }
    let mut scored = Vec::with_capacity(cells.len());
    for (c_pause, c_sacc) in cells {
        let eval = evaluate_cell(grid, c_pause, c_sacc)?;
        let cell = GridCell {
            c_pause,
            c_sacc,
            distance: histogram_distance(&eval.histogram, reference)?,
            mean_score: eval.mean_score,
            pause_rate: eval.pause_rate,
            histogram: eval.histogram,
        };
        on_cell(&cell);
        scored.push(cell);
    }
    let best = select_best(&scored);
    Ok(GridReport { cells: scored, best })
}

/// Smallest distance; ties go to the smaller c_pause, then the smaller c_sacc.
pub fn select_best(cells: &[GridCell]) -> usize {
    let key = |c: &GridCell| (c.distance, c.c_pause, c.c_sacc);
    (0..cells.len())
        .min_by(|&a, &b| {
            let (ka, kb) = (key(&cells[a]), key(&cells[b]));
            ka.0.total_cmp(&kb.0)
                .then(ka.1.total_cmp(&kb.1))
                .then(ka.2.total_cmp(&kb.2))
        })
        .expect("non-empty grid")
}
