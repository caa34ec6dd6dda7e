//! Finite-horizon dynamic programming on fully observable CHASE_DOT.
//!
//! State: avatar cell, target cell, previous effective move (sticky actions
//! repeat it with probability ξ) and remaining ticks. The respawn cell is
//! hidden from the player, so the target reappears uniformly on one of the
//! 24 cells not under the avatar.

const N: usize = 5;
const CELLS: usize = N * N;
/// stay, up, down, left, right
const MOVES: usize = 5;

fn apply(cell: usize, mv: usize) -> usize {
    let (r, c) = (cell / N, cell % N);
    let (r, c) = match mv {
        1 => (r.saturating_sub(1), c),
        2 => ((r + 1).min(N - 1), c),
        3 => (r, c.saturating_sub(1)),
        4 => (r, (c + 1).min(N - 1)),
        _ => (r, c),
    };
    r * N + c
}

pub struct ChaseOracle {
    horizon: usize,
    /// values[t][(avatar * CELLS + target) * MOVES + prev] with t ticks remaining
    values: Vec<Vec<f64>>,
}

impl ChaseOracle {
    pub fn solve(horizon: usize, xi: f64) -> Self {
        let idx = |a: usize, g: usize, p: usize| (a * CELLS + g) * MOVES + p;
        let mut values = vec![vec![0.0; CELLS * CELLS * MOVES]];
        for t in 1..=horizon {
            let prev_v = &values[t - 1];
            // expected continuation after a catch at avatar cell a with move m
            let respawn: Vec<f64> = (0..CELLS * MOVES)
                .map(|k| {
                    let (a, m) = (k / MOVES, k % MOVES);
                    (0..CELLS).filter(|&g| g != a).map(|g| prev_v[idx(a, g, m)]).sum::<f64>() / (CELLS - 1) as f64
                })
                .collect();
            let q = |a: usize, g: usize, m: usize| -> f64 {
                let a2 = apply(a, m);
                if a2 == g {
                    1.0 + respawn[a2 * MOVES + m]
                } else {
                    prev_v[idx(a2, g, m)]
                }
            };
            let mut v = vec![0.0; CELLS * CELLS * MOVES];
            for a in 0..CELLS {
                for g in 0..CELLS {
                    if g == a {
                        continue;
                    }
                    let qs: Vec<f64> = (0..MOVES).map(|m| q(a, g, m)).collect();
                    for p in 0..MOVES {
                        let best = qs.iter().fold(f64::NEG_INFINITY, |b, &x| b.max(x));
                        v[idx(a, g, p)] = (1.0 - xi) * best + xi * qs[p];
                    }
                }
            }
            values.push(v);
        }
        Self { horizon, values }
    }

    /// Expected optimal score from the given cells with no previous move.
    pub fn value(&self, avatar: (u8, u8), target: (u8, u8)) -> f64 {
        let a = avatar.0 as usize * N + avatar.1 as usize;
        let g = target.0 as usize * N + target.1 as usize;
        self.values[self.horizon][(a * CELLS + g) * MOVES]
    }
}
