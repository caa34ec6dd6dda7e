use std::sync::Arc;

use rand::Rng;

use super::network::EncodedObs;
use crate::env::{MotorAction, MotorMask};
use crate::fovea::SensoryAction;

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub obs: Arc<EncodedObs>,
    pub motor: MotorAction,
    pub sensory: SensoryAction,
    /// Post-penalty training reward.
    pub reward: f64,
    pub next_obs: Arc<EncodedObs>,
    /// Terminal transitions are not bootstrapped.
    pub done: bool,
    pub next_mask: MotorMask,
}

/// Fixed-capacity ring buffer with uniform sampling.
#[derive(Debug)]
pub struct ReplayBuffer {
    items: Vec<Transition>,
    capacity: usize,
    next: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            items: Vec::with_capacity(capacity.min(1 << 16)),
            capacity,
            next: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.next] = t;
        }
        self.next = (self.next + 1) % self.capacity;
    }

    pub fn get(&self, i: usize) -> Option<&Transition> {
        self.items.get(i)
    }

    /// Indices drawn uniformly with replacement.
    pub fn sample_indices<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        (0..n).map(|_| rng.gen_range(0..self.items.len())).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<&Transition> {
        self.sample_indices(n, rng).into_iter().map(|i| &self.items[i]).collect()
    }
}
