use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{MotorAction, TickOutcome};
use crate::frame::{Frame, FRAME_SIZE};

pub const LANES: u8 = 5;
pub const LANE_HEIGHT: i32 = 16;
pub const TOP_OFFSET: i32 = 2;
pub const SPRITE: i32 = 8;
pub const AVATAR_STEP_PX: i32 = 4;
pub const OBJECT_SPEED_PX: i32 = 2;
pub const SPAWN_PROB: f64 = 0.05;
pub const REWARD_POINTS: i64 = 50;
pub const AVATAR_INTENSITY: u8 = 255;
pub const REWARD_INTENSITY: u8 = 170;
pub const HAZARD_INTENSITY: u8 = 85;

const MAX_X: i32 = FRAME_SIZE as i32 - SPRITE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectKind {
    Reward,
    Hazard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LaneObject {
    pub lane: u8,
    /// Left edge in pixels; may lie off-screen.
    pub x: i32,
    /// +1 moves right, −1 moves left.
    pub dir: i32,
    pub kind: ObjectKind,
}

/// Five-lane collect/avoid game in the style of Asterix.
#[derive(Clone, Debug, PartialEq)]
pub struct LaneWorld {
    avatar_lane: u8,
    avatar_x: i32,
    objects: Vec<LaneObject>,
    rng: ChaCha8Rng,
}

fn lane_top(lane: u8) -> i32 {
    TOP_OFFSET + LANE_HEIGHT * i32::from(lane) + (LANE_HEIGHT - SPRITE) / 2
}

impl LaneWorld {
    pub fn new(rng: ChaCha8Rng) -> Self {
        Self {
            avatar_lane: LANES / 2,
            avatar_x: MAX_X / 2,
            objects: Vec::new(),
            rng,
        }
    }

    pub fn avatar(&self) -> (u8, i32) {
        (self.avatar_lane, self.avatar_x)
    }

    pub fn objects(&self) -> &[LaneObject] {
        &self.objects
    }

    #[cfg(test)]
    pub(crate) fn push_object(&mut self, obj: LaneObject) {
        self.objects.push(obj);
    }

    pub(crate) fn tick(&mut self, action: MotorAction) -> TickOutcome {
        match action {
            MotorAction::Up => self.avatar_lane = self.avatar_lane.saturating_sub(1),
            MotorAction::Down => self.avatar_lane = (self.avatar_lane + 1).min(LANES - 1),
            MotorAction::Left => self.avatar_x = (self.avatar_x - AVATAR_STEP_PX).max(0),
            MotorAction::Right => self.avatar_x = (self.avatar_x + AVATAR_STEP_PX).min(MAX_X),
            MotorAction::Noop | MotorAction::Fire | MotorAction::Pause => {}
        }

        for obj in &mut self.objects {
            obj.x += OBJECT_SPEED_PX * obj.dir;
        }
        self.objects
            .retain(|o| o.x > -SPRITE && o.x < FRAME_SIZE as i32);

        let mut outcome = TickOutcome::default();
        let (lane, ax) = (self.avatar_lane, self.avatar_x);
        self.objects.retain(|o| {
            let hit = o.lane == lane && o.x < ax + SPRITE && ax < o.x + SPRITE;
            if hit {
                match o.kind {
                    ObjectKind::Reward => outcome.score += REWARD_POINTS,
                    ObjectKind::Hazard => outcome.dead = true,
                }
            }
            !hit
        });

        // fixed draw order keeps the stream reproducible: per lane, left side then right side
        for lane in 0..LANES {
            for (x, dir) in [(-SPRITE, 1), (FRAME_SIZE as i32, -1)] {
                if self.rng.gen_bool(SPAWN_PROB) {
                    let kind = if self.rng.gen_bool(0.5) {
                        ObjectKind::Reward
                    } else {
                        ObjectKind::Hazard
                    };
                    self.objects.push(LaneObject { lane, x, dir, kind });
                }
            }
        }
        outcome
    }

    pub(crate) fn render(&self) -> Frame {
        let mut frame = Frame::black();
        for o in &self.objects {
            let v = match o.kind {
                ObjectKind::Reward => REWARD_INTENSITY,
                ObjectKind::Hazard => HAZARD_INTENSITY,
            };
            frame.fill_rect(o.x, lane_top(o.lane), SPRITE, SPRITE, v);
        }
        frame.fill_rect(
            self.avatar_x,
            lane_top(self.avatar_lane),
            SPRITE,
            SPRITE,
            AVATAR_INTENSITY,
        );
        frame
    }
}
