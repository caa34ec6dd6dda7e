use super::{Lcg, MotorAction, TickOutcome};
use crate::frame::Frame;

pub const GRID: u8 = 5;
pub const CELL_PX: i32 = 16;
pub const BORDER_PX: i32 = 2;
pub const START: (u8, u8) = (2, 2);
pub const AVATAR_INTENSITY: u8 = 255;
pub const TARGET_INTENSITY: u8 = 128;

/// 5×5 pursuit game. Positions are `(row, col)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChaseWorld {
    avatar: (u8, u8),
    target: (u8, u8),
    lcg: Lcg,
}

impl ChaseWorld {
    pub fn new(seed: u64) -> Self {
        let mut w = Self {
            avatar: START,
            target: START,
            lcg: Lcg::new(seed),
        };
        w.respawn_target();
        w
    }

    pub fn avatar(&self) -> (u8, u8) {
        self.avatar
    }

    pub fn target(&self) -> (u8, u8) {
        self.target
    }

    pub fn lcg(&self) -> &Lcg {
        &self.lcg
    }

    fn respawn_target(&mut self) {
        loop {
            let cell = (self.lcg.next_value() % 25) as u8;
            let pos = (cell / GRID, cell % GRID);
            if pos != self.avatar {
                self.target = pos;
                return;
            }
        }
    }

    pub(crate) fn tick(&mut self, action: MotorAction) -> TickOutcome {
        let (r, c) = self.avatar;
        self.avatar = match action {
            MotorAction::Up => (r.saturating_sub(1), c),
            MotorAction::Down => ((r + 1).min(GRID - 1), c),
            MotorAction::Left => (r, c.saturating_sub(1)),
            MotorAction::Right => (r, (c + 1).min(GRID - 1)),
            MotorAction::Noop | MotorAction::Fire | MotorAction::Pause => (r, c),
        };
        if self.avatar == self.target {
            self.respawn_target();
            TickOutcome { score: 1, dead: false }
        } else {
            TickOutcome::default()
        }
    }

    pub(crate) fn render(&self) -> Frame {
        let mut frame = Frame::black();
        for ((r, c), v) in [(self.target, TARGET_INTENSITY), (self.avatar, AVATAR_INTENSITY)] {
            frame.fill_rect(
                BORDER_PX + CELL_PX * i32::from(c),
                BORDER_PX + CELL_PX * i32::from(r),
                CELL_PX,
                CELL_PX,
                v,
            );
        }
        frame
    }
}
