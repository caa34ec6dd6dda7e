//! Per-step episode records and their CSV encoding.

use std::io::{Read, Write};
use std::path::Path;

use crate::env::MotorAction;
use crate::error::{Error, Result};

pub const EPISODE_LOG_HEADER: [&str; 13] = [
    "step",
    "game_tick",
    "motor_action",
    "effective_motor",
    "sensory_cell",
    "gaze_x_px",
    "gaze_y_px",
    "emma_time_ms",
    "frame_duration_ms",
    "score_delta",
    "cumulative_score",
    "paused",
    "terminal",
];

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    /// World ticks elapsed after this step; unchanged across pauses.
    pub game_tick: u64,
    pub motor_action: MotorAction,
    pub effective_motor: MotorAction,
    pub sensory_cell: usize,
    pub gaze_x_px: usize,
    pub gaze_y_px: usize,
    /// EMMA time of the gaze shift performed this step.
    pub emma_time_ms: f64,
    /// Set on the step that replaces the displayed frame.
    pub frame_duration_ms: Option<f64>,
    pub score_delta: i64,
    pub cumulative_score: i64,
    pub paused: bool,
    pub terminal: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpisodeLog {
    pub steps: Vec<StepRecord>,
}

impl EpisodeLog {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_score(&self) -> i64 {
        self.steps.last().map_or(0, |s| s.cumulative_score)
    }

    pub fn pause_count(&self) -> usize {
        self.steps.iter().filter(|s| s.paused).count()
    }

    pub fn frame_durations(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().filter_map(|s| s.frame_duration_ms)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(EPISODE_LOG_HEADER)?;
        for s in &self.steps {
            w.write_record([
                s.step.to_string(),
                s.game_tick.to_string(),
                s.motor_action.name().to_string(),
                s.effective_motor.name().to_string(),
                s.sensory_cell.to_string(),
                s.gaze_x_px.to_string(),
                s.gaze_y_px.to_string(),
                s.emma_time_ms.to_string(),
                s.frame_duration_ms.map(|d| d.to_string()).unwrap_or_default(),
                s.score_delta.to_string(),
                s.cumulative_score.to_string(),
                u8::from(s.paused).to_string(),
                u8::from(s.terminal).to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<episode log>", e))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().ne(EPISODE_LOG_HEADER.iter().copied()) {
            return Err(Error::data(Some(1), "episode log header mismatch"));
        }
        let mut steps = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec?;
            let field = |k: usize| rec.get(k).unwrap_or("");
            fn num<T: std::str::FromStr>(s: &str, name: &str, line: usize) -> Result<T> {
                s.parse()
                    .map_err(|_| Error::data(Some(line), format!("bad {name} {s:?}")))
            }
            let flag = |k: usize| -> Result<bool> {
                match field(k) {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => Err(Error::data(Some(line), format!("bad flag {other:?}"))),
                }
            };
            let action = |k: usize| -> Result<MotorAction> {
                field(k).parse().map_err(|_| Error::data(Some(line), format!("bad action {:?}", field(k))))
            };
            steps.push(StepRecord {
                step: num(field(0), "step", line)?,
                game_tick: num(field(1), "game_tick", line)?,
                motor_action: action(2)?,
                effective_motor: action(3)?,
                sensory_cell: num(field(4), "sensory_cell", line)?,
                gaze_x_px: num(field(5), "gaze_x_px", line)?,
                gaze_y_px: num(field(6), "gaze_y_px", line)?,
                emma_time_ms: num(field(7), "emma_time_ms", line)?,
                frame_duration_ms: match field(8) {
                    "" => None,
                    s => Some(num(s, "frame_duration_ms", line)?),
                },
                score_delta: num(field(9), "score_delta", line)?,
                cumulative_score: num(field(10), "cumulative_score", line)?,
                paused: flag(11)?,
                terminal: flag(12)?,
            });
        }
        Ok(Self { steps })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}
