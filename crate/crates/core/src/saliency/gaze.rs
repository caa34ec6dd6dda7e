//! Human reference gaze logs: one row per displayed frame with its display
//! duration and the gaze samples recorded while it was shown.

use std::io::Read;
use std::path::Path;

use super::{DurationHistogram, FixationSet};
use crate::error::{Error, Result};

pub const GAZE_HEADER: [&str; 6] = [
    "frame_id",
    "episode_id",
    "duration_ms",
    "unclipped_reward",
    "action",
    "gaze_positions",
];

#[derive(Clone, Debug, PartialEq)]
pub struct GazeRecord {
    /// 1-based source line, kept for error reporting downstream.
    pub line: usize,
    pub frame_id: String,
    pub episode_id: String,
    pub duration_ms: f64,
    pub unclipped_reward: f64,
    pub action: i64,
    pub gaze_positions: Vec<(f64, f64)>,
}

fn parse_positions(s: &str, line: usize) -> Result<Vec<(f64, f64)>> {
    let s = s.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("null") {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|pair| {
            let (x, y) = pair
                .split_once(',')
                .ok_or_else(|| Error::data(Some(line), format!("gaze position {pair:?} is not \"x,y\"")))?;
            let coord = |v: &str| -> Result<f64> {
                let c: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::data(Some(line), format!("bad gaze coordinate {v:?}")))?;
                if !(0.0..84.0).contains(&c) {
                    return Err(Error::data(Some(line), format!("gaze coordinate {c} outside the 84x84 frame")));
                }
                Ok(c)
            };
            Ok((coord(x)?, coord(y)?))
        })
        .collect()
}

pub fn read_gaze_csv<R: Read>(input: R) -> Result<Vec<GazeRecord>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::Fields).from_reader(input);
    if r.headers()?.iter().ne(GAZE_HEADER.iter().copied()) {
        return Err(Error::data(Some(1), format!("gaze log header must be {}", GAZE_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::data(Some(line), e.to_string()))?;
        if rec.len() != GAZE_HEADER.len() {
            return Err(Error::data(Some(line), format!("expected {} fields, found {}", GAZE_HEADER.len(), rec.len())));
        }
        let num = |k: usize| -> Result<f64> {
            rec[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::data(Some(line), format!("bad {} {:?}", GAZE_HEADER[k], &rec[k])))
        };
        let duration_ms = num(2)?;
        if duration_ms <= 0.0 {
            return Err(Error::data(Some(line), format!("duration_ms must be positive, got {duration_ms}")));
        }
        let action = rec[4]
            .parse()
            .map_err(|_| Error::data(Some(line), format!("bad action {:?}", &rec[4])))?;
        out.push(GazeRecord {
            line,
            frame_id: rec[0].to_string(),
            episode_id: rec[1].to_string(),
            duration_ms,
            unclipped_reward: num(3)?,
            action,
            gaze_positions: parse_positions(&rec[5], line)?,
        });
    }
    Ok(out)
}

pub fn load_gaze_csv(path: &Path) -> Result<Vec<GazeRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_gaze_csv(std::io::BufReader::new(file))
}

/// Keeps at most `max_frames` rows of every episode, preserving order.
pub fn truncate_episodes(records: &[GazeRecord], max_frames: usize) -> Vec<GazeRecord> {
    let mut seen: Vec<(&str, usize)> = Vec::new();
    records
        .iter()
        .filter(|r| {
            let slot = match seen.iter().position(|(e, _)| *e == r.episode_id) {
                Some(i) => i,
                None => {
                    seen.push((&r.episode_id, 0));
                    seen.len() - 1
                }
            };
            seen[slot].1 += 1;
            seen[slot].1 <= max_frames
        })
        .cloned()
        .collect()
}

/// Every gaze sample with weight 1, so repeated samples at a point count as dwell.
pub fn gaze_fixations(records: &[GazeRecord]) -> Result<FixationSet> {
    let mut set = FixationSet::new();
    for r in records {
        for &(x, y) in &r.gaze_positions {
            set.push(x, y, 1.0)?;
        }
    }
    Ok(set)
}

pub fn gaze_histogram(records: &[GazeRecord]) -> Result<DurationHistogram> {
    let mut h = DurationHistogram::default();
    for r in records {
        h.add(r.duration_ms).map_err(|e| match e {
            Error::Data { message, .. } => Error::data(Some(r.line), message),
            other => other,
        })?;
    }
    Ok(h)
}
