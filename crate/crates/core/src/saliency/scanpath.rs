use std::io::Write;

use crate::error::{Error, Result};
use crate::log::EpisodeLog;

pub const SCANPATH_HEADER: [&str; 6] = ["step", "frame_index", "cell", "gaze_x_px", "gaze_y_px", "emma_time_ms"];

#[derive(Clone, Debug, PartialEq)]
pub struct ScanpathEntry {
    pub step: u64,
    /// Index of the displayed frame; pause steps share it with the step before.
    pub frame_index: u64,
    pub cell: usize,
    pub gaze_px: (usize, usize),
    pub emma_time_ms: f64,
}

pub fn scanpath(log: &EpisodeLog) -> Vec<ScanpathEntry> {
    log.steps
        .iter()
        .map(|s| ScanpathEntry {
            step: s.step,
            frame_index: s.game_tick,
            cell: s.sensory_cell,
            gaze_px: (s.gaze_x_px, s.gaze_y_px),
            emma_time_ms: s.emma_time_ms,
        })
        .collect()
}

pub fn write_scanpath_csv<W: Write>(path: &[ScanpathEntry], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(SCANPATH_HEADER)?;
    for e in path {
        w.write_record([
            e.step.to_string(),
            e.frame_index.to_string(),
            e.cell.to_string(),
            e.gaze_px.0.to_string(),
            e.gaze_px.1.to_string(),
            e.emma_time_ms.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<scanpath>", e))?;
    Ok(())
}

/// Levenshtein distance between two cell sequences with unit costs.
pub fn aoi_edit_distance(a: &[usize], b: &[usize]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, &x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
