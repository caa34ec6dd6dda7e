//! Evaluation analytics: fixation maps, the thresholded-agreement AUC,
//! frame-duration histograms, scanpaths and heatmap output.

mod gaze;
mod histogram;
mod scanpath;

use std::path::Path;

pub use gaze::{gaze_fixations, gaze_histogram, load_gaze_csv, read_gaze_csv, truncate_episodes, GazeRecord, GAZE_HEADER};
pub use histogram::{histogram_distance, DurationHistogram, HISTOGRAM_HEADER};
pub use scanpath::{aoi_edit_distance, scanpath, write_scanpath_csv, ScanpathEntry, SCANPATH_HEADER};

use crate::error::{Error, Result};
use crate::frame::{decode_pgm, encode_pgm, Frame, FRAME_SIZE};
use crate::log::EpisodeLog;

pub const MAP_PIXELS: usize = FRAME_SIZE * FRAME_SIZE;
pub const DEFAULT_RADIUS_PX: f64 = 2.0;

/// Gaze points in frame coordinates, each weighted by its dwell count.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FixationSet {
    points: Vec<(f64, f64, f64)>,
}

impl FixationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64, y: f64, weight: f64) -> Result<()> {
        let limit = FRAME_SIZE as f64;
        if !(0.0..limit).contains(&x) || !(0.0..limit).contains(&y) {
            return Err(Error::Domain(format!("fixation ({x}, {y}) outside the {FRAME_SIZE}x{FRAME_SIZE} frame")));
        }
        if !(weight > 0.0) {
            return Err(Error::Domain(format!("fixation weight must be positive, got {weight}")));
        }
        self.points.push((x, y, weight));
        Ok(())
    }

    /// One point per step of the log; consecutive steps at the same gaze merge into one dwell.
    pub fn from_log(log: &EpisodeLog) -> Self {
        let mut set = Self::new();
        for s in &log.steps {
            let (x, y) = (s.gaze_x_px as f64, s.gaze_y_px as f64);
            match set.points.last_mut() {
                Some(last) if last.0 == x && last.1 == y => last.2 += 1.0,
                _ => set.points.push((x, y, 1.0)),
            }
        }
        set
    }

    pub fn extend(&mut self, other: &FixationSet) {
        self.points.extend_from_slice(&other.points);
    }

    pub fn points(&self) -> &[(f64, f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.2).sum()
    }
}

/// 84×84 map of 0/1 values, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryFixationMap {
    values: Vec<u8>,
}

impl BinaryFixationMap {
    pub fn from_values(values: Vec<u8>) -> Result<Self> {
        if values.len() != MAP_PIXELS || values.iter().any(|&v| v > 1) {
            return Err(Error::Usage(format!("binary map needs {MAP_PIXELS} values in {{0,1}}")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.values[y * FRAME_SIZE + x]
    }

    pub fn count_ones(&self) -> usize {
        self.values.iter().map(|&v| v as usize).sum()
    }

    pub fn to_saliency(&self) -> SaliencyMap {
        SaliencyMap {
            values: self.values.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

/// 84×84 map of values in [0, 1], row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SaliencyMap {
    values: Vec<f64>,
}

impl SaliencyMap {
    pub fn zeros() -> Self {
        Self { values: vec![0.0; MAP_PIXELS] }
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() != MAP_PIXELS {
            return Err(Error::Usage(format!("saliency map needs {MAP_PIXELS} values, got {}", values.len())));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Domain("saliency values must lie in [0, 1]".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * FRAME_SIZE + x]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.values.iter().map(|v| (255.0 * v).round() as u8).collect()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_values(bytes.iter().map(|&b| f64::from(b) / 255.0).collect())
    }
}

/// Marks every pixel within `radius_px` (Euclidean) of a fixation.
pub fn binarize_fixations(fixations: &FixationSet, radius_px: f64) -> BinaryFixationMap {
    let mut values = vec![0u8; MAP_PIXELS];
    let r2 = radius_px * radius_px;
    let reach = radius_px.max(0.0).ceil() as i64 + 1;
    for &(fx, fy, _) in &fixations.points {
        let (cx, cy) = (fx.round() as i64, fy.round() as i64);
        for y in (cy - reach).max(0)..=(cy + reach).min(FRAME_SIZE as i64 - 1) {
            for x in (cx - reach).max(0)..=(cx + reach).min(FRAME_SIZE as i64 - 1) {
                let (dx, dy) = (x as f64 - fx, y as f64 - fy);
                if dx * dx + dy * dy <= r2 {
                    values[y as usize * FRAME_SIZE + x as usize] = 1;
                }
            }
        }
    }
    BinaryFixationMap { values }
}

/// Weighted sum of isotropic Gaussians at the fixations, scaled to a peak of 1.
pub fn make_saliency(fixations: &FixationSet, sigma_px: f64) -> Result<SaliencyMap> {
    if !(sigma_px > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma_px}")));
    }
    let mut values = vec![0.0; MAP_PIXELS];
    let denom = 2.0 * sigma_px * sigma_px;
    for &(fx, fy, w) in &fixations.points {
        for y in 0..FRAME_SIZE {
            let dy = y as f64 - fy;
            for x in 0..FRAME_SIZE {
                let dx = x as f64 - fx;
                values[y * FRAME_SIZE + x] += w * (-(dx * dx + dy * dy) / denom).exp();
            }
        }
    }
    let peak = values.iter().copied().fold(0.0, f64::max);
    if peak > 0.0 {
        values.iter_mut().for_each(|v| *v /= peak);
    }
    Ok(SaliencyMap { values })
}

/// `∫₀¹ (1/n) Σᵢ 1(yᵢ = 1(ŷᵢ ≥ t)) dt`, integrated exactly.
///
/// The agreement count is piecewise constant in `t` and only changes at the
/// distinct values of `ŷ`, so the integral is a finite sum over those breakpoints.
pub fn auc(y: &[u8], y_hat: &[f64]) -> Result<f64> {
    if y.len() != y_hat.len() {
        return Err(Error::Usage(format!("map sizes differ: {} vs {}", y.len(), y_hat.len())));
    }
    if y.is_empty() {
        return Err(Error::Usage("empty maps".into()));
    }
    let mut pts: Vec<(f64, u8)> = y_hat.iter().map(|&v| v.clamp(0.0, 1.0)).zip(y.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Just above t = 0 every pixel predicts 1, so agreement = number of positives.
    let mut agree = y.iter().filter(|&&v| v == 1).count() as i64;
    let mut prev_t = 0.0;
    let mut area = 0.0;
    let mut i = 0;
    while i < pts.len() {
        let t = pts[i].0;
        area += agree as f64 * (t - prev_t);
        // for thresholds above t, these pixels predict 0
        while i < pts.len() && pts[i].0 == t {
            agree += if pts[i].1 == 1 { -1 } else { 1 };
            i += 1;
        }
        prev_t = t;
    }
    area += agree as f64 * (1.0 - prev_t);
    Ok(area / y.len() as f64)
}

pub fn auc_maps(y: &BinaryFixationMap, y_hat: &SaliencyMap) -> Result<f64> {
    auc(&y.values, &y_hat.values)
}

pub fn render_heatmap(map: &SaliencyMap, path: &Path) -> Result<()> {
    crate::frame::write_pgm(path, FRAME_SIZE, FRAME_SIZE, &map.to_bytes())
}

/// Writes the frame and the heatmap side by side as one 168×84 image.
pub fn render_overlay(map: &SaliencyMap, frame: &Frame, path: &Path) -> Result<()> {
    let heat = map.to_bytes();
    let mut data = Vec::with_capacity(2 * MAP_PIXELS);
    for y in 0..FRAME_SIZE {
        data.extend_from_slice(&frame.pixels()[y * FRAME_SIZE..(y + 1) * FRAME_SIZE]);
        data.extend_from_slice(&heat[y * FRAME_SIZE..(y + 1) * FRAME_SIZE]);
    }
    crate::frame::write_pgm(path, 2 * FRAME_SIZE, FRAME_SIZE, &data)
}

pub fn heatmap_bytes(map: &SaliencyMap) -> Vec<u8> {
    encode_pgm(FRAME_SIZE, FRAME_SIZE, &map.to_bytes())
}

pub fn read_heatmap(path: &Path) -> Result<SaliencyMap> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let (w, h, data) = decode_pgm(&bytes)?;
    if (w, h) != (FRAME_SIZE, FRAME_SIZE) {
        return Err(Error::data(None, format!("heatmap is {w}x{h}, expected {FRAME_SIZE}x{FRAME_SIZE}")));
    }
    SaliencyMap::from_bytes(&data)
}
