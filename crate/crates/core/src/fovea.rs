//! Foveated perception: a 5×5 grid of gaze cells, square patches centred on the
//! chosen cell, and a FIFO memory of the last `n` patches pasted at their
//! screen locations.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::frame::{Frame, FRAME_PIXELS, FRAME_SIZE};

pub const GRID_CELLS: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SensoryAction(u8);

impl SensoryAction {
    pub fn new(cell: usize) -> Result<Self> {
        if cell < GRID_CELLS {
            Ok(Self(cell as u8))
        } else {
            Err(Error::Usage(format!("sensory cell {cell} outside 0..{GRID_CELLS}")))
        }
    }

    /// Screen centre cell; used as the initial fixation.
    pub const CENTER: SensoryAction = SensoryAction(12);

    pub fn index(self) -> usize {
        usize::from(self.0)
    }

    pub fn row(self) -> usize {
        self.index() / 5
    }

    pub fn col(self) -> usize {
        self.index() % 5
    }

    pub fn all() -> impl Iterator<Item = SensoryAction> {
        (0..GRID_CELLS as u8).map(SensoryAction)
    }
}

impl fmt::Display for SensoryAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FoveaConfig {
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub patch_size: usize,
    pub frame_size: usize,
    pub memory_depth: usize,
}

impl Default for FoveaConfig {
    fn default() -> Self {
        Self {
            grid_rows: 5,
            grid_cols: 5,
            patch_size: 20,
            frame_size: FRAME_SIZE,
            memory_depth: 4,
        }
    }
}

impl FoveaConfig {
    /// Patch covering the whole screen with a single-layer memory.
    pub fn full_frame() -> Self {
        Self {
            patch_size: FRAME_SIZE,
            memory_depth: 1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_rows != 5 || self.grid_cols != 5 {
            return Err(Error::Config("fovea.grid_rows and fovea.grid_cols must both be 5".into()));
        }
        if self.frame_size != FRAME_SIZE {
            return Err(Error::Config(format!("fovea.frame_size must be {FRAME_SIZE}")));
        }
        let min = FRAME_SIZE.div_ceil(5);
        if self.patch_size < min || self.patch_size > FRAME_SIZE {
            return Err(Error::Config(format!(
                "fovea.patch_size must lie in [{min}, {FRAME_SIZE}], got {}",
                self.patch_size
            )));
        }
        if self.memory_depth < 1 {
            return Err(Error::Config("fovea.memory_depth must be >= 1".into()));
        }
        Ok(())
    }

    pub fn is_full_frame(&self) -> bool {
        self.patch_size >= FRAME_SIZE
    }
}

/// Pixel centre of a gaze cell: `round((col + 0.5)·84/5)`, same for rows.
pub fn cell_center(cell: SensoryAction) -> (usize, usize) {
    let pitch = FRAME_SIZE as f64 / 5.0;
    let c = |i: usize| ((i as f64 + 0.5) * pitch).round() as usize;
    (c(cell.col()), c(cell.row()))
}

/// Checked variant for raw indices.
pub fn cell_center_of(cell: usize) -> Result<(usize, usize)> {
    Ok(cell_center(SensoryAction::new(cell)?))
}

/// Top-left corner of the patch window. A full-frame patch is pinned to the
/// screen origin regardless of the cell so it always shows the whole frame.
pub fn window_origin(cell: SensoryAction, config: &FoveaConfig) -> (i32, i32) {
    if config.is_full_frame() {
        return (0, 0);
    }
    let (cx, cy) = cell_center(cell);
    let half = (config.patch_size / 2) as i32;
    (cx as i32 - half, cy as i32 - half)
}

/// A foveal window of normalized intensities; off-screen pixels are zero.
#[derive(Clone, PartialEq)]
pub struct Patch {
    cell: SensoryAction,
    x0: i32,
    y0: i32,
    size: usize,
    values: Vec<f32>,
}

impl fmt::Debug for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Patch(cell {}, origin ({}, {}), {}px)", self.cell, self.x0, self.y0, self.size)
    }
}

impl Patch {
    pub fn cell(&self) -> SensoryAction {
        self.cell
    }

    pub fn origin(&self) -> (i32, i32) {
        (self.x0, self.y0)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Value at patch-local `(px, py)`.
    pub fn get(&self, px: usize, py: usize) -> f32 {
        self.values[py * self.size + px]
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    /// On-screen pixel rectangle covered by the window, `[x0, x1) × [y0, y1)`.
    pub fn screen_bounds(&self) -> (usize, usize, usize, usize) {
        let clip = |v: i32| v.clamp(0, FRAME_SIZE as i32) as usize;
        let s = self.size as i32;
        (clip(self.x0), clip(self.x0 + s), clip(self.y0), clip(self.y0 + s))
    }

    /// Screen value at `(x, y)` if the window covers it.
    pub fn at_screen(&self, x: usize, y: usize) -> Option<f32> {
        let px = x as i32 - self.x0;
        let py = y as i32 - self.y0;
        let s = self.size as i32;
        if (0..s).contains(&px) && (0..s).contains(&py) {
            Some(self.get(px as usize, py as usize))
        } else {
            None
        }
    }

    /// Paste onto a black 84×84 canvas, clipped at the screen edges.
    pub fn paste_dense(&self, out: &mut [f32]) {
        debug_assert_eq!(out.len(), FRAME_PIXELS);
        let (x0, x1, y0, y1) = self.screen_bounds();
        for y in y0..y1 {
            let py = (y as i32 - self.y0) as usize;
            for x in x0..x1 {
                let px = (x as i32 - self.x0) as usize;
                out[y * FRAME_SIZE + x] = self.values[py * self.size + px];
            }
        }
    }
}

pub fn extract_patch(frame: &Frame, cell: SensoryAction, config: &FoveaConfig) -> Patch {
    let size = config.patch_size;
    let (x0, y0) = window_origin(cell, config);
    let mut values = vec![0.0f32; size * size];
    for py in 0..size {
        let y = y0 + py as i32;
        if !(0..FRAME_SIZE as i32).contains(&y) {
            continue;
        }
        for px in 0..size {
            let x = x0 + px as i32;
            if (0..FRAME_SIZE as i32).contains(&x) {
                values[py * size + px] = f32::from(frame.get(x as usize, y as usize)) / 255.0;
            }
        }
    }
    Patch {
        cell,
        x0,
        y0,
        size,
        values,
    }
}

/// The agent's observation: `depth` layers, layer 0 the most recent. A layer
/// is either empty (all black) or holds exactly one patch at its window.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationCanvas {
    layers: VecDeque<Option<Patch>>,
}

impl ObservationCanvas {
    pub fn empty(depth: usize) -> Self {
        Self {
            layers: std::iter::repeat_with(|| None).take(depth).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, i: usize) -> Option<&Patch> {
        self.layers.get(i).and_then(Option::as_ref)
    }

    /// Gaze cell recorded for layer `i`, if it holds a patch.
    pub fn layer_cell(&self, i: usize) -> Option<SensoryAction> {
        self.layer(i).map(Patch::cell)
    }

    pub fn layers(&self) -> impl Iterator<Item = Option<&Patch>> {
        self.layers.iter().map(Option::as_ref)
    }

    pub fn layer_dense(&self, i: usize) -> Vec<f32> {
        let mut out = vec![0.0; FRAME_PIXELS];
        if let Some(p) = self.layer(i) {
            p.paste_dense(&mut out);
        }
        out
    }

    /// Layers concatenated as `depth × 84 × 84`, row-major.
    pub fn to_dense(&self) -> Vec<f32> {
        let mut out = vec![0.0; self.depth() * FRAME_PIXELS];
        for (i, p) in self.layers.iter().enumerate() {
            if let Some(p) = p {
                p.paste_dense(&mut out[i * FRAME_PIXELS..(i + 1) * FRAME_PIXELS]);
            }
        }
        out
    }

    /// Debug export: layers side by side as one P5 image.
    pub fn to_pgm(&self) -> Vec<u8> {
        let w = FRAME_SIZE * self.depth();
        let mut raster = vec![0u8; w * FRAME_SIZE];
        for i in 0..self.depth() {
            let layer = self.layer_dense(i);
            for y in 0..FRAME_SIZE {
                for x in 0..FRAME_SIZE {
                    raster[y * w + i * FRAME_SIZE + x] = (layer[y * FRAME_SIZE + x] * 255.0).round() as u8;
                }
            }
        }
        crate::frame::encode_pgm(w, FRAME_SIZE, &raster)
    }
}

/// Pushes `patch` as the new layer 0 and drops the oldest layer.
pub fn update_memory(memory: &mut ObservationCanvas, patch: Patch) {
    memory.layers.pop_back();
    memory.layers.push_front(Some(patch));
}

/// Extracts the patch at `cell`, integrates it into `memory`, and returns the
/// gaze point in pixels.
pub fn observe(
    frame: &Frame,
    cell: SensoryAction,
    memory: &mut ObservationCanvas,
    config: &FoveaConfig,
) -> (usize, usize) {
    update_memory(memory, extract_patch(frame, cell, config));
    cell_center(cell)
}
