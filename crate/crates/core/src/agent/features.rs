//! Fixed feature basis for the linear Q-network.
//!
//! Per memory layer, from a 5×5 grid of cells tiling the 80×80 playfield both
//! games draw into (16 px cells inside a 2 px border; the border pixels join
//! the outermost cells):
//!
//! * occupancy: for every cell, the fraction of its *visible* pixels whose
//!   intensity falls into each of [`BANDS`] equal-width bands over (0, 1], so
//!   an object seen only as a sliver at the window edge still reads as 1;
//! * gaze: a one-hot of the cell the layer was taken at, so an empty glimpse
//!   still tells the network where it looked;
//! * co-occurrence: for every pair of occupied (cell, band) entries, the
//!   product of their occupancies binned by band pair and cell offset, one
//!   table per unordered pair of layers.
//!
//! On top of that, a summary of the freshest sighting of each band: its
//! occupancy, a one-hot of the layer it came from, and one co-occurrence table
//! over those sightings alone. Stale copies of a moving object then stop
//! blurring where it was last seen.
//!
//! The co-occurrence tables are translation invariant, so relations such as
//! "band 2 lies one cell right of band 4" get one weight wherever they occur.

use std::collections::BTreeMap;

use crate::fovea::{ObservationCanvas, Patch, GRID_CELLS};
use crate::frame::FRAME_SIZE;

pub const BANDS: usize = 5;
pub const FEATURES_PER_LAYER: usize = GRID_CELLS * BANDS;
/// Row and column offsets between cells span -4..=4.
const OFFSETS: usize = 9;
pub const COOC_PER_PAIR: usize = BANDS * BANDS * OFFSETS * OFFSETS;

fn layer_pairs(depth: usize) -> usize {
    depth * (depth + 1) / 2
}

pub fn feature_len(depth: usize) -> usize {
    depth * (FEATURES_PER_LAYER + GRID_CELLS)
        + layer_pairs(depth) * COOC_PER_PAIR
        + FEATURES_PER_LAYER
        + BANDS * depth
        + COOC_PER_PAIR
}

/// Index of the unordered layer pair `(a, b)` with `a <= b`, enumerated
/// (0,0), (0,1), …, (0,d-1), (1,1), …
fn pair_index(depth: usize, a: usize, b: usize) -> usize {
    a * depth - a * a.saturating_sub(1) / 2 + (b - a)
}

const BORDER_PX: usize = 2;
const CELL_PX: usize = 16;

/// Pixel bounds of grid row/column `i`; the outer cells absorb the border.
pub fn cell_span(i: usize) -> (usize, usize) {
    let lo = if i == 0 { 0 } else { BORDER_PX + CELL_PX * i };
    let hi = if i == 4 { FRAME_SIZE } else { BORDER_PX + CELL_PX * (i + 1) };
    (lo, hi)
}

fn cell_of_pixel(p: usize) -> usize {
    (p.saturating_sub(BORDER_PX) / CELL_PX).min(4)
}

pub fn band_of(v: f32) -> Option<usize> {
    if v > 0.0 {
        Some(((v * BANDS as f32) as usize).min(BANDS - 1))
    } else {
        None
    }
}

/// Occupancy block only: `depth × 25 × BANDS` values, layer-major.
pub fn occupancy_features(canvas: &ObservationCanvas) -> Vec<f64> {
    let mut out = vec![0.0; canvas.depth() * FEATURES_PER_LAYER];
    for (layer, patch) in canvas.layers().enumerate() {
        if let Some(patch) = patch {
            layer_occupancy(patch, &mut out[layer * FEATURES_PER_LAYER..(layer + 1) * FEATURES_PER_LAYER]);
        }
    }
    out
}

fn layer_occupancy(patch: &Patch, out: &mut [f64]) {
    let (x0, x1, y0, y1) = patch.screen_bounds();
    let (ox, oy) = patch.origin();
    let mut visible = [0u32; GRID_CELLS];
    for y in y0..y1 {
        let row = cell_of_pixel(y);
        let py = (y as i32 - oy) as usize;
        for x in x0..x1 {
            let px = (x as i32 - ox) as usize;
            let cell = row * 5 + cell_of_pixel(x);
            visible[cell] += 1;
            if let Some(b) = band_of(patch.get(px, py)) {
                out[cell * BANDS + b] += 1.0;
            }
        }
    }
    for (bands, &n) in out.chunks_exact_mut(BANDS).zip(&visible) {
        if n > 0 {
            bands.iter_mut().for_each(|v| *v /= f64::from(n));
        }
    }
}

/// The full sparse basis described in the module docs.
pub fn linear_features(canvas: &ObservationCanvas) -> SparseFeatures {
    let depth = canvas.depth();
    let len = feature_len(depth);
    let gaze_base = depth * FEATURES_PER_LAYER;
    let cooc_base = gaze_base + depth * GRID_CELLS;
    let mut entries = Vec::new();
    // occupied (cell, band, value) per layer
    let mut occupied: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); depth];
    let mut occ = [0.0; FEATURES_PER_LAYER];
    for (layer, patch) in canvas.layers().enumerate() {
        let Some(patch) = patch else { continue };
        occ.fill(0.0);
        layer_occupancy(patch, &mut occ);
        for (i, &v) in occ.iter().enumerate() {
            if v != 0.0 {
                entries.push((layer * FEATURES_PER_LAYER + i, v));
                occupied[layer].push((i / BANDS, i % BANDS, v));
            }
        }
        entries.push((gaze_base + layer * GRID_CELLS + patch.cell().index(), 1.0));
    }

    let fresh_base = cooc_base + layer_pairs(depth) * COOC_PER_PAIR;
    let age_base = fresh_base + FEATURES_PER_LAYER;
    let fresh_cooc_base = age_base + BANDS * depth;
    let mut fresh = Vec::new();
    for band in 0..BANDS {
        let Some(layer) = (0..depth).find(|&l| occupied[l].iter().any(|e| e.1 == band)) else {
            continue;
        };
        entries.push((age_base + band * depth + layer, 1.0));
        for &(cell, b, v) in occupied[layer].iter().filter(|e| e.1 == band) {
            entries.push((fresh_base + cell * BANDS + b, v));
            fresh.push((cell, b, v));
        }
    }

    let mut cooc: BTreeMap<usize, f64> = BTreeMap::new();
    for (i, &(ca, ba, va)) in fresh.iter().enumerate() {
        for (j, &(cb, bb, vb)) in fresh.iter().enumerate() {
            if i != j {
                *cooc.entry(fresh_cooc_base + offset_bin(ca, ba, cb, bb)).or_insert(0.0) += va * vb;
            }
        }
    }
    for a in 0..depth {
        for b in a..depth {
            let base = cooc_base + pair_index(depth, a, b) * COOC_PER_PAIR;
            for (i, &(ca, ba, va)) in occupied[a].iter().enumerate() {
                for (j, &(cb, bb, vb)) in occupied[b].iter().enumerate() {
                    if a == b && i == j {
                        continue;
                    }
                    *cooc.entry(base + offset_bin(ca, ba, cb, bb)).or_insert(0.0) += va * vb;
                }
            }
        }
    }
    entries.extend(cooc);
    SparseFeatures { len, entries }
}

/// Slot of the (band pair, cell offset) bin within one co-occurrence table.
fn offset_bin(ca: usize, ba: usize, cb: usize, bb: usize) -> usize {
    let dr = cb / 5 + 4 - ca / 5;
    let dc = cb % 5 + 4 - ca % 5;
    ((ba * BANDS + bb) * OFFSETS + dr) * OFFSETS + dc
}

/// Sparse feature vector: `len` slots, listed entries nonzero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseFeatures {
    pub len: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseFeatures {
    pub fn from_dense(dense: &[f64]) -> Self {
        Self {
            len: dense.len(),
            entries: dense.iter().copied().enumerate().filter(|&(_, v)| v != 0.0).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        for &(i, v) in &self.entries {
            out[i] += v;
        }
        out
    }
}
