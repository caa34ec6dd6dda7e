//! Grid files list the penalty values to search:
//!
//! ```text
//! # pause penalty per PAUSE step
//! c_pause = 0, 0.05, 0.1
//! c_sacc  = 0.01
//! ```

use std::path::Path;

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub c_pause: Vec<f64>,
    pub c_sacc: Vec<f64>,
}

pub fn parse_grid(text: &str, source: &str) -> Result<GridSpec, CliError> {
    let mut c_pause = None;
    let mut c_sacc = None;
    for (i, raw) in text.lines().enumerate() {
        let at = |m: String| CliError::Usage(format!("{source}:{}: {m}", i + 1));
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, values) = line
            .split_once('=')
            .ok_or_else(|| at(format!("expected `c_pause = v1, v2, …`, got {line:?}")))?;
        let slot = match key.trim() {
            "c_pause" => &mut c_pause,
            "c_sacc" => &mut c_sacc,
            other => return Err(at(format!("unknown grid key {other:?}"))),
        };
        if slot.is_some() {
            return Err(at(format!("{} given twice", key.trim())));
        }
        let parsed = values
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite() && *x >= 0.0)
                    .ok_or_else(|| at(format!("{}: {v:?} is not a non-negative number", key.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if parsed.is_empty() {
            return Err(at(format!("{} has no values", key.trim())));
        }
        *slot = Some(parsed);
    }
    match (c_pause, c_sacc) {
        (Some(c_pause), Some(c_sacc)) => Ok(GridSpec { c_pause, c_sacc }),
        (None, _) => Err(CliError::Usage(format!("{source}: missing c_pause"))),
        (_, None) => Err(CliError::Usage(format!("{source}: missing c_sacc"))),
    }
}

pub fn load_grid(path: &Path) -> Result<GridSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read grid file {}: {e}", path.display())))?;
    parse_grid(&text, &path.display().to_string())
}
