//! Deterministic EMMA timing: saccade preparation and execution followed by
//! visual encoding at the new fixation.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmmaParams {
    /// Encoding scale `K`, seconds.
    pub encoding_scale: f64,
    /// Eccentricity exponent `k`, per degree.
    pub eccentricity_exp: f64,
    pub t_prep: f64,
    pub t_exec_base: f64,
    pub t_exec_per_deg: f64,
    /// Object frequency `f` in (0, 1].
    pub object_frequency: f64,
    pub px_per_deg: f64,
}

impl Default for EmmaParams {
    fn default() -> Self {
        Self {
            encoding_scale: 0.006,
            eccentricity_exp: 0.4,
            t_prep: 0.135,
            t_exec_base: 0.070,
            t_exec_per_deg: 0.002,
            object_frequency: 0.1,
            px_per_deg: 3.0,
        }
    }
}

impl EmmaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.encoding_scale > 0.0) {
            return Err(Error::Config("emma.encoding_scale must be > 0".into()));
        }
        if !(self.eccentricity_exp >= 0.0) {
            return Err(Error::Config("emma.eccentricity_exp must be >= 0".into()));
        }
        if !(self.object_frequency > 0.0 && self.object_frequency <= 1.0) {
            return Err(Error::Config("emma.object_frequency must lie in (0, 1]".into()));
        }
        if !(self.px_per_deg > 0.0) {
            return Err(Error::Config("emma.px_per_deg must be > 0".into()));
        }
        for (name, t) in [
            ("emma.t_prep", self.t_prep),
            ("emma.t_exec_base", self.t_exec_base),
            ("emma.t_exec_per_deg", self.t_exec_per_deg),
        ] {
            if !(t >= 0.0) {
                return Err(Error::Config(format!("{name} must be >= 0")));
            }
        }
        Ok(())
    }
}

pub fn eccentricity_deg(from: (usize, usize), to: (usize, usize), params: &EmmaParams) -> f64 {
    let dx = from.0 as f64 - to.0 as f64;
    let dy = from.1 as f64 - to.1 as f64;
    dx.hypot(dy) / params.px_per_deg
}

/// `K · (−ln f) · e^{k·ecc}`.
pub fn encoding_time(frequency: f64, ecc_deg: f64, params: &EmmaParams) -> Result<f64> {
    if !(frequency > 0.0 && frequency <= 1.0) {
        return Err(Error::Domain(format!("object frequency {frequency} outside (0, 1]")));
    }
    Ok(params.encoding_scale * -frequency.ln() * (params.eccentricity_exp * ecc_deg).exp())
}

/// Preparation plus execution; zero when no eye movement is needed.
pub fn saccade_time(ecc_deg: f64, params: &EmmaParams) -> f64 {
    if ecc_deg > 0.0 {
        params.t_prep + params.t_exec_base + params.t_exec_per_deg * ecc_deg
    } else {
        0.0
    }
}

/// Time to move the eyes from `from` to `to` and encode the new fixation, in seconds.
pub fn gaze_shift_time(from: (usize, usize), to: (usize, usize), params: &EmmaParams) -> f64 {
    let ecc = eccentricity_deg(from, to, params);
    // post-saccade encoding happens at the fovea; f was validated with the params
    let encode = params.encoding_scale * -params.object_frequency.ln();
    saccade_time(ecc, params) + encode
}
