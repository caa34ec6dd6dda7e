use std::path::{Path, PathBuf};

use crate::{CliError, CliResult, ExperimentConfig};

pub const CONFIG_FILE: &str = "config.txt";
pub const FORMATS_FILE: &str = "formats.txt";

/// Every artifact layout a command can emit, with its version.
pub const FORMATS: &str = "\
config.txt         config v1: one `section.key = value` per line
formats.txt        formats v1
model.ckpt         checkpoint CREYESQ1 v1: little-endian tensor shapes, then f32 parameters
metrics.csv        csv v1: step,loss,epsilon,mean_return
episode_*.csv      csv v1: step,game_tick,motor_action,effective_motor,sensory_cell,gaze_x_px,gaze_y_px,emma_time_ms,frame_duration_ms,score_delta,cumulative_score,paused,terminal
*histogram.csv     csv v1: bin_lo_ms,bin_hi_ms,count,mass (blank bin_hi_ms marks the open tail)
scanpath.csv       csv v1: episode,step,frame_index,cell,gaze_x_px,gaze_y_px,emma_time_ms
auc.csv            csv v1: predictor,auc
fixations.csv      csv v1: x_px,y_px,weight
grid_report.csv    csv v1: c_pause,c_sacc,distance,mean_score,pause_rate,best
*.pgm              binary PGM (P5), 8-bit, 84x84 maps or 168x84 overlays
summary.txt        text v1: one `key = value` per line
";

/// Creates the output directory and writes the resolved config and format list.
pub fn prepare(cfg: &ExperimentConfig) -> CliResult<PathBuf> {
    let dir = cfg.out.clone();
    std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
    write(&dir.join(CONFIG_FILE), cfg.to_text())?;
    write(&dir.join(FORMATS_FILE), FORMATS)?;
    Ok(dir)
}

pub fn write(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| io_error(path, e))
}

pub fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

/// `key = value` lines.
pub fn summary(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
