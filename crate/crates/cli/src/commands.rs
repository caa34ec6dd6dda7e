//! Command implementations. Each writes its artifacts plus `config.txt` and
//! `formats.txt` into the configured output directory.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use creyes_core::agent::{
    checkpoint, derive_seed, grid_search_with, run_episode, GridSearch, QNetwork, QNetworkSpec, Trainer,
    METRICS_HEADER,
};
use creyes_core::env::reset;
use creyes_core::log::EpisodeLog;
use creyes_core::saliency::{
    auc_maps, binarize_fixations, gaze_fixations, gaze_histogram, histogram_distance, load_gaze_csv, make_saliency,
    render_heatmap, render_overlay, scanpath, truncate_episodes, DurationHistogram, FixationSet, GazeRecord,
    SaliencyMap, GAZE_HEADER,
};

use crate::grid_file::load_grid;
use crate::output::{self, io_error, summary};
use crate::{CliError, CliResult, ExperimentConfig};

/// Base seed of evaluation episodes, kept apart from the training episode seeds.
pub fn eval_base_seed(seed: u64) -> u64 {
    derive_seed(seed, u64::MAX)
}

/// World and policy seed of evaluation episode `i`.
pub fn eval_episode_seed(seed: u64, i: usize) -> u64 {
    derive_seed(eval_base_seed(seed), i as u64)
}

pub fn episode_file_name(i: usize) -> String {
    format!("episode_{i:04}.csv")
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn train(cfg: &ExperimentConfig) -> CliResult<()> {
    cfg.validate()?;
    let dir = output::prepare(cfg)?;
    let metrics_path = dir.join("metrics.csv");
    let file = std::fs::File::create(&metrics_path).map_err(|e| io_error(&metrics_path, e))?;
    let mut metrics = std::io::BufWriter::new(file);
    writeln!(metrics, "{METRICS_HEADER}").map_err(|e| io_error(&metrics_path, e))?;

    let mut trainer = Trainer::new(cfg.loop_config(), cfg.train_config())?;
    let mut write_err = None;
    let mut last_return = None;
    trainer.run(|row| {
        last_return = Some(row.mean_return);
        if write_err.is_none() {
            write_err = writeln!(metrics, "{}", row.to_csv()).err();
        }
    })?;
    if let Some(e) = write_err {
        return Err(io_error(&metrics_path, e));
    }
    metrics.flush().map_err(|e| io_error(&metrics_path, e))?;

    let ckpt = dir.join("model.ckpt");
    checkpoint::save(trainer.network(), &ckpt)?;
    output::write(
        &dir.join("summary.txt"),
        summary(&[
            ("env_steps", trainer.env_steps().to_string()),
            ("train_steps", trainer.train_steps().to_string()),
            ("episodes", trainer.episodes().to_string()),
            ("final_epsilon", trainer.epsilon().to_string()),
            ("mean_return_last_20", last_return.map(|r| r.to_string()).unwrap_or_default()),
        ]),
    )?;
    eprintln!(
        "trained {} steps over {} episodes; checkpoint {}",
        trainer.env_steps(),
        trainer.episodes(),
        ckpt.display()
    );
    Ok(())
}

/// Loads a checkpoint and checks it fits the configured network and memory depth.
pub fn load_checkpoint(cfg: &ExperimentConfig, path: &Path) -> CliResult<QNetwork> {
    let net = checkpoint::load(path)?;
    let want = QNetworkSpec::new(cfg.train.network, cfg.fovea.memory_depth);
    if net.spec() != want {
        return Err(CliError::Usage(format!(
            "{}: checkpoint holds a {} network over {} memory layers, config expects {} over {}",
            path.display(),
            net.spec().kind.name(),
            net.spec().memory_depth,
            want.kind.name(),
            want.memory_depth
        )));
    }
    Ok(net)
}

pub fn rollout(cfg: &ExperimentConfig, checkpoint_path: &Path) -> CliResult<()> {
    cfg.validate()?;
    let net = load_checkpoint(cfg, checkpoint_path)?;
    let dir = output::prepare(cfg)?;
    if cfg.eval.episodes == 0 {
        return Ok(());
    }
    let loop_cfg = cfg.loop_config();
    let mut lines = String::new();
    let (mut scores, mut pauses, mut steps) = (Vec::new(), 0usize, 0usize);
    for i in 0..cfg.eval.episodes {
        let log = run_episode(&loop_cfg, &net, cfg.eval.epsilon, eval_episode_seed(cfg.seed, i))?;
        let name = episode_file_name(i);
        log.save(&dir.join(&name))?;
        let _ = writeln!(
            lines,
            "{name} = score {} steps {} pauses {}",
            log.final_score(),
            log.len(),
            log.pause_count()
        );
        scores.push(log.final_score() as f64);
        pauses += log.pause_count();
        steps += log.len();
    }
    let mut text = summary(&[
        ("episodes", cfg.eval.episodes.to_string()),
        ("pausing", cfg.pausing.to_string()),
        ("epsilon", cfg.eval.epsilon.to_string()),
        ("mean_score", mean(scores.iter().copied()).to_string()),
        ("max_score", scores.iter().copied().fold(f64::NEG_INFINITY, f64::max).to_string()),
        ("pause_rate", (pauses as f64 / steps.max(1) as f64).to_string()),
    ]);
    text.push_str(&lines);
    output::write(&dir.join("summary.txt"), text)?;
    eprintln!("wrote {} episode logs to {}", cfg.eval.episodes, dir.display());
    Ok(())
}

/// Files named by `paths`, with each directory replaced by its sorted `episode_*.csv` files.
fn expand_logs(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = std::fs::read_dir(p).map_err(|e| io_error(p, e))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with("episode_") && n.ends_with(".csv"))
                })
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn load_all<T>(files: &[PathBuf], load: impl Fn(&Path) -> creyes_core::Result<T>) -> CliResult<Vec<T>> {
    let mut loaded = Vec::new();
    let mut failures = Vec::new();
    for f in files {
        match load(f) {
            Ok(v) => loaded.push(v),
            Err(creyes_core::Error::Io { source, .. }) => failures.push(format!("  {}: {source}", f.display())),
            Err(e) => failures.push(format!("  {}: {e}", f.display())),
        }
    }
    if !failures.is_empty() {
        return Err(CliError::Runtime(format!("unreadable logs:\n{}", failures.join("\n"))));
    }
    Ok(loaded)
}

/// Keeps the steps up to and including the one that completes the `frames`-th displayed frame.
pub fn truncate_log(log: &EpisodeLog, frames: usize) -> EpisodeLog {
    let mut shown = 0;
    let mut steps = Vec::new();
    for s in &log.steps {
        if shown >= frames {
            break;
        }
        if s.frame_duration_ms.is_some() {
            shown += 1;
        }
        steps.push(s.clone());
    }
    EpisodeLog { steps }
}

enum Reference {
    Logs(Vec<EpisodeLog>),
    Gaze(Vec<GazeRecord>),
}

fn is_gaze_file(path: &Path) -> CliResult<bool> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("unreadable logs:\n  {}: {e}", path.display())))?;
    let first = text.lines().next().unwrap_or("");
    Ok(first.split(',').next().map(str::trim) == Some(GAZE_HEADER[0]))
}

fn load_reference(paths: &[PathBuf]) -> CliResult<Reference> {
    let files = expand_logs(paths)?;
    let mut gaze = Vec::new();
    let mut log_files = Vec::new();
    for f in &files {
        if is_gaze_file(f)? {
            gaze.push(f.clone());
        } else {
            log_files.push(f.clone());
        }
    }
    match (gaze.is_empty(), log_files.is_empty()) {
        (true, _) => Ok(Reference::Logs(load_all(&log_files, EpisodeLog::load)?)),
        (false, true) => Ok(Reference::Gaze(load_all(&gaze, load_gaze_csv)?.concat())),
        (false, false) => Err(CliError::Usage(
            "reference mixes gaze logs and episode logs; pass one kind".into(),
        )),
    }
}

fn write_map(dir: &Path, name: &str, map: &SaliencyMap) -> CliResult<()> {
    render_heatmap(map, &dir.join(name))?;
    Ok(())
}

pub fn eval(cfg: &ExperimentConfig, logs: &[PathBuf], reference: &[PathBuf], truncate: bool) -> CliResult<()> {
    cfg.validate()?;
    let files = expand_logs(logs)?;
    if files.is_empty() {
        return Err(CliError::Usage("eval needs at least one agent episode log".into()));
    }
    let agent = load_all(&files, EpisodeLog::load)?;
    let reference = if reference.is_empty() {
        None
    } else {
        Some(load_reference(reference)?)
    };
    let dir = output::prepare(cfg)?;

    let mut histogram = DurationHistogram::default();
    let mut fixations = FixationSet::new();
    let mut scan = String::from("episode,step,frame_index,cell,gaze_x_px,gaze_y_px,emma_time_ms\n");
    for (i, log) in agent.iter().enumerate() {
        histogram.merge(&DurationHistogram::from_log(log)?)?;
        fixations.extend(&FixationSet::from_log(log));
        for e in scanpath(log) {
            let _ = writeln!(
                scan,
                "{i},{},{},{},{},{},{}",
                e.step, e.frame_index, e.cell, e.gaze_px.0, e.gaze_px.1, e.emma_time_ms
            );
        }
    }
    histogram.save(&dir.join("histogram.csv"))?;
    output::write(&dir.join("scanpath.csv"), scan)?;

    let agent_binary = binarize_fixations(&fixations, cfg.eval.radius_px);
    let agent_saliency = make_saliency(&fixations, cfg.eval.sigma_px)?;
    write_map(&dir, "fixation_map.pgm", &agent_binary.to_saliency())?;
    write_map(&dir, "saliency.pgm", &agent_saliency)?;
    let (_, first_frame) = reset(cfg.game, eval_base_seed(cfg.seed))?;
    render_overlay(&agent_saliency, &first_frame, &dir.join("overlay.pgm"))?;

    let scores: Vec<f64> = agent.iter().map(|l| l.final_score() as f64).collect();
    let frames: Vec<f64> = agent.iter().map(|l| l.frame_durations().count() as f64).collect();
    let mean_frames = mean(frames.iter().copied());
    let steps: usize = agent.iter().map(EpisodeLog::len).sum();
    let pauses: usize = agent.iter().map(EpisodeLog::pause_count).sum();
    let mut pairs = vec![
        ("episodes", agent.len().to_string()),
        ("mean_score", mean(scores.iter().copied()).to_string()),
        ("max_score", scores.iter().copied().fold(f64::NEG_INFINITY, f64::max).to_string()),
        ("mean_frames", mean_frames.to_string()),
        ("pause_rate", (pauses as f64 / steps.max(1) as f64).to_string()),
        ("frames", histogram.total().to_string()),
    ];

    if let Some(reference) = reference {
        let keep = mean_frames.round() as usize;
        let (ref_fix, ref_hist) = match reference {
            Reference::Logs(logs) => {
                let logs: Vec<EpisodeLog> = if truncate {
                    logs.iter().map(|l| truncate_log(l, keep)).collect()
                } else {
                    logs
                };
                let mut fix = FixationSet::new();
                let mut hist = DurationHistogram::default();
                for l in &logs {
                    fix.extend(&FixationSet::from_log(l));
                    hist.merge(&DurationHistogram::from_log(l)?)?;
                }
                (fix, hist)
            }
            Reference::Gaze(records) => {
                let records = if truncate { truncate_episodes(&records, keep) } else { records };
                (gaze_fixations(&records)?, gaze_histogram(&records)?)
            }
        };
        let y = binarize_fixations(&ref_fix, cfg.eval.radius_px);
        write_map(&dir, "reference_fixation_map.pgm", &y.to_saliency())?;
        write_map(&dir, "reference_saliency.pgm", &make_saliency(&ref_fix, cfg.eval.sigma_px)?)?;
        ref_hist.save(&dir.join("reference_histogram.csv"))?;
        let auc_fix = auc_maps(&y, &agent_binary.to_saliency())?;
        let auc_sal = auc_maps(&y, &agent_saliency)?;
        output::write(
            &dir.join("auc.csv"),
            format!("predictor,auc\nfixation_map,{auc_fix}\nsaliency_map,{auc_sal}\n"),
        )?;
        pairs.push(("auc_fixation_map", auc_fix.to_string()));
        pairs.push(("auc_saliency_map", auc_sal.to_string()));
        pairs.push(("reference_truncated_to_frames", if truncate { keep.to_string() } else { String::new() }));
        if histogram.total() > 0 && ref_hist.total() > 0 {
            pairs.push(("histogram_distance", histogram_distance(&histogram, &ref_hist)?.to_string()));
        }
    }
    output::write(&dir.join("summary.txt"), summary(&pairs))?;
    eprintln!("evaluated {} episode logs into {}", agent.len(), dir.display());
    Ok(())
}

pub fn grid_search(cfg: &ExperimentConfig, grid_path: &Path, reference_path: &Path) -> CliResult<()> {
    cfg.validate()?;
    let spec = load_grid(grid_path)?;
    let reference = DurationHistogram::load(reference_path)?;
    if reference.total() == 0 {
        return Err(CliError::Usage(format!("{}: reference histogram is empty", reference_path.display())));
    }
    if cfg.eval.episodes == 0 {
        return Err(CliError::Usage("eval.episodes must be at least 1 for a grid search".into()));
    }
    let dir = output::prepare(cfg)?;
    let mut grid = GridSearch::new(cfg.loop_config(), cfg.train_config(), spec.c_pause, spec.c_sacc);
    grid.eval_episodes = cfg.eval.episodes;
    grid.eval_epsilon = cfg.eval.epsilon;
    grid.eval_seed = eval_base_seed(cfg.seed);
    let report = grid_search_with(&grid, &reference, |c| {
        eprintln!(
            "c_pause {} c_sacc {}: distance {:.4} score {:.2} pause rate {:.3}",
            c.c_pause, c.c_sacc, c.distance, c.mean_score, c.pause_rate
        )
    })?;

    let mut csv = String::from("c_pause,c_sacc,distance,mean_score,pause_rate,best\n");
    for (i, c) in report.cells.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            c.c_pause,
            c.c_sacc,
            c.distance,
            c.mean_score,
            c.pause_rate,
            u8::from(i == report.best)
        );
    }
    output::write(&dir.join("grid_report.csv"), csv)?;
    let best = report.best_cell();
    let mut winner = cfg.clone();
    winner.reward.pause_penalty = best.c_pause;
    winner.reward.saccade_cost = best.c_sacc;
    output::write(&dir.join("best_config.txt"), winner.to_text())?;
    best.histogram.save(&dir.join("best_histogram.csv"))?;
    eprintln!("best cell: c_pause {} c_sacc {} (distance {:.4})", best.c_pause, best.c_sacc, best.distance);
    Ok(())
}

pub fn import_gaze(cfg: &ExperimentConfig, input: &Path, max_frames: Option<usize>) -> CliResult<()> {
    cfg.validate()?;
    let mut records = load_gaze_csv(input)?;
    if let Some(n) = max_frames {
        records = truncate_episodes(&records, n);
    }
    let histogram = gaze_histogram(&records)?;
    let fixations = gaze_fixations(&records)?;
    let dir = output::prepare(cfg)?;
    histogram.save(&dir.join("reference_histogram.csv"))?;
    let mut fix = String::from("x_px,y_px,weight\n");
    for &(x, y, w) in fixations.points() {
        let _ = writeln!(fix, "{x},{y},{w}");
    }
    output::write(&dir.join("fixations.csv"), fix)?;
    write_map(&dir, "reference_saliency.pgm", &make_saliency(&fixations, cfg.eval.sigma_px)?)?;
    write_map(
        &dir,
        "reference_fixation_map.pgm",
        &binarize_fixations(&fixations, cfg.eval.radius_px).to_saliency(),
    )?;
    let mut episodes: Vec<&str> = records.iter().map(|r| r.episode_id.as_str()).collect();
    episodes.dedup();
    output::write(
        &dir.join("summary.txt"),
        summary(&[
            ("frames", records.len().to_string()),
            ("episodes", episodes.len().to_string()),
            ("gaze_samples", fixations.len().to_string()),
        ]),
    )?;
    eprintln!("imported {} frames from {}", records.len(), input.display());
    Ok(())
}
