use std::path::{Path, PathBuf};

use creyes_core::agent::METRICS_HEADER;
use creyes_core::env::MotorAction;
use creyes_core::log::EpisodeLog;
use tempfile::TempDir;

const SMALL: &str = "\
game.id = chase_dot
game.max_steps = 40
train.steps = 400
train.warmup = 64
train.batch_size = 8
train.epsilon_decay_steps = 200
eval.episodes = 3
";

fn creyes(args: &[&str]) -> u8 {
    creyes_cli::run(std::iter::once("creyes").chain(args.iter().copied()))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Fixture {
    tmp: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let tmp = tempfile::tempdir().unwrap();
        std::fs::write(tmp.path().join("run.cfg"), SMALL).unwrap();
        Self { tmp }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.tmp.path().join(name)
    }

    fn cfg(&self) -> String {
        p(&self.path("run.cfg")).to_string()
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let path = self.path(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    fn train(&self) -> PathBuf {
        let out = self.path("train");
        assert_eq!(creyes(&["train", "--config", &self.cfg(), "--out", p(&out)]), 0);
        out.join("model.ckpt")
    }

    fn rollout(&self, name: &str, extra: &[&str]) -> PathBuf {
        let ckpt = self.train();
        let out = self.path(name);
        let cfg = self.cfg();
        let mut args = vec!["rollout", "--config", &cfg, "--checkpoint", p(&ckpt), "--out", p(&out)];
        args.extend_from_slice(extra);
        assert_eq!(creyes(&args), 0);
        out
    }
}

fn episode_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_str().unwrap().starts_with("episode_"))
        .collect();
    files.sort();
    files
}

fn summary_value(dir: &Path, key: &str) -> String {
    let text = std::fs::read_to_string(dir.join("summary.txt")).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
        .unwrap_or_else(|| panic!("{key} missing from summary:\n{text}"))
        .to_string()
}

#[test]
fn help_and_argument_errors() {
    assert_eq!(creyes(&["--help"]), 0);
    assert_eq!(creyes(&["frobnicate"]), 2);
    assert_eq!(creyes(&["rollout"]), 2);
}

#[test]
fn bad_config_is_a_usage_error() {
    let f = Fixture::new();
    let out = f.path("out");
    let bad = f.write("bad.cfg", "train.gamma = 1.5\n");
    assert_eq!(creyes(&["train", "--config", p(&bad), "--out", p(&out)]), 2);
    let unknown = f.write("unknown.cfg", "train.gama = 0.5\n");
    assert_eq!(creyes(&["train", "--config", p(&unknown), "--out", p(&out)]), 2);
    assert_eq!(creyes(&["train", "--config", p(&f.path("missing.cfg")), "--out", p(&out)]), 2);
}

#[test]
fn zero_budget_writes_header_only_metrics() {
    let f = Fixture::new();
    let cfg = f.write("zero.cfg", &SMALL.replace("train.steps = 400", "train.steps = 0"));
    let out = f.path("out");
    assert_eq!(creyes(&["train", "--config", p(&cfg), "--out", p(&out)]), 0);
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics, format!("{METRICS_HEADER}\n"));
    assert!(out.join("model.ckpt").is_file());
    assert!(out.join("config.txt").is_file());
    assert!(out.join("formats.txt").is_file());
}

#[test]
fn echoed_config_reflects_overrides() {
    let f = Fixture::new();
    let out = f.path("out");
    let cfg = f.cfg();
    assert_eq!(creyes(&["train", "--config", &cfg, "--seed", "17", "--out", p(&out)]), 0);
    let text = std::fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(text.contains("run.seed = 17"), "{text}");
    assert!(text.contains(&format!("run.out = {}", out.display())), "{text}");
}

#[test]
fn rollout_without_pausing_never_pauses() {
    let f = Fixture::new();
    let out = f.rollout("eps", &["--pausing", "off", "--episodes", "4"]);
    let files = episode_files(&out);
    assert_eq!(files.len(), 4);
    for file in files {
        let log = EpisodeLog::load(&file).unwrap();
        assert!(!log.is_empty());
        assert!(log.steps.iter().all(|s| s.motor_action != MotorAction::Pause && !s.paused));
    }
    assert_eq!(summary_value(&out, "pause_rate"), "0");
}

#[test]
fn zero_episodes_writes_no_logs() {
    let f = Fixture::new();
    let out = f.rollout("eps", &["--episodes", "0"]);
    assert!(episode_files(&out).is_empty());
    assert!(out.join("config.txt").is_file());
}

#[test]
fn checkpoint_for_another_network_is_rejected() {
    let f = Fixture::new();
    let ckpt = f.train();
    let deep = f.write("deep.cfg", &format!("{SMALL}train.network = deep\n"));
    let out = f.path("eps");
    assert_eq!(creyes(&["rollout", "--config", p(&deep), "--checkpoint", p(&ckpt), "--out", p(&out)]), 2);
    let garbage = f.write("garbage.ckpt", "not a checkpoint");
    assert_ne!(
        creyes(&["rollout", "--config", &f.cfg(), "--checkpoint", p(&garbage), "--out", p(&out)]),
        0
    );
}

#[test]
fn eval_against_itself_scores_full_agreement() {
    let f = Fixture::new();
    let eps = f.rollout("eps", &[]);
    let out = f.path("eval");
    assert_eq!(creyes(&["eval", p(&eps), "--reference", p(&eps), "--out", p(&out)]), 0);
    let auc = std::fs::read_to_string(out.join("auc.csv")).unwrap();
    assert_eq!(auc.lines().next(), Some("predictor,auc"));
    assert!(auc.contains("fixation_map,1\n"), "{auc}");
    assert_eq!(summary_value(&out, "histogram_distance"), "0");
    for name in ["histogram.csv", "scanpath.csv", "fixation_map.pgm", "saliency.pgm", "overlay.pgm"] {
        assert!(out.join(name).is_file(), "{name}");
    }
}

#[test]
fn truncated_reference_uses_mean_agent_length() {
    let f = Fixture::new();
    let eps = f.rollout("eps", &[]);
    let out = f.path("eval");
    assert_eq!(
        creyes(&["eval", p(&eps), "--reference", p(&eps), "--truncate-reference", "--out", p(&out)]),
        0
    );
    let frames: f64 = summary_value(&out, "mean_frames").parse().unwrap();
    let kept: usize = summary_value(&out, "reference_truncated_to_frames").parse().unwrap();
    assert_eq!(kept, frames.round() as usize);
}

#[test]
fn unreadable_logs_are_runtime_errors() {
    let f = Fixture::new();
    let junk = f.write("episode_0000.csv", "step,nonsense\n1,2\n");
    let out = f.path("eval");
    assert_eq!(creyes(&["eval", p(&junk), "--out", p(&out)]), 1);
    assert_eq!(creyes(&["eval", p(&f.path("nope.csv")), "--out", p(&out)]), 1);
}

#[test]
fn malformed_grid_file_is_a_usage_error() {
    let f = Fixture::new();
    let grid = f.write("grid.txt", "c_pause = 0, x\nc_sacc = 0\n");
    let reference = f.write("ref.csv", "bin_lo_ms,bin_hi_ms,count,mass\n50,100,1,1\n");
    let out = f.path("grid");
    assert_eq!(
        creyes(&["grid-search", "--config", &f.cfg(), "--grid", p(&grid), "--reference", p(&reference), "--out", p(&out)]),
        2
    );
}

#[test]
fn import_gaze_writes_reference_artifacts() {
    let f = Fixture::new();
    let gaze = f.write(
        "gaze.csv",
        "frame_id,episode_id,duration_ms,unclipped_reward,action,gaze_positions\n\
         f1,e1,50,0,0,\"10,10;11,12\"\n\
         f2,e1,275,0,3,null\n\
         f3,e2,60,1,2,\"40,41\"\n",
    );
    let out = f.path("human");
    assert_eq!(creyes(&["import-gaze", p(&gaze), "--out", p(&out)]), 0);
    assert_eq!(summary_value(&out, "frames"), "3");
    assert_eq!(summary_value(&out, "episodes"), "2");
    assert_eq!(summary_value(&out, "gaze_samples"), "3");
    let fixations = std::fs::read_to_string(out.join("fixations.csv")).unwrap();
    assert_eq!(fixations.lines().count(), 4);
    let hist = std::fs::read_to_string(out.join("reference_histogram.csv")).unwrap();
    assert!(hist.lines().any(|l| l.starts_with("50,100,2,")), "{hist}");
    assert!(hist.lines().any(|l| l.starts_with("250,300,1,")), "{hist}");

    let capped = f.path("capped");
    assert_eq!(creyes(&["import-gaze", p(&gaze), "--max-frames", "1", "--out", p(&capped)]), 0);
    assert_eq!(summary_value(&capped, "frames"), "2");

    let broken = f.write("broken.csv", "frame_id,episode_id\nf1,e1\n");
    assert_eq!(creyes(&["import-gaze", p(&broken), "--out", p(&f.path("x"))]), 1);
}
