//! Acceptance checks, one PASS/FAIL line each.
//!
//! Run with `cargo test -p creyes-cli --test acceptance`; pass criterion
//! numbers as arguments to run a subset. A criterion listed in `KNOWN_FAILURES`
//! is reported but does not fail the run.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use creyes_cli::commands::eval_episode_seed;
use creyes_core::agent::{
    evaluate_cell, run_episode, run_policy_episode, AgentAction, GridSearch, LoopConfig, NetworkKind, QNetwork,
    QNetworkSpec, TrainConfig, Trainer,
};
use creyes_core::emma::{encoding_time, gaze_shift_time, saccade_time, EmmaParams};
use creyes_core::env::{apply_sticky, reset, GameId, GameSpec, MotorAction, World};
use creyes_core::fovea::{cell_center, observe, FoveaConfig, ObservationCanvas, SensoryAction};
use creyes_core::frame::{Frame, FRAME_SIZE};
use creyes_core::log::EpisodeLog;
use creyes_core::saliency::{auc, histogram_distance, DurationHistogram};
use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::oracle::ChaseOracle;

/// Criteria whose stated target contradicts the metric's own definition.
const KNOWN_FAILURES: &[u32] = &[3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_binary(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<u8> {
    (0..n).map(|_| u8::from(rng.gen::<f64>() < density)).collect()
}

fn self_similarity() -> Outcome {
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let density = match i {
            0 => 0.0,
            1 => 1.0,
            _ => r.gen_range(0.01..0.5),
        };
        let y = random_binary(&mut r, FRAME_SIZE * FRAME_SIZE, density);
        let y_hat: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
        worst = worst.max((auc(&y, &y_hat).unwrap() - 1.0).abs());
    }
    outcome(worst <= 1e-9, format!("max |auc(y, y) - 1| = {worst:.1e} over 50 maps"))
}

fn chance_level() -> Outcome {
    let mut r = rng(2);
    let mut total = 0.0;
    for _ in 0..100 {
        let density = r.gen_range(0.01..0.5);
        let y = random_binary(&mut r, FRAME_SIZE * FRAME_SIZE, density);
        let y_hat: Vec<f64> = (0..y.len()).map(|_| r.gen::<f64>()).collect();
        total += auc(&y, &y_hat).unwrap();
    }
    let mean = total / 100.0;
    outcome((0.48..=0.52).contains(&mean), format!("mean auc = {mean:.4} over 100 trials"))
}

/// Agreement fraction at threshold `t`, straight from the definition.
fn agreement(y: &[u8], y_hat: &[f64], t: f64) -> f64 {
    let hits = y.iter().zip(y_hat).filter(|(&yi, &p)| (yi == 1) == (p >= t)).count();
    hits as f64 / y.len() as f64
}

fn hand_case() -> Outcome {
    let y = [1u8, 0, 0, 0];
    let y_hat = [0.8, 0.6, 0.1, 0.1];
    let exact = auc(&y, &y_hat).unwrap();
    // uniform thresholds on (0, 1]
    let mut r = rng(3);
    let n = 1_000_000;
    let mc = (0..n).map(|_| agreement(&y, &y_hat, 1.0 - r.gen::<f64>())).sum::<f64>() / n as f64;
    let claimed = 0.625;
    let matches_mc = (exact - mc).abs() <= 1e-3;
    outcome(
        exact == claimed && matches_mc,
        format!(
            "exact {exact}, Monte Carlo {mc:.5} (|diff| {:.1e}); stated target {claimed} differs from the integral of the agreement curve",
            (exact - mc).abs()
        ),
    )
}

fn emma_values() -> Outcome {
    let p = EmmaParams::default();
    let enc = encoding_time(0.1, 0.0, &p).unwrap();
    // K (−ln f) e^{k·0} with K = 0.006 s
    let enc_ok = (enc - 0.006 * 10f64.ln()).abs() <= 1e-9 && (enc - 0.013816).abs() <= 1e-6;
    let sac = saccade_time(10.0, &p);
    let sac_ok = sac == 0.225;
    let mut r = rng(4);
    let mut violations = 0;
    for _ in 0..1000 {
        let from = (r.gen_range(0..FRAME_SIZE), r.gen_range(0..FRAME_SIZE));
        let a = (r.gen_range(0..FRAME_SIZE), r.gen_range(0..FRAME_SIZE));
        let b = (r.gen_range(0..FRAME_SIZE), r.gen_range(0..FRAME_SIZE));
        let dist = |t: (usize, usize)| (from.0 as f64 - t.0 as f64).hypot(from.1 as f64 - t.1 as f64);
        let (near, far) = if dist(a) <= dist(b) { (a, b) } else { (b, a) };
        if gaze_shift_time(from, near, &p) > gaze_shift_time(from, far, &p) {
            violations += 1;
        }
    }
    outcome(
        enc_ok && sac_ok && violations == 0,
        format!("encoding_time(0.1, 0) = {enc:.7} s, saccade_time(10) = {sac} s, {violations} monotonicity violations in 1000 pairs"),
    )
}

const EVAL_SEEDS: std::ops::Range<u64> = 10_000..10_020;

fn chase_spec() -> GameSpec {
    GameSpec::new(GameId::ChaseDot)
}

/// Mean optimal score over the evaluation start states.
fn oracle_mean() -> f64 {
    let spec = chase_spec();
    let oracle = ChaseOracle::solve(spec.max_steps as usize, spec.sticky_prob);
    let n = (EVAL_SEEDS.end - EVAL_SEEDS.start) as f64;
    EVAL_SEEDS
        .map(|s| {
            let (state, _) = reset(spec, s).unwrap();
            let World::Chase(w) = state.world() else {
                unreachable!("chase spec builds a chase world")
            };
            oracle.value(w.avatar(), w.target())
        })
        .sum::<f64>()
        / n
}

fn gameplay_train_config(steps: u64, seed: u64) -> TrainConfig {
    TrainConfig {
        network: NetworkKind::Linear,
        gamma: 0.9,
        learning_rate: 0.01,
        train_every: 4,
        warmup: 1000,
        steps,
        epsilon_decay_steps: steps / 2,
        target_sync: 500,
        replay_capacity: 50_000,
        seed,
        ..TrainConfig::default()
    }
}

fn train(cfg: LoopConfig, train: TrainConfig) -> QNetwork {
    let mut t = Trainer::new(cfg, train).unwrap();
    t.run(|_| {}).unwrap();
    t.into_network()
}

fn mean_score(cfg: &LoopConfig, net: &QNetwork) -> f64 {
    let n = (EVAL_SEEDS.end - EVAL_SEEDS.start) as f64;
    EVAL_SEEDS
        .map(|s| run_episode(cfg, net, 0.01, s).unwrap().final_score() as f64)
        .sum::<f64>()
        / n
}

/// Game score only, the objective the oracle optimises.
fn score_only(mut cfg: LoopConfig) -> LoopConfig {
    cfg.reward.pause_penalty = 0.0;
    cfg.reward.saccade_cost = 0.0;
    cfg
}

fn oracle_gameplay() -> Outcome {
    let t = Instant::now();
    let oracle = oracle_mean();
    let oracle_time = t.elapsed();
    let config = |steps| TrainConfig { gamma: 0.97, ..gameplay_train_config(steps, 0) };

    let mut full = score_only(LoopConfig::new(chase_spec()));
    full.fovea = FoveaConfig::full_frame();
    let full_score = mean_score(&full, &train(full, config(300_000)));

    let foveated = score_only(LoopConfig::new(chase_spec()));
    let fov_score = mean_score(&foveated, &train(foveated, config(1_000_000)));

    let (full_frac, fov_frac) = (full_score / oracle, fov_score / oracle);
    outcome(
        full_frac >= 0.95 && fov_frac >= 0.60,
        format!(
            "oracle {oracle:.2} ({oracle_time:.1?}); full frame {full_score:.2} = {:.1}% (need 95%); foveated {fov_score:.2} = {:.1}% (need 60%)",
            100.0 * full_frac,
            100.0 * fov_frac
        ),
    )
}

fn pause_rate(cfg: &LoopConfig, net: &QNetwork) -> f64 {
    let (mut pauses, mut steps) = (0, 0);
    for s in EVAL_SEEDS {
        let log = run_episode(cfg, net, 0.01, s).unwrap();
        pauses += log.pause_count();
        steps += log.len();
    }
    pauses as f64 / steps as f64
}

fn pause_directionality() -> Outcome {
    let rate = |c_pause: f64| {
        let mut cfg = LoopConfig::new(chase_spec());
        cfg.reward.pause_penalty = c_pause;
        pause_rate(&cfg, &train(cfg, gameplay_train_config(60_000, 7)))
    };
    let (free, costly) = (rate(0.0), rate(1.0));
    outcome(
        free >= costly,
        format!("pause frequency {free:.4} at c_pause = 0, {costly:.4} at c_pause = 1"),
    )
}

fn longest_pause_run(log: &EpisodeLog) -> usize {
    let (mut best, mut run) = (0, 0);
    for s in &log.steps {
        run = if s.paused { run + 1 } else { 0 };
        best = best.max(run);
    }
    best
}

fn masking() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for game in [GameId::ChaseDot, GameId::LaneCollect] {
        for pausing in [true, false] {
            let mut cfg = LoopConfig::new(GameSpec::new(game));
            cfg.pausing = pausing;
            let net = QNetwork::zeros(QNetworkSpec::new(NetworkKind::Linear, cfg.fovea.memory_depth));
            let (mut steps, mut longest, mut pauses, mut episode) = (0, 0, 0, 0u64);
            while steps < 10_000 {
                let log = run_episode(&cfg, &net, 1.0, 500 + episode).unwrap();
                steps += log.len();
                longest = longest.max(longest_pause_run(&log));
                pauses += log.pause_count();
                episode += 1;
            }
            let ok = if pausing { longest <= 20 && pauses > 0 } else { pauses == 0 };
            pass &= ok;
            details.push(format!(
                "{} pausing {}: {steps} steps, {pauses} pauses, longest run {longest}",
                game.name(),
                if pausing { "on" } else { "off" }
            ));
        }
    }
    outcome(pass, details.join("; "))
}

fn scripted(cfg: &LoopConfig, script: impl Fn(usize) -> AgentAction) -> EpisodeLog {
    let mut step = 0;
    let mut policy = |_: &ObservationCanvas, _: &[bool; 7]| {
        step += 1;
        Ok(script(step - 1))
    };
    run_policy_episode(cfg, &mut policy, 42).unwrap()
}

fn frame_durations() -> Outcome {
    let cfg = LoopConfig::new(chase_spec());
    let centre = SensoryAction::new(12).unwrap();
    let corner = SensoryAction::new(0).unwrap();
    let never = scripted(&cfg, |_| AgentAction {
        motor: MotorAction::Noop,
        sensory: centre,
    });
    let masses = DurationHistogram::from_log(&never).unwrap().masses().unwrap();

    let once = scripted(&cfg, |i| AgentAction {
        motor: if i == 3 { MotorAction::Pause } else { MotorAction::Noop },
        sensory: if i == 3 { corner } else { centre },
    });
    // saccade from the centre to the corner, then foveal encoding
    let p = EmmaParams::default();
    let (a, b) = (cell_center(centre), cell_center(corner));
    let ecc = (a.0 as f64 - b.0 as f64).hypot(a.1 as f64 - b.1 as f64) / p.px_per_deg;
    let emma_ms = 1000.0 * (p.t_prep + p.t_exec_base + p.t_exec_per_deg * ecc + p.encoding_scale * -p.object_frequency.ln());
    let durations: Vec<f64> = once.frame_durations().collect();
    let long: Vec<f64> = durations.iter().copied().filter(|&d| d != 50.0).collect();
    let single_ok = once.pause_count() == 1 && long.len() == 1 && (long[0] - (50.0 + emma_ms)).abs() <= 1e-9;
    outcome(
        masses[0] == 1.0 && single_ok,
        format!(
            "never-pausing mass in [50,100) = {}; single pause: {} of {} frames longer than 50 ms, {:?} ms vs expected {:.6} ms",
            masses[0],
            long.len(),
            durations.len(),
            long,
            50.0 + emma_ms
        ),
    )
}

fn sticky_actions() -> Outcome {
    let mut r = rng(9);
    let n = 100_000;
    let repeats = (0..n)
        .filter(|_| apply_sticky(MotorAction::Left, MotorAction::Right, 0.25, &mut r) == MotorAction::Left)
        .count();
    let rate = repeats as f64 / n as f64;
    outcome((0.23..=0.27).contains(&rate), format!("repeat rate {rate:.4} over {n} draws"))
}

fn memory_exactness() -> Outcome {
    let mut runner = TestRunner::new(ProptestConfig {
        cases: 500,
        failure_persistence: None,
        ..ProptestConfig::default()
    });
    let cfg = FoveaConfig::default();
    let strategy = (prop::collection::vec(0usize..25, 4..16), any::<u64>());
    let result = runner.run(&strategy, |(cells, seed)| {
        let mut r = rng(seed);
        let mut memory = ObservationCanvas::empty(cfg.memory_depth);
        let mut shown = Vec::new();
        for &c in &cells {
            let pixels: Vec<u8> = (0..FRAME_SIZE * FRAME_SIZE).map(|_| r.gen()).collect();
            let frame = Frame::from_pixels(pixels).unwrap();
            let cell = SensoryAction::new(c).unwrap();
            observe(&frame, cell, &mut memory, &cfg);
            shown.push((frame, cell));
        }
        for (layer, (frame, cell)) in shown.iter().rev().take(cfg.memory_depth).enumerate() {
            let patch = memory.layer(layer).expect("layer filled after four observations");
            prop_assert_eq!(patch.cell(), *cell);
            let (cx, cy) = cell_center(*cell);
            let half = cfg.patch_size as i64 / 2;
            for py in 0..cfg.patch_size as i64 {
                for px in 0..cfg.patch_size as i64 {
                    let (x, y) = (cx as i64 - half + px, cy as i64 - half + py);
                    let want = if (0..FRAME_SIZE as i64).contains(&x) && (0..FRAME_SIZE as i64).contains(&y) {
                        f32::from(frame.get(x as usize, y as usize)) / 255.0
                    } else {
                        0.0
                    };
                    prop_assert_eq!(patch.get(px as usize, py as usize), want);
                }
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => outcome(true, "500 random observation sequences match the last 4 patches exactly"),
        Err(e) => outcome(false, format!("{e}")),
    }
}

fn gradient_check() -> Outcome {
    let mut r = rng(11);
    let spec = QNetworkSpec::new(NetworkKind::Deep, 4);
    let mut net = QNetwork::init(spec, &mut r);
    let pixels: Vec<f32> = (0..4 * FRAME_SIZE * FRAME_SIZE).map(|_| r.gen::<f32>()).collect();
    let obs = creyes_core::agent::EncodedObs::Pixels(pixels);
    let d_motor: [f64; 7] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
    let d_sensory: [f64; 25] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
    let loss = |net: &QNetwork| {
        let q = net.forward(&obs).unwrap();
        q.motor.iter().zip(&d_motor).map(|(a, b)| a * b).sum::<f64>()
            + q.sensory.iter().zip(&d_sensory).map(|(a, b)| a * b).sum::<f64>()
    };
    let mut grads = net.zero_grads();
    net.backward(&obs, &d_motor, &d_sensory, &mut grads).unwrap();

    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 10 {
        let t = r.gen_range(0..grads.len());
        let i = r.gen_range(0..grads[t].len());
        let analytic = grads[t].data[i];
        let h = 1e-5;
        let orig = net.params()[t].data[i];
        net.params_mut()[t].data[i] = orig + h;
        let up = loss(&net);
        net.params_mut()[t].data[i] = orig - h;
        let down = loss(&net);
        net.params_mut()[t].data[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        if analytic.abs() < 1e-8 && numeric.abs() < 1e-8 {
            continue;
        }
        worst = worst.max((analytic - numeric).abs() / analytic.abs().max(numeric.abs()));
        checked += 1;
    }
    outcome(worst < 1e-4, format!("max relative error {worst:.2e} over {checked} parameters"))
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn cli(args: &[&str]) -> u8 {
    creyes_cli::run(std::iter::once("creyes").chain(args.iter().copied()))
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.txt");
    std::fs::write(&config, "train.steps = 5000\ntrain.warmup = 500\neval.episodes = 3\nrun.seed = 17\n").unwrap();
    let work = tmp.path().join("run");
    let (train_dir, roll_dir) = (work.join("train"), work.join("rollout"));
    let once = || {
        let _ = std::fs::remove_dir_all(&work);
        let c = config.to_str().unwrap();
        let train_code = cli(&["train", "--config", c, "--out", train_dir.to_str().unwrap()]);
        let ckpt = train_dir.join("model.ckpt");
        let roll_code = cli(&[
            "rollout",
            "--config",
            c,
            "--checkpoint",
            ckpt.to_str().unwrap(),
            "--out",
            roll_dir.to_str().unwrap(),
        ]);
        (train_code, roll_code, read_dir_bytes(&train_dir), read_dir_bytes(&roll_dir))
    };
    let a = once();
    let b = once();
    let files = a.2.len() + a.3.len();
    let pass = (a.0, a.1) == (0, 0) && a == b && a.3.keys().filter(|k| k.starts_with("episode_")).count() == 3;
    outcome(pass, format!("two train + rollout runs: exit codes {:?}/{:?}, {files} artifacts, identical: {}", (a.0, a.1), (b.0, b.1), a == b))
}

fn grid_self_consistency() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let seed = 5;
    let train = gameplay_train_config(20_000, seed);
    let mut grid = GridSearch::new(LoopConfig::new(chase_spec()), train, vec![0.0, 0.2], vec![0.0, 0.05]);
    grid.eval_episodes = 5;
    grid.eval_epsilon = 0.2;
    grid.eval_seed = creyes_cli::commands::eval_base_seed(seed);
    debug_assert_eq!(eval_episode_seed(seed, 0), creyes_core::agent::derive_seed(grid.eval_seed, 0));
    // A cell whose rollouts look exactly like another's cannot be singled out,
    // so the reference comes from the cell farthest from its nearest rival.
    let cells: Vec<_> = [(0.0, 0.0), (0.0, 0.05), (0.2, 0.0), (0.2, 0.05)]
        .into_iter()
        .map(|(p, s)| ((p, s), evaluate_cell(&grid, p, s).unwrap().histogram))
        .collect();
    let isolation = |i: usize| {
        (0..cells.len())
            .filter(|&j| j != i)
            .map(|j| histogram_distance(&cells[i].1, &cells[j].1).unwrap())
            .fold(f64::INFINITY, f64::min)
    };
    let pick = (0..cells.len()).max_by(|&a, &b| isolation(a).total_cmp(&isolation(b))).unwrap();
    let (designated, reference) = (cells[pick].0, cells[pick].1.clone());
    if isolation(pick) == 0.0 {
        return outcome(false, "every grid cell produced a histogram identical to another's");
    }
    let reference_path = tmp.path().join("reference.csv");
    reference.save(&reference_path).unwrap();

    let config = tmp.path().join("config.txt");
    std::fs::write(
        &config,
        format!(
            "train.gamma = 0.9\ntrain.learning_rate = 0.01\ntrain.train_every = 4\ntrain.warmup = 1000\n\
             train.steps = 20000\ntrain.epsilon_decay_steps = 10000\ntrain.target_sync = 500\n\
             train.replay_capacity = 50000\neval.episodes = 5\neval.epsilon = 0.2\nrun.seed = {seed}\n"
        ),
    )
    .unwrap();
    let grid_file = tmp.path().join("grid.txt");
    std::fs::write(&grid_file, "c_pause = 0, 0.2\nc_sacc = 0, 0.05\n").unwrap();
    let out = tmp.path().join("out");
    let code = cli(&[
        "grid-search",
        "--config",
        config.to_str().unwrap(),
        "--grid",
        grid_file.to_str().unwrap(),
        "--reference",
        reference_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    if code != 0 {
        return outcome(false, format!("grid-search exited with {code}"));
    }
    let report = std::fs::read_to_string(out.join("grid_report.csv")).unwrap();
    let rows: Vec<Vec<f64>> = report
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    let best = rows.iter().find(|r| r[5] == 1.0).unwrap();
    let runner_up = rows
        .iter()
        .filter(|r| r[5] != 1.0)
        .map(|r| r[2])
        .fold(f64::INFINITY, f64::min);
    outcome(
        (best[0], best[1]) == designated && best[2] == 0.0,
        format!(
            "designated cell {designated:?}; winner ({}, {}) at distance {}, next best distance {runner_up:.4}",
            best[0], best[1], best[2]
        ),
    )
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "AUC self-similarity", budget: Duration::from_secs(5), run: self_similarity },
    Criterion { id: 2, name: "AUC chance level", budget: Duration::from_secs(10), run: chance_level },
    Criterion { id: 3, name: "AUC hand case", budget: Duration::from_secs(60), run: hand_case },
    Criterion { id: 4, name: "EMMA values", budget: Duration::from_secs(1), run: emma_values },
    Criterion { id: 5, name: "oracle gameplay", budget: Duration::from_secs(600), run: oracle_gameplay },
    Criterion { id: 6, name: "pause directionality", budget: Duration::from_secs(600), run: pause_directionality },
    Criterion { id: 7, name: "masking", budget: Duration::from_secs(30), run: masking },
    Criterion { id: 8, name: "frame durations", budget: Duration::from_secs(5), run: frame_durations },
    Criterion { id: 9, name: "sticky actions", budget: Duration::from_secs(5), run: sticky_actions },
    Criterion { id: 10, name: "memory exactness", budget: Duration::from_secs(10), run: memory_exactness },
    Criterion { id: 11, name: "gradient check", budget: Duration::from_secs(30), run: gradient_check },
    Criterion { id: 12, name: "determinism", budget: Duration::from_secs(120), run: determinism },
    Criterion { id: 13, name: "grid-search self-consistency", budget: Duration::from_secs(900), run: grid_self_consistency },
];

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    for c in CRITERIA.iter().filter(|c| selected.is_empty() || selected.contains(&c.id)) {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= c.budget;
        let pass = result.pass && in_budget;
        let note = if pass {
            ""
        } else if KNOWN_FAILURES.contains(&c.id) {
            " [known]"
        } else {
            unexpected.push(c.id);
            ""
        };
        println!(
            "{} {:>2} {}{note}: {} ({:.1?}{})",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            result.detail,
            elapsed,
            if in_budget { String::new() } else { format!(", over the {:?} budget", c.budget) }
        );
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
