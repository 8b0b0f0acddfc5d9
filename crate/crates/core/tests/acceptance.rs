//! Acceptance suite: one test per primary criterion, each printing a single
//! PASS/FAIL line. Run with `cargo test -p mind-core --test acceptance -- --nocapture`.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mind_core::action::{UserAction, UserActionEvent};
use mind_core::dispatcher::{write_event_log, Engine, MockDesktop, Mode, Session};
use mind_core::harness::{run_with, summarize, Latency, PlanCache, Planner, RunOptions, TaskScript, UserKind, UserModel};
use mind_core::hierarchy::{apply_action, minimal_actions, shortest_witness, NavCursor, NavEffect};
use mind_core::keyboard::{default_layout, layout_to_json, load_layout, media_player_layout, Key, KeyPayload};
use mind_core::pointer::{
    navigation_actions, quadrant_path, ClickKind, PointerInput, PointerOutput, PointerState, ScreenRect,
};
use mind_core::profile::{load_profile, save_profile, LoadedProfile};
use mind_core::signal::{decode_stream, simulate_signals, write_trace, parse_trace, NoiseModel};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn bundled_profile() -> Arc<LoadedProfile> {
    Arc::new(load_profile(root().join("profiles/default/profile.json")).expect("bundled profile loads"))
}

fn email_script() -> TaskScript {
    TaskScript::load(root().join("tasks/t5_email.json")).expect("bundled email task loads")
}

fn verdict(criterion: &str, ok: bool, detail: String) {
    println!("{} {criterion}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion}: {detail}");
}

const FULL_HD: ScreenRect = ScreenRect::new(0, 0, 1920, 1080);

/// From the root every level starts highlighted at 0 and scrolling only moves
/// forward, so reaching a leaf costs its index sum plus one zoom per level.
fn closed_form_cost(path: &[usize]) -> usize {
    path.iter().sum::<usize>() + path.len()
}

#[test]
fn oracle_equivalence_keyboard() {
    let start = Instant::now();
    let layout = default_layout();
    let leaves = layout.leaves();
    let mut mismatches = Vec::new();
    for (path, payload) in &leaves {
        let witness = shortest_witness(&layout, &NavCursor::root(), path).unwrap();
        let minimal = minimal_actions(&layout, path).unwrap();
        let mut cursor = NavCursor::root();
        let mut emitted = Vec::new();
        for &a in &witness {
            let (next, effect) = apply_action(&layout, &cursor, a).unwrap();
            if let NavEffect::Emit(p) = effect {
                emitted.push(p.clone());
            }
            cursor = next;
        }
        let ok = emitted == vec![(*payload).clone()]
            && witness.len() == minimal
            && minimal == closed_form_cost(path);
        if !ok {
            mismatches.push(path.clone());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "oracle equivalence (keyboard)",
        leaves.len() >= 40 && mismatches.is_empty() && elapsed < Duration::from_secs(1),
        format!("{} leaves, {} mismatches, {:?}", leaves.len(), mismatches.len(), elapsed),
    );
}

#[test]
fn pointer_convergence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_w, mut worst_h, mut worst_dist) = (0, 0, 0);
    let mut failures = 0;
    for _ in 0..1000 {
        let (x, y) = (rng.random_range(0..1920), rng.random_range(0..1080));
        let mut state = PointerState::new(FULL_HD, 7);
        for a in navigation_actions(&quadrant_path(FULL_HD, x, y, 7).unwrap()) {
            state = state.step(PointerInput::Action(a), 0).0;
        }
        let rect = state.current_rect();
        worst_w = worst_w.max(rect.w);
        worst_h = worst_h.max(rect.h);
        let (armed, none) = state.step(PointerInput::Action(UserAction::ZoomIn), 0);
        let (_, click) = armed.step(PointerInput::Tick, armed.deadline().unwrap());
        match (none, click) {
            (None, Some(PointerOutput::Click(c))) if c.kind == ClickKind::Single => {
                let dist = c.x.abs_diff(x).max(c.y.abs_diff(y));
                worst_dist = worst_dist.max(dist);
                if !rect.contains(x, y) || rect.w > 15 || rect.h > 9 || dist > 15 {
                    failures += 1;
                }
            }
            _ => failures += 1,
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "pointer convergence",
        failures == 0 && elapsed < Duration::from_secs(1),
        format!("1000 points, {failures} failures, max rect {worst_w}x{worst_h}, max Chebyshev {worst_dist} px, {elapsed:?}"),
    );
}

#[test]
fn click_phase_timing() {
    let start = Instant::now();
    let screen = ScreenRect::new(0, 0, 64, 64);
    let armed_at = 1_000;
    let mut armed = PointerState::new(screen, 2);
    for _ in 0..3 {
        armed = armed.step(PointerInput::Action(UserAction::ZoomIn), armed_at).0;
    }
    let deadline = armed.deadline().unwrap();
    assert_eq!(deadline, armed_at + 4_000);

    let kind = |out: Option<PointerOutput>| match out {
        Some(PointerOutput::Click(c)) => Some(c.kind),
        _ => None,
    };
    let mut errors = 0;
    for dt in 0..=5_000u64 {
        let now = armed_at + dt;
        let in_window = now < deadline;
        // second zoom-in
        let (_, out) = armed.step(PointerInput::Action(UserAction::ZoomIn), now);
        let expected = if in_window { ClickKind::Double } else { ClickKind::Single };
        errors += usize::from(kind(out) != Some(expected));
        // tick with no second zoom-in
        let (_, out) = armed.step(PointerInput::Tick, now);
        errors += usize::from(kind(out) != (!in_window).then_some(ClickKind::Single));
        // zoom-out while pending cancels; later ticks never click
        if in_window {
            let (cancelled, out) = armed.step(PointerInput::Action(UserAction::ZoomOut), now);
            let (_, late) = cancelled.step(PointerInput::Tick, armed_at + 10_000);
            errors += usize::from(out.is_some() || late.is_some());
        }
    }
    let boundary = kind(armed.step(PointerInput::Tick, deadline).1) == Some(ClickKind::Single)
        && kind(armed.step(PointerInput::Action(UserAction::ZoomIn), deadline).1) == Some(ClickKind::Single);
    let elapsed = start.elapsed();
    verdict(
        "click-phase timing",
        errors == 0 && boundary,
        format!("5001 ms offsets x 3 input kinds, {errors} errors, boundary t = deadline single: {boundary}, {elapsed:?}"),
    );
}

/// Relative letter frequencies of English text (percent).
const LETTER_FREQ: [(char, f64); 26] = [
    ('a', 8.167), ('b', 1.492), ('c', 2.782), ('d', 4.253), ('e', 12.702), ('f', 2.228), ('g', 2.015),
    ('h', 6.094), ('i', 6.966), ('j', 0.153), ('k', 0.772), ('l', 4.025), ('m', 2.406), ('n', 6.749),
    ('o', 7.507), ('p', 1.929), ('q', 0.095), ('r', 5.987), ('s', 6.327), ('t', 9.056), ('u', 2.758),
    ('v', 0.978), ('w', 2.360), ('x', 0.150), ('y', 1.974), ('z', 0.074),
];
/// One space per word at a mean English word length of 4.7 letters.
const MEAN_WORD_LEN: f64 = 4.7;

#[test]
fn typing_rate_consistency() {
    let layout = default_layout();
    let cost = |c: char| {
        let payload = KeyPayload::key(Key::from_char(c));
        let path = layout.leaves().into_iter().find(|(_, p)| **p == payload).unwrap().0;
        minimal_actions(&layout, &path).unwrap() as f64
    };
    let letters: f64 = LETTER_FREQ.iter().map(|(_, f)| f).sum();
    let space_weight = letters / MEAN_WORD_LEN;
    let weighted: f64 = LETTER_FREQ.iter().map(|&(c, f)| f * cost(c)).sum::<f64>() + space_weight * cost(' ');
    let mean = weighted / (letters + space_weight);
    let per_action_s = 20.0 / mean;
    verdict(
        "typing-rate consistency",
        (6.0..=12.0).contains(&mean),
        format!("mean {mean:.4} actions/char (space weight {:.1}%); 20 s/char implies {per_action_s:.2} s/action", 100.0 * space_weight / (letters + space_weight)),
    );
}

#[test]
fn email_task_projection() {
    let start = Instant::now();
    let planner = Planner::new(&email_script(), bundled_profile()).unwrap();
    let minimal = planner.plan().unwrap().action_count();
    let elapsed = start.elapsed();
    let projected_s = minimal as f64 * 2.5;
    verdict(
        "email-task projection",
        projected_s < 13.0 * 60.0 && elapsed < Duration::from_secs(5),
        format!("{minimal} minimal actions x 2.5 s = {projected_s:.1} s (limit 780 s), planned in {elapsed:?}"),
    );
}

#[test]
fn noise_monotonicity() {
    let start = Instant::now();
    let planner = Planner::new(&email_script(), bundled_profile()).unwrap();
    let mut cache = PlanCache::new();
    let mut means = Vec::new();
    let mut zero_rate_max_excess = 0;
    for rate in [0.0, 0.05, 0.10] {
        let runs: Vec<_> = (0..100)
            .map(|seed| {
                let model = UserModel {
                    kind: UserKind::Noisy(NoiseModel::symmetric_confusion(rate, 0)),
                    latency: Latency::Constant(2000),
                    seed,
                };
                run_with(&planner, &model, RunOptions::default(), &mut cache).unwrap()
            })
            .collect();
        if rate == 0.0 {
            zero_rate_max_excess = runs.iter().map(|m| m.excess).max().unwrap();
        }
        means.push(summarize(&runs, 2.0).excess.mean);
    }
    let elapsed = start.elapsed();
    let monotone = means.windows(2).all(|w| w[0] <= w[1]);
    verdict(
        "noise monotonicity",
        monotone && zero_rate_max_excess == 0 && elapsed < Duration::from_secs(30),
        format!(
            "mean excess at confusion 0/0.05/0.10 = {:.2}/{:.2}/{:.2}, max excess at 0 = {zero_rate_max_excess}, {elapsed:?}",
            means[0], means[1], means[2]
        ),
    );
}

fn event_log_for(profile: Arc<LoadedProfile>, trace: &str) -> String {
    let events = decode_stream(&parse_trace(trace).unwrap(), &profile.profile.detection).unwrap();
    let mut session = Session::new(Engine::new(profile, FULL_HD), MockDesktop::new(FULL_HD, "desktop"), Mode::Keyboard);
    for e in events {
        session.feed(e);
    }
    session.finish();
    write_event_log(session.log())
}

#[test]
fn determinism() {
    let profile = bundled_profile();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let actions: Vec<UserAction> = (0..400).map(|_| UserAction::ALL[rng.random_range(0..3)]).collect();
    let noise = NoiseModel {
        miss_rate: 0.05,
        false_fire_rate: 0.05,
        ..NoiseModel::symmetric_confusion(0.1, 11)
    };
    let trace = |p: &LoadedProfile| write_trace(&simulate_signals(&actions, &noise, &p.profile.detection, 1000).unwrap());
    let trace_a = trace(&profile);
    let trace_b = trace(&bundled_profile());
    let log_a = event_log_for(profile, &trace_a);
    let log_b = event_log_for(bundled_profile(), &trace_b);
    verdict(
        "determinism",
        trace_a == trace_b && log_a == log_b && !log_a.is_empty(),
        format!("400 noisy actions, {} log lines, {} bytes identical across runs", log_a.lines().count(), log_a.len()),
    );
}

#[test]
fn round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let original = bundled_profile();
    // copy referenced files next to the re-saved profile
    let src = root().join("profiles/default");
    std::fs::create_dir_all(dir.path().join("layouts")).unwrap();
    for f in ["layouts/default.json", "layouts/mediaplayer.json", "dictionary.tsv"] {
        std::fs::copy(src.join(f), dir.path().join(f)).unwrap();
    }
    let saved = dir.path().join("profile.json");
    save_profile(&original.profile, &saved).unwrap();
    let reloaded = load_profile(&saved).unwrap();
    let profile_ok = reloaded == *original;

    let layouts_ok = [default_layout(), media_player_layout()]
        .into_iter()
        .all(|l| load_layout(&layout_to_json(&l)).unwrap() == l)
        && original.all_layouts().all(|l| load_layout(&layout_to_json(l)).unwrap() == *l);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let detection = &original.profile.detection;
    let mut signal_ok = true;
    for case in 0..200u64 {
        let len = rng.random_range(0..60);
        let actions: Vec<UserAction> = (0..len).map(|_| UserAction::ALL[rng.random_range(0..3)]).collect();
        let inter = rng.random_range(detection.debounce_ms + 1..5_000);
        let samples = simulate_signals(&actions, &NoiseModel::zero(case), detection, inter).unwrap();
        let decoded: Vec<UserAction> = decode_stream(&samples, detection).unwrap().iter().map(|e: &UserActionEvent| e.action).collect();
        signal_ok &= decoded == actions;
    }
    verdict(
        "round-trips",
        profile_ok && layouts_ok && signal_ok,
        format!("profile save/load {profile_ok}, layout serialize/parse {layouts_ok}, zero-noise signal x200 {signal_ok}"),
    );
}
