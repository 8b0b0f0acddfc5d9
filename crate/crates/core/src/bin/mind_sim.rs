use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use mind_core::action::UserAction;
use mind_core::dispatcher::{write_event_log, Engine, MockDesktop, Mode, Session};
use mind_core::harness::{run_with, summarize, Latency, PlanCache, PlanStep, Planner, RunOptions, TaskScript, UserKind, UserModel};
use mind_core::keyboard::{default_layout, layout_to_json, media_player_layout};
use mind_core::pointer::ScreenRect;
use mind_core::profile::load_profile;
use mind_core::signal::{decode_stream, parse_trace, simulate_signals, write_trace, NoiseModel};

#[derive(Parser)]
#[command(name = "mind-sim", about = "Headless driver for the three-action desktop engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode a signal trace and write the resulting event log.
    Run {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value = "desktop")]
        app: String,
        #[arg(long, default_value = "keyboard", value_parser = parse_mode)]
        mode: Mode,
        #[arg(long, default_value = "1920x1080", value_parser = parse_screen)]
        screen: ScreenRect,
    },
    /// Run a task script under a user model over many seeds.
    Bench {
        #[arg(long)]
        task: PathBuf,
        #[arg(long, default_value = "profiles/default/profile.json")]
        profile: PathBuf,
        /// `perfect` or `noisy:RATE`
        #[arg(long, default_value = "perfect")]
        model: UserKind,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// `const:MS` or `lognormal:MU,SIGMA`
        #[arg(long, default_value = "const:2000")]
        latency: Latency,
        /// Seconds per action for the projected human duration.
        #[arg(long, default_value_t = 2.0)]
        per_action_s: f64,
        #[arg(long, default_value_t = mind_core::harness::DEFAULT_BUDGET_FACTOR)]
        budget_factor: usize,
        /// Also write the summary and per-run metrics as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the optimal action sequence for a task script.
    Plan {
        #[arg(long)]
        task: PathBuf,
        #[arg(long, default_value = "profiles/default/profile.json")]
        profile: PathBuf,
    },
    /// Synthesize a signal trace for an action sequence.
    Simulate {
        #[arg(long)]
        profile: PathBuf,
        /// Comma-separated actions: scroll, zoom_in, zoom_out (or s, i, o).
        #[arg(long, value_delimiter = ',')]
        actions: Vec<UserAction>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        inter_ms: u64,
        #[arg(long, default_value_t = 0.0)]
        confusion: f64,
        #[arg(long, default_value_t = 0.0)]
        miss_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        false_fire_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a built-in layout document.
    Layout {
        #[arg(value_parser = ["default", "mediaplayer"])]
        name: String,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "keyboard" => Ok(Mode::Keyboard),
        "pointer" => Ok(Mode::Pointer),
        _ => Err(format!("unknown mode `{s}` (keyboard or pointer)")),
    }
}

fn parse_screen(s: &str) -> Result<ScreenRect, String> {
    let (w, h) = s.split_once('x').ok_or("expected WIDTHxHEIGHT")?;
    let rect = ScreenRect::new(0, 0, w.parse().map_err(|_| "bad width")?, h.parse().map_err(|_| "bad height")?);
    rect.is_valid().then_some(rect).ok_or_else(|| "screen must be non-empty".to_string())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            profile,
            trace,
            log,
            app,
            mode,
            screen,
        } => {
            let profile = Arc::new(load_profile(&profile)?);
            let text = fs::read_to_string(&trace).with_context(|| format!("reading {}", trace.display()))?;
            let events = decode_stream(&parse_trace(&text)?, &profile.profile.detection)?;
            let mut session = Session::new(Engine::new(profile, screen), MockDesktop::new(screen, &app), mode);
            for event in &events {
                session.feed(*event);
            }
            session.finish();
            fs::write(&log, write_event_log(session.log())).with_context(|| format!("writing {}", log.display()))?;
            eprintln!("{} actions -> {} events", events.len(), session.log().len());
        }
        Command::Bench {
            task,
            profile,
            model,
            seeds,
            latency,
            per_action_s,
            budget_factor,
            json,
        } => {
            latency.validate()?;
            let script = TaskScript::load(&task)?;
            let planner = Planner::new(&script, Arc::new(load_profile(&profile)?))?;
            let mut cache = PlanCache::new();
            let options = RunOptions { budget_factor };
            let runs = (0..seeds)
                .map(|seed| {
                    let user = UserModel {
                        kind: model.clone(),
                        latency,
                        seed,
                    };
                    run_with(&planner, &user, options, &mut cache)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let summary = summarize(&runs, per_action_s);
            print!("{}", summary.to_tsv());
            if let Some(path) = json {
                let doc = serde_json::json!({ "task": script.name, "summary": summary, "runs": runs });
                fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
            }
        }
        Command::Plan { task, profile } => {
            let script = TaskScript::load(&task)?;
            let planner = Planner::new(&script, Arc::new(load_profile(&profile)?))?;
            let plan = planner.plan()?;
            let steps: Vec<&str> = plan
                .steps
                .iter()
                .map(|s| match s {
                    PlanStep::Act(a) => a.as_str(),
                    PlanStep::Wait => "wait",
                })
                .collect();
            println!("task\t{}", script.name);
            println!("minimal_actions\t{}", plan.action_count());
            println!("steps\t{}", steps.join(","));
        }
        Command::Simulate {
            profile,
            actions,
            out,
            inter_ms,
            confusion,
            miss_rate,
            false_fire_rate,
            seed,
        } => {
            if actions.is_empty() {
                bail!("--actions is empty");
            }
            let profile = load_profile(&profile)?;
            let noise = NoiseModel {
                miss_rate,
                false_fire_rate,
                ..NoiseModel::symmetric_confusion(confusion, seed)
            };
            let samples = simulate_signals(&actions, &noise, &profile.profile.detection, inter_ms)?;
            fs::write(&out, write_trace(&samples))?;
        }
        Command::Layout { name } => {
            let layout = if name == "default" { default_layout() } else { media_player_layout() };
            print!("{}", layout_to_json(&layout));
        }
    }
    Ok(())
}
