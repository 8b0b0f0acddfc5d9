use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use tokio::net::TcpListener;

use mind_core::action::Millis;
use mind_core::dispatcher::{Engine, MockDesktop, Mode, Session};
use mind_core::pointer::ScreenRect;
use mind_core::profile::load_profile;
use mind_gateway::{serve, spawn_hub, ClockMode};

#[derive(Parser)]
#[command(name = "mind-serve", about = "Serve a dispatcher session over WebSocket")]
struct Args {
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, default_value = "127.0.0.1:7070")]
    listen: String,
    /// Application focused at start.
    #[arg(long, default_value = "desktop")]
    app: String,
    #[arg(long, default_value = "keyboard", value_parser = ["keyboard", "pointer"])]
    mode: String,
    #[arg(long, default_value = "1920x1080", value_parser = parse_screen)]
    screen: ScreenRect,
    /// `wall`, or `stepped:MS` to stamp each action MS after the previous one.
    #[arg(long, default_value = "wall", value_parser = parse_clock)]
    clock: ClockMode,
}

fn parse_screen(s: &str) -> Result<ScreenRect, String> {
    let (w, h) = s.split_once('x').ok_or("expected WIDTHxHEIGHT")?;
    let rect = ScreenRect::new(0, 0, w.parse().map_err(|_| "bad width")?, h.parse().map_err(|_| "bad height")?);
    rect.is_valid().then_some(rect).ok_or_else(|| "screen must be non-empty".to_string())
}

fn parse_clock(s: &str) -> Result<ClockMode, String> {
    match s.split_once(':') {
        None if s == "wall" => Ok(ClockMode::Wall),
        Some(("stepped", ms)) => {
            let step_ms: Millis = ms.parse().map_err(|_| format!("bad step `{ms}`"))?;
            Ok(ClockMode::Stepped { step_ms })
        }
        _ => Err(format!("unknown clock `{s}` (wall or stepped:MS)")),
    }
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let profile = match load_profile(&args.profile) {
        Ok(p) => Arc::new(p),
        Err(e) => {
            eprintln!("mind-serve: {e}");
            return ExitCode::FAILURE;
        }
    };
    let listener = match TcpListener::bind(&args.listen).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("mind-serve: cannot bind {}: {e}", args.listen);
            return ExitCode::FAILURE;
        }
    };
    let mode = if args.mode == "pointer" { Mode::Pointer } else { Mode::Keyboard };
    let session = Session::new(Engine::new(profile, args.screen), MockDesktop::new(args.screen, &args.app), mode);
    let hub = spawn_hub(session, args.clock);
    match listener.local_addr() {
        Ok(addr) => eprintln!("listening on ws://{addr}"),
        Err(_) => eprintln!("listening on {}", args.listen),
    }
    if let Err(e) = serve(listener, hub).await {
        eprintln!("mind-serve: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
