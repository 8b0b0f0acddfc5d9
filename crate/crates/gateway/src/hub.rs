//! The session actor. One task owns the dispatcher session; every connection
//! talks to it through a single FIFO queue, and results fan out over a
//! broadcast channel after each dispatch.

use std::sync::Arc;
use std::time::Duration;

use tokio::sync::{broadcast, mpsc, oneshot};
use tokio::time::Instant;

use mind_core::action::{Millis, UserActionEvent};
use mind_core::dispatcher::{Engine, OutputEvent, Session};
use mind_core::profile::load_profile;

use crate::protocol::{snapshot, ClientMessage, ServerMessage};

const BROADCAST_CAPACITY: usize = 4096;

/// Source of the logical timestamps stamped on client actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockMode {
    /// Milliseconds since the hub started; pending clicks fire on a timer.
    Wall,
    /// Each action lands `step_ms` after the previous clock value; time moves
    /// otherwise only through `advance_ms` config messages.
    Stepped { step_ms: Millis },
}

enum Command {
    Submit {
        message: ClientMessage,
        raw: String,
        reply: mpsc::UnboundedSender<String>,
    },
    Subscribe(oneshot::Sender<(String, broadcast::Receiver<String>)>),
    EventLog(oneshot::Sender<Vec<OutputEvent>>),
}

/// Cheap, cloneable handle to a running hub.
#[derive(Debug, Clone)]
pub struct HubHandle {
    tx: mpsc::UnboundedSender<Command>,
}

#[derive(Debug, thiserror::Error)]
#[error("session hub has stopped")]
pub struct HubClosed;

impl HubHandle {
    /// Current snapshot plus a receiver for everything published after it.
    pub async fn subscribe(&self) -> Result<(String, broadcast::Receiver<String>), HubClosed> {
        let (tx, rx) = oneshot::channel();
        self.tx.send(Command::Subscribe(tx)).map_err(|_| HubClosed)?;
        rx.await.map_err(|_| HubClosed)
    }

    /// Queues a client message. Errors specific to it go to `reply`.
    pub fn submit(&self, message: ClientMessage, raw: String, reply: mpsc::UnboundedSender<String>) -> Result<(), HubClosed> {
        self.tx
            .send(Command::Submit { message, raw, reply })
            .map_err(|_| HubClosed)
    }

    /// The session's full output log so far.
    pub async fn event_log(&self) -> Result<Vec<OutputEvent>, HubClosed> {
        let (tx, rx) = oneshot::channel();
        self.tx.send(Command::EventLog(tx)).map_err(|_| HubClosed)?;
        rx.await.map_err(|_| HubClosed)
    }
}

struct Hub {
    session: Session,
    seq: u64,
    clock: ClockMode,
    started: Instant,
    out: broadcast::Sender<String>,
}

/// Starts the actor on the current Tokio runtime.
pub fn spawn_hub(session: Session, clock: ClockMode) -> HubHandle {
    let (tx, rx) = mpsc::unbounded_channel();
    let (out, _) = broadcast::channel(BROADCAST_CAPACITY);
    let hub = Hub {
        session,
        seq: 0,
        clock,
        started: Instant::now(),
        out,
    };
    tokio::spawn(hub.run(rx));
    HubHandle { tx }
}

impl Hub {
    fn snapshot_text(&self) -> String {
        ServerMessage::Snapshot(snapshot(&self.session, self.seq)).to_text()
    }

    fn publish(&mut self, outputs: Vec<OutputEvent>) {
        for event in outputs {
            let _ = self.out.send(ServerMessage::Output { event }.to_text());
        }
        self.seq += 1;
        let _ = self.out.send(self.snapshot_text());
    }

    fn action_time(&self) -> Millis {
        match self.clock {
            ClockMode::Wall => self.started.elapsed().as_millis() as Millis,
            ClockMode::Stepped { step_ms } => self.session.clock() + step_ms,
        }
    }

    /// Logical time of the pending click, if one must fire on a timer.
    fn wall_deadline(&self) -> Option<Millis> {
        match self.clock {
            ClockMode::Wall => self.session.state().pointer.deadline(),
            ClockMode::Stepped { .. } => None,
        }
    }

    fn handle(&mut self, message: ClientMessage) -> Result<(), String> {
        match message {
            ClientMessage::Action { action } => {
                let now = self.action_time();
                let outputs = self.session.feed(UserActionEvent::new(action, now));
                self.publish(outputs);
            }
            ClientMessage::Config {
                max_depth,
                profile,
                advance_ms,
            } => {
                if max_depth == Some(0) {
                    return Err("max_depth must be at least 1".into());
                }
                if advance_ms.is_some() && self.clock == ClockMode::Wall {
                    return Err("advance_ms needs a stepped clock".into());
                }
                let mut engine = match &profile {
                    Some(path) => {
                        let loaded = load_profile(path).map_err(|e| e.to_string())?;
                        Some(Engine::new(Arc::new(loaded), self.session.engine().screen()))
                    }
                    None => None,
                };
                if let Some(depth) = max_depth {
                    let base = engine.take().unwrap_or_else(|| self.session.engine().clone());
                    engine = Some(base.with_max_depth(depth));
                }
                if let Some(engine) = engine {
                    self.session.reconfigure(engine);
                }
                let outputs = match advance_ms {
                    Some(ms) => self.session.advance_to(self.session.clock() + ms),
                    None => Vec::new(),
                };
                self.publish(outputs);
            }
        }
        Ok(())
    }

    async fn run(mut self, mut rx: mpsc::UnboundedReceiver<Command>) {
        loop {
            let deadline = self.wall_deadline();
            tokio::select! {
                command = rx.recv() => match command {
                    None => break,
                    Some(Command::Submit { message, raw, reply }) => {
                        if let Err(message) = self.handle(message) {
                            let _ = reply.send(ServerMessage::error(message, &raw).to_text());
                        }
                    }
                    Some(Command::Subscribe(reply)) => {
                        let _ = reply.send((self.snapshot_text(), self.out.subscribe()));
                    }
                    Some(Command::EventLog(reply)) => {
                        let _ = reply.send(self.session.log().to_vec());
                    }
                },
                _ = tokio::time::sleep_until(self.started + Duration::from_millis(deadline.unwrap_or(0))), if deadline.is_some() => {
                    let due = deadline.unwrap_or(0).max(self.started.elapsed().as_millis() as Millis);
                    let outputs = self.session.advance_to(due);
                    self.publish(outputs);
                }
            }
        }
    }
}
