//! Wire format: one JSON object per WebSocket text frame, tagged by `type`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use mind_core::action::{Millis, UserAction};
use mind_core::dispatcher::{Mode, OutputEvent, Session};
use mind_core::hierarchy::{LayoutNode, NodeBody};
use mind_core::keyboard::{predict, KeyPayload, PREDICTION_SLOTS};
use mind_core::pointer::{PointerPhase, Quadrant, ScreenRect};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Action {
        action: UserAction,
    },
    /// Applied between dispatches. Any combination of fields may be present.
    Config {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_depth: Option<usize>,
        /// Path of a profile document to switch to.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        profile: Option<PathBuf>,
        /// Advance a stepped clock by this many milliseconds, delivering any
        /// pending click that falls due.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        advance_ms: Option<Millis>,
    },
}

impl ClientMessage {
    pub fn action(action: UserAction) -> Self {
        ClientMessage::Action { action }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Snapshot(StateSnapshot),
    Output { event: OutputEvent },
    Error { message: String, payload: serde_json::Value },
}

impl ServerMessage {
    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("server message serializes")
    }

    /// Error reply echoing the offending frame: as JSON when it parses, else
    /// as a string.
    pub fn error(message: impl Into<String>, raw: &str) -> Self {
        ServerMessage::Error {
            message: message.into(),
            payload: serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyboardView {
    /// Labels of the current level; prediction slots show their candidate.
    pub labels: Vec<String>,
    pub highlighted: usize,
    /// Labels from the root down to the current level.
    pub breadcrumb: Vec<String>,
    /// Indices at this level that currently do nothing (unbound predictions).
    pub disabled: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointerView {
    pub rect: ScreenRect,
    pub highlighted: Quadrant,
    pub highlighted_rect: ScreenRect,
    pub depth: usize,
    pub max_depth: usize,
    #[serde(flatten)]
    pub phase: PointerPhase,
}

/// Everything a client needs to render the current state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub seq: u64,
    pub clock_ms: Millis,
    pub mode: Mode,
    pub app: String,
    pub screen: ScreenRect,
    pub keyboard: KeyboardView,
    pub pointer: PointerView,
    pub current_word_prefix: String,
    pub sounds: BTreeMap<String, String>,
}

pub fn snapshot(session: &Session, seq: u64) -> StateSnapshot {
    let engine = session.engine();
    let state = session.state();
    let layout = engine.layout(state);
    let level = layout
        .node_at(&state.cursor.path)
        .and_then(LayoutNode::children)
        .unwrap_or_default();
    let candidates = predict(&state.word_prefix, &engine.profile().dictionary, PREDICTION_SLOTS);
    let mut labels = Vec::with_capacity(level.len());
    let mut disabled = Vec::new();
    for (i, node) in level.iter().enumerate() {
        match &node.body {
            NodeBody::Leaf(KeyPayload::Predict { rank }) => match candidates.get(*rank) {
                Some(word) => labels.push((*word).to_string()),
                None => {
                    labels.push(node.label.clone());
                    disabled.push(i);
                }
            },
            _ => labels.push(node.label.clone()),
        }
    }
    let pointer = &state.pointer;
    StateSnapshot {
        seq,
        clock_ms: session.clock(),
        mode: state.mode,
        app: state.app.clone(),
        screen: engine.screen(),
        keyboard: KeyboardView {
            labels,
            highlighted: state.cursor.selected,
            breadcrumb: layout.breadcrumb(&state.cursor.path),
            disabled,
        },
        pointer: PointerView {
            rect: pointer.current_rect(),
            highlighted: pointer.highlighted,
            highlighted_rect: pointer.highlighted_rect(),
            depth: pointer.depth(),
            max_depth: pointer.max_depth,
            phase: pointer.phase,
        },
        current_word_prefix: state.word_prefix.clone(),
        sounds: engine.profile().profile.sounds.clone(),
    }
}
