//! The three-action input vocabulary shared by every device.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Milliseconds on the engine's logical clock.
pub type Millis = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserAction {
    Scroll,
    ZoomIn,
    ZoomOut,
}

impl UserAction {
    pub const ALL: [UserAction; 3] = [UserAction::Scroll, UserAction::ZoomIn, UserAction::ZoomOut];

    pub fn index(self) -> usize {
        match self {
            UserAction::Scroll => 0,
            UserAction::ZoomIn => 1,
            UserAction::ZoomOut => 2,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UserAction::Scroll => "scroll",
            UserAction::ZoomIn => "zoom_in",
            UserAction::ZoomOut => "zoom_out",
        }
    }
}

impl fmt::Display for UserAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown action `{0}` (expected scroll, zoom_in or zoom_out)")]
pub struct ParseActionError(pub String);

impl FromStr for UserAction {
    type Err = ParseActionError;

    /// Accepts the wire names plus the one-letter shorthands `s`, `i`, `o`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "scroll" | "s" => Ok(UserAction::Scroll),
            "zoom_in" | "i" => Ok(UserAction::ZoomIn),
            "zoom_out" | "o" => Ok(UserAction::ZoomOut),
            other => Err(ParseActionError(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UserActionEvent {
    pub action: UserAction,
    pub timestamp: Millis,
}

impl UserActionEvent {
    pub fn new(action: UserAction, timestamp: Millis) -> Self {
        Self { action, timestamp }
    }
}
