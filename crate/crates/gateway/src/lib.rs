//! WebSocket gateway for the mind-core dispatcher.
//!
//! Clients send `{"type":"action",...}` and `{"type":"config",...}` frames and
//! receive `snapshot`, `output` and `error` frames. All connections share one
//! session whose inputs are serialized through a single queue.

pub mod hub;
pub mod protocol;
pub mod server;

pub use hub::{spawn_hub, ClockMode, HubClosed, HubHandle};
pub use protocol::{snapshot, ClientMessage, ServerMessage, StateSnapshot};
pub use server::{handle_connection, serve};
