//! WebSocket front end: accepts connections and relays frames to the hub.

use futures_util::{SinkExt, StreamExt};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::{broadcast, mpsc};
use tokio_tungstenite::tungstenite::Message;

use crate::hub::HubHandle;
use crate::protocol::{ClientMessage, ServerMessage};

/// Accepts connections until the listener fails.
pub async fn serve(listener: TcpListener, hub: HubHandle) -> std::io::Result<()> {
    loop {
        let (stream, _) = listener.accept().await?;
        tokio::spawn(handle_connection(stream, hub.clone()));
    }
}

/// Runs one client: the current snapshot first, then every broadcast, with
/// error replies for frames that do not parse.
pub async fn handle_connection(stream: TcpStream, hub: HubHandle) {
    let Ok(ws) = tokio_tungstenite::accept_async(stream).await else {
        return;
    };
    let (mut sink, mut source) = ws.split();
    let Ok((first, mut updates)) = hub.subscribe().await else {
        return;
    };
    if sink.send(Message::text(first)).await.is_err() {
        return;
    }
    let (reply_tx, mut replies) = mpsc::unbounded_channel::<String>();

    loop {
        let outgoing = tokio::select! {
            frame = source.next() => match frame {
                Some(Ok(Message::Text(text))) => {
                    let raw = text.as_str();
                    match serde_json::from_str::<ClientMessage>(raw) {
                        Ok(message) => {
                            if hub.submit(message, raw.to_string(), reply_tx.clone()).is_err() {
                                break;
                            }
                            continue;
                        }
                        Err(e) => ServerMessage::error(format!("malformed message: {e}"), raw).to_text(),
                    }
                }
                Some(Ok(Message::Binary(_))) => ServerMessage::error("binary frames are not supported", "").to_text(),
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                Some(Ok(_)) => continue,
            },
            update = updates.recv() => match update {
                Ok(text) => text,
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => break,
            },
            Some(reply) = replies.recv() => reply,
        };
        if sink.send(Message::text(outgoing)).await.is_err() {
            break;
        }
    }
}
