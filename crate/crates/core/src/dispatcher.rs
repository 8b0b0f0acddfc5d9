//! Core routing loop: owns the active mode, feeds actions to the keyboard or
//! pointer, and turns their effects into output events for a sink.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::{Millis, UserActionEvent};
use crate::hierarchy::{apply_action, NavCursor, NavEffect};
use crate::keyboard::{resolve_prediction, Key, KeyPayload, KeyboardLayout, NamedKey};
use crate::pointer::{ClickEvent, ClickKind, PointerInput, PointerOutput, PointerState, ScreenRect};
use crate::profile::LoadedProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Keyboard,
    Pointer,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Keyboard => "keyboard",
            Mode::Pointer => "pointer",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OutputKind {
    KeyPress { key: Key },
    KeySequence { name: String, keys: Vec<Key> },
    Click { x: u32, y: u32, click: ClickKind },
    ModeSwitched { mode: Mode },
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OutputEvent {
    pub timestamp: Millis,
    #[serde(flatten)]
    pub kind: OutputKind,
}

impl OutputEvent {
    pub fn click(&self) -> Option<ClickEvent> {
        match self.kind {
            OutputKind::Click { x, y, click } => Some(ClickEvent { x, y, kind: click }),
            _ => None,
        }
    }
}

/// One line of the event log: compact JSON, fields in fixed order.
pub fn event_line(event: &OutputEvent) -> String {
    serde_json::to_string(event).expect("event serializes")
}

pub fn write_event_log(events: &[OutputEvent]) -> String {
    events.iter().map(|e| event_line(e) + "\n").collect()
}

pub fn parse_event_log(text: &str) -> Result<Vec<OutputEvent>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Input {
    Action(UserActionEvent),
    Tick(Millis),
}

impl Input {
    pub fn timestamp(&self) -> Millis {
        match self {
            Input::Action(ev) => ev.timestamp,
            Input::Tick(t) => *t,
        }
    }
}

/// Everything that changes as inputs are dispatched.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EngineState {
    pub mode: Mode,
    pub app: String,
    pub cursor: NavCursor,
    pub pointer: PointerState,
    /// Letters typed since the last word boundary; drives prediction.
    pub word_prefix: String,
}

/// The immutable half of the dispatcher: profile, screen and pointer depth.
#[derive(Debug, Clone)]
pub struct Engine {
    profile: Arc<LoadedProfile>,
    screen: ScreenRect,
    max_depth: usize,
}

impl Engine {
    pub fn new(profile: Arc<LoadedProfile>, screen: ScreenRect) -> Self {
        let max_depth = profile.profile.pointer_max_depth;
        Self {
            profile,
            screen,
            max_depth,
        }
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth.max(1);
        self
    }

    pub fn profile(&self) -> &LoadedProfile {
        &self.profile
    }

    pub fn screen(&self) -> ScreenRect {
        self.screen
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn layout(&self, state: &EngineState) -> &KeyboardLayout {
        self.profile.layout_for(&state.app)
    }

    pub fn initial_state(&self, app: &str, mode: Mode) -> EngineState {
        EngineState {
            mode,
            app: app.to_string(),
            cursor: NavCursor::root(),
            pointer: self.fresh_pointer(),
            word_prefix: String::new(),
        }
    }

    fn fresh_pointer(&self) -> PointerState {
        PointerState::new(self.screen, self.max_depth)
    }

    /// Switches the active application: its layout becomes active and the
    /// keyboard returns to the root. The pointer is left alone.
    pub fn on_focus_change(&self, state: &EngineState, app: &str) -> EngineState {
        EngineState {
            app: app.to_string(),
            cursor: NavCursor::root(),
            word_prefix: String::new(),
            ..state.clone()
        }
    }

    pub fn dispatch(&self, state: &EngineState, input: Input) -> (EngineState, Vec<OutputEvent>) {
        let now = input.timestamp();
        let mut next = state.clone();
        let mut kinds = Vec::new();
        match state.mode {
            Mode::Keyboard => {
                if let Input::Action(ev) = input {
                    self.keyboard_action(&mut next, ev, &mut kinds);
                }
            }
            Mode::Pointer => {
                let pointer_input = match input {
                    Input::Action(ev) => PointerInput::Action(ev.action),
                    Input::Tick(_) => PointerInput::Tick,
                };
                let (pointer, out) = state.pointer.step(pointer_input, now);
                next.pointer = pointer;
                match out {
                    Some(PointerOutput::Click(c)) => {
                        next.word_prefix.clear();
                        kinds.push(OutputKind::Click {
                            x: c.x,
                            y: c.y,
                            click: c.kind,
                        });
                    }
                    Some(PointerOutput::SwitchToKeyboard) => {
                        next.mode = Mode::Keyboard;
                        next.cursor = NavCursor::root();
                        kinds.push(OutputKind::ModeSwitched { mode: Mode::Keyboard });
                    }
                    None => {}
                }
            }
        }
        let events = kinds
            .into_iter()
            .map(|kind| OutputEvent { timestamp: now, kind })
            .collect();
        (next, events)
    }

    fn keyboard_action(&self, next: &mut EngineState, ev: UserActionEvent, out: &mut Vec<OutputKind>) {
        let layout = self.profile.layout_for(&next.app);
        let Ok((cursor, effect)) = apply_action(layout, &next.cursor, ev.action) else {
            // only reachable if the state was built by hand; recover at the root
            next.cursor = NavCursor::root();
            return;
        };
        next.cursor = cursor;
        match effect {
            NavEffect::None => {}
            NavEffect::Cancelled => out.push(OutputKind::Cancelled),
            NavEffect::Emit(KeyPayload::Key { key }) => {
                update_prefix(&mut next.word_prefix, *key);
                out.push(OutputKind::KeyPress { key: *key });
            }
            NavEffect::Emit(KeyPayload::Seq { name, keys }) => {
                next.word_prefix.clear();
                out.push(OutputKind::KeySequence {
                    name: name.clone(),
                    keys: keys.clone(),
                });
            }
            NavEffect::Emit(KeyPayload::Pointer) => {
                next.mode = Mode::Pointer;
                next.pointer = self.fresh_pointer();
                out.push(OutputKind::ModeSwitched { mode: Mode::Pointer });
            }
            NavEffect::Emit(KeyPayload::Predict { rank }) => {
                if let Ok(keys) = resolve_prediction(*rank, &next.word_prefix, &self.profile.dictionary) {
                    next.word_prefix.clear();
                    out.extend(keys.into_iter().map(|key| OutputKind::KeyPress { key }));
                }
            }
        }
    }
}

fn update_prefix(prefix: &mut String, key: Key) {
    match key {
        Key::Char(c) if c.is_alphabetic() => prefix.push(c),
        Key::Named(NamedKey::Backspace) => {
            prefix.pop();
        }
        _ => prefix.clear(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Icon {
    pub rect: ScreenRect,
    /// Application focused by double-clicking the icon.
    pub app: String,
}

/// Stand-in for the operating system: focus, icons and per-app text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MockDesktop {
    pub screen: ScreenRect,
    pub focused_app: String,
    pub icons: BTreeMap<String, Icon>,
    pub text_buffers: BTreeMap<String, String>,
    pub click_log: Vec<ClickEvent>,
    pub shortcut_log: Vec<String>,
}

impl MockDesktop {
    pub fn new(screen: ScreenRect, focused_app: &str) -> Self {
        Self {
            screen,
            focused_app: focused_app.to_string(),
            ..Self::default()
        }
    }

    pub fn with_icon(mut self, id: &str, rect: ScreenRect, app: &str) -> Self {
        self.icons.insert(id.to_string(), Icon { rect, app: app.to_string() });
        self
    }

    pub fn text(&self, app: &str) -> &str {
        self.text_buffers.get(app).map_or("", String::as_str)
    }

    pub fn focused_text(&self) -> &str {
        self.text(&self.focused_app)
    }

    /// App that `click` would focus: a double click inside an icon.
    pub fn focus_target(&self, click: &ClickEvent) -> Option<&str> {
        if click.kind != ClickKind::Double {
            return None;
        }
        self.icons
            .values()
            .find(|icon| icon.rect.contains(click.x, click.y))
            .map(|icon| icon.app.as_str())
    }

    /// Applies one output event. Returns the newly focused app, if focus moved.
    pub fn apply(&mut self, event: &OutputEvent) -> Option<String> {
        match &event.kind {
            OutputKind::KeyPress { key } => {
                let buffer = self.text_buffers.entry(self.focused_app.clone()).or_default();
                match (key.text(), key) {
                    (Some(c), _) => buffer.push(c),
                    (None, Key::Named(NamedKey::Backspace)) => {
                        buffer.pop();
                    }
                    _ => {}
                }
                None
            }
            OutputKind::KeySequence { name, .. } => {
                self.shortcut_log.push(name.clone());
                None
            }
            OutputKind::Click { .. } => {
                let click = event.click().expect("click event");
                self.click_log.push(click);
                let app = self.focus_target(&click)?.to_string();
                self.focused_app = app.clone();
                Some(app)
            }
            OutputKind::ModeSwitched { .. } | OutputKind::Cancelled => None,
        }
    }
}

pub fn apply_to_desktop(event: &OutputEvent, desktop: &MockDesktop) -> MockDesktop {
    let mut next = desktop.clone();
    next.apply(event);
    next
}

/// An engine wired to a mock desktop with an event log. Inputs must arrive in
/// timestamp order; due pending-click ticks are injected before each action.
#[derive(Debug, Clone)]
pub struct Session {
    engine: Engine,
    state: EngineState,
    desktop: MockDesktop,
    log: Vec<OutputEvent>,
    clock: Millis,
}

impl Session {
    pub fn new(engine: Engine, desktop: MockDesktop, mode: Mode) -> Self {
        let state = engine.initial_state(&desktop.focused_app, mode);
        Self::from_state(engine, desktop, state, 0)
    }

    pub fn from_state(engine: Engine, desktop: MockDesktop, state: EngineState, clock: Millis) -> Self {
        Self {
            engine,
            state,
            desktop,
            log: Vec::new(),
            clock,
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn state(&self) -> &EngineState {
        &self.state
    }

    pub fn desktop(&self) -> &MockDesktop {
        &self.desktop
    }

    pub fn log(&self) -> &[OutputEvent] {
        &self.log
    }

    pub fn clock(&self) -> Millis {
        self.clock
    }

    /// Replaces the engine (new profile or pointer depth) and restarts the
    /// devices in the current mode and app.
    pub fn reconfigure(&mut self, engine: Engine) {
        self.state = engine.initial_state(&self.desktop.focused_app, self.state.mode);
        self.engine = engine;
    }

    fn run(&mut self, input: Input) -> Vec<OutputEvent> {
        let (mut state, events) = self.engine.dispatch(&self.state, input);
        for event in &events {
            if let Some(app) = self.desktop.apply(event) {
                state = self.engine.on_focus_change(&state, &app);
            }
        }
        self.state = state;
        self.log.extend(events.iter().cloned());
        events
    }

    /// Delivers any pending-click ticks due at or before `now`.
    pub fn advance_to(&mut self, now: Millis) -> Vec<OutputEvent> {
        let mut out = Vec::new();
        while self.state.mode == Mode::Pointer {
            match self.state.pointer.deadline() {
                Some(deadline) if deadline <= now => {
                    self.clock = self.clock.max(deadline);
                    out.extend(self.run(Input::Tick(deadline)));
                }
                _ => break,
            }
        }
        self.clock = self.clock.max(now);
        out
    }

    pub fn feed(&mut self, event: UserActionEvent) -> Vec<OutputEvent> {
        let now = event.timestamp.max(self.clock);
        let mut out = self.advance_to(now);
        out.extend(self.run(Input::Action(UserActionEvent::new(event.action, now))));
        out
    }

    /// Runs the clock forward until no click is pending.
    pub fn finish(&mut self) -> Vec<OutputEvent> {
        match self.state.pointer.deadline() {
            Some(deadline) if self.state.mode == Mode::Pointer => self.advance_to(deadline),
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::UserAction::{self, *};
    use crate::hierarchy::shortest_witness;
    use crate::keyboard::{default_layout, media_player_layout, Dictionary, PREDICTION_SLOTS};
    use crate::profile::{Profile, SCHEMA_VERSION};
    use crate::signal::DetectionConfig;
    use proptest::prelude::*;

    const SCREEN: ScreenRect = ScreenRect::new(0, 0, 1920, 1080);

    fn profile() -> Arc<LoadedProfile> {
        let p = Profile {
            schema_version: SCHEMA_VERSION,
            user_id: "t".into(),
            default_layout: "default".into(),
            app_layouts: [("mediaplayer".to_string(), "media".to_string())].into(),
            detection: DetectionConfig::default(),
            pointer_max_depth: 3,
            dictionary: "d".into(),
            sounds: BTreeMap::new(),
        };
        let layouts = [
            ("default".to_string(), default_layout()),
            ("media".to_string(), media_player_layout()),
        ]
        .into();
        let dict: Dictionary = [("hello", 50u64), ("help", 40), ("he", 10)].into_iter().collect();
        Arc::new(LoadedProfile::from_parts(p, layouts, dict).unwrap())
    }

    fn engine() -> Engine {
        Engine::new(profile(), SCREEN)
    }

    fn witness_for(layout: &KeyboardLayout, payload: &KeyPayload) -> Vec<UserAction> {
        let path = layout.leaves().into_iter().find(|(_, p)| *p == payload).unwrap().0;
        shortest_witness(layout, &NavCursor::root(), &path).unwrap()
    }

    fn feed_all(session: &mut Session, actions: &[UserAction], start: Millis) -> Millis {
        let mut t = start;
        for &a in actions {
            t += 100;
            session.feed(UserActionEvent::new(a, t));
        }
        t
    }

    #[test]
    fn oracle_sequence_types_a() {
        let e = engine();
        let mut state = e.initial_state("editor", Mode::Keyboard);
        let mut all = Vec::new();
        for (i, a) in witness_for(&default_layout(), &KeyPayload::key(Key::Char('a'))).into_iter().enumerate() {
            let (s, ev) = e.dispatch(&state, Input::Action(UserActionEvent::new(a, i as u64)));
            state = s;
            all.extend(ev);
        }
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].kind, OutputKind::KeyPress { key: Key::Char('a') });
        assert_eq!(all[0].timestamp, 2);
        assert_eq!(state.word_prefix, "a");
    }

    #[test]
    fn pointer_leaf_switches_mode_and_zoom_out_returns() {
        let e = engine();
        let mut session = Session::new(e, MockDesktop::new(SCREEN, "editor"), Mode::Keyboard);
        let t = feed_all(&mut session, &witness_for(&default_layout(), &KeyPayload::Pointer), 0);
        assert_eq!(session.state().mode, Mode::Pointer);
        assert_eq!(session.log().last().unwrap().kind, OutputKind::ModeSwitched { mode: Mode::Pointer });
        feed_all(&mut session, &[ZoomOut], t);
        assert_eq!(session.state().mode, Mode::Keyboard);
        assert_eq!(session.log().last().unwrap().kind, OutputKind::ModeSwitched { mode: Mode::Keyboard });
    }

    #[test]
    fn focus_change_selects_layout_and_resets_cursor() {
        let e = engine();
        let mut state = e.initial_state("editor", Mode::Keyboard);
        state.cursor = NavCursor { path: vec![0], selected: 2 };
        let moved = e.on_focus_change(&state, "mediaplayer");
        assert_eq!(moved.cursor, NavCursor::root());
        assert_eq!(e.layout(&moved), &media_player_layout());
        assert_eq!(moved.pointer, state.pointer);
        assert_eq!(e.layout(&e.on_focus_change(&state, "unknown")), &default_layout());
    }

    #[test]
    fn desktop_text_and_focus() {
        let mail = ScreenRect::new(100, 100, 64, 64);
        let mut d = MockDesktop::new(SCREEN, "editor").with_icon("mail-icon", mail, "mail");
        let press = |key| OutputEvent { timestamp: 0, kind: OutputKind::KeyPress { key } };
        d.apply(&press(Key::Char('h')));
        d.apply(&press(Key::Named(NamedKey::Backspace)));
        d.apply(&press(Key::Named(NamedKey::Backspace)));
        assert_eq!(d.focused_text(), "");
        d.apply(&press(Key::Named(NamedKey::Enter)));
        assert_eq!(d.focused_text(), "\n");

        let click = |x, y, click| OutputEvent { timestamp: 0, kind: OutputKind::Click { x, y, click } };
        assert_eq!(d.apply(&click(5, 5, ClickKind::Double)), None);
        assert_eq!(d.apply(&click(110, 110, ClickKind::Single)), None);
        assert_eq!(d.focused_app, "editor");
        let d2 = apply_to_desktop(&click(110, 110, ClickKind::Double), &d);
        assert_eq!(d2.focused_app, "mail");
        assert_eq!(d2.click_log.len(), 3);
    }

    #[test]
    fn prediction_completes_word() {
        let e = engine();
        let layout = default_layout();
        let mut session = Session::new(e, MockDesktop::new(SCREEN, "editor"), Mode::Keyboard);
        let mut t = 0;
        for c in ['h', 'e'] {
            t = feed_all(&mut session, &witness_for(&layout, &KeyPayload::key(Key::Char(c))), t);
        }
        assert_eq!(session.state().word_prefix, "he");
        // rank 1 of "he*" by frequency: hello(50), help(40), he(10)
        t = feed_all(&mut session, &witness_for(&layout, &KeyPayload::Predict { rank: 1 }), t);
        assert_eq!(session.desktop().focused_text(), "help ");
        assert_eq!(session.state().word_prefix, "");
        // with an empty prefix rank 5 is unbound and emits nothing
        let before = session.log().len();
        feed_all(&mut session, &witness_for(&layout, &KeyPayload::Predict { rank: PREDICTION_SLOTS - 1 }), t);
        assert_eq!(session.log().len(), before);
    }

    #[test]
    fn pending_click_resolves_by_tick_or_second_zoom() {
        let e = engine();
        let mut s = Session::new(e.clone(), MockDesktop::new(SCREEN, "editor"), Mode::Pointer);
        let t = feed_all(&mut s, &[ZoomIn, ZoomIn, ZoomIn, ZoomIn], 0);
        assert_eq!(s.state().pointer.deadline(), Some(t + 4000));
        let out = s.finish();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].timestamp, t + 4000);
        assert_eq!(out[0].click().unwrap().kind, ClickKind::Single);

        let mut s = Session::new(e, MockDesktop::new(SCREEN, "editor"), Mode::Pointer);
        feed_all(&mut s, &[ZoomIn, ZoomIn, ZoomIn, ZoomIn, ZoomIn], 0);
        assert_eq!(s.log().len(), 1);
        assert_eq!(s.log()[0].click().unwrap().kind, ClickKind::Double);
        assert!(s.finish().is_empty());
    }

    #[test]
    fn late_action_gets_tick_injected_first() {
        let mut s = Session::new(engine(), MockDesktop::new(SCREEN, "editor"), Mode::Pointer);
        let t = feed_all(&mut s, &[ZoomIn, ZoomIn, ZoomIn, ZoomIn], 0);
        s.feed(UserActionEvent::new(Scroll, t + 10_000));
        assert_eq!(s.log().len(), 1);
        assert_eq!(s.log()[0].timestamp, t + 4000);
        assert_eq!(s.state().pointer.highlighted.index(), 1);
    }

    #[test]
    fn event_log_round_trips() {
        let events = vec![
            OutputEvent { timestamp: 1, kind: OutputKind::KeyPress { key: Key::Named(NamedKey::Space) } },
            OutputEvent {
                timestamp: 2,
                kind: OutputKind::KeySequence { name: "SEND".into(), keys: vec![Key::Named(NamedKey::Ctrl), Key::Named(NamedKey::Enter)] },
            },
            OutputEvent { timestamp: 3, kind: OutputKind::Click { x: 4, y: 5, click: ClickKind::Double } },
            OutputEvent { timestamp: 4, kind: OutputKind::ModeSwitched { mode: Mode::Pointer } },
            OutputEvent { timestamp: 5, kind: OutputKind::Cancelled },
        ];
        let text = write_event_log(&events);
        assert_eq!(text.lines().next().unwrap(), r#"{"timestamp":1,"type":"key_press","key":"SPACE"}"#);
        assert_eq!(parse_event_log(&text).unwrap(), events);
    }

    fn arb_inputs() -> impl Strategy<Value = Vec<(u8, u64)>> {
        proptest::collection::vec((0u8..4, 1u64..6000), 0..120)
    }

    fn replay(inputs: &[(u8, u64)]) -> Session {
        let mut s = Session::new(engine(), MockDesktop::new(SCREEN, "editor"), Mode::Keyboard);
        let mut t = 0;
        for &(code, dt) in inputs {
            t += dt;
            match UserAction::from_index(code as usize) {
                Some(a) => {
                    s.feed(UserActionEvent::new(a, t));
                }
                None => {
                    s.advance_to(t);
                }
            }
        }
        s.finish();
        s
    }

    proptest! {
        #[test]
        fn log_is_deterministic(inputs in arb_inputs()) {
            prop_assert_eq!(write_event_log(replay(&inputs).log()), write_event_log(replay(&inputs).log()));
        }

        #[test]
        fn mode_switch_events_match_mode_flips(inputs in arb_inputs()) {
            let s = replay(&inputs);
            let mut mode = Mode::Keyboard;
            for e in s.log() {
                if let OutputKind::ModeSwitched { mode: m } = e.kind {
                    prop_assert_ne!(m, mode);
                    mode = m;
                }
            }
            prop_assert_eq!(mode, s.state().mode);
        }

        #[test]
        fn clicks_stay_on_screen(inputs in arb_inputs()) {
            for c in replay(&inputs).log().iter().filter_map(OutputEvent::click) {
                prop_assert!(SCREEN.contains(c.x, c.y));
            }
        }
    }
}
