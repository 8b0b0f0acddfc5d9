//! Quadrant pointing device.
//!
//! The screen is split into four quadrants; `Scroll` cycles the highlight,
//! `ZoomIn` descends into the highlighted one. At the configured maximum depth
//! a further `ZoomIn` arms a four-second click window: another `ZoomIn` inside
//! the window double-clicks, otherwise a clock tick at the deadline produces a
//! single click. The window is half-open, so an input at exactly the deadline
//! is late.
//!
//! Time is always passed in; the machine never reads a clock.

use serde::{Deserialize, Serialize};

use crate::action::{Millis, UserAction};

pub const CLICK_WINDOW_MS: Millis = 4000;

/// Half-open pixel rectangle `[x, x+w) × [y, y+h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ScreenRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl ScreenRect {
    pub const fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    pub fn contains(&self, px: u32, py: u32) -> bool {
        px >= self.x && px < self.x + self.w && py >= self.y && py < self.y + self.h
    }

    pub fn contains_rect(&self, other: &ScreenRect) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.x + other.w <= self.x + self.w
            && other.y + other.h <= self.y + self.h
    }

    /// Integer floor of the center.
    pub fn center(&self) -> (u32, u32) {
        (self.x + self.w / 2, self.y + self.h / 2)
    }

    pub fn is_valid(&self) -> bool {
        self.w >= 1 && self.h >= 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrant {
    TopLeft = 0,
    TopRight = 1,
    BottomLeft = 2,
    BottomRight = 3,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::TopLeft,
        Quadrant::TopRight,
        Quadrant::BottomLeft,
        Quadrant::BottomRight,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn next(self) -> Self {
        Self::ALL[(self.index() + 1) % 4]
    }

    fn is_right(self) -> bool {
        matches!(self, Quadrant::TopRight | Quadrant::BottomRight)
    }

    fn is_bottom(self) -> bool {
        matches!(self, Quadrant::BottomLeft | Quadrant::BottomRight)
    }
}

/// One quadrant of `rect`. Top/left halves take the ceiling of the split,
/// bottom/right the floor. A 1-pixel dimension cannot be split; both halves
/// then keep the full pixel.
pub fn subdivide(rect: ScreenRect, quadrant: Quadrant) -> ScreenRect {
    fn split(origin: u32, len: u32, far: bool) -> (u32, u32) {
        if len <= 1 {
            return (origin, len);
        }
        let near = len.div_ceil(2);
        if far {
            (origin + near, len - near)
        } else {
            (origin, near)
        }
    }
    let (x, w) = split(rect.x, rect.w, quadrant.is_right());
    let (y, h) = split(rect.y, rect.h, quadrant.is_bottom());
    ScreenRect { x, y, w, h }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PointerError {
    #[error("point ({x}, {y}) lies outside the screen")]
    OutsideScreen { x: u32, y: u32 },
    #[error("depth must be positive")]
    ZeroDepth,
}

/// The unique quadrant path of length `depth` whose final rect contains the point.
pub fn quadrant_path(screen: ScreenRect, x: u32, y: u32, depth: usize) -> Result<Vec<Quadrant>, PointerError> {
    if !screen.contains(x, y) {
        return Err(PointerError::OutsideScreen { x, y });
    }
    if depth == 0 {
        return Err(PointerError::ZeroDepth);
    }
    let mut rect = screen;
    let mut path = Vec::with_capacity(depth);
    for _ in 0..depth {
        let q = Quadrant::ALL
            .into_iter()
            .find(|&q| subdivide(rect, q).contains(x, y))
            .expect("quadrants cover their parent");
        rect = subdivide(rect, q);
        path.push(q);
    }
    Ok(path)
}

pub fn rect_at(screen: ScreenRect, path: &[Quadrant]) -> ScreenRect {
    path.iter().fold(screen, |r, &q| subdivide(r, q))
}

/// Smallest positive depth at which the larger screen side, halved that many
/// times (rounding up), is within `precision` pixels.
pub fn required_depth(screen: ScreenRect, precision: u32) -> usize {
    let side = screen.w.max(screen.h) as u64;
    let precision = precision.max(1) as u64;
    let mut depth = 1;
    while side.div_ceil(1 << depth) > precision {
        depth += 1;
    }
    depth
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum PointerPhase {
    Navigating,
    PendingClick { deadline: Millis },
}

/// Navigation state. The rect stack is kept as the quadrant path from the full
/// screen; [`PointerState::rect_stack`] expands it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointerState {
    pub screen: ScreenRect,
    pub path: Vec<Quadrant>,
    pub highlighted: Quadrant,
    pub phase: PointerPhase,
    pub max_depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClickKind {
    Single,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClickEvent {
    pub x: u32,
    pub y: u32,
    pub kind: ClickKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointerInput {
    Action(UserAction),
    Tick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointerOutput {
    Click(ClickEvent),
    SwitchToKeyboard,
}

impl PointerState {
    pub fn new(screen: ScreenRect, max_depth: usize) -> Self {
        Self {
            screen,
            path: Vec::new(),
            highlighted: Quadrant::TopLeft,
            phase: PointerPhase::Navigating,
            max_depth: max_depth.max(1),
        }
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn current_rect(&self) -> ScreenRect {
        rect_at(self.screen, &self.path)
    }

    pub fn rect_stack(&self) -> Vec<ScreenRect> {
        let mut stack = vec![self.screen];
        for &q in &self.path {
            let last = *stack.last().unwrap();
            stack.push(subdivide(last, q));
        }
        stack
    }

    pub fn highlighted_rect(&self) -> ScreenRect {
        subdivide(self.current_rect(), self.highlighted)
    }

    pub fn deadline(&self) -> Option<Millis> {
        match self.phase {
            PointerPhase::PendingClick { deadline } => Some(deadline),
            PointerPhase::Navigating => None,
        }
    }

    fn reset(&self) -> Self {
        Self::new(self.screen, self.max_depth)
    }

    fn click(&self, kind: ClickKind) -> (Self, Option<PointerOutput>) {
        let (x, y) = self.current_rect().center();
        (self.reset(), Some(PointerOutput::Click(ClickEvent { x, y, kind })))
    }

    /// Advances the pointer by one input observed at time `now`.
    pub fn step(&self, input: PointerInput, now: Millis) -> (Self, Option<PointerOutput>) {
        match self.phase {
            PointerPhase::Navigating => match input {
                PointerInput::Tick => (self.clone(), None),
                PointerInput::Action(UserAction::Scroll) => {
                    let mut next = self.clone();
                    next.highlighted = self.highlighted.next();
                    (next, None)
                }
                PointerInput::Action(UserAction::ZoomIn) => {
                    let mut next = self.clone();
                    if self.depth() < self.max_depth {
                        next.path.push(self.highlighted);
                        next.highlighted = Quadrant::TopLeft;
                    } else {
                        next.phase = PointerPhase::PendingClick {
                            deadline: now + CLICK_WINDOW_MS,
                        };
                    }
                    (next, None)
                }
                PointerInput::Action(UserAction::ZoomOut) => {
                    let mut next = self.clone();
                    match next.path.pop() {
                        Some(q) => {
                            next.highlighted = q;
                            (next, None)
                        }
                        None => (self.reset(), Some(PointerOutput::SwitchToKeyboard)),
                    }
                }
            },
            PointerPhase::PendingClick { deadline } => match input {
                PointerInput::Tick if now >= deadline => self.click(ClickKind::Single),
                PointerInput::Tick => (self.clone(), None),
                PointerInput::Action(UserAction::ZoomIn) if now < deadline => self.click(ClickKind::Double),
                PointerInput::Action(action) if now >= deadline => {
                    // The single click was already due; the late input then
                    // acts on the freshly reset pointer.
                    let (reset, click) = self.click(ClickKind::Single);
                    let (next, _) = reset.step(PointerInput::Action(action), now);
                    (next, click)
                }
                PointerInput::Action(UserAction::ZoomOut) => {
                    let mut next = self.clone();
                    next.phase = PointerPhase::Navigating;
                    (next, None)
                }
                PointerInput::Action(_) => (self.clone(), None),
            },
        }
    }

    /// Returns `false` if the state violates its structural invariants.
    pub fn is_consistent(&self) -> bool {
        self.path.len() <= self.max_depth
            && (matches!(self.phase, PointerPhase::Navigating) || self.path.len() == self.max_depth)
            && self.current_rect().is_valid()
    }
}

/// Scrolls and zoom-ins that walk a fresh pointer down `path`.
pub fn navigation_actions(path: &[Quadrant]) -> Vec<UserAction> {
    let mut actions = Vec::new();
    for q in path {
        actions.extend(std::iter::repeat_n(UserAction::Scroll, q.index()));
        actions.push(UserAction::ZoomIn);
    }
    actions
}
