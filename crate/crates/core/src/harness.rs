//! Simulated evaluation: task scripts, an exact planner over the dispatcher's
//! state graph, perfect and noisy user models, and aggregate reports.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::action::{Millis, UserAction, UserActionEvent};
use crate::dispatcher::{Engine, EngineState, Icon, Input, MockDesktop, Mode, OutputEvent, OutputKind, Session};
use crate::keyboard::{Key, KeyPayload, NamedKey};
use crate::pointer::{quadrant_path, rect_at, ClickKind, PointerPhase, ScreenRect, CLICK_WINDOW_MS};
use crate::profile::LoadedProfile;
use crate::signal::NoiseModel;

pub const DEFAULT_BUDGET_FACTOR: usize = 50;
const DEFAULT_STATE_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    ClickPoint {
        x: u32,
        y: u32,
        #[serde(default)]
        double: bool,
    },
    /// Double-click the icon with this id.
    FocusApp(String),
    TypeText(String),
    InvokeShortcut(String),
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::ClickPoint { x, y, double } => {
                write!(f, "{} ({x}, {y})", if *double { "double-click" } else { "click" })
            }
            Goal::FocusApp(icon) => write!(f, "focus via icon `{icon}`"),
            Goal::TypeText(text) => write!(f, "type {text:?}"),
            Goal::InvokeShortcut(name) => write!(f, "invoke {name}"),
        }
    }
}

fn keyboard_mode() -> Mode {
    Mode::Keyboard
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskScript {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub screen: ScreenRect,
    pub initial_app: String,
    #[serde(default = "keyboard_mode")]
    pub initial_mode: Mode,
    #[serde(default)]
    pub icons: BTreeMap<String, Icon>,
    pub goals: Vec<Goal>,
}

impl TaskScript {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let script: Self = serde_json::from_str(text)?;
        script.validate()?;
        Ok(script)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::InvalidScript(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("script serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidScript(m));
        if !self.screen.is_valid() {
            return bad("screen must have positive size".into());
        }
        for (id, icon) in &self.icons {
            if !icon.rect.is_valid() || !self.screen.contains_rect(&icon.rect) {
                return bad(format!("icon `{id}` is not within the screen"));
            }
        }
        for (i, goal) in self.goals.iter().enumerate() {
            match goal {
                Goal::ClickPoint { x, y, .. } if !self.screen.contains(*x, *y) => {
                    return bad(format!("goal {i}: ({x}, {y}) is off screen"));
                }
                Goal::FocusApp(id) if !self.icons.contains_key(id) => {
                    return bad(format!("goal {i}: unknown icon `{id}`"));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn desktop(&self) -> MockDesktop {
        MockDesktop {
            icons: self.icons.clone(),
            ..MockDesktop::new(self.screen, &self.initial_app)
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("task script: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("task script: {0}")]
    InvalidScript(String),
    #[error("goal {goal} ({description}): character {ch:?} is not on any layout")]
    MissingCharacter { goal: usize, description: String, ch: char },
    #[error("goal {goal} ({description}) is unreachable")]
    Unreachable { goal: usize, description: String },
    #[error("planner gave up after {explored} states")]
    SearchLimit { explored: usize },
    #[error("user model: {0}")]
    Model(String),
}

/// How far through the goal list a run is. While typing, `matched` counts
/// correct characters and `wrong` the erroneous ones typed after them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Progress {
    pub goal: usize,
    pub matched: usize,
    pub wrong: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Target {
    Click { cell: ScreenRect, kind: ClickKind },
    Focus { icon: ScreenRect },
    Text(Vec<char>),
    Shortcut(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Neutral,
    Advanced,
    Stray,
}

fn intersects(a: &ScreenRect, b: &ScreenRect) -> bool {
    a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h
}

#[derive(Debug, Clone)]
struct GoalSet {
    targets: Vec<Target>,
}

impl GoalSet {
    fn new(script: &TaskScript, max_depth: usize) -> Self {
        let targets = script
            .goals
            .iter()
            .map(|goal| match goal {
                Goal::ClickPoint { x, y, double } => {
                    let path = quadrant_path(script.screen, *x, *y, max_depth).expect("validated point");
                    Target::Click {
                        cell: rect_at(script.screen, &path),
                        kind: if *double { ClickKind::Double } else { ClickKind::Single },
                    }
                }
                Goal::FocusApp(id) => Target::Focus {
                    icon: script.icons[id].rect,
                },
                Goal::TypeText(text) => Target::Text(text.chars().collect()),
                Goal::InvokeShortcut(name) => Target::Shortcut(name.clone()),
            })
            .collect();
        Self { targets }
    }

    fn start(&self) -> Progress {
        let mut p = Progress::default();
        self.skip_trivial(&mut p);
        p
    }

    fn skip_trivial(&self, p: &mut Progress) {
        while matches!(self.targets.get(p.goal), Some(Target::Text(t)) if t.is_empty()) {
            p.goal += 1;
        }
    }

    fn done(&self, p: &Progress) -> bool {
        p.goal >= self.targets.len()
    }

    fn complete(&self, p: &mut Progress) -> Verdict {
        *p = Progress {
            goal: p.goal + 1,
            ..Progress::default()
        };
        self.skip_trivial(p);
        Verdict::Advanced
    }

    /// Region whose max-depth cells can satisfy the current goal.
    fn click_region(&self, p: &Progress) -> Option<ScreenRect> {
        match self.targets.get(p.goal)? {
            Target::Click { cell, .. } => Some(*cell),
            Target::Focus { icon } => Some(*icon),
            _ => None,
        }
    }

    /// Scores one output against the current goal and updates `p`. Wrong
    /// characters during a typing goal are recorded so a run can back out.
    fn observe(&self, p: &mut Progress, kind: &OutputKind) -> Verdict {
        let Some(target) = self.targets.get(p.goal) else {
            return Verdict::Neutral;
        };
        match (kind, target) {
            (OutputKind::ModeSwitched { .. } | OutputKind::Cancelled, _) => Verdict::Neutral,
            (OutputKind::KeyPress { key }, Target::Text(text)) => match (key, key.text()) {
                (_, Some(c)) if p.wrong == 0 && text.get(p.matched) == Some(&c) => {
                    p.matched += 1;
                    if p.matched == text.len() {
                        self.complete(p)
                    } else {
                        Verdict::Advanced
                    }
                }
                (_, Some(_)) => {
                    p.wrong += 1;
                    Verdict::Stray
                }
                (Key::Named(NamedKey::Backspace), None) if p.wrong > 0 => {
                    p.wrong -= 1;
                    Verdict::Advanced
                }
                (Key::Named(NamedKey::Backspace), None) if p.matched > 0 => {
                    p.matched -= 1;
                    Verdict::Advanced
                }
                _ => Verdict::Stray,
            },
            (OutputKind::KeySequence { name, .. }, Target::Shortcut(wanted)) if name == wanted => self.complete(p),
            (&OutputKind::Click { x, y, click }, &Target::Click { cell, kind }) if click == kind && cell.contains(x, y) => {
                self.complete(p)
            }
            (&OutputKind::Click { x, y, click }, &Target::Focus { icon })
                if click == ClickKind::Double && icon.contains(x, y) =>
            {
                self.complete(p)
            }
            _ => Verdict::Stray,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStep {
    Act(UserAction),
    /// Let the pending-click window expire (single click).
    Wait,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

impl Plan {
    pub fn actions(&self) -> Vec<UserAction> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                PlanStep::Act(a) => Some(*a),
                PlanStep::Wait => None,
            })
            .collect()
    }

    pub fn action_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, PlanStep::Act(_))).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Node {
    state: EngineState,
    progress: Progress,
}

/// The planner's clock: every action happens at t = 0, so a pending click
/// always expires at `CLICK_WINDOW_MS`.
const PLAN_TIME: Millis = 0;

fn normalize(state: &EngineState) -> EngineState {
    let mut s = state.clone();
    if let PointerPhase::PendingClick { .. } = s.pointer.phase {
        s.pointer.phase = PointerPhase::PendingClick {
            deadline: PLAN_TIME + CLICK_WINDOW_MS,
        };
    }
    s
}

/// Exact shortest-plan search over (engine state, goal progress).
///
/// Edges are the three actions (cost 1) and, while a click is pending, letting
/// the window expire (cost 0). Edges whose outputs do not serve the current
/// goal are dropped. Zooming the pointer into a quadrant that holds no
/// satisfying click point is also dropped: without a click, the only way back
/// is the zoom-out that restores the exact prior state.
#[derive(Debug, Clone)]
pub struct Planner {
    engine: Engine,
    desktop: MockDesktop,
    script: TaskScript,
    goals: GoalSet,
    state_limit: usize,
}

impl Planner {
    pub fn new(script: &TaskScript, profile: Arc<LoadedProfile>) -> Result<Self, HarnessError> {
        script.validate()?;
        let engine = Engine::new(profile, script.screen);
        for (goal, g) in script.goals.iter().enumerate() {
            if let Goal::TypeText(text) = g {
                if let Some(ch) = text.chars().find(|&c| !on_some_layout(engine.profile(), c)) {
                    return Err(HarnessError::MissingCharacter {
                        goal,
                        description: g.to_string(),
                        ch,
                    });
                }
            }
        }
        Ok(Self {
            goals: GoalSet::new(script, engine.max_depth()),
            desktop: script.desktop(),
            engine,
            script: script.clone(),
            state_limit: DEFAULT_STATE_LIMIT,
        })
    }

    pub fn with_state_limit(mut self, limit: usize) -> Self {
        self.state_limit = limit;
        self
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn script(&self) -> &TaskScript {
        &self.script
    }

    pub fn initial_state(&self) -> EngineState {
        self.engine.initial_state(&self.script.initial_app, self.script.initial_mode)
    }

    pub fn initial_progress(&self) -> Progress {
        self.goals.start()
    }

    pub fn is_done(&self, progress: &Progress) -> bool {
        self.goals.done(progress)
    }

    pub fn plan(&self) -> Result<Plan, HarnessError> {
        self.plan_from(&self.initial_state(), self.initial_progress())
    }

    fn zoom_allowed(&self, node: &Node) -> bool {
        let pointer = &node.state.pointer;
        let entered = match pointer.phase {
            PointerPhase::PendingClick { .. } => return true,
            PointerPhase::Navigating if pointer.depth() < pointer.max_depth => pointer.highlighted_rect(),
            PointerPhase::Navigating => pointer.current_rect(),
        };
        self.goals
            .click_region(&node.progress)
            .is_some_and(|region| intersects(&region, &entered))
    }

    fn successor(&self, node: &Node, input: Input) -> Option<Node> {
        let (mut state, events) = self.engine.dispatch(&node.state, input);
        let mut progress = node.progress;
        for event in &events {
            if self.goals.observe(&mut progress, &event.kind) == Verdict::Stray {
                return None;
            }
            if let Some(app) = event.click().and_then(|c| self.desktop.focus_target(&c)) {
                state = self.engine.on_focus_change(&state, app);
            }
        }
        Some(Node { state, progress })
    }

    fn successors(&self, node: &Node, mut visit: impl FnMut(PlanStep, Node)) {
        if node.state.mode == Mode::Pointer {
            if let Some(deadline) = node.state.pointer.deadline() {
                if let Some(next) = self.successor(node, Input::Tick(deadline)) {
                    visit(PlanStep::Wait, next);
                }
            }
        }
        for action in UserAction::ALL {
            if node.state.mode == Mode::Pointer && action == UserAction::ZoomIn && !self.zoom_allowed(node) {
                continue;
            }
            let input = Input::Action(UserActionEvent::new(action, PLAN_TIME));
            if let Some(next) = self.successor(node, input) {
                visit(PlanStep::Act(action), next);
            }
        }
    }

    /// Shortest plan from an arbitrary engine state and progress.
    pub fn plan_from(&self, state: &EngineState, progress: Progress) -> Result<Plan, HarnessError> {
        let start = Node {
            state: normalize(state),
            progress,
        };
        let mut index: HashMap<Node, usize> = HashMap::new();
        let mut nodes: Vec<Node> = vec![start.clone()];
        let mut dist: Vec<usize> = vec![0];
        let mut parent: Vec<Option<(usize, PlanStep)>> = vec![None];
        let mut closed: Vec<bool> = vec![false];
        index.insert(start, 0);
        let mut queue = VecDeque::from([0usize]);
        let mut furthest = progress.goal;

        while let Some(i) = queue.pop_front() {
            if closed[i] {
                continue;
            }
            closed[i] = true;
            if self.goals.done(&nodes[i].progress) {
                let mut steps = Vec::new();
                let mut at = i;
                while let Some((prev, step)) = parent[at] {
                    steps.push(step);
                    at = prev;
                }
                steps.reverse();
                return Ok(Plan { steps });
            }
            furthest = furthest.max(nodes[i].progress.goal);
            let base = dist[i];
            let mut found = Vec::new();
            self.successors(&nodes[i], |step, next| found.push((step, next)));
            for (step, next) in found {
                let cost = base + usize::from(step != PlanStep::Wait);
                let j = match index.get(&next) {
                    Some(&j) if closed[j] || dist[j] <= cost => continue,
                    Some(&j) => j,
                    None => {
                        if nodes.len() >= self.state_limit {
                            return Err(HarnessError::SearchLimit { explored: nodes.len() });
                        }
                        nodes.push(next.clone());
                        dist.push(cost);
                        parent.push(None);
                        closed.push(false);
                        index.insert(next, nodes.len() - 1);
                        nodes.len() - 1
                    }
                };
                dist[j] = cost;
                parent[j] = Some((i, step));
                if step == PlanStep::Wait {
                    queue.push_front(j);
                } else {
                    queue.push_back(j);
                }
            }
        }
        Err(HarnessError::Unreachable {
            goal: furthest,
            description: self.script.goals[furthest].to_string(),
        })
    }
}

fn on_some_layout(profile: &LoadedProfile, ch: char) -> bool {
    profile.all_layouts().any(|layout| {
        layout
            .leaves()
            .iter()
            .any(|(_, p)| matches!(p, KeyPayload::Key { key } if key.text() == Some(ch)))
    })
}

/// Delay between consecutive user actions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Latency {
    Constant(Millis),
    /// Parameters of ln(milliseconds).
    LogNormal { mu: f64, sigma: f64 },
}

impl Latency {
    pub fn validate(&self) -> Result<(), HarnessError> {
        match *self {
            Latency::Constant(0) => Err(HarnessError::Model("constant latency must be positive".into())),
            Latency::LogNormal { mu, sigma } if !mu.is_finite() || !sigma.is_finite() || sigma < 0.0 => {
                Err(HarnessError::Model("lognormal needs finite mu and sigma >= 0".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Millis {
        match *self {
            Latency::Constant(ms) => ms,
            Latency::LogNormal { mu, sigma } => {
                let draw = LogNormal::new(mu, sigma).expect("validated").sample(rng);
                (draw.round() as Millis).max(1)
            }
        }
    }
}

impl FromStr for Latency {
    type Err = HarnessError;

    /// `const:MS` or `lognormal:MU,SIGMA`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || HarnessError::Model(format!("bad latency `{s}` (want const:MS or lognormal:MU,SIGMA)"));
        let latency = match s.split_once(':').ok_or_else(err)? {
            ("const", ms) => Latency::Constant(ms.parse().map_err(|_| err())?),
            ("lognormal", params) => {
                let (mu, sigma) = params.split_once(',').ok_or_else(err)?;
                Latency::LogNormal {
                    mu: mu.parse().map_err(|_| err())?,
                    sigma: sigma.parse().map_err(|_| err())?,
                }
            }
            _ => return Err(err()),
        };
        latency.validate()?;
        Ok(latency)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserKind {
    Perfect,
    Noisy(NoiseModel),
}

impl FromStr for UserKind {
    type Err = HarnessError;

    /// `perfect` or `noisy:RATE` (symmetric confusion, no misses or false fires).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || HarnessError::Model(format!("bad model `{s}` (want perfect or noisy:RATE)"));
        match s.split_once(':') {
            None if s == "perfect" => Ok(UserKind::Perfect),
            Some(("noisy", rate)) => {
                let model = NoiseModel::symmetric_confusion(rate.parse().map_err(|_| err())?, 0);
                model.validate().map_err(|e| HarnessError::Model(e.to_string()))?;
                Ok(UserKind::Noisy(model))
            }
            _ => Err(err()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserModel {
    pub kind: UserKind,
    pub latency: Latency,
    /// Seeds both latency draws and noise; overrides the noise model's own seed.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// A run fails once it has dispatched this many times the minimal count.
    pub budget_factor: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            budget_factor: DEFAULT_BUDGET_FACTOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskMetrics {
    pub actions_taken: usize,
    pub minimal_actions: usize,
    pub excess: i64,
    pub duration_ms: Millis,
    pub success: bool,
    pub replans: usize,
    pub stray_outputs: usize,
}

/// Plans keyed by start node; the planner is deterministic so sharing them
/// across runs does not change results.
#[derive(Debug, Default)]
pub struct PlanCache {
    plans: HashMap<Node, Arc<Plan>>,
}

const PLAN_CACHE_LIMIT: usize = 50_000;

impl PlanCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn get(&mut self, planner: &Planner, state: &EngineState, progress: Progress) -> Result<Arc<Plan>, HarnessError> {
        let key = Node {
            state: normalize(state),
            progress,
        };
        if let Some(plan) = self.plans.get(&key) {
            return Ok(plan.clone());
        }
        let plan = Arc::new(planner.plan_from(state, progress)?);
        if self.plans.len() < PLAN_CACHE_LIMIT {
            self.plans.insert(key, plan.clone());
        }
        Ok(plan)
    }
}

pub fn run(
    script: &TaskScript,
    model: &UserModel,
    profile: Arc<LoadedProfile>,
    options: RunOptions,
) -> Result<TaskMetrics, HarnessError> {
    let planner = Planner::new(script, profile)?;
    run_with(&planner, model, options, &mut PlanCache::new())
}

/// Executes one simulated user against a fresh session. Perfect users replay
/// the optimal plan; noisy users perturb each intended action and replan from
/// the resulting state whenever the detections differ from the intent.
pub fn run_with(
    planner: &Planner,
    model: &UserModel,
    options: RunOptions,
    cache: &mut PlanCache,
) -> Result<TaskMetrics, HarnessError> {
    model.latency.validate()?;
    let mut latency_rng = ChaCha8Rng::seed_from_u64(model.seed);
    latency_rng.set_stream(1);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(model.seed);

    let mut progress = planner.initial_progress();
    let initial = planner.initial_state();
    let minimal = cache.get(planner, &initial, progress)?.action_count();
    let budget = options.budget_factor * minimal.max(1);
    let mut session = Session::from_state(planner.engine.clone(), planner.desktop.clone(), initial, 0);

    let mut plan = cache.get(planner, session.state(), progress)?;
    let mut cursor = 0usize;
    let mut actions_taken = 0usize;
    let mut attempts = 0usize;
    let mut replans = 0usize;
    let mut strays = 0usize;
    let mut success = true;

    let mut observe = |events: &[OutputEvent], progress: &mut Progress| {
        for e in events {
            if planner.goals.observe(progress, &e.kind) == Verdict::Stray {
                strays += 1;
            }
        }
    };

    while !planner.goals.done(&progress) {
        if actions_taken >= budget || attempts >= budget {
            success = false;
            break;
        }
        let mut deviated = false;
        match plan.steps.get(cursor).copied() {
            None => deviated = true,
            Some(PlanStep::Wait) => match session.state().pointer.deadline() {
                Some(deadline) if session.state().mode == Mode::Pointer => {
                    let out = session.advance_to(deadline);
                    observe(&out, &mut progress);
                }
                _ => deviated = true,
            },
            Some(PlanStep::Act(intended)) => {
                attempts += 1;
                let mut delay = model.latency.sample(&mut latency_rng);
                if let (Mode::Pointer, Some(deadline)) = (session.state().mode, session.state().pointer.deadline()) {
                    // a user confirming a double click acts inside the window
                    delay = delay.min(deadline.saturating_sub(session.clock() + 1));
                }
                let now = session.clock() + delay;
                let detections = match &model.kind {
                    UserKind::Perfect => crate::signal::Detections {
                        primary: Some(intended),
                        spurious: Vec::new(),
                    },
                    UserKind::Noisy(noise) => noise.perturb(intended, &mut noise_rng),
                };
                deviated = detections.primary != Some(intended) || !detections.spurious.is_empty();
                for (offset, action) in detections.iter().enumerate() {
                    let out = session.feed(UserActionEvent::new(action, now + offset as Millis));
                    actions_taken += 1;
                    observe(&out, &mut progress);
                }
            }
        }
        cursor += 1;
        if deviated && !planner.goals.done(&progress) {
            replans += 1;
            match cache.get(planner, session.state(), progress) {
                Ok(p) => {
                    plan = p;
                    cursor = 0;
                }
                Err(_) => {
                    success = false;
                    break;
                }
            }
        }
    }

    Ok(TaskMetrics {
        actions_taken,
        minimal_actions: minimal,
        excess: actions_taken as i64 - minimal as i64,
        duration_ms: session.clock(),
        success,
        replans,
        stray_outputs: strays,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    /// Mean and sample standard deviation (0 for fewer than two values).
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.is_empty() {
            return Stat { mean: 0.0, std: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Stat { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: usize,
    pub successes: usize,
    pub actions: Stat,
    pub excess: Stat,
    pub duration_ms: Stat,
    /// Squared Pearson correlation of duration against actions; `None` when
    /// undefined (fewer than two runs or a constant series).
    pub r2_duration_actions: Option<f64>,
    pub per_action_s: f64,
    /// Mean actions × per-action seconds. A projection, not a measurement.
    pub projected_human_s: f64,
}

pub fn pearson_r2(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy * sxy / (sxx * syy)).min(1.0))
}

pub fn summarize(metrics: &[TaskMetrics], per_action_s: f64) -> Summary {
    let actions: Vec<f64> = metrics.iter().map(|m| m.actions_taken as f64).collect();
    let excess: Vec<f64> = metrics.iter().map(|m| m.excess as f64).collect();
    let duration: Vec<f64> = metrics.iter().map(|m| m.duration_ms as f64).collect();
    let actions_stat = Stat::of(&actions);
    Summary {
        runs: metrics.len(),
        successes: metrics.iter().filter(|m| m.success).count(),
        actions: actions_stat,
        excess: Stat::of(&excess),
        duration_ms: Stat::of(&duration),
        r2_duration_actions: pearson_r2(&duration, &actions),
        per_action_s,
        projected_human_s: actions_stat.mean * per_action_s,
    }
}

impl Summary {
    /// Two-line tab-separated table: header and values.
    pub fn to_tsv(&self) -> String {
        let r2 = self.r2_duration_actions.map_or("undefined".to_string(), |r| format!("{r:.4}"));
        format!(
            "runs\tsuccesses\tactions_mean\tactions_std\texcess_mean\texcess_std\tduration_ms_mean\tduration_ms_std\tr2_duration_actions\tprojected_human_s\n\
             {}\t{}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.1}\t{:.1}\t{}\t{:.1}\n",
            self.runs,
            self.successes,
            self.actions.mean,
            self.actions.std,
            self.excess.mean,
            self.excess.std,
            self.duration_ms.mean,
            self.duration_ms.std,
            r2,
            self.projected_human_s,
        )
    }
}
