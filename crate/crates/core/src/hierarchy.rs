//! Cursor navigation over a layout tree driven by the three user actions.
//!
//! * `Scroll` steps the highlight to the next sibling, wrapping at the end.
//! * `ZoomIn` on an internal node descends and highlights its first child;
//!   on a leaf it emits the leaf's payload and returns the cursor to the root.
//! * `ZoomOut` ascends one level, re-highlighting the node it came from; at
//!   the root it cancels and resets the highlight to the first group.
//!
//! [`shortest_witness`] and [`minimal_actions`] search the exact transition
//! graph breadth-first; they never use the per-level closed form.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::action::UserAction;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeBody<P> {
    Children(Vec<LayoutNode<P>>),
    Leaf(P),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutNode<P> {
    pub label: String,
    pub body: NodeBody<P>,
}

/// A layout is just its root node.
pub type LayoutTree<P> = LayoutNode<P>;

impl<P> LayoutNode<P> {
    pub fn leaf(label: impl Into<String>, payload: P) -> Self {
        Self {
            label: label.into(),
            body: NodeBody::Leaf(payload),
        }
    }

    pub fn group(label: impl Into<String>, children: Vec<LayoutNode<P>>) -> Self {
        Self {
            label: label.into(),
            body: NodeBody::Children(children),
        }
    }

    pub fn children(&self) -> Option<&[LayoutNode<P>]> {
        match &self.body {
            NodeBody::Children(c) => Some(c),
            NodeBody::Leaf(_) => None,
        }
    }

    pub fn payload(&self) -> Option<&P> {
        match &self.body {
            NodeBody::Leaf(p) => Some(p),
            NodeBody::Children(_) => None,
        }
    }

    pub fn node_at(&self, path: &[usize]) -> Option<&LayoutNode<P>> {
        path.iter()
            .try_fold(self, |node, &i| node.children().and_then(|c| c.get(i)))
    }

    /// All leaves in depth-first order with their child-index paths.
    pub fn leaves(&self) -> Vec<(Vec<usize>, &P)> {
        fn walk<'a, P>(node: &'a LayoutNode<P>, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a P)>) {
            match &node.body {
                NodeBody::Leaf(p) => out.push((path.clone(), p)),
                NodeBody::Children(children) => {
                    for (i, child) in children.iter().enumerate() {
                        path.push(i);
                        walk(child, path, out);
                        path.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Labels of the nodes along `path`, excluding the root.
    pub fn breadcrumb(&self, path: &[usize]) -> Vec<String> {
        let mut node = self;
        let mut labels = Vec::with_capacity(path.len());
        for &i in path {
            match node.children().and_then(|c| c.get(i)) {
                Some(child) => {
                    labels.push(child.label.clone());
                    node = child;
                }
                None => break,
            }
        }
        labels
    }
}

/// Position within a tree: the internal node addressed by `path`, and the
/// highlighted child of that node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NavCursor {
    pub path: Vec<usize>,
    pub selected: usize,
}

impl NavCursor {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    /// Path of the highlighted node.
    pub fn highlighted_path(&self) -> Vec<usize> {
        let mut p = self.path.clone();
        p.push(self.selected);
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NavEffect<'a, P> {
    None,
    Emit(&'a P),
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HierarchyError {
    #[error("cursor {0:?} does not address a valid position in the layout")]
    InvalidCursor(NavCursor),
    #[error("path {0:?} does not address a leaf")]
    NotALeaf(Vec<usize>),
    #[error("leaf {0:?} is unreachable from the start cursor")]
    Unreachable(Vec<usize>),
}

/// Outcome of a transition, identifying an emitting leaf by its path.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Outcome {
    None,
    Emit(Vec<usize>),
    Cancelled,
}

fn transition<P>(
    tree: &LayoutTree<P>,
    cursor: &NavCursor,
    action: UserAction,
) -> Result<(NavCursor, Outcome), HierarchyError> {
    let invalid = || HierarchyError::InvalidCursor(cursor.clone());
    let siblings = tree
        .node_at(&cursor.path)
        .and_then(LayoutNode::children)
        .filter(|c| !c.is_empty())
        .ok_or_else(invalid)?;
    if cursor.selected >= siblings.len() {
        return Err(invalid());
    }
    Ok(match action {
        UserAction::Scroll => (
            NavCursor {
                path: cursor.path.clone(),
                selected: (cursor.selected + 1) % siblings.len(),
            },
            Outcome::None,
        ),
        UserAction::ZoomIn => match &siblings[cursor.selected].body {
            NodeBody::Children(children) if !children.is_empty() => (
                NavCursor {
                    path: cursor.highlighted_path(),
                    selected: 0,
                },
                Outcome::None,
            ),
            NodeBody::Children(_) => return Err(invalid()),
            NodeBody::Leaf(_) => (NavCursor::root(), Outcome::Emit(cursor.highlighted_path())),
        },
        UserAction::ZoomOut => match cursor.path.split_last() {
            Some((&popped, parent)) => (
                NavCursor {
                    path: parent.to_vec(),
                    selected: popped,
                },
                Outcome::None,
            ),
            None => (NavCursor::root(), Outcome::Cancelled),
        },
    })
}

/// Applies one user action to `cursor`.
pub fn apply_action<'a, P>(
    tree: &'a LayoutTree<P>,
    cursor: &NavCursor,
    action: UserAction,
) -> Result<(NavCursor, NavEffect<'a, P>), HierarchyError> {
    let (next, outcome) = transition(tree, cursor, action)?;
    let effect = match outcome {
        Outcome::None => NavEffect::None,
        Outcome::Cancelled => NavEffect::Cancelled,
        Outcome::Emit(path) => NavEffect::Emit(
            tree.node_at(&path)
                .and_then(LayoutNode::payload)
                .expect("emit outcome addresses a leaf"),
        ),
    };
    Ok((next, effect))
}

pub fn validate_cursor<P>(tree: &LayoutTree<P>, cursor: &NavCursor) -> Result<(), HierarchyError> {
    transition(tree, cursor, UserAction::Scroll).map(|_| ())
}

/// Shortest action sequence from `start` whose last action emits the leaf at
/// `target` and which emits nothing before that.
pub fn shortest_witness<P>(
    tree: &LayoutTree<P>,
    start: &NavCursor,
    target: &[usize],
) -> Result<Vec<UserAction>, HierarchyError> {
    if tree.node_at(target).and_then(LayoutNode::payload).is_none() {
        return Err(HierarchyError::NotALeaf(target.to_vec()));
    }
    validate_cursor(tree, start)?;

    let mut parent: HashMap<NavCursor, Option<(NavCursor, UserAction)>> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(start.clone(), None);
    queue.push_back(start.clone());

    let unwind = |parent: &HashMap<NavCursor, Option<(NavCursor, UserAction)>>, mut at: NavCursor| {
        let mut actions = Vec::new();
        while let Some(Some((prev, action))) = parent.get(&at) {
            actions.push(*action);
            at = prev.clone();
        }
        actions.reverse();
        actions
    };

    while let Some(cursor) = queue.pop_front() {
        for action in UserAction::ALL {
            let (next, outcome) = transition(tree, &cursor, action)?;
            if let Outcome::Emit(path) = &outcome {
                if path == target {
                    let mut seq = unwind(&parent, cursor);
                    seq.push(action);
                    return Ok(seq);
                }
                // emitting any other leaf is not part of a witness
                continue;
            }
            if !parent.contains_key(&next) {
                parent.insert(next.clone(), Some((cursor.clone(), action)));
                queue.push_back(next);
            }
        }
    }
    Err(HierarchyError::Unreachable(target.to_vec()))
}

/// Length of the shortest action sequence from the root cursor that emits the
/// leaf at `target`.
pub fn minimal_actions<P>(tree: &LayoutTree<P>, target: &[usize]) -> Result<usize, HierarchyError> {
    shortest_witness(tree, &NavCursor::root(), target).map(|w| w.len())
}

/// Shape limits for a layout tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutConstraints {
    /// When set, every leaf must sit at exactly this depth (root = 0).
    pub leaf_depth: Option<usize>,
    /// Maximum number of children for a node at depth `i`.
    pub max_fanout: Vec<usize>,
}

impl LayoutConstraints {
    /// Three levels below the root: up to five groups, five subgroups each,
    /// six keys per subgroup.
    pub fn keyboard() -> Self {
        Self {
            leaf_depth: Some(3),
            max_fanout: vec![5, 5, 6],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    EmptyChildren,
    TooManyChildren { count: usize, limit: usize },
    LeafDepth { depth: usize, expected: usize },
    TooDeep { depth: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: Vec<usize>,
    pub label: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node `{}` at {:?}: ", self.label, self.path)?;
        match &self.kind {
            ViolationKind::EmptyChildren => write!(f, "group has no children"),
            ViolationKind::TooManyChildren { count, limit } => {
                write!(f, "{count} children exceeds the limit of {limit}")
            }
            ViolationKind::LeafDepth { depth, expected } => {
                write!(f, "leaf at depth {depth}, expected {expected}")
            }
            ViolationKind::TooDeep { depth } => write!(f, "group at depth {depth} exceeds the allowed depth"),
        }
    }
}

pub fn validate_layout<P>(tree: &LayoutTree<P>, constraints: &LayoutConstraints) -> Vec<Violation> {
    fn walk<P>(node: &LayoutNode<P>, path: &mut Vec<usize>, c: &LayoutConstraints, out: &mut Vec<Violation>) {
        let depth = path.len();
        let violation = |kind| Violation {
            path: path.clone(),
            label: node.label.clone(),
            kind,
        };
        match &node.body {
            NodeBody::Leaf(_) => {
                if let Some(expected) = c.leaf_depth.filter(|&d| d != depth) {
                    out.push(violation(ViolationKind::LeafDepth { depth, expected }));
                }
            }
            NodeBody::Children(children) => {
                if children.is_empty() {
                    out.push(violation(ViolationKind::EmptyChildren));
                    return;
                }
                if c.leaf_depth.is_some_and(|d| depth >= d) {
                    out.push(violation(ViolationKind::TooDeep { depth }));
                }
                if let Some(&limit) = c.max_fanout.get(depth) {
                    if children.len() > limit {
                        out.push(violation(ViolationKind::TooManyChildren {
                            count: children.len(),
                            limit,
                        }));
                    }
                }
                for (i, child) in children.iter().enumerate() {
                    path.push(i);
                    walk(child, path, c, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    if tree.children().is_none() {
        out.push(Violation {
            path: vec![],
            label: tree.label.clone(),
            kind: ViolationKind::LeafDepth {
                depth: 0,
                expected: constraints.leaf_depth.unwrap_or(1),
            },
        });
        return out;
    }
    walk(tree, &mut Vec::new(), constraints, &mut out);
    out
}
