//! The three-level virtual keyboard: payloads, bundled layouts, the layout
//! document format, and frequency-ranked word prediction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::hierarchy::{validate_layout, LayoutConstraints, LayoutNode, LayoutTree, NodeBody, Violation};

pub const LAYOUT_VERSION: u32 = 1;
/// Number of prediction slots in a prediction subgroup.
pub const PREDICTION_SLOTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedKey {
    Space,
    Enter,
    Backspace,
    Tab,
    Escape,
    Delete,
    Ctrl,
    Alt,
    Shift,
    Win,
    Up,
    Down,
    Left,
    Right,
    Home,
    End,
    PageUp,
    PageDown,
    F4,
    MediaPlay,
    MediaPause,
    MediaStop,
    MediaRewind,
}

const NAMED_KEYS: &[(NamedKey, &str)] = &[
    (NamedKey::Space, "SPACE"),
    (NamedKey::Enter, "ENTER"),
    (NamedKey::Backspace, "BACKSPACE"),
    (NamedKey::Tab, "TAB"),
    (NamedKey::Escape, "ESCAPE"),
    (NamedKey::Delete, "DELETE"),
    (NamedKey::Ctrl, "CTRL"),
    (NamedKey::Alt, "ALT"),
    (NamedKey::Shift, "SHIFT"),
    (NamedKey::Win, "WIN"),
    (NamedKey::Up, "UP"),
    (NamedKey::Down, "DOWN"),
    (NamedKey::Left, "LEFT"),
    (NamedKey::Right, "RIGHT"),
    (NamedKey::Home, "HOME"),
    (NamedKey::End, "END"),
    (NamedKey::PageUp, "PAGE_UP"),
    (NamedKey::PageDown, "PAGE_DOWN"),
    (NamedKey::F4, "F4"),
    (NamedKey::MediaPlay, "MEDIA_PLAY"),
    (NamedKey::MediaPause, "MEDIA_PAUSE"),
    (NamedKey::MediaStop, "MEDIA_STOP"),
    (NamedKey::MediaRewind, "MEDIA_REWIND"),
];

impl NamedKey {
    pub fn name(self) -> &'static str {
        NAMED_KEYS.iter().find(|(k, _)| *k == self).map(|(_, n)| *n).unwrap()
    }
}

/// A single keystroke: a printable character or a named key.
///
/// Serialized as a string; one-character strings are characters, anything
/// else is a named key. Space, newline and tab map to their named keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Key {
    Char(char),
    Named(NamedKey),
}

impl Key {
    pub fn from_char(c: char) -> Self {
        match c {
            ' ' => Key::Named(NamedKey::Space),
            '\n' => Key::Named(NamedKey::Enter),
            '\t' => Key::Named(NamedKey::Tab),
            c => Key::Char(c),
        }
    }

    /// Character this key inserts into a text buffer, if any.
    pub fn text(self) -> Option<char> {
        match self {
            Key::Char(c) => Some(c),
            Key::Named(NamedKey::Space) => Some(' '),
            Key::Named(NamedKey::Enter) => Some('\n'),
            Key::Named(NamedKey::Tab) => Some('\t'),
            Key::Named(_) => None,
        }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::Char(c) => write!(f, "{c}"),
            Key::Named(n) => f.write_str(n.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown key `{0}`")]
pub struct ParseKeyError(pub String);

impl FromStr for Key {
    type Err = ParseKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            return Ok(Key::from_char(c));
        }
        NAMED_KEYS
            .iter()
            .find(|(_, n)| *n == s)
            .map(|(k, _)| Key::Named(*k))
            .ok_or_else(|| ParseKeyError(s.to_string()))
    }
}

impl TryFrom<String> for Key {
    type Error = ParseKeyError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Key> for String {
    fn from(k: Key) -> String {
        k.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KeyPayload {
    Key { key: Key },
    /// A named shortcut or macro, sent as one chord/sequence.
    Seq { name: String, keys: Vec<Key> },
    Pointer,
    Predict { rank: usize },
}

impl KeyPayload {
    pub fn key(k: Key) -> Self {
        KeyPayload::Key { key: k }
    }

    pub fn seq(name: &str, keys: &[Key]) -> Self {
        KeyPayload::Seq {
            name: name.to_string(),
            keys: keys.to_vec(),
        }
    }
}

pub type KeyboardLayout = LayoutTree<KeyPayload>;

#[derive(Debug, thiserror::Error)]
pub enum LayoutError {
    #[error("layout parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported layout_version {0} (expected {LAYOUT_VERSION})")]
    Version(u32),
    #[error("node `{label}`: {message}")]
    Shape { label: String, message: String },
    #[error("layout violates keyboard constraints: {}", join_violations(.0))]
    Violations(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// On-disk node shape: exactly one of `children` or `payload`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocNode {
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<DocNode>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    payload: Option<KeyPayload>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutDoc {
    layout_version: u32,
    label: String,
    children: Vec<DocNode>,
}

impl DocNode {
    fn from_node(node: &KeyboardLayout) -> Self {
        match &node.body {
            NodeBody::Leaf(p) => DocNode {
                label: node.label.clone(),
                children: None,
                payload: Some(p.clone()),
            },
            NodeBody::Children(c) => DocNode {
                label: node.label.clone(),
                children: Some(c.iter().map(DocNode::from_node).collect()),
                payload: None,
            },
        }
    }

    fn into_node(self) -> Result<KeyboardLayout, LayoutError> {
        let shape = |message: &str| LayoutError::Shape {
            label: self.label.clone(),
            message: message.to_string(),
        };
        match (self.children, self.payload) {
            (Some(children), None) => Ok(LayoutNode::group(
                self.label,
                children.into_iter().map(DocNode::into_node).collect::<Result<_, _>>()?,
            )),
            (None, Some(payload)) => {
                match &payload {
                    KeyPayload::Seq { keys, .. } if keys.is_empty() => return Err(shape("key sequence is empty")),
                    KeyPayload::Predict { rank } if *rank >= PREDICTION_SLOTS => {
                        return Err(shape(&format!("prediction rank {rank} must be below {PREDICTION_SLOTS}")))
                    }
                    _ => {}
                }
                Ok(LayoutNode::leaf(self.label, payload))
            }
            (Some(_), Some(_)) => Err(shape("has both children and payload")),
            (None, None) => Err(shape("has neither children nor payload")),
        }
    }
}

/// Canonical JSON form of a keyboard layout.
pub fn layout_to_json(layout: &KeyboardLayout) -> String {
    let doc = LayoutDoc {
        layout_version: LAYOUT_VERSION,
        label: layout.label.clone(),
        children: layout.children().unwrap_or(&[]).iter().map(DocNode::from_node).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("layout serializes");
    s.push('\n');
    s
}

/// Parses and validates a keyboard layout document.
pub fn load_layout(document: &str) -> Result<KeyboardLayout, LayoutError> {
    let doc: LayoutDoc = serde_json::from_str(document)?;
    if doc.layout_version != LAYOUT_VERSION {
        return Err(LayoutError::Version(doc.layout_version));
    }
    let tree = LayoutNode::group(
        doc.label,
        doc.children.into_iter().map(DocNode::into_node).collect::<Result<_, _>>()?,
    );
    let violations = validate_layout(&tree, &LayoutConstraints::keyboard());
    if !violations.is_empty() {
        return Err(LayoutError::Violations(violations));
    }
    Ok(tree)
}

fn keys_group(label: &str, chars: &str) -> KeyboardLayout {
    LayoutNode::group(
        label,
        chars
            .chars()
            .map(|c| LayoutNode::leaf(c.to_string(), KeyPayload::key(Key::from_char(c))))
            .collect(),
    )
}

fn named(label: &str, key: NamedKey) -> KeyboardLayout {
    LayoutNode::leaf(label, KeyPayload::key(Key::Named(key)))
}

fn macro_leaf(name: &str, keys: &[Key]) -> KeyboardLayout {
    LayoutNode::leaf(name.to_lowercase(), KeyPayload::seq(name, keys))
}

fn ctrl(c: char) -> [Key; 2] {
    [Key::Named(NamedKey::Ctrl), Key::Char(c)]
}

fn letters_group() -> KeyboardLayout {
    let mut last = keys_group("y-.", "yz");
    if let NodeBody::Children(c) = &mut last.body {
        c.push(named("space", NamedKey::Space));
        c.push(named("backspace", NamedKey::Backspace));
        c.push(named("enter", NamedKey::Enter));
        c.push(LayoutNode::leaf(".", KeyPayload::key(Key::Char('.'))));
    }
    LayoutNode::group(
        "letters",
        vec![
            keys_group("a-f", "abcdef"),
            keys_group("g-l", "ghijkl"),
            keys_group("m-r", "mnopqr"),
            keys_group("s-x", "stuvwx"),
            last,
        ],
    )
}

fn numbers_group() -> KeyboardLayout {
    LayoutNode::group("numbers", vec![keys_group("0-4", "01234"), keys_group("5-9", "56789")])
}

fn desktop_group() -> KeyboardLayout {
    LayoutNode::group(
        "desktop",
        vec![LayoutNode::group("pointer", vec![LayoutNode::leaf("pointer", KeyPayload::Pointer)])],
    )
}

fn prediction_group() -> KeyboardLayout {
    LayoutNode::group(
        "predict",
        (0..PREDICTION_SLOTS)
            .map(|rank| LayoutNode::leaf(format!("word {}", rank + 1), KeyPayload::Predict { rank }))
            .collect(),
    )
}

/// The bundled general-purpose layout.
///
/// Root groups, in order: letters, numbers, symbols, shortcuts, desktop.
/// Letters come in alphabetical blocks of six; the last block also carries
/// space, backspace, enter and the full stop. Shortcuts hold the six word
/// prediction slots, application commands, editing chords and navigation
/// keys. Desktop holds the single switch to the pointing device.
pub fn default_layout() -> KeyboardLayout {
    let alt_f4 = [Key::Named(NamedKey::Alt), Key::Named(NamedKey::F4)];
    let ctrl_enter = [Key::Named(NamedKey::Ctrl), Key::Named(NamedKey::Enter)];
    LayoutNode::group(
        "keyboard",
        vec![
            letters_group(),
            numbers_group(),
            LayoutNode::group(
                "symbols",
                vec![
                    keys_group("punctuation", ",;:!?'"),
                    keys_group("math", "-_+=/*"),
                    keys_group("other", "()@#&\""),
                ],
            ),
            LayoutNode::group(
                "shortcuts",
                vec![
                    prediction_group(),
                    LayoutNode::group(
                        "app",
                        vec![
                            macro_leaf("SEND", &ctrl_enter),
                            macro_leaf("NEW", &ctrl('n')),
                            macro_leaf("FIND", &ctrl('f')),
                            macro_leaf("CLOSE", &alt_f4),
                        ],
                    ),
                    LayoutNode::group(
                        "edit",
                        vec![
                            macro_leaf("COPY", &ctrl('c')),
                            macro_leaf("PASTE", &ctrl('v')),
                            macro_leaf("CUT", &ctrl('x')),
                            macro_leaf("UNDO", &ctrl('z')),
                            macro_leaf("SELECT_ALL", &ctrl('a')),
                            macro_leaf("SAVE", &ctrl('s')),
                        ],
                    ),
                    LayoutNode::group(
                        "keys",
                        vec![
                            named("tab", NamedKey::Tab),
                            named("escape", NamedKey::Escape),
                            named("delete", NamedKey::Delete),
                            named("left", NamedKey::Left),
                            named("right", NamedKey::Right),
                            named("home", NamedKey::Home),
                        ],
                    ),
                ],
            ),
            desktop_group(),
        ],
    )
}

/// Application layout for a media player: transport controls first, then
/// letters and numbers for search boxes, then the pointer switch.
pub fn media_player_layout() -> KeyboardLayout {
    LayoutNode::group(
        "media player",
        vec![
            LayoutNode::group(
                "media",
                vec![LayoutNode::group(
                    "playback",
                    vec![
                        macro_leaf("PLAY", &[Key::Named(NamedKey::MediaPlay)]),
                        macro_leaf("PAUSE", &[Key::Named(NamedKey::MediaPause)]),
                        macro_leaf("STOP", &[Key::Named(NamedKey::MediaStop)]),
                        macro_leaf("REWIND", &[Key::Named(NamedKey::MediaRewind)]),
                    ],
                )],
            ),
            letters_group(),
            numbers_group(),
            desktop_group(),
        ],
    )
}

/// Word → frequency table backing word prediction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    entries: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DictionaryError {
    #[error("dictionary line {line}: {message}")]
    Line { line: usize, message: String },
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a word, lowercased. Empty words and zero counts are ignored.
    pub fn insert(&mut self, word: &str, count: u64) {
        let word = word.to_lowercase();
        if !word.is_empty() && count > 0 {
            self.entries.insert(word, count);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<u64> {
        self.entries.get(word).copied()
    }

    /// Parses `word<TAB>count` lines.
    pub fn parse(text: &str) -> Result<Self, DictionaryError> {
        let mut dict = Dictionary::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| DictionaryError::Line {
                line: i + 1,
                message: message.to_string(),
            };
            let (word, count) = line.split_once('\t').ok_or_else(|| err("expected word<TAB>count"))?;
            let word = word.trim().to_lowercase();
            if word.is_empty() {
                return Err(err("empty word"));
            }
            let count: u64 = count.trim().parse().map_err(|_| err("count is not a positive integer"))?;
            if count == 0 {
                return Err(err("count must be positive"));
            }
            if dict.entries.insert(word, count).is_some() {
                return Err(err("duplicate word"));
            }
        }
        Ok(dict)
    }

    pub fn to_tsv(&self) -> String {
        self.entries.iter().map(|(w, c)| format!("{w}\t{c}\n")).collect()
    }
}

impl<S: AsRef<str>> FromIterator<(S, u64)> for Dictionary {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        let mut d = Dictionary::new();
        for (w, c) in iter {
            d.insert(w.as_ref(), c);
        }
        d
    }
}

/// Up to `k` words starting with `prefix` (case-insensitive), most frequent
/// first, ties in lexicographic order.
pub fn predict<'d>(prefix: &str, dict: &'d Dictionary, k: usize) -> Vec<&'d str> {
    let prefix = prefix.to_lowercase();
    let mut hits: Vec<(&str, u64)> = dict
        .entries
        .range(prefix.clone()..)
        .take_while(|(w, _)| w.starts_with(&prefix))
        .map(|(w, c)| (w.as_str(), *c))
        .collect();
    hits.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    hits.into_iter().take(k).map(|(w, _)| w).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no completion at rank {rank} for prefix `{prefix}`")]
pub struct Unbound {
    pub rank: usize,
    pub prefix: String,
}

/// Keys that complete the current word with the candidate at `rank`: the rest
/// of the word followed by a space.
pub fn resolve_prediction(rank: usize, prefix: &str, dict: &Dictionary) -> Result<Vec<Key>, Unbound> {
    let unbound = || Unbound {
        rank,
        prefix: prefix.to_string(),
    };
    if rank >= PREDICTION_SLOTS {
        return Err(unbound());
    }
    let word = *predict(prefix, dict, PREDICTION_SLOTS).get(rank).ok_or_else(unbound)?;
    let mut keys: Vec<Key> = word.chars().skip(prefix.chars().count()).map(Key::from_char).collect();
    keys.push(Key::Named(NamedKey::Space));
    Ok(keys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{minimal_actions, ViolationKind};
    use proptest::prelude::*;

    fn leaf_path(layout: &KeyboardLayout, payload: &KeyPayload) -> Vec<usize> {
        layout
            .leaves()
            .into_iter()
            .find(|(_, p)| *p == payload)
            .map(|(path, _)| path)
            .unwrap()
    }

    fn sample_dict() -> Dictionary {
        [("hello", 10), ("help", 7), ("hermit", 2)].into_iter().collect()
    }

    #[test]
    fn default_layout_is_valid_and_ordered() {
        let layout = default_layout();
        assert!(validate_layout(&layout, &LayoutConstraints::keyboard()).is_empty());
        let groups: Vec<_> = layout.children().unwrap().iter().map(|g| g.label.as_str()).collect();
        assert_eq!(groups, ["letters", "numbers", "symbols", "shortcuts", "desktop"]);
        assert!(layout.leaves().len() >= 40);
        assert!(validate_layout(&media_player_layout(), &LayoutConstraints::keyboard()).is_empty());
    }

    #[test]
    fn oracle_costs_of_named_leaves() {
        let layout = default_layout();
        let a = leaf_path(&layout, &KeyPayload::key(Key::Char('a')));
        assert_eq!(a, vec![0, 0, 0]);
        assert_eq!(minimal_actions(&layout, &a).unwrap(), 3);
        // 4 scrolls to `desktop`, then three zoom-ins through a 1-wide chain.
        let pointer = leaf_path(&layout, &KeyPayload::Pointer);
        assert_eq!(minimal_actions(&layout, &pointer).unwrap(), 7);
    }

    #[test]
    fn printable_alphabet_is_reachable() {
        let layout = default_layout();
        for c in "abcdefghijklmnopqrstuvwxyz0123456789. ".chars() {
            let path = leaf_path(&layout, &KeyPayload::key(Key::from_char(c)));
            assert!(minimal_actions(&layout, &path).is_ok(), "{c:?}");
        }
    }

    #[test]
    fn layout_document_round_trip() {
        for layout in [default_layout(), media_player_layout()] {
            assert_eq!(load_layout(&layout_to_json(&layout)).unwrap(), layout);
        }
    }

    #[test]
    fn oversized_group_is_rejected() {
        let mut layout = default_layout();
        if let NodeBody::Children(groups) = &mut layout.body {
            groups[0] = LayoutNode::group("letters", vec![keys_group("a-g", "abcdefg")]);
        }
        match load_layout(&layout_to_json(&layout)) {
            Err(LayoutError::Violations(v)) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].label, "a-g");
                assert_eq!(v[0].kind, ViolationKind::TooManyChildren { count: 7, limit: 6 });
            }
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(load_layout("{"), Err(LayoutError::Parse(_))));
        let v2 = r#"{"layout_version":2,"label":"k","children":[]}"#;
        assert!(matches!(load_layout(v2), Err(LayoutError::Version(2))));
        let both = r#"{"layout_version":1,"label":"k","children":[
            {"label":"g","children":[{"label":"s","children":[
              {"label":"x","children":[],"payload":{"type":"pointer"}}]}]}]}"#;
        assert!(matches!(load_layout(both), Err(LayoutError::Shape { .. })));
        let empty_seq = r#"{"layout_version":1,"label":"k","children":[
            {"label":"g","children":[{"label":"s","children":[
              {"label":"x","payload":{"type":"seq","name":"X","keys":[]}}]}]}]}"#;
        assert!(matches!(load_layout(empty_seq), Err(LayoutError::Shape { .. })));
        let rank = r#"{"layout_version":1,"label":"k","children":[
            {"label":"g","children":[{"label":"s","children":[
              {"label":"x","payload":{"type":"predict","rank":6}}]}]}]}"#;
        assert!(matches!(load_layout(rank), Err(LayoutError::Shape { .. })));
    }

    #[test]
    fn key_string_forms() {
        assert_eq!("a".parse::<Key>().unwrap(), Key::Char('a'));
        assert_eq!(" ".parse::<Key>().unwrap(), Key::Named(NamedKey::Space));
        assert_eq!("PAGE_UP".parse::<Key>().unwrap(), Key::Named(NamedKey::PageUp));
        assert!("HYPER".parse::<Key>().is_err());
        assert_eq!(Key::Named(NamedKey::Space).to_string(), "SPACE");
        for (k, _) in NAMED_KEYS {
            assert_eq!(Key::Named(*k).to_string().parse::<Key>().unwrap(), Key::Named(*k));
        }
    }

    #[test]
    fn predict_examples() {
        let d = sample_dict();
        assert_eq!(predict("he", &d, 6), ["hello", "help", "hermit"]);
        assert_eq!(predict("HE", &d, 2), ["hello", "help"]);
        assert!(predict("zz", &d, 6).is_empty());
        let tie: Dictionary = [("ab", 5), ("aa", 5)].into_iter().collect();
        assert_eq!(predict("a", &tie, 6), ["aa", "ab"]);
        assert_eq!(predict("", &d, 1), ["hello"]);
    }

    #[test]
    fn resolve_prediction_examples() {
        let d = sample_dict();
        let keys = resolve_prediction(0, "he", &d).unwrap();
        assert_eq!(keys, ["l", "l", "o", "SPACE"].map(|s| s.parse::<Key>().unwrap()));
        assert!(resolve_prediction(5, "he", &d).is_err());
        let all = resolve_prediction(0, "", &d).unwrap();
        assert_eq!(all.len(), "hello".len() + 1);
    }

    #[test]
    fn dictionary_file_format() {
        let d = Dictionary::parse("hello\t10\n# comment\nhelp\t7\n").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(Dictionary::parse(&d.to_tsv()).unwrap(), d);
        assert!(Dictionary::parse("hello\t0").is_err());
        assert!(Dictionary::parse("hello\t1\nhello\t2").is_err());
        assert!(Dictionary::parse("hello").is_err());
    }

    fn arb_dict() -> impl Strategy<Value = Dictionary> {
        proptest::collection::vec(("[a-d]{1,5}", 1u64..20), 0..40).prop_map(|v| v.into_iter().collect())
    }

    proptest! {
        #[test]
        fn predictions_prefixed_and_sorted(d in arb_dict(), prefix in "[a-d]{0,2}", k in 1usize..10) {
            let out = predict(&prefix, &d, k);
            prop_assert!(out.len() <= k);
            for w in &out {
                prop_assert!(w.starts_with(&prefix));
            }
            let keys: Vec<_> = out.iter().map(|w| (std::cmp::Reverse(d.get(w).unwrap()), *w)).collect();
            let mut sorted = keys.clone();
            sorted.sort();
            prop_assert_eq!(keys, sorted);
        }

        #[test]
        fn completion_equals_typing_the_word(d in arb_dict(), prefix in "[a-d]{0,2}", rank in 0usize..6) {
            if let Ok(keys) = resolve_prediction(rank, &prefix, &d) {
                let word = predict(&prefix, &d, PREDICTION_SLOTS)[rank];
                let typed: String = prefix.chars().chain(keys.iter().filter_map(|k| k.text())).collect();
                prop_assert_eq!(typed, format!("{word} "));
            }
        }
    }
}
