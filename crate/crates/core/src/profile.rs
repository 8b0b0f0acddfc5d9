//! Per-user profiles: which layout each application uses, detection settings,
//! pointer depth, the prediction dictionary and sound cues.
//!
//! A profile is a single JSON document whose layout and dictionary entries are
//! paths relative to the document's directory. Loading resolves and validates
//! every reference; it either fully succeeds or returns the first error.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::keyboard::{load_layout, Dictionary, DictionaryError, KeyboardLayout, LayoutError};
use crate::signal::{DetectionConfig, SignalError};

pub const SCHEMA_VERSION: u32 = 1;

/// UI events a profile may attach a sound to.
pub const SOUND_EVENTS: [&str; 6] = ["level-descend", "level-ascend", "emit", "target-reached", "click", "cancel"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub schema_version: u32,
    pub user_id: String,
    pub default_layout: String,
    #[serde(default)]
    pub app_layouts: BTreeMap<String, String>,
    pub detection: DetectionConfig,
    pub pointer_max_depth: usize,
    pub dictionary: String,
    #[serde(default)]
    pub sounds: BTreeMap<String, String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ProfileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{path}: unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { path: PathBuf, found: u32 },
    #[error("dangling reference: {path} does not exist")]
    DanglingReference { path: PathBuf },
    #[error("{path}: {source}")]
    Layout { path: PathBuf, source: LayoutError },
    #[error("{path}: {source}")]
    Dictionary { path: PathBuf, source: DictionaryError },
    #[error("detection settings: {0}")]
    Detection(#[from] SignalError),
    #[error("invalid profile: {0}")]
    Invalid(String),
}

/// A profile with every reference resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedProfile {
    pub profile: Profile,
    /// Layouts keyed by the reference string used in the profile.
    pub layouts: BTreeMap<String, KeyboardLayout>,
    pub dictionary: Dictionary,
}

impl LoadedProfile {
    /// Assembles a profile from in-memory parts, checking the same invariants
    /// as [`load_profile`].
    pub fn from_parts(
        profile: Profile,
        layouts: BTreeMap<String, KeyboardLayout>,
        dictionary: Dictionary,
    ) -> Result<Self, ProfileError> {
        check_fields(&profile)?;
        for reference in referenced_layouts(&profile) {
            if !layouts.contains_key(reference) {
                return Err(ProfileError::DanglingReference {
                    path: PathBuf::from(reference),
                });
            }
        }
        Ok(Self {
            profile,
            layouts,
            dictionary,
        })
    }

    /// Layout for `app_id`: its own mapping if present, else the default.
    pub fn layout_for(&self, app_id: &str) -> &KeyboardLayout {
        let reference = self
            .profile
            .app_layouts
            .get(app_id)
            .unwrap_or(&self.profile.default_layout);
        &self.layouts[reference]
    }

    pub fn all_layouts(&self) -> impl Iterator<Item = &KeyboardLayout> {
        self.layouts.values()
    }
}

fn referenced_layouts(profile: &Profile) -> BTreeSet<&str> {
    std::iter::once(profile.default_layout.as_str())
        .chain(profile.app_layouts.values().map(String::as_str))
        .collect()
}

fn check_fields(profile: &Profile) -> Result<(), ProfileError> {
    if profile.pointer_max_depth < 1 {
        return Err(ProfileError::Invalid("pointer_max_depth must be at least 1".into()));
    }
    profile.detection.validate()?;
    if let Some(unknown) = profile.sounds.keys().find(|k| !SOUND_EVENTS.contains(&k.as_str())) {
        return Err(ProfileError::Invalid(format!(
            "unknown sound event `{unknown}` (known: {})",
            SOUND_EVENTS.join(", ")
        )));
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, ProfileError> {
    fs::read_to_string(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound {
            ProfileError::DanglingReference { path: path.to_path_buf() }
        } else {
            ProfileError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<LoadedProfile, ProfileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ProfileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    // version check before the strict parse so newer files get a clear error
    let version = serde_json::from_str::<serde_json::Value>(&text)
        .map_err(|source| ProfileError::Parse {
            path: path.to_path_buf(),
            source,
        })?
        .get("schema_version")
        .and_then(serde_json::Value::as_u64);
    if let Some(found) = version.filter(|&v| v != SCHEMA_VERSION as u64) {
        return Err(ProfileError::SchemaVersion {
            path: path.to_path_buf(),
            found: found as u32,
        });
    }
    let profile: Profile = serde_json::from_str(&text).map_err(|source| ProfileError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    check_fields(&profile)?;

    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut layouts = BTreeMap::new();
    for reference in referenced_layouts(&profile) {
        let layout_path = base.join(reference);
        let layout = load_layout(&read(&layout_path)?).map_err(|source| ProfileError::Layout {
            path: layout_path.clone(),
            source,
        })?;
        layouts.insert(reference.to_string(), layout);
    }
    let dict_path = base.join(&profile.dictionary);
    let dictionary = Dictionary::parse(&read(&dict_path)?).map_err(|source| ProfileError::Dictionary {
        path: dict_path.clone(),
        source,
    })?;
    LoadedProfile::from_parts(profile, layouts, dictionary)
}

/// Canonical text of a profile document: pretty JSON, fields in declaration
/// order, maps sorted by key, trailing newline.
pub fn profile_to_json(profile: &Profile) -> String {
    let mut s = serde_json::to_string_pretty(profile).expect("profile serializes");
    s.push('\n');
    s
}

/// Writes the profile document atomically (temp file in the same directory,
/// then rename). Referenced layout and dictionary files are not touched.
pub fn save_profile(profile: &Profile, path: impl AsRef<Path>) -> Result<(), ProfileError> {
    let path = path.as_ref();
    let io_err = |source| ProfileError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp_name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, profile_to_json(profile)).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e)
    })
}
