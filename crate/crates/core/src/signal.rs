//! Threshold/debounce decoding of three-channel intensity streams, and the
//! inverse: synthesizing such streams from an intended action script.
//!
//! Detection is edge-triggered. An event fires when a channel goes from below
//! its threshold to at-or-above it, and is suppressed when the previous event
//! on that channel is less than `debounce_ms` old. A channel with no earlier
//! sample is treated as resting at zero intensity.
//!
//! All randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`, which
//! is specified bit-for-bit and therefore reproduces across platforms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::action::{Millis, UserAction, UserActionEvent};

pub const DEFAULT_DEBOUNCE_MS: Millis = 300;

/// Peak intensity of a synthesized pulse; reaches every legal threshold.
const PULSE_PEAK: f64 = 1.0;
/// How long a synthesized pulse stays high before dropping back to rest.
const PULSE_WIDTH_MS: Millis = 100;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SignalError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("sample {index}: timestamp {timestamp} is earlier than the previous sample ({previous})")]
    Unordered {
        index: usize,
        timestamp: Millis,
        previous: Millis,
    },
    #[error("sample {index}: unknown channel `{channel}`")]
    UnknownChannel { index: usize, channel: String },
    #[error("sample {index}: intensity {intensity} outside [0, 1]")]
    Intensity { index: usize, intensity: f64 },
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
    #[error("invalid noise model: {0}")]
    Noise(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSignalSample {
    pub channel: String,
    pub intensity: f64,
    pub timestamp: Millis,
}

impl RawSignalSample {
    pub fn new(channel: impl Into<String>, intensity: f64, timestamp: Millis) -> Self {
        Self {
            channel: channel.into(),
            intensity,
            timestamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub channel_map: BTreeMap<String, UserAction>,
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default = "default_debounce")]
    pub debounce_ms: Millis,
}

fn default_debounce() -> Millis {
    DEFAULT_DEBOUNCE_MS
}

impl Default for DetectionConfig {
    fn default() -> Self {
        let channels = [
            ("c1", UserAction::Scroll),
            ("c2", UserAction::ZoomIn),
            ("c3", UserAction::ZoomOut),
        ];
        Self {
            channel_map: channels.iter().map(|(c, a)| (c.to_string(), *a)).collect(),
            thresholds: channels.iter().map(|(c, _)| (c.to_string(), 0.6)).collect(),
            debounce_ms: DEFAULT_DEBOUNCE_MS,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<(), SignalError> {
        if self.channel_map.len() != 3 {
            return Err(SignalError::Config(format!(
                "expected exactly 3 channels, found {}",
                self.channel_map.len()
            )));
        }
        let actions: BTreeSet<_> = self.channel_map.values().collect();
        if actions.len() != 3 {
            return Err(SignalError::Config(
                "channels must map to three distinct actions".into(),
            ));
        }
        for channel in self.channel_map.keys() {
            match self.thresholds.get(channel) {
                None => {
                    return Err(SignalError::Config(format!(
                        "channel `{channel}` has no threshold"
                    )))
                }
                Some(&t) if !(t > 0.0 && t <= 1.0) => {
                    return Err(SignalError::Config(format!(
                        "threshold {t} for channel `{channel}` outside (0, 1]"
                    )))
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = self.thresholds.keys().find(|c| !self.channel_map.contains_key(*c)) {
            return Err(SignalError::Config(format!(
                "threshold given for unmapped channel `{extra}`"
            )));
        }
        Ok(())
    }

    pub fn channel_for(&self, action: UserAction) -> &str {
        self.channel_map
            .iter()
            .find(|(_, a)| **a == action)
            .map(|(c, _)| c.as_str())
            .expect("validated config maps every action")
    }
}

/// Decodes a timestamp-ordered sample stream into user action events.
pub fn decode_stream(
    samples: &[RawSignalSample],
    config: &DetectionConfig,
) -> Result<Vec<UserActionEvent>, SignalError> {
    config.validate()?;
    let mut previous_intensity: BTreeMap<&str, f64> = BTreeMap::new();
    let mut last_event: BTreeMap<&str, Millis> = BTreeMap::new();
    let mut events = Vec::new();
    let mut previous_ts = None;

    for (index, sample) in samples.iter().enumerate() {
        if let Some(prev) = previous_ts {
            if sample.timestamp < prev {
                return Err(SignalError::Unordered {
                    index,
                    timestamp: sample.timestamp,
                    previous: prev,
                });
            }
        }
        previous_ts = Some(sample.timestamp);

        let (channel, action) = config
            .channel_map
            .get_key_value(sample.channel.as_str())
            .ok_or_else(|| SignalError::UnknownChannel {
                index,
                channel: sample.channel.clone(),
            })?;
        if !(0.0..=1.0).contains(&sample.intensity) {
            return Err(SignalError::Intensity {
                index,
                intensity: sample.intensity,
            });
        }
        let threshold = config.thresholds[channel];
        let before = previous_intensity.insert(channel.as_str(), sample.intensity).unwrap_or(0.0);
        if before < threshold && sample.intensity >= threshold {
            let debounced = last_event
                .get(channel.as_str())
                .is_some_and(|&t| sample.timestamp - t < config.debounce_ms);
            if !debounced {
                last_event.insert(channel.as_str(), sample.timestamp);
                events.push(UserActionEvent::new(*action, sample.timestamp));
            }
        }
    }
    Ok(events)
}

/// Detection noise applied to intended actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub miss_rate: f64,
    /// Row = intended action, column = detected action, indexed by `UserAction::index`.
    pub confusion: [[f64; 3]; 3],
    pub false_fire_rate: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn zero(seed: u64) -> Self {
        Self {
            miss_rate: 0.0,
            confusion: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            false_fire_rate: 0.0,
            seed,
        }
    }

    /// Each action is detected as one of the other two with total probability
    /// `rate`, split evenly.
    pub fn symmetric_confusion(rate: f64, seed: u64) -> Self {
        let off = rate / 2.0;
        let mut model = Self::zero(seed);
        for (i, row) in model.confusion.iter_mut().enumerate() {
            for (j, p) in row.iter_mut().enumerate() {
                *p = if i == j { 1.0 - rate } else { off };
            }
        }
        model
    }

    pub fn is_noiseless(&self) -> bool {
        *self == Self::zero(self.seed)
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.miss_rate) {
            return Err(SignalError::Noise(format!("miss_rate {} outside [0, 1]", self.miss_rate)));
        }
        if !(self.false_fire_rate >= 0.0 && self.false_fire_rate.is_finite()) {
            return Err(SignalError::Noise(format!(
                "false_fire_rate {} must be finite and non-negative",
                self.false_fire_rate
            )));
        }
        for (i, row) in self.confusion.iter().enumerate() {
            if !row.iter().all(|&p| prob(p)) {
                return Err(SignalError::Noise(format!("confusion row {i} has a value outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(SignalError::Noise(format!("confusion row {i} sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Draws what the detector reports for one intended action: the
    /// (possibly confused) action unless it was missed, plus any spurious
    /// detections.
    pub fn perturb<R: Rng + ?Sized>(&self, intended: UserAction, rng: &mut R) -> Detections {
        let primary = (rng.random::<f64>() >= self.miss_rate)
            .then(|| sample_row(&self.confusion[intended.index()], rng));
        let mut spurious = Vec::new();
        if self.false_fire_rate > 0.0 {
            let count = Poisson::new(self.false_fire_rate)
                .expect("validated rate")
                .sample(rng) as usize;
            spurious.extend((0..count).map(|_| UserAction::ALL[rng.random_range(0..3)]));
        }
        Detections { primary, spurious }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Detections {
    pub primary: Option<UserAction>,
    pub spurious: Vec<UserAction>,
}

impl Detections {
    pub fn iter(&self) -> impl Iterator<Item = UserAction> + '_ {
        self.primary.iter().copied().chain(self.spurious.iter().copied())
    }
}

fn sample_row<R: Rng + ?Sized>(row: &[f64; 3], rng: &mut R) -> UserAction {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return UserAction::ALL[i];
        }
    }
    // rounding slack: fall back to the last action with non-zero mass
    let last = row.iter().rposition(|&p| p > 0.0).unwrap_or(2);
    UserAction::ALL[last]
}

/// Synthesizes a sample stream in which each intended action becomes a
/// rectangular pulse on its channel, spaced `inter_action_ms` apart.
///
/// Spurious detections are placed halfway between intended actions. With a
/// noiseless model and `inter_action_ms` greater than the debounce interval,
/// decoding the result reproduces `intended` exactly.
pub fn simulate_signals(
    intended: &[UserAction],
    noise: &NoiseModel,
    config: &DetectionConfig,
    inter_action_ms: Millis,
) -> Result<Vec<RawSignalSample>, SignalError> {
    config.validate()?;
    noise.validate()?;
    if inter_action_ms == 0 {
        return Err(SignalError::Noise("inter_action_ms must be positive".into()));
    }
    let pulse = PULSE_WIDTH_MS.min(inter_action_ms / 4).max(1);
    let mut rng = noise.rng();
    let mut samples = Vec::new();
    for (i, &action) in intended.iter().enumerate() {
        let t = (i as Millis + 1) * inter_action_ms;
        let detected = noise.perturb(action, &mut rng);
        if let Some(a) = detected.primary {
            push_pulse(&mut samples, config.channel_for(a), t, pulse);
        }
        for (k, &a) in detected.spurious.iter().enumerate() {
            let ts = t + inter_action_ms / 2 + k as Millis * pulse * 2;
            push_pulse(&mut samples, config.channel_for(a), ts, pulse);
        }
    }
    samples.sort_by_key(|s| s.timestamp);
    Ok(samples)
}

fn push_pulse(samples: &mut Vec<RawSignalSample>, channel: &str, at: Millis, width: Millis) {
    samples.push(RawSignalSample::new(channel, PULSE_PEAK, at));
    samples.push(RawSignalSample::new(channel, 0.0, at + width));
}

/// Parses a `timestamp_ms<TAB>channel_id<TAB>intensity` trace. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_trace(text: &str) -> Result<Vec<RawSignalSample>, SignalError> {
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| SignalError::Trace { line: line_no, message };
        let mut fields = line.split('\t');
        let (Some(ts), Some(channel), Some(intensity), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(err("expected three tab-separated fields".into()));
        };
        let timestamp = ts.trim().parse().map_err(|e| err(format!("timestamp: {e}")))?;
        let intensity = intensity
            .trim()
            .parse()
            .map_err(|e| err(format!("intensity: {e}")))?;
        samples.push(RawSignalSample::new(channel.trim(), intensity, timestamp));
    }
    Ok(samples)
}

pub fn write_trace(samples: &[RawSignalSample]) -> String {
    let mut out = String::new();
    for s in samples {
        let _ = writeln!(out, "{}\t{}\t{}", s.timestamp, s.channel, s.intensity);
    }
    out
}
