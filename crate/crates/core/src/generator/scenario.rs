//! Scenario names such as `Split5+Im1+Borderline40+Rare40` and the parameter
//! schedule they describe.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;

pub const DEFAULT_LENGTH: u64 = 50_000;
pub const DEFAULT_DIMENSIONS: usize = 5;
pub const DEFAULT_IMBALANCE: f64 = 0.10;
/// Drift runs over this fraction of the stream.
pub const DEFAULT_DRIFT: (f64, f64) = (0.4, 0.6);
pub const MAX_SUBCLUSTERS: usize = 10;

/// Shares of safe, borderline and rare minority examples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeProfile {
    pub safe: f64,
    pub borderline: f64,
    pub rare: f64,
}

impl TypeProfile {
    pub const SAFE: TypeProfile = TypeProfile {
        safe: 1.0,
        borderline: 0.0,
        rare: 0.0,
    };

    pub fn new(safe: f64, borderline: f64, rare: f64) -> Result<Self, ScenarioError> {
        let p = TypeProfile {
            safe,
            borderline,
            rare,
        };
        let parts = [safe, borderline, rare];
        if parts.iter().any(|v| !(0.0..=1.0).contains(v)) || ((safe + borderline + rare) - 1.0).abs() > 1e-9 {
            return Err(ScenarioError::Invalid(format!(
                "type proportions must lie in [0,1] and sum to 1, got ({safe}, {borderline}, {rare})"
            )));
        }
        Ok(p)
    }

    pub fn lerp(&self, to: &TypeProfile, t: f64) -> TypeProfile {
        TypeProfile {
            safe: lerp(self.safe, to.safe, t),
            borderline: lerp(self.borderline, to.borderline, t),
            rare: lerp(self.rare, to.rare, t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClusterMotion {
    None,
    Move,
    Merge,
    Split,
}

/// One difficulty factor, i.e. one term of a scenario name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    StaticImbalance,
    ImbalanceDrift,
    Split,
    Merge,
    Move,
    Borderline,
    Rare,
}

impl Factor {
    fn short(self) -> &'static str {
        match self {
            Factor::StaticImbalance | Factor::ImbalanceDrift => "Imbalance",
            Factor::Borderline => "Borderline",
            Factor::Rare => "Rare",
            Factor::Split => "Split",
            Factor::Merge => "Merge",
            Factor::Move => "Move",
        }
    }

    fn single(self) -> &'static str {
        match self {
            Factor::StaticImbalance => "Static imbalance",
            Factor::ImbalanceDrift => "Class ratio changes",
            Factor::Borderline => "Borderline examples",
            Factor::Rare => "Rare examples",
            Factor::Split => "Sub-cluster split",
            Factor::Merge => "Sub-cluster merge",
            Factor::Move => "Sub-cluster move",
        }
    }
}

/// Groups a scenario by its factors: the single-factor name, `A+B` for pairs,
/// `Multiple` for three or more terms.
pub fn factor_category(factors: &[Factor]) -> String {
    let mut f = factors.to_vec();
    f.sort();
    f.dedup();
    match f.as_slice() {
        [] => "Static imbalance".to_string(),
        [one] => one.single().to_string(),
        [Factor::StaticImbalance, Factor::ImbalanceDrift] => Factor::ImbalanceDrift.single().to_string(),
        [a, b] => format!("{}+{}", a.short(), b.short()),
        _ => "Multiple".to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub length: u64,
    pub dimensions: usize,
    pub imbalance_start: f64,
    pub imbalance_end: f64,
    pub profile_start: TypeProfile,
    pub profile_end: TypeProfile,
    pub subclusters_start: usize,
    pub subclusters_end: usize,
    pub motion: ClusterMotion,
    pub drift_window: (u64, u64),
    pub seed: u64,
    pub factors: Vec<Factor>,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            name: "StaticIm10".to_string(),
            length: DEFAULT_LENGTH,
            dimensions: DEFAULT_DIMENSIONS,
            imbalance_start: DEFAULT_IMBALANCE,
            imbalance_end: DEFAULT_IMBALANCE,
            profile_start: TypeProfile::SAFE,
            profile_end: TypeProfile::SAFE,
            subclusters_start: 1,
            subclusters_end: 1,
            motion: ClusterMotion::None,
            drift_window: default_window(DEFAULT_LENGTH),
            seed: 1,
            factors: vec![Factor::StaticImbalance],
        }
    }
}

fn default_window(length: u64) -> (u64, u64) {
    let at = |f: f64| (length as f64 * f).round() as u64;
    (at(DEFAULT_DRIFT.0), at(DEFAULT_DRIFT.1))
}

impl ScenarioSpec {
    /// Sets the length and moves the drift to its default position.
    pub fn with_length(mut self, length: u64) -> Self {
        self.length = length;
        self.drift_window = default_window(length);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dimensions(mut self, d: usize) -> Self {
        self.dimensions = d;
        self
    }

    pub fn with_drift_window(mut self, start: u64, end: u64) -> Self {
        self.drift_window = (start, end);
        self
    }

    pub fn category(&self) -> String {
        factor_category(&self.factors)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Invalid(m));
        if self.length == 0 {
            return bad("length must be positive".into());
        }
        if self.dimensions < 2 {
            return bad(format!("need at least 2 dimensions, got {}", self.dimensions));
        }
        for v in [self.imbalance_start, self.imbalance_end] {
            if !(v > 0.0 && v <= 0.5) {
                return bad(format!("minority fraction {v} outside (0, 0.5]"));
            }
        }
        TypeProfile::new(self.profile_start.safe, self.profile_start.borderline, self.profile_start.rare)?;
        TypeProfile::new(self.profile_end.safe, self.profile_end.borderline, self.profile_end.rare)?;
        for n in [self.subclusters_start, self.subclusters_end] {
            if !(1..=MAX_SUBCLUSTERS).contains(&n) {
                return bad(format!("subcluster count {n} outside 1..={MAX_SUBCLUSTERS}"));
            }
        }
        let (s, e) = self.drift_window;
        if s > e || e > self.length {
            return bad(format!("drift window ({s}, {e}) not within [0, {}]", self.length));
        }
        Ok(())
    }

    /// Drift progress in `[0, 1]` at stream position `t`.
    pub fn progress(&self, t: u64) -> f64 {
        let (s, e) = self.drift_window;
        if t < s {
            0.0
        } else if t >= e {
            1.0
        } else {
            (t - s) as f64 / (e - s) as f64
        }
    }

    pub fn params_at(&self, progress: f64) -> DriftParams {
        DriftParams {
            progress,
            imbalance: lerp(self.imbalance_start, self.imbalance_end, progress),
            profile: self.profile_start.lerp(&self.profile_end, progress),
        }
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t <= 0.0 {
        a
    } else if t >= 1.0 {
        b
    } else {
        a + (b - a) * t
    }
}

/// Interpolated class and type parameters at one stream position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftParams {
    pub progress: f64,
    pub imbalance: f64,
    pub profile: TypeProfile,
}

pub fn drift_progress(spec: &ScenarioSpec, t: u64) -> DriftParams {
    spec.params_at(spec.progress(t))
}

fn number(term: &str, digits: &str) -> Result<f64, ScenarioError> {
    let ok = !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit() || c == '.');
    match digits.parse::<f64>() {
        Ok(v) if ok && v.is_finite() => Ok(v),
        _ => Err(ScenarioError::UnknownTerm(term.to_string())),
    }
}

fn percent(term: &str, digits: &str, lo_exclusive: f64, hi: f64) -> Result<f64, ScenarioError> {
    let v = number(term, digits)?;
    if v > lo_exclusive && v <= hi {
        Ok(v / 100.0)
    } else {
        Err(ScenarioError::OutOfRange {
            term: term.to_string(),
            reason: format!("percentage must lie in ({lo_exclusive}, {hi}]"),
        })
    }
}

fn count(term: &str, digits: &str, min: usize) -> Result<usize, ScenarioError> {
    let v = number(term, digits)?;
    if v.fract() != 0.0 || v < min as f64 || v > MAX_SUBCLUSTERS as f64 {
        return Err(ScenarioError::OutOfRange {
            term: term.to_string(),
            reason: format!("sub-cluster count must be an integer in {min}..={MAX_SUBCLUSTERS}"),
        });
    }
    Ok(v as usize)
}

fn set_once<T>(slot: &mut Option<T>, value: T, term: &str) -> Result<(), ScenarioError> {
    if slot.is_some() {
        return Err(ScenarioError::Conflict { term: term.to_string() });
    }
    *slot = Some(value);
    Ok(())
}

/// Parses a `+`-joined scenario name into a fully populated spec.
///
/// Terms: `StaticIm<p>`, `Im<b>` (ratio drifts from the static or default
/// ratio to b), `Im<a>to<b>`, `Borderline<p>`, `Rare<p>`, `Split<n>`,
/// `Merge<n>`, `Move<n>`.
pub fn parse_scenario(name: &str) -> Result<ScenarioSpec, ScenarioError> {
    let name = name.trim();
    if name.is_empty() {
        return Err(ScenarioError::Empty);
    }
    let mut static_im: Option<f64> = None;
    let mut drift_im: Option<(Option<f64>, f64)> = None;
    let mut borderline: Option<f64> = None;
    let mut rare: Option<f64> = None;
    let mut motion: Option<(ClusterMotion, usize)> = None;
    let mut factors = Vec::new();

    for raw in name.split('+') {
        let term = raw.trim();
        if term.is_empty() {
            return Err(ScenarioError::UnknownTerm(raw.to_string()));
        }
        if let Some(rest) = term.strip_prefix("StaticIm") {
            set_once(&mut static_im, percent(term, rest, 0.0, 50.0)?, term)?;
            factors.push(Factor::StaticImbalance);
        } else if let Some(rest) = term.strip_prefix("Im") {
            let value = match rest.split_once("to") {
                Some((a, b)) => (Some(percent(term, a, 0.0, 50.0)?), percent(term, b, 0.0, 50.0)?),
                None => (None, percent(term, rest, 0.0, 50.0)?),
            };
            set_once(&mut drift_im, value, term)?;
            factors.push(Factor::ImbalanceDrift);
        } else if let Some(rest) = term.strip_prefix("Borderline") {
            set_once(&mut borderline, percent(term, rest, 0.0, 100.0)?, term)?;
            factors.push(Factor::Borderline);
        } else if let Some(rest) = term.strip_prefix("Rare") {
            set_once(&mut rare, percent(term, rest, 0.0, 100.0)?, term)?;
            factors.push(Factor::Rare);
        } else if let Some(rest) = term.strip_prefix("Split") {
            set_once(&mut motion, (ClusterMotion::Split, count(term, rest, 2)?), term)?;
            factors.push(Factor::Split);
        } else if let Some(rest) = term.strip_prefix("Merge") {
            set_once(&mut motion, (ClusterMotion::Merge, count(term, rest, 2)?), term)?;
            factors.push(Factor::Merge);
        } else if let Some(rest) = term.strip_prefix("Move") {
            set_once(&mut motion, (ClusterMotion::Move, count(term, rest, 1)?), term)?;
            factors.push(Factor::Move);
        } else {
            return Err(ScenarioError::UnknownTerm(term.to_string()));
        }
    }

    let mut spec = ScenarioSpec {
        name: name.to_string(),
        factors,
        ..ScenarioSpec::default()
    };
    match (static_im, drift_im) {
        (Some(_), Some((Some(_), _))) => {
            let term = name.split('+').find(|t| t.trim().starts_with("Im")).unwrap_or(name);
            return Err(ScenarioError::Conflict { term: term.trim().to_string() });
        }
        (s, Some((from, to))) => {
            spec.imbalance_start = from.or(s).unwrap_or(DEFAULT_IMBALANCE);
            spec.imbalance_end = to;
        }
        (Some(s), None) => {
            spec.imbalance_start = s;
            spec.imbalance_end = s;
        }
        (None, None) => {}
    }
    let b = borderline.unwrap_or(0.0);
    let r = rare.unwrap_or(0.0);
    if b + r > 1.0 + 1e-12 {
        let term = if rare.is_some() { "Rare" } else { "Borderline" };
        let offending = name.split('+').find(|t| t.trim().starts_with(term)).unwrap_or(name);
        return Err(ScenarioError::OutOfRange {
            term: offending.trim().to_string(),
            reason: "borderline and rare shares exceed 100%".to_string(),
        });
    }
    spec.profile_end = TypeProfile {
        safe: (1.0 - b - r).max(0.0),
        borderline: b,
        rare: r,
    };
    if let Some((m, n)) = motion {
        spec.motion = m;
        (spec.subclusters_start, spec.subclusters_end) = match m {
            ClusterMotion::Split => (1, n),
            ClusterMotion::Merge => (n, 1),
            ClusterMotion::Move | ClusterMotion::None => (n, n),
        };
    }
    spec.validate()?;
    Ok(spec)
}
