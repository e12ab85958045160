//! INI-style scenario configuration.
//!
//! ```text
//! [scenario]
//! group = su2
//! [field]
//! kind = two_color
//! amplitudes = 0.5, 0.8
//! [loop]
//! radius = 1
//! ```
//!
//! Every key has a default; [`ScenarioConfig::serialize`] writes all of them
//! in a fixed order so that `parse(serialize(c)) == c`.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{LabError, Result};
use crate::gaugefield::{Couplings, FieldConfig, FieldKind, GaugeFunction, Ramp};
use crate::geometry::{Circle, Plane, Resolution};
use crate::holonomy::Mode;
use crate::liealg::{GeneratorSet, DEFAULT_MAX_RANK};

/// Upper bound on any single resolution parameter.
pub const MAX_RESOLUTION: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupSpec {
    U1,
    Su(usize),
}

impl GroupSpec {
    pub fn name(self) -> String {
        match self {
            GroupSpec::U1 => "u1".into(),
            GroupSpec::Su(n) => format!("su{n}"),
        }
    }

    fn parse(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim().to_ascii_lowercase();
        let compact: String = s.chars().filter(|c| !"() ".contains(*c)).collect();
        if compact == "u1" {
            return Ok(GroupSpec::U1);
        }
        match compact.strip_prefix("su").map(str::parse::<usize>) {
            Some(Ok(n)) => Ok(GroupSpec::Su(n)),
            _ => Err(format!("unknown group `{s}` (expected u1, su2, su3, or suN)")),
        }
    }

    pub fn build(self) -> Result<GeneratorSet> {
        match self {
            GroupSpec::U1 => Ok(GeneratorSet::u1()),
            GroupSpec::Su(n) => GeneratorSet::su(n),
        }
    }

    /// Number of generators.
    pub fn dim(self) -> usize {
        match self {
            GroupSpec::U1 => 1,
            GroupSpec::Su(n) => n * n - 1,
        }
    }
}

/// Whether the cancellation residuals count toward the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Expectation {
    /// Only when the scenario satisfies the cancellation preconditions.
    #[default]
    Auto,
    Always,
    Never,
}

impl Expectation {
    pub fn name(self) -> &'static str {
        match self {
            Expectation::Auto => "auto",
            Expectation::Always => "true",
            Expectation::Never => "false",
        }
    }

    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(Expectation::Auto),
            "true" | "yes" | "1" => Ok(Expectation::Always),
            "false" | "no" | "0" => Ok(Expectation::Never),
            other => Err(format!("expected auto, true or false, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub group: GroupSpec,
    pub mode: Mode,
    pub tolerance: f64,
    pub expect_cancellation: Expectation,
    pub quantize: bool,
    pub couplings: Couplings,
    pub field: FieldConfig,
    pub circle: Circle,
    pub t0: f64,
    pub t1: f64,
    pub resolution: Resolution,
    pub convergence_resolutions: Vec<usize>,
    pub probe_scales: Vec<f64>,
    pub output_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let group = GroupSpec::Su(2);
        ScenarioConfig {
            name: "scenario".into(),
            group,
            mode: Mode::Unitary,
            tolerance: 1e-6,
            expect_cancellation: Expectation::Auto,
            quantize: false,
            couplings: Couplings::default(),
            field: default_field(group, None),
            circle: Circle::new([0.0; 3], 2.0, Plane::Xy),
            t0: 0.0,
            t1: 1.0,
            resolution: Resolution::default(),
            convergence_resolutions: vec![64, 128, 256],
            probe_scales: vec![0.25, 0.5, 1.0],
            output_dir: PathBuf::from("holonomy-out"),
        }
    }
}

/// Last generator: `T_3` for SU(2), `T_8` for SU(3).
fn default_direction(group: GroupSpec) -> Vec<f64> {
    let mut d = vec![0.0; group.dim()];
    *d.last_mut().expect("at least one generator") = 1.0;
    d
}

fn default_field(group: GroupSpec, kind: Option<FieldKind>) -> FieldConfig {
    let kind = kind.unwrap_or(match group {
        GroupSpec::U1 => FieldKind::AbelianSolenoid,
        GroupSpec::Su(_) => FieldKind::EmbeddedSolenoid,
    });
    FieldConfig {
        kind,
        flux_max: 1.0,
        solenoid_radius: 1.0,
        ramp: Ramp::Smoothstep { t0: 0.0, t1: 1.0 },
        color_direction: default_direction(group),
        amplitudes: [0.5, 0.8],
        gauge_function: GaugeFunction::Product,
        gauge_scale: 1.0,
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    (
        "scenario",
        &["name", "group", "mode", "tolerance", "expect_cancellation", "quantize", "field"],
    ),
    ("couplings", &["e", "g"]),
    (
        "field",
        &[
            "kind",
            "flux_max",
            "solenoid_radius",
            "ramp",
            "ramp_t0",
            "ramp_t1",
            "color_direction",
            "amplitudes",
            "gauge_function",
            "gauge_scale",
        ],
    ),
    ("loop", &["center", "radius", "plane", "t0", "t1"]),
    ("resolution", &["steps", "grid_u", "grid_v"]),
    ("convergence", &["resolutions"]),
    ("probe", &["scales"]),
    ("output", &["dir"]),
];

struct Entry {
    line: usize,
    section: &'static str,
    key: &'static str,
    value: String,
}

fn parse_err(line: usize, message: impl Into<String>) -> LabError {
    LabError::Parse {
        line,
        message: message.into(),
    }
}

fn range(key: &str, message: impl Into<String>) -> LabError {
    LabError::Range {
        key: key.into(),
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Entry>> {
    let mut section: &'static str = "scenario";
    let mut out: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split(['#', ';']).next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line, "unterminated section header"))?
                .trim()
                .to_ascii_lowercase();
            section = SECTIONS
                .iter()
                .find(|(s, _)| *s == name)
                .map(|(s, _)| *s)
                .ok_or_else(|| parse_err(line, format!("unknown section [{name}]")))?;
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected `key = value`, found `{content}`")))?;
        let key = key.trim().to_ascii_lowercase();
        if key.is_empty() {
            return Err(parse_err(line, "missing key before `=`"));
        }
        let keys = SECTIONS.iter().find(|(s, _)| *s == section).map(|(_, k)| *k).unwrap_or(&[]);
        let key: &'static str = keys.iter().find(|k| **k == key).copied().ok_or_else(|| LabError::UnknownKey {
            line,
            section: section.to_string(),
            key: key.clone(),
        })?;
        if let Some(prev) = out.iter().find(|e| e.section == section && e.key == key) {
            return Err(parse_err(
                line,
                format!("duplicate key `{key}` in [{section}] (first set on line {})", prev.line),
            ));
        }
        out.push(Entry {
            line,
            section,
            key,
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

fn number(e: &Entry) -> Result<f64> {
    e.value
        .parse::<f64>()
        .map_err(|_| parse_err(e.line, format!("`{}` expects a number, found `{}`", e.key, e.value)))
}

fn count(e: &Entry) -> Result<usize> {
    e.value
        .parse::<usize>()
        .map_err(|_| parse_err(e.line, format!("`{}` expects a non-negative integer, found `{}`", e.key, e.value)))
}

fn list<T>(e: &Entry, item: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    e.value
        .split(',')
        .map(|s| {
            item(s.trim()).ok_or_else(|| parse_err(e.line, format!("`{}` has an invalid list item `{}`", e.key, s.trim())))
        })
        .collect()
}

fn boolean(e: &Entry) -> Result<bool> {
    match e.value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(parse_err(e.line, format!("`{}` expects true or false, found `{}`", e.key, e.value))),
    }
}

fn plane_name(p: Plane) -> &'static str {
    match p {
        Plane::Xy => "xy",
        Plane::Yz => "yz",
        Plane::Zx => "zx",
    }
}

fn ramp_bounds(r: Ramp) -> (f64, f64) {
    match r {
        Ramp::Constant => (0.0, 1.0),
        Ramp::Linear { t0, t1 } | Ramp::Smoothstep { t0, t1 } => (t0, t1),
    }
}

fn fmt_list<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl ScenarioConfig {
    /// Parse and validate configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        let entries = lex(text)?;
        let get = |section: &str, key: &str| entries.iter().find(|e| e.section == section && e.key == key);

        let mut cfg = ScenarioConfig::default();
        if let Some(e) = get("scenario", "group") {
            cfg.group = GroupSpec::parse(&e.value).map_err(|m| parse_err(e.line, m))?;
            if let GroupSpec::Su(n) = cfg.group {
                if !(2..=DEFAULT_MAX_RANK).contains(&n) {
                    return Err(range("group", format!("SU(n) needs 2 <= n <= {DEFAULT_MAX_RANK}, got {n}")));
                }
            }
        }
        let kind_entry = match (get("field", "kind"), get("scenario", "field")) {
            (Some(a), Some(b)) => {
                return Err(parse_err(
                    b.line.max(a.line),
                    "field kind given both as [scenario] field and [field] kind",
                ))
            }
            (a, b) => a.or(b),
        };
        let kind = kind_entry
            .map(|e| FieldKind::parse(&e.value).map_err(|err| parse_err(e.line, err.to_string())))
            .transpose()?;
        cfg.field = default_field(cfg.group, kind);

        for e in &entries {
            match (e.section, e.key) {
                ("scenario", "name") => cfg.name = e.value.clone(),
                ("scenario", "mode") => cfg.mode = Mode::parse(&e.value).map_err(|err| parse_err(e.line, err.to_string()))?,
                ("scenario", "tolerance") => cfg.tolerance = number(e)?,
                ("scenario", "expect_cancellation") => {
                    cfg.expect_cancellation = Expectation::parse(&e.value).map_err(|m| parse_err(e.line, m))?
                }
                ("scenario", "quantize") => cfg.quantize = boolean(e)?,
                ("couplings", "e") => cfg.couplings.e = number(e)?,
                ("couplings", "g") => cfg.couplings.g = number(e)?,
                ("field", "flux_max") => cfg.field.flux_max = number(e)?,
                ("field", "solenoid_radius") => cfg.field.solenoid_radius = number(e)?,
                ("field", "color_direction") => cfg.field.color_direction = list(e, |s| s.parse().ok())?,
                ("field", "amplitudes") => {
                    let v: Vec<f64> = list(e, |s| s.parse().ok())?;
                    cfg.field.amplitudes = v
                        .try_into()
                        .map_err(|_| parse_err(e.line, "`amplitudes` expects exactly two numbers"))?;
                }
                ("field", "gauge_function") => {
                    cfg.field.gauge_function = match e.value.as_str() {
                        "xy" => GaugeFunction::Product,
                        "sin_cos" => GaugeFunction::SinCos,
                        other => return Err(parse_err(e.line, format!("unknown gauge_function `{other}` (xy or sin_cos)"))),
                    }
                }
                ("field", "gauge_scale") => cfg.field.gauge_scale = number(e)?,
                ("loop", "center") => {
                    let v: Vec<f64> = list(e, |s| s.parse().ok())?;
                    cfg.circle.center = v
                        .try_into()
                        .map_err(|_| parse_err(e.line, "`center` expects exactly three numbers"))?;
                }
                ("loop", "radius") => cfg.circle.radius = number(e)?,
                ("loop", "plane") => {
                    cfg.circle.plane = match e.value.to_ascii_lowercase().as_str() {
                        "xy" => Plane::Xy,
                        "yz" => Plane::Yz,
                        "zx" => Plane::Zx,
                        other => return Err(parse_err(e.line, format!("unknown plane `{other}` (xy, yz or zx)"))),
                    }
                }
                ("loop", "t0") => cfg.t0 = number(e)?,
                ("loop", "t1") => cfg.t1 = number(e)?,
                ("resolution", "steps") => cfg.resolution.steps = count(e)?,
                ("resolution", "grid_u") => cfg.resolution.grid_u = count(e)?,
                ("resolution", "grid_v") => cfg.resolution.grid_v = count(e)?,
                ("convergence", "resolutions") => cfg.convergence_resolutions = list(e, |s| s.parse().ok())?,
                ("probe", "scales") => cfg.probe_scales = list(e, |s| s.parse().ok())?,
                ("output", "dir") => cfg.output_dir = PathBuf::from(&e.value),
                _ => {}
            }
        }

        let (mut rt0, mut rt1) = (0.0, 1.0);
        if let Some(e) = get("field", "ramp_t0") {
            rt0 = number(e)?;
        }
        if let Some(e) = get("field", "ramp_t1") {
            rt1 = number(e)?;
        }
        cfg.field.ramp = match get("field", "ramp").map(|e| (e.line, e.value.to_ascii_lowercase())) {
            None => Ramp::Smoothstep { t0: rt0, t1: rt1 },
            Some((_, v)) if v == "smoothstep" => Ramp::Smoothstep { t0: rt0, t1: rt1 },
            Some((_, v)) if v == "linear" => Ramp::Linear { t0: rt0, t1: rt1 },
            Some((_, v)) if v == "constant" => Ramp::Constant,
            Some((line, v)) => return Err(parse_err(line, format!("unknown ramp `{v}` (constant, linear or smoothstep)"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range checks on a fully populated config.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains([',', '"', '\n']) {
            return Err(range("name", "must be non-empty without commas or quotes"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(range("tolerance", format!("must be positive and finite, got {}", self.tolerance)));
        }
        for (k, v) in [("e", self.couplings.e), ("g", self.couplings.g)] {
            if !v.is_finite() {
                return Err(range(k, "must be finite"));
            }
        }
        if !(self.circle.radius > 0.0 && self.circle.radius.is_finite()) {
            return Err(range("radius", format!("loop radius must be positive, got {}", self.circle.radius)));
        }
        if self.circle.center.iter().any(|c| !c.is_finite()) {
            return Err(range("center", "must be finite"));
        }
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t0 < self.t1) {
            return Err(range("t1", format!("need t0 < t1, got t0 = {} and t1 = {}", self.t0, self.t1)));
        }
        for (k, v) in [
            ("steps", self.resolution.steps),
            ("grid_u", self.resolution.grid_u),
            ("grid_v", self.resolution.grid_v),
        ] {
            if v == 0 || v > MAX_RESOLUTION {
                return Err(range(k, format!("must be between 1 and {MAX_RESOLUTION}, got {v}")));
            }
        }
        if self.convergence_resolutions.iter().any(|&r| r == 0 || r > MAX_RESOLUTION) {
            return Err(range("resolutions", format!("each must be between 1 and {MAX_RESOLUTION}")));
        }
        if self.probe_scales.iter().any(|s| !s.is_finite()) {
            return Err(range("scales", "must be finite"));
        }
        if self.field.color_direction.len() != self.group.dim() {
            return Err(range(
                "color_direction",
                format!("{} needs {} components, got {}", self.group.name(), self.group.dim(), self.field.color_direction.len()),
            ));
        }
        if let Ramp::Linear { t0, t1 } | Ramp::Smoothstep { t0, t1 } = self.field.ramp {
            if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
                return Err(range("ramp_t1", format!("need ramp_t0 < ramp_t1, got {t0} and {t1}")));
            }
        }
        let group = self.group.build()?;
        self.field.validate(&group).map_err(|err| match err {
            LabError::InvalidParameter { name, reason } => range(&name, reason),
            other => other,
        })
    }

    /// Canonical text form with every key present.
    pub fn serialize(&self) -> String {
        let f = &self.field;
        let (rt0, rt1) = ramp_bounds(f.ramp);
        let gauge_fn = match f.gauge_function {
            GaugeFunction::Product => "xy",
            GaugeFunction::SinCos => "sin_cos",
        };
        let mut s = String::new();
        let _ = writeln!(s, "[scenario]");
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "group = {}", self.group.name());
        let _ = writeln!(s, "mode = {}", self.mode.name());
        let _ = writeln!(s, "tolerance = {:e}", self.tolerance);
        let _ = writeln!(s, "expect_cancellation = {}", self.expect_cancellation.name());
        let _ = writeln!(s, "quantize = {}", self.quantize);
        let _ = writeln!(s, "\n[couplings]");
        let _ = writeln!(s, "e = {}", self.couplings.e);
        let _ = writeln!(s, "g = {}", self.couplings.g);
        let _ = writeln!(s, "\n[field]");
        let _ = writeln!(s, "kind = {}", f.kind.name());
        let _ = writeln!(s, "flux_max = {}", f.flux_max);
        let _ = writeln!(s, "solenoid_radius = {}", f.solenoid_radius);
        let _ = writeln!(s, "ramp = {}", f.ramp.name());
        let _ = writeln!(s, "ramp_t0 = {rt0}");
        let _ = writeln!(s, "ramp_t1 = {rt1}");
        let _ = writeln!(s, "color_direction = {}", fmt_list(&f.color_direction));
        let _ = writeln!(s, "amplitudes = {}", fmt_list(&f.amplitudes));
        let _ = writeln!(s, "gauge_function = {gauge_fn}");
        let _ = writeln!(s, "gauge_scale = {}", f.gauge_scale);
        let _ = writeln!(s, "\n[loop]");
        let _ = writeln!(s, "center = {}", fmt_list(&self.circle.center));
        let _ = writeln!(s, "radius = {}", self.circle.radius);
        let _ = writeln!(s, "plane = {}", plane_name(self.circle.plane));
        let _ = writeln!(s, "t0 = {}", self.t0);
        let _ = writeln!(s, "t1 = {}", self.t1);
        let _ = writeln!(s, "\n[resolution]");
        let _ = writeln!(s, "steps = {}", self.resolution.steps);
        let _ = writeln!(s, "grid_u = {}", self.resolution.grid_u);
        let _ = writeln!(s, "grid_v = {}", self.resolution.grid_v);
        let _ = writeln!(s, "\n[convergence]");
        let _ = writeln!(s, "resolutions = {}", fmt_list(&self.convergence_resolutions));
        let _ = writeln!(s, "\n[probe]");
        let _ = writeln!(s, "scales = {}", fmt_list(&self.probe_scales));
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "dir = {}", self.output_dir.display());
        s
    }

    /// `serialize(parse(text))`.
    pub fn normalize(text: &str) -> Result<String> {
        Ok(Self::parse(text)?.serialize())
    }

    pub fn plane_name(&self) -> &'static str {
        plane_name(self.circle.plane)
    }

    pub fn is_time_dependent(&self) -> bool {
        self.field.ramp.is_time_dependent()
    }
}
