//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; blank lines and `#` comments are ignored. Keys
//! that are not recognised are rejected so that typos cannot silently fall
//! back to defaults. Anything left unspecified takes the selected test's
//! default.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::cases::{TestCase, DEFAULT_G};
use crate::error::{Error, Result};
use crate::grid::Topography;
use crate::pressure::Mode;
use crate::reconstruction::{LimiterPairing, Order};
use crate::time_loop::SchemeConfig;
use crate::transport::WaveSpeedMode;

/// Every accepted key, in the order [`RunConfig::to_text`] writes them.
pub const KEYS: [&str; 19] = [
    "test",
    "n_cells",
    "n_moments",
    "order",
    "mode",
    "cfl",
    "cfl_implicit",
    "t_end",
    "domain_left",
    "domain_right",
    "g",
    "output_path",
    "snapshot_times",
    "limiter_pairing",
    "wave_speed_mode",
    "dt_max",
    "perturbation_amplitude",
    "profile_points",
    "topography_table",
];

/// One `key = value` pair and the line it came from (0 for overrides).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Split configuration text into entries without interpreting values.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config {
                line,
                message: format!("expected key = value, got {content:?}"),
            });
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Config {
                line,
                message: format!("unknown key {key:?}"),
            });
        }
        if out.iter().any(|e| e.key == key) {
            return Err(Error::Config {
                line,
                message: format!("duplicate key {key:?}"),
            });
        }
        out.push(Entry {
            line,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

/// Parse a command-line override of the form `key=value`.
pub fn parse_override(arg: &str) -> Result<Entry> {
    let bad = |message: String| Error::Config { line: 0, message };
    let (key, value) = arg
        .split_once('=')
        .ok_or_else(|| bad(format!("override {arg:?} is not key=value")))?;
    let key = key.trim().trim_start_matches("--");
    if !KEYS.contains(&key) {
        return Err(bad(format!("unknown key {key:?}")));
    }
    Ok(Entry {
        line: 0,
        key: key.to_string(),
        value: value.trim().to_string(),
    })
}

/// Fully resolved settings for one simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub test: TestCase,
    pub n_cells: usize,
    pub n_moments: usize,
    pub order: Order,
    pub mode: Mode,
    pub cfl: f64,
    /// CFL used for the implicit runs of the comparison commands.
    pub cfl_implicit: f64,
    pub t_end: f64,
    pub domain_left: f64,
    pub domain_right: f64,
    pub g: f64,
    pub output_path: PathBuf,
    pub snapshot_times: Vec<f64>,
    pub limiter_pairing: LimiterPairing,
    pub wave_speed_mode: WaveSpeedMode,
    pub dt_max: Option<f64>,
    pub perturbation_amplitude: f64,
    pub profile_points: Vec<f64>,
    pub topography_table: Option<PathBuf>,
}

impl RunConfig {
    pub fn for_test(test: TestCase) -> Self {
        let d = test.defaults();
        Self {
            test,
            n_cells: d.n_cells,
            n_moments: d.n_moments,
            order: Order::First,
            mode: Mode::Explicit,
            cfl: 0.9,
            cfl_implicit: d.cfl_implicit,
            t_end: d.t_end,
            domain_left: d.x_left,
            domain_right: d.x_right,
            g: DEFAULT_G,
            output_path: PathBuf::from("output"),
            snapshot_times: d.snapshot_times,
            limiter_pairing: LimiterPairing::Cross,
            wave_speed_mode: d.wave_speeds,
            dt_max: None,
            perturbation_amplitude: d.perturbation,
            profile_points: d.profile_points,
            topography_table: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_entries(&parse_entries(text)?)
    }

    /// Resolve entries against the defaults of the test they select
    /// (test 1 if none). Later entries replace earlier ones with the same key.
    pub fn from_entries(entries: &[Entry]) -> Result<Self> {
        let last = |key: &str| entries.iter().rev().find(|e| e.key == key);
        let test = match last("test") {
            Some(e) => e.value.parse::<TestCase>().map_err(|message| Error::Config {
                line: e.line,
                message,
            })?,
            None => TestCase::LakeAtRest,
        };
        let mut cfg = Self::for_test(test);
        let mut cfl_given = false;
        for key in KEYS.iter().skip(1) {
            if let Some(e) = last(key) {
                cfg.apply(e)?;
                cfl_given |= *key == "cfl";
            }
        }
        if !cfl_given && cfg.mode == Mode::Implicit {
            cfg.cfl = cfg.cfl_implicit;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, e: &Entry) -> Result<()> {
        let err = |message: String| Error::Config { line: e.line, message };
        let v = e.value.as_str();
        let real = |v: &str| -> Result<f64> {
            let x: f64 = v.parse().map_err(|_| err(format!("{}: {v:?} is not a number", e.key)))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(err(format!("{}: {v:?} is not finite", e.key)))
            }
        };
        let count = |v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| err(format!("{}: {v:?} is not a non-negative integer", e.key)))
        };
        let list = |v: &str| -> Result<Vec<f64>> {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(real)
                .collect()
        };
        match e.key.as_str() {
            "test" => self.test = v.parse().map_err(err)?,
            "n_cells" => self.n_cells = count(v)?,
            "n_moments" => self.n_moments = count(v)?,
            "order" => {
                self.order = count(v)
                    .ok()
                    .and_then(|k| u8::try_from(k).ok())
                    .and_then(Order::from_u8)
                    .ok_or_else(|| err(format!("order must be 1 or 2, got {v:?}")))?
            }
            "mode" => self.mode = v.parse().map_err(err)?,
            "cfl" => self.cfl = real(v)?,
            "cfl_implicit" => self.cfl_implicit = real(v)?,
            "t_end" => self.t_end = real(v)?,
            "domain_left" => self.domain_left = real(v)?,
            "domain_right" => self.domain_right = real(v)?,
            "g" => self.g = real(v)?,
            "output_path" => self.output_path = PathBuf::from(v),
            "snapshot_times" => self.snapshot_times = list(v)?,
            "limiter_pairing" => self.limiter_pairing = v.parse().map_err(err)?,
            "wave_speed_mode" => self.wave_speed_mode = v.parse().map_err(err)?,
            "dt_max" => {
                self.dt_max = match v {
                    "auto" | "" => None,
                    _ => Some(real(v)?),
                }
            }
            "perturbation_amplitude" => self.perturbation_amplitude = real(v)?,
            "profile_points" => self.profile_points = list(v)?,
            "topography_table" => {
                self.topography_table = if v.is_empty() { None } else { Some(PathBuf::from(v)) }
            }
            other => return Err(err(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Reject settings no run could use.
    pub fn validate(&self) -> Result<()> {
        let err = |message: String| Err(Error::Config { line: 0, message });
        if self.n_cells < 2 {
            return err(format!("n_cells must be at least 2, got {}", self.n_cells));
        }
        if !(self.domain_right > self.domain_left) {
            return err(format!(
                "empty domain [{}, {}]",
                self.domain_left, self.domain_right
            ));
        }
        for (name, v) in [("cfl", self.cfl), ("cfl_implicit", self.cfl_implicit), ("g", self.g)] {
            if !(v > 0.0) {
                return err(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.t_end >= 0.0) {
            return err(format!("t_end must be non-negative, got {}", self.t_end));
        }
        if let Some(d) = self.dt_max {
            if !(d > 0.0) {
                return err(format!("dt_max must be positive, got {d}"));
            }
        }
        if self.snapshot_times.iter().any(|&s| s < 0.0) {
            return err("snapshot times must be non-negative".into());
        }
        Ok(())
    }

    pub fn scheme(&self) -> SchemeConfig {
        SchemeConfig {
            order: self.order,
            mode: self.mode,
            cfl: self.cfl,
            pairing: self.limiter_pairing,
            wave_speeds: self.wave_speed_mode,
            dt_max: self.dt_max,
        }
    }

    /// Bottom for this run: the table if one is configured, else the test's own.
    pub fn topography(&self) -> Result<Topography> {
        match &self.topography_table {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                Topography::parse_table(&text)
            }
            None => Ok(self.test.defaults().topography),
        }
    }

    /// Canonical text form; [`RunConfig::parse`] reads it back unchanged.
    pub fn to_text(&self) -> String {
        let join = |xs: &[f64]| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("test", self.test.to_string());
        put("n_cells", self.n_cells.to_string());
        put("n_moments", self.n_moments.to_string());
        put("order", self.order.as_u8().to_string());
        put("mode", self.mode.to_string());
        put("cfl", self.cfl.to_string());
        put("cfl_implicit", self.cfl_implicit.to_string());
        put("t_end", self.t_end.to_string());
        put("domain_left", self.domain_left.to_string());
        put("domain_right", self.domain_right.to_string());
        put("g", self.g.to_string());
        put("output_path", self.output_path.display().to_string());
        put("snapshot_times", join(&self.snapshot_times));
        put("limiter_pairing", self.limiter_pairing.to_string());
        put("wave_speed_mode", self.wave_speed_mode.to_string());
        put("dt_max", self.dt_max.map_or("auto".to_string(), |d| d.to_string()));
        put("perturbation_amplitude", self.perturbation_amplitude.to_string());
        put("profile_points", join(&self.profile_points));
        put(
            "topography_table",
            self.topography_table
                .as_ref()
                .map_or(String::new(), |p| p.display().to_string()),
        );
        s
    }
}
