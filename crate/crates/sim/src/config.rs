//! Flat `key = value` run configuration.
//!
//! A config file names a scenario and overrides any of its defaults:
//!
//! ```text
//! # comment
//! scenario = scatter-static
//! n-steps = 400
//! closure = continuum
//! ```
//!
//! Keys accept `-` or `_` as separator. Command-line `--key value` pairs go
//! through the same [`Config::set`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use tbc_core::band2d::{aliasing_ratio, transverse_spectrum, BandGrid, Field2D};
use tbc_core::field::{make_gaussian, Grid1D, WavePacketSpec};
use tbc_core::kernel::DftParams;
use tbc_core::tbc1d::ClosureKind;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("config does not name a scenario")]
    MissingScenario,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Free1d,
    ScatterStatic,
    DrivenTrap,
    Tunneling,
    DrivenDelta,
    Free2d,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Self::Free1d,
        Self::ScatterStatic,
        Self::DrivenTrap,
        Self::Tunneling,
        Self::DrivenDelta,
        Self::Free2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Free1d => "free-1d",
            Self::ScatterStatic => "scatter-static",
            Self::DrivenTrap => "driven-trap",
            Self::Tunneling => "tunneling",
            Self::DrivenDelta => "driven-delta",
            Self::Free2d => "free-2d",
        }
    }

    /// Scenarios solved by the 1D grid stepper.
    pub fn is_grid_1d(self) -> bool {
        !matches!(self, Self::DrivenDelta | Self::Free2d)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| ConfigError::UnknownScenario(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub scenario: Scenario,
    pub half_width: f64,
    pub nx: usize,
    pub n_steps: usize,
    /// In units of `t̃ = 2t/σ0²`; unused by the delta scenario.
    pub total_time: f64,
    pub x0: f64,
    pub sigma0: f64,
    pub velocity: f64,
    pub depth: f64,
    pub width: f64,
    pub frequency: f64,
    pub offset: f64,
    pub lambda0: f64,
    pub amplitude: f64,
    pub drive_ratio: f64,
    pub pulses: f64,
    pub ny: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub y0: f64,
    pub velocity_y: f64,
    pub closure: ClosureKind,
    pub stride: usize,
    pub output: PathBuf,
    pub conservation_tol: f64,
    pub aliasing_tol: f64,
    pub oracle: bool,
    pub oracle_half_width: f64,
    pub oracle_tol: f64,
}

impl Config {
    pub fn defaults(scenario: Scenario) -> Self {
        let base = Self {
            scenario,
            half_width: 1.0,
            nx: 201,
            n_steps: 40,
            total_time: 4.0,
            x0: 0.0,
            sigma0: 0.2,
            velocity: 0.25,
            depth: 0.0,
            width: 0.05,
            frequency: 0.0,
            offset: 0.0,
            lambda0: 2.0,
            amplitude: 1.0,
            drive_ratio: 0.7,
            pulses: 40.0,
            ny: 45,
            y_min: 0.0,
            y_max: 5.0,
            y0: 1.0,
            velocity_y: 0.375,
            closure: ClosureKind::Lattice,
            stride: 4,
            output: PathBuf::from(format!("out/{}", scenario.name())),
            conservation_tol: 1e-5,
            aliasing_tol: tbc_core::band2d::DEFAULT_ALIASING_TOLERANCE,
            oracle: false,
            oracle_half_width: 8.0,
            oracle_tol: 1e-6,
        };
        match scenario {
            Scenario::Free1d => base,
            Scenario::ScatterStatic => Self {
                nx: 401,
                n_steps: 200,
                total_time: 5.0,
                x0: -0.3,
                sigma0: 0.15,
                velocity: 0.37,
                depth: -150.0,
                stride: 20,
                ..base
            },
            Scenario::DrivenTrap => Self {
                nx: 800,
                n_steps: 800,
                total_time: 80.0,
                sigma0: 0.1,
                velocity: 0.0,
                depth: -200.0,
                frequency: 0.05,
                stride: 80,
                ..base
            },
            Scenario::Tunneling => Self {
                nx: 401,
                n_steps: 400,
                total_time: 20.0,
                sigma0: 0.12,
                velocity: 0.0,
                depth: 150.0,
                offset: 0.5,
                stride: 40,
                ..base
            },
            Scenario::DrivenDelta => Self {
                n_steps: 1000,
                stride: 1,
                ..base
            },
            Scenario::Free2d => Self {
                nx: 101,
                n_steps: 100,
                stride: 20,
                ..base
            },
        }
    }

    /// Parses a config file body; `scenario` may appear on any line.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax(i + 1))?;
            pairs.push((k.trim().to_owned(), v.trim().to_owned()));
        }
        let scenario = pairs
            .iter()
            .find(|(k, _)| k == "scenario")
            .ok_or(ConfigError::MissingScenario)?
            .1
            .parse()?;
        let mut cfg = Self::defaults(scenario);
        for (k, v) in pairs.iter().filter(|(k, _)| k != "scenario") {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::BadValue {
                key: key.to_owned(),
                value: value.to_owned(),
            })
        }
        let norm = key.trim_start_matches("--").replace('_', "-");
        match norm.as_str() {
            "scenario" => self.scenario = value.parse()?,
            "half-width" => self.half_width = num(key, value)?,
            "nx" => self.nx = num(key, value)?,
            "n-steps" => self.n_steps = num(key, value)?,
            "total-time" => self.total_time = num(key, value)?,
            "x0" => self.x0 = num(key, value)?,
            "sigma0" => self.sigma0 = num(key, value)?,
            "velocity" => self.velocity = num(key, value)?,
            "depth" => self.depth = num(key, value)?,
            "width" => self.width = num(key, value)?,
            "frequency" => self.frequency = num(key, value)?,
            "offset" => self.offset = num(key, value)?,
            "lambda0" => self.lambda0 = num(key, value)?,
            "amplitude" => self.amplitude = num(key, value)?,
            "drive-ratio" => self.drive_ratio = num(key, value)?,
            "pulses" => self.pulses = num(key, value)?,
            "ny" => self.ny = num(key, value)?,
            "y-min" => self.y_min = num(key, value)?,
            "y-max" => self.y_max = num(key, value)?,
            "y0" => self.y0 = num(key, value)?,
            "velocity-y" => self.velocity_y = num(key, value)?,
            "closure" => {
                self.closure = value.parse().map_err(|_| ConfigError::BadValue {
                    key: key.to_owned(),
                    value: value.to_owned(),
                })?
            }
            "stride" => self.stride = num(key, value)?,
            "output" => self.output = PathBuf::from(value),
            "conservation-tol" => self.conservation_tol = num(key, value)?,
            "aliasing-tol" => self.aliasing_tol = num(key, value)?,
            "oracle" => self.oracle = num(key, value)?,
            "oracle-half-width" => self.oracle_half_width = num(key, value)?,
            "oracle-tol" => self.oracle_tol = num(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_owned())),
        }
        Ok(())
    }

    /// Resolved parameters as `key = value` lines, readable by [`Config::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("scenario", self.scenario.to_string());
        put("half-width", self.half_width.to_string());
        put("nx", self.nx.to_string());
        put("n-steps", self.n_steps.to_string());
        put("total-time", self.total_time.to_string());
        put("x0", self.x0.to_string());
        put("sigma0", self.sigma0.to_string());
        put("velocity", self.velocity.to_string());
        put("depth", self.depth.to_string());
        put("width", self.width.to_string());
        put("frequency", self.frequency.to_string());
        put("offset", self.offset.to_string());
        put("lambda0", self.lambda0.to_string());
        put("amplitude", self.amplitude.to_string());
        put("drive-ratio", self.drive_ratio.to_string());
        put("pulses", self.pulses.to_string());
        put("ny", self.ny.to_string());
        put("y-min", self.y_min.to_string());
        put("y-max", self.y_max.to_string());
        put("y0", self.y0.to_string());
        put("velocity-y", self.velocity_y.to_string());
        put("closure", self.closure.name().to_owned());
        put("stride", self.stride.to_string());
        put("output", self.output.display().to_string());
        put("conservation-tol", self.conservation_tol.to_string());
        put("aliasing-tol", self.aliasing_tol.to_string());
        put("oracle", self.oracle.to_string());
        put("oracle-half-width", self.oracle_half_width.to_string());
        put("oracle-tol", self.oracle_tol.to_string());
        out
    }

    pub fn packet(&self) -> tbc_core::Result<WavePacketSpec> {
        WavePacketSpec::new(self.x0, self.sigma0, self.velocity)
    }

    pub fn packet_y(&self) -> tbc_core::Result<WavePacketSpec> {
        WavePacketSpec::new(self.y0, self.sigma0, self.velocity_y)
    }

    pub fn grid(&self) -> tbc_core::Result<Grid1D> {
        Grid1D::new(self.half_width, self.nx)
    }

    pub fn band_grid(&self) -> tbc_core::Result<BandGrid> {
        BandGrid::new(self.grid()?, self.y_min, self.y_max - self.y_min, self.ny)
    }
}

/// Outcome of the static parameter checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        if self.warnings.is_empty() && self.errors.is_empty() {
            writeln!(f, "ok")?;
        }
        Ok(())
    }
}

/// Relative boundary amplitude that triggers the support warning.
pub const LEAK_WARNING: f64 = tbc_core::field::SUPPORT_LEAK_TOLERANCE;

/// Parameter sanity, support-inside, Nyquist and damping checks.
pub fn validate(cfg: &Config) -> Report {
    let mut r = Report::default();
    let mut positive = |name: &str, v: f64| {
        if !(v.is_finite() && v > 0.0) {
            r.errors.push(format!("{name} must be positive, got {v}"));
        }
    };
    positive("half-width", cfg.half_width);
    positive("sigma0", cfg.sigma0);
    positive("width", cfg.width);
    if cfg.scenario == Scenario::DrivenDelta {
        positive("lambda0", cfg.lambda0);
        positive("pulses", cfg.pulses);
        positive("drive-ratio", cfg.drive_ratio);
    } else {
        positive("total-time", cfg.total_time);
    }
    if cfg.n_steps == 0 {
        r.errors.push("n-steps must be at least 1".into());
    }
    if cfg.stride == 0 {
        r.errors.push("stride must be at least 1".into());
    }
    if cfg.nx < 3 {
        r.errors.push(format!("nx must be at least 3, got {}", cfg.nx));
    }
    if !r.errors.is_empty() {
        return r;
    }

    let dft = DftParams::for_steps(cfg.n_steps);
    let alias = (-(dft.size as f64) * dft.eta).exp();
    if alias >= 1e-12 {
        r.errors.push(format!("DFT damping too weak: e^(-N eta) = {alias:e}"));
    }
    if cfg.scenario == Scenario::DrivenDelta {
        return r;
    }

    let (grid, packet) = match (cfg.grid(), cfg.packet()) {
        (Ok(g), Ok(p)) => (g, p),
        (Err(e), _) | (_, Err(e)) => {
            r.errors.push(e.to_string());
            return r;
        }
    };
    let leak = make_gaussian(&grid, &packet).boundary_leak();
    if leak > LEAK_WARNING {
        r.warnings.push(format!(
            "initial packet reaches the boundary (relative amplitude {leak:.2e}); the closure assumes an empty exterior"
        ));
    }
    let k_max = packet.wavenumber().abs() + 6.0 / cfg.sigma0;
    if k_max * grid.dx() > std::f64::consts::PI {
        r.errors.push(format!(
            "grid too coarse for the packet spectrum: k_max dx = {:.3} > pi",
            k_max * grid.dx()
        ));
    }

    if cfg.scenario == Scenario::Free2d {
        if cfg.y_max <= cfg.y_min || cfg.ny < 2 {
            r.errors.push("y window must be non-empty with ny >= 2".into());
            return r;
        }
        let (band, py) = match (cfg.band_grid(), cfg.packet_y()) {
            (Ok(b), Ok(p)) => (b, p),
            (Err(e), _) | (_, Err(e)) => {
                r.errors.push(e.to_string());
                return r;
            }
        };
        let field = Field2D::from_fn(band.clone(), |x, y| packet.value(x) * py.value(y));
        let ratio = aliasing_ratio(&band, &transverse_spectrum(&field));
        if ratio > cfg.aliasing_tol {
            r.errors.push(format!(
                "transverse spectrum not decayed at Nyquist: {ratio:.2e} > {:.0e} (raise ny)",
                cfg.aliasing_tol
            ));
        }
        let yc = cfg.y0 + cfg.velocity_y * cfg.total_time;
        let spread = 3.0 * py.width_at(cfg.total_time);
        if yc - spread < cfg.y_min || yc + spread > cfg.y_max {
            r.warnings.push(format!(
                "packet reaches the edge of the y window by t = {} (centre {yc:.2}, 3 widths {spread:.2})",
                cfg.total_time
            ));
        }
    }
    r
}
