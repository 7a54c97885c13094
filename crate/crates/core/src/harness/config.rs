use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constants::ChamberGeometry;
use crate::dynamics::AVERAGING_WINDOW;
use crate::ode::OdeSettings;
use crate::{Error, Result};

pub const DEFAULT_ATOMS: usize = 15_000;
pub const DEFAULT_SEED: u64 = 1;

/// `n` currents spaced evenly in log between `start` and `stop`, inclusive.
pub fn log_spaced(start: f64, stop: f64, n: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > start) || n < 2 {
        return Err(Error::Config(format!(
            "log grid needs 0 < start < stop and at least 2 points, got {start}..{stop} with {n}"
        )));
    }
    let ratio = (stop / start).ln();
    let mut grid: Vec<f64> = (0..n)
        .map(|i| start * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect();
    grid[0] = start;
    grid[n - 1] = stop;
    Ok(grid)
}

/// Default sweep grid: 25 log-spaced currents in [0.01, 0.5] A.
pub fn default_currents() -> Vec<f64> {
    log_spaced(0.01, 0.5, 25).expect("static grid is valid")
}

/// Parse `--currents`: either a comma-separated list (`0.02,0.1,0.3`) or a
/// log grid written `start:stop:points`.
pub fn parse_currents(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("expected start:stop:points, got {spec:?}")));
        }
        let start = parse_f64(parts[0])?;
        let stop = parse_f64(parts[1])?;
        let n = parts[2]
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("bad point count {:?}", parts[2])))?;
        return log_spaced(start, stop, n);
    }
    spec.split(',').map(|s| parse_f64(s.trim())).collect()
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Config(format!("not a number: {s:?}")))
}

/// Everything that determines a sweep's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Wire currents, A, strictly ascending.
    pub currents: Vec<f64>,
    pub atoms_per_current: usize,
    pub seed: u64,
    pub geometry: ChamberGeometry,
    pub ode: OdeSettings,
    /// Length of the final window over which θ_e is averaged, s.
    pub averaging_window: f64,
    pub output_path: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            currents: default_currents(),
            atoms_per_current: DEFAULT_ATOMS,
            seed: DEFAULT_SEED,
            geometry: ChamberGeometry::default(),
            ode: OdeSettings::default(),
            averaging_window: AVERAGING_WINDOW,
            output_path: PathBuf::from("results.csv"),
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.currents.is_empty() {
            return Err(Error::Config("no currents given".into()));
        }
        if let Some(bad) = self.currents.iter().find(|i| !(**i > 0.0 && i.is_finite())) {
            return Err(Error::Config(format!("currents must be positive, got {bad}")));
        }
        if self.currents.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("currents must be strictly ascending".into()));
        }
        if self.atoms_per_current == 0 {
            return Err(Error::Config("atoms_per_current must be at least 1".into()));
        }
        self.geometry
            .validate()
            .and_then(|_| self.ode.validate())
            .map_err(|e| Error::Config(e.to_string()))?;
        let transit = 2.0 * self.geometry.half_transit_time();
        if !(self.averaging_window > 0.0 && self.averaging_window <= transit) {
            return Err(Error::Config(format!(
                "averaging_window must lie in (0, {transit:e}] s, got {}",
                self.averaging_window
            )));
        }
        Ok(())
    }

    /// One-line description of the current grid for output metadata.
    pub fn describe_grid(&self) -> String {
        let c = &self.currents;
        let n = c.len();
        if n >= 3 {
            let step = (c[1] / c[0]).ln();
            let geometric = c
                .windows(2)
                .all(|w| ((w[1] / w[0]).ln() - step).abs() <= 1e-9 * step.abs());
            if geometric {
                return format!("{n} log-spaced currents in [{}, {}] A", c[0], c[n - 1]);
            }
        }
        format!("{n} listed currents in [{}, {}] A", c[0], c[n - 1])
    }
}
