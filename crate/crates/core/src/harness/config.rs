//! Run configuration: plain `key = value` files, with command-line values
//! layered on top.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{HydroError, Result};
use crate::mesh::Order;
use crate::predictor::IntegratorChoice;
use crate::riemann::RiemannSolver;
use crate::transfer::{SchemeConfig, TransferStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Vortex,
    Sod,
    Constant,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Vortex => "vortex",
            Problem::Sod => "sod",
            Problem::Constant => "constant",
        }
    }

    /// Stopping rule used when neither a final time nor a step count is given.
    pub fn default_stop(self) -> StopAt {
        match self {
            // the free stream carries the vortex once across the box
            Problem::Vortex => StopAt::Time(super::problems::VORTEX_CROSSING_TIME),
            Problem::Sod => StopAt::Time(0.2),
            Problem::Constant => StopAt::Steps(10),
        }
    }
}

impl FromStr for Problem {
    type Err = HydroError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vortex" => Ok(Problem::Vortex),
            "sod" => Ok(Problem::Sod),
            "constant" => Ok(Problem::Constant),
            other => Err(HydroError::config(format!("unknown problem '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopAt {
    Time(f64),
    Steps(u64),
}

impl fmt::Display for StopAt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopAt::Time(t) => write!(f, "tfinal={t}"),
            StopAt::Steps(n) => write!(f, "steps={n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub order: Order,
    pub integrator: IntegratorChoice,
    pub solver: RiemannSolver,
    pub strategy: TransferStrategy,
    pub n: [usize; 3],
    /// `None` picks the order's default Courant number.
    pub cfl: Option<f64>,
    /// `None` picks the problem's default.
    pub stop: Option<StopAt>,
    pub split: [usize; 3],
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Vortex,
            order: Order::Second,
            integrator: IntegratorChoice::Ader,
            solver: RiemannSolver::Hll,
            strategy: TransferStrategy::Skinny,
            n: [32; 3],
            cfl: None,
            stop: None,
            split: [1; 3],
            out: None,
            seed: 0,
            workers: 0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| HydroError::config(format!("invalid value '{value}' for '{key}'")))
}

/// Parses `PxQxR` (or a single integer for all three axes).
pub fn parse_triple(key: &str, value: &str) -> Result<[usize; 3]> {
    let parts: Vec<&str> = value.split(['x', 'X', ',']).map(str::trim).collect();
    match parts.as_slice() {
        [one] => {
            let n = parse(key, one)?;
            Ok([n; 3])
        }
        [a, b, c] => Ok([parse(key, a)?, parse(key, b)?, parse(key, c)?]),
        _ => Err(HydroError::config(format!(
            "invalid value '{value}' for '{key}' (expected PxQxR)"
        ))),
    }
}

impl RunConfig {
    pub fn cfl(&self) -> f64 {
        self.cfl.unwrap_or_else(|| self.order.default_cfl())
    }

    pub fn stop(&self) -> StopAt {
        self.stop.unwrap_or_else(|| self.problem.default_stop())
    }

    pub fn scheme(&self) -> SchemeConfig {
        SchemeConfig {
            integrator: self.integrator,
            solver: self.solver,
            strategy: self.strategy,
            ..SchemeConfig::new(self.order)
        }
    }

    /// Sets one option by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().to_ascii_lowercase().as_str() {
            "problem" => self.problem = value.parse()?,
            "order" => self.order = Order::from_int(parse(key, value)?)?,
            "integrator" => self.integrator = value.parse()?,
            "riemann" | "solver" => self.solver = value.parse()?,
            "strategy" => self.strategy = value.parse()?,
            "n" => self.n = parse_triple(key, value)?,
            "nx" => self.n[0] = parse(key, value)?,
            "ny" => self.n[1] = parse(key, value)?,
            "nz" => self.n[2] = parse(key, value)?,
            "cfl" => self.cfl = Some(parse(key, value)?),
            "tfinal" => self.stop = Some(StopAt::Time(parse(key, value)?)),
            "steps" => self.stop = Some(StopAt::Steps(parse(key, value)?)),
            "split" => self.split = parse_triple(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "seed" => self.seed = parse(key, value)?,
            "workers" => self.workers = parse(key, value)?,
            other => return Err(HydroError::config(format!("unknown option '{other}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut stop_keys = 0;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HydroError::config(format!("line {}: expected key = value, got '{raw}'", lineno + 1))
            })?;
            if matches!(key.trim(), "tfinal" | "steps") {
                stop_keys += 1;
            }
            self.set(key, value)
                .map_err(|e| HydroError::config(format!("line {}: {e}", lineno + 1)))?;
        }
        if stop_keys > 1 {
            return Err(HydroError::config("set only one of 'tfinal' and 'steps'"));
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let cfl = self.cfl();
        if !(cfl > 0.0 && cfl < 1.0) {
            return Err(HydroError::config(format!("cfl must lie in (0, 1), got {cfl}")));
        }
        match self.stop() {
            StopAt::Time(t) if !(t > 0.0 && t.is_finite()) => {
                return Err(HydroError::config(format!("tfinal must be positive, got {t}")))
            }
            StopAt::Steps(0) => return Err(HydroError::config("steps must be positive")),
            _ => {}
        }
        for a in 0..3 {
            if self.split[a] == 0 || self.n[a] % self.split[a] != 0 {
                return Err(HydroError::config(format!(
                    "patch split {:?} does not divide mesh {:?}",
                    self.split, self.n
                )));
            }
            if self.n[a] / self.split[a] < 4 {
                return Err(HydroError::config(format!(
                    "patches of mesh {:?} split {:?} are thinner than 4 zones",
                    self.n, self.split
                )));
            }
        }
        Ok(())
    }

    /// Every option as `(key, value)`, in a fixed order, for CSV rows.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let (tfinal, steps) = match self.stop() {
            StopAt::Time(t) => (t.to_string(), String::new()),
            StopAt::Steps(n) => (String::new(), n.to_string()),
        };
        vec![
            ("problem", self.problem.name().to_string()),
            ("order", self.order.as_int().to_string()),
            ("integrator", self.integrator.name().to_string()),
            ("riemann", self.solver.name().to_string()),
            ("strategy", self.strategy.name().to_string()),
            ("nx", self.n[0].to_string()),
            ("ny", self.n[1].to_string()),
            ("nz", self.n[2].to_string()),
            ("split", format!("{}x{}x{}", self.split[0], self.split[1], self.split[2])),
            ("cfl", self.cfl().to_string()),
            ("tfinal", tfinal),
            ("steps", steps),
            ("seed", self.seed.to_string()),
            ("workers", self.workers.to_string()),
        ]
    }
}
