//! Time loop over a patch set.

use std::time::{Duration, Instant};

use crate::error::{HydroError, Result};
use crate::mesh::{SkinnyState, TimeState, NVAR};
use crate::riemann::FaceDiagnostics;
use crate::transfer::{run_patch_step, PatchSet, SchemeConfig, StageProfile, TransferLedger};

use super::config::{RunConfig, StopAt};
use super::norms::{absolute_totals, conservation_drift, error_norms, ErrorReport};
use super::problems;

/// A configured problem being advanced in time.
pub struct Simulation {
    pub config: RunConfig,
    pub scheme: SchemeConfig,
    pub set: PatchSet,
    pub time: TimeState,
    pub ledger: TransferLedger,
    pub profile: StageProfile,
    pub faces: FaceDiagnostics,
    pub steps: u64,
    /// Wall time spent inside [`Simulation::step`].
    pub wall: Duration,
    initial_totals: [f64; NVAR],
    initial_magnitude: [f64; NVAR],
}

/// What a finished run reports.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: u64,
    pub t: f64,
    pub wall: Duration,
    /// Active zones updated per second of step wall time.
    pub zones_per_sec: f64,
    pub profile: StageProfile,
    pub ledger: TransferLedger,
    pub faces: FaceDiagnostics,
    pub error: Option<ErrorReport>,
    pub conservation: [f64; NVAR],
}

impl Simulation {
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let scheme = config.scheme();
        let (initial, boundary) =
            problems::setup(config.problem, config.n, config.order, scheme.gas)?;
        let set = PatchSet::decompose(&initial, config.order, config.split, boundary)?;
        let mut time = TimeState::new(config.cfl())?;
        time.dt_next = set.eval_tstep(time.cfl, scheme.gas)?;
        Ok(Self {
            config: config.clone(),
            scheme,
            set,
            time,
            ledger: TransferLedger::new(config.strategy),
            profile: StageProfile::default(),
            faces: FaceDiagnostics::default(),
            steps: 0,
            wall: Duration::ZERO,
            initial_totals: initial.active_totals(),
            initial_magnitude: absolute_totals(&initial),
        })
    }

    fn finished(&self) -> bool {
        match self.config.stop() {
            StopAt::Steps(n) => self.steps >= n,
            // stop within rounding of the target
            StopAt::Time(t) => self.time.t >= t * (1.0 - 1e-14),
        }
    }

    /// Advances one step, clipped to land on the final time.
    pub fn step(&mut self) -> Result<()> {
        let start = Instant::now();
        let mut dt = self.time.dt_next;
        if let StopAt::Time(t_final) = self.config.stop() {
            dt = dt.min(t_final - self.time.t);
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(HydroError::config(format!("timestep collapsed to {dt:e}")));
        }
        self.time.dt = dt;
        let out = run_patch_step(&mut self.set, &self.scheme, &self.time, &mut self.ledger, &mut self.profile)
            .map_err(|e| e.with_step(self.steps + 1))?;
        self.steps += 1;
        self.time.t += dt;
        self.time.dt_next = out.dt_next;
        self.faces = self.faces.merge(out.faces);
        self.wall += start.elapsed();
        Ok(())
    }

    pub fn run(&mut self) -> Result<RunSummary> {
        while !self.finished() {
            self.step()?;
        }
        self.summary()
    }

    /// Active-zone averages on the undivided mesh.
    pub fn state(&self) -> SkinnyState {
        self.set.gather()
    }

    pub fn exact(&self) -> Option<SkinnyState> {
        problems::exact_solution(
            self.config.problem,
            &self.set.global,
            self.config.order,
            self.scheme.gas,
            self.time.t,
        )
    }

    /// Relative change of each conserved total since the start.
    pub fn conservation_drift(&self) -> [f64; NVAR] {
        let now = self.state().active_totals();
        conservation_drift(&self.initial_totals, &now, &self.initial_magnitude)
    }

    pub fn summary(&self) -> Result<RunSummary> {
        let state = self.state();
        let error = match self.exact() {
            Some(exact) => Some(error_norms(&state, &exact)?),
            None => None,
        };
        let zones = self.set.global.zone_count(false) as f64;
        let secs = self.wall.as_secs_f64();
        Ok(RunSummary {
            steps: self.steps,
            t: self.time.t,
            wall: self.wall,
            zones_per_sec: if secs > 0.0 { zones * self.steps as f64 / secs } else { 0.0 },
            profile: self.profile,
            ledger: self.ledger.clone(),
            faces: self.faces,
            error,
            conservation: conservation_drift(
                &self.initial_totals,
                &state.active_totals(),
                &self.initial_magnitude,
            ),
        })
    }
}

/// Runs `f` on a pool of `workers` threads (0: rayon's default pool).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HydroError::config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Builds and runs a simulation on the configured number of workers,
/// returning the summary and the final state.
pub fn run_config(config: &RunConfig) -> Result<(RunSummary, SkinnyState)> {
    with_workers(config.workers, || {
        let mut sim = Simulation::new(config)?;
        let summary = sim.run()?;
        Ok((summary, sim.state()))
    })?
}
