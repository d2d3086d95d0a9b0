//! Patches, ghost exchange and the step loop, with a ledger of the values a
//! host/device offload would move each step.
//!
//! The "device" is the patch worker: each step uploads the patch's zone
//! averages (or its full modal state), runs the whole update on it and
//! downloads the new averages. Nothing is actually copied across a bus; the
//! ledger records what would be.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::corrector::{eval_tstep_patch, make_du_dt, make_flux_axis, update_u_stage, DT_SEED};
use crate::error::{HydroError, Result};
use crate::euler::GasModel;
use crate::mesh::{
    skinny_to_modal, Axis, FaceFluxField, ModalState, Order, PatchGeometry, RateField,
    SkinnyState, TimeState, NVAR,
};
use crate::predictor::{predict_patch, IntegratorChoice};
use crate::reconstruction::{reconstruct_with, LimiterConfig, ReconScratch};
use crate::riemann::{FaceDiagnostics, RiemannSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransferStrategy {
    /// Every mode of every zone crosses the boundary.
    FullState,
    /// Zone averages only; modes are rebuilt on the device.
    Skinny,
}

impl TransferStrategy {
    pub fn name(self) -> &'static str {
        match self {
            TransferStrategy::FullState => "full",
            TransferStrategy::Skinny => "skinny",
        }
    }
}

impl FromStr for TransferStrategy {
    type Err = HydroError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "skinny" => Ok(TransferStrategy::Skinny),
            "full" | "full_state" => Ok(TransferStrategy::FullState),
            other => Err(HydroError::config(format!("unknown transfer strategy '{other}'"))),
        }
    }
}

impl fmt::Display for TransferStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Values moved each way in one step for one patch, ghost zones included.
pub fn step_transfer_accounting(
    strategy: TransferStrategy,
    geom: &PatchGeometry,
    order: Order,
) -> (u64, u64) {
    let per_zone = match strategy {
        TransferStrategy::Skinny => NVAR,
        TransferStrategy::FullState => NVAR * order.modes(),
    } as u64;
    let n = geom.zone_count(true) as u64 * per_zone;
    (n, n)
}

/// The same count restricted to active zones.
pub fn step_transfer_accounting_active(
    strategy: TransferStrategy,
    geom: &PatchGeometry,
    order: Order,
) -> u64 {
    let per_zone = match strategy {
        TransferStrategy::Skinny => NVAR,
        TransferStrategy::FullState => NVAR * order.modes(),
    } as u64;
    geom.zone_count(false) as u64 * per_zone
}

/// One ledger row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerRow {
    pub step: u64,
    pub strategy: TransferStrategy,
    pub uploads: u64,
    pub downloads: u64,
    /// `dt` goes up with every patch upload.
    pub scalar_uploads: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferLedger {
    pub strategy: TransferStrategy,
    pub steps: u64,
    pub uploads: u64,
    pub downloads: u64,
    pub scalar_uploads: u64,
    /// `dt_next` comes back with every patch download.
    pub scalar_downloads: u64,
    /// Uploads had ghost zones been left out.
    pub active_uploads: u64,
    pub rows: Vec<LedgerRow>,
}

impl TransferLedger {
    pub fn new(strategy: TransferStrategy) -> Self {
        Self {
            strategy,
            steps: 0,
            uploads: 0,
            downloads: 0,
            scalar_uploads: 0,
            scalar_downloads: 0,
            active_uploads: 0,
            rows: Vec::new(),
        }
    }

    /// Accounts one step of every patch in `set`.
    pub fn record_step(&mut self, set: &PatchSet) {
        let mut row = LedgerRow {
            step: self.steps + 1,
            strategy: self.strategy,
            uploads: 0,
            downloads: 0,
            scalar_uploads: 0,
        };
        for p in &set.patches {
            let (up, down) = step_transfer_accounting(self.strategy, &p.geom, set.order);
            row.uploads += up;
            row.downloads += down;
            row.scalar_uploads += 1;
            self.scalar_downloads += 1;
            self.active_uploads += step_transfer_accounting_active(self.strategy, &p.geom, set.order);
        }
        self.steps += 1;
        self.uploads += row.uploads;
        self.downloads += row.downloads;
        self.scalar_uploads += row.scalar_uploads;
        self.rows.push(row);
    }

    /// Writes one row per step: `step,strategy,uploads,downloads,scalar_uploads`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "strategy", "uploads", "downloads", "scalar_uploads"])?;
        for r in &self.rows {
            w.write_record([
                r.step.to_string(),
                r.strategy.name().to_string(),
                r.uploads.to_string(),
                r.downloads.to_string(),
                r.scalar_uploads.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Boundary condition on the two outer faces of the domain along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    /// Zero-gradient: ghosts copy the nearest active zone.
    Outflow,
}

impl FromStr for Boundary {
    type Err = HydroError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" => Ok(Boundary::Periodic),
            "outflow" => Ok(Boundary::Outflow),
            other => Err(HydroError::config(format!("unknown boundary kind '{other}'"))),
        }
    }
}

/// What lies beyond one face of a patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceLink {
    Neighbor(usize),
    Outflow,
}

/// Per patch, per axis, the `[low, high]` links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub links: Vec<[[FaceLink; 2]; 3]>,
}

impl Topology {
    /// Regular `split[0] x split[1] x split[2]` grid of patches numbered
    /// x-fastest.
    pub fn grid(split: [usize; 3], boundary: [Boundary; 3]) -> Self {
        let id = |p: [usize; 3]| (p[2] * split[1] + p[1]) * split[0] + p[0];
        let mut links = Vec::with_capacity(split.iter().product());
        for pz in 0..split[2] {
            for py in 0..split[1] {
                for px in 0..split[0] {
                    let here = [px, py, pz];
                    links.push(std::array::from_fn(|a| {
                        let n = split[a];
                        let mut out = [FaceLink::Outflow; 2];
                        for (side, step) in [(0usize, n - 1), (1, 1)] {
                            let at_edge = if side == 0 { here[a] == 0 } else { here[a] == n - 1 };
                            if at_edge && boundary[a] == Boundary::Outflow {
                                continue;
                            }
                            let mut there = here;
                            there[a] = (here[a] + step) % n;
                            out[side] = FaceLink::Neighbor(id(there));
                        }
                        out
                    }));
                }
            }
        }
        Self { links }
    }

    /// Every neighbour link must be returned by the neighbour.
    pub fn validate(&self) -> Result<()> {
        for (p, axes) in self.links.iter().enumerate() {
            for (a, sides) in axes.iter().enumerate() {
                for (side, link) in sides.iter().enumerate() {
                    if let FaceLink::Neighbor(n) = *link {
                        let back = self.links.get(n).map(|l| l[a][1 - side]);
                        if back != Some(FaceLink::Neighbor(p)) {
                            return Err(HydroError::config(format!(
                                "topology is not involutive: patch {p} axis {a} side {side} -> {n}, back link {back:?}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Wall-clock time spent in each stage of the update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageProfile {
    pub reconstruct: Duration,
    pub predict: Duration,
    pub flux: Duration,
    pub rate: Duration,
    pub update: Duration,
    pub transfer: Duration,
}

impl StageProfile {
    pub fn total(&self) -> Duration {
        self.reconstruct + self.predict + self.flux + self.rate + self.update + self.transfer
    }

    /// Share of the profiled time spent in the predictor.
    pub fn predictor_fraction(&self) -> f64 {
        let total = self.total().as_secs_f64();
        if total > 0.0 {
            self.predict.as_secs_f64() / total
        } else {
            0.0
        }
    }

    pub fn seconds(&self) -> [(&'static str, f64); 6] {
        [
            ("reconstruct", self.reconstruct.as_secs_f64()),
            ("predict", self.predict.as_secs_f64()),
            ("flux", self.flux.as_secs_f64()),
            ("rate", self.rate.as_secs_f64()),
            ("update", self.update.as_secs_f64()),
            ("transfer", self.transfer.as_secs_f64()),
        ]
    }
}

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot += start.elapsed();
    out
}

/// Everything that fixes the numerical scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub order: Order,
    pub integrator: IntegratorChoice,
    pub solver: RiemannSolver,
    pub strategy: TransferStrategy,
    pub gas: GasModel,
    pub limiter: LimiterConfig,
}

impl SchemeConfig {
    pub fn new(order: Order) -> Self {
        Self {
            order,
            integrator: IntegratorChoice::Ader,
            solver: RiemannSolver::Hll,
            strategy: TransferStrategy::Skinny,
            gas: GasModel::default(),
            limiter: LimiterConfig::default(),
        }
    }
}

/// One patch with its device-side working storage.
#[derive(Debug, Clone)]
pub struct Patch {
    pub id: usize,
    pub geom: PatchGeometry,
    /// Global index of the first active zone.
    pub offset: [usize; 3],
    pub skinny: SkinnyState,
    pub modal: ModalState,
    fluxes: FaceFluxField,
    rate: RateField,
    /// Averages at the start of a multi-stage step.
    base: Option<SkinnyState>,
    scratch: ReconScratch,
}

#[derive(Debug, Clone)]
pub struct PatchSet {
    pub patches: Vec<Patch>,
    pub topology: Topology,
    pub order: Order,
    pub ghost_width: usize,
    /// Geometry of the undivided domain.
    pub global: PatchGeometry,
}

impl PatchSet {
    /// Splits the active zones of `global` into `split` equal patches.
    pub fn decompose(
        global: &SkinnyState,
        order: Order,
        split: [usize; 3],
        boundary: [Boundary; 3],
    ) -> Result<Self> {
        let g = global.geom;
        if g.ghost != order.ghost_width() {
            return Err(HydroError::config(format!(
                "global state has {} ghost zones, order {} needs {}",
                g.ghost,
                order.as_int(),
                order.ghost_width()
            )));
        }
        let dims = g.dims();
        for a in 0..3 {
            if split[a] == 0 || dims[a] % split[a] != 0 {
                return Err(HydroError::config(format!(
                    "patch split {split:?} does not divide mesh {dims:?}"
                )));
            }
        }
        let local = [0, 1, 2].map(|a| dims[a] / split[a]);
        let spacing = [g.dx, g.dy, g.dz];
        let topology = Topology::grid(split, boundary);
        topology.validate()?;
        let mut patches = Vec::new();
        for pz in 0..split[2] {
            for py in 0..split[1] {
                for px in 0..split[0] {
                    let offset = [px * local[0], py * local[1], pz * local[2]];
                    let origin = [0, 1, 2].map(|a| g.origin[a] + offset[a] as f64 * spacing[a]);
                    let geom = PatchGeometry::new(local, spacing, origin, order)?;
                    let mut skinny = SkinnyState::new(geom);
                    for k in geom.active_range(Axis::Z) {
                        for j in geom.active_range(Axis::Y) {
                            for i in geom.active_range(Axis::X) {
                                let v = global.get(
                                    i + offset[0] as isize,
                                    j + offset[1] as isize,
                                    k + offset[2] as isize,
                                );
                                skinny.set(i, j, k, v);
                            }
                        }
                    }
                    patches.push(Patch {
                        id: patches.len(),
                        geom,
                        offset,
                        skinny,
                        modal: ModalState::new(geom, order),
                        fluxes: FaceFluxField::new(geom),
                        rate: RateField::new(geom),
                        base: None,
                        scratch: ReconScratch::default(),
                    });
                }
            }
        }
        let mut set = Self {
            patches,
            topology,
            order,
            ghost_width: order.ghost_width(),
            global: g,
        };
        set.exchange_ghosts()?;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    /// Reassembles the active zones into one state on the global geometry,
    /// with its ghost zones zeroed.
    pub fn gather(&self) -> SkinnyState {
        let mut out = SkinnyState::new(self.global);
        for p in &self.patches {
            for ([i, j, k], v) in p.skinny.active() {
                out.set(
                    i + p.offset[0] as isize,
                    j + p.offset[1] as isize,
                    k + p.offset[2] as isize,
                    v,
                );
            }
        }
        out
    }

    /// Fills every ghost zone from the neighbours' active zones (or by
    /// zero-gradient copy on outflow faces), sweeping x, then y, then z so
    /// that edges and corners pick up data filled by earlier sweeps.
    pub fn exchange_ghosts(&mut self) -> Result<()> {
        for axis in Axis::ALL {
            let a = axis.index();
            // pack from immutable patches, then unpack
            let mut buffers: Vec<[Vec<[f64; NVAR]>; 2]> = Vec::with_capacity(self.patches.len());
            for p in &self.patches {
                let mut pair: [Vec<[f64; NVAR]>; 2] = [Vec::new(), Vec::new()];
                for (side, buf) in pair.iter_mut().enumerate() {
                    let link = self.topology.links[p.id][a][side];
                    let src = match link {
                        FaceLink::Neighbor(n) => {
                            let src = &self.patches[n];
                            for b in 0..3 {
                                if b != a && src.geom.dims()[b] != p.geom.dims()[b] {
                                    return Err(HydroError::config(format!(
                                        "patches {} and {n} disagree on their shared face",
                                        p.id
                                    )));
                                }
                            }
                            src
                        }
                        FaceLink::Outflow => p,
                    };
                    let n_dst = p.geom.n(axis) as isize;
                    let n_src = src.geom.n(axis) as isize;
                    for_each_ghost(&p.geom, axis, side, |mut idx| {
                        let d = idx[a];
                        idx[a] = match (link, side) {
                            (FaceLink::Neighbor(_), 0) => n_src + d,
                            (FaceLink::Neighbor(_), _) => d - n_dst,
                            (FaceLink::Outflow, 0) => 0,
                            (FaceLink::Outflow, _) => n_dst - 1,
                        };
                        buf.push(src.skinny.get(idx[0], idx[1], idx[2]));
                    });
                }
                buffers.push(pair);
            }
            for (p, pair) in self.patches.iter_mut().zip(buffers) {
                for (side, buf) in pair.into_iter().enumerate() {
                    let mut it = buf.into_iter();
                    let geom = p.geom;
                    for_each_ghost(&geom, axis, side, |idx| {
                        let v = it.next().expect("ghost buffer length");
                        p.skinny.set(idx[0], idx[1], idx[2], v);
                    });
                }
            }
        }
        Ok(())
    }

    /// Largest admissible timestep over all patches.
    pub fn eval_tstep(&self, cfl: f64, gas: GasModel) -> Result<f64> {
        let mut dt = DT_SEED;
        for p in &self.patches {
            dt = dt.min(eval_tstep_patch(&p.skinny, cfl, gas).map_err(|e| e.in_patch(p.id))?);
        }
        Ok(dt)
    }
}

/// Visits the ghost zones of one side (`0` low, `1` high) of `axis` in a
/// fixed order. Axes swept before `axis` span their ghosts too.
fn for_each_ghost(geom: &PatchGeometry, axis: Axis, side: usize, mut f: impl FnMut([isize; 3])) {
    let a = axis.index();
    let g = geom.ghost as isize;
    let ranges: [std::ops::Range<isize>; 3] = std::array::from_fn(|b| {
        let n = geom.dims()[b] as isize;
        if b == a {
            if side == 0 {
                -g..0
            } else {
                n..n + g
            }
        } else if b < a {
            -g..n + g
        } else {
            0..n
        }
    });
    for k in ranges[2].clone() {
        for j in ranges[1].clone() {
            for i in ranges[0].clone() {
                f([i, j, k]);
            }
        }
    }
}

/// Result of one step over a patch set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub dt_next: f64,
    pub faces: FaceDiagnostics,
}

/// Advances every patch by `time.dt`.
///
/// Each stage exchanges ghosts and then, per patch: copies the averages into
/// the modal state, reconstructs, predicts (ADER) or freezes the temporal
/// mode (Runge-Kutta), builds face fluxes and their difference, and updates.
/// The ledger is charged once per step.
pub fn run_patch_step(
    set: &mut PatchSet,
    scheme: &SchemeConfig,
    time: &TimeState,
    ledger: &mut TransferLedger,
    profile: &mut StageProfile,
) -> Result<StepOutcome> {
    if scheme.order != set.order {
        return Err(HydroError::config("scheme order differs from patch set order"));
    }
    ledger.record_step(set);
    let multi_stage = scheme.integrator != IntegratorChoice::Ader;
    let mut faces = FaceDiagnostics::default();
    let mut dt_next = DT_SEED;

    for (stage, &weights) in scheme.integrator.stage_weights().iter().enumerate() {
        timed(&mut profile.transfer, || set.exchange_ghosts())?;
        dt_next = DT_SEED;
        for p in &mut set.patches {
            let id = p.id;
            let tag = |e: HydroError| e.in_patch(id);
            timed(&mut profile.transfer, || {
                if multi_stage && stage == 0 {
                    p.base = Some(p.skinny.clone());
                }
                skinny_to_modal(&p.skinny, &mut p.modal)
            })?;
            timed(&mut profile.reconstruct, || {
                reconstruct_with(&mut p.modal, &scheme.limiter, &mut p.scratch)
            });
            if multi_stage {
                timed(&mut profile.reconstruct, || p.modal.clear_temporal_mode());
            } else {
                timed(&mut profile.predict, || predict_patch(&mut p.modal, time, scheme.gas))
                    .map_err(tag)?;
            }
            timed(&mut profile.flux, || -> Result<()> {
                for axis in Axis::ALL {
                    faces = faces.merge(make_flux_axis(
                        &p.modal,
                        axis,
                        &mut p.fluxes,
                        scheme.gas,
                        scheme.solver,
                    )?);
                }
                Ok(())
            })
            .map_err(tag)?;
            timed(&mut profile.rate, || make_du_dt(&p.fluxes, time, &mut p.rate))?;
            let combine = if multi_stage {
                p.base.as_ref().map(|b| (b, weights))
            } else {
                None
            };
            let dt = timed(&mut profile.update, || {
                update_u_stage(&mut p.modal, &mut p.skinny, &p.rate, combine, time, scheme.gas)
            })
            .map_err(tag)?;
            dt_next = dt_next.min(dt);
        }
    }
    Ok(StepOutcome { dt_next, faces })
}
