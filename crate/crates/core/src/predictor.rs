//! ADER predictor: fills the temporal mode of every zone from its own
//! spatial modes, plus the Runge-Kutta alternative used for comparison.

use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{HydroError, Location, Result, UnphysicalState};
use crate::euler::{physical_flux, ConsVars, GasModel};
use crate::mesh::{
    mode, Axis, ModalState, Order, SkinnyState, TimeState, MAX_MODES, NVAR, QUADRATIC_AT_FACE,
};

/// Worker-private copy of one zone's `[variable][mode]` block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneModal {
    pub order: Order,
    pub values: [[f64; MAX_MODES]; NVAR],
}

impl ZoneModal {
    pub fn zeroed(order: Order) -> Self {
        Self {
            order,
            values: [[0.0; MAX_MODES]; NVAR],
        }
    }

    /// Copies a zone block laid out as in [`ModalState`].
    pub fn gather(order: Order, zone: &[f64]) -> Self {
        let modes = order.modes();
        let mut out = Self::zeroed(order);
        for (v, row) in out.values.iter_mut().enumerate() {
            row[..modes].copy_from_slice(&zone[v * modes..(v + 1) * modes]);
        }
        out
    }

    /// Writes the temporal mode back; every other mode is left alone.
    pub fn scatter_temporal(&self, zone: &mut [f64]) {
        let modes = self.order.modes();
        let t = self.order.temporal_mode();
        for v in 0..NVAR {
            zone[v * modes + t] = self.values[v][t];
        }
    }

    pub fn temporal(&self) -> [f64; NVAR] {
        let t = self.order.temporal_mode();
        self.values.map(|row| row[t])
    }

    /// Reconstructed state at the centre of the low (`side = -1`) or high
    /// (`side = +1`) face along `axis`. Transverse modes vanish at face
    /// centres; cross modes too.
    #[inline]
    pub fn face_state(&self, axis: Axis, side: f64) -> [f64; NVAR] {
        let lin = axis.linear_mode();
        std::array::from_fn(|v| {
            let row = &self.values[v];
            let mut u = row[mode::AVG] + 0.5 * side * row[lin];
            if self.order == Order::Third {
                u += QUADRATIC_AT_FACE * row[axis.quadratic_mode()];
            }
            u
        })
    }
}

/// `-dt * sum_a (F_a(U_high) - F_a(U_low)) / d_a`, with every face state
/// shifted by `shift`.
#[inline]
fn flux_divergence(
    zone: &ZoneModal,
    shift: &[f64; NVAR],
    dt: f64,
    spacing: [f64; 3],
    gas: GasModel,
) -> Result<[f64; NVAR], UnphysicalState> {
    let mut t = [0.0; NVAR];
    for axis in Axis::ALL {
        let hi = zone.face_state(axis, 1.0);
        let lo = zone.face_state(axis, -1.0);
        let fh = physical_flux(&ConsVars(std::array::from_fn(|v| hi[v] + shift[v])), axis, gas)?;
        let fl = physical_flux(&ConsVars(std::array::from_fn(|v| lo[v] + shift[v])), axis, gas)?;
        let d = spacing[axis.index()];
        for v in 0..NVAR {
            t[v] -= dt * (fh[v] - fl[v]) / d;
        }
    }
    Ok(t)
}

/// Fills the temporal mode of one zone with its full-step change.
///
/// At third order the fluxes are evaluated a second time with every face
/// state advanced by half the first estimate (one Picard pass), which makes
/// the change second-order accurate in time.
pub fn predictor_ptwise(
    zone: &mut ZoneModal,
    dt: f64,
    spacing: [f64; 3],
    gas: GasModel,
) -> Result<(), UnphysicalState> {
    let mut t = flux_divergence(zone, &[0.0; NVAR], dt, spacing, gas)?;
    if zone.order == Order::Third {
        let half = t.map(|x| 0.5 * x);
        t = flux_divergence(zone, &half, dt, spacing, gas)?;
    }
    let tm = zone.order.temporal_mode();
    for v in 0..NVAR {
        zone.values[v][tm] = t[v];
    }
    Ok(())
}

/// Runs [`predictor_ptwise`] on the active zones plus one ring. Spatial
/// modes must already be reconstructed on that range.
pub fn predict_patch(modal: &mut ModalState, time: &TimeState, gas: GasModel) -> Result<()> {
    let geom = modal.geom;
    let order = modal.order;
    let zone_len = modal.zone_len();
    let [px, py, _] = geom.padded();
    let g = geom.ghost as isize;
    let ring = Axis::ALL.map(|a| geom.ring_range(a));
    let spacing = [geom.dx, geom.dy, geom.dz];
    let dt = time.dt;

    modal
        .values
        .par_chunks_mut(px * py * zone_len)
        .enumerate()
        .try_for_each(|(kk, slab)| {
            let k = kk as isize - g;
            if !ring[2].contains(&k) {
                return Ok(());
            }
            for j in ring[1].clone() {
                for i in ring[0].clone() {
                    let local = ((j + g) as usize * px + (i + g) as usize) * zone_len;
                    let block = &mut slab[local..local + zone_len];
                    let mut zone = ZoneModal::gather(order, block);
                    predictor_ptwise(&mut zone, dt, spacing, gas).map_err(|e| {
                        e.at(Location::Zone {
                            patch: 0,
                            index: [i, j, k],
                            step: None,
                        })
                    })?;
                    zone.scatter_temporal(block);
                }
            }
            Ok::<(), HydroError>(())
        })
}

/// Time integrator driving the corrector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegratorChoice {
    /// One predictor plus one corrector pass per step.
    Ader,
    /// Heun's method.
    Rk2,
    /// Three-stage strong-stability-preserving Runge-Kutta (Shu-Osher form).
    Rk3,
}

/// Stage `s` produces `base * U^n + stage * (U_s + dt L(U_s))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageWeights {
    pub base: f64,
    pub stage: f64,
}

const HEUN: [StageWeights; 2] = [
    StageWeights { base: 0.0, stage: 1.0 },
    StageWeights { base: 0.5, stage: 0.5 },
];

const SSP_RK3: [StageWeights; 3] = [
    StageWeights { base: 0.0, stage: 1.0 },
    StageWeights { base: 0.75, stage: 0.25 },
    StageWeights { base: 1.0 / 3.0, stage: 2.0 / 3.0 },
];

impl IntegratorChoice {
    pub fn name(self) -> &'static str {
        match self {
            IntegratorChoice::Ader => "ader",
            IntegratorChoice::Rk2 => "rk2",
            IntegratorChoice::Rk3 => "rk3",
        }
    }

    /// Corrector passes per step.
    pub fn stages(self) -> usize {
        self.stage_weights().len()
    }

    pub fn stage_weights(self) -> &'static [StageWeights] {
        match self {
            IntegratorChoice::Ader => &HEUN[..1],
            IntegratorChoice::Rk2 => &HEUN,
            IntegratorChoice::Rk3 => &SSP_RK3,
        }
    }
}

impl FromStr for IntegratorChoice {
    type Err = HydroError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ader" => Ok(IntegratorChoice::Ader),
            "rk2" => Ok(IntegratorChoice::Rk2),
            "rk3" => Ok(IntegratorChoice::Rk3),
            other => Err(HydroError::config(format!("unknown integrator '{other}'"))),
        }
    }
}

/// Overwrites the active zones of `stage` with the stage combination
/// `w.base * base + w.stage * stage`.
pub fn rk_combine(stage: &mut SkinnyState, base: &SkinnyState, w: StageWeights) -> Result<()> {
    if !stage.geom.same_layout(&base.geom) {
        return Err(HydroError::Shape {
            what: "rk_combine",
            expected: stage.geom.dims().to_vec(),
            found: base.geom.dims().to_vec(),
        });
    }
    let g = stage.geom;
    for k in g.active_range(Axis::Z) {
        for j in g.active_range(Axis::Y) {
            for i in g.active_range(Axis::X) {
                let o = g.offset(i, j, k);
                let b = base.values[o];
                let s = &mut stage.values[o];
                for v in 0..NVAR {
                    s[v] = w.base * b[v] + w.stage * s[v];
                }
            }
        }
    }
    Ok(())
}
