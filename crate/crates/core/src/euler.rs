//! Ideal-gas compressible Euler equations: closures, fluxes and the
//! per-zone timestep estimate.

use crate::error::UnphysicalState;
use crate::mesh::{Axis, ENERGY, MX, MY, MZ, NVAR, RHO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
}

impl GasModel {
    pub fn new(gamma: f64) -> crate::Result<Self> {
        if gamma > 1.0 && gamma.is_finite() {
            Ok(Self { gamma })
        } else {
            Err(crate::HydroError::config(format!(
                "adiabatic index must exceed 1, got {gamma}"
            )))
        }
    }
}

impl Default for GasModel {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

/// Conserved variables `(rho, mx, my, mz, E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsVars(pub [f64; NVAR]);

impl ConsVars {
    pub fn rho(&self) -> f64 {
        self.0[RHO]
    }
    pub fn momentum(&self) -> [f64; 3] {
        [self.0[MX], self.0[MY], self.0[MZ]]
    }
    pub fn energy(&self) -> f64 {
        self.0[ENERGY]
    }
}

impl From<[f64; NVAR]> for ConsVars {
    fn from(u: [f64; NVAR]) -> Self {
        ConsVars(u)
    }
}

/// Primitive variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimVars {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub p: f64,
}

impl PrimVars {
    pub fn velocity(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.u,
            Axis::Y => self.v,
            Axis::Z => self.w,
        }
    }

    pub fn sound_speed(&self, gas: GasModel) -> f64 {
        (gas.gamma * self.p / self.rho).sqrt()
    }
}

#[inline]
pub fn cons_to_prim(c: &ConsVars, gas: GasModel) -> Result<PrimVars, UnphysicalState> {
    let [rho, mx, my, mz, e] = c.0;
    if !(rho > 0.0) {
        return Err(UnphysicalState {
            rho,
            pressure: f64::NAN,
        });
    }
    let u = mx / rho;
    let v = my / rho;
    let w = mz / rho;
    let p = (gas.gamma - 1.0) * (e - 0.5 * rho * (u * u + v * v + w * w));
    // also rejects NaN
    if !(p > 0.0 && p.is_finite()) {
        return Err(UnphysicalState { rho, pressure: p });
    }
    Ok(PrimVars { rho, u, v, w, p })
}

#[inline]
pub fn prim_to_cons(p: &PrimVars, gas: GasModel) -> ConsVars {
    let kinetic = 0.5 * p.rho * (p.u * p.u + p.v * p.v + p.w * p.w);
    ConsVars([
        p.rho,
        p.rho * p.u,
        p.rho * p.v,
        p.rho * p.w,
        p.p / (gas.gamma - 1.0) + kinetic,
    ])
}

/// Euler flux through a face normal to `axis`, from already-decoded primitives.
#[inline]
pub fn flux_from_prim(c: &ConsVars, w: &PrimVars, axis: Axis) -> [f64; NVAR] {
    let vn = w.velocity(axis);
    let mut f = [
        c.0[RHO] * vn,
        c.0[MX] * vn,
        c.0[MY] * vn,
        c.0[MZ] * vn,
        vn * (c.0[ENERGY] + w.p),
    ];
    f[axis.momentum()] += w.p;
    f
}

#[inline]
pub fn physical_flux(c: &ConsVars, axis: Axis, gas: GasModel) -> Result<[f64; NVAR], UnphysicalState> {
    let w = cons_to_prim(c, gas)?;
    Ok(flux_from_prim(c, &w, axis))
}

/// `|u_axis| + c_sound`.
#[inline]
pub fn max_signal_speed(c: &ConsVars, axis: Axis, gas: GasModel) -> Result<f64, UnphysicalState> {
    let w = cons_to_prim(c, gas)?;
    Ok(w.velocity(axis).abs() + w.sound_speed(gas))
}

/// Largest stable timestep for one zone under the additive 3D bound
/// `cfl / (s_x/dx + s_y/dy + s_z/dz)`.
#[inline]
pub fn eval_tstep_ptwise(
    c: &ConsVars,
    cfl: f64,
    dx: f64,
    dy: f64,
    dz: f64,
    gas: GasModel,
) -> Result<f64, UnphysicalState> {
    let w = cons_to_prim(c, gas)?;
    let cs = w.sound_speed(gas);
    let rate = (w.u.abs() + cs) / dx + (w.v.abs() + cs) / dy + (w.w.abs() + cs) / dz;
    Ok(cfl / rate)
}
