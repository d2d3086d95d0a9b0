//! Corrector: face fluxes from the space-time reconstruction, their
//! difference, and the conservative update with the next timestep estimate.

use rayon::prelude::*;

use crate::error::{HydroError, Location, Result};
use crate::euler::{eval_tstep_ptwise, ConsVars, GasModel};
use crate::mesh::{
    Axis, FaceFluxField, ModalState, Order, RateField, SkinnyState, TimeState, NVAR,
    QUADRATIC_AT_FACE,
};
use crate::predictor::StageWeights;
use crate::riemann::{FaceDiagnostics, FaceStatePair, RiemannSolver};

/// Seed of the timestep min-reduction.
pub const DT_SEED: f64 = 1.0e32;

/// A zone's reconstruction at the centre of its high (`side = +1`) or low
/// (`side = -1`) face along `axis`, at the half step.
#[inline]
fn face_value(zone: &[f64], modes: usize, order: Order, axis: Axis, side: f64) -> ConsVars {
    let lin = axis.linear_mode();
    let t = order.temporal_mode();
    ConsVars(std::array::from_fn(|v| {
        let row = &zone[v * modes..(v + 1) * modes];
        let mut u = row[0] + 0.5 * side * row[lin] + 0.5 * row[t];
        if order == Order::Third {
            u += QUADRATIC_AT_FACE * row[axis.quadratic_mode()];
        }
        u
    }))
}

/// Fluxes on every face normal to `axis`: `n + 1` faces along the axis,
/// active zones transversally. Face `f` sits between zones `f - 1` and `f`.
pub fn make_flux_axis(
    modal: &ModalState,
    axis: Axis,
    fluxes: &mut FaceFluxField,
    gas: GasModel,
    solver: RiemannSolver,
) -> Result<FaceDiagnostics> {
    let geom = modal.geom;
    let [fx, fy, _] = fluxes.face_dims(axis);
    let modes = modal.modes();
    let order = modal.order;
    let zone_len = modal.zone_len();
    let stride = geom.stride(axis) * zone_len;
    let values = &modal.values;

    fluxes
        .axis_mut(axis)
        .par_chunks_mut(fx * fy)
        .enumerate()
        .map(|(k, slab)| {
            let mut diag = FaceDiagnostics::default();
            for j in 0..fy {
                for i in 0..fx {
                    let idx = [i as isize, j as isize, k as isize];
                    let right = geom.offset(idx[0], idx[1], idx[2]) * zone_len;
                    let left = right - stride;
                    let pair = FaceStatePair {
                        left: face_value(&values[left..left + zone_len], modes, order, axis, 1.0),
                        right: face_value(&values[right..right + zone_len], modes, order, axis, -1.0),
                        axis,
                    };
                    slab[j * fx + i] = solver.solve(&pair, gas, &mut diag).map_err(|e| {
                        e.at(Location::Face {
                            patch: 0,
                            axis,
                            index: idx,
                        })
                    })?;
                }
            }
            Ok(diag)
        })
        .try_reduce(FaceDiagnostics::default, |x, y| Ok(x.merge(y)))
}

/// Fluxes along all three axes.
pub fn make_fluxes(
    modal: &ModalState,
    fluxes: &mut FaceFluxField,
    gas: GasModel,
    solver: RiemannSolver,
) -> Result<FaceDiagnostics> {
    let mut diag = FaceDiagnostics::default();
    for axis in Axis::ALL {
        diag = diag.merge(make_flux_axis(modal, axis, fluxes, gas, solver)?);
    }
    Ok(diag)
}

/// `rate = -dt (dFx/dx + dFy/dy + dFz/dz)` on the active zones.
pub fn make_du_dt(fluxes: &FaceFluxField, time: &TimeState, rate: &mut RateField) -> Result<()> {
    let geom = fluxes.geom;
    if !geom.same_layout(&rate.geom) {
        return Err(HydroError::Shape {
            what: "make_du_dt",
            expected: geom.dims().to_vec(),
            found: rate.geom.dims().to_vec(),
        });
    }
    let [nx, ny, _] = geom.dims();
    let dt = time.dt;
    let (dx, dy, dz) = (geom.dx, geom.dy, geom.dz);
    rate.values
        .par_chunks_mut(nx * ny)
        .enumerate()
        .for_each(|(k, slab)| {
            for j in 0..ny {
                for i in 0..nx {
                    let xw = fluxes.x[fluxes.face_offset(Axis::X, i, j, k)];
                    let xe = fluxes.x[fluxes.face_offset(Axis::X, i + 1, j, k)];
                    let ys = fluxes.y[fluxes.face_offset(Axis::Y, i, j, k)];
                    let yn = fluxes.y[fluxes.face_offset(Axis::Y, i, j + 1, k)];
                    let zb = fluxes.z[fluxes.face_offset(Axis::Z, i, j, k)];
                    let zt = fluxes.z[fluxes.face_offset(Axis::Z, i, j, k + 1)];
                    let out = &mut slab[j * nx + i];
                    for v in 0..NVAR {
                        out[v] = -dt * (xe[v] - xw[v]) / dx
                            - dt * (yn[v] - ys[v]) / dy
                            - dt * (zt[v] - zb[v]) / dz;
                    }
                }
            }
        });
    Ok(())
}

/// Adds the rate to mode 0 of the active zones, refreshes their skinny
/// averages and returns the smallest admissible next timestep.
pub fn update_u_timestep(
    modal: &mut ModalState,
    skinny: &mut SkinnyState,
    rate: &RateField,
    time: &TimeState,
    gas: GasModel,
) -> Result<f64> {
    update_u_stage(modal, skinny, rate, None, time, gas)
}

/// Like [`update_u_timestep`], but when `combine` is given the new average
/// is `w.base * base + w.stage * (mode0 + rate)` (a Runge-Kutta stage).
pub fn update_u_stage(
    modal: &mut ModalState,
    skinny: &mut SkinnyState,
    rate: &RateField,
    combine: Option<(&SkinnyState, StageWeights)>,
    time: &TimeState,
    gas: GasModel,
) -> Result<f64> {
    let geom = modal.geom;
    for (what, other) in [("update skinny", &skinny.geom), ("update rate", &rate.geom)] {
        if !geom.same_layout(other) {
            return Err(HydroError::Shape {
                what,
                expected: geom.dims().to_vec(),
                found: other.dims().to_vec(),
            });
        }
    }
    let [nx, ny, _] = geom.dims();
    let [px, py, _] = geom.padded();
    let g = geom.ghost;
    let modes = modal.modes();
    let zone_len = modal.zone_len();
    let (cfl, dx, dy, dz) = (time.cfl, geom.dx, geom.dy, geom.dz);

    let dt_next = modal
        .values
        .par_chunks_mut(px * py * zone_len)
        .zip(skinny.values.par_chunks_mut(px * py))
        .enumerate()
        .skip(g)
        .take(geom.nz)
        .map(|(kk, (slab, skinny_slab))| {
            let k = kk - g;
            let mut dt_min = DT_SEED;
            for j in 0..ny {
                for i in 0..nx {
                    let local = (j + g) * px + i + g;
                    let zone = &mut slab[local * zone_len..(local + 1) * zone_len];
                    let r = rate.values[(k * ny + j) * nx + i];
                    let mut u = [0.0; NVAR];
                    for v in 0..NVAR {
                        u[v] = zone[v * modes] + r[v];
                    }
                    if let Some((base, w)) = combine {
                        let b = base.values[geom.offset(i as isize, j as isize, k as isize)];
                        for v in 0..NVAR {
                            u[v] = w.base * b[v] + w.stage * u[v];
                        }
                    }
                    for v in 0..NVAR {
                        zone[v * modes] = u[v];
                    }
                    skinny_slab[local] = u;
                    let dt = eval_tstep_ptwise(&ConsVars(u), cfl, dx, dy, dz, gas).map_err(|e| {
                        e.at(Location::Zone {
                            patch: 0,
                            index: [i as isize, j as isize, k as isize],
                            step: None,
                        })
                    })?;
                    dt_min = dt_min.min(dt);
                }
            }
            Ok(dt_min)
        })
        .try_reduce(|| DT_SEED, |a, b| Ok::<f64, HydroError>(a.min(b)))?;
    Ok(dt_next)
}

/// Smallest admissible timestep over the active zones of `skinny`.
pub fn eval_tstep_patch(skinny: &SkinnyState, cfl: f64, gas: GasModel) -> Result<f64> {
    let g = skinny.geom;
    let mut dt = DT_SEED;
    for (index, u) in skinny.active() {
        let z = eval_tstep_ptwise(&ConsVars(u), cfl, g.dx, g.dy, g.dz, gas).map_err(|e| {
            e.at(Location::Zone {
                patch: 0,
                index,
                step: None,
            })
        })?;
        dt = dt.min(z);
    }
    Ok(dt)
}
