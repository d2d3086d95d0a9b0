//! Initial conditions and exact solutions.

use std::f64::consts::PI;

use crate::euler::{prim_to_cons, GasModel, PrimVars};
use crate::mesh::{Order, PatchGeometry, SkinnyState, NVAR};
use crate::transfer::Boundary;

/// Half-width of the periodic vortex box `[-5, 5]^3`.
pub const VORTEX_HALF_WIDTH: f64 = 5.0;
pub const VORTEX_STRENGTH: f64 = 5.0;
/// Free stream `(rho, u, v, w, p)`.
pub const VORTEX_FREE_STREAM: [f64; 5] = [1.0, 1.0, 1.0, 0.0, 1.0];
/// Time for the free stream to carry the vortex once across the box.
pub const VORTEX_CROSSING_TIME: f64 = 2.0 * VORTEX_HALF_WIDTH;

/// Primitive state of the isentropic vortex at offset `(dx, dy)` from its
/// centre.
pub fn vortex_prim(dx: f64, dy: f64, gas: GasModel) -> PrimVars {
    let g = gas.gamma;
    let eps = VORTEX_STRENGTH;
    let r2 = dx * dx + dy * dy;
    let du = eps / (2.0 * PI) * ((1.0 - r2) / 2.0).exp();
    let dtemp = -(g - 1.0) * eps * eps / (8.0 * g * PI * PI) * (1.0 - r2).exp();
    let [rho0, u0, v0, w0, p0] = VORTEX_FREE_STREAM;
    // uniform entropy p / rho^gamma with free-stream temperature p0 / rho0 = 1
    let temp = p0 / rho0 + dtemp;
    let rho = temp.powf(1.0 / (g - 1.0));
    PrimVars {
        rho,
        u: u0 - dy * du,
        v: v0 + dx * du,
        w: w0,
        p: rho * temp,
    }
}

/// Wraps `x` into `[-h, h)`.
fn wrap(x: f64, h: f64) -> f64 {
    (x + h).rem_euclid(2.0 * h) - h
}

/// Sample offsets (in zone widths) and weights: the midpoint at second
/// order, the 2-point Gauss rule per axis at third order.
fn quadrature(order: Order) -> (&'static [f64], f64) {
    const MID: [f64; 1] = [0.0];
    const GAUSS: [f64; 2] = [-0.288_675_134_594_812_9, 0.288_675_134_594_812_9];
    match order {
        Order::Second => (&MID, 1.0),
        Order::Third => (&GAUSS, 0.125),
    }
}

fn zone_average(
    geom: &PatchGeometry,
    order: Order,
    i: isize,
    j: isize,
    k: isize,
    f: &impl Fn([f64; 3]) -> [f64; NVAR],
) -> [f64; NVAR] {
    let (pts, w) = quadrature(order);
    let c = geom.zone_center(i, j, k);
    let h = [geom.dx, geom.dy, geom.dz];
    let mut sum = [0.0; NVAR];
    for &a in pts {
        for &b in pts {
            for &d in pts {
                let u = f([c[0] + a * h[0], c[1] + b * h[1], c[2] + d * h[2]]);
                for v in 0..NVAR {
                    sum[v] += w * u[v];
                }
            }
        }
    }
    sum
}

pub fn vortex_geometry(n: [usize; 3], order: Order) -> crate::Result<PatchGeometry> {
    let h = VORTEX_HALF_WIDTH;
    PatchGeometry::spanning(n, [-h; 3], [h; 3], order)
}

/// Largest velocity perturbation on the box boundary.
pub fn vortex_boundary_tail() -> f64 {
    let r = VORTEX_HALF_WIDTH;
    VORTEX_STRENGTH / (2.0 * PI) * ((1.0 - r * r) / 2.0).exp() * r
}

/// Zone averages of the vortex advected for time `t` (`t = 0` is the
/// initial condition), on active zones only.
pub fn exact_vortex(geom: &PatchGeometry, order: Order, gas: GasModel, t: f64) -> SkinnyState {
    let h = VORTEX_HALF_WIDTH;
    let [_, u0, v0, _, _] = VORTEX_FREE_STREAM;
    let f = |x: [f64; 3]| {
        let dx = wrap(x[0] - u0 * t, h);
        let dy = wrap(x[1] - v0 * t, h);
        prim_to_cons(&vortex_prim(dx, dy, gas), gas).0
    };
    let mut s = SkinnyState::new(*geom);
    for k in geom.active_range(crate::mesh::Axis::Z) {
        for j in geom.active_range(crate::mesh::Axis::Y) {
            for i in geom.active_range(crate::mesh::Axis::X) {
                s.set(i, j, k, zone_average(geom, order, i, j, k, &f));
            }
        }
    }
    s
}

pub fn init_isentropic_vortex(geom: &PatchGeometry, order: Order, gas: GasModel) -> SkinnyState {
    let tail = vortex_boundary_tail();
    if tail > 1e-10 {
        log::warn!("vortex perturbation reaches {tail:.1e} on the box boundary");
    }
    exact_vortex(geom, order, gas, 0.0)
}

pub fn sod_geometry(n: [usize; 3], order: Order) -> crate::Result<PatchGeometry> {
    let dx = 1.0 / n[0] as f64;
    PatchGeometry::new(n, [dx; 3], [0.0; 3], order)
}

/// Shock tube along x with the diaphragm at `x = 1/2`.
pub fn init_sod(geom: &PatchGeometry, gas: GasModel) -> SkinnyState {
    let left = prim_to_cons(&PrimVars { rho: 1.0, u: 0.0, v: 0.0, w: 0.0, p: 1.0 }, gas).0;
    let right = prim_to_cons(&PrimVars { rho: 0.125, u: 0.0, v: 0.0, w: 0.0, p: 0.1 }, gas).0;
    let mut s = SkinnyState::new(*geom);
    for ([i, j, k], _) in SkinnyState::new(*geom).active() {
        let x = geom.zone_center(i, j, k)[0];
        s.set(i, j, k, if x < 0.5 { left } else { right });
    }
    s
}

pub fn constant_state(gas: GasModel) -> [f64; NVAR] {
    prim_to_cons(&PrimVars { rho: 1.0, u: 0.3, v: -0.2, w: 0.1, p: 1.0 }, gas).0
}

pub fn unit_geometry(n: [usize; 3], order: Order) -> crate::Result<PatchGeometry> {
    PatchGeometry::spanning(n, [0.0; 3], [1.0; 3], order)
}

pub fn init_constant(geom: &PatchGeometry, gas: GasModel) -> SkinnyState {
    let u = constant_state(gas);
    let mut s = SkinnyState::new(*geom);
    for ([i, j, k], _) in SkinnyState::new(*geom).active() {
        s.set(i, j, k, u);
    }
    s
}

/// Global geometry, initial state and boundary conditions of a problem.
pub fn setup(
    problem: super::Problem,
    n: [usize; 3],
    order: Order,
    gas: GasModel,
) -> crate::Result<(SkinnyState, [Boundary; 3])> {
    use super::Problem;
    Ok(match problem {
        Problem::Vortex => {
            let g = vortex_geometry(n, order)?;
            (init_isentropic_vortex(&g, order, gas), [Boundary::Periodic; 3])
        }
        Problem::Sod => {
            let g = sod_geometry(n, order)?;
            (init_sod(&g, gas), [Boundary::Outflow; 3])
        }
        Problem::Constant => {
            let g = unit_geometry(n, order)?;
            (init_constant(&g, gas), [Boundary::Periodic; 3])
        }
    })
}

/// Exact solution at time `t`, where one is known.
pub fn exact_solution(
    problem: super::Problem,
    geom: &PatchGeometry,
    order: Order,
    gas: GasModel,
    t: f64,
) -> Option<SkinnyState> {
    use super::Problem;
    match problem {
        Problem::Vortex => Some(exact_vortex(geom, order, gas, t)),
        Problem::Constant => Some(init_constant(geom, gas)),
        Problem::Sod => None,
    }
}
