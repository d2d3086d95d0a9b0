//! Spatial reconstruction: fills the slope (and, at third order, quadratic
//! and cross) modes of every zone from the zone averages.
//!
//! All modes are undivided, i.e. expressed per zone width, so the value at
//! the east face is `avg + slope / 2 (+ quadratic / 6)`.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{HydroError, Result};
use crate::mesh::{mode, Axis, ModalState, Order, PatchGeometry, NVAR, RHO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterConfig {
    pub compression_factor_density: f64,
    pub compression_factor_other: f64,
    pub weno_epsilon: f64,
    /// Linear weights of the (left, central, right) stencils.
    pub weno_linear_weights: [f64; 3],
}

impl Default for LimiterConfig {
    fn default() -> Self {
        Self {
            compression_factor_density: 2.0,
            compression_factor_other: 1.5,
            weno_epsilon: 1e-12,
            weno_linear_weights: [0.25, 0.5, 0.25],
        }
    }
}

impl LimiterConfig {
    pub fn validate(&self) -> Result<()> {
        for cfac in [self.compression_factor_density, self.compression_factor_other] {
            if !(1.0..=2.0).contains(&cfac) {
                return Err(HydroError::config(format!(
                    "compression factor {cfac} outside [1, 2]"
                )));
            }
        }
        let w = self.weno_linear_weights;
        if w.iter().any(|&x| !(x >= 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-14 {
            return Err(HydroError::config(format!(
                "WENO linear weights {w:?} must be non-negative and sum to 1"
            )));
        }
        if !(self.weno_epsilon > 0.0) {
            return Err(HydroError::config("WENO epsilon must be positive"));
        }
        Ok(())
    }

    pub fn compression_factor(&self, var: usize) -> f64 {
        if var == RHO {
            self.compression_factor_density
        } else {
            self.compression_factor_other
        }
    }
}

/// Monotone-centered limiter with a compression factor: zero when `a` and
/// `b` differ in sign, otherwise the signed `min(|a+b|/2, cfac|a|, cfac|b|)`.
#[inline]
pub fn mc_limiter(a: f64, b: f64, cfac: f64) -> f64 {
    (0.5 * (a + b).abs())
        .min(cfac * a.abs())
        .min(cfac * b.abs())
        * (0.5f64.copysign(a) + 0.5f64.copysign(b))
}

/// Third-order WENO on the five averages `u[0..5]` centred on `u[2]`.
///
/// Returns the undivided `(linear, quadratic)` coefficients of the blended
/// polynomial `avg + a xi + b (xi^2 - 1/12)`.
#[inline]
pub fn weno3(u: [f64; 5], cfg: &LimiterConfig) -> (f64, f64) {
    // written in differences so that constant data gives exactly zero
    let d = [u[1] - u[0], u[2] - u[1], u[3] - u[2], u[4] - u[3]];
    // left, central, right quadratic stencils
    let a = [
        0.5 * (3.0 * d[1] - d[0]),
        0.5 * (d[1] + d[2]),
        0.5 * (3.0 * d[2] - d[3]),
    ];
    let b = [0.5 * (d[1] - d[0]), 0.5 * (d[2] - d[1]), 0.5 * (d[3] - d[2])];
    // integral of p'^2 + p''^2 over the zone
    let q = [0, 1, 2].map(|s| {
        let d = cfg.weno_epsilon + a[s] * a[s] + (13.0 / 3.0) * b[s] * b[s];
        d * d
    });
    // gamma_s / q_s scaled by q0 q1 q2, leaving one division
    let g = cfg.weno_linear_weights;
    let w = [g[0] * q[1] * q[2], g[1] * q[0] * q[2], g[2] * q[0] * q[1]];
    let inv = 1.0 / (w[0] + w[1] + w[2]);
    let lin = (w[0] * a[0] + w[1] * a[1] + w[2] * a[2]) * inv;
    let quad = (w[0] * b[0] + w[1] * b[1] + w[2] * b[2]) * inv;
    (lin, quad)
}

/// Working arrays of a reconstruction, kept between calls so the per-step
/// path does not reallocate them.
#[derive(Debug, Clone, Default)]
pub struct ReconScratch {
    avg: Vec<[f64; NVAR]>,
    // third order works on one plane of `n` zones per variable, so that
    // sweeps run over contiguous rows
    planes: Vec<f64>,
    lin: [Vec<f64>; 3],
    quad: [Vec<f64>; 3],
    cross: [Vec<f64>; 3],
}

/// Resizes without clearing: every entry read later is written first.
fn fit<T: Copy + Default>(buf: &mut Vec<T>, n: usize) {
    buf.resize(n, T::default());
}

/// Reconstructs the spatial modes appropriate to `modal.order`.
pub fn reconstruct(modal: &mut ModalState, cfg: &LimiterConfig) {
    reconstruct_with(modal, cfg, &mut ReconScratch::default());
}

pub fn reconstruct_with(modal: &mut ModalState, cfg: &LimiterConfig, scratch: &mut ReconScratch) {
    match modal.order {
        Order::Second => limit_o2(modal, cfg, scratch),
        Order::Third => reconstruct_o3(modal, cfg, scratch),
    }
}

fn fill_averages(modal: &ModalState, avg: &mut Vec<[f64; NVAR]>) {
    let modes = modal.modes();
    fit(avg, modal.geom.zone_count(true));
    avg.par_iter_mut()
        .zip(modal.values.par_chunks(modal.zone_len()))
        .for_each(|(a, z)| *a = std::array::from_fn(|v| z[v * modes]));
}

/// Limited slopes (modes 1..=3) on the active zones plus one ring.
pub fn limit_patch_o2(modal: &mut ModalState, cfg: &LimiterConfig) {
    limit_o2(modal, cfg, &mut ReconScratch::default());
}

fn limit_o2(modal: &mut ModalState, cfg: &LimiterConfig, scratch: &mut ReconScratch) {
    let geom = modal.geom;
    fill_averages(modal, &mut scratch.avg);
    let avg = &scratch.avg;
    let modes = modal.modes();
    let zone_len = modal.zone_len();
    let [px, py, _] = geom.padded();
    let g = geom.ghost as isize;
    let strides = Axis::ALL.map(|a| geom.stride(a));
    let ring = Axis::ALL.map(|a| geom.ring_range(a));
    let cfac: [f64; NVAR] = std::array::from_fn(|v| cfg.compression_factor(v));

    modal
        .values
        .par_chunks_mut(px * py * zone_len)
        .enumerate()
        .for_each(|(kk, slab)| {
            let k = kk as isize - g;
            if !ring[2].contains(&k) {
                return;
            }
            for j in ring[1].clone() {
                for i in ring[0].clone() {
                    let o = geom.offset(i, j, k);
                    let local = ((j + g) as usize * px + (i + g) as usize) * zone_len;
                    let zone = &mut slab[local..local + zone_len];
                    let c = &avg[o];
                    for (ax, &s) in strides.iter().enumerate() {
                        let hi = &avg[o + s];
                        let lo = &avg[o - s];
                        for v in 0..NVAR {
                            let s1 = hi[v] - c[v];
                            let s2 = c[v] - lo[v];
                            zone[v * modes + mode::X + ax] = mc_limiter(s1, s2, cfac[v]);
                        }
                    }
                }
            }
        });
}

/// `weno3` along one row: output `r` is centred on `src[start + r]`, with
/// neighbours `s` apart.
#[inline]
fn weno_row(src: &[f64], start: usize, s: usize, cfg: &LimiterConfig, lin: &mut [f64], quad: Option<&mut [f64]>) {
    let len = lin.len();
    let at = |d: usize| &src[start + d * s - 2 * s..][..len];
    let (um2, um1, u0, up1, up2) = (at(0), at(1), at(2), at(3), at(4));
    match quad {
        Some(quad) => {
            let quad = &mut quad[..len];
            for r in 0..len {
                let (a, b) = weno3([um2[r], um1[r], u0[r], up1[r], up2[r]], cfg);
                lin[r] = a;
                quad[r] = b;
            }
        }
        None => {
            for r in 0..len {
                lin[r] = weno3([um2[r], um1[r], u0[r], up1[r], up2[r]], cfg).0;
            }
        }
    }
}

/// Computes `weno3` along `axis` of every variable plane of `src` over
/// `region`, writing the linear (and optionally quadratic) coefficients
/// into planes of the same layout.
fn weno_sweep(
    src: &[f64],
    geom: &PatchGeometry,
    axis: Axis,
    region: &[Range<isize>; 3],
    cfg: &LimiterConfig,
    lin: &mut [f64],
    quad: Option<&mut [f64]>,
) {
    let [px, py, pz] = geom.padded();
    let n = geom.zone_count(true);
    let g = geom.ghost as isize;
    let s = geom.stride(axis);
    let i0 = region[0].start;
    let len = region[0].len();
    // chunk c is slab c % pz of variable c / pz
    let slab = |c: usize, lin: &mut [f64], mut quad: Option<&mut [f64]>| {
        let (v, k) = (c / pz, (c % pz) as isize - g);
        if !region[2].contains(&k) {
            return;
        }
        for j in region[1].clone() {
            let start = v * n + geom.offset(i0, j, k);
            let local = (j + g) as usize * px + (i0 + g) as usize;
            let q = quad.as_deref_mut().map(|q| &mut q[local..local + len]);
            weno_row(src, start, s, cfg, &mut lin[local..local + len], q);
        }
    };
    match quad {
        Some(quad) => lin
            .par_chunks_mut(px * py)
            .zip(quad.par_chunks_mut(px * py))
            .enumerate()
            .for_each(|(c, (l, q))| slab(c, l, Some(q))),
        None => lin
            .par_chunks_mut(px * py)
            .enumerate()
            .for_each(|(c, l)| slab(c, l, None)),
    }
}

/// Copies mode 0 into one plane per variable.
fn fill_planes(modal: &ModalState, planes: &mut Vec<f64>) {
    let geom = modal.geom;
    let n = geom.zone_count(true);
    let [px, py, pz] = geom.padded();
    let (modes, zone_len) = (modal.modes(), modal.zone_len());
    fit(planes, NVAR * n);
    let mut slabs: Vec<Vec<&mut [f64]>> = (0..pz).map(|_| Vec::with_capacity(NVAR)).collect();
    for plane in planes.chunks_mut(n) {
        for (k, chunk) in plane.chunks_mut(px * py).enumerate() {
            slabs[k].push(chunk);
        }
    }
    slabs
        .into_par_iter()
        .zip(modal.values.par_chunks(px * py * zone_len))
        .for_each(|(mut out, zones)| {
            for (z, zone) in zones.chunks(zone_len).enumerate() {
                for (v, plane) in out.iter_mut().enumerate() {
                    plane[z] = zone[v * modes];
                }
            }
        });
}

/// Linear, quadratic and cross modes (modes 1..=9) on the active zones plus
/// one ring, by dimension-by-dimension third-order WENO. Cross modes are the
/// WENO linear coefficient, along one axis, of the linear modes of the next.
pub fn reconstruct_patch_o3(modal: &mut ModalState, cfg: &LimiterConfig) {
    reconstruct_o3(modal, cfg, &mut ReconScratch::default());
}

fn reconstruct_o3(modal: &mut ModalState, cfg: &LimiterConfig, scratch: &mut ReconScratch) {
    let geom = modal.geom;
    assert!(geom.ghost >= 3, "third-order reconstruction needs 3 ghost zones");
    let ReconScratch { planes, lin, quad, cross, .. } = scratch;
    fill_planes(modal, planes);
    let n = geom.zone_count(true);
    let ring = Axis::ALL.map(|a| geom.ring_range(a));
    let full = Axis::ALL.map(|a| geom.full_range(a));

    // xy comes from x-sweeps of the y-slopes, yz from y-sweeps of the
    // z-slopes and zx from z-sweeps of the x-slopes, so each axis' slopes
    // are also needed two zones past the ring along the sweeping axis.
    const CROSS: [(Axis, Axis); 3] = [(Axis::X, Axis::Y), (Axis::Y, Axis::Z), (Axis::Z, Axis::X)];
    for (along, of) in CROSS {
        let (a, b) = (of.index(), along.index());
        let mut region = ring.clone();
        region[b] = full[b].clone();
        fit(&mut lin[a], NVAR * n);
        fit(&mut quad[a], NVAR * n);
        weno_sweep(planes, &geom, of, &region, cfg, &mut lin[a], Some(&mut quad[a]));
    }
    for (c, (along, of)) in CROSS.into_iter().enumerate() {
        fit(&mut cross[c], NVAR * n);
        weno_sweep(&lin[of.index()], &geom, along, &ring, cfg, &mut cross[c], None);
    }

    let modes = modal.modes();
    let zone_len = modal.zone_len();
    let [px, py, _] = geom.padded();
    let g = geom.ghost as isize;
    modal
        .values
        .par_chunks_mut(px * py * zone_len)
        .enumerate()
        .for_each(|(kk, slab)| {
            let k = kk as isize - g;
            if !ring[2].contains(&k) {
                return;
            }
            for j in ring[1].clone() {
                for i in ring[0].clone() {
                    let o = geom.offset(i, j, k);
                    let local = ((j + g) as usize * px + (i + g) as usize) * zone_len;
                    let zone = &mut slab[local..local + zone_len];
                    for v in 0..NVAR {
                        let z = &mut zone[v * modes..(v + 1) * modes];
                        let at = v * n + o;
                        for a in 0..3 {
                            z[mode::X + a] = lin[a][at];
                            z[mode::XX + a] = quad[a][at];
                            z[mode::XY + a] = cross[a][at];
                        }
                    }
                }
            }
        });
}
