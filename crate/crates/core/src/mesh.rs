//! Patch geometry and the field layouts shared by every stage of a step.
//!
//! Zones are addressed with signed indices: active zones run `0..n` along
//! each axis and ghost zones occupy `-g..0` and `n..n+g`. Every field is one
//! contiguous block ordered `[z][y][x]`, with the per-zone payload innermost
//! (`[variable][mode]` for [`ModalState`], `[variable]` for the others).

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;

use crate::error::{HydroError, Result};

/// Number of conserved variables: density, three momenta, total energy.
pub const NVAR: usize = 5;

pub const RHO: usize = 0;
pub const MX: usize = 1;
pub const MY: usize = 2;
pub const MZ: usize = 3;
pub const ENERGY: usize = 4;

/// Largest mode count of any supported order.
pub const MAX_MODES: usize = 11;

/// Mode indices of the per-zone polynomial basis.
///
/// The spatial basis functions are taken in zone-local coordinates
/// `xi, eta, zeta` in `[-1/2, 1/2]`: `xi` for the linear modes,
/// `xi^2 - 1/12` for the quadratic modes (zero mean) and `xi * eta` for
/// the cross modes. The temporal mode is always the last one.
pub mod mode {
    pub const AVG: usize = 0;
    pub const X: usize = 1;
    pub const Y: usize = 2;
    pub const Z: usize = 3;
    pub const XX: usize = 4;
    pub const YY: usize = 5;
    pub const ZZ: usize = 6;
    pub const XY: usize = 7;
    pub const YZ: usize = 8;
    pub const ZX: usize = 9;
}

/// Value of the quadratic basis function `xi^2 - 1/12` at a face (`xi = ±1/2`).
pub const QUADRATIC_AT_FACE: f64 = 1.0 / 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// Momentum component normal to faces of this axis.
    pub fn momentum(self) -> usize {
        MX + self.index()
    }

    pub fn linear_mode(self) -> usize {
        mode::X + self.index()
    }

    pub fn quadratic_mode(self) -> usize {
        mode::XX + self.index()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Spatial order of accuracy of the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Second,
    Third,
}

impl Order {
    pub fn from_int(order: u32) -> Result<Self> {
        match order {
            2 => Ok(Order::Second),
            3 => Ok(Order::Third),
            other => Err(HydroError::config(format!(
                "unsupported order {other} (expected 2 or 3)"
            ))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            Order::Second => 2,
            Order::Third => 3,
        }
    }

    /// Modes per variable: average, 3 slopes, temporal at second order;
    /// plus 3 quadratic and 3 cross modes at third order.
    pub fn modes(self) -> usize {
        match self {
            Order::Second => 5,
            Order::Third => 11,
        }
    }

    pub fn ghost_width(self) -> usize {
        match self {
            Order::Second => 2,
            Order::Third => 3,
        }
    }

    pub fn temporal_mode(self) -> usize {
        self.modes() - 1
    }

    /// Default Courant number.
    pub fn default_cfl(self) -> f64 {
        match self {
            Order::Second => 0.6,
            Order::Third => 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchGeometry {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub ghost: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    /// Low corner of the first active zone.
    pub origin: [f64; 3],
}

impl PatchGeometry {
    pub fn new(n: [usize; 3], spacing: [f64; 3], origin: [f64; 3], order: Order) -> Result<Self> {
        Self::with_ghost(n, spacing, origin, order.ghost_width())
    }

    pub fn with_ghost(
        n: [usize; 3],
        spacing: [f64; 3],
        origin: [f64; 3],
        ghost: usize,
    ) -> Result<Self> {
        if n.iter().any(|&c| c < 4) {
            return Err(HydroError::config(format!(
                "patch needs at least 4 active zones per axis, got {n:?}"
            )));
        }
        if spacing.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(HydroError::config(format!(
                "zone spacing must be positive, got {spacing:?}"
            )));
        }
        if ghost == 0 {
            return Err(HydroError::config("ghost width must be positive"));
        }
        Ok(Self {
            nx: n[0],
            ny: n[1],
            nz: n[2],
            ghost,
            dx: spacing[0],
            dy: spacing[1],
            dz: spacing[2],
            origin,
        })
    }

    /// Covers `[lo, hi]` per axis with `n` zones.
    pub fn spanning(n: [usize; 3], lo: [f64; 3], hi: [f64; 3], order: Order) -> Result<Self> {
        let spacing = [0, 1, 2].map(|a| (hi[a] - lo[a]) / n[a] as f64);
        Self::new(n, spacing, lo, order)
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn n(&self, axis: Axis) -> usize {
        self.dims()[axis.index()]
    }

    pub fn spacing(&self, axis: Axis) -> f64 {
        [self.dx, self.dy, self.dz][axis.index()]
    }

    /// Active plus ghost extents.
    pub fn padded(&self) -> [usize; 3] {
        self.dims().map(|n| n + 2 * self.ghost)
    }

    pub fn zone_count(&self, include_ghost: bool) -> usize {
        let d = if include_ghost {
            self.padded()
        } else {
            self.dims()
        };
        d[0] * d[1] * d[2]
    }

    /// Linear index of zone `(i, j, k)` in a padded block.
    #[inline]
    pub fn offset(&self, i: isize, j: isize, k: isize) -> usize {
        let [px, py, _] = self.padded();
        let g = self.ghost as isize;
        debug_assert!(self.contains(i, j, k), "zone ({i}, {j}, {k}) outside patch");
        (((k + g) as usize * py) + (j + g) as usize) * px + (i + g) as usize
    }

    /// Distance in zones between neighbours along `axis` in a padded block.
    pub fn stride(&self, axis: Axis) -> usize {
        let [px, py, _] = self.padded();
        match axis {
            Axis::X => 1,
            Axis::Y => px,
            Axis::Z => px * py,
        }
    }

    pub fn contains(&self, i: isize, j: isize, k: isize) -> bool {
        let g = self.ghost as isize;
        let [nx, ny, nz] = self.dims().map(|n| n as isize);
        (-g..nx + g).contains(&i) && (-g..ny + g).contains(&j) && (-g..nz + g).contains(&k)
    }

    pub fn active_range(&self, axis: Axis) -> Range<isize> {
        0..self.n(axis) as isize
    }

    /// Active zones plus one ring: the range on which slopes and temporal
    /// modes are built.
    pub fn ring_range(&self, axis: Axis) -> Range<isize> {
        -1..self.n(axis) as isize + 1
    }

    pub fn full_range(&self, axis: Axis) -> Range<isize> {
        let g = self.ghost as isize;
        -g..self.n(axis) as isize + g
    }

    pub fn zone_center(&self, i: isize, j: isize, k: isize) -> [f64; 3] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.dx,
            self.origin[1] + (j as f64 + 0.5) * self.dy,
            self.origin[2] + (k as f64 + 0.5) * self.dz,
        ]
    }

    pub fn zone_volume(&self) -> f64 {
        self.dx * self.dy * self.dz
    }

    /// Same padded layout and active extents (spacing and origin may differ).
    pub fn same_layout(&self, other: &PatchGeometry) -> bool {
        self.dims() == other.dims() && self.ghost == other.ghost
    }

    fn check_layout(&self, other: &PatchGeometry, what: &'static str) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(HydroError::Shape {
                what,
                expected: vec![self.nx, self.ny, self.nz, self.ghost],
                found: vec![other.nx, other.ny, other.nz, other.ghost],
            })
        }
    }
}

/// Zone-wise access used by boundary fills.
pub trait ZoneField {
    fn geometry(&self) -> &PatchGeometry;

    /// Copies the whole payload of zone `src` into zone `dst`.
    fn copy_zone(&mut self, dst: [isize; 3], src: [isize; 3]);
}

/// Conserved variables with their spatial and temporal modes over active and
/// ghost zones.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub geom: PatchGeometry,
    pub order: Order,
    pub values: Vec<f64>,
}

impl ModalState {
    pub fn new(geom: PatchGeometry, order: Order) -> Self {
        let len = geom.zone_count(true) * NVAR * order.modes();
        Self {
            geom,
            order,
            values: vec![0.0; len],
        }
    }

    pub fn modes(&self) -> usize {
        self.order.modes()
    }

    /// Length of one zone's `[variable][mode]` block.
    pub fn zone_len(&self) -> usize {
        NVAR * self.modes()
    }

    #[inline]
    pub fn zone(&self, i: isize, j: isize, k: isize) -> &[f64] {
        let len = self.zone_len();
        let o = self.geom.offset(i, j, k) * len;
        &self.values[o..o + len]
    }

    #[inline]
    pub fn zone_mut(&mut self, i: isize, j: isize, k: isize) -> &mut [f64] {
        let len = self.zone_len();
        let o = self.geom.offset(i, j, k) * len;
        &mut self.values[o..o + len]
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize, k: isize, var: usize, m: usize) -> f64 {
        self.zone(i, j, k)[var * self.modes() + m]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, k: isize, var: usize, m: usize, value: f64) {
        let modes = self.modes();
        self.zone_mut(i, j, k)[var * modes + m] = value;
    }

    /// Zone average of all variables.
    pub fn average(&self, i: isize, j: isize, k: isize) -> [f64; NVAR] {
        let z = self.zone(i, j, k);
        let m = self.modes();
        std::array::from_fn(|v| z[v * m])
    }

    /// Zeroes the temporal mode everywhere (time-frozen Runge-Kutta stages).
    pub fn clear_temporal_mode(&mut self) {
        let modes = self.modes();
        let t = self.order.temporal_mode();
        self.values
            .par_chunks_mut(modes)
            .for_each(|var_block| var_block[t] = 0.0);
    }
}

impl ZoneField for ModalState {
    fn geometry(&self) -> &PatchGeometry {
        &self.geom
    }

    fn copy_zone(&mut self, dst: [isize; 3], src: [isize; 3]) {
        let len = self.zone_len();
        let s = self.geom.offset(src[0], src[1], src[2]) * len;
        let d = self.geom.offset(dst[0], dst[1], dst[2]) * len;
        self.values.copy_within(s..s + len, d);
    }
}

/// Zone averages only, over active and ghost zones: the unit of every
/// patch-boundary transfer.
#[derive(Debug, Clone, PartialEq)]
pub struct SkinnyState {
    pub geom: PatchGeometry,
    pub values: Vec<[f64; NVAR]>,
}

impl SkinnyState {
    pub fn new(geom: PatchGeometry) -> Self {
        Self {
            geom,
            values: vec![[0.0; NVAR]; geom.zone_count(true)],
        }
    }

    /// Builds a state by evaluating `f` at every zone, ghosts included.
    pub fn from_fn(geom: PatchGeometry, mut f: impl FnMut(isize, isize, isize) -> [f64; NVAR]) -> Self {
        let mut s = Self::new(geom);
        for k in geom.full_range(Axis::Z) {
            for j in geom.full_range(Axis::Y) {
                for i in geom.full_range(Axis::X) {
                    let o = geom.offset(i, j, k);
                    s.values[o] = f(i, j, k);
                }
            }
        }
        s
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize, k: isize) -> [f64; NVAR] {
        self.values[self.geom.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, k: isize, value: [f64; NVAR]) {
        let o = self.geom.offset(i, j, k);
        self.values[o] = value;
    }

    /// Iterates `(index, value)` over active zones in storage order.
    pub fn active(&self) -> impl Iterator<Item = ([isize; 3], [f64; NVAR])> + '_ {
        let g = self.geom;
        g.active_range(Axis::Z).flat_map(move |k| {
            g.active_range(Axis::Y).flat_map(move |j| {
                g.active_range(Axis::X)
                    .map(move |i| ([i, j, k], self.values[g.offset(i, j, k)]))
            })
        })
    }

    /// Per-variable sum over active zones (compensated).
    pub fn active_totals(&self) -> [f64; NVAR] {
        let mut sums = [crate::util::NeumaierSum::default(); NVAR];
        for (_, u) in self.active() {
            for v in 0..NVAR {
                sums[v].add(u[v]);
            }
        }
        sums.map(|s| s.value())
    }
}

impl ZoneField for SkinnyState {
    fn geometry(&self) -> &PatchGeometry {
        &self.geom
    }

    fn copy_zone(&mut self, dst: [isize; 3], src: [isize; 3]) {
        let v = self.get(src[0], src[1], src[2]);
        self.set(dst[0], dst[1], dst[2], v);
    }
}

/// Numerical fluxes on the faces of the active zones.
///
/// Face `f` along an axis separates zones `f - 1` and `f`, so each axis has
/// `n + 1` faces along itself and the active extent transversally.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceFluxField {
    pub geom: PatchGeometry,
    pub x: Vec<[f64; NVAR]>,
    pub y: Vec<[f64; NVAR]>,
    pub z: Vec<[f64; NVAR]>,
}

impl FaceFluxField {
    pub fn new(geom: PatchGeometry) -> Self {
        let count = |axis: Axis| {
            let d = Self::face_dims_of(&geom, axis);
            d[0] * d[1] * d[2]
        };
        Self {
            geom,
            x: vec![[0.0; NVAR]; count(Axis::X)],
            y: vec![[0.0; NVAR]; count(Axis::Y)],
            z: vec![[0.0; NVAR]; count(Axis::Z)],
        }
    }

    fn face_dims_of(geom: &PatchGeometry, axis: Axis) -> [usize; 3] {
        let mut d = geom.dims();
        d[axis.index()] += 1;
        d
    }

    pub fn face_dims(&self, axis: Axis) -> [usize; 3] {
        Self::face_dims_of(&self.geom, axis)
    }

    #[inline]
    pub fn face_offset(&self, axis: Axis, i: usize, j: usize, k: usize) -> usize {
        let [fx, fy, _] = self.face_dims(axis);
        (k * fy + j) * fx + i
    }

    pub fn axis(&self, axis: Axis) -> &[[f64; NVAR]] {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    pub fn axis_mut(&mut self, axis: Axis) -> &mut [[f64; NVAR]] {
        match axis {
            Axis::X => &mut self.x,
            Axis::Y => &mut self.y,
            Axis::Z => &mut self.z,
        }
    }

    pub fn get(&self, axis: Axis, i: usize, j: usize, k: usize) -> [f64; NVAR] {
        self.axis(axis)[self.face_offset(axis, i, j, k)]
    }

    pub fn set(&mut self, axis: Axis, i: usize, j: usize, k: usize, value: [f64; NVAR]) {
        let o = self.face_offset(axis, i, j, k);
        self.axis_mut(axis)[o] = value;
    }

    pub fn fill(&mut self, value: [f64; NVAR]) {
        for axis in Axis::ALL {
            self.axis_mut(axis).fill(value);
        }
    }
}

/// `dt` times the flux-divergence rate, active zones only.
#[derive(Debug, Clone, PartialEq)]
pub struct RateField {
    pub geom: PatchGeometry,
    pub values: Vec<[f64; NVAR]>,
}

impl RateField {
    pub fn new(geom: PatchGeometry) -> Self {
        Self {
            geom,
            values: vec![[0.0; NVAR]; geom.zone_count(false)],
        }
    }

    #[inline]
    pub fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.geom.ny + j) * self.geom.nx + i
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> [f64; NVAR] {
        self.values[self.offset(i, j, k)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeState {
    pub dt: f64,
    pub dt_next: f64,
    pub cfl: f64,
    pub t: f64,
}

impl TimeState {
    pub fn new(cfl: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl < 1.0) {
            return Err(HydroError::config(format!(
                "cfl must lie in (0, 1), got {cfl}"
            )));
        }
        Ok(Self {
            dt: f64::NAN,
            dt_next: f64::NAN,
            cfl,
            t: 0.0,
        })
    }

    pub fn with_dt(cfl: f64, dt: f64) -> Result<Self> {
        let mut ts = Self::new(cfl)?;
        if !(dt > 0.0) {
            return Err(HydroError::config(format!("dt must be positive, got {dt}")));
        }
        ts.dt = dt;
        Ok(ts)
    }
}

/// Copies the skinny averages into mode 0 of every zone, ghosts included.
/// Higher modes are left untouched.
pub fn skinny_to_modal(skinny: &SkinnyState, modal: &mut ModalState) -> Result<()> {
    skinny.geom.check_layout(&modal.geom, "skinny_to_modal")?;
    let modes = modal.modes();
    let zone_len = modal.zone_len();
    modal
        .values
        .par_chunks_mut(zone_len)
        .zip(skinny.values.par_iter())
        .for_each(|(zone, avg)| {
            for v in 0..NVAR {
                zone[v * modes] = avg[v];
            }
        });
    Ok(())
}

/// Copies mode 0 of the active zones into `skinny`; its ghost zones keep
/// whatever the last boundary fill wrote.
pub fn modal_to_skinny(modal: &ModalState, skinny: &mut SkinnyState) -> Result<()> {
    modal.geom.check_layout(&skinny.geom, "modal_to_skinny")?;
    let g = modal.geom;
    for k in g.active_range(Axis::Z) {
        for j in g.active_range(Axis::Y) {
            for i in g.active_range(Axis::X) {
                skinny.set(i, j, k, modal.average(i, j, k));
            }
        }
    }
    Ok(())
}
