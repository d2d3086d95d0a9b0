//! Ghost fills for a single undivided field.

use crate::mesh::{Axis, ZoneField};
use crate::transfer::Boundary;

/// Fills every ghost zone of `field` from its own active zones: periodic
/// wrap or zero-gradient copy per axis. Sweeps x, y, z in turn; later
/// sweeps span the ghosts filled by earlier ones so edges and corners are
/// covered.
pub fn apply_boundary<F: ZoneField>(field: &mut F, boundary: [Boundary; 3]) {
    let geom = *field.geometry();
    let g = geom.ghost as isize;
    for axis in Axis::ALL {
        let a = axis.index();
        let n = geom.n(axis) as isize;
        let ranges: [std::ops::Range<isize>; 3] = std::array::from_fn(|b| {
            if b < a {
                geom.full_range(Axis::ALL[b])
            } else {
                geom.active_range(Axis::ALL[b])
            }
        });
        for k in ranges[2].clone() {
            for j in ranges[1].clone() {
                for i in ranges[0].clone() {
                    let idx = [i, j, k];
                    if idx[a] != 0 {
                        continue;
                    }
                    for d in 1..=g {
                        let (lo_src, hi_src) = match boundary[a] {
                            Boundary::Periodic => (n - d, d - 1),
                            Boundary::Outflow => (0, n - 1),
                        };
                        let mut dst = idx;
                        let mut src = idx;
                        dst[a] = -d;
                        src[a] = lo_src;
                        field.copy_zone(dst, src);
                        dst[a] = n - 1 + d;
                        src[a] = hi_src;
                        field.copy_zone(dst, src);
                    }
                }
            }
        }
    }
}
