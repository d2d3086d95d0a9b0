//! Pointwise approximate Riemann solvers.

use std::str::FromStr;

use crate::error::{HydroError, UnphysicalState};
use crate::euler::{cons_to_prim, flux_from_prim, ConsVars, GasModel};
use crate::mesh::{Axis, NVAR};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceStatePair {
    pub left: ConsVars,
    pub right: ConsVars,
    pub axis: Axis,
}

/// Per-sweep solver counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FaceDiagnostics {
    /// Face solves performed.
    pub calls: u64,
    /// HLL fans with `S_R == S_L` that fell back to the central flux.
    pub degenerate_fans: u64,
}

impl FaceDiagnostics {
    pub fn merge(self, other: FaceDiagnostics) -> FaceDiagnostics {
        FaceDiagnostics {
            calls: self.calls + other.calls,
            degenerate_fans: self.degenerate_fans + other.degenerate_fans,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RiemannSolver {
    Rusanov,
    Hll,
}

impl RiemannSolver {
    pub fn name(self) -> &'static str {
        match self {
            RiemannSolver::Rusanov => "rusanov",
            RiemannSolver::Hll => "hll",
        }
    }

    #[inline]
    pub fn solve(
        self,
        pair: &FaceStatePair,
        gas: GasModel,
        diag: &mut FaceDiagnostics,
    ) -> Result<[f64; NVAR], UnphysicalState> {
        diag.calls += 1;
        match self {
            RiemannSolver::Rusanov => rusanov_flux(pair, gas),
            RiemannSolver::Hll => hll_flux(pair, gas, diag),
        }
    }
}

impl FromStr for RiemannSolver {
    type Err = HydroError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rusanov" => Ok(RiemannSolver::Rusanov),
            "hll" => Ok(RiemannSolver::Hll),
            other => Err(HydroError::config(format!("unknown Riemann solver '{other}'"))),
        }
    }
}

/// Local Lax-Friedrichs flux `(F_L + F_R)/2 - s_max (U_R - U_L)/2`.
#[inline]
pub fn rusanov_flux(pair: &FaceStatePair, gas: GasModel) -> Result<[f64; NVAR], UnphysicalState> {
    let (l, r, axis) = (&pair.left, &pair.right, pair.axis);
    let wl = cons_to_prim(l, gas)?;
    let wr = cons_to_prim(r, gas)?;
    let fl = flux_from_prim(l, &wl, axis);
    let fr = flux_from_prim(r, &wr, axis);
    let sl = wl.velocity(axis).abs() + wl.sound_speed(gas);
    let sr = wr.velocity(axis).abs() + wr.sound_speed(gas);
    let s = sl.max(sr);
    Ok(std::array::from_fn(|v| {
        0.5 * (fl[v] + fr[v]) - 0.5 * s * (r.0[v] - l.0[v])
    }))
}

/// HLL flux with Davis wave-speed bounds.
#[inline]
pub fn hll_flux(
    pair: &FaceStatePair,
    gas: GasModel,
    diag: &mut FaceDiagnostics,
) -> Result<[f64; NVAR], UnphysicalState> {
    let (l, r, axis) = (&pair.left, &pair.right, pair.axis);
    let wl = cons_to_prim(l, gas)?;
    let wr = cons_to_prim(r, gas)?;
    let fl = flux_from_prim(l, &wl, axis);
    let fr = flux_from_prim(r, &wr, axis);
    let (ul, ur) = (wl.velocity(axis), wr.velocity(axis));
    let (cl, cr) = (wl.sound_speed(gas), wr.sound_speed(gas));
    let s_l = (ul - cl).min(ur - cr);
    let s_r = (ul + cl).max(ur + cr);

    if s_l >= 0.0 {
        return Ok(fl);
    }
    if s_r <= 0.0 {
        return Ok(fr);
    }
    if s_r == s_l {
        diag.degenerate_fans += 1;
        return Ok(std::array::from_fn(|v| 0.5 * (fl[v] + fr[v])));
    }
    let inv = 1.0 / (s_r - s_l);
    Ok(std::array::from_fn(|v| {
        (s_r * fl[v] - s_l * fr[v] + s_l * s_r * (r.0[v] - l.0[v])) * inv
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{physical_flux, prim_to_cons, PrimVars};
    use crate::mesh::{MX, RHO};
    use approx::assert_relative_eq;

    const GAS: GasModel = GasModel { gamma: 1.4 };

    fn cons(rho: f64, u: f64, v: f64, w: f64, p: f64) -> ConsVars {
        prim_to_cons(&PrimVars { rho, u, v, w, p }, GAS)
    }

    /// x-direction Rusanov flux written directly from primitives.
    fn scalar_rusanov_x(l: [f64; 5], r: [f64; 5], gamma: f64) -> [f64; 5] {
        let phys = |[rho, u, v, w, p]: [f64; 5]| {
            let e = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v + w * w);
            (
                [rho * u, rho * u * u + p, rho * u * v, rho * u * w, u * (e + p)],
                [rho, rho * u, rho * v, rho * w, e],
                u.abs() + (gamma * p / rho).sqrt(),
            )
        };
        let (fl, ul, sl) = phys(l);
        let (fr, ur, sr) = phys(r);
        let s = if sl > sr { sl } else { sr };
        let mut out = [0.0; 5];
        for v in 0..5 {
            out[v] = 0.5 * (fl[v] + fr[v]) - 0.5 * s * (ur[v] - ul[v]);
        }
        out
    }

    fn sod() -> FaceStatePair {
        FaceStatePair {
            left: cons(1.0, 0.0, 0.0, 0.0, 1.0),
            right: cons(0.125, 0.0, 0.0, 0.0, 0.1),
            axis: Axis::X,
        }
    }

    #[test]
    fn rusanov_matches_scalar_oracle_on_sod() {
        let f = rusanov_flux(&sod(), GAS).unwrap();
        let oracle = scalar_rusanov_x([1.0, 0.0, 0.0, 0.0, 1.0], [0.125, 0.0, 0.0, 0.0, 0.1], 1.4);
        for v in 0..NVAR {
            assert_relative_eq!(f[v], oracle[v], max_relative = 1e-14, epsilon = 1e-15);
        }
        // hand evaluation: s = sqrt(1.4), mass flux = -s/2 * (0.125 - 1)
        assert_relative_eq!(f[RHO], 0.4375 * 1.4f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(f[MX], 0.55, max_relative = 1e-14);
    }

    #[test]
    fn equal_states_give_physical_flux() {
        let u = cons(0.8, 0.3, -1.1, 0.2, 2.0);
        for axis in Axis::ALL {
            let pair = FaceStatePair { left: u, right: u, axis };
            let exact = physical_flux(&u, axis, GAS).unwrap();
            assert_eq!(rusanov_flux(&pair, GAS).unwrap(), exact);
            let hll = hll_flux(&pair, GAS, &mut FaceDiagnostics::default()).unwrap();
            for v in 0..NVAR {
                assert_relative_eq!(hll[v], exact[v], max_relative = 1e-14, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn mirrored_states_reverse_the_mass_flux() {
        let l = cons(1.0, 0.4, 0.1, 0.0, 1.0);
        let r = cons(0.5, -0.2, 0.3, 0.0, 0.6);
        // swap sides and reflect the normal velocity
        let ml = cons(0.5, 0.2, 0.3, 0.0, 0.6);
        let mr = cons(1.0, -0.4, 0.1, 0.0, 1.0);
        let a = FaceStatePair { left: l, right: r, axis: Axis::X };
        let b = FaceStatePair { left: ml, right: mr, axis: Axis::X };
        let mut d = FaceDiagnostics::default();
        assert_relative_eq!(
            rusanov_flux(&a, GAS).unwrap()[RHO],
            -rusanov_flux(&b, GAS).unwrap()[RHO],
            max_relative = 1e-14
        );
        assert_relative_eq!(
            hll_flux(&a, GAS, &mut d).unwrap()[RHO],
            -hll_flux(&b, GAS, &mut d).unwrap()[RHO],
            max_relative = 1e-14
        );
    }

    #[test]
    fn supersonic_flow_is_fully_upwinded() {
        let l = cons(1.0, 3.0, 0.0, 0.0, 1.0);
        let r = cons(0.7, 2.8, 0.0, 0.0, 0.8);
        let pair = FaceStatePair { left: l, right: r, axis: Axis::X };
        let f = hll_flux(&pair, GAS, &mut FaceDiagnostics::default()).unwrap();
        assert_eq!(f, physical_flux(&l, Axis::X, GAS).unwrap());

        let pair = FaceStatePair { left: cons(1.0, -3.0, 0.0, 0.0, 1.0), right: cons(1.0, -3.5, 0.0, 0.0, 1.0), axis: Axis::X };
        let f = hll_flux(&pair, GAS, &mut FaceDiagnostics::default()).unwrap();
        assert_eq!(f, physical_flux(&pair.right, Axis::X, GAS).unwrap());
    }

    #[test]
    fn hll_is_less_dissipative_than_rusanov_on_sod() {
        let pair = sod();
        let fl = physical_flux(&pair.left, Axis::X, GAS).unwrap();
        let fr = physical_flux(&pair.right, Axis::X, GAS).unwrap();
        let central = 0.5 * (fl[RHO] + fr[RHO]);
        let hll = hll_flux(&pair, GAS, &mut FaceDiagnostics::default()).unwrap()[RHO];
        let rus = rusanov_flux(&pair, GAS).unwrap()[RHO];
        assert!((hll - central).abs() <= (rus - central).abs());
        assert!((hll - central).abs() > 0.0);
    }

    #[test]
    fn solver_counts_calls() {
        let mut d = FaceDiagnostics::default();
        for solver in [RiemannSolver::Rusanov, RiemannSolver::Hll] {
            solver.solve(&sod(), GAS, &mut d).unwrap();
        }
        assert_eq!(d.calls, 2);
        assert_eq!(d.degenerate_fans, 0);
    }

    #[test]
    fn unphysical_input_is_reported() {
        let bad = FaceStatePair { left: ConsVars([1.0, 5.0, 0.0, 0.0, 1.0]), right: cons(1.0, 0.0, 0.0, 0.0, 1.0), axis: Axis::Y };
        assert!(rusanov_flux(&bad, GAS).is_err());
        assert!(hll_flux(&bad, GAS, &mut FaceDiagnostics::default()).is_err());
    }

    #[test]
    fn parses_solver_names() {
        assert_eq!("HLL".parse::<RiemannSolver>().unwrap(), RiemannSolver::Hll);
        assert_eq!("rusanov".parse::<RiemannSolver>().unwrap(), RiemannSolver::Rusanov);
        assert!("hllc".parse::<RiemannSolver>().is_err());
    }
}
