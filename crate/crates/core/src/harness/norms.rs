//! Error norms, convergence orders and the conservation metric.

use crate::error::{HydroError, Result};
use crate::mesh::{SkinnyState, NVAR};
use crate::util::NeumaierSum;

/// Per-variable error of a numerical solution against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Mean absolute difference over active zones.
    pub l1: [f64; NVAR],
    pub linf: [f64; NVAR],
}

pub fn error_norms(numerical: &SkinnyState, exact: &SkinnyState) -> Result<ErrorReport> {
    if numerical.geom.dims() != exact.geom.dims() {
        return Err(HydroError::Shape {
            what: "error_norms",
            expected: exact.geom.dims().to_vec(),
            found: numerical.geom.dims().to_vec(),
        });
    }
    let mut sums = [NeumaierSum::default(); NVAR];
    let mut linf = [0.0f64; NVAR];
    for ((_, a), (_, b)) in numerical.active().zip(exact.active()) {
        for v in 0..NVAR {
            let d = (a[v] - b[v]).abs();
            sums[v].add(d);
            linf[v] = linf[v].max(d);
        }
    }
    let count = numerical.geom.zone_count(false) as f64;
    Ok(ErrorReport {
        l1: sums.map(|s| s.value() / count),
        linf,
    })
}

/// Observed order between a coarse mesh of `n_coarse` zones per axis and a
/// finer one.
pub fn order_estimate(e_coarse: f64, e_fine: f64, n_coarse: usize, n_fine: usize) -> f64 {
    (e_coarse / e_fine).ln() / (n_fine as f64 / n_coarse as f64).ln()
}

/// Largest relative change of the conserved totals: `|after - before|`
/// over `max(|before|, sum of |U|)` per variable. The second scale keeps
/// totals that vanish by symmetry (transverse momentum) meaningful.
pub fn conservation_drift(before: &[f64; NVAR], after: &[f64; NVAR], magnitude: &[f64; NVAR]) -> [f64; NVAR] {
    std::array::from_fn(|v| {
        let scale = before[v].abs().max(magnitude[v]).max(f64::MIN_POSITIVE);
        (after[v] - before[v]).abs() / scale
    })
}

/// Per-variable sum of `|U|` over active zones.
pub fn absolute_totals(s: &SkinnyState) -> [f64; NVAR] {
    let mut sums = [NeumaierSum::default(); NVAR];
    for (_, u) in s.active() {
        for v in 0..NVAR {
            sums[v].add(u[v].abs());
        }
    }
    sums.map(|x| x.value())
}
