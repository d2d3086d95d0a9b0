use hog_core::harness::problems::{init_isentropic_vortex, vortex_geometry, VORTEX_CROSSING_TIME};
use hog_core::harness::{error_norms, run_config, Problem, RunConfig, Simulation, StopAt};
use hog_core::mesh::{Order, RHO};
use hog_core::predictor::IntegratorChoice;
use hog_core::riemann::RiemannSolver;
use hog_core::euler::GasModel;

#[test]
fn vortex_errors_shrink_under_refinement() {
    for order in [Order::Second, Order::Third] {
        let errs: Vec<f64> = [8, 16]
            .iter()
            .map(|&n| {
                let cfg = RunConfig {
                    order,
                    n: [n; 3],
                    stop: Some(StopAt::Time(1.0)),
                    ..RunConfig::default()
                };
                run_config(&cfg).unwrap().0.error.unwrap().l1[RHO]
            })
            .collect();
        assert!(errs[1] < 0.5 * errs[0], "{order:?}: {errs:?}");
    }
}

#[test]
fn exact_solution_returns_after_a_crossing() {
    let gas = GasModel::default();
    for order in [Order::Second, Order::Third] {
        let g = vortex_geometry([12; 3], order).unwrap();
        let start = init_isentropic_vortex(&g, order, gas);
        let cfg = RunConfig {
            order,
            n: [12; 3],
            ..RunConfig::default()
        };
        let mut sim = Simulation::new(&cfg).unwrap();
        sim.time.t = VORTEX_CROSSING_TIME;
        let exact = sim.exact().unwrap();
        let e = error_norms(&start, &exact).unwrap();
        assert!(e.linf.iter().all(|&x| x < 1e-12), "{e:?}");
    }
}

#[test]
fn every_scheme_combination_runs_and_conserves() {
    for order in [Order::Second, Order::Third] {
        for integrator in [IntegratorChoice::Ader, IntegratorChoice::Rk2, IntegratorChoice::Rk3] {
            for solver in [RiemannSolver::Rusanov, RiemannSolver::Hll] {
                let cfg = RunConfig {
                    order,
                    integrator,
                    solver,
                    n: [8; 3],
                    split: [2, 1, 2],
                    stop: Some(StopAt::Steps(5)),
                    ..RunConfig::default()
                };
                let (s, state) = run_config(&cfg).unwrap();
                assert_eq!(s.steps, 5);
                assert!(s.conservation.iter().all(|&d| d < 1e-13), "{:?}", s.conservation);
                assert!(state.active().all(|(_, u)| u.iter().all(|x| x.is_finite())));
                let per_step = s.faces.calls / 5;
                // four 4x8x4 patches, each solving its own faces
                let faces = 5 * 8 * 4 + 4 * 9 * 4 + 4 * 8 * 5;
                assert_eq!(per_step, 4 * faces * integrator.stages() as u64);
            }
        }
    }
}

#[test]
fn sod_keeps_mass_with_outflow() {
    let cfg = RunConfig {
        problem: Problem::Sod,
        n: [32, 4, 4],
        stop: Some(StopAt::Time(0.05)),
        ..RunConfig::default()
    };
    let (s, state) = run_config(&cfg).unwrap();
    assert_eq!(s.t, 0.05);
    // waves have not reached the ends, so the totals are unchanged
    assert!(s.conservation[RHO] < 1e-13);
    let densities: Vec<f64> = state.active().map(|(_, u)| u[RHO]).collect();
    assert!(densities.iter().all(|&r| (0.125 - 1e-9..=1.0 + 1e-9).contains(&r)));
}
