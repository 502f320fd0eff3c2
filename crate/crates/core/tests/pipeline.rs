use spinprobe::dynamics::{averaged_propagators, prepare_params, CorrelationFactor, PreparationMode};
use spinprobe::estimation::{compare_preparations, optimize_time, write_sweep_csv, SweepSpec, TimeWindow};
use spinprobe::oracle::{oracle_qfi, oracle_trajectory};
use spinprobe::qfi::{qfi_at, qfi_trace, Estimator, Route};
use spinprobe::spectrum::Spectrum;
use spinprobe::{Boundary, ModelParams, SiteValues};

fn small(n: usize) -> ModelParams {
    ModelParams { n, g: 0.4, chi: SiteValues::Uniform(0.1), temperature: 0.7, ..Default::default() }
}

#[test]
fn open_chain_and_disordered_bath_match_oracle() {
    let open = ModelParams { boundary: Boundary::Open, ..small(5) };
    let disordered = ModelParams {
        omega: SiteValues::PerSite(vec![0.8, 1.0, 1.3, 0.9]),
        chi: SiteValues::PerSite(vec![0.1, -0.05, 0.2, 0.0]),
        ..small(4)
    };
    let times: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
    for p in [open, disordered] {
        for mode in PreparationMode::ALL {
            let ens = prepare_params(&p, mode).unwrap();
            let dense = oracle_trajectory(&p, mode, &times).unwrap();
            for (&t, rho) in times.iter().zip(&dense) {
                assert!((ens.bloch_at(t) - rho.bloch()).norm() < 1e-11, "{mode} t={t}");
            }
        }
    }
}

#[test]
fn qfi_matches_oracle_for_both_estimators() {
    let p = small(5);
    for mode in PreparationMode::ALL {
        for which in [Estimator::Temperature, Estimator::Coupling] {
            let a = qfi_at(&p, mode, 3.1, which).unwrap().f;
            let b = oracle_qfi(&p, mode, 3.1, which).unwrap();
            assert!((a - b).abs() <= 1e-6 * a.abs().max(b.abs()), "{mode} {which}: {a} vs {b}");
        }
    }
}

#[test]
fn routes_agree_along_a_trace() {
    let p = small(8);
    let times: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64).collect();
    let bloch = qfi_trace(&p, PreparationMode::PulseCorrelated, Estimator::Temperature, &times, Route::Bloch).unwrap();
    for route in [Route::Eigen, Route::ClosedForm] {
        let other = qfi_trace(&p, PreparationMode::PulseCorrelated, Estimator::Temperature, &times, route).unwrap();
        for (a, b) in bloch.iter().zip(&other) {
            assert!((a.f - b.f).abs() <= 1e-8 * a.f.abs().max(1e-12), "{route} t={}", a.t);
            assert!(a.richardson_ok);
        }
    }
}

#[test]
fn corrected_propagators_reproduce_pulse_dynamics() {
    let p = ModelParams { n: 30, g: 0.05, ..Default::default() }.validate().unwrap();
    let spectrum = Spectrum::for_params(&p).unwrap();
    let unc = prepare_params(&p, PreparationMode::PulseUncorrelated).unwrap();
    let b = unc.entries[0].bloch;
    for t in [0.0, 0.7, 3.0, 11.0] {
        let prop = averaged_propagators(&p, &spectrum, t, true, CorrelationFactor::PreSwitch).unwrap();
        let m = prop.uncorrelated;
        let via_matrix = [
            m[0][0] * b.x + m[0][1] * b.y + m[0][2] * b.z,
            m[1][0] * b.x + m[1][1] * b.y + m[1][2] * b.z,
            m[2][0] * b.x + m[2][1] * b.y + m[2][2] * b.z,
        ];
        let r = unc.bloch_at(t);
        for (u, v) in via_matrix.iter().zip([r.x, r.y, r.z]) {
            assert!((u - v).abs() < 1e-12, "t={t}");
        }
    }
    let literal = averaged_propagators(&p, &spectrum, 0.0, false, CorrelationFactor::PreSwitch).unwrap();
    assert!((literal.uncorrelated[0][0] - 1.0).abs() > 1e-3);
}

#[test]
fn optimum_is_reproducible_and_grid_independent() {
    let p = ModelParams { n: 20, g: 0.2, ..Default::default() };
    let window = TimeWindow::new(0.0, 10.0);
    let a = optimize_time(&p, PreparationMode::PulseUncorrelated, Estimator::Temperature, &window).unwrap();
    let b = optimize_time(&p, PreparationMode::PulseUncorrelated, Estimator::Temperature, &window).unwrap();
    assert_eq!(a, b);
    let fine = optimize_time(&p, PreparationMode::PulseUncorrelated, Estimator::Temperature, &window.with_grid_points(4001)).unwrap();
    assert!((a.f_star - fine.f_star).abs() < 1e-3 * fine.f_star);
}

#[test]
fn comparison_rows_and_ratios() {
    let p = ModelParams { n: 12, ..Default::default() };
    let c = compare_preparations(&p, Estimator::Temperature, 1.0, &TimeWindow::new(0.0, 10.0).with_grid_points(401)).unwrap();
    assert_eq!(c.rows.iter().map(|r| r.mode).collect::<Vec<_>>(), PreparationMode::ALL);
    let ratio = c.get(PreparationMode::PulseUncorrelated).f_star / c.get(PreparationMode::ProjectiveUncorrelated).f_star;
    assert_eq!(ratio, c.ratio_uncorrelated);

    let spec = SweepSpec {
        variable: Estimator::Temperature,
        values: vec![1.0],
        window: TimeWindow::new(0.0, 10.0).with_grid_points(401),
        modes: PreparationMode::ALL.to_vec(),
    };
    let out = spinprobe::estimation::sweep_parameter(&spec, &p).unwrap();
    assert_eq!(out.records, c.rows);
    let mut csv = Vec::new();
    write_sweep_csv(&mut csv, &p, &out.records).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(ModelParams::from_header_line(text.lines().next().unwrap()).unwrap(), p);
    assert_eq!(text.lines().count(), 6);
}
