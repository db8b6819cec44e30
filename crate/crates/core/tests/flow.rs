use invfactor::algebra::{int, rat};
use invfactor::corpus;
use invfactor::flow::*;
use invfactor::system::Point;
use invfactor::Error;

fn circle_family() -> invfactor::system::PlanarSystem {
    corpus::ellipse_family(&rat(1, 2), &int(-2), &int(1)).0
}

#[test]
fn hamiltonian_energy_is_conserved() {
    let (sys, h) = corpus::cubic_hamiltonian();
    let run = integrate(&sys, (0.5, 0.0), 20.0, 1e-12, &[]).unwrap();
    let h0 = h.eval_f64(0.5, 0.0);
    for &(_, x, y) in &run.trajectory.samples {
        assert!((h.eval_f64(x, y) - h0).abs() < 1e-8);
    }
    let t: Vec<f64> = run.trajectory.samples.iter().map(|s| s.0).collect();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn ellipse_orbit_closes_after_one_period() {
    let sys = circle_family();
    let r = 0.5f64.sqrt();
    let run = integrate(&sys, (r, 0.0), 4.0 * std::f64::consts::PI, 1e-12, &[]).unwrap();
    let (x, y) = run.trajectory.end();
    assert!((x - r).hypot(y) < 1e-7);
}

#[test]
fn singular_point_is_stationary() {
    let (sys, _) = corpus::cubic_hamiltonian();
    let run = integrate(&sys, (0.0, 0.0), 5.0, 1e-10, &[]).unwrap();
    assert!(run.trajectory.samples.iter().all(|s| s.1 == 0.0 && s.2 == 0.0));
}

#[test]
fn rel_tol_range_is_enforced() {
    let (sys, _) = corpus::cubic_hamiltonian();
    assert!(integrate(&sys, (0.5, 0.0), 1.0, 1e-2, &[]).is_err());
    assert!(integrate(&sys, (0.5, 0.0), 1.0, 1e-14, &[]).is_err());
}

#[test]
fn hyperbolic_cycle_return_derivative() {
    let sys = circle_family();
    let r = 0.5f64.sqrt();
    let sec = Section::new(&sys, (r, 0.0), (1.0, 0.0), Half::Negative).unwrap();
    let s = transition_map(&sys, &sec, &sec, 0.0, &FlowSettings::default()).unwrap();
    let expected = (-4.0 * std::f64::consts::PI).exp();
    assert!(s.image.abs() < 1e-10);
    assert!(((s.derivative - expected) / expected).abs() < 1e-6, "{}", s.derivative);
}

#[test]
fn characteristic_exponents() {
    let sys = circle_family();
    let r = 0.5f64.sqrt();
    let sec = Section::new(&sys, (r, 0.0), (1.0, 0.0), Half::Positive).unwrap();
    let e = characteristic_exponent(&sys, (r, 0.0), &sec, &FlowSettings::default()).unwrap();
    assert!((e.exponent + 4.0 * std::f64::consts::PI).abs() < 1e-5);
    assert!((e.period - 4.0 * std::f64::consts::PI).abs() < 1e-8);

    let (ham, _) = corpus::cubic_hamiltonian();
    // oval H = −0.05 crosses the x-axis where x³ − x² + 0.05 = 0, x ∈ (2/3, 1)
    let x0 = bisect(|x| x * x * x - x * x + 0.05, 0.67, 1.0);
    let sec = Section::new(&ham, (x0, 0.0), (1.0, 0.0), Half::Positive).unwrap();
    let e = characteristic_exponent(&ham, (x0, 0.0), &sec, &FlowSettings::default()).unwrap();
    assert!(e.exponent.abs() < 1e-8);
}

#[test]
fn unbounded_orbit_is_not_periodic() {
    let sys = invfactor::corpus::linear_saddle(1, 1);
    let sec = Section::new(&sys, (1.0, 1.0), (0.0, 1.0), Half::Positive).unwrap();
    let e = characteristic_exponent(&sys, (1.0, 1.0), &sec, &FlowSettings::default());
    assert_eq!(e, Err(Error::NotPeriodic));
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) < 0.0) == (f(a) < 0.0) {
            a = m
        } else {
            b = m
        }
    }
    0.5 * (a + b)
}

#[test]
fn homoclinic_loops_follow_their_curves() {
    let (ham, h) = corpus::cubic_hamiltonian();
    let saddle = ham.verify_singular(&Point::exact(int(0), int(0))).unwrap();
    let lp = trace_homoclinic(&ham, &saddle, 1e-6, 1e-3, &FlowSettings::default()).unwrap();
    assert!(lp.samples.iter().all(|s| h.eval_f64(s.1, s.2).abs() < 1e-6));
    assert!(lp.samples.iter().any(|s| s.1 > 0.9));

    let (sys, _) = corpus::nodal_loop_family(1, &corpus::unit(), &corpus::unit()).unwrap();
    let f = corpus::nodal_cubic();
    let saddle = sys.verify_singular(&Point::exact(int(1), int(0))).unwrap();
    let lp = trace_homoclinic(&sys, &saddle, 1e-6, 1e-3, &FlowSettings::default()).unwrap();
    assert!(lp.samples.iter().all(|s| f.eval_f64(s.1, s.2).abs() < 1e-5));
    assert!(lp.samples.iter().any(|s| s.1 < -0.9));

    assert!(trace_homoclinic(&ham, &saddle_of(&ham), 0.0, 1e-3, &FlowSettings::default()).is_err());
}

fn saddle_of(sys: &invfactor::system::PlanarSystem) -> invfactor::system::SingularPoint {
    sys.verify_singular(&Point::exact(int(0), int(0))).unwrap()
}

#[test]
fn beta1_values() {
    let (ham, _) = corpus::cubic_hamiltonian();
    let saddle = saddle_of(&ham);
    let lp = trace_homoclinic(&ham, &saddle, 1e-6, 1e-3, &FlowSettings::default()).unwrap();
    let b = separatrix_quantity_beta1(&ham, &lp, &saddle, 1e-2, &FlowSettings::default()).unwrap();
    assert!(b.value.abs() < 1e-8);

    let (sys, _) = corpus::nodal_loop_family(1, &corpus::unit(), &corpus::unit()).unwrap();
    let saddle = sys.verify_singular(&Point::exact(int(1), int(0))).unwrap();
    let lp = trace_homoclinic(&sys, &saddle, 1e-6, 1e-3, &FlowSettings::default()).unwrap();
    let b = separatrix_quantity_beta1(&sys, &lp, &saddle, 1e-2, &FlowSettings::default()).unwrap();
    assert!(
        b.value.is_finite() && b.value.abs() > 10.0 * b.truncation_error,
        "{b:?}"
    );

    let (andr, _) = corpus::resonant_loop();
    let saddle = saddle_of(&andr);
    assert_eq!(
        separatrix_quantity_beta1(&andr, &lp, &saddle, 1e-2, &FlowSettings::default()),
        Err(Error::DivergentStrongSaddle)
    );
}

#[test]
fn hamiltonian_return_map_is_identity() {
    let (ham, _) = corpus::cubic_hamiltonian();
    let sec = Section::new(&ham, (0.8, 0.0), (1.0, 0.0), Half::Positive)
        .unwrap()
        .with_extent(0.5);
    for k in 0..20 {
        let sigma = -0.1 + 0.25 * k as f64 / 19.0;
        let s = transition_map(&ham, &sec, &sec, sigma, &FlowSettings::default()).unwrap();
        assert!((s.image - sigma).abs() < 1e-7, "σ={sigma} Π={}", s.image);
        assert!((s.derivative - 1.0).abs() < 1e-6);
    }
}

#[test]
fn variational_derivative_matches_finite_differences() {
    let sys = circle_family();
    let r = 0.5f64.sqrt();
    let from = Section::new(&sys, (r, 0.0), (1.0, 0.0), Half::Negative).unwrap();
    let to = Section::new(&sys, (0.0, r), (0.0, 1.0), Half::Negative).unwrap();
    let st = FlowSettings::default();
    for sigma in [0.05, 0.1, 0.2] {
        let s = transition_map(&sys, &from, &to, sigma, &st).unwrap();
        let h = 1e-5;
        let a = transition_map(&sys, &from, &to, sigma + h, &st).unwrap().image;
        let b = transition_map(&sys, &from, &to, sigma - h, &st).unwrap().image;
        let fd = (a - b) / (2.0 * h);
        assert!(((s.derivative - fd) / fd).abs() < 1e-4, "{} vs {}", s.derivative, fd);
        assert!(s.derivative > 0.0);
    }
}

#[test]
fn transition_maps_compose() {
    let sys = circle_family();
    let r = 0.5f64.sqrt();
    let s1 = Section::new(&sys, (r, 0.0), (1.0, 0.0), Half::Negative).unwrap();
    let s2 = Section::new(&sys, (0.0, r), (0.0, 1.0), Half::Negative).unwrap();
    let s3 = Section::new(&sys, (-r, 0.0), (-1.0, 0.0), Half::Negative).unwrap();
    let st = FlowSettings::default();
    let sigma = 0.15;
    let a = transition_map(&sys, &s1, &s2, sigma, &st).unwrap();
    let b = transition_map(&sys, &s2, &s3, a.image, &st).unwrap();
    let c = transition_map(&sys, &s1, &s3, sigma, &st).unwrap();
    assert!((b.image - c.image).abs() < 2e-10 * c.image.abs().max(1.0));
    assert!(((a.derivative * b.derivative - c.derivative) / c.derivative).abs() < 1e-8);
}

#[test]
fn section_rejects_singular_or_tangent_bases() {
    let (ham, _) = corpus::cubic_hamiltonian();
    assert!(Section::new(&ham, (0.0, 0.0), (1.0, 0.0), Half::Positive).is_err());
    // at (0.8, 0) the field is vertical
    assert!(Section::new(&ham, (0.8, 0.0), (0.0, 1.0), Half::Positive).is_err());
}

#[test]
fn csv_exports_have_headers() {
    let (ham, _) = corpus::cubic_hamiltonian();
    let run = integrate(&ham, (0.5, 0.0), 1.0, 1e-10, &[]).unwrap();
    assert!(run.trajectory.to_csv().starts_with("t,x,y\n"));
    let s = MapSample {
        sigma: 0.1,
        image: 0.1,
        derivative: 1.0,
        time: 2.0,
    };
    assert_eq!(map_samples_csv(&[s]).lines().count(), 2);
}
