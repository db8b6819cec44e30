use std::f64::consts::PI;

use invfactor::algebra::{int, rat};
use invfactor::corpus;
use invfactor::curvilinear::*;
use invfactor::flow::{FlowSettings, Half, Section};
use invfactor::iif::{symbolic_multiplicity, InverseIntegratingFactor};
use invfactor::Error;
use rand::{Rng, SeedableRng};

const EX1: EllipseParams = EllipseParams {
    lambda: 0.5,
    m1: -2.0,
    m2: 1.0,
};

fn ex1() -> (
    invfactor::system::PlanarSystem,
    InverseIntegratingFactor,
    CurvilinearFrame,
) {
    let (sys, v, _) = corpus::ellipse_family(&rat(1, 2), &int(-2), &int(1));
    (sys, v, EX1.cycle_frame().unwrap())
}

/// The return map contracts by e^{−4π}, so the image sits ~1e−6 times closer
/// to the cycle than σ; the tightest admissible tolerance keeps its relative
/// error small.
fn ex1_settings() -> FlowSettings {
    FlowSettings::with_rel_tol(1e-13)
}

fn interior_oval() -> (
    invfactor::system::PlanarSystem,
    InverseIntegratingFactor,
    CurvilinearFrame,
) {
    let (sys, h) = corpus::cubic_hamiltonian();
    let sec = Section::new(&sys, (0.8, 0.0), (1.0, 0.0), Half::Positive).unwrap();
    let frame = CurvilinearFrame::from_periodic_orbit(&sys, (0.8, 0.0), &sec, 128, &FlowSettings::default()).unwrap();
    (sys, InverseIntegratingFactor::new(h), frame)
}

fn roundtrip(frame: &CurvilinearFrame, seed: u64) {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let (a, b) = frame.s_range;
    for _ in 0..200 {
        let s = rng.gen_range(a + 0.05 * (b - a)..b - 0.05 * (b - a));
        let n = rng.gen_range(-0.9..0.9) * frame.tube_radius.min(0.2);
        let pt = frame.chart(s, n);
        let (s1, n1) = to_curvilinear(frame, pt).unwrap();
        let back = frame.chart(s1, n1);
        assert!((back.0 - pt.0).hypot(back.1 - pt.1) < 1e-9);
        assert!(
            (s1 - s).abs() < 1e-8 && (n1 - n).abs() < 1e-8,
            "({s},{n}) -> ({s1},{n1})"
        );
    }
}

#[test]
fn chart_roundtrips() {
    roundtrip(&ex1().2, 1);
    roundtrip(&nodal_loop_frame(), 2);
    roundtrip(&hamiltonian_loop_frame(), 3);
    roundtrip(&interior_oval().2, 4);
}

#[test]
fn on_orbit_points_have_zero_offset() {
    let frame = ex1().2;
    for s in [0.0, 1.0, 3.0, 6.0] {
        let (s1, n1) = to_curvilinear(&frame, frame.chart(s, 0.0)).unwrap();
        assert!((s1 - s).abs() < 1e-12 && n1.abs() < 1e-12);
    }
}

#[test]
fn ellipse_chart_matches_closed_form() {
    for (m1, m2) in [(-2.0f64, 1.0f64), (-3.0, 2.0), (-0.5, 0.7)] {
        let params = EllipseParams { lambda: 1.0, m1, m2 };
        let frame = params.cycle_frame().unwrap();
        let k = (-m1 * m2).sqrt();
        for (s, n) in [(0.3, 0.05), (2.0, -0.04), (5.0, 0.02)] {
            let pt = (
                (m2.sqrt() - n) * f64::cos(s) / k,
                (1.0 - m2.sqrt() * n) * f64::sin(s) / k,
            );
            let (s1, n1) = to_curvilinear(&frame, pt).unwrap();
            assert!((s1 - s).abs() < 1e-12 && (n1 - n).abs() < 1e-12);
        }
    }
}

#[test]
fn points_outside_the_tube_are_rejected() {
    let frame = ex1().2;
    assert_eq!(to_curvilinear(&frame, (0.0, 0.0)), Err(Error::OutsideTube));
    assert_eq!(to_curvilinear(&frame, (5.0, 0.0)), Err(Error::OutsideTube));
}

#[test]
fn fields_on_the_orbit() {
    let cases = [ex1(), interior_oval()];
    for (sys, _, frame) in &cases {
        for k in 0..16 {
            let s = frame.length() * k as f64 / 16.0;
            let ff = frame_fields(frame, sys, s, 0.0).unwrap();
            let g = frame.jet(s);
            assert!(ff.n_dot.abs() < 1e-10, "N = {}", ff.n_dot);
            assert!((ff.jac - (g[2] * g[2] + g[3] * g[3])).abs() < 1e-12);
            assert!(ff.s_dot.abs() > 1e-3);
        }
    }
    let (ham, _) = corpus::cubic_hamiltonian();
    let frame = hamiltonian_loop_frame();
    for k in 1..40 {
        let s = -1.0 + 2.0 * k as f64 / 40.0;
        let ff = frame_fields(&frame, &ham, s, 0.0).unwrap();
        assert!(ff.n_dot.abs() < 1e-12 && ff.s_dot != 0.0);
    }
}

#[test]
fn tilde_v_closed_form_on_the_ellipse_section() {
    let (sys, v, frame) = ex1();
    for n in [-0.2, -0.05, 0.01, 0.1, 0.25] {
        let got = tilde_v(&frame, &sys, &v, 0.0, n).unwrap();
        let want = EX1.tilde_v_at_zero(n);
        assert!(
            (got - want).abs() < 1e-12 * want.abs().max(1.0),
            "n={n}: {got} vs {want}"
        );
    }
}

#[test]
fn tilde_v_vanishes_on_zero_set_orbits_and_is_periodic() {
    let (sys, v, frame) = ex1();
    for s in [0.0, 1.0, 4.0] {
        assert!(tilde_v(&frame, &sys, &v, s, 0.0).unwrap().abs() < 1e-14);
        for n in [-0.1, 0.07] {
            let a = tilde_v(&frame, &sys, &v, s, n).unwrap();
            let b = tilde_v(&frame, &sys, &v, s + frame.length(), n).unwrap();
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300));
        }
    }
    let (sys, v, frame) = interior_oval();
    for s in [0.0, 0.7, 2.2] {
        let a = tilde_v(&frame, &sys, &v, s, 0.02).unwrap();
        let b = tilde_v(&frame, &sys, &v, s + frame.length(), 0.02).unwrap();
        assert!((a - b).abs() <= 1e-10 * a.abs());
    }
}

fn interior_s(frame: &CurvilinearFrame, count: usize) -> Vec<f64> {
    let (a, b) = frame.s_range;
    (1..count).map(|k| a + (b - a) * k as f64 / count as f64).collect()
}

#[test]
fn multiplicities_of_corpus_orbits() {
    let (sys, v, frame) = ex1();
    let est = numeric_multiplicity(&frame, &sys, &v, &interior_s(&frame, 12), &default_n_grid()).unwrap();
    assert_eq!(est.m, 1);
    assert!(est.fit_residual < 0.05);
    assert_eq!(
        symbolic_multiplicity(&v, &corpus::ellipse_family(&rat(1, 2), &int(-2), &int(1)).2).unwrap(),
        1
    );

    let frame = nodal_loop_frame();
    for m in 1..=3 {
        let (sys, v) = corpus::nodal_loop_family(m, &corpus::unit(), &corpus::unit()).unwrap();
        let est = numeric_multiplicity(&frame, &sys, &v, &interior_s(&frame, 12), &default_n_grid()).unwrap();
        assert_eq!(est.m, m);
        assert_eq!(symbolic_multiplicity(&v, &corpus::nodal_cubic()).unwrap(), m);
        // the leading coefficient keeps one sign and never vanishes
        let sign = est.leading_coeff_samples[0].1.signum();
        assert!(est
            .leading_coeff_samples
            .iter()
            .all(|&(_, c)| c.abs() > 0.0 && c.signum() == sign));
    }

    let (sys, v, frame) = interior_oval();
    let est = numeric_multiplicity(&frame, &sys, &v, &interior_s(&frame, 8), &default_n_grid()).unwrap();
    assert_eq!(est.m, 0);
    let h0 = v.v.eval_f64(0.8, 0.0);
    assert!(est
        .leading_coeff_samples
        .iter()
        .all(|&(_, c)| ((c - h0) / h0).abs() < 1e-2));
}

#[test]
fn multiplicity_fit_rejects_bad_grids() {
    let (sys, v, frame) = ex1();
    assert!(numeric_multiplicity(&frame, &sys, &v, &[1.0], &[1e-3, 1e-2]).is_err());
    assert!(numeric_multiplicity(&frame, &sys, &v, &[], &default_n_grid()).is_err());
}

#[test]
fn geometric_grid_endpoints() {
    let g = default_n_grid();
    assert_eq!(g.len(), 12);
    assert!((g[0] - 1e-4).abs() < 1e-18 && (g[11] - 1e-2).abs() < 1e-15);
    assert!(g.windows(2).all(|w| (w[1] / w[0] - g[1] / g[0]).abs() < 1e-12));
}

#[test]
fn transition_identity_on_the_hyperbolic_cycle() {
    let (sys, v, frame) = ex1();
    let grid: Vec<f64> = (1..=20).map(|k| 0.01 * k as f64).collect();
    let check = verify_transition_identity(&frame, &sys, &v, &grid, MapRoute::Planar, &ex1_settings()).unwrap();
    assert!(check.max_residual < 1e-6, "{:?}", check.rows);
    let chart = verify_transition_identity(&frame, &sys, &v, &grid, MapRoute::Chart, &ex1_settings()).unwrap();
    assert!(chart.max_residual < 1e-6, "{:?}", chart.rows);
    for (p, q) in check.rows.iter().zip(&chart.rows) {
        assert!(((p.image - q.image) / q.image).abs() < 1e-5);
    }

    let zero =
        verify_transition_identity(&frame, &sys, &v, &[0.0], MapRoute::Planar, &FlowSettings::default()).unwrap();
    assert!(zero.rows[0].lhs.abs() < 1e-12 && zero.rows[0].rhs.abs() < 1e-12);
    assert!(check.to_csv().starts_with("sigma,image,derivative,lhs,rhs,residual\n"));
}

#[test]
fn transition_identity_reduces_to_periodicity_for_identity_maps() {
    let (sys, v, frame) = interior_oval();
    let grid = [-0.05, -0.02, 0.01, 0.03, 0.06];
    let check =
        verify_transition_identity(&frame, &sys, &v, &grid, MapRoute::Planar, &FlowSettings::default()).unwrap();
    for r in &check.rows {
        assert!((r.image - r.sigma).abs() < 1e-7 && (r.derivative - 1.0).abs() < 1e-6);
    }
    assert!(check.max_residual < 1e-6);
}

#[test]
fn transition_identity_along_an_open_loop_arc() {
    let (sys, v) = corpus::nodal_loop_family(2, &corpus::unit(), &corpus::unit()).unwrap();
    let frame = CurvilinearFrame::polynomial(vec![-1.0, 0.0, 1.0], vec![0.0, 2.0, 0.0, -1.0], (-1.0, 1.0)).unwrap();
    let check = verify_transition_identity(
        &frame,
        &sys,
        &v,
        &[0.005, 0.01, 0.02],
        MapRoute::Planar,
        &FlowSettings::default(),
    )
    .unwrap();
    assert!(check.max_residual < 1e-6, "{:?}", check.rows);
}

#[test]
fn implicit_return_map() {
    for sigma in [0.1, 0.4, 0.9] {
        assert!(implicit_poincare_check(sigma, sigma, &EX1, 1.0).unwrap() < 1e-15);
    }
    let k0 = EX1.k0().unwrap();
    assert!((k0 - (2.0 * PI).exp()).abs() < 1e-9);

    let (sys, v, frame) = ex1();
    let grid: Vec<f64> = (1..=20).map(|k| 0.01 * k as f64).collect();
    let check = verify_transition_identity(&frame, &sys, &v, &grid, MapRoute::Planar, &ex1_settings()).unwrap();
    for r in &check.rows {
        let res = implicit_poincare_check(r.sigma, r.image, &EX1, k0).unwrap();
        assert!(res < 1e-5, "σ={} Π={} residual {res}", r.sigma, r.image);
    }
    assert!(implicit_poincare_check(0.0, 0.1, &EX1, k0).is_err());
    assert!(implicit_poincare_check(0.5, 1.5, &EX1, k0).is_err());
    assert!(EllipseParams {
        lambda: 1.0,
        m1: -1.0,
        m2: 1.0
    }
    .k0()
    .is_err());
}

#[test]
fn scalar_iif_invariant_along_psi_flow() {
    let (sys, v, frame) = ex1();
    for n0 in [0.02, -0.03, 0.1] {
        let dev = psi_invariance_deviation(&frame, &sys, &v, n0, 16).unwrap();
        assert!(dev < 1e-6, "n0={n0}: {dev}");
    }
    let (sys, v) = corpus::nodal_loop_family(1, &corpus::unit(), &corpus::unit()).unwrap();
    let frame = CurvilinearFrame::polynomial(vec![-1.0, 0.0, 1.0], vec![0.0, 2.0, 0.0, -1.0], (-1.2, 1.2)).unwrap();
    assert!(psi_invariance_deviation(&frame, &sys, &v, 1e-5, 12).unwrap() < 1e-6);
}

#[test]
fn irregular_parameterizations_are_rejected() {
    assert!(CurvilinearFrame::polynomial(vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 1.0], (-1.0, 1.0)).is_err());
    assert!(CurvilinearFrame::ellipse((0.0, 0.0), 0.0, 1.0).is_err());
    assert!(EllipseParams {
        lambda: 1.0,
        m1: 1.0,
        m2: 1.0
    }
    .cycle_frame()
    .is_err());
}

#[test]
fn frame_csv_has_header() {
    let csv = frame_csv(&hamiltonian_loop_frame(), 10);
    assert!(csv.starts_with("s,x,y\n"));
    assert_eq!(csv.lines().count(), 12);
}
