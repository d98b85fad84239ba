use std::sync::OnceLock;

use kummer_pf::operator::build_canonical_system;
use kummer_pf::pfaffian::{derive_pfaffian, Basis, PfaffianSystem};
use kummer_pf::transport::{
    initial_state, max_abs_diff, monodromy, series_vs_transport, transport, CMatrix, CompiledOmega, Path, Point,
    Segment, TransportConfig, TransportError,
};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn system() -> &'static (PfaffianSystem, CompiledOmega) {
    static S: OnceLock<(PfaffianSystem, CompiledOmega)> = OnceLock::new();
    S.get_or_init(|| {
        let sys = derive_pfaffian(&build_canonical_system().operators, &Basis::P2.monomials()).unwrap();
        let om = CompiledOmega::new(&sys);
        (sys, om)
    })
}

const A: Point = [
    Complex64::new(1e-3, 0.0),
    Complex64::new(6e-4, 2e-4),
    Complex64::new(4e-4, -1e-4),
];
const B: Point = [
    Complex64::new(5e-4, 3e-4),
    Complex64::new(1e-3, 0.0),
    Complex64::new(3e-4, 2e-4),
];

#[test]
fn initial_state_at_origin_and_on_axis() {
    let (sys, _) = system();
    let y = initial_state(sys, &[c(0.0, 0.0); 3], 12, 1e-30).unwrap();
    assert_eq!(y[(0, 0)], c(1.0, 0.0));
    assert!(y.iter().skip(1).all(|z| *z == c(0.0, 0.0)));
    let y = initial_state(sys, &[c(1e-3, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 12, 1e-30).unwrap();
    assert!((y[(0, 0)].re - 1.0 - 2.5e-4).abs() < 1e-6);
    assert_eq!(y[(2, 0)], c(0.0, 0.0));
    assert_eq!(y[(3, 0)], c(0.0, 0.0));
}

#[test]
fn series_and_transport_agree() {
    let (sys, om) = system();
    let cmp = series_vs_transport(sys, om, &A, &B, 16, &TransportConfig::with_tol(1e-10)).unwrap();
    println!("discrepancy {:e}, {:?}", cmp.discrepancy, cmp.stats);
    assert!(cmp.discrepancy < 1e-8);
    let same = series_vs_transport(sys, om, &A, &A, 16, &TransportConfig::with_tol(1e-10)).unwrap();
    assert_eq!(same.discrepancy, 0.0);
}

#[test]
fn series_and_transport_agree_in_the_r_direction() {
    let (sys, om) = system();
    let a = [c(2e-3, 1e-3), c(1e-3, -1e-3), c(2e-3, 5e-4)];
    let b = [c(1e-3, 1e-3), c(2e-3, 0.0), c(5e-3, -1e-3)];
    let cmp = series_vs_transport(sys, om, &a, &b, 20, &TransportConfig::with_tol(1e-10)).unwrap();
    println!("discrepancy {:e}", cmp.discrepancy);
    assert!(cmp.discrepancy < 1e-6);
}

#[test]
fn path_on_a_divisor_is_rejected() {
    let (sys, om) = system();
    let a = [c(1e-3, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let b = [c(0.0, 0.0), c(1e-3, 0.0), c(0.0, 0.0)];
    let err = series_vs_transport(sys, om, &a, &b, 16, &TransportConfig::with_tol(1e-10)).unwrap_err();
    assert!(matches!(err, TransportError::Clearance { .. }));
}

fn square(tol_side: f64) -> Path {
    Path::rectangle([c(0.3, 0.0), c(0.2, 0.0), c(0.1, 0.0)], 0, c(tol_side, 0.0), 1, c(0.0, tol_side))
}

#[test]
fn contractible_loop_returns_identity() {
    let (_, om) = system();
    let tol = 1e-10;
    let m = monodromy(om, &square(0.02), &TransportConfig::with_tol(tol)).unwrap();
    println!("defect {:e}, liouville {:e}", m.identity_defect, m.liouville_relative_error);
    assert!(m.identity_defect < 1e2 * tol);
    assert!(m.liouville_relative_error < 1e-6);
}

#[test]
fn refining_tolerance_shrinks_the_loop_defect() {
    let (_, om) = system();
    let path = Path::rectangle([c(0.3, 0.0), c(0.2, 0.0), c(0.1, 0.0)], 0, c(0.05, 0.02), 2, c(0.01, 0.03));
    let coarse = monodromy(om, &path, &TransportConfig::with_tol(1e-6)).unwrap().identity_defect;
    let fine = monodromy(om, &path, &TransportConfig::with_tol(1e-8)).unwrap().identity_defect;
    println!("coarse {coarse:e} fine {fine:e}");
    assert!(fine * 10.0 <= coarse.max(1e-13));
}

#[test]
fn path_and_reversal_compose_to_identity() {
    let (_, om) = system();
    let a = [c(0.3, 0.0), c(0.2, 0.0), c(0.1, 0.0)];
    let b = [c(0.32, 0.01), c(0.18, -0.02), c(0.12, 0.01)];
    let path = Path::new(vec![Segment::line(a, b)]);
    let tol = 1e-10;
    let cfg = TransportConfig::with_tol(tol);
    let there = transport(om, &path, CMatrix::identity(5, 5), &cfg).unwrap();
    let back = transport(om, &path.reversed(), there.state, &cfg).unwrap();
    assert!(max_abs_diff(&back.state, &CMatrix::identity(5, 5)) < 10.0 * tol);
}

#[test]
fn loop_around_r_zero_has_unimodular_determinant() {
    let (_, om) = system();
    let center = [c(0.3, 0.0), c(0.2, 0.0), c(0.0, 0.0)];
    let path = Path::new(vec![Segment::circle(center, 0.01, 2, 1.0)]);
    let cfg = TransportConfig::with_tol(1e-10);
    let m = monodromy(om, &path, &cfg).unwrap();
    println!("det {} |det| {} eig {:?}", m.det, m.abs_det, m.eigenvalues);
    assert!((m.abs_det - 1.0).abs() < 1e-6);
    assert!(m.liouville_relative_error < 1e-6);
    let inv = monodromy(om, &path.reversed(), &cfg).unwrap();
    assert!(max_abs_diff(&(&m.matrix * &inv.matrix), &CMatrix::identity(5, 5)) < 1e-7);
}

#[test]
fn near_identity_monodromy_has_eigenvalues_near_one() {
    let (_, om) = system();
    let path = Path::rectangle([c(0.3, 0.0), c(0.2, 0.0), c(0.1, 0.0)], 0, c(0.02, 0.0), 1, c(0.02, 0.0));
    let m = monodromy(om, &path, &TransportConfig::with_tol(1e-10)).unwrap();
    let eig = m.eigenvalues.expect("eigenvalues converge");
    assert_eq!(eig.len(), 5);
    assert!(eig.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-6));
}

#[test]
fn homotopic_paths_agree() {
    let (_, om) = system();
    let a = [c(0.3, 0.0), c(0.2, 0.0), c(0.1, 0.0)];
    let via_p = [c(0.33, 0.01), c(0.2, 0.0), c(0.1, 0.0)];
    let via_q = [c(0.3, 0.0), c(0.22, -0.01), c(0.1, 0.0)];
    let b = [c(0.33, 0.01), c(0.22, -0.01), c(0.1, 0.0)];
    let tol = 1e-10;
    let cfg = TransportConfig::with_tol(tol);
    let run = |mid: Point| {
        let path = Path::new(vec![Segment::line(a, mid), Segment::line(mid, b)]);
        transport(om, &path, CMatrix::identity(5, 5), &cfg).unwrap().state
    };
    assert!(max_abs_diff(&run(via_p), &run(via_q)) < 1e2 * tol);
}
