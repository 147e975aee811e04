use super::*;
use crate::dirac::{dirac_residual, reduce_to_schrodinger};
use crate::numerics::build_grid;
use crate::susy_core::{chain_wronskian, schrodinger_residual};

fn identity_error(sys: &ModelSystem) -> f64 {
    let u = reduce_to_schrodinger(&sys.potential().unwrap());
    let exact = sys.u0();
    (0..u.len())
        .map(|i| (u.value(i) - exact.value(i)).abs() / exact.value(i).abs().max(1.0))
        .fold(0.0, f64::max)
}

#[test]
fn reduction_identity_all_systems() {
    for sys in [
        coulomb_system(1, 1.0).unwrap(),
        coulomb_system(2, 1.0).unwrap(),
        oscillator_system(-5.0, 1.0, 0.0, 1.0).unwrap(),
        oscillator_system(-1.0, 1.0, 0.0, 1.0).unwrap(),
        oscillator_system(-9.0, 1.0, 0.0, 1.0).unwrap(),
        trig_system(1.0).unwrap(),
    ] {
        let e = identity_error(&sys);
        assert!(e < 1e-9, "{}: {e:e}", sys.name());
    }
}

#[test]
fn rational_oscillator_members() {
    let rational: [(f64, fn(f64) -> f64); 3] = [
        (-1.0, |x| x),
        (-5.0, |x| x + 4.0 * x / (2.0 * x * x + 1.0)),
        // the sign of 3x is fixed by q² + q' = x² + 9 at x = 0
        (-9.0, |x| {
            x + 8.0 * (2.0 * x.powi(3) + 3.0 * x) / (4.0 * x.powi(4) + 12.0 * x * x + 3.0)
        }),
    ];
    for (a, f) in rational {
        let sys = oscillator_system(a, 1.0, 0.0, 1.0).unwrap();
        let q = sys.q0().unwrap();
        for i in (0..q.len()).step_by(37) {
            let x = sys.grid().x(i);
            assert!(
                (q.value(i) - f(x)).abs() < 1e-9 * f(x).abs().max(1.0),
                "A = {a}, x = {x}"
            );
        }
    }
    // A = 3 makes the even zero-energy solution change sign
    assert!(matches!(
        oscillator_system(3.0, 1.0, 0.0, 1.0),
        Err(Error::NodalGenerator { .. })
    ));
}

#[test]
fn printed_levels() {
    let c = coulomb_system(1, 1.0).unwrap();
    assert!((c.dirac_energy(0) - 1.75f64.sqrt()).abs() < 1e-15);
    let p = c.psi1(0).unwrap();
    let i = c.grid().index_of(3.0);
    let x = c.grid().x(i);
    assert!((p.value(i) - x * x * (-x / 2.0).exp()).abs() < 1e-14);
    let u = c.u0();
    assert!((u.value(i) - (2.0 / (x * x) - 2.0 / x + 1.0)).abs() < 1e-14);
    let q = c.q0().unwrap();
    let x_max = c.grid().x(q.len() - 1);
    assert!((q.value(q.len() - 1) - (1.0 - 1.0 / x_max)).abs() < 1e-15);

    let t = trig_system(1.0).unwrap();
    assert!((t.dirac_energy(0) - 26f64.sqrt()).abs() < 1e-14);
    let (p1, p2) = (t.psi1(0).unwrap(), t.psi2(0).unwrap());
    let k = t.grid().index_of(0.7);
    let x = t.grid().x(k);
    assert!((p1.value(k) - x.cos().powi(3) * x.sin().powi(2)).abs() < 1e-15);
    assert!(
        (p2.value(k) - 5.0 * x.cos().powi(2) * x.sin().powi(3) / (1.0 + 26f64.sqrt())).abs()
            < 1e-15
    );
    let u = t.u0();
    let mid = t.grid().index_of(std::f64::consts::FRAC_PI_4);
    let xm = t.grid().x(mid);
    assert!((u.value(mid) - 16.0).abs() < 1e-12 + 100.0 * (xm - std::f64::consts::FRAC_PI_4).abs());

    let o = oscillator_system(-5.0, 1.0, 0.0, 1.0).unwrap();
    for n in 0..4 {
        assert!((o.dirac_energy(n) - (2.0 * n as f64 + 7.0).sqrt()).abs() < 1e-14);
    }
}

#[test]
fn eigenfunctions_solve_the_schrodinger_equation() {
    for sys in [
        coulomb_system(1, 1.0).unwrap(),
        coulomb_system(2, 1.0).unwrap(),
        oscillator_system(-5.0, 1.0, 0.0, 1.0).unwrap(),
        trig_system(1.0).unwrap(),
    ] {
        let u = sys.u0();
        for n in 0..4 {
            let r = schrodinger_residual(&sys.psi1(n).unwrap(), &u, sys.epsilon(n));
            assert!(r < 1e-8, "{} n = {n}: {r:e}", sys.name());
        }
    }
}

#[test]
fn printed_spinors_satisfy_dirac() {
    for sys in [
        coulomb_system(1, 1.0).unwrap(),
        coulomb_system(2, 0.5).unwrap(),
        oscillator_system(-5.0, 1.0, 0.0, 1.0).unwrap(),
        trig_system(1.0).unwrap(),
        trig_system(2.5).unwrap(),
    ] {
        let q = sys.q0().unwrap();
        for n in 0..4 {
            let s = sys.eigenspinor(n).unwrap();
            let r = dirac_residual(&s, &q) / s.psi1.max_abs().max(s.psi2.max_abs());
            assert!(r < 1e-9, "{} n = {n}: {r:e}", sys.name());
        }
    }
}

#[test]
fn eigenfunctions_are_orthogonal() {
    for sys in [
        coulomb_system(1, 1.0).unwrap(),
        oscillator_system(-5.0, 1.0, 0.0, 1.0).unwrap(),
        trig_system(1.0).unwrap(),
    ] {
        let f: Vec<_> = (0..3).map(|n| sys.psi1(n).unwrap()).collect();
        let norm = |a: &SampledFunction| crate::numerics::integrate_all(&a.mul(a).unwrap()).sqrt();
        for i in 0..3 {
            for j in 0..i {
                let dot = crate::numerics::integrate_all(&f[i].mul(&f[j]).unwrap())
                    / (norm(&f[i]) * norm(&f[j]));
                assert!(dot.abs() < 1e-6, "{} ({i},{j}): {dot:e}", sys.name());
            }
        }
    }
}

#[test]
fn gamma_ratio_selects_left_decay() {
    let sys = oscillator_system(-5.0, 1.0, 0.0, 1.0).unwrap();
    let lambda = 9.1;
    let c2 = oscillator_gamma_ratio(-5.0, lambda).unwrap();
    let u = oscillator_u0(&sys, lambda).unwrap();
    let z = sys.grid().index_of(0.0);
    assert!((u.value(z) - 1.0).abs() < 1e-15);
    assert!(
        (u.deriv(z) - c2).abs() < 1e-6 * c2.abs().max(1.0),
        "{} vs {c2}",
        u.deriv(z)
    );
    // closed form with the same weights on a moderate window
    let a = (1.0 - lambda + 5.0) / 4.0;
    let b = (3.0 - lambda + 5.0) / 4.0;
    for x in [-3.0, -1.5, 0.5, 2.0] {
        let i = sys.grid().index_of(x);
        let x = sys.grid().x(i);
        let exact = (-x * x / 2.0).exp()
            * (crate::specfun::hyp1f1(a, 0.5, x * x).unwrap()
                + c2 * x * crate::specfun::hyp1f1(b, 1.5, x * x).unwrap());
        assert!(
            (u.value(i) - exact).abs() < 1e-7 * exact.abs().max(1.0),
            "x = {x}"
        );
    }
}

#[test]
fn insertion_chain_and_b_range() {
    let sys = oscillator_system(-5.0, 1.0, 0.0, 1.0).unwrap();
    let chain = oscillator_insertion_setup(&sys, 9.1, -0.01).unwrap();
    assert!(chain.max_residual() < 1e-6);
    let w = chain_wronskian(&chain, 1e-10).unwrap();
    assert!(w.nodeless_interior);
    // W + B with B between 0 and ∫u0² has a zero
    assert!(matches!(
        oscillator_insertion_setup(&sys, 9.1, 1.0),
        Err(Error::InadmissibleB { .. })
    ));
}

#[test]
fn coulomb_deletion_wronskian() {
    let sys = coulomb_system(1, 1.0).unwrap();
    let (chain, w0) = coulomb_deletion_setup(&sys, 0).unwrap();
    assert_eq!(w0, 0.0);
    let w = chain_wronskian(&chain, 1e-10).unwrap();
    assert!(w.nodeless_interior);
    for i in 1..w.w.len() {
        assert!(w.w.value(i) < 0.0);
        assert!((w.w.deriv(i) + chain.u0().value(i).powi(2)).abs() < 1e-10);
    }
    let total = crate::numerics::integrate_all(&chain.u0().mul(chain.u0()).unwrap());
    let bad = coulomb_deletion_chain(&sys, 0, 0.5 * total).unwrap();
    let wb = chain_wronskian(&bad, 1e-10).unwrap();
    assert!(!wb.nodeless_interior);
    assert_eq!(wb.interior_zero_positions().len(), 1);
}

#[test]
fn trig_chain_matches_printed_members() {
    let sys = trig_system(1.0).unwrap();
    let chain = trig_third_order_setup(&sys).unwrap();
    assert!(chain.max_residual() < 1e-7, "{:?}", chain.residuals());
    let g = sys.grid();
    for k in 1..=20 {
        let i = g.index_of(0.05 + 1.45 * k as f64 / 21.0);
        let x = g.x(i);
        let (u1, u2) = (trig_printed_u1(x), trig_printed_u2(x));
        assert!(
            (chain.member(1).value(i) + u1).abs() < 1e-6,
            "u1 at {x}: {} vs {}",
            chain.member(1).value(i),
            -u1
        );
        assert!(
            (chain.member(2).value(i) - u2).abs() < 1e-6,
            "u2 at {x}: {} vs {u2}",
            chain.member(2).value(i)
        );
    }
}

#[test]
fn grid_overrides_are_checked() {
    let g = build_grid(-1.0, 1.0, 101, false, false, 0.0).unwrap();
    assert!(coulomb_system(1, 1.0)
        .unwrap()
        .with_grid(g.clone())
        .is_err());
    assert!(trig_system(1.0).unwrap().with_grid(g.clone()).is_err());
    assert!(oscillator_system(-5.0, 1.0, 0.0, 1.0)
        .unwrap()
        .with_grid(g)
        .is_ok());
    assert!(coulomb_system(0, 1.0).is_err());
    assert!(trig_system(-1.0).is_err());
}

#[test]
fn params_round_trip_through_json() {
    let p = SystemParams::Oscillator {
        a: -5.0,
        c1: 1.0,
        c2: 0.0,
    };
    let s = serde_json::to_string(&p).unwrap();
    assert_eq!(serde_json::from_str::<SystemParams>(&s).unwrap(), p);
    let t: SystemParams = serde_json::from_str(r#"{"name":"oscillator","a":-5}"#).unwrap();
    assert_eq!(t, p);
    let c: SystemParams = serde_json::from_str(r#"{"name":"coulomb","ell":2}"#).unwrap();
    assert_eq!(c, SystemParams::Coulomb { ell: 2 });
}
