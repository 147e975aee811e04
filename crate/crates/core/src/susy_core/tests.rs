use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::numerics::{
    build_grid, fd_derivative, Anchor, Grid, OdeContext, SampledFunction, Scalar,
};

fn free(g: &Arc<Grid>) -> SampledFunction {
    SampledFunction::zero(g.clone())
}

fn with_ctx(f: SampledFunction, coeff: f64) -> SampledFunction {
    let n = f.len();
    f.with_ode(OdeContext {
        coeff: vec![coeff; n].into(),
        inhom: None,
    })
    .unwrap()
}

/// `max |f'' − k f|` on the interior with `f''` from finite differences of `f'`.
fn fd_residual(f: &SampledFunction, k: &[f64], skip: usize) -> f64 {
    let fpp = fd_derivative(f.derivs(), f.grid().step(), 1).unwrap();
    (skip..f.len() - skip)
        .map(|i| (fpp[i] - k[i] * f.value(i)).abs())
        .fold(0.0, f64::max)
}

/// Chain on `u0 = cosh x` at `λ = −1`; both constant sets give nodeless Wronskians.
fn cosh_chain(order: usize, consts: &[f64]) -> JordanChain {
    let g = build_grid(-1.0, 1.0, 2001, false, false, 0.0).unwrap();
    let u0 = SampledFunction::from_dual(g.clone(), |x| (x.exp() + (-x).exp()) * 0.5);
    chain_from_u0_integral(
        &u0,
        &free(&g),
        -1.0,
        order,
        None,
        consts,
        &IntegralOptions::default(),
    )
    .unwrap()
}

#[test]
fn partner_of_exponential() {
    let g = build_grid(0.0, 1.0, 401, false, false, 0.0).unwrap();
    let u0 = SampledFunction::from_dual(g.clone(), |x| x.exp());
    let v0 = partner_solution_v0(&u0, Anchor::Midpoint).unwrap();
    let xm = g.x(g.midpoint_index());
    for i in 0..g.len() {
        let x = g.x(i);
        let exact = ((x - 2.0 * xm).exp() - (-x).exp()) / 2.0;
        assert!((v0.value(i) - exact).abs() < 1e-12);
        let w = u0.value(i) * v0.deriv(i) - u0.deriv(i) * v0.value(i);
        assert!((w - 1.0).abs() < 1e-12);
    }
}

#[test]
fn partner_of_sine_is_minus_cosine() {
    let g = build_grid(0.0, PI, 2001, true, true, 1e-3).unwrap();
    let u0 = SampledFunction::from_dual(g.clone(), |x| x.sin());
    let v0 = partner_solution_v0(&u0, Anchor::Index(1000)).unwrap();
    // the quadrature of 1/sin² is unresolved within a few steps of the ends
    for i in (100..g.len() - 100).step_by(50) {
        let x = g.x(i);
        assert!((v0.value(i) + x.cos()).abs() < 1e-8, "x={x}");
        let w = u0.value(i) * v0.deriv(i) - u0.deriv(i) * v0.value(i);
        assert!((w - 1.0).abs() < 1e-8);
    }
}

#[test]
fn partner_through_nodes_needs_ode() {
    let g = build_grid(0.0, 3.0 * PI, 3001, true, true, 1e-3).unwrap();
    let bare = SampledFunction::from_dual(g.clone(), |x| x.sin());
    assert!(matches!(
        partner_solution_v0(&bare, Anchor::Midpoint),
        Err(crate::Error::SingularChain { .. })
    ));
    let u0 = with_ctx(bare, -1.0);
    let v0 = partner_solution_v0(&u0, Anchor::Midpoint).unwrap();
    let k = vec![-1.0; g.len()];
    assert!(fd_residual(&v0, &k, 3) < 1e-6);
    for i in 0..g.len() {
        let w = u0.value(i) * v0.deriv(i) - u0.deriv(i) * v0.value(i);
        assert!((w - 1.0).abs() < 1e-8);
    }
}

#[test]
fn integral_chain_matches_closed_form_first_member() {
    // for u0 = sin x at λ = 1, x cos x / 2 solves the j = 1 relation
    let g = build_grid(0.2, 3.0, 2801, false, false, 0.0).unwrap();
    let u0 = SampledFunction::from_dual(g.clone(), |x| x.sin());
    let chain = chain_from_u0_integral(
        &u0,
        &free(&g),
        1.0,
        3,
        None,
        &[0.3, -0.2],
        &IntegralOptions::default(),
    )
    .unwrap();
    assert!(chain.max_residual() < 1e-10);
    let k = vec![-1.0; g.len()];
    let u1 = chain.member(1);
    let r: Vec<f64> = (0..g.len())
        .map(|i| u1.value(i) - g.x(i) * g.x(i).cos() / 2.0)
        .collect();
    let r = SampledFunction::from_values(g.clone(), r).unwrap();
    assert!(fd_residual(&r, &k, 3) < 1e-7);
    // u2 against its relation with an FD second derivative
    let u2 = chain.member(2);
    let upp = fd_derivative(u2.derivs(), g.step(), 1).unwrap();
    let worst = (3..g.len() - 3)
        .map(|i| (upp[i] + u2.value(i) + u1.value(i)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn u_hat_shifts_first_member() {
    let g = build_grid(0.2, 3.0, 801, false, false, 0.0).unwrap();
    let u0 = SampledFunction::from_dual(g.clone(), |x| x.sin());
    let opts = IntegralOptions::default();
    let plain = chain_from_u0_integral(&u0, &free(&g), 1.0, 2, None, &[], &opts).unwrap();
    let shifted = chain_from_u0_integral(&u0, &free(&g), 1.0, 2, Some(&u0), &[], &opts).unwrap();
    for i in 0..g.len() {
        assert!(
            (shifted.member(1).value(i) - plain.member(1).value(i) - u0.value(i)).abs() < 1e-14
        );
    }
}

#[test]
fn second_order_wronskian_identities() {
    let chain = cosh_chain(2, &[3.0]);
    let w = chain_wronskian(&chain, 1e-10).unwrap();
    assert!(w.nodeless_interior);
    let u0 = chain.u0();
    let w2 = wronskian_2nd_order(u0, -3.0, Anchor::Midpoint, 1e-10).unwrap();
    let raw = wronskian(chain.members(), 1e-10).unwrap();
    for i in 0..u0.len() {
        assert!((w.w.deriv(i) + u0.value(i).powi(2)).abs() < 1e-12);
        assert!((w.w.value(i) - w2.w.value(i)).abs() < 1e-10);
        assert!((w.w.value(i) - raw.w.value(i)).abs() < 1e-12);
    }
    for i in 1..u0.len() {
        assert!(w2.w.value(i) <= w2.w.value(i - 1));
    }
}

#[test]
fn third_order_raw_and_reduced_agree() {
    let chain = cosh_chain(3, &[3.0, 3.0]);
    let reduced = chain_wronskian(&chain, 1e-10).unwrap();
    let raw = wronskian(chain.members(), 1e-10).unwrap();
    let scale = reduced.w.max_abs();
    for i in 0..chain.u0().len() {
        assert!((reduced.w.value(i) - raw.w.value(i)).abs() < 1e-10 * scale);
    }
    // W' from the reduced rows against a finite difference of W
    let fd = fd_derivative(reduced.w.values(), chain.u0().grid().step(), 1).unwrap();
    let sec = reduced.w.second_derivative();
    let fd2 = fd_derivative(reduced.w.derivs(), chain.u0().grid().step(), 1).unwrap();
    for i in 0..fd.len() {
        assert!((fd[i] - reduced.w.deriv(i)).abs() < 1e-9 * scale);
        assert!((fd2[i] - sec[i]).abs() < 1e-8 * scale);
    }
}

#[test]
fn dependent_members_vanish_identically() {
    let g = build_grid(0.0, 1.0, 101, false, false, 0.0).unwrap();
    let f = SampledFunction::from_dual(g.clone(), |x| x.sin());
    let data = wronskian(&[f.clone(), f.scale(2.0)], 1e-10).unwrap();
    assert!(data.identically_zero);
    assert!(!data.nodeless_interior);
}

#[test]
fn zero_scan_separates_ends_from_interior() {
    let xs: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
    let end: Vec<f64> = xs.iter().map(|x| x.powi(5)).collect();
    assert!(scan_zeros(&end, 1e-10).nodeless_interior);
    let inner: Vec<f64> = xs.iter().map(|x| x - 0.5).collect();
    let scan = scan_zeros(&inner, 1e-10);
    assert!(!scan.nodeless_interior);
    assert_eq!(scan.zero_locations, vec![49]);
}

#[test]
fn transform_potential_and_constant_shift() {
    let chain = cosh_chain(2, &[3.0]);
    let t0 = transform_potential(&chain, 0.0, &TransformOptions::default()).unwrap();
    let t7 = transform_potential(&chain, 7.0, &TransformOptions::default()).unwrap();
    let w = &t0.wron.w;
    for i in 0..w.len() {
        assert!((t7.u1.value(i) - t0.u1.value(i) - 7.0).abs() < 1e-12);
        // U1 = −2 (W''W − W'^2)/W^2 with W' = −u0², W'' = −2 u0 u0'
        let (u, du) = (chain.u0().value(i), chain.u0().deriv(i));
        let (wv, dw, ddw) = (w.value(i), -u * u, -2.0 * u * du);
        let exact = -2.0 * (ddw * wv - dw * dw) / (wv * wv);
        assert!((t0.u1.value(i) - exact).abs() < 1e-10);
    }
}

#[test]
fn singular_wronskian_is_rejected() {
    let chain = cosh_chain(2, &[0.0]);
    let err = transform_potential(&chain, 0.0, &TransformOptions::default()).unwrap_err();
    match err {
        crate::Error::SingularPotential { locations } => {
            assert!(locations.iter().any(|x| x.abs() < 2e-3))
        }
        other => panic!("{other:?}"),
    }
    let forced = TransformOptions {
        allow_singular: true,
        ..Default::default()
    };
    assert!(transform_potential(&chain, 0.0, &forced).is_ok());
}

#[test]
fn kernel_intertwining_and_missing_state() {
    for order in [2, 3] {
        let chain = cosh_chain(order, &[-3.0, -6.0]);
        let g = chain.u0().grid().clone();
        let tr = transform_potential(&chain, 0.0, &TransformOptions::default()).unwrap();
        let u0 = with_ctx(chain.u0().clone(), 1.0);
        let phi0 = transform_solution(&chain, &u0).unwrap();
        assert!(phi0.max_abs() < 1e-10, "order {order}: {}", phi0.max_abs());

        for kw in [0.5_f64, 2.0, 4.5] {
            let psi = with_ctx(
                SampledFunction::from_dual(g.clone(), move |x| (x * kw).sin()),
                -kw * kw,
            );
            let phi = transform_solution(&chain, &psi).unwrap();
            let k: Vec<f64> = tr.u1.values().iter().map(|u| u - kw * kw).collect();
            let r = fd_residual(&phi, &k, 3) / phi.max_abs().max(1e-300);
            assert!(r < 1e-6, "order {order} k={kw} r={r}");
        }

        let v0 = chain::partner(chain.u0(), Some(&chain.coefficient()), Anchor::Midpoint).unwrap();
        let v0 = with_ctx(v0, 1.0);
        let via_v0 = transform_solution(&chain, &v0).unwrap();
        let ms = missing_state(&chain).unwrap();
        let scale = ms.max_abs();
        for i in 0..g.len() {
            assert!((via_v0.value(i) - ms.value(i)).abs() < 1e-8 * scale);
        }
        let k: Vec<f64> = tr.u1.values().iter().map(|u| u + 1.0).collect();
        assert!(fd_residual(&ms, &k, 3) / scale < 1e-6);
    }
}

#[test]
fn lambda_derivative_of_free_waves() {
    let g = build_grid(0.0, 3.0, 601, false, false, 0.0).unwrap();
    let family = |lam: f64| -> crate::Result<SampledFunction> {
        let s = lam.sqrt();
        Ok(with_ctx(
            SampledFunction::from_dual(g.clone(), move |x| (x * s).sin()),
            -lam,
        ))
    };
    let lam = 2.0;
    let opts = LambdaDerivativeOptions::default();
    let chain = chain_from_lambda_derivative(family, &free(&g), lam, None, 0.0, &opts).unwrap();
    let s = lam.sqrt();
    for i in 0..g.len() {
        let x = g.x(i);
        let exact = x * (s * x).cos() / (2.0 * s);
        assert!((chain.member(1).value(i) - exact).abs() < 1e-7);
    }
    let res = |h: f64, richardson: bool| {
        let o = LambdaDerivativeOptions {
            h: Some(h),
            richardson,
            tolerance: Some(1.0),
        };
        chain_from_lambda_derivative(family, &free(&g), lam, None, 0.0, &o)
            .unwrap()
            .residuals()[1]
    };
    let ratio = res(0.02, false) / res(0.01, false);
    assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    assert!(res(0.02, true) < 1e-2 * res(0.02, false));
    let tight = LambdaDerivativeOptions {
        h: Some(0.1),
        richardson: false,
        tolerance: Some(1e-9),
    };
    assert!(matches!(
        chain_from_lambda_derivative(family, &free(&g), lam, None, 0.0, &tight),
        Err(crate::Error::ChainResidual { .. })
    ));
}

#[test]
fn exponents_and_poles() {
    let g = build_grid(0.0, 1.0, 2001, true, false, 1e-6).unwrap();
    for k in [2.0, 5.0, -3.0, 0.5] {
        let f = SampledFunction::from_fn(g.clone(), |x| (x.powf(k), k * x.powf(k - 1.0)));
        let s = singularity_exponent(&f, true, 0.05).unwrap();
        assert!((s - k).abs() < 0.01 * k.abs(), "k={k} s={s}");
    }
    let q = SampledFunction::from_fn(g.clone(), |x| (-3.0 / x + 2.0 + x, 3.0 / (x * x) + 1.0));
    assert!((pole_coefficient(&q, true, 0.05).unwrap() + 3.0).abs() < 1e-3);
    // a node inside the window cuts the fit short of it
    let noded =
        SampledFunction::from_fn(g.clone(), |x| (x * x * (x - 0.02), 3.0 * x * x - 0.04 * x));
    assert!(singularity_exponent(&noded, true, 0.05)
        .unwrap()
        .is_finite());
    let x0 = g.x(0);
    let bad = SampledFunction::from_fn(g, move |x| (x - x0, 1.0));
    assert!(singularity_exponent(&bad, true, 0.05).is_err());
}

#[test]
fn normalizability_verdicts() {
    let g = build_grid(0.0, 1.0, 2001, true, true, 1e-6).unwrap();
    let good = SampledFunction::from_dual(g.clone(), |x| x * x * (-x + 1.0));
    let bad = SampledFunction::from_dual(g.clone(), |x| x.powi(-3) * (-x + 1.0));
    let v = normalizability(&good, EndKind::Finite, EndKind::Finite).unwrap();
    assert!(v.normalizable);
    let v = normalizability(&bad, EndKind::Finite, EndKind::Finite).unwrap();
    assert!(!v.normalizable && v.right.square_integrable);
    let line = build_grid(-8.0, 8.0, 1601, false, false, 0.0).unwrap();
    let gauss = SampledFunction::from_dual(line.clone(), |x| (-(x * x) * 0.5).exp());
    assert!(
        normalizability(&gauss, EndKind::Infinite, EndKind::Infinite)
            .unwrap()
            .normalizable
    );
    let grow = SampledFunction::from_dual(line, |x| (x * x * 0.5).exp());
    assert!(
        !normalizability(&grow, EndKind::Infinite, EndKind::Infinite)
            .unwrap()
            .normalizable
    );
}
