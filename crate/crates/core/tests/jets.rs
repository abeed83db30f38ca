use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tilde_core::{lift, Jet, JetError, Scalar};

fn f(x: f64, y: f64) -> f64 {
    (x * y).sin() * (x + 2.0 * y).cos() + (0.3 * x).exp()
}

fn f_jet(v: &[Jet<f64>]) -> Jet<f64> {
    let (x, y) = (&v[0], &v[1]);
    let xy = x.mul_ref(y);
    let s = x.clone() + &y.scale(2.0);
    xy.sin().mul_ref(&s.cos()) + &x.scale(0.3).exp()
}

/// Central difference for a mixed partial, Richardson-extrapolated once.
fn fd(idx: &[usize], x: [f64; 2]) -> f64 {
    fn stencil(idx: &[usize], x: [f64; 2], h: f64) -> f64 {
        match idx.split_first() {
            None => f(x[0], x[1]),
            Some((&i, rest)) => {
                let (mut p, mut m) = (x, x);
                p[i] += h;
                m[i] -= h;
                (stencil(rest, p, h) - stencil(rest, m, h)) / (2.0 * h)
            }
        }
    }
    let h = match idx.len() {
        1 => 1e-3,
        2 => 4e-3,
        _ => 1.5e-2,
    };
    (4.0 * stencil(idx, x, h / 2.0) - stencil(idx, x, h)) / 3.0
}

#[test]
fn transcendental_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let multi: [&[usize]; 7] = [&[0], &[1], &[0, 0], &[0, 1], &[1, 1], &[0, 0, 1], &[1, 1, 1]];
    for _ in 0..16 {
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let j = f_jet(&lift(&x, 3).unwrap());
        assert!((j.real() - f(x[0], x[1])).abs() <= 1e-15);
        for idx in multi {
            let exact = j.derivative(idx).unwrap();
            let approx = fd(idx, x);
            assert!((exact - approx).abs() <= 1e-6 * exact.abs().max(1.0), "{idx:?} at {x:?}: {exact} vs {approx}");
        }
    }
}

#[test]
fn polynomials_are_exact() {
    // p = 3x³y − 2xy² + 5z + 1
    let v = lift(&[0.7, -1.3, 2.1], 4).unwrap();
    let (x, y, z) = (&v[0], &v[1], &v[2]);
    let p = x.powi(3).mul_ref(y).scale(3.0) - &x.mul_ref(&y.square()).scale(2.0) + &z.scale(5.0) + &Jet::constant(1.0);
    let (xv, yv) = (0.7f64, -1.3f64);
    assert_eq!(p.derivative(&[0, 0, 0, 1]).unwrap(), 18.0);
    assert_eq!(p.derivative(&[0, 1, 1]).unwrap(), -4.0);
    assert_eq!(p.derivative(&[2, 2]).unwrap(), 0.0);
    assert!((p.derivative(&[0]).unwrap() - (9.0 * xv * xv * yv - 2.0 * yv * yv)).abs() <= 1e-14);
    assert!((p.derivative(&[0, 0, 1]).unwrap() - 18.0 * xv).abs() <= 1e-14);
}

#[test]
fn order_is_bounded() {
    let v = lift(&[0.5, 0.5], 2).unwrap();
    let q = v[0].mul_ref(&v[1]);
    assert!(matches!(q.derivative(&[0, 0, 1]), Err(JetError::DerivativeTooHigh { requested: 3, order: 2 })));
    let d = q.partial(0).unwrap();
    assert_eq!(d.order(), Some(1));
    assert!(d.partial(1).unwrap().partial(1).is_err());
}

#[test]
fn constants_never_run_out() {
    let c = Jet::constant(2.5f64);
    let d = c.partial(0).unwrap().partial(3).unwrap();
    assert!(d.is_exact_zero());
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mixed_partials_commute(x in -1.5f64..1.5, y in -1.5f64..1.5) {
            let v = lift(&[x, y], 3).unwrap();
            let j = f_jet(&v);
            let a = j.derivative(&[0, 1, 1]).unwrap();
            let b = j.derivative(&[1, 0, 1]).unwrap();
            let c = j.derivative(&[1, 1, 0]).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 && (a - c).abs() <= 1e-12);
        }

        #[test]
        fn product_rule(x in -1.5f64..1.5, y in -1.5f64..1.5) {
            let v = lift(&[x, y], 2).unwrap();
            let u = f_jet(&v);
            let w = v[0].mul_ref(&v[1]).sin();
            let uw = u.mul_ref(&w);
            for i in 0..2 {
                let lhs = uw.derivative(&[i]).unwrap();
                let rhs = u.derivative(&[i]).unwrap() * w.real() + u.real() * w.derivative(&[i]).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            }
        }
    }
}
