use tilde_core::field::{
    alt_current, asymmetry, canonical_divergence_check, difference_current, divergence_of, ee_maxwell_residual,
    ee_scalar_residual, ee_symmetry_residual, identity_ee_residual, master_identity_residual, max_eom_residual,
    maxwell_emt_closed_form, noether_current, scalar_lagrangian_residual, theta_antisymmetry_residual,
    theta_tail_symmetry_residual, tilde_lagrangian_residual, FieldError,
};
use tilde_core::scenarios::{catalog, emt_point, Catalog, FieldEntry, MetricEntry};
use tilde_core::{lift, EmtBundle, FieldPoint, GeometryPoint, Scalar, TensorField, Theory};

const ORDER: usize = 3;

type Sample = (GeometryPoint<f64>, FieldPoint<f64>, EmtBundle<f64>);

fn samples(cat: &Catalog, metric: &str, field: &str, count: usize, seed: u64) -> (MetricEntry, FieldEntry, Vec<Sample>) {
    let m = cat.metric(metric).unwrap().clone();
    let f = cat.resolve_field(field, &m).unwrap();
    let pts = f.sample_points(&m, count, seed).unwrap();
    let s = pts.iter().map(|p| emt_point(&m, &f, p, ORDER).unwrap()).collect();
    (m, f, s)
}

fn worst<T>(items: &[T], f: impl Fn(&T) -> f64) -> f64 {
    items.iter().map(f).fold(0.0, f64::max)
}

#[test]
fn scalar_metric_emt_closed_form() {
    let cat = catalog();
    for (metric, field) in [("minkowski4", "massive-scalar-wave"), ("schwarzschild", "static-scalar"), ("conformal-bump", "random-scalar")] {
        let (_, _, s) = samples(&cat, metric, field, 6, 1);
        let r = worst(&s, |(g, fp, e)| {
            let up = g.raise(&fp.grads[0], 0).unwrap();
            let expected = &up.outer(&up).unwrap() + &g.inverse.scale_by(e.lagrangian());
            (&e.metric - &expected).max_abs_value()
        });
        assert!(r <= 1e-10, "{metric}/{field}: {r}");
    }
}

#[test]
fn maxwell_metric_emt_closed_form() {
    let cat = catalog();
    for (metric, field) in [("minkowski4", "coulomb"), ("schwarzschild", "schwarzschild-coulomb"), ("conformal-bump", "random-one-form"), ("minkowski4", "random-one-form")] {
        let (_, _, s) = samples(&cat, metric, field, 6, 2);
        let r = worst(&s, |(g, fp, e)| (&e.metric - &maxwell_emt_closed_form(g, &fp.grads[0]).unwrap()).max_abs_value());
        assert!(r <= 1e-10, "{metric}/{field}: {r}");
    }
}

#[test]
fn structural_symmetries_off_shell() {
    let cat = catalog();
    for m in cat.metrics.iter() {
        for field in ["random-scalar", "random-one-form"] {
            let (_, _, s) = samples(&cat, m.name, field, 6, 3);
            let r = worst(&s, |(_, _, e)| {
                let a = theta_antisymmetry_residual(&e.theta).max_abs_value();
                let t = theta_tail_symmetry_residual(&e.q).max_abs_value();
                a.max(t).max(asymmetry(&e.metric).max_abs_value())
            });
            assert!(r <= 1e-12, "{}/{field}: {r}", m.name);
        }
    }
}

#[test]
fn scalar_content_has_no_superpotential() {
    let cat = catalog();
    let (_, _, s) = samples(&cat, "schwarzschild", "random-scalar", 4, 4);
    for (_, _, e) in &s {
        assert_eq!(e.q.max_abs_value(), 0.0);
        assert_eq!(e.theta.max_abs_value(), 0.0);
        assert_eq!((&e.belinfante - &e.canonical).max_abs_value(), 0.0);
    }
}

#[test]
fn maxwell_canonical_tensor_is_not_symmetric() {
    // the Lorenz-gauge wave has T_C ∝ k⊗k; the shifted gauge breaks that
    let cat = catalog();
    let (_, _, s) = samples(&cat, "minkowski4", "plane-em-wave-gauged", 4, 5);
    let r = worst(&s, |(_, _, e)| asymmetry(&e.canonical).max_abs_value());
    assert!(r >= 1e-3, "{r}");
}

#[test]
fn belinfante_and_metric_tensors_differ_off_shell() {
    let cat = catalog();
    let (_, _, s) = samples(&cat, "minkowski4", "random-one-form", 4, 6);
    let gap = worst(&s, |(_, _, e)| (&e.belinfante - &e.metric).max_abs_value());
    assert!(gap >= 1e-3, "{gap}");
}

#[test]
fn on_shell_conservation_everywhere() {
    let cat = catalog();
    for (metric, field) in cat.on_shell_scenarios() {
        let (_, _, s) = samples(&cat, metric, field, 4, 7);
        let r = worst(&s, |(g, fp, e)| {
            let eom = max_eom_residual(g, fp, &e.derivatives).unwrap();
            let tb = g.divergence(&e.belinfante, 0).unwrap().max_abs_value();
            let tm = g.divergence(&e.metric, 0).unwrap().max_abs_value();
            let gap = (&e.belinfante - &e.metric).max_abs_value();
            eom.max(tb).max(tm).max(gap)
        });
        assert!(r <= 1e-8, "{metric}/{field}: {r}");
    }
}

#[test]
fn canonical_divergence_curvature_term() {
    let cat = catalog();
    let (_, _, s) = samples(&cat, "schwarzschild", "schwarzschild-coulomb", 4, 8);
    let (mut lhs_max, mut rhs_max, mut diff) = (0.0f64, 0.0f64, 0.0f64);
    for (g, fp, e) in &s {
        let (l, r) = canonical_divergence_check(g, fp, e).unwrap();
        lhs_max = lhs_max.max(l.max_abs_value());
        rhs_max = rhs_max.max(r.max_abs_value());
        diff = diff.max((&l - &r).max_abs_value());
    }
    assert!(lhs_max >= 1e-6 && rhs_max >= 1e-6, "{lhs_max} {rhs_max}");
    assert!(diff <= 1e-8, "{diff}");

    let (_, _, s) = samples(&cat, "schwarzschild", "static-scalar", 4, 8);
    for (g, fp, e) in &s {
        let (l, r) = canonical_divergence_check(g, fp, e).unwrap();
        assert!(l.max_abs_value() <= 1e-9 && r.max_abs_value() <= 1e-9);
    }
}

#[test]
fn off_shell_input_is_refused() {
    let cat = catalog();
    let (_, _, s) = samples(&cat, "minkowski4", "random-one-form", 1, 9);
    let (g, fp, e) = &s[0];
    assert!(matches!(canonical_divergence_check(g, fp, e), Err(FieldError::OffShell(_))));
    assert!(matches!(identity_ee_residual(g, fp, e), Err(FieldError::OffShell(_))));
}

#[test]
fn currents_for_killing_vectors() {
    let cat = catalog();
    for (metric, field) in cat.on_shell_scenarios() {
        let (m, _, s) = samples(&cat, metric, field, 3, 10);
        let r = worst(&s, |(g, fp, e)| {
            let mut w = 0.0f64;
            for k in m.killing_vectors() {
                let xi = k.eval(&fp.coords);
                let j = divergence_of(g, &noether_current(g, e, &xi).unwrap()).unwrap();
                let alt = divergence_of(g, &alt_current(g, e, &xi).unwrap()).unwrap();
                w = w.max(j.value().abs()).max(alt.value().abs());
            }
            w
        });
        assert!(r <= 1e-8, "{metric}/{field}: {r}");
    }
}

#[test]
fn identities_with_arbitrary_vectors() {
    let cat = catalog();
    for (metric, field) in cat.on_shell_scenarios() {
        let (m, _, s) = samples(&cat, metric, field, 3, 11);
        let xs = m.random_vectors(3, 11);
        let r = worst(&s, |(g, fp, e)| {
            let mut w = 0.0f64;
            for v in &xs {
                let xi = v.eval(&fp.coords);
                w = w.max(master_identity_residual(g, e, &xi).unwrap().value().abs());
                let d = divergence_of(g, &difference_current(g, e, &xi).unwrap()).unwrap();
                w = w.max(d.value().abs());
            }
            w
        });
        assert!(r <= 1e-8, "{metric}/{field}: {r}");
    }
}

#[test]
fn parallel_translations_conserve_canonical_current() {
    let cat = catalog();
    let (m, _, s) = samples(&cat, "minkowski4", "plane-em-wave", 3, 12);
    let r = worst(&s, |(g, fp, e)| {
        m.vectors
            .iter()
            .filter(|v| v.parallel)
            .map(|v| {
                let xi = v.eval(&fp.coords);
                let j = tilde_core::field::contract_with_covector(g, &e.canonical, &xi).unwrap();
                divergence_of(g, &j).unwrap().value().abs()
            })
            .fold(0.0, f64::max)
    });
    assert!(r <= 1e-9, "{r}");
}

#[test]
fn metric_derivative_identities() {
    let cat = catalog();
    for (metric, field) in cat.on_shell_scenarios() {
        let (_, f, s) = samples(&cat, metric, field, 3, 13);
        let r = worst(&s, |(g, fp, e)| {
            let ee = identity_ee_residual(g, fp, e).unwrap().max_abs_value();
            let sym = ee_symmetry_residual(g, fp, e).unwrap().max_abs_value();
            let special = match f.theory {
                Theory::Maxwell => ee_maxwell_residual(g, fp, &e.derivatives).unwrap(),
                _ => ee_scalar_residual(g, fp, &e.derivatives).unwrap(),
            };
            ee.max(sym).max(special.max_abs_value())
        });
        assert!(r <= 1e-9, "{metric}/{field}: {r}");
    }
}

#[test]
fn tilde_lagrangian_identity_off_shell() {
    let cat = catalog();
    for m in cat.metrics.iter() {
        for field in ["random-scalar", "random-one-form"] {
            let (_, _, s) = samples(&cat, m.name, field, 4, 14);
            let r = worst(&s, |(g, fp, e)| tilde_lagrangian_residual(g, fp, &e.derivatives).unwrap().max_abs_value());
            assert!(r <= 1e-10, "{}/{field}: {r}", m.name);
        }
    }
}

#[test]
fn lagrangians_are_scalars() {
    let cat = catalog();
    for m in cat.metrics.iter() {
        let xs = m.random_vectors(2, 15);
        for field in ["random-scalar", "random-one-form"] {
            let (_, _, s) = samples(&cat, m.name, field, 4, 15);
            let r = worst(&s, |(g, fp, e)| {
                xs.iter()
                    .map(|v| scalar_lagrangian_residual(g, fp, &e.derivatives, &v.eval(&fp.coords)).unwrap().value().abs())
                    .fold(0.0, f64::max)
            });
            assert!(r <= 1e-9, "{}/{field}: {r}", m.name);
        }
        let (_, _, s) = samples(&cat, m.name, "broken-scalar", 4, 15);
        let r = worst(&s, |(g, fp, e)| {
            xs.iter()
                .map(|v| scalar_lagrangian_residual(g, fp, &e.derivatives, &v.eval(&fp.coords)).unwrap().value().abs())
                .fold(0.0, f64::max)
        });
        assert!(r >= 1e-3, "{}: broken residual {r}", m.name);
    }
}

#[test]
fn constant_lagrangian_is_trivially_scalar() {
    let cat = catalog();
    let m = cat.metric("minkowski2").unwrap();
    let f = cat.resolve_field("random-scalar", m).unwrap();
    let p = tilde_core::Point::new(vec![0.1, 0.2]);
    let (g, fp, e) = emt_point(m, &f, &p, ORDER).unwrap();
    let mut d = e.derivatives.clone();
    d.value = tilde_core::Jet::constant(2.0);
    for t in d.d_grad.iter_mut().chain(d.d_field.iter_mut()) {
        *t = t.scale(0.0);
    }
    d.d_metric = d.d_metric.scale(0.0);
    let xi = m.random_vectors(1, 1)[0].eval(&lift(&p.coords, ORDER).unwrap());
    assert_eq!(scalar_lagrangian_residual(&g, &fp, &d, &xi).unwrap().value(), 0.0);
}

#[test]
fn gauge_shift() {
    let cat = catalog();
    let (_, _, a) = samples(&cat, "minkowski4", "plane-em-wave", 4, 16);
    let (_, _, b) = samples(&cat, "minkowski4", "plane-em-wave-gauged", 4, 16);
    let (mut inv, mut shift) = (0.0f64, 0.0f64);
    for ((_, fa, ea), (_, fb, eb)) in a.iter().zip(&b) {
        assert_eq!(fa.coords[0].value(), fb.coords[0].value());
        inv = inv.max((&ea.metric - &eb.metric).max_abs_value());
        inv = inv.max((&ea.belinfante - &eb.belinfante).max_abs_value());
        shift = shift.max((&ea.canonical - &eb.canonical).max_abs_value());
    }
    assert!(inv <= 1e-9, "{inv}");
    assert!(shift >= 1e-4, "{shift}");
}
