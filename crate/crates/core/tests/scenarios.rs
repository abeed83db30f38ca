use tilde_core::scenarios::{catalog, sample_in, verify_metric_claims, verify_on_shell, CatalogError, Domain, RANDOM_FIELD_BOUND};
use tilde_core::{TensorField, Theory};

#[test]
fn seed_42_triple_is_reproducible() {
    let cat = catalog();
    let m = cat.metric("minkowski4").unwrap();
    let a = m.sample_points(3, 42).unwrap();
    let b = m.sample_points(3, 42).unwrap();
    assert_eq!(a, b);
    for p in &a {
        assert!(p.coords.iter().all(|v| (-1.0..=1.0).contains(v)));
    }
    let frozen = [
        [0.3637923846133426, 0.900550815344968, -0.1449671942869606, 0.25472104239468063],
        [-0.42281224171763476, -0.7000822594193501, -0.3839188808041807, 0.6077455343512534],
        [0.5424975616057139, -0.5228294712373214, 0.013733740680137885, 0.8036063440975476],
    ];
    for (p, f) in a.iter().zip(frozen) {
        assert_eq!(p.coords, f);
    }
}

#[test]
fn seeds_differ() {
    let cat = catalog();
    let m = cat.metric("minkowski4").unwrap();
    assert_ne!(m.sample_points(3, 42).unwrap(), m.sample_points(3, 43).unwrap());
}

#[test]
fn schwarzschild_sampler_respects_domain() {
    let cat = catalog();
    let s = cat.metric("schwarzschild").unwrap();
    for p in s.sample_points(500, 3).unwrap() {
        let (r, th) = (p.coords[1], p.coords[2]);
        assert!((4.0..=12.0).contains(&r), "{r}");
        assert!(th >= 0.4 && th <= std::f64::consts::PI - 0.4);
    }
}

#[test]
fn coulomb_sampler_keeps_away_from_charge() {
    let cat = catalog();
    let m = cat.metric("minkowski4").unwrap();
    let f = cat.resolve_field("coulomb", m).unwrap();
    for p in f.sample_points(m, 200, 4).unwrap() {
        let r = p.coords[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(r >= 0.5);
    }
}

#[test]
fn misconfigured_domain_is_reported() {
    let d = Domain::cube(2, 1.0);
    assert_eq!(sample_in("never", &d, 4, 1, |_| false), Err(CatalogError::Rejection("never".into())));
    assert_eq!(sample_in("empty", &d, 0, 1, |_| true), Err(CatalogError::NoPoints));
}

#[test]
fn killing_counts() {
    let cat = catalog();
    let m4 = cat.metric("minkowski4").unwrap();
    assert_eq!(m4.killing_vectors().count(), 10);
    assert_eq!(m4.vectors.iter().filter(|v| v.parallel).count(), 4);
    assert_eq!(cat.metric("minkowski2").unwrap().killing_vectors().count(), 3);
    assert_eq!(cat.metric("schwarzschild").unwrap().killing_vectors().count(), 4);
    assert_eq!(cat.metric("conformal-bump").unwrap().killing_vectors().count(), 0);
}

#[test]
fn names_resolve() {
    let cat = catalog();
    assert!(matches!(cat.metric("kerr"), Err(CatalogError::UnknownMetric(_))));
    assert!(matches!(cat.field("dirac"), Err(CatalogError::UnknownField(_))));
    let bump = cat.metric("conformal-bump").unwrap();
    assert!(matches!(cat.resolve_field("coulomb", bump), Err(CatalogError::Incompatible { .. })));
    for name in ["scalar-plane-wave", "massive-scalar-wave", "coulomb", "plane-em-wave", "static-scalar", "schwarzschild-coulomb"] {
        assert!(cat.field(name).unwrap().on_shell, "{name}");
    }
}

#[test]
fn claims_are_verified() {
    let cat = catalog();
    for m in &cat.metrics {
        let pts = m.sample_points(64, 5).unwrap();
        verify_metric_claims(m, &pts, 3).unwrap();
    }
    for (metric, field) in cat.on_shell_scenarios() {
        let m = cat.metric(metric).unwrap();
        let f = cat.resolve_field(field, m).unwrap();
        let pts = f.sample_points(m, 8, 6).unwrap();
        let r = verify_on_shell(m, &f, &pts, 3).unwrap();
        assert!(r <= 1e-7, "{metric}/{field}: {r}");
    }
}

#[test]
fn random_fields_are_bounded_and_off_shell() {
    let cat = catalog();
    for m in &cat.metrics {
        for name in ["random-scalar", "random-one-form", "broken-scalar"] {
            let f = cat.resolve_field(name, m).unwrap();
            assert!(!f.on_shell);
            let pts = f.sample_points(m, 200, 7).unwrap();
            for p in &pts {
                for t in tilde_core::FieldConfiguration::eval(&f.field, &p.coords) {
                    assert!(t.max_abs_value() <= RANDOM_FIELD_BOUND);
                }
            }
            if !matches!(f.theory, Theory::BrokenScalar) {
                let r = verify_on_shell(m, &f, &pts[..4], 3).unwrap();
                assert!(r > 1e-3, "{}/{name}: {r}", m.name);
            }
        }
        let t = m.random_tensor(1, 1, 8);
        for p in m.sample_points(50, 8).unwrap() {
            assert!(t.eval(&p.coords).max_abs_value() <= RANDOM_FIELD_BOUND);
        }
    }
}

#[test]
fn random_vectors_are_not_killing() {
    let cat = catalog();
    let m = cat.metric("minkowski4").unwrap();
    let p = m.sample_points(1, 9).unwrap().remove(0);
    let geo = tilde_core::geometry_at(&m.metric, &p, 3).unwrap();
    let x = tilde_core::lift(&p.coords, 3).unwrap();
    for v in m.random_vectors(16, 9) {
        assert!(!v.killing);
        assert!(geo.killing_residual(&v.eval(&x)).unwrap().max_abs_value() > 1e-3);
    }
}
