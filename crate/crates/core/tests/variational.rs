use tilde_core::scenarios::{catalog, Field};
use tilde_core::variational::{variational_tm_check, GaussianPerturbation, VariationalError};
use tilde_core::Theory;

fn scalar_case(resolution: usize, h: &GaussianPerturbation) -> Result<tilde_core::variational::VariationalResult, VariationalError> {
    let cat = catalog();
    let m = cat.metric("minkowski2").unwrap();
    let f = cat.resolve_field("massive-scalar-wave", m).unwrap();
    variational_tm_check(&f.theory, &m.metric, &f.field, h, &m.domain.bounds, resolution)
}

fn bump() -> GaussianPerturbation {
    GaussianPerturbation::seeded(vec![0.05, -0.1], 0.17, 0.2, 3)
}

#[test]
fn zero_perturbation_gives_zero() {
    let r = scalar_case(8, &GaussianPerturbation::zero(2)).unwrap();
    assert_eq!(r.action_derivative, 0.0);
    assert_eq!(r.emt_integral, 0.0);
    assert_eq!(r.relative_difference(), 0.0);
}

#[test]
fn scalar_sides_agree_and_converge() {
    let h = bump();
    let results: Vec<_> = [16, 32, 64].iter().map(|&n| scalar_case(n, &h).unwrap()).collect();
    for r in &results {
        assert!(r.relative_difference() <= 1e-6, "{r:?}");
        assert!(r.pointwise <= 1e-12, "{r:?}");
    }
    // midpoint rule on a smooth integrand: successive changes shrink
    let d1 = (results[1].action_derivative - results[0].action_derivative).abs();
    let d2 = (results[2].action_derivative - results[1].action_derivative).abs();
    assert!(d2 < d1 || d2 <= 1e-12 * results[2].action_derivative.abs(), "{d1} {d2}");
    assert!(results[2].action_derivative.abs() > 1e-6);
}

#[test]
fn support_on_the_boundary_is_rejected() {
    let wide = GaussianPerturbation::seeded(vec![0.0, 0.0], 0.9, 0.2, 3);
    assert!(matches!(scalar_case(8, &wide), Err(VariationalError::SupportTouchesBoundary { .. })));
}

#[test]
fn maxwell_on_a_coarse_grid() {
    let cat = catalog();
    let m = cat.metric("minkowski4").unwrap();
    let h = GaussianPerturbation::seeded(vec![0.0; 4], 0.17, 0.2, 4);
    let field = Field::em_plane_wave(2.0);
    let r = variational_tm_check(&Theory::Maxwell, &m.metric, &field, &h, &m.domain.bounds, 4).unwrap();
    assert!(r.relative_difference() <= 1e-3, "{r:?}");
    assert_eq!(r.cells, 256);
}

#[test]
fn dimension_mismatch() {
    let cat = catalog();
    let m = cat.metric("minkowski4").unwrap();
    let h = GaussianPerturbation::zero(2);
    let r = variational_tm_check(&Theory::Maxwell, &m.metric, &Field::em_plane_wave(1.0), &h, &m.domain.bounds, 2);
    assert!(matches!(r, Err(VariationalError::Dimension { .. })));
}
