use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tilde_core::{tilde, tilde_product_rule_residual, Shape, Tensor, Variance};

fn random_tensor(shape: Shape, rng: &mut ChaCha8Rng) -> Tensor<f64> {
    let data = (0..shape.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
    Tensor::from_vec(shape, data).unwrap()
}

fn random_shape(dim: usize, rank: usize, rng: &mut ChaCha8Rng) -> Shape {
    let slots = (0..rank)
        .map(|_| if rng.gen_bool(0.5) { Variance::Up } else { Variance::Down })
        .collect();
    Shape::new(dim, slots).unwrap()
}

/// Direct sum of single-index replacements, written independently of the
/// library's gather.
fn tilde_brute(t: &Tensor<f64>) -> Tensor<f64> {
    let r = t.rank();
    let shape = t.shape().with_slot(Variance::Up).with_slot(Variance::Down);
    Tensor::from_fn(shape, |idx| {
        let (a, b) = (idx[r], idx[r + 1]);
        let base = &idx[..r];
        let mut sum = 0.0;
        for (i, v) in t.slots().iter().enumerate() {
            let mut j = base.to_vec();
            match v {
                Variance::Up => {
                    if base[i] == b {
                        j[i] = a;
                        sum += t[&j[..]];
                    }
                }
                Variance::Down => {
                    if base[i] == a {
                        j[i] = b;
                        sum -= t[&j[..]];
                    }
                }
            }
        }
        sum
    })
}

fn metric(dim: usize, rng: &mut ChaCha8Rng) -> Tensor<f64> {
    let mut g = Tensor::<f64>::zeros(Shape::pq(dim, 0, 2));
    for a in 0..dim {
        for b in a..dim {
            let v = if a == b { 2.0 + rng.gen::<f64>() } else { 0.3 * rng.gen_range(-1.0..1.0) };
            g[[a, b]] = v;
            g[[b, a]] = v;
        }
    }
    g
}

#[test]
fn tilde_of_metric_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=4 {
        let g = metric(n, &mut rng);
        let tg = tilde(&g);
        // slots (a, b, c, d): −g_{db}δ^c_a − g_{ad}δ^c_b
        let expected = Tensor::from_fn(tg.shape().clone(), |i| {
            let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
            let mut v = 0.0;
            if c == a {
                v -= g[[d, b]];
            }
            if c == b {
                v -= g[[a, d]];
            }
            v
        });
        assert_eq!((&tg - &expected).max_abs_value(), 0.0);
    }
}

#[test]
fn tilde_matches_brute_force_over_200_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..200 {
        let n = 2 + k % 3;
        let rank = k % 4;
        let t = random_tensor(random_shape(n, rank, &mut rng), &mut rng);
        let diff = (&tilde(&t) - &tilde_brute(&t)).max_abs_value();
        assert!(diff <= 1e-14, "case {k}: {diff}");
    }
}

#[test]
fn product_rule_with_brute_force_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = random_tensor(Shape::pq(3, 1, 1), &mut rng);
    let b = random_tensor(Shape::pq(3, 0, 1), &mut rng);
    assert!(tilde_product_rule_residual(&a, &b).unwrap().max_abs_value() <= 1e-14);

    // left side expanded independently
    let lhs = tilde_brute(&a.outer(&b).unwrap());
    let (ta, tb) = (tilde_brute(&a), tilde_brute(&b));
    let rhs = Tensor::from_fn(lhs.shape().clone(), |i| {
        let (c, d, e, x, y) = (i[0], i[1], i[2], i[3], i[4]);
        ta[[c, d, x, y]] * b[[e]] + a[[c, d]] * tb[[e, x, y]]
    });
    assert!((&lhs - &rhs).max_abs_value() <= 1e-14);
}

#[test]
fn leibniz_rule_over_200_seeded_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let start = std::time::Instant::now();
    for k in 0..200 {
        let n = 2 + k % 3;
        let t = random_tensor(random_shape(n, k % 3, &mut rng), &mut rng);
        let s = random_tensor(random_shape(n, (k / 3) % 3, &mut rng), &mut rng);
        let r = tilde_product_rule_residual(&t, &s).unwrap().max_abs_value();
        assert!(r <= 1e-14, "case {k}: {r}");
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tilde_is_linear(seed in any::<u64>(), n in 2usize..=4, rank in 0usize..=3,
                       alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = random_shape(n, rank, &mut rng);
        let t = random_tensor(shape.clone(), &mut rng);
        let s = random_tensor(shape, &mut rng);
        let lhs = tilde(&(&t.scale(alpha) + &s.scale(beta)));
        let rhs = &tilde(&t).scale(alpha) + &tilde(&s).scale(beta);
        prop_assert!((&lhs - &rhs).max_abs_value() <= 1e-13);
    }

    #[test]
    fn trace_of_tilde_is_p_minus_q_times_t(seed in any::<u64>(), n in 2usize..=4, rank in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tensor(random_shape(n, rank, &mut rng), &mut rng);
        let r = t.rank();
        let trace = tilde(&t).contract(r, r + 1).unwrap();
        let weight = t.shape().p() as f64 - t.shape().q() as f64;
        prop_assert!((&trace - &t.scale(weight)).max_abs_value() <= 1e-13);
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>(), n in 2usize..=3, ra in 0usize..=2, rb in 0usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tensor(random_shape(n, ra, &mut rng), &mut rng);
        let s = random_tensor(random_shape(n, rb, &mut rng), &mut rng);
        prop_assert!(tilde_product_rule_residual(&t, &s).unwrap().max_abs_value() <= 1e-14);
    }

    #[test]
    fn raise_then_lower_roundtrip(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = metric(n, &mut rng);
        let ginv = tilde_core::field::inverse_metric(&g);
        let t = random_tensor(Shape::pq(n, 0, 2), &mut rng);
        let back = t.raise(1, &ginv).unwrap().lower(1, &g).unwrap();
        prop_assert!((&back - &t).max_abs_value() <= 1e-12);
    }
}
