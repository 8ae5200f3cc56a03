//! Property tests: structural invariants and naive-oracle equivalences.

mod common;

use orthofield::field::{FieldModel, TorusFieldSpec, TorusModel};
use orthofield::quantile::{clt_condition, tightness_condition, ProfileKind, QuantileProfile};
use orthofield::sums::SumProcess;
use orthofield::transfer::{
    check_identities, coset_representatives, coset_representatives_bruteforce, FourierObservable, IntMatrix, TorusMap,
};
use proptest::prelude::*;

use common::*;

fn profile() -> impl Strategy<Value = QuantileProfile> {
    (prop::collection::vec(0.01f64..3.0, 1..5), any::<bool>()).prop_map(|(mut qs, step)| {
        qs.sort_by(|a, b| b.total_cmp(a));
        let n = qs.len();
        let mut knots: Vec<(f64, f64)> = qs.iter().enumerate().map(|(i, q)| (i as f64 / n as f64, *q)).collect();
        let kind = if step { ProfileKind::Step } else { ProfileKind::Linear };
        knots.push((1.0, if step { *qs.last().unwrap() } else { 0.0 }));
        QuantileProfile::new(kind, knots).unwrap()
    })
}

fn geometric(rate: f64, len: usize) -> Vec<f64> {
    (0..len).map(|k| rate.powi(k as i32)).collect()
}

fn observable() -> impl Strategy<Value = FourierObservable> {
    prop::collection::vec((1i64..8, -1.0f64..1.0, any::<bool>()), 1..4).prop_map(|terms| {
        let mut f = FourierObservable::zero(1);
        for (n, a, sine) in terms {
            if sine {
                f.add_sin(&[n], a);
            } else {
                f.add_cos(&[n], a);
            }
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn clt_condition_is_monotone_in_the_coefficients(q in profile(), r1 in 0.05f64..0.9, bump in 0.0f64..0.09) {
        let r2 = r1 + bump;
        let small = clt_condition(&[geometric(r1, 80), geometric(r1, 80)], &q, 64).unwrap();
        let large = clt_condition(&[geometric(r2, 80), geometric(r2, 80)], &q, 64).unwrap();
        prop_assert!(small.value <= large.value * (1.0 + 1e-12));
    }

    #[test]
    fn int_qg_matches_the_composite_quadrature(q in profile(), y in 0.0f64..1.0) {
        let a = q.int_qg(y);
        let b = q.int_qg_composite(y);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn tightness_forms_agree(q in profile(), r in 0.1f64..0.7, d in 1usize..3) {
        let rep = tightness_condition(&geometric(r, 200), &q, d, 128).unwrap();
        let alt = rep.alternate_value.unwrap();
        prop_assert!((alt - rep.value).abs() <= 0.01 * rep.value.abs());
    }

    #[test]
    fn transfer_identities_hold(f in observable(), g in observable(), p in 2i64..6, s in 2i64..6) {
        let r = check_identities(&TorusMap::scalar(p).unwrap(), &TorusMap::scalar(s).unwrap(), &f, &g).unwrap();
        prop_assert!(r.max_deviation < 1e-10, "{:?}", r);
    }

    #[test]
    fn prefix_sums_and_maxima_match_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = random_shape(&mut r);
        let values = integer_grid(&mut r, &shape);
        let sp = SumProcess::new(&shape, &values).unwrap();
        for i in indices(&shape) {
            prop_assert_eq!(sp.s(&i), brute_prefix(&shape, &values, &i));
        }
        prop_assert_eq!(sp.max_rect(), brute_max_rect(&shape, &values));
        prop_assert_eq!(sp.total(), values.iter().sum::<f64>());
    }

    #[test]
    fn w_at_matches_brute_force_and_is_lipschitz(seed in any::<u64>(), eps in 0.0f64..0.05) {
        let mut r = rng(seed);
        let shape = random_shape(&mut r);
        let values = integer_grid(&mut r, &shape);
        let sp = SumProcess::new(&shape, &values).unwrap();
        let t: Vec<f64> = shape.iter().enumerate().map(|(j, _)| ((seed >> (8 * j)) & 63) as f64 / 64.0).collect();
        prop_assert_eq!(sp.w_at(&t), brute_w(&shape, &values, &t));
        let s: Vec<f64> = t.iter().map(|v| (v + eps).min(1.0)).collect();
        let cells: f64 = shape.iter().product::<usize>() as f64;
        let xmax = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let bound: f64 = (0..shape.len()).map(|j| (s[j] - t[j]) * cells).sum::<f64>() * xmax / cells.sqrt();
        prop_assert!((sp.w_at(&s) - sp.w_at(&t)).abs() <= bound + 1e-9);
        prop_assert_eq!(sp.w_at(&vec![1.0; shape.len()]), sp.total() / cells.sqrt());
        prop_assert_eq!(sp.w_at(&vec![0.0; shape.len()]), 0.0);
    }

    #[test]
    fn coset_representatives_match_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r);
        let fast = coset_representatives(&int_matrix(&a)).unwrap();
        let slow = coset_representatives_bruteforce(&int_matrix(&a)).unwrap();
        prop_assert_eq!(fast.len() as u64, abs_det(&a));
        prop_assert_eq!(slow.len(), fast.len());
        // every brute-force representative is congruent to exactly one fast one
        for x in &slow {
            let hits = fast
                .iter()
                .filter(|y| in_lattice(&a, &x.iter().zip(y.iter()).map(|(p, q)| p - q).collect::<Vec<_>>()))
                .count();
            prop_assert_eq!(hits, 1);
        }
    }

    #[test]
    fn torus_field_is_shift_consistent(seed in any::<u64>(), a in 0usize..3, b in 0usize..3) {
        let model = TorusModel::new(TorusFieldSpec::scalar(&[2, 3], FourierObservable::cos(&[1], 1.0))).unwrap();
        let x = model.start_point(seed as u128);
        let full = model.values_from(&x, &[6, 6]);
        let shifted = model.values_from(&model.orbit_point(&x, &[a, b]), &[6 - a, 6 - b]);
        for i in 0..6 - a {
            for j in 0..6 - b {
                prop_assert_eq!(shifted[i * (6 - b) + j], full[(i + a) * 6 + j + b]);
            }
        }
    }
}

#[test]
fn iid_linear_field_is_stationary_in_mean_and_variance() {
    let model = FieldModel::linear(orthofield::field::LinearFieldSpec {
        coefficients: orthofield::field::CoefficientRule::Single,
        ..Default::default()
    })
    .unwrap();
    // Var(U(-1, 1)) = 1/3 at every cell
    let reps = 3000;
    let mut sums = [0.0f64; 2];
    let mut squares = [0.0f64; 2];
    for s in 0..reps {
        let v = model.sample_values(&[5, 5], s as u128 * 7919 + 1).unwrap();
        for (c, idx) in [0usize, 24].iter().enumerate() {
            sums[c] += v[*idx];
            squares[c] += v[*idx] * v[*idx];
        }
    }
    for c in 0..2 {
        let var = squares[c] / reps as f64;
        assert!((sums[c] / reps as f64).abs() < 4.0 * (1.0f64 / 3.0 / reps as f64).sqrt());
        assert!((var - 1.0 / 3.0).abs() < 0.03, "{var}");
    }
}

#[test]
fn commuting_matrix_pair_identities() {
    let a = TorusMap::new(IntMatrix::from_rows(&[vec![1, -1], vec![1, 1]]).unwrap()).unwrap();
    let b = TorusMap::new(IntMatrix::from_rows(&[vec![3, 0], vec![0, 3]]).unwrap()).unwrap();
    let f = FourierObservable::cos(&[1, 0], 1.0).add(&FourierObservable::sin(&[1, 2], 0.5));
    let g = FourierObservable::cos(&[0, 1], 0.3);
    let r = check_identities(&a, &b, &f, &g).unwrap();
    assert!(r.max_deviation < 1e-10, "{r:?}");
}
