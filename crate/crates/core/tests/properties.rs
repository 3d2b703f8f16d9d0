use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use cfwords_core::lyapunov::{estimate_exponents, MeasureSampler};
use cfwords_core::mcfa::{delta_expand, primitivity_scan, selmer_conjugacy_check, step_fc, unstep_fc};
use cfwords_core::rauzy::{pairwise_partial_sum, partial_sum_points, solve_beta, ColorMode};
use cfwords_core::subst::regroup;
use cfwords_core::words::{abelianization, balance_profile, sadic_prefix, sadic_prefix_blocks};
use cfwords_core::{DirectiveWord, IntMatrix3, Point, RationalVector3, Substitution, WordPrefix};

fn rat(v: [u32; 3]) -> [BigRational; 3] {
    v.map(|x| BigRational::from_integer(BigInt::from(x)))
}

fn nonzero_point() -> impl Strategy<Value = [u32; 3]> {
    prop::array::uniform3(0u32..10_000).prop_filter("non-zero", |v| v.iter().any(|&x| x > 0))
}

proptest! {
    #[test]
    fn step_is_reconstructed_by_its_branch_matrix(v in nonzero_point()) {
        let x = rat(v);
        let (y, b) = step_fc(&x).unwrap();
        prop_assert_eq!(unstep_fc(&y, b).unwrap(), x.clone());
        let m = IntMatrix3::generator(b).unwrap();
        let back: Vec<BigRational> = (0..3)
            .map(|i| (0..3).map(|j| BigRational::from_integer(m.entry(i, j).clone()) * &y[j]).sum())
            .collect();
        prop_assert_eq!(back, x.to_vec());
    }

    #[test]
    fn step_commutes_with_scaling(v in nonzero_point(), k in 1u32..50) {
        let x = rat(v);
        let scaled = x.clone().map(|c| c * BigRational::from_integer(BigInt::from(k)));
        let (y, b) = step_fc(&x).unwrap();
        let (ys, bs) = step_fc(&scaled).unwrap();
        prop_assert_eq!(b, bs);
        prop_assert_eq!(ys, y.map(|c| c * BigRational::from_integer(BigInt::from(k))));
    }

    #[test]
    fn expansion_letters_select_a_cone_containing_the_point(v in nonzero_point(), n in 1usize..30) {
        let x = RationalVector3(rat(v));
        let e = delta_expand(&Point::Exact(x.clone()), n).unwrap();
        let m = IntMatrix3::product_of(&e.letters[..n.min(e.letters.len())]).unwrap();
        let adj = m.adjugate();
        // det = ±1, so the preimage is integral up to sign
        let pre = adj.mul_vec(&x.to_integer_ray());
        let sign = m.det();
        prop_assert!(pre.iter().all(|c| c * &sign >= BigInt::from(0)));
    }

    #[test]
    fn selmer_conjugacy_on_random_points(v in nonzero_point(), n in 1usize..25) {
        let r = selmer_conjugacy_check(&RationalVector3(rat(v)), n).unwrap();
        prop_assert!(r.holds);
        prop_assert!(r.matrices_intertwine);
    }

    #[test]
    fn incidence_matrix_intertwines_abelianization(w in prop::collection::vec(1u8..=3, 0..60), name in prop::sample::select(vec!["c1", "c2", "c121", "c211", "s1", "zl"])) {
        let s = Substitution::builtin(name).unwrap();
        let image = s.apply(&w).unwrap();
        let ab = abelianization(&w).map(|c| BigInt::from(c));
        let expected = s.incidence().mul_vec(&ab);
        prop_assert_eq!(abelianization(&image).map(|c| BigInt::from(c)), expected);
    }

    #[test]
    fn balance_rows_are_bounded_by_window(w in prop::collection::vec(1u8..=3, 1..200), k in 1usize..50) {
        let p = WordPrefix::new(w).unwrap();
        let k = k.min(p.len());
        let b = balance_profile(&p, k).unwrap();
        for (n, row) in b.by_window.iter().enumerate() {
            prop_assert!(row.iter().all(|&c| c <= n as u64 + 1));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn letter_and_block_routes_agree(seed in any::<u64>()) {
        let s = MeasureSampler::bernoulli(0.5, seed).unwrap();
        let letters: Vec<u8> = s.trajectory(0).take(600).collect();
        prop_assume!(primitivity_scan(&letters).unwrap().positive_window_found);
        let (blocks, _) = regroup(&letters).unwrap();
        let a = sadic_prefix(&DirectiveWord::prefix(letters).unwrap(), 2000).unwrap();
        let b = sadic_prefix_blocks(&blocks, 2000).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pairwise_sum_matches_sequential(n in 0usize..3000) {
        let ctx = solve_beta(128).unwrap();
        let p = sadic_prefix(&DirectiveWord::parse("(12)^w").unwrap(), 3001).unwrap();
        let pts = partial_sum_points(&ctx, &p, ColorMode::Current).unwrap();
        let s = pairwise_partial_sum(&ctx, &p, n).unwrap();
        prop_assert!((s.re - pts[n].re).abs() < 1e-9 && (s.im - pts[n].im).abs() < 1e-9);
    }
}

#[test]
fn pairwise_sum_rejects_long_requests() {
    let ctx = solve_beta(128).unwrap();
    let p = WordPrefix::parse("1321").unwrap();
    assert!(pairwise_partial_sum(&ctx, &p, 5).is_err());
}

#[test]
fn exponents_move_continuously_with_bernoulli_parameter() {
    let at = |p: f64| estimate_exponents(&MeasureSampler::bernoulli(p, 11).unwrap(), 200_000, 8, 32).unwrap();
    let (a, b) = (at(0.5), at(0.51));
    assert!((a.theta1 - b.theta1).abs() < 0.01, "{} vs {}", a.theta1, b.theta1);
    assert!((a.theta2 - b.theta2).abs() < 0.01, "{} vs {}", a.theta2, b.theta2);
    assert!(a.theta2 < 0.0);
}
