//! Property suites for the exact kernels and the block model: algebraic laws
//! of the scalar field and matrix operations, rank identities against closed
//! forms, rho additivity, skew canonicalization invariants, and verdict
//! invariance under the permutation and J_1(0) laws.

mod common;

use common::*;
use proptest::prelude::{any, ProptestConfig};
use proptest::{prop_assert_eq, proptest};
use rand::prelude::*;

use xtax_core::cfc_model::{parse_spec, CfcSpec};
use xtax_core::planner::{decide, reduce_type0, reduce_type_i, reduce_type_ii};
use xtax_core::skew_canon::{is_skew, skew_canonicalize};
use xtax_core::{DenseMatrix, GaussianRational};

#[test]
fn rank_is_transpose_invariant_on_200_random_matrices() {
    let mut rng = rng(11);
    for _ in 0..200 {
        let rows = rng.gen_range(0..=7);
        let cols = rng.gen_range(0..=7);
        let m = random_matrix(&mut rng, rows, cols);
        assert_eq!(m.rank(), m.transpose().rank());
    }
}

#[test]
fn rank_is_invariant_under_invertible_factors() {
    let mut rng = rng(12);
    for _ in 0..60 {
        let n = rng.gen_range(1..=6);
        let m = random_matrix(&mut rng, n, n);
        let p = random_invertible(&mut rng, n);
        let q = random_invertible(&mut rng, n);
        let pmq = p.mul(&m).unwrap().mul(&q).unwrap();
        assert_eq!(pmq.rank(), m.rank());
    }
}

#[test]
fn inverse_really_inverts() {
    let mut rng = rng(13);
    for _ in 0..40 {
        let n = rng.gen_range(1..=6);
        let p = random_invertible(&mut rng, n);
        let inv = p.inverse().unwrap();
        assert_eq!(p.mul(&inv).unwrap(), DenseMatrix::identity(n));
    }
}

#[test]
fn direct_sum_is_associative_with_empty_neutral() {
    let mut rng = rng(14);
    for _ in 0..40 {
        let rand_mat = |rng: &mut rand_chacha::ChaCha8Rng| {
            let rows = rng.gen_range(0..4);
            let cols = rng.gen_range(0..4);
            random_matrix(rng, rows, cols)
        };
        let a = rand_mat(&mut rng);
        let b = rand_mat(&mut rng);
        let c = rand_mat(&mut rng);
        let left = DenseMatrix::direct_sum(&[DenseMatrix::direct_sum(&[a.clone(), b.clone()]), c.clone()]);
        let right = DenseMatrix::direct_sum(&[a.clone(), DenseMatrix::direct_sum(&[b, c])]);
        assert_eq!(left, right);
        let e = DenseMatrix::zero(0, 0);
        assert_eq!(DenseMatrix::direct_sum(&[e.clone(), a.clone(), e]), DenseMatrix::direct_sum(&[a]));
    }
}

#[test]
fn rho_is_additive_on_200_random_concatenations() {
    let mut rng = rng(15);
    let cfg = common::SpecConfig { allow_gamma_1_2: true, ..Default::default() };
    for _ in 0..200 {
        let a = random_spec(&mut rng, &cfg);
        let b = random_spec(&mut rng, &cfg);
        assert_eq!(a.concat(&b).rho().quarters, a.rho().quarters + b.rho().quarters);
    }
}

#[test]
fn rank_deficit_identity_with_j1_extension() {
    // n - rank(A + A^T) = j1 + j_odd + gamma_even + 2 h_minus_odd.
    let mut rng = rng(16);
    let cfg = common::SpecConfig { allow_gamma_1_2: true, max_size: 10, ..Default::default() };
    for _ in 0..120 {
        let spec = random_spec(&mut rng, &cfg);
        let c = spec.census();
        let a = spec.materialize();
        let rank = a.add(&a.transpose()).unwrap().rank();
        assert_eq!(
            c.n - rank,
            c.j1 + c.j_odd + c.gamma_even + 2 * c.h_minus_odd,
            "spec {spec}"
        );
        assert_eq!(rank, spec.rank_a_plus_at_formula(), "spec {spec}");
    }
}

#[test]
fn strip_j1_preserves_rho_on_random_specs() {
    let mut rng = rng(17);
    let cfg = common::SpecConfig { allow_gamma_1_2: true, ..Default::default() };
    for _ in 0..100 {
        let spec = random_spec(&mut rng, &cfg).append_j1(rng.gen_range(0..4));
        let (stripped, _) = spec.strip_j1();
        assert_eq!(stripped.rho(), spec.rho());
    }
}

#[test]
fn skew_canonicalization_invariants_on_200_random_inputs() {
    let mut rng = rng(18);
    for _ in 0..200 {
        let n = rng.gen_range(0..=10);
        let b = random_skew(&mut rng, n);
        assert!(is_skew(&b).unwrap());
        let red = skew_canonicalize(&b).unwrap();
        // q is invertible, the congruence lands exactly on the canonical
        // form, and the skew rank is even.
        assert_eq!(red.q.rank(), n);
        assert_eq!(b.congruence_by(&red.q).unwrap(), red.target().materialize());
        assert_eq!(b.rank(), 2 * red.m);
    }
}

#[test]
fn skew_canonicalization_is_idempotent_on_canonical_inputs() {
    for m in 0..4 {
        for pad in 0..3 {
            let t = xtax_core::SkewTarget { m, zero_pad: pad };
            let red = skew_canonicalize(&t.materialize()).unwrap();
            assert_eq!(red.m, m);
            assert_eq!(red.q, DenseMatrix::identity(t.size()));
        }
    }
}

#[test]
fn reducer_steps_are_rho_invariant_except_elimination() {
    let mut rng = rng(19);
    for _ in 0..40 {
        let cfg = common::SpecConfig { max_blocks: 3, max_size: 12, ..Default::default() };
        let spec = random_spec(&mut rng, &cfg);
        let type0: Vec<_> =
            spec.blocks().iter().filter(|b| b.kind() == xtax_core::BlockKind::Type0).cloned().collect();
        let type1: Vec<_> = spec
            .blocks()
            .iter()
            .filter(|b| b.kind() == xtax_core::BlockKind::TypeI)
            .cloned()
            .collect();
        let type2: Vec<_> = spec
            .blocks()
            .iter()
            .filter(|b| b.kind() == xtax_core::BlockKind::TypeII)
            .cloned()
            .collect();
        for cert in [
            reduce_type0(&CfcSpec::new(type0)).unwrap(),
            reduce_type_i(&CfcSpec::new(type1)).unwrap(),
            reduce_type_ii(&CfcSpec::new(type2)).unwrap(),
        ] {
            cert.verify().unwrap();
            for step in cert.steps() {
                if !step.is_elimination() {
                    assert_eq!(step.lhs().rho(), step.rhs().rho(), "step {step:?}");
                }
            }
            // The leftover past the H prefix carries rho's fractional part.
            let h = cert.target().blocks().iter().take_while(|b| b.is_h2_minus_one()).count();
            let leftover = cert.target().slice(h..cert.target().len());
            assert!(leftover.rho().quarters < 4);
            assert_eq!(leftover.rho().quarters, cert.source().rho().fractional_quarters());
        }
    }
}

#[test]
fn verdicts_invariant_under_permutation_and_j1_padding() {
    let mut rng = rng(20);
    let cfg = common::SpecConfig { allow_gamma_1_2: true, max_size: 10, ..Default::default() };
    for _ in 0..60 {
        let spec = random_spec(&mut rng, &cfg);
        let floor = spec.rho().floor() as usize;
        let m = rng.gen_range(0..=floor + 1);
        let base = decide(&spec, m).kind;

        let mut sigma: Vec<usize> = (0..spec.len()).collect();
        sigma.shuffle(&mut rng);
        assert_eq!(decide(&spec.permuted(&sigma), m).kind, base, "{spec} perm {sigma:?} m={m}");

        let padded = spec.append_j1(rng.gen_range(1..=5));
        assert_eq!(decide(&padded, m).kind, base, "{spec} padded m={m}");
    }
}

#[test]
fn solve_verifies_on_100_random_consistent_queries() {
    let mut rng = rng(21);
    for _ in 0..100 {
        let spec = random_spec(&mut rng, &Default::default());
        let floor = spec.rho().floor() as usize;
        let m = rng.gen_range(0..=floor);
        let (x, cert) = xtax_core::solve(&spec, m).unwrap();
        assert!(xtax_core::verify_spec(&spec, &x, &CfcSpec::h2_power(m).materialize()).unwrap());
        assert_eq!(cert.target(), &CfcSpec::h2_power(m));
        // Necessity in quarters: rank(B) = 2m <= 2 rho(A), i.e. 4m <= quarters.
        assert!(4 * (m as u64) <= spec.rho().quarters);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transpose_of_product_is_reversed_product(
        seed in any::<u64>(),
        n in 1usize..5,
        k in 1usize..5,
        m in 1usize..5,
    ) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, k);
        let b = random_matrix(&mut r, k, m);
        let lhs = a.mul(&b).unwrap().transpose();
        let rhs = b.transpose().mul(&a.transpose()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn field_ops_distribute(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pool = scalar_pool();
        let pick = |r: &mut rand_chacha::ChaCha8Rng| {
            use rand::prelude::IteratorRandom;
            pool.iter().choose(r).unwrap().clone()
        };
        let (a, b, c) = (pick(&mut r), pick(&mut r), pick(&mut r));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn dsl_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cfg = common::SpecConfig { allow_gamma_1_2: true, ..Default::default() };
        let spec = random_spec(&mut r, &cfg);
        let text = xtax_core::cfc_model::format_spec(&spec);
        prop_assert_eq!(parse_spec(&text).unwrap(), spec);
    }

    #[test]
    fn matrix_json_round_trips(seed in any::<u64>(), rows in 0usize..5, cols in 0usize..5) {
        let mut r = rng(seed);
        let m = random_matrix(&mut r, rows, cols);
        let json = m.to_json();
        let back = DenseMatrix::from_json(&json).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.to_json(), json);
    }
}

#[test]
fn gaussian_rational_division_round_trip() {
    let pool = scalar_pool();
    for a in &pool {
        for b in &pool {
            if b.is_zero() {
                continue;
            }
            let q = a.checked_div(b).unwrap();
            assert_eq!(&q * b, a.clone());
        }
    }
    assert!(GaussianRational::one().checked_div(&GaussianRational::zero()).is_err());
}
