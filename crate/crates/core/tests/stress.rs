//! Long-running randomized stress runs, excluded from the default test pass.
//! Run with: cargo test -p xtax-core --test stress --release -- --ignored

mod common;

use common::*;
use rand::prelude::*;

use xtax_core::cfc_model::CfcSpec;
use xtax_core::planner::{decide, VerdictKind};

#[test]
#[ignore = "slow; run explicitly in release mode"]
fn boundary_completeness_on_2000_specs() {
    for seed in 0..8u64 {
        let mut r = rng(1000 + seed);
        let cfg =
            SpecConfig { max_blocks: 6, max_size: 14, allow_gamma_1_2: false, allow_type_i: true };
        for i in 0..250 {
            let spec = random_spec(&mut r, &cfg).append_j1(r.gen_range(0..3));
            let m = spec.rho().floor() as usize;
            let v = decide(&spec, m);
            assert_eq!(v.kind, VerdictKind::Consistent, "{spec} m={m} seed={seed} i={i}");
            let cert = v.certificate.unwrap();
            cert.verify().unwrap();
            let x = cert.composed_witness().unwrap();
            assert!(xtax_core::verify_spec(&spec, &x, &CfcSpec::h2_power(m).materialize()).unwrap());
            assert_eq!(decide(&spec, m + 1).kind, VerdictKind::Inconsistent);
        }
    }
}

#[test]
#[ignore = "slow; run explicitly in release mode"]
fn mixed_gamma_specs_never_break_the_planner() {
    for seed in 0..8u64 {
        let mut r = rng(2000 + seed);
        let cfg =
            SpecConfig { max_blocks: 6, max_size: 12, allow_gamma_1_2: true, allow_type_i: true };
        for _ in 0..250 {
            let spec = random_spec(&mut r, &cfg);
            for m in 0..=(spec.rho().floor() as usize + 1) {
                let v = decide(&spec, m);
                if let Some(cert) = v.certificate {
                    cert.verify().unwrap();
                }
            }
        }
    }
}
