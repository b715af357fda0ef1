//! Shared generators for the property and acceptance suites. Everything is
//! seeded; reruns are bit-identical.
#![allow(dead_code)] // each test binary uses its own subset

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use xtax_core::cfc_model::{Block, CfcSpec};
use xtax_core::{DenseMatrix, GaussianRational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn g(s: &str) -> GaussianRational {
    s.parse().unwrap()
}

/// Small exact scalars used for random matrices: 0, +-1, +-i, +-1/2.
pub fn scalar_pool() -> Vec<GaussianRational> {
    ["0", "1", "-1", "i", "-i", "1/2", "-1/2"].iter().map(|s| g(s)).collect()
}

/// Candidate Type-II parameters; validity against the block size is checked
/// at construction time.
pub fn mu_pool() -> Vec<GaussianRational> {
    ["2", "1/2", "3", "-2", "1+1i", "5", "-3", "2i", "7/2", "1", "-1"]
        .iter()
        .map(|s| g(s))
        .collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    let pool = scalar_pool();
    let entries = (0..rows * cols).map(|_| pool.choose(rng).unwrap().clone()).collect();
    DenseMatrix::new(rows, cols, entries).unwrap()
}

/// Random skew-symmetric matrix with entries in {0, +-1, +-2, +-i}.
pub fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let pool: Vec<GaussianRational> =
        ["0", "1", "-1", "2", "-2", "i", "-i"].iter().map(|s| g(s)).collect();
    let mut m = DenseMatrix::zero(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = pool.choose(rng).unwrap().clone();
            m.set(j, i, -&v);
            m.set(i, j, v);
        }
    }
    m
}

/// Random invertible matrix: unit lower-triangular times unit
/// upper-triangular times a permutation, all exact.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let pool = scalar_pool();
    let mut lower = DenseMatrix::identity(n);
    let mut upper = DenseMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            lower.set(i, j, pool.choose(rng).unwrap().clone());
            upper.set(j, i, pool.choose(rng).unwrap().clone());
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let p = DenseMatrix::from_permutation(&perm).unwrap();
    lower.mul(&upper).unwrap().mul(&p).unwrap()
}

pub struct SpecConfig {
    pub max_blocks: usize,
    pub max_size: usize,
    pub allow_gamma_1_2: bool,
    pub allow_type_i: bool,
}

impl Default for SpecConfig {
    fn default() -> Self {
        SpecConfig { max_blocks: 4, max_size: 14, allow_gamma_1_2: false, allow_type_i: true }
    }
}

pub fn random_block(rng: &mut ChaCha8Rng, cfg: &SpecConfig) -> Block {
    let mus = mu_pool();
    loop {
        let kind = rng.gen_range(0..3);
        match kind {
            0 => {
                let size = rng.gen_range(1..=cfg.max_size);
                return Block::type0(size).unwrap();
            }
            1 => {
                if !cfg.allow_type_i {
                    continue;
                }
                let min = if cfg.allow_gamma_1_2 { 1 } else { 3 };
                let size = rng.gen_range(min..=cfg.max_size.max(min));
                return Block::type_i(size).unwrap();
            }
            _ => {
                let size = 2 * rng.gen_range(1..=cfg.max_size / 2);
                let mu = mus.choose(rng).unwrap().clone();
                if let Ok(b) = Block::type_ii(size, mu) {
                    return b;
                }
            }
        }
    }
}

pub fn random_spec(rng: &mut ChaCha8Rng, cfg: &SpecConfig) -> CfcSpec {
    let count = rng.gen_range(1..=cfg.max_blocks);
    CfcSpec::new((0..count).map(|_| random_block(rng, cfg)).collect())
}
