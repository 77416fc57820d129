#![allow(dead_code)]

use curvlab::polyfield::index_tuples;
use curvlab::{gen, TensorField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_form(r: &mut ChaCha8Rng, m: usize, k: usize, max_degree: u32) -> TensorField {
    gen::alternating_form(r, m, k, max_degree)
}

pub fn all_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    index_tuples(&vec![m; k])
}
