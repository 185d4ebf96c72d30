//! Fixed inputs for the kernel benchmarks.

use rhdist::gen;
use rhdist::{DistPairing, Germ, Mat};

pub fn germs(n: usize) -> Vec<Germ> {
    let mut r = gen::rng(2024);
    (0..n).map(|_| gen::germ(&mut r)).collect()
}

pub fn nilpotents(n: usize, dim: usize) -> Vec<Mat> {
    let mut r = gen::rng(2025);
    (0..n).map(|_| gen::nilpotent(&mut r, dim).0).collect()
}

pub fn pairings(n: usize) -> Vec<DistPairing> {
    let mut r = gen::rng(2026);
    (0..n).map(|_| gen::pairing_in(&mut r, 3, false)).collect()
}
