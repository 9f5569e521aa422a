#![allow(dead_code)]

use num_complex::Complex64;
use qalgebra::CMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix by an independent route: the real
/// symmetric embedding `[[Re, -Im], [Im, Re]]` doubles every eigenvalue.
pub fn hermitian_eigenvalues_via_real_embedding(h: &CMatrix) -> Vec<f64> {
    let n = h.nrows();
    let m = nalgebra::DMatrix::from_fn(2 * n, 2 * n, |r, col| {
        let (i, j) = (r % n, col % n);
        let z = h[(i, j)];
        match (r < n, col < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().cloned().collect();
    vals.sort_by(f64::total_cmp);
    vals.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}
