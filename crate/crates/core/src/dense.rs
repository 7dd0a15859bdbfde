//! Dense reference arithmetic, independent of the symbol path.
//!
//! Used to cross-check [`crate::circulant`]: nothing in here evaluates a
//! symbol or a DFT.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circulant::FirstRow;
use crate::error::{Error, Result};

/// Largest dimension the dense oracle accepts.
pub const DENSE_LIMIT: usize = 256;
pub const ORACLE_MAX_ITERATIONS: usize = 10_000;
pub const ORACLE_SEED: u64 = 0x0005_eed0_fc1c;
const RAYLEIGH_RTOL: f64 = 1e-14;
/// `B` is replaced by `B^(2^SQUARINGS)` before iterating, so eigenvalues
/// within a relative `~1e-11` of the top one are the only ones left.
const SQUARINGS: usize = 40;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Row `r` is the first row shifted cyclically right `r` times.
    pub fn circulant(x: &FirstRow) -> Self {
        let n = x.len();
        let xs = x.entries();
        let mut m = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m.data[r * n + c] = xs[(c + n - r) % n];
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.n + c]
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self^m` by repeated multiplication (m-1 products).
    pub fn pow(&self, m: u32) -> Self {
        let mut acc = self.clone();
        for _ in 1..m {
            acc = acc.mul(self);
        }
        if m == 0 {
            Self::identity(self.n)
        } else {
            acc
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `C_x^* C_x` formed densely.
pub fn dense_gram(x: &FirstRow) -> DenseMatrix {
    let c = DenseMatrix::circulant(x);
    c.adjoint().mul(&c)
}

/// Spectral norm of `C_x` by power iteration on the dense `C_x^* C_x`.
///
/// The iteration runs on a repeated square of `C_x^* C_x`, so nearly equal
/// top singular values do not slow it down; the estimate is the Rayleigh
/// quotient of `C_x^* C_x` itself.
pub fn dense_norm_oracle(x: &FirstRow) -> Result<f64> {
    dense_norm_oracle_with(x, ORACLE_SEED, ORACLE_MAX_ITERATIONS)
}

/// As [`dense_norm_oracle`] with an explicit start-vector seed and iteration cap.
pub fn dense_norm_oracle_with(x: &FirstRow, seed: u64, max_iterations: usize) -> Result<f64> {
    let n = x.len();
    if n > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge {
            n,
            limit: DENSE_LIMIT,
        });
    }
    let b = dense_gram(x);
    let mut p = b.clone();
    for _ in 0..SQUARINGS {
        p = p.mul(&p);
        let scale = p.max_abs();
        if scale == 0.0 {
            return Ok(0.0);
        }
        p.data.iter_mut().for_each(|z| *z /= scale);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    normalize(&mut v);

    let mut previous: Option<f64> = None;
    for _ in 0..max_iterations {
        // v has unit length, so <v, Bv> is the Rayleigh quotient
        let bv = b.mul_vec(&v);
        let rayleigh: f64 = v.iter().zip(&bv).map(|(a, b)| (a.conj() * b).re).sum();
        let w = p.mul_vec(&v);
        let w_norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if w_norm == 0.0 {
            // start vector orthogonal to the top eigenspace
            break;
        }
        if let Some(prev) = previous {
            if (rayleigh - prev).abs() < RAYLEIGH_RTOL * rayleigh.abs() {
                return Ok(rayleigh.max(0.0).sqrt());
            }
        }
        previous = Some(rayleigh);
        v = w.into_iter().map(|z| z / w_norm).collect();
    }
    Err(Error::NotConverged {
        iterations: max_iterations,
        estimate: previous.unwrap_or(0.0).max(0.0).sqrt(),
    })
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
}
