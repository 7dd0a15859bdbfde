//! Circulant matrices described by their first row.
//!
//! A circulant `C_x` is never materialized here. Its eigenvalues are the
//! values of the symbol `c(t) = x_0 + x_1 t + ... + x_{n-1} t^{n-1}` on the
//! n-th roots of unity, so the spectral norm, the Gram circulant `C_x^* C_x`
//! and all of its powers are handled in the symbol domain with plain O(n^2)
//! forward/inverse DFT sums.
//!
//! Row orientation: row `r` of `C_x` is `x` cyclically shifted right `r`
//! times, so `C_x[r][c] = x[(c - r) mod n]`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Imaginary residue below `CLAMP_RELATIVE * max|symbol|` is dropped from
/// rows that are real in exact arithmetic.
pub const CLAMP_RELATIVE: f64 = 1e-10;

/// First row `x = (x_0, ..., x_{n-1})` of a circulant matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstRow {
    entries: Vec<Complex64>,
}

impl FirstRow {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyRow);
        }
        if let Some(index) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&re| Complex64::new(re, 0.0)).collect())
    }

    /// `(1, 0, ..., 0)`, the identity.
    pub fn identity(n: usize) -> Result<Self> {
        let mut entries = vec![Complex64::new(0.0, 0.0); n];
        *entries.first_mut().ok_or(Error::ZeroDimension)? = Complex64::new(1.0, 0.0);
        Ok(Self { entries })
    }

    /// `(0, 1, 0, ..., 0)`, the cyclic backward shift.
    pub fn shift(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); n];
        entries[1 % n] += Complex64::new(1.0, 0.0);
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Real parts, if every imaginary part is exactly zero.
    pub fn real_entries(&self) -> Option<Vec<f64>> {
        self.is_real()
            .then(|| self.entries.iter().map(|z| z.re).collect())
    }

    /// `max_j |x_j|`.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `sum_j |x_j|`, an upper bound for every symbol value.
    pub fn abs_sum(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).sum()
    }

    /// Euclidean norm of the row.
    pub fn norm2(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> Result<Self> {
        Self::new(self.entries.iter().map(|&z| z * s).collect())
    }

    /// Row rotated left by `k`: entry `j` of the result is `x[(j + k) mod n]`.
    pub fn rotated(&self, k: usize) -> Self {
        let mut entries = self.entries.clone();
        let n = entries.len();
        entries.rotate_left(k % n);
        Self { entries }
    }
}

/// The n-th roots of unity `omega^k`, `omega = exp(2 pi i / n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootsOfUnity {
    values: Vec<Complex64>,
}

impl RootsOfUnity {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let values = (0..n)
            .map(|k| {
                if k == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::from_polar(1.0, TAU * k as f64 / n as f64)
                }
            })
            .collect();
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `omega^e` for any integer exponent, reduced mod n.
    pub fn pow(&self, e: i64) -> Complex64 {
        let n = self.values.len() as i64;
        self.values[e.rem_euclid(n) as usize]
    }
}

pub fn roots_of_unity(n: usize) -> Result<RootsOfUnity> {
    RootsOfUnity::new(n)
}

/// Values `c(omega^k)` of the symbol on the roots of unity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolValues {
    values: Vec<Complex64>,
    max_abs: f64,
}

impl SymbolValues {
    fn from_values(values: Vec<Complex64>) -> Self {
        let max_abs = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Self { values, max_abs }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `||c||_inf`, which is the spectral norm of the circulant.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// `|c(1)|`, the modulus of the row sum.
    pub fn at_one(&self) -> f64 {
        self.values[0].norm()
    }

    /// Largest modulus over `k >= 1` together with the first index attaining it.
    pub fn runner_up(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, z)| (k, z.norm()))
            .fold(None, |best, (k, m)| match best {
                Some((_, bm)) if bm >= m => best,
                _ => Some((k, m)),
            })
    }
}

/// Forward and inverse DFT on a fixed size, evaluated by direct summation.
#[derive(Debug, Clone)]
pub struct DftPlan {
    roots: RootsOfUnity,
}

impl DftPlan {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            roots: RootsOfUnity::new(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.roots.n()
    }

    pub fn roots(&self) -> &RootsOfUnity {
        &self.roots
    }

    /// `c(omega^k)` for every k, Horner's scheme per root.
    pub fn symbol(&self, row: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(row.len(), self.n());
        self.roots
            .values()
            .iter()
            .map(|&t| {
                row.iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, &x| acc * t + x)
            })
            .collect()
    }

    /// `row[j] = (1/n) sum_k values[k] omega^{-jk}`.
    pub fn inverse(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        debug_assert_eq!(values.len(), n);
        let scale = 1.0 / n as f64;
        (0..n)
            .map(|j| {
                let sum: Complex64 = values
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| v * self.roots.pow(-((j * k % n) as i64)))
                    .sum();
                sum * scale
            })
            .collect()
    }

    /// Inverse transform of real values, i.e. a real-symbol circulant row.
    pub fn inverse_real(&self, values: &[f64]) -> Vec<Complex64> {
        let n = self.n();
        debug_assert_eq!(values.len(), n);
        let scale = 1.0 / n as f64;
        (0..n)
            .map(|j| {
                let sum: Complex64 = values
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| self.roots.pow(-((j * k % n) as i64)) * v)
                    .sum();
                sum * scale
            })
            .collect()
    }

    pub fn symbol_values(&self, row: &FirstRow) -> SymbolValues {
        SymbolValues::from_values(self.symbol(row.entries()))
    }
}

/// Evaluates the symbol of `x` on the n-th roots of unity.
pub fn symbol_values(x: &FirstRow) -> SymbolValues {
    DftPlan::new(x.len())
        .expect("FirstRow is never empty")
        .symbol_values(x)
}

/// Spectral norm `||C_x||`, the largest symbol modulus.
pub fn spectral_norm(x: &FirstRow) -> f64 {
    symbol_values(x).max_abs()
}

/// First row of `B_x = C_x^* C_x` as a cyclic cross-correlation,
/// `row[k] = sum_j conj(x_j) x_{(j+k) mod n}`.
pub fn gram_row(x: &FirstRow) -> FirstRow {
    let xs = x.entries();
    let n = xs.len();
    let real = x.is_real();
    let entries = (0..n)
        .map(|k| {
            let z: Complex64 = (0..n).map(|j| xs[j].conj() * xs[(j + k) % n]).sum();
            if real {
                Complex64::new(z.re, 0.0)
            } else {
                z
            }
        })
        .collect();
    FirstRow { entries }
}

/// `B_x^m` as a first row plus its symbol `|c(omega^k)|^{2m}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramPower {
    pub m: u32,
    pub row: FirstRow,
    pub symbol: SymbolValues,
    /// Set when the symbol was divided by `||c||_inf^{2m}` to stay in range.
    pub normalized: bool,
    /// Largest `|Im row[j]|` before clamping (real inputs only, else 0).
    pub imag_residue: f64,
}

fn clamp_real(entries: &mut [Complex64], threshold: f64) -> f64 {
    let residue = entries.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    for z in entries.iter_mut() {
        if z.im.abs() < threshold {
            z.im = 0.0;
        }
    }
    residue
}

/// Computes `B_x^m` through pointwise powers of `b(t) = |c(t)|^2`.
pub fn gram_power(x: &FirstRow, m: u32) -> Result<GramPower> {
    if m == 0 {
        return Err(Error::ZeroExponent);
    }
    let plan = DftPlan::new(x.len())?;
    let symbol = plan.symbol_values(x);
    let c_max = symbol.max_abs();
    let exponent = 2.0 * m as f64;

    // ln(c_max^{2m}) must stay between the smallest normal and largest finite f64
    let log_peak = exponent * c_max.ln();
    let normalized =
        c_max > 0.0 && (log_peak >= f64::MAX.ln() || log_peak <= f64::MIN_POSITIVE.ln());

    let powers: Vec<f64> = symbol
        .values()
        .iter()
        .map(|z| {
            let modulus = if normalized {
                z.norm() / c_max
            } else {
                z.norm()
            };
            modulus.powf(exponent)
        })
        .collect();

    let mut row = plan.inverse_real(&powers);
    let power_symbol =
        SymbolValues::from_values(powers.iter().map(|&p| Complex64::new(p, 0.0)).collect());
    let imag_residue = if x.is_real() {
        clamp_real(&mut row, CLAMP_RELATIVE * power_symbol.max_abs())
    } else {
        0.0
    };

    Ok(GramPower {
        m,
        row: FirstRow { entries: row },
        symbol: power_symbol,
        normalized,
        imag_residue,
    })
}

/// Sequence of normalized Gram powers `B_x^m / ||B_x^m||` for one row.
///
/// Holds the ratios `(|c(omega^k)| / ||c||_inf)^2`, each at most 1, so any
/// exponent is safe.
#[derive(Debug, Clone)]
pub struct NormalizedPowers {
    plan: DftPlan,
    ratios: Vec<f64>,
    real: bool,
}

impl NormalizedPowers {
    pub fn new(x: &FirstRow) -> Result<Self> {
        let plan = DftPlan::new(x.len())?;
        let symbol = plan.symbol_values(x);
        Self::from_symbol(plan, &symbol, x.is_real())
    }

    pub fn from_symbol(plan: DftPlan, symbol: &SymbolValues, real: bool) -> Result<Self> {
        let c_max = symbol.max_abs();
        if c_max == 0.0 {
            return Err(Error::ZeroRow);
        }
        let ratios = symbol
            .values()
            .iter()
            .map(|z| {
                let r = z.norm() / c_max;
                r * r
            })
            .collect();
        Ok(Self { plan, ratios, real })
    }

    pub fn n(&self) -> usize {
        self.plan.n()
    }

    /// Symbol of the normalized Gram circulant, `b(omega^k) / ||b||_inf`.
    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    /// Entries of the first row of `B_x^m / ||B_x^m||`.
    pub fn row(&self, m: u32) -> Vec<Complex64> {
        let powers: Vec<f64> = self.ratios.iter().map(|r| r.powf(m as f64)).collect();
        let mut row = self.plan.inverse_real(&powers);
        if self.real {
            clamp_real(&mut row, CLAMP_RELATIVE);
        }
        row
    }
}

/// First row of `B_x^m / ||B_x^m||`.
pub fn normalized_power(x: &FirstRow, m: u32) -> Result<FirstRow> {
    if m == 0 {
        return Err(Error::ZeroExponent);
    }
    let powers = NormalizedPowers::new(x)?;
    Ok(FirstRow {
        entries: powers.row(m),
    })
}
