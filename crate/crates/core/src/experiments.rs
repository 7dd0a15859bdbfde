//! Monte Carlo estimates of the portion of the unit sphere in `R^n` that
//! satisfies each condition of the chain
//! `+-x > O  =>  B > O  =>  B^2 > O  => ...  =>  x in C_n'`.
//!
//! Reproducibility contract:
//!
//! * per-dimension seed: `seed ^ (n * 0x9E3779B97F4A7C15)` (wrapping);
//! * samples are split into shards of [`SHARD_SIZE`]; shard `s` draws from
//!   ChaCha8 seeded with `seed_from_u64(row_seed)` on stream `s`;
//! * each coordinate is a standard normal (ziggurat, `rand_distr`), the
//!   vector is then scaled to unit length.
//!
//! The shard schedule depends only on the sample count, so results do not
//! depend on how many worker threads run the shards.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::circulant::{DftPlan, FirstRow, NormalizedPowers};
use crate::classify::{
    complex_equivalence, equivalence_check, power_is_positive, CheckOutcome, Membership,
    Tolerances, Verdict,
};
use crate::error::{Error, Result};

pub const SHARD_SIZE: u64 = 8192;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const FAST_SAMPLES: u64 = 100_000;
pub const DEFAULT_POWERS: [u32; 6] = [1, 2, 4, 8, 16, 32];
pub const DEFAULT_SEED: u64 = 42;
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn default_dims() -> Vec<usize> {
    (2..=10).chain(std::iter::once(20)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableSpec {
    pub dims: Vec<usize>,
    pub samples: u64,
    pub powers: Vec<u32>,
    pub seed: u64,
    #[serde(skip)]
    pub tolerances: Tolerances,
}

impl Default for TableSpec {
    fn default() -> Self {
        Self {
            dims: default_dims(),
            samples: DEFAULT_SAMPLES,
            powers: DEFAULT_POWERS.to_vec(),
            seed: DEFAULT_SEED,
            tolerances: Tolerances::default(),
        }
    }
}

impl TableSpec {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidSpec("samples must be at least 1".into()));
        }
        if self.dims.is_empty() {
            return Err(Error::InvalidSpec("no dimensions given".into()));
        }
        if let Some(n) = self.dims.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidSpec(format!("dimension {n} is below 2")));
        }
        if self.powers.contains(&0) {
            return Err(Error::InvalidSpec("powers must be positive".into()));
        }
        if self.powers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec(
                "powers must be strictly increasing".into(),
            ));
        }
        self.tolerances.validate()
    }
}

/// Hit count out of a number of trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Estimate {
    pub hits: u64,
    pub total: u64,
}

impl Estimate {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.hits as f64 / self.total as f64
        }
    }

    /// Binomial standard error `sqrt(p (1-p) / N)`.
    pub fn stderr(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let p = self.fraction();
        (p * (1.0 - p) / self.total as f64).sqrt()
    }
}

/// Column of the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    SignPositive,
    Power(u32),
    InCnPrime,
}

impl Condition {
    pub fn label(&self) -> String {
        match self {
            Condition::SignPositive => "sign_positive".into(),
            Condition::Power(m) => format!("power_{m}"),
            Condition::InCnPrime => "in_cn_prime".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub sign_positive: Estimate,
    pub powers: Vec<(u32, Estimate)>,
    /// Boundary samples are excluded from both numerator and denominator.
    pub in_cn_prime: Estimate,
    pub boundary_count: u64,
}

impl TableRow {
    /// Columns in chain order.
    pub fn columns(&self) -> Vec<(Condition, Estimate)> {
        std::iter::once((Condition::SignPositive, self.sign_positive))
            .chain(self.powers.iter().map(|&(m, e)| (Condition::Power(m), e)))
            .chain(std::iter::once((Condition::InCnPrime, self.in_cn_prime)))
            .collect()
    }

    pub fn portions(&self) -> Vec<(String, f64)> {
        self.columns()
            .into_iter()
            .map(|(c, e)| (c.label(), e.fraction()))
            .collect()
    }

    pub fn stderrs(&self) -> Vec<(String, f64)> {
        self.columns()
            .into_iter()
            .map(|(c, e)| (c.label(), e.stderr()))
            .collect()
    }

    pub fn portion(&self, condition: Condition) -> Option<f64> {
        self.columns()
            .into_iter()
            .find(|(c, _)| *c == condition)
            .map(|(_, e)| e.fraction())
    }
}

pub fn row_seed(seed: u64, n: usize) -> u64 {
    seed ^ (n as u64).wrapping_mul(GOLDEN)
}

pub fn shard_rng(row_seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(row_seed);
    rng.set_stream(shard);
    rng
}

fn unit_normals<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Uniform point on the unit sphere in `R^n`.
pub fn sample_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<FirstRow> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    FirstRow::from_real(&unit_normals(n, rng))
}

/// Uniform point on the unit sphere in `C^n`.
pub fn sample_complex_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<FirstRow> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let v = unit_normals(2 * n, rng);
    FirstRow::new(v.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Counts {
    samples: u64,
    sign: u64,
    powers: Vec<u64>,
    prime_yes: u64,
    boundary: u64,
}

impl Counts {
    fn merge(mut self, other: Counts) -> Counts {
        self.samples += other.samples;
        self.sign += other.sign;
        if self.powers.len() < other.powers.len() {
            self.powers.resize(other.powers.len(), 0);
        }
        for (a, b) in self.powers.iter_mut().zip(&other.powers) {
            *a += b;
        }
        self.prime_yes += other.prime_yes;
        self.boundary += other.boundary;
        self
    }
}

fn strictly_signed(xs: &[f64], tol: &Tolerances) -> bool {
    let scale = xs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = tol.positivity * scale;
    xs.iter().all(|&v| v > threshold) || xs.iter().all(|&v| v < -threshold)
}

fn run_shard(
    n: usize,
    spec: &TableSpec,
    plan: &DftPlan,
    seed: u64,
    shard: u64,
    count: u64,
) -> Counts {
    let mut rng = shard_rng(seed, shard);
    let tol = &spec.tolerances;
    let mut counts = Counts {
        powers: vec![0; spec.powers.len()],
        ..Counts::default()
    };
    for _ in 0..count {
        let xs = unit_normals(n, &mut rng);
        let x = FirstRow::from_real(&xs).expect("unit vectors are finite");
        counts.samples += 1;
        if strictly_signed(&xs, tol) {
            counts.sign += 1;
        }
        let symbol = plan.symbol_values(&x);
        let powers = NormalizedPowers::from_symbol(plan.clone(), &symbol, true)
            .expect("unit vectors are nonzero");
        for (slot, &m) in counts.powers.iter_mut().zip(&spec.powers) {
            if power_is_positive(&powers, m, tol) {
                *slot += 1;
            }
        }
        match Membership::from_symbol(&symbol, tol).in_cn_prime {
            Verdict::Yes => counts.prime_yes += 1,
            Verdict::No => {}
            Verdict::Boundary => counts.boundary += 1,
        }
    }
    counts
}

/// Estimates one table row for dimension `n`.
pub fn estimate_row(n: usize, spec: &TableSpec) -> Result<TableRow> {
    spec.validate()?;
    if !spec.dims.contains(&n) {
        return Err(Error::InvalidSpec(format!(
            "dimension {n} is not in the spec"
        )));
    }
    let plan = DftPlan::new(n)?;
    let seed = row_seed(spec.seed, n);
    let shards = spec.samples.div_ceil(SHARD_SIZE);

    let counts = (0..shards)
        .into_par_iter()
        .map(|s| {
            let count = SHARD_SIZE.min(spec.samples - s * SHARD_SIZE);
            run_shard(n, spec, &plan, seed, s, count)
        })
        .reduce(Counts::default, Counts::merge);

    let total = counts.samples;
    Ok(TableRow {
        n,
        sign_positive: Estimate {
            hits: counts.sign,
            total,
        },
        powers: spec
            .powers
            .iter()
            .zip(&counts.powers)
            .map(|(&m, &hits)| (m, Estimate { hits, total }))
            .collect(),
        in_cn_prime: Estimate {
            hits: counts.prime_yes,
            total: total - counts.boundary,
        },
        boundary_count: counts.boundary,
    })
}

/// One row per dimension of the spec, in the order given.
pub fn build_table(spec: &TableSpec) -> Result<Vec<TableRow>> {
    spec.validate()?;
    spec.dims.iter().map(|&n| estimate_row(n, spec)).collect()
}

/// Randomized check of the positivity/phase-cone characterizations of `C_n'`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub dims: Vec<usize>,
    /// Samples per dimension.
    pub trials: u64,
    pub m_max: u32,
    pub complex: bool,
    pub seed: u64,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub trials: u64,
    /// Skipped because the membership margin is inside the tolerance band.
    pub boundary: u64,
    /// Needed a power above `m_max`; confirmed at the gap-implied power.
    pub beyond_bound: u64,
    pub in_cn_prime: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

fn sweep_dimension(n: usize, spec: &SweepSpec) -> Result<SweepRow> {
    let mut rng = shard_rng(row_seed(spec.seed, n), 0);
    let mut row = SweepRow {
        n,
        ..SweepRow::default()
    };
    for _ in 0..spec.trials {
        let x = if spec.complex {
            sample_complex_sphere(n, &mut rng)?
        } else {
            sample_sphere(n, &mut rng)?
        };
        row.trials += 1;
        let check = if spec.complex {
            complex_equivalence(&x, spec.m_max, &spec.tolerances)
        } else {
            equivalence_check(&x, spec.m_max, &spec.tolerances)
        };
        let check = match check {
            Ok(check) => check,
            Err(Error::Boundary { .. }) => {
                row.boundary += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        row.in_cn_prime += u64::from(check.in_cn_prime);
        match check.outcome {
            CheckOutcome::Consistent => {}
            CheckOutcome::BeyondSearchBound => row.beyond_bound += 1,
            CheckOutcome::Violation => {
                row.violations += 1;
                row.first_violation
                    .get_or_insert_with(|| format!("{:?}: {}", x.entries(), check.detail));
            }
        }
    }
    Ok(row)
}

/// Runs the equivalence check on `trials` random sphere points per dimension.
pub fn verify_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.tolerances.validate()?;
    if spec.m_max == 0 {
        return Err(Error::ZeroSearchBound);
    }
    if let Some(n) = spec.dims.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidSpec(format!("dimension {n} is below 2")));
    }
    spec.dims
        .par_iter()
        .map(|&n| sweep_dimension(n, spec))
        .collect()
}
