//! Membership in `C_n` ("spectral norm equals |row sum|") and in the
//! spectral-gap subset `C_n'`, together with the sufficient conditions that
//! imply them: sign patterns of `x`, positivity of the Gram circulant and
//! of its powers, and the phase cone for complex rows.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::circulant::{gram_row, DftPlan, FirstRow, NormalizedPowers, SymbolValues};
use crate::error::{Error, Result};

pub const DEFAULT_M_MAX: u32 = 512;

/// Numerical slack for the exact inequalities of the theory.
///
/// * `tie`: relative distance below which two symbol moduli count as equal.
/// * `gap`: relative margin needed before `|c(1)| > max_{k>=1} |c(omega^k)|`
///   is called strict. Margins between `tie` and `gap` are boundary cases.
/// * `positivity`: an entry is positive when it exceeds `positivity * scale`,
///   with `scale` the natural size of the row being tested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub tie: f64,
    pub gap: f64,
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tie: 1e-12,
            gap: 1e-9,
            positivity: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (value, name) in [
            (self.tie, "tie"),
            (self.gap, "gap"),
            (self.positivity, "positivity"),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidTolerance(name));
            }
        }
        Ok(())
    }
}

/// Three-valued membership outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Boundary,
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Boundary => "boundary",
        }
    }
}

/// Entrywise sign pattern of a real row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SignCondition {
    PlusPositive,
    MinusPositive,
    PlusNonneg,
    MinusNonneg,
    None,
}

impl SignCondition {
    pub fn is_nonneg(self) -> bool {
        self != SignCondition::None
    }

    pub fn is_strict(self) -> bool {
        matches!(
            self,
            SignCondition::PlusPositive | SignCondition::MinusPositive
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SignCondition::PlusPositive => "x > 0",
            SignCondition::MinusPositive => "-x > 0",
            SignCondition::PlusNonneg => "x >= 0",
            SignCondition::MinusNonneg => "-x >= 0",
            SignCondition::None => "mixed signs",
        }
    }
}

/// Which index pairs count as adjacent in the phase-cone test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Adjacency {
    /// `(j, j+1 mod n)`, so `(n-1, 0)` is adjacent too.
    #[default]
    Cyclic,
    /// Only `(j, j+1)` with `j + 1 < n`.
    Linear,
}

/// Result of [`minimal_positive_power`] with the bound it searched up to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PowerSearch {
    pub bound: u32,
    pub found: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseConeReport {
    /// First `m` at which the first row of `B^m` lies in the cone.
    pub holds_at_m: Option<u32>,
    pub adjacency_witness: Option<(usize, usize)>,
    /// Whether `x` itself already lies in the cone.
    pub input_in_cone: bool,
    pub bound: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassificationReport {
    pub n: usize,
    pub spectral_norm: f64,
    pub row_sum_abs: f64,
    pub symbol_moduli: Vec<f64>,
    /// `(|c(1)| - ||c||_inf) / ||c||_inf`, never positive.
    pub cn_margin: f64,
    /// `(|c(1)| - max_{k>=1} |c(omega^k)|) / ||c||_inf`.
    pub gap_margin: f64,
    pub in_cn: Verdict,
    pub in_cn_prime: Verdict,
    pub sign_condition: Option<SignCondition>,
    pub gram_row: FirstRow,
    pub gram_nonnegative: bool,
    pub gram_positive: bool,
    pub minimal_positive_power: Option<PowerSearch>,
    /// Smallest `m` at which the spectral gap alone forces `B^m > O`.
    pub gap_power_bound: Option<u64>,
    pub violating_root: Option<usize>,
    pub phase_cone: Option<PhaseConeReport>,
}

/// Verdicts computed from the symbol alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub in_cn: Verdict,
    pub in_cn_prime: Verdict,
    pub cn_margin: f64,
    pub gap_margin: f64,
    pub runner_up: Option<(usize, f64)>,
}

impl Membership {
    pub fn from_symbol(symbol: &SymbolValues, tol: &Tolerances) -> Self {
        let peak = symbol.max_abs();
        let at_one = symbol.at_one();
        let runner_up = symbol.runner_up();

        if peak == 0.0 {
            return Self {
                in_cn: Verdict::Yes,
                in_cn_prime: Verdict::No,
                cn_margin: 0.0,
                gap_margin: 0.0,
                runner_up,
            };
        }

        let cn_margin = (at_one - peak) / peak;
        let in_cn = if cn_margin >= -tol.tie {
            Verdict::Yes
        } else if cn_margin < -tol.gap {
            Verdict::No
        } else {
            Verdict::Boundary
        };

        // n = 1 has no other root, so the gap is the whole symbol
        let second = runner_up.map_or(0.0, |(_, m)| m);
        let gap_margin = (at_one - second) / peak;
        let in_cn_prime = match in_cn {
            Verdict::No => Verdict::No,
            Verdict::Boundary => Verdict::Boundary,
            Verdict::Yes if gap_margin >= tol.gap => Verdict::Yes,
            Verdict::Yes if gap_margin <= tol.tie => Verdict::No,
            Verdict::Yes => Verdict::Boundary,
        };

        Self {
            in_cn,
            in_cn_prime,
            cn_margin,
            gap_margin,
            runner_up,
        }
    }

    /// `c_1 / c_0`, the ratio that controls convergence of normalized powers.
    pub fn gap_ratio(&self, symbol: &SymbolValues) -> Option<f64> {
        let c0 = symbol.at_one();
        (c0 > 0.0).then(|| self.runner_up.map_or(0.0, |(_, m)| m) / c0)
    }
}

/// Smallest `m` with `(n-1) rho^{2m} < target`, `rho = c_1 / c_0 < 1`.
///
/// Every entry `e_j` of the normalized power satisfies
/// `|n e_j - 1| <= sum_{k>=1} (c_k/c_0)^{2m} <= (n-1) rho^{2m}`.
fn power_bound(n: usize, rho: f64, target: f64) -> Option<u64> {
    if !(0.0..1.0).contains(&rho) {
        return None;
    }
    let spread = (n.saturating_sub(1)) as f64;
    if spread == 0.0 || rho == 0.0 || spread < target {
        return Some(1);
    }
    let m = ((spread / target).ln() / (-2.0 * rho.ln())).floor() + 1.0;
    Some(if m.is_finite() && m < u64::MAX as f64 {
        m.max(1.0) as u64
    } else {
        u64::MAX
    })
}

/// Power from which `B_x^m > O` is guaranteed by the spectral gap.
pub fn positivity_power_bound(n: usize, gap_ratio: f64) -> Option<u64> {
    power_bound(n, gap_ratio, 1.0)
}

/// Power from which every entry of the first row of `B_x^m` is nonzero and in
/// the phase cone `|arg| < pi/(2n)`.
pub fn cone_power_bound(n: usize, gap_ratio: f64) -> Option<u64> {
    power_bound(n, gap_ratio, (PI / (2.0 * n as f64)).sin())
}

/// Sign pattern of a real row.
pub fn sign_condition(x: &FirstRow, tol: &Tolerances) -> Result<SignCondition> {
    let xs = x
        .real_entries()
        .ok_or(Error::ComplexInput("sign condition"))?;
    let threshold = tol.positivity * x.max_abs();
    let strict = |sign: f64| xs.iter().all(|&v| sign * v > threshold);
    let weak = |sign: f64| xs.iter().all(|&v| sign * v >= 0.0);
    Ok(if strict(1.0) {
        SignCondition::PlusPositive
    } else if strict(-1.0) {
        SignCondition::MinusPositive
    } else if weak(1.0) {
        SignCondition::PlusNonneg
    } else if weak(-1.0) {
        SignCondition::MinusNonneg
    } else {
        SignCondition::None
    })
}

fn entrywise_positive(row: &[Complex64], threshold: f64) -> bool {
    row.iter()
        .all(|z| z.re > threshold && z.im.abs() <= threshold.max(0.0))
}

/// Symbol-only membership verdicts.
pub fn membership(x: &FirstRow, tol: &Tolerances) -> Result<Membership> {
    tol.validate()?;
    let plan = DftPlan::new(x.len())?;
    Ok(Membership::from_symbol(&plan.symbol_values(x), tol))
}

/// Full report: membership, sign pattern, Gram positivity, and (with
/// `m_max`) the minimal positive power or, for complex rows, the phase cone.
pub fn classify(
    x: &FirstRow,
    tol: &Tolerances,
    m_max: Option<u32>,
) -> Result<ClassificationReport> {
    tol.validate()?;
    if m_max == Some(0) {
        return Err(Error::ZeroSearchBound);
    }
    let n = x.len();
    let plan = DftPlan::new(n)?;
    let symbol = plan.symbol_values(x);
    let member = Membership::from_symbol(&symbol, tol);
    let real = x.is_real();

    let gram = gram_row(x);
    let gram_scale = gram.entries()[0].re;
    let gram_threshold = tol.positivity * gram_scale;
    let gram_nonnegative = gram
        .entries()
        .iter()
        .all(|z| z.re >= -gram_threshold && z.im.abs() <= gram_threshold);
    let gram_positive = gram_scale > 0.0 && entrywise_positive(gram.entries(), gram_threshold);

    let gap_power_bound = member
        .gap_ratio(&symbol)
        .filter(|_| member.in_cn_prime.is_yes())
        .and_then(|rho| {
            if real {
                positivity_power_bound(n, rho)
            } else {
                cone_power_bound(n, rho)
            }
        });

    let violating_root = if member.in_cn_prime.is_yes() {
        None
    } else {
        member.runner_up.map(|(k, _)| k)
    };

    let powers = if x.is_zero() {
        None
    } else {
        Some(NormalizedPowers::from_symbol(plan, &symbol, real)?)
    };

    let minimal_positive_power = match (m_max, real) {
        (Some(bound), true) => Some(PowerSearch {
            bound,
            found: powers
                .as_ref()
                .and_then(|p| first_positive_power(p, bound, tol)),
        }),
        _ => None,
    };

    let phase_cone = match (m_max, real) {
        (Some(bound), false) => {
            let input_in_cone = phase_cone(x, tol).holds;
            let hit = powers
                .as_ref()
                .and_then(|p| first_cone_power(p, bound, tol, Adjacency::Cyclic));
            Some(PhaseConeReport {
                holds_at_m: hit.map(|(m, _)| m),
                adjacency_witness: hit.and_then(|(_, cone)| cone.adjacency_witness),
                input_in_cone,
                bound,
            })
        }
        _ => None,
    };

    Ok(ClassificationReport {
        n,
        spectral_norm: symbol.max_abs(),
        row_sum_abs: symbol.at_one(),
        symbol_moduli: symbol.moduli(),
        cn_margin: member.cn_margin,
        gap_margin: member.gap_margin,
        in_cn: member.in_cn,
        in_cn_prime: member.in_cn_prime,
        sign_condition: if real {
            Some(sign_condition(x, tol)?)
        } else {
            None
        },
        gram_row: gram,
        gram_nonnegative,
        gram_positive,
        minimal_positive_power,
        gap_power_bound,
        violating_root,
        phase_cone,
    })
}

/// Whether the first row of `B_x^m / ||B_x^m||` is entrywise positive.
pub fn power_is_positive(powers: &NormalizedPowers, m: u32, tol: &Tolerances) -> bool {
    let threshold = tol.positivity / powers.n() as f64;
    entrywise_positive(&powers.row(m), threshold)
}

fn first_positive_power(powers: &NormalizedPowers, m_max: u32, tol: &Tolerances) -> Option<u32> {
    (1..=m_max).find(|&m| power_is_positive(powers, m, tol))
}

/// Least `m <= m_max` with `B_x^m > O`, if any.
///
/// Scans every exponent upward on the normalized power, so the answer does
/// not depend on the scale of `x`.
pub fn minimal_positive_power(x: &FirstRow, m_max: u32, tol: &Tolerances) -> Result<Option<u32>> {
    tol.validate()?;
    if m_max == 0 {
        return Err(Error::ZeroSearchBound);
    }
    if !x.is_real() {
        return Err(Error::ComplexInput("minimal positive power"));
    }
    if x.is_zero() {
        return Ok(None);
    }
    let powers = NormalizedPowers::new(x)?;
    Ok(first_positive_power(&powers, m_max, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseCone {
    pub holds: bool,
    pub adjacency_witness: Option<(usize, usize)>,
    /// Largest `|arg|` over nonzero entries, radians.
    pub worst_phase: f64,
    /// Every entry is nonzero and inside the cone.
    pub all_entries: bool,
}

/// Argument in `(-pi, pi]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Tests whether `y` has two adjacent nonzero entries and every nonzero entry
/// has `|arg| < pi/(2n)`.
pub fn phase_cone(y: &FirstRow, tol: &Tolerances) -> PhaseCone {
    phase_cone_with(y.entries(), tol, Adjacency::Cyclic)
}

pub fn phase_cone_with(y: &[Complex64], tol: &Tolerances, adjacency: Adjacency) -> PhaseCone {
    let n = y.len();
    let scale = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = tol.positivity * scale;
    let nonzero: Vec<bool> = y
        .iter()
        .map(|z| scale > 0.0 && z.norm() > threshold)
        .collect();
    let half_width = PI / (2.0 * n as f64);

    let worst_phase = y
        .iter()
        .zip(&nonzero)
        .filter(|(_, &nz)| nz)
        .map(|(&z, _)| principal_arg(z).abs())
        .fold(0.0, f64::max);
    let phases_ok = worst_phase < half_width;

    let pairs = match adjacency {
        Adjacency::Cyclic if n >= 2 => n,
        _ => n.saturating_sub(1),
    };
    let adjacency_witness = (0..pairs)
        .map(|j| (j, (j + 1) % n))
        .find(|&(j, k)| j != k && nonzero[j] && nonzero[k]);

    PhaseCone {
        holds: phases_ok && adjacency_witness.is_some(),
        adjacency_witness,
        worst_phase,
        all_entries: phases_ok && nonzero.iter().all(|&nz| nz),
    }
}

fn first_cone_power(
    powers: &NormalizedPowers,
    m_max: u32,
    tol: &Tolerances,
    adjacency: Adjacency,
) -> Option<(u32, PhaseCone)> {
    (1..=m_max).find_map(|m| {
        let cone = phase_cone_with(&powers.row(m), tol, adjacency);
        cone.holds.then_some((m, cone))
    })
}

/// How a single equivalence check came out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum CheckOutcome {
    /// Both sides agree within the search bound.
    Consistent,
    /// `x` is in `C_n'` but its gap is too small for the search bound; the
    /// property was confirmed at the gap-implied power instead.
    BeyondSearchBound,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceCheck {
    pub consistent: bool,
    pub outcome: CheckOutcome,
    pub in_cn_prime: bool,
    /// First `m <= m_max` where the power condition holds.
    pub first_m: Option<u32>,
    pub detail: String,
}

fn checked_membership(
    x: &FirstRow,
    tol: &Tolerances,
    m_max: u32,
) -> Result<(NormalizedPowers, Membership, SymbolValues)> {
    tol.validate()?;
    if m_max == 0 {
        return Err(Error::ZeroSearchBound);
    }
    if x.is_zero() {
        return Err(Error::ZeroRow);
    }
    let plan = DftPlan::new(x.len())?;
    let symbol = plan.symbol_values(x);
    let member = Membership::from_symbol(&symbol, tol);
    if member.in_cn_prime == Verdict::Boundary {
        let margin = if member.in_cn == Verdict::Boundary {
            member.cn_margin
        } else {
            member.gap_margin
        };
        return Err(Error::Boundary { margin });
    }
    let powers = NormalizedPowers::from_symbol(plan, &symbol, x.is_real())?;
    Ok((powers, member, symbol))
}

fn as_exponent(m: u64) -> u32 {
    m.min(u32::MAX as u64) as u32
}

/// Checks `x in C_n'  <=>  exists m <= m_max with B_x^m > O` and, when a
/// first such `m*` exists, that positivity persists at `m*`, `m* + 1` and
/// `m_max`.
///
/// Rows inside the tolerance band are rejected with [`Error::Boundary`].
pub fn equivalence_check(x: &FirstRow, m_max: u32, tol: &Tolerances) -> Result<EquivalenceCheck> {
    if !x.is_real() {
        return Err(Error::ComplexInput("equivalence check"));
    }
    let (powers, member, symbol) = checked_membership(x, tol, m_max)?;
    let in_prime = member.in_cn_prime.is_yes();
    let first_m = first_positive_power(&powers, m_max, tol);
    let positive = |m: u32| power_is_positive(&powers, m, tol);

    let (outcome, detail) = match (in_prime, first_m) {
        (true, Some(m)) => {
            let probes = [m, m.saturating_add(1), m_max.max(m)];
            match probes.iter().find(|&&p| !positive(p)) {
                None => (
                    CheckOutcome::Consistent,
                    format!("in C_n' and B^m > O from m = {m}"),
                ),
                Some(p) => (
                    CheckOutcome::Violation,
                    format!("B^{m} > O but positivity lost at m = {p}"),
                ),
            }
        }
        (false, None) => (
            CheckOutcome::Consistent,
            format!("not in C_n' and no B^m > O for m <= {m_max}"),
        ),
        (false, Some(m)) => (
            CheckOutcome::Violation,
            format!("B^{m} > O although x is not in C_n'"),
        ),
        (true, None) => {
            let rho = member.gap_ratio(&symbol).unwrap_or(1.0);
            match positivity_power_bound(x.len(), rho) {
                Some(bound) if bound > m_max as u64 => {
                    let at = as_exponent(bound);
                    if positive(at) && positive(at.saturating_add(1)) {
                        (
                            CheckOutcome::BeyondSearchBound,
                            format!("gap ratio {rho:.9} forces positivity only from m = {bound} > {m_max}; confirmed there"),
                        )
                    } else {
                        (
                            CheckOutcome::Violation,
                            format!("in C_n' but B^{bound} is not positive"),
                        )
                    }
                }
                _ => (
                    CheckOutcome::Violation,
                    format!("in C_n' but no B^m > O for m <= {m_max}"),
                ),
            }
        }
    };

    Ok(EquivalenceCheck {
        consistent: outcome != CheckOutcome::Violation,
        outcome,
        in_cn_prime: in_prime,
        first_m,
        detail,
    })
}

/// Four-way check for complex rows: `x in C_n'` iff some first row of
/// `B_x^m` (m <= m_max) has two adjacent nonzero entries and all nonzero
/// phases inside the cone; when such an `m` exists, all entries must be
/// nonzero and inside the cone at `m_max` (or at the gap-implied power, when
/// that is larger).
pub fn complex_equivalence(x: &FirstRow, m_max: u32, tol: &Tolerances) -> Result<EquivalenceCheck> {
    complex_equivalence_with(x, m_max, tol, Adjacency::Cyclic)
}

pub fn complex_equivalence_with(
    x: &FirstRow,
    m_max: u32,
    tol: &Tolerances,
    adjacency: Adjacency,
) -> Result<EquivalenceCheck> {
    let (powers, member, symbol) = checked_membership(x, tol, m_max)?;
    let n = x.len();
    let in_prime = member.in_cn_prime.is_yes();
    let hit = first_cone_power(&powers, m_max, tol, adjacency);
    let all_in_cone = |m: u32| phase_cone_with(&powers.row(m), tol, adjacency).all_entries;
    let bound = member
        .gap_ratio(&symbol)
        .and_then(|rho| cone_power_bound(n, rho));

    let (outcome, detail) = match (in_prime, hit) {
        (true, Some((m, _))) => {
            let probe = as_exponent(bound.unwrap_or(1).max(m_max as u64));
            if all_in_cone(probe) {
                (
                    CheckOutcome::Consistent,
                    format!("in C_n'; cone from m = {m}, all entries at m = {probe}"),
                )
            } else {
                (
                    CheckOutcome::Violation,
                    format!("cone at m = {m} but not all entries at m = {probe}"),
                )
            }
        }
        (false, None) => (
            CheckOutcome::Consistent,
            format!("not in C_n' and no cone hit for m <= {m_max}"),
        ),
        (false, Some((m, _))) => (
            CheckOutcome::Violation,
            format!("B^{m} row in the cone although x is not in C_n'"),
        ),
        (true, None) => match bound {
            Some(b) if b > m_max as u64 => {
                let at = as_exponent(b);
                if all_in_cone(at) {
                    (
                        CheckOutcome::BeyondSearchBound,
                        format!("cone reached only from m = {b} > {m_max}; confirmed there"),
                    )
                } else {
                    (
                        CheckOutcome::Violation,
                        format!("in C_n' but B^{b} row not in the cone"),
                    )
                }
            }
            _ => (
                CheckOutcome::Violation,
                format!("in C_n' but no cone hit for m <= {m_max}"),
            ),
        },
    };

    Ok(EquivalenceCheck {
        consistent: outcome != CheckOutcome::Violation,
        outcome,
        in_cn_prime: in_prime,
        first_m: hit.map(|(m, _)| m),
        detail,
    })
}
