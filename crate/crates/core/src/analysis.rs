//! The analytic layer: subexponential growth L_N(alpha, c), the
//! Dickman-de Bruijn rho function, smoothness-probability estimates and the
//! complexity exponents of every solver family, plus the crossover table
//! that picks the best strategy per (field size, genus).

use std::sync::OnceLock;

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("parameter out of domain: {0}")]
    DomainError(String),
}

/// Parameters of the subexponential function
/// `L_N(alpha, c) = exp(c (log N)^alpha (log log N)^(1-alpha))`.
#[derive(Debug, Clone)]
pub struct SubexpParams {
    pub alpha: f64,
    pub c: f64,
    pub n: BigUint,
}

/// A positive real carried by its natural logarithm, so that quantities far
/// beyond f64 range still compose exactly under multiplication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMagnitude {
    pub ln: f64,
}

impl LogMagnitude {
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }

    pub fn mul(&self, other: &LogMagnitude) -> LogMagnitude {
        LogMagnitude {
            ln: self.ln + other.ln,
        }
    }

    pub fn recip(&self) -> LogMagnitude {
        LogMagnitude { ln: -self.ln }
    }
}

/// Natural logarithm of a big integer, accurate to f64 precision.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 53 {
        let v: u64 = n.try_into().unwrap();
        return (v as f64).ln();
    }
    let shift = bits - 53;
    let top: u64 = (n >> (shift as usize)).try_into().unwrap();
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Evaluate L_N(alpha, c). The result is returned in log space; callers
/// needing the plain value use [`LogMagnitude::value`].
pub fn subexp_eval(p: &SubexpParams) -> Result<LogMagnitude, AnalysisError> {
    if !(p.alpha > 0.0 && p.alpha < 1.0) {
        return Err(AnalysisError::DomainError(format!("alpha = {}", p.alpha)));
    }
    if p.c <= 0.0 {
        return Err(AnalysisError::DomainError(format!("c = {}", p.c)));
    }
    if p.n < BigUint::from(16u32) {
        return Err(AnalysisError::DomainError("N must be >= 16".into()));
    }
    let ln_n = ln_biguint(&p.n);
    let lnln_n = ln_n.ln();
    Ok(LogMagnitude {
        ln: p.c * ln_n.powf(p.alpha) * lnln_n.powf(1.0 - p.alpha),
    })
}

// ---------------------------------------------------------------------------
// Dickman-de Bruijn rho
// ---------------------------------------------------------------------------

const RHO_STEP_INV: usize = 8192;
const RHO_UMAX: usize = 50;

/// rho at the grid nodes of each unit interval [k, k+1], k = 1..UMAX-1.
/// Built from the averaging identity `u rho(u) = integral of rho over
/// [u-1, u]`, which damps errors instead of amplifying them (the raw delay
/// ODE blows relative errors up by rho(k)/rho(k+1) per interval). The
/// trailing-window integral is assembled from per-interval suffix sums so
/// no large quantities are ever differenced.
struct RhoTable {
    values: Vec<Vec<f64>>,
}

fn rho_table() -> &'static RhoTable {
    static TABLE: OnceLock<RhoTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let inv = RHO_STEP_INV;
        let h = 1.0 / inv as f64;
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(RHO_UMAX);
        // suffix[j] = integral of rho from t_j to the interval's right end
        let mut suffix: Vec<f64> = (0..=inv).map(|j| 1.0 - j as f64 * h).collect();
        let mut prev_end = 1.0f64; // rho(k)
        for k in 1..RHO_UMAX {
            let mut vals = vec![0.0f64; inv + 1];
            vals[0] = prev_end;
            let mut incs = vec![0.0f64; inv + 1];
            let mut prefix = 0.0f64; // integral of rho from k to t_j
            for j in 1..=inv {
                let t = k as f64 + j as f64 * h;
                let rho_j = if j == 1 {
                    // implicit trapezoid for the first step
                    let rhs = suffix[j] + 0.5 * h * vals[0];
                    rhs / (t - 0.5 * h)
                } else {
                    // implicit quadratic rule over [t_{j-1}, t_j]
                    let rhs = suffix[j]
                        + prefix
                        + h / 12.0 * (8.0 * vals[j - 1] - vals[j - 2]);
                    rhs / (t - 5.0 * h / 12.0)
                };
                let inc = if j == 1 {
                    0.5 * h * (vals[0] + rho_j)
                } else {
                    h / 12.0 * (-vals[j - 2] + 8.0 * vals[j - 1] + 5.0 * rho_j)
                };
                vals[j] = rho_j;
                incs[j] = inc;
                prefix += inc;
            }
            // suffix sums for the next interval, all-positive accumulation
            let mut next_suffix = vec![0.0f64; inv + 1];
            for j in (0..inv).rev() {
                next_suffix[j] = next_suffix[j + 1] + incs[j + 1];
            }
            prev_end = vals[inv];
            suffix = next_suffix;
            values.push(vals);
        }
        RhoTable { values }
    })
}

/// The Dickman-de Bruijn function rho(u): the asymptotic density of
/// B-smooth objects of size x with u = x/B, for 0 <= u <= 50. Solves
/// u rho'(u) = -rho(u-1) on a precomputed grid; absolute error stays far
/// below 1e-8 for u <= 20 and relative accuracy holds to the domain edge.
pub fn dickman_rho(u: f64) -> Result<f64, AnalysisError> {
    if !(0.0..=RHO_UMAX as f64).contains(&u) || u.is_nan() {
        return Err(AnalysisError::DomainError(format!("u = {u}")));
    }
    if u <= 1.0 {
        return Ok(1.0);
    }
    let table = rho_table();
    let k = (u.floor() as usize).min(RHO_UMAX - 1);
    let frac = u - k as f64;
    let grid = &table.values[k - 1];
    let x = frac * RHO_STEP_INV as f64;
    let j = (x.floor() as usize).min(RHO_STEP_INV - 1);
    // cubic Lagrange interpolation; neighbours share scale, so relative
    // precision survives
    let j0 = j.saturating_sub(1).min(RHO_STEP_INV - 3);
    let t = x - j0 as f64;
    let mut val = 0.0;
    for (i, &gi) in grid[j0..j0 + 4].iter().enumerate() {
        let mut w = 1.0;
        for m in 0..4 {
            if m != i {
                w *= (t - m as f64) / (i as f64 - m as f64);
            }
        }
        val += w * gi;
    }
    Ok(val)
}

/// ln rho(u) for 0 <= u <= 50.
pub fn ln_dickman_rho(u: f64) -> Result<f64, AnalysisError> {
    Ok(dickman_rho(u)?.ln())
}

// ---------------------------------------------------------------------------
// Smoothness probability (generalized)
// ---------------------------------------------------------------------------

/// Predicted smoothness probability of an element of size `log L_N(alpha, c)`
/// against a factor base of the `L_N(beta, d)` smallest primes:
/// `1 / L_N(alpha - beta, (alpha - beta) c / d)`.
#[derive(Debug, Clone)]
pub struct SmoothnessPrediction {
    /// First parameter of the resulting subexponential function.
    pub alpha: f64,
    /// Constant of the resulting subexponential function.
    pub c: f64,
    /// Set when the inputs are the classical index-calculus case
    /// alpha = c = 1, beta = 1/2, giving 1/L(1/2, 1/(2d)).
    pub classical: bool,
    /// The probability itself for the given N, in log space.
    pub probability: LogMagnitude,
}

pub fn smoothness_probability(
    n: &BigUint,
    alpha: f64,
    c: f64,
    beta: f64,
    d: f64,
) -> Result<SmoothnessPrediction, AnalysisError> {
    if !(0.0 < beta && beta < alpha && alpha <= 1.0) {
        return Err(AnalysisError::DomainError(format!(
            "need 0 < beta < alpha <= 1, got alpha={alpha} beta={beta}"
        )));
    }
    if c <= 0.0 || d <= 0.0 {
        return Err(AnalysisError::DomainError("c, d must be positive".into()));
    }
    let out_alpha = alpha - beta;
    let out_c = out_alpha * c / d;
    let l = subexp_eval(&SubexpParams {
        alpha: out_alpha,
        c: out_c,
        n: n.clone(),
    })?;
    let classical = (alpha - 1.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12 && (beta - 0.5).abs() < 1e-12;
    Ok(SmoothnessPrediction {
        alpha: out_alpha,
        c: out_c,
        classical,
        probability: l.recip(),
    })
}

// ---------------------------------------------------------------------------
// Cost exponents per solver family
// ---------------------------------------------------------------------------

/// A solver family with the parameters its cost formula needs.
#[derive(Debug, Clone, PartialEq)]
pub enum CostModel {
    /// Generic square-root algorithms: q^(g/2).
    Generic { g: f64 },
    /// Index calculus with the full degree-1 factor base: q^2.
    GaudryFull,
    /// Reduced factor base of size q^(1 - 1/(g+1)): q^(2 - 2/(g+1)).
    Harley { g: f64 },
    /// Single large prime, r = 1 - 2/(2g+1): q^(2 - 4/(2g+1)).
    SingleLargePrime { g: f64 },
    /// Double large primes, r = 1 - 1/g: q^(2 - 2/g).
    DoubleLargePrime { g: f64 },
    /// Two-point lines on a plane model of degree d: q^(2 - 2/(d-2)).
    DiemLines { d: f64 },
    /// L(1/2) relation framework at g >= theta log q: constant sqrt(2) + 2/theta.
    L12Framework { theta: f64 },
    /// Random functions Y - v(X) on hyperelliptic curves of large genus.
    EngeAdh { theta: f64 },
    /// The L(1/3) plane-model generator with degree bounds a0, b0.
    L13 { a0: f64, b0: f64 },
}

impl CostModel {
    pub fn family_name(&self) -> &'static str {
        match self {
            CostModel::Generic { .. } => "generic",
            CostModel::GaudryFull => "gaudry_full",
            CostModel::Harley { .. } => "harley",
            CostModel::SingleLargePrime { .. } => "single_lp",
            CostModel::DoubleLargePrime { .. } => "double_lp",
            CostModel::DiemLines { .. } => "diem_lines",
            CostModel::L12Framework { .. } => "l12_framework",
            CostModel::EngeAdh { .. } => "enge_adh",
            CostModel::L13 { .. } => "l13",
        }
    }
}

/// Either an exponent of q (exponential families) or the constant of a
/// subexponential bound (asymptotic families; the o(1) terms are dropped and
/// the value is a prediction, not a desk-scale assertion).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostExponent {
    QPower(f64),
    LHalfConstant(f64),
    LThirdConstant(f64),
}

impl CostExponent {
    pub fn q_power(&self) -> Option<f64> {
        match self {
            CostExponent::QPower(e) => Some(*e),
            _ => None,
        }
    }
}

/// The positive root of `c^2 - (4/9) a0 c - (4/9) b0 = 0` together with the
/// resulting L(1/3) constant `(4/3) sqrt(a0 c + b0)`.
pub fn l13_optimum(a0: f64, b0: f64) -> Result<(f64, f64), AnalysisError> {
    if a0 <= 0.0 || b0 <= 0.0 {
        return Err(AnalysisError::DomainError("a0, b0 must be positive".into()));
    }
    let p = 4.0 / 9.0 * a0;
    let q = 4.0 / 9.0 * b0;
    let c = (p + (p * p + 4.0 * q).sqrt()) / 2.0;
    let constant = 4.0 / 3.0 * (a0 * c + b0).sqrt();
    Ok((c, constant))
}

pub fn cost_exponent(model: &CostModel) -> Result<CostExponent, AnalysisError> {
    let check_g = |g: f64| {
        if g < 1.0 {
            Err(AnalysisError::DomainError(format!("genus {g}")))
        } else {
            Ok(())
        }
    };
    Ok(match model {
        CostModel::Generic { g } => {
            check_g(*g)?;
            CostExponent::QPower(g / 2.0)
        }
        CostModel::GaudryFull => CostExponent::QPower(2.0),
        CostModel::Harley { g } => {
            check_g(*g)?;
            CostExponent::QPower(2.0 - 2.0 / (g + 1.0))
        }
        CostModel::SingleLargePrime { g } => {
            check_g(*g)?;
            CostExponent::QPower(2.0 - 4.0 / (2.0 * g + 1.0))
        }
        CostModel::DoubleLargePrime { g } => {
            check_g(*g)?;
            CostExponent::QPower(2.0 - 2.0 / g)
        }
        CostModel::DiemLines { d } => {
            if *d < 3.0 {
                return Err(AnalysisError::DomainError(format!("plane degree {d}")));
            }
            CostExponent::QPower(2.0 - 2.0 / (d - 2.0))
        }
        CostModel::L12Framework { theta } => {
            if *theta <= 0.0 {
                return Err(AnalysisError::DomainError("theta must be positive".into()));
            }
            CostExponent::LHalfConstant(2f64.sqrt() + 2.0 / theta)
        }
        CostModel::EngeAdh { theta } => {
            if *theta <= 0.0 {
                return Err(AnalysisError::DomainError("theta must be positive".into()));
            }
            let t = 3.0 / (2.0 * theta);
            CostExponent::LHalfConstant(5.0 / 6f64.sqrt() * ((1.0 + t).sqrt() + t.sqrt()))
        }
        CostModel::L13 { a0, b0 } => {
            let (_, constant) = l13_optimum(*a0, *b0)?;
            CostExponent::LThirdConstant(constant)
        }
    })
}

// ---------------------------------------------------------------------------
// Crossover table
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CrossoverRow {
    pub q: u64,
    pub g: u32,
    pub best: &'static str,
    pub exponent: f64,
    /// Extra group-order bits (percent) needed to restore the security the
    /// generic bound would give; 0 when generic is already best.
    pub bits_penalty_pct: f64,
}

/// Best strategy per (q, g) cell, comparing the q-power exponents of the
/// generic bound against the index-calculus ladder (genus >= 2 only; at
/// genus 1 every reduced divisor is a single point and index calculus
/// degenerates).
pub fn crossover_table(qs: &[u64], gs: &[u32]) -> Vec<CrossoverRow> {
    let mut rows = Vec::new();
    for &g in gs {
        let gf = g as f64;
        let generic = gf / 2.0;
        let mut best = ("generic", generic);
        if g >= 2 {
            let candidates = [
                CostModel::GaudryFull,
                CostModel::Harley { g: gf },
                CostModel::SingleLargePrime { g: gf },
                CostModel::DoubleLargePrime { g: gf },
            ];
            for c in candidates {
                let e = cost_exponent(&c).unwrap().q_power().unwrap();
                if e < best.1 {
                    best = (c.family_name(), e);
                }
            }
        }
        let penalty = if best.0 == "generic" {
            0.0
        } else {
            (generic / best.1 - 1.0) * 100.0
        };
        for &q in qs {
            rows.push(CrossoverRow {
                q,
                g,
                best: best.0,
                exponent: best.1,
                bits_penalty_pct: penalty,
            });
        }
    }
    rows
}
