//! Curvature-difference certificates: given metrics for `T` and `S*`, look
//! for a bounded subharmonic radial `ψ` with `𝒦_{S*} - 𝒦_T ≤ ∂∂̄ψ`.
//!
//! The test is sufficient only. Everything runs on truncated data, so the
//! boundedness half is a tail fit and the verdict is three-valued.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fps::RadialSeries;
use crate::kernel::{kernel_from_spec, line_curvature, KernelSpec};
use crate::operator::{hypercontraction_defect, shift_from_kernel};
use crate::scalar::{from_usize, Rational, Scalar};

pub const DEFAULT_GRID: [f64; 10] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const DEFAULT_BOUND: f64 = 1e6;
pub const DEFAULT_DIM: usize = 200;

/// Coefficients in the tail fit window.
const TAIL_WINDOW: usize = 8;
/// Fitted decay `|c_n| ~ n^{-s}` must beat this to call the tail summable.
const SUMMABLE_EXPONENT: f64 = 1.5;
/// Decay slower than this, with nonnegative tail, counts as divergent.
const DIVERGENT_EXPONENT: f64 = 1.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Certified,
    NotCertified,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "CERTIFIED",
            Verdict::NotCertified => "NOT_CERTIFIED",
            Verdict::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    /// `T_i` passes the defect test for all `m ≤ k_i`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypercontraction_ok: Option<bool>,
    /// Hypercontractivity was only tested on the weighted-shift realization.
    pub checked_at_realization: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition2_ok: Option<bool>,
    /// With condition (2) in force, the level-0 and level-1 curvature
    /// differences coincide.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remark_consistent: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub t: f64,
    pub difference: f64,
    pub laplacian_psi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityReport<S> {
    pub difference: RadialSeries<S>,
    pub psi: RadialSeries<S>,
    pub verdict: Verdict,
    pub flags: Flags,
    pub grid: Vec<GridPoint>,
    /// Fitted `s` in `|c_n| ~ n^{-s}`; `None` when the tail window is zero.
    pub tail_exponent: Option<f64>,
    pub partial_sum: f64,
    pub reason: String,
}

/// `𝒦_S - 𝒦_T = ∂∂̄ log(h_T / h_S)`.
pub fn curvature_difference<S: Scalar>(
    h_t: &RadialSeries<S>,
    h_s: &RadialSeries<S>,
) -> Result<RadialSeries<S>> {
    Ok(&line_curvature(h_s)? - &line_curvature(h_t)?)
}

/// `ψ = Σ c_n t^n` with `c_0 = 0`, `c_n = d_{n-1}/n²`, so `∂∂̄ψ = d`.
pub fn radial_potential_solve<S: Scalar>(d: &RadialSeries<S>) -> RadialSeries<S> {
    RadialSeries::from_fn(d.order() + 1, |n| {
        if n == 0 {
            S::zero()
        } else {
            d.coeff(n - 1).clone() / from_usize(n * n)
        }
    })
}

/// Least-squares slope of `ln|c_n|` against `ln n` over the nonzero entries
/// of the window, negated.
fn tail_exponent(window: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = window
        .iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|&(n, c)| ((n as f64).ln(), c.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

pub fn certificate<S: Scalar>(d: &RadialSeries<S>, grid: &[f64], bound: f64) -> SimilarityReport<S> {
    let values: Vec<f64> = grid.iter().map(|&t| d.evaluate(t)).collect();
    let any_pos = values.iter().any(|&v| v > 0.0);
    let any_neg = values.iter().any(|&v| v < 0.0);
    let report = |psi: RadialSeries<S>, verdict, tail, partial, reason: &str| {
        let lap = psi.del_delbar();
        SimilarityReport {
            difference: d.clone(),
            grid: grid
                .iter()
                .zip(&values)
                .map(|(&t, &v)| GridPoint {
                    t,
                    difference: v,
                    laplacian_psi: lap.evaluate(t),
                })
                .collect(),
            psi,
            verdict,
            flags: Flags::default(),
            tail_exponent: tail,
            partial_sum: partial,
            reason: reason.to_string(),
        }
    };

    if !any_pos {
        return report(
            RadialSeries::zero(d.order() + 1),
            Verdict::Certified,
            None,
            0.0,
            "difference is nonpositive on the grid; psi = 0",
        );
    }
    let psi = radial_potential_solve(d);
    if any_neg {
        return report(psi, Verdict::Undecided, None, f64::NAN, "difference changes sign on the grid");
    }

    let lap = psi.del_delbar();
    let subharmonic = grid.iter().all(|&t| lap.evaluate(t) >= -1e-12);
    let dominates = grid
        .iter()
        .zip(&values)
        .all(|(&t, &v)| lap.evaluate(t) >= v - 1e-9 * (1.0 + v.abs()));

    let c: Vec<f64> = psi.coeffs().iter().map(Scalar::to_f64).collect();
    let n_max = c.len() - 1;
    let partial: f64 = c.iter().map(|x| x.abs()).sum();
    let start = n_max.saturating_sub(TAIL_WINDOW - 1).max(1);
    let window: Vec<(usize, f64)> = (start..=n_max).map(|n| (n, c[n])).collect();
    let window_zero = window.iter().all(|(_, x)| *x == 0.0);
    let tail_nonneg = window.iter().all(|(_, x)| *x >= 0.0);
    let s = tail_exponent(&window);

    if !(subharmonic && dominates) {
        return report(psi, Verdict::Undecided, s, partial, "potential fails the subharmonicity test on the grid");
    }
    let summable = window_zero || s.is_some_and(|s| s > SUMMABLE_EXPONENT);
    if summable {
        // Integral bound for a tail c_n ~ C n^{-s}.
        let tail = match s {
            Some(s) if !window_zero => c[n_max].abs() * n_max as f64 / (s - 1.0),
            _ => 0.0,
        };
        if partial + tail <= bound {
            return report(psi, Verdict::Certified, s, partial, "potential is subharmonic with summable coefficients");
        }
    }
    let divergent = s.is_some_and(|s| s < DIVERGENT_EXPONENT) || partial > bound;
    if tail_nonneg && !window_zero && divergent {
        return report(
            psi,
            Verdict::NotCertified,
            s,
            partial,
            "nonnegative coefficients with non-summable tail; radial limit is unbounded",
        );
    }
    report(psi, Verdict::Undecided, s, partial, "tail fit is inconclusive")
}

/// Radial data for the two-level condition, defaulting to `h0/h1` ratios
/// and `|φ|² = 1` when absent.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalarData {
    /// `‖S_{0,1} t_1‖² / ‖t_1‖²`.
    pub ratio_t: Option<RadialSeries<Rational>>,
    /// `‖S̃_{0,1} K_1‖² / K_1`.
    pub ratio_s: Option<RadialSeries<Rational>>,
    pub phi_sq: Option<RadialSeries<Rational>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fb2Options {
    pub order: usize,
    pub grid: Vec<f64>,
    pub bound: f64,
    /// Truncation dimension for the shift realization.
    pub dim: usize,
}

impl Default for Fb2Options {
    fn default() -> Self {
        Self {
            order: 32,
            grid: DEFAULT_GRID.to_vec(),
            bound: DEFAULT_BOUND,
            dim: DEFAULT_DIM,
        }
    }
}

fn power_exponent(spec: &KernelSpec) -> Result<usize> {
    match spec {
        KernelSpec::Power { alpha } if alpha.is_integer() && *alpha >= Rational::from_i64(1) => {
            Ok(alpha.to_integer().try_into().expect("small exponent"))
        }
        other => Err(Error::NotPowerKernel(other.to_json())),
    }
}

fn is_hypercontraction(spec: &KernelSpec, k: usize, dim: usize) -> Result<bool> {
    let kernel = kernel_from_spec::<Rational>(spec, dim)?;
    let shift = match shift_from_kernel(&kernel, dim) {
        Ok(s) => s,
        Err(Error::NonpositiveCoefficient { .. }) => return Ok(false),
        Err(e) => return Err(e),
    };
    for m in 1..=k {
        if !hypercontraction_defect(&shift, m)?.nonneg {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Two-level report: `t_spec = (h_{T_0}, h_{T_1})`, `s_spec = (K_0, K_1)`
/// with `K_i` power kernels `(1-t)^{-k_i}`.
pub fn fb2_similarity_report(
    t_spec: (&KernelSpec, &KernelSpec),
    s_spec: (&KernelSpec, &KernelSpec),
    scalar_data: &ScalarData,
    opts: &Fb2Options,
) -> Result<SimilarityReport<Rational>> {
    let k0 = power_exponent(s_spec.0)?;
    let k1 = power_exponent(s_spec.1)?;
    let n = opts.order;
    let ht0 = t_spec.0.metric_series::<Rational>(n)?;
    let ht1 = t_spec.1.metric_series::<Rational>(n)?;
    let hs0 = s_spec.0.metric_series::<Rational>(n)?;
    let hs1 = s_spec.1.metric_series::<Rational>(n)?;

    let hyper = is_hypercontraction(t_spec.0, k0, opts.dim)? && is_hypercontraction(t_spec.1, k1, opts.dim)?;

    let ratio_t = match &scalar_data.ratio_t {
        Some(r) => r.clone(),
        None => ht0.div(&ht1)?,
    };
    let ratio_s = match &scalar_data.ratio_s {
        Some(r) => r.clone(),
        None => hs0.div(&hs1)?,
    };
    let lhs = match &scalar_data.phi_sq {
        Some(p) => p * &ratio_t,
        None => ratio_t,
    };
    let condition2 = lhs.agrees_with(&ratio_s);

    let d0 = curvature_difference(&ht0, &hs0)?;
    let d1 = curvature_difference(&ht1, &hs1)?;
    let mut report = certificate(&d1, &opts.grid, opts.bound);
    report.flags = Flags {
        hypercontraction_ok: Some(hyper),
        checked_at_realization: true,
        condition2_ok: Some(condition2),
        remark_consistent: condition2.then(|| d0.agrees_with(&d1)),
    };
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition2Report {
    pub holds: bool,
    /// Pairs `(i, j)` where the identity fails.
    pub failures: Vec<(usize, usize)>,
}

/// Squared, cross-multiplied form of the `FB_n` condition (2):
/// `(Π_{k=i}^{j-1} φ_k²)² |ψ_ij|² ‖t_i‖⁴ ‖K_j‖⁴ = |ψ̃_ij|² ‖K_i‖⁴ ‖t_j‖⁴`,
/// where `<S_ij t_j, t_i> = ψ_ij ‖t_i‖²` and likewise for `ψ̃`.
pub fn fbn_condition2_check<S: Scalar>(
    phi_sq: &[RadialSeries<S>],
    t_norms: &[RadialSeries<S>],
    k_norms: &[RadialSeries<S>],
    psi_mod: &BTreeMap<(usize, usize), RadialSeries<S>>,
    psi_tilde_mod: &BTreeMap<(usize, usize), RadialSeries<S>>,
) -> Result<Condition2Report> {
    let n = t_norms.len();
    if n < 2 || k_norms.len() != n || phi_sq.len() != n - 1 {
        return Err(Error::IndexMismatch(format!(
            "{} frame norms, {} kernel norms, {} phi factors",
            n,
            k_norms.len(),
            phi_sq.len()
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    for map in [psi_mod, psi_tilde_mod] {
        if map.len() != pairs.len() || pairs.iter().any(|p| !map.contains_key(p)) {
            return Err(Error::IndexMismatch(format!(
                "cross terms must be given exactly for the pairs i < j < {n}"
            )));
        }
    }
    let mut failures = Vec::new();
    for &(i, j) in &pairs {
        let prod = phi_sq[i..j]
            .iter()
            .skip(1)
            .fold(phi_sq[i].clone(), |acc, p| &acc * p);
        let sq = |f: &RadialSeries<S>| f * f;
        let lhs = &(&(&sq(&prod) * &psi_mod[&(i, j)]) * &sq(&t_norms[i])) * &sq(&k_norms[j]);
        let rhs = &(&psi_tilde_mod[&(i, j)] * &sq(&k_norms[i])) * &sq(&t_norms[j]);
        if !lhs.agrees_with(&rhs) {
            failures.push((i, j));
        }
    }
    Ok(Condition2Report {
        holds: failures.is_empty(),
        failures,
    })
}
