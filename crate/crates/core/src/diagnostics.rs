//! Monte Carlo verification: ensemble generation, normality distances,
//! convergence-rate fitting and concentration-bound checking.

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, FisherSnedecor, Normal};

use crate::rng::{derive_seed, stream};
use crate::{Error, Result};

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// Φ⁻¹.
pub fn normal_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

/// Φ.
pub fn normal_cdf(x: f64) -> f64 {
    std_normal().cdf(x)
}

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

/// How replicate statistics are centered and scaled.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Standardization {
    /// Analytic mean and asymptotic standard deviation.
    Analytic { mean: f64, eta: f64 },
    /// Plugin (estimated) standard deviation with an analytic or grand mean.
    Plugin { mean: f64, eta: f64 },
    /// Grand mean and replicate-empirical standard deviation of the scaled
    /// values (one degree-of-freedom correction, flagged in the report).
    Empirical,
}

/// Standardized replicate values plus diagnostics.
#[derive(Clone, Debug, serde::Serialize)]
pub struct EnsembleReport {
    pub values: Vec<f64>,
    pub n: u64,
    pub replicates: usize,
    /// Averaging-set size used for the √-scaling.
    pub count: f64,
    pub base_seed: u64,
    pub standardization: Standardization,
    /// True when centering used the replicate grand mean.
    pub centered_empirically: bool,
    pub empirical_mean: f64,
    pub empirical_variance: f64,
    pub w1_to_normal: f64,
    pub ks_statistic: f64,
    pub model: String,
    pub statistic: String,
    pub scheme: String,
}

/// Runs `replicates` independent replicates of a scalar statistic and
/// standardizes them as `√count · (x_i − center) / η̃`.
///
/// Replicates execute in parallel with per-index derived seeds; the report is
/// bit-identical for a fixed `(base_seed, config)` regardless of the worker
/// count. Raises `DegenerateVariance` when the scale falls below 1e-8.
pub fn run_ensemble(
    count: f64,
    replicates: usize,
    base_seed: u64,
    standardization: Standardization,
    replicate: impl Fn(u64) -> f64 + Sync,
) -> Result<EnsembleReport> {
    assert!(replicates >= 100, "ensembles need at least 100 replicates");
    let raw: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| replicate(derive_seed(base_seed, stream::REPLICATE, rep)))
        .collect();
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite replicate value".into()));
    }
    let grand_mean: f64 = raw.iter().sum::<f64>() / replicates as f64;
    let (center, eta, centered_empirically) = match standardization {
        Standardization::Analytic { mean, eta } | Standardization::Plugin { mean, eta } => {
            (mean, eta, false)
        }
        Standardization::Empirical => {
            // scale of √count·(x − mean): sample s.d. with the 1-dof correction
            let var: f64 = raw
                .iter()
                .map(|x| (x - grand_mean) * (x - grand_mean))
                .sum::<f64>()
                / (replicates - 1) as f64;
            (grand_mean, (count * var).sqrt(), true)
        }
    };
    if !(eta > 1e-8) {
        return Err(Error::DegenerateVariance { eta });
    }
    let values: Vec<f64> =
        raw.iter().map(|x| count.sqrt() * (x - center) / eta).collect();
    let empirical_mean: f64 = values.iter().sum::<f64>() / replicates as f64;
    let empirical_variance: f64 = values
        .iter()
        .map(|v| (v - empirical_mean) * (v - empirical_mean))
        .sum::<f64>()
        / (replicates - 1) as f64;
    let w1 = wasserstein1_to_normal(&values);
    let ks = ks_to_normal(&values);
    Ok(EnsembleReport {
        values,
        n: 0,
        replicates,
        count,
        base_seed,
        standardization,
        centered_empirically,
        empirical_mean,
        empirical_variance,
        w1_to_normal: w1,
        ks_statistic: ks,
        model: String::new(),
        statistic: String::new(),
        scheme: String::new(),
    })
}

// ---------------------------------------------------------------------------
// Distances to the normal law
// ---------------------------------------------------------------------------

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    v
}

/// Empirical quantile coupling against exact normal quantiles:
/// `(1/R) Σ_i |x_(i) − Φ⁻¹((i−½)/R)|`.
pub fn wasserstein1_to_normal(values: &[f64]) -> f64 {
    assert!(values.len() >= 100, "need at least 100 values");
    let r = values.len();
    let v = sorted(values);
    let mut acc = 0.0;
    for (i, x) in v.iter().enumerate() {
        let q = normal_quantile((i as f64 + 0.5) / r as f64);
        acc += (x - q).abs();
    }
    acc / r as f64
}

/// Midpoint Kolmogorov-Smirnov statistic `max_i |Φ(x_(i)) − (i−½)/R|`; zero
/// exactly on the quantile grid, within 1/(2R) of the classical statistic.
pub fn ks_to_normal(values: &[f64]) -> f64 {
    let r = values.len() as f64;
    let v = sorted(values);
    let mut sup: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        let d = (normal_cdf(*x) - (i as f64 + 0.5) / r).abs();
        sup = sup.max(d);
    }
    sup
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> (f64, f64) {
    let xa = sorted(a);
    let xb = sorted(b);
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        sup = sup.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na as f64 * nb as f64) / (na as f64 + nb as f64);
    (sup, kolmogorov_sf(ne.sqrt() * sup))
}

/// Survival function of the Kolmogorov distribution,
/// `P(K > x) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²x²}`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut acc = 0.0;
    for k in 1..200 {
        let term = (-2.0 * (k as f64) * (k as f64) * x * x).exp();
        acc += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * acc).clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

/// Least-squares fit of `log(distance)` on `log(set size)`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct RateFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub slope_stderr: f64,
}

/// Ordinary least squares of `log d_i` on `log a_i` over ≥ 4 scales.
pub fn rate_fit(sizes_and_distances: &[(f64, f64)]) -> Result<RateFit> {
    if sizes_and_distances.len() < 4 {
        return Err(Error::InvalidParameter("rate fit needs at least 4 scales".into()));
    }
    for &(a, d) in sizes_and_distances {
        if !(d > 0.0) {
            return Err(Error::NonpositiveDistance { value: d });
        }
        if !(a > 0.0) {
            return Err(Error::InvalidParameter("set sizes must be positive".into()));
        }
    }
    let pts: Vec<(f64, f64)> =
        sizes_and_distances.iter().map(|&(a, d)| (a.ln(), d.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - (intercept + slope * p.0);
            e * e
        })
        .sum();
    let dof = (pts.len() as f64 - 2.0).max(1.0);
    let slope_stderr = (rss / dof / sxx).sqrt();
    Ok(RateFit { points: pts, slope, slope_stderr })
}

// ---------------------------------------------------------------------------
// Concentration checking
// ---------------------------------------------------------------------------

/// Per-threshold entry of a concentration check.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct TailPoint {
    pub t: f64,
    pub bound: f64,
    pub exceedances: u64,
    pub frequency: f64,
    pub wilson_upper: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The premise (interdependence coefficient < 1) does not hold.
    Skip,
}

/// Report of an exponential-tail bound check.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConcentrationReport {
    pub status: CheckStatus,
    pub lambda: f64,
    pub folner_size: f64,
    pub coefficient_sum: f64,
    pub tau: f64,
    pub points: Vec<TailPoint>,
}

/// One-sided Wilson score upper confidence limit at confidence `1 − α`
/// (z is the `1 − α` normal quantile).
pub fn wilson_upper(hits: u64, trials: u64, z: f64) -> f64 {
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let margin = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center + margin) / denom).min(1.0)
}

/// Checks the exponential tail bound
/// `P(F̂_n ≥ t) ≤ 2 exp(−(1−Λ)|A_n| t² / ((Σ cᵢ)² τ))`
/// against empirical exceedance frequencies, using the Wilson-99% upper
/// confidence limit. `Λ ≥ 1` makes the bound vacuous and yields `Skip`.
pub fn concentration_check(
    values: &[f64],
    t_grid: &[f64],
    lambda: f64,
    coefficient_sum: f64,
    tau: f64,
    folner_size: f64,
) -> ConcentrationReport {
    if lambda >= 1.0 {
        return ConcentrationReport {
            status: CheckStatus::Skip,
            lambda,
            folner_size,
            coefficient_sum,
            tau,
            points: Vec::new(),
        };
    }
    let z99 = normal_quantile(0.99);
    let trials = values.len() as u64;
    let mut points = Vec::with_capacity(t_grid.len());
    let mut all_pass = true;
    for &t in t_grid {
        let bound = 2.0
            * (-(1.0 - lambda) * folner_size * t * t
                / (coefficient_sum * coefficient_sum * tau))
                .exp();
        let hits = values.iter().filter(|&&v| v >= t).count() as u64;
        let frequency = hits as f64 / trials as f64;
        let wilson = wilson_upper(hits, trials, z99);
        let pass = wilson <= bound;
        all_pass &= pass;
        points.push(TailPoint { t, bound, exceedances: hits, frequency, wilson_upper: wilson, pass });
    }
    ConcentrationReport {
        status: if all_pass { CheckStatus::Pass } else { CheckStatus::Fail },
        lambda,
        folner_size,
        coefficient_sum,
        tau,
        points,
    }
}

/// One-sided p-value for `Var(a) > Var(b)` under normality (F-test).
pub fn variance_ratio_p_value(var_a: f64, var_b: f64, na: usize, nb: usize) -> f64 {
    let f = FisherSnedecor::new((na - 1) as f64, (nb - 1) as f64).expect("valid dof");
    1.0 - f.cdf(var_a / var_b)
}
