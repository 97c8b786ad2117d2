//! Exact total-variation mixing by dense evolution of all starting rows,
//! and the spectral bounds on mixing times.
//!
//! `d(t) = max_x TV(P^t(x,·), π)` is computed from `P^t = P^{t−1}·P`; the
//! mixing time is the first `t` with `d(t) ≤ ε`. Time is counted in kernel
//! applications: site-steps for site and Glauber kernels, sweeps for scan
//! kernels. Reports always carry the site-update count as well.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::operators::{detailed_balance_residual, MarkovKernel, TimeUnit, PROJECTION_TOLERANCE};
use crate::spectral::pi_operator_norm;
use crate::statespace::tv_unchecked;

/// Largest `t` accepted by the evolution routines.
pub const DEFAULT_HORIZON: usize = 1 << 22;

/// Slack allowed on the monotonicity of `d(t)`.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;

/// Row-wise evolution of `P^t` yielding `d(0), d(1), …`.
pub struct Evolution<'a> {
    kernel: &'a MarkovKernel,
    power: DMatrix<f64>,
    scratch: DMatrix<f64>,
    t: usize,
}

impl<'a> Evolution<'a> {
    pub fn new(kernel: &'a MarkovKernel) -> Self {
        let m = kernel.dim();
        Self {
            kernel,
            power: DMatrix::identity(m, m),
            scratch: DMatrix::zeros(m, m),
            t: 0,
        }
    }

    /// Current time `t` of the held power `P^t`.
    pub fn time(&self) -> usize {
        self.t
    }

    pub fn distance(&self) -> f64 {
        worst_row_distance(&self.power, self.kernel.pi())
    }

    pub fn step(&mut self) {
        self.power.mul_to(self.kernel.matrix(), &mut self.scratch);
        std::mem::swap(&mut self.power, &mut self.scratch);
        self.t += 1;
    }
}

fn worst_row_distance(power: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let mut row = vec![0.0; pi.len()];
    (0..power.nrows())
        .map(|i| {
            for (j, r) in row.iter_mut().enumerate() {
                *r = power[(i, j)];
            }
            tv_unchecked(&row, pi)
        })
        .fold(0.0, f64::max)
}

/// `d(t)` for a single `t`.
pub fn worst_case_distance(kernel: &MarkovKernel, t: usize) -> Result<f64> {
    if t > DEFAULT_HORIZON {
        return domain(format!("t={t} is beyond the horizon {DEFAULT_HORIZON}"));
    }
    let mut evo = Evolution::new(kernel);
    for _ in 0..t {
        evo.step();
    }
    Ok(evo.distance())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingCurve {
    pub label: String,
    #[serde(flatten)]
    pub unit: TimeUnit,
    /// `d(t)` for `t = 0, 1, …, T`.
    pub d_values: Vec<f64>,
}

impl MixingCurve {
    pub fn is_non_increasing(&self, tol: f64) -> bool {
        self.d_values.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    /// CSV with columns `t,unit,d_t`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,unit,d_t\n");
        for (t, d) in self.d_values.iter().enumerate() {
            out.push_str(&format!("{t},{},{d}\n", self.unit.name()));
        }
        out
    }
}

pub fn mixing_curve(kernel: &MarkovKernel, t_max: usize) -> Result<MixingCurve> {
    if t_max > DEFAULT_HORIZON {
        return domain(format!("t_max={t_max} is beyond the horizon {DEFAULT_HORIZON}"));
    }
    let mut evo = Evolution::new(kernel);
    let mut d_values = vec![evo.distance()];
    while evo.time() < t_max {
        evo.step();
        d_values.push(evo.distance());
    }
    let curve = MixingCurve {
        label: kernel.label().to_string(),
        unit: kernel.unit(),
        d_values,
    };
    if !curve.is_non_increasing(MONOTONE_TOLERANCE) {
        return Err(Error::Numerical(format!("d(t) of '{}' increased", kernel.label())));
    }
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixingTime {
    Reached(usize),
    Exceeded,
}

impl MixingTime {
    pub fn value(self) -> Option<usize> {
        match self {
            MixingTime::Reached(t) => Some(t),
            MixingTime::Exceeded => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub label: String,
    pub epsilon: f64,
    #[serde(flatten)]
    pub unit: TimeUnit,
    pub t_mix: MixingTime,
    pub t_max: usize,
    /// `t_mix` converted to single-site updates.
    pub t_mix_site_updates: Option<usize>,
    pub gap: Option<f64>,
    pub pi_min: f64,
    /// `(1/γ)·ln(1/(ε π_min))`, in the kernel's unit.
    pub spectral_upper: Option<f64>,
    /// `(1/γ − 1)·ln(1/(2ε))`, present for reversible kernels only.
    pub reversible_lower: Option<f64>,
}

impl MixingReport {
    /// `lower ≤ t_mix ≤ upper` for whichever bounds are present.
    pub fn sandwich_holds(&self) -> bool {
        let Some(t) = self.t_mix.value() else {
            return false;
        };
        let t = t as f64;
        self.spectral_upper.is_none_or(|u| t <= u + 1e-9) && self.reversible_lower.is_none_or(|l| l <= t + 1e-9)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    Ok(())
}

/// Smallest `t ≤ t_max` with `d(t) ≤ ε`.
pub fn mixing_time(kernel: &MarkovKernel, epsilon: f64, t_max: usize) -> Result<MixingReport> {
    check_epsilon(epsilon)?;
    if t_max < 1 {
        return domain("t_max must be at least 1");
    }
    if t_max > DEFAULT_HORIZON {
        return domain(format!("t_max={t_max} is beyond the horizon {DEFAULT_HORIZON}"));
    }
    let mut evo = Evolution::new(kernel);
    let mut previous = f64::INFINITY;
    let t_mix = loop {
        let d = evo.distance();
        if d > previous + MONOTONE_TOLERANCE {
            return Err(Error::Numerical(format!("d(t) of '{}' increased at t={}", kernel.label(), evo.time())));
        }
        if d <= epsilon {
            break MixingTime::Reached(evo.time());
        }
        if evo.time() >= t_max {
            break MixingTime::Exceeded;
        }
        previous = d;
        evo.step();
    };
    let per = kernel.unit().site_updates_per_application();
    Ok(MixingReport {
        label: kernel.label().to_string(),
        epsilon,
        unit: kernel.unit(),
        t_mix,
        t_max,
        t_mix_site_updates: t_mix.value().map(|t| t * per),
        gap: None,
        pi_min: kernel.pi_min(),
        spectral_upper: None,
        reversible_lower: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMixingBounds {
    pub gap: f64,
    pub pi_min: f64,
    pub reversible: bool,
    pub upper: f64,
    pub reversible_lower: Option<f64>,
}

pub fn spectral_mixing_bounds(kernel: &MarkovKernel, epsilon: f64) -> Result<SpectralMixingBounds> {
    check_epsilon(epsilon)?;
    let gap = 1.0 - pi_operator_norm(kernel)?;
    if !(gap > 0.0) {
        return domain(format!("kernel '{}' has no spectral gap", kernel.label()));
    }
    let pi_min = kernel.pi_min();
    let reversible = detailed_balance_residual(kernel) <= PROJECTION_TOLERANCE;
    Ok(SpectralMixingBounds {
        gap,
        pi_min,
        reversible,
        upper: (1.0 / (epsilon * pi_min)).ln() / gap,
        reversible_lower: reversible.then(|| (1.0 / gap - 1.0) * (1.0 / (2.0 * epsilon)).ln()),
    })
}

/// Exact mixing time together with its spectral bounds. With `t_max = None`
/// the horizon is the spectral upper bound rounded up, so `t_mix` is always
/// reached.
pub fn analyze_mixing(kernel: &MarkovKernel, epsilon: f64, t_max: Option<usize>) -> Result<MixingReport> {
    let bounds = spectral_mixing_bounds(kernel, epsilon)?;
    let t_max = t_max.unwrap_or_else(|| (bounds.upper.ceil() as usize + 1).min(DEFAULT_HORIZON));
    let mut report = mixing_time(kernel, epsilon, t_max)?;
    report.gap = Some(bounds.gap);
    report.spectral_upper = Some(bounds.upper);
    report.reversible_lower = bounds.reversible_lower;
    Ok(report)
}

/// `(8(n+1)/γ_GD)·ln(1/(ε π_min))`: the scan mixing bound in sweeps implied
/// by the Glauber gap.
pub fn scan_mixing_bound_from_glauber(n: usize, glauber_gap: f64, epsilon: f64, pi_min: f64) -> f64 {
    8.0 * (n as f64 + 1.0) / glauber_gap * (1.0 / (epsilon * pi_min)).ln()
}

/// `Pr(U + V > T)` for independent `U ~ Geom(1/(2n))`, `V ~ Geom(1/2)` on
/// `{1, 2, …}`, by exact convolution.
pub fn glauber_tail_bound(n: usize, t: usize) -> f64 {
    let q = 1.0 / (2.0 * n as f64);
    // Pr(U ≥ T) plus Σ_{u<T} Pr(U = u)·Pr(V > T − u)
    let mut tail = if t == 0 { 1.0 } else { (1.0 - q).powi(t as i32 - 1) };
    for u in 1..t {
        tail += q * (1.0 - q).powi(u as i32 - 1) * 0.5f64.powi((t - u) as i32);
    }
    tail.min(1.0)
}
