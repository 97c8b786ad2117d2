//! Gibbs site kernels, the Glauber average and products of site kernels.
//!
//! Kernels are dense row-stochastic matrices over the support of `π` only;
//! a row distribution evolves as `μ ↦ μ·M`. For a chronological update order
//! `(u_1, …, u_L)` the product matrix is `M_{u_1}·M_{u_2}·…·M_{u_L}`, which is
//! the π-adjoint of the function-side operator `P_{u_L}…P_{u_1}`. Adjoints
//! share the π-operator norm, so norm-level bounds are orientation free.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::statespace::Distribution;

/// Row sums must equal 1 to within this.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;
/// `π·M = π` must hold entrywise to within this.
pub const STATIONARITY_TOLERANCE: f64 = 1e-10;
/// Entries smaller than this in magnitude are clamped to zero.
pub const CLAMP: f64 = 1e-14;
/// Residual threshold for the projection checks.
pub const PROJECTION_TOLERANCE: f64 = 1e-10;

/// What one application of a kernel counts as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "unit", rename_all = "kebab-case")]
pub enum TimeUnit {
    /// One site update per application.
    SiteSteps,
    /// One application is a sweep of `sites_per_sweep` site updates.
    Sweeps { sites_per_sweep: usize },
}

impl TimeUnit {
    pub fn site_updates_per_application(self) -> usize {
        match self {
            TimeUnit::SiteSteps => 1,
            TimeUnit::Sweeps { sites_per_sweep } => sites_per_sweep,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TimeUnit::SiteSteps => "site-steps",
            TimeUnit::Sweeps { .. } => "sweeps",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovKernel {
    matrix: DMatrix<f64>,
    pi: Vec<f64>,
    label: String,
    unit: TimeUnit,
}

impl MarkovKernel {
    /// Validates row-stochasticity and stationarity of `pi`, clamping tiny entries.
    pub fn new(mut matrix: DMatrix<f64>, pi: Vec<f64>, label: impl Into<String>, unit: TimeUnit) -> Result<Self> {
        let m = pi.len();
        if matrix.nrows() != m || matrix.ncols() != m {
            return domain(format!(
                "kernel is {}x{} but pi has {m} entries",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        if m == 0 {
            return domain("kernel over an empty support");
        }
        for v in matrix.iter_mut() {
            if *v < -CLAMP || !v.is_finite() {
                return Err(Error::Numerical(format!("negative or non-finite entry {v}")));
            }
            if v.abs() < CLAMP {
                *v = 0.0;
            }
        }
        for (r, row) in matrix.row_iter().enumerate() {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::Numerical(format!("row {r} sums to {s}")));
            }
        }
        for j in 0..m {
            let flow: f64 = (0..m).map(|i| pi[i] * matrix[(i, j)]).sum();
            if (flow - pi[j]).abs() > STATIONARITY_TOLERANCE {
                return Err(Error::Numerical(format!(
                    "pi is not stationary: (pi M)[{j}] = {flow}, pi[{j}] = {}",
                    pi[j]
                )));
            }
        }
        Ok(Self {
            matrix,
            pi,
            label: label.into(),
            unit,
        })
    }

    pub fn identity(pi: Vec<f64>, label: impl Into<String>) -> Self {
        let m = pi.len();
        Self {
            matrix: DMatrix::identity(m, m),
            pi,
            label: label.into(),
            unit: TimeUnit::SiteSteps,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Stationary probabilities over the support, in row order.
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn pi_min(&self) -> f64 {
        self.pi.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn unit(&self) -> TimeUnit {
        self.unit
    }

    pub fn dim(&self) -> usize {
        self.pi.len()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Site kernels `P_0, …, P_{n−1}` sharing one stationary distribution.
#[derive(Debug, Clone)]
pub struct SiteKernelSet {
    kernels: Vec<MarkovKernel>,
    pi: Vec<f64>,
    support: Vec<usize>,
}

impl SiteKernelSet {
    /// Builds every site kernel of `pi`.
    pub fn from_distribution(pi: &Distribution) -> Result<Self> {
        let kernels = (0..pi.space().sites())
            .map(|site| site_kernel(pi, site))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kernels,
            pi: pi.support_probs(),
            support: pi.support().to_vec(),
        })
    }

    /// Wraps externally built site kernels; each must pass the projection checks.
    pub fn from_kernels(kernels: Vec<MarkovKernel>) -> Result<Self> {
        let Some(first) = kernels.first() else {
            return domain("empty kernel set");
        };
        let pi = first.pi().to_vec();
        for k in &kernels {
            if k.pi().len() != pi.len() || k.pi().iter().zip(&pi).any(|(a, b)| (a - b).abs() > 1e-14) {
                return domain(format!("kernel '{}' has a different stationary distribution", k.label()));
            }
            let verdict = check_projection_properties(k);
            if !verdict.pass {
                return domain(format!(
                    "kernel '{}' is not a π-orthogonal projection (balance {:.3e}, idempotence {:.3e})",
                    k.label(),
                    verdict.detailed_balance_residual,
                    verdict.idempotence_residual
                ));
            }
        }
        let support = (0..pi.len()).collect();
        Ok(Self { kernels, pi, support })
    }

    pub fn sites(&self) -> usize {
        self.kernels.len()
    }

    pub fn kernel(&self, site: usize) -> &MarkovKernel {
        &self.kernels[site]
    }

    pub fn kernels(&self) -> &[MarkovKernel] {
        &self.kernels
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn pi_min(&self) -> f64 {
        self.pi.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Global state index of each kernel row.
    pub fn support(&self) -> &[usize] {
        &self.support
    }
}

/// Conditional resampling of `site` given all other coordinates.
pub fn site_kernel(pi: &Distribution, site: usize) -> Result<MarkovKernel> {
    let space = pi.space();
    if site >= space.sites() {
        return domain(format!("site {site} out of range for {} sites", space.sites()));
    }
    let support = pi.support();
    let mut local = vec![usize::MAX; space.total_states()];
    for (a, &x) in support.iter().enumerate() {
        local[x] = a;
    }
    let stride = space.stride(site);
    let size = space.alphabet_size(site);
    let m = support.len();
    let mut matrix = DMatrix::zeros(m, m);
    for (a, &x) in support.iter().enumerate() {
        let base = x - space.coordinate(x, site) * stride;
        let fiber = (0..size).map(|v| base + v * stride);
        let mass: f64 = fiber.clone().map(|y| pi.prob(y)).sum();
        for y in fiber {
            let p = pi.prob(y);
            if p > 0.0 {
                matrix[(a, local[y])] = p / mass;
            }
        }
    }
    MarkovKernel::new(matrix, pi.support_probs(), format!("site {site}"), TimeUnit::SiteSteps)
}

/// The Glauber kernel `(1/n) Σ_i P_i`.
pub fn glauber_kernel(kernels: &SiteKernelSet) -> Result<MarkovKernel> {
    let n = kernels.sites() as f64;
    let m = kernels.pi().len();
    let sum = kernels
        .kernels()
        .iter()
        .fold(DMatrix::zeros(m, m), |acc, k| acc + k.matrix());
    MarkovKernel::new(sum / n, kernels.pi().to_vec(), "glauber", TimeUnit::SiteSteps)
}

/// Product kernel for the chronological update order `seq`.
///
/// An empty sequence yields the identity kernel.
pub fn sequence_product_kernel(kernels: &SiteKernelSet, seq: &[usize]) -> Result<MarkovKernel> {
    if let Some(&bad) = seq.iter().find(|&&i| i >= kernels.sites()) {
        return domain(format!("site {bad} out of range for {} sites", kernels.sites()));
    }
    let Some((&first, rest)) = seq.split_first() else {
        return Ok(MarkovKernel::identity(kernels.pi().to_vec(), "identity (empty sequence)"));
    };
    let mut product = kernels.kernel(first).matrix().clone();
    let mut scratch = product.clone();
    for &i in rest {
        product.mul_to(kernels.kernel(i).matrix(), &mut scratch);
        std::mem::swap(&mut product, &mut scratch);
    }
    let label = format!("scan {seq:?}");
    MarkovKernel::new(
        product,
        kernels.pi().to_vec(),
        label,
        TimeUnit::Sweeps { sites_per_sweep: seq.len() },
    )
}

/// Residuals of the self-adjointness and idempotence checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionVerdict {
    pub label: String,
    /// `max |D·M − (D·M)ᵀ|` with `D = diag(π)`.
    pub detailed_balance_residual: f64,
    /// `max |M² − M|`.
    pub idempotence_residual: f64,
    pub reversible: bool,
    pub idempotent: bool,
    pub pass: bool,
}

pub fn check_projection_properties(kernel: &MarkovKernel) -> ProjectionVerdict {
    let balance = detailed_balance_residual(kernel);
    let m = kernel.matrix();
    let idem = (m * m - m).amax();
    ProjectionVerdict {
        label: kernel.label().to_string(),
        detailed_balance_residual: balance,
        idempotence_residual: idem,
        reversible: balance <= PROJECTION_TOLERANCE,
        idempotent: idem <= PROJECTION_TOLERANCE,
        pass: balance <= PROJECTION_TOLERANCE && idem <= PROJECTION_TOLERANCE,
    }
}

pub fn detailed_balance_residual(kernel: &MarkovKernel) -> f64 {
    let m = kernel.matrix();
    let pi = kernel.pi();
    let mut worst: f64 = 0.0;
    for i in 0..pi.len() {
        for j in i + 1..pi.len() {
            worst = worst.max((pi[i] * m[(i, j)] - pi[j] * m[(j, i)]).abs());
        }
    }
    worst
}

/// Strong connectivity of the nonzero pattern, by breadth-first search from
/// state 0 along forward and reversed edges.
pub fn is_irreducible(kernel: &MarkovKernel) -> bool {
    let m = kernel.matrix();
    let reach = |forward: bool| {
        let mut seen = vec![false; m.nrows()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in 0..m.nrows() {
                let w = if forward { m[(i, j)] } else { m[(j, i)] };
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

pub fn ensure_irreducible(kernel: &MarkovKernel) -> Result<()> {
    if is_irreducible(kernel) {
        Ok(())
    } else {
        Err(Error::Reducible(format!(
            "transition graph of '{}' is not strongly connected",
            kernel.label()
        )))
    }
}
