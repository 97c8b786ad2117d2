//! The hardcore model with fugacity 1 on the complete graph `K_n`, reduced to
//! its `n + 1` support states.
//!
//! State `0` is the empty set and state `i ∈ 1..=n` is the singleton `e_i`.
//! Updating site `i` from `0` or `e_i` moves uniformly to `{0, e_i}`; any
//! other state is left alone. In kernel form site `j` (0-based) acts on
//! `e_{j+1}`, which matches the support order of the full `2ⁿ` space.
//!
//! Times in trajectories count site updates; update `t` re-randomizes site
//! `((t − 1) mod n) + 1`, so a sweep is `n` consecutive updates.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::mixing::{mixing_time, scan_mixing_bound_from_glauber, MixingTime, DEFAULT_HORIZON};
use crate::operators::{MarkovKernel, SiteKernelSet, TimeUnit};
use crate::rng::stream_rng;
use crate::spectral::spectral_gap;
use crate::statespace::tv_unchecked;

/// Largest number of stopping times a single trajectory may record.
pub const DEFAULT_EVENT_CAP: usize = 1 << 20;

pub const MIN_TRIALS: usize = 100;

/// Smallest `n` accepted by [`concentration_check`].
pub const MIN_CONCENTRATION_SITES: usize = 16;

/// Default `c'`: the horizon is `c'·n²` sweeps.
pub const DEFAULT_C_PRIME: f64 = 0.003;

pub const DECOMPOSITION_TV_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HardcoreState(usize);

impl HardcoreState {
    pub const EMPTY: HardcoreState = HardcoreState(0);

    pub fn new(value: usize, n: usize) -> Result<Self> {
        if value > n {
            return domain(format!("state {value} out of range 0..={n}"));
        }
        Ok(Self(value))
    }

    /// `e_n`, the start used throughout.
    pub fn top(n: usize) -> Self {
        Self(n)
    }

    pub fn value(self) -> usize {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

fn uniform_pi(n: usize) -> Vec<f64> {
    vec![1.0 / (n as f64 + 1.0); n + 1]
}

/// Site kernel of 0-based site `j` on the compact chain.
pub fn compact_site_kernel(n: usize, j: usize) -> Result<MarkovKernel> {
    if j >= n {
        return domain(format!("site {j} out of range for {n} sites"));
    }
    let mut m = DMatrix::identity(n + 1, n + 1);
    let e = j + 1;
    for &a in &[0, e] {
        m[(a, 0)] = 0.5;
        m[(a, e)] = 0.5;
    }
    MarkovKernel::new(m, uniform_pi(n), format!("hardcore K_{n} site {j}"), TimeUnit::SiteSteps)
}

pub fn compact_site_kernels(n: usize) -> Result<SiteKernelSet> {
    if n == 0 {
        return domain("need at least one site");
    }
    SiteKernelSet::from_kernels((0..n).map(|j| compact_site_kernel(n, j)).collect::<Result<_>>()?)
}

pub fn compact_glauber_kernel(n: usize) -> Result<MarkovKernel> {
    if n == 0 {
        return domain("need at least one site");
    }
    let q = 1.0 / (2.0 * n as f64);
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m[(0, 0)] = 0.5;
    for i in 1..=n {
        m[(0, i)] = q;
        m[(i, 0)] = q;
        m[(i, i)] = 1.0 - q;
    }
    MarkovKernel::new(m, uniform_pi(n), format!("hardcore K_{n} glauber"), TimeUnit::SiteSteps)
}

/// One sweep `P_0 P_1 … P_{n−1}`, built by column updates in `O(n²)`.
pub fn compact_scan_kernel(n: usize) -> Result<MarkovKernel> {
    if n == 0 {
        return domain("need at least one site");
    }
    let mut m = DMatrix::<f64>::identity(n + 1, n + 1);
    for e in 1..=n {
        // right-multiplying by the site kernel averages columns 0 and e
        for r in 0..=n {
            let avg = 0.5 * (m[(r, 0)] + m[(r, e)]);
            m[(r, 0)] = avg;
            m[(r, e)] = avg;
        }
    }
    MarkovKernel::new(
        m,
        uniform_pi(n),
        format!("hardcore K_{n} scan"),
        TimeUnit::Sweeps { sites_per_sweep: n },
    )
}

struct Walker {
    n: usize,
    state: usize,
    t: u64,
}

impl Walker {
    fn new(n: usize, start: HardcoreState) -> Self {
        Self { n, state: start.0, t: 0 }
    }

    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let site = (self.t % self.n as u64) as usize + 1;
        self.t += 1;
        if self.state == 0 || self.state == site {
            self.state = if rng.random::<bool>() { site } else { 0 };
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryStats {
    pub n: usize,
    pub total_updates: u64,
    pub tau: Vec<u64>,
    pub nu: Vec<u64>,
    pub final_state: HardcoreState,
    pub seed: u64,
}

impl TrajectoryStats {
    /// `τ_1 < ν_1 < τ_2 < …`, all within the horizon.
    pub fn is_interleaved(&self) -> bool {
        if self.nu.len() > self.tau.len() || self.tau.len() > self.nu.len() + 1 {
            return false;
        }
        let merged: Vec<u64> = self
            .tau
            .iter()
            .zip(self.nu.iter().map(Some).chain(std::iter::repeat(None)))
            .flat_map(|(t, v)| std::iter::once(*t).chain(v.copied()))
            .collect();
        merged.windows(2).all(|w| w[0] < w[1]) && merged.iter().all(|&t| t >= 1 && t <= self.total_updates)
    }
}

/// Identity-order scan for `sweeps` sweeps, recording every `τ_s` and `ν_s`.
pub fn simulate_scan(n: usize, sweeps: u64, seed: u64, start: HardcoreState) -> Result<TrajectoryStats> {
    simulate_scan_with_cap(n, sweeps, seed, start, DEFAULT_EVENT_CAP)
}

pub fn simulate_scan_with_cap(
    n: usize,
    sweeps: u64,
    seed: u64,
    start: HardcoreState,
    event_cap: usize,
) -> Result<TrajectoryStats> {
    if n == 0 {
        return domain("need at least one site");
    }
    let start = HardcoreState::new(start.0, n)?;
    let total = sweeps
        .checked_mul(n as u64)
        .ok_or_else(|| Error::Domain("horizon overflows".into()))?;
    let mut rng = stream_rng(seed, 0);
    let mut walker = Walker::new(n, start);
    let (mut tau, mut nu) = (Vec::new(), Vec::new());
    while walker.t < total {
        walker.step(&mut rng);
        let waiting_for_drop = tau.len() == nu.len();
        if waiting_for_drop == (walker.state == 0) {
            if tau.len() + nu.len() >= event_cap {
                return Err(Error::Simulation(format!(
                    "stopping-time buffer full after {event_cap} events at update {}",
                    walker.t
                )));
            }
            if waiting_for_drop {
                tau.push(walker.t);
            } else {
                nu.push(walker.t);
            }
        }
    }
    Ok(TrajectoryStats {
        n,
        total_updates: total,
        tau,
        nu,
        final_state: HardcoreState(walker.state),
        seed,
    })
}

/// `ν_s` of one trajectory started at `e_n`, or `None` past `horizon` updates.
fn nu_at<R: Rng + ?Sized>(n: usize, s: usize, horizon: u64, rng: &mut R) -> Option<u64> {
    let mut walker = Walker::new(n, HardcoreState::top(n));
    let mut count = 0;
    let mut dropped = false;
    while walker.t < horizon {
        walker.step(rng);
        if !dropped && walker.state == 0 {
            dropped = true;
        } else if dropped && walker.state != 0 {
            dropped = false;
            count += 1;
            if count == s {
                return Some(walker.t);
            }
        }
    }
    None
}

/// Last `ν_s ≤ horizon` (0 if none) of one trajectory started at `e_n`.
fn last_nu_before<R: Rng + ?Sized>(n: usize, horizon: u64, rng: &mut R) -> u64 {
    let mut walker = Walker::new(n, HardcoreState::top(n));
    let mut last = 0;
    let mut dropped = false;
    while walker.t < horizon {
        walker.step(rng);
        if !dropped && walker.state == 0 {
            dropped = true;
        } else if dropped && walker.state != 0 {
            dropped = false;
            last = walker.t;
        }
    }
    last
}

fn nu_mean(n: usize, s: usize) -> f64 {
    2.0 * (n as f64 + 1.0) * s as f64
}

fn nu_variance(n: usize, s: usize) -> f64 {
    2.0 * ((n * n) as f64 + 1.0) * s as f64
}

/// `ν_s` for every trial; all trials must reach `ν_s`.
fn sample_nu(n: usize, s: usize, trials: usize, seed: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return domain("need at least one site");
    }
    if s == 0 {
        return domain("s must be at least 1");
    }
    if trials < MIN_TRIALS {
        return domain(format!("need at least {MIN_TRIALS} trials, got {trials}"));
    }
    let horizon = (nu_mean(n, s) + 40.0 * nu_variance(n, s).sqrt()).ceil() as u64 + n as u64;
    let samples: Vec<Option<u64>> = (0..trials)
        .into_par_iter()
        .map(|trial| nu_at(n, s, horizon, &mut stream_rng(seed, trial as u64)))
        .collect();
    let reached: Vec<u64> = samples.into_iter().flatten().collect();
    if reached.len() < trials {
        return Err(Error::Simulation(format!(
            "only {} of {trials} trajectories reached nu_{s} within {horizon} updates",
            reached.len()
        )));
    }
    Ok(reached)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuMomentVerdict {
    pub n: usize,
    pub s: usize,
    pub trials: usize,
    pub mean: f64,
    pub mean_target: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_target: f64,
    pub variance_se: f64,
    pub mean_pass: bool,
    pub variance_pass: bool,
    pub pass: bool,
}

/// Sample mean and variance of `ν_s` against `2(n+1)s` and `2(n²+1)s`.
pub fn nu_moment_check(n: usize, s: usize, trials: usize, seed: u64) -> Result<NuMomentVerdict> {
    let xs = sample_nu(n, s, trials, seed)?;
    let count = xs.len() as f64;
    let mean = xs.iter().map(|&x| x as f64).sum::<f64>() / count;
    let central = |p: i32| xs.iter().map(|&x| (x as f64 - mean).powi(p)).sum::<f64>() / count;
    let m2 = central(2);
    let m4 = central(4);
    let variance = m2 * count / (count - 1.0);
    let mean_se = (variance / count).sqrt();
    let variance_se = ((m4 - m2 * m2).max(0.0) / count).sqrt();
    let (mean_target, variance_target) = (nu_mean(n, s), nu_variance(n, s));
    let mean_pass = (mean - mean_target).abs() <= 3.0 * mean_se;
    let variance_pass = (variance - variance_target).abs() <= 0.1 * variance_target + 3.0 * variance_se;
    Ok(NuMomentVerdict {
        n,
        s,
        trials,
        mean,
        mean_target,
        mean_se,
        variance,
        variance_target,
        variance_se,
        mean_pass,
        variance_pass,
        pass: mean_pass && variance_pass,
    })
}

/// Exact law of `(Y_1 + … + Y_s) mod n` for i.i.d. `Y_i ~ Geom(1/2)` on `{1, 2, …}`.
pub fn geometric_sum_residues(n: usize, s: usize) -> Vec<f64> {
    let denom = 1.0 - 0.5f64.powi(n as i32);
    let single: Vec<f64> = (0..n)
        .map(|r| {
            let k = if r == 0 { n } else { r };
            0.5f64.powi(k as i32) / denom
        })
        .collect();
    let mut law = vec![0.0; n];
    law[0] = 1.0;
    for _ in 0..s {
        let mut next = vec![0.0; n];
        for (a, pa) in law.iter().enumerate() {
            for (b, pb) in single.iter().enumerate() {
                next[(a + b) % n] += pa * pb;
            }
        }
        law = next;
    }
    law
}

fn residue_law(xs: &[u64], n: usize) -> Vec<f64> {
    let mut counts = vec![0usize; n];
    for &x in xs {
        counts[(x % n as u64) as usize] += 1;
    }
    counts.iter().map(|&c| c as f64 / xs.len() as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionVerdict {
    pub n: usize,
    pub s: usize,
    pub trials: usize,
    pub empirical: Vec<f64>,
    pub reference: Vec<f64>,
    pub tv: f64,
    pub tv_limit: f64,
    pub pass: bool,
}

/// Residues of simulated `ν_s` against the law of `Σ Y_i mod n`.
pub fn decomposition_check(n: usize, s: usize, trials: usize, seed: u64) -> Result<DecompositionVerdict> {
    let reference = geometric_sum_residues(n.max(1), s);
    decomposition_check_against(n, s, trials, seed, reference)
}

/// As [`decomposition_check`] with an arbitrary reference residue law.
pub fn decomposition_check_against(
    n: usize,
    s: usize,
    trials: usize,
    seed: u64,
    reference: Vec<f64>,
) -> Result<DecompositionVerdict> {
    if reference.len() != n {
        return domain(format!("reference law has {} residues, expected {n}", reference.len()));
    }
    let xs = sample_nu(n, s, trials, seed)?;
    let empirical = residue_law(&xs, n);
    let tv = tv_unchecked(&empirical, &reference);
    Ok(DecompositionVerdict {
        n,
        s,
        trials,
        empirical,
        reference,
        tv,
        tv_limit: DECOMPOSITION_TV_LIMIT,
        pass: tv <= DECOMPOSITION_TV_LIMIT,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationVerdict {
    pub n: usize,
    pub trials: usize,
    pub c_prime: f64,
    pub horizon_updates: u64,
    /// Empirical law of `ν_{s*} mod n`.
    pub residues: Vec<f64>,
    /// Smallest set of residues holding at least 3/4 of the mass.
    pub set: Vec<usize>,
    pub set_mass: f64,
    pub size_limit: f64,
    pub pass: bool,
}

/// Checks that `ν_{s*} mod n` at horizon `c'n³` concentrates on at most
/// `n/4 − 1` residues with probability 3/4.
pub fn concentration_check(n: usize, trials: usize, seed: u64, c_prime: f64) -> Result<ConcentrationVerdict> {
    if n < MIN_CONCENTRATION_SITES {
        return domain(format!("need n >= {MIN_CONCENTRATION_SITES}, got {n}"));
    }
    if trials < MIN_TRIALS {
        return domain(format!("need at least {MIN_TRIALS} trials, got {trials}"));
    }
    if !(c_prime > 0.0 && c_prime.is_finite()) {
        return domain(format!("c' must be positive, got {c_prime}"));
    }
    let horizon = (c_prime * (n as f64).powi(3)).floor() as u64;
    let last: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|trial| last_nu_before(n, horizon, &mut stream_rng(seed, trial as u64)))
        .collect();
    let residues = residue_law(&last, n);
    let mut ranked: Vec<usize> = (0..n).collect();
    ranked.sort_by(|&a, &b| residues[b].total_cmp(&residues[a]).then(a.cmp(&b)));
    let mut set = Vec::new();
    let mut set_mass = 0.0;
    for r in ranked {
        if set_mass >= 0.75 {
            break;
        }
        set.push(r);
        set_mass += residues[r];
    }
    set.sort_unstable();
    let size_limit = n as f64 / 4.0 - 1.0;
    Ok(ConcentrationVerdict {
        n,
        trials,
        c_prime,
        horizon_updates: horizon,
        residues,
        pass: set.len() as f64 <= size_limit,
        set,
        set_mass,
        size_limit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub n: usize,
    pub t_gd_steps: usize,
    pub t_ss_sweeps: usize,
    pub ratio: f64,
    /// Scan mixing bound from the Glauber gap, in sweeps.
    pub ss_upper_bound: f64,
    /// `t_ss_sweeps ≤ ss_upper_bound`.
    pub bound_check: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationTable {
    pub epsilon: f64,
    pub rows: Vec<SeparationRow>,
    pub slope_gd: Option<f64>,
    pub slope_ss: Option<f64>,
    /// Whether `t_SS/t_GD` strictly increases along the rows.
    pub ratio_increasing: bool,
}

impl SeparationTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,t_gd_steps,t_ss_sweeps,ratio,bound_check\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.t_gd_steps, r.t_ss_sweeps, r.ratio, r.bound_check
            ));
        }
        out
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn reached(t: MixingTime, what: &str, n: usize) -> Result<usize> {
    t.value()
        .ok_or_else(|| Error::Numerical(format!("{what} on K_{n} did not mix within the horizon")))
}

pub fn separation_row(n: usize, epsilon: f64) -> Result<SeparationRow> {
    let glauber = compact_glauber_kernel(n)?;
    let scan = compact_scan_kernel(n)?;
    let t_gd = reached(mixing_time(&glauber, epsilon, DEFAULT_HORIZON)?.t_mix, "glauber", n)?;
    let t_ss = reached(mixing_time(&scan, epsilon, DEFAULT_HORIZON)?.t_mix, "scan", n)?;
    let gamma = spectral_gap(&glauber)?;
    let ss_upper_bound = scan_mixing_bound_from_glauber(n, gamma, epsilon, glauber.pi_min());
    Ok(SeparationRow {
        n,
        t_gd_steps: t_gd,
        t_ss_sweeps: t_ss,
        ratio: t_ss as f64 / t_gd as f64,
        ss_upper_bound,
        bound_check: t_ss as f64 <= ss_upper_bound,
    })
}

/// Exact Glauber (site-steps) and scan (sweeps) mixing times across `ns`.
pub fn separation_experiment(ns: &[usize], epsilon: f64) -> Result<SeparationTable> {
    if ns.is_empty() {
        return domain("empty list of sizes");
    }
    if let Some(&bad) = ns.iter().find(|&&n| !(2..=512).contains(&n)) {
        return domain(format!("n={bad} outside 2..=512"));
    }
    let rows = ns
        .par_iter()
        .map(|&n| separation_row(n, epsilon))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let gd: Vec<f64> = rows.iter().map(|r| r.t_gd_steps as f64).collect();
    let ss: Vec<f64> = rows.iter().map(|r| r.t_ss_sweeps as f64).collect();
    Ok(SeparationTable {
        epsilon,
        slope_gd: log_log_slope(&xs, &gd),
        slope_ss: log_log_slope(&xs, &ss),
        ratio_increasing: rows.windows(2).all(|w| w[1].ratio > w[0].ratio),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixing::{glauber_tail_bound, Evolution};
    use crate::models::{build_hardcore, GraphSpec};
    use crate::operators::{glauber_kernel, sequence_product_kernel};

    fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    #[test]
    fn compact_chain_matches_full_space() {
        for n in 1..=6 {
            let full =
                SiteKernelSet::from_distribution(&build_hardcore(&GraphSpec::complete(n).unwrap(), 1.0).unwrap())
                    .unwrap();
            let compact = compact_site_kernels(n).unwrap();
            for j in 0..n {
                assert!(max_diff(full.kernel(j).matrix(), compact.kernel(j).matrix()) <= 1e-12);
            }
            let order: Vec<usize> = (0..n).collect();
            let g = glauber_kernel(&full).unwrap();
            let s = sequence_product_kernel(&full, &order).unwrap();
            assert!(max_diff(g.matrix(), compact_glauber_kernel(n).unwrap().matrix()) <= 1e-12);
            assert!(max_diff(s.matrix(), compact_scan_kernel(n).unwrap().matrix()) <= 1e-12);
        }
    }

    #[test]
    fn tau_one_is_geometric_at_n1() {
        let taus: Vec<f64> = (0..10_000u64)
            .map(|seed| simulate_scan(1, 200, seed, HardcoreState::top(1)).unwrap().tau[0] as f64)
            .collect();
        let k = taus.len() as f64;
        let mean = taus.iter().sum::<f64>() / k;
        let var = taus.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (k - 1.0);
        assert!((mean - 2.0).abs() <= 3.0 * (var / k).sqrt(), "mean {mean}");
    }

    #[test]
    fn trajectories_are_deterministic_and_interleaved() {
        let a = simulate_scan(5, 100, 42, HardcoreState::top(5)).unwrap();
        let b = simulate_scan(5, 100, 42, HardcoreState::top(5)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.total_updates, 500);
        for seed in 0..50 {
            assert!(simulate_scan(7, 60, seed, HardcoreState::EMPTY).unwrap().is_interleaved());
        }
    }

    #[test]
    fn empty_start_excites_half_the_time() {
        let trials = 4000u64;
        let up = (0..trials)
            .filter(|&seed| {
                let t = simulate_scan(4, 1, seed, HardcoreState::EMPTY).unwrap();
                // τ_1 = 1 exactly when the first update leaves the empty set alone
                t.tau.first() != Some(&1)
            })
            .count() as f64;
        let p = up / trials as f64;
        assert!((p - 0.5).abs() <= 3.0 * (0.25 / trials as f64).sqrt(), "p {p}");
    }

    #[test]
    fn event_buffer_overflow_is_an_error() {
        assert!(matches!(
            simulate_scan_with_cap(3, 1000, 1, HardcoreState::top(3), 4),
            Err(Error::Simulation(_))
        ));
        assert!(HardcoreState::new(4, 3).is_err());
    }

    #[test]
    fn moments_at_n1() {
        let v = nu_moment_check(1, 1, 4000, 5).unwrap();
        assert_eq!(v.mean_target, 4.0);
        assert_eq!(v.variance_target, 4.0);
        assert!(v.pass, "{v:?}");
        assert!(nu_moment_check(1, 1, 0, 5).is_err());
        assert!(nu_moment_check(1, 0, 200, 5).is_err());
    }

    #[test]
    fn geometric_residues() {
        // brute force: Σ_{odd k ≤ 60} 2^{-k}
        let odd: f64 = (1..=60).filter(|k| k % 2 == 1).map(|k| 0.5f64.powi(k)).sum();
        let law = geometric_sum_residues(2, 1);
        assert!((law[1] - odd).abs() < 1e-15);
        assert!((law[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((law[0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(geometric_sum_residues(1, 7), vec![1.0]);
        let law = geometric_sum_residues(5, 3);
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn decomposition_and_control() {
        let v = decomposition_check(2, 1, 4000, 11).unwrap();
        assert!(v.pass, "{v:?}");
        let v = decomposition_check(1, 3, 200, 11).unwrap();
        assert_eq!(v.tv, 0.0);
        let v = decomposition_check(6, 4, 4000, 11).unwrap();
        assert!(v.pass, "{v:?}");
        let v = decomposition_check_against(2, 1, 4000, 11, vec![0.5, 0.5]).unwrap();
        assert!(!v.pass, "{v:?}");
    }

    #[test]
    fn concentration_needs_sixteen_sites() {
        assert!(concentration_check(8, 500, 1, DEFAULT_C_PRIME).is_err());
        let v = concentration_check(16, 500, 1, 10.0).unwrap();
        assert!(!v.pass);
        assert!(v.set_mass >= 0.75);
    }

    #[test]
    fn concentration_at_sixty_four() {
        let v = concentration_check(64, 2000, 3, DEFAULT_C_PRIME).unwrap();
        assert!(v.pass, "|A| = {}", v.set.len());
        let v = concentration_check(64, 200, 3, 10.0).unwrap();
        assert!(!v.pass, "|A| = {}", v.set.len());
    }

    #[test]
    fn glauber_distance_under_tail_bound() {
        for n in [4, 16] {
            let g = compact_glauber_kernel(n).unwrap();
            let mut evo = Evolution::new(&g);
            for t in 0..=200 {
                assert!(evo.distance() <= glauber_tail_bound(n, t) + 1e-14, "n={n} t={t}");
                evo.step();
            }
        }
    }

    #[test]
    fn separation_pins() {
        // exact evolution of the compact chains, frozen
        let table = separation_experiment(&[2, 4, 8, 16, 32, 64], 0.25).unwrap();
        let got: Vec<(usize, usize, usize)> =
            table.rows.iter().map(|r| (r.n, r.t_gd_steps, r.t_ss_sweeps)).collect();
        assert_eq!(
            got,
            vec![(2, 3, 2), (4, 9, 2), (8, 20, 4), (16, 42, 9), (32, 87, 29), (64, 175, 104)]
        );
        assert!(table.rows.iter().all(|r| r.bound_check));
        assert!(table.to_csv().starts_with("n,t_gd_steps,t_ss_sweeps,ratio,bound_check\n2,3,2,"));
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() - 1.5).abs() < 1e-12);
    }
}
