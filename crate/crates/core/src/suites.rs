//! Verification suites run against one model, plus the model-free
//! certificate experiment.
//!
//! Every suite is deterministic given its seed. Sampled objects for trial
//! `t` come from stream `t`, work is spread with rayon, and results are
//! collected in trial order.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::mixing::analyze_mixing;
use crate::models::{GraphSpec, ModelSpec};
use crate::operators::{glauber_kernel, sequence_product_kernel, SiteKernelSet};
use crate::report::{NamedResult, ResultBody};
use crate::rng::stream_rng;
use crate::schedules::{
    certify_sequence, coupon_moments, sample_covering_sequence_with, sample_supersequence_with, UpdateSequence,
};
use crate::spectral::{
    all_permutations, converse_power_check, converse_single_power_check, glauber_gap, laplacian_comparison,
    pi_operator_norm, scan_gap_report, sequence_gap_bound, spectral_gap, supersequence_gap_bound,
    MAX_EXHAUSTIVE_SITES, VERIFY_TOLERANCE,
};

pub const SAMPLED_PERMUTATIONS: usize = 20;
pub const RANDOM_SEQUENCES: usize = 200;
pub const MIXING_EPSILONS: [f64; 2] = [0.25, 0.05];
pub const SINGLE_ORDER_CONSTANT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Every scan order against the Glauber gap.
    Cor32,
    /// Random covering sequences, squared-norm bound.
    Thm31,
    /// Random supersequences of the identity scan.
    Thm36,
    /// Laplacian sandwich for the identity scan.
    Lemma27,
    /// Glauber gap from scan gaps via the power mechanism.
    Thm35,
    /// Exact mixing times against spectral bounds.
    Thm25,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Cor32, Suite::Thm31, Suite::Thm36, Suite::Lemma27, Suite::Thm35, Suite::Thm25];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Cor32 => "cor32",
            Suite::Thm31 => "thm31",
            Suite::Thm36 => "thm36",
            Suite::Lemma27 => "lemma27",
            Suite::Thm35 => "thm35",
            Suite::Thm25 => "thm25",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown suite '{s}'")))
    }
}

/// All orders for `n ≤ 5`, otherwise 20 seeded uniform shuffles.
pub fn suite_permutations(n: usize, seed: u64) -> Vec<Vec<usize>> {
    if n <= MAX_EXHAUSTIVE_SITES {
        return all_permutations(n);
    }
    (0..SAMPLED_PERMUTATIONS)
        .map(|t| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut stream_rng(seed, t as u64));
            order
        })
        .collect()
}

fn spectral(name: String, r: crate::spectral::SpectralReport) -> NamedResult {
    NamedResult::new(name, ResultBody::Spectral(r))
}

pub fn run_cor32(kernels: &SiteKernelSet, seed: u64) -> Result<Vec<NamedResult>> {
    let delta = glauber_gap(kernels)?;
    suite_permutations(kernels.sites(), seed)
        .par_iter()
        .map(|order| Ok(spectral(format!("cor32 {order:?}"), scan_gap_report(kernels, order, delta)?)))
        .collect()
}

pub fn run_thm31(kernels: &SiteKernelSet, count: usize, seed: u64) -> Result<Vec<NamedResult>> {
    let n = kernels.sites();
    let delta = glauber_gap(kernels)?;
    (0..count)
        .into_par_iter()
        .map(|t| {
            let seq = sample_covering_sequence_with(n, &mut stream_rng(seed, t as u64))?;
            Ok(spectral(format!("thm31 sequence {t}"), sequence_gap_bound(kernels, &seq, delta)?))
        })
        .collect()
}

pub fn run_thm36(kernels: &SiteKernelSet, count: usize, seed: u64) -> Result<Vec<NamedResult>> {
    let n = kernels.sites();
    let order: Vec<usize> = (0..n).collect();
    let delta_scan = spectral_gap(&sequence_product_kernel(kernels, &order)?)?;
    (0..count)
        .into_par_iter()
        .map(|t| {
            let seq = sample_supersequence_with(&order, n, &mut stream_rng(seed, t as u64))?;
            Ok(spectral(
                format!("thm36 supersequence {t}"),
                supersequence_gap_bound(kernels, &seq, delta_scan)?,
            ))
        })
        .collect()
}

pub fn run_lemma27(kernels: &SiteKernelSet) -> Result<Vec<NamedResult>> {
    Ok(vec![spectral("lemma27 identity scan".into(), laplacian_comparison(kernels)?)])
}

pub fn run_thm35(kernels: &SiteKernelSet) -> Result<Vec<NamedResult>> {
    let n = kernels.sites();
    let mut out = Vec::new();
    if n <= MAX_EXHAUSTIVE_SITES {
        out.push(spectral("thm35 all orders".into(), converse_power_check(kernels)?));
    }
    let order: Vec<usize> = (0..n).collect();
    out.push(spectral(
        "thm35 identity order".into(),
        converse_single_power_check(kernels, &order, SINGLE_ORDER_CONSTANT)?,
    ));
    Ok(out)
}

pub fn run_thm25(kernels: &SiteKernelSet) -> Result<Vec<NamedResult>> {
    let order: Vec<usize> = (0..kernels.sites()).collect();
    let glauber = glauber_kernel(kernels)?;
    let scan = sequence_product_kernel(kernels, &order)?;
    let mut out = Vec::new();
    for (name, kernel) in [("glauber", &glauber), ("identity scan", &scan)] {
        for eps in MIXING_EPSILONS {
            out.push(NamedResult::new(
                format!("thm25 {name} eps={eps}"),
                ResultBody::Mixing(analyze_mixing(kernel, eps, None)?),
            ));
        }
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, kernels: &SiteKernelSet, seed: u64) -> Result<Vec<NamedResult>> {
    match suite {
        Suite::Cor32 => run_cor32(kernels, seed),
        Suite::Thm31 => run_thm31(kernels, RANDOM_SEQUENCES, seed),
        Suite::Thm36 => run_thm36(kernels, RANDOM_SEQUENCES, seed),
        Suite::Lemma27 => run_lemma27(kernels),
        Suite::Thm35 => run_thm35(kernels),
        Suite::Thm25 => run_thm25(kernels),
    }
}

/// The model grid used for the spectral acceptance checks.
pub fn test_models() -> Vec<ModelSpec> {
    let mut models = Vec::new();
    for n in 2..=6 {
        for fugacity in [0.5, 1.0, 2.0] {
            models.push(ModelSpec::Hardcore {
                graph: GraphSpec::complete(n).expect("valid graph"),
                fugacity,
            });
        }
    }
    for n in 3..=6 {
        for graph in [GraphSpec::path(n), GraphSpec::cycle(n)] {
            let graph = graph.expect("valid graph");
            for beta in [-1.0, 0.0, 0.5, 1.0] {
                for field in [0.0, 0.3] {
                    models.push(ModelSpec::Ising {
                        graph: graph.clone(),
                        beta,
                        field,
                    });
                }
            }
        }
    }
    models
}

/// Acceptance statistics of the certificate over random covering sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateStats {
    pub n: usize,
    pub trials: usize,
    pub accepted: usize,
    pub acceptance_rate: f64,
    pub acceptance_se: f64,
    /// `1 − 2/n`.
    pub acceptance_floor: f64,
    pub mean_sum_k: f64,
    pub sum_k_se: f64,
    pub expected_sum_k: f64,
    pub variance_sum_k: f64,
    /// `n³·(1 + 3/√trials)`.
    pub variance_limit: f64,
    pub acceptance_pass: bool,
    pub mean_pass: bool,
    pub variance_pass: bool,
    pub pass: bool,
}

pub fn certificate_experiment(n: usize, trials: usize, seed: u64) -> Result<CertificateStats> {
    if n < 2 {
        return domain(format!("need n >= 2, got {n}"));
    }
    if trials < 2 {
        return domain("need at least two trials");
    }
    let certs = (0..trials)
        .into_par_iter()
        .map(|t| Ok(certify_sequence(&sample_covering_sequence_with(n, &mut stream_rng(seed, t as u64))?)))
        .collect::<Result<Vec<_>>>()?;
    let k = trials as f64;
    let accepted = certs.iter().filter(|c| c.accepted).count();
    let rate = accepted as f64 / k;
    let acceptance_se = (rate * (1.0 - rate) / k).sqrt();
    let sums: Vec<f64> = certs.iter().map(|c| c.sum_k as f64).collect();
    let mean = sums.iter().sum::<f64>() / k;
    let variance = sums.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let sum_k_se = (variance / k).sqrt();
    let expected = coupon_moments(n).expected_sum_k;
    let acceptance_floor = 1.0 - 2.0 / n as f64;
    let variance_limit = (n as f64).powi(3) * (1.0 + 3.0 / k.sqrt());
    let acceptance_pass = rate >= acceptance_floor - 3.0 * acceptance_se;
    let mean_pass = (mean - expected).abs() <= 3.0 * sum_k_se;
    let variance_pass = variance <= variance_limit;
    Ok(CertificateStats {
        n,
        trials,
        accepted,
        acceptance_rate: rate,
        acceptance_se,
        acceptance_floor,
        mean_sum_k: mean,
        sum_k_se,
        expected_sum_k: expected,
        variance_sum_k: variance,
        variance_limit,
        acceptance_pass,
        mean_pass,
        variance_pass,
        pass: acceptance_pass && mean_pass && variance_pass,
    })
}

/// Norms of certificate-accepted random sequences against `1 − δ/(32n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedNormStats {
    pub label: String,
    pub trials: usize,
    pub accepted: usize,
    pub delta: f64,
    pub bound: f64,
    pub worst_norm: f64,
    pub pass: bool,
}

pub fn certified_norm_check(kernels: &SiteKernelSet, label: &str, trials: usize, seed: u64) -> Result<CertifiedNormStats> {
    let n = kernels.sites();
    let delta = glauber_gap(kernels)?;
    let bound = 1.0 - delta / (32.0 * n as f64);
    let norms = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seq: UpdateSequence = sample_covering_sequence_with(n, &mut stream_rng(seed, t as u64))?;
            if !certify_sequence(&seq).accepted {
                return Ok(None);
            }
            Ok(Some(pi_operator_norm(&sequence_product_kernel(kernels, seq.indices())?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let accepted: Vec<f64> = norms.into_iter().flatten().collect();
    let worst_norm = accepted.iter().copied().fold(0.0, f64::max);
    Ok(CertifiedNormStats {
        label: label.to_string(),
        trials,
        accepted: accepted.len(),
        delta,
        bound,
        worst_norm,
        pass: worst_norm <= bound + VERIFY_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_hardcore;
    use crate::statespace::DEFAULT_STATE_CAP;

    fn hardcore(n: usize) -> SiteKernelSet {
        SiteKernelSet::from_distribution(&build_hardcore(&GraphSpec::complete(n).unwrap(), 1.0).unwrap()).unwrap()
    }

    fn verdicts(results: &[NamedResult]) -> Vec<bool> {
        results.iter().map(|r| r.body.verdict().unwrap()).collect()
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("thm99".parse::<Suite>().is_err());
    }

    #[test]
    fn permutations_exhaustive_then_sampled() {
        assert_eq!(suite_permutations(4, 1).len(), 24);
        let sampled = suite_permutations(6, 1);
        assert_eq!(sampled.len(), 20);
        assert_eq!(sampled, suite_permutations(6, 1));
        for p in &sampled {
            let mut q = p.clone();
            q.sort_unstable();
            assert_eq!(q, (0..6).collect::<Vec<_>>());
        }
    }

    #[test]
    fn cor32_on_k4_has_24_passing_orders() {
        let r = run_cor32(&hardcore(4), 1).unwrap();
        assert_eq!(r.len(), 24);
        assert!(verdicts(&r).into_iter().all(|v| v));
    }

    #[test]
    fn every_suite_passes_on_k3() {
        let k = hardcore(3);
        for suite in Suite::ALL {
            let r = run_suite(suite, &k, 7).unwrap();
            assert!(!r.is_empty());
            assert!(verdicts(&r).into_iter().all(|v| v), "{suite}");
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let k = hardcore(3);
        assert_eq!(run_thm31(&k, 20, 3).unwrap(), run_thm31(&k, 20, 3).unwrap());
        assert_eq!(run_thm36(&k, 20, 3).unwrap(), run_thm36(&k, 20, 3).unwrap());
    }

    #[test]
    fn model_grid() {
        let models = test_models();
        assert_eq!(models.len(), 15 + 64);
        for m in models.iter().step_by(9) {
            assert!(m.build(DEFAULT_STATE_CAP).is_ok(), "{m}");
        }
    }

    #[test]
    fn certificate_statistics_small() {
        let s = certificate_experiment(10, 2000, 5).unwrap();
        assert_eq!(s.expected_sum_k, 100.0);
        assert!(s.pass, "{s:?}");
        let c = certified_norm_check(&hardcore(3), "K_3", 100, 5).unwrap();
        assert!(c.pass, "{c:?}");
    }
}
