//! Update sequences, first-appearance statistics and the linear-time
//! certificate for random covering sequences.
//!
//! Positions are 1-based: the first update of a sequence sits at position 1,
//! so every covering sequence has `k_1 = 1`.

use rand::Rng;
use rand_distr::{Distribution as _, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::stream_rng;

/// Chronological list of site indices `i_1, …, i_L` over `n` sites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateSequence {
    indices: Vec<usize>,
    n: usize,
}

impl UpdateSequence {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if n == 0 {
            return domain("update sequence over zero sites");
        }
        if indices.is_empty() {
            return domain("update sequence must be non-empty");
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return domain(format!("site {bad} out of range for {n} sites"));
        }
        Ok(Self { indices, n })
    }

    /// The scan `0, 1, …, n−1`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).collect(), n)
    }

    /// Parses whitespace-separated site indices.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let indices = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::Domain(format!("'{tok}' is not a site index")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices, n)
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        parts.join(" ")
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_permutation(&self) -> bool {
        self.len() == self.n && first_appearances(self).covered
    }

    /// The prefix ending at the cover time, if the sequence covers all sites.
    pub fn covering_prefix(&self) -> Option<&[usize]> {
        let stats = first_appearances(self);
        stats.covered.then(|| &self.indices[..stats.cover_time])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstAppearanceStats {
    /// 1-based first-appearance positions in order of appearance.
    pub k: Vec<usize>,
    /// Sites in order of first appearance.
    pub order: Vec<usize>,
    pub covered: bool,
    /// Position at which the last new site appeared.
    pub cover_time: usize,
    pub sum_k: usize,
}

pub fn first_appearances(seq: &UpdateSequence) -> FirstAppearanceStats {
    let mut seen = vec![false; seq.sites()];
    let mut k = Vec::new();
    let mut order = Vec::new();
    for (pos, &i) in seq.indices().iter().enumerate() {
        if !seen[i] {
            seen[i] = true;
            k.push(pos + 1);
            order.push(i);
        }
    }
    FirstAppearanceStats {
        covered: k.len() == seq.sites(),
        cover_time: k.last().copied().unwrap_or(0),
        sum_k: k.iter().sum(),
        k,
        order,
    }
}

/// Sites that never occur in `seq`.
pub fn missing_sites(seq: &UpdateSequence) -> Vec<usize> {
    let mut seen = vec![false; seq.sites()];
    for &i in seq.indices() {
        seen[i] = true;
    }
    (0..seq.sites()).filter(|&i| !seen[i]).collect()
}

/// Verdict of the certificate event: cover time at most `2n ln n` and
/// `Σ k_j ≤ 2n²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub accepted: bool,
    pub covered: bool,
    pub cover_time: usize,
    pub sum_k: usize,
    pub cover_threshold: f64,
    pub sum_threshold: f64,
    /// `1 − δ/(32n)` for the supplied Glauber gap, when accepted.
    pub norm_bound: Option<f64>,
    pub delta: Option<f64>,
}

impl Certificate {
    /// Norm bound on the sequence product implied by acceptance.
    pub fn implied_norm_bound(&self, delta: f64) -> Option<f64> {
        self.accepted.then(|| 1.0 - delta / (32.0 * self.n as f64))
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self.norm_bound = self.implied_norm_bound(delta);
        self
    }
}

pub fn certify_sequence(seq: &UpdateSequence) -> Certificate {
    let n = seq.sites();
    let stats = first_appearances(seq);
    let nf = n as f64;
    let cover_threshold = 2.0 * nf * nf.ln();
    let sum_threshold = 2.0 * nf * nf;
    let accepted = stats.covered
        && stats.cover_time as f64 <= cover_threshold
        && stats.sum_k as f64 <= sum_threshold;
    Certificate {
        n,
        accepted,
        covered: stats.covered,
        cover_time: stats.cover_time,
        sum_k: stats.sum_k,
        cover_threshold,
        sum_threshold,
        norm_bound: None,
        delta: None,
    }
}

fn cover_cap(n: usize) -> usize {
    (100.0 * n as f64 * (n as f64 + 1.0).ln()).ceil() as usize
}

/// i.i.d. uniform sites, stopped at the cover time.
pub fn sample_covering_sequence_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UpdateSequence> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let cap = cover_cap(n);
    let mut seen = vec![false; n];
    let mut remaining = n;
    let mut indices = Vec::new();
    while remaining > 0 {
        if indices.len() >= cap {
            return Err(Error::Simulation(format!(
                "cover time exceeded the cap of {cap} draws for n={n}"
            )));
        }
        let i = rng.random_range(0..n);
        if !seen[i] {
            seen[i] = true;
            remaining -= 1;
        }
        indices.push(i);
    }
    UpdateSequence::new(indices, n)
}

/// Covering sequence drawn from stream 0 of `seed`.
pub fn sample_covering_sequence(n: usize, seed: u64) -> Result<UpdateSequence> {
    sample_covering_sequence_with(n, &mut stream_rng(seed, 0))
}

/// Random sequence whose first appearances follow `order` and which ends at
/// the first appearance of its last site. Between consecutive new sites it
/// inserts a Geom(1/2)-distributed number (mean 1) of repeats of sites
/// already seen.
pub fn sample_supersequence_with<R: Rng + ?Sized>(order: &[usize], n: usize, rng: &mut R) -> Result<UpdateSequence> {
    let geom = Geometric::new(0.5).expect("valid probability");
    let mut indices = Vec::new();
    for (j, &site) in order.iter().enumerate() {
        indices.push(site);
        if j + 1 < order.len() {
            let extra = geom.sample(rng) as usize;
            for _ in 0..extra {
                indices.push(order[rng.random_range(0..=j)]);
            }
        }
    }
    let seq = UpdateSequence::new(indices, n)?;
    if first_appearances(&seq).order != order {
        return domain("order must list distinct sites");
    }
    Ok(seq)
}

/// Moments of `Σ_j k_j` and the cover time for uniform random sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouponMoments {
    pub n: usize,
    pub expected_sum_k: f64,
    /// Exact variance `n² Σ_ℓ (1 − p_ℓ)`, never above `n³`.
    pub variance_sum_k: f64,
    pub variance_bound: f64,
    /// `n·H_n`.
    pub expected_cover: f64,
}

pub fn coupon_moments(n: usize) -> CouponMoments {
    let nf = n as f64;
    // increments k_ℓ − k_{ℓ−1} ~ Geom(p_ℓ), p_ℓ = (n−ℓ+1)/n, weighted by (n−ℓ+1)
    let mut expected = 0.0;
    let mut variance = 0.0;
    let mut cover = 0.0;
    for l in 1..=n {
        let weight = (n - l + 1) as f64;
        let p = weight / nf;
        expected += weight / p;
        variance += weight * weight * (1.0 - p) / (p * p);
        cover += 1.0 / p;
    }
    CouponMoments {
        n,
        expected_sum_k: expected,
        variance_sum_k: variance,
        variance_bound: nf.powi(3),
        expected_cover: cover,
    }
}
