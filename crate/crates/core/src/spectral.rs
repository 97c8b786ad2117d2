//! π-weighted operator norms, spectral gaps, Laplacian singular values and
//! the gap comparison bounds between Glauber dynamics and scans.
//!
//! Everything is computed in the conjugated basis `C = D^{1/2}·M·D^{-1/2}`
//! (`D = diag π`), where `L²(π)` becomes the Euclidean space and constants
//! become the unit vector `√π`. The trivial direction is removed by working
//! in an orthonormal basis of `√π^⊥` obtained from a Householder reflection.
//!
//! Logarithms are natural throughout.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::operators::{
    detailed_balance_residual, ensure_irreducible, glauber_kernel, sequence_product_kernel, MarkovKernel,
    SiteKernelSet,
};
use crate::schedules::{first_appearances, missing_sites, UpdateSequence};

/// Absolute slack on every verified inequality.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

/// Largest site count for which all `n!` scan orders are enumerated.
pub const MAX_EXHAUSTIVE_SITES: usize = 5;

#[derive(Debug, Clone)]
pub struct PiGeometry {
    sqrt_pi: DVector<f64>,
    inv_sqrt_pi: DVector<f64>,
    /// Orthonormal basis of the mean-zero subspace, one column per direction.
    basis: DMatrix<f64>,
}

impl PiGeometry {
    pub fn new(pi: &[f64]) -> Self {
        let m = pi.len();
        let sqrt_pi = DVector::from_iterator(m, pi.iter().map(|p| p.sqrt()));
        let inv_sqrt_pi = sqrt_pi.map(|s| 1.0 / s);
        // Householder reflection H with H·√π = −e_0; its other columns span √π^⊥.
        let mut v = sqrt_pi.clone();
        v[0] += 1.0;
        let h = DMatrix::identity(m, m) - (&v * v.transpose()) * (2.0 / v.norm_squared());
        let basis = h.columns(1, m - 1).into_owned();
        Self {
            sqrt_pi,
            inv_sqrt_pi,
            basis,
        }
    }

    pub fn sqrt_pi(&self) -> &DVector<f64> {
        &self.sqrt_pi
    }

    pub fn conjugated(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            self.sqrt_pi[i] * m[(i, j)] * self.inv_sqrt_pi[j]
        })
    }

    /// `I − √π·√πᵀ`.
    pub fn mean_zero_projector(&self) -> DMatrix<f64> {
        let m = self.sqrt_pi.len();
        DMatrix::identity(m, m) - &self.sqrt_pi * self.sqrt_pi.transpose()
    }

    /// The conjugated kernel expressed in the mean-zero basis.
    pub fn restricted(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        self.basis.transpose() * self.conjugated(m) * &self.basis
    }

    /// `max_{E_π f = 0} ‖Mf‖_π / ‖f‖_π` without reducibility checks.
    pub fn operator_norm(&self, m: &DMatrix<f64>) -> f64 {
        if self.basis.ncols() == 0 {
            return 0.0;
        }
        self.restricted(m).singular_values().max()
    }

    /// `min_{E_π f = 0} ‖(I − M)f‖_π / ‖f‖_π` without reducibility checks.
    /// On a one-state support the mean-zero space is trivial and 1 is returned.
    pub fn laplacian_sigma2(&self, m: &DMatrix<f64>) -> f64 {
        let d = self.basis.ncols();
        if d == 0 {
            return 1.0;
        }
        (DMatrix::identity(d, d) - self.restricted(m)).singular_values().min()
    }
}

pub fn pi_operator_norm(kernel: &MarkovKernel) -> Result<f64> {
    ensure_irreducible(kernel)?;
    Ok(PiGeometry::new(kernel.pi()).operator_norm(kernel.matrix()))
}

/// `γ̃ = σ₂(I − P)` in `L²(π)`.
pub fn laplacian_sigma2(kernel: &MarkovKernel) -> Result<f64> {
    ensure_irreducible(kernel)?;
    Ok(PiGeometry::new(kernel.pi()).laplacian_sigma2(kernel.matrix()))
}

pub fn spectral_gap(kernel: &MarkovKernel) -> Result<f64> {
    Ok(1.0 - pi_operator_norm(kernel)?)
}

/// Eigenvalues on the mean-zero subspace of a π-reversible kernel, descending.
pub fn reversible_spectrum(kernel: &MarkovKernel) -> Result<Vec<f64>> {
    let residual = detailed_balance_residual(kernel);
    if residual > crate::operators::PROJECTION_TOLERANCE {
        return domain(format!(
            "kernel '{}' is not reversible (residual {residual:.3e})",
            kernel.label()
        ));
    }
    let r = PiGeometry::new(kernel.pi()).restricted(kernel.matrix());
    let sym = (&r + r.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compared {
    /// `attained` is the π-operator norm.
    Norm,
    /// `attained` is the squared π-operator norm.
    NormSquared,
    /// `attained` is the Glauber norm raised to the power in `details["L"]`.
    GlauberNormPower,
    /// `attained` is `γ̃`, bounded above by `√(2nγ)` and below by `γ`.
    LaplacianSandwich,
}

/// Both sides of a verified inequality plus the spectral data behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub label: String,
    pub operator_norm: f64,
    pub gap: f64,
    pub laplacian_sigma2: Option<f64>,
    pub compared: Compared,
    pub attained: f64,
    pub bound_value: f64,
    /// `bound_value − attained`.
    pub residual: f64,
    pub pass: bool,
    pub details: BTreeMap<String, f64>,
}

impl SpectralReport {
    fn new(label: String, operator_norm: f64, compared: Compared, attained: f64, bound_value: f64) -> Self {
        Self {
            label,
            operator_norm,
            gap: 1.0 - operator_norm,
            laplacian_sigma2: None,
            compared,
            attained,
            bound_value,
            residual: bound_value - attained,
            pass: attained <= bound_value + VERIFY_TOLERANCE,
            details: BTreeMap::new(),
        }
    }

    fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }
}

/// Spectral gap of the Glauber kernel of `kernels`.
pub fn glauber_gap(kernels: &SiteKernelSet) -> Result<f64> {
    spectral_gap(&glauber_kernel(kernels)?)
}

/// `1 − δ/(8(n+1))`.
pub fn scan_norm_bound(delta: f64, n: usize) -> f64 {
    1.0 - delta / (8.0 * (n as f64 + 1.0))
}

/// `1 − nδ/(8 Σ_j k_j)`, a bound on the squared norm.
pub fn sequence_norm_sq_bound(delta: f64, n: usize, sum_k: usize) -> f64 {
    1.0 - n as f64 * delta / (8.0 * sum_k as f64)
}

/// `1 − δ_scan²/(8(L − n + 1))`.
pub fn supersequence_norm_bound(delta_scan: f64, len: usize, n: usize) -> f64 {
    1.0 - delta_scan * delta_scan / (8.0 * (len + 1 - n) as f64)
}

fn require_gap(delta: f64, what: &str) -> Result<()> {
    if !(delta > 0.0) {
        return domain(format!("{what} must be positive, got {delta}"));
    }
    Ok(())
}

fn require_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
        return domain(format!("{order:?} is not a permutation of 0..{n}"));
    }
    Ok(())
}

/// Checks `‖P_σ‖_π ≤ 1 − δ/(8(n+1))` with `δ` the Glauber gap.
pub fn verify_scan_gap_bound(kernels: &SiteKernelSet, order: &[usize]) -> Result<SpectralReport> {
    let delta = glauber_gap(kernels)?;
    scan_gap_report(kernels, order, delta)
}

/// As [`verify_scan_gap_bound`] with a precomputed Glauber gap.
pub fn scan_gap_report(kernels: &SiteKernelSet, order: &[usize], delta: f64) -> Result<SpectralReport> {
    let n = kernels.sites();
    require_permutation(order, n)?;
    require_gap(delta, "Glauber gap")?;
    let scan = sequence_product_kernel(kernels, order)?;
    let norm = pi_operator_norm(&scan)?;
    Ok(SpectralReport::new(
        scan.label().to_string(),
        norm,
        Compared::Norm,
        norm,
        scan_norm_bound(delta, n),
    )
    .detail("delta", delta)
    .detail("n", n as f64))
}

/// Checks the squared-norm bound `1 − nδ/(8Σ k_j)` for a covering sequence.
///
/// The sequence is cut at its cover time (trailing factors can only lower the
/// norm) and sites are implicitly relabeled by order of first appearance.
pub fn sequence_gap_bound(kernels: &SiteKernelSet, seq: &UpdateSequence, delta: f64) -> Result<SpectralReport> {
    let n = kernels.sites();
    if seq.sites() != n {
        return domain(format!("sequence is over {} sites, model has {n}", seq.sites()));
    }
    require_gap(delta, "Glauber gap")?;
    let stats = first_appearances(seq);
    if !stats.covered {
        return Err(Error::IncompleteCover { missing: missing_sites(seq) });
    }
    let prefix = &seq.indices()[..stats.cover_time];
    let product = sequence_product_kernel(kernels, prefix)?;
    let norm = pi_operator_norm(&product)?;
    let mut report = SpectralReport::new(
        product.label().to_string(),
        norm,
        Compared::NormSquared,
        norm * norm,
        sequence_norm_sq_bound(delta, n, stats.sum_k),
    )
    .detail("delta", delta)
    .detail("sum_k", stats.sum_k as f64)
    .detail("cover_time", stats.cover_time as f64)
    .detail("length", seq.len() as f64);
    if seq.len() > prefix.len() {
        let full = pi_operator_norm(&sequence_product_kernel(kernels, seq.indices())?)?;
        report = report.detail("full_sequence_norm", full);
    }
    Ok(report)
}

/// Gap of the scan that visits sites in the first-appearance order of `seq`.
pub fn embedded_scan_gap(kernels: &SiteKernelSet, seq: &UpdateSequence) -> Result<f64> {
    let stats = first_appearances(seq);
    if !stats.covered {
        return Err(Error::IncompleteCover { missing: missing_sites(seq) });
    }
    spectral_gap(&sequence_product_kernel(kernels, &stats.order)?)
}

/// Checks `‖P_seq‖_π ≤ 1 − δ_scan²/(8(L − n + 1))`, with `L` the cover time
/// and `δ_scan` the gap of the scan in first-appearance order.
pub fn supersequence_gap_bound(kernels: &SiteKernelSet, seq: &UpdateSequence, delta_scan: f64) -> Result<SpectralReport> {
    let n = kernels.sites();
    if seq.sites() != n {
        return domain(format!("sequence is over {} sites, model has {n}", seq.sites()));
    }
    require_gap(delta_scan, "scan gap")?;
    let stats = first_appearances(seq);
    if !stats.covered {
        return Err(Error::IncompleteCover { missing: missing_sites(seq) });
    }
    let prefix = &seq.indices()[..stats.cover_time];
    let product = sequence_product_kernel(kernels, prefix)?;
    let norm = pi_operator_norm(&product)?;
    Ok(SpectralReport::new(
        product.label().to_string(),
        norm,
        Compared::Norm,
        norm,
        supersequence_norm_bound(delta_scan, stats.cover_time, n),
    )
    .detail("delta_scan", delta_scan)
    .detail("L", stats.cover_time as f64))
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..n).permutations(n).collect()
}

/// Power-mechanism check of the converse bound assuming every scan has a gap.
///
/// With `δ` the smallest scan gap over all `n!` orders and
/// `L = ⌈5n·ln(200n/δ)⌉`, verifies `‖G‖^L ≤ 1 − δ²/(100n·ln(200n/δ))`.
pub fn converse_power_check(kernels: &SiteKernelSet) -> Result<SpectralReport> {
    let n = kernels.sites();
    if n > MAX_EXHAUSTIVE_SITES {
        return Err(Error::Unsupported(format!(
            "minimum over all scan orders needs n ≤ {MAX_EXHAUSTIVE_SITES}, got n={n}"
        )));
    }
    let mut delta = f64::INFINITY;
    for order in all_permutations(n) {
        delta = delta.min(spectral_gap(&sequence_product_kernel(kernels, &order)?)?);
    }
    if !(delta > 1e-12) {
        return domain(format!("some scan order is gapless (min gap {delta})"));
    }
    let nf = n as f64;
    let log_term = (200.0 * nf / delta).ln();
    let power = (5.0 * nf * log_term).ceil();
    let bound = 1.0 - delta * delta / (100.0 * nf * log_term);
    power_report(kernels, "converse (all orders)", power, bound, delta, log_term)
}

/// Power-mechanism check assuming only the scan `order` has a gap.
///
/// With `L = ⌈C n² ln(100Cn/δ)⌉` verifies
/// `‖G‖^L ≤ 1 − δ²/(8Cn² ln(100Cn/δ)) + δ^100/(100C n^100)`.
pub fn converse_single_power_check(kernels: &SiteKernelSet, order: &[usize], c: f64) -> Result<SpectralReport> {
    let n = kernels.sites();
    require_permutation(order, n)?;
    if !(c > 0.0) {
        return domain("constant C must be positive");
    }
    let delta = spectral_gap(&sequence_product_kernel(kernels, order)?)?;
    if !(delta > 1e-12) {
        return domain(format!("scan {order:?} is gapless"));
    }
    let nf = n as f64;
    let log_term = (100.0 * c * nf / delta).ln();
    let power = (c * nf * nf * log_term).ceil();
    let miss = (delta / nf).powi(100) / (100.0 * c);
    let bound = 1.0 - delta * delta / (8.0 * c * nf * nf * log_term) + miss;
    Ok(power_report(kernels, &format!("converse (order {order:?})"), power, bound, delta, log_term)?.detail("C", c))
}

fn power_report(
    kernels: &SiteKernelSet,
    label: &str,
    power: f64,
    bound: f64,
    delta: f64,
    log_term: f64,
) -> Result<SpectralReport> {
    let glauber = glauber_kernel(kernels)?;
    let norm = pi_operator_norm(&glauber)?;
    let attained = norm.powf(power);
    // a positive bound below 1 turns into a lower bound on the Glauber gap after the L-th root
    let derived_gap = if bound > 0.0 && bound < 1.0 {
        -(bound.ln() / power).exp_m1()
    } else {
        0.0
    };
    Ok(SpectralReport::new(label.to_string(), norm, Compared::GlauberNormPower, attained, bound)
        .detail("delta", delta)
        .detail("L", power)
        .detail("log_term", log_term)
        .detail("glauber_gap", 1.0 - norm)
        .detail("derived_glauber_gap_lower_bound", derived_gap))
}

/// Checks `γ ≤ γ̃ ≤ √(2nγ)` for the identity-order scan.
pub fn laplacian_comparison(kernels: &SiteKernelSet) -> Result<SpectralReport> {
    let n = kernels.sites();
    let order: Vec<usize> = (0..n).collect();
    let scan = sequence_product_kernel(kernels, &order)?;
    ensure_irreducible(&scan)?;
    let geometry = PiGeometry::new(scan.pi());
    Ok(laplacian_sandwich(
        scan.label().to_string(),
        n,
        geometry.operator_norm(scan.matrix()),
        geometry.laplacian_sigma2(scan.matrix()),
    ))
}

/// Evaluates `γ ≤ γ̃ ≤ √(2nγ)` for given norm and `γ̃`.
pub fn laplacian_sandwich(label: String, n: usize, operator_norm: f64, sigma2: f64) -> SpectralReport {
    let gap = 1.0 - operator_norm;
    let upper = (2.0 * n as f64 * gap.max(0.0)).sqrt();
    let mut report = SpectralReport::new(label, operator_norm, Compared::LaplacianSandwich, sigma2, upper)
        .detail("gap", gap)
        .detail("lower_residual", sigma2 - gap);
    report.laplacian_sigma2 = Some(sigma2);
    report.pass = report.pass && gap <= sigma2 + VERIFY_TOLERANCE;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_hardcore, GraphSpec};
    use crate::operators::MarkovKernel;
    use crate::statespace::{Distribution, ProductSpace};

    fn hardcore(n: usize) -> SiteKernelSet {
        SiteKernelSet::from_distribution(&build_hardcore(&GraphSpec::complete(n).unwrap(), 1.0).unwrap()).unwrap()
    }

    fn uniform_bits(n: usize) -> SiteKernelSet {
        SiteKernelSet::from_distribution(&Distribution::uniform(ProductSpace::binary(n).unwrap())).unwrap()
    }

    #[test]
    fn geometry_invariants() {
        let k = hardcore(3);
        let g = PiGeometry::new(k.pi());
        assert!((g.sqrt_pi().norm() - 1.0).abs() < 1e-12);
        let scan = sequence_product_kernel(&k, &[2, 0, 1]).unwrap();
        let c = g.conjugated(scan.matrix());
        assert!((&c * g.sqrt_pi() - g.sqrt_pi()).amax() < 1e-10);
        assert!((c.transpose() * g.sqrt_pi() - g.sqrt_pi()).amax() < 1e-10);
        let q = g.mean_zero_projector();
        assert!((&q * &q - &q).amax() < 1e-14);
        // the restricted route agrees with the projector route Q·C·Q
        let via_projector = (&q * &c * &q).singular_values().max();
        assert!((via_projector - g.operator_norm(scan.matrix())).abs() < 1e-12);
    }

    #[test]
    fn hardcore_k2_hand_values() {
        let k = hardcore(2);
        let g = glauber_kernel(&k).unwrap();
        assert!((pi_operator_norm(&g).unwrap() - 0.75).abs() < 1e-12);
        assert!((laplacian_sigma2(&g).unwrap() - 0.25).abs() < 1e-12);
        let scan = sequence_product_kernel(&k, &[0, 1]).unwrap();
        assert!((pi_operator_norm(&scan).unwrap() - 0.5).abs() < 1e-12);
        let expect = ((7.0 - 13f64.sqrt()) / 8.0).sqrt();
        assert!((laplacian_sigma2(&scan).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 0.651388).abs() < 1e-6);
    }

    #[test]
    fn identity_kernel_geometry() {
        let pi = vec![0.2, 0.3, 0.5];
        let id = MarkovKernel::identity(pi.clone(), "identity");
        let g = PiGeometry::new(&pi);
        assert!((g.operator_norm(id.matrix()) - 1.0).abs() < 1e-12);
        assert!(g.laplacian_sigma2(id.matrix()).abs() < 1e-12);
        let r = laplacian_sandwich("identity".into(), 3, 1.0, 0.0);
        assert!(r.pass);
        // the checked entry points refuse the reducible identity chain
        assert!(matches!(pi_operator_norm(&id), Err(Error::Reducible(_))));
        assert!(matches!(laplacian_sigma2(&id), Err(Error::Reducible(_))));
    }

    #[test]
    fn single_state_support() {
        let g = PiGeometry::new(&[1.0]);
        let m = DMatrix::identity(1, 1);
        assert_eq!(g.operator_norm(&m), 0.0);
        assert_eq!(g.laplacian_sigma2(&m), 1.0);
    }

    #[test]
    fn scan_bound_examples() {
        let r = verify_scan_gap_bound(&hardcore(2), &[0, 1]).unwrap();
        assert!(r.pass);
        assert!((r.bound_value - (1.0 - 0.25 / 24.0)).abs() < 1e-12);
        assert!((r.attained - 0.5).abs() < 1e-12);
        assert!((r.details["delta"] - 0.25).abs() < 1e-12);

        for order in all_permutations(3) {
            let r = verify_scan_gap_bound(&uniform_bits(3), &order).unwrap();
            assert!(r.attained.abs() < 1e-12 && r.pass);
        }
        assert_eq!(scan_norm_bound(0.25, 3), 0.9921875);
        assert!(verify_scan_gap_bound(&hardcore(2), &[0, 0]).is_err());
    }

    #[test]
    fn scan_bound_rejects_gapless_glauber() {
        let space = ProductSpace::binary(2).unwrap();
        let pi = crate::statespace::normalize_weights(&space, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let k = SiteKernelSet::from_distribution(&pi).unwrap();
        assert!(verify_scan_gap_bound(&k, &[0, 1]).is_err());
        assert!(scan_gap_report(&hardcore(2), &[0, 1], 0.0).is_err());
    }

    #[test]
    fn sequence_bound_examples() {
        assert!((sequence_norm_sq_bound(0.25, 3, 6) - 0.984375).abs() < 1e-15);
        for n in 1..10 {
            let sum_k = n * (n + 1) / 2;
            let expect = 1.0 - 0.3 / (4.0 * (n as f64 + 1.0));
            assert!((sequence_norm_sq_bound(0.3, n, sum_k) - expect).abs() < 1e-15);
        }
        let k = hardcore(2);
        let seq = UpdateSequence::new(vec![0, 0, 1], 2).unwrap();
        let r = sequence_gap_bound(&k, &seq, 0.25).unwrap();
        assert!((r.bound_value - 0.984375).abs() < 1e-15);
        assert!((r.attained - 0.25).abs() < 1e-12);
        assert!(r.pass);

        let incomplete = UpdateSequence::new(vec![0, 0], 2).unwrap();
        assert!(matches!(
            sequence_gap_bound(&k, &incomplete, 0.25),
            Err(Error::IncompleteCover { missing }) if missing == vec![1]
        ));
    }

    #[test]
    fn sequence_bound_truncates_at_cover() {
        let k = hardcore(3);
        let seq = UpdateSequence::new(vec![1, 0, 2, 1, 0, 0], 3).unwrap();
        let r = sequence_gap_bound(&k, &seq, glauber_gap(&k).unwrap()).unwrap();
        assert_eq!(r.details["cover_time"], 3.0);
        assert!(r.details["full_sequence_norm"] <= r.operator_norm + 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn supersequence_bound_examples() {
        assert!((supersequence_norm_bound(0.3, 4, 4) - (1.0 - 0.09 / 8.0)).abs() < 1e-15);
        assert!((supersequence_norm_bound(0.2, 4, 3) - 0.9975).abs() < 1e-15);
        let k = hardcore(2);
        let seq = UpdateSequence::new(vec![0, 1], 2).unwrap();
        let r = supersequence_gap_bound(&k, &seq, 0.5).unwrap();
        assert!((r.bound_value - 0.96875).abs() < 1e-15);
        assert!((r.attained - 0.5).abs() < 1e-12);
        assert!(r.pass);
        assert!((embedded_scan_gap(&k, &seq).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn converse_examples() {
        let r = converse_power_check(&hardcore(2)).unwrap();
        assert_eq!(r.details["L"], 67.0);
        assert!((r.details["delta"] - 0.5).abs() < 1e-12);
        assert!((r.attained - 0.75f64.powi(67)).abs() < 1e-20);
        assert!((r.bound_value - (1.0 - 0.25 / (200.0 * 800f64.ln()))).abs() < 1e-15);
        assert!(r.pass);
        assert!(r.details["derived_glauber_gap_lower_bound"] > 0.0);
        assert!(r.details["derived_glauber_gap_lower_bound"] <= 0.25);

        let r = converse_power_check(&uniform_bits(2)).unwrap();
        assert!((r.details["delta"] - 1.0).abs() < 1e-12);
        assert!((r.operator_norm - 0.5).abs() < 1e-12);
        assert!(r.pass);

        assert!(matches!(converse_power_check(&hardcore(6)), Err(Error::Unsupported(_))));

        let r = converse_single_power_check(&hardcore(3), &[0, 1, 2], 10.0).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn converse_rejects_gapless_scans() {
        let space = ProductSpace::binary(2).unwrap();
        let pi = crate::statespace::normalize_weights(&space, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let k = SiteKernelSet::from_distribution(&pi).unwrap();
        assert!(converse_power_check(&k).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let r = laplacian_comparison(&hardcore(2)).unwrap();
        assert!((r.gap - 0.5).abs() < 1e-12);
        assert!((r.attained - 0.651388).abs() < 1e-5);
        assert!((r.bound_value - 2f64.sqrt()).abs() < 1e-12);
        assert!(r.pass);

        let r = laplacian_comparison(&uniform_bits(3)).unwrap();
        assert!((r.gap - 1.0).abs() < 1e-12);
        assert!((r.attained - 1.0).abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn glauber_spectrum_cross_check() {
        let k = hardcore(2);
        let g = glauber_kernel(&k).unwrap();
        let ev = reversible_spectrum(&g).unwrap();
        assert!((ev[0] - 0.75).abs() < 1e-12 && (ev[1] - 0.25).abs() < 1e-12);
        let scan = sequence_product_kernel(&k, &[0, 1]).unwrap();
        assert!(reversible_spectrum(&scan).is_err());
    }
}
