//! Families of symmetric matrices in plain Euclidean space.
//!
//! Unlike the Markov modules there is no stationary direction here: every
//! norm in this module is the full-space spectral norm, including the
//! average `‖(1/n) Σ A_i‖` that defines `δ`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::rng::stream_rng;
use crate::schedules::first_appearances;
use crate::schedules::UpdateSequence;
use crate::spectral::{scan_norm_bound, sequence_norm_sq_bound, supersequence_norm_bound, VERIFY_TOLERANCE};

pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
pub const IDEMPOTENCE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    OrthogonalProjection,
    PsdGeneral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionFamily {
    dimension: usize,
    matrices: Vec<DMatrix<f64>>,
    kind: FamilyKind,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

/// `‖A² − A‖_max`.
pub fn idempotence_residual(a: &DMatrix<f64>) -> f64 {
    max_abs(&(a * a - a))
}

pub fn symmetry_residual(a: &DMatrix<f64>) -> f64 {
    max_abs(&(a - a.transpose()))
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().max()
}

impl ProjectionFamily {
    /// Kind is decided by the measured idempotence residual.
    pub fn new(matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        let kind = if matrices.iter().all(|a| idempotence_residual(a) <= IDEMPOTENCE_TOLERANCE) {
            FamilyKind::OrthogonalProjection
        } else {
            FamilyKind::PsdGeneral
        };
        Self::with_kind(matrices, kind)
    }

    fn with_kind(matrices: Vec<DMatrix<f64>>, kind: FamilyKind) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return domain("projection family must be non-empty");
        };
        let dimension = first.nrows();
        for (i, a) in matrices.iter().enumerate() {
            if a.nrows() != dimension || a.ncols() != dimension {
                return domain(format!("member {i} is not {dimension}x{dimension}"));
            }
            if symmetry_residual(a) > SYMMETRY_TOLERANCE {
                return domain(format!("member {i} is not symmetric"));
            }
            if kind == FamilyKind::OrthogonalProjection && idempotence_residual(a) > IDEMPOTENCE_TOLERANCE {
                return domain(format!("member {i} is not idempotent"));
            }
        }
        Ok(Self { dimension, matrices, kind })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }
}

/// `A_k = a_k a_kᵀ` with `a_k = √(2(1−δ))·(cos(kπ/n), sin(kπ/n))`, `k = 1..n`.
pub fn recht_re_family(n: usize, delta: f64) -> Result<ProjectionFamily> {
    if n < 2 {
        return domain(format!("need n >= 2, got {n}"));
    }
    if !(0.0..=1.0).contains(&delta) {
        return domain(format!("delta must lie in [0, 1], got {delta}"));
    }
    let scale = 2.0 * (1.0 - delta);
    let omega = PI / n as f64;
    let matrices = (1..=n)
        .map(|k| {
            let (s, c) = (k as f64 * omega).sin_cos();
            let m = DMatrix::from_row_slice(2, 2, &[c * c, c * s, c * s, s * s]) * scale;
            // exact symmetry regardless of rounding in the product above
            (&m + m.transpose()) * 0.5
        })
        .collect();
    let kind = if delta == 0.5 {
        FamilyKind::OrthogonalProjection
    } else {
        FamilyKind::PsdGeneral
    };
    ProjectionFamily::with_kind(matrices, kind)
}

/// `(2(1−δ))ⁿ · cos(π/n)^{n−1}`.
pub fn closed_form_product_norm(n: usize, delta: f64) -> f64 {
    (2.0 * (1.0 - delta)).powi(n as i32) * (PI / n as f64).cos().powi(n as i32 - 1)
}

fn check_indices(family: &ProjectionFamily, seq: &[usize]) -> Result<()> {
    if let Some(&bad) = seq.iter().find(|&&i| i >= family.len()) {
        return domain(format!("index {bad} out of range for a family of {}", family.len()));
    }
    Ok(())
}

/// Product `A_{i_1}·…·A_{i_L}` in sequence order; empty gives the identity.
pub fn family_product(family: &ProjectionFamily, seq: &[usize]) -> Result<DMatrix<f64>> {
    check_indices(family, seq)?;
    let d = family.dimension();
    let mut acc = DMatrix::identity(d, d);
    let mut scratch = DMatrix::zeros(d, d);
    for &i in seq {
        acc.mul_to(&family.matrices[i], &mut scratch);
        std::mem::swap(&mut acc, &mut scratch);
    }
    Ok(acc)
}

pub fn family_product_norm(family: &ProjectionFamily, seq: &[usize]) -> Result<f64> {
    Ok(spectral_norm(&family_product(family, seq)?))
}

/// Full-space norm of the arithmetic mean.
pub fn family_average_norm(family: &ProjectionFamily) -> f64 {
    let d = family.dimension();
    let sum = family.matrices().iter().fold(DMatrix::zeros(d, d), |acc, a| acc + a);
    spectral_norm(&(sum / family.len() as f64))
}

/// Member `i` projects onto the span of `ranks[i]` Gaussian vectors.
pub fn random_projection_family(d: usize, n: usize, ranks: &[usize], seed: u64) -> Result<ProjectionFamily> {
    if d == 0 || n == 0 {
        return domain("dimension and family size must be positive");
    }
    if ranks.len() != n {
        return domain(format!("expected {n} ranks, got {}", ranks.len()));
    }
    if let Some(&bad) = ranks.iter().find(|&&r| r < 1 || r > d) {
        return domain(format!("rank {bad} outside 1..={d}"));
    }
    let mut rng = stream_rng(seed, 0);
    let matrices = ranks
        .iter()
        .map(|&r| {
            let g = DMatrix::<f64>::from_fn(d, r, |_, _| StandardNormal.sample(&mut rng));
            let q = g.qr().q();
            let p = &q * q.transpose();
            (&p + p.transpose()) * 0.5
        })
        .collect();
    ProjectionFamily::with_kind(matrices, FamilyKind::OrthogonalProjection)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractCheck {
    pub delta: f64,
    pub attained: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Squared-norm check `‖A_{i_1}…A_{i_L}‖² ≤ 1 − nδ/(8Σk)` with `δ` taken
/// from the full-space average.
pub fn abstract_sequence_check(family: &ProjectionFamily, seq: &UpdateSequence) -> Result<AbstractCheck> {
    if family.kind() != FamilyKind::OrthogonalProjection {
        return domain("sequence bound needs orthogonal projections");
    }
    if seq.sites() != family.len() {
        return domain(format!("sequence is over {} sites, family has {}", seq.sites(), family.len()));
    }
    let stats = first_appearances(seq);
    if !stats.covered {
        return domain("sequence does not cover the family");
    }
    let delta = 1.0 - family_average_norm(family);
    if !(delta > 0.0) {
        return domain("family average has no gap");
    }
    let norm = family_product_norm(family, &seq.indices()[..stats.cover_time])?;
    let bound = sequence_norm_sq_bound(delta, family.len(), stats.sum_k);
    Ok(AbstractCheck {
        delta,
        attained: norm * norm,
        bound,
        pass: norm * norm <= bound + VERIFY_TOLERANCE,
    })
}

/// `‖A_seq‖ ≤ 1 − δ'²/(8(L−n+1))` with `δ'` the measured gap of the product
/// in first-appearance order.
pub fn abstract_supersequence_check(family: &ProjectionFamily, seq: &UpdateSequence) -> Result<AbstractCheck> {
    if family.kind() != FamilyKind::OrthogonalProjection {
        return domain("sequence bound needs orthogonal projections");
    }
    let stats = first_appearances(seq);
    if !stats.covered || seq.sites() != family.len() {
        return domain("sequence does not cover the family");
    }
    let delta = 1.0 - family_product_norm(family, &stats.order)?;
    if !(delta > 0.0) {
        return domain("embedded product has no gap");
    }
    let norm = family_product_norm(family, &seq.indices()[..stats.cover_time])?;
    let bound = supersequence_norm_bound(delta, stats.cover_time, family.len());
    Ok(AbstractCheck {
        delta,
        attained: norm,
        bound,
        pass: norm <= bound + VERIFY_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub delta: f64,
    pub closed_form: f64,
    pub direct_norm: f64,
    /// `1 − δ/(8(n+1))`.
    pub bound: f64,
    /// `(1 − direct_norm)/(δ/(8(n+1)))`; undefined at `δ = 0`.
    pub ratio: Option<f64>,
}

impl SweepRow {
    pub fn relative_error(&self) -> f64 {
        let scale = self.closed_form.abs().max(f64::MIN_POSITIVE);
        if self.closed_form == 0.0 {
            self.direct_norm.abs()
        } else {
            (self.direct_norm - self.closed_form).abs() / scale
        }
    }
}

pub fn recht_re_row(n: usize, delta: f64) -> Result<SweepRow> {
    let family = recht_re_family(n, delta)?;
    let order: Vec<usize> = (0..n).collect();
    let direct_norm = family_product_norm(&family, &order)?;
    let denom = delta / (8.0 * (n as f64 + 1.0));
    Ok(SweepRow {
        n,
        delta,
        closed_form: closed_form_product_norm(n, delta),
        direct_norm,
        bound: scan_norm_bound(delta, n),
        ratio: (delta > 0.0).then(|| (1.0 - direct_norm) / denom),
    })
}

pub fn recht_re_sweep(ns: &[usize], deltas: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(ns.len() * deltas.len());
    for &n in ns {
        for &delta in deltas {
            rows.push(recht_re_row(n, delta)?);
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("n,delta,closed_form,direct_norm,bound,ratio\n");
    for r in rows {
        let ratio = r.ratio.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.delta, r.closed_form, r.direct_norm, r.bound, ratio
        ));
    }
    out
}
