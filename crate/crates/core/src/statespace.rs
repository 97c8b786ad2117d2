//! Finite product spaces, mixed-radix state indexing and probability vectors.
//!
//! States are indexed little-endian: site 0 is the least significant digit,
//! so `index = Σ_i coords[i] · Π_{j<i} |X_j|`. Every other module relies on
//! this convention.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Default hard cap on the number of product-space states.
pub const DEFAULT_STATE_CAP: usize = 65_536;

/// Tolerance on `Σ probs = 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSpace {
    alphabet_sizes: Vec<usize>,
    total_states: usize,
}

impl ProductSpace {
    pub fn new(alphabet_sizes: Vec<usize>) -> Result<Self> {
        Self::with_cap(alphabet_sizes, DEFAULT_STATE_CAP)
    }

    pub fn with_cap(alphabet_sizes: Vec<usize>, cap: usize) -> Result<Self> {
        if alphabet_sizes.is_empty() {
            return domain("product space needs at least one site");
        }
        let mut total: usize = 1;
        for (site, &size) in alphabet_sizes.iter().enumerate() {
            if size == 0 {
                return domain(format!("site {site} has an empty alphabet"));
            }
            total = total
                .checked_mul(size)
                .filter(|&t| t <= cap)
                .ok_or(Error::CapExceeded { cap })?;
        }
        Ok(Self {
            alphabet_sizes,
            total_states: total,
        })
    }

    /// `n` binary sites.
    pub fn binary(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn sites(&self) -> usize {
        self.alphabet_sizes.len()
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    pub fn alphabet_size(&self, site: usize) -> usize {
        self.alphabet_sizes[site]
    }

    pub fn total_states(&self) -> usize {
        self.total_states
    }

    /// Place value of `site` in the mixed-radix index.
    pub fn stride(&self, site: usize) -> usize {
        self.alphabet_sizes[..site].iter().product()
    }

    pub fn encode_state(&self, state: &StateVector) -> Result<usize> {
        if state.len() != self.sites() {
            return domain(format!(
                "state has {} coordinates, space has {} sites",
                state.len(),
                self.sites()
            ));
        }
        let mut index = 0;
        let mut stride = 1;
        for (site, (&value, &size)) in state.0.iter().zip(&self.alphabet_sizes).enumerate() {
            if value >= size {
                return domain(format!(
                    "site {site}: value {value} outside alphabet of size {size}"
                ));
            }
            index += value * stride;
            stride *= size;
        }
        Ok(index)
    }

    pub fn decode_state(&self, mut index: usize) -> Result<StateVector> {
        if index >= self.total_states {
            return domain(format!(
                "state index {index} out of range for {} states",
                self.total_states
            ));
        }
        let coords = self
            .alphabet_sizes
            .iter()
            .map(|&size| {
                let v = index % size;
                index /= size;
                v
            })
            .collect();
        Ok(StateVector(coords))
    }

    /// Value held by `site` in the state with the given index.
    pub fn coordinate(&self, index: usize, site: usize) -> usize {
        (index / self.stride(site)) % self.alphabet_sizes[site]
    }

    /// Iterates over all states in index order.
    pub fn states(&self) -> impl Iterator<Item = StateVector> + '_ {
        (0..self.total_states).map(move |i| self.decode_state(i).expect("index in range"))
    }
}

/// A configuration `x ∈ X_1 × … × X_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateVector(pub Vec<usize>);

impl StateVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for StateVector {
    fn from(coords: Vec<usize>) -> Self {
        Self(coords)
    }
}

/// A probability vector over the states of a product space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    space: ProductSpace,
    probs: Vec<f64>,
    support: Vec<usize>,
    pi_min: f64,
}

impl Distribution {
    /// Wraps an already normalized probability vector.
    pub fn new(space: ProductSpace, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != space.total_states() {
            return domain(format!(
                "probability vector has length {}, space has {} states",
                probs.len(),
                space.total_states()
            ));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return domain(format!("invalid probability {p}"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return domain(format!("probabilities sum to {total}, not 1"));
        }
        Ok(Self::from_valid(space, probs))
    }

    fn from_valid(space: ProductSpace, probs: Vec<f64>) -> Self {
        let support: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
        let pi_min = support
            .iter()
            .map(|&i| probs[i])
            .fold(f64::INFINITY, f64::min);
        Self {
            space,
            probs,
            support,
            pi_min,
        }
    }

    pub fn uniform(space: ProductSpace) -> Self {
        let m = space.total_states();
        Self::from_valid(space, vec![1.0 / m as f64; m])
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Indices with positive probability, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Smallest positive probability.
    pub fn pi_min(&self) -> f64 {
        self.pi_min
    }

    /// Probabilities restricted to the support, in support order.
    pub fn support_probs(&self) -> Vec<f64> {
        self.support.iter().map(|&i| self.probs[i]).collect()
    }
}

/// Normalizes a non-negative weight table into a [`Distribution`].
pub fn normalize_weights(space: &ProductSpace, raw: &[f64]) -> Result<Distribution> {
    if raw.len() != space.total_states() {
        return domain(format!(
            "weight table has length {}, space has {} states",
            raw.len(),
            space.total_states()
        ));
    }
    if let Some((i, w)) = raw
        .iter()
        .enumerate()
        .find(|(_, w)| !w.is_finite() || **w < 0.0)
    {
        return domain(format!("weight {w} at state {i} is negative or not finite"));
    }
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return domain("all weights are zero");
    }
    if !total.is_finite() {
        return domain("weights overflow");
    }
    let probs = raw.iter().map(|w| w / total).collect();
    Ok(Distribution::from_valid(space.clone(), probs))
}

/// Total variation distance `(1/2) Σ_x |mu(x) − nu(x)|`.
pub fn tv_distance(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return domain(format!(
            "cannot compare distributions of lengths {} and {}",
            mu.len(),
            nu.len()
        ));
    }
    Ok(tv_unchecked(mu, nu))
}

pub(crate) fn tv_unchecked(mu: &[f64], nu: &[f64]) -> f64 {
    0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
