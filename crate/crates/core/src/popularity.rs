//! File popularity and the induced distribution of demand classifications.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::{Error, Result};

/// Request probabilities of files `1..=N`, most popular first.
#[derive(Clone, Debug, PartialEq)]
pub struct PopularityModel {
    probs: Vec<f64>,
}

impl PopularityModel {
    /// Normalise non-negative weights; they must already be non-increasing.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("no files".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument("weights must be finite and non-negative".into()));
        }
        if weights.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument("weights must be non-increasing".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument("weights sum to zero".into()));
        }
        Ok(PopularityModel { probs: weights.iter().map(|w| w / total).collect() })
    }

    pub fn uniform(files: usize) -> Result<Self> {
        Self::from_weights(&vec![1.0; files])
    }

    pub fn files(&self) -> usize {
        self.probs.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of the `n` most popular files.
    pub fn head_mass(&self, n: usize) -> f64 {
        self.probs[..n.min(self.probs.len())].iter().sum()
    }

    /// Probability of the `n` least popular files.
    pub fn tail_mass(&self, n: usize) -> f64 {
        let len = self.probs.len();
        self.probs[len - n.min(len)..].iter().sum()
    }

    /// `(p_h, p_l, p_r)` for `high` high-level and `uncached` zero-level files.
    pub fn level_masses(&self, high: usize, uncached: usize) -> Result<(f64, f64, f64)> {
        if high + uncached > self.files() {
            return Err(Error::InvalidArgument(format!(
                "N_h + N_r = {} exceeds N = {}",
                high + uncached,
                self.files()
            )));
        }
        // each level summed on its own so empty levels are exactly 0
        let n = self.files();
        let sum = |r: std::ops::Range<usize>| self.probs[r].iter().sum::<f64>();
        let (ph, pl, pr) = (sum(0..high), sum(high..n - uncached), sum(n - uncached..n));
        let total = ph + pl + pr;
        Ok((ph / total, pl / total, pr / total))
    }

    /// Draw one file id (1-based).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let dist = WeightedIndex::new(&self.probs).expect("validated weights");
        dist.sample(rng) as u32 + 1
    }
}

/// Zipf popularity: `p_n ∝ n^-gamma`.
pub fn zipf(files: usize, gamma: f64) -> Result<PopularityModel> {
    if gamma.is_nan() || gamma < 0.0 || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be >= 0")));
    }
    let w: Vec<f64> = (1..=files).map(|n| (n as f64).powf(-gamma)).collect();
    PopularityModel::from_weights(&w)
}

/// Probability of each `[k^h, k^l, k^r]` for `K` independent requests.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileDistribution {
    users: usize,
    mass: BTreeMap<[usize; 3], f64>,
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

impl ProfileDistribution {
    /// Multinomial over the three levels.
    pub fn from_level_masses(users: usize, ph: f64, pl: f64, pr: f64) -> Self {
        let mut mass = BTreeMap::new();
        let kf = factorial(users);
        for kh in 0..=users {
            for kl in 0..=users - kh {
                let kr = users - kh - kl;
                let coeff = kf / (factorial(kh) * factorial(kl) * factorial(kr));
                let m = coeff as f64 * ph.powi(kh as i32) * pl.powi(kl as i32) * pr.powi(kr as i32);
                mass.insert([kh, kl, kr], m);
            }
        }
        ProfileDistribution { users, mass }
    }

    /// All mass on one classification.
    pub fn point(k: [usize; 3]) -> Self {
        let users = k.iter().sum();
        let mut d = Self::from_level_masses(users, 0.0, 0.0, 0.0);
        for (key, m) in d.mass.iter_mut() {
            *m = if *key == k { 1.0 } else { 0.0 };
        }
        d
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn mass(&self, k: [usize; 3]) -> f64 {
        self.mass.get(&k).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        self.mass.iter().map(|(k, m)| (*k, *m))
    }

    /// Classifications with positive mass.
    pub fn support(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        self.iter().filter(|(_, m)| *m > 0.0)
    }

    pub fn total(&self) -> f64 {
        self.mass.values().sum()
    }

    /// The unique classification carrying all the mass, if any.
    pub fn point_mass(&self) -> Option<[usize; 3]> {
        let mut s = self.support();
        let (k, m) = s.next()?;
        (s.next().is_none() && m == 1.0).then_some(k)
    }
}

pub fn profile_distribution(
    model: &PopularityModel,
    high: usize,
    uncached: usize,
    users: usize,
) -> Result<ProfileDistribution> {
    let (ph, pl, pr) = model.level_masses(high, uncached)?;
    Ok(ProfileDistribution::from_level_masses(users, ph, pl, pr))
}

/// Empirical classification frequencies from `draws` sampled demands.
pub fn sample_profile<R: Rng + ?Sized>(
    model: &PopularityModel,
    high: usize,
    uncached: usize,
    users: usize,
    draws: usize,
    rng: &mut R,
) -> BTreeMap<[usize; 3], usize> {
    let dist = WeightedIndex::new(model.probabilities()).expect("validated weights");
    let low_end = model.files() - uncached;
    let mut out = BTreeMap::new();
    for _ in 0..draws {
        let mut k = [0usize; 3];
        for _ in 0..users {
            let f = dist.sample(rng) + 1;
            k[if f <= high { 0 } else if f <= low_end { 1 } else { 2 }] += 1;
        }
        *out.entry(k).or_default() += 1;
    }
    out
}
