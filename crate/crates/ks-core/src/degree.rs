//! Bounded-support degree distributions and their generating functions.
//!
//! A [`DegreeDistribution`] holds the pmf `(p_k)` for degrees `0..=k_max`
//! together with the mean `lambda = sum k*p_k`. The generating function
//! `phi(a) = sum p_k a^k` and the size-biased counterpart
//! `phi_hat(a) = phi'(a)/phi'(1)` drive everything downstream: the root
//! equation, density evolution, and Galton-Watson sampling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Accepted slack on the input probability sum before rejection.
const SUM_TOLERANCE: f64 = 1e-9;
/// Redraw attempts for fixing an odd total degree before giving up.
const PARITY_ATTEMPTS: usize = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum DegreeError {
    #[error("degree distribution has no support")]
    EmptySupport,
    #[error("degree {degree} listed with negative probability {probability}")]
    NegativeProbability { degree: usize, probability: f64 },
    #[error("probabilities sum to {sum}, not 1 within {SUM_TOLERANCE:e}")]
    SumNotOne { sum: f64 },
    #[error("degree {degree} listed more than once")]
    DuplicateDegree { degree: usize },
    #[error("mean degree is zero (all mass on degree 0)")]
    ZeroMeanDegree,
    #[error("generating-function argument {alpha} outside [0, 1]")]
    Domain { alpha: f64 },
    #[error("bad parameter {name}={value}: {reason}")]
    BadParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("cannot fix degree-sum parity for n={n} after {PARITY_ATTEMPTS} redraws")]
    ParityUnfixable { n: usize },
    #[error("bad distribution spec: offending token `{token}` ({reason})")]
    Parse { token: String, reason: &'static str },
}

/// Probability mass function over degrees `0..=k_max`, normalized, with
/// positive mean. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pmf: Vec<f64>,
    mean: f64,
}

/// Offspring law of a non-root tree vertex: index `k-1` carries mass
/// `k*p_k / lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeBiasedDistribution {
    pmf: Vec<f64>,
}

/// Outcome of the giant-core condition checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionReport {
    pub p1_positive: bool,
    pub giant_condition: bool,
    /// Value of `sum k(k-2) p_k`.
    pub giant_moment: f64,
}

impl DegreeDistribution {
    /// Builds a distribution from `(degree, probability)` entries.
    ///
    /// Degrees must be distinct and probabilities non-negative; the sum must
    /// be 1 within `1e-9` and is renormalized exactly. `k_max` is the largest
    /// listed degree, even if its mass is zero.
    pub fn from_entries(entries: &[(usize, f64)]) -> Result<Self, DegreeError> {
        if entries.is_empty() {
            return Err(DegreeError::EmptySupport);
        }
        let k_max = entries.iter().map(|&(k, _)| k).max().unwrap();
        let mut pmf = vec![0.0; k_max + 1];
        let mut seen = vec![false; k_max + 1];
        let mut sum = 0.0;
        for &(degree, probability) in entries {
            if probability < 0.0 {
                return Err(DegreeError::NegativeProbability {
                    degree,
                    probability,
                });
            }
            if seen[degree] {
                return Err(DegreeError::DuplicateDegree { degree });
            }
            seen[degree] = true;
            pmf[degree] = probability;
            sum += probability;
        }
        if !((1.0 - SUM_TOLERANCE)..=(1.0 + SUM_TOLERANCE)).contains(&sum) {
            return Err(DegreeError::SumNotOne { sum });
        }
        for p in &mut pmf {
            *p /= sum;
        }
        let mean: f64 = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        if mean <= 0.0 {
            return Err(DegreeError::ZeroMeanDegree);
        }
        Ok(Self { pmf, mean })
    }

    /// The `leaf351(q, p)` parametric family: support `{1, 3, 51}` with
    /// `p_1 = q/Z`, `p_3 = (1-q)p/(3Z)`, `p_51 = (1-q)(1-p)/(51Z)` and
    /// `Z = q + (1-q)(p/3 + (1-p)/51)`, so that
    /// `phi_hat(a) = q + (1-q)(p a^2 + (1-p) a^50)`.
    /// Zero-mass atoms are dropped from the support.
    pub fn leaf351(q: f64, p: f64) -> Result<Self, DegreeError> {
        for (name, value) in [("q", q), ("p", p)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(DegreeError::BadParameter {
                    name,
                    value,
                    reason: "must lie in [0, 1]",
                });
            }
        }
        let z = q + (1.0 - q) * (p / 3.0 + (1.0 - p) / 51.0);
        let atoms = [
            (1, q / z),
            (3, (1.0 - q) * p / (3.0 * z)),
            (51, (1.0 - q) * (1.0 - p) / (51.0 * z)),
        ];
        let entries: Vec<(usize, f64)> =
            atoms.into_iter().filter(|&(_, w)| w > 0.0).collect();
        Self::from_entries(&entries)
    }

    /// Poisson(`mean`) truncated at `cutoff` and renormalized.
    pub fn truncated_poisson(mean: f64, cutoff: usize) -> Result<Self, DegreeError> {
        if mean.is_nan() || mean <= 0.0 {
            return Err(DegreeError::BadParameter {
                name: "mean",
                value: mean,
                reason: "must be positive",
            });
        }
        if cutoff == 0 {
            return Err(DegreeError::BadParameter {
                name: "cutoff",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        // Unnormalized weights mean^k / k!, built multiplicatively; the
        // common e^{-mean} factor cancels in the normalization.
        let mut weights = Vec::with_capacity(cutoff + 1);
        let mut w = 1.0;
        weights.push(w);
        for k in 1..=cutoff {
            w *= mean / k as f64;
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        let entries: Vec<(usize, f64)> = weights
            .iter()
            .enumerate()
            .map(|(k, &w)| (k, w / total))
            .collect();
        Self::from_entries(&entries)
    }

    pub fn k_max(&self) -> usize {
        self.pmf.len() - 1
    }

    /// `p_k`, zero beyond `k_max`.
    pub fn p(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Mean degree `lambda = phi'(1)`.
    pub fn mean_degree(&self) -> f64 {
        self.mean
    }

    fn check_domain(alpha: f64) -> Result<(), DegreeError> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(())
        } else {
            Err(DegreeError::Domain { alpha })
        }
    }

    /// `phi(a) = sum p_k a^k`.
    pub fn phi(&self, alpha: f64) -> Result<f64, DegreeError> {
        Self::check_domain(alpha)?;
        Ok(self.phi_raw(alpha))
    }

    /// `phi'(a) = sum k p_k a^(k-1)`.
    pub fn phi_prime(&self, alpha: f64) -> Result<f64, DegreeError> {
        Self::check_domain(alpha)?;
        Ok(self.phi_prime_raw(alpha))
    }

    /// `phi_hat(a) = phi'(a) / lambda`, the size-biased generating function.
    pub fn phi_hat(&self, alpha: f64) -> Result<f64, DegreeError> {
        Self::check_domain(alpha)?;
        Ok(self.phi_hat_raw(alpha))
    }

    /// `phi_hat'(a) = phi''(a) / lambda`.
    pub fn phi_hat_prime(&self, alpha: f64) -> Result<f64, DegreeError> {
        Self::check_domain(alpha)?;
        Ok(self.phi_hat_prime_raw(alpha))
    }

    // Unchecked Horner evaluations for hot loops; callers guarantee
    // alpha in [0, 1].
    pub(crate) fn phi_raw(&self, alpha: f64) -> f64 {
        let mut acc = 0.0;
        for &p in self.pmf.iter().rev() {
            acc = acc * alpha + p;
        }
        acc
    }

    pub(crate) fn phi_prime_raw(&self, alpha: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &p) in self.pmf.iter().enumerate().skip(1).rev() {
            acc = acc * alpha + k as f64 * p;
        }
        acc
    }

    pub(crate) fn phi_hat_raw(&self, alpha: f64) -> f64 {
        self.phi_prime_raw(alpha) / self.mean
    }

    pub(crate) fn phi_hat_prime_raw(&self, alpha: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &p) in self.pmf.iter().enumerate().skip(2).rev() {
            acc = acc * alpha + (k * (k - 1)) as f64 * p;
        }
        acc / self.mean
    }

    /// Law of `D_hat`: offspring count `k-1` with probability `k p_k / lambda`.
    pub fn size_biased(&self) -> SizeBiasedDistribution {
        let pmf = (1..self.pmf.len())
            .map(|k| k as f64 * self.pmf[k] / self.mean)
            .collect();
        SizeBiasedDistribution { pmf }
    }

    /// Flags for the giant-core conditions: `p_1 > 0` and `sum k(k-2) p_k > 0`.
    pub fn check_assumptions(&self) -> AssumptionReport {
        let giant_moment: f64 = self
            .pmf
            .iter()
            .enumerate()
            .map(|(k, &p)| (k * k) as f64 * p - 2.0 * k as f64 * p)
            .sum();
        AssumptionReport {
            p1_positive: self.p(1) > 0.0,
            giant_condition: giant_moment > 0.0,
            giant_moment,
        }
    }

    /// Draws `n` i.i.d. degrees; if the total is odd the final entry is
    /// redrawn until the total is even (up to 1000 attempts). Deterministic
    /// given `seed`.
    pub fn sample_degree_sequence(
        &self,
        n: usize,
        seed: u64,
    ) -> Result<Vec<usize>, DegreeError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cdf = cumulative(&self.pmf);
        let mut degrees: Vec<usize> = (0..n).map(|_| draw(&cdf, &mut rng)).collect();
        let mut total: usize = degrees.iter().sum();
        let mut attempts = 0;
        while total % 2 == 1 {
            if attempts >= PARITY_ATTEMPTS {
                return Err(DegreeError::ParityUnfixable { n });
            }
            let last = degrees.len() - 1;
            total -= degrees[last];
            degrees[last] = draw(&cdf, &mut rng);
            total += degrees[last];
            attempts += 1;
        }
        Ok(degrees)
    }
}

impl SizeBiasedDistribution {
    /// Mass at offspring count `c` (= degree `c+1` of the size-biased vertex).
    pub fn p(&self, offspring: usize) -> f64 {
        self.pmf.get(offspring).copied().unwrap_or(0.0)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Mean offspring count `phi_hat'(1)`.
    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(c, &p)| c as f64 * p)
            .sum()
    }

    pub(crate) fn cumulative(&self) -> Vec<f64> {
        cumulative(&self.pmf)
    }
}

pub(crate) fn cumulative(pmf: &[f64]) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &p in pmf {
        acc += p;
        cdf.push(acc);
    }
    // Guard against the final entry landing below a drawn uniform.
    if let Some(last) = cdf.last_mut() {
        *last = f64::max(*last, 1.0);
    }
    cdf
}

pub(crate) fn draw<R: Rng>(cdf: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    cdf.partition_point(|&c| c <= u)
}
