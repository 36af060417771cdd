//! Majorization on the probability simplex.
//!
//! Every comparison is phrased through suffix sums of the decreasing
//! rearrangement, `suffix[k] = x↓_k + … + x↓_n`. By normalization this is
//! equivalent to the prefix-sum definition of `x ≺ y`, but the smallest
//! components (of order `1/n²` for flat random points) are not swamped by
//! the large ones when accumulated first.

use crate::error::{Error, Result};
use crate::order_stats::{ChainKind, ChainSample};

/// Relative tolerance on `Σ x_i = 1` accepted by [`ProbVector::new`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Absolute tolerance applied to each suffix-sum comparison.
pub const MAJORIZATION_TOL: f64 = 1e-12;

/// Absolute tolerance on the closing value `S_n` of a bridge walk.
pub const BRIDGE_TOL: f64 = 1e-10;

/// A point of the unit simplex, in no particular order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    values: Vec<f64>,
}

impl ProbVector {
    /// Validates non-negativity and normalization.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidEntry { index, value });
            }
        }
        let total = compensated_sum(&values);
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { values })
    }

    /// Normalizes a vector of non-negative weights with a positive total.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidEntry { index, value });
            }
        }
        let total = compensated_sum(&weights);
        if total <= 0.0 {
            return Err(Error::NotNormalized(total));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(weights)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }

    pub fn sort_desc(&self) -> SortedProbVector {
        sort_desc(self)
    }
}

/// The decreasing rearrangement `x↓` together with its suffix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedProbVector {
    values_desc: Vec<f64>,
    // suffix[i] = values_desc[i] + … + values_desc[n-1]
    suffix: Vec<f64>,
}

impl SortedProbVector {
    pub fn len(&self) -> usize {
        self.values_desc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_desc.is_empty()
    }

    pub fn values_desc(&self) -> &[f64] {
        &self.values_desc
    }

    /// All suffix sums; index 0 holds the full total.
    pub fn suffix_sums(&self) -> &[f64] {
        &self.suffix
    }

    /// `Σ_{j=k}^{n} x↓_j` with 1-based `k`; `k = n + 1` gives the empty sum.
    pub fn suffix_sum(&self, k: usize) -> f64 {
        assert!(
            k >= 1 && k <= self.len() + 1,
            "suffix index {k} out of range"
        );
        self.suffix.get(k - 1).copied().unwrap_or(0.0)
    }

    /// Sum of the `j` smallest components.
    pub fn tail_sum(&self, j: usize) -> f64 {
        let n = self.len();
        assert!(j <= n);
        if j == 0 {
            0.0
        } else {
            self.suffix[n - j]
        }
    }
}

/// Sorts `x` into non-increasing order and accumulates suffix sums from the
/// smallest entry upward.
pub fn sort_desc(x: &ProbVector) -> SortedProbVector {
    let mut values_desc = x.values.clone();
    values_desc.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut suffix = vec![0.0; values_desc.len()];
    let mut acc = 0.0;
    for (s, &v) in suffix.iter_mut().zip(&values_desc).rev() {
        acc += v;
        *s = acc;
    }
    SortedProbVector {
        values_desc,
        suffix,
    }
}

fn check_dims(x: &SortedProbVector, y: &SortedProbVector) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    Ok(())
}

/// Checks the `k` conditions that involve only the smallest components:
/// `Σ of the j smallest of x ≥ Σ of the j smallest of y` for `j = 1..=k`.
///
/// With `k = n` this is the full relation `x ≺ y`.
pub fn smallest_conditions_hold(
    x: &SortedProbVector,
    y: &SortedProbVector,
    k: usize,
) -> Result<bool> {
    check_dims(x, y)?;
    let n = x.len();
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    Ok((n - k..n)
        .rev()
        .all(|i| x.suffix[i] >= y.suffix[i] - MAJORIZATION_TOL))
}

/// [`smallest_conditions_hold`] on unsorted inputs, ordering only as many of
/// the smallest components as the decision needs. Tail sums are accumulated
/// in the same ascending order as [`sort_desc`], so the answer is bit-for-bit
/// the one obtained by sorting both vectors first.
pub fn smallest_conditions_hold_unsorted(x: ProbVector, y: ProbVector, k: usize) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    let (mut a, mut b) = (x.values, y.values);
    let (mut tail_a, mut tail_b) = (0.0_f64, 0.0_f64);
    let mut done = 0;
    let mut stage = 8;
    while done < k {
        let m = stage.min(k);
        for v in [&mut a, &mut b] {
            let rest = &mut v[done..];
            if m - done < rest.len() {
                rest.select_nth_unstable_by(m - done - 1, f64::total_cmp);
            }
            rest[..m - done].sort_unstable_by(f64::total_cmp);
        }
        for j in done..m {
            tail_a += a[j];
            tail_b += b[j];
            if tail_a < tail_b - MAJORIZATION_TOL {
                return Ok(false);
            }
        }
        done = m;
        stage *= 4;
    }
    Ok(true)
}

/// Returns `true` iff `x ≺ y` (x is majorized by y).
pub fn majorizes(x: &SortedProbVector, y: &SortedProbVector) -> Result<bool> {
    smallest_conditions_hold(x, y, x.len())
}

/// Maximal probability of converting a state with diagonal `x` into one with
/// diagonal `y`: `min_k suffix_x[k] / suffix_y[k]`.
///
/// Ratios whose suffix comparison passes at [`MAJORIZATION_TOL`] count as 1,
/// so the result is exactly `1.0` iff [`majorizes`] holds.
pub fn conversion_probability(x: &SortedProbVector, y: &SortedProbVector) -> Result<f64> {
    check_dims(x, y)?;
    let mut min = 1.0_f64;
    for (i, (&sx, &sy)) in x.suffix.iter().zip(&y.suffix).enumerate().rev() {
        if sy <= 0.0 {
            return Err(Error::ZeroDenominator { index: i + 1 });
        }
        if sx < sy - MAJORIZATION_TOL {
            min = min.min(sx / sy);
        }
    }
    Ok(min)
}

/// The walk `S_1..S_n` with steps `y↓_k − x↓_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeWalk {
    partial_sums: Vec<f64>,
}

impl BridgeWalk {
    /// Accepts explicit partial sums; the last one must vanish within
    /// [`BRIDGE_TOL`] and is snapped to exactly zero.
    pub fn from_partial_sums(mut partial_sums: Vec<f64>) -> Result<Self> {
        let last = partial_sums.last_mut().ok_or(Error::Empty)?;
        if last.abs() > BRIDGE_TOL || !last.is_finite() {
            return Err(Error::OpenBridge(*last));
        }
        *last = 0.0;
        Ok(Self { partial_sums })
    }

    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }

    pub fn len(&self) -> usize {
        self.partial_sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_sums.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.partial_sums
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `N_n = #{k ≤ n : S_k ≥ 0}`.
    pub fn time_above_origin(&self) -> usize {
        time_above_origin(self)
    }
}

/// Builds the bridge from the suffix sums: `S_k = suffix_x[k+1] − suffix_y[k+1]`,
/// which equals `Σ_{j≤k} (y↓_j − x↓_j)` by normalization and closes at exactly 0.
pub fn bridge_walk(x: &SortedProbVector, y: &SortedProbVector) -> Result<BridgeWalk> {
    check_dims(x, y)?;
    let n = x.len();
    let partial_sums = (1..=n)
        .map(|k| x.suffix_sum(k + 1) - y.suffix_sum(k + 1))
        .collect();
    Ok(BridgeWalk { partial_sums })
}

/// Counts the indices with `S_k ≥ 0`; exact zeros count as above.
pub fn time_above_origin(w: &BridgeWalk) -> usize {
    w.partial_sums.iter().filter(|&&s| s >= 0.0).count()
}

/// Running infimum of prefix-sum ratios `(V_1+…+V_k) / (V'_1+…+V'_k)`.
#[derive(Debug, Clone, Copy)]
pub struct PrefixRatioInf {
    sum: f64,
    sum_prime: f64,
    inf: f64,
    steps: usize,
}

impl Default for PrefixRatioInf {
    fn default() -> Self {
        Self::new()
    }
}

impl PrefixRatioInf {
    pub fn new() -> Self {
        Self {
            sum: 0.0,
            sum_prime: 0.0,
            inf: f64::INFINITY,
            steps: 0,
        }
    }

    /// Feeds the next pair of chain values and returns the updated infimum.
    pub fn push(&mut self, v: f64, v_prime: f64) -> f64 {
        self.sum += v;
        self.sum_prime += v_prime;
        self.steps += 1;
        self.inf = self.inf.min(self.sum / self.sum_prime);
        self.inf
    }

    pub fn inf(&self) -> f64 {
        self.inf
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn sums(&self) -> (f64, f64) {
        (self.sum, self.sum_prime)
    }
}

/// `min_{k ≤ k_max} (Σ_{j≤k} V_j) / (Σ_{j≤k} V'_j)` over two V chains.
///
/// The raw infimum is returned; it can exceed 1.
pub fn pi_infinity(v: &ChainSample, v_prime: &ChainSample, k_max: usize) -> Result<f64> {
    for chain in [v, v_prime] {
        if chain.kind() != ChainKind::V {
            return Err(Error::InvalidChain("V"));
        }
        if chain.len() < k_max {
            return Err(Error::ChainTooShort {
                len: chain.len(),
                k_max,
            });
        }
    }
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let mut acc = PrefixRatioInf::new();
    for (&a, &b) in v.values().iter().zip(v_prime.values()).take(k_max) {
        acc.push(a, b);
    }
    Ok(acc.inf())
}

/// Neumaier summation.
pub(crate) fn compensated_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut c = 0.0_f64;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}
