//! Estimators, empirical distribution functions and log-log fitting.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl EstimateWithError {
    /// Binomial proportion `successes / samples` with `sqrt(p̂(1−p̂)/N)`.
    pub fn proportion(successes: u64, samples: u64) -> Self {
        assert!(samples >= 1 && successes <= samples);
        let p = successes as f64 / samples as f64;
        Self {
            value: p,
            std_error: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
        }
    }

    /// Sample mean with the standard error from the unbiased variance.
    pub fn mean_of(xs: &[f64]) -> Self {
        assert!(!xs.is_empty());
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            value: mean,
            std_error: (var / n).sqrt(),
            samples: xs.len() as u64,
        }
    }

    /// `|a − b| ≤ z · sqrt(se_a² + se_b²)`.
    pub fn agrees_with(&self, other: &Self, z: f64) -> bool {
        (self.value - other.value).abs() <= z * self.std_error.hypot(other.std_error)
    }

    /// `|value − target| ≤ z · se`.
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.value - target).abs() <= z * self.std_error
    }
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted_samples: Vec<f64>,
}

impl EmpiricalCdf {
    /// Sorts the samples; NaNs are rejected.
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(bad) = samples.iter().find(|x| x.is_nan()) {
            return Err(Error::Domain {
                name: "sample",
                value: *bad,
            });
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(Self {
            sorted_samples: samples,
        })
    }

    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted_samples
    }

    pub fn len(&self) -> usize {
        self.sorted_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_samples.is_empty()
    }

    /// `F̂(x) = #{X_i ≤ x} / N`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted_samples.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }

    /// `F̂(x−) = #{X_i < x} / N`.
    pub fn eval_left(&self, x: f64) -> f64 {
        self.sorted_samples.partition_point(|&s| s < x) as f64 / self.len() as f64
    }

    /// Mass of the atom at `x`.
    pub fn mass_at(&self, x: f64) -> f64 {
        let xs = &self.sorted_samples;
        let hits = xs.partition_point(|&s| s <= x) - xs.partition_point(|&s| s < x);
        hits as f64 / xs.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.sorted_samples[0]
    }

    pub fn max(&self) -> f64 {
        *self.sorted_samples.last().unwrap()
    }
}

/// Kolmogorov-Smirnov distance `sup_x |F̂(x) − F(x)|`, checking both one-sided
/// limits of the step function at every sample point.
pub fn ks_distance(e: &EmpiricalCdf, reference: impl Fn(f64) -> f64) -> f64 {
    let xs = &e.sorted_samples;
    let n = xs.len() as f64;
    let mut d = 0.0_f64;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let r = reference(x);
        d = d
            .max((i as f64 / n - r).abs())
            .max((j as f64 / n - r).abs());
        i = j;
    }
    d
}

/// `max_i |F̂(t_i) − F(t_i)|` over the given evaluation points only. This is
/// the meaningful comparison for a lattice-valued statistic against a
/// continuous limit law.
pub fn sup_distance_at(
    e: &EmpiricalCdf,
    points: impl IntoIterator<Item = f64>,
    reference: impl Fn(f64) -> f64,
) -> f64 {
    points
        .into_iter()
        .map(|t| (e.eval(t) - reference(t)).abs())
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_x |F̂_a(x) − F̂_b(x)|`.
pub fn ks_two_sample(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    let (xs, ys) = (&a.sorted_samples, &b.sorted_samples);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0_f64;
    while i < xs.len() || j < ys.len() {
        let x = match (xs.get(i), ys.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// `(2/π) arcsin(√t)` on `[0, 1]`.
pub fn arcsine_cdf(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain {
            name: "t",
            value: t,
        });
    }
    Ok(2.0 / PI * t.sqrt().asin())
}

/// `value ≈ amplitude_b · n^{−exponent_theta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub amplitude_b: f64,
    pub exponent_theta: f64,
    pub sigma_theta: f64,
}

impl PowerLawFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.amplitude_b * n.powf(-self.exponent_theta)
    }
}

/// Unweighted least squares of `log value` on `log n` over `(n, value,
/// std_error)` triples. The standard errors are carried but not used as
/// weights; `sigma_theta` is the OLS slope error.
pub fn fit_power_law(points: &[(f64, f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for &(n, value, _) in points {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::Domain {
                name: "value",
                value,
            });
        }
        if n.is_nan() || n <= 0.0 {
            return Err(Error::Domain {
                name: "n",
                value: n,
            });
        }
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all n values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let sigma = (sse / (m - 2.0) / sxx).sqrt();
    Ok(PowerLawFit {
        amplitude_b: intercept.exp(),
        exponent_theta: -slope,
        sigma_theta: sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order_stats::exponential_cdf;
    use crate::random_states::{sample_exponentials, RngStream};

    #[test]
    fn proportion_error() {
        let e = EstimateWithError::proportion(25, 100);
        assert_eq!(e.value, 0.25);
        assert!((e.std_error - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert!(e.within(0.3, 2.0));
        assert!(!e.within(0.4, 3.0));
    }

    #[test]
    fn empirical_cdf_steps() {
        let e = EmpiricalCdf::new(vec![0.3, 0.1, 0.3, 0.9]).unwrap();
        assert_eq!(e.eval(f64::NEG_INFINITY), 0.0);
        assert_eq!(e.eval(f64::INFINITY), 1.0);
        assert_eq!(e.eval(0.3), 0.75);
        assert_eq!(e.eval_left(0.3), 0.25);
        assert_eq!(e.mass_at(0.3), 0.5);
        assert_eq!(e.eval(0.2), 0.25);
        assert!(EmpiricalCdf::new(vec![]).is_err());
        assert!(EmpiricalCdf::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn ks_single_point() {
        let e = EmpiricalCdf::new(vec![0.5]).unwrap();
        assert_eq!(ks_distance(&e, |x| x.clamp(0.0, 1.0)), 0.5);
    }

    #[test]
    fn ks_of_quantile_grid() {
        let n = 1000;
        let samples = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let e = EmpiricalCdf::new(samples).unwrap();
        let d = ks_distance(&e, |x| x.clamp(0.0, 1.0));
        assert!(d <= 0.5 / n as f64 + 1e-15, "{d}");
    }

    #[test]
    fn ks_of_exponential_draws() {
        let n = 10_000;
        let mut rng = RngStream::new(99, 0).generator();
        let e = EmpiricalCdf::new(sample_exponentials(n, &mut rng)).unwrap();
        assert!(ks_distance(&e, exponential_cdf) < 1.63 / (n as f64).sqrt());
    }

    #[test]
    fn two_sample_ks() {
        let a = EmpiricalCdf::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        let b = EmpiricalCdf::new(vec![4.0, 5.0]).unwrap();
        assert_eq!(ks_two_sample(&a, &b), 1.0);
        let c = EmpiricalCdf::new(vec![1.5, 2.5, 3.5, 4.5]).unwrap();
        // At x = 3: 1 vs 0.5.
        assert!((ks_two_sample(&a, &c) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn arcsine_closed_form() {
        assert_eq!(arcsine_cdf(0.0).unwrap(), 0.0);
        assert!((arcsine_cdf(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((arcsine_cdf(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((arcsine_cdf(0.25).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(arcsine_cdf(1.5).is_err());
        assert!(arcsine_cdf(-0.1).is_err());
    }

    #[test]
    fn exact_power_laws() {
        let pts: Vec<_> = [2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|&n: &f64| (n, n.powf(-0.5), 0.0))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.exponent_theta - 0.5).abs() < 1e-12);
        assert!(fit.sigma_theta < 1e-12);
        assert!((fit.amplitude_b - 1.0).abs() < 1e-12);

        let pts: Vec<_> = [2.0, 4.0, 8.0, 16.0, 32.0]
            .iter()
            .map(|&n: &f64| (n, 3.0 / n, 0.0))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.exponent_theta - 1.0).abs() < 1e-12);
        assert!((fit.amplitude_b - 3.0).abs() < 1e-12);
        assert!((fit.predict(64.0) - 3.0 / 64.0).abs() < 1e-14);
    }

    #[test]
    fn power_law_input_validation() {
        assert!(fit_power_law(&[(2.0, 0.5, 0.0), (4.0, 0.25, 0.0)]).is_err());
        assert!(fit_power_law(&[(2.0, 0.5, 0.0), (4.0, 0.0, 0.0), (8.0, 0.1, 0.0)]).is_err());
        assert!(fit_power_law(&[(2.0, 0.5, 0.0), (2.0, 0.4, 0.0), (2.0, 0.1, 0.0)]).is_err());
    }
}
