//! Order statistics of iid samples and their Poisson-process limits.
//!
//! The finite-`n` formulas take an arbitrary [`BaseDistribution`]; the V and
//! W chains are the scaling limits of the smallest and largest components of
//! a flat simplex point:
//!
//! * `V_j = X_1 + … + X_j` (rescaled smallest components, `n² μ↓_{n-j+1}`),
//! * `W_j = −log(X_1 + … + X_j)` (rescaled largest components, `n μ↓_j − log n`),
//!
//! with `X_i` iid `Exp(1)`.

use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::random_states::sample_exponential;

/// A continuous law given by its distribution function, density and quantile.
#[derive(Debug, Clone, Copy)]
pub struct BaseDistribution {
    pub cdf: fn(f64) -> f64,
    pub pdf: fn(f64) -> f64,
    pub quantile: fn(f64) -> f64,
}

impl BaseDistribution {
    /// `Exp(1)`.
    pub fn exponential() -> Self {
        Self {
            cdf: |x| if x <= 0.0 { 0.0 } else { -(-x).exp_m1() },
            pdf: |x| if x < 0.0 { 0.0 } else { (-x).exp() },
            quantile: |p| -(-p).ln_1p(),
        }
    }

    /// `Uniform(0, 1)`.
    pub fn uniform() -> Self {
        Self {
            cdf: |x| x.clamp(0.0, 1.0),
            pdf: |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 },
            quantile: |p| p.clamp(0.0, 1.0),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        (self.cdf)(x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        (self.pdf)(x)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        (self.quantile)(p)
    }
}

/// `exp(−e^{−u})`.
pub fn gumbel_cdf(u: f64) -> f64 {
    (-(-u).exp()).exp()
}

/// `1 − e^{−u}` for `u ≥ 0`.
pub fn exponential_cdf(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        -(-u).exp_m1()
    }
}

// p · ln(a) with the convention 0 · ln 0 = 0.
fn log_pow(a: f64, p: usize) -> f64 {
    if p == 0 {
        0.0
    } else {
        p as f64 * a.ln()
    }
}

fn ln_factorial(m: usize) -> f64 {
    ln_gamma(m as f64 + 1.0)
}

fn check_rank(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    Ok(())
}

/// Density of the `k`-th largest of `n` iid draws from `d`:
/// `n! / ((n−k)! (k−1)!) · F^{n−k} f (1−F)^{k−1}`.
pub fn density_order_stat(n: usize, k: usize, d: &BaseDistribution, x: f64) -> Result<f64> {
    check_rank(n, k)?;
    let f = d.pdf(x);
    if f == 0.0 {
        return Ok(0.0);
    }
    let cdf = d.cdf(x);
    let log_coef = ln_factorial(n) - ln_factorial(n - k) - ln_factorial(k - 1);
    Ok((log_coef + log_pow(cdf, n - k) + f.ln() + log_pow(1.0 - cdf, k - 1)).exp())
}

fn is_non_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] >= w[1])
}

fn check_block(n: usize, xs: &[f64]) -> Result<()> {
    if xs.is_empty() || xs.len() > n {
        return Err(Error::InvalidArgument(format!(
            "block of {} order statistics out of {n}",
            xs.len()
        )));
    }
    Ok(())
}

/// Joint density of the `k = xs.len()` largest values `x_1 ≥ … ≥ x_k`;
/// zero off the ordered support.
pub fn joint_density_top(n: usize, d: &BaseDistribution, xs: &[f64]) -> Result<f64> {
    check_block(n, xs)?;
    if !is_non_increasing(xs) {
        return Ok(0.0);
    }
    let k = xs.len();
    let mut log = ln_factorial(n) - ln_factorial(n - k);
    for &x in xs {
        let f = d.pdf(x);
        if f == 0.0 {
            return Ok(0.0);
        }
        log += f.ln();
    }
    log += log_pow(d.cdf(xs[k - 1]), n - k);
    Ok(log.exp())
}

/// Joint density of the `k = xs.len()` smallest values, passed in decreasing
/// order `x_{n−k+1} ≥ … ≥ x_n`.
pub fn joint_density_bottom(n: usize, d: &BaseDistribution, xs: &[f64]) -> Result<f64> {
    check_block(n, xs)?;
    if !is_non_increasing(xs) {
        return Ok(0.0);
    }
    let k = xs.len();
    let mut log = ln_factorial(n) - ln_factorial(n - k);
    for &x in xs {
        let f = d.pdf(x);
        if f == 0.0 {
            return Ok(0.0);
        }
        log += f.ln();
    }
    log += log_pow(1.0 - d.cdf(xs[0]), n - k);
    Ok(log.exp())
}

fn check_step(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: n - 1,
        });
    }
    Ok(())
}

/// `P(X↓_{k+1} ≤ y | X↓_k = x) = (F(min(y, x)) / F(x))^{n−k}`.
pub fn transition_cdf_top(n: usize, k: usize, d: &BaseDistribution, y: f64, x: f64) -> Result<f64> {
    check_step(n, k)?;
    let fx = d.cdf(x);
    if fx <= 0.0 {
        return Err(Error::DegenerateConditioning(x));
    }
    if y >= x {
        return Ok(1.0);
    }
    Ok((d.cdf(y) / fx).powi((n - k) as i32))
}

/// `P(X↓_{n−k} ≤ y | X↓_{n−k+1} = x) = 1 − ((1 − F(max(y, x))) / (1 − F(x)))^{n−k}`.
pub fn transition_cdf_bottom(
    n: usize,
    k: usize,
    d: &BaseDistribution,
    y: f64,
    x: f64,
) -> Result<f64> {
    check_step(n, k)?;
    let sx = 1.0 - d.cdf(x);
    if sx <= 0.0 {
        return Err(Error::DegenerateConditioning(x));
    }
    if y <= x {
        return Ok(0.0);
    }
    Ok(1.0 - ((1.0 - d.cdf(y)) / sx).powi((n - k) as i32))
}

/// Draws `X↓_1, …, X↓_steps` of `n` iid variables by walking the Markov chain
/// of the order statistics: `X↓_1` from `F^n`, then each step inverts
/// [`transition_cdf_top`].
pub fn sample_top_via_kernel<R: Rng + ?Sized>(
    n: usize,
    steps: usize,
    d: &BaseDistribution,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if steps == 0 || steps > n {
        return Err(Error::IndexOutOfRange {
            index: steps,
            max: n,
        });
    }
    let mut out = Vec::with_capacity(steps);
    let mut level = rng.random::<f64>().powf(1.0 / n as f64);
    out.push(d.quantile(level));
    for k in 1..steps {
        let u: f64 = rng.random();
        level *= u.powf(1.0 / (n - k) as f64);
        out.push(d.quantile(level));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ChainKind {
    V,
    W,
}

/// A finite stretch of the V chain (increasing) or W chain (decreasing).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSample {
    kind: ChainKind,
    values: Vec<f64>,
}

impl ChainSample {
    pub fn new(kind: ChainKind, values: Vec<f64>) -> Result<Self> {
        let ok = !values.is_empty()
            && values.iter().all(|v| v.is_finite())
            && match kind {
                ChainKind::V => values[0] > 0.0 && values.windows(2).all(|w| w[0] < w[1]),
                ChainKind::W => values.windows(2).all(|w| w[0] > w[1]),
            };
        if !ok {
            return Err(Error::InvalidChain(match kind {
                ChainKind::V => "V",
                ChainKind::W => "W",
            }));
        }
        Ok(Self { kind, values })
    }

    /// Cumulative sums of the given spacings.
    pub fn v_from_spacings(spacings: &[f64]) -> Result<Self> {
        Self::new(ChainKind::V, cumulative(spacings))
    }

    /// `−log` of the cumulative sums of the given spacings.
    pub fn w_from_spacings(spacings: &[f64]) -> Result<Self> {
        Self::new(
            ChainKind::W,
            cumulative(spacings).into_iter().map(|s| -s.ln()).collect(),
        )
    }

    pub fn kind(&self) -> ChainKind {
        self.kind
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
}

fn cumulative(spacings: &[f64]) -> Vec<f64> {
    spacings
        .iter()
        .scan(0.0, |acc, &s| {
            *acc += s;
            Some(*acc)
        })
        .collect()
}

fn positive_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let x = sample_exponential(rng);
        if x > 0.0 {
            return x;
        }
    }
}

/// First `k` points of a rate-1 Poisson process.
pub fn sample_v_chain<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ChainSample {
    assert!(k >= 1);
    let spacings: Vec<f64> = (0..k).map(|_| positive_exponential(rng)).collect();
    ChainSample::v_from_spacings(&spacings).expect("positive spacings give an increasing chain")
}

pub fn sample_w_chain<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ChainSample {
    assert!(k >= 1);
    let spacings: Vec<f64> = (0..k).map(|_| positive_exponential(rng)).collect();
    ChainSample::w_from_spacings(&spacings).expect("positive spacings give a decreasing chain")
}

/// `exp(−v_k)` on `0 ≤ v_1 ≤ … ≤ v_k`.
pub fn joint_density_v(vs: &[f64]) -> f64 {
    match vs.last() {
        Some(&last) if vs[0] >= 0.0 && vs.windows(2).all(|w| w[0] <= w[1]) => (-last).exp(),
        _ => 0.0,
    }
}

/// `exp(−w_1 − … − w_k − e^{−w_k})` on `w_1 ≥ … ≥ w_k`.
pub fn joint_density_w(ws: &[f64]) -> f64 {
    match ws.last() {
        Some(&last) if is_non_increasing(ws) => {
            let s: f64 = ws.iter().sum();
            (-s - (-last).exp()).exp()
        }
        _ => 0.0,
    }
}

/// Law of the smallest component of a flat point with `n` components.
///
/// `P(min > x) = (1 − n x)^{n−1}` on `[0, 1/n]`, i.e. `n · min ~ Beta(1, n − 1)`.
/// For `n = 1` the single component is 1 and there is no density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinComponentStats {
    pub n: usize,
}

pub fn min_component_stats(n: usize) -> MinComponentStats {
    assert!(n >= 1);
    MinComponentStats { n }
}

impl MinComponentStats {
    /// `n (n − 1) (1 − n x)^{n−2}` on `[0, 1/n]`.
    pub fn density(&self, x: f64) -> f64 {
        let n = self.n as f64;
        if self.n < 2 || !(0.0..=1.0 / n).contains(&x) {
            return 0.0;
        }
        n * (n - 1.0) * (1.0 - n * x).powi(self.n as i32 - 2)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.n as f64;
        if self.n < 2 {
            return if x >= 1.0 { 1.0 } else { 0.0 };
        }
        let x = x.clamp(0.0, 1.0 / n);
        1.0 - (1.0 - n * x).powi(self.n as i32 - 1)
    }

    /// `1 / n²`.
    pub fn mean(&self) -> f64 {
        let n = self.n as f64;
        1.0 / (n * n)
    }

    /// `(n − 1) / (n⁴ (n + 1))`.
    pub fn variance(&self) -> f64 {
        let n = self.n as f64;
        (n - 1.0) / (n.powi(4) * (n + 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_states::RngStream;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        for d in [BaseDistribution::exponential(), BaseDistribution::uniform()] {
            for i in 1..=10 {
                let x = 0.09 * i as f64;
                let h = 1e-5;
                let fd = (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
                assert!(rel_close(fd, d.pdf(x), 1e-6), "x={x}: {fd} vs {}", d.pdf(x));
            }
        }
    }

    #[test]
    fn density_order_stat_examples() {
        let e = BaseDistribution::exponential();
        for x in [0.1, 1.0, 3.0] {
            assert!(rel_close(
                density_order_stat(1, 1, &e, x).unwrap(),
                e.pdf(x),
                1e-14
            ));
        }
        let want = 2.0 * (1.0 - (-1.0f64).exp()) * (-1.0f64).exp();
        assert!(rel_close(
            density_order_stat(2, 1, &e, 1.0).unwrap(),
            want,
            1e-12
        ));
        assert!((want - 0.46510).abs() < 5e-5);
        assert!(density_order_stat(3, 0, &e, 1.0).is_err());
        assert!(density_order_stat(3, 4, &e, 1.0).is_err());
    }

    #[test]
    fn density_order_stat_survives_large_n() {
        let e = BaseDistribution::exponential();
        let n = 5000;
        // The maximum concentrates near log n.
        let v = density_order_stat(n, 1, &e, (n as f64).ln()).unwrap();
        assert!(v.is_finite() && v > 0.3 && v < 0.4, "{v}");
    }

    #[test]
    fn joint_density_top_examples() {
        let e = BaseDistribution::exponential();
        assert_eq!(joint_density_top(2, &e, &[1.0, 2.0]).unwrap(), 0.0);
        let v = joint_density_top(2, &e, &[2.0, 1.0]).unwrap();
        assert!(rel_close(v, 2.0 * (-3.0f64).exp(), 1e-12));
        assert!((v - 0.09957).abs() < 1e-5);
        for d in [e, BaseDistribution::uniform()] {
            for &x in &[0.05, 0.3, 0.7, 0.95] {
                let a = joint_density_top(7, &d, &[x]).unwrap();
                let b = density_order_stat(7, 1, &d, x).unwrap();
                assert!(rel_close(a, b, 1e-12));
            }
        }
    }

    #[test]
    fn joint_density_bottom_examples() {
        let e = BaseDistribution::exponential();
        assert_eq!(joint_density_bottom(3, &e, &[0.1, 0.2]).unwrap(), 0.0);
        let v = joint_density_bottom(3, &e, &[0.5]).unwrap();
        assert!(rel_close(v, 3.0 * (-1.5f64).exp(), 1e-12));
        assert!((v - 0.66939).abs() < 1e-5);
        let xs = [2.0, 1.1, 0.4];
        assert!(rel_close(
            joint_density_bottom(3, &e, &xs).unwrap(),
            joint_density_top(3, &e, &xs).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn transition_cdf_top_examples() {
        let e = BaseDistribution::exponential();
        assert_eq!(transition_cdf_top(2, 1, &e, 1.5, 1.0).unwrap(), 1.0);
        let v = transition_cdf_top(2, 1, &e, 0.5, 1.0).unwrap();
        assert!(rel_close(
            v,
            (1.0 - (-0.5f64).exp()) / (1.0 - (-1.0f64).exp()),
            1e-12
        ));
        assert!((v - 0.62246).abs() < 1e-5);
        assert_eq!(transition_cdf_top(2, 1, &e, -50.0, 1.0).unwrap(), 0.0);
        assert!(matches!(
            transition_cdf_top(2, 1, &e, 0.5, 0.0),
            Err(Error::DegenerateConditioning(_))
        ));
        assert!(transition_cdf_top(2, 2, &e, 0.5, 1.0).is_err());
    }

    #[test]
    fn transition_cdf_bottom_examples() {
        let e = BaseDistribution::exponential();
        assert_eq!(transition_cdf_bottom(2, 1, &e, 0.2, 0.5).unwrap(), 0.0);
        let v = transition_cdf_bottom(2, 1, &e, 1.0, 0.5).unwrap();
        assert!(rel_close(v, 1.0 - (-0.5f64).exp(), 1e-12));
        assert!((v - 0.39347).abs() < 1e-5);
        assert!((transition_cdf_bottom(2, 1, &e, 80.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        let u = BaseDistribution::uniform();
        assert!(transition_cdf_bottom(3, 1, &u, 1.0, 1.0).is_err());
    }

    #[test]
    fn kernel_sampler_inverts_transition_cdf() {
        let d = BaseDistribution::uniform();
        let mut rng = RngStream::new(2, 0).generator();
        let xs = sample_top_via_kernel(10, 10, &d, &mut rng).unwrap();
        assert!(is_non_increasing(&xs));
        assert!(sample_top_via_kernel(10, 11, &d, &mut rng).is_err());
    }

    #[test]
    fn chain_from_stubbed_spacings() {
        let v = ChainSample::v_from_spacings(&[1.0, 0.5]).unwrap();
        assert_eq!(v.values(), &[1.0, 1.5]);
        let w = ChainSample::w_from_spacings(&[1.0, 1.0]).unwrap();
        assert_eq!(w.values()[0], 0.0);
        assert!((w.values()[1] + 2.0f64.ln()).abs() < 1e-15);
        assert!((w.values()[1] + std::f64::consts::LN_2).abs() < 1e-5);
        assert!(ChainSample::v_from_spacings(&[1.0, 0.0]).is_err());
        assert!(ChainSample::new(ChainKind::W, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn sampled_chains_are_monotone() {
        let mut rng = RngStream::new(4, 0).generator();
        for _ in 0..200 {
            let v = sample_v_chain(20, &mut rng);
            assert!(v.values().windows(2).all(|w| w[0] < w[1]));
            let w = sample_w_chain(20, &mut rng);
            assert!(w.values().windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn joint_chain_densities() {
        assert!(rel_close(
            joint_density_v(&[1.0, 2.0]),
            (-2.0f64).exp(),
            1e-15
        ));
        assert!((joint_density_v(&[1.0, 2.0]) - 0.13534).abs() < 1e-5);
        assert_eq!(joint_density_v(&[2.0, 1.0]), 0.0);
        assert_eq!(joint_density_v(&[-0.1, 1.0]), 0.0);
        assert!(rel_close(joint_density_w(&[0.0]), (-1.0f64).exp(), 1e-15));
        assert_eq!(joint_density_w(&[0.0, 1.0]), 0.0);
        assert_eq!(joint_density_w(&[]), 0.0);
    }

    #[test]
    fn min_component_closed_forms() {
        // min(U, 1 − U) is uniform on [0, 1/2].
        let s = min_component_stats(2);
        assert_eq!(s.density(0.0), 2.0);
        assert_eq!(s.density(0.25), 2.0);
        assert_eq!(s.density(0.6), 0.0);
        assert_eq!(s.cdf(0.25), 0.5);
        assert_eq!(s.mean(), 0.25);
        assert!((s.variance() - 1.0 / 48.0).abs() < 1e-15);

        let one = min_component_stats(1);
        assert_eq!((one.mean(), one.variance()), (1.0, 0.0));
        assert_eq!(one.cdf(0.5), 0.0);

        let s = min_component_stats(3);
        assert_eq!(s.density(0.0), 6.0);
        assert_eq!(s.cdf(1.0 / 3.0), 1.0);
    }
}
