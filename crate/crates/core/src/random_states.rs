//! Samplers for points of the unit simplex.
//!
//! A flat point is `(X_1, …, X_n) / Σ X_i` with `X_i` iid `Exp(1)`; replacing
//! the exponentials by `Gamma(α, 1)` variables gives `Dirichlet(α, …, α)`.
//! Only the diagonal of a pure state is ever sampled, since the majorization
//! criteria depend on nothing else.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorization::ProbVector;

/// Address of an independent random stream: `(master_seed, stream_index)`.
///
/// Identical addresses replay identical sequences; distinct indices under the
/// same seed select disjoint ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Sibling stream under the same master seed.
    pub fn with_index(self, stream_index: u64) -> Self {
        Self {
            stream_index,
            ..self
        }
    }

    pub fn generator(&self) -> StreamRng {
        let mut inner = ChaCha12Rng::seed_from_u64(self.master_seed);
        inner.set_stream(self.stream_index);
        StreamRng(inner)
    }
}

/// The generator behind an [`RngStream`].
#[derive(Debug, Clone)]
pub struct StreamRng(ChaCha12Rng);

impl StreamRng {
    /// Words reserved per substream by [`StreamRng::seek_substream`].
    pub const SUBSTREAM_WORDS: u128 = 1 << 36;

    /// Jumps to the start of substream `j` within the current stream, so that
    /// draws for item `j` do not depend on how much earlier items consumed.
    pub fn seek_substream(&mut self, j: u64) {
        self.0.set_word_pos(j as u128 * Self::SUBSTREAM_WORDS);
    }
}

impl rand::RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Concentration of a symmetric Dirichlet law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletParam(f64);

impl DirichletParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain {
                name: "alpha",
                value: alpha,
            })
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

/// Inverse transform of `Exp(1)`: `−log(1 − u)`.
#[inline]
pub fn exponential_from_uniform(u: f64) -> f64 {
    // 1 − u is exact for the 53-bit uniforms produced by `Rng::random`; libm
    // keeps the logarithm identical across platforms.
    -libm::log(1.0 - u)
}

/// One `Exp(1)` draw from a uniform on `[0, 1)`.
#[inline]
pub fn sample_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    exponential_from_uniform(rng.random::<f64>())
}

pub fn sample_exponentials<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    (0..k).map(|_| sample_exponential(rng)).collect()
}

pub fn sample_uniform_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ProbVector {
    assert!(n >= 1, "simplex dimension must be at least 1");
    normalize(sample_exponentials(n, rng))
}

/// `Dirichlet(α, …, α)` via normalized `Gamma(α, 1)` draws. `α = 1` takes the
/// exponential path, so it replays [`sample_uniform_simplex`] exactly.
pub fn sample_dirichlet<R: Rng + ?Sized>(n: usize, p: DirichletParam, rng: &mut R) -> ProbVector {
    assert!(n >= 1, "simplex dimension must be at least 1");
    if p.alpha() == 1.0 {
        return sample_uniform_simplex(n, rng);
    }
    // rand_distr switches to the boosted Marsaglia-Tsang sampler below shape 1.
    let gamma = Gamma::new(p.alpha(), 1.0).expect("alpha validated positive");
    let mut draws: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
    if draws.iter().all(|&g| g == 0.0) {
        // Every draw underflowed; only reachable for tiny alpha.
        let winner = rng.random_range(0..n);
        draws[winner] = 1.0;
    }
    normalize(draws)
}

/// Which law the experiments draw simplex points from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SimplexSampler {
    Uniform,
    Dirichlet(DirichletParam),
}

impl SimplexSampler {
    /// `alpha = 1` maps to [`SimplexSampler::Uniform`].
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        let p = DirichletParam::new(alpha)?;
        Ok(if p.alpha() == 1.0 {
            Self::Uniform
        } else {
            Self::Dirichlet(p)
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> ProbVector {
        match self {
            Self::Uniform => sample_uniform_simplex(n, rng),
            Self::Dirichlet(p) => sample_dirichlet(n, *p, rng),
        }
    }
}

fn normalize(mut draws: Vec<f64>) -> ProbVector {
    let total: f64 = draws.iter().sum();
    draws.iter_mut().for_each(|x| *x /= total);
    ProbVector::new(draws).expect("normalized draws form a probability vector")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_transform_anchors() {
        assert_eq!(exponential_from_uniform(0.0), 0.0);
        let u = 1.0 - (-1.0f64).exp();
        assert!((exponential_from_uniform(u) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn streams_replay_and_differ() {
        let a = sample_exponentials(16, &mut RngStream::new(7, 0).generator());
        let b = sample_exponentials(16, &mut RngStream::new(7, 0).generator());
        let c = sample_exponentials(16, &mut RngStream::new(7, 1).generator());
        let d = sample_exponentials(16, &mut RngStream::new(8, 0).generator());
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn substreams_are_position_independent() {
        let mut a = RngStream::new(9, 2).generator();
        a.seek_substream(5);
        let x = sample_exponentials(4, &mut a);
        let mut b = RngStream::new(9, 2).generator();
        sample_exponentials(1000, &mut b);
        b.seek_substream(5);
        assert_eq!(x, sample_exponentials(4, &mut b));
        b.seek_substream(6);
        assert_ne!(x, sample_exponentials(4, &mut b));
    }

    #[test]
    fn exponential_mean() {
        let mut rng = RngStream::new(11, 0).generator();
        let n = 100_000;
        let mean = sample_exponentials(n, &mut rng).iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn one_dimensional_simplex_is_a_point() {
        let mut rng = RngStream::new(1, 0).generator();
        assert_eq!(sample_uniform_simplex(1, &mut rng).values(), &[1.0]);
        let p = DirichletParam::new(2.5).unwrap();
        assert_eq!(sample_dirichlet(1, p, &mut rng).values(), &[1.0]);
    }

    #[test]
    fn dirichlet_alpha_one_is_bit_identical_to_uniform() {
        let p = DirichletParam::new(1.0).unwrap();
        for n in [2, 5, 64] {
            let a = sample_dirichlet(n, p, &mut RngStream::new(3, n as u64).generator());
            let b = sample_uniform_simplex(n, &mut RngStream::new(3, n as u64).generator());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dirichlet_param_domain() {
        assert!(DirichletParam::new(0.0).is_err());
        assert!(DirichletParam::new(-1.0).is_err());
        assert!(DirichletParam::new(f64::NAN).is_err());
        assert!(DirichletParam::new(0.3).is_ok());
        assert_eq!(
            SimplexSampler::from_alpha(1.0).unwrap(),
            SimplexSampler::Uniform
        );
    }

    #[test]
    fn small_alpha_samples_are_valid() {
        let p = DirichletParam::new(0.05).unwrap();
        let mut rng = RngStream::new(5, 0).generator();
        for _ in 0..1000 {
            let v = sample_dirichlet(8, p, &mut rng);
            let s: f64 = v.values().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
