//! Scalar input distributions for pulse amplitudes and message values.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DistError {
    #[error("uniform bounds {lo}..{hi} are invalid")]
    BadBounds { lo: f64, hi: f64 },
}

/// Distribution of a bounded non-negative scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
}

impl Dist {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self, DistError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(DistError::BadBounds { lo, hi });
        }
        Ok(Dist::Uniform { lo, hi })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Dist::Constant(v) => v,
            Dist::Uniform { lo, hi } => rng.gen_range(lo..hi),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Dist::Constant(v) => v,
            Dist::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    pub fn mean_square(&self) -> f64 {
        match *self {
            Dist::Constant(v) => v * v,
            Dist::Uniform { lo, hi } => (lo * lo + lo * hi + hi * hi) / 3.0,
        }
    }

    pub fn variance(&self) -> f64 {
        self.mean_square() - self.mean() * self.mean()
    }

    /// E[sqrt(X)]; requires non-negative support.
    pub fn mean_sqrt(&self) -> f64 {
        match *self {
            Dist::Constant(v) => v.sqrt(),
            Dist::Uniform { lo, hi } => {
                (2.0 / 3.0) * (hi.powf(1.5) - lo.powf(1.5)) / (hi - lo)
            }
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Dist::Constant(v) => (v, v),
            Dist::Uniform { lo, hi } => (lo, hi),
        }
    }
}

/// Var(X * sqrt(M)) for independent X, M: E[X^2]E[M] - (E[X] E[sqrt(M)])^2.
pub fn variance_of_product(x: &Dist, m: &Dist) -> f64 {
    x.mean_square() * m.mean() - (x.mean() * m.mean_sqrt()).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn degenerate_product_variance() {
        assert_abs_diff_eq!(
            variance_of_product(&Dist::Constant(3.0), &Dist::Constant(1.0)),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn uniform_variance() {
        let x = Dist::uniform(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(variance_of_product(&x, &Dist::Constant(1.0)), 1.0 / 12.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x.variance(), 1.0 / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn default_product_variance_matches_sampling_oracle() {
        // brute-force oracle over the default amplitude/message distributions
        let x = Dist::uniform(1.0, 10.0).unwrap();
        let m = Dist::uniform(0.1, 1.0).unwrap();
        let closed = variance_of_product(&x, &m);

        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let n = 10_000_000usize;
        let (mut sum, mut sum2) = (0.0f64, 0.0f64);
        for _ in 0..n {
            let v = x.sample(&mut rng) * m.sample(&mut rng).sqrt();
            sum += v;
            sum2 += v * v;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!(
            (var - closed).abs() / closed < 1e-3,
            "oracle {var} vs closed {closed}"
        );
        // frozen value from the same oracle
        assert_abs_diff_eq!(closed, 4.785077083, epsilon = 1e-8);
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(Dist::uniform(1.0, 1.0).is_err());
        assert!(Dist::uniform(2.0, 1.0).is_err());
        assert!(Dist::uniform(f64::NAN, 1.0).is_err());
    }
}
