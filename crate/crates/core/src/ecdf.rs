//! Stratum-wise empirical distributions: right-continuous step CDF, the
//! left-continuous generalized inverse (inf-quantile), sample support, and a
//! Gaussian-kernel density estimate used by the analytic variance.
//!
//! The quantile is computed by integer binary search over rank counts, so
//! `quantile(eval(y))` returns a sample value bit-identical to the queried
//! sample point. Self-maps built on top of this are exact.

use crate::error::{Error, Result};

/// Empirical CDF of one stratum: F(y) = #{Y_i <= y} / n.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn fit(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyStratum {
                key: "(ecdf sample)".into(),
            });
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(EmpiricalCdf { sorted })
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    /// Number of sample points <= y.
    pub fn rank_count(&self, y: f64) -> usize {
        self.sorted.partition_point(|&v| v <= y)
    }

    /// F(y), right-continuous and defined on all of R.
    pub fn eval(&self, y: f64) -> f64 {
        self.rank_count(y) as f64 / self.n() as f64
    }

    /// inf{y in sample : F(y) >= u}; u = 0 returns the sample minimum.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::InvalidQuantile { level: u });
        }
        if u == 0.0 {
            return Ok(self.sorted[0]);
        }
        let n = self.n();
        let nf = n as f64;
        // smallest count c in 1..=n with c/n >= u, compared exactly as eval does
        let (mut lo, mut hi) = (1usize, n);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if mid as f64 / nf >= u {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(self.sorted[lo - 1])
    }

    pub fn support(&self) -> Support {
        Support {
            lo: self.sorted[0],
            hi: *self.sorted.last().unwrap(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }
}

/// Sample support [min, max] of a stratum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub fn clamp(&self, y: f64) -> f64 {
        y.clamp(self.lo, self.hi)
    }

    pub fn contains_interior(&self, y: f64) -> bool {
        self.lo < y && y < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Gaussian-kernel density estimate with Silverman's rule-of-thumb bandwidth
/// h = 0.9 * min(sd, iqr/1.349) * n^(-1/5).
#[derive(Debug, Clone)]
pub struct DensityEstimate {
    sample: Vec<f64>,
    bandwidth: f64,
}

impl DensityEstimate {
    pub fn fit(values: &[f64]) -> Result<Self> {
        let cdf = EmpiricalCdf::fit(values)?;
        let sample = cdf.values().to_vec();
        let n = sample.len() as f64;
        let mean = sample.iter().sum::<f64>() / n;
        let sd = if sample.len() > 1 {
            (sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let iqr = cdf.quantile(0.75)? - cdf.quantile(0.25)?;
        let spread = match (sd > 0.0, iqr > 0.0) {
            (true, true) => sd.min(iqr / 1.349),
            (true, false) => sd,
            (false, true) => iqr / 1.349,
            (false, false) => 0.0,
        };
        let bandwidth = if spread > 0.0 {
            0.9 * spread * n.powf(-0.2)
        } else {
            // degenerate sample; keep the estimate well defined
            f64::EPSILON.sqrt()
        };
        Ok(DensityEstimate { sample, bandwidth })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn density_at(&self, y: f64) -> f64 {
        let h = self.bandwidth;
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h);
        let sum: f64 = self
            .sample
            .iter()
            .map(|&v| {
                let z = (y - v) / h;
                (-0.5 * z * z).exp()
            })
            .sum();
        norm * sum / self.sample.len() as f64
    }
}
