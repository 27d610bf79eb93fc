//! Weighted histograms and Pearson correlations of per-eigenstate quantities.

use crate::error::{Error, Result};

/// Density histogram with equal-width bins over `[min, max]` of the data.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.densities.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Probability mass per bin (`density * width`).
    pub fn masses(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .zip(&self.densities)
            .map(|(w, d)| d * (w[1] - w[0]))
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses().iter().sum()
    }

    /// Center of the most populated bin.
    pub fn peak(&self) -> f64 {
        let masses = self.masses();
        let i = masses
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.centers()[i]
    }

    /// Mass in bins whose centers fall inside `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        self.centers()
            .iter()
            .zip(self.masses())
            .filter(|(c, _)| (lo..=hi).contains(*c))
            .map(|(_, m)| m)
            .sum()
    }
}

/// Each sample carries weight `1/weight_total`; with `weight_total` equal to
/// the sample count (`2S + 1` for a full spectrum) the masses sum to one.
/// A degenerate range (all values equal) becomes a single unit-width bin
/// centered on the value.
pub fn histogram(values: &[f64], bins: usize, weight_total: f64) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins < 2 {
        return Err(Error::InvalidArgument(format!("histogram needs at least 2 bins, got {bins}")));
    }
    if weight_total.is_nan() || weight_total <= 0.0 {
        return Err(Error::InvalidArgument("weight total must be positive".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w = 1.0 / weight_total;
    if hi == lo {
        return Ok(Histogram {
            bin_edges: vec![lo - 0.5, lo + 0.5],
            densities: vec![values.len() as f64 * w],
        });
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let i = (((v - lo) / width).floor() as usize).min(bins - 1);
        counts[i] += 1;
    }
    let bin_edges = (0..=bins).map(|i| if i == bins { hi } else { lo + i as f64 * width }).collect();
    let densities = counts.iter().map(|&c| c as f64 * w / width).collect();
    Ok(Histogram { bin_edges, densities })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub first: String,
    pub second: String,
    pub r_p: f64,
    pub samples: usize,
}

/// Pearson product-moment correlation coefficient.
pub fn pearson(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    if u.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: u.len() });
    }
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let (mut suv, mut suu, mut svv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        let (da, db) = (a - mu, b - mv);
        suv += da * db;
        suu += da * da;
        svv += db * db;
    }
    if suu == 0.0 {
        return Err(Error::UndefinedCorrelation("first variable"));
    }
    if svv == 0.0 {
        return Err(Error::UndefinedCorrelation("second variable"));
    }
    Ok((suv / (suu * svv).sqrt()).clamp(-1.0, 1.0))
}

pub fn correlate(first: &str, u: &[f64], second: &str, v: &[f64]) -> Result<CorrelationReport> {
    Ok(CorrelationReport {
        first: first.to_owned(),
        second: second.to_owned(),
        r_p: pearson(u, v)?,
        samples: u.len(),
    })
}

/// One system size worth of `(chi, gamma, cbar)` samples.
#[derive(Clone, Debug)]
pub struct SizeSamples {
    pub spin: f64,
    pub chi: Vec<f64>,
    pub gamma: Vec<f64>,
    pub cbar: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub spin: f64,
    pub chi_gamma: CorrelationReport,
    pub chi_cbar: CorrelationReport,
}

/// `r_p(chi, gamma)` and `r_p(chi, cbar)` per system size.
pub fn correlation_sweep(sizes: &[SizeSamples]) -> Result<Vec<SweepRow>> {
    if sizes.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: sizes.len(),
        });
    }
    sizes
        .iter()
        .map(|s| {
            Ok(SweepRow {
                spin: s.spin,
                chi_gamma: correlate("chi", &s.chi, "gamma", &s.gamma)?,
                chi_cbar: correlate("chi", &s.chi, "cbar", &s.cbar)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_values_single_bin() {
        let h = histogram(&[0.3; 5], 10, 5.0).unwrap();
        assert_eq!(h.bins(), 1);
        assert!((h.total_mass() - 1.0).abs() < 1e-12);
        assert!((h.peak() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn symmetric_two_bar() {
        let h = histogram(&[-1.0, 1.0, -1.0, 1.0], 2, 4.0).unwrap();
        assert_eq!(h.densities, vec![0.5, 0.5]);
        assert_eq!(h.bin_edges, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn histogram_errors() {
        assert!(matches!(histogram(&[], 4, 1.0), Err(Error::EmptyInput)));
        assert!(histogram(&[1.0], 1, 1.0).is_err());
    }

    #[test]
    fn pearson_affine_cases() {
        let u: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let v: Vec<f64> = u.iter().map(|x| 2.0 * x + 3.0).collect();
        assert!((pearson(&u, &v).unwrap() - 1.0).abs() < 1e-12);
        let w: Vec<f64> = u.iter().map(|x| -x).collect();
        assert!((pearson(&u, &w).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_zero_variance_is_error() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn sweep_counts() {
        let mk = |s: f64| SizeSamples {
            spin: s,
            chi: vec![-1.0, 0.0, 1.0, 0.5],
            gamma: vec![0.0, 0.1, 0.3, 0.2],
            cbar: vec![0.01, 0.4, 0.9, 0.7],
        };
        let rows = correlation_sweep(&[mk(50.0), mk(100.0), mk(150.0)]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(correlation_sweep(&[mk(50.0)]).is_err());
    }

    proptest! {
        #[test]
        fn pearson_is_symmetric_and_affine_invariant(
            pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..40),
            a in 0.1f64..5.0, b in -3.0f64..3.0, c in 0.1f64..5.0, d in -3.0f64..3.0,
        ) {
            let u: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let v: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            if let (Ok(r), Ok(r2)) = (pearson(&u, &v), pearson(&v, &u)) {
                prop_assert!((r - r2).abs() < 1e-12);
                let us: Vec<f64> = u.iter().map(|x| a * x + b).collect();
                let vs: Vec<f64> = v.iter().map(|x| c * x + d).collect();
                let r3 = pearson(&us, &vs).unwrap();
                prop_assert!((r - r3).abs() < 1e-9);
                prop_assert!(r.abs() <= 1.0);
            }
        }

        #[test]
        fn histogram_conserves_mass(values in prop::collection::vec(-5.0f64..5.0, 1..200), bins in 2usize..60) {
            let h = histogram(&values, bins, values.len() as f64).unwrap();
            prop_assert!((h.total_mass() - 1.0).abs() < 1e-12);
            prop_assert!(h.bin_edges.windows(2).all(|w| w[1] > w[0]));
            prop_assert!(h.densities.iter().all(|&d| d >= 0.0));
        }
    }
}
