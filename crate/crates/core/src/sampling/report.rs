//! Evidence tables for the small-span condition `f_N >= N^{-delta}`.

use serde::{Deserialize, Serialize};

use super::{sample_trees_mcmc, sample_walks, Method, SamplerConfig, WalkTarget};
use crate::enumeration::{span_stats, span_threshold, Constraint, EnsembleSpec, Model};
use crate::error::{Error, Result};
use crate::lattice::AnimalConvention;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959963984540054;

/// Wilson score interval for a proportion `p` estimated from `n` effective
/// observations.
pub fn wilson_interval(p: f64, n: f64) -> (f64, f64) {
    if !(n > 0.0) {
        return (0.0, 1.0);
    }
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanSource {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanConditionRow {
    pub n: usize,
    pub threshold: u64,
    pub source: SpanSource,
    pub fraction: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `(delta, N^{-delta}, fraction >= N^{-delta}, ci_low >= N^{-delta})`.
    pub conditions: Vec<(f64, f64, bool, bool)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanConditionReport {
    pub model: Model,
    pub dim: usize,
    pub deltas: Vec<f64>,
    pub rows: Vec<SpanConditionRow>,
    /// Whether the point fractions never decrease along the rows.
    pub nondecreasing: bool,
}

/// Small-span fractions for tree classes or bridges. Sizes up to
/// `exact_max_n` are enumerated; larger sizes are sampled with `seed` and
/// `size` (tours for bridges, chain steps for trees).
#[allow(clippy::too_many_arguments)]
pub fn span_condition_report(
    model: Model,
    convention: AnimalConvention,
    dim: usize,
    n_list: &[usize],
    deltas: &[f64],
    exact_max_n: usize,
    seed: u64,
    size: u64,
    cfg: &SamplerConfig,
) -> Result<SpanConditionReport> {
    let mut rows = Vec::new();
    for &n in n_list {
        let spec = match model {
            Model::Tree => EnsembleSpec::trees(dim, n, Constraint::TranslationClasses),
            Model::Animal => EnsembleSpec::animals(dim, n, Constraint::TranslationClasses, convention),
            Model::Walk => EnsembleSpec::walks(dim, n, Constraint::Bridge),
        };
        let (source, fraction, stderr, ci) = if n <= exact_max_n {
            let f = span_stats(&spec)?.fraction_f64();
            (SpanSource::Exact, f, 0.0, (f, f))
        } else {
            let run = match model {
                Model::Tree => sample_trees_mcmc(dim, n, seed, size, cfg)?,
                Model::Walk => sample_walks(dim, n, Method::Perm, WalkTarget::Bridge, seed, size, cfg)?,
                Model::Animal => {
                    return Err(Error::Sampling(format!(
                        "no sampler for animals; N = {n} exceeds the exact range"
                    )))
                }
            };
            let e = run.estimate("span-fraction", n).expect("span estimate").clone();
            let ci = wilson_interval(e.mean, run.diagnostics.n_eff);
            (SpanSource::Sampled, e.mean, e.stderr, ci)
        };
        let conditions = deltas
            .iter()
            .map(|&d| {
                let bound = (n as f64).powf(-d);
                (d, bound, fraction >= bound, ci.0 >= bound)
            })
            .collect();
        rows.push(SpanConditionRow {
            n,
            threshold: span_threshold(n),
            source,
            fraction,
            stderr,
            ci_low: ci.0,
            ci_high: ci.1,
            conditions,
        });
    }
    let nondecreasing = rows.windows(2).all(|w| w[1].fraction >= w[0].fraction);
    Ok(SpanConditionReport {
        model,
        dim,
        deltas: deltas.to_vec(),
        rows,
        nondecreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_brackets_the_estimate() {
        let (lo, hi) = wilson_interval(0.3, 100.0);
        assert!(lo < 0.3 && 0.3 < hi);
        assert!((lo - 0.2189).abs() < 1e-3 && (hi - 0.3958).abs() < 1e-3);
        assert_eq!(wilson_interval(0.5, 0.0), (0.0, 1.0));
    }

    #[test]
    fn exact_rows_and_delta_zero() {
        let r = span_condition_report(
            Model::Walk,
            AnimalConvention::Site,
            2,
            &[2, 5, 8],
            &[0.0, 1.0],
            10,
            1,
            1000,
            &SamplerConfig::default(),
        )
        .unwrap();
        for row in &r.rows {
            assert_eq!(row.source, SpanSource::Exact);
            let f = span_stats(&EnsembleSpec::walks(2, row.n, Constraint::Bridge)).unwrap();
            assert_eq!(row.fraction, f.fraction_f64());
            // delta = 0 asks for every span to be small
            assert_eq!(row.conditions[0].2, f.below == f.total);
        }
        assert!(r.rows[0].conditions[0].2);
    }

    #[test]
    fn animals_beyond_exact_range_error() {
        let e = span_condition_report(
            Model::Animal,
            AnimalConvention::Site,
            2,
            &[6],
            &[1.0],
            5,
            1,
            1000,
            &SamplerConfig::default(),
        );
        assert!(matches!(e, Err(Error::Sampling(_))));
    }
}
