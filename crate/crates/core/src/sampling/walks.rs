//! Rosenbluth and PERM growth of self-avoiding walks.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{batch_mean, batch_ratio, stream, Diagnostics, Estimate, Method, SampleRun, SamplerConfig};
use crate::enumeration::{span_threshold, Model};
use crate::error::{Error, Result};
use crate::lattice::{check_dim, Site};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkTarget {
    /// All walks from the origin; estimates `c_n` for every `n <= N`.
    Free,
    /// Walks with `x_d > 0` after the first step, post-selected on ending at
    /// their maximal height; estimates `b_N` and the small-span fraction.
    Bridge,
}

impl WalkTarget {
    pub fn name(&self) -> &'static str {
        match self {
            WalkTarget::Free => "free",
            WalkTarget::Bridge => "bridge",
        }
    }
}

#[derive(Default)]
struct Tally {
    tours: u64,
    weight: Vec<f64>,
    weight_sq_end: f64,
    bridge: f64,
    bridge_sq: f64,
    small_span: f64,
    completed: u64,
    bridges: u64,
    pruned: u64,
    enriched: u64,
}

struct Grower<'a> {
    dim: usize,
    n: usize,
    target: WalkTarget,
    perm: Option<&'a super::PermConfig>,
    threshold: u64,
    rng: ChaCha8Rng,
    pts: Vec<Site>,
    occ: HashSet<Site>,
    t: Tally,
}

impl Grower<'_> {
    fn allowed(&self, s: &Site) -> bool {
        !self.occ.contains(s)
            && (self.target == WalkTarget::Free || s.coord(self.dim - 1) > 0)
    }

    fn record(&mut self, w: f64) {
        let len = self.pts.len() - 1;
        self.t.weight[len] += w;
        if len < self.n {
            return;
        }
        self.t.weight_sq_end += w * w;
        self.t.completed += 1;
        if self.target == WalkTarget::Bridge {
            let top = self.dim - 1;
            let h = self.pts[len].coord(top);
            if self.pts.iter().all(|p| p.coord(top) <= h) {
                self.t.bridges += 1;
                self.t.bridge += w;
                self.t.bridge_sq += w * w;
                let lo = self.pts.iter().map(Site::x1).min().unwrap();
                let hi = self.pts.iter().map(Site::x1).max().unwrap();
                if ((hi - lo) as u64 + 1) <= self.threshold {
                    self.t.small_span += w;
                }
            }
        }
    }

    fn grow(&mut self, mut w: f64) {
        self.record(w);
        let len = self.pts.len() - 1;
        if len == self.n {
            return;
        }
        let mut copies = 1;
        if let Some(cfg) = self.perm {
            let est = self.t.weight[len] / self.t.tours as f64;
            if len > 0 && est > 0.0 {
                if w > cfg.enrich_above * est {
                    copies = 2;
                    w /= 2.0;
                    self.t.enriched += 1;
                } else if w < cfg.prune_below * est {
                    if self.rng.gen::<f64>() < cfg.prune_probability {
                        self.t.pruned += 1;
                        return;
                    }
                    w /= 1.0 - cfg.prune_probability;
                }
            }
        }
        for _ in 0..copies {
            let cur = *self.pts.last().unwrap();
            let free: Vec<Site> = cur.neighbours().filter(|s| self.allowed(s)).collect();
            if free.is_empty() {
                continue;
            }
            let next = free[self.rng.gen_range(0..free.len())];
            self.pts.push(next);
            self.occ.insert(next);
            self.grow(w * free.len() as f64);
            self.occ.remove(&next);
            self.pts.pop();
        }
    }
}

/// Grows `size` independent tours split evenly over the configured batches.
pub fn sample_walks(
    dim: usize,
    n: usize,
    method: Method,
    target: WalkTarget,
    seed: u64,
    size: u64,
    cfg: &SamplerConfig,
) -> Result<SampleRun> {
    check_dim(dim)?;
    if n == 0 {
        return Err(Error::Precondition("walk length must be at least 1".into()));
    }
    if method == Method::TreeRegraftMcmc {
        return Err(Error::Precondition("regrafting applies to trees only".into()));
    }
    let batches = cfg.batches.max(1);
    if size < batches as u64 {
        return Err(Error::Precondition(format!("need at least {batches} tours")));
    }
    let per = |b: usize| size / batches as u64 + u64::from((b as u64) < size % batches as u64);
    let tallies: Vec<Tally> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let o = Site::origin(dim);
            let mut g = Grower {
                dim,
                n,
                target,
                perm: (method == Method::Perm).then_some(&cfg.perm),
                threshold: span_threshold(n),
                rng: stream(seed, b as u64),
                pts: vec![o],
                occ: HashSet::from([o]),
                t: Tally {
                    weight: vec![0.0; n + 1],
                    ..Tally::default()
                },
            };
            for _ in 0..per(b) {
                g.t.tours += 1;
                g.grow(1.0);
            }
            g.t
        })
        .collect();

    let mut estimates = Vec::new();
    let per_batch = |f: &dyn Fn(&Tally) -> f64| -> Vec<f64> { tallies.iter().map(f).collect() };
    let total_end: f64 = match target {
        WalkTarget::Free => tallies.iter().map(|t| t.weight[n]).sum(),
        WalkTarget::Bridge => tallies.iter().map(|t| t.bridge).sum(),
    };
    if total_end <= 0.0 {
        return Err(Error::Sampling(format!(
            "no weight survived to length {n} in {size} tours"
        )));
    }
    let (weight_sum, weight_sq) = match target {
        WalkTarget::Free => {
            for len in 1..=n {
                let (mean, stderr) = batch_mean(&per_batch(&|t| t.weight[len] / t.tours as f64));
                estimates.push(Estimate {
                    quantity: "count".into(),
                    n: len,
                    mean,
                    stderr,
                });
            }
            (total_end, tallies.iter().map(|t| t.weight_sq_end).sum::<f64>())
        }
        WalkTarget::Bridge => {
            let (mean, stderr) = batch_mean(&per_batch(&|t| t.bridge / t.tours as f64));
            estimates.push(Estimate {
                quantity: "bridge-count".into(),
                n,
                mean,
                stderr,
            });
            let (mean, stderr) = batch_ratio(&per_batch(&|t| t.small_span), &per_batch(&|t| t.bridge));
            estimates.push(Estimate {
                quantity: "span-fraction".into(),
                n,
                mean,
                stderr,
            });
            (total_end, tallies.iter().map(|t| t.bridge_sq).sum::<f64>())
        }
    };
    let completed: u64 = tallies.iter().map(|t| t.completed).sum();
    let bridges: u64 = tallies.iter().map(|t| t.bridges).sum();
    let diagnostics = Diagnostics {
        n_eff: weight_sum * weight_sum / weight_sq,
        pruned: tallies.iter().map(|t| t.pruned).sum(),
        enriched: tallies.iter().map(|t| t.enriched).sum(),
        post_selected: (target == WalkTarget::Bridge && completed > 0)
            .then(|| bridges as f64 / completed as f64),
        ..Diagnostics::default()
    };
    Ok(SampleRun {
        model: Model::Walk,
        target: target.name().into(),
        dim,
        n,
        method,
        seed,
        size,
        batches,
        estimates,
        diagnostics,
        class_visits: None,
    })
}
