//! Cut-and-regraft Markov chain on translation classes of lattice trees.
//!
//! A move cuts a uniformly chosen edge, then reattaches the component that
//! does not hold the cut edge's smaller endpoint by a uniformly chosen bond
//! from the other component to a translate of it. The set of reattachments
//! depends only on the two component shapes, so reversing a move sees an
//! option set of the same size and the Hastings ratio is one; it is still
//! computed and applied.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{batch_mean, stream, Diagnostics, Estimate, Method, SampleRun, SamplerConfig};
use crate::enumeration::{self, span_threshold, Constraint, EnsembleSpec, Model};
use crate::error::{Error, Result};
use crate::lattice::{check_dim, components, span, Conformation, Edge, Polymer, PolymerKind, Site};

/// Largest size at which visits are tallied per class.
pub const CLASS_TRACK_MAX: usize = 8;

struct Cut {
    fixed: BTreeSet<Site>,
    moving: BTreeSet<Site>,
}

fn cut(tree: &Polymer, e: &Edge) -> Cut {
    let mut edges = tree.edges().clone();
    edges.remove(e);
    let (a, _) = e.endpoints();
    let mut parts = components(tree.sites(), &edges);
    let i = parts.iter().position(|p| p.contains(&a)).expect("endpoint present");
    let fixed = parts.swap_remove(i);
    Cut {
        fixed,
        moving: parts.pop().expect("two components"),
    }
}

/// `(r, r + delta, shift)`: bond from `r` in the fixed part to the moved
/// part translated by `shift`.
fn options(c: &Cut) -> Vec<(Site, Site, Site)> {
    let mut out = Vec::new();
    for r in &c.fixed {
        for nb in r.neighbours() {
            if c.fixed.contains(&nb) {
                continue;
            }
            for s in &c.moving {
                let x = nb.sub(s);
                if c.moving.iter().all(|m| !c.fixed.contains(&m.add(&x))) {
                    out.push((*r, nb, x));
                }
            }
        }
    }
    out
}

fn regraft(tree: &Polymer, c: &Cut, (r, nb, x): (Site, Site, Site)) -> (Polymer, Edge) {
    let mut sites = c.fixed.clone();
    sites.extend(c.moving.iter().map(|s| s.add(&x)));
    let mut edges = BTreeSet::new();
    for e in tree.edges() {
        let (a, b) = e.endpoints();
        if c.fixed.contains(&a) && c.fixed.contains(&b) {
            edges.insert(*e);
        } else if c.moving.contains(&a) && c.moving.contains(&b) {
            edges.insert(e.translate(&x));
        }
    }
    let bond = Edge::new(r, nb).expect("neighbours");
    edges.insert(bond);
    (
        Polymer::new(PolymerKind::Tree, tree.dim(), sites, edges).expect("regraft keeps a tree"),
        bond,
    )
}

/// Every outcome of cutting edge `edge` of `tree`, as canonical classes with
/// their Hastings acceptance probability.
pub fn regraft_moves(tree: &Polymer, edge: usize) -> Vec<(Polymer, f64)> {
    let e = *tree.edges().iter().nth(edge).expect("edge index");
    let c = cut(tree, &e);
    let opts = options(&c);
    let forward = opts.len() as f64;
    opts.into_iter()
        .map(|o| {
            let (next, bond) = regraft(tree, &c, o);
            let back = options(&cut(&next, &bond)).len() as f64;
            (next.canonical(), (forward / back).min(1.0))
        })
        .collect()
}

fn straight_rod(dim: usize, n: usize) -> Polymer {
    let pts: Vec<Site> = (0..n as i32).map(|y| Site::origin(dim).step(1, y)).collect();
    let edges: Vec<(Site, Site)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
    Polymer::tree_from_edges(dim, &edges).expect("rod")
}

/// Runs one chain of `length` measured steps from a straight rod. Estimates
/// the fraction of classes with small span; tallies class visits for small
/// `n` and flags a suspected reducible chain when some class is never seen.
pub fn sample_trees_mcmc(
    dim: usize,
    n: usize,
    seed: u64,
    length: u64,
    cfg: &SamplerConfig,
) -> Result<SampleRun> {
    check_dim(dim)?;
    if n < 2 {
        return Err(Error::Precondition("the regrafting chain needs N >= 2".into()));
    }
    let batches = cfg.batches.max(1);
    if length < batches as u64 {
        return Err(Error::Precondition(format!("need at least {batches} steps")));
    }
    let mut rng = stream(seed, 0);
    let threshold = span_threshold(n);
    let burn = (length as f64 * cfg.burn_in_fraction) as u64;
    let mut state = straight_rod(dim, n).canonical();
    let mut visits: HashMap<Polymer, u64> = HashMap::new();
    let track = n <= CLASS_TRACK_MAX;
    let mut small = vec![0u64; batches];
    let mut steps = vec![0u64; batches];
    let mut accepted = 0u64;
    for t in 0..burn + length {
        let e = *state
            .edges()
            .iter()
            .nth(rng.gen_range(0..n - 1))
            .expect("n-1 edges");
        let c = cut(&state, &e);
        let opts = options(&c);
        let pick = opts[rng.gen_range(0..opts.len())];
        let (next, bond) = regraft(&state, &c, pick);
        let back = options(&cut(&next, &bond)).len() as f64;
        let ratio = opts.len() as f64 / back;
        if ratio >= 1.0 || rng.gen::<f64>() < ratio {
            accepted += 1;
            state = next.canonical();
        }
        if t >= burn {
            let i = t - burn;
            let b = ((i as u128 * batches as u128) / length as u128) as usize;
            steps[b] += 1;
            small[b] += u64::from(span(&state) as u64 <= threshold);
            if track {
                *visits.entry(state.clone()).or_default() += 1;
            }
        }
    }
    let fractions: Vec<f64> = small
        .iter()
        .zip(&steps)
        .map(|(&s, &k)| s as f64 / k as f64)
        .collect();
    let (mean, stderr) = batch_mean(&fractions);
    let var = mean * (1.0 - mean);
    let n_eff = if stderr > 0.0 {
        var / (stderr * stderr)
    } else {
        length as f64
    };
    let (class_visits, classes_visited, reducibility_suspected) = if track {
        let total = enumeration::count(&EnsembleSpec::trees(dim, n, Constraint::TranslationClasses))?;
        let mut v: Vec<(Polymer, u64)> = visits.into_iter().collect();
        v.sort();
        let seen = v.len() as u64;
        let suspected = num_bigint::BigUint::from(seen) < total;
        (Some(v), Some(seen), Some(suspected))
    } else {
        (None, None, None)
    };
    Ok(SampleRun {
        model: Model::Tree,
        target: "translation-classes".into(),
        dim,
        n,
        method: Method::TreeRegraftMcmc,
        seed,
        size: length,
        batches,
        estimates: vec![Estimate {
            quantity: "span-fraction".into(),
            n,
            mean,
            stderr,
        }],
        diagnostics: Diagnostics {
            n_eff,
            acceptance: Some(accepted as f64 / (burn + length) as f64),
            classes_visited,
            reducibility_suspected,
            ..Diagnostics::default()
        },
        class_visits,
    })
}

/// Exact transition matrix of the chain over all classes of size `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionCheck {
    pub dim: usize,
    pub n: usize,
    pub classes: usize,
    pub max_row_error: f64,
    /// `max |(u P)_i - u_i|` for the uniform vector `u`.
    pub max_stationary_error: f64,
    pub max_asymmetry: f64,
    pub irreducible: bool,
}

pub fn transition_check(dim: usize, n: usize) -> Result<TransitionCheck> {
    check_dim(dim)?;
    if n < 2 {
        return Err(Error::Precondition("the regrafting chain needs N >= 2".into()));
    }
    let classes: Vec<Polymer> = enumeration::enumerate(
        &EnsembleSpec::trees(dim, n, Constraint::TranslationClasses),
        None,
    )?
    .into_iter()
    .map(|m| m.as_polymer().expect("tree").clone())
    .collect();
    let index: HashMap<&Polymer, usize> = classes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let k = classes.len();
    let mut p = vec![vec![0.0f64; k]; k];
    for (i, c) in classes.iter().enumerate() {
        for e in 0..n - 1 {
            let moves = regraft_moves(c, e);
            let w = 1.0 / ((n - 1) as f64 * moves.len() as f64);
            for (next, acc) in moves {
                let j = index[&next];
                p[i][j] += w * acc;
                p[i][i] += w * (1.0 - acc);
            }
        }
    }
    let max_row_error = p
        .iter()
        .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    let u = 1.0 / k as f64;
    let max_stationary_error = (0..k)
        .map(|j| ((0..k).map(|i| u * p[i][j]).sum::<f64>() - u).abs())
        .fold(0.0, f64::max);
    let mut max_asymmetry = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            max_asymmetry = max_asymmetry.max((p[i][j] - p[j][i]).abs());
        }
    }
    let mut seen = vec![false; k];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for j in 0..k {
            if p[i][j] > 0.0 && !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    Ok(TransitionCheck {
        dim,
        n,
        classes: k,
        max_row_error,
        max_stationary_error,
        max_asymmetry,
        irreducible: seen.iter().all(|&s| s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::span_stats;

    #[test]
    fn hastings_ratio_is_one() {
        let rod = straight_rod(2, 5);
        for e in 0..4 {
            assert!(regraft_moves(&rod, e).iter().all(|(_, a)| *a == 1.0));
        }
    }

    #[test]
    fn exact_chain_is_doubly_stochastic_and_irreducible() {
        for n in 2..=5 {
            let c = transition_check(2, n).unwrap();
            assert!(c.max_row_error < 1e-12);
            assert!(c.max_stationary_error < 1e-10);
            assert!(c.max_asymmetry < 1e-12);
            assert!(c.irreducible, "n = {n}");
        }
        assert_eq!(transition_check(2, 4).unwrap().classes, 22);
        assert!(transition_check(3, 4).unwrap().irreducible);
    }

    #[test]
    fn two_site_chain_alternates_directions() {
        let r = sample_trees_mcmc(2, 2, 1, 1000, &SamplerConfig::default()).unwrap();
        assert_eq!(r.diagnostics.classes_visited, Some(2));
        assert_eq!(r.diagnostics.reducibility_suspected, Some(false));
    }

    #[test]
    fn span_fraction_matches_exact_at_seven_sites() {
        let exact = span_stats(&EnsembleSpec::trees(2, 7, Constraint::TranslationClasses))
            .unwrap()
            .fraction_f64();
        let r = sample_trees_mcmc(2, 7, 9, 200_000, &SamplerConfig::default()).unwrap();
        let e = r.estimate("span-fraction", 7).unwrap();
        assert!((e.mean - exact).abs() <= 4.0 * e.stderr, "{e:?} vs {exact}");
    }
}
