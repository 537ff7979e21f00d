//! Exhaustive checks that the constructions are injective and satisfy their
//! counting bounds at small sizes.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bridges::{bridge_concat, build_zeta, in_d_class, split_zeta};
use super::concat::{in_lex_star, shift_to_star, tree_concat, tree_concat_inverse};
use super::marks::{attach_marks_tree, detach_marks_tree, enumerate_marked_trees, stars_and_bars_count};
use super::walk_marks::{attach_marks_walk, enumerate_marked_walks};
use super::Inverse;
use crate::enumeration::{
    count, count_single_contact, enumerate, span_threshold, surface_profile, Constraint,
    EnsembleSpec, Model, MultiplicativityReport,
};
use crate::error::Result;
use crate::lattice::{contacts, span, AnimalConvention, Polymer, Site, Walk};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub first: String,
    pub second: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierReport {
    pub map: String,
    pub parameters: String,
    pub domain_size: u64,
    pub image_size: u64,
    pub injective: bool,
    pub checks: Vec<Check>,
    pub witness: Option<Witness>,
    pub passed: bool,
}

impl VerifierReport {
    fn new(map: &str, parameters: String) -> Self {
        VerifierReport {
            map: map.into(),
            parameters,
            domain_size: 0,
            image_size: 0,
            injective: true,
            checks: Vec::new(),
            witness: None,
            passed: true,
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn witness(&mut self, first: impl Debug, second: impl Debug, note: &str) {
        if self.witness.is_none() {
            self.witness = Some(Witness {
                first: format!("{first:?}"),
                second: format!("{second:?}"),
                note: note.into(),
            });
        }
    }

    /// Records image-dedup results for `images[i] = f(domain[i])`.
    fn dedup<D: Debug, I: Hash + Eq + Debug>(&mut self, domain: &[D], images: &[I]) {
        let mut seen: HashMap<&I, usize> = HashMap::with_capacity(images.len());
        for (i, img) in images.iter().enumerate() {
            if let Some(&prev) = seen.get(img) {
                if self.injective {
                    self.injective = false;
                    self.witness(&domain[prev], &domain[i], "same image");
                }
            } else {
                seen.insert(img, i);
            }
        }
        self.domain_size = domain.len() as u64;
        self.image_size = seen.len() as u64;
        self.passed &= self.injective;
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {} [{}] domain={} image={} injective={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.map,
            self.parameters,
            self.domain_size,
            self.image_size,
            self.injective
        )
    }
}

fn trees(dim: usize, n: usize, c: Constraint) -> Result<Vec<Polymer>> {
    Ok(enumerate(&EnsembleSpec::trees(dim, n, c), None)?
        .into_iter()
        .map(|m| m.as_polymer().expect("tree").clone())
        .collect())
}

fn walks(dim: usize, n: usize, c: Constraint) -> Result<Vec<Walk>> {
    Ok(enumerate(&EnsembleSpec::walks(dim, n, c), None)?
        .into_iter()
        .map(|m| m.as_walk().expect("walk").clone())
        .collect())
}

/// Marked half-space trees with `n` sites and `j` marks against the
/// hair-attaching map.
pub fn verify_marks(dim: usize, n: usize, j: u32) -> Result<VerifierReport> {
    let mut r = VerifierReport::new("attach-marks-tree", format!("d={dim} N={n} j={j}"));
    let domain = enumerate_marked_trees(dim, n, j)?;
    let images: Vec<Polymer> = domain
        .par_iter()
        .map(attach_marks_tree)
        .collect::<Result<_>>()?;
    let formula = stars_and_bars_count(j as usize, &surface_profile(&EnsembleSpec::trees(dim, n, Constraint::HalfSpace))?);
    r.check(
        "domain matches stars-and-bars count",
        BigUint::from(domain.len()) == formula,
        format!("{} vs {formula}", domain.len()),
    );
    let o = Site::origin(dim);
    let bad = images
        .iter()
        .position(|t| !t.is_tree() || t.len() != n + j as usize || !t.contains(&o));
    r.check("images are trees through the origin with N+j sites", bad.is_none(), "");
    let back: Vec<Inverse<_>> = images
        .par_iter()
        .map(detach_marks_tree)
        .collect::<Result<_>>()?;
    let miss = back
        .iter()
        .zip(&domain)
        .position(|(b, d)| b != &Inverse::Preimage(d.clone()));
    if let Some(i) = miss {
        r.witness(&domain[i], &back[i], "detach does not invert attach");
    }
    r.check("detach inverts attach", miss.is_none(), "");
    r.dedup(&domain, &images);
    let cap = count(&EnsembleSpec::trees(dim, n + j as usize, Constraint::ContainsOrigin))?;
    r.check(
        "image bounded by (N+j) t_(N+j)",
        BigUint::from(r.image_size) <= cap,
        format!("{} <= {cap}", r.image_size),
    );
    Ok(r)
}

/// All pairs of lex-star trees with `n` and `m` sites.
pub fn verify_concat(dim: usize, n: usize, m: usize) -> Result<VerifierReport> {
    let mut r = VerifierReport::new("tree-concat", format!("d={dim} N={n} M={m}"));
    let left = trees(dim, n, Constraint::LexStar)?;
    let right = trees(dim, m, Constraint::LexStar)?;
    let domain: Vec<(Polymer, Polymer)> = left
        .iter()
        .flat_map(|a| right.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    let images: Vec<Polymer> = domain
        .par_iter()
        .map(|(a, b)| tree_concat(a, b))
        .collect::<Result<_>>()?;
    let bad = images
        .iter()
        .position(|t| !t.is_tree() || !in_lex_star(t) || t.len() != n + m);
    r.check("images are lex-star trees with N+M sites", bad.is_none(), "");
    let nonadd = domain
        .iter()
        .zip(&images)
        .position(|((a, b), t)| contacts(t) != contacts(a) + contacts(b));
    if let Some(i) = nonadd {
        r.witness(&domain[i], &images[i], "surface count not additive");
    }
    r.check("surface counts add", nonadd.is_none(), "");
    let back: Vec<Inverse<(Polymer, Polymer)>> = images
        .par_iter()
        .map(|t| tree_concat_inverse(t, n, m))
        .collect::<Result<_>>()?;
    let miss = back
        .iter()
        .zip(&domain)
        .position(|(b, d)| b != &Inverse::Preimage(d.clone()));
    if let Some(i) = miss {
        r.witness(&domain[i], &back[i], "inverse does not recover the factors");
    }
    r.check("inverse recovers the factors", miss.is_none(), "");
    r.dedup(&domain, &images);
    Ok(r)
}

/// All pairs of bridges with `n` and `m` steps.
pub fn verify_bridge_concat(dim: usize, n: usize, m: usize) -> Result<VerifierReport> {
    let mut r = VerifierReport::new("bridge-concat", format!("d={dim} N={n} M={m}"));
    let left = walks(dim, n, Constraint::Bridge)?;
    let right = walks(dim, m, Constraint::Bridge)?;
    let domain: Vec<(Walk, Walk)> = left
        .iter()
        .flat_map(|a| right.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    let images: Vec<Walk> = domain
        .par_iter()
        .map(|(a, b)| bridge_concat(a, b))
        .collect::<Result<_>>()?;
    let bad = images.iter().position(|w| !w.is_bridge() || w.steps() != n + m);
    r.check("images are (N+M)-step bridges", bad.is_none(), "");
    let layers_ok = domain.iter().zip(&images).all(|((a, _), t)| {
        let lo = a.points().iter().map(Site::x1).min().unwrap();
        let hi = a.points().iter().map(Site::x1).max().unwrap();
        (lo..=hi).all(|j| {
            let c = |w: &Walk| w.points().iter().filter(|p| p.x1() == j).count();
            c(t) >= c(a)
        })
    });
    r.check("layer visits dominate those of the first factor", layers_ok, "");
    r.dedup(&domain, &images);
    Ok(r)
}

/// Every assembly from the classes of `n`-step bridges, for `1 <= k <= k_max`.
pub fn verify_zeta(dim: usize, n: usize, k_max: usize) -> Result<VerifierReport> {
    let mut r = VerifierReport::new("build-zeta", format!("d={dim} n={n} k<={k_max}"));
    let bridges = walks(dim, n, Constraint::Bridge)?;
    let lim = n as i32;
    let class = |j: i32, m: i32| -> Vec<Walk> {
        bridges
            .iter()
            .filter(|w| in_d_class(w, n, j, m))
            .cloned()
            .collect()
    };
    let need = (n as f64).ln().powi(2);
    let mut domain: Vec<(i32, i32, Vec<Walk>, Vec<Walk>)> = Vec::new();
    for j in 0..lim {
        for m in -lim..=lim {
            let a = class(j, m);
            let b = class(-j, -m);
            if a.is_empty() || b.is_empty() {
                continue;
            }
            for k in 1..=k_max {
                for oms in tuples(&a, k) {
                    for ps in tuples(&b, k) {
                        domain.push((j, m, oms.clone(), ps));
                    }
                }
            }
        }
    }
    let images: Vec<Walk> = domain
        .par_iter()
        .map(|(j, m, oms, ps)| build_zeta(oms, ps, n, *j, *m))
        .collect::<Result<_>>()?;
    let mut shape_ok = true;
    let mut split_ok = true;
    for ((j, _, oms, ps), z) in domain.iter().zip(&images) {
        let k = oms.len();
        let len_ok = z.steps() == *j as usize + 1 + 2 * k * n;
        let h_ok = contacts(z) as f64 >= k as f64 * need;
        if !(z.is_bridge() && len_ok && h_ok) && shape_ok {
            shape_ok = false;
            r.witness((j, oms, ps), z, "bad shape or too few contacts");
        }
        let parts = split_zeta(z, n, *j as usize, k)?;
        if (&parts.omegas, &parts.psis) != (oms, ps) && split_ok {
            split_ok = false;
            r.witness((j, oms, ps), &parts, "split does not recover the factors");
        }
    }
    r.check("bridges of length J+1+2kn with |H| >= k ln(n)^2", shape_ok, "");
    r.check("splitting recovers the factors", split_ok, "");
    // distinct (J, k) give distinct lengths or distinct connectors, so dedup
    // over the whole domain is the right notion
    r.dedup(&domain, &images);
    r.check("domain is nonempty", !domain.is_empty(), format!("{} assemblies", domain.len()));
    Ok(r)
}

fn tuples(items: &[Walk], k: usize) -> Vec<Vec<Walk>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                items.iter().map(move |w| {
                    let mut t = t.clone();
                    t.push(w.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Marked half-space walks against the detour map.
pub fn verify_walk_marks(dim: usize, n: usize, j: u32) -> Result<VerifierReport> {
    let mut r = VerifierReport::new("attach-marks-walk", format!("d={dim} N={n} j={j}"));
    let domain = enumerate_marked_walks(dim, n, j)?;
    let images: Vec<Result<Walk>> = domain.par_iter().map(attach_marks_walk).collect();
    let collisions = images.iter().filter(|x| x.is_err()).count();
    if let Some(i) = images.iter().position(|x| x.is_err()) {
        r.witness(&domain[i], &images[i], "connector self-intersects");
    }
    r.check("connector is self-avoiding", collisions == 0, format!("{collisions} collisions"));
    let ok: Vec<(usize, Walk)> = images
        .into_iter()
        .enumerate()
        .filter_map(|(i, w)| w.ok().map(|w| (i, w)))
        .collect();
    let long = ok.iter().find(|(_, w)| w.steps() > n + 2 * j as usize);
    r.check("length at most N+2j", long.is_none(), "");
    let kept: Vec<_> = ok.iter().map(|(i, _)| domain[*i].clone()).collect();
    let imgs: Vec<Walk> = ok.into_iter().map(|(_, w)| w).collect();
    r.dedup(&kept, &imgs);
    r.domain_size = domain.len() as u64;
    let formula = stars_and_bars_count(
        j as usize,
        &crate::enumeration::edge_profile(&EnsembleSpec::walks(dim, n, Constraint::HalfSpace))?,
    );
    r.check(
        "domain matches stars-and-bars count over surface edges",
        BigUint::from(domain.len()) == formula,
        format!("{} vs {formula}", domain.len()),
    );
    Ok(r)
}

/// Translation classes with span at most `max_span` (default: the small-span
/// threshold) moved onto the lex-star set.
pub fn verify_shift(dim: usize, n: usize, max_span: Option<usize>) -> Result<VerifierReport> {
    let cap = max_span.map(|s| s as u64).unwrap_or_else(|| span_threshold(n));
    let mut r = VerifierReport::new("shift-to-star", format!("d={dim} N={n} span<={cap}"));
    let domain: Vec<Polymer> = trees(dim, n, Constraint::TranslationClasses)?
        .into_iter()
        .filter(|t| span(t) as u64 <= cap)
        .collect();
    let outs: Vec<_> = domain
        .par_iter()
        .map(shift_to_star)
        .collect::<Result<_>>()?;
    let need = (n as f64).ln().powi(2);
    let bad = outs
        .iter()
        .position(|o| !in_lex_star(&o.star) || (contacts(&o.star) as f64) < need);
    r.check("outputs are lex-star with |H| >= ln(N)^2", bad.is_none(), "");
    let images: Vec<Polymer> = outs.into_iter().map(|o| o.star).collect();
    r.dedup(&domain, &images);
    Ok(r)
}

/// Counts with exactly one surface site against the half-space count one
/// size smaller.
pub fn verify_single_contact(dim: usize, n_max: usize) -> Result<VerifierReport> {
    let mut r = VerifierReport::new("single-contact", format!("d={dim} 2<=N<={n_max}"));
    for n in 2..=n_max {
        let lhs = count_single_contact(n, dim)?;
        let rhs = count(&EnsembleSpec::trees(dim, n - 1, Constraint::HalfSpace))?;
        r.check(&format!("N={n}"), lhs == rhs, format!("{lhs} = {rhs}"));
        r.domain_size += 1;
    }
    r.image_size = r.domain_size;
    Ok(r)
}

/// Wraps a multiplicativity report so it can be printed alongside the others.
pub fn verify_supermult(
    model: Model,
    convention: AnimalConvention,
    dim: usize,
    limit: usize,
) -> Result<VerifierReport> {
    let rep: MultiplicativityReport =
        crate::enumeration::supermultiplicativity_check(model, convention, dim, limit)?;
    let mut r = VerifierReport::new(
        "multiplicativity",
        format!("model={} d={dim} N+M<={limit}", model.name()),
    );
    for row in &rep.rows {
        r.check(&format!("N={} M={}", row.n, row.m), row.holds, "");
        r.domain_size += 1;
    }
    r.image_size = r.domain_size;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_verifiers_pass() {
        for r in [
            verify_marks(2, 3, 2).unwrap(),
            verify_concat(2, 2, 2).unwrap(),
            verify_bridge_concat(2, 2, 2).unwrap(),
            verify_walk_marks(2, 3, 2).unwrap(),
            verify_shift(2, 5, None).unwrap(),
            verify_single_contact(2, 5).unwrap(),
        ] {
            assert!(r.passed, "{}", serde_json::to_string_pretty(&r).unwrap());
        }
    }

    #[test]
    fn dedup_reports_a_witness() {
        let mut r = VerifierReport::new("x", String::new());
        r.dedup(&[1, 2, 3], &["a", "b", "a"]);
        assert!(!r.injective && !r.passed);
        assert_eq!(r.image_size, 2);
        let w = r.witness.unwrap();
        assert_eq!((w.first.as_str(), w.second.as_str()), ("1", "3"));
    }
}
