//! Marked half-space trees and the hair-attaching map into unrestricted trees.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::Inverse;
use crate::enumeration::{self, Constraint, EnsembleSpec, SurfaceProfile};
use crate::error::{Error, Result};
use crate::lattice::{
    components, in_half_space, surface_sites, Conformation, Edge, Polymer, PolymerKind, Site,
};

/// A half-space polymer containing the origin with a nonnegative mark count on
/// every surface site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MarkedPolymer {
    base: Polymer,
    marks: BTreeMap<Site, u32>,
}

impl MarkedPolymer {
    /// Missing surface sites get zero marks; marks off the surface are rejected.
    pub fn new(base: Polymer, marks: BTreeMap<Site, u32>) -> Result<Self> {
        let surface = surface_sites(&base);
        if let Some(bad) = marks.keys().find(|s| !surface.contains(s)) {
            return Err(Error::InvalidConfiguration(format!(
                "mark on {bad:?}, which is not a surface site"
            )));
        }
        let marks = surface
            .into_iter()
            .map(|s| (s, marks.get(&s).copied().unwrap_or(0)))
            .collect();
        Ok(MarkedPolymer { base, marks })
    }

    pub fn base(&self) -> &Polymer {
        &self.base
    }

    pub fn marks(&self) -> &BTreeMap<Site, u32> {
        &self.marks
    }

    pub fn total_marks(&self) -> u64 {
        self.marks.values().map(|&w| w as u64).sum()
    }
}

/// `C(k + j - 1, j)`: ways to put `j` identical marks on `k` distinct items.
pub fn multichoose(k: usize, j: usize) -> BigUint {
    if k == 0 {
        return if j == 0 { BigUint::one() } else { BigUint::zero() };
    }
    num_integer::binomial(BigUint::from(k + j - 1), BigUint::from(j))
}

/// `sum_k C(k + j - 1, j) * profile[k]`: the number of ways to distribute `j`
/// marks over the surface items of every ensemble member.
pub fn stars_and_bars_count(j: usize, profile: &SurfaceProfile) -> BigUint {
    profile
        .counts
        .iter()
        .enumerate()
        .map(|(k, c)| multichoose(k, j) * c)
        .sum()
}

/// All weak compositions of `total` into `parts` nonnegative parts, in
/// lexicographic order.
pub fn weak_compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(total: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            cur.push(total);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 0..=total {
            cur.push(first);
            rec(total - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Every marked tree with `n` sites and `j` marks, in canonical order.
pub fn enumerate_marked_trees(dim: usize, n: usize, j: u32) -> Result<Vec<MarkedPolymer>> {
    let trees = enumeration::enumerate(&EnsembleSpec::trees(dim, n, Constraint::HalfSpace), None)?;
    let mut out = Vec::new();
    for m in trees {
        let tree = m.as_polymer().expect("tree ensemble").clone();
        let surface: Vec<Site> = surface_sites(&tree).into_iter().collect();
        for comp in weak_compositions(j, surface.len()) {
            let marks = surface.iter().copied().zip(comp).collect();
            out.push(MarkedPolymer {
                base: tree.clone(),
                marks,
            });
        }
    }
    Ok(out)
}

/// Hangs a straight segment of length `w(v)` in the `-x_1` direction from every
/// marked surface site `v`.
pub fn attach_marks_tree(m: &MarkedPolymer) -> Result<Polymer> {
    let base = &m.base;
    if base.kind() != PolymerKind::Tree {
        return Err(Error::Precondition("marked base must be a tree".into()));
    }
    if !in_half_space(base) || !base.contains(&Site::origin(base.dim())) {
        return Err(Error::Precondition(
            "marked base must lie in the half-space and contain the origin".into(),
        ));
    }
    let mut sites = base.sites().clone();
    let mut edges = base.edges().clone();
    for (&v, &w) in &m.marks {
        let mut prev = v;
        for i in 1..=w as i32 {
            let next = v.step(0, -i);
            sites.insert(next);
            edges.insert(Edge::new_unchecked(prev, next));
            prev = next;
        }
    }
    Polymer::new(PolymerKind::Tree, base.dim(), sites, edges)
}

/// Recovers the marked tree from an image of [`attach_marks_tree`].
pub fn detach_marks_tree(t: &Polymer) -> Result<Inverse<MarkedPolymer>> {
    let dim = t.dim();
    if !t.is_tree() || !t.contains(&Site::origin(dim)) {
        return Err(Error::Precondition("expected a tree containing the origin".into()));
    }
    let pos_sites: BTreeSet<Site> = t.sites().iter().filter(|s| s.x1() >= 0).copied().collect();
    let pos_edges: BTreeSet<Edge> = t
        .edges()
        .iter()
        .filter(|e| {
            let (a, b) = e.endpoints();
            a.x1() >= 0 && b.x1() >= 0
        })
        .copied()
        .collect();
    if components(&pos_sites, &pos_edges).len() != 1 {
        return Ok(Inverse::NotInImage(
            "the half-space part is disconnected".into(),
        ));
    }
    let mut depth: BTreeMap<Site, u32> = BTreeMap::new();
    for s in t.sites().iter().filter(|s| s.x1() < 0) {
        let root = s.step(0, -s.x1());
        if !pos_sites.contains(&root) {
            return Ok(Inverse::NotInImage(format!(
                "{s:?} hangs below {root:?}, which is not a site"
            )));
        }
        *depth.entry(root).or_default() += 1;
    }
    let mut hair_edges = BTreeSet::new();
    for (&root, &w) in &depth {
        let mut prev = root;
        for i in 1..=w as i32 {
            let next = root.step(0, -i);
            if !t.contains(&next) {
                return Ok(Inverse::NotInImage(format!("gap in the segment below {root:?}")));
            }
            hair_edges.insert(Edge::new_unchecked(prev, next));
            prev = next;
        }
    }
    let neg_edges: BTreeSet<Edge> = t.edges().difference(&pos_edges).copied().collect();
    if neg_edges != hair_edges {
        return Ok(Inverse::NotInImage(
            "edges outside the half-space are not straight segments".into(),
        ));
    }
    let base = Polymer::new(PolymerKind::Tree, dim, pos_sites, pos_edges)?;
    Ok(Inverse::Preimage(MarkedPolymer::new(base, depth)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::surface_profile;

    fn s(c: &[i32]) -> Site {
        Site::new(c)
    }

    #[test]
    fn stars_and_bars_examples() {
        for j in 0..5 {
            let p = surface_profile(&EnsembleSpec::trees(2, 1, Constraint::HalfSpace)).unwrap();
            assert_eq!(stars_and_bars_count(j, &p), BigUint::one());
        }
        let p = surface_profile(&EnsembleSpec::trees(2, 2, Constraint::HalfSpace)).unwrap();
        assert_eq!(stars_and_bars_count(1, &p), BigUint::from(5u8));
    }

    #[test]
    fn multichoose_dominates_power_over_factorial() {
        // k^j / j! <= C(k+j-1, j), compared as k^j <= j! C(k+j-1, j)
        for k in 1..=10usize {
            for j in 0..=10usize {
                let lhs = BigUint::from(k).pow(j as u32);
                let fact: BigUint = (1..=j).map(BigUint::from).product();
                assert!(lhs <= fact * multichoose(k, j), "k={k} j={j}");
            }
        }
    }

    #[test]
    fn compositions_count() {
        assert_eq!(weak_compositions(3, 2).len(), 4);
        assert_eq!(weak_compositions(0, 0).len(), 1);
        assert!(weak_compositions(2, 0).is_empty());
        assert_eq!(weak_compositions(2, 3).len(), 6);
    }

    #[test]
    fn single_site_with_marks_becomes_a_path() {
        let o = Site::origin(2);
        let base = Polymer::single(PolymerKind::Tree, o);
        let m = MarkedPolymer::new(base.clone(), BTreeMap::from([(o, 3)])).unwrap();
        let t = attach_marks_tree(&m).unwrap();
        let expect: BTreeSet<Site> = (0..=3).map(|i| s(&[-i, 0])).collect();
        assert_eq!(t.sites(), &expect);
        assert_eq!(detach_marks_tree(&t).unwrap(), Inverse::Preimage(m));
    }

    #[test]
    fn detach_rejects_stray_sites() {
        // origin - (0,1) - ... with a branch reaching (-1,5) that is not a segment
        let pts: Vec<Site> = (0..=5).map(|y| s(&[0, y])).collect();
        let mut edges: Vec<(Site, Site)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
        edges.push((s(&[0, 5]), s(&[-1, 5])));
        edges.push((s(&[-1, 5]), s(&[-1, 6])));
        let t = Polymer::tree_from_edges(2, &edges).unwrap();
        assert!(matches!(detach_marks_tree(&t).unwrap(), Inverse::NotInImage(_)));
        // disconnected half-space part
        let edges = [
            (s(&[0, 0]), s(&[-1, 0])),
            (s(&[-1, 0]), s(&[-1, 1])),
            (s(&[-1, 1]), s(&[0, 1])),
        ];
        let t = Polymer::tree_from_edges(2, &edges).unwrap();
        assert!(matches!(detach_marks_tree(&t).unwrap(), Inverse::NotInImage(_)));
    }

    #[test]
    fn attach_rejects_bad_bases() {
        let o = Site::origin(2);
        let t = Polymer::tree_from_edges(2, &[(o, s(&[-1, 0]))]).unwrap();
        let m = MarkedPolymer::new(t, BTreeMap::new()).unwrap();
        assert!(attach_marks_tree(&m).is_err());
        let t = Polymer::tree_from_edges(2, &[(o, s(&[1, 0]))]).unwrap();
        assert!(MarkedPolymer::new(t, BTreeMap::from([(s(&[1, 0]), 1)])).is_err());
    }
}
