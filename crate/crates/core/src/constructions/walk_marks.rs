//! Marked half-space walks: marks on surface edges become detours below the
//! surface.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::marks::weak_compositions;
use crate::enumeration::{self, Constraint, EnsembleSpec};
use crate::error::{Error, Result};
use crate::lattice::{in_half_space, surface_edges, Edge, Walk};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MarkedWalk {
    base: Walk,
    marks: BTreeMap<Edge, u32>,
}

impl MarkedWalk {
    pub fn new(base: Walk, marks: BTreeMap<Edge, u32>) -> Result<Self> {
        let surface = surface_edges(&base);
        if let Some(bad) = marks.keys().find(|e| !surface.contains(e)) {
            return Err(Error::InvalidConfiguration(format!(
                "mark on {bad:?}, which is not a surface edge"
            )));
        }
        let marks = surface
            .into_iter()
            .map(|e| (e, marks.get(&e).copied().unwrap_or(0)))
            .collect();
        Ok(MarkedWalk { base, marks })
    }

    pub fn base(&self) -> &Walk {
        &self.base
    }

    pub fn marks(&self) -> &BTreeMap<Edge, u32> {
        &self.marks
    }

    pub fn total_marks(&self) -> u64 {
        self.marks.values().map(|&w| w as u64).sum()
    }

    /// Depth assigned to each step of the base walk.
    pub fn depths(&self) -> Vec<u32> {
        self.base
            .edges()
            .map(|e| self.marks.get(&e).copied().unwrap_or(0))
            .collect()
    }
}

pub fn enumerate_marked_walks(dim: usize, n: usize, j: u32) -> Result<Vec<MarkedWalk>> {
    let walks = enumeration::enumerate(&EnsembleSpec::walks(dim, n, Constraint::HalfSpace), None)?;
    let mut out = Vec::new();
    for m in walks {
        let w = m.as_walk().expect("walk ensemble").clone();
        let surface: Vec<Edge> = surface_edges(&w).into_iter().collect();
        for comp in weak_compositions(j, surface.len()) {
            out.push(MarkedWalk {
                base: w.clone(),
                marks: surface.iter().copied().zip(comp).collect(),
            });
        }
    }
    Ok(out)
}

/// Pushes each marked surface edge down to depth `w(e)`, joining consecutive
/// depths with vertical segments. The result has `N + sum |d_i - d_{i-1}|`
/// steps (with `d_{-1} = d_N = 0`) and is checked for self-avoidance.
pub fn attach_marks_walk(m: &MarkedWalk) -> Result<Walk> {
    let pts = m.base.points();
    if !pts[0].is_origin() || !in_half_space(&m.base) {
        return Err(Error::Precondition(
            "marked walk must start at the origin and stay in the half-space".into(),
        ));
    }
    let depths = m.depths();
    let mut out = Vec::new();
    let mut cur = 0i32;
    let descend = |at: &crate::lattice::Site, from: i32, to: i32, out: &mut Vec<_>| {
        let dir = if to > from { 1 } else { -1 };
        let mut t = from;
        while t != to {
            t += dir;
            out.push(at.step(0, -t));
        }
    };
    out.push(pts[0]);
    for (i, &d) in depths.iter().enumerate() {
        let d = d as i32;
        descend(&pts[i], cur, d, &mut out);
        out.push(pts[i + 1].step(0, -d));
        cur = d;
    }
    descend(pts.last().unwrap(), cur, 0, &mut out);
    Walk::new(out).map_err(|e| Error::InvalidConfiguration(format!("image is not self-avoiding: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Site;

    #[test]
    fn one_marked_edge_makes_a_u_turn() {
        let w = Walk::from_steps(2, &[(1, 1)]).unwrap();
        let e = w.edges().next().unwrap();
        let m = MarkedWalk::new(w, BTreeMap::from([(e, 2)])).unwrap();
        let img = attach_marks_walk(&m).unwrap();
        assert_eq!(img.steps(), 5);
        assert_eq!(img.end(), Site::new(&[0, 1]));
        assert_eq!(img.points()[2], Site::new(&[-2, 0]));
    }

    #[test]
    fn unmarked_walk_is_unchanged() {
        let w = Walk::from_steps(2, &[(1, 1), (0, 1), (1, 1)]).unwrap();
        let m = MarkedWalk::new(w.clone(), BTreeMap::new()).unwrap();
        assert_eq!(attach_marks_walk(&m).unwrap(), w);
    }

    #[test]
    fn step_count_is_total_variation() {
        for mw in enumerate_marked_walks(2, 4, 2).unwrap() {
            let d = mw.depths();
            let mut tv = 0i64;
            let mut prev = 0i64;
            for &x in d.iter().chain(std::iter::once(&0)) {
                tv += (x as i64 - prev).abs();
                prev = x as i64;
            }
            let img = attach_marks_walk(&mw).unwrap();
            assert_eq!(img.steps() as i64, 4 + tv);
        }
    }

    #[test]
    fn off_surface_marks_rejected() {
        let w = Walk::from_steps(2, &[(0, 1)]).unwrap();
        let e = w.edges().next().unwrap();
        assert!(MarkedWalk::new(w, BTreeMap::from([(e, 1)])).is_err());
    }
}
