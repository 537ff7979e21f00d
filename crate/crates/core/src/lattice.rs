//! Geometry of the hypercubic lattice `Z^d`: sites, edges, polymer and walk
//! configurations, and the surface/span measurements taken on them.
//!
//! The surface is the hyperplane `x_1 = 0` (coordinate index 0 here). The
//! half-space is `x_1 >= 0`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;

/// A lattice point. Ordering is lexicographic with `x_1` compared first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    coords: [i32; MAX_DIM],
    dim: u8,
}

pub fn check_dim(dim: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::Dimension(dim))
    }
}

impl Site {
    pub fn new(coords: &[i32]) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&coords.len()),
            "site dimension out of range"
        );
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Site {
            coords: c,
            dim: coords.len() as u8,
        }
    }

    pub fn origin(dim: usize) -> Self {
        Site {
            coords: [0; MAX_DIM],
            dim: dim as u8,
        }
    }

    /// Unit vector in the `+x_{axis+1}` direction.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut s = Site::origin(dim);
        s.coords[axis] = 1;
        s
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.dim()]
    }

    pub fn coord(&self, axis: usize) -> i32 {
        self.coords[axis]
    }

    /// First coordinate, the distance from the surface.
    pub fn x1(&self) -> i32 {
        self.coords[0]
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Site) -> Site {
        let mut s = *self;
        for i in 0..self.dim() {
            s.coords[i] += other.coords[i];
        }
        s
    }

    pub fn sub(&self, other: &Site) -> Site {
        let mut s = *self;
        for i in 0..self.dim() {
            s.coords[i] -= other.coords[i];
        }
        s
    }

    pub fn scale(&self, k: i32) -> Site {
        let mut s = *self;
        for i in 0..self.dim() {
            s.coords[i] *= k;
        }
        s
    }

    /// Shift along one axis.
    pub fn step(&self, axis: usize, delta: i32) -> Site {
        let mut s = *self;
        s.coords[axis] += delta;
        s
    }

    pub fn is_adjacent(&self, other: &Site) -> bool {
        let l1: i64 = (0..self.dim())
            .map(|i| (self.coords[i] as i64 - other.coords[i] as i64).abs())
            .sum();
        l1 == 1
    }

    /// The `2d` nearest neighbours, in a fixed order (`+x_1, -x_1, +x_2, ...`).
    pub fn neighbours(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.dim()).flat_map(move |a| [self.step(a, 1), self.step(a, -1)])
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for Site {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Site {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<i32> = Vec::deserialize(d)?;
        if !(1..=MAX_DIM).contains(&v.len()) {
            return Err(serde::de::Error::custom("site dimension out of range"));
        }
        Ok(Site::new(&v))
    }
}

/// An undirected nearest-neighbour edge, stored with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    a: Site,
    b: Site,
}

impl Edge {
    pub fn new(u: Site, v: Site) -> Result<Self> {
        if u.dim() != v.dim() || !u.is_adjacent(&v) {
            return Err(Error::InvalidConfiguration(format!(
                "{u:?} and {v:?} are not nearest neighbours"
            )));
        }
        Ok(Self::new_unchecked(u, v))
    }

    pub(crate) fn new_unchecked(u: Site, v: Site) -> Self {
        if u <= v {
            Edge { a: u, b: v }
        } else {
            Edge { a: v, b: u }
        }
    }

    pub fn endpoints(&self) -> (Site, Site) {
        (self.a, self.b)
    }

    pub fn contains(&self, s: &Site) -> bool {
        self.a == *s || self.b == *s
    }

    pub fn other(&self, s: &Site) -> Site {
        if self.a == *s {
            self.b
        } else {
            self.a
        }
    }

    pub fn translate(&self, x: &Site) -> Edge {
        Edge {
            a: self.a.add(x),
            b: self.b.add(x),
        }
    }

    pub fn in_surface(&self) -> bool {
        self.a.x1() == 0 && self.b.x1() == 0
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}-{:?}", self.a, self.b)
    }
}

/// How lattice animals are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AnimalConvention {
    /// Site animals: the edge set is every induced edge (polyominoes in `d = 2`).
    #[default]
    Site,
    /// Connected subgraphs: any connected spanning subset of the induced edges.
    Subgraph,
}

impl AnimalConvention {
    pub fn name(&self) -> &'static str {
        match self {
            AnimalConvention::Site => "site",
            AnimalConvention::Subgraph => "subgraph",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolymerKind {
    Tree,
    Animal(AnimalConvention),
}

/// Anything made of lattice sites that can be measured against the surface.
pub trait Conformation {
    fn dim(&self) -> usize;
    fn site_list(&self) -> Vec<Site>;
    fn num_sites(&self) -> usize;
}

/// A branched polymer: a finite connected subgraph of `L^d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Polymer {
    kind: PolymerKind,
    dim: usize,
    sites: BTreeSet<Site>,
    edges: BTreeSet<Edge>,
}

fn induced_edges(sites: &BTreeSet<Site>) -> BTreeSet<Edge> {
    let mut edges = BTreeSet::new();
    for s in sites {
        for a in 0..s.dim() {
            let t = s.step(a, 1);
            if sites.contains(&t) {
                edges.insert(Edge::new_unchecked(*s, t));
            }
        }
    }
    edges
}

fn connected(sites: &BTreeSet<Site>, edges: &BTreeSet<Edge>) -> bool {
    let Some(&start) = sites.iter().next() else {
        return false;
    };
    let adj = adjacency(edges);
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        if let Some(ns) = adj.get(&s) {
            for n in ns {
                if seen.insert(*n) {
                    queue.push_back(*n);
                }
            }
        }
    }
    seen.len() == sites.len()
}

pub(crate) fn adjacency(edges: &BTreeSet<Edge>) -> BTreeMap<Site, Vec<Site>> {
    let mut adj: BTreeMap<Site, Vec<Site>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.a).or_default().push(e.b);
        adj.entry(e.b).or_default().push(e.a);
    }
    adj
}

impl Polymer {
    /// Builds and validates a polymer.
    pub fn new(
        kind: PolymerKind,
        dim: usize,
        sites: BTreeSet<Site>,
        edges: BTreeSet<Edge>,
    ) -> Result<Self> {
        check_dim(dim)?;
        if sites.is_empty() {
            return Err(Error::EmptySet);
        }
        if sites.iter().any(|s| s.dim() != dim) {
            return Err(Error::InvalidConfiguration("mixed dimensions".into()));
        }
        for e in &edges {
            if !sites.contains(&e.a) || !sites.contains(&e.b) {
                return Err(Error::InvalidConfiguration(format!(
                    "edge {e:?} has an endpoint outside the site set"
                )));
            }
        }
        if !connected(&sites, &edges) {
            return Err(Error::InvalidConfiguration("not connected".into()));
        }
        match kind {
            PolymerKind::Tree if edges.len() + 1 != sites.len() => {
                return Err(Error::InvalidConfiguration(
                    "a tree needs |edges| = |sites| - 1".into(),
                ))
            }
            PolymerKind::Animal(AnimalConvention::Site) if edges != induced_edges(&sites) => {
                return Err(Error::InvalidConfiguration(
                    "a site animal carries every induced edge".into(),
                ))
            }
            _ => {}
        }
        Ok(Polymer {
            kind,
            dim,
            sites,
            edges,
        })
    }

    /// Tree from its edge list; a single site is given by `single`.
    pub fn tree_from_edges(dim: usize, edges: &[(Site, Site)]) -> Result<Self> {
        let mut sites = BTreeSet::new();
        let mut es = BTreeSet::new();
        for (u, v) in edges {
            es.insert(Edge::new(*u, *v)?);
            sites.insert(*u);
            sites.insert(*v);
        }
        Polymer::new(PolymerKind::Tree, dim, sites, es)
    }

    pub fn single(kind: PolymerKind, site: Site) -> Self {
        Polymer {
            kind,
            dim: site.dim(),
            sites: BTreeSet::from([site]),
            edges: BTreeSet::new(),
        }
    }

    /// Site animal on the given sites with all induced edges.
    pub fn site_animal(dim: usize, sites: BTreeSet<Site>) -> Result<Self> {
        let edges = induced_edges(&sites);
        Polymer::new(PolymerKind::Animal(AnimalConvention::Site), dim, sites, edges)
    }

    pub(crate) fn from_parts_unchecked(
        kind: PolymerKind,
        dim: usize,
        sites: BTreeSet<Site>,
        edges: BTreeSet<Edge>,
    ) -> Self {
        Polymer {
            kind,
            dim,
            sites,
            edges,
        }
    }

    pub fn kind(&self) -> PolymerKind {
        self.kind
    }

    pub fn sites(&self) -> &BTreeSet<Site> {
        &self.sites
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, s: &Site) -> bool {
        self.sites.contains(s)
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.sites.len()
    }

    pub fn translate(&self, x: &Site) -> Polymer {
        Polymer {
            kind: self.kind,
            dim: self.dim,
            sites: self.sites.iter().map(|s| s.add(x)).collect(),
            edges: self.edges.iter().map(|e| e.translate(x)).collect(),
        }
    }

    /// Translation placing the lexicographically smallest site at the origin.
    pub fn canonical(&self) -> Polymer {
        let min = *self.sites.iter().next().expect("nonempty");
        self.translate(&min.scale(-1))
    }
}

impl Conformation for Polymer {
    fn dim(&self) -> usize {
        self.dim
    }
    fn site_list(&self) -> Vec<Site> {
        self.sites.iter().copied().collect()
    }
    fn num_sites(&self) -> usize {
        self.sites.len()
    }
}

/// A self-avoiding walk `w(0), ..., w(N)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Walk {
    points: Vec<Site>,
}

impl Walk {
    pub fn new(points: Vec<Site>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::EmptySet);
        };
        check_dim(first.dim())?;
        if points.iter().any(|p| p.dim() != first.dim()) {
            return Err(Error::InvalidConfiguration("mixed dimensions".into()));
        }
        for w in points.windows(2) {
            if !w[0].is_adjacent(&w[1]) {
                return Err(Error::InvalidConfiguration(format!(
                    "{:?} -> {:?} is not a unit step",
                    w[0], w[1]
                )));
            }
        }
        let distinct: BTreeSet<_> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(Error::InvalidConfiguration("walk revisits a site".into()));
        }
        Ok(Walk { points })
    }

    pub(crate) fn new_unchecked(points: Vec<Site>) -> Self {
        Walk { points }
    }

    /// Walk from the origin following unit steps `(axis, +1|-1)`.
    pub fn from_steps(dim: usize, steps: &[(usize, i32)]) -> Result<Self> {
        let mut p = Site::origin(dim);
        let mut pts = vec![p];
        for &(a, s) in steps {
            p = p.step(a, s);
            pts.push(p);
        }
        Walk::new(pts)
    }

    pub fn points(&self) -> &[Site] {
        &self.points
    }

    /// Number of steps `N`.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn start(&self) -> Site {
        self.points[0]
    }

    pub fn end(&self) -> Site {
        *self.points.last().expect("nonempty")
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.points
            .windows(2)
            .map(|w| Edge::new_unchecked(w[0], w[1]))
    }

    pub fn translate(&self, x: &Site) -> Walk {
        Walk {
            points: self.points.iter().map(|p| p.add(x)).collect(),
        }
    }

    /// `w_d(0) < w_d(i) <= w_d(N)` for every `i >= 1`.
    pub fn is_bridge(&self) -> bool {
        let d = self.start().dim() - 1;
        let h0 = self.start().coord(d);
        let hn = self.end().coord(d);
        self.points[1..]
            .iter()
            .all(|p| p.coord(d) > h0 && p.coord(d) <= hn)
    }
}

impl Conformation for Walk {
    fn dim(&self) -> usize {
        self.points[0].dim()
    }
    fn site_list(&self) -> Vec<Site> {
        self.points.clone()
    }
    fn num_sites(&self) -> usize {
        self.points.len()
    }
}

/// Sites lying in the surface `x_1 = 0`.
pub fn surface_sites<C: Conformation + ?Sized>(c: &C) -> BTreeSet<Site> {
    c.site_list().into_iter().filter(|s| s.x1() == 0).collect()
}

/// Contact number: how many sites lie in the surface.
pub fn contacts<C: Conformation + ?Sized>(c: &C) -> usize {
    c.site_list().iter().filter(|s| s.x1() == 0).count()
}

/// Walk edges with both endpoints in the surface.
pub fn surface_edges(w: &Walk) -> BTreeSet<Edge> {
    w.edges().filter(Edge::in_surface).collect()
}

/// Maximal runs of consecutive walk points lying in the surface, as lengths.
pub fn surface_runs(w: &Walk) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut cur = 0;
    for p in w.points() {
        if p.x1() == 0 {
            cur += 1;
        } else if cur > 0 {
            runs.push(cur);
            cur = 0;
        }
    }
    if cur > 0 {
        runs.push(cur);
    }
    runs
}

/// `1 + max |u_1 - v_1|` over pairs of sites.
pub fn span<C: Conformation + ?Sized>(c: &C) -> usize {
    let sites = c.site_list();
    let lo = sites.iter().map(Site::x1).min().expect("nonempty");
    let hi = sites.iter().map(Site::x1).max().expect("nonempty");
    (hi - lo) as usize + 1
}

pub fn in_half_space<C: Conformation + ?Sized>(c: &C) -> bool {
    c.site_list().iter().all(|s| s.x1() >= 0)
}

pub fn lex_smallest_site<'a, I: IntoIterator<Item = &'a Site>>(sites: I) -> Result<Site> {
    sites.into_iter().min().copied().ok_or(Error::EmptySet)
}

/// Connected components of `sites` under `edges`, as site sets.
pub(crate) fn components(sites: &BTreeSet<Site>, edges: &BTreeSet<Edge>) -> Vec<BTreeSet<Site>> {
    let adj = adjacency(edges);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in sites {
        if seen.contains(&s) {
            continue;
        }
        let mut comp = BTreeSet::from([s]);
        seen.insert(s);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for n in adj.get(&x).into_iter().flatten() {
                if sites.contains(n) && seen.insert(*n) {
                    comp.insert(*n);
                    queue.push_back(*n);
                }
            }
        }
        out.push(comp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(c: &[i32]) -> Site {
        Site::new(c)
    }

    #[test]
    fn surface_sites_examples() {
        let o = Site::origin(2);
        let t0 = Polymer::single(PolymerKind::Tree, o);
        assert_eq!(surface_sites(&t0), BTreeSet::from([o]));
        let t1 = Polymer::tree_from_edges(2, &[(o, s(&[1, 0]))]).unwrap();
        assert_eq!(contacts(&t1), 1);
        let t2 = Polymer::tree_from_edges(2, &[(o, s(&[0, 1]))]).unwrap();
        assert_eq!(surface_sites(&t2), BTreeSet::from([o, s(&[0, 1])]));
    }

    #[test]
    fn surface_edges_examples() {
        let w = Walk::from_steps(2, &[(1, 1), (1, 1)]).unwrap();
        assert_eq!(surface_edges(&w).len(), 2);
        let w = Walk::from_steps(2, &[(0, 1)]).unwrap();
        assert!(surface_edges(&w).is_empty());
        let w = Walk::from_steps(2, &[(1, 1), (0, 1)]).unwrap();
        assert_eq!(
            surface_edges(&w),
            BTreeSet::from([Edge::new(s(&[0, 0]), s(&[0, 1])).unwrap()])
        );
    }

    #[test]
    fn run_inequality_holds_per_run_of_length_two() {
        // (0,0)->(1,0)->(1,1)->(0,1)->(0,2): an isolated visit at the start.
        let w = Walk::from_steps(2, &[(0, 1), (1, 1), (0, -1), (1, 1)]).unwrap();
        assert_eq!(contacts(&w), 3);
        assert_eq!(surface_edges(&w).len(), 1);
        assert_eq!(surface_runs(&w), vec![1, 2]);
        for r in surface_runs(&w).into_iter().filter(|&r| r >= 2) {
            assert!(r <= 2 * (r - 1));
        }
    }

    #[test]
    fn span_examples() {
        let o = Site::origin(2);
        assert_eq!(span(&Polymer::single(PolymerKind::Tree, o)), 1);
        let w = Walk::from_steps(2, &[(0, 1); 5]).unwrap();
        assert_eq!(span(&w), 6);
        let t = Polymer::tree_from_edges(2, &[(o, s(&[0, 1])), (s(&[0, 1]), s(&[1, 1]))]).unwrap();
        assert_eq!(span(&t), 2);
    }

    #[test]
    fn translate_examples() {
        let o = Site::origin(2);
        let t = Polymer::single(PolymerKind::Tree, o);
        assert_eq!(t.translate(&Site::origin(2)), t);
        let moved = t.translate(&s(&[3, -1]));
        assert_eq!(moved.sites().iter().next(), Some(&s(&[3, -1])));
    }

    #[test]
    fn lex_smallest_examples() {
        assert_eq!(lex_smallest_site(&[s(&[0, 0])]).unwrap(), s(&[0, 0]));
        assert_eq!(lex_smallest_site(&[s(&[1, 0]), s(&[0, 5])]).unwrap(), s(&[0, 5]));
        assert_eq!(lex_smallest_site(&[s(&[0, 2]), s(&[0, 1])]).unwrap(), s(&[0, 1]));
        assert_eq!(lex_smallest_site(&[]), Err(Error::EmptySet));
    }

    #[test]
    fn half_space_examples() {
        let o = Site::origin(2);
        assert!(in_half_space(&Polymer::single(PolymerKind::Tree, o)));
        let t = Polymer::tree_from_edges(2, &[(o, s(&[-1, 0]))]).unwrap();
        assert!(!in_half_space(&t));
    }

    #[test]
    fn rejects_invalid_polymers() {
        let o = Site::origin(2);
        assert!(Edge::new(o, s(&[1, 1])).is_err());
        let sites = BTreeSet::from([o, s(&[2, 0])]);
        assert!(Polymer::new(PolymerKind::Tree, 2, sites, BTreeSet::new()).is_err());
        // Unit square with three edges is a tree but not a site animal.
        let sq = [o, s(&[0, 1]), s(&[1, 1]), s(&[1, 0])];
        let edges: BTreeSet<_> = sq.windows(2).map(|w| Edge::new(w[0], w[1]).unwrap()).collect();
        let sites: BTreeSet<_> = sq.into_iter().collect();
        assert!(Polymer::new(PolymerKind::Tree, 2, sites.clone(), edges.clone()).is_ok());
        assert!(Polymer::new(
            PolymerKind::Animal(AnimalConvention::Site),
            2,
            sites.clone(),
            edges.clone()
        )
        .is_err());
        assert!(Polymer::new(PolymerKind::Animal(AnimalConvention::Subgraph), 2, sites, edges).is_ok());
        assert!(Walk::new(vec![o, s(&[0, 1]), o]).is_err());
        assert_eq!(check_dim(5), Err(Error::Dimension(5)));
    }

    fn small_tree() -> impl Strategy<Value = Polymer> {
        proptest::collection::vec((0usize..2, prop::bool::ANY, 0usize..8), 0..7).prop_map(|moves| {
            let o = Site::origin(2);
            let mut sites = vec![o];
            let mut edges = Vec::new();
            for (axis, pos, pick) in moves {
                let from = sites[pick % sites.len()];
                let to = from.step(axis, if pos { 1 } else { -1 });
                if !sites.contains(&to) {
                    sites.push(to);
                    edges.push((from, to));
                }
            }
            if edges.is_empty() {
                Polymer::single(PolymerKind::Tree, o)
            } else {
                Polymer::tree_from_edges(2, &edges).unwrap()
            }
        })
    }

    proptest! {
        #[test]
        fn span_is_translation_invariant(t in small_tree(), x in -5i32..5, y in -5i32..5) {
            let v = Site::new(&[x, y]);
            prop_assert_eq!(span(&t), span(&t.translate(&v)));
            let layers: BTreeSet<i32> = t.sites().iter().map(Site::x1).collect();
            prop_assert_eq!(span(&t), layers.len());
            // surface quantities are invariant under shifts inside the surface
            let w = Site::new(&[0, y]);
            prop_assert_eq!(contacts(&t), contacts(&t.translate(&w)));
        }
    }
}
