//! Slow reference implementations that share no code with the library.
//!
//! Walks are found by filtering every step sequence. Trees and animals are
//! grown one site at a time from the previous size and deduplicated by
//! translating the lexicographically smallest site to the origin. Every
//! connected graph has a site whose removal leaves it connected, so growth
//! by one site (with any nonempty set of bonds to it) reaches them all.

#![allow(dead_code)]

use std::collections::BTreeSet;

pub type P = [i32; 4];

fn add(p: P, axis: usize, d: i32) -> P {
    let mut q = p;
    q[axis] += d;
    q
}

fn nbrs(p: P, dim: usize) -> Vec<P> {
    (0..dim)
        .flat_map(|a| [add(p, a, 1), add(p, a, -1)])
        .collect()
}

/// Sites and bonds, bonds stored with the smaller endpoint first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Graph {
    pub sites: BTreeSet<P>,
    pub bonds: BTreeSet<(P, P)>,
}

impl Graph {
    fn canonical(&self) -> Graph {
        let m = *self.sites.iter().next().unwrap();
        let sh = |p: &P| [p[0] - m[0], p[1] - m[1], p[2] - m[2], p[3] - m[3]];
        Graph {
            sites: self.sites.iter().map(sh).collect(),
            bonds: self.bonds.iter().map(|(a, b)| (sh(a), sh(b))).collect(),
        }
    }

    pub fn min_x1(&self) -> i32 {
        self.sites.iter().map(|p| p[0]).min().unwrap()
    }

    pub fn layer(&self, x1: i32) -> usize {
        self.sites.iter().filter(|p| p[0] == x1).count()
    }

    pub fn span(&self) -> usize {
        let lo = self.min_x1();
        let hi = self.sites.iter().map(|p| p[0]).max().unwrap();
        (hi - lo) as usize + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Tree,
    SiteAnimal,
    SubgraphAnimal,
}

fn single() -> Graph {
    Graph {
        sites: BTreeSet::from([[0; 4]]),
        bonds: BTreeSet::new(),
    }
}

fn bond(a: P, b: P) -> (P, P) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Translation classes of `n`-site objects.
pub fn classes(kind: Kind, dim: usize, n: usize) -> BTreeSet<Graph> {
    let mut level = BTreeSet::from([single()]);
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for g in &level {
            let fresh: BTreeSet<P> = g
                .sites
                .iter()
                .flat_map(|&p| nbrs(p, dim))
                .filter(|q| !g.sites.contains(q))
                .collect();
            for v in fresh {
                let touching: Vec<P> = nbrs(v, dim)
                    .into_iter()
                    .filter(|q| g.sites.contains(q))
                    .collect();
                let mut sites = g.sites.clone();
                sites.insert(v);
                let choices: Vec<Vec<P>> = match kind {
                    Kind::Tree => touching.iter().map(|&u| vec![u]).collect(),
                    Kind::SiteAnimal => vec![touching.clone()],
                    Kind::SubgraphAnimal => (1u32..1 << touching.len())
                        .map(|mask| {
                            touching
                                .iter()
                                .enumerate()
                                .filter(|(i, _)| mask >> i & 1 == 1)
                                .map(|(_, &u)| u)
                                .collect()
                        })
                        .collect(),
                };
                for c in choices {
                    let mut bonds = g.bonds.clone();
                    bonds.extend(c.iter().map(|&u| bond(u, v)));
                    next.insert(
                        Graph {
                            sites: sites.clone(),
                            bonds,
                        }
                        .canonical(),
                    );
                }
            }
        }
        level = next;
    }
    level
}

/// `left(k)`: half-space objects through the origin with `k` surface sites.
/// The origin must sit in the lowest layer, which becomes the surface.
pub fn half_space_profile(classes: &BTreeSet<Graph>) -> Vec<u64> {
    let mut out = Vec::new();
    for g in classes {
        let k = g.layer(g.min_x1());
        if out.len() <= k {
            out.resize(k + 1, 0);
        }
        out[k] += k as u64;
    }
    out
}

/// Objects through the origin with no confinement, by surface-site count.
pub fn penetrable_profile(classes: &BTreeSet<Graph>) -> Vec<u64> {
    let mut out = Vec::new();
    for g in classes {
        for s in &g.sites {
            let k = g.layer(s[0]);
            if out.len() <= k {
                out.resize(k + 1, 0);
            }
            out[k] += 1;
        }
    }
    out
}

/// Objects through the origin whose origin is the smallest surface site:
/// one per occupied layer.
pub fn lex_star_count(classes: &BTreeSet<Graph>) -> u64 {
    classes.iter().map(|g| g.span() as u64).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkFilter {
    Free,
    HalfSpace,
    Bridge,
}

/// Every self-avoiding `n`-step walk from the origin passing `filter`,
/// found by decoding each of the `(2d)^n` step sequences.
pub fn walks(dim: usize, n: usize, filter: WalkFilter) -> Vec<Vec<P>> {
    let dirs = 2 * dim as u64;
    let total = dirs.pow(n as u32);
    let mut out = Vec::new();
    'seq: for code in 0..total {
        let mut c = code;
        let mut pts = vec![[0i32; 4]];
        for _ in 0..n {
            let s = (c % dirs) as usize;
            c /= dirs;
            let p = add(*pts.last().unwrap(), s / 2, if s % 2 == 0 { 1 } else { -1 });
            if pts.contains(&p) {
                continue 'seq;
            }
            pts.push(p);
        }
        let top = dim - 1;
        let keep = match filter {
            WalkFilter::Free => true,
            WalkFilter::HalfSpace => pts.iter().all(|p| p[0] >= 0),
            WalkFilter::Bridge => {
                let end = pts[n][top];
                pts[1..].iter().all(|p| p[top] > 0 && p[top] <= end)
            }
        };
        if keep {
            out.push(pts);
        }
    }
    out
}

pub fn site_contacts(w: &[P]) -> usize {
    w.iter().filter(|p| p[0] == 0).count()
}

pub fn edge_contacts(w: &[P]) -> usize {
    w.windows(2).filter(|e| e[0][0] == 0 && e[1][0] == 0).count()
}

pub fn histogram(values: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut out = Vec::new();
    for v in values {
        if out.len() <= v {
            out.resize(v + 1, 0);
        }
        out[v] += 1;
    }
    out
}

/// Trims trailing zeros so histograms of different padding compare equal.
pub fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_small_values() {
        assert_eq!(walks(2, 4, WalkFilter::Free).len(), 100);
        let t: Vec<usize> = (1..=5).map(|n| classes(Kind::Tree, 2, n).len()).collect();
        assert_eq!(t, [1, 2, 6, 22, 87]);
        let a: Vec<usize> = (1..=5).map(|n| classes(Kind::SiteAnimal, 2, n).len()).collect();
        assert_eq!(a, [1, 2, 6, 19, 63]);
    }
}
