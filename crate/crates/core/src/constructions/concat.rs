//! Concatenation of lex-star polymers and the layer shift onto the lex-star set.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::Inverse;
use crate::error::{Error, Result};
use crate::lattice::{
    adjacency, lex_smallest_site, span, surface_sites, AnimalConvention, Conformation, Edge,
    Polymer, PolymerKind, Site,
};

/// `p` contains the origin and the origin is the lexicographically smallest
/// of its surface sites.
pub fn in_lex_star(p: &Polymer) -> bool {
    let o = Site::origin(p.dim());
    p.contains(&o) && surface_sites(p).iter().next() == Some(&o)
}

fn drop_axis(s: &Site, axis: usize) -> Vec<i32> {
    s.coords()
        .iter()
        .enumerate()
        .filter(|&(a, _)| a != axis)
        .map(|(_, &c)| c)
        .collect()
}

/// Smallest `K` such that `psi + (K+1) u_2` is disjoint from `tau` along every
/// `u_2` line: the largest `q_2 - p_2` over pairs on a common line.
fn shift_amount(tau: &Polymer, psi: &Polymer) -> i32 {
    let mut top: BTreeMap<Vec<i32>, i32> = BTreeMap::new();
    for q in tau.sites() {
        let e = top.entry(drop_axis(q, 1)).or_insert(i32::MIN);
        *e = (*e).max(q.coord(1));
    }
    psi.sites()
        .iter()
        .filter_map(|p| top.get(&drop_axis(p, 1)).map(|&t| t - p.coord(1)))
        .max()
        .expect("both polymers contain the origin")
}

fn rebuild(kind: PolymerKind, dim: usize, sites: BTreeSet<Site>, edges: BTreeSet<Edge>) -> Result<Polymer> {
    match kind {
        PolymerKind::Animal(AnimalConvention::Site) => Polymer::site_animal(dim, sites),
        _ => Polymer::new(kind, dim, sites, edges),
    }
}

/// Glues `psi`, lifted by `(K+1) u_2`, onto `tau` through the single bond
/// `(v, v + u_2)`, where `v` is the lexicographically smallest site of
/// `(psi + K u_2) ∩ tau`.
pub fn tree_concat(tau: &Polymer, psi: &Polymer) -> Result<Polymer> {
    let dim = tau.dim();
    if psi.dim() != dim || psi.kind() != tau.kind() {
        return Err(Error::Precondition("operands differ in dimension or kind".into()));
    }
    if !in_lex_star(tau) || !in_lex_star(psi) {
        return Err(Error::Precondition("operands must be lex-star polymers".into()));
    }
    let k = shift_amount(tau, psi);
    let lift_k = Site::unit(dim, 1).scale(k);
    let lift = Site::unit(dim, 1).scale(k + 1);
    let v = psi
        .sites()
        .iter()
        .map(|p| p.add(&lift_k))
        .filter(|p| tau.contains(p))
        .min()
        .ok_or(Error::EmptySet)?;
    let mut sites = tau.sites().clone();
    let mut edges = tau.edges().clone();
    sites.extend(psi.sites().iter().map(|p| p.add(&lift)));
    edges.extend(psi.edges().iter().map(|e| e.translate(&lift)));
    edges.insert(Edge::new_unchecked(v, v.step(1, 1)));
    rebuild(tau.kind(), dim, sites, edges)
}

/// Splits an image of [`tree_concat`] with `n` sites in the first factor back
/// into its factors. Trees only: the cut bond is the unique edge on the path
/// from the origin to the highest site on the `u_2` axis whose removal leaves
/// an `n`-site component at the origin.
pub fn tree_concat_inverse(theta: &Polymer, n: usize, m: usize) -> Result<Inverse<(Polymer, Polymer)>> {
    let dim = theta.dim();
    if !theta.is_tree() || !in_lex_star(theta) {
        return Err(Error::Precondition("expected a lex-star tree".into()));
    }
    if n == 0 || m == 0 || n + m != theta.len() {
        return Err(Error::Precondition("factor sizes do not add up to |theta|".into()));
    }
    let o = Site::origin(dim);
    let top = theta
        .sites()
        .iter()
        .filter(|s| (0..dim).all(|a| a == 1 || s.coord(a) == 0))
        .max_by_key(|s| s.coord(1))
        .copied()
        .expect("origin present");
    let adj = adjacency(theta.edges());
    // path from the origin to `top`
    let mut parent: BTreeMap<Site, Site> = BTreeMap::new();
    let mut queue = VecDeque::from([o]);
    parent.insert(o, o);
    while let Some(x) = queue.pop_front() {
        for y in adj.get(&x).into_iter().flatten() {
            if !parent.contains_key(y) {
                parent.insert(*y, x);
                queue.push_back(*y);
            }
        }
    }
    let mut path = vec![top];
    while *path.last().unwrap() != o {
        let p = parent[path.last().unwrap()];
        path.push(p);
    }
    path.reverse();

    let side = |cut: Edge| -> BTreeSet<Site> {
        let mut seen = BTreeSet::from([o]);
        let mut queue = VecDeque::from([o]);
        while let Some(x) = queue.pop_front() {
            for y in adj.get(&x).into_iter().flatten() {
                if Edge::new_unchecked(x, *y) != cut && seen.insert(*y) {
                    queue.push_back(*y);
                }
            }
        }
        seen
    };
    let cuts: Vec<(Edge, BTreeSet<Site>)> = path
        .windows(2)
        .map(|w| Edge::new_unchecked(w[0], w[1]))
        .map(|e| (e, side(e)))
        .filter(|(_, c)| c.len() == n)
        .collect();
    let (cut, tau_sites) = match cuts.len() {
        0 => return Ok(Inverse::NotInImage("no bond on the axis path leaves the right size".into())),
        1 => cuts.into_iter().next().unwrap(),
        _ => return Ok(Inverse::NotInImage("more than one candidate bond".into())),
    };
    let (a, b) = cut.endpoints();
    if b != a.step(1, 1) {
        return Ok(Inverse::NotInImage("cut bond is not parallel to u_2".into()));
    }
    let split = |keep: &BTreeSet<Site>| -> BTreeSet<Edge> {
        theta
            .edges()
            .iter()
            .filter(|e| keep.contains(&e.endpoints().0) && keep.contains(&e.endpoints().1))
            .copied()
            .collect()
    };
    let rest: BTreeSet<Site> = theta.sites().difference(&tau_sites).copied().collect();
    let tau = Polymer::new(PolymerKind::Tree, dim, tau_sites.clone(), split(&tau_sites))?;
    let raw = Polymer::new(PolymerKind::Tree, dim, rest.clone(), split(&rest))?;
    let Ok(anchor) = lex_smallest_site(surface_sites(&raw).iter()) else {
        return Ok(Inverse::NotInImage("second factor misses the surface".into()));
    };
    let psi = raw.translate(&anchor.scale(-1));
    if !in_lex_star(&tau) || !in_lex_star(&psi) {
        return Ok(Inverse::NotInImage("factors are not lex-star".into()));
    }
    if &tree_concat(&tau, &psi)? != theta {
        return Ok(Inverse::NotInImage("recombining the factors gives a different tree".into()));
    }
    Ok(Inverse::Preimage((tau, psi)))
}

/// Result of moving a translation class onto the lex-star set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftOutcome {
    pub star: Polymer,
    /// Index `j` (counted from the lowest layer) of the layer that was moved
    /// onto the surface.
    pub layer: usize,
    pub contacts: usize,
}

/// Translates `tau` (lex-smallest site at the origin) so that the
/// lex-smallest site of the lowest layer with at least `ln(N)^2` sites lands
/// on the origin.
pub fn shift_to_star(tau: &Polymer) -> Result<ShiftOutcome> {
    let n = tau.len();
    let o = Site::origin(tau.dim());
    if tau.sites().iter().next() != Some(&o) {
        return Err(Error::Precondition(
            "expected a polymer whose lex-smallest site is the origin".into(),
        ));
    }
    let need = (n as f64).ln().powi(2);
    let mut layers: BTreeMap<i32, Vec<Site>> = BTreeMap::new();
    for s in tau.sites() {
        layers.entry(s.x1()).or_default().push(*s);
    }
    let (layer, first) = layers
        .iter()
        .find(|(_, v)| v.len() as f64 >= need)
        .map(|(&x, v)| (x as usize, v[0]))
        .ok_or_else(|| {
            Error::Precondition(format!(
                "no layer holds ln(N)^2 = {need:.3} sites (span {})",
                span(tau)
            ))
        })?;
    let star = tau.translate(&first.scale(-1));
    let contacts = layers[&(layer as i32)].len();
    Ok(ShiftOutcome {
        star,
        layer,
        contacts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{enumerate, Constraint, EnsembleSpec};

    fn s(c: &[i32]) -> Site {
        Site::new(c)
    }

    fn stars(dim: usize, n: usize) -> Vec<Polymer> {
        enumerate(&EnsembleSpec::trees(dim, n, Constraint::LexStar), None)
            .unwrap()
            .into_iter()
            .map(|m| m.as_polymer().unwrap().clone())
            .collect()
    }

    #[test]
    fn single_sites_stack() {
        let o = Site::origin(2);
        let p = Polymer::single(PolymerKind::Tree, o);
        let t = tree_concat(&p, &p).unwrap();
        let expect = Polymer::tree_from_edges(2, &[(o, s(&[0, 1]))]).unwrap();
        assert_eq!(t, expect);
        assert_eq!(
            tree_concat_inverse(&t, 1, 1).unwrap(),
            Inverse::Preimage((p.clone(), p))
        );
    }

    #[test]
    fn two_edges_stack_into_a_path() {
        let e = Polymer::tree_from_edges(2, &[(s(&[0, 0]), s(&[0, 1]))]).unwrap();
        let t = tree_concat(&e, &e).unwrap();
        let pts: Vec<Site> = (0..4).map(|y| s(&[0, y])).collect();
        let edges: Vec<_> = pts.windows(2).map(|w| (w[0], w[1])).collect();
        assert_eq!(t, Polymer::tree_from_edges(2, &edges).unwrap());
        assert_eq!(tree_concat_inverse(&t, 2, 2).unwrap(), Inverse::Preimage((e.clone(), e)));
    }

    #[test]
    fn concat_is_lex_star_and_additive() {
        for a in stars(2, 3) {
            for b in stars(2, 2) {
                let t = tree_concat(&a, &b).unwrap();
                assert!(in_lex_star(&t));
                assert_eq!(t.len(), 5);
                assert_eq!(
                    crate::lattice::contacts(&t),
                    crate::lattice::contacts(&a) + crate::lattice::contacts(&b)
                );
                assert_eq!(tree_concat_inverse(&t, 3, 2).unwrap(), Inverse::Preimage((a.clone(), b.clone())));
            }
        }
    }

    #[test]
    fn inverse_rejects_non_images() {
        // a straight path along u_3 direction is not an image for n = 1 in d = 2:
        // the path (0,0)-(1,0) splits into sizes 1 and 1 but the bond is along u_1
        let t = Polymer::tree_from_edges(2, &[(s(&[0, 0]), s(&[1, 0]))]).unwrap();
        assert!(matches!(tree_concat_inverse(&t, 1, 1).unwrap(), Inverse::NotInImage(_)));
    }

    #[test]
    fn site_animals_concat_is_rebuilt_induced() {
        let a = Polymer::site_animal(2, [s(&[0, 0]), s(&[0, 1])].into()).unwrap();
        let t = tree_concat(&a, &a).unwrap();
        assert_eq!(t.len(), 4);
        assert!(in_lex_star(&t));
    }

    #[test]
    fn shift_example() {
        // horizontal path of 9 sites in the surface plus a vertical stack: the
        // surface layer holds 9 >= ln(9)^2 ~ 4.83 sites
        let pts: Vec<Site> = (0..9).map(|y| s(&[0, y])).collect();
        let edges: Vec<_> = pts.windows(2).map(|w| (w[0], w[1])).collect();
        let tau = Polymer::tree_from_edges(2, &edges).unwrap();
        let out = shift_to_star(&tau).unwrap();
        assert_eq!(out.layer, 0);
        assert!(in_lex_star(&out.star));
        assert_eq!(out.contacts, 9);
    }

    #[test]
    fn shift_picks_lowest_qualifying_layer() {
        // layer 0 has 1 site, layer 1 has 6 sites
        let mut edges = vec![(s(&[0, 0]), s(&[1, 0]))];
        for y in 0..5 {
            edges.push((s(&[1, y]), s(&[1, y + 1])));
        }
        let tau = Polymer::tree_from_edges(2, &edges).unwrap();
        let out = shift_to_star(&tau).unwrap();
        assert_eq!(out.layer, 1);
        assert_eq!(out.star.sites().iter().next(), Some(&s(&[-1, 0])));
        assert!(out.star.contains(&Site::origin(2)));
        assert!(in_lex_star(&out.star));
    }

    #[test]
    fn shift_without_dense_layer_is_an_error() {
        let pts: Vec<Site> = (0..9).map(|x| s(&[x, 0])).collect();
        let edges: Vec<_> = pts.windows(2).map(|w| (w[0], w[1])).collect();
        let tau = Polymer::tree_from_edges(2, &edges).unwrap();
        assert!(shift_to_star(&tau).is_err());
    }
}
