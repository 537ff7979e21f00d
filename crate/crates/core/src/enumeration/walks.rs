//! Depth-first enumeration of self-avoiding walks from the origin.

use rayon::prelude::*;

use super::grid::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum WalkKind {
    Free,
    HalfSpace,
    Bridge,
}

/// Measurements of one complete walk handed to the fold.
pub(crate) struct WalkLeaf<'a> {
    pub points: &'a [usize],
    pub contacts: usize,
    pub edge_contacts: usize,
    pub span: usize,
}

struct Dfs<'g> {
    grid: &'g Grid,
    n: usize,
    kind: WalkKind,
    points: Vec<usize>,
    visited: Vec<bool>,
}

impl Dfs<'_> {
    fn allowed(&self, idx: usize) -> bool {
        if self.visited[idx] {
            return false;
        }
        match self.kind {
            WalkKind::Free => true,
            WalkKind::HalfSpace => self.grid.coord(idx, 0) >= 0,
            WalkKind::Bridge => self.grid.coord(idx, self.grid.dim - 1) > 0,
        }
    }

    fn leaf<F: FnMut(&WalkLeaf)>(&self, f: &mut F) {
        let g = self.grid;
        if self.kind == WalkKind::Bridge {
            let top = g.dim - 1;
            let end = g.coord(*self.points.last().unwrap(), top);
            if self.points.iter().any(|&p| g.coord(p, top) > end) {
                return;
            }
        }
        let x1: Vec<i32> = self.points.iter().map(|&p| g.coord(p, 0)).collect();
        let contacts = x1.iter().filter(|&&x| x == 0).count();
        let edge_contacts = x1.windows(2).filter(|w| w[0] == 0 && w[1] == 0).count();
        let lo = *x1.iter().min().unwrap();
        let hi = *x1.iter().max().unwrap();
        f(&WalkLeaf {
            points: &self.points,
            contacts,
            edge_contacts,
            span: (hi - lo) as usize + 1,
        });
    }

    fn run<F: FnMut(&WalkLeaf)>(&mut self, stop_at: usize, prefixes: &mut Vec<Vec<usize>>, f: &mut F) {
        if self.points.len() == self.n + 1 {
            self.leaf(f);
            return;
        }
        if self.points.len() == stop_at {
            prefixes.push(self.points.clone());
            return;
        }
        let cur = *self.points.last().unwrap();
        for axis in 0..self.grid.dim {
            let st = self.grid.stride(axis);
            for nb in [cur + st, cur - st] {
                if self.allowed(nb) {
                    self.visited[nb] = true;
                    self.points.push(nb);
                    self.run(stop_at, prefixes, f);
                    self.points.pop();
                    self.visited[nb] = false;
                }
            }
        }
    }
}

/// Folds over all `n`-step walks of the given kind, in canonical order.
pub(crate) fn fold_walks<T, F>(
    dim: usize,
    n: usize,
    kind: WalkKind,
    init: impl Fn() -> T + Sync,
    f: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(&Grid, &WalkLeaf, &mut T) + Sync,
{
    let grid = Grid::new(dim, n as i32);
    let origin = grid.origin();
    let split_len = if n > 6 { 5 } else { usize::MAX };
    let mut visited = vec![false; grid.size];
    visited[origin] = true;
    let mut dfs = Dfs {
        grid: &grid,
        n,
        kind,
        points: vec![origin],
        visited,
    };
    let mut head = init();
    let mut prefixes = Vec::new();
    dfs.run(split_len, &mut prefixes, &mut |leaf| f(&grid, leaf, &mut head));
    let mut out = vec![head];
    out.extend(
        prefixes
            .into_par_iter()
            .map(|prefix| {
                let mut acc = init();
                let mut visited = vec![false; grid.size];
                for &p in &prefix {
                    visited[p] = true;
                }
                let mut dfs = Dfs {
                    grid: &grid,
                    n,
                    kind,
                    points: prefix,
                    visited,
                };
                dfs.run(usize::MAX, &mut Vec::new(), &mut |leaf| {
                    f(&grid, leaf, &mut acc)
                });
                acc
            })
            .collect::<Vec<_>>(),
    );
    out
}
