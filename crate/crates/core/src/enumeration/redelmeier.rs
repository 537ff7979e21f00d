//! Redelmeier's untried-set enumeration of site animals whose lexicographically
//! smallest site is the origin, split into independent subtrees for parallel
//! evaluation.

use rayon::prelude::*;

use super::grid::Grid;

struct Task {
    cells: Vec<usize>,
    untried: Vec<usize>,
    marked: Vec<bool>,
}

struct Search<'g> {
    grid: &'g Grid,
    n: usize,
    origin: usize,
    cells: Vec<usize>,
    marked: Vec<bool>,
}

impl Search<'_> {
    fn grow<F: FnMut(&[usize])>(
        &mut self,
        mut untried: Vec<usize>,
        split: Option<usize>,
        tasks: &mut Vec<Task>,
        visit: &mut F,
    ) {
        while let Some(c) = untried.pop() {
            self.cells.push(c);
            if self.cells.len() == self.n {
                visit(&self.cells);
            } else {
                let mut next = untried.clone();
                let mut added = Vec::new();
                for axis in 0..self.grid.dim {
                    let st = self.grid.stride(axis);
                    for nb in [c + st, c - st] {
                        if nb > self.origin && !self.marked[nb] {
                            self.marked[nb] = true;
                            next.push(nb);
                            added.push(nb);
                        }
                    }
                }
                if split == Some(self.cells.len()) {
                    tasks.push(Task {
                        cells: self.cells.clone(),
                        untried: next,
                        marked: self.marked.clone(),
                    });
                } else {
                    self.grow(next, split, tasks, visit);
                }
                for nb in added {
                    self.marked[nb] = false;
                }
            }
            self.cells.pop();
        }
    }
}

/// Visits every `n`-cell animal (translation class) in `dim` dimensions.
/// Each independent subtree folds into its own accumulator; the returned
/// accumulators are in the canonical serial order regardless of thread count.
pub(crate) fn fold_classes<T, F>(dim: usize, n: usize, init: impl Fn() -> T + Sync, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&Grid, &[usize], &mut T) + Sync,
{
    let grid = Grid::new(dim, n as i32);
    let origin = grid.origin();
    let split = if n > 5 { Some(4) } else { None };
    let mut marked = vec![false; grid.size];
    marked[origin] = true;
    let mut search = Search {
        grid: &grid,
        n,
        origin,
        cells: Vec::with_capacity(n),
        marked,
    };
    let mut tasks = Vec::new();
    let mut head = init();
    search.grow(vec![origin], split, &mut tasks, &mut |cells| f(&grid, cells, &mut head));
    let mut out = vec![head];
    out.extend(
        tasks
            .into_par_iter()
            .map(|task| {
                let mut acc = init();
                let mut s = Search {
                    grid: &grid,
                    n,
                    origin,
                    cells: task.cells,
                    marked: task.marked,
                };
                s.grow(task.untried, None, &mut Vec::new(), &mut |cells| {
                    f(&grid, cells, &mut acc)
                });
                acc
            })
            .collect::<Vec<_>>(),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(dim: usize, n: usize) -> u64 {
        fold_classes(dim, n, || 0u64, |_, _, acc| *acc += 1)
            .into_iter()
            .sum()
    }

    #[test]
    fn fixed_polyomino_counts() {
        let expect = [1, 2, 6, 19, 63, 216, 760, 2725];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(count(2, i + 1), e, "n = {}", i + 1);
        }
    }

    #[test]
    fn fixed_polycube_counts() {
        // fixed polycubes in three dimensions
        for (n, e) in [(1, 1), (2, 3), (3, 15), (4, 86), (5, 534)] {
            assert_eq!(count(3, n), e);
        }
    }
}
