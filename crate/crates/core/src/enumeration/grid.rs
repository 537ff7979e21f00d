use crate::lattice::{Site, MAX_DIM};

/// Packed box `[-off, off]^d` whose index order coincides with the
/// lexicographic order on sites (`x_1` most significant).
#[derive(Clone, Debug)]
pub(crate) struct Grid {
    pub dim: usize,
    pub off: i32,
    width: i64,
    strides: [usize; MAX_DIM],
    pub size: usize,
}

impl Grid {
    pub fn new(dim: usize, off: i32) -> Self {
        let width = 2 * off as i64 + 1;
        let mut strides = [0usize; MAX_DIM];
        let mut s = 1usize;
        for axis in (0..dim).rev() {
            strides[axis] = s;
            s *= width as usize;
        }
        Grid {
            dim,
            off,
            width,
            strides,
            size: s,
        }
    }

    pub fn origin(&self) -> usize {
        (0..self.dim).map(|a| self.off as usize * self.strides[a]).sum()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn coord(&self, idx: usize, axis: usize) -> i32 {
        ((idx / self.strides[axis]) as i64 % self.width) as i32 - self.off
    }

    pub fn site(&self, idx: usize) -> Site {
        let c: Vec<i32> = (0..self.dim).map(|a| self.coord(idx, a)).collect();
        Site::new(&c)
    }
}
