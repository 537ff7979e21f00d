//! Spanning structures on a fixed site set: spanning trees (counted with the
//! matrix-tree theorem, listed by combination) and connected spanning
//! subgraphs.

use crate::error::{Error, Result};

/// Edges of the induced graph on `n` vertices, as index pairs `(i, j)`, `i < j`.
pub(crate) type LocalEdges = Vec<(usize, usize)>;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// True when the edges selected by `mask` connect all `n` vertices.
pub(crate) fn mask_connects(n: usize, edges: &LocalEdges, mask: u64) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut comps = n;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        let (a, b) = edges[i];
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps == 1
}

/// Number of spanning trees via Bareiss elimination on a Laplacian minor.
pub(crate) fn spanning_tree_count(n: usize, edges: &LocalEdges) -> Result<u128> {
    if n <= 1 {
        return Ok(1);
    }
    let m = n - 1;
    let mut a = vec![vec![0i128; m]; m];
    for &(u, v) in edges {
        for (x, y) in [(u, v), (v, u)] {
            if x > 0 {
                a[x - 1][x - 1] += 1;
                if y > 0 {
                    a[x - 1][y - 1] -= 1;
                }
            }
        }
    }
    let mut prev = 1i128;
    let mut sign = 1i128;
    for k in 0..m {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..m).find(|&r| a[r][k] != 0) else {
                return Ok(0);
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..m {
            for j in k + 1..m {
                let num = a[i][j]
                    .checked_mul(a[k][k])
                    .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                    .ok_or(Error::Overflow("matrix-tree determinant"))?;
                a[i][j] = num / prev;
            }
        }
        prev = a[k][k];
    }
    let det = sign * a[m - 1][m - 1];
    u128::try_from(det).map_err(|_| Error::Overflow("negative spanning count"))
}

/// Edge masks of spanning trees in increasing mask order.
pub(crate) fn spanning_tree_masks(n: usize, edges: &LocalEdges) -> Vec<u64> {
    assert!(edges.len() < 64, "too many induced edges");
    if n <= 1 {
        return vec![0];
    }
    let k = n - 1;
    let e = edges.len();
    let mut out = Vec::new();
    if k > e {
        return out;
    }
    // Gosper's hack walks masks with k bits set in increasing order.
    let mut mask: u64 = (1u64 << k) - 1;
    let limit = 1u64 << e;
    while mask < limit {
        if mask_connects(n, edges, mask) {
            out.push(mask);
        }
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    out
}

/// Edge masks of connected spanning subgraphs in increasing mask order.
pub(crate) fn connected_subgraph_masks(n: usize, edges: &LocalEdges) -> Vec<u64> {
    assert!(edges.len() < 64, "too many induced edges");
    if n <= 1 {
        return vec![0];
    }
    (0..(1u64 << edges.len()))
        .filter(|&m| m.count_ones() as usize + 1 >= n && mask_connects(n, edges, m))
        .collect()
}
