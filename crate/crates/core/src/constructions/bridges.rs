//! Bridge concatenation and the multi-bridge assembly used to compare
//! half-space walks with bridges.

use serde::{Deserialize, Serialize};

use crate::enumeration::span_threshold;
use crate::error::{Error, Result};
use crate::lattice::{span, Walk};

/// `w ⊕ p`: `p` translated to start at the end of `w`, with the shared point
/// written once. Fails if the result is not self-avoiding.
pub fn concat_walks(w: &Walk, p: &Walk) -> Result<Walk> {
    let shift = w.end().sub(&p.start());
    let mut pts = w.points().to_vec();
    pts.extend(p.points()[1..].iter().map(|x| x.add(&shift)));
    Walk::new(pts)
}

/// Concatenation of two bridges; always a bridge.
pub fn bridge_concat(w: &Walk, p: &Walk) -> Result<Walk> {
    if !w.is_bridge() || !p.is_bridge() {
        return Err(Error::Precondition("operands must be bridges".into()));
    }
    concat_walks(w, p)
}

/// One `+u_d` step followed by `j` steps of `-u_1`.
pub fn xi(dim: usize, j: usize) -> Walk {
    let mut steps = vec![(dim - 1, 1)];
    steps.extend(std::iter::repeat((0, -1)).take(j));
    Walk::from_steps(dim, &steps).expect("straight segments are self-avoiding")
}

/// Membership in the class of `n`-step bridges with small span, at least
/// `ln(n)^2` visits to the hyperplane `x_1 = j`, and final `x_1 = m`.
pub fn in_d_class(w: &Walk, n: usize, j: i32, m: i32) -> bool {
    let need = (n as f64).ln().powi(2);
    w.steps() == n
        && w.start().is_origin()
        && w.is_bridge()
        && span(w) as u64 <= span_threshold(n)
        && w.points().iter().filter(|p| p.x1() == j).count() as f64 >= need
        && w.end().x1() == m
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaParts {
    pub omegas: Vec<Walk>,
    pub psis: Vec<Walk>,
}

/// `xi ⊕ omega_1 ⊕ psi_1 ⊕ ... ⊕ omega_k ⊕ psi_k` with `omega_i` in the class
/// `(n, j, m)` and `psi_i` in the class `(n, -j, -m)`. The connector `xi`
/// ends at `x_1 = -j`, so the dense layer of every `omega_i` lands on the
/// surface.
pub fn build_zeta(omegas: &[Walk], psis: &[Walk], n: usize, j: i32, m: i32) -> Result<Walk> {
    if j < 0 {
        return Err(Error::Precondition("layer index must be nonnegative".into()));
    }
    if omegas.is_empty() || omegas.len() != psis.len() {
        return Err(Error::Precondition("need k >= 1 bridges of each kind".into()));
    }
    if let Some(bad) = omegas.iter().position(|w| !in_d_class(w, n, j, m)) {
        return Err(Error::Precondition(format!("omega {bad} is outside its class")));
    }
    if let Some(bad) = psis.iter().position(|w| !in_d_class(w, n, -j, -m)) {
        return Err(Error::Precondition(format!("psi {bad} is outside its class")));
    }
    let dim = omegas[0].start().dim();
    let mut zeta = xi(dim, j as usize);
    for (w, p) in omegas.iter().zip(psis) {
        zeta = bridge_concat(&zeta, w)?;
        zeta = bridge_concat(&zeta, p)?;
    }
    Ok(zeta)
}

/// Cuts an assembled walk back into its `k` pairs of `n`-step factors.
pub fn split_zeta(zeta: &Walk, n: usize, j: usize, k: usize) -> Result<ZetaParts> {
    let head = j + 1;
    if zeta.steps() != head + 2 * k * n {
        return Err(Error::Precondition("step count does not match the layout".into()));
    }
    let pts = zeta.points();
    if pts[..=head] != *xi(pts[0].dim(), j).translate(&pts[0]).points() {
        return Err(Error::Precondition("prefix is not the expected connector".into()));
    }
    let piece = |from: usize| {
        let seg = &pts[from..=from + n];
        let base = seg[0].scale(-1);
        Walk::new(seg.iter().map(|p| p.add(&base)).collect())
    };
    let mut omegas = Vec::with_capacity(k);
    let mut psis = Vec::with_capacity(k);
    for i in 0..k {
        let at = head + 2 * i * n;
        omegas.push(piece(at)?);
        psis.push(piece(at + n)?);
    }
    Ok(ZetaParts { omegas, psis })
}
