//! Neyman-Pearson regions and Blackwell dominance.
//!
//! A test `A` of "input 0 vs input 1" has operating point
//! `(alpha, beta) = (W(A|0), W(A|1))`. The set of achievable points is a
//! convex polygon symmetric under `(a, b) -> (1-a, 1-b)`, so it is fixed by
//! its lower chain: the likelihood-ratio tests obtained by adding outputs
//! in decreasing order of posterior. The chain starts at `(0,0)`, ends at
//! `(1,1)` and lies on or below the diagonal. A channel dominates another
//! exactly when its region contains the other's, i.e. when its chain lies
//! below.

use serde::{Deserialize, Serialize};

use crate::channel::BlackwellMeasure;

/// Default tolerance for [`contains`] and [`dominates`].
pub const DEFAULT_TOL: f64 = 1e-9;

/// Collinearity tolerance when pruning chain vertices.
const COLLINEAR_TOL: f64 = 1e-15;

/// Lower boundary chain of a Neyman-Pearson region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NpRegion {
    /// Vertices `(alpha, beta)` from `(0,0)` to `(1,1)`, convex, both
    /// coordinates nondecreasing.
    pub upper_boundary: Vec<(f64, f64)>,
}

/// Chain of likelihood-ratio tests for `m`.
pub fn np_region_of(m: &BlackwellMeasure) -> NpRegion {
    let mut chain = vec![(0.0, 0.0)];
    let (mut a, mut b) = (0.0, 0.0);
    // Canonical atoms are sorted by posterior; walk them from s = 1 down.
    for atom in m.atoms().iter().rev() {
        a += 2.0 * atom.w * atom.s;
        b += 2.0 * atom.w * (1.0 - atom.s);
        push_pruned(&mut chain, (a.min(1.0), b.min(1.0)));
    }
    // Land exactly on the corner despite rounding in the running sums.
    chain.pop();
    push_pruned(&mut chain, (1.0, 1.0));
    NpRegion { upper_boundary: chain }
}

fn push_pruned(chain: &mut Vec<(f64, f64)>, v: (f64, f64)) {
    while chain.len() >= 2 {
        let (x0, y0) = chain[chain.len() - 2];
        let (x1, y1) = chain[chain.len() - 1];
        let cross = (x1 - x0) * (v.1 - y0) - (y1 - y0) * (v.0 - x0);
        if cross.abs() > COLLINEAR_TOL {
            break;
        }
        chain.pop();
    }
    if chain.last() != Some(&v) {
        chain.push(v);
    }
}

impl NpRegion {
    /// Lowest achievable `beta` at false-alarm level `alpha`.
    pub fn lower_beta(&self, alpha: f64) -> f64 {
        let alpha = alpha.clamp(0.0, 1.0);
        let c = &self.upper_boundary;
        let i = c.partition_point(|v| v.0 < alpha);
        if i == c.len() {
            return c[c.len() - 1].1;
        }
        let (x1, y1) = c[i];
        if x1 == alpha || i == 0 {
            return y1;
        }
        let (x0, y0) = c[i - 1];
        y0 + (y1 - y0) * (alpha - x0) / (x1 - x0)
    }

    /// Vertices of the whole region, counter-clockwise from `(0,0)`.
    pub fn hull_vertices(&self) -> Vec<(f64, f64)> {
        let mut out = self.upper_boundary.clone();
        let n = out.len();
        for &(a, b) in self.upper_boundary[1..n - 1].iter() {
            out.push((1.0 - a, 1.0 - b));
        }
        out
    }

    /// JSON object `{"upper_boundary": [[a, b], ...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite coordinates")
    }
}

/// True if every vertex of `inner` is achievable in `outer` after moving
/// it by at most `tol` in each coordinate. The slack in `alpha` absorbs
/// rounding in nearly vertical chain segments.
pub fn contains(outer: &NpRegion, inner: &NpRegion, tol: f64) -> bool {
    inner
        .upper_boundary
        .iter()
        .all(|&(a, b)| b >= outer.lower_beta(a - tol) - tol)
}

/// True if `m1` is at least as informative as `m2`.
pub fn dominates(m1: &BlackwellMeasure, m2: &BlackwellMeasure, tol: f64) -> bool {
    contains(&np_region_of(m1), &np_region_of(m2), tol)
}
