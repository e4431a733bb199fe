//! Generators and reference implementations shared by the integration tests.
#![allow(dead_code)]

use blackwell_polar::channel::{blackwell_from_transition, BlackwellMeasure, BscMixture, TransitionMatrix};
use proptest::prelude::*;
use rand::Rng;

/// Crossover in `[0, 1/2]` with extra mass on the endpoints.
pub fn crossover() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(0.0),
        1 => Just(0.5),
        8 => 0.0..=0.5f64,
    ]
}

/// Symmetric channel with 1 to `max` BSC components.
pub fn mixture(max: usize) -> impl Strategy<Value = BscMixture> {
    prop::collection::vec((0.05..1.0f64, crossover()), 1..=max).prop_map(|parts| {
        let t: f64 = parts.iter().map(|x| x.0).sum();
        BscMixture::new(parts.into_iter().map(|(w, p)| (w / t, p)).collect()).unwrap()
    })
}

/// Seeded counterpart of [`mixture`] for fixed-size loops.
pub fn random_mixture<R: Rng>(rng: &mut R, max: usize) -> BscMixture {
    let k = rng.gen_range(1..=max);
    let parts: Vec<(f64, f64)> = (0..k)
        .map(|_| {
            let p = match rng.gen_range(0..10) {
                0 => 0.0,
                1 => 0.5,
                _ => rng.gen_range(0.0..=0.5),
            };
            (rng.gen_range(0.05..1.0), p)
        })
        .collect();
    let t: f64 = parts.iter().map(|x| x.0).sum();
    BscMixture::new(parts.into_iter().map(|(w, p)| (w / t, p)).collect()).unwrap()
}

/// Explicit transition matrix of a mixture: output `(i, b)` means
/// "subchannel `i` was used and delivered bit `b`".
pub fn transition_of(c: &BscMixture) -> TransitionMatrix {
    let mut r0 = Vec::new();
    let mut r1 = Vec::new();
    for k in c.components() {
        r0.extend([k.lambda * (1.0 - k.p), k.lambda * k.p]);
        r1.extend([k.lambda * k.p, k.lambda * (1.0 - k.p)]);
    }
    TransitionMatrix::new(r0, r1).unwrap()
}

/// Worse channel `u1 -> (y1, y2)` with `u2` uniform and unknown.
pub fn minus_matrix(a: &TransitionMatrix, b: &TransitionMatrix) -> TransitionMatrix {
    let mut rows = vec![Vec::new(), Vec::new()];
    for (u1, row) in rows.iter_mut().enumerate() {
        for y1 in 0..a.outputs() {
            for y2 in 0..b.outputs() {
                let v: f64 = (0..2).map(|u2| 0.5 * a.row(u1 ^ u2)[y1] * b.row(u2)[y2]).sum();
                row.push(v);
            }
        }
    }
    TransitionMatrix::from_rows(rows).unwrap()
}

/// Better channel `u2 -> (y1, y2, u1)` with `u1` uniform and revealed.
pub fn plus_matrix(a: &TransitionMatrix, b: &TransitionMatrix) -> TransitionMatrix {
    let mut rows = vec![Vec::new(), Vec::new()];
    for (u2, row) in rows.iter_mut().enumerate() {
        for y1 in 0..a.outputs() {
            for y2 in 0..b.outputs() {
                for u1 in 0..2 {
                    row.push(0.5 * a.row(u1 ^ u2)[y1] * b.row(u2)[y2]);
                }
            }
        }
    }
    TransitionMatrix::from_rows(rows).unwrap()
}

pub fn oracle_minus(c1: &BscMixture, c2: &BscMixture) -> BlackwellMeasure {
    blackwell_from_transition(&minus_matrix(&transition_of(c1), &transition_of(c2)))
}

pub fn oracle_plus(c1: &BscMixture, c2: &BscMixture) -> BlackwellMeasure {
    blackwell_from_transition(&plus_matrix(&transition_of(c1), &transition_of(c2)))
}

/// Largest gap between the CDFs of two atomic measures, plus the
/// largest location mismatch between atoms of positive weight.
pub fn measure_distance(a: &BlackwellMeasure, b: &BlackwellMeasure) -> f64 {
    let mut xs: Vec<f64> = a.atoms().iter().chain(b.atoms()).map(|x| x.s).collect();
    xs.sort_by(f64::total_cmp);
    let cdf = |m: &BlackwellMeasure, x: f64| -> f64 { m.atoms().iter().filter(|t| t.s <= x + 1e-9).map(|t| t.w).sum() };
    xs.iter().map(|&x| (cdf(a, x) - cdf(b, x)).abs()).fold(0.0, f64::max)
}

/// Capacity of a BSC, independent of the library's functional code.
pub fn bsc_capacity(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 || x >= 1.0 { 0.0 } else { -x * x.log2() - (1.0 - x) * (1.0 - x).log2() };
    1.0 - h(p)
}
