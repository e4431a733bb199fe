//! f-relations, the `M_2` gap function, polarization processes and
//! numerical checks of two polarization inequalities.
//!
//! Random branch sequences come from `ChaCha8Rng::seed_from_u64(seed)`
//! (crate `rand_chacha` 0.3); bit `k` is the `k`-th call to `gen::<bool>()`.
//! The same seed therefore yields the same trajectory on every platform
//! and build.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{make_bsc, BscMixture};
use crate::error::{Error, Result};
use crate::functional::{dispersion, eval_mixture, Functional};
use crate::grid::Grid;
use crate::math::{conv, h2};
use crate::polar::{polar_minus_mixture, polar_plus_mixture, polar_step, Branch, DEFAULT_MAX_COMPONENTS};
use crate::quantize::{quantize_mixture, QuantizerConfig};

/// Sign pattern of `I_f(minus) + I_f(plus) - I_f(W) - I_f(W')` over a scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Preserving,
    Improving,
    Decreasing,
    Mixed,
}

/// A BSC pair and its delta.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub p: f64,
    pub q: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FRelationVerdict {
    pub functional: String,
    pub classification: Classification,
    /// Largest positive delta (0 if none).
    pub max_violation_up: f64,
    /// Largest magnitude of a negative delta (0 if none).
    pub max_violation_down: f64,
    /// Pairs attaining the extreme deltas that exceed the tolerance.
    pub witnesses: Vec<Witness>,
}

/// `I_f(C1 minus C2) + I_f(C1 plus C2) - I_f(C1) - I_f(C2)`.
pub fn frelation_delta(f: &Functional, c1: &BscMixture, c2: &BscMixture) -> f64 {
    let minus = polar_minus_mixture(c1, c2);
    let plus = polar_plus_mixture(c1, c2);
    eval_mixture(&minus, f) + eval_mixture(&plus, f) - eval_mixture(c1, f) - eval_mixture(c2, f)
}

/// Classify `f` over BSC pairs `(i/2N, j/2N)`, `0 <= i <= j <= N`.
pub fn frelation_scan(f: &Functional, grid_n: usize, tol: f64) -> Result<FRelationVerdict> {
    if grid_n < 2 {
        return Err(Error::Domain { field: "grid", value: grid_n as f64, range: "integers >= 2" });
    }
    let step = 0.5 / grid_n as f64;
    let cells: Vec<Witness> = (0..=grid_n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i..=grid_n).map(move |j| {
                let (p, q) = (i as f64 * step, j as f64 * step);
                let delta = frelation_delta(f, &make_bsc(p).unwrap(), &make_bsc(q).unwrap());
                Witness { p, q, delta }
            })
        })
        .collect();
    // Sequential reduction keeps ties (and so witnesses) independent of scheduling.
    let hi = cells.iter().copied().reduce(|a, b| if b.delta > a.delta { b } else { a }).unwrap();
    let lo = cells.iter().copied().reduce(|a, b| if b.delta < a.delta { b } else { a }).unwrap();
    let up = hi.delta.max(0.0);
    let down = (-lo.delta).max(0.0);
    let classification = match (up > tol, down > tol) {
        (false, false) => Classification::Preserving,
        (true, false) => Classification::Improving,
        (false, true) => Classification::Decreasing,
        (true, true) => Classification::Mixed,
    };
    let witnesses = [(up > tol, hi), (down > tol, lo)]
        .into_iter()
        .filter_map(|(keep, w)| keep.then_some(w))
        .collect();
    Ok(FRelationVerdict {
        functional: f.to_string(),
        classification,
        max_violation_up: up,
        max_violation_down: down,
        witnesses,
    })
}

/// Margin by which the second information-density moment decreases on
/// the BSC pair `(p, q)`.
pub fn gap(p: f64, q: f64) -> Result<f64> {
    for (field, v) in [("p", p), ("q", q)] {
        if !(0.0..=0.5).contains(&v) {
            return Err(Error::Domain { field, value: v, range: "[0, 1/2]" });
        }
    }
    if p == 0.0 && q == 0.0 {
        return Err(Error::Domain { field: "(p, q)", value: 0.0, range: "[0, 1/2]^2 without (0, 0)" });
    }
    let psi = |s: f64| Functional::MomentR { r: 2 }.f(s);
    let t = conv(p, q);
    let alpha = p * q / (1.0 - t);
    let beta = p * (1.0 - q) / t;
    Ok(psi(p) + psi(q) - psi(t) - (1.0 - t) * psi(alpha) - t * psi(beta))
}

/// `I(minus)^2 + I(plus)^2 - I(C1)^2 - I(C2)^2`; nonnegative in theory.
pub fn check_squared_mi(c1: &BscMixture, c2: &BscMixture) -> f64 {
    let i = |c: &BscMixture| eval_mixture(c, &Functional::Capacity);
    let minus = polar_minus_mixture(c1, c2);
    let plus = polar_plus_mixture(c1, c2);
    i(&minus).powi(2) + i(&plus).powi(2) - i(c1).powi(2) - i(c2).powi(2)
}

/// `V(C1) + V(C2) - V(minus) - V(plus)` with `V` the dispersion; nonnegative in theory.
pub fn check_varentropy(c1: &BscMixture, c2: &BscMixture) -> f64 {
    let minus = polar_minus_mixture(c1, c2);
    let plus = polar_plus_mixture(c1, c2);
    dispersion(c1) + dispersion(c2) - dispersion(&minus) - dispersion(&plus)
}

/// One sample path of the polarization process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    /// `I_f(W_0), ..., I_f(W_n)`.
    pub values: Vec<f64>,
    /// Branch bits `B_1..B_n` (1 = plus).
    pub bits: Vec<u8>,
}

/// The first `n` branch bits drawn from `seed`.
pub fn branch_bits(seed: u64, n: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen::<bool>() as u8).collect()
}

/// Sample `W_0 = C, W_k = W_{k-1} minus/plus W_{k-1}` and record `I_f(W_k)`.
/// With `cfg`, the channel is quantized up front and after every step.
pub fn sample_process(
    c: &BscMixture,
    f: &Functional,
    n: usize,
    seed: u64,
    cfg: Option<QuantizerConfig>,
) -> Result<Trajectory> {
    let bits = branch_bits(seed, n);
    let mut values = Vec::with_capacity(n + 1);
    match cfg {
        None => {
            let mut w = c.clone();
            values.push(eval_mixture(&w, f));
            for &b in &bits {
                w = polar_step(&w, Branch::from_bit(b == 1), DEFAULT_MAX_COMPONENTS)?;
                values.push(eval_mixture(&w, f));
            }
        }
        Some(cfg) => {
            let grid = Grid::new(cfg.levels());
            let mut node = grid.node(&quantize_mixture(c, cfg));
            values.push(eval_mixture(&grid.mixture(&node), f));
            for &b in &bits {
                node = grid.child(&node, Branch::from_bit(b == 1));
                values.push(eval_mixture(&grid.mixture(&node), f));
            }
        }
    }
    Ok(Trajectory { seed, values, bits })
}

/// Channels of a process tree, each distinct prefix computed once.
struct PrefixTree {
    grid: Option<Grid>,
    nodes: HashMap<Vec<u8>, BscMixture>,
}

impl PrefixTree {
    fn get(&mut self, prefix: &[u8]) -> Result<&BscMixture> {
        if !self.nodes.contains_key(prefix) {
            let (last, head) = prefix.split_last().expect("root is present");
            let parent = self.get(head)?.clone();
            let branch = Branch::from_bit(*last == 1);
            let child = match &self.grid {
                None => polar_step(&parent, branch, DEFAULT_MAX_COMPONENTS)?,
                Some(g) => g.mixture(&g.child(&g.node(&parent), branch)),
            };
            self.nodes.insert(prefix.to_vec(), child);
        }
        Ok(&self.nodes[prefix])
    }
}

/// Trajectories for every seed in `seeds`, identical to calling
/// [`sample_process`] per seed. Returns the trajectories and every
/// distinct channel visited, keyed by its branch prefix.
pub fn sample_processes(
    c: &BscMixture,
    f: &Functional,
    n: usize,
    seeds: impl IntoIterator<Item = u64>,
    cfg: Option<QuantizerConfig>,
) -> Result<(Vec<Trajectory>, HashMap<Vec<u8>, BscMixture>)> {
    let root = match cfg {
        None => c.clone(),
        Some(cfg) => quantize_mixture(c, cfg),
    };
    let mut tree = PrefixTree {
        grid: cfg.map(|q| Grid::new(q.levels())),
        nodes: HashMap::from([(Vec::new(), root)]),
    };
    let mut values_of: HashMap<Vec<u8>, f64> = HashMap::new();
    let mut out = Vec::new();
    for seed in seeds {
        let bits = branch_bits(seed, n);
        let mut values = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let prefix = &bits[..k];
            let v = match values_of.get(prefix) {
                Some(&v) => v,
                None => {
                    let v = eval_mixture(tree.get(prefix)?, f);
                    values_of.insert(prefix.to_vec(), v);
                    v
                }
            };
            values.push(v);
        }
        out.push(Trajectory { seed, values, bits });
    }
    Ok((out, tree.nodes))
}

/// `(I(C minus C) + I(C plus C)) / 2` computed pair by pair without
/// materializing either child.
pub fn children_mean_capacity(c: &BscMixture) -> f64 {
    let cap = |p: f64| 1.0 - h2(p);
    let k = c.components();
    let pair = |p: f64, q: f64| {
        let [(wa, a), (wb, b)] = crate::polar::plus_pair(p, q);
        let plus = if p == 0.0 || q == 0.0 { 1.0 } else { wa * cap(a) + wb * cap(b) };
        cap(conv(p, q)) + plus
    };
    let total: f64 = (0..k.len())
        .into_par_iter()
        .map(|i| {
            let (l, p) = (k[i].lambda, k[i].p);
            let mut row = l * l * pair(p, p);
            for m in &k[i + 1..] {
                row += 2.0 * l * m.lambda * pair(p, m.p);
            }
            row
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    total / 2.0
}
