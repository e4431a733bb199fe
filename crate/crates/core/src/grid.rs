//! Quantized channels on the dyadic grid `p = k / 2^(L+1)`, `0 <= k <= 2^L`,
//! and the fused quantize-after-transform step.
//!
//! Bin assignment is exact: with `p = i/M`, `q = j/M` (`M = 2^(L+1)`,
//! `i <= j`) every child crossover is a ratio of integers,
//!
//! * minus: `p * q = dt / M^2` with `dt = i(M-j) + (M-i)j`,
//! * plus:  `alpha = M i j / da / M` and folded `beta = M i (M-j) / dt / M`
//!   with `da = M^2 - dt`,
//!
//! so the ceiling bin is an integer ceiling division. Up to `L = 16` all
//! operands fit in the 53-bit mantissa and the dense kernel runs in `f64`
//! (vectorizable); the sparse kernel uses `u128` up to `L = 41` and
//! floating point beyond.

use std::collections::HashMap;

use crate::channel::BscMixture;
use crate::functional::Functional;
use crate::polar::{plus_pair, Branch};

/// Largest `L` handled by the dense kernel.
pub(crate) const MAX_DENSE_LEVELS: u32 = 16;

/// Largest `L` for which sparse bins are computed in exact integer arithmetic.
pub(crate) const MAX_EXACT_LEVELS: u32 = 41;

/// Quantized channel: dense weights per bin, or sorted `(bin, weight)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    Dense(Vec<f64>),
    Sparse(Vec<(u64, f64)>),
}

/// Grid geometry for a fixed `L`, with capacity and Bhattacharyya tables
/// for the dense layout.
pub(crate) struct Grid {
    levels: u32,
    n: u64,
    m: u64,
    cap: Vec<f64>,
    bhat: Vec<f64>,
}

impl Grid {
    pub fn new(levels: u32) -> Self {
        let n = 1u64 << levels;
        let m = 2 * n;
        let (cap, bhat) = if levels <= MAX_DENSE_LEVELS {
            let ps = (0..=n).map(|k| k as f64 / m as f64);
            (
                ps.clone().map(|p| Functional::Capacity.bsc(p)).collect(),
                ps.map(|p| Functional::Bhattacharyya.bsc(p)).collect(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        Grid { levels, n, m, cap, bhat }
    }

    fn dense(&self) -> bool {
        self.levels <= MAX_DENSE_LEVELS
    }

    fn p(&self, k: u64) -> f64 {
        k as f64 / self.m as f64
    }

    /// Grid node of a mixture whose crossovers are all bin endpoints.
    pub fn node(&self, c: &BscMixture) -> Node {
        let bin = |p: f64| {
            let k = p * self.m as f64;
            debug_assert_eq!(k, k.ceil(), "crossover {p} is not on the grid");
            k as u64
        };
        if self.dense() {
            let mut w = vec![0.0; self.n as usize + 1];
            for c in c.components() {
                w[bin(c.p) as usize] += c.lambda;
            }
            Node::Dense(w)
        } else {
            Node::Sparse(c.components().iter().map(|c| (bin(c.p), c.lambda)).collect())
        }
    }

    pub fn mixture(&self, node: &Node) -> BscMixture {
        let pts = match node {
            Node::Dense(w) => w
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(k, &w)| (self.p(k as u64), w))
                .collect(),
            Node::Sparse(v) => v.iter().filter(|e| e.1 > 0.0).map(|&(k, w)| (self.p(k), w)).collect(),
        };
        BscMixture::from_canonical(pts)
    }

    /// Capacity and Bhattacharyya parameter of a node.
    pub fn eval(&self, node: &Node) -> (f64, f64) {
        match node {
            Node::Dense(w) => w
                .iter()
                .zip(self.cap.iter().zip(&self.bhat))
                .filter(|(&w, _)| w > 0.0)
                .fold((0.0, 0.0), |(c, z), (&w, (&cv, &zv))| (c + w * cv, z + w * zv)),
            Node::Sparse(v) => v.iter().fold((0.0, 0.0), |(c, z), &(k, w)| {
                let p = self.p(k);
                (c + w * Functional::Capacity.bsc(p), z + w * Functional::Bhattacharyya.bsc(p))
            }),
        }
    }

    /// Both quantized children `(minus, plus)`.
    pub fn children(&self, node: &Node) -> (Node, Node) {
        match node {
            Node::Dense(w) => {
                let (a, b) = dense_children(w, self.m);
                (Node::Dense(a), Node::Dense(b))
            }
            Node::Sparse(v) => {
                let (a, b) = self.sparse_children(v);
                (Node::Sparse(a), Node::Sparse(b))
            }
        }
    }

    pub fn child(&self, node: &Node, branch: Branch) -> Node {
        let (minus, plus) = self.children(node);
        match branch {
            Branch::Minus => minus,
            Branch::Plus => plus,
        }
    }

    fn sparse_children(&self, v: &[(u64, f64)]) -> (Vec<(u64, f64)>, Vec<(u64, f64)>) {
        let (n, m) = (self.n, self.m);
        let mut minus: HashMap<u64, f64> = HashMap::new();
        let mut plus: HashMap<u64, f64> = HashMap::new();
        let w0 = v.iter().find(|e| e.0 == 0).map_or(0.0, |e| e.1);
        let wn = v.iter().find(|e| e.0 == n).map_or(0.0, |e| e.1);
        let inner: Vec<(u64, f64)> = v.iter().copied().filter(|e| e.0 != 0 && e.0 != n).collect();
        let add = |map: &mut HashMap<u64, f64>, k: u64, w: f64| {
            if w > 0.0 {
                *map.entry(k).or_insert(0.0) += w;
            }
        };
        add(&mut minus, n, absorbed(wn, wn));
        add(&mut minus, 0, w0 * w0);
        add(&mut plus, 0, absorbed(w0, w0));
        add(&mut plus, n, wn * wn);
        for &(k, w) in &inner {
            add(&mut minus, k, 2.0 * (w0 * w));
            add(&mut plus, k, 2.0 * (wn * w));
        }
        let exact = self.levels <= MAX_EXACT_LEVELS;
        let mf = m as f64;
        for (a, &(i, wi)) in inner.iter().enumerate() {
            for &(j, wj) in &inner[a..] {
                let ww = if i == j { wi * wi } else { 2.0 * (wi * wj) };
                if exact {
                    let (i, j, m) = (i as u128, j as u128, m as u128);
                    let dt = i * (m - j) + (m - i) * j;
                    let da = m * m - dt;
                    add(&mut minus, dt.div_ceil(m) as u64, ww);
                    let m2 = (m * m) as f64;
                    add(&mut plus, (m * i * j).div_ceil(da) as u64, ww * (da as f64 / m2));
                    add(&mut plus, (m * i * (m - j)).div_ceil(dt) as u64, ww * (dt as f64 / m2));
                } else {
                    let (p, q) = (self.p(i), self.p(j));
                    add(&mut minus, bin_of(crate::math::conv(p, q), mf), ww);
                    for (factor, x) in plus_pair(p, q) {
                        add(&mut plus, bin_of(x, mf), ww * factor);
                    }
                }
            }
        }
        let sorted = |map: HashMap<u64, f64>| {
            let mut v: Vec<(u64, f64)> = map.into_iter().collect();
            v.sort_unstable_by_key(|e| e.0);
            v
        };
        (sorted(minus), sorted(plus))
    }
}

fn bin_of(p: f64, m: f64) -> u64 {
    (p * m).ceil() as u64
}

fn absorbed(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        a + b - a * b
    }
}

/// Per-row scratch buffers of the dense kernel.
struct Scratch {
    bm: Vec<u32>,
    ba: Vec<u32>,
    bb: Vec<u32>,
    wm: Vec<f64>,
    wa: Vec<f64>,
    wb: Vec<f64>,
}

impl Scratch {
    fn new(len: usize) -> Self {
        Scratch {
            bm: vec![0; len],
            ba: vec![0; len],
            bb: vec![0; len],
            wm: vec![0.0; len],
            wa: vec![0.0; len],
            wb: vec![0.0; len],
        }
    }
}

/// Children of a dense node; `w[k]` is the weight of crossover `k / m`.
fn dense_children(w: &[f64], m: u64) -> (Vec<f64>, Vec<f64>) {
    let n = w.len() - 1;
    let mut minus = vec![0.0; n + 1];
    let mut plus = vec![0.0; n + 1];
    let (w0, wn) = (w[0], w[n]);
    minus[n] += absorbed(wn, wn);
    minus[0] += w0 * w0;
    plus[0] += absorbed(w0, w0);
    plus[n] += wn * wn;
    let mut ks = Vec::new();
    let mut ws = Vec::new();
    for (k, &x) in w.iter().enumerate().take(n).skip(1) {
        if x > 0.0 {
            ks.push(k as f64);
            ws.push(x);
            minus[k] += 2.0 * (w0 * x);
            plus[k] += 2.0 * (wn * x);
        }
    }
    if !ks.is_empty() {
        let mut s = Scratch::new(ks.len());
        pairs(&ks, &ws, m as f64, &mut minus, &mut plus, &mut s);
    }
    (minus, plus)
}

fn pairs(ks: &[f64], ws: &[f64], m: f64, minus: &mut [f64], plus: &mut [f64], s: &mut Scratch) {
    #[cfg(target_arch = "x86_64")]
    {
        if is_x86_feature_detected!("avx512f")
            && is_x86_feature_detected!("avx512dq")
            && is_x86_feature_detected!("avx512vl")
        {
            // SAFETY: the required CPU features were detected at runtime.
            return unsafe { pairs_avx512(ks, ws, m, minus, plus, s) };
        }
        if is_x86_feature_detected!("avx2") && is_x86_feature_detected!("fma") {
            // SAFETY: as above.
            return unsafe { pairs_avx2(ks, ws, m, minus, plus, s) };
        }
    }
    pairs_portable(ks, ws, m, minus, plus, s)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f,avx512dq,avx512vl,avx2,fma")]
unsafe fn pairs_avx512(ks: &[f64], ws: &[f64], m: f64, minus: &mut [f64], plus: &mut [f64], s: &mut Scratch) {
    pairs_portable(ks, ws, m, minus, plus, s)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn pairs_avx2(ks: &[f64], ws: &[f64], m: f64, minus: &mut [f64], plus: &mut [f64], s: &mut Scratch) {
    pairs_portable(ks, ws, m, minus, plus, s)
}

/// All pairs `(a, b)` with `a <= b` of interior bins. Each row is split
/// into a branch-free pass computing bins and weights and a scatter pass.
#[inline(always)]
fn pairs_portable(ks: &[f64], ws: &[f64], m: f64, minus: &mut [f64], plus: &mut [f64], s: &mut Scratch) {
    let len = ks.len();
    for a in 0..len {
        let cnt = len - a;
        row(ks[a], 2.0 * ws[a], &ks[a..], &ws[a..], m, s);
        s.wm[0] *= 0.5;
        s.wa[0] *= 0.5;
        s.wb[0] *= 0.5;
        for t in 0..cnt {
            minus[s.bm[t] as usize] += s.wm[t];
            plus[s.ba[t] as usize] += s.wa[t];
            plus[s.bb[t] as usize] += s.wb[t];
        }
    }
}

/// Bins and weights for one row `i` against columns `j >= i`.
///
/// Ceiling divisions use an `f32` quotient estimate (absolute error well
/// below 1 for quotients up to `2^17`) followed by an exact correction in
/// `f64`, where every product is an integer below `2^53`.
#[inline(always)]
fn row(ki: f64, wi2: f64, kj: &[f64], wj: &[f64], m: f64, s: &mut Scratch) {
    let cnt = kj.len();
    let inv_m = 1.0 / m;
    let inv_m2 = inv_m * inv_m;
    let m2 = m * m;
    let mi = m * ki;
    let slope = m - 2.0 * ki;
    let (bm, ba, bb) = (&mut s.bm[..cnt], &mut s.ba[..cnt], &mut s.bb[..cnt]);
    let (wm, wa, wb) = (&mut s.wm[..cnt], &mut s.wa[..cnt], &mut s.wb[..cnt]);
    for t in 0..cnt {
        let k = kj[t];
        let dt = mi + k * slope;
        let da = m2 - dt;
        let na = mi * k;
        let nb = mi * (m - k);
        let ca = ceil_div(na, da);
        let cb = ceil_div(nb, dt);
        // SAFETY: all three values are integers in [0, 2^16].
        unsafe {
            bm[t] = (dt * inv_m).ceil().to_int_unchecked::<u32>();
            ba[t] = ca.to_int_unchecked::<u32>();
            bb[t] = cb.to_int_unchecked::<u32>();
        }
        let ww = wi2 * wj[t];
        wm[t] = ww;
        wa[t] = ww * (da * inv_m2);
        wb[t] = ww * (dt * inv_m2);
    }
}

#[inline(always)]
fn ceil_div(num: f64, den: f64) -> f64 {
    let mut c = (((num as f32) / (den as f32)) as f64).ceil();
    c = if c * den < num { c + 1.0 } else { c };
    if (c - 1.0) * den >= num {
        c - 1.0
    } else {
        c
    }
}
