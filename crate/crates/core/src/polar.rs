//! The one-step polar transforms and successive polarization.
//!
//! `minus` (bad, check-node) and `plus` (good, variable-node) act on
//! Blackwell measures atom by atom and on BSC mixtures component by
//! component. On mixtures two atoms are absorbing and handled in closed
//! form: the useless channel for `minus` (a pair with a p = 1/2 member is
//! useless) and the perfect channel for `plus` (a pair with a p = 0 member
//! is perfect). Their output weight is `a + b - ab`. On a BEC this yields
//! the erasure recursion `eps + tau - eps tau` / `eps tau` with identical
//! floating-point operations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{BlackwellMeasure, BscMixture};
use crate::error::{Error, Result};
use crate::math::conv;

/// Default budget on generated components in exact polarization.
pub const DEFAULT_MAX_COMPONENTS: usize = 10_000_000;

/// Branch selector for one polarization step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    pub fn bit(self) -> u8 {
        match self {
            Branch::Minus => 0,
            Branch::Plus => 1,
        }
    }

    pub fn from_bit(b: bool) -> Self {
        if b {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }
}

/// Sequence of branches, first step first. Written as a binary string with
/// the first step leftmost (`0` = minus, `1` = plus).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolarIndex(pub Vec<Branch>);

impl PolarIndex {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn branches(&self) -> &[Branch] {
        &self.0
    }

    /// Index with `n` branches taken from the bits of `value`, most
    /// significant bit first.
    pub fn from_int(value: u64, n: usize) -> Self {
        PolarIndex(
            (0..n)
                .map(|i| Branch::from_bit((value >> (n - 1 - i)) & 1 == 1))
                .collect(),
        )
    }

    pub fn to_int(&self) -> u64 {
        self.0.iter().fold(0, |acc, b| (acc << 1) | b.bit() as u64)
    }
}

impl fmt::Display for PolarIndex {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(out, "{}", b.bit())?;
        }
        Ok(())
    }
}

impl FromStr for PolarIndex {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Ok(Branch::Minus),
                '1' => Ok(Branch::Plus),
                other => Err(Error::validation("index", format!("`{other}` is not a binary digit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PolarIndex)
    }
}

/// `m1 minus m2`: atom `1 - s1*s2` (binary convolution) with weight `w1 w2`.
pub fn polar_minus_measure(m1: &BlackwellMeasure, m2: &BlackwellMeasure) -> BlackwellMeasure {
    let mut pts = Vec::with_capacity(m1.atoms().len() * m2.atoms().len());
    for a in m1.atoms() {
        for b in m2.atoms() {
            pts.push((1.0 - conv(a.s, b.s), a.w * b.w));
        }
    }
    BlackwellMeasure::from_points(pts)
}

/// `m1 plus m2`: atoms `s1 s2 / (1 - t)` with weight `w1 w2 (1 - t)` and
/// `(1-s1) s2 / t` with weight `w1 w2 t`, where `t = s1 * s2` is the binary
/// convolution. Branches with zero weight are skipped.
pub fn polar_plus_measure(m1: &BlackwellMeasure, m2: &BlackwellMeasure) -> BlackwellMeasure {
    let mut pts = Vec::with_capacity(2 * m1.atoms().len() * m2.atoms().len());
    for a in m1.atoms() {
        for b in m2.atoms() {
            let w = a.w * b.w;
            let agree = a.s * b.s + (1.0 - a.s) * (1.0 - b.s);
            let differ = conv(a.s, b.s);
            if agree > 0.0 {
                pts.push((a.s * b.s / agree, w * agree));
            }
            if differ > 0.0 {
                pts.push(((1.0 - a.s) * b.s / differ, w * differ));
            }
        }
    }
    BlackwellMeasure::from_points(pts)
}

/// Crossover and weight factors of the two plus-branch outputs of BSC(p)
/// and BSC(q), both positive: `[(1 - t, alpha), (t, beta folded)]`.
#[inline]
pub(crate) fn plus_pair(p: f64, q: f64) -> [(f64, f64); 2] {
    let agree = p * q + (1.0 - p) * (1.0 - q);
    let differ = conv(p, q);
    let alpha = p * q / agree;
    let beta = (p * (1.0 - q)).min((1.0 - p) * q) / differ;
    [(agree, alpha), (differ, beta)]
}

fn check_budget(needed: usize, limit: usize) -> Result<()> {
    if needed > limit {
        return Err(Error::ResourceCap {
            what: "exact polarization",
            needed: needed as f64,
            limit: limit as f64,
            hint: "; use the quantized pipeline",
        });
    }
    Ok(())
}

/// Components strictly inside `(0, 1/2)` plus the absorbing weight for the
/// requested branch.
fn split_absorbing(c: &BscMixture, absorbing: f64) -> (f64, Vec<(f64, f64)>) {
    let mut a = 0.0;
    let mut rest = Vec::with_capacity(c.len());
    for k in c.components() {
        if k.p == absorbing {
            a = k.lambda;
        } else {
            rest.push((k.lambda, k.p));
        }
    }
    (a, rest)
}

fn absorbed(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        a + b - a * b
    }
}

/// Minus transform of two BSC mixtures: `{(lambda_i mu_j, p_i * q_j)}`.
pub fn polar_minus_mixture(c1: &BscMixture, c2: &BscMixture) -> BscMixture {
    minus_mixture_capped(c1, c2, usize::MAX).expect("unbounded budget")
}

/// Plus transform of two BSC mixtures. A pair with a perfect member is
/// perfect; otherwise it splits into BSC(alpha) and BSC(beta) with
/// weights `1 - t` and `t`.
pub fn polar_plus_mixture(c1: &BscMixture, c2: &BscMixture) -> BscMixture {
    plus_mixture_capped(c1, c2, usize::MAX).expect("unbounded budget")
}

pub(crate) fn minus_mixture_capped(c1: &BscMixture, c2: &BscMixture, limit: usize) -> Result<BscMixture> {
    let (u1, r1) = split_absorbing(c1, 0.5);
    let (u2, r2) = split_absorbing(c2, 0.5);
    let same = c1 == c2;
    let pairs = if same { r1.len() * (r1.len() + 1) / 2 } else { r1.len() * r2.len() };
    check_budget(pairs + 1, limit)?;
    let mut pts = Vec::with_capacity(pairs + 1);
    pts.push((0.5, absorbed(u1, u2)));
    if same {
        for (i, &(l, p)) in r1.iter().enumerate() {
            pts.push((conv(p, p), l * l));
            for &(m, q) in &r1[i + 1..] {
                pts.push((conv(p, q), 2.0 * (l * m)));
            }
        }
    } else {
        for &(l, p) in &r1 {
            for &(m, q) in &r2 {
                pts.push((conv(p, q), l * m));
            }
        }
    }
    Ok(BscMixture::from_points(pts))
}

pub(crate) fn plus_mixture_capped(c1: &BscMixture, c2: &BscMixture, limit: usize) -> Result<BscMixture> {
    let (z1, r1) = split_absorbing(c1, 0.0);
    let (z2, r2) = split_absorbing(c2, 0.0);
    let same = c1 == c2;
    let pairs = if same { r1.len() * (r1.len() + 1) / 2 } else { r1.len() * r2.len() };
    check_budget(2 * pairs + 1, limit)?;
    let mut pts = Vec::with_capacity(2 * pairs + 1);
    pts.push((0.0, absorbed(z1, z2)));
    let mut emit = |w: f64, p: f64, q: f64| {
        // A useless member leaves the other channel unchanged.
        if p == 0.5 || q == 0.5 {
            pts.push((p.min(q), w));
            return;
        }
        for (factor, x) in plus_pair(p, q) {
            pts.push((x, w * factor));
        }
    };
    if same {
        for (i, &(l, p)) in r1.iter().enumerate() {
            emit(l * l, p, p);
            for &(m, q) in &r1[i + 1..] {
                emit(2.0 * (l * m), p, q);
            }
        }
    } else {
        for &(l, p) in &r1 {
            for &(m, q) in &r2 {
                emit(l * m, p, q);
            }
        }
    }
    Ok(BscMixture::from_points(pts))
}

/// One step of the given branch applied to `(c, c)`.
pub fn polar_step(c: &BscMixture, branch: Branch, limit: usize) -> Result<BscMixture> {
    match branch {
        Branch::Minus => minus_mixture_capped(c, c, limit),
        Branch::Plus => plus_mixture_capped(c, c, limit),
    }
}

/// Exact successive polarization along `b`, with the default component budget.
pub fn polarize_path(c: &BscMixture, b: &PolarIndex) -> Result<BscMixture> {
    polarize_path_capped(c, b, DEFAULT_MAX_COMPONENTS)
}

/// Exact successive polarization; fails before any step that would
/// generate more than `limit` components.
pub fn polarize_path_capped(c: &BscMixture, b: &PolarIndex, limit: usize) -> Result<BscMixture> {
    b.branches()
        .iter()
        .try_fold(c.clone(), |acc, &br| polar_step(&acc, br, limit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{blackwell_from_mixture, make_bec, make_bsc};

    fn comps(c: &BscMixture) -> Vec<(f64, f64)> {
        c.components().iter().map(|k| (k.lambda, k.p)).collect()
    }

    #[test]
    fn index_serialization() {
        let b: PolarIndex = "101".parse().unwrap();
        assert_eq!(b.0, vec![Branch::Plus, Branch::Minus, Branch::Plus]);
        assert_eq!(b.to_string(), "101");
        assert_eq!(b.to_int(), 5);
        assert_eq!(PolarIndex::from_int(5, 3), b);
        assert_eq!(PolarIndex::from_int(1, 4).to_string(), "0001");
        assert!("012".parse::<PolarIndex>().is_err());
        assert!("".parse::<PolarIndex>().unwrap().is_empty());
    }

    #[test]
    fn bsc_minus_is_convolution() {
        let c = polar_minus_mixture(&make_bsc(0.1).unwrap(), &make_bsc(0.2).unwrap());
        assert_eq!(comps(&c), vec![(1.0, conv(0.1, 0.2))]);
        let c = polarize_path(&make_bsc(0.05).unwrap(), &"0".parse().unwrap()).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c.components()[0].p - 0.095).abs() < 1e-16);
    }

    #[test]
    fn bsc_plus_splits_in_two() {
        let (p, q) = (0.1, 0.2);
        let c = polar_plus_mixture(&make_bsc(p).unwrap(), &make_bsc(q).unwrap());
        let t = conv(p, q);
        let alpha = p * q / (1.0 - t);
        let beta = (1.0 - p) * q / t;
        let got = comps(&c);
        assert_eq!(got.len(), 2);
        assert!((got[0].0 - (1.0 - t)).abs() < 1e-15 && (got[0].1 - alpha).abs() < 1e-15);
        assert!((got[1].0 - t).abs() < 1e-15 && (got[1].1 - beta.min(1.0 - beta)).abs() < 1e-15);
    }

    #[test]
    fn perfect_and_useless_fixed_points() {
        let perfect = make_bsc(0.0).unwrap();
        assert_eq!(polar_minus_mixture(&perfect, &perfect), perfect);
        assert_eq!(polar_plus_mixture(&perfect, &perfect), perfect);
        assert_eq!(polar_plus_mixture(&perfect, &make_bsc(0.3).unwrap()), perfect);
        let c = crate::channel::make_hybrid(0.2, 0.1).unwrap();
        assert_eq!(polar_minus_mixture(&c, &perfect), c);
    }

    #[test]
    fn bec_closure_on_mixtures() {
        let (e, t) = (0.12, 0.3);
        let minus = polar_minus_mixture(&make_bec(e).unwrap(), &make_bec(t).unwrap());
        assert_eq!(minus.as_bec(), Some(e + t - e * t));
        let plus = polar_plus_mixture(&make_bec(e).unwrap(), &make_bec(t).unwrap());
        assert_eq!(plus.as_bec(), Some(e * t));
        let sq = polar_minus_mixture(&make_bec(0.12).unwrap(), &make_bec(0.12).unwrap());
        assert!((sq.as_bec().unwrap() - 0.2256).abs() < 1e-15);
    }

    #[test]
    fn bec_closure_on_measures() {
        let (e, t) = (0.12, 0.3);
        let m1 = blackwell_from_mixture(&make_bec(e).unwrap());
        let m2 = blackwell_from_mixture(&make_bec(t).unwrap());
        let want = blackwell_from_mixture(&make_bec(1.0 - (1.0 - e) * (1.0 - t)).unwrap());
        close(&polar_minus_measure(&m1, &m2), &want);
        let want = blackwell_from_mixture(&make_bec(e * t).unwrap());
        close(&polar_plus_measure(&m1, &m2), &want);
    }

    fn close(a: &BlackwellMeasure, b: &BlackwellMeasure) {
        assert_eq!(a.atoms().len(), b.atoms().len(), "{a:?} vs {b:?}");
        for (x, y) in a.atoms().iter().zip(b.atoms()) {
            assert!((x.s - y.s).abs() < 1e-12 && (x.w - y.w).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn measure_transforms_on_bsc() {
        let (p, q) = (0.1, 0.3);
        let m1 = blackwell_from_mixture(&make_bsc(p).unwrap());
        let m2 = blackwell_from_mixture(&make_bsc(q).unwrap());
        close(&polar_minus_measure(&m1, &m2), &blackwell_from_mixture(&make_bsc(conv(p, q)).unwrap()));
        let mix = polar_plus_mixture(&make_bsc(p).unwrap(), &make_bsc(q).unwrap());
        close(&polar_plus_measure(&m1, &m2), &blackwell_from_mixture(&mix));
        let z = blackwell_from_mixture(&make_bsc(0.0).unwrap());
        close(&polar_minus_measure(&z, &z), &z);
        close(&polar_plus_measure(&z, &z), &z);
    }

    #[test]
    fn bec_path_composes_closure_rules() {
        let eps: f64 = 0.3;
        let c = polarize_path(&make_bec(eps).unwrap(), &"10".parse().unwrap()).unwrap();
        let want = 1.0 - (1.0 - eps * eps).powi(2);
        assert!((c.as_bec().unwrap() - want).abs() < 1e-15);
        let c0 = make_bec(eps).unwrap();
        assert_eq!(polarize_path(&c0, &PolarIndex::default()).unwrap(), c0);
    }

    #[test]
    fn budget_is_enforced() {
        let c = crate::channel::BscMixture::new(vec![(0.25, 0.01), (0.25, 0.1), (0.25, 0.2), (0.25, 0.3)]).unwrap();
        let err = polarize_path_capped(&c, &"1111".parse().unwrap(), 1000).unwrap_err();
        assert!(err.is_resource_cap());
    }
}
