//! Channel representations and conversions between them.
//!
//! A binary-input channel is held in one of three forms:
//!
//! * [`TransitionMatrix`]: the raw pair of conditional distributions.
//! * [`BlackwellMeasure`]: the law of the posterior `S = P(X=0 | Y)` under a
//!   uniform input. It has mean 1/2 and determines the channel up to
//!   equivalence.
//! * [`BscMixture`]: a symmetric channel written as a compound of BSCs,
//!   `{(lambda_i, p_i)}` with `p_i` folded into `[0, 1/2]`.
//!
//! Constructors validate their input. Internally produced values are
//! canonicalized (sorted, zero weights dropped, near-equal points merged) and
//! checked with debug assertions.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::math::fold;

/// Points closer than this are treated as the same atom or component.
pub const MERGE_TOL: f64 = 1e-12;

/// Tolerance on total mass and on the mean-1/2 constraint.
pub const MASS_TOL: f64 = 1e-9;

/// Sort `(x, w)` pairs by `x`, drop non-positive weights and merge runs of
/// points whose consecutive gaps are at most `tol`.
///
/// Sorting is stable, so weights of a run are summed in generation order.
/// A run of identical `x` keeps that value exactly; otherwise the merged
/// point is the weighted mean of the run.
pub(crate) fn canonicalize(mut pts: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    pts.retain(|&(_, w)| w > 0.0);
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::with_capacity(pts.len());
    let mut i = 0;
    while i < pts.len() {
        let (x0, w0) = pts[i];
        let (mut w, mut wx, mut last, mut same) = (w0, w0 * x0, x0, true);
        let mut j = i + 1;
        while j < pts.len() && pts[j].0 - last <= tol {
            let (x, wj) = pts[j];
            same &= x == x0;
            w += wj;
            wx += wj * x;
            last = x;
            j += 1;
        }
        let x = if same { x0 } else { (wx / w).clamp(x0, last) };
        out.push((x, w));
        i = j;
    }
    out
}

fn total(pts: &[(f64, f64)]) -> f64 {
    pts.iter().map(|&(_, w)| w).sum()
}

/// Raw two-row transition matrix `W(y|0)`, `W(y|1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    rows: [Vec<f64>; 2],
}

impl TransitionMatrix {
    pub fn new(row0: Vec<f64>, row1: Vec<f64>) -> Result<Self> {
        if row0.is_empty() || row0.len() != row1.len() {
            return Err(Error::validation(
                "matrix",
                format!(
                    "rows must be non-empty and of equal length (got {} and {})",
                    row0.len(),
                    row1.len()
                ),
            ));
        }
        for (x, row) in [&row0, &row1].into_iter().enumerate() {
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::validation(
                    "matrix",
                    format!("entry {v} of row {x} is not a probability"),
                ));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > MASS_TOL {
                return Err(Error::validation(
                    "matrix",
                    format!("row {x} sums to {s}, not 1"),
                ));
            }
        }
        Ok(Self { rows: [row0, row1] })
    }

    /// Build from a `2 x m` nested vector.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let [r0, r1]: [Vec<f64>; 2] = rows
            .try_into()
            .map_err(|r: Vec<Vec<f64>>| Error::validation("matrix", format!("expected 2 rows, got {}", r.len())))?;
        Self::new(r0, r1)
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn bsc(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Self::new(vec![1.0 - p, p], vec![p, 1.0 - p])
    }

    pub fn bec(eps: f64) -> Result<Self> {
        check_probability("eps", eps)?;
        Self::new(vec![1.0 - eps, eps, 0.0], vec![0.0, eps, 1.0 - eps])
    }
}

/// One atom of a Blackwell measure: posterior value `s` with probability `w`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub s: f64,
    pub w: f64,
}

/// Finite atomic probability measure on `[0, 1]` with mean 1/2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlackwellMeasure {
    atoms: Vec<Atom>,
}

impl BlackwellMeasure {
    /// Validate and canonicalize `(s, w)` pairs. Weights within `MASS_TOL`
    /// of unit total are renormalized; larger deviations are rejected.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(s, w) in &atoms {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::validation("atoms", format!("posterior value {s} outside [0, 1]")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::validation("atoms", format!("weight {w} is not a finite non-negative number")));
            }
        }
        let mut pts = canonicalize(atoms, MERGE_TOL);
        let t = total(&pts);
        if pts.is_empty() || (t - 1.0).abs() > MASS_TOL {
            return Err(Error::validation("atoms", format!("weights sum to {t}, not 1")));
        }
        pts.iter_mut().for_each(|a| a.1 /= t);
        let mean: f64 = pts.iter().map(|&(s, w)| s * w).sum();
        if (mean - 0.5).abs() > MASS_TOL {
            return Err(Error::validation("atoms", format!("mean posterior is {mean}, not 1/2")));
        }
        Ok(Self::from_canonical(pts))
    }

    /// Canonicalize internally produced atoms; validity is debug-asserted.
    pub(crate) fn from_points(pts: Vec<(f64, f64)>) -> Self {
        Self::from_canonical(canonicalize(pts, MERGE_TOL))
    }

    fn from_canonical(pts: Vec<(f64, f64)>) -> Self {
        let m = Self {
            atoms: pts.into_iter().map(|(s, w)| Atom { s, w }).collect(),
        };
        debug_assert!((m.total_weight() - 1.0).abs() <= MASS_TOL, "mass {}", m.total_weight());
        debug_assert!((m.mean() - 0.5).abs() <= MASS_TOL, "mean {}", m.mean());
        m
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.s * a.w).sum()
    }

    /// Check invariance under `s -> 1 - s`.
    pub fn symmetry(&self) -> SymmetryCertificate {
        let symmetric = self.atoms.iter().all(|a| {
            self.mirror_of(a.s)
                .is_some_and(|m| (m.w - a.w).abs() <= MASS_TOL)
        });
        SymmetryCertificate { symmetric }
    }

    fn mirror_of(&self, s: f64) -> Option<&Atom> {
        let target = 1.0 - s;
        let i = self.atoms.partition_point(|a| a.s < target - MERGE_TOL);
        self.atoms
            .get(i)
            .filter(|a| (a.s - target).abs() <= MERGE_TOL)
    }
}

/// Result of the mirror-symmetry check on a [`BlackwellMeasure`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryCertificate {
    pub symmetric: bool,
}

/// One BSC subchannel: used with probability `lambda`, crossover `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub lambda: f64,
    pub p: f64,
}

/// Symmetric channel as a compound of BSCs, sorted by crossover.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BscMixture {
    components: Vec<Component>,
}

impl BscMixture {
    /// Validate and canonicalize `(lambda, p)` pairs. Crossovers in `[0, 1]`
    /// are folded into `[0, 1/2]`; weights within `MASS_TOL` of unit total
    /// are renormalized.
    pub fn new(components: Vec<(f64, f64)>) -> Result<Self> {
        let mut pts = Vec::with_capacity(components.len());
        for (lambda, p) in components {
            if !(lambda >= 0.0 && lambda.is_finite()) {
                return Err(Error::validation("lambda", format!("{lambda} is not a finite non-negative weight")));
            }
            check_probability("p", p)?;
            pts.push((fold(p), lambda));
        }
        let mut pts = canonicalize(pts, MERGE_TOL);
        let t = total(&pts);
        if pts.is_empty() || (t - 1.0).abs() > MASS_TOL {
            return Err(Error::validation("lambda", format!("weights sum to {t}, not 1")));
        }
        pts.iter_mut().for_each(|c| c.1 /= t);
        Ok(Self::from_canonical(pts))
    }

    /// Canonicalize internally produced `(p, lambda)` points (already folded).
    pub(crate) fn from_points(pts: Vec<(f64, f64)>) -> Self {
        Self::from_canonical(canonicalize(pts, MERGE_TOL))
    }

    /// Like [`from_points`](Self::from_points) but merges only identical crossovers.
    pub(crate) fn from_points_exact(pts: Vec<(f64, f64)>) -> Self {
        Self::from_canonical(canonicalize(pts, 0.0))
    }

    pub(crate) fn from_canonical(pts: Vec<(f64, f64)>) -> Self {
        let m = Self {
            components: pts.into_iter().map(|(p, lambda)| Component { lambda, p }).collect(),
        };
        debug_assert!((m.total_weight() - 1.0).abs() <= MASS_TOL, "mass {}", m.total_weight());
        debug_assert!(m.components.iter().all(|c| (0.0..=0.5).contains(&c.p)));
        m
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.lambda).sum()
    }

    /// Weight of the component with crossover exactly `p`, or 0.
    pub fn weight_at(&self, p: f64) -> f64 {
        self.components
            .iter()
            .find(|c| c.p == p)
            .map_or(0.0, |c| c.lambda)
    }

    /// Erasure probability if the mixture has support in `{0, 1/2}`.
    pub fn as_bec(&self) -> Option<f64> {
        self.components
            .iter()
            .all(|c| c.p == 0.0 || c.p == 0.5)
            .then(|| self.weight_at(0.5))
    }
}

/// BSC with crossover `p` (folded).
pub fn make_bsc(p: f64) -> Result<BscMixture> {
    check_probability("p", p)?;
    Ok(BscMixture::from_canonical(vec![(fold(p), 1.0)]))
}

/// BEC with erasure probability `eps`: a perfect BSC with weight `1-eps`
/// and a useless one with weight `eps`.
pub fn make_bec(eps: f64) -> Result<BscMixture> {
    check_probability("eps", eps)?;
    Ok(BscMixture::from_points_exact(vec![(0.0, 1.0 - eps), (0.5, eps)]))
}

/// Erasure with probability `eps`, otherwise BSC(`p`).
pub fn make_hybrid(eps: f64, p: f64) -> Result<BscMixture> {
    check_probability("eps", eps)?;
    check_probability("p", p)?;
    Ok(BscMixture::from_points_exact(vec![(fold(p), 1.0 - eps), (0.5, eps)]))
}

/// Posterior law of a channel given by its transition matrix. Outputs with
/// zero total probability are skipped.
pub fn blackwell_from_transition(t: &TransitionMatrix) -> BlackwellMeasure {
    let pts = t
        .row(0)
        .iter()
        .zip(t.row(1))
        .filter(|(a, b)| **a + **b > 0.0)
        .map(|(&a, &b)| (a / (a + b), (a + b) / 2.0))
        .collect();
    BlackwellMeasure::from_points(pts)
}

/// Blackwell measure of a BSC mixture: `sum_i (lambda_i/2)(delta_p + delta_{1-p})`.
pub fn blackwell_from_mixture(c: &BscMixture) -> BlackwellMeasure {
    let mut pts = Vec::with_capacity(2 * c.len());
    for comp in c.components() {
        if comp.p == 0.5 {
            pts.push((0.5, comp.lambda));
        } else {
            pts.push((comp.p, comp.lambda / 2.0));
            pts.push((1.0 - comp.p, comp.lambda / 2.0));
        }
    }
    BlackwellMeasure::from_points(pts)
}

/// BSC decomposition of a mirror-symmetric measure.
pub fn mixture_from_blackwell(m: &BlackwellMeasure) -> Result<BscMixture> {
    let mut pts = Vec::new();
    for a in m.atoms() {
        if (a.s - 0.5).abs() <= MERGE_TOL {
            pts.push((0.5, a.w));
            continue;
        }
        let mirror = m
            .mirror_of(a.s)
            .filter(|b| (b.w - a.w).abs() <= MASS_TOL)
            .ok_or_else(|| Error::Asymmetric(format!("atom ({}, {}) has no matching mirror", a.s, a.w)))?;
        if a.s < 0.5 {
            pts.push((a.s, a.w + mirror.w));
        }
    }
    Ok(BscMixture::from_points(pts))
}

/// Weighted union of mixtures (a compound channel whose state is known at
/// the receiver).
pub fn compound(parts: &[(f64, BscMixture)]) -> Result<BscMixture> {
    if parts.is_empty() {
        return Err(Error::validation("parts", "no subchannels given"));
    }
    let t: f64 = parts.iter().map(|(w, _)| *w).sum();
    if parts.iter().any(|(w, _)| !(*w > 0.0)) || (t - 1.0).abs() > MASS_TOL {
        return Err(Error::validation("parts", format!("weights must be positive and sum to 1 (sum {t})")));
    }
    let pts = parts
        .iter()
        .flat_map(|(w, c)| c.components().iter().map(move |k| (k.p, w / t * k.lambda)))
        .collect();
    Ok(BscMixture::from_points(pts))
}

/// Channel description accepted on the command line and in files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelSpec {
    Bsc { p: f64 },
    Bec { eps: f64 },
    Hybrid { eps: f64, p: f64 },
    Mixture { components: Vec<ComponentSpec> },
    Transition { matrix: Vec<Vec<f64>> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub lambda: f64,
    pub p: f64,
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("channel", e.to_string()))
    }

    pub fn to_measure(&self) -> Result<BlackwellMeasure> {
        match self {
            ChannelSpec::Transition { matrix } => {
                Ok(blackwell_from_transition(&TransitionMatrix::from_rows(matrix.clone())?))
            }
            _ => Ok(blackwell_from_mixture(&self.to_mixture()?)),
        }
    }

    /// BSC decomposition; transition matrices must describe symmetric channels.
    pub fn to_mixture(&self) -> Result<BscMixture> {
        match self {
            ChannelSpec::Bsc { p } => make_bsc(*p),
            ChannelSpec::Bec { eps } => make_bec(*eps),
            ChannelSpec::Hybrid { eps, p } => make_hybrid(*eps, *p),
            ChannelSpec::Mixture { components } => {
                BscMixture::new(components.iter().map(|c| (c.lambda, c.p)).collect())
            }
            ChannelSpec::Transition { .. } => mixture_from_blackwell(&self.to_measure()?),
        }
    }

    pub fn from_mixture(c: &BscMixture) -> Self {
        ChannelSpec::Mixture {
            components: c
                .components()
                .iter()
                .map(|k| ComponentSpec { lambda: k.lambda, p: k.p })
                .collect(),
        }
    }
}
