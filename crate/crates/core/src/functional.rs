//! Induced channel functionals `I_f(W) = E[f(S)]` and derived quantities.
//!
//! Each [`Functional`] fixes a function `f` on `[0, 1]`; evaluating it on a
//! Blackwell measure averages `f` over the atoms. On a BSC mixture the
//! average is taken component-wise as `(f(p) + f(1-p)) / 2`.
//!
//! Endpoint values use the continuous extensions: `0 log 0 = 0`,
//! `psi_r(0) = psi_r(1) = 1`, Hellinger terms vanish at 0 and 1 for
//! `alpha` in `(0, 1)`, and the `exp(-E0)` integrand equals `2^-rho` there.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{canonicalize, BlackwellMeasure, BscMixture, MERGE_TOL};
use crate::error::{Error, Result};
use crate::math::{h2, xlog2x};

/// A choice of `f : [0, 1] -> R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Functional {
    /// Symmetric capacity, `1 - h2(s)`.
    Capacity,
    /// `r`-th moment of the information density, `psi_r(s)`.
    MomentR { r: u32 },
    /// Hellinger affinity `2 s^alpha (1-s)^(1-alpha)`.
    Hellinger { alpha: f64 },
    /// Bhattacharyya parameter `2 sqrt(s(1-s))`.
    Bhattacharyya,
    /// `exp(-E0(rho))` in base 2: `2^-rho (s^(1/(1+rho)) + (1-s)^(1/(1+rho)))^(1+rho)`.
    GallagerExpNegE0 { rho: f64 },
    /// Bayesian information gain with prior `lambda` on input 0.
    BayesGain { lambda: f64 },
    /// `|2s - 1|`, equal to `1 - 2 P_e` under ML decoding.
    MlAgreement,
}

/// Shape of `f`, which fixes the direction of the polarization ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Curvature {
    Convex,
    Concave,
    Neither,
}

impl Functional {
    pub fn moment(r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain { field: "r", value: 0.0, range: "positive integers" });
        }
        Ok(Functional::MomentR { r })
    }

    pub fn hellinger(alpha: f64) -> Result<Self> {
        in_unit("alpha", alpha)?;
        Ok(Functional::Hellinger { alpha })
    }

    pub fn exp_neg_e0(rho: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::Domain { field: "rho", value: rho, range: "[0, inf)" });
        }
        Ok(Functional::GallagerExpNegE0 { rho })
    }

    pub fn bayes_gain(lambda: f64) -> Result<Self> {
        in_unit("lambda", lambda)?;
        Ok(Functional::BayesGain { lambda })
    }

    /// Every functional of the registry with its default parameters
    /// plus a few parameter choices.
    pub fn registry() -> Vec<Functional> {
        vec![
            Functional::Capacity,
            Functional::MomentR { r: 1 },
            Functional::MomentR { r: 2 },
            Functional::MomentR { r: 3 },
            Functional::Hellinger { alpha: 0.25 },
            Functional::Hellinger { alpha: 0.5 },
            Functional::Bhattacharyya,
            Functional::GallagerExpNegE0 { rho: 0.5 },
            Functional::GallagerExpNegE0 { rho: 1.0 },
            Functional::BayesGain { lambda: 1.0 / 3.0 },
            Functional::BayesGain { lambda: 0.5 },
            Functional::MlAgreement,
        ]
    }

    pub fn curvature(&self) -> Curvature {
        match self {
            Functional::Capacity | Functional::BayesGain { .. } | Functional::MlAgreement => Curvature::Convex,
            Functional::MomentR { r: 1 } => Curvature::Convex,
            Functional::MomentR { .. } => Curvature::Neither,
            Functional::Hellinger { .. } | Functional::Bhattacharyya | Functional::GallagerExpNegE0 { .. } => {
                Curvature::Concave
            }
        }
    }

    /// Pointwise value `f(s)`.
    pub fn f(&self, s: f64) -> f64 {
        let t = 1.0 - s;
        match *self {
            Functional::Capacity => 1.0 + xlog2x(s) + xlog2x(t),
            Functional::MomentR { r } => psi(s, r),
            Functional::Hellinger { alpha } if alpha == 0.5 => bhattacharyya(s),
            Functional::Hellinger { alpha } => 2.0 * s.powf(alpha) * t.powf(1.0 - alpha),
            Functional::Bhattacharyya => bhattacharyya(s),
            Functional::GallagerExpNegE0 { rho } => {
                let e = 1.0 / (1.0 + rho);
                (-rho).exp2() * (s.powf(e) + t.powf(e)).powf(1.0 + rho)
            }
            Functional::BayesGain { lambda } => {
                let l = 1.0 - lambda;
                l.min(lambda) - (2.0 * l * s).min(2.0 * lambda * t)
            }
            Functional::MlAgreement => (2.0 * s - 1.0).abs(),
        }
    }

    /// Value of `(f(p) + f(1-p)) / 2`, the functional of BSC(p).
    pub fn bsc(&self, p: f64) -> f64 {
        if p == 0.5 {
            return self.f(0.5);
        }
        (self.f(p) + self.f(1.0 - p)) / 2.0
    }
}

fn in_unit(field: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Domain { field, value: v, range: "[0, 1]" })
    }
}

fn bhattacharyya(s: f64) -> f64 {
    2.0 * (s * (1.0 - s)).sqrt()
}

/// `s (1 + log2 s)^r + (1-s)(1 + log2(1-s))^r`, extended by 1 at both ends.
fn psi(s: f64, r: u32) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 1.0;
    }
    let term = |x: f64| x * (1.0 + x.log2()).powi(r as i32);
    term(s) + term(1.0 - s)
}

impl fmt::Display for Functional {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::Capacity => write!(out, "capacity"),
            Functional::MomentR { r } => write!(out, "moment:r={r}"),
            Functional::Hellinger { alpha } => write!(out, "hellinger:alpha={alpha}"),
            Functional::Bhattacharyya => write!(out, "bhattacharyya"),
            Functional::GallagerExpNegE0 { rho } => write!(out, "exp-neg-e0:rho={rho}"),
            Functional::BayesGain { lambda } => write!(out, "bayes-gain:lambda={lambda}"),
            Functional::MlAgreement => write!(out, "ml-agreement"),
        }
    }
}

impl FromStr for Functional {
    type Err = Error;

    /// Parse `name` or `name:key=value`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = |reason: String| Error::validation("functional", reason);
        let (name, arg) = match text.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (text.trim(), None),
        };
        let param = |key: &str| -> Result<f64> {
            let arg = arg.ok_or_else(|| bad(format!("`{name}` needs `{key}=<value>`")))?;
            let (k, v) = arg
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `{key}=<value>`, got `{arg}`")))?;
            if k.trim() != key {
                return Err(bad(format!("unknown parameter `{}` for `{name}`", k.trim())));
            }
            v.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("`{}` is not a number", v.trim())))
        };
        let no_param = |f: Functional| match arg {
            None => Ok(f),
            Some(a) => Err(bad(format!("`{name}` takes no parameter (got `{a}`)"))),
        };
        match name {
            "capacity" => no_param(Functional::Capacity),
            "bhattacharyya" => no_param(Functional::Bhattacharyya),
            "ml-agreement" => no_param(Functional::MlAgreement),
            "moment" => {
                let r = param("r")?;
                if r.fract() != 0.0 || !(1.0..=64.0).contains(&r) {
                    return Err(Error::Domain { field: "r", value: r, range: "integers 1..=64" });
                }
                Functional::moment(r as u32)
            }
            "hellinger" => Functional::hellinger(param("alpha")?),
            "exp-neg-e0" => Functional::exp_neg_e0(param("rho")?),
            "bayes-gain" => Functional::bayes_gain(param("lambda")?),
            other => Err(bad(format!("unknown functional `{other}`"))),
        }
    }
}

/// `E[f(S)]` over the atoms of `m`.
pub fn eval(m: &BlackwellMeasure, f: &Functional) -> f64 {
    m.atoms().iter().map(|a| a.w * f.f(a.s)).sum()
}

/// `sum_i lambda_i (f(p_i) + f(1-p_i)) / 2`.
pub fn eval_mixture(c: &BscMixture, f: &Functional) -> f64 {
    c.components().iter().map(|k| k.lambda * f.bsc(k.p)).sum()
}

/// Channel dispersion `M_2 - I^2` (variance of the information density).
pub fn dispersion(c: &BscMixture) -> f64 {
    let i = eval_mixture(c, &Functional::Capacity);
    eval_mixture(c, &Functional::MomentR { r: 2 }) - i * i
}

/// `Var[h2(S)]`: the variance form obtained by minimizing
/// `E[(h2(S) - c)^2]` over `c`. It vanishes on every BSC and is not the
/// same quantity as [`dispersion`] in general.
pub fn dispersion_variational(m: &BlackwellMeasure) -> f64 {
    let mean: f64 = m.atoms().iter().map(|a| a.w * h2(a.s)).sum();
    m.atoms()
        .iter()
        .map(|a| a.w * (h2(a.s) - mean).powi(2))
        .sum()
}

/// Law of `1 - h2(S)` for a symmetric channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MipMeasure {
    /// `(phi, weight)` pairs sorted by `phi`.
    pub atoms: Vec<(f64, f64)>,
}

impl MipMeasure {
    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(x, w)| x * w).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|(x, w)| x * x * w).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.atoms.iter().map(|(x, w)| w * (x - m).powi(2)).sum()
    }
}

/// Mutual information profile: each BSC(p_i) contributes an atom at its
/// capacity with weight `lambda_i`.
pub fn mip(c: &BscMixture) -> MipMeasure {
    let pts = c
        .components()
        .iter()
        .map(|k| (Functional::Capacity.bsc(k.p), k.lambda))
        .collect();
    MipMeasure { atoms: canonicalize(pts, MERGE_TOL) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{blackwell_from_mixture, make_bec, make_bsc, make_hybrid};

    #[test]
    fn point_values_at_bsc_005() {
        let m = blackwell_from_mixture(&make_bsc(0.05).unwrap());
        assert!((eval(&m, &Functional::Capacity) - 0.7136).abs() < 5e-5);
        assert!((eval(&m, &Functional::MomentR { r: 2 }) - 1.3664).abs() < 5e-5);
        assert_eq!(eval(&blackwell_from_mixture(&make_bsc(0.5).unwrap()), &Functional::Capacity), 0.0);
    }

    #[test]
    fn hybrid_capacity() {
        let c = make_hybrid(0.12, 0.05).unwrap();
        assert!((eval_mixture(&c, &Functional::Capacity) - 0.6280).abs() < 5e-5);
    }

    #[test]
    fn bec_bhattacharyya_equals_erasure() {
        for eps in [0.0, 0.1, 0.37, 1.0] {
            let m = blackwell_from_mixture(&make_bec(eps).unwrap());
            assert!((eval(&m, &Functional::Bhattacharyya) - eps).abs() < 1e-15);
        }
    }

    #[test]
    fn endpoint_conventions() {
        assert_eq!(Functional::MomentR { r: 3 }.f(0.0), 1.0);
        assert_eq!(Functional::MomentR { r: 3 }.f(1.0), 1.0);
        assert_eq!(Functional::Hellinger { alpha: 0.3 }.f(0.0), 0.0);
        assert_eq!(Functional::Hellinger { alpha: 0.3 }.f(1.0), 0.0);
        assert_eq!(Functional::GallagerExpNegE0 { rho: 1.0 }.f(0.0), 0.5);
        assert_eq!(Functional::GallagerExpNegE0 { rho: 1.0 }.f(1.0), 0.5);
        assert_eq!(Functional::Capacity.f(0.0), 1.0);
    }

    #[test]
    fn perfect_channel_is_average_of_endpoints() {
        let c = make_bsc(0.0).unwrap();
        for f in Functional::registry() {
            assert_eq!(eval_mixture(&c, &f), (f.f(0.0) + f.f(1.0)) / 2.0, "{f}");
        }
    }

    #[test]
    fn ml_agreement_is_one_minus_twice_error() {
        for p in [0.0, 0.1, 0.3, 0.5] {
            let v = eval_mixture(&make_bsc(p).unwrap(), &Functional::MlAgreement);
            assert!((v - (1.0 - 2.0 * p)).abs() < 1e-15);
        }
    }

    #[test]
    fn dispersion_closed_forms() {
        for eps in [0.0, 0.12, 0.5, 0.9] {
            assert!((dispersion(&make_bec(eps).unwrap()) - eps * (1.0 - eps)).abs() < 1e-12);
        }
        assert!(dispersion(&make_bsc(0.5).unwrap()).abs() < 1e-15);
        let p: f64 = 0.11;
        let v = p * (1.0 - p) * ((1.0 - p) / p).log2().powi(2);
        assert!((dispersion(&make_bsc(p).unwrap()) - v).abs() < 1e-10);
    }

    #[test]
    fn variational_form_vanishes_on_bsc() {
        let m = blackwell_from_mixture(&make_bsc(0.2).unwrap());
        assert!(dispersion_variational(&m).abs() < 1e-15);
        let eps = 0.3;
        let m = blackwell_from_mixture(&make_bec(eps).unwrap());
        assert!((dispersion_variational(&m) - eps * (1.0 - eps)).abs() < 1e-15);
    }

    #[test]
    fn mip_examples() {
        let eps = 0.25;
        assert_eq!(mip(&make_bec(eps).unwrap()).atoms, vec![(0.0, eps), (1.0, 1.0 - eps)]);
        let p = 0.2;
        assert_eq!(mip(&make_bsc(p).unwrap()).atoms, vec![(1.0 - h2(p), 1.0)]);
        let c = make_hybrid(0.12, 0.05).unwrap();
        let m = mip(&c);
        let i = eval_mixture(&c, &Functional::Capacity);
        assert!((m.mean() - i).abs() < 1e-12);
        let i1 = 1.0 - h2(0.05);
        let var = 0.88 * (i1 - i).powi(2) + 0.12 * i.powi(2);
        assert!((m.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn parse_round_trip() {
        for text in [
            "capacity",
            "moment:r=2",
            "hellinger:alpha=0.5",
            "bhattacharyya",
            "exp-neg-e0:rho=1",
            "bayes-gain:lambda=0.3333333333",
            "ml-agreement",
        ] {
            let f: Functional = text.parse().unwrap();
            assert_eq!(f.to_string().parse::<Functional>().unwrap(), f);
        }
        assert!("moment".parse::<Functional>().is_err());
        assert!("moment:r=1.5".parse::<Functional>().is_err());
        assert!("hellinger:beta=0.5".parse::<Functional>().is_err());
        assert!("hellinger:alpha=2".parse::<Functional>().is_err());
        assert!("capacity:x=1".parse::<Functional>().is_err());
        assert!("entropy".parse::<Functional>().is_err());
    }

    #[test]
    fn hellinger_half_is_bhattacharyya_bitwise() {
        for i in 0..=100 {
            let s = i as f64 / 100.0;
            assert_eq!(Functional::Hellinger { alpha: 0.5 }.f(s), Functional::Bhattacharyya.f(s));
        }
    }
}
