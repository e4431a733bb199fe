//! Scalar helpers shared by every module: binary entropy, binary
//! convolution and crossover folding. Logarithms are base 2 throughout.

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Binary convolution `p(1-q) + (1-p)q`: crossover of two cascaded BSCs.
pub fn conv(p: f64, q: f64) -> f64 {
    p * (1.0 - q) + (1.0 - p) * q
}

/// Map a crossover probability into `[0, 1/2]` (BSC(p) and BSC(1-p) are equivalent).
pub fn fold(p: f64) -> f64 {
    p.min(1.0 - p)
}

/// `x log2 x` with the continuous extension at 0.
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}
