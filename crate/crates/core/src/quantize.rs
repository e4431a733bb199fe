//! Dyadic quantization and quantized polar code construction.
//!
//! `Q(p) = (D/2) ceil(2p / D)` with `D = 2^-L` rounds a crossover up to the
//! right endpoint of its bin, which degrades the channel and costs at most
//! `h2(D/2)` bits of capacity. The pipeline quantizes once up front and
//! again after every polar step, so a path of length `n` loses at most
//! `2n h2(D/2)`.
//!
//! [`construct_code`] builds all `2^n` channels of a code by depth-first
//! descent with shared prefixes: every node is computed exactly once and
//! only the current root-to-leaf path is held in memory.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::channel::BscMixture;
use crate::error::{Error, Result};
use crate::functional::{eval_mixture, Functional};
use crate::grid::{Grid, Node};
use crate::math::h2;
use crate::polar::PolarIndex;

/// Budget on `n 2^n 2^L`, the estimated work of a full construction.
pub const MAX_CONSTRUCTION_WORK: f64 = 1e10;

/// Quantizer resolution: `D = 2^-L`, bin width `D/2` on `[0, 1/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantizerConfig {
    levels: u32,
}

impl QuantizerConfig {
    pub fn new(levels: u32) -> Result<Self> {
        if !(1..=52).contains(&levels) {
            return Err(Error::Domain {
                field: "L",
                value: levels as f64,
                range: "integers 1..=52",
            });
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// `D = 2^-L`.
    pub fn delta(&self) -> f64 {
        (-(self.levels as f64)).exp2()
    }

    /// Bin width `D/2`.
    pub fn bin_width(&self) -> f64 {
        self.delta() / 2.0
    }

    /// Capacity lost by one quantization, at most `h2(D/2)`.
    pub fn step_loss(&self) -> f64 {
        h2(self.bin_width())
    }

    /// Loss budget of a path with `n` polar steps: `2n h2(D/2)`.
    pub fn path_bound(&self, n: usize) -> f64 {
        2.0 * n as f64 * self.step_loss()
    }
}

/// Round `p` up to the next multiple of `D/2`. Multiples are fixed points.
pub fn quantize_p(p: f64, cfg: QuantizerConfig) -> Result<f64> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::Domain { field: "p", value: p, range: "[0, 1/2]" });
    }
    let scale = (cfg.levels as f64 + 1.0).exp2();
    // Scaling by a power of two is exact, so the ceiling sees the true value.
    Ok((p * scale).ceil() / scale)
}

/// Quantize every component and merge components sharing a bin.
pub fn quantize_mixture(c: &BscMixture, cfg: QuantizerConfig) -> BscMixture {
    let pts = c
        .components()
        .iter()
        .map(|k| (quantize_p(k.p, cfg).expect("canonical crossover"), k.lambda))
        .collect();
    BscMixture::from_points_exact(pts)
}

/// Quantized successive polarization: quantize, then alternate polar step
/// and quantization along `b`. Returns the final mixture and the loss bound
/// `2 len(b) h2(D/2)`.
pub fn polarize_path_quantized(c: &BscMixture, b: &PolarIndex, cfg: QuantizerConfig) -> (BscMixture, f64) {
    let grid = Grid::new(cfg.levels);
    let mut node = grid.node(&quantize_mixture(c, cfg));
    for &branch in b.branches() {
        node = grid.child(&node, branch);
    }
    (grid.mixture(&node), cfg.path_bound(b.len()))
}

/// One quantized polar step of a mixture already on the grid of `cfg`.
pub fn quantized_step(c: &BscMixture, branch: crate::polar::Branch, cfg: QuantizerConfig) -> BscMixture {
    let grid = Grid::new(cfg.levels);
    let on_grid = quantize_mixture(c, cfg);
    grid.mixture(&grid.child(&grid.node(&on_grid), branch))
}

/// Per-index row of a construction report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexRecord {
    /// Branch string, first step leftmost.
    pub index: String,
    /// Capacity of the quantized channel.
    pub capacity: f64,
    /// Bhattacharyya parameter of the quantized channel.
    pub bhattacharyya: f64,
    /// Lower bound on the true capacity (equal to `capacity`).
    pub capacity_lower: f64,
    /// Upper bound on the quantization loss, `2n h2(D/2)`.
    pub bound_slack: f64,
}

/// Mean capacity and share of near-perfect channels at one depth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub mean_capacity: f64,
    /// Fraction of channels at this depth with capacity above 0.99.
    pub reliable_fraction: f64,
}

/// Machine-readable summary line of a construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSummary {
    pub n: usize,
    #[serde(rename = "L")]
    pub levels: u32,
    pub mean_capacity: f64,
    /// `I(W) - 2n h2(D/2)`.
    pub theoretical_floor: f64,
}

/// All `2^n` quantized channels of a code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub n: usize,
    pub levels: u32,
    /// Capacity of the unquantized input channel.
    pub input_capacity: f64,
    /// Records in index order (`index` read as a binary number).
    pub records: Vec<IndexRecord>,
    pub mean_capacity: f64,
    pub theoretical_floor: f64,
    /// Depths `0..=n`, each summarizing the `2^depth` intermediate channels.
    pub levels_summary: Vec<LevelSummary>,
}

/// Options for [`construct_code_with`].
#[derive(Clone, Debug, Default)]
pub struct ConstructOptions {
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
}

/// Estimated work of a construction, `n 2^n 2^L`.
pub fn construction_work(n: usize, cfg: QuantizerConfig) -> f64 {
    n as f64 * (n as f64).exp2() * (cfg.levels as f64).exp2()
}

pub fn construct_code(c: &BscMixture, n: usize, cfg: QuantizerConfig) -> Result<ConstructionReport> {
    construct_code_with(c, n, cfg, &ConstructOptions::default())
}

/// Quantized channels for every index of length `n`. Output does not
/// depend on the number of threads.
pub fn construct_code_with(
    c: &BscMixture,
    n: usize,
    cfg: QuantizerConfig,
    opts: &ConstructOptions,
) -> Result<ConstructionReport> {
    if n == 0 {
        return Err(Error::Domain { field: "n", value: 0.0, range: "positive integers" });
    }
    let work = construction_work(n, cfg);
    if work > MAX_CONSTRUCTION_WORK {
        return Err(Error::ResourceCap {
            what: "code construction",
            needed: work,
            limit: MAX_CONSTRUCTION_WORK,
            hint: "; reduce n or L",
        });
    }
    let run = || build(c, n, cfg);
    match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::validation("threads", e.to_string()))?
            .install(run),
        None => run(),
    }
}

fn build(c: &BscMixture, n: usize, cfg: QuantizerConfig) -> Result<ConstructionReport> {
    let grid = Grid::new(cfg.levels);
    let root = grid.node(&quantize_mixture(c, cfg));
    let mut caps: Vec<Vec<f64>> = (0..=n).map(|d| vec![0.0; 1 << d]).collect();
    let mut bhat = vec![0.0; 1 << n];
    let slices: Vec<&mut [f64]> = caps.iter_mut().map(|v| v.as_mut_slice()).collect();
    descend(&grid, root, slices, &mut bhat);

    let slack = cfg.path_bound(n);
    let input_capacity = eval_mixture(c, &Functional::Capacity);
    let leaves = &caps[n];
    let records = leaves
        .iter()
        .zip(&bhat)
        .enumerate()
        .map(|(i, (&cap, &z))| IndexRecord {
            index: PolarIndex::from_int(i as u64, n).to_string(),
            capacity: cap,
            bhattacharyya: z,
            capacity_lower: cap,
            bound_slack: slack,
        })
        .collect();
    let levels_summary = caps
        .iter()
        .enumerate()
        .map(|(level, v)| LevelSummary {
            level,
            mean_capacity: v.iter().sum::<f64>() / v.len() as f64,
            reliable_fraction: v.iter().filter(|&&x| x > 0.99).count() as f64 / v.len() as f64,
        })
        .collect::<Vec<_>>();
    Ok(ConstructionReport {
        n,
        levels: cfg.levels,
        input_capacity,
        records,
        mean_capacity: levels_summary[n].mean_capacity,
        theoretical_floor: input_capacity - slack,
        levels_summary,
    })
}

/// Visit `node` and its subtree. `caps[d]` receives the capacities of the
/// descendants `d` steps below (`caps[0]` has length 1); `bhat` receives
/// the Bhattacharyya parameters of the leaves.
fn descend(grid: &Grid, node: Node, mut caps: Vec<&mut [f64]>, bhat: &mut [f64]) {
    let (cap, z) = grid.eval(&node);
    caps[0][0] = cap;
    if caps.len() == 1 {
        bhat[0] = z;
        return;
    }
    let (minus, plus) = grid.children(&node);
    drop(node);
    let mut left = Vec::with_capacity(caps.len() - 1);
    let mut right = Vec::with_capacity(caps.len() - 1);
    for s in caps.drain(1..) {
        let (a, b) = s.split_at_mut(s.len() / 2);
        left.push(a);
        right.push(b);
    }
    let (bl, br) = bhat.split_at_mut(bhat.len() / 2);
    rayon::join(|| descend(grid, minus, left, bl), || descend(grid, plus, right, br));
}

/// Twelve significant digits, positional notation for moderate magnitudes.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        format!("{:.*}", (11 - e) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

impl ConstructionReport {
    pub fn summary(&self) -> ConstructionSummary {
        ConstructionSummary {
            n: self.n,
            levels: self.levels,
            mean_capacity: self.mean_capacity,
            theoretical_floor: self.theoretical_floor,
        }
    }

    /// CSV with header `index,capacity,bhattacharyya,capacity_lower,bound_slack`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::validation("out", e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "capacity", "bhattacharyya", "capacity_lower", "bound_slack"])
            .map_err(io)?;
        for r in &self.records {
            w.write_record([
                r.index.clone(),
                format_sig(r.capacity),
                format_sig(r.bhattacharyya),
                format_sig(r.capacity_lower),
                format_sig(r.bound_slack),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::validation("out", e.to_string()))
    }
}

/// Parse records written by [`ConstructionReport::write_csv`].
pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<IndexRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<Vec<IndexRecord>, _>>()
        .map_err(|e| Error::validation("csv", e.to_string()))
}
