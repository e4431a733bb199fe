//! Mean capacity of quantized constructions for the hybrid erasure/BSC
//! channel `(eps, p) = (0.12, 0.05)`.
//!
//! One construction of depth `n` also yields every shallower depth, so
//! `cargo run --release --example table_two -- 14 14` prints the rows for
//! `n = 10, 12, 14` at `L = 14` from a single run.

use std::time::Instant;

use blackwell_polar::channel::make_hybrid;
use blackwell_polar::quantize::{construct_code, QuantizerConfig};

fn main() -> anyhow::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (levels, n) = match args[..] {
        [l, n] => (l, n as usize),
        _ => anyhow::bail!("usage: table_two <L> <n>"),
    };
    let w = make_hybrid(0.12, 0.05)?;
    let cfg = QuantizerConfig::new(levels)?;
    let start = Instant::now();
    let report = construct_code(&w, n, cfg)?;
    println!("L,n,mean_capacity,theoretical_floor,reliable_fraction");
    for s in report.levels_summary.iter().filter(|s| s.level >= 2 && s.level % 2 == 0) {
        let floor = report.input_capacity - cfg.path_bound(s.level);
        println!("{levels},{},{:.6},{:.6},{:.6}", s.level, s.mean_capacity, floor, s.reliable_fraction);
    }
    eprintln!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
