use std::time::Instant;

use efset::{EliasFano, SampledPredecessor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> efset::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = 1u64 << 40;
    let mut values: Vec<u64> = (0..1_000_000).map(|_| rng.random_range(0..=m)).collect();
    values.sort_unstable();
    values.dedup();

    let plain = EliasFano::encode(&values, m)?;
    let sampled = SampledPredecessor::build(&values, m, 64)?;
    let probes: Vec<u64> = (0..200_000).map(|_| rng.random_range(0..=m)).collect();

    let runs: [(&str, &dyn Fn(u64) -> Option<u64>); 2] =
        [("plain", &|x| plain.predecessor(x)), ("sampled", &|x| sampled.predecessor(x))];
    for (name, f) in runs {
        let t = Instant::now();
        let sum = probes.iter().filter_map(|&x| f(x)).fold(0u64, u64::wrapping_add);
        println!("{name:8} {:6.1} ns/query (checksum {sum:x})", t.elapsed().as_nanos() as f64 / probes.len() as f64);
    }

    let r = sampled.space_report();
    println!("sampled: {:.3} bits/element over {} samples", r.bits_per_element(), sampled.router().len());
    for (part, bits) in &r.components {
        println!("  {part:12} {bits}");
    }
    Ok(())
}
