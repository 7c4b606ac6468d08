use efset::{AppendOnlySet, DynSet, EliasFano, SampledPredecessor, SpaceReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn row(name: &str, r: &SpaceReport) {
    println!(
        "{name:8} n {:8} payload {:10} measured {:10} ef {:10} b {:10} red/n {:7.3}",
        r.n,
        r.payload_bits,
        r.measured_bits,
        r.ef_bits,
        r.b_bits,
        r.redundancy_per_n()
    );
}

fn main() -> efset::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for lg in [12u32, 16, 20] {
        let m = (1u64 << (2 * lg)) - 1;
        let mut v: Vec<u64> = (0..(1usize << lg) * 2).map(|_| rng.random_range(0..=m)).collect();
        v.sort_unstable();
        v.dedup();
        v.truncate(1 << lg);

        row("ef", &EliasFano::encode(&v, m)?.space_report());
        row("sampled", &SampledPredecessor::build(&v, m, 64)?.space_report());
        row("dynset", &DynSet::from_sorted(&v, m)?.space_report());
        row("append", &AppendOnlySet::from_sorted(&v, m, 256)?.space_report());
        println!();
    }
    Ok(())
}
