use efset::{DynSet, SortedOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> efset::Result<()> {
    let m = 1u64 << 32;
    let mut set = DynSet::new(m)?;
    let mut oracle = SortedOracle::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    for step in 0..200_000 {
        let x = rng.random_range(0..=m);
        if rng.random_bool(0.7) {
            assert_eq!(set.insert(x)?, oracle.insert(x));
        } else if let Some(y) = oracle.successor(x) {
            assert_eq!(set.delete(y)?, oracle.remove(y));
        }
        if step % 50_000 == 0 {
            println!("step {step:6}: n {:6}, trees {:3}, class {}", set.len(), set.tree_count(), set.class());
        }
    }
    set.check().expect("structure audit");

    let x = m / 3;
    let r = set.rank(x);
    println!("rank({x}) = {r}, access({r}) = {:?}, pred {:?}", set.access(r).ok(), set.predecessor(x));
    assert_eq!(set.predecessor(x), oracle.predecessor(x));
    assert_eq!(set.to_vec(), oracle.to_vec());

    let s = set.space_report();
    println!("{:.3} bits/element, {:.3} above the EF bound", s.bits_per_element(), s.redundancy_per_n());
    Ok(())
}
