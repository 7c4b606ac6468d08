use efset::{ef_bits, EliasFano};

fn main() -> efset::Result<()> {
    let values = [3, 4, 7, 13, 14, 15, 21, 25, 36, 38, 54, 62];
    let ef = EliasFano::encode(&values, 63)?;

    println!("n = {}, m = {}, low width = {}", ef.len(), ef.universe(), ef.low_width());
    println!("payload {} bits, bound {} bits", ef.payload_bits(), ef_bits(12, 63));
    println!("high bits: {}", (0..ef.high().len()).map(|i| if ef.high().get(i).unwrap() { '1' } else { '0' }).collect::<String>());

    println!("access(5) = {}", ef.access(5)?);
    for x in [0, 14, 16, 63] {
        // predecessor is strict, successor is not
        println!("x = {x:2}: rank {:2}, pred {:?}, succ {:?}", ef.rank(x), ef.predecessor(x), ef.successor(x));
    }
    assert_eq!(ef.decode(), values);
    Ok(())
    // $ cargo run --example static_ef
}
