use efset::AppendOnlySet;

fn main() -> efset::Result<()> {
    let mut set = AppendOnlySet::with_block_len(1 << 30, 4)?;
    for x in [3, 4, 7, 13, 14, 15, 21, 25, 36, 38] {
        set.append(x)?;
    }
    // two full blocks are sealed, the rest waits in the buffer
    println!("n = {}, max = {:?}", set.len(), set.max());
    println!("pred(14) = {:?}, pred(37) = {:?}", set.predecessor(14), set.predecessor(37));

    match set.append(30) {
        Err(e) => println!("append(30) rejected: {e}"),
        Ok(()) => unreachable!(),
    }

    set.freeze()?;
    println!("frozen, append(40): {:?}", set.append(40).err().map(|e| e.to_string()));
    let r = set.space_report();
    println!("payload {} bits, measured {} bits", r.payload_bits, r.measured_bits);
    println!("{:?}", set.iter().collect::<Vec<_>>());
    Ok(())
}
