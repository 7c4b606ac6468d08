use efset::{AppendOnlySet, DynSet, EliasFano};

fn main() -> efset::Result<()> {
    let values: Vec<u64> = (0..5000).map(|i| i * i).collect();
    let m = values[values.len() - 1];

    let ef = EliasFano::encode(&values, m)?;
    let ef_bytes = ef.to_bytes();
    let bytes = &ef_bytes;
    assert_eq!(EliasFano::from_bytes(bytes)?.decode(), values);
    println!("ef:     {} bytes, magic {:?}", bytes.len(), String::from_utf8_lossy(&bytes[..4]));

    let mut dyn_set = DynSet::from_sorted(&values, m)?;
    dyn_set.delete(49)?;
    let bytes = dyn_set.to_bytes();
    let back = DynSet::from_bytes(&bytes)?;
    assert_eq!(back.to_bytes(), bytes);
    println!("dynset: {} bytes, {} values", bytes.len(), back.len());

    let app = AppendOnlySet::from_sorted(&values, m, 256)?;
    let bytes = app.to_bytes();
    println!("append: {} bytes, {} values", bytes.len(), AppendOnlySet::from_bytes(&bytes)?.len());

    // truncated and foreign input fail cleanly
    println!("{}", EliasFano::from_bytes(&ef_bytes[..10]).unwrap_err());
    println!("{}", DynSet::from_bytes(&bytes).unwrap_err());
    Ok(())
}
