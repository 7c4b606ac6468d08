use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use efset::{AppendOnlySet, DynSet, SortedOracle};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::args::{BenchArgs, BuildArgs, QueryArgs, QueryOp, SpaceArgs, StructureKind, VerifyArgs};
use crate::input::{self, read_values};
use crate::record::{write_records, BenchRecord};
use crate::structure::AnySet;
use crate::workload::{tape_from_text, tape_to_text, Op, Workload};
use crate::{CliError, CliResult};

/// Audit interval for the dynamic set during verify.
const AUDIT_EVERY: usize = 10_000;
/// Universes up to this bound get exhaustive predecessor sweeps.
const EXHAUSTIVE_LIMIT: u64 = 1 << 12;

pub fn build(a: &BuildArgs, out: &mut dyn Write) -> CliResult<()> {
    let input = read_values(&a.input, a.format)?;
    if input.values.is_empty() {
        return Err(CliError::Invalid("input holds no values; at least one is required".into()));
    }
    let m = a.universe.unwrap_or_else(|| *input.values.iter().max().unwrap());
    input.check_universe(m)?;
    if a.structure != StructureKind::Dynset {
        input.check_increasing()?;
    }
    let set = AnySet::build(a.structure, &input.values, m, a.block)?;
    let bytes = set.to_bytes();
    input::write_file(&a.out, &bytes)?;
    let r = set.space_report();
    let mut summary = json!({
        "structure": a.structure.id(),
        "n": set.len(),
        "m": m,
        "payload_bits": r.payload_bits,
        "measured_bits": r.measured_bits,
        "ef_bits": r.ef_bits,
        "b_bits": r.b_bits,
        "bytes": bytes.len(),
    });
    if let Some(ell) = set.low_width() {
        summary["ell"] = json!(ell);
    }
    writeln!(out, "{summary}")?;
    Ok(())
}

pub fn query(a: &QueryArgs, out: &mut dyn Write) -> CliResult<()> {
    let set = AnySet::load(a.structure, &input::read_file(&a.input)?, a.block)?;
    for &arg in &a.args {
        let (name, result) = match a.op {
            QueryOp::Access => {
                let v = usize::try_from(arg).ok().and_then(|i| set.access(i)).ok_or_else(|| {
                    CliError::Invalid(format!("rank {arg} out of range for {} values", set.len()))
                })?;
                ("access", json!(v))
            }
            QueryOp::Predecessor => ("predecessor", json!(set.predecessor(arg))),
            QueryOp::Successor => ("successor", json!(set.successor(arg)?)),
            QueryOp::Rank => ("rank", json!(set.rank(arg)?)),
            QueryOp::Contains => ("contains", json!(set.contains(arg))),
        };
        if a.json {
            writeln!(out, "{}", json!({"op": name, "arg": arg, "result": result}))?;
        } else {
            let shown = if result.is_null() { "none".to_string() } else { result.to_string() };
            writeln!(out, "{name} {arg} {shown}")?;
        }
    }
    Ok(())
}

struct Divergence {
    op_index: usize,
    op: String,
    structure: String,
    oracle: String,
}

/// Compares one answer; keeps only the first divergence.
fn compare<T: PartialEq + std::fmt::Debug>(
    first: &mut Option<Divergence>,
    op_index: usize,
    op: &dyn std::fmt::Display,
    got: T,
    want: T,
) {
    if got != want && first.is_none() {
        *first = Some(Divergence {
            op_index,
            op: op.to_string(),
            structure: format!("{got:?}"),
            oracle: format!("{want:?}"),
        });
    }
}

struct VerifyStats {
    ops: usize,
    audits: usize,
    sweeps: usize,
    final_len: usize,
}

pub fn verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let w = Workload::from_args(&a.workload)?;
    let (tape, initial) = match &a.tape {
        Some(path) => {
            let text = String::from_utf8(input::read_file(path)?)
                .map_err(|e| CliError::Invalid(format!("tape: {e}")))?;
            (tape_from_text(&text)?, Vec::new())
        }
        None => {
            let tape = if a.structure == StructureKind::Append { w.append_tape() } else { w.tape() };
            let initial = if a.structure == StructureKind::Append { Vec::new() } else { w.initial()? };
            (tape, initial)
        }
    };
    if let Some(path) = &a.out {
        input::write_file(path, tape_to_text(&tape).as_bytes())?;
    }
    check_tape(a.structure, &tape, w.universe)?;
    let mut first = None;
    let stats = match a.structure {
        StructureKind::Dynset => verify_dynset(&tape, &initial, w.universe, a.fault_at, &mut first)?,
        StructureKind::Append => verify_append(&tape, w.universe, a.block, a.fault_at, &mut first)?,
        kind => verify_static(kind, &tape, &initial, w.universe, a.block, a.fault_at, &mut first)?,
    };
    if let Some(d) = first {
        return Err(CliError::Divergence(format!(
            "op {} ({}) with seed {}: structure answered {}, oracle {}",
            d.op_index, d.op, w.seed, d.structure, d.oracle
        )));
    }
    let summary = json!({
        "structure": a.structure.id(),
        "seed": w.seed,
        "m": w.universe,
        "ops": stats.ops,
        "final_n": stats.final_len,
        "audits": stats.audits,
        "exhaustive_sweeps": stats.sweeps,
        "divergences": 0,
    });
    if a.json {
        writeln!(out, "{summary}")?;
    } else {
        writeln!(
            out,
            "ok: {} ops on {} (seed {}, m {}), final n {}, {} audits, {} exhaustive sweeps, 0 divergences",
            stats.ops,
            a.structure.id(),
            w.seed,
            w.universe,
            stats.final_len,
            stats.audits,
            stats.sweeps
        )?;
    }
    Ok(())
}

/// Rejects tapes the structure cannot replay.
fn check_tape(kind: StructureKind, tape: &[Op], m: u64) -> CliResult<()> {
    let mut last: Option<u64> = None;
    for (i, op) in tape.iter().enumerate() {
        let bad = |why: &str| Err(CliError::Invalid(format!("tape op {i} ({op}): {why}")));
        match (*op, kind) {
            (Op::Insert(x) | Op::Delete(x) | Op::Append(x), _) if x > m => return bad("value exceeds the universe"),
            (Op::Append(_), StructureKind::Dynset | StructureKind::Ef | StructureKind::Sampled) => {
                return bad("append needs the append-only structure")
            }
            (Op::Insert(_) | Op::Delete(_) | Op::DeleteRank(_), StructureKind::Append) => {
                return bad("the append-only structure cannot insert or delete")
            }
            (Op::Append(x), StructureKind::Append) => {
                if last.is_some_and(|l| x <= l) {
                    return bad("appends must be strictly increasing");
                }
                last = Some(x);
            }
            _ => {}
        }
    }
    Ok(())
}

fn verify_dynset(
    tape: &[Op],
    initial: &[u64],
    m: u64,
    fault_at: Option<usize>,
    first: &mut Option<Divergence>,
) -> CliResult<VerifyStats> {
    let mut set = DynSet::from_sorted(initial, m)?;
    let mut oracle = SortedOracle::from_sorted(initial);
    let mut audits = 0;
    for (i, op) in tape.iter().enumerate() {
        if fault_at == Some(i) {
            // Corrupt the structure behind the oracle's back.
            match oracle.select(oracle.len() / 2) {
                Some(x) => set.delete(x)?,
                None => set.insert(m / 2)?,
            };
        }
        match *op {
            Op::Insert(x) => compare(first, i, op, set.insert(x)?, oracle.insert(x)),
            Op::Delete(x) => compare(first, i, op, set.delete(x)?, oracle.remove(x)),
            Op::DeleteRank(r) => {
                if let Some(x) = (!oracle.is_empty()).then(|| oracle.select(r as usize % oracle.len()).unwrap()) {
                    compare(first, i, op, set.delete(x)?, oracle.remove(x));
                }
            }
            Op::Access(r) => {
                if !oracle.is_empty() {
                    let k = r as usize % oracle.len();
                    compare(first, i, op, set.access(k).ok(), oracle.select(k));
                }
            }
            Op::Pred(x) => compare(first, i, op, set.predecessor(x), oracle.predecessor(x)),
            Op::Append(_) => unreachable!("rejected by check_tape"),
        }
        compare(first, i, &format_args!("size after {op}"), set.len(), oracle.len());
        if (i + 1) % AUDIT_EVERY == 0 {
            audits += 1;
            if let Err(e) = set.check() {
                compare(first, i, &format_args!("audit after {op}"), Err::<(), _>(e), Ok(()));
            }
        }
        if first.is_some() {
            break;
        }
    }
    let end = tape.len();
    if first.is_none() {
        audits += 1;
        if let Err(e) = set.check() {
            compare(first, end, &"final audit", Err::<(), _>(e), Ok(()));
        }
        compare(first, end, &"final scan", set.to_vec(), oracle.to_vec());
    }
    let mut sweeps = 0;
    if first.is_none() && m <= EXHAUSTIVE_LIMIT {
        sweeps += 1;
        for x in 0..=m + 1 {
            compare(first, end, &format_args!("sweep pred {x}"), set.predecessor(x), oracle.predecessor(x));
        }
    }
    Ok(VerifyStats {
        ops: tape.len(),
        audits,
        sweeps,
        final_len: set.len(),
    })
}

fn verify_append(
    tape: &[Op],
    m: u64,
    block: Option<usize>,
    fault_at: Option<usize>,
    first: &mut Option<Divergence>,
) -> CliResult<VerifyStats> {
    let mut set = AppendOnlySet::with_block_len(m, block.unwrap_or(efset::append::DEFAULT_K))?;
    let mut oracle: Vec<u64> = Vec::new();
    for (i, op) in tape.iter().enumerate() {
        let skew = u64::from(fault_at.is_some_and(|f| i >= f));
        match *op {
            Op::Append(x) => {
                set.append(x)?;
                oracle.push(x);
            }
            Op::Access(r) => {
                if !oracle.is_empty() {
                    let k = r as usize % oracle.len();
                    compare(first, i, op, set.access(k).ok().map(|v| v + skew), Some(oracle[k]));
                }
            }
            Op::Pred(x) => {
                let r = oracle.partition_point(|&v| v < x);
                let want = r.checked_sub(1).map(|j| oracle[j]);
                compare(first, i, op, set.predecessor(x).map(|v| v + skew), want);
            }
            _ => unreachable!("rejected by check_tape"),
        }
        if first.is_some() {
            break;
        }
    }
    let end = tape.len();
    if first.is_none() {
        compare(first, end, &"final scan", set.iter().collect::<Vec<_>>(), oracle.clone());
    }
    let mut sweeps = 0;
    if first.is_none() && m <= EXHAUSTIVE_LIMIT {
        sweeps += 1;
        for x in 0..=m + 1 {
            let r = oracle.partition_point(|&v| v < x);
            compare(first, end, &format_args!("sweep pred {x}"), set.predecessor(x), r.checked_sub(1).map(|j| oracle[j]));
        }
    }
    Ok(VerifyStats {
        ops: tape.len(),
        audits: 0,
        sweeps,
        final_len: set.len(),
    })
}

/// Static structures replay only the queries; updates in the tape are skipped.
fn verify_static(
    kind: StructureKind,
    tape: &[Op],
    initial: &[u64],
    m: u64,
    block: Option<usize>,
    fault_at: Option<usize>,
    first: &mut Option<Divergence>,
) -> CliResult<VerifyStats> {
    if initial.is_empty() {
        return Err(CliError::Invalid("static structures need a generated workload (n ≥ 1)".into()));
    }
    let set = AnySet::build(kind, initial, m, block)?;
    let mut queries = 0;
    for (i, op) in tape.iter().enumerate() {
        let skew = u64::from(fault_at.is_some_and(|f| i >= f));
        match *op {
            Op::Access(r) => {
                let k = r as usize % initial.len();
                compare(first, i, op, set.access(k).map(|v| v + skew), Some(initial[k]));
            }
            Op::Pred(x) => {
                let r = initial.partition_point(|&v| v < x);
                let want = r.checked_sub(1).map(|j| initial[j]);
                compare(first, i, op, set.predecessor(x).map(|v| v + skew), want);
            }
            _ => continue,
        }
        queries += 1;
        if first.is_some() {
            break;
        }
    }
    let mut sweeps = 0;
    if first.is_none() && m <= EXHAUSTIVE_LIMIT {
        sweeps += 1;
        for x in 0..=m + 1 {
            let r = initial.partition_point(|&v| v < x);
            let want = r.checked_sub(1).map(|j| initial[j]);
            compare(first, tape.len(), &format_args!("sweep pred {x}"), set.predecessor(x), want);
        }
    }
    Ok(VerifyStats {
        ops: queries,
        audits: 0,
        sweeps,
        final_len: set.len(),
    })
}

fn sizes(list: &[u64], n: u64) -> Vec<u64> {
    if list.is_empty() {
        vec![n]
    } else {
        list.to_vec()
    }
}

fn emit(records: &[BenchRecord], json: bool, path: Option<&std::path::Path>, out: &mut dyn Write) -> CliResult<()> {
    write_records(records, json, out)?;
    if let Some(p) = path {
        let mut buf = Vec::new();
        write_records(records, json, &mut buf)?;
        input::write_file(p, &buf)?;
    }
    Ok(())
}

pub fn space(a: &SpaceArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut records = Vec::new();
    for n in sizes(&a.sizes, a.workload.n) {
        let w = Workload::with_size(&a.workload, n)?;
        let values = w.initial()?;
        let start = Instant::now();
        let set = if a.incremental && a.structure == StructureKind::Dynset {
            let mut shuffled = values.clone();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(w.seed));
            AnySet::build(a.structure, &shuffled, w.universe, a.block)?
        } else {
            AnySet::from_sorted(a.structure, &values, w.universe, a.block)?
        };
        let ns = start.elapsed().as_nanos() as u64;
        let r = set.space_report();
        records.push(BenchRecord::new(a.structure.id(), n, w.universe, "space", n, ns, r.measured_bits));
    }
    emit(&records, a.json, a.out.as_deref(), out)
}

/// Times `f` over `reps` runs of `count` operations each and returns one record.
fn timed(
    id: &str,
    n: u64,
    m: u64,
    op: &str,
    count: usize,
    reps: usize,
    bits: u64,
    mut f: impl FnMut() -> u64,
) -> BenchRecord {
    let mut total = 0u64;
    for _ in 0..reps {
        let start = Instant::now();
        black_box(f());
        total += start.elapsed().as_nanos() as u64;
    }
    BenchRecord::new(id, n, m, op, (count * reps) as u64, total, bits)
}

pub fn bench(a: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    let reps = a.repetitions.max(1);
    let id = a.structure.id();
    let mut records = Vec::new();
    for n in sizes(&a.sizes, a.workload.n) {
        let w = Workload::with_size(&a.workload, n)?;
        let m = w.universe;
        let values = w.initial()?;
        let mut rng = ChaCha8Rng::seed_from_u64(w.seed ^ 0xbe9c);
        let count = w.ops.max(1);
        let ranks: Vec<usize> = (0..count).map(|_| rng.random_range(0..values.len())).collect();
        let probes: Vec<u64> = (0..count).map(|_| rng.random_range(0..=m)).collect();

        if a.structure == StructureKind::Append {
            let k = a.block.unwrap_or(efset::append::DEFAULT_K);
            let rec = timed(id, n, m, "append", values.len(), reps, 0, || {
                let mut s = AppendOnlySet::with_block_len(m, k).unwrap();
                for &v in &values {
                    s.append(v).unwrap();
                }
                s.len() as u64
            });
            let set = AppendOnlySet::from_sorted(&values, m, k)?;
            let bits = set.space_report().measured_bits;
            records.push(BenchRecord::new(id, n, m, "append", rec.count, rec.total_ns, bits));
        }

        let set = AnySet::from_sorted(a.structure, &values, m, a.block)?;
        let bits = set.space_report().measured_bits;
        // Warm-up pass over both query kinds.
        black_box(ranks.iter().map(|&i| set.access(i).unwrap_or(0)).fold(0u64, u64::wrapping_add));
        black_box(probes.iter().map(|&x| set.predecessor(x).unwrap_or(0)).fold(0u64, u64::wrapping_add));

        records.push(timed(id, n, m, "access", count, reps, bits, || {
            ranks.iter().map(|&i| set.access(i).unwrap_or(0)).fold(0, u64::wrapping_add)
        }));
        records.push(timed(id, n, m, "predecessor", count, reps, bits, || {
            probes.iter().map(|&x| set.predecessor(x).unwrap_or(0)).fold(0, u64::wrapping_add)
        }));

        if let AnySet::Dyn(base) = &set {
            let mut fresh = Vec::with_capacity(count);
            while fresh.len() < count {
                let x = rng.random_range(0..=m);
                if !base.contains(x) {
                    fresh.push(x);
                }
            }
            let victims: Vec<u64> = ranks.iter().map(|&i| values[i]).collect();
            for (op, keys) in [("insert", &fresh), ("delete", &victims)] {
                let mut total = 0u64;
                for _ in 0..reps {
                    let mut s = base.clone();
                    let start = Instant::now();
                    for &x in keys.iter() {
                        if op == "insert" {
                            s.insert(x)?;
                        } else {
                            s.delete(x)?;
                        }
                    }
                    total += start.elapsed().as_nanos() as u64;
                    black_box(s.len());
                }
                records.push(BenchRecord::new(id, n, m, op, (count * reps) as u64, total, bits));
            }
        }
    }
    emit(&records, a.json, a.out.as_deref(), out)
}
