//! Seeded workloads: value distributions, operation mixes and op tapes.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use efset::space::MAX_UNIVERSE;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Zipf};

use crate::args::WorkloadArgs;
use crate::{CliError, CliResult};

/// Stream offset so the tape never reuses the initial set's random numbers.
const TAPE_STREAM: u64 = 0x7a9e_51d3_0c4b_e21f;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distribution {
    Uniform,
    /// Runs of up to 64 consecutive integers at uniform starting points.
    Clustered,
    /// A walk whose step lengths follow a Zipf law.
    ZipfGap,
}

/// Percentages for insert, delete, access and predecessor; they sum to 100.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpMix {
    pub insert: u32,
    pub delete: u32,
    pub access: u32,
    pub predecessor: u32,
}

impl Default for OpMix {
    fn default() -> Self {
        Self {
            insert: 40,
            delete: 10,
            access: 25,
            predecessor: 25,
        }
    }
}

impl FromStr for OpMix {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<u32> = s
            .split(':')
            .map(|p| p.trim().parse::<u32>().map_err(|e| format!("mix part {p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let [insert, delete, access, predecessor] = parts[..] else {
            return Err(format!("mix needs four parts i:d:a:p, got {s:?}"));
        };
        if insert + delete + access + predecessor != 100 {
            return Err(format!("mix {s:?} does not sum to 100"));
        }
        Ok(Self {
            insert,
            delete,
            access,
            predecessor,
        })
    }
}

impl fmt::Display for OpMix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.insert, self.delete, self.access, self.predecessor)
    }
}

/// One tape entry. Ranks are raw draws reduced modulo the current size on replay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Insert(u64),
    Delete(u64),
    DeleteRank(u64),
    Access(u64),
    Pred(u64),
    Append(u64),
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Insert(x) => write!(f, "insert {x}"),
            Op::Delete(x) => write!(f, "delete {x}"),
            Op::DeleteRank(r) => write!(f, "delete-rank {r}"),
            Op::Access(r) => write!(f, "access {r}"),
            Op::Pred(x) => write!(f, "pred {x}"),
            Op::Append(x) => write!(f, "append {x}"),
        }
    }
}

impl FromStr for Op {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, arg) = s.trim().split_once(' ').ok_or_else(|| format!("expected `op value`, got {s:?}"))?;
        let v: u64 = arg.trim().parse().map_err(|e| format!("{arg:?}: {e}"))?;
        Ok(match name {
            "insert" => Op::Insert(v),
            "delete" => Op::Delete(v),
            "delete-rank" => Op::DeleteRank(v),
            "access" => Op::Access(v),
            "pred" => Op::Pred(v),
            "append" => Op::Append(v),
            other => return Err(format!("unknown op {other:?}")),
        })
    }
}

/// Tape as text, one op per line.
pub fn tape_to_text(tape: &[Op]) -> String {
    let mut s = String::with_capacity(tape.len() * 16);
    for op in tape {
        s.push_str(&op.to_string());
        s.push('\n');
    }
    s
}

pub fn tape_from_text(text: &str) -> CliResult<Vec<Op>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| l.parse().map_err(|e| CliError::Invalid(format!("tape line {}: {e}", i + 1))))
        .collect()
}

/// Draws single values in `[0, m]` from a distribution.
pub struct Sampler {
    dist: Distribution,
    m: u64,
    pos: u64,
    run_left: u32,
    zipf: Option<Zipf<f64>>,
}

impl Sampler {
    /// `density` is the expected set size, used to scale zipf steps.
    pub fn new(dist: Distribution, m: u64, density: u64) -> Self {
        let zipf = (dist == Distribution::ZipfGap).then(|| {
            let span = (2.0 * m as f64 / density.max(1) as f64).clamp(2.0, 1e15);
            Zipf::new(span, 1.1).expect("valid zipf parameters")
        });
        Self {
            dist,
            m,
            pos: 0,
            run_left: 0,
            zipf,
        }
    }

    fn wrap(&self, x: u64) -> u64 {
        if self.m == u64::MAX {
            x
        } else {
            x % (self.m + 1)
        }
    }

    pub fn draw(&mut self, rng: &mut ChaCha8Rng) -> u64 {
        match self.dist {
            Distribution::Uniform => rng.random_range(0..=self.m),
            Distribution::Clustered => {
                if self.run_left == 0 {
                    self.pos = rng.random_range(0..=self.m);
                    self.run_left = rng.random_range(1..=64);
                } else {
                    self.pos = self.wrap(self.pos + 1);
                }
                self.run_left -= 1;
                self.pos
            }
            Distribution::ZipfGap => {
                let gap = self.zipf.as_ref().unwrap().sample(rng) as u64;
                self.pos = self.wrap(self.pos.saturating_add(gap));
                self.pos
            }
        }
    }

    /// Positive step for monotone append tapes with mean around `mean`.
    pub fn step(&mut self, rng: &mut ChaCha8Rng, mean: u64) -> u64 {
        let mean = mean.max(1);
        match self.dist {
            Distribution::Uniform => rng.random_range(1..=2 * mean - 1),
            Distribution::Clustered => {
                if rng.random_bool(0.9) {
                    1
                } else {
                    rng.random_range(1..=10 * mean)
                }
            }
            Distribution::ZipfGap => self.zipf.as_ref().unwrap().sample(rng) as u64,
        }
    }
}

/// `n` distinct values in `[0, m]`, sorted.
pub fn sample_set(rng: &mut ChaCha8Rng, dist: Distribution, n: u64, m: u64) -> CliResult<Vec<u64>> {
    if n > m.saturating_add(1) {
        return Err(CliError::Invalid(format!("{n} distinct values do not fit in [0, {m}]")));
    }
    let n = n as usize;
    if dist == Distribution::Uniform && m < 4 * n as u64 + 64 {
        let mut v: Vec<u64> = rand::seq::index::sample(rng, m as usize + 1, n)
            .into_iter()
            .map(|x| x as u64)
            .collect();
        v.sort_unstable();
        return Ok(v);
    }
    let mut sampler = Sampler::new(dist, m, n as u64);
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    let mut misses = 0u64;
    while out.len() < n {
        let x = sampler.draw(rng);
        if seen.insert(x) {
            out.push(x);
            misses = 0;
        } else {
            misses += 1;
            if misses > 1_000_000 {
                // The walk is stuck in covered territory; fall back to uniform draws.
                sampler = Sampler::new(Distribution::Uniform, m, n as u64);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Workload {
    pub seed: u64,
    pub n: u64,
    pub universe: u64,
    pub distribution: Distribution,
    pub mix: OpMix,
    pub ops: usize,
}

/// m = n^γ, capped at the largest supported universe.
pub fn universe_for(n: u64, gamma: f64) -> u64 {
    let m = (n.max(2) as f64).powf(gamma).round();
    if m >= MAX_UNIVERSE as f64 {
        MAX_UNIVERSE
    } else {
        (m as u64).max(1)
    }
}

impl Workload {
    pub fn from_args(a: &WorkloadArgs) -> CliResult<Self> {
        Self::with_size(a, a.n)
    }

    /// Same flags with a different target size.
    pub fn with_size(a: &WorkloadArgs, n: u64) -> CliResult<Self> {
        if !(a.gamma.is_finite() && a.gamma > 0.0) {
            return Err(CliError::Invalid(format!("gamma {} must be positive", a.gamma)));
        }
        let universe = a.universe.unwrap_or_else(|| universe_for(n, a.gamma));
        if universe > MAX_UNIVERSE {
            return Err(CliError::Invalid(format!("universe {universe} exceeds {MAX_UNIVERSE}")));
        }
        if n == 0 || n > universe.saturating_add(1) {
            return Err(CliError::Invalid(format!("n = {n} does not fit universe {universe}")));
        }
        Ok(Self {
            seed: a.seed,
            n,
            universe,
            distribution: a.distribution,
            mix: a.mix,
            ops: a.ops.unwrap_or(n as usize),
        })
    }

    /// The starting set: `n` distinct values.
    pub fn initial(&self) -> CliResult<Vec<u64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        sample_set(&mut rng, self.distribution, self.n, self.universe)
    }

    /// Mixed tape for sets supporting insert and delete.
    pub fn tape(&self) -> Vec<Op> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ TAPE_STREAM);
        let mut sampler = Sampler::new(self.distribution, self.universe, self.n);
        let OpMix {
            insert,
            delete,
            access,
            ..
        } = self.mix;
        (0..self.ops)
            .map(|_| {
                let roll = rng.random_range(0..100);
                if roll < insert {
                    Op::Insert(sampler.draw(&mut rng))
                } else if roll < insert + delete {
                    if rng.random_bool(0.5) {
                        Op::DeleteRank(rng.random())
                    } else {
                        Op::Delete(sampler.draw(&mut rng))
                    }
                } else if roll < insert + delete + access {
                    Op::Access(rng.random())
                } else {
                    Op::Pred(rng.random_range(0..=self.universe + 1))
                }
            })
            .collect()
    }

    /// Monotone tape for the append-only set: inserts become appends, deletes become queries.
    pub fn append_tape(&self) -> Vec<Op> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ TAPE_STREAM);
        let mut sampler = Sampler::new(self.distribution, self.universe, self.n);
        let mean = (self.universe / self.ops.max(1) as u64).max(1);
        let mut next: Option<u64> = Some(0);
        let OpMix {
            insert,
            delete,
            access,
            ..
        } = self.mix;
        (0..self.ops)
            .map(|_| {
                let roll = rng.random_range(0..100);
                if roll < insert {
                    if let Some(x) = next.filter(|&x| x <= self.universe) {
                        next = x.checked_add(sampler.step(&mut rng, mean));
                        return Op::Append(x);
                    }
                }
                if (insert + delete..insert + delete + access).contains(&roll) {
                    Op::Access(rng.random())
                } else {
                    Op::Pred(rng.random_range(0..=self.universe + 1))
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> WorkloadArgs {
        WorkloadArgs {
            seed: 1,
            n: 1000,
            gamma: 2.0,
            universe: None,
            distribution: Distribution::Uniform,
            mix: OpMix::default(),
            ops: None,
        }
    }

    #[test]
    fn mix_parsing() {
        assert_eq!("40:10:25:25".parse::<OpMix>().unwrap(), OpMix::default());
        assert!("40:10:25:24".parse::<OpMix>().is_err());
        assert!("40:10:50".parse::<OpMix>().is_err());
        assert!("a:b:c:d".parse::<OpMix>().is_err());
    }

    #[test]
    fn same_seed_same_tape_bytes() {
        for dist in [Distribution::Uniform, Distribution::Clustered, Distribution::ZipfGap] {
            let mut a = args();
            a.distribution = dist;
            let w = Workload::from_args(&a).unwrap();
            assert_eq!(w.universe, 1_000_000);
            assert_eq!(tape_to_text(&w.tape()), tape_to_text(&w.tape()));
            assert_eq!(w.initial().unwrap(), w.initial().unwrap());
            let init = w.initial().unwrap();
            assert_eq!(init.len(), 1000);
            assert!(init.windows(2).all(|p| p[0] < p[1]));
            a.seed = 2;
            assert_ne!(Workload::from_args(&a).unwrap().tape(), w.tape());
        }
    }

    #[test]
    fn tape_text_round_trip() {
        let w = Workload::from_args(&args()).unwrap();
        let tape = w.tape();
        assert_eq!(tape_from_text(&tape_to_text(&tape)).unwrap(), tape);
        let app = w.append_tape();
        assert_eq!(tape_from_text(&tape_to_text(&app)).unwrap(), app);
        assert!(matches!(tape_from_text("insert 1\nfrobnicate 2\n"), Err(CliError::Invalid(m)) if m.contains("line 2")));
    }

    #[test]
    fn append_tape_is_monotone() {
        let w = Workload::from_args(&args()).unwrap();
        let vals: Vec<u64> = w
            .append_tape()
            .into_iter()
            .filter_map(|op| if let Op::Append(x) = op { Some(x) } else { None })
            .collect();
        assert!(vals.len() > 300);
        assert!(vals.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn clustered_has_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = sample_set(&mut rng, Distribution::Clustered, 5000, 1 << 40).unwrap();
        let adjacent = v.windows(2).filter(|p| p[1] == p[0] + 1).count();
        assert!(adjacent > 4000);
    }

    #[test]
    fn rejects_impossible_sizes() {
        let mut a = args();
        a.universe = Some(10);
        a.n = 12;
        assert!(Workload::from_args(&a).is_err());
        a.n = 11;
        assert_eq!(Workload::from_args(&a).unwrap().initial().unwrap(), (0..=10).collect::<Vec<_>>());
    }
}
