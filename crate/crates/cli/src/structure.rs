//! Uniform handle over the four serializable structures.

use efset::append::DEFAULT_K;
use efset::{AppendOnlySet, DynSet, EliasFano, SampledPredecessor, SpaceReport};

use crate::args::StructureKind;
use crate::{CliError, CliResult};

pub const DEFAULT_SAMPLE: usize = 64;

pub enum AnySet {
    Ef(EliasFano),
    Sampled(SampledPredecessor),
    Dyn(DynSet),
    Append(AppendOnlySet),
}

impl AnySet {
    /// Builds from values already checked for the structure's ordering rule.
    /// Dynset inserts one by one, so any order and repeats are accepted.
    pub fn build(kind: StructureKind, values: &[u64], m: u64, block: Option<usize>) -> CliResult<Self> {
        Ok(match kind {
            StructureKind::Ef => AnySet::Ef(EliasFano::encode(values, m)?),
            StructureKind::Sampled => {
                AnySet::Sampled(SampledPredecessor::build(values, m, block.unwrap_or(DEFAULT_SAMPLE))?)
            }
            StructureKind::Dynset => {
                let mut s = DynSet::new(m)?;
                for &v in values {
                    s.insert(v)?;
                }
                AnySet::Dyn(s)
            }
            StructureKind::Append => {
                AnySet::Append(AppendOnlySet::from_sorted(values, m, block.unwrap_or(DEFAULT_K))?)
            }
        })
    }

    /// Bulk construction from a strictly increasing set.
    pub fn from_sorted(kind: StructureKind, values: &[u64], m: u64, block: Option<usize>) -> CliResult<Self> {
        match kind {
            StructureKind::Dynset => Ok(AnySet::Dyn(DynSet::from_sorted(values, m)?)),
            _ => Self::build(kind, values, m, block),
        }
    }

    pub fn load(kind: StructureKind, bytes: &[u8], block: Option<usize>) -> CliResult<Self> {
        Ok(match kind {
            StructureKind::Ef => AnySet::Ef(EliasFano::from_bytes(bytes)?),
            StructureKind::Sampled => {
                let mut r = bytes;
                let s = SampledPredecessor::read_from(&mut r, block.unwrap_or(DEFAULT_SAMPLE))?;
                if !r.is_empty() {
                    return Err(CliError::Invalid(format!("{} trailing bytes", r.len())));
                }
                AnySet::Sampled(s)
            }
            StructureKind::Dynset => AnySet::Dyn(DynSet::from_bytes(bytes)?),
            StructureKind::Append => AnySet::Append(AppendOnlySet::from_bytes(bytes)?),
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            AnySet::Ef(s) => s.to_bytes(),
            AnySet::Sampled(s) => {
                let mut out = Vec::new();
                s.write_to(&mut out).expect("writing to memory");
                out
            }
            AnySet::Dyn(s) => s.to_bytes(),
            AnySet::Append(s) => s.to_bytes(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnySet::Ef(s) => s.len(),
            AnySet::Sampled(s) => s.len(),
            AnySet::Dyn(s) => s.len(),
            AnySet::Append(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn universe(&self) -> u64 {
        match self {
            AnySet::Ef(s) => s.universe(),
            AnySet::Sampled(s) => s.ef().universe(),
            AnySet::Dyn(s) => s.universe(),
            AnySet::Append(s) => s.universe(),
        }
    }

    /// Low width of the static encodings.
    pub fn low_width(&self) -> Option<u32> {
        match self {
            AnySet::Ef(s) => Some(s.low_width()),
            AnySet::Sampled(s) => Some(s.ef().low_width()),
            _ => None,
        }
    }

    pub fn space_report(&self) -> SpaceReport {
        match self {
            AnySet::Ef(s) => s.space_report(),
            AnySet::Sampled(s) => s.space_report(),
            AnySet::Dyn(s) => s.space_report(),
            AnySet::Append(s) => s.space_report(),
        }
    }

    pub fn access(&self, i: usize) -> Option<u64> {
        match self {
            AnySet::Ef(s) => s.access(i).ok(),
            AnySet::Sampled(s) => s.access(i).ok(),
            AnySet::Dyn(s) => s.access(i).ok(),
            AnySet::Append(s) => s.access(i).ok(),
        }
    }

    pub fn predecessor(&self, x: u64) -> Option<u64> {
        match self {
            AnySet::Ef(s) => s.predecessor(x),
            AnySet::Sampled(s) => s.predecessor(x),
            AnySet::Dyn(s) => s.predecessor(x),
            AnySet::Append(s) => s.predecessor(x),
        }
    }

    pub fn successor(&self, x: u64) -> CliResult<Option<u64>> {
        match self {
            AnySet::Ef(s) => Ok(s.successor(x)),
            AnySet::Sampled(s) => Ok(s.ef().successor(x)),
            AnySet::Dyn(s) => Ok(s.successor(x)),
            AnySet::Append(_) => Err(CliError::Invalid("append-only sets answer access and predecessor only".into())),
        }
    }

    pub fn rank(&self, x: u64) -> CliResult<usize> {
        match self {
            AnySet::Ef(s) => Ok(s.rank(x)),
            AnySet::Sampled(s) => Ok(s.ef().rank(x)),
            AnySet::Dyn(s) => Ok(s.rank(x)),
            AnySet::Append(_) => Err(CliError::Invalid("append-only sets answer access and predecessor only".into())),
        }
    }

    pub fn contains(&self, x: u64) -> bool {
        match self {
            AnySet::Ef(s) => s.contains(x),
            AnySet::Sampled(s) => s.ef().contains(x),
            AnySet::Dyn(s) => s.contains(x),
            AnySet::Append(s) => s.contains(x),
        }
    }
}
