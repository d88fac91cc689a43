//! Clopen partitions, itineraries (`P`-names), complexity counts and the
//! finite-horizon recurrence and equicontinuity tests for zero-dimensional
//! systems.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{dyadic_resolution, CantorWord, CompactifiedInteger, Cylinder};
use crate::systems::{Dynamics, FullShift, Odometer, PlusOne, ShiftWindow, Sturmian, System};

/// How atoms are generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PartitionRule {
    /// Cylinders fixing the first `len` symbols (interleaved order for windows).
    Prefix { len: u32 },
    /// Singletons `{k}` for `|k| <= radius` and one atom `{|k| > radius} ∪ {∞}`.
    Tail { radius: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClopenPartition {
    pub rule: PartitionRule,
    pub atoms: usize,
    pub mesh: f64,
}

impl ClopenPartition {
    /// Cylinder partition on a space whose points carry `resolution` symbols.
    pub fn prefix(len: u32, resolution: u32) -> Result<Self> {
        let len = len.min(resolution);
        if len > 24 {
            return Err(Error::param(format!("prefix length {len} gives too many atoms")));
        }
        // Two points in one cylinder agree on `len` symbols; points agreeing on
        // all `resolution` symbols coincide.
        let mesh = if len >= resolution {
            0.0
        } else {
            (-(len as f64)).exp2()
        };
        Ok(ClopenPartition {
            rule: PartitionRule::Prefix { len },
            atoms: 1 << len,
            mesh,
        })
    }

    pub fn tail(radius: u64) -> Self {
        let r = radius as f64;
        // the tail atom spans phi(-(r+1)) .. phi(r+1)
        ClopenPartition {
            rule: PartitionRule::Tail { radius },
            atoms: 2 * radius as usize + 2,
            mesh: 2.0 / (r + 2.0),
        }
    }
}

/// Systems whose space has a basis of clopen cylinder sets.
pub trait ZeroDimensional: System {
    /// The coarsest standard partition of mesh at most `eps`.
    fn partition(&self, eps: f64) -> Result<ClopenPartition>;

    fn atom_of(&self, part: &ClopenPartition, p: &Self::Point) -> Result<usize>;
}

fn prefix_atom<C: Cylinder>(part: &ClopenPartition, p: &C) -> Result<usize> {
    match part.rule {
        PartitionRule::Prefix { len } => Ok(p.prefix_key(len) as usize),
        PartitionRule::Tail { .. } => Err(Error::Uncovered),
    }
}

impl ZeroDimensional for Odometer {
    fn partition(&self, eps: f64) -> Result<ClopenPartition> {
        ClopenPartition::prefix(dyadic_resolution(eps), self.depth)
    }

    fn atom_of(&self, part: &ClopenPartition, p: &CantorWord) -> Result<usize> {
        prefix_atom(part, p)
    }
}

impl ZeroDimensional for FullShift {
    fn partition(&self, eps: f64) -> Result<ClopenPartition> {
        ClopenPartition::prefix(dyadic_resolution(eps), 2 * self.half_width + 1)
    }

    fn atom_of(&self, part: &ClopenPartition, p: &ShiftWindow) -> Result<usize> {
        prefix_atom(part, p)
    }
}

impl ZeroDimensional for Sturmian {
    fn partition(&self, eps: f64) -> Result<ClopenPartition> {
        ClopenPartition::prefix(dyadic_resolution(eps), 2 * self.half_width + 1)
    }

    fn atom_of(&self, part: &ClopenPartition, p: &i64) -> Result<usize> {
        prefix_atom(part, &self.window(*p))
    }
}

impl ZeroDimensional for PlusOne {
    fn partition(&self, eps: f64) -> Result<ClopenPartition> {
        if !(eps > 0.0) {
            return Err(Error::param(format!("mesh {eps} must be positive")));
        }
        // smallest R with 2/(R+2) <= eps
        let radius = (2.0 / eps - 2.0).ceil().max(0.0) as u64;
        Ok(ClopenPartition::tail(radius))
    }

    fn atom_of(&self, part: &ClopenPartition, p: &CompactifiedInteger) -> Result<usize> {
        let PartitionRule::Tail { radius } = part.rule else {
            return Err(Error::Uncovered);
        };
        Ok(match *p {
            CompactifiedInteger::Finite(k) if k.unsigned_abs() <= radius => {
                if k >= 0 {
                    2 * k as usize
                } else {
                    2 * k.unsigned_abs() as usize - 1
                }
            }
            _ => 2 * radius as usize + 1,
        })
    }
}

/// Atom indices along an orbit segment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PName(pub Vec<usize>);

impl PName {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Symbol `i` is the atom of `T^i x`, `0 <= i < n`.
pub fn p_name<S: ZeroDimensional>(
    sys: &S,
    x: &S::Point,
    part: &ClopenPartition,
    n: usize,
) -> Result<PName> {
    if n == 0 {
        return Err(Error::param("name length must be at least 1"));
    }
    let mut out = Vec::with_capacity(n);
    let mut p = x.clone();
    for i in 0..n {
        let a = sys.atom_of(part, &p)?;
        if a >= part.atoms {
            return Err(Error::Uncovered);
        }
        out.push(a);
        if i + 1 < n {
            p = sys.step(&p);
        }
    }
    Ok(PName(out))
}

/// Distinct length-`n` names over `sample`.
pub fn names<S: ZeroDimensional>(
    sys: &S,
    part: &ClopenPartition,
    sample: &[S::Point],
    n: usize,
) -> Result<HashSet<PName>> {
    if sample.is_empty() {
        return Err(Error::param("complexity needs a nonempty sample"));
    }
    sample
        .par_iter()
        .map(|x| p_name(sys, x, part, n))
        .try_fold(HashSet::new, |mut acc, name| {
            acc.insert(name?);
            Ok(acc)
        })
        .try_reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            Ok(a)
        })
}

/// Number of distinct length-`n` names observed from `sample`.
pub fn complexity<S: ZeroDimensional>(
    sys: &S,
    part: &ClopenPartition,
    sample: &[S::Point],
    n: usize,
) -> Result<usize> {
    names(sys, part, sample, n).map(|s| s.len())
}

/// Up to `size` points of `net`, evenly strided.
pub fn strided_sample<P: Clone>(net: &[P], size: usize) -> Vec<P> {
    if size == 0 || net.len() <= size {
        return net.to_vec();
    }
    (0..size).map(|i| net[i * net.len() / size].clone()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Recurrence {
    /// `T^{km} x` stays in the ball for every `km <= 2 * horizon`.
    YesWitnessed { k: usize },
    /// Every `k <= sqrt(horizon)` has a multiple `km <= horizon` leaving the ball.
    NoWitnessed,
    Inconclusive,
}

/// Finite-horizon periodic recurrence test for the closed `eps`-ball at `x`.
///
/// A candidate `k` must pass at `horizon` and again at `2 * horizon`; the
/// smallest such `k` is reported.
pub fn is_periodically_recurrent<D: Dynamics>(
    sys: &D,
    x: &D::Point,
    eps: f64,
    horizon: usize,
) -> Result<Recurrence> {
    if !(eps > 0.0) || horizon == 0 {
        return Err(Error::param("recurrence needs eps > 0 and horizon >= 1"));
    }
    let long = 2 * horizon;
    let mut inside = Vec::with_capacity(long + 1);
    let mut p = x.clone();
    for _ in 0..=long {
        inside.push(sys.distance(&p, x) <= eps);
        p = sys.step(&p);
    }
    let passes = |k: usize, h: usize| (k..=h).step_by(k).all(|j| inside[j]);
    if let Some(k) = (1..=horizon).find(|&k| passes(k, horizon) && passes(k, long)) {
        return Ok(Recurrence::YesWitnessed { k });
    }
    let root = (horizon as f64).sqrt().floor() as usize;
    if (1..=root.max(1)).all(|k| !passes(k, horizon)) {
        Ok(Recurrence::NoWitnessed)
    } else {
        Ok(Recurrence::Inconclusive)
    }
}

/// Name counts of one partition at lengths `horizon/4, horizon/2, horizon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NameCounts {
    pub partition: ClopenPartition,
    pub lengths: Vec<usize>,
    pub counts: Vec<usize>,
    /// The count reached the sample size, so growth may be cut off.
    pub saturated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Equicontinuity {
    EquicontinuousEvidence { ladder: Vec<NameCounts> },
    NotEquicontinuous {
        witness: ClopenPartition,
        ladder: Vec<NameCounts>,
    },
}

impl Equicontinuity {
    pub fn is_equicontinuous(&self) -> bool {
        matches!(self, Equicontinuity::EquicontinuousEvidence { .. })
    }
}

/// Counts names for each mesh in `mesh_ladder` and flags the first partition
/// whose name count still grows over the last doubling of the length.
pub fn equicontinuity_detector<S: ZeroDimensional>(
    sys: &S,
    sample: &[S::Point],
    mesh_ladder: &[f64],
    horizon: usize,
) -> Result<Equicontinuity> {
    if horizon < 4 {
        return Err(Error::param("equicontinuity horizon must be at least 4"));
    }
    if mesh_ladder.is_empty() {
        return Err(Error::param("empty mesh ladder"));
    }
    let lengths = vec![horizon / 4, horizon / 2, horizon];
    let mut ladder = Vec::with_capacity(mesh_ladder.len());
    let mut witness = None;
    for &eps in mesh_ladder {
        let partition = sys.partition(eps)?;
        let counts = lengths
            .iter()
            .map(|&n| complexity(sys, &partition, sample, n))
            .collect::<Result<Vec<_>>>()?;
        if witness.is_none() && counts[2] > counts[1] {
            witness = Some(partition);
        }
        ladder.push(NameCounts {
            partition,
            lengths: lengths.clone(),
            saturated: counts[2] >= sample.len(),
            counts,
        });
    }
    Ok(match witness {
        Some(witness) => Equicontinuity::NotEquicontinuous { witness, ladder },
        None => Equicontinuity::EquicontinuousEvidence { ladder },
    })
}
