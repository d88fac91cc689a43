//! Self-maps tabulated on a finite net, the uniform metric, left composition
//! with `T`, and the finite permutation families that give the envelope
//! large entropy.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{rho_n, sep_count, SepOptions, SepResult};
use crate::error::{Error, Result};
use crate::slovak::SlovakModel;
use crate::space::{graph_distance, CantorWord, CompactifiedInteger, Cylinder, GraphPoint};
use crate::symbolic::ZeroDimensional;
use crate::systems::{Dynamics, FullShift, Odometer, PlusOne, ShiftWindow};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapKind {
    General,
    Constant,
    /// Sends support point `i` to support point `perm[i]`.
    Permutation { perm: Vec<usize>, inverse: Vec<usize> },
}

/// A self-map known by its values on a shared domain net.
#[derive(Clone, Debug)]
pub struct TabulatedMap<P> {
    domain: Arc<[P]>,
    values: Vec<P>,
    kind: MapKind,
}

impl<P: Clone> TabulatedMap<P> {
    pub fn identity(domain: Arc<[P]>) -> Self {
        let values = domain.to_vec();
        TabulatedMap {
            domain,
            values,
            kind: MapKind::General,
        }
    }

    pub fn constant(domain: Arc<[P]>, x: P) -> Self {
        let values = vec![x; domain.len()];
        TabulatedMap {
            domain,
            values,
            kind: MapKind::Constant,
        }
    }

    pub fn from_fn(domain: Arc<[P]>, f: impl FnMut(&P) -> P) -> Self {
        let values = domain.iter().map(f).collect();
        TabulatedMap {
            domain,
            values,
            kind: MapKind::General,
        }
    }

    pub fn domain(&self) -> &Arc<[P]> {
        &self.domain
    }

    pub fn values(&self) -> &[P] {
        &self.values
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }
}

impl<P: Clone + Eq + Hash> TabulatedMap<P> {
    /// `self ∘ other`; `other` must map the net into itself.
    pub fn compose(&self, other: &TabulatedMap<P>) -> Result<TabulatedMap<P>> {
        same_domain(self, other)?;
        let index: HashMap<&P, usize> = self.domain.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let values = other
            .values
            .iter()
            .map(|y| {
                index
                    .get(y)
                    .map(|&i| self.values[i].clone())
                    .ok_or_else(|| Error::Domain("image leaves the tabulation net".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TabulatedMap {
            domain: self.domain.clone(),
            values,
            kind: MapKind::General,
        })
    }
}

fn same_domain<P>(a: &TabulatedMap<P>, b: &TabulatedMap<P>) -> Result<()> {
    // maps are only comparable on one shared net
    if Arc::ptr_eq(&a.domain, &b.domain) {
        Ok(())
    } else {
        Err(Error::NetMismatch)
    }
}

/// `max_x d(phi x, psi x)` over the domain net.
pub fn uniform_distance<D: Dynamics>(
    sys: &D,
    phi: &TabulatedMap<D::Point>,
    psi: &TabulatedMap<D::Point>,
) -> Result<f64> {
    same_domain(phi, psi)?;
    Ok(phi
        .values
        .iter()
        .zip(&psi.values)
        .map(|(a, b)| sys.distance(a, b))
        .fold(0.0, f64::max))
}

/// `F_T(phi) = T ∘ phi`.
pub fn envelope_step<D: Dynamics>(sys: &D, phi: &TabulatedMap<D::Point>) -> TabulatedMap<D::Point> {
    TabulatedMap {
        domain: phi.domain.clone(),
        values: phi.values.iter().map(|p| sys.step(p)).collect(),
        kind: match phi.kind {
            MapKind::Constant => MapKind::Constant,
            _ => MapKind::General,
        },
    }
}

/// `(C(X,X), F_T)` restricted to maps tabulated on one net.
pub struct Envelope<'a, D>(pub &'a D);

impl<D: Dynamics> Dynamics for Envelope<'_, D> {
    type Point = TabulatedMap<D::Point>;
    type Key = Vec<D::Key>;

    fn step(&self, phi: &Self::Point) -> Self::Point {
        envelope_step(self.0, phi)
    }

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64 {
        uniform_distance(self.0, a, b).expect("envelope maps share a net")
    }

    fn ball_key(&self, phi: &Self::Point, eps: f64) -> Option<Vec<D::Key>> {
        phi.values.iter().map(|p| self.0.ball_key(p, eps)).collect()
    }
}

/// Largest `d(Tx, Ty)` over sample pairs with `d(x, y) <= r`.
pub fn empirical_modulus<D: Dynamics>(sys: &D, sample: &[D::Point], r: f64) -> f64 {
    let images: Vec<D::Point> = sample.iter().map(|p| sys.step(p)).collect();
    (0..sample.len())
        .into_par_iter()
        .map(|i| {
            (0..sample.len())
                .filter(|&j| sys.distance(&sample[i], &sample[j]) <= r)
                .map(|j| sys.distance(&images[i], &images[j]))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEmbedding {
    pub n: usize,
    pub eps: f64,
    pub point_count: usize,
    pub constant_count: usize,
    pub equal: bool,
}

/// Separated points of `k` under `T` against separated constant maps
/// `{const_x : x in k}` under `F_T`.
pub fn constant_embedding_check<D: Dynamics>(
    sys: &D,
    k: &[D::Point],
    domain: Arc<[D::Point]>,
    n: usize,
    eps: f64,
    opts: &SepOptions,
) -> Result<ConstantEmbedding> {
    let points = sep_count(sys, k, n, eps, opts)?;
    let constants: Vec<TabulatedMap<D::Point>> = k
        .iter()
        .map(|x| TabulatedMap::constant(domain.clone(), x.clone()))
        .collect();
    let maps = sep_count(&Envelope(sys), &constants, n, eps, opts)?;
    Ok(ConstantEmbedding {
        n,
        eps,
        point_count: points.count,
        constant_count: maps.count,
        equal: points.count == maps.count,
    })
}

/// Zero-dimensional systems with homeomorphisms permuting finitely many
/// points and fixing everything outside a small clopen set.
pub trait Permutable: ZeroDimensional {
    /// Values on `domain` of a homeomorphism sending `support[i]` to
    /// `support[perm[i]]` and equal to the identity outside the clopen set
    /// `{x : atom_of(part, x) == atom}`, which must contain the support.
    fn permuting_homeo(
        &self,
        support: &[Self::Point],
        perm: &[usize],
        min_level: u32,
        domain: &[Self::Point],
    ) -> Result<Vec<Self::Point>>;

    /// Whether `p` may be moved by such a homeomorphism.
    fn movable(&self, _p: &Self::Point) -> bool {
        true
    }
}

/// Cylinder swap: with `L` past the last symbol where support points
/// differ, each support point is the unique point of its `L`-cylinder
/// agreeing with it beyond `L`, and rewriting the `L`-prefix moves the
/// cylinder of `support[i]` onto the cylinder of `support[perm[i]]`.
fn cylinder_swap<C: Cylinder + Eq + Clone>(support: &[C], perm: &[usize], min_level: u32, domain: &[C]) -> Result<Vec<C>> {
    let Some(first) = support.first() else {
        return Ok(domain.to_vec());
    };
    // shortest level past which all support points agree
    let level = (min_level..first.resolution())
        .find(|&l| support.iter().all(|p| p.with_prefix(l, first.prefix_key(l)) == *first))
        .unwrap_or(first.resolution());
    let keys: Vec<u64> = support.iter().map(|p| p.prefix_key(level)).collect();
    let map: HashMap<u64, u64> = keys.iter().enumerate().map(|(i, &k)| (k, keys[perm[i]])).collect();
    if map.len() != support.len() {
        return Err(Error::Invariant("support points share a cylinder".into()));
    }
    Ok(domain
        .iter()
        .map(|x| match map.get(&x.prefix_key(level)) {
            Some(&k) => x.with_prefix(level, k),
            None => x.clone(),
        })
        .collect())
}

impl Permutable for Odometer {
    fn permuting_homeo(&self, support: &[CantorWord], perm: &[usize], min_level: u32, domain: &[CantorWord]) -> Result<Vec<CantorWord>> {
        cylinder_swap(support, perm, min_level, domain)
    }
}

impl Permutable for FullShift {
    fn permuting_homeo(&self, support: &[ShiftWindow], perm: &[usize], min_level: u32, domain: &[ShiftWindow]) -> Result<Vec<ShiftWindow>> {
        cylinder_swap(support, perm, min_level, domain)
    }
}

impl Permutable for PlusOne {
    fn movable(&self, p: &CompactifiedInteger) -> bool {
        *p != CompactifiedInteger::Infinity
    }

    /// Finite integers are isolated, so permuting them alone is a homeomorphism.
    fn permuting_homeo(
        &self,
        support: &[CompactifiedInteger],
        perm: &[usize],
        _min_level: u32,
        domain: &[CompactifiedInteger],
    ) -> Result<Vec<CompactifiedInteger>> {
        if support.contains(&CompactifiedInteger::Infinity) {
            return Err(Error::Domain("infinity is not an isolated point".into()));
        }
        let map: HashMap<CompactifiedInteger, CompactifiedInteger> =
            support.iter().enumerate().map(|(i, &p)| (p, support[perm[i]])).collect();
        Ok(domain.iter().map(|x| *map.get(x).unwrap_or(x)).collect())
    }
}

/// One stage of the construction: a partition of mesh `delta` with `q`
/// atoms and `n` separated points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub k: u32,
    pub delta: f64,
    pub n: usize,
}

#[derive(Clone, Debug)]
pub struct HomeoFamily<P> {
    pub stage: Stage,
    pub q: usize,
    pub eps: f64,
    pub m: usize,
    /// Atom index of the clopen set carrying every support.
    pub atom: usize,
    pub support: Vec<P>,
    pub members: Vec<TabulatedMap<P>>,
    /// `ln(m!)`, the size of the full family.
    pub ln_size: f64,
    /// Every permutation was built, rather than a random sample.
    pub complete: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct FamilyOptions {
    /// Build all `m!` maps only up to this `m`.
    pub materialize_up_to: usize,
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            materialize_up_to: 6,
            sample_size: 64,
            seed: 0,
        }
    }
}

/// `sum ln j` for small `m`, Stirling's series beyond.
pub fn ln_factorial(m: u64) -> f64 {
    if m < 1 << 20 {
        return (2..=m).fold(0.0, |acc, j| acc + (j as f64).ln());
    }
    let x = m as f64;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
}

fn factorial_capped(m: usize) -> usize {
    (1..=m).try_fold(1usize, |acc, j| acc.checked_mul(j)).unwrap_or(usize::MAX)
}

/// All permutations of `0..m` in lexicographic order, identity first.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..m).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..m).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..m).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &j) in perm.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Homeomorphisms permuting `m = floor(n / 2q)` points that are pairwise
/// `(n, eps)`-separated and lie in one atom of the mesh-`delta` partition.
pub fn build_permutation_family<S: Permutable>(
    sys: &S,
    net: &[S::Point],
    stage: Stage,
    eps: f64,
    opts: &FamilyOptions,
    sep_opts: &SepOptions,
) -> Result<HomeoFamily<S::Point>> {
    let part = sys.partition(stage.delta)?;
    let q = part.atoms;
    if stage.n < 2 * q {
        return Err(Error::param(format!("stage {} needs n >= 2q = {}, got n = {}", stage.k, 2 * q, stage.n)));
    }
    let m = stage.n / (2 * q);
    let SepResult { witness, .. } = sep_count(sys, net, stage.n, eps, sep_opts)?;
    let chosen = &witness[..witness.len().min(stage.n)];
    let mut by_atom: HashMap<usize, Vec<usize>> = HashMap::new();
    for &i in chosen.iter().filter(|&&i| sys.movable(&net[i])) {
        by_atom.entry(sys.atom_of(&part, &net[i])?).or_default().push(i);
    }
    let (atom, pts) = by_atom
        .into_iter()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .unwrap_or((0, Vec::new()));
    if pts.len() < m {
        return Err(Error::TooFewPoints {
            needed: m,
            found: pts.len(),
        });
    }
    let support: Vec<S::Point> = pts[..m].iter().map(|&i| net[i].clone()).collect();
    let min_level = match part.rule {
        crate::symbolic::PartitionRule::Prefix { len } => len,
        crate::symbolic::PartitionRule::Tail { .. } => 0,
    };
    let complete = m <= opts.materialize_up_to;
    let perms = if complete {
        permutations(m)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut seen = std::collections::HashSet::new();
        let mut out = vec![(0..m).collect::<Vec<_>>()];
        seen.insert(out[0].clone());
        // m > materialize_up_to, so m! comfortably exceeds any sample we ask for
        let want = opts.sample_size.max(1).min(factorial_capped(m));
        while out.len() < want {
            let mut p: Vec<usize> = (0..m).collect();
            p.shuffle(&mut rng);
            if seen.insert(p.clone()) {
                out.push(p);
            }
        }
        out
    };
    let domain: Arc<[S::Point]> = net.to_vec().into();
    let members = perms
        .into_par_iter()
        .map(|perm| {
            let values = sys.permuting_homeo(&support, &perm, min_level, &domain)?;
            Ok(TabulatedMap {
                domain: domain.clone(),
                values,
                kind: MapKind::Permutation {
                    inverse: inverse(&perm),
                    perm,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HomeoFamily {
        stage,
        q,
        eps,
        m,
        atom,
        support,
        members,
        ln_size: ln_factorial(m as u64),
        complete,
    })
}

impl<P: Clone + Send + Sync + std::fmt::Debug> HomeoFamily<P> {
    /// Smallest pairwise `rho_n` under `F_T` over all members.
    pub fn min_pairwise_rho<D: Dynamics<Point = P>>(&self, sys: &D) -> f64 {
        let env = Envelope(sys);
        let k = self.members.len();
        (0..k)
            .into_par_iter()
            .flat_map(|a| (a + 1..k).into_par_iter().map(move |b| (a, b)))
            .map(|(a, b)| rho_n(&env, &self.members[a], &self.members[b], self.stage.n))
            .reduce(|| f64::INFINITY, f64::min)
    }

    /// Largest uniform distance from a member to the identity.
    pub fn max_displacement<D: Dynamics<Point = P>>(&self, sys: &D) -> f64 {
        self.members
            .iter()
            .map(|phi| {
                phi.domain
                    .iter()
                    .zip(&phi.values)
                    .map(|(x, y)| sys.distance(x, y))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub k: u32,
    pub n: u64,
    pub q: u64,
    pub m: u64,
    /// `ln(m!) / n`.
    pub h: f64,
    /// `(ln n - ln 4q) / 4q`.
    pub analytic: f64,
    pub exceeds: bool,
}

/// Rates `ln(m!)/n` with `m = floor(n / 2q)` for each `(k, n, q)`.
pub fn envelope_entropy_lower_bound(stages: &[(u32, u64, u64)]) -> Result<Vec<LowerBoundRow>> {
    stages
        .iter()
        .map(|&(k, n, q)| {
            if q == 0 || n == 0 {
                return Err(Error::param(format!("stage {k}: n and q must be positive")));
            }
            let m = n / (2 * q);
            let h = ln_factorial(m) / n as f64;
            let qf = q as f64;
            let analytic = ((n as f64).ln() - (4.0 * qf).ln()) / (4.0 * qf);
            Ok(LowerBoundRow {
                k,
                n,
                q,
                m,
                h,
                analytic,
                exceeds: h >= analytic,
            })
        })
        .collect()
}

/// `n_k = 2^(2^k)`, `q_k = 2^k` for `k` in `0..=kmax`.
pub fn doubling_stages(kmax: u32) -> Result<Vec<(u32, u64, u64)>> {
    if kmax > 5 {
        return Err(Error::param("stage n_k overflows beyond k = 5"));
    }
    Ok((0..=kmax).map(|k| (k, 1u64 << (1u64 << k), 1u64 << k)).collect())
}

/// Largest `d(T~^m z, T~^n z)` over the sample: a lower bound on the
/// uniform distance between the two powers. Points where either power
/// lands on the truncated orbit are skipped.
pub fn power_separation(model: &SlovakModel, m: i64, n: i64, sample: &[GraphPoint]) -> f64 {
    if m == n {
        return 0.0;
    }
    sample
        .par_iter()
        .filter_map(|z| {
            let a = model.lifted_power(z, m).ok()?;
            let b = model.lifted_power(z, n).ok()?;
            graph_distance(&a, &b).ok()
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSeparation {
    pub m: i64,
    pub n: i64,
    pub bound: f64,
}

/// `power_separation` for every pair `|m|, |n| <= max_power`, `m < n`.
pub fn discreteness_table(model: &SlovakModel, max_power: i64, sample: &[GraphPoint]) -> Vec<PowerSeparation> {
    let mut rows = Vec::new();
    for m in -max_power..=max_power {
        for n in m + 1..=max_power {
            rows.push(PowerSeparation {
                m,
                n,
                bound: power_separation(model, m, n, sample),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{FillRule, System};
    use proptest::prelude::*;

    fn w(s: &str) -> CantorWord {
        format!("b:{s}").parse().unwrap()
    }

    #[test]
    fn uniform_distance_examples() {
        let odo = Odometer { depth: 4 };
        let dom: Arc<[CantorWord]> = odo.net(0.1).unwrap().into();
        let id = TabulatedMap::identity(dom.clone());
        assert_eq!(uniform_distance(&odo, &id, &id).unwrap(), 0.0);
        let (x, y) = (w("0010"), w("0000"));
        let cx = TabulatedMap::constant(dom.clone(), x);
        let cy = TabulatedMap::constant(dom.clone(), y);
        assert_eq!(uniform_distance(&odo, &cx, &cy).unwrap(), 0.25);
        // swapping the cylinders 000* and 001* moves points by 1/4;
        // swapping 110* and 111* likewise
        let a = odo.permuting_homeo(&[w("0000"), w("0010")], &[1, 0], 3, &dom).unwrap();
        let b = odo.permuting_homeo(&[w("1100"), w("1110")], &[1, 0], 3, &dom).unwrap();
        for vals in [a, b] {
            let phi = TabulatedMap { domain: dom.clone(), values: vals, kind: MapKind::General };
            assert_eq!(uniform_distance(&odo, &phi, &id).unwrap(), 0.25);
        }
        let other: Arc<[CantorWord]> = dom[..3].to_vec().into();
        assert_eq!(uniform_distance(&odo, &id, &TabulatedMap::identity(other)), Err(Error::NetMismatch));
    }

    #[test]
    fn envelope_step_examples() {
        let odo = Odometer { depth: 4 };
        let dom: Arc<[CantorWord]> = odo.net(0.1).unwrap().into();
        let id = TabulatedMap::identity(dom.clone());
        let t = envelope_step(&odo, &id);
        assert!(t.values().iter().zip(dom.iter()).all(|(v, x)| *v == odo.step(x)));
        let mut c = TabulatedMap::constant(dom.clone(), w("1011"));
        let mut x = w("1011");
        for _ in 0..9 {
            c = envelope_step(&odo, &c);
            x = odo.step(&x);
            assert_eq!(c.kind(), &MapKind::Constant);
            assert!(c.values().iter().all(|v| *v == x));
        }
    }

    #[test]
    fn constant_embedding_examples() {
        let o = SepOptions::default();
        let fs = FullShift::new(8);
        let k = fs.net(0.4).unwrap();
        let dom: Arc<[ShiftWindow]> = k[..4].to_vec().into();
        let r = constant_embedding_check(&fs, &k, dom.clone(), 6, 0.4, &o).unwrap();
        assert_eq!((r.point_count, r.constant_count), (64, 64));
        let r = constant_embedding_check(&fs, &k, dom, 1, 0.4, &o).unwrap();
        assert!(r.equal);
        let odo = Odometer { depth: 6 };
        let k = odo.net(0.1).unwrap();
        let r = constant_embedding_check(&odo, &k, k.clone().into(), 8, 0.3, &o).unwrap();
        assert!(r.equal);
        assert_eq!(r.point_count, 4);
    }

    #[test]
    fn full_shift_family() {
        let fs = FullShift::new(10);
        let net = fs.net(0.4).unwrap();
        let stage = Stage { k: 1, delta: 0.5, n: 12 };
        let fam = build_permutation_family(&fs, &net, stage, 0.4, &FamilyOptions::default(), &SepOptions::default()).unwrap();
        assert_eq!((fam.q, fam.m, fam.members.len()), (2, 3, 6));
        assert!(fam.complete);
        assert!((fam.ln_size - 6f64.ln()).abs() < 1e-15);
        assert!(fam.min_pairwise_rho(&fs) > 0.4);
        assert!(fam.max_displacement(&fs) <= 0.5);
        for phi in &fam.members {
            for (x, y) in phi.domain().iter().zip(phi.values()) {
                if x != y {
                    assert_eq!(fs.atom_of(&fs.partition(0.5).unwrap(), y).unwrap(), fam.atom);
                }
            }
        }
    }

    #[test]
    fn members_invert() {
        let fs = FullShift::new(8);
        let net = fs.net(0.4).unwrap();
        let stage = Stage { k: 2, delta: 0.3, n: 32 };
        let fam = build_permutation_family(&fs, &net, stage, 0.4, &FamilyOptions::default(), &SepOptions::default()).unwrap();
        assert_eq!((fam.q, fam.m), (4, 4));
        assert_eq!(fam.members.len(), 24);
        for phi in &fam.members {
            let MapKind::Permutation { inverse, .. } = phi.kind() else { panic!() };
            let vals = fs.permuting_homeo(&fam.support, inverse, 2, phi.domain()).unwrap();
            let inv = TabulatedMap { domain: phi.domain().clone(), values: vals, kind: MapKind::General };
            let id = inv.compose(phi).unwrap();
            assert_eq!(id.values(), &phi.domain()[..]);
        }
    }

    #[test]
    fn trivial_and_sampled_families() {
        let fs = FullShift::new(6);
        let net = fs.net(0.4).unwrap();
        let fam = build_permutation_family(&fs, &net, Stage { k: 0, delta: 0.5, n: 4 }, 0.4, &FamilyOptions::default(), &SepOptions::default()).unwrap();
        assert_eq!((fam.m, fam.members.len()), (1, 1));
        assert_eq!(fam.members[0].values(), &net[..]);
        let err = build_permutation_family(&fs, &net, Stage { k: 0, delta: 0.5, n: 3 }, 0.4, &FamilyOptions::default(), &SepOptions::default());
        assert!(err.is_err());

        let odo = Odometer { depth: 10 };
        let net = odo.net(0.1).unwrap();
        // the odometer has few separated points: four at eps = 0.3
        let e = build_permutation_family(&odo, &net, Stage { k: 1, delta: 0.5, n: 16 }, 0.3, &FamilyOptions::default(), &SepOptions::default());
        assert!(matches!(e, Err(Error::TooFewPoints { needed: 4, found: 2 })));

        let fs = FullShift::new(12);
        let net = fs.net(0.4).unwrap();
        let opts = FamilyOptions { sample_size: 20, ..FamilyOptions::default() };
        let fam = build_permutation_family(&fs, &net, Stage { k: 2, delta: 0.5, n: 28 }, 0.4, &opts, &SepOptions::default()).unwrap();
        assert_eq!(fam.m, 7);
        assert!(!fam.complete);
        assert_eq!(fam.members.len(), 20);
        assert!((fam.ln_size - 5040f64.ln()).abs() < 1e-12);
        assert!(fam.min_pairwise_rho(&fs) > 0.4);
    }

    #[test]
    fn plus_one_family_swaps_isolated_points() {
        let net = PlusOne.net(0.02).unwrap();
        let stage = Stage { k: 1, delta: 1.0, n: 8 };
        let fam = build_permutation_family(&PlusOne, &net, stage, 0.05, &FamilyOptions::default(), &SepOptions::default()).unwrap();
        assert_eq!(fam.q, 2);
        assert_eq!(fam.members.len(), 2);
        assert!(fam.min_pairwise_rho(&PlusOne) > 0.05);
    }

    #[test]
    fn lower_bound_table() {
        let rows = envelope_entropy_lower_bound(&[(1, 12, 2)]).unwrap();
        assert_eq!(rows[0].m, 3);
        assert!((rows[0].h - 6f64.ln() / 12.0).abs() < 1e-15);
        assert!((rows[0].h - 0.1493).abs() < 1e-4);
        assert!((rows[0].analytic - 0.0507).abs() < 1e-4);
        assert!(rows[0].exceeds);
        let rows = envelope_entropy_lower_bound(&doubling_stages(4).unwrap()).unwrap();
        let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
        assert_eq!(hs[0], 0.0);
        assert_eq!(hs[1], 0.0);
        assert!(hs[1..].windows(2).all(|w| w[0] < w[1]), "{hs:?}");
    }

    #[test]
    fn ln_factorial_branches_agree() {
        let exact: f64 = (2..=(1u64 << 20)).map(|j| (j as f64).ln()).sum();
        assert!((ln_factorial(1 << 20) - exact).abs() / exact < 1e-12);
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(0).len(), 1);
    }

    proptest! {
        #[test]
        fn left_composition_respects_modulus(seed in 0u64..500) {
            use rand::Rng;
            let fs = FullShift::new(4);
            let dom: Arc<[ShiftWindow]> = fs.net(0.4).unwrap().into();
            let all: Vec<ShiftWindow> = (0u64..1 << 9)
                .map(|b| ShiftWindow::from_fn(4, FillRule::Zero, |i| ((b >> (i + 4)) & 1) as u8).unwrap())
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let phi = TabulatedMap::from_fn(dom.clone(), |_| all[rng.gen_range(0..all.len())]);
            let psi = TabulatedMap::from_fn(dom.clone(), |_| all[rng.gen_range(0..all.len())]);
            let r = uniform_distance(&fs, &phi, &psi).unwrap();
            let lhs = uniform_distance(&fs, &envelope_step(&fs, &phi), &envelope_step(&fs, &psi)).unwrap();
            prop_assert!(lhs <= empirical_modulus(&fs, &all, r));
        }

        #[test]
        fn right_composition_contracts(seed in 0u64..500) {
            use rand::Rng;
            let odo = Odometer { depth: 5 };
            let dom: Arc<[CantorWord]> = odo.net(0.1).unwrap().into();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let phi = TabulatedMap::from_fn(dom.clone(), |_| dom[rng.gen_range(0..dom.len())]);
            let psi = TabulatedMap::from_fn(dom.clone(), |_| dom[rng.gen_range(0..dom.len())]);
            let t = TabulatedMap::from_fn(dom.clone(), |x| odo.step(x));
            let lhs = uniform_distance(&odo, &phi.compose(&t).unwrap(), &psi.compose(&t).unwrap()).unwrap();
            prop_assert!(lhs <= uniform_distance(&odo, &phi, &psi).unwrap());
        }
    }

    #[test]
    fn powers_of_the_lifted_map_stay_apart() {
        use crate::slovak::CoefficientScheme;
        use crate::systems::GOLDEN;
        let model = SlovakModel::new(3, GOLDEN, 12, CoefficientScheme::default()).unwrap();
        let sample = model.sample_graph(200, 4);
        assert_eq!(power_separation(&model, 2, 2, &sample), 0.0);
        assert!(power_separation(&model, 0, 1, &sample) >= 0.1);
        let table = discreteness_table(&model, 5, &sample);
        assert_eq!(table.len(), 55);
        assert!(table.iter().all(|r| r.bound > 0.0), "{table:?}");
    }
}
