//! Finite models of the compact spaces used by the experiments.
//!
//! Cantor points are depth-`d` binary words standing for cylinders, the
//! compactified integers carry an explicit embedding into `[-1, 1]`, and the
//! generalized solenoid over the dyadic odometer is represented by pairs
//! `(word, s)` with `0 <= s < 1`. All metrics here are exact closed forms.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported word depth (bits are packed in a `u64`).
pub const MAX_DEPTH: u32 = 63;

pub(crate) fn low_mask(len: u32) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Smallest `j` with `2^-j <= eps`: the prefix length of a closed `eps`-ball
/// in a `2^-k` ultrametric.
pub fn dyadic_resolution(eps: f64) -> u32 {
    let mut j = 0;
    while j < 64 && (-(j as f64)).exp2() > eps {
        j += 1;
    }
    j
}

/// Points addressed by a sequence of binary symbols, where two points at
/// distance `<= 2^-k` are exactly those sharing the first `k` symbols.
pub trait Cylinder: Sized {
    /// Number of addressable symbols.
    fn resolution(&self) -> u32;
    /// The first `len` symbols packed little-endian into a `u64`.
    fn prefix_key(&self, len: u32) -> u64;
    /// Replace the first `len` symbols by `key`.
    fn with_prefix(&self, len: u32, key: u64) -> Self;
}

/// A depth-`d` binary word; bit 0 is the least significant digit of the
/// adding machine, so the odometer is ordinary `+1` modulo `2^d`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CantorWord {
    bits: u64,
    depth: u32,
}

impl CantorWord {
    pub fn new(depth: u32, bits: u64) -> Result<Self> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::param(format!("word depth {depth} not in 1..={MAX_DEPTH}")));
        }
        if bits & !low_mask(depth) != 0 {
            return Err(Error::param(format!("bits {bits:#x} exceed depth {depth}")));
        }
        Ok(CantorWord { bits, depth })
    }

    pub fn zeros(depth: u32) -> Result<Self> {
        Self::new(depth, 0)
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut packed = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => packed |= 1 << i,
                _ => return Err(Error::param(format!("symbol {b} is not a bit"))),
            }
        }
        Self::new(bits.len() as u32, packed)
    }

    /// Every word of the given depth, in increasing integer order.
    pub fn all(depth: u32) -> Result<Vec<CantorWord>> {
        if depth == 0 || depth > 24 {
            return Err(Error::param(format!("refusing to enumerate 2^{depth} words")));
        }
        Ok((0..1u64 << depth).map(|bits| CantorWord { bits, depth }).collect())
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn bit(&self, i: u32) -> u8 {
        ((self.bits >> i) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.depth).map(|i| self.bit(i)).collect()
    }

    /// The word read as an integer, bit 0 least significant.
    pub fn value(&self) -> u64 {
        self.bits
    }

    /// `h^k(self)` for the dyadic odometer: addition of `k` modulo `2^d`.
    pub fn offset(&self, k: i64) -> CantorWord {
        let modulus = 1i128 << self.depth;
        let v = (self.bits as i128 + k as i128).rem_euclid(modulus);
        CantorWord {
            bits: v as u64,
            depth: self.depth,
        }
    }
}

impl Cylinder for CantorWord {
    fn resolution(&self) -> u32 {
        self.depth
    }

    fn prefix_key(&self, len: u32) -> u64 {
        self.bits & low_mask(len.min(self.depth))
    }

    fn with_prefix(&self, len: u32, key: u64) -> Self {
        let m = low_mask(len.min(self.depth));
        CantorWord {
            bits: (self.bits & !m) | (key & m),
            depth: self.depth,
        }
    }
}

impl fmt::Debug for CantorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CantorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("b:")?;
        write_bits(f, self)
    }
}

fn write_bits(f: &mut fmt::Formatter<'_>, w: &CantorWord) -> fmt::Result {
    for i in 0..w.depth {
        f.write_str(if w.bit(i) == 1 { "1" } else { "0" })?;
    }
    Ok(())
}

fn parse_bits(s: &str) -> Result<CantorWord> {
    let bits = s
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::parse("binary word", s)),
        })
        .collect::<Result<Vec<u8>>>()?;
    CantorWord::from_bits(&bits).map_err(|_| Error::parse("binary word", s))
}

impl FromStr for CantorWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.strip_prefix("b:").ok_or_else(|| Error::parse("cantor word", s))?;
        parse_bits(body)
    }
}

/// `2^-k` where `k` is the length of the longest common prefix.
pub fn cantor_distance(a: &CantorWord, b: &CantorWord) -> Result<f64> {
    if a.depth != b.depth {
        return Err(Error::DepthMismatch(a.depth, b.depth));
    }
    Ok(prefix_distance(a.bits ^ b.bits))
}

pub(crate) fn prefix_distance(diff: u64) -> f64 {
    if diff == 0 {
        0.0
    } else {
        (-(diff.trailing_zeros() as f64)).exp2()
    }
}

/// A point of the one-point compactification of the integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompactifiedInteger {
    Finite(i64),
    Infinity,
}

impl CompactifiedInteger {
    /// Embedding into `[-1, 1]`: `k >= 0` goes to `1/(k+1)`, `k < 0` to
    /// `-1/(|k|+1)` and the point at infinity to `0`.
    pub fn phi(&self) -> f64 {
        match *self {
            CompactifiedInteger::Infinity => 0.0,
            CompactifiedInteger::Finite(k) if k >= 0 => 1.0 / (k as f64 + 1.0),
            CompactifiedInteger::Finite(k) => -1.0 / (k.unsigned_abs() as f64 + 1.0),
        }
    }
}

impl fmt::Display for CompactifiedInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompactifiedInteger::Finite(k) => write!(f, "k:{k}"),
            CompactifiedInteger::Infinity => f.write_str("k:inf"),
        }
    }
}

impl FromStr for CompactifiedInteger {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.strip_prefix("k:").ok_or_else(|| Error::parse("compactified integer", s))?;
        if body == "inf" {
            return Ok(CompactifiedInteger::Infinity);
        }
        body.parse()
            .map(CompactifiedInteger::Finite)
            .map_err(|_| Error::parse("compactified integer", s))
    }
}

pub fn compactified_distance(a: &CompactifiedInteger, b: &CompactifiedInteger) -> f64 {
    (a.phi() - b.phi()).abs()
}

/// Scalar used for the fractional coordinate of solenoid points and for
/// flow times. Implemented for `f64` and for exact rationals.
pub trait FlowCoordinate:
    Copy + PartialEq + PartialOrd + Add<Output = Self> + Sub<Output = Self> + fmt::Debug + Send + Sync
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Integer and fractional part; the fractional part lies in `[0, 1)`.
    fn split(self) -> (i64, Self);
    fn to_f64(self) -> f64;
}

impl FlowCoordinate for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn split(self) -> (i64, Self) {
        let fl = self.floor();
        let frac = self - fl;
        // tiny negative inputs round to a fractional part of exactly 1.0
        if frac >= 1.0 {
            (fl as i64 + 1, 0.0)
        } else {
            (fl as i64, frac)
        }
    }

    fn to_f64(self) -> f64 {
        self
    }
}

impl FlowCoordinate for Rational64 {
    fn zero() -> Self {
        Rational64::from_integer(0)
    }

    fn one() -> Self {
        Rational64::from_integer(1)
    }

    fn split(self) -> (i64, Self) {
        let fl = self.floor();
        (fl.to_integer(), self - fl)
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// A point `(c, s)` of the solenoid `[0,1] x C / (1,c) ~ (0,h(c))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolenoidPoint<C = f64> {
    pub base: CantorWord,
    pub s: C,
}

impl<C: FlowCoordinate> SolenoidPoint<C> {
    pub fn new(base: CantorWord, s: C) -> Result<Self> {
        if !(s >= C::zero() && s < C::one()) {
            return Err(Error::param(format!("fractional coordinate {s:?} not in [0,1)")));
        }
        Ok(SolenoidPoint { base, s })
    }

    pub fn depth(&self) -> u32 {
        self.base.depth()
    }
}

impl fmt::Display for SolenoidPoint<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("s:")?;
        write_bits(f, &self.base)?;
        write!(f, "@{}", self.s)
    }
}

fn parse_solenoid_body(body: &str, full: &str) -> Result<SolenoidPoint<f64>> {
    let (word, s) = body.split_once('@').ok_or_else(|| Error::parse("solenoid point", full))?;
    let base = parse_bits(word)?;
    let s: f64 = s.parse().map_err(|_| Error::parse("solenoid point", full))?;
    SolenoidPoint::new(base, s).map_err(|_| Error::parse("solenoid point", full))
}

impl FromStr for SolenoidPoint<f64> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.strip_prefix("s:").ok_or_else(|| Error::parse("solenoid point", s))?;
        parse_solenoid_body(body, s)
    }
}

/// One-step chain metric on the solenoid: the cheapest of staying in the
/// fiber or crossing the identification seam once in either direction.
pub fn solenoid_distance<C: FlowCoordinate>(p: &SolenoidPoint<C>, q: &SolenoidPoint<C>) -> Result<f64> {
    if p.depth() != q.depth() {
        return Err(Error::DepthMismatch(p.depth(), q.depth()));
    }
    let (sp, sq) = (p.s.to_f64(), q.s.to_f64());
    let same = (sp - sq).abs() + cantor_distance(&p.base, &q.base)?;
    let forward = (1.0 - sp + sq) + cantor_distance(&p.base.offset(1), &q.base)?;
    let backward = (1.0 - sq + sp) + cantor_distance(&q.base.offset(1), &p.base)?;
    Ok(same.min(forward).min(backward))
}

/// A point of `X x [0,1]` sampling the closure of a graph over the solenoid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphPoint {
    pub x: SolenoidPoint<f64>,
    pub v: f64,
}

impl GraphPoint {
    pub fn new(x: SolenoidPoint<f64>, v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::param(format!("graph value {v} not in [0,1]")));
        }
        Ok(GraphPoint { x, v })
    }
}

/// Max of the base distance and the value difference.
pub fn graph_distance(a: &GraphPoint, b: &GraphPoint) -> Result<f64> {
    Ok(solenoid_distance(&a.x, &b.x)?.max((a.v - b.v).abs()))
}

impl fmt::Display for GraphPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g:")?;
        write_bits(f, &self.x.base)?;
        write!(f, "@{}#{}", self.x.s, self.v)
    }
}

impl FromStr for GraphPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.strip_prefix("g:").ok_or_else(|| Error::parse("graph point", s))?;
        let (xs, v) = body.rsplit_once('#').ok_or_else(|| Error::parse("graph point", s))?;
        let x = parse_solenoid_body(xs, s)?;
        let v: f64 = v.parse().map_err(|_| Error::parse("graph point", s))?;
        GraphPoint::new(x, v).map_err(|_| Error::parse("graph point", s))
    }
}

macro_rules! serde_via_str {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
                ser.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(de)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    )*};
}

serde_via_str!(CantorWord, CompactifiedInteger, SolenoidPoint<f64>, GraphPoint);

/// The spaces that admit a generic `eps`-net.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Cantor { depth: u32 },
    Interval,
    Solenoid { depth: u32 },
    CompactifiedIntegers,
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let depth = |d: &str| d.parse::<u32>().map_err(|_| Error::UnsupportedSpace(s.to_owned()));
        match s.split_once(':') {
            None if s == "interval" => Ok(Space::Interval),
            None if s == "zbar" => Ok(Space::CompactifiedIntegers),
            Some(("cantor", d)) => Ok(Space::Cantor { depth: depth(d)? }),
            Some(("solenoid", d)) => Ok(Space::Solenoid { depth: depth(d)? }),
            _ => Err(Error::UnsupportedSpace(s.to_owned())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Net {
    Cantor(Vec<CantorWord>),
    Interval(Vec<f64>),
    Solenoid(Vec<SolenoidPoint<f64>>),
    Compactified(Vec<CompactifiedInteger>),
}

impl Net {
    pub fn len(&self) -> usize {
        match self {
            Net::Cantor(v) => v.len(),
            Net::Interval(v) => v.len(),
            Net::Solenoid(v) => v.len(),
            Net::Compactified(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("net radius {eps} must be positive")))
    }
}

/// A finite set within `eps` of every representable point of `space`.
pub fn epsilon_net(space: &Space, eps: f64) -> Result<Net> {
    check_eps(eps)?;
    Ok(match *space {
        Space::Cantor { depth } => Net::Cantor(cantor_net(depth, eps)?),
        Space::Interval => Net::Interval(interval_net(eps)?),
        Space::Solenoid { depth } => Net::Solenoid(solenoid_net(depth, eps)?),
        Space::CompactifiedIntegers => Net::Compactified(compactified_net(eps)?),
    })
}

/// All words of the depth. Finer than needed for large `eps`, but the
/// representable points themselves are the most useful compact sample.
pub fn cantor_net(depth: u32, eps: f64) -> Result<Vec<CantorWord>> {
    check_eps(eps)?;
    CantorWord::all(depth)
}

/// `{0, 1/m, ..., 1}` with `m = ceil(1/eps)`.
pub fn interval_net(eps: f64) -> Result<Vec<f64>> {
    check_eps(eps)?;
    let m = (1.0 / eps).ceil().max(1.0) as usize;
    Ok((0..=m).map(|j| j as f64 / m as f64).collect())
}

/// Words resolved to `eps/2` crossed with an `s`-grid of step at most `eps/2`.
pub fn solenoid_net(depth: u32, eps: f64) -> Result<Vec<SolenoidPoint<f64>>> {
    check_eps(eps)?;
    let j = dyadic_resolution(eps / 2.0).min(depth);
    if j > 20 {
        return Err(Error::param("solenoid net too fine"));
    }
    let m = (2.0 / eps).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity((1 << j) * m);
    for prefix in 0..1u64 << j {
        let base = CantorWord::new(depth, prefix)?;
        for k in 0..m {
            out.push(SolenoidPoint {
                base,
                s: k as f64 / m as f64,
            });
        }
    }
    Ok(out)
}

/// `{inf} ∪ {k : |k| <= K}` with `K` the least value for which every
/// `|k| > K` lies within `eps` of infinity. Ordered `inf, 0, 1, -1, 2, ...`.
pub fn compactified_net(eps: f64) -> Result<Vec<CompactifiedInteger>> {
    check_eps(eps)?;
    let radius = ((1.0 / eps) - 2.0).ceil().max(0.0) as i64;
    if radius > 1 << 20 {
        return Err(Error::param("compactified net too fine"));
    }
    let mut out = vec![CompactifiedInteger::Infinity, CompactifiedInteger::Finite(0)];
    for k in 1..=radius {
        out.push(CompactifiedInteger::Finite(k));
        out.push(CompactifiedInteger::Finite(-k));
    }
    Ok(out)
}
