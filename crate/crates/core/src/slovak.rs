//! A finite-truncation model of the graph closure over the solenoid: the
//! sine-curve function `g`, the bump `f` along the composant of `x0`, the
//! weighted orbit sum `F`, its vertical fibers over the orbit of `x0`, the
//! lifted map, and the successor relation on the closed ends of the
//! half-line path components.

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{graph_distance, solenoid_distance, CantorWord, GraphPoint, SolenoidPoint};
use crate::systems::{suspension_flow, Solenoid};

/// Points closer than this to an orbit point are taken to be that point.
const ORBIT_TOL: f64 = 1e-10;
/// Allowed gap between a graph point's value and `F` at its base.
const GRAPH_TOL: f64 = 1e-9;

/// `g(x) = (1 - cos(pi/x))/2` on `[-1/2, 0)`, `0` on `[0, 1/2]`.
pub fn g_eval(x: f64) -> Result<f64> {
    if !(-0.5..=0.5).contains(&x) {
        return Err(Error::Domain(format!("g is defined on [-1/2, 1/2], got {x}")));
    }
    Ok(if x < 0.0 {
        0.5 * (1.0 - (std::f64::consts::PI / x).cos())
    } else {
        0.0
    })
}

/// Weights `a_n = c * base^-|n|` with `c = (base-1)/(base+1)`, summing to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientScheme {
    pub base: u32,
}

impl Default for CoefficientScheme {
    fn default() -> Self {
        CoefficientScheme { base: 2 }
    }
}

impl CoefficientScheme {
    pub fn geometric(base: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::param(format!("geometric base {base} must be at least 2")));
        }
        Ok(CoefficientScheme { base })
    }

    fn c(&self) -> f64 {
        (self.base as f64 - 1.0) / (self.base as f64 + 1.0)
    }

    pub fn a(&self, n: i64) -> f64 {
        self.c() * (self.base as f64).powi(-(n.unsigned_abs() as i32))
    }

    pub fn a_exact(&self, n: i64) -> Result<Rational64> {
        let b = self.base as i64;
        let pow = b
            .checked_pow(n.unsigned_abs() as u32)
            .ok_or_else(|| Error::param(format!("a_{n} overflows exact arithmetic")))?;
        Ok(Rational64::new(b - 1, (b + 1) * pow))
    }

    /// `sum_{|n| > N} a_n`.
    pub fn tail(&self, truncation: u32) -> f64 {
        2.0 * self.c() * (self.base as f64).powi(-(truncation as i32)) / (self.base as f64 - 1.0)
    }

    pub fn tail_exact(&self, truncation: u32) -> Result<Rational64> {
        let b = self.base as i64;
        Ok(self.a_exact(truncation as i64)? * Rational64::new(2, b - 1))
    }

    /// Bound on both `a_{n-1}/a_n` and `a_n/a_{n-1}`.
    pub fn ratio_bound(&self) -> f64 {
        self.base as f64
    }

    /// `sum_{n not in [-n0, n0-1]} a_n`, the tail used to pick `n0`.
    pub fn asymmetric_tail(&self, n0: u32) -> f64 {
        let b = self.base as f64;
        // n < -n0 contributes a_{n0+1}/(1-1/b), n >= n0 contributes a_{n0}/(1-1/b)
        (self.a(n0 as i64 + 1) + self.a(n0 as i64)) * b / (b - 1.0)
    }

    /// Exact normalization and the ratio bounds up to `|n| <= truncation`.
    pub fn check(&self, truncation: u32) -> Result<()> {
        let mut sum = self.tail_exact(truncation)?;
        for n in -(truncation as i64)..=truncation as i64 {
            let a = self.a_exact(n)?;
            if a <= Rational64::from_integer(0) {
                return Err(Error::Invariant(format!("a_{n} is not positive")));
            }
            let prev = self.a_exact(n - 1)?;
            let bound = Rational64::from_integer(self.base as i64);
            if prev / a > bound || a / prev > bound {
                return Err(Error::Invariant(format!("ratio bound fails at n = {n}")));
            }
            sum += a;
        }
        if sum != Rational64::from_integer(1) {
            return Err(Error::Invariant(format!("coefficients sum to {sum}")));
        }
        Ok(())
    }
}

/// The vertical interval `{T^n x0} x [bottom, top]` of the graph closure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fiber {
    pub n: i64,
    pub point: SolenoidPoint,
    pub bottom: f64,
    pub top: f64,
    pub length: f64,
    /// Truncation error carried by `bottom` and `top`.
    pub tail: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlovakModel {
    pub depth: u32,
    pub t0: f64,
    pub truncation: u32,
    pub scheme: CoefficientScheme,
    pub x0: SolenoidPoint,
    /// Ramp radius of the extension of `f` off the arc.
    pub r0: f64,
    /// `T^k x0` for `|k| <= 2N + 1`, index `k + 2N + 1`.
    orbit: Vec<SolenoidPoint>,
    pub fibers: Vec<Fiber>,
}

impl SlovakModel {
    pub fn new(depth: u32, t0: f64, truncation: u32, scheme: CoefficientScheme) -> Result<Self> {
        if !(2..=20).contains(&depth) {
            return Err(Error::param(format!("depth {depth} not in 2..=20")));
        }
        if !(t0 > 0.0 && t0 < 1.0) {
            return Err(Error::param(format!("flow time {t0} not in (0,1)")));
        }
        if truncation == 0 || truncation > 40 {
            return Err(Error::param(format!("truncation {truncation} not in 1..=40")));
        }
        scheme.check(truncation)?;
        let x0 = SolenoidPoint::new(CantorWord::zeros(depth)?, 0.0)?;
        let reach = 2 * truncation as i64 + 1;
        let orbit = (-reach..=reach)
            .map(|k| suspension_flow(&x0, k as f64 * t0))
            .collect();
        let mut model = SlovakModel {
            depth,
            t0,
            truncation,
            scheme,
            x0,
            r0: (-(depth as f64)).exp2(),
            orbit,
            fibers: Vec::new(),
        };
        let n = truncation as i64;
        model.fibers = (-n..=n).map(|k| model.compute_fiber(k)).collect::<Result<_>>()?;
        Ok(model)
    }

    pub fn solenoid(&self) -> Solenoid {
        Solenoid {
            depth: self.depth,
            t0: self.t0,
        }
    }

    pub fn tail(&self) -> f64 {
        self.scheme.tail(self.truncation)
    }

    /// Period of `p`: the truncated solenoid is a circle of flow length `2^depth`.
    pub fn period(&self) -> f64 {
        (self.depth as f64).exp2() / self.t0
    }

    /// `p(t) = phi_{t t0}(x0)`.
    pub fn composant_param(&self, t: f64) -> SolenoidPoint {
        suspension_flow(&self.x0, t * self.t0)
    }

    /// The parameter of `x` on the composant of `x0`, in `(-P/2, P/2]`.
    pub fn composant_param_inverse(&self, x: &SolenoidPoint) -> f64 {
        let len = (self.depth as f64).exp2();
        let words = (x.base.value() as f64 - self.x0.base.value() as f64).rem_euclid(len);
        let mut tau = words + x.s - self.x0.s;
        if tau > len / 2.0 {
            tau -= len;
        }
        tau / self.t0
    }

    /// `T^k x0`.
    pub fn orbit_point(&self, k: i64) -> SolenoidPoint {
        let reach = 2 * self.truncation as i64 + 1;
        if k.abs() <= reach {
            self.orbit[(k + reach) as usize]
        } else {
            suspension_flow(&self.x0, k as f64 * self.t0)
        }
    }

    /// `k` with `x = T^k x0`, searching `|k| <= bound`.
    pub fn orbit_index(&self, x: &SolenoidPoint, bound: i64) -> Option<i64> {
        let t = self.composant_param_inverse(x);
        let k = t.round() as i64;
        (k.abs() <= bound && solenoid_distance(x, &self.orbit_point(k)).ok()? < ORBIT_TOL).then_some(k)
    }

    /// `g` read along the arc `p([-1/2, 1/2])` and ramped to zero within
    /// `r0` of the arc's ends; zero elsewhere.
    pub fn f_eval(&self, x: &SolenoidPoint) -> Result<f64> {
        if x.base == self.x0.base && x.s == self.x0.s {
            return Err(Error::Domain("f is undefined at x0".into()));
        }
        let half = self.t0 / 2.0;
        let plus = self.x0.base;
        let minus = self.x0.base.offset(-1);
        // words other than these lie at least 2^-(depth-1) > r0 from the arc
        let ramp = |d: f64, end: f64| -> Result<f64> { Ok((1.0 - d / self.r0).max(0.0) * g_eval(end)?) };
        if x.base == plus {
            if x.s <= half {
                return g_eval(x.s / self.t0);
            }
            return ramp(x.s - half, 0.5);
        }
        if x.base == minus {
            if x.s >= 1.0 - half {
                return g_eval((x.s - 1.0) / self.t0);
            }
            return ramp(1.0 - half - x.s, -0.5);
        }
        Ok(0.0)
    }

    /// Truncated `F(x) = sum_{|m| <= N} a_m f(T^m x)` and the tail bound on its error.
    pub fn big_f(&self, x: &SolenoidPoint) -> Result<(f64, f64)> {
        let n = self.truncation as i64;
        if let Some(k) = self.orbit_index(x, n) {
            return Err(Error::Domain(format!("F is discontinuous at T^{k} x0")));
        }
        let mut sum = 0.0;
        for m in -n..=n {
            sum += self.scheme.a(m) * self.f_eval(&suspension_flow(x, m as f64 * self.t0))?;
        }
        Ok((sum, self.tail()))
    }

    /// `F(p(t))`, computing the iterates along the composant directly.
    pub fn big_f_along(&self, t: f64) -> Result<f64> {
        let n = self.truncation as i64;
        let mut sum = 0.0;
        for m in -n..=n {
            sum += self.scheme.a(m) * self.f_eval(&self.composant_param(t + m as f64))?;
        }
        Ok(sum)
    }

    fn compute_fiber(&self, n: i64) -> Result<Fiber> {
        let trunc = self.truncation as i64;
        let mut bottom = 0.0;
        for m in -trunc..=trunc {
            if m != -n {
                bottom += self.scheme.a(m) * self.f_eval(&self.orbit_point(m + n))?;
            }
        }
        let length = self.scheme.a(-n);
        Ok(Fiber {
            n,
            point: self.orbit_point(n),
            bottom,
            top: bottom + length,
            length,
            tail: self.tail(),
        })
    }

    /// The interval `W_n` over `T^n x0`, `|n| <= N`.
    pub fn fiber(&self, n: i64) -> Result<Fiber> {
        let trunc = self.truncation as i64;
        if n.abs() > trunc {
            return Err(Error::param(format!("fiber {n} beyond truncation {trunc}")));
        }
        Ok(self.fibers[(n + trunc) as usize])
    }

    /// The closed end of the path component starting at `W_n`.
    pub fn z_point(&self, n: i64) -> Result<GraphPoint> {
        let w = self.fiber(n)?;
        GraphPoint::new(w.point, w.top)
    }

    pub fn graph_point(&self, x: &SolenoidPoint) -> Result<GraphPoint> {
        GraphPoint::new(*x, self.big_f(x)?.0)
    }

    fn lifted(&self, gp: &GraphPoint, dir: i64) -> Result<GraphPoint> {
        let trunc = self.truncation as i64;
        if let Some(n) = self.orbit_index(&gp.x, trunc) {
            let w = self.fiber(n)?;
            let tol = 1e-6 * w.length;
            if gp.v < w.bottom - tol || gp.v > w.top + tol {
                return Err(Error::Domain(format!("value {} outside fiber W_{n}", gp.v)));
            }
            let next = self.fiber(n + dir).map_err(|_| Error::Domain(format!("W_{} is beyond truncation", n + dir)))?;
            let lambda = ((gp.v - w.bottom) / w.length).clamp(0.0, 1.0);
            return GraphPoint::new(next.point, next.bottom + lambda * next.length);
        }
        let (v, _) = self.big_f(&gp.x)?;
        if (v - gp.v).abs() > GRAPH_TOL {
            return Err(Error::Domain(format!("{gp} is neither on the graph nor in a fiber")));
        }
        let y = suspension_flow(&gp.x, dir as f64 * self.t0);
        self.graph_point(&y)
    }

    /// The extension of `(x, F x) -> (T x, F T x)`; fibers go affinely onto the next fiber.
    pub fn lifted_step(&self, gp: &GraphPoint) -> Result<GraphPoint> {
        self.lifted(gp, 1)
    }

    pub fn lifted_inverse(&self, gp: &GraphPoint) -> Result<GraphPoint> {
        self.lifted(gp, -1)
    }

    /// `T~^k` on a graph point off the orbit of `x0`.
    pub fn lifted_power(&self, gp: &GraphPoint, k: i64) -> Result<GraphPoint> {
        let (v, _) = self.big_f(&gp.x)?;
        if (v - gp.v).abs() > GRAPH_TOL {
            return Err(Error::Domain(format!("{gp} is not on the graph")));
        }
        self.graph_point(&suspension_flow(&gp.x, k as f64 * self.t0))
    }

    /// Values of `F o p` at `count` points of `(t_lo, t_hi)`: a uniform grid
    /// plus points accumulating geometrically at `t_lo`.
    fn samples_in(&self, t_lo: f64, t_hi: f64, count: usize) -> Result<Vec<f64>> {
        let w = t_hi - t_lo;
        let mut out = Vec::with_capacity(count + 48);
        for i in 0..count {
            out.push(self.big_f_along(t_lo + w * (i as f64 + 0.5) / count as f64)?);
        }
        // stop before the offsets fall below the resolution of p
        let floor = 1e-14 * t_lo.abs().max(1.0);
        for j in 1..=48 {
            let off = w * (-(j as f64)).exp2();
            if off < floor {
                break;
            }
            out.push(self.big_f_along(t_lo + off)?);
        }
        Ok(out)
    }

    fn spread(values: &[f64]) -> (f64, f64) {
        values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Range of `F o p` on `(t - w, t)`, sampled on a low-discrepancy sequence.
    pub fn left_range(&self, t: f64, w: f64, samples: usize) -> Result<(f64, f64)> {
        let golden = crate::systems::GOLDEN;
        let vals = (0..samples)
            .map(|i| {
                let u = ((i as f64 + 0.5) * golden).fract();
                self.big_f_along(t - w * u.max(1e-15))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::spread(&vals))
    }

    /// Sampled oscillation of `F o p` on `(t - w, t) ∪ (t, t + w)`.
    pub fn oscillation(&self, t: f64, w: f64, samples: usize) -> Result<f64> {
        let (lo, hi) = self.left_range(t, w, samples)?;
        let (rlo, rhi) = Self::spread(&self.samples_in(t, t + w, samples)?);
        Ok(hi.max(rhi) - lo.min(rlo))
    }

    /// Smallest oscillation threshold that still sees every fiber.
    fn theta(&self) -> f64 {
        self.scheme.a(self.truncation as i64) / 2.0
    }

    fn smooth_on(&self, t: f64, w: f64) -> Result<bool> {
        let (lo, hi) = Self::spread(&self.samples_in(t, t + w, 32)?);
        Ok(hi - lo < self.theta())
    }

    /// The accumulation interval of the sine curve ending at parameter `t`
    /// and the value the graph attaches with from the right.
    fn accumulation(&self, t: f64) -> Result<((f64, f64), f64)> {
        let range = self.left_range(t, 1e-4, 4096)?;
        let right = self.big_f_along(t + 1e-9)?;
        Ok((range, right))
    }

    /// The other closed end in the closure of the path component of `z`,
    /// found by following the graph along the composant until it stops
    /// being locally connected, without using the lifted map.
    ///
    /// Fails with `Invariant` if the traced point is not `lifted_step(z)`.
    pub fn successor(&self, z: &GraphPoint, radius: f64) -> Result<SuccessorTrace> {
        if !(radius > 0.0 && radius < self.period() / 2.0) {
            return Err(Error::param(format!(
                "search radius {radius} must be in (0, {})",
                self.period() / 2.0
            )));
        }
        let t_base = self.composant_param_inverse(&z.x);
        if solenoid_distance(&self.composant_param(t_base), &z.x)? > ORBIT_TOL {
            return Err(Error::param("point is not on the composant of x0"));
        }
        let ((lo, hi), right) = self.accumulation(t_base)?;
        if hi - lo < self.theta() {
            return Err(Error::param("the graph is continuous at this point; it has no closed end"));
        }
        let closed_end = if (hi - right).abs() > (lo - right).abs() { hi } else { lo };
        if (z.v - closed_end).abs() > 1e-6 {
            return Err(Error::param(format!("{z} is not the closed end of its path component")));
        }

        // Walk forward: first leave the flat part, then find the first cell
        // after which the graph is flat again. The sine curve sits between.
        let cell = 1.0 / 32.0;
        let steps = (radius / cell).ceil() as usize;
        let mut entered = false;
        let mut bracket = None;
        for i in 0..steps {
            let c = t_base + i as f64 * cell;
            let flat = self.smooth_on(c, cell)?;
            if !flat {
                entered = true;
            } else if entered {
                bracket = Some((c - cell, c));
                break;
            }
        }
        let (mut a, mut b) = bracket.ok_or_else(|| {
            Error::TracingLeftRegion(format!("no end of the path component within {radius} of t = {t_base}"))
        })?;
        // the end t* lies in (a, b]; the graph is flat on (t*, b] and not on (a, t*)
        while b - a > 1e-13 * t_base.abs().max(1.0) {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.smooth_on(mid, b - mid)? {
                b = mid;
            } else {
                a = mid;
            }
        }
        let t_star = b;
        let ((lo, hi), right) = self.accumulation(t_star)?;
        let v = if (hi - right).abs() > (lo - right).abs() { hi } else { lo };
        let successor = GraphPoint::new(self.composant_param(t_star), v)?;
        let expected = self.lifted_step(z)?;
        let distance = graph_distance(&successor, &expected)?;
        if distance > 1e-6 {
            return Err(Error::Invariant(format!(
                "traced successor {successor} differs from lifted step {expected} by {distance}"
            )));
        }
        Ok(SuccessorTrace {
            from: *z,
            t_base,
            t_star,
            accumulation: (lo, hi),
            successor,
            expected,
            distance,
        })
    }

    /// The constants of the uniform-continuity argument for `eps`.
    pub fn uc_recipe(&self, eps: f64) -> Result<UcRecipe> {
        if !(eps > 0.0) {
            return Err(Error::param("eps must be positive"));
        }
        let a_bound = self.scheme.ratio_bound();
        let target = eps / (5.0 * a_bound);
        let n0 = (1..=60u32)
            .find(|&n0| self.scheme.asymmetric_tail(n0) < target)
            .ok_or_else(|| Error::param("eps too small for the tail bound"))?;
        let pts: Vec<SolenoidPoint> = (-(n0 as i64)..=n0 as i64).map(|k| self.orbit_point(k)).collect();
        let mut min_gap = f64::INFINITY;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                min_gap = min_gap.min(solenoid_distance(p, q)?);
            }
        }
        // 2r-balls around the orbit points are then disjoint
        let r = 0.99 * min_gap / 4.0;
        // |g'(t)| <= pi/(2t^2), and off the r-ball |t| >= r/t0
        let lipschitz = std::f64::consts::PI * self.t0 / (2.0 * r * r);
        let delta = 0.99
            * r.min(target)
                .min(eps / (5.0 * a_bound * (2 * n0 + 1) as f64 * lipschitz))
                .min(eps);
        Ok(UcRecipe {
            eps,
            ratio_bound: a_bound,
            n0,
            r,
            lipschitz,
            delta,
        })
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> SolenoidPoint {
        if rng.gen_bool(0.5) {
            let n = self.truncation as f64 + 1.0;
            self.composant_param(rng.gen_range(-n..n))
        } else {
            let bits = rng.gen_range(0..1u64 << self.depth);
            SolenoidPoint {
                base: CantorWord::new(self.depth, bits).expect("bits fit the depth"),
                s: rng.gen_range(0.0..1.0),
            }
        }
    }

    /// `count` graph points over random solenoid points, half of them on
    /// the composant of `x0`; points on the truncated orbit are redrawn.
    pub fn sample_graph(&self, count: usize, seed: u64) -> Vec<GraphPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            if let Ok(gp) = self.graph_point(&self.random_point(&mut rng)) {
                out.push(gp);
            }
        }
        out
    }

    /// Samples graph pairs closer than the recipe's `delta` and records the
    /// largest distance between their images under the lifted map and its inverse.
    pub fn uc_modulus_check(&self, eps_ladder: &[f64], pairs: usize, seed: u64) -> Result<Vec<UcRow>> {
        if eps_ladder.is_empty() {
            return Err(Error::param("empty eps ladder"));
        }
        let mut rows = Vec::with_capacity(eps_ladder.len());
        for (idx, &eps) in eps_ladder.iter().enumerate() {
            let recipe = self.uc_recipe(eps)?;
            let delta = recipe.delta;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx as u64));
            let (mut tested, mut forward, mut inverse) = (0usize, 0.0f64, 0.0f64);
            let cross_words = (-((self.depth - 1) as f64)).exp2() < delta / 2.0;
            for _ in 0..pairs {
                let x = self.random_point(&mut rng);
                let mut y = suspension_flow(&x, rng.gen_range(-delta..delta) * if cross_words { 0.5 } else { 1.0 });
                if cross_words && rng.gen_bool(0.5) {
                    let flip = 1u64 << (self.depth - 1);
                    y.base = CantorWord::new(self.depth, y.base.value() ^ flip).expect("same depth");
                }
                let (Ok(gx), Ok(gy)) = (self.graph_point(&x), self.graph_point(&y)) else {
                    continue;
                };
                if graph_distance(&gx, &gy)? >= delta {
                    continue;
                }
                let step = |g: &GraphPoint, inv: bool| if inv { self.lifted_inverse(g) } else { self.lifted_step(g) };
                let (Ok(fx), Ok(fy), Ok(bx), Ok(by)) = (step(&gx, false), step(&gy, false), step(&gx, true), step(&gy, true)) else {
                    continue;
                };
                tested += 1;
                forward = forward.max(graph_distance(&fx, &fy)?);
                inverse = inverse.max(graph_distance(&bx, &by)?);
            }
            rows.push(UcRow {
                recipe,
                pairs: tested,
                worst_forward: forward,
                worst_inverse: inverse,
                pass: forward <= eps && inverse <= eps,
            });
        }
        Ok(rows)
    }

    /// Share of random points whose section is a singleton at scale `w`:
    /// `F` varies by less than the smallest fiber length within `w` along
    /// the flow line.
    pub fn singleton_fraction(&self, samples: usize, w: f64, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut singletons = 0usize;
        let mut total = 0usize;
        for _ in 0..samples {
            let bits = rng.gen_range(0..1u64 << self.depth);
            let x = SolenoidPoint {
                base: CantorWord::new(self.depth, bits)?,
                s: rng.gen_range(0.0..1.0),
            };
            let vals: Vec<f64> = (0..=32)
                .filter_map(|i| self.big_f(&suspension_flow(&x, w * (i as f64 / 16.0 - 1.0))).ok().map(|v| v.0))
                .collect();
            let (lo, hi) = Self::spread(&vals);
            total += 1;
            if hi - lo < self.theta() {
                singletons += 1;
            }
        }
        Ok(singletons as f64 / total.max(1) as f64)
    }

    /// Rows of the graph of `F o p` on a grid of `steps + 1` parameters,
    /// skipping the discontinuities.
    pub fn graph_samples(&self, t_lo: f64, t_hi: f64, steps: usize) -> Result<Vec<GraphSample>> {
        if !(t_hi > t_lo) || steps == 0 {
            return Err(Error::param("graph range must be nonempty"));
        }
        let mut out = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let t = t_lo + (t_hi - t_lo) * i as f64 / steps as f64;
            let x = self.composant_param(t);
            let Ok((value, tail)) = self.big_f(&x) else {
                continue;
            };
            out.push(GraphSample {
                t,
                s: x.s,
                word: x.base.to_string(),
                value,
                tail,
            });
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessorTrace {
    pub from: GraphPoint,
    pub t_base: f64,
    pub t_star: f64,
    pub accumulation: (f64, f64),
    pub successor: GraphPoint,
    pub expected: GraphPoint,
    pub distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UcRecipe {
    pub eps: f64,
    pub ratio_bound: f64,
    pub n0: u32,
    pub r: f64,
    pub lipschitz: f64,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UcRow {
    #[serde(flatten)]
    pub recipe: UcRecipe,
    pub pairs: usize,
    pub worst_forward: f64,
    pub worst_inverse: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSample {
    pub t: f64,
    pub s: f64,
    pub word: String,
    #[serde(rename = "F")]
    pub value: f64,
    #[serde(rename = "tail-error")]
    pub tail: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::GOLDEN;

    fn model() -> SlovakModel {
        SlovakModel::new(4, GOLDEN, 12, CoefficientScheme::default()).unwrap()
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_eval(0.25).unwrap(), 0.0);
        assert!((g_eval(-1.0 / 3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(g_eval(-0.5).unwrap().abs() < 1e-15);
        assert_eq!(g_eval(0.0).unwrap(), 0.0);
        assert!(g_eval(0.6).is_err());
    }

    #[test]
    fn scheme_arithmetic() {
        let s = CoefficientScheme::default();
        s.check(12).unwrap();
        assert_eq!(s.a_exact(0).unwrap(), Rational64::new(1, 3));
        assert_eq!(s.a_exact(-2).unwrap(), Rational64::new(1, 12));
        assert_eq!(s.tail_exact(12).unwrap(), Rational64::new(2, 3 * 4096));
        assert!((s.tail(12) - 2.0 / (3.0 * 4096.0)).abs() < 1e-18);
        // the tail outside [-n0, n0-1] is exactly 2^-n0 for base 2
        for n0 in 1..10 {
            assert!((s.asymmetric_tail(n0) - (-(n0 as f64)).exp2()).abs() < 1e-15);
        }
        CoefficientScheme::geometric(3).unwrap().check(10).unwrap();
        assert!(CoefficientScheme::geometric(1).is_err());
    }

    #[test]
    fn composant_examples() {
        let m = model();
        assert_eq!(m.composant_param(0.0), m.x0);
        let one = m.composant_param(1.0);
        assert!(solenoid_distance(&one, &m.solenoid().time_map(&m.x0)).unwrap() < 1e-15);
        let half = m.composant_param(0.5 / GOLDEN);
        assert_eq!(half.base, m.x0.base);
        assert!((half.s - 0.5).abs() < 1e-15);
        for t in [-7.3, -0.2, 0.0, 0.4, 3.9, 12.5] {
            assert!((m.composant_param_inverse(&m.composant_param(t)) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn f_examples() {
        let m = model();
        assert_eq!(m.f_eval(&m.composant_param(0.25)).unwrap(), 0.0);
        assert!((m.f_eval(&m.composant_param(-1.0 / 3.0)).unwrap() - 1.0).abs() < 1e-12);
        let far = SolenoidPoint::new(CantorWord::new(4, 0b0110).unwrap(), 0.5).unwrap();
        assert_eq!(m.f_eval(&far).unwrap(), 0.0);
        assert!(m.f_eval(&m.x0).is_err());
    }

    #[test]
    fn big_f_examples() {
        let m = model();
        let far = SolenoidPoint::new(CantorWord::new(4, 0b0110).unwrap(), 0.5).unwrap();
        let (v, tail) = m.big_f(&far).unwrap();
        assert!((0.0..1.0).contains(&v));
        assert!((tail - 2.0 / (3.0 * 4096.0)).abs() < 1e-18);
        // T^-1 p(-1/3) = p(-4/3): the m = 1 term sees p(-1/3)
        let x = m.composant_param(-1.0 / 3.0 - 1.0);
        assert!(m.big_f(&x).unwrap().0 >= 1.0 / 6.0 - 1e-12);
        assert!(m.big_f(&m.orbit_point(3)).is_err());
        // nothing near the arc: x with every iterate off J
        let quiet = m.composant_param(0.25);
        assert_eq!(m.big_f(&quiet).unwrap().0, 0.0);
    }

    #[test]
    fn fiber_examples() {
        let m = model();
        assert_eq!(m.fiber(0).unwrap().length, 1.0 / 3.0);
        assert_eq!(m.fiber(2).unwrap().length, 1.0 / 12.0);
        assert!(m.fiber(13).is_err());
        for w in &m.fibers {
            assert_eq!(w.top - w.bottom, m.scheme.a(-w.n));
            assert_eq!(w.tail, 2.0 / (3.0 * 4096.0));
        }
    }

    #[test]
    fn lifted_step_examples() {
        let m = model();
        let w0 = m.fiber(0).unwrap();
        let w1 = m.fiber(1).unwrap();
        let img = m.lifted_step(&GraphPoint::new(w0.point, w0.bottom).unwrap()).unwrap();
        assert_eq!((img.x, img.v), (w1.point, w1.bottom));
        let img = m.lifted_step(&m.z_point(0).unwrap()).unwrap();
        assert_eq!(img, m.z_point(1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let gp = m.graph_point(&m.random_point(&mut rng)).unwrap();
            let there = m.lifted_step(&gp).unwrap();
            assert!(solenoid_distance(&there.x, &m.solenoid().time_map(&gp.x)).unwrap() < 1e-15);
            let back = m.lifted_inverse(&there).unwrap();
            assert!(graph_distance(&back, &gp).unwrap() < 1e-12);
        }
        let off = GraphPoint::new(m.composant_param(0.3), 0.9).unwrap();
        assert!(m.lifted_step(&off).is_err());
    }

    #[test]
    fn oscillation_matches_coefficients() {
        let m = model();
        for n in 0..=3i64 {
            let osc = m.oscillation(-(n as f64), 1e-6, 2000).unwrap();
            assert!((osc - m.scheme.a(n)).abs() < 2.0 * m.tail(), "n = {n}: {osc}");
        }
        // off the orbit the oscillation vanishes with the window
        let osc = m.oscillation(0.37, 1e-6, 200).unwrap();
        assert!(osc < 1e-9);
    }

    #[test]
    fn successor_follows_lifted_map() {
        let m = model();
        let mut z = m.z_point(0).unwrap();
        let mut seen = vec![z];
        for k in 1..=5 {
            let tr = m.successor(&z, 2.0).unwrap();
            assert!(graph_distance(&tr.successor, &m.z_point(k).unwrap()).unwrap() < 1e-6);
            assert!((tr.t_star - k as f64).abs() < 1e-9);
            z = tr.successor;
            seen.push(z);
        }
        for (i, a) in seen.iter().enumerate() {
            for b in &seen[i + 1..] {
                assert!(graph_distance(a, b).unwrap() > 1e-3);
            }
        }
        let bottom = GraphPoint::new(m.fiber(0).unwrap().point, m.fiber(0).unwrap().bottom).unwrap();
        assert!(m.successor(&bottom, 2.0).is_err());
        assert!(matches!(m.successor(&m.z_point(0).unwrap(), 0.3), Err(Error::TracingLeftRegion(_))));
    }

    #[test]
    fn uc_recipe_values() {
        let m = model();
        let r = m.uc_recipe(0.5).unwrap();
        assert_eq!(r.n0, 5);
        assert!(r.delta < r.r && r.delta < 0.05);
        let rows = m.uc_modulus_check(&[0.5, 0.25], 4000, 1).unwrap();
        for row in &rows {
            assert!(row.pairs > 100, "{row:?}");
            assert!(row.pass, "{row:?}");
        }
        let rows = m.uc_modulus_check(&[5.0], 500, 1).unwrap();
        assert!(rows[0].pass);
    }

    #[test]
    fn singletons_fill_out_with_depth() {
        let fractions: Vec<f64> = [3, 5, 7]
            .iter()
            .map(|&d| {
                let m = SlovakModel::new(d, GOLDEN, 8, CoefficientScheme::default()).unwrap();
                m.singleton_fraction(2000, 0.05, 9).unwrap()
            })
            .collect();
        assert!(fractions.windows(2).all(|w| w[0] < w[1]), "{fractions:?}");
        assert!(fractions[2] > 0.9, "{fractions:?}");
    }

    #[test]
    fn model_round_trips_through_json() {
        let m = model();
        let json = serde_json::to_string(&m).unwrap();
        let back: SlovakModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
