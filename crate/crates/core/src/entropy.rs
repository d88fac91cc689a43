//! Bowen metrics, maximum `(n, eps)`-separated subsets of a finite sample and
//! entropy-rate estimates built from them.

mod maxsep;

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::{orbit, Dynamics};

/// `max_{0 <= j < n} d(T^j x, T^j y)`.
pub fn rho_n<D: Dynamics>(sys: &D, x: &D::Point, y: &D::Point, n: usize) -> f64 {
    assert!(n >= 1, "rho_n needs n >= 1");
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut best = sys.distance(&a, &b);
    for _ in 1..n {
        a = sys.step(&a);
        b = sys.step(&b);
        best = best.max(sys.distance(&a, &b));
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SepMethod {
    /// `rho_n <= eps` is an equivalence relation; the count is the number of classes.
    Ultrametric,
    BranchAndBound,
    /// Maximal set in sample order, a lower bound.
    Greedy,
}

#[derive(Clone, Copy, Debug)]
pub struct SepOptions {
    /// Largest sample solved exactly in a general metric space.
    pub exact_threshold: usize,
    /// Search nodes before branch and bound gives up.
    pub node_budget: u64,
}

impl Default for SepOptions {
    fn default() -> Self {
        SepOptions {
            exact_threshold: 4096,
            node_budget: 5_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SepResult {
    pub count: usize,
    pub exact: bool,
    pub method: SepMethod,
    /// Indices into the sample of one separated set of size `count`.
    pub witness: Vec<usize>,
}

/// Size of a largest subset of `k` whose points are pairwise `rho_n > eps`.
pub fn sep_count<D: Dynamics>(
    sys: &D,
    k: &[D::Point],
    n: usize,
    eps: f64,
    opts: &SepOptions,
) -> Result<SepResult> {
    if k.is_empty() {
        return Err(Error::param("separated sets need a nonempty sample"));
    }
    if n == 0 || !(eps > 0.0) {
        return Err(Error::param(format!("need n >= 1 and eps > 0, got n = {n}, eps = {eps}")));
    }
    if sys.ball_key(&k[0], eps).is_some() {
        return Ok(ultrametric_classes(sys, k, n, eps));
    }
    let orbits: Vec<Vec<D::Point>> = k.par_iter().map(|x| orbit(sys, x, n)).collect();
    let separated = |a: usize, b: usize| {
        orbits[a]
            .iter()
            .zip(&orbits[b])
            .any(|(p, q)| sys.distance(p, q) > eps)
    };
    if k.len() > opts.exact_threshold {
        // greedy on the fly; the full graph would be too large
        let mut chosen: Vec<usize> = Vec::new();
        for v in 0..k.len() {
            if chosen.par_iter().all(|&u| separated(u, v)) {
                chosen.push(v);
            }
        }
        return Ok(SepResult {
            count: chosen.len(),
            exact: false,
            method: SepMethod::Greedy,
            witness: chosen,
        });
    }
    let m = k.len();
    let adj: Vec<FixedBitSet> = (0..m)
        .into_par_iter()
        .map(|a| {
            let mut row = FixedBitSet::with_capacity(m);
            for b in 0..m {
                if a != b && separated(a, b) {
                    row.insert(b);
                }
            }
            row
        })
        .collect();
    let g = maxsep::Graph { adj };
    let greedy = maxsep::greedy_clique(&g);
    let (mut witness, exact) = maxsep::max_clique(&g, greedy, opts.node_budget);
    witness.sort_unstable();
    Ok(SepResult {
        count: witness.len(),
        exact,
        method: if exact {
            SepMethod::BranchAndBound
        } else {
            SepMethod::Greedy
        },
        witness,
    })
}

/// Greedy maximal separated set in sample order; never larger than the maximum.
pub fn greedy_sep<D: Dynamics>(sys: &D, k: &[D::Point], n: usize, eps: f64) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for v in 0..k.len() {
        if chosen.iter().all(|&u| rho_n(sys, &k[u], &k[v], n) > eps) {
            chosen.push(v);
        }
    }
    chosen
}

fn ultrametric_classes<D: Dynamics>(sys: &D, k: &[D::Point], n: usize, eps: f64) -> SepResult {
    let signatures: Vec<Vec<D::Key>> = k
        .par_iter()
        .map(|x| {
            orbit(sys, x, n)
                .iter()
                .map(|p| sys.ball_key(p, eps).expect("ultrametric systems key every point"))
                .collect()
        })
        .collect();
    let mut first: HashMap<&[D::Key], usize> = HashMap::new();
    let mut witness = Vec::new();
    for (i, sig) in signatures.iter().enumerate() {
        first.entry(sig.as_slice()).or_insert_with(|| {
            witness.push(i);
            i
        });
    }
    SepResult {
        count: witness.len(),
        exact: true,
        method: SepMethod::Ultrametric,
        witness,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub n: usize,
    pub eps: f64,
    pub count: usize,
    /// `ln(count) / n`.
    pub rate: f64,
    pub exact: bool,
    pub method: SepMethod,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub eps: f64,
    /// Least-squares slope of `ln sep` against `n` over the larger half of the ladder.
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub system: String,
    pub net_size: usize,
    pub depth: Option<u32>,
    pub rows: Vec<SeparationRow>,
    pub rates: Vec<RateEstimate>,
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    if xs.len() == 1 {
        return ys[0] / xs[0];
    }
    // offsets from the first point keep constant data exactly flat
    let ys: Vec<f64> = ys.iter().map(|y| y - ys[0]).collect();
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    sxy / sxx
}

/// Separated-set counts over the grid `n_ladder x eps_ladder` for the sample `k`.
pub fn entropy_estimate<D: Dynamics>(
    sys: &D,
    system: &str,
    depth: Option<u32>,
    k: &[D::Point],
    n_ladder: &[usize],
    eps_ladder: &[f64],
    opts: &SepOptions,
) -> Result<SeparationReport> {
    if n_ladder.is_empty() || eps_ladder.is_empty() {
        return Err(Error::param("empty n or eps ladder"));
    }
    let mut ns = n_ladder.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::new();
    let mut rates = Vec::new();
    for &eps in eps_ladder {
        let mut counts = Vec::with_capacity(ns.len());
        for &n in &ns {
            let r = sep_count(sys, k, n, eps, opts)?;
            counts.push(r.count);
            rows.push(SeparationRow {
                n,
                eps,
                count: r.count,
                rate: (r.count as f64).ln() / n as f64,
                exact: r.exact,
                method: r.method,
            });
        }
        let top = ns.len() / 2;
        let xs: Vec<f64> = ns[top..].iter().map(|&n| n as f64).collect();
        let ys: Vec<f64> = counts[top..].iter().map(|&c| (c as f64).ln()).collect();
        rates.push(RateEstimate {
            eps,
            rate: ls_slope(&xs, &ys),
        });
    }
    Ok(SeparationReport {
        system: system.to_owned(),
        net_size: k.len(),
        depth,
        rows,
        rates,
    })
}

impl SeparationReport {
    pub fn rate(&self, eps: f64) -> Option<f64> {
        self.rates.iter().find(|r| r.eps == eps).map(|r| r.rate)
    }

    pub fn counts(&self, eps: f64) -> Vec<usize> {
        self.rows.iter().filter(|r| r.eps == eps).map(|r| r.count).collect()
    }

    /// Positivity of every row, and monotonicity in `n` and `eps` among exact rows.
    pub fn check_invariants(&self) -> Result<()> {
        for r in &self.rows {
            if r.count == 0 || r.rate < 0.0 {
                return Err(Error::Invariant(format!("row n = {}, eps = {} has count {}", r.n, r.eps, r.count)));
            }
        }
        let exact: Vec<&SeparationRow> = self.rows.iter().filter(|r| r.exact).collect();
        for a in &exact {
            for b in &exact {
                let in_n = a.eps == b.eps && a.n < b.n && a.count > b.count;
                let in_eps = a.n == b.n && a.eps > b.eps && a.count > b.count;
                if in_n || in_eps {
                    return Err(Error::Invariant(format!(
                        "sep({}, {}) = {} exceeds sep({}, {}) = {}",
                        a.n, a.eps, a.count, b.n, b.eps, b.count
                    )));
                }
            }
        }
        Ok(())
    }
}
