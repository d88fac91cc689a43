use std::fs;
use std::sync::Arc;

use num_rational::Rational64;
use serde::Serialize;

use dynlab::entropy::{entropy_estimate, SepOptions};
use dynlab::envelope::{
    build_permutation_family, constant_embedding_check, discreteness_table, doubling_stages,
    envelope_entropy_lower_bound, FamilyOptions, Permutable, Stage,
};
use dynlab::slovak::{CoefficientScheme, SlovakModel};
use dynlab::space::{solenoid_net, CantorWord, SolenoidPoint};
use dynlab::symbolic::{
    complexity, equicontinuity_detector, is_periodically_recurrent, strided_sample, Equicontinuity, Recurrence,
    ZeroDimensional,
};
use dynlab::systems::{orbit_density_time, suspension_flow, Solenoid, System};

use crate::cli::*;
use crate::output::{config, Artifact, CliError, CliResult, Table};
use crate::systems::{parse_t0, with_system, with_zero_dimensional, AnySystem, CliSystem};

#[derive(Serialize)]
struct Config<'a, A: Serialize> {
    seed: u64,
    #[serde(flatten)]
    args: &'a A,
}

fn artifact<A: Serialize, R: Serialize>(
    name: &'static str,
    global: &GlobalArgs,
    args: &A,
    result: &R,
    table: Table,
) -> Artifact {
    Artifact::new(name, &Config { seed: global.seed, args }, result, table)
}

pub fn parse_f64_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    let out: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().ok().filter(|v| v.is_finite() && *v > 0.0))
        .collect::<Option<_>>()
        .ok_or_else(|| config(format!("{what} must be a comma list of positive numbers, got {s:?}")))?;
    if out.is_empty() {
        return Err(config(format!("{what} is empty")));
    }
    Ok(out)
}

/// `a..b` and `a..=b` are both inclusive; otherwise a comma list.
pub fn parse_n_ladder(s: &str) -> CliResult<Vec<usize>> {
    let bad = || config(format!("n ladder must be `a..b` or a comma list of positive integers, got {s:?}"));
    let out: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<CliResult<_>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

/// `doubling:<kmax>` or `k:n:q,...`.
pub fn parse_stages(s: &str) -> CliResult<Vec<(u32, u64, u64)>> {
    if let Some(k) = s.strip_prefix("doubling:") {
        let k = k.parse().map_err(|_| config(format!("bad stage count in {s:?}")))?;
        return Ok(doubling_stages(k)?);
    }
    s.split(',')
        .map(|st| {
            let parts: Vec<&str> = st.split(':').collect();
            let parsed = match parts.as_slice() {
                [k, n, q] => k.parse().ok().zip(n.parse().ok()).zip(q.parse().ok()),
                _ => None,
            };
            parsed
                .map(|((k, n), q)| (k, n, q))
                .ok_or_else(|| config(format!("stage must be k:n:q, got {st:?}")))
        })
        .collect()
}

fn sample_of<P: Clone>(net: Vec<P>, size: usize) -> Vec<P> {
    if size == 0 {
        net
    } else {
        strided_sample(&net, size)
    }
}

// ---------------------------------------------------------------------------
// entropy

pub fn entropy(global: &GlobalArgs, args: &EntropyArgs) -> CliResult<Artifact> {
    let eps = parse_f64_list(&args.eps_ladder, "eps ladder")?;
    let ns = parse_n_ladder(&args.n_ladder)?;
    let opts = SepOptions {
        exact_threshold: args.exact_threshold,
        node_budget: args.node_budget,
    };
    let sys = AnySystem::from_args(&args.system)?;
    let depth = Some(args.system.depth);
    let report = with_system!(&sys, s => {
        let k = sample_of(s.net(args.net)?, args.sample);
        entropy_estimate(s, &s.id(), depth, &k, &ns, &eps, &opts)?
    });
    let mut a = artifact("entropy", global, args, &report, Table::from_rows(&report.rows));
    if let Err(e) = report.check_invariants() {
        a.violation = Some(e.to_string());
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Serialize)]
struct ComplexityRow {
    n: usize,
    count: usize,
}

pub fn analyze_complexity(global: &GlobalArgs, args: &ComplexityArgs) -> CliResult<Artifact> {
    if args.n == 0 {
        return Err(config("--n must be positive"));
    }
    let sys = AnySystem::from_args(&args.system)?;
    let rows: Vec<ComplexityRow> = with_zero_dimensional!(&sys, s => {
        let part = s.partition(args.mesh)?;
        let k = sample_of(s.net(args.net)?, args.sample);
        (1..=args.n)
            .map(|n| Ok(ComplexityRow { n, count: complexity(s, &part, &k, n)? }))
            .collect::<CliResult<Vec<_>>>()
    })?;
    Ok(artifact("complexity", global, args, &rows, Table::from_rows(&rows)))
}

#[derive(Serialize)]
struct RecurrenceRow {
    point: String,
    eps: f64,
    horizon: usize,
    verdict: &'static str,
    k: Option<usize>,
}

fn recurrence_row<S: CliSystem>(sys: &S, args: &RecurrenceArgs) -> CliResult<RecurrenceRow> {
    let x = sys.parse_point(&args.point)?;
    let r = is_periodically_recurrent(sys, &x, args.eps, args.horizon)?;
    let (verdict, k) = match r {
        Recurrence::YesWitnessed { k } => ("yes-witnessed", Some(k)),
        Recurrence::NoWitnessed => ("no-witnessed", None),
        Recurrence::Inconclusive => ("inconclusive", None),
    };
    Ok(RecurrenceRow {
        point: sys.show_point(&x),
        eps: args.eps,
        horizon: args.horizon,
        verdict,
        k,
    })
}

pub fn analyze_recurrence(global: &GlobalArgs, args: &RecurrenceArgs) -> CliResult<Artifact> {
    let sys = AnySystem::from_args(&args.system)?;
    let row = with_system!(&sys, s => recurrence_row(s, args)?);
    let table = Table::from_rows(std::slice::from_ref(&row));
    Ok(artifact("recurrence", global, args, &row, table))
}

#[derive(Serialize)]
struct NameCountRow {
    mesh: f64,
    atoms: usize,
    length: usize,
    count: usize,
    saturated: bool,
    witness: bool,
}

pub fn analyze_equicontinuity(global: &GlobalArgs, args: &EquicontinuityArgs) -> CliResult<Artifact> {
    let meshes = parse_f64_list(&args.mesh_ladder, "mesh ladder")?;
    let sys = AnySystem::from_args(&args.system)?;
    let verdict: Equicontinuity = with_zero_dimensional!(&sys, s => {
        let k = sample_of(s.net(args.net)?, args.sample);
        Ok(equicontinuity_detector(s, &k, &meshes, args.horizon)?)
    })?;
    let (ladder, witness) = match &verdict {
        Equicontinuity::EquicontinuousEvidence { ladder } => (ladder, None),
        Equicontinuity::NotEquicontinuous { witness, ladder } => (ladder, Some(witness)),
    };
    let rows: Vec<NameCountRow> = ladder
        .iter()
        .flat_map(|nc| {
            nc.lengths.iter().zip(&nc.counts).map(move |(&length, &count)| NameCountRow {
                mesh: nc.partition.mesh,
                atoms: nc.partition.atoms,
                length,
                count,
                saturated: nc.saturated,
                witness: witness == Some(&nc.partition),
            })
        })
        .collect();
    Ok(artifact("equicontinuity", global, args, &verdict, Table::from_rows(&rows)))
}

// ---------------------------------------------------------------------------
// envelope

#[derive(Serialize)]
struct FamilySummary {
    system: String,
    q: usize,
    m: usize,
    atom: usize,
    members: usize,
    ln_size: f64,
    complete: bool,
    min_rho: f64,
    max_displacement: f64,
    support: Vec<String>,
}

fn family_summary<S: Permutable + CliSystem>(
    sys: &S,
    args: &LowerBoundArgs,
    seed: u64,
) -> CliResult<FamilySummary> {
    let net = sys.net(args.net)?;
    let stage = Stage {
        k: 1,
        delta: args.delta,
        n: args.n,
    };
    let opts = FamilyOptions {
        seed,
        ..FamilyOptions::default()
    };
    let fam = build_permutation_family(sys, &net, stage, args.eps, &opts, &SepOptions::default())?;
    Ok(FamilySummary {
        system: sys.id(),
        q: fam.q,
        m: fam.m,
        atom: fam.atom,
        members: fam.members.len(),
        ln_size: fam.ln_size,
        complete: fam.complete,
        min_rho: fam.min_pairwise_rho(sys),
        max_displacement: fam.max_displacement(sys),
        support: fam.support.iter().map(|p| sys.show_point(p)).collect(),
    })
}

#[derive(Serialize)]
struct LowerBoundResult<R> {
    stages: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<FamilySummary>,
}

pub fn envelope_lower_bound(global: &GlobalArgs, args: &LowerBoundArgs) -> CliResult<Artifact> {
    let rows = envelope_entropy_lower_bound(&parse_stages(&args.stages)?)?;
    let family = match &args.system {
        None => None,
        Some(id) => {
            let sa = SystemArgs {
                system: id.clone(),
                depth: args.depth,
                t0: None,
                span: 0,
            };
            Some(match AnySystem::from_args(&sa)? {
                AnySystem::Odometer(s) => family_summary(&s, args, global.seed)?,
                AnySystem::FullShift(s) => family_summary(&s, args, global.seed)?,
                AnySystem::PlusOne(s) => family_summary(&s, args, global.seed)?,
                _ => return Err(config("families are built on odometer, fullshift or plusone")),
            })
        }
    };
    let mut a = artifact(
        "lower-bound",
        global,
        args,
        &LowerBoundResult { stages: &rows, family },
        Table::from_rows(&rows),
    );
    let hs: Vec<f64> = rows.iter().filter(|r| r.m >= 1).map(|r| r.h).collect();
    if rows.iter().any(|r| !r.exceeds) {
        a.violation = Some("a stage falls below its analytic bound".into());
    } else if hs.windows(2).any(|w| w[1] < w[0]) {
        a.violation = Some("stage rates decrease".into());
    }
    Ok(a)
}

pub fn envelope_discreteness(global: &GlobalArgs, args: &DiscretenessArgs) -> CliResult<Artifact> {
    if args.pairs < 1 || args.samples == 0 {
        return Err(config("--pairs and --samples must be positive"));
    }
    let model = load_model(&args.model)?;
    let sample = model.sample_graph(args.samples, global.seed);
    let rows = discreteness_table(&model, args.pairs, &sample);
    let mut a = artifact("discreteness", global, args, &rows, Table::from_rows(&rows));
    if let Some(r) = rows.iter().find(|r| r.bound <= 0.0) {
        a.violation = Some(format!("T^{} and T^{} agree on the sample", r.m, r.n));
    }
    Ok(a)
}

pub fn envelope_constants(global: &GlobalArgs, args: &ConstantsArgs) -> CliResult<Artifact> {
    let eps = parse_f64_list(&args.eps_ladder, "eps ladder")?;
    let ns = parse_n_ladder(&args.n_ladder)?;
    if args.domain == 0 {
        return Err(config("--domain must be positive"));
    }
    let sys = AnySystem::from_args(&args.system)?;
    let opts = SepOptions::default();
    let rows = with_system!(&sys, s => {
        let k = s.net(args.net)?;
        let domain: Arc<[_]> = strided_sample(&k, args.domain).into();
        let mut rows = Vec::new();
        for &n in &ns {
            for &e in &eps {
                rows.push(constant_embedding_check(s, &k, domain.clone(), n, e, &opts)?);
            }
        }
        rows
    });
    let mut a = artifact("constants", global, args, &rows, Table::from_rows(&rows));
    if let Some(r) = rows.iter().find(|r| !r.equal) {
        a.violation = Some(format!("n = {}, eps = {}: counts differ", r.n, r.eps));
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// slovak

pub fn load_model(args: &ModelArgs) -> CliResult<SlovakModel> {
    let Some(path) = &args.model else {
        let scheme = CoefficientScheme::geometric(args.base)?;
        return Ok(SlovakModel::new(args.depth, parse_t0(&args.t0)?, args.truncation, scheme)?);
    };
    let text = fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| config(format!("{} is not JSON: {e}", path.display())))?;
    let body = doc.get("result").cloned().unwrap_or(doc);
    let model: SlovakModel =
        serde_json::from_value(body).map_err(|e| config(format!("{} is not a model: {e}", path.display())))?;
    let fresh = SlovakModel::new(model.depth, model.t0, model.truncation, model.scheme)?;
    if fresh != model {
        return Err(CliError::Violation(format!(
            "{} does not match a rebuild from its own parameters",
            path.display()
        )));
    }
    Ok(model)
}

pub fn slovak_build(global: &GlobalArgs, args: &ModelArgs) -> CliResult<Artifact> {
    let model = load_model(args)?;
    Ok(artifact("slovak-model", global, args, &model, Table::from_rows(&model.fibers)))
}

pub fn slovak_fibers(global: &GlobalArgs, args: &ModelArgs) -> CliResult<Artifact> {
    let model = load_model(args)?;
    Ok(artifact("fibers", global, args, &model.fibers, Table::from_rows(&model.fibers)))
}

#[derive(Serialize)]
struct SuccessorRow {
    step: usize,
    from: String,
    t_base: f64,
    t_star: f64,
    successor: String,
    expected: String,
    distance: f64,
}

pub fn slovak_successor(global: &GlobalArgs, args: &SuccessorArgs) -> CliResult<Artifact> {
    let model = load_model(&args.model)?;
    let mut z = model.z_point(args.start)?;
    let mut rows = Vec::with_capacity(args.steps);
    for step in 1..=args.steps {
        let tr = model.successor(&z, args.radius)?;
        rows.push(SuccessorRow {
            step,
            from: tr.from.to_string(),
            t_base: tr.t_base,
            t_star: tr.t_star,
            successor: tr.successor.to_string(),
            expected: tr.expected.to_string(),
            distance: tr.distance,
        });
        z = tr.successor;
    }
    Ok(artifact("successor", global, args, &rows, Table::from_rows(&rows)))
}

pub fn slovak_uc_check(global: &GlobalArgs, args: &UcArgs) -> CliResult<Artifact> {
    let eps = parse_f64_list(&args.eps, "eps list")?;
    let model = load_model(&args.model)?;
    let rows = model.uc_modulus_check(&eps, args.pairs, global.seed)?;
    let mut a = artifact("uc-check", global, args, &rows, Table::from_rows(&rows));
    if let Some(r) = rows.iter().find(|r| !r.pass) {
        a.violation = Some(format!("modulus fails at eps = {}", r.recipe.eps));
    }
    Ok(a)
}

pub fn slovak_graph(global: &GlobalArgs, args: &GraphArgs) -> CliResult<Artifact> {
    let model = load_model(&args.model)?;
    let rows = model.graph_samples(args.from, args.to, args.steps)?;
    Ok(artifact("graph", global, args, &rows, Table::from_rows(&rows)))
}

// ---------------------------------------------------------------------------
// suspension

#[derive(Serialize)]
struct TraceRow {
    k: usize,
    word: String,
    s: String,
}

#[derive(Serialize)]
struct TraceResult {
    exact: bool,
    orbit: Vec<TraceRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density_time: Option<Option<usize>>,
}

fn parse_rational(s: &str) -> CliResult<Rational64> {
    s.parse().map_err(|_| config(format!("bad fraction {s:?}")))
}

fn trace_rows<C: dynlab::space::FlowCoordinate + std::fmt::Display>(
    start: SolenoidPoint<C>,
    t0: C,
    steps: usize,
) -> Vec<TraceRow> {
    let mut p = start;
    let mut rows = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        rows.push(TraceRow {
            k,
            word: p.base.to_string(),
            s: p.s.to_string(),
        });
        p = suspension_flow(&p, t0);
    }
    rows
}

pub fn suspension_trace(global: &GlobalArgs, args: &TraceArgs) -> CliResult<Artifact> {
    if !(1..=40).contains(&args.depth) {
        return Err(config(format!("depth {} not in 1..=40", args.depth)));
    }
    let (word, s_text) = match &args.point {
        None => (CantorWord::zeros(args.depth)?, "0".to_owned()),
        Some(text) => {
            let body = text.strip_prefix("s:").ok_or_else(|| config(format!("bad point {text:?}")))?;
            let (bits, s) = body.split_once('@').ok_or_else(|| config(format!("bad point {text:?}")))?;
            let w: CantorWord = format!("b:{bits}").parse()?;
            if w.depth() != args.depth {
                return Err(config(format!("point has depth {}, expected {}", w.depth(), args.depth)));
            }
            (w, s.to_owned())
        }
    };
    let result = if args.t0.contains('/') {
        if args.density_eps.is_some() {
            return Err(config("orbit density is measured in floating point only"));
        }
        let t0 = parse_rational(&args.t0)?;
        let s = parse_rational(&s_text)?;
        let start = SolenoidPoint::new(word, s)?;
        TraceResult {
            exact: true,
            orbit: trace_rows(start, t0, args.steps),
            density_time: None,
        }
    } else {
        let t0 = parse_t0(&args.t0)?;
        let s: f64 = s_text.parse().map_err(|_| config(format!("bad flow coordinate {s_text:?}")))?;
        let start = SolenoidPoint::new(word, s)?;
        let density_time = match args.density_eps {
            None => None,
            Some(eps) => {
                let sol = Solenoid::new(args.depth, t0)?;
                let net = solenoid_net(args.depth, eps)?;
                Some(orbit_density_time(&sol, &start, &net, eps, args.max_iter))
            }
        };
        TraceResult {
            exact: false,
            orbit: trace_rows(start, t0, args.steps),
            density_time,
        }
    };
    let table = Table::from_rows(&result.orbit);
    Ok(artifact("trace", global, args, &result, table))
}
