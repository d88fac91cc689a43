//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the PASS/FAIL lines always reach the output.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dynlab::entropy::{entropy_estimate, rho_n, sep_count, SepOptions};
use dynlab::envelope::{
    build_permutation_family, constant_embedding_check, discreteness_table, doubling_stages,
    envelope_entropy_lower_bound, Envelope, FamilyOptions, Stage,
};
use dynlab::slovak::{CoefficientScheme, SlovakModel};
use dynlab::space::{graph_distance, solenoid_distance, CantorWord, SolenoidPoint};
use dynlab::symbolic::{complexity, equicontinuity_detector, strided_sample, Equicontinuity, ZeroDimensional};
use dynlab::systems::{suspension_flow, FullShift, Odometer, PlusOne, Rotation, Sturmian, System, GOLDEN};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn full_shift_entropy() -> Outcome {
    let start = Instant::now();
    let fs = FullShift::new(10);
    let k = fs.net(0.4).map_err(err)?;
    let ladder: Vec<usize> = (4..=10).collect();
    let report = entropy_estimate(&fs, "fullshift", Some(10), &k, &ladder, &[0.4], &SepOptions::default()).map_err(err)?;
    let rate = report.rate(0.4).ok_or("no rate")?;
    let ln2 = std::f64::consts::LN_2;
    if (rate - ln2).abs() > 0.05 * ln2 {
        return Err(format!("rate {rate} not within 5% of ln 2"));
    }
    // Brute-force certificate for every n <= 10: the forward n-blocks split
    // the net into 2^n classes of diameter <= eps under rho_n, so no
    // separated set is larger, and one point per class is separated.
    for n in 1..=10usize {
        let mut classes: HashMap<u64, Vec<usize>> = HashMap::new();
        for (i, x) in k.iter().enumerate() {
            let block = (0..n as i64).fold(0u64, |acc, j| acc | (x.coordinate(j) as u64) << j);
            classes.entry(block).or_default().push(i);
        }
        if classes.len() != 1 << n {
            return Err(format!("n = {n}: {} blocks", classes.len()));
        }
        for members in classes.values() {
            let a = &k[members[0]];
            if members.iter().any(|&b| rho_n(&fs, a, &k[b], n) > 0.4) {
                return Err(format!("n = {n}: a block is not eps-small"));
            }
        }
        let reps: Vec<usize> = classes.values().map(|m| m[0]).collect();
        for (i, &a) in reps.iter().enumerate() {
            if reps[i + 1..].iter().any(|&b| rho_n(&fs, &k[a], &k[b], n) <= 0.4) {
                return Err(format!("n = {n}: representatives not separated"));
            }
        }
        let r = sep_count(&fs, &k, n, 0.4, &SepOptions::default()).map_err(err)?;
        if r.count != 1 << n || !r.exact {
            return Err(format!("n = {n}: sep_count {} (exact {})", r.count, r.exact));
        }
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(60),
        format!("rate {rate:.6} vs ln 2 = {ln2:.6}; counts 2^n for n <= 10; {elapsed:.2?}"),
    )
}

fn odometer_entropy() -> Outcome {
    let odo = Odometer { depth: 10 };
    let k = odo.net(0.4).map_err(err)?;
    let ladder: Vec<usize> = (4..=10).collect();
    let report = entropy_estimate(&odo, "odometer", Some(10), &k, &ladder, &[0.4], &SepOptions::default()).map_err(err)?;
    let rate = report.rate(0.4).ok_or("no rate")?;
    let counts = report.counts(0.4);
    let constant = counts.windows(2).all(|w| w[0] == w[1]);
    check(rate < 0.01 && constant, format!("rate {rate}; counts {counts:?}"))
}

fn constant_embedding() -> Outcome {
    let o = SepOptions::default();
    let ns = 1..=8usize;
    let eps_ladder = [0.4, 0.2];
    let fs = FullShift::new(8);
    let k = fs.net(0.4).map_err(err)?;
    let dom: Arc<[_]> = strided_sample(&k, 16).into();
    let odo = Odometer { depth: 8 };
    let words = odo.net(0.1).map_err(err)?;
    let odom: Arc<[_]> = words.clone().into();
    let mut cases = 0;
    for n in ns {
        for &eps in &eps_ladder {
            let a = constant_embedding_check(&fs, &k, dom.clone(), n, eps, &o).map_err(err)?;
            let b = constant_embedding_check(&odo, &words, odom.clone(), n, eps, &o).map_err(err)?;
            for r in [&a, &b] {
                if !r.equal || r.point_count != r.constant_count {
                    return Err(format!("n = {n}, eps = {eps}: {} points vs {} constants", r.point_count, r.constant_count));
                }
            }
            cases += 2;
        }
    }
    Ok(format!("{cases} (system, n, eps) cases equal"))
}

fn permutation_family() -> Outcome {
    let fs = FullShift::new(10);
    let net = fs.net(0.4).map_err(err)?;
    let stage = Stage { k: 1, delta: 0.5, n: 12 };
    let fam = build_permutation_family(&fs, &net, stage, 0.4, &FamilyOptions::default(), &SepOptions::default())
        .map_err(err)?;
    if fam.q != 2 || fam.members.len() != 6 {
        return Err(format!("q = {}, {} maps", fam.q, fam.members.len()));
    }
    let env = Envelope(&fs);
    let mut min_rho = f64::INFINITY;
    for (i, a) in fam.members.iter().enumerate() {
        for b in &fam.members[i + 1..] {
            min_rho = min_rho.min(rho_n(&env, a, b, 12));
        }
    }
    if min_rho <= 0.4 {
        return Err(format!("members only {min_rho}-separated"));
    }
    let disp = fam.max_displacement(&fs);
    if disp > stage.delta {
        return Err(format!("displacement {disp} exceeds delta"));
    }
    let row = &envelope_entropy_lower_bound(&[(1, 12, 2)]).map_err(err)?[0];
    let expected_h = 6f64.ln() / 12.0;
    let bound = (12f64.ln() - 8f64.ln()) / 8.0;
    if (row.h - expected_h).abs() > 1e-15 || (row.analytic - bound).abs() > 1e-15 || row.h <= bound {
        return Err(format!("h = {}, bound = {}", row.h, row.analytic));
    }
    let table = envelope_entropy_lower_bound(&doubling_stages(4).map_err(err)?).map_err(err)?;
    let hs: Vec<f64> = table.iter().filter(|r| r.k >= 1).map(|r| r.h).collect();
    check(
        hs.windows(2).all(|w| w[0] < w[1]),
        format!("6 maps, min rho_12 {min_rho:.3}, displacement {disp}; h = {:.4} > {bound:.4}; h_1..h_4 {hs:.4?}", row.h),
    )
}

fn detectors() -> Outcome {
    let odo = Odometer { depth: 8 };
    let sample = strided_sample(&odo.net(0.1).map_err(err)?, 256);
    let v = equicontinuity_detector(&odo, &sample, &[0.6, 0.3, 0.2], 16).map_err(err)?;
    let Equicontinuity::EquicontinuousEvidence { ladder } = &v else {
        return Err(format!("odometer flagged: {v:?}"));
    };
    if !ladder.iter().all(|r| r.counts.windows(2).all(|w| w[0] == w[1])) {
        return Err("odometer name counts not stable".into());
    }
    let fs = FullShift::new(8);
    let v = equicontinuity_detector(&fs, &fs.net(0.4).map_err(err)?, &[0.75, 0.4, 0.2], 8).map_err(err)?;
    let Equicontinuity::NotEquicontinuous { witness: fw, .. } = v else {
        return Err("full shift not flagged".into());
    };
    let v = equicontinuity_detector(&PlusOne, &PlusOne.net(0.01).map_err(err)?, &[0.5, 0.25], 16).map_err(err)?;
    let Equicontinuity::NotEquicontinuous { witness: pw, .. } = v else {
        return Err("plus-one not flagged".into());
    };
    Ok(format!("odometer stable; full shift witness {:?}; plus-one witness {:?}", fw.rule, pw.rule))
}

fn sturmian_complexity() -> Outcome {
    let st = Sturmian {
        alpha: Rotation::golden(),
        half_width: 9,
        sample: 4096,
    };
    let part = st.partition(0.75).map_err(err)?;
    let mut cs = Vec::new();
    for n in 1..=8 {
        let c = complexity(&st, &part, &st.net(0.1).map_err(err)?, n).map_err(err)?;
        if c != n + 1 {
            return Err(format!("c({n}) = {c}"));
        }
        cs.push(c);
    }
    Ok(format!("c(1..8) = {cs:?}"))
}

fn flow_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let depth = rng.gen_range(1..=12);
        let base = CantorWord::new(depth, rng.gen_range(0..1u64 << depth)).map_err(err)?;
        let q = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| Rational64::new(rng.gen_range(lo..hi), rng.gen_range(1..64));
        let (s0, s, t) = (q(&mut rng, 0, 1), q(&mut rng, -400, 400), q(&mut rng, -400, 400));
        let s0 = s0 - s0.floor();
        let p = SolenoidPoint::new(base, s0).map_err(err)?;
        if suspension_flow(&suspension_flow(&p, s), t) != suspension_flow(&p, s + t) {
            return Err(format!("rational law fails at {p:?}, {s}, {t}"));
        }
        let pf = SolenoidPoint::new(base, rng.gen_range(0.0..1.0)).map_err(err)?;
        let (sf, tf) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let d = solenoid_distance(&suspension_flow(&suspension_flow(&pf, sf), tf), &suspension_flow(&pf, sf + tf))
            .map_err(err)?;
        worst = worst.max(d);
    }
    check(worst <= 1e-12, format!("rational exact on 1000 triples; float worst {worst:e}"))
}

fn slovak_structure() -> Outcome {
    let start = Instant::now();
    let m = SlovakModel::new(4, GOLDEN, 12, CoefficientScheme::default()).map_err(err)?;
    let tail = 2.0 * (-12f64).exp2() / 3.0;

    // (a)
    for w in &m.fibers {
        if w.length != m.scheme.a(-w.n) || w.top - w.bottom != w.length || (w.tail - tail).abs() > 1e-18 {
            return Err(format!("(a) fiber W_{} = [{}, {}]", w.n, w.bottom, w.top));
        }
    }
    // (b)
    for n in 0..=3i64 {
        let osc = m.oscillation(-(n as f64), 1e-6, 2000).map_err(err)?;
        if (osc - m.scheme.a(n)).abs() > 2.0 * tail {
            return Err(format!("(b) oscillation {osc} near T^-{n} x0"));
        }
    }
    // (c)
    let sample = m.sample_graph(1000, 11);
    let sol = m.solenoid();
    for z in &sample {
        let img = m.lifted_step(z).map_err(err)?;
        if img.x != sol.time_map(&z.x) {
            return Err(format!("(c) projection fails at {z}"));
        }
    }
    for n in -12..12 {
        let w = m.fiber(n).map_err(err)?;
        let img = m.lifted_step(&m.z_point(n).map_err(err)?).map_err(err)?;
        if img.x != sol.time_map(&w.point) {
            return Err(format!("(c) projection fails on W_{n}"));
        }
    }
    // (d)
    let mut z = m.z_point(0).map_err(err)?;
    let mut worst_trace = 0.0f64;
    for _ in 0..5 {
        let tr = m.successor(&z, 2.0).map_err(err)?;
        worst_trace = worst_trace.max(graph_distance(&tr.successor, &m.lifted_step(&z).map_err(err)?).map_err(err)?);
        z = tr.successor;
    }
    // (e)
    let rows = m.uc_modulus_check(&[0.5, 0.25], 20_000, 5).map_err(err)?;
    for r in &rows {
        if !r.pass || r.pairs == 0 {
            return Err(format!("(e) {r:?}"));
        }
    }
    // (f)
    let table = discreteness_table(&m, 5, &m.sample_graph(400, 13));
    let min_sep = table.iter().map(|r| r.bound).fold(f64::INFINITY, f64::min);
    if min_sep <= 0.0 {
        return Err("(f) two powers agree on the sample".into());
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(300),
        format!(
            "(a) 25 fibers (b) n <= 3 (c) {} points (d) trace gap {worst_trace:.1e} (e) worst image gap {:.1e} / {:.1e} over {} / {} pairs (f) min bound {min_sep:.3}; {elapsed:.2?}",
            sample.len(),
            rows[0].worst_forward.max(rows[0].worst_inverse),
            rows[1].worst_forward.max(rows[1].worst_inverse),
            rows[0].pairs,
            rows[1].pairs,
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 full-shift entropy", full_shift_entropy),
        ("2 odometer entropy zero", odometer_entropy),
        ("3 constant embedding", constant_embedding),
        ("4 permutation family", permutation_family),
        ("5 equicontinuity detector", detectors),
        ("6 sturmian complexity", sturmian_complexity),
        ("7 suspension flow law", flow_law),
        ("8 slovak model", slovak_structure),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("SKIP  9 excluded: not reproducible at finite scale");
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
