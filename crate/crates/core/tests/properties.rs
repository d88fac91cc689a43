use num_rational::Rational64;
use proptest::prelude::*;

use dynlab::space::{
    cantor_distance, compactified_distance, graph_distance, solenoid_distance, CantorWord, CompactifiedInteger,
    GraphPoint, SolenoidPoint,
};
use dynlab::systems::{
    odometer_step, plus_one_step, shift_step, suspension_flow, window_distance, FillRule, ShiftWindow,
};

fn assert_metric<P>(points: &[P], d: impl Fn(&P, &P) -> f64) {
    for x in points {
        assert_eq!(d(x, x), 0.0);
        for y in points {
            let dxy = d(x, y);
            assert!(dxy >= 0.0);
            assert_eq!(dxy, d(y, x));
            for z in points {
                assert!(d(x, z) <= dxy + d(y, z) + 1e-12);
            }
        }
    }
}

#[test]
fn cantor_metric_axioms_exhaustive() {
    let words = CantorWord::all(5).unwrap();
    assert_metric(&words, |a, b| cantor_distance(a, b).unwrap());
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            assert!(cantor_distance(a, b).unwrap() > 0.0);
        }
    }
}

#[test]
fn window_metric_axioms_exhaustive() {
    let wins: Vec<ShiftWindow> = (0..1u64 << 7)
        .map(|j| ShiftWindow::from_fn(3, FillRule::Zero, |i| ((j >> (i + 3)) & 1) as u8).unwrap())
        .collect();
    assert_metric(&wins, window_distance);
}

#[test]
fn compactified_metric_axioms_exhaustive() {
    let mut pts: Vec<CompactifiedInteger> = (-20..=20).map(CompactifiedInteger::Finite).collect();
    pts.push(CompactifiedInteger::Infinity);
    assert_metric(&pts, compactified_distance);
}

#[test]
fn solenoid_metric_axioms_on_a_grid() {
    let mut pts = Vec::new();
    for w in CantorWord::all(3).unwrap() {
        for k in 0..8 {
            pts.push(SolenoidPoint::new(w, k as f64 / 8.0).unwrap());
        }
    }
    assert_metric(&pts, |a, b| solenoid_distance(a, b).unwrap());
}

fn solenoid_point(depth: u32) -> impl Strategy<Value = SolenoidPoint> {
    (0..1u64 << depth, 0.0f64..1.0).prop_map(move |(b, s)| SolenoidPoint::new(CantorWord::new(depth, b).unwrap(), s).unwrap())
}

proptest! {
    #[test]
    fn solenoid_triangle(p in solenoid_point(6), q in solenoid_point(6), r in solenoid_point(6)) {
        let d = |a: &SolenoidPoint, b: &SolenoidPoint| solenoid_distance(a, b).unwrap();
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
        prop_assert_eq!(d(&p, &q), d(&q, &p));
    }

    #[test]
    fn graph_triangle(p in solenoid_point(5), q in solenoid_point(5), r in solenoid_point(5), v in proptest::array::uniform3(0.0f64..=1.0)) {
        let g = |x: SolenoidPoint, v: f64| GraphPoint::new(x, v).unwrap();
        let (a, b, c) = (g(p, v[0]), g(q, v[1]), g(r, v[2]));
        let d = |x: &GraphPoint, y: &GraphPoint| graph_distance(x, y).unwrap();
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
    }

    #[test]
    fn flow_law_rational(bits in 0u64..1 << 8, s0 in 0i64..60, s in -500i64..500, t in -500i64..500, den in 1i64..60) {
        let p = SolenoidPoint::new(CantorWord::new(8, bits).unwrap(), Rational64::new(s0, 60)).unwrap();
        let (s, t) = (Rational64::new(s, den), Rational64::new(t, den + 1));
        prop_assert_eq!(suspension_flow(&suspension_flow(&p, s), t), suspension_flow(&p, s + t));
    }

    #[test]
    fn flow_law_float(p in solenoid_point(10), s in -50.0f64..50.0, t in -50.0f64..50.0) {
        let a = suspension_flow(&suspension_flow(&p, s), t);
        let b = suspension_flow(&p, s + t);
        prop_assert!(solenoid_distance(&a, &b).unwrap() <= 1e-12);
    }

    #[test]
    fn flow_is_invertible(p in solenoid_point(10), t in -50.0f64..50.0) {
        let back = suspension_flow(&suspension_flow(&p, t), -t);
        prop_assert!(solenoid_distance(&back, &p).unwrap() <= 1e-12);
    }

    #[test]
    fn odometer_has_full_period(depth in 1u32..12, bits in 0u64..1 << 11) {
        let w = CantorWord::new(depth, bits & ((1 << depth) - 1)).unwrap();
        let mut x = w;
        for _ in 0..1u64 << depth {
            x = odometer_step(&x);
        }
        prop_assert_eq!(x, w);
        prop_assert_eq!(w.offset(1).offset(-1), w);
    }

    #[test]
    fn plus_one_inverts(k in -1000i64..1000) {
        let x = CompactifiedInteger::Finite(k);
        prop_assert_eq!(plus_one_step(&x), CompactifiedInteger::Finite(k + 1));
        prop_assert_eq!(plus_one_step(&CompactifiedInteger::Infinity), CompactifiedInteger::Infinity);
    }

    #[test]
    fn shift_moves_coordinates(bits in 0u64..1 << 13, p in 1u32..6) {
        let x = ShiftWindow::from_fn(6, FillRule::Periodic(p), |i| ((bits >> (i + 6)) & 1) as u8).unwrap();
        let y = shift_step(&x);
        for i in -6..6 {
            prop_assert_eq!(y.coordinate(i), x.coordinate(i + 1));
        }
    }

    #[test]
    fn text_round_trips(bits in 0u64..1 << 9, s in 0.0f64..1.0, v in 0.0f64..=1.0, k in -10_000i64..10_000) {
        let w = CantorWord::new(9, bits).unwrap();
        prop_assert_eq!(w.to_string().parse::<CantorWord>().unwrap(), w);
        let p = SolenoidPoint::new(w, s).unwrap();
        prop_assert_eq!(p.to_string().parse::<SolenoidPoint>().unwrap(), p);
        let g = GraphPoint::new(p, v).unwrap();
        prop_assert_eq!(g.to_string().parse::<GraphPoint>().unwrap(), g);
        for c in [CompactifiedInteger::Finite(k), CompactifiedInteger::Infinity] {
            prop_assert_eq!(c.to_string().parse::<CompactifiedInteger>().unwrap(), c);
        }
        for fill in [FillRule::Zero, FillRule::Periodic(3)] {
            let x = ShiftWindow::from_fn(4, fill, |i| ((bits >> (i + 4)) & 1) as u8).unwrap();
            prop_assert_eq!(x.to_string().parse::<ShiftWindow>().unwrap(), x);
        }
    }
}
