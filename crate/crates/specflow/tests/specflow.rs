use proptest::prelude::*;
use specflow::circle::Circle;
use specflow::par::Exec;
use specflow::roof::*;
use specflow::rotations::RotationVector2;
use specflow::specflow::*;

fn setup() -> (RotationVector2, RoofFunction) {
    let rot = RotationVector2::golden_silver();
    let desc = RoofDescriptor {
        trig: vec![TrigTerm { kx: 1, ky: -1, cos: 0.2, sin: 0.1 }],
        ..RoofDescriptor::linear(1.0, 2f64.sqrt(), 1.0)
    };
    let f = RoofFunction::new(desc, &rot).unwrap();
    (rot, f)
}

fn valid(f: &RoofFunction, p: &FlowPoint) -> bool {
    p.s >= 0.0 && p.s < f.eval_c(p.x, p.y)
}

#[test]
fn zero_time_and_gluing() {
    let (rot, f) = setup();
    let p = FlowPoint::from_f64(&f, 0.6, 0.3, 0.0).unwrap();
    assert_eq!(flow(&f, &rot, &p, 0.0).unwrap().point, p);
    let q = flow(&f, &rot, &p, f.eval_c(p.x, p.y)).unwrap();
    assert_eq!((q.point.x, q.point.y), rot.step(p.x, p.y, 1));
    assert_eq!((q.point.s, q.n), (0.0, 1));
}

#[test]
fn landing_matches_direct_birkhoff_sum() {
    let (rot, f) = setup();
    let p = FlowPoint::from_f64(&f, 0.15, 0.85, 0.4).unwrap();
    for t in [3.7, 55.0, 480.5, -12.25, -300.0] {
        let st = flow(&f, &rot, &p, t).unwrap();
        let fn_ = f.birkhoff(&rot, p.x, p.y, st.n).unwrap();
        let fn1 = f.birkhoff(&rot, p.x, p.y, st.n + 1).unwrap();
        assert!(fn_.value <= p.s + t + fn_.rounding_bound && p.s + t < fn1.value + fn1.rounding_bound);
        assert!((st.point.s - (p.s + t - fn_.value)).abs() <= st.rounding_bound + fn_.rounding_bound);
        assert!(valid(&f, &st.point));
    }
}

#[test]
fn heights_outside_the_fibre_are_rejected() {
    let (_, f) = setup();
    assert!(FlowPoint::from_f64(&f, 0.2, 0.2, -0.1).is_err());
    assert!(FlowPoint::from_f64(&f, 0.2, 0.2, 100.0).is_err());
}

#[test]
fn constant_roof_accepts_everything() {
    let rot = RotationVector2::golden_silver();
    let f = RoofFunction::new(RoofDescriptor { c0: 2.0, ..Default::default() }, &rot).unwrap();
    let s = uniform_sample(&f, 500, 7, Exec::Sequential).unwrap();
    assert_eq!(s.acceptance_rate, 1.0);
    assert_eq!(s.attempts, 500);
}

#[test]
fn sampling_is_schedule_independent() {
    let (_, f) = setup();
    let a = uniform_sample(&f, 2000, 99, Exec::Sequential).unwrap();
    let b = uniform_sample(&f, 2000, 99, Exec::Parallel).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, uniform_sample(&f, 2000, 100, Exec::Sequential).unwrap());
}

#[test]
fn sample_statistics_match_quadrature() {
    let (_, f) = setup();
    let n = 40_000;
    let s = uniform_sample(&f, n, 2024, Exec::default()).unwrap();
    let int_f = f.integrate_with(&|_, _, v| v, 6, 4);
    let int_f2 = f.integrate_with(&|_, _, v| v * v / 2.0, 6, 4);
    let int_f3 = f.integrate_with(&|_, _, v| v * v * v / 3.0, 6, 4);
    let acc = int_f / f.sup_upper;
    assert!((s.acceptance_rate - acc).abs() < 4.0 * (acc * (1.0 - acc) / s.attempts as f64).sqrt());

    let mean = s.points.iter().map(|p| p.s).sum::<f64>() / n as f64;
    let want = int_f2 / int_f;
    let var = int_f3 / int_f - want * want;
    assert!((mean - want).abs() < 3.0 * (var / n as f64).sqrt(), "{mean} vs {want}");

    // χ² over a 4×4 grid of base cells, expected counts from ∫ over each cell.
    let k = 4usize;
    let mut counts = vec![0f64; k * k];
    for p in &s.points {
        let (i, j) = ((p.xf() * k as f64) as usize, (p.yf() * k as f64) as usize);
        counts[i * k + j] += 1.0;
    }
    let mut chi2 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let cell = |x: f64, y: f64, v: f64| {
                let inside = (x * k as f64) as usize == i && (y * k as f64) as usize == j;
                if inside { v } else { 0.0 }
            };
            let mass = f.integrate_with(&cell, 6, 16) / int_f;
            let e = mass * n as f64;
            chi2 += (counts[i * k + j] - e).powi(2) / e;
        }
    }
    // 15 degrees of freedom; 99.9% quantile ≈ 37.7.
    assert!(chi2 < 37.7, "chi2 = {chi2}");
}

#[test]
fn measure_preservation_on_a_box() {
    let (rot, f) = setup();
    let n = 20_000;
    let s = uniform_sample(&f, n, 31, Exec::default()).unwrap();
    let in_a = |p: &FlowPoint| p.xf() < 0.5 && p.yf() < 0.5 && p.s < 1.0;
    let before = s.points.iter().filter(|p| in_a(p)).count() as f64 / n as f64;
    for t in [1.0, 10.0, 100.0] {
        let moved = Exec::default().map_slice(&s.points, |p| flow(&f, &rot, p, t));
        let ok: Vec<FlowPoint> = moved.into_iter().filter_map(|m| m.ok()).map(|m| m.point).collect();
        assert!(ok.len() > n - 5);
        assert!(ok.iter().all(|p| valid(&f, p)));
        let after = ok.iter().filter(|p| in_a(p)).count() as f64 / ok.len() as f64;
        let se = (before * (1.0 - before) / n as f64).sqrt();
        assert!((after - before).abs() < 3.0 * se, "t = {t}: {before} vs {after}");
    }
}

#[test]
fn trajectory_rows() {
    let (rot, f) = setup();
    let p = FlowPoint::from_f64(&f, 0.25, 0.75, 0.5).unwrap();
    let rows = trajectory(&f, &rot, &p, &[0.0, 1.0, 5.0, 20.0]).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!((rows[0].x, rows[0].y, rows[0].s, rows[0].n), (p.xf(), p.yf(), 0.5, 0));
    assert!(rows.windows(2).all(|w| w[0].n <= w[1].n));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn group_law(x in 0.0f64..1.0, y in 0.0f64..1.0, h in 0.0f64..1.0, t1 in -100.0f64..100.0, t2 in -100.0f64..100.0) {
        let (rot, f) = setup();
        let p = FlowPoint::new(&f, Circle::from_f64(x), Circle::from_f64(y), h * f.inf_lower).unwrap();
        let (Ok(a), Ok(direct)) = (flow(&f, &rot, &p, t1), flow(&f, &rot, &p, t1 + t2)) else { return Ok(()) };
        let Ok(b) = flow(&f, &rot, &a.point, t2) else { return Ok(()) };
        prop_assert!(valid(&f, &a.point) && valid(&f, &b.point));
        prop_assert_eq!((b.point.x, b.point.y), (direct.point.x, direct.point.y));
        prop_assert_eq!(a.n + b.n, direct.n);
        let tol = a.rounding_bound + b.rounding_bound + direct.rounding_bound + 1e-12 * (t1.abs() + t2.abs());
        prop_assert!((b.point.s - direct.point.s).abs() <= tol);
    }

    #[test]
    fn metric_axioms(a in prop::array::uniform3(0.0f64..1.0), b in prop::array::uniform3(0.0f64..1.0), c in prop::array::uniform3(0.0f64..1.0)) {
        let (_, f) = setup();
        let pt = |v: [f64; 3]| FlowPoint::new(&f, Circle::from_f64(v[0]), Circle::from_f64(v[1]), v[2] * f.inf_lower).unwrap();
        let (p, q, r) = (pt(a), pt(b), pt(c));
        prop_assert_eq!(metric_df(&p, &p), 0.0);
        prop_assert_eq!(metric_df(&p, &q), metric_df(&q, &p));
        prop_assert!(metric_df(&p, &r) <= metric_df(&p, &q) + metric_df(&q, &r) + 1e-15);
        let lifted = FlowPoint { s: p.s + 0.125, ..p };
        prop_assert!((metric_df(&p, &lifted) - 0.125).abs() < 1e-15);
    }
}
