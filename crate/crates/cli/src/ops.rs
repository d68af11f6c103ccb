use crate::config::{CliError, ExperimentConfig};
use crate::params::*;
use num_bigint::BigUint;
use rand::Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use specflow::cfrac::{approx_quality, convergents, GammaSchedule, PartialQuotients};
use specflow::circle::Circle;
use specflow::diagnostics::*;
use specflow::par::Exec;
use specflow::ratner::*;
use specflow::rng::stream;
use specflow::roof::{Jump, RoofDescriptor, RoofFunction};
use specflow::rotations::*;
use specflow::specflow::{trajectory, FlowPoint};

type Res<T> = Result<T, CliError>;

pub const OPERATIONS: [&str; 16] = [
    "convergents",
    "palindromic-pair",
    "yoccoz",
    "ergodicity",
    "birkhoff",
    "flow",
    "exp-sum",
    "weak-mixing",
    "level-set",
    "correlate",
    "rigidity",
    "distribution",
    "fayad",
    "crossings",
    "identity",
    "ratner-witness",
];

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// 1-based (x column, y columns) for the optional plot script.
    pub plot: (usize, Vec<usize>),
}

pub struct Report {
    pub table: Table,
    pub rotation: Option<RotationDescriptor>,
    pub roof: Option<RoofDescriptor>,
    pub results: Value,
    pub pass: bool,
}

macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($v.to_string()),*] };
}

pub struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub exec: Exec,
}

impl Ctx<'_> {
    fn params<P: DeserializeOwned>(&self) -> Res<P> {
        serde_json::from_value(Value::Object(self.cfg.params.clone())).map_err(|e| CliError::Validation(format!("params: {e}")))
    }

    fn bits(&self) -> u32 {
        self.cfg.precision_bits.or(self.cfg.rotation.as_ref().map(|r| r.precision_bits)).unwrap_or(DEFAULT_BITS)
    }

    fn seed(&self) -> u64 {
        self.cfg.seed
    }

    /// The configured rotation, or (α, β) = ([0; 1, 1, …], [0; 2, 2, …]).
    fn rotation(&self) -> Res<RotationVector2> {
        let d = self.cfg.rotation.clone().unwrap_or(RotationDescriptor {
            alpha: PartialQuotients::constant(1),
            beta: PartialQuotients::constant(2),
            precision_bits: DEFAULT_BITS,
        });
        Ok(RotationVector2::new(d.alpha, d.beta, self.bits())?)
    }

    fn no_rotation(&self, op: &str) -> Res<()> {
        match self.cfg.rotation {
            Some(_) => Err(CliError::Validation(format!("{op} builds its own rotation; drop `rotation` from the config"))),
            None => Ok(()),
        }
    }

    fn roof(&self, default: RoofDescriptor, rot: &RotationVector2) -> Res<RoofFunction> {
        Ok(RoofFunction::new(self.cfg.roof.clone().unwrap_or(default), rot)?)
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn linear_sqrt2(c: f64) -> RoofDescriptor {
    RoofDescriptor::linear(1.0, 2f64.sqrt(), c)
}

fn gamma_schedule(spec: Option<&str>, scale: Option<u64>) -> Res<GammaSchedule> {
    let g = match spec.unwrap_or("linear") {
        "linear" | "n+1" => GammaSchedule::n_plus_one(),
        s => {
            let body = s.strip_prefix("affine:").ok_or_else(|| invalid(format!("unknown gamma `{s}`")))?;
            let v: Vec<u64> = body
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| invalid(format!("bad gamma coefficient `{t}`"))))
                .collect::<Res<_>>()?;
            match v[..] {
                [slope, intercept] => GammaSchedule { slope, intercept, den: 1 },
                [slope, intercept, den] => GammaSchedule { slope, intercept, den },
                _ => return Err(invalid("affine gamma takes 2 or 3 coefficients")),
            }
        }
    };
    let g = match scale {
        Some(0) => return Err(invalid("gamma_scale must be >= 1")),
        Some(k) => g.scaled(k),
        None => g,
    };
    g.validate()?;
    Ok(g)
}

fn with_bits(rot: &RotationVector2, bits: u32) -> Res<RotationVector2> {
    Ok(RotationVector2::new(rot.alpha.clone(), rot.beta.clone(), bits)?)
}

fn parse_big(s: &str) -> Res<BigUint> {
    s.trim().parse().map_err(|_| invalid(format!("`{s}` is not a positive integer")))
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable")
}

pub fn run(name: &str, ctx: &Ctx) -> Res<Report> {
    match name {
        "convergents" => convergents_op(ctx),
        "palindromic-pair" => palindromic_op(ctx),
        "yoccoz" => yoccoz_op(ctx),
        "ergodicity" => ergodicity_op(ctx),
        "birkhoff" => birkhoff_op(ctx),
        "flow" => flow_op(ctx),
        "exp-sum" => exp_sum_op(ctx),
        "weak-mixing" => weak_mixing_op(ctx),
        "level-set" => level_set_op(ctx),
        "correlate" => correlate_op(ctx),
        "rigidity" => rigidity_op(ctx),
        "distribution" => distribution_op(ctx),
        "fayad" => fayad_op(ctx),
        "crossings" => crossings_op(ctx),
        "identity" => identity_op(ctx),
        "ratner-witness" => witness_op(ctx),
        other => Err(invalid(format!("unknown operation `{other}`"))),
    }
}

fn convergents_op(ctx: &Ctx) -> Res<Report> {
    let p: ConvergentsParams = ctx.params()?;
    let rot = ctx.rotation()?;
    let which = p.coordinate.unwrap_or(Which::Alpha);
    let pq = match which {
        Which::Alpha => &rot.alpha,
        Which::Beta => &rot.beta,
    };
    let n = p.terms.unwrap_or(20);
    if n == 0 {
        return Err(invalid("terms must be >= 1"));
    }
    let c = convergents(pq, n)?;
    let a = pq.terms(n)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for k in 0..=n {
        let ak = if k == 0 { "0".to_string() } else { a[k - 1].to_string() };
        // The enclosure needs two further terms; finite expansions run out first.
        let checkable = k >= 1 && pq.len().map_or(true, |len| k + 2 <= len);
        let (lo, up) = if checkable {
            let q = approx_quality(pq, k)?;
            if !(q.lower_ok && q.upper_ok) {
                failures.push(k);
            }
            (q.lower_ok.to_string(), q.upper_ok.to_string())
        } else {
            (String::new(), String::new())
        };
        rows.push(row![k, ak, c[k].p, c[k].q, lo, up]);
    }
    Ok(Report {
        table: Table { header: vec!["n", "a_n", "p_n", "q_n", "lower_ok", "upper_ok"], rows, plot: (1, vec![4]) },
        rotation: Some(rot.descriptor()),
        roof: None,
        results: json!({ "coordinate": which, "terms": n, "failures": failures }),
        pass: failures.is_empty(),
    })
}

fn palindromic_op(ctx: &Ctx) -> Res<Report> {
    let p: PalindromicParams = ctx.params()?;
    ctx.no_rotation("palindromic-pair")?;
    let pal = palindromic_pair(p.terms.unwrap_or(64))?;
    let rot = with_bits(&pal.rotation, ctx.bits())?;
    let rows = pal.palindromic_prefix_lengths.iter().zip(&pal.common_denominators).map(|(l, q)| row![l, q]).collect();
    let dens: Vec<String> = pal.common_denominators.iter().map(|q| q.to_string()).collect();
    Ok(Report {
        table: Table { header: vec!["prefix_length", "common_denominator"], rows, plot: (1, vec![2]) },
        rotation: Some(rot.descriptor()),
        roof: None,
        results: json!({
            "prefix_lengths": pal.palindromic_prefix_lengths,
            "common_denominators": dens,
            "no_palindrome_warning": pal.no_palindrome_warning,
            "aperiodicity_assumed": pal.aperiodicity_assumed,
        }),
        pass: !pal.no_palindrome_warning,
    })
}

fn yoccoz_op(ctx: &Ctx) -> Res<Report> {
    let p: YoccozParams = ctx.params()?;
    ctx.no_rotation("yoccoz")?;
    let g = gamma_schedule(p.gamma.as_deref(), p.gamma_scale)?;
    let levels = p.levels.unwrap_or(4);
    if levels == 0 {
        return Err(invalid("levels must be >= 1"));
    }
    let pair = yoccoz_pair_with_seed(&g, levels, p.a1.unwrap_or(1))?;
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for n in 1..=levels {
        let (l, r) = pair.check_level(n);
        verdicts.push(json!({ "n": n, "left": l, "right": r }));
        rows.push(row![n, pair.gamma_at(n), pair.q[n], pair.r[n], l, r]);
    }
    let s = |v: &[BigUint]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    Ok(Report {
        table: Table { header: vec!["n", "gamma", "q_n", "r_n", "left_ok", "right_ok"], rows, plot: (1, vec![3, 4]) },
        rotation: Some(pair.rotation(ctx.bits())?.descriptor()),
        roof: None,
        results: json!({
            "gamma": g,
            "levels": levels,
            "q": s(&pair.q),
            "r": s(&pair.r),
            "a": s(&pair.a),
            "b": s(&pair.b),
            "verdicts": verdicts,
        }),
        pass: pair.all_levels_ok(),
    })
}

fn ergodicity_op(ctx: &Ctx) -> Res<Report> {
    let p: ErgodicityParams = ctx.params()?;
    let rot = ctx.rotation()?;
    let cert = ergodicity_check(&rot, p.k_max.unwrap_or(50), ctx.bits())?;
    let (verdict, k, l, m) = match cert.verdict {
        ErgodicityVerdict::NoRelationFound => ("no-relation-found", String::new(), String::new(), String::new()),
        ErgodicityVerdict::Relation { k, l, m } => ("relation", k.to_string(), l.to_string(), m.to_string()),
    };
    let rows = vec![row![cert.search_bound, cert.bits, verdict, k, l, m, cert.min_distance, cert.escalations]];
    Ok(Report {
        table: Table {
            header: vec!["search_bound", "bits", "verdict", "k", "l", "m", "min_distance", "escalations"],
            rows,
            plot: (1, vec![7]),
        },
        rotation: Some(rot.descriptor()),
        roof: None,
        pass: cert.verdict == ErgodicityVerdict::NoRelationFound,
        results: to_json(&cert),
    })
}

fn birkhoff_op(ctx: &Ctx) -> Res<Report> {
    let p: BirkhoffParams = ctx.params()?;
    let rot = ctx.rotation()?;
    let f = ctx.roof(linear_sqrt2(3.0), &rot)?;
    let (x, y) = (Circle::from_f64(p.x.unwrap_or(0.1)), Circle::from_f64(p.y.unwrap_or(0.2)));
    let (m_max, points) = (p.m_max.unwrap_or(1000), p.points.unwrap_or(20));
    if points == 0 {
        return Err(invalid("points must be >= 1"));
    }
    let integral = f.integral()?;
    let mut rows = Vec::new();
    for i in 1..=points {
        let m = (m_max as f64 * i as f64 / points as f64).round() as i64;
        let b = f.birkhoff(&rot, x, y, m)?;
        let mean = m as f64 * integral.value;
        rows.push(row![m, b.value, b.rounding_bound, mean, b.value - mean]);
    }
    Ok(Report {
        table: Table { header: vec!["m", "value", "rounding_bound", "m_integral", "deviation"], rows, plot: (1, vec![5]) },
        rotation: Some(rot.descriptor()),
        roof: Some(f.desc.clone()),
        results: json!({ "x": x.to_f64(), "y": y.to_f64(), "integral": integral, "von_neumann": f.von_neumann_integrals() }),
        pass: true,
    })
}

fn flow_op(ctx: &Ctx) -> Res<Report> {
    let p: FlowParams = ctx.params()?;
    let rot = ctx.rotation()?;
    let f = ctx.roof(linear_sqrt2(3.0), &rot)?;
    let start = FlowPoint::from_f64(&f, p.x.unwrap_or(0.1), p.y.unwrap_or(0.2), p.s.unwrap_or(0.0))?;
    let times = p.times.unwrap_or_else(|| vec![0.0, 1.0, 10.0, 100.0]);
    let rows = trajectory(&f, &rot, &start, &times)?.iter().map(|r| row![r.t, r.x, r.y, r.s, r.n]).collect();
    Ok(Report {
        table: Table { header: vec!["t", "x", "y", "s", "n"], rows, plot: (1, vec![4]) },
        rotation: Some(rot.descriptor()),
        roof: Some(f.desc.clone()),
        results: json!({ "start": { "x": start.xf(), "y": start.yf(), "s": start.s }, "inf_f": f.inf_lower, "sup_f": f.sup_upper }),
        pass: true,
    })
}

fn exp_sum_op(ctx: &Ctx) -> Res<Report> {
    let p: ExpSumParams = ctx.params()?;
    let mut h = p.slice.unwrap_or(PiecewiseSlice { slope: 12.5, jumps: vec![SliceJump { at: 0.3, size: 0.25 }], ..Default::default() });
    if let Some(s) = p.slope {
        h.slope = s;
    }
    let theta = match p.theta {
        Some(t) => t,
        None => h.certified_theta().ok_or_else(|| CliError::Certification("no certified lower bound for |h'|".into()))?,
    };
    let e = exp_sum(&h, theta, p.quad.unwrap_or(400))?;
    let rows = vec![row![e.value, e.quad_error, e.lemma_bound, e.discontinuities, e.theta, e.derivative_variation, e.pass]];
    Ok(Report {
        table: Table {
            header: vec!["value", "quad_error", "bound", "discontinuities", "theta", "derivative_variation", "pass"],
            rows,
            plot: (5, vec![1, 3]),
        },
        rotation: None,
        roof: None,
        pass: e.pass,
        results: json!({ "slice": h, "estimate": e }),
    })
}

fn weak_mixing_op(ctx: &Ctx) -> Res<Report> {
    let p: WeakMixingParams = ctx.params()?;
    let rot = ctx.rotation()?;
    let f = ctx.roof(linear_sqrt2(3.0), &rot)?;
    let b = f.derivative_bounds(&rot, p.m_probe.unwrap_or(10), p.grid.unwrap_or(8))?;
    let ns = p.n.unwrap_or_else(|| vec![50, 100, 200]);
    let ss = p.s.unwrap_or_else(|| vec![1.0, 2.0, 5.0, 10.0]);
    let quad = p.quad.unwrap_or(60);
    let mut rows = Vec::new();
    let mut pass = true;
    for (i, &n) in ns.iter().enumerate() {
        for (j, &s) in ss.iter().enumerate() {
            let w = weak_mixing_bound(&f, &rot, s, n, quad, &b)?;
            let (mc, mc_se) = match p.mc_samples {
                Some(k) => {
                    let seed = specflow::rng::derive(ctx.seed(), (i * ss.len() + j) as u64);
                    let (z, se) = weak_mixing_monte_carlo(&f, &rot, s, n, k, seed, ctx.exec)?;
                    (z.norm().to_string(), se.to_string())
                }
                None => (String::new(), String::new()),
            };
            pass &= w.pass;
            rows.push(row![n, s, w.numeric, w.quad_error, w.bound, w.pass, mc, mc_se]);
        }
    }
    Ok(Report {
        table: Table {
            header: vec!["n", "s", "numeric", "quad_error", "bound", "pass", "mc_abs", "mc_stderr"],
            rows,
            plot: (2, vec![3, 5]),
        },
        rotation: Some(rot.descriptor()),
        roof: Some(f.desc.clone()),
        results: json!({ "bounds": b, "quad": quad }),
        pass,
    })
}

fn level_set_op(ctx: &Ctx) -> Res<Report> {
    let p: LevelSetParams = ctx.params()?;
    let rot = ctx.rotation()?;
    // c₀ = 2 keeps the default level sets non-empty.
    let f = ctx.roof(linear_sqrt2(2.0), &rot)?;
    let b = f.derivative_bounds(&rot, p.m_probe.unwrap_or(10), p.grid.unwrap_or(8))?;
    let y = p.y.unwrap_or(0.3);
    let x_grid = p.x_grid.unwrap_or(2000);
    let mut rows = Vec::new();
    let mut pass = true;
    for &t in p.t.as_deref().unwrap_or(&[50.0, 100.0]) {
        for &eps in p.eps.as_deref().unwrap_or(&[0.01, 0.02]) {
            let e = level_set_measure(&f, &rot, y, t, eps, x_grid, &b, ctx.exec)?;
            let dense = p.dense.map(|n| level_set_dense(&f, &rot, y, t, eps, n, ctx.exec).to_string()).unwrap_or_default();
            pass &= e.pass;
            rows.push(row![
                t,
                eps,
                e.estimate,
                e.lemma_bound,
                e.j_lo,
                e.j_hi,
                e.refined_cells,
                e.unresolved_cells,
                e.resolution_error,
                dense,
                e.pass
            ]);
        }
    }
    Ok(Report {
        table: Table {
            header: vec![
                "t",
                "eps",
                "estimate",
                "lemma_bound",
                "j_lo",
                "j_hi",
                "refined_cells",
                "unresolved_cells",
                "resolution_error",
                "dense",
                "pass",
            ],
            rows,
            plot: (2, vec![3, 4]),
        },
        rotation: Some(rot.descriptor()),
        roof: Some(f.desc.clone()),
        results: json!({ "y": y, "x_grid": x_grid, "bounds": b }),
        pass,
    })
}

fn correlate_op(ctx: &Ctx) -> Res<Report> {
    let p: CorrelateParams = ctx.params()?;
    let rot = ctx.rotation()?;
    let f = ctx.roof(linear_sqrt2(3.0), &rot)?;
    let a = p.a.unwrap_or(BoxSet { x: (0.0, 1.0), y: (0.0, 1.0), s: (0.0, f.inf_lower.min(2.0)) });
    let b = p.b.unwrap_or(a);
    let times = p.times.unwrap_or_else(|| vec![1.0, 10.0, 100.0, 1000.0]);
    let c = correlation(&f, &rot, &a, &b, &times, p.samples.unwrap_or(4000), ctx.seed(), ctx.exec)?;
    let rows = (0..c.times.len())
        .map(|i| row![c.times[i], c.estimates[i], c.stderrs[i], c.product, c.estimates[i] - c.product])
        .collect();
    Ok(Report {
        table: Table { header: vec!["t", "estimate", "stderr", "product", "excess"], rows, plot: (1, vec![2, 4]) },
        rotation: Some(rot.descriptor()),
        roof: Some(f.desc.clone()),
        results: json!({ "a": a, "b": b, "series": c }),
        pass: true,
    })
}

/// Palindromic-pair rotation and its common denominators, unless the config brings its own.
fn rigidity_setup(ctx: &Ctx, terms: Option<usize>, explicit: Option<&[String]>) -> Res<(RotationVector2, Vec<BigUint>)> {
    let given = explicit.map(|v| v.iter().map(|s| parse_big(s)).collect::<Res<Vec<_>>>()).transpose()?;
    if ctx.cfg.rotation.is_some() {
        let dens = given.ok_or_else(|| invalid("a custom rotation needs explicit denominators"))?;
        return Ok((ctx.rotation()?, dens));
    }
    let pal = palindromic_pair(terms.unwrap_or(64))?;
    let rot = with_bits(&pal.rotation, ctx.bits())?;
    Ok((rot, given.unwrap_or(pal.common_denominators)))
}

fn rigidity_op(ctx: &Ctx) -> Res<Report> {
    let p: RigidityParams = ctx.params()?;
    let (rot, mut dens) = rigidity_setup(ctx, p.terms, p.denominators.as_deref())?;
    if let Some(k) = p.count {
        dens.truncate(k);
    }
    let f = ctx.roof(RoofDescriptor::linear(1.0, 2.0, 3.0), &rot)?;
    let t = rigidity_scan(&f, &rot, &dens, p.sample.unwrap_or(1000), ctx.seed(), ctx.exec)?;
    let rows = t
        .rows
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let method = if r.method == SumMethod::Direct { "direct" } else { "exact-floor-sum" };
            row![k, r.l, r.max_deviation, r.threshold, r.rounding_budget, r.common_denominator, method, r.pass]
        })
        .collect();
    Ok(Report {
        table: Table {
            header: vec!["k", "l", "max_deviation", "threshold", "rounding_budget", "common_denominator", "method", "pass"],
            rows,
            plot: (1, vec![3, 4]),
        },
        rotation: Some(rot.descriptor()),
        roof: Some(f.desc.clone()),
        pass: t.rows.iter().all(|r| r.pass),
        results: to_json(&t),
    })
}

fn distribution_op(ctx: &Ctx) -> Res<Report> {
    let p: DistributionParams = ctx.params()?;
    let (rot, dens) = rigidity_setup(ctx, p.terms, p.l.as_ref().map(std::slice::from_ref))?;
    let l = match p.l {
        Some(_) => dens[0].clone(),
        None => {
            let k = p.index.unwrap_or(2);
            dens.get(k).cloned().ok_or_else(|| invalid(format!("only {} common denominators; raise --terms", dens.len())))?
        }
    };
    let f = ctx.roof(RoofDescriptor::linear(1.0, 2.0, 3.0), &rot)?;
    let h = empirical_distribution(&f, &rot, &l, p.bins.unwrap_or(20), p.samples.unwrap_or(2000), ctx.seed(), ctx.exec)?;
    let rows = h.counts.iter().enumerate().map(|(i, c)| row![h.edges[i], h.edges[i + 1], c, h.masses[i]]).collect();
    Ok(Report {
        table: Table { header: vec!["bin_lo", "bin_hi", "count", "mass"], rows, plot: (1, vec![4]) },
        rotation: Some(rot.descriptor()),
        roof: Some(f.desc.clone()),
        // Denjoy–Koksma: along a common denominator every value lies in [−V, V].
        pass: h.outside_fraction == 0.0,
        results: to_json(&h),
    })
}

fn fayad_op(ctx: &Ctx) -> Res<Report> {
    let p: FayadParams = ctx.params()?;
    ctx.no_rotation("fayad")?;
    let g = gamma_schedule(p.gamma.as_deref(), p.gamma_scale)?;
    let n = p.n.unwrap_or(2);
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    let pair = yoccoz_pair(&g, n + 2)?;
    let rot = pair.rotation(ctx.bits())?;
    let f = ctx.roof(linear_sqrt2(3.0), &rot)?;
    let (even, odd) = fayad_partitions(&f, &rot, &pair, n)?;
    let b = f.derivative_bounds(&rot, p.m_probe.unwrap_or(10), p.grid.unwrap_or(8))?;
    let d = FayadOptions::default();
    let opts = FayadOptions {
        m_samples: p.m_samples.unwrap_or(d.m_samples),
        cell_samples: p.cell_samples.unwrap_or(d.cell_samples),
        transverse_samples: p.transverse_samples.unwrap_or(d.transverse_samples),
        seed: ctx.seed(),
        exhaustive: p.exhaustive.unwrap_or(false),
    };
    let rep = fayad_check(&f, &rot, &pair, n, &b, &opts, ctx.exec)?;
    let rows = rep
        .levels
        .iter()
        .map(|l| {
            row![
                l.level,
                to_json(&l.axis).as_str().unwrap_or(""),
                l.tau,
                l.eps,
                l.k,
                l.m_window.0,
                l.m_window.1,
                l.window_claim_ok,
                l.mass,
                l.max_length,
                l.cells,
                l.m_values,
                l.probes,
                l.passes,
                l.failures,
                l.worst_stretch_margin,
                l.worst_distortion_margin
            ]
        })
        .collect();
    let summary = |pp: &PartialPartition| {
        json!({
            "level": pp.level,
            "points": pp.points,
            "translates": pp.translates,
            "cells": pp.cells.len(),
            "mass": pp.mass,
            "mass_bound": pp.mass_bound,
            "mass_ok": pp.mass_ok,
            "max_length": pp.max_length,
            "diameter_bound": pp.diameter_bound,
            "diameter_ok": pp.diameter_ok,
            "threshold": pp.threshold,
        })
    };
    let partitions_ok = [&even, &odd].iter().all(|pp| pp.mass_ok && pp.diameter_ok);
    Ok(Report {
        table: Table {
            header: vec![
                "level",
                "axis",
                "tau",
                "eps",
                "k",
                "m_lo",
                "m_hi",
                "window_claim_ok",
                "mass",
                "max_length",
                "cells",
                "m_values",
                "probes",
                "passes",
                "failures",
                "worst_stretch_margin",
                "worst_distortion_margin",
            ],
            rows,
            plot: (1, vec![16, 17]),
        },
        rotation: Some(rot.descriptor()),
        roof: Some(f.desc.clone()),
        pass: rep.pass && partitions_ok,
        results: json!({
            "gamma": g,
            "bounds": b,
            "options": opts,
            "partitions": [summary(&even), summary(&odd)],
            "report": rep,
        }),
    })
}

fn crossings_op(ctx: &Ctx) -> Res<Report> {
    let p: CrossingsParams = ctx.params()?;
    let rot = ctx.rotation()?;
    let x = p.x.unwrap_or(0.3);
    let d = p.d.unwrap_or(1e-3);
    if d == 0.0 || !d.is_finite() {
        return Err(invalid("d must be a nonzero real"));
    }
    let (a, b, model) = match (p.a, p.b) {
        (Some(a), Some(b)) => (a, b, None),
        (a, b) => {
            let f = ctx.roof(linear_sqrt2(3.0), &rot)?;
            let m = build_cocycle_model(&f, &rot, &ModelOptions::default())?;
            (a.unwrap_or(m.c1 / d.abs()), b.unwrap_or(m.c2 / d.abs()), Some(json!({ "c1": m.c1, "c2": m.c2, "sweep": m.sweep })))
        }
    };
    let n_max = p.n_max.unwrap_or((40.0 / d.abs()) as u64);
    let seq = crossing_sequence(&rot.alpha_real, x, x + d, n_max)?;
    let k = seq.crossings();
    let v = sparseness_check(&seq, a, b);
    let rows = k.iter().enumerate().map(|(m, km)| {
        let gap = if m == 0 { String::new() } else { (km - k[m - 1]).to_string() };
        row![m, km, gap]
    });
    Ok(Report {
        table: Table { header: vec!["m", "k_m", "gap"], rows: rows.collect(), plot: (1, vec![3]) },
        rotation: Some(rot.descriptor()),
        roof: None,
        pass: v.ab_sparse,
        results: json!({ "x": x, "x_prime": x + d, "n_max": n_max, "a": a, "b": b, "verdict": v, "model": model }),
    })
}

fn heisenberg_default() -> RoofDescriptor {
    RoofDescriptor {
        c0: 6.0,
        x_jumps: vec![Jump { d: 1.0, at: 0.3 }, Jump { d: 0.5 * 3f64.sqrt(), at: 0.7 }],
        y_jumps: vec![Jump { d: 2f64.sqrt(), at: 0.1 }],
        gamma: 0.37,
        trig: vec![],
    }
}

fn identity_op(ctx: &Ctx) -> Res<Report> {
    let p: IdentityParams = ctx.params()?;
    let rot = ctx.rotation()?;
    let f = ctx.roof(heisenberg_default(), &rot)?;
    let model = build_cocycle_model(&f, &rot, &ModelOptions::default())?;
    let kinds: &[IdentityKind] = match p.kind.unwrap_or(KindArg::All) {
        KindArg::All => &[IdentityKind::Sawtooth, IdentityKind::Heisenberg, IdentityKind::Master],
        KindArg::Sawtooth => &[IdentityKind::Sawtooth],
        KindArg::Heisenberg => &[IdentityKind::Heisenberg],
        KindArg::Master => &[IdentityKind::Master],
    };
    let n_max = p.n_max.unwrap_or(10_000);
    let per_input = ctx.exec.map(p.inputs.unwrap_or(1000), |i| {
        let mut r = stream(ctx.seed(), i as u64);
        let pt = LiftedPoint::from_f64(r.gen(), r.gen());
        let q = LiftedPoint::from_f64(pt.x.to_f64() + r.gen_range(-0.45..0.45), pt.y.to_f64() + r.gen_range(-0.45..0.45));
        let n = r.gen_range(0..=n_max);
        kinds.iter().map(|&k| cocycle_identity_residual(&model, &f, &rot, pt, q, n, k)).collect::<Vec<_>>()
    });
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, res) in per_input.into_iter().enumerate() {
        for r in res {
            let r = r?;
            let tol = 1e-9 * (1.0 + r.n as f64);
            worst = worst.max(r.residual / tol);
            rows.push(row![i, to_json(&r.kind).as_str().unwrap_or(""), r.n, r.lhs, r.rhs, r.residual, r.budget, tol, r.residual <= tol]);
        }
    }
    Ok(Report {
        table: Table {
            header: vec!["input", "kind", "n", "lhs", "rhs", "residual", "budget", "tolerance", "pass"],
            rows,
            plot: (3, vec![6]),
        },
        rotation: Some(rot.descriptor()),
        roof: Some(f.desc.clone()),
        results: json!({ "n_max": n_max, "worst_residual_over_tolerance": worst, "s": model.s, "h": model.h, "c0": model.c0 }),
        pass: worst <= 1.0,
    })
}

fn witness_op(ctx: &Ctx) -> Res<Report> {
    let p: WitnessParams = ctx.params()?;
    let rot = ctx.rotation()?;
    let f = ctx.roof(linear_sqrt2(3.0), &rot)?;
    let model = build_cocycle_model(&f, &rot, &ModelOptions::default())?;
    let eps = p.eps.unwrap_or(0.1);
    let (d_min, d_max) = (p.d_min.unwrap_or(1e-5), p.d_max.unwrap_or(1e-3));
    if !(0.0 < d_min && d_min <= d_max && d_max < 0.5) {
        return Err(invalid("need 0 < d_min <= d_max < 1/2"));
    }
    let n = p.n.unwrap_or(2);
    let out = ctx.exec.map(p.pairs.unwrap_or(100), |i| {
        let mut r = stream(ctx.seed(), i as u64);
        let d = (r.gen_range(d_min.ln()..=d_max.ln())).exp();
        let (x, y) = (r.gen::<f64>(), r.gen::<f64>());
        let phi = r.gen::<f64>() * std::f64::consts::TAU;
        let pp = (Circle::from_f64(x), Circle::from_f64(y));
        let qq = (Circle::from_f64(x + d * phi.cos()), Circle::from_f64(y + d * phi.sin()));
        witness_constructive(&model, &f, &rot, pp, qq, eps, n).map(|w| (x, y, w))
    });
    let mut rows = Vec::new();
    let mut pass = true;
    let mut clamped_to = eps;
    for (i, w) in out.into_iter().enumerate() {
        let (x, y, cw) = w?;
        let w = cw.witness;
        pass &= cw.valid;
        clamped_to = w.eps;
        rows.push(row![i, x, y, w.d, w.m, w.l, w.p, w.good_fraction, w.eps, w.ratio, cw.clamped, cw.valid]);
    }
    Ok(Report {
        table: Table {
            header: vec!["pair", "x", "y", "d", "m", "l", "p", "good_fraction", "eps", "ratio", "clamped", "valid"],
            rows,
            plot: (4, vec![5]),
        },
        rotation: Some(rot.descriptor()),
        roof: Some(f.desc.clone()),
        results: json!({
            "eps_requested": eps,
            "eps_used": clamped_to,
            "eps_cap": model.eps_cap(),
            "kappa": model.kappa(clamped_to),
            "c0": model.c0,
            "c1": model.c1,
            "c2": model.c2,
            "s": model.s,
            "h": model.h,
            "h_min": model.h_min,
            "p0": model.p0,
            "p1": model.p1,
            "sweep": model.sweep,
            "pq_alpha": model.pq_alpha,
            "pq_beta": model.pq_beta,
            "warnings": model.warnings,
        }),
        pass,
    })
}
