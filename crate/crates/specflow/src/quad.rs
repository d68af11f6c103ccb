//! Gauss–Legendre and adaptive Gauss–Kronrod (7/15) quadrature.

use num_complex::Complex64;

/// Nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Tensor Gauss–Legendre over the cells cut by the given breakpoints (sorted, spanning [0,1]),
/// each cell further split `sub` times per axis.
pub fn tensor_2d(f: &dyn Fn(f64, f64) -> f64, xb: &[f64], yb: &[f64], order: usize, sub: usize) -> f64 {
    let gl = gauss_legendre(order);
    let refine = |b: &[f64]| -> Vec<f64> {
        let mut out = Vec::new();
        for w in b.windows(2) {
            for s in 0..sub {
                out.push(w[0] + (w[1] - w[0]) * s as f64 / sub as f64);
            }
        }
        out.push(*b.last().unwrap());
        out
    };
    let xs = refine(xb);
    let ys = refine(yb);
    let mut total = crate::sum::Neumaier::default();
    for wx in xs.windows(2) {
        let (cx, hx) = (0.5 * (wx[0] + wx[1]), 0.5 * (wx[1] - wx[0]));
        for wy in ys.windows(2) {
            let (cy, hy) = (0.5 * (wy[0] + wy[1]), 0.5 * (wy[1] - wy[0]));
            for &(u, a) in &gl {
                for &(v, b) in &gl {
                    total.add(a * b * hx * hy * f(cx + hx * u, cy + hy * v));
                }
            }
        }
    }
    total.sum()
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive bisection until each panel's Kronrod–Gauss difference is below its share of `tol`.
pub fn adaptive_gk(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64, max_depth: u32) -> QuadResult {
    let mut stack = vec![(a, b, 0u32)];
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut evaluations = 0;
    let width = (b - a).abs().max(f64::MIN_POSITIVE);
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = gk15(f, lo, hi);
        evaluations += 15;
        let share = tol * (hi - lo) / width;
        if e <= share.max(1e-300) || depth >= max_depth {
            value += v;
            error += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    QuadResult { value, error, evaluations }
}

/// ∫_a^b e^{2πi(k x + c)} dx in closed form.
pub fn linear_phase(k: f64, c: f64, a: f64, b: f64) -> Complex64 {
    let tau = std::f64::consts::TAU;
    if (k * (b - a)).abs() < 1e-8 {
        // second-order Taylor keeps relative accuracy when the phase barely moves
        let mid = Complex64::from_polar(1.0, tau * (k * 0.5 * (a + b) + c));
        let w = b - a;
        let corr = 1.0 - (tau * k * w).powi(2) / 24.0;
        return mid * (w * corr);
    }
    let ea = Complex64::from_polar(1.0, tau * (k * a + c));
    let eb = Complex64::from_polar(1.0, tau * (k * b + c));
    (eb - ea) / Complex64::new(0.0, tau * k)
}
