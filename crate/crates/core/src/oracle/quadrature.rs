//! Nested Gauss–Legendre quadrature in log space.
//!
//! Integrands are passed as their logarithm and every partial sum is kept as
//! a log-sum-exp, so integrals that grow like `e^{10⁴}` or decay like
//! `e^{-10⁴}` are represented without overflow. Along each axis the panels
//! are graded geometrically away from the maximizer of a concave "peak"
//! function, which is where a log-concave integrand concentrates its mass.

use std::sync::OnceLock;

/// Running `log Σ exp(vᵢ)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    pub(crate) fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub(crate) fn add(&mut self, v: f64) {
        if v == f64::NEG_INFINITY || v.is_nan() {
            return;
        }
        if v <= self.max {
            self.scaled += (v - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    pub(crate) fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    let mut s = LogSum::new();
    s.add(a);
    s.add(b);
    s.value()
}

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`.
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

pub(crate) fn rule(m: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (0..=MAX_NODES).map(|k| if k == 0 { (vec![], vec![]) } else { gauss_legendre(k) }).collect());
    &rules[m.clamp(1, MAX_NODES)]
}

const MAX_NODES: usize = 32;
const GOLDEN_STEPS: usize = 40;
/// Upper bound on integrand evaluations per box, shared across axes.
const BOX_BUDGET: f64 = 4.0 * 1024.0 * 1024.0;

/// Panel boundaries on `[a, b]`, geometrically graded away from `peak`.
pub(crate) fn graded_panels(a: f64, b: f64, peak: f64, finest: f64) -> Vec<f64> {
    let peak = peak.clamp(a, b);
    let mut left = vec![peak];
    let mut width = finest;
    let mut x = peak;
    while x > a {
        x = (x - width).max(a);
        left.push(x);
        width *= 2.0;
    }
    left.reverse();
    let mut width = finest;
    let mut x = peak;
    while x < b {
        x = (x + width).min(b);
        left.push(x);
        width *= 2.0;
    }
    left.dedup();
    left
}

/// Maximizer of a concave function on `[a, b]` by golden-section search.
fn argmax(a: f64, b: f64, f: &mut dyn FnMut(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_STEPS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for end in [a, b] {
        let v = f(end);
        if v > best.1 {
            best = (end, v);
        }
    }
    best
}

pub(crate) struct NestedQuadrature<'a> {
    /// Log of the integrand.
    pub log_integrand: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    /// Concave function whose maximizer locates the integrand's mass.
    pub peak: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    pub points_per_axis: usize,
    /// Width of the panels adjacent to the peak.
    pub finest_panel: f64,
}

impl NestedQuadrature<'_> {
    fn nodes_per_axis(&self, n: usize) -> usize {
        let cap = BOX_BUDGET.powf(1.0 / n as f64).floor() as usize;
        self.points_per_axis.min(cap).max(8)
    }

    /// `log ∫_box exp(log_integrand)`.
    pub fn log_integral(&self, bounds: &[(f64, f64)]) -> f64 {
        if bounds.iter().any(|(a, b)| a >= b) {
            return f64::NEG_INFINITY;
        }
        let per_axis = self.nodes_per_axis(bounds.len());
        let mut prefix = Vec::with_capacity(bounds.len());
        self.level(bounds, &mut prefix, per_axis)
    }

    /// `max` of the peak function over the coordinates after `prefix`.
    fn profile(&self, bounds: &[(f64, f64)], prefix: &mut Vec<f64>) -> f64 {
        let d = prefix.len();
        if d == bounds.len() {
            return (self.peak)(prefix);
        }
        let (a, b) = bounds[d];
        argmax(a, b, &mut |x| {
            prefix.push(x);
            let v = self.profile(bounds, prefix);
            prefix.pop();
            v
        })
        .1
    }

    fn level(&self, bounds: &[(f64, f64)], prefix: &mut Vec<f64>, per_axis: usize) -> f64 {
        let d = prefix.len();
        let (a, b) = bounds[d];
        let (peak, _) = argmax(a, b, &mut |x| {
            prefix.push(x);
            let v = self.profile(bounds, prefix);
            prefix.pop();
            v
        });
        let edges = graded_panels(a, b, peak, self.finest_panel.min((b - a) / 4.0));
        let panels = edges.len() - 1;
        let (nodes, weights) = rule(per_axis.div_ceil(panels).max(4));
        let mut sum = LogSum::new();
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (t, wt) in nodes.iter().zip(weights) {
                prefix.push(mid + half * t);
                let v = if d + 1 == bounds.len() {
                    (self.log_integrand)(prefix)
                } else {
                    self.level(bounds, prefix, per_axis)
                };
                prefix.pop();
                sum.add(v + (wt * half).ln());
            }
        }
        sum.value()
    }
}
