//! Numerical cross-checks of the exact integrability verdicts.
//!
//! Each operation estimates an integral over a growing family of truncation
//! boxes and classifies the sequence of shell increments:
//!
//! * every ratio `d_{k+1}/d_k` below `convergence_ratio_threshold` is
//!   `Converges`,
//! * every ratio at least `divergence_growth_threshold` is `Diverges`,
//! * anything else is `Inconclusive`.
//!
//! Shells are integrated directly (the region between two boxes is split
//! into disjoint sub-boxes) so increments never suffer cancellation, and all
//! values are carried as logarithms. Nothing here feeds back into the exact
//! modules.

mod quadrature;

use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::lp::Rational;
use crate::newton::ExponentVector;
use crate::toric::ConcaveToricFunction;
use quadrature::{log_add, LogSum, NestedQuadrature};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    /// Strictly increasing box sizes `T`.
    pub truncation_schedule: Vec<f64>,
    pub quadrature_points_per_axis: usize,
    pub mc_samples: u64,
    pub seed: u64,
    pub convergence_ratio_threshold: f64,
    pub divergence_growth_threshold: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            truncation_schedule: vec![10.0, 20.0, 40.0, 80.0],
            quadrature_points_per_axis: 512,
            mc_samples: 1_000_000,
            seed: 0,
            convergence_ratio_threshold: 0.25,
            divergence_growth_threshold: 0.9,
        }
    }
}

impl OracleConfig {
    /// Defaults with a decade schedule `10, 10², 10³, 10⁴`.
    ///
    /// Integrals weighted by `1/t²` have tails of order `1/T`, whose
    /// increments only halve over a doubling schedule.
    pub fn poincare() -> Self {
        Self {
            truncation_schedule: vec![10.0, 100.0, 1000.0, 10000.0],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.truncation_schedule;
        if s.len() < 3 {
            return Err(Error::Config(format!(
                "truncation schedule needs at least 3 boxes, got {}",
                s.len()
            )));
        }
        if !s[0].is_finite() || s[0] <= 0.0 || s.windows(2).any(|w| w[1] <= w[0] || !w[1].is_finite()) {
            return Err(Error::Config("truncation schedule must be positive, finite and strictly increasing".into()));
        }
        for (name, t) in [
            ("convergence_ratio_threshold", self.convergence_ratio_threshold),
            ("divergence_growth_threshold", self.divergence_growth_threshold),
        ] {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {t}")));
            }
        }
        if self.convergence_ratio_threshold >= self.divergence_growth_threshold {
            return Err(Error::Config(
                "convergence_ratio_threshold must be below divergence_growth_threshold".into(),
            ));
        }
        if self.quadrature_points_per_axis < 8 {
            return Err(Error::Config("quadrature_points_per_axis must be at least 8".into()));
        }
        Ok(())
    }

    fn validate_mc(&self) -> Result<()> {
        self.validate()?;
        if self.mc_samples == 0 {
            return Err(Error::Config("mc_samples must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Converges => "Converges",
            Verdict::Diverges => "Diverges",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Increment statistics behind a verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Evidence {
    /// `log d_k` for each shell between consecutive boxes.
    pub log_increments: Vec<f64>,
    /// `d_{k+1}/d_k`; `inf` when a zero increment is followed by a positive one.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub min_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceVerdict {
    pub verdict: Verdict,
    /// `(T, estimate)`; estimates above `f64::MAX` are reported as `inf`.
    pub partial_values: Vec<(f64, f64)>,
    /// `(T, log estimate)`, always finite unless the integral is zero.
    pub log_partial_values: Vec<(f64, f64)>,
    pub evidence: Evidence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    Plain,
    /// `1/(|z_p|² log²|z_p|)` on the given 0-based axis.
    Poincare(usize),
}

/// `g` compiled to floating point.
enum FastToric {
    Min(Vec<(Vec<f64>, f64)>),
    Power { log_k: f64, alpha: Vec<f64> },
}

impl FastToric {
    fn new(g: &ConcaveToricFunction) -> Self {
        let f = |r: &Rational| r.to_f64().unwrap();
        match g {
            ConcaveToricFunction::PiecewiseLinearMin(pieces) => Self::Min(
                pieces
                    .iter()
                    .map(|p| (p.slope.coords().iter().map(f).collect(), f(&p.offset)))
                    .collect(),
            ),
            ConcaveToricFunction::PowerProduct(p) => Self::Power {
                log_k: f(p.k()).ln(),
                alpha: p.exponents().coords().iter().map(f).collect(),
            },
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Min(pieces) => pieces
                .iter()
                .map(|(s, b)| b + s.iter().zip(x).map(|(s, v)| s * v).sum::<f64>())
                .fold(f64::INFINITY, f64::min),
            Self::Power { log_k, alpha } => {
                let mut log = *log_k;
                for (a, v) in alpha.iter().zip(x) {
                    if *a > 0.0 {
                        if *v <= 0.0 {
                            return 0.0;
                        }
                        log += a * v.ln();
                    }
                }
                log.exp()
            }
        }
    }
}

fn to_f64s(v: &ExponentVector) -> Vec<f64> {
    v.coords().iter().map(|r| r.to_f64().unwrap()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

/// Disjoint boxes covering `Π[lo_i, T_k] \ Π[lo_i, T_{k-1}]`.
fn shell_boxes(lower: &[f64], inner: Option<f64>, outer: f64) -> Vec<Vec<(f64, f64)>> {
    let n = lower.len();
    match inner {
        None => vec![lower.iter().map(|&lo| (lo, outer)).collect()],
        Some(inner) => (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| match i.cmp(&j) {
                        std::cmp::Ordering::Less => (lower[i], inner),
                        std::cmp::Ordering::Equal => (inner, outer),
                        std::cmp::Ordering::Greater => (lower[i], outer),
                    })
                    .collect()
            })
            .collect(),
    }
}

/// Applies the decay/growth rule to per-region log masses (core box first).
fn decide(schedule: &[f64], log_regions: &[f64], cfg: &OracleConfig) -> ConvergenceVerdict {
    let mut log_partial_values = Vec::with_capacity(schedule.len());
    let mut acc = f64::NEG_INFINITY;
    for (t, r) in schedule.iter().zip(log_regions) {
        acc = log_add(acc, *r);
        log_partial_values.push((*t, acc));
    }
    let partial_values = log_partial_values.iter().map(|(t, l)| (*t, l.exp())).collect();
    let log_increments = log_regions[1..].to_vec();
    let ratios: Vec<f64> = log_increments
        .windows(2)
        .map(|w| match (w[0] == f64::NEG_INFINITY, w[1] == f64::NEG_INFINITY) {
            (_, true) => 0.0,
            (true, false) => f64::INFINITY,
            _ => (w[1] - w[0]).exp(),
        })
        .collect();
    let verdict = if ratios.iter().all(|r| *r < cfg.convergence_ratio_threshold) {
        Verdict::Converges
    } else if ratios.iter().all(|r| *r >= cfg.divergence_growth_threshold) {
        Verdict::Diverges
    } else {
        Verdict::Inconclusive
    };
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    ConvergenceVerdict {
        verdict,
        partial_values,
        log_partial_values,
        evidence: Evidence {
            log_increments,
            ratios,
            max_ratio,
            min_ratio,
        },
    }
}

/// Quadrature over the region family `Π[lower_i, T]`.
fn quadrature_verdict(
    lower: &[f64],
    log_integrand: &(dyn Fn(&[f64]) -> f64 + Sync),
    peak: &(dyn Fn(&[f64]) -> f64 + Sync),
    cfg: &OracleConfig,
) -> ConvergenceVerdict {
    let schedule = &cfg.truncation_schedule;
    let jobs: Vec<Vec<(f64, f64)>> = (0..schedule.len())
        .flat_map(|k| shell_boxes(lower, (k > 0).then(|| schedule[k - 1]), schedule[k]))
        .collect();
    let q = NestedQuadrature {
        log_integrand,
        peak,
        points_per_axis: cfg.quadrature_points_per_axis,
        finest_panel: 1.0 / 64.0,
    };
    let values: Vec<f64> = jobs.par_iter().map(|b| q.log_integral(b)).collect();
    let per_region = if lower.len() == 1 { 1 } else { lower.len() };
    let mut regions = Vec::with_capacity(schedule.len());
    let mut it = values.into_iter();
    regions.push(it.next().unwrap());
    for _ in 1..schedule.len() {
        let mut s = LogSum::new();
        for v in it.by_ref().take(per_region) {
            s.add(v);
        }
        regions.push(s.value());
    }
    decide(schedule, &regions, cfg)
}

/// `∫_{[0,T]ⁿ} e^{2(g(x) − ⟨A,x⟩)} dx` over the truncation schedule.
pub fn orthant_exp_integral(g: &ConcaveToricFunction, a: &ExponentVector, cfg: &OracleConfig) -> Result<ConvergenceVerdict> {
    cfg.validate()?;
    check_dim(g.dim(), a.dim())?;
    let fast = FastToric::new(g);
    let a = to_f64s(a);
    let f = move |x: &[f64]| 2.0 * (fast.eval(x) - dot(&a, x));
    Ok(quadrature_verdict(&vec![0.0; g.dim()], &f, &f, cfg))
}

/// `∫ e^{2((1+ε)g(t) − ⟨A,t⟩)} / t_p² dt` over `t_p ∈ [1,T]`, other `t_i ∈ [0,T]`.
pub fn adjoint_weighted_integral(
    g: &ConcaveToricFunction,
    a: &ExponentVector,
    epsilon: &Rational,
    axis: usize,
    cfg: &OracleConfig,
) -> Result<ConvergenceVerdict> {
    cfg.validate()?;
    check_dim(g.dim(), a.dim())?;
    if axis >= g.dim() {
        return Err(Error::InvalidInput(format!("axis {axis} out of range for dimension {}", g.dim())));
    }
    if epsilon.is_negative() {
        return Err(Error::InvalidInput("epsilon must be non-negative".into()));
    }
    let fast = FastToric::new(g);
    let a = to_f64s(a);
    let scale = 1.0 + epsilon.to_f64().unwrap();
    let peak = move |x: &[f64]| 2.0 * (scale * fast.eval(x) - dot(&a, x));
    let f = |x: &[f64]| peak(x) - 2.0 * x[axis].ln();
    let mut lower = vec![0.0; g.dim()];
    lower[axis] = 1.0;
    Ok(quadrature_verdict(&lower, &f, &peak, cfg))
}

const CHUNK: u64 = 1 << 14;

/// Monte Carlo estimate of `∫_{Δ*} |z^β|² e^{−2φ(z)} w(z) dV` over the
/// punctured polydisk of radius 1/2, where `φ(z) = −g(−log|z₁|, …)`.
///
/// Radii are sampled log-uniformly: `|z_i| = e^{−u_i}/2` with `u_i` uniform on
/// a shell of `[0, T]ⁿ`, and the angular integral contributes `2π` per axis.
pub fn polydisk_mc(g: &ConcaveToricFunction, beta: &[u32], weight: Weight, cfg: &OracleConfig) -> Result<ConvergenceVerdict> {
    cfg.validate_mc()?;
    let n = g.dim();
    check_dim(n, beta.len())?;
    if let Weight::Poincare(p) = weight {
        if p >= n {
            return Err(Error::InvalidInput(format!("axis {p} out of range for dimension {n}")));
        }
    }
    let fast = FastToric::new(g);
    let beta: Vec<f64> = beta.iter().map(|&b| b as f64).collect();
    // log of integrand · Jacobian at radii r = e^{-u}/2.
    let log_density = |u: &[f64]| {
        let mut log_r = Vec::with_capacity(n);
        for ui in u {
            log_r.push(-ui - std::f64::consts::LN_2);
        }
        let neg_log_r: Vec<f64> = log_r.iter().map(|l| -l).collect();
        let mut v = 2.0 * dot(&beta, &log_r) + 2.0 * fast.eval(&neg_log_r);
        // dV = Π 2π r dr and dr = r du.
        v += n as f64 * (2.0 * std::f64::consts::PI).ln() + 2.0 * log_r.iter().sum::<f64>();
        if let Weight::Poincare(p) = weight {
            v += -2.0 * log_r[p] - 2.0 * neg_log_r[p].ln();
        }
        v
    };

    let schedule = &cfg.truncation_schedule;
    let lower = vec![0.0; n];
    let per_box = (cfg.mc_samples / (schedule.len() * n) as u64).max(1);
    let mut jobs = Vec::new();
    for k in 0..schedule.len() {
        let boxes = shell_boxes(&lower, (k > 0).then(|| schedule[k - 1]), schedule[k]);
        let count = if k == 0 { per_box * n as u64 } else { per_box };
        for b in boxes {
            jobs.push((k, b, count));
        }
    }
    let mut stream = 0u64;
    let mut chunks = Vec::new();
    for (job, (_, _, count)) in jobs.iter().enumerate() {
        let mut start = 0;
        while start < *count {
            let len = CHUNK.min(count - start);
            chunks.push((job, stream, len));
            stream += 1;
            start += len;
        }
    }
    let sums: Vec<(usize, f64)> = chunks
        .par_iter()
        .map(|&(job, stream, len)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(stream);
            let bounds = &jobs[job].1;
            let mut u = vec![0.0; n];
            let mut s = LogSum::new();
            for _ in 0..len {
                for (ui, (lo, hi)) in u.iter_mut().zip(bounds) {
                    *ui = lo + (hi - lo) * rng.gen::<f64>();
                }
                s.add(log_density(&u));
            }
            (job, s.value())
        })
        .collect();

    let mut job_sums = vec![LogSum::new(); jobs.len()];
    for (job, v) in sums {
        job_sums[job].add(v);
    }
    let mut regions = vec![LogSum::new(); schedule.len()];
    for ((k, bounds, count), s) in jobs.iter().zip(&job_sums) {
        let log_volume: f64 = bounds.iter().map(|(lo, hi)| (hi - lo).ln()).sum();
        regions[*k].add(s.value() + log_volume - (*count as f64).ln());
    }
    let regions: Vec<f64> = regions.iter().map(LogSum::value).collect();
    Ok(decide(schedule, &regions, cfg))
}

/// One-variable check in the radius itself:
/// `∫_0^{1/2} r^{2β+1} e^{−2φ(r)} dr` with `φ(r) = −g(−log r)`, truncated at
/// `r ≥ e^{−T}/2`.
pub fn radial_integral(g: &ConcaveToricFunction, beta: u32, cfg: &OracleConfig) -> Result<ConvergenceVerdict> {
    cfg.validate()?;
    check_dim(1, g.dim())?;
    let fast = FastToric::new(g);
    let b = beta as f64;
    let schedule = &cfg.truncation_schedule;
    let mut regions = Vec::with_capacity(schedule.len());
    for k in 0..schedule.len() {
        let hi = if k == 0 { 0.5 } else { 0.5 * (-schedule[k - 1]).exp() };
        let lo = 0.5 * (-schedule[k]).exp();
        regions.push(log_radial(&fast, b, lo, hi, cfg.quadrature_points_per_axis));
    }
    Ok(decide(schedule, &regions, cfg))
}

/// Panels in `r` that shrink geometrically toward `lo`.
fn log_radial(g: &FastToric, beta: f64, lo: f64, hi: f64, points: usize) -> f64 {
    let mut edges = vec![hi];
    let mut x = hi;
    while x > lo {
        x = (x / 2.0).max(lo);
        edges.push(x);
    }
    let m = (points / (edges.len() - 1)).clamp(4, 32);
    let mut sum = LogSum::new();
    for w in edges.windows(2) {
        let (b, a) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let (nodes, weights) = quadrature::rule(m);
        for (t, wt) in nodes.iter().zip(weights) {
            let r: f64 = mid + half * t;
            sum.add((2.0 * beta + 1.0) * r.ln() + 2.0 * g.eval(&[-r.ln()]) + (wt * half).ln());
        }
    }
    sum.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{int, rat};
    use crate::toric::AffinePiece;

    fn pwl(slopes: &[&[i64]]) -> ConcaveToricFunction {
        ConcaveToricFunction::min_of(
            slopes
                .iter()
                .map(|s| AffinePiece {
                    slope: ExponentVector::new(s.iter().map(|&v| int(v)).collect()).unwrap(),
                    offset: int(0),
                })
                .collect(),
        )
        .unwrap()
    }

    fn ev(v: &[u32]) -> ExponentVector {
        ExponentVector::from_naturals(v)
    }

    #[test]
    fn config_validation() {
        let mut cfg = OracleConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.truncation_schedule = vec![10.0, 20.0];
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.truncation_schedule = vec![10.0, 20.0, 20.0];
        assert!(cfg.validate().is_err());
        let cfg = OracleConfig {
            convergence_ratio_threshold: 1.0,
            ..OracleConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = OracleConfig {
            mc_samples: 0,
            ..OracleConfig::default()
        };
        let g = ConcaveToricFunction::zero(1);
        assert!(matches!(polydisk_mc(&g, &[0], Weight::Plain, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn zero_weight_closed_form() {
        for n in 1..=2 {
            let g = ConcaveToricFunction::zero(n);
            let v = orthant_exp_integral(&g, &ExponentVector::ones(n), &OracleConfig::default()).unwrap();
            assert_eq!(v.verdict, Verdict::Converges);
            let est = v.partial_values.last().unwrap().1;
            assert!((est - 0.5f64.powi(n as i32)).abs() < 1e-9, "{est}");
        }
    }

    #[test]
    fn facet_example() {
        let g = pwl(&[&[2, 0], &[0, 3]]);
        let cfg = OracleConfig::default();
        assert_eq!(orthant_exp_integral(&g, &ev(&[1, 1]), &cfg).unwrap().verdict, Verdict::Diverges);
        assert_eq!(orthant_exp_integral(&g, &ev(&[2, 1]), &cfg).unwrap().verdict, Verdict::Converges);
    }

    #[test]
    fn poincare_weight_saves_the_boundary() {
        let g = ConcaveToricFunction::from_generators(&[ev(&[6, 0]), ev(&[0, 6])], &int(1)).unwrap();
        let cfg = OracleConfig::poincare();
        let a = ev(&[2, 4]);
        let v = adjoint_weighted_integral(&g, &a, &int(0), 0, &cfg).unwrap();
        assert_eq!(v.verdict, Verdict::Converges, "{:?}", v.evidence);
        let v = adjoint_weighted_integral(&g, &a, &rat(1, 10), 0, &cfg).unwrap();
        assert_eq!(v.verdict, Verdict::Diverges);
        let v = adjoint_weighted_integral(&ConcaveToricFunction::zero(3), &ev(&[0, 1, 1]), &int(0), 0, &cfg).unwrap();
        assert_eq!(v.verdict, Verdict::Converges);
    }

    #[test]
    fn polydisk_examples() {
        let cfg = OracleConfig {
            seed: 7,
            ..OracleConfig::default()
        };
        let v = polydisk_mc(&ConcaveToricFunction::zero(2), &[0, 0], Weight::Plain, &cfg).unwrap();
        assert_eq!(v.verdict, Verdict::Converges);
        let vol = std::f64::consts::PI.powi(2) / 16.0;
        let est = v.partial_values.last().unwrap().1;
        // Relative standard error is about 2% at 250k core samples.
        assert!((est - vol).abs() / vol < 0.06, "{est} vs {vol}");

        let g = pwl(&[&[2, 0], &[0, 3]]);
        assert_eq!(polydisk_mc(&g, &[0, 0], Weight::Plain, &cfg).unwrap().verdict, Verdict::Diverges);
        assert_eq!(polydisk_mc(&g, &[1, 0], Weight::Plain, &cfg).unwrap().verdict, Verdict::Converges);
    }

    #[test]
    fn polydisk_is_deterministic_across_pools() {
        let g = pwl(&[&[2, 0], &[0, 3]]);
        let cfg = OracleConfig {
            mc_samples: 100_000,
            seed: 42,
            ..OracleConfig::default()
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| polydisk_mc(&g, &[1, 0], Weight::Plain, &cfg).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn radial_power_threshold() {
        let g = ConcaveToricFunction::power(rat(5, 2), ev(&[1])).unwrap();
        let cfg = OracleConfig::default();
        assert_eq!(radial_integral(&g, 1, &cfg).unwrap().verdict, Verdict::Diverges);
        assert_eq!(radial_integral(&g, 2, &cfg).unwrap().verdict, Verdict::Converges);
    }

    #[test]
    fn partial_values_are_monotone() {
        let g = pwl(&[&[2, 0], &[0, 3]]);
        let v = orthant_exp_integral(&g, &ev(&[1, 1]), &OracleConfig::default()).unwrap();
        assert!(v.log_partial_values.windows(2).all(|w| w[1].1 >= w[0].1));
    }
}
