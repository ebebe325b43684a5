//! Toric psh weights through their concave functions `g` on the orthant,
//! `φ(z) = −g(−log|z₁|, …, −log|zₙ|)`.
//!
//! Two families are supported: finite minima of non-decreasing affine
//! functions, and power products `k·x₁^{α₁}⋯xₙ^{αₙ}` with `Σαᵢ ≤ 1`. All
//! verdicts are exact; power products are compared after clearing the
//! common denominator of the exponents, so no floating point ever decides a
//! boundary case.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{check_dim, Error, Result};
use crate::lp::Rational;
use crate::newton::{ExponentVector, NewtonPolyhedron, PointClassification, Scale};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePiece {
    pub slope: ExponentVector,
    pub offset: Rational,
}

/// `g(x) = k·Π xᵢ^{αᵢ}` with `αᵢ = pᵢ/q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerProduct {
    k: Rational,
    exponents: ExponentVector,
    numerators: Vec<u32>,
    denominator: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConcaveToricFunction {
    PiecewiseLinearMin(Vec<AffinePiece>),
    PowerProduct(PowerProduct),
}

/// A function value: exact when it is rational, otherwise a double.
#[derive(Clone, Debug, PartialEq)]
pub enum ToricValue {
    Exact(Rational),
    Real(f64),
}

impl ToricValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ToricValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            ToricValue::Real(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            ToricValue::Exact(r) => Some(r),
            ToricValue::Real(_) => None,
        }
    }
}

impl fmt::Display for ToricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ToricValue::Exact(r) => write!(f, "{r}"),
            ToricValue::Real(x) => write!(f, "{x:.17e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuativeReport {
    pub member: bool,
    /// For members: a lower bound on `1 − sup_w ĝ(w)/(⟨w,β⟩ + Σwᵢ)`, exact
    /// for piecewise-linear data.
    pub margin: Option<Rational>,
    /// For non-members: `w` with `ĝ(w) ≥ ⟨w,β⟩ + Σwᵢ`.
    pub certificate: Option<ExponentVector>,
}

impl ValuativeReport {
    /// Exact re-check of the non-membership certificate (`ratio ≥ 1`).
    pub fn verify(&self, g: &ConcaveToricFunction, beta: &[u32]) -> bool {
        match (&self.member, &self.certificate) {
            (true, None) => self.margin.as_ref().is_some_and(|m| m.is_positive()),
            (false, Some(w)) => {
                let rhs = w.dot(&ExponentVector::from_naturals(beta)) + w.sum();
                !w.is_zero() && g.compare_homogenized(w, &rhs).is_ok_and(|o| o != Ordering::Less)
            }
            _ => false,
        }
    }
}

fn pow(r: &Rational, e: u32) -> Rational {
    num_traits::pow(r.clone(), e as usize)
}

fn exact_root(r: &Rational, q: u32) -> Option<Rational> {
    if q == 1 {
        return Some(r.clone());
    }
    let root = |n: &BigInt| {
        let c = n.nth_root(q);
        (num_traits::pow(c.clone(), q as usize) == *n).then_some(c)
    };
    Some(Rational::new(root(r.numer())?, root(r.denom())?))
}

fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite double")
}

impl PowerProduct {
    pub fn new(k: Rational, exponents: ExponentVector) -> Result<Self> {
        if !k.is_positive() {
            return Err(Error::InvalidInput(format!("power product needs k > 0, got {k}")));
        }
        if exponents.dim() == 0 {
            return Err(Error::InvalidInput("power product needs at least one variable".into()));
        }
        if exponents.sum() > Rational::one() {
            return Err(Error::InvalidInput(format!(
                "k·x^α is concave only when Σα ≤ 1, got Σα = {}",
                exponents.sum()
            )));
        }
        let q = exponents
            .coords()
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let denominator = q
            .to_u32()
            .ok_or_else(|| Error::InvalidInput("exponent denominators too large".into()))?;
        let numerators = exponents
            .coords()
            .iter()
            .map(|a| (a * Rational::from_integer(q.clone())).to_integer().to_u32().unwrap())
            .collect();
        Ok(Self {
            k,
            exponents,
            numerators,
            denominator,
        })
    }

    pub fn k(&self) -> &Rational {
        &self.k
    }

    pub fn exponents(&self) -> &ExponentVector {
        &self.exponents
    }

    pub fn is_homogeneous(&self) -> bool {
        self.exponents.sum() == Rational::one()
    }

    /// `(Π xᵢ^{pᵢ})` over the support of `α`, i.e. `(Π xᵢ^{αᵢ})^q`.
    fn monomial_power(&self, x: &[Rational]) -> Rational {
        x.iter()
            .zip(&self.numerators)
            .filter(|(_, &p)| p > 0)
            .fold(Rational::one(), |acc, (v, &p)| acc * pow(v, p))
    }

    /// `k·Π xᵢ^{αᵢ}`, exact when it is rational.
    fn value(&self, x: &[Rational]) -> ToricValue {
        let q = self.denominator;
        let raised = pow(&self.k, q) * self.monomial_power(x);
        if raised.is_zero() {
            return ToricValue::Exact(Rational::zero());
        }
        match exact_root(&raised, q) {
            Some(r) => ToricValue::Exact(r),
            None => {
                let ln = self.k.to_f64().unwrap().ln()
                    + x.iter()
                        .zip(self.exponents.coords())
                        .filter(|(_, a)| a.is_positive())
                        .map(|(v, a)| a.to_f64().unwrap() * v.to_f64().unwrap().ln())
                        .sum::<f64>();
                ToricValue::Real(ln.exp())
            }
        }
    }

    /// Exact comparison of `k·Π xᵢ^{αᵢ}` against `rhs`.
    fn compare_value(&self, x: &[Rational], rhs: &Rational) -> Ordering {
        if rhs.is_negative() {
            return Ordering::Greater;
        }
        let q = self.denominator;
        (pow(&self.k, q) * self.monomial_power(x)).cmp(&pow(rhs, q))
    }

    /// Exact comparison of `Π_{αᵢ>0} (λᵢ/αᵢ)^{αᵢ}` against `k`.
    fn compare_product(&self, lambda: &[Rational]) -> Ordering {
        let lhs = lambda
            .iter()
            .zip(self.exponents.coords())
            .zip(&self.numerators)
            .filter(|(_, &p)| p > 0)
            .fold(Rational::one(), |acc, ((l, a), &p)| acc * pow(&(l / a), p));
        lhs.cmp(&pow(&self.k, self.denominator))
    }

    /// Smallest rational of the form `x·(1 + 2⁻⁴⁰·j)` that is provably `≥ Π vᵢ^{αᵢ}`.
    fn monomial_upper_bound(&self, v: &[Rational]) -> Rational {
        let target = self.monomial_power(v);
        let q = self.denominator;
        if let Some(r) = exact_root(&target, q) {
            return r;
        }
        let approx: f64 = v
            .iter()
            .zip(self.exponents.coords())
            .map(|(x, a)| a.to_f64().unwrap() * x.to_f64().unwrap().ln())
            .sum::<f64>()
            .exp();
        let base = rational_from_f64(approx);
        let step = &base * Rational::new(BigInt::one(), BigInt::one() << 40);
        let mut candidate = base;
        while pow(&candidate, q) < target {
            candidate += &step;
        }
        candidate
    }
}

fn coordinate_min(lambda: &ExponentVector) -> Rational {
    lambda.coords().iter().min().cloned().unwrap_or_else(Rational::zero)
}

impl ConcaveToricFunction {
    pub fn min_of(pieces: Vec<AffinePiece>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidInput("a minimum needs at least one affine piece".into()));
        };
        let n = first.slope.dim();
        for p in &pieces {
            check_dim(n, p.slope.dim())?;
        }
        Ok(Self::PiecewiseLinearMin(pieces))
    }

    pub fn power(k: Rational, exponents: ExponentVector) -> Result<Self> {
        PowerProduct::new(k, exponents).map(Self::PowerProduct)
    }

    /// `g ≡ 0` in `n` variables (a bounded weight).
    pub fn zero(n: usize) -> Self {
        Self::PiecewiseLinearMin(vec![AffinePiece {
            slope: ExponentVector::zeros(n),
            offset: Rational::zero(),
        }])
    }

    /// `g = c·min_j ⟨α_j, ·⟩`, the weight `c·log|𝔞|` of a monomial ideal with generators `α_j`.
    pub fn from_generators(generators: &[ExponentVector], c: &Rational) -> Result<Self> {
        Self::min_of(
            generators
                .iter()
                .map(|g| AffinePiece {
                    slope: g.scaled(c),
                    offset: Rational::zero(),
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::PiecewiseLinearMin(pieces) => pieces[0].slope.dim(),
            Self::PowerProduct(p) => p.exponents.dim(),
        }
    }

    /// `c·g`.
    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidInput(format!("scale must be positive, got {c}")));
        }
        Ok(match self {
            Self::PiecewiseLinearMin(pieces) => Self::PiecewiseLinearMin(
                pieces
                    .iter()
                    .map(|p| AffinePiece {
                        slope: p.slope.scaled(c),
                        offset: &p.offset * c,
                    })
                    .collect(),
            ),
            Self::PowerProduct(p) => Self::power(&p.k * c, p.exponents.clone())?,
        })
    }

    pub fn evaluate(&self, x: &ExponentVector) -> Result<ToricValue> {
        check_dim(self.dim(), x.dim())?;
        Ok(match self {
            Self::PiecewiseLinearMin(pieces) => ToricValue::Exact(
                pieces
                    .iter()
                    .map(|p| p.slope.dot(x) + &p.offset)
                    .min()
                    .unwrap(),
            ),
            Self::PowerProduct(p) => p.value(x.coords()),
        })
    }

    /// Floating-point evaluation for the numerical oracles.
    pub fn evaluate_f64(&self, x: &[f64]) -> f64 {
        match self {
            Self::PiecewiseLinearMin(pieces) => pieces
                .iter()
                .map(|p| {
                    p.offset.to_f64().unwrap()
                        + p.slope
                            .coords()
                            .iter()
                            .zip(x)
                            .map(|(s, v)| s.to_f64().unwrap() * v)
                            .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min),
            Self::PowerProduct(p) => {
                let mut log = p.k.to_f64().unwrap().ln();
                for (a, v) in p.exponents.coords().iter().zip(x) {
                    if a.is_positive() {
                        if *v <= 0.0 {
                            return 0.0;
                        }
                        log += a.to_f64().unwrap() * v.ln();
                    }
                }
                log.exp()
            }
        }
    }

    fn check_direction(&self, w: &ExponentVector) -> Result<()> {
        check_dim(self.dim(), w.dim())?;
        if w.is_zero() {
            return Err(Error::InvalidInput("homogenization needs a non-zero direction".into()));
        }
        Ok(())
    }

    /// `ĝ(w) = lim g(tw)/t`, which is the Kiselman number `v_w(φ)`.
    pub fn homogenized_value(&self, w: &ExponentVector) -> Result<ToricValue> {
        self.check_direction(w)?;
        Ok(match self {
            Self::PiecewiseLinearMin(pieces) => {
                ToricValue::Exact(pieces.iter().map(|p| p.slope.dot(w)).min().unwrap())
            }
            Self::PowerProduct(p) if !p.is_homogeneous() => ToricValue::Exact(Rational::zero()),
            Self::PowerProduct(p) => p.value(w.coords()),
        })
    }

    /// Exact sign of `ĝ(w) − rhs`.
    pub fn compare_homogenized(&self, w: &ExponentVector, rhs: &Rational) -> Result<Ordering> {
        self.check_direction(w)?;
        Ok(match self {
            Self::PiecewiseLinearMin(pieces) => {
                pieces.iter().map(|p| p.slope.dot(w)).min().unwrap().cmp(rhs)
            }
            Self::PowerProduct(p) if !p.is_homogeneous() => Rational::zero().cmp(rhs),
            Self::PowerProduct(p) => p.compare_value(w.coords(), rhs),
        })
    }

    /// The Newton polyhedron of the slopes; `None` for power products.
    pub fn slope_polyhedron(&self) -> Option<NewtonPolyhedron> {
        match self {
            Self::PiecewiseLinearMin(pieces) => {
                Some(NewtonPolyhedron::build(pieces.iter().map(|p| p.slope.clone()).collect()).expect("validated pieces"))
            }
            Self::PowerProduct(_) => None,
        }
    }

    /// Classifies `λ` against the Newton convex body `P(g)`. Boundary and
    /// exterior refer to its closure `P(ĝ)`.
    pub fn classify_in_body(&self, lambda: &ExponentVector) -> Result<PointClassification> {
        check_dim(self.dim(), lambda.dim())?;
        let cls = match self {
            Self::PiecewiseLinearMin(_) => {
                return self.slope_polyhedron().unwrap().classify(lambda, &Rational::one());
            }
            Self::PowerProduct(p) => classify_power(p, lambda),
        };
        if !self.verify_classification(lambda, &cls) {
            return Err(Error::Certificate(format!("power-product classification of {lambda} failed: {cls:?}")));
        }
        Ok(cls)
    }

    /// Exact re-verification of a [`classify_in_body`](Self::classify_in_body) result.
    pub fn verify_classification(&self, lambda: &ExponentVector, cls: &PointClassification) -> bool {
        let p = match self {
            Self::PiecewiseLinearMin(_) => {
                return self.slope_polyhedron().unwrap().verify(lambda, &Rational::one(), cls);
            }
            Self::PowerProduct(p) => p,
        };
        let in_closure = |x: &[Rational]| {
            x.iter().all(|v| !v.is_negative())
                && (!p.is_homogeneous() || p.compare_product(x) != Ordering::Less)
        };
        let witness_ok = |w: &ExponentVector, want: Ordering| {
            w.dim() == lambda.dim()
                && !w.is_zero()
                && self.compare_homogenized(w, &w.dot(lambda)).is_ok_and(|o| o == want)
        };
        match cls {
            PointClassification::Interior { margin } => {
                let shifted: Vec<Rational> = lambda.coords().iter().map(|v| v - margin).collect();
                margin.is_positive() && in_closure(&shifted)
            }
            PointClassification::Boundary { witness } => {
                in_closure(lambda.coords()) && witness_ok(witness, Ordering::Equal)
            }
            PointClassification::Exterior { witness } => witness_ok(witness, Ordering::Greater),
        }
    }

    /// `∫_{ℝ₊ⁿ} e^g < ∞ ⟺ 0 ∈ P̊(g)`.
    pub fn exp_integrable(&self) -> Result<bool> {
        Ok(self.classify_in_body(&ExponentVector::zeros(self.dim()))?.is_interior())
    }

    /// Integrability of `e^{g − ⟨A,·⟩}` on the orthant.
    pub fn exp_integrable_shifted(&self, shift: &ExponentVector) -> Result<bool> {
        Ok(self.classify_in_body(shift)?.is_interior())
    }

    /// `z^β ∈ I(φ)` through `sup_w v_w(φ)/(v_w(z^β) + A(w)) < 1`, decided
    /// as `β + 𝟙 ∈ P̊(g)`.
    pub fn valuative_membership(&self, beta: &[u32]) -> Result<ValuativeReport> {
        check_dim(self.dim(), beta.len())?;
        let lambda = ExponentVector::from_naturals(beta).plus(&ExponentVector::ones(beta.len()));
        let report = match self.classify_in_body(&lambda)? {
            PointClassification::Interior { .. } => ValuativeReport {
                member: true,
                margin: Some(self.valuative_margin(&lambda)?),
                certificate: None,
            },
            PointClassification::Boundary { witness } | PointClassification::Exterior { witness } => {
                ValuativeReport {
                    member: false,
                    margin: None,
                    certificate: Some(witness),
                }
            }
        };
        if !report.verify(self, beta) {
            return Err(Error::Certificate(format!("valuative report for {beta:?} failed: {report:?}")));
        }
        Ok(report)
    }

    /// `1 − sup_w ĝ(w)/⟨w,λ⟩` for interior `λ`; a certified lower bound for power products.
    fn valuative_margin(&self, lambda: &ExponentVector) -> Result<Rational> {
        match self {
            Self::PiecewiseLinearMin(_) => {
                // sup_w ĝ(w)/⟨w,λ⟩ = 1/c*(λ) by LP duality.
                Ok(match self.slope_polyhedron().unwrap().critical_scale(lambda)? {
                    Scale::Infinite => Rational::one(),
                    Scale::Finite(c) => Rational::one() - c.recip(),
                })
            }
            Self::PowerProduct(p) if !p.is_homogeneous() => Ok(Rational::one()),
            Self::PowerProduct(p) => {
                // ratio = k / Π(λᵢ/αᵢ)^{αᵢ}; bisect for a rational upper bound t < 1.
                let q = p.denominator;
                let prod_q = lambda
                    .coords()
                    .iter()
                    .zip(p.exponents.coords())
                    .zip(&p.numerators)
                    .filter(|(_, &e)| e > 0)
                    .fold(Rational::one(), |acc, ((l, a), &e)| acc * pow(&(l / a), e));
                let kq = pow(&p.k, q);
                let bounds = |t: &Rational| kq <= pow(t, q) * &prod_q;
                let (mut lo, mut hi) = (Rational::zero(), Rational::one());
                for _ in 0..48 {
                    let mid = (&lo + &hi) / Rational::from_integer(2.into());
                    if bounds(&mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                if hi >= Rational::one() {
                    return Err(Error::Certificate("interior point with ratio ≥ 1".into()));
                }
                Ok(Rational::one() - hi)
            }
        }
    }

    /// `∇g(v) + μ` at each sample; every returned point is asserted interior to `P(g)`.
    pub fn gradient_sample(&self, samples: &[ExponentVector], mu: &ExponentVector) -> Result<Vec<ExponentVector>> {
        let Self::PowerProduct(p) = self else {
            return Err(Error::InvalidInput("gradient sampling is defined for power products".into()));
        };
        check_dim(self.dim(), mu.dim())?;
        if !mu.is_strictly_positive() {
            return Err(Error::InvalidInput("the offset μ must be strictly positive".into()));
        }
        let mut out = Vec::with_capacity(samples.len());
        for v in samples {
            check_dim(self.dim(), v.dim())?;
            if !v.is_strictly_positive() {
                return Err(Error::InvalidInput(format!("g is not differentiable at {v}")));
            }
            // ∂ᵢg = k·αᵢ·v^α / vᵢ, with v^α rounded up; upward closedness keeps the result interior.
            let vpow = p.monomial_upper_bound(v.coords());
            let point: Vec<Rational> = v
                .coords()
                .iter()
                .zip(p.exponents.coords())
                .zip(mu.coords())
                .map(|((vi, a), m)| &p.k * a * &vpow / vi + m)
                .collect();
            let point = ExponentVector::new(point)?;
            if !self.classify_in_body(&point)?.is_interior() {
                return Err(Error::Certificate(format!("gradient point {point} is not interior")));
            }
            out.push(point);
        }
        Ok(out)
    }
}

fn classify_power(p: &PowerProduct, lambda: &ExponentVector) -> PointClassification {
    let n = lambda.dim();
    let coords = lambda.coords();
    let zero_slot = coords.iter().position(|v| v.is_zero());
    if !p.is_homogeneous() {
        // ĝ ≡ 0, so the closure is the whole orthant.
        return match zero_slot {
            None => PointClassification::Interior {
                margin: coordinate_min(lambda) / Rational::from_integer(2.into()),
            },
            Some(i) => PointClassification::Boundary {
                witness: ExponentVector::unit(n, i),
            },
        };
    }
    let alpha = p.exponents.coords();
    let starved = (0..n).find(|&i| coords[i].is_zero() && alpha[i].is_positive());
    if let Some(i) = starved {
        // Grow w along the starved axis until k·Π w^α beats ⟨w, λ⟩.
        let mut w: Vec<Rational> = alpha
            .iter()
            .map(|a| if a.is_positive() { Rational::one() } else { Rational::zero() })
            .collect();
        let rhs: Rational = w.iter().zip(coords).map(|(a, b)| a * b).sum();
        let two = Rational::from_integer(2.into());
        while p.compare_value(&w, &rhs) != Ordering::Greater {
            w[i] *= &two;
        }
        return PointClassification::Exterior {
            witness: ExponentVector::new(w).unwrap(),
        };
    }
    match p.compare_product(coords) {
        Ordering::Greater => match zero_slot {
            Some(j) => PointClassification::Boundary {
                witness: ExponentVector::unit(n, j),
            },
            None => {
                let two = Rational::from_integer(2.into());
                let mut margin = coordinate_min(lambda) / &two;
                loop {
                    let shifted: Vec<Rational> = coords.iter().map(|v| v - &margin).collect();
                    if p.compare_product(&shifted) == Ordering::Greater {
                        break PointClassification::Interior { margin };
                    }
                    margin /= &two;
                }
            }
        },
        ord => {
            // w = α/λ minimizes ⟨w,λ⟩ on {ĝ = ĝ(w)}; ratio ĝ(w)/⟨w,λ⟩ = k/Π(λ/α)^α.
            let w: Vec<Rational> = alpha
                .iter()
                .zip(coords)
                .map(|(a, l)| if a.is_positive() { a / l } else { Rational::zero() })
                .collect();
            let witness = ExponentVector::new(w).unwrap();
            if ord == Ordering::Equal {
                PointClassification::Boundary { witness }
            } else {
                PointClassification::Exterior { witness }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{int, rat};
    use crate::newton::Verdict;

    fn ev(v: &[(i64, i64)]) -> ExponentVector {
        ExponentVector::new(v.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    fn nat(v: &[u32]) -> ExponentVector {
        ExponentVector::from_naturals(v)
    }

    fn piece(slope: &[u32], offset: Rational) -> AffinePiece {
        AffinePiece {
            slope: nat(slope),
            offset,
        }
    }

    fn min23() -> ConcaveToricFunction {
        ConcaveToricFunction::min_of(vec![piece(&[2, 0], int(0)), piece(&[0, 3], int(0))]).unwrap()
    }

    fn power(k: Rational, a: &[(i64, i64)]) -> ConcaveToricFunction {
        ConcaveToricFunction::power(k, ev(a)).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(min23().evaluate(&nat(&[1, 1])).unwrap(), ToricValue::Exact(int(2)));
        let g = power(int(2), &[(1, 2), (1, 2)]);
        assert_eq!(g.evaluate(&nat(&[4, 9])).unwrap(), ToricValue::Exact(int(12)));
        let shifted = ConcaveToricFunction::min_of(vec![piece(&[2, 0], int(1)), piece(&[0, 3], int(0))]).unwrap();
        assert_eq!(shifted.evaluate(&nat(&[0, 0])).unwrap(), ToricValue::Exact(int(0)));
        match g.evaluate(&nat(&[2, 1])).unwrap() {
            ToricValue::Real(x) => assert!((x - 2.0 * 2f64.sqrt()).abs() < 1e-12),
            other => panic!("√2 is irrational, got {other:?}"),
        }
    }

    #[test]
    fn homogenization_examples() {
        let g = ConcaveToricFunction::min_of(vec![piece(&[2, 0], int(5)), piece(&[0, 3], int(-1))]).unwrap();
        assert_eq!(g.homogenized_value(&nat(&[1, 1])).unwrap(), ToricValue::Exact(int(2)));
        let sub = power(int(3), &[(1, 3), (1, 3)]);
        assert_eq!(sub.homogenized_value(&nat(&[1, 1])).unwrap(), ToricValue::Exact(int(0)));
        let hom = power(int(3), &[(1, 2), (1, 2)]);
        assert_eq!(hom.homogenized_value(&nat(&[4, 1])).unwrap(), ToricValue::Exact(int(6)));
        // numeric limit g(tw)/t for the homogeneous case is constant in t
        let w = [4.0, 1.0];
        for t in [1.0, 10.0, 1000.0] {
            let v = hom.evaluate_f64(&[t * w[0], t * w[1]]) / t;
            assert!((v - 6.0).abs() < 1e-9);
        }
        assert!(hom.homogenized_value(&nat(&[0, 0])).is_err());
    }

    #[test]
    fn power_product_rejects_convexity_violation() {
        assert!(ConcaveToricFunction::power(int(1), ev(&[(2, 3), (1, 2)])).is_err());
        assert!(ConcaveToricFunction::power(int(0), ev(&[(1, 2)])).is_err());
    }

    #[test]
    fn classify_in_body_examples() {
        assert_eq!(min23().classify_in_body(&nat(&[1, 1])).unwrap().verdict(), Verdict::Exterior);
        let g = power(int(2), &[(1, 2), (1, 2)]);
        assert_eq!(g.classify_in_body(&nat(&[1, 1])).unwrap().verdict(), Verdict::Boundary);
        assert_eq!(g.classify_in_body(&nat(&[2, 2])).unwrap().verdict(), Verdict::Interior);
        assert_eq!(g.classify_in_body(&nat(&[0, 5])).unwrap().verdict(), Verdict::Exterior);
        // Σα < 1: the closure of P(g) is the orthant, so a zero coordinate is a boundary point.
        let sub = power(int(1), &[(1, 3), (1, 3)]);
        assert_eq!(sub.classify_in_body(&nat(&[1, 0])).unwrap().verdict(), Verdict::Boundary);
        assert_eq!(sub.classify_in_body(&nat(&[1, 1])).unwrap().verdict(), Verdict::Interior);
    }

    #[test]
    fn integrability_examples() {
        assert!(!min23().exp_integrable().unwrap());
        assert!(!power(int(1), &[(1, 2), (1, 2)]).exp_integrable().unwrap());
        assert!(!min23().exp_integrable_shifted(&nat(&[1, 1])).unwrap());
        assert!(min23().exp_integrable_shifted(&nat(&[2, 1])).unwrap());
        assert!(ConcaveToricFunction::zero(2).exp_integrable_shifted(&nat(&[1, 2])).unwrap());
    }

    #[test]
    fn valuative_examples() {
        let r = min23().valuative_membership(&[0, 0]).unwrap();
        assert!(!r.member);
        let w = r.certificate.clone().unwrap();
        assert_eq!(w, ev(&[(1, 2), (1, 3)]));
        assert_eq!(min23().homogenized_value(&w).unwrap(), ToricValue::Exact(int(1)));
        assert_eq!(w.sum(), rat(5, 6));

        let r = min23().valuative_membership(&[1, 0]).unwrap();
        assert!(r.member);
        // c*(2,1) = 4/3, so the sup of the ratio is 3/4.
        assert_eq!(r.margin, Some(rat(1, 4)));

        let r = ConcaveToricFunction::zero(3).valuative_membership(&[0, 0, 0]).unwrap();
        assert!(r.member);
        assert_eq!(r.margin, Some(int(1)));
    }

    #[test]
    fn valuative_power_product_certificates() {
        let g = power(int(2), &[(1, 2), (1, 2)]);
        let r = g.valuative_membership(&[0, 0]).unwrap();
        assert!(!r.member && r.verify(&g, &[0, 0]));
        let r = g.valuative_membership(&[1, 0]).unwrap();
        assert!(r.member);
        let m = r.margin.unwrap();
        // true margin 1 − 2/√8 = 1 − 1/√2 ≈ 0.2929
        let mf = m.to_f64().unwrap();
        assert!(mf > 0.29 && mf <= 1.0 - 0.5f64.sqrt());
    }

    #[test]
    fn gradient_sample_examples() {
        let g = power(int(2), &[(1, 2), (1, 2)]);
        let out = g.gradient_sample(&[nat(&[1, 1])], &ev(&[(1, 10), (1, 10)])).unwrap();
        assert_eq!(out, vec![ev(&[(11, 10), (11, 10)])]);

        let lin = power(int(1), &[(1, 1), (0, 1)]);
        let out = lin.gradient_sample(&[nat(&[1, 1])], &ev(&[(1, 10), (1, 10)])).unwrap();
        assert_eq!(out, vec![ev(&[(11, 10), (1, 10)])]);

        assert!(g.gradient_sample(&[], &ev(&[(1, 10), (1, 10)])).unwrap().is_empty());
        assert!(g.gradient_sample(&[nat(&[0, 1])], &ev(&[(1, 10), (1, 10)])).is_err());

        // irrational gradient: ∇(x^{1/2} y^{1/2}) at (2,1) = (1/(2√2), √2/2)·… rounded up stays interior
        let out = g.gradient_sample(&[nat(&[2, 1])], &ev(&[(1, 1000), (1, 1000)])).unwrap();
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn offsets_never_change_verdicts() {
        let shifted = ConcaveToricFunction::min_of(vec![piece(&[2, 0], int(7)), piece(&[0, 3], rat(-5, 2))]).unwrap();
        for lam in [nat(&[1, 1]), nat(&[2, 0]), nat(&[2, 1]), nat(&[0, 4])] {
            assert_eq!(
                shifted.classify_in_body(&lam).unwrap().verdict(),
                min23().classify_in_body(&lam).unwrap().verdict()
            );
        }
    }
}
