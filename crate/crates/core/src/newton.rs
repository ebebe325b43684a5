//! Newton polyhedra `P = conv(generators) + ℝ₊ⁿ` with exact point
//! classification.
//!
//! Interiority is decided by one LP: the largest `ε` (of either sign) with
//! `x − ε𝟙 ∈ c·P`. Because the recession cone is the orthant, every outer
//! facet normal has non-negative entries and a positive pairing with `𝟙`,
//! so the sign of that optimum is exactly interior / boundary / exterior.
//! The optimal dual is a normalized functional `w ≥ 0` supporting or
//! separating `x`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::lp::{maximize, LinearConstraintSystem, LpOutcome, Rational, Relation};

/// A point of the closed positive orthant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<Rational>);

impl ExponentVector {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if let Some(bad) = coords.iter().find(|c| c.is_negative()) {
            return Err(Error::InvalidInput(format!("negative coordinate {bad}")));
        }
        Ok(Self(coords))
    }

    pub fn from_naturals(exponents: &[u32]) -> Self {
        Self(exponents.iter().map(|&e| Rational::from_integer(e.into())).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Rational::zero(); n])
    }

    /// `𝟙 = (1, …, 1)`.
    pub fn ones(n: usize) -> Self {
        Self(vec![Rational::one(); n])
    }

    /// `𝟙` with a zero in slot `axis`.
    pub fn ones_except(n: usize, axis: usize) -> Self {
        let mut v = vec![Rational::one(); n];
        v[axis] = Rational::zero();
        Self(v)
    }

    pub fn unit(n: usize, axis: usize) -> Self {
        let mut v = vec![Rational::zero(); n];
        v[axis] = Rational::one();
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    /// Componentwise `self ≼ other`.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(|c| c.is_positive())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self(self.0.iter().map(|x| x * c).collect())
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn dot(&self, other: &Self) -> Rational {
        crate::lp::dot(&self.0, &other.0)
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().sum()
    }

    /// Drops coordinate `axis`.
    pub fn without(&self, axis: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(axis);
        Self(v)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Interior,
    Boundary,
    Exterior,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Interior => "interior",
            Verdict::Boundary => "boundary",
            Verdict::Exterior => "exterior",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointClassification {
    /// `x − margin·𝟙` still lies in the (scaled) body; `margin > 0`.
    Interior { margin: Rational },
    /// `x` lies in the closed body and `witness` attains the support value at `x`.
    Boundary { witness: ExponentVector },
    /// `witness` strictly separates `x` from the closed body.
    Exterior { witness: ExponentVector },
}

impl PointClassification {
    pub fn verdict(&self) -> Verdict {
        match self {
            PointClassification::Interior { .. } => Verdict::Interior,
            PointClassification::Boundary { .. } => Verdict::Boundary,
            PointClassification::Exterior { .. } => Verdict::Exterior,
        }
    }

    pub fn is_interior(&self) -> bool {
        matches!(self, PointClassification::Interior { .. })
    }

    pub fn witness(&self) -> Option<&ExponentVector> {
        match self {
            PointClassification::Interior { .. } => None,
            PointClassification::Boundary { witness } | PointClassification::Exterior { witness } => Some(witness),
        }
    }
}

/// A non-negative rational or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scale {
    Finite(Rational),
    Infinite,
}

impl Scale {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Scale::Finite(r) => Some(r),
            Scale::Infinite => None,
        }
    }

    /// `c < self`.
    pub fn exceeds(&self, c: &Rational) -> bool {
        match self {
            Scale::Finite(r) => c < r,
            Scale::Infinite => true,
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scale::Finite(r) => write!(f, "{r}"),
            Scale::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NewtonPolyhedron {
    dimension: usize,
    /// ≼-minimal, deduplicated, lexicographically sorted.
    generators: Vec<ExponentVector>,
}

/// Keeps the ≼-minimal elements, sorted and deduplicated.
pub(crate) fn minimal_elements<T: Ord + Clone>(points: &[T], leq: impl Fn(&T, &T) -> bool) -> Vec<T> {
    let mut sorted: Vec<T> = points.to_vec();
    sorted.sort();
    sorted.dedup();
    sorted
        .iter()
        .filter(|p| !sorted.iter().any(|q| q != *p && leq(q, p)))
        .cloned()
        .collect()
}

fn positive_scale(c: &Rational) -> Result<()> {
    if c.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("scale must be positive, got {c}")))
    }
}

impl NewtonPolyhedron {
    pub fn build(points: Vec<ExponentVector>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidInput("Newton polyhedron needs at least one point".into()));
        };
        let dimension = first.dim();
        if dimension == 0 {
            return Err(Error::InvalidInput("ambient dimension must be at least 1".into()));
        }
        for p in &points {
            check_dim(dimension, p.dim())?;
            if p.0.iter().any(|c| c.is_negative()) {
                return Err(Error::InvalidInput(format!("negative coordinate in {p}")));
            }
        }
        let generators = minimal_elements(&points, |a, b| a.dominated_by(b));
        Ok(Self { dimension, generators })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn generators(&self) -> &[ExponentVector] {
        &self.generators
    }

    /// `min_j ⟨w, α_j⟩`, the support value of `P` in direction `w`.
    pub fn support(&self, w: &ExponentVector) -> Rational {
        self.generators
            .iter()
            .map(|g| g.dot(w))
            .min()
            .expect("non-empty generator list")
    }

    /// The largest `ε` (possibly negative) with `x − ε𝟙 ∈ c·P`, together with
    /// the dual functional certifying it.
    fn margin_lp(&self, x: &ExponentVector, c: &Rational) -> Result<(Rational, ExponentVector)> {
        check_dim(self.dimension, x.dim())?;
        positive_scale(c)?;
        let n = self.dimension;
        let m = self.generators.len();
        // Variables: t_1..t_m ≥ 0, then ε free.
        let mut sys = LinearConstraintSystem::nonnegative(m + 1);
        sys.set_nonnegative(m, false);
        for i in 0..n {
            let mut row: Vec<Rational> = self.generators.iter().map(|g| c * &g.0[i]).collect();
            row.push(Rational::one());
            sys.add(row, Relation::Le, x.0[i].clone())?;
        }
        let mut convex = vec![Rational::one(); m];
        convex.push(Rational::zero());
        sys.add(convex, Relation::Eq, Rational::one())?;

        let mut objective = vec![Rational::zero(); m];
        objective.push(Rational::one());
        match maximize(&objective, &sys)? {
            LpOutcome::Optimal { optimum, dual, .. } => {
                let w = ExponentVector(dual[..n].to_vec());
                Ok((optimum, w))
            }
            other => Err(Error::Certificate(format!("margin LP must be finite, got {other:?}"))),
        }
    }

    /// Normalizes a supporting functional so that `c·support(w) = 1`, or `Σw = 1`
    /// when the support value vanishes.
    fn normalize(&self, w: ExponentVector, c: &Rational) -> ExponentVector {
        let s = c * self.support(&w);
        let denom = if s.is_positive() { s } else { w.sum() };
        w.scaled(&denom.recip())
    }

    /// Signed sup-norm depth of `x` in `c·P`: positive inside, zero on the
    /// boundary, negative outside.
    pub fn signed_margin(&self, x: &ExponentVector, c: &Rational) -> Result<Rational> {
        Ok(self.margin_lp(x, c)?.0)
    }

    pub fn classify(&self, x: &ExponentVector, c: &Rational) -> Result<PointClassification> {
        let (eps, w) = self.margin_lp(x, c)?;
        let cls = if eps.is_positive() {
            PointClassification::Interior { margin: eps }
        } else if eps.is_zero() {
            PointClassification::Boundary { witness: self.normalize(w, c) }
        } else {
            PointClassification::Exterior { witness: self.normalize(w, c) }
        };
        if !self.verify(x, c, &cls) {
            return Err(Error::Certificate(format!("classification of {x} did not verify: {cls:?}")));
        }
        Ok(cls)
    }

    /// `x ∈ c·P` for the closed polyhedron, decided by an explicit convex
    /// combination found with the LP.
    fn contains_closed(&self, x: &ExponentVector, c: &Rational) -> bool {
        self.margin_lp(x, c).map(|(e, _)| !e.is_negative()).unwrap_or(false)
    }

    /// Exact re-verification of a classification certificate.
    pub fn verify(&self, x: &ExponentVector, c: &Rational, cls: &PointClassification) -> bool {
        match cls {
            PointClassification::Interior { margin } => {
                if !margin.is_positive() {
                    return false;
                }
                let shifted: Vec<Rational> = x.0.iter().map(|v| v - margin).collect();
                shifted.iter().all(|v| !v.is_negative())
                    && self.contains_closed(&ExponentVector(shifted), c)
            }
            PointClassification::Boundary { witness } => {
                witness.dim() == self.dimension
                    && !witness.is_zero()
                    && witness.0.iter().all(|v| !v.is_negative())
                    && witness.dot(x) == c * self.support(witness)
                    && self.contains_closed(x, c)
            }
            PointClassification::Exterior { witness } => {
                witness.dim() == self.dimension
                    && !witness.is_zero()
                    && witness.0.iter().all(|v| !v.is_negative())
                    && witness.dot(x) < c * self.support(witness)
            }
        }
    }

    /// `c*(x) = max{Σ s_j : Σ s_j α_j ≼ x, s ≥ 0}`; for `x ≻ 0`,
    /// `x ∈ c·P̊ ⟺ c < c*(x)`.
    pub fn critical_scale(&self, x: &ExponentVector) -> Result<Scale> {
        check_dim(self.dimension, x.dim())?;
        if !x.is_strictly_positive() {
            return Err(Error::InvalidInput(format!(
                "critical scale needs a strictly positive point, got {x}"
            )));
        }
        let m = self.generators.len();
        let mut sys = LinearConstraintSystem::nonnegative(m);
        for i in 0..self.dimension {
            let row = self.generators.iter().map(|g| g.0[i].clone()).collect();
            sys.add(row, Relation::Le, x.0[i].clone())?;
        }
        match maximize(&vec![Rational::one(); m], &sys)? {
            LpOutcome::Optimal { optimum, .. } => Ok(Scale::Finite(optimum)),
            LpOutcome::Unbounded { .. } => Ok(Scale::Infinite),
            LpOutcome::Infeasible { .. } => Err(Error::Certificate("s = 0 is always feasible".into())),
        }
    }

    /// `P ∩ {x_axis = 0}`, projected away from `axis`. Present iff some
    /// generator has a zero in that slot.
    pub fn axis_face(&self, axis: usize) -> Result<Option<NewtonPolyhedron>> {
        self.check_axis(axis)?;
        if self.dimension < 2 {
            return Err(Error::InvalidInput("axis face of a 1-dimensional polyhedron has dimension 0".into()));
        }
        let on_face: Vec<ExponentVector> = self
            .generators
            .iter()
            .filter(|g| g.0[axis].is_zero())
            .map(|g| g.without(axis))
            .collect();
        if on_face.is_empty() {
            Ok(None)
        } else {
            NewtonPolyhedron::build(on_face).map(Some)
        }
    }

    pub fn in_relative_interior_of_axis_face(
        &self,
        axis: usize,
        x: &ExponentVector,
        c: &Rational,
    ) -> Result<bool> {
        check_dim(self.dimension, x.dim())?;
        self.check_axis(axis)?;
        positive_scale(c)?;
        if !x.0[axis].is_zero() {
            return Ok(false);
        }
        if self.dimension == 1 {
            // The face is the single point {0}, its own relative interior.
            return Ok(self.generators[0].is_zero());
        }
        match self.axis_face(axis)? {
            None => Ok(false),
            Some(face) => Ok(face.classify(&x.without(axis), c)?.is_interior()),
        }
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.dimension {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "axis {axis} out of range for dimension {}",
                self.dimension
            )))
        }
    }
}
