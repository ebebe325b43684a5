//! Monomial ideals and their multiplier and adjoint ideals.
//!
//! An ideal is stored as its Dickson-minimal antichain of exponent vectors,
//! sorted lexicographically. Derived ideals are computed by enumerating a
//! finite box of candidate exponents in order of total degree, testing each
//! candidate exactly, and skipping every candidate already dominated by a
//! generator found earlier. A candidate that survives the skip and passes the
//! test is therefore minimal.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{check_dim, Error, Result};
use crate::lp::Rational;
use crate::newton::{minimal_elements, ExponentVector, NewtonPolyhedron, Scale};
use crate::toric::ConcaveToricFunction;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialIdeal {
    dimension: usize,
    generators: Vec<Vec<u32>>,
}

fn leq(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn positive(c: &Rational) -> Result<()> {
    if c.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("exponent c must be positive, got {c}")))
    }
}

fn ceil_u32(r: &Rational) -> u32 {
    r.ceil().to_integer().to_u32().expect("cap fits in u32")
}

/// Minimal elements of `{β in box : member(β)}` for an upward-closed predicate.
fn minimal_members(caps: &[u32], mut member: impl FnMut(&[u32]) -> Result<bool>) -> Result<Vec<Vec<u32>>> {
    let n = caps.len();
    let mut points: Vec<Vec<u32>> = vec![Vec::new()];
    for &cap in caps {
        points = points
            .into_iter()
            .flat_map(|p| {
                (0..=cap).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points.sort_by_key(|p| (p.iter().map(|&v| v as u64).sum::<u64>(), p.clone()));
    let mut found: Vec<Vec<u32>> = Vec::new();
    for p in points {
        debug_assert_eq!(p.len(), n);
        if found.iter().any(|g| leq(g, &p)) {
            continue;
        }
        if member(&p)? {
            found.push(p);
        }
    }
    found.sort();
    Ok(found)
}

/// Interior test for `c·P` that answers most queries without an LP: a point
/// strictly above a scaled generator is interior, and a point violating a
/// separating inequality found by an earlier LP is not.
struct InteriorTest<'a> {
    polyhedron: &'a NewtonPolyhedron,
    c: &'a Rational,
    scaled: Vec<ExponentVector>,
    cuts: Vec<(ExponentVector, Rational)>,
}

impl<'a> InteriorTest<'a> {
    fn new(polyhedron: &'a NewtonPolyhedron, c: &'a Rational) -> Self {
        Self {
            polyhedron,
            c,
            scaled: polyhedron.generators().iter().map(|g| g.scaled(c)).collect(),
            cuts: Vec::new(),
        }
    }

    fn is_interior(&mut self, x: &ExponentVector) -> Result<bool> {
        if self.scaled.iter().any(|g| g.coords().iter().zip(x.coords()).all(|(a, b)| a < b)) {
            return Ok(true);
        }
        if self.cuts.iter().any(|(w, rhs)| &x.dot(w) <= rhs) {
            return Ok(false);
        }
        let cls = self.polyhedron.classify(x, self.c)?;
        if let Some(w) = cls.witness() {
            let rhs = self.polyhedron.support(w) * self.c;
            self.cuts.push((w.clone(), rhs));
        }
        Ok(cls.is_interior())
    }
}

fn plus_ones_except(beta: &[u32], axis: Option<usize>) -> ExponentVector {
    let v: Vec<u32> = beta
        .iter()
        .enumerate()
        .map(|(i, &b)| if Some(i) == axis { b } else { b + 1 })
        .collect();
    ExponentVector::from_naturals(&v)
}

impl MonomialIdeal {
    /// The ideal generated by `z^β` for each listed exponent, reduced to its
    /// minimal antichain.
    pub fn minimalize(dimension: usize, exponents: &[Vec<u32>]) -> Result<Self> {
        for e in exponents {
            check_dim(dimension, e.len())?;
        }
        Ok(Self {
            dimension,
            generators: minimal_elements(exponents, |a, b| leq(a, b)),
        })
    }

    pub fn zero(dimension: usize) -> Self {
        Self {
            dimension,
            generators: Vec::new(),
        }
    }

    pub fn unit(dimension: usize) -> Self {
        Self {
            dimension,
            generators: vec![vec![0; dimension]],
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| g.iter().all(|&e| e == 0))
    }

    pub fn contains(&self, beta: &[u32]) -> Result<bool> {
        check_dim(self.dimension, beta.len())?;
        Ok(self.generators.iter().any(|g| leq(g, beta)))
    }

    /// Containment of ideals (as upward-closed exponent sets).
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.dimension == other.dimension
            && self.generators.iter().all(|g| other.generators.iter().any(|h| leq(h, g)))
    }

    fn nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::InvalidInput("the zero ideal has no Newton polyhedron".into()))
        } else {
            Ok(())
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

    pub fn newton_polyhedron(&self) -> Result<NewtonPolyhedron> {
        self.nonzero()?;
        NewtonPolyhedron::build(self.generators.iter().map(|g| ExponentVector::from_naturals(g)).collect())
    }

    /// The weight `c·log|𝔞|` as a concave toric function.
    pub fn toric_function(&self, c: &Rational) -> Result<ConcaveToricFunction> {
        self.nonzero()?;
        positive(c)?;
        let gens: Vec<ExponentVector> = self.generators.iter().map(|g| ExponentVector::from_naturals(g)).collect();
        ConcaveToricFunction::from_generators(&gens, c)
    }

    /// `⌈c·max_j (α_j)_i⌉` per coordinate: no minimal generator of `I(𝔞^c)` exceeds it.
    pub fn multiplier_caps(&self, c: &Rational) -> Result<Vec<u32>> {
        self.nonzero()?;
        positive(c)?;
        Ok((0..self.dimension)
            .map(|i| {
                let max = self.generators.iter().map(|g| g[i]).max().unwrap();
                ceil_u32(&(c * Rational::from_integer(max.into())))
            })
            .collect())
    }

    /// Howald: `z^β ∈ I(𝔞^c) ⟺ β + 𝟙 ∈ c·P̊(𝔞)`.
    pub fn multiplier_ideal(&self, c: &Rational) -> Result<MonomialIdeal> {
        let caps = self.multiplier_caps(c)?;
        self.multiplier_ideal_in_box(c, &caps)
    }

    /// [`multiplier_ideal`](Self::multiplier_ideal) with explicit enumeration caps.
    pub fn multiplier_ideal_in_box(&self, c: &Rational, caps: &[u32]) -> Result<MonomialIdeal> {
        positive(c)?;
        check_dim(self.dimension, caps.len())?;
        let p = self.newton_polyhedron()?;
        let mut test = InteriorTest::new(&p, c);
        let generators = minimal_members(caps, |beta| test.is_interior(&plus_ones_except(beta, None)))?;
        Ok(MonomialIdeal {
            dimension: self.dimension,
            generators,
        })
    }

    /// The log canonical threshold, `+∞` exactly for the unit ideal.
    pub fn lct(&self) -> Result<Scale> {
        self.newton_polyhedron()?.critical_scale(&ExponentVector::ones(self.dimension))
    }

    /// All `c ∈ (0, c_max]` at which `I(𝔞^c)` strictly shrinks, increasing.
    pub fn jumping_numbers(&self, c_max: &Rational) -> Result<Vec<Rational>> {
        positive(c_max)?;
        if self.is_unit() {
            return Err(Error::InvalidInput("the unit ideal has no jumping numbers".into()));
        }
        let p = self.newton_polyhedron()?;
        let caps = self.multiplier_caps(c_max)?;
        let mut jumps = Vec::new();
        minimal_members(&caps, |beta| {
            if let Scale::Finite(s) = p.critical_scale(&plus_ones_except(beta, None))? {
                if &s <= c_max {
                    jumps.push(s);
                }
            }
            Ok(false)
        })?;
        jumps.sort();
        jumps.dedup();
        Ok(jumps)
    }

    /// An `ε > 0` with `I(𝔞^{(1+ε)c}) = I(𝔞^c)`: half the smallest relative
    /// gap between `c` and the critical scales of the generators of `I(𝔞^c)`.
    pub fn openness_margin(&self, c: &Rational) -> Result<Rational> {
        let p = self.newton_polyhedron()?;
        let ideal = self.multiplier_ideal(c)?;
        let mut best: Option<Rational> = None;
        for beta in ideal.generators() {
            if let Scale::Finite(s) = p.critical_scale(&plus_ones_except(beta, None))? {
                let gap = s / c - Rational::one();
                if best.as_ref().is_none_or(|b| &gap < b) {
                    best = Some(gap);
                }
            }
        }
        let eps = match best {
            None => Rational::one(),
            Some(gap) => gap / Rational::from_integer(2.into()),
        };
        if !eps.is_positive() || self.multiplier_ideal(&((Rational::one() + &eps) * c))? != ideal {
            return Err(Error::Certificate(format!("openness margin {eps} failed for c = {c}")));
        }
        Ok(eps)
    }

    fn adjoint_hypothesis(&self, axis: usize) -> Result<()> {
        self.nonzero()?;
        self.check_axis(axis)?;
        if self.generators.iter().any(|g| g[axis] == 0) {
            Ok(())
        } else {
            Err(Error::Hypothesis(format!(
                "the ideal is contained in (z{}), so the weight is identically -inf on the hyperplane",
                axis + 1
            )))
        }
    }

    /// Multiplier caps with one extra unit on `axis`.
    pub fn adjoint_caps(&self, c: &Rational, axis: usize) -> Result<Vec<u32>> {
        self.adjoint_hypothesis(axis)?;
        let mut caps = self.multiplier_caps(c)?;
        caps[axis] += 1;
        Ok(caps)
    }

    /// `z^β ∈ Adj(𝔞^c, H)` for `H = {z_axis = 0}` iff
    /// `β + 𝟙̃ ∈ c·P̊(𝔞) ∪ c·ri(F_axis)`.
    pub fn adjoint_ideal(&self, c: &Rational, axis: usize) -> Result<MonomialIdeal> {
        let caps = self.adjoint_caps(c, axis)?;
        self.adjoint_ideal_in_box(c, axis, &caps)
    }

    pub fn adjoint_ideal_in_box(&self, c: &Rational, axis: usize, caps: &[u32]) -> Result<MonomialIdeal> {
        positive(c)?;
        self.adjoint_hypothesis(axis)?;
        check_dim(self.dimension, caps.len())?;
        let p = self.newton_polyhedron()?;
        let mut test = InteriorTest::new(&p, c);
        let generators = minimal_members(caps, |beta| {
            let a = plus_ones_except(beta, Some(axis));
            if beta[axis] == 0 {
                p.in_relative_interior_of_axis_face(axis, &a, c)
            } else {
                test.is_interior(&a)
            }
        })?;
        Ok(MonomialIdeal {
            dimension: self.dimension,
            generators,
        })
    }

    /// Generators with zero exponent on `axis`, projected to the hyperplane.
    pub fn restrict_to_axis(&self, axis: usize) -> Result<MonomialIdeal> {
        self.check_axis(axis)?;
        if self.dimension < 2 {
            return Err(Error::InvalidInput("restriction needs dimension at least 2".into()));
        }
        let projected: Vec<Vec<u32>> = self
            .generators
            .iter()
            .filter(|g| g[axis] == 0)
            .map(|g| {
                let mut h = g.clone();
                h.remove(axis);
                h
            })
            .collect();
        MonomialIdeal::minimalize(self.dimension - 1, &projected)
    }

    /// `z_axis · I`.
    pub fn shift_by_axis(&self, axis: usize) -> Result<MonomialIdeal> {
        self.check_axis(axis)?;
        let shifted: Vec<Vec<u32>> = self
            .generators
            .iter()
            .map(|g| {
                let mut h = g.clone();
                h[axis] += 1;
                h
            })
            .collect();
        MonomialIdeal::minimalize(self.dimension, &shifted)
    }

    /// `I ∩ (z_axis)`.
    pub fn intersect_axis_multiples(&self, axis: usize) -> Result<MonomialIdeal> {
        self.check_axis(axis)?;
        let lifted: Vec<Vec<u32>> = self
            .generators
            .iter()
            .map(|g| {
                let mut h = g.clone();
                h[axis] = h[axis].max(1);
                h
            })
            .collect();
        MonomialIdeal::minimalize(self.dimension, &lifted)
    }

    /// Checks the adjunction sequence
    /// `0 → z_p·I(𝔞^c) → Adj(𝔞^c, H) → I(𝔞|_H^c) → 0` on exponents.
    pub fn adjunction_report(&self, c: &Rational, axis: usize) -> Result<AdjunctionReport> {
        let adjoint = self.adjoint_ideal(c, axis)?;
        let multiplier = self.multiplier_ideal(c)?;
        let restricted = self.restrict_to_axis(axis)?;
        if restricted.is_zero() {
            return Err(Error::Hypothesis("the restricted ideal is zero".into()));
        }
        let restricted_multiplier = restricted.multiplier_ideal(c)?;
        let kernel = adjoint.intersect_axis_multiples(axis)?;
        let shifted_multiplier = multiplier.shift_by_axis(axis)?;
        let restriction = adjoint.restrict_to_axis(axis)?;
        Ok(AdjunctionReport {
            kernel_exact: kernel == shifted_multiplier,
            restriction_exact: restriction == restricted_multiplier,
            adjoint,
            multiplier,
            restricted_multiplier,
            kernel,
            shifted_multiplier,
            restriction,
        })
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("(0)");
        }
        let parts: Vec<String> = self
            .generators
            .iter()
            .map(|g| g.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
            .map(|s| format!("[{s}]"))
            .collect();
        write!(f, "<{}>", parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjunctionReport {
    pub adjoint: MonomialIdeal,
    pub multiplier: MonomialIdeal,
    /// `I(𝔞|_H^c)` on the hyperplane.
    pub restricted_multiplier: MonomialIdeal,
    /// `Adj ∩ (z_p)`.
    pub kernel: MonomialIdeal,
    /// `z_p · I(𝔞^c)`.
    pub shifted_multiplier: MonomialIdeal,
    /// Image of `Adj` on the hyperplane.
    pub restriction: MonomialIdeal,
    pub kernel_exact: bool,
    pub restriction_exact: bool,
}

/// Caps for the multiplier ideal of a toric weight, or `None` when it is the unit ideal.
pub fn toric_caps(g: &ConcaveToricFunction) -> Result<Option<Vec<u32>>> {
    let n = g.dim();
    match g {
        ConcaveToricFunction::PiecewiseLinearMin(_) => {
            let p = g.slope_polyhedron().expect("piecewise-linear");
            Ok(Some(
                (0..n)
                    .map(|i| ceil_u32(p.generators().iter().map(|s| &s.coords()[i]).max().unwrap()))
                    .collect(),
            ))
        }
        ConcaveToricFunction::PowerProduct(pp) if !pp.is_homogeneous() => Ok(None),
        ConcaveToricFunction::PowerProduct(pp) => {
            let mut caps = vec![0; n];
            for (i, cap) in caps.iter_mut().enumerate() {
                if pp.exponents().coords()[i].is_zero() {
                    continue;
                }
                let mut beta = vec![0u32; n];
                while !g.classify_in_body(&plus_ones_except(&beta, None))?.is_interior() {
                    beta[i] += 1;
                }
                *cap = beta[i];
            }
            Ok(Some(caps))
        }
    }
}

/// `z^β ∈ I(φ) ⟺ β + 𝟙 ∈ P̊(g)` for the toric weight attached to `g`.
pub fn multiplier_ideal_toric(g: &ConcaveToricFunction) -> Result<MonomialIdeal> {
    match toric_caps(g)? {
        None => Ok(MonomialIdeal::unit(g.dim())),
        Some(caps) => multiplier_ideal_toric_in_box(g, &caps),
    }
}

pub fn multiplier_ideal_toric_in_box(g: &ConcaveToricFunction, caps: &[u32]) -> Result<MonomialIdeal> {
    check_dim(g.dim(), caps.len())?;
    let generators = minimal_members(caps, |beta| Ok(g.classify_in_body(&plus_ones_except(beta, None))?.is_interior()))?;
    Ok(MonomialIdeal {
        dimension: g.dim(),
        generators,
    })
}

/// Membership of `z^β` in the zero adjoint ideal of
/// `φ = (k/2)·log Σ|zᵢ|^{2αᵢ}` along `H = {z_axis = 0}`:
/// with `N = Σ(βᵢ+1)/αᵢ`, either `N > k + 1/α_axis`, or equality holds and `β_axis > 0`.
pub fn adj0_power_membership(k: &Rational, alpha: &ExponentVector, axis: usize, beta: &[u32]) -> Result<bool> {
    check_dim(alpha.dim(), beta.len())?;
    if !k.is_positive() {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    if !alpha.is_strictly_positive() {
        return Err(Error::InvalidInput(format!("all exponents must be positive, got {alpha}")));
    }
    if axis >= alpha.dim() {
        return Err(Error::InvalidInput(format!("axis {axis} out of range")));
    }
    let a = alpha.coords();
    let n: Rational = beta
        .iter()
        .zip(a)
        .map(|(&b, ai)| Rational::from_integer((b + 1).into()) / ai)
        .sum();
    let threshold = k + a[axis].recip();
    Ok(n > threshold || (n == threshold && beta[axis] > 0))
}

/// `N − (k + 1/α_axis)` from [`adj0_power_membership`], for reporting.
pub fn adj0_power_gap(k: &Rational, alpha: &ExponentVector, axis: usize, beta: &[u32]) -> Rational {
    let a = alpha.coords();
    let n: Rational = beta
        .iter()
        .zip(a)
        .map(|(&b, ai)| Rational::from_integer((b + 1).into()) / ai)
        .sum();
    n - k - a[axis].recip()
}
