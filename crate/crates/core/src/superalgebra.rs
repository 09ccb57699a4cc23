//! Sparse elements and exact brackets for the four algebra variants.
//!
//! * `SV` — the not-finitely graded superalgebra with basis
//!   `L(a, i)` for `a in Gamma` and `G(m, j)` for `m in s + Gamma`,
//!   `i, j >= 0`, and brackets
//!   `[L(a,i), L(b,j)] = (b-a) L(a+b, i+j) + (j-i) L(a+b, i+j-1)`,
//!   `[L(a,i), G(m,j)] = (m-a/2) G(a+m, i+j) + (j-i/2) G(a+m, i+j-1)`,
//!   `[G(m,i), G(n,j)] = 2 L(m+n, i+j)`.
//! * `W` — its even `L`-only subalgebra, the generalized Witt algebra.
//! * `SVir` — the classical centrally extended super-Virasoro algebra on
//!   the same index groups (levels fixed at 0, central element `C`).
//! * `SVir0` — the centerless quotient of `SVir`, which is also the level-0
//!   slice of `SV`.
//!
//! Terms whose level index would be `-1` are undefined notation and are
//! dropped during bracket evaluation; they are never stored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::RwLock;

use thiserror::Error;

use crate::grading::{Coset, GroupElement, IndexGroup};
use crate::scalar::{QuadExtScalar, ScalarError};
use crate::span::{InsertOutcome, RowEchelon};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("elements of variant {0} and {1} cannot be combined")]
    MixedVariants(Variant, Variant),
    #[error("expected an element of variant {expected}, got {got}")]
    VariantMismatch { expected: Variant, got: Variant },
    #[error("basis vectors of kind {kind} do not exist in variant {variant}")]
    KindNotAllowed { kind: BasisKind, variant: Variant },
    #[error("variant {0} has no level index; only level 0 is valid")]
    PositiveLevelNotAllowed(Variant),
    #[error("degree {value} does not lie in {lattice}")]
    DegreeOutsideLattice { value: QuadExtScalar, lattice: String },
    #[error("operation requires variant {needed}, got {got}")]
    RequiresVariant { needed: Variant, got: Variant },
    #[error("cannot parse basis literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
    #[error("window degrees must contain 0 and be closed under negation ({0} has no negative)")]
    WindowNotSymmetric(GroupElement),
    #[error("window must contain the degree 0")]
    WindowMissingZero,
}

/// Which of the four algebras an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    SV,
    W,
    SVir,
    SVir0,
}

impl Variant {
    /// Whether basis vectors carry a nontrivial level index.
    pub fn leveled(self) -> bool {
        matches!(self, Variant::SV | Variant::W)
    }

    pub fn has_g(self) -> bool {
        !matches!(self, Variant::W)
    }

    pub fn has_central(self) -> bool {
        matches!(self, Variant::SVir)
    }

    pub fn parse(s: &str) -> Option<Variant> {
        match s {
            "SV" => Some(Variant::SV),
            "W" => Some(Variant::W),
            "SVir" => Some(Variant::SVir),
            "SVir0" => Some(Variant::SVir0),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Variant::SV => "SV",
            Variant::W => "W",
            Variant::SVir => "SVir",
            Variant::SVir0 => "SVir0",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn add(self, other: Parity) -> Parity {
        if other == Parity::Odd {
            self.flip()
        } else {
            self
        }
    }
}

/// The Koszul sign `(-1)^{|x||y|}`.
pub fn parity_sign(x: Parity, y: Parity) -> i64 {
    if x == Parity::Odd && y == Parity::Odd {
        -1
    } else {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisKind {
    L,
    G,
    C,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::L => "L",
            BasisKind::G => "G",
            BasisKind::C => "C",
        })
    }
}

/// A basis vector `L(degree, level)`, `G(degree, level)`, or the central
/// element `C`. Degrees are stored as lattice coordinates; `L` degrees lie
/// in `Gamma`, `G` degrees in the coset `s + Gamma`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisVector {
    L { degree: GroupElement, level: u32 },
    G { degree: GroupElement, level: u32 },
    C,
}

impl BasisVector {
    pub fn kind(&self) -> BasisKind {
        match self {
            BasisVector::L { .. } => BasisKind::L,
            BasisVector::G { .. } => BasisKind::G,
            BasisVector::C => BasisKind::C,
        }
    }

    /// `L` and `C` are even, `G` is odd.
    pub fn parity(&self) -> Parity {
        match self {
            BasisVector::G { .. } => Parity::Odd,
            _ => Parity::Even,
        }
    }

    pub fn degree(&self) -> Option<&GroupElement> {
        match self {
            BasisVector::L { degree, .. } | BasisVector::G { degree, .. } => Some(degree),
            BasisVector::C => None,
        }
    }

    /// `C` counts as degree zero in the grading.
    pub fn degree_or_zero(&self, rank: usize) -> GroupElement {
        self.degree().cloned().unwrap_or_else(|| GroupElement::zero(rank))
    }

    pub fn level(&self) -> Option<u32> {
        match self {
            BasisVector::L { level, .. } | BasisVector::G { level, .. } => Some(*level),
            BasisVector::C => None,
        }
    }
}

/// A finite linear combination of basis vectors with exact coefficients.
/// Zero coefficients are never stored and the term order is canonical, so
/// structural equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    variant: Variant,
    terms: BTreeMap<BasisVector, QuadExtScalar>,
}

impl Element {
    pub fn zero(variant: Variant) -> Self {
        Element {
            variant,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(variant: Variant, vector: BasisVector, coeff: QuadExtScalar) -> Self {
        let mut e = Element::zero(variant);
        e.add_term(vector, coeff);
        e
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisVector, &QuadExtScalar)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &BasisVector> {
        self.terms.keys()
    }

    pub fn coeff(&self, vector: &BasisVector) -> QuadExtScalar {
        self.terms
            .get(vector)
            .cloned()
            .unwrap_or_else(QuadExtScalar::zero)
    }

    pub(crate) fn add_term(&mut self, vector: BasisVector, coeff: QuadExtScalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&vector) {
            Some(entry) => {
                *entry = &*entry + &coeff;
                if entry.is_zero() {
                    self.terms.remove(&vector);
                }
            }
            None => {
                self.terms.insert(vector, coeff);
            }
        }
    }

    pub fn add(&self, rhs: &Element) -> Element {
        assert_eq!(self.variant, rhs.variant, "variant mismatch");
        let mut out = self.clone();
        for (v, c) in &rhs.terms {
            out.add_term(v.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Element) -> Element {
        assert_eq!(self.variant, rhs.variant, "variant mismatch");
        let mut out = self.clone();
        for (v, c) in &rhs.terms {
            out.add_term(v.clone(), -c);
        }
        out
    }

    /// Merges an owned element in, optionally negated; avoids cloning keys.
    pub(crate) fn merge_owned(&mut self, rhs: Element, negate: bool) {
        debug_assert_eq!(self.variant, rhs.variant, "variant mismatch");
        for (v, c) in rhs.terms {
            self.add_term(v, if negate { -c } else { c });
        }
    }

    /// Adds `factor * rhs` term by term.
    pub(crate) fn add_scaled(&mut self, rhs: &Element, factor: &QuadExtScalar) {
        debug_assert_eq!(self.variant, rhs.variant, "variant mismatch");
        if factor.is_zero() {
            return;
        }
        for (v, c) in &rhs.terms {
            self.add_term(v.clone(), c * factor);
        }
    }

    pub fn scaled(&self, factor: &QuadExtScalar) -> Element {
        if factor.is_zero() {
            return Element::zero(self.variant);
        }
        Element {
            variant: self.variant,
            terms: self
                .terms
                .iter()
                .map(|(v, c)| (v.clone(), c * factor))
                .collect(),
        }
    }

    pub fn negated(&self) -> Element {
        Element {
            variant: self.variant,
            terms: self.terms.iter().map(|(v, c)| (v.clone(), -c)).collect(),
        }
    }

    /// `Some(parity)` when every term has the same parity; the zero element
    /// counts as even.
    pub fn homogeneous_parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(BasisVector::parity);
        let Some(first) = it.next() else {
            return Some(Parity::Even);
        };
        it.all(|p| p == first).then_some(first)
    }

    /// `Some(degree)` when every term has the same degree (`C` counting as
    /// zero); `None` for the zero element or mixed degrees.
    pub fn homogeneous_degree(&self, rank: usize) -> Option<GroupElement> {
        let mut it = self.terms.keys().map(|v| v.degree_or_zero(rank));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// The part of the element in the given degree (`C` counting as zero).
    pub fn degree_component(&self, degree: &GroupElement) -> Element {
        Element {
            variant: self.variant,
            terms: self
                .terms
                .iter()
                .filter(|(v, _)| v.degree_or_zero(degree.rank()) == *degree)
                .map(|(v, c)| (v.clone(), c.clone()))
                .collect(),
        }
    }

    /// All degrees occurring in the support (`C` counting as zero).
    pub fn degrees(&self, rank: usize) -> BTreeSet<GroupElement> {
        self.terms.keys().map(|v| v.degree_or_zero(rank)).collect()
    }

    /// Drops every term whose basis vector is outside the given set.
    pub fn projected(&self, keep: &BTreeSet<BasisVector>) -> Element {
        Element {
            variant: self.variant,
            terms: self
                .terms
                .iter()
                .filter(|(v, _)| keep.contains(*v))
                .map(|(v, c)| (v.clone(), c.clone()))
                .collect(),
        }
    }

    pub(crate) fn into_terms(self) -> BTreeMap<BasisVector, QuadExtScalar> {
        self.terms
    }
}

/// A finite set of degrees (containing 0 and closed under negation) plus a
/// level cap; bounds every enumerative check. Windows never truncate bracket
/// results, they only bound which pairs and triples get enumerated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    degrees: BTreeSet<GroupElement>,
    i_max: u32,
}

impl Window {
    /// All coordinate vectors with entries in `[-bound, bound]`.
    pub fn from_coord_bound(group: &IndexGroup, bound: i64, i_max: u32) -> Window {
        let bound = bound.abs();
        let mut degrees = BTreeSet::new();
        let rank = group.rank();
        let mut coords = vec![-bound; rank];
        loop {
            degrees.insert(GroupElement::new(coords.clone()));
            let mut k = 0;
            loop {
                if k == rank {
                    return Window { degrees, i_max };
                }
                if coords[k] < bound {
                    coords[k] += 1;
                    break;
                }
                coords[k] = -bound;
                k += 1;
            }
        }
    }

    pub fn from_degrees(
        degrees: impl IntoIterator<Item = GroupElement>,
        i_max: u32,
    ) -> Result<Window, AlgebraError> {
        let degrees: BTreeSet<GroupElement> = degrees.into_iter().collect();
        let Some(first) = degrees.first() else {
            return Err(AlgebraError::WindowMissingZero);
        };
        if !degrees.contains(&GroupElement::zero(first.rank())) {
            return Err(AlgebraError::WindowMissingZero);
        }
        for d in &degrees {
            if !degrees.contains(&-d) {
                return Err(AlgebraError::WindowNotSymmetric(d.clone()));
            }
        }
        Ok(Window { degrees, i_max })
    }

    pub fn degrees(&self) -> &BTreeSet<GroupElement> {
        &self.degrees
    }

    pub fn i_max(&self) -> u32 {
        self.i_max
    }

    pub fn contains(&self, vector: &BasisVector) -> bool {
        match vector {
            BasisVector::C => true,
            _ => {
                self.degrees.contains(vector.degree().unwrap())
                    && vector.level().unwrap() <= self.i_max
            }
        }
    }
}

/// Result of a centrality probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CentralityCheck {
    Central,
    NotCentral {
        against: BasisVector,
        bracket: Element,
    },
}

impl CentralityCheck {
    pub fn is_central(&self) -> bool {
        matches!(self, CentralityCheck::Central)
    }
}

/// Which window basis vectors the closure of the generator set reaches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanReport {
    pub reached: Vec<BasisVector>,
    pub missing: Vec<BasisVector>,
}

/// One of the four algebras over a concrete index group: owns the bracket
/// and everything enumerative.
///
/// Degree evaluations into the field recur constantly in enumerative
/// checks, so they are memoized behind a lock; the cache only ever holds
/// values derived from the immutable group.
#[derive(Debug)]
pub struct Algebra {
    variant: Variant,
    group: IndexGroup,
    degree_values: RwLock<BTreeMap<GroupElement, QuadExtScalar>>,
}

impl Clone for Algebra {
    fn clone(&self) -> Self {
        Algebra::new(self.variant, self.group.clone())
    }
}

impl Algebra {
    pub fn new(variant: Variant, group: IndexGroup) -> Self {
        Algebra {
            variant,
            group,
            degree_values: RwLock::new(BTreeMap::new()),
        }
    }

    fn degree_value(&self, e: &GroupElement) -> QuadExtScalar {
        if let Some(v) = self.degree_values.read().expect("cache lock").get(e) {
            return v.clone();
        }
        let v = self.group.evaluate(e);
        self.degree_values
            .write()
            .expect("cache lock")
            .insert(e.clone(), v.clone());
        v
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn group(&self) -> &IndexGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    /// Same group and field, different variant.
    pub fn with_variant(&self, variant: Variant) -> Algebra {
        Algebra::new(variant, self.group.clone())
    }

    // -- basis vector constructors -----------------------------------------

    pub fn l(&self, degree: GroupElement, level: u32) -> Result<BasisVector, AlgebraError> {
        self.check_level(level)?;
        if !self.group.coords_in_coset(&degree, Coset::Gamma) {
            return Err(AlgebraError::DegreeOutsideLattice {
                value: self.group.evaluate(&degree),
                lattice: "Gamma".into(),
            });
        }
        Ok(BasisVector::L { degree, level })
    }

    pub fn g(&self, degree: GroupElement, level: u32) -> Result<BasisVector, AlgebraError> {
        if !self.variant.has_g() {
            return Err(AlgebraError::KindNotAllowed {
                kind: BasisKind::G,
                variant: self.variant,
            });
        }
        self.check_level(level)?;
        if !self.group.coords_in_coset(&degree, Coset::SPlusGamma) {
            return Err(AlgebraError::DegreeOutsideLattice {
                value: self.group.evaluate(&degree),
                lattice: "s + Gamma".into(),
            });
        }
        Ok(BasisVector::G { degree, level })
    }

    pub fn central(&self) -> Result<BasisVector, AlgebraError> {
        if !self.variant.has_central() {
            return Err(AlgebraError::KindNotAllowed {
                kind: BasisKind::C,
                variant: self.variant,
            });
        }
        Ok(BasisVector::C)
    }

    fn check_level(&self, level: u32) -> Result<(), AlgebraError> {
        if level > 0 && !self.variant.leveled() {
            return Err(AlgebraError::PositiveLevelNotAllowed(self.variant));
        }
        Ok(())
    }

    /// Validates a basis vector against the variant and index group.
    pub fn validate_vector(&self, vector: &BasisVector) -> Result<(), AlgebraError> {
        match vector {
            BasisVector::L { degree, level } => {
                self.l(degree.clone(), *level).map(|_| ())
            }
            BasisVector::G { degree, level } => {
                self.g(degree.clone(), *level).map(|_| ())
            }
            BasisVector::C => self.central().map(|_| ()),
        }
    }

    /// Builds an element after validating each term.
    pub fn element(
        &self,
        terms: impl IntoIterator<Item = (BasisVector, QuadExtScalar)>,
    ) -> Result<Element, AlgebraError> {
        let mut e = Element::zero(self.variant);
        for (v, c) in terms {
            self.validate_vector(&v)?;
            e.add_term(v, c);
        }
        Ok(e)
    }

    fn check_element(&self, x: &Element) -> Result<(), AlgebraError> {
        if x.variant() != self.variant {
            return Err(AlgebraError::VariantMismatch {
                expected: self.variant,
                got: x.variant(),
            });
        }
        Ok(())
    }

    // -- the bracket --------------------------------------------------------

    /// Bracket of two basis vectors; total on valid vectors.
    pub fn bracket_basis(&self, x: &BasisVector, y: &BasisVector) -> Element {
        let mut out = Element::zero(self.variant);
        self.bracket_basis_into(x, y, &QuadExtScalar::one(), &mut out);
        out
    }

    /// Adds `factor * [x, y]` into an accumulator; the workhorse behind the
    /// bilinear extension.
    fn bracket_basis_into(
        &self,
        x: &BasisVector,
        y: &BasisVector,
        factor: &QuadExtScalar,
        out: &mut Element,
    ) {
        use BasisVector::{C, G, L};
        let half = QuadExtScalar::rational(1, 2);
        let scale = |c: QuadExtScalar| if factor.is_one() { c } else { &c * factor };
        match (x, y) {
            (C, _) | (_, C) => {}
            (L { degree: a, level: i }, L { degree: b, level: j }) => {
                let alpha = self.degree_value(a);
                let beta = self.degree_value(b);
                let deg = a + b;
                out.add_term(
                    L {
                        degree: deg.clone(),
                        level: i + j,
                    },
                    scale(&beta - &alpha),
                );
                if i + j >= 1 {
                    out.add_term(
                        L {
                            degree: deg.clone(),
                            level: i + j - 1,
                        },
                        scale(QuadExtScalar::from_int(*j as i64 - *i as i64)),
                    );
                }
                if self.variant.has_central() && deg.is_zero() {
                    // (a^3 - a)/12 on the diagonal a + b = 0
                    let cubed = alpha.pow(3).expect("positive power");
                    let coeff = &(&cubed - &alpha) * &QuadExtScalar::rational(1, 12);
                    out.add_term(C, scale(coeff));
                }
            }
            (L { degree: a, level: i }, G { degree: m, level: j }) => {
                let alpha = self.degree_value(a);
                let mu = self.degree_value(m);
                let deg = a + m;
                out.add_term(
                    G {
                        degree: deg.clone(),
                        level: i + j,
                    },
                    scale(&mu - &(&alpha * &half)),
                );
                if i + j >= 1 {
                    out.add_term(
                        G {
                            degree: deg,
                            level: i + j - 1,
                        },
                        scale(QuadExtScalar::rational(2 * *j as i64 - *i as i64, 2)),
                    );
                }
            }
            (G { degree: m, level: i }, L { degree: b, level: j }) => {
                let mu = self.degree_value(m);
                let beta = self.degree_value(b);
                let deg = m + b;
                out.add_term(
                    G {
                        degree: deg.clone(),
                        level: i + j,
                    },
                    scale(&(&beta * &half) - &mu),
                );
                if i + j >= 1 {
                    out.add_term(
                        G {
                            degree: deg,
                            level: i + j - 1,
                        },
                        scale(QuadExtScalar::rational(*j as i64 - 2 * *i as i64, 2)),
                    );
                }
            }
            (G { degree: m, level: i }, G { degree: n, level: j }) => {
                let deg = m + n;
                out.add_term(
                    L {
                        degree: deg.clone(),
                        level: i + j,
                    },
                    scale(QuadExtScalar::from_int(2)),
                );
                if self.variant.has_central() && deg.is_zero() {
                    // -(m^2 - 1/4)/3 on the diagonal m + n = 0. With the
                    // (b-a) and (m-a/2) coefficient conventions above, the
                    // Jacobi identity forces the odd-sector central term to
                    // carry the sign opposite to the (a^3-a)/12 one.
                    let mu = self.degree_value(m);
                    let coeff = &(&QuadExtScalar::rational(1, 4) - &(&mu * &mu))
                        * &QuadExtScalar::rational(1, 3);
                    out.add_term(C, scale(coeff));
                }
            }
        }
    }

    fn bracket_unchecked(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::zero(self.variant);
        for (vx, cx) in x.terms() {
            for (vy, cy) in y.terms() {
                let factor = if cy.is_one() {
                    cx.clone()
                } else if cx.is_one() {
                    cy.clone()
                } else {
                    cx * cy
                };
                self.bracket_basis_into(vx, vy, &factor, &mut out);
            }
        }
        out
    }

    /// Bilinear extension of the basis bracket.
    pub fn bracket(&self, x: &Element, y: &Element) -> Result<Element, AlgebraError> {
        if x.variant() != y.variant() {
            return Err(AlgebraError::MixedVariants(x.variant(), y.variant()));
        }
        self.check_element(x)?;
        Ok(self.bracket_unchecked(x, y))
    }

    /// `[z, x]`, the adjoint action of `z`.
    pub fn adjoint(&self, z: &Element, x: &Element) -> Result<Element, AlgebraError> {
        self.bracket(z, x)
    }

    /// `[x, y] + (-1)^{|x||y|} [y, x]`; zero exactly when skew
    /// super-symmetry holds for the pair.
    pub fn skew_residual(&self, x: &BasisVector, y: &BasisVector) -> Element {
        let mut out = self.bracket_basis(x, y);
        let bwd = self.bracket_basis(y, x);
        out.merge_owned(bwd, parity_sign(x.parity(), y.parity()) == -1);
        out
    }

    /// `[x,[y,z]] - [[x,y],z] - (-1)^{|x||y|} [y,[x,z]]`; zero exactly when
    /// the super Jacobi identity holds for the triple.
    pub fn jacobi_residual(
        &self,
        x: &BasisVector,
        y: &BasisVector,
        z: &BasisVector,
    ) -> Element {
        let xe = Element::single(self.variant, x.clone(), QuadExtScalar::one());
        let ye = Element::single(self.variant, y.clone(), QuadExtScalar::one());
        let ze = Element::single(self.variant, z.clone(), QuadExtScalar::one());
        let mut out = self.bracket_unchecked(&xe, &self.bracket_unchecked(&ye, &ze));
        let first = self.bracket_unchecked(&self.bracket_unchecked(&xe, &ye), &ze);
        let second = self.bracket_unchecked(&ye, &self.bracket_unchecked(&xe, &ze));
        out.merge_owned(first, true);
        out.merge_owned(second, parity_sign(x.parity(), y.parity()) == 1);
        out
    }

    // -- windows and enumeration --------------------------------------------

    /// Every valid basis vector of this variant inside the window, sorted.
    pub fn window_basis(&self, window: &Window) -> Vec<BasisVector> {
        let mut out = Vec::new();
        let max_level = if self.variant.leveled() {
            window.i_max()
        } else {
            0
        };
        for degree in window.degrees() {
            if self.group.coords_in_coset(degree, Coset::Gamma) {
                for level in 0..=max_level {
                    out.push(BasisVector::L {
                        degree: degree.clone(),
                        level,
                    });
                }
            }
            if self.variant.has_g() && self.group.coords_in_coset(degree, Coset::SPlusGamma) {
                for level in 0..=max_level {
                    out.push(BasisVector::G {
                        degree: degree.clone(),
                        level,
                    });
                }
            }
        }
        if self.variant.has_central() {
            out.push(BasisVector::C);
        }
        out.sort();
        out
    }

    /// Basis vectors that can appear in brackets of window pairs: degree
    /// sums of window degrees, levels up to twice the cap.
    pub fn bracket_closure_basis(&self, window: &Window) -> Vec<BasisVector> {
        let mut degrees: BTreeSet<GroupElement> = window.degrees().clone();
        for a in window.degrees() {
            for b in window.degrees() {
                degrees.insert(a + b);
            }
        }
        let closed = Window {
            degrees,
            i_max: if self.variant.leveled() {
                2 * window.i_max()
            } else {
                0
            },
        };
        self.window_basis(&closed)
    }

    /// Brackets `z` against every window basis vector; the first nonzero
    /// bracket is the witness.
    pub fn is_central(
        &self,
        z: &Element,
        window: &Window,
    ) -> Result<CentralityCheck, AlgebraError> {
        self.check_element(z)?;
        for b in self.window_basis(window) {
            let be = Element::single(self.variant, b.clone(), QuadExtScalar::one());
            let bracket = self.bracket_unchecked(z, &be);
            if !bracket.is_zero() {
                return Ok(CentralityCheck::NotCentral {
                    against: b,
                    bracket,
                });
            }
        }
        Ok(CentralityCheck::Central)
    }

    /// A basis of the space of window-supported elements whose bracket with
    /// every window basis vector vanishes. Empty means the center is trivial
    /// window-locally.
    pub fn window_central_elements(&self, window: &Window) -> Vec<Element> {
        let basis = self.window_basis(window);
        let mut echelon: RowEchelon<(usize, BasisVector)> = RowEchelon::new();
        let mut central = Vec::new();
        for (zi, z) in basis.iter().enumerate() {
            let mut row: BTreeMap<(usize, BasisVector), QuadExtScalar> = BTreeMap::new();
            for (bi, b) in basis.iter().enumerate() {
                for (v, c) in self.bracket_basis(z, b).terms {
                    row.insert((bi, v), c);
                }
            }
            if let InsertOutcome::ReducedToZero(tag) = echelon.insert(row, zi) {
                let mut elem = Element::zero(self.variant);
                for (k, coeff) in tag {
                    elem.add_term(basis[k].clone(), coeff);
                }
                if !elem.is_zero() {
                    central.push(elem);
                }
            }
        }
        central
    }

    /// Closure of `{L(a,0)} + {L(0,1)} + {G(m,0)}` under the bracket,
    /// with span bookkeeping projected onto the window: brackets of span
    /// members are projected onto the window basis and row-reduced until no
    /// new directions appear.
    pub fn generate_span(&self, window: &Window) -> Result<SpanReport, AlgebraError> {
        if self.variant != Variant::SV {
            return Err(AlgebraError::RequiresVariant {
                needed: Variant::SV,
                got: self.variant,
            });
        }
        let basis = self.window_basis(window);
        let keep: BTreeSet<BasisVector> = basis.iter().cloned().collect();

        let mut generators = Vec::new();
        for degree in window.degrees() {
            if self.group.coords_in_coset(degree, Coset::Gamma) {
                generators.push(BasisVector::L {
                    degree: degree.clone(),
                    level: 0,
                });
            }
            if self.group.coords_in_coset(degree, Coset::SPlusGamma) {
                generators.push(BasisVector::G {
                    degree: degree.clone(),
                    level: 0,
                });
            }
        }
        if window.i_max() >= 1 {
            generators.push(BasisVector::L {
                degree: GroupElement::zero(self.group.rank()),
                level: 1,
            });
        }

        let mut echelon: RowEchelon<BasisVector> = RowEchelon::new();
        let mut members: Vec<Element> = Vec::new();
        for g in generators {
            let elem = Element::single(self.variant, g, QuadExtScalar::one()).projected(&keep);
            if elem.is_zero() {
                continue;
            }
            if matches!(
                echelon.insert(elem.clone().into_terms(), members.len()),
                InsertOutcome::NewPivot
            ) {
                members.push(elem);
            }
        }

        let mut i = 0;
        while i < members.len() {
            for j in 0..=i {
                for (p, q) in [(i, j), (j, i)] {
                    if p == q && q != i {
                        continue;
                    }
                    let bracket = self
                        .bracket_unchecked(&members[p], &members[q])
                        .projected(&keep);
                    if bracket.is_zero() {
                        continue;
                    }
                    if matches!(
                        echelon.insert(bracket.clone().into_terms(), members.len()),
                        InsertOutcome::NewPivot
                    ) {
                        members.push(bracket);
                    }
                }
            }
            i += 1;
        }

        let mut reached = Vec::new();
        let mut missing = Vec::new();
        for b in basis {
            let unit = BTreeMap::from([(b.clone(), QuadExtScalar::one())]);
            if echelon.contains(&unit) {
                reached.push(b);
            } else {
                missing.push(b);
            }
        }
        Ok(SpanReport { reached, missing })
    }

    // -- literals -------------------------------------------------------------

    /// Renders a basis vector in the literal syntax, e.g. `L(3/2, 0)`.
    pub fn basis_literal(&self, vector: &BasisVector) -> String {
        match vector {
            BasisVector::C => "C".to_string(),
            BasisVector::L { degree, level } => {
                format!("L({}, {})", self.group.evaluate(degree), level)
            }
            BasisVector::G { degree, level } => {
                format!("G({}, {})", self.group.evaluate(degree), level)
            }
        }
    }

    /// Renders an element as a sum of `(coeff)*vector` terms.
    pub fn element_literal(&self, element: &Element) -> String {
        if element.is_zero() {
            return "0".to_string();
        }
        element
            .terms()
            .map(|(v, c)| format!("({})*{}", c, self.basis_literal(v)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses `L(degree, level)`, `G(degree, level)`, or `C`, with the
    /// degree in the scalar literal syntax.
    pub fn parse_basis(&self, literal: &str) -> Result<BasisVector, AlgebraError> {
        let err = |reason: &str| AlgebraError::Parse {
            literal: literal.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = literal.trim();
        if trimmed == "C" {
            return self.central();
        }
        let (kind, rest) = match trimmed.chars().next() {
            Some('L') => (BasisKind::L, &trimmed[1..]),
            Some('G') => (BasisKind::G, &trimmed[1..]),
            _ => return Err(err("expected `L(...)`, `G(...)`, or `C`")),
        };
        let rest = rest.trim();
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| err("expected parentheses around the arguments"))?;
        let comma = inner
            .rfind(',')
            .ok_or_else(|| err("expected `kind(degree, level)`"))?;
        let degree_lit = &inner[..comma];
        let level_lit = inner[comma + 1..].trim();
        let level: u32 = level_lit
            .parse()
            .map_err(|_| err("level must be a nonnegative integer"))?;
        let value = QuadExtScalar::parse(degree_lit, self.group.radicand())?;
        let coset = match kind {
            BasisKind::L => Coset::Gamma,
            BasisKind::G => Coset::SPlusGamma,
            BasisKind::C => unreachable!(),
        };
        let degree = self.group.member(&value, coset).ok_or_else(|| {
            AlgebraError::DegreeOutsideLattice {
                value: value.clone(),
                lattice: match kind {
                    BasisKind::L => "Gamma".into(),
                    _ => "s + Gamma".into(),
                },
            }
        })?;
        match kind {
            BasisKind::L => self.l(degree, level),
            BasisKind::G => self.g(degree, level),
            BasisKind::C => unreachable!(),
        }
    }
}
