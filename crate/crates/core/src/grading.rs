//! Finitely generated index groups inside the quadratic field.
//!
//! The degrees of all basis vectors live in two nested lattices: `Gamma`
//! (which must contain 1) and `Omega`, generated by `Gamma` together with a
//! shift `s` satisfying `2s in Gamma`. Both are free abelian groups of rank
//! at most 2, so membership and equality reduce to integer linear algebra
//! against a canonical basis computed by Hermite reduction.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::{QuadExtScalar, Rational, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradingError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("no generators given")]
    NoGenerators,
    #[error("generators span a lattice of rank {0}, only rank <= 2 is supported")]
    UnsupportedRank(usize),
    #[error("1 is not an element of the gamma lattice")]
    OneNotInGamma,
    #[error("2s = {0} is not an element of the gamma lattice")]
    ShiftNotHalfGamma(QuadExtScalar),
    #[error("value count {got} does not match the group rank {rank}")]
    WrongArity { got: usize, rank: usize },
    #[error("character values must be nonzero")]
    ZeroCharacterValue,
    #[error("coordinate vector length {got} does not match the group rank {rank}")]
    WrongCoordLength { got: usize, rank: usize },
    #[error("scaling factor must be nonzero")]
    ZeroScaling,
}

/// Element of an index group, stored as integer coordinates against the
/// group's canonical basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    coords: Vec<i64>,
}

impl GroupElement {
    pub fn new(coords: Vec<i64>) -> Self {
        GroupElement { coords }
    }

    pub fn zero(rank: usize) -> Self {
        GroupElement {
            coords: vec![0; rank],
        }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.coords.len(), rhs.coords.len(), "rank mismatch");
        GroupElement {
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(x, y)| x.checked_add(*y).expect("degree coordinate overflow"))
                .collect(),
        }
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        self + &(-rhs)
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement {
            coords: self.coords.iter().map(|x| -x).collect(),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Which lattice or coset a membership query targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coset {
    Omega,
    Gamma,
    SPlusGamma,
}

/// Outcome of a scaling-invariance check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalingCheck {
    Preserves,
    /// A concrete field value that left the lattice it had to stay in.
    Fails { witness: QuadExtScalar },
}

impl ScalingCheck {
    pub fn preserves(&self) -> bool {
        matches!(self, ScalingCheck::Preserves)
    }
}

/// Row-style Hermite normal form of an integer row lattice.
///
/// Returns the nonzero rows (each with a positive pivot, entries above a
/// pivot reduced into `[0, pivot)`) together with the pivot column of each
/// row. The result depends only on the lattice, not on the generator order.
fn hermite_rows(mut rows: Vec<Vec<BigInt>>, cols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut pivot_row = 0usize;
    let mut pivots = Vec::new();
    for col in 0..cols {
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..rows.len() {
                if !rows[r][col].is_zero()
                    && best.is_none_or(|b| rows[r][col].abs() < rows[b][col].abs())
                {
                    best = Some(r);
                }
            }
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let mut reduced_all = true;
            for r in pivot_row + 1..rows.len() {
                if !rows[r][col].is_zero() {
                    let q = rows[r][col].div_floor(&rows[pivot_row][col]);
                    for c in 0..cols {
                        let delta = &q * &rows[pivot_row][c];
                        rows[r][c] -= delta;
                    }
                    if !rows[r][col].is_zero() {
                        reduced_all = false;
                    }
                }
            }
            if reduced_all {
                if rows[pivot_row][col].is_negative() {
                    for c in 0..cols {
                        rows[pivot_row][c] = -rows[pivot_row][c].clone();
                    }
                }
                // reduce the entries above the new pivot
                for r in 0..pivot_row {
                    let q = rows[r][col].div_floor(&rows[pivot_row][col]);
                    if !q.is_zero() {
                        for c in 0..cols {
                            let delta = &q * &rows[pivot_row][c];
                            rows[r][c] -= delta;
                        }
                    }
                }
                pivots.push(col);
                pivot_row += 1;
                break;
            }
        }
    }
    rows.truncate(pivot_row);
    (rows, pivots)
}

/// An integer sublattice given by Hermite-form rows against an ambient basis.
#[derive(Debug, Clone, PartialEq, Eq)]
struct IntLattice {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    cols: usize,
}

impl IntLattice {
    fn from_generators(gens: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let (rows, pivots) = hermite_rows(gens, cols);
        IntLattice { rows, pivots, cols }
    }

    /// Integer membership by back-substitution along the pivot staircase.
    fn contains(&self, v: &[i64]) -> bool {
        let mut residual: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if residual[p].is_zero() {
                continue;
            }
            let (q, r) = residual[p].div_rem(&row[p]);
            if !r.is_zero() {
                return false;
            }
            for c in 0..self.cols {
                let delta = &q * &row[c];
                residual[c] -= delta;
            }
        }
        residual.iter().all(|x| x.is_zero())
    }
}

/// The pair of index lattices `Gamma <= Omega` inside `Q(sqrt(d))`, with a
/// canonical basis of `Omega` and the shift `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexGroup {
    d: i64,
    /// Canonical Z-basis of Omega, as field values.
    basis: Vec<QuadExtScalar>,
    /// The same basis as rows of rational coordinates on (1, sqrt(d)).
    basis_coords: Vec<[Rational; 2]>,
    pivot_cols: Vec<usize>,
    /// Gamma in Omega coordinates.
    gamma: IntLattice,
    s: QuadExtScalar,
    s_coords: GroupElement,
}

fn field_coords(x: &QuadExtScalar) -> [Rational; 2] {
    [x.rational_part().clone(), x.surd_part().clone()]
}

impl IndexGroup {
    /// Builds the group generated by `gamma_generators` and `s`, computing a
    /// canonical basis by integer Hermite reduction after clearing
    /// denominators. Validates `1 in Gamma` and `2s in Gamma`.
    pub fn new(
        d: i64,
        gamma_generators: &[QuadExtScalar],
        s: QuadExtScalar,
    ) -> Result<Self, GradingError> {
        crate::scalar::validate_radicand(d)?;
        if gamma_generators.is_empty() {
            return Err(GradingError::NoGenerators);
        }
        for g in gamma_generators.iter().chain(std::iter::once(&s)) {
            if let Some(gd) = g.radicand() {
                if gd != d {
                    return Err(ScalarError::MismatchedField(gd, d).into());
                }
            }
        }

        let mut all: Vec<[Rational; 2]> =
            gamma_generators.iter().map(field_coords).collect();
        all.push(field_coords(&s));

        // common denominator, then integer rows
        let mut denom = BigInt::one();
        for row in &all {
            for entry in row {
                denom = denom.lcm(entry.denom());
            }
        }
        let int_rows: Vec<Vec<BigInt>> = all
            .iter()
            .map(|row| {
                row.iter()
                    .map(|entry| entry.numer() * (&denom / entry.denom()))
                    .collect()
            })
            .collect();
        let (rows, _) = hermite_rows(int_rows, 2);
        let rank = rows.len();
        if rank > 2 {
            return Err(GradingError::UnsupportedRank(rank));
        }
        let denom_r = Rational::from_integer(denom);
        let basis_coords: Vec<[Rational; 2]> = rows
            .iter()
            .map(|row| {
                [
                    Rational::from_integer(row[0].clone()) / &denom_r,
                    Rational::from_integer(row[1].clone()) / &denom_r,
                ]
            })
            .collect();
        let basis: Vec<QuadExtScalar> = basis_coords
            .iter()
            .map(|[a, b]| QuadExtScalar::new(a.clone(), b.clone(), d))
            .collect::<Result<_, _>>()?;
        let pivot_cols: Vec<usize> = basis_coords
            .iter()
            .map(|row| if row[0].is_zero() { 1 } else { 0 })
            .collect();

        let mut group = IndexGroup {
            d,
            basis,
            basis_coords,
            pivot_cols,
            gamma: IntLattice {
                rows: Vec::new(),
                pivots: Vec::new(),
                cols: rank,
            },
            s: s.clone(),
            s_coords: GroupElement::zero(rank),
        };

        // Gamma in Omega coordinates.
        let gamma_rows: Vec<Vec<BigInt>> = gamma_generators
            .iter()
            .map(|g| {
                group
                    .omega_coords(g)
                    .expect("gamma generator must lie in the generated lattice")
                    .coords
                    .iter()
                    .map(|&c| BigInt::from(c))
                    .collect()
            })
            .collect();
        group.gamma = IntLattice::from_generators(gamma_rows, rank);
        group.s_coords = group
            .omega_coords(&s)
            .expect("s must lie in the generated lattice");

        if !group.gamma.contains(
            group
                .omega_coords(&QuadExtScalar::one())
                .ok_or(GradingError::OneNotInGamma)?
                .coords(),
        ) {
            return Err(GradingError::OneNotInGamma);
        }
        let two_s = s.scale_int(2);
        match group.omega_coords(&two_s) {
            Some(c) if group.gamma.contains(c.coords()) => {}
            _ => return Err(GradingError::ShiftNotHalfGamma(two_s)),
        }
        Ok(group)
    }

    pub fn radicand(&self) -> i64 {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn canonical_basis(&self) -> &[QuadExtScalar] {
        &self.basis
    }

    pub fn shift(&self) -> &QuadExtScalar {
        &self.s
    }

    pub fn shift_coords(&self) -> &GroupElement {
        &self.s_coords
    }

    /// `Omega`-coordinates of a field value, or `None` when it lies outside.
    fn omega_coords(&self, x: &QuadExtScalar) -> Option<GroupElement> {
        if let Some(xd) = x.radicand() {
            if xd != self.d {
                return None;
            }
        }
        let mut residual = field_coords(x);
        let mut coords = Vec::with_capacity(self.basis.len());
        for (row, &p) in self.basis_coords.iter().zip(&self.pivot_cols) {
            let t = &residual[p] / &row[p];
            if !t.is_integer() {
                return None;
            }
            for c in 0..2 {
                let delta = &t * &row[c];
                residual[c] -= delta;
            }
            coords.push(i64::try_from(t.to_integer()).expect("coordinate overflow"));
        }
        if residual.iter().all(|r| r.is_zero()) {
            Some(GroupElement::new(coords))
        } else {
            None
        }
    }

    /// Integer coordinates of `x` if it lies in the requested lattice or
    /// coset; non-membership is a `None`, not an error.
    pub fn member(&self, x: &QuadExtScalar, coset: Coset) -> Option<GroupElement> {
        match coset {
            Coset::Omega => self.omega_coords(x),
            Coset::Gamma => {
                let e = self.omega_coords(x)?;
                self.gamma.contains(e.coords()).then_some(e)
            }
            Coset::SPlusGamma => {
                let e = self.omega_coords(x)?;
                self.coords_in_coset(&e, Coset::SPlusGamma).then_some(e)
            }
        }
    }

    /// Coset test directly on coordinates.
    pub fn coords_in_coset(&self, e: &GroupElement, coset: Coset) -> bool {
        match coset {
            Coset::Omega => e.rank() == self.rank(),
            Coset::Gamma => self.gamma.contains(e.coords()),
            Coset::SPlusGamma => {
                let shifted = e - &self.s_coords;
                self.gamma.contains(shifted.coords())
            }
        }
    }

    /// The field value of a coordinate vector.
    pub fn evaluate(&self, e: &GroupElement) -> QuadExtScalar {
        assert_eq!(e.rank(), self.rank(), "rank mismatch");
        let mut acc = QuadExtScalar::zero();
        for (c, b) in e.coords().iter().zip(&self.basis) {
            acc = &acc + &b.scale_int(*c);
        }
        acc
    }

    /// Whether `c` scales `Omega`, `Gamma`, and the coset `s + Gamma` onto
    /// themselves. A failing field value is reported as witness.
    pub fn scaling_preserves(&self, c: &QuadExtScalar) -> Result<ScalingCheck, GradingError> {
        if c.is_zero() {
            return Err(GradingError::ZeroScaling);
        }
        let c_inv = c.inv().map_err(ScalarError::from)?;
        for factor in [c, &c_inv] {
            for b in &self.basis {
                let image = factor * b;
                if self.omega_coords(&image).is_none() {
                    return Ok(ScalingCheck::Fails { witness: image });
                }
            }
            for row in &self.gamma.rows {
                let g = self.evaluate(&GroupElement::new(
                    row.iter()
                        .map(|x| i64::try_from(x).expect("coordinate overflow"))
                        .collect(),
                ));
                let image = factor * &g;
                if self.member(&image, Coset::Gamma).is_none() {
                    return Ok(ScalingCheck::Fails { witness: image });
                }
            }
            // c * (s + Gamma) = s + Gamma reduces to c*s - s in Gamma once
            // the lattice conditions hold.
            let shifted = &(factor * &self.s) - &self.s;
            if self.member(&shifted, Coset::Gamma).is_none() {
                return Ok(ScalingCheck::Fails { witness: shifted });
            }
        }
        Ok(ScalingCheck::Preserves)
    }

    /// Scales a coordinate vector by a field value, when the image stays in
    /// the lattice.
    pub fn scale_coords(&self, c: &QuadExtScalar, e: &GroupElement) -> Option<GroupElement> {
        self.omega_coords(&(c * &self.evaluate(e)))
    }
}

/// An additive group homomorphism `Omega -> Q(sqrt(d))`, given by its values
/// on the canonical basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomZ {
    values: Vec<QuadExtScalar>,
}

impl HomZ {
    pub fn new(group: &IndexGroup, values: Vec<QuadExtScalar>) -> Result<Self, GradingError> {
        if values.len() != group.rank() {
            return Err(GradingError::WrongArity {
                got: values.len(),
                rank: group.rank(),
            });
        }
        Ok(HomZ { values })
    }

    /// The identity embedding `x -> x`, i.e. each basis element maps to its
    /// own field value.
    pub fn identity(group: &IndexGroup) -> Self {
        HomZ {
            values: group.canonical_basis().to_vec(),
        }
    }

    pub fn zero(group: &IndexGroup) -> Self {
        HomZ {
            values: vec![QuadExtScalar::zero(); group.rank()],
        }
    }

    pub fn values(&self) -> &[QuadExtScalar] {
        &self.values
    }

    /// Z-linear extension from the basis values.
    pub fn eval(&self, e: &GroupElement) -> QuadExtScalar {
        assert_eq!(e.rank(), self.values.len(), "rank mismatch");
        let mut acc = QuadExtScalar::zero();
        for (c, v) in e.coords().iter().zip(&self.values) {
            acc = &acc + &v.scale_int(*c);
        }
        acc
    }
}

/// A character `Omega -> Q(sqrt(d))*`, given by its (nonzero) values on the
/// canonical basis and extended multiplicatively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    values: Vec<QuadExtScalar>,
}

impl Character {
    pub fn new(group: &IndexGroup, values: Vec<QuadExtScalar>) -> Result<Self, GradingError> {
        if values.len() != group.rank() {
            return Err(GradingError::WrongArity {
                got: values.len(),
                rank: group.rank(),
            });
        }
        if values.iter().any(QuadExtScalar::is_zero) {
            return Err(GradingError::ZeroCharacterValue);
        }
        Ok(Character { values })
    }

    pub fn trivial(group: &IndexGroup) -> Self {
        Character {
            values: vec![QuadExtScalar::one(); group.rank()],
        }
    }

    pub fn values(&self) -> &[QuadExtScalar] {
        &self.values
    }

    /// Multiplicative extension; negative coordinates use inverses.
    pub fn eval(&self, e: &GroupElement) -> QuadExtScalar {
        assert_eq!(e.rank(), self.values.len(), "rank mismatch");
        let mut acc = QuadExtScalar::one();
        for (c, v) in e.coords().iter().zip(&self.values) {
            acc = &acc * &v.pow(*c).expect("character values are nonzero");
        }
        acc
    }
}
