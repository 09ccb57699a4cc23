//! The automorphism family parametrized by a character `tau`, a lattice
//! scaling `c`, and (for the superalgebra) a declared square root `r` of `c`
//! together with a sign:
//!
//! `L(a, i) -> tau(a) c^{i-1} L(c a, i)`
//! `G(a, i) -> sign * tau(a) c^i r^{-1} G(c a, i)`
//!
//! Requiring the square root as data keeps every coefficient inside the
//! session field; flipping its sign is the same thing as flipping the
//! separate sign parameter, which is the Z_2 factor of the parameter group.
//! The parameter composition `(tau1, c1) * (tau2, c2) = (tau, c1 c2)` with
//! `tau(a) = tau1(c2 a) tau2(a)` (and `r1 r2`, `sign1 sign2` on the odd
//! data) is verified extensionally against function composition.

use std::fmt;
use std::ops::Mul;

use thiserror::Error;

use crate::grading::{Character, Coset, GradingError, GroupElement, ScalingCheck};
use crate::scalar::{QuadExtScalar, ScalarError};
use crate::superalgebra::{Algebra, AlgebraError, BasisVector, Element, Variant, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error("scaling factor must be nonzero")]
    ZeroScaling,
    #[error("scaling by {c} does not preserve the index lattices (witness {witness})")]
    ScalingDoesNotPreserve {
        c: QuadExtScalar,
        witness: QuadExtScalar,
    },
    #[error("declared root {r} does not square to {c}")]
    RootMismatch { r: QuadExtScalar, c: QuadExtScalar },
    #[error("variant {0} automorphisms need the odd parameters (r, sign)")]
    MissingOddPart(Variant),
    #[error("variant {0} automorphisms carry no odd parameters")]
    UnexpectedOddPart(Variant),
    #[error("automorphisms are implemented for variants SV and W, not {0}")]
    UnsupportedVariant(Variant),
    #[error("scaled degree {0} left the lattice after validation")]
    ScaledDegreeEscaped(QuadExtScalar),
}

/// The Z_2 parameter on the odd part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn scalar(self) -> QuadExtScalar {
        match self {
            Sign::Plus => QuadExtScalar::one(),
            Sign::Minus => QuadExtScalar::from_int(-1),
        }
    }

    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i64())
    }
}

/// Odd-part data: a declared square root of `c` and the sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddPart {
    pub r: QuadExtScalar,
    pub sign: Sign,
}

/// Parameters of one automorphism. `odd` is present for `SV` and absent for
/// the Witt variant `W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutParams {
    tau: Character,
    c: QuadExtScalar,
    odd: Option<OddPart>,
}

impl AutParams {
    pub fn new(tau: Character, c: QuadExtScalar, r: QuadExtScalar, sign: Sign) -> Self {
        AutParams {
            tau,
            c,
            odd: Some(OddPart { r, sign }),
        }
    }

    /// Witt-variant parameters: no odd part.
    pub fn new_witt(tau: Character, c: QuadExtScalar) -> Self {
        AutParams { tau, c, odd: None }
    }

    /// The identity of the parameter group.
    pub fn identity(algebra: &Algebra) -> Self {
        let tau = Character::trivial(algebra.group());
        if algebra.variant() == Variant::W {
            AutParams::new_witt(tau, QuadExtScalar::one())
        } else {
            AutParams::new(tau, QuadExtScalar::one(), QuadExtScalar::one(), Sign::Plus)
        }
    }

    /// `tau = 1, c = 1, r = 1, sign = -1`: fixes every `L` and negates
    /// every `G`.
    pub fn parity_involution(algebra: &Algebra) -> Self {
        AutParams::new(
            Character::trivial(algebra.group()),
            QuadExtScalar::one(),
            QuadExtScalar::one(),
            Sign::Minus,
        )
    }

    pub fn tau(&self) -> &Character {
        &self.tau
    }

    pub fn scaling(&self) -> &QuadExtScalar {
        &self.c
    }

    pub fn odd(&self) -> Option<&OddPart> {
        self.odd.as_ref()
    }

    /// Checks every validity condition, reporting the first failure:
    /// `c != 0`, lattice and coset preservation, `r^2 = c`, and odd-part
    /// presence matching the variant.
    pub fn validate(&self, algebra: &Algebra) -> Result<(), AutError> {
        match algebra.variant() {
            Variant::SV => {
                if self.odd.is_none() {
                    return Err(AutError::MissingOddPart(Variant::SV));
                }
            }
            Variant::W => {
                if self.odd.is_some() {
                    return Err(AutError::UnexpectedOddPart(Variant::W));
                }
            }
            other => return Err(AutError::UnsupportedVariant(other)),
        }
        if self.c.is_zero() {
            return Err(AutError::ZeroScaling);
        }
        if let ScalingCheck::Fails { witness } = algebra.group().scaling_preserves(&self.c)? {
            return Err(AutError::ScalingDoesNotPreserve {
                c: self.c.clone(),
                witness,
            });
        }
        if let Some(odd) = &self.odd {
            let square = &odd.r * &odd.r;
            if square != self.c {
                return Err(AutError::RootMismatch {
                    r: odd.r.clone(),
                    c: self.c.clone(),
                });
            }
        }
        // character values are nonzero by construction of Character
        Ok(())
    }

    fn scaled_degree(
        &self,
        algebra: &Algebra,
        degree: &GroupElement,
        coset: Coset,
    ) -> Result<GroupElement, AutError> {
        let value = &self.c * &algebra.group().evaluate(degree);
        algebra
            .group()
            .member(&value, coset)
            .ok_or(AutError::ScaledDegreeEscaped(value))
    }

    /// Image of a single basis vector.
    pub fn apply_basis(
        &self,
        algebra: &Algebra,
        vector: &BasisVector,
    ) -> Result<Element, AutError> {
        match vector {
            BasisVector::C => Err(AutError::UnsupportedVariant(Variant::SVir)),
            BasisVector::L { degree, level } => {
                let new_degree = self.scaled_degree(algebra, degree, Coset::Gamma)?;
                let coeff = &self.tau.eval(degree) * &self.c.pow(*level as i64 - 1)?;
                Ok(Element::single(
                    algebra.variant(),
                    BasisVector::L {
                        degree: new_degree,
                        level: *level,
                    },
                    coeff,
                ))
            }
            BasisVector::G { degree, level } => {
                let odd = self
                    .odd
                    .as_ref()
                    .ok_or(AutError::MissingOddPart(algebra.variant()))?;
                let new_degree = self.scaled_degree(algebra, degree, Coset::SPlusGamma)?;
                let coeff = &(&(&odd.sign.scalar() * &self.tau.eval(degree))
                    * &self.c.pow(*level as i64)?)
                    * &odd.r.inv()?;
                Ok(Element::single(
                    algebra.variant(),
                    BasisVector::G {
                        degree: new_degree,
                        level: *level,
                    },
                    coeff,
                ))
            }
        }
    }

    /// Linear extension to elements.
    pub fn apply(&self, algebra: &Algebra, x: &Element) -> Result<Element, AutError> {
        let mut out = Element::zero(x.variant());
        for (vector, coeff) in x.terms() {
            out = out.add(&self.apply_basis(algebra, vector)?.scaled(coeff));
        }
        Ok(out)
    }

    /// Parameter composition matching `apply(self) . apply(rhs)`.
    pub fn compose(&self, algebra: &Algebra, rhs: &AutParams) -> Result<AutParams, AutError> {
        let group = algebra.group();
        let mut values = Vec::with_capacity(group.rank());
        for (k, basis_value) in group.canonical_basis().iter().enumerate() {
            let scaled = &rhs.c * basis_value;
            let coords = group
                .member(&scaled, Coset::Omega)
                .ok_or(AutError::ScaledDegreeEscaped(scaled))?;
            let v = &self.tau.eval(&coords) * &rhs.tau.values()[k];
            values.push(v);
        }
        let tau = Character::new(group, values).expect("products of units are nonzero");
        let c = &self.c * &rhs.c;
        let odd = match (&self.odd, &rhs.odd) {
            (Some(a), Some(b)) => Some(OddPart {
                r: &a.r * &b.r,
                sign: a.sign * b.sign,
            }),
            (None, None) => None,
            _ => return Err(AutError::MissingOddPart(algebra.variant())),
        };
        Ok(AutParams {
            tau,
            c,
            odd,
        })
    }

    /// The inverse parameters: `c^{-1}`, `r^{-1}`, the same sign, and
    /// `tau'(a) = tau(c^{-1} a)^{-1}`.
    pub fn inverse(&self, algebra: &Algebra) -> Result<AutParams, AutError> {
        let group = algebra.group();
        let c_inv = self.c.inv()?;
        let mut values = Vec::with_capacity(group.rank());
        for basis_value in group.canonical_basis() {
            let scaled = &c_inv * basis_value;
            let coords = group
                .member(&scaled, Coset::Omega)
                .ok_or(AutError::ScaledDegreeEscaped(scaled))?;
            values.push(self.tau.eval(&coords).inv()?);
        }
        let tau = Character::new(group, values).expect("inverses of units are nonzero");
        let odd = match &self.odd {
            Some(part) => Some(OddPart {
                r: part.r.inv()?,
                sign: part.sign,
            }),
            None => None,
        };
        Ok(AutParams {
            tau,
            c: c_inv,
            odd,
        })
    }
}

/// One homomorphism-property violation.
#[derive(Debug, Clone)]
pub struct HomViolation {
    pub x: BasisVector,
    pub y: BasisVector,
    pub residual: Element,
}

#[derive(Debug, Clone)]
pub struct HomReport {
    pub checked: usize,
    pub violations: Vec<HomViolation>,
}

impl HomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies `phi([x,y]) = [phi(x), phi(y)]` over all window basis pairs.
pub fn check_hom(
    params: &AutParams,
    algebra: &Algebra,
    window: &Window,
) -> Result<HomReport, AutError> {
    let basis = algebra.window_basis(window);
    let images: Vec<Element> = basis
        .iter()
        .map(|b| params.apply_basis(algebra, b))
        .collect::<Result<_, _>>()?;
    let mut report = HomReport {
        checked: 0,
        violations: Vec::new(),
    };
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate() {
            let bracket = algebra.bracket_basis(x, y);
            let mut residual = params.apply(algebra, &bracket)?;
            residual.merge_owned(algebra.bracket(&images[i], &images[j])?, true);
            report.checked += 1;
            if !residual.is_zero() {
                report.violations.push(HomViolation {
                    x: x.clone(),
                    y: y.clone(),
                    residual,
                });
            }
        }
    }
    Ok(report)
}

/// Verifies `apply(compose(p1, p2)) = apply(p1) . apply(p2)` on every window
/// basis vector.
pub fn check_composition(
    p1: &AutParams,
    p2: &AutParams,
    algebra: &Algebra,
    window: &Window,
) -> Result<bool, AutError> {
    let composed = p1.compose(algebra, p2)?;
    for b in algebra.window_basis(window) {
        let direct = composed.apply_basis(algebra, &b)?;
        let stepped = p1.apply(algebra, &p2.apply_basis(algebra, &b)?)?;
        if direct != stepped {
            return Ok(false);
        }
    }
    Ok(true)
}
